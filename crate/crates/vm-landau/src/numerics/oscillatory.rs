//! Filon-type quadrature for integrals of the form int f(x) exp(i omega x) dx.
//!
//! Each panel projects the amplitude f onto Legendre polynomials (degree 12,
//! sampled at a 16-point Gauss rule) and integrates the oscillation exactly
//! through the moments int P_j(x) exp(i theta x) dx = 2 i^j j_j(theta), with
//! j_j the spherical Bessel functions. Panel widths are therefore set by the
//! smoothness of f alone, not by the oscillation frequency.

use super::gauss::{legendre_all, GaussRule};
use crate::C64;
use std::sync::Arc;
use std::sync::OnceLock;

const NODES: usize = 16;
const JMAX: usize = 12;

/// Spherical Bessel functions j_0..j_nmax at x.
///
/// Upward recurrence when x dominates the order, Miller's downward
/// recurrence otherwise, series for tiny arguments.
pub fn sph_bessel_jn(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = vec![0.0; nmax + 1];
    if ax < 1e-4 {
        // series: x^n / (2n+1)!! * (1 - x^2/(2(2n+3)) + ...)
        let x2 = x * x;
        let mut dfact = 1.0; // (2n+1)!!
        let mut xn = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            let corr = 1.0 - x2 / (2.0 * (2.0 * n as f64 + 3.0))
                + x2 * x2 / (8.0 * (2.0 * n as f64 + 3.0) * (2.0 * n as f64 + 5.0));
            *slot = xn / dfact * corr;
            xn *= ax;
            dfact *= 2.0 * n as f64 + 3.0;
        }
    } else if ax > nmax as f64 + 2.0 {
        // upward recurrence, stable for order < argument
        let j0 = ax.sin() / ax;
        out[0] = j0;
        if nmax >= 1 {
            let j1 = ax.sin() / (ax * ax) - ax.cos() / ax;
            out[1] = j1;
            for n in 1..nmax {
                out[n + 1] = (2.0 * n as f64 + 1.0) / ax * out[n] - out[n - 1];
            }
        }
    } else {
        // Miller's downward recurrence
        let start = nmax + 24;
        let mut jp = 0.0;
        let mut j = 1e-280;
        let mut tmp = vec![0.0; nmax.max(1) + 1];
        for n in (0..start).rev() {
            let jm = (2.0 * n as f64 + 3.0) / ax * j - jp;
            jp = j;
            j = jm;
            if n < tmp.len() {
                tmp[n] = j;
            }
            if j.abs() > 1e250 {
                // rescale to avoid overflow
                let s = 1.0 / j.abs();
                j *= s;
                jp *= s;
                for v in tmp.iter_mut() {
                    *v *= s;
                }
            }
        }
        // normalize against whichever low order is away from its zero
        // (j0 and j1 cannot vanish simultaneously)
        let j0t = ax.sin() / ax;
        let j1t = ax.sin() / (ax * ax) - ax.cos() / ax;
        let scale = if j0t.abs() >= j1t.abs() {
            j0t / tmp[0]
        } else {
            j1t / tmp[1]
        };
        for (slot, v) in out.iter_mut().zip(&tmp) {
            *slot = v * scale;
        }
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

struct FilonTables {
    rule: Arc<GaussRule>,
    /// legendre[j][i] = P_j(x_i)
    legendre: Vec<[f64; NODES]>,
}

fn tables() -> &'static FilonTables {
    static T: OnceLock<FilonTables> = OnceLock::new();
    T.get_or_init(|| {
        let rule = GaussRule::cached(NODES);
        let mut legendre = vec![[0.0; NODES]; JMAX + 1];
        let mut buf = vec![0.0; JMAX + 1];
        for (i, &x) in rule.nodes.iter().enumerate() {
            legendre_all(JMAX, x, &mut buf);
            for (j, row) in legendre.iter_mut().enumerate() {
                row[i] = buf[j];
            }
        }
        FilonTables { rule, legendre }
    })
}

/// Integral of f(x) exp(i omega x) over one panel [a, b].
/// Returns (value, truncation estimate from the last Legendre coefficients).
pub fn osc_panel<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64, omega: f64) -> (C64, f64) {
    let t = tables();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fy = [C64::new(0.0, 0.0); NODES];
    for (i, &x) in t.rule.nodes.iter().enumerate() {
        fy[i] = f(mid + half * x);
    }
    // Legendre coefficients c_j = (2j+1)/2 sum w_i f_i P_j(x_i)
    let mut coeff = [C64::new(0.0, 0.0); JMAX + 1];
    for (j, row) in t.legendre.iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..NODES {
            acc += t.rule.weights[i] * row[i] * fy[i];
        }
        coeff[j] = acc * (0.5 * (2.0 * j as f64 + 1.0));
    }
    let theta = omega * half;
    let jns = sph_bessel_jn(JMAX, theta);
    // i^j cycle
    let mut acc = C64::new(0.0, 0.0);
    let mut ipow = C64::new(1.0, 0.0);
    for j in 0..=JMAX {
        acc += coeff[j] * (2.0 * jns[j]) * ipow;
        ipow *= C64::new(0.0, 1.0);
    }
    let phase = C64::new(0.0, omega * mid).exp();
    let value = acc * half * phase;
    let err = (coeff[JMAX - 1].norm() + coeff[JMAX].norm()) * 2.0 * half;
    (value, err)
}

/// Integral of f(x) exp(i omega x) over a panel mesh given by breakpoints.
pub fn osc_integral<F: FnMut(f64) -> C64>(
    f: &mut F,
    breakpoints: &[f64],
    omega: f64,
) -> (C64, f64) {
    let mut acc = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for seg in breakpoints.windows(2) {
        let (v, e) = osc_panel(f, seg[0], seg[1], omega);
        acc += v;
        err += e;
    }
    (acc, err)
}

/// Amplitude projections cached per panel, so the same mesh can be
/// integrated against many frequencies cheaply (the Legendre coefficients
/// are frequency-independent).
#[derive(Debug, Clone)]
pub struct PanelSet {
    panels: Vec<Panel>,
}

#[derive(Debug, Clone)]
struct Panel {
    mid: f64,
    half: f64,
    coeffs: [C64; JMAX + 1],
    trunc: f64,
}

impl PanelSet {
    pub fn build<F: FnMut(f64) -> C64>(f: &mut F, breakpoints: &[f64]) -> Self {
        let t = tables();
        let mut panels = Vec::with_capacity(breakpoints.len().saturating_sub(1));
        for seg in breakpoints.windows(2) {
            let mid = 0.5 * (seg[0] + seg[1]);
            let half = 0.5 * (seg[1] - seg[0]);
            let mut fy = [C64::new(0.0, 0.0); NODES];
            for (i, &x) in t.rule.nodes.iter().enumerate() {
                fy[i] = f(mid + half * x);
            }
            let mut coeffs = [C64::new(0.0, 0.0); JMAX + 1];
            for (j, row) in t.legendre.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..NODES {
                    acc += t.rule.weights[i] * row[i] * fy[i];
                }
                coeffs[j] = acc * (0.5 * (2.0 * j as f64 + 1.0));
            }
            let trunc = (coeffs[JMAX - 1].norm() + coeffs[JMAX].norm()) * 2.0 * half;
            panels.push(Panel {
                mid,
                half,
                coeffs,
                trunc,
            });
        }
        PanelSet { panels }
    }

    /// int f(x) exp(i omega x) dx over the cached mesh.
    pub fn integrate(&self, omega: f64) -> (C64, f64) {
        let mut acc = C64::new(0.0, 0.0);
        let mut err = 0.0;
        for p in &self.panels {
            let theta = omega * p.half;
            let jns = sph_bessel_jn(JMAX, theta);
            let mut s = C64::new(0.0, 0.0);
            let mut ipow = C64::new(1.0, 0.0);
            for j in 0..=JMAX {
                s += p.coeffs[j] * (2.0 * jns[j]) * ipow;
                ipow *= C64::new(0.0, 1.0);
            }
            let phase = C64::new(0.0, omega * p.mid).exp();
            acc += s * p.half * phase;
            err += p.trunc;
        }
        (acc, err)
    }

    /// Sum of the per-panel truncation estimates.
    pub fn truncation(&self) -> f64 {
        self.panels.iter().map(|p| p.trunc).sum()
    }
}

/// Symmetric panel mesh on [-a, a]: the positive half is meshed and
/// mirrored, so quadrature errors of even amplitudes cancel in the odd part.
pub fn mesh_symmetric<S: Fn(f64) -> f64>(a: f64, width: S, mandatory: &[f64]) -> Vec<f64> {
    let half = mesh(0.0, a, width, mandatory);
    let mut pts: Vec<f64> = half.iter().skip(1).map(|&x| -x).rev().collect();
    pts.extend_from_slice(&half);
    pts
}

/// Build a panel mesh on [a, b]: mandatory breakpoints plus greedy marching
/// with a local width function.
pub fn mesh<S: Fn(f64) -> f64>(a: f64, b: f64, width: S, mandatory: &[f64]) -> Vec<f64> {
    assert!(b > a);
    let mut anchors: Vec<f64> = mandatory
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    anchors.push(a);
    anchors.push(b);
    anchors.sort_by(|p, q| p.partial_cmp(q).unwrap());
    anchors.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * (b - a));
    let mut pts = Vec::with_capacity(64);
    for pair in anchors.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        pts.push(p);
        let mut x = p;
        let floor = (q - p) / 4096.0;
        let mut guard = 0;
        while x < q {
            let mut w = width(x).max(floor);
            if x + 1.5 * w >= q {
                break;
            }
            w = w.min(q - x);
            x += w;
            pts.push(x);
            guard += 1;
            if guard > 8192 {
                break;
            }
        }
    }
    pts.push(b);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_low_orders() {
        for &x in &[0.3, 2.0, 9.5, 40.0] {
            let j = sph_bessel_jn(12, x);
            assert!((j[0] - x.sin() / x).abs() < 1e-14, "j0 at {x}");
            let j1 = x.sin() / (x * x) - x.cos() / x;
            assert!((j[1] - j1).abs() < 1e-13, "j1 at {x}");
        }
    }

    #[test]
    fn bessel_near_sine_zeros() {
        // Miller normalization must survive x = m pi where j0 vanishes
        use std::f64::consts::PI;
        for &x in &[PI, 2.0 * PI, 3.0 * PI, PI + 1e-9] {
            let j = sph_bessel_jn(12, x);
            let j1 = x.sin() / (x * x) - x.cos() / x;
            assert!((j[1] - j1).abs() < 1e-13, "j1 at {x}: {} vs {j1}", j[1]);
            // j_2 from the upward recurrence out of the closed j0, j1
            let j2 = 3.0 / x * j1 - x.sin() / x;
            assert!((j[2] - j2).abs() < 1e-12, "j2 at {x}");
        }
    }

    #[test]
    fn bessel_negative_parity() {
        let jp = sph_bessel_jn(5, 3.0);
        let jm = sph_bessel_jn(5, -3.0);
        for n in 0..=5 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((jm[n] - sign * jp[n]).abs() < 1e-15);
        }
    }

    #[test]
    fn panel_constant_amplitude() {
        for &omega in &[0.0, 0.7, 35.0, 4000.0] {
            let (v, _) = osc_panel(&mut |_x| C64::new(1.0, 0.0), -1.0, 1.0, omega);
            let exact = if omega == 0.0 {
                C64::new(2.0, 0.0)
            } else {
                C64::new(2.0 * omega.sin() / omega, 0.0)
            };
            assert!((v - exact).norm() < 1e-13, "omega={omega}: {v} vs {exact}");
        }
    }

    #[test]
    fn panel_at_bessel_zero_frequency() {
        // panel half-width times omega lands exactly on pi
        let omega = -20.0 * std::f64::consts::PI;
        let f = |u: f64| C64::new((-u * u).exp(), 0.0);
        let (v, _) = osc_panel(&mut f.clone(), 0.35, 0.45, omega);
        // Simpson reference
        let m = 40_000;
        let du = 0.1 / m as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..=m {
            let u = 0.35 + i as f64 * du;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * f(u) * C64::new(0.0, omega * u).exp();
        }
        acc *= du / 3.0;
        assert!((v - acc).norm() < 1e-12, "{v} vs {acc}");
    }

    #[test]
    fn panel_polynomial_amplitude() {
        // int_0^1 x^2 e^{i w x} dx, closed form by parts
        let w = 57.3;
        let iw = C64::new(0.0, w);
        let e = (iw).exp();
        let exact = e / iw - 2.0 * (e / (iw * iw) - (e - 1.0) / (iw * iw * iw));
        let (v, _) = osc_panel(&mut |x| C64::new(x * x, 0.0), 0.0, 1.0, w);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn panelset_matches_one_shot() {
        let pts = mesh(0.0, 10.0, |_| 0.4, &[3.3]);
        let mut f = |x: f64| C64::new((-0.3 * x).exp() * (x * 0.5).cos(), 0.1 * x);
        let set = PanelSet::build(&mut f.clone(), &pts);
        for &w in &[0.0, 2.7, 191.0] {
            let (a, _) = set.integrate(w);
            let (b, _) = osc_integral(&mut f, &pts, w);
            assert!((a - b).norm() < 1e-13, "w={w}");
        }
    }

    #[test]
    fn meshed_decaying_amplitude() {
        // int_0^20 e^{-x} e^{i w x} dx = (1 - e^{-20(1 - iw)}) / (1 - iw)
        let w = 313.7;
        let pts = mesh(0.0, 20.0, |_| 0.5, &[]);
        let (v, _) = osc_integral(&mut |x| C64::new((-x).exp(), 0.0), &pts, w);
        let a = C64::new(1.0, -w);
        let exact = (1.0 - (-20.0 * a).exp()) / a;
        assert!((v - exact).norm() < 1e-12, "{v} vs {exact}");
    }
}
