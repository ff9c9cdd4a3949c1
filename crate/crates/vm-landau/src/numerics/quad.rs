//! Adaptive Gauss-Kronrod quadrature (7-15 pair) and the tail substitution
//! s = a/(1-xi) for integrals over [a, infinity).

use crate::{Error, Result};

// QUADPACK 7-15 pair, positive abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_2,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        kronrod += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Adaptive<'a, F: FnMut(f64) -> f64> {
    f: &'a mut F,
    rel_tol: f64,
    abs_tol: f64,
    evals: usize,
    max_evals: usize,
}

impl<F: FnMut(f64) -> f64> Adaptive<'_, F> {
    fn run(&mut self, a: f64, b: f64, scale_hint: f64, depth: u32) -> Result<(f64, f64)> {
        let (v, e) = gk15(a, b, self.f);
        self.evals += 15;
        let tol = self.abs_tol + self.rel_tol * scale_hint.max(v.abs());
        if e <= tol || depth >= 48 {
            if depth >= 48 && e > 100.0 * tol && e > 1e-3 * self.rel_tol * scale_hint.max(1e-250) {
                return Err(Error::Convergence(format!(
                    "adaptive quadrature stalled on [{a}, {b}], error estimate {e:.3e}"
                )));
            }
            return Ok((v, e));
        }
        if self.evals > self.max_evals {
            return Err(Error::Convergence(format!(
                "adaptive quadrature exceeded {} evaluations, error estimate {e:.3e}",
                self.max_evals
            )));
        }
        let mid = 0.5 * (a + b);
        let (v1, e1) = self.run(a, mid, scale_hint, depth + 1)?;
        let (v2, e2) = self.run(mid, b, scale_hint, depth + 1)?;
        Ok((v1 + v2, e1 + e2))
    }
}

/// Adaptive integral of f over [a, b] to the given relative tolerance.
/// Returns (value, error estimate).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    // coarse pass to anchor the relative tolerance of subdivided panels
    let (v0, _) = gk15(a, b, &mut f);
    let mut ad = Adaptive {
        f: &mut f,
        rel_tol,
        abs_tol: 1e-300,
        evals: 15,
        max_evals: 2_000_000,
    };
    ad.run(a, b, v0.abs(), 0)
}

/// Adaptive integral of f over [a, infinity) via s = a/(1-xi), xi in [0, 1).
/// Requires a > 0 and f decaying fast enough for the mapped integrand to
/// vanish at xi = 1 (Gaussian or power-law tails with finite mass).
pub fn integrate_tail<F: FnMut(f64) -> f64>(mut f: F, a: f64, rel_tol: f64) -> Result<(f64, f64)> {
    assert!(a > 0.0, "tail integral lower limit must be positive");
    let mut g = |xi: f64| {
        let om = 1.0 - xi;
        if om <= 0.0 {
            return 0.0;
        }
        let s = a / om;
        if !s.is_finite() {
            return 0.0;
        }
        let v = f(s) * a / (om * om);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&mut g, 0.0, 1.0, rel_tol)
}
