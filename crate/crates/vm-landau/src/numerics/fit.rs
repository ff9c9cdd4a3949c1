//! Small least-squares helpers for the decay fits and slope checks.

/// Ordinary least squares y = slope*x + intercept. Returns (slope, intercept, r^2).
pub fn linfit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert!(x.len() == y.len() && x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Log-log slope of |y| against x (both mapped through ln).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().max(1e-300).ln()).collect();
    linfit(&lx, &ly)
}

/// Centered second differences on a uniform grid.
pub fn second_differences(y: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len().saturating_sub(2));
    for i in 1..y.len().saturating_sub(1) {
        out.push((y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, b, r2) = linfit(&x, &y);
        assert!((s - 2.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loglog_powerlaw() {
        let x: Vec<f64> = (1..40).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-2.5)).collect();
        let (s, _, r2) = loglog_slope(&x, &y);
        assert!((s + 2.5).abs() < 1e-10 && r2 > 0.999999);
    }
}
