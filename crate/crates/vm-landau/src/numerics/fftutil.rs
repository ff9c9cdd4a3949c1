//! Spectral peak location for oscillation-frequency checks.

use crate::C64;
use rustfft::FftPlanner;

/// Dominant positive angular frequency of a sampled trace, and the bin width.
///
/// The mean is removed so the zero mode does not mask low-frequency peaks.
/// Returns (omega_peak, omega_bin).
pub fn dominant_frequency(trace: &[C64], dt: f64) -> (f64, f64) {
    let n = trace.len();
    assert!(n >= 8);
    let mean = trace.iter().sum::<C64>() / n as f64;
    let mut buf: Vec<C64> = trace.iter().map(|v| v - mean).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    fft.process(&mut buf);
    // combine +m and -m bins: the traces are real up to round-off
    let mut best = (0usize, 0.0f64);
    for m in 1..n / 2 {
        let mag = buf[m].norm() + buf[n - m].norm();
        if mag > best.1 {
            best = (m, mag);
        }
    }
    let omega_bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    (best.0 as f64 * omega_bin, omega_bin)
}
