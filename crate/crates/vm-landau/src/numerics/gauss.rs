//! Gauss-Legendre rules, computed by Newton iteration on the Legendre
//! recurrence and cached by node count.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::sync::Arc;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Symmetric rule: solve for the non-negative half.
        for i in 0..n.div_ceil(2) {
            // Tricomi-style initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_pair(n, x);
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Cached rule shared across callers.
    pub fn cached(n: usize) -> Arc<GaussRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussRule::new(n)))
            .clone()
    }

    /// Integrate f over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// (P_n(x), P_n'(x)) by upward recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Evaluate P_0..P_jmax at x (used for Legendre projections).
pub fn legendre_all(jmax: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > jmax);
    out[0] = 1.0;
    if jmax == 0 {
        return;
    }
    out[1] = x;
    for j in 1..jmax {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0) * x * out[j] - jf * out[j - 1]) / (jf + 1.0);
    }
}

/// A composite Gauss rule over fixed segments, with nodes clustered toward
/// the interval ends. Used for the kernel tables, whose integrands are
/// smooth inside (-1, 1) but flatten rapidly at the endpoints.
#[derive(Debug, Clone)]
pub struct SegmentedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub breakpoints: Vec<f64>,
}

impl SegmentedRule {
    pub fn new(breakpoints: &[f64], per_segment: usize) -> Self {
        let base = GaussRule::cached(per_segment);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for seg in breakpoints.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + half * x);
                weights.push(w * half);
            }
        }
        SegmentedRule {
            nodes,
            weights,
            breakpoints: breakpoints.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
