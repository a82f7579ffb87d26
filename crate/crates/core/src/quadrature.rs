//! Gauss–Legendre rules and compensated summation.

use alloc::vec::Vec;

use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};

/// Smallest node count accepted for parameter averages.
pub const MIN_NODES: usize = 8;
/// Node count used when nothing else is requested.
pub const DEFAULT_NODES: usize = 32;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule; nodes come from Newton iteration on `P_n` started at the
    /// Chebyshev-like guesses `cos(π(i − ¼)/(n + ½))`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 1..=n {
            let mut x = Float::cos(PI * (i as f64 - 0.25) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            // map [-1, 1] → [0, 1]
            nodes.push(0.5 * (1.0 - x));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫₀¹ f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::default();
        for (x, w) in self.iter() {
            acc.add(w * f(x));
        }
        acc.total()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Neumaier-compensated running sum; summation order is the caller's insertion order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_point_rule() {
        let r = GaussLegendre::new(2).unwrap();
        let s = 0.5 / 3f64.sqrt();
        let mut nodes = r.nodes().to_vec();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(nodes[0], 0.5 - s, epsilon = 1e-15);
        assert_abs_diff_eq!(nodes[1], 0.5 + s, epsilon = 1e-15);
        for w in r.weights() {
            assert_abs_diff_eq!(*w, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [1usize, 3, 8, 32, 64] {
            let r = GaussLegendre::new(n).unwrap();
            assert_abs_diff_eq!(r.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-13);
            for k in 0..(2 * n).min(40) {
                let got = r.integrate(|x| x.powi(k as i32));
                assert_abs_diff_eq!(got, 1.0 / (k as f64 + 1.0), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn nodes_inside_unit_interval() {
        let r = GaussLegendre::new(64).unwrap();
        assert!(r.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn smooth_integrand() {
        let r = GaussLegendre::new(16).unwrap();
        assert_abs_diff_eq!(r.integrate(|x| (PI * x).sin()), 2.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert_abs_diff_eq!(s.total(), 1e-16, epsilon = 1e-30);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(GaussLegendre::new(0).is_err());
    }
}
