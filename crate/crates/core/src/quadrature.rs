//! Composite Gauss-Legendre quadrature with panel doubling.

use nalgebra::Vector3;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

// 8-point Gauss-Legendre rule on [-1, 1], positive half.
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes per panel of the underlying rule.
pub const NODES_PER_PANEL: usize = 8;

/// Values that can be integrated: scalars and 3-vectors.
pub trait Quantity: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Quantity for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quantity for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// One 8-point panel over `[a, b]`.
pub fn gauss_legendre_panel<T: Quantity>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> T {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::zero();
    for (&x, &w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc = acc + (f(mid - half * x) + f(mid + half * x)) * w;
    }
    acc * half
}

/// `panels` equal-width 8-point panels over `[a, b]`, summed in index order.
pub fn composite<T: Quantity>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        acc = acc + gauss_legendre_panel(f, lo, hi);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub initial_panels: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_nodes: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            initial_panels: 2,
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_nodes: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Magnitude of the change over the last doubling.
    pub error: f64,
    pub nodes: usize,
}

/// Doubles the panel count until two successive estimates agree to
/// `max(rel_tol * |value|, abs_tol)`.
pub fn adaptive<T: Quantity>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<Estimate<T>> {
    let mut panels = opts.initial_panels.max(1);
    let mut prev = composite(&mut f, a, b, panels);
    loop {
        panels *= 2;
        let nodes = panels * NODES_PER_PANEL;
        if nodes > opts.max_nodes {
            return Err(Error::Convergence(format!(
                "no convergence on [{a:e}, {b:e}] within {} nodes (rel_tol {:e})",
                opts.max_nodes, opts.rel_tol
            )));
        }
        let next = composite(&mut f, a, b, panels);
        let error = (next - prev).magnitude();
        if error <= (opts.rel_tol * next.magnitude()).max(opts.abs_tol) {
            return Ok(Estimate { value: next, error, nodes });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn single_panel_is_exact_for_degree_15() {
        let mut f = |x: f64| x.powi(15) + 3.0 * x.powi(14) - x;
        let got = gauss_legendre_panel(&mut f, -1.0, 2.0);
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (2f64.powi(15) + 1.0) / 15.0 - (4.0 - 1.0) / 2.0;
        assert_relative_eq!(got, exact, max_relative = 1e-13);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let mut one = |_x: f64| 1.0;
        assert_relative_eq!(gauss_legendre_panel(&mut one, 0.0, 5.0), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn adaptive_resolves_periodic_integrand() {
        let est = adaptive(|x: f64| (x.sin()).exp(), 0.0, 2.0 * PI, &AdaptiveOptions::default()).unwrap();
        // 2 pi I0(1)
        assert_relative_eq!(est.value, 2.0 * PI * 1.266_065_877_752_008_4, max_relative = 1e-12);
        assert!(est.error <= 1e-9 * est.value);
    }

    #[test]
    fn adaptive_vector_integrand() {
        let est = adaptive(
            |t: f64| Vector3::new(t.cos(), t.sin(), 1.0),
            0.0,
            PI / 2.0,
            &AdaptiveOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(est.value, Vector3::new(1.0, 1.0, PI / 2.0), max_relative = 1e-12);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let opts = AdaptiveOptions { max_nodes: 64, rel_tol: 1e-14, ..Default::default() };
        let r = adaptive(|x: f64| (1.0 / (x + 1e-6)).sin(), 0.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }
}
