//! Composite Simpson quadrature refined by panel doubling, with a Richardson
//! correction on the final pair of estimates.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// |S(2n) − S(n)| / 15, the Richardson error estimate of the last step.
    pub error: f64,
    pub panels: usize,
}

/// Settings for [`simpson_refined`].
#[derive(Clone, Copy, Debug)]
pub struct SimpsonSettings {
    /// Panel count of the first estimate; rounded up to an even number.
    pub initial_panels: usize,
    pub rel_tol: f64,
    /// Changes below this are accepted regardless of `rel_tol`, for
    /// integrals that are negligible on the caller's scale.
    pub abs_tol: f64,
    /// Number of doublings allowed after the first estimate.
    pub max_doublings: u32,
}

impl Default for SimpsonSettings {
    fn default() -> Self {
        Self {
            initial_panels: 64,
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_doublings: 10,
        }
    }
}

impl SimpsonSettings {
    pub fn finest_panels(&self) -> usize {
        self.initial_even() << self.max_doublings
    }

    fn initial_even(&self) -> usize {
        let n = self.initial_panels.max(2);
        n + (n & 1)
    }
}

/// Integrates over `[a, b]`, where `f(k)` evaluates the integrand at node
/// `a + k·(b − a)/settings.finest_panels()`. Lets callers tabulate anything
/// that depends only on the node (trig tables, for instance).
pub fn simpson_refined_indexed(
    mut f: impl FnMut(usize) -> f64,
    a: f64,
    b: f64,
    settings: &SimpsonSettings,
) -> Result<QuadratureEstimate> {
    let mut panels = settings.initial_even();
    let finest = settings.finest_panels();
    let mut stride = finest / panels;

    let ends = f(0) + f(finest);
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in 1..panels {
        let v = f(k * stride);
        if k % 2 == 0 {
            even += v
        } else {
            odd += v
        }
    }
    let simpson = |panels: usize, odd: f64, even: f64| {
        (b - a) / panels as f64 / 3.0 * (ends + 4.0 * odd + 2.0 * even)
    };
    let mut previous = simpson(panels, odd, even);
    let mut older = f64::NAN;

    for _ in 0..settings.max_doublings {
        even += odd;
        stride /= 2;
        panels *= 2;
        odd = (0..panels / 2).map(|m| f((2 * m + 1) * stride)).sum();
        let current = simpson(panels, odd, even);
        let diff = (current - previous).abs();
        if diff <= (settings.rel_tol * current.abs()).max(settings.abs_tol) {
            return Ok(QuadratureEstimate {
                value: current + (current - previous) / 15.0,
                error: diff / 15.0,
                panels,
            });
        }
        older = previous;
        previous = current;
    }
    Err(Error::Quadrature {
        previous: older,
        last: previous,
    })
}

/// Integrates `f` over `[a, b]`.
pub fn simpson_refined(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    settings: &SimpsonSettings,
) -> Result<QuadratureEstimate> {
    let h = (b - a) / settings.finest_panels() as f64;
    simpson_refined_indexed(|k| f(a + k as f64 * h), a, b, settings)
}
