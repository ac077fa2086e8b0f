//! Sample-based robust-correctness checks: neighbor correctness under the
//! Chebyshev distance, and the probability that every draw from a vicinity
//! is correctly classified.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bayes::{posterior, LabelGrid};
use crate::density::{LabeledDensity, SampleSet};
use crate::error::{Error, Result};
use crate::vicinity::{Norm, VicinityKernel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborReport {
    /// Fraction of test points with a nonempty, fully correct neighborhood.
    pub alpha_strict: f64,
    /// Same, but an empty neighborhood passes (the `C == N` reading).
    pub alpha_vacuous: f64,
    /// Fraction of test points with at least one neighbor.
    pub coverage: f64,
    pub n_test: usize,
    pub n_reference: usize,
}

/// Uniform bucket grid over 2-D points.
struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl SpatialHash {
    fn new(points: &[[f64; 2]], theta: f64) -> Self {
        let cell = if theta > 0.0 { theta } else { 1.0 };
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (idx, p) in points.iter().enumerate() {
            buckets
                .entry(Self::key(cell, p))
                .or_default()
                .push(idx as u32);
        }
        Self { cell, buckets }
    }

    fn key(cell: f64, p: &[f64; 2]) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// Calls `f` for every stored index within Chebyshev distance `theta`;
    /// stops early when `f` returns false.
    fn for_each_within(
        &self,
        points: &[[f64; 2]],
        q: &[f64; 2],
        theta: f64,
        mut f: impl FnMut(usize) -> bool,
    ) {
        let (bx, by) = Self::key(self.cell, q);
        for gy in by - 1..=by + 1 {
            for gx in bx - 1..=bx + 1 {
                let Some(bucket) = self.buckets.get(&(gx, gy)) else {
                    continue;
                };
                for &idx in bucket {
                    let p = &points[idx as usize];
                    if (p[0] - q[0]).abs().max((p[1] - q[1]).abs()) <= theta && !f(idx as usize) {
                        return;
                    }
                }
            }
        }
    }
}

fn check_inputs(reference: &SampleSet, predictions: &[usize], theta: f64) -> Result<()> {
    if predictions.len() != reference.len() {
        return Err(Error::param(
            "predictions",
            format!(
                "length {} does not match reference size {}",
                predictions.len(),
                reference.len()
            ),
        ));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::param("theta", format!("must be >= 0, got {theta}")));
    }
    Ok(())
}

/// Algorithm 1: each test point is checked against the reference points
/// within Chebyshev distance `theta`; it passes when all of them are
/// predicted with their own label.
pub fn neighbor_correctness(
    test: &SampleSet,
    reference: &SampleSet,
    predictions: &[usize],
    theta: f64,
) -> Result<NeighborReport> {
    check_inputs(reference, predictions, theta)?;
    let hash = SpatialHash::new(&reference.points, theta);
    let wrong: Vec<bool> = predictions
        .iter()
        .zip(&reference.labels)
        .map(|(p, l)| p != l)
        .collect();

    // (nonempty, all correct)
    let outcomes: Vec<(bool, bool)> = test
        .points
        .par_iter()
        .map(|q| {
            let mut seen = false;
            let mut ok = true;
            hash.for_each_within(&reference.points, q, theta, |j| {
                seen = true;
                ok = !wrong[j];
                ok
            });
            (seen, ok)
        })
        .collect();

    let n = test.len().max(1) as f64;
    let count =
        |f: &dyn Fn(&(bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / n;
    Ok(NeighborReport {
        alpha_strict: count(&|&(seen, ok)| seen && ok),
        alpha_vacuous: count(&|&(_, ok)| ok),
        coverage: count(&|&(seen, _)| seen),
        n_test: test.len(),
        n_reference: reference.len(),
    })
}

/// Algorithm 2: the sample is its own reference, so every point is its own
/// neighbor and both conventions coincide.
pub fn neighbor_correctness_self(s: &SampleSet, predictions: &[usize], theta: f64) -> Result<f64> {
    Ok(neighbor_correctness(s, s, predictions, theta)?.alpha_strict)
}

/// Labels from the grid Bayes classifier. Points off the grid are snapped
/// to the nearest cell; cells outside the support predict class 0.
pub fn bayes_predictions(classifier: &LabelGrid, s: &SampleSet) -> Vec<usize> {
    let spec = classifier.spec();
    s.points
        .iter()
        .map(|p| {
            let x = p[0].clamp(spec.x0, spec.x_max() - 0.5 * spec.dx);
            let y = p[1].clamp(spec.y0, spec.y_max() - 0.5 * spec.dy);
            match classifier.predict(x, y) {
                Some(LabelGrid::OUT_OF_SUPPORT) | None => 0,
                Some(k) => k,
            }
        })
        .collect()
}

pub fn predictions_to_csv(predictions: &[usize], provenance: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        out.push_str(p);
        out.push('\n');
    }
    out.push_str("index,predicted_label\n");
    for (i, p) in predictions.iter().enumerate() {
        let _ = writeln!(out, "{i},{p}");
    }
    out
}

pub fn write_predictions(
    path: &Path,
    predictions: &[usize],
    provenance: Option<&str>,
) -> Result<()> {
    fs::write(path, predictions_to_csv(predictions, provenance)).map_err(|e| Error::io(path, e))
}

/// Reads `index,predicted_label` rows; indices must run 0, 1, 2, ...
pub fn read_predictions(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("index") {
            continue;
        }
        let (idx, label) = line
            .split_once(',')
            .ok_or_else(|| parse_err(n + 1, "expected `index,predicted_label`".into()))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|e| parse_err(n + 1, format!("index: {e}")))?;
        if idx != out.len() {
            return Err(parse_err(
                n + 1,
                format!("expected index {}, got {idx}", out.len()),
            ));
        }
        out.push(
            label
                .trim()
                .parse()
                .map_err(|e| parse_err(n + 1, format!("predicted_label: {e}")))?,
        );
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductEstimate {
    pub estimate: f64,
    /// Standard error of the Monte-Carlo mean.
    pub std_error: f64,
    pub trials: usize,
}

/// Monte-Carlo estimate of E_x[Π_{i≤n} max_k p(k | x_i)], with x drawn from
/// the evidence and each x_i uniform in the vicinity of x. Trial `t` uses
/// its own stream of the seeded generator and draws x before x_1, x_2, ...,
/// so the estimates for different `n` share a prefix and are monotone in n.
/// Draws that land outside the grid or the support contribute a factor 1.
pub fn all_correct_probability(
    d: &LabeledDensity,
    k: &VicinityKernel,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<ProductEstimate> {
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    if n_samples == 0 {
        return Ok(ProductEstimate {
            estimate: 1.0,
            std_error: 0.0,
            trials,
        });
    }
    let post = posterior(d);
    let spec = *d.spec();
    let area = spec.cell_area();
    let mut cdf = Vec::with_capacity(spec.len());
    let mut acc = 0.0;
    for &v in post.evidence.values() {
        acc += v * area;
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::DegenerateDensity("evidence has zero mass".into()));
    }
    let max_post: Vec<f64> = (0..spec.len())
        .map(|c| {
            if post.support[c] {
                post.max_joint[c] / post.evidence.values()[c]
            } else {
                1.0
            }
        })
        .collect();
    let eps = k.epsilon;

    let products: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let u: f64 = rng.random::<f64>() * acc;
            let cell = cdf.partition_point(|&c| c < u).min(spec.len() - 1);
            let (ci, cj) = (cell % spec.nx, cell / spec.nx);
            let x = spec.x0 + (ci as f64 + rng.random::<f64>()) * spec.dx;
            let y = spec.y0 + (cj as f64 + rng.random::<f64>()) * spec.dy;
            let mut prod = 1.0;
            for _ in 0..n_samples {
                let (ox, oy) = sample_ball(&mut rng, k.norm, eps);
                if let Some((i, j)) = spec.locate(x + ox, y + oy) {
                    prod *= max_post[spec.index(i, j)];
                }
            }
            prod
        })
        .collect();

    let n = trials as f64;
    let mean = products.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        products.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(ProductEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}

fn sample_ball(rng: &mut ChaCha8Rng, norm: Norm, eps: f64) -> (f64, f64) {
    if eps == 0.0 {
        return (0.0, 0.0);
    }
    loop {
        let ox = rng.random_range(-eps..=eps);
        let oy = rng.random_range(-eps..=eps);
        if norm == Norm::LInf || ox * ox + oy * oy <= eps * eps {
            return (ox, oy);
        }
    }
}
