//! Posteriors, Bayes error, the uncertainty region and the Bayes classifier
//! of a gridded labeled distribution.

use std::collections::HashMap;

use crate::density::{LabeledDensity, SampleSet};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridSpec};

/// Cells whose evidence is at most this fraction of the largest evidence
/// value are treated as outside the support.
pub const SUPPORT_REL_THRESHOLD: f64 = 1e-12;

/// Default tolerance separating "max posterior is 1" from "mixed".
pub const DEFAULT_TAU_UNC: f64 = 1e-3;

/// Per-cell posterior summary of a [`LabeledDensity`].
#[derive(Clone, Debug)]
pub struct Posterior {
    /// p(x).
    pub evidence: Grid2D,
    /// p(y = k | x), zero outside the support.
    pub posteriors: Vec<Grid2D>,
    /// Cells with p(x) above the support threshold.
    pub support: Vec<bool>,
    /// max_k p(x, y = k).
    pub max_joint: Vec<f64>,
    /// argmax_k p(x, y = k), ties to the lowest index.
    pub argmax: Vec<usize>,
}

impl Posterior {
    pub fn spec(&self) -> &GridSpec {
        self.evidence.spec()
    }

    /// Σ over the support of (p(x) − max_k p(x, k))·dx·dy.
    pub fn bayes_error(&self) -> f64 {
        let ev = self.evidence.values();
        let s: f64 = (0..ev.len())
            .filter(|&c| self.support[c])
            .map(|c| (ev[c] - self.max_joint[c]).max(0.0))
            .sum();
        s * self.spec().cell_area()
    }

    /// Support cells whose max posterior is below `1 − tau_unc`.
    pub fn uncertain_cells(&self, tau_unc: f64) -> Vec<bool> {
        let ev = self.evidence.values();
        (0..ev.len())
            .map(|c| self.support[c] && self.max_joint[c] < (1.0 - tau_unc) * ev[c])
            .collect()
    }

    /// Smallest evidence value over the support.
    pub fn min_support_evidence(&self) -> f64 {
        self.evidence
            .values()
            .iter()
            .zip(&self.support)
            .filter(|(_, &s)| s)
            .map(|(&v, _)| v)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn posterior(d: &LabeledDensity) -> Posterior {
    let spec = *d.spec();
    let evidence = d.evidence();
    let threshold = SUPPORT_REL_THRESHOLD * evidence.max_value();
    let n = spec.len();
    let joints: Vec<Grid2D> = (0..d.num_classes()).map(|k| d.joint(k)).collect();

    let mut support = Vec::with_capacity(n);
    let mut max_joint = Vec::with_capacity(n);
    let mut argmax = Vec::with_capacity(n);
    let mut posts = vec![vec![0.0; n]; d.num_classes()];
    for (c, &ev) in evidence.values().iter().enumerate() {
        let (mut best, mut best_k) = (f64::NEG_INFINITY, 0);
        for (k, j) in joints.iter().enumerate() {
            let v = j.values()[c];
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let inside = ev > threshold && ev > 0.0;
        support.push(inside);
        max_joint.push(best);
        argmax.push(best_k);
        if inside {
            for (k, j) in joints.iter().enumerate() {
                posts[k][c] = j.values()[c] / ev;
            }
        }
    }
    Posterior {
        evidence,
        posteriors: posts
            .into_iter()
            .map(|v| Grid2D::from_values_unchecked(spec, v))
            .collect(),
        support,
        max_joint,
        argmax,
    }
}

/// β_D = E[1 − max_k p(y = k | x)].
pub fn bayes_error(d: &LabeledDensity) -> f64 {
    posterior(d).bayes_error()
}

/// Cells whose label is uncertain, with the region's area and mass.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyRegion {
    /// 0/1 mask.
    pub mask: Grid2D,
    pub volume: f64,
    pub mass: f64,
    pub tau_unc: f64,
}

impl UncertaintyRegion {
    pub fn is_empty(&self) -> bool {
        self.mask.values().iter().all(|&m| m == 0.0)
    }

    pub(crate) fn from_cells(post: &Posterior, cells: &[bool], tau_unc: f64) -> Self {
        let spec = *post.spec();
        let area = spec.cell_area();
        let ev = post.evidence.values();
        let (mut count, mut mass) = (0usize, 0.0);
        for (c, &m) in cells.iter().enumerate() {
            if m {
                count += 1;
                mass += ev[c];
            }
        }
        UncertaintyRegion {
            mask: Grid2D::from_values_unchecked(
                spec,
                cells.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
            ),
            volume: count as f64 * area,
            mass: mass * area,
            tau_unc,
        }
    }
}

pub(crate) fn check_tau(tau_unc: f64) -> Result<()> {
    if !(0.0..0.5).contains(&tau_unc) {
        return Err(Error::param(
            "tau_unc",
            format!("must lie in [0, 0.5), got {tau_unc}"),
        ));
    }
    Ok(())
}

pub fn uncertainty_region(d: &LabeledDensity, tau_unc: f64) -> Result<UncertaintyRegion> {
    check_tau(tau_unc)?;
    let post = posterior(d);
    let cells = post.uncertain_cells(tau_unc);
    Ok(UncertaintyRegion::from_cells(&post, &cells, tau_unc))
}

/// Per-cell Bayes-classifier labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelGrid {
    spec: GridSpec,
    labels: Vec<usize>,
}

impl LabelGrid {
    /// Label of cells outside the support.
    pub const OUT_OF_SUPPORT: usize = usize::MAX;

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.labels[self.spec.index(i, j)]
    }

    /// Prediction at `(x, y)`; `None` outside the grid or the support.
    pub fn predict(&self, x: f64, y: f64) -> Option<usize> {
        let (i, j) = self.spec.locate(x, y)?;
        let l = self.get(i, j);
        (l != Self::OUT_OF_SUPPORT).then_some(l)
    }
}

pub fn bayes_classifier(d: &LabeledDensity) -> LabelGrid {
    let post = posterior(d);
    LabelGrid {
        spec: *d.spec(),
        labels: post
            .argmax
            .iter()
            .zip(&post.support)
            .map(|(&k, &s)| if s { k } else { LabelGrid::OUT_OF_SUPPORT })
            .collect(),
    }
}

fn point_key(p: &[f64; 2]) -> (u64, u64) {
    // `+ 0.0` folds −0.0 onto 0.0
    ((p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits())
}

/// True when some input appears with two or more distinct labels.
pub fn duplicated_input_check(s: &SampleSet) -> bool {
    let mut first: HashMap<(u64, u64), usize> = HashMap::new();
    for (p, &l) in s.points.iter().zip(&s.labels) {
        match first.get(&point_key(p)) {
            Some(&other) if other != l => return true,
            Some(_) => {}
            None => {
                first.insert(point_key(p), l);
            }
        }
    }
    false
}

/// Bayes error of the empirical distribution that puts mass 1/n on each
/// sample: the fraction of samples not carrying their input's majority label.
pub fn empirical_bayes_error(s: &SampleSet) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<(u64, u64), HashMap<usize, usize>> = HashMap::new();
    for (p, &l) in s.points.iter().zip(&s.labels) {
        *counts
            .entry(point_key(p))
            .or_default()
            .entry(l)
            .or_default() += 1;
    }
    let errors: usize = counts
        .values()
        .map(|by_label| {
            let total: usize = by_label.values().sum();
            total - by_label.values().max().copied().unwrap_or(0)
        })
        .sum();
    errors as f64 / s.len() as f64
}
