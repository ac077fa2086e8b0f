//! Labeled 2-D distributions: analytic two-moons densities, Gaussian and
//! uniform test fixtures, and Gaussian KDE fits of labeled samples.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::bayes;
use crate::error::{Error, Result};
use crate::grid::{ensure_compatible, integrate, normalize, Grid2D, GridSpec};
use crate::quadrature::{simpson_refined_indexed, SimpsonSettings};

/// Largest fraction of a class's mass allowed to fall outside the grid
/// before normalization.
pub const LEAK_THRESHOLD: f64 = 1e-3;

const PRIOR_SUM_TOL: f64 = 1e-9;
const CONDITIONAL_MASS_TOL: f64 = 1e-4;

/// Class priors plus one conditional density grid per class.
///
/// A class may carry prior 0 with an all-zero conditional; hardening
/// produces such classes when one label never wins the argmax.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDensity {
    priors: Vec<f64>,
    conditionals: Vec<Grid2D>,
}

impl LabeledDensity {
    pub fn new(priors: Vec<f64>, conditionals: Vec<Grid2D>) -> Result<Self> {
        if priors.len() < 2 {
            return Err(Error::param(
                "priors",
                format!("need at least 2 classes, got {}", priors.len()),
            ));
        }
        if priors.len() != conditionals.len() {
            return Err(Error::param(
                "conditionals",
                format!(
                    "{} priors but {} conditionals",
                    priors.len(),
                    conditionals.len()
                ),
            ));
        }
        if let Some(p) = priors.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::param(
                "priors",
                format!("prior {p} is not a probability"),
            ));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::param("priors", format!("sum to {total}, not 1")));
        }
        let spec = *conditionals[0].spec();
        for (k, c) in conditionals.iter().enumerate() {
            ensure_compatible(&spec, c.spec())?;
            if c.values().iter().any(|&v| v < 0.0) {
                return Err(Error::param(
                    "conditionals",
                    format!("class {k} has negative density"),
                ));
            }
            let mass = integrate(c);
            let ok =
                (mass - 1.0).abs() <= CONDITIONAL_MASS_TOL || (priors[k] == 0.0 && mass == 0.0);
            if !ok {
                return Err(Error::param(
                    "conditionals",
                    format!("class {k} has mass {mass}, expected 1"),
                ));
            }
        }
        Ok(Self {
            priors,
            conditionals,
        })
    }

    /// Builds a density from unnormalized per-class grids whose exact
    /// continuous mass is 1. Each grid's shortfall is its leak past the grid
    /// edge; a leak above [`LEAK_THRESHOLD`] is an error, smaller leaks are
    /// normalized away and returned.
    pub fn from_leaky(priors: Vec<f64>, grids: Vec<Grid2D>) -> Result<(Self, Vec<f64>)> {
        let mut leaks = Vec::with_capacity(grids.len());
        let mut conditionals = Vec::with_capacity(grids.len());
        for (class, g) in grids.iter().enumerate() {
            let leak = 1.0 - integrate(g);
            if leak > LEAK_THRESHOLD {
                return Err(Error::Leak {
                    class,
                    leak,
                    threshold: LEAK_THRESHOLD,
                });
            }
            leaks.push(leak);
            conditionals.push(normalize(g)?);
        }
        Ok((Self::new(priors, conditionals)?, leaks))
    }

    pub fn num_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn conditionals(&self) -> &[Grid2D] {
        &self.conditionals
    }

    pub fn conditional(&self, class: usize) -> &Grid2D {
        &self.conditionals[class]
    }

    pub fn spec(&self) -> &GridSpec {
        self.conditionals[0].spec()
    }

    /// p(x, y = k) = P(y = k)·p(x | y = k).
    pub fn joint(&self, class: usize) -> Grid2D {
        self.conditionals[class].scale(self.priors[class])
    }

    /// p(x) = Σ_k P(y = k)·p(x | y = k).
    pub fn evidence(&self) -> Grid2D {
        let spec = *self.spec();
        let mut out = vec![0.0; spec.len()];
        for (p, c) in self.priors.iter().zip(&self.conditionals) {
            for (o, &v) in out.iter_mut().zip(c.values()) {
                *o += p * v;
            }
        }
        Grid2D::from_values_unchecked(spec, out)
    }

    /// Reorders classes so that new class `k` is old class `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.num_classes()];
        for &k in order {
            if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::param("order", "not a permutation of the classes"));
            }
        }
        if order.len() != seen.len() {
            return Err(Error::param("order", "not a permutation of the classes"));
        }
        Ok(Self {
            priors: order.iter().map(|&k| self.priors[k]).collect(),
            conditionals: order
                .iter()
                .map(|&k| self.conditionals[k].clone())
                .collect(),
        })
    }

    /// Writes `priors.csv` and one `class_<k>.csv` grid per class into `dir`.
    pub fn write_dir(&self, dir: &Path, provenance: Option<&str>) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut priors = String::new();
        if let Some(p) = provenance {
            priors.push_str(p);
            priors.push('\n');
        }
        priors.push_str("class,prior\n");
        for (k, p) in self.priors.iter().enumerate() {
            let _ = writeln!(priors, "{k},{p:e}");
        }
        let path = dir.join("priors.csv");
        fs::write(&path, priors).map_err(|e| Error::io(&path, e))?;
        for (k, c) in self.conditionals.iter().enumerate() {
            c.write_csv(&dir.join(format!("class_{k}.csv")), provenance)?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("priors.csv");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut priors = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("class") {
                continue;
            }
            let prior = line
                .split(',')
                .nth(1)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.clone(),
                    line: lineno + 1,
                    reason: format!("expected `class,prior`, got `{line}`"),
                })?;
            priors.push(prior);
        }
        let conditionals = (0..priors.len())
            .map(|k| Grid2D::read_csv(&dir.join(format!("class_{k}.csv"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(priors, conditionals)
    }
}

/// Labeled points in the plane; labels are 0-based class indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
}

impl SampleSet {
    pub fn new(points: Vec<[f64; 2]>, labels: Vec<usize>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::param(
                "labels",
                format!("{} points but {} labels", points.len(), labels.len()),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("points", "non-finite coordinate"));
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn class_points(&self, class: usize) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.points
            .iter()
            .zip(&self.labels)
            .filter(move |(_, &l)| l == class)
            .map(|(p, _)| *p)
    }

    /// Reads a `x1,x2,label` CSV file.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                if line.replace(' ', "") == "x1,x2,label" {
                    continue;
                }
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    reason: format!("expected header `x1,x2,label`, got `{line}`"),
                });
            }
            let bad = |reason: String| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                reason,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            }
            let x1 = fields[0]
                .parse::<f64>()
                .map_err(|e| bad(format!("x1: {e}")))?;
            let x2 = fields[1]
                .parse::<f64>()
                .map_err(|e| bad(format!("x2: {e}")))?;
            let label = fields[2]
                .parse::<usize>()
                .map_err(|e| bad(format!("label: {e}")))?;
            points.push([x1, x2]);
            labels.push(label);
        }
        Self::new(points, labels)
    }

    pub fn to_csv(&self, provenance: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(p) = provenance {
            out.push_str(p);
            out.push('\n');
        }
        out.push_str("x1,x2,label\n");
        for (p, l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(out, "{},{},{}", p[0], p[1], l);
        }
        out
    }

    pub fn write_csv(&self, path: &Path, provenance: Option<&str>) -> Result<()> {
        fs::write(path, self.to_csv(provenance)).map_err(|e| Error::io(path, e))
    }
}

/// Parameters of the analytic two-moons density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoonsParams {
    /// Standard deviation of the isotropic Gaussian smearing each arc.
    pub sigma: f64,
    /// Initial panel count of the arc quadrature (≥ 16).
    pub quadrature_points: usize,
}

impl MoonsParams {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            quadrature_points: 64,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(
                "sigma",
                format!("must be positive, got {}", self.sigma),
            ));
        }
        if self.quadrature_points < 16 {
            return Err(Error::param(
                "quadrature_points",
                format!("must be >= 16, got {}", self.quadrature_points),
            ));
        }
        Ok(())
    }
}

/// Domain used for the moons unless the caller supplies a grid.
pub const MOONS_EXTENTS: [f64; 4] = [-2.0, 3.0, -1.75, 2.25];

pub fn moons_default_spec(resolution: usize) -> GridSpec {
    let [x0, x1, y0, y1] = MOONS_EXTENTS;
    GridSpec::covering(x0, x1, y0, y1, resolution, resolution).expect("static extents are valid")
}

/// Point on moon `class` at arc parameter `t ∈ [0, π]`.
#[inline]
fn arc_point(class: usize, cos_t: f64, sin_t: f64) -> (f64, f64) {
    if class == 0 {
        (cos_t, sin_t)
    } else {
        (1.0 - cos_t, 0.5 - sin_t)
    }
}

/// Evaluator for the two-moons likelihoods: a uniform density on each half
/// circle convolved with an isotropic Gaussian, integrated along the arc.
#[derive(Clone, Debug)]
pub struct MoonsDensity {
    params: MoonsParams,
    settings: SimpsonSettings,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl MoonsDensity {
    pub fn new(params: MoonsParams) -> Result<Self> {
        params.validate()?;
        let settings = SimpsonSettings {
            initial_panels: params.quadrature_points,
            rel_tol: 1e-8,
            // the integrand peaks at 1; far-field tails below this are noise
            abs_tol: 1e-14,
            max_doublings: 8,
        };
        let finest = settings.finest_panels();
        let (sin, cos) = (0..=finest)
            .map(|k| (PI * k as f64 / finest as f64).sin_cos())
            .unzip();
        Ok(Self {
            params,
            settings,
            cos,
            sin,
        })
    }

    pub fn params(&self) -> &MoonsParams {
        &self.params
    }

    /// p(x | y = class) at `(x1, x2)`.
    pub fn eval(&self, class: usize, x1: f64, x2: f64) -> Result<f64> {
        if class > 1 {
            return Err(Error::param(
                "class_index",
                format!("must be 0 or 1, got {class}"),
            ));
        }
        let inv_two_var = 1.0 / (2.0 * self.params.sigma * self.params.sigma);
        // The prefactor exp(-(r²+1)/2σ²) is folded into the integrand so that
        // each node evaluates exp(-|x - c(t)|²/2σ²) without overflow.
        let integrand = |k: usize| {
            let (cx, cy) = arc_point(class, self.cos[k], self.sin[k]);
            let (ux, uy) = (x1 - cx, x2 - cy);
            (-(ux * ux + uy * uy) * inv_two_var).exp()
        };
        let est = simpson_refined_indexed(integrand, 0.0, PI, &self.settings)?;
        let norm = 1.0 / (2.0 * PI * PI * self.params.sigma * self.params.sigma);
        Ok((norm * est.value).max(0.0))
    }

    /// Both conditionals rasterized on `spec`, leak-checked and normalized,
    /// with equal priors. Returns the per-class leaks alongside.
    pub fn labeled_density(&self, spec: &GridSpec) -> Result<(LabeledDensity, Vec<f64>)> {
        let first = try_rasterize(|x, y| self.eval(0, x, y), spec)?;
        // p1(x) = p0((1, 0.5) − x); on a grid centered at (0.5, 0.25) that is
        // the class-0 raster read backwards.
        let centered =
            |lo: f64, hi: f64, mid: f64| ((lo + hi) / 2.0 - mid).abs() <= 1e-12 * (hi - lo);
        let second =
            if centered(spec.x0, spec.x_max(), 0.5) && centered(spec.y0, spec.y_max(), 0.25) {
                let mut v = first.values().to_vec();
                v.reverse();
                Grid2D::from_values_unchecked(*spec, v)
            } else {
                try_rasterize(|x, y| self.eval(1, x, y), spec)?
            };
        LabeledDensity::from_leaky(vec![0.5, 0.5], vec![first, second])
    }

    /// (p(· | y = class) * v)(x1, x2) for the L∞ box of half-width `eps`,
    /// by a midpoint rule over the box with `abscissae²` nodes.
    pub fn convolved_point(
        &self,
        class: usize,
        x1: f64,
        x2: f64,
        eps: f64,
        abscissae: usize,
    ) -> Result<f64> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", format!("must be positive, got {eps}")));
        }
        let m = abscissae.max(64);
        let h = 2.0 * eps / m as f64;
        let mut sum = 0.0;
        for b in 0..m {
            let u2 = x2 - eps + (b as f64 + 0.5) * h;
            for a in 0..m {
                let u1 = x1 - eps + (a as f64 + 0.5) * h;
                sum += self.eval(class, u1, u2)?;
            }
        }
        Ok(sum / (m * m) as f64)
    }
}

/// p(x | y = class_index) for the two-moons distribution.
pub fn eval_moons(class_index: usize, x1: f64, x2: f64, params: &MoonsParams) -> Result<f64> {
    MoonsDensity::new(*params)?.eval(class_index, x1, x2)
}

/// Moons conditional convolved with the L∞ vicinity of radius `eps`,
/// evaluated by nested quadrature (64² box nodes around the arc integral).
pub fn moons_convolved_point(
    class_index: usize,
    x1: f64,
    x2: f64,
    params: &MoonsParams,
    eps: f64,
) -> Result<f64> {
    MoonsDensity::new(*params)?.convolved_point(class_index, x1, x2, eps, 64)
}

/// Two-moons labeled density on `spec` with equal priors.
pub fn moons_density(params: &MoonsParams, spec: &GridSpec) -> Result<LabeledDensity> {
    Ok(MoonsDensity::new(*params)?.labeled_density(spec)?.0)
}

/// Draws `n` labeled points from the two-moons distribution.
pub fn sample_moons(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<SampleSet> {
    let noise = Normal::new(0.0, sigma)
        .map_err(|_| Error::param("sigma", format!("must be positive, got {sigma}")))?;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let class = rng.random_range(0..2usize);
        let (s, c) = (rng.random::<f64>() * PI).sin_cos();
        let (cx, cy) = arc_point(class, c, s);
        points.push([cx + noise.sample(rng), cy + noise.sample(rng)]);
        labels.push(class);
    }
    SampleSet::new(points, labels)
}

/// Evaluates `f` at every cell center. No normalization is applied.
pub fn rasterize(f: impl Fn(f64, f64) -> f64 + Sync, spec: &GridSpec) -> Grid2D {
    let values = (0..spec.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let f = &f;
            (0..spec.nx).map(move |i| {
                let (x, y) = spec.center(i, j);
                f(x, y)
            })
        })
        .collect();
    Grid2D::from_values_unchecked(*spec, values)
}

/// [`rasterize`] for fallible point evaluators.
pub fn try_rasterize(
    f: impl Fn(f64, f64) -> Result<f64> + Sync,
    spec: &GridSpec,
) -> Result<Grid2D> {
    let rows = (0..spec.ny)
        .into_par_iter()
        .map(|j| {
            (0..spec.nx)
                .map(|i| {
                    let (x, y) = spec.center(i, j);
                    f(x, y)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Grid2D::from_values_unchecked(*spec, rows.concat()))
}

/// KDE bandwidth selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bandwidth {
    /// Scott's rule per class: n_k^(−1/6) times the mean marginal std-dev.
    Auto,
    Fixed(f64),
}

fn scott_bandwidth(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let std_dev = |axis: usize| {
        let mean = points.iter().map(|p| p[axis]).sum::<f64>() / n;
        let var = points.iter().map(|p| (p[axis] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    };
    n.powf(-1.0 / 6.0) * 0.5 * (std_dev(0) + std_dev(1))
}

/// Gaussian factors along one axis, trimmed to the range where they matter.
fn axis_factors(center: f64, origin: f64, step: f64, n: usize, h: f64) -> (usize, Vec<f64>) {
    let reach = 9.0 * h;
    let lo = (((center - reach - origin) / step).floor().max(0.0) as usize).min(n);
    let hi = (((center + reach - origin) / step).ceil().max(0.0) as usize).min(n);
    let inv = 1.0 / (2.0 * h * h);
    let factors = (lo..hi)
        .map(|i| {
            let c = origin + (i as f64 + 0.5) * step - center;
            (-(c * c) * inv).exp()
        })
        .collect();
    (lo, factors)
}

/// Sum of isotropic Gaussians of std-dev `h` at `points`, each of unit
/// mass, divided by the number of points.
fn gaussian_sum(points: &[[f64; 2]], h: f64, spec: &GridSpec) -> Grid2D {
    let mut values = vec![0.0; spec.len()];
    for p in points {
        let (i0, fx) = axis_factors(p[0], spec.x0, spec.dx, spec.nx, h);
        let (j0, fy) = axis_factors(p[1], spec.y0, spec.dy, spec.ny, h);
        for (dj, &gy) in fy.iter().enumerate() {
            let row = &mut values[(j0 + dj) * spec.nx + i0..][..fx.len()];
            for (v, &gx) in row.iter_mut().zip(&fx) {
                *v += gy * gx;
            }
        }
    }
    let scale = 1.0 / (2.0 * PI * h * h * points.len() as f64);
    values.iter_mut().for_each(|v| *v *= scale);
    Grid2D::from_values_unchecked(*spec, values)
}

/// Bandwidth per class; errors on empty classes and on degenerate
/// automatic fits.
pub fn class_bandwidths(samples: &SampleSet, bandwidth: Bandwidth) -> Result<Vec<f64>> {
    if let Bandwidth::Fixed(h) = bandwidth {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::param(
                "bandwidth",
                format!("must be positive, got {h}"),
            ));
        }
    }
    (0..samples.num_classes().max(2))
        .map(|class| {
            let pts: Vec<[f64; 2]> = samples.class_points(class).collect();
            if pts.is_empty() {
                return Err(Error::EmptyClass { class });
            }
            match bandwidth {
                Bandwidth::Fixed(h) => Ok(h),
                Bandwidth::Auto if pts.len() < 2 => Err(Error::param(
                    "bandwidth",
                    format!("automatic bandwidth needs >= 2 points in class {class}"),
                )),
                Bandwidth::Auto => {
                    let h = scott_bandwidth(&pts);
                    if h > 0.0 {
                        Ok(h)
                    } else {
                        Err(Error::param(
                            "bandwidth",
                            format!("class {class} points are all identical"),
                        ))
                    }
                }
            }
        })
        .collect()
}

/// Square-celled grid covering the samples plus six bandwidths on every
/// side, `resolution` cells along the longer axis.
pub fn kde_default_spec(
    samples: &SampleSet,
    bandwidth: Bandwidth,
    resolution: usize,
) -> Result<GridSpec> {
    let h = class_bandwidths(samples, bandwidth)?
        .into_iter()
        .fold(0.0, f64::max);
    let pad = 6.0 * h;
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &samples.points {
        x_min = x_min.min(p[0]);
        x_max = x_max.max(p[0]);
        y_min = y_min.min(p[1]);
        y_max = y_max.max(p[1]);
    }
    let (w, hgt) = (x_max - x_min + 2.0 * pad, y_max - y_min + 2.0 * pad);
    let cell = w.max(hgt) / resolution.max(2) as f64;
    let nx = (w / cell).ceil() as usize;
    let ny = (hgt / cell).ceil() as usize;
    GridSpec::new(x_min - pad, y_min - pad, cell, cell, nx.max(1), ny.max(1))
}

/// Per-class Gaussian KDE of `samples` on `spec`, priors from class
/// frequencies. Returns the fit and the bandwidth used per class.
pub fn kde_fit_with_bandwidths(
    samples: &SampleSet,
    bandwidth: Bandwidth,
    spec: &GridSpec,
) -> Result<(LabeledDensity, Vec<f64>)> {
    let bandwidths = class_bandwidths(samples, bandwidth)?;
    let n = samples.len() as f64;
    let mut priors = Vec::with_capacity(bandwidths.len());
    let mut grids = Vec::with_capacity(bandwidths.len());
    for (class, &h) in bandwidths.iter().enumerate() {
        let pts: Vec<[f64; 2]> = samples.class_points(class).collect();
        priors.push(pts.len() as f64 / n);
        grids.push(gaussian_sum(&pts, h, spec));
    }
    let (density, _) = LabeledDensity::from_leaky(priors, grids)?;
    Ok((density, bandwidths))
}

pub fn kde_fit(
    samples: &SampleSet,
    bandwidth: Bandwidth,
    spec: &GridSpec,
) -> Result<LabeledDensity> {
    Ok(kde_fit_with_bandwidths(samples, bandwidth, spec)?.0)
}

/// One isotropic Gaussian component of a class conditional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: [f64; 2],
    pub sigma: f64,
}

/// Classes whose conditionals are weighted sums of isotropic Gaussians.
pub fn make_gaussian_classes(
    priors: &[f64],
    classes: &[Vec<GaussianComponent>],
    spec: &GridSpec,
) -> Result<LabeledDensity> {
    if priors.len() != classes.len() {
        return Err(Error::param(
            "priors",
            format!("{} priors for {} classes", priors.len(), classes.len()),
        ));
    }
    let mut grids = Vec::with_capacity(classes.len());
    for comps in classes {
        if comps.is_empty() {
            return Err(Error::param("components", "a class has no components"));
        }
        let total_w: f64 = comps.iter().map(|c| c.weight).sum();
        for c in comps {
            if !(c.sigma > 0.0 && c.sigma.is_finite()) {
                return Err(Error::param(
                    "sigmas",
                    format!("must be positive, got {}", c.sigma),
                ));
            }
            if !(c.weight > 0.0) {
                return Err(Error::param(
                    "weights",
                    format!("must be positive, got {}", c.weight),
                ));
            }
        }
        let comps = comps.clone();
        grids.push(rasterize(
            move |x, y| {
                comps
                    .iter()
                    .map(|c| {
                        let (ux, uy) = (x - c.mean[0], y - c.mean[1]);
                        c.weight / total_w
                            * (-(ux * ux + uy * uy) / (2.0 * c.sigma * c.sigma)).exp()
                            / (2.0 * PI * c.sigma * c.sigma)
                    })
                    .sum()
            },
            spec,
        ));
    }
    Ok(LabeledDensity::from_leaky(priors.to_vec(), grids)?.0)
}

/// One isotropic Gaussian per class.
pub fn make_gaussian_mixture(
    priors: &[f64],
    means: &[[f64; 2]],
    sigmas: &[f64],
    spec: &GridSpec,
) -> Result<LabeledDensity> {
    if means.len() != priors.len() || sigmas.len() != priors.len() {
        return Err(Error::param(
            "means,sigmas",
            format!(
                "{} priors, {} means, {} sigmas",
                priors.len(),
                means.len(),
                sigmas.len()
            ),
        ));
    }
    let classes: Vec<Vec<GaussianComponent>> = means
        .iter()
        .zip(sigmas)
        .map(|(&mean, &sigma)| {
            vec![GaussianComponent {
                weight: 1.0,
                mean,
                sigma,
            }]
        })
        .collect();
    make_gaussian_classes(priors, &classes, spec)
}

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// One uniform rectangle per class; cells are in a rectangle when their
/// center is.
pub fn make_uniform_patches(
    priors: &[f64],
    rects: &[Rect],
    spec: &GridSpec,
) -> Result<LabeledDensity> {
    if rects.len() != priors.len() {
        return Err(Error::param(
            "rectangles",
            format!("{} priors for {} rectangles", priors.len(), rects.len()),
        ));
    }
    let mut conditionals = Vec::with_capacity(rects.len());
    for (k, r) in rects.iter().enumerate() {
        if !(r.x_min < r.x_max && r.y_min < r.y_max) {
            return Err(Error::param(
                "rectangles",
                format!("rectangle {k} is empty"),
            ));
        }
        if r.x_min < spec.x0
            || r.y_min < spec.y0
            || r.x_max > spec.x_max()
            || r.y_max > spec.y_max()
        {
            return Err(Error::param(
                "rectangles",
                format!("rectangle {k} extends outside the grid domain"),
            ));
        }
        let g = rasterize(|x, y| if r.contains(x, y) { 1.0 } else { 0.0 }, spec);
        if integrate(&g) == 0.0 {
            return Err(Error::param(
                "rectangles",
                format!("rectangle {k} contains no cell centers"),
            ));
        }
        conditionals.push(normalize(&g)?);
    }
    LabeledDensity::new(priors.to_vec(), conditionals)
}

/// Two unit squares overlapping on the strip `[0.5, 1] × [0, 1]`, equal
/// priors, on a 0.01 grid over `[-0.5, 2] × [-0.5, 1.5]`.
pub fn overlapping_squares() -> LabeledDensity {
    make_uniform_patches(&[0.5, 0.5], &squares_rects(), &squares_default_spec())
        .expect("static fixture is valid")
}

/// The unit squares [0,1]² and [0.5,1.5]×[0,1] of [`overlapping_squares`].
pub fn squares_rects() -> [Rect; 2] {
    [Rect::new(0.0, 1.0, 0.0, 1.0), Rect::new(0.5, 1.5, 0.0, 1.0)]
}

pub fn squares_default_spec() -> GridSpec {
    GridSpec::new(-0.5, -0.5, 0.01, 0.01, 250, 200).expect("static grid is valid")
}

/// Result of [`calibrate_moons`].
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub sigma: f64,
    pub beta: f64,
    /// `(σ, β_D)` for every σ of the coarse sweep that rasterized within the
    /// leak threshold.
    pub sweep: Vec<(f64, f64)>,
}

/// Finds the moons σ whose Bayes error on `spec` is closest to
/// `target_beta`: a sweep over σ ∈ [0.10, 0.35] in steps of 0.005, then
/// bisection inside the bracketing step.
pub fn calibrate_moons(
    target_beta: f64,
    spec: &GridSpec,
    quadrature_points: usize,
) -> Result<Calibration> {
    if !(target_beta > 0.0 && target_beta < 0.5) {
        return Err(Error::param(
            "target_beta",
            format!("must lie in (0, 0.5), got {target_beta}"),
        ));
    }
    let beta_at = |sigma: f64| -> Result<f64> {
        let d = moons_density(
            &MoonsParams {
                sigma,
                quadrature_points,
            },
            spec,
        )?;
        Ok(bayes::bayes_error(&d))
    };

    let mut sweep = Vec::new();
    for step in 0..=50 {
        let sigma = 0.10 + 0.005 * step as f64;
        match beta_at(sigma) {
            Ok(beta) => sweep.push((sigma, beta)),
            Err(Error::Leak { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (mut best_sigma, mut best_beta) = *sweep
        .iter()
        .min_by(|a, b| {
            (a.1 - target_beta)
                .abs()
                .total_cmp(&(b.1 - target_beta).abs())
        })
        .ok_or_else(|| Error::DegenerateDensity("every sweep point leaked".into()))?;

    let bracket = sweep
        .windows(2)
        .find(|w| (w[0].1 - target_beta) * (w[1].1 - target_beta) <= 0.0)
        .map(|w| (w[0], w[1]));
    if let Some(((mut lo, mut beta_lo), (mut hi, _))) = bracket {
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            let beta = beta_at(mid)?;
            if (beta - target_beta).abs() < (best_beta - target_beta).abs() {
                best_sigma = mid;
                best_beta = beta;
            }
            if (beta - target_beta) * (beta_lo - target_beta) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                beta_lo = beta;
            }
            if (best_beta - target_beta).abs() < 1e-6 || hi - lo < 1e-6 {
                break;
            }
        }
    }
    Ok(Calibration {
        sigma: best_sigma,
        beta: best_beta,
        sweep,
    })
}
