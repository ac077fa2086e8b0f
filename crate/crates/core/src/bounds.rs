//! Lower bounds on the irreducible robustness error and the matching upper
//! bounds on robust accuracy.
//!
//! Every bound is computed from the distribution and the vicinity alone:
//!
//! * `zeta_thm3`: mass of the uncertainty region K_D.
//! * `zeta_cor1`: β_D·|Y|/(|Y| − 1), needs only the Bayes error.
//! * `zeta_cor2`: `zeta_thm3` plus 2·ε_eff·p_min·vol(K_D)^((d−1)/d) for the
//!   margin around K_D.
//! * `zeta_sharp`: mass of the uncertainty region of D′ = D * v.
//! * `zeta_d`: the certified-accuracy variant, from D′ and the hardened,
//!   re-convolved D†.

use std::fmt;

use rayon::prelude::*;

use crate::bayes::{check_tau, posterior, Posterior, UncertaintyRegion};
use crate::convolution::convolve_distribution;
use crate::density::LabeledDensity;
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::vicinity::{build_kernel, effective_radius, Norm, VicinityKernel};

/// Column header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "epsilon,norm,tau_unc,resolution,beta_D,beta_Dprime,zeta_thm3,zeta_cor1,zeta_cor2,zeta_sharp,zeta_D,ub_zeta_D";

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub epsilon: f64,
    pub norm: Norm,
    pub tau_unc: f64,
    pub nx: usize,
    pub ny: usize,
    pub num_classes: usize,
    pub beta_d: f64,
    pub beta_dprime: f64,
    pub zeta_thm3: f64,
    pub zeta_cor1: f64,
    pub zeta_cor2: f64,
    pub zeta_sharp: f64,
    pub zeta_d: f64,
    /// Inputs of the margin term of `zeta_cor2`.
    pub eps_eff: f64,
    pub p_min: f64,
    pub volume_k_d: f64,
}

impl BoundsReport {
    pub fn ub_thm3(&self) -> f64 {
        1.0 - self.zeta_thm3
    }

    pub fn ub_cor1(&self) -> f64 {
        1.0 - self.zeta_cor1
    }

    pub fn ub_cor2(&self) -> f64 {
        1.0 - self.zeta_cor2
    }

    pub fn ub_sharp(&self) -> f64 {
        1.0 - self.zeta_sharp
    }

    pub fn ub_zeta_d(&self) -> f64 {
        1.0 - self.zeta_d
    }

    pub fn resolution(&self) -> String {
        format!("{}x{}", self.nx, self.ny)
    }

    /// One sweep CSV row, in [`SWEEP_CSV_HEADER`] order.
    pub fn csv_row(&self) -> String {
        let nums = [
            self.beta_d,
            self.beta_dprime,
            self.zeta_thm3,
            self.zeta_cor1,
            self.zeta_cor2,
            self.zeta_sharp,
            self.zeta_d,
            self.ub_zeta_d(),
        ];
        let mut row = format!(
            "{},{},{},{}",
            fmt_sig9(self.epsilon),
            self.norm,
            fmt_sig9(self.tau_unc),
            self.resolution()
        );
        for v in nums {
            row.push(',');
            row.push_str(&fmt_sig9(v));
        }
        row
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "epsilon       {}", fmt_sig9(self.epsilon))?;
        writeln!(f, "norm          {}", self.norm)?;
        writeln!(f, "tau_unc       {}", fmt_sig9(self.tau_unc))?;
        writeln!(f, "resolution    {}", self.resolution())?;
        writeln!(f, "classes       {}", self.num_classes)?;
        writeln!(f, "beta_D        {}", fmt_sig9(self.beta_d))?;
        writeln!(f, "beta_Dprime   {}", fmt_sig9(self.beta_dprime))?;
        writeln!(f, "eps_eff       {}", fmt_sig9(self.eps_eff))?;
        writeln!(f, "p_min         {}", fmt_sig9(self.p_min))?;
        writeln!(f, "vol_K_D       {}", fmt_sig9(self.volume_k_d))?;
        for (name, z) in [
            ("zeta_thm3", self.zeta_thm3),
            ("zeta_cor1", self.zeta_cor1),
            ("zeta_cor2", self.zeta_cor2),
            ("zeta_sharp", self.zeta_sharp),
            ("zeta_D", self.zeta_d),
        ] {
            writeln!(
                f,
                "{name:<13} {}   upper bound {}",
                fmt_sig9(z),
                fmt_sig9(1.0 - z)
            )?;
        }
        Ok(())
    }
}

/// Formats with 9 significant digits, trailing zeros trimmed (like `%.9g`).
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.8e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// Mass of the uncertainty region of `d`: the Thm-3 lower bound.
pub fn thm3_lower(d: &LabeledDensity, tau_unc: f64) -> Result<f64> {
    check_tau(tau_unc)?;
    let post = posterior(d);
    Ok(region_mass(&post, &post.uncertain_cells(tau_unc)))
}

fn region_mass(post: &Posterior, cells: &[bool]) -> f64 {
    let ev = post.evidence.values();
    cells
        .iter()
        .zip(ev)
        .filter(|(&m, _)| m)
        .map(|(_, &v)| v)
        .sum::<f64>()
        * post.spec().cell_area()
}

/// β·|Y|/(|Y| − 1).
pub fn cor1_lower(beta: f64, num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::param(
            "num_classes",
            format!("must be >= 2, got {num_classes}"),
        ));
    }
    let k = num_classes as f64;
    let max_beta = 1.0 - 1.0 / k;
    if !(beta >= 0.0 && beta <= max_beta + 1e-9) {
        return Err(Error::param(
            "beta",
            format!("must lie in [0, {max_beta}], got {beta}"),
        ));
    }
    Ok(beta * k / (k - 1.0))
}

/// Margin term 2·ε_eff·p_min·vol^((d−1)/d) of the Cor-2 bound.
pub fn cor2_margin(eps_eff: f64, p_min: f64, volume: f64, dim: usize) -> f64 {
    let d = dim.max(1) as f64;
    2.0 * eps_eff * p_min * volume.powf((d - 1.0) / d)
}

/// Cor-2 bound from scalars, for any input dimension; clamped to 1.
pub fn cor2_lower_scalar(
    eps_eff: f64,
    p_min: f64,
    volume: f64,
    region_mass: f64,
    dim: usize,
) -> f64 {
    (cor2_margin(eps_eff, p_min, volume, dim) + region_mass).min(1.0)
}

/// Cor-2 bound on a gridded distribution. `p_min` defaults to the smallest
/// evidence value over the support.
pub fn cor2_lower(
    d: &LabeledDensity,
    k: &VicinityKernel,
    tau_unc: f64,
    p_min_override: Option<f64>,
) -> Result<f64> {
    check_tau(tau_unc)?;
    let post = posterior(d);
    let region = UncertaintyRegion::from_cells(&post, &post.uncertain_cells(tau_unc), tau_unc);
    let p_min = resolve_p_min(&post, p_min_override)?;
    Ok(cor2_lower_scalar(
        effective_radius(k.norm, k.epsilon, 2),
        p_min,
        region.volume,
        region.mass,
        2,
    ))
}

fn resolve_p_min(post: &Posterior, p_min_override: Option<f64>) -> Result<f64> {
    match p_min_override {
        Some(p) if !(p >= 0.0 && p.is_finite()) => Err(Error::param(
            "p_min",
            format!("must be a nonnegative density, got {p}"),
        )),
        Some(p) => Ok(p),
        None => {
            let p = post.min_support_evidence();
            Ok(if p.is_finite() { p } else { 0.0 })
        }
    }
}

/// Mass, under D′ = D * v, of the cells whose D′ label is uncertain.
pub fn zeta_sharp(d: &LabeledDensity, k: &VicinityKernel, tau_unc: f64) -> Result<f64> {
    check_tau(tau_unc)?;
    let dprime = convolve_distribution(d, k)?;
    let post = posterior(&dprime);
    Ok(region_mass(&post, &post.uncertain_cells(tau_unc)))
}

fn harden_from(post: &Posterior, num_classes: usize) -> Result<LabeledDensity> {
    let spec = *post.spec();
    let area = spec.cell_area();
    let mut joints = vec![vec![0.0; spec.len()]; num_classes];
    for (c, &ev) in post.evidence.values().iter().enumerate() {
        if ev > 0.0 {
            joints[post.argmax[c]][c] = ev;
        }
    }
    let masses: Vec<f64> = joints
        .iter()
        .map(|j| j.iter().sum::<f64>() * area)
        .collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateDensity(
            "hardening a zero-mass distribution".into(),
        ));
    }
    let priors = masses.iter().map(|m| m / total).collect();
    let conditionals = joints
        .into_iter()
        .zip(&masses)
        .map(|(j, &m)| {
            let inv = if m > 0.0 { 1.0 / m } else { 0.0 };
            Grid2D::from_values_unchecked(spec, j.into_iter().map(|v| v * inv).collect())
        })
        .collect();
    LabeledDensity::new(priors, conditionals)
}

/// Moves all of each cell's joint mass onto its argmax class (ties to the
/// lowest index). Priors are recomputed from the hardened joints.
pub fn harden(dprime: &LabeledDensity) -> Result<LabeledDensity> {
    harden_from(&posterior(dprime), dprime.num_classes())
}

/// Stages of the ζ_D pipeline, kept for inspection.
#[derive(Clone, Debug)]
pub struct Intermediates {
    pub dprime: LabeledDensity,
    pub hardened: LabeledDensity,
    pub dagger: LabeledDensity,
    pub k_d: UncertaintyRegion,
    pub k_dprime: UncertaintyRegion,
    pub k_dagger: UncertaintyRegion,
}

/// ζ_D and its first-term region K_{D†}, from a precomputed D′ posterior.
fn zeta_d_from(
    dprime: &LabeledDensity,
    dprime_post: &Posterior,
    k: &VicinityKernel,
    tau_unc: f64,
) -> Result<(f64, LabeledDensity, LabeledDensity, UncertaintyRegion)> {
    let hardened = harden_from(dprime_post, dprime.num_classes())?;
    let dagger = convolve_distribution(&hardened, k)?;
    let dagger_post = posterior(&dagger);
    let in_dagger = dagger_post.uncertain_cells(tau_unc);

    let q = dprime_post.evidence.values();
    let mut inside = 0.0;
    let mut outside = 0.0;
    for c in 0..q.len() {
        if in_dagger[c] {
            inside += q[c];
        } else if dprime_post.support[c] {
            outside += (q[c] - dprime_post.max_joint[c]).max(0.0);
        }
    }
    let area = dprime.spec().cell_area();
    let zeta = ((inside + outside) * area).clamp(0.0, 1.0);
    let region = UncertaintyRegion::from_cells(&dagger_post, &in_dagger, tau_unc);
    Ok((zeta, hardened, dagger, region))
}

/// ζ_D: D′-mass of K_{D†} plus the D′ Bayes-error density outside it.
pub fn zeta_d(d: &LabeledDensity, k: &VicinityKernel, tau_unc: f64) -> Result<f64> {
    check_tau(tau_unc)?;
    let dprime = convolve_distribution(d, k)?;
    let post = posterior(&dprime);
    Ok(zeta_d_from(&dprime, &post, k, tau_unc)?.0)
}

/// Options for [`compute_bounds`].
#[derive(Clone, Copy, Debug)]
pub struct BoundsOptions {
    pub tau_unc: f64,
    pub p_min_override: Option<f64>,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            tau_unc: crate::bayes::DEFAULT_TAU_UNC,
            p_min_override: None,
        }
    }
}

/// Every bound for one vicinity, in the order convolve → harden → convolve
/// → regions → integrals, returning the intermediate stages too.
pub fn compute_bounds_detailed(
    d: &LabeledDensity,
    k: &VicinityKernel,
    opts: &BoundsOptions,
) -> Result<(BoundsReport, Intermediates)> {
    let tau = opts.tau_unc;
    check_tau(tau)?;
    let spec = *d.spec();

    let d_post = posterior(d);
    let k_d_cells = d_post.uncertain_cells(tau);
    let k_d = UncertaintyRegion::from_cells(&d_post, &k_d_cells, tau);
    let beta_d = d_post.bayes_error();
    let p_min = resolve_p_min(&d_post, opts.p_min_override)?;
    let eps_eff = effective_radius(k.norm, k.epsilon, 2);

    let dprime = convolve_distribution(d, k)?;
    let dp_post = posterior(&dprime);
    let k_dprime = UncertaintyRegion::from_cells(&dp_post, &dp_post.uncertain_cells(tau), tau);
    let beta_dprime = dp_post.bayes_error();
    let (zeta_d, hardened, dagger, k_dagger) = zeta_d_from(&dprime, &dp_post, k, tau)?;

    let report = BoundsReport {
        epsilon: k.epsilon,
        norm: k.norm,
        tau_unc: tau,
        nx: spec.nx,
        ny: spec.ny,
        num_classes: d.num_classes(),
        beta_d,
        beta_dprime,
        zeta_thm3: k_d.mass,
        zeta_cor1: cor1_lower(
            beta_d.min(1.0 - 1.0 / d.num_classes() as f64),
            d.num_classes(),
        )?,
        zeta_cor2: cor2_lower_scalar(eps_eff, p_min, k_d.volume, k_d.mass, 2),
        zeta_sharp: k_dprime.mass,
        zeta_d,
        eps_eff,
        p_min,
        volume_k_d: k_d.volume,
    };
    Ok((
        report,
        Intermediates {
            dprime,
            hardened,
            dagger,
            k_d,
            k_dprime,
            k_dagger,
        },
    ))
}

pub fn compute_bounds(
    d: &LabeledDensity,
    k: &VicinityKernel,
    opts: &BoundsOptions,
) -> Result<BoundsReport> {
    Ok(compute_bounds_detailed(d, k, opts)?.0)
}

/// A sweep needs at least one radius; radii are finite, ≥ 0 and ascending.
pub fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::param("eps", "need at least one radius"));
    }
    if eps_list.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(Error::param("eps", "radii must be finite and >= 0"));
    }
    if eps_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("eps", "radii must be sorted ascending"));
    }
    Ok(())
}

/// One [`BoundsReport`] per radius in `eps_list` (ascending, each ≥ 0).
pub fn epsilon_sweep(
    d: &LabeledDensity,
    norm: Norm,
    eps_list: &[f64],
    opts: &BoundsOptions,
) -> Result<Vec<BoundsReport>> {
    check_eps_list(eps_list)?;
    let spec = *d.spec();
    eps_list
        .par_iter()
        .map(|&eps| {
            let k = build_kernel(norm, eps, (spec.dx, spec.dy))?;
            compute_bounds(d, &k, opts)
        })
        .collect()
}

/// Header plus one row per report.
pub fn sweep_csv(reports: &[BoundsReport], provenance: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        out.push_str(p);
        out.push('\n');
    }
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::bayes_error;
    use crate::density::{make_gaussian_mixture, overlapping_squares};
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn squares_kernel(norm: Norm, eps: f64) -> (LabeledDensity, VicinityKernel) {
        let d = overlapping_squares();
        let k = build_kernel(norm, eps, (d.spec().dx, d.spec().dy)).unwrap();
        (d, k)
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(0.15), "0.15");
        assert_eq!(fmt_sig9(0.142_812_345_678), "0.142812346");
        assert_eq!(fmt_sig9(1.0), "1");
        assert_eq!(fmt_sig9(1.234_567_891e-7), "1.23456789e-7");
        assert_eq!(fmt_sig9(-0.5), "-0.5");
    }

    #[test]
    fn cor1_arithmetic() {
        assert!((cor1_lower(0.0854, 2).unwrap() - 0.1708).abs() < 1e-12);
        assert_eq!(cor1_lower(0.0, 2).unwrap(), 0.0);
        assert!((cor1_lower(0.0524, 10).unwrap() - 0.058_222_222_222).abs() < 1e-9);
        assert!(cor1_lower(0.6, 2).is_err());
        assert!(cor1_lower(-0.1, 2).is_err());
        assert!(cor1_lower(0.1, 1).is_err());
    }

    #[test]
    fn thm3_on_fixtures() {
        let (d, _) = squares_kernel(Norm::LInf, 0.05);
        assert!((thm3_lower(&d, 1e-3).unwrap() - 0.5).abs() < 1e-6);
        assert!(thm3_lower(&d, 1e-3).unwrap() >= bayes_error(&d));
    }

    #[test]
    fn cor2_squares_hand_value() {
        let (d, k) = squares_kernel(Norm::LInf, 0.05);
        let expect = 2.0 * (0.1 / PI.sqrt()) * 0.5 * 0.5f64.sqrt() + 0.5;
        let got = cor2_lower(&d, &k, 1e-3, None).unwrap();
        assert!((got - expect).abs() < 1e-6, "{got} vs {expect}");
        assert!((got - 0.5399).abs() < 1e-4);
        assert!((cor2_lower(&d, &k, 1e-3, Some(0.0)).unwrap() - 0.5).abs() < 1e-6);
        let k0 = build_kernel(Norm::LInf, 0.0, (d.spec().dx, d.spec().dy)).unwrap();
        assert_eq!(
            cor2_lower(&d, &k0, 1e-3, None).unwrap(),
            thm3_lower(&d, 1e-3).unwrap()
        );
        assert!(cor2_lower(&d, &k, 1e-3, Some(-1.0)).is_err());
    }

    #[test]
    fn cor2_scalar_general_dimension() {
        // 1-D: margin is 2·ε_eff·p_min regardless of volume
        assert!((cor2_margin(0.1, 0.5, 7.0, 1) - 0.1).abs() < 1e-15);
        assert_eq!(cor2_lower_scalar(1.0, 1.0, 1.0, 0.9, 2), 1.0);
    }

    #[test]
    fn zeta_sharp_cases() {
        // separated squares: gap 0.5 > 2ε
        let spec = GridSpec::new(-0.5, -0.5, 0.01, 0.01, 350, 200).unwrap();
        let d = crate::density::make_uniform_patches(
            &[0.5, 0.5],
            &[
                crate::density::Rect::new(0.0, 1.0, 0.0, 1.0),
                crate::density::Rect::new(1.5, 2.5, 0.0, 1.0),
            ],
            &spec,
        )
        .unwrap();
        let k = build_kernel(Norm::LInf, 0.2, (0.01, 0.01)).unwrap();
        assert_eq!(zeta_sharp(&d, &k, 1e-3).unwrap(), 0.0);

        let g = GridSpec::covering(-6.0, 6.0, -5.0, 5.0, 120, 100).unwrap();
        let m = make_gaussian_mixture(&[0.5, 0.5], &[[-1.0, 0.0], [1.0, 0.0]], &[1.0, 1.0], &g)
            .unwrap();
        let k = build_kernel(Norm::LInf, 0.2, (g.dx, g.dy)).unwrap();
        assert!(zeta_sharp(&m, &k, 1e-3).unwrap() > 0.95);

        let mut last = 0.0;
        for eps in [0.0, 0.05, 0.1] {
            let (d, k) = squares_kernel(Norm::LInf, eps);
            let z = zeta_sharp(&d, &k, 1e-3).unwrap();
            assert!(z >= last - 1e-12, "eps={eps}: {z} < {last}");
            last = z;
        }
        assert!(last > 0.5);
    }

    #[test]
    fn harden_assigns_all_mass_to_argmax() {
        let spec = GridSpec::covering(0.0, 3.0, 0.0, 1.0, 3, 1).unwrap();
        // cell 0: posteriors 0.7/0.3; cell 1: tie; cell 2: class 1 only
        let c0 = Grid2D::from_values(spec, vec![0.7, 0.3, 0.0]).unwrap();
        let c1 = Grid2D::from_values(spec, vec![0.3, 0.3, 0.4]).unwrap();
        let d = LabeledDensity::new(vec![0.5, 0.5], vec![c0, c1]).unwrap();
        let h = harden(&d).unwrap();
        let ev = d.evidence();
        assert!((h.joint(0).values()[0] - ev.values()[0]).abs() < 1e-12);
        assert_eq!(h.joint(1).values()[0], 0.0);
        assert!((h.joint(0).values()[1] - ev.values()[1]).abs() < 1e-12);
        assert_eq!(h.joint(1).values()[1], 0.0);
        assert!((h.joint(1).values()[2] - ev.values()[2]).abs() < 1e-12);
        assert!((h.priors()[0] - 0.8).abs() < 1e-12);
        assert_eq!(bayes_error(&h), 0.0);

        // a class that never wins keeps prior 0 and a zero conditional
        let c0 = Grid2D::from_values(spec, vec![0.5, 0.5, 0.0]).unwrap();
        let c1 = Grid2D::from_values(spec, vec![0.2, 0.2, 0.6]).unwrap();
        let c2 = Grid2D::from_values(spec, vec![0.3, 0.3, 0.4]).unwrap();
        let d = LabeledDensity::new(vec![0.2, 0.2, 0.6], vec![c0, c1, c2]).unwrap();
        let h = harden(&d).unwrap();
        assert_eq!(h.priors()[0], 0.0);
        assert!(h.conditional(0).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zeta_d_at_zero_radius_is_beta() {
        let g = GridSpec::covering(-6.0, 6.0, -5.0, 5.0, 120, 100).unwrap();
        let m = make_gaussian_mixture(&[0.4, 0.6], &[[-1.0, 0.0], [1.0, 0.5]], &[1.0, 0.7], &g)
            .unwrap();
        let k = build_kernel(Norm::L2, 0.0, (g.dx, g.dy)).unwrap();
        assert!((zeta_d(&m, &k, 1e-3).unwrap() - bayes_error(&m)).abs() < 1e-9);
        let (d, k) = squares_kernel(Norm::LInf, 0.0);
        assert!((zeta_d(&d, &k, 1e-3).unwrap() - bayes_error(&d)).abs() < 1e-9);
    }

    #[test]
    fn report_chain_on_squares() {
        let (d, k) = squares_kernel(Norm::LInf, 0.05);
        let r = compute_bounds(&d, &k, &BoundsOptions::default()).unwrap();
        assert!(r.zeta_cor2 >= r.zeta_thm3);
        assert!(r.zeta_thm3 >= r.zeta_cor1 - 1e-9);
        assert!(r.zeta_cor1 >= r.beta_d - 1e-9);
        assert!(r.beta_dprime >= r.beta_d - 1e-9);
        assert!((r.zeta_cor2 - 0.5399).abs() < 1e-4);
        assert!(r.zeta_d >= r.beta_dprime - 1e-9);
        assert_eq!(r.ub_zeta_d(), 1.0 - r.zeta_d);
    }

    #[test]
    fn sweep_validation_and_rows() {
        let d = overlapping_squares();
        let opts = BoundsOptions::default();
        assert!(epsilon_sweep(&d, Norm::LInf, &[0.1, 0.05], &opts).is_err());
        assert!(epsilon_sweep(&d, Norm::LInf, &[-0.1], &opts).is_err());
        assert!(epsilon_sweep(&d, Norm::LInf, &[], &opts).is_err());
        let rows = epsilon_sweep(&d, Norm::LInf, &[0.0], &opts).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].zeta_d - rows[0].beta_d).abs() < 1e-9);
        let csv = sweep_csv(&rows, None);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,linf,0.001,250x200,0.25,"));
        assert_eq!(row.split(',').count(), 12);
    }

    #[test]
    fn linf_dominates_l2_on_squares() {
        let d = overlapping_squares();
        let opts = BoundsOptions::default();
        for eps in [0.05, 0.1] {
            let a = epsilon_sweep(&d, Norm::LInf, &[eps], &opts).unwrap();
            let b = epsilon_sweep(&d, Norm::L2, &[eps], &opts).unwrap();
            assert!(a[0].zeta_d >= b[0].zeta_d - 1e-6);
        }
    }
}
