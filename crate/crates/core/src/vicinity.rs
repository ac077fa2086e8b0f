//! Discretized vicinity functions: the uniform density over the ε-ball of a
//! norm, centered at the origin.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridSpec};
use crate::special::ln_gamma;

/// Relative slack when testing whether a cell center lies on the ball's
/// boundary, so that `15 · 0.01 ≤ 0.15` holds despite rounding.
const MEMBERSHIP_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    LInf,
    L2,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::LInf => "linf",
            Norm::L2 => "l2",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" | "l_inf" | "inf" => Ok(Norm::LInf),
            "l2" => Ok(Norm::L2),
            other => Err(Error::param(
                "norm",
                format!("expected linf or l2, got `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VicinityKernel {
    pub norm: Norm,
    pub epsilon: f64,
    /// Odd-sized grid centered on the origin; its discrete mass is 1.
    pub kernel: Grid2D,
    /// Area of the continuous ball, the normalizer ε_v.
    pub eps_v: f64,
    /// Radius of the Euclidean disc with area `eps_v`.
    pub eps_eff: f64,
    half_x: usize,
    half_y: usize,
}

impl VicinityKernel {
    /// Half-widths in cells along x and y.
    pub fn half_widths(&self) -> (usize, usize) {
        (self.half_x, self.half_y)
    }

    pub fn is_delta(&self) -> bool {
        self.half_x == 0 && self.half_y == 0
    }

    /// Number of cells in the support.
    pub fn support_cells(&self) -> usize {
        self.kernel.values().iter().filter(|&&v| v > 0.0).count()
    }

    /// 1/ε_v, the value the continuous vicinity function takes on its
    /// support (infinite for ε = 0).
    pub fn nominal_density(&self) -> f64 {
        1.0 / self.eps_v
    }

    /// Kernel value at offset `(di, dj)` cells from the center.
    pub fn at(&self, di: isize, dj: isize) -> f64 {
        let (hx, hy) = (self.half_x as isize, self.half_y as isize);
        if di.abs() > hx || dj.abs() > hy {
            return 0.0;
        }
        self.kernel.get((di + hx) as usize, (dj + hy) as usize)
    }
}

/// Builds the vicinity kernel for cells of size `dx × dy`. A cell belongs to
/// the support when its center satisfies `‖x‖ ≤ ε`; the support is then
/// filled with one constant, renormalized to unit discrete mass.
pub fn build_kernel(norm: Norm, epsilon: f64, cell: (f64, f64)) -> Result<VicinityKernel> {
    let (dx, dy) = cell;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::param(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    if !(dx > 0.0 && dy > 0.0) {
        return Err(Error::param(
            "cell",
            format!("dx, dy must be positive, got {dx}, {dy}"),
        ));
    }
    let reach = epsilon * (1.0 + MEMBERSHIP_SLACK);
    let half_x = (reach / dx).floor() as usize;
    let half_y = (reach / dy).floor() as usize;
    let (nx, ny) = (2 * half_x + 1, 2 * half_y + 1);

    let inside = |i: usize, j: usize| -> bool {
        let ox = (i as f64 - half_x as f64) * dx;
        let oy = (j as f64 - half_y as f64) * dy;
        match norm {
            Norm::LInf => true,
            Norm::L2 => ox * ox + oy * oy <= reach * reach,
        }
    };
    let mut count = 0usize;
    let mut mask = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let m = inside(i, j);
            count += m as usize;
            mask.push(m);
        }
    }
    let value = 1.0 / (count as f64 * dx * dy);
    let values = mask
        .into_iter()
        .map(|m| if m { value } else { 0.0 })
        .collect();
    let spec = GridSpec::new(
        -(half_x as f64 + 0.5) * dx,
        -(half_y as f64 + 0.5) * dy,
        dx,
        dy,
        nx,
        ny,
    )?;
    let eps_v = match norm {
        Norm::LInf => (2.0 * epsilon).powi(2),
        Norm::L2 => PI * epsilon * epsilon,
    };
    Ok(VicinityKernel {
        norm,
        epsilon,
        kernel: Grid2D::from_values_unchecked(spec, values),
        eps_v,
        eps_eff: effective_radius(norm, epsilon, 2),
        half_x,
        half_y,
    })
}

/// Radius of the `dim`-dimensional Euclidean ball whose volume equals that
/// of the ε-ball of `norm`.
pub fn effective_radius(norm: Norm, epsilon: f64, dim: usize) -> f64 {
    match norm {
        Norm::L2 => epsilon,
        Norm::LInf => {
            // π^{d/2}/Γ(d/2+1) · r^d = (2ε)^d
            let d = dim.max(1) as f64;
            2.0 * epsilon * (ln_gamma(d / 2.0 + 1.0) / d).exp() / PI.sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate;

    #[test]
    fn linf_box_support() {
        let k = build_kernel(Norm::LInf, 0.15, (0.01, 0.01)).unwrap();
        assert_eq!(k.kernel.spec().nx, 31);
        assert_eq!(k.kernel.spec().ny, 31);
        assert_eq!(k.support_cells(), 31 * 31);
        assert!((k.eps_v - 0.09).abs() < 1e-15);
        assert!((integrate(&k.kernel) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_radius_is_a_delta() {
        let k = build_kernel(Norm::LInf, 0.0, (0.1, 0.2)).unwrap();
        assert!(k.is_delta());
        assert_eq!(k.kernel.values().len(), 1);
        assert!((k.kernel.values()[0] - 1.0 / 0.02).abs() < 1e-12);
        assert_eq!(k.eps_eff, 0.0);
    }

    #[test]
    fn l2_nominal_value() {
        let k = build_kernel(Norm::L2, 1.0, (0.25, 0.25)).unwrap();
        assert!((k.nominal_density() - 1.0 / PI).abs() < 1e-15);
        assert!((integrate(&k.kernel) - 1.0).abs() < 1e-12);
        // corners of the bounding box are outside the disc
        assert_eq!(k.at(4, 4), 0.0);
        assert!(k.at(4, 0) > 0.0);
    }

    #[test]
    fn negative_radius_rejected() {
        assert!(build_kernel(Norm::L2, -0.1, (0.1, 0.1)).is_err());
        assert!(build_kernel(Norm::L2, 0.1, (0.0, 0.1)).is_err());
    }

    #[test]
    fn effective_radii() {
        for dim in [1, 2, 3, 784, 3072] {
            assert_eq!(effective_radius(Norm::L2, 0.15, dim), 0.15);
        }
        let r = effective_radius(Norm::LInf, 0.15, 2);
        assert!((r - 2.0 * 0.15 / PI.sqrt()).abs() < 1e-12);
        assert!((r - 0.169_256_875).abs() < 1e-6);
        assert!((effective_radius(Norm::LInf, 0.3, 1) - 0.3).abs() < 1e-12);
        // Ball volume identity in 3-D: 4/3·π·r³ = (2ε)³
        let r3 = effective_radius(Norm::LInf, 0.5, 3);
        assert!((4.0 / 3.0 * PI * r3.powi(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_even_and_nested() {
        let cell = (0.013, 0.021);
        let mut prev: Option<VicinityKernel> = None;
        for norm in [Norm::LInf, Norm::L2] {
            for step in 0..12 {
                let eps = 0.02 * step as f64;
                let k = build_kernel(norm, eps, cell).unwrap();
                let (hx, hy) = k.half_widths();
                for dj in -(hy as isize)..=hy as isize {
                    for di in -(hx as isize)..=hx as isize {
                        assert_eq!(k.at(di, dj), k.at(-di, -dj));
                        assert_eq!(k.at(di, dj), k.at(-di, dj));
                        if let Some(p) = prev.as_ref().filter(|p| p.norm == norm) {
                            if p.at(di, dj) > 0.0 {
                                assert!(k.at(di, dj) > 0.0);
                            }
                        }
                    }
                }
                prev = Some(k);
            }
            prev = None;
        }
    }
}
