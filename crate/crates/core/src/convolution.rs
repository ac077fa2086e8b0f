//! Linear ("same"-size, zero-padded) convolution of grids with vicinity
//! kernels, and its lift to labeled distributions.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::density::{LabeledDensity, LEAK_THRESHOLD};
use crate::error::{Error, Result};
use crate::grid::{integrate, normalize, Grid2D, GridSpec};
use crate::vicinity::VicinityKernel;

fn check_fits(spec: &GridSpec, k: &VicinityKernel) -> Result<()> {
    let ks = k.kernel.spec();
    if ks.nx > spec.nx || ks.ny > spec.ny {
        return Err(Error::KernelTooLarge {
            kx: ks.nx,
            ky: ks.ny,
            nx: spec.nx,
            ny: spec.ny,
        });
    }
    Ok(())
}

/// Smallest 2·3·5-smooth integer ≥ n.
fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Kernel spectrum prepared for one grid shape, reusable across grids of
/// that shape.
struct FftConvolver {
    spec: GridSpec,
    half: (usize, usize),
    px: usize,
    py: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl FftConvolver {
    fn new(spec: &GridSpec, k: &VicinityKernel) -> Result<Self> {
        check_fits(spec, k)?;
        let ks = *k.kernel.spec();
        let px = fast_len(spec.nx + ks.nx - 1);
        let py = fast_len(spec.ny + ks.ny - 1);
        let mut planner = FftPlanner::<f64>::new();
        let mut conv = Self {
            spec: *spec,
            half: k.half_widths(),
            px,
            py,
            row_fwd: planner.plan_fft_forward(px),
            row_inv: planner.plan_fft_inverse(px),
            col_fwd: planner.plan_fft_forward(py),
            col_inv: planner.plan_fft_inverse(py),
            kernel_hat: Vec::new(),
        };
        // Fold the cell area into the kernel so the product is a quadrature.
        let area = spec.cell_area();
        conv.kernel_hat = conv.forward(k.kernel.values(), ks.nx, ks.ny, area);
        Ok(conv)
    }

    /// Zero-padded forward transform; the result is stored column-major
    /// (`py` contiguous entries per frequency column).
    fn forward(&self, values: &[f64], nx: usize, ny: usize, scale: f64) -> Vec<Complex64> {
        let (px, py) = (self.px, self.py);
        let mut rows = vec![Complex64::new(0.0, 0.0); px * py];
        for j in 0..ny {
            for i in 0..nx {
                rows[j * px + i] = Complex64::new(values[j * nx + i] * scale, 0.0);
            }
        }
        for row in rows.chunks_mut(px).take(ny) {
            self.row_fwd.process(row);
        }
        let mut cols = transpose(&rows, px, py);
        for col in cols.chunks_mut(py) {
            self.col_fwd.process(col);
        }
        cols
    }

    fn convolve(&self, g: &Grid2D) -> Grid2D {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let (px, py) = (self.px, self.py);
        let mut spectrum = self.forward(g.values(), nx, ny, 1.0);
        for (s, k) in spectrum.iter_mut().zip(&self.kernel_hat) {
            *s *= k;
        }
        for col in spectrum.chunks_mut(py) {
            self.col_inv.process(col);
        }
        let mut rows = transpose(&spectrum, py, px);
        let (hx, hy) = self.half;
        let norm = 1.0 / (px * py) as f64;
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let row = &mut rows[(j + hy) * px..(j + hy + 1) * px];
            self.row_inv.process(row);
            out.extend(row[hx..hx + nx].iter().map(|c| (c.re * norm).max(0.0)));
        }
        Grid2D::from_values_unchecked(self.spec, out)
    }
}

/// `src` is `rows` rows of `cols` entries; returns `cols` rows of `rows`.
fn transpose(src: &[Complex64], cols: usize, rows: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    const BLOCK: usize = 32;
    for jb in (0..rows).step_by(BLOCK) {
        for ib in (0..cols).step_by(BLOCK) {
            for j in jb..(jb + BLOCK).min(rows) {
                for i in ib..(ib + BLOCK).min(cols) {
                    dst[i * rows + j] = src[j * cols + i];
                }
            }
        }
    }
    dst
}

/// `(g * v)` on `g`'s grid via zero-padded FFT. Negative round-off is
/// clamped to zero; mass within a kernel half-width of the edge leaks out.
pub fn convolve_fft(g: &Grid2D, k: &VicinityKernel) -> Result<Grid2D> {
    check_fits(g.spec(), k)?;
    if k.is_delta() {
        return Ok(g.clone());
    }
    Ok(FftConvolver::new(g.spec(), k)?.convolve(g))
}

/// Direct O(n·m) evaluation of the same convolution as [`convolve_fft`].
pub fn convolve_direct(g: &Grid2D, k: &VicinityKernel) -> Result<Grid2D> {
    let spec = *g.spec();
    check_fits(&spec, k)?;
    let (hx, hy) = k.half_widths();
    let (hx, hy) = (hx as isize, hy as isize);
    let area = spec.cell_area();
    let (nx, ny) = (spec.nx as isize, spec.ny as isize);
    let mut out = vec![0.0; spec.len()];
    for j in 0..ny {
        for i in 0..nx {
            let mut acc = 0.0;
            for mj in -hy..=hy {
                let sj = j - mj;
                if sj < 0 || sj >= ny {
                    continue;
                }
                for mi in -hx..=hx {
                    let si = i - mi;
                    if si < 0 || si >= nx {
                        continue;
                    }
                    acc += g.get(si as usize, sj as usize) * k.at(mi, mj);
                }
            }
            out[(j * nx + i) as usize] = acc * area;
        }
    }
    Ok(Grid2D::from_values_unchecked(spec, out))
}

/// D′ = D * v: every conditional convolved with `k`, priors unchanged.
/// Returns the per-class mass lost past the grid edge, which must stay
/// below [`LEAK_THRESHOLD`]; the conditionals are renormalized after.
pub fn convolve_distribution_with_leaks(
    d: &LabeledDensity,
    k: &VicinityKernel,
) -> Result<(LabeledDensity, Vec<f64>)> {
    let spec = *d.spec();
    check_fits(&spec, k)?;
    if k.is_delta() {
        return Ok((d.clone(), vec![0.0; d.num_classes()]));
    }
    let conv = FftConvolver::new(&spec, k)?;
    let mut conditionals = Vec::with_capacity(d.num_classes());
    let mut leaks = Vec::with_capacity(d.num_classes());
    for (class, p) in d.conditionals().iter().enumerate() {
        let mass_in = integrate(p);
        if mass_in == 0.0 {
            conditionals.push(p.clone());
            leaks.push(0.0);
            continue;
        }
        let q = conv.convolve(p);
        let leak = (mass_in - integrate(&q)) / mass_in;
        if leak > LEAK_THRESHOLD {
            return Err(Error::Leak {
                class,
                leak,
                threshold: LEAK_THRESHOLD,
            });
        }
        leaks.push(leak);
        conditionals.push(normalize(&q)?);
    }
    Ok((
        LabeledDensity::new(d.priors().to_vec(), conditionals)?,
        leaks,
    ))
}

pub fn convolve_distribution(d: &LabeledDensity, k: &VicinityKernel) -> Result<LabeledDensity> {
    Ok(convolve_distribution_with_leaks(d, k)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vicinity::{build_kernel, Norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_rel_diff(a: &Grid2D, b: &Grid2D) -> f64 {
        let scale = a.max_value().abs().max(b.max_value().abs());
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(fast_len(1), 1);
        assert_eq!(fast_len(7), 8);
        assert_eq!(fast_len(542), 576);
        assert_eq!(fast_len(97), 100);
    }

    #[test]
    fn delta_kernel_is_identity() {
        let spec = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 16, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Grid2D::from_values(spec, (0..spec.len()).map(|_| rng.random::<f64>()).collect())
            .unwrap();
        let k = build_kernel(Norm::LInf, 0.0, (spec.dx, spec.dy)).unwrap();
        assert_eq!(convolve_fft(&g, &k).unwrap(), g);
        assert!(max_rel_diff(&convolve_direct(&g, &k).unwrap(), &g) < 1e-12);
    }

    #[test]
    fn impulse_response() {
        let spec = GridSpec::new(-1.5, -1.5, 1.0, 1.0, 3, 3).unwrap();
        let mut v = vec![0.0; 9];
        v[4] = 1.0; // unit mass at the center cell
        let g = Grid2D::from_values(spec, v).unwrap();
        let k = build_kernel(Norm::LInf, 1.0, (1.0, 1.0)).unwrap();
        for out in [
            convolve_fft(&g, &k).unwrap(),
            convolve_direct(&g, &k).unwrap(),
        ] {
            for &c in out.values() {
                assert!((c - 1.0 / 9.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_interior_is_preserved() {
        let spec = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 20, 20).unwrap();
        let g = Grid2D::constant(spec, 2.5);
        let k = build_kernel(Norm::L2, 0.12, (spec.dx, spec.dy)).unwrap();
        let out = convolve_direct(&g, &k).unwrap();
        let (hx, hy) = k.half_widths();
        for j in hy..spec.ny - hy {
            for i in hx..spec.nx - hx {
                assert!((out.get(i, j) - 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_matches_direct_on_random_grid() {
        let spec = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 64, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Grid2D::from_values(spec, (0..spec.len()).map(|_| rng.random::<f64>()).collect())
            .unwrap();
        for norm in [Norm::LInf, Norm::L2] {
            let k = build_kernel(norm, 5.0 * spec.dx, (spec.dx, spec.dy)).unwrap();
            let a = convolve_fft(&g, &k).unwrap();
            let b = convolve_direct(&g, &k).unwrap();
            assert!(max_rel_diff(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn kernel_larger_than_grid() {
        let spec = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let g = Grid2D::constant(spec, 1.0);
        let k = build_kernel(Norm::LInf, 0.9, (spec.dx, spec.dy)).unwrap();
        assert!(matches!(
            convolve_fft(&g, &k),
            Err(Error::KernelTooLarge { .. })
        ));
        assert!(matches!(
            convolve_direct(&g, &k),
            Err(Error::KernelTooLarge { .. })
        ));
    }

    #[test]
    fn distribution_leak_is_an_error() {
        let spec = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 40, 40).unwrap();
        let edge = crate::density::make_uniform_patches(
            &[0.5, 0.5],
            &[
                crate::density::Rect::new(0.0, 0.2, 0.0, 1.0),
                crate::density::Rect::new(0.4, 0.6, 0.4, 0.6),
            ],
            &spec,
        )
        .unwrap();
        let k = build_kernel(Norm::LInf, 0.1, (spec.dx, spec.dy)).unwrap();
        assert!(matches!(
            convolve_distribution(&edge, &k),
            Err(Error::Leak { class: 0, .. })
        ));
    }

    #[test]
    fn zero_radius_distribution_is_unchanged() {
        let d = crate::density::overlapping_squares();
        let k = build_kernel(Norm::LInf, 0.0, (d.spec().dx, d.spec().dy)).unwrap();
        assert_eq!(convolve_distribution(&d, &k).unwrap(), d);
    }
}
