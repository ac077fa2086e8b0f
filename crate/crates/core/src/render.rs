//! SVG heatmaps of gridded values.

use std::fmt::Write as _;

use crate::bounds::fmt_sig9;
use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorScale {
    pub vmin: f64,
    pub vmax: f64,
    /// Value mapped to white.
    pub center: f64,
}

impl ColorScale {
    /// Symmetric around 0 when the grid has negative values, otherwise
    /// `[0, max]` centered at its midpoint.
    pub fn auto(grid: &Grid2D) -> Self {
        let (lo, hi) = (grid.min_value(), grid.max_value());
        if lo < 0.0 {
            let m = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            Self {
                vmin: -m,
                vmax: m,
                center: 0.0,
            }
        } else {
            let hi = hi.max(f64::MIN_POSITIVE);
            Self {
                vmin: 0.0,
                vmax: hi,
                center: hi / 2.0,
            }
        }
    }

    pub fn new(vmin: f64, vmax: f64) -> Result<Self> {
        if !(vmin < vmax && vmin.is_finite() && vmax.is_finite()) {
            return Err(Error::param(
                "vmin/vmax",
                format!("need finite vmin < vmax, got {vmin}, {vmax}"),
            ));
        }
        Ok(Self {
            vmin,
            vmax,
            center: 0.5 * (vmin + vmax),
        })
    }

    /// Blue → white → red.
    pub fn color(&self, v: f64) -> [u8; 3] {
        let t = if v <= self.center {
            -((self.center - v) / (self.center - self.vmin)).min(1.0)
        } else {
            ((v - self.center) / (self.vmax - self.center)).min(1.0)
        };
        let fade = |c: f64, a: f64| (255.0 + (c - 255.0) * a).round() as u8;
        if t < 0.0 {
            let a = -t;
            [fade(33.0, a), fade(102.0, a), fade(172.0, a)]
        } else {
            [fade(178.0, t), fade(24.0, t), fade(43.0, t)]
        }
    }
}

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub scale: Option<ColorScale>,
    /// Grids wider or taller than this are block-averaged down to it.
    pub max_cells: usize,
    /// Side length of a rendered cell in SVG units.
    pub cell_px: f64,
    pub title: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            scale: None,
            max_cells: 256,
            cell_px: 2.0,
            title: None,
        }
    }
}

fn downsample(grid: &Grid2D, max_cells: usize) -> (usize, usize, Vec<f64>) {
    let spec = grid.spec();
    let fx = spec.nx.div_ceil(max_cells.max(1));
    let fy = spec.ny.div_ceil(max_cells.max(1));
    let (nx, ny) = (spec.nx.div_ceil(fx), spec.ny.div_ceil(fy));
    let mut out = vec![0.0; nx * ny];
    let mut counts = vec![0u32; nx * ny];
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let c = (j / fy) * nx + i / fx;
            out[c] += grid.get(i, j);
            counts[c] += 1;
        }
    }
    for (v, n) in out.iter_mut().zip(counts) {
        *v /= n as f64;
    }
    (nx, ny, out)
}

/// Renders `grid` with rows flipped so that y increases upward. Runs of
/// equal color within a row become one rectangle.
pub fn render_svg(grid: &Grid2D, opts: &RenderOptions) -> String {
    let scale = opts.scale.unwrap_or_else(|| ColorScale::auto(grid));
    let (nx, ny, values) = downsample(grid, opts.max_cells);
    let px = opts.cell_px;
    let (w, h) = (nx as f64 * px, ny as f64 * px);
    let spec = grid.spec();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(
        s,
        r#"<metadata>colormap=diverging-blue-white-red vmin={} vmax={} center={} grid={} rendered={}x{}</metadata>"#,
        fmt_sig9(scale.vmin),
        fmt_sig9(scale.vmax),
        fmt_sig9(scale.center),
        spec.to_csv_field(),
        nx,
        ny
    );
    if let Some(t) = &opts.title {
        let escaped = t
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = writeln!(s, "<title>{escaped}</title>");
    }
    for j in 0..ny {
        let y = (ny - 1 - j) as f64 * px;
        let row = &values[j * nx..(j + 1) * nx];
        let mut i = 0;
        while i < nx {
            let c = scale.color(row[i]);
            let mut run = 1;
            while i + run < nx && scale.color(row[i + run]) == c {
                run += 1;
            }
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{y}" width="{}" height="{px}" fill="#{:02x}{:02x}{:02x}"/>"##,
                i as f64 * px,
                run as f64 * px,
                c[0],
                c[1],
                c[2]
            );
            i += run;
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn colormap_endpoints() {
        let sc = ColorScale::new(-1.0, 1.0).unwrap();
        assert_eq!(sc.color(0.0), [255, 255, 255]);
        assert_eq!(sc.color(-1.0), [33, 102, 172]);
        assert_eq!(sc.color(5.0), [178, 24, 43]);
        assert!(ColorScale::new(1.0, 1.0).is_err());
    }

    #[test]
    fn svg_structure_and_metadata() {
        let spec = GridSpec::new(0.0, 0.0, 1.0, 1.0, 3, 2).unwrap();
        let g = Grid2D::from_values(spec, vec![0.0, 0.0, 1.0, 2.0, 2.0, 2.0]).unwrap();
        let svg = render_svg(&g, &RenderOptions::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("vmin=0 vmax=2 center=1"));
        // row 0: two-cell run + one cell; row 1: one three-cell run
        assert_eq!(svg.matches("<rect").count(), 3);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn large_grids_are_downsampled() {
        let spec = GridSpec::new(0.0, 0.0, 1.0, 1.0, 600, 10).unwrap();
        let g = Grid2D::from_values(spec, (0..6000).map(|v| v as f64).collect()).unwrap();
        let svg = render_svg(&g, &RenderOptions::default());
        assert!(svg.contains("rendered=200x10"));
    }
}
