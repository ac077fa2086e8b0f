//! Rectangular 2-D grids holding densities, posteriors and masks.
//!
//! A cell stores the field evaluated at its center, so every integral here
//! is a midpoint rule: `Σ values · dx · dy`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Placement and resolution of a grid. Cell `(i, j)` has its center at
/// `(x0 + (i + ½)·dx, y0 + (j + ½)·dy)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, y0: f64, dx: f64, dy: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::param("dx", format!("must be positive, got {dx}")));
        }
        if !(dy > 0.0 && dy.is_finite()) {
            return Err(Error::param("dy", format!("must be positive, got {dy}")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::param(
                "nx,ny",
                format!("must be >= 1, got {nx}x{ny}"),
            ));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(Error::param("x0,y0", "must be finite"));
        }
        Ok(Self {
            x0,
            y0,
            dx,
            dy,
            nx,
            ny,
        })
    }

    /// Grid covering `[x_min, x_max] × [y_min, y_max]` with `nx × ny` cells.
    pub fn covering(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::param(
                "nx,ny",
                format!("must be >= 1, got {nx}x{ny}"),
            ));
        }
        Self::new(
            x_min,
            y_min,
            (x_max - x_min) / nx as f64,
            (y_max - y_min) / ny as f64,
            nx,
            ny,
        )
    }

    /// Parses `x0,y0,dx,dy,nx,ny`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(Error::param(
                "grid",
                format!("expected x0,y0,dx,dy,nx,ny, got `{s}`"),
            ));
        }
        let float = |k: usize| -> Result<f64> {
            parts[k]
                .parse::<f64>()
                .map_err(|_| Error::param("grid", format!("`{}` is not a number", parts[k])))
        };
        let count = |k: usize| -> Result<usize> {
            parts[k]
                .parse::<usize>()
                .map_err(|_| Error::param("grid", format!("`{}` is not a cell count", parts[k])))
        };
        Self::new(
            float(0)?,
            float(1)?,
            float(2)?,
            float(3)?,
            count(4)?,
            count(5)?,
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.nx as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + self.ny as f64 * self.dy
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.dx,
            self.y0 + (j as f64 + 0.5) * self.dy,
        )
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Cell containing `(x, y)`, or `None` outside the grid.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = ((x - self.x0) / self.dx).floor();
        let fj = ((y - self.y0) / self.dy).floor();
        if fi < 0.0 || fj < 0.0 || !fi.is_finite() || !fj.is_finite() {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    pub fn resolution_label(&self) -> String {
        format!("{}x{}", self.nx, self.ny)
    }

    pub fn to_csv_field(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.x0, self.y0, self.dx, self.dy, self.nx, self.ny
        )
    }
}

/// Scalar field on a [`GridSpec`], stored row-major with `y` as the slow axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    spec: GridSpec,
    values: Vec<f64>,
}

impl Grid2D {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::param(
                "values",
                format!("expected {} cells, got {}", spec.len(), values.len()),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite cell value {v}")));
        }
        Ok(Self { spec, values })
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub(crate) fn from_values_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    /// Value of the cell containing `(x, y)`; `None` outside the grid.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        self.spec
            .locate(x, y)
            .map(|(i, j)| self.values[self.spec.index(i, j)])
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid2D {
        Grid2D {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Grid2D {
        self.map(|v| v * factor)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Grid2D, b: f64) -> Result<Grid2D> {
        ensure_compatible(&self.spec, &other.spec)?;
        Ok(Grid2D {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&u, &v)| a * u + b * v)
                .collect(),
        })
    }

    pub fn write_csv(&self, path: &Path, provenance: Option<&str>) -> Result<()> {
        fs::write(path, self.to_csv(provenance)).map_err(|e| Error::io(path, e))
    }

    pub fn to_csv(&self, provenance: Option<&str>) -> String {
        let mut out = String::with_capacity(self.values.len() * 12);
        if let Some(p) = provenance {
            out.push_str(p);
            out.push('\n');
        }
        let _ = writeln!(out, "# {}", self.spec.to_csv_field());
        for row in self.values.chunks(self.spec.nx) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:e}");
            }
            out.push('\n');
        }
        out
    }

    /// Reads the layout written by [`Grid2D::write_csv`]. Comment lines other
    /// than the `# x0,y0,dx,dy,nx,ny` header are ignored.
    pub fn read_csv(path: &Path) -> Result<Grid2D> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let mut spec = None;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Ok(s) = GridSpec::parse(comment.trim()) {
                    spec = Some(s);
                }
                continue;
            }
            let Some(s) = spec else {
                return Err(parse_err(lineno + 1, "data before grid header".into()));
            };
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| parse_err(lineno + 1, e.to_string()))?;
            if row.len() != s.nx {
                return Err(parse_err(
                    lineno + 1,
                    format!("expected {} values, got {}", s.nx, row.len()),
                ));
            }
            values.extend(row);
        }
        let spec =
            spec.ok_or_else(|| parse_err(1, "missing `# x0,y0,dx,dy,nx,ny` header".into()))?;
        Grid2D::from_values(spec, values).map_err(|e| parse_err(0, e.to_string()))
    }
}

pub(crate) fn ensure_compatible(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::IncompatibleGrids(format!(
            "{} vs {}",
            a.to_csv_field(),
            b.to_csv_field()
        )))
    }
}

/// Midpoint-rule integral of the grid.
pub fn integrate(g: &Grid2D) -> f64 {
    g.values.iter().sum::<f64>() * g.spec.cell_area()
}

/// Integral of `g` restricted to the cells where `mask` is nonzero.
pub fn integrate_masked(g: &Grid2D, mask: &Grid2D) -> Result<f64> {
    ensure_compatible(&g.spec, &mask.spec)?;
    let s: f64 = g
        .values
        .iter()
        .zip(&mask.values)
        .map(|(&v, &m)| v * m)
        .sum();
    Ok(s * g.spec.cell_area())
}

/// Rescales `g` to unit mass.
pub fn normalize(g: &Grid2D) -> Result<Grid2D> {
    let mass = integrate(g);
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::DegenerateDensity(format!(
            "cannot normalize a grid of mass {mass}"
        )));
    }
    Ok(g.scale(1.0 / mass))
}

pub fn pointwise_max(gs: &[Grid2D]) -> Result<Grid2D> {
    let (first, rest) = gs
        .split_first()
        .ok_or_else(|| Error::param("grids", "need at least one grid"))?;
    let mut out = first.clone();
    for g in rest {
        ensure_compatible(&first.spec, &g.spec)?;
        for (o, &v) in out.values.iter_mut().zip(&g.values) {
            *o = o.max(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_square(n: usize) -> GridSpec {
        GridSpec::covering(0.0, 1.0, 0.0, 1.0, n, n).unwrap()
    }

    #[test]
    fn constant_unit_square_integrates_to_one() {
        let g = Grid2D::constant(unit_square(10), 1.0);
        assert!((integrate(&g) - 1.0).abs() < 1e-12);
        assert_eq!(integrate(&Grid2D::zeros(unit_square(10))), 0.0);
    }

    #[test]
    fn gaussian_mass_is_one() {
        let spec = GridSpec::covering(-6.0, 6.0, -6.0, 6.0, 256, 256).unwrap();
        let mut v = Vec::with_capacity(spec.len());
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let (x, y) = spec.center(i, j);
                v.push((-(x * x + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI));
            }
        }
        let g = Grid2D::from_values(spec, v).unwrap();
        assert!((integrate(&g) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn masked_integrals() {
        let spec = unit_square(10);
        let g = Grid2D::constant(spec, 1.0);
        let ones = Grid2D::constant(spec, 1.0);
        assert!((integrate_masked(&g, &ones).unwrap() - integrate(&g)).abs() < 1e-15);
        assert_eq!(integrate_masked(&g, &Grid2D::zeros(spec)).unwrap(), 0.0);
        let left = Grid2D::from_values(
            spec,
            (0..spec.len())
                .map(|k| if k % spec.nx < 5 { 1.0 } else { 0.0 })
                .collect(),
        )
        .unwrap();
        assert!((integrate_masked(&g, &left).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn masked_rejects_mismatched_spec() {
        let g = Grid2D::constant(unit_square(10), 1.0);
        let m = Grid2D::constant(unit_square(11), 1.0);
        assert!(matches!(
            integrate_masked(&g, &m),
            Err(Error::IncompatibleGrids(_))
        ));
    }

    #[test]
    fn normalize_cases() {
        let g = normalize(&Grid2D::constant(unit_square(8), 2.0)).unwrap();
        assert!(g.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let again = normalize(&g).unwrap();
        assert!(again
            .values()
            .iter()
            .zip(g.values())
            .all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(matches!(
            normalize(&Grid2D::zeros(unit_square(4))),
            Err(Error::DegenerateDensity(_))
        ));
    }

    #[test]
    fn pointwise_max_cases() {
        let spec = unit_square(4);
        let a = Grid2D::constant(spec, 0.3);
        let b = Grid2D::constant(spec, 0.7);
        assert_eq!(pointwise_max(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(pointwise_max(&[a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(pointwise_max(&[a.clone(), b.clone()]).unwrap(), b);
        assert!(pointwise_max(&[]).is_err());
        assert!(pointwise_max(&[a, Grid2D::zeros(unit_square(5))]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = GridSpec::new(-1.0, 0.5, 0.25, 0.125, 3, 2).unwrap();
        let g = Grid2D::from_values(spec, vec![0.0, 1.5, 2.0, 3.25e-7, 4.0, 1e300]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        g.write_csv(&path, Some("# robust-bound test")).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("# -1,0.5,0.25,0.125,3,2"));
        assert_eq!(Grid2D::read_csv(&path).unwrap(), g);
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(0.0, 0.0, 0.0, 1.0, 1, 1).is_err());
        assert!(GridSpec::new(0.0, 0.0, 1.0, 1.0, 0, 1).is_err());
        assert!(GridSpec::parse("0,0,0.1,0.1,10").is_err());
        let s = GridSpec::parse("-2, -1.75, 0.01, 0.02, 500, 200").unwrap();
        assert_eq!(s.nx, 500);
        assert_eq!(s.locate(-2.0 + 0.015, -1.75 + 0.001), Some((1, 0)));
        assert_eq!(s.locate(-3.0, 0.0), None);
    }

    fn random_grid(n: usize) -> impl Strategy<Value = Grid2D> {
        prop::collection::vec(0.0f64..10.0, n * n)
            .prop_map(move |v| Grid2D::from_values(unit_square(n), v).unwrap())
    }

    proptest! {
        #[test]
        fn integrate_is_linear(g1 in random_grid(8), g2 in random_grid(8), a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let lhs = integrate(&g1.axpby(a, &g2, b).unwrap());
            let rhs = a * integrate(&g1) + b * integrate(&g2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn mask_and_complement_partition(g in random_grid(8), bits in prop::collection::vec(any::<bool>(), 64)) {
            let spec = *g.spec();
            let m = Grid2D::from_values(spec, bits.iter().map(|&b| b as u8 as f64).collect()).unwrap();
            let c = m.map(|v| 1.0 - v);
            let total = integrate(&g);
            let split = integrate_masked(&g, &m).unwrap() + integrate_masked(&g, &c).unwrap();
            prop_assert!((split - total).abs() <= 1e-12 * total.max(1e-300));
        }

        #[test]
        fn normalize_gives_unit_mass(g in random_grid(32)) {
            prop_assume!(integrate(&g) > 0.0);
            let n = normalize(&g).unwrap();
            prop_assert!((integrate(&n) - 1.0).abs() < 1e-12);
            let nn = normalize(&n).unwrap();
            for (a, b) in n.values().iter().zip(nn.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }
}
