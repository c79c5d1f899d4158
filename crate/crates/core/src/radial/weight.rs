use super::diff::{self, d1_stencil, d2_stencil};
use super::grid::Grid;
use super::profile::{Profile, Term};
use crate::error::{LabError, Result};

/// Closed-form weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Canonical {
    FubiniStudy,
    Football(f64),
    DivisorBackground,
    Affine(f64, f64),
}

/// A weight on the line: closed-form reference profile plus sampled
/// remainder, with asymptotic slopes `a-`, `a+`.
///
/// The remainder of an admissible weight tends to constants at both ends;
/// weights read from text carry no reference and explicit slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialWeight {
    grid: Grid,
    reference: Profile,
    remainder: Vec<f64>,
    slope_minus: f64,
    slope_plus: f64,
    /// Magnitude of the terms the remainder was computed from, when
    /// cancellation makes it exceed the remainder itself.
    noise: f64,
}

impl RadialWeight {
    pub fn canonical(kind: Canonical, grid: Grid) -> Result<Self> {
        let term = match kind {
            Canonical::FubiniStudy | Canonical::DivisorBackground => Term::LogCosh {
                amp: 1.0,
                rate: 1.0,
                shift: 0.0,
            },
            Canonical::Football(beta) => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(LabError::OutOfRange(format!(
                        "cone angle beta = {beta} must lie in (0, 1)"
                    )));
                }
                Term::LogCosh {
                    amp: beta,
                    rate: beta,
                    shift: 0.0,
                }
            }
            Canonical::Affine(a, b) => Term::Affine {
                slope: a,
                offset: b,
            },
        };
        Ok(Self::from_profile(grid, Profile::new(vec![term])))
    }

    pub fn fubini_study(grid: Grid) -> Self {
        Self::from_profile(grid, Profile::new(vec![Term::LogCosh { amp: 1.0, rate: 1.0, shift: 0.0 }]))
    }

    pub fn football(beta: f64, grid: Grid) -> Result<Self> {
        Self::canonical(Canonical::Football(beta), grid)
    }

    /// `c * psi_0`, the background weight scaled by `c`.
    pub fn scaled_background(c: f64, grid: Grid) -> Self {
        Self::from_profile(grid, Profile::new(vec![Term::LogCosh { amp: c, rate: 1.0, shift: 0.0 }]))
    }

    pub fn from_profile(grid: Grid, reference: Profile) -> Self {
        let (slope_minus, slope_plus) = reference.slopes();
        Self {
            grid,
            reference,
            remainder: vec![0.0; grid.len()],
            slope_minus,
            slope_plus,
            noise: 0.0,
        }
    }

    /// Reference profile plus a remainder that must flatten out at both ends.
    pub fn with_remainder(grid: Grid, reference: Profile, remainder: Vec<f64>) -> Result<Self> {
        if remainder.len() != grid.len() {
            return Err(LabError::InvalidInput(format!(
                "{} remainder samples for a {}-node grid",
                remainder.len(),
                grid.len()
            )));
        }
        let (slope_minus, slope_plus) = reference.slopes();
        Ok(Self {
            grid,
            reference,
            remainder,
            slope_minus,
            slope_plus,
            noise: 0.0,
        })
    }

    /// Same reference and slopes, new remainder.
    pub fn with_new_remainder(&self, remainder: Vec<f64>) -> RadialWeight {
        assert_eq!(remainder.len(), self.grid.len());
        RadialWeight {
            remainder,
            ..self.clone()
        }
    }

    /// Reference, remainder, and slopes given explicitly.
    pub fn from_parts(grid: Grid, reference: Profile, remainder: Vec<f64>, slope_minus: f64, slope_plus: f64) -> Result<Self> {
        let mut w = Self::from_samples(grid, remainder, slope_minus, slope_plus)?;
        w.reference = reference;
        Ok(w)
    }

    /// Declares the magnitude of the terms that cancelled into the remainder;
    /// it raises the curvature floor accordingly.
    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise.abs();
        self
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Raw samples with declared asymptotic slopes.
    pub fn from_samples(grid: Grid, samples: Vec<f64>, slope_minus: f64, slope_plus: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(LabError::InvalidInput(format!(
                "{} samples for a {}-node grid",
                samples.len(),
                grid.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) || !slope_minus.is_finite() || !slope_plus.is_finite() {
            return Err(LabError::InvalidInput("non-finite sample or slope".into()));
        }
        Ok(Self {
            grid,
            reference: Profile::zero(),
            remainder: samples,
            slope_minus,
            slope_plus,
            noise: 0.0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn reference(&self) -> &Profile {
        &self.reference
    }

    pub fn remainder(&self) -> &[f64] {
        &self.remainder
    }

    pub fn slopes(&self) -> (f64, f64) {
        (self.slope_minus, self.slope_plus)
    }

    pub fn degree(&self) -> f64 {
        self.slope_plus - self.slope_minus
    }

    pub fn value(&self, i: usize) -> f64 {
        self.reference.value(self.grid.x(i)) + self.remainder[i]
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.value(i)).collect()
    }

    pub fn first_derivative(&self) -> Vec<f64> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        (0..n)
            .map(|i| self.reference.slope(self.grid.x(i)) + d1_stencil(i, n).apply(&self.remainder) / h)
            .collect()
    }

    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.grid.len();
        let s = 1.0 / (self.grid.spacing() * self.grid.spacing());
        (0..n)
            .map(|i| self.reference.curvature(self.grid.x(i)) + d2_stencil(i, n).apply(&self.remainder) * s)
            .collect()
    }

    /// `a+ - w'` at node `i`, keeping relative precision in the tail.
    pub fn deficit_plus(&self, i: usize) -> f64 {
        let n = self.grid.len();
        let x = self.grid.x(i);
        (self.slope_plus - self.reference.slopes().1) + self.reference.deficit_plus(x)
            - d1_stencil(i, n).apply(&self.remainder) / self.grid.spacing()
    }

    /// `w' - a-` at node `i`.
    pub fn deficit_minus(&self, i: usize) -> f64 {
        let n = self.grid.len();
        let x = self.grid.x(i);
        (self.reference.slopes().0 - self.slope_minus)
            + self.reference.deficit_minus(x)
            + d1_stencil(i, n).apply(&self.remainder) / self.grid.spacing()
    }

    /// `(b-, b+)` with `w(x) ~ a± x + b±` beyond the grid.
    pub fn tail_offsets(&self) -> (f64, f64) {
        let n = self.grid.len();
        let r = self.grid.x_max();
        (
            self.value(0) - self.slope_minus * self.grid.x(0),
            self.value(n - 1) - self.slope_plus * r,
        )
    }

    /// Rounding-noise level of `second_derivative`: zero for purely
    /// closed-form weights, otherwise set by the size of the samples or the
    /// declared noise, whichever is larger.
    pub fn curvature_floor(&self) -> f64 {
        if self.noise == 0.0 && self.remainder.iter().all(|&r| r == 0.0) {
            return 0.0;
        }
        let h = self.grid.spacing();
        // the reference is exact; only the sampled remainder is differenced
        let scale = self.remainder.iter().fold(self.noise, |m, r| m.max(r.abs()));
        64.0 * f64::EPSILON * scale / (h * h)
    }

    /// Nodes where the curvature sits above the rounding floor.
    pub fn resolved_nodes(&self) -> Vec<bool> {
        let floor = self.curvature_floor();
        self.second_derivative().iter().map(|&c| c > 4.0 * floor).collect()
    }

    /// Convexity up to rounding noise; `strict` demands positive curvature.
    pub fn check_convex(&self, strict: bool) -> Result<()> {
        let floor = self.curvature_floor();
        let c = self.second_derivative();
        let bad: Vec<usize> = c
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.is_nan() || if strict { v <= 0.0 } else { v < -floor })
            .map(|(i, _)| i)
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(LabError::NotConvex { nodes: bad })
        }
    }

    fn same_grid(&self, other: &RadialWeight) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(LabError::GridMismatch)
        }
    }

    pub fn plus(&self, other: &RadialWeight) -> Result<RadialWeight> {
        self.same_grid(other)?;
        Ok(RadialWeight {
            grid: self.grid,
            reference: self.reference.plus(&other.reference),
            remainder: self.remainder.iter().zip(&other.remainder).map(|(a, b)| a + b).collect(),
            slope_minus: self.slope_minus + other.slope_minus,
            slope_plus: self.slope_plus + other.slope_plus,
            noise: self.noise + other.noise,
        })
    }

    pub fn minus(&self, other: &RadialWeight) -> Result<RadialWeight> {
        self.plus(&other.scaled(-1.0))
    }

    pub fn scaled(&self, c: f64) -> RadialWeight {
        RadialWeight {
            grid: self.grid,
            reference: self.reference.scaled(c),
            remainder: self.remainder.iter().map(|r| c * r).collect(),
            slope_minus: c * self.slope_minus,
            slope_plus: c * self.slope_plus,
            noise: c.abs() * self.noise,
        }
    }

    /// `w + c`, carried exactly in the reference.
    pub fn add_constant(&self, c: f64) -> RadialWeight {
        let mut out = self.clone();
        out.reference = self.reference.plus(&Profile::new(vec![Term::Affine { slope: 0.0, offset: c }]));
        out
    }

    /// `w + v` for a sampled perturbation `v` that is flat at both ends.
    pub fn perturbed(&self, v: &[f64]) -> Result<RadialWeight> {
        if v.len() != self.grid.len() {
            return Err(LabError::InvalidInput("perturbation length does not match grid".into()));
        }
        let mut out = self.clone();
        for (r, d) in out.remainder.iter_mut().zip(v) {
            *r += d;
        }
        Ok(out)
    }

    /// Value at an arbitrary point, continuing affinely beyond the grid.
    pub fn eval(&self, x: f64) -> f64 {
        self.reference.value(x) + self.remainder_at(x)
    }

    fn remainder_at(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let r = self.grid.x_max();
        if x > r {
            self.value(n - 1) + self.slope_plus * (x - r) - self.reference.value(x)
        } else if x < -r {
            self.value(0) + self.slope_minus * (x + r) - self.reference.value(x)
        } else if self.remainder.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            diff::interpolate(&self.remainder, -r, self.grid.spacing(), x)
        }
    }

    /// `x -> w(x - a)`: exact on the reference, interpolated on the remainder.
    pub fn translated(&self, a: f64) -> RadialWeight {
        let remainder = if self.remainder.iter().all(|&v| v == 0.0) {
            self.remainder.clone()
        } else {
            (0..self.grid.len())
                .map(|i| {
                    let x = self.grid.x(i);
                    self.eval(x - a) - self.reference.value(x - a)
                })
                .collect()
        };
        RadialWeight {
            grid: self.grid,
            reference: self.reference.translated(a),
            remainder,
            slope_minus: self.slope_minus,
            slope_plus: self.slope_plus,
            noise: self.noise,
        }
    }

    /// Text table `# x w`, one `x<TAB>w` row per node, slope trailer.
    pub fn to_table(&self) -> String {
        let mut out = String::with_capacity(48 * self.grid.len());
        out.push_str("# x w\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{:.16e}\t{:.16e}\n", self.grid.x(i), self.value(i)));
        }
        out.push_str(&format!("# slope_minus={:.16e}\n", self.slope_minus));
        out.push_str(&format!("# slope_plus={:.16e}\n", self.slope_plus));
        out
    }

    pub fn from_table(text: &str) -> Result<RadialWeight> {
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        let mut slope_minus = None;
        let mut slope_plus = None;
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| LabError::Parse(format!("bad number {s:?}: {e}")))
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line == "# x w" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("slope_minus=") {
                    slope_minus = Some(num(v)?);
                } else if let Some(v) = rest.strip_prefix("slope_plus=") {
                    slope_plus = Some(num(v)?);
                }
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(x), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(LabError::Parse(format!("expected `x<TAB>w`, got {line:?}")));
            };
            xs.push(num(x)?);
            ws.push(num(w)?);
        }
        let (Some(a), Some(b)) = (slope_minus, slope_plus) else {
            return Err(LabError::Parse("missing slope trailer".into()));
        };
        let n = xs.len();
        if n == 0 {
            return Err(LabError::Parse("empty table".into()));
        }
        let grid = Grid::new(xs[n - 1], n)?;
        for (i, &x) in xs.iter().enumerate() {
            if x != grid.x(i) {
                return Err(LabError::Parse(format!("node {i} at {x} is off the uniform grid")));
            }
        }
        RadialWeight::from_samples(grid, ws, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(40.0, 4097).unwrap()
    }

    #[test]
    fn canonical_values() {
        let fs = RadialWeight::canonical(Canonical::FubiniStudy, grid()).unwrap();
        assert!((fs.value(2048) - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        let fb = RadialWeight::football(0.5, grid()).unwrap();
        assert_eq!(fb.slopes(), (-0.5, 0.5));
        assert_eq!(fb.degree(), 1.0);
        assert!(RadialWeight::football(1.0, grid()).is_err());
        assert!(RadialWeight::football(0.0, grid()).is_err());
        let aff = RadialWeight::canonical(Canonical::Affine(2.0, -1.0), grid()).unwrap();
        assert!((aff.value(4096) - 79.0).abs() < 1e-12);
    }

    #[test]
    fn football_tends_to_fubini_study() {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let near = RadialWeight::football(1.0 - 1e-9, g).unwrap();
        for i in (0..g.len()).step_by(97) {
            assert!((fs.value(i) - near.value(i)).abs() < 1e-7);
        }
    }

    #[test]
    fn tail_offsets_of_fubini_study_vanish() {
        let (bm, bp) = RadialWeight::fubini_study(grid()).tail_offsets();
        assert!(bm.abs() < 1e-15 && bp.abs() < 1e-15);
    }

    #[test]
    fn sampled_and_closed_form_curvature_agree() {
        let g = Grid::new(20.0, 801).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let raw = RadialWeight::from_samples(g, fs.samples(), -1.0, 1.0).unwrap();
        let a = fs.second_derivative();
        let b = raw.second_derivative();
        for i in 1..g.len() - 1 {
            assert!((a[i] - b[i]).abs() < 1e-8, "{i}");
        }
        assert!(raw.curvature_floor() > 0.0);
        assert_eq!(fs.curvature_floor(), 0.0);
    }

    #[test]
    fn translation_of_raw_samples_is_accurate() {
        let g = Grid::new(20.0, 801).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let raw = RadialWeight::from_samples(g, fs.samples(), -1.0, 1.0).unwrap();
        let moved = raw.translated(1.3);
        let exact = fs.translated(1.3);
        for i in 0..g.len() {
            assert!((moved.value(i) - exact.value(i)).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn table_round_trip_is_bit_exact() {
        let g = Grid::new(12.5, 129).unwrap();
        let w = RadialWeight::football(0.3, g).unwrap().add_constant(0.1);
        let text = w.to_table();
        let back = RadialWeight::from_table(&text).unwrap();
        assert_eq!(back.samples(), w.samples());
        assert_eq!(back.slopes(), w.slopes());
        assert_eq!(back.to_table(), text);
        assert!(RadialWeight::from_table("# x w\n1\t2\n").is_err());
    }

    #[test]
    fn convexity_check_lists_nodes() {
        let g = Grid::new(10.0, 129).unwrap();
        let samples = g.sample(|x| -(x * x));
        let w = RadialWeight::from_samples(g, samples, 0.0, 0.0).unwrap();
        match w.check_convex(false) {
            Err(LabError::NotConvex { nodes }) => assert_eq!(nodes.len(), 129),
            other => panic!("{other:?}"),
        }
    }
}
