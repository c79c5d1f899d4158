//! Discrete paths of weights `s -> φ_s` on a uniform time grid.

use crate::einstein::TwisterSpec;
use crate::error::{LabError, Result};
use crate::radial::diff::first_derivative;
use crate::radial::{Grid, RadialWeight};

/// Weights at `s_j = j / (m - 1)`, all on one grid with common slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    times: Vec<f64>,
    weights: Vec<RadialWeight>,
}

pub fn time_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / (m - 1) as f64).collect()
}

impl GeodesicPath {
    pub fn new(weights: Vec<RadialWeight>) -> Result<Self> {
        if weights.len() < 3 {
            return Err(LabError::InvalidInput(format!(
                "a path needs at least 3 times, got {}",
                weights.len()
            )));
        }
        let g = *weights[0].grid();
        let slopes = weights[0].slopes();
        for w in &weights[1..] {
            if *w.grid() != g {
                return Err(LabError::GridMismatch);
            }
            if w.slopes() != slopes {
                let (a, b) = w.slopes();
                return Err(LabError::SlopeMismatch(slopes.0, slopes.1, a, b));
            }
        }
        Ok(Self {
            times: time_grid(weights.len()),
            weights,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[RadialWeight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> &Grid {
        self.weights[0].grid()
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    // Nodal combination Σ c_k φ_{start+k}.
    fn combine(&self, start: usize, coeffs: &[f64]) -> Vec<f64> {
        let g = self.grid();
        (0..g.len())
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * self.weights[start + k].value(i))
                    .sum()
            })
            .collect()
    }

    /// `∂_s φ` at time `j`: centered inside, one-sided second order at the ends.
    pub fn velocity(&self, j: usize) -> Vec<f64> {
        let m = self.len();
        let inv = 1.0 / self.step();
        let v = if j == 0 {
            self.combine(0, &[-1.5, 2.0, -0.5])
        } else if j == m - 1 {
            self.combine(m - 3, &[0.5, -2.0, 1.5])
        } else {
            self.combine(j - 1, &[-0.5, 0.0, 0.5])
        };
        v.into_iter().map(|x| x * inv).collect()
    }

    /// `∂_s² φ` at time `j`.
    pub fn acceleration(&self, j: usize) -> Vec<f64> {
        let m = self.len();
        let inv = 1.0 / (self.step() * self.step());
        let v = if j > 0 && j < m - 1 {
            self.combine(j - 1, &[1.0, -2.0, 1.0])
        } else if m == 3 {
            self.combine(0, &[1.0, -2.0, 1.0])
        } else if j == 0 {
            self.combine(0, &[2.0, -5.0, 4.0, -1.0])
        } else {
            self.combine(m - 4, &[-1.0, 4.0, -5.0, 2.0])
        };
        v.into_iter().map(|x| x * inv).collect()
    }
}

/// Geodesic defects `f = φ_ss - φ_sx²/φ_xx` and `f_τ = φ_ss - φ_sx²/τ_xx`,
/// per time and node. `resolved` marks nodes where the curvatures sit above
/// rounding noise; elsewhere the quotients are meaningless.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectField {
    pub times: Vec<f64>,
    pub f: Vec<Vec<f64>>,
    pub f_tau: Vec<Vec<f64>>,
    /// `f φ_xx = φ_ss φ_xx - φ_sx²`, free of divisions.
    pub f_ma: Vec<Vec<f64>>,
    pub resolved: Vec<Vec<bool>>,
}

impl DefectField {
    /// `sup |f|` over resolved nodes, all times.
    pub fn sup_f(&self) -> f64 {
        self.f
            .iter()
            .zip(&self.resolved)
            .flat_map(|(f, r)| f.iter().zip(r).filter(|(_, &ok)| ok).map(|(v, _)| v.abs()))
            .fold(0.0, f64::max)
    }
}

/// Errors when some `φ_s` has curvature below its rounding floor.
pub fn geodesic_defect(path: &GeodesicPath, tw: &TwisterSpec) -> Result<DefectField> {
    let g = *path.grid();
    if *tw.weight.grid() != g {
        return Err(LabError::GridMismatch);
    }
    let h = g.spacing();
    let m = path.len();
    let mut out = DefectField {
        times: path.times().to_vec(),
        f: Vec::with_capacity(m),
        f_tau: Vec::with_capacity(m),
        f_ma: Vec::with_capacity(m),
        resolved: Vec::with_capacity(m),
    };
    for j in 0..m {
        let phi = &path.weights()[j];
        let tau = phi.plus(&tw.weight)?;
        let pss = path.acceleration(j);
        let psx = first_derivative(&path.velocity(j), h);
        let cphi = phi.second_derivative();
        let ctau = tau.second_derivative();
        let floor = phi.curvature_floor();
        if let Some(i) = (0..g.len()).find(|&i| !(cphi[i] >= -floor)) {
            return Err(LabError::LostConvexity { time: j, node: i });
        }
        let rp = phi.resolved_nodes();
        let rt = tau.resolved_nodes();
        out.f.push((0..g.len()).map(|i| pss[i] - psx[i] * psx[i] / cphi[i]).collect());
        out.f_tau.push((0..g.len()).map(|i| pss[i] - psx[i] * psx[i] / ctau[i]).collect());
        out.f_ma.push((0..g.len()).map(|i| pss[i] * cphi[i] - psx[i] * psx[i]).collect());
        out.resolved.push((0..g.len()).map(|i| rp[i] && rt[i]).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_path_derivatives() {
        let g = Grid::new(20.0, 401).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let ws: Vec<RadialWeight> = time_grid(5).iter().map(|s| fs.add_constant(3.0 * s)).collect();
        let path = GeodesicPath::new(ws).unwrap();
        for j in 0..5 {
            assert!(path.velocity(j).iter().all(|v| (v - 3.0).abs() < 1e-12));
            assert!(path.acceleration(j).iter().all(|v| v.abs() < 1e-10));
        }
        let d = geodesic_defect(&path, &TwisterSpec::none(g)).unwrap();
        assert!(d.sup_f() < 1e-10);
    }

    #[test]
    fn rejects_short_or_mixed_paths() {
        let g = Grid::new(20.0, 401).unwrap();
        let fs = RadialWeight::fubini_study(g);
        assert!(GeodesicPath::new(vec![fs.clone(), fs.clone()]).is_err());
        let fb = RadialWeight::football(0.5, g).unwrap();
        assert!(matches!(
            GeodesicPath::new(vec![fs.clone(), fb, fs]),
            Err(LabError::SlopeMismatch(..))
        ));
    }
}
