//! Second variation of the Ding functional along a path, split into the
//! energy term, the Futaki-type gap `δ_τ`, the twister gap `k`, and the
//! geodesic defect:
//!
//! `D'' = -E''/M + (δ_τ + k + ∫ f e^{-τ}) / ∫ e^{-τ}`.

use super::path::{geodesic_defect, GeodesicPath};
use crate::einstein::TwisterSpec;
use crate::error::Result;
use crate::functionals::ding_value;
use crate::radial::diff::{integrate, integrate_decaying, quadrature_weights};
use crate::radial::volume_density;
use crate::spectral::{delta_tau_with, k_gap, weighted_laplacian_form};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub s: f64,
    pub d: f64,
    /// `D''` from second differences of `D` in time.
    pub d_second: f64,
    pub delta_tau: f64,
    pub k_term: f64,
    /// `∫ f e^{-τ} / ∫ e^{-τ}`
    pub f_weighted: f64,
    /// `∫ f φ'' / M`
    pub e_second: f64,
    /// `∫ e^{-τ}`
    pub volume: f64,
}

impl AuditRow {
    /// Right-hand side of the decomposition.
    pub fn predicted(&self) -> f64 {
        -self.e_second + (self.delta_tau + self.k_term) / self.volume + self.f_weighted
    }

    pub fn decomposition_gap(&self) -> f64 {
        (self.d_second - self.predicted()).abs()
    }
}

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from("s,D,D2,delta_tau,k,f_weighted,E2\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.s, r.d, r.d_second, r.delta_tau, r.k_term, r.f_weighted, r.e_second
        ));
    }
    out
}

/// One row per time sample; `D` is measured against the first weight.
pub fn convexity_audit(path: &GeodesicPath, tw: &TwisterSpec) -> Result<Vec<AuditRow>> {
    let defect = geodesic_defect(path, tw)?;
    let g = *path.grid();
    let h = g.spacing();
    let m = path.len();
    let ds = path.step();
    let base = &path.weights()[0];
    let d: Vec<f64> = path
        .weights()
        .iter()
        .map(|w| ding_value(w, base, tw).map(|r| r.d))
        .collect::<Result<_>>()?;
    let second = |j: usize| {
        let c: &[f64] = if j > 0 && j < m - 1 {
            &[1.0, -2.0, 1.0]
        } else if m == 3 {
            &[1.0, -2.0, 1.0]
        } else if j == 0 {
            &[2.0, -5.0, 4.0, -1.0]
        } else {
            &[-1.0, 4.0, -5.0, 2.0]
        };
        let start = if j > 0 && j < m - 1 {
            j - 1
        } else if j == 0 || m == 3 {
            0
        } else {
            m - 4
        };
        c.iter().enumerate().map(|(k, c)| c * d[start + k]).sum::<f64>() / (ds * ds)
    };
    let trap = quadrature_weights(g.len(), h, None, None);
    let mut rows = Vec::with_capacity(m);
    for (j, phi) in path.weights().iter().enumerate() {
        let u = path.velocity(j);
        let tau = phi.plus(&tw.weight)?;
        let forms = weighted_laplacian_form(&tau)?;
        let delta = delta_tau_with(&forms, &u);
        let k = k_gap(phi, &tau, &u)?;
        let volume = volume_density(&tau)?.mass;
        let tv = tau.samples();
        let fw: Vec<f64> = (0..g.len())
            .map(|i| {
                if defect.resolved[j][i] {
                    defect.f[j][i] * (-tv[i]).exp()
                } else {
                    0.0
                }
            })
            .collect();
        rows.push(AuditRow {
            s: path.times()[j],
            d: d[j],
            d_second: second(j),
            delta_tau: delta,
            k_term: k,
            f_weighted: integrate(&fw, &trap) / volume,
            e_second: integrate_decaying(&defect.f_ma[j], h) / phi.degree(),
            volume,
        });
    }
    Ok(rows)
}
