//! Energy `E`, the twisted functional `F`, the Ding functional
//! `D = -E/M + F`, Aubin's `J`, and a properness probe.

use crate::einstein::TwisterSpec;
use crate::error::{LabError, Result};
use crate::radial::diff::integrate_decaying;
use crate::radial::{volume_density, Density, RadialWeight};

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalReport {
    pub e: f64,
    pub f: f64,
    pub d: f64,
    pub j: f64,
    pub mass: f64,
    pub twister: String,
}

fn check_pair(phi: &RadialWeight, phi0: &RadialWeight) -> Result<()> {
    if phi.grid() != phi0.grid() {
        return Err(LabError::GridMismatch);
    }
    let (d, d0) = (phi.degree(), phi0.degree());
    if (d - d0).abs() > 1e-12 * (1.0 + d.abs()) {
        return Err(LabError::DegreeMismatch(d, d0));
    }
    phi.check_convex(false)?;
    phi0.check_convex(false)
}

/// `E(φ, φ₀) = ½ ∫ (φ - φ₀)(φ'' + φ₀'') dx`.
pub fn energy_e(phi: &RadialWeight, phi0: &RadialWeight) -> Result<f64> {
    check_pair(phi, phi0)?;
    let (a, b) = (phi.second_derivative(), phi0.second_derivative());
    let (v, v0) = (phi.samples(), phi0.samples());
    let integrand: Vec<f64> = (0..v.len()).map(|i| 0.5 * (v[i] - v0[i]) * (a[i] + b[i])).collect();
    Ok(integrate_decaying(&integrand, phi.grid().spacing()))
}

/// `F = -log ∫ e^{-(φ + w)} dx` with `w` the twister weight.
pub fn functional_f(phi: &RadialWeight, tw: &TwisterSpec) -> Result<f64> {
    let tau = phi.plus(&tw.weight)?;
    Ok(-volume_density(&tau)?.mass.ln())
}

/// Aubin's `J = (1/M) ∫ (φ - φ₀) φ₀'' - E/M`.
pub fn aubin_j(phi: &RadialWeight, phi0: &RadialWeight) -> Result<f64> {
    let e = energy_e(phi, phi0)?;
    let m = phi.degree();
    let b = phi0.second_derivative();
    let (v, v0) = (phi.samples(), phi0.samples());
    let integrand: Vec<f64> = (0..v.len()).map(|i| (v[i] - v0[i]) * b[i]).collect();
    Ok((integrate_decaying(&integrand, phi.grid().spacing()) - e) / m)
}

pub fn ding_value(phi: &RadialWeight, phi0: &RadialWeight, tw: &TwisterSpec) -> Result<FunctionalReport> {
    let e = energy_e(phi, phi0)?;
    let f = functional_f(phi, tw)?;
    let j = aubin_j(phi, phi0)?;
    let mass = phi.degree();
    Ok(FunctionalReport {
        e,
        f,
        d: -e / mass + f,
        j,
        mass,
        twister: tw.tag(),
    })
}

/// `φ''/M - e^{-τ}/∫e^{-τ}`; vanishes exactly at twisted KE weights.
pub fn ding_first_variation(phi: &RadialWeight, tw: &TwisterSpec) -> Result<Density> {
    phi.check_convex(false)?;
    let tau = phi.plus(&tw.weight)?;
    let vol = volume_density(&tau)?;
    let m = phi.degree();
    let samples: Vec<f64> = phi
        .second_derivative()
        .iter()
        .zip(&vol.samples)
        .map(|(c, v)| c / m - v / vol.mass)
        .collect();
    Ok(Density::from_decaying(*phi.grid(), samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CoerciveConsistent,
    ProperViolated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CoerciveConsistent => "coercive-consistent",
            Verdict::ProperViolated => "properness violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropernessReport {
    /// `(J, D)` per family member.
    pub rows: Vec<(f64, f64)>,
    pub verdict: Verdict,
    /// Lower envelope `D >= a J + b`.
    pub a: f64,
    pub b: f64,
}

impl PropernessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("member,J,D\n");
        for (i, (j, d)) in self.rows.iter().enumerate() {
            out.push_str(&format!("{i},{j:.12e},{d:.12e}\n"));
        }
        out.push_str(&format!(
            "# verdict={},a={:.12e},b={:.12e}\n",
            self.verdict.as_str(),
            self.a,
            self.b
        ));
        out
    }
}

pub const COERCIVE_SLOPE: f64 = 0.01;
pub const FLAT_WINDOW: f64 = 1.0;

/// Fits `D ≈ a J + b` by least squares, lowers `b` to an envelope, and
/// classifies the family.
pub fn properness_scan(family: &[RadialWeight], phi0: &RadialWeight, tw: &TwisterSpec) -> Result<PropernessReport> {
    if family.len() < 4 {
        return Err(LabError::InvalidInput(format!(
            "properness scan needs at least 4 members, got {}",
            family.len()
        )));
    }
    let rows = family
        .iter()
        .map(|phi| ding_value(phi, phi0, tw).map(|r| (r.j, r.d)))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let mj = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let md = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let sjj: f64 = rows.iter().map(|r| (r.0 - mj).powi(2)).sum();
    let sjd: f64 = rows.iter().map(|r| (r.0 - mj) * (r.1 - md)).sum();
    let (jmin, jmax) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.0), hi.max(r.0)));
    let (dmin, dmax) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.1), hi.max(r.1)));
    let a = if sjj > 0.0 { sjd / sjj } else { 0.0 };
    let b = rows.iter().map(|r| r.1 - a * r.0).fold(f64::INFINITY, f64::min);
    let verdict = if jmax - jmin <= 1e-12 {
        Verdict::Inconclusive
    } else if a > COERCIVE_SLOPE {
        Verdict::CoerciveConsistent
    } else if dmax - dmin <= FLAT_WINDOW && jmax - jmin >= FLAT_WINDOW {
        Verdict::ProperViolated
    } else {
        Verdict::Inconclusive
    };
    Ok(PropernessReport { rows, verdict, a, b })
}
