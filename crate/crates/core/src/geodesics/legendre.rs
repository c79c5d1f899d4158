//! Legendre transform and exact geodesics.
//!
//! The geodesic between convex weights is the Legendre dual of the linear
//! path between their transforms. Pointwise: at time `s` the node `x` is
//! reached by `(1-s) y₀ + s y₁ = x` with `φ₀'(y₀) = φ₁'(y₁)`, and then
//! `φ_s(x) = (1-s) φ₀(y₀) + s φ₁(y₁)`. Slopes are matched through their
//! gaps to the asymptotic slopes so that tails keep relative precision.

use super::path::{time_grid, GeodesicPath};
use crate::error::{LabError, Result};
use crate::radial::diff::{first_derivative, second_derivative};
use crate::radial::RadialWeight;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Minus,
    Plus,
}

/// Off-grid evaluation: the closed-form reference plus a quintic Hermite
/// interpolant of the remainder. Beyond the grid the remainder slope relaxes
/// exponentially to its asymptotic value, matching value, slope and
/// curvature at the edge.
struct Smooth<'a> {
    w: &'a RadialWeight,
    d1: Vec<f64>,
    d2: Vec<f64>,
    /// asymptotic remainder slopes
    cont: (f64, f64),
    /// `(slope excess, decay rate)` of the continuation at each edge
    tails: [(f64, f64); 2],
    r: f64,
    h: f64,
}

impl<'a> Smooth<'a> {
    fn new(w: &'a RadialWeight) -> Self {
        let g = w.grid();
        let h = g.spacing();
        let (rm, rp) = w.reference().slopes();
        let (am, ap) = w.slopes();
        let d1 = first_derivative(w.remainder(), h);
        let d2 = second_derivative(w.remainder(), h);
        let n = d1.len();
        let cont = (am - rm, ap - rp);
        // excess slope δ decaying like e^{-κ|y - edge|}; κ from δ' = ∓κδ
        let tail = |delta: f64, curv: f64| {
            let kappa = curv / delta;
            if delta != 0.0 && kappa.is_finite() && kappa > 0.0 {
                (delta, kappa)
            } else {
                (0.0, 1.0)
            }
        };
        let tails = [tail(d1[0] - cont.0, d2[0]), tail(d1[n - 1] - cont.1, -d2[n - 1])];
        Self {
            w,
            d1,
            d2,
            cont,
            tails,
            r: g.x_max(),
            h,
        }
    }

    /// Remainder value, slope and curvature at `y`.
    fn rem(&self, y: f64) -> (f64, f64, f64) {
        let rem = self.w.remainder();
        let n = rem.len();
        if y >= self.r {
            let (delta, kappa) = self.tails[1];
            let e = (-kappa * (y - self.r)).exp();
            return (
                rem[n - 1] + self.cont.1 * (y - self.r) + delta / kappa * (1.0 - e),
                self.cont.1 + delta * e,
                -delta * kappa * e,
            );
        }
        if y <= -self.r {
            let (delta, kappa) = self.tails[0];
            let e = (kappa * (y + self.r)).exp();
            return (
                rem[0] + self.cont.0 * (y + self.r) - delta / kappa * (1.0 - e),
                self.cont.0 + delta * e,
                delta * kappa * e,
            );
        }
        let h = self.h;
        let k = (((y + self.r) / h).floor() as usize).min(n - 2);
        let t = (y - self.w.grid().x(k)) / h;
        let (f0, f1) = (rem[k], rem[k + 1]);
        let (g0, g1) = (h * self.d1[k], h * self.d1[k + 1]);
        let (c0, c1) = (h * h * self.d2[k], h * h * self.d2[k + 1]);
        let a = [
            f0,
            g0,
            0.5 * c0,
            -10.0 * f0 - 6.0 * g0 - 1.5 * c0 + 10.0 * f1 - 4.0 * g1 + 0.5 * c1,
            15.0 * f0 + 8.0 * g0 + 1.5 * c0 - 15.0 * f1 + 7.0 * g1 - c1,
            -6.0 * f0 - 3.0 * g0 - 0.5 * c0 + 6.0 * f1 - 3.0 * g1 + 0.5 * c1,
        ];
        let v = a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * (a[4] + t * a[5]))));
        let d = a[1] + t * (2.0 * a[2] + t * (3.0 * a[3] + t * (4.0 * a[4] + t * 5.0 * a[5])));
        let dd = 2.0 * a[2] + t * (6.0 * a[3] + t * (12.0 * a[4] + t * 20.0 * a[5]));
        (v, d / h, dd / (h * h))
    }

    fn value(&self, y: f64) -> f64 {
        self.w.reference().value(y) + self.rem(y).0
    }

    fn slope(&self, y: f64) -> f64 {
        self.w.reference().slope(y) + self.rem(y).1
    }

    fn curvature(&self, y: f64) -> f64 {
        self.w.reference().curvature(y) + self.rem(y).2
    }

    /// `a+ - φ'(y)` or `φ'(y) - a-`.
    fn gap(&self, y: f64, side: Side) -> f64 {
        let reference = self.w.reference();
        let d = self.rem(y).1;
        match side {
            Side::Plus => self.cont.1 + reference.deficit_plus(y) - d,
            Side::Minus => -self.cont.0 + reference.deficit_minus(y) + d,
        }
    }

    fn side_at(&self, y: f64) -> Side {
        if self.gap(y, Side::Plus) < self.gap(y, Side::Minus) {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    /// Point where `log gap(y) = target`, searched from `guess`; clamps to
    /// the grid edge when the gap never gets there.
    fn solve_gap(&self, side: Side, target: f64, guess: f64) -> f64 {
        // g increases with y on the minus side, decreases on the plus side
        let sign = if side == Side::Minus { 1.0 } else { -1.0 };
        let g = |y: f64| {
            let gap = self.gap(y, side);
            let lg = if gap > 0.0 { gap.ln() } else { f64::NEG_INFINITY };
            sign * (lg - target)
        };
        let limit = 1e4 + self.r;
        let (mut lo, mut hi);
        let g0 = g(guess);
        if g0 == 0.0 {
            return guess;
        }
        let mut step = 0.5;
        if g0 < 0.0 {
            lo = guess;
            hi = guess + step;
            while g(hi) < 0.0 {
                lo = hi;
                step *= 2.0;
                hi = guess + step;
                if hi > limit {
                    return self.r;
                }
            }
        } else {
            hi = guess;
            lo = guess - step;
            while g(lo) > 0.0 {
                hi = lo;
                step *= 2.0;
                lo = guess - step;
                if lo < -limit {
                    return -self.r;
                }
            }
        }
        let mut y = if g0 < 0.0 { lo } else { hi };
        for _ in 0..200 {
            let gap = self.gap(y, side);
            let gy = g(y);
            if gy == 0.0 {
                return y;
            }
            if gy < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            // d/dy log gap = ∓ curvature / gap
            let dg = self.curvature(y) / gap;
            let mut next = y - gy / dg;
            if !(next > lo && next < hi) || !dg.is_finite() || dg <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 1e-15 * (1.0 + y.abs()) || hi - lo <= 1e-15 * (1.0 + y.abs()) {
                return next;
            }
            y = next;
        }
        y
    }
}

/// Samples of `φ*(p) = sup_x (p x - φ(x))` on a uniform grid of `[a-, a+]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreDual {
    pub p: Vec<f64>,
    pub values: Vec<f64>,
}

impl LegendreDual {
    /// Discrete back-transform `max_k (p_k x - φ*(p_k))`.
    pub fn conjugate_at(&self, x: f64) -> f64 {
        self.p
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p * x - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Legendre transform on as many slope samples as the grid has nodes.
pub fn legendre_dual(phi: &RadialWeight) -> Result<LegendreDual> {
    let (am, ap) = phi.slopes();
    if !(ap > am) {
        return Err(LabError::OutOfRange(format!(
            "Legendre transform needs a- < a+, got ({am}, {ap})"
        )));
    }
    phi.check_convex(false)?;
    let n = phi.grid().len();
    let sm = Smooth::new(phi);
    let (bm, bp) = phi.tail_offsets();
    let mut p = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut guess = -phi.grid().x_max();
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let pk = if k == n - 1 { ap } else { am + (ap - am) * t };
        p.push(pk);
        let v = if k == 0 {
            -bm
        } else if k == n - 1 {
            -bp
        } else {
            let (side, gap) = if pk - am <= ap - pk {
                (Side::Minus, pk - am)
            } else {
                (Side::Plus, ap - pk)
            };
            let y = sm.solve_gap(side, gap.ln(), guess);
            guess = y;
            pk * y - sm.value(y)
        };
        values.push(v);
    }
    Ok(LegendreDual { p, values })
}

/// Geodesic with `m` time samples between weights of equal slopes.
pub fn exact_geodesic(phi0: &RadialWeight, phi1: &RadialWeight, m: usize) -> Result<GeodesicPath> {
    if phi0.grid() != phi1.grid() {
        return Err(LabError::GridMismatch);
    }
    let (s0, s1) = (phi0.slopes(), phi1.slopes());
    if s0 != s1 {
        return Err(LabError::SlopeMismatch(s0.0, s0.1, s1.0, s1.1));
    }
    if m < 3 {
        return Err(LabError::InvalidInput(format!("need at least 3 time samples, got {m}")));
    }
    phi0.check_convex(false)?;
    phi1.check_convex(false)?;
    let g = *phi0.grid();
    let ends = [Smooth::new(phi0), Smooth::new(phi1)];
    let times = time_grid(m);
    let mut weights = Vec::with_capacity(m);
    weights.push(phi0.clone());
    for &s in &times[1..m - 1] {
        let reference = phi0.reference().scaled(1.0 - s).plus(&phi1.reference().scaled(s));
        // parametrize by the endpoint with the larger share
        let (lead, other, wl) = if s <= 0.5 { (0, 1, 1.0 - s) } else { (1, 0, s) };
        let mut y_prev = g.x(0);
        let mut z_prev = g.x(0);
        let mut rem = Vec::with_capacity(g.len());
        let mut noise: f64 = 0.0;
        for i in 0..g.len() {
            let x = g.x(i);
            let pair = |y: f64, zg: f64| {
                let side = ends[lead].side_at(y);
                let z = ends[other].solve_gap(side, ends[lead].gap(y, side).ln(), zg);
                (z, wl * y + (1.0 - wl) * z - x)
            };
            let (y, z) = transport_point(&ends[lead], &ends[other], wl, y_prev + (x - g.x(i.saturating_sub(1))), z_prev, pair);
            y_prev = y;
            z_prev = z;
            let (y0, y1) = if lead == 0 { (y, z) } else { (z, y) };
            let miss = (1.0 - s) * (y0 - x) + s * (y1 - x);
            let part = |k: usize, yk: f64| ends[k].rem(yk).0 + [phi0, phi1][k].reference().difference(yk, x);
            let p = ends[lead].slope(y);
            let terms = [(1.0 - s) * part(0, y0), s * part(1, y1), -p * miss];
            noise = noise.max(terms.iter().map(|t| t.abs()).sum());
            rem.push(terms.iter().sum());
        }
        let (am, ap) = s0;
        weights.push(RadialWeight::from_parts(g, reference, rem, am, ap)?.with_noise(noise));
    }
    weights.push(phi1.clone());
    GeodesicPath::new(weights)
}

/// Solves `wl y + (1 - wl) z(y) = x` for the lead coordinate `y`, where
/// `z(y)` is the matching point on the other endpoint.
fn transport_point<F>(lead: &Smooth, other: &Smooth, wl: f64, guess: f64, z_guess: f64, pair: F) -> (f64, f64)
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let eval = |y: f64, zg: f64| pair(y, zg);
    let mut y = guess;
    let (mut z, mut hy) = eval(y, z_guess);
    if hy == 0.0 {
        return (y, z);
    }
    // bracket the root; the map is increasing in y
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..200 {
        if hy < 0.0 {
            lo = lo.max(y);
        } else {
            hi = hi.min(y);
        }
        let cl = lead.curvature(y);
        let co = other.curvature(z);
        let dh = wl + (1.0 - wl) * if co > 0.0 { cl / co } else { f64::INFINITY };
        let mut next = y - hy / dh;
        if !next.is_finite() || next <= lo || next >= hi {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + (y - lo).abs().max(1.0) * 2.0
            } else {
                hi - (hi - y).abs().max(1.0) * 2.0
            };
        }
        let done = (next - y).abs() <= 1e-15 * (1.0 + y.abs());
        let (zn, hn) = eval(next, z);
        y = next;
        z = zn;
        hy = hn;
        if done || hy == 0.0 || (hi - lo) <= 1e-15 * (1.0 + y.abs()) {
            break;
        }
    }
    (y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Grid;
    use std::f64::consts::LN_2;

    fn grid() -> Grid {
        Grid::new(40.0, 4097).unwrap()
    }

    #[test]
    fn fubini_study_dual() {
        let fs = RadialWeight::fubini_study(grid());
        let dual = legendre_dual(&fs).unwrap();
        let c = (dual.p.len() - 1) / 2;
        assert_eq!(dual.p[c], 0.0);
        assert!((dual.values[c] + 2.0 * LN_2).abs() < 1e-13);
        // (1+p) log(1+p) + (1-p) log(1-p) - 2 log 2 in closed form
        for k in (1..dual.p.len() - 1).step_by(97) {
            let p = dual.p[k];
            let exact = (1.0 + p) * (1.0 + p).ln() + (1.0 - p) * (1.0 - p).ln() - 2.0 * LN_2;
            assert!((dual.values[k] - exact).abs() < 1e-11, "{p}");
        }
        let shifted = legendre_dual(&fs.add_constant(0.3)).unwrap();
        assert!(shifted.values.iter().zip(&dual.values).all(|(a, b)| (a - b + 0.3).abs() < 1e-12));
    }

    #[test]
    fn dual_of_affine_is_rejected() {
        let w = RadialWeight::canonical(crate::radial::Canonical::Affine(0.5, 1.0), grid()).unwrap();
        assert!(legendre_dual(&w).is_err());
    }

    #[test]
    fn translation_orbit_is_recovered() {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let path = exact_geodesic(&fs, &fs.translated(-2.0), 9).unwrap();
        for (j, w) in path.weights().iter().enumerate() {
            let s = path.times()[j];
            let exact = fs.translated(-2.0 * s);
            let err = (0..g.len()).fold(0.0f64, |m, i| m.max((w.value(i) - exact.value(i)).abs()));
            assert!(err < 1e-12, "{s}: {err}");
        }
    }

    #[test]
    fn constant_shift_gives_linear_path() {
        let g = grid();
        let fb = RadialWeight::football(0.5, g).unwrap();
        let path = exact_geodesic(&fb, &fb.add_constant(1.5), 5).unwrap();
        for (j, w) in path.weights().iter().enumerate() {
            let s = path.times()[j];
            assert!((0..g.len()).all(|i| (w.value(i) - fb.value(i) - 1.5 * s).abs() < 1e-12));
        }
    }

    #[test]
    fn slope_mismatch_is_rejected() {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let fb = RadialWeight::football(0.5, g).unwrap();
        assert!(matches!(exact_geodesic(&fs, &fb, 5), Err(LabError::SlopeMismatch(..))));
    }
}
