//! Finite-difference stencils and quadrature on a uniform grid.
//!
//! Interior derivatives are sixth order, dropping to fourth and second order
//! near the edges; edge rows are one-sided second order. Plain second-order
//! differences leave a truncation error around 1e-5 at h ~ 0.02, far above
//! the residual levels the solvers need.

const D2_6: [f64; 7] = [
    2.0 / 180.0,
    -27.0 / 180.0,
    270.0 / 180.0,
    -490.0 / 180.0,
    270.0 / 180.0,
    -27.0 / 180.0,
    2.0 / 180.0,
];
const D2_4: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D2_2: [f64; 3] = [1.0, -2.0, 1.0];
const D2_LEFT: [f64; 4] = [2.0, -5.0, 4.0, -1.0];
const D2_RIGHT: [f64; 4] = [-1.0, 4.0, -5.0, 2.0];

const D1_6: [f64; 7] = [
    -1.0 / 60.0,
    9.0 / 60.0,
    -45.0 / 60.0,
    0.0,
    45.0 / 60.0,
    -9.0 / 60.0,
    1.0 / 60.0,
];
const D1_4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D1_2: [f64; 3] = [-0.5, 0.0, 0.5];
const D1_LEFT: [f64; 3] = [-1.5, 2.0, -0.5];
const D1_RIGHT: [f64; 3] = [0.5, -2.0, 1.5];

/// Stencil for row `i`: first column and coefficients (unscaled by `h`).
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub start: usize,
    pub coeffs: &'static [f64],
}

impl Stencil {
    pub fn apply(&self, f: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(&f[self.start..])
            .map(|(c, v)| c * v)
            .sum()
    }
}

fn centered(i: usize, n: usize, wide: &'static [f64], mid: &'static [f64], narrow: &'static [f64]) -> Stencil {
    let reach = i.min(n - 1 - i);
    match reach {
        r if r >= 3 => Stencil { start: i - 3, coeffs: wide },
        2 => Stencil { start: i - 2, coeffs: mid },
        _ => Stencil { start: i - 1, coeffs: narrow },
    }
}

/// Second-derivative stencil at row `i` of an `n`-point grid; scale by `1/h^2`.
pub fn d2_stencil(i: usize, n: usize) -> Stencil {
    if i == 0 {
        Stencil { start: 0, coeffs: &D2_LEFT }
    } else if i == n - 1 {
        Stencil { start: n - 4, coeffs: &D2_RIGHT }
    } else {
        centered(i, n, &D2_6, &D2_4, &D2_2)
    }
}

/// First-derivative stencil at row `i`; scale by `1/h`.
pub fn d1_stencil(i: usize, n: usize) -> Stencil {
    if i == 0 {
        Stencil { start: 0, coeffs: &D1_LEFT }
    } else if i == n - 1 {
        Stencil { start: n - 3, coeffs: &D1_RIGHT }
    } else {
        centered(i, n, &D1_6, &D1_4, &D1_2)
    }
}

pub fn second_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let s = 1.0 / (h * h);
    (0..n).map(|i| d2_stencil(i, n).apply(f) * s).collect()
}

pub fn first_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|i| d1_stencil(i, n).apply(f) / h).collect()
}

/// Weight of an edge node in the infinite trapezoid rule when the integrand
/// continues as `f(R) e^{-s (x - R)}`: the half trapezoid weight plus the
/// geometric tail, `h/2 + (h/2) coth(s h / 2)`.
pub fn edge_weight(h: f64, decay: Option<f64>) -> f64 {
    match decay {
        Some(s) if s > 0.0 => 0.5 * h + 0.5 * h / (0.5 * s * h).tanh(),
        _ => 0.5 * h,
    }
}

/// Quadrature weights: trapezoid inside, exponential tails beyond the edges.
pub fn quadrature_weights(n: usize, h: f64, decay_minus: Option<f64>, decay_plus: Option<f64>) -> Vec<f64> {
    let mut q = vec![h; n];
    q[0] = edge_weight(h, decay_minus);
    q[n - 1] = edge_weight(h, decay_plus);
    q
}

pub fn integrate(f: &[f64], q: &[f64]) -> f64 {
    f.iter().zip(q).map(|(a, b)| a * b).sum()
}

/// Exponential decay rate of samples toward the left/right edge, when the
/// last three samples agree on one; `None` if the tail is not clean.
pub fn measured_decays(f: &[f64], h: f64) -> (Option<f64>, Option<f64>) {
    fn rate(a: f64, b: f64, c: f64, h: f64) -> Option<f64> {
        // a, b, c ordered from the interior outward
        if !(a.abs() > 1e-300 && b.abs() > 1e-300 && c.abs() > 1e-300) {
            return None;
        }
        if a.signum() != b.signum() || b.signum() != c.signum() {
            return None;
        }
        let s1 = (a / b).ln() / h;
        let s2 = (b / c).ln() / h;
        if s1 > 0.0 && s2 > 0.0 && (s1 - s2).abs() <= 0.1 * s2 {
            Some(s2)
        } else {
            None
        }
    }
    let n = f.len();
    (
        rate(f[2], f[1], f[0], h),
        rate(f[n - 3], f[n - 2], f[n - 1], h),
    )
}

/// Integral of decaying samples with measured exponential tails.
pub fn integrate_decaying(f: &[f64], h: f64) -> f64 {
    let (dm, dp) = measured_decays(f, h);
    integrate(f, &quadrature_weights(f.len(), h, dm, dp))
}

/// Six-point Lagrange interpolation of nodal values at `x`, with nodes
/// `x0 + k h`. The point must lie within the node range.
pub fn interpolate(f: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = f.len();
    let u = (x - x0) / h;
    let j = (u.floor() as isize).clamp(0, n as isize - 2) as usize;
    let start = j.saturating_sub(2).min(n - 6);
    let mut acc = 0.0;
    for a in 0..6 {
        let ka = (start + a) as f64;
        let mut l = 1.0;
        for b in 0..6 {
            if a != b {
                let kb = (start + b) as f64;
                l *= (u - kb) / (ka - kb);
            }
        }
        acc += l * f[start + a];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let n = 21;
        let h = 0.1;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let quad: Vec<f64> = x.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d2 = second_derivative(&quad, h);
        let d1 = first_derivative(&quad, h);
        for i in 0..n {
            assert!((d2[i] - 6.0).abs() < 1e-9, "{i}");
            assert!((d1[i] - (6.0 * x[i] - 1.0)).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn sixth_order_convergence() {
        let err = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (-1.0 + i as f64 * h).exp()).collect();
            let d2 = second_derivative(&f, h);
            let i = (n - 1) / 2;
            (d2[i] - f[i]).abs().max((d2[i + 5] - f[i + 5]).abs())
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 40.0, "ratio {ratio}");
    }

    #[test]
    fn tail_weight_integrates_exponential_exactly() {
        let h = 0.05;
        let n = 201;
        let s = 0.7;
        // e^{-s|x|} on [-5, 5] plus tails
        let f: Vec<f64> = (0..n).map(|i| (-s * (-5.0 + i as f64 * h).abs()).exp()).collect();
        let q = quadrature_weights(n, h, Some(s), Some(s));
        let exact_sum = {
            // infinite trapezoid of e^{-s|x|}
            h * (1.0 + 2.0 * (-s * h).exp() / (1.0 - (-s * h).exp()))
        };
        assert!((integrate(&f, &q) - exact_sum).abs() < 1e-12);
        assert!((integrate(&f, &q) - 2.0 / s).abs() < 1e-3);
        let (dm, dp) = measured_decays(&f, h);
        assert!((dm.unwrap() - s).abs() < 1e-10 && (dp.unwrap() - s).abs() < 1e-10);
    }

    #[test]
    fn lagrange_interpolation_is_quintic_exact() {
        let h = 0.25;
        let f: Vec<f64> = (0..12).map(|i| (i as f64 * h).powi(5) - 2.0 * (i as f64 * h)).collect();
        for &x in &[0.1, 1.3, 2.6, 2.74] {
            let v = interpolate(&f, 0.0, h, x);
            assert!((v - (x.powi(5) - 2.0 * x)).abs() < 1e-11, "{x}");
        }
    }
}
