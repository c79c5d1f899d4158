//! Closed-form reference profiles.
//!
//! A weight is stored as an analytic profile plus sampled remainder. Keeping
//! the closed-form part analytic is what lets curvature be evaluated to full
//! relative precision far out in the tails, where sampled values of size ~40
//! would bury a curvature of size e^-40 under rounding noise.

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Term {
    /// `slope * x + offset`
    Affine { slope: f64, offset: f64 },
    /// `(2 amp / rate) * log(2 cosh(rate (x - shift) / 2))`; slopes `±amp`.
    LogCosh { amp: f64, rate: f64, shift: f64 },
    /// `coef * log(1 + 4 eps cosh^2((x - shift) / 2))`; slopes `±coef`.
    LogQ { coef: f64, eps: f64, shift: f64 },
}

/// `log(2 cosh y)` without overflow.
pub fn log_2cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `sech^2 y` without overflow.
pub fn sech2(y: f64) -> f64 {
    let e = (-2.0 * y.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `1 - tanh y`, accurate for large positive `y`.
fn one_minus_tanh(y: f64) -> f64 {
    if y >= 0.0 {
        let e = (-2.0 * y).exp();
        2.0 * e / (1.0 + e)
    } else {
        1.0 + (-y).tanh()
    }
}

// log q written through t = e^{-|x|} so nothing overflows:
// q = e^{|x|} (eps (1 + t^2) + t (1 + 2 eps)).
fn logq_parts(eps: f64, x: f64) -> (f64, f64) {
    let t = (-x.abs()).exp();
    let d = t * (1.0 + 2.0 * eps) + eps * (1.0 + t * t);
    (t, d)
}

impl Term {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Term::Affine { slope, offset } => slope * x + offset,
            Term::LogCosh { amp, rate, shift } => {
                2.0 * amp / rate * log_2cosh(0.5 * rate * (x - shift))
            }
            Term::LogQ { coef, eps, shift } => {
                if eps == 0.0 {
                    return 0.0;
                }
                let y = x - shift;
                let (_, d) = logq_parts(eps, y);
                coef * (y.abs() + d.ln())
            }
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        match *self {
            Term::Affine { slope, .. } => slope,
            Term::LogCosh { amp, rate, shift } => amp * (0.5 * rate * (x - shift)).tanh(),
            Term::LogQ { coef, eps, shift } => {
                if eps == 0.0 {
                    return 0.0;
                }
                let y = x - shift;
                let (t, d) = logq_parts(eps, y);
                coef * y.signum() * eps * (1.0 - t * t) / d
            }
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        match *self {
            Term::Affine { .. } => 0.0,
            Term::LogCosh { amp, rate, shift } => {
                0.5 * amp * rate * sech2(0.5 * rate * (x - shift))
            }
            Term::LogQ { coef, eps, shift } => {
                if eps == 0.0 {
                    return 0.0;
                }
                let (t, d) = logq_parts(eps, x - shift);
                coef * t * (eps * (1.0 + 2.0 * eps) * (1.0 + t * t) + 4.0 * eps * eps * t) / (d * d)
            }
        }
    }

    /// `value(y) - value(x)`, with the linear growth differenced exactly.
    pub fn difference(&self, y: f64, x: f64) -> f64 {
        // |a| - |b| for a - b = d, with d formed before any scaling
        fn abs_diff(a: f64, b: f64, d: f64) -> f64 {
            if a >= 0.0 && b >= 0.0 {
                d
            } else if a <= 0.0 && b <= 0.0 {
                -d
            } else {
                a.abs() - b.abs()
            }
        }
        match *self {
            Term::Affine { slope, .. } => slope * (y - x),
            Term::LogCosh { amp, rate, shift } => {
                let (uy, ux) = (0.5 * rate * (y - shift), 0.5 * rate * (x - shift));
                let tail = |u: f64| (-2.0 * u.abs()).exp().ln_1p();
                2.0 * amp / rate * (abs_diff(uy, ux, 0.5 * rate * (y - x)) + (tail(uy) - tail(ux)))
            }
            Term::LogQ { coef, eps, shift } => {
                if eps == 0.0 {
                    return 0.0;
                }
                let (py, px) = (y - shift, x - shift);
                let (_, dy) = logq_parts(eps, py);
                let (_, dx) = logq_parts(eps, px);
                coef * (abs_diff(py, px, y - x) + ((dy - dx) / dx).ln_1p())
            }
        }
    }

    /// Asymptotic slopes `(a-, a+)`.
    pub fn slopes(&self) -> (f64, f64) {
        match *self {
            Term::Affine { slope, .. } => (slope, slope),
            Term::LogCosh { amp, .. } => (-amp, amp),
            Term::LogQ { coef, eps, .. } => {
                if eps == 0.0 {
                    (0.0, 0.0)
                } else {
                    (-coef, coef)
                }
            }
        }
    }

    /// `a+ - w'(x)`, accurate when it is tiny.
    pub fn deficit_plus(&self, x: f64) -> f64 {
        match *self {
            Term::Affine { .. } => 0.0,
            Term::LogCosh { amp, rate, shift } => amp * one_minus_tanh(0.5 * rate * (x - shift)),
            Term::LogQ { coef, eps, shift } => {
                if eps == 0.0 {
                    return 0.0;
                }
                let y = x - shift;
                let (t, d) = logq_parts(eps, y);
                if y >= 0.0 {
                    coef * (t * (1.0 + 2.0 * eps) + 2.0 * eps * t * t) / d
                } else {
                    coef * (1.0 + eps * (1.0 - t * t) / d)
                }
            }
        }
    }

    /// `w'(x) - a-`, accurate when it is tiny.
    pub fn deficit_minus(&self, x: f64) -> f64 {
        self.reflected().deficit_plus(-x)
    }

    fn reflected(&self) -> Term {
        match *self {
            Term::Affine { slope, offset } => Term::Affine { slope: -slope, offset },
            Term::LogCosh { amp, rate, shift } => Term::LogCosh { amp, rate, shift: -shift },
            Term::LogQ { coef, eps, shift } => Term::LogQ { coef, eps, shift: -shift },
        }
    }

    /// The term of `x -> self(x - a)`.
    pub fn translated(&self, a: f64) -> Term {
        match *self {
            Term::Affine { slope, offset } => Term::Affine {
                slope,
                offset: offset - slope * a,
            },
            Term::LogCosh { amp, rate, shift } => Term::LogCosh {
                amp,
                rate,
                shift: shift + a,
            },
            Term::LogQ { coef, eps, shift } => Term::LogQ {
                coef,
                eps,
                shift: shift + a,
            },
        }
    }

    pub fn scaled(&self, c: f64) -> Term {
        match *self {
            Term::Affine { slope, offset } => Term::Affine {
                slope: c * slope,
                offset: c * offset,
            },
            Term::LogCosh { amp, rate, shift } => Term::LogCosh {
                amp: c * amp,
                rate,
                shift,
            },
            Term::LogQ { coef, eps, shift } => Term::LogQ {
                coef: c * coef,
                eps,
                shift,
            },
        }
    }
}

/// A finite sum of closed-form terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Profile {
    terms: Vec<Term>,
}

impl Profile {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.slope(x)).sum()
    }

    pub fn curvature(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.curvature(x)).sum()
    }

    pub fn slopes(&self) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(m, p), t| {
            let (a, b) = t.slopes();
            (m + a, p + b)
        })
    }

    pub fn deficit_plus(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.deficit_plus(x)).sum()
    }

    pub fn deficit_minus(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.deficit_minus(x)).sum()
    }

    pub fn difference(&self, y: f64, x: f64) -> f64 {
        self.terms.iter().map(|t| t.difference(y, x)).sum()
    }

    pub fn translated(&self, a: f64) -> Profile {
        Profile::new(self.terms.iter().map(|t| t.translated(a)).collect())
    }

    pub fn scaled(&self, c: f64) -> Profile {
        Profile::new(self.terms.iter().map(|t| t.scaled(c)).collect())
    }

    pub fn plus(&self, other: &Profile) -> Profile {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Profile::new(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn fd1(t: &Term, x: f64) -> f64 {
        let h = 1e-5;
        (t.value(x + h) - t.value(x - h)) / (2.0 * h)
    }

    fn fd2(t: &Term, x: f64) -> f64 {
        let h = 1e-4;
        (t.slope(x + h) - t.slope(x - h)) / (2.0 * h)
    }

    #[test]
    fn fubini_study_closed_form() {
        let fs = Term::LogCosh { amp: 1.0, rate: 1.0, shift: 0.0 };
        assert!((fs.value(0.0) - 2.0 * LN_2).abs() < 1e-15);
        assert!((fs.curvature(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(fs.slopes(), (-1.0, 1.0));
        // far tail stays finite and exact
        assert!((fs.value(800.0) - 800.0).abs() < 1e-12);
        assert!((fs.curvature(60.0) / (2.0 * (-60.0f64).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let terms = [
            Term::LogCosh { amp: 0.5, rate: 0.5, shift: 1.3 },
            Term::LogQ { coef: 0.7, eps: 0.01, shift: -0.4 },
            Term::LogQ { coef: 1.0, eps: 2.0, shift: 0.0 },
        ];
        for t in &terms {
            for &x in &[-7.0, -1.1, 0.0, 0.3, 2.5, 9.0] {
                assert!((fd1(t, x) - t.slope(x)).abs() < 1e-8, "{t:?} {x}");
                assert!((fd2(t, x) - t.curvature(x)).abs() < 1e-7, "{t:?} {x}");
            }
        }
    }

    #[test]
    fn logq_matches_direct_formula() {
        let eps = 0.03;
        let t = Term::LogQ { coef: 1.0, eps, shift: 0.0 };
        for &x in &[-5.0, -0.5, 0.0, 1.0, 6.0] {
            let direct = (1.0 + 4.0 * eps * (0.5 * x as f64).cosh().powi(2)).ln();
            assert!((t.value(x) - direct).abs() < 1e-13);
        }
        assert!((t.curvature(0.0) - 2.0 * eps / (1.0 + 4.0 * eps)).abs() < 1e-15);
    }

    #[test]
    fn deficits_are_accurate_in_tails() {
        let t = Term::LogCosh { amp: 1.0, rate: 1.0, shift: 0.0 };
        let d = t.deficit_plus(40.0);
        assert!((d / (2.0 * (-40.0f64).exp()) - 1.0).abs() < 1e-12);
        assert!((t.deficit_minus(-40.0) - d).abs() < 1e-30);
        let q = Term::LogQ { coef: 1.0, eps: 0.1, shift: 0.0 };
        for &x in &[-3.0, 0.0, 2.0] {
            assert!((q.deficit_plus(x) - (1.0 - q.slope(x))).abs() < 1e-14);
            assert!((q.deficit_minus(x) - (q.slope(x) + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn differences_match_values() {
        let terms = [
            Term::LogCosh { amp: 0.5, rate: 0.5, shift: 1.3 },
            Term::LogQ { coef: 0.7, eps: 0.01, shift: -0.4 },
            Term::Affine { slope: 0.3, offset: 2.0 },
        ];
        for t in &terms {
            for &(y, x) in &[(-3.0, 2.0), (5.0, 4.9), (-8.0, -7.5), (0.2, -0.1)] {
                assert!((t.difference(y, x) - (t.value(y) - t.value(x))).abs() < 1e-13, "{t:?}");
            }
        }
        let fs = Term::LogCosh { amp: 1.0, rate: 1.0, shift: 0.0 };
        assert!((fs.difference(40.5, 40.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn translation_moves_profile() {
        let p = Profile::new(vec![
            Term::LogCosh { amp: 1.0, rate: 1.0, shift: 0.0 },
            Term::Affine { slope: 0.3, offset: 1.0 },
        ]);
        let q = p.translated(2.0);
        for &x in &[-3.0, 0.0, 4.0] {
            assert!((q.value(x) - p.value(x - 2.0)).abs() < 1e-13);
        }
    }
}
