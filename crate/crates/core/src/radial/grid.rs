use crate::error::{LabError, Result};

/// Uniform symmetric grid on `[-x_max, x_max]` with an odd number of nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    x_max: f64,
    n: usize,
}

pub const MIN_NODES: usize = 129;
pub const MIN_HALF_WIDTH: f64 = 10.0;

impl Grid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max >= MIN_HALF_WIDTH) {
            return Err(LabError::InvalidGrid(format!(
                "x_max = {x_max} must be at least {MIN_HALF_WIDTH}"
            )));
        }
        if n < MIN_NODES {
            return Err(LabError::InvalidGrid(format!(
                "n = {n} must be at least {MIN_NODES}"
            )));
        }
        if n % 2 == 0 {
            return Err(LabError::InvalidGrid(format!("n = {n} must be odd")));
        }
        Ok(Self { x_max, n })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.x_max / (self.n - 1) as f64
    }

    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Node `i`. Written as `x_max * k / c` with integer `k` so that the
    /// grid is exactly symmetric, hits 0 and both endpoints bit-exactly.
    pub fn x(&self, i: usize) -> f64 {
        let c = self.center() as f64;
        self.x_max * ((i as f64 - c) / c)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let k = ((x + self.x_max) / self.spacing()).round();
        k.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| f(self.x(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spacing() {
        let g = Grid::new(40.0, 4097).unwrap();
        assert!((g.spacing() - 80.0 / 4096.0).abs() < 1e-15);
        assert_eq!(g.x(0), -40.0);
        assert_eq!(g.x(4096), 40.0);
    }

    #[test]
    fn center_is_zero_and_symmetric() {
        let g = Grid::new(10.0, 129).unwrap();
        assert_eq!(g.x(64), 0.0);
        for i in 0..129 {
            assert_eq!(g.x(i), -g.x(128 - i));
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(40.0, 4096).is_err());
        assert!(Grid::new(40.0, 127).is_err());
        assert!(Grid::new(9.5, 129).is_err());
        assert!(Grid::new(f64::NAN, 129).is_err());
    }

    #[test]
    fn uniform_spacing() {
        let g = Grid::new(40.0, 4097).unwrap();
        let h = g.spacing();
        for i in 1..g.len() {
            assert!((g.x(i) - g.x(i - 1) - h).abs() < 1e-12);
        }
    }
}
