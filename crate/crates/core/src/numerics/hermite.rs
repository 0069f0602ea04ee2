use crate::error::{Error, Result};

/// Piecewise quintic Hermite interpolant through values, first and second
/// derivatives. The result is twice continuously differentiable.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
    d2y: Vec<f64>,
}

impl QuinticHermite {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>, d2y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(Error::Config("interpolation needs at least two knots".into()));
        }
        if y.len() != n || dy.len() != n || d2y.len() != n {
            return Err(Error::Config("knot arrays differ in length".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("knots must be strictly increasing".into()));
        }
        Ok(Self { x, y, dy, d2y })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dy
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value and first derivative. Outside the knot range the end segment
    /// polynomial is extended.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (y, dy, _) = self.eval_all(t);
        (y, dy)
    }

    /// Value, first and second derivative.
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64) {
        let i = self
            .x
            .partition_point(|&k| k <= t)
            .saturating_sub(1)
            .min(self.x.len() - 2);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let s = (t - x0) / h;
        let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));

        let c = [
            self.y[i],
            h * self.dy[i],
            h * h * self.d2y[i],
            h * h * self.d2y[i + 1],
            h * self.dy[i + 1],
            self.y[i + 1],
        ];
        let basis = [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
            0.5 * s3 - s4 + 0.5 * s5,
            -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
            10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        ];
        let d1 = [
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
            1.5 * s2 - 4.0 * s3 + 2.5 * s4,
            -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
            30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        ];
        let d2 = [
            -60.0 * s + 180.0 * s2 - 120.0 * s3,
            -36.0 * s + 96.0 * s2 - 60.0 * s3,
            1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3,
            3.0 * s - 12.0 * s2 + 10.0 * s3,
            -24.0 * s + 84.0 * s2 - 60.0 * s3,
            60.0 * s - 180.0 * s2 + 120.0 * s3,
        ];
        let dot = |b: &[f64; 6]| b.iter().zip(&c).map(|(b, c)| b * c).sum::<f64>();
        (dot(&basis), dot(&d1) / h, dot(&d2) / (h * h))
    }
}
