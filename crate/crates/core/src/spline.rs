//! Least-squares C¹ cubic Hermite splines through ordered samples.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::geometry::Vec3;

/// Piecewise cubic with shared values and slopes at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpline {
    pub knots: Vec<f64>,
    pub values: Vec<Vec3>,
    pub slopes: Vec<Vec3>,
}

fn basis(knots: &[f64], t: f64) -> (usize, [f64; 4]) {
    let n = knots.len();
    let k = match knots.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.clamp(1, n - 1) - 1,
    };
    let h = knots[k + 1] - knots[k];
    let s = (t - knots[k]) / h;
    let (s2, s3) = (s * s, s * s * s);
    (
        k,
        [
            2.0 * s3 - 3.0 * s2 + 1.0,
            (s3 - 2.0 * s2 + s) * h,
            -2.0 * s3 + 3.0 * s2,
            (s3 - s2) * h,
        ],
    )
}

impl HermiteSpline {
    /// Fit `segments` cubic pieces on uniform knots over the parameter range.
    /// Returns the spline and the largest sample residual.
    pub fn fit(params: &[f64], points: &[Vec3], segments: usize) -> Result<(HermiteSpline, f64)> {
        let m = params.len();
        if m != points.len() || segments == 0 || m < 2 * (segments + 1) {
            return Err(invalid(
                "HermiteSpline::fit",
                format!("{m} samples cannot fit {segments} segments"),
            ));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid(
                "HermiteSpline::fit",
                "parameters must increase strictly",
            ));
        }
        let (t0, t1) = (params[0], params[m - 1]);
        let knots: Vec<f64> = (0..=segments)
            .map(|i| t0 + (t1 - t0) * i as f64 / segments as f64)
            .collect();
        let unknowns = 2 * (segments + 1);
        let mut a = DMatrix::<f64>::zeros(m, unknowns);
        for (row, &t) in params.iter().enumerate() {
            let (k, b) = basis(&knots, t);
            a[(row, 2 * k)] = b[0];
            a[(row, 2 * k + 1)] = b[1];
            a[(row, 2 * k + 2)] = b[2];
            a[(row, 2 * k + 3)] = b[3];
        }
        let svd = a.clone().svd(true, true);
        let mut coef = [
            DVector::zeros(unknowns),
            DVector::zeros(unknowns),
            DVector::zeros(unknowns),
        ];
        for (axis, c) in coef.iter_mut().enumerate() {
            let rhs = DVector::from_iterator(m, points.iter().map(|p| p.axis(axis)));
            *c = svd
                .solve(&rhs, 1e-13)
                .map_err(|e| invalid("HermiteSpline::fit", e))?;
        }
        let at = |i: usize| Vec3::new(coef[0][i], coef[1][i], coef[2][i]);
        let spline = HermiteSpline {
            values: (0..=segments).map(|k| at(2 * k)).collect(),
            slopes: (0..=segments).map(|k| at(2 * k + 1)).collect(),
            knots,
        };
        let residual = params
            .iter()
            .zip(points)
            .map(|(&t, &p)| spline.eval(t).dist(p))
            .fold(0.0, f64::max);
        Ok((spline, residual))
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        let (k, b) = basis(&self.knots, t);
        self.values[k] * b[0]
            + self.slopes[k] * b[1]
            + self.values[k + 1] * b[2]
            + self.slopes[k + 1] * b[3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let ts: Vec<f64> = (0..40).map(|i| i as f64 / 39.0 * 2.0 - 0.5).collect();
        let f = |t: f64| Vec3::new(t * t * t - t, 2.0 * t * t, 1.0 - 3.0 * t);
        let pts: Vec<Vec3> = ts.iter().map(|&t| f(t)).collect();
        let (s, res) = HermiteSpline::fit(&ts, &pts, 4).unwrap();
        assert!(res < 1e-12, "{res}");
        assert!(s.eval(0.123).dist(f(0.123)) < 1e-12);
    }

    #[test]
    fn smooth_curve_converges() {
        let ts: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
        let pts: Vec<Vec3> = ts
            .iter()
            .map(|&t| Vec3::new(t.sin(), (3.0 * t).cos(), t))
            .collect();
        let (_, coarse) = HermiteSpline::fit(&ts, &pts, 4).unwrap();
        let (_, fine) = HermiteSpline::fit(&ts, &pts, 16).unwrap();
        assert!(fine < coarse / 100.0 && fine < 1e-5, "{coarse} {fine}");
    }

    #[test]
    fn rejects_bad_input() {
        let ts = [0.0, 1.0, 1.0, 2.0];
        let p = [Vec3::ZERO; 4];
        assert!(HermiteSpline::fit(&ts, &p, 1).is_err());
        assert!(HermiteSpline::fit(&[0.0, 1.0], &[Vec3::ZERO; 2], 1).is_err());
    }
}
