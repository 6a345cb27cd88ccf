//! Shared numeric utilities: moments, correlation, ridge solves, polynomial
//! features, and a small Gaussian CI test.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (0 for fewer than two points).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Pearson correlation; 0 when either column is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let (mx, my) = (mean(&xs[..n]), mean(&ys[..n]));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Min-max rescale to [0, 1]; a constant slice maps to all zeros.
pub fn rescale(xs: &mut [f64]) {
    let Some(&min) = xs
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        else {
            return;
        };
    let max = *xs.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
    let span = max - min;
    if span <= 0.0 {
        xs.iter_mut().for_each(|x| *x = 0.0);
    } else {
        xs.iter_mut().for_each(|x| *x = (*x - min) / span);
    }
}

/// Design matrix with an intercept column followed by per-variable powers
/// `x, x^2, ..., x^degree` for each input column (no cross terms).
pub fn polynomial_features(columns: &[&[f64]], rows: usize, degree: usize) -> DMatrix<f64> {
    let p = 1 + columns.len() * degree;
    let mut phi = DMatrix::zeros(rows, p);
    for r in 0..rows {
        phi[(r, 0)] = 1.0;
    }
    for (c, col) in columns.iter().enumerate() {
        for r in 0..rows {
            let mut pw = 1.0;
            for d in 0..degree {
                pw *= col[r];
                phi[(r, 1 + c * degree + d)] = pw;
            }
        }
    }
    phi
}

/// Ridge fit summary: coefficients and residual sum of squares.
pub struct RidgeFit {
    pub coefficients: DVector<f64>,
    pub rss: f64,
    pub rows: usize,
    pub params: usize,
}

/// Solve `(phi' phi + ridge * D) beta = phi' y` with the intercept left
/// unpenalized, via Cholesky.
pub fn ridge_fit(phi: &DMatrix<f64>, y: &[f64], ridge: f64) -> Result<RidgeFit> {
    let rows = phi.nrows();
    let p = phi.ncols();
    if y.len() != rows {
        return Err(Error::invalid("response length does not match design rows"));
    }
    let yv = DVector::from_column_slice(y);
    let mut normal = phi.transpose() * phi;
    for j in 1..p {
        normal[(j, j)] += ridge;
    }
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::degenerate("singular normal equations"))?;
    let beta = chol.solve(&(phi.transpose() * &yv));
    let resid = yv - phi * &beta;
    let rss = resid.dot(&resid);
    Ok(RidgeFit {
        coefficients: beta,
        rss,
        rows,
        params: p,
    })
}

/// Precision matrix of the given columns (covariance ridge-stabilized before
/// inversion).
pub fn precision_matrix(columns: &[Vec<f64>], ridge: f64) -> Result<DMatrix<f64>> {
    let p = columns.len();
    let rows = columns.first().map_or(0, |c| c.len());
    if rows < 2 {
        return Err(Error::degenerate("need at least two rows for a covariance"));
    }
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let mut cov = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let mut s = 0.0;
            for r in 0..rows {
                s += (columns[i][r] - means[i]) * (columns[j][r] - means[j]);
            }
            let v = s / (rows - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    for i in 0..p {
        cov[(i, i)] += ridge;
    }
    cov.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::degenerate("covariance not invertible even with ridge"))
}

/// Fisher-z partial correlation test of `x` and `y` given the `z` columns.
/// Returns the p-value of the zero-partial-correlation null.
pub fn fisher_z_test(x: &[f64], y: &[f64], z: &[&[f64]], ridge: f64) -> Result<f64> {
    let n = x.len();
    if n < z.len() + 4 {
        return Err(Error::degenerate("too few rows for partial correlation"));
    }
    let r = if z.is_empty() {
        correlation(x, y)
    } else {
        let phi = polynomial_features(z, n, 1);
        let rx = ridge_fit(&phi, x, ridge)?;
        let ry = ridge_fit(&phi, y, ridge)?;
        let ex: Vec<f64> = {
            let fitted = phi.clone() * rx.coefficients;
            (0..n).map(|i| x[i] - fitted[i]).collect()
        };
        let ey: Vec<f64> = {
            let fitted = phi * ry.coefficients;
            (0..n).map(|i| y[i] - fitted[i]).collect()
        };
        correlation(&ex, &ey)
    };
    let r = r.clamp(-0.999_999, 0.999_999);
    let df = n as f64 - z.len() as f64 - 3.0;
    if df <= 0.0 {
        return Err(Error::degenerate("non-positive degrees of freedom"));
    }
    let zstat = 0.5 * ((1.0 + r) / (1.0 - r)).ln() * df.sqrt();
    Ok(2.0 * (1.0 - standard_normal_cdf(zstat.abs())))
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rescale_constant_maps_to_zero() {
        let mut xs = vec![3.0, 3.0, 3.0];
        rescale(&mut xs);
        assert_eq!(xs, vec![0.0, 0.0, 0.0]);
        let mut ys = vec![1.0, 3.0, 2.0];
        rescale(&mut ys);
        assert_eq!(ys, vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn ridge_recovers_exact_linear_fit() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let phi = polynomial_features(&[&x], 50, 1);
        let fit = ridge_fit(&phi, &y, 1e-9).unwrap();
        assert_relative_eq!(fit.coefficients[0], -1.0, epsilon = 1e-5);
        assert_relative_eq!(fit.coefficients[1], 2.0, epsilon = 1e-5);
        assert!(fit.rss < 1e-8);
    }

    #[test]
    fn correlation_of_constant_is_zero() {
        assert_eq!(correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), 0.0);
    }
}
