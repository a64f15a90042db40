//! Gaussian quadrature rules generated by the Golub-Welsch method.
//!
//! Nodes are eigenvalues of the Jacobi matrix of the orthogonal-polynomial
//! recurrence; weights come from the first components of the eigenvectors,
//! computed by an implicit-shift QL sweep on the symmetric tridiagonal
//! matrix. Weights are returned normalized to sum to one, i.e. as the
//! probability weights of the normalized weight measure.

use crate::error::{CoreError, Result};

/// Gauss-Hermite rule for the weight `exp(-x^2)`.
///
/// The normalized weights turn the rule into an expectation against a
/// centered normal with variance 1/2: `sum_i w_i f(x_i) ~ E[f(X)]`,
/// `X ~ N(0, 1/2)`.
pub fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(CoreError::Invalid { what: "quadrature order", detail: "order must be >= 1".into() });
    }
    let mut diag = vec![0.0; order];
    let mut off: Vec<f64> = (0..order).map(|i| (i as f64 / 2.0).sqrt()).collect();
    off.rotate_left(1); // off[i] couples node i and i+1
    golub_welsch(&mut diag, &mut off)
}

/// Generalized Gauss-Laguerre rule for the weight `x^alpha exp(-x)`, alpha > -1.
///
/// With normalized weights the rule is an expectation against a
/// Gamma(alpha + 1, 1) distribution.
pub fn gauss_gen_laguerre(order: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || alpha <= -1.0 {
        return Err(CoreError::Invalid {
            what: "quadrature rule",
            detail: format!("order {order} and alpha {alpha} must satisfy order >= 1, alpha > -1"),
        });
    }
    let mut diag: Vec<f64> = (0..order).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let mut off: Vec<f64> = (1..order)
        .map(|i| (i as f64 * (i as f64 + alpha)).sqrt())
        .collect();
    off.push(0.0);
    golub_welsch(&mut diag, &mut off)
}

fn golub_welsch(diag: &mut [f64], off: &mut [f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    imtqlx(diag, off, &mut z)?;
    let mut wsum = 0.0;
    let weights: Vec<f64> = z
        .iter()
        .map(|zi| {
            let w = zi * zi;
            wsum += w;
            w
        })
        .collect();
    // z is a unit vector up to roundoff; renormalize so the weights are an
    // exact probability vector.
    let weights = weights.into_iter().map(|w| w / wsum).collect();
    Ok((diag.to_vec(), weights))
}

/// Implicit-shift QL iteration for a symmetric tridiagonal matrix.
///
/// On return `d` holds the eigenvalues in ascending order and `z` the first
/// component of each normalized eigenvector. `e[i]` is the coupling between
/// rows i and i+1 (the last entry is scratch).
fn imtqlx(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let prec = f64::EPSILON;
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iters = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= prec * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iters >= 50 {
                return Err(CoreError::NoConvergence {
                    what: "tridiagonal QL iteration",
                    detail: format!("row {l} of {n} did not deflate"),
                });
            }
            iters += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                if g.abs() <= f.abs() {
                    c = g / f;
                    r = (c * c + 1.0).sqrt();
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = (s * s + 1.0).sqrt();
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    for i in 1..n {
        let dv = d[i];
        let zv = z[i];
        let mut j = i;
        while j > 0 && d[j - 1] > dv {
            d[j] = d[j - 1];
            z[j] = z[j - 1];
            j -= 1;
        }
        d[j] = dv;
        z[j] = zv;
    }
    Ok(())
}
