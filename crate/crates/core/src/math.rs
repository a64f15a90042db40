//! Small numerical utilities: normal distribution kernels, exact binomial
//! coefficients, a dense linear solver for the LSM regressions, and the FNV
//! hash used for fingerprints.

/// Standard normal cumulative distribution function.
///
/// Computed through the complementary error function so both tails keep full
/// relative accuracy.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal probability density function.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Exact binomial coefficient with overflow detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binomial {
    pub value: u128,
    /// True when the exact value exceeded `u128` and `value` saturated.
    pub saturated: bool,
}

impl Binomial {
    pub fn as_f64(&self) -> f64 {
        if self.saturated {
            f64::INFINITY
        } else {
            self.value as f64
        }
    }
}

impl std::fmt::Display for Binomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.saturated {
            write!(f, ">= {}", u128::MAX)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// C(n, k) in exact integer arithmetic. Each prefix product C(n, i) is itself
/// a binomial coefficient, so the running division is always exact.
pub fn binomial(n: u64, k: u64) -> Binomial {
    if k > n {
        return Binomial { value: 0, saturated: false };
    }
    let k = k.min(n - k);
    let mut value: u128 = 1;
    for i in 1..=k {
        let num = (n - k + i) as u128;
        match value.checked_mul(num) {
            Some(v) => value = v / i as u128,
            None => return Binomial { value: u128::MAX, saturated: true },
        }
    }
    Binomial { value, saturated: false }
}

/// FNV-1a over a byte stream; used to fingerprint model inputs.
#[derive(Debug, Clone)]
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x1000_0000_01b3);
        }
    }

    pub fn write_f64(&mut self, x: f64) {
        self.write(&x.to_le_bytes());
    }

    pub fn write_u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

/// Solves `A x = b` for a small dense symmetric system by Gaussian
/// elimination with partial pivoting. Returns `None` when the pivot drops
/// below a rank tolerance.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    let scale: f64 = m
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .fold((col, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot < 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2).value, 10);
        assert_eq!(binomial(32, 3).value, 4960);
        assert_eq!(binomial(33, 4).value, 40920);
        assert_eq!(binomial(10, 0).value, 1);
        assert_eq!(binomial(3, 7).value, 0);
    }

    #[test]
    fn binomial_saturates_instead_of_wrapping() {
        let b = binomial(300, 150);
        assert!(b.saturated);
        assert!(b.as_f64().is_infinite());
    }

    #[test]
    fn norm_cdf_matches_quadrature_oracle() {
        // Independent oracle: Simpson integration of the density on [0, |x|].
        fn phi_simpson(x: f64) -> f64 {
            let a = x.abs();
            let n = 4000;
            let h = a / n as f64;
            let mut s = norm_pdf(0.0) + norm_pdf(a);
            for i in 1..n {
                let w = if i % 2 == 0 { 2.0 } else { 4.0 };
                s += w * norm_pdf(i as f64 * h);
            }
            let half = s * h / 3.0;
            if x >= 0.0 {
                0.5 + half
            } else {
                0.5 - half
            }
        }
        for &x in &[-3.0, -1.2345, -0.1, 0.0, 0.5, 1.0, 2.5, 4.0] {
            assert!((norm_cdf(x) - phi_simpson(x)).abs() < 1e-12, "x = {x}");
        }
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn solve_dense_recovers_known_solution() {
        let a = vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let x_true = [1.0, -2.0, 3.0];
        let b: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(x_true.iter()).map(|(a, x)| a * x).sum())
            .collect();
        let x = solve_dense(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_dense_rejects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_dense(&a, &[1.0, 2.0]).is_none());
    }
}
