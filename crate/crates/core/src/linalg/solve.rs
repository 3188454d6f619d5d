use crate::{Error, Result};

/// Partial-pivoting LU of a general tridiagonal matrix (row interchanges
/// introduce one extra superdiagonal).
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Factors the symmetric tridiagonal matrix with diagonal `a` and
    /// off-diagonal `e`.
    pub fn factor(a: &[f64], e: &[f64]) -> Result<Self> {
        let n = a.len();
        if e.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                found: e.len(),
            });
        }
        let mut u0 = a.to_vec();
        let mut u1 = e.to_vec();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = e.to_vec();
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dl[i].abs() > u0[i].abs() {
                swapped[i] = true;
                let f = u0[i] / dl[i];
                u0[i] = dl[i];
                let t = u0[i + 1];
                u0[i + 1] = u1[i] - f * t;
                u1[i] = t;
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] = -f * u2[i];
                }
                l[i] = f;
            } else {
                let f = if u0[i] != 0.0 { dl[i] / u0[i] } else { 0.0 };
                u0[i + 1] -= f * u1[i];
                l[i] = f;
            }
            dl[i] = 0.0;
        }
        if u0.contains(&0.0) {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        Ok(TridiagonalLu {
            l,
            u0,
            u1,
            u2,
            swapped,
        })
    }

    pub fn solve(&self, rhs: &mut [f64]) {
        let n = self.u0.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
                rhs[i + 1] -= self.l[i] * rhs[i];
            } else {
                rhs[i + 1] -= self.l[i] * rhs[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = s / self.u0[i];
        }
    }

    /// Dense row-major inverse, one column per solve.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.u0.len();
        let mut g = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            self.solve(&mut col);
            for i in 0..n {
                g[i * n + j] = col[i];
            }
        }
        g
    }
}

/// `LDLᵀ` solve of the symmetric tridiagonal system; falls back to
/// partial-pivoting LU when a pivot is small relative to the matrix scale.
pub fn solve_symmetric(a: &[f64], e: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    if e.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: e.len(),
        });
    }
    let scale = a.iter().chain(e).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut d = vec![0.0; n];
    let mut stable = true;
    for i in 0..n {
        d[i] = if i == 0 {
            a[0]
        } else {
            a[i] - e[i - 1] * e[i - 1] / d[i - 1]
        };
        if d[i].abs() < 1e-8 * scale {
            stable = false;
            break;
        }
    }
    if !stable {
        let lu = TridiagonalLu::factor(a, e)?;
        let mut x = rhs.to_vec();
        lu.solve(&mut x);
        return Ok(x);
    }
    let mut y = rhs.to_vec();
    for i in 1..n {
        y[i] -= e[i - 1] / d[i - 1] * y[i - 1];
    }
    for i in 0..n {
        y[i] /= d[i];
    }
    for i in (0..n - 1).rev() {
        y[i] -= e[i] / d[i] * y[i + 1];
    }
    Ok(y)
}
