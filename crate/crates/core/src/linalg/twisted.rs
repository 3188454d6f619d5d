/// A vector stored as `sign · exp(log_abs)` so that components far below
/// the `f64` range keep their relative accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct LogVector {
    pub log_abs: Vec<f64>,
    pub sign: Vec<f64>,
}

impl LogVector {
    pub fn len(&self) -> usize {
        self.log_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_abs.is_empty()
    }

    /// `log ‖z‖₂` with optional weights `Σ w_i z_i²`.
    pub fn log_norm(&self, w: Option<&[f64]>) -> f64 {
        let top = self
            .log_abs
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = self
            .log_abs
            .iter()
            .enumerate()
            .map(|(i, &l)| (2.0 * (l - top)).exp() * w.map_or(1.0, |w| w[i]))
            .sum();
        top + 0.5 * s.ln()
    }

    /// Shifts every magnitude by `−log_norm` so the (weighted) norm becomes 1.
    pub fn normalize(&mut self, w: Option<&[f64]>) {
        let ln = self.log_norm(w);
        for l in &mut self.log_abs {
            *l -= ln;
        }
    }

    /// Flips signs so the first nonzero component is positive.
    pub fn fix_sign(&mut self) {
        if let Some(i) = self.log_abs.iter().position(|l| l.is_finite()) {
            if self.sign[i] < 0.0 {
                for s in &mut self.sign {
                    *s = -*s;
                }
            }
        }
    }

    /// Plain `f64` components; entries below the normal range become 0.
    pub fn to_f64(&self) -> Vec<f64> {
        self.log_abs
            .iter()
            .zip(&self.sign)
            .map(|(&l, &s)| s * l.exp())
            .collect()
    }

    pub fn from_f64(v: &[f64]) -> Self {
        LogVector {
            log_abs: v.iter().map(|x| x.abs().ln()).collect(),
            sign: v
                .iter()
                .map(|x| if *x < 0.0 { -1.0 } else { 1.0 })
                .collect(),
        }
    }
}

fn pivot_floor(a: &[f64], e: &[f64]) -> f64 {
    let scale = a.iter().chain(e.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
}

fn guard(q: f64, floor: f64) -> f64 {
    if q.abs() < floor {
        if q < 0.0 {
            -floor
        } else {
            floor
        }
    } else {
        q
    }
}

/// Pivots of the top-down (`D⁺`) and bottom-up (`D⁻`) factorizations of
/// the symmetric tridiagonal matrix with diagonal `a` and off-diagonal `e`,
/// and the twist values `γ_k = D⁺_k + D⁻_k − a_k = 1 / (T⁻¹)_{kk}`.
pub struct TwistedPivots {
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    pub gamma: Vec<f64>,
}

pub fn twisted_pivots(a: &[f64], e: &[f64]) -> TwistedPivots {
    let n = a.len();
    let floor = pivot_floor(a, e);
    let mut forward = vec![0.0; n];
    let mut backward = vec![0.0; n];
    forward[0] = guard(a[0], floor);
    for i in 1..n {
        forward[i] = guard(a[i] - e[i - 1] * e[i - 1] / forward[i - 1], floor);
    }
    backward[n - 1] = guard(a[n - 1], floor);
    for i in (0..n - 1).rev() {
        backward[i] = guard(a[i] - e[i] * e[i] / backward[i + 1], floor);
    }
    let gamma = (0..n).map(|k| forward[k] + backward[k] - a[k]).collect();
    TwistedPivots {
        forward,
        backward,
        gamma,
    }
}

/// Column `k` of `T⁻¹` up to the factor `1/γ_k`, in log form:
/// `z_k = 1`, `z_i = −e_i z_{i+1} / D⁺_i` above and
/// `z_{i+1} = −e_i z_i / D⁻_{i+1}` below the twist.
pub fn twisted_column(e: &[f64], piv: &TwistedPivots, k: usize) -> LogVector {
    let n = piv.forward.len();
    let mut log_abs = vec![0.0; n];
    let mut sign = vec![1.0; n];
    for i in (0..k).rev() {
        let r = -e[i] / piv.forward[i];
        log_abs[i] = log_abs[i + 1] + r.abs().ln();
        sign[i] = sign[i + 1] * r.signum();
    }
    for i in k..n - 1 {
        let r = -e[i] / piv.backward[i + 1];
        log_abs[i + 1] = log_abs[i] + r.abs().ln();
        sign[i + 1] = sign[i] * r.signum();
    }
    LogVector { log_abs, sign }
}

/// Approximate null vector of the (shifted) tridiagonal matrix with
/// diagonal `a`: the twisted column at `argmin_k |γ_k|`, unnormalized.
pub fn twisted_null_vector(a: &[f64], e: &[f64]) -> (LogVector, usize) {
    let piv = twisted_pivots(a, e);
    let k = piv
        .gamma
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    (twisted_column(e, &piv, k), k)
}

/// Full inverse of the symmetric tridiagonal matrix (diagonal `a`,
/// off-diagonal `e`) as a row-major dense matrix. Entry `(i, j)` with
/// `i ≤ j` is `(1/γ_j) Π_{l=i}^{j−1} (−e_l / D⁺_l)`, accumulated in log
/// form so off-diagonal entries keep relative accuracy down to underflow;
/// the lower triangle mirrors the upper one.
pub fn tridiagonal_inverse(a: &[f64], e: &[f64]) -> Vec<f64> {
    let n = a.len();
    let piv = twisted_pivots(a, e);
    let ratios: Vec<(f64, f64)> = (0..n.saturating_sub(1))
        .map(|l| {
            let r = -e[l] / piv.forward[l];
            (r.abs().ln(), r.signum())
        })
        .collect();
    let mut g = vec![0.0; n * n];
    for j in 0..n {
        let gj = 1.0 / piv.gamma[j];
        let (mut log_abs, mut sign) = (gj.abs().ln(), gj.signum());
        g[j * n + j] = gj;
        for i in (0..j).rev() {
            log_abs += ratios[i].0;
            sign *= ratios[i].1;
            let v = sign * log_abs.exp();
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(a: &[f64], e: &[f64]) -> nalgebra::DMatrix<f64> {
        let n = a.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                a[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn inverse_matches_dense_lu() {
        let a = [3.0, -1.5, 2.25, 0.7, 4.0];
        let e = [-1.0, 0.5, -1.0, -2.0];
        let g = tridiagonal_inverse(&a, &e);
        let oracle = dense(&a, &e).try_inverse().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((g[i * 5 + j] - oracle[(i, j)]).abs() < 1e-13 * oracle.amax());
            }
        }
    }

    #[test]
    fn inverse_keeps_tiny_entries() {
        let n = 120;
        let a = vec![1e4; n];
        let e = vec![-1.0; n - 1];
        let g = tridiagonal_inverse(&a, &e);
        // far entries ≈ r^{|i−j|}/√(a²−4) with r the small root
        let r = 2.0 / (1e4 + (1e8f64 - 4.0).sqrt());
        let expect = r.powi(60) / (1e8f64 - 4.0).sqrt();
        let got = g[30 * n + 90];
        assert!(expect > 0.0 && (got - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn null_vector_of_singular_matrix() {
        // Laplacian eigenvector for the smallest eigenvalue
        let n = 7;
        let mu = -2.0 * (std::f64::consts::PI / 8.0).cos();
        let a = vec![-mu; n];
        let e = vec![-1.0; n - 1];
        let (mut z, _) = twisted_null_vector(&a, &e);
        z.normalize(None);
        z.fix_sign();
        let v = z.to_f64();
        let norm: f64 = (1..=n)
            .map(|k| (std::f64::consts::PI * k as f64 / 8.0).sin().powi(2))
            .sum::<f64>()
            .sqrt();
        for (k, x) in v.iter().enumerate() {
            let exact = (std::f64::consts::PI * (k + 1) as f64 / 8.0).sin() / norm;
            assert!((x - exact).abs() < 1e-12);
        }
    }
}
