use crate::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal pencil
/// `T − x·W` below zero, where `T` has diagonal `d` and off-diagonal `e`
/// and `W = diag(w)` (identity when `w` is `None`).
///
/// By Sylvester's law of inertia this is the number of eigenvalues of
/// `W^{-1/2} T W^{-1/2}` below `x`.
pub fn negcount(d: &[f64], e: &[f64], w: Option<&[f64]>, x: f64) -> usize {
    let n = d.len();
    let emax = e.iter().fold(0.0f64, |m, v| m.max(v * v));
    let pivmin = f64::MIN_POSITIVE * emax.max(1.0);
    let shift = |i: usize| d[i] - x * w.map_or(1.0, |w| w[i]);
    let mut count = 0;
    let mut q = shift(0);
    for i in 0..n {
        if i > 0 {
            q = shift(i) - e[i - 1] * e[i - 1] / q;
        }
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum of a symmetric tridiagonal matrix.
pub fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest (0-based) eigenvalue inside `[lo, hi]`, given
/// `negcount(lo) ≤ k < negcount(hi)`. Stops at relative width `2ε`, when
/// the midpoint is no longer representable, or after 300 halvings.
pub fn bisect_eigenvalue(
    d: &[f64],
    e: &[f64],
    w: Option<&[f64]>,
    k: usize,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        if negcount(d, e, w, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues of the pencil `(T, W)` in ascending order by bisection
/// inside `[lo, hi]`, which must contain the whole spectrum.
pub fn bisect_all(d: &[f64], e: &[f64], w: Option<&[f64]>, lo: f64, hi: f64) -> Vec<f64> {
    (0..d.len())
        .map(|k| bisect_eigenvalue(d, e, w, k, lo, hi))
        .collect()
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts, sorted ascending.
pub fn ql_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: e.len(),
        });
    }
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Numerical("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// QL eigenvalues polished by bisection on Sturm counts, which gives each
/// eigenvalue to high relative accuracy for graded matrices.
pub fn refined_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let rough = ql_eigenvalues(d, e)?;
    let (glo, ghi) = gershgorin(d, e);
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(rough.len());
    for (k, &mu) in rough.iter().enumerate() {
        let mut r = 64.0 * f64::EPSILON * scale;
        let (mut lo, mut hi) = (mu - r, mu + r);
        while !(negcount(d, e, None, lo) <= k && negcount(d, e, None, hi) > k) {
            r *= 4.0;
            lo = (mu - r).max(glo - r);
            hi = (mu + r).min(ghi + r);
            if r > 4.0 * (ghi - glo + 1.0) {
                lo = glo - 1.0;
                hi = ghi + 1.0;
                break;
            }
        }
        out.push(bisect_eigenvalue(d, e, None, k, lo, hi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn laplacian_closed_form() {
        let n = 50;
        let d = vec![0.0; n];
        let e = vec![-1.0; n - 1];
        let ql = ql_eigenvalues(&d, &e).unwrap();
        let bis = bisect_all(&d, &e, None, -2.5, 2.5);
        for k in 0..n {
            let exact = -2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((ql[k] - exact).abs() < 1e-13);
            assert!((bis[k] - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n: usize = rng.gen_range(1..60);
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1))
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect();
            let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    d[i]
                } else if i + 1 == j {
                    e[i]
                } else if j + 1 == i {
                    e[j]
                } else {
                    0.0
                }
            });
            let mut oracle: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
            oracle.sort_by(f64::total_cmp);
            let ours = refined_eigenvalues(&d, &e).unwrap();
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-11 * 50.0);
            }
        }
    }

    #[test]
    fn weighted_count_is_pencil_inertia() {
        // (T, W) with T = diag(2, 6), W = diag(1, 2): eigenvalues 2 and 3
        let d = [2.0, 6.0];
        let e = [0.0];
        let w = [1.0, 2.0];
        assert_eq!(negcount(&d, &e, Some(&w), 1.9), 0);
        assert_eq!(negcount(&d, &e, Some(&w), 2.5), 1);
        assert_eq!(negcount(&d, &e, Some(&w), 3.1), 2);
    }

    #[test]
    fn graded_eigenvalues_keep_relative_accuracy() {
        let d = [1e10, 1.0, 1e-6];
        let e = [1e2, 1e-4];
        let ev = refined_eigenvalues(&d, &e).unwrap();
        let dense = nalgebra::Matrix3::new(1e10, 1e2, 0.0, 1e2, 1.0, 1e-4, 0.0, 1e-4, 1e-6);
        let det = dense.determinant();
        let prod: f64 = ev.iter().product();
        assert!((prod - det).abs() < 1e-8 * det.abs());
    }
}
