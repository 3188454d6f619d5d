use serde::{Deserialize, Serialize};

use super::frequency::FrequencyVector;

/// A point `(x, y)` of the torus `𝕋²`, stored in `[0, 1)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub x: f64,
    pub y: f64,
}

impl Phase {
    pub fn new(x: f64, y: f64) -> Self {
        Phase {
            x: canonical(x),
            y: canonical(y),
        }
    }

    pub fn origin() -> Self {
        Phase { x: 0.0, y: 0.0 }
    }
}

/// Representative of `t mod 1` in `[0, 1)`.
pub fn canonical(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `t + nω mod 1` with the product `nω` split exactly into a rounded value
/// and its FMA remainder before reduction.
pub fn rotate(t: f64, omega: f64, n: i64) -> f64 {
    let nf = n as f64;
    let p = nf * omega;
    let err = nf.mul_add(omega, -p);
    let frac = p - p.floor();
    canonical(canonical(frac + t) + err)
}

/// `(x + nω₁, y + nω₂) mod 1`.
pub fn orbit(p: Phase, omega: &FrequencyVector, n: i64) -> Phase {
    Phase {
        x: rotate(p.x, omega.omega[0], n),
        y: rotate(p.y, omega.omega[1], n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::weight::torus_distance;
    use num::{BigInt, BigRational, ToPrimitive};

    fn oracle(t: f64, omega: f64, n: i64) -> f64 {
        let exact = BigRational::from_float(t).unwrap()
            + BigRational::from_float(omega).unwrap() * BigRational::from_integer(BigInt::from(n));
        let frac = &exact - exact.floor();
        frac.to_f64().unwrap()
    }

    #[test]
    fn identity_and_rational_period() {
        let p = Phase::new(0.3, 0.7);
        assert_eq!(orbit(p, &FrequencyVector::golden_silver(), 0), p);
        let q = orbit(
            Phase::origin(),
            &FrequencyVector::unchecked([0.25, 0.25]),
            4,
        );
        assert_eq!(q, Phase::origin());
    }

    #[test]
    fn large_n_matches_rational_oracle() {
        let omega = FrequencyVector::golden_silver();
        for &n in &[
            1_000_000i64,
            -1_000_000,
            123_456_789,
            1_000_000_000,
            -999_999_937,
        ] {
            let q = orbit(Phase::origin(), &omega, n);
            assert!(torus_distance(q.x, oracle(0.0, omega.omega[0], n)) < 1e-6);
            assert!(torus_distance(q.y, oracle(0.0, omega.omega[1], n)) < 1e-6);
        }
        let q = orbit(Phase::origin(), &omega, 1_000_000);
        assert!(torus_distance(q.x, oracle(0.0, omega.omega[0], 1_000_000)) < 1e-12);
    }

    #[test]
    fn canonical_range() {
        assert_eq!(canonical(-1e-20), 0.0);
        assert_eq!(canonical(1.0), 0.0);
        assert!((canonical(-0.25) - 0.75).abs() < 1e-16);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn orbit_is_additive(m in -1_000_000i64..=1_000_000, n in -1_000_000i64..=1_000_000,
                                 x in 0.0f64..1.0, y in 0.0f64..1.0) {
                let omega = FrequencyVector::golden_silver();
                let p = Phase::new(x, y);
                let a = orbit(orbit(p, &omega, m), &omega, n);
                let b = orbit(p, &omega, m + n);
                prop_assert!(torus_distance(a.x, b.x) < 1e-9);
                prop_assert!(torus_distance(a.y, b.y) < 1e-9);
            }
        }
    }
}
