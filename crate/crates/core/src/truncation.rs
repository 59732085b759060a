//! Truncations, cutoffs and sign functions used by renormalized formulations.

/// Truncation level `k > 0` for [`t_k`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TruncationLevel(f64);

impl TruncationLevel {
    pub fn new(k: f64) -> Option<Self> {
        (k > 0.0 && !k.is_nan()).then_some(TruncationLevel(k))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn apply(self, r: f64) -> f64 {
        t_k(r, self.0)
    }
}

/// Clamp of `r` to `[−k, k]`.
#[inline]
pub fn t_k(r: f64, k: f64) -> f64 {
    r.max(-k).min(k)
}

/// `min((l + 1 − |r|)⁺, 1)`: one on `[−l, l]`, linear ramp to zero on
/// `l ≤ |r| ≤ l + 1`.
#[inline]
pub fn h_l(r: f64, l: f64) -> f64 {
    (l + 1.0 - r.abs()).clamp(0.0, 1.0)
}

/// Weak derivative of [`h_l`]: `−sgn(r)` on `l < |r| < l + 1`, zero elsewhere.
#[inline]
pub fn h_l_derivative(r: f64, l: f64) -> f64 {
    let a = r.abs();
    if a > l && a < l + 1.0 {
        -sign0(r)
    } else {
        0.0
    }
}

/// Lipschitz approximation of [`sign0_plus`]: 0 below zero, `r/σ` on
/// `[0, σ]`, 1 above.
#[inline]
pub fn h_sigma_plus(r: f64, sigma: f64) -> f64 {
    if r < 0.0 {
        0.0
    } else if r <= sigma {
        r / sigma
    } else {
        1.0
    }
}

/// Odd saturating ramp: −1 below `−σ`, `r/σ` on `[−σ, σ]`, 1 above.
#[inline]
pub fn h_sigma(r: f64, sigma: f64) -> f64 {
    if r < -sigma {
        -1.0
    } else if r <= sigma {
        r / sigma
    } else {
        1.0
    }
}

#[inline]
pub fn sign0(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub fn sign0_plus(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truncation_examples() {
        assert_eq!(t_k(5.0, 2.0), 2.0);
        assert_eq!(t_k(0.0, 1.0), 0.0);
        assert_eq!(t_k(-3.5, 1.5), -1.5);
        assert_eq!(TruncationLevel::new(2.0).unwrap().apply(-7.0), -2.0);
        assert!(TruncationLevel::new(0.0).is_none());
        assert!(TruncationLevel::new(f64::NAN).is_none());
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(h_l(0.5, 1.0), 1.0);
        assert_eq!(h_l(1.5, 1.0), 0.5);
        assert_eq!(h_l(10.0, 1.0), 0.0);
        assert_eq!(h_l_derivative(1.5, 1.0), -1.0);
        assert_eq!(h_l_derivative(-1.5, 1.0), 1.0);
        assert_eq!(h_l_derivative(0.5, 1.0), 0.0);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(h_sigma_plus(-1.0, 0.5), 0.0);
        assert_eq!(h_sigma_plus(0.25, 0.5), 0.5);
        assert_eq!(h_sigma_plus(2.0, 0.5), 1.0);
        assert_eq!(sign0(0.0), 0.0);
        assert_eq!(sign0_plus(-3.0), 0.0);
        assert_eq!(sign0_plus(0.0), 0.0);
        assert_eq!(h_sigma(-0.25, 0.5), -0.5);
    }

    #[test]
    fn ramp_tends_to_sign() {
        let samples = [-2.0, -0.3, -1e-3, 1e-3, 0.05, 0.7, 3.0];
        for &r in &samples {
            let errs: std::vec::Vec<f64> = [1.0, 0.1, 0.01]
                .iter()
                .map(|&s| (h_sigma_plus(r, s) - sign0_plus(r)).abs())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] <= w[0]), "r = {r}: {errs:?}");
        }
        for &r in &[-1.0, -0.05, 0.02, 0.5] {
            assert_eq!(h_sigma_plus(r, 0.01), sign0_plus(r));
        }
    }

    proptest! {
        #[test]
        fn truncation_bounds(r in -1e3f64..1e3, s in -1e3f64..1e3, k in 1e-3f64..1e2) {
            let t = t_k(r, k);
            prop_assert!(t.abs() <= r.abs().min(k));
            prop_assert!((t_k(r, k) - t_k(s, k)).abs() <= (r - s).abs());
            prop_assert_eq!(t_k(-r, k), -t);
            if r.abs() <= k {
                prop_assert_eq!(t, r);
            }
        }

        #[test]
        fn cutoff_support(r in -50.0f64..50.0, l in 0.0f64..20.0) {
            let h = h_l(r, l);
            prop_assert!((0.0..=1.0).contains(&h));
            if r.abs() > l + 1.0 {
                prop_assert_eq!(h, 0.0);
            }
            prop_assert_eq!(h == 1.0, r.abs() <= l);
        }
    }
}
