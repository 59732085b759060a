//! Banded LU factorisation with partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout: column-major with leading
//! dimension `2 kl + ku + 1`, entry `(i, j)` at row `kl + ku + i − j`, and the
//! top `kl` rows reserved for fill-in.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub(crate) fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    #[inline]
    fn pos(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ldab
    }

    #[inline]
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i <= j + self.kl && j <= i + self.ku, "({i}, {j}) outside band");
        let p = self.pos(i, j);
        self.data[p] += v;
    }

    #[cfg(test)]
    fn get(&self, i: usize, j: usize) -> f64 {
        if i > j + self.kl || j > i + self.ku {
            0.0
        } else {
            self.data[self.pos(i, j)]
        }
    }

    /// Solves `A x = b`, overwriting `b` with `x` and `self` with the factors.
    pub(crate) fn solve_in_place(&mut self, b: &mut [f64]) -> Result<()> {
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        let ld = self.ldab;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let mut jp = 0;
            let mut best = self.data[col].abs();
            for k in 1..=km {
                let v = self.data[col + k].abs();
                if v > best {
                    best = v;
                    jp = k;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::Singular { column: j });
            }
            ipiv[j] = j + jp;
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = kv + j - c + c * ld;
                    self.data.swap(a, a + jp);
                }
            }
            let pivot = self.data[col];
            for k in 1..=km {
                self.data[col + k] /= pivot;
            }
            for c in (j + 1)..=ju {
                let top = kv + j - c + c * ld;
                let ajc = self.data[top];
                if ajc != 0.0 {
                    for k in 1..=km {
                        self.data[top + k] -= self.data[col + k] * ajc;
                    }
                }
            }
        }
        for j in 0..n {
            b.swap(j, ipiv[j]);
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let bj = b[j];
            if bj != 0.0 {
                for k in 1..=km {
                    b[j + k] -= self.data[col + k] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let col = j * ld + kv;
            b[j] /= self.data[col];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.data[col + i - j] * bj;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize, dominant: bool) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.add(i, j, rng.random_range(-1.0..1.0));
            }
            if dominant {
                a.add(i, i, (kl + ku + 1) as f64);
            }
        }
        a
    }

    fn matvec(a: &BandMatrix, x: &[f64]) -> Vec<f64> {
        (0..a.n).map(|i| (0..a.n).map(|j| a.get(i, j) * x[j]).sum()).collect()
    }

    #[test]
    fn solves_random_banded_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(n, kl, ku, dom) in &[
            (1, 0, 0, true),
            (7, 1, 1, false),
            (30, 4, 2, false),
            (50, 7, 7, true),
            (12, 11, 11, false),
        ] {
            let a = random_band(&mut rng, n, kl, ku, dom);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut b = matvec(&a, &x);
            let mut f = a.clone();
            f.solve_in_place(&mut b).unwrap();
            let err = x.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(err < 1e-8, "n={n} kl={kl} ku={ku}: {err}");
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let mut b = [2.0, 3.0];
        a.solve_in_place(&mut b).unwrap();
        assert_eq!(b, [3.0, 2.0]);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 0, 1.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        let mut b = [1.0, 1.0];
        assert!(matches!(a.solve_in_place(&mut b), Err(Error::Singular { .. })));
    }
}
