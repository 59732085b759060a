//! Discrete Poincaré and anisotropic Sobolev ratios.
//!
//! The ratios are measurements on given fields. Taking the supremum over a
//! test set gives an empirical estimate of the embedding constant, not a
//! certified value.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::anchors;
use crate::error::{Error, Result};
use crate::flux::AnisotropicExponents;
use crate::grid::{derivative_norm, lp_norm, GridFunction};

fn check_field(u: &GridFunction) -> Result<()> {
    if u.max_abs() == 0.0 {
        return Err(Error::ZeroField);
    }
    if !u.is_dirichlet() {
        return Err(Error::NotDirichlet);
    }
    Ok(())
}

/// `‖u‖_q / ‖∂_i u‖_{p_i}`.
pub fn poincare_ratio(u: &GridFunction, q: f64, axis: usize, p_i: f64) -> Result<f64> {
    check_field(u)?;
    if axis >= u.grid().dim() {
        return Err(Error::param(format!("axis {axis} out of range")));
    }
    let du = derivative_norm(u, axis, p_i)?;
    if du == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(lp_norm(u, q)? / du)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingEntry {
    pub name: String,
    pub anchor: &'static str,
    pub q: f64,
    pub p: Vec<f64>,
    pub ratio: f64,
}

/// Measured ratios, with the worst (largest) value per inequality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingReport {
    pub entries: Vec<EmbeddingEntry>,
}

impl EmbeddingReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: EmbeddingEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: EmbeddingReport) {
        self.entries.extend(other.entries);
    }

    /// Largest ratio recorded under `name`, the measured constant.
    pub fn worst(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| e.name == name)
            .map(|e| e.ratio)
            .reduce(f64::max)
    }
}

pub const POINCARE: &str = "poincare";
pub const SOBOLEV_GEOMETRIC: &str = "sobolev geometric";
pub const SOBOLEV_ARITHMETIC: &str = "sobolev arithmetic";

/// Sobolev ratios of one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevRatios {
    pub q: f64,
    /// `‖u‖_q / Π_i ‖∂_i u‖_{p_i}^{1/N}`.
    pub geometric: f64,
    /// `‖u‖_q / ((1/N) Σ_i ‖∂_i u‖_{p_i})`.
    pub arithmetic: f64,
}

/// Geometric- and arithmetic-mean Sobolev ratios. The exponent is `p̄*`
/// when `p̄ < N`; otherwise `q` must be given. Since the geometric mean of
/// the derivative norms never exceeds their arithmetic mean, the geometric
/// ratio is at least the arithmetic one; a violation is reported as an
/// error.
pub fn sobolev_anisotropic_check(
    u: &GridFunction,
    exponents: &AnisotropicExponents,
    q: Option<f64>,
) -> Result<SobolevRatios> {
    check_field(u)?;
    let n = u.grid().dim();
    if exponents.dim() != n {
        return Err(Error::param(format!(
            "{} exponents for a {n}-dimensional grid",
            exponents.dim()
        )));
    }
    let q = match (q, exponents.p_bar_star()) {
        (Some(q), _) => q,
        (None, Some(s)) => s,
        (None, None) => return Err(Error::param("p̄ ≥ N: an explicit finite q is required")),
    };
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::param(format!("q = {q} must be finite and ≥ 1")));
    }
    let norms = (0..n)
        .map(|i| derivative_norm(u, i, exponents.p()[i]))
        .collect::<Result<Vec<_>>>()?;
    let uq = lp_norm(u, q)?;
    // log-sum keeps the product finite for many axes
    let geo_mean = libm::exp(norms.iter().map(|v| libm::log(*v)).sum::<f64>() / n as f64);
    let arith_mean = norms.iter().sum::<f64>() / n as f64;
    if arith_mean == 0.0 {
        return Err(Error::ZeroField);
    }
    let r = SobolevRatios {
        q,
        geometric: uq / geo_mean,
        arithmetic: uq / arith_mean,
    };
    if r.arithmetic > r.geometric * (1.0 + 1e-12) {
        return Err(Error::param(format!(
            "arithmetic ratio {} exceeds geometric ratio {}",
            r.arithmetic, r.geometric
        )));
    }
    Ok(r)
}

/// Poincaré ratios on every axis (with `q = p_i`) and both Sobolev ratios
/// for each field; Sobolev rows are skipped when no exponent applies.
pub fn measure(fields: &[GridFunction], exponents: &AnisotropicExponents, q: Option<f64>) -> Result<EmbeddingReport> {
    let mut rep = EmbeddingReport::new();
    let p = exponents.p().to_vec();
    for u in fields {
        for (i, &pi) in p.iter().enumerate() {
            rep.push(EmbeddingEntry {
                name: POINCARE.into(),
                anchor: anchors::POINCARE,
                q: pi,
                p: alloc::vec![pi],
                ratio: poincare_ratio(u, pi, i, pi)?,
            });
        }
        if q.is_some() || exponents.p_bar_star().is_some() {
            let s = sobolev_anisotropic_check(u, exponents, q)?;
            rep.push(EmbeddingEntry {
                name: SOBOLEV_GEOMETRIC.into(),
                anchor: anchors::SOBOLEV_GEOMETRIC,
                q: s.q,
                p: p.clone(),
                ratio: s.geometric,
            });
            rep.push(EmbeddingEntry {
                name: SOBOLEV_ARITHMETIC.into(),
                anchor: anchors::SOBOLEV_ARITHMETIC,
                q: s.q,
                p: p.clone(),
                ratio: s.arithmetic,
            });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;

    #[test]
    fn sine_poincare_ratio() {
        for n in [16, 64, 256] {
            let g = Grid::unit(&[n]).unwrap();
            let u = GridFunction::dirichlet_from_fn(&g, |x| libm::sin(PI * x[0]));
            let r = poincare_ratio(&u, 2.0, 0, 2.0).unwrap();
            assert!((r - 1.0 / PI).abs() <= 2.0 / n as f64, "n={n}: {r}");
        }
    }

    #[test]
    fn ratios_are_scale_invariant() {
        let g = Grid::unit(&[20, 14]).unwrap();
        let u = GridFunction::dirichlet_from_fn(&g, |x| x[0] * (1.0 - x[0]) * libm::sin(PI * x[1]) + 0.1);
        let e = AnisotropicExponents::new(&[1.5, 1.8]).unwrap();
        let a = sobolev_anisotropic_check(&u, &e, None).unwrap();
        let b = sobolev_anisotropic_check(&u.map(|v| -7.5 * v), &e, None).unwrap();
        assert!((a.geometric - b.geometric).abs() < 1e-12 * a.geometric);
        assert!((a.arithmetic - b.arithmetic).abs() < 1e-12 * a.arithmetic);
        assert!(a.arithmetic <= a.geometric);
        let p = poincare_ratio(&u, 3.0, 1, 1.8).unwrap();
        let pc = poincare_ratio(&u.map(|v| 0.01 * v), 3.0, 1, 1.8).unwrap();
        assert!((p - pc).abs() < 1e-12 * p);
    }

    #[test]
    fn errors() {
        let g = Grid::unit(&[8]).unwrap();
        assert!(matches!(
            poincare_ratio(&GridFunction::zeros(&g), 2.0, 0, 2.0),
            Err(Error::ZeroField)
        ));
        assert!(matches!(
            poincare_ratio(&GridFunction::constant(&g, 1.0), 2.0, 0, 2.0),
            Err(Error::NotDirichlet)
        ));
        let u = GridFunction::dirichlet_from_fn(&g, |x| x[0] * (1.0 - x[0]));
        let e = AnisotropicExponents::new(&[2.0]).unwrap();
        assert!(sobolev_anisotropic_check(&u, &e, None).is_err());
        assert!(sobolev_anisotropic_check(&u, &e, Some(4.0)).is_ok());
    }

    #[test]
    fn radial_bump_is_stable_under_refinement() {
        let e = AnisotropicExponents::new(&[2.0, 2.0, 2.0]).unwrap();
        let ratio = |n: usize| {
            let g = Grid::unit(&[n, n, n]).unwrap();
            let u = GridFunction::dirichlet_from_fn(&g, |x| {
                let r2: f64 = x.iter().map(|c| (c - 0.5) * (c - 0.5)).sum();
                (0.25 - r2).max(0.0)
            });
            sobolev_anisotropic_check(&u, &e, None).unwrap()
        };
        let (a, b) = (ratio(12), ratio(24));
        assert_eq!(a.q, 6.0);
        assert!((a.geometric / b.geometric - 1.0).abs() < 0.15);
    }
}
