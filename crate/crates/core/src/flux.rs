//! Leray–Lions fluxes with per-axis growth, convection fields and sampled
//! checks of the structural assumptions (coercivity, growth, monotonicity).
//!
//! Fluxes are diagonal: component `a_i` depends on `x` and on `ξ_i` only.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::grid::abs_pow;

/// Per-axis exponents `p_i` and the derived scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropicExponents {
    p: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
    p_bar: f64,
    p_bar_star: Option<f64>,
    p_infinity: f64,
}

impl AnisotropicExponents {
    pub fn new(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::param("exponent vector is empty"));
        }
        if let Some(bad) = p.iter().find(|&&q| !(q.is_finite() && q >= 1.0)) {
            return Err(Error::param(format!("exponents must satisfy p_i >= 1, got {bad}")));
        }
        let n = p.len() as f64;
        let p_minus = p.iter().copied().fold(f64::INFINITY, f64::min);
        let p_plus = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let p_bar = n / p.iter().map(|q| 1.0 / q).sum::<f64>();
        // the harmonic mean of equal entries can round just outside [p⁻, p⁺]
        let p_bar = p_bar.max(p_minus).min(p_plus);
        let p_bar_star = (p_bar < n).then(|| n * p_bar / (n - p_bar));
        let p_infinity = p_bar_star.map_or(p_plus, |s| s.max(p_plus));
        Ok(AnisotropicExponents {
            p: p.to_vec(),
            p_minus,
            p_plus,
            p_bar,
            p_bar_star,
            p_infinity,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// Harmonic mean `N / Σ 1/p_i`.
    pub fn p_bar(&self) -> f64 {
        self.p_bar
    }

    /// `N p̄ / (N − p̄)`, defined only for `p̄ < N`.
    pub fn p_bar_star(&self) -> Option<f64> {
        self.p_bar_star
    }

    /// `max(p̄*, p⁺)`; falls back to `p⁺` when `p̄*` is undefined.
    pub fn p_infinity(&self) -> f64 {
        self.p_infinity
    }

    /// True when `p̄ ≥ N` and `p_∞` uses the `p⁺` fallback.
    pub fn flagged(&self) -> bool {
        self.p_bar_star.is_none()
    }
}

pub fn derived_exponents(p: &[f64]) -> Result<AnisotropicExponents> {
    AnisotropicExponents::new(p)
}

/// `(ξ² + δ²)^{(p−2)/2} ξ`; equals `|ξ|^{p−1} sgn ξ` for `δ = 0`.
#[inline]
pub fn power_flux_eval(p: f64, xi: f64, delta: f64) -> f64 {
    if p == 2.0 {
        xi
    } else if delta == 0.0 {
        abs_pow(xi, p - 1.0).copysign(xi)
    } else {
        libm::pow(xi * xi + delta * delta, 0.5 * (p - 2.0)) * xi
    }
}

/// Derivative of [`power_flux_eval`] with respect to `ξ`.
#[inline]
pub fn power_flux_deriv(p: f64, xi: f64, delta: f64) -> Result<f64> {
    let d = if p == 2.0 {
        1.0
    } else if delta == 0.0 {
        if xi == 0.0 {
            if p > 2.0 {
                0.0
            } else {
                return Err(Error::DerivativeOverflow { xi });
            }
        } else {
            (p - 1.0) * abs_pow(xi, p - 2.0)
        }
    } else {
        let s = xi * xi + delta * delta;
        libm::pow(s, 0.5 * (p - 4.0)) * (delta * delta + (p - 1.0) * xi * xi)
    };
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::DerivativeOverflow { xi })
    }
}

/// Diagonal flux `a_i(x, ξ_i)` with declared structural constants.
///
/// `delta` is the smoothing parameter chosen by the caller; models that do
/// not smooth ignore it.
pub trait FluxModel: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Growth exponent `p_i`.
    fn exponent(&self, axis: usize) -> f64;

    fn component(&self, axis: usize, x: &[f64], xi: f64, delta: f64) -> f64;

    fn component_derivative(&self, axis: usize, x: &[f64], xi: f64, delta: f64) -> Result<f64>;

    /// Declared coercivity constant `λ`.
    fn coercivity(&self) -> f64;

    /// Declared growth constant `γ`.
    fn growth(&self) -> f64;

    /// Weight `d_i(x)` in the growth bound.
    fn weight(&self, _axis: usize, _x: &[f64]) -> f64 {
        0.0
    }

    fn name(&self) -> &str;

    /// `a_i(x, ξ) / ξ`, replaced by the derivative at `ξ = 0`.
    fn secant(&self, axis: usize, x: &[f64], xi: f64, delta: f64) -> Result<f64> {
        if xi.abs() > 1e-300 {
            Ok(self.component(axis, x, xi, delta) / xi)
        } else {
            self.component_derivative(axis, x, 0.0, delta)
        }
    }
}

/// `a_i(x, ξ) = |ξ_i|^{p_i−1} sgn ξ_i`, smoothed to
/// `(ξ_i² + δ²)^{(p_i−2)/2} ξ_i` when `δ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlux {
    p: Vec<f64>,
}

impl PowerFlux {
    pub fn new(p: &[f64]) -> Result<Self> {
        AnisotropicExponents::new(p)?;
        Ok(PowerFlux { p: p.to_vec() })
    }
}

impl FluxModel for PowerFlux {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn exponent(&self, axis: usize) -> f64 {
        self.p[axis]
    }

    fn component(&self, axis: usize, _x: &[f64], xi: f64, delta: f64) -> f64 {
        power_flux_eval(self.p[axis], xi, delta)
    }

    fn component_derivative(&self, axis: usize, _x: &[f64], xi: f64, delta: f64) -> Result<f64> {
        power_flux_deriv(self.p[axis], xi, delta)
    }

    fn coercivity(&self) -> f64 {
        1.0
    }

    fn growth(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &str {
        "power"
    }
}

/// `a(ξ) = −ξ`, declared with `λ = γ = 1`. Violates coercivity and
/// monotonicity; used to exercise the assumption checks.
#[derive(Debug, Clone, PartialEq)]
pub struct AntimonotoneFlux {
    dim: usize,
}

impl AntimonotoneFlux {
    pub fn new(dim: usize) -> Self {
        AntimonotoneFlux { dim }
    }
}

impl FluxModel for AntimonotoneFlux {
    fn dim(&self) -> usize {
        self.dim
    }

    fn exponent(&self, _axis: usize) -> f64 {
        2.0
    }

    fn component(&self, _axis: usize, _x: &[f64], xi: f64, _delta: f64) -> f64 {
        -xi
    }

    fn component_derivative(&self, _axis: usize, _x: &[f64], _xi: f64, _delta: f64) -> Result<f64> {
        Ok(-1.0)
    }

    fn coercivity(&self) -> f64 {
        1.0
    }

    fn growth(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &str {
        "adversarial"
    }
}

/// One sample `(x, ξ, η)` for [`check_assumptions`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionSample {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub name: &'static str,
    /// Worst margin over all samples; negative means violated.
    pub margin: f64,
    /// Index of the sample attaining `margin`.
    pub worst_sample: Option<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub coercivity: AssumptionCheck,
    pub growth: AssumptionCheck,
    pub monotonicity: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.coercivity.pass && self.growth.pass && self.monotonicity.pass
    }

    pub fn checks(&self) -> [&AssumptionCheck; 3] {
        [&self.coercivity, &self.growth, &self.monotonicity]
    }
}

struct Worst {
    margin: f64,
    at: Option<usize>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            margin: f64::INFINITY,
            at: None,
        }
    }

    fn update(&mut self, m: f64, i: usize) {
        if m < self.margin || self.at.is_none() {
            self.margin = m;
            self.at = Some(i);
        }
    }

    fn finish(self, name: &'static str, tol: f64) -> AssumptionCheck {
        let margin = if self.at.is_some() { self.margin } else { 0.0 };
        AssumptionCheck {
            name,
            margin,
            worst_sample: self.at,
            pass: margin >= -tol,
        }
    }
}

/// Worst-case margins of the three structural assumptions over `samples`:
///
/// * coercivity: `min Σ a_i ξ_i / Σ |ξ_i|^{p_i} − λ` (samples with `ξ = 0`
///   are skipped);
/// * growth: `min_i 1 − |a_i(x, ξ)| / (γ (d_i(x) + |ξ_i|^{p_i−1}))`;
/// * monotonicity: `min (a(x, ξ) − a(x, η)) · (ξ − η)`.
pub fn check_assumptions(
    flux: &dyn FluxModel,
    samples: &[AssumptionSample],
    delta: f64,
    tol: f64,
) -> Result<AssumptionReport> {
    if samples.is_empty() {
        return Err(Error::param("assumption check needs at least one sample"));
    }
    let n = flux.dim();
    let lambda = flux.coercivity();
    let gamma = flux.growth();
    let mut h1 = Worst::new();
    let mut h2 = Worst::new();
    let mut h3 = Worst::new();
    for (k, s) in samples.iter().enumerate() {
        if s.xi.len() != n || s.eta.len() != n {
            return Err(Error::param(format!("sample {k} has wrong dimension")));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        let mut mono = 0.0;
        for i in 0..n {
            let p = flux.exponent(i);
            let a = flux.component(i, &s.x, s.xi[i], delta);
            let b = flux.component(i, &s.x, s.eta[i], delta);
            num += a * s.xi[i];
            den += abs_pow(s.xi[i], p);
            mono += (a - b) * (s.xi[i] - s.eta[i]);

            let bound = gamma * (flux.weight(i, &s.x) + abs_pow(s.xi[i], p - 1.0));
            let m = if bound > 0.0 { 1.0 - a.abs() / bound } else { -a.abs() };
            h2.update(m, k);
        }
        if den > 0.0 {
            h1.update(num / den - lambda, k);
        }
        h3.update(mono, k);
    }
    Ok(AssumptionReport {
        coercivity: h1.finish("coercivity", tol),
        growth: h2.finish("growth", tol),
        monotonicity: h3.finish("monotonicity", tol),
    })
}

/// Convection field `F = (F_1, …, F_N)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvectionModel {
    Zero {
        dim: usize,
    },
    /// `F_i(r) = c_i r`.
    Linear(Vec<f64>),
    /// `F_i(r) = Σ_k c_{ik} r^k`, coefficients in ascending degree.
    Polynomial(Vec<Vec<f64>>),
}

impl ConvectionModel {
    /// `F_i(r) = r^degree` on every axis.
    pub fn monomial(dim: usize, degree: usize) -> Self {
        let mut c = alloc::vec![0.0; degree + 1];
        c[degree] = 1.0;
        ConvectionModel::Polynomial(alloc::vec![c; dim])
    }

    /// Parses `zero`, `linear:[c1, c2, ...]` or `poly:d`.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::param(format!("unknown convection model '{spec}'"));
        if spec == "zero" {
            return Ok(ConvectionModel::Zero { dim });
        }
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "linear" => {
                let body = arg.trim().trim_start_matches('[').trim_end_matches(']');
                let c: Vec<f64> = body
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<core::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                if c.len() != dim {
                    return Err(Error::param(format!(
                        "linear convection needs {dim} coefficients, got {}",
                        c.len()
                    )));
                }
                Ok(ConvectionModel::Linear(c))
            }
            "poly" => {
                let body = arg.trim().trim_start_matches('[').trim_end_matches(']');
                let d: usize = body.trim().parse().map_err(|_| bad())?;
                Ok(Self::monomial(dim, d))
            }
            _ => Err(bad()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvectionModel::Zero { dim } => *dim,
            ConvectionModel::Linear(c) => c.len(),
            ConvectionModel::Polynomial(c) => c.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ConvectionModel::Zero { .. } => true,
            ConvectionModel::Linear(c) => c.iter().all(|&v| v == 0.0),
            ConvectionModel::Polynomial(c) => c.iter().flatten().all(|&v| v == 0.0),
        }
    }

    #[inline]
    pub fn component(&self, axis: usize, r: f64) -> f64 {
        match self {
            ConvectionModel::Zero { .. } => 0.0,
            ConvectionModel::Linear(c) => c[axis] * r,
            ConvectionModel::Polynomial(c) => c[axis].iter().rev().fold(0.0, |acc, &ck| acc * r + ck),
        }
    }

    #[inline]
    pub fn component_derivative(&self, axis: usize, r: f64) -> f64 {
        match self {
            ConvectionModel::Zero { .. } => 0.0,
            ConvectionModel::Linear(c) => c[axis],
            ConvectionModel::Polynomial(c) => c[axis]
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * r + k as f64 * ck),
        }
    }

    /// Splitting `F_i = F_i⁺ + F_i⁻` with `F_i⁺` nondecreasing and `F_i⁻`
    /// nonincreasing: `(F_i⁺(r), F_i⁻(r), F_i⁺'(r), F_i⁻'(r))`. Odd monomials go
    /// whole to one side by the sign of their coefficient, even ones are cut
    /// at `r = 0`.
    pub fn split(&self, axis: usize, r: f64) -> [f64; 4] {
        match self {
            ConvectionModel::Zero { .. } => [0.0; 4],
            ConvectionModel::Linear(c) => {
                let c = c[axis];
                if c >= 0.0 {
                    [c * r, 0.0, c, 0.0]
                } else {
                    [0.0, c * r, 0.0, c]
                }
            }
            ConvectionModel::Polynomial(c) => {
                let mut out = [0.0; 4];
                let (rp, rm) = (r.max(0.0), r.min(0.0));
                for (k, &ck) in c[axis].iter().enumerate() {
                    if ck == 0.0 {
                        continue;
                    }
                    if k == 0 {
                        out[0] += ck;
                    } else if k % 2 == 1 {
                        let (v, dv) = (ck * ipow(r, k), ck * k as f64 * ipow(r, k - 1));
                        let side = if ck > 0.0 { 0 } else { 1 };
                        out[side] += v;
                        out[side + 2] += dv;
                    } else {
                        let (up, down) = if ck > 0.0 { (rp, rm) } else { (rm, rp) };
                        out[0] += ck * ipow(up, k);
                        out[2] += ck * k as f64 * ipow(up, k - 1);
                        out[1] += ck * ipow(down, k);
                        out[3] += ck * k as f64 * ipow(down, k - 1);
                    }
                }
                out
            }
        }
    }

    /// Numerical flux on an edge from the values `lo`, `hi` at its lower and
    /// upper end: `F_i⁻(lo) + F_i⁺(hi)`. It is consistent with `F_i`,
    /// nonincreasing in `lo` and nondecreasing in `hi`, which makes the
    /// discrete operator `−div F̂` monotone.
    #[inline]
    pub fn edge_flux(&self, axis: usize, lo: f64, hi: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.split(axis, lo)[1] + self.split(axis, hi)[0]
    }

    /// Partial derivatives of [`Self::edge_flux`] in `lo` and `hi`.
    #[inline]
    pub fn edge_flux_partials(&self, axis: usize, lo: f64, hi: f64) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        (self.split(axis, lo)[3], self.split(axis, hi)[2])
    }

    /// `(F_1(r), …, F_N(r))`.
    pub fn eval(&self, r: f64) -> Vec<f64> {
        (0..self.dim()).map(|i| self.component(i, r)).collect()
    }

    /// Lipschitz bound of every `F_i` on `[−m, m]`.
    pub fn lipschitz_bound(&self, m: f64) -> f64 {
        let m = m.abs();
        match self {
            ConvectionModel::Zero { .. } => 0.0,
            ConvectionModel::Linear(c) => c.iter().fold(0.0, |a, v| a.max(v.abs())),
            ConvectionModel::Polynomial(c) => c
                .iter()
                .map(|coef| {
                    coef.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, ck)| k as f64 * ck.abs() * libm::pow(m, (k - 1) as f64))
                        .sum::<f64>()
                })
                .fold(0.0, f64::max),
        }
    }
}

fn ipow(r: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * r)
}

/// Builds a flux from its configuration name.
pub fn flux_from_name(name: &str, p: &[f64]) -> Result<Box<dyn FluxModel>> {
    match name {
        "power" => Ok(Box::new(PowerFlux::new(p)?)),
        "adversarial" => Ok(Box::new(AntimonotoneFlux::new(p.len()))),
        other => Err(Error::param(format!("unknown flux '{other}'"))),
    }
}

/// Describes a failed assumption for reports.
pub fn describe(check: &AssumptionCheck) -> String {
    format!(
        "{}: margin {:.6e} ({})",
        check.name,
        check.margin,
        if check.pass { "pass" } else { "FAIL" }
    )
}
