//! Certificates evaluated on computed solutions.
//!
//! Each certificate row records a measured quantity, the bound it is
//! checked against and the margin `bound − measured`; a row passes when the
//! margin is at least `−tol`. Bounds that hold for the discrete scheme only
//! up to the solver residual include that defect explicitly, as
//! `‖R‖₂ · ‖test field‖₂`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::anchors;
use crate::error::{Error, Result};
use crate::flux::{AnisotropicExponents, FluxModel};
use crate::grid::{abs_pow, aniso_norm, forward_diff, inner, level_set_measure, lp_norm, GridFunction};
use crate::solver::{
    assemble_residual, residual_norm, solve_regularized, ContinuationResult, ProblemSpec, SolverConfig,
};
use crate::truncation::{h_l, sign0_plus, t_k};

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub anchor: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

impl Certificate {
    /// Upper-bound row `measured ≤ bound`.
    pub fn upper(name: impl Into<String>, anchor: &'static str, measured: f64, bound: f64, tol: f64) -> Self {
        let margin = bound - measured;
        Certificate {
            name: name.into(),
            anchor,
            measured,
            bound,
            margin,
            pass: margin >= -tol && margin.is_finite(),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateReport {
    pub entries: Vec<Certificate>,
    /// Measured constants, e.g. `("C4", 0.31)`.
    pub constants: Vec<(String, f64)>,
}

impl CertificateReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Certificate) {
        self.entries.push(c);
    }

    pub fn set_constant(&mut self, name: &str, value: f64) {
        match self.constants.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.constants.push((name.into(), value)),
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|c| c.1)
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.entries.extend(other.entries);
        for (n, v) in other.constants {
            self.set_constant(&n, v);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.entries.iter().filter(|c| !c.pass)
    }

    pub fn with_anchor<'a>(&'a self, anchor: &'a str) -> impl Iterator<Item = &'a Certificate> + 'a {
        self.entries.iter().filter(move |c| c.anchor == anchor)
    }

    /// Smallest margin among rows with the given anchor.
    pub fn worst_margin(&self, anchor: &str) -> Option<f64> {
        self.with_anchor(anchor).map(|c| c.margin).reduce(f64::min)
    }
}

fn same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid() != b.grid() {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `Σ_i Σ_e w_e a_i(x_e, ∂_i u) ∂_i S(u)` with `S = T_k(r − T_l r)`.
///
/// `S(u)` is zero where `|u| ≤ l` and moves with `u` on `l < |u| < l + k`,
/// so this is the flux energy carried by the band `{l < |u| < l + k}`. The
/// cut-off form makes it exactly additive:
/// `E(l, k₁ + k₂) = E(l, k₁) + E(l + k₁, k₂)`.
pub fn band_energy(u: &GridFunction, flux: &dyn FluxModel, delta: f64, l: f64, k: f64) -> f64 {
    let s = u.map(|r| band_cut(r, l, k));
    flux_pairing(u, &s, flux, delta)
}

#[inline]
fn band_cut(r: f64, l: f64, k: f64) -> f64 {
    t_k(r - t_k(r, l), k)
}

/// `Σ_i Σ_e w_e a_i(x_e, ∂_i u) ∂_i v`.
fn flux_pairing(u: &GridFunction, v: &GridFunction, flux: &dyn FluxModel, delta: f64) -> f64 {
    let g = u.grid();
    let n = g.dim();
    let mut total = 0.0;
    for axis in 0..n {
        let du = forward_diff(u, axis);
        let dv = forward_diff(v, axis);
        let w = g.edge_weights(axis);
        for e in 0..du.len() {
            if dv[e] != 0.0 {
                let x = g.edge_midpoint(axis, e);
                total += w[e] * flux.component(axis, &x[..n], du[e], delta) * dv[e];
            }
        }
    }
    total
}

/// `Σ_i Σ_e w_e F̂_i(map(u))_e ∂_i v` with the scheme's edge flux.
fn convection_pairing(prob: &ProblemSpec, u: &GridFunction, v: &GridFunction, map: impl Fn(f64) -> f64) -> f64 {
    let conv = prob.convection();
    if conv.is_zero() {
        return 0.0;
    }
    let g = u.grid();
    let mut total = 0.0;
    for axis in 0..g.dim() {
        let dv = forward_diff(v, axis);
        let w = g.edge_weights(axis);
        for e in 0..dv.len() {
            let (lo, hi) = g.edge_nodes(axis, e);
            let fb = conv.edge_flux(axis, map(u.values()[lo]), map(u.values()[hi]));
            total += w[e] * fb * dv[e];
        }
    }
    total
}

/// Solve parameters that certificates need to reconstruct the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub eps: f64,
    pub delta: f64,
    /// Band levels `l` used for the cut-offs `h_l` and band energies.
    pub bands: Vec<f64>,
    pub tol: f64,
}

fn hat_bumps(u: &GridFunction) -> Vec<GridFunction> {
    let g = u.grid();
    let n = g.dim();
    let mut centres: Vec<Vec<f64>> = alloc::vec![Vec::new()];
    for axis in 0..n {
        let (a, b) = g.bounds(axis);
        let step = (b - a) / 4.0;
        centres = centres
            .into_iter()
            .flat_map(|c| {
                (1..=3).map(move |j| {
                    let mut c = c.clone();
                    c.push(a + j as f64 * step);
                    c
                })
            })
            .collect();
    }
    centres
        .into_iter()
        .map(|c| {
            GridFunction::dirichlet_from_fn(g, |x| {
                (0..n)
                    .map(|i| {
                        let (a, b) = g.bounds(i);
                        (1.0 - (x[i] - c[i]).abs() / ((b - a) / 4.0)).max(0.0)
                    })
                    .product()
            })
        })
        .collect()
}

/// Renormalized-solution certificates for a computed pair `(u, b)`.
///
/// * R1: nodewise distance from `(u, b)` to the graph of β, allowing the
///   Yosida offset `ε|b|` (plus the truncation excess `(|u| − 1/ε)⁺`).
/// * R2: the weak identity with test fields `h_l(u) φ` for every band `l`,
///   `φ` ranging over tensor hat bumps on a 4-cell coarse lattice and
///   `T_1(u)`; the bound is the regularization and solver defect.
/// * R3: band energies `E(l, 1)` against `∫_{|u|>l} |f|`, and their
///   decrease along the bands.
pub fn certify_renormalized(
    u: &GridFunction,
    b: &GridFunction,
    prob: &ProblemSpec,
    opts: &CertifyOptions,
) -> Result<CertificateReport> {
    same_grid(u, b)?;
    same_grid(u, prob.source())?;
    let eps = opts.eps;
    let tol = opts.tol;
    let g = u.grid();
    let w = g.node_weights();
    let f = prob.source();
    let mut rep = CertificateReport::new();

    let mut failing = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (n, (&un, &bn)) in u.values().iter().zip(b.values()).enumerate() {
        let allowance = eps * bn.abs() + (un.abs() - 1.0 / eps).max(0.0);
        let excess = prob.beta().distance_to_graph(un, bn) - allowance;
        worst = worst.max(excess);
        if excess > tol {
            failing.push(n);
        }
    }
    let mut r1 = Certificate::upper("R1 graph membership", anchors::R1_GRAPH, worst.max(0.0), 0.0, tol);
    if !failing.is_empty() {
        let shown: Vec<String> = failing.iter().take(10).map(|n| format!("{n}")).collect();
        r1 = r1.with_detail(format!("failing nodes: {}", shown.join(" ")));
    }
    rep.push(r1);

    let residual = assemble_residual(prob, eps, opts.delta, u)?;
    let rnorm = residual_norm(&residual);
    let flux = prob.flux();
    let tk = |r: f64| t_k(r, 1.0 / eps);

    let mut tests = hat_bumps(u);
    tests.push(u.map(|r| t_k(r, 1.0)));
    for &l in &opts.bands {
        let mut worst: Option<Certificate> = None;
        for (j, phi) in tests.iter().enumerate() {
            let hphi = u.zip_map(phi, |r, p| h_l(r, l) * p)?;
            let zeroth: f64 = (0..g.node_count())
                .map(|n| w[n] * (b.values()[n] - f.values()[n]) * hphi.values()[n])
                .sum();
            let lhs = zeroth + flux_pairing(u, &hphi, flux, opts.delta) + convection_pairing(prob, u, &hphi, |r| r);
            let atan_term = eps * inner(&u.map(libm::atan), &hphi)?.abs();
            let conv_defect =
                (convection_pairing(prob, u, &hphi, |r| r) - convection_pairing(prob, u, &hphi, tk)).abs();
            let bound = atan_term + rnorm * lp_norm(&hphi, 2.0)? + conv_defect;
            let c = Certificate::upper(
                format!("R2 weak identity, h_{l}"),
                anchors::R2_RENORMALIZED,
                lhs.abs(),
                bound,
                tol,
            )
            .with_detail(format!("worst test field {j} of {}", tests.len()));
            if worst.as_ref().is_none_or(|w| c.margin < w.margin) {
                worst = Some(c);
            }
        }
        rep.push(worst.expect("test set is nonempty"));
    }

    let mut energies = Vec::with_capacity(opts.bands.len());
    for &l in &opts.bands {
        let e = band_energy(u, flux, opts.delta, l, 1.0);
        let s = u.map(|r| band_cut(r, l, 1.0));
        let f_tail: f64 = (0..g.node_count())
            .filter(|&n| u.values()[n].abs() > l)
            .map(|n| w[n] * f.values()[n].abs())
            .sum();
        let conv = convection_pairing(prob, u, &s, tk);
        let bound = f_tail + (-conv).max(0.0) + rnorm * lp_norm(&s, 2.0)?;
        rep.push(Certificate::upper(
            format!("R3 band energy, l = {l}"),
            anchors::BAND_ENERGY,
            e,
            bound,
            tol,
        ));
        energies.push((l, e));
    }
    for pair in energies.windows(2) {
        let ((l0, e0), (l1, e1)) = (pair[0], pair[1]);
        rep.push(Certificate::upper(
            format!("R3 decay, l = {l0} -> {l1}"),
            anchors::R3_DECAY,
            e1,
            e0,
            tol,
        ));
    }
    if let Some(&(_, last)) = energies.last() {
        rep.set_constant("R3 last band energy", last);
    }
    Ok(rep)
}

/// Pair of solves produced by [`comparison_certificate`].
#[derive(Debug, Clone)]
pub struct ComparisonOutcome {
    pub report: CertificateReport,
    pub u: GridFunction,
    pub b: GridFunction,
    pub u_tilde: GridFunction,
    pub b_tilde: GridFunction,
}

/// Solves the regularized problem at `ε` for `f` and `f̃` and evaluates
/// `ε ∫ (arctan u − arctan ũ)⁺ ≤ ∫ (f − f̃) sign₀⁺(u − ũ)`. When `f ≤ f̃`
/// everywhere it also checks `u ≤ ũ` and `b ≤ b̃` nodewise.
pub fn comparison_certificate(
    prob: &ProblemSpec,
    f: &GridFunction,
    f_tilde: &GridFunction,
    eps: f64,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<ComparisonOutcome> {
    same_grid(f, f_tilde)?;
    let delta = cfg.delta_for(eps, prob.exponents())?;
    let zero = GridFunction::zeros(prob.grid());
    let p = prob.with_source(f.clone())?;
    let pt = prob.with_source(f_tilde.clone())?;
    let (u, _) = solve_regularized(&p, eps, delta, cfg, &zero)?;
    let (ut, _) = solve_regularized(&pt, eps, delta, cfg, &zero)?;
    let beta = prob.beta();
    let tk = |r: f64| t_k(r, 1.0 / eps);
    let mut bv = Vec::with_capacity(u.values().len());
    let mut btv = Vec::with_capacity(u.values().len());
    for (&a, &c) in u.values().iter().zip(ut.values()) {
        bv.push(beta.yosida(tk(a), eps)?);
        btv.push(beta.yosida(tk(c), eps)?);
    }
    let b = GridFunction::new(prob.grid().clone(), bv)?;
    let bt = GridFunction::new(prob.grid().clone(), btv)?;

    let w = prob.grid().node_weights();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for n in 0..w.len() {
        let (a, c) = (u.values()[n], ut.values()[n]);
        lhs += w[n] * (libm::atan(a) - libm::atan(c)).max(0.0);
        rhs += w[n] * (f.values()[n] - f_tilde.values()[n]) * sign0_plus(a - c);
    }
    let mut report = CertificateReport::new();
    report.push(Certificate::upper(
        "comparison inequality",
        anchors::COMPARISON,
        eps * lhs,
        rhs,
        tol,
    ));
    if f.values().iter().zip(f_tilde.values()).all(|(a, c)| a <= c) {
        report.push(Certificate::upper(
            "ordering u <= u~",
            anchors::COMPARISON_ORDER,
            u.zip_map(&ut, |a, c| a - c)?.max(),
            0.0,
            tol,
        ));
        report.push(Certificate::upper(
            "ordering b <= b~",
            anchors::COMPARISON_ORDER,
            b.zip_map(&bt, |a, c| a - c)?.max(),
            0.0,
            tol,
        ));
    }
    Ok(ComparisonOutcome {
        report,
        u,
        b,
        u_tilde: ut,
        b_tilde: bt,
    })
}

/// `∫ (b − b̃) sign₀⁺(u − ũ) ≤ ∫ (f − f̃) sign₀⁺(u − ũ)`; for `f = f̃` and a
/// strictly monotone graph also `‖u − ũ‖_∞ ≤ tol` and `‖b − b̃‖_∞ ≤ tol`.
#[allow(clippy::too_many_arguments)]
pub fn kato_certificate(
    u: &GridFunction,
    b: &GridFunction,
    u_tilde: &GridFunction,
    b_tilde: &GridFunction,
    f: &GridFunction,
    f_tilde: &GridFunction,
    strictly_monotone: bool,
    tol: f64,
) -> Result<CertificateReport> {
    for other in [b, u_tilde, b_tilde, f, f_tilde] {
        same_grid(u, other)?;
    }
    let w = u.grid().node_weights();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for n in 0..w.len() {
        let s = sign0_plus(u.values()[n] - u_tilde.values()[n]);
        lhs += w[n] * (b.values()[n] - b_tilde.values()[n]) * s;
        rhs += w[n] * (f.values()[n] - f_tilde.values()[n]) * s;
    }
    let mut rep = CertificateReport::new();
    rep.push(Certificate::upper("Kato inequality", anchors::KATO, lhs, rhs, tol));
    if strictly_monotone && f == f_tilde {
        rep.push(Certificate::upper(
            "uniqueness of u",
            anchors::UNIQUENESS,
            u.max_abs_diff(u_tilde)?,
            0.0,
            tol,
        ));
        rep.push(Certificate::upper(
            "uniqueness of b",
            anchors::UNIQUENESS,
            b.max_abs_diff(b_tilde)?,
            0.0,
            tol,
        ));
    }
    Ok(rep)
}

/// `φ(l) = |{|u| ≥ l}|` and `φ(l) l^{1 − 1/p̄}` over a list of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetProfile {
    pub levels: Vec<f64>,
    pub phi: Vec<f64>,
    pub scaled: Vec<f64>,
    /// `max_l φ(l) l^{1 − 1/p̄}`.
    pub c4: f64,
}

pub fn level_set_profile(u: &GridFunction, exponents: &AnisotropicExponents, levels: &[f64]) -> LevelSetProfile {
    let s = 1.0 - 1.0 / exponents.p_bar();
    let phi: Vec<f64> = levels.iter().map(|&l| level_set_measure(u, l)).collect();
    let scaled: Vec<f64> = levels.iter().zip(&phi).map(|(&l, &p)| p * libm::pow(l, s)).collect();
    let c4 = scaled.iter().copied().fold(0.0, f64::max);
    LevelSetProfile {
        levels: levels.to_vec(),
        phi,
        scaled,
        c4,
    }
}

/// Level-set decay: the scaled measure at the last level must not exceed
/// its maximum over the earlier levels. With `bounded` data it also reports
/// that `φ` vanishes just above `max |u|`.
pub fn levelset_certificate(
    u: &GridFunction,
    exponents: &AnisotropicExponents,
    levels: &[f64],
    bounded: bool,
    tol: f64,
) -> Result<CertificateReport> {
    if levels.len() < 2 {
        return Err(Error::param("level-set certificate needs at least two levels"));
    }
    if levels.iter().any(|&l| !(l >= 1.0)) || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("levels must be increasing and >= 1"));
    }
    let prof = level_set_profile(u, exponents, levels);
    let mut rep = CertificateReport::new();
    let earlier = prof.scaled[..prof.scaled.len() - 1].iter().copied().fold(0.0, f64::max);
    let last = *prof.scaled.last().expect("at least two levels");
    let detail: Vec<String> = prof
        .levels
        .iter()
        .zip(&prof.phi)
        .map(|(l, p)| format!("phi({l})={p:.6e}"))
        .collect();
    rep.push(
        Certificate::upper("level-set decay", anchors::LEVEL_SET, last, earlier, tol).with_detail(detail.join(" ")),
    );
    rep.set_constant("C4", prof.c4);
    if bounded {
        let top = u.max_abs();
        let above = level_set_measure(u, top * (1.0 + 1e-12) + f64::MIN_POSITIVE);
        rep.push(
            Certificate::upper("boundedness indicator", anchors::BOUNDEDNESS, above, 0.0, tol)
                .with_detail(format!("max |u| = {top:.6e}")),
        );
    }
    Ok(rep)
}

/// A-priori estimates along a continuation run: `max |b_ε| ≤ ‖f‖_∞` and the
/// energy identity bound for every ε, truncated energies
/// `E(0, k) ≤ k ‖f‖₁` at the smallest ε for `k` in `levels`, and the
/// measured constants `C1` (largest anisotropic norm), `C2` (largest scaled
/// level-set measure) and `C3` (largest `E(0, k) / k`).
pub fn estimate_certificates(
    prob: &ProblemSpec,
    run: &ContinuationResult,
    cfg: &SolverConfig,
    levels: &[f64],
    tol: f64,
) -> Result<CertificateReport> {
    let f = prob.source();
    let f_inf = f.max_abs();
    let f_one = lp_norm(f, 1.0)?;
    let p = prob.exponents();
    let mut rep = CertificateReport::new();
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for (k, (eps, u, b)) in run.iterates.iter().enumerate() {
        let eps = *eps;
        let delta = cfg.delta_at(k, p)?;
        rep.push(Certificate::upper(
            format!("L-infinity bound, eps = {eps}"),
            anchors::LINF_BOUND,
            b.max_abs(),
            f_inf,
            tol,
        ));
        let energy = flux_pairing(u, u, prob.flux(), delta);
        let conv = convection_pairing(prob, u, u, |r| t_k(r, 1.0 / eps));
        let rnorm = residual_norm(&assemble_residual(prob, eps, delta, u)?);
        let bound = inner(f, u)? - conv + rnorm * lp_norm(u, 2.0)?;
        rep.push(Certificate::upper(
            format!("energy bound, eps = {eps}"),
            anchors::ENERGY_BOUND,
            energy,
            bound,
            tol,
        ));
        c1 = c1.max(aniso_norm(u, p.p())?);
        let s = 1.0 - 1.0 / p.p_bar();
        for &l in levels {
            c2 = c2.max(level_set_measure(u, l) * libm::pow(l, s));
        }
    }
    rep.set_constant("C1", c1);
    rep.set_constant("C2", c2);

    if let Some((eps, u, _)) = run.iterates.last() {
        let kk = run.iterates.len() - 1;
        let delta = cfg.delta_at(kk, p)?;
        let rnorm = residual_norm(&assemble_residual(prob, *eps, delta, u)?);
        let mut c3: f64 = 0.0;
        for &k in levels {
            let e = band_energy(u, prob.flux(), delta, 0.0, k);
            let s = u.map(|r| t_k(r, k));
            let conv = convection_pairing(prob, u, &s, |r| t_k(r, 1.0 / eps));
            let bound = k * f_one + (-conv).max(0.0) + rnorm * lp_norm(&s, 2.0)?;
            rep.push(Certificate::upper(
                format!("truncated energy, k = {k}"),
                anchors::TRUNCATED_ENERGY,
                e,
                bound,
                tol,
            ));
            c3 = c3.max(e / k);
        }
        rep.set_constant("C3", c3);
    }
    Ok(rep)
}

/// `Σ_i ‖∂_i u‖_{p_i}^{p_i}`, the coercivity-side energy.
pub fn gradient_energy(u: &GridFunction, p: &[f64]) -> f64 {
    let g = u.grid();
    (0..g.dim())
        .map(|i| {
            forward_diff(u, i)
                .iter()
                .zip(g.edge_weights(i))
                .map(|(d, w)| w * abs_pow(*d, p[i]))
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvectionModel, PowerFlux};
    use crate::graph::MonotoneGraph;
    use crate::grid::Grid;
    use crate::solver::{continuation_limit, DataClass};
    use alloc::sync::Arc;
    use alloc::vec;

    fn prob(beta: MonotoneGraph, p: &[f64], f: GridFunction) -> ProblemSpec {
        let n = f.grid().dim();
        ProblemSpec::new(
            beta,
            Arc::new(PowerFlux::new(p).unwrap()),
            ConvectionModel::Zero { dim: n },
            f,
            DataClass::Bounded,
        )
        .unwrap()
    }

    #[test]
    fn band_energy_examples() {
        let g = Grid::unit(&[20]).unwrap();
        let flux = PowerFlux::new(&[2.0]).unwrap();
        assert_eq!(band_energy(&GridFunction::zeros(&g), &flux, 0.0, 0.5, 1.0), 0.0);
        let u = GridFunction::dirichlet_from_fn(&g, |x| libm::sin(3.0 * x[0]));
        let full = band_energy(&u, &flux, 0.0, 0.0, 10.0);
        assert!((full - gradient_energy(&u, &[2.0])).abs() < 1e-12);
    }

    #[test]
    fn band_energy_is_additive() {
        let g = Grid::unit(&[40, 30]).unwrap();
        let flux = PowerFlux::new(&[1.5, 3.0]).unwrap();
        let u = GridFunction::dirichlet_from_fn(&g, |x| 6.0 * libm::sin(3.0 * x[0]) * x[1] * (1.0 - x[1]) * 4.0);
        for &(l, k1, k2) in &[(0.0, 0.5, 0.7), (0.3, 1.0, 2.0), (1.1, 0.2, 0.05)] {
            let whole = band_energy(&u, &flux, 0.1, l, k1 + k2);
            let parts = band_energy(&u, &flux, 0.1, l, k1) + band_energy(&u, &flux, 0.1, l + k1, k2);
            assert!((whole - parts).abs() <= 1e-12 * (1.0 + whole), "{whole} vs {parts}");
        }
    }

    #[test]
    fn poisson_band_energy_matches_edge_sum() {
        let g = Grid::unit(&[128]).unwrap();
        let p = prob(MonotoneGraph::zero(), &[2.0], GridFunction::constant(&g, 1.0));
        let (u, _) = solve_regularized(&p, 1e-10, 0.0, &SolverConfig::default(), &GridFunction::zeros(&g)).unwrap();
        let (l, k) = (0.1, 0.05);
        let h = 1.0 / 128.0;
        let mut oracle = 0.0;
        for e in 0..128 {
            let (a, b) = (u.values()[e], u.values()[e + 1]);
            let cut = |r: f64| (r.abs() - l).clamp(0.0, k) * r.signum();
            oracle += h * ((b - a) / h) * ((cut(b) - cut(a)) / h);
        }
        let e = band_energy(&u, p.flux(), 0.0, l, k);
        assert!((e - oracle).abs() < 1e-10);
    }

    #[test]
    fn linear_problem_is_renormalized() {
        let g = Grid::unit(&[24, 24]).unwrap();
        let f = GridFunction::from_fn(&g, |x| 30.0 * libm::sin(3.0 * x[0]) * libm::cos(2.0 * x[1]));
        let p = prob(MonotoneGraph::identity(), &[2.0, 2.0], f);
        let cfg = SolverConfig::default();
        let run = continuation_limit(&p, &cfg).unwrap();
        let opts = CertifyOptions {
            eps: 0.001,
            delta: 0.0,
            bands: vec![0.0, 1.0, 2.0],
            tol: 1e-8,
        };
        let rep = certify_renormalized(&run.u, &run.b, &p, &opts).unwrap();
        assert!(rep.all_pass(), "{:#?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.with_anchor(anchors::BAND_ENERGY).all(|c| c.margin >= 0.0));

        let est = estimate_certificates(&p, &run, &cfg, &[1.0, 2.0, 4.0], 1e-8).unwrap();
        assert!(est.all_pass(), "{:#?}", est.failures().collect::<Vec<_>>());
        assert!(est.constant("C1").unwrap() > 0.0);
    }

    #[test]
    fn zero_data_certificates_are_trivial() {
        let g = Grid::unit(&[8, 8]).unwrap();
        let p = prob(
            MonotoneGraph::stefan(1.0).unwrap(),
            &[2.0, 3.0],
            GridFunction::zeros(&g),
        );
        let z = GridFunction::zeros(&g);
        let opts = CertifyOptions {
            eps: 0.01,
            delta: 0.0,
            bands: vec![0.0, 1.0],
            tol: 0.0,
        };
        let rep = certify_renormalized(&z, &z, &p, &opts).unwrap();
        assert!(rep.all_pass());
        assert!(rep.entries.iter().all(|c| c.measured == 0.0));
    }

    #[test]
    fn corrupted_b_fails_at_that_node() {
        let g = Grid::unit(&[8, 8]).unwrap();
        let p = prob(MonotoneGraph::identity(), &[2.0, 2.0], GridFunction::zeros(&g));
        let u = GridFunction::zeros(&g);
        let mut b = GridFunction::zeros(&g);
        let node = g.node_index(&[3, 4]);
        b.values_mut()[node] += 1.0;
        let opts = CertifyOptions {
            eps: 0.01,
            delta: 0.0,
            bands: vec![0.0],
            tol: 1e-8,
        };
        let rep = certify_renormalized(&u, &b, &p, &opts).unwrap();
        let r1 = &rep.entries[0];
        assert!(!r1.pass);
        assert_eq!(r1.detail, format!("failing nodes: {node}"));
    }

    #[test]
    fn comparison_examples() {
        let g = Grid::unit(&[32]).unwrap();
        let p = prob(MonotoneGraph::identity(), &[2.0], GridFunction::zeros(&g));
        let one = GridFunction::constant(&g, 1.0);
        let two = GridFunction::constant(&g, 2.0);
        let cfg = SolverConfig::default();
        let same = comparison_certificate(&p, &one, &one, 0.1, &cfg, 1e-10).unwrap();
        assert_eq!(same.report.entries[0].margin, 0.0);
        let up = comparison_certificate(&p, &one, &two, 0.1, &cfg, 1e-8).unwrap();
        assert!(up.report.all_pass(), "{:?}", up.report);
        assert_eq!(up.report.entries.len(), 3);
        let down = comparison_certificate(&p, &two, &one, 0.1, &cfg, 1e-8).unwrap();
        assert!(down.report.entries[0].margin >= 0.0);

        let k = kato_certificate(&up.u, &up.b, &up.u_tilde, &up.b_tilde, &one, &two, true, 1e-8).unwrap();
        assert!(k.all_pass());
        let k = kato_certificate(&up.u, &up.b, &up.u, &up.b, &one, &one, true, 0.0).unwrap();
        assert!(k.all_pass() && k.entries.len() == 3);
    }

    #[test]
    fn level_set_examples() {
        let g = Grid::unit(&[64]).unwrap();
        let e = AnisotropicExponents::new(&[2.0]).unwrap();
        let z = GridFunction::zeros(&g);
        let rep = levelset_certificate(&z, &e, &[1.0, 2.0], true, 0.0).unwrap();
        assert_eq!(rep.constant("C4"), Some(0.0));
        assert!(rep.all_pass());

        let u = GridFunction::from_fn(&g, |x| x[0] * (1.0 - x[0]) / 2.0);
        for l in [0.126, 0.2, 1.0] {
            assert_eq!(level_set_measure(&u, l), 0.0);
        }
        let scaled = u.map(|v| 40.0 * v);
        let rep = levelset_certificate(&scaled, &e, &[1.0, 2.0, 4.0], true, 1e-12).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        assert!(levelset_certificate(&u, &e, &[2.0, 1.0], true, 0.0).is_err());
    }
}
