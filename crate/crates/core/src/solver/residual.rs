use alloc::vec;
use alloc::vec::Vec;

use super::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg::BandMatrix;
use crate::truncation::t_k;

const NO_SLOT: usize = usize::MAX;

/// The discrete operator at fixed `(ε, δ)`.
pub(crate) struct Discretization<'a> {
    pub(crate) prob: &'a ProblemSpec,
    pub(crate) eps: f64,
    pub(crate) delta: f64,
    interior: Vec<usize>,
    slot: Vec<usize>,
    band: usize,
}

impl<'a> Discretization<'a> {
    pub(crate) fn new(prob: &'a ProblemSpec, eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::param(alloc::format!("epsilon {eps} outside (0, 1]")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::param(alloc::format!(
                "delta {delta} must be finite and nonnegative"
            )));
        }
        let grid = prob.grid();
        let interior: Vec<usize> = grid.interior_nodes().collect();
        let mut slot = vec![NO_SLOT; grid.node_count()];
        for (k, &n) in interior.iter().enumerate() {
            slot[n] = k;
        }
        let cells = grid.cells();
        let band = cells[..grid.dim() - 1].iter().map(|&c| c - 1).product();
        Ok(Discretization {
            prob,
            eps,
            delta,
            interior,
            slot,
            band,
        })
    }

    pub(crate) fn grid(&self) -> &Grid {
        self.prob.grid()
    }

    pub(crate) fn interior(&self) -> &[usize] {
        &self.interior
    }

    #[inline]
    pub(crate) fn truncate(&self, r: f64) -> f64 {
        t_k(r, 1.0 / self.eps)
    }

    #[inline]
    fn truncate_slope(&self, r: f64) -> f64 {
        if r.abs() <= 1.0 / self.eps {
            1.0
        } else {
            0.0
        }
    }

    /// `β_ε(T_{1/ε} r)`.
    #[inline]
    pub(crate) fn b_of(&self, r: f64) -> Result<f64> {
        self.prob.beta().yosida(self.truncate(r), self.eps)
    }

    /// `β_ε(T_{1/ε} r) + ε arctan r`.
    #[inline]
    fn g(&self, r: f64) -> Result<f64> {
        Ok(self.b_of(r)? + self.eps * libm::atan(r))
    }

    #[inline]
    fn g_prime(&self, r: f64) -> Result<f64> {
        let t = self.truncate_slope(r);
        let b = if t > 0.0 {
            self.prob.beta().yosida_slope(self.truncate(r), self.eps)?
        } else {
            0.0
        };
        Ok(b * t + self.eps / (1.0 + r * r))
    }

    /// Total flux `a_i(x_e, D_e u) + F̂_i(T u_lo, T u_hi)` on one edge.
    #[inline]
    fn edge_flux(&self, axis: usize, e: usize, u: &[f64]) -> f64 {
        let grid = self.grid();
        let (lo, hi) = grid.edge_nodes(axis, e);
        let xi = (u[hi] - u[lo]) / grid.spacing(axis);
        let x = grid.edge_midpoint(axis, e);
        let mut a = self.prob.flux().component(axis, &x[..grid.dim()], xi, self.delta);
        let conv = self.prob.convection();
        if !conv.is_zero() {
            a += conv.edge_flux(axis, self.truncate(u[lo]), self.truncate(u[hi]));
        }
        a
    }

    /// Nodal residual; zero at boundary nodes.
    pub(crate) fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let grid = self.grid();
        let f = self.prob.source().values();
        let mut r = vec![0.0; grid.node_count()];
        for &n in &self.interior {
            r[n] = self.g(u[n])? - f[n];
        }
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            for e in 0..grid.edge_count(axis) {
                let (lo, hi) = grid.edge_nodes(axis, e);
                let a = self.edge_flux(axis, e, u) / h;
                r[lo] -= a;
                r[hi] += a;
            }
        }
        for (n, v) in r.iter_mut().enumerate() {
            if grid.is_boundary(n) {
                *v = 0.0;
            }
        }
        Ok(r)
    }

    /// Weighted nodal `L²` norm of a residual vector.
    pub(crate) fn norm(&self, r: &[f64]) -> f64 {
        let w = self.grid().node_weights();
        libm::sqrt(self.interior.iter().map(|&n| w[n] * r[n] * r[n]).sum::<f64>())
    }

    fn matrix(&self) -> BandMatrix {
        BandMatrix::zeros(self.interior.len(), self.band, self.band)
    }

    /// Newton matrix of [`Self::residual`] on interior unknowns.
    pub(crate) fn jacobian(&self, u: &[f64]) -> Result<BandMatrix> {
        let grid = self.grid();
        let mut m = self.matrix();
        for (k, &n) in self.interior.iter().enumerate() {
            m.add(k, k, self.g_prime(u[n])?);
        }
        let conv = self.prob.convection();
        let has_conv = !conv.is_zero();
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            for e in 0..grid.edge_count(axis) {
                let (lo, hi) = grid.edge_nodes(axis, e);
                let (sl, sh) = (self.slot[lo], self.slot[hi]);
                if sl == NO_SLOT && sh == NO_SLOT {
                    continue;
                }
                let xi = (u[hi] - u[lo]) / h;
                let x = grid.edge_midpoint(axis, e);
                let d = self
                    .prob
                    .flux()
                    .component_derivative(axis, &x[..grid.dim()], xi, self.delta)?
                    / (h * h);
                let (cl, ch) = if has_conv {
                    let (pl, ph) = conv.edge_flux_partials(axis, self.truncate(u[lo]), self.truncate(u[hi]));
                    (pl * self.truncate_slope(u[lo]) / h, ph * self.truncate_slope(u[hi]) / h)
                } else {
                    (0.0, 0.0)
                };
                if sl != NO_SLOT {
                    m.add(sl, sl, d - cl);
                    if sh != NO_SLOT {
                        m.add(sl, sh, -d - ch);
                    }
                }
                if sh != NO_SLOT {
                    m.add(sh, sh, d + ch);
                    if sl != NO_SLOT {
                        m.add(sh, sl, -d + cl);
                    }
                }
            }
        }
        Ok(m)
    }

    /// Frozen-coefficient system at `u`: matrix `M(u)` and right-hand side
    /// with `M(u) v = rhs` the next Picard iterate.
    pub(crate) fn picard_system(&self, u: &[f64]) -> Result<(BandMatrix, Vec<f64>)> {
        let grid = self.grid();
        let f = self.prob.source().values();
        let mut m = self.matrix();
        let mut rhs: Vec<f64> = self.interior.iter().map(|&n| f[n]).collect();
        for (k, &n) in self.interior.iter().enumerate() {
            let r = u[n];
            let c = if r.abs() > 1e-300 {
                self.g(r)? / r
            } else {
                self.g_prime(0.0)?
            };
            m.add(k, k, c);
        }
        let conv = self.prob.convection();
        let has_conv = !conv.is_zero();
        for axis in 0..grid.dim() {
            let h = grid.spacing(axis);
            for e in 0..grid.edge_count(axis) {
                let (lo, hi) = grid.edge_nodes(axis, e);
                let (sl, sh) = (self.slot[lo], self.slot[hi]);
                if sl == NO_SLOT && sh == NO_SLOT {
                    continue;
                }
                let xi = (u[hi] - u[lo]) / h;
                let x = grid.edge_midpoint(axis, e);
                let kappa = self.prob.flux().secant(axis, &x[..grid.dim()], xi, self.delta)? / (h * h);
                if sl != NO_SLOT {
                    m.add(sl, sl, kappa);
                    if sh != NO_SLOT {
                        m.add(sl, sh, -kappa);
                    }
                }
                if sh != NO_SLOT {
                    m.add(sh, sh, kappa);
                    if sl != NO_SLOT {
                        m.add(sh, sl, -kappa);
                    }
                }
                if has_conv {
                    let fb = conv.edge_flux(axis, self.truncate(u[lo]), self.truncate(u[hi])) / h;
                    if sl != NO_SLOT {
                        rhs[sl] += fb;
                    }
                    if sh != NO_SLOT {
                        rhs[sh] -= fb;
                    }
                }
            }
        }
        Ok((m, rhs))
    }

    pub(crate) fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&n| full[n]).collect()
    }
}

/// Nodal residual of the regularized equation at `u` (zero on the boundary).
///
/// With the dual-cell weights, `⟨R(u), φ⟩` equals the weak form
/// `Σ ⟨g(u) − f, φ⟩ + Σ_i ⟨a_i(Du) + F̂_i(Tu), ∂_i φ⟩` for every `φ`
/// vanishing on the boundary.
pub fn assemble_residual(prob: &ProblemSpec, eps: f64, delta: f64, u: &GridFunction) -> Result<GridFunction> {
    if u.grid() != prob.grid() {
        return Err(Error::GridMismatch);
    }
    if !u.is_dirichlet() {
        return Err(Error::NotDirichlet);
    }
    let d = Discretization::new(prob, eps, delta)?;
    GridFunction::new(prob.grid().clone(), d.residual(u.values())?)
}

/// Weighted `L²` norm of a residual field over interior nodes.
pub fn residual_norm(r: &GridFunction) -> f64 {
    let g = r.grid();
    let w = g.node_weights();
    libm::sqrt(
        g.interior_nodes()
            .map(|n| w[n] * r.values()[n] * r.values()[n])
            .sum::<f64>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvectionModel, PowerFlux};
    use crate::graph::MonotoneGraph;
    use crate::grid::{forward_diff, inner};
    use crate::solver::DataClass;
    use alloc::sync::Arc;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(grid: &Grid, beta: MonotoneGraph, p: &[f64], conv: ConvectionModel, f: GridFunction) -> ProblemSpec {
        let _ = grid;
        ProblemSpec::new(beta, Arc::new(PowerFlux::new(p).unwrap()), conv, f, DataClass::Bounded).unwrap()
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let g = Grid::unit(&[8, 8]).unwrap();
        let prob = problem(
            &g,
            MonotoneGraph::identity(),
            &[2.0, 3.0],
            ConvectionModel::Zero { dim: 2 },
            GridFunction::zeros(&g),
        );
        let r = assemble_residual(&prob, 0.1, 0.0, &GridFunction::zeros(&g)).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            assemble_residual(&prob, 0.1, 0.0, &GridFunction::constant(&g, 1.0)),
            Err(Error::NotDirichlet)
        ));
    }

    #[test]
    fn poisson_residual_is_small() {
        let g = Grid::unit(&[64]).unwrap();
        let prob = problem(
            &g,
            MonotoneGraph::zero(),
            &[2.0],
            ConvectionModel::Zero { dim: 1 },
            GridFunction::constant(&g, 1.0),
        );
        let eps = 1e-12;
        let u = GridFunction::dirichlet_from_fn(&g, |x| x[0] * (1.0 - x[0]) / 2.0);
        let r = assemble_residual(&prob, eps, 0.0, &u).unwrap();
        assert!(r.max_abs() < 1e-9, "{}", r.max_abs());
    }

    #[test]
    fn residual_matches_weak_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = Grid::new(&[6, 5], &[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0] - x[1] * x[1]);
        let conv = ConvectionModel::Polynomial(vec![vec![0.0, 1.0, 0.5], vec![0.0, -1.0]]);
        let prob = problem(
            &g,
            MonotoneGraph::stefan(1.0).unwrap(),
            &[1.5, 3.0],
            conv.clone(),
            f.clone(),
        );
        let (eps, delta) = (0.3, 0.05);
        for _ in 0..10 {
            let u = GridFunction::dirichlet_from_fn(&g, |_| rng.random_range(-4.0..4.0));
            let phi = GridFunction::dirichlet_from_fn(&g, |_| rng.random_range(-1.0..1.0));
            let r = assemble_residual(&prob, eps, delta, &u).unwrap();
            let lhs = inner(&r, &phi).unwrap();

            let tk = |v: f64| v.max(-1.0 / eps).min(1.0 / eps);
            let mut weak = 0.0;
            for n in 0..g.node_count() {
                let v = u.values()[n];
                let gv = prob.beta().yosida(tk(v), eps).unwrap() + eps * v.atan();
                weak += g.node_weight(n) * (gv - f.values()[n]) * phi.values()[n];
            }
            for axis in 0..2 {
                let du = forward_diff(&u, axis);
                let dphi = forward_diff(&phi, axis);
                let p = [1.5, 3.0][axis];
                for e in 0..g.edge_count(axis) {
                    let (lo, hi) = g.edge_nodes(axis, e);
                    let a = (du[e] * du[e] + delta * delta).powf((p - 2.0) / 2.0) * du[e];
                    let (a_lo, a_hi) = (tk(u.values()[lo]), tk(u.values()[hi]));
                    // F_0 = r + r²/2 splits into r + (r⁺)²/2 and (r⁻)²/2; F_1 = −r is decreasing
                    let fbar = if axis == 0 {
                        0.5 * a_lo.min(0.0).powi(2) + a_hi + 0.5 * a_hi.max(0.0).powi(2)
                    } else {
                        -a_lo
                    };
                    weak += g.edge_weights(axis)[e] * (a + fbar) * dphi[e];
                }
            }
            assert!((lhs - weak).abs() <= 1e-12 * (1.0 + weak.abs()), "{lhs} vs {weak}");
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Grid::unit(&[5, 4]).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0] + x[1]);
        let conv = ConvectionModel::Linear(vec![0.7, -1.3]);
        let prob = problem(&g, MonotoneGraph::power(3.0).unwrap(), &[1.7, 2.5], conv, f);
        let d = Discretization::new(&prob, 0.2, 0.1).unwrap();
        let u = GridFunction::dirichlet_from_fn(&g, |_| rng.random_range(-1.0..1.0));
        let jac = d.jacobian(u.values()).unwrap();
        let n = d.interior().len();
        // probe J e_k through the linear solve: J^{-1} (J e_k) = e_k, compare J e_k with FD
        for k in 0..n {
            let mut up = u.values().to_vec();
            let mut um = u.values().to_vec();
            let node = d.interior()[k];
            let h = 1e-6;
            up[node] += h;
            um[node] -= h;
            let rp = d.gather(&d.residual(&up).unwrap());
            let rm = d.gather(&d.residual(&um).unwrap());
            let col: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            let mut x = col.clone();
            let mut lu = jac.clone();
            lu.solve_in_place(&mut x).unwrap();
            for (i, v) in x.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-5, "column {k}, row {i}: {v}");
            }
        }
    }
}
