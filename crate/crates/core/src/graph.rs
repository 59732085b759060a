//! Maximal monotone graphs on ℝ.
//!
//! A graph is stored as an ordered list of breakpoints, each carrying the
//! closed value interval `[lower, upper]` of the graph at that abscissa, and
//! one single-valued nondecreasing [`Branch`] on every open interval between
//! consecutive breakpoints. The effective domain may be closed at either end;
//! at a closed end the graph contains the vertical half-line that makes it
//! maximal.
//!
//! Everything the regularized solver needs is available in closed form per
//! piece: the resolvent `(I + εβ)⁻¹`, the Yosida approximation
//! `β_ε = (I − (I + εβ)⁻¹)/ε`, its one-sided slope, the convex primitive `j`
//! with `∂j = β` and the primitive `j_ε` of `β_ε`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Closed interval of reals; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Interval { lower, upper }
    }

    pub fn point(v: f64) -> Self {
        Interval { lower: v, upper: v }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }

    /// Distance from `v` to the interval (zero inside).
    pub fn distance(&self, v: f64) -> f64 {
        if v < self.lower {
            self.lower - v
        } else if v > self.upper {
            v - self.upper
        } else {
            0.0
        }
    }

    /// Element of smallest absolute value.
    pub fn minimal_element(&self) -> f64 {
        0.0f64.max(self.lower).min(self.upper)
    }

    pub fn is_singleton(&self) -> bool {
        self.lower == self.upper
    }
}

/// Single-valued nondecreasing piece of a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// `slope · r + intercept`, `slope ≥ 0`.
    Affine { slope: f64, intercept: f64 },
    /// `coefficient · |r|^(exponent − 1) · sgn(r)`, `exponent > 1`.
    Power { coefficient: f64, exponent: f64 },
}

impl Branch {
    fn validate(&self) -> Result<()> {
        match *self {
            Branch::Affine { slope, intercept } => {
                if !(slope.is_finite() && intercept.is_finite()) || slope < 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "affine branch needs finite slope >= 0, got slope {slope}, intercept {intercept}"
                    )));
                }
            }
            Branch::Power { coefficient, exponent } => {
                if !(coefficient.is_finite() && exponent.is_finite()) || coefficient < 0.0 || exponent <= 1.0 {
                    return Err(Error::InvalidGraph(format!(
                        "power branch needs coefficient >= 0 and exponent > 1, got {coefficient}, {exponent}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Branch::Affine { slope, intercept } => slope * s + intercept,
            Branch::Power { coefficient, exponent } => coefficient * signed_pow(s, exponent - 1.0),
        }
    }

    /// Derivative of the branch; `+∞` where a power branch with exponent
    /// below 2 has a vertical tangent.
    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Branch::Affine { slope, .. } => slope,
            Branch::Power { coefficient, exponent } => {
                if coefficient == 0.0 {
                    0.0
                } else if s == 0.0 {
                    if exponent < 2.0 {
                        f64::INFINITY
                    } else if exponent == 2.0 {
                        coefficient
                    } else {
                        0.0
                    }
                } else {
                    coefficient * (exponent - 1.0) * libm::pow(s.abs(), exponent - 2.0)
                }
            }
        }
    }

    /// `∫₀^s value`.
    pub fn primitive(&self, s: f64) -> f64 {
        match *self {
            Branch::Affine { slope, intercept } => 0.5 * slope * s * s + intercept * s,
            Branch::Power { coefficient, exponent } => coefficient * libm::pow(s.abs(), exponent) / exponent,
        }
    }

    /// Solves `s + eps·value(s) = r` for `s` in `[a, b]`; the caller
    /// guarantees a root exists there.
    fn solve_shifted(&self, r: f64, eps: f64, a: f64, b: f64) -> f64 {
        match *self {
            Branch::Affine { slope, intercept } => {
                let s = (r - eps * intercept) / (1.0 + eps * slope);
                s.max(a).min(b)
            }
            Branch::Power { .. } => {
                // root has the sign of r and |s| <= |r|
                let mut lo = a.max(r.min(0.0));
                let mut hi = b.min(r.max(0.0));
                if lo > hi {
                    // r lies on the branch's boundary window; nearest end
                    return if r < a { a } else { b };
                }
                let g = |s: f64| s + eps * self.value(s) - r;
                let mut s = 0.5 * (lo + hi);
                for _ in 0..200 {
                    let gs = g(s);
                    if gs == 0.0 {
                        return s;
                    }
                    if gs > 0.0 {
                        hi = s;
                    } else {
                        lo = s;
                    }
                    let d = 1.0 + eps * self.derivative(s);
                    let mut next = s - gs / d;
                    if !(next > lo && next < hi) || !next.is_finite() {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(f64::MIN_POSITIVE)
                        || hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs())
                    {
                        return next;
                    }
                    s = next;
                }
                s
            }
        }
    }

    /// Squared distance from `(u, b)` to the branch restricted to `[lo, hi]`.
    fn distance_sq(&self, u: f64, b: f64, lo: f64, hi: f64) -> f64 {
        match *self {
            Branch::Affine { slope, intercept } => {
                // project onto the line, then clamp to the segment
                let t = (u + slope * (b - intercept)) / (1.0 + slope * slope);
                let s = t.max(lo).min(hi);
                let dx = s - u;
                let dy = self.value(s) - b;
                dx * dx + dy * dy
            }
            Branch::Power { .. } => {
                let d2 = |s: f64| {
                    let dx = s - u;
                    let dy = self.value(s) - b;
                    dx * dx + dy * dy
                };
                // nearest point lies between the vertical and horizontal projections
                let horizontal = self.inverse(b);
                let mut a = u.min(horizontal).max(lo);
                let mut c = u.max(horizontal).min(hi);
                if a > c {
                    let s = if u < lo { lo } else { hi };
                    return d2(s);
                }
                const SAMPLES: usize = 64;
                let step = (c - a) / SAMPLES as f64;
                let mut best = (d2(a), a);
                for i in 1..=SAMPLES {
                    let s = if i == SAMPLES { c } else { a + step * i as f64 };
                    let v = d2(s);
                    if v < best.0 {
                        best = (v, s);
                    }
                }
                a = (best.1 - step).max(a);
                c = (best.1 + step).min(c);
                // golden section on the bracketing cell
                let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
                for _ in 0..100 {
                    let x1 = c - ratio * (c - a);
                    let x2 = a + ratio * (c - a);
                    if d2(x1) < d2(x2) {
                        c = x2;
                    } else {
                        a = x1;
                    }
                }
                best.0.min(d2(0.5 * (a + c)))
            }
        }
    }

    /// Unrestricted inverse of the branch formula.
    fn inverse(&self, v: f64) -> f64 {
        match *self {
            Branch::Affine { slope, intercept } => {
                if slope == 0.0 {
                    if v >= intercept {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    (v - intercept) / slope
                }
            }
            Branch::Power { coefficient, exponent } => {
                if coefficient == 0.0 {
                    if v >= 0.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    signed_pow(v / coefficient, 1.0 / (exponent - 1.0))
                }
            }
        }
    }
}

fn signed_pow(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if e == 1.0 {
        s
    } else {
        libm::copysign(libm::pow(s.abs(), e), s)
    }
}

/// Jump location with the closed value interval of the graph there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Effective domain `D(β)`; `None` means unbounded on that side. Finite ends
/// are closed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Domain {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lower: None,
        upper: None,
    };

    pub fn contains(&self, r: f64) -> bool {
        self.lower.is_none_or(|lo| r >= lo) && self.upper.is_none_or(|hi| r <= hi)
    }

    pub fn is_real_line(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }
}

/// Piece of the graph that is active for the resolvent at a given argument.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Active {
    /// `J_ε(r)` sits at a breakpoint or closed domain end (vertical part).
    Vertical(f64),
    /// `J_ε(r)` lies inside branch `k`.
    Branch(usize, f64),
}

/// Maximal monotone graph `β ⊂ ℝ × ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneGraph {
    breakpoints: Vec<Breakpoint>,
    branches: Vec<Branch>,
    domain: Domain,
}

const CLOSURE_TOL: f64 = 1e-12;

impl MonotoneGraph {
    /// Builds a graph from explicit breakpoints and branches.
    ///
    /// `branches[k]` lives on the open interval between breakpoint `k − 1`
    /// and breakpoint `k` (domain ends at the extremes). Each breakpoint's
    /// value interval must coincide with the one-sided limits of its
    /// neighbouring branches, which is exactly the condition for the graph
    /// to be monotone and admit no monotone extension.
    pub fn new(breakpoints: Vec<Breakpoint>, branches: Vec<Branch>, domain: Domain) -> Result<Self> {
        if branches.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidGraph(format!(
                "{} breakpoints need {} branches, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                branches.len()
            )));
        }
        for b in &branches {
            b.validate()?;
        }
        if let (Some(lo), Some(hi)) = (domain.lower, domain.upper) {
            if !(lo < hi) {
                return Err(Error::InvalidGraph(format!("empty domain interior [{lo}, {hi}]")));
            }
        }
        for end in [domain.lower, domain.upper].into_iter().flatten() {
            if !end.is_finite() {
                return Err(Error::InvalidGraph("domain ends must be finite when present".into()));
            }
        }
        let mut prev = domain.lower.unwrap_or(f64::NEG_INFINITY);
        for (k, bp) in breakpoints.iter().enumerate() {
            if !(bp.at.is_finite() && bp.lower.is_finite() && bp.upper.is_finite()) {
                return Err(Error::InvalidGraph(format!("breakpoint {k} is not finite")));
            }
            if !(bp.at > prev) {
                return Err(Error::InvalidGraph(format!(
                    "breakpoint {k} at {} is not strictly inside the domain / after its predecessor",
                    bp.at
                )));
            }
            prev = bp.at;
            if bp.lower > bp.upper {
                return Err(Error::InvalidGraph(format!(
                    "breakpoint {k}: lower {} exceeds upper {}",
                    bp.lower, bp.upper
                )));
            }
            let left = branches[k].value(bp.at);
            let right = branches[k + 1].value(bp.at);
            let scale = 1.0 + left.abs().max(right.abs());
            if (left - bp.lower).abs() > CLOSURE_TOL * scale || (right - bp.upper).abs() > CLOSURE_TOL * scale {
                return Err(Error::InvalidGraph(format!(
                    "breakpoint {k} at {}: interval [{}, {}] does not close the graph (branch limits {left}, {right})",
                    bp.at, bp.lower, bp.upper
                )));
            }
        }
        if let Some(hi) = domain.upper {
            if !(hi > prev) {
                return Err(Error::InvalidGraph("upper domain end precedes a breakpoint".into()));
            }
        }
        Ok(MonotoneGraph {
            breakpoints,
            branches,
            domain,
        })
    }

    /// Builds a graph from jump abscissae and branches, filling the value
    /// intervals from the branch limits.
    pub fn piecewise(jumps: &[f64], branches: Vec<Branch>, domain: Domain) -> Result<Self> {
        if branches.len() != jumps.len() + 1 {
            return Err(Error::InvalidGraph(format!(
                "{} jumps need {} branches, got {}",
                jumps.len(),
                jumps.len() + 1,
                branches.len()
            )));
        }
        let breakpoints = jumps
            .iter()
            .enumerate()
            .map(|(k, &at)| Breakpoint {
                at,
                lower: branches[k].value(at),
                upper: branches[k + 1].value(at),
            })
            .collect();
        Self::new(breakpoints, branches, domain)
    }

    /// `β(r) = r`.
    pub fn identity() -> Self {
        Self::single(Branch::Affine {
            slope: 1.0,
            intercept: 0.0,
        })
    }

    /// `β ≡ 0`.
    pub fn zero() -> Self {
        Self::single(Branch::Affine {
            slope: 0.0,
            intercept: 0.0,
        })
    }

    /// Enthalpy graph with latent heat `latent`: `r` for `r < 0`,
    /// `[0, latent]` at `0`, `r + latent` for `r > 0`.
    pub fn stefan(latent: f64) -> Result<Self> {
        if !(latent.is_finite() && latent >= 0.0) {
            return Err(Error::InvalidGraph(format!("latent heat must be >= 0, got {latent}")));
        }
        Self::piecewise(
            &[0.0],
            alloc::vec![
                Branch::Affine {
                    slope: 1.0,
                    intercept: 0.0
                },
                Branch::Affine {
                    slope: 1.0,
                    intercept: latent
                },
            ],
            Domain::REAL_LINE,
        )
    }

    /// `β(r) = |r|^(q−1) sgn(r)`.
    pub fn power(q: f64) -> Result<Self> {
        let b = Branch::Power {
            coefficient: 1.0,
            exponent: q,
        };
        b.validate()?;
        Ok(Self::single(b))
    }

    /// `β(r) = r − shift`; violates `0 ∈ β(0)` unless `shift = 0`.
    pub fn shifted_linear(shift: f64) -> Result<Self> {
        let b = Branch::Affine {
            slope: 1.0,
            intercept: -shift,
        };
        b.validate()?;
        Ok(Self::single(b))
    }

    fn single(branch: Branch) -> Self {
        MonotoneGraph {
            breakpoints: Vec::new(),
            branches: alloc::vec![branch],
            domain: Domain::REAL_LINE,
        }
    }

    /// Parses the named presets `identity`, `zero`, `stefan:L`, `power:q`
    /// and `shifted_linear:c`.
    pub fn from_preset(name: &str) -> Result<Self> {
        let name = name.trim();
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (name, None),
        };
        let number = |what: &str| -> Result<f64> {
            let text = arg.ok_or_else(|| Error::InvalidGraph(format!("preset `{head}` needs a parameter ({what})")))?;
            text.parse::<f64>()
                .map_err(|_| Error::InvalidGraph(format!("cannot parse `{text}` as {what}")))
        };
        match head {
            "identity" => Ok(Self::identity()),
            "zero" => Ok(Self::zero()),
            "stefan" => Self::stefan(number("latent heat")?),
            "power" => Self::power(number("exponent")?),
            "shifted_linear" => Self::shifted_linear(number("shift")?),
            _ => Err(Error::InvalidGraph(format!("unknown graph preset `{name}`"))),
        }
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `0 ∈ β(0)`.
    pub fn contains_origin(&self) -> bool {
        self.eval(0.0).map(|v| v.contains(0.0, 0.0)).unwrap_or(false)
    }

    /// Graph is single-valued and strictly increasing.
    pub fn is_strictly_monotone(&self) -> bool {
        self.branches.iter().all(|b| match *b {
            Branch::Affine { slope, .. } => slope > 0.0,
            Branch::Power { coefficient, .. } => coefficient > 0.0,
        })
    }

    /// Interval `[a, b]` of the branch with index `k`.
    fn branch_span(&self, k: usize) -> (f64, f64) {
        let a = if k == 0 {
            self.domain.lower.unwrap_or(f64::NEG_INFINITY)
        } else {
            self.breakpoints[k - 1].at
        };
        let b = if k == self.breakpoints.len() {
            self.domain.upper.unwrap_or(f64::INFINITY)
        } else {
            self.breakpoints[k].at
        };
        (a, b)
    }

    /// Value set `β(r)`.
    pub fn eval(&self, r: f64) -> Result<Interval> {
        if !r.is_finite() || !self.domain.contains(r) {
            return Err(Error::Domain { value: r });
        }
        let last = self.branches.len() - 1;
        if self.domain.lower == Some(r) {
            return Ok(Interval::new(f64::NEG_INFINITY, self.branches[0].value(r)));
        }
        if self.domain.upper == Some(r) {
            return Ok(Interval::new(self.branches[last].value(r), f64::INFINITY));
        }
        let k = self.breakpoints.partition_point(|bp| bp.at < r);
        if let Some(bp) = self.breakpoints.get(k) {
            if bp.at == r {
                return Ok(Interval::new(bp.lower, bp.upper));
            }
        }
        Ok(Interval::point(self.branches[k].value(r)))
    }

    /// Minimal-absolute-value selection `β°(r)`.
    pub fn minimal_selection(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.minimal_element())
    }

    fn check_eps(eps: f64) -> Result<()> {
        if eps.is_finite() && eps > 0.0 {
            Ok(())
        } else {
            Err(Error::param(format!("regularization eps must be > 0, got {eps}")))
        }
    }

    fn locate(&self, r: f64, eps: f64) -> Active {
        let last = self.branches.len() - 1;
        if let Some(lo) = self.domain.lower {
            if r <= lo + eps * self.branches[0].value(lo) {
                return Active::Vertical(lo);
            }
        }
        if let Some(hi) = self.domain.upper {
            if r >= hi + eps * self.branches[last].value(hi) {
                return Active::Vertical(hi);
            }
        }
        // windows [at + eps·lower, at + eps·upper] are ordered along r
        let k = self.breakpoints.partition_point(|bp| bp.at + eps * bp.upper < r);
        if let Some(bp) = self.breakpoints.get(k) {
            if r >= bp.at + eps * bp.lower {
                return Active::Vertical(bp.at);
            }
        }
        let (a, b) = self.branch_span(k);
        Active::Branch(k, self.branches[k].solve_shifted(r, eps, a, b))
    }

    /// Resolvent `J_ε(r) = (I + εβ)⁻¹(r)`: the unique `s` with
    /// `r ∈ s + ε β(s)`.
    pub fn resolvent(&self, r: f64, eps: f64) -> Result<f64> {
        Self::check_eps(eps)?;
        if !r.is_finite() {
            return Err(Error::param(format!("resolvent argument must be finite, got {r}")));
        }
        Ok(match self.locate(r, eps) {
            Active::Vertical(s) | Active::Branch(_, s) => s,
        })
    }

    /// Yosida approximation `β_ε(r) = (r − J_ε(r))/ε`.
    pub fn yosida(&self, r: f64, eps: f64) -> Result<f64> {
        let s = self.resolvent(r, eps)?;
        Ok((r - s) / eps)
    }

    /// One-sided derivative of `β_ε` taken from the active piece of the
    /// resolvent; `1/ε` on vertical parts of the graph.
    pub fn yosida_slope(&self, r: f64, eps: f64) -> Result<f64> {
        Self::check_eps(eps)?;
        Ok(match self.locate(r, eps) {
            Active::Vertical(_) => 1.0 / eps,
            Active::Branch(k, s) => {
                let d = self.branches[k].derivative(s);
                if d.is_infinite() {
                    1.0 / eps
                } else {
                    d / (1.0 + eps * d)
                }
            }
        })
    }

    /// `∫_a^b β°(s) ds` over a stretch of the domain (signed).
    fn integrate(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut total = 0.0;
        for (k, branch) in self.branches.iter().enumerate() {
            let (s0, s1) = self.branch_span(k);
            let x0 = lo.max(s0);
            let x1 = hi.min(s1);
            if x0 < x1 {
                total += branch.primitive(x1) - branch.primitive(x0);
            }
        }
        sign * total
    }

    /// Convex primitive `j(r) = ∫₀^r β°(s) ds`, so that `∂j = β`.
    pub fn primitive_j(&self, r: f64) -> Result<f64> {
        if !r.is_finite() || !self.domain.contains(r) {
            return Err(Error::Domain { value: r });
        }
        if !self.domain.contains(0.0) {
            return Err(Error::Domain { value: 0.0 });
        }
        Ok(self.integrate(0.0, r))
    }

    /// `j_ε(r) = ∫₀^r β_ε(s) ds`.
    ///
    /// Integrated exactly piece by piece: along the graph the change of
    /// variables `ρ = s + εv` turns `∫ β_ε dρ` into `∫ v ds + ε ∫ v dv`, where
    /// the first term only collects the single-valued branches.
    pub fn yosida_primitive(&self, r: f64, eps: f64) -> Result<f64> {
        Self::check_eps(eps)?;
        let s0 = self.resolvent(0.0, eps)?;
        let s1 = self.resolvent(r, eps)?;
        let v0 = (0.0 - s0) / eps;
        let v1 = (r - s1) / eps;
        Ok(self.integrate(s0, s1) + 0.5 * eps * (v1 * v1 - v0 * v0))
    }

    /// Euclidean distance from the point `(u, b)` to the graph.
    pub fn distance_to_graph(&self, u: f64, b: f64) -> f64 {
        let mut best = f64::INFINITY;
        for (k, branch) in self.branches.iter().enumerate() {
            let (lo, hi) = self.branch_span(k);
            best = best.min(branch.distance_sq(u, b, lo, hi));
        }
        for bp in &self.breakpoints {
            let dx = u - bp.at;
            let dy = Interval::new(bp.lower, bp.upper).distance(b);
            best = best.min(dx * dx + dy * dy);
        }
        if let Some(lo) = self.domain.lower {
            let dx = u - lo;
            let dy = Interval::new(f64::NEG_INFINITY, self.branches[0].value(lo)).distance(b);
            best = best.min(dx * dx + dy * dy);
        }
        if let Some(hi) = self.domain.upper {
            let last = self.branches.len() - 1;
            let dx = u - hi;
            let dy = Interval::new(self.branches[last].value(hi), f64::INFINITY).distance(b);
            best = best.min(dx * dx + dy * dy);
        }
        libm::sqrt(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        assert_eq!(MonotoneGraph::identity().eval(3.0).unwrap(), Interval::point(3.0));
        let st = MonotoneGraph::stefan(1.0).unwrap();
        assert_eq!(st.eval(0.0).unwrap(), Interval::new(0.0, 1.0));
        assert_eq!(st.eval(-2.0).unwrap(), Interval::point(-2.0));
        assert_eq!(st.eval(2.0).unwrap(), Interval::point(3.0));
    }

    #[test]
    fn eval_outside_domain_is_error() {
        let g = MonotoneGraph::piecewise(
            &[],
            alloc::vec![Branch::Affine {
                slope: 1.0,
                intercept: 0.0
            }],
            Domain {
                lower: Some(-1.0),
                upper: Some(1.0),
            },
        )
        .unwrap();
        assert!(matches!(g.eval(2.0), Err(Error::Domain { .. })));
        assert!(matches!(g.primitive_j(-3.0), Err(Error::Domain { .. })));
        let end = g.eval(1.0).unwrap();
        assert_eq!(end.lower, 1.0);
        assert!(end.upper.is_infinite());
    }

    #[test]
    fn resolvent_examples() {
        let id = MonotoneGraph::identity();
        assert_eq!(id.resolvent(1.0, 1.0).unwrap(), 0.5);
        let st = MonotoneGraph::stefan(1.0).unwrap();
        assert_eq!(st.resolvent(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(st.resolvent(0.5, 1.0).unwrap(), 0.0);
        assert!(matches!(id.resolvent(1.0, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn yosida_examples() {
        let id = MonotoneGraph::identity();
        assert_eq!(id.yosida(1.0, 1.0).unwrap(), 0.5);
        for g in [
            MonotoneGraph::identity(),
            MonotoneGraph::stefan(2.0).unwrap(),
            MonotoneGraph::power(3.0).unwrap(),
        ] {
            assert_eq!(g.yosida(0.0, 0.1).unwrap(), 0.0);
        }
        let st = MonotoneGraph::stefan(1.0).unwrap();
        assert_eq!(st.yosida(0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn primitive_examples() {
        let id = MonotoneGraph::identity();
        assert_eq!(id.primitive_j(2.0).unwrap(), 2.0);
        assert_eq!(id.primitive_j(0.0).unwrap(), 0.0);
        // β°(s) = s + 1 on (0, 1)
        let st = MonotoneGraph::stefan(1.0).unwrap();
        assert!(close(st.primitive_j(1.0).unwrap(), 1.5, 1e-15));
        assert!(close(st.primitive_j(-1.0).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn yosida_primitive_examples() {
        let id = MonotoneGraph::identity();
        assert!(close(id.yosida_primitive(2.0, 1.0).unwrap(), 1.0, 1e-14));
        assert_eq!(id.yosida_primitive(0.0, 0.5).unwrap(), 0.0);
        assert!(close(id.yosida_primitive(2.0, 0.01).unwrap(), 4.0 / 2.02, 1e-13));
        assert!(close(id.yosida_primitive(2.0, 0.01).unwrap(), 1.9802, 1e-4));
    }

    #[test]
    fn closure_is_enforced() {
        let bad = MonotoneGraph::new(
            alloc::vec![Breakpoint {
                at: 0.0,
                lower: 0.0,
                upper: 0.5
            }],
            alloc::vec![
                Branch::Affine {
                    slope: 1.0,
                    intercept: 0.0
                },
                Branch::Affine {
                    slope: 1.0,
                    intercept: 1.0
                },
            ],
            Domain::REAL_LINE,
        );
        assert!(matches!(bad, Err(Error::InvalidGraph(_))));
        let decreasing = MonotoneGraph::piecewise(
            &[0.0],
            alloc::vec![
                Branch::Affine {
                    slope: 1.0,
                    intercept: 1.0
                },
                Branch::Affine {
                    slope: 1.0,
                    intercept: 0.0
                },
            ],
            Domain::REAL_LINE,
        );
        assert!(decreasing.is_err());
        let negative_slope = MonotoneGraph::piecewise(
            &[],
            alloc::vec![Branch::Affine {
                slope: -1.0,
                intercept: 0.0
            }],
            Domain::REAL_LINE,
        );
        assert!(negative_slope.is_err());
    }

    #[test]
    fn presets_parse() {
        assert_eq!(
            MonotoneGraph::from_preset("identity").unwrap(),
            MonotoneGraph::identity()
        );
        assert_eq!(
            MonotoneGraph::from_preset("stefan:2").unwrap(),
            MonotoneGraph::stefan(2.0).unwrap()
        );
        assert!(MonotoneGraph::from_preset("power:3").is_ok());
        assert!(MonotoneGraph::from_preset("power:1").is_err());
        assert!(MonotoneGraph::from_preset("stefan").is_err());
        assert!(MonotoneGraph::from_preset("cubic").is_err());
        let shifted = MonotoneGraph::from_preset("shifted_linear:1").unwrap();
        assert!(!shifted.contains_origin());
        assert!(MonotoneGraph::stefan(1.0).unwrap().contains_origin());
    }

    #[test]
    fn bounded_domain_resolvent_hits_the_end() {
        let g = MonotoneGraph::piecewise(
            &[],
            alloc::vec![Branch::Affine {
                slope: 0.0,
                intercept: 0.0
            }],
            Domain {
                lower: Some(-1.0),
                upper: Some(1.0),
            },
        )
        .unwrap();
        assert_eq!(g.resolvent(5.0, 0.5).unwrap(), 1.0);
        assert_eq!(g.yosida(5.0, 0.5).unwrap(), 8.0);
        assert_eq!(g.resolvent(0.3, 0.5).unwrap(), 0.3);
        assert_eq!(g.yosida_slope(5.0, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn distance_to_graph_examples() {
        let st = MonotoneGraph::stefan(1.0).unwrap();
        assert_eq!(st.distance_to_graph(0.0, 0.5), 0.0);
        assert!(close(st.distance_to_graph(2.0, 3.0), 0.0, 1e-15));
        // (0, 2) is nearest to (0, 1) or the branch r + 1
        assert!(close(
            st.distance_to_graph(0.0, 2.0),
            core::f64::consts::FRAC_1_SQRT_2,
            1e-12
        ));
        let p = MonotoneGraph::power(3.0).unwrap();
        assert!(p.distance_to_graph(2.0, 4.0) < 1e-12);
        assert!(p.distance_to_graph(0.0, 1.0) > 0.1);
    }
}
