//! Closed-form source expressions over the coordinates `x`, `y`, `z`.
//!
//! Arithmetic, `^`, comparisons and the built-in functions of `fasteval`
//! (`sin`, `cos`, `abs`, `min`, `max`, ...) are available, plus `exp(v)`,
//! `ln(v)`, `sqrt(v)` and `piecewise(c, a, b)`, which is `a` when `c > 0`
//! and `b` otherwise. Note that `log(v)` is the base-10 logarithm.

use fasteval::{Compiler, Evaler, Instruction, Parser, Slab};

const AXES: [&str; 3] = ["x", "y", "z"];

pub struct SourceExpr {
    text: String,
    slab: Slab,
    instr: Instruction,
    dim: usize,
}

impl std::fmt::Debug for SourceExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourceExpr")
            .field("text", &self.text)
            .field("dim", &self.dim)
            .finish()
    }
}

fn call(name: &str, args: &[f64], x: &[f64]) -> Option<f64> {
    if let Some(axis) = AXES.iter().position(|a| *a == name) {
        return if args.is_empty() { x.get(axis).copied() } else { None };
    }
    match (name, args) {
        ("exp", [v]) => Some(v.exp()),
        ("ln", [v]) => Some(v.ln()),
        ("sqrt", [v]) => Some(v.sqrt()),
        ("piecewise", [c, a, b]) => Some(if *c > 0.0 { *a } else { *b }),
        _ => None,
    }
}

impl SourceExpr {
    /// Parses `text` for a `dim`-dimensional domain. Unknown names and
    /// coordinates beyond `dim` are rejected here by a trial evaluation.
    pub fn parse(text: &str, dim: usize) -> Result<Self, String> {
        let mut slab = Slab::new();
        let instr = Parser::new()
            .parse(text, &mut slab.ps)
            .map_err(|e| format!("cannot parse source expression `{text}`: {e:?}"))?
            .from(&slab.ps)
            .compile(&slab.ps, &mut slab.cs);
        let expr = SourceExpr {
            text: text.to_string(),
            slab,
            instr,
            dim,
        };
        expr.eval(&[0.5; 3][..dim])?;
        Ok(expr)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, String> {
        let x = &x[..self.dim.min(x.len())];
        let mut ns = |name: &str, args: Vec<f64>| call(name, &args, x);
        self.instr
            .eval(&self.slab, &mut ns)
            .map_err(|e| format!("cannot evaluate `{}`: {e:?}", self.text))
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_coordinates_and_functions() {
        let e = SourceExpr::parse("2*x + y^2 - exp(0) + piecewise(x - 0.5, 10, -10)", 2).unwrap();
        assert_eq!(e.eval(&[0.25, 2.0]).unwrap(), 0.5 + 4.0 - 1.0 - 10.0);
        assert_eq!(e.eval(&[0.75, 0.0]).unwrap(), 1.5 - 1.0 + 10.0);
        let c = SourceExpr::parse("1", 1).unwrap();
        assert_eq!(c.eval(&[0.3]).unwrap(), 1.0);
        let s = SourceExpr::parse("sin(pi()*x) * sqrt(4) + ln(1) + abs(-1)", 1).unwrap();
        assert!((s.eval(&[0.5]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SourceExpr::parse("x +", 1).is_err());
        assert!(SourceExpr::parse("y", 1).is_err());
        assert!(SourceExpr::parse("foo(x)", 2).is_err());
        assert!(SourceExpr::parse("piecewise(x, 1)", 1).is_err());
    }
}
