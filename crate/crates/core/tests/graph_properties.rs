use proptest::prelude::*;
use stefan_core::graph::{Branch, Domain};
use stefan_core::MonotoneGraph;

/// Random piecewise-affine graphs with up to three jumps, built so that each
/// branch starts at or above where the previous one ended.
fn graphs() -> impl Strategy<Value = MonotoneGraph> {
    (
        prop::collection::btree_set(-300i32..300, 0..4),
        prop::collection::vec((0.0..3.0f64, 0.0..2.0f64), 4),
        -2.0..2.0f64,
    )
        .prop_map(|(jumps, pieces, c0)| {
            let jumps: Vec<f64> = jumps.into_iter().map(|j| j as f64 / 100.0).collect();
            let mut branches = vec![Branch::Affine {
                slope: pieces[0].0,
                intercept: c0,
            }];
            for (k, &at) in jumps.iter().enumerate() {
                let end = branches[k].value(at);
                let (slope, gap) = pieces[k + 1];
                branches.push(Branch::Affine {
                    slope,
                    intercept: end + gap - slope * at,
                });
            }
            MonotoneGraph::piecewise(&jumps, branches, Domain::REAL_LINE).unwrap()
        })
}

fn presets() -> impl Strategy<Value = MonotoneGraph> {
    prop_oneof![
        Just(MonotoneGraph::identity()),
        Just(MonotoneGraph::zero()),
        (0.0..5.0f64).prop_map(|l| MonotoneGraph::stefan(l).unwrap()),
        (1.2..4.0f64).prop_map(|q| MonotoneGraph::power(q).unwrap()),
        (-2.0..2.0f64).prop_map(|c| MonotoneGraph::shifted_linear(c).unwrap()),
        graphs(),
    ]
}

fn eps() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.1), Just(1e-3), 1e-4..1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn resolvent_lands_on_the_graph(g in presets(), e in eps(), r in -20.0..20.0f64) {
        let j = g.resolvent(r, e).unwrap();
        let v = (r - j) / e;
        prop_assert!(e * g.eval(j).unwrap().distance(v) <= 1e-12 * (1.0 + r.abs()));
        prop_assert!((g.yosida(r, e).unwrap() - v).abs() <= 1e-9 * (1.0 + v.abs()));
    }

    #[test]
    fn resolvent_is_nonexpansive(g in presets(), e in eps(), r in -20.0..20.0f64, s in -20.0..20.0f64) {
        let d = (g.resolvent(r, e).unwrap() - g.resolvent(s, e).unwrap()).abs();
        prop_assert!(d <= (r - s).abs() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn yosida_is_monotone_and_lipschitz(g in presets(), e in eps(), r in -20.0..20.0f64, s in -20.0..20.0f64) {
        prop_assume!(r != s);
        let q = (g.yosida(r, e).unwrap() - g.yosida(s, e).unwrap()) / (r - s);
        prop_assert!(q >= -1e-9);
        prop_assert!(q <= 1.0 / e + 1e-9);
    }

    #[test]
    fn yosida_slope_matches_difference_quotient(g in graphs(), e in eps(), r in -5.0..5.0f64) {
        let h = 1e-7;
        let (lo, hi) = (g.yosida(r - h, e).unwrap(), g.yosida(r + h, e).unwrap());
        let fd = (hi - lo) / (2.0 * h);
        let slope = g.yosida_slope(r, e).unwrap();
        // kinks of the Yosida map make one-sided slopes differ, so compare
        // against the secant only where it is locally affine
        let left = (g.yosida(r, e).unwrap() - lo) / h;
        let right = (hi - g.yosida(r, e).unwrap()) / h;
        if (left - right).abs() <= 1e-5 * (1.0 + left.abs()) {
            prop_assert!((slope - fd).abs() <= 1e-4 * (1.0 + fd.abs()), "slope {} fd {}", slope, fd);
        }
    }

    #[test]
    fn primitive_is_convex_and_below_j(g in presets(), e in eps(), r in -10.0..10.0f64, s in -10.0..10.0f64) {
        let je = |x: f64| g.yosida_primitive(x, e).unwrap();
        let lhs = je(r);
        let rhs = je(s) + (r - s) * g.yosida(s, e).unwrap();
        prop_assert!(lhs >= rhs - 1e-10 * (1.0 + lhs.abs()));
        let mid = je(0.5 * (r + s));
        prop_assert!(mid <= 0.5 * (je(r) + je(s)) + 1e-10 * (1.0 + mid.abs()));
        if g.contains_origin() {
            prop_assert!(lhs <= g.primitive_j(r).unwrap() + 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn yosida_approaches_single_valued_points(g in graphs(), r in -5.0..5.0f64) {
        let set = g.eval(r).unwrap();
        prop_assume!(set.is_singleton());
        let errs: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&e| (g.yosida(r, e).unwrap() - set.lower).abs())
            .collect();
        prop_assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", errs);
    }

    #[test]
    fn minimal_selection_is_monotone(g in presets(), r in -10.0..10.0f64, s in -10.0..10.0f64) {
        let (a, b) = (g.minimal_selection(r).unwrap(), g.minimal_selection(s).unwrap());
        prop_assert!((a - b) * (r - s) >= -1e-12);
    }
}

#[test]
fn primitive_identity_examples() {
    let g = MonotoneGraph::identity();
    assert!((g.yosida_primitive(2.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((g.yosida_primitive(2.0, 0.01).unwrap() - 2.0 / 1.01).abs() < 1e-12);
    assert_eq!(g.yosida_primitive(0.0, 0.3).unwrap(), 0.0);
}

#[test]
fn stefan_latent_heat_is_absorbed_at_zero() {
    let g = MonotoneGraph::stefan(1.0).unwrap();
    // inside the jump the Yosida map follows r / ε
    assert!((g.yosida(0.05, 0.1).unwrap() - 0.5).abs() < 1e-14);
    assert!((g.resolvent(0.05, 0.1).unwrap()).abs() < 1e-14);
    // the primitive picks up the whole latent heat once past the jump
    assert!((g.primitive_j(1.0).unwrap() - 1.5).abs() < 1e-14);
}
