//! Random well-formed expression trees for property tests.
//!
//! Generated trees are in the parser's normal form: rows have at least two
//! children and never directly contain a row, bracket operators appear only
//! as matched pairs inside one row, and the root does not end with a
//! relation or additive operator.

use proptest::prelude::*;

use super::ast::{MathNode, OpClass};
use crate::macros::{load_dictionary, MacroTable};

const SAMPLE_DICT: &str = "\
[macro]
name = JacobiP
params = 3
args = 1
category = orthogonal-polynomial
display = P^{($1,$2)}_{$3}\\left($4\\right)
url = http://dlmf.nist.gov/18.3
mathematica = JacobiP[$3,$1,$2,$4]
maple = JacobiP($3,$1,$2,$4)
sage = jacobi_P($3,$1,$2,$4)

[macro]
name = Pochhammer
params = 2
args = 0
category = symbol
display = \\left($1\\right)_{$2}
url = http://dlmf.nist.gov/5.2
mathematica = Pochhammer[$1,$2]
maple = pochhammer($1,$2)

[macro]
name = EulerGamma
params = 0
args = 1
category = special-function
display = \\Gamma\\left($1\\right)
url = http://dlmf.nist.gov/5.2
mathematica = Gamma[$1]
maple = GAMMA($1)
sage = gamma($1)

[macro]
name = EulerConstant
params = 0
args = 0
category = symbol
display = \\gamma
url = http://dlmf.nist.gov/5.2
mathematica = EulerGamma
maple = gamma
sage = euler_gamma
";

/// The macros that [`arb_expr`] may apply.
pub fn sample_table() -> MacroTable {
    load_dictionary(SAMPLE_DICT).expect("sample dictionary is valid")
}

const MACROS: [(&str, usize, usize); 4] = [
    ("JacobiP", 3, 1),
    ("Pochhammer", 2, 0),
    ("EulerGamma", 0, 1),
    ("EulerConstant", 0, 0),
];
const GREEK: [&str; 6] = ["alpha", "beta", "lambda", "pi", "Gamma", "varepsilon"];
const OPS: [&str; 10] = ["+", "-", "=", ",", ".", "/", "!", "<", ">", "|"];

/// Nesting depth, counting a leaf as 1.
pub fn depth(node: &MathNode) -> usize {
    1 + node.children().into_iter().map(depth).max().unwrap_or(0)
}

fn arb_leaf() -> impl Strategy<Value = MathNode> {
    prop_oneof![
        (0u32..1000).prop_map(|n| MathNode::num(n.to_string())),
        "[a-zA-Z]".prop_map(MathNode::sym),
        prop::sample::select(GREEK.to_vec()).prop_map(MathNode::sym),
        prop::sample::select(OPS.to_vec()).prop_map(MathNode::op),
        Just(MathNode::apply("EulerConstant", vec![], vec![])),
    ]
}

fn arb_row(inner: BoxedStrategy<MathNode>) -> impl Strategy<Value = MathNode> {
    let bracket = prop::option::of((
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<bool>(),
        prop::option::of(arb_leaf()),
    ));
    (prop::collection::vec(inner, 2..5), bracket).prop_map(|(parts, bracket)| {
        let mut parts = parts;
        if let Some((i, j, square, power)) = bracket {
            let (a, b) = (i.index(parts.len() + 1), j.index(parts.len() + 1));
            let (lo, hi) = (a.min(b), a.max(b));
            let (open, close) = if square { ("[", "]") } else { ("(", ")") };
            let close = match power {
                Some(p) => MathNode::script(MathNode::op(close), None, Some(p)),
                None => MathNode::op(close),
            };
            parts.insert(hi, close);
            parts.insert(lo, MathNode::op(open));
        }
        MathNode::row(parts).expect("at least two parts")
    })
}

fn arb_apply(inner: BoxedStrategy<MathNode>) -> impl Strategy<Value = MathNode> {
    prop::sample::select(MACROS.to_vec()).prop_flat_map(move |(name, params, args)| {
        (
            prop::collection::vec(inner.clone(), params),
            prop::collection::vec(inner.clone(), args),
        )
            .prop_map(move |(p, a)| MathNode::apply(name, p, a))
    })
}

/// Trees of depth at most 6 covering every node kind.
pub fn arb_expr() -> impl Strategy<Value = MathNode> {
    arb_leaf()
        .prop_recursive(5, 48, 4, |inner| {
            let inner = inner.boxed();
            prop_oneof![
                arb_row(inner.clone()),
                (inner.clone(), inner.clone()).prop_map(|(n, d)| MathNode::frac(n, d)),
                (
                    inner.clone(),
                    prop::option::of(inner.clone()),
                    prop::option::of(inner.clone()),
                    any::<bool>(),
                )
                    .prop_map(|(base, sub, sup, sub_only)| match (sub, sup) {
                        (None, None) if sub_only => MathNode::script(base.clone(), Some(base), None),
                        (None, None) => MathNode::script(base.clone(), None, Some(base)),
                        (sub, sup) => MathNode::script(base, sub, sup),
                    }),
                (
                    prop::sample::select(vec!["(", "[", "|"]),
                    prop::sample::select(vec![")", "]", "|"]),
                    inner.clone(),
                )
                    .prop_map(|(o, c, body)| MathNode::fenced(o, c, body)),
                arb_apply(inner),
            ]
        })
        .prop_map(fix_root)
}

/// A top-level expression may not end with a relation or additive operator.
fn fix_root(node: MathNode) -> MathNode {
    let dangling = |n: &MathNode| matches!(n, MathNode::Op { class, .. } if *class != OpClass::Other);
    match node {
        MathNode::Row(mut parts) => {
            if parts.last().is_some_and(dangling) {
                parts.push(MathNode::sym("x"));
            }
            MathNode::Row(parts)
        }
        n if dangling(&n) => MathNode::Row(vec![n, MathNode::sym("x")]),
        n => n,
    }
}
