use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpClass {
    Relation,
    Additive,
    Other,
}

impl OpClass {
    pub fn of(symbol: &str) -> OpClass {
        match symbol {
            "=" | "<" | ">" => OpClass::Relation,
            "+" | "-" => OpClass::Additive,
            _ => OpClass::Other,
        }
    }
}

/// Parsed math expression.
///
/// Rows are flat (no row is a direct child of another row) and always hold at
/// least two children. Brace groups leave no trace in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MathNode {
    Num(String),
    /// A Latin letter or the name of a Greek control sequence (`alpha`).
    Sym(String),
    Op {
        symbol: String,
        class: OpClass,
    },
    Row(Vec<MathNode>),
    Frac(Box<MathNode>, Box<MathNode>),
    Script {
        base: Box<MathNode>,
        sub: Option<Box<MathNode>>,
        sup: Option<Box<MathNode>>,
    },
    Fenced {
        open: String,
        close: String,
        body: Box<MathNode>,
    },
    Apply {
        name: String,
        params: Vec<MathNode>,
        args: Vec<MathNode>,
    },
}

impl MathNode {
    pub fn num(value: impl Into<String>) -> Self {
        MathNode::Num(value.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        MathNode::Sym(name.into())
    }

    pub fn op(symbol: impl Into<String>) -> Self {
        let symbol = symbol.into();
        let class = OpClass::of(&symbol);
        MathNode::Op { symbol, class }
    }

    pub fn frac(num: MathNode, den: MathNode) -> Self {
        MathNode::Frac(Box::new(num), Box::new(den))
    }

    pub fn script(base: MathNode, sub: Option<MathNode>, sup: Option<MathNode>) -> Self {
        MathNode::Script {
            base: Box::new(base),
            sub: sub.map(Box::new),
            sup: sup.map(Box::new),
        }
    }

    pub fn fenced(open: impl Into<String>, close: impl Into<String>, body: MathNode) -> Self {
        MathNode::Fenced {
            open: open.into(),
            close: close.into(),
            body: Box::new(body),
        }
    }

    pub fn apply(name: impl Into<String>, params: Vec<MathNode>, args: Vec<MathNode>) -> Self {
        MathNode::Apply {
            name: name.into(),
            params,
            args,
        }
    }

    /// Builds a row from parts, splicing nested rows. A single part is
    /// returned as is; an empty list yields `None`.
    pub fn row(parts: Vec<MathNode>) -> Option<MathNode> {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                MathNode::Row(children) => flat.extend(children),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => None,
            1 => flat.pop(),
            _ => Some(MathNode::Row(flat)),
        }
    }

    /// Direct children in left-to-right order.
    pub fn children(&self) -> Vec<&MathNode> {
        match self {
            MathNode::Num(_) | MathNode::Sym(_) | MathNode::Op { .. } => Vec::new(),
            MathNode::Row(children) => children.iter().collect(),
            MathNode::Frac(n, d) => vec![n, d],
            MathNode::Script { base, sub, sup } => {
                let mut out = vec![base.as_ref()];
                out.extend(sub.as_deref());
                out.extend(sup.as_deref());
                out
            }
            MathNode::Fenced { body, .. } => vec![body],
            MathNode::Apply { params, args, .. } => params.iter().chain(args.iter()).collect(),
        }
    }

    /// Calls `f` on every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a MathNode)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    /// Macro names of all applications in pre-order, with repetitions.
    pub fn macro_names(&self) -> Vec<&str> {
        let mut names = Vec::new();
        self.walk(&mut |node| {
            if let MathNode::Apply { name, .. } = node {
                names.push(name.as_str());
            }
        });
        names
    }

    pub fn is_op(&self) -> bool {
        matches!(self, MathNode::Op { .. })
    }
}

/// Lowercase Greek control sequences and their Unicode letters.
const GREEK_LOWER: [(&str, char); 24] = [
    ("alpha", 'α'),
    ("beta", 'β'),
    ("gamma", 'γ'),
    ("delta", 'δ'),
    ("epsilon", 'ϵ'),
    ("varepsilon", 'ε'),
    ("zeta", 'ζ'),
    ("eta", 'η'),
    ("theta", 'θ'),
    ("iota", 'ι'),
    ("kappa", 'κ'),
    ("lambda", 'λ'),
    ("mu", 'μ'),
    ("nu", 'ν'),
    ("xi", 'ξ'),
    ("pi", 'π'),
    ("rho", 'ρ'),
    ("sigma", 'σ'),
    ("tau", 'τ'),
    ("upsilon", 'υ'),
    ("phi", 'ϕ'),
    ("chi", 'χ'),
    ("psi", 'ψ'),
    ("omega", 'ω'),
];

const GREEK_UPPER: [(&str, char); 11] = [
    ("Gamma", 'Γ'),
    ("Delta", 'Δ'),
    ("Theta", 'Θ'),
    ("Lambda", 'Λ'),
    ("Xi", 'Ξ'),
    ("Pi", 'Π'),
    ("Sigma", 'Σ'),
    ("Upsilon", 'Υ'),
    ("Phi", 'Φ'),
    ("Psi", 'Ψ'),
    ("Omega", 'Ω'),
];

pub fn greek_letter(name: &str) -> Option<char> {
    GREEK_LOWER
        .iter()
        .chain(GREEK_UPPER.iter())
        .find(|(n, _)| *n == name)
        .map(|&(_, c)| c)
}

pub fn is_greek(name: &str) -> bool {
    greek_letter(name).is_some()
}

pub fn greek_names() -> impl Iterator<Item = &'static str> {
    GREEK_LOWER
        .iter()
        .chain(GREEK_UPPER.iter())
        .map(|&(name, _)| name)
}

/// Control sequences the parser understands without a dictionary entry.
pub fn is_builtin(name: &str) -> bool {
    matches!(name, "frac" | "left" | "right") || is_greek(name)
}
