use super::TranslateError;
use crate::macros::{substitute, CasTarget, ExpandError, MacroTable};
use crate::math::MathNode;

/// Translates a semantic AST into input for a computer algebra system.
///
/// Fractions and powers are fully parenthesized, implicit multiplication
/// becomes `*`, and each semantic macro is replaced by its template for the
/// target. Subscripts outside of macros have no CAS meaning and are rejected.
pub fn to_cas(node: &MathNode, table: &MacroTable, target: CasTarget) -> Result<String, TranslateError> {
    Translator { table, target }.node(node)
}

struct Translator<'a> {
    table: &'a MacroTable,
    target: CasTarget,
}

impl Translator<'_> {
    fn node(&self, node: &MathNode) -> Result<String, TranslateError> {
        match node {
            MathNode::Num(v) => Ok(v.clone()),
            MathNode::Sym(name) => Ok(name.clone()),
            MathNode::Op { symbol, .. } => self.op(symbol),
            MathNode::Row(children) => self.row(children),
            MathNode::Frac(n, d) => Ok(format!("({})/({})", self.node(n)?, self.node(d)?)),
            MathNode::Script { base, sub, sup } => {
                if sub.is_some() {
                    return Err(untranslatable("a subscript outside a semantic macro"));
                }
                let sup = sup.as_deref().expect("script has sub or sup");
                Ok(format!("({})^({})", self.node(base)?, self.node(sup)?))
            }
            MathNode::Fenced { open, close, body } => {
                let inner = self.node(body)?;
                match (open.as_str(), close.as_str()) {
                    ("|", "|") => Ok(match self.target {
                        CasTarget::Mathematica => format!("Abs[{inner}]"),
                        CasTarget::Maple | CasTarget::Sage => format!("abs({inner})"),
                    }),
                    ("|", _) | (_, "|") => Err(untranslatable("a mixed absolute-value fence")),
                    _ => Ok(format!("({inner})")),
                }
            }
            MathNode::Apply { name, params, args } => {
                let entry = self
                    .table
                    .lookup(name)
                    .ok_or_else(|| ExpandError::UnknownMacro(name.clone()))?;
                let template = entry.cas_template(self.target).ok_or_else(|| {
                    TranslateError::MissingCasTemplate {
                        name: name.clone(),
                        target: self.target,
                    }
                })?;
                let operands = params
                    .iter()
                    .chain(args.iter())
                    .map(|op| self.node(op))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(substitute(template, &operands))
            }
        }
    }

    fn op(&self, symbol: &str) -> Result<String, TranslateError> {
        Ok(match symbol {
            "=" => match self.target {
                CasTarget::Maple => "=",
                CasTarget::Mathematica | CasTarget::Sage => "==",
            }
            .to_string(),
            "(" | "[" => "(".to_string(),
            ")" | "]" => ")".to_string(),
            "|" => return Err(untranslatable("a bare vertical bar")),
            other => other.to_string(),
        })
    }

    /// Joins row items, inserting `*` where one operand ends and the next
    /// begins. A power on a
    /// closing bracket applies to the whole bracketed run.
    fn row(&self, children: &[MathNode]) -> Result<String, TranslateError> {
        let mut items: Vec<Item> = Vec::with_capacity(children.len());
        let mut open_at: Vec<usize> = Vec::new();
        for child in children {
            match child {
                MathNode::Op { symbol, .. } if symbol == "(" || symbol == "[" => {
                    open_at.push(items.len());
                    items.push(Item::new(self.op(symbol)?, true, false));
                }
                MathNode::Op { symbol, .. } if symbol == ")" || symbol == "]" => {
                    open_at.pop();
                    items.push(Item::new(self.op(symbol)?, false, true));
                }
                MathNode::Script { base, sub, sup: Some(sup) }
                    if matches!(&**base, MathNode::Op { symbol, .. } if symbol == ")" || symbol == "]") =>
                {
                    if sub.is_some() {
                        return Err(untranslatable("a subscript outside a semantic macro"));
                    }
                    let start = open_at
                        .pop()
                        .ok_or_else(|| untranslatable("a power on an unmatched bracket"))?;
                    let group: Vec<_> = items.drain(start..).collect();
                    let grouped = format!("({})", join(&group) + ")");
                    items.push(Item::operand(format!("{grouped}^({})", self.node(sup)?)));
                }
                _ if child.is_op() => items.push(Item::new(self.node(child)?, false, false)),
                _ => items.push(Item::operand(self.node(child)?)),
            }
        }
        Ok(join(&items))
    }
}

struct Item {
    text: String,
    starts_operand: bool,
    ends_operand: bool,
}

impl Item {
    fn new(text: String, starts_operand: bool, ends_operand: bool) -> Self {
        Item {
            text,
            starts_operand,
            ends_operand,
        }
    }

    fn operand(text: String) -> Self {
        Item::new(text, true, true)
    }
}

fn join(items: &[Item]) -> String {
    let mut out = String::new();
    let mut after_operand = false;
    for item in items {
        if after_operand && item.starts_operand {
            out.push('*');
        }
        out.push_str(&item.text);
        after_operand = item.ends_operand;
    }
    out
}

fn untranslatable(what: &str) -> TranslateError {
    TranslateError::UntranslatableConstruct(what.to_string())
}
