use super::ast::MathNode;

/// Deterministic LaTeX serialization.
///
/// Script operands and macro operands are always braced, superscripts are
/// written before subscripts, and the only whitespace is the space that ends a
/// control word in front of a letter. Parsing the output reproduces the node.
pub fn canonical(node: &MathNode) -> String {
    let mut w = Writer::default();
    w.node(node);
    w.out
}

#[derive(Default)]
struct Writer {
    out: String,
    after_control_word: bool,
}

impl Writer {
    fn text(&mut self, s: &str) {
        if s.is_empty() {
            return;
        }
        if self.after_control_word && s.starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.out.push(' ');
        }
        self.out.push_str(s);
        self.after_control_word = false;
    }

    fn control(&mut self, name: &str) {
        self.text("\\");
        self.out.push_str(name);
        self.after_control_word = true;
    }

    fn braced(&mut self, node: &MathNode) {
        self.text("{");
        self.node(node);
        self.text("}");
    }

    fn node(&mut self, node: &MathNode) {
        match node {
            MathNode::Num(v) => self.text(v),
            MathNode::Sym(name) if name.len() == 1 => self.text(name),
            MathNode::Sym(name) => self.control(name),
            MathNode::Op { symbol, .. } => self.text(symbol),
            MathNode::Row(children) => {
                for child in children {
                    // Adjacent digits would merge into one number.
                    let ends_digit = self.out.ends_with(|c: char| c.is_ascii_digit());
                    if ends_digit && starts_with_digit(child) {
                        self.braced(child);
                    } else {
                        self.node(child);
                    }
                }
            }
            MathNode::Frac(num, den) => {
                self.control("frac");
                self.braced(num);
                self.braced(den);
            }
            MathNode::Script { base, sub, sup } => {
                if matches!(**base, MathNode::Row(_) | MathNode::Script { .. }) {
                    self.braced(base);
                } else {
                    self.node(base);
                }
                if let Some(sup) = sup {
                    self.text("^");
                    self.braced(sup);
                }
                if let Some(sub) = sub {
                    self.text("_");
                    self.braced(sub);
                }
            }
            MathNode::Fenced { open, close, body } => {
                self.control("left");
                self.text(open);
                self.node(body);
                self.control("right");
                self.text(close);
            }
            MathNode::Apply { name, params, args } => {
                self.control(name);
                for p in params {
                    self.braced(p);
                }
                if !args.is_empty() {
                    self.text("@");
                    for a in args {
                        self.braced(a);
                    }
                }
            }
        }
    }
}

fn starts_with_digit(node: &MathNode) -> bool {
    match node {
        MathNode::Num(_) => true,
        MathNode::Script { base, .. } => {
            !matches!(**base, MathNode::Row(_) | MathNode::Script { .. }) && starts_with_digit(base)
        }
        _ => false,
    }
}
