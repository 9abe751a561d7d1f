use super::TranslateError;
use crate::macros::{expand_all, MacroTable};
use crate::math::{greek_letter, MathNode};

/// Presentation MathML for `node`, as a single element without namespace or
/// attributes. Semantic macros are expanded to their display form first.
pub fn to_mathml(node: &MathNode, table: &MacroTable) -> Result<String, TranslateError> {
    let expanded = expand_all(node, table)?;
    let mut out = String::new();
    write(&expanded, &mut out);
    Ok(out)
}

fn element(out: &mut String, tag: &str, children: &[&MathNode]) {
    out.push_str(&format!("<{tag}>"));
    for c in children {
        write(c, out);
    }
    out.push_str(&format!("</{tag}>"));
}

fn write(node: &MathNode, out: &mut String) {
    match node {
        MathNode::Num(v) => out.push_str(&format!("<mn>{v}</mn>")),
        MathNode::Sym(name) => {
            let text = greek_letter(name).map_or_else(|| name.clone(), String::from);
            out.push_str(&format!("<mi>{text}</mi>"));
        }
        MathNode::Op { symbol, .. } => out.push_str(&format!("<mo>{}</mo>", escape_xml(symbol))),
        MathNode::Row(children) => element(out, "mrow", &children.iter().collect::<Vec<_>>()),
        MathNode::Frac(n, d) => element(out, "mfrac", &[n, d]),
        MathNode::Script { base, sub, sup } => match (sub, sup) {
            (Some(s), None) => element(out, "msub", &[base, s]),
            (None, Some(p)) => element(out, "msup", &[base, p]),
            (Some(s), Some(p)) => element(out, "msubsup", &[base, s, p]),
            (None, None) => write(base, out),
        },
        MathNode::Fenced { open, close, body } => {
            out.push_str("<mrow>");
            out.push_str(&format!("<mo>{}</mo>", escape_xml(open)));
            write(body, out);
            out.push_str(&format!("<mo>{}</mo>", escape_xml(close)));
            out.push_str("</mrow>");
        }
        // expand_all leaves no applications
        MathNode::Apply { name, .. } => out.push_str(&format!("<merror>{}</merror>", escape_xml(name))),
    }
}

pub fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::parse_str;

    fn ml(src: &str) -> String {
        let table = MacroTable::default();
        to_mathml(&parse_str(src, &table).unwrap(), &table).unwrap()
    }

    #[test]
    fn mapping_table() {
        assert_eq!(ml("x+1"), "<mrow><mi>x</mi><mo>+</mo><mn>1</mn></mrow>");
        assert_eq!(ml("\\frac{1}{2}"), "<mfrac><mn>1</mn><mn>2</mn></mfrac>");
        assert_eq!(ml("\\alpha"), "<mi>α</mi>");
    }

    #[test]
    fn scripts_and_fences() {
        assert_eq!(ml("x_{n}"), "<msub><mi>x</mi><mi>n</mi></msub>");
        assert_eq!(ml("x^{2}"), "<msup><mi>x</mi><mn>2</mn></msup>");
        assert_eq!(ml("x_{n}^{2}"), "<msubsup><mi>x</mi><mi>n</mi><mn>2</mn></msubsup>");
        assert_eq!(
            ml("\\left(x\\right)"),
            "<mrow><mo>(</mo><mi>x</mi><mo>)</mo></mrow>"
        );
        assert_eq!(ml("x<y"), "<mrow><mi>x</mi><mo>&lt;</mo><mi>y</mi></mrow>");
    }
}
