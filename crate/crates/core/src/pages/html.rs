use super::{FormulaRecord, OPEN_SECTION, SECTIONS};
use crate::biblio::{format_citation, BibMap};
use crate::macros::MacroTable;
use crate::math::MathNode;
use crate::translate::{escape_xml, to_mathml, TranslateError};

const MATHML_NS: &str = "http://www.w3.org/1998/Math/MathML";

/// A display-mode `<math>` element for `node`.
pub fn math_block(node: &MathNode, table: &MacroTable) -> Result<String, TranslateError> {
    Ok(format!(
        "<math xmlns=\"{MATHML_NS}\" display=\"block\">{}</math>",
        to_mathml(node, table)?
    ))
}

fn list(items: Vec<String>) -> String {
    if items.is_empty() {
        return format!("<p class=\"empty-section\">{OPEN_SECTION}</p>\n");
    }
    let mut out = String::from("<ul>\n");
    for item in items {
        out.push_str(&format!("<li>{item}</li>\n"));
    }
    out.push_str("</ul>\n");
    out
}

/// Renders the page as a standalone HTML document with presentation MathML.
pub fn emit_html(
    record: &FormulaRecord,
    table: &MacroTable,
    bib: &BibMap,
) -> Result<String, TranslateError> {
    let text = |items: &[String]| items.iter().map(|s| escape_xml(s)).collect::<Vec<_>>();
    let maths = |nodes: &[MathNode]| {
        nodes
            .iter()
            .map(|n| math_block(n, table))
            .collect::<Result<Vec<_>, _>>()
    };
    let citations = record
        .cites
        .iter()
        .map(|key| {
            let formatted = bib.resolve(key).map(format_citation).unwrap_or_default();
            format!(
                "<cite id=\"{k}\">{k}</cite> {}",
                escape_xml(&formatted),
                k = escape_xml(key)
            )
        })
        .collect();
    let symbols = record
        .symbols
        .iter()
        .map(|s| {
            format!(
                "<a class=\"symbol\" href=\"{}\">{}</a>",
                escape_xml(&s.url),
                escape_xml(&s.name)
            )
        })
        .collect();
    let links = record
        .links
        .iter()
        .map(|l| format!("<a href=\"{0}\">{0}</a>", escape_xml(l)))
        .collect();
    let bodies: [Vec<String>; 7] = [
        citations,
        text(&record.proofs),
        symbols,
        text(&record.notes),
        links,
        maths(&record.substitutions)?,
        maths(&record.constraints)?,
    ];

    let id = escape_xml(&record.id);
    let mut out = format!(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{id}</title>\n</head>\n<body>\n<h1>{id}</h1>\n<div class=\"formula\">{}</div>\n",
        math_block(&record.ast, table)?
    );
    for (heading, items) in SECTIONS.iter().zip(bodies) {
        out.push_str(&format!("<h2>{heading}</h2>\n"));
        out.push_str(&list(items));
    }
    out.push_str("</body>\n</html>\n");
    Ok(out)
}
