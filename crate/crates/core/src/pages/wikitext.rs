use super::{FormulaRecord, OPEN_SECTION, SECTIONS};
use crate::biblio::{format_citation, BibMap};
use crate::math::canonical;

/// Renders the page as Wikitext. All seven section headings are always
/// present; empty sections get the open-section placeholder.
pub fn emit_wikitext(record: &FormulaRecord, bib: &BibMap) -> String {
    let citations = record
        .cites
        .iter()
        .map(|key| match bib.resolve(key) {
            Ok(entry) => format!("* {}: {}", key, format_citation(entry)),
            Err(_) => format!("* {key}"),
        })
        .collect();
    let bullets = |items: &[String]| items.iter().map(|s| format!("* {s}")).collect();
    let math_lines = |nodes: &[crate::math::MathNode]| {
        nodes
            .iter()
            .map(|n| format!(":<math>{}</math>", canonical(n)))
            .collect()
    };
    let bodies: [Vec<String>; 7] = [
        citations,
        bullets(&record.proofs),
        record
            .symbols
            .iter()
            .map(|s| format!("* [{} {}]", s.url, s.name))
            .collect(),
        bullets(&record.notes),
        bullets(&record.links),
        math_lines(&record.substitutions),
        math_lines(&record.constraints),
    ];

    let mut out = format!("= {} =\n:<math>{}</math>\n", record.id, record.canonical_tex);
    for (heading, lines) in SECTIONS.iter().zip(bodies) {
        out.push_str(&format!("\n== {heading} ==\n"));
        if lines.is_empty() {
            out.push_str(&format!("''{OPEN_SECTION}''\n"));
        }
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}
