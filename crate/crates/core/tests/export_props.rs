use formulary_core::math::arbitrary::{arb_expr, sample_table};
use formulary_core::translate::{to_cas, to_mathml, TranslateError};
use formulary_core::CasTarget;
use proptest::prelude::*;

/// Minimal XML well-formedness check: tags nest properly and text contains
/// no raw markup characters.
fn well_formed(xml: &str) -> bool {
    let mut stack: Vec<&str> = Vec::new();
    let mut rest = xml;
    while let Some(lt) = rest.find('<') {
        if rest[..lt].contains('>') {
            return false;
        }
        let Some(gt) = rest[lt..].find('>') else { return false };
        let tag = &rest[lt + 1..lt + gt];
        if let Some(name) = tag.strip_prefix('/') {
            if stack.pop() != Some(name) {
                return false;
            }
        } else {
            stack.push(tag.split_whitespace().next().unwrap_or(""));
        }
        rest = &rest[lt + gt + 1..];
    }
    stack.is_empty() && !rest.contains('>')
}

fn balanced(text: &str) -> bool {
    let mut stack = Vec::new();
    for c in text.chars() {
        match c {
            '(' | '[' | '{' => stack.push(c),
            ')' | ']' | '}' => {
                let open = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                if stack.pop() != Some(open) {
                    return false;
                }
            }
            _ => {}
        }
    }
    stack.is_empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mathml_is_well_formed(node in arb_expr()) {
        let xml = to_mathml(&node, &sample_table()).unwrap();
        prop_assert!(well_formed(&xml), "{}", xml);
        prop_assert!(!xml.contains("merror"));
    }

    #[test]
    fn missing_template_is_reported_first_in_preorder(node in arb_expr()) {
        let first_gap = node.macro_names().into_iter().find(|n| *n == "Pochhammer");
        match to_cas(&node, &sample_table(), CasTarget::Sage) {
            Err(TranslateError::MissingCasTemplate { name, .. }) => prop_assert_eq!(Some(name.as_str()), first_gap),
            Ok(_) => prop_assert!(first_gap.is_none()),
            Err(_) => {}
        }
    }

    #[test]
    fn cas_output_is_balanced(node in arb_expr()) {
        for target in CasTarget::ALL {
            match to_cas(&node, &sample_table(), target) {
                Ok(text) => prop_assert!(balanced(&text), "{}", text),
                Err(TranslateError::MissingCasTemplate { .. } | TranslateError::UntranslatableConstruct(_)) => {}
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }
}

#[test]
fn checker_rejects_bad_xml() {
    assert!(well_formed("<mrow><mi>x</mi></mrow>"));
    assert!(!well_formed("<mrow><mi>x</mrow></mi>"));
    assert!(!well_formed("<mo><</mo>"));
    assert!(!balanced("f(x]"));
}
