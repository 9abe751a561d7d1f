use super::ast::MathNode;

/// Every node of the tree in pre-order, followed for each row by its proper
/// contiguous slices (length 2 up to one less than the row), shortest first.
/// No deduplication.
pub fn enumerate_subterms(node: &MathNode) -> Vec<MathNode> {
    let mut out = Vec::new();
    collect(node, &mut out);
    out
}

fn collect(node: &MathNode, out: &mut Vec<MathNode>) {
    out.push(node.clone());
    for child in node.children() {
        collect(child, out);
    }
    if let MathNode::Row(children) = node {
        let len = children.len();
        for width in 2..len {
            for window in children.windows(width) {
                out.push(MathNode::Row(window.to_vec()));
            }
        }
    }
}

/// Whether `needle` equals some node of `haystack` or some contiguous slice of
/// one of its rows. Walks the tree without materializing slices.
pub fn contains_subterm(haystack: &MathNode, needle: &MathNode) -> bool {
    if haystack == needle {
        return true;
    }
    if let (MathNode::Row(children), MathNode::Row(wanted)) = (haystack, needle) {
        if wanted.len() < children.len() && children.windows(wanted.len()).any(|w| w == wanted.as_slice()) {
            return true;
        }
    }
    haystack.children().into_iter().any(|c| contains_subterm(c, needle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(items: &[MathNode]) -> MathNode {
        MathNode::Row(items.to_vec())
    }

    #[test]
    fn leaf() {
        assert_eq!(enumerate_subterms(&MathNode::sym("x")), vec![MathNode::sym("x")]);
    }

    #[test]
    fn row_of_three() {
        let (x, plus, one) = (MathNode::sym("x"), MathNode::op("+"), MathNode::num("1"));
        let r = row(&[x.clone(), plus.clone(), one.clone()]);
        let subs = enumerate_subterms(&r);
        assert_eq!(
            subs,
            vec![
                r.clone(),
                x.clone(),
                plus.clone(),
                one.clone(),
                row(&[x, plus.clone()]),
                row(&[plus, one])
            ]
        );
    }

    #[test]
    fn fraction() {
        let f = MathNode::frac(MathNode::num("1"), MathNode::num("2"));
        assert_eq!(enumerate_subterms(&f).len(), 3);
    }

    /// Counts slices by explicit start/end enumeration.
    fn brute_force_slices(len: usize) -> usize {
        let mut count = 0;
        for start in 0..len {
            for end in start + 1..=len {
                let width = end - start;
                if width >= 2 && width < len {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn slice_count_matches_brute_force() {
        for len in 2..12 {
            let r = MathNode::Row((0..len).map(|i| MathNode::num(i.to_string())).collect());
            let expected = 1 + len + brute_force_slices(len);
            assert_eq!(enumerate_subterms(&r).len(), expected, "len {len}");
            let closed_form: usize = (2..len).map(|k| len - k + 1).sum();
            assert_eq!(brute_force_slices(len), closed_form);
        }
    }

    #[test]
    fn contains_agrees_with_enumeration() {
        let inner = row(&[MathNode::sym("a"), MathNode::op("-"), MathNode::sym("b"), MathNode::op("+"), MathNode::num("2")]);
        let tree = MathNode::frac(inner.clone(), MathNode::script(MathNode::sym("x"), None, Some(inner)));
        let subs = enumerate_subterms(&tree);
        for s in &subs {
            assert!(contains_subterm(&tree, s));
        }
        let full_row_slice = row(&[MathNode::sym("b"), MathNode::op("+")]);
        assert!(contains_subterm(&tree, &full_row_slice));
        assert!(!contains_subterm(&tree, &row(&[MathNode::sym("a"), MathNode::sym("b")])));
    }
}
