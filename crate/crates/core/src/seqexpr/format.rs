use super::Node;

// Binding strength used to decide where parentheses are needed.
fn prec(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Pow(..) => 3,
        Node::Factorial(..) => 4,
        _ => 5,
    }
}

fn atom(node: &Node) -> bool {
    prec(node) == 5
}

fn wrapped(node: &Node, paren: bool) -> String {
    let inner = format_node(node);
    if paren {
        format!("({inner})")
    } else {
        inner
    }
}

pub(super) fn format_node(node: &Node) -> String {
    match node {
        Node::Int(v) => v.to_string(),
        Node::Index => "n".into(),
        Node::Arg => "b".into(),
        Node::Add(l, r) | Node::Sub(l, r) => {
            let op = if matches!(node, Node::Add(..)) { "+" } else { "-" };
            format!("{} {op} {}", wrapped(l, prec(l) < 1), wrapped(r, prec(r) <= 1))
        }
        Node::Mul(l, r) | Node::Div(l, r) => {
            let op = if matches!(node, Node::Mul(..)) { "*" } else { "/" };
            format!("{}{op}{}", wrapped(l, prec(l) < 2), wrapped(r, prec(r) <= 2))
        }
        Node::Pow(l, r) => format!("{}^{}", wrapped(l, !atom(l)), wrapped(r, !atom(r))),
        Node::Factorial(x) => format!("{}!", wrapped(x, !atom(x))),
        Node::NthPrime(x) => format!("nthprime({})", format_node(x)),
        Node::Tower { base, height, top } => format!(
            "tower({}, {}, {})",
            format_node(base),
            format_node(height),
            format_node(top)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{format_expr, parse_sequence_expr, SequenceExpr};
    use super::*;
    use proptest::prelude::*;

    fn fmt(n: Node) -> String {
        format_expr(&SequenceExpr::new(n))
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(fmt(Node::factorial(Node::Index)), "n!");
        assert_eq!(
            fmt(Node::pow(Node::int(2), Node::pow(Node::int(3), Node::Index))),
            "2^(3^n)"
        );
        let two_n = || Node::mul(Node::int(2), Node::Index);
        assert_eq!(fmt(Node::tower(Node::int(2), two_n(), two_n())), "tower(2, 2*n, 2*n)");
        assert_eq!(fmt(Node::pow(Node::factorial(Node::Index), Node::int(5))), "(n!)^5");
        assert_eq!(
            fmt(Node::sub(Node::int(9), Node::sub(Node::int(3), Node::int(1)))),
            "9 - (3 - 1)"
        );
    }

    pub(crate) fn arb_node() -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![(0u64..1000).prop_map(Node::int), Just(Node::Index), Just(Node::Arg),];
        leaf.prop_recursive(6, 64, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::add(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::sub(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::mul(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::div(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::pow(l, r)),
                inner.clone().prop_map(Node::factorial),
                inner.clone().prop_map(Node::nth_prime),
                (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| Node::tower(a, b, c)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_format(node in arb_node()) {
            let expr = SequenceExpr::new(node);
            let text = format_expr(&expr);
            prop_assert_eq!(parse_sequence_expr(&text).unwrap(), expr);
        }
    }
}
