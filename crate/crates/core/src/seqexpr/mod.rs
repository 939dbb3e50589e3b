//! Closed-form integer sequences in the index variable `n`.
//!
//! A [`SequenceExpr`] is parsed from a small infix grammar (see
//! `docs/grammar.md`), printed back in canonical form, and evaluated exactly
//! at a given index. Every node must evaluate to a positive integer.

mod eval;
mod format;
mod parser;
pub mod primes;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

pub(crate) use eval::{
    factorial_checked as factorial_exact, nth_prime_checked as nth_prime_exact, pow_checked as pow_exact,
};
pub use eval::{EvalConfig, EvalError, DEFAULT_BIT_BUDGET, DEFAULT_PRIME_CEILING};
pub use parser::{parse_sequence_expr, ParseError};

/// One node of a sequence expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Int(BigUint),
    /// The index variable `n`.
    Index,
    /// The free argument `b` of a growth function `f(b)`.
    Arg,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    /// Exact division; evaluation fails when the divisor does not divide.
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Factorial(Box<Node>),
    /// `nthprime(k)`: the k-th prime, with `nthprime(1) = 2`.
    NthPrime(Box<Node>),
    /// `tower(base, height, top)`: `f_1 = top`, `f_{k+1} = base^f_k`, value `f_height`.
    Tower {
        base: Box<Node>,
        height: Box<Node>,
        top: Box<Node>,
    },
}

#[allow(clippy::should_implement_trait)]
impl Node {
    pub fn int(v: u64) -> Node {
        Node::Int(BigUint::from(v))
    }

    pub fn add(l: Node, r: Node) -> Node {
        Node::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Node, r: Node) -> Node {
        Node::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Node, r: Node) -> Node {
        Node::Mul(Box::new(l), Box::new(r))
    }

    pub fn div(l: Node, r: Node) -> Node {
        Node::Div(Box::new(l), Box::new(r))
    }

    pub fn pow(l: Node, r: Node) -> Node {
        Node::Pow(Box::new(l), Box::new(r))
    }

    pub fn factorial(x: Node) -> Node {
        Node::Factorial(Box::new(x))
    }

    pub fn nth_prime(x: Node) -> Node {
        Node::NthPrime(Box::new(x))
    }

    pub fn tower(base: Node, height: Node, top: Node) -> Node {
        Node::Tower {
            base: Box::new(base),
            height: Box::new(height),
            top: Box::new(top),
        }
    }

    /// True when the subtree mentions the growth-function argument `b`.
    pub fn uses_arg(&self) -> bool {
        match self {
            Node::Int(_) | Node::Index => false,
            Node::Arg => true,
            Node::Add(l, r) | Node::Sub(l, r) | Node::Mul(l, r) | Node::Div(l, r) | Node::Pow(l, r) => {
                l.uses_arg() || r.uses_arg()
            }
            Node::Factorial(x) | Node::NthPrime(x) => x.uses_arg(),
            Node::Tower { base, height, top } => base.uses_arg() || height.uses_arg() || top.uses_arg(),
        }
    }
}

/// A parsed closed-form integer sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceExpr {
    root: Node,
}

impl SequenceExpr {
    pub fn new(root: Node) -> Self {
        SequenceExpr { root }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_sequence_expr(text)
    }

    pub fn constant(v: u64) -> Self {
        SequenceExpr::new(Node::int(v))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    /// Exact value at index `n`, using `cfg` for the bit budget and prime ceiling.
    pub fn eval(&self, n: u64, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
        eval::eval_node(&self.root, &eval::Env::index(n), cfg)
    }

    /// Exact value with the growth-function argument `b` bound.
    pub fn eval_with_arg(&self, n: u64, b: &BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
        eval::eval_node(&self.root, &eval::Env::with_arg(n, b), cfg)
    }

    pub fn uses_arg(&self) -> bool {
        self.root.uses_arg()
    }
}

/// Exact value of `expr` at `n` with the default configuration.
pub fn eval_sequence(expr: &SequenceExpr, n: u64) -> Result<BigUint, EvalError> {
    expr.eval(n, &EvalConfig::default())
}

/// Canonical text form; `parse_sequence_expr(&format_expr(e)) == Ok(e)`.
pub fn format_expr(expr: &SequenceExpr) -> String {
    format::format_node(&expr.root)
}

impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_expr(self))
    }
}

impl FromStr for SequenceExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequence_expr(s)
    }
}

impl From<Node> for SequenceExpr {
    fn from(root: Node) -> Self {
        SequenceExpr::new(root)
    }
}
