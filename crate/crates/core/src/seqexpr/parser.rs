use std::fmt;

use num_bigint::BigUint;

use super::{Node, SequenceExpr};

/// A syntax error at a character offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '!' => Tok::Bang,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let v = digits.parse::<BigUint>().map_err(|_| ParseError {
                    position: start,
                    message: "malformed integer literal".into(),
                })?;
                out.push((Tok::Int(v), start));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                out.push((Tok::Ident(ident), start));
                continue;
            }
            other => {
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

// Recursion guards for pathological input such as "((((((..." or very long
// operator chains, which would otherwise build trees deep enough to overflow
// the stack in the recursive evaluator.
const MAX_DEPTH: usize = 256;
const MAX_TOKENS: usize = 2048;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("expression nested too deeply");
        }
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::sub(lhs, self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::mul(lhs, self.power()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::div(lhs, self.power()?);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.postfix()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return self.error("expression nested too deeply");
            }
            let exp = self.power()?;
            self.depth -= 1;
            Ok(Node::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn postfix(&mut self) -> Result<Node, ParseError> {
        let mut node = self.primary()?;
        while *self.peek() == Tok::Bang {
            self.bump();
            node = Node::factorial(node);
        }
        Ok(node)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(v) => Ok(Node::Int(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => Ok(Node::Index),
                "b" => Ok(Node::Arg),
                "nthprime" => {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Node::nth_prime(arg))
                }
                "tower" => {
                    self.expect(Tok::LParen)?;
                    let base = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let height = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let top = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Node::tower(base, height, top))
                }
                _ => Err(ParseError {
                    position: at,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            Tok::Eof => Err(ParseError {
                position: at,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError {
                position: at,
                message: format!("expected an operand, found {}", other.describe()),
            }),
        }
    }
}

/// Parses the sequence-expression grammar into an AST.
pub fn parse_sequence_expr(text: &str) -> Result<SequenceExpr, ParseError> {
    let toks = lex(text)?;
    if toks.len() > MAX_TOKENS {
        return Err(ParseError {
            position: toks[MAX_TOKENS].1,
            message: format!("expression longer than {MAX_TOKENS} tokens"),
        });
    }
    if toks.len() == 1 {
        return Err(ParseError {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let root = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after expression", p.peek().describe()));
    }
    Ok(SequenceExpr::new(root))
}
