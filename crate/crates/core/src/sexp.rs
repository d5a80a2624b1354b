//! A minimal s-expression reader used by every textual format in the crate.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses
//! and `;`. A `;` starts a comment that runs to the end of the line.

use std::fmt;

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = Sexp>) -> Sexp {
        Sexp::List(items.into_iter().collect())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }

    /// The head atom of a non-empty list, e.g. `all` for `(all v F)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(src: &str) -> Vec<(Token, usize)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                out.push((Token::Open, line));
                chars.next();
            }
            ')' => {
                out.push((Token::Close, line));
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                out.push((Token::Atom(atom), line));
            }
        }
    }
    out
}

/// Parses every top-level expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let tokens = tokenize(src);
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut top = Vec::new();
    for (tok, line) in tokens {
        match tok {
            Token::Open => stack.push((Vec::new(), line)),
            Token::Close => {
                let (items, _) = stack.pop().ok_or_else(|| ParseError::new(format!("line {line}: unbalanced `)`")))?;
                let e = Sexp::List(items);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
            Token::Atom(a) => match stack.last_mut() {
                Some((parent, _)) => parent.push(Sexp::Atom(a)),
                None => top.push(Sexp::Atom(a)),
            },
        }
    }
    if let Some((_, line)) = stack.last() {
        return Err(ParseError::new(format!("line {line}: unclosed `(`")));
    }
    Ok(top)
}

/// Parses exactly one expression.
pub fn parse_one(src: &str) -> Result<Sexp, ParseError> {
    let mut all = parse_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError::new("empty input")),
        n => Err(ParseError::new(format!("expected one expression, found {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let e = parse_one("(all v ; bound\n (atom P v))").unwrap();
        assert_eq!(e.head(), Some("all"));
        assert_eq!(e.to_string(), "(all v (atom P v))");
    }

    #[test]
    fn unbalanced_input_is_rejected() {
        assert!(parse_one("(a (b)").is_err());
        assert!(parse_one("a)").is_err());
        assert!(parse_one("a b").is_err());
    }
}
