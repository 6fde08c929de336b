//! Outcome-event expressions: comparisons and bounded intervals joined by
//! `or`, e.g. `Y > 140`, `27 <= Y < 35`, `Y > 5 or Y < 1`.

use crate::domain::{Interval, OutcomeEvent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Y,
    Or,
    Lt,
    Le,
    Gt,
    Ge,
    Num(f64),
}

#[derive(Debug, Clone, Copy)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position: pos,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        match c {
            '<' | '>' => {
                let eq = i + 1 < bytes.len() && bytes[i + 1] == b'=';
                let tok = match (c, eq) {
                    ('<', true) => Tok::Le,
                    ('<', false) => Tok::Lt,
                    ('>', true) => Tok::Ge,
                    _ => Tok::Gt,
                };
                i += if eq { 2 } else { 1 };
                tokens.push(Token { tok, pos });
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word.to_ascii_lowercase().as_str() {
                    "y" => Tok::Y,
                    "or" => Tok::Or,
                    _ => return Err(syntax(pos, format!("unexpected word '{word}'"))),
                };
                tokens.push(Token { tok, pos });
            }
            _ if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let exp_sign = (d == '+' || d == '-')
                        && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let number: f64 = text[start..i]
                    .parse()
                    .map_err(|_| syntax(pos, format!("bad number '{}'", &text[start..i])))?;
                tokens.push(Token {
                    tok: Tok::Num(number),
                    pos,
                });
            }
            _ => return Err(syntax(pos, format!("unexpected character '{c}'"))),
        }
    }
    Ok(tokens)
}

fn parse_clause(tokens: &[Token], text_len: usize) -> Result<Interval> {
    let at = |i: usize| -> Result<&Token> {
        tokens
            .get(i)
            .ok_or_else(|| syntax(text_len, "clause ends unexpectedly"))
    };
    match at(0)?.tok {
        Tok::Y => {
            // Y OP c
            let op = at(1)?;
            let c = match at(2)?.tok {
                Tok::Num(v) => v,
                _ => return Err(syntax(at(2)?.pos, "expected a number")),
            };
            if tokens.len() > 3 {
                return Err(syntax(tokens[3].pos, "unexpected trailing tokens"));
            }
            Ok(match op.tok {
                Tok::Gt => Interval::greater_than(c),
                Tok::Ge => Interval::at_least(c),
                Tok::Lt => Interval::less_than(c),
                Tok::Le => Interval::at_most(c),
                _ => return Err(syntax(op.pos, "expected a comparison operator")),
            })
        }
        Tok::Num(lo) => {
            // c1 OP Y OP c2 with OP in {<, <=}
            let op1 = at(1)?;
            let lo_closed = match op1.tok {
                Tok::Lt => false,
                Tok::Le => true,
                _ => return Err(syntax(op1.pos, "interval bounds must use '<' or '<='")),
            };
            if at(2)?.tok != Tok::Y {
                return Err(syntax(at(2)?.pos, "expected 'Y'"));
            }
            let op2 = at(3)?;
            let hi_closed = match op2.tok {
                Tok::Lt => false,
                Tok::Le => true,
                _ => return Err(syntax(op2.pos, "interval bounds must use '<' or '<='")),
            };
            let hi = match at(4)?.tok {
                Tok::Num(v) => v,
                _ => return Err(syntax(at(4)?.pos, "expected a number")),
            };
            if tokens.len() > 5 {
                return Err(syntax(tokens[5].pos, "unexpected trailing tokens"));
            }
            Ok(Interval::new(lo, lo_closed, hi, hi_closed))
        }
        _ => Err(syntax(at(0)?.pos, "clause must start with 'Y' or a number")),
    }
}

/// Parses an event expression into a normalized disjoint interval union.
pub fn parse_event(text: &str) -> Result<OutcomeEvent> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(syntax(0, "empty event expression"));
    }
    let mut intervals = Vec::new();
    let mut clause = Vec::new();
    for token in tokens {
        if token.tok == Tok::Or {
            intervals.push(parse_clause(&clause, text.len())?);
            clause.clear();
        } else {
            clause.push(token);
        }
    }
    intervals.push(parse_clause(&clause, text.len())?);
    OutcomeEvent::new(intervals)
}
