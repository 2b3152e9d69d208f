//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, loosest first: `<->`, `->`, `|`, `&`, `!`. Both arrows
//! associate to the right. A quantifier body extends as far right as possible.
//! Terms: `~` binds tightest, then `/\`, then `\/` and `-` (left associative).

use super::ast::{Atom, Formula, Signature, Term};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Join,
    Meet,
    Minus,
    Tilde,
    Equals,
    Forall,
    Exists,
    In,
    Sub,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Join => "\\/",
            Tok::Meet => "/\\",
            Tok::Minus => "-",
            Tok::Tilde => "~",
            Tok::Equals => "=",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::In => "in",
            Tok::Sub => "sub",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let push = |tok: Tok, width: usize, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            width
        };
        let width = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(Tok::LParen, 1, &mut out),
            ')' => push(Tok::RParen, 1, &mut out),
            '[' => push(Tok::LBracket, 1, &mut out),
            ']' => push(Tok::RBracket, 1, &mut out),
            '.' => push(Tok::Dot, 1, &mut out),
            '!' | '¬' => push(Tok::Bang, 1, &mut out),
            '&' => push(Tok::Amp, 1, &mut out),
            '|' => push(Tok::Pipe, 1, &mut out),
            '=' => push(Tok::Equals, 1, &mut out),
            '~' => push(Tok::Tilde, 1, &mut out),
            '∀' => push(Tok::Forall, 1, &mut out),
            '∃' => push(Tok::Exists, 1, &mut out),
            '∈' => push(Tok::In, 1, &mut out),
            '⊑' | '⊆' => push(Tok::Sub, 1, &mut out),
            '→' | '⇒' => push(Tok::Arrow, 1, &mut out),
            '↔' | '⇔' | '⟺' => push(Tok::DArrow, 1, &mut out),
            '∸' => push(Tok::Minus, 1, &mut out),
            '∧' | '∨' => {
                let dotted = chars.get(i + 1) == Some(&'\u{307}');
                let tok = match (c, dotted) {
                    ('∧', false) => Tok::Amp,
                    ('∨', false) => Tok::Pipe,
                    ('∧', true) => Tok::Meet,
                    _ => Tok::Join,
                };
                push(tok, if dotted { 2 } else { 1 }, &mut out)
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow, 2, &mut out)
                } else {
                    push(Tok::Minus, 1, &mut out)
                }
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::DArrow, 3, &mut out)
            }
            '\\' if chars.get(i + 1) == Some(&'/') => push(Tok::Join, 2, &mut out),
            '/' if chars.get(i + 1) == Some(&'\\') => push(Tok::Meet, 2, &mut out),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits.parse::<u32>().map_err(|_| FormulaError::Syntax {
                    line,
                    column,
                    message: format!("number `{digits}` out of range"),
                })?;
                push(Tok::Num(n), j - i, &mut out)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "in" => Tok::In,
                    "sub" => Tok::Sub,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut out)
            }
            other => {
                return Err(FormulaError::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}


struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, FormulaError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(FormulaError::Syntax {
            line: s.line,
            column: s.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected `{}`, found {}",
                tok.text(),
                self.peek().describe()
            ))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            q @ (Tok::Forall | Tok::Exists) => {
                self.bump();
                let var = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if q == Tok::Forall {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            Tok::LParen => {
                // `(` opens either a parenthesised formula or a parenthesised
                // term on the left of a relation; try the atom reading first.
                let save = self.pos;
                if let Ok(atom) = self.relation() {
                    return Ok(Formula::Atom(atom));
                }
                self.pos = save;
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Ok(Formula::Atom(self.atom()?)),
        }
    }

    fn variable(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => self.error(format!("expected a variable, found {}", other.describe())),
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        if let Tok::Ident(name) = self.peek().clone() {
            let call = *self.peek_at(1) == Tok::LParen;
            match name.as_str() {
                "S" | "I" | "Atm" if call => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(match name.as_str() {
                        "S" => Atom::Set(t),
                        "I" => Atom::Ideal(t),
                        _ => Atom::Atm(t),
                    });
                }
                "C" if *self.peek_at(1) == Tok::LBracket => {
                    self.bump();
                    self.bump();
                    let k = match self.bump() {
                        Tok::Num(k) if k >= 1 => k,
                        _ => {
                            self.pos -= 1;
                            return self.error("expected a positive count in `C[k]`");
                        }
                    };
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::LParen)?;
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Atom::Count(k, t));
                }
                _ => {}
            }
        }
        self.relation()
    }

    fn relation(&mut self) -> PResult<Atom> {
        let lhs = self.term()?;
        let rel = self.peek().clone();
        match rel {
            Tok::In | Tok::Equals | Tok::Sub => {
                self.bump();
                let rhs = self.term()?;
                Ok(match rel {
                    Tok::In => Atom::Mem(lhs, rhs),
                    Tok::Equals => Atom::Eq(lhs, rhs),
                    _ => Atom::Leq(lhs, rhs),
                })
            }
            other => self.error(format!(
                "expected `in`, `=` or `sub`, found {}",
                other.describe()
            )),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.meet_term()?;
        loop {
            match self.peek() {
                Tok::Join => {
                    self.bump();
                    lhs = Term::join(lhs, self.meet_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Term::diff(lhs, self.meet_term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn meet_term(&mut self) -> PResult<Term> {
        let mut lhs = self.unary_term()?;
        while *self.peek() == Tok::Meet {
            self.bump();
            lhs = Term::meet(lhs, self.unary_term()?);
        }
        Ok(lhs)
    }

    fn unary_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Term::comp(self.unary_term()?))
            }
            Tok::Num(0) => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::Num(1) => {
                self.bump();
                Ok(Term::One)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(Term::Var(self.variable()?)),
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }
}

/// Parses `text` in signature `sig`, then renames binders apart.
pub fn parse_formula(text: &str, sig: Signature) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    if *p.peek() == Tok::Eof {
        return p.error("empty formula");
    }
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    f.check_signature(sig)?;
    Ok(f.uniquify_binders())
}
