//! Text grammar for formulas and compound conditional expressions.
//!
//! ```text
//! formula := disj
//! disj    := conj { "or" conj }
//! conj    := neg { "and" neg }
//! neg     := "not" neg | "(" formula ")" | "true" | "false" | IDENT
//!
//! cexpr   := "cond(" formula "," formula ")"
//!          | "and(" cexpr "," cexpr ")"
//!          | "given(" cexpr "," cexpr ")"      consequent first
//!          | "bicond(" formula "," formula ")"
//!          | "quasi(" cexpr "," cexpr ")"
//!          | formula                           read as formula|true
//! ```

use thiserror::Error;

/// Words that can never name an atom or a definition.
pub const RESERVED: &[&str] = &["and", "or", "not", "true", "false", "cond", "given", "bicond", "quasi"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaAst {
    True,
    False,
    Ident { name: String, position: usize },
    Not(Box<FormulaAst>),
    And(Box<FormulaAst>, Box<FormulaAst>),
    Or(Box<FormulaAst>, Box<FormulaAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondAst {
    /// A bare formula; an identifier here may also name a conditional definition.
    Formula(FormulaAst),
    Cond(FormulaAst, FormulaAst),
    And(Box<CondAst>, Box<CondAst>),
    Given { consequent: Box<CondAst>, antecedent: Box<CondAst> },
    Bicond(FormulaAst, FormulaAst),
    Quasi(Box<CondAst>, Box<CondAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, SyntaxError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError { position: i, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(Lexer { toks, end: text.len() })
}

struct Parser {
    lx: Lexer,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.lx.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.lx.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { position: self.offset(), message: message.into() })
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.pos < self.lx.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn formula(&mut self) -> Result<FormulaAst, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.is_word("or") {
            self.pos += 1;
            let rhs = self.conj()?;
            lhs = FormulaAst::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<FormulaAst, SyntaxError> {
        let mut lhs = self.neg()?;
        while self.is_word("and") && self.peek2() != Some(&Tok::LParen) {
            self.pos += 1;
            let rhs = self.neg()?;
            lhs = FormulaAst::And(Box::new(lhs), Box::new(rhs));
        }
        // `A and (B)` is still a conjunction; only a leading `and(` is the compound constructor.
        while self.is_word("and") {
            self.pos += 1;
            let rhs = self.neg()?;
            lhs = FormulaAst::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<FormulaAst, SyntaxError> {
        let position = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(w)) if w == "not" => {
                self.pos += 1;
                Ok(FormulaAst::Not(Box::new(self.neg()?)))
            }
            Some(Tok::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(FormulaAst::True)
            }
            Some(Tok::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(FormulaAst::False)
            }
            Some(Tok::Ident(w)) if RESERVED.contains(&w.as_str()) => {
                self.err(format!("unexpected keyword `{w}`"))
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                Ok(FormulaAst::Ident { name: w, position })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }

    fn cexpr(&mut self) -> Result<CondAst, SyntaxError> {
        let head = match (self.peek(), self.peek2()) {
            (Some(Tok::Ident(w)), Some(Tok::LParen))
                if matches!(w.as_str(), "cond" | "and" | "given" | "bicond" | "quasi") =>
            {
                w.clone()
            }
            _ => return Ok(CondAst::Formula(self.formula()?)),
        };
        self.pos += 2;
        let out = match head.as_str() {
            "cond" => {
                let e = self.formula()?;
                self.expect(Tok::Comma, "`,`")?;
                let h = self.formula()?;
                CondAst::Cond(e, h)
            }
            "bicond" => {
                let a = self.formula()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.formula()?;
                CondAst::Bicond(a, b)
            }
            _ => {
                let a = self.cexpr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.cexpr()?;
                match head.as_str() {
                    "and" => CondAst::And(Box::new(a), Box::new(b)),
                    "quasi" => CondAst::Quasi(Box::new(a), Box::new(b)),
                    _ => CondAst::Given { consequent: Box::new(a), antecedent: Box::new(b) },
                }
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }
}

pub fn parse_formula_ast(text: &str) -> Result<FormulaAst, SyntaxError> {
    let mut p = Parser { lx: lex(text)?, pos: 0 };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_cexpr(text: &str) -> Result<CondAst, SyntaxError> {
    let mut p = Parser { lx: lex(text)?, pos: 0 };
    let c = p.cexpr()?;
    p.finish()?;
    Ok(c)
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !RESERVED.contains(&name)
}
