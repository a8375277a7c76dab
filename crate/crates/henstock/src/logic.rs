//! The two-sorted language of arithmetic with number and set variables:
//! parsing, printing, hierarchy classification, and bounded evaluation.
//!
//! Terms are built from 0, 1, +, * and lowercase number variables;
//! atoms are t=t, t<t and t in X with uppercase set variables. A and E
//! head quantifiers over either sort (the case of the variable decides
//! the sort), and (A x < t) / (E x < t) are the bounded forms. Numerals
//! abbreviate 1+1+...+1 and expand at parse time.
//!
//! Classification reads the literal syntactic form: leading quantifier
//! blocks are stripped without any normalization, bounded quantifiers
//! never count, and anything not literally in hierarchy form reports
//! itself unclassified rather than silently prenexing. Bounds in the
//! bounded forms may be any numeric term not mentioning the bound
//! variable, a deliberate loosening of constant-only bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::codings::{unpair_cantor, Nat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Eq(Term, Term),
    Lt(Term, Term),
    In(Term, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForallNum(String, Box<Formula>),
    ExistsNum(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    BoundedForall(String, Term, Box<Formula>),
    BoundedExists(String, Term, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicError {
    Syntax { pos: usize, message: String },
    UnassignedVariable { name: String },
    UnassignedSet { name: String },
    UnboundedQuantifier { quantifier: String },
    NotSigma01 { reason: String },
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicError::Syntax { pos, message } => {
                write!(f, "syntax error at {}: {}", pos, message)
            }
            LogicError::UnassignedVariable { name } => {
                write!(f, "number variable {} has no value", name)
            }
            LogicError::UnassignedSet { name } => {
                write!(f, "set variable {} has no oracle", name)
            }
            LogicError::UnboundedQuantifier { quantifier } => {
                write!(f, "cannot evaluate under the unbounded quantifier {}", quantifier)
            }
            LogicError::NotSigma01 { reason } => {
                write!(f, "not a leading-existential form: {}", reason)
            }
        }
    }
}

impl std::error::Error for LogicError {}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    EqSign,
    LtSign,
    PlusSign,
    Star,
    Ident(String),
    Number(u64),
}

const RESERVED: [&str; 3] = ["A", "E", "in"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            '.' => {
                out.push((pos, Tok::Dot));
                i += 1;
            }
            '~' => {
                out.push((pos, Tok::Tilde));
                i += 1;
            }
            '&' => {
                out.push((pos, Tok::Amp));
                i += 1;
            }
            '|' => {
                out.push((pos, Tok::Pipe));
                i += 1;
            }
            '=' => {
                out.push((pos, Tok::EqSign));
                i += 1;
            }
            '+' => {
                out.push((pos, Tok::PlusSign));
                i += 1;
            }
            '*' => {
                out.push((pos, Tok::Star));
                i += 1;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') {
                    if chars.get(i + 2) == Some(&'>') {
                        out.push((pos, Tok::DArrow));
                        i += 3;
                    } else {
                        return Err(LogicError::Syntax {
                            pos,
                            message: "expected <-> after <-".to_string(),
                        });
                    }
                } else {
                    out.push((pos, Tok::LtSign));
                    i += 1;
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push((pos, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        pos,
                        message: "expected -> after -".to_string(),
                    });
                }
            }
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let n: u64 = s.parse().map_err(|_| LogicError::Syntax {
                    pos,
                    message: format!("numeral {} too large", s),
                })?;
                out.push((pos, Tok::Number(n)));
                i = j;
            }
            _ if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_')
                {
                    j += 1;
                }
                out.push((pos, Tok::Ident(chars[i..j].iter().collect())));
                i = j;
            }
            _ => {
                return Err(LogicError::Syntax {
                    pos,
                    message: format!("unexpected character {:?}", c),
                })
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

fn is_set_name(name: &str) -> bool {
    name.chars().next().map(|c| c.is_ascii_uppercase()).unwrap_or(false)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            pos: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn quant_head(&self) -> Option<bool> {
        // Some(true) for A, Some(false) for E, when followed by a
        // variable and a dot.
        match self.peek() {
            Some(Tok::Ident(s)) if s == "A" || s == "E" => match self.peek_at(1) {
                Some(Tok::Ident(v)) if !RESERVED.contains(&v.as_str()) => {
                    if self.peek_at(2) == Some(&Tok::Dot) {
                        Some(s == "A")
                    } else {
                        None
                    }
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        if let Some(universal) = self.quant_head() {
            self.bump();
            let Some(Tok::Ident(name)) = self.bump() else {
                unreachable!("checked by quant_head")
            };
            self.expect(Tok::Dot, "a dot after the quantified variable")?;
            let body = Box::new(self.formula()?);
            let f = match (universal, is_set_name(&name)) {
                (true, false) => Formula::ForallNum(name, body),
                (false, false) => Formula::ExistsNum(name, body),
                (true, true) => Formula::ForallSet(name, body),
                (false, true) => Formula::ExistsSet(name, body),
            };
            return Ok(f);
        }
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.implies()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            f = Formula::Iff(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn implies(&mut self) -> Result<Formula, LogicError> {
        let f = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(f), Box::new(rhs)));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.and()?;
            f = Formula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Formula::Not(Box::new(inner)));
        }
        if self.peek() == Some(&Tok::LParen) {
            // Bounded quantifier: ( A|E var < term ). The < in fourth
            // position separates this from a parenthesized quantified
            // formula like (E y. ...).
            if let Some(Tok::Ident(s)) = self.peek_at(1) {
                if (s == "A" || s == "E")
                    && matches!(self.peek_at(2), Some(Tok::Ident(_)))
                    && self.peek_at(3) == Some(&Tok::LtSign)
                {
                    return self.bounded();
                }
            }
        }
        // A comparison atom, possibly starting with a parenthesized term.
        let save = self.pos;
        match self.atom() {
            Ok(f) => return Ok(f),
            Err(e) => {
                self.pos = save;
                if self.peek() != Some(&Tok::LParen) {
                    return Err(e);
                }
            }
        }
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let f = self.formula()?;
            self.expect(Tok::RParen, "a closing parenthesis")?;
            return Ok(f);
        }
        self.err("expected a formula")
    }

    fn bounded(&mut self) -> Result<Formula, LogicError> {
        self.expect(Tok::LParen, "(")?;
        let universal = match self.bump() {
            Some(Tok::Ident(s)) if s == "A" => true,
            Some(Tok::Ident(s)) if s == "E" => false,
            _ => return self.err("expected A or E"),
        };
        let name = match self.bump() {
            Some(Tok::Ident(v)) if !RESERVED.contains(&v.as_str()) => v,
            _ => return self.err("expected a variable after the bounded quantifier"),
        };
        if is_set_name(&name) {
            return self.err("bounded quantifiers range over number variables only");
        }
        self.expect(Tok::LtSign, "< and a bound term")?;
        let bound_pos = self.here();
        let bound = self.term()?;
        if term_mentions(&bound, &name) {
            return Err(LogicError::Syntax {
                pos: bound_pos,
                message: format!("bound term mentions the bound variable {}", name),
            });
        }
        self.expect(Tok::RParen, "a closing parenthesis after the bound")?;
        let body = Box::new(self.unary()?);
        Ok(if universal {
            Formula::BoundedForall(name, bound, body)
        } else {
            Formula::BoundedExists(name, bound, body)
        })
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.term()?;
        match self.bump() {
            Some(Tok::EqSign) => {
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            Some(Tok::LtSign) => {
                let rhs = self.term()?;
                Ok(Formula::Lt(lhs, rhs))
            }
            Some(Tok::Ident(kw)) if kw == "in" => match self.bump() {
                Some(Tok::Ident(x)) if is_set_name(&x) => Ok(Formula::In(lhs, x)),
                _ => self.err("expected a set variable after in"),
            },
            _ => self.err("expected =, < or in after a term"),
        }
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let mut t = self.product()?;
        while self.peek() == Some(&Tok::PlusSign) {
            self.pos += 1;
            let rhs = self.product()?;
            t = Term::Plus(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term, LogicError> {
        let mut t = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.primary()?;
            t = Term::Times(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, LogicError> {
        match self.peek().cloned() {
            Some(Tok::Number(n)) => {
                self.pos += 1;
                Ok(numeral(n))
            }
            Some(Tok::Ident(name)) => {
                if RESERVED.contains(&name.as_str()) {
                    return self.err(format!("{} is reserved", name));
                }
                if is_set_name(&name) {
                    return self.err(format!("set variable {} in a numeric position", name));
                }
                self.pos += 1;
                Ok(Term::Var(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "a closing parenthesis in a term")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Numeral sugar: 0 and 1 are primitive, k >= 2 is a left-nested sum of
/// ones.
pub fn numeral(n: u64) -> Term {
    match n {
        0 => Term::Zero,
        1 => Term::One,
        _ => {
            let mut t = Term::One;
            for _ in 1..n {
                t = Term::Plus(Box::new(t), Box::new(Term::One));
            }
            t
        }
    }
}

fn term_mentions(t: &Term, var: &str) -> bool {
    match t {
        Term::Zero | Term::One => false,
        Term::Var(v) => v == var,
        Term::Plus(a, b) | Term::Times(a, b) => {
            term_mentions(a, var) || term_mentions(b, var)
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after the formula");
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Printing

fn print_term(t: &Term) -> String {
    match t {
        Term::Zero => "0".to_string(),
        Term::One => "1".to_string(),
        Term::Var(v) => v.clone(),
        Term::Plus(a, b) => format!("({}+{})", print_term(a), print_term(b)),
        Term::Times(a, b) => format!("({}*{})", print_term(a), print_term(b)),
    }
}

/// True when the string is one parenthesized group: it starts with ( and
/// that parenthesis closes only at the very end.
fn fully_wrapped(s: &str) -> bool {
    let bytes = s.as_bytes();
    if bytes.first() != Some(&b'(') || bytes.last() != Some(&b')') {
        return false;
    }
    let mut depth = 0i32;
    for (i, b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return i == bytes.len() - 1;
                }
            }
            _ => {}
        }
    }
    false
}

fn group(f: &Formula) -> String {
    let s = print_formula(f);
    if fully_wrapped(&s) {
        s
    } else {
        format!("({})", s)
    }
}

fn side(f: &Formula) -> String {
    match f {
        Formula::ForallNum(..)
        | Formula::ExistsNum(..)
        | Formula::ForallSet(..)
        | Formula::ExistsSet(..) => format!("({})", print_formula(f)),
        _ => print_formula(f),
    }
}

/// Canonical form: atoms compact, every binary connective parenthesized,
/// quantifier bodies running to the right. Printing a parsed formula and
/// reparsing it is the identity, and printing is idempotent.
pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::Eq(s, t) => format!("{}={}", print_term(s), print_term(t)),
        Formula::Lt(s, t) => format!("{}<{}", print_term(s), print_term(t)),
        Formula::In(t, x) => format!("{} in {}", print_term(t), x),
        Formula::Not(g) => format!("~{}", group(g)),
        Formula::And(a, b) => format!("({} & {})", side(a), side(b)),
        Formula::Or(a, b) => format!("({} | {})", side(a), side(b)),
        Formula::Implies(a, b) => format!("({} -> {})", side(a), side(b)),
        Formula::Iff(a, b) => format!("({} <-> {})", side(a), side(b)),
        Formula::ForallNum(v, b) => format!("A {}. {}", v, print_formula(b)),
        Formula::ExistsNum(v, b) => format!("E {}. {}", v, print_formula(b)),
        Formula::ForallSet(v, b) => format!("A {}. {}", v, print_formula(b)),
        Formula::ExistsSet(v, b) => format!("E {}. {}", v, print_formula(b)),
        Formula::BoundedForall(v, t, b) => {
            format!("(A {} < {}){}", v, print_term(t), group(b))
        }
        Formula::BoundedExists(v, t, b) => {
            format!("(E {} < {}){}", v, print_term(t), group(b))
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_formula(self))
    }
}

// ---------------------------------------------------------------------------
// Free variables and closure

fn walk_term_vars(t: &Term, bound: &[String], out: &mut Vec<String>) {
    match t {
        Term::Zero | Term::One => {}
        Term::Var(v) => {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Plus(a, b) | Term::Times(a, b) => {
            walk_term_vars(a, bound, out);
            walk_term_vars(b, bound, out);
        }
    }
}

fn walk_free(
    f: &Formula,
    bound_nums: &mut Vec<String>,
    bound_sets: &mut Vec<String>,
    nums: &mut Vec<String>,
    sets: &mut Vec<String>,
) {
    match f {
        Formula::Eq(s, t) | Formula::Lt(s, t) => {
            walk_term_vars(s, bound_nums, nums);
            walk_term_vars(t, bound_nums, nums);
        }
        Formula::In(t, x) => {
            walk_term_vars(t, bound_nums, nums);
            if !bound_sets.contains(x) && !sets.contains(x) {
                sets.push(x.clone());
            }
        }
        Formula::Not(g) => walk_free(g, bound_nums, bound_sets, nums, sets),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => {
            walk_free(a, bound_nums, bound_sets, nums, sets);
            walk_free(b, bound_nums, bound_sets, nums, sets);
        }
        Formula::ForallNum(v, b) | Formula::ExistsNum(v, b) => {
            bound_nums.push(v.clone());
            walk_free(b, bound_nums, bound_sets, nums, sets);
            bound_nums.pop();
        }
        Formula::ForallSet(v, b) | Formula::ExistsSet(v, b) => {
            bound_sets.push(v.clone());
            walk_free(b, bound_nums, bound_sets, nums, sets);
            bound_sets.pop();
        }
        Formula::BoundedForall(v, t, b) | Formula::BoundedExists(v, t, b) => {
            walk_term_vars(t, bound_nums, nums);
            bound_nums.push(v.clone());
            walk_free(b, bound_nums, bound_sets, nums, sets);
            bound_nums.pop();
        }
    }
}

/// Free number and set variables in first-occurrence order.
pub fn free_vars(f: &Formula) -> (Vec<String>, Vec<String>) {
    let mut nums = Vec::new();
    let mut sets = Vec::new();
    walk_free(f, &mut Vec::new(), &mut Vec::new(), &mut nums, &mut sets);
    (nums, sets)
}

/// Prepend universal quantifiers over every free variable, numbers
/// outermost, then sets, each sort in first-occurrence order.
pub fn universal_closure(f: &Formula) -> Formula {
    let (nums, sets) = free_vars(f);
    let mut g = f.clone();
    for x in sets.iter().rev() {
        g = Formula::ForallSet(x.clone(), Box::new(g));
    }
    for v in nums.iter().rev() {
        g = Formula::ForallNum(v.clone(), Box::new(g));
    }
    g
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HierClass {
    /// Only bounded quantifiers: lowest level on both sides.
    Bounded,
    Sigma { order: u8, level: u64 },
    Pi { order: u8, level: u64 },
    Unclassified { reason: String },
}

impl fmt::Display for HierClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierClass::Bounded => write!(f, "Sigma/Pi 0 0"),
            HierClass::Sigma { order, level } => write!(f, "Sigma {} {}", order, level),
            HierClass::Pi { order, level } => write!(f, "Pi {} {}", order, level),
            HierClass::Unclassified { reason } => write!(f, "unclassified: {}", reason),
        }
    }
}

fn quantifier_label(f: &Formula) -> Option<String> {
    match f {
        Formula::ForallNum(v, _) => Some(format!("A {}", v)),
        Formula::ExistsNum(v, _) => Some(format!("E {}", v)),
        Formula::ForallSet(v, _) => Some(format!("A {}", v)),
        Formula::ExistsSet(v, _) => Some(format!("E {}", v)),
        _ => None,
    }
}

/// The first unbounded quantifier anywhere in the formula, if any;
/// bounded quantifiers are transparent.
fn find_unbounded(f: &Formula) -> Option<String> {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::In(..) => None,
        Formula::Not(g) => find_unbounded(g),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => find_unbounded(a).or_else(|| find_unbounded(b)),
        Formula::ForallNum(..) | Formula::ExistsNum(..) | Formula::ForallSet(..)
        | Formula::ExistsSet(..) => quantifier_label(f),
        Formula::BoundedForall(_, _, b) | Formula::BoundedExists(_, _, b) => {
            find_unbounded(b)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    set_sort: bool,
    universal: bool,
}

/// Maximal leading quantifier blocks (same sort, same polarity runs
/// merge) and the matrix below them.
fn leading_blocks(mut f: &Formula) -> (Vec<Block>, &Formula) {
    let mut blocks: Vec<Block> = Vec::new();
    loop {
        let next = match f {
            Formula::ForallNum(_, b) => Some((Block { set_sort: false, universal: true }, b)),
            Formula::ExistsNum(_, b) => Some((Block { set_sort: false, universal: false }, b)),
            Formula::ForallSet(_, b) => Some((Block { set_sort: true, universal: true }, b)),
            Formula::ExistsSet(_, b) => Some((Block { set_sort: true, universal: false }, b)),
            _ => None,
        };
        match next {
            Some((blk, body)) => {
                if blocks.last() != Some(&blk) {
                    blocks.push(blk);
                }
                f = body;
            }
            None => return (blocks, f),
        }
    }
}

/// Literal-form hierarchy classification: strip the leading quantifier
/// blocks exactly as written, count alternations, and demand a matrix
/// with bounded quantifiers only. No normalization is attempted; a
/// formula not literally in hierarchy shape reports the blocking node.
pub fn classify(f: &Formula) -> HierClass {
    if find_unbounded(f).is_none() {
        return HierClass::Bounded;
    }
    let (blocks, matrix) = leading_blocks(f);
    if blocks.is_empty() {
        let q = find_unbounded(f).expect("checked above");
        let context = match f {
            Formula::BoundedForall(..) | Formula::BoundedExists(..) => {
                "behind a bounded quantifier"
            }
            _ => "below a connective",
        };
        return HierClass::Unclassified {
            reason: format!("unbounded quantifier {} {}", q, context),
        };
    }
    if let Some(q) = find_unbounded(matrix) {
        return HierClass::Unclassified {
            reason: format!("unbounded quantifier {} inside the matrix", q),
        };
    }
    let set_prefix = blocks.iter().take_while(|b| b.set_sort).count();
    if set_prefix == 0 {
        // Arithmetical: all leading blocks must be numeric.
        if blocks.iter().any(|b| b.set_sort) {
            return HierClass::Unclassified {
                reason: "set quantifier below number quantifiers".to_string(),
            };
        }
        let level = blocks.len() as u64;
        return if blocks[0].universal {
            HierClass::Pi { order: 0, level }
        } else {
            HierClass::Sigma { order: 0, level }
        };
    }
    // Analytical: a leading set prefix, then an arithmetical remainder.
    if blocks[set_prefix..].iter().any(|b| b.set_sort) {
        return HierClass::Unclassified {
            reason: "set quantifier interrupted by number quantifiers".to_string(),
        };
    }
    let level = set_prefix as u64;
    if blocks[0].universal {
        HierClass::Pi { order: 1, level }
    } else {
        HierClass::Sigma { order: 1, level }
    }
}

// ---------------------------------------------------------------------------
// Bounded evaluation

pub type DecidableSet = Arc<dyn Fn(&Nat) -> bool + Send + Sync>;

/// A decidable set from an explicit finite list.
pub fn finite_set(members: Vec<Nat>) -> DecidableSet {
    Arc::new(move |n| members.contains(n))
}

fn term_value(
    t: &Term,
    env: &BTreeMap<String, Nat>,
) -> Result<Nat, LogicError> {
    match t {
        Term::Zero => Ok(Nat::zero()),
        Term::One => Ok(Nat::one()),
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| LogicError::UnassignedVariable { name: v.clone() }),
        Term::Plus(a, b) => Ok(term_value(a, env)? + term_value(b, env)?),
        Term::Times(a, b) => Ok(term_value(a, env)? * term_value(b, env)?),
    }
}

fn eval_in_env(
    f: &Formula,
    env: &mut BTreeMap<String, Nat>,
    sets: &BTreeMap<String, DecidableSet>,
) -> Result<bool, LogicError> {
    match f {
        Formula::Eq(s, t) => Ok(term_value(s, env)? == term_value(t, env)?),
        Formula::Lt(s, t) => Ok(term_value(s, env)? < term_value(t, env)?),
        Formula::In(t, x) => {
            let v = term_value(t, env)?;
            let set = sets
                .get(x)
                .ok_or_else(|| LogicError::UnassignedSet { name: x.clone() })?;
            Ok(set(&v))
        }
        Formula::Not(g) => Ok(!eval_in_env(g, env, sets)?),
        Formula::And(a, b) => Ok(eval_in_env(a, env, sets)? && eval_in_env(b, env, sets)?),
        Formula::Or(a, b) => Ok(eval_in_env(a, env, sets)? || eval_in_env(b, env, sets)?),
        Formula::Implies(a, b) => {
            Ok(!eval_in_env(a, env, sets)? || eval_in_env(b, env, sets)?)
        }
        Formula::Iff(a, b) => Ok(eval_in_env(a, env, sets)? == eval_in_env(b, env, sets)?),
        Formula::ForallNum(..)
        | Formula::ExistsNum(..)
        | Formula::ForallSet(..)
        | Formula::ExistsSet(..) => Err(LogicError::UnboundedQuantifier {
            quantifier: quantifier_label(f).expect("quantifier node"),
        }),
        Formula::BoundedForall(v, t, b) | Formula::BoundedExists(v, t, b) => {
            let bound = term_value(t, env)?;
            let universal = matches!(f, Formula::BoundedForall(..));
            let saved = env.get(v).cloned();
            let mut k = Nat::zero();
            let mut result = universal;
            while k < bound {
                env.insert(v.clone(), k.clone());
                let got = eval_in_env(b, env, sets)?;
                if universal && !got {
                    result = false;
                    break;
                }
                if !universal && got {
                    result = true;
                    break;
                }
                k += 1u32;
            }
            match saved {
                Some(old) => {
                    env.insert(v.clone(), old);
                }
                None => {
                    env.remove(v);
                }
            }
            Ok(result)
        }
    }
}

/// Exact truth value of a formula whose only quantifiers are bounded,
/// under the standard reading of 0, 1, +, *, < over the naturals.
/// Bounded quantifiers expand to finite scans.
pub fn eval_delta00(
    f: &Formula,
    nums: &BTreeMap<String, Nat>,
    sets: &BTreeMap<String, DecidableSet>,
) -> Result<bool, LogicError> {
    let mut env = nums.clone();
    eval_in_env(f, &mut env, sets)
}

// ---------------------------------------------------------------------------
// Leading-existential witness search

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Values for the leading existential variables, in binding order.
    Witness(Vec<Nat>),
    ExhaustedAtBudget(u64),
}

fn decode_tuple(c: &Nat, arity: usize) -> Vec<Nat> {
    if arity == 1 {
        return vec![c.clone()];
    }
    let (head, rest) = unpair_cantor(c);
    let mut out = vec![head];
    out.extend(decode_tuple(&rest, arity - 1));
    out
}

/// Scan candidate witness tuples in pairing order for a formula of the
/// literal shape E y1. ... E yk. (bounded matrix). Any witness returned
/// makes the matrix true under the bounded evaluator.
pub fn search_sigma01(
    f: &Formula,
    budget: u64,
    nums: &BTreeMap<String, Nat>,
    sets: &BTreeMap<String, DecidableSet>,
) -> Result<SearchOutcome, LogicError> {
    let mut vars: Vec<String> = Vec::new();
    let mut matrix = f;
    while let Formula::ExistsNum(v, b) = matrix {
        vars.push(v.clone());
        matrix = b;
    }
    if vars.is_empty() {
        return Err(LogicError::NotSigma01 {
            reason: "no leading number-existential block".to_string(),
        });
    }
    if let Some(q) = find_unbounded(matrix) {
        return Err(LogicError::NotSigma01 {
            reason: format!("unbounded quantifier {} inside the matrix", q),
        });
    }
    for c in 0..budget {
        let tuple = decode_tuple(&Nat::from(c), vars.len());
        let mut env = nums.clone();
        for (v, val) in vars.iter().zip(tuple.iter()) {
            env.insert(v.clone(), val.clone());
        }
        if eval_delta00(matrix, &env, sets)? {
            return Ok(SearchOutcome::Witness(tuple));
        }
    }
    Ok(SearchOutcome::ExhaustedAtBudget(budget))
}

// ---------------------------------------------------------------------------
// The eight basic sentences

/// The eight first-order sentences every subsystem shares: successor is
/// injective and never zero, the recursions for + and * on 0 and
/// successor, nothing below zero, and the successor step for <.
pub fn basic_axiom_texts() -> [&'static str; 8] {
    [
        "A n. ~(n+1=0)",
        "A n. A m. ((n+1=m+1) -> (n=m))",
        "A n. (n+0=n)",
        "A n. A m. (n+(m+1)=(n+m)+1)",
        "A n. (n*0=0)",
        "A n. A m. (n*(m+1)=(n*m)+n)",
        "A n. ~(n<0)",
        "A n. A m. ((n<m+1) <-> ((n<m) | (n=m)))",
    ]
}

pub fn basic_axioms() -> Vec<Formula> {
    basic_axiom_texts()
        .iter()
        .map(|t| parse_formula(t).expect("the built-in sentences parse"))
        .collect()
}
