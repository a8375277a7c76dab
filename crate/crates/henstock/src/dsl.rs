//! Text forms for functions and gauges: a small s-expression language so
//! scripts and the command line can name every built-in construction.
//!
//! Function forms: (const q), (linear m c), (piecewise (d0 ... dk) e1 ... ek),
//! (spike p q), (spikesum (iv p q) ...), (spikesum-pi01 N). Gauge forms add
//! the rank-1 codes: (lift e), (heaviside), (clb1-gauge sqrt2-over-2),
//! (dyadic-cex), (baire-seq e1 e2 ... generator-name). Rationals are written
//! num/den or as plain integers; intervals as (iv p q).

use std::fmt;
use std::sync::Arc;

use crate::bairefun::{
    mk_eventually_constant, mk_half_distance_limit, mk_heaviside, mk_tent_at_third, BaireCode,
};
use crate::cantor::pi01_balls;
use crate::codings::{parse_rat, Rat};
use crate::contfun::{
    mk_const, mk_linear, mk_piecewise, mk_scaled_sum, mk_spike, ContCode, ContFunError,
};
use crate::exactreal::{sqrt2_over_2, FastReal};
use crate::intervals::{IntervalError, IntervalUI};
use crate::partition::Gauge;

/// How far the ball enumeration scans when a text form asks for the first
/// N balls: large enough that the early picture is stable, small enough
/// to stay instant.
pub const BALL_SCAN_BOUND: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslError {
    Syntax { message: String },
    Shape { form: String, message: String },
    Interval(IntervalError),
    Function(ContFunError),
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Syntax { message } => write!(f, "bad expression: {}", message),
            DslError::Shape { form, message } => write!(f, "bad ({} ...) form: {}", form, message),
            DslError::Interval(e) => write!(f, "bad interval: {}", e),
            DslError::Function(e) => write!(f, "cannot build function: {}", e),
        }
    }
}

impl std::error::Error for DslError {}

impl From<IntervalError> for DslError {
    fn from(e: IntervalError) -> Self {
        DslError::Interval(e)
    }
}

impl From<ContFunError> for DslError {
    fn from(e: ContFunError) -> Self {
        DslError::Function(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn lex_sexp(text: &str) -> Vec<String> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
                toks.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    toks
}

fn parse_sexp(text: &str) -> Result<Sexp, DslError> {
    let toks = lex_sexp(text);
    let mut pos = 0usize;
    let expr = parse_one(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(DslError::Syntax {
            message: format!("trailing input after the expression: {}", toks[pos]),
        });
    }
    Ok(expr)
}

fn parse_one(toks: &[String], pos: &mut usize) -> Result<Sexp, DslError> {
    match toks.get(*pos) {
        None => Err(DslError::Syntax {
            message: "empty expression".to_string(),
        }),
        Some(t) if t == "(" => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    None => {
                        return Err(DslError::Syntax {
                            message: "unclosed parenthesis".to_string(),
                        })
                    }
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_one(toks, pos)?),
                }
            }
        }
        Some(t) if t == ")" => Err(DslError::Syntax {
            message: "unexpected closing parenthesis".to_string(),
        }),
        Some(t) => {
            *pos += 1;
            Ok(Sexp::Atom(t.clone()))
        }
    }
}

fn atom_rat(s: &Sexp, form: &str) -> Result<Rat, DslError> {
    match s {
        Sexp::Atom(a) => {
            let text = if a.contains('/') {
                a.clone()
            } else {
                format!("{}/1", a)
            };
            parse_rat(&text).map_err(|_| DslError::Shape {
                form: form.to_string(),
                message: format!("{} is not a rational", a),
            })
        }
        Sexp::List(_) => Err(DslError::Shape {
            form: form.to_string(),
            message: "expected a rational, found a list".to_string(),
        }),
    }
}

fn atom_u64(s: &Sexp, form: &str) -> Result<u64, DslError> {
    match s {
        Sexp::Atom(a) => a.parse().map_err(|_| DslError::Shape {
            form: form.to_string(),
            message: format!("{} is not a count", a),
        }),
        Sexp::List(_) => Err(DslError::Shape {
            form: form.to_string(),
            message: "expected a count, found a list".to_string(),
        }),
    }
}

fn interval_of(s: &Sexp) -> Result<IntervalUI, DslError> {
    let Sexp::List(items) = s else {
        return Err(DslError::Shape {
            form: "iv".to_string(),
            message: "expected (iv p q)".to_string(),
        });
    };
    match items.as_slice() {
        [Sexp::Atom(h), p, q] if h == "iv" => {
            Ok(IntervalUI::new(atom_rat(p, "iv")?, atom_rat(q, "iv")?)?)
        }
        _ => Err(DslError::Shape {
            form: "iv".to_string(),
            message: "expected (iv p q)".to_string(),
        }),
    }
}

/// A parsed function form: either a continuous code or a rank-1 limit
/// code. Gauges accept both; integration wants the continuous side.
#[derive(Clone)]
pub enum DslFunction {
    Cont(ContCode),
    Baire(BaireCode),
}

impl DslFunction {
    pub fn into_gauge(self) -> Gauge {
        match self {
            DslFunction::Cont(c) => Gauge::Cont(c),
            DslFunction::Baire(b) => Gauge::Baire(b),
        }
    }

    pub fn name(&self) -> String {
        match self {
            DslFunction::Cont(c) => c.name().to_string(),
            DslFunction::Baire(b) => b.name().to_string(),
        }
    }
}

fn cont_of(s: &Sexp) -> Result<ContCode, DslError> {
    match function_of(s)? {
        DslFunction::Cont(c) => Ok(c),
        DslFunction::Baire(b) => Err(DslError::Shape {
            form: "function".to_string(),
            message: format!("{} is a rank-1 code where a continuous one is needed", b.name()),
        }),
    }
}

fn clb1_gauge_at_sqrt2() -> BaireCode {
    let zs: Arc<dyn Fn(u64) -> FastReal + Send + Sync> = Arc::new(|n| {
        FastReal::from_rational(sqrt2_over_2().approx(n as u32 + 1))
    });
    // Members n, m >= k sit within 2^(-n-1) + 2^(-m-1) <= 2^(-k) of each
    // other, so the sequence's own index is a rate.
    mk_half_distance_limit(zs, Arc::new(|k| k), "sqrt2/2")
}

fn function_of(s: &Sexp) -> Result<DslFunction, DslError> {
    let Sexp::List(items) = s else {
        return Err(DslError::Syntax {
            message: "a function form is a parenthesized list".to_string(),
        });
    };
    let Some(Sexp::Atom(head)) = items.first() else {
        return Err(DslError::Syntax {
            message: "a function form starts with its name".to_string(),
        });
    };
    let args = &items[1..];
    match head.as_str() {
        "const" => match args {
            [q] => Ok(DslFunction::Cont(mk_const(atom_rat(q, "const")?))),
            _ => Err(shape("const", "expected (const q)")),
        },
        "linear" => match args {
            [m, c] => Ok(DslFunction::Cont(mk_linear(
                atom_rat(m, "linear")?,
                atom_rat(c, "linear")?,
            ))),
            _ => Err(shape("linear", "expected (linear m c)")),
        },
        "piecewise" => match args {
            [Sexp::List(grid), parts @ ..] if !parts.is_empty() => {
                let breaks = grid
                    .iter()
                    .map(|d| atom_rat(d, "piecewise"))
                    .collect::<Result<Vec<_>, _>>()?;
                let codes = parts.iter().map(cont_of).collect::<Result<Vec<_>, _>>()?;
                Ok(DslFunction::Cont(mk_piecewise(breaks, codes)?))
            }
            _ => Err(shape("piecewise", "expected (piecewise (d0 ... dk) e1 ... ek)")),
        },
        "spike" => match args {
            [p, q] => {
                let u = IntervalUI::new(atom_rat(p, "spike")?, atom_rat(q, "spike")?)?;
                Ok(DslFunction::Cont(mk_spike(&u)))
            }
            _ => Err(shape("spike", "expected (spike p q)")),
        },
        "spikesum" => {
            if args.is_empty() {
                return Err(shape("spikesum", "expected (spikesum (iv p q) ...)"));
            }
            let us = args.iter().map(interval_of).collect::<Result<Vec<_>, _>>()?;
            let name = format!("spike sum over {} intervals", us.len());
            Ok(DslFunction::Cont(mk_scaled_sum(name, &us)))
        }
        "spikesum-pi01" => match args {
            [n] => {
                let count = atom_u64(n, "spikesum-pi01")?;
                let scan = pi01_balls(count as usize, BALL_SCAN_BOUND);
                let us: Vec<IntervalUI> =
                    scan.balls.iter().map(|b| b.ball.clone()).collect();
                let name = format!("spike sum over the first {} emitted balls", us.len());
                Ok(DslFunction::Cont(mk_scaled_sum(name, &us)))
            }
            _ => Err(shape("spikesum-pi01", "expected (spikesum-pi01 N)")),
        },
        "iv" => Err(shape("iv", "an interval is not a function")),
        "lift" => match args {
            [e] => Ok(DslFunction::Baire(BaireCode::base(cont_of(e)?))),
            _ => Err(shape("lift", "expected (lift e)")),
        },
        "heaviside" => match args {
            [] => Ok(DslFunction::Baire(mk_heaviside())),
            _ => Err(shape("heaviside", "expected (heaviside)")),
        },
        "clb1-gauge" => match args {
            [Sexp::Atom(point)] if point == "sqrt2-over-2" => {
                Ok(DslFunction::Baire(clb1_gauge_at_sqrt2()))
            }
            _ => Err(shape("clb1-gauge", "expected (clb1-gauge sqrt2-over-2)")),
        },
        "dyadic-cex" => match args {
            [] => Ok(DslFunction::Baire(mk_tent_at_third())),
            _ => Err(shape("dyadic-cex", "expected (dyadic-cex)")),
        },
        "baire-seq" => {
            let Some((Sexp::Atom(generator), exprs)) = args.split_last() else {
                return Err(shape(
                    "baire-seq",
                    "expected (baire-seq e1 e2 ... generator-name)",
                ));
            };
            if generator != "repeat-last" {
                return Err(shape(
                    "baire-seq",
                    &format!("unknown tail generator {}; only repeat-last is wired", generator),
                ));
            }
            if exprs.is_empty() {
                return Err(shape("baire-seq", "need at least one code before the generator"));
            }
            let codes = exprs.iter().map(cont_of).collect::<Result<Vec<_>, _>>()?;
            let name = format!("sequence of {} codes then {}", codes.len(), generator);
            Ok(DslFunction::Baire(mk_eventually_constant(name, codes)))
        }
        other => Err(DslError::Syntax {
            message: format!("unknown form {}", other),
        }),
    }
}

fn shape(form: &str, message: &str) -> DslError {
    DslError::Shape {
        form: form.to_string(),
        message: message.to_string(),
    }
}

/// Parse a function form from text.
pub fn parse_function(text: &str) -> Result<DslFunction, DslError> {
    function_of(&parse_sexp(text)?)
}

/// Parse a gauge: any function form, viewed through the gauge interface.
pub fn parse_gauge(text: &str) -> Result<Gauge, DslError> {
    Ok(parse_function(text)?.into_gauge())
}
