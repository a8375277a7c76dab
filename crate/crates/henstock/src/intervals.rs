//! Rational interval codes on the line and on the unit interval.
//!
//! A line interval (p, q) needs p < q. A unit-interval code keeps its raw
//! endpoints but denotes (p, q) intersected with [0,1]; the clamped endpoints
//! p' = max(p,0), q' = min(q,1) must satisfy p' < q', so a code always denotes
//! a nonempty set. Inclusion and intersection are decided on the rational
//! endpoints alone.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::codings::{fmt_rat, pow2, Rat};
use crate::exactreal::{CmpVerdict, FastReal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervalError {
    EmptyLineInterval { p: String, q: String },
    EmptyUnitInterval { p: String, q: String },
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::EmptyLineInterval { p, q } => {
                write!(f, "({}, {}) is not a line interval: need p < q", p, q)
            }
            IntervalError::EmptyUnitInterval { p, q } => write!(
                f,
                "({}, {}) misses the unit interval: need max(p,0) < min(q,1)",
                p, q
            ),
        }
    }
}

impl std::error::Error for IntervalError {}

/// Open rational interval (p, q) on the line, p < q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalR {
    p: Rat,
    q: Rat,
}

impl IntervalR {
    pub fn new(p: Rat, q: Rat) -> Result<Self, IntervalError> {
        if p < q {
            Ok(IntervalR { p, q })
        } else {
            Err(IntervalError::EmptyLineInterval {
                p: fmt_rat(&p),
                q: fmt_rat(&q),
            })
        }
    }

    pub fn lo(&self) -> &Rat {
        &self.p
    }

    pub fn hi(&self) -> &Rat {
        &self.q
    }

    pub fn length(&self) -> Rat {
        &self.q - &self.p
    }

    pub fn midpoint(&self) -> Rat {
        (&self.p + &self.q) / Rat::from_integer(2.into())
    }

    pub fn intersects(&self, other: &IntervalR) -> bool {
        self.p < other.q && other.p < self.q
    }

    /// other contains self: p_out <= p_in and q_in <= q_out.
    pub fn contained_in(&self, outer: &IntervalR) -> bool {
        outer.p <= self.p && self.q <= outer.q
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        &self.p < x && x < &self.q
    }
}

impl fmt::Display for IntervalR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.p), fmt_rat(&self.q))
    }
}

/// Code for (p, q) ∩ [0,1] with raw rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalUI {
    p: Rat,
    q: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemberVerdict {
    In,
    Out,
    UnknownAtBudget(u32),
}

impl IntervalUI {
    pub fn new(p: Rat, q: Rat) -> Result<Self, IntervalError> {
        let iv = IntervalUI { p, q };
        if iv.lo_clamped() < iv.hi_clamped() {
            Ok(iv)
        } else {
            Err(IntervalError::EmptyUnitInterval {
                p: fmt_rat(&iv.p),
                q: fmt_rat(&iv.q),
            })
        }
    }

    pub fn raw_lo(&self) -> &Rat {
        &self.p
    }

    pub fn raw_hi(&self) -> &Rat {
        &self.q
    }

    pub fn lo_clamped(&self) -> Rat {
        if self.p.is_negative() {
            Rat::zero()
        } else {
            self.p.clone()
        }
    }

    pub fn hi_clamped(&self) -> Rat {
        if self.q > Rat::one() {
            Rat::one()
        } else {
            self.q.clone()
        }
    }

    /// Length of the denoted set, q' - p'.
    pub fn length(&self) -> Rat {
        let l = self.hi_clamped() - self.lo_clamped();
        if l.is_negative() {
            Rat::zero()
        } else {
            l
        }
    }

    pub fn midpoint_clamped(&self) -> Rat {
        (self.lo_clamped() + self.hi_clamped()) / Rat::from_integer(2.into())
    }

    pub fn intersects(&self, other: &IntervalUI) -> bool {
        self.lo_clamped() < other.hi_clamped() && other.lo_clamped() < self.hi_clamped()
    }

    /// self ⊆ outer on the denoted sets:
    /// (p_out < 0 or p_out <= p_in) and (q_out > 1 or q_in <= q_out).
    pub fn contained_in(&self, outer: &IntervalUI) -> bool {
        (outer.p.is_negative() || outer.p <= self.p) && (outer.q > Rat::one() || self.q <= outer.q)
    }

    /// Exact membership for a rational point: p < x < q and 0 <= x <= 1.
    pub fn contains_rat(&self, x: &Rat) -> bool {
        &self.p < x && x < &self.q && !x.is_negative() && *x <= Rat::one()
    }

    /// Membership for a coded real assumed to lie in [0,1]. In requires both
    /// strict endpoint inequalities certified; Out requires one refuted. On
    /// the boundary the verdict stays unknown forever, which is the honest
    /// answer for an open set.
    pub fn member_budgeted(&self, x: &FastReal, budget: u32) -> MemberVerdict {
        let lo = FastReal::from_rational(self.p.clone());
        let hi = FastReal::from_rational(self.q.clone());
        let above = lo.compare_budgeted(x, budget);
        let below = x.compare_budgeted(&hi, budget);
        match (above, below) {
            (CmpVerdict::Less, CmpVerdict::Less) => MemberVerdict::In,
            (CmpVerdict::Greater, _) | (_, CmpVerdict::Greater) => MemberVerdict::Out,
            _ => MemberVerdict::UnknownAtBudget(budget),
        }
    }

    /// The ball (c - r, c + r) as a unit-interval code; None when it misses
    /// (0,1) entirely.
    pub fn ball(center: &Rat, radius: &Rat) -> Option<IntervalUI> {
        IntervalUI::new(center - radius, center + radius).ok()
    }
}

impl fmt::Display for IntervalUI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.p), fmt_rat(&self.q))
    }
}

/// An enumerated open subset of [0,1]: a total map from indices to codes,
/// with None once the enumeration is exhausted.
pub struct OpenSet {
    gen: Box<dyn Fn(u64) -> Option<IntervalUI> + Send + Sync>,
}

impl OpenSet {
    pub fn from_fn<F>(gen: F) -> Self
    where
        F: Fn(u64) -> Option<IntervalUI> + Send + Sync + 'static,
    {
        OpenSet { gen: Box::new(gen) }
    }

    pub fn from_vec(items: Vec<IntervalUI>) -> Self {
        OpenSet::from_fn(move |i| items.get(i as usize).cloned())
    }

    pub fn get(&self, i: u64) -> Option<IntervalUI> {
        (self.gen)(i)
    }

    /// Exact membership of a rational point in the union of the first
    /// `bound` codes.
    pub fn contains_rat_within(&self, x: &Rat, bound: u64) -> bool {
        (0..bound).any(|i| match self.get(i) {
            Some(iv) => iv.contains_rat(x),
            None => false,
        })
    }
}

/// Convenience: the interval (x - r, x + r) around a rational, as line code.
pub fn line_ball(center: &Rat, radius_exp: i64) -> IntervalR {
    let r = pow2(radius_exp);
    IntervalR::new(center - &r, center + &r).expect("positive radius")
}
