//! Codes for continuous functions on the unit interval.
//!
//! A code pairs a decidable membership test on rational interval pairs (U, V)
//! with an enumeration of member pairs. (U, V) being a member certifies that
//! the coded function maps U ∩ [0,1] into V. Codes built here also carry an
//! exact rational evaluator and a certified Lipschitz constant, which turn
//! membership questions into finite range computations.
//!
//! The built-in shapes are piecewise linear: affine maps, tent spikes
//! supported on a unit-interval code, and finite weighted sums of spikes. The
//! n-th spike in a sum is scaled by 2^(-n-2), so a sum over any prefix of an
//! interval list stays below 1/4 and is (1/2)-Lipschitz.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::codings::{enum_rational, fmt_rat, pow2, unpair_cantor, Rat};
use crate::exactreal::{ceil_log2, FastReal};
use crate::intervals::{IntervalR, IntervalUI, MemberVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContFunError {
    BadBreakpoints(String),
    BudgetExhausted { budget: u64 },
    NoEvaluator { name: String },
    BreakpointMismatch { index: usize },
    UnevaluablePart { index: usize },
}

impl fmt::Display for ContFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContFunError::BadBreakpoints(msg) => write!(f, "bad breakpoints: {}", msg),
            ContFunError::BudgetExhausted { budget } => {
                write!(f, "no small enough member pair within {} indices", budget)
            }
            ContFunError::NoEvaluator { name } => {
                write!(f, "code {} has no exact evaluator", name)
            }
            ContFunError::BreakpointMismatch { index } => {
                write!(f, "parts disagree at breakpoint {}", index)
            }
            ContFunError::UnevaluablePart { index } => {
                write!(f, "part {} cannot be evaluated for gluing", index)
            }
        }
    }
}

impl std::error::Error for ContFunError {}

/// Piecewise linear function on [0,1] with rational breakpoints. Breakpoints
/// run from 0 to 1 strictly increasing; between consecutive ones the function
/// interpolates linearly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinear {
    breaks: Vec<Rat>,
    values: Vec<Rat>,
}

impl PiecewiseLinear {
    pub fn new(breaks: Vec<Rat>, values: Vec<Rat>) -> Result<Self, ContFunError> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(ContFunError::BadBreakpoints(format!(
                "{} breakpoints against {} values",
                breaks.len(),
                values.len()
            )));
        }
        if !breaks[0].is_zero() {
            return Err(ContFunError::BadBreakpoints("must start at 0".into()));
        }
        if breaks[breaks.len() - 1] != Rat::from_integer(1.into()) {
            return Err(ContFunError::BadBreakpoints("must end at 1".into()));
        }
        for w in breaks.windows(2) {
            if w[0] >= w[1] {
                return Err(ContFunError::BadBreakpoints(format!(
                    "{} repeated or out of order",
                    fmt_rat(&w[1])
                )));
            }
        }
        Ok(PiecewiseLinear { breaks, values })
    }

    pub fn constant(c: Rat) -> Self {
        PiecewiseLinear {
            breaks: vec![Rat::zero(), Rat::from_integer(1.into())],
            values: vec![c.clone(), c],
        }
    }

    /// a + b*x on [0,1].
    pub fn affine(a: Rat, b: Rat) -> Self {
        PiecewiseLinear {
            breaks: vec![Rat::zero(), Rat::from_integer(1.into())],
            values: vec![a.clone(), a + b],
        }
    }

    pub fn breaks(&self) -> &[Rat] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    fn clamp01(x: &Rat) -> Rat {
        if x.is_negative() {
            Rat::zero()
        } else if *x > Rat::from_integer(1.into()) {
            Rat::from_integer(1.into())
        } else {
            x.clone()
        }
    }

    /// Exact value at x; arguments outside [0,1] are clamped to the nearest
    /// endpoint first.
    pub fn eval(&self, x: &Rat) -> Rat {
        let x = Self::clamp01(x);
        let mut i = 0;
        while i + 2 < self.breaks.len() && self.breaks[i + 1] <= x {
            i += 1;
        }
        let (b0, b1) = (&self.breaks[i], &self.breaks[i + 1]);
        let (v0, v1) = (&self.values[i], &self.values[i + 1]);
        v0 + (v1 - v0) * (&x - b0) / (b1 - b0)
    }

    /// Exact (min, max) over [lo, hi] ∩ [0,1]. The slice must be nonempty
    /// after clamping.
    pub fn range_on(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        let lo = Self::clamp01(lo);
        let hi = Self::clamp01(hi);
        let mut min = self.eval(&lo);
        let mut max = min.clone();
        for cand in std::iter::once(self.eval(&hi)).chain(
            self.breaks
                .iter()
                .zip(self.values.iter())
                .filter(|(b, _)| lo < **b && **b < hi)
                .map(|(_, v)| v.clone()),
        ) {
            if cand < min {
                min = cand.clone();
            }
            if cand > max {
                max = cand;
            }
        }
        (min, max)
    }

    /// Exact (min, max) over all of [0,1].
    pub fn bounds(&self) -> (Rat, Rat) {
        self.range_on(&Rat::zero(), &Rat::from_integer(1.into()))
    }

    /// Largest absolute slope of any segment.
    pub fn lipschitz(&self) -> Rat {
        let mut best = Rat::zero();
        for i in 0..self.breaks.len() - 1 {
            let slope =
                ((&self.values[i + 1] - &self.values[i]) / (&self.breaks[i + 1] - &self.breaks[i]))
                    .abs();
            if slope > best {
                best = slope;
            }
        }
        best
    }

    /// Pointwise sum. The result's breakpoints are the merged breakpoint
    /// sets, which is enough because a sum of piecewise linear functions is
    /// linear between merged breakpoints.
    pub fn add(&self, other: &PiecewiseLinear) -> PiecewiseLinear {
        let mut breaks: Vec<Rat> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .cloned()
            .collect();
        breaks.sort();
        breaks.dedup();
        let values = breaks
            .iter()
            .map(|b| self.eval(b) + other.eval(b))
            .collect();
        PiecewiseLinear { breaks, values }
    }

    pub fn scale(&self, c: &Rat) -> PiecewiseLinear {
        PiecewiseLinear {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise maximum. Breakpoints are the merged sets plus any interior
    /// crossing of the two graphs, so every output segment follows one of
    /// the two inputs outright.
    pub fn max(&self, other: &PiecewiseLinear) -> PiecewiseLinear {
        let mut merged: Vec<Rat> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .cloned()
            .collect();
        merged.sort();
        merged.dedup();
        let mut breaks: Vec<Rat> = Vec::new();
        for w in merged.windows(2) {
            breaks.push(w[0].clone());
            let d0 = self.eval(&w[0]) - other.eval(&w[0]);
            let d1 = self.eval(&w[1]) - other.eval(&w[1]);
            if (d0.is_positive() && d1.is_negative())
                || (d0.is_negative() && d1.is_positive())
            {
                let cross = &w[0] + (&w[1] - &w[0]) * &d0 / (&d0 - &d1);
                breaks.push(cross);
            }
        }
        breaks.push(Rat::from_integer(1.into()));
        let values = breaks
            .iter()
            .map(|b| {
                let f = self.eval(b);
                let g = other.eval(b);
                if f >= g { f } else { g }
            })
            .collect();
        PiecewiseLinear { breaks, values }
    }
}

/// The tent spike supported on a unit-interval code: zero outside the clamped
/// interval, rising with slope 1 from the left clamped endpoint and falling
/// with slope 1 to the right one. Its peak is half the clamped length, so a
/// spike never exceeds 1/2 and is 1-Lipschitz.
pub fn spike(u: &IntervalUI) -> PiecewiseLinear {
    let p = u.lo_clamped();
    let q = u.hi_clamped();
    let mid = (&p + &q) / Rat::from_integer(2.into());
    let peak = (&q - &p) / Rat::from_integer(2.into());
    let mut pts: Vec<(Rat, Rat)> = vec![
        (Rat::zero(), Rat::zero()),
        (p, Rat::zero()),
        (mid, peak),
        (q, Rat::zero()),
        (Rat::from_integer(1.into()), Rat::zero()),
    ];
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let (breaks, values) = pts.into_iter().unzip();
    PiecewiseLinear { breaks, values }
}

/// Sum of the spikes of a finite interval list, the n-th scaled by 2^(-n-2).
pub fn spike_sum(us: &[IntervalUI]) -> PiecewiseLinear {
    let mut acc = PiecewiseLinear::constant(Rat::zero());
    for (n, u) in us.iter().enumerate() {
        acc = acc.add(&spike(u).scale(&pow2(-(n as i64) - 2)));
    }
    acc
}

type MemberFn = Arc<dyn Fn(&IntervalUI, &IntervalR) -> bool + Send + Sync>;
type ExactFn = Arc<dyn Fn(&Rat, u32) -> (Rat, Rat) + Send + Sync>;

/// A coded continuous function on [0,1].
#[derive(Clone)]
pub struct ContCode {
    name: String,
    lipschitz: Rat,
    bounds: (Rat, Rat),
    member: MemberFn,
    exact: Option<ExactFn>,
    pl: Option<PiecewiseLinear>,
}

impl fmt::Debug for ContCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContCode")
            .field("name", &self.name)
            .field("lipschitz", &fmt_rat(&self.lipschitz))
            .finish()
    }
}

impl ContCode {
    pub fn from_piecewise(name: impl Into<String>, pl: PiecewiseLinear) -> Self {
        let bounds = pl.bounds();
        let lipschitz = pl.lipschitz();
        let member_pl = pl.clone();
        let member: MemberFn = Arc::new(move |u: &IntervalUI, v: &IntervalR| {
            let (min, max) = member_pl.range_on(u.raw_lo(), u.raw_hi());
            v.lo() < &min && &max < v.hi()
        });
        let exact_pl = pl.clone();
        let exact: ExactFn = Arc::new(move |x: &Rat, _prec: u32| (exact_pl.eval(x), Rat::zero()));
        ContCode {
            name: name.into(),
            lipschitz,
            bounds,
            member,
            exact: Some(exact),
            pl: Some(pl),
        }
    }

    /// A code given only by its membership test. `lipschitz` and `bounds`
    /// must be certified by the caller.
    pub fn custom(
        name: impl Into<String>,
        lipschitz: Rat,
        bounds: (Rat, Rat),
        member: MemberFn,
        exact: Option<ExactFn>,
    ) -> Self {
        ContCode {
            name: name.into(),
            lipschitz,
            bounds,
            member,
            exact,
            pl: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> &Rat {
        &self.lipschitz
    }

    /// Certified (min, max) of the function on [0,1].
    pub fn bounds(&self) -> &(Rat, Rat) {
        &self.bounds
    }

    pub fn piecewise(&self) -> Option<&PiecewiseLinear> {
        self.pl.as_ref()
    }

    /// Does the pair (U, V) certify that this function maps U ∩ [0,1] into V?
    pub fn member(&self, u: &IntervalUI, v: &IntervalR) -> bool {
        (self.member)(u, v)
    }

    /// A member pair that is always available: the whole unit interval mapped
    /// into a padded bounding box.
    pub fn fallback_pair(&self) -> (IntervalUI, IntervalR) {
        let one = Rat::from_integer(1.into());
        let u = IntervalUI::new(-one.clone(), Rat::from_integer(2.into()))
            .expect("(-1, 2) covers the unit interval");
        let v = IntervalR::new(&self.bounds.0 - &one, &self.bounds.1 + &one)
            .expect("padded bounds are a proper interval");
        (u, v)
    }

    /// Total enumeration of member pairs. Index i is unpacked into four
    /// rational indices; when the decoded quadruple fails to form a member
    /// pair the fallback pair is produced, so every index yields a member and
    /// every member pair built from rationals appears at some index.
    pub fn pairs(&self, i: u64) -> (IntervalUI, IntervalR) {
        let (ab, cd) = unpair_cantor(&i.into());
        let (a, b) = unpair_cantor(&ab);
        let (c, d) = unpair_cantor(&cd);
        let to_u64 = |n: &crate::codings::Nat| -> Option<u64> {
            num_traits::ToPrimitive::to_u64(n)
        };
        let quad = (to_u64(&a), to_u64(&b), to_u64(&c), to_u64(&d));
        if let (Some(a), Some(b), Some(c), Some(d)) = quad {
            let u = IntervalUI::new(enum_rational(a), enum_rational(b));
            let v = IntervalR::new(enum_rational(c), enum_rational(d));
            if let (Ok(u), Ok(v)) = (u, v) {
                if self.member(&u, &v) {
                    return (u, v);
                }
            }
        }
        self.fallback_pair()
    }

    /// Exact value with an error bound at most 2^(-prec), when the code
    /// carries an evaluator.
    pub fn exact_at(&self, x: &Rat, prec: u32) -> Option<(Rat, Rat)> {
        self.exact.as_ref().map(|e| e(x, prec))
    }

    /// A member pair (U, V) with x in U and V of width at most 2^(-n),
    /// centred on the computed value. Requires the exact evaluator.
    pub fn witness(&self, x: &Rat, n: u32) -> Option<(IntervalUI, IntervalR)> {
        let (v, err) = self.exact_at(x, n + 3)?;
        // Pick the input radius so Lipschitz drift plus evaluator error stays
        // strictly inside the output interval's half width.
        let k = if self.lipschitz.is_zero() {
            1
        } else {
            let l = ceil_log2(&self.lipschitz);
            (n as i64 + 4 + l).max(1)
        };
        let r_in = pow2(-k + 1);
        let r_out = pow2(-(n as i64) - 1);
        debug_assert!(&self.lipschitz * &r_in + &err <= pow2(-(n as i64) - 2));
        let u = IntervalUI::new(x - &r_in, x + &r_in).ok()?;
        let vi = IntervalR::new(&v - &r_out, &v + &r_out).expect("positive radius");
        if self.member(&u, &vi) {
            Some((u, vi))
        } else {
            None
        }
    }

    /// Value at a coded real to within 2^(-prec): through the exact
    /// evaluator at a fine enough rational stand-in when present, otherwise
    /// by scanning the pair enumeration for a certified narrow member pair
    /// and returning its output midpoint. The scan never returns a wrong
    /// value; it can only run out of budget.
    pub fn eval_at(&self, x: &FastReal, prec: u32, budget: u64) -> Result<Rat, ContFunError> {
        if self.exact.is_some() {
            let q = match x.as_rational() {
                Some(q) => q.clone(),
                None => x.approx(self.modulus(prec + 1)),
            };
            let (v, _err) = self.exact_at(&q, prec + 1).expect("evaluator present");
            return Ok(v);
        }
        let width = pow2(-(prec as i64));
        for i in 0..budget {
            let (u, v) = self.pairs(i);
            if v.length() <= width && u.member_budgeted(x, prec + 8) == MemberVerdict::In {
                return Ok(v.midpoint());
            }
        }
        Err(ContFunError::BudgetExhausted { budget })
    }

    /// A modulus of uniform continuity: |x - y| <= 2^(-modulus(n)) forces
    /// |f(x) - f(y)| <= 2^(-n).
    pub fn modulus(&self, n: u32) -> u32 {
        if self.lipschitz.is_zero() {
            return 0;
        }
        let h = n as i64 + ceil_log2(&self.lipschitz) + 1;
        h.max(0) as u32
    }
}

pub fn mk_const(c: Rat) -> ContCode {
    let name = format!("const {}", fmt_rat(&c));
    ContCode::from_piecewise(name, PiecewiseLinear::constant(c))
}

/// The affine map m x + c restricted to [0,1]; slope first.
pub fn mk_linear(m: Rat, c: Rat) -> ContCode {
    let name = format!("{} x + {}", fmt_rat(&m), fmt_rat(&c));
    ContCode::from_piecewise(name, PiecewiseLinear::affine(c, m))
}

/// Glue one code per window of a breakpoint grid 0 = d_0 < ... < d_k = 1:
/// the result agrees with parts[i] on [d_i, d_{i+1}]. Adjacent parts must
/// take the same value where windows meet; the check runs through the exact
/// evaluators, so it is sharp for the built-in shapes.
pub fn mk_piecewise(breaks: Vec<Rat>, parts: Vec<ContCode>) -> Result<ContCode, ContFunError> {
    if breaks.len() != parts.len() + 1 {
        return Err(ContFunError::BadBreakpoints(format!(
            "{} breakpoints need {} parts, got {}",
            breaks.len(),
            breaks.len() - 1,
            parts.len()
        )));
    }
    if breaks.first() != Some(&Rat::zero())
        || breaks.last() != Some(&Rat::from_integer(1.into()))
        || breaks.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(ContFunError::BadBreakpoints(
            "grid must run strictly from 0 to 1".into(),
        ));
    }
    let eval_prec = 66u32;
    for (i, d) in breaks[1..breaks.len() - 1].iter().enumerate() {
        let (a, ea) = parts[i]
            .exact_at(d, eval_prec)
            .ok_or_else(|| ContFunError::UnevaluablePart { index: i })?;
        let (b, eb) = parts[i + 1]
            .exact_at(d, eval_prec)
            .ok_or_else(|| ContFunError::UnevaluablePart { index: i + 1 })?;
        if (a - b).abs() > ea + eb {
            return Err(ContFunError::BreakpointMismatch { index: i + 1 });
        }
    }
    // Assemble the glued graph; the built-in parts are all piecewise linear,
    // so the restriction to each window is read off the part's vertices.
    let mut pts: Vec<(Rat, Rat)> = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let pl = part
            .piecewise()
            .ok_or(ContFunError::UnevaluablePart { index: i })?;
        let (lo, hi) = (&breaks[i], &breaks[i + 1]);
        pts.push((lo.clone(), pl.eval(lo)));
        for b in pl.breaks().iter().filter(|b| lo < *b && *b < hi) {
            pts.push((b.clone(), pl.eval(b)));
        }
    }
    let last = parts.last().expect("at least one part");
    let one = Rat::from_integer(1.into());
    pts.push((
        one.clone(),
        last.piecewise().expect("checked above").eval(&one),
    ));
    pts.dedup_by(|a, b| a.0 == b.0);
    let (bks, vals) = pts.into_iter().unzip();
    let name = format!("piecewise of {} parts", parts.len());
    Ok(ContCode::from_piecewise(name, PiecewiseLinear::new(bks, vals)?))
}

pub fn mk_spike(u: &IntervalUI) -> ContCode {
    ContCode::from_piecewise(format!("spike on {}", u), spike(u))
}

/// The weighted spike sum of a finite interval list as a code.
pub fn mk_scaled_sum(name: impl Into<String>, us: &[IntervalUI]) -> ContCode {
    ContCode::from_piecewise(name, spike_sum(us))
}

/// Data for a weighted series of codes: term and weight enumerators, a
/// uniform bound on every term, a monotone bound on the weighted tail mass,
/// and a certified Lipschitz constant for the whole series.
#[derive(Clone)]
pub struct SeriesSpec {
    pub terms: Arc<dyn Fn(u64) -> ContCode + Send + Sync>,
    pub weights: Arc<dyn Fn(u64) -> Rat + Send + Sync>,
    pub uniform_bound: Rat,
    pub tail_bound: Arc<dyn Fn(u32) -> Rat + Send + Sync>,
    pub lipschitz: Rat,
}

/// A possibly infinite weighted sum as a code. Evaluation truncates where
/// the tail bound drops under half the precision target and evaluates the
/// finite head; membership truncates at a fixed depth and pads the summed
/// per-term ranges by the remaining tail, which is sound but deliberately
/// conservative. Weights must lie in [0,1] and every term must carry an
/// exact evaluator.
pub fn mk_series(name: impl Into<String>, spec: SeriesSpec) -> ContCode {
    const MEMBER_DEPTH: u32 = 64;
    let bound = (spec.tail_bound)(0);
    let bounds = (-&bound, bound);

    let s_exact = spec.clone();
    let exact: ExactFn = Arc::new(move |x: &Rat, prec: u32| {
        let half = pow2(-(prec as i64) - 1);
        let n_terms = (0..=4096u32)
            .find(|n| (s_exact.tail_bound)(*n) <= half)
            .expect("tail bound must reach any positive target");
        // Split the other half of the budget across the head terms.
        let per_term = prec + 2 + 64 - (n_terms as u64 + 1).leading_zeros();
        let mut acc = Rat::zero();
        let mut err = (s_exact.tail_bound)(n_terms);
        for n in 0..n_terms as u64 {
            let w = (s_exact.weights)(n);
            let (v, e) = (s_exact.terms)(n)
                .exact_at(x, per_term)
                .expect("series terms must carry evaluators");
            acc += &w * v;
            err += &w * e;
        }
        (acc, err)
    });

    let s_member = spec.clone();
    let member: MemberFn = Arc::new(move |u: &IntervalUI, v: &IntervalR| {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for n in 0..MEMBER_DEPTH as u64 {
            let w = (s_member.weights)(n);
            let t = (s_member.terms)(n);
            let (tlo, thi) = match t.piecewise() {
                Some(pl) => pl.range_on(u.raw_lo(), u.raw_hi()),
                None => t.bounds().clone(),
            };
            lo += &w * tlo;
            hi += &w * thi;
        }
        let pad = (s_member.tail_bound)(MEMBER_DEPTH);
        v.lo() < &(lo - &pad) && (hi + &pad) < *v.hi()
    });

    ContCode {
        name: name.into(),
        lipschitz: spec.lipschitz.clone(),
        bounds,
        member,
        exact: Some(exact),
        pl: None,
    }
}

/// The canonical series instance: spikes over an interval enumeration with
/// weights 2^(-n-2), hence tail mass under 2^(-n-2) from the per-spike
/// bound 1/2, and total Lipschitz constant 1/2.
pub fn mk_spike_series(
    name: impl Into<String>,
    intervals: Arc<dyn Fn(u64) -> Option<IntervalUI> + Send + Sync>,
) -> ContCode {
    let terms: Arc<dyn Fn(u64) -> ContCode + Send + Sync> = Arc::new(move |n| {
        match intervals(n) {
            Some(u) => mk_spike(&u),
            None => mk_const(Rat::zero()),
        }
    });
    mk_series(
        name,
        SeriesSpec {
            terms,
            weights: Arc::new(|n| pow2(-(n as i64) - 2)),
            uniform_bound: Rat::new(1.into(), 2.into()),
            tail_bound: Arc::new(|n| pow2(-(n as i64) - 2)),
            lipschitz: Rat::new(1.into(), 2.into()),
        },
    )
}

/// Approximation to the spike sum of `us` at a coded real, computed only from
/// the real's e-th rational approximant. The result is within 2^(-e) of the
/// true value: the sum is (1/2)-Lipschitz, so moving from the approximant to
/// the real costs at most 2^(-e-1), and for an infinite interval list the
/// terms past index e would contribute under 2^(-e-2) more.
pub fn spike_sum_approx(us: &[IntervalUI], x: &FastReal, e: u32) -> Rat {
    let q = x.approx(e);
    let mut acc = Rat::zero();
    for (n, u) in us.iter().enumerate().take(e as usize + 1) {
        acc += spike(u).eval(&q) * pow2(-(n as i64) - 2);
    }
    acc
}

/// Find an interval of the list containing the coded real, by watching the
/// spike sum approximants. When the stage-k approximant clears the threshold
/// (3k+1) 2^(-k-1), some single term at or below k must exceed (3k+1) 2^(-k),
/// and that term's interval provably contains the real. Returns the interval
/// index and the stage, or None when no stage up to max_e clears the
/// threshold (as happens whenever the real is outside the union).
pub fn locate_covering_interval(
    us: &[IntervalUI],
    x: &FastReal,
    max_e: u32,
) -> Option<(usize, u32)> {
    for k in 1..=max_e {
        let y = spike_sum_approx(us, x, k);
        let threshold = Rat::from_integer((3 * k as i64 + 1).into()) * pow2(-(k as i64) - 1);
        if y >= threshold {
            let q = x.approx(k);
            let term_threshold = Rat::from_integer((3 * k as i64 + 1).into()) * pow2(-(k as i64));
            // Counting argument: if every term among indices <= k sat below
            // term_threshold, the weighted sum would sit strictly below the
            // stage threshold just cleared.
            let m = us
                .iter()
                .enumerate()
                .take(k as usize + 1)
                .find(|(_, u)| spike(u).eval(&q) > term_threshold)
                .map(|(m, _)| m)
                .expect("a large term exists when the partial sum clears the threshold");
            return Some((m, k));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codings::{rat, rat_int};
    use crate::exactreal::sqrt2_over_2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ui(p: Rat, q: Rat) -> IntervalUI {
        IntervalUI::new(p, q).unwrap()
    }

    fn rand_rat01(rng: &mut ChaCha8Rng) -> Rat {
        let den = rng.gen_range(1..200i64);
        let num = rng.gen_range(0..=den);
        rat(num, den)
    }

    #[test]
    fn piecewise_eval_matches_interpolation() {
        let pl = PiecewiseLinear::new(
            vec![rat_int(0), rat(1, 4), rat(1, 2), rat_int(1)],
            vec![rat_int(1), rat_int(0), rat(1, 2), rat(1, 2)],
        )
        .unwrap();
        assert_eq!(pl.eval(&rat(1, 8)), rat(1, 2));
        assert_eq!(pl.eval(&rat(3, 8)), rat(1, 4));
        assert_eq!(pl.eval(&rat(3, 4)), rat(1, 2));
        assert_eq!(pl.eval(&rat_int(0)), rat_int(1));
        assert_eq!(pl.eval(&rat_int(1)), rat(1, 2));
        // Clamping outside the domain.
        assert_eq!(pl.eval(&rat_int(-2)), rat_int(1));
        assert_eq!(pl.eval(&rat_int(3)), rat(1, 2));
        assert_eq!(pl.lipschitz(), rat_int(4));
        assert_eq!(pl.bounds(), (rat_int(0), rat_int(1)));
    }

    #[test]
    fn piecewise_rejects_malformed_breakpoints() {
        assert!(PiecewiseLinear::new(vec![rat_int(0)], vec![rat_int(0)]).is_err());
        assert!(
            PiecewiseLinear::new(vec![rat(1, 2), rat_int(1)], vec![rat_int(0), rat_int(0)])
                .is_err()
        );
        assert!(
            PiecewiseLinear::new(vec![rat_int(0), rat(1, 2)], vec![rat_int(0), rat_int(0)])
                .is_err()
        );
        assert!(PiecewiseLinear::new(
            vec![rat_int(0), rat(1, 2), rat(1, 2), rat_int(1)],
            vec![rat_int(0); 4]
        )
        .is_err());
    }

    #[test]
    fn range_is_exhaustive_on_random_slices() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        let pl = PiecewiseLinear::new(
            vec![rat_int(0), rat(1, 3), rat(2, 3), rat_int(1)],
            vec![rat_int(0), rat_int(2), rat_int(-1), rat_int(1)],
        )
        .unwrap();
        for _ in 0..200 {
            let mut a = rand_rat01(&mut rng);
            let mut b = rand_rat01(&mut rng);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            if a == b {
                continue;
            }
            let (min, max) = pl.range_on(&a, &b);
            // Dense sampling stays inside the claimed range.
            for t in 0..=16 {
                let x = &a + (&b - &a) * rat(t, 16);
                let v = pl.eval(&x);
                assert!(min <= v && v <= max, "sample escapes range");
            }
            // The claimed extremes are attained.
            let mut seen_min = false;
            let mut seen_max = false;
            let mut cands = vec![a.clone(), b.clone()];
            cands.extend(pl.breaks().iter().filter(|p| a < **p && **p < b).cloned());
            for x in cands {
                let v = pl.eval(&x);
                seen_min |= v == min;
                seen_max |= v == max;
            }
            assert!(seen_min && seen_max);
        }
    }

    #[test]
    fn sum_and_scale_agree_with_pointwise_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        let f = PiecewiseLinear::new(
            vec![rat_int(0), rat(2, 5), rat_int(1)],
            vec![rat_int(1), rat_int(-1), rat_int(0)],
        )
        .unwrap();
        let g = spike(&ui(rat(1, 4), rat(3, 4)));
        let h = f.add(&g.scale(&rat_int(3)));
        for _ in 0..100 {
            let x = rand_rat01(&mut rng);
            assert_eq!(h.eval(&x), f.eval(&x) + g.eval(&x) * rat_int(3));
        }
    }

    #[test]
    fn spike_shape_and_clipping() {
        let s = spike(&ui(rat(1, 4), rat(3, 4)));
        assert_eq!(s.eval(&rat(1, 4)), rat_int(0));
        assert_eq!(s.eval(&rat(1, 2)), rat(1, 4));
        assert_eq!(s.eval(&rat(3, 8)), rat(1, 8));
        assert_eq!(s.eval(&rat(9, 10)), rat_int(0));
        assert_eq!(s.lipschitz(), rat_int(1));

        // Clipped on the left: the support starts at 0.
        let left = spike(&ui(rat(-1, 8), rat(1, 8)));
        assert_eq!(left.eval(&rat_int(0)), rat_int(0));
        assert_eq!(left.eval(&rat(1, 16)), rat(1, 16));
        assert_eq!(left.bounds().1, rat(1, 16));

        // The whole interval: peak 1/2 at the midpoint.
        let full = spike(&ui(rat(-1, 2), rat(3, 2)));
        assert_eq!(full.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(full.bounds(), (rat_int(0), rat(1, 2)));
    }

    #[test]
    fn spike_sum_stays_small_and_slow() {
        let us = vec![
            ui(rat(-1, 4), rat(1, 4)),
            ui(rat(1, 8), rat(5, 8)),
            ui(rat(1, 2), rat(5, 4)),
            ui(rat(1, 3), rat(2, 3)),
        ];
        let s = spike_sum(&us);
        assert!(s.lipschitz() < rat(1, 2));
        let (lo, hi) = s.bounds();
        assert!(lo >= rat_int(0));
        assert!(hi < rat(1, 4));
        // Each point value is the evident term sum.
        let x = rat(1, 2);
        let expect: Rat = us
            .iter()
            .enumerate()
            .map(|(n, u)| spike(u).eval(&x) * pow2(-(n as i64) - 2))
            .sum();
        assert_eq!(s.eval(&x), expect);
    }

    #[test]
    fn member_checks_value_ranges() {
        let f = mk_linear(rat_int(1), rat_int(0));
        let u = ui(rat(1, 4), rat(1, 2));
        assert!(f.member(&u, &IntervalR::new(rat_int(0), rat_int(1)).unwrap()));
        // Range of x on [1/4, 1/2] is not strictly inside (3/10, 1).
        assert!(!f.member(&u, &IntervalR::new(rat(3, 10), rat_int(1)).unwrap()));
        // Clamping matters: raw left endpoint -1 but values only from 0 on.
        let clipped = ui(rat_int(-1), rat(1, 2));
        assert!(f.member(
            &clipped,
            &IntervalR::new(rat(-1, 8), rat(5, 8)).unwrap()
        ));
        assert!(!f.member(
            &clipped,
            &IntervalR::new(rat(1, 8), rat(5, 8)).unwrap()
        ));
    }

    #[test]
    fn pair_enumeration_is_total_and_fair() {
        let f = mk_linear(rat(1, 4), rat(1, 2));
        for i in 0..400u64 {
            let (u, v) = f.pairs(i);
            assert!(f.member(&u, &v), "index {} gave a non-member pair", i);
        }
        // Fairness: a handpicked member quadruple appears at its code.
        let find = |target: &Rat| -> u64 {
            (0..50_000u64)
                .find(|i| &enum_rational(*i) == target)
                .expect("enumeration reaches every rational")
        };
        let (a, b, c, d) = (rat(1, 4), rat(1, 2), rat(1, 2), rat_int(1));
        let u = ui(a.clone(), b.clone());
        let v = IntervalR::new(c.clone(), d.clone()).unwrap();
        assert!(f.member(&u, &v));
        let code = crate::codings::pair_cantor(
            &crate::codings::pair_cantor(&find(&a).into(), &find(&b).into()),
            &crate::codings::pair_cantor(&find(&c).into(), &find(&d).into()),
        );
        let code = num_traits::ToPrimitive::to_u64(&code).expect("small code");
        assert_eq!(f.pairs(code), (u, v));
        // A quadruple that fails membership falls back.
        let bad = crate::codings::pair_cantor(
            &crate::codings::pair_cantor(&find(&rat_int(0)).into(), &find(&rat_int(1)).into()),
            &crate::codings::pair_cantor(
                &find(&rat(1, 2)).into(),
                &find(&rat(9, 16)).into(),
            ),
        );
        let bad = num_traits::ToPrimitive::to_u64(&bad).expect("small code");
        assert_eq!(f.pairs(bad), f.fallback_pair());
    }

    #[test]
    fn witness_pairs_are_members_with_narrow_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        let us = vec![ui(rat(-1, 8), rat(3, 8)), ui(rat(1, 4), rat(7, 8))];
        let codes = vec![
            mk_linear(rat(-2, 1), rat(1, 3)),
            mk_scaled_sum("two spikes", &us),
            mk_const(rat(5, 7)),
        ];
        for f in &codes {
            for _ in 0..50 {
                let x = rand_rat01(&mut rng);
                let n = rng.gen_range(0..20u32);
                let (u, v) = f.witness(&x, n).expect("built-ins carry evaluators");
                assert!(u.contains_rat(&x));
                assert!(f.member(&u, &v));
                assert!(v.length() <= pow2(-(n as i64)));
                let exact = f.piecewise().unwrap().eval(&x);
                assert_eq!(v.midpoint(), exact);
            }
        }
    }

    #[test]
    fn eval_through_pairs_when_no_evaluator() {
        // Same membership test as a constant code, but without the evaluator,
        // so evaluation must go through the enumeration.
        let model = mk_const(rat(1, 2));
        let member = {
            let m = model.piecewise().unwrap().clone();
            Arc::new(move |u: &IntervalUI, v: &IntervalR| {
                let (min, max) = m.range_on(u.raw_lo(), u.raw_hi());
                v.lo() < &min && &max < v.hi()
            }) as MemberFn
        };
        let f = ContCode::custom(
            "opaque half",
            rat_int(0),
            (rat(1, 2), rat(1, 2)),
            member,
            None,
        );
        let x = FastReal::from_rational(rat(1, 3));
        match f.eval_at(&x, 0, 200_000) {
            Ok(v) => assert!((v - rat(1, 2)).abs() <= rat_int(1)),
            Err(e) => panic!("expected a wide pair within budget: {}", e),
        }
        assert_eq!(
            f.eval_at(&x, 30, 50),
            Err(ContFunError::BudgetExhausted { budget: 50 })
        );
    }

    #[test]
    fn modulus_controls_oscillation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let us = vec![ui(rat(-1, 4), rat(1, 2)), ui(rat(3, 8), rat(9, 8))];
        let codes = vec![mk_linear(rat_int(5), rat_int(0)), mk_scaled_sum("s", &us)];
        for f in &codes {
            for n in [0u32, 3, 8] {
                let h = f.modulus(n);
                let step = pow2(-(h as i64));
                for _ in 0..50 {
                    let x = rand_rat01(&mut rng);
                    let num = rng.gen_range(-8i64..=8);
                    let y = &x + rat(num, 8) * &step;
                    let fx = f.piecewise().unwrap().eval(&x);
                    let fy = f.piecewise().unwrap().eval(&y);
                    assert!((fx - fy).abs() <= pow2(-(n as i64)));
                }
            }
        }
        assert_eq!(mk_const(rat(2, 3)).modulus(12), 0);
    }

    #[test]
    fn spike_sum_approx_converges_at_coded_reals() {
        let us = vec![
            ui(rat(-1, 8), rat(3, 8)),
            ui(rat(1, 4), rat(3, 4)),
            ui(rat(5, 8), rat(9, 8)),
        ];
        let s = spike_sum(&us);
        // Rational point wrapped as a real: compare against the exact value.
        let x = FastReal::from_rational(rat(2, 7));
        let exact = s.eval(&rat(2, 7));
        for e in 0..14u32 {
            let y = spike_sum_approx(&us, &x, e);
            assert!((y - &exact).abs() <= pow2(-(e as i64)));
        }
        // Irrational point: compare against a much finer reference stage.
        let r = sqrt2_over_2();
        let reference = s.eval(&r.approx(40));
        for e in 0..20u32 {
            let y = spike_sum_approx(&us, &r, e);
            assert!((y - &reference).abs() <= pow2(-(e as i64)) + pow2(-38));
        }
    }

    #[test]
    fn locating_a_covering_interval() {
        let us = vec![
            ui(rat(-1, 8), rat(3, 8)),
            ui(rat(1, 4), rat(5, 8)),
            ui(rat(1, 2), rat(7, 8)),
        ];
        let x = FastReal::from_rational(rat(1, 2));
        let (m, e) = locate_covering_interval(&us, &x, 40).expect("1/2 is covered");
        assert!(e >= 1);
        assert!(us[m].contains_rat(&rat(1, 2)), "claimed interval misses the point");

        let r = sqrt2_over_2();
        let (m, _) = locate_covering_interval(&us, &r, 40).expect("sqrt2/2 is covered");
        // 0.70710... lies only in the third interval.
        assert_eq!(m, 2);

        // A point outside the union never clears the threshold.
        let out = FastReal::from_rational(rat(15, 16));
        assert_eq!(locate_covering_interval(&us, &out, 24), None);

        // Endpoints of the union are not located either.
        let edge = FastReal::from_rational(rat(7, 8));
        assert_eq!(locate_covering_interval(&us, &edge, 24), None);
    }

    #[test]
    fn gluing_parts_on_a_grid() {
        // A tent out of two slopes.
        let tent = mk_piecewise(
            vec![rat_int(0), rat(1, 2), rat_int(1)],
            vec![mk_linear(rat_int(2), rat_int(0)), mk_linear(rat_int(-2), rat_int(2))],
        )
        .expect("values agree at the seam");
        let pl = tent.piecewise().unwrap();
        assert_eq!(pl.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(pl.eval(&rat(1, 2)), rat_int(1));
        assert_eq!(pl.eval(&rat(3, 4)), rat(1, 2));
        assert_eq!(*tent.lipschitz(), rat_int(2));

        // Parts keep their own interior breakpoints.
        let bumpy = mk_piecewise(
            vec![rat_int(0), rat(1, 2), rat_int(1)],
            vec![
                mk_scaled_sum("left bump", &[ui(rat(1, 8), rat(3, 8))]),
                mk_const(rat_int(0)),
            ],
        )
        .unwrap();
        let pl = bumpy.piecewise().unwrap();
        assert_eq!(pl.eval(&rat(1, 4)), rat(1, 32));
        assert_eq!(pl.eval(&rat(3, 4)), rat_int(0));

        // A jump at the seam is refused, naming the right-hand part.
        let err = mk_piecewise(
            vec![rat_int(0), rat(1, 2), rat_int(1)],
            vec![mk_linear(rat_int(1), rat_int(0)), mk_linear(rat_int(1), rat(1, 3))],
        )
        .unwrap_err();
        assert_eq!(err, ContFunError::BreakpointMismatch { index: 1 });

        // Counting and grid mistakes are refused up front.
        assert!(matches!(
            mk_piecewise(vec![rat_int(0), rat_int(1)], vec![mk_const(rat_int(0)); 2]),
            Err(ContFunError::BadBreakpoints(_))
        ));
        assert!(matches!(
            mk_piecewise(
                vec![rat_int(0), rat(2, 3), rat(1, 3), rat_int(1)],
                vec![mk_const(rat_int(0)); 3]
            ),
            Err(ContFunError::BadBreakpoints(_))
        ));

        // A part with no evaluator cannot be glued.
        let opaque = ContCode::custom(
            "opaque",
            rat_int(0),
            (rat_int(0), rat_int(0)),
            Arc::new(|_: &IntervalUI, _: &IntervalR| false) as MemberFn,
            None,
        );
        assert_eq!(
            mk_piecewise(vec![rat_int(0), rat_int(1)], vec![opaque]).unwrap_err(),
            ContFunError::UnevaluablePart { index: 0 }
        );
    }

    #[test]
    fn enumerated_pairs_close_under_shrinking_and_widening() {
        // Three consistency facts about the pair enumeration, checked over
        // its initial segment: output intervals of overlapping input
        // intervals overlap; membership survives shrinking the input side;
        // membership survives widening the output side.
        let spikes = [ui(rat(-1, 8), rat(3, 8)), ui(rat(1, 4), rat(7, 8))];
        let codes = vec![
            mk_linear(rat(1, 2), rat(1, 4)),
            mk_scaled_sum("two spikes", &spikes),
        ];
        for f in &codes {
            let pairs: Vec<_> = (0..200).map(|i| f.pairs(i)).collect();
            for (ui_, vi) in &pairs {
                for (uj, vj) in &pairs {
                    if ui_.intersects(uj) {
                        assert!(vi.intersects(vj), "overlap lost on the output side");
                    }
                    if uj.contained_in(ui_) {
                        assert!(f.member(uj, vi), "membership lost on a shrink");
                    }
                    if vi.contained_in(vj) {
                        assert!(f.member(ui_, vj), "membership lost on a widen");
                    }
                }
            }
        }
        // The same closure facts for the truncating series membership.
        let list = spikes.to_vec();
        let series = mk_spike_series(
            "series of two spikes",
            Arc::new(move |n| list.get(n as usize).cloned()),
        );
        let pairs: Vec<_> = (0..60).map(|i| series.pairs(i)).collect();
        for (ui_, vi) in &pairs {
            for (uj, vj) in &pairs {
                if ui_.intersects(uj) {
                    assert!(vi.intersects(vj));
                }
                if uj.contained_in(ui_) {
                    assert!(series.member(uj, vi));
                }
                if vi.contained_in(vj) {
                    assert!(series.member(ui_, vj));
                }
            }
        }
    }

    #[test]
    fn series_tracks_its_finite_truncations() {
        // A series fed from a finite list evaluates to the finite sum,
        // within its reported error.
        let us = vec![
            ui(rat(-1, 8), rat(3, 8)),
            ui(rat(1, 4), rat(3, 4)),
            ui(rat(5, 8), rat(9, 8)),
        ];
        let finite = spike_sum(&us);
        let held = us.clone();
        let series = mk_spike_series(
            "three spikes as a series",
            Arc::new(move |n| held.get(n as usize).cloned()),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        for _ in 0..40 {
            let x = rand_rat01(&mut rng);
            for prec in [4u32, 10, 30] {
                let (v, err) = series.exact_at(&x, prec).unwrap();
                assert!(err <= pow2(-(prec as i64)));
                assert!((v - finite.eval(&x)).abs() <= err);
            }
        }
        // A genuinely infinite enumeration still answers at every precision,
        // consistently across precisions.
        let dense = mk_spike_series(
            "spikes around every rational",
            Arc::new(|n| {
                let q = crate::codings::sb01_rational(&n.into());
                let r = pow2(-(n as i64) - 3);
                IntervalUI::new(&q - &r, &q + &r).ok()
            }),
        );
        let x = rat(3, 7);
        let (coarse, ce) = dense.exact_at(&x, 6).unwrap();
        let (fine, fe) = dense.exact_at(&x, 24).unwrap();
        assert!((coarse - fine).abs() <= ce + fe);
        // And through the real-number front end.
        let v = dense
            .eval_at(&FastReal::from_rational(x.clone()), 10, 0)
            .unwrap();
        let (reference, re) = dense.exact_at(&x, 12).unwrap();
        assert!((v - reference).abs() <= pow2(-10) + re);
    }

    #[test]
    fn pointwise_maximum_matches_segmentwise_winner() {
        // Identity against constant 1/2: the crossing at 1/2 must appear.
        let id = PiecewiseLinear::affine(rat(0, 1), rat(1, 1));
        let half = PiecewiseLinear::constant(rat(1, 2));
        let m = id.max(&half);
        assert!(m.breaks().contains(&rat(1, 2)));
        assert_eq!(m.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(m.eval(&rat(3, 4)), rat(3, 4));
        // Two overlapping tents, contrasted on a fine grid.
        let a = spike(&ui(rat(0, 1), rat(5, 8)));
        let b = spike(&ui(rat(3, 8), rat(1, 1)));
        let m = a.max(&b);
        for k in 0..=64u64 {
            let x = rat(k as i64, 64);
            let fa = a.eval(&x);
            let fb = b.eval(&x);
            let want = if fa >= fb { fa } else { fb };
            assert_eq!(m.eval(&x), want);
        }
    }
}
