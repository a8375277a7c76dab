//! Codes for functions of finite Baire class on the unit interval.
//!
//! Rank 0 wraps a continuous-function code. Rank n+1 is a sequence of rank-n
//! codes converging pointwise; the code may carry a convergence modulus,
//! which at a point x and target 2^(-n) names an index past which all terms
//! agree at x to within 2^(-n). Everything downstream (enclosures, budgeted
//! comparisons, gauge checks) flows through that modulus, so a code without
//! one supports only the operations that never need the limit.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::codings::{pow2, Rat};
use crate::contfun::{ContCode, PiecewiseLinear};
use crate::exactreal::{FastReal, TagPoint};

type CauchyFn = Arc<dyn Fn(&TagPoint, u32) -> Option<u32> + Send + Sync>;
type SeqFn = Arc<dyn Fn(u64) -> BaireCode + Send + Sync>;

#[derive(Clone)]
pub enum BaireBody {
    Base(ContCode),
    Seq(SeqFn),
}

#[derive(Clone)]
pub struct BaireCode {
    name: String,
    rank: u32,
    body: BaireBody,
    cauchy: Option<CauchyFn>,
}

impl fmt::Debug for BaireCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaireCode")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .finish()
    }
}

/// Verdict of a budgeted comparison f(x) >= y. The claim is refutable but
/// not confirmable: a refutation is a stage whose certified upper bound on
/// f(x) dips under a rational witness that itself sits strictly under y,
/// while survival to the budget proves nothing final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeqVerdict {
    GeqSoFar { budget: u32 },
    RefutedBelow { stage: u32, upper: Rat, witness: Rat },
}

impl BaireCode {
    pub fn base(code: ContCode) -> Self {
        BaireCode {
            name: code.name().to_string(),
            rank: 0,
            body: BaireBody::Base(code),
            cauchy: None,
        }
    }

    /// A rank n+1 code from an index map into rank-n codes.
    pub fn seq(name: impl Into<String>, rank: u32, seq: SeqFn, cauchy: Option<CauchyFn>) -> Self {
        assert!(rank >= 1, "sequence codes start at rank 1");
        BaireCode {
            name: name.into(),
            rank,
            body: BaireBody::Seq(seq),
            cauchy,
        }
    }

    /// Reinterpret a code as the constant sequence one rank up.
    pub fn lift(self) -> Self {
        let name = self.name.clone();
        let rank = self.rank + 1;
        let inner = self.clone();
        BaireCode {
            name,
            rank,
            body: BaireBody::Seq(Arc::new(move |_| inner.clone())),
            cauchy: Some(Arc::new(|_, _| Some(0))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn as_base(&self) -> Option<&ContCode> {
        match &self.body {
            BaireBody::Base(c) => Some(c),
            BaireBody::Seq(_) => None,
        }
    }

    pub fn seq_at(&self, i: u64) -> Option<BaireCode> {
        match &self.body {
            BaireBody::Base(_) => None,
            BaireBody::Seq(s) => Some(s(i)),
        }
    }

    /// Index past which terms at x stay within 2^(-n) of each other. Rank 0
    /// is its own limit. None means the code has no modulus, or its internal
    /// search could not settle the point.
    pub fn cauchy_modulus(&self, x: &TagPoint, n: u32) -> Option<u32> {
        match &self.body {
            BaireBody::Base(_) => Some(0),
            BaireBody::Seq(_) => self.cauchy.as_ref().and_then(|c| c(x, n)),
        }
    }

    /// A rational interval of width at most 2^(-k) certified to contain the
    /// value at x. For a sequence code: land past the modulus, enclose that
    /// term finer, pad by the convergence error.
    pub fn enclose(&self, x: &TagPoint, k: u32) -> Option<(Rat, Rat)> {
        match &self.body {
            BaireBody::Base(c) => match x {
                TagPoint::ExactRat(q) => {
                    let (v, err) = c.exact_at(q, k + 1)?;
                    Some((&v - &err, &v + &err))
                }
                TagPoint::CertIrrational { real, .. } => {
                    let m = c.modulus(k + 2);
                    let q = real.approx(m);
                    let (v, err) = c.exact_at(&q, k + 2)?;
                    let pad = pow2(-(k as i64) - 2) + err;
                    Some((&v - &pad, &v + &pad))
                }
            },
            BaireBody::Seq(s) => {
                let n = self.cauchy_modulus(x, k + 2)?;
                let (lo, hi) = s(n as u64).enclose(x, k + 2)?;
                let pad = pow2(-(k as i64) - 2);
                Some((lo - &pad, hi + &pad))
            }
        }
    }

    /// Refutable comparison f(x) >= y against a coded real threshold,
    /// sharpened stage by stage. Stage k pits an enclosure of f(x) against
    /// the rational witness y_k - 2^(1-k), which sits strictly under y; an
    /// enclosure entirely below the witness refutes. Stops early once a
    /// lower bound on f(x) clears a certified upper bound on y, since no
    /// later stage can refute after that.
    pub fn cmp_geq_budgeted(&self, x: &TagPoint, y: &FastReal, budget: u32) -> GeqVerdict {
        for stage in 0..=budget {
            let yk = y.approx(stage);
            let witness = &yk - pow2(1 - stage as i64);
            if let Some((lo, hi)) = self.enclose(x, stage) {
                if hi <= witness {
                    return GeqVerdict::RefutedBelow { stage, upper: hi, witness };
                }
                if lo >= yk + pow2(-(stage as i64)) {
                    break;
                }
            }
        }
        GeqVerdict::GeqSoFar { budget }
    }
}

/// The step function at 0 as a limit of ramps: term of body index i climbs
/// linearly from 0 to 1 over [0, 1/(i+1)] and stays 1 after. The pointwise
/// limit is 0 at 0 and 1 everywhere else, the simplest discontinuous limit.
pub fn mk_heaviside() -> BaireCode {
    let term = |i: u64| -> BaireCode {
        let n = i + 1;
        let pl = if n == 1 {
            PiecewiseLinear::affine(Rat::zero(), Rat::from_integer(1.into()))
        } else {
            let cut = Rat::new(1.into(), (n as i64).into());
            PiecewiseLinear::new(
                vec![Rat::zero(), cut, Rat::from_integer(1.into())],
                vec![Rat::zero(), Rat::from_integer(1.into()), Rat::from_integer(1.into())],
            )
            .expect("ordered breaks for every n >= 2")
        };
        BaireCode::base(ContCode::from_piecewise(format!("ramp {}", n), pl))
    };
    let cauchy: CauchyFn = Arc::new(|x: &TagPoint, _n: u32| {
        // Terms at x are constant once 1/(i+1) <= x; at 0 they are all 0.
        match x.as_rational() {
            Some(q) if q.is_zero() => Some(0),
            Some(q) => {
                let n = (q.denom() + q.numer() - 1u8) / q.numer();
                num_traits::ToPrimitive::to_u32(&n)
            }
            None => {
                let r = x.as_real();
                for k in 0..64u32 {
                    let lb = r.approx(k) - pow2(-(k as i64));
                    if lb > Rat::zero() {
                        let n = (lb.denom() + lb.numer() - 1u8) / lb.numer();
                        return num_traits::ToPrimitive::to_u32(&n);
                    }
                }
                None
            }
        }
    });
    BaireCode::seq("heaviside", 1, Arc::new(term), Some(cauchy))
}

/// Half the distance to the limit of a convergent sequence of coded reals,
/// as a rank-1 code. The sequence comes with a rate: past index rate(k) any
/// two members are within 2^(-k) of each other. Each term snaps its point
/// to a rational approximant two stages finer than its own index, which
/// keeps the terms exactly piecewise linear without disturbing the limit.
/// The limit function is a gauge everywhere except at the limit point
/// itself, where it vanishes; budgeted comparison against any positive
/// threshold refutes there.
pub fn mk_half_distance_limit(
    z: Arc<dyn Fn(u64) -> FastReal + Send + Sync>,
    rate: Arc<dyn Fn(u32) -> u32 + Send + Sync>,
    label: &str,
) -> BaireCode {
    let term = move |i: u64| -> BaireCode {
        let zi = z(i).approx(i as u32 + 2);
        let half = Rat::new(1.into(), 2.into());
        let mut pts: Vec<(Rat, Rat)> = vec![
            (Rat::zero(), (&zi).abs() * &half),
            (Rat::from_integer(1.into()), (Rat::from_integer(1.into()) - &zi).abs() * &half),
        ];
        if zi > Rat::zero() && zi < Rat::from_integer(1.into()) {
            pts.push((zi.clone(), Rat::zero()));
        }
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let (breaks, values) = pts.into_iter().unzip();
        let pl = PiecewiseLinear::new(breaks, values).expect("distance vertices are ordered");
        BaireCode::base(ContCode::from_piecewise(format!("half distance stage {}", i), pl))
    };
    // Terms m, n past max(rate(k+1), k+1) have points within 2^(-k-1) of
    // each other plus two snap errors under 2^(-k-3) each, so the half
    // distances differ by under 2^(-k).
    let cauchy: CauchyFn = Arc::new(move |_: &TagPoint, k: u32| Some(rate(k + 1).max(k + 1)));
    BaireCode::seq(
        format!("half distance to {}", label),
        1,
        Arc::new(term),
        Some(cauchy),
    )
}

/// Half the distance to a single coded real: the constant-sequence instance
/// of the general limit form, with the rate its fast convergence grants.
pub fn mk_half_distance(z: &FastReal, label: &str) -> BaireCode {
    let z = z.clone();
    mk_half_distance_limit(Arc::new(move |_| z.clone()), Arc::new(|k| k), label)
}

/// The envelope 1/2 |x - 1/3| as a continuous code.
pub fn third_envelope() -> ContCode {
    let third = Rat::new(1.into(), 3.into());
    let pl = PiecewiseLinear::new(
        vec![Rat::zero(), third, Rat::from_integer(1.into())],
        vec![
            Rat::new(1.into(), 6.into()),
            Rat::zero(),
            Rat::new(1.into(), 3.into()),
        ],
    )
    .expect("fixed envelope breaks");
    ContCode::from_piecewise("half distance to 1/3", pl)
}

/// A genuine gauge of rank 1 that forces 1/3 to be a tag: term of body
/// index i agrees with the envelope 1/2 |x - 1/3| outside a tent of half
/// width 1/(i+3) around 1/3 and climbs to 1 at 1/3 itself. The limit is the
/// envelope away from 1/3 and 1 at 1/3, so every fine partition must carry
/// the tag 1/3, which no dyadic-tagged partition can.
pub fn mk_tent_at_third() -> BaireCode {
    let term = |i: u64| -> BaireCode {
        let n = i + 3;
        let third = Rat::new(1.into(), 3.into());
        let w = Rat::new(1.into(), (n as i64).into());
        let env = third_envelope();
        let envpl = env.piecewise().expect("envelope is piecewise").clone();
        let lo = &third - &w;
        let hi = &third + &w;
        let mut pts: Vec<(Rat, Rat)> = vec![
            (Rat::zero(), envpl.eval(&Rat::zero())),
            (lo.clone(), envpl.eval(&lo)),
            (third.clone(), Rat::from_integer(1.into())),
            (hi.clone(), envpl.eval(&hi)),
            (Rat::from_integer(1.into()), envpl.eval(&Rat::from_integer(1.into()))),
        ];
        pts.retain(|(b, _)| !b.is_negative() && *b <= Rat::from_integer(1.into()));
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let (breaks, values) = pts.into_iter().unzip();
        let pl = PiecewiseLinear::new(breaks, values).expect("tent vertices are ordered");
        BaireCode::base(ContCode::from_piecewise(format!("tent stage {}", n), pl))
    };
    let cauchy: CauchyFn = Arc::new(|x: &TagPoint, _n: u32| {
        let third = Rat::new(1.into(), 3.into());
        // Terms at x agree exactly once the tent no longer reaches x.
        let from_gap = |gap: Rat| -> Option<u32> {
            if gap.is_zero() {
                return Some(0);
            }
            let inv = gap.recip();
            let n = (inv.numer() + inv.denom() - 1u8) / inv.denom();
            let n = num_traits::ToPrimitive::to_u64(&n)?;
            Some(n.saturating_sub(3).min(u32::MAX as u64) as u32)
        };
        match x.as_rational() {
            Some(q) if *q == third => Some(0),
            Some(q) => from_gap((q - &third).abs()),
            None => {
                let r = x.as_real();
                for k in 0..64u32 {
                    let gap = (r.approx(k) - &third).abs() - pow2(-(k as i64));
                    if gap > Rat::zero() {
                        return from_gap(gap);
                    }
                }
                None
            }
        }
    });
    BaireCode::seq("tent gauge at 1/3", 1, Arc::new(term), Some(cauchy))
}

/// A rank-1 code from an explicit list: the sequence repeats its last
/// element forever, so the limit is the last code and the modulus is the
/// list length.
pub fn mk_eventually_constant(name: impl Into<String>, codes: Vec<ContCode>) -> BaireCode {
    assert!(!codes.is_empty(), "need at least one code");
    let settle = (codes.len() - 1) as u32;
    let terms: Vec<BaireCode> = codes.into_iter().map(BaireCode::base).collect();
    let seq: SeqFn = Arc::new(move |i| {
        let i = (i as usize).min(terms.len() - 1);
        terms[i].clone()
    });
    let cauchy: CauchyFn = Arc::new(move |_, _| Some(settle));
    BaireCode::seq(name, 1, seq, Some(cauchy))
}

pub fn describe(code: &BaireCode) -> String {
    format!("{} (rank {})", code.name(), code.rank())
}
