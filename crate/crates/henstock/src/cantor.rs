//! Infinite binary sequences: metric, embedding into the unit interval,
//! the diagonal tree, the small-measure ball list, and stage-bounded
//! jump columns.
//!
//! Sequences are total bit oracles. The metric between two sequences is
//! 2^-n for the first index n where they differ; a budget caps how far
//! equality is chased, so "zero so far" is the honest third answer. The
//! middle-thirds map carries a sequence to sum 2 X_n / 3^(n+1), landing
//! in the classic excluded-middle set.
//!
//! The diagonal tree keeps exactly the strings sigma no diagonal run
//! contradicts: cutting sigma needs some machine e < |sigma| to halt on
//! its own index within |sigma| steps and output the bit sigma_e. Every
//! level is populated, yet any single sequence eventually disagrees with
//! some halting diagonal, which is the textbook tree with no computable
//! path. The ball list and jump columns package the same machinery as
//! measure-bounded interval lists and as stage-relative jump probes.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::codings::{pair_cantor, pow2, rat_decode_total, BitString, Nat, Rat};
use crate::exactreal::{FastReal, Provenance};
use crate::intervals::IntervalUI;
use crate::machine::{jump_stage, run_program, ProgramEnumeration, RunResult};

/// A total infinite bit sequence, queried one index at a time.
#[derive(Clone)]
pub struct InfBitOracle {
    bit: Arc<dyn Fn(&Nat) -> bool + Send + Sync>,
}

impl InfBitOracle {
    pub fn from_fn<F>(bit: F) -> Self
    where
        F: Fn(&Nat) -> bool + Send + Sync + 'static,
    {
        InfBitOracle { bit: Arc::new(bit) }
    }

    /// The listed bits, then the fill bit forever.
    pub fn from_bits(prefix: Vec<bool>, fill: bool) -> Self {
        InfBitOracle::from_fn(move |n| match u64::try_from(n) {
            Ok(i) if (i as usize) < prefix.len() => prefix[i as usize],
            Ok(_) => fill,
            Err(_) => fill,
        })
    }

    pub fn constant(b: bool) -> Self {
        InfBitOracle::from_fn(move |_| b)
    }

    pub fn bit(&self, n: &Nat) -> bool {
        (self.bit)(n)
    }

    pub fn bit_at(&self, n: u64) -> bool {
        self.bit(&Nat::from(n))
    }
}

impl fmt::Debug for InfBitOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InfBitOracle(")?;
        for n in 0..16 {
            write!(f, "{}", if self.bit_at(n) { '1' } else { '0' })?;
        }
        write!(f, "...)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricVerdict {
    /// 2^-n for the first differing index n.
    Exact(Rat),
    /// All bits through the budget agree.
    ZeroSoFar,
}

/// First-difference metric, chased through `budget` indices.
pub fn cantor_metric(x: &InfBitOracle, y: &InfBitOracle, budget: u64) -> MetricVerdict {
    for n in 0..budget {
        if x.bit_at(n) != y.bit_at(n) {
            return MetricVerdict::Exact(pow2(-(n as i64)));
        }
    }
    MetricVerdict::ZeroSoFar
}

/// The middle-thirds value sum 2 X_n / 3^(n+1) as a fast-converging
/// real: the n-th approximant takes enough terms that the geometric
/// tail 3^-N drops to 2^-(n+1) or below.
pub fn embed_middle_thirds(x: &InfBitOracle) -> FastReal {
    let held = x.clone();
    FastReal::from_oracle(
        move |n| {
            let target = Nat::one() << (n as usize + 1);
            let mut pow = Nat::one();
            let mut terms = 0u64;
            while pow < target {
                pow *= 3u32;
                terms += 1;
            }
            let mut sum = Rat::zero();
            let mut scale = Rat::new(1.into(), 3.into());
            for k in 0..terms {
                if held.bit_at(k) {
                    sum += &scale * Rat::from_integer(2.into());
                }
                scale /= Rat::from_integer(3.into());
            }
            sum
        },
        Provenance::Composite("middle-thirds embedding".to_string()),
    )
}

/// Membership in the diagonal tree over the given program listing: sigma
/// survives unless some e < |sigma| halts on its own index within
/// |sigma| steps and outputs exactly the bit sigma_e.
pub fn diag_tree_member_with(listing: &ProgramEnumeration, sigma: &BitString) -> bool {
    let len = sigma.0.len() as u64;
    for e in 0..sigma.0.len() {
        let prog = listing(e as u64);
        if let RunResult::Halted { value, .. } = run_program(&prog, &Nat::from(e), len) {
            let bit_val = if sigma.0[e] { Nat::one() } else { Nat::zero() };
            if value == bit_val {
                return false;
            }
        }
    }
    true
}

/// Membership over the standard listing.
pub fn diag_tree_member(sigma: &BitString) -> bool {
    diag_tree_member_with(&crate::machine::default_enumeration(), sigma)
}

/// One interval from the small-measure list: program e, run on input
/// e + 3, halted after exactly `steps` steps with a rational output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiBall {
    pub e: u64,
    pub steps: u64,
    pub center: Rat,
    pub ball: IntervalUI,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallScan {
    pub balls: Vec<PiBall>,
    /// False when the search bound ran out before k balls were found.
    pub complete: bool,
}

/// Scan pairs (e, s) in pairing order; when program e on input e + 3
/// halts after exactly s steps, read its output as a rational center and
/// record the interval of radius 2^-(e+3) around it, skipping intervals
/// that miss the unit interval entirely. Each program contributes at
/// most one entry, so the recorded lengths sum below
/// sum_e 2^-(e+2) = 1/2.
pub fn pi01_balls_with(listing: &ProgramEnumeration, k: usize, search_bound: u64) -> BallScan {
    let mut balls = Vec::new();
    for c in 0..search_bound {
        if balls.len() >= k {
            break;
        }
        let (e_nat, s_nat) = crate::codings::unpair_cantor(&Nat::from(c));
        let (Ok(e), Ok(s)) = (u64::try_from(&e_nat), u64::try_from(&s_nat)) else {
            continue;
        };
        let prog = listing(e);
        let input = Nat::from(e) + 3u32;
        if let RunResult::Halted { value, steps } = run_program(&prog, &input, s) {
            if steps == s {
                let center = rat_decode_total(&value);
                let radius = pow2(-(e as i64) - 3);
                if let Ok(ball) = IntervalUI::new(&center - &radius, &center + &radius) {
                    balls.push(PiBall {
                        e,
                        steps,
                        center,
                        ball,
                    });
                }
            }
        }
    }
    let complete = balls.len() >= k;
    BallScan { balls, complete }
}

/// The ball list over the standard listing.
pub fn pi01_balls(k: usize, search_bound: u64) -> BallScan {
    pi01_balls_with(&crate::machine::default_enumeration(), k, search_bound)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnVerdict {
    /// 2^-(k+1) for the least global bit index k of certified difference.
    Value(Rat),
    /// Every probe agreed at this column bound and stage.
    Undetermined,
}

/// Read the sequence as columns via the pairing: Y^[n] holds e when bit
/// pair(e, n) is set.
pub fn column_bit(y: &InfBitOracle, e: &Nat, n: u64) -> bool {
    y.bit(&pair_cantor(e, &Nat::from(n)))
}

/// Probe the jump-tower shape of Y: column 0 should be empty, and each
/// later column should be the stage-bounded jump of the one before it,
/// with membership queries answered by Y's own bits. Indices e < stage
/// are probed per column. On the first column disagreeing, the least
/// differing e gives the global bit index k = pair(e, n) and the value
/// 2^-(k+1); otherwise the probes are consistent at this resolution.
///
/// Only the Value side is checkable. A returned radius certifies a
/// concrete disagreement, and against the probe-consistent reference it
/// puts the first bit difference no later than index k. Undetermined
/// certifies nothing beyond the probes made: silence on a genuine jump
/// tower is a claim about every index of an infinite sequence, and no
/// finite family of probes can confirm it, so that half is documented
/// here rather than tested.
pub fn column_gauge(y: &InfBitOracle, column_bound: u64, stage: u64) -> ColumnVerdict {
    for n in 0..column_bound {
        for e in 0..stage {
            let e_nat = Nat::from(e);
            let actual = column_bit(y, &e_nat, n);
            let expected = if n == 0 {
                false
            } else {
                let held = y.clone();
                let prev = n - 1;
                jump_stage(&move |v: &Nat| column_bit(&held, v, prev), &e_nat, stage)
            };
            if actual != expected {
                let k = pair_cantor(&e_nat, &Nat::from(n));
                let shift = i64::try_from(&k).unwrap_or(i64::MAX);
                return ColumnVerdict::Value(pow2(-shift - 1));
            }
        }
    }
    ColumnVerdict::Undetermined
}

/// The canonical probe-consistent sequence at a stage: column 0 empty,
/// every later bit computed by the same stage-bounded jump recursion the
/// gauge replays. By construction the gauge finds nothing to object to.
pub fn jump_consistent_oracle(stage: u64) -> InfBitOracle {
    fn bit_rec(idx: &Nat, stage: u64) -> bool {
        let (e, n) = crate::codings::unpair_cantor(idx);
        let Ok(n) = u64::try_from(&n) else {
            return false;
        };
        if n == 0 {
            return false;
        }
        let prev = n - 1;
        jump_stage(
            &move |v: &Nat| bit_rec(&pair_cantor(v, &Nat::from(prev)), stage),
            &e,
            stage,
        )
    }
    InfBitOracle::from_fn(move |idx| bit_rec(idx, stage))
}

/// Decide membership by interleaving a listing of the set with a listing
/// of its complement: scan stages, answering as soon as either side
/// lists n. None when the stage bound runs out first.
pub fn interleave_decide(
    listed: &dyn Fn(&Nat, u64) -> bool,
    co_listed: &dyn Fn(&Nat, u64) -> bool,
    n: &Nat,
    bound: u64,
) -> Option<bool> {
    for s in 0..bound {
        if listed(n, s) {
            return Some(true);
        }
        if co_listed(n, s) {
            return Some(false);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codings::rat_code;
    use crate::machine::{constant_program, seeded_enumeration};
    use num_traits::Signed;

    fn seq(bits: &[u8]) -> InfBitOracle {
        InfBitOracle::from_bits(bits.iter().map(|b| *b == 1).collect(), false)
    }

    fn sigma(bits: &[u8]) -> BitString {
        BitString(bits.iter().map(|b| *b == 1).collect())
    }

    #[test]
    fn metric_reads_the_first_difference() {
        let x = seq(&[0, 0, 0, 0]);
        assert_eq!(cantor_metric(&x, &x, 64), MetricVerdict::ZeroSoFar);
        let y = seq(&[1, 0, 0, 0]);
        assert_eq!(
            cantor_metric(&x, &y, 4),
            MetricVerdict::Exact(Rat::one())
        );
        let a = seq(&[1, 1, 0, 0]);
        let b = seq(&[1, 1, 0, 1]);
        assert_eq!(cantor_metric(&a, &b, 8), MetricVerdict::Exact(pow2(-3)));
        // The budget is honest: stop before the difference and it is
        // still zero so far.
        assert_eq!(cantor_metric(&a, &b, 3), MetricVerdict::ZeroSoFar);
    }

    #[test]
    fn embedding_lands_on_known_values() {
        let zero = embed_middle_thirds(&InfBitOracle::constant(false));
        let one = embed_middle_thirds(&InfBitOracle::constant(true));
        let two_thirds = embed_middle_thirds(&seq(&[1]));
        for n in [0u32, 3, 10, 20] {
            assert!(zero.approx(n).is_zero());
            assert!((one.approx(n) - Rat::one()).abs() <= pow2(-(n as i64)));
            let target = Rat::new(2.into(), 3.into());
            assert!((two_thirds.approx(n) - target).abs() <= pow2(-(n as i64)));
        }
        // Fast-Cauchy certificate across index pairs.
        let x = embed_middle_thirds(&seq(&[1, 0, 1, 1, 0, 1]));
        for m in 0..12u32 {
            for n in m..12u32 {
                assert!((x.approx(m) - x.approx(n)).abs() <= pow2(-(m as i64)));
            }
        }
    }

    #[test]
    fn diagonal_tree_has_full_levels_but_cuts_halting_bits() {
        assert!(diag_tree_member(&BitString::empty()));
        // Exhaustively: every level through 6 keeps at least one string,
        // and the member set is closed under truncation.
        for n in 1..=6u32 {
            let mut any = false;
            for mask in 0u32..(1 << n) {
                let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                let s = sigma(&bits);
                if diag_tree_member(&s) {
                    any = true;
                    let parent = sigma(&bits[..bits.len() - 1]);
                    assert!(diag_tree_member(&parent));
                }
            }
            assert!(any, "level {} emptied out", n);
        }
        // Program number 0 is the empty program: it halts at once with
        // value 0, so any string whose bit 0 is 0 is cut.
        assert!(!diag_tree_member(&sigma(&[0])));
        assert!(diag_tree_member(&sigma(&[1])));
        assert!(!diag_tree_member(&sigma(&[0, 1, 1])));
    }

    #[test]
    fn planted_program_gets_its_own_ball() {
        let half = Rat::new(1.into(), 2.into());
        let prog = constant_program(u64::try_from(&rat_code(&half)).unwrap());
        let listing = seeded_enumeration(vec![(2, prog)]);
        let scan = pi01_balls_with(&listing, 500, 8192);
        let hit = scan
            .balls
            .iter()
            .find(|b| b.e == 2)
            .expect("planted ball missing");
        assert_eq!(hit.center, half);
        assert_eq!(hit.ball.raw_lo(), &(&half - pow2(-5)));
        assert_eq!(hit.ball.raw_hi(), &(&half + pow2(-5)));
        // One ball per program, so lengths stay under the measure bound.
        let mut es: Vec<u64> = scan.balls.iter().map(|b| b.e).collect();
        es.sort();
        es.dedup();
        assert_eq!(es.len(), scan.balls.len());
        let total: Rat = scan.balls.iter().map(|b| b.ball.length()).sum();
        assert!(total <= Rat::new(1.into(), 2.into()));
        // Determinism: the scan is a pure function of its inputs.
        let again = pi01_balls_with(&listing, 500, 8192);
        assert_eq!(scan, again);
    }

    #[test]
    fn column_gauge_flags_a_marked_empty_column() {
        // A single set bit at pair(0, 0) = 0 contradicts "column 0 is
        // empty" at the first probe: k = 0, value 1/2.
        let y = seq(&[1]);
        assert_eq!(
            column_gauge(&y, 3, 8),
            ColumnVerdict::Value(Rat::new(1.into(), 2.into()))
        );
        // The flagged difference is also metric-visible: any reference
        // with bit 0 clear sits at distance 1 > 1/2.
        let x = InfBitOracle::constant(false);
        assert_eq!(cantor_metric(&y, &x, 4), MetricVerdict::Exact(Rat::one()));
    }

    #[test]
    fn consistent_tower_passes_the_gauge() {
        let stage = 12;
        let y = jump_consistent_oracle(stage);
        assert_eq!(column_gauge(&y, 2, stage), ColumnVerdict::Undetermined);
        // Flipping one probed bit in column 1 surfaces a value.
        let flip_idx = pair_cantor(&Nat::from(1u32), &Nat::from(1u32));
        let base = y.clone();
        let held = flip_idx.clone();
        let flipped = InfBitOracle::from_fn(move |n| {
            if *n == held {
                !base.bit(n)
            } else {
                base.bit(n)
            }
        });
        match column_gauge(&flipped, 2, stage) {
            ColumnVerdict::Value(v) => {
                let shift = i64::try_from(&flip_idx).unwrap();
                assert_eq!(v, pow2(-shift - 1));
            }
            other => panic!("expected a value, got {:?}", other),
        }
    }

    #[test]
    fn interleaving_decides_when_both_sides_enumerate() {
        // Evens listed at stage n/2, odds on the complement side with the
        // same delay.
        let listed = |n: &Nat, s: u64| n % 2u32 == Nat::zero() && Nat::from(s) * 2u32 >= *n;
        let co = |n: &Nat, s: u64| n % 2u32 == Nat::one() && Nat::from(s) * 2u32 >= *n;
        for n in 0..200u32 {
            let got = interleave_decide(&listed, &co, &Nat::from(n), 256);
            assert_eq!(got, Some(n % 2 == 0));
        }
        assert_eq!(interleave_decide(&listed, &co, &Nat::from(10_000u32), 16), None);
    }
}
