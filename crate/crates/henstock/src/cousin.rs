//! Dyadic tree search for gauge-fine tagged partitions.
//!
//! The unit interval is probed along a binary tree. A bit string sigma of
//! length n names the closed dyadic interval of width 2^-n whose left
//! endpoint is sum_i sigma_i 2^-(i+1). The string stays alive while the
//! gauge still looks small at its midpoint; once the n-th approximant of
//! delta(midpoint) exceeds 2^(1-n), the ball the gauge grants that
//! midpoint swallows the whole interval with room to spare, and the
//! string is cut. If the tree dies out entirely, the cut strings tile
//! [0, 1] and tagging each block with its midpoint gives a partition that
//! is delta-fine by construction. If some branch survives to the depth
//! limit, the search reports the leftmost surviving chain instead; for
//! gauges that starve every dyadic point this happens at every depth.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::codings::{pow2, Rat};
use crate::contfun::{ContCode, PiecewiseLinear};
use crate::exactreal::TagPoint;
use crate::intervals::{IntervalUI, OpenSet};
use crate::partition::{Gauge, PartitionError, TaggedPartition};

/// Scan limit when hunting for a cover member swallowing a block.
pub const DEFAULT_SUBCOVER_CAP: u64 = 1 << 16;

pub type BitStr = Vec<bool>;

/// Printable form of a bit string; the empty string prints as "e".
pub fn bits_name(sigma: &[bool]) -> String {
    if sigma.is_empty() {
        return "e".to_string();
    }
    sigma.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// Left endpoint of the interval named by sigma.
pub fn dyadic_left(sigma: &[bool]) -> Rat {
    let mut a = Rat::zero();
    for (i, b) in sigma.iter().enumerate() {
        if *b {
            a += pow2(-(i as i64) - 1);
        }
    }
    a
}

/// Right endpoint: left plus the width 2^-|sigma|.
pub fn dyadic_right(sigma: &[bool]) -> Rat {
    dyadic_left(sigma) + pow2(-(sigma.len() as i64))
}

/// Midpoint of the interval named by sigma.
pub fn dyadic_midpoint(sigma: &[bool]) -> Rat {
    dyadic_left(sigma) + pow2(-(sigma.len() as i64) - 1)
}

#[derive(Debug)]
pub enum CousinError {
    /// The gauge failed to produce an approximant at some midpoint.
    Gauge(PartitionError),
    /// The cut strings do not tile the interval; index of the offender.
    BadFrontier { index: usize },
    /// The frontier tiles but the partition constructor still objected.
    Partition(PartitionError),
    /// No enumerated cover interval swallows the given block.
    SubcoverMiss { block: usize, cap: u64 },
}

impl fmt::Display for CousinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CousinError::Gauge(e) => write!(f, "gauge evaluation failed: {}", e),
            CousinError::BadFrontier { index } => {
                write!(f, "frontier entry {} does not continue the tiling", index)
            }
            CousinError::Partition(e) => write!(f, "frontier partition invalid: {}", e),
            CousinError::SubcoverMiss { block, cap } => write!(
                f,
                "no cover interval among the first {} contains block {}",
                cap, block
            ),
        }
    }
}

impl std::error::Error for CousinError {}

/// Survivors and freshly cut strings, level by level.
#[derive(Debug, Clone)]
pub struct CousinLevels {
    pub survivors: Vec<Vec<BitStr>>,
    pub excluded: Vec<Vec<BitStr>>,
}

#[derive(Debug)]
pub enum CousinOutcome {
    /// Some level emptied out. The frontier is every cut string, sorted
    /// left to right, and the partition tags each with its midpoint.
    Finished {
        depth: u32,
        frontier: Vec<BitStr>,
        partition: TaggedPartition,
        levels: CousinLevels,
    },
    /// The depth limit hit with live strings; the chain lists every
    /// prefix of the leftmost survivor.
    DepthExhausted {
        depth: u32,
        chain: Vec<BitStr>,
        levels: CousinLevels,
    },
}

/// A single rational within 2^-n of the gauge value at a rational point.
pub fn gauge_approximant(gauge: &Gauge, m: &Rat, n: u32) -> Result<Rat, PartitionError> {
    let t = TagPoint::rational(m.clone());
    let (lo, hi) = gauge.enclose_at(&t, n)?;
    Ok((lo + hi) / Rat::from_integer(2.into()))
}

/// Grow the tree level by level until it dies or the depth limit hits.
///
/// A string sigma of length n is cut exactly when its midpoint's n-th
/// gauge approximant exceeds 2^(1-n); since the approximant sits within
/// 2^-n of the true value, a cut means delta(midpoint) > 2^-n, which is
/// the full width of the named interval. Equality survives.
pub fn cousin_search(gauge: &Gauge, max_depth: u32) -> Result<CousinOutcome, CousinError> {
    let mut levels = CousinLevels {
        survivors: Vec::new(),
        excluded: Vec::new(),
    };
    let mut frontier: Vec<BitStr> = Vec::new();
    let mut current: Vec<BitStr> = vec![Vec::new()];
    for n in 0..=max_depth {
        let threshold = pow2(1 - n as i64);
        let mut alive: Vec<BitStr> = Vec::new();
        let mut dead: Vec<BitStr> = Vec::new();
        for sigma in current.drain(..) {
            let m = dyadic_midpoint(&sigma);
            let approx = gauge_approximant(gauge, &m, n).map_err(CousinError::Gauge)?;
            if approx <= threshold {
                alive.push(sigma);
            } else {
                dead.push(sigma);
            }
        }
        frontier.extend(dead.iter().cloned());
        levels.excluded.push(dead);
        levels.survivors.push(alive.clone());
        if alive.is_empty() {
            frontier.sort();
            let partition = frontier_partition(&frontier)?;
            return Ok(CousinOutcome::Finished {
                depth: n,
                frontier,
                partition,
                levels,
            });
        }
        if n == max_depth {
            let mut best = alive;
            best.sort();
            let full = best.swap_remove(0);
            let chain = (0..=full.len()).map(|k| full[..k].to_vec()).collect();
            return Ok(CousinOutcome::DepthExhausted {
                depth: max_depth,
                chain,
                levels,
            });
        }
        current = alive
            .into_iter()
            .flat_map(|s| {
                let mut zero = s.clone();
                zero.push(false);
                let mut one = s;
                one.push(true);
                [zero, one]
            })
            .collect();
    }
    unreachable!("the loop returns at an empty level or at max depth")
}

/// Turn a sorted, tiling list of cut strings into the midpoint-tagged
/// partition. The list must run left to right with each interval starting
/// where the previous one ended, the first at 0 and the last ending at 1.
pub fn frontier_partition(frontier: &[BitStr]) -> Result<TaggedPartition, CousinError> {
    if frontier.is_empty() {
        return Err(CousinError::BadFrontier { index: 0 });
    }
    let mut points: Vec<TagPoint> = Vec::with_capacity(frontier.len() + 1);
    let mut tags: Vec<TagPoint> = Vec::with_capacity(frontier.len());
    let mut edge = Rat::zero();
    for (i, sigma) in frontier.iter().enumerate() {
        if dyadic_left(sigma) != edge {
            return Err(CousinError::BadFrontier { index: i });
        }
        points.push(TagPoint::rational(edge));
        tags.push(TagPoint::rational(dyadic_midpoint(sigma)));
        edge = dyadic_right(sigma);
    }
    if edge != Rat::from_integer(1.into()) {
        return Err(CousinError::BadFrontier {
            index: frontier.len(),
        });
    }
    points.push(TagPoint::rational(edge));
    TaggedPartition::new(points, tags).map_err(CousinError::Partition)
}

fn raw_margin(u: &IntervalUI) -> PiecewiseLinear {
    let p = u.raw_lo().clone();
    let q = u.raw_hi().clone();
    let one = Rat::from_integer(1.into());
    let mut breaks = vec![Rat::zero()];
    let peak = (&p + &q) / Rat::from_integer(2.into());
    for c in [p.clone(), peak, q.clone()] {
        if c.is_positive() && c < one {
            breaks.push(c);
        }
    }
    breaks.push(one);
    breaks.sort();
    breaks.dedup();
    let values = breaks
        .iter()
        .map(|x| {
            let a = x - &p;
            let b = &q - x;
            let t = if a <= b { a } else { b };
            if t.is_negative() { Rat::zero() } else { t }
        })
        .collect();
    PiecewiseLinear::new(breaks, values).expect("margin tent is a valid piecewise code")
}

/// Distance-to-complement gauge of a finite cover: at x the value is the
/// largest margin min(x - p, q - x) over members (p, q) containing x,
/// measured with the raw endpoints so overhang past [0, 1] counts.
/// Any partition fine for this gauge has each block inside one member.
pub fn cover_margin_gauge(cover: &[IntervalUI]) -> ContCode {
    let mut pl = PiecewiseLinear::constant(Rat::zero());
    for u in cover {
        pl = pl.max(&raw_margin(u));
    }
    ContCode::from_piecewise(format!("margin of a {} interval cover", cover.len()), pl)
}

/// For each block of the partition, the least enumeration index whose
/// interval strictly swallows the block; indices are returned sorted and
/// deduplicated. Fails with a diagnostic if some block finds no home
/// within the cap.
pub fn extract_subcover(
    cover: &OpenSet,
    p: &TaggedPartition,
    cap: u64,
) -> Result<Vec<u64>, CousinError> {
    let pts = p.rational_points().map_err(CousinError::Partition)?;
    let mut picked: Vec<u64> = Vec::new();
    for j in 0..p.len() {
        let a = pts[j];
        let b = pts[j + 1];
        let mut found = None;
        for i in 0..cap {
            if let Some(u) = cover.get(i) {
                if u.raw_lo() < a && b < u.raw_hi() {
                    found = Some(i);
                    break;
                }
            }
        }
        match found {
            Some(i) => picked.push(i),
            None => return Err(CousinError::SubcoverMiss { block: j, cap }),
        }
    }
    picked.sort();
    picked.dedup();
    Ok(picked)
}
