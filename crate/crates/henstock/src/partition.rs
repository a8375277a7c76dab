//! Tagged partitions of [0,1], gauge fineness certification, and Riemann
//! sums.
//!
//! A tagged partition is a finite division 0 = x_0 < x_1 < ... < x_l = 1
//! together with one tag strictly inside each block (x_j, x_{j+1}). Points
//! and tags are both TagPoints, so either side may carry a certified
//! irrational; every ordering requirement is checked exactly on rationals
//! and to a certification budget otherwise, and a partition that cannot be
//! certified does not construct.
//!
//! A gauge assigns a positive radius to each tag; the partition is fine for
//! the gauge when every block sits inside the closed ball around its tag.
//! Fineness is certified by interval arithmetic, stage by stage, and comes
//! back Verified, Refuted at a first bad block, or unknown at the budget.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bairefun::BaireCode;
use crate::codings::{fmt_rat, parse_rat, pow2, sb01_index, sb01_rational, Nat, Rat};
use crate::contfun::{ContCode, ContFunError};
use crate::exactreal::{ceil_log2, CmpVerdict, FastReal, TagPoint};

/// Stage budget used by the constructors and fineness checks unless the
/// caller picks another.
pub const DEFAULT_CERT_BUDGET: u32 = 64;

/// Enumeration-scan budget for integrand codes that carry no evaluator.
const EVAL_SCAN_BUDGET: u64 = 1 << 17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    NotInterleaved { len: usize },
    CountMismatch { points: usize, tags: usize },
    BadEndpoint { index: usize },
    PointsNotIncreasing { index: usize },
    TagNotInterior { index: usize },
    OrderUndecided { index: usize, budget: u32 },
    IrrationalPoint { index: usize },
    TagNotEnumerated { tag: String },
    GaugeUndefined { name: String },
    Exhausted { tag_index: usize, budget: u64 },
    NoLipschitz { name: String },
    NotFine(FinenessVerdict),
    BadDocument(String),
    UnknownTagName(String),
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::NotInterleaved { len } => {
                write!(f, "interleaved form needs odd length >= 3, got {}", len)
            }
            PartitionError::CountMismatch { points, tags } => {
                write!(f, "{} points need {} tags, got {}", points, points - 1, tags)
            }
            PartitionError::BadEndpoint { index } => {
                write!(f, "point {} must be the exact endpoint", index)
            }
            PartitionError::PointsNotIncreasing { index } => {
                write!(f, "points {} and {} out of order", index, index + 1)
            }
            PartitionError::TagNotInterior { index } => {
                write!(f, "tag {} not strictly inside its block", index)
            }
            PartitionError::OrderUndecided { index, budget } => {
                write!(
                    f,
                    "ordering at index {} not certifiable within budget {}",
                    index, budget
                )
            }
            PartitionError::IrrationalPoint { index } => {
                write!(f, "point {} is not rational", index)
            }
            PartitionError::TagNotEnumerated { tag } => {
                write!(f, "tag {} not found in the rational enumeration", tag)
            }
            PartitionError::GaugeUndefined { name } => {
                write!(f, "gauge {} has no enclosure at this point", name)
            }
            PartitionError::Exhausted { tag_index, budget } => {
                write!(
                    f,
                    "evaluation at tag {} exhausted its budget {}",
                    tag_index, budget
                )
            }
            PartitionError::NoLipschitz { name } => {
                write!(f, "{} carries no Lipschitz bound", name)
            }
            PartitionError::NotFine(v) => write!(f, "partition not certified fine: {:?}", v),
            PartitionError::BadDocument(msg) => write!(f, "bad partition document: {}", msg),
            PartitionError::UnknownTagName(name) => write!(f, "unknown tag name {}", name),
        }
    }
}

impl std::error::Error for PartitionError {}

/// Strict order between two tag points: exact for rationals, budgeted
/// otherwise. None means the order could not be certified either way.
fn tp_less(a: &TagPoint, b: &TagPoint, budget: u32) -> Option<bool> {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return Some(x < y);
    }
    match a.as_real().compare_budgeted(&b.as_real(), budget) {
        CmpVerdict::Less => Some(true),
        CmpVerdict::Greater => Some(false),
        CmpVerdict::UnknownAtBudget(_) => None,
    }
}

/// Certified rational enclosure of a tag point at a stage: exact for
/// rationals, the fast-Cauchy enclosure otherwise.
fn tp_enclosure(x: &TagPoint, stage: u32) -> (Rat, Rat) {
    match x.as_rational() {
        Some(q) => (q.clone(), q.clone()),
        None => x.as_real().enclosure(stage),
    }
}

#[derive(Debug, Clone)]
pub struct TaggedPartition {
    points: Vec<TagPoint>,
    tags: Vec<TagPoint>,
}

impl TaggedPartition {
    pub fn new(points: Vec<TagPoint>, tags: Vec<TagPoint>) -> Result<Self, PartitionError> {
        Self::with_budget(points, tags, DEFAULT_CERT_BUDGET)
    }

    pub fn with_budget(
        points: Vec<TagPoint>,
        tags: Vec<TagPoint>,
        budget: u32,
    ) -> Result<Self, PartitionError> {
        if points.len() < 2 || tags.len() + 1 != points.len() {
            return Err(PartitionError::CountMismatch {
                points: points.len(),
                tags: tags.len(),
            });
        }
        match points[0].as_rational() {
            Some(q) if q.is_zero() => {}
            _ => return Err(PartitionError::BadEndpoint { index: 0 }),
        }
        let last = points.len() - 1;
        match points[last].as_rational() {
            Some(q) if q.is_one() => {}
            _ => return Err(PartitionError::BadEndpoint { index: last }),
        }
        for j in 0..points.len() - 1 {
            match tp_less(&points[j], &points[j + 1], budget) {
                Some(true) => {}
                Some(false) => return Err(PartitionError::PointsNotIncreasing { index: j }),
                None => return Err(PartitionError::OrderUndecided { index: j, budget }),
            }
        }
        for j in 0..tags.len() {
            let left = tp_less(&points[j], &tags[j], budget);
            let right = tp_less(&tags[j], &points[j + 1], budget);
            match (left, right) {
                (Some(true), Some(true)) => {}
                (Some(false), _) | (_, Some(false)) => {
                    return Err(PartitionError::TagNotInterior { index: j })
                }
                _ => return Err(PartitionError::OrderUndecided { index: j, budget }),
            }
        }
        Ok(TaggedPartition { points, tags })
    }

    /// From the interleaved form x_0, t_0, x_1, t_1, ..., x_l: odd length,
    /// at least three entries.
    pub fn from_interleaved(seq: Vec<TagPoint>) -> Result<Self, PartitionError> {
        if seq.len() < 3 || seq.len() % 2 == 0 {
            return Err(PartitionError::NotInterleaved { len: seq.len() });
        }
        let mut points = Vec::with_capacity(seq.len() / 2 + 1);
        let mut tags = Vec::with_capacity(seq.len() / 2);
        for (i, entry) in seq.into_iter().enumerate() {
            if i % 2 == 0 {
                points.push(entry);
            } else {
                tags.push(entry);
            }
        }
        Self::new(points, tags)
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[TagPoint] {
        &self.points
    }

    pub fn tags(&self) -> &[TagPoint] {
        &self.tags
    }

    /// Block j as (left point, tag, right point).
    pub fn block(&self, j: usize) -> (&TagPoint, &TagPoint, &TagPoint) {
        (&self.points[j], &self.tags[j], &self.points[j + 1])
    }

    /// All division points as rationals, or the index of the first that is
    /// not one.
    pub fn rational_points(&self) -> Result<Vec<&Rat>, PartitionError> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.as_rational()
                    .ok_or(PartitionError::IrrationalPoint { index: i })
            })
            .collect()
    }

    /// The uniform partition into 2^mesh_exp equal blocks with midpoint
    /// tags.
    pub fn uniform(mesh_exp: u32) -> Self {
        let blocks = 1u64 << mesh_exp.min(30);
        let w = pow2(-(mesh_exp.min(30) as i64));
        let points = (0..=blocks)
            .map(|j| TagPoint::rational(Rat::from_integer(j.into()) * &w))
            .collect();
        let half = &w / Rat::from_integer(2.into());
        let tags = (0..blocks)
            .map(|j| TagPoint::rational(Rat::from_integer(j.into()) * &w + &half))
            .collect();
        TaggedPartition { points, tags }
    }
}

impl fmt::Display for TaggedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for j in 0..self.tags.len() {
            write!(f, "{}, {}, ", self.points[j].describe(), self.tags[j].describe())?;
        }
        write!(f, "{}>", self.points[self.points.len() - 1].describe())
    }
}

/// A gauge given by a closed-form rule on tag points, evaluated exactly.
/// This is the shape that can react to a tag's rationality certificate, so
/// it is where the provenance-sensitive gauges live.
#[derive(Clone)]
pub struct SymbolicGauge {
    name: String,
    eval: Arc<dyn Fn(&TagPoint) -> Result<Rat, PartitionError> + Send + Sync>,
}

impl SymbolicGauge {
    pub fn new(
        name: impl Into<String>,
        eval: Arc<dyn Fn(&TagPoint) -> Result<Rat, PartitionError> + Send + Sync>,
    ) -> Self {
        SymbolicGauge {
            name: name.into(),
            eval,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value_at(&self, t: &TagPoint) -> Result<Rat, PartitionError> {
        (self.eval)(t)
    }
}

/// A gauge in any of the three supported presentations: a continuous code,
/// a finite-rank limit code, or a symbolic rule.
#[derive(Clone)]
pub enum Gauge {
    Cont(ContCode),
    Baire(BaireCode),
    Symbolic(SymbolicGauge),
}

impl Gauge {
    pub fn name(&self) -> String {
        match self {
            Gauge::Cont(c) => c.name().to_string(),
            Gauge::Baire(b) => b.name().to_string(),
            Gauge::Symbolic(s) => s.name().to_string(),
        }
    }

    /// A certified rational enclosure of the gauge value at a tag, width at
    /// most 2^(-k); exact (zero width) for symbolic gauges.
    pub fn enclose_at(&self, t: &TagPoint, k: u32) -> Result<(Rat, Rat), PartitionError> {
        match self {
            Gauge::Cont(c) => BaireCode::base(c.clone())
                .enclose(t, k)
                .ok_or(PartitionError::GaugeUndefined { name: c.name().to_string() }),
            Gauge::Baire(b) => b
                .enclose(t, k)
                .ok_or(PartitionError::GaugeUndefined { name: b.name().to_string() }),
            Gauge::Symbolic(s) => {
                let v = s.value_at(t)?;
                Ok((v.clone(), v))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinenessVerdict {
    Verified,
    Refuted { index: usize },
    UnknownAtBudget { budget: u32 },
}

/// Certify one block of the fineness condition: tag - gauge <= left point
/// and tag + gauge >= right point, both closed. Some(true) when every
/// configuration consistent with the stage enclosures satisfies both, and
/// Some(false) when none does; None when the budget ran out undecided.
fn certify_block(
    p: &TaggedPartition,
    gauge: &Gauge,
    j: usize,
    budget: u32,
) -> Result<Option<bool>, PartitionError> {
    let (a, t, b) = p.block(j);
    for stage in 0..=budget {
        let (a_lo, a_hi) = tp_enclosure(a, stage);
        let (b_lo, b_hi) = tp_enclosure(b, stage);
        let (t_lo, t_hi) = tp_enclosure(t, stage);
        let (d_lo, d_hi) = gauge.enclose_at(t, stage)?;
        if &t_hi - &d_lo <= a_lo && &t_lo + &d_lo >= b_hi {
            return Ok(Some(true));
        }
        if &t_lo - &d_hi > a_hi || &t_hi + &d_hi < b_lo {
            return Ok(Some(false));
        }
    }
    Ok(None)
}

/// Whether every block sits inside the closed gauge ball around its tag.
/// Blocks are scanned in order; the verdict reports the first block whose
/// failure is certified. When everything involved is rational and the gauge
/// is exact, stage 0 already decides each block, so the answer is exact.
pub fn is_delta_fine(
    p: &TaggedPartition,
    gauge: &Gauge,
    budget: u32,
) -> Result<FinenessVerdict, PartitionError> {
    let mut undecided = false;
    for j in 0..p.len() {
        match certify_block(p, gauge, j, budget)? {
            Some(true) => {}
            Some(false) => return Ok(FinenessVerdict::Refuted { index: j }),
            None => undecided = true,
        }
    }
    if undecided {
        Ok(FinenessVerdict::UnknownAtBudget { budget })
    } else {
        Ok(FinenessVerdict::Verified)
    }
}

/// An integrand for Riemann sums: either a continuous code or the indicator
/// of the rationals, which reads each tag's rationality certificate.
#[derive(Clone)]
pub enum Integrand {
    Cont(ContCode),
    RationalIndicator,
}

impl Integrand {
    pub fn name(&self) -> String {
        match self {
            Integrand::Cont(c) => c.name().to_string(),
            Integrand::RationalIndicator => "indicator of the rationals".to_string(),
        }
    }

    /// Value at a tag with a certified error bound, error at most
    /// 2^(-prec). Exact (error zero) on the indicator and on piecewise
    /// linear codes at rational tags.
    pub fn value_at(
        &self,
        t: &TagPoint,
        prec: u32,
        scan_budget: u64,
    ) -> Result<(Rat, Rat), ContFunError> {
        match self {
            Integrand::RationalIndicator => Ok(match t.as_rational() {
                Some(_) => (Rat::one(), Rat::zero()),
                None => (Rat::zero(), Rat::zero()),
            }),
            Integrand::Cont(c) => match t.as_rational() {
                Some(q) => match c.exact_at(q, prec) {
                    Some(pair) => Ok(pair),
                    None => {
                        let v = c.eval_at(&FastReal::from_rational(q.clone()), prec, scan_budget)?;
                        Ok((v, pow2(-(prec as i64))))
                    }
                },
                None => {
                    let v = c.eval_at(&t.as_real(), prec, scan_budget)?;
                    Ok((v, pow2(-(prec as i64))))
                }
            },
        }
    }
}

/// The Riemann sum of f over a tagged partition: sum of f(tag) times block
/// width. Division points must be rational so the widths are exact; the
/// returned pair is (value, error bound), with error 0 whenever every tag
/// value came out exact.
pub fn riemann_sum(
    f: &Integrand,
    p: &TaggedPartition,
    precision: u32,
) -> Result<(Rat, Rat), PartitionError> {
    let pts = p.rational_points()?;
    let mut total = Rat::zero();
    let mut err = Rat::zero();
    for j in 0..p.len() {
        let w = pts[j + 1] - pts[j];
        let (v, e) = f
            .value_at(&p.tags()[j], precision, EVAL_SCAN_BUDGET)
            .map_err(|_| PartitionError::Exhausted {
                tag_index: j,
                budget: EVAL_SCAN_BUDGET,
            })?;
        total += v * &w;
        err += e * &w;
    }
    Ok((total, err))
}

/// Midpoint-rule integral over the uniform partition with 2^mesh_exp
/// blocks: (value, error bound), the bound from the integrand's Lipschitz
/// constant. Integrands without one are refused.
pub fn riemann_integrate(
    f: &Integrand,
    mesh_exp: u32,
) -> Result<(Rat, Rat), PartitionError> {
    let l = match f {
        Integrand::Cont(c) => c.lipschitz().clone(),
        Integrand::RationalIndicator => {
            return Err(PartitionError::NoLipschitz { name: f.name() })
        }
    };
    let p = TaggedPartition::uniform(mesh_exp);
    let (value, eval_err) = riemann_sum(f, &p, 66)?;
    let bound = l * pow2(-(mesh_exp as i64)) + eval_err;
    Ok((value, bound))
}

/// Certificate returned with a gauge integral: which tolerance was asked,
/// the gauge used, and the checked fineness of the partition the finder
/// produced.
#[derive(Debug, Clone)]
pub struct GaugeCertificate {
    pub epsilon: Rat,
    pub gauge_name: String,
    pub blocks: usize,
    pub fineness: FinenessVerdict,
}

/// Integrate through a gauge family: pick the gauge for the tolerance, let
/// the finder produce a partition, certify its fineness, and return the
/// Riemann sum with the certificate. A partition the checker cannot verify
/// is an error, not a silent answer.
pub fn gauge_integrate(
    f: &Integrand,
    family: impl Fn(&Rat) -> Gauge,
    finder: impl Fn(&Gauge) -> Result<TaggedPartition, PartitionError>,
    eps: &Rat,
) -> Result<(Rat, GaugeCertificate), PartitionError> {
    let gauge = family(eps);
    let p = finder(&gauge)?;
    let fineness = is_delta_fine(&p, &gauge, DEFAULT_CERT_BUDGET)?;
    if fineness != FinenessVerdict::Verified {
        return Err(PartitionError::NotFine(fineness));
    }
    let prec = (ceil_log2(&eps.recip()) + 3).max(4) as u32;
    let (value, _err) = riemann_sum(f, &p, prec)?;
    let cert = GaugeCertificate {
        epsilon: eps.clone(),
        gauge_name: gauge.name(),
        blocks: p.len(),
        fineness,
    };
    Ok((value, cert))
}

/// A custom enumeration of the rationals for the Dirichlet gauge: index map
/// plus a search bound for the inverse lookup.
pub type RationalEnumeration = (Arc<dyn Fn(u64) -> Rat + Send + Sync>, u64);

/// The gauge that starves the rationals: a certified irrational tag gets
/// radius 1, while the m-th rational of the enumeration gets radius
/// eps * 2^(-m-2). The default enumeration is the Stern-Brocot order on
/// [0,1], whose index is computed directly; a custom enumeration is scanned
/// up to its bound, and a rational tag not found within the bound is an
/// error rather than a guess.
pub fn dirichlet_gauge(eps: &Rat) -> Gauge {
    dirichlet_gauge_with(eps, None)
}

pub fn dirichlet_gauge_with(eps: &Rat, enumeration: Option<RationalEnumeration>) -> Gauge {
    let name = format!("rational-starving gauge, eps {}", fmt_rat(eps));
    let eps = eps.clone();
    let eval = Arc::new(move |t: &TagPoint| -> Result<Rat, PartitionError> {
        let q = match t.as_rational() {
            None => return Ok(Rat::one()),
            Some(q) => q,
        };
        let m: i64 = match &enumeration {
            None => {
                let idx = sb01_index(q).map_err(|_| PartitionError::TagNotEnumerated {
                    tag: fmt_rat(q),
                })?;
                num_traits::ToPrimitive::to_i64(&idx).ok_or(
                    PartitionError::TagNotEnumerated { tag: fmt_rat(q) },
                )?
            }
            Some((map, bound)) => (0..*bound)
                .find(|i| map(*i) == *q)
                .ok_or(PartitionError::TagNotEnumerated { tag: fmt_rat(q) })?
                as i64,
        };
        Ok(pow2(-m - 2) * &eps)
    });
    Gauge::Symbolic(SymbolicGauge::new(name, eval))
}

/// The tag point a + b * sqrt(2)/2, named so it survives serialization.
pub fn affine_sqrt2_tag(a: &Rat, b: &Rat) -> TagPoint {
    let real = FastReal::affine(a, b, &crate::exactreal::sqrt2_over_2());
    TagPoint::irrational(real, format!("affine {} {} sqrt2/2", fmt_rat(a), fmt_rat(b)))
}

/// A partition certified fine for the rational-starving gauge that still
/// carries rational tags: a tiny block around each of the first n interior
/// enumeration rationals, tagged by that rational with radius at most half
/// its gauge value, and irrational tags on all the gap blocks, where the
/// gauge radius 1 covers everything.
pub fn dirichlet_fine_partition(
    eps: &Rat,
    n_rationals: usize,
) -> Result<TaggedPartition, PartitionError> {
    // Indices 0 and 1 enumerate the endpoints; interior rationals start at 2.
    let mut picked: Vec<(u64, Rat)> = (2..2 + n_rationals as u64)
        .map(|m| (m, sb01_rational(&m.into())))
        .collect();
    picked.sort_by(|a, b| a.1.cmp(&b.1));

    let half = Rat::new(1.into(), 2.into());
    let quarter = Rat::new(1.into(), 4.into());
    let radii: Vec<Rat> = picked
        .iter()
        .enumerate()
        .map(|(i, (m, q))| {
            let delta_half = pow2(-(*m as i64) - 2) * eps * &half;
            let left_room = if i == 0 {
                q * &half
            } else {
                (q - &picked[i - 1].1) * &quarter
            };
            let right_room = if i + 1 == picked.len() {
                (Rat::one() - q) * &half
            } else {
                (&picked[i + 1].1 - q) * &quarter
            };
            delta_half.min(left_room).min(right_room)
        })
        .collect();

    let mut points = vec![TagPoint::rational(Rat::zero())];
    let mut tags = Vec::new();
    let mut prev_edge = Rat::zero();
    for ((_, q), r) in picked.iter().zip(radii.iter()) {
        let lo = q - r;
        let hi = q + r;
        let gap_w = &lo - &prev_edge;
        tags.push(affine_sqrt2_tag(&prev_edge, &gap_w));
        points.push(TagPoint::rational(lo));
        tags.push(TagPoint::rational(q.clone()));
        points.push(TagPoint::rational(hi.clone()));
        prev_edge = hi;
    }
    let gap_w = Rat::one() - &prev_edge;
    tags.push(affine_sqrt2_tag(&prev_edge, &gap_w));
    points.push(TagPoint::rational(Rat::one()));
    TaggedPartition::new(points, tags)
}

/// The chain bound behind the rational-starving gauge: the total width of
/// rational-tagged blocks, next to the geometric series bound read off the
/// tags' enumeration indices. For a partition certified fine, each
/// rational-tagged block has width at most twice its tag's radius, so the
/// total is at most the bound, and the bound is strictly under eps because
/// only finitely many indices appear.
pub fn dirichlet_chain(
    p: &TaggedPartition,
    eps: &Rat,
) -> Result<(Rat, Rat), PartitionError> {
    let pts = p.rational_points()?;
    let mut total = Rat::zero();
    let mut bound = Rat::zero();
    let mut seen: BTreeSet<Nat> = BTreeSet::new();
    for j in 0..p.len() {
        let q = match p.tags()[j].as_rational() {
            Some(q) => q,
            None => continue,
        };
        let idx = sb01_index(q).map_err(|_| PartitionError::TagNotEnumerated {
            tag: fmt_rat(q),
        })?;
        total += pts[j + 1] - pts[j];
        if seen.insert(idx.clone()) {
            let m = num_traits::ToPrimitive::to_i64(&idx)
                .ok_or(PartitionError::TagNotEnumerated { tag: fmt_rat(q) })?;
            bound += pow2(-m - 1) * eps;
        }
    }
    Ok((total, bound))
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    points: Vec<String>,
    tags: Vec<TagDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum TagDoc {
    #[serde(rename = "rat")]
    Rat { value: String },
    #[serde(rename = "irr")]
    Irr { name: String },
}

/// Serialize a partition. Division points must be rational; tags keep
/// either their exact value or their irrational witness name.
pub fn partition_to_json(p: &TaggedPartition) -> Result<String, PartitionError> {
    let points = p
        .rational_points()?
        .into_iter()
        .map(fmt_rat)
        .collect();
    let tags = p
        .tags()
        .iter()
        .map(|t| match t {
            TagPoint::ExactRat(q) => TagDoc::Rat { value: fmt_rat(q) },
            TagPoint::CertIrrational { name, .. } => TagDoc::Irr { name: name.clone() },
        })
        .collect();
    let doc = PartitionDoc { points, tags };
    serde_json::to_string_pretty(&doc).map_err(|e| PartitionError::BadDocument(e.to_string()))
}

/// Rebuild a named irrational tag. Known names: "sqrt2/2" and the affine
/// form "affine <a> <b> sqrt2/2" standing for a + b * sqrt(2)/2.
fn tag_from_name(name: &str) -> Result<TagPoint, PartitionError> {
    if name == "sqrt2/2" {
        return Ok(TagPoint::sqrt2_over_2());
    }
    let parts: Vec<&str> = name.split_whitespace().collect();
    if parts.len() == 4 && parts[0] == "affine" && parts[3] == "sqrt2/2" {
        let a = parse_rat(parts[1])
            .map_err(|_| PartitionError::UnknownTagName(name.to_string()))?;
        let b = parse_rat(parts[2])
            .map_err(|_| PartitionError::UnknownTagName(name.to_string()))?;
        return Ok(affine_sqrt2_tag(&a, &b));
    }
    Err(PartitionError::UnknownTagName(name.to_string()))
}

/// Parse a partition document and construct it, running the full ordering
/// certification.
pub fn partition_from_json(s: &str) -> Result<TaggedPartition, PartitionError> {
    let doc: PartitionDoc =
        serde_json::from_str(s).map_err(|e| PartitionError::BadDocument(e.to_string()))?;
    let points = doc
        .points
        .iter()
        .map(|s| {
            parse_rat(s)
                .map(TagPoint::rational)
                .map_err(|e| PartitionError::BadDocument(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tags = doc
        .tags
        .iter()
        .map(|t| match t {
            TagDoc::Rat { value } => parse_rat(value)
                .map(TagPoint::rational)
                .map_err(|e| PartitionError::BadDocument(e.to_string())),
            TagDoc::Irr { name } => tag_from_name(name),
        })
        .collect::<Result<Vec<_>, _>>()?;
    TaggedPartition::new(points, tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codings::{rat, rat_int};
    use crate::contfun::{mk_const, mk_linear};

    fn tp(n: i64, d: i64) -> TagPoint {
        TagPoint::rational(rat(n, d))
    }

    #[test]
    fn construction_enforces_shape_and_order() {
        // The two-point, zero-tag shape from the smallest interleaved form.
        let p = TaggedPartition::from_interleaved(vec![tp(0, 1), tp(1, 3), tp(1, 1)]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.to_string(), "<0/1, 1/3, 1/1>");

        // A tag on a division point is rejected, naming the tag index.
        assert_eq!(
            TaggedPartition::from_interleaved(vec![tp(0, 1), tp(0, 1), tp(1, 1)]).unwrap_err(),
            PartitionError::TagNotInterior { index: 0 }
        );
        // Out-of-order points, bad endpoints, mismatched counts. Point order
        // is checked before tags, so the point pair is what gets named.
        assert_eq!(
            TaggedPartition::new(
                vec![tp(0, 1), tp(2, 3), tp(1, 3), tp(1, 1)],
                vec![tp(1, 2), tp(7, 10), tp(2, 5)],
            )
            .unwrap_err(),
            PartitionError::PointsNotIncreasing { index: 1 }
        );
        assert_eq!(
            TaggedPartition::new(vec![tp(1, 8), tp(1, 1)], vec![tp(1, 2)]).unwrap_err(),
            PartitionError::BadEndpoint { index: 0 }
        );
        assert_eq!(
            TaggedPartition::new(vec![tp(0, 1), tp(1, 1)], vec![]).unwrap_err(),
            PartitionError::CountMismatch { points: 2, tags: 0 }
        );
        assert_eq!(
            TaggedPartition::from_interleaved(vec![tp(0, 1), tp(1, 1)]).unwrap_err(),
            PartitionError::NotInterleaved { len: 2 }
        );

        // An irrational tag is certified interior through its approximants.
        let p = TaggedPartition::new(
            vec![tp(0, 1), tp(1, 1)],
            vec![TagPoint::sqrt2_over_2()],
        )
        .unwrap();
        assert_eq!(p.len(), 1);

        // Two copies of the same irrational as division points can never be
        // ordered, so construction reports the undecided pair.
        let r1 = TagPoint::irrational(crate::exactreal::sqrt2_over_2(), "sqrt2/2");
        let r2 = TagPoint::irrational(crate::exactreal::sqrt2_over_2(), "sqrt2/2");
        match TaggedPartition::with_budget(
            vec![tp(0, 1), r1, r2, tp(1, 1)],
            vec![tp(1, 2), tp(7, 10), tp(9, 10)],
            12,
        ) {
            Err(PartitionError::OrderUndecided { index: 1, budget: 12 }) => {}
            other => panic!("expected undecided order, got {:?}", other),
        }
    }

    #[test]
    fn fineness_is_exact_for_rational_data() {
        // Constant gauge 1 verifies the one-block partition tagged 1/2.
        let p = TaggedPartition::from_interleaved(vec![tp(0, 1), tp(1, 2), tp(1, 1)]).unwrap();
        let g = Gauge::Cont(mk_const(rat_int(1)));
        assert_eq!(is_delta_fine(&p, &g, 8).unwrap(), FinenessVerdict::Verified);

        // Constant 1/8 on the uniform 8-block partition: blocks have width
        // 1/8 and midpoint tags, so the closed inequalities hold exactly.
        let p8 = TaggedPartition::uniform(3);
        let g8 = Gauge::Cont(mk_const(rat(1, 8)));
        assert_eq!(is_delta_fine(&p8, &g8, 8).unwrap(), FinenessVerdict::Verified);
        // On the 4-block partition the same 1/8 radius meets the half-width
        // exactly, and the closed inequalities count equality as fine.
        let p4 = TaggedPartition::uniform(2);
        assert_eq!(is_delta_fine(&p4, &g8, 8).unwrap(), FinenessVerdict::Verified);
        // One notch under the half-width refutes, at the first block.
        let g9 = Gauge::Cont(mk_const(rat(1, 9)));
        assert_eq!(
            is_delta_fine(&p4, &g9, 8).unwrap(),
            FinenessVerdict::Refuted { index: 0 }
        );
        let g17 = Gauge::Cont(mk_const(rat(1, 17)));
        assert_eq!(
            is_delta_fine(&p8, &g17, 8).unwrap(),
            FinenessVerdict::Refuted { index: 0 }
        );
    }

    #[test]
    fn fineness_with_irrational_tags_is_budgeted() {
        // One block tagged sqrt2/2 under the constant gauge 1: the closed
        // inequalities hold with slack, so a few stages certify them.
        let p = TaggedPartition::new(vec![tp(0, 1), tp(1, 1)], vec![TagPoint::sqrt2_over_2()])
            .unwrap();
        let g = Gauge::Cont(mk_const(rat_int(1)));
        assert_eq!(is_delta_fine(&p, &g, 16).unwrap(), FinenessVerdict::Verified);

        // The identity gauge at the same tag: tag + gauge = 2 tag > 1 has
        // slack, but tag - gauge = 0 = left point holds with equality
        // between two budgeted quantities, which no stage can certify.
        let ident = Gauge::Cont(mk_linear(rat_int(1), rat_int(0)));
        assert_eq!(
            is_delta_fine(&p, &ident, 12).unwrap(),
            FinenessVerdict::UnknownAtBudget { budget: 12 }
        );

        // A genuinely too-small gauge at an irrational tag is refuted.
        let tiny = Gauge::Cont(mk_const(rat(1, 64)));
        assert_eq!(
            is_delta_fine(&p, &tiny, 16).unwrap(),
            FinenessVerdict::Refuted { index: 0 }
        );
    }

    #[test]
    fn riemann_sums_on_indicator_and_identity() {
        // Rational midpoint tags make the indicator sum to the whole length.
        let p = TaggedPartition::uniform(3);
        let (v, e) = riemann_sum(&Integrand::RationalIndicator, &p, 20).unwrap();
        assert_eq!(v, rat_int(1));
        assert!(e.is_zero());

        // All-irrational tags make it vanish, exactly.
        let pts: Vec<TagPoint> = (0..=4).map(|j| tp(j, 4)).collect();
        let tags: Vec<TagPoint> = (0..4)
            .map(|j| affine_sqrt2_tag(&rat(j, 4), &rat(1, 4)))
            .collect();
        let p_irr = TaggedPartition::new(pts, tags).unwrap();
        let (v, e) = riemann_sum(&Integrand::RationalIndicator, &p_irr, 20).unwrap();
        assert!(v.is_zero());
        assert!(e.is_zero());

        // The identity over the uniform 8-block midpoint partition: 1/2.
        let ident = Integrand::Cont(mk_linear(rat_int(1), rat_int(0)));
        let (v, e) = riemann_sum(&ident, &p, 20).unwrap();
        assert_eq!(v, rat(1, 2));
        assert!(e.is_zero());

        // Sums split additively at any division point.
        let (total, _) = riemann_sum(&ident, &p, 20).unwrap();
        let pts = p.rational_points().unwrap();
        let mut left = Rat::zero();
        let mut right = Rat::zero();
        for j in 0..p.len() {
            let w = pts[j + 1] - pts[j];
            let (tv, _) = ident.value_at(&p.tags()[j], 20, 1024).unwrap();
            if *pts[j + 1] <= rat(1, 2) {
                left += tv * w;
            } else {
                right += tv * w;
            }
        }
        assert_eq!(left + right, total);

        // Irrational division points are refused by the summer.
        let p_bad = TaggedPartition {
            points: vec![tp(0, 1), TagPoint::sqrt2_over_2(), tp(1, 1)],
            tags: vec![tp(1, 2), tp(3, 4)],
        };
        assert_eq!(
            riemann_sum(&ident, &p_bad, 20).unwrap_err(),
            PartitionError::IrrationalPoint { index: 1 }
        );
    }

    #[test]
    fn midpoint_integration_with_lipschitz_bound() {
        let ident = Integrand::Cont(mk_linear(rat_int(1), rat_int(0)));
        let (v, bound) = riemann_integrate(&ident, 8).unwrap();
        assert_eq!(v, rat(1, 2));
        assert_eq!(bound, pow2(-8));

        let c = Integrand::Cont(mk_const(rat(2, 7)));
        let (v, bound) = riemann_integrate(&c, 4).unwrap();
        assert_eq!(v, rat(2, 7));
        assert!(bound.is_zero());

        assert_eq!(
            riemann_integrate(&Integrand::RationalIndicator, 4).unwrap_err(),
            PartitionError::NoLipschitz {
                name: "indicator of the rationals".to_string()
            }
        );
    }

    #[test]
    fn rational_starving_gauge_values_and_verdicts() {
        let eps = rat(1, 8);
        let g = dirichlet_gauge(&eps);
        // Enumeration starts 0, 1, 1/2: radius eps * 2^(-m-2).
        if let Gauge::Symbolic(s) = &g {
            assert_eq!(s.value_at(&tp(0, 1)).unwrap(), rat(1, 32));
            assert_eq!(s.value_at(&tp(1, 2)).unwrap(), rat(1, 128));
            assert_eq!(s.value_at(&TagPoint::sqrt2_over_2()).unwrap(), rat_int(1));
        } else {
            panic!("expected a symbolic gauge");
        }
        // The single-block partition tagged sqrt2/2 is fine: radius 1.
        let p = TaggedPartition::new(vec![tp(0, 1), tp(1, 1)], vec![TagPoint::sqrt2_over_2()])
            .unwrap();
        assert_eq!(is_delta_fine(&p, &g, 24).unwrap(), FinenessVerdict::Verified);
        // A rational tag of a full-width block is starved out.
        let p_rat = TaggedPartition::from_interleaved(vec![tp(0, 1), tp(1, 2), tp(1, 1)]).unwrap();
        assert_eq!(
            is_delta_fine(&p_rat, &g, 24).unwrap(),
            FinenessVerdict::Refuted { index: 0 }
        );
    }

    #[test]
    fn generated_partitions_are_fine_with_small_rational_mass() {
        for (eps, n) in [(rat(1, 4), 6usize), (rat(1, 16), 10), (rat(1, 256), 4)] {
            let p = dirichlet_fine_partition(&eps, n).unwrap();
            let g = dirichlet_gauge(&eps);
            assert_eq!(
                is_delta_fine(&p, &g, DEFAULT_CERT_BUDGET).unwrap(),
                FinenessVerdict::Verified,
                "generator output must certify at eps {}",
                fmt_rat(&eps)
            );
            // The indicator Riemann sum equals the rational-tagged width,
            // which the chain bounds strictly under eps.
            let (rs, rs_err) = riemann_sum(&Integrand::RationalIndicator, &p, 20).unwrap();
            assert!(rs_err.is_zero());
            let (total, bound) = dirichlet_chain(&p, &eps).unwrap();
            assert_eq!(rs, total);
            assert!(total <= bound);
            assert!(bound < eps);
            assert!(total > Rat::zero(), "rational tags must actually appear");
        }
    }

    #[test]
    fn gauge_integration_certifies_the_partition() {
        // Indicator against the starving gauge family with the generator as
        // finder: value 0 within eps, certificate verified.
        let eps = rat(1, 16);
        let (v, cert) = gauge_integrate(
            &Integrand::RationalIndicator,
            |e| dirichlet_gauge(e),
            |_| dirichlet_fine_partition(&rat(1, 16), 8),
            &eps,
        )
        .unwrap();
        assert!(v < eps);
        assert_eq!(cert.fineness, FinenessVerdict::Verified);
        assert_eq!(cert.epsilon, eps);
        assert!(cert.blocks >= 8);

        // A finder that hands back an unfine partition is an error.
        let err = gauge_integrate(
            &Integrand::RationalIndicator,
            |e| dirichlet_gauge(e),
            |_| Ok(TaggedPartition::from_interleaved(vec![tp(0, 1), tp(1, 2), tp(1, 1)]).unwrap()),
            &eps,
        )
        .unwrap_err();
        assert_eq!(
            err,
            PartitionError::NotFine(FinenessVerdict::Refuted { index: 0 })
        );
    }

    #[test]
    fn json_documents_round_trip() {
        let p = TaggedPartition::new(
            vec![tp(0, 1), tp(1, 4), tp(3, 4), tp(1, 1)],
            vec![
                tp(1, 8),
                TagPoint::sqrt2_over_2(),
                affine_sqrt2_tag(&rat(3, 4), &rat(1, 4)),
            ],
        )
        .unwrap();
        let doc = partition_to_json(&p).unwrap();
        assert!(doc.contains("\"kind\": \"rat\""));
        assert!(doc.contains("\"kind\": \"irr\""));
        assert!(doc.contains("\"sqrt2/2\""));
        let back = partition_from_json(&doc).unwrap();
        assert_eq!(partition_to_json(&back).unwrap(), doc);

        // Irrational division points cannot be serialized.
        let p_irr = TaggedPartition::new(
            vec![tp(0, 1), TagPoint::sqrt2_over_2(), tp(1, 1)],
            vec![tp(1, 2), tp(9, 10)],
        )
        .unwrap();
        assert_eq!(
            partition_to_json(&p_irr).unwrap_err(),
            PartitionError::IrrationalPoint { index: 1 }
        );

        // Unknown tag names are refused on the way in.
        let bad = r#"{"points":["0/1","1/1"],"tags":[{"kind":"irr","name":"pi/4"}]}"#;
        assert_eq!(
            partition_from_json(bad).unwrap_err(),
            PartitionError::UnknownTagName("pi/4".to_string())
        );
        // And so are malformed documents and bad grids.
        assert!(matches!(
            partition_from_json("{nope"),
            Err(PartitionError::BadDocument(_))
        ));
        let unsorted = r#"{"points":["0/1","2/3","1/3","1/1"],"tags":[{"kind":"rat","value":"1/2"},{"kind":"rat","value":"7/10"},{"kind":"rat","value":"2/5"}]}"#;
        assert!(matches!(
            partition_from_json(unsorted),
            Err(PartitionError::PointsNotIncreasing { .. })
        ));
    }

    #[test]
    fn gauges_wrap_all_three_presentations() {
        let tag = tp(1, 2);
        // Continuous: enclosures tighten with the stage.
        let g = Gauge::Cont(mk_linear(rat(1, 2), rat(1, 8)));
        let (lo4, hi4) = g.enclose_at(&tag, 4).unwrap();
        let (lo10, hi10) = g.enclose_at(&tag, 10).unwrap();
        let truth = rat(3, 8);
        assert!(lo4 <= truth && truth <= hi4);
        assert!(lo10 <= truth && truth <= hi10);
        assert!(&hi10 - &lo10 <= pow2(-10));
        // Limit code: the tent gauge at its peak.
        let b = Gauge::Baire(crate::bairefun::mk_tent_at_third());
        let (lo, hi) = b.enclose_at(&tp(1, 3), 6).unwrap();
        assert!(lo <= rat_int(1) && rat_int(1) <= hi);
        // Symbolic: exact, zero width.
        let s = dirichlet_gauge(&rat(1, 4));
        let (lo, hi) = s.enclose_at(&tag, 0).unwrap();
        assert_eq!(lo, hi);
    }
}
