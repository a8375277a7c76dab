//! Fast-Cauchy real numbers with exact rational approximants.
//!
//! A real is an oracle n -> q_n with |q_m - q_n| <= 2^-m for all m <= n; the
//! limit is within 2^-n of q_n. Order and equality against such codes are only
//! semi-decidable, so comparisons here take a budget and may return an
//! explicitly inconclusive verdict. A definitive verdict returned at budget B
//! is returned at every budget >= B.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::codings::{fmt_rat, pow2, Rat};

#[derive(Debug, Clone)]
pub enum Provenance {
    Rational(Rat),
    CertIrrational(String),
    Composite(String),
}

struct RealInner {
    oracle: Box<dyn Fn(u32) -> Rat + Send + Sync>,
    cache: Mutex<BTreeMap<u32, Rat>>,
    provenance: Provenance,
}

/// A fast-Cauchy coded real. Cloning shares the memoized oracle.
#[derive(Clone)]
pub struct FastReal {
    inner: Arc<RealInner>,
}

impl fmt::Debug for FastReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FastReal({} ~ {})", self.describe(), fmt_rat(&self.approx(10)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmpVerdict {
    Less,
    Greater,
    UnknownAtBudget(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqVerdict {
    Apart,
    IndistinguishableAtBudget(u32),
}

/// Smallest t with 2^t >= r; requires r > 0.
pub fn ceil_log2(r: &Rat) -> i64 {
    assert!(r.is_positive(), "ceil_log2 needs a positive argument");
    let mut t = r.numer().bits() as i64 - r.denom().bits() as i64 - 1;
    while pow2(t) < *r {
        t += 1;
    }
    while t > i64::MIN + 1 && pow2(t - 1) >= *r {
        t -= 1;
    }
    t
}

impl FastReal {
    /// Wraps an approximation oracle. The caller owes the fast-Cauchy bound
    /// |oracle(m) - oracle(n)| <= 2^-m for m <= n; nothing checks it here.
    pub fn from_oracle<F>(oracle: F, provenance: Provenance) -> Self
    where
        F: Fn(u32) -> Rat + Send + Sync + 'static,
    {
        FastReal {
            inner: Arc::new(RealInner {
                oracle: Box::new(oracle),
                cache: Mutex::new(BTreeMap::new()),
                provenance,
            }),
        }
    }

    pub fn from_rational(q: Rat) -> Self {
        let held = q.clone();
        FastReal::from_oracle(move |_| held.clone(), Provenance::Rational(q))
    }

    /// n-th approximant, memoized. Thread-safe; the oracle is pure so the
    /// stored value is the same under any interleaving.
    pub fn approx(&self, n: u32) -> Rat {
        if let Some(q) = self.inner.cache.lock().unwrap().get(&n) {
            return q.clone();
        }
        let q = (self.inner.oracle)(n);
        self.inner
            .cache
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| q.clone());
        q
    }

    pub fn provenance(&self) -> &Provenance {
        &self.inner.provenance
    }

    pub fn describe(&self) -> String {
        match &self.inner.provenance {
            Provenance::Rational(q) => fmt_rat(q),
            Provenance::CertIrrational(name) => name.clone(),
            Provenance::Composite(desc) => desc.clone(),
        }
    }

    /// Exact rational value when the provenance records one.
    pub fn as_rational(&self) -> Option<&Rat> {
        match &self.inner.provenance {
            Provenance::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// x + y with index shift n+1: each operand contributes at most 2^-(m+1)
    /// of drift, so the sum drifts at most 2^-m.
    pub fn add(&self, other: &FastReal) -> FastReal {
        let (x, y) = (self.clone(), other.clone());
        let prov = compose_rational(self, other, |a, b| a + b, "+");
        FastReal::from_oracle(move |n| x.approx(n + 1) + y.approx(n + 1), prov)
    }

    pub fn neg(&self) -> FastReal {
        let x = self.clone();
        let prov = match &self.inner.provenance {
            Provenance::Rational(q) => Provenance::Rational(-q.clone()),
            _ => Provenance::Composite(format!("-({})", self.describe())),
        };
        FastReal::from_oracle(move |n| -x.approx(n), prov)
    }

    pub fn sub(&self, other: &FastReal) -> FastReal {
        self.add(&other.neg())
    }

    /// Pointwise absolute value; ||a| - |b|| <= |a - b| keeps the rate.
    pub fn abs(&self) -> FastReal {
        let x = self.clone();
        let prov = match &self.inner.provenance {
            Provenance::Rational(q) => Provenance::Rational(q.abs()),
            _ => Provenance::Composite(format!("|{}|", self.describe())),
        };
        FastReal::from_oracle(move |n| x.approx(n).abs(), prov)
    }

    /// x * y with index shift n+k where 2^k >= ceil|x_0| + ceil|y_0| + 2.
    /// |x_{m+k} y_{m+k} - x_{n+k} y_{n+k}| <= (|x_0|+1 + |y_0|+1) 2^-(m+k),
    /// and the shift absorbs the magnitude factor.
    pub fn mul(&self, other: &FastReal) -> FastReal {
        let (x, y) = (self.clone(), other.clone());
        let prov = compose_rational(self, other, |a, b| a * b, "*");
        FastReal::from_oracle(
            move |n| {
                let bound = x.approx(0).abs().ceil() + y.approx(0).abs().ceil() + Rat::from_integer(BigInt::from(2));
                let k = ceil_log2(&bound).max(0) as u32;
                x.approx(n + k) * y.approx(n + k)
            },
            prov,
        )
    }

    /// a + b*x for exact rationals a, b; shift absorbs |b|.
    pub fn affine(a: &Rat, b: &Rat, x: &FastReal) -> FastReal {
        if b.is_zero() {
            return FastReal::from_rational(a.clone());
        }
        let shift = ceil_log2(&b.abs()).max(0) as u32;
        let (a, b, x2) = (a.clone(), b.clone(), x.clone());
        let prov = match x.provenance() {
            Provenance::Rational(q) => Provenance::Rational(&a + &b * q),
            _ => Provenance::CertIrrational(format!(
                "{} + {} * ({})",
                fmt_rat(&a),
                fmt_rat(&b),
                x.describe()
            )),
        };
        FastReal::from_oracle(move |n| &a + &b * x2.approx(n + shift), prov)
    }

    /// Three-valued order test: Less when some x_k + 2^{1-k} < y_k with
    /// k <= budget (then the limits satisfy x < y outright), dually Greater.
    pub fn compare_budgeted(&self, other: &FastReal, budget: u32) -> CmpVerdict {
        for k in 0..=budget {
            let xk = self.approx(k);
            let yk = other.approx(k);
            let slack = pow2(1 - k as i64);
            if &xk + &slack < yk {
                return CmpVerdict::Less;
            }
            if &yk + &slack < xk {
                return CmpVerdict::Greater;
            }
        }
        CmpVerdict::UnknownAtBudget(budget)
    }

    /// Apart when some |x_k - y_k| > 2^{1-k} with k <= budget; equality of
    /// the coded reals is exactly "never apart".
    pub fn eq_budgeted(&self, other: &FastReal, budget: u32) -> EqVerdict {
        for k in 0..=budget {
            if (self.approx(k) - other.approx(k)).abs() > pow2(1 - k as i64) {
                return EqVerdict::Apart;
            }
        }
        EqVerdict::IndistinguishableAtBudget(budget)
    }

    pub fn compare_rat(&self, q: &Rat, budget: u32) -> CmpVerdict {
        self.compare_budgeted(&FastReal::from_rational(q.clone()), budget)
    }

    /// Certified enclosure from the n-th approximant: the limit lies in
    /// [q_n - 2^-n, q_n + 2^-n].
    pub fn enclosure(&self, n: u32) -> (Rat, Rat) {
        let q = self.approx(n);
        let eps = pow2(-(n as i64));
        (&q - &eps, &q + &eps)
    }
}

fn compose_rational(
    x: &FastReal,
    y: &FastReal,
    op: impl Fn(&Rat, &Rat) -> Rat,
    sym: &str,
) -> Provenance {
    match (x.provenance(), y.provenance()) {
        (Provenance::Rational(a), Provenance::Rational(b)) => Provenance::Rational(op(a, b)),
        _ => Provenance::Composite(format!("({}) {} ({})", x.describe(), sym, y.describe())),
    }
}

/// sqrt(2)/2 with approximants floor(sqrt(2) * 2^{n+1}) / 2^{n+2}; the
/// truncation error is under 2^{-n-2}, leaving slack below the fast-Cauchy
/// rate. The point is apart from every rational, which is what certifies the
/// irrationality for tag purposes.
pub fn sqrt2_over_2() -> FastReal {
    FastReal::from_oracle(
        |n| {
            let p = n as usize + 1;
            let s = (num_bigint::BigUint::from(2u32) << (2 * p)).sqrt();
            Rat::new(BigInt::from(s), BigInt::one() << (p + 1))
        },
        Provenance::CertIrrational("sqrt2/2".to_string()),
    )
}

/// A point of [0,1] usable as a partition tag: either an exact rational or a
/// certified irrational carried as a fast-Cauchy code plus a witness name.
#[derive(Debug, Clone)]
pub enum TagPoint {
    ExactRat(Rat),
    CertIrrational { real: FastReal, name: String },
}

impl TagPoint {
    pub fn rational(q: Rat) -> Self {
        TagPoint::ExactRat(q)
    }

    pub fn irrational(real: FastReal, name: impl Into<String>) -> Self {
        TagPoint::CertIrrational {
            real,
            name: name.into(),
        }
    }

    pub fn sqrt2_over_2() -> Self {
        TagPoint::irrational(sqrt2_over_2(), "sqrt2/2")
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            TagPoint::ExactRat(q) => Some(q),
            TagPoint::CertIrrational { .. } => None,
        }
    }

    pub fn as_real(&self) -> FastReal {
        match self {
            TagPoint::ExactRat(q) => FastReal::from_rational(q.clone()),
            TagPoint::CertIrrational { real, .. } => real.clone(),
        }
    }

    pub fn approx(&self, n: u32) -> Rat {
        match self {
            TagPoint::ExactRat(q) => q.clone(),
            TagPoint::CertIrrational { real, .. } => real.approx(n),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TagPoint::ExactRat(q) => fmt_rat(q),
            TagPoint::CertIrrational { name, .. } => name.clone(),
        }
    }
}
