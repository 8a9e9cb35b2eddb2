//! Timed valuation monoids and their product variants.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, fmt_q, Q};

/// A monoid element. `Real` only shows up as a discounted value.
#[derive(Debug, Clone)]
pub enum Weight {
    Rat(Q),
    Real(f64),
    Inf,
}

impl Weight {
    pub fn rat(n: i64) -> Weight {
        Weight::Rat(rational::int(n))
    }

    pub fn zero_q() -> Weight {
        Weight::Rat(Q::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Weight::Inf)
    }

    pub fn as_rat(&self) -> Option<&Q> {
        match self {
            Weight::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Rat(q) => rational::to_f64(q),
            Weight::Real(x) => *x,
            Weight::Inf => f64::INFINITY,
        }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        match (self, other) {
            (Weight::Inf, _) | (_, Weight::Inf) => Weight::Inf,
            (Weight::Rat(a), Weight::Rat(b)) => Weight::Rat(a + b),
            (a, b) => Weight::Real(a.to_f64() + b.to_f64()),
        }
    }

    /// Multiplication with `x·∞ = ∞·x = ∞`, including `x = 0`.
    pub fn mul(&self, other: &Weight) -> Weight {
        match (self, other) {
            (Weight::Inf, _) | (_, Weight::Inf) => Weight::Inf,
            (Weight::Rat(a), Weight::Rat(b)) => Weight::Rat(a * b),
            (a, b) => Weight::Real(a.to_f64() * b.to_f64()),
        }
    }

    pub fn min(&self, other: &Weight) -> Weight {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Exact for rationals and ∞; `Real` compares within `tol`.
    pub fn approx_eq(&self, other: &Weight, tol: f64) -> bool {
        match (self, other) {
            (Weight::Inf, Weight::Inf) => true,
            (Weight::Inf, _) | (_, Weight::Inf) => false,
            (Weight::Rat(a), Weight::Rat(b)) => a == b,
            (a, b) => (a.to_f64() - b.to_f64()).abs() <= tol,
        }
    }

    pub fn parse(text: &str) -> Result<Weight> {
        let s = text.trim();
        if matches!(s, "inf" | "∞" | "+inf" | "Infinity") {
            return Ok(Weight::Inf);
        }
        rational::parse_q(s).map(Weight::Rat)
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Weight::Inf, Weight::Inf) => Some(Ordering::Equal),
            (Weight::Inf, _) => Some(Ordering::Greater),
            (_, Weight::Inf) => Some(Ordering::Less),
            (Weight::Rat(a), Weight::Rat(b)) => a.partial_cmp(b),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Rat(q) => f.write_str(&fmt_q(q)),
            Weight::Real(x) => write!(f, "{}", fmt_real(*x)),
            Weight::Inf => f.write_str("inf"),
        }
    }
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl From<Q> for Weight {
    fn from(q: Q) -> Self {
        Weight::Rat(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlusOp {
    Min,
    Add,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ValKind {
    Sum,
    Avg,
    Disc { lambda: f64 },
    Prod,
}

/// `(M, +, val, 0)` assembled from built-in combinators. The flags are
/// declarations; [`check_axioms`] tests them against the operations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedValuationMonoid {
    pub id: String,
    pub plus: PlusOp,
    pub zero: Weight,
    pub val: ValKind,
    pub idempotent: bool,
    pub location_independent: bool,
}

impl TimedValuationMonoid {
    pub fn sum() -> Self {
        Self::with_flags("sum", PlusOp::Min, ValKind::Sum, true, false)
    }

    pub fn avg() -> Self {
        Self::with_flags("avg", PlusOp::Min, ValKind::Avg, true, false)
    }

    pub fn disc(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::UnknownMonoid(format!(
                "discount factor must lie in (0,1), got {lambda}"
            )));
        }
        Ok(Self::with_flags(
            &format!("disc:{lambda}"),
            PlusOp::Min,
            ValKind::Disc { lambda },
            true,
            false,
        ))
    }

    /// Naturals under addition, `val = m′₁·…·m′ₙ`.
    pub fn prod() -> Self {
        Self::with_flags("prod", PlusOp::Add, ValKind::Prod, false, true)
    }

    pub fn with_flags(
        id: &str,
        plus: PlusOp,
        val: ValKind,
        idempotent: bool,
        location_independent: bool,
    ) -> Self {
        let zero = match plus {
            PlusOp::Min => Weight::Inf,
            PlusOp::Add => Weight::zero_q(),
        };
        TimedValuationMonoid {
            id: id.to_string(),
            plus,
            zero,
            val,
            idempotent,
            location_independent,
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        match id.trim() {
            "sum" => Ok(Self::sum()),
            "avg" => Ok(Self::avg()),
            "prod" => Ok(Self::prod()),
            s => match s.strip_prefix("disc:") {
                Some(l) => {
                    let lambda = rational::parse_q(l)
                        .map(|q| rational::to_f64(&q))
                        .map_err(|_| Error::UnknownMonoid(s.to_string()))?;
                    let mut m = Self::disc(lambda)?;
                    m.id = s.to_string();
                    Ok(m)
                }
                None => Err(Error::UnknownMonoid(s.to_string())),
            },
        }
    }

    pub fn add(&self, x: &Weight, y: &Weight) -> Weight {
        match self.plus {
            PlusOp::Min => x.min(y),
            PlusOp::Add => x.add(y),
        }
    }

    pub fn in_domain(&self, w: &Weight) -> bool {
        match (self.val, w) {
            (ValKind::Prod, Weight::Rat(q)) => rational::is_natural(q),
            (ValKind::Prod, _) => false,
            (_, Weight::Real(_)) => false,
            _ => true,
        }
    }

    pub fn sum_over<'a>(&self, values: impl IntoIterator<Item = &'a Weight>) -> Weight {
        values
            .into_iter()
            .fold(self.zero.clone(), |acc, v| self.add(&acc, v))
    }

    pub fn valuate(&self, v: &WeightPairWord) -> Weight {
        match self.val {
            ValKind::Sum => linear_total(v),
            ValKind::Avg => avg(v),
            ValKind::Disc { lambda } => disc(v, lambda),
            ValKind::Prod => v
                .steps
                .iter()
                .fold(Weight::Rat(Q::one()), |acc, s| acc.mul(&s.discrete)),
        }
    }
}

impl fmt::Display for TimedValuationMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// One step `((m, m′), t)`: `rate` is the location weight, `discrete` the edge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStep {
    pub rate: Weight,
    pub discrete: Weight,
    pub delay: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightPairWord {
    pub steps: Vec<WeightStep>,
}

impl WeightPairWord {
    pub fn new(steps: Vec<(Weight, Weight, Q)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some((_, _, t)) = steps.iter().find(|(_, _, t)| t.is_negative()) {
            return Err(Error::NegativeDelay(fmt_q(t)));
        }
        Ok(WeightPairWord {
            steps: steps
                .into_iter()
                .map(|(rate, discrete, delay)| WeightStep {
                    rate,
                    discrete,
                    delay,
                })
                .collect(),
        })
    }

    pub fn duration(&self) -> Q {
        self.steps.iter().fold(Q::zero(), |a, s| a + &s.delay)
    }
}

fn linear_total(v: &WeightPairWord) -> Weight {
    v.steps.iter().fold(Weight::zero_q(), |acc, s| {
        acc.add(&s.rate.mul(&Weight::Rat(s.delay.clone())))
            .add(&s.discrete)
    })
}

fn avg(v: &WeightPairWord) -> Weight {
    let total = v.duration();
    if total.is_positive() {
        return match linear_total(v) {
            Weight::Rat(q) => Weight::Rat(q / total),
            other => other,
        };
    }
    let first = &v.steps[0].rate;
    let uniform = matches!(first, Weight::Rat(_))
        && v.steps.iter().all(|s| &s.rate == first && s.discrete == Weight::zero_q());
    if uniform {
        first.clone()
    } else {
        Weight::Inf
    }
}

fn disc(v: &WeightPairWord, lambda: f64) -> Weight {
    if v.steps.iter().any(|s| s.rate.is_inf() || s.discrete.is_inf()) {
        return Weight::Inf;
    }
    let ln = lambda.ln();
    let mut prefix = Q::zero();
    let mut total = 0.0;
    for s in &v.steps {
        let t = rational::to_f64(&s.delay);
        let p = (rational::to_f64(&prefix) * ln).exp();
        let integral = (t * ln).exp_m1() / ln;
        total += p * (integral * s.rate.to_f64() + (t * ln).exp() * s.discrete.to_f64());
        prefix += &s.delay;
    }
    Weight::Real(total)
}

/// A valuation monoid with a multiplication `⋄` and unit `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPvMonoid {
    pub base: TimedValuationMonoid,
    pub one: Weight,
}

impl TimedPvMonoid {
    pub fn sum0() -> Self {
        Self::over("sum0", TimedValuationMonoid::sum())
    }

    pub fn avg0() -> Self {
        Self::over("avg0", TimedValuationMonoid::avg())
    }

    pub fn disc0(lambda: f64) -> Result<Self> {
        Ok(Self::over(&format!("disc0:{lambda}"), TimedValuationMonoid::disc(lambda)?))
    }

    fn over(id: &str, mut base: TimedValuationMonoid) -> Self {
        base.id = id.to_string();
        TimedPvMonoid {
            base,
            one: Weight::zero_q(),
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        let s = id.trim();
        match s {
            "sum0" => Ok(Self::sum0()),
            "avg0" => Ok(Self::avg0()),
            _ => match s.strip_prefix("disc0:") {
                Some(l) => {
                    let base = TimedValuationMonoid::parse(&format!("disc:{l}"))?;
                    Ok(Self::over(s, base))
                }
                None => Err(Error::UnknownMonoid(s.to_string())),
            },
        }
    }

    pub fn zero(&self) -> &Weight {
        &self.base.zero
    }

    /// `⋄` is addition with ∞ absorbing.
    pub fn diamond(&self, x: &Weight, y: &Weight) -> Weight {
        x.add(y)
    }

    pub fn id(&self) -> &str {
        &self.base.id
    }
}

pub fn sum_over<'a>(m: &TimedValuationMonoid, values: impl IntoIterator<Item = &'a Weight>) -> Weight {
    m.sum_over(values)
}

pub fn valuate(m: &TimedValuationMonoid, v: &WeightPairWord) -> Weight {
    m.valuate(v)
}

pub fn pv_diamond(m: &TimedPvMonoid, x: &Weight, y: &Weight) -> Weight {
    m.diamond(x, y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub monoid: String,
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

const TOL: f64 = 1e-9;

fn sample_value(m: &TimedValuationMonoid, rng: &mut ChaCha8Rng) -> Weight {
    if matches!(m.val, ValKind::Prod) {
        return Weight::rat(rng.gen_range(0..6));
    }
    if rng.gen_ratio(1, 8) {
        return Weight::Inf;
    }
    Weight::Rat(rational::q(rng.gen_range(-20..=20), rng.gen_range(1..=4)))
}

fn sample_delay(rng: &mut ChaCha8Rng) -> Q {
    if rng.gen_ratio(1, 6) {
        Q::zero()
    } else {
        rational::q(rng.gen_range(0..=12), rng.gen_range(1..=4))
    }
}

fn sample_word(m: &TimedValuationMonoid, rng: &mut ChaCha8Rng) -> Vec<(Weight, Weight, Q)> {
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| (sample_value(m, rng), sample_value(m, rng), sample_delay(rng)))
        .collect()
}

fn fixed_values(m: &TimedValuationMonoid) -> Vec<Weight> {
    let mut v = vec![Weight::rat(0), Weight::rat(1), Weight::rat(2)];
    if !matches!(m.val, ValKind::Prod) {
        v.push(Weight::Rat(rational::q(1, 2)));
        v.push(Weight::rat(-1));
        v.push(Weight::Inf);
    }
    v
}

fn record(out: &mut Vec<Violation>, axiom: &str, witness: String) {
    if !out.iter().any(|v| v.axiom == axiom) {
        out.push(Violation {
            axiom: axiom.to_string(),
            witness,
        });
    }
}

/// Randomised check of the monoid laws and of the declared flags. A handful
/// of fixed values are tried before the seeded samples so that small
/// witnesses are found first.
pub fn check_axioms(m: &TimedValuationMonoid, seed: u64, count: usize) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut values = fixed_values(m);
    values.extend((0..count).map(|_| sample_value(m, &mut rng)));

    for (i, x) in values.iter().enumerate() {
        let y = &values[(i * 7 + 3) % values.len()];
        let z = &values[(i * 13 + 5) % values.len()];
        if !m.add(x, y).approx_eq(&m.add(y, x), TOL) {
            record(&mut out, "commutativity", format!("x={x}, y={y}"));
        }
        if !m.add(&m.add(x, y), z).approx_eq(&m.add(x, &m.add(y, z)), TOL) {
            record(&mut out, "associativity", format!("x={x}, y={y}, z={z}"));
        }
        if !m.add(x, &m.zero).approx_eq(x, TOL) {
            record(&mut out, "zero is neutral", format!("x={x}"));
        }
        let idem = m.add(x, x).approx_eq(x, TOL);
        if m.idempotent && !idem {
            record(&mut out, "x plus x = x", format!("x={x}, x plus x={}", m.add(x, x)));
        }
    }
    if !m.idempotent && values.iter().all(|x| m.add(x, x).approx_eq(x, TOL)) {
        record(&mut out, "declared non-idempotent", "plus was idempotent on all samples".into());
    }

    let mut words: Vec<Vec<(Weight, Weight, Q)>> = vec![vec![(
        Weight::rat(1),
        Weight::rat(0),
        Q::one(),
    )]];
    words.extend((0..count.max(1)).map(|_| sample_word(m, &mut rng)));
    let mut li_witness = None;
    for steps in &words {
        let v = WeightPairWord::new(steps.clone()).expect("sampled words are well formed");
        let changed: Vec<_> = steps
            .iter()
            .map(|(r, d, t)| {
                let r2 = match r {
                    Weight::Rat(q) => Weight::Rat(q + Q::one()),
                    _ => Weight::rat(0),
                };
                (r2, d.clone(), t.clone())
            })
            .collect();
        let v2 = WeightPairWord::new(changed).unwrap();
        let (a, b) = (m.valuate(&v), m.valuate(&v2));
        if !a.approx_eq(&b, TOL) && li_witness.is_none() {
            li_witness = Some(format!(
                "{} gives {a}, {} gives {b}",
                show_word(&v),
                show_word(&v2)
            ));
        }
    }
    match (m.location_independent, li_witness) {
        (true, Some(w)) => record(&mut out, "location independence", w),
        (false, None) => record(
            &mut out,
            "declared location-dependent",
            "val ignored first components on all samples".into(),
        ),
        _ => {}
    }

    AxiomReport {
        monoid: m.id.clone(),
        samples: count,
        violations: out,
    }
}

/// The monoid checks plus the product laws.
pub fn check_pv_axioms(m: &TimedPvMonoid, seed: u64, count: usize) -> AxiomReport {
    let mut report = check_axioms(&m.base, seed, count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut out = std::mem::take(&mut report.violations);
    let mut values = fixed_values(&m.base);
    values.extend((0..count).map(|_| sample_value(&m.base, &mut rng)));
    for x in &values {
        if !m.diamond(x, &m.one).approx_eq(x, TOL) || !m.diamond(&m.one, x).approx_eq(x, TOL) {
            record(&mut out, "unit of diamond", format!("m={x}"));
        }
        let z = m.zero();
        if !m.diamond(x, z).approx_eq(z, TOL) || !m.diamond(z, x).approx_eq(z, TOL) {
            record(&mut out, "zero absorbs diamond", format!("m={x}"));
        }
    }
    for _ in 0..count.max(1) {
        let n = rng.gen_range(1..=4);
        let ones: Vec<_> = (0..n)
            .map(|_| (m.one.clone(), m.one.clone(), sample_delay(&mut rng)))
            .collect();
        let v = WeightPairWord::new(ones).unwrap();
        if !m.base.valuate(&v).approx_eq(&m.one, TOL) {
            record(&mut out, "val of all-(1,1) word is 1", show_word(&v));
        }
        let mut steps = sample_word(&m.base, &mut rng);
        let k = rng.gen_range(0..steps.len());
        steps[k].1 = m.zero().clone();
        let v = WeightPairWord::new(steps).unwrap();
        if !m.base.valuate(&v).approx_eq(m.zero(), TOL) {
            record(&mut out, "val is zero when some m' is zero", show_word(&v));
        }
    }
    report.monoid = m.id().to_string();
    report.violations = out;
    report
}

pub fn show_word(v: &WeightPairWord) -> String {
    v.steps
        .iter()
        .map(|s| format!("(({},{}),{})", s.rate, s.discrete, fmt_q(&s.delay)))
        .collect()
}
