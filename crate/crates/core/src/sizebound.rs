//! Size-bound bookkeeping for a graded-encoding instantiation.
//!
//! In a graded-encoding setting the "exponents" must be short ring elements,
//! and the allowed size grows with the level. [`BoundedMap`] runs every
//! computation on the reference backend while carrying, for each scalar and
//! element, a base-2 logarithm of its size bound together with a factor
//! count (how many fresh size-`2^k` factors the bound stands for). Any
//! element whose bound exceeds its level budget `f(i+1) 2^{(i+1)k}` is
//! rejected with [`MapError::BudgetExceeded`].
//!
//! Bound rules:
//!
//! * product of `(L_x, m_x)` and `(L_y, m_y)` gives
//!   `(L_x + L_y + F(m_x+m_y) - F(m_x) - F(m_y), m_x + m_y)` with
//!   `F = log2 f` and `F(0) = 0`. A product of `m` fresh factors therefore
//!   telescopes to `mk + F(m) - m F(1) <= F(m) + mk`.
//! * sum gives `(log2(2^{L_x} + 2^{L_y}), max(m_x, m_y))`, upper-bounded by a
//!   rational.
//!
//! The symbol `k` above is the size exponent ([`GrowthProfile::size_bits`]),
//! not the multilinearity degree.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::mlmap::{
    canonical_decimal, ElementCodec, GroupDescriptor, LevelledElement, MapError, MultilinearMap, ReferenceMap, Scalar,
};

/// `log2` of a size bound.
pub type LogBound = Ratio<i64>;

type LogGrowth = dyn Fn(u32) -> LogBound + Send + Sync;

/// The size exponent `k` and the growth function `m -> log2 f(m)`.
#[derive(Clone)]
pub struct GrowthProfile {
    size_bits: u32,
    log_f: Arc<LogGrowth>,
    standard: bool,
}

impl GrowthProfile {
    /// `f(m) = 2^{m * ceil(log2(m+1))}`.
    pub fn standard(size_bits: u32) -> Self {
        GrowthProfile {
            size_bits,
            log_f: Arc::new(|m| LogBound::from_integer(i64::from(m) * i64::from(ceil_log2(m + 1)))),
            standard: true,
        }
    }

    pub fn with_growth(size_bits: u32, log_f: impl Fn(u32) -> LogBound + Send + Sync + 'static) -> Self {
        GrowthProfile {
            size_bits,
            log_f: Arc::new(log_f),
            standard: false,
        }
    }

    pub fn size_bits(&self) -> u32 {
        self.size_bits
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `log2 f(m)`, with `F(0) = 0` for constants.
    pub fn log_f(&self, m: u32) -> LogBound {
        if m == 0 {
            LogBound::zero()
        } else {
            (self.log_f)(m)
        }
    }

    fn k(&self) -> LogBound {
        LogBound::from_integer(i64::from(self.size_bits))
    }

    /// `log2 f(i+1) + (i+1) k`.
    pub fn level_budget(&self, level: usize) -> LogBound {
        let m = level as u32 + 1;
        self.log_f(m) + self.k() * LogBound::from_integer(i64::from(m))
    }

    /// `F` must be strictly increasing on `1..=max_factors` and `f(1) >= 1`.
    pub fn validate(&self, max_factors: u32) -> Result<(), String> {
        if self.log_f(1) < LogBound::zero() {
            return Err("growth function must satisfy f(1) >= 1".into());
        }
        for m in 1..max_factors {
            if self.log_f(m + 1) <= self.log_f(m) {
                return Err(format!("growth function is not strictly increasing at m={m}"));
            }
        }
        Ok(())
    }

    fn slack(&self, mx: u32, my: u32) -> LogBound {
        self.log_f(mx + my) - self.log_f(mx) - self.log_f(my)
    }
}

impl fmt::Debug for GrowthProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthProfile")
            .field("size_bits", &self.size_bits)
            .field("standard", &self.standard)
            .finish()
    }
}

fn ceil_log2(v: u32) -> u32 {
    if v <= 1 {
        0
    } else {
        32 - (v - 1).leading_zeros()
    }
}

/// True iff `a_bound > b_bound + k`: a value of size `A` statistically hides
/// an added value of size `B` once `A > B 2^k`.
pub fn check_hiding(a_bound: LogBound, b_bound: LogBound, profile: &GrowthProfile) -> bool {
    a_bound > b_bound + profile.k()
}

/// Upper bound on `log2(2^a + 2^b)` as a rational.
fn log_sum(a: LogBound, b: LogBound) -> LogBound {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let gap = (hi - lo).floor().to_integer();
    // log2(1 + 2^-d) <= min(1, 1.5 * 2^-floor(d))
    let bump = if gap <= 0 {
        LogBound::one()
    } else {
        let t = gap.min(30) as u32;
        LogBound::new(3, 1i64 << (t + 1))
    };
    hi + bump
}

/// Smallest integer `b` with `v <= 2^b`; zero for `v <= 1`.
fn log_of_small(v: u64) -> LogBound {
    if v <= 1 {
        LogBound::zero()
    } else {
        LogBound::from_integer(i64::from(64 - (v - 1).leading_zeros()))
    }
}

#[derive(Clone, Debug)]
pub struct BoundedScalar {
    value: Scalar,
    log_bound: LogBound,
    factors: u32,
}

impl BoundedScalar {
    pub fn value(&self) -> &Scalar {
        &self.value
    }
    pub fn log_bound(&self) -> LogBound {
        self.log_bound
    }
    pub fn factors(&self) -> u32 {
        self.factors
    }
}

/// Values compare equal regardless of their bounds.
impl PartialEq for BoundedScalar {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Clone, Debug)]
pub struct BoundedElement {
    inner: LevelledElement,
    log_bound: LogBound,
    factors: u32,
}

impl BoundedElement {
    pub fn inner(&self) -> &LevelledElement {
        &self.inner
    }
    pub fn level(&self) -> usize {
        self.inner.level()
    }
    pub fn log_bound(&self) -> LogBound {
        self.log_bound
    }
    pub fn factors(&self) -> u32 {
        self.factors
    }
}

/// Group elements compare equal regardless of their bounds.
impl PartialEq for BoundedElement {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Largest bound observed at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelUsage {
    pub level: usize,
    pub max_log_bound: LogBound,
    pub budget: LogBound,
}

impl LevelUsage {
    pub fn utilization(&self) -> f64 {
        let ratio = |r: LogBound| *r.numer() as f64 / *r.denom() as f64;
        if self.budget.is_zero() {
            return 0.0;
        }
        ratio(self.max_log_bound) / ratio(self.budget)
    }
}

/// Reference backend decorated with size bounds.
pub struct BoundedMap {
    inner: ReferenceMap,
    profile: GrowthProfile,
    high_water: Mutex<Vec<Option<LogBound>>>,
}

impl Clone for BoundedMap {
    fn clone(&self) -> Self {
        BoundedMap {
            inner: self.inner.clone(),
            profile: self.profile.clone(),
            high_water: Mutex::new(self.high_water.lock().unwrap().clone()),
        }
    }
}

impl fmt::Debug for BoundedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedMap")
            .field("group", self.inner.group())
            .field("profile", &self.profile)
            .finish()
    }
}

impl BoundedMap {
    pub fn new(group: GroupDescriptor, profile: GrowthProfile) -> Result<Self, MapError> {
        let k = group.k();
        profile.validate(2 * k as u32).map_err(MapError::InvalidProfile)?;
        Ok(BoundedMap {
            inner: ReferenceMap::new(group),
            profile,
            high_water: Mutex::new(vec![None; k]),
        })
    }

    pub fn profile(&self) -> &GrowthProfile {
        &self.profile
    }

    pub fn reference(&self) -> &ReferenceMap {
        &self.inner
    }

    pub fn level_budget(&self, level: usize) -> LogBound {
        self.profile.level_budget(level)
    }

    /// Fresh element at `level` sized to the full level budget.
    pub fn bounded_sample(&self, rng: &mut dyn RngCore, level: usize) -> Result<BoundedElement, MapError> {
        let inner = self.inner.sample_element(rng, level)?;
        self.admit(inner, self.level_budget(level), level as u32 + 1)
    }

    /// The level-1 encoding randomness `s`, of size `2^k`.
    pub fn bounded_sample_s(&self, rng: &mut dyn RngCore) -> BoundedElement {
        let inner = self.inner.sample_element(rng, 1).expect("level 1 always exists");
        self.admit(inner, self.profile.k(), 1)
            .expect("a size-2^k element fits the level-1 budget")
    }

    /// Per-level high-water marks of every element produced so far.
    pub fn usage(&self) -> Vec<LevelUsage> {
        self.high_water
            .lock()
            .unwrap()
            .iter()
            .enumerate()
            .filter_map(|(i, hw)| {
                hw.map(|max_log_bound| LevelUsage {
                    level: i + 1,
                    max_log_bound,
                    budget: self.level_budget(i + 1),
                })
            })
            .collect()
    }

    fn admit(&self, inner: LevelledElement, log_bound: LogBound, factors: u32) -> Result<BoundedElement, MapError> {
        let level = inner.level();
        let budget = self.level_budget(level);
        if log_bound > budget {
            return Err(MapError::BudgetExceeded {
                level,
                log_bound: log_bound.to_string(),
                budget: budget.to_string(),
            });
        }
        let mut hw = self.high_water.lock().unwrap();
        let slot = &mut hw[level - 1];
        if slot.is_none_or(|cur| log_bound > cur) {
            *slot = Some(log_bound);
        }
        Ok(BoundedElement {
            inner,
            log_bound,
            factors,
        })
    }

    fn product(&self, lx: LogBound, mx: u32, ly: LogBound, my: u32) -> (LogBound, u32) {
        (lx + ly + self.profile.slack(mx, my), mx + my)
    }

    fn short(&self, value: Scalar) -> BoundedScalar {
        BoundedScalar {
            value,
            log_bound: self.profile.k(),
            factors: 1,
        }
    }
}

impl MultilinearMap for BoundedMap {
    type Scalar = BoundedScalar;
    type Element = BoundedElement;

    fn group(&self) -> &GroupDescriptor {
        self.inner.group()
    }

    fn scalar(&self, v: u64) -> BoundedScalar {
        BoundedScalar {
            value: self.inner.scalar(v),
            log_bound: log_of_small(v),
            factors: 0,
        }
    }

    /// Randomness headed for level `L >= 2` is drawn at the budget of level
    /// `L - 1`, leaving the top factor of the level-`L` budget for the
    /// products and sums it is combined with. Level-1 randomness is short.
    fn sample_scalar(&self, rng: &mut dyn RngCore, level: usize) -> Result<BoundedScalar, MapError> {
        self.group().check_level(level)?;
        let value = self.inner.sample_short(rng);
        if level <= 1 {
            return Ok(self.short(value));
        }
        Ok(BoundedScalar {
            value,
            log_bound: self.level_budget(level - 1),
            factors: level as u32,
        })
    }

    fn sample_short(&self, rng: &mut dyn RngCore) -> BoundedScalar {
        self.short(self.inner.sample_short(rng))
    }

    fn scalar_add(&self, a: &BoundedScalar, b: &BoundedScalar) -> BoundedScalar {
        BoundedScalar {
            value: self.inner.scalar_add(&a.value, &b.value),
            log_bound: log_sum(a.log_bound, b.log_bound),
            factors: a.factors.max(b.factors),
        }
    }

    fn scalar_mul(&self, a: &BoundedScalar, b: &BoundedScalar) -> BoundedScalar {
        let (log_bound, factors) = self.product(a.log_bound, a.factors, b.log_bound, b.factors);
        BoundedScalar {
            value: self.inner.scalar_mul(&a.value, &b.value),
            log_bound,
            factors,
        }
    }

    fn scalar_neg(&self, a: &BoundedScalar) -> BoundedScalar {
        BoundedScalar {
            value: self.inner.scalar_neg(&a.value),
            ..a.clone()
        }
    }

    fn encode(&self, a: &BoundedScalar, level: usize) -> Result<BoundedElement, MapError> {
        let inner = self.inner.encode(&a.value, level)?;
        self.admit(inner, a.log_bound, a.factors)
    }

    fn level(&self, x: &BoundedElement) -> usize {
        x.inner.level()
    }

    fn pair(&self, x: &BoundedElement, y: &BoundedElement) -> Result<BoundedElement, MapError> {
        let inner = self.inner.pair(&x.inner, &y.inner)?;
        let (log_bound, factors) = self.product(x.log_bound, x.factors, y.log_bound, y.factors);
        self.admit(inner, log_bound, factors)
    }

    fn mul(&self, x: &BoundedElement, y: &BoundedElement) -> Result<BoundedElement, MapError> {
        let inner = self.inner.mul(&x.inner, &y.inner)?;
        self.admit(inner, log_sum(x.log_bound, y.log_bound), x.factors.max(y.factors))
    }

    fn inv(&self, x: &BoundedElement) -> Result<BoundedElement, MapError> {
        let inner = self.inner.inv(&x.inner)?;
        self.admit(inner, x.log_bound, x.factors)
    }

    fn pow(&self, x: &BoundedElement, a: &BoundedScalar) -> Result<BoundedElement, MapError> {
        let inner = self.inner.pow(&x.inner, &a.value)?;
        let (log_bound, factors) = self.product(x.log_bound, x.factors, a.log_bound, a.factors);
        self.admit(inner, log_bound, factors)
    }

    fn sample_element(&self, rng: &mut dyn RngCore, level: usize) -> Result<BoundedElement, MapError> {
        self.bounded_sample(rng, level)
    }
}

/// `BOUNDS size_bits=<k>`; only the standard growth function is serializable.
pub fn render_bounds_line(profile: &GrowthProfile) -> String {
    format!("BOUNDS size_bits={}", profile.size_bits())
}

pub fn parse_bounds_line(line: &str) -> Result<GrowthProfile, MapError> {
    let size_bits = line
        .strip_prefix("BOUNDS size_bits=")
        .and_then(canonical_decimal)
        .and_then(|v| u32::try_from(&v).ok())
        .ok_or_else(|| MapError::Malformed(line.to_string()))?;
    Ok(GrowthProfile::standard(size_bits))
}

impl ElementCodec for BoundedMap {
    /// `L<level>:<exponent> b=<log bound> m=<factors>`
    fn render_element(&self, x: &BoundedElement) -> String {
        format!(
            "{} b={} m={}",
            self.inner.render_element(&x.inner),
            x.log_bound,
            x.factors
        )
    }

    fn parse_element(&self, s: &str) -> Result<BoundedElement, MapError> {
        let malformed = || MapError::Malformed(s.to_string());
        let mut parts = s.split(' ');
        let inner = self.inner.parse_element(parts.next().ok_or_else(malformed)?)?;
        let bound_text = parts.next().and_then(|t| t.strip_prefix("b=")).ok_or_else(malformed)?;
        let log_bound: LogBound = bound_text.parse().map_err(|_| malformed())?;
        if log_bound.to_string() != bound_text {
            return Err(malformed());
        }
        let factors = parts
            .next()
            .and_then(|t| t.strip_prefix("m="))
            .and_then(canonical_decimal)
            .and_then(|v| u32::try_from(&v).ok())
            .ok_or_else(malformed)?;
        if parts.next().is_some() {
            return Err(malformed());
        }
        self.admit(inner, log_bound, factors)
    }

    fn header_lines(&self) -> Vec<String> {
        vec![self.group().render(), render_bounds_line(&self.profile)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pow2_profile(size_bits: u32) -> GrowthProfile {
        // f(m) = 2^m
        GrowthProfile::with_growth(size_bits, |m| LogBound::from_integer(i64::from(m)))
    }

    use num_bigint::BigUint;

    fn map(k: usize, profile: GrowthProfile) -> BoundedMap {
        BoundedMap::new(GroupDescriptor::new(BigUint::from(101u32), k).unwrap(), profile).unwrap()
    }

    fn int(v: i64) -> LogBound {
        LogBound::from_integer(v)
    }

    #[test]
    fn level_budget_examples() {
        let p = pow2_profile(4);
        assert_eq!(p.level_budget(1), int(10));
        assert_eq!(p.level_budget(2), int(15));
        assert_eq!(pow2_profile(0).level_budget(1), p.log_f(2));
    }

    #[test]
    fn standard_growth_values() {
        let p = GrowthProfile::standard(0);
        let got: Vec<LogBound> = (0..=7).map(|m| p.log_f(m)).collect();
        let want: Vec<LogBound> = [0, 1, 4, 6, 12, 15, 18, 21].iter().map(|&v| int(v)).collect();
        assert_eq!(got, want);
        assert!(p.validate(64).is_ok());
    }

    #[test]
    fn hiding_boundaries() {
        let p = pow2_profile(4);
        assert!(check_hiding(int(10), int(5), &p));
        assert!(!check_hiding(int(9), int(5), &p));
        assert!(!check_hiding(int(0), int(0), &pow2_profile(0)));
    }

    #[test]
    fn two_fresh_elements() {
        let m = map(3, pow2_profile(4));
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = m.bounded_sample_s(&mut rng);
        let y = m.bounded_sample_s(&mut rng);
        let xy = m.pair(&x, &y).unwrap();
        assert_eq!(xy.level(), 2);
        assert!(xy.log_bound() <= m.profile().log_f(2) + int(8));
        assert!(xy.log_bound() <= m.level_budget(1));
    }

    #[test]
    fn identity_bounded_pairing_adds_no_slack() {
        let m = map(3, pow2_profile(4));
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = m.bounded_sample(&mut rng, 1).unwrap();
        let g = m.generator(1).unwrap();
        assert_eq!(g.log_bound(), int(0));
        let gx = m.pair(&g, &x).unwrap();
        assert_eq!(gx.log_bound(), x.log_bound() + m.profile().slack(0, x.factors()));
        assert_eq!(gx.log_bound(), x.log_bound());
    }

    #[test]
    fn budget_elements_overflow_when_paired() {
        let m = map(3, pow2_profile(4));
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = m.bounded_sample(&mut rng, 1).unwrap();
        let y = m.bounded_sample(&mut rng, 1).unwrap();
        assert!(matches!(m.pair(&x, &y), Err(MapError::BudgetExceeded { level: 2, .. })));
    }

    #[test]
    fn sampling_examples() {
        let m = map(3, GrowthProfile::standard(4));
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        assert_eq!(m.bounded_sample(&mut rng, 1).unwrap().log_bound(), m.level_budget(1));
        assert_eq!(m.bounded_sample_s(&mut rng).log_bound(), int(4));
        assert!(matches!(
            m.bounded_sample(&mut rng, 4),
            Err(MapError::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn sum_bound_is_sound() {
        for (a, b) in [(0, 0), (5, 3), (10, 10), (7, 0), (70, 1)] {
            let got = log_sum(int(a), int(b));
            let exact = ((a as f64).exp2() + (b as f64).exp2()).log2();
            let got_f = *got.numer() as f64 / *got.denom() as f64;
            assert!(got_f + 1e-12 >= exact, "{a} {b}");
            assert!(got_f <= (a.max(b) + 1) as f64);
        }
    }

    #[test]
    fn annotated_element_roundtrip() {
        let m = map(3, GrowthProfile::standard(4));
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let x = m.bounded_sample(&mut rng, 2).unwrap();
        let text = m.render_element(&x);
        let back = m.parse_element(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.log_bound(), x.log_bound());
        assert_eq!(m.render_element(&back), text);
        assert!(m.parse_element("L1:5 b=99 m=2").is_err());
        assert!(m.parse_element("L1:5 b=2/4 m=1").is_err());
    }

    #[test]
    fn usage_tracks_high_water() {
        let m = map(3, GrowthProfile::standard(4));
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let s = m.bounded_sample_s(&mut rng);
        let x = m.bounded_sample(&mut rng, 1).unwrap();
        let _ = m.pair(&s, &x).unwrap();
        let usage = m.usage();
        assert_eq!(usage.len(), 2);
        assert_eq!(usage[0].max_log_bound, m.level_budget(1));
        assert!(usage[1].utilization() <= 1.0);
    }
}
