//! Exponent-representation backend.
//!
//! Every element `g_i^a` is stored as the pair `(i, a mod p)`. Pairing
//! multiplies exponents, the group law adds them. This is correct and
//! completely insecure: anyone can read the discrete log off an element.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::RngCore;

use super::{canonical_decimal, ElementCodec, GroupDescriptor, MapError, MultilinearMap};

/// An exponent in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigUint);

impl Scalar {
    /// Rejects values that are not reduced modulo `p`.
    pub fn new(value: BigUint, gd: &GroupDescriptor) -> Result<Self, MapError> {
        if &value >= gd.p() {
            return Err(MapError::ScalarOutOfRange {
                value,
                p: gd.p().clone(),
            });
        }
        Ok(Scalar(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `g_level^exponent`. Equality is equality of level and exponent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LevelledElement {
    level: usize,
    exponent: BigUint,
}

impl LevelledElement {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_identity(&self) -> bool {
        self.exponent.is_zero()
    }
}

impl fmt::Debug for LevelledElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:{}", self.level, self.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceMap {
    group: GroupDescriptor,
}

impl ReferenceMap {
    pub fn new(group: GroupDescriptor) -> Self {
        ReferenceMap { group }
    }

    /// Group setup followed by wrapping: `G(1^λ, k)`.
    pub fn generate(security_bits: u32, k: usize, rng: &mut dyn RngCore) -> Result<Self, MapError> {
        Ok(ReferenceMap::new(GroupDescriptor::generate(security_bits, k, rng)?))
    }

    fn reduce(&self, v: BigUint) -> Scalar {
        Scalar(v % self.group.p())
    }

    fn element(&self, level: usize, exponent: BigUint) -> Result<LevelledElement, MapError> {
        self.group.check_level(level)?;
        Ok(LevelledElement { level, exponent })
    }
}

impl MultilinearMap for ReferenceMap {
    type Scalar = Scalar;
    type Element = LevelledElement;

    fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    fn scalar(&self, v: u64) -> Scalar {
        self.reduce(BigUint::from(v))
    }

    fn sample_scalar(&self, rng: &mut dyn RngCore, level: usize) -> Result<Scalar, MapError> {
        self.group.check_level(level)?;
        Ok(self.sample_short(rng))
    }

    fn sample_short(&self, rng: &mut dyn RngCore) -> Scalar {
        Scalar(rng.gen_biguint_below(self.group.p()))
    }

    fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 + &b.0)
    }

    fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 * &b.0)
    }

    fn scalar_neg(&self, a: &Scalar) -> Scalar {
        if a.0.is_zero() {
            a.clone()
        } else {
            Scalar(self.group.p() - &a.0)
        }
    }

    fn encode(&self, a: &Scalar, level: usize) -> Result<LevelledElement, MapError> {
        self.element(level, a.0.clone())
    }

    fn level(&self, x: &LevelledElement) -> usize {
        x.level
    }

    fn pair(&self, x: &LevelledElement, y: &LevelledElement) -> Result<LevelledElement, MapError> {
        let level = x.level + y.level;
        if level > self.group.k() {
            return Err(MapError::LevelOverflow {
                left: x.level,
                right: y.level,
                k: self.group.k(),
            });
        }
        self.element(level, (&x.exponent * &y.exponent) % self.group.p())
    }

    fn mul(&self, x: &LevelledElement, y: &LevelledElement) -> Result<LevelledElement, MapError> {
        if x.level != y.level {
            return Err(MapError::LevelMismatch {
                left: x.level,
                right: y.level,
            });
        }
        self.element(x.level, (&x.exponent + &y.exponent) % self.group.p())
    }

    fn inv(&self, x: &LevelledElement) -> Result<LevelledElement, MapError> {
        let neg = self.scalar_neg(&Scalar(x.exponent.clone()));
        self.element(x.level, neg.0)
    }

    fn pow(&self, x: &LevelledElement, a: &Scalar) -> Result<LevelledElement, MapError> {
        self.element(x.level, (&x.exponent * &a.0) % self.group.p())
    }

    fn sample_element(&self, rng: &mut dyn RngCore, level: usize) -> Result<LevelledElement, MapError> {
        let a = self.sample_short(rng);
        self.encode(&a, level)
    }
}

impl ElementCodec for ReferenceMap {
    /// `L<level>:<decimal exponent>`
    fn render_element(&self, x: &LevelledElement) -> String {
        format!("L{}:{}", x.level, x.exponent)
    }

    fn parse_element(&self, s: &str) -> Result<LevelledElement, MapError> {
        let malformed = || MapError::Malformed(s.to_string());
        let rest = s.strip_prefix('L').ok_or_else(malformed)?;
        let (level, exponent) = rest.split_once(':').ok_or_else(malformed)?;
        let level = canonical_decimal(level)
            .and_then(|l| usize::try_from(&l).ok())
            .ok_or_else(malformed)?;
        let exponent = canonical_decimal(exponent).ok_or_else(malformed)?;
        let exponent = Scalar::new(exponent, &self.group)?;
        self.encode(&exponent, level)
    }

    fn header_lines(&self) -> Vec<String> {
        vec![self.group.render()]
    }
}

/// Discrete-log accessor, available only on the reference backend and only
/// with the `oracle` feature. Scheme code never calls it.
#[cfg(feature = "oracle")]
pub trait ExponentOracle: MultilinearMap {
    fn oracle_exponent(&self, x: &Self::Element) -> Self::Scalar;
}

#[cfg(feature = "oracle")]
impl ExponentOracle for ReferenceMap {
    fn oracle_exponent(&self, x: &LevelledElement) -> Scalar {
        Scalar(x.exponent.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(k: usize) -> ReferenceMap {
        ReferenceMap::new(GroupDescriptor::new(BigUint::from(101u32), k).unwrap())
    }

    fn enc(m: &ReferenceMap, a: u64, level: usize) -> LevelledElement {
        m.encode(&m.scalar(a), level).unwrap()
    }

    #[test]
    fn encode_examples() {
        let m = toy(3);
        assert_eq!(m.render_element(&enc(&m, 5, 1)), "L1:5");
        assert!(enc(&m, 0, 2).is_identity());
        assert!(matches!(
            Scalar::new(BigUint::from(104u32), m.group()),
            Err(MapError::ScalarOutOfRange { .. })
        ));
        assert!(matches!(
            m.encode(&m.scalar(1), 4),
            Err(MapError::LevelOutOfRange { level: 4, k: 3 })
        ));
        assert!(m.encode(&m.scalar(1), 0).is_err());
    }

    #[test]
    fn pairing_examples() {
        let m = toy(3);
        assert_eq!(m.pair(&enc(&m, 2, 1), &enc(&m, 3, 1)).unwrap(), enc(&m, 6, 2));
        assert_eq!(
            m.pair(&m.generator(1).unwrap(), &m.generator(2).unwrap()).unwrap(),
            m.generator(3).unwrap()
        );
        assert_eq!(
            m.pair(&enc(&m, 7, 2), &enc(&m, 9, 2)),
            Err(MapError::LevelOverflow {
                left: 2,
                right: 2,
                k: 3
            })
        );
    }

    #[test]
    fn group_law_examples() {
        let m = toy(3);
        assert_eq!(m.mul(&enc(&m, 5, 2), &enc(&m, 7, 2)).unwrap(), enc(&m, 12, 2));
        let x = enc(&m, 5, 2);
        assert!(m.mul(&x, &m.inv(&x).unwrap()).unwrap().is_identity());
        assert_eq!(m.pow(&enc(&m, 3, 1), &m.scalar(34)).unwrap(), enc(&m, 1, 1));
        assert!(matches!(
            m.mul(&enc(&m, 1, 1), &enc(&m, 1, 2)),
            Err(MapError::LevelMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn element_text_rejects_noise() {
        let m = toy(3);
        for bad in ["L0:1", "L4:1", "L1:101", "L1:-1", "L01:5", "L1:05", "1:5", "L1", "L1:"] {
            assert!(m.parse_element(bad).is_err(), "{bad}");
        }
        assert_eq!(m.parse_element("L2:6").unwrap(), enc(&m, 6, 2));
    }
}
