//! Leveled multilinear maps.
//!
//! A leveled `k`-multilinear map is a sequence of prime-order groups
//! `G_1, ..., G_k` with canonical generators `g_i` and pairings
//! `e_{i,j}: G_i x G_j -> G_{i+j}` for `i + j <= k`, satisfying
//! `e(g_i^a, g_j^b) = g_{i+j}^{ab}`.
//!
//! All scheme code is written against [`MultilinearMap`]. Two backends ship
//! with the crate:
//!
//! * [`ReferenceMap`] stores every element as its discrete logarithm. It is
//!   functionally exact and **offers no security whatsoever**: discrete log is
//!   the identity function. It exists to check correctness and reduction
//!   identities.
//! * [`crate::sizebound::BoundedMap`] decorates the reference backend with
//!   the size bookkeeping a graded-encoding instantiation would need.

mod prime;
mod reference;

use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

pub use prime::{is_probable_prime, next_prime, random_prime_above};
pub use reference::{LevelledElement, ReferenceMap, Scalar};

#[cfg(feature = "oracle")]
pub use reference::ExponentOracle;

/// Default prime size used outside of tests.
pub const DEFAULT_SECURITY_BITS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("multilinearity degree must be at least 1")]
    InvalidDegree,
    #[error("modulus {0} is not an odd prime")]
    NotPrime(BigUint),
    #[error("level {level} outside [1, {k}]")]
    LevelOutOfRange { level: usize, k: usize },
    #[error("pairing levels {left} + {right} exceed the maximum level {k}")]
    LevelOverflow { left: usize, right: usize, k: usize },
    #[error("group operation across levels {left} and {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("scalar {value} is not reduced modulo {p}")]
    ScalarOutOfRange { value: BigUint, p: BigUint },
    #[error("level-{level} element needs log-size {log_bound}, exceeding the level budget {budget}")]
    BudgetExceeded {
        level: usize,
        log_bound: String,
        budget: String,
    },
    #[error("invalid growth profile: {0}")]
    InvalidProfile(String),
    #[error("malformed element `{0}`")]
    Malformed(String),
}

/// Public description of the group sequence: prime order `p` and maximum
/// level `k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    p: BigUint,
    k: usize,
}

impl GroupDescriptor {
    /// Checks that `p` is an odd prime and `k >= 1`.
    pub fn new(p: BigUint, k: usize) -> Result<Self, MapError> {
        if k == 0 {
            return Err(MapError::InvalidDegree);
        }
        // Fixed-seed rounds: primality of a public modulus is not secret.
        let mut rng = rand::rngs::mock::StepRng::new(0x9e37_79b9_7f4a_7c15, 0x6a09_e667_f3bc_c909);
        if p < BigUint::from(3u32) || !is_probable_prime(&p, &mut rng) {
            return Err(MapError::NotPrime(p));
        }
        Ok(GroupDescriptor { p, k })
    }

    /// `G(1^λ, k)`: a fresh prime `p > 2^security_bits`, deterministic in `rng`.
    pub fn generate(security_bits: u32, k: usize, rng: &mut dyn RngCore) -> Result<Self, MapError> {
        if k == 0 {
            return Err(MapError::InvalidDegree);
        }
        let p = random_prime_above(security_bits, rng);
        Ok(GroupDescriptor { p, k })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn check_level(&self, level: usize) -> Result<(), MapError> {
        if level == 0 || level > self.k {
            Err(MapError::LevelOutOfRange { level, k: self.k })
        } else {
            Ok(())
        }
    }

    /// `GROUP p=<decimal> k=<decimal>`
    pub fn render(&self) -> String {
        format!("GROUP p={} k={}", self.p, self.k)
    }

    pub fn parse(line: &str) -> Result<Self, MapError> {
        let malformed = || MapError::Malformed(line.to_string());
        let rest = line.strip_prefix("GROUP ").ok_or_else(malformed)?;
        let mut parts = rest.split(' ');
        let p = parts
            .next()
            .and_then(|t| t.strip_prefix("p="))
            .and_then(canonical_decimal)
            .ok_or_else(malformed)?;
        let k = parts
            .next()
            .and_then(|t| t.strip_prefix("k="))
            .and_then(canonical_decimal)
            .ok_or_else(malformed)?;
        if parts.next().is_some() {
            return Err(malformed());
        }
        let k = usize::try_from(&k).map_err(|_| malformed())?;
        GroupDescriptor::new(p, k)
    }
}

impl fmt::Debug for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupDescriptor(p={}, k={})", self.p, self.k)
    }
}

/// Parses a decimal integer with no sign and no leading zeros, so that
/// rendering the result reproduces the input.
pub(crate) fn canonical_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Interface the scheme is written against.
///
/// Scalars live in `Z_p`; elements carry a level in `[1, k]`. No operation
/// lowers a level: the only level-changing operation is [`pair`](Self::pair),
/// which adds levels.
pub trait MultilinearMap {
    type Scalar: Clone + fmt::Debug + PartialEq;
    type Element: Clone + fmt::Debug + PartialEq;

    fn group(&self) -> &GroupDescriptor;

    fn degree(&self) -> usize {
        self.group().k()
    }

    /// The scalar `v mod p`.
    fn scalar(&self, v: u64) -> Self::Scalar;
    /// Uniform randomness for a value first encoded at `level`.
    fn sample_scalar(&self, rng: &mut dyn RngCore, level: usize) -> Result<Self::Scalar, MapError>;
    /// Uniform randomness used only as a level-1 multiplier (`s`, `z_w`,
    /// `a_w`, `b_w`, the exponents of the `h_i`).
    fn sample_short(&self, rng: &mut dyn RngCore) -> Self::Scalar;

    fn scalar_add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_neg(&self, a: &Self::Scalar) -> Self::Scalar;

    fn scalar_sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        self.scalar_add(a, &self.scalar_neg(b))
    }

    /// `g_level^a`.
    fn encode(&self, a: &Self::Scalar, level: usize) -> Result<Self::Element, MapError>;

    /// The canonical generator `g_level`.
    fn generator(&self, level: usize) -> Result<Self::Element, MapError> {
        self.encode(&self.scalar(1), level)
    }

    fn level(&self, x: &Self::Element) -> usize;

    /// `e_{i,j}(x, y)`; fails with [`MapError::LevelOverflow`] when
    /// `i + j > k`.
    fn pair(&self, x: &Self::Element, y: &Self::Element) -> Result<Self::Element, MapError>;
    /// Group law within one level.
    fn mul(&self, x: &Self::Element, y: &Self::Element) -> Result<Self::Element, MapError>;
    fn inv(&self, x: &Self::Element) -> Result<Self::Element, MapError>;
    fn pow(&self, x: &Self::Element, a: &Self::Scalar) -> Result<Self::Element, MapError>;

    /// A uniformly random element of `G_level`.
    fn sample_element(&self, rng: &mut dyn RngCore, level: usize) -> Result<Self::Element, MapError>;
}

/// Line-oriented text form of elements and of the group header.
pub trait ElementCodec: MultilinearMap {
    fn render_element(&self, x: &Self::Element) -> String;
    fn parse_element(&self, s: &str) -> Result<Self::Element, MapError>;
    /// Header lines identifying the backend parameters, starting with the
    /// `GROUP` line.
    fn header_lines(&self) -> Vec<String>;
}

impl<M: MultilinearMap + ?Sized> MultilinearMap for &M {
    type Scalar = M::Scalar;
    type Element = M::Element;

    fn group(&self) -> &GroupDescriptor {
        (**self).group()
    }
    fn scalar(&self, v: u64) -> Self::Scalar {
        (**self).scalar(v)
    }
    fn sample_scalar(&self, rng: &mut dyn RngCore, level: usize) -> Result<Self::Scalar, MapError> {
        (**self).sample_scalar(rng, level)
    }
    fn sample_short(&self, rng: &mut dyn RngCore) -> Self::Scalar {
        (**self).sample_short(rng)
    }
    fn scalar_add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        (**self).scalar_add(a, b)
    }
    fn scalar_mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        (**self).scalar_mul(a, b)
    }
    fn scalar_neg(&self, a: &Self::Scalar) -> Self::Scalar {
        (**self).scalar_neg(a)
    }
    fn encode(&self, a: &Self::Scalar, level: usize) -> Result<Self::Element, MapError> {
        (**self).encode(a, level)
    }
    fn level(&self, x: &Self::Element) -> usize {
        (**self).level(x)
    }
    fn pair(&self, x: &Self::Element, y: &Self::Element) -> Result<Self::Element, MapError> {
        (**self).pair(x, y)
    }
    fn mul(&self, x: &Self::Element, y: &Self::Element) -> Result<Self::Element, MapError> {
        (**self).mul(x, y)
    }
    fn inv(&self, x: &Self::Element) -> Result<Self::Element, MapError> {
        (**self).inv(x)
    }
    fn pow(&self, x: &Self::Element, a: &Self::Scalar) -> Result<Self::Element, MapError> {
        (**self).pow(x, a)
    }
    fn sample_element(&self, rng: &mut dyn RngCore, level: usize) -> Result<Self::Element, MapError> {
        (**self).sample_element(rng, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_line_roundtrip() {
        let gd = GroupDescriptor::new(BigUint::from(101u32), 3).unwrap();
        assert_eq!(gd.render(), "GROUP p=101 k=3");
        assert_eq!(GroupDescriptor::parse("GROUP p=101 k=3").unwrap(), gd);
    }

    #[test]
    fn group_line_rejects_noise() {
        for bad in [
            "GROUP p=101",
            "GROUP p=0101 k=3",
            "GROUP p=101 k=3 x=1",
            "GROUP p=100 k=3",
            "GROUP p=101 k=0",
            "group p=101 k=3",
        ] {
            assert!(GroupDescriptor::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn degree_zero_rejected() {
        let mut rng = rand::rngs::mock::StepRng::new(1, 1);
        assert_eq!(GroupDescriptor::generate(8, 0, &mut rng), Err(MapError::InvalidDegree));
        assert_eq!(
            GroupDescriptor::new(BigUint::from(101u32), 0),
            Err(MapError::InvalidDegree)
        );
    }
}
