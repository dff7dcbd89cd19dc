//! Independent reference computations the library is checked against.
//! Nothing here calls the code under test except to read circuit structure
//! or element exponents.

#![allow(dead_code)]

use circuit_abe::circuit::{Circuit, ExtGate, ExtendedCircuit, GateKind};
use circuit_abe::mlmap::{GroupDescriptor, ReferenceMap};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn toy_map(p: u32, k: usize) -> ReferenceMap {
    ReferenceMap::new(GroupDescriptor::new(BigUint::from(p), k).unwrap())
}

/// Deterministic trial division.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Fermat test to a fixed set of bases, computed with plain `BigUint::modpow`
/// (no Miller–Rabin decomposition), for large candidates.
pub fn passes_fermat(n: &BigUint) -> bool {
    let one = BigUint::from(1u32);
    [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&b| BigUint::from(b).modpow(&(n - &one), n) == one)
}

/// `a * b mod p` with 128-bit intermediates.
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn u64_of(v: &BigUint) -> u64 {
    u64::try_from(v).expect("toy value fits in u64")
}

/// Evaluates a monotone circuit by recursion from the output wire.
pub fn eval_recursive(c: &Circuit, x: &[bool]) -> bool {
    fn go(c: &Circuit, x: &[bool], w: usize) -> bool {
        if w <= c.n() {
            return x[w - 1];
        }
        let g = c.gates()[w - c.n() - 1];
        let (a, b) = (go(c, x, g.a), go(c, x, g.b));
        match g.kind {
            GateKind::And => a && b,
            GateKind::Or => a || b,
        }
    }
    go(c, x, c.n() + c.gates().len())
}

pub fn eval_extended_recursive(c: &ExtendedCircuit, x: &[bool]) -> bool {
    fn go(c: &ExtendedCircuit, x: &[bool], w: usize) -> bool {
        if w <= c.n() {
            return x[w - 1];
        }
        match c.gates()[w - c.n() - 1] {
            ExtGate::And(a, b) => go(c, x, a) && go(c, x, b),
            ExtGate::Or(a, b) => go(c, x, a) || go(c, x, b),
            ExtGate::Not(a) => !go(c, x, a),
        }
    }
    go(c, x, c.n() + c.gates().len())
}

/// Longest input-to-wire path, counting only AND/OR gates; inputs are 1.
pub fn depth_recursive(c: &ExtendedCircuit, w: usize) -> usize {
    if w <= c.n() {
        return 1;
    }
    match c.gates()[w - c.n() - 1] {
        ExtGate::And(a, b) | ExtGate::Or(a, b) => 1 + depth_recursive(c, a).max(depth_recursive(c, b)),
        ExtGate::Not(a) => depth_recursive(c, a),
    }
}

/// Layering and wire ordering checked from scratch.
pub fn is_layered_independent(c: &Circuit) -> bool {
    let n = c.n();
    let mut depth = vec![1usize; n + c.gates().len() + 1];
    for (i, g) in c.gates().iter().enumerate() {
        let w = n + 1 + i;
        if !(g.a <= g.b && g.b < w && g.a >= 1) {
            return false;
        }
        if depth[g.a] != depth[g.b] {
            return false;
        }
        depth[w] = depth[g.a] + 1;
    }
    true
}

pub fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// `m ⌈log2(m+1)⌉`, from the bit length of `m` (for `m + 1` a power of two
/// the ceiling equals the exact log).
pub fn standard_log_f(m: u32) -> i64 {
    let ceil_log = 32 - m.leading_zeros(); // ⌈log2(m+1)⌉ = bits(m)
    i64::from(m) * i64::from(ceil_log)
}
