//! Prime generation for group setup.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

const MILLER_RABIN_ROUNDS: usize = 40;

/// Miller-Rabin with the small-prime bases followed by `MILLER_RABIN_ROUNDS`
/// bases drawn from `rng`.
pub fn is_probable_prime(n: &BigUint, rng: &mut dyn RngCore) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let one = BigUint::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            return true;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                return true;
            }
            if x == one {
                return false;
            }
        }
        false
    };

    for &base in SMALL_PRIMES.iter().skip(1).take(12) {
        if !witness(&BigUint::from(base)) {
            return false;
        }
    }
    let two = BigUint::from(2u32);
    for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        if !witness(&a) {
            return false;
        }
    }
    true
}

/// Smallest probable prime `>= start`.
pub fn next_prime(start: &BigUint, rng: &mut dyn RngCore) -> BigUint {
    let mut candidate = start.clone();
    if candidate <= BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if candidate.is_even() {
        candidate += 1u32;
    }
    while !is_probable_prime(&candidate, rng) {
        candidate += 2u32;
    }
    candidate
}

/// A random prime `p > 2^bits` with `p >= 3`, drawn by picking a random
/// starting point just above `2^bits` and walking to the next prime.
pub fn random_prime_above(bits: u32, rng: &mut dyn RngCore) -> BigUint {
    let floor = BigUint::one() << bits;
    let lo = std::cmp::max(&floor + 1u32, BigUint::from(3u32));
    let start = if bits >= 2 {
        rng.gen_biguint_range(&lo, &(&floor << 1))
    } else {
        lo
    };
    next_prime(&start, rng)
}
