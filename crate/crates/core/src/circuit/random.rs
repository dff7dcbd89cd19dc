//! Random circuit generators for tests, benchmarks and demos.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, ExtGate, ExtendedCircuit, Gate, GateKind};

fn kind(rng: &mut (impl Rng + ?Sized)) -> GateKind {
    if rng.gen_bool(0.5) {
        GateKind::And
    } else {
        GateKind::Or
    }
}

/// A valid layered monotone circuit with `n` inputs, output at exactly
/// `depth`, and at most `max_gates` gates.
///
/// # Panics
///
/// If `n == 0`, `depth == 0`, or `max_gates < depth - 1`.
pub fn layered(rng: &mut (impl Rng + ?Sized), n: usize, depth: usize, max_gates: usize) -> Circuit {
    assert!(n >= 1 && depth >= 1, "need inputs and a positive depth");
    if depth == 1 {
        // Only an input wire has depth 1: a circuit with no gates.
        return Circuit::new(n, Vec::new());
    }
    let inner_layers = depth - 2;
    assert!(max_gates > inner_layers, "not enough gates for depth {depth}");

    // Widths for layers 2..depth-1; the output layer has width 1.
    let mut spare = max_gates - 1 - inner_layers;
    let mut widths = vec![1usize; inner_layers];
    for w in widths.iter_mut() {
        let extra = rng.gen_range(0..=spare.min(6));
        *w += extra;
        spare -= extra;
    }
    widths.push(1);

    let mut gates = Vec::new();
    let mut prev: Vec<usize> = (1..=n).collect();
    for width in widths {
        let mut layer = Vec::with_capacity(width);
        for _ in 0..width {
            let a = *prev.choose(rng).expect("non-empty layer");
            let b = *prev.choose(rng).expect("non-empty layer");
            gates.push(Gate::new(kind(rng), a.min(b), a.max(b)));
            layer.push(n + gates.len());
        }
        prev = layer;
    }
    Circuit::new(n, gates)
}

/// A (generally unlayered) monotone circuit with `q` gates, each reading
/// arbitrary earlier wires; the last gate reads the previous gate when
/// there is one.
pub fn monotone(rng: &mut (impl Rng + ?Sized), n: usize, q: usize) -> Circuit {
    let mut gates = Vec::with_capacity(q);
    for i in 0..q {
        let w = n + 1 + i;
        let a = rng.gen_range(1..w);
        let b = if i + 1 == q && i > 0 {
            w - 1
        } else {
            rng.gen_range(1..w)
        };
        gates.push(Gate::new(kind(rng), a.min(b), a.max(b)));
    }
    Circuit::new(n, gates)
}

/// A random AND/OR/NOT circuit with `q >= 1` gates whose output is an
/// AND/OR gate, possibly behind one negation.
pub fn extended(rng: &mut (impl Rng + ?Sized), n: usize, q: usize) -> ExtendedCircuit {
    assert!(q >= 1);
    let mut gates = Vec::with_capacity(q);
    let negate_output = q >= 2 && rng.gen_bool(0.3);
    let binary_until = if negate_output { q - 1 } else { q };
    for i in 0..binary_until {
        let w = n + 1 + i;
        let last = i + 1 == binary_until;
        let g = if !last && rng.gen_bool(0.25) {
            ExtGate::Not(rng.gen_range(1..w))
        } else {
            let a = rng.gen_range(1..w);
            let b = if last && i > 0 { w - 1 } else { rng.gen_range(1..w) };
            if rng.gen_bool(0.5) {
                ExtGate::And(a, b)
            } else {
                ExtGate::Or(a, b)
            }
        };
        gates.push(g);
    }
    if negate_output {
        gates.push(ExtGate::Not(n + binary_until));
    }
    ExtendedCircuit::new(n, gates)
}

/// Some `x` with `f(x) = value`, searching random inputs first and then
/// exhaustively when `n` is small. Monotone circuits always accept all-ones
/// and reject all-zeros.
pub fn input_with_output(rng: &mut (impl Rng + ?Sized), f: &Circuit, value: bool) -> Option<Vec<bool>> {
    let n = f.n();
    let eval = |x: &[bool]| f.evaluate(x).map(|e| e.output()).unwrap_or(!value);
    for _ in 0..64 {
        let x: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if eval(&x) == value {
            return Some(x);
        }
    }
    if n <= 16 {
        let mut hits: Vec<Vec<bool>> = (0u32..1 << n)
            .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|x| eval(x) == value)
            .collect();
        if !hits.is_empty() {
            let i = rng.gen_range(0..hits.len());
            return Some(hits.swap_remove(i));
        }
        return None;
    }
    let fallback = vec![value; n];
    (eval(&fallback) == value).then_some(fallback)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn layered_circuits_are_valid_with_exact_depth() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let depth = rng.gen_range(1..=6);
            let c = layered(&mut rng, n, depth, 40);
            assert!(c.is_valid(), "{:?}", c.validate());
            assert_eq!(c.depth().unwrap(), depth);
            assert!(c.q() <= 40);
        }
    }

    #[test]
    fn extended_circuits_are_valid() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let q = rng.gen_range(1..=20);
            let c = extended(&mut rng, n, q);
            assert!(c.validate().is_empty());
            assert!(!matches!(c.gates().last(), Some(ExtGate::Not(a)) if *a <= n));
        }
    }

    #[test]
    fn witnesses_have_the_requested_value() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..100 {
            let c = layered(&mut rng, 5, 4, 20);
            for value in [true, false] {
                let x = input_with_output(&mut rng, &c, value).unwrap();
                assert_eq!(c.evaluate(&x).unwrap().output(), value);
            }
        }
    }
}
