mod common;

use circuit_abe::circuit::{layer_and_pad, random, Circuit, Gate, GateKind};
use circuit_abe::kpabe::{Branch, KpAbe, SchemeError, WireKey, WireRandomness};
use circuit_abe::mlmap::{ExponentOracle, MapError, MultilinearMap, ReferenceMap};
use circuit_abe::sizebound::{BoundedMap, GrowthProfile};
use common::{rng, toy_map};
use num_bigint::BigUint;
use rand::Rng;

fn scheme(p: u32, depth: usize) -> KpAbe<ReferenceMap> {
    KpAbe::new(toy_map(p, depth + 1)).unwrap()
}

/// `a * b + c mod p` computed on raw integers.
fn mac(a: &BigUint, b: &BigUint, c: &BigUint, p: &BigUint) -> BigUint {
    (a * b + c) % p
}

fn neg(a: &BigUint, p: &BigUint) -> BigUint {
    (p - a % p) % p
}

#[test]
fn master_secret_and_h_share_alpha() {
    let s = scheme(1_000_003, 3);
    let m = s.map();
    let (pp, msk) = s.setup(4, &mut rng(1)).unwrap();
    assert_eq!(m.oracle_exponent(&msk.key), m.oracle_exponent(&pp.big_h));
    assert_eq!((msk.key.level(), pp.big_h.level()), (3, 4));
}

#[test]
fn encryption_of_one_is_h_to_the_s() {
    let s = scheme(1_000_003, 2);
    let m = s.map();
    let p = m.group().p().clone();
    let mut r = rng(2);
    let (pp, _) = s.setup(3, &mut r).unwrap();
    let ct = s.encrypt(&pp, &[true, false, true], true, &mut r).unwrap();
    let alpha = m.oracle_exponent(&pp.big_h).value().clone();
    let sv = m.oracle_exponent(&ct.c_s).value().clone();
    assert_eq!(m.oracle_exponent(&ct.c_m).value(), &((&alpha * &sv) % &p));
    assert_eq!(ct.c.keys().copied().collect::<Vec<_>>(), vec![1, 3]);
    for (i, c) in &ct.c {
        let y = m.oracle_exponent(&pp.h[i - 1]).value().clone();
        assert_eq!(m.oracle_exponent(c).value(), &((&y * &sv) % &p));
    }
}

#[test]
fn key_components_satisfy_the_keygen_equations() {
    let s = scheme(1_000_003, 4);
    let m = s.map();
    let p = m.group().p().clone();
    let mut r = rng(3);
    let (pp, msk) = s.setup(5, &mut r).unwrap();
    for _ in 0..20 {
        let f = random::layered(&mut r, 5, 4, 16);
        let (sk, rand) = s.keygen_traced(&msk, &pp, &f, &mut r).unwrap();
        let ox = |e| m.oracle_exponent(e).value().clone();
        let rv = |w: usize| rand.wires[w - 1].r().value().clone();
        let alpha = ox(&msk.key);
        assert_eq!(ox(&sk.header), (&alpha + neg(&rv(f.output_wire()), &p)) % &p);
        let depths = f.depths().unwrap();
        for (idx, key) in sk.wires.iter().enumerate() {
            let w = idx + 1;
            match (key, &rand.wires[idx], f.gate(w)) {
                (WireKey::Input { k1, k2 }, WireRandomness::Input { r: rw, z }, None) => {
                    let y = ox(&pp.h[idx]);
                    assert_eq!(ox(k1), mac(&y, z.value(), rw.value(), &p));
                    assert_eq!(ox(k2), neg(z.value(), &p));
                }
                (key, WireRandomness::Gate { r: rw, a, b }, Some(g)) => {
                    let comps = key.components();
                    assert_eq!(ox(comps[0]), *a.value());
                    assert_eq!(ox(comps[1]), *b.value());
                    let minus_a = mac(&neg(a.value(), &p), &rv(g.a), rw.value(), &p);
                    assert_eq!(comps[2].level(), depths[idx]);
                    match g.kind {
                        GateKind::Or => {
                            assert_eq!(ox(comps[2]), minus_a);
                            assert_eq!(ox(comps[3]), mac(&neg(b.value(), &p), &rv(g.b), rw.value(), &p));
                        }
                        GateKind::And => {
                            assert_eq!(ox(comps[2]), mac(&neg(b.value(), &p), &rv(g.b), &minus_a, &p));
                        }
                    }
                }
                other => panic!("wire {w}: mismatched shapes {other:?}"),
            }
        }
    }
}

#[test]
fn padded_single_and_component_count() {
    for depth in 2..=6 {
        let s = scheme(101, depth);
        let mut r = rng(4);
        let (pp, msk) = s.setup(2, &mut r).unwrap();
        let f = layer_and_pad(&Circuit::new(2, vec![Gate::and(1, 2)]), depth).unwrap();
        let sk = s.keygen(&msk, &pp, &f, &mut r).unwrap();
        let pass_through = depth - 2;
        assert_eq!(sk.component_count(), 2 * 2 + 3 + 4 * pass_through + 1);
    }
}

#[test]
fn independent_keys_at_production_size() {
    let mut r = rng(5);
    let s = KpAbe::new(ReferenceMap::generate(256, 3, &mut r).unwrap()).unwrap();
    let (pp, msk) = s.setup(2, &mut r).unwrap();
    let f = layer_and_pad(&Circuit::new(2, vec![Gate::or(1, 2)]), 2).unwrap();
    let a = s.keygen(&msk, &pp, &f, &mut r).unwrap();
    let b = s.keygen(&msk, &pp, &f, &mut r).unwrap();
    assert_ne!(a.header, b.header);
    for (x, y) in a.wires.iter().zip(&b.wires) {
        for (cx, cy) in x.components().into_iter().zip(y.components()) {
            assert_ne!(cx, cy);
        }
    }
}

#[test]
fn derived_wire_values_have_exponent_s_r() {
    let s = scheme(1_000_003, 4);
    let m = s.map();
    let p = m.group().p().clone();
    let mut r = rng(6);
    let (pp, msk) = s.setup(6, &mut r).unwrap();
    for _ in 0..30 {
        let f = random::layered(&mut r, 6, 4, 20);
        let x: Vec<bool> = (0..6).map(|_| r.gen_bool(0.6)).collect();
        let (sk, rand) = s.keygen_traced(&msk, &pp, &f, &mut r).unwrap();
        let ct = s.encrypt(&pp, &x, true, &mut r).unwrap();
        let sv = m.oracle_exponent(&ct.c_s).value().clone();
        let eval = f.evaluate(&x).unwrap();
        let depths = f.depths().unwrap();
        for w in 1..=f.wire_count() {
            match s.derive_wire(&sk, &ct, w) {
                Ok(e) => {
                    assert!(eval.wire(w));
                    assert_eq!(e.level(), depths[w - 1] + 1);
                    let want = (&sv * rand.wires[w - 1].r().value()) % &p;
                    assert_eq!(m.oracle_exponent(&e).value(), &want, "wire {w}");
                }
                Err(e) => {
                    assert!(!eval.wire(w));
                    assert_eq!(e, SchemeError::WireUnsatisfied(w));
                }
            }
        }
        if eval.output() {
            assert!(s.decrypt(&sk, &ct).unwrap());
        } else {
            assert_eq!(s.decrypt(&sk, &ct), Err(SchemeError::NotSatisfied));
        }
    }
}

#[test]
fn or_branches_agree() {
    let s = scheme(1_000_003, 2);
    let mut r = rng(7);
    let (pp, msk) = s.setup(2, &mut r).unwrap();
    let f = Circuit::new(2, vec![Gate::or(1, 2)]);
    let sk = s.keygen(&msk, &pp, &f, &mut r).unwrap();

    let both = s.encrypt(&pp, &[true, true], true, &mut r).unwrap();
    let via_a = s.derive_or_branch(&sk, &both, 3, Branch::A).unwrap();
    let via_b = s.derive_or_branch(&sk, &both, 3, Branch::B).unwrap();
    assert_eq!(via_a, via_b);
    assert_eq!(s.derive_wire(&sk, &both, 3).unwrap(), via_a);

    let only_b = s.encrypt(&pp, &[false, true], true, &mut r).unwrap();
    assert_eq!(
        s.derive_or_branch(&sk, &only_b, 3, Branch::A),
        Err(SchemeError::WireUnsatisfied(1))
    );
    let e = s.derive_wire(&sk, &only_b, 3).unwrap();
    assert_eq!(e, s.derive_or_branch(&sk, &only_b, 3, Branch::B).unwrap());
    assert!(s.decrypt(&sk, &only_b).unwrap());
}

#[test]
fn decrypting_zero_fails_only_on_a_collision() {
    let s = KpAbe::new(ReferenceMap::generate(256, 3, &mut rng(8)).unwrap()).unwrap();
    let mut r = rng(9);
    let (pp, msk) = s.setup(3, &mut r).unwrap();
    for _ in 0..50 {
        let f = random::layered(&mut r, 3, 2, 4);
        let Some(x) = random::input_with_output(&mut r, &f, true) else {
            continue;
        };
        let sk = s.keygen(&msk, &pp, &f, &mut r).unwrap();
        let ct = s.encrypt(&pp, &x, false, &mut r).unwrap();
        assert!(!s.decrypt(&sk, &ct).unwrap());
    }
}

#[test]
fn end_to_end_through_the_size_bound_backend() {
    for depth in 1..=6 {
        let map = BoundedMap::new(
            circuit_abe::mlmap::GroupDescriptor::new(BigUint::from(1_000_003u32), depth + 1).unwrap(),
            GrowthProfile::standard(8),
        )
        .unwrap();
        let s = KpAbe::new(&map).unwrap();
        let mut r = rng(10 + depth as u64);
        let (pp, msk) = s.setup(4, &mut r).unwrap();
        for _ in 0..5 {
            let f = random::layered(&mut r, 4, depth, 12);
            let Some(x) = random::input_with_output(&mut r, &f, true) else {
                continue;
            };
            let sk = s.keygen(&msk, &pp, &f, &mut r).unwrap();
            let ct = s.encrypt(&pp, &x, true, &mut r).unwrap();
            assert!(s.decrypt(&sk, &ct).unwrap(), "depth {depth}");
        }
        for u in map.usage() {
            assert!(u.max_log_bound <= u.budget);
        }
    }
}

#[test]
fn exhausted_level_cannot_pair_further() {
    // Level discipline: a depth-ℓ system's top-level values cannot be paired
    // again, so decryption values never climb past k.
    let s = scheme(101, 2);
    let m = s.map();
    let mut r = rng(11);
    let (pp, _) = s.setup(1, &mut r).unwrap();
    assert_eq!(
        m.pair(&pp.big_h, &pp.h[0]),
        Err(MapError::LevelOverflow {
            left: 3,
            right: 1,
            k: 3
        })
    );
}

/// The public map interface exposes only operations that keep or raise
/// levels; each is exercised in the `mlmap` property tests. A new method
/// must be reviewed and added here.
#[test]
fn map_interface_has_no_level_lowering_operation() {
    let source = include_str!("../src/mlmap/mod.rs");
    let start = source.find("pub trait MultilinearMap").unwrap();
    let end = start + source[start..].find("\n}\n").unwrap();
    let mut methods: Vec<&str> = source[start..end]
        .lines()
        .filter_map(|l| l.trim().strip_prefix("fn "))
        .map(|l| l.split(['(', '<']).next().unwrap())
        .collect();
    methods.sort_unstable();
    assert_eq!(
        methods,
        [
            "degree",
            "encode",
            "generator",
            "group",
            "inv",
            "level",
            "mul",
            "pair",
            "pow",
            "sample_element",
            "sample_scalar",
            "sample_short",
            "scalar",
            "scalar_add",
            "scalar_mul",
            "scalar_neg",
            "scalar_sub",
        ]
    );
}
