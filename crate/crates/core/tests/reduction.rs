mod common;

use circuit_abe::circuit::{layer_and_pad, random, Circuit, Gate};
use circuit_abe::kpabe::KpAbe;
use circuit_abe::mlmap::{ExponentOracle, MultilinearMap, ReferenceMap};
use circuit_abe::reduction::{
    audit, gen_instance, run_game, sim_challenge, sim_keygen, sim_setup, witness_master_secret, NullAdversary,
    OmniscientAdversary, ReductionError, Symbolic,
};
use common::{rng, toy_map};
use num_bigint::BigUint;
use rand::Rng;
use std::collections::BTreeSet;

fn scheme(p: u32, depth: usize) -> KpAbe<ReferenceMap> {
    KpAbe::new(toy_map(p, depth + 1)).unwrap()
}

fn product_mod(values: &[&BigUint], p: &BigUint) -> BigUint {
    values.iter().fold(BigUint::from(1u32), |acc, v| (acc * *v) % p)
}

#[test]
fn real_instances_multiply_all_exponents() {
    for k in 1..=5 {
        let map = toy_map(1_000_003, k);
        let p = map.group().p().clone();
        let mut r = rng(k as u64);
        let inst = gen_instance(&map, true, &mut r).unwrap();
        let w = &inst.witness;
        let mut factors: Vec<&BigUint> = w.c.iter().map(|c| c.value()).collect();
        factors.push(w.s.value());
        assert_eq!(inst.challenge.t.level(), k);
        assert_eq!(
            map.oracle_exponent(&inst.challenge.t).value(),
            &product_mod(&factors, &p)
        );
        assert_eq!(map.oracle_exponent(&inst.challenge.g_s).value(), w.s.value());
    }
}

#[test]
fn random_instances_rarely_hit_the_product() {
    let map = toy_map(101, 3);
    let p = map.group().p().clone();
    let mut r = rng(20);
    let trials = 2000;
    let hits = (0..trials)
        .filter(|_| {
            let inst = gen_instance(&map, false, &mut r).unwrap();
            let w = &inst.witness;
            let mut f: Vec<&BigUint> = w.c.iter().map(|c| c.value()).collect();
            f.push(w.s.value());
            map.oracle_exponent(&inst.challenge.t).value() == &product_mod(&f, &p)
        })
        .count();
    // Expected 2000/101 ≈ 20.
    assert!(hits < 60, "{hits} collisions in {trials}");
}

#[test]
fn simulated_setup_and_challenge() {
    let s = scheme(1_000_003, 3);
    let mut r = rng(21);
    for real in [true, false] {
        for x_star in [vec![true, false, true, false], vec![true; 4], vec![false; 4]] {
            let inst = gen_instance(s.map(), real, &mut r).unwrap();
            let (pp, state) = sim_setup(&s, &inst.challenge, &x_star, &mut r).unwrap();
            audit::check_setup(s.map(), &inst, &state, &pp).unwrap();
            let ct = sim_challenge(&s, &inst.challenge, &state).unwrap();
            audit::check_challenge(&s, &inst, &state, &pp, &ct).unwrap();
            let ones = x_star.iter().filter(|b| **b).count();
            assert_eq!(ct.c.len(), ones);
        }
    }
}

#[test]
fn simulated_keys_pass_every_audit() {
    let s = scheme(1_000_003, 4);
    let mut r = rng(22);
    let mut audited = 0;
    while audited < 40 {
        let inst = gen_instance(s.map(), audited % 2 == 0, &mut r).unwrap();
        let f = random::layered(&mut r, 5, 4, 14);
        let Some(x_star) = random::input_with_output(&mut r, &f, false) else {
            continue;
        };
        let (pp, mut state) = sim_setup(&s, &inst.challenge, &x_star, &mut r).unwrap();
        // Several queries against the same parameters.
        let mut keys = vec![sim_keygen(&s, &inst.challenge, &mut state, &pp, &f, &mut r).unwrap()];
        let g = random::layered(&mut r, 5, 4, 14);
        if !g.evaluate(&x_star).unwrap().output() {
            keys.push(sim_keygen(&s, &inst.challenge, &mut state, &pp, &g, &mut r).unwrap());
        }
        for (i, sk) in keys.iter().enumerate() {
            audit::check_key(&s, &inst, &state, &pp, i, sk).unwrap();
        }
        audited += 1;
    }
}

#[test]
fn witness_master_secret_is_a_working_key_source() {
    let s = scheme(1_000_003, 3);
    let mut r = rng(23);
    for _ in 0..20 {
        let real = r.gen_bool(0.5);
        let inst = gen_instance(s.map(), real, &mut r).unwrap();
        let x_star = vec![true, false, true];
        let (pp, state) = sim_setup(&s, &inst.challenge, &x_star, &mut r).unwrap();
        let msk = witness_master_secret(s.map(), &inst.witness, &state).unwrap();
        let f = layer_and_pad(&Circuit::new(3, vec![Gate::and(1, 3)]), 3).unwrap();
        let sk = s.keygen(&msk, &pp, &f, &mut r).unwrap();
        let fresh = s.encrypt(&pp, &[true, true, true], true, &mut r).unwrap();
        assert!(s.decrypt(&sk, &fresh).unwrap());
        let ct = sim_challenge(&s, &inst.challenge, &state).unwrap();
        assert_eq!(s.decrypt(&sk, &ct).unwrap(), real);
    }
}

#[test]
fn re_parameterisations_are_bijections_at_p_101() {
    let s = scheme(101, 3);
    let m = s.map();
    let mut r = rng(24);
    let inst = gen_instance(m, true, &mut r).unwrap();
    let c = &inst.witness.c;
    let forms: [fn(u64, &ReferenceMap) -> Symbolic<_>; 4] = [
        |v, m| Symbolic::Chain {
            len: 2,
            plus: m.scalar(v),
        },
        |v, m| Symbolic::Chain {
            len: 4,
            plus: m.scalar(v),
        },
        |v, m| Symbolic::Coeff {
            index: 3,
            negated: false,
            plus: m.scalar(v),
        },
        |v, m| Symbolic::Coeff {
            index: 2,
            negated: true,
            plus: m.scalar(v),
        },
    ];
    for form in forms {
        let image: BTreeSet<BigUint> = (0..101).map(|v| form(v, m).resolve(m, c).value().clone()).collect();
        assert_eq!(image.len(), 101);
    }
}

#[test]
fn omniscient_adversary_distinguishes() {
    let s = scheme(1_000_003, 2);
    let mut r = rng(25);
    let f = layer_and_pad(&Circuit::new(2, vec![Gate::and(1, 2)]), 2).unwrap();
    let mut correct = 0;
    for i in 0..100 {
        let real = i % 2 == 0;
        let mut adv = OmniscientAdversary::new(vec![false, true], vec![f.clone()]);
        let t = run_game(&s, &mut adv, real, &mut r).unwrap();
        correct += usize::from(t.guess_real == real);
    }
    assert_eq!(correct, 100);
}

#[test]
fn null_adversary_always_says_random() {
    let s = scheme(101, 2);
    let mut r = rng(26);
    for real in [true, false] {
        let t = run_game(
            &s,
            &mut NullAdversary {
                x_star: vec![true, true],
            },
            real,
            &mut r,
        )
        .unwrap();
        assert!(!t.guess_real);
        assert!(t.keys.is_empty());
    }
}

#[test]
fn authorised_queries_abort_the_game() {
    let s = scheme(101, 2);
    let mut r = rng(27);
    let f = Circuit::new(2, vec![Gate::and(1, 2)]);
    let mut adv = OmniscientAdversary::new(vec![true, true], vec![f]);
    assert_eq!(
        run_game(&s, &mut adv, true, &mut r).unwrap_err(),
        ReductionError::Satisfied
    );
}
