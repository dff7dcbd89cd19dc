//! Exponent-oracle checks that simulated artifacts are what the scheme
//! would have produced. Test support; requires the `oracle` feature.

use std::fmt::Debug;

use rand::rngs::mock::StepRng;
use thiserror::Error;

use super::{witness_alpha, witness_master_secret, MddhInstance, SimulatorState, Symbolic};
use crate::kpabe::{Ciphertext, KeyRandomness, KpAbe, PublicParams, SecretKey, WireKey, WireRandomness};
use crate::mlmap::{ExponentOracle, MultilinearMap};

type Elem<M> = <M as MultilinearMap>::Element;
type Scal<M> = <M as MultilinearMap>::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct AuditFailure(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, AuditFailure> {
    Err(AuditFailure(msg.into()))
}

fn expect_eq<T: PartialEq + Debug>(what: &str, got: &T, want: &T) -> Result<(), AuditFailure> {
    if got == want {
        Ok(())
    } else {
        fail(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

/// `h_i` exponents are `y_i` or `y_i + c_1`, and `H` has exponent
/// `ξ + c_1⋯c_k`.
pub fn check_setup<M>(
    map: &M,
    inst: &MddhInstance<Elem<M>, Scal<M>>,
    state: &SimulatorState<Scal<M>>,
    pp: &PublicParams<Elem<M>>,
) -> Result<(), AuditFailure>
where
    M: ExponentOracle,
    Scal<M>: PartialEq + Debug,
{
    let c1 = &inst.witness.c[0];
    for (i, h) in pp.h.iter().enumerate() {
        let y = &state.y[i];
        let want = if state.x_star[i] {
            y.clone()
        } else {
            map.scalar_add(y, c1)
        };
        expect_eq(&format!("exponent of h{}", i + 1), &map.oracle_exponent(h), &want)?;
    }
    let alpha = witness_alpha(map, &inst.witness, state);
    expect_eq("exponent of H", &map.oracle_exponent(&pp.big_h), &alpha)
}

/// With real `T` the challenge equals an honest encryption of 1 under the
/// witness `s`; with random `T` everything but `C_M` does.
pub fn check_challenge<M>(
    scheme: &KpAbe<M>,
    inst: &MddhInstance<Elem<M>, Scal<M>>,
    state: &SimulatorState<Scal<M>>,
    pp: &PublicParams<Elem<M>>,
    ct: &Ciphertext<Elem<M>>,
) -> Result<(), AuditFailure>
where
    M: ExponentOracle,
    Elem<M>: PartialEq + Debug,
{
    // Encrypting 1 draws no randomness.
    let mut unused = StepRng::new(0, 0);
    let honest = scheme
        .encrypt_with_s(pp, &state.x_star, true, &inst.witness.s, &mut unused)
        .map_err(|e| AuditFailure(e.to_string()))?;
    expect_eq("x", &ct.x, &honest.x)?;
    expect_eq("C_s", &ct.c_s, &honest.c_s)?;
    expect_eq("C_i", &ct.c, &honest.c)?;
    if inst.witness.is_real {
        expect_eq("C_M", &ct.c_m, &honest.c_m)?;
    }
    Ok(())
}

/// Reads KeyGen's randomness back out of a key's exponents, checking the
/// relations that over-determine it (`K_4` of OR gates) along the way.
pub fn recover_randomness<M>(
    map: &M,
    pp: &PublicParams<Elem<M>>,
    sk: &SecretKey<Elem<M>>,
) -> Result<KeyRandomness<Scal<M>>, AuditFailure>
where
    M: ExponentOracle,
    Scal<M>: PartialEq + Debug,
{
    let ox = |e: &Elem<M>| map.oracle_exponent(e);
    let f = &sk.circuit;
    let mut wires: Vec<WireRandomness<Scal<M>>> = Vec::with_capacity(sk.wires.len());
    for (idx, key) in sk.wires.iter().enumerate() {
        let w = idx + 1;
        let rec = match (key, f.gate(w)) {
            (WireKey::Input { k1, k2 }, None) => {
                let z = map.scalar_neg(&ox(k2));
                let r = map.scalar_sub(&ox(k1), &map.scalar_mul(&ox(&pp.h[idx]), &z));
                WireRandomness::Input { r, z }
            }
            (WireKey::Or { k1, k2, k3, k4 }, Some(g)) => {
                let (a, b) = (ox(k1), ox(k2));
                let ra = wires[g.a - 1].r();
                let rb = wires[g.b - 1].r();
                let r = map.scalar_add(&ox(k3), &map.scalar_mul(&a, ra));
                let want_k4 = map.scalar_sub(&r, &map.scalar_mul(&b, rb));
                expect_eq(&format!("wire {w} K4 exponent"), &ox(k4), &want_k4)?;
                WireRandomness::Gate { r, a, b }
            }
            (WireKey::And { k1, k2, k3 }, Some(g)) => {
                let (a, b) = (ox(k1), ox(k2));
                let ra = wires[g.a - 1].r();
                let rb = wires[g.b - 1].r();
                let r = map.scalar_add(
                    &ox(k3),
                    &map.scalar_add(&map.scalar_mul(&a, ra), &map.scalar_mul(&b, rb)),
                );
                WireRandomness::Gate { r, a, b }
            }
            _ => return fail(format!("wire {w} has components of the wrong kind")),
        };
        wires.push(rec);
    }
    Ok(KeyRandomness { wires })
}

/// Every check on the `index`-th simulated key:
///
/// * the header satisfies `K_H = g_{k-1}^{α - r_out}` with `α` read from `H`;
/// * the randomness read back through the oracle equals the simulator's
///   symbolic bookkeeping under the witness;
/// * product form is used exactly for wires `x*` does not satisfy, and there
///   `r_w = c_1⋯c_{j+1} + η_w`;
/// * honest KeyGen under the witness master secret and that randomness
///   reproduces the key exactly.
pub fn check_key<M>(
    scheme: &KpAbe<M>,
    inst: &MddhInstance<Elem<M>, Scal<M>>,
    state: &SimulatorState<Scal<M>>,
    pp: &PublicParams<Elem<M>>,
    index: usize,
    sk: &SecretKey<Elem<M>>,
) -> Result<(), AuditFailure>
where
    M: ExponentOracle,
    Scal<M>: PartialEq + Debug,
    Elem<M>: PartialEq + Debug,
{
    let map = scheme.map();
    let Some(record) = state.keys.get(index) else {
        return fail(format!("no key record {index}"));
    };
    expect_eq("circuit", &sk.circuit, &record.circuit)?;
    let f = &sk.circuit;
    let c = &inst.witness.c;

    let recovered = recover_randomness(map, pp, sk)?;
    let r_out = recovered.wires[f.output_wire() - 1].r();
    let want_header = map.scalar_sub(&map.oracle_exponent(&pp.big_h), r_out);
    expect_eq("K_H exponent", &map.oracle_exponent(&sk.header), &want_header)?;

    let resolved = record.resolve(map, c);
    let depths = f.depths().map_err(|e| AuditFailure(e.to_string()))?;
    let eval = f.evaluate(&state.x_star).map_err(|e| AuditFailure(e.to_string()))?;
    for (idx, (rec, got)) in record.wires.iter().zip(&recovered.wires).enumerate() {
        let w = idx + 1;
        expect_eq(&format!("wire {w} randomness"), got, &resolved.wires[idx])?;
        if rec.satisfied != eval.wire(w) {
            return fail(format!("wire {w}: recorded satisfaction disagrees with f_w(x*)"));
        }
        match rec.randomness.r() {
            Symbolic::Known(_) if rec.satisfied => {}
            Symbolic::Chain { len, plus } if !rec.satisfied => {
                let j = depths[idx];
                if *len != j + 1 {
                    return fail(format!("wire {w}: chain length {len}, depth {j}"));
                }
                let product = c[..=j].iter().fold(map.scalar(1), |acc, ci| map.scalar_mul(&acc, ci));
                expect_eq(&format!("wire {w} r_w"), got.r(), &map.scalar_add(&product, plus))?;
            }
            other => {
                return fail(format!(
                    "wire {w}: satisfied={} but r_w recorded as {other:?}",
                    rec.satisfied
                ))
            }
        }
    }

    let msk = witness_master_secret(map, &inst.witness, state).map_err(|e| AuditFailure(e.to_string()))?;
    let honest = scheme
        .keygen_with(&msk, pp, f, &resolved)
        .map_err(|e| AuditFailure(e.to_string()))?;
    expect_eq("honest key under the witness", &honest, sk)
}
