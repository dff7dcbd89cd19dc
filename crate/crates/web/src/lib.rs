//! Browser demo: evaluate a circuit, remove its NOT gates, and trace a
//! decryption wire by wire over a toy-size group.
//!
//! The exported functions take and return plain strings; the `*_text`
//! versions are the same operations for native callers and tests.

use std::fmt::Write as _;

use circuit_abe::circuit::{self, demorganize, layer_and_pad, parse_bits, render, render_bits, ParsedCircuit};
use circuit_abe::kpabe::{KpAbe, SchemeError};
use circuit_abe::mlmap::{ElementCodec, GroupDescriptor, ReferenceMap};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use wasm_bindgen::prelude::*;

/// Group order used by the trace: small enough to read the exponents.
pub const TOY_PRIME: u32 = 1_000_003;

fn parse_input(bits: &str) -> Result<Vec<bool>, String> {
    parse_bits(bits.trim()).ok_or_else(|| format!("`{bits}` is not a bit string"))
}

fn parse_circuit(text: &str) -> Result<ParsedCircuit, String> {
    circuit::parse(text).map_err(|e| format!("line {}, column {}: {}", e.line, e.column, e.message))
}

pub fn evaluate_text(circuit: &str, bits: &str) -> Result<String, String> {
    let x = parse_input(bits)?;
    let eval = match parse_circuit(circuit)? {
        ParsedCircuit::Monotone(c) => c.evaluate(&x),
        ParsedCircuit::Extended(c) => c.evaluate(&x),
    }
    .map_err(|e| e.to_string())?;
    let mut out = format!("f({}) = {}\n", render_bits(&x), u8::from(eval.output()));
    for (i, v) in eval.wires.iter().enumerate() {
        let _ = writeln!(out, "w{} = {}", i + 1, u8::from(*v));
    }
    Ok(out)
}

pub fn demorgan_text(circuit: &str) -> Result<String, String> {
    let c = parse_circuit(circuit)?.into_extended();
    let m = demorganize(&c).map_err(|e| e.to_string())?;
    let n = m.original_inputs;
    Ok(format!(
        "# input i is x_i and input {n}+i is NOT x_i\n{}",
        render(&m.circuit)
    ))
}

/// Sets up a system whose depth is the circuit's, issues a key, encrypts 1
/// under `x` and reports what the decryptor can derive at every wire.
pub fn trace_text(circuit: &str, bits: &str, seed: u64) -> Result<String, String> {
    let c = match parse_circuit(circuit)? {
        ParsedCircuit::Monotone(c) => c,
        ParsedCircuit::Extended(_) => return Err("the circuit uses NOT; remove it with De Morgan first".into()),
    };
    let x = parse_input(bits)?;
    let depth = c.depth().map_err(|e| e.to_string())?;
    let f = layer_and_pad(&c, depth).map_err(|e| e.to_string())?;
    let group = GroupDescriptor::new(BigUint::from(TOY_PRIME), depth + 1).map_err(|e| e.to_string())?;
    let map = ReferenceMap::new(group);
    let scheme = KpAbe::new(&map).map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let err = |e: SchemeError| e.to_string();
    let (pp, msk) = scheme.setup(f.n(), &mut rng).map_err(err)?;
    let sk = scheme.keygen(&msk, &pp, &f, &mut rng).map_err(err)?;
    let ct = scheme.encrypt(&pp, &x, true, &mut rng).map_err(err)?;

    let mut out = format!("p = {TOY_PRIME}, k = {}\n", depth + 1);
    if f != c {
        let _ = writeln!(out, "layered form:\n{}", render(&f).trim_end());
    }
    let depths = f.depths().map_err(|e| e.to_string())?;
    for w in 1..=f.wire_count() {
        match scheme.derive_wire(&sk, &ct, w) {
            Ok(e) => {
                let _ = writeln!(out, "w{w} (depth {}): E = {}", depths[w - 1], map.render_element(&e));
            }
            Err(SchemeError::WireUnsatisfied(_)) => {
                let _ = writeln!(out, "w{w} (depth {}): unsatisfied", depths[w - 1]);
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    match scheme.decrypt(&sk, &ct) {
        Ok(m) => {
            let _ = writeln!(out, "decrypts to {}", u8::from(m));
        }
        Err(SchemeError::NotSatisfied) => out.push_str("NOT-SATISFIED\n"),
        Err(e) => return Err(e.to_string()),
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn evaluate(circuit: &str, bits: &str) -> Result<String, JsError> {
    evaluate_text(circuit, bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn demorgan(circuit: &str) -> Result<String, JsError> {
    demorgan_text(circuit).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trace(circuit: &str, bits: &str, seed: u32) -> Result<String, JsError> {
    trace_text(circuit, bits, u64::from(seed)).map_err(|e| JsError::new(&e))
}
