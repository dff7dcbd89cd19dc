//! `circuit ...` and `game demo`.

use std::fmt::Write as _;
use std::path::Path;

use circuit_abe::circuit::{
    demorganize, layer_and_pad, literal_inputs, parse_bits, random, render, render_bits, ParsedCircuit,
};
use circuit_abe::codec::{render_ciphertext, render_public_params};
use circuit_abe::kpabe::KpAbe;
use circuit_abe::mlmap::{MultilinearMap, ReferenceMap};
use circuit_abe::reduction::{run_game, OmniscientAdversary};
use rand::RngCore;

use crate::scheme::{read_circuit, read_monotone};
use crate::Failure;

pub fn check(path: &Path) -> Result<String, Failure> {
    let (violations, n, q, depth, kind) = match read_circuit(path)? {
        ParsedCircuit::Monotone(c) => (c.validate(), c.n(), c.q(), c.depth().ok(), "monotone"),
        ParsedCircuit::Extended(c) => (c.validate(), c.n(), c.q(), c.depth().ok(), "extended (uses NOT)"),
    };
    if violations.is_empty() {
        let depth = depth.expect("valid circuits have a depth");
        Ok(format!("ok: {kind} circuit, n={n} q={q} depth={depth}"))
    } else {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        Err(Failure::Usage(format!(
            "{}: {} violation(s)\n{}",
            path.display(),
            lines.len(),
            lines.join("\n")
        )))
    }
}

pub fn demorgan(path: &Path) -> Result<String, Failure> {
    let c = read_circuit(path)?.into_extended();
    let m = demorganize(&c).map_err(|e| Failure::Usage(e.to_string()))?;
    let n = m.original_inputs;
    let mut out = String::new();
    let _ = writeln!(out, "# monotone form of {} over {} literals", path.display(), 2 * n);
    let _ = writeln!(out, "# input i is x_i and input {n}+i is NOT x_i (1 <= i <= {n})");
    out.push_str(&render(&m.circuit));
    Ok(out)
}

pub fn layer(path: &Path, depth: usize) -> Result<String, Failure> {
    let c = read_monotone(path)?;
    let padded = layer_and_pad(&c, depth).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(render(&padded))
}

pub fn eval(path: &Path, bits: &str, literals: bool) -> Result<String, Failure> {
    let mut x = parse_bits(bits).ok_or_else(|| Failure::Usage(format!("`{bits}` is not a bit string")))?;
    if literals {
        x = literal_inputs(&x);
    }
    let eval = match read_circuit(path)? {
        ParsedCircuit::Monotone(c) => c.evaluate(&x),
        ParsedCircuit::Extended(c) => c.evaluate(&x),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = format!("f({}) = {}\n", render_bits(&x), u8::from(eval.output()));
    for (i, v) in eval.wires.iter().enumerate() {
        let _ = writeln!(out, "w{} = {}", i + 1, u8::from(*v));
    }
    Ok(out)
}

/// One real and one random game against the omniscient adversary, which
/// queries a single key for a random circuit rejecting `x*`.
pub fn game_demo(n: usize, depth: usize, bits: u32, rng: &mut dyn RngCore) -> Result<String, Failure> {
    if n == 0 || depth == 0 {
        return Err(Failure::Usage("--n and --depth must be at least 1".into()));
    }
    let map = ReferenceMap::generate(bits, depth + 1, rng).map_err(|e| Failure::Usage(e.to_string()))?;
    let scheme = KpAbe::new(&map).map_err(|e| Failure::Usage(e.to_string()))?;
    let f = random::layered(rng, n, depth, 3 * depth);
    let x_star = random::input_with_output(rng, &f, false).expect("monotone circuits reject all-zeros");

    let mut out = String::new();
    let _ = writeln!(out, "group: {}", map.group().render());
    let _ = writeln!(out, "x* = {}", render_bits(&x_star));
    let _ = writeln!(out, "query circuit (f(x*) = 0):");
    out.push_str(&render(&f));
    for real in [true, false] {
        let mut adv = OmniscientAdversary::new(x_star.clone(), vec![f.clone()]);
        let t = run_game(&scheme, &mut adv, real, rng).map_err(|e| Failure::Usage(e.to_string()))?;
        let _ = writeln!(out, "\n== game with {} T ==", if real { "real" } else { "random" });
        out.push_str("public parameters:\n");
        out.push_str(&render_public_params(&map, &t.pp));
        out.push_str("challenge ciphertext:\n");
        out.push_str(&render_ciphertext(&map, &t.challenge));
        for (i, sk) in t.keys.iter().enumerate() {
            let _ = writeln!(out, "key {}: {} components", i + 1, sk.component_count());
        }
        let _ = writeln!(out, "adversary answer M' = {}", u8::from(t.answer));
        let _ = writeln!(out, "guess: {}", if t.guess_real { "real" } else { "random" });
    }
    Ok(out)
}
