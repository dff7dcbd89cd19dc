use std::collections::BTreeMap;

use super::{Circuit, CircuitError, ExtGate, ExtendedCircuit, Gate, GateKind};

/// A monotone circuit over `2n` literals: wire `i` is `x_i` and wire `n + i`
/// is `NOT x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monotonized {
    pub circuit: Circuit,
    /// Input length of the original circuit.
    pub original_inputs: usize,
}

impl Monotonized {
    /// Evaluates the monotone circuit on the literal expansion of `x`.
    pub fn evaluate(&self, x: &[bool]) -> Result<bool, CircuitError> {
        if x.len() != self.original_inputs {
            return Err(CircuitError::InputLength {
                expected: self.original_inputs,
                got: x.len(),
            });
        }
        Ok(self.circuit.evaluate(&literal_inputs(x))?.output())
    }
}

/// `x -> (x_1, ..., x_n, NOT x_1, ..., NOT x_n)`.
pub fn literal_inputs(x: &[bool]) -> Vec<bool> {
    x.iter().copied().chain(x.iter().map(|b| !b)).collect()
}

/// A wire of the original circuit seen through its NOT chain: the AND/OR gate
/// or input that drives it, and whether the value arrives negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Literal {
    wire: usize,
    negated: bool,
}

impl Literal {
    fn flip(self) -> Literal {
        Literal {
            wire: self.wire,
            negated: !self.negated,
        }
    }
}

/// Removes every NOT gate.
///
/// Alongside `C` this builds the dual circuit `C~` (each wire computes the
/// negation of its counterpart, by De Morgan), then redirects each negation
/// to the matching dual wire. Only the gates the output depends on are kept,
/// so at most two monotone gates appear per AND/OR gate of `C` and the
/// depth, counted in AND/OR gates, is unchanged.
///
/// If the output reduces to a bare literal other than wire `2n`, a single
/// `OR(l, l)` gate is added so the output stays the last wire.
pub fn demorganize(c: &ExtendedCircuit) -> Result<Monotonized, CircuitError> {
    c.ensure_valid()?;
    let n = c.n();

    let mut resolved: Vec<Literal> = (1..=n).map(|wire| Literal { wire, negated: false }).collect();
    for (i, g) in c.gates().iter().enumerate() {
        let lit = match *g {
            ExtGate::Not(a) => resolved[a - 1].flip(),
            _ => Literal {
                wire: n + 1 + i,
                negated: false,
            },
        };
        resolved.push(lit);
    }

    let binary = |w: usize| -> (GateKind, usize, usize) {
        match c.gates()[w - n - 1] {
            ExtGate::And(a, b) => (GateKind::And, a, b),
            ExtGate::Or(a, b) => (GateKind::Or, a, b),
            ExtGate::Not(_) => unreachable!("literals never point at NOT gates"),
        }
    };
    let children = |lit: Literal| -> [Literal; 2] {
        let (_, a, b) = binary(lit.wire);
        let (la, lb) = (resolved[a - 1], resolved[b - 1]);
        if lit.negated {
            [la.flip(), lb.flip()]
        } else {
            [la, lb]
        }
    };

    let output = resolved[c.output_wire() - 1];
    let mut needed = std::collections::BTreeSet::new();
    let mut stack = vec![output];
    while let Some(lit) = stack.pop() {
        if lit.wire <= n || !needed.insert(lit) {
            continue;
        }
        stack.extend(children(lit));
    }

    // Children always point at smaller original wires, so ascending order is
    // topological and the output literal comes last.
    let mut index: BTreeMap<Literal, usize> = BTreeMap::new();
    let literal_wire = |lit: Literal, index: &BTreeMap<Literal, usize>| -> usize {
        if lit.wire <= n {
            if lit.negated {
                n + lit.wire
            } else {
                lit.wire
            }
        } else {
            index[&lit]
        }
    };
    let mut gates = Vec::with_capacity(needed.len() + 1);
    for &lit in &needed {
        let (kind, _, _) = binary(lit.wire);
        let kind = if lit.negated { kind.dual() } else { kind };
        let [ca, cb] = children(lit);
        let (a, b) = (literal_wire(ca, &index), literal_wire(cb, &index));
        gates.push(Gate::new(kind, a.min(b), a.max(b)));
        index.insert(lit, 2 * n + gates.len());
    }

    if output.wire <= n {
        let l = literal_wire(output, &index);
        if l != 2 * n {
            gates.push(Gate::or(l, l));
        }
    }

    Ok(Monotonized {
        circuit: Circuit::new(2 * n, gates),
        original_inputs: n,
    })
}

/// Rebuilds `c` as a layered circuit whose output sits at exactly
/// `target_depth`, delaying early wires through `OR(u, u)` pass-through
/// gates. Gates that do not reach the output are dropped.
pub fn layer_and_pad(c: &Circuit, target_depth: usize) -> Result<Circuit, CircuitError> {
    let depths = c.depths()?;
    let depth = depths[c.output_wire() - 1];
    if depth > target_depth {
        return Err(CircuitError::TooDeep {
            depth,
            target: target_depth,
        });
    }
    let n = c.n();
    let live = c.reaches_output();

    // Deepest layer each original wire must be available at.
    let mut needed_until: Vec<usize> = depths.clone();
    for w in (n + 1..=c.wire_count()).filter(|&w| live[w - 1]) {
        let g = c.gate(w).expect("gate wire");
        for u in [g.a, g.b] {
            needed_until[u - 1] = needed_until[u - 1].max(depths[w - 1] - 1);
        }
    }
    let out = c.output_wire();
    needed_until[out - 1] = target_depth;

    // copies[u - 1][t - depth(u)] is the new wire carrying u at layer t.
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); c.wire_count()];
    for u in 1..=n {
        copies[u - 1].push(u);
    }
    let mut gates = Vec::new();
    let mut by_depth: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for w in (n + 1..=c.wire_count()).filter(|&w| live[w - 1]) {
        by_depth.entry(depths[w - 1]).or_default().push(w);
    }

    for layer in 2..=target_depth {
        for &w in by_depth.get(&layer).into_iter().flatten() {
            let g = c.gate(w).expect("gate wire");
            let a = copies[g.a - 1][layer - 1 - depths[g.a - 1]];
            let b = copies[g.b - 1][layer - 1 - depths[g.b - 1]];
            gates.push(Gate::new(g.kind, a.min(b), a.max(b)));
            copies[w - 1].push(n + gates.len());
        }
        for u in 1..=c.wire_count() {
            if !live[u - 1] || depths[u - 1] >= layer || needed_until[u - 1] < layer {
                continue;
            }
            let prev = *copies[u - 1].last().expect("wire emitted at its own depth");
            gates.push(Gate::or(prev, prev));
            copies[u - 1].push(n + gates.len());
        }
    }

    Ok(Circuit::new(n, gates))
}
