//! Boolean circuits.
//!
//! A monotone [`Circuit`] is the tuple `(n, q, A, B, GateType)`: wires are
//! numbered `1..=n+q`, wires `1..=n` are inputs, wires `n+1..=n+q` are gates
//! and wire `n+q` is the output. Every gate `w` reads wires `A(w) <= B(w) < w`;
//! `A(w) = B(w)` is allowed so that `OR(u, u)` can serve as a pass-through.
//!
//! A circuit is *layered* when both inputs of every gate sit exactly one level
//! below it. Depth is measured by the longest path to an input (inputs have
//! depth 1); on layered circuits this coincides with the shortest path.
//!
//! [`ExtendedCircuit`] adds single-input NOT gates and is the input to
//! [`demorganize`].

mod dsl;
pub mod random;
mod transform;

use std::fmt;

use thiserror::Error;

pub use dsl::{parse, render, render_extended, ParseError, ParsedCircuit};
pub use transform::{demorganize, layer_and_pad, literal_inputs, Monotonized};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a && b,
            GateKind::Or => a || b,
        }
    }

    pub fn dual(self) -> GateKind {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
        })
    }
}

/// A two-input gate reading wires `a` and `b` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub a: usize,
    pub b: usize,
}

impl Gate {
    pub fn new(kind: GateKind, a: usize, b: usize) -> Self {
        Gate { kind, a, b }
    }
    pub fn and(a: usize, b: usize) -> Self {
        Gate::new(GateKind::And, a, b)
    }
    pub fn or(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Or, a, b)
    }
}

/// A rule a circuit fails. Wires are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("circuit has no input wires")]
    NoInputs,
    #[error("gate {wire} reads unknown wire {input}")]
    UnknownWire { wire: usize, input: usize },
    #[error("gate {wire} violates w > B(w) >= A(w) with A={a}, B={b}")]
    Ordering { wire: usize, a: usize, b: usize },
    #[error("gate {wire} at depth {depth} is not layered: inputs {a} (depth {depth_a}) and {b} (depth {depth_b})")]
    Layering {
        wire: usize,
        depth: usize,
        a: usize,
        depth_a: usize,
        b: usize,
        depth_b: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("wire {0} does not exist")]
    UnknownWire(usize),
    #[error("circuit is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("circuit depth {depth} exceeds the target depth {target}")]
    TooDeep { depth: usize, target: usize },
}

/// Result of [`Circuit::evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// `f_w(x)` for `w = 1..=n+q`, stored at index `w - 1`.
    pub wires: Vec<bool>,
}

impl Evaluation {
    pub fn output(&self) -> bool {
        *self.wires.last().expect("circuits have at least one wire")
    }

    pub fn wire(&self, w: usize) -> bool {
        self.wires[w - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Builds the circuit without checking it; see [`Circuit::validate`].
    pub fn new(n: usize, gates: Vec<Gate>) -> Self {
        Circuit { n, gates }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.gates.len()
    }

    pub fn wire_count(&self) -> usize {
        self.n + self.gates.len()
    }

    pub fn output_wire(&self) -> usize {
        self.wire_count()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_input(&self, w: usize) -> bool {
        (1..=self.n).contains(&w)
    }

    /// The gate driving wire `w`, if `w` is a gate wire.
    pub fn gate(&self, w: usize) -> Option<&Gate> {
        w.checked_sub(self.n + 1).and_then(|i| self.gates.get(i))
    }

    /// Every rule the circuit breaks; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::NoInputs);
        }
        let mut ordered = true;
        for (i, g) in self.gates.iter().enumerate() {
            let w = self.n + 1 + i;
            for input in [g.a, g.b] {
                if input == 0 || input > self.wire_count() {
                    violations.push(Violation::UnknownWire { wire: w, input });
                    ordered = false;
                }
            }
            if !(w > g.b && g.b >= g.a) {
                violations.push(Violation::Ordering {
                    wire: w,
                    a: g.a,
                    b: g.b,
                });
                ordered = false;
            }
        }
        // Depths are only meaningful once every gate reads earlier wires.
        if ordered {
            let depths = self.depths_unchecked();
            for (i, g) in self.gates.iter().enumerate() {
                let w = self.n + 1 + i;
                let (da, db) = (depths[g.a - 1], depths[g.b - 1]);
                let d = depths[w - 1];
                if da != d - 1 || db != d - 1 {
                    violations.push(Violation::Layering {
                        wire: w,
                        depth: d,
                        a: g.a,
                        depth_a: da,
                        b: g.b,
                        depth_b: db,
                    });
                }
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<(), CircuitError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CircuitError::Invalid(v))
        }
    }

    fn ensure_ordered(&self) -> Result<(), CircuitError> {
        for (i, g) in self.gates.iter().enumerate() {
            let w = self.n + 1 + i;
            if g.a == 0 || g.b == 0 || g.a >= w || g.b >= w {
                return Err(CircuitError::Invalid(vec![Violation::Ordering {
                    wire: w,
                    a: g.a,
                    b: g.b,
                }]));
            }
        }
        Ok(())
    }

    fn depths_unchecked(&self) -> Vec<usize> {
        let mut depths = vec![1; self.wire_count()];
        for (i, g) in self.gates.iter().enumerate() {
            depths[self.n + i] = 1 + depths[g.a - 1].max(depths[g.b - 1]);
        }
        depths
    }

    /// Depth of every wire, indexed by `w - 1`.
    pub fn depths(&self) -> Result<Vec<usize>, CircuitError> {
        self.ensure_ordered()?;
        Ok(self.depths_unchecked())
    }

    /// `depth(w)`: 1 for inputs, one more than the deepest input for gates.
    pub fn depth_of(&self, w: usize) -> Result<usize, CircuitError> {
        if w == 0 || w > self.wire_count() {
            return Err(CircuitError::UnknownWire(w));
        }
        Ok(self.depths()?[w - 1])
    }

    /// Depth of the output wire.
    pub fn depth(&self) -> Result<usize, CircuitError> {
        self.depth_of(self.output_wire())
    }

    /// Bottom-up evaluation of every wire on `x`.
    pub fn evaluate(&self, x: &[bool]) -> Result<Evaluation, CircuitError> {
        if x.len() != self.n {
            return Err(CircuitError::InputLength {
                expected: self.n,
                got: x.len(),
            });
        }
        self.ensure_ordered()?;
        let mut wires = Vec::with_capacity(self.wire_count());
        wires.extend_from_slice(x);
        for g in &self.gates {
            let v = g.kind.apply(wires[g.a - 1], wires[g.b - 1]);
            wires.push(v);
        }
        Ok(Evaluation { wires })
    }

    /// Wires from which the output is reachable, indexed by `w - 1`.
    pub fn reaches_output(&self) -> Vec<bool> {
        let mut live = vec![false; self.wire_count()];
        if let Some(last) = live.last_mut() {
            *last = true;
        }
        for w in (self.n + 1..=self.wire_count()).rev() {
            if live[w - 1] {
                let g = &self.gates[w - self.n - 1];
                live[g.a - 1] = true;
                live[g.b - 1] = true;
            }
        }
        live
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtGate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
}

impl ExtGate {
    pub fn inputs(&self) -> Vec<usize> {
        match *self {
            ExtGate::And(a, b) | ExtGate::Or(a, b) => vec![a, b],
            ExtGate::Not(a) => vec![a],
        }
    }
}

/// A circuit over AND, OR and NOT gates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedCircuit {
    n: usize,
    gates: Vec<ExtGate>,
}

impl ExtendedCircuit {
    pub fn new(n: usize, gates: Vec<ExtGate>) -> Self {
        ExtendedCircuit { n, gates }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[ExtGate] {
        &self.gates
    }

    pub fn output_wire(&self) -> usize {
        self.n + self.gates.len()
    }

    /// Acyclicity and wire references: every gate reads strictly earlier
    /// wires.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::NoInputs);
        }
        for (i, g) in self.gates.iter().enumerate() {
            let w = self.n + 1 + i;
            for input in g.inputs() {
                if input == 0 || input >= w {
                    violations.push(Violation::UnknownWire { wire: w, input });
                }
            }
        }
        violations
    }

    pub fn ensure_valid(&self) -> Result<(), CircuitError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CircuitError::Invalid(v))
        }
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<Evaluation, CircuitError> {
        if x.len() != self.n {
            return Err(CircuitError::InputLength {
                expected: self.n,
                got: x.len(),
            });
        }
        self.ensure_valid()?;
        let mut wires = x.to_vec();
        for g in &self.gates {
            let v = match *g {
                ExtGate::And(a, b) => wires[a - 1] && wires[b - 1],
                ExtGate::Or(a, b) => wires[a - 1] || wires[b - 1],
                ExtGate::Not(a) => !wires[a - 1],
            };
            wires.push(v);
        }
        Ok(Evaluation { wires })
    }

    /// Longest path counted in AND/OR gates only: negations are pushed to the
    /// inputs by [`demorganize`] and cost no depth.
    pub fn depth(&self) -> Result<usize, CircuitError> {
        self.ensure_valid()?;
        let mut depths = vec![1usize; self.n];
        for g in &self.gates {
            let d = match *g {
                ExtGate::And(a, b) | ExtGate::Or(a, b) => 1 + depths[a - 1].max(depths[b - 1]),
                ExtGate::Not(a) => depths[a - 1],
            };
            depths.push(d);
        }
        Ok(*depths.last().expect("n >= 1"))
    }

    /// Number of AND/OR gates.
    pub fn binary_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| !matches!(g, ExtGate::Not(_))).count()
    }
}

impl From<&Circuit> for ExtendedCircuit {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::And => ExtGate::And(g.a, g.b),
                GateKind::Or => ExtGate::Or(g.a, g.b),
            })
            .collect();
        ExtendedCircuit::new(c.n, gates)
    }
}

/// Parses a bit string such as `1011` (first character is `x_1`).
pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn render_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_is_valid() {
        let c = Circuit::new(2, vec![Gate::and(1, 2)]);
        assert!(c.validate().is_empty());
        assert_eq!(c.depth().unwrap(), 2);
        assert_eq!(c.depth_of(1).unwrap(), 1);
    }

    #[test]
    fn self_reference_is_an_ordering_violation() {
        let c = Circuit::new(2, vec![Gate::and(3, 1)]);
        let v = c.validate();
        assert!(v.contains(&Violation::Ordering { wire: 3, a: 3, b: 1 }), "{v:?}");
    }

    #[test]
    fn mixed_depth_inputs_break_layering() {
        let c = Circuit::new(2, vec![Gate::or(1, 2), Gate::and(1, 3)]);
        assert_eq!(
            c.validate(),
            vec![Violation::Layering {
                wire: 4,
                depth: 3,
                a: 1,
                depth_a: 1,
                b: 3,
                depth_b: 2
            }]
        );
    }

    #[test]
    fn unknown_wires_are_reported() {
        let c = Circuit::new(2, vec![Gate::and(0, 9)]);
        let v = c.validate();
        assert!(v.contains(&Violation::UnknownWire { wire: 3, input: 0 }));
        assert!(v.contains(&Violation::UnknownWire { wire: 3, input: 9 }));
        assert!(matches!(c.depth_of(7), Err(CircuitError::UnknownWire(7))));
    }

    #[test]
    fn pass_through_chain_depth() {
        for d in 1..8 {
            let gates = (0..d).map(|i| Gate::or(1 + i, 1 + i)).collect();
            let c = Circuit::new(1, gates);
            assert!(c.is_valid());
            assert_eq!(c.depth().unwrap(), d + 1);
        }
    }

    #[test]
    fn truth_tables() {
        let and = Circuit::new(2, vec![Gate::and(1, 2)]);
        assert!(and.evaluate(&[true, true]).unwrap().output());
        assert!(!and.evaluate(&[true, false]).unwrap().output());
        let or = Circuit::new(2, vec![Gate::or(1, 2)]);
        assert!(!or.evaluate(&[false, false]).unwrap().output());
        assert!(matches!(
            or.evaluate(&[true]),
            Err(CircuitError::InputLength { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn extended_depth_ignores_negation() {
        let c = ExtendedCircuit::new(2, vec![ExtGate::And(1, 2), ExtGate::Not(3)]);
        assert_eq!(c.depth().unwrap(), 2);
        assert!(!c.evaluate(&[true, true]).unwrap().output());
        let bad = ExtendedCircuit::new(1, vec![ExtGate::Not(2)]);
        assert!(!bad.validate().is_empty());
    }

    #[test]
    fn bits() {
        assert_eq!(parse_bits("101"), Some(vec![true, false, true]));
        assert_eq!(parse_bits("12"), None);
        assert_eq!(render_bits(&[false, true]), "01");
    }
}
