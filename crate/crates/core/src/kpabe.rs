//! Key-policy ABE for layered monotone circuits.
//!
//! Setup fixes the input length `n` and the circuit depth `ℓ`, and runs the
//! map with degree `k = ℓ + 1`. Every key is for a valid layered circuit of
//! depth exactly `ℓ`.
//!
//! Decryption walks the circuit bottom-up. For each wire `w` at depth `j`
//! with `f_w(x) = 1` it derives `E_w = g_{j+1}^{s r_w}`: input wires pair
//! their two key components against `g^s` and `h_w^s`; gates "move" the
//! child's value up one level by pairing it with `g^{a_w}` (or `g^{b_w}`) and
//! then "shift" it onto `r_w` with the level-`j` component paired against
//! `g^s`. The header `e(K_H, g^s) = g_k^{αs - r_{n+q}s}` times `E_{n+q}`
//! yields `g_k^{αs}`, which is compared with `C_M`.
//!
//! Messages are single bits: `C_M = g_k^{αs}` encrypts 1, a uniform level-`k`
//! element encrypts 0. A 0 is therefore misread as 1 with probability `1/p`.

use std::collections::BTreeMap;

use rand::RngCore;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Evaluation, GateKind};
use crate::mlmap::{MapError, MultilinearMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("circuit has {got} inputs but the system has {expected}")]
    InputCount { expected: usize, got: usize },
    #[error("circuit depth {got} differs from the system depth {expected}")]
    Depth { expected: usize, got: usize },
    #[error("the key's circuit is not satisfied by the ciphertext's input")]
    NotSatisfied,
    #[error("wire {0} is not satisfied by the ciphertext's input")]
    WireUnsatisfied(usize),
    #[error("malformed {what}: {detail}")]
    Shape { what: &'static str, detail: String },
}

fn shape(what: &'static str, detail: impl Into<String>) -> SchemeError {
    SchemeError::Shape {
        what,
        detail: detail.into(),
    }
}

/// `PP = (g_k^α, h_1, ..., h_n)` together with the input length.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicParams<E> {
    pub n: usize,
    /// `g_k^α`
    pub big_h: E,
    /// `h_1..h_n` at level 1, stored at index `i - 1`.
    pub h: Vec<E>,
}

/// `MSK = g_{k-1}^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSecret<E> {
    pub key: E,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext<E> {
    /// Public attribute vector.
    pub x: Vec<bool>,
    pub c_m: E,
    /// `g^s`
    pub c_s: E,
    /// `h_i^s` for every `i` with `x_i = 1` (1-based keys).
    pub c: BTreeMap<usize, E>,
}

/// Key components of one wire.
#[derive(Debug, Clone, PartialEq)]
pub enum WireKey<E> {
    /// `K_1 = g^{r_w} h_w^{z_w}`, `K_2 = g^{-z_w}`.
    Input { k1: E, k2: E },
    /// `g^{a_w}`, `g^{b_w}`, `g_j^{r_w - a_w r_A}`, `g_j^{r_w - b_w r_B}`.
    Or { k1: E, k2: E, k3: E, k4: E },
    /// `g^{a_w}`, `g^{b_w}`, `g_j^{r_w - a_w r_A - b_w r_B}`.
    And { k1: E, k2: E, k3: E },
}

impl<E> WireKey<E> {
    pub fn components(&self) -> Vec<&E> {
        match self {
            WireKey::Input { k1, k2 } => vec![k1, k2],
            WireKey::Or { k1, k2, k3, k4 } => vec![k1, k2, k3, k4],
            WireKey::And { k1, k2, k3 } => vec![k1, k2, k3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecretKey<E> {
    pub circuit: Circuit,
    /// `K_H = g_{k-1}^{α - r_{n+q}}`
    pub header: E,
    /// Components of wire `w` at index `w - 1`.
    pub wires: Vec<WireKey<E>>,
}

impl<E> SecretKey<E> {
    /// Header plus every wire component.
    pub fn component_count(&self) -> usize {
        1 + self.wires.iter().map(|w| w.components().len()).sum::<usize>()
    }
}

/// The randomness KeyGen draws for one wire.
#[derive(Debug, Clone, PartialEq)]
pub enum WireRandomness<S> {
    Input { r: S, z: S },
    Gate { r: S, a: S, b: S },
}

impl<S> WireRandomness<S> {
    pub fn r(&self) -> &S {
        match self {
            WireRandomness::Input { r, .. } | WireRandomness::Gate { r, .. } => r,
        }
    }
}

/// All of KeyGen's randomness, wire `w` at index `w - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyRandomness<S> {
    pub wires: Vec<WireRandomness<S>>,
}

/// Which child an OR wire is derived through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    A,
    B,
}

type Elem<M> = <M as MultilinearMap>::Element;
type Scal<M> = <M as MultilinearMap>::Scalar;

/// The scheme over a chosen multilinear-map backend.
#[derive(Debug, Clone)]
pub struct KpAbe<M> {
    map: M,
}

impl<M: MultilinearMap> KpAbe<M> {
    /// Needs a map of degree at least 2 (circuit depth at least 1).
    pub fn new(map: M) -> Result<Self, SchemeError> {
        if map.degree() < 2 {
            return Err(SchemeError::Parameters(format!(
                "multilinearity degree {} leaves no room for a circuit (need k >= 2)",
                map.degree()
            )));
        }
        Ok(KpAbe { map })
    }

    pub fn map(&self) -> &M {
        &self.map
    }

    /// Circuit depth `ℓ = k - 1`.
    pub fn depth(&self) -> usize {
        self.map.degree() - 1
    }

    fn k(&self) -> usize {
        self.map.degree()
    }

    pub fn setup(
        &self,
        n: usize,
        rng: &mut dyn RngCore,
    ) -> Result<(PublicParams<Elem<M>>, MasterSecret<Elem<M>>), SchemeError> {
        let alpha = self.map.sample_scalar(rng, self.k() - 1)?;
        self.setup_with_alpha(n, &alpha, rng)
    }

    /// Setup with a caller-chosen `α`.
    pub fn setup_with_alpha(
        &self,
        n: usize,
        alpha: &Scal<M>,
        rng: &mut dyn RngCore,
    ) -> Result<(PublicParams<Elem<M>>, MasterSecret<Elem<M>>), SchemeError> {
        if n == 0 {
            return Err(SchemeError::Parameters("input length must be at least 1".into()));
        }
        let k = self.k();
        let big_h = self.map.encode(alpha, k)?;
        let key = self.map.encode(alpha, k - 1)?;
        let h = (0..n)
            .map(|_| {
                let y = self.map.sample_short(rng);
                self.map.encode(&y, 1)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((PublicParams { n, big_h, h }, MasterSecret { key }))
    }

    pub fn encrypt(
        &self,
        pp: &PublicParams<Elem<M>>,
        x: &[bool],
        message: bool,
        rng: &mut dyn RngCore,
    ) -> Result<Ciphertext<Elem<M>>, SchemeError> {
        let s = self.map.sample_short(rng);
        self.encrypt_with_s(pp, x, message, &s, rng)
    }

    /// Encryption under a caller-chosen `s`; `rng` is only used for the
    /// random `C_M` of a 0 message.
    pub fn encrypt_with_s(
        &self,
        pp: &PublicParams<Elem<M>>,
        x: &[bool],
        message: bool,
        s: &Scal<M>,
        rng: &mut dyn RngCore,
    ) -> Result<Ciphertext<Elem<M>>, SchemeError> {
        if x.len() != pp.n {
            return Err(CircuitError::InputLength {
                expected: pp.n,
                got: x.len(),
            }
            .into());
        }
        let c_s = self.map.encode(s, 1)?;
        let mut c = BTreeMap::new();
        for (i, _) in x.iter().enumerate().filter(|(_, &xi)| xi) {
            c.insert(i + 1, self.map.pow(&pp.h[i], s)?);
        }
        let c_m = if message {
            self.map.pow(&pp.big_h, s)?
        } else {
            self.map.sample_element(rng, self.k())?
        };
        Ok(Ciphertext {
            x: x.to_vec(),
            c_m,
            c_s,
            c,
        })
    }

    /// The circuit must be valid, layered, of depth `ℓ`, over `n` inputs.
    pub fn check_circuit(&self, pp: &PublicParams<Elem<M>>, f: &Circuit) -> Result<Vec<usize>, SchemeError> {
        f.ensure_valid()?;
        if f.n() != pp.n {
            return Err(SchemeError::InputCount {
                expected: pp.n,
                got: f.n(),
            });
        }
        let depths = f.depths()?;
        let depth = depths[f.output_wire() - 1];
        if depth != self.depth() {
            return Err(SchemeError::Depth {
                expected: self.depth(),
                got: depth,
            });
        }
        Ok(depths)
    }

    /// Randomness for one wire, drawn exactly as KeyGen draws it.
    pub fn sample_wire_randomness(
        &self,
        gate: Option<GateKind>,
        depth: usize,
        rng: &mut dyn RngCore,
    ) -> Result<WireRandomness<Scal<M>>, SchemeError> {
        let r = self.map.sample_scalar(rng, depth)?;
        Ok(match gate {
            None => WireRandomness::Input {
                r,
                z: self.map.sample_short(rng),
            },
            Some(_) => WireRandomness::Gate {
                r,
                a: self.map.sample_short(rng),
                b: self.map.sample_short(rng),
            },
        })
    }

    pub fn keygen(
        &self,
        msk: &MasterSecret<Elem<M>>,
        pp: &PublicParams<Elem<M>>,
        f: &Circuit,
        rng: &mut dyn RngCore,
    ) -> Result<SecretKey<Elem<M>>, SchemeError> {
        Ok(self.keygen_traced(msk, pp, f, rng)?.0)
    }

    /// KeyGen that also returns the randomness it drew.
    pub fn keygen_traced(
        &self,
        msk: &MasterSecret<Elem<M>>,
        pp: &PublicParams<Elem<M>>,
        f: &Circuit,
        rng: &mut dyn RngCore,
    ) -> Result<(SecretKey<Elem<M>>, KeyRandomness<Scal<M>>), SchemeError> {
        let depths = self.check_circuit(pp, f)?;
        let wires = (1..=f.wire_count())
            .map(|w| self.sample_wire_randomness(f.gate(w).map(|g| g.kind), depths[w - 1], rng))
            .collect::<Result<Vec<_>, _>>()?;
        let randomness = KeyRandomness { wires };
        let sk = self.keygen_with(msk, pp, f, &randomness)?;
        Ok((sk, randomness))
    }

    /// Deterministic KeyGen from explicit randomness.
    pub fn keygen_with(
        &self,
        msk: &MasterSecret<Elem<M>>,
        pp: &PublicParams<Elem<M>>,
        f: &Circuit,
        randomness: &KeyRandomness<Scal<M>>,
    ) -> Result<SecretKey<Elem<M>>, SchemeError> {
        let depths = self.check_circuit(pp, f)?;
        if randomness.wires.len() != f.wire_count() {
            return Err(shape("key randomness", "one entry per wire required"));
        }
        let m = &self.map;
        let r = |w: usize| randomness.wires[w - 1].r();

        let k = self.k();
        let header = m.mul(&msk.key, &m.encode(&m.scalar_neg(r(f.output_wire())), k - 1)?)?;

        let mut wires = Vec::with_capacity(f.wire_count());
        for (idx, wr) in randomness.wires.iter().enumerate() {
            let w = idx + 1;
            let key = match (f.gate(w), wr) {
                (None, WireRandomness::Input { r, z }) => WireKey::Input {
                    k1: m.mul(&m.encode(r, 1)?, &m.pow(&pp.h[w - 1], z)?)?,
                    k2: m.encode(&m.scalar_neg(z), 1)?,
                },
                (Some(g), WireRandomness::Gate { r: rw, a, b }) => {
                    let j = depths[w - 1];
                    let k1 = m.encode(a, 1)?;
                    let k2 = m.encode(b, 1)?;
                    let shift_a = m.scalar_sub(rw, &m.scalar_mul(a, r(g.a)));
                    match g.kind {
                        GateKind::Or => {
                            let shift_b = m.scalar_sub(rw, &m.scalar_mul(b, r(g.b)));
                            WireKey::Or {
                                k1,
                                k2,
                                k3: m.encode(&shift_a, j)?,
                                k4: m.encode(&shift_b, j)?,
                            }
                        }
                        GateKind::And => {
                            let shift = m.scalar_sub(&shift_a, &m.scalar_mul(b, r(g.b)));
                            WireKey::And {
                                k1,
                                k2,
                                k3: m.encode(&shift, j)?,
                            }
                        }
                    }
                }
                _ => return Err(shape("key randomness", format!("wire {w} has the wrong kind"))),
            };
            wires.push(key);
        }
        Ok(SecretKey {
            circuit: f.clone(),
            header,
            wires,
        })
    }

    /// Checks component kinds and levels against the key's circuit.
    pub fn check_key(&self, sk: &SecretKey<Elem<M>>) -> Result<(), SchemeError> {
        let f = &sk.circuit;
        f.ensure_valid()?;
        let depths = f.depths()?;
        if depths[f.output_wire() - 1] != self.depth() {
            return Err(SchemeError::Depth {
                expected: self.depth(),
                got: depths[f.output_wire() - 1],
            });
        }
        if sk.wires.len() != f.wire_count() {
            return Err(shape("secret key", "one component set per wire required"));
        }
        let level_is = |e: &Elem<M>, level: usize, what: &str| {
            if self.map.level(e) == level {
                Ok(())
            } else {
                Err(shape("secret key", format!("{what} must be at level {level}")))
            }
        };
        level_is(&sk.header, self.k() - 1, "header")?;
        for (idx, key) in sk.wires.iter().enumerate() {
            let w = idx + 1;
            let j = depths[idx];
            let ok = matches!(
                (f.gate(w).map(|g| g.kind), key),
                (None, WireKey::Input { .. })
                    | (Some(GateKind::Or), WireKey::Or { .. })
                    | (Some(GateKind::And), WireKey::And { .. })
            );
            if !ok {
                return Err(shape(
                    "secret key",
                    format!("wire {w} has components of the wrong kind"),
                ));
            }
            let comps = key.components();
            for (i, c) in comps.iter().enumerate() {
                let level = if f.gate(w).is_some() && i >= 2 { j } else { 1 };
                level_is(c, level, &format!("wire {w} component {}", i + 1))?;
            }
        }
        Ok(())
    }

    fn check_ciphertext(&self, n: usize, ct: &Ciphertext<Elem<M>>) -> Result<(), SchemeError> {
        if ct.x.len() != n {
            return Err(CircuitError::InputLength {
                expected: n,
                got: ct.x.len(),
            }
            .into());
        }
        let expected: Vec<usize> = (1..=n).filter(|&i| ct.x[i - 1]).collect();
        if !ct.c.keys().copied().eq(expected.iter().copied()) {
            return Err(shape("ciphertext", "C_i must be present exactly where x_i = 1"));
        }
        if self.map.level(&ct.c_s) != 1 || ct.c.values().any(|c| self.map.level(c) != 1) {
            return Err(shape("ciphertext", "g^s and the C_i must be at level 1"));
        }
        if self.map.level(&ct.c_m) != self.k() {
            return Err(shape("ciphertext", format!("C_M must be at level {}", self.k())));
        }
        Ok(())
    }

    fn prepare(&self, sk: &SecretKey<Elem<M>>, ct: &Ciphertext<Elem<M>>) -> Result<Evaluation, SchemeError> {
        self.check_key(sk)?;
        self.check_ciphertext(sk.circuit.n(), ct)?;
        Ok(sk.circuit.evaluate(&ct.x)?)
    }

    /// `E_w` for every satisfied wire up to and including `upto`.
    fn derive_upto(
        &self,
        sk: &SecretKey<Elem<M>>,
        ct: &Ciphertext<Elem<M>>,
        eval: &Evaluation,
        upto: usize,
    ) -> Result<Vec<Option<Elem<M>>>, SchemeError> {
        let m = &self.map;
        let mut e: Vec<Option<Elem<M>>> = Vec::with_capacity(upto);
        for w in 1..=upto {
            if !eval.wire(w) {
                e.push(None);
                continue;
            }
            let value = match (&sk.wires[w - 1], sk.circuit.gate(w)) {
                (WireKey::Input { k1, k2 }, None) => {
                    let cw =
                        ct.c.get(&w)
                            .ok_or_else(|| shape("ciphertext", format!("missing C_{w}")))?;
                    m.mul(&m.pair(k1, &ct.c_s)?, &m.pair(k2, cw)?)?
                }
                (WireKey::Or { k1, k2, k3, k4 }, Some(g)) => {
                    if eval.wire(g.a) {
                        self.move_and_shift(e[g.a - 1].as_ref(), k1, k3, &ct.c_s)?
                    } else {
                        self.move_and_shift(e[g.b - 1].as_ref(), k2, k4, &ct.c_s)?
                    }
                }
                (WireKey::And { k1, k2, k3 }, Some(g)) => {
                    let ea = e[g.a - 1].as_ref().ok_or(SchemeError::WireUnsatisfied(g.a))?;
                    let eb = e[g.b - 1].as_ref().ok_or(SchemeError::WireUnsatisfied(g.b))?;
                    let moved = m.mul(&m.pair(ea, k1)?, &m.pair(eb, k2)?)?;
                    m.mul(&moved, &m.pair(k3, &ct.c_s)?)?
                }
                _ => {
                    return Err(shape(
                        "secret key",
                        format!("wire {w} has components of the wrong kind"),
                    ))
                }
            };
            e.push(Some(value));
        }
        Ok(e)
    }

    /// `e(E_child, K_move) * e(K_shift, g^s)`.
    fn move_and_shift(
        &self,
        child: Option<&Elem<M>>,
        k_move: &Elem<M>,
        k_shift: &Elem<M>,
        c_s: &Elem<M>,
    ) -> Result<Elem<M>, SchemeError> {
        let child = child.ok_or_else(|| shape("decryption", "child value missing"))?;
        let m = &self.map;
        Ok(m.mul(&m.pair(child, k_move)?, &m.pair(k_shift, c_s)?)?)
    }

    /// `E_w = g_{depth(w)+1}^{s r_w}` for a satisfied wire.
    pub fn derive_wire(
        &self,
        sk: &SecretKey<Elem<M>>,
        ct: &Ciphertext<Elem<M>>,
        w: usize,
    ) -> Result<Elem<M>, SchemeError> {
        let eval = self.prepare(sk, ct)?;
        if w == 0 || w > sk.circuit.wire_count() {
            return Err(CircuitError::UnknownWire(w).into());
        }
        if !eval.wire(w) {
            return Err(SchemeError::WireUnsatisfied(w));
        }
        let mut e = self.derive_upto(sk, ct, &eval, w)?;
        Ok(e.pop().flatten().expect("satisfied wire has a value"))
    }

    /// `E_w` of an OR wire computed through the chosen child.
    pub fn derive_or_branch(
        &self,
        sk: &SecretKey<Elem<M>>,
        ct: &Ciphertext<Elem<M>>,
        w: usize,
        branch: Branch,
    ) -> Result<Elem<M>, SchemeError> {
        let eval = self.prepare(sk, ct)?;
        let (g, key) = match (sk.circuit.gate(w), sk.wires.get(w.wrapping_sub(1))) {
            (Some(g), Some(key @ WireKey::Or { .. })) => (g, key),
            _ => return Err(shape("decryption", format!("wire {w} is not an OR gate"))),
        };
        let WireKey::Or { k1, k2, k3, k4 } = key else {
            unreachable!()
        };
        let (child, k_move, k_shift) = match branch {
            Branch::A => (g.a, k1, k3),
            Branch::B => (g.b, k2, k4),
        };
        if !eval.wire(child) {
            return Err(SchemeError::WireUnsatisfied(child));
        }
        let e = self.derive_upto(sk, ct, &eval, child)?;
        self.move_and_shift(e[child - 1].as_ref(), k_move, k_shift, &ct.c_s)
    }

    /// `g_k^{αs}` as recovered by the key holder.
    pub fn recover_blinding(&self, sk: &SecretKey<Elem<M>>, ct: &Ciphertext<Elem<M>>) -> Result<Elem<M>, SchemeError> {
        let eval = self.prepare(sk, ct)?;
        if !eval.output() {
            return Err(SchemeError::NotSatisfied);
        }
        let out = sk.circuit.output_wire();
        let mut e = self.derive_upto(sk, ct, &eval, out)?;
        let e_out = e.pop().flatten().expect("output is satisfied");
        let header = self.map.pair(&sk.header, &ct.c_s)?;
        Ok(self.map.mul(&header, &e_out)?)
    }

    /// Returns the message bit, or [`SchemeError::NotSatisfied`] when
    /// `f(x) = 0`.
    pub fn decrypt(&self, sk: &SecretKey<Elem<M>>, ct: &Ciphertext<Elem<M>>) -> Result<bool, SchemeError> {
        Ok(self.recover_blinding(sk, ct)? == ct.c_m)
    }
}
