//! The selective-security reduction, run as code.
//!
//! Given a k-multilinear DDH instance `(g, g^s, g^{c_1}, ..., g^{c_k}, T)`,
//! the simulator publishes parameters with `α = ξ + c_1⋯c_k` without knowing
//! `α`, answers key queries for every circuit that rejects the committed
//! challenge input `x*`, and hands out `(T g_k^{ξ s}, g^s, (g^s)^{y_i})` as
//! the challenge ciphertext. That ciphertext encrypts 1 exactly when `T` is real.
//!
//! Key generation follows the proof's invariant: a wire `w` at depth `j`
//! with `f_w(x*) = 0` gets `r_w = c_1⋯c_{j+1} + η_w`, which the simulator can
//! only handle "in the exponent"; every wire with `f_w(x*) = 1` gets honestly
//! sampled randomness. The unknown products cancel in each key component,
//! so everything is computable from the instance alone.
//!
//! The simulator functions take an [`MddhChallenge`], never the witness;
//! only [`witness_master_secret`] and the `audit` checks read it.

use rand::RngCore;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind};
use crate::kpabe::{
    Ciphertext, KeyRandomness, KpAbe, MasterSecret, PublicParams, SchemeError, SecretKey, WireKey, WireRandomness,
};
use crate::mlmap::{MapError, MultilinearMap};

#[cfg(feature = "oracle")]
pub mod audit;

type Elem<M> = <M as MultilinearMap>::Element;
type Scal<M> = <M as MultilinearMap>::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("queried circuit accepts the challenge input; the game aborts")]
    Satisfied,
    #[error("challenge has {got} exponent elements but the map has degree {expected}")]
    Degree { expected: usize, got: usize },
    #[error("challenge input has length {got}, parameters expect {expected}")]
    InputLength { expected: usize, got: usize },
}

impl From<MapError> for ReductionError {
    fn from(e: MapError) -> Self {
        ReductionError::Scheme(e.into())
    }
}

impl From<CircuitError> for ReductionError {
    fn from(e: CircuitError) -> Self {
        ReductionError::Scheme(e.into())
    }
}

/// What the distinguisher is given.
#[derive(Debug, Clone, PartialEq)]
pub struct MddhChallenge<E> {
    pub g: E,
    pub g_s: E,
    /// `g^{c_i}` at index `i - 1`, for `i = 1..=k`.
    pub g_c: Vec<E>,
    pub t: E,
}

/// The instance's secrets, for checker code only.
#[derive(Debug, Clone, PartialEq)]
pub struct MddhWitness<S> {
    pub s: S,
    /// `c_i` at index `i - 1`.
    pub c: Vec<S>,
    pub is_real: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MddhInstance<E, S> {
    pub challenge: MddhChallenge<E>,
    pub witness: MddhWitness<S>,
}

/// Samples `s, c_1..c_k` and sets `T = g_k^{s c_1⋯c_k}` when `real`, a
/// uniform level-`k` element otherwise.
pub fn gen_instance<M: MultilinearMap>(
    map: &M,
    real: bool,
    rng: &mut dyn RngCore,
) -> Result<MddhInstance<Elem<M>, Scal<M>>, MapError> {
    let k = map.degree();
    let s = map.sample_short(rng);
    let c: Vec<_> = (0..k).map(|_| map.sample_short(rng)).collect();
    let t = if real {
        let product = c.iter().fold(s.clone(), |acc, ci| map.scalar_mul(&acc, ci));
        map.encode(&product, k)?
    } else {
        map.sample_element(rng, k)?
    };
    let challenge = MddhChallenge {
        g: map.generator(1)?,
        g_s: map.encode(&s, 1)?,
        g_c: c.iter().map(|ci| map.encode(ci, 1)).collect::<Result<_, _>>()?,
        t,
    };
    Ok(MddhInstance {
        challenge,
        witness: MddhWitness { s, c, is_real: real },
    })
}

/// A scalar as the simulator sees it: either known outright, or a known
/// offset from a product of the instance's secret exponents.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbolic<S> {
    Known(S),
    /// `c_1 ⋯ c_len + plus`
    Chain {
        len: usize,
        plus: S,
    },
    /// `±c_index + plus`
    Coeff {
        index: usize,
        negated: bool,
        plus: S,
    },
}

impl<S: Clone> Symbolic<S> {
    pub fn is_known(&self) -> bool {
        matches!(self, Symbolic::Known(_))
    }

    /// The concrete value under the witness exponents `c`.
    pub fn resolve<M: MultilinearMap<Scalar = S>>(&self, map: &M, c: &[S]) -> S {
        match self {
            Symbolic::Known(v) => v.clone(),
            Symbolic::Chain { len, plus } => {
                let product = c[..*len].iter().fold(map.scalar(1), |acc, ci| map.scalar_mul(&acc, ci));
                map.scalar_add(&product, plus)
            }
            Symbolic::Coeff { index, negated, plus } => {
                let ci = &c[index - 1];
                let ci = if *negated { map.scalar_neg(ci) } else { ci.clone() };
                map.scalar_add(&ci, plus)
            }
        }
    }
}

/// One simulated wire: whether `x*` satisfies it and its randomness in
/// symbolic form.
#[derive(Debug, Clone, PartialEq)]
pub struct WireRecord<S> {
    pub satisfied: bool,
    pub randomness: WireRandomness<Symbolic<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyRecord<S> {
    pub circuit: Circuit,
    pub wires: Vec<WireRecord<S>>,
}

impl<S: Clone> KeyRecord<S> {
    /// The concrete KeyGen randomness this key corresponds to.
    pub fn resolve<M: MultilinearMap<Scalar = S>>(&self, map: &M, c: &[S]) -> KeyRandomness<S> {
        let wires = self
            .wires
            .iter()
            .map(|w| match &w.randomness {
                WireRandomness::Input { r, z } => WireRandomness::Input {
                    r: r.resolve(map, c),
                    z: z.resolve(map, c),
                },
                WireRandomness::Gate { r, a, b } => WireRandomness::Gate {
                    r: r.resolve(map, c),
                    a: a.resolve(map, c),
                    b: b.resolve(map, c),
                },
            })
            .collect();
        KeyRandomness { wires }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatorState<S> {
    pub x_star: Vec<bool>,
    /// `y_i` at index `i - 1`.
    pub y: Vec<S>,
    pub xi: S,
    pub keys: Vec<KeyRecord<S>>,
}

fn check_degree<M: MultilinearMap>(map: &M, ch: &MddhChallenge<Elem<M>>) -> Result<(), ReductionError> {
    if ch.g_c.len() != map.degree() {
        return Err(ReductionError::Degree {
            expected: map.degree(),
            got: ch.g_c.len(),
        });
    }
    Ok(())
}

/// `g_j^{c_1⋯c_j}` for `j = 1..=upto`, at index `j - 1`, by a left fold of
/// pairings.
pub fn chain_products<M: MultilinearMap>(
    map: &M,
    ch: &MddhChallenge<Elem<M>>,
    upto: usize,
) -> Result<Vec<Elem<M>>, MapError> {
    let mut out: Vec<Elem<M>> = Vec::with_capacity(upto);
    for j in 0..upto {
        let next = match out.last() {
            None => ch.g_c[0].clone(),
            Some(prev) => map.pair(prev, &ch.g_c[j])?,
        };
        out.push(next);
    }
    Ok(out)
}

/// Setup: `h_i = g^{y_i}` where `x*_i = 1`, `g^{y_i + c_1}` elsewhere, and
/// `H = g_k^{c_1⋯c_k} g_k^ξ`.
pub fn sim_setup<M: MultilinearMap>(
    scheme: &KpAbe<M>,
    ch: &MddhChallenge<Elem<M>>,
    x_star: &[bool],
    rng: &mut dyn RngCore,
) -> Result<(PublicParams<Elem<M>>, SimulatorState<Scal<M>>), ReductionError> {
    let map = scheme.map();
    check_degree(map, ch)?;
    let k = map.degree();
    if x_star.is_empty() {
        return Err(SchemeError::Parameters("input length must be at least 1".into()).into());
    }
    let y: Vec<_> = x_star.iter().map(|_| map.sample_short(rng)).collect();
    let xi = map.sample_scalar(rng, k - 1)?;
    let h = x_star
        .iter()
        .zip(&y)
        .map(|(&bit, yi)| {
            let gy = map.encode(yi, 1)?;
            if bit {
                Ok(gy)
            } else {
                map.mul(&gy, &ch.g_c[0])
            }
        })
        .collect::<Result<Vec<_>, MapError>>()?;
    let p_k = chain_products(map, ch, k)?.pop().expect("k >= 1");
    let big_h = map.mul(&p_k, &map.encode(&xi, k)?)?;
    let state = SimulatorState {
        x_star: x_star.to_vec(),
        y,
        xi,
        keys: Vec::new(),
    };
    Ok((
        PublicParams {
            n: x_star.len(),
            big_h,
            h,
        },
        state,
    ))
}

/// `(T g_k^{ξ s}, g^s, {(g^s)^{y_i} : x*_i = 1})`.
pub fn sim_challenge<M: MultilinearMap>(
    scheme: &KpAbe<M>,
    ch: &MddhChallenge<Elem<M>>,
    state: &SimulatorState<Scal<M>>,
) -> Result<Ciphertext<Elem<M>>, ReductionError> {
    let map = scheme.map();
    check_degree(map, ch)?;
    let mut c = std::collections::BTreeMap::new();
    for (i, _) in state.x_star.iter().enumerate().filter(|(_, &b)| b) {
        c.insert(i + 1, map.pow(&ch.g_s, &state.y[i])?);
    }
    // H^s = g_k^{c_1⋯c_k s} g_k^{ξ s}; T stands in for the first factor.
    let blind = map.pair(&ch.g_s, &map.encode(&state.xi, map.degree() - 1)?)?;
    Ok(Ciphertext {
        x: state.x_star.clone(),
        c_m: map.mul(&ch.t, &blind)?,
        c_s: ch.g_s.clone(),
        c,
    })
}

struct KeyBuilder<'a, M: MultilinearMap> {
    map: &'a M,
    ch: &'a MddhChallenge<Elem<M>>,
    /// `g_j^{c_1⋯c_j}` at index `j - 1`.
    chain: Vec<Elem<M>>,
}

impl<M: MultilinearMap> KeyBuilder<'_, M> {
    fn neg(&self, a: &Scal<M>) -> Scal<M> {
        self.map.scalar_neg(a)
    }

    /// `x^{c_index}` lifted from level 1 to level `j`.
    fn lifted_c(&self, index: usize, j: usize) -> Result<Elem<M>, MapError> {
        let gc = &self.ch.g_c[index - 1];
        if j == 1 {
            Ok(gc.clone())
        } else {
            self.map.pair(gc, &self.map.generator(j - 1)?)
        }
    }

    /// `g_j^{r}` for a wire randomizer whose value lives at level `j`.
    fn r_at(&self, r: &Symbolic<Scal<M>>, j: usize) -> Result<Elem<M>, MapError> {
        match r {
            Symbolic::Known(v) => self.map.encode(v, j),
            Symbolic::Chain { len, plus } => {
                debug_assert_eq!(*len, j);
                self.map.mul(&self.chain[len - 1], &self.map.encode(plus, j)?)
            }
            Symbolic::Coeff { .. } => unreachable!("wire randomizers are known or chained"),
        }
    }

    /// `g^{v}` for a level-1 symbolic value.
    fn at_one(&self, v: &Symbolic<Scal<M>>) -> Result<Elem<M>, MapError> {
        match v {
            Symbolic::Known(v) => self.map.encode(v, 1),
            Symbolic::Coeff { index, negated, plus } => {
                let gc = &self.ch.g_c[index - 1];
                let gc = if *negated { self.map.inv(gc)? } else { gc.clone() };
                self.map.mul(&gc, &self.map.encode(plus, 1)?)
            }
            Symbolic::Chain { .. } => unreachable!("level-1 values are never chained"),
        }
    }

    /// `g_j^{r_w - a r_A [- b r_B]}` with `r_w`, `a`, `b` known.
    fn honest_shift(
        &self,
        r: &Scal<M>,
        terms: &[(&Scal<M>, &Symbolic<Scal<M>>)],
        j: usize,
    ) -> Result<Elem<M>, MapError> {
        let mut acc = self.map.encode(r, j)?;
        for (coef, child_r) in terms {
            acc = self
                .map
                .mul(&acc, &self.map.pow(&self.r_at(child_r, j)?, &self.neg(coef))?)?;
        }
        Ok(acc)
    }

    /// `g_j^{η - ψ η_A} · (g_j^{c_{j+1}})^{-η_A} · (g_j^{c_1⋯c_j})^{-ψ}`, which is
    /// `g_j^{r_w - a r_A}` for `r_w = c_1⋯c_{j+1} + η`, `a = c_{j+1} + ψ`,
    /// `r_A = c_1⋯c_j + η_A`.
    fn cancelled_shift(
        &self,
        eta: &Scal<M>,
        psi: &Scal<M>,
        eta_child: &Scal<M>,
        j: usize,
    ) -> Result<Elem<M>, MapError> {
        let m = self.map;
        let known = m.scalar_sub(eta, &m.scalar_mul(psi, eta_child));
        let acc = m.mul(
            &m.encode(&known, j)?,
            &m.pow(&self.lifted_c(j + 1, j)?, &self.neg(eta_child))?,
        )?;
        m.mul(&acc, &m.pow(&self.chain[j - 1], &self.neg(psi))?)
    }
}

fn chain_plus<S>(r: &Symbolic<S>) -> &S {
    match r {
        Symbolic::Chain { plus, .. } => plus,
        _ => unreachable!("unsatisfied wires carry chained randomizers"),
    }
}

/// Answers a key query for `f` with `f(x*) = 0`.
pub fn sim_keygen<M: MultilinearMap>(
    scheme: &KpAbe<M>,
    ch: &MddhChallenge<Elem<M>>,
    state: &mut SimulatorState<Scal<M>>,
    pp: &PublicParams<Elem<M>>,
    f: &Circuit,
    rng: &mut dyn RngCore,
) -> Result<SecretKey<Elem<M>>, ReductionError> {
    let map = scheme.map();
    check_degree(map, ch)?;
    if state.x_star.len() != pp.n {
        return Err(ReductionError::InputLength {
            expected: pp.n,
            got: state.x_star.len(),
        });
    }
    let depths = scheme.check_circuit(pp, f)?;
    let eval = f.evaluate(&state.x_star)?;
    if eval.output() {
        return Err(ReductionError::Satisfied);
    }
    let k = map.degree();
    let b = KeyBuilder {
        map,
        ch,
        chain: chain_products(map, ch, k)?,
    };

    let mut records: Vec<WireRecord<Scal<M>>> = Vec::with_capacity(f.wire_count());
    let mut wires = Vec::with_capacity(f.wire_count());
    for w in 1..=f.wire_count() {
        let j = depths[w - 1];
        let satisfied = eval.wire(w);
        let gate = f.gate(w).copied();
        let (randomness, key) = if satisfied {
            // Identical sampling to KeyGen.
            let honest = scheme.sample_wire_randomness(gate.map(|g| g.kind), j, rng)?;
            match (honest, gate) {
                (WireRandomness::Input { r, z }, None) => {
                    let key = WireKey::Input {
                        k1: map.mul(&map.encode(&r, 1)?, &map.pow(&pp.h[w - 1], &z)?)?,
                        k2: map.encode(&map.scalar_neg(&z), 1)?,
                    };
                    (
                        WireRandomness::Input {
                            r: Symbolic::Known(r),
                            z: Symbolic::Known(z),
                        },
                        key,
                    )
                }
                (WireRandomness::Gate { r, a, b: bw }, Some(g)) => {
                    let ra = records[g.a - 1].randomness.r();
                    let rb = records[g.b - 1].randomness.r();
                    let k1 = map.encode(&a, 1)?;
                    let k2 = map.encode(&bw, 1)?;
                    let key = match g.kind {
                        GateKind::Or => WireKey::Or {
                            k1,
                            k2,
                            k3: b.honest_shift(&r, &[(&a, ra)], j)?,
                            k4: b.honest_shift(&r, &[(&bw, rb)], j)?,
                        },
                        GateKind::And => WireKey::And {
                            k1,
                            k2,
                            k3: b.honest_shift(&r, &[(&a, ra), (&bw, rb)], j)?,
                        },
                    };
                    (
                        WireRandomness::Gate {
                            r: Symbolic::Known(r),
                            a: Symbolic::Known(a),
                            b: Symbolic::Known(bw),
                        },
                        key,
                    )
                }
                _ => unreachable!("sampled randomness matches the wire kind"),
            }
        } else {
            let eta = map.sample_scalar(rng, j)?;
            let r = Symbolic::Chain {
                len: j + 1,
                plus: eta.clone(),
            };
            match gate {
                None => {
                    // x*_w = 0, so h_w = g^{y + c_1}; with r = c_1 c_2 + η and
                    // z = -c_2 + ν the c_1 c_2 terms cancel in K_1.
                    let nu = map.sample_short(rng);
                    let y = &state.y[w - 1];
                    let known = map.scalar_add(&eta, &map.scalar_mul(&nu, y));
                    let k1 = map.mul(
                        &map.mul(&map.encode(&known, 1)?, &map.pow(&ch.g_c[1], &map.scalar_neg(y))?)?,
                        &map.pow(&ch.g_c[0], &nu)?,
                    )?;
                    let k2 = map.mul(&ch.g_c[1], &map.encode(&map.scalar_neg(&nu), 1)?)?;
                    (
                        WireRandomness::Input {
                            r,
                            z: Symbolic::Coeff {
                                index: 2,
                                negated: true,
                                plus: nu,
                            },
                        },
                        WireKey::Input { k1, k2 },
                    )
                }
                Some(g) => {
                    let (ra, rb) = (&records[g.a - 1], &records[g.b - 1]);
                    let psi = map.sample_short(rng);
                    let phi = map.sample_short(rng);
                    let shifted = |plus: &Scal<M>| Symbolic::Coeff {
                        index: j + 1,
                        negated: false,
                        plus: plus.clone(),
                    };
                    match g.kind {
                        GateKind::Or => {
                            // Both children are unsatisfied.
                            let (ea, eb) = (chain_plus(ra.randomness.r()), chain_plus(rb.randomness.r()));
                            let a = shifted(&psi);
                            let bs = shifted(&phi);
                            let key = WireKey::Or {
                                k1: b.at_one(&a)?,
                                k2: b.at_one(&bs)?,
                                k3: b.cancelled_shift(&eta, &psi, ea, j)?,
                                k4: b.cancelled_shift(&eta, &phi, eb, j)?,
                            };
                            (WireRandomness::Gate { r, a, b: bs }, key)
                        }
                        GateKind::And => {
                            // Cancel through an unsatisfied child; the other
                            // child's term is paid with a known coefficient.
                            let (a, bs, k3) = if !ra.satisfied {
                                let k3 = b.cancelled_shift(&eta, &psi, chain_plus(ra.randomness.r()), j)?;
                                let other = map.pow(&b.r_at(rb.randomness.r(), j)?, &map.scalar_neg(&phi))?;
                                (shifted(&psi), Symbolic::Known(phi), map.mul(&k3, &other)?)
                            } else {
                                let k3 = b.cancelled_shift(&eta, &phi, chain_plus(rb.randomness.r()), j)?;
                                let other = map.pow(&b.r_at(ra.randomness.r(), j)?, &map.scalar_neg(&psi))?;
                                (Symbolic::Known(psi), shifted(&phi), map.mul(&k3, &other)?)
                            };
                            let key = WireKey::And {
                                k1: b.at_one(&a)?,
                                k2: b.at_one(&bs)?,
                                k3,
                            };
                            (WireRandomness::Gate { r, a, b: bs }, key)
                        }
                    }
                }
            }
        };
        records.push(WireRecord { satisfied, randomness });
        wires.push(key);
    }

    // r_out = c_1⋯c_k + η_out, so α - r_out = ξ - η_out.
    let eta_out = chain_plus(records[f.output_wire() - 1].randomness.r());
    let header = map.encode(&map.scalar_sub(&state.xi, eta_out), k - 1)?;
    state.keys.push(KeyRecord {
        circuit: f.clone(),
        wires: records,
    });
    Ok(SecretKey {
        circuit: f.clone(),
        header,
        wires,
    })
}

/// `MSK = g_{k-1}^{ξ + c_1⋯c_k}`, the master secret the simulated parameters
/// implicitly use. Reads the witness: checker code only.
pub fn witness_master_secret<M: MultilinearMap>(
    map: &M,
    witness: &MddhWitness<Scal<M>>,
    state: &SimulatorState<Scal<M>>,
) -> Result<MasterSecret<Elem<M>>, MapError> {
    let alpha = witness_alpha(map, witness, state);
    Ok(MasterSecret {
        key: map.encode(&alpha, map.degree() - 1)?,
    })
}

/// `α = ξ + c_1⋯c_k`.
pub fn witness_alpha<M: MultilinearMap>(
    map: &M,
    witness: &MddhWitness<Scal<M>>,
    state: &SimulatorState<Scal<M>>,
) -> Scal<M> {
    Symbolic::Chain {
        len: map.degree(),
        plus: state.xi.clone(),
    }
    .resolve(map, &witness.c)
}

/// Key queries available to an adversary during the game.
pub trait KeyOracle<E> {
    fn keygen(&mut self, f: &Circuit) -> Result<SecretKey<E>, ReductionError>;
}

pub trait Adversary<M: MultilinearMap> {
    /// Selective security: the challenge input is fixed before anything else.
    fn commit(&mut self) -> Vec<bool>;

    /// Returns the guess `M'` for the challenge message. The map is public:
    /// anyone may run its operations.
    fn attack(
        &mut self,
        map: &M,
        pp: &PublicParams<Elem<M>>,
        ct: &Ciphertext<Elem<M>>,
        keys: &mut dyn KeyOracle<Elem<M>>,
    ) -> Result<bool, ReductionError>;

    /// Test-harness hook, called before `commit`. Genuine adversaries ignore
    /// it.
    fn reveal_witness(&mut self, _witness: &MddhWitness<Scal<M>>) {}
}

struct SimOracle<'a, M: MultilinearMap> {
    scheme: &'a KpAbe<M>,
    ch: &'a MddhChallenge<Elem<M>>,
    state: &'a mut SimulatorState<Scal<M>>,
    pp: &'a PublicParams<Elem<M>>,
    rng: &'a mut dyn RngCore,
    issued: Vec<SecretKey<Elem<M>>>,
}

impl<M: MultilinearMap> KeyOracle<Elem<M>> for SimOracle<'_, M> {
    fn keygen(&mut self, f: &Circuit) -> Result<SecretKey<Elem<M>>, ReductionError> {
        let sk = sim_keygen(self.scheme, self.ch, self.state, self.pp, f, &mut *self.rng)?;
        self.issued.push(sk.clone());
        Ok(sk)
    }
}

#[derive(Debug, Clone)]
pub struct GameTranscript<E, S> {
    pub x_star: Vec<bool>,
    pub pp: PublicParams<E>,
    pub challenge: Ciphertext<E>,
    pub keys: Vec<SecretKey<E>>,
    pub state: SimulatorState<S>,
    /// The adversary's `M'`.
    pub answer: bool,
    /// The simulator's verdict: "real" iff `M' = 1`.
    pub guess_real: bool,
}

/// Runs the simulator against `adversary` on a given instance.
pub fn run_game_on<M: MultilinearMap>(
    scheme: &KpAbe<M>,
    instance: &MddhInstance<Elem<M>, Scal<M>>,
    adversary: &mut dyn Adversary<M>,
    rng: &mut dyn RngCore,
) -> Result<GameTranscript<Elem<M>, Scal<M>>, ReductionError> {
    adversary.reveal_witness(&instance.witness);
    let x_star = adversary.commit();
    let ch = &instance.challenge;
    let (pp, mut state) = sim_setup(scheme, ch, &x_star, rng)?;
    let ct = sim_challenge(scheme, ch, &state)?;
    let (answer, keys) = {
        let mut oracle = SimOracle {
            scheme,
            ch,
            state: &mut state,
            pp: &pp,
            rng,
            issued: Vec::new(),
        };
        let answer = adversary.attack(scheme.map(), &pp, &ct, &mut oracle)?;
        (answer, oracle.issued)
    };
    Ok(GameTranscript {
        x_star,
        pp,
        challenge: ct,
        keys,
        state,
        answer,
        guess_real: answer,
    })
}

/// Samples a fresh instance (real or random) and runs the game on it.
pub fn run_game<M: MultilinearMap>(
    scheme: &KpAbe<M>,
    adversary: &mut dyn Adversary<M>,
    real: bool,
    rng: &mut dyn RngCore,
) -> Result<GameTranscript<Elem<M>, Scal<M>>, ReductionError> {
    let instance = gen_instance(scheme.map(), real, rng)?;
    run_game_on(scheme, &instance, adversary, rng)
}

/// Always answers `M' = 0`.
#[derive(Debug, Clone)]
pub struct NullAdversary {
    pub x_star: Vec<bool>,
}

impl<M: MultilinearMap> Adversary<M> for NullAdversary {
    fn commit(&mut self) -> Vec<bool> {
        self.x_star.clone()
    }

    fn attack(
        &mut self,
        _map: &M,
        _pp: &PublicParams<Elem<M>>,
        _ct: &Ciphertext<Elem<M>>,
        _keys: &mut dyn KeyOracle<Elem<M>>,
    ) -> Result<bool, ReductionError> {
        Ok(false)
    }
}

/// Sanity adversary that is handed `s` and answers `M' = [C_M = H^s]`.
/// Distinguishes real from random with advantage `1 - 1/p`. Each circuit in
/// `queries` is sent to the key oracle first.
#[derive(Debug, Clone)]
pub struct OmniscientAdversary<S> {
    pub x_star: Vec<bool>,
    pub queries: Vec<Circuit>,
    s: Option<S>,
}

impl<S> OmniscientAdversary<S> {
    pub fn new(x_star: Vec<bool>, queries: Vec<Circuit>) -> Self {
        OmniscientAdversary {
            x_star,
            queries,
            s: None,
        }
    }
}

impl<M: MultilinearMap> Adversary<M> for OmniscientAdversary<Scal<M>>
where
    Elem<M>: PartialEq,
{
    fn reveal_witness(&mut self, witness: &MddhWitness<Scal<M>>) {
        self.s = Some(witness.s.clone());
    }

    fn commit(&mut self) -> Vec<bool> {
        self.x_star.clone()
    }

    fn attack(
        &mut self,
        map: &M,
        pp: &PublicParams<Elem<M>>,
        ct: &Ciphertext<Elem<M>>,
        keys: &mut dyn KeyOracle<Elem<M>>,
    ) -> Result<bool, ReductionError> {
        for f in &self.queries {
            keys.keygen(f)?;
        }
        let s = self.s.as_ref().expect("witness revealed before the attack");
        Ok(map.pow(&pp.big_h, s)? == ct.c_m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layer_and_pad, random, Gate};
    use crate::mlmap::{GroupDescriptor, ReferenceMap};
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn scheme(p: u32, depth: usize) -> KpAbe<ReferenceMap> {
        let gd = GroupDescriptor::new(BigUint::from(p), depth + 1).unwrap();
        KpAbe::new(ReferenceMap::new(gd)).unwrap()
    }

    #[test]
    fn chain_products_multiply_the_exponents() {
        let s = scheme(101, 3);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let inst = gen_instance(s.map(), true, &mut rng).unwrap();
        let chain = chain_products(s.map(), &inst.challenge, 4).unwrap();
        for (j, pj) in chain.iter().enumerate() {
            let want = Symbolic::Chain {
                len: j + 1,
                plus: s.map().scalar(0),
            }
            .resolve(s.map(), &inst.witness.c);
            assert_eq!(pj, &s.map().encode(&want, j + 1).unwrap());
        }
    }

    #[test]
    fn satisfied_queries_abort() {
        let s = scheme(101, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let inst = gen_instance(s.map(), true, &mut rng).unwrap();
        let (pp, mut state) = sim_setup(&s, &inst.challenge, &[true, false], &mut rng).unwrap();
        let f = Circuit::new(2, vec![Gate::or(1, 2)]);
        assert_eq!(
            sim_keygen(&s, &inst.challenge, &mut state, &pp, &f, &mut rng),
            Err(ReductionError::Satisfied)
        );
        assert!(state.keys.is_empty());
    }

    #[test]
    fn simulated_keys_decrypt_like_real_ones_for_other_inputs() {
        // A simulated key for f is a genuine key: it decrypts honest
        // encryptions under the simulated parameters for any x with f(x) = 1.
        let s = scheme(1_000_003, 3);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..30 {
            let inst = gen_instance(s.map(), true, &mut rng).unwrap();
            let f = random::layered(&mut rng, 4, 3, 10);
            let Some(x_star) = random::input_with_output(&mut rng, &f, false) else {
                continue;
            };
            let Some(x) = random::input_with_output(&mut rng, &f, true) else {
                continue;
            };
            let (pp, mut state) = sim_setup(&s, &inst.challenge, &x_star, &mut rng).unwrap();
            let sk = sim_keygen(&s, &inst.challenge, &mut state, &pp, &f, &mut rng).unwrap();
            let ct = s.encrypt(&pp, &x, true, &mut rng).unwrap();
            assert!(s.decrypt(&sk, &ct).unwrap());
        }
    }

    #[test]
    fn games_with_stock_adversaries() {
        let s = scheme(1_000_003, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let f = layer_and_pad(&Circuit::new(2, vec![Gate::and(1, 2)]), 2).unwrap();
        for real in [true, false] {
            let mut adv = OmniscientAdversary::new(vec![true, false], vec![f.clone()]);
            let t = run_game(&s, &mut adv, real, &mut rng).unwrap();
            assert_eq!(t.guess_real, real);
            assert_eq!(t.keys.len(), 1);
            let t = run_game(
                &s,
                &mut NullAdversary {
                    x_star: vec![true, false],
                },
                real,
                &mut rng,
            )
            .unwrap();
            assert!(!t.guess_real);
        }
        let or = Circuit::new(2, vec![Gate::or(1, 2)]);
        let mut adv = OmniscientAdversary::new(vec![true, false], vec![or]);
        assert_eq!(
            run_game(&s, &mut adv, true, &mut rng).unwrap_err(),
            ReductionError::Satisfied
        );
    }

    #[cfg(feature = "oracle")]
    #[test]
    fn audit_accepts_simulated_artifacts() {
        let s = scheme(101, 3);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..40 {
            let real = rand::Rng::gen_bool(&mut rng, 0.5);
            let inst = gen_instance(s.map(), real, &mut rng).unwrap();
            let f = random::layered(&mut rng, 3, 3, 8);
            let Some(x_star) = random::input_with_output(&mut rng, &f, false) else {
                continue;
            };
            let (pp, mut state) = sim_setup(&s, &inst.challenge, &x_star, &mut rng).unwrap();
            audit::check_setup(s.map(), &inst, &state, &pp).unwrap();
            let ct = sim_challenge(&s, &inst.challenge, &state).unwrap();
            audit::check_challenge(&s, &inst, &state, &pp, &ct).unwrap();
            let sk = sim_keygen(&s, &inst.challenge, &mut state, &pp, &f, &mut rng).unwrap();
            audit::check_key(&s, &inst, &state, &pp, 0, &sk).unwrap();
        }
    }

    #[test]
    fn chain_offsets_are_bijective_at_a_toy_prime() {
        let s = scheme(101, 2);
        let m = s.map();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let inst = gen_instance(m, true, &mut rng).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for eta in 0..101u64 {
            let r = Symbolic::Chain {
                len: 2,
                plus: m.scalar(eta),
            }
            .resolve(m, &inst.witness.c);
            seen.insert(r.value().clone());
        }
        assert_eq!(seen.len(), 101);
    }
}
