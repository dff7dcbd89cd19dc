use std::path::{Path, PathBuf};

use circuit_abe::circuit::{self, layer_and_pad, parse_bits, Circuit, ParsedCircuit};
use circuit_abe::codec::{
    parse_ciphertext, parse_master_secret, parse_public_params, parse_secret_key, render_ciphertext,
    render_master_secret, render_public_params, render_secret_key,
};
use circuit_abe::kpabe::{KpAbe, SchemeError};
use circuit_abe::mlmap::{ElementCodec, GroupDescriptor, MultilinearMap, ReferenceMap};
use circuit_abe::sizebound::{BoundedMap, GrowthProfile};
use rand::RngCore;

use crate::store::{self, Backend, BackendOp, KeyStore};
use crate::Failure;

fn scheme<M: MultilinearMap>(map: M) -> Result<KpAbe<M>, Failure> {
    KpAbe::new(map).map_err(usage)
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub struct Setup {
    pub n: usize,
    pub depth: usize,
    pub bits: u32,
    pub size_bits: Option<u32>,
}

pub fn setup(store: &KeyStore, args: Setup, rng: &mut dyn RngCore) -> Result<String, Failure> {
    if args.n == 0 || args.depth == 0 {
        return Err(Failure::Usage("--n and --depth must be at least 1".into()));
    }
    if !(2..=4096).contains(&args.bits) {
        return Err(Failure::Usage("--bits must be between 2 and 4096".into()));
    }
    let group = GroupDescriptor::generate(args.bits, args.depth + 1, rng).map_err(usage)?;
    let backend = match args.size_bits {
        None => Backend::Plain(ReferenceMap::new(group)),
        Some(k) => Backend::Bounded(BoundedMap::new(group, GrowthProfile::standard(k)).map_err(usage)?),
    };
    let report = backend.is_bounded();
    let (pp, msk) = backend.run(report, SetupOp { n: args.n, rng })?;
    store.create()?;
    store::write(&store.public_params(), &pp)?;
    store::write(&store.master_secret(), &msk)?;
    Ok(format!(
        "wrote {} and {} (n={}, depth={}, k={})",
        store.public_params().display(),
        store.master_secret().display(),
        args.n,
        args.depth,
        args.depth + 1
    ))
}

struct SetupOp<'a> {
    n: usize,
    rng: &'a mut dyn RngCore,
}

impl BackendOp for SetupOp<'_> {
    type Output = (String, String);
    fn run<M: ElementCodec>(self, map: &M) -> Result<Self::Output, Failure> {
        let (pp, msk) = scheme(map)?.setup(self.n, self.rng).map_err(usage)?;
        Ok((render_public_params(map, &pp), render_master_secret(map, &msk)))
    }
}

/// Reads a monotone circuit, reporting positions as `file:line:column`.
pub fn read_monotone(path: &Path) -> Result<Circuit, Failure> {
    match read_circuit(path)? {
        ParsedCircuit::Monotone(c) => Ok(c),
        ParsedCircuit::Extended(_) => Err(Failure::Usage(format!(
            "{}: circuit uses NOT; convert it with `abe circuit demorgan` first",
            path.display()
        ))),
    }
}

pub fn read_circuit(path: &Path) -> Result<ParsedCircuit, Failure> {
    let text = store::read(path)?;
    circuit::parse(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

pub struct Keygen {
    pub circuit: PathBuf,
    pub pad: bool,
    pub label: String,
}

pub fn keygen(store: &KeyStore, args: Keygen, track: bool, rng: &mut dyn RngCore) -> Result<String, Failure> {
    let f = read_monotone(&args.circuit)?;
    let out = store.secret_key(&args.label)?;
    let (backend, pp_text) = store.open_backend()?;
    let (text, components) = backend.run(
        track,
        KeygenOp {
            store,
            pp_text: &pp_text,
            f,
            pad: args.pad,
            rng,
        },
    )?;
    store::write(&out, &text)?;
    Ok(format!("wrote {} ({components} key components)", out.display()))
}

struct KeygenOp<'a> {
    store: &'a KeyStore,
    pp_text: &'a str,
    f: Circuit,
    pad: bool,
    rng: &'a mut dyn RngCore,
}

impl BackendOp for KeygenOp<'_> {
    type Output = (String, usize);
    fn run<M: ElementCodec>(self, map: &M) -> Result<Self::Output, Failure> {
        let pp_path = self.store.public_params();
        let pp = parse_public_params(map, self.pp_text).map_err(|e| store::format_failure(&pp_path, e))?;
        let msk = store::load(&self.store.master_secret(), |t| parse_master_secret(map, t))?;
        let scheme = scheme(map)?;
        let f = if self.pad {
            layer_and_pad(&self.f, scheme.depth()).map_err(usage)?
        } else {
            self.f
        };
        let sk = scheme.keygen(&msk, &pp, &f, self.rng).map_err(|e| match e {
            SchemeError::Depth { .. } if !self.pad => Failure::Usage(format!("{e} (try --pad)")),
            e => usage(e),
        })?;
        Ok((render_secret_key(map, &sk), sk.component_count()))
    }
}

pub struct Encrypt {
    pub input: String,
    pub message: bool,
    pub label: String,
}

pub fn encrypt(store: &KeyStore, args: Encrypt, track: bool, rng: &mut dyn RngCore) -> Result<String, Failure> {
    let x = parse_bits(&args.input)
        .ok_or_else(|| Failure::Usage(format!("--input must be a string of 0s and 1s, got `{}`", args.input)))?;
    let out = store.ciphertext(&args.label)?;
    let (backend, pp_text) = store.open_backend()?;
    let text = backend.run(
        track,
        EncryptOp {
            store,
            pp_text: &pp_text,
            x,
            message: args.message,
            rng,
        },
    )?;
    store::write(&out, &text)?;
    Ok(format!("wrote {}", out.display()))
}

struct EncryptOp<'a> {
    store: &'a KeyStore,
    pp_text: &'a str,
    x: Vec<bool>,
    message: bool,
    rng: &'a mut dyn RngCore,
}

impl BackendOp for EncryptOp<'_> {
    type Output = String;
    fn run<M: ElementCodec>(self, map: &M) -> Result<String, Failure> {
        let pp_path = self.store.public_params();
        let pp = parse_public_params(map, self.pp_text).map_err(|e| store::format_failure(&pp_path, e))?;
        let ct = scheme(map)?
            .encrypt(&pp, &self.x, self.message, self.rng)
            .map_err(usage)?;
        Ok(render_ciphertext(map, &ct))
    }
}

pub struct Decrypt {
    pub key: String,
    pub ct: String,
}

pub fn decrypt(store: &KeyStore, args: Decrypt, track: bool) -> Result<bool, Failure> {
    let sk_path = store.secret_key(&args.key)?;
    let ct_path = store.ciphertext(&args.ct)?;
    let (backend, _) = store.open_backend()?;
    backend.run(track, DecryptOp { sk_path, ct_path })
}

struct DecryptOp {
    sk_path: PathBuf,
    ct_path: PathBuf,
}

impl BackendOp for DecryptOp {
    type Output = bool;
    fn run<M: ElementCodec>(self, map: &M) -> Result<bool, Failure> {
        let sk = store::load(&self.sk_path, |t| parse_secret_key(map, t))?;
        let ct = store::load(&self.ct_path, |t| parse_ciphertext(map, t))?;
        match scheme(map)?.decrypt(&sk, &ct) {
            Ok(m) => Ok(m),
            Err(SchemeError::NotSatisfied) => Err(Failure::NotSatisfied),
            Err(e) => Err(usage(e)),
        }
    }
}
