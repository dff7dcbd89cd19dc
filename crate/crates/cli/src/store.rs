use std::fs;
use std::path::{Path, PathBuf};

use circuit_abe::codec::{read_header, DocHeader, FormatError};
use circuit_abe::mlmap::{ElementCodec, MultilinearMap, ReferenceMap};
use circuit_abe::sizebound::BoundedMap;

use crate::Failure;

/// A directory holding `pp.txt`, `msk.txt`, `sk-<label>.txt` and
/// `ct-<label>.txt`.
pub struct KeyStore {
    dir: PathBuf,
}

impl KeyStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        KeyStore { dir: dir.into() }
    }

    pub fn public_params(&self) -> PathBuf {
        self.dir.join("pp.txt")
    }

    pub fn master_secret(&self) -> PathBuf {
        self.dir.join("msk.txt")
    }

    pub fn secret_key(&self, label: &str) -> Result<PathBuf, Failure> {
        Ok(self.dir.join(format!("sk-{}.txt", check_label(label)?)))
    }

    pub fn ciphertext(&self, label: &str) -> Result<PathBuf, Failure> {
        Ok(self.dir.join(format!("ct-{}.txt", check_label(label)?)))
    }

    pub fn create(&self) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::Io(format!("{}: {e}", self.dir.display())))
    }

    /// Reads `pp.txt` and builds the backend its header names.
    pub fn open_backend(&self) -> Result<(Backend, String), Failure> {
        let path = self.public_params();
        let text = read(&path)?;
        let header = read_header(&text).map_err(|e| format_failure(&path, e))?;
        Ok((Backend::from_header(header), text))
    }
}

fn check_label(label: &str) -> Result<&str, Failure> {
    let ok = !label.is_empty()
        && label
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    if ok {
        Ok(label)
    } else {
        Err(Failure::Usage(format!(
            "invalid label `{label}`: use letters, digits, `-` and `_`"
        )))
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn format_failure(path: &Path, e: FormatError) -> Failure {
    Failure::Usage(format!("{}:{}: {}", path.display(), e.line, e.message))
}

/// Parses `path`'s contents with one of the codec parsers.
pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, FormatError>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| format_failure(path, e))
}

pub enum Backend {
    Plain(ReferenceMap),
    Bounded(BoundedMap),
}

impl Backend {
    fn from_header(header: DocHeader) -> Self {
        match header.bounds {
            None => Backend::Plain(ReferenceMap::new(header.group)),
            Some(profile) => {
                Backend::Bounded(BoundedMap::new(header.group, profile).expect("profiles that parse are valid"))
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Backend::Bounded(_))
    }

    /// Runs `op` against whichever map this is, then (if asked and
    /// available) prints the per-level budget usage to stderr.
    pub fn run<T>(&self, report: bool, op: impl BackendOp<Output = T>) -> Result<T, Failure> {
        if report && !self.is_bounded() {
            return Err(Failure::Usage(
                "bound tracking needs parameters created with `setup --track-bounds`".into(),
            ));
        }
        match self {
            Backend::Plain(m) => op.run(m),
            Backend::Bounded(m) => {
                let out = op.run(m);
                if report {
                    eprint!("{}", bounds_report(m));
                }
                out
            }
        }
    }
}

/// An operation generic over the backend.
pub trait BackendOp {
    type Output;
    fn run<M: ElementCodec>(self, map: &M) -> Result<Self::Output, Failure>;
}

pub fn bounds_report(map: &BoundedMap) -> String {
    let mut out = format!(
        "size bounds (k={}, degree {}):\n",
        map.profile().size_bits(),
        map.degree()
    );
    for u in map.usage() {
        out.push_str(&format!(
            "  level {}: max log2 bound {} of budget {} ({:.1}%)\n",
            u.level,
            u.max_log_bound,
            u.budget,
            100.0 * u.utilization()
        ));
    }
    out
}
