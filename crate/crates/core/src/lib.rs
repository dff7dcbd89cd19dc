//! Key-policy attribute-based encryption for layered monotone circuits,
//! built on a leveled multilinear map.
//!
//! * [`mlmap`]: the multilinear-map interface and the exponent reference
//!   backend (insecure by construction).
//! * [`sizebound`]: a backend decorator that tracks graded-encoding size
//!   bounds.
//! * [`circuit`]: circuit IR, validation, evaluation, De Morgan
//!   monotonization, layering, and the `.circ` text format.
//! * [`kpabe`]: Setup, Encrypt, KeyGen and Decrypt.
//! * [`reduction`]: the selective-security reduction as an executable
//!   simulator.
//! * [`codec`]: text serialization of parameters, keys and ciphertexts.

pub mod circuit;
pub mod codec;
pub mod kpabe;
pub mod mlmap;
pub mod reduction;
pub mod sizebound;
