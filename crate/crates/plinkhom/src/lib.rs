//! Link homology over odd prime fields for links presented as braid
//! closures: the H_q-equivariant triply graded homology of a braid, its
//! p-extended doubly graded version, and the finite-dimensional singly
//! graded sl2 homology at a prime root of unity, cross-checked against
//! skein-theoretic oracles (Hecke trace and Kauffman bracket).

pub mod error;
pub mod gflin;
pub mod hochschild;
pub mod modmatch;
pub mod pcx;
pub mod rouquier;
pub mod soergel;
pub mod poly;

pub use error::Error;
