//! Real special functions: gamma and beta, Gauss ₂F₁, complete elliptic
//! integrals, the Grötzsch modulus μ, Jacobi theta and elliptic sine.
//!
//! Every function here is pure and allocation-light; all can be called from
//! any number of threads.

mod elliptic;
mod gamma;
mod hyp2f1;
mod jacobi;

pub use elliptic::{agm, complement, ell_k, mu, mu_inv, EllipticModulus};
pub use gamma::{beta_fn, gamma_fn, rgamma};
pub use hyp2f1::{hyp2f1, hyp2f1_complement};
pub use jacobi::{asn, sn_imag, sn_imag_with_complement, sncndn, theta23, theta4, ThetaPair};
