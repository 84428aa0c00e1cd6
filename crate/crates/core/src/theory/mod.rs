//! Zolotarev rational approximation and a priori bounds on the singular
//! values of off-diagonal blocks of spectral projectors.

mod dd;
mod decay;
mod elliptic;
mod zolotarev;

pub use decay::{verify_decay, DecayReport, DecayViolation, DECAY_SLACK};
pub use elliptic::{elliptic_k, jacobi_sn, jacobi_sn_cn_dn};
pub use zolotarev::{
    decay_index, simplified_upper_bound, sv_decay_bound, zolotarev, ZolotarevSpec, GRID_POINTS,
};
