//! Complete elliptic integral of the first kind and Jacobi elliptic
//! functions, evaluated in double-double arithmetic.
//!
//! Everything is parametrized by the complementary modulus `k' = sqrt(1 - k^2)`
//! so that moduli close to one (large ranges `R`) keep full accuracy.

use super::dd::{Dd, PI};
use crate::{Error, Result};

fn agm(a: Dd, b: Dd) -> Dd {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        let an = (a + b) * 0.5;
        let bn = (a * b).sqrt();
        let done = (a - b).abs().hi <= 1e-33 * a.hi;
        a = an;
        b = bn;
        if done {
            break;
        }
    }
    (a + b) * 0.5
}

/// `K` for the modulus with complementary modulus `kp` (`0 < kp <= 1`).
pub(crate) fn k_from_complement(kp: Dd) -> Dd {
    PI / (agm(Dd::ONE, kp) * 2.0)
}

fn complement(kappa: f64) -> Dd {
    // 1 - k^2 = (1 - k)(1 + k), both factors exact in double-double
    ((Dd::ONE - kappa) * (Dd::ONE + kappa)).sqrt()
}

fn check_modulus(kappa: f64) -> Result<()> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Domain(format!("modulus {kappa} must lie in [0, 1)")));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, via the arithmetic-geometric mean.
pub fn elliptic_k(kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    Ok(k_from_complement(complement(kappa)).to_f64())
}

/// `(sn, cn, dn)` at `u` by descending Landen transformations.
pub(crate) fn sn_cn_dn(u: Dd, kp: Dd) -> (Dd, Dd, Dd) {
    let mut moduli = Vec::new();
    let mut kp = kp;
    let mut k = ((Dd::ONE - kp) * (Dd::ONE + kp)).sqrt();
    while k.hi > 1e-18 {
        let k1 = (Dd::ONE - kp) / (Dd::ONE + kp);
        let kp1 = kp.sqrt() * 2.0 / (Dd::ONE + kp);
        moduli.push(k1);
        k = k1;
        kp = kp1;
    }
    let mut w = u;
    for &k1 in &moduli {
        w = w / (Dd::ONE + k1);
    }
    // the remaining modulus is below 1e-18, so sn = sin to working precision
    let (mut s, mut c) = w.sin_cos();
    let mut d = Dd::ONE;
    for &k1 in moduli.iter().rev() {
        let ks2 = k1 * s.sqr();
        let denom = Dd::ONE + ks2;
        let sn = (Dd::ONE + k1) * s / denom;
        let cn = c * d / denom;
        let dn = (Dd::ONE - ks2) / denom;
        s = sn;
        c = cn;
        d = dn;
    }
    (s, c, d)
}

/// Jacobi elliptic function `sn(u; kappa)`.
pub fn jacobi_sn(u: f64, kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    Ok(sn_cn_dn(Dd::new(u), complement(kappa)).0.to_f64())
}

/// Jacobi elliptic functions `(sn, cn, dn)(u; kappa)`.
pub fn jacobi_sn_cn_dn(u: f64, kappa: f64) -> Result<(f64, f64, f64)> {
    check_modulus(kappa)?;
    let (s, c, d) = sn_cn_dn(Dd::new(u), complement(kappa));
    Ok((s.to_f64(), c.to_f64(), d.to_f64()))
}
