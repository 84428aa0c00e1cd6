//! Zolotarev's best rational approximation of type `(2m-1, 2m)` to the sign
//! function on `[-R, -1] ∪ [1, R]`.

use super::dd::Dd;
use super::elliptic::{k_from_complement, sn_cn_dn};
use crate::{Error, Result};

/// Grid points per interval used to locate extrema before refinement.
pub const GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct ZolotarevSpec {
    pub m: usize,
    pub range: f64,
    /// Modulus `sqrt(1 - 1/R^2)`.
    pub kappa: f64,
    /// `c_1, ..., c_{2m}`; the last one sits at the quarter period and is infinite.
    pub coeffs: Vec<f64>,
    /// Scaling constant that balances the error on both ends of `[1, R]`.
    pub scale: f64,
    pub lower: f64,
    pub upper: f64,
    /// Natural logarithm of `upper`, finite even when `upper` underflows.
    pub log_upper: f64,
    coeffs_dd: Vec<Dd>,
    scale_dd: Dd,
}

/// `ln rho` for the range `R`, with `rho = exp(-pi K(mu') / (2 K(mu)))`.
fn log_rho(range: f64) -> Dd {
    let s = Dd::new(range).sqrt();
    let sp1 = s + 1.0;
    let t = (s - 1.0) / sp1;
    let mu = t.sqr();
    // 1 - t^4 = (1 - t)(1 + t)(1 + t^2) without cancellation
    let one_minus_mu2 = (Dd::new(2.0) / sp1) * (s * 2.0 / sp1) * (Dd::ONE + mu);
    let mu_c = one_minus_mu2.sqrt();
    // K(mu') / K(mu) in terms of the complementary moduli
    let ratio = k_from_complement(mu) / k_from_complement(mu_c);
    -(super::dd::PI * ratio) / 2.0
}

/// Evaluates `g(x) = x prod(x^2 + c_even) / prod(x^2 + c_odd)`.
fn unscaled(coeffs: &[Dd], m: usize, x: Dd) -> Dd {
    let x2 = x.sqr();
    let mut num = x;
    let mut den = Dd::ONE;
    for i in 1..=m {
        den = den * (x2 + coeffs[2 * i - 2]);
        if i < m {
            num = num * (x2 + coeffs[2 * i - 1]);
        }
    }
    num / den
}

fn golden_max<F: Fn(f64) -> Dd>(f: &F, mut a: f64, mut b: f64) -> Dd {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f1 > f2 { f1 } else { f2 };
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * b.abs() {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if f1 > best {
                best = f1;
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if f2 > best {
                best = f2;
            }
        }
    }
    best
}

/// Supremum of `f` over `[lo, hi]` (with `0 < lo < hi`): logarithmic grid,
/// then golden-section refinement of every interior grid maximum.
fn grid_sup<F: Fn(f64) -> Dd>(f: &F, lo: f64, hi: f64, points: usize) -> Dd {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..points)
        .map(|k| match k {
            0 => lo,
            k if k == points - 1 => hi,
            k => (llo + (lhi - llo) * k as f64 / (points - 1) as f64).exp(),
        })
        .collect();
    let vals: Vec<Dd> = xs.iter().map(|&x| f(x)).collect();
    let mut best = if vals[0] > vals[points - 1] { vals[0] } else { vals[points - 1] };
    for k in 1..points - 1 {
        if vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1] {
            let v = golden_max(f, xs[k - 1], xs[k + 1]);
            let v = if vals[k] > v { vals[k] } else { v };
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Builds the Zolotarev function of half-degree `m` for the range `R`.
pub fn zolotarev(m: usize, range: f64) -> Result<ZolotarevSpec> {
    if m == 0 {
        return Err(Error::Domain("half-degree m must be at least 1".into()));
    }
    if !(range > 1.0 && range.is_finite()) {
        return Err(Error::Domain(format!("range R = {range} must be finite and greater than 1")));
    }
    let kp = Dd::ONE / range;
    let k = k_from_complement(kp);
    let mut coeffs_dd = Vec::with_capacity(2 * m);
    for i in 1..2 * m {
        let (s, c, _) = sn_cn_dn(k * (i as f64) / (2 * m) as f64, kp);
        coeffs_dd.push((s / c).sqr());
    }
    coeffs_dd.push(Dd::new(f64::INFINITY));

    let g = |x: f64| unscaled(&coeffs_dd, m, Dd::new(x));
    let gmax = grid_sup(&g, 1.0, range, GRID_POINTS);
    let gmin = -grid_sup(&|x| -g(x), 1.0, range, GRID_POINTS);
    // equioscillation: 1 - C gmin = C gmax - 1
    let scale_dd = Dd::new(2.0) / (gmax + gmin);

    let log_rho_m = log_rho(range).to_f64() * m as f64;
    let rho_m = log_rho_m.exp();
    Ok(ZolotarevSpec {
        m,
        range,
        kappa: ((Dd::ONE - kp.sqr()).sqrt()).to_f64(),
        coeffs: coeffs_dd.iter().map(|c| c.to_f64()).collect(),
        scale: scale_dd.to_f64(),
        lower: 4.0 * rho_m / (rho_m + 1.0),
        upper: 4.0 * rho_m,
        log_upper: 4f64.ln() + log_rho_m,
        coeffs_dd,
        scale_dd,
    })
}

impl ZolotarevSpec {
    fn eval_dd(&self, x: f64) -> Dd {
        unscaled(&self.coeffs_dd, self.m, Dd::new(x)) * self.scale_dd
    }

    /// `s_m(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_dd(x).to_f64()
    }

    /// `max |sign(x) - s_m(x)|` over `[-R, -1] ∪ [1, R]`, measured on a grid
    /// of [`GRID_POINTS`] per interval with local refinement of the peaks.
    pub fn measured_sup_error(&self) -> f64 {
        let pos = grid_sup(&|x| (Dd::ONE - self.eval_dd(x)).abs(), 1.0, self.range, GRID_POINTS);
        let neg = grid_sup(&|x| (Dd::ONE + self.eval_dd(-x)).abs(), 1.0, self.range, GRID_POINTS);
        pos.to_f64().max(neg.to_f64())
    }
}

/// `4 exp(-pi^2 m / (4 log(4 / gap^(1/4) + 2)))`, an upper bound on the
/// Zolotarev error that depends on the gap only through a logarithm.
pub fn simplified_upper_bound(m: usize, gap: f64) -> f64 {
    4.0 * decay_factor(m, gap)
}

fn decay_factor(m: usize, gap: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    (-pi2 * m as f64 / (4.0 * (4.0 / gap.powf(0.25) + 2.0).ln())).exp()
}

/// Bound on singular value `2mb + 1` of any off-diagonal block of the
/// spectral projector of a `b`-banded matrix whose spectrum avoids
/// `(-gap, gap)` after scaling to norm one.
pub fn sv_decay_bound(m: usize, gap: f64) -> f64 {
    2.0 * decay_factor(m, gap)
}

/// Index (1-based) of the singular value controlled by [`sv_decay_bound`].
pub fn decay_index(m: usize, b: usize) -> usize {
    2 * m * b + 1
}
