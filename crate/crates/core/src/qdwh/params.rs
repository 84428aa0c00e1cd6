use serde::Serialize;

use crate::{Error, Result};

/// Dynamic weights `(a, b, c)` of one QDWH step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Weights for a current lower bound `l` on the smallest singular value.
///
/// `a = h(l)`, `b = (a - 1)^2 / 4`, `c = a + b - 1`.
pub fn qdwh_params(l: f64) -> Result<Weights> {
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::Domain(format!("lower bound l = {l} must lie in (0, 1]")));
    }
    let l2 = l * l;
    let gamma = (4.0 * (1.0 - l2) / (l2 * l2)).cbrt();
    let s = (1.0 + gamma).sqrt();
    let a = s + 0.5 * (8.0 - 4.0 * gamma + 8.0 * (2.0 - l2) / (l2 * s)).sqrt();
    let b = (a - 1.0) * (a - 1.0) / 4.0;
    Ok(Weights { a, b, c: a + b - 1.0 })
}

/// Next lower bound `l (a + b l^2) / (1 + c l^2)`.
pub fn l_update(l: f64, w: &Weights) -> f64 {
    let l2 = l * l;
    l * (w.a + w.b * l2) / (1.0 + w.c * l2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point() {
        let w = qdwh_params(1.0).unwrap();
        assert!((w.a - 3.0).abs() < 1e-14 && (w.b - 1.0).abs() < 1e-14 && (w.c - 3.0).abs() < 1e-14);
        assert_eq!(l_update(1.0, &Weights { a: 3.0, b: 1.0, c: 3.0 }), 1.0);
    }

    #[test]
    fn half() {
        // 30-digit evaluation of the same closed form
        let w = qdwh_params(0.5).unwrap();
        assert!((w.a - 4.3593398999168).abs() < 1e-12);
        assert!((w.b - 2.8212911407933).abs() < 1e-12);
        assert!((w.c - 6.1806310407101).abs() < 1e-12);
        let next = l_update(0.5, &w);
        assert!((next - 0.99496046263982).abs() < 1e-12);
        assert!(next > 0.5 && next <= 1.0);
    }

    #[test]
    fn domain() {
        assert!(qdwh_params(0.0).is_err());
        assert!(qdwh_params(-0.3).is_err());
        assert!(qdwh_params(1.0 + 1e-9).is_err());
        assert!(qdwh_params(f64::NAN).is_err());
    }

    #[test]
    fn weights_shrink_toward_halley() {
        let a = |l| qdwh_params(l).unwrap().a;
        assert!(a(0.1) > a(0.5) && a(0.5) > a(1.0));
    }

    #[test]
    fn cubic_convergence() {
        for l0 in [1e-15, 1e-8, 1e-3, 0.2] {
            let mut l = l0;
            let mut prev_err = 1.0 - l;
            let mut steps = 0;
            while 1.0 - l > 1e-15 {
                let w = qdwh_params(l).unwrap();
                let next = l_update(l, &w).min(1.0);
                assert!(next > l && next <= 1.0);
                let err = 1.0 - next;
                if prev_err < 0.1 && err > 0.0 {
                    assert!(err <= 2.0 * prev_err.powi(3), "{err} vs {prev_err}");
                }
                prev_err = err;
                l = next;
                steps += 1;
            }
            assert!(steps <= 6, "l0 = {l0}: {steps} steps");
        }
    }
}
