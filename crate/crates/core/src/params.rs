use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Random-cluster parameters (p, q).
///
/// `p_hat = p / (q(1-p) + p)` is the cut-edge acceptance probability of the
/// Glauber update and the Bernoulli percolation parameter dominated by the
/// model. For q = 1 it equals p; for q > 1 it is strictly smaller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RCParams {
    pub p: f64,
    pub q: f64,
}

impl RCParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) || p <= 0.0 {
            return Err(Error::validation(format!("p must lie in (0,1), got {p}")));
        }
        if !(q > 0.0) {
            return Err(Error::validation(format!("q must be positive, got {q}")));
        }
        Ok(RCParams { p, q })
    }

    #[inline]
    pub fn p_hat(&self) -> f64 {
        self.p / (self.q * (1.0 - self.p) + self.p)
    }

    /// True when the monotone-coupling machinery applies.
    pub fn is_monotone(&self) -> bool {
        self.q >= 1.0
    }

    /// The threshold p_s(q, Delta) = q / (Delta + q - 2); equivalently the p at
    /// which p_hat crosses 1/(Delta - 1).
    pub fn p_s(q: f64, delta: u32) -> f64 {
        q / (delta as f64 + q - 2.0)
    }

    /// Whether this p lies above p_s for the given degree.
    pub fn above_p_s(&self, delta: u32) -> bool {
        self.p > Self::p_s(self.q, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_hat_values() {
        // q = 1 collapses to independent percolation.
        let r = RCParams::new(0.3, 1.0).unwrap();
        assert!((r.p_hat() - 0.3).abs() < 1e-15);
        // Single-edge marginal example: p = 1/2, q = 2 gives p_hat = 1/3.
        let r = RCParams::new(0.5, 2.0).unwrap();
        assert!((r.p_hat() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn p_s_closed_form() {
        assert!((RCParams::p_s(2.0, 3) - 2.0 / 3.0).abs() < 1e-15);
        assert!((RCParams::p_s(3.0, 3) - 0.75).abs() < 1e-15);
        assert!((RCParams::p_s(10.0, 5) - 10.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn p_above_ps_iff_phat_supercritical() {
        // p > p_s  <=>  p_hat > 1/(Delta-1), tested both directions on a grid.
        for delta in [3u32, 4, 5] {
            let d = (delta - 1) as f64;
            for &q in &[1.5, 2.0, 4.0, 10.0] {
                for i in 1..40 {
                    let p = i as f64 / 40.0;
                    let r = RCParams::new(p, q).unwrap();
                    let lhs = r.above_p_s(delta);
                    let rhs = r.p_hat() > 1.0 / d;
                    assert_eq!(lhs, rhs, "p={p}, q={q}, delta={delta}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(RCParams::new(0.0, 2.0).is_err());
        assert!(RCParams::new(1.0, 2.0).is_err());
        assert!(RCParams::new(0.5, 0.0).is_err());
    }
}
