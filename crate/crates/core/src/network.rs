//! Repeater-chain fidelity algebra: the end-to-end fidelity of an N-link
//! entanglement-swapping chain and the Bell-violation threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Remote entanglement fidelity at or above this value suffices to violate a
/// Bell inequality (inclusive threshold).
pub const BELL_THRESHOLD: f64 = 0.78;

/// An N-link repeater chain with uniform link and Bell-state-measurement
/// fidelities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RepeaterChain {
    pub n_links: u32,
    pub link_fidelity: f64,
    pub bsm_fidelity: f64,
}

impl RepeaterChain {
    pub fn new(n_links: u32, link_fidelity: f64, bsm_fidelity: f64) -> Result<Self> {
        if n_links < 1 {
            return Err(Error::domain("a repeater chain needs at least one link"));
        }
        for (name, f) in [("link", link_fidelity), ("bsm", bsm_fidelity)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::domain(format!("{name} fidelity must be in [0, 1]")));
            }
        }
        Ok(RepeaterChain {
            n_links,
            link_fidelity,
            bsm_fidelity,
        })
    }
}

/// Final fidelity F = F_link^N · F_BSM^(N−1).
pub fn chain_fidelity(chain: &RepeaterChain) -> f64 {
    chain.link_fidelity.powi(chain.n_links as i32)
        * chain.bsm_fidelity.powi(chain.n_links as i32 - 1)
}

/// True iff `fidelity` reaches the Bell-violation threshold (inclusive).
pub fn bell_threshold_check(fidelity: f64) -> bool {
    fidelity >= BELL_THRESHOLD
}

/// Smallest BSM fidelity that still reaches `f_target` over `n_links` links,
/// or `None` when even a perfect BSM cannot.
pub fn required_bsm_fidelity(n_links: u32, f_link: f64, f_target: f64) -> Result<Option<f64>> {
    if n_links < 2 {
        return Err(Error::domain(
            "fewer than two links perform no Bell-state measurement",
        ));
    }
    for (name, f) in [("link", f_link), ("target", f_target)] {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::domain(format!("{name} fidelity must be in (0, 1]")));
        }
    }
    let required =
        (f_target / f_link.powi(n_links as i32)).powf(1.0 / (n_links as f64 - 1.0));
    Ok((required <= 1.0).then_some(required))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_two_link_case() {
        let chain = RepeaterChain::new(2, 0.95, 0.87).unwrap();
        let f = chain_fidelity(&chain);
        assert!((f - 0.785175).abs() < 1e-12, "got {f}");
        assert!(bell_threshold_check(f));
    }

    #[test]
    fn single_link_ignores_bsm() {
        let chain = RepeaterChain::new(1, 0.91, 0.2).unwrap();
        assert!((chain_fidelity(&chain) - 0.91).abs() < 1e-15);
    }

    #[test]
    fn perfect_chain_is_perfect() {
        let chain = RepeaterChain::new(5, 1.0, 1.0).unwrap();
        assert_eq!(chain_fidelity(&chain), 1.0);
    }

    #[test]
    fn bell_threshold_is_inclusive() {
        assert!(bell_threshold_check(0.785175));
        assert!(bell_threshold_check(0.78));
        assert!(!bell_threshold_check(0.5));
    }

    #[test]
    fn required_bsm_cases() {
        let r = required_bsm_fidelity(2, 0.95, 0.78).unwrap().unwrap();
        assert!((r - 0.78 / 0.9025).abs() < 1e-12);
        assert!((r - 0.8643).abs() < 1e-4);
        assert!(required_bsm_fidelity(2, 0.7, 0.78).unwrap().is_none()); // 0.78/0.49 > 1
        let r = required_bsm_fidelity(2, 1.0, 0.6).unwrap().unwrap();
        assert!((r - 0.6).abs() < 1e-15);
        assert!(required_bsm_fidelity(1, 0.9, 0.8).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_recovers_target(
            n in 2u32..8, f_link in 0.5f64..1.0, f_target in 0.1f64..0.95
        ) {
            if let Some(bsm) = required_bsm_fidelity(n, f_link, f_target).unwrap() {
                let chain = RepeaterChain::new(n, f_link, bsm).unwrap();
                prop_assert!((chain_fidelity(&chain) - f_target).abs() < 1e-12);
            }
        }

        #[test]
        fn monotone_in_fidelities_and_links(
            n in 1u32..8, f_link in 0.1f64..0.99, f_bsm in 0.1f64..0.99
        ) {
            let base = chain_fidelity(&RepeaterChain::new(n, f_link, f_bsm).unwrap());
            let better_link = chain_fidelity(&RepeaterChain::new(n, f_link + 0.01, f_bsm).unwrap());
            let better_bsm = chain_fidelity(&RepeaterChain::new(n, f_link, f_bsm + 0.01).unwrap());
            let longer = chain_fidelity(&RepeaterChain::new(n + 1, f_link, f_bsm).unwrap());
            prop_assert!(better_link >= base);
            prop_assert!(better_bsm >= base);
            prop_assert!(longer <= base);
            // the chain can never beat one bare link
            prop_assert!(base <= f_link + 1e-15);
        }
    }
}
