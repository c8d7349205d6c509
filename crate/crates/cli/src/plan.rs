//! Parameter ranges of the full acceptance run.

use std::ops::RangeInclusive;

use conflap_core::numcheck::ShadowPlan;
use conflap_core::Error;

/// Ranges for every exact verifier. `all` and `numcheck` share one plan so
/// that the numeric shadow covers exactly the exact passes.
#[derive(Clone, Debug, PartialEq)]
pub struct SuitePlan {
    pub rn: Vec<(usize, usize)>,
    pub comm_n: Vec<usize>,
    pub w_range: RangeInclusive<i32>,
    pub comm_k_max: usize,
    pub covariance: Vec<(usize, usize)>,
    pub conformality_n: Vec<usize>,
    pub yamabe_n: Vec<usize>,
    pub yamabe_degree: u32,
    pub main: Vec<(usize, usize)>,
    pub spectrum: Vec<(usize, usize)>,
    pub l_max: usize,
}

pub const RN_K_MAX: usize = 4;
pub const COMM_K_MAX: usize = 5;
pub const COMM_W_RANGE: RangeInclusive<i32> = -3..=3;
pub const COVARIANCE_K_MAX: usize = 2;
pub const YAMABE_DEGREE: u32 = 3;
pub const MAIN_CASES: [(usize, usize); 7] = [(2, 1), (2, 2), (2, 3), (4, 1), (4, 2), (3, 1), (3, 2)];
pub const SPECTRUM_K_MAX: usize = 2;
pub const SPECTRUM_L_MAX: usize = 4;

impl SuitePlan {
    /// The acceptance ranges restricted to `n <= n_max`. `k_max` bounds the
    /// orders of the covariance, sphere and spectrum families; the operator
    /// identities on flat space are cheap and always run to their full order.
    pub fn acceptance(n_max: usize, k_max: usize) -> Result<Self, Error> {
        if n_max < 1 {
            return Err(Error::InvalidDimension(n_max));
        }
        if k_max < 1 {
            return Err(Error::InvalidOrder(k_max));
        }
        let dims = |lo: usize, hi: usize| (lo..=hi.min(n_max)).collect::<Vec<_>>();
        let pairs = |ns: Vec<usize>, kmax: usize| {
            ns.into_iter()
                .flat_map(|n| (1..=kmax.min(k_max)).map(move |k| (n, k)))
                .collect::<Vec<_>>()
        };
        Ok(SuitePlan {
            rn: dims(1, 4).into_iter().flat_map(|n| (1..=RN_K_MAX).map(move |k| (n, k))).collect(),
            comm_n: dims(1, 4),
            w_range: COMM_W_RANGE,
            comm_k_max: COMM_K_MAX,
            covariance: pairs(dims(2, 4), COVARIANCE_K_MAX),
            conformality_n: dims(1, 4),
            yamabe_n: dims(2, 4),
            yamabe_degree: YAMABE_DEGREE,
            main: MAIN_CASES.iter().copied().filter(|&(n, k)| n <= n_max && k <= k_max).collect(),
            spectrum: pairs(dims(2, 4), SPECTRUM_K_MAX),
            l_max: SPECTRUM_L_MAX,
        })
    }
}

impl From<&SuitePlan> for ShadowPlan {
    fn from(p: &SuitePlan) -> Self {
        ShadowPlan {
            rn: p.rn.clone(),
            comm_n: p.comm_n.clone(),
            w_range: p.w_range.clone(),
            comm_k_max: p.comm_k_max,
            covariance: p.covariance.clone(),
            conformality_n: p.conformality_n.clone(),
            yamabe_n: p.yamabe_n.clone(),
            yamabe_degree: p.yamabe_degree,
            main: p.main.clone(),
            spectrum: p.spectrum.clone(),
            l_max: p.l_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_covers_every_range() {
        let p = SuitePlan::acceptance(4, 3).unwrap();
        assert_eq!(p.rn.len(), 16);
        assert_eq!(p.main.len(), 7);
        assert_eq!(p.covariance, vec![(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2)]);
        assert_eq!(p.spectrum.len(), 6);
    }

    #[test]
    fn clamped_plan() {
        let p = SuitePlan::acceptance(2, 1).unwrap();
        assert_eq!(p.main, vec![(2, 1)]);
        assert_eq!(p.covariance, vec![(2, 1)]);
        assert_eq!(p.comm_n, vec![1, 2]);
        assert!(SuitePlan::acceptance(0, 1).is_err());
    }
}
