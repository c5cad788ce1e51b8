use minimax_lb::geo::trial_rng;
use minimax_lb::minimax::{make_hat_r, make_tilde_r};
use minimax_lb::minimization::make_r;
use minimax_lb::zero_chain::{check_jump, random_point_at_depth, ChainCase};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_stay_in_the_predicted_subspaces(
        n in 2usize..6,
        m in 4usize..16,
        which in 0usize..3,
        depth in 0.0f64..1.0,
        gamma in 0.01f64..0.4,
        seed in any::<u64>(),
    ) {
        let inst = match which {
            0 => make_tilde_r(m, 1.0, (0.5, 0.5), n).unwrap(),
            1 => make_hat_r(m, 1.0, (1.0, 0.5, 0.7), n).unwrap(),
            _ => make_r(m, 0.0, 1.0, (0.5, 0.0, 1.0), n).unwrap(),
        };
        let limit = if ChainCase::of(&inst).unwrap() == ChainCase::Hat { m - 1 } else { m };
        let k = ((depth * limit as f64) as usize).min(limit - 1);
        let mut rng = trial_rng(seed, 0);
        let (x, y) = random_point_at_depth(&inst, k, &mut rng).unwrap();
        let gamma = inst.prox_limit.map_or(gamma, |l| gamma.min(0.9 * l));
        for i in 0..n {
            let r = check_jump(&inst, &x, &y, i, Some(gamma)).unwrap();
            prop_assert!(r.pass, "component {i} at depth {k}: off-subspace {}", r.off_subspace);
        }
    }
}
