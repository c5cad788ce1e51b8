use minimax_lb::harness::verify::verify_instance;
use minimax_lb::minimax::{make_cc, make_csc, make_scsc};
use minimax_lb::minimization::{make_c, make_sc};
use proptest::prelude::*;

fn assert_all_pass(inst: &minimax_lb::instance::Instance, seed: u64) -> Result<(), TestCaseError> {
    for c in verify_instance(inst, seed) {
        prop_assert!(c.pass, "{} {}: {}", inst.kind, c.name, c.detail);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn minimax_instances_satisfy_their_invariants(
        n in 2usize..7,
        m in 3usize..9,
        kappa in 4.0f64..200.0,
        ratio in 0.2f64..1.0,
        rx in 0.2f64..5.0,
        ry in 0.2f64..5.0,
        seed in any::<u64>(),
    ) {
        let mu_x = 1.0;
        let mu_y = ratio;
        let l = kappa * mu_x;
        assert_all_pass(&make_scsc(l, mu_x, mu_y, rx, ry, n, m).unwrap(), seed)?;
        assert_all_pass(&make_csc(l, mu_y, rx, ry, n, m).unwrap(), seed)?;
        assert_all_pass(&make_cc(l, rx, ry, n, m).unwrap(), seed)?;
    }

    #[test]
    fn minimization_instances_satisfy_their_invariants(
        n in 2usize..7,
        m in 2usize..10,
        kappa in 2.0f64..500.0,
        r in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        assert_all_pass(&make_sc(kappa, 1.0, r, n, m).unwrap(), seed)?;
        assert_all_pass(&make_c(kappa, r, n, m).unwrap(), seed)?;
    }
}

#[test]
fn understated_smoothness_is_caught() {
    let mut inst = make_cc(3.0, 1.0, 1.0, 4, 6).unwrap();
    inst.regularity.l *= 0.5;
    let failed: Vec<String> = verify_instance(&inst, 3).into_iter().filter(|c| !c.pass).map(|c| c.name).collect();
    assert_eq!(failed, ["lipschitz"]);
}
