use bmgame_core::dynamics::{
    run_dynamics, weighted_utilities, CycleCheck, Policy, ScanOrder, Termination, WeightedInstance,
};
use bmgame_core::model::{coverage, is_nash_equilibrium, potential_value};
use bmgame_core::oracle::{brute_phi_max, enumerate_all_ne, max_k_coverage, optimal_coverage, report, DEFAULT_BUDGET};
use bmgame_core::reductions::{reduce_to_optimal_ne_instance, reduce_to_optimum_instance, CoverageProblem};
use bmgame_core::solver::{compute_equilibrium, stable_from_location_set};
use bmgame_core::{Instance, Rational, StrategyProfile};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=4, 1usize..=3, 1usize..=5).prop_flat_map(|(l, m, b)| {
        proptest::collection::vec(1usize..(1 << l), b).prop_map(move |masks| {
            let ranges = masks.iter().map(|mask| (0..l).filter(|i| mask >> i & 1 == 1).collect()).collect();
            Instance::with_default_names(l, m, ranges).unwrap()
        })
    })
}

fn coverage_problem() -> impl Strategy<Value = CoverageProblem> {
    proptest::collection::vec(proptest::collection::vec(0usize..6, 1..4), 1..=4).prop_flat_map(|sets| {
        let n = sets.len();
        (Just(sets), 1..=n).prop_map(|(sets, k)| CoverageProblem::new(sets, k).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn solver_output_is_among_oracle_equilibria(inst in instance()) {
        let solved = compute_equilibrium(&inst);
        let all = enumerate_all_ne(&inst, DEFAULT_BUDGET).unwrap();
        prop_assert!(all.contains(&solved.profile.canonical()));
        prop_assert!(all.iter().all(|p| is_nash_equilibrium(&inst, p)));
    }

    #[test]
    fn stability_bound_holds(inst in instance()) {
        let r = report(&inst, DEFAULT_BUDGET).unwrap();
        let q = inst.num_locations().min(inst.num_millers()) as i64;
        let bound = Rational::one() + Rational::new(q - 1, inst.num_millers() as i64);
        let pos = r.price_of_stability.finite().cloned().expect("some equilibrium covers a baker");
        prop_assert!(pos <= bound);
    }

    #[test]
    fn flow_potential_matches_brute_force(inst in instance(), seed in any::<u64>()) {
        let millers: Vec<usize> = (0..inst.num_millers())
            .map(|m| (seed >> (4 * m)) as usize % inst.num_locations())
            .collect();
        let (bakers, phi) = bmgame_core::flow::maximize_potential(&inst, &millers).unwrap();
        let (brute, _) = brute_phi_max(&inst, &millers, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(&phi, &brute);
        prop_assert_eq!(potential_value(&inst, &millers, &bakers), brute);
    }

    #[test]
    fn optimal_location_set_yields_equilibrium(inst in instance()) {
        let opt = optimal_coverage(&inst, DEFAULT_BUDGET).unwrap();
        let mut set = opt.profile.millers.clone();
        set.sort_unstable();
        set.dedup();
        let restricted = stable_from_location_set(&inst, &set).unwrap();
        prop_assert!(restricted.is_nash_equilibrium);
        let q = inst.num_locations().min(inst.num_millers());
        let m = inst.num_millers();
        // coverage · (1 + (q-1)/M) ≥ OPT, cross-multiplied.
        prop_assert!(restricted.coverage * (m + q - 1) >= opt.coverage * m);
    }

    #[test]
    fn reductions_preserve_coverage(problem in coverage_problem()) {
        let (best, _) = max_k_coverage(&problem);
        let (inst, items) = reduce_to_optimum_instance(&problem).unwrap();
        prop_assert_eq!(items, problem.ground_set());
        prop_assert_eq!(optimal_coverage(&inst, DEFAULT_BUDGET).unwrap().coverage, best);
        let red = reduce_to_optimal_ne_instance(&problem).unwrap();
        let best_ne = report(&red.instance, u128::MAX).unwrap().best_equilibrium.coverage;
        prop_assert_eq!(best_ne, best + problem.k() * red.q);
    }

    #[test]
    fn unweighted_dynamics_moves_improve(inst in instance(), first_millers in any::<bool>()) {
        let w = WeightedInstance::unweighted(inst.clone());
        let start = StrategyProfile::new((0..inst.num_bakers()).map(|b| inst.range(b)[0]).collect(), vec![0; inst.num_millers()]);
        let order = if first_millers { ScanOrder::MillersFirst } else { ScanOrder::BakersFirst };
        let trace = run_dynamics(&w, &start, &Policy::FirstImproving(order), 500, CycleCheck::Exact).unwrap();
        for mv in &trace.moves {
            prop_assert!(mv.after > mv.before);
        }
        if trace.status == Termination::Converged {
            prop_assert!(is_nash_equilibrium(&inst, &trace.terminal));
        }
        let u = weighted_utilities(&w, &trace.terminal).unwrap();
        prop_assert_eq!(u.bakers.len(), inst.num_bakers());
        let _ = coverage(&inst, &trace.terminal);
    }
}

/// Convergence of unweighted improving dynamics is not a theorem; the counts
/// are printed, not asserted.
#[test]
fn report_unweighted_best_improving_convergence() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;

    let mut runner = TestRunner::deterministic();
    let (mut converged, mut other) = (0, 0);
    for _ in 0..500 {
        let inst = instance().new_tree(&mut runner).unwrap().current();
        let w = WeightedInstance::unweighted(inst.clone());
        let start = StrategyProfile::new(
            (0..inst.num_bakers()).map(|b| *inst.range(b).last().unwrap()).collect(),
            vec![inst.num_locations() - 1; inst.num_millers()],
        );
        let trace = run_dynamics(&w, &start, &Policy::BestImproving, 1_000, CycleCheck::Exact).unwrap();
        match trace.status {
            Termination::Converged => {
                assert!(is_nash_equilibrium(&inst, &trace.terminal));
                converged += 1;
            }
            _ => other += 1,
        }
    }
    println!("best-improving dynamics: {converged} converged, {other} cycled or ran out of budget");
}
