//! Instance constructors: the two maximum k-coverage reductions, the
//! price-of-anarchy and price-of-stability families, and the small example
//! instances used throughout the tests and the CLI.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{AgentKind, ScriptedMove, WeightedInstance};
use crate::model::{Instance, StrategyProfile};
use crate::{Error, Result};

/// A maximum k-coverage instance: pick `k` sets covering the most items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageProblem {
    sets: Vec<Vec<usize>>,
    k: usize,
}

impl CoverageProblem {
    /// Items are arbitrary labels; each set is sorted and deduplicated.
    pub fn new(sets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::NoSets);
        }
        if k == 0 || k > sets.len() {
            return Err(Error::KOutOfRange { k, max: sets.len() });
        }
        let mut canonical = Vec::with_capacity(sets.len());
        for (i, mut set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptySet(i));
            }
            set.sort_unstable();
            set.dedup();
            canonical.push(set);
        }
        Ok(Self { sets: canonical, k })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The union of all sets, sorted.
    pub fn ground_set(&self) -> Vec<usize> {
        let mut items: Vec<usize> = self.sets.iter().flatten().copied().collect();
        items.sort_unstable();
        items.dedup();
        items
    }
}

fn set_names(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("S{i}")).collect()
}

/// One location per set, one baker per item ranging over the sets that
/// contain it, and `k` millers. Returns the item of every baker.
///
/// The optimal coverage of the instance equals the maximum k-coverage.
pub fn reduce_to_optimum_instance(problem: &CoverageProblem) -> Result<(Instance, Vec<usize>)> {
    let items = problem.ground_set();
    let ranges = items
        .iter()
        .map(|item| (0..problem.sets.len()).filter(|&s| problem.sets[s].binary_search(item).is_ok()).collect())
        .collect();
    let instance = Instance::new(set_names(problem.sets.len()), problem.k, ranges)?;
    Ok((instance, items))
}

/// The optimum reduction plus `q = |ground set| + 1` bakers pinned to every
/// location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReduction {
    pub instance: Instance,
    pub q: usize,
    /// `Some(item)` for item bakers, `None` for pinned filler bakers.
    pub item_of_baker: Vec<Option<usize>>,
}

/// The best equilibrium coverage of the instance is the maximum k-coverage
/// plus `k·q`: the pinned bakers keep millers from sharing a location.
pub fn reduce_to_optimal_ne_instance(problem: &CoverageProblem) -> Result<EquilibriumReduction> {
    let (base, items) = reduce_to_optimum_instance(problem)?;
    let q = items.len() + 1;
    let mut ranges = base.ranges().to_vec();
    let mut item_of_baker: Vec<Option<usize>> = items.into_iter().map(Some).collect();
    for l in 0..problem.sets.len() {
        for _ in 0..q {
            ranges.push(vec![l]);
            item_of_baker.push(None);
        }
    }
    let instance = Instance::new(set_names(problem.sets.len()), problem.k, ranges)?;
    Ok(EquilibriumReduction { instance, q, item_of_baker })
}

/// An instance with an optimal profile and a contrasting equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub instance: Instance,
    pub optimum: StrategyProfile,
    pub equilibrium: StrategyProfile,
}

/// Locations `x, l1, …, lm`, one miller, baker `i` choosing `li` or `x`.
/// Optimum: everyone on `x`. Equilibrium: baker `i` on `li`, the miller on
/// `l1`, covering one baker.
pub fn gen_poa_family(num_bakers: usize) -> Result<Family> {
    if num_bakers == 0 {
        return Err(Error::FamilyParameter { name: "num_bakers" });
    }
    let mut names = vec!["x".to_string()];
    names.extend((1..=num_bakers).map(|i| alloc::format!("l{i}")));
    let ranges = (1..=num_bakers).map(|i| vec![0, i]).collect();
    let instance = Instance::new(names, 1, ranges)?;
    let optimum = StrategyProfile::new(vec![0; num_bakers], vec![0]);
    let equilibrium = StrategyProfile::new((1..=num_bakers).collect(), vec![1]);
    Ok(Family { instance, optimum, equilibrium })
}

/// Locations `x, l2, …, l|L|`; `n·|M| + 1` bakers pinned to `x` and `n` pinned
/// to every other location. Optimum: one miller on each of the first
/// `q = min(|L|, |M|)` locations (spares on `x`). Equilibrium: all millers on
/// `x`, the only one up to miller permutation.
pub fn gen_pos_family(n: usize, num_locations: usize, num_millers: usize) -> Result<Family> {
    for (value, name) in [(n, "n"), (num_locations, "num_locations"), (num_millers, "num_millers")] {
        if value == 0 {
            return Err(Error::FamilyParameter { name });
        }
    }
    let mut names = vec!["x".to_string()];
    names.extend((2..=num_locations).map(|i| alloc::format!("l{i}")));
    let mut ranges = vec![vec![0]; n * num_millers + 1];
    for l in 1..num_locations {
        ranges.extend(core::iter::repeat_n(vec![l], n));
    }
    let bakers: Vec<usize> = ranges.iter().map(|r| r[0]).collect();
    let instance = Instance::new(names, num_millers, ranges)?;
    let q = num_locations.min(num_millers);
    let mut opt_millers: Vec<usize> = (0..q).collect();
    opt_millers.resize(num_millers, 0);
    opt_millers.sort_unstable();
    let optimum = StrategyProfile::new(bakers.clone(), opt_millers);
    let equilibrium = StrategyProfile::new(bakers, vec![0; num_millers]);
    Ok(Family { instance, optimum, equilibrium })
}

/// A fixed example instance with named profiles and, for the weighted one,
/// agent weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Figure {
    pub instance: Instance,
    pub baker_weights: Vec<u64>,
    pub miller_weights: Vec<u64>,
    pub profiles: Vec<(&'static str, StrategyProfile)>,
}

impl Figure {
    fn unit(instance: Instance, profiles: Vec<(&'static str, StrategyProfile)>) -> Self {
        Self {
            baker_weights: vec![1; instance.num_bakers()],
            miller_weights: vec![1; instance.num_millers()],
            instance,
            profiles,
        }
    }

    pub fn weighted(&self) -> Result<WeightedInstance> {
        WeightedInstance::new(self.instance.clone(), self.baker_weights.clone(), self.miller_weights.clone())
    }

    pub fn profile(&self, name: &str) -> Option<&StrategyProfile> {
        self.profiles.iter().find(|(n, _)| *n == name).map(|(_, p)| p)
    }
}

pub const FIGURE_TAGS: [&str; 5] = ["fig1", "fig2", "fig3", "fig6", "fig7"];

fn xyz(n: usize) -> Vec<String> {
    ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
}

pub fn gen_paper_figure(tag: &str) -> Result<Figure> {
    let (x, y, z) = (0, 1, 2);
    let figure = match tag {
        // A miller alone on x wants to leave ("left"); "right" is an
        // equilibrium.
        "fig1" => Figure::unit(
            Instance::new(xyz(3), 2, vec![vec![x, y], vec![x, y], vec![y, z], vec![z]])?,
            vec![
                ("left", StrategyProfile::new(vec![y, y, y, z], vec![x, y])),
                ("right", StrategyProfile::new(vec![y, y, z, z], vec![y, z])),
            ],
        ),
        // Two equilibria with different coverage; only baker 2 can pick
        // either location.
        "fig2" => Figure::unit(
            Instance::new(xyz(2), 2, vec![vec![x], vec![x], vec![x, y], vec![y]])?,
            vec![
                ("left", StrategyProfile::new(vec![x, x, x, y], vec![x, x])),
                ("right", StrategyProfile::new(vec![x, x, y, y], vec![x, y])),
            ],
        ),
        // Greedy concentration picks x (4 in range), then z, then y. Only
        // the baker side is fixed; three millers are used for the
        // insertion example.
        "fig3" => Figure::unit(
            Instance::new(xyz(3), 3, vec![vec![x], vec![x], vec![x, y], vec![x, y, z], vec![y, z], vec![z]])?,
            vec![("concentrated", StrategyProfile::new(vec![x, x, x, x, z, z], vec![x, x, z]))],
        ),
        // Millers fixed at x:1, y:2; "maximizer" holds the potential-maximizing
        // baker placement.
        "fig6" => Figure::unit(
            Instance::new(xyz(3), 3, vec![vec![x, y], vec![z]])?,
            vec![("maximizer", StrategyProfile::new(vec![y, z], vec![x, y, y]))],
        ),
        // Weighted bakers, twelve unit millers, every location open to all.
        "fig7" => {
            let mut millers = vec![x; 6];
            millers.extend([y, y, z, z, z, z]);
            Figure {
                instance: Instance::new(xyz(3), 12, vec![vec![x, y, z]; 5])?,
                baker_weights: vec![5, 8, 8, 5, 6],
                miller_weights: vec![1; 12],
                profiles: vec![("start", StrategyProfile::new(vec![x, x, y, z, z], millers))],
            }
        }
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    Ok(figure)
}

/// The seven improving moves on the weighted `fig7` instance. Afterwards
/// every location holds what its predecessor in `x → z → y → x` held at the
/// start.
pub fn fig7_script() -> Vec<ScriptedMove> {
    let (x, y, z) = (0, 1, 2);
    let step = |kind, from, to, weight| ScriptedMove { kind, from, to, weight: Some(weight) };
    vec![
        step(AgentKind::Miller, x, z, 1),
        step(AgentKind::Baker, y, z, 8),
        step(AgentKind::Baker, x, y, 5),
        step(AgentKind::Miller, x, y, 1),
        step(AgentKind::Baker, z, y, 6),
        step(AgentKind::Miller, x, z, 1),
        step(AgentKind::Miller, x, y, 1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{coverage, is_nash_equilibrium};
    use crate::oracle::{enumerate_all_ne, max_k_coverage, optimal_coverage, report, PriceRatio, DEFAULT_BUDGET};
    use crate::rational::Rational;

    fn example() -> CoverageProblem {
        CoverageProblem::new(vec![vec![1, 2], vec![2, 3], vec![3]], 1).unwrap()
    }

    #[test]
    fn coverage_problem_validation() {
        assert_eq!(CoverageProblem::new(vec![], 1), Err(Error::NoSets));
        assert_eq!(CoverageProblem::new(vec![vec![1]], 2), Err(Error::KOutOfRange { k: 2, max: 1 }));
        assert_eq!(CoverageProblem::new(vec![vec![1], vec![]], 1), Err(Error::EmptySet(1)));
        assert_eq!(example().ground_set(), vec![1, 2, 3]);
    }

    #[test]
    fn optimum_reduction_example() {
        let (inst, items) = reduce_to_optimum_instance(&example()).unwrap();
        assert_eq!(inst.num_locations(), 3);
        assert_eq!(inst.num_bakers(), 3);
        assert_eq!(inst.num_millers(), 1);
        assert_eq!(items, vec![1, 2, 3]);
        assert_eq!(inst.range(1), &[0, 1]);
        assert_eq!(optimal_coverage(&inst, DEFAULT_BUDGET).unwrap().coverage, 2);

        let single = CoverageProblem::new(vec![vec![1]], 1).unwrap();
        let (inst, _) = reduce_to_optimum_instance(&single).unwrap();
        assert_eq!(optimal_coverage(&inst, DEFAULT_BUDGET).unwrap().coverage, 1);

        let one_big = CoverageProblem::new(vec![vec![1, 2, 3]], 1).unwrap();
        let (inst, _) = reduce_to_optimum_instance(&one_big).unwrap();
        assert_eq!(optimal_coverage(&inst, DEFAULT_BUDGET).unwrap().coverage, 3);
    }

    #[test]
    fn equilibrium_reduction_examples() {
        let red = reduce_to_optimal_ne_instance(&example()).unwrap();
        assert_eq!(red.q, 4);
        assert_eq!(red.instance.num_bakers(), 3 + 3 * 4);
        let r = report(&red.instance, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_equilibrium.coverage, 6);
        assert_eq!(max_k_coverage(&example()).0 + red.q, 6);

        let red = reduce_to_optimal_ne_instance(&CoverageProblem::new(vec![vec![1]], 1).unwrap()).unwrap();
        assert_eq!(red.q, 2);
        assert_eq!(report(&red.instance, DEFAULT_BUDGET).unwrap().best_equilibrium.coverage, 3);
    }

    #[test]
    fn no_equilibrium_stacks_millers_in_equilibrium_reduction() {
        let p = CoverageProblem::new(vec![vec![1, 2], vec![2, 3], vec![3]], 2).unwrap();
        let red = reduce_to_optimal_ne_instance(&p).unwrap();
        for ne in enumerate_all_ne(&red.instance, DEFAULT_BUDGET).unwrap() {
            assert_ne!(ne.millers[0], ne.millers[1]);
        }
    }

    #[test]
    fn poa_family() {
        for m in 1..=5 {
            let fam = gen_poa_family(m).unwrap();
            assert!(is_nash_equilibrium(&fam.instance, &fam.equilibrium));
            assert_eq!(coverage(&fam.instance, &fam.equilibrium), 1);
            assert_eq!(coverage(&fam.instance, &fam.optimum), m);
        }
        let (poa, _) = crate::oracle::poa_pos(&gen_poa_family(5).unwrap().instance, DEFAULT_BUDGET).unwrap();
        assert_eq!(poa, PriceRatio::Finite(Rational::integer(5)));
        assert_eq!(gen_poa_family(0), Err(Error::FamilyParameter { name: "num_bakers" }));
    }

    #[test]
    fn pos_family() {
        let fam = gen_pos_family(2, 3, 3).unwrap();
        assert_eq!(fam.instance.num_bakers(), 7 + 2 + 2);
        assert_eq!(coverage(&fam.instance, &fam.optimum), 11);
        assert_eq!(coverage(&fam.instance, &fam.equilibrium), 7);
        let r = report(&fam.instance, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.equilibria, vec![fam.equilibrium.clone()]);
        assert_eq!(r.price_of_stability, PriceRatio::Finite(Rational::new(11, 7)));

        let fam = gen_pos_family(1, 1, 1).unwrap();
        let r = report(&fam.instance, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.price_of_stability, PriceRatio::Finite(Rational::one()));
        assert!(gen_pos_family(0, 2, 2).is_err());
    }

    #[test]
    fn figures() {
        let fig = gen_paper_figure("fig2").unwrap();
        assert_eq!((fig.instance.num_locations(), fig.instance.num_millers(), fig.instance.num_bakers()), (2, 2, 4));
        let ne = enumerate_all_ne(&fig.instance, DEFAULT_BUDGET).unwrap();
        for (_, p) in &fig.profiles {
            assert!(ne.contains(&p.canonical()));
        }

        let fig = gen_paper_figure("fig7").unwrap();
        assert_eq!(fig.instance.num_locations(), 3);
        assert_eq!(fig.miller_weights, vec![1; 12]);
        assert_eq!(fig.baker_weights, vec![5, 8, 8, 5, 6]);
        assert!(fig.instance.ranges().iter().all(|r| r == &[0, 1, 2]));

        let fig = gen_paper_figure("fig1").unwrap();
        assert_eq!((fig.instance.num_locations(), fig.instance.num_millers(), fig.instance.num_bakers()), (3, 2, 4));

        for tag in FIGURE_TAGS {
            let fig = gen_paper_figure(tag).unwrap();
            for (_, p) in &fig.profiles {
                p.validate(&fig.instance).unwrap();
            }
        }
        assert_eq!(gen_paper_figure("fig9"), Err(Error::UnknownFigure("fig9".into())));
    }
}
