//! Instance families reachable from `bmgame generate`, and seeded random
//! instances.

use anyhow::{bail, Context};
use bmgame_core::dynamics::ScriptedMove;
use bmgame_core::reductions::{
    fig7_script, gen_paper_figure, gen_poa_family, gen_pos_family, reduce_to_optimal_ne_instance,
    reduce_to_optimum_instance, CoverageProblem, Family,
};
use bmgame_core::{Instance, StrategyProfile};
use rand::Rng;

use crate::io::ParsedInstance;

pub const FAMILIES: &str = "fig1 fig2 fig3 fig6 fig7 | poa <m> (fig4 <m>) | pos <n> <L> <M> (fig5 <n> <L> <M>) | \
                            kcov-opt --sets S --k K | kcov-ne --sets S --k K | random --bakers B --locations L --millers M --seed N";

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: ParsedInstance,
    pub profiles: Vec<(String, StrategyProfile)>,
    pub script: Option<Vec<ScriptedMove>>,
}

impl Generated {
    fn plain(instance: Instance) -> Self {
        Self { instance: instance.into(), profiles: Vec::new(), script: None }
    }

    fn family(family: Family) -> Self {
        Self {
            instance: family.instance.into(),
            profiles: vec![("optimum".into(), family.optimum), ("equilibrium".into(), family.equilibrium)],
            script: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct GenerateArgs {
    pub params: Vec<usize>,
    pub sets: Option<String>,
    pub k: Option<usize>,
    pub bakers: Option<usize>,
    pub locations: Option<usize>,
    pub millers: Option<usize>,
    pub seed: u64,
}

fn params<const N: usize>(family: &str, args: &GenerateArgs, defaults: [usize; N]) -> anyhow::Result<[usize; N]> {
    match args.params.len() {
        0 => Ok(defaults),
        n if n == N => Ok(std::array::from_fn(|i| args.params[i])),
        n => bail!("{family} takes {N} parameter(s), got {n}"),
    }
}

/// Parses `"1 2; 2 3; 3"` (commas also separate items).
pub fn parse_sets(text: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    text.split(';')
        .enumerate()
        .map(|(i, set)| {
            set.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().with_context(|| format!("set {i}: bad item {t:?}")))
                .collect()
        })
        .collect()
}

fn coverage_problem(args: &GenerateArgs) -> anyhow::Result<CoverageProblem> {
    let sets = parse_sets(args.sets.as_deref().context("--sets is required")?)?;
    Ok(CoverageProblem::new(sets, args.k.context("--k is required")?)?)
}

pub fn generate(family: &str, args: &GenerateArgs) -> anyhow::Result<Generated> {
    let generated = match family {
        "poa" | "fig4" => {
            let [m] = params(family, args, [5])?;
            Generated::family(gen_poa_family(m)?)
        }
        "pos" | "fig5" => {
            let [n, l, m] = params(family, args, [2, 3, 3])?;
            Generated::family(gen_pos_family(n, l, m)?)
        }
        "kcov-opt" => Generated::plain(reduce_to_optimum_instance(&coverage_problem(args)?)?.0),
        "kcov-ne" => Generated::plain(reduce_to_optimal_ne_instance(&coverage_problem(args)?)?.instance),
        "random" => {
            let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("{flag} is required"));
            let (b, l, m) = (
                need(args.bakers, "--bakers")?,
                need(args.locations, "--locations")?,
                need(args.millers, "--millers")?,
            );
            if b == 0 || l == 0 || m == 0 {
                bail!("--bakers, --locations and --millers must be positive");
            }
            let mut rng = seeded(args.seed);
            Generated::plain(random_instance(&mut rng, b, l, m))
        }
        tag => {
            params(tag, args, [])?;
            let fig = gen_paper_figure(tag)?;
            let script = (tag == "fig7").then(fig7_script);
            let instance = fig.weighted()?.into();
            Generated {
                instance,
                profiles: fig.profiles.into_iter().map(|(n, p)| (n.to_string(), p)).collect(),
                script,
            }
        }
    };
    Ok(generated)
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Every range is a uniformly random nonempty subset of the locations.
pub fn random_instance<R: Rng>(rng: &mut R, num_bakers: usize, num_locations: usize, num_millers: usize) -> Instance {
    assert!(num_locations < usize::BITS as usize);
    let ranges = (0..num_bakers)
        .map(|_| {
            let mask: usize = rng.gen_range(1..1usize << num_locations);
            (0..num_locations).filter(|l| mask >> l & 1 == 1).collect()
        })
        .collect();
    Instance::with_default_names(num_locations, num_millers, ranges).expect("valid random instance")
}

/// Sizes uniform in `1..=max`, then [`random_instance`].
pub fn random_small_instance<R: Rng>(
    rng: &mut R,
    max_bakers: usize,
    max_locations: usize,
    max_millers: usize,
) -> Instance {
    let b = rng.gen_range(1..=max_bakers);
    let l = rng.gen_range(1..=max_locations);
    let m = rng.gen_range(1..=max_millers);
    random_instance(rng, b, l, m)
}
