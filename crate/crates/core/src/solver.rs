//! The three-phase equilibrium algorithm.
//!
//! 1. Greedy concentration: repeatedly pick the location with the most
//!    still-unassigned bakers in range and put all of them there.
//! 2. Miller insertion: place millers one by one on the location maximizing
//!    `B_s(ℓ) / (M_t(ℓ) + 1)`, earliest location in greedy order on ties.
//! 3. Rebalancing: replace the baker profile by a maximizer of the Rosenthal
//!    potential for the fixed millers (see [`crate::flow`]).
//!
//! The result is a pure Nash equilibrium. Phase 1's order also is the greedy
//! solution of maximum k-coverage, which is what the welfare bound rests on.

use alloc::vec;
use alloc::vec::Vec;

use crate::flow::maximize_potential;
use crate::model::{counts, coverage, is_nash_equilibrium, potential_value, ratio_lt, Instance, StrategyProfile};
use crate::rational::Rational;
use crate::{Error, Result};

/// Locations in the order phase 1 removed them, with the number of bakers
/// each one received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOrder {
    pub locations: Vec<usize>,
    pub counts: Vec<usize>,
}

impl GreedyOrder {
    /// Position of every location in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.locations.len()];
        for (i, &l) in self.locations.iter().enumerate() {
            pos[l] = i;
        }
        pos
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub profile: StrategyProfile,
    pub order: GreedyOrder,
    /// Baker profile after phase 1.
    pub concentrated: Vec<usize>,
    /// Potential of the phase-1 bakers under the final millers.
    pub potential_before: Rational,
    /// Potential of the final bakers; the maximum over all baker profiles.
    pub potential_after: Rational,
    pub coverage: usize,
}

/// Phase 1. Ties between locations go to the lowest location index.
pub fn phase1_concentrate(instance: &Instance) -> (GreedyOrder, Vec<usize>) {
    let nl = instance.num_locations();
    let mut assigned: Vec<Option<usize>> = vec![None; instance.num_bakers()];
    let mut remaining = vec![true; nl];
    let mut order = GreedyOrder { locations: Vec::with_capacity(nl), counts: Vec::with_capacity(nl) };

    for _ in 0..nl {
        let mut in_range = vec![0usize; nl];
        for (b, slot) in assigned.iter().enumerate() {
            if slot.is_none() {
                for &l in instance.range(b) {
                    in_range[l] += 1;
                }
            }
        }
        let mut best: Option<usize> = None;
        for l in (0..nl).filter(|&l| remaining[l]) {
            if best.is_none_or(|bl| in_range[l] > in_range[bl]) {
                best = Some(l);
            }
        }
        let chosen = best.expect("one location is removed per round");
        remaining[chosen] = false;
        let mut taken = 0;
        for (b, slot) in assigned.iter_mut().enumerate() {
            if slot.is_none() && instance.can_use(b, chosen) {
                *slot = Some(chosen);
                taken += 1;
            }
        }
        order.locations.push(chosen);
        order.counts.push(taken);
    }
    let bakers = assigned.into_iter().map(|l| l.expect("every range is nonempty")).collect();
    (order, bakers)
}

/// Phase 2: sequential best-response insertion of the millers.
pub fn phase2_insert_millers(instance: &Instance, order: &GreedyOrder, bakers: &[usize]) -> Vec<usize> {
    let bakers_at = counts(instance.num_locations(), bakers);
    let mut millers_at = vec![0usize; instance.num_locations()];
    let mut millers = Vec::with_capacity(instance.num_millers());
    for _ in 0..instance.num_millers() {
        let mut best = order.locations[0];
        for &l in &order.locations[1..] {
            // Strictly better only, so the earliest location wins ties.
            if ratio_lt(bakers_at[best], millers_at[best] + 1, bakers_at[l], millers_at[l] + 1) {
                best = l;
            }
        }
        millers_at[best] += 1;
        millers.push(best);
    }
    millers
}

/// Phase 3: a baker profile maximizing the potential for fixed millers.
pub fn phase3_rebalance(instance: &Instance, millers: &[usize]) -> Vec<usize> {
    maximize_potential(instance, millers).expect("every baker has a permissible location").0
}

/// Runs all three phases.
pub fn compute_equilibrium(instance: &Instance) -> SolveReport {
    let (order, concentrated) = phase1_concentrate(instance);
    let millers = phase2_insert_millers(instance, &order, &concentrated);
    let (bakers, potential_after) =
        maximize_potential(instance, &millers).expect("every baker has a permissible location");
    let potential_before = potential_value(instance, &millers, &concentrated);
    let profile = StrategyProfile::new(bakers, millers);
    let coverage = coverage(instance, &profile);
    SolveReport { profile, order, concentrated, potential_before, potential_after, coverage }
}

/// The first `k` locations of the phase-1 order: the greedy maximum
/// k-coverage solution.
pub fn greedy_k_coverage(instance: &Instance, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > instance.num_locations() {
        return Err(Error::KOutOfRange { k, max: instance.num_locations() });
    }
    let (order, _) = phase1_concentrate(instance);
    Ok(order.locations[..k].to_vec())
}

/// Number of bakers with at least one permissible location in `locations`.
pub fn bakers_in_reach(instance: &Instance, locations: &[usize]) -> usize {
    (0..instance.num_bakers()).filter(|&b| instance.range(b).iter().any(|l| locations.contains(l))).count()
}

/// Outcome of [`stable_from_location_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSolve {
    pub profile: StrategyProfile,
    pub coverage: usize,
    pub is_nash_equilibrium: bool,
    /// Bakers with no permissible location in the set.
    pub withheld: Vec<usize>,
}

/// Runs the algorithm on the instance restricted to `locations`, then puts
/// the removed locations back and places every baker that could not reach
/// the set on her lowest-index permissible location.
///
/// If `locations` is a coverage-optimal set of `min(|L|, |M|)` locations the
/// completed profile is an equilibrium whose coverage is within a factor
/// `1 + (min(|L|,|M|) - 1)/|M|` of the optimum. For other sets it may fail
/// to be one, which the returned flag reports.
pub fn stable_from_location_set(instance: &Instance, locations: &[usize]) -> Result<RestrictedSolve> {
    if locations.is_empty() {
        return Err(Error::EmptyLocationSet);
    }
    let mut keep = locations.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&l) = keep.iter().find(|&&l| l >= instance.num_locations()) {
        return Err(Error::UnknownLocation { baker: 0, location: l, num_locations: instance.num_locations() });
    }

    let mut bakers: Vec<usize> = (0..instance.num_bakers()).map(|b| instance.range(b)[0]).collect();
    let mut kept_bakers = Vec::new();
    let millers = match instance.restrict(&keep) {
        Ok((sub, kept)) => {
            let inner = compute_equilibrium(&sub);
            for (i, &b) in kept.iter().enumerate() {
                bakers[b] = keep[inner.profile.bakers[i]];
            }
            kept_bakers = kept;
            inner.profile.millers.iter().map(|&l| keep[l]).collect()
        }
        // Nobody can reach the set; the millers only have each other.
        Err(Error::NoBakers) => vec![keep[0]; instance.num_millers()],
        Err(e) => return Err(e),
    };
    let withheld = (0..instance.num_bakers()).filter(|b| !kept_bakers.contains(b)).collect();
    let profile = StrategyProfile::new(bakers, millers);
    Ok(RestrictedSolve {
        coverage: coverage(instance, &profile),
        is_nash_equilibrium: is_nash_equilibrium(instance, &profile),
        profile,
        withheld,
    })
}
