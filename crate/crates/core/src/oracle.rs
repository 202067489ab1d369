//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates: all pure equilibria, the optimal coverage,
//! the potential maximum and the maximum k-coverage. Millers are enumerated
//! as multisets of locations (one sorted representative per multiset). The
//! equilibrium test works directly on head counts and shares no code with
//! [`crate::model`], so the two can check each other.
//!
//! Work is bounded by a budget on the size of the profile space
//! `Π_b |L(b)| · |L|^|M|`; larger instances are refused, never truncated.

use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::reductions::CoverageProblem;
use crate::{Error, Instance, Result, StrategyProfile};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Price of anarchy or stability. `Unbounded` stands for a division by a
/// zero-coverage equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PriceRatio {
    Finite(Rational),
    Unbounded,
}

impl PriceRatio {
    fn of(optimum: usize, equilibrium: usize) -> Self {
        if equilibrium == 0 {
            PriceRatio::Unbounded
        } else {
            PriceRatio::Finite(Rational::ratio(optimum as u64, equilibrium as u64))
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            PriceRatio::Finite(r) => Some(r),
            PriceRatio::Unbounded => None,
        }
    }
}

impl core::fmt::Display for PriceRatio {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PriceRatio::Finite(r) => write!(f, "{r}"),
            PriceRatio::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnessed {
    pub coverage: usize,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub digest: u64,
    pub profiles_examined: u128,
    /// Sorted, millers in canonical (sorted) order.
    pub equilibria: Vec<StrategyProfile>,
    pub optimum: Witnessed,
    pub best_equilibrium: Witnessed,
    pub worst_equilibrium: Witnessed,
    pub price_of_anarchy: PriceRatio,
    pub price_of_stability: PriceRatio,
}

/// FNV-1a over the instance structure (names excluded).
pub fn instance_digest(instance: &Instance) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(instance.num_locations() as u64);
    eat(instance.num_millers() as u64);
    for range in instance.ranges() {
        eat(u64::MAX);
        for &l in range {
            eat(l as u64);
        }
    }
    h
}

/// `Π_b |L(b)| · |L|^|M|`, saturating.
pub fn profile_space(instance: &Instance) -> u128 {
    baker_space(instance)
        .saturating_mul((instance.num_locations() as u128).saturating_pow(instance.num_millers() as u32))
}

fn baker_space(instance: &Instance) -> u128 {
    instance.ranges().iter().fold(1u128, |acc, r| acc.saturating_mul(r.len() as u128))
}

fn check_budget(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}

/// Calls `f` with every nondecreasing vector of length `k` over `0..n`.
fn for_each_multiset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut v = vec![0usize; k];
    loop {
        f(&v);
        // Advance the rightmost position that can still grow.
        let Some(i) = (0..k).rev().find(|&i| v[i] + 1 < n) else { return };
        let next = v[i] + 1;
        for slot in &mut v[i..] {
            *slot = next;
        }
    }
}

/// Calls `f` with every baker vector, bakers drawn from their ranges.
fn for_each_baker_vector(instance: &Instance, mut f: impl FnMut(&[usize])) {
    let ranges = instance.ranges();
    let mut idx = vec![0usize; ranges.len()];
    let mut v: Vec<usize> = ranges.iter().map(|r| r[0]).collect();
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == ranges.len() {
                return;
            }
            idx[i] += 1;
            if idx[i] < ranges[i].len() {
                v[i] = ranges[i][idx[i]];
                break;
            }
            idx[i] = 0;
            v[i] = ranges[i][0];
            i += 1;
        }
    }
}

fn tally(n: usize, locations: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for &l in locations {
        out[l] += 1;
    }
    out
}

fn is_equilibrium(instance: &Instance, bakers: &[usize], bc: &[u64], mc: &[u64]) -> bool {
    let n = bc.len();
    // Millers: B(l)/M(l) >= B(l')/(M(l')+1) for every occupied l.
    for l in 0..n {
        if mc[l] == 0 {
            continue;
        }
        if (0..n).any(|l2| l2 != l && bc[l2] * mc[l] > bc[l] * (mc[l2] + 1)) {
            return false;
        }
    }
    // Bakers: M(l)/B(l) >= M(l')/(B(l')+1) within the range.
    bakers
        .iter()
        .enumerate()
        .all(|(b, &l)| instance.range(b).iter().all(|&l2| l2 == l || mc[l2] * bc[l] <= mc[l] * (bc[l2] + 1)))
}

fn covered(bakers: &[usize], mc: &[u64]) -> usize {
    bakers.iter().filter(|&&l| mc[l] > 0).count()
}

/// Every pure Nash equilibrium, millers in sorted order, sorted overall.
pub fn enumerate_all_ne(instance: &Instance, budget: u128) -> Result<Vec<StrategyProfile>> {
    check_budget(profile_space(instance), budget)?;
    let n = instance.num_locations();
    let mut out = Vec::new();
    for_each_multiset(n, instance.num_millers(), |millers| {
        let mc = tally(n, millers);
        for_each_baker_vector(instance, |bakers| {
            let bc = tally(n, bakers);
            if is_equilibrium(instance, bakers, &bc, &mc) {
                out.push(StrategyProfile::new(bakers.to_vec(), millers.to_vec()));
            }
        });
    });
    out.sort();
    Ok(out)
}

/// Maximum coverage over all profiles. Enumerates miller multisets and lets
/// every baker join a millered location when her range has one.
pub fn optimal_coverage(instance: &Instance, budget: u128) -> Result<Witnessed> {
    check_budget(profile_space(instance), budget)?;
    let n = instance.num_locations();
    let mut best: Option<Witnessed> = None;
    for_each_multiset(n, instance.num_millers(), |millers| {
        let mc = tally(n, millers);
        let bakers: Vec<usize> =
            instance.ranges().iter().map(|r| r.iter().copied().find(|&l| mc[l] > 0).unwrap_or(r[0])).collect();
        let c = covered(&bakers, &mc);
        if best.as_ref().is_none_or(|w| c > w.coverage) {
            best = Some(Witnessed { coverage: c, profile: StrategyProfile::new(bakers, millers.to_vec()) });
        }
    });
    Ok(best.expect("at least one miller multiset"))
}

/// Price of anarchy and stability from full enumeration.
pub fn poa_pos(instance: &Instance, budget: u128) -> Result<(PriceRatio, PriceRatio)> {
    let r = report(instance, budget)?;
    Ok((r.price_of_anarchy, r.price_of_stability))
}

pub fn report(instance: &Instance, budget: u128) -> Result<OracleReport> {
    let equilibria = enumerate_all_ne(instance, budget)?;
    let optimum = optimal_coverage(instance, budget)?;
    let n = instance.num_locations();
    let mut best: Option<Witnessed> = None;
    let mut worst: Option<Witnessed> = None;
    for p in &equilibria {
        let c = covered(&p.bakers, &tally(n, &p.millers));
        if best.as_ref().is_none_or(|w| c > w.coverage) {
            best = Some(Witnessed { coverage: c, profile: p.clone() });
        }
        if worst.as_ref().is_none_or(|w| c < w.coverage) {
            worst = Some(Witnessed { coverage: c, profile: p.clone() });
        }
    }
    // Existence is a theorem; an empty list is a bug somewhere.
    let best = best.expect("every instance has a pure Nash equilibrium");
    let worst = worst.expect("every instance has a pure Nash equilibrium");
    Ok(OracleReport {
        digest: instance_digest(instance),
        profiles_examined: baker_space(instance) * multiset_count(n, instance.num_millers()),
        price_of_anarchy: PriceRatio::of(optimum.coverage, worst.coverage),
        price_of_stability: PriceRatio::of(optimum.coverage, best.coverage),
        equilibria,
        optimum,
        best_equilibrium: best,
        worst_equilibrium: worst,
    })
}

/// Number of size-`k` multisets over `n` items.
pub fn multiset_count(n: usize, k: usize) -> u128 {
    // C(n + k - 1, k)
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 + i) / (i + 1);
    }
    acc
}

/// Maximum of `Σ_ℓ M(ℓ)·H_{B(ℓ)}` over all baker vectors, by enumeration.
pub fn brute_phi_max(instance: &Instance, millers: &[usize], budget: u128) -> Result<(Rational, Vec<usize>)> {
    check_budget(baker_space(instance), budget)?;
    let n = instance.num_locations();
    let mc = tally(n, millers);
    let mut harmonic = vec![Rational::zero()];
    for j in 1..=instance.num_bakers() as u64 {
        let next = harmonic.last().unwrap().clone() + Rational::ratio(1, j);
        harmonic.push(next);
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for_each_baker_vector(instance, |bakers| {
        let bc = tally(n, bakers);
        let phi: Rational = (0..n).map(|l| Rational::integer(mc[l] as i64) * harmonic[bc[l] as usize].clone()).sum();
        if best.as_ref().is_none_or(|(b, _)| phi > *b) {
            best = Some((phi, bakers.to_vec()));
        }
    });
    Ok(best.expect("at least one baker vector"))
}

/// Maximum k-coverage by trying every k-subset of sets. Returns the number
/// of covered items and the chosen set indices.
pub fn max_k_coverage(problem: &CoverageProblem) -> (usize, Vec<usize>) {
    let sets = problem.sets();
    let k = problem.k();
    let mut best = (0usize, Vec::new());
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        let mut items: Vec<usize> = choice.iter().flat_map(|&i| sets[i].iter().copied()).collect();
        items.sort_unstable();
        items.dedup();
        if best.1.is_empty() || items.len() > best.0 {
            best = (items.len(), choice.clone());
        }
        // Next k-combination in lexicographic order.
        let Some(i) = (0..k).rev().find(|&i| choice[i] < sets.len() - k + i) else { break };
        choice[i] += 1;
        for j in i + 1..k {
            choice[j] = choice[j - 1] + 1;
        }
    }
    best
}

/// Every profile with millers as full vectors (not multisets).
#[cfg(test)]
pub(crate) fn enumerate_profiles_for_tests(instance: &Instance) -> Vec<StrategyProfile> {
    let n = instance.num_locations();
    let k = instance.num_millers();
    let mut out = Vec::new();
    for code in 0..n.pow(k as u32) {
        let millers: Vec<usize> = (0..k).map(|m| code / n.pow(m as u32) % n).collect();
        for_each_baker_vector(instance, |bakers| out.push(StrategyProfile::new(bakers.to_vec(), millers.clone())));
    }
    out
}
