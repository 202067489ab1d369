//! Instances, strategy profiles, utilities, coverage and the equilibrium
//! predicates.
//!
//! Utilities are ratios of head counts at the agent's own location. The agent
//! always counts herself, so the denominator is never zero. Comparisons in
//! the equilibrium scans are done by integer cross-multiplication; the
//! public utility functions return exact [`Rational`]s.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::{harmonic_table, Rational};
use crate::{Error, Result};

/// A game instance: named locations, a number of interchangeable millers and
/// one permissible location set per baker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    locations: Vec<String>,
    num_millers: usize,
    ranges: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance, sorting and deduplicating every range.
    pub fn new(locations: Vec<String>, num_millers: usize, ranges: Vec<Vec<usize>>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::NoLocations);
        }
        for (i, name) in locations.iter().enumerate() {
            if locations[..i].contains(name) {
                return Err(Error::DuplicateLocation(name.clone()));
            }
        }
        if num_millers == 0 {
            return Err(Error::NoMillers);
        }
        if ranges.is_empty() {
            return Err(Error::NoBakers);
        }
        let num_locations = locations.len();
        let mut canonical = Vec::with_capacity(ranges.len());
        for (baker, mut range) in ranges.into_iter().enumerate() {
            if range.is_empty() {
                return Err(Error::EmptyRange { baker });
            }
            if let Some(&location) = range.iter().find(|&&l| l >= num_locations) {
                return Err(Error::UnknownLocation { baker, location, num_locations });
            }
            range.sort_unstable();
            range.dedup();
            canonical.push(range);
        }
        Ok(Self { locations, num_millers, ranges: canonical })
    }

    /// Same as [`Instance::new`] with locations named `l0, l1, …`.
    pub fn with_default_names(num_locations: usize, num_millers: usize, ranges: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(default_location_names(num_locations), num_millers, ranges)
    }

    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn num_millers(&self) -> usize {
        self.num_millers
    }

    pub fn num_bakers(&self) -> usize {
        self.ranges.len()
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn location_name(&self, location: usize) -> &str {
        &self.locations[location]
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    /// Permissible locations of `baker`, strictly increasing.
    pub fn range(&self, baker: usize) -> &[usize] {
        &self.ranges[baker]
    }

    pub fn ranges(&self) -> &[Vec<usize>] {
        &self.ranges
    }

    pub fn can_use(&self, baker: usize, location: usize) -> bool {
        self.ranges[baker].binary_search(&location).is_ok()
    }

    /// The sub-instance on `keep` (in the given order). Bakers with no
    /// permissible location left are dropped; the second return value maps
    /// each remaining baker to its original id.
    pub fn restrict(&self, keep: &[usize]) -> Result<(Instance, Vec<usize>)> {
        let mut new_index = vec![None; self.num_locations()];
        for (i, &l) in keep.iter().enumerate() {
            if l >= self.num_locations() {
                return Err(Error::UnknownLocation { baker: 0, location: l, num_locations: self.num_locations() });
            }
            new_index[l] = Some(i);
        }
        let names = keep.iter().map(|&l| self.locations[l].clone()).collect();
        let mut ranges = Vec::new();
        let mut kept = Vec::new();
        for (b, range) in self.ranges.iter().enumerate() {
            let r: Vec<usize> = range.iter().filter_map(|&l| new_index[l]).collect();
            if !r.is_empty() {
                ranges.push(r);
                kept.push(b);
            }
        }
        if ranges.is_empty() {
            return Err(Error::NoBakers);
        }
        Ok((Instance::new(names, self.num_millers, ranges)?, kept))
    }
}

pub fn default_location_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("l{i}")).collect()
}

/// Baker locations `s` and miller locations `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    pub bakers: Vec<usize>,
    pub millers: Vec<usize>,
}

impl StrategyProfile {
    pub fn new(bakers: Vec<usize>, millers: Vec<usize>) -> Self {
        Self { bakers, millers }
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.bakers.len() != instance.num_bakers() {
            return Err(Error::ProfileLength {
                agents: "baker",
                expected: instance.num_bakers(),
                got: self.bakers.len(),
            });
        }
        if self.millers.len() != instance.num_millers() {
            return Err(Error::ProfileLength {
                agents: "miller",
                expected: instance.num_millers(),
                got: self.millers.len(),
            });
        }
        for (baker, &location) in self.bakers.iter().enumerate() {
            if !instance.can_use(baker, location) {
                return Err(Error::OutsideRange { baker, location });
            }
        }
        for (miller, &location) in self.millers.iter().enumerate() {
            if location >= instance.num_locations() {
                return Err(Error::MillerLocation { miller, location });
            }
        }
        Ok(())
    }

    /// Same profile with millers sorted by location. Millers are
    /// interchangeable, so this is the canonical representative.
    pub fn canonical(&self) -> StrategyProfile {
        let mut millers = self.millers.clone();
        millers.sort_unstable();
        StrategyProfile { bakers: self.bakers.clone(), millers }
    }

    pub fn occupancy(&self, instance: &Instance) -> Occupancy {
        Occupancy::of(instance.num_locations(), &self.bakers, &self.millers)
    }
}

/// Head counts per location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    pub bakers_at: Vec<usize>,
    pub millers_at: Vec<usize>,
}

impl Occupancy {
    pub fn of(num_locations: usize, bakers: &[usize], millers: &[usize]) -> Self {
        Self { bakers_at: counts(num_locations, bakers), millers_at: counts(num_locations, millers) }
    }
}

pub(crate) fn counts(num_locations: usize, locations: &[usize]) -> Vec<usize> {
    let mut out = vec![0; num_locations];
    for &l in locations {
        out[l] += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Baker(usize),
    Miller(usize),
}

/// A strictly improving unilateral move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub agent: Agent,
    pub from: usize,
    pub to: usize,
    pub before: Rational,
    pub after: Rational,
}

fn check_baker(instance: &Instance, profile: &StrategyProfile, baker: usize) -> Result<()> {
    profile.validate(instance)?;
    if baker >= instance.num_bakers() {
        return Err(Error::InvalidBaker(baker));
    }
    Ok(())
}

/// `M_t(s_b) / B_s(s_b)`.
pub fn baker_utility(instance: &Instance, profile: &StrategyProfile, baker: usize) -> Result<Rational> {
    check_baker(instance, profile, baker)?;
    let occ = profile.occupancy(instance);
    let at = profile.bakers[baker];
    Ok(Rational::ratio(occ.millers_at[at] as u64, occ.bakers_at[at] as u64))
}

/// `B_s(t_m) / M_t(t_m)`.
pub fn miller_utility(instance: &Instance, profile: &StrategyProfile, miller: usize) -> Result<Rational> {
    profile.validate(instance)?;
    if miller >= instance.num_millers() {
        return Err(Error::InvalidMiller(miller));
    }
    let occ = profile.occupancy(instance);
    let at = profile.millers[miller];
    Ok(Rational::ratio(occ.bakers_at[at] as u64, occ.millers_at[at] as u64))
}

/// Number of bakers sharing their location with at least one miller.
pub fn coverage(instance: &Instance, profile: &StrategyProfile) -> usize {
    let millers_at = counts(instance.num_locations(), &profile.millers);
    profile.bakers.iter().filter(|&&l| millers_at[l] > 0).count()
}

/// Rosenthal potential `Σ_ℓ M_t(ℓ) · H_{B_s(ℓ)}` with `H_0 = 0`.
pub fn potential_value(instance: &Instance, millers: &[usize], bakers: &[usize]) -> Rational {
    let occ = Occupancy::of(instance.num_locations(), bakers, millers);
    let harmonic = harmonic_table(bakers.len());
    occ.millers_at
        .iter()
        .zip(&occ.bakers_at)
        .filter(|(&m, &b)| m > 0 && b > 0)
        .map(|(&m, &b)| Rational::integer(m as i64) * harmonic[b].clone())
        .sum()
}

/// `a/b < c/d` for positive denominators.
#[inline]
pub(crate) fn ratio_lt(a: usize, b: usize, c: usize, d: usize) -> bool {
    (a as u128) * (d as u128) < (c as u128) * (b as u128)
}

/// First improving baker move, scanning bakers by id and targets in range
/// order.
pub fn baker_deviation(instance: &Instance, profile: &StrategyProfile) -> Option<Deviation> {
    let occ = profile.occupancy(instance);
    for (baker, &from) in profile.bakers.iter().enumerate() {
        let (m, b) = (occ.millers_at[from], occ.bakers_at[from]);
        for &to in instance.range(baker) {
            if to == from {
                continue;
            }
            let (m2, b2) = (occ.millers_at[to], occ.bakers_at[to] + 1);
            if ratio_lt(m, b, m2, b2) {
                return Some(Deviation {
                    agent: Agent::Baker(baker),
                    from,
                    to,
                    before: Rational::ratio(m as u64, b as u64),
                    after: Rational::ratio(m2 as u64, b2 as u64),
                });
            }
        }
    }
    None
}

/// First improving miller move, scanning millers by id and targets by
/// location index.
pub fn miller_deviation(instance: &Instance, profile: &StrategyProfile) -> Option<Deviation> {
    let occ = profile.occupancy(instance);
    for (miller, &from) in profile.millers.iter().enumerate() {
        let (b, m) = (occ.bakers_at[from], occ.millers_at[from]);
        for to in 0..instance.num_locations() {
            if to == from {
                continue;
            }
            let (b2, m2) = (occ.bakers_at[to], occ.millers_at[to] + 1);
            if ratio_lt(b, m, b2, m2) {
                return Some(Deviation {
                    agent: Agent::Miller(miller),
                    from,
                    to,
                    before: Rational::ratio(b as u64, m as u64),
                    after: Rational::ratio(b2 as u64, m2 as u64),
                });
            }
        }
    }
    None
}

pub fn is_baker_equilibrium(instance: &Instance, profile: &StrategyProfile) -> bool {
    baker_deviation(instance, profile).is_none()
}

pub fn is_miller_equilibrium(instance: &Instance, profile: &StrategyProfile) -> bool {
    miller_deviation(instance, profile).is_none()
}

pub fn is_nash_equilibrium(instance: &Instance, profile: &StrategyProfile) -> bool {
    is_baker_equilibrium(instance, profile) && is_miller_equilibrium(instance, profile)
}

/// The two halves of utilitarian welfare: `Σ_b u_b` and `Σ_m u_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Welfare {
    pub bakers: Rational,
    pub millers: Rational,
    pub coverage: usize,
}

impl Welfare {
    pub fn total(&self) -> Rational {
        &self.bakers + &self.millers
    }
}

pub fn welfare(instance: &Instance, profile: &StrategyProfile) -> Welfare {
    let occ = profile.occupancy(instance);
    let bakers =
        profile.bakers.iter().map(|&l| Rational::ratio(occ.millers_at[l] as u64, occ.bakers_at[l] as u64)).sum();
    let millers =
        profile.millers.iter().map(|&l| Rational::ratio(occ.bakers_at[l] as u64, occ.millers_at[l] as u64)).sum();
    Welfare { bakers, millers, coverage: coverage(instance, profile) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    // x=0, y=1, z=2; bakers {x,y},{x,y},{y,z},{z}.
    fn fig1() -> Instance {
        Instance::new(names(&["x", "y", "z"]), 2, vec![vec![0, 1], vec![0, 1], vec![1, 2], vec![2]]).unwrap()
    }

    fn fig1_left() -> StrategyProfile {
        StrategyProfile::new(vec![1, 1, 1, 2], vec![0, 1])
    }

    fn fig1_right() -> StrategyProfile {
        StrategyProfile::new(vec![1, 1, 2, 2], vec![1, 2])
    }

    // Only baker 2 ("b") has both locations.
    fn fig2() -> Instance {
        Instance::new(names(&["x", "y"]), 2, vec![vec![0], vec![0], vec![0, 1], vec![1]]).unwrap()
    }

    fn fig2_left() -> StrategyProfile {
        StrategyProfile::new(vec![0, 0, 0, 1], vec![0, 0])
    }

    fn fig2_right() -> StrategyProfile {
        StrategyProfile::new(vec![0, 0, 1, 1], vec![0, 1])
    }

    #[test]
    fn construction_rejects_bad_instances() {
        assert_eq!(Instance::with_default_names(0, 1, vec![vec![0]]), Err(Error::NoLocations));
        assert_eq!(Instance::with_default_names(1, 0, vec![vec![0]]), Err(Error::NoMillers));
        assert_eq!(Instance::with_default_names(1, 1, vec![]), Err(Error::NoBakers));
        assert_eq!(Instance::with_default_names(2, 1, vec![vec![0], vec![]]), Err(Error::EmptyRange { baker: 1 }));
        assert!(matches!(
            Instance::with_default_names(2, 1, vec![vec![2]]),
            Err(Error::UnknownLocation { baker: 0, location: 2, .. })
        ));
        assert_eq!(Instance::new(names(&["a", "a"]), 1, vec![vec![0]]), Err(Error::DuplicateLocation("a".into())));
    }

    #[test]
    fn ranges_are_canonicalized() {
        let inst = Instance::with_default_names(3, 1, vec![vec![2, 0, 2, 1]]).unwrap();
        assert_eq!(inst.range(0), &[0, 1, 2]);
    }

    #[test]
    fn profile_validation() {
        let inst = fig2();
        assert!(fig2_left().validate(&inst).is_ok());
        let bad = StrategyProfile::new(vec![1, 0, 0, 1], vec![0, 0]);
        assert_eq!(bad.validate(&inst), Err(Error::OutsideRange { baker: 0, location: 1 }));
        let bad = StrategyProfile::new(vec![0, 0, 0, 1], vec![0, 5]);
        assert_eq!(bad.validate(&inst), Err(Error::MillerLocation { miller: 1, location: 5 }));
        let bad = StrategyProfile::new(vec![0, 0, 0], vec![0, 0]);
        assert!(matches!(bad.validate(&inst), Err(Error::ProfileLength { agents: "baker", .. })));
    }

    #[test]
    fn baker_utilities_fig2_left() {
        let (inst, p) = (fig2(), fig2_left());
        for b in 0..3 {
            assert_eq!(baker_utility(&inst, &p, b).unwrap(), Rational::new(2, 3));
        }
        assert_eq!(baker_utility(&inst, &p, 3).unwrap(), Rational::zero());
        assert_eq!(baker_utility(&inst, &p, 4), Err(Error::InvalidBaker(4)));
    }

    #[test]
    fn lone_pair_has_unit_utility() {
        let inst = Instance::with_default_names(1, 1, vec![vec![0]]).unwrap();
        let p = StrategyProfile::new(vec![0], vec![0]);
        assert_eq!(baker_utility(&inst, &p, 0).unwrap(), Rational::one());
        assert_eq!(miller_utility(&inst, &p, 0).unwrap(), Rational::one());
        assert!(is_nash_equilibrium(&inst, &p));
    }

    #[test]
    fn miller_utilities() {
        let (inst, p) = (fig1(), fig1_left());
        assert_eq!(miller_utility(&inst, &p, 0).unwrap(), Rational::zero());
        let dev = miller_deviation(&inst, &p).unwrap();
        assert_eq!(dev.agent, Agent::Miller(0));
        assert_eq!((dev.from, dev.to), (0, 1));
        assert_eq!(dev.after, Rational::new(3, 2));
        // Moving to z instead gives 1.
        let to_z = StrategyProfile::new(p.bakers.clone(), vec![2, 1]);
        assert_eq!(miller_utility(&inst, &to_z, 0).unwrap(), Rational::one());

        let (inst, p) = (fig2(), fig2_right());
        for m in 0..2 {
            assert_eq!(miller_utility(&inst, &p, m).unwrap(), Rational::integer(2));
        }
        assert_eq!(miller_utility(&inst, &p, 2), Err(Error::InvalidMiller(2)));

        let inst = Instance::with_default_names(2, 1, vec![vec![0]]).unwrap();
        let p = StrategyProfile::new(vec![0], vec![1]);
        assert_eq!(miller_utility(&inst, &p, 0).unwrap(), Rational::zero());
    }

    #[test]
    fn coverage_values() {
        assert_eq!(coverage(&fig2(), &fig2_left()), 3);
        assert_eq!(coverage(&fig2(), &fig2_right()), 4);
        let inst = Instance::with_default_names(2, 2, vec![vec![0, 1]; 3]).unwrap();
        assert_eq!(coverage(&inst, &StrategyProfile::new(vec![0; 3], vec![0; 2])), 3);
        assert_eq!(coverage(&inst, &StrategyProfile::new(vec![0; 3], vec![1; 2])), 0);
    }

    #[test]
    fn potential_values() {
        let inst = Instance::with_default_names(1, 1, vec![vec![0], vec![0]]).unwrap();
        assert_eq!(potential_value(&inst, &[0], &[0, 0]), Rational::new(3, 2));
        let inst = Instance::with_default_names(2, 1, vec![vec![0], vec![0]]).unwrap();
        assert_eq!(potential_value(&inst, &[1], &[0, 0]), Rational::zero());
        // millers x:1, y:2, z:0 and one baker on each location.
        let inst = Instance::with_default_names(3, 3, vec![vec![0, 1], vec![1], vec![2]]).unwrap();
        assert_eq!(potential_value(&inst, &[0, 1, 1], &[0, 1, 2]), Rational::integer(3));
    }

    #[test]
    fn equilibrium_predicates_on_figures() {
        assert!(is_nash_equilibrium(&fig1(), &fig1_right()));
        assert!(!is_nash_equilibrium(&fig1(), &fig1_left()));
        assert!(!is_miller_equilibrium(&fig1(), &fig1_left()));
        assert!(is_miller_equilibrium(&fig1(), &fig1_right()));
        for p in [fig2_left(), fig2_right()] {
            assert!(is_baker_equilibrium(&fig2(), &p));
            assert!(is_nash_equilibrium(&fig2(), &p));
        }
    }

    #[test]
    fn baker_witness() {
        let inst = Instance::with_default_names(2, 1, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let p = StrategyProfile::new(vec![1, 1], vec![0]);
        let dev = baker_deviation(&inst, &p).unwrap();
        assert_eq!(dev.agent, Agent::Baker(0));
        assert_eq!((dev.from, dev.to), (1, 0));
        assert_eq!(dev.before, Rational::zero());
        assert_eq!(dev.after, Rational::one());
    }

    #[test]
    fn single_location_single_miller_is_miller_equilibrium() {
        let inst = Instance::with_default_names(1, 1, vec![vec![0], vec![0]]).unwrap();
        assert!(is_miller_equilibrium(&inst, &StrategyProfile::new(vec![0, 0], vec![0])));
    }

    #[test]
    fn welfare_terms_fig2() {
        let w = welfare(&fig2(), &fig2_left());
        assert_eq!(w.bakers, Rational::integer(2));
        assert_eq!(w.millers, Rational::integer(3));
        assert_eq!(w.coverage, 3);
        assert_eq!(w.total(), Rational::integer(5));
    }

    #[test]
    fn restrict_drops_unreachable_bakers() {
        let (sub, kept) = fig1().restrict(&[2, 1]).unwrap();
        assert_eq!(sub.locations(), &["z".to_string(), "y".to_string()]);
        assert_eq!(kept, vec![0, 1, 2, 3]);
        assert_eq!(sub.range(2), &[0, 1]);
        let (sub, kept) = fig1().restrict(&[2]).unwrap();
        assert_eq!(kept, vec![2, 3]);
        assert_eq!(sub.num_bakers(), 2);
    }
}
