//! Improving-response dynamics, including the weighted extension.
//!
//! In the weighted game head counts become weight sums: a baker at `ℓ` earns
//! `(miller weight at ℓ) / (baker weight at ℓ)` and a miller the inverse.
//! With unit weights this is exactly the game in [`crate::model`].
//!
//! States are compared by their per-location multisets of agent weights, so
//! swapping two interchangeable agents never hides a revisit. Optionally the
//! comparison also quotients out location relabelings that map the instance
//! onto itself. A revisit under such a relabeling `π` still means the game
//! cycles: replaying the same moves through `π, π², …` closes an exact cycle
//! (see [`unroll_cycle`]).

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Instance, StrategyProfile};
use crate::rational::Rational;
use crate::{Error, Result};

/// An instance with positive integer weights on every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedInstance {
    instance: Instance,
    baker_weights: Vec<u64>,
    miller_weights: Vec<u64>,
}

impl WeightedInstance {
    pub fn new(instance: Instance, baker_weights: Vec<u64>, miller_weights: Vec<u64>) -> Result<Self> {
        check_weights("baker", instance.num_bakers(), &baker_weights)?;
        check_weights("miller", instance.num_millers(), &miller_weights)?;
        Ok(Self { instance, baker_weights, miller_weights })
    }

    /// Every weight 1.
    pub fn unweighted(instance: Instance) -> Self {
        let baker_weights = vec![1; instance.num_bakers()];
        let miller_weights = vec![1; instance.num_millers()];
        Self { instance, baker_weights, miller_weights }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn into_instance(self) -> Instance {
        self.instance
    }

    pub fn baker_weights(&self) -> &[u64] {
        &self.baker_weights
    }

    pub fn miller_weights(&self) -> &[u64] {
        &self.miller_weights
    }

    pub fn is_unit(&self) -> bool {
        self.baker_weights.iter().chain(&self.miller_weights).all(|&w| w == 1)
    }

    fn loads(&self, profile: &StrategyProfile) -> (Vec<u64>, Vec<u64>) {
        let n = self.instance.num_locations();
        let mut bakers = vec![0u64; n];
        let mut millers = vec![0u64; n];
        for (b, &l) in profile.bakers.iter().enumerate() {
            bakers[l] += self.baker_weights[b];
        }
        for (m, &l) in profile.millers.iter().enumerate() {
            millers[l] += self.miller_weights[m];
        }
        (bakers, millers)
    }
}

fn check_weights(agents: &'static str, expected: usize, weights: &[u64]) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::WeightCount { agents, expected, got: weights.len() });
    }
    if let Some(index) = weights.iter().position(|&w| w == 0) {
        return Err(Error::ZeroWeight { agents, index });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Baker,
    Miller,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Baker => "baker",
            AgentKind::Miller => "miller",
        }
    }
}

/// One improving move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: AgentKind,
    pub agent: usize,
    pub from: usize,
    pub to: usize,
    pub before: Rational,
    pub after: Rational,
}

/// A move named by agent kind, origin and weight rather than agent id. The
/// lowest-id matching agent moves; `weight: None` matches any weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedMove {
    pub kind: AgentKind,
    pub from: usize,
    pub to: usize,
    pub weight: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    BakersFirst,
    MillersFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    /// First improving move in scan order: agents by id, targets by range
    /// order (bakers) or location index (millers).
    FirstImproving(ScanOrder),
    /// Largest utility gain; earliest in bakers-first scan order on ties.
    BestImproving,
    Scripted(Vec<ScriptedMove>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedUtilities {
    pub bakers: Vec<Rational>,
    pub millers: Vec<Rational>,
}

pub fn weighted_utilities(w: &WeightedInstance, profile: &StrategyProfile) -> Result<WeightedUtilities> {
    profile.validate(&w.instance)?;
    let (bl, ml) = w.loads(profile);
    Ok(WeightedUtilities {
        bakers: profile.bakers.iter().map(|&l| Rational::ratio(ml[l], bl[l])).collect(),
        millers: profile.millers.iter().map(|&l| Rational::ratio(bl[l], ml[l])).collect(),
    })
}

fn evaluate(
    w: &WeightedInstance,
    loads: &(Vec<u64>, Vec<u64>),
    kind: AgentKind,
    agent: usize,
    from: usize,
    to: usize,
) -> Move {
    let (bl, ml) = loads;
    let (before, after) = match kind {
        AgentKind::Baker => {
            let wt = w.baker_weights[agent];
            (Rational::ratio(ml[from], bl[from]), Rational::ratio(ml[to], bl[to] + wt))
        }
        AgentKind::Miller => {
            let wt = w.miller_weights[agent];
            (Rational::ratio(bl[from], ml[from]), Rational::ratio(bl[to], ml[to] + wt))
        }
    };
    Move { kind, agent, from, to, before, after }
}

/// Every candidate unilateral move in bakers-first scan order.
fn candidates(
    w: &WeightedInstance,
    profile: &StrategyProfile,
    order: ScanOrder,
) -> Vec<(AgentKind, usize, usize, usize)> {
    let mut bakers = Vec::new();
    for (b, &from) in profile.bakers.iter().enumerate() {
        for &to in w.instance.range(b) {
            if to != from {
                bakers.push((AgentKind::Baker, b, from, to));
            }
        }
    }
    let mut millers = Vec::new();
    for (m, &from) in profile.millers.iter().enumerate() {
        for to in (0..w.instance.num_locations()).filter(|&to| to != from) {
            millers.push((AgentKind::Miller, m, from, to));
        }
    }
    match order {
        ScanOrder::BakersFirst => bakers.extend(millers),
        ScanOrder::MillersFirst => {
            millers.extend(bakers);
            return millers;
        }
    }
    bakers
}

/// The next move under `policy`, or `None` when no agent wants to move
/// (or the script has no step `step`).
pub fn step_improving(
    w: &WeightedInstance,
    profile: &StrategyProfile,
    policy: &Policy,
    step: usize,
) -> Result<Option<Move>> {
    profile.validate(&w.instance)?;
    let loads = w.loads(profile);
    match policy {
        Policy::FirstImproving(order) => Ok(candidates(w, profile, *order)
            .into_iter()
            .map(|(k, a, f, t)| evaluate(w, &loads, k, a, f, t))
            .find(|mv| mv.after > mv.before)),
        Policy::BestImproving => {
            let mut best: Option<(Rational, Move)> = None;
            for (k, a, f, t) in candidates(w, profile, ScanOrder::BakersFirst) {
                let mv = evaluate(w, &loads, k, a, f, t);
                if mv.after > mv.before {
                    let gain = &mv.after - &mv.before;
                    if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                        best = Some((gain, mv));
                    }
                }
            }
            Ok(best.map(|(_, mv)| mv))
        }
        Policy::Scripted(script) => {
            let Some(sm) = script.get(step) else { return Ok(None) };
            let agent = match sm.kind {
                AgentKind::Baker => (0..profile.bakers.len()).find(|&b| {
                    profile.bakers[b] == sm.from
                        && sm.weight.is_none_or(|wt| w.baker_weights[b] == wt)
                        && w.instance.can_use(b, sm.to)
                }),
                AgentKind::Miller => (0..profile.millers.len())
                    .find(|&m| profile.millers[m] == sm.from && sm.weight.is_none_or(|wt| w.miller_weights[m] == wt)),
            };
            let agent = match agent {
                Some(a) if sm.to < w.instance.num_locations() && sm.to != sm.from => a,
                _ => return Err(Error::ScriptNoAgent { step, kind: sm.kind.name(), from: sm.from, to: sm.to }),
            };
            let mv = evaluate(w, &loads, sm.kind, agent, sm.from, sm.to);
            if mv.after <= mv.before {
                return Err(Error::ScriptNotImproving {
                    step,
                    kind: sm.kind.name(),
                    agent,
                    from: sm.from,
                    to: sm.to,
                    before: mv.before.to_string(),
                    after: mv.after.to_string(),
                });
            }
            Ok(Some(mv))
        }
    }
}

pub fn apply_move(profile: &mut StrategyProfile, mv: &Move) {
    match mv.kind {
        AgentKind::Baker => profile.bakers[mv.agent] = mv.to,
        AgentKind::Miller => profile.millers[mv.agent] = mv.to,
    }
}

/// How revisits are recognized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleCheck {
    /// Same weight multisets on every location.
    Exact,
    /// Same up to a location relabeling that maps the instance onto itself.
    UpToRelabeling,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// No agent has an improving move.
    Converged,
    /// The state after the last move equals the state after `revisit` moves.
    /// `relabeling[l]` is where location `l`'s agents reappear; `None` means
    /// an exact revisit.
    Cycle {
        revisit: usize,
        relabeling: Option<Vec<usize>>,
    },
    BudgetExhausted,
    /// A script ran out of moves before a revisit or an equilibrium.
    ScriptEnded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub initial: StrategyProfile,
    pub moves: Vec<Move>,
    pub terminal: StrategyProfile,
    pub status: Termination,
}

impl DynamicsTrace {
    pub fn states(&self) -> Vec<StrategyProfile> {
        let mut out = vec![self.initial.clone()];
        let mut p = self.initial.clone();
        for mv in &self.moves {
            apply_move(&mut p, mv);
            out.push(p.clone());
        }
        out
    }
}

type StateKey = Vec<(Vec<u64>, Vec<u64>)>;

/// Per-location sorted weight multisets.
pub fn state_key(w: &WeightedInstance, profile: &StrategyProfile) -> StateKey {
    let mut key: StateKey = vec![(Vec::new(), Vec::new()); w.instance.num_locations()];
    for (b, &l) in profile.bakers.iter().enumerate() {
        key[l].0.push(w.baker_weights[b]);
    }
    for (m, &l) in profile.millers.iter().enumerate() {
        key[l].1.push(w.miller_weights[m]);
    }
    for slot in &mut key {
        slot.0.sort_unstable();
        slot.1.sort_unstable();
    }
    key
}

fn relabel_key(key: &StateKey, perm: &[usize]) -> StateKey {
    let mut out = vec![(Vec::new(), Vec::new()); key.len()];
    for (l, slot) in key.iter().enumerate() {
        out[perm[l]] = slot.clone();
    }
    out
}

/// Location relabelings are only searched up to this many locations.
pub const MAX_RELABELING_LOCATIONS: usize = 7;

/// Location permutations `π` under which the weighted instance is unchanged:
/// the multiset of `(weight, π(range))` over bakers is preserved. Millers are
/// unrestricted, so they impose nothing. Always contains the identity; only
/// the identity is returned above [`MAX_RELABELING_LOCATIONS`].
pub fn location_automorphisms(w: &WeightedInstance) -> Vec<Vec<usize>> {
    let n = w.instance.num_locations();
    let identity: Vec<usize> = (0..n).collect();
    if n > MAX_RELABELING_LOCATIONS {
        return vec![identity];
    }
    let signature = |perm: &[usize]| {
        let mut sig: Vec<(u64, Vec<usize>)> = w
            .instance
            .ranges()
            .iter()
            .zip(&w.baker_weights)
            .map(|(r, &wt)| {
                let mut mapped: Vec<usize> = r.iter().map(|&l| perm[l]).collect();
                mapped.sort_unstable();
                (wt, mapped)
            })
            .collect();
        sig.sort();
        sig
    };
    let base = signature(&identity);
    let mut out = Vec::new();
    let mut perm = identity;
    loop {
        if signature(&perm) == base {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("a larger element exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Iterates `policy` from `start` for at most `budget` moves, stopping at an
/// equilibrium or the first revisited state.
pub fn run_dynamics(
    w: &WeightedInstance,
    start: &StrategyProfile,
    policy: &Policy,
    budget: usize,
    check: CycleCheck,
) -> Result<DynamicsTrace> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    start.validate(&w.instance)?;
    let automorphisms = match check {
        CycleCheck::Exact => vec![(0..w.instance.num_locations()).collect()],
        CycleCheck::UpToRelabeling => location_automorphisms(w),
    };
    let canonical = |key: &StateKey| automorphisms.iter().map(|p| relabel_key(key, p)).min().expect("identity");

    let mut keys = vec![state_key(w, start)];
    let mut seen: BTreeMap<StateKey, usize> = BTreeMap::new();
    seen.insert(canonical(&keys[0]), 0);
    let mut profile = start.clone();
    let mut moves = Vec::new();

    let status = loop {
        if moves.len() == budget {
            break Termination::BudgetExhausted;
        }
        let Some(mv) = step_improving(w, &profile, policy, moves.len())? else {
            let can_improve = matches!(policy, Policy::Scripted(_))
                && step_improving(w, &profile, &Policy::FirstImproving(ScanOrder::BakersFirst), 0)?.is_some();
            break if can_improve { Termination::ScriptEnded } else { Termination::Converged };
        };
        apply_move(&mut profile, &mv);
        moves.push(mv);
        let key = state_key(w, &profile);
        if let Some(&revisit) = seen.get(&canonical(&key)) {
            let relabeling = if key == keys[revisit] {
                None
            } else {
                automorphisms.iter().find(|p| relabel_key(&keys[revisit], p) == key).cloned()
            };
            break Termination::Cycle { revisit, relabeling };
        }
        seen.insert(canonical(&key), moves.len());
        keys.push(key);
    };
    Ok(DynamicsTrace { initial: start.clone(), moves, terminal: profile, status })
}

/// Turns a script that returns to its start up to `relabeling` into one
/// that returns exactly, by replaying it through successive powers of the
/// relabeling until the identity comes back.
pub fn unroll_cycle(script: &[ScriptedMove], relabeling: &[usize]) -> Vec<ScriptedMove> {
    let mut out = Vec::new();
    let mut power: Vec<usize> = (0..relabeling.len()).collect();
    loop {
        out.extend(script.iter().map(|m| ScriptedMove { from: power[m.from], to: power[m.to], ..m.clone() }));
        power = power.iter().map(|&l| relabeling[l]).collect();
        if power.iter().enumerate().all(|(i, &l)| i == l) {
            return out;
        }
    }
}
