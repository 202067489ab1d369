//! Integral min-cost flow and the network whose optimal flow maximizes the
//! Rosenthal potential for a fixed miller placement.
//!
//! The kernel is successive shortest paths with node potentials. Initial
//! potentials come from one Bellman-Ford pass, so negative arc costs are
//! fine as long as there is no negative cycle (the potential network is a
//! DAG). Costs are plain integers: the potential network scales its
//! harmonic costs by `lcm(1..=|B|)` and falls back to big integers when that
//! does not fit in `i128`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::model::{counts, Instance};
use crate::rational::{lcm_upto, Rational};
use crate::{Error, Result};

/// Integer cost type usable by [`min_cost_flow`].
pub trait FlowCost:
    Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Mul<Output = Self>
{
    fn from_count(count: u64) -> Self;
    /// `None` when the value does not fit.
    fn from_big(value: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl FlowCost for i64 {
    fn from_count(count: u64) -> Self {
        count as i64
    }
    fn from_big(value: &BigInt) -> Option<Self> {
        value.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl FlowCost for i128 {
    fn from_count(count: u64) -> Self {
        count as i128
    }
    fn from_big(value: &BigInt) -> Option<Self> {
        value.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl FlowCost for BigInt {
    fn from_count(count: u64) -> Self {
        BigInt::from(count)
    }
    fn from_big(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowArc<C> {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
    pub cost: C,
}

/// Directed network with parallel arcs allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork<C> {
    pub num_nodes: usize,
    pub arcs: Vec<FlowArc<C>>,
    pub source: usize,
    pub sink: usize,
}

impl<C: FlowCost> FlowNetwork<C> {
    pub fn new(num_nodes: usize, source: usize, sink: usize) -> Self {
        Self { num_nodes, arcs: Vec::new(), source, sink }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64, cost: C) -> usize {
        self.arcs.push(FlowArc { from, to, capacity, cost });
        self.arcs.len() - 1
    }
}

/// Flow per arc (same order as [`FlowNetwork::arcs`]) and its total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult<C> {
    pub flows: Vec<u64>,
    pub cost: C,
}

impl<C: FlowCost> FlowResult<C> {
    pub fn value(&self, network: &FlowNetwork<C>) -> u64 {
        network.arcs.iter().zip(&self.flows).filter(|(a, _)| a.from == network.source).map(|(_, &f)| f).sum::<u64>()
            - network.arcs.iter().zip(&self.flows).filter(|(a, _)| a.to == network.source).map(|(_, &f)| f).sum::<u64>()
    }
}

struct Residual<C> {
    head: Vec<usize>,
    cap: Vec<u64>,
    cost: Vec<C>,
    adj: Vec<Vec<usize>>,
}

impl<C: FlowCost> Residual<C> {
    // Residual edge 2i is arc `order[i]` forward, 2i+1 its reverse.
    fn build(network: &FlowNetwork<C>, order: &[usize]) -> Self {
        let mut res = Residual {
            head: Vec::with_capacity(2 * order.len()),
            cap: Vec::with_capacity(2 * order.len()),
            cost: Vec::with_capacity(2 * order.len()),
            adj: vec![Vec::new(); network.num_nodes],
        };
        for &i in order {
            let arc = &network.arcs[i];
            let e = res.head.len();
            res.head.push(arc.to);
            res.cap.push(arc.capacity);
            res.cost.push(arc.cost.clone());
            res.adj[arc.from].push(e);
            res.head.push(arc.from);
            res.cap.push(0);
            res.cost.push(-arc.cost.clone());
            res.adj[arc.to].push(e + 1);
        }
        res
    }

    fn tail(&self, e: usize) -> usize {
        self.head[e ^ 1]
    }

    /// Bellman-Ford distances from `source` over edges with capacity.
    fn bellman_ford(&self, source: usize) -> Vec<Option<C>> {
        let n = self.adj.len();
        let mut dist: Vec<Option<C>> = vec![None; n];
        dist[source] = Some(C::zero());
        for _ in 0..n {
            let mut changed = false;
            for e in 0..self.head.len() {
                if self.cap[e] == 0 {
                    continue;
                }
                let Some(du) = dist[self.tail(e)].clone() else { continue };
                let cand = du + self.cost[e].clone();
                let v = self.head[e];
                if dist[v].as_ref().is_none_or(|dv| cand < *dv) {
                    dist[v] = Some(cand);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Dijkstra on reduced costs. Returns distances and the edge used to
    /// reach each node.
    fn dijkstra(&self, source: usize, potential: &[Option<C>]) -> (Vec<Option<C>>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist: Vec<Option<C>> = vec![None; n];
        let mut parent = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(C::zero());
        heap.push(Reverse((C::zero(), source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let pu = potential[u].clone().expect("reached nodes have potentials");
            for &e in &self.adj[u] {
                if self.cap[e] == 0 {
                    continue;
                }
                let v = self.head[e];
                let Some(pv) = potential[v].clone() else { continue };
                let reduced = self.cost[e].clone() + pu.clone() - pv;
                let cand = d.clone() + reduced;
                if dist[v].as_ref().is_none_or(|dv| cand < *dv) {
                    dist[v] = Some(cand.clone());
                    parent[v] = Some(e);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
        (dist, parent)
    }
}

/// Minimum-cost integral flow of exactly `required` units from source to
/// sink.
///
/// Arcs are processed in `(from, to, cost, capacity)` order, so the flow
/// returned does not depend on how parallel arcs are listed.
pub fn min_cost_flow<C: FlowCost>(network: &FlowNetwork<C>, required: u64) -> Result<FlowResult<C>> {
    let mut order: Vec<usize> = (0..network.arcs.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&network.arcs[a], &network.arcs[b]);
        (x.from, x.to, &x.cost, x.capacity, a).cmp(&(y.from, y.to, &y.cost, y.capacity, b))
    });
    let mut res = Residual::build(network, &order);
    let (s, t) = (network.source, network.sink);

    let mut potential = res.bellman_ford(s);
    let mut sent = 0u64;
    while sent < required {
        let (dist, parent) = res.dijkstra(s, &potential);
        if dist[t].is_none() {
            return Err(Error::Infeasible { required, achieved: sent });
        }
        for (p, d) in potential.iter_mut().zip(&dist) {
            if let (Some(p), Some(d)) = (p.as_mut(), d) {
                *p = p.clone() + d.clone();
            }
        }
        let mut push = required - sent;
        let mut v = t;
        while v != s {
            let e = parent[v].expect("path to sink");
            push = push.min(res.cap[e]);
            v = res.tail(e);
        }
        let mut v = t;
        while v != s {
            let e = parent[v].expect("path to sink");
            res.cap[e] -= push;
            res.cap[e ^ 1] += push;
            v = res.tail(e);
        }
        sent += push;
    }

    let mut flows = vec![0u64; network.arcs.len()];
    let mut cost = C::zero();
    for (slot, &i) in order.iter().enumerate() {
        let f = res.cap[2 * slot + 1];
        flows[i] = f;
        if f > 0 {
            cost = cost + C::from_count(f) * network.arcs[i].cost.clone();
        }
    }
    Ok(FlowResult { flows, cost })
}

/// Flow network for maximizing `Φ_t(s) = Σ_ℓ M_t(ℓ)·H_{B_s(ℓ)}` over baker
/// assignments `s`.
///
/// Nodes: source `0`, bakers `1..=|B|`, locations after the bakers, sink last.
/// Every location has `|B|` parallel unit arcs to the sink with costs
/// `-M_t(ℓ)·scale/k` for `k = 1..=|B|`, where `scale = lcm(1..=|B|)`.
#[derive(Debug, Clone)]
pub struct PotentialNetwork<C> {
    pub network: FlowNetwork<C>,
    pub scale: BigInt,
    pub num_bakers: usize,
    /// `(baker, location, arc index)` for every baker-to-location arc.
    pub assignment_arcs: Vec<(usize, usize, usize)>,
    /// Arc indices of the sink arcs of each location, `k = 1..=|B|` in order.
    pub sink_arcs: Vec<Vec<usize>>,
}

impl<C: FlowCost> PotentialNetwork<C> {
    pub fn baker_node(&self, baker: usize) -> usize {
        1 + baker
    }

    pub fn location_node(&self, location: usize) -> usize {
        1 + self.num_bakers + location
    }

    /// `Φ = -cost / scale`.
    pub fn potential_of(&self, result: &FlowResult<C>) -> Rational {
        Rational::from_big(-result.cost.to_big(), self.scale.clone())
    }
}

/// Builds the potential network; `None` when a scaled cost overflows `C`.
pub fn build_potential_network<C: FlowCost>(instance: &Instance, millers: &[usize]) -> Option<PotentialNetwork<C>> {
    let nb = instance.num_bakers();
    let nl = instance.num_locations();
    let source = 0;
    let sink = nb + nl + 1;
    let mut network = FlowNetwork::new(nb + nl + 2, source, sink);
    let scale = lcm_upto(nb);

    for b in 0..nb {
        network.add_arc(source, 1 + b, 1, C::zero());
    }
    let mut assignment_arcs = Vec::new();
    for b in 0..nb {
        for &l in instance.range(b) {
            let arc = network.add_arc(1 + b, 1 + nb + l, 1, C::zero());
            assignment_arcs.push((b, l, arc));
        }
    }
    let millers_at = counts(nl, millers);
    let mut sink_arcs = Vec::with_capacity(nl);
    for (l, &m) in millers_at.iter().enumerate() {
        let mut arcs = Vec::with_capacity(nb);
        for k in 1..=nb {
            let cost = -(BigInt::from(m) * &scale / BigInt::from(k));
            arcs.push(network.add_arc(1 + nb + l, sink, 1, C::from_big(&cost)?));
        }
        sink_arcs.push(arcs);
    }
    // Total cost is bounded by |B| · max|cost|; make sure that fits too.
    let worst = BigInt::from(millers.len()) * &scale * BigInt::from(nb.max(1));
    C::from_big(&worst)?;
    Some(PotentialNetwork { network, scale, num_bakers: nb, assignment_arcs, sink_arcs })
}

/// Reads the baker assignment off a flow that places every baker.
pub fn extract_baker_profile<C: FlowCost>(
    instance: &Instance,
    potential: &PotentialNetwork<C>,
    result: &FlowResult<C>,
) -> Result<Vec<usize>> {
    let mut placed: Vec<Option<usize>> = vec![None; instance.num_bakers()];
    for &(b, l, arc) in &potential.assignment_arcs {
        match result.flows[arc] {
            0 => {}
            1 if placed[b].is_none() => placed[b] = Some(l),
            _ => return Err(Error::UnplacedBaker(b)),
        }
    }
    placed.into_iter().enumerate().map(|(b, l)| l.ok_or(Error::UnplacedBaker(b))).collect()
}

/// A baker assignment maximizing `Φ_t` together with the maximum value.
pub fn maximize_potential(instance: &Instance, millers: &[usize]) -> Result<(Vec<usize>, Rational)> {
    match build_potential_network::<i128>(instance, millers) {
        Some(net) => solve_potential(instance, &net),
        None => {
            let net = build_potential_network::<BigInt>(instance, millers).expect("big integers never overflow");
            solve_potential(instance, &net)
        }
    }
}

fn solve_potential<C: FlowCost>(instance: &Instance, net: &PotentialNetwork<C>) -> Result<(Vec<usize>, Rational)> {
    let result = min_cost_flow(&net.network, instance.num_bakers() as u64)?;
    let bakers = extract_baker_profile(instance, net, &result)?;
    Ok((bakers, net.potential_of(&result)))
}
