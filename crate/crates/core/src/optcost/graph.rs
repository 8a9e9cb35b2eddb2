use std::collections::{HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::monoid::{PlusOp, ValKind, Weight};
use crate::rational::{int, Q};
use crate::timed::ClockValuation;
use crate::wta::WeightedTimedAutomaton;

use super::region::{Corner, Region};
use super::CostBound;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub location: usize,
    pub region: Region,
    pub corner: Corner,
    /// Entered by a discrete step; only such nodes can accept.
    pub fresh: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArcKind {
    /// Time elapses by 0 or 1 unit.
    Delay(u32),
    /// Index into the automaton's edges.
    Discrete(usize),
}

#[derive(Debug, Clone)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub kind: ArcKind,
    pub cost: Q,
}

#[derive(Debug, Clone)]
pub struct CornerPointGraph {
    pub clocks: Vec<String>,
    pub max: Vec<u32>,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
    pub initial: Vec<usize>,
    pub accepting: Vec<usize>,
}

fn finite(w: &Weight, what: &str) -> Result<Option<Q>> {
    match w {
        Weight::Rat(q) => Ok(Some(q.clone())),
        Weight::Inf => Ok(None),
        Weight::Real(_) => Err(Error::Unsupported(format!("{what} has a non-rational weight"))),
    }
}

/// Explores the corner-point abstraction of a priced timed automaton from
/// its initial locations. Locations and edges of weight ∞ are dropped since
/// no finite-cost run uses them.
pub fn build_corner_points(a: &WeightedTimedAutomaton) -> Result<CornerPointGraph> {
    let m = &a.monoid;
    if m.plus != PlusOp::Min || m.val != ValKind::Sum {
        return Err(Error::Unsupported(format!("corner points need the sum monoid, got {}", m.id)));
    }
    let ta = &a.automaton;
    let clocks = ta.clocks.clone();
    let maxc = ta.max_constants();
    let max: Vec<u32> = clocks.iter().map(|c| maxc.get(c).copied().unwrap_or(0)).collect();
    let loc_index: HashMap<&str, usize> = ta.locations.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut rates = Vec::new();
    for l in &ta.locations {
        rates.push(finite(a.location_weight(l), l)?);
    }
    let mut edge_costs = Vec::new();
    for e in &ta.edges {
        edge_costs.push(finite(a.edge_weight(&e.id), &e.id)?);
    }
    let resets: Vec<Vec<usize>> = ta
        .edges
        .iter()
        .map(|e| clocks.iter().enumerate().filter(|(_, c)| e.resets.contains(*c)).map(|(i, _)| i).collect())
        .collect();

    let mut g = CornerPointGraph { clocks: clocks.clone(), max: max.clone(), nodes: vec![], arcs: vec![], initial: vec![], accepting: vec![] };
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |n: Node, g: &mut CornerPointGraph, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(&n) {
            return i;
        }
        let i = g.nodes.len();
        index.insert(n.clone(), i);
        g.nodes.push(n);
        queue.push_back(i);
        i
    };
    for l in &ta.initial {
        let li = loc_index[l.as_str()];
        if rates[li].is_none() {
            continue;
        }
        let n = Node { location: li, region: Region::initial(clocks.len()), corner: vec![0; clocks.len()], fresh: false };
        let i = intern(n, &mut g, &mut queue);
        g.initial.push(i);
    }
    while let Some(i) = queue.pop_front() {
        let node = g.nodes[i].clone();
        let rate = rates[node.location].clone().expect("dropped locations are never interned");
        if let Some(succ) = node.region.successor(&max) {
            if succ.is_corner(&node.corner, &max) {
                let to = intern(Node { region: succ, fresh: false, ..node.clone() }, &mut g, &mut queue);
                g.arcs.push(Arc { from: i, to, kind: ArcKind::Delay(0), cost: Q::zero() });
            }
        }
        if let Some(c) = node.region.diagonal(&node.corner, &max) {
            let to = intern(Node { corner: c, fresh: false, ..node.clone() }, &mut g, &mut queue);
            g.arcs.push(Arc { from: i, to, kind: ArcKind::Delay(1), cost: rate.clone() });
        }
        let rep = node.region.representative(&max);
        let nu = ClockValuation { values: clocks.iter().cloned().zip(rep).collect() };
        for (ei, e) in ta.edges_from(&ta.locations[node.location]) {
            let (Some(cost), Some(_)) = (&edge_costs[ei], &rates[loc_index[e.target.as_str()]]) else {
                continue;
            };
            if !e.guard.is_satisfied(&nu) {
                continue;
            }
            let mut corner = node.corner.clone();
            for &x in &resets[ei] {
                corner[x] = 0;
            }
            let next = Node { location: loc_index[e.target.as_str()], region: node.region.reset(&resets[ei]), corner, fresh: true };
            let to = intern(next, &mut g, &mut queue);
            g.arcs.push(Arc { from: i, to, kind: ArcKind::Discrete(ei), cost: cost.clone() });
        }
    }
    g.accepting = (0..g.nodes.len())
        .filter(|&i| g.nodes[i].fresh && ta.finals.contains(&ta.locations[g.nodes[i].location]))
        .collect();
    Ok(g)
}

/// Shortest-path summary: the bound plus enough structure to extract a path
/// whose cost lies below any target above the bound.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub bound: CostBound,
    /// Arc indices from an initial node to an accepting one. With a
    /// negative cycle this is the prefix up to `cycle`'s first node.
    pub path: Vec<usize>,
    /// A reachable, co-reachable negative cycle and a path from its start
    /// to an accepting node.
    pub cycle: Option<(Vec<usize>, Vec<usize>)>,
}

impl CornerPointGraph {
    fn useful(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut fwd = vec![false; n];
        let mut stack = self.initial.clone();
        let out = self.adjacency(false);
        while let Some(i) = stack.pop() {
            if !std::mem::replace(&mut fwd[i], true) {
                stack.extend(out[i].iter().map(|&a| self.arcs[a].to));
            }
        }
        let mut back = vec![false; n];
        let mut stack = self.accepting.clone();
        let inc = self.adjacency(true);
        while let Some(i) = stack.pop() {
            if !std::mem::replace(&mut back[i], true) {
                stack.extend(inc[i].iter().map(|&a| self.arcs[a].from));
            }
        }
        (0..n).map(|i| fwd[i] && back[i]).collect()
    }

    fn adjacency(&self, reverse: bool) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (k, a) in self.arcs.iter().enumerate() {
            adj[if reverse { a.to } else { a.from }].push(k);
        }
        adj
    }

    /// Breadth-first arc path from any of `from` to any node in `to`.
    fn bfs_path(&self, from: &[usize], to: &[bool], allowed: &[bool]) -> Option<Vec<usize>> {
        let out = self.adjacency(false);
        let mut parent: Vec<Option<Option<usize>>> = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &s in from {
            parent[s] = Some(None);
            queue.push_back(s);
        }
        while let Some(i) = queue.pop_front() {
            if to[i] {
                let mut path = Vec::new();
                let mut cur = i;
                while let Some(Some(a)) = parent[cur] {
                    path.push(a);
                    cur = self.arcs[a].from;
                }
                path.reverse();
                return Some(path);
            }
            for &a in &out[i] {
                let j = self.arcs[a].to;
                if allowed[j] && parent[j].is_none() {
                    parent[j] = Some(Some(a));
                    queue.push_back(j);
                }
            }
        }
        None
    }

    /// Bellman–Ford restricted to nodes that are both reachable and
    /// co-reachable, so any negative cycle it finds makes the infimum −∞.
    pub fn optimum(&self) -> Optimum {
        let useful = self.useful();
        let n = self.nodes.len();
        let mut dist: Vec<Option<Q>> = vec![None; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        for &i in &self.initial {
            if useful[i] {
                dist[i] = Some(Q::zero());
            }
        }
        let live: Vec<usize> = (0..self.arcs.len()).filter(|&k| useful[self.arcs[k].from] && useful[self.arcs[k].to]).collect();
        let rounds = useful.iter().filter(|u| **u).count();
        let mut witness = None;
        for round in 0..=rounds {
            let mut changed = None;
            for &k in &live {
                let a = &self.arcs[k];
                let Some(d) = &dist[a.from] else { continue };
                let nd = d + &a.cost;
                if dist[a.to].as_ref().is_none_or(|old| &nd < old) {
                    dist[a.to] = Some(nd);
                    pred[a.to] = Some(k);
                    changed = Some(a.to);
                }
            }
            match changed {
                None => break,
                Some(v) if round == rounds => witness = Some(v),
                _ => {}
            }
        }
        if let Some(v) = witness {
            let mut x = v;
            for _ in 0..n {
                x = self.arcs[pred[x].expect("relaxed nodes have predecessors")].from;
            }
            let mut cycle = Vec::new();
            let mut cur = x;
            loop {
                let a = pred[cur].expect("cycle nodes have predecessors");
                cycle.push(a);
                cur = self.arcs[a].from;
                if cur == x {
                    break;
                }
            }
            cycle.reverse();
            let target: Vec<bool> = (0..n).map(|i| i == x).collect();
            let prefix = self.bfs_path(&self.initial, &target, &useful).expect("useful nodes are reachable");
            let acc: Vec<bool> = (0..n).map(|i| self.accepting.contains(&i)).collect();
            let suffix = self.bfs_path(&[x], &acc, &useful).expect("useful nodes are co-reachable");
            return Optimum { bound: CostBound::NegInf, path: prefix, cycle: Some((cycle, suffix)) };
        }
        let best = self
            .accepting
            .iter()
            .filter_map(|&i| dist[i].as_ref().map(|d| (i, d)))
            .fold(None::<(usize, &Q)>, |acc, (i, d)| match acc {
                Some((_, b)) if b <= d => acc,
                _ => Some((i, d)),
            });
        let Some((i, d)) = best else {
            return Optimum { bound: CostBound::PosInf, path: vec![], cycle: None };
        };
        let mut path = Vec::new();
        let mut cur = i;
        while let Some(a) = pred[cur] {
            path.push(a);
            cur = self.arcs[a].from;
        }
        path.reverse();
        Optimum { bound: CostBound::Finite(d.clone()), path, cycle: None }
    }

    pub fn path_cost(&self, path: &[usize]) -> Q {
        path.iter().fold(Q::zero(), |acc, &a| acc + &self.arcs[a].cost)
    }

    /// An accepting arc path of cost strictly below `target`, if any.
    pub fn path_below(&self, opt: &Optimum, target: &Q) -> Option<Vec<usize>> {
        match &opt.bound {
            CostBound::PosInf => None,
            CostBound::Finite(b) => (b < target).then(|| opt.path.clone()),
            CostBound::NegInf => {
                let (cycle, suffix) = opt.cycle.as_ref()?;
                let base = self.path_cost(&opt.path) + self.path_cost(suffix);
                let step = -self.path_cost(cycle);
                debug_assert!(step.is_positive());
                let mut k = Q::zero();
                if &base >= target {
                    k = ((&base - target) / &step).floor() + int(1);
                }
                let k: usize = crate::rational::as_u32(&k).expect("pump count fits") as usize;
                let mut path = opt.path.clone();
                for _ in 0..k {
                    path.extend(cycle);
                }
                path.extend(suffix);
                Some(path)
            }
        }
    }
}

/// `inf{||A||(w)}` over non-empty timed words.
pub fn inf_cost(a: &WeightedTimedAutomaton) -> Result<CostBound> {
    Ok(build_corner_points(a)?.optimum().bound)
}
