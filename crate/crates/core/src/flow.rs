//! Flow networks with exact rational capacities.
//!
//! Max-flow is Edmonds–Karp (BFS augmenting paths); min-cost flow is
//! successive shortest paths with Bellman–Ford on float costs. Flow amounts
//! are always exact.

use std::collections::VecDeque;

use crate::rational::RationalWeight;

#[derive(Debug, Clone)]
struct Arc_ {
    to: usize,
    residual: RationalWeight,
    cost: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc_>,
    capacity: Vec<RationalWeight>,
    adj: Vec<Vec<usize>>,
}

/// Handle to a forward arc, used to read back its flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcId(usize);

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            capacity: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: RationalWeight) -> ArcId {
        self.add_arc_with_cost(from, to, cap, 0.0)
    }

    pub fn add_arc_with_cost(&mut self, from: usize, to: usize, cap: RationalWeight, cost: f64) -> ArcId {
        let id = self.arcs.len();
        self.arcs.push(Arc_ {
            to,
            residual: cap.clone(),
            cost,
        });
        self.arcs.push(Arc_ {
            to: from,
            residual: RationalWeight::zero(),
            cost: -cost,
        });
        self.capacity.push(cap);
        self.capacity.push(RationalWeight::zero());
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        ArcId(id)
    }

    pub fn flow(&self, arc: ArcId) -> RationalWeight {
        &self.capacity[arc.0] - &self.arcs[arc.0].residual
    }

    fn push(&mut self, arc: usize, amount: &RationalWeight) {
        self.arcs[arc].residual -= amount;
        self.arcs[arc ^ 1].residual += amount;
    }

    fn augment_along(&mut self, pred: &[Option<usize>], source: usize, sink: usize) -> RationalWeight {
        let mut bottleneck: Option<RationalWeight> = None;
        let mut v = sink;
        while v != source {
            let a = pred[v].expect("path reaches the sink");
            let r = &self.arcs[a].residual;
            bottleneck = Some(match bottleneck {
                Some(b) if &b <= r => b,
                _ => r.clone(),
            });
            v = self.arcs[a ^ 1].to;
        }
        let amount = bottleneck.unwrap_or_default();
        let mut v = sink;
        while v != source {
            let a = pred[v].expect("path reaches the sink");
            self.push(a, &amount);
            v = self.arcs[a ^ 1].to;
        }
        amount
    }

    /// Maximum flow value from `source` to `sink`.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> RationalWeight {
        let mut total = RationalWeight::zero();
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.residual.is_positive() && !seen[arc.to] {
                        seen[arc.to] = true;
                        pred[arc.to] = Some(a);
                        queue.push_back(arc.to);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            total += self.augment_along(&pred, source, sink);
        }
    }

    /// Sends as much flow as possible (up to `limit`, if given) along
    /// successively cheapest paths. Returns the amount sent.
    pub fn min_cost_flow(&mut self, source: usize, sink: usize, limit: Option<&RationalWeight>) -> RationalWeight {
        let n = self.adj.len();
        let mut sent = RationalWeight::zero();
        loop {
            if let Some(l) = limit {
                if &sent >= l {
                    return sent;
                }
            }
            let mut dist = vec![f64::INFINITY; n];
            let mut pred: Vec<Option<usize>> = vec![None; n];
            dist[source] = 0.0;
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    if dist[u].is_infinite() {
                        continue;
                    }
                    for &a in &self.adj[u] {
                        let arc = &self.arcs[a];
                        if !arc.residual.is_positive() {
                            continue;
                        }
                        let cand = dist[u] + arc.cost;
                        let cur = dist[arc.to];
                        if cur.is_infinite() || cand < cur - 1e-12 * (1.0 + cur.abs()) {
                            dist[arc.to] = cand;
                            pred[arc.to] = Some(a);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if pred[sink].is_none() {
                return sent;
            }
            let mut amount = self.path_bottleneck(&pred, source, sink);
            if let Some(l) = limit {
                let rest = l - &sent;
                if rest < amount {
                    amount = rest;
                }
            }
            let mut v = sink;
            while v != source {
                let a = pred[v].expect("path reaches the sink");
                self.push(a, &amount);
                v = self.arcs[a ^ 1].to;
            }
            sent += amount;
        }
    }

    fn path_bottleneck(&self, pred: &[Option<usize>], source: usize, sink: usize) -> RationalWeight {
        let mut best: Option<RationalWeight> = None;
        let mut v = sink;
        while v != source {
            let a = pred[v].expect("path reaches the sink");
            let r = &self.arcs[a].residual;
            if best.as_ref().is_none_or(|b| r < b) {
                best = Some(r.clone());
            }
            v = self.arcs[a ^ 1].to;
        }
        best.unwrap_or_default()
    }
}
