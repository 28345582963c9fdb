//! Dinic max-flow on real capacities.
//!
//! Arcs are stored in pairs (`a`, `a ^ 1`); `cap` holds residual capacity.
//! Residuals at or below `eps` count as saturated.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

#[derive(Debug, Default)]
pub(crate) struct Dinic {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    pub(crate) cap: Vec<f64>,
    level: Vec<usize>,
    cursor: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Dinic {
    /// Clears the network and prepares `n` nodes, keeping allocations.
    pub(crate) fn reset(&mut self, n: usize) {
        self.head.clear();
        self.head.resize(n, NIL);
        self.next.clear();
        self.to.clear();
        self.cap.clear();
    }

    /// Adds `u -> v` with capacity `forward` and `v -> u` with capacity
    /// `backward`. Returns the index of the forward arc.
    pub(crate) fn add_arc_pair(&mut self, u: usize, v: usize, forward: f64, backward: f64) -> usize {
        let a = self.to.len();
        self.to.push(v);
        self.cap.push(forward);
        self.next.push(self.head[u]);
        self.head[u] = a;
        self.to.push(u);
        self.cap.push(backward);
        self.next.push(self.head[v]);
        self.head[v] = a + 1;
        a
    }

    fn build_levels(&mut self, s: usize, t: usize, eps: f64) -> bool {
        self.level.clear();
        self.level.resize(self.head.len(), NIL);
        self.level[s] = 0;
        self.queue.clear();
        self.queue.push_back(s);
        while let Some(u) = self.queue.pop_front() {
            let mut a = self.head[u];
            while a != NIL {
                let v = self.to[a];
                if self.cap[a] > eps && self.level[v] == NIL {
                    self.level[v] = self.level[u] + 1;
                    self.queue.push_back(v);
                }
                a = self.next[a];
            }
        }
        self.level[t] != NIL
    }

    /// Runs max-flow from `s` to `t` and returns the flow value.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, eps: f64) -> f64 {
        let mut total = 0.0;
        let mut path: Vec<usize> = Vec::new();
        while self.build_levels(s, t, eps) {
            self.cursor.clear();
            self.cursor.extend_from_slice(&self.head);
            path.clear();
            let mut u = s;
            loop {
                if u == t {
                    let f = path.iter().map(|&a| self.cap[a]).fold(f64::INFINITY, f64::min);
                    for &a in &path {
                        self.cap[a] -= f;
                        self.cap[a ^ 1] += f;
                    }
                    total += f;
                    // back up to the tail of the first saturated arc
                    let k = path.iter().position(|&a| self.cap[a] <= eps).unwrap_or(0);
                    path.truncate(k);
                    u = path.last().map_or(s, |&a| self.to[a]);
                    continue;
                }
                let mut advanced = false;
                while self.cursor[u] != NIL {
                    let a = self.cursor[u];
                    let v = self.to[a];
                    if self.cap[a] > eps && self.level[v] == self.level[u] + 1 {
                        path.push(a);
                        u = v;
                        advanced = true;
                        break;
                    }
                    self.cursor[u] = self.next[a];
                }
                if !advanced {
                    if u == s {
                        break;
                    }
                    // dead end: prune u from this phase
                    self.level[u] = NIL;
                    let a = path.pop().expect("non-source node has an incoming path arc");
                    u = self.to[a ^ 1];
                    self.cursor[u] = self.next[a];
                }
            }
        }
        total
    }

    /// Marks nodes that can still reach `t` through residual arcs. The
    /// complement is the maximal source-side minimum cut.
    pub(crate) fn reaches_sink(&mut self, t: usize, eps: f64) -> Vec<bool> {
        let mut reach = vec![false; self.head.len()];
        reach[t] = true;
        self.queue.clear();
        self.queue.push_back(t);
        while let Some(v) = self.queue.pop_front() {
            let mut b = self.head[v];
            while b != NIL {
                // b runs v -> u, so b ^ 1 runs u -> v
                let u = self.to[b];
                if !reach[u] && self.cap[b ^ 1] > eps {
                    reach[u] = true;
                    self.queue.push_back(u);
                }
                b = self.next[b];
            }
        }
        reach
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        let mut net = Dinic::default();
        net.reset(6);
        for &(u, v, c) in &[
            (0, 1, 10.0),
            (0, 2, 10.0),
            (1, 3, 4.0),
            (1, 4, 8.0),
            (2, 4, 9.0),
            (3, 5, 10.0),
            (4, 3, 6.0),
            (4, 5, 10.0),
        ] {
            net.add_arc_pair(u, v, c, 0.0);
        }
        assert_eq!(net.max_flow(0, 5, 1e-12), 19.0);
    }

    #[test]
    fn disconnected_has_zero_flow() {
        let mut net = Dinic::default();
        net.reset(4);
        net.add_arc_pair(0, 1, 10.0, 0.0);
        net.add_arc_pair(2, 3, 5.0, 0.0);
        assert_eq!(net.max_flow(0, 3, 1e-12), 0.0);
        let reach = net.reaches_sink(3, 1e-12);
        assert_eq!(reach, vec![false, false, true, true]);
    }

    #[test]
    fn undirected_pair_and_cut() {
        // s=0 -> 1 (2.0), 1 <-> 2 (0.5 both ways), 2 -> t=3 (2.0)
        let mut net = Dinic::default();
        net.reset(4);
        net.add_arc_pair(0, 1, 2.0, 0.0);
        let mid = net.add_arc_pair(1, 2, 0.5, 0.5);
        net.add_arc_pair(2, 3, 2.0, 0.0);
        let f = net.max_flow(0, 3, 1e-12);
        assert!((f - 0.5).abs() < 1e-15);
        assert!((net.cap[mid ^ 1] - net.cap[mid] - 1.0).abs() < 1e-15);
        let reach = net.reaches_sink(3, 1e-12);
        assert_eq!(reach, vec![false, false, true, true]);
    }
}
