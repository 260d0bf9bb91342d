//! Dinic's algorithm on integral capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowGraph {
    adj: Vec<Vec<Edge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

/// Handle to an edge added with [`FlowGraph::add_edge`].
#[derive(Debug, Clone, Copy)]
pub struct EdgeRef {
    from: usize,
    idx: usize,
    cap: i64,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes], level: vec![0; nodes], iter: vec![0; nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> EdgeRef {
        let idx = self.adj[from].len();
        let rev = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Edge { to, cap, rev });
        self.adj[to].push(Edge { to: from, cap: 0, rev: idx });
        EdgeRef { from, idx, cap }
    }

    /// Flow currently carried by `e`.
    pub fn flow(&self, e: EdgeRef) -> i64 {
        e.cap - self.adj[e.from][e.idx].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap > 0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: i64) -> i64 {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.adj[v].len() {
            let e = self.adj[v][self.iter[v]];
            if e.cap > 0 && self.level[v] < self.level[e.to] {
                let pushed = self.dfs(e.to, t, limit.min(e.cap));
                if pushed > 0 {
                    self.adj[v][self.iter[v]].cap -= pushed;
                    self.adj[e.to][e.rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}
