//! Maximum clique on a separation graph: greedy coloring bound with
//! branch and bound, after Tomita's MCQ.

use fixedbitset::FixedBitSet;

pub(crate) struct Graph {
    pub adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }
}

/// Maximal (not maximum) clique taken in index order.
pub(crate) fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for v in 0..g.len() {
        if chosen.iter().all(|&u| g.adjacent(u, v)) {
            chosen.push(v);
        }
    }
    chosen
}

pub(crate) struct Search<'a> {
    g: &'a Graph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

/// Maximum clique, seeded with `seed`. The flag is false if the node budget
/// ran out, in which case the clique is only the best one found.
pub(crate) fn max_clique(g: &Graph, seed: Vec<usize>, budget: u64) -> (Vec<usize>, bool) {
    let mut s = Search {
        g,
        best: seed,
        nodes: 0,
        budget,
        exhausted: false,
    };
    let mut all = FixedBitSet::with_capacity(g.len());
    all.insert_range(..);
    let mut r = Vec::new();
    s.expand(&mut r, all);
    (s.best, !s.exhausted)
}

impl Search<'_> {
    /// Vertices of `p` in color order with their color numbers; a clique
    /// inside the first `i` vertices has at most `colors[i-1]` members.
    fn color_sort(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = p.clone();
        let mut order = Vec::with_capacity(p.count_ones(..));
        let mut colors = Vec::with_capacity(order.capacity());
        let mut k = 0;
        while !uncolored.is_clear() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.ones().next() {
                q.set(v, false);
                q.difference_with(&self.g.adj[v]);
                uncolored.set(v, false);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: FixedBitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let (order, colors) = self.color_sort(&p);
        for i in (0..order.len()).rev() {
            if r.len() + colors[i] <= self.best.len() || self.exhausted {
                return;
            }
            let v = order[i];
            r.push(v);
            let mut next = p.clone();
            next.intersect_with(&self.g.adj[v]);
            if next.is_clear() {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p.set(v, false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Graph { adj }
    }

    fn brute(g: &Graph) -> usize {
        let n = g.len();
        (0u32..1 << n)
            .filter(|&m| {
                (0..n).all(|a| (0..n).all(|b| a == b || m >> a & 1 == 0 || m >> b & 1 == 0 || g.adjacent(a, b)))
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_graphs() {
        let pentagon = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(max_clique(&pentagon, vec![], u64::MAX).0.len(), 2);
        let k4 = graph(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5)]);
        let (c, exact) = max_clique(&k4, vec![], u64::MAX);
        assert!(exact);
        assert_eq!(c.len(), 4);
        assert_eq!(max_clique(&graph(3, &[]), vec![], u64::MAX).0.len(), 1);
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=14);
            let p = rng.gen_range(0.1..0.9);
            let edges: Vec<_> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let g = graph(n, &edges);
            let greedy = greedy_clique(&g);
            let (c, exact) = max_clique(&g, greedy.clone(), u64::MAX);
            assert!(exact);
            assert!(greedy.len() <= c.len());
            assert_eq!(c.len(), brute(&g));
            for &a in &c {
                for &b in &c {
                    assert!(a == b || g.adjacent(a, b));
                }
            }
        }
    }
}
