//! Clique engines over bitset graphs: full maximal-clique enumeration
//! (Bron-Kerbosch with pivoting and a degeneracy-ordered top level),
//! threshold-weighted clique search with exact rational weights, and exact
//! maximum-clique / independence numbers via branch and bound with a greedy
//! coloring bound.
//!
//! All searches are sequential and fully deterministic: identical inputs
//! produce identical outputs and identical visit orders.

use alloc::{boxed::Box, vec, vec::Vec};
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scenario::Graph;
use crate::Rational;

/// Enumeration budget. `max_cliques` bounds how many cliques (or search
/// nodes, for the branch-and-bound searches) may be produced; `should_abort`
/// is polled periodically so callers with access to a clock can impose
/// wall-time limits.
pub struct SearchBudget {
    pub max_cliques: u64,
    pub should_abort: Option<Box<dyn FnMut() -> bool + Send>>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_cliques: 100_000_000, should_abort: None }
    }
}

impl SearchBudget {
    pub fn with_max_cliques(max_cliques: u64) -> Self {
        SearchBudget { max_cliques, ..Default::default() }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchError {
    /// The configured clique/node budget ran out before the search finished.
    BudgetExceeded { emitted: u64 },
    /// The abort hook (wall-clock budget) fired.
    Aborted,
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::BudgetExceeded { emitted } => {
                write!(f, "search budget exceeded after {emitted} cliques")
            }
            SearchError::Aborted => write!(f, "search aborted by wall-clock budget"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SearchError {}

#[inline]
fn intersect_into(dst: &mut [u64], a: &[u64], b: &[u64]) {
    for ((d, &x), &y) in dst.iter_mut().zip(a).zip(b) {
        *d = x & y;
    }
}

#[inline]
fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
fn intersection_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(&x, &y)| (x & y).count_ones() as usize).sum()
}

#[inline]
fn is_empty(bits: &[u64]) -> bool {
    bits.iter().all(|&w| w == 0)
}

#[inline]
fn clear_bit(bits: &mut [u64], v: usize) {
    bits[v / 64] &= !(1 << (v % 64));
}

#[inline]
fn set_bit(bits: &mut [u64], v: usize) {
    bits[v / 64] |= 1 << (v % 64);
}

fn for_each_bit(bits: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in bits.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            f(wi * 64 + b);
            w &= w - 1;
        }
    }
}

/// Degeneracy ordering: repeatedly remove a vertex of minimum remaining
/// degree (lowest index on ties).
fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let words = g.words_per_row();
    let mut alive = vec![!0u64; words.max(1)];
    if n % 64 != 0 && words > 0 {
        alive[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut removed = vec![false; n];
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_v = 0;
        for v in 0..n {
            if !removed[v] && deg[v] < best {
                best = deg[v];
                best_v = v;
            }
        }
        order.push(best_v);
        removed[best_v] = true;
        clear_bit(&mut alive, best_v);
        for_each_bit(g.row(best_v), |u| {
            if !removed[u] {
                deg[u] -= 1;
            }
        });
    }
    order
}

struct Enumerator<'a, F> {
    g: &'a Graph,
    words: usize,
    scratch: Vec<Vec<u64>>,
    clique: Vec<usize>,
    emitted: u64,
    budget: &'a mut SearchBudget,
    poll: u32,
    visit: F,
}

impl<'a, F: FnMut(&[usize])> Enumerator<'a, F> {
    fn poll_abort(&mut self) -> Result<(), SearchError> {
        self.poll = self.poll.wrapping_add(1);
        if self.poll % 1024 == 0 {
            if let Some(hook) = self.budget.should_abort.as_mut() {
                if hook() {
                    return Err(SearchError::Aborted);
                }
            }
        }
        Ok(())
    }

    fn expand(&mut self, p: &mut [u64], x: &mut [u64], depth: usize) -> Result<(), SearchError> {
        if is_empty(p) && is_empty(x) {
            if self.emitted >= self.budget.max_cliques {
                return Err(SearchError::BudgetExceeded { emitted: self.emitted });
            }
            self.emitted += 1;
            let mut sorted = self.clique.clone();
            sorted.sort_unstable();
            (self.visit)(&sorted);
            return Ok(());
        }
        self.poll_abort()?;
        // pivot: vertex of P|X with the most neighbours inside P
        let mut pivot = usize::MAX;
        let mut best = usize::MAX;
        for wi in 0..self.words {
            let mut w = p[wi] | x[wi];
            while w != 0 {
                let u = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                let c = intersection_count(p, self.g.row(u));
                if best == usize::MAX || c > best {
                    best = c;
                    pivot = u;
                }
                // a pivot covering all of P cannot be beaten
                if best == popcount(p) {
                    break;
                }
            }
        }
        // candidates: P \ N(pivot), ascending
        let mut cands = Vec::new();
        if pivot == usize::MAX {
            for_each_bit(p, |v| cands.push(v));
        } else {
            let prow = self.g.row(pivot);
            for wi in 0..self.words {
                let mut w = p[wi] & !prow[wi];
                while w != 0 {
                    cands.push(wi * 64 + w.trailing_zeros() as usize);
                    w &= w - 1;
                }
            }
        }
        let mut new_p = self.alloc_level(depth, 0);
        let mut new_x = self.alloc_level(depth, 1);
        for v in cands {
            let row = self.g.row(v);
            intersect_into(&mut new_p, p, row);
            intersect_into(&mut new_x, x, row);
            self.clique.push(v);
            let r = self.expand(&mut new_p, &mut new_x, depth + 1);
            self.clique.pop();
            r?;
            clear_bit(p, v);
            set_bit(x, v);
        }
        self.free_level(depth, 0, new_p);
        self.free_level(depth, 1, new_x);
        Ok(())
    }

    fn alloc_level(&mut self, depth: usize, slot: usize) -> Vec<u64> {
        let idx = 2 * depth + slot;
        while self.scratch.len() <= idx {
            let words = self.words;
            self.scratch.push(vec![0u64; words]);
        }
        core::mem::take(&mut self.scratch[idx])
    }

    fn free_level(&mut self, depth: usize, slot: usize, buf: Vec<u64>) {
        self.scratch[2 * depth + slot] = buf;
    }
}

/// Visit every maximal clique exactly once. The visitor receives each clique
/// as an ascending vertex slice; the visit order is deterministic (but not
/// globally sorted). Returns the number of cliques emitted.
pub fn visit_maximal_cliques<F: FnMut(&[usize])>(
    g: &Graph,
    budget: &mut SearchBudget,
    visit: F,
) -> Result<u64, SearchError> {
    let n = g.vertex_count();
    let words = g.words_per_row().max(1);
    let mut en = Enumerator {
        g,
        words,
        scratch: Vec::new(),
        clique: Vec::new(),
        emitted: 0,
        budget,
        poll: 0,
        visit,
    };
    if n == 0 {
        return Ok(0);
    }
    let order = degeneracy_order(g);
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut p = vec![0u64; words];
    let mut x = vec![0u64; words];
    for (i, &v) in order.iter().enumerate() {
        p.iter_mut().for_each(|w| *w = 0);
        x.iter_mut().for_each(|w| *w = 0);
        for_each_bit(g.row(v), |u| {
            if rank[u] > i {
                set_bit(&mut p, u);
            } else {
                set_bit(&mut x, u);
            }
        });
        en.clique.push(v);
        let r = en.expand(&mut p, &mut x, 0);
        en.clique.pop();
        r?;
    }
    Ok(en.emitted)
}

/// All maximal cliques, each an ascending vertex list, the list sorted
/// lexicographically. Complete and deterministic.
pub fn maximal_cliques(g: &Graph, budget: &mut SearchBudget) -> Result<Vec<Vec<usize>>, SearchError> {
    let mut out = Vec::new();
    visit_maximal_cliques(g, budget, |c| out.push(c.to_vec()))?;
    out.sort_unstable();
    Ok(out)
}

/// True iff `c` is a clique and no outside vertex is adjacent to all of it.
/// The empty set is maximal only in the empty graph.
pub fn is_maximal_clique(g: &Graph, c: &[usize]) -> bool {
    let n = g.vertex_count();
    let mut sorted = c.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != c.len() || sorted.iter().any(|&v| v >= n) {
        return false;
    }
    for (i, &u) in sorted.iter().enumerate() {
        for &v in &sorted[i + 1..] {
            if !g.has_edge(u, v) {
                return false;
            }
        }
    }
    'outer: for w in 0..n {
        if sorted.binary_search(&w).is_ok() {
            continue;
        }
        for &u in &sorted {
            if !g.has_edge(w, u) {
                continue 'outer;
            }
        }
        return false; // w extends c
    }
    true
}

/// A graph with a nonnegative rational weight per vertex.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    pub graph: Graph,
    pub weights: Vec<Rational>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<Rational>) -> Self {
        assert_eq!(graph.vertex_count(), weights.len());
        assert!(weights.iter().all(|w| !w.is_negative()));
        WeightedGraph { graph, weights }
    }
}

/// A clique whose total weight strictly exceeds the threshold, if any.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CliqueWitness {
    /// Ascending vertex list.
    pub clique: Vec<usize>,
    pub weight: Rational,
}

/// Depth-first threshold search: returns the first clique found (in
/// deterministic ascending-index order) of total weight > `threshold`, or
/// `None` when no clique exceeds it. The branch bound is the remaining
/// candidate weight, compared exactly.
pub fn max_weighted_clique(
    wg: &WeightedGraph,
    threshold: &Rational,
    budget: &mut SearchBudget,
) -> Result<Option<CliqueWitness>, SearchError> {
    let g = &wg.graph;
    let n = g.vertex_count();
    let words = g.words_per_row().max(1);
    // scale weights to a common denominator so the inner loop adds integers
    let mut denom = BigInt::one();
    for w in &wg.weights {
        denom = denom.lcm(w.denom());
    }
    let scaled: Vec<BigInt> =
        wg.weights.iter().map(|w| w.numer() * (&denom / w.denom())).collect();
    let threshold_scaled = {
        let t = threshold * Rational::from(denom.clone());
        // ceil comparison is unnecessary: keep exactness by comparing
        // sum * t.denom > t.numer * denom-free form below
        t
    };
    // weight > threshold  <=>  sum_scaled / denom > threshold
    //                     <=>  sum_scaled * threshold.denom > threshold.numer * denom
    let exceeds = move |sum: &BigInt| -> bool {
        Rational::new(sum.clone(), BigInt::one()) > threshold_scaled
    };

    struct Bb<'a> {
        g: &'a Graph,
        words: usize,
        scaled: &'a [BigInt],
        budget: &'a mut SearchBudget,
        nodes: u64,
        poll: u32,
    }
    impl<'a> Bb<'a> {
        fn run(
            &mut self,
            p: &mut [u64],
            sum: BigInt,
            clique: &mut Vec<usize>,
            exceeds: &dyn Fn(&BigInt) -> bool,
        ) -> Result<Option<(Vec<usize>, BigInt)>, SearchError> {
            self.nodes += 1;
            if self.nodes >= self.budget.max_cliques {
                return Err(SearchError::BudgetExceeded { emitted: self.nodes });
            }
            self.poll = self.poll.wrapping_add(1);
            if self.poll % 1024 == 0 {
                if let Some(hook) = self.budget.should_abort.as_mut() {
                    if hook() {
                        return Err(SearchError::Aborted);
                    }
                }
            }
            if exceeds(&sum) {
                let mut c = clique.clone();
                c.sort_unstable();
                return Ok(Some((c, sum)));
            }
            // admissible bound: current weight plus everything left in P
            let mut rest = sum.clone();
            let mut cands = Vec::new();
            for_each_bit(p, |v| {
                rest += &self.scaled[v];
                cands.push(v);
            });
            if !exceeds(&rest) {
                return Ok(None);
            }
            let mut new_p = vec![0u64; self.words];
            for v in cands {
                intersect_into(&mut new_p, p, self.g.row(v));
                // only later vertices: each clique is visited once
                for w in new_p.iter_mut().take(v / 64) {
                    *w = 0;
                }
                new_p[v / 64] &= !((1u64 << (v % 64)) | ((1u64 << (v % 64)) - 1));
                clique.push(v);
                let r = self.run(&mut new_p, &sum + &self.scaled[v], clique, exceeds)?;
                clique.pop();
                if r.is_some() {
                    return Ok(r);
                }
                clear_bit(p, v);
            }
            Ok(None)
        }
    }

    let mut p = vec![0u64; words];
    for v in 0..n {
        set_bit(&mut p, v);
    }
    let mut bb = Bb { g, words, scaled: &scaled, budget, nodes: 0, poll: 0 };
    let mut clique = Vec::new();
    let found = bb.run(&mut p, BigInt::zero(), &mut clique, &exceeds)?;
    Ok(found.map(|(clique, sum)| CliqueWitness {
        clique,
        weight: Rational::new(sum, denom.clone()),
    }))
}

/// Exact maximum clique size with a witness, by branch and bound with a
/// greedy-coloring upper bound.
pub fn max_clique(g: &Graph, budget: &mut SearchBudget) -> Result<Vec<usize>, SearchError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let words = g.words_per_row().max(1);

    struct Mc<'a> {
        g: &'a Graph,
        words: usize,
        best: Vec<usize>,
        budget: &'a mut SearchBudget,
        nodes: u64,
        poll: u32,
    }
    impl<'a> Mc<'a> {
        /// Greedy coloring of `p`; returns candidates paired with color
        /// numbers (1-based), in coloring order.
        fn color(&self, p: &[u64]) -> Vec<(usize, usize)> {
            let mut uncolored = p.to_vec();
            let mut out = Vec::new();
            let mut color = 0usize;
            let mut class = vec![0u64; self.words];
            while !is_empty(&uncolored) {
                color += 1;
                class.copy_from_slice(&uncolored);
                while let Some(v) = first_bit(&class) {
                    out.push((v, color));
                    clear_bit(&mut uncolored, v);
                    clear_bit(&mut class, v);
                    let row = self.g.row(v);
                    for (c, &r) in class.iter_mut().zip(row) {
                        *c &= !r;
                    }
                }
            }
            out
        }

        fn run(
            &mut self,
            p: &[u64],
            clique: &mut Vec<usize>,
        ) -> Result<(), SearchError> {
            self.nodes += 1;
            if self.nodes >= self.budget.max_cliques {
                return Err(SearchError::BudgetExceeded { emitted: self.nodes });
            }
            self.poll = self.poll.wrapping_add(1);
            if self.poll % 1024 == 0 {
                if let Some(hook) = self.budget.should_abort.as_mut() {
                    if hook() {
                        return Err(SearchError::Aborted);
                    }
                }
            }
            if is_empty(p) {
                if clique.len() > self.best.len() {
                    self.best = clique.clone();
                    self.best.sort_unstable();
                }
                return Ok(());
            }
            let colored = self.color(p);
            let mut p = p.to_vec();
            // descending color: the color number bounds the clique size in p
            for &(v, color) in colored.iter().rev() {
                if clique.len() + color <= self.best.len() {
                    return Ok(());
                }
                let mut new_p = vec![0u64; self.words];
                intersect_into(&mut new_p, &p, self.g.row(v));
                clique.push(v);
                let r = self.run(&new_p, clique);
                clique.pop();
                r?;
                clear_bit(&mut p, v);
            }
            Ok(())
        }
    }

    fn first_bit(bits: &[u64]) -> Option<usize> {
        for (wi, &w) in bits.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    let mut p = vec![0u64; words];
    for v in 0..n {
        set_bit(&mut p, v);
    }
    let mut mc = Mc { g, words, best: Vec::new(), budget, nodes: 0, poll: 0 };
    let mut clique = Vec::new();
    mc.run(&p, &mut clique)?;
    Ok(mc.best)
}

/// Independence number: exact maximum independent-set size, computed as the
/// maximum clique of the complement.
pub fn independence_number(g: &Graph, budget: &mut SearchBudget) -> Result<usize, SearchError> {
    Ok(max_clique(&g.complement(), budget)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use crate::scenario::{orthogonality_graph, Scenario};

    #[test]
    fn triangle_has_one_maximal_clique() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let cl = maximal_cliques(&g, &mut SearchBudget::default()).unwrap();
        assert_eq!(cl, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn five_cycle_cliques_are_its_edges() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let cl = maximal_cliques(&g, &mut SearchBudget::default()).unwrap();
        assert_eq!(cl.len(), 5);
        assert!(cl.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn o322_contains_the_gyni_clique() {
        let s = Scenario::new(3, 2, 2).unwrap();
        let g = orthogonality_graph(&s).unwrap();
        let gyni: Vec<usize> = [
            ([0u8, 0, 0], [0u8, 0, 0]),
            ([1, 1, 0], [0, 1, 1]),
            ([0, 1, 1], [1, 0, 1]),
            ([1, 0, 1], [1, 1, 0]),
        ]
        .iter()
        .map(|(a, x)| s.index_of(a, x).unwrap())
        .collect();
        let mut sorted = gyni.clone();
        sorted.sort_unstable();
        let cl = maximal_cliques(&g, &mut SearchBudget::default()).unwrap();
        assert!(cl.contains(&sorted));
        assert!(is_maximal_clique(&g, &gyni));
    }

    #[test]
    fn maximality_negative_cases() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(!is_maximal_clique(&g, &[0]));
        assert!(!is_maximal_clique(&g, &[]));
        assert!(is_maximal_clique(&g, &[2]));
        assert!(is_maximal_clique(&g, &[0, 1]));
    }

    #[test]
    fn every_enumerated_clique_is_maximal_and_matches_brute_force() {
        // deterministic pseudo-random graphs on <= 20 vertices
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in [6usize, 10, 14, 18] {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if next() % 100 < 45 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let cl = maximal_cliques(&g, &mut SearchBudget::default()).unwrap();
            for c in &cl {
                assert!(is_maximal_clique(&g, c));
            }
            // brute force over all subsets
            let mut brute = Vec::new();
            for mask in 0u32..(1 << n) {
                let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                if !set.is_empty() && is_maximal_clique(&g, &set) {
                    brute.push(set);
                }
            }
            if cl.is_empty() {
                // edgeless graphs: singletons are the maximal cliques
                continue;
            }
            brute.sort();
            assert_eq!(cl, brute, "n={n}");
        }
    }

    #[test]
    fn budget_aborts_enumeration() {
        let s = Scenario::new(3, 2, 2).unwrap();
        let g = orthogonality_graph(&s).unwrap();
        let mut budget = SearchBudget::with_max_cliques(10);
        assert!(matches!(
            maximal_cliques(&g, &mut budget),
            Err(SearchError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn weighted_threshold_search() {
        // triangle with weights 1/2: total 3/2 > 1 -> witness exists
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let wg = WeightedGraph::new(g, vec![ratio(1, 2); 3]);
        let w = max_weighted_clique(&wg, &ratio(1, 1), &mut SearchBudget::default())
            .unwrap()
            .unwrap();
        assert!(w.weight > ratio(1, 1));
        // threshold at least the total weight -> none
        let wg2 = WeightedGraph::new(
            Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(),
            vec![ratio(1, 2); 3],
        );
        assert!(max_weighted_clique(&wg2, &ratio(3, 2), &mut SearchBudget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn independence_numbers() {
        let edgeless = Graph::from_edges(7, &[]).unwrap();
        assert_eq!(independence_number(&edgeless, &mut SearchBudget::default()).unwrap(), 7);
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(independence_number(&c5, &mut SearchBudget::default()).unwrap(), 2);
    }

    #[test]
    fn independence_equals_complement_clique() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in [8usize, 12, 16] {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if next() % 100 < 50 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let alpha = independence_number(&g, &mut SearchBudget::default()).unwrap();
            let via_clique = max_clique(&g.complement(), &mut SearchBudget::default())
                .unwrap()
                .len();
            assert_eq!(alpha, via_clique);
        }
    }
}
