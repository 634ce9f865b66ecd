//! Correlation clustering over a signed similarity graph.
//!
//! The objective sums `x_ij * w_ij` over unordered pairs with `x_ij = +1` for
//! co-members and `-1` otherwise. Partitions encode `x` directly, so the
//! transitivity constraint always holds.

use crate::error::{Error, Result};

pub const DEFAULT_EXACT_LIMIT: usize = 10;

/// Symmetric weight matrix with an optional mask of pairs that must not share
/// a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    n: usize,
    weights: Vec<f64>,
    forbid: Option<Vec<bool>>,
}

impl SimilarityGraph {
    /// All-zero graph over `n` nodes.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            weights: vec![0.0; n * n],
            forbid: None,
        }
    }

    /// Row-major `n x n` matrix. The diagonal is ignored.
    pub fn from_matrix(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::InvalidGraph(format!(
                "expected {} weights, got {}",
                n * n,
                weights.len()
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (weights[i * n + j], weights[j * n + i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidGraph(format!("non-finite weight at ({i}, {j})")));
                }
                if a != b {
                    return Err(Error::InvalidGraph(format!("asymmetric weight at ({i}, {j})")));
                }
            }
        }
        let mut weights = weights;
        for i in 0..n {
            weights[i * n + i] = 0.0;
        }
        Ok(Self {
            n,
            weights,
            forbid: None,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// # Panics
    /// On `i == j` or a non-finite weight.
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j, "diagonal weight is undefined");
        assert!(w.is_finite(), "weights must be finite");
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn forbid(&mut self, i: usize, j: usize) {
        assert!(i != j, "a node cannot be forbidden from itself");
        let n = self.n;
        let mask = self.forbid.get_or_insert_with(|| vec![false; n * n]);
        mask[i * n + j] = true;
        mask[j * n + i] = true;
    }

    pub fn is_forbidden(&self, i: usize, j: usize) -> bool {
        self.forbid.as_ref().is_some_and(|m| m[i * self.n + j])
    }

    fn abs_weight_sum(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                s += self.weight(i, j).abs();
            }
        }
        s
    }

    /// Comparison slack that scales with the weights, so positive rescaling
    /// never changes a decision.
    fn tolerance(&self) -> f64 {
        1e-12 * self.abs_weight_sum()
    }
}

/// Cluster assignment with contiguous ids in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary group ids to `0..k` in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = raw
            .iter()
            .map(|g| {
                let next = map.len();
                *map.entry(*g).or_insert(next)
            })
            .collect();
        Self { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_groups(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each group, in node order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_groups()];
        for (node, &g) in self.assignment.iter().enumerate() {
            groups[g].push(node);
        }
        groups
    }

    pub fn same_group(&self, i: usize, j: usize) -> bool {
        self.assignment[i] == self.assignment[j]
    }

    /// True when no forbidden pair shares a group.
    pub fn respects(&self, g: &SimilarityGraph) -> bool {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.same_group(i, j) && g.is_forbidden(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// `sum_{i<j} x_ij * w_ij` with `x_ij = +1` for co-members, `-1` otherwise.
pub fn objective(g: &SimilarityGraph, p: &Partition) -> Result<f64> {
    if p.len() != g.len() {
        return Err(Error::PartitionSize {
            expected: g.len(),
            actual: p.len(),
        });
    }
    let mut total = 0.0;
    for i in 0..g.n {
        for j in i + 1..g.n {
            let w = g.weight(i, j);
            total += if p.same_group(i, j) { w } else { -w };
        }
    }
    Ok(total)
}

/// Exhaustive search with the default size limit.
pub fn solve_exact(g: &SimilarityGraph) -> Result<Partition> {
    solve_exact_with_limit(g, DEFAULT_EXACT_LIMIT)
}

/// Enumerates every set partition as a restricted growth string in
/// lexicographic order and keeps the first optimum, so ties resolve to the
/// lexicographically smallest assignment. Forbidden co-memberships are pruned.
pub fn solve_exact_with_limit(g: &SimilarityGraph, limit: usize) -> Result<Partition> {
    if g.n > limit {
        return Err(Error::TooLargeForExact { n: g.n, limit });
    }
    if g.n == 0 {
        return Ok(Partition::singletons(0));
    }
    let mut search = ExactSearch {
        g,
        tol: g.tolerance(),
        assign: vec![0; g.n],
        best: Vec::new(),
        best_score: f64::NEG_INFINITY,
    };
    search.descend(1, 1, 0.0);
    Ok(Partition {
        assignment: search.best,
    })
}

struct ExactSearch<'a> {
    g: &'a SimilarityGraph,
    tol: f64,
    assign: Vec<usize>,
    best: Vec<usize>,
    // Sum of intra-group weights; the objective is 2 * intra - total.
    best_score: f64,
}

impl ExactSearch<'_> {
    fn descend(&mut self, k: usize, groups: usize, intra: f64) {
        if k == self.g.n {
            if self.best.is_empty() || intra > self.best_score + self.tol {
                self.best_score = intra;
                self.best = self.assign.clone();
            }
            return;
        }
        for group in 0..=groups {
            let mut gain = 0.0;
            let mut feasible = true;
            if group < groups {
                for i in 0..k {
                    if self.assign[i] == group {
                        if self.g.is_forbidden(i, k) {
                            feasible = false;
                            break;
                        }
                        gain += self.g.weight(i, k);
                    }
                }
            }
            if !feasible {
                continue;
            }
            self.assign[k] = group;
            let next_groups = if group == groups { groups + 1 } else { groups };
            self.descend(k + 1, next_groups, intra + gain);
        }
    }
}

/// Objective after the greedy phase and after every local-search pass.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicTrace {
    pub objectives: Vec<f64>,
}

pub fn solve_heuristic(g: &SimilarityGraph) -> Partition {
    solve_heuristic_traced(g).0
}

/// Greedy agglomeration from singletons (largest positive inter-cluster sum
/// first) followed by node-move and cluster-merge local search until no move
/// improves the objective. The same local search is also run from the
/// all-singletons and (when feasible) all-in-one starts; the best result wins,
/// earlier starts winning ties. The trace follows the greedy start.
pub fn solve_heuristic_traced(g: &SimilarityGraph) -> (Partition, HeuristicTrace) {
    let n = g.n;
    if n == 0 {
        return (Partition::singletons(0), HeuristicTrace { objectives: vec![0.0] });
    }
    let tol = g.tolerance();
    let (mut best, trace) = local_search(g, greedy_merge(g), tol);
    let mut best_obj = objective_of(g, &best);
    let mut starts = vec![(0..n).collect::<Vec<usize>>()];
    if g.forbid.is_none() {
        starts.push(vec![0; n]);
    }
    for start in starts {
        let (assign, _) = local_search(g, start, tol);
        let obj = objective_of(g, &assign);
        if obj > best_obj + tol {
            best = assign;
            best_obj = obj;
        }
    }
    (Partition::from_assignment(&best), HeuristicTrace { objectives: trace })
}

fn local_search(g: &SimilarityGraph, mut assign: Vec<usize>, tol: f64) -> (Vec<usize>, Vec<f64>) {
    let mut trace = vec![objective_of(g, &assign)];
    // Each accepted move raises the objective by more than `tol`, so this
    // terminates; the cap only guards against pathological float behavior.
    for _ in 0..(4 * g.n + 16) {
        let moved = node_moves(g, &mut assign, tol);
        let merged = cluster_merges(g, &mut assign, tol);
        trace.push(objective_of(g, &assign));
        if !moved && !merged {
            break;
        }
    }
    (assign, trace)
}

/// Exact search when small enough, heuristic otherwise.
pub fn solve(g: &SimilarityGraph, exact_limit: usize) -> Partition {
    if g.n <= exact_limit {
        solve_exact_with_limit(g, exact_limit).expect("size checked")
    } else {
        solve_heuristic(g)
    }
}

fn objective_of(g: &SimilarityGraph, assign: &[usize]) -> f64 {
    let mut total = 0.0;
    for i in 0..g.n {
        for j in i + 1..g.n {
            let w = g.weight(i, j);
            total += if assign[i] == assign[j] { w } else { -w };
        }
    }
    total
}

fn greedy_merge(g: &SimilarityGraph) -> Vec<usize> {
    let n = g.n;
    let mut sums = g.weights.clone();
    let mut forbid = g.forbid.clone().unwrap_or_else(|| vec![false; n * n]);
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();

    // Best merge partner per active cluster: (partner, gain).
    let best_of = |a: usize, sums: &[f64], forbid: &[bool], active: &[bool]| {
        let mut best: Option<(usize, f64)> = None;
        for b in 0..n {
            if b == a || !active[b] || forbid[a * n + b] {
                continue;
            }
            let s = sums[a * n + b];
            if s > 0.0 && best.is_none_or(|(_, v)| s > v) {
                best = Some((b, s));
            }
        }
        best
    };
    let mut best: Vec<Option<(usize, f64)>> = (0..n).map(|a| best_of(a, &sums, &forbid, &active)).collect();

    loop {
        let mut pick: Option<(usize, usize, f64)> = None;
        for a in 0..n {
            if !active[a] {
                continue;
            }
            if let Some((b, v)) = best[a] {
                let (x, y) = (a.min(b), a.max(b));
                let better = match pick {
                    None => true,
                    Some((px, py, pv)) => v > pv || (v == pv && (x, y) < (px, py)),
                };
                if better {
                    pick = Some((x, y, v));
                }
            }
        }
        let Some((a, b, _)) = pick else { break };

        active[b] = false;
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
        for k in 0..n {
            if k == a || k == b {
                continue;
            }
            let s = sums[a * n + k] + sums[b * n + k];
            sums[a * n + k] = s;
            sums[k * n + a] = s;
            let f = forbid[a * n + k] || forbid[b * n + k];
            forbid[a * n + k] = f;
            forbid[k * n + a] = f;
        }
        best[b] = None;
        best[a] = best_of(a, &sums, &forbid, &active);
        for k in 0..n {
            if !active[k] || k == a {
                continue;
            }
            match best[k] {
                Some((p, _)) if p == a || p == b => best[k] = best_of(k, &sums, &forbid, &active),
                Some((p, v)) => {
                    let s = sums[k * n + a];
                    if !forbid[k * n + a] && s > 0.0 && (s > v || (s == v && a < p)) {
                        best[k] = Some((a, s));
                    }
                }
                None => {
                    let s = sums[k * n + a];
                    if !forbid[k * n + a] && s > 0.0 {
                        best[k] = Some((a, s));
                    }
                }
            }
        }
    }
    owner
}

/// One sweep of single-node relocations. Returns whether anything moved.
fn node_moves(g: &SimilarityGraph, assign: &mut [usize], tol: f64) -> bool {
    let n = g.n;
    let mut size = vec![0usize; n];
    for &c in assign.iter() {
        size[c] += 1;
    }
    let mut sum_to = vec![0.0; n];
    let mut blocked = vec![false; n];
    let mut moved = false;
    for v in 0..n {
        sum_to.iter_mut().for_each(|s| *s = 0.0);
        blocked.iter_mut().for_each(|b| *b = false);
        for u in 0..n {
            if u == v {
                continue;
            }
            sum_to[assign[u]] += g.weight(v, u);
            if g.is_forbidden(v, u) {
                blocked[assign[u]] = true;
            }
        }
        let own = assign[v];
        let stay = sum_to[own];
        let mut best: Option<(usize, f64)> = None;
        for c in 0..n {
            if c == own || size[c] == 0 || blocked[c] {
                continue;
            }
            let gain = 2.0 * (sum_to[c] - stay);
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((c, gain));
            }
        }
        if size[own] > 1 {
            let gain = -2.0 * stay;
            if best.is_none_or(|(_, b)| gain > b) {
                let empty = (0..n).find(|&c| size[c] == 0).expect("fewer clusters than nodes");
                best = Some((empty, gain));
            }
        }
        if let Some((c, gain)) = best {
            if gain > tol {
                size[own] -= 1;
                size[c] += 1;
                assign[v] = c;
                moved = true;
            }
        }
    }
    moved
}

/// Merges cluster pairs with a positive between-sum, best first. Returns
/// whether anything merged.
fn cluster_merges(g: &SimilarityGraph, assign: &mut [usize], tol: f64) -> bool {
    let n = g.n;
    let mut merged_any = false;
    loop {
        let mut between = vec![0.0; n * n];
        let mut blocked = vec![false; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (assign[i], assign[j]);
                if a == b {
                    continue;
                }
                between[a * n + b] += g.weight(i, j);
                between[b * n + a] += g.weight(i, j);
                if g.is_forbidden(i, j) {
                    blocked[a * n + b] = true;
                    blocked[b * n + a] = true;
                }
            }
        }
        let mut pick: Option<(usize, usize, f64)> = None;
        for a in 0..n {
            for b in a + 1..n {
                let s = between[a * n + b];
                if !blocked[a * n + b] && 2.0 * s > tol && pick.is_none_or(|(_, _, v)| s > v) {
                    pick = Some((a, b, s));
                }
            }
        }
        let Some((a, b, _)) = pick else { break };
        for c in assign.iter_mut() {
            if *c == b {
                *c = a;
            }
        }
        merged_any = true;
    }
    merged_any
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> SimilarityGraph {
        let mut g = SimilarityGraph::new(3);
        g.set_weight(0, 1, 1.0);
        g.set_weight(0, 2, 1.0);
        g.set_weight(1, 2, -0.5);
        g
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> SimilarityGraph {
        let mut g = SimilarityGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set_weight(i, j, rng.random_range(-1.0..1.0));
            }
        }
        g
    }

    /// Brute force over all assignments in `0..n`, independent of the
    /// restricted-growth enumeration.
    fn brute_force_best(g: &SimilarityGraph) -> f64 {
        let n = g.len();
        let mut best = f64::NEG_INFINITY;
        let mut assign = vec![0usize; n];
        loop {
            let p = Partition::from_assignment(&assign);
            if p.respects(g) {
                best = best.max(objective(g, &p).unwrap());
            }
            let mut k = 0;
            loop {
                if k == n {
                    return best;
                }
                assign[k] += 1;
                if assign[k] < n {
                    break;
                }
                assign[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn objective_examples() {
        let g = triangle();
        let one = Partition::from_assignment(&[0, 0, 0]);
        let singles = Partition::singletons(3);
        let split = Partition::from_assignment(&[0, 0, 1]);
        assert!((objective(&g, &one).unwrap() - 1.5).abs() < 1e-12);
        assert!((objective(&g, &singles).unwrap() + 1.5).abs() < 1e-12);
        assert!((objective(&g, &split).unwrap() - 0.5).abs() < 1e-12);
        assert!(objective(&g, &Partition::singletons(2)).is_err());
    }

    #[test]
    fn exact_triangle() {
        let g = triangle();
        let p = solve_exact(&g).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0]);
        assert!((objective(&g, &p).unwrap() - 1.5).abs() < 1e-12);
        assert!((brute_force_best(&g) - 1.5).abs() < 1e-12);
        assert_eq!(solve_heuristic(&g), p);
    }

    #[test]
    fn exact_sign_extremes() {
        let mut neg = SimilarityGraph::new(5);
        let mut pos = SimilarityGraph::new(5);
        for i in 0..5 {
            for j in i + 1..5 {
                neg.set_weight(i, j, -0.3);
                pos.set_weight(i, j, 0.3);
            }
        }
        assert_eq!(solve_exact(&neg).unwrap(), Partition::singletons(5));
        assert_eq!(solve_exact(&pos).unwrap().num_groups(), 1);
    }

    #[test]
    fn exact_rejects_large() {
        let g = SimilarityGraph::new(11);
        assert_eq!(solve_exact(&g), Err(Error::TooLargeForExact { n: 11, limit: 10 }));
    }

    #[test]
    fn exact_ties_resolve_lexicographically() {
        // All-zero weights: every partition scores 0, the smallest is all-in-one.
        let g = SimilarityGraph::new(4);
        assert_eq!(solve_exact(&g).unwrap().assignment(), &[0, 0, 0, 0]);
    }

    #[test]
    fn forbid_mask_respected() {
        let mut g = triangle();
        g.forbid(1, 2);
        let p = solve_exact(&g).unwrap();
        assert!(p.respects(&g));
        assert!((objective(&g, &p).unwrap() - brute_force_best(&g)).abs() < 1e-12);
        assert!(solve_heuristic(&g).respects(&g));
    }

    #[test]
    fn heuristic_single_node() {
        let g = SimilarityGraph::new(1);
        assert_eq!(solve_heuristic(&g), Partition::singletons(1));
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.random_range(1..=6);
            let mut g = random_graph(&mut rng, n);
            if n > 2 && rng.random_bool(0.5) {
                g.forbid(0, n - 1);
            }
            let p = solve_exact(&g).unwrap();
            assert!(p.respects(&g));
            assert!((objective(&g, &p).unwrap() - brute_force_best(&g)).abs() < 1e-9);
        }
    }

    #[test]
    fn heuristic_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 30);
            let (_, trace) = solve_heuristic_traced(&g);
            for w in trace.objectives.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
        }
    }

    #[test]
    fn heuristic_respects_forbid_on_larger_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut g = random_graph(&mut rng, 40);
        for _ in 0..100 {
            let i = rng.random_range(0..40);
            let j = rng.random_range(0..40);
            if i != j {
                g.forbid(i, j);
            }
        }
        assert!(solve_heuristic(&g).respects(&g));
    }

    proptest! {
        #[test]
        fn partitions_are_equivalence_relations(raw in proptest::collection::vec(0usize..5, 1..9)) {
            let p = Partition::from_assignment(&raw);
            // Contiguous ids starting at 0.
            let k = p.num_groups();
            for g in 0..k {
                prop_assert!(p.assignment().contains(&g));
            }
            for i in 0..p.len() {
                for j in 0..p.len() {
                    prop_assert_eq!(p.same_group(i, j), raw[i] == raw[j]);
                }
            }
        }

        #[test]
        fn exact_is_optimal_and_scale_invariant(seed in 0u64..1000, n in 1usize..7, scale in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, n);
            let best = solve_exact(&g).unwrap();
            let best_obj = objective(&g, &best).unwrap();
            let mut scaled = SimilarityGraph::new(n);
            for i in 0..n {
                for j in i + 1..n {
                    scaled.set_weight(i, j, g.weight(i, j) * scale);
                }
            }
            prop_assert_eq!(&solve_exact(&scaled).unwrap(), &best);
            prop_assert_eq!(solve_heuristic(&scaled), solve_heuristic(&g));
            let h = solve_heuristic(&g);
            prop_assert!(objective(&g, &h).unwrap() <= best_obj + 1e-9);
            // Any random partition is no better than the optimum.
            let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            prop_assert!(objective(&g, &Partition::from_assignment(&raw)).unwrap() <= best_obj + 1e-9);
        }
    }
}
