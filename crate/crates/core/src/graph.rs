//! Undirected graph structure: maximal cliques, chordality, running
//! intersection orderings, junction trees, and Markov separation statements.
//!
//! Vertices are labeled `1..=d` throughout, matching the coordinate indices
//! of the ambient space.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Undirected graph on vertices `1..=d` with no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    d: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if d == 0 || d > 64 {
            return Err(Error::InvalidInput(format!("vertex count {} out of range 1..=64", d)));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {}", u)));
            }
            if u < 1 || u > d || v < 1 || v > d {
                return Err(Error::InvalidInput(format!("edge ({},{}) out of range", u, v)));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(Error::InvalidInput(format!("duplicate edge ({},{})", e.0, e.1)));
            }
        }
        let mut adj = vec![0u64; d + 1];
        for &(u, v) in &set {
            adj[u] |= 1 << (v - 1);
            adj[v] |= 1 << (u - 1);
        }
        Ok(Graph { d, edges: set, adj })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u] & (1 << (v - 1)) != 0
    }

    /// Bitmask of neighbors (bit `v-1` set for neighbor `v`).
    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        mask_to_vec(self.adj[v])
    }

    fn all_mask(&self) -> u64 {
        if self.d == 64 {
            u64::MAX
        } else {
            (1u64 << self.d) - 1
        }
    }

    /// True when every pair of distinct vertices in `set` is adjacent.
    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &u)| set[k + 1..].iter().all(|&v| self.has_edge(u, v)))
    }
}

fn mask_to_vec(mut m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        out.push(b + 1);
        m &= m - 1;
    }
    out
}

fn vec_to_mask(v: &[usize]) -> u64 {
    v.iter().fold(0u64, |m, &x| m | 1 << (x - 1))
}

/// Ordered list of vertex subsets, each an inclusion-maximal clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueList {
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn max_clique_size(&self) -> usize {
        self.cliques.iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

/// All inclusion-maximal cliques via Bron-Kerbosch with pivoting, sorted by
/// size then lexicographically for determinism. Isolated vertices appear as
/// singleton cliques.
pub fn maximal_cliques(g: &Graph) -> CliqueList {
    fn bk(g: &Graph, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        // Pivot: vertex of p|x with the most neighbors in p.
        let pivot = mask_to_vec(p | x)
            .into_iter()
            .max_by_key(|&u| (g.neighbors_mask(u) & p).count_ones())
            .unwrap();
        let cand = p & !g.neighbors_mask(pivot);
        for v in mask_to_vec(cand) {
            let vb = 1u64 << (v - 1);
            let nb = g.neighbors_mask(v);
            bk(g, r | vb, p & nb, x & nb, out);
            p &= !vb;
            x |= vb;
        }
    }
    let mut raw = Vec::new();
    bk(g, 0, g.all_mask(), 0, &mut raw);
    let mut cliques: Vec<Vec<usize>> = raw.into_iter().map(mask_to_vec).collect();
    cliques.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    CliqueList { cliques }
}

/// Maximum cardinality search; returns the visit order.
fn mcs_order(g: &Graph) -> Vec<usize> {
    let d = g.d();
    let mut numbered = 0u64;
    let mut weight = vec![0usize; d + 1];
    let mut order = Vec::with_capacity(d);
    for _ in 0..d {
        let v = (1..=d)
            .filter(|&v| numbered & (1 << (v - 1)) == 0)
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        order.push(v);
        numbered |= 1 << (v - 1);
        for u in g.neighbors(v) {
            if numbered & (1 << (u - 1)) == 0 {
                weight[u] += 1;
            }
        }
    }
    order
}

/// Checks whether `order` is a perfect elimination ordering: the later
/// neighbors of each vertex form a clique.
pub fn is_perfect_elimination_ordering(g: &Graph, order: &[usize]) -> bool {
    let pos: Vec<usize> = {
        let mut p = vec![0; g.d() + 1];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = g.neighbors(v).into_iter().filter(|&u| pos[u] > i).collect();
        if !g.is_clique(&later) {
            return false;
        }
    }
    true
}

/// Chordality test by maximum cardinality search plus verification. Returns a
/// perfect elimination ordering when the graph is chordal.
pub fn is_chordal(g: &Graph) -> (bool, Option<Vec<usize>>) {
    let mut order = mcs_order(g);
    order.reverse();
    if is_perfect_elimination_ordering(g, &order) {
        (true, Some(order))
    } else {
        (false, None)
    }
}

/// Validates the running intersection property of an ordering: for each
/// `i < t`, the intersection of `C_i` with the union of the later cliques is
/// contained in a single later clique.
pub fn validate_rip(cliques: &[Vec<usize>]) -> bool {
    let t = cliques.len();
    let masks: Vec<u64> = cliques.iter().map(|c| vec_to_mask(c)).collect();
    for i in 0..t.saturating_sub(1) {
        let future = masks[i + 1..].iter().fold(0u64, |m, &x| m | x);
        let sep = masks[i] & future;
        if sep == 0 {
            continue;
        }
        if !masks[i + 1..].iter().any(|&cj| sep & !cj == 0) {
            return false;
        }
    }
    true
}

/// Orders the maximal cliques to satisfy the running intersection property
/// (children-first traversal of a junction tree).
pub fn rip_ordering(cliques: &CliqueList, g: &Graph) -> Result<CliqueList> {
    let jt = junction_tree_from(g, cliques)?;
    let t = cliques.len();
    let mut adj = vec![Vec::new(); t];
    for &(i, j) in &jt.edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut visited = vec![false; t];
    let mut order = Vec::with_capacity(t);
    for root in 0..t {
        if visited[root] {
            continue;
        }
        // Iterative post-order: children before parents.
        let mut stack = vec![(root, false)];
        visited[root] = true;
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                order.push(node);
                continue;
            }
            stack.push((node, true));
            for &c in &adj[node] {
                if !visited[c] {
                    visited[c] = true;
                    stack.push((c, false));
                }
            }
        }
    }
    let ordered: Vec<Vec<usize>> = order.into_iter().map(|i| cliques.cliques[i].clone()).collect();
    debug_assert!(validate_rip(&ordered));
    Ok(CliqueList { cliques: ordered })
}

/// Junction tree (forest for disconnected graphs) on the maximal cliques.
#[derive(Clone, Debug)]
pub struct JunctionTree {
    pub cliques: Vec<Vec<usize>>,
    /// Tree edges as clique index pairs (i < j).
    pub edges: Vec<(usize, usize)>,
    /// Separator `C_i ∩ C_j` per tree edge.
    pub separators: Vec<Vec<usize>>,
    /// Per edge: vertices strictly on each side of the separator.
    pub left_right: Vec<(Vec<usize>, Vec<usize>)>,
}

impl JunctionTree {
    /// Clique-intersection property: for any two cliques, their intersection
    /// is contained in every clique on the tree path between them.
    pub fn validate(&self) -> bool {
        let t = self.cliques.len();
        let masks: Vec<u64> = self.cliques.iter().map(|c| vec_to_mask(c)).collect();
        let mut adj = vec![Vec::new(); t];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for i in 0..t {
            // BFS recording paths from i.
            let mut prev = vec![usize::MAX; t];
            let mut seen = vec![false; t];
            seen[i] = true;
            let mut queue = std::collections::VecDeque::from([i]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        prev[w] = u;
                        queue.push_back(w);
                    }
                }
            }
            for j in 0..t {
                if i == j {
                    continue;
                }
                let inter = masks[i] & masks[j];
                if !seen[j] {
                    if inter != 0 {
                        return false;
                    }
                    continue;
                }
                let mut node = j;
                while node != i {
                    if inter & !masks[node] != 0 {
                        return false;
                    }
                    node = prev[node];
                }
            }
        }
        true
    }
}

pub fn junction_tree(g: &Graph) -> Result<JunctionTree> {
    let cliques = maximal_cliques(g);
    junction_tree_from(g, &cliques)
}

fn junction_tree_from(g: &Graph, cliques: &CliqueList) -> Result<JunctionTree> {
    let (chordal, _) = is_chordal(g);
    if !chordal {
        return Err(Error::NotChordal);
    }
    let t = cliques.len();
    let masks: Vec<u64> = cliques.cliques.iter().map(|c| vec_to_mask(c)).collect();
    // Maximum-weight spanning forest on the clique graph, weights |C_i ∩ C_j|.
    // Ties broken by lexicographic clique index order.
    let mut candidates = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            let w = (masks[i] & masks[j]).count_ones();
            if w > 0 {
                candidates.push((std::cmp::Reverse(w), i, j));
            }
        }
    }
    candidates.sort();
    let mut parent: Vec<usize> = (0..t).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut edges = Vec::new();
    for (_, i, j) in candidates {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            edges.push((i, j));
        }
    }
    edges.sort();
    let separators: Vec<Vec<usize>> =
        edges.iter().map(|&(i, j)| mask_to_vec(masks[i] & masks[j])).collect();
    // Left/right vertex sets per edge: split the forest at the edge.
    let mut adj = vec![Vec::new(); t];
    for &(i, j) in &edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut left_right = Vec::new();
    for (k, &(i, j)) in edges.iter().enumerate() {
        let side = |start: usize| -> u64 {
            let mut seen = vec![false; t];
            seen[start] = true;
            let mut mask = masks[start];
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] && !((u == i && w == j) || (u == j && w == i)) {
                        seen[w] = true;
                        mask |= masks[w];
                        queue.push_back(w);
                    }
                }
            }
            mask
        };
        let sep = vec_to_mask(&separators[k]);
        let li = side(i) & !sep;
        let rj = side(j) & !sep;
        left_right.push((mask_to_vec(li), mask_to_vec(rj)));
    }
    let jt = JunctionTree { cliques: cliques.cliques.clone(), edges, separators, left_right };
    debug_assert!(jt.validate());
    Ok(jt)
}

/// Chordal cover by greedy minimum-fill elimination. The cover is heuristic,
/// not guaranteed minimum; a chordal input comes back unchanged.
pub fn chordal_cover(g: &Graph) -> Graph {
    let d = g.d();
    let mut adj: Vec<u64> = (0..=d).map(|v| if v == 0 { 0 } else { g.neighbors_mask(v) }).collect();
    let mut remaining = g.all_mask();
    let mut new_edges: Vec<(usize, usize)> = g.edges().collect();
    while remaining != 0 {
        let fill = |v: usize, adj: &[u64], remaining: u64| -> usize {
            let nbrs = mask_to_vec(adj[v] & remaining);
            let mut cnt = 0;
            for (a, &u) in nbrs.iter().enumerate() {
                for &w in &nbrs[a + 1..] {
                    if adj[u] & (1 << (w - 1)) == 0 {
                        cnt += 1;
                    }
                }
            }
            cnt
        };
        let v = mask_to_vec(remaining)
            .into_iter()
            .min_by_key(|&v| (fill(v, &adj, remaining), v))
            .unwrap();
        let nbrs = mask_to_vec(adj[v] & remaining);
        for (a, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[a + 1..] {
                if adj[u] & (1 << (w - 1)) == 0 {
                    adj[u] |= 1 << (w - 1);
                    adj[w] |= 1 << (u - 1);
                    new_edges.push((u.min(w), u.max(w)));
                }
            }
        }
        remaining &= !(1 << (v - 1));
    }
    Graph::new(d, &new_edges).expect("cover edges valid")
}

/// Global Markov statement `A ⫫ B | S` with `{A,B,S}` a partition of the
/// vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovStatement {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub s: Vec<usize>,
}

/// True if every path from `a` to `b` passes through `s`.
pub fn separates(g: &Graph, a: u64, b: u64, s: u64) -> bool {
    // BFS from a in the graph with s deleted.
    let mut seen = a & !s;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        for v in mask_to_vec(frontier) {
            next |= g.neighbors_mask(v) & !s & !seen;
        }
        seen |= next;
        frontier = next;
    }
    seen & b == 0
}

/// Enumerates all global Markov statements `A ⫫ B | S` with `{A,B,S}` a
/// partition of the vertices, deduplicated under swapping A and B.
pub fn markov_statements(g: &Graph, limit: usize) -> Result<Vec<MarkovStatement>> {
    let d = g.d();
    if d > limit {
        return Err(Error::TooLarge { d, limit });
    }
    let mut out = Vec::new();
    let mut labels = vec![0u8; d];
    // 3^d assignments of {A, B, S}.
    loop {
        let mut a = 0u64;
        let mut b = 0u64;
        let mut s = 0u64;
        for (i, &l) in labels.iter().enumerate() {
            match l {
                0 => a |= 1 << i,
                1 => b |= 1 << i,
                _ => s |= 1 << i,
            }
        }
        // Canonical orientation: lowest vertex of A ∪ B lies in A.
        let ab = a | b;
        if a != 0 && b != 0 && ab & a & ab.wrapping_neg() != 0 && separates(g, a, b, s) {
            out.push(MarkovStatement {
                a: mask_to_vec(a),
                b: mask_to_vec(b),
                s: mask_to_vec(s),
            });
        }
        // Increment base-3 counter.
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            labels[i] += 1;
            if labels[i] < 3 {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

/// Connected components as sorted vertex sets, ordered by smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let d = g.d();
    let mut seen = 0u64;
    let mut comps = Vec::new();
    for v in 1..=d {
        if seen & (1 << (v - 1)) != 0 {
            continue;
        }
        let mut comp = 1u64 << (v - 1);
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u64;
            for u in mask_to_vec(frontier) {
                next |= g.neighbors_mask(u) & !comp;
            }
            comp |= next;
            frontier = next;
        }
        seen |= comp;
        comps.push(mask_to_vec(comp));
    }
    comps
}

/// Induced subgraph on `vertices` with vertices relabeled `1..=k` in the
/// order given. Returns the subgraph and the map from new label to original.
pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> (Graph, Vec<usize>) {
    let mut edges = Vec::new();
    for (i, &u) in vertices.iter().enumerate() {
        for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
            if g.has_edge(u, v) {
                edges.push((i + 1, j + 1));
            }
        }
    }
    (Graph::new(vertices.len(), &edges).unwrap(), vertices.to_vec())
}
