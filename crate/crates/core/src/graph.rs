//! Finite weighted graphs, builders for the example families, coupling, and
//! vertex deletion. Vertex ids are 1-based and each builder's numbering is
//! frozen because downstream fixtures reference explicit labels.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::eigen::SymMatrix;
use crate::error::{Result, SpectraError};
use crate::exact::{rational_from_decimal, rational_from_f64};
use crate::families::FamilySpec;

/// A positive weight carried both as f64 and as an exact rational.
/// Every f64 is a dyadic rational, so the exact value is always available;
/// decimal strings ("1.4") parse to the exact decimal fraction instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    value: f64,
    exact: BigRational,
}

impl Weight {
    pub fn from_f64(value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(SpectraError::InvalidParameter(format!(
                "weights must be strictly positive, got {value}"
            )));
        }
        Ok(Self { value, exact: rational_from_f64(value) })
    }

    pub fn from_exact(exact: BigRational) -> Result<Self> {
        if !exact.is_positive() {
            return Err(SpectraError::InvalidParameter(
                "weights must be strictly positive".into(),
            ));
        }
        let value = exact.to_f64().unwrap_or(f64::NAN);
        Ok(Self { value, exact })
    }

    pub fn from_decimal(s: &str) -> Result<Self> {
        let exact = rational_from_decimal(s)
            .ok_or_else(|| SpectraError::Input(format!("bad decimal weight {s:?}")))?;
        Self::from_exact(exact)
    }

    pub fn one() -> Self {
        Self { value: 1.0, exact: BigRational::one() }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

/// Finite simple undirected graph with positive edge weights.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, Weight)>,
}

impl WeightedGraph {
    /// Build from an explicit edge list; ids are 1..=n, loops and duplicate
    /// pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let ws = edges
            .iter()
            .map(|&(i, j, w)| Ok((i, j, Weight::from_f64(w)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_weighted_edges(n, ws)
    }

    pub fn from_weighted_edges(n: usize, edges: Vec<(usize, usize, Weight)>) -> Result<Self> {
        if n == 0 {
            return Err(SpectraError::InvalidParameter("graph needs n >= 1".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            if i == j {
                return Err(SpectraError::InvalidParameter(format!("loop at vertex {i}")));
            }
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(SpectraError::UnknownVertex { vertex: v, order: n });
                }
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(SpectraError::InvalidParameter(format!(
                    "duplicate edge {{{}, {}}}",
                    key.0, key.1
                )));
            }
            out.push((key.0, key.1, w));
        }
        out.sort_by_key(|e| (e.0, e.1));
        Ok(Self { n, edges: out })
    }

    /// Path P_k with vertices 1..=k in order.
    pub fn path(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(SpectraError::InvalidParameter("path needs k >= 1".into()));
        }
        let edges: Vec<_> = (1..k).map(|i| (i, i + 1, Weight::one())).collect();
        Self::from_weighted_edges(k, edges)
    }

    /// Cycle C_k with vertices 1..=k around the cycle.
    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(SpectraError::InvalidParameter("cycle needs k >= 3".into()));
        }
        let mut edges: Vec<_> = (1..k).map(|i| (i, i + 1, Weight::one())).collect();
        edges.push((1, k, Weight::one()));
        Self::from_weighted_edges(k, edges)
    }

    /// Weighted star S_n(w): leaves 1..=n, root n+1, edge (i, root) of
    /// weight w_i.
    pub fn star(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(SpectraError::InvalidParameter("star needs >= 2 leaves".into()));
        }
        let n = weights.len();
        let edges = weights
            .iter()
            .enumerate()
            .map(|(k, &w)| Ok((k + 1, n + 1, Weight::from_f64(w)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_weighted_edges(n + 1, edges)
    }

    pub fn star_weighted(weights: &[Weight]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(SpectraError::InvalidParameter("star needs >= 2 leaves".into()));
        }
        let n = weights.len();
        let edges = weights
            .iter()
            .enumerate()
            .map(|(k, w)| (k + 1, n + 1, w.clone()))
            .collect();
        Self::from_weighted_edges(n + 1, edges)
    }

    /// Complete graph K_n on 1..=n, unit weights.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(SpectraError::InvalidParameter("complete graph needs n >= 2".into()));
        }
        let mut edges = vec![];
        for i in 1..=n {
            for j in (i + 1)..=n {
                edges.push((i, j, Weight::one()));
            }
        }
        Self::from_weighted_edges(n, edges)
    }

    /// Flower: cycles of the given orders glued at one common root.
    /// Petal j of order s_j contributes s_j - 1 consecutive vertices; the
    /// root is the last vertex. For petal orders all 3 this reproduces the
    /// (C_3)^n numbering where copy j is {2j-1, 2j, root}.
    pub fn flower(petal_orders: &[usize]) -> Result<Self> {
        if petal_orders.len() < 2 {
            return Err(SpectraError::InvalidParameter("flower needs >= 2 petals".into()));
        }
        if petal_orders.iter().any(|&s| s < 3) {
            return Err(SpectraError::InvalidParameter("petal orders must be >= 3".into()));
        }
        let m: usize = petal_orders.iter().map(|s| s - 1).sum();
        let root = m + 1;
        let mut edges = vec![];
        let mut next = 1usize;
        for &s in petal_orders {
            let first = next;
            let last = next + (s - 2);
            for v in first..last {
                edges.push((v, v + 1, Weight::one()));
            }
            edges.push((first, root, Weight::one()));
            edges.push((last, root, Weight::one()));
            next = last + 1;
        }
        Self::from_weighted_edges(root, edges)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(i, j, w)| (*i, *j, w.value()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(SpectraError::UnknownVertex { vertex: v, order: self.n });
        }
        Ok(())
    }

    pub fn neighbors(&self, v: usize) -> Vec<(usize, f64)> {
        let mut out = vec![];
        for (i, j, w) in &self.edges {
            if *i == v {
                out.push((*j, w.value()));
            } else if *j == v {
                out.push((*i, w.value()));
            }
        }
        out
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|(_, _, w)| w.exact().is_one())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1usize];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for (u, _) in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen[1..].iter().all(|&s| s)
    }

    /// Coupling by the bridge {v1, v2'} of weight d: disjoint union plus one
    /// new edge from v1 in self to (shifted) v2 in other.
    pub fn couple(&self, v1: usize, other: &Self, v2: usize, d: f64) -> Result<Self> {
        self.check_vertex(v1)?;
        other.check_vertex(v2)?;
        let bridge = Weight::from_f64(d)?;
        let mut edges = self.edges.clone();
        for (i, j, w) in &other.edges {
            edges.push((i + self.n, j + self.n, w.clone()));
        }
        edges.push((v1, v2 + self.n, bridge));
        Self::from_weighted_edges(self.n + other.n, edges)
    }

    /// Induced subgraph after deleting `vs`, with contiguous renumbering.
    pub fn delete_vertices(&self, vs: &BTreeSet<usize>) -> Result<Deletion> {
        for &v in vs {
            self.check_vertex(v)?;
        }
        let mut old_to_new = vec![None; self.n + 1];
        let mut next = 1usize;
        for v in 1..=self.n {
            if !vs.contains(&v) {
                old_to_new[v] = Some(next);
                next += 1;
            }
        }
        let kept = next - 1;
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter_map(|(i, j, w)| {
                match (old_to_new[*i], old_to_new[*j]) {
                    (Some(a), Some(b)) => Some((a, b, w.clone())),
                    _ => None,
                }
            })
            .collect();
        let graph = if kept == 0 {
            None
        } else {
            Some(Self::from_weighted_edges(kept, edges)?)
        };
        Ok(Deletion { graph, old_to_new })
    }

    /// Dense symmetric adjacency matrix (zero diagonal).
    pub fn adjacency_matrix(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.n);
        for (i, j, w) in &self.edges {
            m.set_sym(i - 1, j - 1, w.value());
        }
        m
    }

    /// Exact rational adjacency matrix.
    pub fn adjacency_exact(&self) -> Vec<Vec<BigRational>> {
        let mut m = vec![vec![BigRational::zero(); self.n]; self.n];
        for (i, j, w) in &self.edges {
            m[i - 1][j - 1] = w.exact().clone();
            m[j - 1][i - 1] = w.exact().clone();
        }
        m
    }

    /// All simple cycles (length >= 3) through `v`, each cycle listed once
    /// and reported by its vertex set. Distinct cycles on the same vertices
    /// (possible in dense graphs) give repeated sets; Schwenk's recursion
    /// needs every cycle. Enumeration is capped at 10^4 cycles.
    pub fn simple_cycles_through(&self, v: usize) -> Result<Vec<BTreeSet<usize>>> {
        self.check_vertex(v)?;
        const CAP: usize = 10_000;
        let mut cycles: Vec<BTreeSet<usize>> = vec![];
        let mut path = vec![v];
        let mut on_path = vec![false; self.n + 1];
        on_path[v] = true;
        // Each cycle through v is discovered once by requiring the second
        // vertex of the walk to be smaller than the vertex that closes it.
        fn dfs(
            g: &WeightedGraph,
            v: usize,
            path: &mut Vec<usize>,
            on_path: &mut Vec<bool>,
            cycles: &mut Vec<BTreeSet<usize>>,
            cap: usize,
        ) -> Result<()> {
            let cur = *path.last().unwrap();
            for (u, _) in g.neighbors(cur) {
                if u == v {
                    if path.len() >= 3 && path[1] < *path.last().unwrap() {
                        if cycles.len() >= cap {
                            return Err(SpectraError::CycleCap(cap));
                        }
                        cycles.push(path.iter().copied().collect());
                    }
                    continue;
                }
                if !on_path[u] {
                    path.push(u);
                    on_path[u] = true;
                    dfs(g, v, path, on_path, cycles, cap)?;
                    on_path[u] = false;
                    path.pop();
                }
            }
            Ok(())
        }
        dfs(self, v, &mut path, &mut on_path, &mut cycles, CAP)?;
        Ok(cycles)
    }
}

/// Result of `delete_vertices`: the induced subgraph (None when every vertex
/// was deleted) and the old-id -> new-id map.
#[derive(Debug, Clone)]
pub struct Deletion {
    pub graph: Option<WeightedGraph>,
    pub old_to_new: Vec<Option<usize>>,
}

/// One infinite tail: attachment vertex, bridge weight, and the leading tail
/// weights a_1..a_q (implicitly 1 afterwards).
#[derive(Debug, Clone)]
pub struct TailSpec {
    pub attach: usize,
    pub bridge: Weight,
    pub tail_weights: Vec<Weight>,
}

impl TailSpec {
    pub fn unit(attach: usize) -> Self {
        Self { attach, bridge: Weight::one(), tail_weights: vec![] }
    }

    pub fn is_unit(&self) -> bool {
        self.bridge.exact().is_one() && self.tail_weights.iter().all(|w| w.exact().is_one())
    }
}

/// An infinite graph: either a finite graph with tails, or one of the named
/// families (ladders, chains of cycles, Toeplitz, comb, ...).
#[derive(Debug, Clone)]
pub enum InfiniteGraphSpec {
    Tailed { finite: WeightedGraph, tails: Vec<TailSpec> },
    Family(FamilySpec),
}

impl InfiniteGraphSpec {
    pub fn tailed(finite: WeightedGraph, tails: Vec<TailSpec>) -> Result<Self> {
        if tails.is_empty() {
            return Err(SpectraError::InvalidParameter(
                "tailed spec needs at least one tail".into(),
            ));
        }
        for t in &tails {
            finite.check_vertex(t.attach)?;
        }
        Ok(Self::Tailed { finite, tails })
    }
}

// ---------------------------------------------------------------------------
// JSON input format
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightJson {
    Number(f64),
    Decimal(String),
}

impl WeightJson {
    fn to_weight(&self) -> Result<Weight> {
        match self {
            WeightJson::Number(x) => Weight::from_f64(*x),
            WeightJson::Decimal(s) => Weight::from_decimal(s),
        }
    }
}

#[derive(Deserialize)]
struct TailJson {
    attach: usize,
    #[serde(default)]
    bridge: Option<WeightJson>,
    #[serde(default)]
    tail_weights: Vec<WeightJson>,
}

#[derive(Deserialize)]
struct FamilyJson {
    id: String,
    #[serde(default)]
    params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct GraphJson {
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    edges: Vec<(usize, usize, WeightJson)>,
    #[serde(default)]
    tails: Vec<TailJson>,
    #[serde(default)]
    family: Option<FamilyJson>,
}

/// Parse the documented JSON graph format into an [`InfiniteGraphSpec`].
pub fn parse_spec_json(text: &str) -> Result<InfiniteGraphSpec> {
    let parsed: GraphJson =
        serde_json::from_str(text).map_err(|e| SpectraError::Input(e.to_string()))?;
    if let Some(fam) = parsed.family {
        let spec = FamilySpec::from_id_params(&fam.id, &fam.params)?;
        return Ok(InfiniteGraphSpec::Family(spec));
    }
    let n = parsed
        .n
        .ok_or_else(|| SpectraError::Input("missing \"n\" for a tailed graph".into()))?;
    let edges = parsed
        .edges
        .iter()
        .map(|(i, j, w)| Ok((*i, *j, w.to_weight()?)))
        .collect::<Result<Vec<_>>>()?;
    let finite = WeightedGraph::from_weighted_edges(n, edges)?;
    if parsed.tails.is_empty() {
        return Err(SpectraError::Input(
            "tailed graph spec needs a nonempty \"tails\" array".into(),
        ));
    }
    let tails = parsed
        .tails
        .iter()
        .map(|t| {
            Ok(TailSpec {
                attach: t.attach,
                bridge: match &t.bridge {
                    Some(w) => w.to_weight()?,
                    None => Weight::one(),
                },
                tail_weights: t
                    .tail_weights
                    .iter()
                    .map(|w| w.to_weight())
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    InfiniteGraphSpec::tailed(finite, tails)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_have_documented_sizes() {
        let s5 = WeightedGraph::star(&[1.0; 5]).unwrap();
        assert_eq!(s5.order(), 6);
        assert_eq!(s5.edge_count(), 5);
        let f = WeightedGraph::flower(&[3, 3]).unwrap();
        assert_eq!(f.order(), 5);
        assert_eq!(f.edge_count(), 6);
        let k5 = WeightedGraph::complete(5).unwrap();
        assert_eq!(k5.edge_count(), 10);
        assert!(WeightedGraph::cycle(2).is_err());
        assert!(WeightedGraph::flower(&[2, 3]).is_err());
    }

    #[test]
    fn flower_matches_paper_numbering() {
        // (C_3)^2: copy j is {2j-1, 2j, 5}
        let f = WeightedGraph::flower(&[3, 3]).unwrap();
        let e: Vec<_> = f.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(e, vec![(1, 2), (1, 5), (2, 5), (3, 4), (3, 5), (4, 5)]);
    }

    #[test]
    fn couple_counts() {
        let p2 = WeightedGraph::path(2).unwrap();
        let p3 = WeightedGraph::path(3).unwrap();
        let p5 = p2.couple(2, &p3, 1, 1.0).unwrap();
        assert_eq!(p5.order(), 5);
        assert_eq!(p5.edge_count(), 4);
        // couple K_3 to K_3 with bridge weight 2
        let k3 = WeightedGraph::complete(3).unwrap();
        let c = k3.couple(1, &k3, 1, 2.0).unwrap();
        assert_eq!(c.edge_count(), 7);
        let heavy: Vec<_> = c.edges().filter(|&(_, _, w)| w == 2.0).collect();
        assert_eq!(heavy, vec![(1, 4, 2.0)]);
    }

    #[test]
    fn delete_star_root_gives_isolated_leaves() {
        let s = WeightedGraph::star(&[1.0; 4]).unwrap();
        let del = s.delete_vertices(&BTreeSet::from([5])).unwrap();
        let g = del.graph.unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn delete_flower_root_gives_paths() {
        // flower with petals of orders (k_j + 1) leaves disjoint paths P_{k_j}
        let f = WeightedGraph::flower(&[4, 3]).unwrap();
        let del = f.delete_vertices(&BTreeSet::from([f.order()])).unwrap();
        let g = del.graph.unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(g.edge_count(), 3); // P_3 and P_2
    }

    #[test]
    fn delete_endpoint_of_p3() {
        let p3 = WeightedGraph::path(3).unwrap();
        let del = p3.delete_vertices(&BTreeSet::from([3])).unwrap();
        let g = del.graph.unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(del.old_to_new[1], Some(1));
        assert_eq!(del.old_to_new[3], None);
    }

    #[test]
    fn adjacency_is_symmetric_and_principal_submatrix() {
        let g = WeightedGraph::from_edges(
            5,
            &[(1, 2, 1.5), (2, 3, 0.5), (3, 4, 2.0), (4, 5, 1.0), (1, 5, 3.0)],
        )
        .unwrap();
        let a = g.adjacency_matrix();
        assert_eq!(a.symmetry_defect(), 0.0);
        // delete vertex 3 and compare against deleting row/column 3
        let del = g.delete_vertices(&BTreeSet::from([3])).unwrap();
        let b = del.graph.unwrap().adjacency_matrix();
        let keep = [0usize, 1, 3, 4];
        for (bi, &gi) in keep.iter().enumerate() {
            for (bj, &gj) in keep.iter().enumerate() {
                assert_eq!(b.get(bi, bj), a.get(gi, gj));
            }
        }
    }

    #[test]
    fn cycles_through_vertices() {
        let p5 = WeightedGraph::path(5).unwrap();
        assert!(p5.simple_cycles_through(2).unwrap().is_empty());
        let f = WeightedGraph::flower(&[3, 3]).unwrap();
        let cycles = f.simple_cycles_through(5).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().all(|c| c.len() == 3));
        let c6 = WeightedGraph::cycle(6).unwrap();
        let cycles = c6.simple_cycles_through(1).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 6);
    }

    #[test]
    fn cycles_match_brute_force_on_small_graphs() {
        // brute force: for every subset containing v, count the distinct
        // cyclic arrangements (v fixed first, reversal identified) whose
        // consecutive pairs are all edges
        fn brute(g: &WeightedGraph, v: usize) -> Vec<BTreeSet<usize>> {
            fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
                if items.is_empty() {
                    return vec![vec![]];
                }
                let mut out = vec![];
                for (k, &x) in items.iter().enumerate() {
                    let mut rest = items.to_vec();
                    rest.remove(k);
                    for mut tail in permutations(&rest) {
                        tail.insert(0, x);
                        out.push(tail);
                    }
                }
                out
            }
            let n = g.order();
            let adjacent = |x: usize, y: usize| g.neighbors(x).iter().any(|&(w, _)| w == y);
            let mut out = vec![];
            for mask in 1u32..(1 << n) {
                let set: Vec<usize> = (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
                if set.len() < 3 || !set.contains(&v) {
                    continue;
                }
                let others: Vec<usize> = set.iter().copied().filter(|&u| u != v).collect();
                for perm in permutations(&others) {
                    // identify reversed traversals
                    if perm[0] > perm[perm.len() - 1] {
                        continue;
                    }
                    let mut walk = vec![v];
                    walk.extend(&perm);
                    walk.push(v);
                    if walk.windows(2).all(|w| adjacent(w[0], w[1])) {
                        out.push(set.iter().copied().collect::<BTreeSet<usize>>());
                    }
                }
            }
            out.sort();
            out
        }
        let graphs = [
            WeightedGraph::complete(5).unwrap(),
            WeightedGraph::flower(&[3, 4]).unwrap(),
            WeightedGraph::cycle(7).unwrap(),
            WeightedGraph::from_edges(
                6,
                &[
                    (1, 2, 1.0),
                    (2, 3, 1.0),
                    (3, 1, 1.0),
                    (3, 4, 1.0),
                    (4, 5, 1.0),
                    (5, 6, 1.0),
                    (6, 4, 1.0),
                    (2, 5, 1.0),
                ],
            )
            .unwrap(),
        ];
        for g in &graphs {
            for v in 1..=g.order() {
                let mut mine = g.simple_cycles_through(v).unwrap();
                mine.sort();
                assert_eq!(mine, brute(g, v), "graph order {} vertex {v}", g.order());
            }
        }
    }

    #[test]
    fn json_roundtrip_tailed() {
        let text = r#"{
            "n": 3,
            "edges": [[1, 2, 1], [2, 3, "1.5"]],
            "tails": [{"attach": 3, "bridge": "0.5", "tail_weights": [2]}]
        }"#;
        let spec = parse_spec_json(text).unwrap();
        match spec {
            InfiniteGraphSpec::Tailed { finite, tails } => {
                assert_eq!(finite.order(), 3);
                assert_eq!(tails.len(), 1);
                assert_eq!(tails[0].attach, 3);
                assert_eq!(tails[0].bridge.value(), 0.5);
                assert_eq!(tails[0].tail_weights.len(), 1);
            }
            _ => panic!("expected tailed spec"),
        }
        assert!(parse_spec_json("{\"n\": 2}").is_err());
        assert!(parse_spec_json("not json").is_err());
    }
}
