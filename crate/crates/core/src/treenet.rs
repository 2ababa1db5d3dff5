//! Shape selection for tree tensor networks.
//!
//! A rooted tree has one leaf per tensor mode; every internal node `v` covers
//! the union `S_v` of its children's modes and the root covers all modes. Each
//! non-root node owns the edge to its parent and that edge carries a rank
//! `R_v`. Storage cost is `Σ_leaves I_v R_v + Σ_internal ∏_{e ∈ E_v} R_e`
//! where `E_v` are all edges incident to `v`. The objective adds, for every
//! non-root node, the leading `R_v` squared singular values of `X_(S_v)`.
//! A depth-one tree is exactly the Tucker packing problem.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packing::{check_epsilon, grid_values, PackingInstance};
use crate::spectra::subset_sq_singular_values;
use crate::tensor::DenseTensor;

/// One node of a topology file. Leaves carry a 1-based `mode`, internal nodes
/// list `children` by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeTopology {
    ids: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// 0-based mode of each leaf.
    modes: Vec<Option<usize>>,
    parent: Vec<Option<usize>>,
    subsets: Vec<Vec<usize>>,
    root: usize,
    dims: Vec<usize>,
    /// Non-root nodes in pre-order; this is the edge order used everywhere.
    edges: Vec<usize>,
}

impl TreeTopology {
    /// Validates a topology against the tensor dimensions.
    pub fn new(file: &TopologyFile, dims: &[usize]) -> Result<Self> {
        let bad = |msg: String| Error::InvalidTopology(msg);
        let n_nodes = file.nodes.len();
        let mut index = HashMap::with_capacity(n_nodes);
        for (i, node) in file.nodes.iter().enumerate() {
            if index.insert(node.id, i).is_some() {
                return Err(bad(format!("duplicate node id {}", node.id)));
            }
        }
        let mut children = vec![Vec::new(); n_nodes];
        let mut modes = vec![None; n_nodes];
        let mut parent = vec![None; n_nodes];
        for (i, node) in file.nodes.iter().enumerate() {
            match (node.mode, node.children.is_empty()) {
                (Some(_), false) => {
                    return Err(bad(format!("node {} has both a mode and children", node.id)))
                }
                (None, true) => {
                    return Err(bad(format!("node {} has neither a mode nor children", node.id)))
                }
                (Some(m), true) => {
                    if m == 0 || m > dims.len() {
                        return Err(bad(format!(
                            "leaf {} has mode {m}, expected 1..={}",
                            node.id,
                            dims.len()
                        )));
                    }
                    modes[i] = Some(m - 1);
                }
                (None, false) => {
                    for c in &node.children {
                        let &ci = index
                            .get(c)
                            .ok_or_else(|| bad(format!("unknown child id {c}")))?;
                        if parent[ci].replace(i).is_some() {
                            return Err(bad(format!("node {c} has two parents")));
                        }
                        children[i].push(ci);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n_nodes).filter(|&i| parent[i].is_none()).collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(bad("no root (the parent relation has a cycle)".into())),
            _ => return Err(bad(format!("{} nodes have no parent", roots.len()))),
        };
        if modes[root].is_some() {
            return Err(bad("the root must be an internal node".into()));
        }

        // pre-order walk; also detects cycles hanging off the root
        let mut edges = Vec::with_capacity(n_nodes.saturating_sub(1));
        let mut seen = vec![false; n_nodes];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                return Err(bad("cycle detected".into()));
            }
            if v != root {
                edges.push(v);
            }
            stack.extend(children[v].iter().rev());
        }
        if seen.iter().any(|s| !s) {
            return Err(bad("some nodes are not reachable from the root".into()));
        }

        let mut subsets = vec![Vec::new(); n_nodes];
        for &v in edges.iter().rev().chain(std::iter::once(&root)) {
            subsets[v] = match modes[v] {
                Some(m) => vec![m],
                None => {
                    let mut s: Vec<usize> =
                        children[v].iter().flat_map(|&c| subsets[c].clone()).collect();
                    s.sort_unstable();
                    s
                }
            };
        }
        let all: Vec<usize> = (0..dims.len()).collect();
        if subsets[root] != all {
            return Err(bad(format!(
                "leaves must cover every mode exactly once, got {:?}",
                subsets[root].iter().map(|m| m + 1).collect::<Vec<_>>()
            )));
        }

        Ok(Self {
            ids: file.nodes.iter().map(|n| n.id).collect(),
            children,
            modes,
            parent,
            subsets,
            root,
            dims: dims.to_vec(),
            edges,
        })
    }

    /// Root with one leaf per mode: the Tucker format.
    pub fn depth_one(dims: &[usize]) -> Result<Self> {
        let n = dims.len();
        let mut nodes = vec![NodeSpec {
            id: 0,
            children: (1..=n).collect(),
            mode: None,
        }];
        nodes.extend((1..=n).map(|m| NodeSpec {
            id: m,
            children: Vec::new(),
            mode: Some(m),
        }));
        Self::new(&TopologyFile { nodes }, dims)
    }

    /// Balanced binary tree over modes in order (hierarchical Tucker).
    pub fn balanced_binary(dims: &[usize]) -> Result<Self> {
        fn build(lo: usize, hi: usize, nodes: &mut Vec<NodeSpec>) -> usize {
            let id = nodes.len();
            nodes.push(NodeSpec {
                id,
                children: Vec::new(),
                mode: None,
            });
            if hi - lo == 1 {
                nodes[id].mode = Some(lo + 1);
            } else {
                let mid = lo + (hi - lo).div_ceil(2);
                let a = build(lo, mid, nodes);
                let b = build(mid, hi, nodes);
                nodes[id].children = vec![a, b];
            }
            id
        }
        if dims.len() < 2 {
            return Err(Error::InvalidTopology("a binary tree needs at least two modes".into()));
        }
        let mut nodes = Vec::new();
        build(0, dims.len(), &mut nodes);
        Self::new(&TopologyFile { nodes }, dims)
    }

    pub fn from_json(text: &str, dims: &[usize]) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text)?;
        Self::new(&file, dims)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Non-root nodes in pre-order.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn id(&self, v: usize) -> usize {
        self.ids[v]
    }

    pub fn subset(&self, v: usize) -> &[usize] {
        &self.subsets[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.modes[v].is_some()
    }

    pub fn internal_count(&self) -> usize {
        self.modes.iter().filter(|m| m.is_none()).count()
    }

    pub fn is_depth_one(&self) -> bool {
        self.edges.iter().all(|&v| self.is_leaf(v))
    }

    /// Row count `P_v = ∏_{n ∈ S_v} I_n` of `X_(S_v)`, saturating.
    pub fn rows(&self, v: usize) -> u128 {
        self.subsets[v]
            .iter()
            .fold(1u128, |a, &m| a.saturating_mul(self.dims[m] as u128))
    }

    /// Column count `Q_v` of `X_(S_v)`.
    pub fn cols(&self, v: usize) -> u128 {
        let total = self.dims.iter().fold(1u128, |a, &d| a.saturating_mul(d as u128));
        total / self.rows(v)
    }

    /// Largest useful rank on the edge above `v`, `min(P_v, Q_v)`.
    pub fn rank_cap(&self, v: usize) -> usize {
        usize::try_from(self.rows(v).min(self.cols(v))).unwrap_or(usize::MAX)
    }

    /// Storage cost for per-node edge ranks (`ranks[root]` is ignored).
    pub fn cost(&self, ranks: &[usize]) -> Result<u128> {
        self.check_rank_vector(ranks)?;
        if let Some(&v) = self.edges.iter().find(|&&v| ranks[v] == 0) {
            return Err(Error::InvalidRank(format!("edge above node {} has rank 0", self.ids[v])));
        }
        Ok(self.cost_unchecked(ranks))
    }

    fn check_rank_vector(&self, ranks: &[usize]) -> Result<()> {
        if ranks.len() != self.node_count() {
            return Err(Error::InvalidRank(format!(
                "{} ranks for {} nodes",
                ranks.len(),
                self.node_count()
            )));
        }
        Ok(())
    }

    pub(crate) fn cost_unchecked(&self, ranks: &[usize]) -> u128 {
        let mut total = 0u128;
        for v in 0..self.node_count() {
            let term = match self.modes[v] {
                Some(m) => (self.dims[m] as u128) * ranks[v] as u128,
                None => {
                    let below = self.children[v]
                        .iter()
                        .fold(1u128, |a, &c| a.saturating_mul(ranks[c] as u128));
                    match self.parent[v] {
                        Some(_) => below.saturating_mul(ranks[v] as u128),
                        None => below,
                    }
                }
            };
            total = total.saturating_add(term);
        }
        total
    }

    /// Cost with every edge at rank one: `Σ I_n + |internal nodes|`.
    pub fn min_cost(&self) -> u128 {
        self.cost_unchecked(&vec![1; self.node_count()])
    }
}

/// Tree packing instance. `values[v]` holds the non-increasing list for the
/// edge above `v` (empty for the root), conceptually zero-extended to `P_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePackingInstance {
    topology: TreeTopology,
    values: Vec<Vec<f64>>,
    prefix: Vec<Vec<f64>>,
    budget: u64,
}

impl TreePackingInstance {
    pub fn new(topology: TreeTopology, values: Vec<Vec<f64>>, budget: u64) -> Result<Self> {
        if values.len() != topology.node_count() {
            return Err(Error::InvalidInstance(format!(
                "{} value lists for {} nodes",
                values.len(),
                topology.node_count()
            )));
        }
        let minimum = topology.min_cost();
        if (budget as u128) < minimum {
            return Err(Error::BudgetTooSmall {
                budget,
                minimum: u64::try_from(minimum).unwrap_or(u64::MAX),
            });
        }
        let mut values = values;
        for &v in topology.edges() {
            let vals = &mut values[v];
            if vals.is_empty() || vals.len() as u128 > topology.rows(v) {
                return Err(Error::InvalidInstance(format!(
                    "node {}: {} values, expected 1..={}",
                    topology.id(v),
                    vals.len(),
                    topology.rows(v)
                )));
            }
            if vals.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "node {}: non-finite value",
                    topology.id(v)
                )));
            }
            let mut running = f64::INFINITY;
            for x in vals.iter_mut() {
                running = running.min(x.max(0.0));
                *x = running;
            }
        }
        values[topology.root()].clear();
        let prefix = values
            .iter()
            .map(|vals| {
                std::iter::once(0.0)
                    .chain(vals.iter().scan(0.0, |acc, &x| {
                        *acc += x;
                        Some(*acc)
                    }))
                    .collect()
            })
            .collect();
        Ok(Self {
            topology,
            values,
            prefix,
            budget,
        })
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Largest rank searched on the edge above `v`.
    pub fn rank_cap(&self, v: usize) -> usize {
        self.topology.rank_cap(v)
    }

    fn prefix_at(&self, v: usize, rank: usize) -> f64 {
        let p = &self.prefix[v];
        p[rank.min(p.len() - 1)]
    }

    /// `Σ_v Σ_{i ≤ R_v} a_i^{(v)}` over edges in pre-order.
    pub fn objective(&self, ranks: &[usize]) -> Result<f64> {
        self.topology.check_rank_vector(ranks)?;
        for &v in self.topology.edges() {
            if ranks[v] == 0 || ranks[v] as u128 > self.topology.rows(v) {
                return Err(Error::InvalidRank(format!(
                    "rank {} on the edge above node {} is outside [1, {}]",
                    ranks[v],
                    self.topology.id(v),
                    self.topology.rows(v)
                )));
            }
        }
        Ok(self.objective_unchecked(ranks))
    }

    fn objective_unchecked(&self, ranks: &[usize]) -> f64 {
        self.topology
            .edges()
            .iter()
            .fold(0.0, |acc, &v| acc + self.prefix_at(v, ranks[v]))
    }

    /// For depth-one trees, the equivalent Tucker packing instance with modes
    /// in the tree's leaf order and ranks capped like the tree search.
    pub fn induced_tucker(&self) -> Option<PackingInstance> {
        let topo = &self.topology;
        if !topo.is_depth_one() {
            return None;
        }
        let leaves: Vec<usize> = topo.edges().to_vec();
        let dims: Vec<usize> = leaves.iter().map(|&v| topo.dims[topo.modes[v].unwrap()]).collect();
        let values: Vec<Vec<f64>> = leaves
            .iter()
            .map(|&v| {
                let mut vals = self.values[v].clone();
                vals.resize(self.rank_cap(v), 0.0);
                vals
            })
            .collect();
        PackingInstance::new(dims, values, self.budget).ok()
    }
}

/// Values for every node from the squared singular values of `X_(S_v)`.
pub fn tree_instance_from_tensor(
    x: &DenseTensor,
    topology: &TreeTopology,
    budget: u64,
) -> Result<TreePackingInstance> {
    if x.shape() != topology.dims() {
        return Err(Error::InvalidTopology(format!(
            "topology built for {:?}, tensor has shape {:?}",
            topology.dims(),
            x.shape()
        )));
    }
    let mut values = vec![Vec::new(); topology.node_count()];
    for &v in topology.edges() {
        values[v] = subset_sq_singular_values(x, topology.subset(v))?;
    }
    TreePackingInstance::new(topology.clone(), values, budget)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    /// Per-node edge ranks; the root entry is 1 and carries no meaning.
    pub ranks: Vec<usize>,
    pub objective: f64,
    pub cost: u128,
    pub elapsed: Duration,
}

/// Wire form: edge ranks keyed by the child node's id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSolutionJson {
    pub ranks: BTreeMap<String, usize>,
    pub objective: f64,
    pub cost: u64,
    pub elapsed_ms: f64,
}

impl TreeSolution {
    pub fn to_json(&self, topology: &TreeTopology) -> TreeSolutionJson {
        TreeSolutionJson {
            ranks: topology
                .edges()
                .iter()
                .map(|&v| (topology.id(v).to_string(), self.ranks[v]))
                .collect(),
            objective: self.objective,
            cost: u64::try_from(self.cost).unwrap_or(u64::MAX),
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// Grid search over per-edge ranks `⌈(1+ε)^k⌉ ≤ min(P_v, Q_v)`, visiting edges
/// in pre-order with ascending ranks; the first strictly better feasible
/// assignment wins ties.
pub fn solve_tree_grid(inst: &TreePackingInstance, eps: f64) -> Result<TreeSolution> {
    check_epsilon(eps, 1.0, true, "grid search needs 0 < ε ≤ 1")?;
    let start = Instant::now();
    let topo = inst.topology();
    let grids: Vec<Vec<usize>> = topo
        .edges()
        .iter()
        .map(|&v| grid_values(eps, inst.rank_cap(v)))
        .collect();

    let mut walk = TreeWalk {
        inst,
        grids: &grids,
        budget: inst.budget() as u128,
        ranks: vec![1; topo.node_count()],
        best: None,
    };
    walk.descend(0, 0.0);
    let (ranks, objective) = walk.best.ok_or(Error::BudgetTooSmall {
        budget: inst.budget(),
        minimum: u64::try_from(topo.min_cost()).unwrap_or(u64::MAX),
    })?;
    let cost = topo.cost_unchecked(&ranks);
    Ok(TreeSolution {
        ranks,
        objective,
        cost,
        elapsed: start.elapsed(),
    })
}

struct TreeWalk<'a> {
    inst: &'a TreePackingInstance,
    grids: &'a [Vec<usize>],
    budget: u128,
    ranks: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl TreeWalk<'_> {
    fn descend(&mut self, depth: usize, value: f64) {
        let edges = self.inst.topology().edges();
        if depth == edges.len() {
            if self.best.as_ref().is_none_or(|(_, b)| value > *b) {
                self.best = Some((self.ranks.clone(), value));
            }
            return;
        }
        let v = edges[depth];
        for &rank in &self.grids[depth] {
            self.ranks[v] = rank;
            // open edges sit at rank one; cost is monotone so larger ranks fail too
            if self.inst.topology().cost_unchecked(&self.ranks) > self.budget {
                break;
            }
            let next = value + self.inst.prefix_at(v, rank);
            self.descend(depth + 1, next);
        }
        self.ranks[v] = 1;
    }
}
