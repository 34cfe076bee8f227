//! Discrete causal models: variables, DAGs, CPTs, exact joint tables.
//!
//! Variables are discrete (latent or observed) or continuous observation
//! blocks. Discrete state spaces are enumerated in mixed radix with the last
//! variable fastest, matching row-major table layout everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on enumerated joint state spaces.
pub const MAX_JOINT_STATES: usize = 1 << 20;

/// Variable role in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Latent,
    ObservedDiscrete,
    ObservedContinuousBlock,
}

/// A node of the model graph.
///
/// `support` is the state count for discrete variables and is ignored for
/// continuous blocks; `dim` is the coordinate count of a continuous block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub kind: VarKind,
    #[serde(default = "default_support")]
    pub support: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_support() -> usize {
    2
}

fn default_dim() -> usize {
    1
}

impl Variable {
    pub fn latent(id: &str, support: usize) -> Self {
        Variable { id: id.into(), kind: VarKind::Latent, support, dim: 1 }
    }

    pub fn observed(id: &str, support: usize) -> Self {
        Variable { id: id.into(), kind: VarKind::ObservedDiscrete, support, dim: 1 }
    }

    pub fn block(id: &str, dim: usize) -> Self {
        Variable { id: id.into(), kind: VarKind::ObservedContinuousBlock, support: 0, dim }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, VarKind::Latent | VarKind::ObservedDiscrete)
    }
}

/// Directed acyclic graph over [`Variable`]s.
///
/// Immutable after construction; all structural invariants (unique ids,
/// acyclicity, childless continuous blocks) are checked in [`Dag::new`].
#[derive(Debug, Clone)]
pub struct Dag {
    vars: Vec<Variable>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(vars: Vec<Variable>, edges: &[(&str, &str)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate variable id {}", v.id)));
            }
            if v.is_discrete() && v.support < 2 {
                return Err(Error::Structural(format!(
                    "discrete variable {} needs support >= 2, got {}",
                    v.id, v.support
                )));
            }
            if v.kind == VarKind::ObservedContinuousBlock && v.dim < 1 {
                return Err(Error::Structural(format!("block {} needs dim >= 1", v.id)));
            }
        }
        let n = vars.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (p, c) in edges {
            let pi = *index
                .get(*p)
                .ok_or_else(|| Error::Structural(format!("edge references unknown id {p}")))?;
            let ci = *index
                .get(*c)
                .ok_or_else(|| Error::Structural(format!("edge references unknown id {c}")))?;
            if pi == ci {
                return Err(Error::Structural(format!("self-loop on {p}")));
            }
            if !seen.insert((pi, ci)) {
                return Err(Error::Structural(format!("duplicate edge {p} -> {c}")));
            }
            if vars[pi].kind == VarKind::ObservedContinuousBlock {
                return Err(Error::Structural(format!("continuous block {p} cannot have children")));
            }
            parents[ci].push(pi);
            children[pi].push(ci);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag { vars, index, parents, children };
        dag.topo_order()?;
        Ok(dag)
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vars[i].id
    }

    pub fn idx(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Structural(format!("unknown variable id {id}")))
    }

    /// Resolves a list of ids to a sorted index set.
    pub fn set(&self, ids: &[&str]) -> Result<BTreeSet<usize>> {
        ids.iter().map(|id| self.idx(id)).collect()
    }

    pub fn support(&self, i: usize) -> usize {
        self.vars[i].support
    }

    pub fn parents_of(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children_of(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn neighbors_of(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.parents[i].iter().chain(self.children[i].iter()).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn has_edge(&self, p: usize, c: usize) -> bool {
        self.children[p].binary_search(&c).is_ok()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// All edges as (parent, child) pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, cs) in self.children.iter().enumerate() {
            for &c in cs {
                out.push((p, c));
            }
        }
        out
    }

    pub fn discrete_vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.vars[i].is_discrete()).collect()
    }

    pub fn latent_vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.vars[i].kind == VarKind::Latent).collect()
    }

    pub fn observed_discrete_vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.vars[i].kind == VarKind::ObservedDiscrete).collect()
    }

    pub fn block_vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.vars[i].kind == VarKind::ObservedContinuousBlock).collect()
    }

    /// Topological order, smallest index first among ready vertices.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        let mut ready: BTreeSet<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &c in &self.children[i] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Structural("graph contains a cycle".into()));
        }
        Ok(order)
    }

    pub fn ancestors_of(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if out.insert(p) {
                    stack.push(p);
                }
            }
        }
        out
    }

    pub fn descendants_of(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if out.insert(c) {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// Ancestral closure of a set (the set itself plus all ancestors).
    pub fn ancestral_closure(&self, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = seed.clone();
        for &v in seed {
            out.extend(self.ancestors_of(v));
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph g {\n");
        for v in &self.vars {
            let style = match v.kind {
                VarKind::Latent => "shape=ellipse, style=dashed",
                VarKind::ObservedDiscrete => "shape=box",
                VarKind::ObservedContinuousBlock => "shape=box, style=rounded",
            };
            let label = if v.is_discrete() {
                format!("{} ({})", v.id, v.support)
            } else {
                format!("{} [{}]", v.id, v.dim)
            };
            let _ = writeln!(s, "  \"{}\" [{style}, label=\"{label}\"];", v.id);
        }
        for (p, c) in self.edges() {
            let _ = writeln!(s, "  \"{}\" -> \"{}\";", self.id(p), self.id(c));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            variables: self.vars.clone(),
            edges: self
                .edges()
                .iter()
                .map(|&(p, c)| [self.id(p).to_string(), self.id(c).to_string()])
                .collect(),
            cpts: None,
        }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        let edges: Vec<(&str, &str)> =
            g.edges.iter().map(|[p, c]| (p.as_str(), c.as_str())).collect();
        Dag::new(g.variables.clone(), &edges)
    }
}

/// Serialized form of a graph, with optional CPTs keyed by child id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub variables: Vec<Variable>,
    pub edges: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cpts: Option<BTreeMap<String, CptJson>>,
}

/// Serialized conditional probability table: row-major over the declared
/// parent order, last parent fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CptJson {
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Mixed-radix enumeration of the joint states of an ordered variable list.
///
/// State index convention: the last variable in `vars` varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    vars: Vec<usize>,
    card: Vec<usize>,
    stride: Vec<usize>,
    len: usize,
}

impl StateSpace {
    pub fn new(dag: &Dag, vars: &[usize]) -> Result<Self> {
        let card: Vec<usize> = vars
            .iter()
            .map(|&v| {
                if dag.var(v).is_discrete() {
                    Ok(dag.support(v))
                } else {
                    Err(Error::Structural(format!(
                        "state space over non-discrete variable {}",
                        dag.id(v)
                    )))
                }
            })
            .collect::<Result<_>>()?;
        Self::from_cards(vars.to_vec(), card)
    }

    pub fn from_cards(vars: Vec<usize>, card: Vec<usize>) -> Result<Self> {
        let mut len: usize = 1;
        for &c in &card {
            len = len
                .checked_mul(c)
                .filter(|&l| l <= MAX_JOINT_STATES)
                .ok_or_else(|| {
                    Error::Capacity(format!("joint state space exceeds {MAX_JOINT_STATES}"))
                })?;
        }
        let mut stride = vec![1usize; card.len()];
        for i in (0..card.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * card[i + 1];
        }
        Ok(StateSpace { vars, card, stride, len })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn card(&self) -> &[usize] {
        &self.card
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Flat index of a full state assignment (one entry per variable, in order).
    pub fn rank(&self, states: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.vars.len());
        states.iter().zip(&self.stride).map(|(s, st)| s * st).sum()
    }

    /// Inverse of [`StateSpace::rank`].
    pub fn unrank(&self, mut idx: usize, out: &mut Vec<usize>) {
        out.clear();
        for &st in &self.stride {
            out.push(idx / st);
            idx %= st;
        }
    }

    /// Stride map for projecting a full assignment onto this space when the
    /// assignment is indexed by `positions[i]` = position of `vars[i]`.
    pub fn project(&self, states_full: &[usize], positions: &[usize]) -> usize {
        positions
            .iter()
            .zip(&self.stride)
            .map(|(&p, st)| states_full[p] * st)
            .sum()
    }
}

/// Conditional probability table for one child given an ordered parent list.
///
/// `rows[r][s]` = P(child = s | parents in declared order at joint state r),
/// with the last parent varying fastest in r.
#[derive(Debug, Clone)]
pub struct Cpt {
    pub child: usize,
    pub parents: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new(dag: &Dag, child: usize, parents: Vec<usize>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut want: Vec<usize> = dag.parents_of(child).to_vec();
        let mut got: Vec<usize> = parents.clone();
        want.sort_unstable();
        got.sort_unstable();
        if want != got {
            return Err(Error::Structural(format!(
                "cpt for {} does not list its graph parents",
                dag.id(child)
            )));
        }
        let nrows: usize = parents.iter().map(|&p| dag.support(p)).product();
        if rows.len() != nrows {
            return Err(Error::Structural(format!(
                "cpt for {} has {} rows, expected {}",
                dag.id(child),
                rows.len(),
                nrows
            )));
        }
        let k = dag.support(child);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Structural(format!(
                    "cpt row {r} for {} has {} entries, expected {k}",
                    dag.id(child),
                    row.len()
                )));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) || (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Structural(format!(
                    "cpt row {r} for {} is not a probability vector",
                    dag.id(child)
                )));
            }
        }
        Ok(Cpt { child, parents, rows })
    }

    /// Row index for a full assignment indexed by variable.
    fn row_of(&self, assign: &[usize], dag: &Dag) -> usize {
        let mut r = 0;
        for &p in &self.parents {
            r = r * dag.support(p) + assign[p];
        }
        r
    }
}

/// A DAG plus one CPT per discrete variable: a full discrete distribution.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub dag: Dag,
    cpts: BTreeMap<usize, Cpt>,
}

impl DiscreteModel {
    pub fn new(dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for c in cpts {
            if map.insert(c.child, c).is_some() {
                return Err(Error::Structural("duplicate cpt for one child".into()));
            }
        }
        for i in dag.discrete_vars() {
            if !map.contains_key(&i) {
                return Err(Error::Structural(format!("missing cpt for {}", dag.id(i))));
            }
        }
        for &i in map.keys() {
            if !dag.var(i).is_discrete() {
                return Err(Error::Structural(format!(
                    "cpt given for non-discrete variable {}",
                    dag.id(i)
                )));
            }
        }
        Ok(DiscreteModel { dag, cpts: map })
    }

    pub fn cpt(&self, i: usize) -> &Cpt {
        &self.cpts[&i]
    }

    pub fn to_json(&self) -> GraphJson {
        let mut g = self.dag.to_json();
        let mut cpts = BTreeMap::new();
        for (&i, c) in &self.cpts {
            cpts.insert(
                self.dag.id(i).to_string(),
                CptJson {
                    parents: c.parents.iter().map(|&p| self.dag.id(p).to_string()).collect(),
                    rows: c.rows.clone(),
                },
            );
        }
        g.cpts = Some(cpts);
        g
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        let dag = Dag::from_json(g)?;
        let raw = g
            .cpts
            .as_ref()
            .ok_or_else(|| Error::Structural("graph json has no cpts".into()))?;
        let mut cpts = Vec::new();
        for (child, cj) in raw {
            let ci = dag.idx(child)?;
            let parents: Vec<usize> =
                cj.parents.iter().map(|p| dag.idx(p)).collect::<Result<_>>()?;
            cpts.push(Cpt::new(&dag, ci, parents, cj.rows.clone())?);
        }
        DiscreteModel::new(dag, cpts)
    }

    /// Draws `n` joint samples of all discrete variables, in declaration order.
    pub fn forward_sample(&self, n: usize, seed: u64) -> DiscreteSamples {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let order = self.dag.topo_order().expect("validated dag");
        let vars = self.dag.discrete_vars();
        let mut rows = Vec::with_capacity(n);
        let mut assign = vec![0usize; self.dag.n()];
        for _ in 0..n {
            for &v in &order {
                if !self.dag.var(v).is_discrete() {
                    continue;
                }
                let cpt = &self.cpts[&v];
                let row = &cpt.rows[cpt.row_of(&assign, &self.dag)];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut state = row.len() - 1;
                for (s, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        state = s;
                        break;
                    }
                }
                assign[v] = state;
            }
            rows.push(vars.iter().map(|&v| assign[v]).collect());
        }
        DiscreteSamples { vars, rows }
    }

    /// Exact joint distribution over all discrete variables.
    ///
    /// Returns the enumeration space (variables in declaration order) and the
    /// probability vector indexed by it.
    pub fn full_joint(&self) -> Result<(StateSpace, Vec<f64>)> {
        let vars = self.dag.discrete_vars();
        let space = StateSpace::new(&self.dag, &vars)?;
        let order = self.dag.topo_order()?;
        let order: Vec<usize> =
            order.into_iter().filter(|&v| self.dag.var(v).is_discrete()).collect();
        let mut joint = vec![0.0; space.len()];
        let mut states = Vec::new();
        let mut assign = vec![0usize; self.dag.n()];
        for idx in 0..space.len() {
            space.unrank(idx, &mut states);
            for (pos, &v) in space.vars().iter().enumerate() {
                assign[v] = states[pos];
            }
            let mut p = 1.0;
            for &v in &order {
                let cpt = &self.cpts[&v];
                p *= cpt.rows[cpt.row_of(&assign, &self.dag)][assign[v]];
                if p == 0.0 {
                    break;
                }
            }
            joint[idx] = p;
        }
        Ok((space, joint))
    }

    /// Exact joint probability table P_{A,B}; the sets may overlap, in which
    /// case entries with disagreeing shared states are zero.
    pub fn joint_table(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<ProbTable> {
        let (space, joint) = self.full_joint()?;
        marginal_table(&self.dag, &space, &joint, a, b)
    }
}

/// Builds P_{A,B} from a precomputed full joint over `space`.
pub fn marginal_table(
    dag: &Dag,
    space: &StateSpace,
    joint: &[f64],
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
) -> Result<ProbTable> {
    let avars: Vec<usize> = a.iter().copied().collect();
    let bvars: Vec<usize> = b.iter().copied().collect();
    let pos_in_space = |v: usize| -> Result<usize> {
        space
            .vars()
            .iter()
            .position(|&w| w == v)
            .ok_or_else(|| Error::Structural(format!("{} not in enumerated space", dag.id(v))))
    };
    let apos: Vec<usize> = avars.iter().map(|&v| pos_in_space(v)).collect::<Result<_>>()?;
    let bpos: Vec<usize> = bvars.iter().map(|&v| pos_in_space(v)).collect::<Result<_>>()?;
    let row_space = StateSpace::new(dag, &avars)?;
    let col_space = StateSpace::new(dag, &bvars)?;
    let mut data = vec![0.0; row_space.len() * col_space.len()];
    let mut states = Vec::new();
    for idx in 0..space.len() {
        let p = joint[idx];
        if p == 0.0 {
            continue;
        }
        space.unrank(idx, &mut states);
        let r = row_space.project(&states, &apos);
        let c = col_space.project(&states, &bpos);
        data[r * col_space.len() + c] += p;
    }
    Ok(ProbTable {
        row_vars: avars,
        col_vars: bvars,
        nrows: row_space.len(),
        ncols: col_space.len(),
        data,
    })
}

/// Joint probability table between two ordered variable sets.
#[derive(Debug, Clone)]
pub struct ProbTable {
    pub row_vars: Vec<usize>,
    pub col_vars: Vec<usize>,
    pub nrows: usize,
    pub ncols: usize,
    /// Row-major entries, length `nrows * ncols`.
    pub data: Vec<f64>,
}

impl ProbTable {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }
}

/// Discrete sample matrix: one row per draw, columns follow `vars`.
#[derive(Debug, Clone)]
pub struct DiscreteSamples {
    pub vars: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
}

impl DiscreteSamples {
    /// Column position of variable `v`, if sampled.
    pub fn col_of(&self, v: usize) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }
}

/// A partition of a ground set into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub ground: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Structural("empty partition block".into()));
            }
            for &x in b {
                if !seen.insert(x) {
                    return Err(Error::Structural("overlapping partition blocks".into()));
                }
            }
        }
        let ground_set: BTreeSet<usize> = ground.iter().copied().collect();
        if seen != ground_set {
            return Err(Error::Structural("partition blocks do not cover ground set".into()));
        }
        Ok(Partition { ground, blocks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_zd() -> DiscreteModel {
        let dag = Dag::new(
            vec![Variable::latent("z", 2), Variable::observed("d", 2)],
            &[("z", "d")],
        )
        .unwrap();
        let cz = Cpt::new(&dag, 0, vec![], vec![vec![1.0, 0.0]]).unwrap();
        let cd = Cpt::new(&dag, 1, vec![0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        DiscreteModel::new(dag, vec![cz, cd]).unwrap()
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let err = Dag::new(
            vec![Variable::observed("a", 2), Variable::observed("b", 2)],
            &[("a", "b"), ("b", "a")],
        );
        assert!(err.is_err());
        let err = Dag::new(
            vec![Variable::observed("a", 2), Variable::observed("a", 2)],
            &[],
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_block_with_children() {
        let err = Dag::new(
            vec![Variable::block("x", 2), Variable::observed("d", 2)],
            &[("x", "d")],
        );
        assert!(err.is_err());
    }

    #[test]
    fn state_space_round_trip() {
        let dag = Dag::new(
            vec![
                Variable::observed("a", 2),
                Variable::observed("b", 3),
                Variable::observed("c", 4),
            ],
            &[],
        )
        .unwrap();
        let sp = StateSpace::new(&dag, &[0, 1, 2]).unwrap();
        assert_eq!(sp.len(), 24);
        let mut states = Vec::new();
        for idx in 0..sp.len() {
            sp.unrank(idx, &mut states);
            assert_eq!(sp.rank(&states), idx);
        }
        // last variable fastest
        sp.unrank(1, &mut states);
        assert_eq!(states, vec![0, 0, 1]);
    }

    #[test]
    fn degenerate_chain_samples_all_zero() {
        let m = chain_zd();
        let s = m.forward_sample(5, 0);
        assert_eq!(s.rows.len(), 5);
        assert!(s.rows.iter().all(|r| r == &vec![0, 0]));
    }

    #[test]
    fn sampling_is_deterministic_in_seed() {
        let m = chain_zd();
        let a = m.forward_sample(64, 9);
        let b = m.forward_sample(64, 9);
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn self_table_is_diagonal() {
        let dag = Dag::new(vec![Variable::observed("d1", 2)], &[]).unwrap();
        let c = Cpt::new(&dag, 0, vec![], vec![vec![0.3, 0.7]]).unwrap();
        let m = DiscreteModel::new(dag, vec![c]).unwrap();
        let a = m.dag.set(&["d1"]).unwrap();
        let t = m.joint_table(&a, &a).unwrap();
        assert_eq!((t.nrows, t.ncols), (2, 2));
        assert!((t.get(0, 0) - 0.3).abs() < 1e-12);
        assert!((t.get(1, 1) - 0.7).abs() < 1e-12);
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(1, 0), 0.0);
    }

    #[test]
    fn independent_pair_is_outer_product() {
        let dag = Dag::new(
            vec![Variable::observed("a", 2), Variable::observed("b", 2)],
            &[],
        )
        .unwrap();
        let ca = Cpt::new(&dag, 0, vec![], vec![vec![0.5, 0.5]]).unwrap();
        let cb = Cpt::new(&dag, 1, vec![], vec![vec![0.5, 0.5]]).unwrap();
        let m = DiscreteModel::new(dag, vec![ca, cb]).unwrap();
        let a = m.dag.set(&["a"]).unwrap();
        let b = m.dag.set(&["b"]).unwrap();
        let t = m.joint_table(&a, &b).unwrap();
        assert!(t.data.iter().all(|&p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn cpt_shape_errors_are_structural() {
        let dag = Dag::new(
            vec![Variable::latent("z", 2), Variable::observed("d", 2)],
            &[("z", "d")],
        )
        .unwrap();
        assert!(Cpt::new(&dag, 1, vec![0], vec![vec![1.0, 0.0]]).is_err());
        assert!(Cpt::new(&dag, 1, vec![], vec![vec![1.0, 0.0]]).is_err());
        assert!(Cpt::new(&dag, 1, vec![0], vec![vec![0.6, 0.6], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn json_round_trip_preserves_model() {
        let m = chain_zd();
        let j = m.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        let m2 = DiscreteModel::from_json(&back).unwrap();
        assert_eq!(m2.dag.n(), 2);
        assert_eq!(m2.cpt(1).rows, m.cpt(1).rows);
        let (sa, ja) = m.full_joint().unwrap();
        let (sb, jb) = m2.full_joint().unwrap();
        assert_eq!(sa.vars(), sb.vars());
        assert_eq!(ja, jb);
    }

    #[test]
    fn overlapping_margins_zero_on_disagreement() {
        let m = chain_zd();
        let a = m.dag.set(&["z", "d"]).unwrap();
        let b = m.dag.set(&["d"]).unwrap();
        let t = m.joint_table(&a, &b).unwrap();
        // P(z=0,d=0,d=1) must be zero: shared variable disagrees.
        assert_eq!(t.get(0, 1), 0.0);
        assert!((t.get(0, 0) - 1.0).abs() < 1e-12);
    }
}
