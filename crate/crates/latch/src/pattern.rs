//! Markov-equivalence patterns: partially directed graphs built from a DAG's
//! skeleton and unshielded colliders, closed under Meek's orientation rules.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::model::{Dag, Variable};

/// A partially directed graph over the variables of a DAG.
#[derive(Debug, Clone)]
pub struct Pdag {
    vars: Vec<Variable>,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

impl Pdag {
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

    pub fn directed_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    /// Unordered adjacent pairs, stored as (min, max).
    pub fn skeleton_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out: BTreeSet<(usize, usize)> = self.undirected.clone();
        for &(a, b) in &self.directed {
            out.insert((a.min(b), a.max(b)));
        }
        out
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
            || self.directed.contains(&(a, b))
            || self.directed.contains(&(b, a))
    }

    fn orient(&mut self, a: usize, b: usize) -> bool {
        if self.undirected.remove(&(a.min(b), a.max(b))) {
            self.directed.insert((a, b));
            true
        } else {
            false
        }
    }

    /// Closes the orientation under Meek's four rules.
    fn meek_closure(&mut self) {
        loop {
            let mut changed = false;
            let undirected: Vec<(usize, usize)> = self.undirected.iter().copied().collect();
            for &(x, y) in &undirected {
                for (a, b) in [(x, y), (y, x)] {
                    if !self.undirected.contains(&(a.min(b), a.max(b))) {
                        continue;
                    }
                    if self.rule1(a, b) || self.rule2(a, b) || self.rule3(a, b) || self.rule4(a, b)
                    {
                        self.orient(a, b);
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// c -> a, a - b, c and b nonadjacent: orient a -> b.
    fn rule1(&self, a: usize, b: usize) -> bool {
        self.directed.iter().any(|&(c, t)| t == a && c != b && !self.is_adjacent(c, b))
    }

    /// a -> c -> b with a - b: orient a -> b.
    fn rule2(&self, a: usize, b: usize) -> bool {
        (0..self.n()).any(|c| self.directed.contains(&(a, c)) && self.directed.contains(&(c, b)))
    }

    /// a - c, a - d, c -> b, d -> b, c and d nonadjacent: orient a -> b.
    fn rule3(&self, a: usize, b: usize) -> bool {
        let into_b: Vec<usize> = self
            .directed
            .iter()
            .filter(|&&(_, t)| t == b)
            .map(|&(s, _)| s)
            .filter(|&c| self.undirected.contains(&(a.min(c), a.max(c))))
            .collect();
        for (i, &c) in into_b.iter().enumerate() {
            for &d in &into_b[i + 1..] {
                if !self.is_adjacent(c, d) {
                    return true;
                }
            }
        }
        false
    }

    /// d -> c -> b, a adjacent to both c and d, b and d nonadjacent: orient
    /// a -> b.
    fn rule4(&self, a: usize, b: usize) -> bool {
        for &(d, c) in &self.directed {
            if self.directed.contains(&(c, b))
                && self.is_adjacent(a, c)
                && self.is_adjacent(a, d)
                && !self.is_adjacent(b, d)
            {
                return true;
            }
        }
        false
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph {\n");
        for v in &self.vars {
            let _ = writeln!(s, "  {} [label=\"{} ({})\"];", v.id, v.id, v.support);
        }
        for &(a, b) in &self.directed {
            let _ = writeln!(s, "  {} -- {} [dir=forward];", self.id(a), self.id(b));
        }
        for &(a, b) in &self.undirected {
            let _ = writeln!(s, "  {} -- {};", self.id(a), self.id(b));
        }
        s.push_str("}\n");
        s
    }
}

/// The pattern (CPDAG) of a DAG: its skeleton with unshielded colliders
/// oriented, closed under Meek's rules.
pub fn to_pattern(dag: &Dag) -> Pdag {
    let mut p = Pdag {
        vars: dag.vars().to_vec(),
        directed: BTreeSet::new(),
        undirected: dag.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
    };
    for c in 0..dag.n() {
        let ps = dag.parents_of(c);
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                if !dag.is_adjacent(a, b) {
                    p.orient(a, c);
                    p.orient(b, c);
                }
            }
        }
    }
    p.meek_closure();
    p
}

/// A pattern assembled from an explicit skeleton and a set of collider
/// orientations, closed under Meek's rules. Skeleton pairs are unordered;
/// `colliders` lists directed pairs (tail, head) to orient before closure.
pub fn pattern_from_parts(
    vars: Vec<Variable>,
    skeleton: &BTreeSet<(usize, usize)>,
    colliders: &BTreeSet<(usize, usize)>,
) -> Pdag {
    let mut p = Pdag {
        vars,
        directed: BTreeSet::new(),
        undirected: skeleton.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
    };
    for &(a, b) in colliders {
        p.orient(a, b);
    }
    p.meek_closure();
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn dag(edges: &[(&str, &str)], n: usize) -> Dag {
        let vars: Vec<Variable> =
            (1..=n).map(|i| Variable::observed(&format!("x{i}"), 2)).collect();
        Dag::new(vars, edges).unwrap()
    }

    #[test]
    fn chain_is_fully_reversible() {
        let g = dag(&[("x1", "x2"), ("x2", "x3")], 3);
        let p = to_pattern(&g);
        assert!(p.directed_edges().is_empty());
        assert_eq!(p.undirected_edges().len(), 2);
    }

    #[test]
    fn collider_is_oriented_and_propagates() {
        let g = dag(&[("x1", "x3"), ("x2", "x3"), ("x3", "x4"), ("x4", "x5")], 5);
        let p = to_pattern(&g);
        let i = |s: &str| (0..g.n()).find(|&v| g.id(v) == s).unwrap();
        assert!(p.directed_edges().contains(&(i("x1"), i("x3"))));
        assert!(p.directed_edges().contains(&(i("x2"), i("x3"))));
        // The two downstream edges follow by the first orientation rule.
        assert!(p.directed_edges().contains(&(i("x3"), i("x4"))));
        assert!(p.directed_edges().contains(&(i("x4"), i("x5"))));
        assert!(p.undirected_edges().is_empty());
    }

    #[test]
    fn shielded_collider_stays_reversible() {
        let g = dag(&[("x1", "x2"), ("x1", "x3"), ("x2", "x3")], 3);
        let p = to_pattern(&g);
        assert!(p.directed_edges().is_empty());
        assert_eq!(p.undirected_edges().len(), 3);
    }

    #[test]
    fn tree_catalog_pattern_is_undirected() {
        let g = catalog("fig2a").unwrap();
        let p = to_pattern(&g);
        assert!(p.directed_edges().is_empty());
        assert_eq!(p.skeleton_edges().len(), 14);
    }

    #[test]
    fn observed_internal_nodes_create_colliders() {
        let g = catalog("fig2c").unwrap();
        let p = to_pattern(&g);
        let i = |s: &str| g.idx(s).unwrap();
        // z3 and z4 have nonadjacent parent pairs (z2, d1).
        assert!(p.directed_edges().contains(&(i("z2"), i("z3"))));
        assert!(p.directed_edges().contains(&(i("d1"), i("z3"))));
        assert!(p.directed_edges().contains(&(i("z2"), i("z4"))));
        assert!(p.directed_edges().contains(&(i("d1"), i("z4"))));
        // The root edge stays reversible.
        let (a, b) = (i("z1").min(i("z2")), i("z1").max(i("z2")));
        assert!(p.undirected_edges().contains(&(a, b)));
    }
}
