//! Built-in benchmark graphs.
//!
//! Ids starting with `z` are latent, ids starting with `d` are observed
//! discrete; every variable is binary. `fig2a`, `fig2b`, `fig2c` and `figA3`
//! are the worked reference structures; `t1g1..t1g9` and `t2g1..t2g7` are the
//! benchmark suites (t1 sized for the full continuous pipeline, t2 for
//! discrete-input runs, with t2g3/t2g4/t2g5 deliberately breaking the
//! sufficient identifiability conditions).

use crate::error::{Error, Result};
use crate::model::{Dag, Variable};

/// All catalog names, in suite order.
pub const NAMES: [&str; 20] = [
    "fig2a", "fig2b", "fig2c", "figA3", "t1g1", "t1g2", "t1g3", "t1g4", "t1g5", "t1g6", "t1g7",
    "t1g8", "t1g9", "t2g1", "t2g2", "t2g3", "t2g4", "t2g5", "t2g6", "t2g7",
];

fn build(edges: &[(&str, &str)]) -> Dag {
    let mut ids: Vec<&str> = Vec::new();
    for (p, c) in edges {
        for v in [p, c] {
            if !ids.contains(v) {
                ids.push(v);
            }
        }
    }
    ids.sort_by_key(|id| {
        let (prefix, num) = id.split_at(1);
        (prefix.to_string(), num.parse::<usize>().unwrap_or(0))
    });
    let vars: Vec<Variable> = ids
        .iter()
        .map(|id| {
            if id.starts_with('z') {
                Variable::latent(id, 2)
            } else {
                Variable::observed(id, 2)
            }
        })
        .collect();
    Dag::new(vars, edges).expect("catalog graphs are well-formed")
}

/// Returns the named benchmark graph.
pub fn catalog(name: &str) -> Result<Dag> {
    let edges: Vec<(&str, &str)> = match name {
        // Balanced binary tree of seven latents over eight observed leaves.
        "fig2a" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "z4"),
            ("z2", "z5"),
            ("z3", "z6"),
            ("z3", "z7"),
            ("z4", "d1"),
            ("z4", "d2"),
            ("z5", "d3"),
            ("z5", "d4"),
            ("z6", "d5"),
            ("z6", "d6"),
            ("z7", "d7"),
            ("z7", "d8"),
        ],
        // Shared mid-level latents: z5 and z6 have two latent parents each.
        "fig2b" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "z4"),
            ("z2", "z5"),
            ("z2", "z6"),
            ("z3", "z5"),
            ("z3", "z6"),
            ("z3", "z7"),
            ("z4", "d1"),
            ("z4", "d7"),
            ("z5", "d2"),
            ("z5", "d3"),
            ("z5", "d5"),
            ("z6", "d4"),
            ("z6", "d6"),
            ("z7", "d5"),
            ("z7", "d6"),
            ("z7", "d7"),
            ("z7", "d8"),
        ],
        // Observed variables appear at internal positions (d1, d2 have children).
        "fig2c" => vec![
            ("z1", "z2"),
            ("z1", "d1"),
            ("z2", "d2"),
            ("z2", "z3"),
            ("z2", "z4"),
            ("d1", "z3"),
            ("d1", "z4"),
            ("d1", "d3"),
            ("d1", "d7"),
            ("d2", "d4"),
            ("d2", "d5"),
            ("d2", "d7"),
            ("z3", "d5"),
            ("z3", "d6"),
            ("z3", "d8"),
            ("z4", "d8"),
            ("z4", "d9"),
        ],
        // Three-latent cover {z1,z2,z3} under z4, which is itself under z5.
        "figA3" => vec![
            ("z5", "z4"),
            ("z5", "d8"),
            ("z5", "d9"),
            ("z5", "d10"),
            ("z4", "z1"),
            ("z4", "z2"),
            ("z4", "z3"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z1", "d4"),
            ("z1", "d5"),
            ("z1", "d6"),
            ("z2", "d1"),
            ("z2", "d2"),
            ("z2", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
            ("z2", "d6"),
            ("z2", "d7"),
            ("z3", "d2"),
            ("z3", "d3"),
            ("z3", "d4"),
            ("z3", "d5"),
            ("z3", "d6"),
            ("z3", "d7"),
        ],
        // Full-pipeline suite: small graphs so the observed joint state count
        // (the mixture component count) stays moderate.
        "t1g1" => vec![("z1", "d1"), ("z1", "d2"), ("z1", "d3")],
        "t1g2" => vec![("z1", "d1"), ("z1", "d2"), ("z1", "d3"), ("z1", "d4")],
        "t1g3" => vec![
            ("z1", "z2"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
            ("z2", "d6"),
        ],
        "t1g4" => vec![
            ("z1", "z2"),
            ("z2", "z3"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z2", "d3"),
            ("z2", "d4"),
            ("z3", "d5"),
            ("z3", "d6"),
        ],
        "t1g5" => vec![
            ("z1", "z3"),
            ("z2", "z3"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z2", "d3"),
            ("z2", "d4"),
            ("z3", "d5"),
            ("z3", "d6"),
        ],
        "t1g6" => vec![
            ("d1", "z1"),
            ("d1", "d4"),
            ("z1", "d2"),
            ("z1", "d3"),
        ],
        "t1g7" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "d1"),
            ("z2", "d2"),
            ("z2", "d3"),
            ("z3", "d4"),
            ("z3", "d5"),
            ("z3", "d6"),
        ],
        "t1g8" => vec![
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z1", "d4"),
            ("z1", "d5"),
        ],
        "t1g9" => vec![
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
            ("z2", "d6"),
        ],
        // Discrete-input suite.
        "t2g1" => vec![
            ("z1", "z2"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
            ("z2", "d6"),
        ],
        "t2g2" => vec![
            ("z1", "z2"),
            ("z2", "z3"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
            ("z2", "d6"),
            ("z3", "d7"),
            ("z3", "d8"),
            ("z3", "d9"),
        ],
        // Two latents over overlapping child sets, no latent edge: the shared
        // children break the unique-cover condition.
        "t2g3" => vec![
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d3"),
            ("z2", "d2"),
            ("z2", "d3"),
            ("z2", "d4"),
        ],
        // Latent collider with an undersized separator: z1 -> d5 <- z2.
        "t2g4" => vec![
            ("z1", "d1"),
            ("z1", "d2"),
            ("z1", "d5"),
            ("z2", "d3"),
            ("z2", "d4"),
            ("z2", "d5"),
        ],
        // Latent triangle z1 -> z2 -> z3, z1 -> z3.
        "t2g5" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "z3"),
            ("z1", "d1"),
            ("z1", "d2"),
            ("z2", "d3"),
            ("z2", "d4"),
            ("z3", "d5"),
            ("z3", "d6"),
        ],
        "t2g6" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "d1"),
            ("z2", "d2"),
            ("z2", "d3"),
            ("z3", "z4"),
            ("z3", "d4"),
            ("z4", "d5"),
            ("z4", "d6"),
        ],
        "t2g7" => vec![
            ("z1", "z2"),
            ("z1", "z3"),
            ("z2", "z4"),
            ("z2", "z5"),
            ("z3", "z6"),
            ("z3", "z7"),
            ("z4", "d1"),
            ("z4", "d2"),
            ("z5", "d3"),
            ("z5", "d4"),
            ("z6", "d5"),
            ("z6", "d6"),
            ("z7", "d7"),
            ("z7", "d8"),
        ],
        _ => return Err(Error::Structural(format!("unknown catalog graph {name}"))),
    };
    Ok(build(&edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarKind;

    #[test]
    fn fig2a_shape() {
        let g = catalog("fig2a").unwrap();
        assert_eq!(g.latent_vars().len(), 7);
        assert_eq!(g.observed_discrete_vars().len(), 8);
        assert_eq!(g.edges().len(), 14);
        let z1 = g.idx("z1").unwrap();
        let kids: Vec<&str> = g.children_of(z1).iter().map(|&c| g.id(c)).collect();
        assert_eq!(kids, vec!["z2", "z3"]);
    }

    #[test]
    fn figa3_shape() {
        let g = catalog("figA3").unwrap();
        let z5 = g.idx("z5").unwrap();
        let kids: Vec<&str> = g.children_of(z5).iter().map(|&c| g.id(c)).collect();
        assert_eq!(kids, vec!["d8", "d9", "d10", "z4"]);
        let z4 = g.idx("z4").unwrap();
        let kids: Vec<&str> = g.children_of(z4).iter().map(|&c| g.id(c)).collect();
        assert_eq!(kids, vec!["z1", "z2", "z3"]);
        let z2 = g.idx("z2").unwrap();
        assert_eq!(g.children_of(z2).len(), 7);
    }

    #[test]
    fn fig2c_has_observed_internal_nodes() {
        let g = catalog("fig2c").unwrap();
        let d1 = g.idx("d1").unwrap();
        assert_eq!(g.var(d1).kind, VarKind::ObservedDiscrete);
        assert!(!g.children_of(d1).is_empty());
    }

    #[test]
    fn all_names_build_and_unknown_fails() {
        for n in NAMES {
            let g = catalog(n).unwrap();
            assert!(g.n() >= 4, "{n} too small");
            assert!(g.vars().iter().all(|v| v.support == 2));
        }
        assert!(catalog("nope").is_err());
    }
}
