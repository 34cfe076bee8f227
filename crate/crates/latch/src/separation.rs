//! Treks, t-separation, and d-separation on discrete DAGs.
//!
//! A trek between i and j is a pair of directed paths from a common top
//! vertex to i and to j that share only the top. The top vertex counts as
//! lying on both sides, and endpoints count on their own side, so a vertex
//! set can block a trek from either end. The minimal joint-support size over
//! t-separating partitions is the graph-side quantity matched by nonnegative
//! table ranks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::Dag;

/// Hard cap on enumerated treks per vertex pair.
pub const MAX_TREKS: usize = 10_000;

/// A trek: directed paths `top -> ... -> i` (left) and `top -> ... -> j`
/// (right) sharing only `top`. Both sides include the top vertex; a
/// degenerate side is just `[top]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trek {
    pub top: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn directed_paths(dag: &Dag, from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = vec![from];
    fn go(dag: &Dag, at: usize, to: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for &c in dag.children_of(at) {
            path.push(c);
            go(dag, c, to, path, out);
            path.pop();
        }
    }
    go(dag, from, to, &mut path, &mut out);
    out
}

/// All treks between `i` and `j`, sorted lexicographically by (left, right)
/// vertex sequences. Exceeding `cap` is a capacity error.
pub fn enumerate_treks(dag: &Dag, i: usize, j: usize, cap: usize) -> Result<Vec<Trek>> {
    let mut tops: BTreeSet<usize> = dag.ancestors_of(i);
    tops.insert(i);
    let mut jt: BTreeSet<usize> = dag.ancestors_of(j);
    jt.insert(j);
    tops.retain(|t| jt.contains(t));
    let mut treks = Vec::new();
    for &t in &tops {
        let lefts = directed_paths(dag, t, i);
        let rights = directed_paths(dag, t, j);
        for l in &lefts {
            let ltail: BTreeSet<usize> = l[1..].iter().copied().collect();
            for r in &rights {
                if r[1..].iter().any(|v| ltail.contains(v)) {
                    continue;
                }
                treks.push(Trek { top: t, left: l.clone(), right: r.clone() });
                if treks.len() > cap {
                    return Err(Error::Capacity(format!(
                        "more than {cap} treks between {} and {}",
                        dag.id(i),
                        dag.id(j)
                    )));
                }
            }
        }
    }
    treks.sort_by(|a, b| (&a.left, &a.right).cmp(&(&b.left, &b.right)));
    Ok(treks)
}

/// Trek sides as vertex bitmasks, for all pairs of `a` x `b`.
fn trek_masks(dag: &Dag, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Vec<(u64, u64)>> {
    if dag.n() > 64 {
        return Err(Error::Capacity("separation search limited to 64 vertices".into()));
    }
    let mut out = Vec::new();
    for &i in a {
        for &j in b {
            for t in enumerate_treks(dag, i, j, MAX_TREKS)? {
                let l = t.left.iter().fold(0u64, |m, &v| m | 1 << v);
                let r = t.right.iter().fold(0u64, |m, &v| m | 1 << v);
                out.push((l, r));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// True iff every trek from `a` to `b` meets `la` on its a-side or `lb` on
/// its b-side. The top vertex lies on both sides.
pub fn is_t_separated(
    dag: &Dag,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    la: &BTreeSet<usize>,
    lb: &BTreeSet<usize>,
) -> Result<bool> {
    let lam = la.iter().fold(0u64, |m, &v| m | 1 << v);
    let lbm = lb.iter().fold(0u64, |m, &v| m | 1 << v);
    Ok(trek_masks(dag, a, b)?.iter().all(|&(l, r)| l & lam != 0 || r & lbm != 0))
}

/// Minimum over vertex sets L and partitions (L1, L2) of L that t-separate
/// `a` and `b`, of the joint support size of L. Exhaustive search over
/// trek-relevant vertices.
pub fn min_tsep_states(dag: &Dag, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<usize> {
    let treks = trek_masks(dag, a, b)?;
    if treks.is_empty() {
        return Ok(1);
    }
    let states = |set: &BTreeSet<usize>| -> usize { set.iter().map(|&v| dag.support(v)).product() };
    // L = A with everything on the a-side always works (endpoints count).
    let mut best = states(a).min(states(b));
    let mut relevant: Vec<usize> = Vec::new();
    let all: u64 = treks.iter().fold(0, |m, &(l, r)| m | l | r);
    for v in 0..dag.n() {
        if all & (1 << v) != 0 {
            relevant.push(v);
        }
    }
    // Supports are >= 2, so any L worth testing has at most log2(best) members.
    let max_len = best.ilog2() as usize;
    let mut candidates: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, Vec::new(), 1)];
    while let Some((start, cur, st)) = stack.pop() {
        for i in start..relevant.len() {
            let v = relevant[i];
            let ns = st * dag.support(v);
            if ns >= best || cur.len() + 1 > max_len {
                continue;
            }
            let mut next = cur.clone();
            next.push(v);
            candidates.push((ns, next.clone()));
            stack.push((i + 1, next, ns));
        }
    }
    candidates.sort();
    for (st, l) in candidates {
        if st >= best {
            break;
        }
        let masks: Vec<u64> = l.iter().map(|&v| 1 << v).collect();
        'assign: for side in 0..(1u32 << l.len()) {
            let mut l1 = 0u64;
            let mut l2 = 0u64;
            for (k, &m) in masks.iter().enumerate() {
                if side & (1 << k) == 0 {
                    l1 |= m;
                } else {
                    l2 |= m;
                }
            }
            for &(lt, rt) in &treks {
                if lt & l1 == 0 && rt & l2 == 0 {
                    continue 'assign;
                }
            }
            best = st;
            break;
        }
    }
    Ok(best)
}

/// Standard d-separation via the moral graph of the ancestral closure.
pub fn is_d_separated(
    dag: &Dag,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    c: &BTreeSet<usize>,
) -> Result<bool> {
    if a.intersection(b).next().is_some()
        || a.intersection(c).next().is_some()
        || b.intersection(c).next().is_some()
    {
        return Err(Error::Structural("d-separation requires disjoint sets".into()));
    }
    let mut seed: BTreeSet<usize> = a.union(b).copied().collect();
    seed.extend(c.iter().copied());
    let anc = dag.ancestral_closure(&seed);
    // Moral graph restricted to the ancestral closure.
    let n = dag.n();
    let mut adj = vec![BTreeSet::new(); n];
    for &v in &anc {
        for &p in dag.parents_of(v) {
            if anc.contains(&p) {
                adj[v].insert(p);
                adj[p].insert(v);
            }
        }
        let ps: Vec<usize> =
            dag.parents_of(v).iter().copied().filter(|p| anc.contains(p)).collect();
        for (x, &p1) in ps.iter().enumerate() {
            for &p2 in &ps[x + 1..] {
                adj[p1].insert(p2);
                adj[p2].insert(p1);
            }
        }
    }
    // BFS from a, not entering c.
    let mut seen: BTreeSet<usize> = a.clone();
    let mut queue: Vec<usize> = a.iter().copied().collect();
    while let Some(v) = queue.pop() {
        if c.contains(&v) {
            continue;
        }
        for &w in &adj[v] {
            if b.contains(&w) {
                return Ok(false);
            }
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    Ok(true)
}

/// Checks the trek-side equivalent of d-separation: some partition
/// (C_A, C_B) of `c` t-separates (a ∪ c, b ∪ c).
pub fn d_sep_via_treks(
    dag: &Dag,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    c: &BTreeSet<usize>,
) -> Result<bool> {
    let ac: BTreeSet<usize> = a.union(c).copied().collect();
    let bc: BTreeSet<usize> = b.union(c).copied().collect();
    let cs: Vec<usize> = c.iter().copied().collect();
    for side in 0..(1u32 << cs.len()) {
        let mut ca = BTreeSet::new();
        let mut cb = BTreeSet::new();
        for (k, &v) in cs.iter().enumerate() {
            if side & (1 << k) == 0 {
                ca.insert(v);
            } else {
                cb.insert(v);
            }
        }
        if is_t_separated(dag, &ac, &bc, &ca, &cb)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variable;

    fn dag(vars: Vec<Variable>, edges: &[(&str, &str)]) -> Dag {
        Dag::new(vars, edges).unwrap()
    }

    #[test]
    fn direct_edge_has_one_trek_with_degenerate_side() {
        let g = dag(
            vec![Variable::observed("i", 2), Variable::observed("j", 2)],
            &[("i", "j")],
        );
        let t = enumerate_treks(&g, 0, 1, 100).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].top, 0);
        assert_eq!(t[0].left, vec![0]);
        assert_eq!(t[0].right, vec![0, 1]);
    }

    #[test]
    fn fork_has_single_trek_with_common_top() {
        let g = dag(
            vec![
                Variable::observed("i", 2),
                Variable::latent("k", 2),
                Variable::observed("j", 2),
            ],
            &[("k", "i"), ("k", "j")],
        );
        let t = enumerate_treks(&g, 0, 2, 100).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].top, 1);
    }

    #[test]
    fn self_trek_is_single_vertex() {
        let g = dag(vec![Variable::observed("i", 2)], &[]);
        let t = enumerate_treks(&g, 0, 0, 100).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].left, vec![0]);
        assert_eq!(t[0].right, vec![0]);
    }

    #[test]
    fn self_separation_needs_own_state() {
        let g = dag(vec![Variable::observed("d1", 3)], &[]);
        let a = g.set(&["d1"]).unwrap();
        assert!(is_t_separated(&g, &a, &a, &a, &BTreeSet::new()).unwrap());
        assert_eq!(min_tsep_states(&g, &a, &a).unwrap(), 3);
    }

    #[test]
    fn collider_blocks_treks_but_not_d_separation_when_conditioned() {
        let g = dag(
            vec![
                Variable::observed("a", 2),
                Variable::observed("b", 2),
                Variable::observed("c", 2),
            ],
            &[("a", "c"), ("b", "c")],
        );
        let a = g.set(&["a"]).unwrap();
        let b = g.set(&["b"]).unwrap();
        let c = g.set(&["c"]).unwrap();
        // No trek between a and b at all.
        assert!(enumerate_treks(&g, 0, 1, 100).unwrap().is_empty());
        assert_eq!(min_tsep_states(&g, &a, &b).unwrap(), 1);
        assert!(is_d_separated(&g, &a, &b, &BTreeSet::new()).unwrap());
        assert!(!is_d_separated(&g, &a, &b, &c).unwrap());
    }

    #[test]
    fn trek_cap_is_enforced() {
        // Diamond stack: many parallel paths.
        let mut vars = vec![Variable::observed("s", 2)];
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut prev = "s".to_string();
        for layer in 0..6 {
            let l = format!("l{layer}");
            let r = format!("r{layer}");
            let m = format!("m{layer}");
            vars.push(Variable::observed(&l, 2));
            vars.push(Variable::observed(&r, 2));
            vars.push(Variable::observed(&m, 2));
            edges.push((prev.clone(), l.clone()));
            edges.push((prev.clone(), r.clone()));
            edges.push((l.clone(), m.clone()));
            edges.push((r.clone(), m.clone()));
            prev = m;
        }
        let e: Vec<(&str, &str)> = edges.iter().map(|(p, c)| (p.as_str(), c.as_str())).collect();
        let g = Dag::new(vars, &e).unwrap();
        let end = g.idx(&prev).unwrap();
        assert!(matches!(enumerate_treks(&g, 0, end, 3), Err(Error::Capacity(_))));
    }
}
