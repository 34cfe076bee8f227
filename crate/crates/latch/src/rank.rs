//! Rank probes over sets of observed variables.
//!
//! The structure search never looks at a model directly; it asks one
//! question, many times: given two sets of observed variables `A` and `B`,
//! what is the effective rank of the joint probability table `P[A, B]`?
//! This module defines the [`RankProbe`] interface answering that question
//! and an exact implementation that reads the answer off a known graph,
//! where the rank equals the smallest joint support over all trek
//! separators between the two sets.
//!
//! Variable sets are passed as `u64` bitmasks over *observed ordinals*:
//! ordinal `i` is position `i` in `Dag::observed_discrete_vars()`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::Dag;
use crate::separation::min_tsep_states;
use crate::{Error, Result};

/// One answered rank query, recorded for replay and audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeRecord {
    /// Variable names on the row side.
    pub a: Vec<String>,
    /// Variable names on the column side.
    pub b: Vec<String>,
    /// The rank verdict.
    pub rank: usize,
}

/// A source of rank verdicts over observed-variable bitmasks.
pub trait RankProbe {
    /// Number of observed variables in scope; masks use bits `0..n_obs`.
    fn n_obs(&self) -> usize;

    /// Support (number of states) of observed ordinal `o`.
    fn support(&self, o: usize) -> usize;

    /// Display name of observed ordinal `o`.
    fn name(&self, o: usize) -> String;

    /// Rank of the joint table between the variables in `a` and in `b`.
    ///
    /// An empty side has a one-state joint distribution, so the rank is 1.
    fn rank(&mut self, a: u64, b: u64) -> Result<usize>;
}

/// Number of joint states of the observed variables selected by `mask`.
///
/// The empty mask has exactly one joint state. Saturates at `usize::MAX`
/// rather than overflowing.
pub fn mask_states<P: RankProbe + ?Sized>(probe: &P, mask: u64) -> usize {
    let mut acc: u128 = 1;
    for o in 0..probe.n_obs() {
        if mask >> o & 1 == 1 {
            acc = acc.saturating_mul(probe.support(o) as u128);
            if acc > usize::MAX as u128 {
                return usize::MAX;
            }
        }
    }
    acc as usize
}

/// Exact rank oracle over a known graph.
///
/// Ranks are computed as the minimum, over all trek separators `(C_A, C_B)`
/// between the probed sets, of the joint support of `C_A ∪ C_B`. Verdicts
/// are cached per unordered mask pair and logged in query order.
pub struct ExactOracle<'a> {
    dag: &'a Dag,
    obs_idx: Vec<usize>,
    cache: BTreeMap<(u64, u64), usize>,
    log: Vec<ProbeRecord>,
}

impl<'a> ExactOracle<'a> {
    /// Builds an oracle over the observed discrete variables of `dag`.
    ///
    /// Fails if there are more than 64 observed variables, since probes are
    /// 64-bit masks.
    pub fn new(dag: &'a Dag) -> Result<Self> {
        let obs_idx = dag.observed_discrete_vars();
        if obs_idx.len() > 64 {
            return Err(Error::Capacity(format!(
                "rank probes support at most 64 observed variables, got {}",
                obs_idx.len()
            )));
        }
        Ok(ExactOracle { dag, obs_idx, cache: BTreeMap::new(), log: Vec::new() })
    }

    /// The graph this oracle answers for.
    pub fn dag(&self) -> &Dag {
        self.dag
    }

    /// All probes answered so far, oldest first. Cache hits are not re-logged.
    pub fn log(&self) -> &[ProbeRecord] {
        &self.log
    }

    /// Number of distinct probes answered.
    pub fn probe_count(&self) -> usize {
        self.cache.len()
    }

    fn mask_to_set(&self, mask: u64) -> BTreeSet<usize> {
        (0..self.obs_idx.len()).filter(|&o| mask >> o & 1 == 1).map(|o| self.obs_idx[o]).collect()
    }

    fn mask_names(&self, mask: u64) -> Vec<String> {
        (0..self.obs_idx.len())
            .filter(|o| mask >> o & 1 == 1)
            .map(|o| self.dag.var(self.obs_idx[o]).id.clone())
            .collect()
    }
}

impl RankProbe for ExactOracle<'_> {
    fn n_obs(&self) -> usize {
        self.obs_idx.len()
    }

    fn support(&self, o: usize) -> usize {
        self.dag.support(self.obs_idx[o])
    }

    fn name(&self, o: usize) -> String {
        self.dag.var(self.obs_idx[o]).id.clone()
    }

    fn rank(&mut self, a: u64, b: u64) -> Result<usize> {
        if a == 0 || b == 0 {
            return Ok(1);
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let sa = self.mask_to_set(a);
        let sb = self.mask_to_set(b);
        let r = min_tsep_states(self.dag, &sa, &sb)?;
        self.cache.insert(key, r);
        self.log.push(ProbeRecord { a: self.mask_names(a), b: self.mask_names(b), rank: r });
        Ok(r)
    }
}
