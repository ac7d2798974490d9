//! The depth poset and its statistics.
//!
//! The poset is computed as the transitive closure of the union of the death
//! and birth relations. A brute-force oracle computes the same object from
//! its definition: the intersection of all shallow cancellation orders. The
//! oracle explores cancellation sequences by backtracking over subsets of
//! canceled pairs (the complex reached by canceling a set of pairs does not
//! depend on the order, so subsets can be memoized).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::complex::LefschetzComplex;
use crate::error::{Error, Result};
use crate::filter::{CellOrder, Filter};
use crate::reduction::{birth_relation, death_relation, BirthDeathPair, ReductionState};

/// A directed relation over birth-death pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRelation {
    pub nodes: Vec<BirthDeathPair>,
    /// Arcs as `(source, target)` node indices. Never contains self-arcs.
    pub arcs: BTreeSet<(usize, usize)>,
}

impl PairRelation {
    pub fn new(nodes: Vec<BirthDeathPair>, arcs: BTreeSet<(usize, usize)>) -> Self {
        debug_assert!(arcs.iter().all(|&(u, w)| u != w && u < nodes.len() && w < nodes.len()));
        PairRelation { nodes, arcs }
    }

    pub fn arcless(nodes: Vec<BirthDeathPair>) -> Self {
        PairRelation {
            nodes,
            arcs: BTreeSet::new(),
        }
    }

    /// Union of arcs with another relation over the same nodes.
    pub fn union(&self, other: &PairRelation) -> PairRelation {
        assert_eq!(self.nodes, other.nodes);
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().copied());
        PairRelation {
            nodes: self.nodes.clone(),
            arcs,
        }
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for &(u, w) in &self.arcs {
            out[u].push(w);
        }
        out
    }

    /// Topological order of the nodes; `CyclicInput` if a directed cycle
    /// exists.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        let succ = self.successors();
        let mut indeg = vec![0usize; n];
        for &(_, w) in &self.arcs {
            indeg[w] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::CyclicInput);
        }
        Ok(order)
    }

    /// Reachability bitsets (excluding the node itself), via reverse
    /// topological order.
    fn reach_sets(&self) -> Result<Vec<Vec<u64>>> {
        let n = self.nodes.len();
        let words = n.div_ceil(64).max(1);
        let order = self.topological_order()?;
        let succ = self.successors();
        let mut reach = vec![vec![0u64; words]; n];
        for &v in order.iter().rev() {
            for &w in &succ[v] {
                reach[v][w / 64] |= 1 << (w % 64);
                let (head, tail) = reach.split_at_mut(v.max(w));
                let (dst, src) = if v < w {
                    (&mut head[v], &tail[0])
                } else {
                    (&mut tail[0], &head[w])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        Ok(reach)
    }

    /// The unique transitive closure: an arc wherever a directed path runs.
    pub fn transitive_closure(&self) -> Result<PairRelation> {
        let reach = self.reach_sets()?;
        let mut arcs = BTreeSet::new();
        for (v, bits) in reach.iter().enumerate() {
            for (w0, &word) in bits.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    arcs.insert((v, w0 * 64 + b));
                    word &= word - 1;
                }
            }
        }
        Ok(PairRelation {
            nodes: self.nodes.clone(),
            arcs,
        })
    }

    /// The unique minimal arc set with the same closure: keep `(u, w)` iff
    /// no other successor of `u` reaches `w`.
    pub fn transitive_reduction(&self) -> Result<PairRelation> {
        let n = self.nodes.len();
        let words = n.div_ceil(64).max(1);
        let reach = self.reach_sets()?;
        let mut arcs = BTreeSet::new();
        for u in 0..n {
            let mut indirect = vec![0u64; words];
            let direct: Vec<usize> = (0..n)
                .filter(|&w| reach[u][w / 64] >> (w % 64) & 1 == 1)
                .collect();
            for &w in &direct {
                for (d, s) in indirect.iter_mut().zip(&reach[w]) {
                    *d |= s;
                }
            }
            for &w in &direct {
                if indirect[w / 64] >> (w % 64) & 1 == 0 {
                    arcs.insert((u, w));
                }
            }
        }
        Ok(PairRelation {
            nodes: self.nodes.clone(),
            arcs,
        })
    }

    /// Node indices with no incoming arc.
    pub fn minimal_nodes(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.nodes.len()];
        for &(_, w) in &self.arcs {
            has_in[w] = true;
        }
        (0..self.nodes.len()).filter(|&v| !has_in[v]).collect()
    }

    /// Node indices with no outgoing arc.
    pub fn maximal_nodes(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for &(u, _) in &self.arcs {
            has_out[u] = true;
        }
        (0..self.nodes.len()).filter(|&v| !has_out[v]).collect()
    }

    /// Arcs keyed by the cells of their endpoint pairs; stable across
    /// reindexings of the node list.
    pub fn arcs_by_cells(&self) -> BTreeSet<(BirthDeathPair, BirthDeathPair)> {
        self.arcs
            .iter()
            .map(|&(u, w)| (self.nodes[u], self.nodes[w]))
            .collect()
    }

    /// Order-independent form for equality tests.
    pub fn normalized(
        &self,
    ) -> (
        BTreeSet<BirthDeathPair>,
        BTreeSet<(BirthDeathPair, BirthDeathPair)>,
    ) {
        (self.nodes.iter().copied().collect(), self.arcs_by_cells())
    }
}

/// The depth poset of a filter: transitive closure of the union of the death
/// and birth relations.
pub fn depth_poset(complex: &LefschetzComplex, filter: &Filter) -> PairRelation {
    let state = ReductionState::compute(complex, filter.order_ref());
    depth_poset_from_state(&state)
}

pub fn depth_poset_from_state(state: &ReductionState) -> PairRelation {
    let dr = death_relation(state);
    let br = birth_relation(state);
    dr.union(&br)
        .transitive_closure()
        .expect("death and birth relations are acyclic")
}

/// Guard for the brute-force oracle.
pub const BRUTE_FORCE_GUARD: usize = 10;

/// Computes the depth poset from its definition: enumerate every shallow
/// cancellation order by backtracking and intersect the induced total
/// orders. States are subsets of canceled pairs; the complex reached does
/// not depend on the cancellation order within the subset (pivot order does
/// not change a mod-2 Schur complement), so results are memoized per subset.
pub fn brute_force_depth_poset(
    complex: &LefschetzComplex,
    filter: &Filter,
) -> Result<PairRelation> {
    // Discover the pair universe with one greedy cancellation sweep.
    let order = filter.order();
    let mut probe = (complex.clone(), order.clone());
    let mut universe: Vec<(String, String)> = Vec::new();
    while probe.0.incidence_count() > 0 {
        let (a, b) = probe.0.shallow_pairs(&probe.1)[0];
        universe.push((probe.0.id(a).to_string(), probe.0.id(b).to_string()));
        probe = probe.0.cancel_shallow_pair(&probe.1, a, b)?;
    }
    if universe.len() > BRUTE_FORCE_GUARD {
        return Err(Error::TooLarge {
            pairs: universe.len(),
            guard: BRUTE_FORCE_GUARD,
        });
    }
    let canon: HashMap<(String, String), usize> = universe
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();

    let mut memo: HashMap<u32, BTreeSet<(usize, usize)>> = HashMap::new();
    let full: u32 = if universe.len() == 32 {
        u32::MAX
    } else {
        (1 << universe.len()) - 1
    };
    let must_precede = explore(complex, &order, 0, full, &canon, &mut memo)?;

    // Package as a relation over the original complex's cells, sorted by
    // death position like every other relation.
    let mut nodes: Vec<(usize, BirthDeathPair)> = Vec::new();
    for (birth_id, death_id) in &universe {
        let birth = complex.lookup(birth_id)?;
        let death = complex.lookup(death_id)?;
        nodes.push((
            order.position(death),
            BirthDeathPair {
                birth,
                death,
                degree: complex.dim(birth),
            },
        ));
    }
    let mut index_by_death: Vec<usize> = (0..nodes.len()).collect();
    index_by_death.sort_by_key(|&i| nodes[i].0);
    let mut remap = vec![0usize; nodes.len()];
    for (new_idx, &old_idx) in index_by_death.iter().enumerate() {
        remap[old_idx] = new_idx;
    }
    let arcs = must_precede
        .into_iter()
        .map(|(u, w)| (remap[u], remap[w]))
        .collect();
    let nodes = index_by_death.into_iter().map(|i| nodes[i].1).collect();
    Ok(PairRelation::new(nodes, arcs))
}

fn explore(
    complex: &LefschetzComplex,
    order: &CellOrder,
    canceled: u32,
    full: u32,
    canon: &HashMap<(String, String), usize>,
    memo: &mut HashMap<u32, BTreeSet<(usize, usize)>>,
) -> Result<BTreeSet<(usize, usize)>> {
    if canceled == full {
        return Ok(BTreeSet::new());
    }
    if let Some(cached) = memo.get(&canceled) {
        return Ok(cached.clone());
    }
    let shallow = complex.shallow_pairs(order);
    debug_assert!(!shallow.is_empty());
    let mut intersection: Option<BTreeSet<(usize, usize)>> = None;
    for (a, b) in shallow {
        let key = (complex.id(a).to_string(), complex.id(b).to_string());
        let sigma = canon[&key];
        let (next_complex, next_order) = complex.cancel_shallow_pair(order, a, b)?;
        let rest = explore(
            &next_complex,
            &next_order,
            canceled | 1 << sigma,
            full,
            canon,
            memo,
        )?;
        let mut rel = rest;
        for tau in 0..32 {
            if full >> tau & 1 == 1 && canceled >> tau & 1 == 0 && tau != sigma {
                rel.insert((sigma, tau));
            }
        }
        intersection = Some(match intersection {
            None => rel,
            Some(acc) => acc.intersection(&rel).copied().collect(),
        });
    }
    let result = intersection.unwrap_or_default();
    memo.insert(canceled, result.clone());
    Ok(result)
}

/// Which arc set the component and cycle counts are taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcSet {
    AsGiven,
    Closure,
    Reduction,
}

/// Statistics of one relation restricted to one degree (or the whole
/// relation).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatsRow {
    pub nodes: usize,
    pub arcs_closure: usize,
    pub arcs_reduction: usize,
    /// Arc count of the selected arc set.
    pub arcs_selected: usize,
    /// Connected components of the undirected support of the selected set.
    pub components: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Arcs on the longest directed path.
    pub height: usize,
    /// `components + arcs - nodes` over the selected arc set.
    pub cycles: i64,
}

/// Per-degree statistics plus the totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetStats {
    pub per_degree: BTreeMap<i32, StatsRow>,
    pub total: StatsRow,
}

fn stats_of(
    nodes: &[usize],
    selected: &BTreeSet<(usize, usize)>,
    closure: &BTreeSet<(usize, usize)>,
    reduction: &BTreeSet<(usize, usize)>,
) -> StatsRow {
    let node_set: BTreeSet<usize> = nodes.iter().copied().collect();
    let keep = |set: &BTreeSet<(usize, usize)>| -> Vec<(usize, usize)> {
        set.iter()
            .filter(|(u, w)| node_set.contains(u) && node_set.contains(w))
            .copied()
            .collect()
    };
    let sel = keep(selected);
    let clo = keep(closure);
    let red = keep(reduction);

    // Union-find over the undirected support of the selected arcs.
    let mut local: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &v) in nodes.iter().enumerate() {
        local.insert(v, i);
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let r = find(parent, parent[v]);
            parent[v] = r;
        }
        parent[v]
    }
    for &(u, w) in &sel {
        let (ru, rw) = (find(&mut parent, local[&u]), find(&mut parent, local[&w]));
        if ru != rw {
            parent[ru] = rw;
        }
    }
    let components = (0..nodes.len())
        .filter(|&v| find(&mut parent, v) == v)
        .count();

    let mut has_in: BTreeMap<usize, bool> = nodes.iter().map(|&v| (v, false)).collect();
    let mut has_out = has_in.clone();
    for &(u, w) in &sel {
        has_out.insert(u, true);
        has_in.insert(w, true);
    }

    // Longest path over the reduction arcs (the height of the poset does
    // not depend on which of the three sets is used).
    let mut succ: BTreeMap<usize, Vec<usize>> = nodes.iter().map(|&v| (v, vec![])).collect();
    let mut indeg: BTreeMap<usize, usize> = nodes.iter().map(|&v| (v, 0)).collect();
    for &(u, w) in &red {
        succ.get_mut(&u).unwrap().push(w);
        *indeg.get_mut(&w).unwrap() += 1;
    }
    let mut queue: Vec<usize> = nodes.iter().copied().filter(|v| indeg[v] == 0).collect();
    let mut dist: BTreeMap<usize, usize> = nodes.iter().map(|&v| (v, 0)).collect();
    let mut height = 0;
    while let Some(v) = queue.pop() {
        height = height.max(dist[&v]);
        for &w in &succ[&v].clone() {
            let cand = dist[&v] + 1;
            if cand > dist[&w] {
                dist.insert(w, cand);
            }
            let e = indeg.get_mut(&w).unwrap();
            *e -= 1;
            if *e == 0 {
                queue.push(w);
            }
        }
    }

    StatsRow {
        nodes: nodes.len(),
        arcs_closure: clo.len(),
        arcs_reduction: red.len(),
        arcs_selected: sel.len(),
        components,
        min_nodes: has_in.values().filter(|&&b| !b).count(),
        max_nodes: has_out.values().filter(|&&b| !b).count(),
        height,
        cycles: components as i64 + sel.len() as i64 - nodes.len() as i64,
    }
}

/// Statistics of a relation, per degree and in total. The relation must be
/// acyclic.
pub fn poset_stats(rel: &PairRelation, use_set: ArcSet) -> Result<PosetStats> {
    let closure = rel.transitive_closure()?;
    let reduction = rel.transitive_reduction()?;
    let selected = match use_set {
        ArcSet::AsGiven => &rel.arcs,
        ArcSet::Closure => &closure.arcs,
        ArcSet::Reduction => &reduction.arcs,
    };

    let mut degrees: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, p) in rel.nodes.iter().enumerate() {
        degrees.entry(p.degree).or_default().push(i);
    }
    let mut per_degree = BTreeMap::new();
    for (&d, nodes) in &degrees {
        per_degree.insert(d, stats_of(nodes, selected, &closure.arcs, &reduction.arcs));
    }
    let all: Vec<usize> = (0..rel.nodes.len()).collect();
    let total = stats_of(&all, selected, &closure.arcs, &reduction.arcs);
    Ok(PosetStats { per_degree, total })
}
