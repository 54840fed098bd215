//! Strict gammoids: linkage matroids of digraphs.
//!
//! Ground set = all nodes of a digraph; a set X is independent when there are
//! node-disjoint directed paths linking X injectively into the target set
//! (a target linked to itself by a zero-length path counts). The classical
//! duality with transversal matroids is provided in both directions and used
//! by the test suite as a cross-oracle: the strict gammoid of a digraph is
//! the dual of the transversal matroid of its fan-out system, and every
//! bipartite system with a full transversal arises that way.

use super::transversal::{transversal_matroid, BipartiteSystem, TransversalMatroid};
use super::{check_ground, Dual, Matroid, MatroidError, SubsetMask};
use crate::flow::max_flow_unit;

/// A digraph plus a set of target nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkageInstance {
    pub nodes: Vec<String>,
    pub arcs: Vec<(String, String)>,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct StrictGammoid {
    nodes: Vec<String>,
    arcs: Vec<(usize, usize)>,
    targets: SubsetMask,
}

pub fn strict_gammoid(inst: &LinkageInstance) -> Result<StrictGammoid, MatroidError> {
    check_ground(&inst.nodes)?;
    let index = |id: &str| -> Result<usize, MatroidError> {
        inst.nodes
            .iter()
            .position(|n| n == id)
            .ok_or_else(|| MatroidError::UnknownElement(id.to_string()))
    };
    let mut arcs = Vec::with_capacity(inst.arcs.len());
    for (u, v) in &inst.arcs {
        arcs.push((index(u)?, index(v)?));
    }
    let mut targets = SubsetMask::EMPTY;
    for t in &inst.targets {
        let i = index(t)?;
        if targets.contains(i) {
            return Err(MatroidError::DuplicateElement(t.clone()));
        }
        targets = targets.with(i);
    }
    Ok(StrictGammoid {
        nodes: inst.nodes.clone(),
        arcs,
        targets,
    })
}

impl StrictGammoid {
    /// Node-disjoint linkage from X into the targets, measured as unit flow
    /// in the node-split digraph.
    fn linkage_size(&self, x: SubsetMask) -> usize {
        let n = self.nodes.len();
        let source = 2 * n;
        let sink = 2 * n + 1;
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        for v in 0..n {
            arcs.push((2 * v, 2 * v + 1));
        }
        for &(u, v) in &self.arcs {
            arcs.push((2 * u + 1, 2 * v));
        }
        for v in x.iter() {
            arcs.push((source, 2 * v));
        }
        for t in self.targets.iter() {
            arcs.push((2 * t + 1, sink));
        }
        max_flow_unit(2 * n + 2, &arcs, source, sink).0
    }
}

impl Matroid for StrictGammoid {
    fn ground(&self) -> &[String] {
        &self.nodes
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        x.len() <= self.targets.len() && self.linkage_size(x) == x.len()
    }
}

/// The fan-out system of a linkage instance: one set {v} + out-neighbors per
/// non-target node. The strict gammoid is the dual of its transversal
/// matroid.
pub fn fan_out_system(inst: &LinkageInstance) -> BipartiteSystem {
    let sets = inst
        .nodes
        .iter()
        .filter(|v| !inst.targets.contains(v))
        .map(|v| {
            let mut members = vec![v.clone()];
            for (u, w) in &inst.arcs {
                if u == v && !members.contains(w) {
                    members.push(w.clone());
                }
            }
            (format!("A_{v}"), members)
        })
        .collect();
    BipartiteSystem {
        ground: inst.nodes.clone(),
        sets,
    }
}

/// The reverse construction: from a bipartite system with a full transversal
/// to a linkage instance whose strict gammoid is the dual of the system's
/// transversal matroid. The transversal picks one representative per set;
/// arcs run from each representative to the rest of its set, and the targets
/// are the unpicked elements.
pub fn linkage_from_system(sys: &BipartiteSystem) -> Result<LinkageInstance, MatroidError> {
    let tm: TransversalMatroid = transversal_matroid(sys)?;
    let pick = tm.full_transversal().ok_or(MatroidError::NoTransversal)?;
    let mut arcs = Vec::new();
    let mut picked = SubsetMask::EMPTY;
    for (j, (_, members)) in sys.sets.iter().enumerate() {
        let rep = &sys.ground[pick[j]];
        picked = picked.with(pick[j]);
        for m in members {
            if m != rep {
                arcs.push((rep.clone(), m.clone()));
            }
        }
    }
    let targets = sys
        .ground
        .iter()
        .enumerate()
        .filter(|(i, _)| !picked.contains(*i))
        .map(|(_, g)| g.clone())
        .collect();
    Ok(LinkageInstance {
        nodes: sys.ground.clone(),
        arcs,
        targets,
    })
}

/// Convenience: the dual-of-transversal route to the same matroid as
/// [`strict_gammoid`]. Used as an independent oracle in tests.
pub fn cotransversal_of(inst: &LinkageInstance) -> Result<Dual<TransversalMatroid>, MatroidError> {
    Ok(super::dual(transversal_matroid(&fan_out_system(inst))?))
}
