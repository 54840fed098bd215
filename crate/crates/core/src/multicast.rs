//! Receiver path matroids and the exchange-closure matroid of a network.
//!
//! Fix, for one receiver, a maximal family of pairwise edge-disjoint paths
//! out of the imaginary links. The real links on those paths carry a
//! matroid: a set is independent when it can be routed backwards along the
//! paths to distinct first links. Two constructions of that matroid are
//! kept deliberately separate so they can be checked against each other: a
//! bipartite system whose transversal matroid is dualized, and a direct
//! linkage oracle on the succession digraph.
//!
//! The network-wide matroid is grown from the first receiver's bases by
//! exchanging a basis element for its successor on another receiver's
//! path, repeated to a fixpoint.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::matroid::{
    dual, enumerate_bases, strict_gammoid, transversal_matroid, BasisMatroid, BipartiteSystem,
    Dual, LinkageInstance, Matroid, MatroidError, StrictGammoid, SubsetMask, TransversalMatroid,
    MAX_BASES,
};
use crate::network::{MulticastNetwork, NetworkError, PathSet};

#[derive(Debug, Error)]
pub enum MulticastError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("bad path set: {0}")]
    BadPath(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("degenerate code: {0}")]
    Degenerate(String),
}

/// One receiver's paths as a bipartite system. The ground holds every real
/// link on the paths; each link with a predecessor contributes the
/// two-element set {link, predecessor}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverBipartite {
    pub receiver: String,
    /// First real link of each path, in path order.
    pub first_links: Vec<String>,
    pub system: BipartiteSystem,
}

/// The receiver matroid in its dual-of-transversal form.
pub type ReceiverGammoid = Dual<TransversalMatroid>;

/// Resolves a path set against the network: every path must run from an
/// imaginary link to the receiver along adjacent links, and no link may be
/// reused. Returns the real link indices of each path.
fn validated_paths(
    net: &MulticastNetwork,
    ps: &PathSet,
) -> Result<Vec<Vec<usize>>, MulticastError> {
    if ps.paths.len() != net.dimension() {
        return Err(MulticastError::BadPath(format!(
            "receiver {} needs {} paths, got {}",
            ps.receiver,
            net.dimension(),
            ps.paths.len()
        )));
    }
    let mut used = BTreeSet::new();
    let mut out = Vec::with_capacity(ps.paths.len());
    for path in &ps.paths {
        let mut idx = Vec::with_capacity(path.len());
        for id in path {
            let i = net
                .link_index(id)
                .ok_or_else(|| MulticastError::BadPath(format!("unknown link {id:?}")))?;
            if !used.insert(i) {
                return Err(MulticastError::BadPath(format!("link {id:?} reused")));
            }
            idx.push(i);
        }
        if idx.len() < 2 || !net.is_imaginary(idx[0]) {
            return Err(MulticastError::BadPath(format!(
                "path for {} must start at an imaginary link and reach it",
                ps.receiver
            )));
        }
        for w in idx.windows(2) {
            // An imaginary link in a later position has no tail and fails here.
            if net.link_tail_id(w[1]) != Some(net.link_head_id(w[0])) {
                return Err(MulticastError::BadPath(format!(
                    "links {:?} and {:?} are not adjacent",
                    net.link_id(w[0]),
                    net.link_id(w[1])
                )));
            }
        }
        if net.link_head_id(*idx.last().unwrap()) != ps.receiver {
            return Err(MulticastError::BadPath(format!(
                "path does not end at {}",
                ps.receiver
            )));
        }
        out.push(idx[1..].to_vec());
    }
    Ok(out)
}

pub fn receiver_bipartite(
    net: &MulticastNetwork,
    ps: &PathSet,
) -> Result<ReceiverBipartite, MulticastError> {
    let paths = validated_paths(net, ps)?;
    let mut ground_idx: Vec<usize> = paths.iter().flatten().copied().collect();
    ground_idx.sort_unstable();
    let ground: Vec<String> = ground_idx
        .iter()
        .map(|&i| net.link_id(i).to_string())
        .collect();
    let first_links: Vec<String> = paths
        .iter()
        .map(|p| net.link_id(p[0]).to_string())
        .collect();
    // pred is keyed by link index, so sets come out in link order.
    let mut pred = BTreeMap::new();
    for p in &paths {
        for w in p.windows(2) {
            pred.insert(w[1], w[0]);
        }
    }
    let sets = pred
        .iter()
        .map(|(&e, &d)| {
            (
                format!("A_{}", net.link_id(e)),
                vec![net.link_id(e).to_string(), net.link_id(d).to_string()],
            )
        })
        .collect();
    Ok(ReceiverBipartite {
        receiver: ps.receiver.clone(),
        first_links,
        system: BipartiteSystem { ground, sets },
    })
}

/// The receiver matroid, built by dualizing the transversal matroid of the
/// bipartite presentation.
pub fn receiver_gammoid(
    net: &MulticastNetwork,
    ps: &PathSet,
) -> Result<ReceiverGammoid, MulticastError> {
    let h = receiver_bipartite(net, ps)?;
    Ok(dual(transversal_matroid(&h.system)?))
}

/// The same matroid presented as a linkage problem: arcs run from each
/// link to its predecessor, targets are the first links.
pub fn receiver_linkage(
    net: &MulticastNetwork,
    ps: &PathSet,
) -> Result<LinkageInstance, MulticastError> {
    let paths = validated_paths(net, ps)?;
    let mut nodes_idx: Vec<usize> = paths.iter().flatten().copied().collect();
    nodes_idx.sort_unstable();
    let nodes = nodes_idx
        .iter()
        .map(|&i| net.link_id(i).to_string())
        .collect();
    let mut arcs = Vec::new();
    for p in &paths {
        for w in p.windows(2) {
            arcs.push((net.link_id(w[1]).to_string(), net.link_id(w[0]).to_string()));
        }
    }
    let targets = paths
        .iter()
        .map(|p| net.link_id(p[0]).to_string())
        .collect();
    Ok(LinkageInstance {
        nodes,
        arcs,
        targets,
    })
}

/// Independence oracle for the receiver matroid that never touches the
/// bipartite route: kept as a cross-check, not a convenience.
pub fn receiver_gammoid_direct(
    net: &MulticastNetwork,
    ps: &PathSet,
) -> Result<StrictGammoid, MulticastError> {
    Ok(strict_gammoid(&receiver_linkage(net, ps)?)?)
}

/// Link-disjoint paths that carry the code's data to `t`, found by walking
/// back from the receiver: each step swaps the topologically last frontier
/// link for an in-link that feeds it with a nonzero coefficient while the
/// frontier's global kernels stay linearly independent. Unlike
/// `edge_disjoint_paths` the result never routes through a link the code
/// left dead, so it can differ from the maxflow choice.
pub fn code_aligned_paths(code: &LinearCode, t: &str) -> Result<PathSet, MulticastError> {
    let net = code.network();
    let omega = net.dimension();
    let t_idx = net
        .node_index(t)
        .ok_or_else(|| NetworkError::UnknownNode(t.to_string()))?;
    if t == net.source_id() {
        return Err(NetworkError::SourceQuery.into());
    }

    let rank_of = |links: &[usize]| -> Result<usize, CodeError> {
        let labels: Vec<&str> = links.iter().map(|&l| net.link_id(l)).collect();
        code.global().subspace_dim(&labels)
    };

    // Seed the frontier from the receiver's in-links, greedily keeping the
    // kernels independent. Falling short means the code is not a multicast.
    let mut frontier: Vec<usize> = Vec::new();
    for &d in net.in_links_of(t_idx) {
        if frontier.len() == omega {
            break;
        }
        frontier.push(d);
        if rank_of(&frontier)? != frontier.len() {
            frontier.pop();
        }
    }
    if frontier.len() < omega {
        return Err(MulticastError::Degenerate(format!(
            "rank {} of {omega} at {t}",
            frontier.len()
        )));
    }

    // Processing the topologically last link each round makes the sequence
    // of processed positions strictly decreasing, so no link is visited
    // twice and the recorded chains stay disjoint.
    let topo = net.real_links_topo();
    let mut order = vec![0usize; net.num_links()];
    for (pos, &l) in topo.iter().enumerate() {
        order[l] = pos + 1;
    }
    let mut succ: Vec<Option<usize>> = vec![None; net.num_links()];
    while let Some(slot) = (0..frontier.len())
        .filter(|&i| !net.is_imaginary(frontier[i]))
        .max_by_key(|&i| order[frontier[i]])
    {
        let d = frontier[slot];
        let tail = net
            .node_index(net.link_tail_id(d).expect("real link has a tail"))
            .expect("tail is a node");
        let rest: Vec<usize> = frontier
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != slot)
            .map(|(_, &l)| l)
            .collect();
        let base = rank_of(&rest)?;
        let mut chosen = None;
        for &c in net.in_links_of(tail) {
            if code.local().get(net.link_id(c), net.link_id(d)).value() == 0 {
                continue;
            }
            if rest.contains(&c) {
                continue;
            }
            let mut with_c = rest.clone();
            with_c.push(c);
            if rank_of(&with_c)? == base + 1 {
                chosen = Some(c);
                break;
            }
        }
        let Some(c) = chosen else {
            return Err(MulticastError::Degenerate(format!(
                "no live feed keeps the frontier independent behind {}",
                net.link_id(d)
            )));
        };
        debug_assert!(succ[c].is_none(), "link visited twice");
        succ[c] = Some(d);
        frontier[slot] = c;
    }

    // The frontier is now the imaginary links; read each chain forwards.
    frontier.sort_unstable();
    let paths = frontier
        .iter()
        .map(|&f| {
            let mut path = vec![net.link_id(f).to_string()];
            let mut cur = succ[f];
            while let Some(d) = cur {
                path.push(net.link_id(d).to_string());
                cur = succ[d];
            }
            path
        })
        .collect();
    Ok(PathSet {
        receiver: t.to_string(),
        paths,
    })
}

/// The exchange closure over all receivers. Ground is every real link;
/// elements untouched by any basis are loops.
#[derive(Debug, Clone)]
pub struct MulticastMatroid {
    matroid: BasisMatroid,
    /// Per receiver, its own matroid's bases embedded in the full ground.
    receiver_views: Vec<(String, Vec<SubsetMask>)>,
    swaps: usize,
}

impl MulticastMatroid {
    pub fn matroid(&self) -> &BasisMatroid {
        &self.matroid
    }

    pub fn ground(&self) -> &[String] {
        self.matroid.ground()
    }

    pub fn rank(&self) -> usize {
        self.matroid.rank()
    }

    pub fn num_bases(&self) -> usize {
        self.matroid.family().len()
    }

    /// Exchanges that produced a basis not seen before.
    pub fn swaps(&self) -> usize {
        self.swaps
    }

    pub fn receiver_views(&self) -> &[(String, Vec<SubsetMask>)] {
        &self.receiver_views
    }

    /// Ground elements no basis uses.
    pub fn loops(&self) -> Vec<String> {
        let mut used = SubsetMask::EMPTY;
        for &b in self.matroid.family() {
            used = used.union(b);
        }
        self.ground()
            .iter()
            .enumerate()
            .filter(|&(i, _)| !used.contains(i))
            .map(|(_, id)| id.clone())
            .collect()
    }

    pub fn union_of_receiver_bases(&self) -> Vec<SubsetMask> {
        let mut all = BTreeSet::new();
        for (_, v) in &self.receiver_views {
            all.extend(v.iter().copied());
        }
        all.into_iter().collect()
    }

    /// Closure bases beyond the union of the per-receiver families.
    pub fn surplus(&self) -> Vec<SubsetMask> {
        let union: BTreeSet<SubsetMask> = self.union_of_receiver_bases().into_iter().collect();
        self.matroid
            .family()
            .iter()
            .copied()
            .filter(|b| !union.contains(b))
            .collect()
    }
}

fn embed(map: &[usize], b: SubsetMask) -> SubsetMask {
    let mut out = SubsetMask::EMPTY;
    for i in b.iter() {
        out = out.with(map[i]);
    }
    out
}

/// Grows the network matroid: the first receiver's bases seed the family,
/// and every other receiver contributes the exchange "replace a link by
/// its successor on my path". Exchanges that would collapse the basis
/// (the successor already sits in it) are skipped. Runs to a fixpoint.
pub fn build_multicast_matroid(net: &MulticastNetwork) -> Result<MulticastMatroid, MulticastError> {
    let ground_idx: Vec<usize> = (0..net.num_links())
        .filter(|&i| !net.is_imaginary(i))
        .collect();
    let ground: Vec<String> = ground_idx
        .iter()
        .map(|&i| net.link_id(i).to_string())
        .collect();
    let global_pos: BTreeMap<usize, usize> = ground_idx
        .iter()
        .enumerate()
        .map(|(pos, &i)| (i, pos))
        .collect();

    let receivers: Vec<String> = net.receiver_ids().iter().map(|s| s.to_string()).collect();
    let mut path_sets = Vec::with_capacity(receivers.len());
    for r in &receivers {
        path_sets.push(net.edge_disjoint_paths(r)?);
    }

    let mut receiver_views = Vec::with_capacity(path_sets.len());
    for ps in &path_sets {
        let g = receiver_gammoid(net, ps)?;
        let map: Vec<usize> = g
            .ground()
            .iter()
            .map(|id| global_pos[&net.link_index(id).unwrap()])
            .collect();
        let mut bases: Vec<SubsetMask> = enumerate_bases(&g)?
            .into_iter()
            .map(|b| embed(&map, b))
            .collect();
        bases.sort_unstable();
        receiver_views.push((ps.receiver.clone(), bases));
    }

    // Successor maps of every receiver after the first, over ground positions.
    let mut succ_maps = Vec::new();
    for ps in &path_sets[1..] {
        let paths = validated_paths(net, ps)?;
        let mut m = BTreeMap::new();
        for p in &paths {
            for w in p.windows(2) {
                m.insert(global_pos[&w[0]], global_pos[&w[1]]);
            }
        }
        succ_maps.push(m);
    }

    let seeds = receiver_views[0].1.clone();
    let mut seen: BTreeSet<SubsetMask> = seeds.iter().copied().collect();
    let mut queue: VecDeque<SubsetMask> = seeds.into_iter().collect();
    let mut swaps = 0usize;
    while let Some(b) = queue.pop_front() {
        for m in &succ_maps {
            for x in b.iter() {
                let Some(&y) = m.get(&x) else { continue };
                if b.contains(y) {
                    continue;
                }
                let nb = b.without(x).with(y);
                if seen.insert(nb) {
                    swaps += 1;
                    if seen.len() > MAX_BASES {
                        return Err(MatroidError::TooManyBases.into());
                    }
                    queue.push_back(nb);
                }
            }
        }
    }

    let matroid = BasisMatroid::from_masks(ground, seen.into_iter().collect())?;
    Ok(MulticastMatroid {
        matroid,
        receiver_views,
        swaps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationReport {
    pub ok: bool,
    /// First basis whose kernel columns are dependent, if any.
    pub failing_basis: Option<Vec<String>>,
}

/// Checks that the code's global kernels send every basis of `m` to a set
/// of columns of full rank. Ground elements must name links of the code's
/// network.
pub fn verify_representation<M: Matroid + ?Sized>(
    code: &LinearCode,
    m: &M,
) -> Result<RepresentationReport, CodeError> {
    let rank = m.rank();
    let ground = m.ground();
    for b in enumerate_bases(m)? {
        let ids: Vec<&str> = b.iter().map(|i| ground[i].as_str()).collect();
        if code.global().subspace_dim(&ids)? != rank {
            return Ok(RepresentationReport {
                ok: false,
                failing_basis: Some(ids.into_iter().map(String::from).collect()),
            });
        }
    }
    Ok(RepresentationReport {
        ok: true,
        failing_basis: None,
    })
}
