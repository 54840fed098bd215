//! Acyclic multicast networks.
//!
//! A network is a DAG with one source, a message dimension omega, and a set of
//! receivers. On top of the real links the model adds omega imaginary links
//! ending at the source; they have no tail node and act as the points where
//! the source messages enter. Link order is fixed once at construction:
//! imaginary links first (`$imag1..`), then real links in document order.
//! Every algorithm in the crate that says "lexicographic" means this order.
//!
//! Max flow is measured from the imaginary links, so its value never exceeds
//! the dimension. That convention is what makes super-source augmentation
//! flow-preserving.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::flow::max_flow_unit;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("network document is not valid JSON: {0}")]
    Json(String),
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("duplicate link id {0:?}")]
    DuplicateLinkId(String),
    #[error("id {0:?} uses the reserved '$' prefix")]
    ReservedId(String),
    #[error("dangling node: link {link:?} references undeclared node {node:?}")]
    DanglingNode { link: String, node: String },
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("no receivers declared")]
    NoReceivers,
    #[error("receiver {0:?} is the source")]
    ReceiverIsSource(String),
    #[error("duplicate receiver {0:?}")]
    DuplicateReceiver(String),
    #[error("link {0:?} ends at the source")]
    LinkIntoSource(String),
    #[error("cycle detected among the links")]
    CycleDetected,
    #[error("query node is the source")]
    SourceQuery,
    #[error("receiver {receiver:?} has max flow {actual}, need {needed} disjoint paths")]
    InsufficientFlow {
        receiver: String,
        needed: usize,
        actual: usize,
    },
}

/// Tail of a link: a real node, or nothing for imaginary source inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkTail {
    Imaginary,
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub(crate) id: String,
    pub(crate) tail: LinkTail,
    pub(crate) head: usize,
}

/// Source-to-receivers network over a DAG, with imaginary links materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastNetwork {
    nodes: Vec<String>,
    links: Vec<Link>,
    source: usize,
    receivers: Vec<usize>,
    dimension: usize,
    in_links: Vec<Vec<usize>>,
    out_links: Vec<Vec<usize>>,
    topo_pos: Vec<usize>,
}

/// Link-disjoint paths feeding one receiver. Paths are lists of link ids and
/// always start at an imaginary link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    pub receiver: String,
    pub paths: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    dimension: usize,
    nodes: Vec<String>,
    links: Vec<LinkDoc>,
    source: String,
    receivers: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkDoc {
    id: String,
    tail: String,
    head: String,
}

impl MulticastNetwork {
    /// Builds and validates a network from plain parts. Link triples are
    /// (id, tail node, head node) in document order.
    pub fn build(
        dimension: usize,
        nodes: Vec<String>,
        links: Vec<(String, String, String)>,
        source: &str,
        receivers: Vec<String>,
    ) -> Result<Self, NetworkError> {
        if dimension == 0 {
            return Err(NetworkError::BadDimension);
        }
        let mut node_index: HashMap<String, usize> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.starts_with('$') {
                return Err(NetworkError::ReservedId(n.clone()));
            }
            if node_index.insert(n.clone(), i).is_some() {
                return Err(NetworkError::DuplicateNode(n.clone()));
            }
        }
        let source_idx = *node_index
            .get(source)
            .ok_or_else(|| NetworkError::UnknownNode(source.to_string()))?;
        if receivers.is_empty() {
            return Err(NetworkError::NoReceivers);
        }
        let mut receiver_idx = Vec::new();
        for r in &receivers {
            let idx = *node_index
                .get(r)
                .ok_or_else(|| NetworkError::UnknownNode(r.clone()))?;
            if idx == source_idx {
                return Err(NetworkError::ReceiverIsSource(r.clone()));
            }
            if receiver_idx.contains(&idx) {
                return Err(NetworkError::DuplicateReceiver(r.clone()));
            }
            receiver_idx.push(idx);
        }

        let mut all_links = Vec::with_capacity(dimension + links.len());
        for i in 0..dimension {
            all_links.push(Link {
                id: format!("$imag{}", i + 1),
                tail: LinkTail::Imaginary,
                head: source_idx,
            });
        }
        let mut link_ids: HashSet<String> = HashSet::new();
        for (id, tail, head) in &links {
            if id.starts_with('$') {
                return Err(NetworkError::ReservedId(id.clone()));
            }
            if !link_ids.insert(id.clone()) {
                return Err(NetworkError::DuplicateLinkId(id.clone()));
            }
            let tail_idx = *node_index
                .get(tail)
                .ok_or_else(|| NetworkError::DanglingNode {
                    link: id.clone(),
                    node: tail.clone(),
                })?;
            let head_idx = *node_index
                .get(head)
                .ok_or_else(|| NetworkError::DanglingNode {
                    link: id.clone(),
                    node: head.clone(),
                })?;
            if head_idx == source_idx {
                return Err(NetworkError::LinkIntoSource(id.clone()));
            }
            all_links.push(Link {
                id: id.clone(),
                tail: LinkTail::Node(tail_idx),
                head: head_idx,
            });
        }

        let mut in_links: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        let mut out_links: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, link) in all_links.iter().enumerate() {
            in_links[link.head].push(i);
            if let LinkTail::Node(t) = link.tail {
                out_links[t].push(i);
            }
        }

        // Kahn's algorithm over real links; smallest node index first keeps
        // the order canonical.
        let mut indegree: Vec<usize> = (0..nodes.len())
            .map(|n| {
                in_links[n]
                    .iter()
                    .filter(|&&l| matches!(all_links[l].tail, LinkTail::Node(_)))
                    .count()
            })
            .collect();
        let mut topo_pos = vec![usize::MAX; nodes.len()];
        let mut placed = 0usize;
        let mut ready: Vec<usize> = (0..nodes.len()).filter(|&n| indegree[n] == 0).collect();
        while let Some(n) = ready.iter().copied().min() {
            ready.retain(|&m| m != n);
            topo_pos[n] = placed;
            placed += 1;
            for &l in &out_links[n] {
                let h = all_links[l].head;
                indegree[h] -= 1;
                if indegree[h] == 0 {
                    ready.push(h);
                }
            }
        }
        if placed != nodes.len() {
            return Err(NetworkError::CycleDetected);
        }

        Ok(MulticastNetwork {
            nodes,
            links: all_links,
            source: source_idx,
            receivers: receiver_idx,
            dimension,
            in_links,
            out_links,
            topo_pos,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn source_id(&self) -> &str {
        &self.nodes[self.source]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|s| s.as_str())
    }

    pub fn receiver_ids(&self) -> Vec<&str> {
        self.receivers
            .iter()
            .map(|&r| self.nodes[r].as_str())
            .collect()
    }

    /// All links, imaginary first. Indices into this order are the crate-wide
    /// lexicographic order on links.
    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_real_links(&self) -> usize {
        self.links.len() - self.dimension
    }

    pub fn link_id(&self, idx: usize) -> &str {
        &self.links[idx].id
    }

    pub fn link_index(&self, id: &str) -> Option<usize> {
        self.links.iter().position(|l| l.id == id)
    }

    pub fn is_imaginary(&self, idx: usize) -> bool {
        idx < self.dimension
    }

    pub fn link_tail_id(&self, idx: usize) -> Option<&str> {
        match self.links[idx].tail {
            LinkTail::Imaginary => None,
            LinkTail::Node(n) => Some(&self.nodes[n]),
        }
    }

    pub fn link_head_id(&self, idx: usize) -> &str {
        &self.nodes[self.links[idx].head]
    }

    pub(crate) fn link_tail(&self, idx: usize) -> LinkTail {
        self.links[idx].tail
    }

    pub(crate) fn link_head(&self, idx: usize) -> usize {
        self.links[idx].head
    }

    pub(crate) fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub(crate) fn source_index(&self) -> usize {
        self.source
    }

    pub(crate) fn receiver_indices(&self) -> &[usize] {
        &self.receivers
    }

    /// In-links of a node, ascending link index. For the source this is
    /// exactly the imaginary links.
    pub(crate) fn in_links_of(&self, node: usize) -> &[usize] {
        &self.in_links[node]
    }

    #[cfg(test)]
    pub(crate) fn out_links_of(&self, node: usize) -> &[usize] {
        &self.out_links[node]
    }

    /// Adjacent link pairs (d, e): head of d is the tail of e. Enumerated by
    /// ascending (tail link, head link) index.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (d, link) in self.links.iter().enumerate() {
            for &e in &self.out_links[link.head] {
                pairs.push((d, e));
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Real link indices sorted so every link's tail precedes its head
    /// (topological position of the tail node, then link index).
    pub(crate) fn real_links_topo(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (self.dimension..self.links.len()).collect();
        order.sort_by_key(|&l| {
            let t = match self.links[l].tail {
                LinkTail::Node(n) => self.topo_pos[n],
                LinkTail::Imaginary => 0,
            };
            (t, l)
        });
        order
    }

    /// Max flow from the imaginary links to `t`, counted in link-disjoint
    /// paths. Bounded above by the dimension.
    pub fn maxflow(&self, t: &str) -> Result<usize, NetworkError> {
        let t_idx = self
            .node_index(t)
            .ok_or_else(|| NetworkError::UnknownNode(t.to_string()))?;
        if t_idx == self.source {
            return Err(NetworkError::SourceQuery);
        }
        Ok(self.maxflow_excluding(t_idx, &HashSet::new()))
    }

    /// Same flow measurement with some links deleted.
    fn maxflow_excluding(&self, t_idx: usize, removed: &HashSet<usize>) -> usize {
        // Line digraph with node splitting: each link i becomes 2i -> 2i+1.
        let l = self.links.len();
        let super_source = 2 * l;
        let sink = 2 * l + 1;
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        for i in 0..l {
            if removed.contains(&i) {
                continue;
            }
            arcs.push((2 * i, 2 * i + 1));
            match self.links[i].tail {
                LinkTail::Imaginary => arcs.push((super_source, 2 * i)),
                LinkTail::Node(_) => {}
            }
            if self.links[i].head == t_idx {
                arcs.push((2 * i + 1, sink));
            } else {
                for &e in &self.out_links[self.links[i].head] {
                    if !removed.contains(&e) {
                        arcs.push((2 * i + 1, 2 * e));
                    }
                }
            }
        }
        max_flow_unit(2 * l + 2, &arcs, super_source, sink).0
    }

    /// The lexicographically smallest family of `dimension` link-disjoint
    /// paths from the imaginary links to `t`. Paths are extracted greedily:
    /// each slot takes the smallest link-index sequence whose removal still
    /// leaves enough flow for the remaining slots.
    pub fn edge_disjoint_paths(&self, t: &str) -> Result<PathSet, NetworkError> {
        let t_idx = self
            .node_index(t)
            .ok_or_else(|| NetworkError::UnknownNode(t.to_string()))?;
        if t_idx == self.source {
            return Err(NetworkError::SourceQuery);
        }
        let need = self.dimension;
        let have = self.maxflow_excluding(t_idx, &HashSet::new());
        if have < need {
            return Err(NetworkError::InsufficientFlow {
                receiver: t.to_string(),
                needed: need,
                actual: have,
            });
        }
        let mut used: HashSet<usize> = HashSet::new();
        let mut paths = Vec::with_capacity(need);
        for slot in 0..need {
            let remaining = need - slot - 1;
            let path = self
                .lex_path(t_idx, &used, remaining)
                .expect("flow bound guarantees a feasible path");
            for &l in &path {
                used.insert(l);
            }
            paths.push(path.iter().map(|&l| self.links[l].id.clone()).collect());
        }
        Ok(PathSet {
            receiver: t.to_string(),
            paths,
        })
    }

    /// Depth-first search in ascending link order; the first complete path
    /// that passes the feasibility check is the lexicographic minimum.
    fn lex_path(
        &self,
        t_idx: usize,
        used: &HashSet<usize>,
        remaining: usize,
    ) -> Option<Vec<usize>> {
        let mut path: Vec<usize> = Vec::new();
        self.lex_path_rec(t_idx, used, remaining, &mut path)
            .then_some(path)
    }

    fn lex_path_rec(
        &self,
        t_idx: usize,
        used: &HashSet<usize>,
        remaining: usize,
        path: &mut Vec<usize>,
    ) -> bool {
        let candidates: Vec<usize> = match path.last() {
            None => (0..self.dimension).filter(|l| !used.contains(l)).collect(),
            Some(&last) => {
                let head = self.links[last].head;
                if head == t_idx {
                    unreachable!("complete paths are handled before recursing");
                }
                self.out_links[head]
                    .iter()
                    .copied()
                    .filter(|l| !used.contains(l) && !path.contains(l))
                    .collect()
            }
        };
        for cand in candidates {
            path.push(cand);
            if self.links[cand].head == t_idx {
                let mut removed: HashSet<usize> = used.clone();
                removed.extend(path.iter().copied());
                if self.maxflow_excluding(t_idx, &removed) >= remaining {
                    return true;
                }
            } else if self.lex_path_rec(t_idx, used, remaining, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    /// Caps the source out-degree at the dimension by inserting a fresh super
    /// source. No-op (a plain clone) when the out-degree is already within
    /// bounds. Flow to every receiver is unchanged because flow is measured
    /// from the imaginary links.
    pub fn augment_super_source(&self) -> MulticastNetwork {
        if self.out_links[self.source].len() <= self.dimension {
            return self.clone();
        }
        let mut nodes = self.nodes.clone();
        let super_idx = nodes.len();
        nodes.push("$super".to_string());
        let mut links: Vec<Link> = Vec::with_capacity(self.links.len() + self.dimension);
        for i in 0..self.dimension {
            links.push(Link {
                id: format!("$imag{}", i + 1),
                tail: LinkTail::Imaginary,
                head: super_idx,
            });
        }
        for i in 0..self.dimension {
            links.push(Link {
                id: format!("$ss{}", i + 1),
                tail: LinkTail::Node(super_idx),
                head: self.source,
            });
        }
        links.extend(self.links[self.dimension..].iter().cloned());

        let mut in_links: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        let mut out_links: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, link) in links.iter().enumerate() {
            in_links[link.head].push(i);
            if let LinkTail::Node(t) = link.tail {
                out_links[t].push(i);
            }
        }
        let mut topo_pos: Vec<usize> = self.topo_pos.iter().map(|&p| p + 1).collect();
        topo_pos.push(0);
        MulticastNetwork {
            nodes,
            links,
            source: super_idx,
            receivers: self.receivers.clone(),
            dimension: self.dimension,
            in_links,
            out_links,
            topo_pos,
        }
    }
}

/// Parses a network document (JSON) and validates it.
pub fn parse_network(doc: &str) -> Result<MulticastNetwork, NetworkError> {
    let doc: NetworkDoc =
        serde_json::from_str(doc).map_err(|e| NetworkError::Json(e.to_string()))?;
    MulticastNetwork::build(
        doc.dimension,
        doc.nodes,
        doc.links
            .into_iter()
            .map(|l| (l.id, l.tail, l.head))
            .collect(),
        &doc.source,
        doc.receivers,
    )
}

/// Serializes back to the document form. Imaginary links are a modeling
/// artifact and are not written out.
pub fn serialize_network(net: &MulticastNetwork) -> String {
    let doc = NetworkDoc {
        dimension: net.dimension,
        nodes: net.nodes.clone(),
        links: net
            .links
            .iter()
            .filter_map(|l| match l.tail {
                LinkTail::Imaginary => None,
                LinkTail::Node(t) => Some(LinkDoc {
                    id: l.id.clone(),
                    tail: net.nodes[t].clone(),
                    head: net.nodes[l.head].clone(),
                }),
            })
            .collect(),
        source: net.nodes[net.source].clone(),
        receivers: net
            .receivers
            .iter()
            .map(|&r| net.nodes[r].clone())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}
