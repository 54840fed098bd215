//! Scalar linear network codes.
//!
//! A code assigns each adjacent link pair (d, e) a local kernel coefficient.
//! Global kernels follow by forward substitution: the imaginary links carry
//! the standard basis, and every real link's column is the kernel-weighted
//! sum of its tail's incoming columns. A code is a linear multicast when
//! every non-source node whose max flow reaches the message dimension can
//! decode, i.e. its incoming columns span the full space. That is checked
//! literally, receivers or not.
//!
//! Two constructions are provided: exhaustive lexicographic search (smallest
//! witness or a definitive none, budgeted) and the Jaggi-Sanders greedy walk
//! (polynomial, needs more field elements than receivers).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::field::{raw_add, raw_mul, FieldElement, FieldError, FieldSpec};
use crate::linalg;
use crate::matroid::{MatroidError, VectorMatroid};
use crate::network::{LinkTail, MulticastNetwork, NetworkError, PathSet};

/// Exhaustive search budget: the assignment space q^pairs may not exceed 2^24.
pub const BRUTE_FORCE_MAX_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("field error: {0}")]
    Field(#[from] FieldError),
    #[error("network error: {0}")]
    Network(#[from] NetworkError),
    #[error("matroid error: {0}")]
    Matroid(#[from] MatroidError),
    #[error("code document is not valid JSON: {0}")]
    Json(String),
    #[error("unknown link {0:?}")]
    UnknownLink(String),
    #[error("links {tail:?} and {head:?} are not adjacent")]
    NotAdjacent { tail: String, head: String },
    #[error("search space exceeds 2^{BRUTE_FORCE_MAX_BITS} assignments")]
    BudgetExceeded,
    #[error("field of order {order} is too small for {receivers} receivers")]
    FieldTooSmall { order: u64, receivers: usize },
    #[error("constructed code fails to decode at {0:?}")]
    ConstructionFailed(Vec<String>),
    #[error("global kernel on {0:?} cannot arise from local coefficients")]
    Unrealizable(String),
    #[error("code document carries no local kernels; the global form needs a network")]
    GlobalOnly,
    #[error("global matrix in the document disagrees with its local kernels at {0:?}")]
    GlobalMismatch(String),
}

/// Local kernel coefficients, keyed by (tail link id, head link id).
/// Normalized: zero coefficients are not stored, so two assignments that
/// agree up to explicit zeros compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalKernels {
    spec: FieldSpec,
    entries: BTreeMap<(String, String), u64>,
}

impl LocalKernels {
    pub fn new(spec: FieldSpec) -> Self {
        LocalKernels {
            spec,
            entries: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn set(&mut self, tail: &str, head: &str, value: FieldElement) -> Result<(), CodeError> {
        if value.spec() != self.spec {
            return Err(FieldError::SpecMismatch(value.spec(), self.spec).into());
        }
        let key = (tail.to_string(), head.to_string());
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value.value());
        }
        Ok(())
    }

    /// Coefficient for a pair; absent entries read as zero.
    pub fn get(&self, tail: &str, head: &str) -> FieldElement {
        let raw = self
            .entries
            .get(&(tail.to_string(), head.to_string()))
            .copied()
            .unwrap_or(0);
        self.spec.element(raw).expect("stored values are canonical")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, FieldElement)> {
        self.entries.iter().map(|((t, h), &v)| {
            (
                t.as_str(),
                h.as_str(),
                self.spec.element(v).expect("canonical"),
            )
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CodeDoc {
    field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernels: Option<Vec<KernelDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    global: Option<GlobalDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct KernelDoc {
    tail: String,
    head: String,
    value: u64,
}

/// Global kernels in document form: row-major, one label per column.
#[derive(Debug, Serialize, Deserialize)]
struct GlobalDoc {
    labels: Vec<String>,
    rows: Vec<Vec<u64>>,
}

fn locals_of_doc(doc: &CodeDoc) -> Result<LocalKernels, CodeError> {
    let kernels = doc.kernels.as_ref().ok_or(CodeError::GlobalOnly)?;
    let mut out = LocalKernels::new(doc.field);
    for k in kernels {
        let value = doc.field.element(k.value)?;
        out.set(&k.tail, &k.head, value)?;
    }
    Ok(out)
}

/// Parses a code document. Values must be canonical field encodings. Only
/// the local form is accepted here; resolving a global matrix into local
/// coefficients needs a network, see [`parse_code_with_network`].
pub fn parse_code(doc: &str) -> Result<LocalKernels, CodeError> {
    let doc: CodeDoc = serde_json::from_str(doc).map_err(|e| CodeError::Json(e.to_string()))?;
    locals_of_doc(&doc)
}

/// Parses a code document against a network, accepting both forms. A
/// global-only document has its local coefficients recovered; a document
/// carrying both forms is cross-checked column by column.
pub fn parse_code_with_network(doc: &str, net: &MulticastNetwork) -> Result<LinearCode, CodeError> {
    let doc: CodeDoc = serde_json::from_str(doc).map_err(|e| CodeError::Json(e.to_string()))?;
    let given_cols = match &doc.global {
        None => None,
        Some(g) => {
            let rows = net.dimension();
            if g.labels.len() != net.num_links()
                || g.rows.len() != rows
                || g.rows.iter().any(|r| r.len() != g.labels.len())
            {
                return Err(CodeError::Json("global matrix has the wrong shape".into()));
            }
            let mut cols = vec![Vec::new(); net.num_links()];
            for (j, label) in g.labels.iter().enumerate() {
                let idx = net
                    .link_index(label)
                    .ok_or_else(|| CodeError::UnknownLink(label.clone()))?;
                if !cols[idx].is_empty() {
                    return Err(CodeError::Json(format!("duplicate column {label:?}")));
                }
                cols[idx] = (0..rows)
                    .map(|i| doc.field.element(g.rows[i][j]).map(|e| e.value()))
                    .collect::<Result<_, _>>()?;
            }
            if cols.iter().any(Vec::is_empty) {
                return Err(CodeError::Json("global matrix misses some links".into()));
            }
            Some(cols)
        }
    };
    let local = match (doc.kernels.is_some(), given_cols) {
        (true, given) => {
            let local = locals_of_doc(&doc)?;
            if let Some(cols) = given {
                let computed = compute_global_kernels(net, &local)?;
                if let Some(bad) = (0..net.num_links()).find(|&i| computed.cols[i] != cols[i]) {
                    return Err(CodeError::GlobalMismatch(net.link_id(bad).to_string()));
                }
            }
            local
        }
        (false, Some(cols)) => locals_from_globals(net, doc.field, &cols)?,
        (false, None) => return Err(CodeError::GlobalOnly),
    };
    LinearCode::new(net.clone(), local)
}

/// Serializes local kernels as a code document, entries sorted by id pair.
pub fn serialize_code(local: &LocalKernels) -> String {
    let kernels = local
        .entries
        .iter()
        .map(|((t, h), &v)| KernelDoc {
            tail: t.clone(),
            head: h.clone(),
            value: v,
        })
        .collect();
    let doc = CodeDoc {
        field: local.spec,
        kernels: Some(kernels),
        global: None,
    };
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}

/// Global kernels: one column per link (imaginary links included, first),
/// each column a dimension-high vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalKernelMatrix {
    spec: FieldSpec,
    rows: usize,
    labels: Vec<String>,
    cols: Vec<Vec<u64>>,
}

impl GlobalKernelMatrix {
    pub(crate) fn from_raw(
        spec: FieldSpec,
        rows: usize,
        labels: Vec<String>,
        cols: Vec<Vec<u64>>,
    ) -> Self {
        debug_assert_eq!(labels.len(), cols.len());
        debug_assert!(cols.iter().all(|c| c.len() == rows));
        GlobalKernelMatrix {
            spec,
            rows,
            labels,
            cols,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, label: &str) -> Result<Vec<FieldElement>, CodeError> {
        let idx = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CodeError::UnknownLink(label.to_string()))?;
        Ok(self.cols[idx]
            .iter()
            .map(|&v| self.spec.element(v).expect("canonical"))
            .collect())
    }

    pub(crate) fn raw_column(&self, idx: usize) -> &[u64] {
        &self.cols[idx]
    }

    pub(crate) fn raw_cols(&self) -> &[Vec<u64>] {
        &self.cols
    }

    /// Dimension of the span of the named columns.
    pub fn subspace_dim(&self, labels: &[&str]) -> Result<usize, CodeError> {
        let mut picked = Vec::with_capacity(labels.len());
        for l in labels {
            let idx = self
                .labels
                .iter()
                .position(|g| g == l)
                .ok_or_else(|| CodeError::UnknownLink(l.to_string()))?;
            picked.push(self.cols[idx].as_slice());
        }
        Ok(linalg::rank_cols(&self.spec, self.rows, &picked))
    }
}

/// Forward substitution in topological order. The result does not depend on
/// the document order of links: only the DAG structure enters.
pub fn compute_global_kernels(
    net: &MulticastNetwork,
    local: &LocalKernels,
) -> Result<GlobalKernelMatrix, CodeError> {
    let spec = local.spec;
    // Validate every entry against the network.
    for (tail, head, _) in local.iter() {
        let t = net
            .link_index(tail)
            .ok_or_else(|| CodeError::UnknownLink(tail.to_string()))?;
        let h = net
            .link_index(head)
            .ok_or_else(|| CodeError::UnknownLink(head.to_string()))?;
        let adjacent = match net.link_tail(h) {
            LinkTail::Node(n) => net.link_head(t) == n,
            LinkTail::Imaginary => false,
        };
        if !adjacent {
            return Err(CodeError::NotAdjacent {
                tail: tail.to_string(),
                head: head.to_string(),
            });
        }
    }
    let rows = net.dimension();
    let mut cols: Vec<Vec<u64>> = vec![vec![0; rows]; net.num_links()];
    for (i, col) in cols.iter_mut().take(rows).enumerate() {
        col[i] = 1;
    }
    for e in net.real_links_topo() {
        let tail = match net.link_tail(e) {
            LinkTail::Node(n) => n,
            LinkTail::Imaginary => unreachable!("real links have node tails"),
        };
        let mut acc = vec![0u64; rows];
        for &d in net.in_links_of(tail) {
            let k = local.get(net.link_id(d), net.link_id(e)).value();
            if k == 0 {
                continue;
            }
            for (a, &c) in acc.iter_mut().zip(&cols[d]) {
                *a = raw_add(&spec, *a, raw_mul(&spec, k, c));
            }
        }
        cols[e] = acc;
    }
    let labels = (0..net.num_links())
        .map(|i| net.link_id(i).to_string())
        .collect();
    Ok(GlobalKernelMatrix::from_raw(spec, rows, labels, cols))
}

/// Inverse of forward substitution: given one global kernel per link in
/// link order (canonical values, dimension-high columns), recover local
/// coefficients, lexicographically smallest first at every link. The
/// imaginary columns must already be the standard basis, and every real
/// column must lie in the span of its tail's incoming columns; otherwise
/// the columns are no code at all and [`CodeError::Unrealizable`] names
/// the first offending link.
pub fn locals_from_globals(
    net: &MulticastNetwork,
    spec: FieldSpec,
    cols: &[Vec<u64>],
) -> Result<LocalKernels, CodeError> {
    let rows = net.dimension();
    assert_eq!(cols.len(), net.num_links(), "one column per link");
    assert!(
        cols.iter().all(|c| c.len() == rows),
        "columns are dimension-high"
    );
    for (i, col) in cols.iter().take(rows).enumerate() {
        let unit: Vec<u64> = (0..rows).map(|j| u64::from(i == j)).collect();
        if *col != unit {
            return Err(CodeError::Unrealizable(net.link_id(i).to_string()));
        }
    }
    let mut local = LocalKernels::new(spec);
    for e in net.real_links_topo() {
        let tail = match net.link_tail(e) {
            LinkTail::Node(n) => n,
            LinkTail::Imaginary => unreachable!("real links have node tails"),
        };
        let ins = net.in_links_of(tail);
        let feeding: Vec<&[u64]> = ins.iter().map(|&d| cols[d].as_slice()).collect();
        let x = linalg::solve_lex_min(&spec, rows, &feeding, &cols[e])
            .ok_or_else(|| CodeError::Unrealizable(net.link_id(e).to_string()))?;
        for (&d, &v) in ins.iter().zip(&x) {
            if v != 0 {
                local.set(net.link_id(d), net.link_id(e), spec.element(v)?)?;
            }
        }
    }
    Ok(local)
}

/// A validated code: network, local kernels, and the induced global kernels.
#[derive(Debug, Clone)]
pub struct LinearCode {
    network: MulticastNetwork,
    local: LocalKernels,
    global: GlobalKernelMatrix,
}

impl LinearCode {
    pub fn new(network: MulticastNetwork, local: LocalKernels) -> Result<Self, CodeError> {
        let global = compute_global_kernels(&network, &local)?;
        Ok(LinearCode {
            network,
            local,
            global,
        })
    }

    pub fn network(&self) -> &MulticastNetwork {
        &self.network
    }

    pub fn spec(&self) -> FieldSpec {
        self.local.spec
    }

    pub fn local(&self) -> &LocalKernels {
        &self.local
    }

    pub fn global(&self) -> &GlobalKernelMatrix {
        &self.global
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeCheck {
    pub node: String,
    pub maxflow: usize,
    pub dim: usize,
    pub ok: bool,
}

/// Verdict of the multicast property check. `checked` lists every non-source
/// node whose max flow reaches the dimension, with its decoded dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MulticastVerdict {
    pub ok: bool,
    pub checked: Vec<NodeCheck>,
}

impl MulticastVerdict {
    pub fn failing(&self) -> Vec<&str> {
        self.checked
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.node.as_str())
            .collect()
    }
}

/// Decoding sinks: non-source nodes with max flow at least the dimension,
/// in node declaration order.
fn decoding_sinks(net: &MulticastNetwork) -> Vec<(usize, String, usize)> {
    let mut out = Vec::new();
    for (idx, id) in net.node_ids().enumerate() {
        if idx == net.source_index() {
            continue;
        }
        let flow = net.maxflow(id).expect("known non-source node");
        if flow >= net.dimension() {
            out.push((idx, id.to_string(), flow));
        }
    }
    out
}

/// Checks the multicast property of a code, strictly: every node that could
/// decode by max flow must decode.
pub fn verify_multicast(code: &LinearCode) -> MulticastVerdict {
    let net = code.network();
    let omega = net.dimension();
    let mut checked = Vec::new();
    for (idx, id, flow) in decoding_sinks(net) {
        let cols: Vec<&[u64]> = net
            .in_links_of(idx)
            .iter()
            .map(|&l| code.global.raw_column(l))
            .collect();
        let dim = linalg::rank_cols(&code.global.spec, omega, &cols);
        checked.push(NodeCheck {
            node: id,
            maxflow: flow,
            dim,
            ok: dim == omega,
        });
    }
    MulticastVerdict {
        ok: checked.iter().all(|c| c.ok),
        checked,
    }
}

/// The matroid of global kernel columns over the code's field, ground set =
/// all links (imaginary included).
pub fn induced_matroid(code: &LinearCode) -> Result<VectorMatroid, CodeError> {
    Ok(VectorMatroid::from_raw(
        code.global.spec,
        code.global.labels.clone(),
        code.global.rows,
        code.global.cols.clone(),
    )?)
}

/// Ascending odometer over fixed-length digit strings: all zeros first, the
/// rightmost digit moves fastest, so emitted strings are in lexicographic
/// order.
struct Odometer {
    digits: Vec<u64>,
    base: u64,
    fresh: bool,
}

impl Odometer {
    fn new(len: usize, base: u64) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            fresh: true,
        }
    }

    fn next(&mut self) -> Option<&[u64]> {
        if self.fresh {
            self.fresh = false;
            return Some(&self.digits);
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                return Some(&self.digits);
            }
            *d = 0;
        }
        None
    }
}

fn rank_gf2_masks(cols: impl Iterator<Item = u64>) -> usize {
    let mut pivots: Vec<u64> = Vec::new();
    for mut v in cols {
        for &p in &pivots {
            let low = p & p.wrapping_neg();
            if v & low != 0 {
                v ^= p;
            }
        }
        if v != 0 {
            pivots.push(v);
        }
    }
    pivots.len()
}

/// Exhaustive lexicographic search for a multicast code. Returns the first
/// valid assignment in lexicographic order over adjacent pairs (pairs sorted
/// by tail then head link index, field elements ascending), or None when the
/// whole space is exhausted. Budgeted by [`BRUTE_FORCE_MAX_BITS`].
pub fn brute_force_solve(
    net: &MulticastNetwork,
    spec: FieldSpec,
) -> Result<Option<LinearCode>, CodeError> {
    let pairs = net.adjacent_pairs();
    let q = spec.order();
    // q^pairs <= 2^BRUTE_FORCE_MAX_BITS, checked without overflow.
    let mut space: u128 = 1;
    for _ in 0..pairs.len() {
        space = space.saturating_mul(q as u128);
        if space > (1u128 << BRUTE_FORCE_MAX_BITS) {
            return Err(CodeError::BudgetExceeded);
        }
    }
    let sinks = decoding_sinks(net);
    let sink_inputs: Vec<Vec<usize>> = sinks
        .iter()
        .map(|&(idx, _, _)| net.in_links_of(idx).to_vec())
        .collect();
    let topo = net.real_links_topo();
    // Per real link, the (in-link, pair position) pairs feeding it.
    let mut feeders: Vec<Vec<(usize, usize)>> = vec![Vec::new(); net.num_links()];
    for (pos, &(d, e)) in pairs.iter().enumerate() {
        feeders[e].push((d, pos));
    }
    let omega = net.dimension();
    let mut odo = Odometer::new(pairs.len(), q);

    let found: Option<Vec<u64>> = if q == 2 {
        // GF(2) fast path: columns are omega-bit masks, addition is xor.
        let mut globals: Vec<u64> = vec![0; net.num_links()];
        let mut result = None;
        while let Some(digits) = odo.next() {
            for (i, g) in globals.iter_mut().take(omega).enumerate() {
                *g = 1 << i;
            }
            for &e in &topo {
                let mut acc = 0u64;
                for &(d, pos) in &feeders[e] {
                    if digits[pos] == 1 {
                        acc ^= globals[d];
                    }
                }
                globals[e] = acc;
            }
            let ok = sink_inputs
                .iter()
                .all(|ins| rank_gf2_masks(ins.iter().map(|&l| globals[l])) == omega);
            if ok {
                result = Some(digits.to_vec());
                break;
            }
        }
        result
    } else {
        let mut globals: Vec<Vec<u64>> = vec![vec![0; omega]; net.num_links()];
        let mut result = None;
        while let Some(digits) = odo.next() {
            for (i, g) in globals.iter_mut().take(omega).enumerate() {
                for (r, v) in g.iter_mut().enumerate() {
                    *v = u64::from(r == i);
                }
            }
            for &e in &topo {
                let mut acc = vec![0u64; omega];
                for &(d, pos) in &feeders[e] {
                    let k = digits[pos];
                    if k == 0 {
                        continue;
                    }
                    for r in 0..omega {
                        let add = raw_mul(&spec, k, globals[d][r]);
                        acc[r] = raw_add(&spec, acc[r], add);
                    }
                }
                globals[e] = acc;
            }
            let ok = sink_inputs.iter().all(|ins| {
                let cols: Vec<&[u64]> = ins.iter().map(|&l| globals[l].as_slice()).collect();
                linalg::rank_cols(&spec, omega, &cols) == omega
            });
            if ok {
                result = Some(digits.to_vec());
                break;
            }
        }
        result
    };

    let Some(digits) = found else {
        return Ok(None);
    };
    let mut local = LocalKernels::new(spec);
    for (pos, &(d, e)) in pairs.iter().enumerate() {
        if digits[pos] != 0 {
            local.set(net.link_id(d), net.link_id(e), spec.element(digits[pos])?)?;
        }
    }
    let code = LinearCode::new(net.clone(), local)?;
    debug_assert!(verify_multicast(&code).ok);
    Ok(Some(code))
}

/// Greedy polynomial-time construction. One frontier per receiver walks the
/// receiver's disjoint paths; each link on a path gets the lexicographically
/// first local kernel whose global column stays outside the span of every
/// affected receiver's other frontier columns. Links on no path get zero
/// kernels. Requires more field elements than receivers, and the result is
/// checked strictly before it is returned.
pub fn jaggi_sanders_construct(
    net: &MulticastNetwork,
    spec: FieldSpec,
) -> Result<LinearCode, CodeError> {
    let receivers: Vec<usize> = net.receiver_indices().to_vec();
    if spec.order() <= receivers.len() as u64 {
        return Err(CodeError::FieldTooSmall {
            order: spec.order(),
            receivers: receivers.len(),
        });
    }
    let omega = net.dimension();
    // Disjoint path families, one per receiver, as link indices.
    let mut path_sets: Vec<Vec<Vec<usize>>> = Vec::new();
    for &r in &receivers {
        let ps: PathSet = net.edge_disjoint_paths(net.node_ids().nth(r).expect("valid index"))?;
        path_sets.push(
            ps.paths
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|id| net.link_index(id).expect("path links exist"))
                        .collect()
                })
                .collect(),
        );
    }
    // For receiver i, slot_of[i][link] = (slot, position in path).
    let mut slot_of: Vec<BTreeMap<usize, (usize, usize)>> = Vec::new();
    for paths in &path_sets {
        let mut m = BTreeMap::new();
        for (slot, p) in paths.iter().enumerate() {
            for (pos, &l) in p.iter().enumerate() {
                m.insert(l, (slot, pos));
            }
        }
        slot_of.push(m);
    }
    // Frontiers start at the imaginary links (position 0 of every path).
    let mut frontier: Vec<Vec<usize>> = path_sets
        .iter()
        .map(|paths| paths.iter().map(|p| p[0]).collect())
        .collect();

    let mut globals: Vec<Vec<u64>> = vec![vec![0; omega]; net.num_links()];
    for (i, g) in globals.iter_mut().take(omega).enumerate() {
        g[i] = 1;
    }
    let mut local = LocalKernels::new(spec);

    for e in net.real_links_topo() {
        let users: Vec<usize> = (0..receivers.len())
            .filter(|&i| slot_of[i].contains_key(&e))
            .collect();
        let tail = match net.link_tail(e) {
            LinkTail::Node(n) => n,
            LinkTail::Imaginary => unreachable!("real links have node tails"),
        };
        let ins = net.in_links_of(tail);
        if users.is_empty() {
            continue; // all-zero kernels, column stays zero
        }
        // Guard the candidate enumeration like the exhaustive search.
        let mut space: u128 = 1;
        for _ in 0..ins.len() {
            space = space.saturating_mul(spec.order() as u128);
            if space > (1u128 << BRUTE_FORCE_MAX_BITS) {
                return Err(CodeError::BudgetExceeded);
            }
        }
        let mut odo = Odometer::new(ins.len(), spec.order());
        let mut chosen: Option<(Vec<u64>, Vec<u64>)> = None;
        'candidates: while let Some(digits) = odo.next() {
            let mut col = vec![0u64; omega];
            for (slot, &d) in ins.iter().enumerate() {
                let k = digits[slot];
                if k == 0 {
                    continue;
                }
                for r in 0..omega {
                    let add = raw_mul(&spec, k, globals[d][r]);
                    col[r] = raw_add(&spec, col[r], add);
                }
            }
            for &i in &users {
                let (slot, _) = slot_of[i][&e];
                let others: Vec<&[u64]> = frontier[i]
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != slot)
                    .map(|(_, &l)| globals[l].as_slice())
                    .collect();
                if linalg::in_span(&spec, omega, &others, &col) {
                    continue 'candidates;
                }
            }
            chosen = Some((digits.to_vec(), col));
            break;
        }
        let Some((digits, col)) = chosen else {
            // Cannot happen for q > #receivers, but stay honest.
            return Err(CodeError::ConstructionFailed(vec![net
                .link_id(e)
                .to_string()]));
        };
        globals[e] = col;
        for (slot, &d) in ins.iter().enumerate() {
            if digits[slot] != 0 {
                local.set(net.link_id(d), net.link_id(e), spec.element(digits[slot])?)?;
            }
        }
        for &i in &users {
            let (slot, _) = slot_of[i][&e];
            frontier[i][slot] = e;
        }
    }

    let code = LinearCode::new(net.clone(), local)?;
    let verdict = verify_multicast(&code);
    if !verdict.ok {
        return Err(CodeError::ConstructionFailed(
            verdict.failing().iter().map(|s| s.to_string()).collect(),
        ));
    }
    Ok(code)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fixtures;
    use crate::matroid::{enumerate_bases, Matroid};
    use crate::network::parse_network;

    fn butterfly() -> MulticastNetwork {
        parse_network(fixtures::BUTTERFLY).expect("fixture parses")
    }

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    /// The classic butterfly xor code over GF(2): identity kernels at the
    /// source ($imag_i feeds only e_i), all downstream pairs set to 1.
    pub(crate) fn xor_locals(net: &MulticastNetwork) -> LocalKernels {
        let f2 = f(2);
        let mut local = LocalKernels::new(f2);
        for (d, e) in net.adjacent_pairs() {
            let (did, eid) = (net.link_id(d), net.link_id(e));
            let v = if net.is_imaginary(d) {
                let keep = (did, eid) == ("$imag1", "e1") || (did, eid) == ("$imag2", "e2");
                if keep {
                    f2.one()
                } else {
                    f2.zero()
                }
            } else {
                f2.one()
            };
            local.set(did, eid, v).unwrap();
        }
        local
    }

    pub(crate) fn xor_code() -> LinearCode {
        let net = butterfly();
        let local = xor_locals(&net);
        LinearCode::new(net, local).unwrap()
    }

    #[test]
    fn local_kernel_normalization() {
        let f3 = f(3);
        let mut k = LocalKernels::new(f3);
        k.set("a", "b", f3.element(2).unwrap()).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k.get("a", "b").value(), 2);
        assert_eq!(k.get("a", "zz").value(), 0);
        // Setting zero removes the entry entirely.
        k.set("a", "b", f3.zero()).unwrap();
        assert!(k.is_empty());
        let other = LocalKernels::new(f3);
        assert_eq!(k, other);
        // Field mismatch is rejected.
        let f2 = f(2);
        assert!(matches!(
            k.set("a", "b", f2.one()),
            Err(CodeError::Field(FieldError::SpecMismatch(_, _)))
        ));
    }

    #[test]
    fn code_document_round_trip() {
        let code = xor_code();
        let doc = serialize_code(code.local());
        let back = parse_code(&doc).unwrap();
        assert_eq!(*code.local(), back);
        assert!(matches!(parse_code("{"), Err(CodeError::Json(_))));
        // Out-of-range values are rejected.
        let bad = r#"{"field": "2", "kernels": [{"tail": "a", "head": "b", "value": 7}]}"#;
        assert!(matches!(
            parse_code(bad),
            Err(CodeError::Field(FieldError::NotAnElement { .. }))
        ));
    }

    /// The xor code's global kernels as a document matrix, link order.
    fn xor_global_doc() -> serde_json::Value {
        serde_json::json!({
            "labels": ["$imag1", "$imag2", "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "e9"],
            "rows": [
                [1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1],
                [0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 1],
            ],
        })
    }

    #[test]
    fn global_form_documents_recover_the_local_kernels() {
        let net = butterfly();
        let doc = serde_json::json!({"field": "2", "global": xor_global_doc()}).to_string();
        let code = parse_code_with_network(&doc, &net).unwrap();
        assert_eq!(*code.local(), *xor_code().local());
        // The netless reader refuses the same document.
        assert!(matches!(parse_code(&doc), Err(CodeError::GlobalOnly)));
    }

    #[test]
    fn mixed_form_documents_are_cross_checked() {
        let net = butterfly();
        let local_doc: serde_json::Value =
            serde_json::from_str(&serialize_code(xor_code().local())).unwrap();
        let mut both = local_doc.clone();
        both["global"] = xor_global_doc();
        let code = parse_code_with_network(&both.to_string(), &net).unwrap();
        assert_eq!(*code.local(), *xor_code().local());

        let mut lying = both.clone();
        lying["global"]["rows"][0][6] = serde_json::json!(0);
        assert!(matches!(
            parse_code_with_network(&lying.to_string(), &net),
            Err(CodeError::GlobalMismatch(l)) if l == "e5"
        ));
    }

    #[test]
    fn unrealizable_global_matrices_are_rejected() {
        let net = butterfly();
        // e5 leaves v1, whose only input carries (1, 0); the column (0, 1)
        // cannot be produced there.
        let mut doc = serde_json::json!({"field": "2", "global": xor_global_doc()});
        doc["global"]["rows"][0][6] = serde_json::json!(0);
        doc["global"]["rows"][1][6] = serde_json::json!(1);
        assert!(matches!(
            parse_code_with_network(&doc.to_string(), &net),
            Err(CodeError::Unrealizable(l)) if l == "e5"
        ));
        // An imaginary column that is not its standard basis vector.
        let mut imag = serde_json::json!({"field": "2", "global": xor_global_doc()});
        imag["global"]["rows"][1][0] = serde_json::json!(1);
        assert!(matches!(
            parse_code_with_network(&imag.to_string(), &net),
            Err(CodeError::Unrealizable(l)) if l == "$imag1"
        ));
    }

    #[test]
    fn kernels_must_sit_on_adjacent_pairs() {
        let net = butterfly();
        let f2 = f(2);
        let mut local = LocalKernels::new(f2);
        // e1 (s -> u) and e2 (s -> v) are not adjacent.
        local.set("e1", "e2", f2.one()).unwrap();
        assert!(matches!(
            compute_global_kernels(&net, &local),
            Err(CodeError::NotAdjacent { .. })
        ));
        let mut ghost = LocalKernels::new(f2);
        ghost.set("e1", "zz", f2.one()).unwrap();
        assert!(matches!(
            compute_global_kernels(&net, &ghost),
            Err(CodeError::UnknownLink(_))
        ));
        // Kernels may never point INTO an imaginary link.
        let mut into_imag = LocalKernels::new(f2);
        into_imag.set("e1", "$imag1", f2.one()).unwrap();
        assert!(matches!(
            compute_global_kernels(&net, &into_imag),
            Err(CodeError::NotAdjacent { .. })
        ));
    }

    #[test]
    fn xor_code_global_kernels() {
        let code = xor_code();
        let g = code.global();
        let col =
            |l: &str| -> Vec<u64> { g.column(l).unwrap().iter().map(|e| e.value()).collect() };
        assert_eq!(col("$imag1"), vec![1, 0]);
        assert_eq!(col("$imag2"), vec![0, 1]);
        assert_eq!(col("e1"), vec![1, 0]);
        assert_eq!(col("e3"), vec![1, 0]);
        assert_eq!(col("e5"), vec![1, 0]);
        assert_eq!(col("e2"), vec![0, 1]);
        assert_eq!(col("e4"), vec![0, 1]);
        assert_eq!(col("e7"), vec![0, 1]);
        // The bottleneck and everything after it carry the sum.
        assert_eq!(col("e6"), vec![1, 1]);
        assert_eq!(col("e8"), vec![1, 1]);
        assert_eq!(col("e9"), vec![1, 1]);
    }

    #[test]
    fn global_kernels_ignore_document_order() {
        // Same butterfly with links listed in reverse document order.
        let net = butterfly();
        let reversed = {
            let links: Vec<(String, String, String)> = (0..net.num_links())
                .rev()
                .filter(|&i| !net.is_imaginary(i))
                .map(|i| {
                    (
                        net.link_id(i).to_string(),
                        net.link_tail_id(i).unwrap().to_string(),
                        net.link_head_id(i).to_string(),
                    )
                })
                .collect();
            MulticastNetwork::build(
                2,
                net.node_ids().map(|s| s.to_string()).collect(),
                links,
                "s",
                vec!["t1".into(), "t2".into()],
            )
            .unwrap()
        };
        let local = xor_locals(&reversed);
        let g = compute_global_kernels(&reversed, &local).unwrap();
        let reference = xor_code();
        for l in ["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "e9"] {
            assert_eq!(
                g.column(l).unwrap(),
                reference.global().column(l).unwrap(),
                "column {l} depends on document order"
            );
        }
    }

    #[test]
    fn subspace_dims_of_xor_code() {
        let code = xor_code();
        let g = code.global();
        assert_eq!(g.subspace_dim(&["e1", "e3", "e5"]).unwrap(), 1);
        assert_eq!(g.subspace_dim(&["e1", "e2"]).unwrap(), 2);
        assert_eq!(g.subspace_dim(&["e5", "e8"]).unwrap(), 2);
        assert_eq!(g.subspace_dim(&["e6", "e8", "e9"]).unwrap(), 1);
        assert_eq!(g.subspace_dim(&[]).unwrap(), 0);
        assert!(matches!(
            g.subspace_dim(&["nope"]),
            Err(CodeError::UnknownLink(_))
        ));
    }

    #[test]
    fn xor_code_is_a_multicast() {
        let verdict = verify_multicast(&xor_code());
        assert!(verdict.ok);
        // Strict check covers w (max flow 2) alongside the receivers.
        let nodes: Vec<&str> = verdict.checked.iter().map(|c| c.node.as_str()).collect();
        assert_eq!(nodes, vec!["w", "t1", "t2"]);
        assert!(verdict.checked.iter().all(|c| c.dim == 2));
    }

    #[test]
    fn routing_only_code_fails_at_one_receiver() {
        // Forward only e3 into the bottleneck: t1 sees two copies of the
        // first message.
        let net = butterfly();
        let f2 = f(2);
        let mut local = xor_locals(&net);
        local.set("e4", "e6", f2.zero()).unwrap();
        let code = LinearCode::new(net, local).unwrap();
        let verdict = verify_multicast(&code);
        assert!(!verdict.ok);
        assert_eq!(verdict.failing(), vec!["t1"]);
        let t1 = verdict.checked.iter().find(|c| c.node == "t1").unwrap();
        assert_eq!(t1.dim, 1);
        assert_eq!(t1.maxflow, 2);
    }

    #[test]
    fn brute_force_on_two_parallel_links() {
        // Two parallel links, dimension 2. The first valid assignment in
        // lexicographic order over pairs [(i1,a),(i1,b),(i2,a),(i2,b)] is
        // (0,1,1,0): the swap routing code, not the identity.
        let net = MulticastNetwork::build(
            2,
            vec!["s".into(), "t".into()],
            vec![
                ("a".into(), "s".into(), "t".into()),
                ("b".into(), "s".into(), "t".into()),
            ],
            "s",
            vec!["t".into()],
        )
        .unwrap();
        let f2 = f(2);
        let code = brute_force_solve(&net, f2).unwrap().expect("solvable");
        assert!(verify_multicast(&code).ok);
        assert_eq!(code.local().get("$imag1", "a").value(), 0);
        assert_eq!(code.local().get("$imag1", "b").value(), 1);
        assert_eq!(code.local().get("$imag2", "a").value(), 1);
        assert_eq!(code.local().get("$imag2", "b").value(), 0);
        // Lex-first contract: every smaller assignment is invalid; spot-check
        // the identity-free prefix by confirming the found one is minimal
        // against a direct scan of the 16-element space.
        let pairs = net.adjacent_pairs();
        assert_eq!(pairs.len(), 4);
        let mut first_valid: Option<Vec<u64>> = None;
        'outer: for c in 0..16u64 {
            let digits: Vec<u64> = (0..4).map(|j| (c >> (3 - j)) & 1).collect();
            let mut local = LocalKernels::new(f2);
            for (pos, &(d, e)) in pairs.iter().enumerate() {
                if digits[pos] == 1 {
                    local.set(net.link_id(d), net.link_id(e), f2.one()).unwrap();
                }
            }
            let cand = LinearCode::new(net.clone(), local).unwrap();
            if verify_multicast(&cand).ok {
                first_valid = Some(digits);
                break 'outer;
            }
        }
        assert_eq!(first_valid, Some(vec![0, 1, 1, 0]));
    }

    #[test]
    fn brute_force_finds_butterfly_code_over_gf2() {
        let net = butterfly();
        let code = brute_force_solve(&net, f(2)).unwrap().expect("solvable");
        assert!(verify_multicast(&code).ok);
    }

    #[test]
    fn brute_force_budget() {
        let net = parse_network(fixtures::COMBINATION42).unwrap();
        // 20 adjacent pairs over GF(3): 3^20 blows the 2^24 budget.
        assert_eq!(
            brute_force_solve(&net, f(3)).unwrap_err(),
            CodeError::BudgetExceeded
        );
    }

    #[test]
    fn combination_network_has_no_gf2_code() {
        let net = parse_network(fixtures::COMBINATION42).unwrap();
        assert_eq!(net.adjacent_pairs().len(), 20);
        let result = brute_force_solve(&net, f(2)).unwrap();
        assert!(
            result.is_none(),
            "four pairwise independent lines cannot fit in GF(2)^2"
        );
    }

    #[test]
    fn jaggi_sanders_on_butterfly_gf3() {
        let net = butterfly();
        let code = jaggi_sanders_construct(&net, f(3)).unwrap();
        assert!(verify_multicast(&code).ok);
        let g = code.global();
        let col =
            |l: &str| -> Vec<u64> { g.column(l).unwrap().iter().map(|e| e.value()).collect() };
        // Deterministic greedy choices, traced by hand.
        assert_eq!(col("e1"), vec![1, 0]);
        assert_eq!(col("e2"), vec![0, 1]);
        assert_eq!(col("e3"), vec![1, 0]);
        assert_eq!(col("e4"), vec![0, 1]);
        assert_eq!(col("e5"), vec![1, 0]);
        assert_eq!(col("e6"), vec![1, 1]);
        assert_eq!(col("e7"), vec![0, 1]);
        assert_eq!(col("e8"), vec![1, 1]);
        assert_eq!(col("e9"), vec![1, 1]);
    }

    #[test]
    fn jaggi_sanders_needs_enough_field_elements() {
        let net = butterfly();
        assert_eq!(
            jaggi_sanders_construct(&net, f(2)).unwrap_err(),
            CodeError::FieldTooSmall {
                order: 2,
                receivers: 2
            }
        );
    }

    #[test]
    fn jaggi_sanders_single_receiver_is_routing() {
        // Chain s -> a -> t, dimension 1: the construction degenerates to
        // routing with unit coefficients.
        let net = MulticastNetwork::build(
            1,
            vec!["s".into(), "a".into(), "t".into()],
            vec![
                ("e1".into(), "s".into(), "a".into()),
                ("e2".into(), "a".into(), "t".into()),
            ],
            "s",
            vec!["t".into()],
        )
        .unwrap();
        let code = jaggi_sanders_construct(&net, f(2)).unwrap();
        assert!(verify_multicast(&code).ok);
        assert_eq!(code.local().get("$imag1", "e1").value(), 1);
        assert_eq!(code.local().get("e1", "e2").value(), 1);
    }

    #[test]
    fn induced_matroid_of_xor_code() {
        let code = xor_code();
        let m = induced_matroid(&code).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.ground().len(), 11);
        // Kernel classes {imag1,e1,e3,e5}, {imag2,e2,e4,e7}, {e6,e8,e9}:
        // bases are the cross-class pairs.
        let bases = enumerate_bases(&m).unwrap();
        assert_eq!(bases.len(), 40);
    }
}
