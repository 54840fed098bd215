//! Matroids as independence oracles over small ground sets.
//!
//! Ground sets are ordered lists of string labels, capped at 64 elements so a
//! subset is one machine word. Everything downstream (duals, transversal
//! matroids, gammoids, base orderability) talks to the one-method oracle
//! trait; basis enumeration is an explicit, budgeted operation rather than
//! something matroids do implicitly.
//!
//! Budgets: a matroid may have up to 64 ground elements, but enumeration of
//! bases refuses ground sets above 24 elements or families above 50,000
//! bases. These are deliberate guard rails, not tuning knobs.

pub mod extension;
pub mod gammoid;
pub mod orderable;
pub mod transversal;
pub mod vector;

use std::collections::BTreeSet;
use std::fmt;

pub use extension::{parallel_extension, series_extension};
pub use gammoid::{strict_gammoid, LinkageInstance, StrictGammoid};
pub use orderable::{is_base_orderable, OrderabilityReport};
pub use transversal::{transversal_matroid, BipartiteSystem, TransversalMatroid};
pub use vector::{IntVectorMatroid, VectorMatroid};

/// Hard cap on ground set size: subsets are u64 bitmasks.
pub const MAX_GROUND: usize = 64;
/// Basis enumeration refuses larger ground sets.
pub const MAX_ENUM_GROUND: usize = 24;
/// Basis enumeration refuses larger families.
pub const MAX_BASES: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("ground set has {0} elements, limit is {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("basis enumeration limited to ground sets of {MAX_ENUM_GROUND}, got {0}")]
    EnumGroundTooLarge(usize),
    #[error("basis family exceeds {MAX_BASES} bases")]
    TooManyBases,
    #[error("duplicate ground element {0:?}")]
    DuplicateElement(String),
    #[error("unknown ground element {0:?}")]
    UnknownElement(String),
    #[error("element {0:?} is already in the ground set")]
    ElementExists(String),
    #[error("basis family is empty")]
    EmptyFamily,
    #[error("bases must share one cardinality: saw {0} and {1}")]
    NonUniformFamily(usize, usize),
    #[error("ground sets differ: {0}")]
    GroundMismatch(String),
    #[error("bipartite system has no full transversal")]
    NoTransversal,
    #[error("field error: {0}")]
    Field(#[from] crate::field::FieldError),
}

/// Subset of a ground set, encoded by element index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> SubsetMask {
        assert!(n <= MAX_GROUND);
        if n == 64 {
            SubsetMask(u64::MAX)
        } else {
            SubsetMask((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> SubsetMask {
        assert!(i < MAX_GROUND);
        SubsetMask(1u64 << i)
    }

    pub fn from_indices(indices: &[usize]) -> SubsetMask {
        let mut m = SubsetMask::EMPTY;
        for &i in indices {
            m = m.with(i);
        }
        m
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> SubsetMask {
        SubsetMask(raw)
    }

    pub fn with(self, i: usize) -> SubsetMask {
        assert!(i < MAX_GROUND);
        SubsetMask(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> SubsetMask {
        SubsetMask(self.0 & !(1u64 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_GROUND && self.0 & (1u64 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersect(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Independence oracle. Implementations guarantee the matroid axioms; the
/// trait itself only promises a ground set and a subset predicate.
pub trait Matroid {
    fn ground(&self) -> &[String];

    fn is_independent(&self, x: SubsetMask) -> bool;

    /// Rank by greedy augmentation; correct for any genuine matroid.
    fn rank_of(&self, x: SubsetMask) -> usize {
        let mut acc = SubsetMask::EMPTY;
        for i in x.iter() {
            if self.is_independent(acc.with(i)) {
                acc = acc.with(i);
            }
        }
        acc.len()
    }

    fn rank(&self) -> usize {
        self.rank_of(SubsetMask::full(self.ground().len()))
    }
}

impl<M: Matroid + ?Sized> Matroid for &M {
    fn ground(&self) -> &[String] {
        (**self).ground()
    }
    fn is_independent(&self, x: SubsetMask) -> bool {
        (**self).is_independent(x)
    }
    fn rank_of(&self, x: SubsetMask) -> usize {
        (**self).rank_of(x)
    }
    fn rank(&self) -> usize {
        (**self).rank()
    }
}

/// Looks up ground element indices for a list of labels.
pub fn mask_of<M: Matroid + ?Sized>(m: &M, labels: &[&str]) -> Result<SubsetMask, MatroidError> {
    let ground = m.ground();
    let mut mask = SubsetMask::EMPTY;
    for l in labels {
        let i = ground
            .iter()
            .position(|g| g == l)
            .ok_or_else(|| MatroidError::UnknownElement(l.to_string()))?;
        if mask.contains(i) {
            return Err(MatroidError::DuplicateElement(l.to_string()));
        }
        mask = mask.with(i);
    }
    Ok(mask)
}

/// Labels of a mask, in ground order.
pub fn ids_of(ground: &[String], mask: SubsetMask) -> Vec<String> {
    mask.iter().map(|i| ground[i].clone()).collect()
}

pub(crate) fn check_ground(ground: &[String]) -> Result<(), MatroidError> {
    if ground.len() > MAX_GROUND {
        return Err(MatroidError::GroundTooLarge(ground.len()));
    }
    let mut seen = BTreeSet::new();
    for g in ground {
        if !seen.insert(g) {
            return Err(MatroidError::DuplicateElement(g.clone()));
        }
    }
    Ok(())
}

/// All bases, sorted ascending by mask. Budgeted: refuses ground sets above
/// [`MAX_ENUM_GROUND`] and families above [`MAX_BASES`].
pub fn enumerate_bases<M: Matroid + ?Sized>(m: &M) -> Result<Vec<SubsetMask>, MatroidError> {
    let n = m.ground().len();
    if n > MAX_ENUM_GROUND {
        return Err(MatroidError::EnumGroundTooLarge(n));
    }
    let rank = m.rank();
    let mut out: Vec<SubsetMask> = Vec::new();
    // DFS over independent sets in ascending index order, pruned when the
    // remaining elements cannot reach full rank.
    fn go<M: Matroid + ?Sized>(
        m: &M,
        n: usize,
        rank: usize,
        start: usize,
        cur: SubsetMask,
        out: &mut Vec<SubsetMask>,
    ) -> Result<(), MatroidError> {
        if cur.len() == rank {
            if out.len() == MAX_BASES {
                return Err(MatroidError::TooManyBases);
            }
            out.push(cur);
            return Ok(());
        }
        let need = rank - cur.len();
        for i in start..n {
            if n - i < need {
                break;
            }
            let next = cur.with(i);
            if m.is_independent(next) {
                go(m, n, rank, i + 1, next, out)?;
            }
        }
        Ok(())
    }
    go(m, n, rank, 0, SubsetMask::EMPTY, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// Extensionally defined matroid: an explicit family of bases. Independence
/// means being contained in some member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMatroid {
    ground: Vec<String>,
    family: Vec<SubsetMask>,
    rank: usize,
}

impl BasisMatroid {
    pub fn from_bases(ground: Vec<String>, bases: &[Vec<String>]) -> Result<Self, MatroidError> {
        check_ground(&ground)?;
        if bases.is_empty() {
            return Err(MatroidError::EmptyFamily);
        }
        let mut family = Vec::with_capacity(bases.len());
        for b in bases {
            let mut mask = SubsetMask::EMPTY;
            for l in b {
                let i = ground
                    .iter()
                    .position(|g| g == l)
                    .ok_or_else(|| MatroidError::UnknownElement(l.clone()))?;
                if mask.contains(i) {
                    return Err(MatroidError::DuplicateElement(l.clone()));
                }
                mask = mask.with(i);
            }
            family.push(mask);
        }
        Self::from_masks(ground, family)
    }

    pub(crate) fn from_masks(
        ground: Vec<String>,
        mut family: Vec<SubsetMask>,
    ) -> Result<Self, MatroidError> {
        check_ground(&ground)?;
        if family.is_empty() {
            return Err(MatroidError::EmptyFamily);
        }
        if family.len() > MAX_BASES {
            return Err(MatroidError::TooManyBases);
        }
        let rank = family[0].len();
        for b in &family {
            if b.len() != rank {
                return Err(MatroidError::NonUniformFamily(rank, b.len()));
            }
        }
        family.sort_unstable();
        family.dedup();
        Ok(BasisMatroid {
            ground,
            family,
            rank,
        })
    }

    pub fn family(&self) -> &[SubsetMask] {
        &self.family
    }

    pub fn family_ids(&self) -> Vec<Vec<String>> {
        self.family
            .iter()
            .map(|&b| ids_of(&self.ground, b))
            .collect()
    }

    pub fn contains_basis(&self, b: SubsetMask) -> bool {
        self.family.binary_search(&b).is_ok()
    }
}

impl Matroid for BasisMatroid {
    fn ground(&self) -> &[String] {
        &self.ground
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        self.family.iter().any(|&b| x.is_subset_of(b))
    }

    fn rank(&self) -> usize {
        self.rank
    }
}

/// Dual matroid: X is independent iff the complement keeps full rank.
#[derive(Debug, Clone)]
pub struct Dual<M> {
    inner: M,
    inner_rank: usize,
}

impl<M: Matroid> Dual<M> {
    pub fn inner(&self) -> &M {
        &self.inner
    }
}

pub fn dual<M: Matroid>(inner: M) -> Dual<M> {
    let inner_rank = inner.rank();
    Dual { inner, inner_rank }
}

impl<M: Matroid> Matroid for Dual<M> {
    fn ground(&self) -> &[String] {
        self.inner.ground()
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        let full = SubsetMask::full(self.inner.ground().len());
        self.inner.rank_of(full.minus(x)) == self.inner_rank
    }

    fn rank(&self) -> usize {
        self.inner.ground().len() - self.inner_rank
    }
}

/// Extensional equality: same ground set (as a set of labels) and the same
/// basis family under the label correspondence.
pub fn matroids_equal<A: Matroid + ?Sized, B: Matroid + ?Sized>(
    a: &A,
    b: &B,
) -> Result<bool, MatroidError> {
    let ga = a.ground();
    let gb = b.ground();
    let mut sa: Vec<&String> = ga.iter().collect();
    let mut sb: Vec<&String> = gb.iter().collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Err(MatroidError::GroundMismatch(format!(
            "{:?} vs {:?}",
            ga, gb
        )));
    }
    let bases_a = enumerate_bases(a)?;
    let bases_b = enumerate_bases(b)?;
    // Remap b's element indices into a's ground order.
    let map: Vec<usize> = gb
        .iter()
        .map(|l| ga.iter().position(|g| g == l).expect("checked above"))
        .collect();
    let mut remapped: Vec<SubsetMask> = bases_b
        .iter()
        .map(|&m| SubsetMask::from_indices(&m.iter().map(|i| map[i]).collect::<Vec<_>>()))
        .collect();
    remapped.sort_unstable();
    Ok(bases_a == remapped)
}

/// Maximum bipartite matching (augmenting paths). `adj[l]` lists the right
/// vertices available to left vertex `l`. Returns the matching size and the
/// left partner of each right vertex.
pub(crate) fn max_bipartite_matching(
    left: usize,
    right: usize,
    adj: &[Vec<usize>],
) -> (usize, Vec<Option<usize>>) {
    debug_assert_eq!(adj.len(), left);
    let mut partner: Vec<Option<usize>> = vec![None; right];
    fn try_augment(
        l: usize,
        adj: &[Vec<usize>],
        partner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &r in &adj[l] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if partner[r].is_none()
                || try_augment(partner[r].expect("checked"), adj, partner, visited)
            {
                partner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for l in 0..left {
        let mut visited = vec![false; right];
        if try_augment(l, adj, &mut partner, &mut visited) {
            size += 1;
        }
    }
    (size, partner)
}
