//! Base orderability.
//!
//! A matroid is base orderable when every pair of bases B1, B2 admits a
//! bijection f: B1 -> B2 such that for every x in B1 both (B1 - x) + f(x)
//! and (B2 - f(x)) + x are bases. Rather than scanning all bijections, the
//! check builds the compatibility graph on B1 x B2 (an edge wherever the two
//! exchanged sets are both bases) and asks for a perfect matching; a
//! bijection with the required property is exactly a perfect matching here.

use super::{enumerate_bases, ids_of, max_bipartite_matching, Matroid, MatroidError, SubsetMask};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderabilityReport {
    pub orderable: bool,
    /// A pair of bases with no valid exchange bijection, if any.
    pub witness: Option<(Vec<String>, Vec<String>)>,
}

pub fn is_base_orderable<M: Matroid + ?Sized>(m: &M) -> Result<OrderabilityReport, MatroidError> {
    let bases = enumerate_bases(m)?;
    let is_basis = |b: SubsetMask| bases.binary_search(&b).is_ok();
    for (i, &b1) in bases.iter().enumerate() {
        for &b2 in &bases[i + 1..] {
            let left: Vec<usize> = b1.iter().collect();
            let right: Vec<usize> = b2.iter().collect();
            let adj: Vec<Vec<usize>> = left
                .iter()
                .map(|&x| {
                    right
                        .iter()
                        .enumerate()
                        .filter(|&(_, &y)| {
                            // Common elements always admit the identity swap.
                            x == y
                                || (is_basis(b1.without(x).with(y))
                                    && is_basis(b2.without(y).with(x)))
                        })
                        .map(|(ri, _)| ri)
                        .collect()
                })
                .collect();
            let (size, _) = max_bipartite_matching(left.len(), right.len(), &adj);
            if size < left.len() {
                return Ok(OrderabilityReport {
                    orderable: false,
                    witness: Some((ids_of(m.ground(), b1), ids_of(m.ground(), b2))),
                });
            }
        }
    }
    Ok(OrderabilityReport {
        orderable: true,
        witness: None,
    })
}
