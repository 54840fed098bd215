//! Transversal matroids of bipartite set systems.

use super::{check_ground, max_bipartite_matching, Matroid, MatroidError, SubsetMask};

/// A family of named subsets of a ground set. The transversal matroid's
/// independent sets are the partial transversals: element sets matchable
/// injectively into distinct family members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSystem {
    pub ground: Vec<String>,
    pub sets: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone)]
pub struct TransversalMatroid {
    ground: Vec<String>,
    set_names: Vec<String>,
    /// members[j] is the mask of ground elements in set j.
    members: Vec<SubsetMask>,
}

pub fn transversal_matroid(sys: &BipartiteSystem) -> Result<TransversalMatroid, MatroidError> {
    check_ground(&sys.ground)?;
    let mut members = Vec::with_capacity(sys.sets.len());
    let mut set_names = Vec::with_capacity(sys.sets.len());
    for (name, elems) in &sys.sets {
        let mut mask = SubsetMask::EMPTY;
        for e in elems {
            let i = sys
                .ground
                .iter()
                .position(|g| g == e)
                .ok_or_else(|| MatroidError::UnknownElement(e.clone()))?;
            mask = mask.with(i);
        }
        members.push(mask);
        set_names.push(name.clone());
    }
    Ok(TransversalMatroid {
        ground: sys.ground.clone(),
        set_names,
        members,
    })
}

impl TransversalMatroid {
    pub fn set_names(&self) -> &[String] {
        &self.set_names
    }

    /// A full transversal: one distinct ground element per set, if any.
    /// Members are picked by augmenting in set order, so the result is
    /// deterministic.
    pub fn full_transversal(&self) -> Option<Vec<usize>> {
        let adj: Vec<Vec<usize>> = self
            .members
            .iter()
            .map(|m| m.iter().collect::<Vec<_>>())
            .collect();
        let (size, partner) = max_bipartite_matching(self.members.len(), self.ground.len(), &adj);
        if size < self.members.len() {
            return None;
        }
        let mut pick = vec![usize::MAX; self.members.len()];
        for (elem, owner) in partner.iter().enumerate() {
            if let Some(j) = owner {
                pick[*j] = elem;
            }
        }
        Some(pick)
    }
}

impl Matroid for TransversalMatroid {
    fn ground(&self) -> &[String] {
        &self.ground
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        // Match the elements of x injectively into the sets containing them.
        let elems: Vec<usize> = x.iter().collect();
        let adj: Vec<Vec<usize>> = elems
            .iter()
            .map(|&e| {
                self.members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.contains(e))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let (size, _) = max_bipartite_matching(elems.len(), self.members.len(), &adj);
        size == elems.len()
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::labels;
    use super::super::{enumerate_bases, ids_of, mask_of};
    use super::*;

    fn sys(ground: &[&str], sets: &[(&str, &[&str])]) -> BipartiteSystem {
        BipartiteSystem {
            ground: labels(ground),
            sets: sets
                .iter()
                .map(|(n, es)| (n.to_string(), labels(es)))
                .collect(),
        }
    }

    #[test]
    fn two_set_example() {
        // A1 = {1,2}, A2 = {2,3}: every 2-subset is a basis.
        let m = transversal_matroid(&sys(
            &["1", "2", "3"],
            &[("A1", &["1", "2"]), ("A2", &["2", "3"])],
        ))
        .unwrap();
        assert_eq!(m.rank(), 2);
        let bases = enumerate_bases(&m).unwrap();
        let ids: Vec<Vec<String>> = bases.iter().map(|&b| ids_of(m.ground(), b)).collect();
        assert_eq!(
            ids,
            vec![
                labels(&["1", "2"]),
                labels(&["1", "3"]),
                labels(&["2", "3"]),
            ]
        );
    }

    #[test]
    fn element_outside_every_set_is_a_loop() {
        let m = transversal_matroid(&sys(&["1", "2"], &[("A", &["1"])])).unwrap();
        assert!(!m.is_independent(mask_of(&m, &["2"]).unwrap()));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn repeated_sets_bound_multiplicity() {
        // Two copies of {1,2}: rank 2, but {1} and {2} can only be matched
        // once each; {1,2} uses both copies.
        let m = transversal_matroid(&sys(
            &["1", "2", "3"],
            &[("A1", &["1", "2"]), ("A2", &["1", "2"])],
        ))
        .unwrap();
        assert!(m.is_independent(mask_of(&m, &["1", "2"]).unwrap()));
        assert!(!m.is_independent(mask_of(&m, &["1", "2", "3"]).unwrap()));
        assert!(!m.is_independent(mask_of(&m, &["3"]).unwrap()));
    }

    #[test]
    fn full_transversal_pick() {
        let m = transversal_matroid(&sys(
            &["1", "2", "3"],
            &[("A1", &["1", "2"]), ("A2", &["2", "3"])],
        ))
        .unwrap();
        // Deterministic greedy-with-augmentation: A1 takes 1, A2 takes 2.
        assert_eq!(m.full_transversal(), Some(vec![0, 1]));
        let empty = transversal_matroid(&sys(&["1"], &[("A1", &["1"]), ("A2", &["1"])])).unwrap();
        assert_eq!(empty.full_transversal(), None);
    }

    #[test]
    fn unknown_member_is_rejected() {
        let err = transversal_matroid(&sys(&["1"], &[("A", &["2"])]));
        assert!(matches!(err, Err(MatroidError::UnknownElement(_))));
    }
}
