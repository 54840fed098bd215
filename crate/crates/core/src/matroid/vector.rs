//! Matroids represented by columns of a matrix.
//!
//! Two flavors: columns over a finite field, and integer columns taken over
//! the rationals. The latter exists so signed {-1,0,1} matrices can be judged
//! characteristic-free, with exact integer arithmetic.

use super::{check_ground, Matroid, MatroidError, SubsetMask};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg;

/// Column matroid over GF(p^k): a subset is independent iff its columns are.
#[derive(Debug, Clone)]
pub struct VectorMatroid {
    ground: Vec<String>,
    spec: FieldSpec,
    rows: usize,
    cols: Vec<Vec<u64>>,
}

impl VectorMatroid {
    pub fn new(
        spec: FieldSpec,
        ground: Vec<String>,
        columns: &[Vec<FieldElement>],
    ) -> Result<Self, MatroidError> {
        check_ground(&ground)?;
        if columns.len() != ground.len() {
            return Err(MatroidError::GroundMismatch(format!(
                "{} labels vs {} columns",
                ground.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, |c| c.len());
        let mut raw = Vec::with_capacity(columns.len());
        for col in columns {
            if col.len() != rows {
                return Err(MatroidError::GroundMismatch(format!(
                    "column height {} vs {}",
                    col.len(),
                    rows
                )));
            }
            for e in col {
                if e.spec() != spec {
                    return Err(MatroidError::Field(crate::field::FieldError::SpecMismatch(
                        e.spec(),
                        spec,
                    )));
                }
            }
            raw.push(col.iter().map(|e| e.value()).collect());
        }
        Ok(VectorMatroid {
            ground,
            spec,
            rows,
            cols: raw,
        })
    }

    pub(crate) fn from_raw(
        spec: FieldSpec,
        ground: Vec<String>,
        rows: usize,
        cols: Vec<Vec<u64>>,
    ) -> Result<Self, MatroidError> {
        check_ground(&ground)?;
        debug_assert_eq!(ground.len(), cols.len());
        debug_assert!(cols.iter().all(|c| c.len() == rows));
        Ok(VectorMatroid {
            ground,
            spec,
            rows,
            cols,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }
}

impl Matroid for VectorMatroid {
    fn ground(&self) -> &[String] {
        &self.ground
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        let picked: Vec<&[u64]> = x.iter().map(|i| self.cols[i].as_slice()).collect();
        linalg::rank_cols(&self.spec, self.rows, &picked) == picked.len()
    }

    fn rank_of(&self, x: SubsetMask) -> usize {
        let picked: Vec<&[u64]> = x.iter().map(|i| self.cols[i].as_slice()).collect();
        linalg::rank_cols(&self.spec, self.rows, &picked)
    }
}

/// Column matroid of an integer matrix over the rationals.
#[derive(Debug, Clone)]
pub struct IntVectorMatroid {
    ground: Vec<String>,
    rows: usize,
    cols: Vec<Vec<i64>>,
}

impl IntVectorMatroid {
    pub fn new(ground: Vec<String>, columns: &[Vec<i64>]) -> Result<Self, MatroidError> {
        check_ground(&ground)?;
        if columns.len() != ground.len() {
            return Err(MatroidError::GroundMismatch(format!(
                "{} labels vs {} columns",
                ground.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, |c| c.len());
        for col in columns {
            if col.len() != rows {
                return Err(MatroidError::GroundMismatch(format!(
                    "column height {} vs {}",
                    col.len(),
                    rows
                )));
            }
        }
        Ok(IntVectorMatroid {
            ground,
            rows,
            cols: columns.to_vec(),
        })
    }
}

/// Exact rank over the rationals by fraction-free elimination in i128.
/// Entries stay tiny here ({-1,0,1} matrices of single-digit size), far from
/// overflow.
fn rank_rational(rows: usize, cols: &[&[i64]]) -> usize {
    let mut work: Vec<Vec<i128>> = cols
        .iter()
        .map(|c| c.iter().map(|&v| v as i128).collect())
        .collect();
    let mut rank = 0usize;
    let mut used_rows: Vec<usize> = Vec::new();
    for col in 0..work.len() {
        let Some(r) = (0..rows).find(|r| !used_rows.contains(r) && work[col][*r] != 0) else {
            continue;
        };
        used_rows.push(r);
        rank += 1;
        let pivot = work[col].clone();
        let pv = pivot[r];
        for later in work.iter_mut().skip(col + 1) {
            if later[r] == 0 {
                continue;
            }
            let lv = later[r];
            // later = pv * later - lv * pivot keeps everything integral.
            for row in 0..rows {
                later[row] = pv * later[row] - lv * pivot[row];
            }
        }
    }
    rank
}

impl Matroid for IntVectorMatroid {
    fn ground(&self) -> &[String] {
        &self.ground
    }

    fn is_independent(&self, x: SubsetMask) -> bool {
        let picked: Vec<&[i64]> = x.iter().map(|i| self.cols[i].as_slice()).collect();
        rank_rational(self.rows, &picked) == picked.len()
    }

    fn rank_of(&self, x: SubsetMask) -> usize {
        let picked: Vec<&[i64]> = x.iter().map(|i| self.cols[i].as_slice()).collect();
        rank_rational(self.rows, &picked)
    }
}
