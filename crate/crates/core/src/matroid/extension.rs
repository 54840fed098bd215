//! Series and parallel extensions, materialized as explicit basis families.

use super::{enumerate_bases, BasisMatroid, Matroid, MatroidError};

/// Series extension of `m` at `x` by a fresh element `y`: every old basis
/// grows by y, and old bases avoiding x also grow by x. Rank goes up by one.
pub fn series_extension<M: Matroid + ?Sized>(
    m: &M,
    x: &str,
    y: &str,
) -> Result<BasisMatroid, MatroidError> {
    let (ground, x_idx, y_idx) = extended_ground(m, x, y)?;
    let old = enumerate_bases(m)?;
    let mut family = Vec::new();
    for &b in &old {
        family.push(b.with(y_idx));
        if !b.contains(x_idx) {
            family.push(b.with(x_idx));
        }
    }
    BasisMatroid::from_masks(ground, family)
}

/// Parallel extension of `m` at `x` by a fresh element `y`: old bases stay,
/// and bases through x may swap x for y. Rank is unchanged.
pub fn parallel_extension<M: Matroid + ?Sized>(
    m: &M,
    x: &str,
    y: &str,
) -> Result<BasisMatroid, MatroidError> {
    let (ground, x_idx, y_idx) = extended_ground(m, x, y)?;
    let old = enumerate_bases(m)?;
    let mut family = Vec::new();
    for &b in &old {
        family.push(b);
        if b.contains(x_idx) {
            family.push(b.without(x_idx).with(y_idx));
        }
    }
    BasisMatroid::from_masks(ground, family)
}

fn extended_ground<M: Matroid + ?Sized>(
    m: &M,
    x: &str,
    y: &str,
) -> Result<(Vec<String>, usize, usize), MatroidError> {
    let old = m.ground();
    let x_idx = old
        .iter()
        .position(|g| g == x)
        .ok_or_else(|| MatroidError::UnknownElement(x.to_string()))?;
    if old.iter().any(|g| g == y) {
        return Err(MatroidError::ElementExists(y.to_string()));
    }
    let mut ground = old.to_vec();
    ground.push(y.to_string());
    Ok((ground, x_idx, old.len()))
}
