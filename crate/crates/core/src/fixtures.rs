//! Bundled example inputs used by tests, docs, and the CLI examples.

/// The classic two-receiver butterfly with a single bottleneck link, message
/// dimension 2. Receiver t1 is fed by {e1, e5} and the bottleneck route, t2
/// symmetrically.
pub const BUTTERFLY: &str = include_str!("../fixtures/butterfly.json");

/// Combination network: four middle nodes, one receiver per pair, dimension 2.
/// Solvable over GF(3) and larger fields, unsolvable over GF(2).
pub const COMBINATION42: &str = include_str!("../fixtures/combination42.json");

/// A 3 x 21 binary matrix whose 21 columns run through the full signing and
/// lifting pipeline; every column pattern of weight at most 2 occurs.
pub const LIFT21: &str = include_str!("../fixtures/lift21.txt");

/// The properly signed version of [`LIFT21`]: one +1 and at most one -1 per
/// column, which makes it totally unimodular.
pub const LIFT21_SIGNED: &str = include_str!("../fixtures/lift21_signed.txt");

/// [`LIFT21_SIGNED`] read over GF(5): every -1 becomes 4.
pub const LIFT21_GF5: &str = include_str!("../fixtures/lift21_gf5.txt");

/// A 3 x 7 binary matrix containing all nonzero columns; it is not
/// row-equivalent to any matrix with at most two ones per column.
pub const FANO: &str = include_str!("../fixtures/fano.txt");
