//! Lifting binary kernel matrices into larger fields.
//!
//! The pipeline: juxtapose a binary code's global kernels into one matrix,
//! row-reduce it until every column has at most two ones, resign those
//! columns so each has a single +1 on top and at most one -1 below, and
//! read the result in the target field. The signed matrix is totally
//! unimodular, so every subdeterminant survives the change of field and
//! the matrix keeps representing the same matroid; in network mode the
//! columns are renormalized and local kernels are recovered from them.
//!
//! Matrices travel as plain text: a header line of column labels, then one
//! line per row of space-separated integers.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::code::{induced_matroid, locals_from_globals, verify_multicast, CodeError, LinearCode};
use crate::field::{FieldError, FieldSpec};
use crate::linalg;
use crate::matroid::{matroids_equal, MatroidError, MAX_ENUM_GROUND};

/// Row reduction searches GL over GF(2); six rows is already 2^36 row
/// choices in the worst case, so refuse anything bigger.
pub const ROW_REDUCE_MAX_ROWS: usize = 6;
/// Total unimodularity is checked on every minor up to this order.
pub const TU_MINOR_CAP: usize = 4;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("matrix text, line {0}: {1}")]
    Parse(usize, String),
    #[error("row reduction supports up to {ROW_REDUCE_MAX_ROWS} rows, got {0}")]
    TooManyRows(usize),
    #[error("no row transform makes every column weight at most two")]
    NotGraphic,
    #[error("column {0} has more than two nonzero entries")]
    ColumnTooHeavy(String),
    #[error("lifting starts from a binary code, this one is over {0}")]
    SourceNotBinary(FieldSpec),
    #[error("lift postcondition failed: {0}")]
    Postcondition(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Rows paired with their 1-based source line, for error reporting.
type NumberedRows = Vec<(usize, Vec<i64>)>;

fn parse_text(text: &str) -> Result<(Vec<String>, NumberedRows), LiftError> {
    let mut labels: Option<Vec<String>> = None;
    let mut data: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        match &labels {
            None => {
                let names: Vec<String> = line.split_whitespace().map(String::from).collect();
                let mut seen = BTreeSet::new();
                for n in &names {
                    if !seen.insert(n.clone()) {
                        return Err(LiftError::Parse(lineno, format!("duplicate label {n:?}")));
                    }
                }
                labels = Some(names);
            }
            Some(names) => {
                let row: Vec<i64> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| LiftError::Parse(lineno, format!("bad entry {t:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                if row.len() != names.len() {
                    return Err(LiftError::Parse(
                        lineno,
                        format!("expected {} entries, got {}", names.len(), row.len()),
                    ));
                }
                data.push((lineno, row));
            }
        }
    }
    match labels {
        Some(names) if !data.is_empty() => Ok((names, data)),
        _ => Err(LiftError::Parse(1, "document has no rows".into())),
    }
}

fn format_rows<T: std::fmt::Display>(labels: &[String], data: &[Vec<T>]) -> String {
    let mut out = labels.join(" ");
    out.push('\n');
    for row in data {
        let line: Vec<String> = row.iter().map(T::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// 0/1 matrix with labeled columns, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    labels: Vec<String>,
    data: Vec<Vec<u8>>,
}

impl BinaryMatrix {
    pub fn new(labels: Vec<String>, data: Vec<Vec<u8>>) -> Result<Self, LiftError> {
        let text_shape = data.iter().all(|r| r.len() == labels.len());
        if labels.is_empty() || data.is_empty() || !text_shape {
            return Err(LiftError::Parse(1, "bad matrix shape".into()));
        }
        for row in &data {
            if let Some(&bad) = row.iter().find(|&&v| v > 1) {
                return Err(LiftError::Parse(1, format!("entry {bad} is not binary")));
            }
        }
        Ok(BinaryMatrix { labels, data })
    }

    pub fn parse(text: &str) -> Result<Self, LiftError> {
        let (labels, rows) = parse_text(text)?;
        let mut data = Vec::with_capacity(rows.len());
        for (lineno, row) in rows {
            if let Some(&bad) = row.iter().find(|&&v| v != 0 && v != 1) {
                return Err(LiftError::Parse(
                    lineno,
                    format!("entry {bad} is not binary"),
                ));
            }
            data.push(row.into_iter().map(|v| v as u8).collect());
        }
        BinaryMatrix::new(labels, data)
    }

    pub fn format(&self) -> String {
        format_rows(&self.labels, &self.data)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_rows(&self) -> usize {
        self.data.len()
    }

    pub fn num_cols(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        self.data[row][col]
    }

    /// Column as a bitmask, bit i for row i.
    fn col_mask(&self, col: usize) -> u64 {
        self.data
            .iter()
            .enumerate()
            .fold(0, |m, (i, row)| m | (u64::from(row[col]) << i))
    }
}

/// Matrix over {-1, 0, +1}, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMatrix {
    labels: Vec<String>,
    data: Vec<Vec<i64>>,
}

impl SignedMatrix {
    pub fn new(labels: Vec<String>, data: Vec<Vec<i64>>) -> Result<Self, LiftError> {
        let shape = data.iter().all(|r| r.len() == labels.len());
        if labels.is_empty() || data.is_empty() || !shape {
            return Err(LiftError::Parse(1, "bad matrix shape".into()));
        }
        for row in &data {
            if let Some(&bad) = row.iter().find(|&&v| !(-1..=1).contains(&v)) {
                return Err(LiftError::Parse(1, format!("entry {bad} is not a sign")));
            }
        }
        Ok(SignedMatrix { labels, data })
    }

    pub fn parse(text: &str) -> Result<Self, LiftError> {
        let (labels, rows) = parse_text(text)?;
        for (lineno, row) in &rows {
            if let Some(&bad) = row.iter().find(|&&v| !(-1..=1).contains(&v)) {
                return Err(LiftError::Parse(
                    *lineno,
                    format!("entry {bad} is not a sign"),
                ));
            }
        }
        let data = rows.into_iter().map(|(_, r)| r).collect();
        SignedMatrix::new(labels, data)
    }

    pub fn format(&self) -> String {
        format_rows(&self.labels, &self.data)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_rows(&self) -> usize {
        self.data.len()
    }

    pub fn num_cols(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.data[row][col]
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.num_cols())
            .map(|j| self.data.iter().map(|r| r[j]).collect())
            .collect()
    }

    /// Entry-wise residues mod 2; recovers the matrix that was signed.
    pub fn mod2(&self) -> BinaryMatrix {
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|&v| (v & 1).unsigned_abs() as u8).collect())
            .collect();
        BinaryMatrix::new(self.labels.clone(), data).expect("residues are binary")
    }
}

/// A signed matrix read in some field, entries in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    spec: FieldSpec,
    labels: Vec<String>,
    data: Vec<Vec<u64>>,
}

impl FieldMatrix {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_rows(&self) -> usize {
        self.data.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.data[row][col]
    }

    pub fn format(&self) -> String {
        format_rows(&self.labels, &self.data)
    }

    /// Columns in column-major order, canonical values.
    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.labels.len())
            .map(|j| self.data.iter().map(|r| r[j]).collect())
            .collect()
    }
}

pub fn view_over_field(m: &SignedMatrix, spec: FieldSpec) -> FieldMatrix {
    let data = m
        .data
        .iter()
        .map(|r| r.iter().map(|&v| spec.from_signed_int(v).value()).collect())
        .collect();
    FieldMatrix {
        spec,
        labels: m.labels.clone(),
        data,
    }
}

/// All global kernels of a binary code side by side, imaginary links first.
pub fn juxtapose_kernels(code: &LinearCode) -> Result<BinaryMatrix, LiftError> {
    let spec = code.global().spec();
    if spec != FieldSpec::prime(2).expect("2 is prime") {
        return Err(LiftError::SourceNotBinary(spec));
    }
    let labels = code.global().labels().to_vec();
    let rows = code.global().num_rows();
    let cols = code.global().raw_cols();
    let data = (0..rows)
        .map(|i| cols.iter().map(|c| c[i] as u8).collect())
        .collect();
    BinaryMatrix::new(labels, data)
}

fn reduce_by(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        let lead = 63 - b.leading_zeros();
        if v >> lead & 1 == 1 {
            v ^= b;
        }
    }
    v
}

fn apply_rows(rows: &[u64], b: &BinaryMatrix) -> BinaryMatrix {
    let data = rows
        .iter()
        .map(|&v| {
            (0..b.num_cols())
                .map(|j| ((v & b.col_mask(j)).count_ones() & 1) as u8)
                .collect()
        })
        .collect();
    BinaryMatrix::new(b.labels.clone(), data).expect("product is binary")
}

fn rows_as_matrix(rows: &[u64], width: usize) -> BinaryMatrix {
    let labels = (1..=width).map(|i| format!("r{i}")).collect();
    let data = rows
        .iter()
        .map(|&v| (0..width).map(|k| (v >> k & 1) as u8).collect())
        .collect();
    BinaryMatrix::new(labels, data).expect("rows are binary")
}

/// Finds an invertible binary row transform making every column of the
/// product have weight at most two. If the matrix is already that sparse
/// the identity is returned; otherwise rows are searched in ascending
/// order, so the result is deterministic.
pub fn graphic_row_reduce(b: &BinaryMatrix) -> Result<(BinaryMatrix, BinaryMatrix), LiftError> {
    let r = b.num_rows();
    if r > ROW_REDUCE_MAX_ROWS {
        return Err(LiftError::TooManyRows(r));
    }
    let n = b.num_cols();
    let col_masks: Vec<u64> = (0..n).map(|j| b.col_mask(j)).collect();

    if col_masks.iter().all(|&c| c.count_ones() <= 2) {
        let ident: Vec<u64> = (0..r).map(|i| 1u64 << i).collect();
        return Ok((rows_as_matrix(&ident, r), b.clone()));
    }

    // Depth-first over row choices; weights[j] counts chosen rows hitting
    // column j, and the echelon basis enforces row independence.
    fn dfs(
        r: usize,
        col_masks: &[u64],
        chosen: &mut Vec<u64>,
        basis: &mut Vec<u64>,
        weights: &mut [u8],
    ) -> bool {
        if chosen.len() == r {
            return true;
        }
        for v in 1..1u64 << r {
            let red = reduce_by(basis, v);
            if red == 0 {
                continue;
            }
            let hits: Vec<usize> = col_masks
                .iter()
                .enumerate()
                .filter(|&(_, &c)| (v & c).count_ones() & 1 == 1)
                .map(|(j, _)| j)
                .collect();
            if hits.iter().any(|&j| weights[j] == 2) {
                continue;
            }
            chosen.push(v);
            basis.push(red);
            for &j in &hits {
                weights[j] += 1;
            }
            if dfs(r, col_masks, chosen, basis, weights) {
                return true;
            }
            chosen.pop();
            basis.pop();
            for &j in &hits {
                weights[j] -= 1;
            }
        }
        false
    }

    let mut chosen = Vec::with_capacity(r);
    let mut basis = Vec::with_capacity(r);
    let mut weights = vec![0u8; n];
    if !dfs(r, &col_masks, &mut chosen, &mut basis, &mut weights) {
        return Err(LiftError::NotGraphic);
    }
    Ok((rows_as_matrix(&chosen, r), apply_rows(&chosen, b)))
}

/// Resigns a column-sparse binary matrix: in each column the nonzero entry
/// on the smaller row index becomes +1 and the other, if present, -1.
pub fn sign_to_tu(b: &BinaryMatrix) -> Result<SignedMatrix, LiftError> {
    let mut data = vec![vec![0i64; b.num_cols()]; b.num_rows()];
    for (j, label) in b.labels.iter().enumerate() {
        let rows: Vec<usize> = (0..b.num_rows()).filter(|&i| b.entry(i, j) == 1).collect();
        match rows.as_slice() {
            [] => {}
            [i] => data[*i][j] = 1,
            [i, k] => {
                data[*i][j] = 1;
                data[*k][j] = -1;
            }
            _ => return Err(LiftError::ColumnTooHeavy(label.clone())),
        }
    }
    SignedMatrix::new(b.labels.clone(), data)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuReport {
    pub ok: bool,
    /// Largest minor order that was actually checked.
    pub max_order_checked: usize,
    pub failing: Option<MinorWitness>,
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 || k > n {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut mask: u64 = (1 << k) - 1;
    while mask < 1u64 << n {
        out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => {
            let mut acc = 0i64;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += sign * m[0][j] * det_i64(&minor);
            }
            acc
        }
    }
}

/// Checks every minor of order up to [`TU_MINOR_CAP`] for a determinant
/// outside {-1, 0, +1}. The first offender is reported.
pub fn verify_tu(m: &SignedMatrix) -> TuReport {
    let cap = m.num_rows().min(m.num_cols()).min(TU_MINOR_CAP);
    for size in 1..=cap {
        for rows in k_subsets(m.num_rows(), size) {
            for cols in k_subsets(m.num_cols(), size) {
                let sub: Vec<Vec<i64>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m.entry(i, j)).collect())
                    .collect();
                let det = det_i64(&sub);
                if det.abs() > 1 {
                    return TuReport {
                        ok: false,
                        max_order_checked: cap,
                        failing: Some(MinorWitness { rows, cols, det }),
                    };
                }
            }
        }
    }
    TuReport {
        ok: true,
        max_order_checked: cap,
        failing: None,
    }
}

/// Matrix-mode lift: every intermediate stage is kept.
#[derive(Debug, Clone)]
pub struct MatrixLift {
    pub transform: BinaryMatrix,
    pub reduced: BinaryMatrix,
    pub signed: SignedMatrix,
    pub viewed: FieldMatrix,
}

pub fn lift_matrix(b: &BinaryMatrix, spec: FieldSpec) -> Result<MatrixLift, LiftError> {
    let (transform, reduced) = graphic_row_reduce(b)?;
    let signed = sign_to_tu(&reduced)?;
    let viewed = view_over_field(&signed, spec);
    Ok(MatrixLift {
        transform,
        reduced,
        signed,
        viewed,
    })
}

/// Network-mode lift of a whole binary solution.
#[derive(Debug, Clone)]
pub struct SolutionLift {
    pub matrix: MatrixLift,
    pub code: LinearCode,
}

/// Lifts a binary multicast code to `to`. The viewed columns are
/// renormalized so the imaginary block is the identity again, then local
/// kernels are recovered link by link, smallest coefficients first. The
/// lifted code must decode everywhere the binary one did and must induce
/// the same matroid; both are rechecked, not assumed.
pub fn lift_solution(code: &LinearCode, to: FieldSpec) -> Result<SolutionLift, LiftError> {
    let net = code.network();
    let omega = net.dimension();
    let juxtaposed = juxtapose_kernels(code)?;
    let matrix = lift_matrix(&juxtaposed, to)?;

    let viewed_cols = matrix.viewed.columns();
    // The first omega columns sit on the imaginary links. Their signed
    // block has an odd determinant and entries in {-1, 0, +1}, so it is a
    // unit in every field.
    let w: Vec<Vec<u64>> = viewed_cols[..omega].to_vec();
    let w_inv = linalg::invert(&to, omega, &w)
        .ok_or(LiftError::Postcondition("imaginary block is singular"))?;
    let normalized: Vec<Vec<u64>> = viewed_cols
        .iter()
        .map(|c| linalg::mat_vec(&to, omega, &w_inv, c))
        .collect();

    let local = locals_from_globals(net, to, &normalized)?;
    let lifted = LinearCode::new(net.clone(), local)?;
    if lifted.global().raw_cols() != normalized.as_slice() {
        return Err(LiftError::Postcondition(
            "recovered kernels do not reproduce the lifted columns",
        ));
    }
    if !verify_multicast(&lifted).ok {
        return Err(LiftError::Postcondition("lifted code fails to decode"));
    }
    if net.num_links() <= MAX_ENUM_GROUND
        && !matroids_equal(&induced_matroid(code)?, &induced_matroid(&lifted)?)?
    {
        return Err(LiftError::Postcondition(
            "lifted code induces a different matroid",
        ));
    }
    Ok(SolutionLift {
        matrix,
        code: lifted,
    })
}
