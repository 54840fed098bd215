//! Finite field arithmetic for GF(p^k).
//!
//! Elements are stored as canonical integers below the field order: a value
//! encodes the coefficient vector of a residue polynomial in little-endian
//! base p, so prime fields are plain least residues and extension fields are
//! polynomial residues modulo a fixed irreducible. Every operation is checked
//! against the operands' field specs; mixing fields is an error, not UB.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest order `enumerate` will materialize.
pub const ENUMERATE_MAX_ORDER: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} does not fit in a machine word")]
    OrderOverflow { p: u64, k: u8 },
    #[error("value {value} is not a canonical element of GF({spec})")]
    NotAnElement { value: u64, spec: FieldSpec },
    #[error("operands belong to different fields: GF({0}) vs GF({1})")]
    SpecMismatch(FieldSpec, FieldSpec),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("enumeration capped at order {ENUMERATE_MAX_ORDER}, field has order {0}")]
    EnumerationTooLarge(u64),
    #[error("cannot parse field spec from {0:?}; expected \"p\" or \"p^k\"")]
    BadSpecString(String),
}

/// A finite field GF(p^k), identified by characteristic and degree.
///
/// The modulus polynomial for k > 1 is not a free choice: it is always the
/// lexicographically smallest monic irreducible of degree k over GF(p), so two
/// specs with equal (p, k) denote literally the same arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldSpec {
    p: u64,
    k: u8,
}

impl FieldSpec {
    pub fn new(p: u64, k: u8) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let mut order: u64 = 1;
        for _ in 0..k {
            order = order
                .checked_mul(p)
                .ok_or(FieldError::OrderOverflow { p, k })?;
        }
        Ok(FieldSpec { p, k })
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    /// Modulus polynomial as little-endian coefficients of length k+1
    /// (constant term first, leading coefficient 1). `None` for prime fields.
    pub fn modulus_poly(&self) -> Option<Vec<u64>> {
        if self.k == 1 {
            return None;
        }
        Some(modulus_for(self.p, self.k))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            spec: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            spec: *self,
        }
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.order() {
            return Err(FieldError::NotAnElement { value, spec: *self });
        }
        Ok(FieldElement { value, spec: *self })
    }

    /// Embeds a signed integer via its least residue mod p. The image always
    /// lies in the prime subfield, so e.g. -1 maps to 4 over GF(5) and to
    /// the element 1 over any GF(2^k).
    pub fn from_signed_int(&self, n: i64) -> FieldElement {
        let p = self.p as i64;
        let r = n.rem_euclid(p) as u64;
        FieldElement {
            value: r,
            spec: *self,
        }
    }

    /// All field elements in ascending canonical order. Capped so callers
    /// cannot accidentally materialize a huge field.
    pub fn enumerate(&self) -> Result<Vec<FieldElement>, FieldError> {
        let q = self.order();
        if q > ENUMERATE_MAX_ORDER {
            return Err(FieldError::EnumerationTooLarge(q));
        }
        Ok((0..q)
            .map(|v| FieldElement {
                value: v,
                spec: *self,
            })
            .collect())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::BadSpecString(s.to_string());
        match s.split_once('^') {
            None => {
                let p: u64 = s.trim().parse().map_err(|_| bad())?;
                FieldSpec::prime(p)
            }
            Some((p, k)) => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let k: u8 = k.trim().parse().map_err(|_| bad())?;
                FieldSpec::new(p, k)
            }
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// An element of a specific GF(p^k), carried together with its field spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement {
    value: u64,
    spec: FieldSpec,
}

// Arithmetic returns Result because mixing field specs must fail loudly;
// the std operator traits cannot express that, so the names stay.
#[allow(clippy::should_implement_trait)]
impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(self, other: Self) -> Result<(), FieldError> {
        if self.spec != other.spec {
            return Err(FieldError::SpecMismatch(self.spec, other.spec));
        }
        Ok(())
    }

    pub fn add(self, other: Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self {
            value: raw_add(&self.spec, self.value, other.value),
            spec: self.spec,
        })
    }

    pub fn sub(self, other: Self) -> Result<Self, FieldError> {
        self.add(other.neg())
    }

    pub fn neg(self) -> Self {
        Self {
            value: raw_neg(&self.spec, self.value),
            spec: self.spec,
        }
    }

    pub fn mul(self, other: Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self {
            value: raw_mul(&self.spec, self.value, other.value),
            spec: self.spec,
        })
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Self {
            value: raw_inv(&self.spec, self.value),
            spec: self.spec,
        })
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self.value;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = raw_mul(&self.spec, acc, base);
            }
            base = raw_mul(&self.spec, base, base);
            e >>= 1;
        }
        Self {
            value: acc,
            spec: self.spec,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Raw arithmetic on canonical encodings. Callers guarantee operands are
// canonical for `spec`; these never allocate for prime fields.

pub(crate) fn raw_add(spec: &FieldSpec, a: u64, b: u64) -> u64 {
    let p = spec.p;
    if spec.k == 1 {
        return ((a as u128 + b as u128) % p as u128) as u64;
    }
    // Digitwise addition in base p: polynomial sum has no carries.
    let mut out = 0u64;
    let mut mult = 1u64;
    let (mut a, mut b) = (a, b);
    for _ in 0..spec.k {
        let d = (a % p + b % p) % p;
        out += d * mult;
        a /= p;
        b /= p;
        mult *= p;
    }
    out
}

pub(crate) fn raw_neg(spec: &FieldSpec, a: u64) -> u64 {
    let p = spec.p;
    if spec.k == 1 {
        return if a == 0 { 0 } else { p - a };
    }
    let mut out = 0u64;
    let mut mult = 1u64;
    let mut a = a;
    for _ in 0..spec.k {
        let d = a % p;
        out += if d == 0 { 0 } else { p - d } * mult;
        a /= p;
        mult *= p;
    }
    out
}

pub(crate) fn raw_mul(spec: &FieldSpec, a: u64, b: u64) -> u64 {
    let p = spec.p;
    if spec.k == 1 {
        return ((a as u128 * b as u128) % p as u128) as u64;
    }
    let k = spec.k as usize;
    let modulus = modulus_for(p, spec.k);
    let da = digits(p, k, a);
    let db = digits(p, k, b);
    // Convolution, then reduction by the monic modulus.
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        // modulus is monic: x^k = -(lower part), so fold c * x^(d-k) * lower.
        for (j, &m) in modulus.iter().enumerate().take(k) {
            let sub = (c as u128 * m as u128) % p as u128;
            let idx = d - k + j;
            prod[idx] = ((prod[idx] as u128 + p as u128 - sub) % p as u128) as u64;
        }
    }
    undigits(p, &prod[..k])
}

pub(crate) fn raw_inv(spec: &FieldSpec, a: u64) -> u64 {
    debug_assert!(a != 0);
    // a^(q-2) in a field of order q.
    let mut e = spec.order() - 2;
    let mut base = a;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = raw_mul(spec, acc, base);
        }
        base = raw_mul(spec, base, base);
        e >>= 1;
    }
    acc
}

fn digits(p: u64, k: usize, mut v: u64) -> Vec<u64> {
    let mut out = vec![0u64; k];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(p: u64, ds: &[u64]) -> u64 {
    let mut out = 0u64;
    for &d in ds.iter().rev() {
        out = out * p + d;
    }
    out
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

// Known lexicographically smallest monic irreducibles, keyed by (p, k) and
// stored as the integer encoding of the non-leading coefficients. Anything
// not listed is derived by the same search at first use and cached.
const IRREDUCIBLE_TABLE: &[(u64, u8, u64)] = &[
    (2, 2, 3), // x^2 + x + 1
    (2, 3, 3), // x^3 + x + 1
    (2, 4, 3), // x^4 + x + 1
    (2, 5, 5), // x^5 + x^2 + 1
    (2, 6, 3), // x^6 + x + 1
    (3, 2, 1), // x^2 + 1
    (3, 3, 7), // x^3 + 2x + 1
    (5, 2, 2), // x^2 + 2
    (7, 2, 1), // x^2 + 1
];

type ModulusCache = BTreeMap<(u64, u8), Vec<u64>>;

fn modulus_for(p: u64, k: u8) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<ModulusCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("modulus cache poisoned");
    if let Some(m) = guard.get(&(p, k)) {
        return m.clone();
    }
    let enc = IRREDUCIBLE_TABLE
        .iter()
        .find(|&&(tp, tk, _)| tp == p && tk == k)
        .map(|&(_, _, enc)| enc)
        .unwrap_or_else(|| search_irreducible(p, k));
    let mut poly = digits(p, k as usize, enc);
    poly.push(1);
    guard.insert((p, k), poly.clone());
    poly
}

/// First (by integer encoding of the non-leading part) monic irreducible of
/// degree k over GF(p).
pub(crate) fn search_irreducible(p: u64, k: u8) -> u64 {
    let k = k as usize;
    let bound = p.pow(k as u32);
    for enc in 0..bound {
        let mut poly = digits(p, k, enc);
        poly.push(1);
        if poly_is_irreducible(p, &poly) {
            return enc;
        }
    }
    unreachable!("irreducibles of every degree exist over GF(p)")
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn poly_is_irreducible(p: u64, poly: &[u64]) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        for enc in 0..p.pow(d as u32) {
            let mut div = digits(p, d, enc);
            div.push(1);
            if poly_rem_is_zero(p, poly, &div) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u64, num: &[u64], div: &[u64]) -> bool {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().expect("nonempty");
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            // div is monic, so subtract lead * x^shift * div.
            for (j, &c) in div.iter().enumerate() {
                let sub = (lead as u128 * c as u128) % p as u128;
                let idx = shift + j;
                rem[idx] = ((rem[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}
