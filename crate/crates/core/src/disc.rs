//! Per-prime ramification profiles and discriminant bounds for composita:
//! exact exponents at tame common primes, brackets or table lookups at wild
//! ones, the Y-truncated discriminant, and the discriminant defect.

use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::DiscError;
use crate::perm::{product_ind, CycleType};

/// Ramification data at one prime: tame inertia recorded by its cycle type on
/// the degree-n points, wild inertia by the discriminant valuation plus a
/// free-form code naming the local shape (e.g. `c3t`, `w3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalDatum {
    Tame(CycleType),
    Wild { valuation: u64, code: String },
}

impl LocalDatum {
    pub fn valuation(&self) -> u64 {
        match self {
            LocalDatum::Tame(ct) => ct.ind(),
            LocalDatum::Wild { valuation, .. } => *valuation,
        }
    }

    pub fn is_wild(&self) -> bool {
        matches!(self, LocalDatum::Wild { .. })
    }

    /// Text form used both in profile strings and exponent-table keys:
    /// `T:<parts>` or `W:<valuation>:<code>`.
    pub fn descriptor(&self) -> String {
        match self {
            LocalDatum::Tame(ct) => format!("T:{}", ct.to_compact_string()),
            LocalDatum::Wild { valuation, code } => format!("W:{valuation}:{code}"),
        }
    }

    fn parse(p: u64, text: &str) -> Result<LocalDatum, DiscError> {
        let bad = |reason: &str| DiscError::BadProfile {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut parts = text.splitn(2, ':');
        match parts.next() {
            Some("T") => {
                let ct_text = parts.next().ok_or_else(|| bad("tame entry needs a cycle type"))?;
                let ct = CycleType::parse_compact(ct_text).map_err(|e| bad(&e.to_string()))?;
                check_tame(p, &ct)?;
                Ok(LocalDatum::Tame(ct))
            }
            Some("W") => {
                let rest = parts.next().ok_or_else(|| bad("wild entry needs valuation:code"))?;
                let (v_text, code) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("wild entry needs valuation:code"))?;
                let valuation: u64 = v_text.parse().map_err(|_| bad("bad wild valuation"))?;
                if valuation == 0 {
                    return Err(DiscError::ZeroWildValuation { p });
                }
                if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric()) {
                    return Err(bad("wild code must be nonempty alphanumeric"));
                }
                Ok(LocalDatum::Wild { valuation, code: code.to_string() })
            }
            _ => Err(bad("entry must start with T or W")),
        }
    }
}

fn check_tame(p: u64, ct: &CycleType) -> Result<(), DiscError> {
    for &part in ct.parts() {
        if (part as u64).is_multiple_of(p) {
            return Err(DiscError::TameAtDividingPrime { p, part });
        }
    }
    Ok(())
}

/// Ramification profile of one field: the finitely many ramified primes with
/// their local data. Unlisted primes are unramified.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RamProfile {
    entries: BTreeMap<u64, LocalDatum>,
}

impl RamProfile {
    pub fn new() -> RamProfile {
        RamProfile::default()
    }

    pub fn insert_tame(&mut self, p: u64, ct: CycleType) -> Result<(), DiscError> {
        check_tame(p, &ct)?;
        if ct.is_trivial() {
            return Ok(());
        }
        if self.entries.contains_key(&p) {
            return Err(DiscError::DuplicatePrime { p });
        }
        self.entries.insert(p, LocalDatum::Tame(ct));
        Ok(())
    }

    pub fn insert_wild(&mut self, p: u64, valuation: u64, code: &str) -> Result<(), DiscError> {
        if valuation == 0 {
            return Err(DiscError::ZeroWildValuation { p });
        }
        if self.entries.contains_key(&p) {
            return Err(DiscError::DuplicatePrime { p });
        }
        self.entries.insert(
            p,
            LocalDatum::Wild { valuation, code: code.to_string() },
        );
        Ok(())
    }

    pub fn get(&self, p: u64) -> Option<&LocalDatum> {
        self.entries.get(&p)
    }

    pub fn valuation(&self, p: u64) -> u64 {
        self.entries.get(&p).map_or(0, |d| d.valuation())
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &LocalDatum)> {
        self.entries.iter().map(|(&p, d)| (p, d))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The discriminant magnitude determined by the profile.
    pub fn disc(&self) -> BigUint {
        let mut out = BigUint::one();
        for (&p, datum) in &self.entries {
            out *= BigUint::from(p).pow(datum.valuation() as u32);
        }
        out
    }

    /// Checks every tame cycle type acts on exactly `degree` points.
    pub fn validate_degree(&self, degree: u64) -> Result<(), DiscError> {
        for (&p, datum) in &self.entries {
            if let LocalDatum::Tame(ct) = datum {
                if ct.degree() != degree {
                    return Err(DiscError::DegreeMismatch { p, got: ct.degree(), expected: degree });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RamProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&p, datum) in &self.entries {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{p}:{}", datum.descriptor())?;
        }
        Ok(())
    }
}

impl FromStr for RamProfile {
    type Err = DiscError;

    /// Parses `p:T:<parts>;q:W:<valuation>:<code>`; the empty string is the
    /// everywhere-unramified profile.
    fn from_str(text: &str) -> Result<RamProfile, DiscError> {
        let mut profile = RamProfile::new();
        for entry in text.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let bad = |reason: &str| DiscError::BadProfile {
                text: entry.to_string(),
                reason: reason.to_string(),
            };
            let (p_text, rest) = entry.split_once(':').ok_or_else(|| bad("missing prime"))?;
            let p: u64 = p_text.trim().parse().map_err(|_| bad("bad prime"))?;
            if p < 2 || !crate::arith::is_prime(p) {
                return Err(bad("not a prime"));
            }
            if profile.entries.contains_key(&p) {
                return Err(DiscError::DuplicatePrime { p });
            }
            profile.entries.insert(p, LocalDatum::parse(p, rest)?);
        }
        Ok(profile)
    }
}

/// Exponent of a common tamely ramified prime in the compositum discriminant,
/// from the two inertia cycle types: the index of the embedded pair.
pub fn tame_compositum_exponent(ct_k: &CycleType, ct_l: &CycleType) -> u64 {
    product_ind(ct_k, ct_l)
}

/// Exact exponents for wildly ramified common primes, keyed by
/// (p, descriptor of the left datum, descriptor of the right datum).
#[derive(Clone, Debug, Default)]
pub struct WildTable {
    rows: BTreeMap<(u64, String, String), u64>,
}

impl WildTable {
    pub fn new() -> WildTable {
        WildTable::default()
    }

    pub fn insert(&mut self, p: u64, left: &str, right: &str, exponent: u64) {
        self.rows.insert((p, left.to_string(), right.to_string()), exponent);
    }

    pub fn lookup(&self, p: u64, left: &LocalDatum, right: &LocalDatum) -> Option<u64> {
        self.rows
            .get(&(p, left.descriptor(), right.descriptor()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reads a CSV with header `p,left,right,exponent`; `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<WildTable, DiscError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut table = WildTable::new();
        for (i, record) in csv_reader.records().enumerate() {
            let record = record.map_err(|e| DiscError::BadTable(e.to_string()))?;
            if record.len() != 4 {
                return Err(DiscError::BadTable(format!(
                    "row {}: expected 4 columns, got {}",
                    i + 1,
                    record.len()
                )));
            }
            let p: u64 = record[0]
                .parse()
                .map_err(|_| DiscError::BadTable(format!("row {}: bad prime", i + 1)))?;
            let exponent: u64 = record[3]
                .parse()
                .map_err(|_| DiscError::BadTable(format!("row {}: bad exponent", i + 1)))?;
            table.insert(p, &record[1], &record[2], exponent);
        }
        Ok(table)
    }

    pub fn from_csv_path(path: &Path) -> Result<WildTable, DiscError> {
        let file = std::fs::File::open(path).map_err(|e| DiscError::BadTable(e.to_string()))?;
        WildTable::from_csv_reader(file)
    }
}

/// Lower and upper bounds on a compositum discriminant; equal when every
/// common prime resolves exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscBracket {
    pub lower: BigUint,
    pub upper: BigUint,
}

impl DiscBracket {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Exponent bounds at one prime of the compositum of linearly disjoint fields
/// of degrees n (left) and m (right). Tame common primes are exact; wild ones
/// resolve through the table or fall back to the provable range
/// [max(m v_K, n v_L), m v_K + n v_L].
pub fn compositum_exponent_bounds(
    p: u64,
    left: Option<&LocalDatum>,
    right: Option<&LocalDatum>,
    n: u64,
    m: u64,
    table: Option<&WildTable>,
) -> Result<(u64, u64), DiscError> {
    let v_k = left.map_or(0, |d| d.valuation());
    let v_l = right.map_or(0, |d| d.valuation());
    let floor = (m * v_k).max(n * v_l);
    let ceil = m * v_k + n * v_l;
    match (left, right) {
        (Some(LocalDatum::Tame(ct_k)), Some(LocalDatum::Tame(ct_l))) => {
            let v = tame_compositum_exponent(ct_k, ct_l);
            Ok((v, v))
        }
        (Some(dk), Some(dl)) => {
            if let Some(v) = table.and_then(|t| t.lookup(p, dk, dl)) {
                if v < floor || v > ceil {
                    return Err(DiscError::TableRowOutOfRange {
                        p,
                        left: dk.descriptor(),
                        right: dl.descriptor(),
                        exponent: v,
                        min: floor,
                        max: ceil,
                    });
                }
                return Ok((v, v));
            }
            Ok((floor, ceil))
        }
        // A prime ramified in one field only: the bound pair collapses.
        _ => Ok((floor, ceil)),
    }
}

fn common_and_all_primes(k: &RamProfile, l: &RamProfile) -> Vec<u64> {
    let mut primes: Vec<u64> = k.primes().chain(l.primes()).collect();
    primes.sort_unstable();
    primes.dedup();
    primes
}

/// Discriminant bracket for the compositum of linearly disjoint fields of
/// degrees n and m with the given ramification profiles.
pub fn disc_compositum(
    k: &RamProfile,
    l: &RamProfile,
    n: u64,
    m: u64,
    table: Option<&WildTable>,
) -> Result<DiscBracket, DiscError> {
    let mut lower = BigUint::one();
    let mut upper = BigUint::one();
    for p in common_and_all_primes(k, l) {
        let (lo, hi) = compositum_exponent_bounds(p, k.get(p), l.get(p), n, m, table)?;
        lower *= BigUint::from(p).pow(lo as u32);
        upper *= BigUint::from(p).pow(hi as u32);
    }
    Ok(DiscBracket { lower, upper })
}

/// Y-truncated discriminant: primes up to Y carry their compositum exponent
/// (bracketed if unresolved), primes above Y carry the full product exponent
/// m v_K + n v_L.
pub fn disc_y(
    k: &RamProfile,
    l: &RamProfile,
    n: u64,
    m: u64,
    y: u64,
    table: Option<&WildTable>,
) -> Result<DiscBracket, DiscError> {
    let mut lower = BigUint::one();
    let mut upper = BigUint::one();
    for p in common_and_all_primes(k, l) {
        let (lo, hi) = if p <= y {
            compositum_exponent_bounds(p, k.get(p), l.get(p), n, m, table)?
        } else {
            let v = m * k.valuation(p) + n * l.valuation(p);
            (v, v)
        };
        lower *= BigUint::from(p).pow(lo as u32);
        upper *= BigUint::from(p).pow(hi as u32);
    }
    Ok(DiscBracket { lower, upper })
}

/// Discriminant defect of the pair: Disc(K)^m Disc(L)^n / Disc(KL), a
/// positive integer supported on the common ramified primes. Errors when a
/// common wild prime has no table row.
pub fn d_pi(
    k: &RamProfile,
    l: &RamProfile,
    n: u64,
    m: u64,
    table: Option<&WildTable>,
) -> Result<BigUint, DiscError> {
    let mut out = BigUint::one();
    for p in common_and_all_primes(k, l) {
        let (lo, hi) = compositum_exponent_bounds(p, k.get(p), l.get(p), n, m, table)?;
        if lo != hi {
            return Err(DiscError::UnresolvedWildPrime { p });
        }
        let product_exp = m * k.valuation(p) + n * l.valuation(p);
        assert!(hi <= product_exp, "compositum exponent exceeds the product bound");
        out *= BigUint::from(p).pow((product_exp - hi) as u32);
    }
    Ok(out)
}
