//! Field corpora over the rationals: the cubic census as queryable records,
//! CSV ingestion with per-row validation, the totally-ramified count M_{3,q},
//! and the pairing harness that brackets compositum discriminants of a
//! non-cyclic cubic against a cyclic companion.

use std::io::{Read, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Roots;
use rayon::prelude::*;

use crate::arith;
use crate::cubic::{self, CubicForm, DiscSign, EnumOptions};
use crate::cyclic::{self, CyclicField};
use crate::disc::{disc_compositum, disc_y, DiscBracket, RamProfile, WildTable};
use crate::error::{CorpusError, FieldError};

/// One cubic field: enumerated records carry their reduced form, ingested
/// ones only the data the queries need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicRecord {
    pub form: Option<CubicForm>,
    pub disc: i64,
    pub cyclic: bool,
    pub ram: RamProfile,
}

/// Cubic fields with |disc| <= bound, sorted by (|disc|, sign, form key).
#[derive(Clone, Debug)]
pub struct CubicCorpus {
    records: Vec<CubicRecord>,
    bound: u64,
}

impl CubicCorpus {
    pub fn enumerate(max_abs_disc: u64, opts: &EnumOptions) -> Result<CubicCorpus, FieldError> {
        let mut records = Vec::new();
        for sign in [DiscSign::Negative, DiscSign::Positive] {
            for class in cubic::enumerate_cubic(max_abs_disc, sign, opts)? {
                records.push(CubicRecord {
                    form: Some(class.form),
                    disc: class.disc,
                    cyclic: cubic::is_cyclic_disc(class.disc as i128),
                    ram: cubic::ram_profile(&class.form),
                });
            }
        }
        sort_records(&mut records);
        Ok(CubicCorpus { records, bound: max_abs_disc })
    }

    pub fn from_records(mut records: Vec<CubicRecord>, bound: u64) -> CubicCorpus {
        sort_records(&mut records);
        CubicCorpus { records, bound }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn records(&self) -> &[CubicRecord] {
        &self.records
    }

    fn check_covers(&self, x: u64) -> Result<(), FieldError> {
        if x > self.bound {
            Err(FieldError::InsufficientCorpus { have: self.bound, need: x })
        } else {
            Ok(())
        }
    }

    /// Non-cyclic cubic fields with |disc| <= x.
    pub fn noncyclic_count(&self, x: u64) -> Result<u64, FieldError> {
        self.check_covers(x)?;
        Ok(self
            .records
            .iter()
            .filter(|r| !r.cyclic && r.disc.unsigned_abs() <= x)
            .count() as u64)
    }

    /// M_{3,q}(X): non-cyclic cubic fields with |disc| <= x totally ramified
    /// at every prime dividing q; q must be squarefree.
    pub fn m3q(&self, q: u64, x: u64) -> Result<u64, FieldError> {
        self.check_covers(x)?;
        let factors = arith::factorize(q);
        if q == 0 || factors.iter().any(|&(_, e)| e > 1) {
            return Err(FieldError::NotSquarefree { q });
        }
        Ok(self
            .records
            .iter()
            .filter(|r| {
                !r.cyclic
                    && r.disc.unsigned_abs() <= x
                    && factors.iter().all(|&(p, _)| totally_ramified_at(&r.ram, p))
            })
            .count() as u64)
    }
}

fn sort_records(records: &mut [CubicRecord]) {
    records.sort_by_key(|r| {
        (r.disc.unsigned_abs(), r.disc.signum(), r.form.map(|f| f.key()))
    });
}

/// A prime is totally ramified in a cubic field when its tame cycle type is
/// a single 3-cycle or its wild inertia already fills the degree.
pub fn totally_ramified_at(ram: &RamProfile, p: u64) -> bool {
    use crate::disc::LocalDatum;
    match ram.get(p) {
        Some(LocalDatum::Tame(ct)) => ct.parts() == [3],
        Some(LocalDatum::Wild { code, .. }) => code == "c3t",
        None => false,
    }
}

const FIELD_TABLE_SCHEMA: &str = "# mallestat-field-table v1";

/// Writes `degree,disc,ram` rows under a schema-version comment line.
pub fn write_field_table<W: Write>(out: W, corpus: &CubicCorpus) -> Result<(), CorpusError> {
    write_field_table_with_config(out, corpus, None)
}

/// Like [`write_field_table`], but threads an optional configuration echo
/// into a second comment line so the artifact records how it was produced.
pub fn write_field_table_with_config<W: Write>(
    mut out: W,
    corpus: &CubicCorpus,
    config: Option<&str>,
) -> Result<(), CorpusError> {
    let io = |e: std::io::Error| CorpusError::Io(e.to_string());
    writeln!(out, "{FIELD_TABLE_SCHEMA}").map_err(io)?;
    if let Some(config) = config {
        writeln!(out, "# config: {config}").map_err(io)?;
    }
    writeln!(out, "degree,disc,ram").map_err(io)?;
    for r in &corpus.records {
        writeln!(out, "3,{},{}", r.disc, r.ram).map_err(io)?;
    }
    Ok(())
}

/// Reads a `degree,disc,ram` table back into a corpus, validating each row:
/// the profile must parse, its discriminant must reproduce |disc|, tame
/// types must act on `degree` points, and wild inertia is only possible at
/// primes up to the degree. Row numbers count data rows from 1.
pub fn ingest_field_table<R: Read>(reader: R) -> Result<CubicCorpus, CorpusError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|e| CorpusError::Io(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["degree", "disc", "ram"] {
        return Err(CorpusError::Io(format!(
            "expected header degree,disc,ram, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    let mut bound = 0u64;
    for (i, record) in csv_reader.records().enumerate() {
        let row = i + 1;
        let bad = |reason: String| CorpusError::BadRow { row, reason };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 3 {
            return Err(bad(format!("expected 3 columns, got {}", record.len())));
        }
        let degree: u64 = record[0].parse().map_err(|_| bad("bad degree".into()))?;
        if degree != 3 {
            return Err(bad(format!("degree {degree} is not supported, only 3")));
        }
        let disc: i64 = record[1].parse().map_err(|_| bad("bad disc".into()))?;
        if disc == 0 {
            return Err(bad("disc must be nonzero".into()));
        }
        let ram: RamProfile = record[2].parse().map_err(|e| bad(format!("{e}")))?;
        validate_cubic_row(disc, &ram).map_err(bad)?;
        records.push(CubicRecord {
            form: None,
            disc,
            cyclic: cubic::is_cyclic_disc(disc as i128),
            ram,
        });
        bound = bound.max(disc.unsigned_abs());
    }
    if records.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(CubicCorpus::from_records(records, bound))
}

pub fn ingest_field_table_path(path: &Path) -> Result<CubicCorpus, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::Io(e.to_string()))?;
    ingest_field_table(file)
}

fn validate_cubic_row(disc: i64, ram: &RamProfile) -> Result<(), String> {
    ram.validate_degree(3).map_err(|e| e.to_string())?;
    if ram.disc() != BigUint::from(disc.unsigned_abs()) {
        return Err(format!("profile discriminant {} does not match |{disc}|", ram.disc()));
    }
    for p in ram.primes() {
        use crate::disc::LocalDatum;
        match ram.get(p) {
            Some(LocalDatum::Wild { .. }) if p > 3 => {
                return Err(format!(
                    "wild inertia at p={p} exceeds the degree; tame valuation is at most 2"
                ));
            }
            Some(LocalDatum::Tame(_)) if p <= 3 => {
                // fine: 2 and 3 may still ramify tamely
            }
            _ => {}
        }
    }
    Ok(())
}

/// One sampled bound of the pairing harness. lower_count <= true count <=
/// upper_count; the gap is the number of pairs whose bracket straddles x.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCountRow {
    pub x: u128,
    pub lower_count: u64,
    pub upper_count: u64,
}

impl PairCountRow {
    pub fn gap(&self) -> u64 {
        self.upper_count - self.lower_count
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap() as f64 / self.lower_count.max(1) as f64
    }
}

/// One candidate pair with its compositum discriminant bracket.
#[derive(Clone, Debug)]
pub struct FieldPair {
    pub cubic: CubicRecord,
    pub companion: CyclicField,
    pub bracket: DiscBracket,
}

/// Largest bound the pairing harness accepts; its cubic window x^(1/3)
/// stays well inside the form enumerator's range.
pub const PAIR_X_CAP: u128 = 10u128.pow(16);

/// All pairs (non-cyclic cubic K, cyclic degree-ell L) whose bracket lower
/// end is at most x, with their brackets, sorted by that lower end. Every
/// exponent bound at a common prime sits above the tower floor
/// max(ell*v_K, 3*v_L), so the lower end dominates both Disc(K)^ell and
/// Disc(L)^3 as well as their geometric mean; the scan windows below are
/// exactly those three consequences:
///   Disc(K) <= x^(1/ell), Disc(L) <= x^(1/3),
///   and per companion Disc(K)^ell * Disc(L)^3 <= x^2.
pub fn pair_corpus(
    ell: u64,
    x: u128,
    table: Option<&WildTable>,
) -> Result<Vec<FieldPair>, FieldError> {
    if x > PAIR_X_CAP {
        return Err(FieldError::BoundExceedsCap { bound: x, cap: PAIR_X_CAP });
    }
    let corpus = CubicCorpus::enumerate(
        x.nth_root(ell as u32) as u64,
        &EnumOptions { cap: cubic::MAX_ENUM_BOUND, ..EnumOptions::default() },
    )?;
    let cubics: Vec<&CubicRecord> = corpus.records.iter().filter(|r| !r.cyclic).collect();
    let companions = cyclic::enumerate_cyclic(ell, x.nth_root(3))?;
    let x_sq = BigUint::from(x) * BigUint::from(x);
    let mut pairs = companions
        .par_iter()
        .map(|l| {
            let dl_cubed = BigUint::from(l.disc).pow(3);
            let mut rows = Vec::new();
            for k in &cubics {
                let dk = BigUint::from(k.disc.unsigned_abs()).pow(ell as u32);
                if &dk * &dl_cubed > x_sq {
                    break;
                }
                let bracket = disc_compositum(&k.ram, &l.ram, 3, ell, table)
                    .expect("profiles from the enumerators always bracket");
                if bracket.lower <= BigUint::from(x) {
                    rows.push(FieldPair {
                        cubic: (*k).clone(),
                        companion: l.clone(),
                        bracket,
                    });
                }
            }
            rows
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect::<Vec<FieldPair>>();
    pairs.sort_by(|a, b| {
        (&a.bracket.lower, a.cubic.disc.unsigned_abs(), a.companion.disc)
            .cmp(&(&b.bracket.lower, b.cubic.disc.unsigned_abs(), b.companion.disc))
    });
    Ok(pairs)
}

/// Bracketed pair counts at each sampled bound: pairs whose bracket upper
/// end fits give lower_count, pairs whose lower end fits give upper_count.
pub fn count_pairs(
    ell: u64,
    xs: &[u128],
    table: Option<&WildTable>,
) -> Result<Vec<PairCountRow>, FieldError> {
    let Some(&x_max) = xs.iter().max() else {
        return Ok(Vec::new());
    };
    let pairs = pair_corpus(ell, x_max, table)?;
    Ok(xs
        .iter()
        .map(|&x| {
            let big = BigUint::from(x);
            let lower_count =
                pairs.iter().filter(|p| p.bracket.upper <= big).count() as u64;
            let upper_count =
                pairs.iter().filter(|p| p.bracket.lower <= big).count() as u64;
            PairCountRow { x, lower_count, upper_count }
        })
        .collect())
}

/// Truncated-discriminant brackets for one pair over a range of cutoffs.
pub fn pair_disc_y(
    pair: &FieldPair,
    ell: u64,
    y: u64,
    table: Option<&WildTable>,
) -> DiscBracket {
    disc_y(&pair.cubic.ram, &pair.companion.ram, 3, ell, y, table)
        .expect("profiles from the enumerators always bracket")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(bound: u64) -> CubicCorpus {
        CubicCorpus::enumerate(bound, &EnumOptions::default()).unwrap()
    }

    #[test]
    fn smallest_field_is_the_only_one_below_25() {
        let c = corpus(25);
        assert_eq!(c.records().len(), 1);
        assert_eq!(c.records()[0].disc, -23);
        assert!(!c.records()[0].cyclic);
    }

    #[test]
    fn cyclic_flags_below_100() {
        let c = corpus(100);
        let cyclics: Vec<i64> =
            c.records().iter().filter(|r| r.cyclic).map(|r| r.disc).collect();
        assert_eq!(cyclics, vec![49, 81]);
    }

    #[test]
    fn signature_split_and_cyclic_square_test() {
        let c = corpus(20_000);
        for r in c.records() {
            let m = r.disc.rem_euclid(4);
            assert!(m == 0 || m == 1, "disc {} mod 4 = {m}", r.disc);
            assert_ne!(r.disc, 0);
            assert_eq!(r.cyclic, cubic::is_cyclic_disc(r.disc as i128));
            if r.cyclic {
                let root = (r.disc as u64).sqrt();
                assert_eq!((root * root) as i64, r.disc);
            }
        }
    }

    #[test]
    fn m3q_examples() {
        let c = corpus(10_000);
        assert_eq!(c.m3q(1, 10_000).unwrap(), c.noncyclic_count(10_000).unwrap());
        // v_23(-23) = 1: partially ramified, not counted
        assert_eq!(c.m3q(23, 23).unwrap(), 0);
        // every 7-totally-ramified field has 49 | disc
        let at_7 = c.m3q(7, 10_000).unwrap();
        assert!(at_7 > 0);
        let by_valuation = c
            .records()
            .iter()
            .filter(|r| !r.cyclic && r.disc.unsigned_abs() <= 10_000 && r.disc % 49 == 0)
            .count() as u64;
        assert_eq!(at_7, by_valuation);
        assert!(matches!(c.m3q(12, 100), Err(FieldError::NotSquarefree { q: 12 })));
        assert!(matches!(
            c.m3q(7, 20_000),
            Err(FieldError::InsufficientCorpus { have: 10_000, need: 20_000 })
        ));
    }

    #[test]
    fn table_round_trip_preserves_queries() {
        let c = corpus(5_000);
        let mut buf = Vec::new();
        write_field_table(&mut buf, &c).unwrap();
        let re = ingest_field_table(&buf[..]).unwrap();
        assert_eq!(re.records().len(), c.records().len());
        let covered = re.bound();
        for q in [1u64, 7, 13, 91] {
            assert_eq!(re.m3q(q, covered).unwrap(), c.m3q(q, covered).unwrap(), "q = {q}");
        }
        assert_eq!(re.noncyclic_count(3_000).unwrap(), c.noncyclic_count(3_000).unwrap());
    }

    #[test]
    fn ingest_rejects_bad_rows() {
        let reject = |body: &str| {
            let text = format!("{FIELD_TABLE_SCHEMA}\ndegree,disc,ram\n{body}\n");
            ingest_field_table(text.as_bytes())
        };
        // tame valuation bound: v_5 = 3 needs wild inertia at 5, impossible in degree 3
        assert!(matches!(
            reject("3,-500,5:W:3:c5x"),
            Err(CorpusError::BadRow { row: 1, .. })
        ));
        // profile disc disagrees with the disc column
        assert!(matches!(
            reject("3,-24,23:T:2+1"),
            Err(CorpusError::BadRow { row: 1, .. })
        ));
        // tame type on the wrong number of points
        assert!(matches!(
            reject("3,-23,23:T:2+1+1"),
            Err(CorpusError::BadRow { row: 1, .. })
        ));
        // quartic rows are not accepted
        assert!(matches!(
            reject("4,-23,23:T:2+1"),
            Err(CorpusError::BadRow { row: 1, .. })
        ));
        let good = reject("3,-23,23:T:2+1").unwrap();
        assert_eq!(good.records().len(), 1);
        assert!(matches!(reject(""), Err(CorpusError::Empty)));
    }

    #[test]
    fn truncated_external_table_agrees_on_overlap() {
        let c = corpus(2_000);
        let mut buf = Vec::new();
        write_field_table(&mut buf, &corpus(1_000)).unwrap();
        let external = ingest_field_table(&buf[..]).unwrap();
        let expected = corpus(1_000)
            .records()
            .iter()
            .map(|r| r.disc.unsigned_abs())
            .max()
            .unwrap();
        assert_eq!(external.bound(), expected);
        for q in [1u64, 7, 13] {
            assert_eq!(external.m3q(q, 900).unwrap(), c.m3q(q, 900).unwrap());
        }
    }

    #[test]
    fn pair_census_at_the_small_end() {
        // the smallest pair of factor discriminants, 23 and 49, shares no
        // prime, so its bracket collapses to 23^3 * 7^6; but pairs totally
        // tamely ramified at a shared prime resolve lower: disc -588 =
        // -2^2*3*7^2 against the conductor-7 companion saves 7^6 exactly
        // (the shared 7-exponent is 6, not 12) and is the least resolved
        // compositum discriminant. Wild-at-3 pairs straddle even lower
        // values, so lower and upper counts split well before 23^3 * 7^6.
        let disjoint_min: u128 = 23u128.pow(3) * 7u128.pow(6);
        assert_eq!(disjoint_min, 1_431_435_383);
        let resolved_min: u128 = 2u128.pow(6) * 3u128.pow(3) * 7u128.pow(6);
        assert_eq!(resolved_min, 203_297_472);
        let rows = count_pairs(
            3,
            &[10_000_000, resolved_min - 1, resolved_min, disjoint_min],
            None,
        )
        .unwrap();
        assert_eq!((rows[0].lower_count, rows[0].upper_count), (0, 0));
        assert_eq!(rows[1].lower_count, 0);
        assert_eq!(rows[2].lower_count, 1);
        assert_eq!(rows[3].lower_count, 6);
        for r in &rows {
            assert!(r.lower_count <= r.upper_count);
        }

        let pairs = pair_corpus(3, disjoint_min, None).unwrap();
        let first_exact = pairs.iter().find(|p| p.bracket.is_exact()).unwrap();
        assert_eq!(first_exact.bracket.lower, BigUint::from(resolved_min));
        assert_eq!(first_exact.cubic.disc, -588);
        assert_eq!(first_exact.companion.conductor, 7);
        let disjoint = pairs
            .iter()
            .find(|p| p.cubic.ram.primes().all(|q| p.companion.ram.get(q).is_none()))
            .unwrap();
        assert_eq!(disjoint.cubic.disc, -23);
        assert_eq!(disjoint.companion.conductor, 7);
        assert_eq!(disjoint.bracket.upper, BigUint::from(disjoint_min));
    }

    #[test]
    fn disjoint_ramification_collapses_brackets() {
        let pairs = pair_corpus(3, 10u128.pow(10), None).unwrap();
        assert!(!pairs.is_empty());
        for p in &pairs {
            let common: Vec<u64> = p
                .cubic
                .ram
                .primes()
                .filter(|&q| p.companion.ram.get(q).is_some())
                .collect();
            if common.is_empty() {
                assert!(p.bracket.is_exact());
                let expect = BigUint::from(p.cubic.disc.unsigned_abs()).pow(3)
                    * BigUint::from(p.companion.disc).pow(3);
                assert_eq!(p.bracket.lower, expect);
            } else {
                assert!(p.bracket.lower <= p.bracket.upper);
            }
        }
        let bracketed = pairs.iter().filter(|p| !p.bracket.is_exact()).count();
        assert!(bracketed > 0, "expected some 3-ramified companions to straddle");
    }

    #[test]
    fn pair_counts_are_monotone_and_bracketed() {
        let xs: Vec<u128> = vec![2 * 10u128.pow(9), 10u128.pow(10), 10u128.pow(11)];
        let rows = count_pairs(3, &xs, None).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].lower_count <= w[1].lower_count);
            assert!(w[0].upper_count <= w[1].upper_count);
        }
        for r in &rows {
            assert!(r.lower_count <= r.upper_count);
        }
        assert!(rows[2].lower_count > rows[0].lower_count);
    }
}
