//! Finite nilpotent groups given by multiplication tables: validation,
//! element orders, conjugacy classes, and regular-representation index
//! statistics.

use num_rational::Ratio;
use serde::Deserialize;
use std::path::Path;

use crate::arith::{factorize, p_part, smallest_prime_divisor};
use crate::error::GroupError;
use crate::perm::CycleType;

/// A finite nilpotent group presented by its full multiplication table.
/// Element 0 is the identity. Construction verifies the group axioms and a
/// nilpotency certificate (for each prime p, the p-elements are closed under
/// multiplication and exactly fill the p-part of the order), so every value
/// of this type is a genuine nilpotent group.
#[derive(Clone)]
pub struct CayleyGroup {
    order: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    orders: Vec<u64>,
    label: String,
}

impl CayleyGroup {
    /// Validates a multiplication table (Latin square, identity 0,
    /// associativity via Light's test, nilpotency certificate).
    pub fn from_table(table: &[Vec<usize>], label: &str) -> Result<CayleyGroup, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::EmptyGroup);
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != order {
                return Err(GroupError::RaggedTable { row, len: r.len(), order });
            }
            for (col, &value) in r.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange { row, col, value, order });
                }
            }
        }
        for (row, r) in table.iter().enumerate() {
            let mut seen = vec![false; order];
            for &value in r {
                if seen[value] {
                    return Err(GroupError::RowNotPermutation { row });
                }
                seen[value] = true;
            }
        }
        for col in 0..order {
            let mut seen = vec![false; order];
            for r in table {
                if seen[r[col]] {
                    return Err(GroupError::ColNotPermutation { col });
                }
                seen[r[col]] = true;
            }
        }
        for (i, row) in table.iter().enumerate() {
            if table[0][i] != i || row[0] != i {
                return Err(GroupError::NoIdentity);
            }
        }

        let flat: Vec<u32> = table.iter().flatten().map(|&v| v as u32).collect();
        let mul = |a: usize, b: usize| flat[a * order + b] as usize;

        // Light's associativity test: it suffices to check triples whose middle
        // element generates, so grow a generating set by closure.
        let mut generated = vec![false; order];
        generated[0] = true;
        let mut generated_list = vec![0usize];
        let mut generators = Vec::new();
        for cand in 1..order {
            if generated[cand] {
                continue;
            }
            generators.push(cand);
            let mut frontier = vec![cand];
            generated[cand] = true;
            generated_list.push(cand);
            while let Some(x) = frontier.pop() {
                for i in 0..generated_list.len() {
                    let y = generated_list[i];
                    for z in [mul(x, y), mul(y, x)] {
                        if !generated[z] {
                            generated[z] = true;
                            generated_list.push(z);
                            frontier.push(z);
                        }
                    }
                }
            }
        }
        for &g in &generators {
            for a in 0..order {
                let ag = mul(a, g);
                for b in 0..order {
                    if mul(ag, b) != mul(a, mul(g, b)) {
                        return Err(GroupError::NotAssociative { a, b, c: g });
                    }
                }
            }
        }

        let group = CayleyGroup::from_valid_parts(order, flat, label.to_string());
        group.verify_nilpotent()?;
        Ok(group)
    }

    fn from_valid_parts(order: usize, table: Vec<u32>, label: String) -> CayleyGroup {
        let mut inv = vec![0u32; order];
        for a in 0..order {
            for b in 0..order {
                if table[a * order + b] == 0 {
                    inv[a] = b as u32;
                }
            }
        }
        let mut orders = vec![1u64; order];
        for a in 1..order {
            let mut x = a;
            let mut ord = 1u64;
            while x != 0 {
                x = table[x * order + a] as usize;
                ord += 1;
            }
            orders[a] = ord;
        }
        CayleyGroup { order, table, inv, orders, label }
    }

    fn verify_nilpotent(&self) -> Result<(), GroupError> {
        for (p, _) in factorize(self.order as u64) {
            let want = p_part(self.order as u64, p);
            let members: Vec<usize> = (0..self.order)
                .filter(|&a| {
                    let mut e = self.orders[a];
                    while e.is_multiple_of(p) {
                        e /= p;
                    }
                    e == 1
                })
                .collect();
            if members.len() as u64 != want {
                return Err(GroupError::NotNilpotent {
                    reason: format!(
                        "{} elements of {p}-power order, expected {want}",
                        members.len()
                    ),
                });
            }
            let mut is_member = vec![false; self.order];
            for &a in &members {
                is_member[a] = true;
            }
            for &a in &members {
                for &b in &members {
                    if !is_member[self.mul(a, b)] {
                        return Err(GroupError::NotNilpotent {
                            reason: format!(
                                "product of two {p}-power-order elements has mixed order"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Cyclic group of order k, elements 0..k with addition mod k.
    pub fn cyclic(k: usize) -> CayleyGroup {
        assert!(k >= 1);
        let mut table = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                table.push(((a + b) % k) as u32);
            }
        }
        CayleyGroup::from_valid_parts(k, table, format!("C{k}"))
    }

    /// Direct product; element (a, b) is stored as a * |H| + b.
    pub fn direct_product(&self, other: &CayleyGroup) -> CayleyGroup {
        let (n, m) = (self.order, other.order);
        let mut table = Vec::with_capacity(n * m * n * m);
        for a1 in 0..n {
            for b1 in 0..m {
                for a2 in 0..n {
                    for b2 in 0..m {
                        table.push((self.mul(a1, a2) * m + other.mul(b1, b2)) as u32);
                    }
                }
            }
        }
        CayleyGroup::from_valid_parts(n * m, table, format!("{}x{}", self.label, other.label))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, mut k: u64) -> usize {
        k %= self.orders[a];
        let mut acc = 0usize;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn order_of(&self, a: usize) -> u64 {
        self.orders[a]
    }

    /// Distinct element orders, increasing.
    pub fn element_orders(&self) -> Vec<u64> {
        let mut orders = self.orders.clone();
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Conjugacy classes as (representative, members); representative is the
    /// smallest member, classes sorted by representative.
    pub fn conj_classes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes = Vec::new();
        for a in 0..self.order {
            if class_of[a] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for g in 0..self.order {
                let conj = self.mul(self.mul(g, a), self.inv(g));
                if class_of[conj] == usize::MAX {
                    class_of[conj] = id;
                    members.push(conj);
                }
            }
            members.sort_unstable();
            classes.push((members[0], members));
        }
        classes
    }

    /// Smallest prime dividing the order.
    pub fn smallest_prime(&self) -> u64 {
        smallest_prime_divisor(self.order as u64).expect("nontrivial group")
    }

    /// Number of elements whose order is the smallest prime divisor.
    pub fn min_order_element_count(&self) -> u64 {
        let ell = self.smallest_prime();
        self.orders.iter().filter(|&&e| e == ell).count() as u64
    }

    /// min-order element count divided by (smallest prime - 1); the power map
    /// g -> g^c partitions those elements into generator sets of that size,
    /// so the ratio is an integer.
    pub fn min_order_orbit_count(&self) -> u64 {
        let ell = self.smallest_prime();
        let count = self.min_order_element_count();
        assert_eq!(count % (ell - 1), 0);
        count / (ell - 1)
    }

    /// Index of an element of order e in the regular representation:
    /// |G| - |G|/e, from |G|/e cycles of length e.
    pub fn ind_regular_of_order(&self, e: u64) -> u64 {
        assert_eq!(self.order as u64 % e, 0, "element order must divide the group order");
        self.order as u64 - self.order as u64 / e
    }

    pub fn ind_regular(&self, a: usize) -> u64 {
        self.ind_regular_of_order(self.orders[a])
    }

    /// Cycle type of an element of order e in the regular representation.
    pub fn regular_cycle_type_of_order(&self, e: u64) -> CycleType {
        assert_eq!(self.order as u64 % e, 0);
        let copies = self.order as u64 / e;
        CycleType::new(vec![e as u32; copies as usize]).unwrap()
    }

    /// Leading density exponent of the regular representation:
    /// l / ((l - 1) |G|) for l the smallest prime divisor.
    pub fn a_regular(&self) -> Ratio<u64> {
        let ell = self.smallest_prime();
        Ratio::new(ell, (ell - 1) * self.order as u64)
    }
}

impl std::fmt::Debug for CayleyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CayleyGroup({}, order {})", self.label, self.order)
    }
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    table: Vec<Vec<usize>>,
}

/// Loads a group from a JSON file `{"order": n, "table": [[..], ..]}` with
/// 0-indexed elements and identity 0.
pub fn load_group_file(path: &Path) -> Result<CayleyGroup, GroupError> {
    let text = std::fs::read_to_string(path).map_err(|e| GroupError::BadSpec {
        spec: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let file: GroupFile = serde_json::from_str(&text).map_err(|e| GroupError::BadSpec {
        spec: path.display().to_string(),
        reason: e.to_string(),
    })?;
    if file.table.len() != file.order {
        return Err(GroupError::BadSpec {
            spec: path.display().to_string(),
            reason: format!("declared order {} but table has {} rows", file.order, file.table.len()),
        });
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_string());
    CayleyGroup::from_table(&file.table, &label)
}

/// Parses a group spec: `C<k>` for cyclic, factors joined by `x` for direct
/// products (`C3xC9`), or `@path.json` for a multiplication-table file.
pub fn parse_group_spec(spec: &str) -> Result<CayleyGroup, GroupError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return load_group_file(Path::new(path));
    }
    let mut acc: Option<CayleyGroup> = None;
    for atom in spec.split('x') {
        let atom = atom.trim();
        let k: usize = atom
            .strip_prefix('C')
            .and_then(|digits| digits.parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| GroupError::BadSpec {
                spec: spec.to_string(),
                reason: format!("expected C<k>, got {atom:?}"),
            })?;
        let factor = CayleyGroup::cyclic(k);
        acc = Some(match acc {
            None => factor,
            Some(g) => g.direct_product(&factor),
        });
    }
    acc.ok_or_else(|| GroupError::BadSpec {
        spec: spec.to_string(),
        reason: "empty spec".to_string(),
    })
}

/// All abelian groups of odd order in [3, bound], as direct products of
/// prime-power cyclic factors, ordered by group order.
pub fn odd_abelian_groups_up_to(bound: u64) -> Vec<CayleyGroup> {
    let mut out = Vec::new();
    let mut n = 3u64;
    while n <= bound {
        for factors in abelian_factor_lists(n) {
            let mut group = CayleyGroup::cyclic(factors[0] as usize);
            for &f in &factors[1..] {
                group = group.direct_product(&CayleyGroup::cyclic(f as usize));
            }
            out.push(group);
        }
        n += 2;
    }
    out
}

/// Cyclic factor lists (prime-power orders, largest first per prime) of the
/// abelian groups of order n, one list per isomorphism class.
fn abelian_factor_lists(n: u64) -> Vec<Vec<u64>> {
    let mut lists: Vec<Vec<u64>> = vec![vec![]];
    for (p, a) in factorize(n) {
        let parts = partitions(a);
        let mut next = Vec::new();
        for base in &lists {
            for partition in &parts {
                let mut ext = base.clone();
                for &k in partition {
                    ext.push(p.pow(k));
                }
                next.push(ext);
            }
        }
        lists = next;
    }
    lists
}

fn partitions(a: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(a, a, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{generate_group, symmetric_gens, DEFAULT_GROUP_CAP};

    #[test]
    fn cyclic_basics() {
        let g = CayleyGroup::cyclic(9);
        assert_eq!(g.order(), 9);
        assert_eq!(g.order_of(3), 3);
        assert_eq!(g.order_of(2), 9);
        assert_eq!(g.element_orders(), vec![1, 3, 9]);
        assert_eq!(g.smallest_prime(), 3);
        assert_eq!(g.min_order_element_count(), 2);
        assert_eq!(g.min_order_orbit_count(), 1);
        assert_eq!(g.pow(2, 5), 10 % 9);
        assert_eq!(g.inv(4), 5);
    }

    #[test]
    fn regular_representation_index() {
        let g = CayleyGroup::cyclic(15);
        assert_eq!(g.ind_regular_of_order(3), 10);
        assert_eq!(g.ind_regular_of_order(5), 12);
        assert_eq!(g.ind_regular_of_order(15), 14);
        assert_eq!(g.regular_cycle_type_of_order(5).parts(), &[5, 5, 5]);
        assert_eq!(g.a_regular(), Ratio::new(3, 30));
    }

    #[test]
    fn regular_index_matches_actual_regular_permutation() {
        let g = CayleyGroup::cyclic(12);
        for a in 0..12 {
            let images: Vec<u32> = (0..12).map(|b| g.mul(a, b) as u32).collect();
            let p = crate::perm::Perm::from_images(images).unwrap();
            assert_eq!(p.ind(), g.ind_regular(a));
            assert_eq!(p.order(), g.order_of(a));
        }
    }

    #[test]
    fn product_group_orders() {
        let g = parse_group_spec("C3xC9").unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(g.element_orders(), vec![1, 3, 9]);
        assert_eq!(g.min_order_element_count(), 8);
        assert_eq!(g.min_order_orbit_count(), 4);
        assert!(g.is_abelian());
    }

    #[test]
    fn table_round_trip_via_validation() {
        let g = parse_group_spec("C5xC7").unwrap();
        let table: Vec<Vec<usize>> = (0..35)
            .map(|a| (0..35).map(|b| g.mul(a, b)).collect())
            .collect();
        let rebuilt = CayleyGroup::from_table(&table, "rebuilt").unwrap();
        assert_eq!(rebuilt.order(), 35);
        assert_eq!(rebuilt.element_orders(), vec![1, 5, 7, 35]);
    }

    #[test]
    fn s3_table_is_rejected_as_not_nilpotent() {
        let group = generate_group(&symmetric_gens(3), DEFAULT_GROUP_CAP).unwrap();
        let elems = group.elements();
        let pos = |p: &crate::perm::Perm| elems.iter().position(|q| q == p).unwrap();
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| pos(&a.compose(b))).collect())
            .collect();
        match CayleyGroup::from_table(&table, "s3") {
            Err(GroupError::NotNilpotent { .. }) => {}
            other => panic!("expected NotNilpotent, got {other:?}"),
        }
    }

    #[test]
    fn broken_tables_are_rejected() {
        let mut table: Vec<Vec<usize>> = (0..3usize)
            .map(|a| (0..3).map(|b| (a + b) % 3).collect())
            .collect();
        table[2][2] = 0;
        assert!(matches!(
            CayleyGroup::from_table(&table, "bad"),
            Err(GroupError::RowNotPermutation { .. })
        ));

        let shifted: Vec<Vec<usize>> = (0..3usize)
            .map(|a| (0..3).map(|b| (a + b + 1) % 3).collect())
            .collect();
        assert!(matches!(
            CayleyGroup::from_table(&shifted, "bad"),
            Err(GroupError::NoIdentity) | Err(GroupError::ColNotPermutation { .. })
        ));
    }

    #[test]
    fn conjugacy_classes_of_abelian_group_are_singletons() {
        let g = CayleyGroup::cyclic(7);
        let classes = g.conj_classes();
        assert_eq!(classes.len(), 7);
        assert!(classes.iter().all(|(_, m)| m.len() == 1));
    }

    #[test]
    fn heisenberg_mod_3_is_accepted_and_has_eleven_classes() {
        // Upper unitriangular 3x3 matrices over F_3: nonabelian of order 27,
        // exponent 3; elements encoded as (a, b, c) -> a + 3b + 9c with
        // (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
        let enc = |a: usize, b: usize, c: usize| a + 3 * b + 9 * c;
        let mut table = vec![vec![0usize; 27]; 27];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for a2 in 0..3 {
                        for b2 in 0..3 {
                            for c2 in 0..3 {
                                table[enc(a, b, c)][enc(a2, b2, c2)] =
                                    enc((a + a2) % 3, (b + b2) % 3, (c + c2 + a * b2) % 3);
                            }
                        }
                    }
                }
            }
        }
        let g = CayleyGroup::from_table(&table, "heis3").unwrap();
        assert_eq!(g.order(), 27);
        assert!(!g.is_abelian());
        assert_eq!(g.element_orders(), vec![1, 3]);
        assert_eq!(g.conj_classes().len(), 11);
        assert_eq!(g.min_order_element_count(), 26);
        assert_eq!(g.min_order_orbit_count(), 13);
    }

    #[test]
    fn odd_abelian_enumeration_counts() {
        let groups = odd_abelian_groups_up_to(30);
        // orders 3,5,7,9(x2),11,13,15,17,19,21,23,25(x2),27(x3),29
        assert_eq!(groups.len(), 18);
        assert!(groups.iter().all(|g| g.order() % 2 == 1 && g.is_abelian()));
        let order27: Vec<_> = groups.iter().filter(|g| g.order() == 27).collect();
        assert_eq!(order27.len(), 3);
    }

    #[test]
    fn group_file_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c3.json");
        std::fs::write(&path, r#"{"order":3,"table":[[0,1,2],[1,2,0],[2,0,1]]}"#).unwrap();
        let g = load_group_file(&path).unwrap();
        assert_eq!(g.order(), 3);
        let spec = format!("@{}", path.display());
        assert_eq!(parse_group_spec(&spec).unwrap().order(), 3);
    }
}
