//! Density invariants for counting field extensions by discriminant: minimal
//! permutation indices, orbit counts under the power action, the index-gap
//! inequalities that isolate the leading term for degree 3-5 products, and
//! the delta margin controlling the error-term sums.

use num_integer::Integer;
use num_rational::Ratio;
use std::collections::BTreeMap;

use crate::group::CayleyGroup;
use crate::perm::{cycle_types_of_sn, CycleType, PermGroup};

/// Orders compatible with the degree-n counting pipeline: odd for n = 3,
/// coprime to 6 for n = 4, coprime to 30 for n = 5.
pub fn admissible_order(n: u32, order: u64) -> bool {
    match n {
        3 => order % 2 == 1,
        4 => order.gcd(&6) == 1,
        5 => order.gcd(&30) == 1,
        _ => panic!("admissibility is defined for n in {{3, 4, 5}}, got {n}"),
    }
}

/// Index of (sigma, g) in the product embedding, for sigma with the given
/// cycle type and g of order e acting regularly on a group of the given
/// order: n * order minus sum over cycles of (order/e) * gcd(|c|, e).
pub fn ind_with_regular(ct: &CycleType, order: u64, e: u64) -> u64 {
    assert_eq!(order % e, 0, "element order must divide the group order");
    let copies = order / e;
    let n = ct.degree();
    let gcd_sum: u64 = ct.parts().iter().map(|&c| copies * (c as u64).gcd(&e)).sum();
    n * order - gcd_sum
}

/// Leading exponent, count of Galois-stable minimal classes, and the minimal
/// index they realize, for one permutation representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalleInvariants {
    /// 1 / (minimal nonzero index); the predicted count grows like X^a.
    pub a: Ratio<u64>,
    /// Number of orbits of minimal-index classes under [g] -> [g^c] over all
    /// c coprime to the element order; the predicted log-power is b - 1.
    pub b: u64,
    pub min_index: u64,
    pub minimal_classes: Vec<String>,
}

struct ClassView {
    label: String,
    elem_order: u64,
    ind: u64,
}

fn invariants_from_views(
    views: &[ClassView],
    power: impl Fn(usize, u64) -> usize,
) -> MalleInvariants {
    let min_index = views
        .iter()
        .filter(|v| v.ind > 0)
        .map(|v| v.ind)
        .min()
        .expect("a nontrivial class exists");
    let minimal: Vec<usize> = (0..views.len()).filter(|&i| views[i].ind == min_index).collect();

    let mut parent: BTreeMap<usize, usize> = minimal.iter().map(|&i| (i, i)).collect();
    fn find(parent: &mut BTreeMap<usize, usize>, i: usize) -> usize {
        let p = parent[&i];
        if p == i {
            return i;
        }
        let root = find(parent, p);
        parent.insert(i, root);
        root
    }
    for &i in &minimal {
        let e = views[i].elem_order;
        for c in 2..e {
            if c.gcd(&e) != 1 {
                continue;
            }
            let j = power(i, c);
            assert_eq!(
                views[j].ind, min_index,
                "the power action must preserve the index"
            );
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent.insert(a, b);
            }
        }
    }
    let mut roots: Vec<usize> = minimal.iter().map(|&i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();

    MalleInvariants {
        a: Ratio::new(1, min_index),
        b: roots.len() as u64,
        min_index,
        minimal_classes: minimal.iter().map(|&i| views[i].label.clone()).collect(),
    }
}

/// Invariants of an explicitly generated permutation group in its given action.
pub fn invariants_from_perm_group(group: &PermGroup) -> MalleInvariants {
    let views: Vec<ClassView> = group
        .classes()
        .classes
        .iter()
        .map(|c| ClassView {
            label: c.rep.to_cycle_string(),
            elem_order: c.rep.order(),
            ind: c.index,
        })
        .collect();
    invariants_from_views(&views, |i, c| {
        let img = group.classes().classes[i].rep.pow(c);
        group.class_index_of(&img).expect("powers stay in the group")
    })
}

/// Invariants of a table group in its regular representation.
pub fn invariants_regular(group: &CayleyGroup) -> MalleInvariants {
    assert!(group.order() > 1, "the trivial group has no nonzero index");
    let classes = group.conj_classes();
    let mut class_of = vec![0usize; group.order()];
    for (i, (_, members)) in classes.iter().enumerate() {
        for &m in members {
            class_of[m] = i;
        }
    }
    let views: Vec<ClassView> = classes
        .iter()
        .map(|&(rep, _)| ClassView {
            label: format!("g{rep} (order {})", group.order_of(rep)),
            elem_order: group.order_of(rep),
            ind: group.ind_regular(rep),
        })
        .collect();
    invariants_from_views(&views, |i, c| class_of[group.pow(classes[i].0, c)])
}

/// Invariants of S_n x G acting on n * |G| points, with S_n natural and G
/// regular; classes are (cycle type, class of G) pairs.
pub fn product_invariants(n: u32, group: &CayleyGroup) -> MalleInvariants {
    let cts = cycle_types_of_sn(n);
    let ct_index: BTreeMap<CycleType, usize> =
        cts.iter().cloned().enumerate().map(|(i, ct)| (ct, i)).collect();
    let classes = group.conj_classes();
    let mut class_of = vec![0usize; group.order()];
    for (i, (_, members)) in classes.iter().enumerate() {
        for &m in members {
            class_of[m] = i;
        }
    }
    let order = group.order() as u64;
    let k = classes.len();
    let mut views = Vec::with_capacity(cts.len() * k);
    for ct in &cts {
        for &(rep, _) in &classes {
            let e = group.order_of(rep);
            views.push(ClassView {
                label: format!("({} ; g{rep} order {e})", ct.to_compact_string()),
                elem_order: ct.order().lcm(&e),
                ind: ind_with_regular(ct, order, e),
            });
        }
    }
    invariants_from_views(&views, |i, c| {
        let (si, gi) = (i / k, i % k);
        let ct_pow = cts[si].power(c);
        ct_index[&ct_pow] * k + class_of[group.pow(classes[gi].0, c)]
    })
}

/// One failed index-gap inequality: the scaled index `lhs` did not clear the
/// scaled bound `rhs`.
#[derive(Clone, Debug)]
pub struct IndexGapViolation {
    pub n: u32,
    pub order: u64,
    pub elem_order: u64,
    pub sigma: CycleType,
    pub lhs: u64,
    pub rhs: u64,
    pub strict: bool,
}

struct GapRule {
    sigma: CycleType,
    ind_multiplier: u64,
    order_multiplier: u64,
    strict: bool,
}

fn gap_rules(n: u32) -> Vec<GapRule> {
    let ct = |parts: &[u32]| CycleType::new(parts.to_vec()).unwrap();
    let rule = |sigma: CycleType, ind_multiplier: u64, order_multiplier: u64, strict: bool| GapRule {
        sigma,
        ind_multiplier,
        order_multiplier,
        strict,
    };
    match n {
        3 => vec![
            rule(ct(&[2, 1]), 1, 2, true),
            rule(ct(&[3]), 1, 1, true),
        ],
        4 => vec![
            rule(ct(&[2, 1, 1]), 1, 2, true),
            rule(ct(&[2, 2]), 1, 1, true),
            rule(ct(&[3, 1]), 1, 3, true),
            rule(ct(&[4]), 1, 2, true),
        ],
        5 => {
            let mut rules = Vec::new();
            for sigma in cycle_types_of_sn(5) {
                if sigma.is_trivial() {
                    continue;
                }
                let ind = sigma.ind();
                rules.push(rule(sigma.clone(), 7, 6 + 7 * ind, false));
                if sigma.parts() != [5] {
                    rules.push(rule(sigma, 7, 12 + 7 * ind, false));
                }
            }
            rules
        }
        _ => panic!("index-gap rules are defined for n in {{3, 4, 5}}, got {n}"),
    }
}

/// Checks every index-gap inequality for one group order, over all divisor
/// element orders e > 1, without an admissibility filter.
pub fn index_gap_violations_for_order(n: u32, order: u64) -> Vec<IndexGapViolation> {
    let rules = gap_rules(n);
    let mut out = Vec::new();
    for e in 2..=order {
        if !order.is_multiple_of(e) {
            continue;
        }
        for rule in &rules {
            let lhs = rule.ind_multiplier * ind_with_regular(&rule.sigma, order, e);
            let rhs = rule.order_multiplier * order;
            let ok = if rule.strict { lhs > rhs } else { lhs >= rhs };
            if !ok {
                out.push(IndexGapViolation {
                    n,
                    order,
                    elem_order: e,
                    sigma: rule.sigma.clone(),
                    lhs,
                    rhs,
                    strict: rule.strict,
                });
            }
        }
    }
    out
}

/// Sweeps all admissible orders up to the bound and returns every index-gap
/// violation found (expected: none).
pub fn index_gap_violations(n: u32, order_bound: u64) -> Vec<IndexGapViolation> {
    let mut out = Vec::new();
    for order in 2..=order_bound {
        if !admissible_order(n, order) {
            continue;
        }
        out.extend(index_gap_violations_for_order(n, order));
    }
    out
}

/// Per-cycle-type exponent shifts entering the delta margin.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    n: u32,
    entries: BTreeMap<CycleType, Ratio<u64>>,
}

impl SigmaTable {
    /// Standard table: 2 for the n-cycle at n = 3; 2 for the 4-cycle and the
    /// double transposition at n = 4; 2/5 for the 5-cycle at n = 5; zero
    /// otherwise.
    pub fn standard(n: u32) -> SigmaTable {
        let ct = |parts: &[u32]| CycleType::new(parts.to_vec()).unwrap();
        let mut entries = BTreeMap::new();
        match n {
            3 => {
                entries.insert(ct(&[3]), Ratio::from_integer(2));
            }
            4 => {
                entries.insert(ct(&[4]), Ratio::from_integer(2));
                entries.insert(ct(&[2, 2]), Ratio::from_integer(2));
            }
            5 => {
                entries.insert(ct(&[5]), Ratio::new(2, 5));
            }
            _ => panic!("standard table is defined for n in {{3, 4, 5}}, got {n}"),
        }
        SigmaTable { n, entries }
    }

    pub fn from_entries(n: u32, entries: BTreeMap<CycleType, Ratio<u64>>) -> SigmaTable {
        SigmaTable { n, entries }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, ct: &CycleType) -> Ratio<u64> {
        self.entries.get(ct).copied().unwrap_or_else(|| Ratio::from_integer(0))
    }
}

/// The delta margin and the (cycle type, element order) pair attaining it.
#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub delta: Ratio<i64>,
    pub binding_sigma: CycleType,
    pub binding_elem_order: u64,
    pub admissible: bool,
}

impl DeltaReport {
    /// The error-term sums converge when the margin is below -1.
    pub fn passes(&self) -> bool {
        self.delta < Ratio::from_integer(-1)
    }
}

/// Maximum of  -s(sigma) + ind(sigma) - ind(sigma, g) / |G|  over nontrivial
/// cycle types sigma of S_n and nonidentity element orders of G.
pub fn delta_margin(n: u32, group: &CayleyGroup, table: &SigmaTable) -> DeltaReport {
    assert_eq!(table.n(), n, "sigma table is for a different degree");
    assert!(group.order() > 1, "need a nontrivial group");
    let order = group.order() as u64;
    let mut best: Option<(Ratio<i64>, CycleType, u64)> = None;
    for sigma in cycle_types_of_sn(n) {
        if sigma.is_trivial() {
            continue;
        }
        let s = table.get(&sigma);
        let s = Ratio::new(*s.numer() as i64, *s.denom() as i64);
        for &e in group.element_orders().iter().filter(|&&e| e > 1) {
            let pair_ind = ind_with_regular(&sigma, order, e);
            let value = -s + Ratio::from_integer(sigma.ind() as i64)
                - Ratio::new(pair_ind as i64, order as i64);
            if best.as_ref().is_none_or(|(cur, _, _)| value > *cur) {
                best = Some((value, sigma.clone(), e));
            }
        }
    }
    let (delta, binding_sigma, binding_elem_order) = best.expect("nontrivial group and degree");
    DeltaReport {
        delta,
        binding_sigma,
        binding_elem_order,
        admissible: admissible_order(n, order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;
    use crate::perm::{
        generate_group, product_embed, symmetric_gens, Perm, DEFAULT_GROUP_CAP,
    };

    #[test]
    fn symmetric_groups_have_a_1_b_1() {
        for n in 3..=5usize {
            let g = generate_group(&symmetric_gens(n), DEFAULT_GROUP_CAP).unwrap();
            let inv = invariants_from_perm_group(&g);
            assert_eq!(inv.a, Ratio::new(1, 1));
            assert_eq!(inv.b, 1);
            assert_eq!(inv.min_index, 1);
            assert_eq!(inv.minimal_classes.len(), 1);
        }
    }

    #[test]
    fn cyclic_regular_invariants() {
        let inv = invariants_regular(&parse_group_spec("C3").unwrap());
        assert_eq!(inv.a, Ratio::new(1, 2));
        assert_eq!(inv.b, 1);
        assert_eq!(inv.minimal_classes.len(), 2);

        let inv9 = invariants_regular(&parse_group_spec("C9").unwrap());
        assert_eq!(inv9.a, Ratio::new(1, 6));
        assert_eq!(inv9.b, 1);

        let inv15 = invariants_regular(&parse_group_spec("C15").unwrap());
        assert_eq!(inv15.a, Ratio::new(1, 10));
        assert_eq!(inv15.b, 1);
    }

    #[test]
    fn regular_a_matches_closed_form() {
        for spec in ["C3", "C5", "C7", "C9", "C15", "C3xC3", "C5xC25", "C105"] {
            let g = parse_group_spec(spec).unwrap();
            assert_eq!(invariants_regular(&g).a, g.a_regular(), "{spec}");
        }
    }

    #[test]
    fn product_invariants_basic() {
        for (n, spec) in [(3, "C3"), (3, "C9"), (4, "C5"), (5, "C7"), (3, "C3xC3")] {
            let g = parse_group_spec(spec).unwrap();
            let inv = product_invariants(n, &g);
            assert_eq!(inv.a, Ratio::new(1, g.order() as u64), "{spec}");
            assert_eq!(inv.b, 1, "{spec}");
            assert_eq!(inv.min_index, g.order() as u64, "{spec}");
        }
    }

    #[test]
    fn product_invariants_match_explicit_permutation_group() {
        for (n, k) in [(3usize, 3usize), (3, 9), (4, 5), (5, 7)] {
            let cyc = parse_group_spec(&format!("C{k}")).unwrap();
            let expected = product_invariants(n as u32, &cyc);

            let id_g = Perm::identity(k);
            let shift = Perm::from_images((0..k as u32).map(|i| (i + 1) % k as u32).collect()).unwrap();
            let mut gens: Vec<Perm> = symmetric_gens(n)
                .iter()
                .map(|s| product_embed(s, &id_g))
                .collect();
            gens.push(product_embed(&Perm::identity(n), &shift));
            let group = generate_group(&gens, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(group.order(), [1, 1, 2, 6, 24, 120][n] * k);

            let inv = invariants_from_perm_group(&group);
            assert_eq!(inv.a, expected.a, "n={n} k={k}");
            assert_eq!(inv.b, expected.b, "n={n} k={k}");
            assert_eq!(inv.min_index, expected.min_index, "n={n} k={k}");
        }
    }

    #[test]
    fn index_gap_sweeps_are_clean_for_admissible_orders() {
        assert!(index_gap_violations(3, 300).is_empty());
        assert!(index_gap_violations(4, 300).is_empty());
        assert!(index_gap_violations(5, 300).is_empty());
    }

    #[test]
    fn index_gap_check_catches_inadmissible_orders() {
        // Order 2 at n = 3: a transposition paired with the involution has
        // index 3, which does not exceed 2 * |G| = 4.
        let violations = index_gap_violations_for_order(3, 2);
        assert!(!violations.is_empty());
        assert!(violations.iter().any(|v| v.sigma.parts() == [2, 1] && v.lhs == 3 && v.rhs == 4));
    }

    #[test]
    fn delta_margins_for_small_cyclic_groups() {
        let cases = [
            (3u32, "C3", Ratio::new(-4i64, 3), vec![2u32, 1], 3u64),
            (3, "C9", Ratio::new(-4, 3), vec![2, 1], 3),
            (4, "C5", Ratio::new(-8, 5), vec![3, 1], 5),
            (4, "C7", Ratio::new(-12, 7), vec![3, 1], 7),
            (5, "C7", Ratio::new(-44, 35), vec![5], 7),
            (5, "C11", Ratio::new(-72, 55), vec![5], 11),
        ];
        for (n, spec, delta, sigma, e) in cases {
            let g = parse_group_spec(spec).unwrap();
            let report = delta_margin(n, &g, &SigmaTable::standard(n));
            assert_eq!(report.delta, delta, "n={n} {spec}");
            assert_eq!(report.binding_sigma.parts(), sigma.as_slice(), "n={n} {spec}");
            assert_eq!(report.binding_elem_order, e, "n={n} {spec}");
            assert!(report.admissible);
            assert!(report.passes());
        }
    }

    #[test]
    fn delta_margin_flags_inadmissible_groups() {
        let g = parse_group_spec("C3").unwrap();
        let report = delta_margin(4, &g, &SigmaTable::standard(4));
        assert!(!report.admissible);
    }

    #[test]
    fn sigma_table_entries() {
        let t5 = SigmaTable::standard(5);
        assert_eq!(t5.get(&CycleType::new(vec![5]).unwrap()), Ratio::new(2, 5));
        assert_eq!(t5.get(&CycleType::new(vec![4, 1]).unwrap()), Ratio::from_integer(0));
        let t4 = SigmaTable::standard(4);
        assert_eq!(t4.get(&CycleType::new(vec![2, 2]).unwrap()), Ratio::from_integer(2));
    }

    #[test]
    fn admissibility_by_degree() {
        assert!(admissible_order(3, 9));
        assert!(!admissible_order(3, 6));
        assert!(admissible_order(4, 35));
        assert!(!admissible_order(4, 9));
        assert!(admissible_order(5, 49));
        assert!(!admissible_order(5, 21));
        assert!(!admissible_order(5, 25));
    }
}
