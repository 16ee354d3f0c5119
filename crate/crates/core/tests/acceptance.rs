//! Acceptance harness: one test per numbered criterion, each printing a
//! single PASS/FAIL verdict line with the measured quantities and elapsed
//! time, then asserting the criterion at its stated tolerance and runtime
//! budget. Run with `cargo test --test acceptance -- --nocapture` to see the
//! verdict lines for passing criteria as well.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mallestat_core::count::{
    loglog_fit, lower_bound_constant, omega_histograms, product_count, product_count_upper,
    weighted_sum_exact, WeightedMultiset,
};
use mallestat_core::cubic::{enumerate_cubic, DiscSign, EnumOptions, ScanStrategy};
use mallestat_core::cyclic::{
    conductor_field_count, cyclic_counts, enumerate_cyclic, kernel_count_oracle,
};
use mallestat_core::fields::{count_pairs, pair_corpus, pair_disc_y, CubicCorpus};
use mallestat_core::group::{odd_abelian_groups_up_to, parse_group_spec, CayleyGroup};
use mallestat_core::kp::{uniformity_ratio, ShellConfig};
use mallestat_core::malle::{
    admissible_order, delta_margin, index_gap_violations, invariants_from_perm_group,
    invariants_regular, product_invariants, SigmaTable,
};
use mallestat_core::perm::{generate_group, product_embed, product_ind, symmetric_gens};

fn verdict(number: u32, passed: bool, detail: &str, elapsed: Duration) {
    let word = if passed { "PASS" } else { "FAIL" };
    println!("acceptance {number}: {word} — {detail} [{elapsed:.2?}]");
    assert!(passed, "acceptance {number}: FAIL — {detail}");
}

fn within_budget(number: u32, elapsed: Duration, budget: Duration) {
    assert!(
        elapsed < budget,
        "acceptance {number}: runtime {elapsed:.2?} exceeds the {budget:?} budget"
    );
}

#[test]
fn criterion_01_product_index_matches_embedded_permutations() {
    let t0 = Instant::now();
    let groups: Vec<_> = (1..=6)
        .map(|n| generate_group(&symmetric_gens(n), 720).expect("symmetric groups generate"))
        .collect();
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    for sn in &groups {
        for sm in &groups {
            for s in sn.elements() {
                for t in sm.elements() {
                    let formula = product_ind(&s.cycle_type(), &t.cycle_type());
                    let embedded = product_embed(s, t).ind();
                    if formula != embedded {
                        mismatches += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    verdict(
        1,
        mismatches == 0,
        &format!("product index formula equals embedded index on all {checked} ordered pairs (n, m <= 6), {mismatches} mismatches"),
        elapsed,
    );
    within_budget(1, elapsed, Duration::from_secs(10));
}

#[test]
fn criterion_02_index_gap_inequalities_hold_to_ten_thousand() {
    let t0 = Instant::now();
    let mut total_violations = 0usize;
    let mut orders = 0u64;
    for n in [3u32, 4, 5] {
        total_violations += index_gap_violations(n, 10_000).len();
        orders += (1..=10_000u64).filter(|&o| admissible_order(n, o)).count() as u64;
    }
    let elapsed = t0.elapsed();
    verdict(
        2,
        total_violations == 0,
        &format!("{total_violations} inequality violations over {orders} admissible (n, |G|) pairs with |G| <= 10^4, every e | |G|"),
        elapsed,
    );
    within_budget(2, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_03_delta_margins_are_strictly_convergent() {
    let t0 = Instant::now();
    let cases: [(u32, &str, i64, i64); 5] = [
        (3, "C3", -4, 3),
        (4, "C5", -8, 5),
        (4, "C7", -12, 7),
        (5, "C7", -44, 35),
        (5, "C11", -72, 55),
    ];
    let mut all_ok = true;
    let mut shown = Vec::new();
    for (n, spec, num, den) in cases {
        let group = parse_group_spec(spec).expect("built-in cyclic groups parse");
        let report = delta_margin(n, &group, &SigmaTable::standard(n));
        let expected = Ratio::new(num, den);
        all_ok &= report.passes() && report.admissible && report.delta == expected;
        shown.push(format!("n={n} {spec}: {}", report.delta));
    }
    let elapsed = t0.elapsed();
    verdict(
        3,
        all_ok,
        &format!("delta < -1 with exact values {}", shown.join("; ")),
        elapsed,
    );
    within_budget(3, elapsed, Duration::from_secs(1));
}

#[test]
fn criterion_04_invariants_match_the_predicted_closed_forms() {
    let t0 = Instant::now();
    let mut all_ok = true;
    for n in [3usize, 4, 5] {
        let sn = generate_group(&symmetric_gens(n), 720).expect("symmetric groups generate");
        let inv = invariants_from_perm_group(&sn);
        all_ok &= inv.a == Ratio::new(1, 1) && inv.b == 1;
    }
    let c3 = invariants_regular(&CayleyGroup::cyclic(3));
    all_ok &= c3.a == Ratio::new(1, 2) && c3.b == 1;

    let mut products = 0u64;
    for n in [3u32, 4, 5] {
        for g in odd_abelian_groups_up_to(200) {
            if !admissible_order(n, g.order() as u64) {
                continue;
            }
            let inv = product_invariants(n, &g);
            all_ok &= inv.a == Ratio::new(1, g.order() as u64) && inv.b == 1;
            products += 1;
        }
    }
    let elapsed = t0.elapsed();
    verdict(
        4,
        all_ok,
        &format!("(a, b) = (1, 1) for S_3..S_5, (1/2, 1) for C_3 regular, (1/|G|, 1) across {products} admissible products with |G| <= 200"),
        elapsed,
    );
}

#[test]
fn criterion_05_cubic_census_double_enumeration_and_slope() {
    let t0 = Instant::now();
    let mut strategy_runs = Vec::new();
    for strategy in [ScanStrategy::Sharp, ScanStrategy::Coarse] {
        let mut signed = Vec::new();
        for sign in [DiscSign::Negative, DiscSign::Positive] {
            let opts = EnumOptions { strategy, ..EnumOptions::default() };
            let classes = enumerate_cubic(1_000_000, sign, &opts).expect("bound within cap");
            signed.push(
                classes.iter().map(|c| (c.disc, c.form.key())).collect::<Vec<_>>(),
            );
        }
        strategy_runs.push(signed);
    }
    let histograms_agree = strategy_runs[0] == strategy_runs[1];
    let complex = strategy_runs[0][0].len();
    let real = strategy_runs[0][1].len();

    let corpus = CubicCorpus::enumerate(1_000_000, &EnumOptions::default())
        .expect("bound within cap");
    let samples: Vec<(f64, f64)> = (4..=6u32)
        .map(|k| {
            let x = 10u64.pow(k);
            (x as f64, corpus.noncyclic_count(x).expect("within bound") as f64)
        })
        .collect();
    let slope = loglog_fit(&samples).slope;
    let slope_ok = (slope - 1.00).abs() <= 0.03;

    let elapsed = t0.elapsed();
    verdict(
        5,
        histograms_agree && slope_ok,
        &format!(
            "both scan strategies list identical classes ({complex} negative, {real} positive disc <= 10^6); non-cyclic slope {slope:.4} vs 1.00 ± 0.03 over [10^4, 10^6]"
        ),
        elapsed,
    );
    within_budget(5, elapsed, Duration::from_secs(120));
}

#[test]
fn criterion_06_cyclic_census_formula_oracle_and_slope() {
    let t0 = Instant::now();
    let mut mismatches = 0u64;
    for ell in [3u64, 5, 7] {
        for f in 2..=10_000u64 {
            if conductor_field_count(ell, f) != kernel_count_oracle(ell, f) {
                mismatches += 1;
            }
        }
    }

    let fields = enumerate_cyclic(3, 100_000_000).expect("supported degree");
    let xs: Vec<u128> = (4..=8u32).map(|k| 10u128.pow(k)).collect();
    let counts = cyclic_counts(&fields, &xs);
    let samples: Vec<(f64, f64)> =
        xs.iter().zip(&counts).map(|(&x, &c)| (x as f64, c as f64)).collect();
    let slope = loglog_fit(&samples).slope;
    let slope_ok = (slope - 0.50).abs() <= 0.05;

    let elapsed = t0.elapsed();
    verdict(
        6,
        mismatches == 0 && slope_ok,
        &format!(
            "conductor formula equals kernel oracle for every conductor <= 10^4, ell in {{3, 5, 7}} ({mismatches} mismatches); N(C_3; X) slope {slope:.4} vs 0.50 ± 0.05 over [10^4, 10^8]"
        ),
        elapsed,
    );
    within_budget(6, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_07_pair_bracket_slopes_at_desk_scale() {
    let t0 = Instant::now();
    let xs: Vec<u128> = (10..=13u32).map(|k| 10u128.pow(k)).collect();
    let rows = count_pairs(3, &xs, None).expect("within pairing cap");
    let lower: Vec<(f64, f64)> =
        rows.iter().map(|r| (r.x as f64, r.lower_count as f64)).collect();
    let upper: Vec<(f64, f64)> =
        rows.iter().map(|r| (r.x as f64, r.upper_count as f64)).collect();
    let lower_slope = loglog_fit(&lower).slope;
    let upper_slope = loglog_fit(&upper).slope;
    let target = 1.0 / 3.0;
    let slopes_ok =
        (lower_slope - target).abs() <= 0.05 && (upper_slope - target).abs() <= 0.05;
    let gaps: Vec<String> =
        rows.iter().map(|r| format!("{:.2}", r.relative_gap())).collect();

    let elapsed = t0.elapsed();
    verdict(
        7,
        slopes_ok,
        &format!(
            "bracket slopes {lower_slope:.4} (lower) / {upper_slope:.4} (upper) vs 1/3 ± 0.05 over [10^10, 10^13]; relative gaps {}",
            gaps.join(", ")
        ),
        elapsed,
    );
    within_budget(7, elapsed, Duration::from_secs(300));
}

#[test]
fn criterion_08_total_ramification_counts_decay_quadratically() {
    let t0 = Instant::now();
    let corpus =
        CubicCorpus::enumerate(1_000_000, &EnumOptions::default()).expect("bound within cap");
    let total = corpus.m3q(1, 1_000_000).expect("q = 1 is squarefree");
    let mut all_ok = true;
    let mut shown = Vec::new();
    for q in [7u64, 13, 31, 43, 91] {
        let count = corpus.m3q(q, 1_000_000).expect("test moduli are squarefree");
        all_ok &= count * q * q <= 10 * total;
        shown.push(format!("q={q}: {:.3}", (count * q * q) as f64 / total as f64));
    }
    let elapsed = t0.elapsed();
    verdict(
        8,
        all_ok,
        &format!("M(q, 10^6) q^2 / M(1, 10^6) <= 10 at every modulus ({})", shown.join(", ")),
        elapsed,
    );
    within_budget(8, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_09_shell_counts_are_uniform_across_moduli() {
    let t0 = Instant::now();
    let cfg = ShellConfig::new(CayleyGroup::cyclic(3));
    let ratios: Vec<f64> =
        [7u64, 13, 31].iter().map(|&q| uniformity_ratio(&cfg, 100_000_000, q, 0.1)).collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min;
    let elapsed = t0.elapsed();
    verdict(
        9,
        min > 0.0 && spread <= 10.0,
        &format!(
            "normalized ratios at X = 10^8, eps = 0.1: {ratios:.4?}; max/min = {spread:.3} <= 10"
        ),
        elapsed,
    );
    within_budget(9, elapsed, Duration::from_secs(120));
}

#[test]
fn criterion_10_weighted_counts_stabilize_under_normalization() {
    let t0 = Instant::now();
    let xs: Vec<u64> = (4..=8u32).map(|k| 10u64.pow(k)).collect();
    let hists = omega_histograms(&xs, 3, &[]);
    let mut all_ok = true;
    let mut shown = Vec::new();
    for z in [1u64, 2] {
        let samples: Vec<(f64, f64)> = xs
            .iter()
            .zip(&hists)
            .map(|(&x, hist)| {
                let count = weighted_sum_exact(hist, z) as f64;
                let xf = x as f64;
                (xf, count / (xf * xf.ln().powf(z as f64 / 2.0 - 1.0)))
            })
            .collect();
        let slope = loglog_fit(&samples).slope;
        all_ok &= slope.abs() <= 0.05;
        shown.push(format!("z={z}: {slope:+.5}"));
    }
    let elapsed = t0.elapsed();
    verdict(
        10,
        all_ok,
        &format!("residual log-log slopes of A_z(x) / (x (log x)^(z/2 - 1)) over [10^4, 10^8]: {}", shown.join(", ")),
        elapsed,
    );
    within_budget(10, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_11_product_counting_bounds_and_brute_force() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut count_mismatches = 0u64;
    let mut upper_violations = 0u64;
    for _ in 0..1000 {
        let first = random_multiset(&mut rng);
        let second = random_multiset(&mut rng);
        let a = rng.gen_range(1..=3u32);
        let b = rng.gen_range(1..=3u32);
        let x: u128 = rng.gen_range(1..=1_000_000_000_000u128);

        let mut brute = 0u64;
        for (s, cs) in first.iter() {
            for (r, cr) in second.iter() {
                if (s as u128).pow(a) * (r as u128).pow(b) <= x {
                    brute += cs * cr;
                }
            }
        }
        let fast = product_count(&first, &second, a, b, x);
        if fast != brute {
            count_mismatches += 1;
        }

        let c1 = first.linear_upper_constant();
        let bound = product_count_upper(c1, &second, a, b, x);
        if fast as f64 > bound * (1.0 + 1e-9) + 1e-6 {
            upper_violations += 1;
        }
    }

    let mut lower_violations = 0u64;
    let dense_cases: [(u32, u32, u128); 4] =
        [(1, 2, 1_000_000), (1, 3, 1_000_000), (2, 3, 10_000_000_000), (3, 4, 1_000_000_000_000)];
    for (a, b, x) in dense_cases {
        let n1 = nth_root_ceil(x, a) + 1;
        let n2 = nth_root_ceil(x, b) + 1;
        let first = WeightedMultiset::from_counts((1..=n1).map(|s| (s, 1)));
        let second = WeightedMultiset::from_counts((1..=n2).map(|s| (s, 1)));
        let constant = lower_bound_constant(0.5, 0.5, a, b, 1.0);
        let floor = constant * (x as f64).powf(1.0 / a as f64);
        if (product_count(&first, &second, a, b, x) as f64) < floor {
            lower_violations += 1;
        }
    }

    let mut constant_mismatches = 0u64;
    for _ in 0..1000 {
        let c1 = rng.gen_range(0.05..2.0f64);
        let c2 = rng.gen_range(0.05..2.0f64);
        let a = rng.gen_range(1..=3u32);
        let b = rng.gen_range(a + 1..=a + 3);
        let alpha = rng.gen_range(0.0..(b as f64 / a as f64) * 0.9);
        let got = lower_bound_constant(c1, c2, a, b, alpha);
        let dyadic = c1 * c2 * (a as f64 / (b as f64 - a as f64 * alpha))
            * (1.0 - 2f64.powf(alpha - b as f64 / a as f64));
        let expected = (c1 * c2).min(dyadic);
        if (got - expected).abs() > 1e-12 * expected.abs() {
            constant_mismatches += 1;
        }
    }

    let elapsed = t0.elapsed();
    verdict(
        11,
        count_mismatches == 0
            && upper_violations == 0
            && lower_violations == 0
            && constant_mismatches == 0,
        &format!(
            "1000 randomized instances match brute force ({count_mismatches} mismatches); upper bound held every time ({upper_violations} violations); dense lower bound held with c = min(c1 c2, dyadic) ({lower_violations} violations, {constant_mismatches} constant mismatches)"
        ),
        elapsed,
    );
    within_budget(11, elapsed, Duration::from_secs(30));
}

#[test]
fn criterion_12_truncated_discriminants_interpolate_the_bracket() {
    let t0 = Instant::now();
    let pairs = pair_corpus(3, 100_000_000_000, None).expect("within pairing cap");
    let mut exact = 0u64;
    let mut bracketed = 0u64;
    let mut violations = 0u64;
    for pair in &pairs {
        let full = BigUint::from(pair.cubic.disc.unsigned_abs()).pow(3)
            * BigUint::from(pair.companion.disc).pow(3);
        let mut union: Vec<u64> = pair.cubic.ram.primes().collect();
        union.extend(pair.companion.ram.primes());
        union.sort_unstable();
        union.dedup();
        let max_prime = union.last().copied().unwrap_or(0);

        let mut cutoffs = vec![0u64, 1];
        for &p in &union {
            cutoffs.push(p - 1);
            cutoffs.push(p);
        }
        cutoffs.push(max_prime + 1);
        cutoffs.sort_unstable();
        cutoffs.dedup();

        let mut previous: Option<mallestat_core::disc::DiscBracket> = None;
        for &y in &cutoffs {
            let by = pair_disc_y(pair, 3, y, None);
            let sandwiched = pair.bracket.lower <= by.lower
                && pair.bracket.upper <= by.upper
                && by.lower <= full
                && by.upper <= full;
            let monotone = previous
                .as_ref()
                .is_none_or(|prev| by.lower <= prev.lower && by.upper <= prev.upper);
            if !(sandwiched && monotone) {
                violations += 1;
            }
            previous = Some(by);
        }

        let untruncated = pair_disc_y(pair, 3, 0, None);
        if untruncated.lower != full || untruncated.upper != full {
            violations += 1;
        }
        let collapsed = pair_disc_y(pair, 3, max_prime + 1, None);
        if collapsed.lower != pair.bracket.lower || collapsed.upper != pair.bracket.upper {
            violations += 1;
        }
        if pair.bracket.is_exact() {
            exact += 1;
            if !collapsed.is_exact() {
                violations += 1;
            }
        } else {
            bracketed += 1;
        }
    }
    let elapsed = t0.elapsed();
    verdict(
        12,
        violations == 0 && !pairs.is_empty(),
        &format!(
            "{} pairs at X = 10^11 ({exact} exact, {bracketed} bracketed): truncated discriminant sits between the compositum bracket and the cube product at every cutoff, decreases with the cutoff, and collapses past the largest ramified prime ({violations} violations)",
            pairs.len()
        ),
        elapsed,
    );
}

fn random_multiset(rng: &mut ChaCha8Rng) -> WeightedMultiset {
    let len = rng.gen_range(1..=40usize);
    WeightedMultiset::from_counts(
        (0..len).map(|_| (rng.gen_range(1..=5000u64), rng.gen_range(1..=10u64))),
    )
}

fn nth_root_ceil(x: u128, n: u32) -> u64 {
    let mut r = num_integer::Roots::nth_root(&x, n) as u64;
    while ((r as u128).pow(n)) < x {
        r += 1;
    }
    r
}
