//! Shells of prime-supported local data: vectors assigning to each
//! nonidentity group element a squarefree modulus (primes in fixed residue
//! classes, pairwise coprime across coordinates) plus disjoint index sets
//! from a shared auxiliary block. Counting them by weighted size q | Delta
//! gives the uniformity statistics behind the tail estimates.

use num_integer::Roots;

use crate::arith::{factorize, PrimeSieve};
use crate::group::CayleyGroup;

/// Configuration of one shell: the group, the auxiliary block size t, and
/// the excluded primes (defaults to the primes dividing the group order).
#[derive(Clone, Debug)]
pub struct ShellConfig {
    group: CayleyGroup,
    t: u32,
    excluded: Vec<u64>,
}

/// One coordinate of a shell vector: a nonidentity element with its
/// discriminant weight and the residue requirement for its primes.
#[derive(Clone, Debug)]
struct Coordinate {
    element: usize,
    weight: u64,
    radical: u64,
}

impl ShellConfig {
    pub fn new(group: CayleyGroup) -> ShellConfig {
        assert!(group.order() > 1, "need a nontrivial group");
        let excluded = factorize(group.order() as u64).into_iter().map(|(p, _)| p).collect();
        ShellConfig { group, t: 0, excluded }
    }

    pub fn with_t(mut self, t: u32) -> ShellConfig {
        self.t = t;
        self
    }

    pub fn with_excluded(mut self, excluded: Vec<u64>) -> ShellConfig {
        self.excluded = excluded;
        self
    }

    pub fn group(&self) -> &CayleyGroup {
        &self.group
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn excluded(&self) -> &[u64] {
        &self.excluded
    }

    fn coordinates(&self) -> Vec<Coordinate> {
        (1..self.group.order())
            .map(|element| {
                let ord = self.group.order_of(element);
                let radical = factorize(ord).into_iter().map(|(p, _)| p).product();
                Coordinate {
                    element,
                    weight: self.group.ind_regular(element),
                    radical,
                }
            })
            .collect()
    }

    fn eligible(&self, p: u64, coord: &Coordinate) -> bool {
        !self.excluded.contains(&p) && p % coord.radical == 1
    }

    /// One-part multiplier: each of the t auxiliary slots is unused or
    /// claimed by exactly one coordinate.
    pub fn block_multiplier(&self) -> u64 {
        (self.group.order() as u64).pow(self.t)
    }
}

fn min_weight(coords: &[Coordinate]) -> u64 {
    coords.iter().map(|c| c.weight).min().expect("nontrivial group")
}

fn pow_capped(p: u64, e: u64, cap: u64) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// Calls the visitor once per shell vector with weighted size at most x,
/// passing the (element, prime) assignments and the size Delta. The t-block
/// choices are not expanded; each call stands for `block_multiplier` vectors.
pub fn for_each_vector(
    cfg: &ShellConfig,
    x: u64,
    mut visit: impl FnMut(&[(usize, u64)], u64),
) {
    let coords = cfg.coordinates();
    let primes: Vec<u64> = eligible_primes(cfg, &coords, x);
    let mut stack: Vec<(usize, u64)> = Vec::new();
    dfs_visit(cfg, &coords, &primes, 0, 1, x, &mut stack, &mut visit);
}

fn eligible_primes(cfg: &ShellConfig, coords: &[Coordinate], x: u64) -> Vec<u64> {
    let bound = x.nth_root(min_weight(coords) as u32);
    let sieve = PrimeSieve::new(bound);
    sieve
        .primes()
        .filter(|&p| coords.iter().any(|c| cfg.eligible(p, c)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn dfs_visit(
    cfg: &ShellConfig,
    coords: &[Coordinate],
    primes: &[u64],
    from: usize,
    delta: u64,
    x: u64,
    stack: &mut Vec<(usize, u64)>,
    visit: &mut impl FnMut(&[(usize, u64)], u64),
) {
    visit(stack, delta);
    let e_min = min_weight(coords);
    for j in from..primes.len() {
        let p = primes[j];
        if pow_capped(p, e_min, x / delta).is_none() { break }
        for coord in coords {
            if !cfg.eligible(p, coord) {
                continue;
            }
            if let Some(power) = pow_capped(p, coord.weight, x / delta) {
                stack.push((coord.element, p));
                dfs_visit(cfg, coords, primes, j + 1, delta * power, x, stack, visit);
                stack.pop();
            }
        }
    }
}

fn dfs_count(
    cfg: &ShellConfig,
    coords: &[Coordinate],
    primes: &[u64],
    from: usize,
    delta: u64,
    x: u64,
) -> u64 {
    let mut count = 1u64;
    let e_min = min_weight(coords);
    for j in from..primes.len() {
        let p = primes[j];
        if pow_capped(p, e_min, x / delta).is_none() {
            break;
        }
        for coord in coords {
            if !cfg.eligible(p, coord) {
                continue;
            }
            if let Some(power) = pow_capped(p, coord.weight, x / delta) {
                count += dfs_count(cfg, coords, primes, j + 1, delta * power, x);
            }
        }
    }
    count
}

/// Number of shell vectors with weighted size at most x, including the
/// t-block multiplier.
pub fn shell_count(cfg: &ShellConfig, x: u64) -> u64 {
    assert!(x >= 1);
    let coords = cfg.coordinates();
    let primes = eligible_primes(cfg, &coords, x);
    dfs_count(cfg, &coords, &primes, 0, 1, x) * cfg.block_multiplier()
}

/// Number of shell vectors with weighted size at most x and divisible by the
/// prime q, including the t-block multiplier.
pub fn shell_count_multiple(cfg: &ShellConfig, x: u64, q: u64) -> u64 {
    assert!(x >= 1);
    assert!(crate::arith::is_prime(q), "q must be prime");
    let coords = cfg.coordinates();
    let primes: Vec<u64> = eligible_primes(cfg, &coords, x)
        .into_iter()
        .filter(|&p| p != q)
        .collect();
    let mut count = 0u64;
    for coord in &coords {
        if !cfg.eligible(q, coord) {
            continue;
        }
        if let Some(power) = pow_capped(q, coord.weight, x) {
            count += dfs_count(cfg, &coords, &primes, 0, power, x);
        }
    }
    count * cfg.block_multiplier()
}

/// Normalized uniformity statistic
/// N_q(x) * q^{a (1 - eps)} / (x^a (log x)^{i - 1}),
/// where a is the leading exponent of the regular representation and i the
/// orbit count of the minimal-order elements. Bounded ratios across q attest
/// that divisibility constraints cost the expected power of q.
pub fn uniformity_ratio(cfg: &ShellConfig, x: u64, q: u64, eps: f64) -> f64 {
    let n_q = shell_count_multiple(cfg, x, q) as f64;
    let a_ratio = cfg.group().a_regular();
    let a = *a_ratio.numer() as f64 / *a_ratio.denom() as f64;
    let i = cfg.group().min_order_orbit_count() as f64;
    let xf = x as f64;
    n_q * (q as f64).powf(a * (1.0 - eps)) / (xf.powf(a) * xf.ln().powf(i - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;
    use num_integer::Integer;

    fn c3_shell() -> ShellConfig {
        ShellConfig::new(parse_group_spec("C3").unwrap())
    }

    /// Squarefree products of primes = 1 mod 3 up to the bound, ascending.
    fn eligible_squarefree(bound: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (1..=bound)
            .filter(|&n| {
                let f = factorize(n);
                f.iter().all(|&(p, e)| e == 1 && p % 3 == 1)
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn c3_counts_match_direct_pair_enumeration() {
        for x in [1u64, 100, 10_000, 100_000] {
            let root = x.sqrt();
            let values = eligible_squarefree(root);
            let mut expected = 0u64;
            let mut expected_q7 = 0u64;
            for &b1 in &values {
                for &b2 in &values {
                    if b1 * b2 <= root && b1.gcd(&b2) == 1 {
                        expected += 1;
                        if b1 % 7 == 0 || b2 % 7 == 0 {
                            expected_q7 += 1;
                        }
                    }
                }
            }
            let cfg = c3_shell();
            assert_eq!(shell_count(&cfg, x), expected, "x = {x}");
            assert_eq!(shell_count_multiple(&cfg, x, 7), expected_q7, "x = {x}");
        }
    }

    #[test]
    fn vectors_satisfy_the_invariants() {
        let cfg = c3_shell();
        let mut seen = 0u64;
        for_each_vector(&cfg, 50_000, |assignment, delta| {
            seen += 1;
            let mut primes: Vec<u64> = assignment.iter().map(|&(_, p)| p).collect();
            primes.sort_unstable();
            let distinct = primes.windows(2).all(|w| w[0] != w[1]);
            assert!(distinct, "primes assigned twice: {assignment:?}");
            assert!(primes.iter().all(|&p| p % 3 == 1 && p != 3));
            let product: u64 = assignment
                .iter()
                .map(|&(g, p)| p.pow(cfg.group().ind_regular(g) as u32))
                .product();
            assert_eq!(product, delta);
            assert!(delta <= 50_000);
        });
        assert_eq!(seen, shell_count(&cfg, 50_000));
    }

    #[test]
    fn block_multiplier_scales_counts() {
        let base = c3_shell();
        let with_block = c3_shell().with_t(2);
        assert_eq!(with_block.block_multiplier(), 9);
        assert_eq!(
            shell_count(&with_block, 10_000),
            9 * shell_count(&base, 10_000)
        );
    }

    #[test]
    fn excluded_primes_are_not_used() {
        let cfg = c3_shell().with_excluded(vec![3, 7]);
        for_each_vector(&cfg, 100_000, |assignment, _| {
            assert!(assignment.iter().all(|&(_, p)| p != 7));
        });
        assert_eq!(shell_count_multiple(&cfg, 100_000, 7), 0);
    }

    #[test]
    fn c7_weights() {
        let cfg = ShellConfig::new(parse_group_spec("C7").unwrap());
        // each nonidentity coordinate carries weight 6 and residue 1 mod 7
        for_each_vector(&cfg, 10u64.pow(8), |assignment, delta| {
            for &(g, p) in assignment {
                assert_eq!(cfg.group().ind_regular(g), 6);
                assert_eq!(p % 7, 1);
                assert_eq!(delta % p.pow(6), 0);
            }
        });
        // smallest eligible prime is 29: vectors are the empty one plus
        // 29^6 <= 10^8? no: 29^6 = 594823321 > 10^8, so only the empty vector
        assert_eq!(shell_count(&cfg, 10u64.pow(8)), 1);
        assert_eq!(shell_count(&cfg, 594_823_321), 7);
    }

    #[test]
    fn uniformity_ratio_is_finite_and_positive() {
        let cfg = c3_shell();
        let r = uniformity_ratio(&cfg, 10u64.pow(6), 7, 0.1);
        assert!(r.is_finite());
        assert!(r > 0.0);
    }
}
