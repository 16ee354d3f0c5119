//! Counting engines: exact pair counts for product orderings, linear upper
//! and lower bound constants, squarefree omega-weighted sums, and log-log
//! slope fits used to read off growth exponents.

use num_integer::Roots;

use crate::arith::PrimeSieve;

/// A multiset of positive integer sizes with multiplicities, supporting
/// cumulative counts below a threshold.
#[derive(Clone, Debug, Default)]
pub struct WeightedMultiset {
    items: Vec<(u64, u64)>,
    prefix: Vec<u64>,
}

impl WeightedMultiset {
    /// Builds from (size, multiplicity) pairs; duplicates merge, zeros drop.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> WeightedMultiset {
        let mut items: Vec<(u64, u64)> = pairs
            .into_iter()
            .filter(|&(size, mult)| mult > 0 && size > 0)
            .collect();
        items.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(items.len());
        for (size, mult) in items {
            match merged.last_mut() {
                Some((s, m)) if *s == size => *m += mult,
                _ => merged.push((size, mult)),
            }
        }
        let mut prefix = Vec::with_capacity(merged.len());
        let mut acc = 0u64;
        for &(_, m) in &merged {
            acc += m;
            prefix.push(acc);
        }
        WeightedMultiset { items: merged, prefix }
    }

    /// Number of members with size at most y.
    pub fn count_le(&self, y: u64) -> u64 {
        let idx = self.items.partition_point(|&(size, _)| size <= y);
        if idx == 0 {
            0
        } else {
            self.prefix[idx - 1]
        }
    }

    pub fn total(&self) -> u64 {
        self.prefix.last().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.items.iter().copied()
    }

    pub fn min_size(&self) -> Option<u64> {
        self.items.first().map(|&(s, _)| s)
    }

    /// Smallest C with count_le(y) <= C * y for all y >= 1; the maximum of
    /// count_le(s)/s is attained at the support points.
    pub fn linear_upper_constant(&self) -> f64 {
        self.items
            .iter()
            .zip(&self.prefix)
            .map(|(&(size, _), &cum)| cum as f64 / size as f64)
            .fold(0.0, f64::max)
    }
}

/// Exact count of pairs (u, r) from the two multisets with
/// size(u)^a * size(r)^b <= x.
pub fn product_count(first: &WeightedMultiset, second: &WeightedMultiset, a: u32, b: u32, x: u128) -> u64 {
    assert!(a >= 1 && b >= 1);
    let mut total = 0u64;
    for (r, mult) in second.iter() {
        let rb = (r as u128).pow(b);
        if rb > x {
            continue;
        }
        let budget = (x / rb).nth_root(a);
        let budget = u64::try_from(budget).unwrap_or(u64::MAX);
        total += mult * first.count_le(budget);
    }
    total
}

/// Closed-form upper bound c1 * x^{1/a} * sum_r mult(r) r^{-b/a}, valid
/// whenever count_le of the first multiset is bounded by c1 * y.
pub fn product_count_upper(c1: f64, second: &WeightedMultiset, a: u32, b: u32, x: u128) -> f64 {
    let exponent = -(b as f64) / a as f64;
    let tail: f64 = second
        .iter()
        .map(|(r, mult)| mult as f64 * (r as f64).powf(exponent))
        .sum();
    c1 * (x as f64).powf(1.0 / a as f64) * tail
}

/// Lower-bound constant for the pair count: with count_le of the first
/// multiset at least c1 * y for y >= 1 and the second multiset counting at
/// least c2 * y^alpha members up to y, the pair count is at least
/// min(c1 c2, c1 c2 * (a / (b - a alpha)) * (1 - 2^{alpha - b/a})) * x^{1/a}.
/// Requires b - a * alpha > 0, so the second family's sizes cannot dominate.
pub fn lower_bound_constant(c1: f64, c2: f64, a: u32, b: u32, alpha: f64) -> f64 {
    let (a, b) = (a as f64, b as f64);
    assert!(b - a * alpha > 0.0, "need b > a * alpha for a convergent tail");
    let dyadic = c1 * c2 * (a / (b - a * alpha)) * (1.0 - 2f64.powf(alpha - b / a));
    (c1 * c2).min(dyadic)
}

/// Histograms, indexed by omega (number of prime factors), of squarefree
/// integers up to each threshold whose prime factors are = 1 mod ell and not
/// excluded. Thresholds need not be sorted; histograms come back in the same
/// order, each padded to a common length.
pub fn omega_histograms(xs: &[u64], ell: u64, excluded: &[u64]) -> Vec<Vec<u64>> {
    assert!(!xs.is_empty());
    let max_x = *xs.iter().max().unwrap();
    let mut sorted: Vec<u64> = xs.to_vec();
    sorted.sort_unstable();

    let sieve = PrimeSieve::new(max_x);
    let primes: Vec<u64> = sieve
        .primes()
        .filter(|&p| p % ell == 1 && !excluded.contains(&p))
        .collect();

    // first_hit[omega][i] counts products whose smallest admitting threshold
    // is sorted[i]; suffix sums then give the per-threshold histograms.
    let mut first_hit: Vec<Vec<u64>> = Vec::new();
    let mut stack: Vec<(usize, u64, usize)> = vec![(0, 1, 0)];
    while let Some((from, product, omega)) = stack.pop() {
        let slot = sorted.partition_point(|&x| x < product);
        if slot == sorted.len() {
            continue;
        }
        while first_hit.len() <= omega {
            first_hit.push(vec![0; sorted.len()]);
        }
        first_hit[omega][slot] += 1;
        for (j, &p) in primes.iter().enumerate().skip(from) {
            if p > max_x / product {
                break;
            }
            stack.push((j + 1, product * p, omega + 1));
        }
    }

    let width = first_hit.len().max(1);
    let mut per_threshold: Vec<Vec<u64>> = vec![vec![0; width]; sorted.len()];
    for (omega, hits) in first_hit.iter().enumerate() {
        let mut acc = 0u64;
        for i in 0..sorted.len() {
            acc += hits[i];
            per_threshold[i][omega] = acc;
        }
    }

    xs.iter()
        .map(|&x| {
            let i = sorted.partition_point(|&s| s < x);
            per_threshold[i].clone()
        })
        .collect()
}

pub fn omega_histogram(x: u64, ell: u64, excluded: &[u64]) -> Vec<u64> {
    omega_histograms(&[x], ell, excluded).pop().unwrap()
}

/// Sum of z^omega over the histogram.
pub fn weighted_sum(hist: &[u64], z: f64) -> f64 {
    hist.iter()
        .enumerate()
        .map(|(omega, &count)| count as f64 * z.powi(omega as i32))
        .sum()
}

/// Exact integer value of the z^omega sum for integer z.
pub fn weighted_sum_exact(hist: &[u64], z: u64) -> u128 {
    hist.iter()
        .enumerate()
        .map(|(omega, &count)| count as u128 * (z as u128).pow(omega as u32))
        .sum()
}

/// A least-squares line through (ln x, ln y).
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Least-squares fit of ln y against ln x; needs at least three samples with
/// positive coordinates.
pub fn loglog_fit(samples: &[(f64, f64)]) -> FitResult {
    assert!(samples.len() >= 3, "need at least three samples");
    assert!(
        samples.iter().all(|&(x, y)| x > 0.0 && y > 0.0),
        "samples must be positive"
    );
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    assert!(denom.abs() > 1e-12, "samples must spread over distinct x");
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_residual = pts
        .iter()
        .map(|&(lx, ly)| (ly - slope * lx - intercept).abs())
        .fold(0.0, f64::max);
    FitResult { slope, intercept, max_residual }
}

/// Growth exponent of a nondecreasing partial-sum sequence, read off as the
/// log-log slope of the last samples; sequences that have stopped growing
/// report zero.
pub fn abscissa_estimate(samples: &[(u64, f64)]) -> f64 {
    let positive: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(n, v)| (n as f64, v))
        .collect();
    if positive.len() < 3 {
        return 0.0;
    }
    let last = positive.last().unwrap().1;
    let tail = &positive[positive.len() / 2..];
    if tail.iter().all(|&(_, v)| v == last) {
        // the sums stopped growing over the observed tail: converged
        return 0.0;
    }
    loglog_fit(&positive).slope
}
