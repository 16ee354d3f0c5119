//! Small number-theory helpers: factorization, prime sieves, and Euler phi.

/// Prime factorization by trial division, as (prime, exponent) pairs in
/// increasing prime order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if (*n).is_multiple_of(p) {
            let mut e = 0u32;
            while (*n).is_multiple_of(p) {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.checked_mul(p).is_some_and(|sq| sq <= n) {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n > 1 && factorize(n) == [(n, 1)]
}

/// Smallest prime divisor; `None` for n <= 1.
pub fn smallest_prime_divisor(n: u64) -> Option<u64> {
    if n <= 1 {
        return None;
    }
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return Some(p);
        }
        p += 2;
    }
    Some(n)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Largest power of p dividing n.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut part = 1u64;
    let mut m = n;
    while m.is_multiple_of(p) {
        part *= p;
        m /= p;
    }
    part
}

/// Bit-packed sieve of Eratosthenes over [0, limit].
pub struct PrimeSieve {
    limit: u64,
    composite: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> PrimeSieve {
        let words = (limit as usize + 1).div_ceil(64);
        let mut composite = vec![0u64; words.max(1)];
        let mark = |bits: &mut Vec<u64>, i: u64| bits[(i / 64) as usize] |= 1 << (i % 64);
        mark(&mut composite, 0);
        if limit >= 1 {
            mark(&mut composite, 1);
        }
        let mut p = 2u64;
        while p * p <= limit {
            if composite[(p / 64) as usize] >> (p % 64) & 1 == 0 {
                let mut q = p * p;
                while q <= limit {
                    mark(&mut composite, q);
                    q += p;
                }
            }
            p += 1;
        }
        PrimeSieve { limit, composite }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "sieve only covers [0, {}]", self.limit);
        self.composite[(n / 64) as usize] >> (n % 64) & 1 == 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(2), vec![(2, 1)]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1_431_435_383), vec![(7, 6), (23, 3)]);
        assert_eq!(factorize(999_999_937), vec![(999_999_937, 1)]);
    }

    #[test]
    fn phi_and_p_part() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(30), 8);
        assert_eq!(p_part(360, 2), 8);
        assert_eq!(p_part(360, 7), 1);
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let sieve = PrimeSieve::new(10_000);
        for n in 0..=10_000u64 {
            assert_eq!(sieve.is_prime(n), is_prime(n), "n = {n}");
        }
        assert_eq!(sieve.primes().count(), 1229);
    }

    #[test]
    fn smallest_divisor() {
        assert_eq!(smallest_prime_divisor(1), None);
        assert_eq!(smallest_prime_divisor(15), Some(3));
        assert_eq!(smallest_prime_divisor(49), Some(7));
        assert_eq!(smallest_prime_divisor(97), Some(97));
    }
}
