//! Cyclic fields of odd prime degree over the rationals, enumerated by
//! conductor. A degree-ell cyclic field corresponds to a primitive order-ell
//! Dirichlet character up to inversion; its conductor is squarefree away
//! from ell, built from primes congruent to 1 mod ell, with an optional
//! wild factor ell^2, and its discriminant is conductor^(ell-1).

use std::collections::{BTreeMap, HashSet};

use num_integer::Roots;

use crate::arith::{self, PrimeSieve};
use crate::disc::RamProfile;
use crate::error::FieldError;
use crate::perm::CycleType;

pub const SUPPORTED_ELL: [u64; 3] = [3, 5, 7];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicField {
    pub ell: u64,
    pub conductor: u64,
    /// Position among the fields sharing this conductor, in the order the
    /// character tuples are generated; stable across runs.
    pub character_index: u64,
    pub disc: u128,
    pub ram: RamProfile,
}

fn check_ell(ell: u64) -> Result<(), FieldError> {
    if SUPPORTED_ELL.contains(&ell) {
        Ok(())
    } else {
        Err(FieldError::UnsupportedEll { ell })
    }
}

/// Local factors of a valid conductor: the tame primes, each exactly once
/// and congruent to 1 mod ell, plus at most one wild factor ell^2 (counted
/// as one). None if the integer is not a conductor for degree ell.
fn conductor_factors(ell: u64, f: u64) -> Option<Vec<u64>> {
    if f <= 1 {
        return None;
    }
    let mut factors = Vec::new();
    let mut rest = f;
    if rest.is_multiple_of(ell) {
        if !rest.is_multiple_of(ell * ell) || (rest / (ell * ell)).is_multiple_of(ell) {
            return None;
        }
        rest /= ell * ell;
        factors.push(ell * ell);
    }
    for (p, e) in arith::factorize(rest) {
        if e != 1 || p % ell != 1 {
            return None;
        }
        factors.push(p);
    }
    Some(factors)
}

/// Number of degree-ell cyclic fields with conductor exactly f, by the
/// counting formula: (ell-1)^(t-1) over the t local factors, zero when f is
/// not a conductor.
pub fn conductor_field_count(ell: u64, f: u64) -> u64 {
    match conductor_factors(ell, f) {
        Some(factors) => (ell - 1).pow(factors.len() as u32 - 1),
        None => 0,
    }
}

struct LocalCharacters {
    q: u64,
    /// Discrete logs to a fixed primitive root, reduced mod ell and scaled
    /// so a unit's character exponent is j * dlog(a) mod ell.
    dlog_mod_ell: BTreeMap<u64, u64>,
    /// Character labels j with chi_j primitive of conductor exactly q.
    primitive_js: Vec<u64>,
}

fn local_characters(ell: u64, q: u64) -> LocalCharacters {
    let phi = arith::euler_phi(q);
    if !phi.is_multiple_of(ell) {
        // no order-ell characters at all; this also skips the powers of 2,
        // whose unit groups need not be cyclic
        return LocalCharacters { q, dlog_mod_ell: BTreeMap::new(), primitive_js: Vec::new() };
    }
    let g = (2..q)
        .find(|&g| {
            g % smallest_prime_power_base(q) != 0
                && arith::factorize(phi)
                    .iter()
                    .all(|&(r, _)| pow_mod(g, phi / r, q) != 1)
        })
        .expect("odd prime power groups of units are cyclic");
    let mut dlog = BTreeMap::new();
    let mut pow = 1u64;
    for k in 0..phi {
        dlog.insert(pow, k % ell);
        pow = pow * g % q;
    }
    // chi_j(g^k) has exponent j*k mod ell; primitive means nontrivial on
    // the kernel of reduction to q/p, generated by g^(phi/p)
    let p = smallest_prime_power_base(q);
    let depth_exponent = if q == p { 1 } else { phi / p % ell };
    let primitive_js = (1..ell).filter(|j| j * depth_exponent % ell != 0).collect();
    LocalCharacters { q, dlog_mod_ell: dlog, primitive_js }
}

fn smallest_prime_power_base(q: u64) -> u64 {
    arith::smallest_prime_divisor(q).expect("prime powers exceed 1")
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Counts the degree-ell cyclic fields of conductor exactly f by explicit
/// enumeration of character kernels inside the units mod f: every tuple of
/// primitive local characters is evaluated on all units and the distinct
/// kernels are counted. Independent of [`conductor_field_count`] — it never
/// looks at the shape of f.
pub fn kernel_count_oracle(ell: u64, f: u64) -> u64 {
    if f <= 1 {
        return 0;
    }
    let locals: Vec<LocalCharacters> =
        arith::factorize(f).iter().map(|&(p, e)| local_characters(ell, p.pow(e))).collect();
    if locals.iter().any(|l| l.primitive_js.is_empty()) {
        return 0;
    }
    let units: Vec<u64> = (1..f).filter(|&a| num_integer::gcd(a, f) == 1).collect();
    let unit_logs: Vec<Vec<u64>> = units
        .iter()
        .map(|&a| locals.iter().map(|l| l.dlog_mod_ell[&(a % l.q)]).collect())
        .collect();
    let mut kernels: HashSet<Vec<u64>> = HashSet::new();
    let mut tuple_index = vec![0usize; locals.len()];
    loop {
        let js: Vec<u64> =
            locals.iter().zip(&tuple_index).map(|(l, &i)| l.primitive_js[i]).collect();
        let kernel: Vec<u64> = units
            .iter()
            .zip(&unit_logs)
            .filter(|(_, logs)| {
                logs.iter().zip(&js).map(|(&k, &j)| k * j).sum::<u64>() % ell == 0
            })
            .map(|(&a, _)| a)
            .collect();
        kernels.insert(kernel);
        let mut pos = 0;
        loop {
            if pos == tuple_index.len() {
                return kernels.len() as u64;
            }
            tuple_index[pos] += 1;
            if tuple_index[pos] < locals[pos].primitive_js.len() {
                break;
            }
            tuple_index[pos] = 0;
            pos += 1;
        }
    }
}

fn ram_profile_for_conductor(ell: u64, factors: &[u64]) -> RamProfile {
    let mut profile = RamProfile::new();
    for &q in factors {
        if q == ell * ell {
            profile
                .insert_wild(ell, 2 * (ell - 1), &format!("w{ell}"))
                .expect("wild entry is fresh and positive");
        } else {
            let total = CycleType::new(vec![ell as u32]).expect("one part of size ell");
            profile.insert_tame(q, total).expect("tame prime does not divide its own part");
        }
    }
    profile
}

/// All degree-ell cyclic fields with discriminant at most max_disc, sorted
/// by discriminant, conductor, then character index.
pub fn enumerate_cyclic(ell: u64, max_disc: u128) -> Result<Vec<CyclicField>, FieldError> {
    check_ell(ell)?;
    let max_conductor = max_disc.nth_root(ell as u32 - 1).min(u64::MAX as u128) as u64;
    enumerate_cyclic_by_conductor(ell, max_conductor)
}

/// All degree-ell cyclic fields with conductor at most max_conductor.
pub fn enumerate_cyclic_by_conductor(
    ell: u64,
    max_conductor: u64,
) -> Result<Vec<CyclicField>, FieldError> {
    check_ell(ell)?;
    let mut fields = Vec::new();
    if max_conductor < 2 {
        return Ok(fields);
    }
    let sieve = PrimeSieve::new(max_conductor);
    let tame: Vec<u64> = sieve.primes().filter(|p| p % ell == 1).collect();
    let mut seeds = vec![1u64];
    if ell * ell <= max_conductor {
        seeds.push(ell * ell);
    }
    for seed in seeds {
        let mut stack = vec![(seed, if seed == 1 { 0u32 } else { 1 }, 0usize)];
        while let Some((f, t, next)) = stack.pop() {
            if t > 0 {
                let factors = conductor_factors(ell, f).expect("products built from valid parts");
                let ram = ram_profile_for_conductor(ell, &factors);
                let disc = (f as u128).pow(ell as u32 - 1);
                for character_index in 0..(ell - 1).pow(t - 1) {
                    fields.push(CyclicField { ell, conductor: f, character_index, disc, ram: ram.clone() });
                }
            }
            for (i, &p) in tame.iter().enumerate().skip(next) {
                match f.checked_mul(p) {
                    Some(next_f) if next_f <= max_conductor => stack.push((next_f, t + 1, i + 1)),
                    _ => break,
                }
            }
        }
    }
    fields.sort_by_key(|fld| (fld.disc, fld.conductor, fld.character_index));
    Ok(fields)
}

/// Counts enumerated fields with discriminant at most each of the given
/// bounds (bounds must be ascending).
pub fn cyclic_counts(fields: &[CyclicField], bounds: &[u128]) -> Vec<u64> {
    debug_assert!(bounds.windows(2).all(|w| w[0] <= w[1]));
    bounds
        .iter()
        .map(|&x| fields.iter().filter(|fld| fld.disc <= x).count() as u64)
        .collect()
}
