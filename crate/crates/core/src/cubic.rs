//! Integral binary cubic forms: discriminants, Hessians, GL2(Z) reduction
//! and canonical class representatives, maximality at squared primes, local
//! ramification data, and a bounded enumeration of classes by discriminant
//! run under two independent scan strategies.

use num_integer::{Integer, Roots};
use std::sync::OnceLock;

use crate::arith::PrimeSieve;
use crate::disc::RamProfile;
use crate::error::FieldError;
use crate::perm::CycleType;

/// Largest |disc| bound the enumerator accepts; keeps every intermediate in
/// comfortable integer ranges.
pub const MAX_ENUM_BOUND: u64 = 100_000_000;

/// Default enumeration cap; raise via [`EnumOptions::cap`] up to
/// [`MAX_ENUM_BOUND`].
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// a x^3 + b x^2 y + c x y^2 + d y^3 with integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CubicForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> CubicForm {
        CubicForm { a, b, c, d }
    }

    pub fn disc(&self) -> i128 {
        let (a, b, c, d) = self.wide();
        18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d
            - 27 * a * a * d * d
    }

    fn wide(&self) -> (i128, i128, i128, i128) {
        (self.a as i128, self.b as i128, self.c as i128, self.d as i128)
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let (a, b, c, d) = self.wide();
        ((a * x + b * y) * x + c * y * y) * x + d * y * y * y
    }

    /// Hessian coefficients (P, Q, R) = (b^2 - 3ac, bc - 9ad, c^2 - 3bd);
    /// its discriminant Q^2 - 4PR equals -3 disc.
    pub fn hessian(&self) -> (i128, i128, i128) {
        let (a, b, c, d) = self.wide();
        (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)
    }

    pub fn content(&self) -> u64 {
        let mut g = self.a.unsigned_abs();
        for v in [self.b, self.c, self.d] {
            g = g.gcd(&v.unsigned_abs());
        }
        g
    }

    pub fn neg(&self) -> CubicForm {
        CubicForm::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// Conjugate by diag(1, -1): flips the signs of b and d.
    pub fn j_flip(&self) -> CubicForm {
        CubicForm::new(self.a, -self.b, self.c, -self.d)
    }

    /// Substitution (x, y) -> (p x + q y, r x + s y) for m = [p, q, r, s].
    pub fn act(&self, m: [i64; 4]) -> CubicForm {
        let [p, q, r, s] = m.map(|v| v as i128);
        let (a, b, c, d) = self.wide();
        let a2 = ((a * p + b * r) * p + c * r * r) * p + d * r * r * r;
        let d2 = ((a * q + b * s) * q + c * s * s) * q + d * s * s * s;
        let b2 = 3 * a * p * p * q
            + b * (p * p * s + 2 * p * q * r)
            + c * (2 * p * r * s + q * r * r)
            + 3 * d * r * r * s;
        let c2 = 3 * a * p * q * q
            + b * (q * q * r + 2 * p * q * s)
            + c * (p * s * s + 2 * q * r * s)
            + 3 * d * r * s * s;
        let narrow = |v: i128| i64::try_from(v).expect("coefficients stay in range");
        CubicForm::new(narrow(a2), narrow(b2), narrow(c2), narrow(d2))
    }

    /// Ordering key: prefer small magnitudes, positive over negative, from a
    /// through d.
    pub fn key(&self) -> [(u64, bool); 4] {
        [self.a, self.b, self.c, self.d].map(|v| (v.unsigned_abs(), v < 0))
    }

    /// No rational root, equivalently no linear factor over Q.
    pub fn is_irreducible(&self) -> bool {
        if self.a == 0 || self.d == 0 {
            return false;
        }
        for w in divisors(self.a.unsigned_abs()) {
            for u in divisors(self.d.unsigned_abs()) {
                if u.gcd(&w) != 1 {
                    continue;
                }
                let (u, w) = (u as i128, w as i128);
                if self.eval(u, w) == 0 || self.eval(-u, w) == 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Display for CubicForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Matrices with entries in {-1, 0, 1} and determinant +-1; any GL2(Z) map
/// between weakly reduced forms of positive discriminant lies here.
fn small_unimodular() -> &'static Vec<[i64; 4]> {
    static CELL: OnceLock<Vec<[i64; 4]>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        let vals = [-1i64, 0, 1];
        for &p in &vals {
            for &q in &vals {
                for &r in &vals {
                    for &s in &vals {
                        if (p * s - q * r).abs() == 1 {
                            out.push([p, q, r, s]);
                        }
                    }
                }
            }
        }
        out
    })
}

/// Weak Hessian reduction: 1 <= P, |Q| <= P <= R.
pub fn is_weakly_reduced(f: &CubicForm) -> bool {
    let (p, q, r) = f.hessian();
    p >= 1 && q.abs() <= p && p <= r
}

/// Canonical representative of the class of a weakly reduced form with
/// positive discriminant: the key-minimal weakly reduced form in its orbit.
pub fn canonical_positive(f: &CubicForm) -> CubicForm {
    debug_assert!(f.disc() > 0);
    assert!(is_weakly_reduced(f), "input must be weakly reduced");
    let mut best: Option<CubicForm> = None;
    for &m in small_unimodular() {
        let g = f.act(m);
        for cand in [g, g.neg()] {
            if is_weakly_reduced(&cand)
                && best.is_none_or(|b| cand.key() < b.key())
            {
                best = Some(cand);
            }
        }
    }
    best.expect("the input itself is a candidate")
}

/// Sign of F(u, v) for v > 0, which is the sign of the dehomogenized cubic
/// at u/v.
fn sign_at(f: &CubicForm, u: i128, v: i128) -> i128 {
    debug_assert!(v > 0);
    f.eval(u, v).signum()
}

/// Reduction test for forms of negative discriminant with a > 0: the
/// positive quadratic factor (a, a t + b, a t^2 + b t + c) at the real root
/// t must satisfy |B| < A < C. All three conditions are exact rational sign
/// evaluations of the form; on irreducible input no evaluation can vanish,
/// and reducible input is rejected downstream regardless of the verdict.
pub fn is_reduced_negative(f: &CubicForm) -> bool {
    let (a, b, d) = (f.a as i128, f.b as i128, f.d as i128);
    if a <= 0 {
        return false;
    }
    // -A < B  <=>  t > -(a+b)/a  <=>  F(-(a+b), a) < 0
    if sign_at(f, -(a + b), a) >= 0 {
        return false;
    }
    // B < A  <=>  t < (a-b)/a  <=>  F(a-b, a) > 0
    if sign_at(f, a - b, a) <= 0 {
        return false;
    }
    // A < C  <=>  q(t) > 0 for q(t) = a t^2 + b t + c - a. The cubic gives
    // t q(t) = -(a t + d), so sign q(t) = -sign(a t + d) * sign(t):
    // sign(t) is -sign(d), and sign(a t + d) is +1 exactly when t > -d/a,
    // i.e. when F(-d, a) < 0.
    let sign_t = if d < 0 { 1 } else { -1 };
    let sign_at_d = if sign_at(f, -d, a) < 0 { 1 } else { -1 };
    let sign_q = -sign_at_d * sign_t;
    sign_q > 0
}

/// Canonical representative for a reduced negative-discriminant form: the
/// smaller of the form and its diag(1, -1) conjugate, which is the only
/// other reduced form in the class with positive leading coefficient.
pub fn canonical_negative(f: &CubicForm) -> CubicForm {
    debug_assert!(is_reduced_negative(f));
    let j = f.j_flip();
    if j.key() < f.key() {
        j
    } else {
        *f
    }
}

fn div_round(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    (2 * num + den).div_euclid(2 * den)
}

/// Canonical representative of the class of any irreducible form with
/// nonzero discriminant, by full reduction followed by orbit minimization.
pub fn canonical(f: &CubicForm) -> CubicForm {
    assert!(f.is_irreducible(), "reduction needs an irreducible form");
    let d = f.disc();
    assert!(d != 0);
    if d > 0 {
        let mut g = *f;
        for _ in 0..10_000 {
            let (p, q, r) = g.hessian();
            debug_assert!(p > 0 && r > 0);
            if q.abs() > p {
                let k = div_round(-q, 2 * p);
                g = g.act([1, i64::try_from(k).expect("reduction step fits"), 0, 1]);
            } else if p > r {
                g = g.act([0, -1, 1, 0]);
            } else {
                return canonical_positive(&g);
            }
        }
        panic!("reduction did not terminate for {f}");
    } else {
        let mut g = if f.a > 0 { *f } else { f.neg() };
        for _ in 0..10_000 {
            if g.a < 0 {
                g = g.neg();
            }
            let (a, b) = (g.a as i128, g.b as i128);
            // translation by k sends B = a t + b to B - 2 a k; floor-sized
            // steps guided by the approximate root never overshoot by more
            // than one window width, and the exact sign tests gate each move
            let b_below_a = sign_at(&g, a - b, a) > 0;
            let b_above_neg_a = sign_at(&g, -(a + b), a) < 0;
            if !b_below_a || !b_above_neg_a {
                let t = real_root_approx(&g);
                let bb = g.a as f64 * t + g.b as f64;
                let steps = (bb.abs() / (2.0 * g.a as f64)).floor().max(1.0);
                let k = steps.min(1e6) as i64 * if b_below_a { 1 } else { -1 };
                g = g.act([1, k, 0, 1]);
                continue;
            }
            if is_reduced_negative(&g) {
                return canonical_negative(&g);
            }
            // |B| < A exactly but A >= C: swap the outer coefficients
            g = CubicForm::new(g.d, -g.c, g.b, -g.a);
        }
        panic!("reduction did not terminate for {f}");
    }
}

/// The real root of an irreducible negative-discriminant cubic, numerically.
fn real_root_approx(f: &CubicForm) -> f64 {
    let (a, b, c, d) = (f.a as f64, f.b as f64, f.c as f64, f.d as f64);
    let p = |t: f64| ((a * t + b) * t + c) * t + d;
    let bound = 1.0 + (b.abs().max(c.abs()).max(d.abs())) / a.abs();
    let (mut lo, mut hi) = (-bound, bound);
    debug_assert!(p(lo) < 0.0 && p(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * bound {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Projective multiple roots of the reduction mod p: points (u : v) with
/// F, dF/dx and dF/dy all zero mod p. Returned as (u, v) with v in {0, 1}.
fn multiple_roots_mod_p(f: &CubicForm, p: u64) -> Vec<(u64, u64)> {
    let p = p as i128;
    let mut out = Vec::new();
    let fx = |x: i128, y: i128| {
        (3 * f.a as i128 * x * x + 2 * f.b as i128 * x * y + f.c as i128 * y * y).rem_euclid(p)
    };
    let fy = |x: i128, y: i128| {
        (f.b as i128 * x * x + 2 * f.c as i128 * x * y + 3 * f.d as i128 * y * y).rem_euclid(p)
    };
    for u in 0..p {
        if f.eval(u, 1).rem_euclid(p) == 0 && fx(u, 1) == 0 && fy(u, 1) == 0 {
            out.push((u as u64, 1));
        }
    }
    if f.eval(1, 0).rem_euclid(p) == 0 && fx(1, 0) == 0 && fy(1, 0) == 0 {
        out.push((1, 0));
    }
    out
}

/// Multiplicity pattern of the projective roots of F mod p, descending.
fn root_multiplicities(f: &CubicForm, p: u64) -> Vec<u32> {
    let pw = p as i128;
    let mut mults = Vec::new();
    for u in 0..p as i128 {
        if f.eval(u, 1).rem_euclid(pw) != 0 {
            continue;
        }
        // multiplicity of (u : 1): largest k with (x - u y)^k dividing F mod p
        let mut coeffs = [f.a as i128, f.b as i128, f.c as i128, f.d as i128];
        let mut k = 0u32;
        loop {
            // evaluate the degree-(3-k) polynomial at u
            let deg = 3 - k as usize;
            let mut val = 0i128;
            for c in coeffs.iter().take(deg + 1) {
                val = (val * u + c).rem_euclid(pw);
            }
            if val != 0 {
                break;
            }
            k += 1;
            if k == 4 {
                break;
            }
            // synthetic division by (x - u)
            let mut acc = 0i128;
            for c in coeffs.iter_mut().take(deg + 1) {
                acc = (acc * u + *c).rem_euclid(pw);
                *c = acc;
            }
            // after division the quotient sits in coeffs[0..deg]
        }
        if k > 0 {
            mults.push(k);
        }
    }
    // the point at infinity (1 : 0) has multiplicity = 3 - degree of F(x, 1) mod p
    let dehom = [f.a, f.b, f.c, f.d].map(|v| (v as i128).rem_euclid(pw));
    let degree = dehom.iter().position(|&v| v != 0).map(|i| 3 - i);
    match degree {
        Some(deg) if deg < 3 => mults.push(3 - deg as u32),
        None => mults.push(3),
        _ => {}
    }
    mults.sort_unstable_by(|x, y| y.cmp(x));
    mults
}

/// Maximality at p: every multiple root of F mod p must fail the p^2 lift
/// test. Changing the lift moves F by multiples of p * (partials) + p^2,
/// and the partials vanish at a multiple root, so the value mod p^2 is
/// well defined.
pub fn is_maximal_at(f: &CubicForm, p: u64) -> bool {
    let p2 = (p as i128) * (p as i128);
    for (u, v) in multiple_roots_mod_p(f, p) {
        if f.eval(u as i128, v as i128).rem_euclid(p2) == 0 {
            return false;
        }
    }
    true
}

/// Primitive with maximal order: content 1 and maximal at every prime whose
/// square divides the discriminant.
pub fn is_maximal(f: &CubicForm, sieve: &PrimeSieve) -> bool {
    if f.content() != 1 {
        return false;
    }
    let mut n = f.disc().unsigned_abs();
    assert!(n != 0);
    let lim = sieve.limit() as u128;
    assert!(lim * lim >= n, "sieve too small for this discriminant");
    for p in sieve.primes() {
        let pw = p as u128;
        if pw * pw > n {
            break;
        }
        if n.is_multiple_of(pw) {
            let mut e = 0;
            while n.is_multiple_of(pw) {
                n /= pw;
                e += 1;
            }
            if e >= 2 && !is_maximal_at(f, p) {
                return false;
            }
        }
    }
    // any cofactor above the loop bound is a single prime to the first power
    true
}

/// Local ramification data of a maximal irreducible form at the primes
/// dividing its discriminant.
pub fn ram_profile(f: &CubicForm) -> RamProfile {
    let disc = f.disc();
    let mut n = disc.unsigned_abs();
    let mut profile = RamProfile::new();
    let ct = |parts: &[u32]| CycleType::new(parts.to_vec()).unwrap();
    let mut p = 2u64;
    while n > 1 {
        if (p as u128) * (p as u128) > n {
            p = n as u64;
        }
        if !n.is_multiple_of(p as u128) {
            p += 1;
            continue;
        }
        let mut v = 0u64;
        while n.is_multiple_of(p as u128) {
            n /= p as u128;
            v += 1;
        }
        let datum_result = match p {
            2 => {
                let pattern = root_multiplicities(f, 2);
                if pattern == [3] {
                    assert_eq!(v, 2, "tame total ramification at 2 forces valuation 2");
                    profile.insert_tame(2, ct(&[3]))
                } else {
                    assert_eq!(pattern, [2, 1], "squared 2 needs a multiple root");
                    assert!(v == 2 || v == 3, "partial wild valuation at 2 is 2 or 3");
                    profile.insert_wild(2, v, "c2p")
                }
            }
            3 => {
                let pattern = root_multiplicities(f, 3);
                if v == 1 {
                    assert_eq!(pattern, [2, 1], "valuation 1 at 3 comes from a double root");
                    profile.insert_wild(3, 1, "c3p")
                } else {
                    assert!(
                        (3..=5).contains(&v),
                        "totally ramified valuation at 3 is 3, 4 or 5"
                    );
                    assert_eq!(pattern, [3], "higher valuation at 3 needs a triple root");
                    profile.insert_wild(3, v, "c3t")
                }
            }
            _ => match v {
                1 => profile.insert_tame(p, ct(&[2, 1])),
                2 => profile.insert_tame(p, ct(&[3])),
                _ => panic!("maximal form with p^3 | disc at p = {p}: {f}"),
            },
        };
        datum_result.expect("profile entries are fresh and valid");
        p += 1;
    }
    debug_assert_eq!(profile.disc().to_string(), disc.unsigned_abs().to_string());
    profile
}

/// Positive discriminants that are perfect squares belong to cyclic cubic
/// fields.
pub fn is_cyclic_disc(disc: i128) -> bool {
    if disc <= 0 {
        return false;
    }
    let n = disc as u128;
    let r = n.sqrt();
    r * r == n
}

/// One class of forms: the canonical representative and its discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubicClass {
    pub form: CubicForm,
    pub disc: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscSign {
    Positive,
    Negative,
}

/// Sharp scans use the proven reduction windows; coarse scans pad every
/// window and drop the derived cuts, re-filtering exactly. Identical output
/// from both attests the sharp windows lose nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanStrategy {
    Sharp,
    Coarse,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub strategy: ScanStrategy,
    pub require_maximal: bool,
    pub cap: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            strategy: ScanStrategy::Sharp,
            require_maximal: true,
            cap: DEFAULT_ENUM_CAP,
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

/// Enumerates the classes of irreducible primitive forms (maximal ones by
/// default) with 1 <= |disc| <= x of the requested sign, sorted by |disc|
/// then by the representative's key. A bound of 0 yields the empty list;
/// a bound above `opts.cap` is refused.
pub fn enumerate_cubic(
    x: u64,
    sign: DiscSign,
    opts: &EnumOptions,
) -> Result<Vec<CubicClass>, FieldError> {
    let cap = opts.cap.min(MAX_ENUM_BOUND);
    if x > cap {
        return Err(FieldError::BoundExceedsCap { bound: x as u128, cap: cap as u128 });
    }
    if x == 0 {
        return Ok(Vec::new());
    }
    let sieve = PrimeSieve::new((x.sqrt() + 2).max(10));
    let mut out = match sign {
        DiscSign::Positive => scan_positive(x, opts, &sieve),
        DiscSign::Negative => scan_negative(x, opts, &sieve),
    };
    out.sort_unstable_by_key(|cl| (cl.disc.unsigned_abs(), cl.form.key()));
    Ok(out)
}

fn accept_positive(
    f: &CubicForm,
    x: u64,
    opts: &EnumOptions,
    sieve: &PrimeSieve,
) -> Option<CubicClass> {
    let (p, q, r) = f.hessian();
    if p < 1 || p * p > x as i128 || q.abs() > p || r < p {
        return None;
    }
    let d = f.disc();
    if d < 1 || d > x as i128 {
        return None;
    }
    debug_assert_eq!(4 * p * r - q * q, 3 * d);
    if f.content() != 1 {
        return None;
    }
    if canonical_positive(f) != *f {
        return None;
    }
    if !f.is_irreducible() {
        return None;
    }
    if opts.require_maximal && !is_maximal(f, sieve) {
        return None;
    }
    Some(CubicClass { form: *f, disc: d as i64 })
}

fn accept_negative(
    f: &CubicForm,
    x: u64,
    opts: &EnumOptions,
    sieve: &PrimeSieve,
) -> Option<CubicClass> {
    let d = f.disc();
    if d > -1 || d < -(x as i128) {
        return None;
    }
    if f.content() != 1 {
        return None;
    }
    if !is_reduced_negative(f) {
        return None;
    }
    if f.b == 0 && f.d < 0 {
        return None;
    }
    if !f.is_irreducible() {
        return None;
    }
    if opts.require_maximal && !is_maximal(f, sieve) {
        return None;
    }
    Some(CubicClass { form: *f, disc: d as i64 })
}

fn scan_positive(x: u64, opts: &EnumOptions, sieve: &PrimeSieve) -> Vec<CubicClass> {
    let xw = x as i128;
    let s = (x as u128).sqrt() as i128;
    let coarse = matches!(opts.strategy, ScanStrategy::Coarse);
    // 27 a^2 <= 4 sqrt(x), kept integral by squaring; coarse adds headroom
    let mut a_cap = 0i128;
    while 729 * (a_cap + 1).pow(4) <= 16 * xw {
        a_cap += 1;
    }
    if coarse {
        a_cap += 2;
    }
    let mut out = Vec::new();
    for a in 1..=a_cap {
        // nonempty c-window needs (2b - 3a)^2 + 27 a^2 <= 4 sqrt(x); the left
        // side dips until 2b reaches 3a and grows afterwards
        let b_cap = if coarse {
            (1.5 * a as f64 + (x as f64).powf(0.25)).floor() as i128 + 2
        } else {
            let mut cap = 0i128;
            let mut b = 0i128;
            loop {
                let e = (2 * b - 3 * a).pow(2) + 27 * a * a;
                if e * e <= 16 * xw {
                    cap = b;
                } else if 2 * b > 3 * a {
                    break;
                }
                b += 1;
            }
            cap
        };
        for b in 0..=b_cap {
            // 1 <= P = b^2 - 3ac <= sqrt(x), and R >= P forces c <= b - 3a
            let c_lo = ceil_div(b * b - s, 3 * a) - if coarse { 2 } else { 0 };
            let mut c_hi = floor_div(b * b - 1, 3 * a);
            if !coarse {
                c_hi = c_hi.min(b - 3 * a);
            }
            for c in c_lo..=c_hi {
                let p = b * b - 3 * a * c;
                if p < 1 || p * p > xw {
                    continue;
                }
                // |Q| <= P with Q = bc - 9ad
                let pad_d = if coarse { 1 } else { 0 };
                let d_lo = ceil_div(b * c - p, 9 * a) - pad_d;
                let d_hi = floor_div(b * c + p, 9 * a) + pad_d;
                for dd in d_lo..=d_hi {
                    let f = CubicForm::new(a as i64, b as i64, c as i64, dd as i64);
                    if let Some(class) = accept_positive(&f, x, opts, sieve) {
                        out.push(class);
                    }
                }
            }
        }
    }
    out
}

fn scan_negative(x: u64, opts: &EnumOptions, sieve: &PrimeSieve) -> Vec<CubicClass> {
    let xf = x as f64;
    let (pad, skip_envelope) = match opts.strategy {
        ScanStrategy::Sharp => (2.0f64, false),
        ScanStrategy::Coarse => (6.0, true),
    };
    let mut a_cap = 0i64;
    while 27 * (a_cap as i128 + 1).pow(4) <= 16 * x as i128 {
        a_cap += 1;
    }
    if skip_envelope {
        a_cap += 2;
    }
    let mut out = Vec::new();
    for a in 1..=a_cap {
        let af = a as f64;
        let theta = 0.5 + (xf / (3.0 * af.powi(4))).powf(0.25);
        let p_max = (16.0 * xf / (27.0 * af.powi(4))).cbrt();
        let b_hi = (af * (theta + 1.0)).floor() as i64 + 1;
        for b in 0..=b_hi {
            let bf = b as f64;
            // real-root window from |B| < A, intersected with |t| <= theta
            let t_lo = (-(bf + af) / af).max(-theta) - 1e-9;
            let t_hi = ((af - bf) / af).min(theta) + 1e-9;
            if t_lo > t_hi {
                continue;
            }
            // envelope of psi(t) = a t^2 + b t over the window
            let mut psi_min = f64::INFINITY;
            let mut psi_max = f64::NEG_INFINITY;
            let mut probe = |t: f64| {
                let v = af * t * t + bf * t;
                psi_min = psi_min.min(v);
                psi_max = psi_max.max(v);
            };
            probe(t_lo);
            probe(t_hi);
            let vertex = -bf / (2.0 * af);
            if vertex > t_lo && vertex < t_hi {
                probe(vertex);
            }
            if skip_envelope {
                psi_min = psi_min.min(-bf * theta - af * theta * theta);
                psi_max = psi_max.max(bf * theta + af * theta * theta);
            }
            let c_lo = (af - psi_max - pad).floor() as i64;
            let c_hi = (af * p_max - psi_min + pad).ceil() as i64;
            for c in c_lo..=c_hi {
                scan_negative_d(a, b, c, x, theta, p_max, pad, opts, sieve, &mut out);
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_negative_d(
    a: i64,
    b: i64,
    c: i64,
    x: u64,
    theta: f64,
    p_max: f64,
    pad: f64,
    opts: &EnumOptions,
    sieve: &PrimeSieve,
    out: &mut Vec<CubicClass>,
) {
    // disc as a function of d: -27 a^2 d^2 + (18abc - 4b^3) d + (b^2c^2 - 4ac^3)
    let (af, bf, cf) = (a as f64, b as f64, c as f64);
    let qa = -27.0 * af * af;
    let qb = 18.0 * af * bf * cf - 4.0 * bf * bf * bf;
    let qc = bf * bf * cf * cf - 4.0 * af * cf * cf * cf;
    let d_cap = af * theta * p_max + pad;

    // outer interval: disc >= -x
    let outer = qb * qb - 4.0 * qa * (qc + x as f64);
    if outer < 0.0 {
        return;
    }
    let sq_outer = outer.sqrt();
    let r1 = (-qb + sq_outer) / (2.0 * qa);
    let r2 = (-qb - sq_outer) / (2.0 * qa);

    // inner gap: disc > -1 between these roots (if they exist)
    let inner = qb * qb - 4.0 * qa * (qc + 1.0);
    let mut ranges: Vec<(i64, i64)> = Vec::new();
    let mut push = |lo: f64, hi: f64| {
        let lo = (lo - pad).max(-d_cap).floor() as i64;
        let hi = (hi + pad).min(d_cap).ceil() as i64;
        if lo <= hi {
            ranges.push((lo, hi));
        }
    };
    if inner >= 0.0 {
        let sq_inner = inner.sqrt();
        let q1 = (-qb + sq_inner) / (2.0 * qa);
        let q2 = (-qb - sq_inner) / (2.0 * qa);
        push(r1, q1);
        push(q2, r2);
    } else {
        push(r1, r2);
    }
    // padding can make the two intervals overlap; merge to visit each d once
    if ranges.len() == 2 && ranges[1].0 <= ranges[0].1 {
        ranges = vec![(ranges[0].0, ranges[0].1.max(ranges[1].1))];
    }

    for (lo, hi) in ranges {
        for d in lo..=hi {
            let f = CubicForm::new(a, b, c, d);
            if let Some(class) = accept_negative(&f, x, opts, sieve) {
                out.push(class);
            }
        }
    }
}
