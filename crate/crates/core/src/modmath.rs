//! Exact modular arithmetic for moduli up to 2^50.
//!
//! Residues are plain `u64` values in `[0, N)`. Every product goes through a
//! 128-bit intermediate, so nothing here can overflow for `N <= 2^50`.

use std::fmt;

use thiserror::Error;

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 50;

/// Largest `k` for which [`catalan`] is defined.
pub const MAX_CATALAN_INDEX: u32 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModMathError {
    #[error("{value} is outside the supported range [{min}, {max}]")]
    OutOfRange { value: u64, min: u64, max: u64 },
    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: u64, modulus: u64 },
    #[error("Catalan index {0} exceeds {MAX_CATALAN_INDEX}")]
    CatalanRange(u32),
}

/// A modulus `N` together with its prime factorization.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    /// Factorizes `n`; shorthand for [`factorize`].
    pub fn new(n: u64) -> Result<Self, ModMathError> {
        factorize(n)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(p, n_{N,p})` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in `N` (0 if `p` does not divide `N`).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Largest prime-power exponent of `N`.
    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    /// Product of the distinct primes dividing `N`.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.value
    }

    /// Maps a signed integer into `[0, N)`.
    pub fn reduce_signed(&self, a: i128) -> u64 {
        a.rem_euclid(self.value as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        mod_add(a, b, self.value)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        mod_sub(a, b, self.value)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        mod_sub(0, a, self.value)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mod_mul(a, b, self.value)
    }

    #[inline]
    pub fn pow(&self, a: u64, e: u64) -> u64 {
        mod_pow(a, e, self.value)
    }

    pub fn inverse(&self, a: u64) -> Result<u64, ModMathError> {
        mod_inverse(a, self)
    }

    /// `gcd(k!, N)`, computed from Legendre's formula without forming `k!`.
    pub fn gcd_factorial(&self, k: u64) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(legendre(k, p).min(e as u64) as u32))
            .product()
    }

    /// `k! mod N`.
    pub fn factorial(&self, k: u64) -> u64 {
        (1..=k).fold(self.reduce(1), |acc, i| self.mul(acc, self.reduce(i)))
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({} = {})", self.value, self)
    }
}

/// Renders the factorization, e.g. `2^5 * 47`.
impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// p-adic valuation of `k!`.
pub fn legendre(k: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = k;
    while q >= p {
        q /= p;
        total += q;
    }
    total
}

#[inline]
pub fn mod_add(a: u64, b: u64, n: u64) -> u64 {
    let s = a + b;
    if s >= n {
        s - n
    } else {
        s
    }
}

#[inline]
pub fn mod_sub(a: u64, b: u64, n: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + n - b
    }
}

#[inline]
pub fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        (a * b) % n
    } else {
        ((a as u128 * b as u128) % n as u128) as u64
    }
}

pub fn mod_pow(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, a, n);
        }
        a = mod_mul(a, a, n);
        e >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// `a^{-1} mod N`.
pub fn mod_inverse(a: u64, n: &Modulus) -> Result<u64, ModMathError> {
    let m = n.value();
    let a = a % m;
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return Err(ModMathError::NotUnit { value: a, modulus: m });
    }
    Ok(n.reduce_signed(x))
}

/// Solution set of `alpha * x ≡ beta (mod N)`.
///
/// The `gamma = gcd(alpha, N)` solutions are `x0 + t * step` for
/// `0 <= t < gamma`, with `step = N / gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSolutionSet {
    pub x0: u64,
    pub gamma: u64,
    pub step: u64,
    pub modulus: u64,
}

impl CongruenceSolutionSet {
    pub fn len(&self) -> u64 {
        self.gamma
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + Clone + '_ {
        (0..self.gamma).map(move |t| self.x0 + t * self.step)
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.modulus && x % self.step == self.x0
    }
}

/// Solves `alpha * x ≡ beta (mod N)`. Returns `None` iff `gcd(alpha, N)` does
/// not divide `beta`.
pub fn solve_linear_congruence(
    alpha: u64,
    beta: u64,
    n: &Modulus,
) -> Option<CongruenceSolutionSet> {
    let m = n.value();
    let (alpha, beta) = (alpha % m, beta % m);
    let gamma = gcd(alpha, m);
    if beta % gamma != 0 {
        return None;
    }
    let step = m / gamma;
    // x0 is the unique solution of (alpha/gamma) x ≡ beta/gamma (mod N/gamma).
    let x0 = if step == 1 {
        0
    } else {
        let (_, inv, _) = ext_gcd((alpha / gamma) as i128, step as i128);
        let inv = inv.rem_euclid(step as i128) as u64;
        mod_mul(inv, (beta / gamma) % step, step)
    };
    Some(CongruenceSolutionSet {
        x0,
        gamma,
        step,
        modulus: m,
    })
}

/// Exact Catalan number `C_k` for `k <= 50`.
pub fn catalan(k: u32) -> Result<u128, ModMathError> {
    if k > MAX_CATALAN_INDEX {
        return Err(ModMathError::CatalanRange(k));
    }
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // C_i = C_{i-1} * 2(2i-1) / (i+1); the division is exact.
        c = c * 2 * (2 * i - 1) / (i + 1);
    }
    Ok(c)
}

/// `C_k mod N` for `k <= 50`.
pub fn catalan_mod(k: u32, n: &Modulus) -> Result<u64, ModMathError> {
    Ok((catalan(k)? % n.value() as u128) as u64)
}

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
const SMALL_PRIME_BOUND: u64 = 1000;

/// Complete prime factorization of `n`, for `2 <= n <= 2^50`.
///
/// Inputs below 10^6 are handled by trial division. Larger inputs have their
/// small prime factors stripped by trial division and the cofactor split with
/// Pollard rho (Brent's variant), with deterministic Miller-Rabin as the
/// primality test.
pub fn factorize(n: u64) -> Result<Modulus, ModMathError> {
    if !(2..=MAX_MODULUS).contains(&n) {
        return Err(ModMathError::OutOfRange {
            value: n,
            min: 2,
            max: MAX_MODULUS,
        });
    }
    let mut primes = Vec::new();
    let bound = if n < TRIAL_DIVISION_LIMIT {
        TRIAL_DIVISION_LIMIT
    } else {
        SMALL_PRIME_BOUND
    };
    let rest = trial_divide(n, bound, &mut primes);
    if rest > 1 {
        split(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Modulus { value: n, factors })
}

fn trial_divide(mut n: u64, bound: u64, out: &mut Vec<u64>) -> u64 {
    let mut d = 2;
    while d < bound && d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 && d * d > n {
        // no divisor up to sqrt(n)
        out.push(n);
        return 1;
    }
    n
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split(d, out);
    split(n / d, out);
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Returns a non-trivial factor of the composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| mod_add(mod_mul(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys);
        let mut g;
        const BLOCK: u64 = 128;
        loop {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            loop {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mod_mul(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BLOCK;
                if k >= r || g != 1 {
                    break;
                }
            }
            r *= 2;
            if g != 1 {
                break;
            }
        }
        if g == n {
            // Backtrack one step at a time from the last checkpoint.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("some polynomial x^2 + c splits every composite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(m(1504).factors(), &[(2, 5), (47, 1)]);
        assert_eq!(m(7).factors(), &[(7, 1)]);
        assert_eq!(m(3 << 48).factors(), &[(2, 48), (3, 1)]);
        assert!(factorize(3 << 49).is_err());
        assert_eq!(m(2).factors(), &[(2, 1)]);
        assert_eq!(m(MAX_MODULUS).factors(), &[(2, 50)]);
        // two ~25-bit primes
        let p = 33_554_393u64;
        let q = 33_554_467u64;
        assert_eq!(m(p * q).factors(), &[(p, 1), (q, 1)]);
        assert_eq!(m(p * p).factors(), &[(p, 2)]);
        assert_eq!(format!("{}", m(1504)), "2^5 * 47");
    }

    #[test]
    fn factorize_range() {
        assert!(matches!(factorize(0), Err(ModMathError::OutOfRange { .. })));
        assert!(matches!(factorize(1), Err(ModMathError::OutOfRange { .. })));
        assert!(factorize(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn congruence_examples() {
        let n = m(1504);
        let s = solve_linear_congruence(2, 188, &n).unwrap();
        assert_eq!((s.x0, s.gamma), (94, 2));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![94, 846]);
        let s = solve_linear_congruence(6, 752, &n).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![376, 1128]);
        let s = solve_linear_congruence(1, 2000, &n).unwrap();
        assert_eq!((s.x0, s.gamma), (2000 % 1504, 1));
        assert!(solve_linear_congruence(2, 3, &n).is_none());
        // alpha ≡ 0: every x solves 0 ≡ 0
        let s = solve_linear_congruence(0, 0, &m(6)).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(117, &m(6016)), Ok(3805));
        assert_eq!(mod_inverse(1, &m(1504)), Ok(1));
        // exhaustive scan of residues mod 8
        let scan: Vec<u64> = (0..8).filter(|x| 5 * x % 8 == 1).collect();
        assert_eq!(scan, vec![5]);
        assert_eq!(mod_inverse(5, &m(8)), Ok(5));
        assert_eq!(
            mod_inverse(4, &m(8)),
            Err(ModMathError::NotUnit { value: 4, modulus: 8 })
        );
    }

    /// (2k)! / ((k+1)! k!) through prime-exponent counting.
    fn catalan_by_valuations(k: u64) -> u128 {
        let mut out: u128 = 1;
        for p in (2..=2 * k).filter(|&p| is_prime(p)) {
            let e = legendre(2 * k, p) - legendre(k + 1, p) - legendre(k, p);
            out *= (p as u128).pow(e as u32);
        }
        out
    }

    #[test]
    fn catalan_examples() {
        let first: Vec<u128> = (0..=6).map(|k| catalan(k).unwrap()).collect();
        assert_eq!(first, vec![1, 1, 2, 5, 14, 42, 132]);
        assert_eq!(catalan(50).unwrap(), catalan_by_valuations(50));
        assert_eq!(catalan(50).unwrap(), 1_978_261_657_756_160_653_623_774_456);
        assert_eq!(catalan(51), Err(ModMathError::CatalanRange(51)));
        for k in 2..=50u32 {
            let k128 = k as u128;
            assert_eq!(
                catalan(k).unwrap() * (k128 + 1),
                catalan(k - 1).unwrap() * 2 * (2 * k128 - 1)
            );
            assert_eq!(catalan(k).unwrap(), catalan_by_valuations(k as u64));
        }
    }

    #[test]
    fn mul_pow_examples() {
        let n = MAX_MODULUS - 1;
        assert_eq!(mod_mul(1 << 25, 1 << 25, n), 1);
        assert_eq!(mod_pow(12345, 0, n), 1);
        assert_eq!(mod_pow(12345, 0, 1), 0);
        assert_eq!(mod_mul(44034, 44034, 1 << 24), 9_613_316);
        let big = MAX_MODULUS - 3;
        let a = big - 1;
        assert_eq!(
            mod_mul(a, a, big) as u128,
            (a as u128 * a as u128) % big as u128
        );
    }

    #[test]
    fn gcd_factorial_matches_direct() {
        let n = m(1504);
        assert_eq!(n.gcd_factorial(1), 1);
        assert_eq!(n.gcd_factorial(2), 2);
        assert_eq!(n.gcd_factorial(3), 2);
        for k in 0..20u64 {
            let fact: u128 = (1..=k as u128).product();
            let direct = (fact % 6016) as u64;
            assert_eq!(m(6016).gcd_factorial(k), gcd(direct, 6016), "k={k}");
        }
    }

    proptest! {
        #[test]
        fn factorize_recomposes(n in 2u64..=MAX_MODULUS) {
            let md = m(n);
            let mut prev = 0;
            let mut prod = 1u64;
            for &(p, e) in md.factors() {
                prop_assert!(p > prev && e >= 1 && is_prime(p));
                prev = p;
                prod *= p.pow(e);
            }
            prop_assert_eq!(prod, n);
        }

        #[test]
        fn congruence_exhaustive(n in 2u64..2000, alpha in 0u64..4000, beta in 0u64..4000) {
            let md = m(n);
            let brute: Vec<u64> = (0..n).filter(|&x| (alpha % n) * x % n == beta % n).collect();
            match solve_linear_congruence(alpha, beta, &md) {
                None => prop_assert!(brute.is_empty()),
                Some(s) => {
                    prop_assert_eq!(s.gamma, gcd(alpha % n, n));
                    prop_assert_eq!(s.iter().collect::<Vec<_>>(), brute);
                    prop_assert!(s.x0 < s.step);
                }
            }
        }

        #[test]
        fn inverse_round_trip(n in 2u64..=MAX_MODULUS, a in any::<u64>()) {
            let md = m(n);
            if let Ok(inv) = mod_inverse(a, &md) {
                prop_assert_eq!(mod_mul(inv, a % n, n), 1 % n);
            } else {
                prop_assert_ne!(gcd(a % n, n), 1);
            }
        }
    }
}
