//! Constant-free polynomials over `Z_N`.
//!
//! A [`PolyModN`] stores `g_1 .. g_K` densely (index 0 holds the coefficient
//! of `x`), with trailing zero coefficients trimmed so that structural
//! equality coincides with congruence modulo `N`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::modmath::{mod_add, mod_mul, mod_sub, Modulus};

/// Up to this many points, equivalence is decided by evaluating everywhere.
pub const POINTWISE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("tau_{index} = {value} exceeds gcd({index}!, N) - 1 = {max}")]
    TauOutOfRange { index: usize, value: u64, max: u64 },
    #[error("expected {expected} tau values, got {got}")]
    TauLength { expected: usize, got: usize },
    #[error("cannot parse polynomial term {term:?}: {reason}")]
    Parse { term: String, reason: &'static str },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyModN {
    modulus: Modulus,
    coeffs: Vec<u64>,
}

impl PolyModN {
    /// Builds `sum coeffs[i] * x^(i+1)`, reducing every coefficient mod `N`.
    pub fn new(modulus: Modulus, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        Self::from_reduced(modulus, coeffs)
    }

    fn from_reduced(modulus: Modulus, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyModN { modulus, coeffs }
    }

    pub fn zero(modulus: Modulus) -> Self {
        PolyModN {
            modulus,
            coeffs: Vec::new(),
        }
    }

    /// The polynomial `x`.
    pub fn identity(modulus: Modulus) -> Self {
        Self::new(modulus, [1])
    }

    /// `f1 x + f2 x^2`.
    pub fn quadratic(modulus: Modulus, f1: u64, f2: u64) -> Self {
        Self::new(modulus, [f1, f2])
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Coefficients `g_1 .. g_K`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (`k >= 1`).
    pub fn coeff(&self, k: usize) -> u64 {
        assert!(k >= 1, "constant-free polynomial has no x^0 coefficient");
        self.coeffs.get(k - 1).copied().unwrap_or(0)
    }

    /// Largest `k` with `g_k != 0`, or 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: u64) -> u64 {
        let n = self.modulus.value();
        let x = x % n;
        let inner = self
            .coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| mod_add(mod_mul(acc, x, n), c, n));
        mod_mul(inner, x, n)
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if self.modulus.value() != other.modulus.value() {
            return Err(PolyError::ModulusMismatch {
                left: self.modulus.value(),
                right: other.modulus.value(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.zip_with(other, mod_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.zip_with(other, mod_sub)
    }

    fn zip_with(&self, other: &Self, op: fn(u64, u64, u64) -> u64) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let n = self.modulus.value();
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (1..=len)
            .map(|k| op(self.coeff(k), other.coeff(k), n))
            .collect();
        Ok(Self::from_reduced(self.modulus.clone(), coeffs))
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = self.modulus.reduce(c);
        let coeffs = self.coeffs.iter().map(|&g| self.modulus.mul(g, c)).collect();
        Self::from_reduced(self.modulus.clone(), coeffs)
    }

    /// `self(inner(x))`, reduced to degree below `N` when the plain
    /// composition would reach `N`.
    pub fn compose(&self, inner: &Self) -> Result<Self, PolyError> {
        self.check_same(inner)?;
        let n = self.modulus.value();
        let inner_full = inner.to_dense();
        // outer(y) = y * (g_1 + y * (g_2 + ... + y * g_K))
        let mut acc: Vec<u64> = Vec::new();
        for &g in self.coeffs.iter().rev() {
            if acc.is_empty() {
                acc.push(0);
            }
            acc[0] = mod_add(acc[0], g, n);
            acc = dense_mul(&acc, &inner_full, n);
            acc = reduce_dense(acc, n);
        }
        Ok(Self::from_dense(self.modulus.clone(), acc))
    }

    /// Equivalent polynomial of degree below `N`.
    pub fn reduce_degree(&self) -> Self {
        if (self.degree() as u64) < self.modulus.value() {
            return self.clone();
        }
        let dense = reduce_dense(self.to_dense(), self.modulus.value());
        Self::from_dense(self.modulus.clone(), dense)
    }

    /// Whether `self(x) ≡ 0` for every `x` in `Z_N`.
    ///
    /// Uses the forward-difference criterion: after reducing to degree
    /// `K < N`, the polynomial vanishes on `Z_N` iff its iterated differences
    /// `z_n(0)` vanish for `0 <= n <= K`.
    pub fn is_zero_function(&self) -> bool {
        let p = self.reduce_degree();
        let n = p.modulus.value();
        let mut diffs: Vec<u64> = (0..=p.degree() as u64).map(|x| p.eval(x)).collect();
        // diffs[0] after round r holds z_r(0)
        for round in 0..diffs.len() {
            if diffs[0] != 0 {
                return false;
            }
            let live = diffs.len() - round;
            for i in 0..live.saturating_sub(1) {
                diffs[i] = mod_sub(diffs[i + 1], diffs[i], n);
            }
        }
        true
    }

    /// Whether `self` and `other` agree as functions on `Z_N`.
    pub fn equivalent(&self, other: &Self) -> Result<bool, PolyError> {
        self.check_same(other)?;
        let n = self.modulus.value();
        if n <= POINTWISE_LIMIT {
            Ok((0..n).all(|x| self.eval(x) == other.eval(x)))
        } else {
            Ok(self.sub(other)?.is_zero_function())
        }
    }

    /// Parses `g1*x + g2*x^2 + ...` (the form produced by `Display`).
    ///
    /// Terms may appear in any order and repeated powers accumulate; a bare
    /// `x` or `x^k` has coefficient 1. The literal `0` is the zero polynomial.
    pub fn parse(text: &str, modulus: Modulus) -> Result<Self, PolyError> {
        let err = |term: &str, reason| PolyError::Parse {
            term: term.to_string(),
            reason,
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err(text, "empty input"));
        }
        if compact == "0" {
            return Ok(Self::zero(modulus));
        }
        let mut coeffs: Vec<u64> = Vec::new();
        for term in compact.split('+') {
            let (coef, power) = match term.split_once('x') {
                None => return Err(err(term, "constant terms are not allowed")),
                Some((c, p)) => (c, p),
            };
            let coef = match coef {
                "" => 1,
                c => c
                    .strip_suffix('*')
                    .ok_or_else(|| err(term, "expected '*' between coefficient and x"))?
                    .parse::<u64>()
                    .map_err(|_| err(term, "invalid coefficient"))?,
            };
            let power = match power {
                "" => 1,
                p => p
                    .strip_prefix('^')
                    .ok_or_else(|| err(term, "expected '^' after x"))?
                    .parse::<usize>()
                    .map_err(|_| err(term, "invalid exponent"))?,
            };
            if power == 0 {
                return Err(err(term, "constant terms are not allowed"));
            }
            if coeffs.len() < power {
                coeffs.resize(power, 0);
            }
            coeffs[power - 1] = modulus.add(coeffs[power - 1], modulus.reduce(coef));
        }
        Ok(Self::from_reduced(modulus, coeffs))
    }

    /// Dense representation including the (zero) constant term.
    fn to_dense(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(0);
        v.extend_from_slice(&self.coeffs);
        v
    }

    fn from_dense(modulus: Modulus, dense: Vec<u64>) -> Self {
        debug_assert!(dense.first().is_none_or(|&c| c == 0));
        let coeffs = dense.into_iter().skip(1).collect();
        Self::from_reduced(modulus, coeffs)
    }
}

impl fmt::Debug for PolyModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self, self.modulus.value())
    }
}

/// `g1*x + g2*x^2 + ...`, skipping zero coefficients; the zero polynomial
/// renders as `0`.
impl fmt::Display for PolyModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i + 1 {
                1 => write!(f, "{c}*x")?,
                k => write!(f, "{c}*x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn dense_mul(a: &[u64], b: &[u64], n: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = mod_add(out[i + j], mod_mul(x, y, n), n);
        }
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Coefficients (constant first) of `prod_{m=0}^{k-1} (x - m)` mod `n`.
pub(crate) fn falling_factorial(k: usize, n: u64) -> Vec<u64> {
    let mut out = vec![1 % n];
    for m in 0..k as u64 {
        // multiply by (x - m)
        let neg_m = mod_sub(0, m % n, n);
        let mut next = vec![0u64; out.len() + 1];
        for (i, &c) in out.iter().enumerate() {
            next[i + 1] = mod_add(next[i + 1], c, n);
            next[i] = mod_add(next[i], mod_mul(c, neg_m, n), n);
        }
        out = next;
    }
    out
}

/// Lowers the degree below `n` by subtracting multiples of
/// `x^(d-n) * prod_{k=0}^{n-1} (x - k)`.
fn reduce_dense(mut p: Vec<u64>, n: u64) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    if (p.len() as u64) <= n {
        return p;
    }
    let vanishing = falling_factorial(n as usize, n);
    let n_usize = n as usize;
    while p.len() > n_usize {
        let top = p.len() - 1;
        let lead = p[top];
        let shift = top - n_usize;
        for (i, &c) in vanishing.iter().enumerate() {
            p[shift + i] = mod_sub(p[shift + i], mod_mul(lead, c, n), n);
        }
        while p.last() == Some(&0) {
            p.pop();
        }
    }
    p
}

/// Parameters `tau_1 .. tau_K` of a zero polynomial
/// `sum_k (N / gcd(k!, N)) * tau_k * prod_{m=0}^{k-1} (x - m)`.
///
/// The grid generates every zero polynomial of degree at most `K`; members
/// with `tau_K = 0` have lower degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPolyParams {
    modulus: Modulus,
    taus: Vec<u64>,
}

impl ZeroPolyParams {
    pub fn new(modulus: Modulus, taus: Vec<u64>) -> Result<Self, PolyError> {
        for (i, &t) in taus.iter().enumerate() {
            let range = modulus.gcd_factorial(i as u64 + 1);
            if t >= range {
                return Err(PolyError::TauOutOfRange {
                    index: i + 1,
                    value: t,
                    max: range - 1,
                });
            }
        }
        Ok(ZeroPolyParams { modulus, taus })
    }

    pub fn degree_bound(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[u64] {
        &self.taus
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }
}

/// Ranges `gcd(k!, N)` for `k = 1..=K`: `tau_k` takes values below the
/// `k`-th entry.
pub fn tau_ranges(k_max: usize, modulus: &Modulus) -> Vec<u64> {
    (1..=k_max as u64).map(|k| modulus.gcd_factorial(k)).collect()
}

/// The scaled falling-factorial basis `(N / gcd(k!, N)) * x(x-1)...(x-k+1)`
/// for `k = 1..=K`, precomputed for repeated zero-polynomial construction.
#[derive(Debug, Clone)]
pub struct ZeroPolyBasis {
    modulus: Modulus,
    ranges: Vec<u64>,
    // basis[k-1] holds g_1..g_k of the k-th scaled falling factorial
    basis: Vec<Vec<u64>>,
}

impl ZeroPolyBasis {
    pub fn new(modulus: Modulus, k_max: usize) -> Self {
        let n = modulus.value();
        let ranges = tau_ranges(k_max, &modulus);
        let basis = (1..=k_max)
            .zip(&ranges)
            .map(|(k, &g)| {
                let scale = n / g;
                falling_factorial(k, n)
                    .into_iter()
                    .skip(1)
                    .map(|c| mod_mul(c, scale % n, n))
                    .collect()
            })
            .collect();
        ZeroPolyBasis {
            modulus,
            ranges,
            basis,
        }
    }

    pub fn ranges(&self) -> &[u64] {
        &self.ranges
    }

    /// Coefficients (`g_1..g_K`, untrimmed) of the zero polynomial for `taus`.
    /// Callers guarantee `taus.len() <= K` and each `tau_k` is in range.
    pub(crate) fn combine_into(&self, taus: &[u64], out: &mut [u64]) {
        let n = self.modulus.value();
        for (b, &t) in self.basis.iter().zip(taus) {
            if t == 0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(b) {
                *o = mod_add(*o, mod_mul(c, t, n), n);
            }
        }
    }

    pub fn polynomial(&self, params: &ZeroPolyParams) -> Result<PolyModN, PolyError> {
        if params.taus.len() > self.basis.len() {
            return Err(PolyError::TauLength {
                expected: self.basis.len(),
                got: params.taus.len(),
            });
        }
        let mut coeffs = vec![0u64; params.taus.len()];
        self.combine_into(&params.taus, &mut coeffs);
        Ok(PolyModN::from_reduced(self.modulus.clone(), coeffs))
    }
}

/// Expands the zero polynomial described by `params`.
pub fn zero_polynomial(params: &ZeroPolyParams) -> PolyModN {
    ZeroPolyBasis::new(params.modulus.clone(), params.taus.len())
        .polynomial(params)
        .expect("basis sized from params")
}

/// `prod_{k=1}^{K} gcd(k!, N)`, exactly.
pub fn count_zero_polynomials(k_max: usize, modulus: &Modulus) -> BigUint {
    tau_ranges(k_max, modulus)
        .into_iter()
        .fold(BigUint::one(), |acc, g| acc * g)
}
