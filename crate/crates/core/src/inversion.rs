//! Least-degree inverses of quadratic permutation polynomials.
//!
//! For a QPP `f(x) = f1 x + f2 x^2` over `Z_N`, composing an unknown inverse
//! `g` with `f` and evaluating at every point gives a linear system
//! `A g ≡ b`. The system factors as `A = L D U`, where `D = diag(k!)`, `U` is
//! unit upper triangular and `L` is lower triangular with unit diagonal
//! entries, so it reduces to `K` independent congruences `k! h_k ≡ e_k`
//! followed by back substitution `U g ≡ h`. The entries `e_k` have the closed
//! form
//!
//! ```text
//! e_k = k! C_{k-1} (-f2)^{k-1} / prod_{m=1}^{2k-1} (f1 + m f2)
//! ```
//!
//! and the least inverse degree is the smallest `K` with
//! `(K+1)! C_K f2^K ≡ 0 (mod N)`.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::matrix::ResidueMatrix;
use crate::modmath::{
    catalan, catalan_mod, gcd, solve_linear_congruence, CongruenceSolutionSet, ModMathError,
    Modulus, MAX_CATALAN_INDEX,
};
use crate::polyring::{count_zero_polynomials, tau_ranges, PolyModN, ZeroPolyBasis};

/// Largest inverse degree the closed form for `e_k` covers.
pub const MAX_INVERSE_DEGREE: usize = MAX_CATALAN_INDEX as usize;

/// Default cap on the number of inverses produced by enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 4096;

/// Largest `K` for which [`degree_condition_constant`] is exposed exactly.
pub const MAX_EXACT_CONDITION_DEGREE: usize = 25;

/// The clause of the quadratic permutation criterion that an input violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QppViolation {
    /// `N < 3`.
    ModulusTooSmall,
    /// `2 || N` but `f1 + f2` is even.
    SumNotOdd,
    /// `2 || N` but `gcd(f1, N/2) != 1`.
    F1NotCoprimeToHalf { gcd: u64 },
    /// `2 || N` but an odd prime of `N` does not divide `f2`.
    F2MissingOddPrime { prime: u64 },
    /// `2 ∤ N` or `4 | N`, but `gcd(f1, N) != 1`.
    F1NotCoprime { gcd: u64 },
    /// `2 ∤ N` or `4 | N`, but a prime of `N` does not divide `f2`.
    F2MissingPrime { prime: u64 },
}

impl QppViolation {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            QppViolation::ModulusTooSmall => "modulus_too_small",
            QppViolation::SumNotOdd => "f1_plus_f2_not_odd",
            QppViolation::F1NotCoprimeToHalf { .. } => "f1_not_coprime_to_half_n",
            QppViolation::F2MissingOddPrime { .. } => "f2_missing_odd_prime_of_n",
            QppViolation::F1NotCoprime { .. } => "f1_not_coprime_to_n",
            QppViolation::F2MissingPrime { .. } => "f2_missing_prime_of_n",
        }
    }
}

impl fmt::Display for QppViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QppViolation::ModulusTooSmall => write!(f, "N must be at least 3"),
            QppViolation::SumNotOdd => write!(f, "N = 2 mod 4 requires f1 + f2 to be odd"),
            QppViolation::F1NotCoprimeToHalf { gcd } => {
                write!(f, "N = 2 mod 4 requires gcd(f1, N/2) = 1, got {gcd}")
            }
            QppViolation::F2MissingOddPrime { prime } => {
                write!(f, "N = 2 mod 4 requires every odd prime of N to divide f2; {prime} does not")
            }
            QppViolation::F1NotCoprime { gcd } => write!(f, "requires gcd(f1, N) = 1, got {gcd}"),
            QppViolation::F2MissingPrime { prime } => {
                write!(f, "requires every prime of N to divide f2; {prime} does not")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InversionError {
    #[error("not a quadratic permutation polynomial: {0}")]
    NotQpp(QppViolation),
    #[error("degree criterion unmet through K = {MAX_INVERSE_DEGREE}")]
    Infeasible,
    #[error("degree {0} is outside 1..={1}")]
    DegreeRange(usize, usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    ModMath(#[from] ModMathError),
}

/// Checks the quadratic permutation criterion, naming the first violated
/// clause.
pub fn check_qpp(f1: u64, f2: u64, n: &Modulus) -> Result<(), QppViolation> {
    let nv = n.value();
    if nv < 3 {
        return Err(QppViolation::ModulusTooSmall);
    }
    let (f1, f2) = (n.reduce(f1), n.reduce(f2));
    if n.exponent_of(2) == 1 {
        if (f1 + f2) % 2 == 0 {
            return Err(QppViolation::SumNotOdd);
        }
        let g = gcd(f1, nv / 2);
        if g != 1 {
            return Err(QppViolation::F1NotCoprimeToHalf { gcd: g });
        }
        if let Some(p) = n.primes().find(|&p| p != 2 && f2 % p != 0) {
            return Err(QppViolation::F2MissingOddPrime { prime: p });
        }
    } else {
        let g = gcd(f1, nv);
        if g != 1 {
            return Err(QppViolation::F1NotCoprime { gcd: g });
        }
        if let Some(p) = n.primes().find(|&p| f2 % p != 0) {
            return Err(QppViolation::F2MissingPrime { prime: p });
        }
    }
    Ok(())
}

/// Whether `f1 x + f2 x^2` permutes `Z_N`.
pub fn is_qpp(f1: u64, f2: u64, n: &Modulus) -> bool {
    check_qpp(f1, f2, n).is_ok()
}

/// A validated quadratic permutation polynomial `f1 x + f2 x^2 (mod N)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Qpp {
    modulus: Modulus,
    f1: u64,
    f2: u64,
    normalized: bool,
}

impl Qpp {
    pub fn new(modulus: Modulus, f1: u64, f2: u64) -> Result<Self, InversionError> {
        check_qpp(f1, f2, &modulus).map_err(InversionError::NotQpp)?;
        let (f1, f2) = (modulus.reduce(f1), modulus.reduce(f2));
        let normalized = modulus.exponent_of(2) != 1 || f1 % 2 == 1;
        Ok(Qpp {
            modulus,
            f1,
            f2,
            normalized,
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn f1(&self) -> u64 {
        self.f1
    }

    pub fn f2(&self) -> u64 {
        self.f2
    }

    /// True when `f1 + k f2` is a unit for every `k >= 1`, i.e. `f1` is odd
    /// whenever `2 || N`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn as_poly(&self) -> PolyModN {
        PolyModN::quadratic(self.modulus.clone(), self.f1, self.f2)
    }

    /// When `2 || N` and `f1` is even, switches to the equivalent QPP
    /// `(f1 + N/2) x + (f2 + N/2) x^2`, which has `f1` odd.
    pub fn normalize(&self) -> Qpp {
        if self.normalized {
            return self.clone();
        }
        let half = self.modulus.value() / 2;
        Qpp {
            modulus: self.modulus.clone(),
            f1: self.modulus.add(self.f1, half),
            f2: self.modulus.add(self.f2, half),
            normalized: true,
        }
    }

    /// `f1 + m f2 mod N`.
    fn shifted(&self, m: u64) -> u64 {
        self.modulus
            .add(self.f1, self.modulus.mul(self.modulus.reduce(m), self.f2))
    }

    /// `i f1 + i^2 f2 mod N`, i.e. `f(i)`.
    fn point(&self, i: u64) -> u64 {
        self.modulus.mul(self.modulus.reduce(i), self.shifted(i))
    }

    /// `prod_{m=lo}^{hi} (f1 + m f2) mod N`.
    fn shifted_product(&self, lo: u64, hi: u64) -> u64 {
        (lo..=hi).fold(self.modulus.reduce(1), |acc, m| {
            self.modulus.mul(acc, self.shifted(m))
        })
    }
}

impl fmt::Debug for Qpp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Qpp({}x + {}x^2 mod {}{})",
            self.f1,
            self.f2,
            self.modulus.value(),
            if self.normalized { "" } else { ", unnormalized" }
        )
    }
}

/// Returns `q` unchanged, or its normalized equivalent.
pub fn normalize(q: &Qpp) -> Qpp {
    q.normalize()
}

/// Largest prime-power exponent of `N`, an upper bound on the inverse degree.
pub fn degree_bound(n: &Modulus) -> u32 {
    n.max_exponent()
}

/// `(K+1)! C_K` as an exact integer, for `1 <= K <= 25`.
pub fn degree_condition_constant(k: usize) -> Result<BigUint, InversionError> {
    if !(1..=MAX_EXACT_CONDITION_DEGREE).contains(&k) {
        return Err(InversionError::DegreeRange(k, MAX_EXACT_CONDITION_DEGREE));
    }
    let factorial: BigUint = (1..=k as u64 + 1).map(BigUint::from).product();
    Ok(factorial * BigUint::from(catalan(k as u32)?))
}

/// `(K+1)! C_K f2^K mod N`, each factor reduced before multiplying.
pub fn degree_condition_value(q: &Qpp, k: usize) -> Result<u64, InversionError> {
    let n = &q.modulus;
    let fact = n.factorial(k as u64 + 1);
    let cat = catalan_mod(k as u32, n)?;
    Ok(n.mul(n.mul(fact, cat), n.pow(q.f2, k as u64)))
}

/// Smallest `K >= 1` with `(K+1)! C_K f2^K ≡ 0 (mod N)`.
pub fn least_inverse_degree(q: &Qpp) -> Result<usize, InversionError> {
    let q = q.normalize();
    for k in 1..=MAX_INVERSE_DEGREE {
        if degree_condition_value(&q, k)? == 0 {
            return Ok(k);
        }
    }
    Err(InversionError::Infeasible)
}

fn check_degree(k: usize) -> Result<(), InversionError> {
    if (1..=MAX_INVERSE_DEGREE).contains(&k) {
        Ok(())
    } else {
        Err(InversionError::DegreeRange(k, MAX_INVERSE_DEGREE))
    }
}

fn unit_inverse(q: &Qpp, value: u64) -> Result<u64, InversionError> {
    q.modulus.inverse(value).map_err(|_| {
        InversionError::Invariant(format!(
            "{value} is not a unit mod {}; {q:?} is not normalized",
            q.modulus.value()
        ))
    })
}

/// `C_{k-1} (-f2)^{k-1} / prod_{m=1}^{2k-1} (f1 + m f2)` for `k = 1..=K`.
///
/// This is a particular solution of `k! h_k ≡ e_k`.
fn particular_terms(q: &Qpp, k_max: usize) -> Result<Vec<u64>, InversionError> {
    let n = &q.modulus;
    let neg_f2 = n.neg(q.f2);
    (1..=k_max as u64)
        .map(|k| {
            let denom = unit_inverse(q, q.shifted_product(1, 2 * k - 1))?;
            let cat = catalan_mod(k as u32 - 1, n)?;
            Ok(n.mul(n.mul(cat, n.pow(neg_f2, k - 1)), denom))
        })
        .collect()
}

/// `e_1 .. e_K` from the closed form.
pub fn compute_e(q: &Qpp, k_max: usize) -> Result<Vec<u64>, InversionError> {
    check_degree(k_max)?;
    let q = q.normalize();
    let n = &q.modulus;
    let terms = particular_terms(&q, k_max)?;
    Ok(terms
        .into_iter()
        .enumerate()
        .map(|(i, t)| n.mul(n.factorial(i as u64 + 1), t))
        .collect())
}

/// The `K x K` unit upper triangular factor `U`.
///
/// For `i < j`, `u_{i,j} = q^{(i,j)} V^{(i,j)} r^{(j)}`, where
/// `q^{(i,j)}_k = (i f1 + i^2 f2)^{k-1}`, `r^{(j)}` selects the last of `j`
/// components and `V^{(i,j)} = W^{(i-1,j)} ... W^{(1,j)}` with
/// `w^{(k,j)}_{m,n} = (k f1 + k^2 f2)^{n-m-1}` above the diagonal.
///
/// The column `V^{(i,j)} r^{(j)}` is carried from one `i` to the next, so
/// each `W` is applied once per column; applying a `W` uses its Toeplitz
/// structure and costs `O(j)`.
pub fn compute_u(q: &Qpp, k_max: usize) -> ResidueMatrix {
    let q = q.normalize();
    let n = &q.modulus;
    let mut u = ResidueMatrix::identity(k_max, n.value());
    let points: Vec<u64> = (1..=k_max as u64).map(|i| q.point(i)).collect();
    for j in 1..k_max {
        let width = j + 1;
        // column = V^{(1,width)} r^{(width)} = r^{(width)}
        let mut column = vec![0u64; width];
        column[width - 1] = n.reduce(1);
        for i in 0..j {
            let a = points[i];
            // q^{(i+1,width)} . column, by Horner over powers of a
            let entry = column
                .iter()
                .rev()
                .fold(0, |acc, &c| n.add(n.mul(acc, a), c));
            u.set(i, j, entry);
            // column <- W^{(i+1,width)} column
            let mut tail = 0u64;
            for m in (0..width).rev() {
                let next = column[m];
                column[m] = tail;
                tail = n.add(next, n.mul(a, tail));
            }
        }
    }
    u
}

/// The reduced congruence system for a normalized QPP and its least degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularSystem {
    qpp: Qpp,
    k: usize,
    /// `k! mod N` for `k = 1..=K`.
    pub d: Vec<u64>,
    pub u: ResidueMatrix,
    pub e: Vec<u64>,
}

impl TriangularSystem {
    /// Builds the `K x K` system at the least inverse degree of `q`.
    pub fn new(q: &Qpp) -> Result<Self, InversionError> {
        let k = least_inverse_degree(q)?;
        Self::with_degree(q, k)
    }

    /// Builds the leading `K x K` system for an arbitrary `1 <= K <= 50`.
    pub fn with_degree(q: &Qpp, k: usize) -> Result<Self, InversionError> {
        check_degree(k)?;
        let qpp = q.normalize();
        let n = &qpp.modulus;
        let d = (1..=k as u64).map(|i| n.factorial(i)).collect();
        let e = compute_e(&qpp, k)?;
        let u = compute_u(&qpp, k);
        Ok(TriangularSystem { qpp, k, d, u, e })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn qpp(&self) -> &Qpp {
        &self.qpp
    }

    pub fn modulus(&self) -> &Modulus {
        &self.qpp.modulus
    }

    /// Solution sets of each `d_k h_k ≡ e_k`.
    pub fn congruences(&self) -> Result<Vec<CongruenceSolutionSet>, InversionError> {
        self.d
            .iter()
            .zip(&self.e)
            .enumerate()
            .map(|(i, (&d, &e))| {
                solve_linear_congruence(d, e, self.modulus()).ok_or_else(|| {
                    InversionError::Invariant(format!(
                        "{}! h ≡ {e} has no solution mod {}",
                        i + 1,
                        self.modulus().value()
                    ))
                })
            })
            .collect()
    }
}

/// Which solutions of `D h ≡ e` to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Particular,
    All,
}

/// Solves `D h ≡ e`.
///
/// `Particular` yields the single closed-form solution
/// `h_k = C_{k-1} (-f2)^{k-1} / prod_{m=1}^{2k-1} (f1 + m f2)`;
/// `All` yields the full Cartesian product of the per-row solution sets in
/// lexicographic order.
pub fn solve_h(
    system: &TriangularSystem,
    mode: SolveMode,
) -> Result<Box<dyn Iterator<Item = Vec<u64>> + Send>, InversionError> {
    match mode {
        SolveMode::Particular => {
            let h = particular_terms(&system.qpp, system.k)?;
            let n = system.modulus();
            for (i, (&hk, &ek)) in h.iter().zip(&system.e).enumerate() {
                if n.mul(system.d[i], hk) != ek {
                    return Err(InversionError::Invariant(format!(
                        "particular h_{} does not satisfy its congruence",
                        i + 1
                    )));
                }
            }
            Ok(Box::new(std::iter::once(h)))
        }
        SolveMode::All => Ok(Box::new(Odometer::new(system.congruences()?))),
    }
}

/// Lexicographic walk over the Cartesian product of congruence solution sets.
struct Odometer {
    sets: Vec<CongruenceSolutionSet>,
    digits: Vec<u64>,
    done: bool,
}

impl Odometer {
    fn new(sets: Vec<CongruenceSolutionSet>) -> Self {
        let digits = vec![0; sets.len()];
        Odometer {
            sets,
            digits,
            done: false,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let item = self
            .sets
            .iter()
            .zip(&self.digits)
            .map(|(s, &t)| s.x0 + t * s.step)
            .collect();
        self.done = !advance(&mut self.digits, |i| self.sets[i].gamma);
        Some(item)
    }
}

/// Increments a mixed-radix counter (last digit fastest); false on wrap.
fn advance(digits: &mut [u64], radix: impl Fn(usize) -> u64) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Solves `U g ≡ h` bottom-up: `g_K = h_K`,
/// `g_k = h_k - sum_{m>k} u_{k,m} g_m`.
pub fn back_substitute(u: &ResidueMatrix, h: &[u64], n: &Modulus) -> Vec<u64> {
    let k = h.len();
    assert_eq!(u.dim(), k, "dimension mismatch");
    let mut g = vec![0u64; k];
    for row in (0..k).rev() {
        let acc = (row + 1..k).fold(0, |acc, m| n.add(acc, n.mul(u.get(row, m), g[m])));
        g[row] = n.sub(n.reduce(h[row]), acc);
    }
    g
}

/// Output of [`invert_qpp`]: one least-degree inverse plus a description of
/// all of them.
#[derive(Debug, Clone)]
pub struct InverseSolution {
    /// The QPP as supplied.
    pub input: Qpp,
    /// The QPP that was actually inverted (equal to `input` unless
    /// normalization applied).
    pub qpp: Qpp,
    pub system: TriangularSystem,
    pub h: Vec<u64>,
    pub particular: PolyModN,
    /// `prod_{k=1}^{K} gcd(k!, N)`.
    pub count: BigUint,
    /// `gcd(k!, N)` for `k = 1..=K`; `tau_k` ranges below each entry.
    pub tau_ranges: Vec<u64>,
}

impl InverseSolution {
    pub fn degree(&self) -> usize {
        self.system.degree()
    }

    pub fn modulus(&self) -> &Modulus {
        self.qpp.modulus()
    }

    pub fn normalization_changed(&self) -> bool {
        self.input != self.qpp
    }

    /// Whether `g` is one of the least-degree inverses, decided through the
    /// congruences: `h = U g` must satisfy `k! h_k ≡ e_k` for every `k`.
    pub fn contains(&self, g: &PolyModN) -> bool {
        let k = self.degree();
        if g.modulus() != self.modulus() || g.degree() != k {
            return false;
        }
        let n = self.modulus();
        let h = self.system.u.mul_vec(g.coeffs(), n.value());
        h.iter()
            .zip(&self.system.d)
            .zip(&self.system.e)
            .all(|((&hk, &dk), &ek)| n.mul(dk, hk) == ek)
    }
}

/// Algorithm: normalize, find the least degree `K`, build `D`, `U`, `e`,
/// take the closed-form particular `h` and back-substitute.
pub fn invert_qpp(q: &Qpp) -> Result<InverseSolution, InversionError> {
    let system = TriangularSystem::new(q)?;
    let h = solve_h(&system, SolveMode::Particular)?
        .next()
        .expect("particular mode yields one vector");
    let n = system.modulus().clone();
    let g = back_substitute(&system.u, &h, &n);
    let k = system.degree();
    let particular = PolyModN::new(n.clone(), g);
    if particular.degree() != k {
        return Err(InversionError::Invariant(format!(
            "particular inverse has degree {} instead of {k}",
            particular.degree()
        )));
    }
    Ok(InverseSolution {
        input: q.clone(),
        qpp: system.qpp().clone(),
        count: count_zero_polynomials(k, &n),
        tau_ranges: tau_ranges(k, &n),
        h,
        particular,
        system,
    })
}

/// Iterator over least-degree inverses as `particular + zero_polynomial(tau)`,
/// with `tau` in lexicographic order (last index fastest).
pub struct Inverses {
    modulus: Modulus,
    particular: Vec<u64>,
    basis: ZeroPolyBasis,
    taus: Vec<u64>,
    remaining: u64,
    exhausted: bool,
    truncated: bool,
}

impl Inverses {
    /// Whether the full set is larger than the enumeration limit.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

impl Iterator for Inverses {
    type Item = PolyModN;

    fn next(&mut self) -> Option<PolyModN> {
        if self.exhausted || self.remaining == 0 {
            return None;
        }
        let mut coeffs = self.particular.clone();
        self.basis.combine_into(&self.taus, &mut coeffs);
        self.remaining -= 1;
        let ranges = self.basis.ranges();
        self.exhausted = !advance(&mut self.taus, |i| ranges[i]);
        Some(PolyModN::new(self.modulus.clone(), coeffs))
    }
}

/// Enumerates up to `limit` least-degree inverses. Check
/// [`Inverses::truncated`] to learn whether the set was cut short.
pub fn enumerate_inverses(sol: &InverseSolution, limit: u64) -> Inverses {
    let k = sol.degree();
    let basis = ZeroPolyBasis::new(sol.modulus().clone(), k);
    let mut particular = sol.particular.coeffs().to_vec();
    particular.resize(k, 0);
    Inverses {
        particular,
        taus: vec![0; k],
        remaining: limit,
        exhausted: false,
        truncated: sol.count > BigUint::from(limit),
        basis,
        modulus: sol.modulus().clone(),
    }
}

/// Enumerates up to `limit` least-degree inverses by solving every
/// `k! h_k ≡ e_k` and back-substituting each `h`. Produces the same set as
/// [`enumerate_inverses`], in `h`-lexicographic order.
pub fn enumerate_by_congruences(
    sol: &InverseSolution,
    limit: u64,
) -> Result<(Vec<PolyModN>, bool), InversionError> {
    let n = sol.modulus();
    let out = solve_h(&sol.system, SolveMode::All)?
        .take(usize::try_from(limit).unwrap_or(usize::MAX))
        .map(|h| PolyModN::new(n.clone(), back_substitute(&sol.system.u, &h, n)))
        .collect();
    Ok((out, sol.count > BigUint::from(limit)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn qpp(n: u64, f1: u64, f2: u64) -> Qpp {
        Qpp::new(m(n), f1, f2).unwrap()
    }

    fn poly(n: u64, c: &[u64]) -> PolyModN {
        PolyModN::new(m(n), c.iter().copied())
    }

    fn permutes(n: u64, f1: u64, f2: u64) -> bool {
        let mut seen = vec![false; n as usize];
        (0..n).all(|x| {
            let y = ((f1 as u128 * x as u128 + f2 as u128 * (x as u128 * x as u128)) % n as u128) as usize;
            !std::mem::replace(&mut seen[y], true)
        })
    }

    #[test]
    fn qpp_examples() {
        assert!(is_qpp(23, 94, &m(1504)));
        assert!(is_qpp(15, 58, &m(928)));
        assert!(!permutes(4, 1, 1));
        assert_eq!(
            check_qpp(1, 1, &m(4)),
            Err(QppViolation::F2MissingPrime { prime: 2 })
        );
        assert_eq!(check_qpp(2, 2, &m(8)), Err(QppViolation::F1NotCoprime { gcd: 2 }));
        assert_eq!(check_qpp(1, 3, &m(6)), Err(QppViolation::SumNotOdd));
        assert_eq!(check_qpp(3, 0, &m(6)), Err(QppViolation::F1NotCoprimeToHalf { gcd: 3 }));
        assert_eq!(check_qpp(1, 2, &m(6)), Err(QppViolation::F2MissingOddPrime { prime: 3 }));
        assert_eq!(check_qpp(1, 0, &m(2)), Err(QppViolation::ModulusTooSmall));
        assert!(matches!(
            Qpp::new(m(4), 1, 1),
            Err(InversionError::NotQpp(QppViolation::F2MissingPrime { prime: 2 }))
        ));
    }

    #[test]
    fn qpp_matches_exhaustive_small() {
        for n in 3..=60u64 {
            let md = m(n);
            for f1 in 0..n {
                for f2 in 0..n {
                    assert_eq!(is_qpp(f1, f2, &md), permutes(n, f1, f2), "{f1} {f2} mod {n}");
                }
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let q = qpp(6, 2, 3);
        assert!(!q.is_normalized());
        let r = q.normalize();
        assert_eq!((r.f1(), r.f2()), (5, 0));
        assert!(r.is_normalized());
        assert!(q.as_poly().equivalent(&r.as_poly()).unwrap());
        let odd = qpp(6, 5, 0);
        assert_eq!(odd.normalize(), odd);
        let q = qpp(1504, 23, 94);
        assert_eq!(q.normalize(), q);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(least_inverse_degree(&qpp(1504, 23, 94)), Ok(3));
        assert_eq!(least_inverse_degree(&qpp(6016, 23, 94)), Ok(4));
        assert_eq!(least_inverse_degree(&qpp(1 << 24, 26119, 2 * 3 * 41 * 179)), Ok(12));
        assert_eq!(degree_bound(&m((1 << 18) * 9 * 5)), 18);
        assert_eq!(degree_bound(&m(101)), 1);
        assert_eq!(degree_bound(&m(1 << 24)), 24);
        // linear PP
        assert_eq!(least_inverse_degree(&qpp(6, 2, 3)), Ok(1));
    }

    #[test]
    fn condition_constants() {
        let got: Vec<BigUint> = (1..=5).map(|k| degree_condition_constant(k).unwrap()).collect();
        let want: Vec<BigUint> = [2u32, 12, 120, 1680, 30240].into_iter().map(BigUint::from).collect();
        assert_eq!(got, want);
        assert!(degree_condition_constant(25).is_ok());
        assert!(degree_condition_constant(26).is_err());
        assert!(degree_condition_constant(0).is_err());
    }

    #[test]
    fn system_examples() {
        let s = TriangularSystem::new(&qpp(1504, 23, 94)).unwrap();
        assert_eq!(s.degree(), 3);
        assert_eq!(s.d, vec![1, 2, 6]);
        assert_eq!(s.u.to_rows(), vec![vec![1, 117, 153], vec![0, 1, 539], vec![0, 0, 1]]);
        assert_eq!(s.e, vec![797, 188, 752]);

        let s = TriangularSystem::new(&qpp(6016, 23, 94)).unwrap();
        assert_eq!(s.e, vec![3805, 188, 752, 3008]);
        assert_eq!(
            s.u.to_rows(),
            vec![
                vec![1, 117, 1657, 1357],
                vec![0, 1, 539, 507],
                vec![0, 0, 1, 1454],
                vec![0, 0, 0, 1]
            ]
        );
        let q = qpp(6016, 23, 94);
        assert_eq!(compute_e(&q, 1).unwrap(), vec![m(6016).inverse(117).unwrap()]);
        assert!(compute_e(&q, 51).is_err());
    }

    /// `V^{(i,j)} r^{(j)}` with every `W` built as an explicit matrix.
    fn u_by_explicit_products(q: &Qpp, k: usize) -> ResidueMatrix {
        let n = q.modulus().value();
        let md = q.modulus();
        let point = |i: u64| md.add(md.mul(i, q.f1()), md.mul(i * i % n, q.f2()));
        ResidueMatrix::from_fn(k, |i, j| {
            if i > j {
                return 0;
            }
            if i == j {
                return 1 % n;
            }
            let (i1, width) = (i as u64 + 1, j + 1);
            let mut v = ResidueMatrix::identity(width, n);
            for kk in (1..i1).rev() {
                let a = point(kk);
                let w = ResidueMatrix::from_fn(width, |r, c| {
                    if r >= c { 0 } else { md.pow(a, (c - r - 1) as u64) }
                });
                v = v.mul(&w, n);
            }
            let qrow: Vec<u64> = (0..width).map(|t| md.pow(point(i1), t as u64)).collect();
            // q . V . r = q . (last column of V)
            (0..width).fold(0, |acc, t| md.add(acc, md.mul(qrow[t], v.get(t, width - 1))))
        })
    }

    #[test]
    fn u_matches_explicit_w_products() {
        for (n, f1, f2) in [(1504, 23, 94), (6016, 23, 94), (928, 15, 58), (1 << 24, 26119, 44034), (90, 7, 30)] {
            let q = qpp(n, f1, f2);
            for k in 1..=7 {
                assert_eq!(compute_u(&q, k), u_by_explicit_products(&q, k), "{q:?} k={k}");
            }
        }
        let q = qpp(77, 3, 7 * 11);
        assert_eq!(compute_u(&q, 3).get(0, 1), 3);
    }

    #[test]
    fn solve_examples() {
        let s = TriangularSystem::new(&qpp(6016, 23, 94)).unwrap();
        let h: Vec<Vec<u64>> = solve_h(&s, SolveMode::Particular).unwrap().collect();
        assert_eq!(h, vec![vec![3805, 94, 4136, 4888]]);

        let s = TriangularSystem::new(&qpp(1504, 23, 94)).unwrap();
        let all: Vec<Vec<u64>> = solve_h(&s, SolveMode::All).unwrap().collect();
        assert_eq!(
            all,
            vec![vec![797, 94, 376], vec![797, 94, 1128], vec![797, 846, 376], vec![797, 846, 1128]]
        );

        let s = TriangularSystem::new(&qpp(6, 2, 3)).unwrap();
        let h: Vec<Vec<u64>> = solve_h(&s, SolveMode::Particular).unwrap().collect();
        assert_eq!(h, vec![vec![5]]);
    }

    #[test]
    fn back_substitution_examples() {
        let md = m(1504);
        let s = TriangularSystem::new(&qpp(1504, 23, 94)).unwrap();
        assert_eq!(back_substitute(&s.u, &[797, 94, 376], &md), vec![1079, 470, 376]);
        let md6 = m(6016);
        let s = TriangularSystem::new(&qpp(6016, 23, 94)).unwrap();
        assert_eq!(
            back_substitute(&s.u, &[3805, 94, 4136, 4888], &md6),
            vec![1831, 3854, 1880, 4888]
        );
        let id = ResidueMatrix::identity(3, 1504);
        assert_eq!(back_substitute(&id, &[5, 6, 7], &md), vec![5, 6, 7]);
    }

    #[test]
    fn invert_examples() {
        let sol = invert_qpp(&qpp(1504, 23, 94)).unwrap();
        assert_eq!(sol.degree(), 3);
        // The closed-form h is ring-compatible: mod 1504 it is the N = 6016
        // vector (3805, 94, 4136, 4888) reduced, truncated to K = 3.
        assert_eq!(sol.h, vec![3805 % 1504, 94, 4136 % 1504]);
        assert!(sol.contains(&sol.particular));
        assert!(sol.contains(&poly(1504, &[1079, 470, 376])));
        assert_eq!(sol.count, BigUint::from(4u32));
        assert_eq!(sol.tau_ranges, vec![1, 2, 2]);
        assert!(!sol.normalization_changed());

        let sol = invert_qpp(&qpp(1 << 24, 26119, 44034)).unwrap();
        let footnote = poly(
            1 << 24,
            &[
                7612343, 4897586, 352440, 2867432, 13756448, 13890368, 915200, 2679424, 6846976,
                5217280, 53248, 1478656,
            ],
        );
        assert_eq!(sol.particular, footnote);

        let sol = invert_qpp(&qpp(928, 15, 58)).unwrap();
        assert!(sol.contains(&poly(928, &[31, 290, 232])));

        let sol = invert_qpp(&qpp(6, 2, 3)).unwrap();
        assert!(sol.normalization_changed());
        assert_eq!(sol.particular, poly(6, &[5]));
        assert_eq!(sol.count, BigUint::from(1u32));
    }

    #[test]
    fn enumeration_examples() {
        let sol = invert_qpp(&qpp(1504, 23, 94)).unwrap();
        let mut it = enumerate_inverses(&sol, DEFAULT_ENUMERATION_LIMIT);
        assert!(!it.truncated());
        let all: Vec<PolyModN> = it.by_ref().collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], sol.particular);
        assert!(all.contains(&poly(1504, &[1079, 470, 376])));
        let f = sol.qpp.as_poly();
        for g in &all {
            assert_eq!(g.degree(), 3);
            assert!(sol.contains(g));
            let c = g.compose(&f).unwrap();
            assert!((0..1504).all(|x| c.eval(x) == x));
        }
        let (by_congruence, truncated) = enumerate_by_congruences(&sol, 100).unwrap();
        assert!(!truncated);
        let a: HashSet<_> = all.into_iter().collect();
        let b: HashSet<_> = by_congruence.into_iter().collect();
        assert_eq!(a, b);

        let mut it = enumerate_inverses(&sol, 3);
        assert!(it.truncated());
        assert_eq!(it.by_ref().count(), 3);

        let lin = invert_qpp(&qpp(8, 1, 4)).unwrap();
        assert_eq!(lin.degree(), 1);
        let only: Vec<_> = enumerate_inverses(&lin, 10).collect();
        assert_eq!(only, vec![poly(8, &[5])]);
    }

    #[test]
    fn enumeration_6016_full_check() {
        let sol = invert_qpp(&qpp(6016, 23, 94)).unwrap();
        // gcd(k!, 6016) for k = 1..4 is 1, 2, 2, 8
        assert_eq!(sol.count, BigUint::from(32u32));
        let f = sol.qpp.as_poly();
        let all: HashSet<PolyModN> = enumerate_inverses(&sol, 1000).collect();
        assert_eq!(all.len(), 32);
        for g in &all {
            assert!((0..6016).all(|x| g.eval(f.eval(x)) == x));
            assert!((0..6016).all(|x| f.eval(g.eval(x)) == x));
        }
        assert!(all.contains(&poly(6016, &[1831, 3854, 1880, 4888])));
    }

    #[test]
    fn contains_rejects_non_members() {
        let sol = invert_qpp(&qpp(1504, 23, 94)).unwrap();
        assert!(!sol.contains(&poly(1504, &[1079, 470])));
        assert!(!sol.contains(&poly(1504, &[1080, 470, 376])));
        assert!(!sol.contains(&poly(1505, &[1079, 470, 376])));
    }
}
