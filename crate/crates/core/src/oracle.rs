//! Brute-force ground truth, independent of the inversion machinery.
//!
//! Everything here either evaluates polynomials point by point or builds the
//! full `(N-1) x (N-1)` matrices directly from their entry formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::inversion::{compute_u, Qpp};
use crate::matrix::ResidueMatrix;
use crate::modmath::Modulus;
use crate::polyring::{PolyError, PolyModN};

/// Largest `N` accepted by [`is_permutation`].
pub const PERMUTATION_CHECK_LIMIT: u64 = 10_000_000;
/// Largest `N` accepted by full-mode [`verify_inverse`].
pub const FULL_VERIFY_LIMIT: u64 = 1 << 32;
/// Largest `N` accepted by [`brute_force_inverses`].
pub const BRUTE_FORCE_MAX_MODULUS: u64 = 16;
pub const BRUTE_FORCE_MAX_DEGREE: usize = 3;
/// Range of `N` accepted by [`build_full_system`].
pub const FULL_SYSTEM_MIN_MODULUS: u64 = 4;
pub const FULL_SYSTEM_MAX_MODULUS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} supports N up to {limit}, got {n}")]
    TooLarge { what: &'static str, n: u64, limit: u64 },
    #[error("{what} needs N >= {min}, got {n}")]
    TooSmall { what: &'static str, n: u64, min: u64 },
    #[error("brute-force search limited to degree {limit}, got {degree}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// How many points [`verify_inverse`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every `x` in `Z_N`.
    Full,
    /// `count` uniformly random points drawn from a seeded generator.
    Sample { count: u64, seed: u64 },
}

/// Whether `f` is a bijection on `Z_N`.
pub fn is_permutation(f: &PolyModN) -> Result<bool, OracleError> {
    is_permutation_with(f, Execution::default())
}

pub fn is_permutation_with(f: &PolyModN, exec: Execution) -> Result<bool, OracleError> {
    let n = f.modulus().value();
    if n > PERMUTATION_CHECK_LIMIT {
        return Err(OracleError::TooLarge {
            what: "permutation check",
            n,
            limit: PERMUTATION_CHECK_LIMIT,
        });
    }
    let mut seen = vec![false; n as usize];
    if exec.is_parallel() {
        let image = exec::map_range(exec, 0..n, |x| f.eval(x));
        return Ok(image
            .into_iter()
            .all(|y| !std::mem::replace(&mut seen[y as usize], true)));
    }
    Ok((0..n).all(|x| !std::mem::replace(&mut seen[f.eval(x) as usize], true)))
}

/// Whether `g(f(x)) ≡ x` at the points selected by `sampling`.
pub fn verify_inverse(
    f: &PolyModN,
    g: &PolyModN,
    sampling: Sampling,
) -> Result<bool, OracleError> {
    verify_inverse_with(f, g, sampling, Execution::default())
}

/// As [`verify_inverse`]; in full mode the domain is partitioned across
/// workers when `exec` is parallel, and the per-range verdicts are AND-ed.
pub fn verify_inverse_with(
    f: &PolyModN,
    g: &PolyModN,
    sampling: Sampling,
    exec: Execution,
) -> Result<bool, OracleError> {
    check_left_inverse(f, g, sampling, exec)
}

/// `g ∘ f` and `f ∘ g` are both the identity at the selected points.
pub fn verify_two_sided(
    f: &PolyModN,
    g: &PolyModN,
    sampling: Sampling,
    exec: Execution,
) -> Result<bool, OracleError> {
    Ok(check_left_inverse(f, g, sampling, exec)? && check_left_inverse(g, f, sampling, exec)?)
}

fn check_left_inverse(
    f: &PolyModN,
    g: &PolyModN,
    sampling: Sampling,
    exec: Execution,
) -> Result<bool, OracleError> {
    let n = f.modulus().value();
    if n != g.modulus().value() {
        return Err(PolyError::ModulusMismatch {
            left: n,
            right: g.modulus().value(),
        }
        .into());
    }
    match sampling {
        Sampling::Full => {
            if n > FULL_VERIFY_LIMIT {
                return Err(OracleError::TooLarge {
                    what: "full verification",
                    n,
                    limit: FULL_VERIFY_LIMIT,
                });
            }
            Ok(exec::all_in_range(exec, 0..n, |x| g.eval(f.eval(x)) == x))
        }
        Sampling::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<u64> = (0..count).map(|_| rng.random_range(0..n)).collect();
            Ok(exec::map_slice(exec, &points, |&x| g.eval(f.eval(x)) == x)
                .into_iter()
                .all(|ok| ok))
        }
    }
}

/// Every coefficient vector of degree at most `max_degree` whose polynomial
/// inverts `f` on all of `Z_N`, in lexicographic order of `(g_1, .., g_d)`.
pub fn brute_force_inverses(
    f: &PolyModN,
    max_degree: usize,
) -> Result<Vec<PolyModN>, OracleError> {
    let n = f.modulus().value();
    if n > BRUTE_FORCE_MAX_MODULUS {
        return Err(OracleError::TooLarge {
            what: "brute-force inverse search",
            n,
            limit: BRUTE_FORCE_MAX_MODULUS,
        });
    }
    if max_degree > BRUTE_FORCE_MAX_DEGREE {
        return Err(OracleError::DegreeTooLarge {
            degree: max_degree,
            limit: BRUTE_FORCE_MAX_DEGREE,
        });
    }
    let image: Vec<u64> = (0..n).map(|x| f.eval(x)).collect();
    let total = n.pow(max_degree as u32);
    let mut found = Vec::new();
    for index in 0..total {
        // digits of `index` in base n, most significant first
        let mut coeffs = vec![0u64; max_degree];
        let mut rest = index;
        for c in coeffs.iter_mut().rev() {
            *c = rest % n;
            rest /= n;
        }
        let g = PolyModN::new(f.modulus().clone(), coeffs);
        if (0..n).all(|x| g.eval(image[x as usize]) == x) {
            found.push(g);
        }
    }
    Ok(found)
}

/// The full factorization `A = L D U` of the composition system for a QPP
/// with `4 <= N <= 64`. All matrices are `(N-1) x (N-1)`, 0-indexed, so
/// entry `(i, j)` here is entry `(i+1, j+1)` of the 1-indexed formulas.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub qpp: Qpp,
    /// `a_{i,j} = (i f1 + i^2 f2)^j`.
    pub a: ResidueMatrix,
    /// `l_{i,j} = C(i,j) prod_{k=i}^{i+j-1} (f1 + k f2)` for `i >= j`.
    pub l: ResidueMatrix,
    /// `d_{i,i} = i!`.
    pub d: Vec<u64>,
    pub u: ResidueMatrix,
    /// `(1, 2, ..., N-1)`.
    pub b: Vec<u64>,
}

impl FullSystem {
    pub fn modulus(&self) -> &Modulus {
        self.qpp.modulus()
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `L^{-1} b` by forward substitution.
    pub fn l_inverse_b(&self) -> Vec<u64> {
        forward_substitute(&self.l, &self.b, self.modulus())
    }
}

/// Builds `A`, `L`, `D`, `U` for the normalized form of `q`.
pub fn build_full_system(q: &Qpp) -> Result<FullSystem, OracleError> {
    let q = q.normalize();
    let md = q.modulus().clone();
    let n = md.value();
    if n < FULL_SYSTEM_MIN_MODULUS {
        return Err(OracleError::TooSmall {
            what: "full LDU system",
            n,
            min: FULL_SYSTEM_MIN_MODULUS,
        });
    }
    if n > FULL_SYSTEM_MAX_MODULUS {
        return Err(OracleError::TooLarge {
            what: "full LDU system",
            n,
            limit: FULL_SYSTEM_MAX_MODULUS,
        });
    }
    let dim = (n - 1) as usize;
    let point = |i: u64| md.add(md.mul(i, q.f1()), md.mul(md.mul(i, i), q.f2()));
    let a = ResidueMatrix::from_fn(dim, |i, j| md.pow(point(i as u64 + 1), j as u64 + 1));
    let l = lower_factor(&q, dim);
    let d = (1..=dim as u64).map(|i| md.factorial(i)).collect();
    let u = compute_u(&q, dim);
    let b = (1..=dim as u64).collect();
    Ok(FullSystem { qpp: q, a, l, d, u, b })
}

/// Leading `dim x dim` block of `L`.
pub fn lower_factor(q: &Qpp, dim: usize) -> ResidueMatrix {
    let md = q.modulus();
    let n = md.value();
    // Pascal's triangle mod n, rows 0..=dim
    let mut binom = vec![vec![0u64; dim + 1]; dim + 1];
    for i in 0..=dim {
        binom[i][0] = 1 % n;
        for j in 1..=i {
            binom[i][j] = md.add(binom[i - 1][j - 1], binom[i - 1][j]);
        }
    }
    let shifted = |k: u64| md.add(q.f1(), md.mul(md.reduce(k), q.f2()));
    ResidueMatrix::from_fn(dim, |r, c| {
        let (i, j) = (r as u64 + 1, c as u64 + 1);
        if i < j {
            return 0;
        }
        let prod = (i..i + j).fold(1 % n, |acc, k| md.mul(acc, shifted(k)));
        md.mul(binom[r + 1][c + 1], prod)
    })
}

/// Solves `L y ≡ v` for lower triangular `L` with unit diagonal entries.
///
/// # Panics
/// If a diagonal entry is not a unit mod `N`.
pub fn forward_substitute(l: &ResidueMatrix, v: &[u64], md: &Modulus) -> Vec<u64> {
    let mut y = vec![0u64; v.len()];
    for i in 0..v.len() {
        let acc = (0..i).fold(0, |acc, j| md.add(acc, md.mul(l.get(i, j), y[j])));
        let diag_inv = md
            .inverse(l.get(i, i))
            .expect("diagonal of L is a unit for a normalized QPP");
        y[i] = md.mul(md.sub(md.reduce(v[i]), acc), diag_inv);
    }
    y
}

/// Why a [`FullSystem`] failed [`check_ldu`]. Coordinates are 1-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LduFailure {
    Mismatch { row: usize, col: usize },
    NonUnitDiagonal { index: usize },
}

/// Verifies `A ≡ L D U` entrywise and that `L` has unit diagonal entries.
pub fn check_ldu(sys: &FullSystem) -> Result<(), LduFailure> {
    let md = sys.modulus();
    let n = md.value();
    let dim = sys.dim();
    for i in 0..dim {
        if md.inverse(sys.l.get(i, i)).is_err() {
            return Err(LduFailure::NonUnitDiagonal { index: i + 1 });
        }
    }
    let d = ResidueMatrix::from_fn(dim, |i, j| if i == j { sys.d[i] } else { 0 });
    let ldu = sys.l.mul(&d, n).mul(&sys.u, n);
    for i in 0..dim {
        for j in 0..dim {
            if ldu.get(i, j) != sys.a.get(i, j) {
                return Err(LduFailure::Mismatch {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    Ok(())
}

/// For an inverse `g` (padded to `N-1` coefficients), checks both
/// `A g ≡ b` and `D (U g) ≡ L^{-1} b`.
pub fn check_reduced_system(sys: &FullSystem, g: &PolyModN) -> bool {
    let md = sys.modulus();
    let n = md.value();
    let dim = sys.dim();
    if g.degree() > dim {
        return false;
    }
    let mut coeffs = g.coeffs().to_vec();
    coeffs.resize(dim, 0);
    if sys.a.mul_vec(&coeffs, n) != sys.b {
        return false;
    }
    let h = sys.u.mul_vec(&coeffs, n);
    let lhs: Vec<u64> = h.iter().zip(&sys.d).map(|(&h, &d)| md.mul(h, d)).collect();
    lhs == sys.l_inverse_b()
}
