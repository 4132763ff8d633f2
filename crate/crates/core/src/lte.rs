//! LTE interleaver fixture and block permutation.
//!
//! The bundled fixture lists the 35 LTE QPP interleavers whose least-degree
//! inverse is not quadratic, one row per interleaver:
//!
//! ```text
//! N,f1,f2,g1:g2:...:gK
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::inversion::{enumerate_inverses, invert_qpp, InversionError, Qpp};
use crate::modmath::{ModMathError, Modulus};
use crate::oracle::{verify_two_sided, Sampling};
use crate::polyring::PolyModN;

/// Number of rows the fixture must contain.
pub const TABLE_ROWS: usize = 35;

/// The fixture shipped with the crate.
pub const BUNDLED_FIXTURE: &str = include_str!("../fixtures/lte_nonquadratic.csv");

#[derive(Debug, Error)]
pub enum LteError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("fixture contains no rows")]
    Empty,
    #[error("fixture has {found} rows, expected {expected}")]
    RowCount { found: usize, expected: usize },
    #[error("cannot read fixture: {0}")]
    Io(#[from] std::io::Error),
    #[error("block has {got} items, permutation length is {expected}")]
    LengthMismatch { expected: u64, got: usize },
    #[error("polynomial is not a permutation of Z_{0}")]
    NotPermutation(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LteEntry {
    pub length: u64,
    pub f1: u64,
    pub f2: u64,
    pub published_inverse: PolyModN,
}

impl LteEntry {
    pub fn qpp(&self) -> Result<Qpp, InversionError> {
        Qpp::new(self.published_inverse.modulus().clone(), self.f1, self.f2)
    }
}

fn parse_row(line: &str, line_no: usize) -> Result<LteEntry, LteError> {
    let err = |reason: String| LteError::Parse {
        line: line_no,
        reason,
    };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let [n, f1, f2, g] = fields[..] else {
        return Err(err(format!("expected 4 fields, found {}", fields.len())));
    };
    let int = |name: &str, s: &str| {
        s.parse::<u64>()
            .map_err(|_| err(format!("{name} is not a non-negative integer: {s:?}")))
    };
    let (length, f1, f2) = (int("N", n)?, int("f1", f1)?, int("f2", f2)?);
    let modulus = Modulus::new(length).map_err(|e: ModMathError| err(e.to_string()))?;
    let coeffs = g
        .split(':')
        .map(|c| int("inverse coefficient", c))
        .collect::<Result<Vec<u64>, _>>()?;
    let published_inverse = PolyModN::new(modulus, coeffs);
    if published_inverse.degree() != g.split(':').count() {
        return Err(err("leading inverse coefficient is zero mod N".into()));
    }
    let entry = LteEntry {
        length,
        f1,
        f2,
        published_inverse,
    };
    entry.qpp().map_err(|e| err(e.to_string()))?;
    Ok(entry)
}

/// Parses fixture text. At least one row is required.
pub fn parse_table(text: &str) -> Result<Vec<LteEntry>, LteError> {
    let entries = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_row(l, i + 1))
        .collect::<Result<Vec<_>, _>>()?;
    if entries.is_empty() {
        return Err(LteError::Empty);
    }
    Ok(entries)
}

fn check_count(entries: Vec<LteEntry>) -> Result<Vec<LteEntry>, LteError> {
    if entries.len() != TABLE_ROWS {
        return Err(LteError::RowCount {
            found: entries.len(),
            expected: TABLE_ROWS,
        });
    }
    Ok(entries)
}

/// Reads and parses a fixture file, requiring exactly 35 rows.
pub fn load_table(path: impl AsRef<Path>) -> Result<Vec<LteEntry>, LteError> {
    check_count(parse_table(&fs::read_to_string(path)?)?)
}

pub fn bundled_table() -> Vec<LteEntry> {
    check_count(parse_table(BUNDLED_FIXTURE).expect("bundled fixture parses"))
        .expect("bundled fixture has 35 rows")
}

/// How a published inverse was matched against the computed inverse set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Found among the enumerated inverses.
    Enumerated,
    /// The set exceeds the enumeration cap; the difference from the
    /// particular inverse was shown to be a zero polynomial instead.
    ZeroDifference,
    NotMember,
}

#[derive(Debug, Clone)]
pub struct RowReport {
    pub length: u64,
    pub f1: u64,
    pub f2: u64,
    pub published_degree: usize,
    pub computed_degree: Option<usize>,
    pub published_verifies: bool,
    pub membership: Membership,
    pub inverse_count: Option<BigUint>,
    pub error: Option<String>,
}

impl RowReport {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.published_verifies
            && self.computed_degree == Some(self.published_degree)
            && self.membership != Membership::NotMember
    }
}

#[derive(Debug, Clone)]
pub struct TableReport {
    pub rows: Vec<RowReport>,
}

impl TableReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(RowReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RowReport> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

fn reproduce_row(entry: &LteEntry, cap: u64) -> RowReport {
    let published = &entry.published_inverse;
    let mut row = RowReport {
        length: entry.length,
        f1: entry.f1,
        f2: entry.f2,
        published_degree: published.degree(),
        computed_degree: None,
        published_verifies: false,
        membership: Membership::NotMember,
        inverse_count: None,
        error: None,
    };
    let sol = match entry.qpp().and_then(|q| invert_qpp(&q)) {
        Ok(sol) => sol,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let f = sol.input.as_poly();
    row.published_verifies =
        verify_two_sided(&f, published, Sampling::Full, Execution::Sequential).unwrap_or(false);
    row.computed_degree = Some(sol.degree());
    row.membership = if sol.count <= BigUint::from(cap) {
        if enumerate_inverses(&sol, cap).any(|g| &g == published) {
            Membership::Enumerated
        } else {
            Membership::NotMember
        }
    } else if published.degree() == sol.degree()
        && published
            .sub(&sol.particular)
            .is_ok_and(|z| z.is_zero_function())
    {
        Membership::ZeroDifference
    } else {
        Membership::NotMember
    };
    row.inverse_count = Some(sol.count);
    row
}

/// Inverts every row and checks the published inverse against the result.
/// Rows are processed independently (in parallel when `exec` allows).
pub fn reproduce_table(entries: &[LteEntry], cap: u64, exec: Execution) -> TableReport {
    TableReport {
        rows: exec::map_slice(exec, entries, |e| reproduce_row(e, cap)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `out[x] = in[π(x)]`.
    Interleave,
    /// `out[π(x)] = in[x]`, undoing [`Direction::Interleave`] with the same π.
    Deinterleave,
}

/// Applies the permutation `x -> perm(x)` of `Z_N` to a block of `N` items.
///
/// Interleaving with `f` and then interleaving with an inverse of `f`
/// restores the block, as does interleaving and deinterleaving with `f`.
pub fn permute_block<T: Clone>(
    perm: &PolyModN,
    data: &[T],
    direction: Direction,
) -> Result<Vec<T>, LteError> {
    let n = perm.modulus().value();
    if data.len() as u64 != n {
        return Err(LteError::LengthMismatch {
            expected: n,
            got: data.len(),
        });
    }
    let mut seen = vec![false; data.len()];
    let mut image = Vec::with_capacity(data.len());
    for x in 0..n {
        let y = perm.eval(x) as usize;
        if std::mem::replace(&mut seen[y], true) {
            return Err(LteError::NotPermutation(n));
        }
        image.push(y);
    }
    Ok(match direction {
        Direction::Interleave => image.iter().map(|&y| data[y].clone()).collect(),
        Direction::Deinterleave => {
            let mut slots: Vec<Option<T>> = vec![None; data.len()];
            for (x, &y) in image.iter().enumerate() {
                slots[y] = Some(data[x].clone());
            }
            slots.into_iter().map(|s| s.expect("bijection fills every slot")).collect()
        }
    })
}
