//! Dense linear algebra over integers and fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub};

use crate::scalar::Scalar;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Runs on `i128` with overflow checks and restarts on `BigInt` when an
/// intermediate minor does not fit.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let narrow: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(rank) = bareiss_rank(narrow) {
        return rank;
    }
    let wide: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_rank(wide).expect("BigInt arithmetic cannot overflow")
}

/// `None` on overflow of `T`.
fn bareiss_rank<T>(mut m: Vec<Vec<T>>) -> Option<usize>
where
    T: Integer + Clone + CheckedMul + CheckedSub,
{
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut previous = T::one();
    for col in 0..width {
        if rank == height {
            break;
        }
        let Some(pivot) = (rank..height).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..width {
                let a = pivot_row[col].checked_mul(&row[j])?;
                let b = lead.checked_mul(&pivot_row[j])?;
                let (q, r) = a.checked_sub(&b)?.div_rem(&previous);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[col] = T::zero();
        }
        previous = pivot_row[col].clone();
        rank += 1;
    }
    Some(rank)
}

/// A particular solution of `A x = b` plus a basis of the null space of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution<S> {
    pub particular: Vec<S>,
    pub nullspace: Vec<Vec<S>>,
}

impl<S: Scalar> AffineSolution<S> {
    /// `particular + Σ coeffs[k] · nullspace[k]`.
    pub fn point(&self, coeffs: &[S]) -> Vec<S> {
        assert_eq!(coeffs.len(), self.nullspace.len());
        let mut x = self.particular.clone();
        for (c, basis) in coeffs.iter().zip(&self.nullspace) {
            for (xi, bi) in x.iter_mut().zip(basis) {
                *xi = xi.clone() + c.clone() * bi.clone();
            }
        }
        x
    }
}

fn is_negligible<S: Scalar>(x: &S) -> bool {
    x.abs_value() <= S::tolerance()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        if rank == height {
            break;
        }
        let best = (rank..height)
            .filter(|&r| !is_negligible(&m[r][col]))
            .max_by(|&a, &b| {
                m[a][col]
                    .abs_value()
                    .partial_cmp(&m[b][col].abs_value())
                    .expect("comparable")
            });
        let Some(best) = best else {
            continue;
        };
        m.swap(rank, best);
        let inv = S::one() / m[rank][col].clone();
        for x in m[rank].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - factor.clone() * p.clone();
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Solves `A x = b`; `None` when the system is inconsistent.
pub fn solve_affine<S: Scalar>(a: &[Vec<S>], b: &[S], columns: usize) -> Option<AffineSolution<S>> {
    assert_eq!(a.len(), b.len());
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), columns);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&columns) {
        return None;
    }
    let mut particular = vec![S::zero(); columns];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][columns].clone();
    }
    let free: Vec<usize> = (0..columns).filter(|c| !pivots.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![S::zero(); columns];
            v[f] = S::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -aug[r][f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution {
        particular,
        nullspace,
    })
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], x: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}
