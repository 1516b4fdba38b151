//! Exact Perron–Frobenius data of primitive nonnegative integer matrices.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::factor::distinct_factors;
use super::field::{FieldElement, NumberField};
use super::matrix::IntMatrix;
use super::poly::from_int_vec;
use crate::error::{Error, Result};

/// Spectral radius and strictly positive eigenvectors, all exact in the
/// field generated by the spectral radius.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub field: Arc<NumberField>,
    pub lambda: FieldElement,
    /// `left · m = λ · left`
    pub left: Vec<FieldElement>,
    /// `m · right = λ · right`
    pub right: Vec<FieldElement>,
}

/// True iff some power `m^p` with `p ≤ (k−1)² + 1` is entrywise positive.
pub fn is_primitive(m: &IntMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    if !m.is_nonnegative() {
        return Ok(false);
    }
    let k = m.rows();
    if k == 0 {
        return Ok(false);
    }
    let pattern: Vec<Vec<bool>> = (0..k).map(|i| m.row(i).iter().map(|x| !x.is_zero()).collect()).collect();
    let mut power = pattern.clone();
    let bound = (k - 1) * (k - 1) + 1;
    for _ in 0..bound {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(true);
        }
        power = bool_mul(&power, &pattern);
    }
    Ok(false)
}

pub(crate) fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let c = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| (0..c).map(|j| (0..b.len()).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Characteristic polynomial `det(xI − m)`, lowest degree first, by the
/// Faddeev–LeVerrier recursion (all divisions are exact over `Z`).
pub fn characteristic_polynomial(m: &IntMatrix) -> Result<Vec<BigInt>> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk)?;
        for i in 0..n {
            next[(i, i)] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = m.mul(&mk)?;
        let tr: BigInt = (0..n).map(|i| am[(i, i)].clone()).sum();
        coeffs[n - k] = -tr / BigInt::from(k);
    }
    Ok(coeffs)
}

pub fn perron_data(m: &IntMatrix) -> Result<PerronData> {
    if !is_primitive(m)? {
        return Err(Error::NotPrimitive);
    }
    let charpoly = characteristic_polynomial(m)?;
    let sqfree = from_int_vec(&charpoly).squarefree_part();
    let (lo, hi) = sqfree
        .largest_root_interval()
        .expect("a primitive matrix has a positive real eigenvalue");

    let factor = distinct_factors(&charpoly)
        .into_iter()
        .find(|f| from_int_vec(f).count_roots_open(&lo, &hi) == 1)
        .expect("the spectral radius is a root of some irreducible factor");
    let field = if factor.len() == 2 {
        NumberField::rationals()
    } else {
        NumberField::new(&factor, lo.clone(), hi.clone())?
    };
    let lambda = if factor.len() == 2 {
        // root of a·x + b
        let root = num_rational::BigRational::new(-factor[0].clone(), factor[1].clone());
        FieldElement::rational(&field, root)
    } else {
        field.theta()
    };

    let right = positive_kernel_vector(m, &lambda)?;
    let left = positive_kernel_vector(&m.transpose(), &lambda)?;
    Ok(PerronData { field, lambda, left, right })
}

/// Kernel vector of `m − λI` scaled to have positive entries.
fn positive_kernel_vector(m: &IntMatrix, lambda: &FieldElement) -> Result<Vec<FieldElement>> {
    let field = lambda.field().clone();
    let n = m.rows();
    let rows: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = FieldElement::rational(&field, m[(i, j)].clone().into());
                    if i == j {
                        e.add_same(&lambda.neg())
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let kernel = nullspace(rows);
    let v = kernel.into_iter().next().expect("λ is an eigenvalue");
    let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero kernel vector");
    let scaled: Vec<FieldElement> = if lead.sign() < 0 {
        v.iter().map(|x| x.neg()).collect()
    } else {
        v
    };
    debug_assert!(scaled.iter().all(|x| x.sign() > 0));
    Ok(scaled)
}

/// Basis of the right nullspace of a matrix over a number field.
pub fn nullspace(mut rows: Vec<Vec<FieldElement>>) -> Vec<Vec<FieldElement>> {
    let r = rows.len();
    let Some(c) = rows.first().map(|row| row.len()) else { return Vec::new() };
    let field = rows[0][0].field().clone();
    let mut pivot_cols = Vec::new();
    let mut pr = 0;
    for col in 0..c {
        let Some(p) = (pr..r).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(pr, p);
        let inv = rows[pr][col].inverse().expect("nonzero pivot");
        rows[pr] = rows[pr].iter().map(|x| x.mul_same(&inv)).collect();
        for i in 0..r {
            if i != pr && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[pr].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = x.add_same(&p.mul_same(&f).neg());
                }
            }
        }
        pivot_cols.push(col);
        pr += 1;
        if pr == r {
            break;
        }
    }
    (0..c)
        .filter(|j| !pivot_cols.contains(j))
        .map(|free| {
            let mut v = vec![FieldElement::zero(&field); c];
            v[free] = FieldElement::one(&field);
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = rows[i][free].neg();
            }
            v
        })
        .collect()
}

/// Whether `|det m| = 1`.
pub fn is_unimodular(m: &IntMatrix) -> Result<bool> {
    Ok(m.det()?.abs() == BigInt::from(1))
}
