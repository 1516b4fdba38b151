//! Factorization of integer polynomials over `Q` by Kronecker's method.
//!
//! The degrees in scope are small (characteristic polynomials of incidence
//! matrices, quadratic time parameters), so the exponential search over
//! divisor tuples stays cheap. Evaluation points are chosen to have few
//! divisors, and monic inputs fix the leading coefficient of the factor,
//! which removes one interpolation point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{eval_int, from_int_vec, QPoly};

/// Irreducible factors of a nonzero integer polynomial, with multiplicity,
/// each primitive with positive leading coefficient. Constant content is
/// dropped.
pub fn factor(coeffs: &[BigInt]) -> Vec<Vec<BigInt>> {
    let f = from_int_vec(coeffs).to_primitive_ints();
    let mut out = Vec::new();
    factor_into(f, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Distinct irreducible factors.
pub fn distinct_factors(coeffs: &[BigInt]) -> Vec<Vec<BigInt>> {
    let mut fs = factor(coeffs);
    fs.dedup();
    fs
}

pub fn is_irreducible(coeffs: &[BigInt]) -> bool {
    let f = from_int_vec(coeffs).to_primitive_ints();
    if f.len() < 2 {
        return false;
    }
    (1..=(f.len() - 1) / 2).all(|d| find_factor_of_degree(&f, d).is_none())
}

fn factor_into(f: Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
    let deg = f.len().saturating_sub(1);
    if deg == 0 {
        return;
    }
    for d in 1..=deg / 2 {
        if let Some(g) = find_factor_of_degree(&f, d) {
            let q = exact_quotient(&f, &g).expect("factor divides");
            out.push(g);
            factor_into(q, out);
            return;
        }
    }
    out.push(f);
}

fn exact_quotient(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let (q, r) = from_int_vec(f).div_rem(&from_int_vec(g));
    if !r.is_zero() {
        return None;
    }
    if q.coeffs().iter().any(|c| !c.is_integer()) {
        return None;
    }
    Some(q.to_primitive_ints())
}

/// Searches for a factor of exact degree `d` with integer coefficients.
fn find_factor_of_degree(f: &[BigInt], d: usize) -> Option<Vec<BigInt>> {
    if f[0].is_zero() {
        return (d == 1).then(|| vec![BigInt::zero(), BigInt::one()]);
    }
    let lead = f.last().unwrap().clone();
    let monic = lead.abs().is_one();
    let needed = if monic { d } else { d + 1 };

    // Candidate points with the fewest divisors. A zero value means an
    // integer root, i.e. a linear factor.
    let mut candidates: Vec<(usize, BigInt, BigInt)> = Vec::new();
    for x in (-24i64..=24).map(BigInt::from) {
        let v = eval_int(f, &x);
        if v.is_zero() {
            return (d == 1).then(|| vec![-x, BigInt::one()]);
        }
        let n = divisor_count(&v.abs());
        candidates.push((n, x, v));
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.abs().cmp(&b.1.abs())));
    let points: Vec<(BigInt, BigInt)> = candidates
        .into_iter()
        .take(needed)
        .map(|(_, x, v)| (x, v))
        .collect();
    let xs: Vec<BigRational> = points.iter().map(|(x, _)| BigRational::from_integer(x.clone())).collect();
    let basis = lagrange_basis(&xs);

    let divisor_lists: Vec<Vec<BigInt>> = points
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            let pos = divisors(&v.abs());
            if i == 0 && !monic {
                // Overall sign of the factor is free; fix it on the first point.
                pos
            } else {
                pos.iter().flat_map(|p| [p.clone(), -p.clone()]).collect()
            }
        })
        .collect();

    let x_pow_d: Vec<BigRational> = xs.iter().map(|x| num_traits::pow(x.clone(), d)).collect();
    let mut idx = vec![0usize; needed];
    loop {
        let mut coeffs = vec![BigRational::zero(); needed];
        for (i, b) in basis.iter().enumerate() {
            let mut y = BigRational::from_integer(divisor_lists[i][idx[i]].clone());
            if monic {
                y -= &x_pow_d[i];
            }
            for (k, c) in b.coeffs().iter().enumerate() {
                coeffs[k] += &y * c;
            }
        }
        if monic {
            coeffs.push(BigRational::one());
        }
        if coeffs.iter().all(|c| c.is_integer()) && coeffs.len() == d + 1 && !coeffs[d].is_zero() {
            let g: Vec<BigInt> = coeffs.iter().map(|c| c.to_integer()).collect();
            let gp = from_int_vec(&g).to_primitive_ints();
            if gp.len() == d + 1 && exact_quotient(f, &gp).is_some() {
                return Some(gp);
            }
        }
        // Odometer-style increment over the divisor tuple.
        let mut pos = 0;
        loop {
            if pos == needed {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < divisor_lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn lagrange_basis(xs: &[BigRational]) -> Vec<QPoly> {
    (0..xs.len())
        .map(|i| {
            let mut num = QPoly::constant(BigRational::one());
            let mut den = BigRational::one();
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    num = &num * &QPoly::linear_root(xj);
                    den *= &xs[i] - xj;
                }
            }
            num.scale(&den.recip())
        })
        .collect()
}

fn prime_factorization(n: &BigInt) -> Vec<(BigInt, u32)> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    if let Some(small) = n.to_u64() {
        return factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect();
    }
    let mut n = n;
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut e = 0;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `n` (trial division).
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    prime_factorization(n).into_iter().map(|(p, _)| p).collect()
}

fn divisor_count(n: &BigInt) -> usize {
    // Quick cap: large values are never good interpolation points.
    if n.bits() > 40 {
        return usize::MAX / 2 + n.bits().to_usize().unwrap_or(0);
    }
    prime_factorization(n)
        .iter()
        .map(|(_, e)| *e as usize + 1)
        .product()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in prime_factorization(n) {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    ds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::int_poly;

    #[test]
    fn quadratics() {
        assert!(is_irreducible(&int_poly(&[-2, 0, 1])));
        assert!(is_irreducible(&int_poly(&[-1, -1, 1])));
        assert!(!is_irreducible(&int_poly(&[-1, 0, 1])));
        assert_eq!(
            factor(&int_poly(&[-1, 0, 1])),
            vec![int_poly(&[-1, 1]), int_poly(&[1, 1])]
        );
    }

    #[test]
    fn non_monic_and_content() {
        // 6x^2 - 3 = 3(2x^2 - 1), irreducible
        assert!(is_irreducible(&int_poly(&[-3, 0, 6])));
        // (2x - 1)(3x + 1) = 6x^2 - x - 1
        assert_eq!(
            factor(&int_poly(&[-1, -1, 6])),
            vec![int_poly(&[-1, 2]), int_poly(&[1, 3])]
        );
    }

    #[test]
    fn quartic_into_quadratics() {
        // (x^2 - 2)(x^2 - 3) = x^4 - 5x^2 + 6
        let f = int_poly(&[6, 0, -5, 0, 1]);
        assert_eq!(
            factor(&f),
            vec![int_poly(&[-3, 0, 1]), int_poly(&[-2, 0, 1])]
        );
        // x^4 + 1 is irreducible over Q
        assert!(is_irreducible(&int_poly(&[1, 0, 0, 0, 1])));
    }

    #[test]
    fn repeated_and_zero_roots() {
        // x^2 (x - 2)
        let f = int_poly(&[0, 0, -2, 1]);
        assert_eq!(
            factor(&f),
            vec![int_poly(&[-2, 1]), int_poly(&[0, 1]), int_poly(&[0, 1])]
        );
        assert_eq!(distinct_factors(&f).len(), 2);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(&BigInt::from(12)), int_poly(&[1, 2, 3, 4, 6, 12]));
        assert_eq!(prime_divisors(&BigInt::from(360)), int_poly(&[2, 3, 5]));
    }

    proptest::proptest! {
        #[test]
        fn product_of_factors_recovers_input(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
            // (x^2 + a x + b)(x + c)
            let f = &QPoly::from_ints(&[b, a, 1]) * &QPoly::from_ints(&[c, 1]);
            let fs = factor(&f.to_primitive_ints());
            let prod = fs.iter().fold(QPoly::constant(BigRational::one()), |acc, g| &acc * &from_int_vec(g));
            proptest::prop_assert_eq!(prod.to_primitive_ints(), f.to_primitive_ints());
            for g in &fs {
                proptest::prop_assert!(is_irreducible(g));
            }
        }
    }
}
