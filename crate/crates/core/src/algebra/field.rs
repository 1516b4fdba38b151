//! Real algebraic number fields `Q(θ)` for a single real root `θ`, and exact
//! arithmetic and sign determination on their elements.
//!
//! A field is fixed by an irreducible integer polynomial and a rational open
//! interval isolating one of its real roots. Elements are polynomials in `θ`
//! of degree below the field degree. Degree-one fields all denote `Q`; their
//! elements are plain rationals and promote into any other field.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::factor::is_irreducible;
use super::poly::{from_int_vec, QPoly};
use super::rational::{rat, rat_int, sign, to_f64, Interval};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct NumberField {
    min_poly: Vec<BigInt>,
    modulus: QPoly,
    lo: BigRational,
    hi: BigRational,
}

impl NumberField {
    /// Validates `min_poly` (lowest degree first) and the isolating interval
    /// `(lo, hi)`.
    pub fn new(min_poly: &[BigInt], lo: BigRational, hi: BigRational) -> Result<Arc<Self>> {
        let q = from_int_vec(min_poly);
        match q.degree() {
            None | Some(0) => {
                return Err(Error::InvalidInput("minimal polynomial must be nonconstant".into()))
            }
            _ => {}
        }
        if lo >= hi {
            return Err(Error::InvalidInput(format!("empty interval ({lo}, {hi})")));
        }
        let prim = q.to_primitive_ints();
        if !is_irreducible(&prim) {
            return Err(Error::Reducible(q.to_string()));
        }
        let roots = q.count_roots_open(&lo, &hi);
        if roots != 1 {
            return Err(Error::NotIsolating(roots));
        }
        Ok(Arc::new(NumberField {
            modulus: from_int_vec(&prim).monic(),
            min_poly: prim,
            lo,
            hi,
        }))
    }

    /// The field of rationals, presented as `Q(0)` with `θ` a root of `x`.
    pub fn rationals() -> Arc<Self> {
        Arc::new(NumberField {
            min_poly: vec![BigInt::zero(), BigInt::one()],
            modulus: QPoly::x(),
            lo: rat(-1, 1),
            hi: rat(1, 1),
        })
    }

    /// `Q(√d)` with the positive root; `d` must be a positive non-square.
    pub fn sqrt(d: i64) -> Result<Arc<Self>> {
        if d <= 0 {
            return Err(Error::InvalidInput(format!("sqrt of non-positive {d}")));
        }
        let r = BigInt::from(d).sqrt();
        NumberField::new(
            &[BigInt::from(-d), BigInt::zero(), BigInt::one()],
            rat_int(&r),
            rat_int(&(r + 1)),
        )
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub(crate) fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    /// Whether two presentations denote the same embedded field with the
    /// same generator.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        if Arc::ptr_eq(self, other) || (self.is_rational() && other.is_rational()) {
            return true;
        }
        if self.min_poly != other.min_poly {
            return false;
        }
        let lo = (&self.lo).max(&other.lo);
        let hi = (&self.hi).min(&other.hi);
        lo < hi && self.modulus.count_roots_open(lo, hi) == 1
    }

    /// An isolating interval for `θ` of width at most `width`.
    pub fn root_interval(&self, width: &BigRational) -> Interval {
        if self.is_rational() {
            return Interval::point(self.rational_root());
        }
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        let s_lo = self.modulus.sign_at(&lo);
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / rat(2, 1);
            if self.modulus.sign_at(&mid) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Interval::new(lo, hi)
    }

    fn rational_root(&self) -> BigRational {
        -self.modulus.coeff(0)
    }

    pub fn theta(self: &Arc<Self>) -> FieldElement {
        if self.is_rational() {
            let r = self.rational_root();
            return FieldElement::rational(self, r);
        }
        let mut coeffs = vec![BigRational::zero(); self.degree()];
        coeffs[1] = BigRational::one();
        FieldElement { field: self.clone(), coeffs }
    }

    /// Image of this field's generator inside `target`, when an embedding
    /// compatible with the real embeddings can be found. Covers identical
    /// fields, `Q`, and pairs of real quadratic fields with the same
    /// discriminant class.
    pub fn embed_generator(self: &Arc<Self>, target: &Arc<Self>) -> Option<FieldElement> {
        if self.is_rational() {
            return Some(FieldElement::rational(target, self.rational_root()));
        }
        if self.same_as(target) {
            return Some(target.theta());
        }
        if self.degree() != 2 || target.degree() != 2 {
            return None;
        }
        let (sigma, src_disc) = quadratic_sqrt_disc(self);
        let (tgt_sigma, tgt_disc) = quadratic_sqrt_disc(target);
        let tgt_u = quadratic_u(target);
        let tgt_sqrt = if tgt_sigma < 0 { tgt_u.neg() } else { tgt_u };
        let ratio = BigRational::new(src_disc, tgt_disc.clone());
        let r = rational_sqrt(&ratio)?;
        // src √Δ = r · tgt √Δ, and tgt √Δ = σ_t (2 a_t θ_t + b_t).
        let sqrt_tgt = tgt_sqrt.scale(&r);
        let a = rat_int(&self.min_poly[2]);
        let b = rat_int(&self.min_poly[1]);
        // θ = (σ √Δ − b) / (2a), σ the sign of 2aθ + b.
        let sqrt_src_signed = if sigma < 0 { sqrt_tgt.neg() } else { sqrt_tgt };
        let image = sqrt_src_signed
            .add_rational(&-b)
            .scale(&(rat(1, 2) / a));
        debug_assert!(image.satisfies(&self.modulus));
        Some(image)
    }

    pub fn describe(&self) -> String {
        format!("{} with root in ({}, {})", self.modulus, self.lo, self.hi)
    }
}

/// For a quadratic field `aθ² + bθ + c = 0`: the sign `σ` of `u = 2aθ + b`
/// and the discriminant `Δ = b² − 4ac`, so that `u = σ√Δ`.
fn quadratic_sqrt_disc(field: &Arc<NumberField>) -> (i8, BigInt) {
    let (c, b, a) = (&field.min_poly[0], &field.min_poly[1], &field.min_poly[2]);
    let disc = b * b - BigInt::from(4) * a * c;
    (quadratic_u(field).sign(), disc)
}

fn quadratic_u(field: &Arc<NumberField>) -> FieldElement {
    let (b, a) = (&field.min_poly[1], &field.min_poly[2]);
    field
        .theta()
        .scale(&rat_int(&(BigInt::from(2) * a)))
        .add_rational(&rat_int(b))
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.describe())
    }
}

/// Element of a [`NumberField`]: `Σ coeffs[i] θ^i`.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

/// Arithmetic selector for [`fe_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn fe_arith(op: ArithOp, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

impl FieldElement {
    /// Reduces an arbitrary polynomial in `θ` modulo the minimal polynomial.
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        FieldElement::from_poly(field, &QPoly::new(coeffs))
    }

    /// Exact length check: `coeffs.len()` must equal the field degree.
    pub fn from_exact_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != field.degree() {
            return Err(Error::DimensionMismatch { expected: field.degree(), got: coeffs.len() });
        }
        Ok(FieldElement { field: field.clone(), coeffs })
    }

    fn from_poly(field: &Arc<NumberField>, p: &QPoly) -> Self {
        if field.is_rational() {
            // Elements of Q are their own constant term; evaluate at the root.
            let v = p.eval(&field.rational_root());
            return FieldElement { field: field.clone(), coeffs: vec![v] };
        }
        let r = p.rem(field.modulus());
        let n = field.degree();
        let coeffs = (0..n).map(|i| r.coeff(i)).collect();
        FieldElement { field: field.clone(), coeffs }
    }

    pub fn rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); field.degree()];
        coeffs[0] = q;
        FieldElement { field: field.clone(), coeffs }
    }

    pub fn integer(field: &Arc<NumberField>, n: i64) -> Self {
        FieldElement::rational(field, rat(n, 1))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElement::rational(field, BigRational::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        FieldElement::rational(field, BigRational::one())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn poly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Rational integer value, if any.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Re-expresses the element in `target`, via [`NumberField::embed_generator`]
    /// or because the element is rational.
    pub fn promote_to(&self, target: &Arc<NumberField>) -> Result<FieldElement> {
        if self.field.same_as(target) {
            return Ok(FieldElement { field: target.clone(), coeffs: self.coeffs.clone() });
        }
        if let Some(q) = self.as_rational() {
            return Ok(FieldElement::rational(target, q));
        }
        let gen = self.field.embed_generator(target).ok_or(Error::FieldMismatch)?;
        // Horner in the target field.
        let mut acc = FieldElement::zero(target);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_same(&gen).add_rational(c);
        }
        Ok(acc)
    }

    /// Common field for a binary operation, following the promotion rules.
    fn unify(&self, other: &FieldElement) -> Result<(FieldElement, FieldElement)> {
        if self.field.same_as(&other.field) {
            let f = if self.field.is_rational() { other.field.clone() } else { self.field.clone() };
            return Ok((self.with_field(&f), other.with_field(&f)));
        }
        if self.field.is_rational() || self.is_rational() {
            return Ok((self.promote_to(&other.field)?, other.clone()));
        }
        if other.field.is_rational() || other.is_rational() {
            return Ok((self.clone(), other.promote_to(&self.field)?));
        }
        Err(Error::FieldMismatch)
    }

    fn with_field(&self, f: &Arc<NumberField>) -> FieldElement {
        if Arc::ptr_eq(&self.field, f) {
            self.clone()
        } else if f.is_rational() || self.field.is_rational() {
            match self.as_rational() {
                Some(q) => FieldElement::rational(f, q),
                None => self.clone(),
            }
        } else {
            FieldElement { field: f.clone(), coeffs: self.coeffs.clone() }
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement> {
        let (a, b) = self.unify(other)?;
        Ok(a.add_same(&b))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        let (a, b) = self.unify(other)?;
        Ok(a.add_same(&b.neg()))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        let (a, b) = self.unify(other)?;
        Ok(a.mul_same(&b))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement> {
        let (a, b) = self.unify(other)?;
        Ok(a.mul_same(&b.inverse()?))
    }

    // The `*_same` helpers assume both operands share a field.
    pub(crate) fn add_same(&self, other: &FieldElement) -> FieldElement {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub(crate) fn mul_same(&self, other: &FieldElement) -> FieldElement {
        if self.field.is_rational() {
            return FieldElement::rational(&self.field, &self.coeffs[0] * &other.coeffs[0]);
        }
        FieldElement::from_poly(&self.field, &(&self.poly() * &other.poly()))
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn add_rational(&self, q: &BigRational) -> FieldElement {
        let mut out = self.clone();
        out.coeffs[0] += q;
        out
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(FieldElement::rational(&self.field, q.recip()));
        }
        let (g, s, _) = self.poly().ext_gcd(self.field.modulus());
        debug_assert_eq!(g, QPoly::constant(BigRational::one()));
        Ok(FieldElement::from_poly(&self.field, &s))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut b = base;
        let mut acc = FieldElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&b);
            }
            b = b.mul_same(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact sign of the real number `a(θ)`.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.as_rational() {
            return sign(&q);
        }
        let p = self.poly();
        let f = self.field.modulus();
        let (mut lo, mut hi) = (self.field.lo.clone(), self.field.hi.clone());
        let s_lo = f.sign_at(&lo);
        loop {
            let enclosure = p.eval_interval(&Interval::new(lo.clone(), hi.clone()));
            if !enclosure.contains_zero() {
                return sign(&enclosure.lo);
            }
            // θ is irrational, so the minimal polynomial never vanishes at a
            // rational midpoint.
            let mid = (&lo + &hi) / rat(2, 1);
            if f.sign_at(&mid) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// Exact comparison of real values (after promotion).
    pub fn cmp_value(&self, other: &FieldElement) -> Result<std::cmp::Ordering> {
        Ok(self.try_sub(other)?.sign().cmp(&0))
    }

    pub fn abs(&self) -> FieldElement {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Rational enclosure of the value with width at most `width`.
    pub fn enclosure(&self, width: &BigRational) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        let p = self.poly();
        let mut w = width.clone();
        loop {
            let iv = self.field.root_interval(&w);
            let e = p.eval_interval(&iv);
            if &e.width() <= width {
                return e;
            }
            w /= rat(16, 1);
        }
    }

    /// Floating-point approximation for display and numerical estimates.
    pub fn to_f64(&self) -> f64 {
        let e = self.enclosure(&rat(1, 1 << 60));
        to_f64(&e.midpoint())
    }

    fn satisfies(&self, poly: &QPoly) -> bool {
        let mut acc = FieldElement::zero(&self.field);
        for c in poly.coeffs().iter().rev() {
            acc = acc.mul_same(self).add_rational(c);
        }
        acc.is_zero()
    }

    /// Exact equality of values (promotion applied; mismatched fields compare unequal).
    pub fn value_eq(&self, other: &FieldElement) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let s = self.poly().to_string().replace('x', "θ");
        write!(f, "{s}")
    }
}
