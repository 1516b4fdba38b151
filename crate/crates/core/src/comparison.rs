//! Deciding equality of trace ranges, the rotation-algebra classification,
//! and checking isomorphism certificates between invariants.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::factor::prime_divisors;
use crate::algebra::{hermite_normal_form, rational_nullspace, solve_integer, FieldElement, IntMatrix, NumberField};
use crate::dimension::GroupElement;
use crate::error::{Error, Result};
use crate::invariant::{inv_trace, trace_range, ElliottInvariant, InvElement, TraceRangeModule};

/// Assumption recorded on every certificate check.
pub const SAME_MEASURES_ASSUMPTION: &str =
    "invariant measures of the suspension and of its time-t map assumed to coincide";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    IsomorphicCertified,
    NotIsomorphic,
    Undecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::IsomorphicCertified => "isomorphic_certified",
            Verdict::NotIsomorphic => "not_isomorphic",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub verdict: Verdict,
    pub reasons: Vec<Check>,
    pub assumptions: Vec<String>,
}

impl ComparisonReport {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.reasons.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.reasons.iter().all(|c| c.passed)
    }
}

/// Candidate isomorphism `Z ⊕ K⁰(X₁) → Z ⊕ K⁰(X₂)`:
/// `(n, z) ↦ (scale·n, Φ(z) + n·c)` where `Φ` sends a level-`p·j`
/// representative `v` to the level-`q·j` representative `B·v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoCertificate {
    pub scale: BigInt,
    pub block: IntMatrix,
    pub source_level_offset: u32,
    pub target_level_offset: u32,
    pub mixing_column: Vec<BigInt>,
    /// Whether the caller asserts that the suspension and its time-`t` map
    /// have the same invariant measures, which no test here can decide.
    pub assume_same_measures: bool,
}

impl IsoCertificate {
    pub fn new(block: IntMatrix, source_level_offset: u32, target_level_offset: u32) -> Self {
        let k2 = block.rows();
        IsoCertificate {
            scale: BigInt::one(),
            block,
            source_level_offset,
            target_level_offset,
            mixing_column: vec![BigInt::zero(); k2],
            assume_same_measures: true,
        }
    }

    pub fn identity(k: usize) -> Self {
        IsoCertificate::new(IntMatrix::identity(k), 1, 1)
    }

    /// The certificate for `next ∘ self`.
    pub fn then(&self, next: &IsoCertificate) -> Result<IsoCertificate> {
        let block = next.block.mul(&self.block)?;
        let pushed = next.block.mul_vec(&self.mixing_column)?;
        Ok(IsoCertificate {
            scale: &self.scale * &next.scale,
            block,
            source_level_offset: self.source_level_offset * next.source_level_offset,
            target_level_offset: self.target_level_offset * next.target_level_offset,
            mixing_column: pushed.iter().zip(&next.mixing_column).map(|(a, b)| a + &next.scale * b).collect(),
            assume_same_measures: self.assume_same_measures && next.assume_same_measures,
        })
    }

    fn check_shape(&self, k1: usize, k2: usize) -> Result<()> {
        if self.block.rows() != k2 || self.block.cols() != k1 {
            return Err(Error::MalformedCertificate(format!(
                "block is {}x{}, expected {k2}x{k1}",
                self.block.rows(),
                self.block.cols()
            )));
        }
        if self.mixing_column.len() != k2 {
            return Err(Error::MalformedCertificate(format!(
                "mixing column has length {}, expected {k2}",
                self.mixing_column.len()
            )));
        }
        if self.source_level_offset == 0 || self.target_level_offset == 0 {
            return Err(Error::MalformedCertificate("level offsets must be positive".into()));
        }
        Ok(())
    }
}

/// Power-basis coordinates.
fn coords(x: &FieldElement) -> Vec<BigRational> {
    x.coeffs().to_vec()
}

/// A `Z`-lattice in `Q^n` with an echelon basis.
struct Lattice {
    denom: BigInt,
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Lattice {
    fn new(gens: &[Vec<BigRational>]) -> Lattice {
        let denom = gens.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|q| (q * BigRational::from_integer(denom.clone())).to_integer()).collect())
            .collect();
        let mut basis = Vec::new();
        let mut pivots = Vec::new();
        if !rows.is_empty() {
            let h = hermite_normal_form(&IntMatrix::from_rows(&rows).expect("rectangular"));
            for row in h.to_rows() {
                if let Some(p) = row.iter().position(|x| !x.is_zero()) {
                    pivots.push(p);
                    basis.push(row);
                }
            }
        }
        Lattice { denom, basis, pivots }
    }

    /// Coordinates of `x` in the basis, or `None` if `x` is outside the
    /// rational span.
    fn coords_of(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        let d = BigRational::from_integer(self.denom.clone());
        let y: Vec<BigRational> = x.iter().map(|q| q * &d).collect();
        let mut c: Vec<BigRational> = Vec::with_capacity(self.basis.len());
        for (i, &p) in self.pivots.iter().enumerate() {
            let mut acc = y[p].clone();
            for (ci, row) in c.iter().zip(&self.basis) {
                acc -= ci * BigRational::from_integer(row[p].clone());
            }
            c.push(acc / BigRational::from_integer(self.basis[i][p].clone()));
        }
        let ok = (0..y.len()).all(|j| {
            let s: BigRational = c
                .iter()
                .zip(&self.basis)
                .map(|(ci, row)| ci * BigRational::from_integer(row[j].clone()))
                .sum();
            s == y[j]
        });
        ok.then_some(c)
    }
}

fn mat_vec(a: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Whether every prime factor of `d` lies in `primes`.
fn supported_on(d: &BigInt, primes: &[BigInt]) -> bool {
    let mut d = d.abs();
    for p in primes {
        while (&d % p).is_zero() {
            d /= p;
        }
    }
    d.is_one()
}

/// `span_Z(fixed) + Z[1/u]·span_Z(divisible)` in power-basis coordinates,
/// prepared for membership queries. The subgroup equals the intersection
/// of its localizations: at primes not dividing `u` it is the lattice of
/// all generators, at a prime dividing `u` it is `fixed + Q·divisible`.
struct LocalModule {
    n: usize,
    unit_primes: Vec<BigInt>,
    full: Lattice,
    /// Rows spanning the annihilator of `Q·divisible`.
    annihilator: Vec<Vec<BigRational>>,
    projected_fixed: Lattice,
}

impl LocalModule {
    fn new(m: &TraceRangeModule) -> Result<LocalModule> {
        let n = m.field.degree();
        let fixed: Vec<Vec<BigRational>> = m.fixed.iter().map(coords).collect();
        let divisible: Vec<Vec<BigRational>> = m.divisible.iter().map(coords).collect();
        let all: Vec<Vec<BigRational>> = fixed.iter().chain(&divisible).cloned().collect();
        let unit_primes = if m.is_finitely_generated() {
            Vec::new()
        } else {
            let u = m.integer_unit().ok_or(Error::UnsupportedUnits)?;
            if u.is_zero() {
                return Err(Error::InvalidInput("zero denominator unit".into()));
            }
            prime_divisors(&u)
        };
        let annihilator = rational_nullspace(&divisible, n);
        let projected: Vec<Vec<BigRational>> = fixed.iter().map(|f| mat_vec(&annihilator, f)).collect();
        let projected_fixed = Lattice::new(&projected);
        Ok(LocalModule { n, unit_primes, full: Lattice::new(&all), annihilator, projected_fixed })
    }

    /// Whether `Z[1/m]·x` lies in the module (`m = 1` for plain membership).
    fn contains_scaled(&self, x: &[BigRational], m: &BigInt) -> bool {
        debug_assert_eq!(x.len(), self.n);
        let is_zero = x.iter().all(Zero::is_zero);
        if is_zero {
            return true;
        }
        let m_primes = if m.is_one() { Vec::new() } else { prime_divisors(m) };
        // Away from the unit, the localization is a lattice: it absorbs no
        // infinite division by a prime of m.
        if m_primes.iter().any(|p| !self.unit_primes.contains(p)) {
            return false;
        }
        let Some(c) = self.full.coords_of(x) else { return false };
        if !c.iter().all(|q| supported_on(q.denom(), &self.unit_primes)) {
            return false;
        }
        let px = mat_vec(&self.annihilator, x);
        for p in &self.unit_primes {
            if m_primes.contains(p) {
                if !px.iter().all(Zero::is_zero) {
                    return false;
                }
                continue;
            }
            match self.projected_fixed.coords_of(&px) {
                Some(c) if c.iter().all(|q| !q.denom().is_multiple_of(p)) => {}
                _ => return false,
            }
        }
        true
    }

    fn contains_module(&self, other: &TraceRangeModule) -> Result<bool> {
        let u = other.integer_unit();
        for f in &other.fixed {
            if !self.contains_scaled(&coords(f), &BigInt::one()) {
                return Ok(false);
            }
        }
        let m = if other.divisible.is_empty() || other.is_finitely_generated() {
            BigInt::one()
        } else {
            u.ok_or(Error::UnsupportedUnits)?
        };
        for s in &other.divisible {
            if !self.contains_scaled(&coords(s), &m) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Re-expresses `m` inside `field`.
fn module_in(m: &TraceRangeModule, field: &Arc<NumberField>) -> Result<TraceRangeModule> {
    TraceRangeModule::with_kinds(field, m.unit.clone(), m.fixed.clone(), m.divisible.clone())
}

/// Exact equality of the subgroups of `R` denoted by two modules.
pub fn trace_range_equal(r1: &TraceRangeModule, r2: &TraceRangeModule) -> Result<bool> {
    let r2 = if r1.field.same_as(&r2.field) || r2.field.is_rational() {
        module_in(r2, &r1.field)?
    } else if r1.field.is_rational() || r2.field.embed_generator(&r1.field).is_some() {
        return trace_range_equal(&module_in(r1, &r2.field)?, r2);
    } else {
        return Err(Error::FieldMismatch);
    };
    let r1 = module_in(r1, &r2.field)?;
    for r in [&r1, &r2] {
        if !r.is_finitely_generated() && r.integer_unit().is_none() {
            return Err(Error::UnsupportedUnits);
        }
    }
    let l1 = LocalModule::new(&r1)?;
    let l2 = LocalModule::new(&r2)?;
    Ok(l1.contains_module(&r2)? && l2.contains_module(&r1)?)
}

/// Puts two elements into a common field, embedding one quadratic field
/// into the other when needed.
pub(crate) fn common(a: &FieldElement, b: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    if a.field().same_as(b.field()) || a.is_rational() || b.is_rational() {
        let d = a.try_sub(b)?;
        let f = d.field().clone();
        return Ok((a.promote_to(&f)?, b.promote_to(&f)?));
    }
    if let Ok(b2) = b.promote_to(a.field()) {
        return Ok((a.clone(), b2));
    }
    Ok((a.promote_to(b.field())?, b.clone()))
}

fn equal_values(a: &FieldElement, b: &FieldElement) -> Result<bool> {
    let (a, b) = common(a, b)?;
    Ok(a.value_eq(&b))
}

/// The rotation algebras at `t1` and `t2` are isomorphic iff
/// `t1 ≡ ±t2 (mod Z)`.
pub fn rotation_isomorphic(t1: &FieldElement, t2: &FieldElement) -> Result<bool> {
    if t1.is_rational() || t2.is_rational() {
        return Err(Error::RationalTime);
    }
    let (a, b) = common(t1, t2)?;
    let diff = a.try_sub(&b)?;
    let sum = a.try_add(&b)?;
    Ok(diff.as_integer().is_some() || sum.as_integer().is_some())
}

/// `Z + tZ` as a trace-range module.
pub fn rotation_range(t: &FieldElement) -> Result<TraceRangeModule> {
    TraceRangeModule::lattice(t.field(), vec![t.clone()])
}

/// Maps `e` through the certificate into the target invariant.
pub fn apply_certificate(
    inv1: &ElliottInvariant,
    inv2: &ElliottInvariant,
    cert: &IsoCertificate,
    e: &InvElement,
) -> Result<InvElement> {
    cert.check_shape(inv1.k(), inv2.k())?;
    let (p, q) = (cert.source_level_offset as u64, cert.target_level_offset as u64);
    let j = e.z.level.div_ceil(p);
    let lifted = inv1.group().lift(&e.z, p * j)?;
    let image = cert.block.mul_vec(&lifted.vec)?;
    let mixed = GroupElement::new(0, cert.mixing_column.iter().map(|c| c * &e.n).collect());
    let mixed = inv2.group().lift(&mixed, q * j)?;
    let z = GroupElement::new(q * j, image.iter().zip(&mixed.vec).map(|(a, b)| a + b).collect());
    Ok(InvElement { n: &cert.scale * &e.n, z })
}

fn zero_mod_kernel(a: &IntMatrix, m: &IntMatrix) -> Result<bool> {
    Ok(a.pow(a.rows() as u32)?.mul(m)?.is_zero())
}

/// Checks that a certificate describes a unit-preserving, trace-compatible
/// group isomorphism. A certificate that fails proves nothing about the
/// invariants, so failures yield `Undecided`.
pub fn verify_iso_certificate(
    inv1: &ElliottInvariant,
    inv2: &ElliottInvariant,
    cert: &IsoCertificate,
) -> Result<ComparisonReport> {
    let (k1, k2) = (inv1.k(), inv2.k());
    cert.check_shape(k1, k2)?;
    let mut report = ComparisonReport {
        verdict: Verdict::Undecided,
        reasons: Vec::new(),
        assumptions: inv1.assumptions(),
    };
    if cert.assume_same_measures {
        report.assumptions.push(SAME_MEASURES_ASSUMPTION.to_string());
    } else {
        report.push("measure_assumption", false, "certificate does not assert coinciding invariant measures");
    }
    let a1 = inv1.group().connecting_map();
    let a2 = inv2.group().connecting_map();
    let (p, q) = (cert.source_level_offset, cert.target_level_offset);
    let b = &cert.block;

    // Compatibility with the connecting maps: A₂^q·B ≡ B·A₁^p.
    let lhs = a2.pow(q)?.mul(b)?;
    let rhs = b.mul(&a1.pow(p)?)?;
    let well_defined = zero_mod_kernel(a2, &lhs.sub(&rhs)?)?;
    report.push("well_defined", well_defined, "A2^q B = B A1^p modulo the eventual kernel");

    // Two-sided inverse: X with B·X ≡ A₂^(q·r) and X·B ≡ A₁^(p·r).
    let scale_ok = cert.scale.abs().is_one();
    let mut inverse = None;
    let bound = 2 * k1.max(k2) as u32;
    let a2k = a2.pow(k2 as u32)?;
    let a1k = a1.pow(k1 as u32)?;
    for r in 0..=bound {
        let target = a2k.mul(&a2.pow(q * r)?)?;
        if let Some(x) = solve_integer(&a2k.mul(b)?, &target)? {
            let back = a1k.mul(&x.mul(b)?.sub(&a1.pow(p * r)?)?)?;
            let compat = a1k.mul(&a1.pow(p)?.mul(&x)?.sub(&x.mul(&a2.pow(q)?)?)?)?;
            if back.is_zero() && compat.is_zero() {
                inverse = Some(r);
                break;
            }
        }
    }
    let iso = scale_ok && inverse.is_some();
    report.push(
        "group_isomorphism",
        iso,
        match inverse {
            Some(r) if scale_ok => format!("inverse exhibited with r = {r}"),
            Some(_) => "Z-summand block is not invertible".to_string(),
            None => format!("no inverse found for r <= {bound}"),
        },
    );

    let unit_img = apply_certificate(inv1, inv2, cert, &inv1.order_unit())?;
    let unit_ok = unit_img.n.is_one() && inv2.group().is_zero(&unit_img.z)?;
    report.push("order_unit", unit_ok, "(1, 0) maps to (1, 0)");

    // Traces on generators at levels 0 and p; with the unit these pin the
    // trace on the whole group.
    let mut gens = vec![inv1.order_unit()];
    for level in [0, p as u64] {
        for i in 0..k1 {
            let mut z = GroupElement::basis(k1, i);
            z.level = level;
            gens.push(InvElement::new(BigInt::zero(), z));
        }
    }
    let mut traces_ok = true;
    for e in &gens {
        let img = apply_certificate(inv1, inv2, cert, e)?;
        if !equal_values(&inv_trace(inv1, e)?, &inv_trace(inv2, &img)?)? {
            traces_ok = false;
            break;
        }
    }
    report.push("trace_compatible", traces_ok, "trace2(map(e)) = trace1(e) on generators");
    report.push(
        "order_preserved",
        traces_ok && iso,
        "positivity is determined by the unique trace, so trace compatibility carries the order",
    );
    if report.all_passed() {
        report.verdict = Verdict::IsomorphicCertified;
    }
    Ok(report)
}

/// Decidable necessary conditions for isomorphic invariants. Never
/// certifies isomorphism on its own.
pub fn compare_invariants(inv1: &ElliottInvariant, inv2: &ElliottInvariant) -> ComparisonReport {
    let mut report = ComparisonReport {
        verdict: Verdict::Undecided,
        reasons: Vec::new(),
        assumptions: inv1.assumptions(),
    };
    let mut refuted = false;
    match (inv1.k0_rank(), inv2.k0_rank()) {
        (Ok(a), Ok(b)) => {
            refuted |= a != b;
            report.push("k0_rank", a == b, format!("{a} vs {b}"));
        }
        (Err(e), _) | (_, Err(e)) => report.push("k0_rank", false, format!("undetermined: {e}")),
    }
    report.push("k0_torsion", true, "stationary limits of free groups are torsion-free");
    let ranges = trace_range(inv1).and_then(|r1| trace_range(inv2).and_then(|r2| trace_range_equal(&r1, &r2)));
    match ranges {
        Ok(eq) => {
            refuted |= !eq;
            report.push("trace_range", eq, if eq { "equal" } else { "differ" });
        }
        Err(e) => report.push("trace_range", false, format!("undetermined: {} ({e})", e.name())),
    }
    report.push("certificate", false, "isomorphism requires a verified certificate");
    if refuted {
        report.verdict = Verdict::NotIsomorphic;
    }
    report
}
