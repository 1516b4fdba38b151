//! The Elliott invariant of the crossed product by the time-`t` map of the
//! suspension flow: `K₀ = Z ⊕ K⁰(X, S)` with order unit `(1, 0)`, the
//! pairing `(n, z) ↦ n + t·τ(z)`, and `K₁` abstractly equal to `K₀`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{FieldElement, NumberField};
use crate::dimension::{dg_from_diagram, dg_trace, DimensionGroup, GroupElement, Positivity};
use crate::error::{Error, Result};
use crate::systems::{BaseSystem, StationaryBVDiagram};

/// Assumption attached to every invariant built at an irrational time.
pub const MINIMALITY_ASSUMPTION: &str =
    "time-t map assumed minimal: irrational t, exceptional times form a countable set containing Q";

/// The time parameter, an exact real algebraic number.
#[derive(Debug, Clone)]
pub struct TimeParam {
    value: FieldElement,
}

impl TimeParam {
    pub fn new(value: FieldElement) -> Self {
        TimeParam { value }
    }

    pub fn rational(q: num_rational::BigRational) -> Self {
        TimeParam { value: FieldElement::rational(&NumberField::rationals(), q) }
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    pub fn is_rational(&self) -> bool {
        self.value.is_rational()
    }
}

/// Element `(n, z)` of `Z ⊕ K⁰(X, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvElement {
    pub n: BigInt,
    pub z: GroupElement,
}

impl InvElement {
    pub fn new(n: BigInt, z: GroupElement) -> Self {
        InvElement { n, z }
    }

    pub fn neg(&self) -> Self {
        InvElement { n: -&self.n, z: self.z.neg() }
    }
}

#[derive(Debug, Clone)]
pub struct ElliottInvariant {
    group: DimensionGroup,
    t: FieldElement,
    trace_field: Arc<NumberField>,
    /// Traces of the level-0 basis vectors, inside `trace_field`.
    basis_traces: Vec<FieldElement>,
    /// `λ` inside `trace_field`.
    lambda: FieldElement,
}

/// Builds the invariant from a validated base system.
pub fn suspension_invariant(system: &BaseSystem, t: &TimeParam) -> Result<ElliottInvariant> {
    if t.is_rational() {
        return Err(Error::RationalTime);
    }
    invariant_from_diagram(&system.to_diagram()?, t)
}

/// Same as [`suspension_invariant`] for a diagram given directly, such as a
/// telescoped presentation.
pub fn invariant_from_diagram(d: &StationaryBVDiagram, t: &TimeParam) -> Result<ElliottInvariant> {
    if t.is_rational() {
        return Err(Error::RationalTime);
    }
    let group = dg_from_diagram(d)?;
    let tf = t.value.field().clone();
    let gf = group.field().clone();
    // The group's field must land in t's field: Q always does, and real
    // quadratic fields do when the discriminants agree up to squares.
    let trace_field = if gf.is_rational() || gf.same_as(&tf) || gf.embed_generator(&tf).is_some() {
        tf
    } else {
        return Err(Error::FieldMismatch);
    };
    let basis_traces = (0..group.k())
        .map(|i| dg_trace(&group, &GroupElement::basis(group.k(), i))?.promote_to(&trace_field))
        .collect::<Result<Vec<_>>>()?;
    let lambda = group.lambda().promote_to(&trace_field)?;
    let t = t.value.promote_to(&trace_field)?;
    Ok(ElliottInvariant { group, t, trace_field, basis_traces, lambda })
}

impl ElliottInvariant {
    pub fn group(&self) -> &DimensionGroup {
        &self.group
    }

    pub fn t(&self) -> &FieldElement {
        &self.t
    }

    pub fn trace_field(&self) -> &Arc<NumberField> {
        &self.trace_field
    }

    pub fn k(&self) -> usize {
        self.group.k()
    }

    /// `(1, 0)`.
    pub fn order_unit(&self) -> InvElement {
        InvElement { n: BigInt::one(), z: GroupElement::zero(self.k()) }
    }

    /// Group summands of `K₀`.
    pub fn k0_summands(&self) -> [&'static str; 2] {
        ["Z", "dimension_group"]
    }

    /// `K₁` carries the same group as `K₀` and no order.
    pub fn k1_descriptor(&self) -> &'static str {
        "isomorphic_to_k0"
    }

    /// Free rank of `K₀`: one for the `Z` summand plus the rank of `K⁰(X, S)`.
    pub fn k0_rank(&self) -> Result<usize> {
        Ok(1 + self.group.rank()?)
    }

    pub fn assumptions(&self) -> Vec<String> {
        vec![
            MINIMALITY_ASSUMPTION.to_string(),
            "base system strictly ergodic: unique normalized trace".to_string(),
        ]
    }

    /// `τ(z)` inside the trace field.
    pub fn base_trace(&self, z: &GroupElement) -> Result<FieldElement> {
        if z.vec.len() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), got: z.vec.len() });
        }
        let mut acc = FieldElement::zero(&self.trace_field);
        for (t, x) in self.basis_traces.iter().zip(&z.vec) {
            if !x.is_zero() {
                acc = acc.try_add(&t.scale(&x.clone().into()))?;
            }
        }
        acc.try_mul(&self.lambda.pow(-(z.level as i64))?)
    }

    pub fn add(&self, a: &InvElement, b: &InvElement) -> Result<InvElement> {
        Ok(InvElement { n: &a.n + &b.n, z: self.group.add(&a.z, &b.z)? })
    }

    /// Generators of the range of the trace on `K₀` together with the
    /// denominator unit; see [`TraceRangeModule`].
    pub fn basis_traces(&self) -> &[FieldElement] {
        &self.basis_traces
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }
}

/// `n + t·τ(z)`.
pub fn inv_trace(inv: &ElliottInvariant, e: &InvElement) -> Result<FieldElement> {
    let tz = inv.t.try_mul(&inv.base_trace(&e.z)?)?;
    Ok(tz.add_rational(&e.n.clone().into()))
}

pub fn inv_positive(inv: &ElliottInvariant, e: &InvElement) -> Result<Positivity> {
    if e.n.is_zero() && inv.group.is_zero(&e.z)? {
        return Ok(Positivity::Zero);
    }
    Ok(if inv_trace(inv, e)?.sign() > 0 { Positivity::StrictlyPositive } else { Positivity::NotPositive })
}

/// A subgroup of `R` inside a number field:
/// `span_Z(fixed) + Z[1/u]·span_Z(divisible)` with `u` the denominator
/// unit. `1` is always among the fixed generators.
#[derive(Debug, Clone)]
pub struct TraceRangeModule {
    pub field: Arc<NumberField>,
    pub unit: FieldElement,
    pub fixed: Vec<FieldElement>,
    pub divisible: Vec<FieldElement>,
}

impl TraceRangeModule {
    /// `Z + Z[1/unit]·span(gens)`; `1` is added when missing.
    pub fn new(field: &Arc<NumberField>, unit: FieldElement, gens: Vec<FieldElement>) -> Result<Self> {
        TraceRangeModule::with_kinds(field, unit, Vec::new(), gens)
    }

    /// Finitely generated module `Z + span(gens)`.
    pub fn lattice(field: &Arc<NumberField>, gens: Vec<FieldElement>) -> Result<Self> {
        TraceRangeModule::with_kinds(field, FieldElement::one(field), gens, Vec::new())
    }

    pub fn with_kinds(
        field: &Arc<NumberField>,
        unit: FieldElement,
        fixed: Vec<FieldElement>,
        divisible: Vec<FieldElement>,
    ) -> Result<Self> {
        let unit = unit.promote_to(field)?;
        let mut fixed = fixed.iter().map(|g| g.promote_to(field)).collect::<Result<Vec<_>>>()?;
        let divisible = divisible.iter().map(|g| g.promote_to(field)).collect::<Result<Vec<_>>>()?;
        if !fixed.iter().any(FieldElement::is_one) {
            fixed.insert(0, FieldElement::one(field));
        }
        Ok(TraceRangeModule { field: field.clone(), unit, fixed, divisible })
    }

    /// The denominator unit as a positive rational integer, if it is one.
    pub fn integer_unit(&self) -> Option<BigInt> {
        self.unit.as_integer().map(|u| u.abs())
    }

    /// Whether the module is a plain lattice.
    pub fn is_finitely_generated(&self) -> bool {
        self.divisible.is_empty() || self.integer_unit().is_some_and(|u| u.is_one())
    }
}

/// `Z + t·τ(K⁰(X, S))`. Every element of `K⁰` is `λ^(−n)` times a level-0
/// vector, so the level-0 basis traces generate it over `Z[1/λ]`. A
/// unimodular incidence makes every level equal to level 0 and the unit is
/// reported as 1.
pub fn trace_range(inv: &ElliottInvariant) -> Result<TraceRangeModule> {
    let f = &inv.trace_field;
    let det = inv.group.diagram().incidence().det()?;
    let unit = if det.abs().is_one() { FieldElement::one(f) } else { inv.lambda.clone() };
    let gens = inv
        .basis_traces
        .iter()
        .map(|b| inv.t.try_mul(b))
        .collect::<Result<Vec<_>>>()?;
    TraceRangeModule::with_kinds(f, unit, vec![FieldElement::one(f)], gens)
}
