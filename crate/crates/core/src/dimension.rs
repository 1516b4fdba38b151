//! Dimension groups of stationary diagrams: the direct limit of `Z^k` under
//! a fixed connecting map, with its unique trace and the induced order.
//!
//! Level `n` of the diagram carries one tower per vertex. A tower base at
//! level `n` splits into `M[i][j]` copies of the level-`(n+1)` base `j`, so
//! the connecting map is `v ↦ Mᵀ·v`. The unique invariant measure gives the
//! level-0 bases the masses of the right Perron vector of `M` (letter
//! frequencies for a substitution), and those masses scale by `λ⁻¹` per
//! level.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{perron_data, FieldElement, IntMatrix, NumberField};
use crate::error::{Error, Result};
use crate::systems::StationaryBVDiagram;

#[derive(Debug, Clone)]
pub struct DimensionGroup {
    diagram: StationaryBVDiagram,
    connecting: IntMatrix,
    field: Arc<NumberField>,
    lambda: FieldElement,
    lambda_inv: FieldElement,
    trace_vec: Vec<FieldElement>,
}

/// Element `(level, vec)` of the direct limit, with
/// `(n, v) ~ (n + 1, Mᵀ·v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub level: u64,
    pub vec: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(level: u64, vec: Vec<BigInt>) -> Self {
        GroupElement { level, vec }
    }

    pub fn from_i64(level: u64, vec: &[i64]) -> Self {
        GroupElement { level, vec: vec.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn zero(k: usize) -> Self {
        GroupElement { level: 0, vec: vec![BigInt::zero(); k] }
    }

    pub fn basis(k: usize, i: usize) -> Self {
        let mut vec = vec![BigInt::zero(); k];
        vec[i] = BigInt::from(1);
        GroupElement { level: 0, vec }
    }

    pub fn neg(&self) -> Self {
        GroupElement { level: self.level, vec: self.vec.iter().map(|x| -x).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    StrictlyPositive,
    Zero,
    NotPositive,
}

impl Positivity {
    pub fn name(self) -> &'static str {
        match self {
            Positivity::StrictlyPositive => "strictly_positive",
            Positivity::Zero => "zero",
            Positivity::NotPositive => "not_positive",
        }
    }

    pub fn is_nonnegative(self) -> bool {
        self != Positivity::NotPositive
    }
}

impl DimensionGroup {
    pub fn diagram(&self) -> &StationaryBVDiagram {
        &self.diagram
    }

    pub fn k(&self) -> usize {
        self.diagram.k()
    }

    /// `Mᵀ`, the map from level `n` to level `n + 1`.
    pub fn connecting_map(&self) -> &IntMatrix {
        &self.connecting
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    /// Level-0 tower masses, normalized so the order unit has trace 1.
    pub fn trace_vec(&self) -> &[FieldElement] {
        &self.trace_vec
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if a.vec.len() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), got: a.vec.len() });
        }
        Ok(())
    }

    /// Representative of `a` at level `level ≥ a.level`.
    pub fn lift(&self, a: &GroupElement, level: u64) -> Result<GroupElement> {
        self.check(a)?;
        assert!(level >= a.level, "cannot lower the level of a representative");
        let mut v = a.vec.clone();
        for _ in a.level..level {
            v = self.connecting.mul_vec(&v)?;
        }
        Ok(GroupElement { level, vec: v })
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let n = a.level.max(b.level);
        let (a, b) = (self.lift(a, n)?, self.lift(b, n)?);
        Ok(GroupElement { level: n, vec: a.vec.iter().zip(&b.vec).map(|(x, y)| x + y).collect() })
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.add(a, &b.neg())
    }

    /// Whether `a` is the zero class: `(Mᵀ)^k · v = 0`, since the kernel
    /// chain of a `k × k` matrix is stable from index `k` on.
    pub fn is_zero(&self, a: &GroupElement) -> Result<bool> {
        self.check(a)?;
        let pushed = self.lift(a, a.level + self.k() as u64)?;
        Ok(pushed.vec.iter().all(Zero::is_zero))
    }

    /// Free rank of the group: the rank of the eventual image `(Mᵀ)^k Z^k`.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.connecting.pow(self.k() as u32)?.rank())
    }
}

pub fn dg_from_diagram(d: &StationaryBVDiagram) -> Result<DimensionGroup> {
    let p = perron_data(d.incidence())?;
    let field = p.field.clone();
    let unit_mass = p
        .right
        .iter()
        .zip(d.unit_vec())
        .fold(FieldElement::zero(&field), |acc, (r, u)| {
            acc.try_add(&r.scale(&u.clone().into())).expect("same field")
        });
    let inv = unit_mass.inverse()?;
    let trace_vec = p.right.iter().map(|r| r.try_mul(&inv).expect("same field")).collect();
    Ok(DimensionGroup {
        connecting: d.incidence().transpose(),
        diagram: d.clone(),
        lambda_inv: p.lambda.inverse()?,
        lambda: p.lambda,
        field,
        trace_vec,
    })
}

pub fn dg_equal(g: &DimensionGroup, a: &GroupElement, b: &GroupElement) -> Result<bool> {
    g.check(a)?;
    g.check(b)?;
    g.is_zero(&g.sub(a, b)?)
}

/// `λ^(−level) · ⟨trace_vec, vec⟩`.
pub fn dg_trace(g: &DimensionGroup, a: &GroupElement) -> Result<FieldElement> {
    g.check(a)?;
    let mut acc = FieldElement::zero(&g.field);
    for (t, x) in g.trace_vec.iter().zip(&a.vec) {
        if !x.is_zero() {
            acc = acc.try_add(&t.scale(&x.clone().into()))?;
        }
    }
    let scale = g.lambda_inv.pow(a.level as i64)?;
    acc.try_mul(&scale)
}

/// The order of a simple dimension group with unique state: `a ≥ 0` iff
/// `a = 0` or `τ(a) > 0`.
pub fn dg_positive(g: &DimensionGroup, a: &GroupElement) -> Result<Positivity> {
    if g.is_zero(a)? {
        return Ok(Positivity::Zero);
    }
    Ok(if dg_trace(g, a)?.sign() > 0 { Positivity::StrictlyPositive } else { Positivity::NotPositive })
}

pub fn dg_order_unit(g: &DimensionGroup) -> GroupElement {
    GroupElement { level: 0, vec: g.diagram.unit_vec().to_vec() }
}

/// Same diagram read every `p` levels: incidence `M^p`.
pub fn telescope(d: &StationaryBVDiagram, p: u32) -> Result<StationaryBVDiagram> {
    if p == 0 {
        return Err(Error::InvalidInput("telescoping exponent must be positive".into()));
    }
    StationaryBVDiagram::new(d.incidence().pow(p)?, d.unit_vec().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::systems::{odometer_to_bv, point_to_bv, substitution_to_bv, Odometer, Substitution};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn fib() -> DimensionGroup {
        dg_from_diagram(&substitution_to_bv(&Substitution::fibonacci()).unwrap()).unwrap()
    }

    fn odo2() -> DimensionGroup {
        dg_from_diagram(&odometer_to_bv(&Odometer::new(vec![2]).unwrap()).unwrap()).unwrap()
    }

    fn el(level: u64, v: &[i64]) -> GroupElement {
        GroupElement::from_i64(level, v)
    }

    #[test]
    fn odometer_examples() {
        let g = odo2();
        assert!(g.field().is_rational());
        assert!(dg_equal(&g, &el(2, &[4]), &el(0, &[1])).unwrap());
        assert!(!dg_equal(&g, &el(1, &[1]), &el(0, &[1])).unwrap());
        assert_eq!(dg_trace(&g, &el(3, &[5])).unwrap().as_rational(), Some(rat(5, 8)));
        assert_eq!(dg_order_unit(&g), el(0, &[1]));
    }

    #[test]
    fn point_group_is_z() {
        let g = dg_from_diagram(&point_to_bv()).unwrap();
        assert_eq!(dg_trace(&g, &el(7, &[3])).unwrap().as_rational(), Some(rat(3, 1)));
        assert_eq!(g.rank().unwrap(), 1);
    }

    #[test]
    fn fibonacci_traces() {
        let g = fib();
        assert_eq!(g.field().min_poly(), &[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        // (√5 − 1)/2 = φ − 1
        let phi = g.field().theta();
        let ta = dg_trace(&g, &el(0, &[1, 0])).unwrap();
        assert!(ta.value_eq(&phi.add_rational(&rat(-1, 1))));
        let tb = dg_trace(&g, &el(0, &[0, 1])).unwrap();
        assert!(ta.try_add(&tb).unwrap().is_one());
        assert!(dg_trace(&g, &dg_order_unit(&g)).unwrap().is_one());
        assert_eq!(dg_positive(&g, &el(0, &[1, -1])).unwrap(), Positivity::StrictlyPositive);
        assert_eq!(dg_positive(&g, &el(0, &[-1, 0])).unwrap(), Positivity::NotPositive);
        assert_eq!(dg_positive(&g, &el(0, &[0, 0])).unwrap(), Positivity::Zero);
    }

    #[test]
    fn frequencies_match_letter_counts() {
        // Non-symmetric incidence: a→ab, b→aab. Trace of e_a is the
        // frequency of a, approximated by counts in a long iterate.
        let s = Substitution::from_strs(&[("a", "ab"), ("b", "aab")]).unwrap();
        let g = dg_from_diagram(&substitution_to_bv(&s).unwrap()).unwrap();
        let mut w = vec![0];
        while w.len() < 100_000 {
            w = s.apply(&w);
        }
        let freq = w.iter().filter(|&&x| x == 0).count() as f64 / w.len() as f64;
        let ta = dg_trace(&g, &el(0, &[1, 0])).unwrap().to_f64();
        assert!((ta - freq).abs() < 1e-3, "{ta} vs {freq}");
        // the exact value is 2 − √2
        assert!((ta - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn thue_morse_kernel() {
        let g = dg_from_diagram(&substitution_to_bv(&Substitution::thue_morse()).unwrap()).unwrap();
        // e_a − e_b is killed by the connecting map
        assert!(dg_equal(&g, &el(0, &[1, 0]), &el(0, &[0, 1])).unwrap());
        assert_eq!(dg_positive(&g, &el(0, &[1, -1])).unwrap(), Positivity::Zero);
        assert_eq!(g.rank().unwrap(), 1);
        assert_eq!(dg_trace(&g, &el(1, &[1, 0])).unwrap().as_rational(), Some(rat(1, 4)));
    }

    #[test]
    fn telescope_examples() {
        let d = substitution_to_bv(&Substitution::fibonacci()).unwrap();
        let t = telescope(&d, 2).unwrap();
        assert_eq!(t.incidence(), &IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap());
        assert_eq!(telescope(&d, 1).unwrap(), d);
        let o = odometer_to_bv(&Odometer::new(vec![2]).unwrap()).unwrap();
        assert_eq!(telescope(&o, 3).unwrap().incidence(), &IntMatrix::from_rows(&[vec![8]]).unwrap());
    }

    #[test]
    fn odometer_dyadic_oracle() {
        let g = odo2();
        let mut elems = Vec::new();
        for n in 0..=4u64 {
            for v in -20..=20i64 {
                elems.push((n, v, BigRational::new(v.into(), BigInt::from(1) << n)));
            }
        }
        for (n, v, q) in &elems {
            assert_eq!(dg_trace(&g, &el(*n, &[*v])).unwrap().as_rational().as_ref(), Some(q));
        }
        for (n1, v1, q1) in elems.iter().step_by(3) {
            for (n2, v2, q2) in elems.iter().step_by(5) {
                assert_eq!(dg_equal(&g, &el(*n1, &[*v1]), &el(*n2, &[*v2])).unwrap(), q1 == q2);
            }
        }
    }

    fn small_vec(k: usize) -> impl Strategy<Value = (u64, Vec<i64>)> {
        (0u64..4, proptest::collection::vec(-6i64..7, k))
    }

    proptest! {
        #[test]
        fn trace_well_defined((n, v) in small_vec(2)) {
            let g = fib();
            let a = el(n, &v);
            let b = g.lift(&a, n + 1).unwrap();
            prop_assert!(dg_trace(&g, &a).unwrap().value_eq(&dg_trace(&g, &b).unwrap()));
            prop_assert!(dg_equal(&g, &a, &b).unwrap());
            prop_assert_eq!(dg_positive(&g, &a).unwrap(), dg_positive(&g, &b).unwrap());
        }

        #[test]
        fn positive_cone_closed((n1, v1) in small_vec(2), (n2, v2) in small_vec(2)) {
            let g = fib();
            let (a, b) = (el(n1, &v1), el(n2, &v2));
            let pa = dg_positive(&g, &a).unwrap();
            let pb = dg_positive(&g, &b).unwrap();
            if pa == Positivity::StrictlyPositive && pb == Positivity::StrictlyPositive {
                prop_assert_eq!(dg_positive(&g, &g.add(&a, &b).unwrap()).unwrap(), Positivity::StrictlyPositive);
            }
            if pa.is_nonnegative() && dg_positive(&g, &a.neg()).unwrap().is_nonnegative() {
                prop_assert_eq!(pa, Positivity::Zero);
            }
        }

        #[test]
        fn telescoping_preserves_traces((n, v) in small_vec(2)) {
            let d = substitution_to_bv(&Substitution::fibonacci()).unwrap();
            let g = dg_from_diagram(&d).unwrap();
            let g2 = dg_from_diagram(&telescope(&d, 2).unwrap()).unwrap();
            let t1 = dg_trace(&g, &el(2 * n, &v)).unwrap();
            let t2 = dg_trace(&g2, &el(n, &v)).unwrap().promote_to(g.field()).unwrap();
            prop_assert!(t1.value_eq(&t2));
        }
    }
}
