//! The difference algebra: rational-function coefficients (on the left)
//! times shift monomials `d_lambda`, with `(f d_a)(g d_b) = f g(x + a hbar) d_{a+b}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::quiver::{FramedQuiver, VertexId};
use crate::symbolic::{LinearForm, RationalFunction, SymbolicError, Variable, Q};

/// Slot of a positive-half vertex, the index of a shift generator.
pub type Slot = (VertexId, u32);

/// `prod d_{i,r}^{e}` over positive-half slots; sorted, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftMonomial(SmallVec<[(Slot, i32); 2]>);

impl ShiftMonomial {
    pub fn identity() -> Self {
        ShiftMonomial(SmallVec::new())
    }

    /// `d_{slot}^e` for a positive-half slot.
    pub fn generator(slot: Slot, e: i32) -> Self {
        let mut m = SmallVec::new();
        if e != 0 {
            m.push((slot, e));
        }
        ShiftMonomial(m)
    }

    /// `d_{i,r}^e` with `d_{tau i, r} = d_{i, r}^{-1}` applied for
    /// negative-half `i`.
    pub fn of_vertex(fq: &FramedQuiver, i: VertexId, r: u32, e: i32) -> Self {
        if fq.is_positive(i) {
            Self::generator((i, r), e)
        } else {
            Self::generator((fq.tau(i), r), -e)
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(Slot, i32)] {
        &self.0
    }

    pub fn exponent(&self, slot: Slot) -> i32 {
        self.0.iter().find(|(s, _)| *s == slot).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &ShiftMonomial) -> ShiftMonomial {
        let mut out: SmallVec<[(Slot, i32); 2]> = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        ShiftMonomial(out)
    }

    pub fn inverse(&self) -> ShiftMonomial {
        ShiftMonomial(self.0.iter().map(|(s, e)| (*s, -e)).collect())
    }

    /// `x_{i,r} -> x_{i,r} + e hbar` for every slot.
    pub fn substitution(&self) -> impl Fn(Variable) -> Option<LinearForm> + '_ {
        move |v| match v {
            Variable::X { vertex, slot } => {
                let e = self.exponent((vertex, slot));
                (e != 0).then(|| LinearForm::var(v) + LinearForm::hbar_times(Q::from_integer(e.into())))
            }
            _ => None,
        }
    }
}

impl fmt::Display for ShiftMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, ((i, r), e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if *e == 1 {
                write!(f, "d[{i},{r}]")?;
            } else {
                write!(f, "d[{i},{r}]^{e}")?;
            }
        }
        Ok(())
    }
}

/// `f(x) -> f(x + lambda hbar)`; series variables, `w` and `hbar` are fixed.
pub fn shift_action(lambda: &ShiftMonomial, f: &RationalFunction) -> RationalFunction {
    if lambda.is_identity() {
        return f.clone();
    }
    let sub = lambda.substitution();
    f.substitute(&sub).expect("a shift by a multiple of hbar never hits a pole")
}

/// A finite sum of `coefficient * d_lambda`, sorted by shift monomial.
#[derive(Clone, Debug, Default)]
pub struct DiffOperator {
    terms: Vec<(ShiftMonomial, RationalFunction)>,
}

impl DiffOperator {
    pub fn zero() -> Self {
        DiffOperator { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::scalar(RationalFunction::one())
    }

    pub fn scalar(f: RationalFunction) -> Self {
        Self::term(f, ShiftMonomial::identity())
    }

    pub fn shift(m: ShiftMonomial) -> Self {
        Self::term(RationalFunction::one(), m)
    }

    pub fn term(f: RationalFunction, m: ShiftMonomial) -> Self {
        if f.is_zero() {
            return Self::zero();
        }
        DiffOperator { terms: vec![(m, f)] }
    }

    /// Collects terms, summing coefficients of equal monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = (ShiftMonomial, RationalFunction)>) -> Self {
        let mut grouped: BTreeMap<ShiftMonomial, Vec<RationalFunction>> = BTreeMap::new();
        for (m, f) in terms {
            if !f.is_zero() {
                grouped.entry(m).or_default().push(f);
            }
        }
        let terms = grouped
            .into_iter()
            .filter_map(|(m, fs)| {
                let f = if fs.len() == 1 { fs.into_iter().next().unwrap() } else { RationalFunction::sum(fs.iter()) };
                (!f.is_zero()).then_some((m, f))
            })
            .collect();
        DiffOperator { terms }
    }

    pub fn terms(&self) -> &[(ShiftMonomial, RationalFunction)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `d_lambda` (zero if absent).
    pub fn coeff(&self, m: &ShiftMonomial) -> RationalFunction {
        self.terms
            .binary_search_by(|(tm, _)| tm.cmp(m))
            .map_or_else(|_| RationalFunction::zero(), |k| self.terms[k].1.clone())
    }

    /// The coefficient if this operator has no shifts.
    pub fn as_scalar(&self) -> Option<RationalFunction> {
        match self.terms.as_slice() {
            [] => Some(RationalFunction::zero()),
            [(m, f)] if m.is_identity() => Some(f.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        Self::sum([self, other])
    }

    pub fn sub(&self, other: &DiffOperator) -> DiffOperator {
        Self::sum([self, &other.neg()])
    }

    pub fn neg(&self) -> DiffOperator {
        self.scale(&Q::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Q) -> DiffOperator {
        if num_traits::Zero::is_zero(c) {
            return Self::zero();
        }
        DiffOperator { terms: self.terms.iter().map(|(m, f)| (m.clone(), f.scale(c))).collect() }
    }

    /// `f * self` (coefficients sit on the left, so no shift is applied).
    pub fn left_mul(&self, f: &RationalFunction) -> DiffOperator {
        if f.is_zero() {
            return Self::zero();
        }
        DiffOperator { terms: self.terms.iter().map(|(m, c)| (m.clone(), f.mul(c))).collect() }
    }

    /// `self * f`.
    pub fn right_mul(&self, f: &RationalFunction) -> DiffOperator {
        if f.is_zero() {
            return Self::zero();
        }
        DiffOperator::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.mul(&shift_action(m, f)))))
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a DiffOperator>) -> DiffOperator {
        Self::from_terms(items.into_iter().flat_map(|op| op.terms.iter().cloned()))
    }

    pub fn mul(&self, other: &DiffOperator) -> DiffOperator {
        let mut products = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m, f) in &self.terms {
            for (n, g) in &other.terms {
                products.push((m.mul(n), f.mul(&shift_action(m, g))));
            }
        }
        Self::from_terms(products)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &DiffOperator) -> DiffOperator {
        self.mul(other).sub(&other.mul(self))
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &DiffOperator) -> DiffOperator {
        self.mul(other).add(&other.mul(self))
    }

    pub fn equals(&self, other: &DiffOperator) -> bool {
        self.sub(other).is_zero()
    }

    /// `d_lambda * self * d_lambda^{-1}`.
    pub fn conjugate(&self, lambda: &ShiftMonomial) -> DiffOperator {
        DiffOperator { terms: self.terms.iter().map(|(m, f)| (m.clone(), shift_action(lambda, f))).collect() }
    }

    /// Substitutes non-torus variables (`u`, `v`, ...) in every coefficient.
    /// The map must leave every `x` variable alone.
    pub fn substitute(&self, map: &dyn Fn(Variable) -> Option<LinearForm>) -> Result<DiffOperator, SymbolicError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, f) in &self.terms {
            terms.push((m.clone(), f.substitute(map)?));
        }
        Ok(DiffOperator::from_terms(terms))
    }

    pub fn substitute_var(&self, v: Variable, image: &LinearForm) -> Result<DiffOperator, SymbolicError> {
        self.substitute(&|w| (w == v).then(|| image.clone()))
    }

    pub fn try_map_coeffs(
        &self,
        mut f: impl FnMut(&RationalFunction) -> Result<RationalFunction, SymbolicError>,
    ) -> Result<DiffOperator, SymbolicError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), f(c)?));
        }
        Ok(DiffOperator::from_terms(terms))
    }

    /// Canonical text form limited to the first `max_terms` terms.
    pub fn to_string_truncated(&self, max_terms: usize) -> String {
        if self.terms.len() <= max_terms {
            return self.to_string();
        }
        let head = DiffOperator { terms: self.terms[..max_terms].to_vec() };
        format!("{head} + ... ({} more terms)", self.terms.len() - max_terms)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if m.is_identity() {
                write!(f, "[{c}]")?;
            } else {
                write!(f, "[{c}] {m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        DiffOperator::add(self, rhs)
    }
}

impl Sub for &DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        DiffOperator::sub(self, rhs)
    }
}

impl Mul for &DiffOperator {
    type Output = DiffOperator;
    fn mul(self, rhs: &DiffOperator) -> DiffOperator {
        DiffOperator::mul(self, rhs)
    }
}

/// An unreduced linear combination of operator products.
///
/// Terms are kept as produced; coefficients of equal monomials are combined
/// once, in [`OpSum::finish`]. Intermediate common denominators are never
/// expanded, and maps that are linear in the coefficients (truncation) can
/// act term by term.
#[derive(Clone, Debug, Default)]
pub struct OpSum {
    terms: Vec<(ShiftMonomial, RationalFunction)>,
}

impl OpSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * a_1 * ... * a_k`.
    pub fn add_product(&mut self, c: &RationalFunction, factors: &[&DiffOperator]) {
        if c.is_zero() {
            return;
        }
        let mut cur = vec![(ShiftMonomial::identity(), c.clone())];
        for a in factors {
            let mut next = Vec::with_capacity(cur.len() * a.terms.len());
            for (m, f) in &cur {
                for (n, g) in &a.terms {
                    next.push((m.mul(n), f.mul(&shift_action(m, g))));
                }
            }
            cur = next;
        }
        self.terms.extend(cur);
    }

    /// Adds `c [a, b]`.
    pub fn add_commutator(&mut self, c: &RationalFunction, a: &DiffOperator, b: &DiffOperator) {
        self.add_product(c, &[a, b]);
        self.add_product(&c.neg(), &[b, a]);
    }

    /// Adds `c [a, [b, x]]`.
    pub fn add_nested_commutator(&mut self, c: &RationalFunction, a: &DiffOperator, b: &DiffOperator, x: &DiffOperator) {
        let m = c.neg();
        self.add_product(c, &[a, b, x]);
        self.add_product(&m, &[a, x, b]);
        self.add_product(&m, &[b, x, a]);
        self.add_product(c, &[x, b, a]);
    }

    /// Adds `c {a, b}`.
    pub fn add_anticommutator(&mut self, c: &RationalFunction, a: &DiffOperator, b: &DiffOperator) {
        self.add_product(c, &[a, b]);
        self.add_product(c, &[b, a]);
    }

    pub fn add_scalar(&mut self, f: RationalFunction) {
        if !f.is_zero() {
            self.terms.push((ShiftMonomial::identity(), f));
        }
    }

    /// Adds `c * other`.
    pub fn extend_scaled(&mut self, other: OpSum, c: &Q) {
        self.terms.extend(other.terms.into_iter().map(|(m, f)| (m, f.scale(c))));
    }

    /// Replaces each coefficient by the pieces `f` returns; `f` must be
    /// additive for the result to represent the image of the sum.
    pub fn try_flat_map<E>(
        self,
        mut f: impl FnMut(&RationalFunction) -> Result<Vec<RationalFunction>, E>,
    ) -> Result<OpSum, E> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms {
            terms.extend(f(&c)?.into_iter().map(|p| (m.clone(), p)));
        }
        Ok(OpSum { terms })
    }

    pub fn finish(self) -> DiffOperator {
        DiffOperator::from_terms(self.terms)
    }
}

impl Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        DiffOperator::neg(self)
    }
}

impl From<RationalFunction> for DiffOperator {
    fn from(f: RationalFunction) -> Self {
        DiffOperator::scalar(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DimensionData, QuiverWithInvolution};
    use crate::symbolic::q;

    fn aiii1() -> FramedQuiver {
        let raw = QuiverWithInvolution::aiii(1).unwrap();
        FramedQuiver::new(raw, DimensionData::from_lists(&[1, 2], &[1, 1], &[0, 0])).unwrap()
    }

    #[test]
    fn shift_relation() {
        let fq = aiii1();
        let d = DiffOperator::shift(ShiftMonomial::of_vertex(&fq, 1, 1, 1));
        let x = DiffOperator::scalar(RationalFunction::linear(&fq.x(1, 1)));
        let prod = d.mul(&x);
        let expect = DiffOperator::term(
            RationalFunction::linear(&(fq.x(1, 1) + LinearForm::hbar())),
            ShiftMonomial::of_vertex(&fq, 1, 1, 1),
        );
        assert!(prod.equals(&expect));
        let comm = d.commutator(&x);
        assert!(comm.equals(&d.scale(&q(1)).left_mul(&RationalFunction::var(Variable::Hbar))));
    }

    #[test]
    fn negative_half_shift_acts_with_opposite_sign() {
        let fq = aiii1();
        let d = ShiftMonomial::of_vertex(&fq, 1, 1, 1);
        let f = shift_action(&d, &RationalFunction::linear(&fq.x(2, 1)));
        assert!(f.equals(&RationalFunction::linear(&(-fq.x(1, 1) - LinearForm::hbar()))));
        assert_eq!(ShiftMonomial::of_vertex(&fq, 2, 1, -1), d);
    }

    #[test]
    fn identities() {
        let fq = aiii1();
        let d = DiffOperator::shift(ShiftMonomial::of_vertex(&fq, 1, 1, 1));
        let dinv = DiffOperator::shift(ShiftMonomial::of_vertex(&fq, 1, 1, -1));
        assert!(d.mul(&dinv).equals(&DiffOperator::one()));
        assert!(d.mul(&DiffOperator::one()).equals(&d));
        assert!(d.anticommutator(&DiffOperator::zero()).is_zero());
        let f = DiffOperator::scalar(RationalFunction::var(Variable::U));
        let g = DiffOperator::scalar(RationalFunction::var(Variable::Hbar));
        assert!(f.commutator(&g).is_zero());
    }
}
