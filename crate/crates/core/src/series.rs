//! Residues, the truncation `(f)°` to the proper part, and expansion at
//! infinity in a designated variable.

use thiserror::Error;

use crate::diff::DiffOperator;
use crate::symbolic::{LinearForm, Poly, RationalFunction, SymbolicError, Variable, Q};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("{root} is not a pole in {var}")]
    NotAPole { var: Variable, root: String },
    #[error("pole {root} in {var} has multiplicity {multiplicity}")]
    RepeatedPole { var: Variable, root: String, multiplicity: u32 },
    #[error("coefficient is not a polynomial: {0}")]
    CoefficientNotPolynomial(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// One pole `var = root` coming from the factor `leading * (var - root)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pole {
    pub root: LinearForm,
    pub multiplicity: u32,
    pub leading: Q,
    factor: LinearForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleProfile {
    pub variable: Variable,
    pub poles: Vec<Pole>,
}

/// Poles of `f` in `var`, in factor order.
pub fn pole_profile(f: &RationalFunction, var: Variable) -> PoleProfile {
    let poles = f
        .denominator()
        .filter(|(lf, _)| lf.contains(var))
        .map(|(lf, mult)| {
            let a = lf.coeff(var);
            let rest = lf - &LinearForm::var(var).scale(&a);
            Pole { root: rest.scale(&-a.recip()), multiplicity: mult, leading: a, factor: lf.clone() }
        })
        .collect();
    PoleProfile { variable: var, poles }
}

fn simple_residue(f: &RationalFunction, var: Variable, pole: &Pole) -> Result<RationalFunction, SeriesError> {
    if pole.multiplicity > 1 {
        return Err(SeriesError::RepeatedPole { var, root: pole.root.to_string(), multiplicity: pole.multiplicity });
    }
    let cleared = f.mul(&RationalFunction::linear(&pole.factor));
    Ok(cleared.substitute_var(var, &pole.root)?.scale(&pole.leading.recip()))
}

/// `Res_{var = root} f` for a simple pole.
pub fn residue_at(f: &RationalFunction, var: Variable, root: &LinearForm) -> Result<RationalFunction, SeriesError> {
    let profile = pole_profile(f, var);
    let pole = profile
        .poles
        .iter()
        .find(|p| &p.root == root)
        .ok_or_else(|| SeriesError::NotAPole { var, root: root.to_string() })?;
    simple_residue(f, var, pole)
}

/// Coefficient-wise residue of an operator.
pub fn residue_at_op(op: &DiffOperator, var: Variable, root: &LinearForm) -> Result<DiffOperator, SeriesError> {
    let mut terms = Vec::new();
    for (m, c) in op.terms() {
        if pole_profile(c, var).poles.iter().any(|p| &p.root == root) {
            terms.push((m.clone(), residue_at(c, var, root)?));
        }
    }
    Ok(DiffOperator::from_terms(terms))
}

/// The proper part `sum_p Res_p(f) / (var - p)`; requires simple poles.
pub fn truncate(f: &RationalFunction, var: Variable) -> Result<RationalFunction, SeriesError> {
    Ok(RationalFunction::sum(truncate_parts(f, var)?.iter()))
}

/// The summands `Res_p(f) / (var - p)` of [`truncate`], one per pole.
pub fn truncate_parts(f: &RationalFunction, var: Variable) -> Result<Vec<RationalFunction>, SeriesError> {
    let profile = pole_profile(f, var);
    let mut parts = Vec::with_capacity(profile.poles.len());
    for pole in &profile.poles {
        let res = simple_residue(f, var, pole)?;
        let denom = LinearForm::var(var) - pole.root.clone();
        parts.push(res.mul(&RationalFunction::reciprocal(&denom)));
    }
    Ok(parts)
}

pub fn truncate_op(op: &DiffOperator, var: Variable) -> Result<DiffOperator, SeriesError> {
    let mut terms = Vec::with_capacity(op.len());
    for (m, c) in op.terms() {
        terms.push((m.clone(), truncate(c, var)?));
    }
    Ok(DiffOperator::from_terms(terms))
}

/// A truncated Laurent series in `var^{-1}`: `sum_k coeffs[k] var^{top - k}`.
struct Expansion {
    top: i64,
    coeffs: Vec<Poly>,
}

impl Expansion {
    fn mul(&self, other: &Expansion, depth: usize) -> Expansion {
        let mut coeffs = vec![Poly::zero(); depth];
        for (i, a) in self.coeffs.iter().enumerate().take(depth) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(depth - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Expansion { top: self.top + other.top, coeffs }
    }

    /// `(a var + rho)^{-1} = (1/a) var^{-1} sum_k (-rho/a)^k var^{-k}`.
    fn reciprocal_linear(a: &Q, rho: &LinearForm, depth: usize) -> Expansion {
        let inv = a.recip();
        let ratio = Poly::from_linear(&rho.scale(&-inv.clone()));
        let mut coeffs = Vec::with_capacity(depth);
        let mut cur = Poly::constant(inv);
        for _ in 0..depth {
            coeffs.push(cur.clone());
            cur = cur.mul(&ratio);
        }
        Expansion { top: -1, coeffs }
    }
}

/// Coefficient of `var^power` in the expansion of `f` at `var = infinity`.
pub fn laurent_coeff(f: &RationalFunction, var: Variable, power: i64) -> RationalFunction {
    if f.is_zero() {
        return RationalFunction::zero();
    }
    let mut numerator = f.poly().clone();
    let mut outside = RationalFunction::one();
    let mut reciprocals = Vec::new();
    for (lf, e) in f.factors() {
        if !lf.contains(var) {
            outside = outside.mul(&RationalFunction::linear_power(lf, *e).expect("stored factors are nonzero"));
        } else if *e > 0 {
            numerator = numerator.mul(&Poly::from_linear(lf).pow(*e as u32));
        } else {
            reciprocals.push((lf, e.unsigned_abs()));
        }
    }
    let coeffs_up = numerator.coefficients_in(var);
    let num_deg = coeffs_up.len() as i64 - 1;
    let den_deg: i64 = reciprocals.iter().map(|(_, m)| *m as i64).sum();
    let top = num_deg - den_deg;
    if power > top {
        return RationalFunction::zero();
    }
    let depth = (top - power + 1) as usize;
    let mut acc = Expansion { top: num_deg, coeffs: coeffs_up.into_iter().rev().take(depth).collect() };
    acc.coeffs.resize(depth, Poly::zero());
    for (lf, m) in reciprocals {
        let a = lf.coeff(var);
        let rho = lf - &LinearForm::var(var).scale(&a);
        let single = Expansion::reciprocal_linear(&a, &rho, depth);
        for _ in 0..m {
            acc = acc.mul(&single, depth);
        }
    }
    debug_assert_eq!(acc.top, top);
    RationalFunction::from_poly(acc.coeffs[depth - 1].clone()).mul(&outside)
}

pub fn laurent_coeff_op(op: &DiffOperator, var: Variable, power: i64) -> DiffOperator {
    DiffOperator::from_terms(op.terms().iter().map(|(m, c)| (m.clone(), laurent_coeff(c, var, power))))
}

/// Coefficient of `var^{-m-1}` at infinity.
pub fn series_coeff_at_infinity(f: &RationalFunction, var: Variable, m: u32) -> RationalFunction {
    laurent_coeff(f, var, -(m as i64) - 1)
}

pub fn series_coeff_at_infinity_op(op: &DiffOperator, var: Variable, m: u32) -> DiffOperator {
    laurent_coeff_op(op, var, -(m as i64) - 1)
}

/// Degree in `var` at infinity (largest power with a nonzero coefficient),
/// or `None` for zero.
pub fn degree_at_infinity(f: &RationalFunction, var: Variable) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    let mut deg = f.poly().degree_in(var) as i64;
    for (lf, e) in f.factors() {
        if lf.contains(var) {
            deg += *e as i64;
        }
    }
    Some(deg)
}

/// `Some(poly)` iff `f` is a polynomial in all of its variables.
pub fn as_polynomial(f: &RationalFunction) -> Result<Poly, SeriesError> {
    f.to_poly().ok_or_else(|| SeriesError::CoefficientNotPolynomial(f.to_string()))
}

/// True iff `f` vanishes at `var = infinity`.
pub fn is_proper(f: &RationalFunction, var: Variable) -> bool {
    match degree_at_infinity(f, var) {
        None => true,
        Some(d) => d < 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{q, qr};

    fn one_over(f: &LinearForm) -> RationalFunction {
        RationalFunction::reciprocal(f)
    }
    fn u() -> LinearForm {
        LinearForm::var(Variable::U)
    }
    fn a() -> LinearForm {
        LinearForm::var(Variable::X { vertex: 1, slot: 1 })
    }
    fn b() -> LinearForm {
        LinearForm::var(Variable::X { vertex: 1, slot: 2 })
    }

    #[test]
    fn simple_residues() {
        let f = one_over(&(u() - a()));
        assert!(residue_at(&f, Variable::U, &a()).unwrap().equals(&RationalFunction::one()));
        let g = one_over(&(u() - a())).mul(&one_over(&(u() - b())));
        let r = residue_at(&g, Variable::U, &a()).unwrap();
        assert!(r.equals(&one_over(&(a() - b()))));
        assert!(matches!(residue_at(&g, Variable::U, &u()), Err(SeriesError::NotAPole { .. })));
        let h = one_over(&(u() - a())).mul(&one_over(&(u() - a())));
        assert!(matches!(residue_at(&h, Variable::U, &a()), Err(SeriesError::RepeatedPole { .. })));
    }

    #[test]
    fn truncation_of_partial_fractions() {
        let g = RationalFunction::var(Variable::U).mul(&RationalFunction::var(Variable::U))
            .mul(&one_over(&(u() - a())))
            .mul(&one_over(&(u() - b())));
        let t = truncate(&g, Variable::U).unwrap();
        let ga = RationalFunction::linear(&a()).mul(&RationalFunction::linear(&a()));
        let gb = RationalFunction::linear(&b()).mul(&RationalFunction::linear(&b()));
        let expect = ga
            .mul(&one_over(&(a() - b())))
            .mul(&one_over(&(u() - a())))
            .add(&gb.mul(&one_over(&(b() - a()))).mul(&one_over(&(u() - b()))));
        assert!(t.equals(&expect));
        let poly = RationalFunction::linear(&(u() + a()));
        assert!(truncate(&poly, Variable::U).unwrap().is_zero());
    }

    #[test]
    fn expansion_at_infinity() {
        let f = one_over(&(u() - a()));
        let c = series_coeff_at_infinity(&f, Variable::U, 2);
        assert!(c.equals(&RationalFunction::linear(&a()).mul(&RationalFunction::linear(&a()))));
        // 1/(-u - a) has coefficient -(-a)^m at u^{-m-1}
        let g = one_over(&(-u() - a()));
        for m in 0..4u32 {
            let expect = RationalFunction::linear(&-a()).pow(m as i32).unwrap().neg();
            assert!(series_coeff_at_infinity(&g, Variable::U, m).equals(&expect));
        }
        let p = RationalFunction::linear(&u());
        assert!(series_coeff_at_infinity(&p, Variable::U, 0).is_zero());
        assert!(laurent_coeff(&p, Variable::U, 1).equals(&RationalFunction::one()));
    }

    #[test]
    fn scaled_variable_poles() {
        let f = one_over(&(u().scale(&q(2)) - a()));
        let r = residue_at(&f, Variable::U, &a().scale(&qr(1, 2))).unwrap();
        assert_eq!(r.as_constant(), Some(qr(1, 2)));
        assert_eq!(degree_at_infinity(&f, Variable::U), Some(-1));
        assert!(is_proper(&f, Variable::U));
    }
}
