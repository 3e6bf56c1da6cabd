use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::variable::{q, Q, Variable};

/// An affine form `constant + sum_k c_k * var_k` with rational coefficients.
///
/// Coefficients are kept sorted by the fixed variable order with no zero
/// entries, so structural equality is semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    terms: Vec<(Variable, Q)>,
    constant: Q,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm { terms: Vec::new(), constant: Q::zero() }
    }

    pub fn constant(c: Q) -> Self {
        LinearForm { terms: Vec::new(), constant: c }
    }

    pub fn var(v: Variable) -> Self {
        LinearForm { terms: vec![(v, Q::one())], constant: Q::zero() }
    }

    pub fn hbar() -> Self {
        Self::var(Variable::Hbar)
    }

    /// `c * hbar`
    pub fn hbar_times(c: Q) -> Self {
        Self::var(Variable::Hbar).scale(&c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Variable, Q)>, constant: Q) -> Self {
        let mut collected: Vec<(Variable, Q)> = terms.into_iter().collect();
        collected.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Variable, Q)> = Vec::with_capacity(collected.len());
        for (v, c) in collected {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        LinearForm { terms: merged, constant }
    }

    pub fn terms(&self) -> &[(Variable, Q)] {
        &self.terms
    }

    pub fn constant_term(&self) -> &Q {
        &self.constant
    }

    pub fn coeff(&self, v: Variable) -> Q {
        match self.terms.binary_search_by(|(tv, _)| tv.cmp(&v)) {
            Ok(idx) => self.terms[idx].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn contains(&self, v: Variable) -> bool {
        self.terms.binary_search_by(|(tv, _)| tv.cmp(&v)).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.terms.iter().map(|(v, _)| *v)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinearForm {
            terms: self.terms.iter().map(|(v, k)| (*v, k * c)).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn add_constant(&self, c: &Q) -> Self {
        LinearForm { terms: self.terms.clone(), constant: &self.constant + c }
    }

    /// Splits off a scalar so the remaining form has leading coefficient 1
    /// (leading = first variable in the fixed order). Returns `None` for a
    /// constant form.
    pub fn normalize(&self) -> Option<(Q, LinearForm)> {
        let lead = self.terms.first()?.1.clone();
        if lead.is_one() {
            return Some((lead, self.clone()));
        }
        let inv = lead.recip();
        Some((lead, self.scale(&inv)))
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.first().is_some_and(|(_, c)| c.is_one())
    }

    /// Replaces variables through `map`; variables without an image stay.
    pub fn substitute(&self, map: &dyn Fn(Variable) -> Option<LinearForm>) -> LinearForm {
        let mut constant = self.constant.clone();
        let mut acc: Vec<(Variable, Q)> = Vec::with_capacity(self.terms.len() + 2);
        for (v, c) in &self.terms {
            match map(*v) {
                Some(image) => {
                    constant += &image.constant * c;
                    acc.extend(image.terms.iter().map(|(iv, ic)| (*iv, ic * c)));
                }
                None => acc.push((*v, c.clone())),
            }
        }
        LinearForm::from_terms(acc, constant)
    }

    pub fn eval(&self, point: &dyn Fn(Variable) -> Q) -> Q {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += c * point(*v);
        }
        acc
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::from_terms(
            self.terms.iter().chain(rhs.terms.iter()).cloned(),
            &self.constant + &rhs.constant,
        )
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        &self + &rhs
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        self + &(-rhs)
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        &self - &rhs
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(&q(-1))
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        -&self
    }
}

impl Mul<&Q> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: &Q) -> LinearForm {
        self.scale(rhs)
    }
}

impl From<Variable> for LinearForm {
    fn from(v: Variable) -> Self {
        LinearForm::var(v)
    }
}

pub(crate) fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Q, body: &str) -> fmt::Result {
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    if body.is_empty() {
        write!(f, "{abs}")
    } else if abs.is_one() {
        f.write_str(body)
    } else {
        write!(f, "{abs}*{body}")
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (v, c) in &self.terms {
            fmt_coeff_term(f, first, c, &v.to_string())?;
            first = false;
        }
        if !self.constant.is_zero() {
            fmt_coeff_term(f, first, &self.constant, "")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::variable::qr;

    fn x11() -> Variable {
        Variable::X { vertex: 1, slot: 1 }
    }

    #[test]
    fn normalize_makes_leading_coefficient_one() {
        let f = LinearForm::from_terms([(x11(), q(2)), (Variable::Hbar, qr(3, 2))], Q::zero());
        let (s, n) = f.normalize().unwrap();
        assert_eq!(s, q(2));
        assert_eq!(n.coeff(x11()), q(1));
        assert_eq!(n.coeff(Variable::Hbar), qr(3, 4));
        assert!(LinearForm::constant(q(5)).normalize().is_none());
    }

    #[test]
    fn series_variables_lead_the_order() {
        let f = LinearForm::from_terms([(x11(), q(-1)), (Variable::U, q(-1))], Q::zero());
        let (s, n) = f.normalize().unwrap();
        assert_eq!(s, q(-1));
        assert_eq!(n.terms()[0].0, Variable::U);
        assert_eq!(n.to_string(), "u + x[1,1]");
    }

    #[test]
    fn substitution_composes_affinely() {
        let f = LinearForm::var(x11()) + LinearForm::hbar_times(qr(1, 2));
        let g = f.substitute(&|v| (v == x11()).then(|| LinearForm::var(x11()) + LinearForm::hbar()));
        assert_eq!(g, LinearForm::var(x11()) + LinearForm::hbar_times(qr(3, 2)));
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = LinearForm::var(x11());
        assert!((&f - &f).is_zero());
    }
}
