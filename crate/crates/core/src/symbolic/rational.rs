use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::linear::LinearForm;
use super::poly::Poly;
use super::variable::{q, Q, Variable};
use super::SymbolicError;

/// Exact rational function whose denominator is a product of linear forms.
///
/// The value is `poly * prod(form^exp)`. Every `form` is normalized (leading
/// coefficient one in the fixed variable order) and distinct forms are never
/// proportional, so repeated poles merge into a single multiplicity.
/// Negative exponents make up the denominator; positive ones are numerator
/// factors kept unexpanded. Nothing is ever reduced by a gcd: two values
/// are equal iff their difference has a zero polynomial part.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    factors: Vec<(LinearForm, i32)>,
    poly: Poly,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { factors: Vec::new(), poly: Poly::zero() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        RationalFunction { factors: Vec::new(), poly: Poly::constant(c) }
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn from_poly(poly: Poly) -> Self {
        RationalFunction { factors: Vec::new(), poly }
    }

    pub fn var(v: Variable) -> Self {
        Self::linear(&LinearForm::var(v))
    }

    /// The linear form as a (single-factor) function.
    pub fn linear(f: &LinearForm) -> Self {
        Self::linear_power(f, 1).expect("positive powers never fail")
    }

    /// `f^e` for any integer `e`. Fails only for a zero form with `e < 0`.
    pub fn linear_power(f: &LinearForm, e: i32) -> Result<Self, SymbolicError> {
        if e == 0 {
            return Ok(Self::one());
        }
        match f.normalize() {
            None => {
                let c = f.constant_term();
                if c.is_zero() {
                    if e < 0 {
                        Err(SymbolicError::ZeroDenominator)
                    } else {
                        Ok(Self::zero())
                    }
                } else {
                    Ok(Self::constant(qpow(c, e)))
                }
            }
            Some((scale, form)) => Ok(RationalFunction {
                factors: vec![(form, e)],
                poly: Poly::constant(qpow(&scale, e)),
            }),
        }
    }

    /// `1/f`; the caller guarantees `f` is not the zero form.
    pub fn reciprocal(f: &LinearForm) -> Self {
        Self::linear_power(f, -1).expect("reciprocal of the zero linear form")
    }

    /// `prod_k f_k^{e_k}`.
    pub fn product_of_powers<'a>(items: impl IntoIterator<Item = (&'a LinearForm, i32)>) -> Result<Self, SymbolicError> {
        let mut acc = Self::one();
        for (f, e) in items {
            acc = acc.mul(&Self::linear_power(f, e)?);
        }
        Ok(acc)
    }

    pub fn factors(&self) -> &[(LinearForm, i32)] {
        &self.factors
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Denominator factors with their multiplicities.
    pub fn denominator(&self) -> impl Iterator<Item = (&LinearForm, u32)> {
        self.factors.iter().filter(|(_, e)| *e < 0).map(|(f, e)| (f, e.unsigned_abs()))
    }

    pub fn has_denominator(&self) -> bool {
        self.factors.iter().any(|(_, e)| *e < 0)
    }

    /// The constant value if this function is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.factors.is_empty() {
            self.poly.as_constant()
        } else {
            None
        }
    }

    /// The function as a polynomial, if it has no denominator.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.has_denominator() {
            return None;
        }
        let expanded = Poly::product_of_linear(self.factors.iter().map(|(f, e)| (f, *e as u32)));
        Some(self.poly.mul(&expanded))
    }

    pub fn contains(&self, v: Variable) -> bool {
        !self.is_zero() && (self.poly.contains(v) || self.factors.iter().any(|(f, _)| f.contains(v)))
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut vars = self.poly.variables();
        for (f, _) in &self.factors {
            vars.extend(f.variables());
        }
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { factors: self.factors.clone(), poly: self.poly.scale(c) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        RationalFunction { factors: merge_factors(&self.factors, &other.factors), poly: self.poly.mul(&other.poly) }
    }

    /// Integer power. Negative powers need a constant polynomial part.
    pub fn pow(&self, e: i32) -> Result<Self, SymbolicError> {
        if e >= 0 {
            let mut acc = Self::one();
            for _ in 0..e {
                acc = acc.mul(self);
            }
            return Ok(acc);
        }
        self.inv()?.pow(-e)
    }

    pub fn inv(&self) -> Result<Self, SymbolicError> {
        let c = self.poly.as_constant().ok_or(SymbolicError::NotInvertible)?;
        if c.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(RationalFunction {
            factors: self.factors.iter().map(|(f, e)| (f.clone(), -e)).collect(),
            poly: Poly::constant(c.recip()),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::sum([self, other])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::sum([self.clone(), other.neg()].iter())
    }

    /// Sum over a common denominator: every shared factor stays factored at
    /// its minimal exponent; only the differing factors get expanded.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a RationalFunction>) -> Self {
        let terms: Vec<&RationalFunction> = items.into_iter().filter(|t| !t.is_zero()).collect();
        match terms.len() {
            0 => return Self::zero(),
            1 => return terms[0].clone(),
            _ => {}
        }
        // terms over the same factors add without any expansion
        let mut grouped: BTreeMap<&[(LinearForm, i32)], Poly> = BTreeMap::new();
        for t in &terms {
            match grouped.get_mut(t.factors.as_slice()) {
                Some(p) => *p = p.add(&t.poly),
                None => {
                    grouped.insert(&t.factors, t.poly.clone());
                }
            }
        }
        let merged: Vec<RationalFunction> = grouped
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(f, poly)| RationalFunction { factors: f.to_vec(), poly })
            .collect();
        match merged.len() {
            0 => return Self::zero(),
            1 => return merged.into_iter().next().expect("one term"),
            2 => return Self::sum_flat(&[&merged[0], &merged[1]]),
            _ => {}
        }
        // pairwise in factor order: neighbours share most factors, so the
        // expansion at each level stays small
        if merged.len() <= GREEDY_LIMIT {
            return Self::sum_greedy(merged);
        }
        // pairwise in factor order: neighbours share most factors
        let mut level = merged;
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len() / 2 + 1);
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => {
                        let s = Self::sum_flat(&[&a, &b]);
                        if !s.is_zero() {
                            next.push(s);
                        }
                    }
                    None => next.push(a),
                }
            }
            level = next;
        }
        level.pop().unwrap_or_else(Self::zero)
    }

    /// Repeatedly adds the two summands whose factorizations differ least,
    /// so cancelling pairs meet before their factors get expanded.
    fn sum_greedy(mut items: Vec<RationalFunction>) -> Self {
        while items.len() > 1 {
            let mut best = (u32::MAX, 0, 1);
            for a in 0..items.len() {
                for b in a + 1..items.len() {
                    let d = factor_distance(&items[a].factors, &items[b].factors);
                    if d < best.0 {
                        best = (d, a, b);
                    }
                }
            }
            let (_, a, b) = best;
            let y = items.swap_remove(b);
            let x = items.swap_remove(a);
            let s = Self::sum_flat(&[&x, &y]);
            if !s.is_zero() {
                items.push(s);
            }
        }
        items.pop().unwrap_or_else(Self::zero)
    }

    /// One common denominator for all `terms` (nonzero, at least two).
    fn sum_flat(terms: &[&RationalFunction]) -> Self {
        let n = terms.len();
        let mut seen: BTreeMap<&LinearForm, (i32, usize)> = BTreeMap::new();
        for t in terms {
            for (f, e) in &t.factors {
                let entry = seen.entry(f).or_insert((*e, 0));
                entry.0 = entry.0.min(*e);
                entry.1 += 1;
            }
        }
        let common: Vec<(LinearForm, i32)> = seen
            .iter()
            .map(|(f, (min, count))| ((*f).clone(), if *count < n { (*min).min(0) } else { *min }))
            .collect();

        let mut power_cache: HashMap<(&LinearForm, u32), Poly> = HashMap::new();
        let mut acc_terms = Vec::new();
        for t in terms {
            let mut extra = Poly::one();
            let mut it = t.factors.iter().peekable();
            for (f, min) in &common {
                let e = match it.peek() {
                    Some((tf, te)) if tf == f => {
                        let e = *te;
                        it.next();
                        e
                    }
                    _ => 0,
                };
                let k = (e - min) as u32;
                if k > 0 {
                    let p = power_cache
                        .entry((f, k))
                        .or_insert_with(|| Poly::from_linear(f).pow(k));
                    extra = extra.mul(p);
                }
            }
            acc_terms.extend(t.poly.mul(&extra).terms().iter().cloned());
        }
        let poly = Poly::from_terms(acc_terms);
        if poly.is_zero() {
            return Self::zero();
        }
        RationalFunction { factors: common.into_iter().filter(|(_, e)| *e != 0).collect(), poly }
    }

    /// Semantic equality via the difference.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Substitutes variables by linear forms.
    pub fn substitute(&self, map: &dyn Fn(Variable) -> Option<LinearForm>) -> Result<Self, SymbolicError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut scalar = Q::one();
        let mut vanishes = false;
        let mut factors: Vec<(LinearForm, i32)> = Vec::with_capacity(self.factors.len());
        for (f, e) in &self.factors {
            let image = f.substitute(map);
            match image.normalize() {
                None => {
                    let c = image.constant_term();
                    if c.is_zero() {
                        if *e < 0 {
                            return Err(SymbolicError::SubstitutionDegenerate(f.to_string()));
                        }
                        vanishes = true;
                    } else {
                        scalar *= qpow(c, *e);
                    }
                }
                Some((s, form)) => {
                    scalar *= qpow(&s, *e);
                    factors.push((form, *e));
                }
            }
        }
        if vanishes {
            return Ok(Self::zero());
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(LinearForm, i32)> = Vec::with_capacity(factors.len());
        for (f, e) in factors {
            match merged.last_mut() {
                Some((lf, le)) if *lf == f => *le += e,
                _ => merged.push((f, e)),
            }
        }
        merged.retain(|(_, e)| *e != 0);
        let poly = self.poly.substitute(map).scale(&scalar);
        if poly.is_zero() {
            return Ok(Self::zero());
        }
        Ok(RationalFunction { factors: merged, poly })
    }

    /// Substitutes a single variable.
    pub fn substitute_var(&self, v: Variable, image: &LinearForm) -> Result<Self, SymbolicError> {
        self.substitute(&|w| (w == v).then(|| image.clone()))
    }

    /// Exact value at a point; `None` when a denominator factor vanishes.
    pub fn eval(&self, point: &dyn Fn(Variable) -> Q) -> Option<Q> {
        let mut acc = self.poly.eval(point);
        if acc.is_zero() {
            // still reject points on a pole
            if self.denominator().any(|(f, _)| f.eval(point).is_zero()) {
                return None;
            }
            return Some(acc);
        }
        for (f, e) in &self.factors {
            let val = f.eval(point);
            if val.is_zero() {
                if *e < 0 {
                    return None;
                }
                return Some(Q::zero());
            }
            acc *= qpow(&val, *e);
        }
        Some(acc)
    }
}

/// Above this many summands the quadratic pair search is skipped.
const GREEDY_LIMIT: usize = 256;

/// Total exponent by which two sorted factor lists differ.
fn factor_distance(a: &[(LinearForm, i32)], b: &[(LinearForm, i32)]) -> u32 {
    let (mut i, mut j, mut d) = (0, 0, 0u32);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            d += a[i].1.unsigned_abs();
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            d += b[j].1.unsigned_abs();
            j += 1;
        } else {
            d += (a[i].1 - b[j].1).unsigned_abs();
            i += 1;
            j += 1;
        }
    }
    d
}

fn merge_factors(a: &[(LinearForm, i32)], b: &[(LinearForm, i32)]) -> Vec<(LinearForm, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn qpow(c: &Q, e: i32) -> Q {
    if e >= 0 {
        num_traits::pow(c.clone(), e as usize)
    } else {
        num_traits::pow(c.recip(), e.unsigned_abs() as usize)
    }
}

/// `rf_equal`: semantic equality by cross-multiplication.
pub fn rf_equal(f: &RationalFunction, g: &RationalFunction) -> bool {
    f.equals(g)
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::add(self, rhs)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::sub(self, rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::mul(self, rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl From<&LinearForm> for RationalFunction {
    fn from(f: &LinearForm) -> Self {
        RationalFunction::linear(f)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() || self.is_zero() {
            return write!(f, "{}", self.poly);
        }
        match self.poly.as_constant() {
            Some(c) if c.is_one() => {}
            Some(c) if c == q(-1) => f.write_str("-")?,
            Some(c) => write!(f, "{c}*")?,
            None => write!(f, "({})*", self.poly)?,
        }
        for (k, (form, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "({form})")?;
            } else {
                write!(f, "({form})^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::variable::qr;

    fn z() -> LinearForm {
        LinearForm::var(Variable::U)
    }
    fn a() -> LinearForm {
        LinearForm::var(Variable::X { vertex: 1, slot: 1 })
    }
    fn b() -> LinearForm {
        LinearForm::var(Variable::X { vertex: 2, slot: 1 })
    }

    #[test]
    fn two_simple_fractions_share_a_denominator() {
        let f = RationalFunction::reciprocal(&(z() - a()));
        let g = RationalFunction::reciprocal(&(z() - b()));
        let sum = &f + &g;
        let numer = z().scale(&q(2)) - a() - b();
        let expect = RationalFunction::linear(&numer)
            .mul(&RationalFunction::reciprocal(&(z() - a())))
            .mul(&RationalFunction::reciprocal(&(z() - b())));
        assert!(sum.equals(&expect));
        assert_eq!(sum.denominator().count(), 2);
    }

    #[test]
    fn identity_and_cancellation() {
        let f = RationalFunction::reciprocal(&(z() - a()));
        assert!((&f + &RationalFunction::zero()).equals(&f));
        assert!((&f + &f.neg()).is_zero());
    }

    #[test]
    fn cross_multiplied_equality() {
        let num = RationalFunction::from_poly(&Poly::from_linear(&z()).pow(2) - &Poly::from_linear(&a()).pow(2));
        let f = num.mul(&RationalFunction::reciprocal(&(z() - a())));
        assert!(f.equals(&RationalFunction::linear(&(z() + a()))));
        let g = RationalFunction::reciprocal(&(z() - a())).mul(&RationalFunction::linear(&(z() - a())));
        assert!(g.equals(&RationalFunction::one()));
        let h = LinearForm::hbar();
        let p = RationalFunction::linear(&(&a() + &h)).mul(&RationalFunction::reciprocal(&(&a() - &h)));
        let r = RationalFunction::linear(&(&a() - &h)).mul(&RationalFunction::reciprocal(&(&a() + &h)));
        assert!(!p.equals(&r));
    }

    #[test]
    fn proportional_factors_merge() {
        let f = RationalFunction::reciprocal(&(a().scale(&q(2)) + LinearForm::hbar()));
        let g = RationalFunction::linear(&(a() + LinearForm::hbar_times(qr(1, 2))));
        let prod = f.mul(&g);
        assert_eq!(prod.as_constant(), Some(qr(1, 2)));
    }

    #[test]
    fn substitution_reflection_and_degenerate_pole() {
        let f = RationalFunction::reciprocal(&(z() + a()));
        let g = f.substitute_var(Variable::U, &-z()).unwrap();
        assert!(g.equals(&RationalFunction::reciprocal(&(a() - z()))));
        let h = RationalFunction::reciprocal(&(z() - a()));
        assert!(matches!(h.substitute_var(Variable::U, &a()), Err(SymbolicError::SubstitutionDegenerate(_))));
    }

    #[test]
    fn substitution_shift_of_a_coordinate() {
        let x = Variable::X { vertex: 1, slot: 1 };
        let f = RationalFunction::var(x);
        let g = f.substitute_var(x, &(a() + LinearForm::hbar())).unwrap();
        assert!(g.equals(&RationalFunction::linear(&(a() + LinearForm::hbar()))));
    }

    #[test]
    fn evaluation() {
        let f = RationalFunction::linear(&(z() - LinearForm::constant(q(1))))
            .mul(&RationalFunction::reciprocal(&(z() + LinearForm::constant(q(1)))));
        assert_eq!(f.eval(&|_| q(3)), Some(qr(1, 2)));
        assert_eq!(f.eval(&|_| q(-1)), None);
    }
}
