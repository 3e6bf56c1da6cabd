use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::linear::{fmt_coeff_term, LinearForm};
use super::variable::{Q, Variable};

/// A power product of variables, sorted by variable, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(Variable, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Variable, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(smallvec::smallvec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: Variable) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// The monomial with `v` removed.
    pub fn without(&self, v: Variable) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| *w != v).cloned().collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(Variable, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are sorted by monomial and never carry a zero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: Variable) -> Self {
        Poly { terms: vec![(Monomial::var(v, 1), Q::one())] }
    }

    pub fn from_linear(f: &LinearForm) -> Self {
        let mut terms: Vec<(Monomial, Q)> = Vec::with_capacity(f.terms().len() + 1);
        if !f.constant_term().is_zero() {
            terms.push((Monomial::one(), f.constant_term().clone()));
        }
        for (v, c) in f.terms() {
            terms.push((Monomial::var(*v, 1), c.clone()));
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Q::zero) += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: FxHashMap<Monomial, Q>) -> Self {
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
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

    /// The value if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
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
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        // clear denominators so the inner loop never reduces a fraction
        let (da, ia) = self.cleared();
        let (db, ib) = other.cleared();
        let den = Q::from_integer(da * db);
        if let Some(out) = mul_small(&self.terms, &ia, &other.terms, &ib) {
            return Self::from_integer_map(out.into_iter().map(|(m, c)| (m, BigInt::from(c))), &den);
        }
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        acc.reserve(self.len() * other.len());
        for ((ma, _), ca) in self.terms.iter().zip(&ia) {
            for ((mb, _), cb) in other.terms.iter().zip(&ib) {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Self::from_integer_map(acc.into_iter(), &den)
    }

    /// `(d, n)` with `coeff_k = n_k / d` for every term.
    fn cleared(&self) -> (BigInt, Vec<BigInt>) {
        let mut d = BigInt::one();
        for (_, c) in &self.terms {
            if !c.denom().is_one() {
                d = d.lcm(c.denom());
            }
        }
        let n = self.terms.iter().map(|(_, c)| c.numer() * (&d / c.denom())).collect();
        (d, n)
    }

    fn from_integer_map(items: impl Iterator<Item = (Monomial, BigInt)>, den: &Q) -> Poly {
        let mut terms: Vec<(Monomial, Q)> = items
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, ratio(c, den)))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        for _ in 0..e {
            result = result.mul(self);
        }
        result
    }

    /// Product of linear forms, smallest first.
    pub fn product_of_linear<'a>(forms: impl IntoIterator<Item = (&'a LinearForm, u32)>) -> Poly {
        let mut result = Poly::one();
        for (f, e) in forms {
            let p = Poly::from_linear(f);
            for _ in 0..e {
                result = result.mul(&p);
            }
        }
        result
    }

    pub fn degree_in(&self, v: Variable) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Variable) -> bool {
        self.terms.iter().any(|(m, _)| m.degree_in(v) > 0)
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> =
            self.terms.iter().flat_map(|(m, _)| m.factors().iter().map(|(v, _)| *v)).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coefficients_in(&self, v: Variable) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.degree_in(v) as usize].push((m.without(v), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    /// Replaces variables by linear forms; variables without an image stay.
    pub fn substitute(&self, map: &dyn Fn(Variable) -> Option<LinearForm>) -> Poly {
        let mut images: HashMap<Variable, Option<Poly>> = HashMap::new();
        let mut powers: HashMap<(Variable, u32), Poly> = HashMap::new();
        let mut all: Vec<(Monomial, Q)> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Poly::constant(c.clone());
            for (v, e) in m.factors() {
                let image = images.entry(*v).or_insert_with(|| map(*v).map(|f| Poly::from_linear(&f)));
                match image {
                    None => kept = kept.mul(&Monomial::var(*v, *e)),
                    Some(p) => {
                        let pw = powers.entry((*v, *e)).or_insert_with(|| p.pow(*e));
                        factor = factor.mul(pw);
                    }
                }
            }
            all.extend(factor.terms.into_iter().map(|(fm, fc)| (fm.mul(&kept), fc)));
        }
        Poly::from_terms(all)
    }

    pub fn eval(&self, point: &dyn Fn(Variable) -> Q) -> Q {
        let mut cache: HashMap<Variable, Q> = HashMap::new();
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let x = cache.entry(*v).or_insert_with(|| point(*v));
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            acc += t;
        }
        acc
    }
}

/// `n / den` for an integer `n`, avoiding big gcds when both are small.
fn ratio(n: BigInt, den: &Q) -> Q {
    let d = den.numer();
    if d.is_one() {
        return Q::from_integer(n);
    }
    if let (Some(a), Some(b)) = (n.to_i64(), d.to_i64()) {
        let g = a.gcd(&b);
        let (a, b) = (a / g, b / g);
        let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
        return Q::new_raw(BigInt::from(a), BigInt::from(b));
    }
    Q::from_integer(n) / den
}

/// The product with machine integers; `None` on any overflow.
fn mul_small(a: &[(Monomial, Q)], ia: &[BigInt], b: &[(Monomial, Q)], ib: &[BigInt]) -> Option<FxHashMap<Monomial, i128>> {
    let small = |xs: &[BigInt]| xs.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<Vec<i128>>>();
    let (sa, sb) = (small(ia)?, small(ib)?);
    let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
    acc.reserve(a.len() * b.len());
    for ((ma, _), ca) in a.iter().zip(&sa) {
        for ((mb, _), cb) in b.iter().zip(&sb) {
            let slot = acc.entry(ma.mul(mb)).or_insert(0);
            *slot = slot.checked_add(ca * cb)?;
        }
    }
    Some(acc)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::add(self, &-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            fmt_coeff_term(f, k == 0, c, &m.to_string())?;
        }
        Ok(())
    }
}
