//! Dressed minuscule monopole operators for the coweights `+eps_{i,1}` and
//! `-eps_{i,v_i}`: closed forms, the sign relating them to `B_{i,m}`, and an
//! independent weight-enumeration (Euler class) oracle.

use thiserror::Error;

use crate::diff::DiffOperator;
use crate::gklo::{GkloError, GkloFamily};
use crate::quiver::{FramedQuiver, VertexId};
use crate::symbolic::{q, qr, LinearForm, Poly, RationalFunction, Variable, Q};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MonopoleError {
    #[error("vertex {0} is not in the positive half")]
    NotPositive(VertexId),
    #[error("no convention in the family reproduces the closed forms on the pinning instance")]
    ConventionUnresolved,
    #[error("{0} conventions reproduce the closed forms on the pinning instance")]
    ConventionAmbiguous(usize),
    #[error(transparent)]
    Gklo(#[from] GkloError),
}

/// A polynomial `f(x) = sum_k coeffs[k] x^k` whose coefficients may
/// involve `hbar` and the framing variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dressing {
    coeffs: Vec<Poly>,
}

impl Dressing {
    pub fn one() -> Self {
        Dressing { coeffs: vec![Poly::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<Poly>) -> Self {
        Dressing { coeffs }
    }

    /// `(a x + b hbar)^m`.
    pub fn affine_power(a: Q, b: Q, m: u32) -> Self {
        let base = Dressing { coeffs: vec![Poly::from_linear(&LinearForm::hbar_times(b)), Poly::constant(a)] };
        let mut acc = Dressing::one();
        for _ in 0..m {
            acc = acc.mul(&base);
        }
        acc
    }

    /// The dressing `(-x - hbar/2)^m` of the positive coweight.
    pub fn plus_mode(m: u32) -> Self {
        Self::affine_power(q(-1), qr(-1, 2), m)
    }

    /// The dressing `(x + hbar/2)^m` of the negative coweight.
    pub fn minus_mode(m: u32) -> Self {
        Self::affine_power(q(1), qr(1, 2), m)
    }

    pub fn mul(&self, other: &Dressing) -> Dressing {
        let mut coeffs = vec![Poly::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Dressing { coeffs }
    }

    pub fn eval(&self, at: &LinearForm) -> RationalFunction {
        let x = Poly::from_linear(at);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        RationalFunction::from_poly(acc)
    }
}

fn sign(odd: bool) -> Q {
    if odd {
        q(-1)
    } else {
        q(1)
    }
}

fn v_at(fam: &GkloFamily, j: VertexId, z: &LinearForm) -> RationalFunction {
    RationalFunction::from_poly(fam.build_v(j, z).expect("vertex comes from the quiver"))
}

fn w_at(fam: &GkloFamily, j: VertexId, z: &LinearForm) -> RationalFunction {
    RationalFunction::from_poly(fam.build_w(j, z).expect("vertex comes from the quiver"))
}

fn inv_punctured(fam: &GkloFamily, i: VertexId, r: u32) -> RationalFunction {
    let x = fam.x(i, r);
    let factors: Vec<LinearForm> = (1..=fam.quiver().v(i)).filter(|k| *k != r).map(|k| &x - &fam.x(i, k)).collect();
    RationalFunction::product_of_powers(factors.iter().map(|f| (f, -1))).expect("slots are distinct")
}

/// `f(c_1(Q_i)) ∩ [R_{eps_{i,1}}]` for `i` in the positive half.
pub fn closed_form_plus(fam: &GkloFamily, i: VertexId, f: &Dressing) -> Result<DiffOperator, MonopoleError> {
    let fq = fam.quiver();
    fq.check_vertex(i).map_err(GkloError::from)?;
    if !fq.is_positive(i) {
        return Err(MonopoleError::NotPositive(i));
    }
    let t = fq.tau(i);
    let half = LinearForm::hbar_times(qr(1, 2));
    let mut terms = Vec::new();
    for r in 1..=fq.v(i) {
        let x = fam.x(i, r);
        let x_half = &x + &half;
        let mut c = f.eval(&x);
        for e in fq.out_edges(i) {
            let vt = v_at(fam, e.target, &x_half);
            if e.tau_fixed {
                let lin = RationalFunction::linear(&(x.scale(&q(2)) + LinearForm::hbar_times(qr(3, 2))));
                c = c.mul(&lin).mul(&vt).scale(&sign(fq.v(i) % 2 == 0));
            } else {
                c = c.mul(&vt).scale(&sign(fq.v(e.target) % 2 == 1));
            }
        }
        c = c.mul(&w_at(fam, t, &(&fam.x(t, r) - &half)));
        c = c.mul(&inv_punctured(fam, i, r));
        terms.push(DiffOperator::term(c, fam.shift(i, r, 1)));
    }
    Ok(DiffOperator::sum(terms.iter()))
}

/// `f(c_1(S_i)) ∩ [R_{-eps_{i,v_i}}]` for `i` in the positive half.
pub fn closed_form_minus(fam: &GkloFamily, i: VertexId, f: &Dressing) -> Result<DiffOperator, MonopoleError> {
    let fq = fam.quiver();
    fq.check_vertex(i).map_err(GkloError::from)?;
    if !fq.is_positive(i) {
        return Err(MonopoleError::NotPositive(i));
    }
    let t = fq.tau(i);
    let half = LinearForm::hbar_times(qr(1, 2));
    let vi = fq.v(i);
    let mut terms = Vec::new();
    for r in 1..=vi {
        let x = fam.x(i, r);
        let xt_half = &fam.x(t, r) + &half;
        let mut c = f.eval(&(&x - &LinearForm::hbar()));
        for e in fq.out_edges(t) {
            if !e.tau_fixed {
                c = c.mul(&v_at(fam, e.target, &xt_half)).scale(&sign(fq.v(e.target) % 2 == 1));
            }
        }
        for &(s, tgt) in fq.edges() {
            if tgt == i && s == t {
                let lin = RationalFunction::linear(&(x.scale(&q(2)) - LinearForm::hbar_times(qr(3, 2))));
                c = c.mul(&lin).mul(&v_at(fam, i, &xt_half)).scale(&sign(vi % 2 == 1));
            }
        }
        c = c.mul(&w_at(fam, i, &(&x - &half)));
        c = c.mul(&inv_punctured(fam, i, r)).scale(&sign((vi + 1) % 2 == 1));
        terms.push(DiffOperator::term(c, fam.shift(i, r, -1)));
    }
    Ok(DiffOperator::sum(terms.iter()))
}

/// `(-1)^{1 + sum_{h not tau-fixed, s(h)=i} v_{t(h)} + sum_{h tau-fixed, s(h)=i} (v_i - 1)}`.
pub fn theorem_sign(fq: &FramedQuiver, i: VertexId) -> Q {
    let mut e: i64 = 1;
    for edge in fq.out_edges(i) {
        if edge.tau_fixed {
            e += fq.v(i) as i64 - 1;
        } else {
            e += fq.v(edge.target) as i64;
        }
    }
    sign(e.rem_euclid(2) == 1)
}

/// The image of `hbar b_{i,m}` predicted by the monopole closed forms.
pub fn monopole_b_mode(fam: &GkloFamily, i: VertexId, m: u32) -> Result<DiffOperator, MonopoleError> {
    let fq = fam.quiver();
    let s = theorem_sign(fq, i);
    let op = if fq.is_positive(i) {
        closed_form_plus(fam, i, &Dressing::plus_mode(m))?
    } else {
        closed_form_minus(fam, fq.tau(i), &Dressing::minus_mode(m))?
    };
    Ok(op.scale(&s))
}

/// Minuscule coweights of the gauge group at a positive vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coweight {
    /// `eps_{i,1}`
    Plus(VertexId),
    /// `-eps_{i,v_i}`
    Minus(VertexId),
}

impl Coweight {
    pub fn vertex(self) -> VertexId {
        match self {
            Coweight::Plus(i) | Coweight::Minus(i) => i,
        }
    }

    fn sign(self) -> i32 {
        match self {
            Coweight::Plus(_) => 1,
            Coweight::Minus(_) => -1,
        }
    }
}

/// Where a torus weight of the matter representation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightOrigin {
    Edge(VertexId, VertexId),
    SymmetricSquare(VertexId, VertexId),
    Framing(VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDatum {
    pub form: LinearForm,
    pub origin: WeightOrigin,
}

/// All torus weights of the matter representation, each with its
/// `hbar/2` twist.
pub fn matter_weights(fam: &GkloFamily) -> Vec<WeightDatum> {
    let fq = fam.quiver();
    let half = LinearForm::hbar_times(qr(1, 2));
    let mut out = Vec::new();
    for (s, t) in fq.positive_edges() {
        for a in 1..=fq.v(s) {
            for b in 1..=fq.v(t) {
                out.push(WeightDatum {
                    form: fam.x(t, b) - fam.x(s, a) + half.clone(),
                    origin: WeightOrigin::Edge(s, t),
                });
            }
        }
    }
    for (s, t) in fq.tau_fixed_edges() {
        for a in 1..=fq.v(t) {
            for b in a..=fq.v(t) {
                out.push(WeightDatum {
                    form: fam.x(t, a) + fam.x(t, b) + half.clone(),
                    origin: WeightOrigin::SymmetricSquare(s, t),
                });
            }
        }
    }
    for &j in fq.vertices() {
        for a in 1..=fq.v(j) {
            for k in 1..=fq.w(j) {
                out.push(WeightDatum {
                    form: fam.x(j, a) - fq.w_var(j, k) + half.clone(),
                    origin: WeightOrigin::Framing(j),
                });
            }
        }
    }
    out
}

/// Which weights (or roots) enter a product: those with negative or with
/// positive pairing against the cocharacter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Positive,
}

/// One member of the finite family of normalizations for the localization
/// formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EulerConvention {
    pub matter_side: Side,
    pub tangent_side: Side,
    /// Tangent roots enter as `root + tangent_offset * hbar`.
    pub tangent_offset: i8,
}

impl EulerConvention {
    /// The 12 candidate conventions in a fixed order.
    pub fn family() -> Vec<EulerConvention> {
        let mut out = Vec::new();
        for matter_side in [Side::Negative, Side::Positive] {
            for tangent_side in [Side::Positive, Side::Negative] {
                for tangent_offset in [0, -1, 1] {
                    out.push(EulerConvention { matter_side, tangent_side, tangent_offset });
                }
            }
        }
        out
    }
}

/// The convention selected by [`pin`].
pub const PINNED_CONVENTION: EulerConvention =
    EulerConvention { matter_side: Side::Negative, tangent_side: Side::Positive, tangent_offset: 0 };

fn pairing(form: &LinearForm, slot: Variable, lambda_sign: i32) -> i64 {
    let c = form.coeff(slot) * Q::from_integer(lambda_sign.into());
    assert!(c.is_integer(), "torus weights have integral pairings");
    i64::try_from(c.to_integer()).expect("small pairing")
}

/// Localization formula for `f ∩ [R_lambda]`, summed over the Weyl orbit.
pub fn euler_oracle(
    fam: &GkloFamily,
    coweight: Coweight,
    f: &Dressing,
    conv: EulerConvention,
) -> Result<DiffOperator, MonopoleError> {
    let fq = fam.quiver();
    let i = coweight.vertex();
    fq.check_vertex(i).map_err(GkloError::from)?;
    if !fq.is_positive(i) {
        return Err(MonopoleError::NotPositive(i));
    }
    let weights = matter_weights(fam);
    let hbar = LinearForm::hbar();
    let lsign = coweight.sign();
    let mut terms = Vec::new();
    for r in 1..=fq.v(i) {
        let slot = Variable::X { vertex: i, slot: r };
        let x = fam.x(i, r);
        let point = if lsign > 0 { x.clone() } else { &x - &hbar };
        let mut c = f.eval(&point);
        for wd in &weights {
            let n = pairing(&wd.form, slot, lsign);
            let ks: Vec<i64> = match conv.matter_side {
                Side::Negative if n < 0 => (n..0).collect(),
                Side::Positive if n > 0 => (0..n).collect(),
                _ => Vec::new(),
            };
            for k in ks {
                c = c.mul(&RationalFunction::linear(&(&wd.form + &hbar.scale(&q(k)))));
            }
        }
        for k in (1..=fq.v(i)).filter(|k| *k != r) {
            // the root x_r - x_k pairs with lambda as lsign
            let root = &x - &fam.x(i, k);
            let root = match (conv.tangent_side, lsign > 0) {
                (Side::Positive, true) | (Side::Negative, false) => root,
                _ => -root,
            };
            let shifted = &root + &hbar.scale(&q(conv.tangent_offset as i64));
            c = c.mul(&RationalFunction::linear_power(&shifted, -1).map_err(GkloError::from)?);
        }
        terms.push(DiffOperator::term(c, fam.shift(i, r, lsign)));
    }
    Ok(DiffOperator::sum(terms.iter()))
}

/// Closed form for a coweight.
pub fn closed_form(fam: &GkloFamily, coweight: Coweight, f: &Dressing) -> Result<DiffOperator, MonopoleError> {
    match coweight {
        Coweight::Plus(i) => closed_form_plus(fam, i, f),
        Coweight::Minus(i) => closed_form_minus(fam, i, f),
    }
}

/// True iff the oracle under `conv` reproduces the closed forms for both
/// coweights at every positive vertex, undressed and with `f(x) = x`.
pub fn convention_matches(fam: &GkloFamily, conv: EulerConvention) -> Result<bool, MonopoleError> {
    let dressings = [Dressing::one(), Dressing::affine_power(q(1), q(0), 1)];
    for i in fam.quiver().positive_vertices() {
        for cw in [Coweight::Plus(i), Coweight::Minus(i)] {
            for f in &dressings {
                if !euler_oracle(fam, cw, f, conv)?.equals(&closed_form(fam, cw, f)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Selects the unique convention matching the closed forms on `fam`.
pub fn pin(fam: &GkloFamily) -> Result<EulerConvention, MonopoleError> {
    let mut hits = Vec::new();
    for conv in EulerConvention::family() {
        if convention_matches(fam, conv)? {
            hits.push(conv);
        }
    }
    match hits.len() {
        0 => Err(MonopoleError::ConventionUnresolved),
        1 => Ok(hits[0]),
        n => Err(MonopoleError::ConventionAmbiguous(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dressing_evaluation() {
        let d = Dressing::plus_mode(2);
        let x = LinearForm::var(Variable::X { vertex: 1, slot: 1 });
        let base = -x.clone() - LinearForm::hbar_times(qr(1, 2));
        let expect = RationalFunction::linear(&base).mul(&RationalFunction::linear(&base));
        assert!(d.eval(&x).equals(&expect));
        assert!(Dressing::minus_mode(0).eval(&x).equals(&RationalFunction::one()));
    }

    #[test]
    fn family_has_12_members() {
        let fam = EulerConvention::family();
        assert_eq!(fam.len(), 12);
        assert!(fam.contains(&PINNED_CONVENTION));
    }
}
