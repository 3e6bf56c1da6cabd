//! Residuals of the commutation, residue and truncation lemmas, the data
//! of `H`, and the monopole formula for `B_{i,m}`.

use super::relations::first_failure;
use super::{CheckError, Outcome};
use crate::diff::DiffOperator;
use crate::gklo::{GkloFamily, PoleSide};
use crate::monopole;
use crate::quiver::VertexId;
use crate::series;
use crate::symbolic::{q, qr, LinearForm, Poly, RationalFunction, Variable};

fn scalar(f: RationalFunction) -> DiffOperator {
    DiffOperator::scalar(f)
}

fn tau_cartan(fam: &GkloFamily, i: VertexId) -> i64 {
    fam.quiver().cartan(i, fam.quiver().tau(i))
}

fn needs_tau_cartan(fam: &GkloFamily, i: VertexId, want: i64) -> Option<Outcome> {
    let c = tau_cartan(fam, i);
    (c != want).then(|| {
        Outcome::Skipped(format!("WrongCartanCase: c[{i},{}] = {c} (needs {want})", fam.quiver().tau(i)))
    })
}

/// `y_{j,s} y_{i,r} - C y_{i,r} y_{j,s}`.
pub(super) fn c_conjugation(fam: &GkloFamily, i: VertexId, j: VertexId, r: u32, s: u32) -> Result<Outcome, CheckError> {
    let (yi, yj) = (fam.y(i, r)?, fam.y(j, s)?);
    let c = fam.c_coeff(i, j, r, s)?;
    Ok(Outcome::Residual(yj.mul(yi).sub(&yi.mul(yj).left_mul(&c))))
}

/// Compact form of `C` minus its case table.
pub(super) fn c_table(fam: &GkloFamily, i: VertexId, j: VertexId, r: u32, s: u32) -> Result<Outcome, CheckError> {
    let d = fam.c_coeff(i, j, r, s)?.sub(&fam.c_coeff_table(i, j, r, s)?);
    Ok(Outcome::Residual(scalar(d)))
}

/// `y_{j,s} H_i(u) - D H_i(u) y_{j,s}`.
pub(super) fn d_conjugation(fam: &GkloFamily, i: VertexId, j: VertexId, s: u32) -> Result<Outcome, CheckError> {
    let u = LinearForm::var(Variable::U);
    let h = scalar(fam.h(i)?.clone());
    let y = fam.y(j, s)?;
    let d = fam.d_coeff(i, j, s, &u)?;
    Ok(Outcome::Residual(y.mul(&h).sub(&h.mul(y).left_mul(&d))))
}

/// Unified form of `D` minus its case table.
pub(super) fn d_table(fam: &GkloFamily, i: VertexId, j: VertexId, s: u32) -> Result<Outcome, CheckError> {
    let u = LinearForm::var(Variable::U);
    let d = fam.d_coeff(i, j, s, &u)?.sub(&fam.d_coeff_table(i, j, s, &u)?);
    Ok(Outcome::Residual(scalar(d)))
}

/// Residue of `H_i(u)` at `-x_{i,r} -+ hbar/2` minus the residue formula.
pub(super) fn h_residue(fam: &GkloFamily, i: VertexId, r: u32, side: PoleSide) -> Result<Outcome, CheckError> {
    let pole = fam.h_pole(i, r, side);
    let res = series::residue_at(fam.h(i)?, Variable::U, &pole)?;
    Ok(Outcome::Residual(scalar(res).sub(&fam.h_residue(i, r, side)?)))
}

/// `(2 u hbar H_i(u))°` minus the unified truncation formula.
pub(super) fn h_truncation(fam: &GkloFamily, i: VertexId) -> Result<Outcome, CheckError> {
    let two_u_hbar = Poly::var(Variable::U).mul(&Poly::var(Variable::Hbar)).scale(&q(2));
    let f = fam.h(i)?.mul(&RationalFunction::from_poly(two_u_hbar));
    let t = series::truncate(&f, Variable::U)?;
    Ok(Outcome::Residual(scalar(t).sub(&fam.two_uh_truncated(i)?)))
}

/// `(hbar H_i(u))°` minus the `c_{i,tau i} = 0` formula.
pub(super) fn hbar_h_truncation(fam: &GkloFamily, i: VertexId) -> Result<Outcome, CheckError> {
    if let Some(s) = needs_tau_cartan(fam, i, 0) {
        return Ok(s);
    }
    let f = fam.h(i)?.mul(&RationalFunction::var(Variable::Hbar));
    let t = series::truncate(&f, Variable::U)?;
    Ok(Outcome::Residual(scalar(t).sub(&fam.hbar_h_truncated(i)?)))
}

/// `H_i(-x_{i,r} - 3hbar/2)` minus the special-value formula.
pub(super) fn h_special(fam: &GkloFamily, i: VertexId, r: u32) -> Result<Outcome, CheckError> {
    if let Some(s) = needs_tau_cartan(fam, i, -1) {
        return Ok(s);
    }
    let z = -fam.x(i, r) - LinearForm::hbar_times(qr(3, 2));
    let value = fam.h_at(i, &z)?;
    Ok(Outcome::Residual(scalar(value).sub(&fam.h_special(i, r)?)))
}

fn serre_word(a: &DiffOperator, b: &DiffOperator, t: &DiffOperator) -> DiffOperator {
    let first = a.mul(b).mul(t);
    let middle = a.mul(t).mul(b).scale(&q(-2));
    let last = t.mul(a).mul(b);
    DiffOperator::sum([first, middle, last].iter())
}

/// `Sym_{r1,r2} (y y y_tau - 2 y y_tau y + y_tau y y)` for distinct slots.
pub(super) fn y_serre_distinct(fam: &GkloFamily, i: VertexId, r1: u32, r2: u32, s: u32) -> Result<Outcome, CheckError> {
    if let Some(skip) = needs_tau_cartan(fam, i, -1) {
        return Ok(skip);
    }
    let t = fam.quiver().tau(i);
    let (a, b, yt) = (fam.y(i, r1)?, fam.y(i, r2)?, fam.y(t, s)?);
    Ok(Outcome::Residual(serre_word(a, b, yt).add(&serre_word(b, a, yt))))
}

/// `y y y_tau - 2 y y_tau y + y_tau y y` with a repeated slot.
pub(super) fn y_serre_repeated(fam: &GkloFamily, i: VertexId, r: u32, s: u32) -> Result<Outcome, CheckError> {
    if let Some(skip) = needs_tau_cartan(fam, i, -1) {
        return Ok(skip);
    }
    let t = fam.quiver().tau(i);
    let (a, yt) = (fam.y(i, r)?, fam.y(t, s)?);
    Ok(Outcome::Residual(serre_word(a, a, yt)))
}

/// Degree of `H_i` at infinity, vanishing below the boundary mode, and the
/// boundary mode itself.
pub(super) fn h_boundary(fam: &GkloFamily, i: VertexId) -> Result<Outcome, CheckError> {
    let fq = fam.quiver();
    let mu = fq.mu_pairing(i)?;
    let h = fam.h(i)?;
    let deg = series::degree_at_infinity(h, Variable::U);
    if deg != Some(mu) {
        return Err(CheckError::Other(format!("degree of H at infinity is {deg:?}, pairing is {mu}")));
    }
    let mut parts = Vec::new();
    for k in 1..=2 {
        // coefficient of u^{mu + k}, i.e. mode -mu - 1 - k
        parts.push(scalar(series::laurent_coeff(h, Variable::U, mu + k)));
    }
    let lead = series::laurent_coeff(h, Variable::U, mu);
    let zeta = RationalFunction::constant(fq.zeta(i)?.value());
    parts.push(scalar(lead.sub(&zeta)));
    parts.push(scalar(fam.h_mode(i, -mu - 1)?.sub(&zeta)));
    Ok(Outcome::Residual(DiffOperator::sum(parts.iter())))
}

/// Generators of the slot permutations: adjacent transpositions.
fn transpositions(fam: &GkloFamily) -> Vec<(Variable, Variable)> {
    let fq = fam.quiver();
    let mut out = Vec::new();
    for i in fq.positive_vertices() {
        for r in 1..fq.v(i) {
            out.push((Variable::X { vertex: i, slot: r }, Variable::X { vertex: i, slot: r + 1 }));
        }
    }
    for &i in fq.vertices() {
        for k in 1..fq.w(i) {
            out.push((Variable::W { vertex: i, slot: k }, Variable::W { vertex: i, slot: k + 1 }));
        }
    }
    out
}

/// `H_{i,r}` is a polynomial for `r <= <alpha_i, mu> + 5` and symmetric in
/// the slots of every vertex.
pub(super) fn h_modes_polynomial(fam: &GkloFamily, i: VertexId) -> Result<Outcome, CheckError> {
    let mu = fam.quiver().mu_pairing(i)?;
    let swaps = transpositions(fam);
    let mut items = Vec::new();
    for r in -mu - 1..=mu + 5 {
        let h = fam.h_mode(i, r)?;
        for &(a, b) in &swaps {
            let map = |v: Variable| {
                if v == a {
                    Some(LinearForm::var(b))
                } else if v == b {
                    Some(LinearForm::var(a))
                } else {
                    None
                }
            };
            let swapped = h.substitute(&map)?;
            items.push(Ok((format!("r={r},swap={a}<->{b}"), scalar(h.sub(&swapped)))));
        }
        if swaps.is_empty() {
            items.push(Ok((format!("r={r}"), DiffOperator::zero())));
        }
    }
    first_failure(items)
}

/// `Res_{u = -x_{i,r} - hbar/2} B_i(u) + y_{i,r}`: the pole term is
/// `y/(-(u - p))`, so the residue is `-y`.
pub(super) fn b_residue(fam: &GkloFamily, i: VertexId, r: u32) -> Result<Outcome, CheckError> {
    let pole = -fam.x(i, r) - LinearForm::hbar_times(qr(1, 2));
    let res = series::residue_at_op(fam.b(i)?, Variable::U, &pole)?;
    Ok(Outcome::Residual(res.add(fam.y(i, r)?)))
}

/// Series expansion of `B_i(u)` against the pole sum `-sum_r (-x-hbar/2)^m y`.
pub(super) fn b_modes(fam: &GkloFamily, i: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    first_failure((0..=max_mode).map(|m| {
        let d = fam.b_mode(i, m)?.sub(&fam.b_mode_from_poles(i, m)?);
        Ok((format!("m={m}"), d))
    }))
}

/// Signed dressed monopole closed form minus `B_{i,m}`.
pub(super) fn monopole(fam: &GkloFamily, i: VertexId, m: u32) -> Result<Outcome, CheckError> {
    let op = monopole::monopole_b_mode(fam, i, m)?;
    Ok(Outcome::Residual(op.sub(&fam.b_mode(i, m)?)))
}
