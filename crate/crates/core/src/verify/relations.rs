//! Residuals of the defining relations, in generating-function form and as
//! mode spot-checks. Normalization: `h(z) -> H(z)`, `b(z) -> B(z)`,
//! `hbar b_{j,m} -> B_{j,m}`, `hbar h_{j,r} -> H_{j,r}`.

use super::{CheckError, Outcome};
use crate::diff::{DiffOperator, OpSum};
use crate::gklo::GkloFamily;
use crate::quiver::VertexId;
use crate::series;
use crate::symbolic::{q, qr, LinearForm, Poly, RationalFunction, Variable, Q};

fn var(v: Variable) -> LinearForm {
    LinearForm::var(v)
}

fn poly(p: Poly) -> RationalFunction {
    RationalFunction::from_poly(p)
}

fn hbar_poly() -> Poly {
    Poly::var(Variable::Hbar)
}

fn cartan_q(fam: &GkloFamily, i: VertexId, j: VertexId) -> Q {
    q(fam.quiver().cartan(i, j))
}

fn scalar(f: RationalFunction) -> DiffOperator {
    DiffOperator::scalar(f)
}

fn parity(n: i64) -> Q {
    if n.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// `[H_i(u), H_j(v)] + (H_{tau i}(u) - H_i(-u))`.
pub(super) fn hh(fam: &GkloFamily, i: VertexId, j: VertexId) -> Result<Outcome, CheckError> {
    let hi = scalar(fam.h(i)?.clone());
    let hj = scalar(fam.h_at(j, &var(Variable::V))?);
    let comm = hi.commutator(&hj);
    let t = fam.quiver().tau(i);
    let reflected = fam.h_at(i, &-var(Variable::U))?;
    let mirror = fam.h(t)?.sub(&reflected);
    Ok(Outcome::Residual(comm.add(&scalar(mirror))))
}

pub(super) fn first_failure(
    items: impl IntoIterator<Item = Result<(String, DiffOperator), CheckError>>,
) -> Result<Outcome, CheckError> {
    for item in items {
        let (at, r) = item?;
        if !r.is_zero() {
            return Ok(Outcome::Modes(Some((at, r))));
        }
    }
    Ok(Outcome::Modes(None))
}

fn lowest_h(fam: &GkloFamily, i: VertexId) -> Result<i64, CheckError> {
    Ok(-fam.quiver().mu_pairing(i)? - 1)
}

/// `H_{i,s} - (-1)^{s+1} H_{tau i,s}`.
pub(super) fn hh_modes(fam: &GkloFamily, i: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    let t = fam.quiver().tau(i);
    let lo = lowest_h(fam, i)?.min(lowest_h(fam, t)?);
    first_failure((lo..=max_mode as i64).map(|s| {
        let r = fam.h_mode(i, s)?.sub(&fam.h_mode(t, s)?.scale(&parity(s + 1)));
        Ok((format!("s={s}"), scalar(r)))
    }))
}

/// The full left side of the h-b generating identity.
pub(super) fn hb(fam: &GkloFamily, i: VertexId, j: VertexId) -> Result<Outcome, CheckError> {
    let t = fam.quiver().tau(i);
    let (c, cp) = (cartan_q(fam, i, j), cartan_q(fam, t, j));
    let h = scalar(fam.h(i)?.clone());
    let b = fam.b_at(j, &var(Variable::V))?;
    let (u, v, hb) = (Poly::var(Variable::U), Poly::var(Variable::V), hbar_poly());
    let quad = u.mul(&u).add(&v.mul(&v).scale(&q(-1))).add(&hb.mul(&hb).scale(&(-(&c * &cp) / q(4))));
    let lin = hb.mul(&u).scale(&((&c - &cp) / q(2))).add(&hb.mul(&v).scale(&((&c + &cp) / q(2))));
    let (b0, b1) = (fam.b_mode(j, 0)?, fam.b_mode(j, 1)?);
    let parts = [
        h.commutator(&b).left_mul(&poly(quad)),
        h.anticommutator(&b).left_mul(&poly(lin)).neg(),
        h.commutator(&b1),
        h.commutator(&b0).left_mul(&poly(v)),
        h.anticommutator(&b0).left_mul(&poly(hb.scale(&((&c + &cp) / q(2))))),
    ];
    Ok(Outcome::Residual(DiffOperator::sum(parts.iter())))
}

/// `[H_{r+2},B_s] - [H_r,B_{s+2}] - (c-c')/2 hbar {H_{r+1},B_s}
///  - (c+c')/2 hbar {H_r,B_{s+1}} - c c'/4 hbar^2 [H_r,B_s]`.
pub(super) fn hb_modes(fam: &GkloFamily, i: VertexId, j: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    let t = fam.quiver().tau(i);
    let (c, cp) = (cartan_q(fam, i, j), cartan_q(fam, t, j));
    let hbar = poly(hbar_poly());
    let hbar2 = hbar.mul(&hbar);
    let lo = lowest_h(fam, i)?;
    let mut tuples = Vec::new();
    for r in lo..=max_mode as i64 {
        for s in 0..=max_mode {
            tuples.push((r, s));
        }
    }
    first_failure(tuples.into_iter().map(|(r, s)| {
        let h = |k: i64| -> Result<DiffOperator, CheckError> { Ok(scalar(fam.h_mode(i, k)?)) };
        let b = |k: u32| fam.b_mode(j, k);
        let parts = [
            h(r + 2)?.commutator(&b(s)?),
            h(r)?.commutator(&b(s + 2)?).neg(),
            h(r + 1)?.anticommutator(&b(s)?).left_mul(&hbar).scale(&(-(&c - &cp) / q(2))),
            h(r)?.anticommutator(&b(s + 1)?).left_mul(&hbar).scale(&(-(&c + &cp) / q(2))),
            h(r)?.commutator(&b(s)?).left_mul(&hbar2).scale(&(-(&c * &cp) / q(4))),
        ];
        Ok((format!("r={r},s={s}"), DiffOperator::sum(parts.iter())))
    }))
}

/// `(H_i(var))°`.
fn h_circ(fam: &GkloFamily, i: VertexId, v: Variable) -> Result<RationalFunction, CheckError> {
    Ok(fam.h_truncated(i, v)?)
}

/// The b-b generating identity, all terms moved to the left.
pub(super) fn bb(fam: &GkloFamily, i: VertexId, j: VertexId) -> Result<Outcome, CheckError> {
    let c = cartan_q(fam, i, j);
    let bi = fam.b(i)?;
    let bj = fam.b_at(j, &var(Variable::V))?;
    let (u, v) = (var(Variable::U), var(Variable::V));
    let hbar = poly(hbar_poly());
    let one = RationalFunction::one();
    let mut s = OpSum::new();
    s.add_commutator(&RationalFunction::linear(&(&u - &v)), bi, &bj);
    s.add_anticommutator(&hbar.scale(&(-&c / q(2))), bi, &bj);
    s.add_commutator(&one.neg(), &fam.b_mode(i, 0)?, &bj);
    s.add_commutator(&one, bi, &fam.b_mode(j, 0)?);
    if fam.quiver().tau(i) == j {
        let inv = RationalFunction::linear_power(&(&u + &v), -1)?.mul(&hbar);
        let two_u = RationalFunction::linear(&u.scale(&q(2))).mul(&inv);
        let two_v = RationalFunction::linear(&v.scale(&q(2))).mul(&inv);
        for p in fam.h_truncated_parts(i, Variable::U)? {
            s.add_scalar(two_u.mul(&p));
        }
        for p in fam.h_truncated_parts(j, Variable::V)? {
            s.add_scalar(two_v.mul(&p));
        }
    }
    Ok(Outcome::Residual(s.finish()))
}

/// `[B_{i,r+1},B_{j,s}] - [B_{i,r},B_{j,s+1}] - c/2 hbar {B_{i,r},B_{j,s}}
///  + 2 delta (-1)^r hbar H_{j,r+s+1}`.
pub(super) fn bb_modes(fam: &GkloFamily, i: VertexId, j: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    let c = cartan_q(fam, i, j);
    let hbar = poly(hbar_poly());
    let tau_pair = fam.quiver().tau(i) == j;
    let mut tuples = Vec::new();
    for r in 0..=max_mode {
        for s in 0..=max_mode {
            tuples.push((r, s));
        }
    }
    first_failure(tuples.into_iter().map(|(r, s)| {
        let (bi, bj) = (|k| fam.b_mode(i, k), |k| fam.b_mode(j, k));
        let one = RationalFunction::one();
        let mut sum = OpSum::new();
        sum.add_commutator(&one, &bi(r + 1)?, &bj(s)?);
        sum.add_commutator(&one.neg(), &bi(r)?, &bj(s + 1)?);
        sum.add_anticommutator(&hbar.scale(&(-&c / q(2))), &bi(r)?, &bj(s)?);
        if tau_pair {
            let h = fam.h_mode(j, (r + s + 1) as i64)?;
            sum.add_scalar(h.mul(&hbar).scale(&(parity(r as i64) * q(2))));
        }
        Ok((format!("r={r},s={s}"), sum.finish()))
    }))
}

fn skip_unless(cond: bool, why: impl FnOnce() -> String) -> Option<Outcome> {
    (!cond).then(|| Outcome::Skipped(why()))
}

fn wrong_cartan(fam: &GkloFamily, i: VertexId, j: VertexId, want: i64) -> String {
    format!("WrongCartanCase: c[{i},{j}] = {} (needs {want})", fam.quiver().cartan(i, j))
}

/// `(u+v)[B_i(u),B_j(v)] - delta hbar (H_j°(v) - H_i°(u))`, for `c_ij = 0`.
pub(super) fn comm_serre(fam: &GkloFamily, i: VertexId, j: VertexId) -> Result<Outcome, CheckError> {
    if let Some(s) = skip_unless(fam.quiver().cartan(i, j) == 0, || wrong_cartan(fam, i, j, 0)) {
        return Ok(s);
    }
    let (u, v) = (var(Variable::U), var(Variable::V));
    let bj = fam.b_at(j, &v)?;
    let mut parts = vec![fam.b(i)?.commutator(&bj).left_mul(&RationalFunction::linear(&(&u + &v)))];
    if fam.quiver().tau(i) == j {
        let d = h_circ(fam, j, Variable::V)?.sub(&h_circ(fam, i, Variable::U)?);
        parts.push(scalar(d.mul(&poly(hbar_poly())).neg()));
    }
    Ok(Outcome::Residual(DiffOperator::sum(parts.iter())))
}

/// `[B_{i,r},B_{j,s}] - delta (-1)^r hbar H_{j,r+s}`.
pub(super) fn comm_serre_modes(fam: &GkloFamily, i: VertexId, j: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    if let Some(s) = skip_unless(fam.quiver().cartan(i, j) == 0, || wrong_cartan(fam, i, j, 0)) {
        return Ok(s);
    }
    let tau_pair = fam.quiver().tau(i) == j;
    let hbar = poly(hbar_poly());
    let mut tuples = Vec::new();
    for r in 0..=max_mode {
        for s in 0..=max_mode {
            tuples.push((r, s));
        }
    }
    first_failure(tuples.into_iter().map(|(r, s)| {
        let mut res = fam.b_mode(i, r)?.commutator(&fam.b_mode(j, s)?);
        if tau_pair {
            let h = fam.h_mode(j, (r + s) as i64)?.mul(&hbar).scale(&parity(r as i64));
            res = res.sub(&scalar(h));
        }
        Ok((format!("r={r},s={s}"), res))
    }))
}

fn serre_guard(fam: &GkloFamily, i: VertexId, j: VertexId) -> Option<Outcome> {
    let t = fam.quiver().tau(i);
    if j == i || j == t {
        return Some(Outcome::Skipped(format!("WrongCartanCase: j = {j} is i or tau i")));
    }
    skip_unless(fam.quiver().cartan(i, j) == -1, || wrong_cartan(fam, i, j, -1))
}

/// `Sym_{u1,u2} [B_i(u1),[B_i(u2),B_j(v)]]`.
pub(super) fn usual_serre(fam: &GkloFamily, i: VertexId, j: VertexId) -> Result<Outcome, CheckError> {
    if let Some(s) = serre_guard(fam, i, j) {
        return Ok(s);
    }
    let b1 = fam.b_at(i, &var(Variable::U1))?;
    let b2 = fam.b_at(i, &var(Variable::U2))?;
    let bj = fam.b_at(j, &var(Variable::V))?;
    let a = b1.commutator(&b2.commutator(&bj));
    let b = b2.commutator(&b1.commutator(&bj));
    Ok(Outcome::Residual(a.add(&b)))
}

/// `Sym_{k1,k2} [B_{i,k1},[B_{i,k2},B_{j,r}]]` for `k1, k2 <= 2`.
pub(super) fn usual_serre_modes(fam: &GkloFamily, i: VertexId, j: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    if let Some(s) = serre_guard(fam, i, j) {
        return Ok(s);
    }
    let kmax = max_mode.min(2);
    let mut tuples = Vec::new();
    for k1 in 0..=kmax {
        for k2 in k1..=kmax {
            for r in 0..=max_mode {
                tuples.push((k1, k2, r));
            }
        }
    }
    first_failure(tuples.into_iter().map(|(k1, k2, r)| {
        let (a, b, c) = (fam.b_mode(i, k1)?, fam.b_mode(i, k2)?, fam.b_mode(j, r)?);
        let res = a.commutator(&b.commutator(&c)).add(&b.commutator(&a.commutator(&c)));
        Ok((format!("k1={k1},k2={k2},r={r}"), res))
    }))
}

fn iserre_guard(fam: &GkloFamily, i: VertexId) -> Option<Outcome> {
    let t = fam.quiver().tau(i);
    skip_unless(fam.quiver().cartan(i, t) == -1, || wrong_cartan(fam, i, t, -1))
}

/// `[B_{i,0},[B_{i,0},B_{tau i}(v)]] - (4 v hbar [B_i(3v), H_i(-v)])°`.
pub(super) fn iserre_zero(fam: &GkloFamily, i: VertexId) -> Result<Outcome, CheckError> {
    if let Some(s) = iserre_guard(fam, i) {
        return Ok(s);
    }
    let t = fam.quiver().tau(i);
    let v = var(Variable::V);
    let b0 = fam.b_mode(i, 0)?;
    let bt = fam.b_at(t, &v)?;
    let mut s = OpSum::new();
    s.add_product(&RationalFunction::one(), &[&b0, &b0, &bt]);
    s.add_product(&RationalFunction::integer(-2), &[&b0, &bt, &b0]);
    s.add_product(&RationalFunction::one(), &[&bt, &b0, &b0]);
    let b3 = fam.b_at(i, &v.scale(&q(3)))?;
    let h = scalar(fam.h_at(i, &-v.clone())?);
    let four_v_hbar = poly(Poly::var(Variable::V).mul(&hbar_poly()).scale(&q(4)));
    let mut rhs = OpSum::new();
    rhs.add_commutator(&four_v_hbar, &b3, &h);
    // truncation is additive, so it may act on each unreduced term
    let rhs = rhs.try_flat_map(|f| series::truncate_parts(f, Variable::V))?;
    s.extend_scaled(rhs, &q(-1));
    Ok(Outcome::Residual(s.finish()))
}

/// `Sym_{k1,k2} [B_{i,k1},[B_{i,k2},B_{tau i,r}]]
///  - 4/3 hbar Sym_{k1,k2} (-1)^{k1} sum_p 3^{-p} [B_{i,k2+p}, H_{tau i,k1+r-p}]`
/// for `k1, k2 <= 1`.
pub(super) fn iserre_modes(fam: &GkloFamily, i: VertexId, max_mode: u32) -> Result<Outcome, CheckError> {
    if let Some(s) = iserre_guard(fam, i) {
        return Ok(s);
    }
    let t = fam.quiver().tau(i);
    let lo = lowest_h(fam, t)?;
    let hbar = poly(hbar_poly());
    let mut tuples = Vec::new();
    for k1 in 0..=max_mode.min(1) {
        for k2 in k1..=max_mode.min(1) {
            for r in 0..=max_mode {
                tuples.push((k1, k2, r));
            }
        }
    }
    first_failure(tuples.into_iter().map(|(k1, k2, r)| {
        let mut s = OpSum::new();
        let bt = fam.b_mode(t, r)?;
        for (a, b) in [(k1, k2), (k2, k1)] {
            s.add_nested_commutator(&RationalFunction::one(), &fam.b_mode(i, a)?, &fam.b_mode(i, b)?, &bt);
            // H_{tau i, a+r-p} vanishes once a + r - p drops below the boundary
            let top = (a + r) as i64 - lo;
            let coeff = parity(a as i64) * qr(-4, 3);
            for p in 0..=top {
                let h = scalar(fam.h_mode(t, (a + r) as i64 - p)?);
                let weight = &coeff * qr(1, 3i64.pow(p as u32));
                s.add_commutator(&hbar.scale(&weight), &fam.b_mode(i, b + p as u32)?, &h);
            }
        }
        Ok((format!("k1={k1},k2={k2},r={r}"), s.finish()))
    }))
}
