//! The GKLO operators `y_{i,r}`, `B_i(z)`, `H_i(z)`, their modes, and the
//! commutation coefficients and residue formulas built from them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::diff::{DiffOperator, ShiftMonomial};
use crate::quiver::{FramedQuiver, QuiverError, VertexId};
use crate::series::{self, SeriesError};
use crate::symbolic::{q, qr, LinearForm, Poly, RationalFunction, SymbolicError, Variable, Q};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GkloError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("no scalar commutation relation between y[{i},{r}] and y[{j},{r}]")]
    NoScalarRelation { i: VertexId, j: VertexId, r: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Deliberate single-constant mutations used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Perturbation {
    /// `2x + 3hbar/2 -> 2x + hbar` in the tau-fixed-edge factor of `y`.
    TauFixedShift,
    /// Drops the `(2u/((2u - hbar/2)(2u + hbar/2)))^c` prefactor of `H`.
    DropHPrefactor,
    /// `x_{tau i, r} = +x_{i, r}` instead of `-x_{i, r}`.
    FlipSignRule,
}

impl Perturbation {
    pub const ALL: [Perturbation; 3] =
        [Perturbation::TauFixedShift, Perturbation::DropHPrefactor, Perturbation::FlipSignRule];

    pub fn name(self) -> &'static str {
        match self {
            Perturbation::TauFixedShift => "tau-fixed-shift",
            Perturbation::DropHPrefactor => "drop-h-prefactor",
            Perturbation::FlipSignRule => "flip-sign-rule",
        }
    }
}

/// Which pole of `H_i` next to `-x_{i,r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleSide {
    /// `u = -x_{i,r} - hbar/2`
    Lower,
    /// `u = -x_{i,r} + hbar/2`
    Upper,
}

pub const DEFAULT_MODE_CACHE: u32 = 6;

fn hbar(c: Q) -> LinearForm {
    LinearForm::hbar_times(c)
}

fn half() -> Q {
    qr(1, 2)
}

fn rf(f: &LinearForm) -> RationalFunction {
    RationalFunction::linear(f)
}

fn rf_pow(f: &LinearForm, e: i32) -> Result<RationalFunction, SymbolicError> {
    RationalFunction::linear_power(f, e)
}

fn sign(odd: bool) -> Q {
    if odd {
        q(-1)
    } else {
        q(1)
    }
}

/// The operators attached to a framed quiver with involution.
///
/// Immutable once built; mode coefficients are cached lazily.
pub struct GkloFamily {
    fq: FramedQuiver,
    perturbation: Option<Perturbation>,
    y: BTreeMap<(VertexId, u32), DiffOperator>,
    h: BTreeMap<VertexId, RationalFunction>,
    b: BTreeMap<VertexId, DiffOperator>,
    mode_cache: u32,
    b_modes: BTreeMap<VertexId, Vec<OnceLock<DiffOperator>>>,
    h_modes: BTreeMap<VertexId, Vec<OnceLock<Result<RationalFunction, GkloError>>>>,
    // truncation of H_i in `u`; other variables are substituted in
    h_trunc: BTreeMap<VertexId, OnceLock<Result<Vec<RationalFunction>, GkloError>>>,
}

impl std::fmt::Debug for GkloFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GkloFamily").field("perturbation", &self.perturbation).finish_non_exhaustive()
    }
}

impl GkloFamily {
    pub fn new(fq: FramedQuiver) -> Result<Self, GkloError> {
        Self::build(fq, None, DEFAULT_MODE_CACHE)
    }

    pub fn with_perturbation(fq: FramedQuiver, p: Perturbation) -> Result<Self, GkloError> {
        Self::build(fq, Some(p), DEFAULT_MODE_CACHE)
    }

    /// `mode_cache` extra modes are cached above the boundary mode of `H`
    /// (and from zero for `B`).
    pub fn build(fq: FramedQuiver, perturbation: Option<Perturbation>, mode_cache: u32) -> Result<Self, GkloError> {
        let mut fam = GkloFamily {
            fq,
            perturbation,
            y: BTreeMap::new(),
            h: BTreeMap::new(),
            b: BTreeMap::new(),
            mode_cache,
            b_modes: BTreeMap::new(),
            h_modes: BTreeMap::new(),
            h_trunc: BTreeMap::new(),
        };
        let u = LinearForm::var(Variable::U);
        for i in fam.fq.vertices().to_vec() {
            for r in 1..=fam.fq.v(i) {
                let y = fam.build_y(i, r)?;
                fam.y.insert((i, r), y);
            }
        }
        for i in fam.fq.vertices().to_vec() {
            let h = fam.h_at(i, &u)?;
            let b = fam.b_at(i, &u)?;
            fam.h.insert(i, h);
            fam.b.insert(i, b);
            let mu = fam.fq.mu_pairing(i)?;
            // H modes from -<alpha_i, mu> - 1 up to <alpha_i, mu> + mode_cache - 1
            let h_len = (2 * mu + mode_cache as i64 + 1).max(0) as usize;
            fam.b_modes.insert(i, (0..=mode_cache).map(|_| OnceLock::new()).collect());
            fam.h_modes.insert(i, (0..h_len).map(|_| OnceLock::new()).collect());
            fam.h_trunc.insert(i, OnceLock::new());
        }
        Ok(fam)
    }

    pub fn quiver(&self) -> &FramedQuiver {
        &self.fq
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        self.perturbation
    }

    /// `x_{i,r}` with the sign rule (or its perturbation) applied.
    pub fn x(&self, i: VertexId, r: u32) -> LinearForm {
        if self.perturbation == Some(Perturbation::FlipSignRule) && !self.fq.is_positive(i) {
            -self.fq.x(i, r)
        } else {
            self.fq.x(i, r)
        }
    }

    pub fn shift(&self, i: VertexId, r: u32, e: i32) -> ShiftMonomial {
        ShiftMonomial::of_vertex(&self.fq, i, r, e)
    }

    /// Linear factors `z - x_{i,k}` of `V_i(z)`, skipping slot `skip`.
    fn v_factors(&self, i: VertexId, z: &LinearForm, skip: Option<u32>) -> Vec<LinearForm> {
        (1..=self.fq.v(i)).filter(|k| Some(*k) != skip).map(|k| z - &self.x(i, k)).collect()
    }

    fn w_factors(&self, i: VertexId, z: &LinearForm) -> Vec<LinearForm> {
        (1..=self.fq.w(i)).map(|k| z - &self.fq.w_var(i, k)).collect()
    }

    /// `V_i(z)` as a polynomial.
    pub fn build_v(&self, i: VertexId, z: &LinearForm) -> Result<Poly, GkloError> {
        self.fq.check_vertex(i)?;
        Ok(Poly::product_of_linear(self.v_factors(i, z, None).iter().map(|f| (f, 1))))
    }

    /// `W_i(z)` as a polynomial.
    pub fn build_w(&self, i: VertexId, z: &LinearForm) -> Result<Poly, GkloError> {
        self.fq.check_vertex(i)?;
        Ok(Poly::product_of_linear(self.w_factors(i, z).iter().map(|f| (f, 1))))
    }

    /// `V_{i,r}(z) = V_i(z)/(z - x_{i,r})`.
    pub fn build_v_punctured(&self, i: VertexId, r: u32, z: &LinearForm) -> Result<Poly, GkloError> {
        self.fq.check_slot(i, r)?;
        Ok(Poly::product_of_linear(self.v_factors(i, z, Some(r)).iter().map(|f| (f, 1))))
    }

    fn product(factors: &[LinearForm], e: i32) -> Result<RationalFunction, SymbolicError> {
        RationalFunction::product_of_powers(factors.iter().map(|f| (f, e)))
    }

    /// The coefficient of `y_{i,r}` in front of its shift.
    fn y_coefficient(&self, i: VertexId, r: u32) -> Result<RationalFunction, GkloError> {
        let x = self.x(i, r);
        let x_half = &x + &hbar(half());
        let mut acc = RationalFunction::one();
        for e in self.fq.out_edges(i) {
            if e.tau_fixed {
                let c = if self.perturbation == Some(Perturbation::TauFixedShift) { q(1) } else { qr(3, 2) };
                acc = acc.mul(&rf(&(x.scale(&q(2)) + hbar(c))));
            }
            acc = acc.mul(&Self::product(&self.v_factors(e.target, &x_half, None), 1)?);
        }
        acc = acc.mul(&Self::product(&self.w_factors(self.fq.tau(i), &-x_half.clone()), 1)?);
        acc = acc.mul(&Self::product(&self.v_factors(i, &x, Some(r)), -1)?);
        Ok(acc)
    }

    fn build_y(&self, i: VertexId, r: u32) -> Result<DiffOperator, GkloError> {
        Ok(DiffOperator::term(self.y_coefficient(i, r)?, self.shift(i, r, 1)))
    }

    pub fn y(&self, i: VertexId, r: u32) -> Result<&DiffOperator, GkloError> {
        self.fq.check_slot(i, r)?;
        Ok(&self.y[&(i, r)])
    }

    /// `H_i(z)` for an arbitrary linear argument `z`.
    pub fn h_at(&self, i: VertexId, z: &LinearForm) -> Result<RationalFunction, GkloError> {
        self.fq.check_vertex(i)?;
        let t = self.fq.tau(i);
        let c = self.fq.cartan(i, t) as i32;
        let odd = (self.fq.v(i) as i64 - 1 + self.fq.delta_arrow(i) as i64).rem_euclid(2) == 1;
        let mut acc = RationalFunction::constant(sign(odd));
        if self.perturbation != Some(Perturbation::DropHPrefactor) && c != 0 {
            let two_z = z.scale(&q(2));
            acc = acc
                .mul(&rf_pow(&two_z, c)?)
                .mul(&rf_pow(&(&two_z - &hbar(half())), -c)?)
                .mul(&rf_pow(&(&two_z + &hbar(half())), -c)?);
        }
        let neg_z = -z.clone();
        acc = acc.mul(&Self::product(&self.w_factors(i, &neg_z), 1)?);
        acc = acc.mul(&Self::product(&self.w_factors(t, z), 1)?);
        acc = acc.mul(&Self::product(&self.v_factors(i, &(&neg_z + &hbar(half())), None), -1)?);
        acc = acc.mul(&Self::product(&self.v_factors(i, &(&neg_z - &hbar(half())), None), -1)?);
        for e in self.fq.out_edges(i) {
            acc = acc.mul(&Self::product(&self.v_factors(e.target, &neg_z, None), 1)?);
        }
        for e in self.fq.out_edges(t) {
            acc = acc.mul(&Self::product(&self.v_factors(e.target, z, None), 1)?);
        }
        Ok(acc)
    }

    /// `H_i(u)`.
    pub fn h(&self, i: VertexId) -> Result<&RationalFunction, GkloError> {
        self.fq.check_vertex(i)?;
        Ok(&self.h[&i])
    }

    /// `B_i(z) = sum_r y_{i,r} / (-z - x_{i,r} - hbar/2)`.
    pub fn b_at(&self, i: VertexId, z: &LinearForm) -> Result<DiffOperator, GkloError> {
        self.fq.check_vertex(i)?;
        let mut parts = Vec::new();
        for r in 1..=self.fq.v(i) {
            let pole = -z.clone() - self.x(i, r) - hbar(half());
            let y = self.build_y_cached(i, r)?;
            parts.push(y.left_mul(&rf_pow(&pole, -1)?));
        }
        Ok(DiffOperator::sum(parts.iter()))
    }

    fn build_y_cached(&self, i: VertexId, r: u32) -> Result<DiffOperator, GkloError> {
        match self.y.get(&(i, r)) {
            Some(y) => Ok(y.clone()),
            None => self.build_y(i, r),
        }
    }

    /// `B_i(u)`.
    pub fn b(&self, i: VertexId) -> Result<&DiffOperator, GkloError> {
        self.fq.check_vertex(i)?;
        Ok(&self.b[&i])
    }

    /// `B_{i,m}`, the coefficient of `u^{-m-1}` of `B_i(u)`.
    pub fn b_mode(&self, i: VertexId, m: u32) -> Result<DiffOperator, GkloError> {
        let b = self.b(i)?;
        let compute = || series::series_coeff_at_infinity_op(b, Variable::U, m);
        match self.b_modes[&i].get(m as usize) {
            Some(cell) => Ok(cell.get_or_init(compute).clone()),
            None => Ok(compute()),
        }
    }

    /// `-sum_r (-x_{i,r} - hbar/2)^m y_{i,r}`, the mode read off the poles.
    pub fn b_mode_from_poles(&self, i: VertexId, m: u32) -> Result<DiffOperator, GkloError> {
        self.fq.check_vertex(i)?;
        let mut parts = Vec::new();
        for r in 1..=self.fq.v(i) {
            let base = -self.x(i, r) - hbar(half());
            let coeff = rf_pow(&base, m as i32)?.neg();
            parts.push(self.y(i, r)?.left_mul(&coeff));
        }
        Ok(DiffOperator::sum(parts.iter()))
    }

    /// `H_{i,r}`, the coefficient of `u^{-r-1}` of `H_i(u)`.
    ///
    /// Zero below the boundary index `-<alpha_i, mu> - 1`; a non-polynomial
    /// coefficient is an error.
    pub fn h_mode(&self, i: VertexId, r: i64) -> Result<RationalFunction, GkloError> {
        let mu = self.fq.mu_pairing(i)?;
        let lowest = -mu - 1;
        if r < lowest {
            return Ok(RationalFunction::zero());
        }
        let compute = || -> Result<RationalFunction, GkloError> {
            let c = series::laurent_coeff(&self.h[&i], Variable::U, -r - 1);
            series::as_polynomial(&c)?;
            Ok(c)
        };
        match self.h_modes[&i].get((r - lowest) as usize) {
            Some(cell) => cell.get_or_init(compute).clone(),
            None => compute(),
        }
    }

    /// Highest cached mode index of `H_i`.
    pub fn h_mode_cache_top(&self, i: VertexId) -> i64 {
        let mu = self.fq.mu_pairing(i).unwrap_or(0);
        -mu - 1 + self.h_modes.get(&i).map_or(0, |v| v.len() as i64) - 1
    }

    pub fn mode_cache(&self) -> u32 {
        self.mode_cache
    }

    /// `C_{i,j,r,s}` in the compact form, so that `y_{j,s} y_{i,r} = C y_{i,r} y_{j,s}`.
    pub fn c_coeff(&self, i: VertexId, j: VertexId, r: u32, s: u32) -> Result<RationalFunction, GkloError> {
        self.fq.check_slot(i, r)?;
        self.fq.check_slot(j, s)?;
        if r == s && j == i {
            return Ok(RationalFunction::one());
        }
        if r == s && j == self.fq.tau(i) {
            return Err(GkloError::NoScalarRelation { i, j, r });
        }
        let c = Q::from_integer(self.fq.cartan(i, j).into());
        let diff = self.x(i, r) - self.x(j, s);
        let num = &diff + &hbar(&c * half());
        let den = &diff - &hbar(&c * half());
        Ok(rf(&num).mul(&rf_pow(&den, -1)?))
    }

    /// `C_{i,j,r,s}` from the case table.
    pub fn c_coeff_table(&self, i: VertexId, j: VertexId, r: u32, s: u32) -> Result<RationalFunction, GkloError> {
        self.fq.check_slot(i, r)?;
        self.fq.check_slot(j, s)?;
        let t = self.fq.tau(i);
        let (xr, xs) = (self.x(i, r), self.x(j, s));
        if j == i {
            if r == s {
                return Ok(RationalFunction::one());
            }
            let d = &xr - &xs;
            return Ok(rf(&(&d + &hbar(q(1)))).mul(&rf_pow(&(&d - &hbar(q(1))), -1)?));
        }
        if j == t {
            if r == s {
                return Err(GkloError::NoScalarRelation { i, j, r });
            }
            let xs_i = self.x(i, s);
            let sum = &xr + &xs_i;
            let e = -(self.fq.cartan(i, t) as i32);
            let ratio = rf(&(&sum - &hbar(half()))).mul(&rf_pow(&(&sum + &hbar(half())), -1)?);
            return Ok(ratio.pow(e)?);
        }
        let d = &xr - &xs;
        let e = -(self.fq.cartan(i, j) as i32);
        let ratio = rf(&(&d - &hbar(half()))).mul(&rf_pow(&(&d + &hbar(half())), -1)?);
        Ok(ratio.pow(e)?)
    }

    /// `D_{i,j,s}(z)` in the unified form, so that `y_{j,s} H_i(z) = D H_i(z) y_{j,s}`.
    pub fn d_coeff(&self, i: VertexId, j: VertexId, s: u32, z: &LinearForm) -> Result<RationalFunction, GkloError> {
        self.fq.check_vertex(i)?;
        self.fq.check_slot(j, s)?;
        let t = self.fq.tau(i);
        let cij = Q::from_integer(self.fq.cartan(i, j).into());
        let ctj = Q::from_integer(self.fq.cartan(t, j).into());
        let one = q(1);
        let xs = self.x(j, s);
        let a = z + &xs;
        let b = z - &xs;
        let f1 = rf(&(&a + &hbar((&one - &cij) * half()))).mul(&rf_pow(&(&a + &hbar((&one + &cij) * half())), -1)?);
        let f2 = rf(&(&b - &hbar((&one - &ctj) * half()))).mul(&rf_pow(&(&b - &hbar((&one + &ctj) * half())), -1)?);
        Ok(f1.mul(&f2))
    }

    /// `D_{i,j,s}(z)` from the case table.
    pub fn d_coeff_table(&self, i: VertexId, j: VertexId, s: u32, z: &LinearForm) -> Result<RationalFunction, GkloError> {
        self.fq.check_vertex(i)?;
        self.fq.check_slot(j, s)?;
        let t = self.fq.tau(i);
        let ratio = |num: LinearForm, den: LinearForm, e: i32| -> Result<RationalFunction, GkloError> {
            Ok(rf(&num).mul(&rf_pow(&den, -1)?).pow(e)?)
        };
        if j == i || j == t {
            let xs = self.x(i, s);
            let e = -(self.fq.cartan(i, t) as i32);
            let (sh, lo, hi) = if j == i { (q(-1), qr(-1, 2), qr(3, 2)) } else { (q(1), qr(1, 2), qr(-3, 2)) };
            let first = ratio(z - &xs + hbar(sh), z - &xs, e)?;
            let second = ratio(z + &xs + hbar(lo), z + &xs + hbar(hi), 1)?;
            return Ok(first.mul(&second));
        }
        let xs = self.x(j, s);
        let first = ratio(z + &xs + hbar(q(1)), z + &xs, -(self.fq.cartan(i, j) as i32))?;
        let second = ratio(z - &xs - hbar(q(1)), z - &xs, -(self.fq.cartan(t, j) as i32))?;
        Ok(first.mul(&second))
    }

    /// The location of the pole `-x_{i,r} -+ hbar/2` of `H_i(u)`.
    pub fn h_pole(&self, i: VertexId, r: u32, side: PoleSide) -> LinearForm {
        let off = match side {
            PoleSide::Lower => qr(-1, 2),
            PoleSide::Upper => half(),
        };
        -self.x(i, r) + hbar(off)
    }

    /// `Res_{u = -x_{i,r} -+ hbar/2} H_i(u)` as given by the residue formula.
    pub fn h_residue(&self, i: VertexId, r: u32, side: PoleSide) -> Result<DiffOperator, GkloError> {
        self.fq.check_slot(i, r)?;
        let t = self.fq.tau(i);
        let e = -(self.fq.cartan(i, t) as i32);
        let m2x = self.x(i, r).scale(&q(-2));
        let (y_i, y_t) = (self.y(i, r)?, self.y(t, r)?);
        let inv_hbar = rf_pow(&LinearForm::hbar(), -1)?;
        let (num, den, sign, product) = match side {
            PoleSide::Lower => (&m2x - &hbar(half()), &m2x - &hbar(q(1)), q(-1), y_i.mul(y_t)),
            PoleSide::Upper => (&m2x + &hbar(half()), &m2x + &hbar(q(1)), q(1), y_t.mul(y_i)),
        };
        let factor = rf(&num).mul(&rf_pow(&den, -1)?).pow(e)?.mul(&inv_hbar).scale(&sign);
        Ok(product.left_mul(&factor))
    }

    /// `(1/(2 hbar^2)) (2x + 3hbar/2)/(2x + 3hbar) d_{i,r} y_{i,r} y_{tau i,r} d_{i,r}^{-1}`.
    pub fn h_special(&self, i: VertexId, r: u32) -> Result<DiffOperator, GkloError> {
        self.fq.check_slot(i, r)?;
        let t = self.fq.tau(i);
        if self.fq.cartan(i, t) != -1 {
            return Err(GkloError::Precondition(format!("c[{i},{t}] != -1")));
        }
        let x2 = self.x(i, r).scale(&q(2));
        let factor = rf(&(&x2 + &hbar(qr(3, 2))))
            .mul(&rf_pow(&(&x2 + &hbar(q(3))), -1)?)
            .mul(&rf_pow(&LinearForm::hbar(), -2)?)
            .scale(&half());
        let inner = self.y(i, r)?.mul(self.y(t, r)?);
        Ok(inner.conjugate(&self.shift(i, r, 1)).left_mul(&factor))
    }

    /// The unified formula for `(2 u hbar H_i(u))°`.
    pub fn two_uh_truncated(&self, i: VertexId) -> Result<DiffOperator, GkloError> {
        self.fq.check_vertex(i)?;
        let t = self.fq.tau(i);
        let c = Q::from_integer(self.fq.cartan(i, t).into());
        let u = LinearForm::var(Variable::U);
        let shift = q(1) + &c * half();
        let mut parts = Vec::new();
        for r in 1..=self.fq.v(i) {
            let m2x = self.x(i, r).scale(&q(-2));
            let up = rf(&(&m2x + &hbar(shift.clone()))).mul(&rf_pow(&(&u + &self.x(i, r) - hbar(half())), -1)?);
            let lo = rf(&(&m2x - &hbar(shift.clone()))).mul(&rf_pow(&(&u + &self.x(i, r) + hbar(half())), -1)?);
            parts.push(self.y(t, r)?.mul(self.y(i, r)?).left_mul(&up));
            parts.push(self.y(i, r)?.mul(self.y(t, r)?).left_mul(&lo.neg()));
        }
        Ok(DiffOperator::sum(parts.iter()))
    }

    /// The `c_{i,tau i} = 0` formula for `hbar (H_i(u))°`.
    pub fn hbar_h_truncated(&self, i: VertexId) -> Result<DiffOperator, GkloError> {
        self.fq.check_vertex(i)?;
        let t = self.fq.tau(i);
        if self.fq.cartan(i, t) != 0 {
            return Err(GkloError::Precondition(format!("c[{i},{t}] != 0")));
        }
        let u = LinearForm::var(Variable::U);
        let mut parts = Vec::new();
        for r in 1..=self.fq.v(i) {
            let up = rf_pow(&(&u + &self.x(i, r) - hbar(half())), -1)?;
            let lo = rf_pow(&(&u + &self.x(i, r) + hbar(half())), -1)?;
            parts.push(self.y(t, r)?.mul(self.y(i, r)?).left_mul(&up));
            parts.push(self.y(i, r)?.mul(self.y(t, r)?).left_mul(&lo.neg()));
        }
        Ok(DiffOperator::sum(parts.iter()))
    }

    /// `(H_i(var))°` as an operator in the variable `var`.
    pub fn h_truncated(&self, i: VertexId, var: Variable) -> Result<RationalFunction, GkloError> {
        Ok(RationalFunction::sum(self.h_truncated_parts(i, var)?.iter()))
    }

    /// The per-pole summands of [`Self::h_truncated`].
    pub fn h_truncated_parts(&self, i: VertexId, var: Variable) -> Result<Vec<RationalFunction>, GkloError> {
        self.fq.check_vertex(i)?;
        let in_u = self.h_trunc[&i]
            .get_or_init(|| {
                let h = self.h_at(i, &LinearForm::var(Variable::U))?;
                Ok(series::truncate_parts(&h, Variable::U)?)
            })
            .clone()?;
        if var == Variable::U {
            return Ok(in_u);
        }
        let image = LinearForm::var(var);
        Ok(in_u.iter().map(|p| p.substitute_var(Variable::U, &image)).collect::<Result<_, _>>()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DimensionData, QuiverWithInvolution};

    fn family(n: u32, v: &[u32], w: &[u32]) -> GkloFamily {
        let raw = QuiverWithInvolution::aiii(n).unwrap();
        let dims = DimensionData::from_lists(&raw.vertices, v, w);
        GkloFamily::new(FramedQuiver::new(raw, dims).unwrap()).unwrap()
    }

    #[test]
    fn y_on_the_two_vertex_quiver() {
        // y_{1,1} = (2x + 3hbar/2)(2x + hbar/2)(-x - hbar/2 - w_{2,1}) d_{1,1}
        let fam = family(1, &[1, 1], &[1, 1]);
        let x = fam.x(1, 1);
        let w = fam.quiver().w_var(2, 1);
        let coeff = rf(&(x.scale(&q(2)) + hbar(qr(3, 2))))
            .mul(&rf(&(x.scale(&q(2)) + hbar(half()))))
            .mul(&rf(&(-x.clone() - hbar(half()) - w)));
        let expect = DiffOperator::term(coeff, fam.shift(1, 1, 1));
        assert!(fam.y(1, 1).unwrap().equals(&expect));
    }

    #[test]
    fn v_polynomials() {
        let fam = family(1, &[2, 2], &[0, 0]);
        let z = LinearForm::var(Variable::U);
        let p = fam.build_v_punctured(1, 1, &z).unwrap();
        assert_eq!(p, Poly::from_linear(&(&z - &fam.x(1, 2))));
        let p2 = fam.build_v(2, &z).unwrap();
        let expect = Poly::from_linear(&(&z + &fam.x(1, 1))).mul(&Poly::from_linear(&(&z + &fam.x(1, 2))));
        assert_eq!(p2, expect);
        let empty = family(1, &[0, 0], &[0, 0]);
        assert_eq!(empty.build_v(1, &z).unwrap(), Poly::one());
        assert!(empty.b(1).unwrap().is_zero());
    }

    #[test]
    fn boundary_mode_is_hbar_zeta() {
        let fam = family(1, &[1, 1], &[1, 1]);
        for i in [1, 2] {
            let mu = fam.quiver().mu_pairing(i).unwrap();
            let lead = fam.h_mode(i, -mu - 1).unwrap();
            assert_eq!(lead.as_constant(), Some(fam.quiver().zeta(i).unwrap().value()));
        }
    }

    #[test]
    fn c_no_scalar_case() {
        let fam = family(1, &[1, 1], &[0, 0]);
        assert!(matches!(fam.c_coeff(1, 2, 1, 1), Err(GkloError::NoScalarRelation { .. })));
        assert!(fam.c_coeff(1, 1, 1, 1).unwrap().equals(&RationalFunction::one()));
    }
}
