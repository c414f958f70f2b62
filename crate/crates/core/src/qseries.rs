//! Truncated q-series with exponents on the lattice `(1/8)Z`.
//!
//! Exponents are stored as integers counting eighths, so `q^{1/2}` is
//! exponent 4 and `q^1` is exponent 8. A series of order `N` carries every
//! exponent `< N` exactly; multiplication keeps the smaller order of its
//! operands. Coefficients are either exact rationals or [`Form`]s.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formring::{Form, Ring};
use crate::rational::{self, Rational};

/// Eighths per unit power of `q`.
pub const EIGHTHS: i64 = 8;

/// Exact coefficient ring of a [`QSeries`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Whatever is needed to build a zero or one of this kind.
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn vanishes(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scaled(&self, r: &Rational) -> Self;
    fn inverse(&self) -> Option<Self>;
}

impl Coefficient for Rational {
    type Ctx = ();

    fn zero_in(_: &()) -> Self {
        <Rational as Zero>::zero()
    }
    fn one_in(_: &()) -> Self {
        <Rational as One>::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rational) -> Self {
        self * r
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Coefficient for Form {
    type Ctx = Ring;

    fn zero_in(ring: &Ring) -> Self {
        Form::zero(ring)
    }
    fn one_in(ring: &Ring) -> Self {
        Form::one(ring)
    }
    fn vanishes(&self) -> bool {
        Form::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        Form::neg(self)
    }
    fn scaled(&self, r: &Rational) -> Self {
        Form::scale(self, r)
    }
    fn inverse(&self) -> Option<Self> {
        self.invert_unit().ok()
    }
}

#[derive(Clone, PartialEq)]
pub struct QSeries<C: Coefficient> {
    ctx: C::Ctx,
    terms: BTreeMap<i64, C>,
    order: i64,
}

impl<C: Coefficient> QSeries<C> {
    pub fn zero(ctx: &C::Ctx, order: i64) -> Self {
        QSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn one(ctx: &C::Ctx, order: i64) -> Self {
        Self::monomial(ctx, 0, C::one_in(ctx), order)
    }

    /// `coeff * q^(exponent/8)`.
    pub fn monomial(ctx: &C::Ctx, exponent: i64, coeff: C, order: i64) -> Self {
        let mut s = Self::zero(ctx, order);
        s.add_term(exponent, coeff);
        s
    }

    pub fn from_terms(ctx: &C::Ctx, terms: impl IntoIterator<Item = (i64, C)>, order: i64) -> Self {
        let mut s = Self::zero(ctx, order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    fn add_term(&mut self, e: i64, c: C) {
        if e >= self.order || c.vanishes() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old.plus(&c);
                if !s.vanishes() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    /// Truncation bound in eighths: every exponent below it is exact.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn floor(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `q^(e/8)`; zero if absent.
    pub fn coefficient(&self, e: i64) -> Result<C> {
        if e >= self.order {
            return Err(Error::OutOfRange {
                exponent: e,
                order: self.order,
            });
        }
        Ok(self
            .terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| C::zero_in(&self.ctx)))
    }

    /// Lower the truncation bound.
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        QSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .range(..order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            order,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (e, c) in other.terms.range(..order) {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.negate())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Self::zero(&self.ctx, self.order);
        }
        self.map(|c| c.scaled(r))
    }

    /// Multiply every coefficient by the same ring element.
    pub fn scale_coeff(&self, k: &C) -> Self {
        let mut out = Self::zero(&self.ctx, self.order);
        for (e, c) in &self.terms {
            out.add_term(*e, c.times(k));
        }
        out
    }

    /// Apply `f` to every coefficient, dropping zeros.
    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(&self.ctx, self.order);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    /// Change coefficient kind.
    pub fn map_into<D: Coefficient>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> QSeries<D> {
        let mut out = QSeries::zero(ctx, self.order);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= order {
                    // exponents are sorted, later eb only grow
                    break;
                }
                let p = ca.times(cb);
                match acc.remove(&e) {
                    Some(old) => {
                        acc.insert(e, old.plus(&p));
                    }
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.vanishes());
        Ok(QSeries {
            ctx: self.ctx.clone(),
            terms: acc,
            order,
        })
    }

    /// Integer power; negative powers go through [`QSeries::invert_unit`].
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.invert_unit()?.pow(-k);
        }
        let mut acc = Self::one(&self.ctx, self.order);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Two-sided inverse. The lowest coefficient must be invertible; a
    /// series with floor `f` and order `N` inverts to floor `-f`, order `N - 2f`.
    pub fn invert_unit(&self) -> Result<Self> {
        let (f, lead) = match self.terms.iter().next() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::NotInvertible("zero series".into())),
        };
        let lead_inv = lead
            .inverse()
            .ok_or_else(|| Error::NotInvertible(format!("leading coefficient at q^({f}/8)")))?;
        let order = self.order - 2 * f;
        // self = lead q^f (1 - w);  inverse = lead^-1 q^-f sum w^k
        let w_order = self.order - f;
        let mut w = Self::zero(&self.ctx, w_order);
        for (e, c) in self.terms.range(f + 1..) {
            w.add_term(e - f, c.times(&lead_inv).negate());
        }
        let mut sum = Self::one(&self.ctx, w_order);
        let mut power = Self::one(&self.ctx, w_order);
        loop {
            power = power.mul(&w)?;
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power)?;
        }
        let mut out = Self::zero(&self.ctx, order);
        for (e, c) in &sum.terms {
            out.add_term(e - f, c.times(&lead_inv));
        }
        Ok(out)
    }

    /// The action of `tau -> tau + 1` on a series supported on the
    /// half-integer lattice: `q^{m/2}` picks up `(-1)^m`.
    pub fn t_shift(&self) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.order);
        for (e, c) in &self.terms {
            if e % 4 != 0 {
                return Err(Error::OffHalfLattice(*e));
            }
            let c = if (e / 4) % 2 != 0 {
                c.negate()
            } else {
                c.clone()
            };
            out.add_term(*e, c);
        }
        Ok(out)
    }

    /// True when every exponent is a multiple of `q^{1/2}`.
    pub fn on_half_lattice(&self) -> bool {
        self.terms.keys().all(|e| e % 4 == 0)
    }
}

impl QSeries<Rational> {
    /// Promote to a form-valued series with constant coefficients.
    pub fn to_forms(&self, ring: &Ring) -> QSeries<Form> {
        self.map_into(ring, |c| Form::constant(ring, c.clone()))
    }
}

impl QSeries<Form> {
    /// Homogeneous degree-`n` part of every coefficient.
    pub fn component(&self, n: i32) -> Self {
        self.map(|f| f.component(n))
    }

    /// Degree-`n` part of `self * other`, skipping every other degree.
    pub fn mul_component(&self, other: &Self, n: i32) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.ctx, order);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                if ea + eb >= order {
                    break;
                }
                out.add_term(ea + eb, ca.mul_component(cb, n)?);
            }
        }
        Ok(out)
    }

    /// `sum_k a^k / k!` for a series whose coefficients are all nilpotent
    /// (no terms of degree `<= 0`). The sum stops once `a^k` truncates to
    /// zero.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        self.exp_nilpotent_terms().map(|(s, _)| s)
    }

    /// Like [`QSeries::exp_nilpotent`], also returning how many powers
    /// (including `a^0`) were nonzero.
    pub fn exp_nilpotent_terms(&self) -> Result<(Self, usize)> {
        for (e, c) in &self.terms {
            if c.min_degree().is_some_and(|d| d <= 0) {
                return Err(Error::NotNilpotent(format!(
                    "coefficient of q^({e}/8) has terms of degree <= 0"
                )));
            }
        }
        let mut sum = Self::one(&self.ctx, self.order);
        let mut power = Self::one(&self.ctx, self.order);
        let mut k = 0u32;
        let mut count = 1;
        loop {
            k += 1;
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            count += 1;
            sum = sum.add(&power.scale(&rational::inv_factorial(k)))?;
        }
        Ok((sum, count))
    }
}

impl<C: Coefficient> fmt::Debug for QSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[order {}/8]{{", self.order)?;
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {:?}", exponent_label(*e), c)?;
        }
        write!(f, "}}")
    }
}

/// `q^0`, `q^{1/2}`, `q^{9/8}`, `q^2`, ...
pub fn exponent_label(e: i64) -> String {
    let g = num_integer::gcd(e.abs(), EIGHTHS).max(1);
    let (n, d) = (e / g, EIGHTHS / g);
    if d == 1 {
        format!("q^{n}")
    } else {
        format!("q^{{{n}/{d}}}")
    }
}

/// Exponent in eighths from a count of `q^{1/2}` steps.
pub const fn half(m: i64) -> i64 {
    4 * m
}

/// Exponent in eighths from whole powers of `q`.
pub const fn whole(n: i64) -> i64 {
    8 * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formring::{Monomial, RingSpec, Variable};
    use crate::rational::{frac, int};

    type RS = QSeries<Rational>;

    fn series(terms: &[(i64, i64)], order: i64) -> RS {
        RS::from_terms(&(), terms.iter().map(|(e, c)| (*e, int(*c))), order)
    }

    #[test]
    fn half_power_product() {
        let a = series(&[(0, 1), (4, 1)], 40);
        let b = series(&[(0, 1), (4, -1)], 40);
        assert_eq!(a.mul(&b).unwrap(), series(&[(0, 1), (8, -1)], 40));
    }

    #[test]
    fn geometric_inverse() {
        let a = series(&[(0, 1), (8, -1)], 40);
        let inv = a.invert_unit().unwrap();
        assert_eq!(
            inv,
            series(&[(0, 1), (8, 1), (16, 1), (24, 1), (32, 1)], 40)
        );
        assert_eq!(a.mul(&inv).unwrap(), RS::one(&(), 40));
        assert_eq!(inv.mul(&a).unwrap(), RS::one(&(), 40));
    }

    #[test]
    fn shifted_inverse() {
        // (2 q^{1/2} + q)^-1 = q^{-1/2}/2 * (1 - q^{1/2}/2 + q/4 - ...)
        let a = series(&[(4, 2), (8, 1)], 40);
        let inv = a.invert_unit().unwrap();
        assert_eq!(inv.floor(), Some(-4));
        assert_eq!(inv.coefficient(-4).unwrap(), frac(1, 2));
        assert_eq!(inv.coefficient(0).unwrap(), frac(-1, 4));
        let p = a.mul(&inv).unwrap();
        assert_eq!(p.truncate(32), RS::one(&(), 32));
    }

    #[test]
    fn non_invertible() {
        assert!(RS::zero(&(), 8).invert_unit().is_err());
    }

    #[test]
    fn coefficient_lookup() {
        let a = series(&[(0, 1), (8, -1)], 24);
        assert_eq!(a.coefficient(16).unwrap(), int(0));
        assert_eq!(
            a.coefficient(24).unwrap_err(),
            Error::OutOfRange {
                exponent: 24,
                order: 24
            }
        );
    }

    #[test]
    fn floors_add_under_multiplication() {
        let a = series(&[(4, 1), (8, 3)], 40);
        let b = series(&[(1, 2), (9, 1)], 40);
        assert_eq!(a.mul(&b).unwrap().floor(), Some(5));
    }

    #[test]
    fn t_shift_rules() {
        let a = series(&[(0, 1), (4, 3), (8, 5), (12, 7)], 40);
        let s = a.t_shift().unwrap();
        assert_eq!(s, series(&[(0, 1), (4, -3), (8, 5), (12, -7)], 40));
        assert_eq!(s.t_shift().unwrap(), a);
        assert_eq!(
            series(&[(1, 1)], 8).t_shift().unwrap_err(),
            Error::OffHalfLattice(1)
        );
    }

    #[test]
    fn powers() {
        let a = series(&[(0, 1), (4, 1)], 24);
        let cube = a.pow(3).unwrap();
        assert_eq!(cube, series(&[(0, 1), (4, 3), (8, 3), (12, 1)], 24));
        assert_eq!(
            a.pow(-2).unwrap().mul(&a.pow(2).unwrap()).unwrap(),
            RS::one(&(), 24)
        );
    }

    fn ring(d: i32) -> Ring {
        Ring::new(RingSpec {
            variables: vec![Variable::polynomial("x"), Variable::polynomial("y")],
            truncation: d,
        })
        .unwrap()
    }

    #[test]
    fn exp_nilpotent_terminates() {
        let r = ring(8);
        // P = x^2 (degree 4); E2 = 1 - 24q - 72q^2
        let e2 = series(&[(0, 1), (8, -24), (16, -72)], 24).to_forms(&r);
        let p = Form::monomial(&r, Monomial::var(0, 2), int(1));
        let arg = e2.scale_coeff(&p).scale(&frac(1, 24));
        let (e, count) = arg.exp_nilpotent_terms().unwrap();
        assert_eq!(count, 3);
        let one = QSeries::<Form>::one(&r, 24);
        let sq = arg.mul(&arg).unwrap();
        let expected = one.add(&arg).unwrap().add(&sq.scale(&frac(1, 2))).unwrap();
        assert_eq!(e, expected);
        // 1/1152 E2^2 P^2 at q^0
        assert_eq!(
            sq.scale(&frac(1, 2)).coefficient(0).unwrap(),
            Form::monomial(&r, Monomial::var(0, 4), frac(1, 1152))
        );
        let inv = arg.neg().exp_nilpotent().unwrap();
        assert_eq!(e.mul(&inv).unwrap(), one);
    }

    #[test]
    fn exp_rejects_degree_zero() {
        let r = ring(8);
        let s = QSeries::<Form>::one(&r, 16);
        assert!(matches!(s.exp_nilpotent(), Err(Error::NotNilpotent(_))));
        assert_eq!(
            QSeries::<Form>::zero(&r, 16).exp_nilpotent().unwrap(),
            QSeries::one(&r, 16)
        );
    }

    #[test]
    fn labels() {
        assert_eq!(exponent_label(0), "q^0");
        assert_eq!(exponent_label(4), "q^{1/2}");
        assert_eq!(exponent_label(9), "q^{9/8}");
        assert_eq!(exponent_label(16), "q^2");
    }
}
