//! Degree-truncated graded polynomial rings over the rationals.
//!
//! Every variable models a degree-2 form (a normalized Chern root), so a
//! monomial `x1^2 * c` has weighted degree 6. Variables flagged as Laurent
//! (line-bundle roots) may carry negative exponents; all others are
//! polynomial. Multiplication drops every monomial above the ring's
//! truncation degree.
//!
//! A [`Form`] is an immutable sparse map from exponent vectors to exact
//! rationals, kept in graded order so homogeneous components are cheap to
//! extract.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Upper bound on the number of variables of a ring.
pub const MAX_VARS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub laurent: bool,
}

impl Variable {
    pub fn polynomial(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            laurent: false,
        }
    }

    pub fn laurent(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            laurent: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub variables: Vec<Variable>,
    /// Even truncation degree `D`; monomials of weighted degree above `D` vanish.
    pub truncation: i32,
}

/// Shared handle to a validated [`RingSpec`].
#[derive(Clone)]
pub struct Ring(Arc<RingSpec>);

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        if spec.truncation < 2 || spec.truncation % 2 != 0 || spec.truncation > 200 {
            return Err(Error::BadTruncation(spec.truncation));
        }
        if spec.variables.len() > MAX_VARS {
            return Err(Error::TooManyVariables(spec.variables.len()));
        }
        for (i, v) in spec.variables.iter().enumerate() {
            if spec.variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(Ring(Arc::new(spec)))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0
    }

    pub fn truncation(&self) -> i32 {
        self.0.truncation
    }

    pub fn num_vars(&self) -> usize {
        self.0.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.0
            .variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn var_name(&self, idx: usize) -> &str {
        &self.0.variables[idx].name
    }

    pub fn is_laurent(&self, idx: usize) -> bool {
        self.0.variables[idx].laurent
    }

    /// Same ring with a different truncation degree.
    pub fn with_truncation(&self, truncation: i32) -> Result<Ring> {
        Ring::new(RingSpec {
            variables: self.0.variables.clone(),
            truncation,
        })
    }

    fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.variables.iter().map(|v| v.name.as_str()).collect();
        write!(f, "Ring({:?}, D={})", names, self.0.truncation)
    }
}

/// Exponent vector. Ordered by weighted degree first, then lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [i8; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; MAX_VARS],
    };

    pub fn from_exponents(exps: &[i32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Monomial::ONE;
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = i8::try_from(e).expect("exponent out of range");
        }
        m
    }

    pub fn var(idx: usize, power: i32) -> Monomial {
        let mut m = Monomial::ONE;
        m.exps[idx] = i8::try_from(power).expect("exponent out of range");
        m
    }

    pub fn exponent(&self, idx: usize) -> i32 {
        self.exps[idx] as i32
    }

    pub fn exponents(&self) -> &[i8; MAX_VARS] {
        &self.exps
    }

    /// Weighted degree: twice the exponent sum.
    pub fn degree(&self) -> i32 {
        2 * self.exps.iter().map(|&e| e as i32).sum::<i32>()
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; MAX_VARS]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a += *b;
        }
        out
    }

    fn inverse(&self) -> Monomial {
        let mut out = *self;
        for a in out.exps.iter_mut() {
            *a = -*a;
        }
        out
    }

    /// Render with the given ring's variable names, e.g. `x1^2*c^-1`.
    pub fn display(&self, ring: &Ring) -> String {
        let mut parts = Vec::new();
        for i in 0..ring.num_vars() {
            match self.exps[i] {
                0 => {}
                1 => parts.push(ring.var_name(i).to_string()),
                e => parts.push(format!("{}^{}", ring.var_name(i), e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

/// A truncated mixed-degree form in a [`Ring`].
#[derive(Clone)]
pub struct Form {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Form {}

impl Form {
    pub fn zero(ring: &Ring) -> Form {
        Form {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Form {
        Form::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Ring, c: Rational) -> Form {
        Form::monomial(ring, Monomial::ONE, c)
    }

    pub fn int(ring: &Ring, n: i64) -> Form {
        Form::constant(ring, rational::int(n))
    }

    /// The variable with index `idx`.
    pub fn var(ring: &Ring, idx: usize) -> Form {
        Form::monomial(ring, Monomial::var(idx, 1), Rational::one())
    }

    /// `coeff * mono`, dropped when above the truncation degree.
    pub fn monomial(ring: &Ring, mono: Monomial, coeff: Rational) -> Form {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() && mono.degree() <= ring.truncation() {
            terms.insert(mono, coeff);
        }
        Form {
            ring: ring.clone(),
            terms,
        }
    }

    /// Build from raw terms, validating Laurent slots and truncating.
    pub fn from_terms(
        ring: &Ring,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Form> {
        let mut out = Form::zero(ring);
        for (m, c) in terms {
            for i in 0..MAX_VARS {
                let e = m.exponent(i);
                if e != 0 && i >= ring.num_vars() {
                    return Err(Error::UnknownVariable(format!("#{i}")));
                }
                if e < 0 && !ring.is_laurent(i) {
                    return Err(Error::NotLaurent(ring.var_name(i).to_string()));
                }
            }
            if m.degree() <= ring.truncation() {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Univariate series `sum coeffs[k] * v^(start + k)`.
    pub fn univariate(ring: &Ring, var: usize, start: i32, coeffs: &[Rational]) -> Form {
        let mut out = Form::zero(ring);
        for (k, c) in coeffs.iter().enumerate() {
            let m = Monomial::var(var, start + k as i32);
            if m.degree() <= ring.truncation() {
                out.add_term(m, c.clone());
            }
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::ONE)
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Form) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.check_ring(other)?;
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(*m, c.clone());
        }
        Ok(big)
    }

    pub fn try_sub(&self, other: &Form) -> Result<Form> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Form) -> Result<Form> {
        self.check_ring(other)?;
        Ok(self.mul_bounded(other, i32::MIN, self.ring.truncation()))
    }

    pub fn neg(&self) -> Form {
        Form {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Form {
        if r.is_zero() {
            return Form::zero(&self.ring);
        }
        Form {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Form {
        self.scale(&rational::int(n))
    }

    /// Terms grouped by degree, ascending.
    fn by_degree(&self) -> Vec<(i32, Vec<(&Monomial, &Rational)>)> {
        let mut out: Vec<(i32, Vec<(&Monomial, &Rational)>)> = Vec::new();
        for (m, c) in &self.terms {
            let d = m.degree();
            match out.last_mut() {
                Some((deg, bucket)) if *deg == d => bucket.push((m, c)),
                _ => out.push((d, vec![(m, c)])),
            }
        }
        out
    }

    /// Product restricted to degrees in `lo..=hi`.
    fn mul_bounded(&self, other: &Form, lo: i32, hi: i32) -> Form {
        let a = self.by_degree();
        let b = other.by_degree();
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (da, ta) in &a {
            for (db, tb) in &b {
                let d = da + db;
                if d < lo {
                    continue;
                }
                if d > hi {
                    break;
                }
                for (ma, ca) in ta {
                    for (mb, cb) in tb {
                        let m = ma.mul(mb);
                        let p = *ca * *cb;
                        match acc.get_mut(&m) {
                            Some(v) => *v += p,
                            None => {
                                acc.insert(m, p);
                            }
                        }
                    }
                }
            }
        }
        Form {
            ring: self.ring.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Homogeneous component of the product in degree `n`, without forming
    /// the full product.
    pub fn mul_component(&self, other: &Form, n: i32) -> Result<Form> {
        self.check_ring(other)?;
        Ok(self.mul_bounded(other, n, n))
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Form {
        let mut acc = Form::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// The homogeneous part of weighted degree `n`.
    pub fn component(&self, n: i32) -> Form {
        Form {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// All non-empty homogeneous components, ascending by degree.
    pub fn components(&self) -> Vec<(i32, Form)> {
        self.by_degree()
            .into_iter()
            .map(|(d, ts)| {
                let terms = ts.into_iter().map(|(m, c)| (*m, c.clone())).collect();
                (
                    d,
                    Form {
                        ring: self.ring.clone(),
                        terms,
                    },
                )
            })
            .collect()
    }

    /// Drop every monomial above degree `n`.
    pub fn truncate(&self, n: i32) -> Form {
        Form {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= n)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Move the form into another ring with the same variables (for example a
    /// different truncation degree).
    pub fn rehome(&self, ring: &Ring) -> Result<Form> {
        if ring.spec().variables != self.ring.spec().variables {
            return Err(Error::MixedRings);
        }
        Ok(Form {
            ring: ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= ring.truncation())
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        })
    }

    /// Substitute `v -> factor * v` for one variable.
    pub fn scale_variable(&self, var: usize, factor: &Rational) -> Form {
        let mut out = Form::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            let s = if e >= 0 {
                rational::pow(factor, e as u32)
            } else {
                rational::pow(&factor.recip(), (-e) as u32)
            };
            out.add_term(*m, c * s);
        }
        out
    }

    /// Multiplicative inverse up to the truncation degree.
    ///
    /// A leading monomial built only from Laurent variables is factored out
    /// first, so `2 sinh(c/2) = c * (1 + c^2/24 + ...)` inverts to
    /// `c^-1 * (1 - c^2/24 + ...)`. The input is treated as an exact
    /// polynomial, so the result is exact through degree `D`.
    pub fn invert_unit(&self) -> Result<Form> {
        let lowest = match self.min_degree() {
            Some(d) => self.component(d),
            None => return Err(Error::NotInvertible("zero form".into())),
        };
        let lead = if lowest.len() == 1 {
            let (m, _) = lowest.terms.iter().next().unwrap();
            let pure_laurent =
                (0..self.ring.num_vars()).all(|i| m.exponent(i) == 0 || self.ring.is_laurent(i));
            if m.is_one() || pure_laurent {
                *m
            } else {
                return Err(Error::NotInvertible(format!(
                    "leading monomial {} is not a Laurent monomial",
                    m.display(&self.ring)
                )));
            }
        } else if self.constant_term().is_zero() {
            return Err(Error::NotInvertible("zero constant term".into()));
        } else {
            Monomial::ONE
        };
        let shift = lead.degree();
        let d = self.ring.truncation();
        // unit part u = self / lead, inverted with enough headroom that the
        // final multiplication by lead^-1 still reaches degree D.
        let wide = self.ring.with_truncation((d + shift).max(2))?;
        let inv_lead = lead.inverse();
        let mut unit = Form::zero(&wide);
        for (m, c) in &self.terms {
            unit.add_term(m.mul(&inv_lead), c.clone());
        }
        let u0 = unit.constant_term();
        if u0.is_zero() {
            return Err(Error::NotInvertible("zero constant term".into()));
        }
        if unit
            .terms
            .keys()
            .any(|m| m.degree() < 0 || (m.degree() == 0 && !m.is_one()))
        {
            return Err(Error::NotInvertible(
                "unit part has non-constant terms of non-positive degree".into(),
            ));
        }
        let u0_inv = u0.recip();
        // w = 1 - u/u0 is nilpotent; u^-1 = u0^-1 * sum w^k
        let w = Form::one(&wide).try_sub(&unit.scale(&u0_inv))?;
        let mut inv = Form::one(&wide);
        let mut power = Form::one(&wide);
        loop {
            power = &power * &w;
            if power.is_zero() {
                break;
            }
            inv = &inv + &power;
        }
        let inv = inv.scale(&u0_inv);
        let mut out = Form::zero(&self.ring);
        for (m, c) in &inv.terms {
            let mm = m.mul(&inv_lead);
            if mm.degree() <= d {
                out.add_term(mm, c.clone());
            }
        }
        Ok(out)
    }

    /// Human-readable rendering in graded order.
    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&rational::render(&abs));
            } else if abs.is_one() {
                s.push_str(&m.display(&self.ring));
            } else {
                s.push_str(&format!(
                    "{}*{}",
                    rational::render(&abs),
                    m.display(&self.ring)
                ));
            }
        }
        s
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({})", self.display())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

// Operator sugar panics on mixed rings; use the `try_*` methods when the
// operands may come from different rings.
impl<'a> std::ops::Add<&'a Form> for &'a Form {
    type Output = Form;
    fn add(self, rhs: &'a Form) -> Form {
        self.try_add(rhs).expect("mixed rings")
    }
}

impl<'a> std::ops::Sub<&'a Form> for &'a Form {
    type Output = Form;
    fn sub(self, rhs: &'a Form) -> Form {
        self.try_sub(rhs).expect("mixed rings")
    }
}

impl<'a> std::ops::Mul<&'a Form> for &'a Form {
    type Output = Form;
    fn mul(self, rhs: &'a Form) -> Form {
        self.try_mul(rhs).expect("mixed rings")
    }
}

impl std::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form::neg(self)
    }
}

/// Analytic kernels expanded as truncated series in one root variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `e^v`
    Exp,
    /// `sinh(v/2)`
    SinhHalf,
    /// `cosh(v/2)`
    CoshHalf,
    /// `(v/2) / sinh(v/2)`, the per-root factor of the A-hat form.
    AhatFactor,
    /// `(v/2) / tanh(v/2)`, the per-root factor of the L-hat form up to a
    /// constant (see [`crate::verifier::LhatNormalization`]).
    LhatFactor,
    /// `1 / (2 sinh(v/2))`, Laurent in `v`.
    InvTwoSinhHalf,
}

/// Power-series coefficients (in `v`) of the kernel, from `v^0` to `v^n`.
/// For [`Kernel::InvTwoSinhHalf`] the list is shifted: entry `k` is the
/// coefficient of `v^(k-1)`.
pub fn kernel_coefficients(kernel: Kernel, n: usize) -> Vec<Rational> {
    let exp_half =
        |k: usize| rational::inv_factorial(k as u32) / rational::pow(&rational::int(2), k as u32);
    let sinh_half: Vec<Rational> = (0..=n + 1)
        .map(|k| {
            if k % 2 == 1 {
                exp_half(k)
            } else {
                Rational::zero()
            }
        })
        .collect();
    let cosh_half: Vec<Rational> = (0..=n + 1)
        .map(|k| {
            if k % 2 == 0 {
                exp_half(k)
            } else {
                Rational::zero()
            }
        })
        .collect();
    match kernel {
        Kernel::Exp => (0..=n).map(|k| rational::inv_factorial(k as u32)).collect(),
        Kernel::SinhHalf => sinh_half[..=n].to_vec(),
        Kernel::CoshHalf => cosh_half[..=n].to_vec(),
        Kernel::AhatFactor | Kernel::InvTwoSinhHalf => {
            // sinh(v/2) / (v/2) = sum s_k v^k; invert by long division.
            let s: Vec<Rational> = (0..=n)
                .map(|k| &sinh_half[k + 1] * rational::int(2))
                .collect();
            // for the Laurent kernel: 1/(2 sinh(v/2)) = v^-1 * (v/2)/sinh(v/2)
            series_reciprocal(&s, n)
        }
        Kernel::LhatFactor => {
            let s: Vec<Rational> = (0..=n)
                .map(|k| &sinh_half[k + 1] * rational::int(2))
                .collect();
            let a = series_reciprocal(&s, n);
            series_product(&a, &cosh_half[..=n], n)
        }
    }
}

/// `1 / a` as a power series through `v^n`; requires `a[0] != 0`.
pub(crate) fn series_reciprocal(a: &[Rational], n: usize) -> Vec<Rational> {
    assert!(!a[0].is_zero());
    let inv0 = a[0].recip();
    let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
    out.push(inv0.clone());
    for k in 1..=n {
        let mut acc = Rational::zero();
        for j in 1..=k.min(a.len() - 1) {
            acc += &a[j] * &out[k - j];
        }
        out.push(-acc * &inv0);
    }
    out
}

pub(crate) fn series_product(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// The truncated series of `kernel` evaluated at `multiplier * v`.
pub fn kernel_series_scaled(
    kernel: Kernel,
    ring: &Ring,
    var: usize,
    multiplier: i64,
) -> Result<Form> {
    if kernel == Kernel::InvTwoSinhHalf && !ring.is_laurent(var) {
        return Err(Error::NotLaurent(ring.var_name(var).to_string()));
    }
    if multiplier == 0 {
        return if kernel == Kernel::InvTwoSinhHalf {
            Err(Error::NotInvertible("1/(2 sinh(0))".into()))
        } else {
            let c = kernel_coefficients(kernel, 0);
            Ok(Form::constant(ring, c[0].clone()))
        };
    }
    let top = (ring.truncation() / 2) as usize;
    let m = rational::int(multiplier);
    match kernel {
        Kernel::InvTwoSinhHalf => {
            let coeffs = kernel_coefficients(kernel, top + 1);
            let scaled: Vec<Rational> = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    // coefficient of v^(k-1) scaled by m^(k-1)
                    if k == 0 {
                        c / &m
                    } else {
                        c * rational::pow(&m, (k - 1) as u32)
                    }
                })
                .collect();
            Ok(Form::univariate(ring, var, -1, &scaled))
        }
        _ => {
            let coeffs = kernel_coefficients(kernel, top);
            let scaled: Vec<Rational> = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * rational::pow(&m, k as u32))
                .collect();
            Ok(Form::univariate(ring, var, 0, &scaled))
        }
    }
}

/// The truncated series of `kernel` in the variable with index `var`.
pub fn kernel_series(kernel: Kernel, ring: &Ring, var: usize) -> Result<Form> {
    kernel_series_scaled(kernel, ring, var, 1)
}
