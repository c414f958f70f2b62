//! Form-valued modular pipelines, their decomposition in the
//! `(8 delta_2)^a epsilon_2^b` basis, and exact checks of the cancellation
//! identities that the decomposition forces.
//!
//! Every check has two tiers. Tier 1 recomputes the identity from the
//! pipeline alone: the basis solve leaves no residual, so the coefficient at
//! the relation order is the stated combination of lower coefficients.
//! Tier 2 evaluates the printed statement, built from printed bundle
//! expressions, and compares it with tier 1.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundles::printed::{printed_coefficient, PrintedId};
use crate::bundles::{theta_product_expand, theta_product_factored, BundleExpr, Geometry};
use crate::bundles::{FactoredSeries, ThetaLabel, ThetaProductSpec};
use crate::error::{Error, Result};
use crate::formring::{kernel_series_scaled, Form, Kernel};
use crate::modforms::{eisenstein_e2, gamma0_basis, BasisMonomial, RSeries};
use crate::qseries::{exponent_label, half, whole, QSeries};
use crate::rational::{frac, int, Rational};

/// Largest manifold dimension the fixed-width exponent vectors allow with
/// one line-bundle root to spare.
pub const MAX_DIM: u32 = 28;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PipelineId {
    /// Dimension `8k+2`, weight `4k+2`.
    P2 { k: u32 },
    /// Dimension `8k+6`, weight `4k+4`.
    P2Prime { k: u32 },
    /// Dimension `2d` with `m0 = 2n + (d mod 2)`, weight `d - m0`.
    P2Tilde { n: u32, d: u32 },
    /// Dimension `4d`, weight `2d`.
    Q2 { d: u32, a: Vec<i64>, b: Vec<i64> },
    /// Dimension `4d`, weight `2d`, with the extra plane bundle `eta`.
    Q2Bar { d: u32, a: i64, b: i64 },
}

impl PipelineId {
    /// The twisted pipeline with the given `m0` and weight `2 m1`.
    pub fn tilde(m0: u32, m1: u32) -> Self {
        PipelineId::P2Tilde {
            n: m0 / 2,
            d: 2 * m1 + m0,
        }
    }

    pub fn m0(&self) -> Option<u32> {
        match self {
            PipelineId::P2Tilde { n, d } => Some(2 * n + d % 2),
            _ => None,
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            PipelineId::P2 { k } => 8 * k + 2,
            PipelineId::P2Prime { k } => 8 * k + 6,
            PipelineId::P2Tilde { d, .. } => 2 * d,
            PipelineId::Q2 { d, .. } | PipelineId::Q2Bar { d, .. } => 4 * d,
        }
    }

    pub fn weight(&self) -> i64 {
        match self {
            PipelineId::P2 { k } => 4 * *k as i64 + 2,
            PipelineId::P2Prime { k } => 4 * *k as i64 + 4,
            PipelineId::P2Tilde { d, .. } => *d as i64 - self.m0().unwrap_or(0) as i64,
            PipelineId::Q2 { d, .. } | PipelineId::Q2Bar { d, .. } => 2 * *d as i64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameters(s));
        match self {
            PipelineId::P2 { k } | PipelineId::P2Prime { k } if *k == 0 => {
                return bad("k must be at least 1".into())
            }
            PipelineId::P2Tilde { n, d } => {
                let m0 = 2 * n + d % 2;
                if *d <= m0 {
                    return bad(format!(
                        "d - (2n + (1 - (-1)^d)/2) > 0 violated: d = {d}, n = {n}, m0 = {m0}"
                    ));
                }
            }
            PipelineId::Q2 { d, a, b } => {
                if *d == 0 {
                    return bad("d must be at least 1".into());
                }
                if a.is_empty() || a.len() != b.len() {
                    return bad(format!(
                        "a and b must be nonempty of equal length (got {} and {})",
                        a.len(),
                        b.len()
                    ));
                }
            }
            PipelineId::Q2Bar { d, .. } if *d == 0 => return bad("d must be at least 1".into()),
            _ => {}
        }
        if self.dim() > MAX_DIM {
            return bad(format!(
                "dimension {} exceeds the supported maximum {MAX_DIM}",
                self.dim()
            ));
        }
        Ok(())
    }

    /// The universal geometry for this pipeline.
    pub fn geometry(&self) -> Result<Geometry> {
        self.validate()?;
        match self {
            PipelineId::P2 { .. } | PipelineId::P2Prime { .. } => {
                Geometry::with_plane(self.dim(), true)
            }
            PipelineId::P2Tilde { .. } => Geometry::with_plane(self.dim(), false),
            PipelineId::Q2 { a, b, .. } => {
                Geometry::with_powers(self.dim(), &distinct(a.iter().chain(b)))
            }
            PipelineId::Q2Bar { a, b, .. } => {
                Geometry::with_powers_and_eta(self.dim(), &distinct([a, b]), true)
            }
        }
    }
}

fn distinct<'a>(it: impl IntoIterator<Item = &'a i64>) -> Vec<i64> {
    let mut v: Vec<i64> = it.into_iter().copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl fmt::Display for PipelineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineId::P2 { k } => write!(f, "P2(k={k})"),
            PipelineId::P2Prime { k } => write!(f, "P2'(k={k})"),
            PipelineId::P2Tilde { n, d } => write!(f, "P2~(n={n},d={d})"),
            PipelineId::Q2 { d, a, b } => write!(f, "Q2(d={d},a={a:?},b={b:?})"),
            PipelineId::Q2Bar { d, a, b } => write!(f, "Q2bar(d={d},a={a},b={b})"),
        }
    }
}

/// `exp(coef * E_2 * v^2 / 24)` as a series in `q` with coefficients in `v`.
fn e2_exponential(g: &Geometry, var: usize, coef: i64, order: i64) -> Result<QSeries<Form>> {
    let ring = g.ring();
    let v = Form::var(ring, var);
    let v2 = &v * &v;
    let scale = frac(coef, 24);
    eisenstein_e2(order)
        .map_into(ring, |r| v2.scale(&(r * &scale)))
        .exp_nilpotent()
}

fn kernel(g: &Geometry, k: Kernel, var: &str, m: i64) -> Result<Form> {
    kernel_series_scaled(k, g.ring(), g.var(var)?, m)
}

/// Theta product with the A-hat factors folded in.
fn with_ahat(g: &Geometry, label: ThetaLabel, order: i64) -> Result<FactoredSeries> {
    let mut s = theta_product_factored(&ThetaProductSpec::new(label)?, g, order)?;
    for &v in g.tm_vars() {
        s.mul_form(
            v,
            &kernel_series_scaled(Kernel::AhatFactor, g.ring(), v, 1)?,
        )?;
    }
    Ok(s)
}

/// Sum of squared multipliers entering the `E_2` exponent.
fn e2_line_weight(id: &PipelineId) -> i64 {
    match id {
        PipelineId::Q2 { a, b, .. } => a.iter().zip(b).map(|(x, y)| x * x + 2 * y * y).sum(),
        PipelineId::Q2Bar { a, b, .. } => a * a + 2 * b * b,
        _ => 0,
    }
}

/// Prefactor `prod_t 2 cosh(b_t c / 2)` (times `cosh(cbar/2)` with `eta`).
fn cosh_prefactor(id: &PipelineId, g: &Geometry) -> Result<Form> {
    let bs: Vec<i64> = match id {
        PipelineId::Q2 { b, .. } => b.clone(),
        PipelineId::Q2Bar { b, .. } => vec![*b],
        _ => Vec::new(),
    };
    let mut acc = Form::one(g.ring());
    for b in bs {
        acc = acc.try_mul(&kernel(g, Kernel::CoshHalf, "c", b)?.scale_int(2))?;
    }
    if matches!(id, PipelineId::Q2Bar { .. }) {
        acc = acc.try_mul(&kernel(g, Kernel::CoshHalf, "cbar", 1)?)?;
    }
    Ok(acc)
}

/// The top-degree pipeline series in a given geometry.
pub fn pipeline_in(id: &PipelineId, g: &Geometry, order: i64) -> Result<QSeries<Form>> {
    id.validate()?;
    let dim = id.dim() as i32;
    if g.dim() != id.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{id} needs dimension {}, geometry has {}",
            id.dim(),
            g.dim()
        )));
    }
    match id {
        PipelineId::P2 { .. } | PipelineId::P2Prime { .. } => {
            let c = g.var("c")?;
            let inv = kernel(g, Kernel::InvTwoSinhHalf, "c", 1)?;
            let mut trivial = with_ahat(g, ThetaLabel::Trivial, order)?;
            trivial.mul_form(c, &inv)?;
            let mut twisted = with_ahat(g, ThetaLabel::Xi, order)?;
            twisted.mul_form(c, &inv.try_mul(&kernel(g, Kernel::CoshHalf, "c", 1)?)?)?;
            trivial.component(dim)?.sub(&twisted.component(dim)?)
        }
        PipelineId::P2Tilde { .. } => {
            let m0 = id.m0().unwrap_or(0);
            let mut s = with_ahat(g, ThetaLabel::Twisted { m0 }, order)?;
            s.mul_form(g.var("c")?, &kernel(g, Kernel::SinhHalf, "c", 1)?.pow(m0))?;
            s.component(dim)
        }
        PipelineId::Q2 { .. } | PipelineId::Q2Bar { .. } => {
            let label = match id {
                PipelineId::Q2 { a, b, .. } => ThetaLabel::Powers {
                    a: a.clone(),
                    b: b.clone(),
                },
                PipelineId::Q2Bar { a, b, .. } => ThetaLabel::PowersEta { a: *a, b: *b },
                _ => unreachable!(),
            };
            let mut s = with_ahat(g, label, order)?;
            for &v in g.tm_vars() {
                s.mul_series(v, &e2_exponential(g, v, 1, order)?)?;
            }
            let c = g.var("c")?;
            s.mul_series(c, &e2_exponential(g, c, -e2_line_weight(id), order)?)?;
            s.mul_form(c, &cosh_prefactor(id, g)?)?;
            s.component(dim)
        }
    }
}

/// The top-degree pipeline series, exact below `order` (eighths).
pub fn pipeline(id: &PipelineId, order: i64) -> Result<QSeries<Form>> {
    pipeline_in(id, &id.geometry()?, order)
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub weight: i64,
    pub coefficients: Vec<(BasisMonomial, Form)>,
    /// `(exponent, series - combination)` at every half-integer exponent
    /// past the pivots, and at any off-lattice exponent in the support.
    pub residuals: Vec<(i64, Form)>,
}

impl SolveResult {
    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|(_, f)| f.is_zero())
    }
}

fn basis_for(weight: i64, order: i64) -> Result<Vec<(BasisMonomial, RSeries)>> {
    let basis = gamma0_basis(weight, order)?;
    let last = basis.last().map(|(m, _)| m.pivot()).unwrap_or(0);
    if order <= last {
        return Err(Error::RelationOrder { order });
    }
    Ok(basis)
}

/// Coefficients `h_j` with `series = sum h_j (8 delta_2)^a epsilon_2^b`,
/// solved from the pivots `q^{b/2}`; everything later is residual.
pub fn solve_basis(series: &QSeries<Form>, weight: i64) -> Result<SolveResult> {
    let order = series.order();
    let basis = basis_for(weight, order)?;
    let mut h: Vec<Form> = Vec::with_capacity(basis.len());
    for (i, (m, s)) in basis.iter().enumerate() {
        let p = m.pivot();
        let mut rest = series.coefficient(p)?;
        for (j, hj) in h.iter().enumerate() {
            rest = rest.try_sub(&hj.scale(&basis[j].1.coefficient(p)?))?;
        }
        let lead = s.coefficient(p)?;
        debug_assert!(i == 0 || p > basis[i - 1].0.pivot());
        h.push(rest.scale(&lead.recip()));
    }
    let last = basis.last().map(|(m, _)| m.pivot()).unwrap_or(0);
    let mut residuals = Vec::new();
    for e in (last + 1)..order {
        let on_lattice = e % 4 == 0;
        let value = series.coefficient(e)?;
        if !on_lattice && value.is_zero() {
            continue;
        }
        let mut r = value;
        for (j, hj) in h.iter().enumerate() {
            r = r.try_sub(&hj.scale(&basis[j].1.coefficient(e)?))?;
        }
        residuals.push((e, r));
    }
    Ok(SolveResult {
        weight,
        coefficients: basis.iter().map(|(m, _)| *m).zip(h).collect(),
        residuals,
    })
}

/// Rational `mu_j` with `Y_r = sum_j mu_j Y_{pivot j}` for every weight-`weight`
/// form `Y`, where `r` is `relation` (eighths).
pub fn relation_multipliers(weight: i64, relation: i64) -> Result<Vec<Rational>> {
    let basis = basis_for(weight, relation + 1)?;
    let n = basis.len();
    let last = basis[n - 1].0.pivot();
    if relation <= last || relation % 4 != 0 {
        return Err(Error::RelationOrder { order: relation });
    }
    // L[i][j] = coefficient of basis j at pivot i (lower triangular)
    let l: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| basis[j].1.coefficient(basis[i].0.pivot()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let beta: Vec<Rational> = basis
        .iter()
        .map(|(_, s)| s.coefficient(relation))
        .collect::<Result<_>>()?;
    // mu solves L^T mu = beta, back substitution from the last row
    let mut mu = vec![Rational::zero(); n];
    for j in (0..n).rev() {
        let mut acc = beta[j].clone();
        for i in j + 1..n {
            acc -= &l[i][j] * &mu[i];
        }
        mu[j] = acc / &l[j][j];
    }
    Ok(mu)
}

#[derive(Clone, Debug)]
pub struct IdentityRecord {
    pub pipeline: PipelineId,
    pub relation: i64,
    pub multipliers: Vec<Rational>,
    /// Pipeline coefficient at the relation order.
    pub lhs: Form,
    /// `sum_j mu_j` times the pipeline coefficient at pivot `j`.
    pub rhs: Form,
}

impl IdentityRecord {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The identity obtained at `relation` from a pipeline series.
pub fn identity_from_series(
    id: &PipelineId,
    series: &QSeries<Form>,
    relation: i64,
) -> Result<IdentityRecord> {
    let mu = relation_multipliers(id.weight(), relation)?;
    let mut rhs = Form::zero(series.ctx());
    for (j, m) in mu.iter().enumerate() {
        rhs = rhs.try_add(&series.coefficient(half(j as i64))?.scale(m))?;
    }
    Ok(IdentityRecord {
        pipeline: id.clone(),
        relation,
        multipliers: mu,
        lhs: series.coefficient(relation)?,
        rhs,
    })
}

/// Compute the pipeline and derive its identity at `relation`.
pub fn derive_identity(id: &PipelineId, relation: i64) -> Result<IdentityRecord> {
    let series = pipeline(id, relation + 1)?;
    identity_from_series(id, &series, relation)
}

/// As [`derive_identity`], keeping the pipeline series exact below `order`.
pub fn derive_identity_at(
    id: &PipelineId,
    relation: i64,
    order: i64,
) -> Result<(QSeries<Form>, IdentityRecord)> {
    if order <= relation {
        return Err(Error::RelationOrder { order });
    }
    let series = pipeline(id, order)?;
    let identity = identity_from_series(id, &series, relation)?;
    Ok((series, identity))
}

/// Which per-root kernel the L-hat form uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LhatNormalization {
    /// `prod_j x_j / tanh(x_j / 2)`.
    FullRoot,
    /// `2^{dim/2} prod_j (x_j/2) / tanh(x_j/2)`; equal to `FullRoot` term by term.
    HalfRootScaled,
    /// `prod_j (x_j/2) / tanh(x_j/2)`.
    HalfRoot,
}

impl LhatNormalization {
    pub const ALL: [LhatNormalization; 3] = [
        LhatNormalization::FullRoot,
        LhatNormalization::HalfRootScaled,
        LhatNormalization::HalfRoot,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            LhatNormalization::FullRoot => "prod x/tanh(x/2)",
            LhatNormalization::HalfRootScaled => "2^(dim/2) prod (x/2)/tanh(x/2)",
            LhatNormalization::HalfRoot => "prod (x/2)/tanh(x/2)",
        }
    }

    pub fn lhat(self, g: &Geometry) -> Result<Form> {
        let ring = g.ring();
        let per_root = if self == LhatNormalization::FullRoot {
            2
        } else {
            1
        };
        let mut acc = Form::one(ring);
        for &v in g.tm_vars() {
            acc = acc.try_mul(
                &kernel_series_scaled(Kernel::LhatFactor, ring, v, 1)?.scale_int(per_root),
            )?;
        }
        if self == LhatNormalization::HalfRootScaled {
            acc = acc.scale(&crate::rational::pow(&int(2), g.tm_vars().len() as u32));
        }
        Ok(acc)
    }
}

/// `exp(f)` for a form without terms of degree `<= 0`.
pub fn exp_form(f: &Form) -> Result<Form> {
    if f.min_degree().is_some_and(|d| d <= 0) {
        return Err(Error::NotNilpotent(f.display()));
    }
    let mut sum = Form::one(f.ring());
    let mut power = Form::one(f.ring());
    let mut k = 0u32;
    loop {
        k += 1;
        power = power.try_mul(f)?;
        if power.is_zero() {
            return Ok(sum);
        }
        sum = sum.try_add(&power.scale(&crate::rational::inv_factorial(k)))?;
    }
}

/// Exact rational solution of `target = sum_i x_i candidates_i`, or `None`.
/// Free unknowns are set to zero.
pub fn fit_combination(target: &Form, candidates: &[Form]) -> Option<Vec<Rational>> {
    use std::collections::BTreeMap;
    let mut monos: BTreeMap<crate::formring::Monomial, usize> = BTreeMap::new();
    for f in candidates.iter().chain(std::iter::once(target)) {
        for (m, _) in f.terms() {
            let n = monos.len();
            monos.entry(*m).or_insert(n);
        }
    }
    let n = candidates.len();
    // augmented rows: one per monomial
    let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n + 1]; monos.len()];
    for (j, f) in candidates.iter().enumerate() {
        for (m, c) in f.terms() {
            rows[monos[m]][j] = c.clone();
        }
    }
    for (m, c) in target.terms() {
        rows[monos[m]][n] = c.clone();
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for k in col..=n {
                    let sub = &factor * &rows[r][k];
                    rows[i][k] -= sub;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, col) in pivots {
        x[col] = rows[row][n].clone();
    }
    Some(x)
}

/// As [`fit_combination`], preferring the fewest nonzero terms: every
/// support of size one or two is tried before the full candidate set.
pub fn fit_sparse(target: &Form, candidates: &[Form]) -> Option<Vec<Rational>> {
    let n = candidates.len();
    let spread = |picked: &[usize], x: Vec<Rational>| {
        let mut full = vec![Rational::zero(); n];
        for (i, v) in picked.iter().zip(x) {
            full[*i] = v;
        }
        full
    };
    if target.terms().next().is_none() {
        return Some(vec![Rational::zero(); n]);
    }
    for i in 0..n {
        if let Some(x) = fit_combination(target, std::slice::from_ref(&candidates[i])) {
            return Some(spread(&[i], x));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(x) =
                fit_combination(target, &[candidates[i].clone(), candidates[j].clone()])
            {
                return Some(spread(&[i, j], x));
            }
        }
    }
    fit_combination(target, candidates)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "3.1")]
    T31,
    #[serde(rename = "3.2")]
    T32,
    #[serde(rename = "3.3")]
    T33,
    #[serde(rename = "3.4")]
    T34,
    #[serde(rename = "3.5")]
    T35,
    #[serde(rename = "3.6")]
    T36,
    #[serde(rename = "3.7")]
    T37,
    #[serde(rename = "4.1")]
    T41,
    #[serde(rename = "4.2")]
    T42,
    #[serde(rename = "4.3")]
    T43,
    #[serde(rename = "4.4")]
    T44,
    #[serde(rename = "agw")]
    Agw,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::T31,
        TheoremId::T32,
        TheoremId::T33,
        TheoremId::T34,
        TheoremId::T35,
        TheoremId::T36,
        TheoremId::T37,
        TheoremId::T41,
        TheoremId::T42,
        TheoremId::T43,
        TheoremId::T44,
        TheoremId::Agw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T31 => "3.1",
            TheoremId::T32 => "3.2",
            TheoremId::T33 => "3.3",
            TheoremId::T34 => "3.4",
            TheoremId::T35 => "3.5",
            TheoremId::T36 => "3.6",
            TheoremId::T37 => "3.7",
            TheoremId::T41 => "4.1",
            TheoremId::T42 => "4.2",
            TheoremId::T43 => "4.3",
            TheoremId::T44 => "4.4",
            TheoremId::Agw => "agw",
        }
    }

    /// Weight `2 m1` of the twisted family, for the theorems that use it.
    pub fn tilde_m1(self) -> Option<u32> {
        match self {
            TheoremId::T33 | TheoremId::T34 => Some(1),
            TheoremId::T35 => Some(2),
            TheoremId::T36 => Some(3),
            TheoremId::T37 => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or(Error::UnknownId(s))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<i64>,
}

impl TheoremParams {
    pub fn none() -> Self {
        TheoremParams::default()
    }

    pub fn m0(m0: u32) -> Self {
        TheoremParams {
            m0: Some(m0),
            ..Default::default()
        }
    }

    pub fn ab(a: &[i64], b: &[i64]) -> Self {
        TheoremParams {
            m0: None,
            a: a.to_vec(),
            b: b.to_vec(),
        }
    }
}

impl fmt::Display for TheoremParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(m0) = self.m0 {
            parts.push(format!("m0={m0}"));
        }
        if !self.a.is_empty() || !self.b.is_empty() {
            parts.push(format!("a={:?}", self.a));
            parts.push(format!("b={:?}", self.b));
        }
        f.write_str(&parts.join(","))
    }
}

/// Where printed and computed values part ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub side: String,
    pub monomial: String,
    pub computed: Rational,
    pub printed: Rational,
}

/// First monomial where `computed` and `printed` differ.
fn first_difference(side: &str, computed: &Form, printed: &Form) -> Result<Option<Discrepancy>> {
    let diff = computed.try_sub(printed)?;
    let found = diff.terms().next().map(|(m, _)| Discrepancy {
        side: side.to_string(),
        monomial: m.display(computed.ring()),
        computed: computed.coefficient(m),
        printed: printed.coefficient(m),
    });
    Ok(found)
}

/// Printed coefficient versus the expansion coefficient of the same product.
#[derive(Clone, Debug)]
pub struct CoefficientCheck {
    pub id: String,
    pub exponent: i64,
    pub matches: bool,
    pub discrepancy: Option<Discrepancy>,
    /// When the printed expression is off, `computed - printed` written in
    /// the candidate bundles of the family, if such a combination exists.
    pub correction: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub params: TheoremParams,
    pub pipeline: Option<String>,
    pub dimension: u32,
    pub relation: Option<i64>,
    pub residuals_checked: usize,
    /// Tier 1: the identity derived from the pipeline holds, with every
    /// later residual zero.
    pub derived_holds: bool,
    pub derived_multipliers: Vec<Rational>,
    pub printed_multipliers: Vec<Rational>,
    /// Tier 2: the printed statement agrees with the derived one.
    pub printed_matches: bool,
    pub discrepancy: Option<Discrepancy>,
    /// Both sides of the printed statement, evaluated.
    pub lhs: Form,
    pub rhs: Form,
    pub coefficient_checks: Vec<CoefficientCheck>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn coefficients_match(&self) -> bool {
        self.coefficient_checks.iter().all(|c| c.matches)
    }

    /// `pass`, `printed-mismatch` (tier 1 only) or `fail`.
    pub fn status(&self) -> &'static str {
        if !self.derived_holds {
            "fail"
        } else if self.printed_matches && self.coefficients_match() {
            "pass"
        } else {
            "printed-mismatch"
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// q-order (eighths) of every pipeline; must pass the relation order.
    pub order: i64,
    /// Build every geometry with one extra unused root variable.
    pub spare_variable: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            order: whole(2) + 1,
            spare_variable: false,
        }
    }
}

fn prepared(g: Geometry, opts: VerifyOptions) -> Result<Geometry> {
    if opts.spare_variable {
        g.with_spare_variable()
    } else {
        Ok(g)
    }
}

/// Theorem data that does not depend on evaluation.
struct Plan {
    pipeline: PipelineId,
    relation: i64,
    printed_multipliers: Vec<Rational>,
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| int(*x)).collect()
}

fn plan(theorem: TheoremId, p: &TheoremParams) -> Result<Plan> {
    let need_m0 = || {
        p.m0.ok_or_else(|| Error::InvalidParameters(format!("theorem {theorem} needs m0")))
    };
    let single = |v: &[i64], name: &str| -> Result<i64> {
        match v {
            [x] => Ok(*x),
            _ => Err(Error::InvalidParameters(format!(
                "theorem {theorem} needs a single integer {name}"
            ))),
        }
    };
    let (pipeline, relation, mu) = match theorem {
        TheoremId::T31 => (PipelineId::P2 { k: 1 }, whole(1), ints(&[-504, 32])),
        TheoremId::T32 => (
            PipelineId::P2Prime { k: 1 },
            half(3),
            ints(&[-7680, 140, 16]),
        ),
        TheoremId::T33 => (PipelineId::tilde(need_m0()?, 1), half(1), ints(&[24])),
        TheoremId::T34 => (PipelineId::tilde(need_m0()?, 1), whole(1), ints(&[24])),
        TheoremId::T35 => (PipelineId::tilde(need_m0()?, 2), whole(1), ints(&[240, 8])),
        TheoremId::T36 => (
            PipelineId::tilde(need_m0()?, 3),
            whole(1),
            ints(&[-504, 32]),
        ),
        TheoremId::T37 => (
            PipelineId::tilde(need_m0()?, 4),
            half(3),
            ints(&[-7680, 140, 16]),
        ),
        TheoremId::T41 => (
            PipelineId::Q2 {
                d: 2,
                a: p.a.clone(),
                b: p.b.clone(),
            },
            whole(1),
            ints(&[240, 8]),
        ),
        TheoremId::T42 => (
            PipelineId::Q2 {
                d: 3,
                a: p.a.clone(),
                b: p.b.clone(),
            },
            whole(1),
            ints(&[-504, 32]),
        ),
        TheoremId::T43 => (
            PipelineId::Q2Bar {
                d: 2,
                a: single(&p.a, "a")?,
                b: single(&p.b, "b")?,
            },
            whole(1),
            ints(&[240, 8]),
        ),
        TheoremId::T44 => (
            PipelineId::Q2Bar {
                d: 3,
                a: single(&p.a, "a")?,
                b: single(&p.b, "b")?,
            },
            whole(1),
            ints(&[-504, 32]),
        ),
        TheoremId::Agw => return Err(Error::InvalidParameters("agw has no pipeline".into())),
    };
    pipeline.validate()?;
    Ok(Plan {
        pipeline,
        relation,
        printed_multipliers: mu,
    })
}

impl Plan {
    /// Index of the last printed coefficient: the relation exponent in half-units.
    fn top_index(&self) -> u32 {
        (self.relation / 4) as u32
    }
}

/// Printed ids of the coefficients `0..=top` used by a theorem.
fn printed_ids(theorem: TheoremId, p: &TheoremParams, top: u32) -> Vec<(PrintedId, ThetaLabel)> {
    let mut out = Vec::new();
    for j in 0..=top {
        match theorem {
            TheoremId::T31 | TheoremId::T32 => {
                for with_xi in [false, true] {
                    let id = if theorem == TheoremId::T31 {
                        PrintedId::A { j, with_xi }
                    } else {
                        PrintedId::APrime { j, with_xi }
                    };
                    out.push((
                        id,
                        if with_xi {
                            ThetaLabel::Xi
                        } else {
                            ThetaLabel::Trivial
                        },
                    ));
                }
            }
            TheoremId::T33 | TheoremId::T34 | TheoremId::T35 | TheoremId::T36 | TheoremId::T37 => {
                let m0 = p.m0.unwrap_or(0);
                let m1 = theorem.tilde_m1().unwrap_or(1);
                out.push((PrintedId::ATilde { j, m0, m1 }, ThetaLabel::Twisted { m0 }));
            }
            TheoremId::T41 | TheoremId::T42 => {
                let i = if theorem == TheoremId::T41 { 1 } else { 2 };
                out.push((
                    PrintedId::B {
                        i,
                        j,
                        a: p.a.clone(),
                        b: p.b.clone(),
                    },
                    ThetaLabel::Powers {
                        a: p.a.clone(),
                        b: p.b.clone(),
                    },
                ));
            }
            TheoremId::T43 | TheoremId::T44 => {
                let i = if theorem == TheoremId::T43 { 1 } else { 2 };
                let (a, b) = (p.a[0], p.b[0]);
                out.push((
                    PrintedId::BBar { i, j, a, b },
                    ThetaLabel::PowersEta { a, b },
                ));
            }
            TheoremId::Agw => {}
        }
    }
    out
}

/// Bundles that printed coefficients are written in, for correction fitting.
fn candidate_bundles(g: &Geometry) -> Vec<BundleExpr> {
    let mut gens: Vec<String> = g.generator_names().map(str::to_string).collect();
    // xi and xi^1 coincide; keep one of them
    if gens.iter().any(|n| n == "xi^1") {
        gens.retain(|n| n != "xi");
    }
    let mut out = vec![BundleExpr::trivial(1)];
    for x in &gens {
        out.push(BundleExpr::gen(x));
    }
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i..] {
            out.push(BundleExpr::gen(x) * BundleExpr::gen(y));
        }
        out.push(BundleExpr::Lambda(2, x.clone()));
        out.push(BundleExpr::Sym(2, x.clone()));
    }
    if g.dim() >= 12 {
        for x in &gens {
            out.push(BundleExpr::Lambda(3, x.clone()));
            out.push(BundleExpr::Sym(3, x.clone()));
            for y in &gens {
                out.push(BundleExpr::gen(x) * BundleExpr::Lambda(2, y.clone()));
                out.push(BundleExpr::gen(x) * BundleExpr::Sym(2, y.clone()));
                for z in &gens {
                    if x <= y && y <= z {
                        out.push(BundleExpr::gen(x) * BundleExpr::gen(y) * BundleExpr::gen(z));
                    }
                }
            }
        }
    }
    out
}

fn render_combination(coeffs: &[Rational], cands: &[BundleExpr]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .zip(cands)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, b)| {
            if c.is_one() {
                format!("{b}")
            } else if (-c).is_one() {
                format!("-({b})")
            } else {
                format!("{c}*({b})")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Compare printed coefficients with the expansion, attaching corrections.
fn coefficient_checks(
    theorem: TheoremId,
    p: &TheoremParams,
    g: &Geometry,
    top: u32,
    order: i64,
) -> Result<(Vec<CoefficientCheck>, Vec<Form>)> {
    let mut out = Vec::new();
    let mut expanded = Vec::new();
    let mut cache: Vec<(ThetaLabel, QSeries<Form>)> = Vec::new();
    let cands = candidate_bundles(g);
    let mut cand_forms: Option<Vec<Form>> = None;
    for (id, label) in printed_ids(theorem, p, top) {
        if !cache.iter().any(|(l, _)| *l == label) {
            let s = theta_product_expand(&ThetaProductSpec::new(label.clone())?, g, order)?;
            cache.push((label.clone(), s));
        }
        let series = &cache.iter().find(|(l, _)| *l == label).expect("cached").1;
        let j = match &id {
            PrintedId::A { j, .. }
            | PrintedId::APrime { j, .. }
            | PrintedId::ATilde { j, .. }
            | PrintedId::B { j, .. }
            | PrintedId::BBar { j, .. } => *j,
        };
        let e = half(j as i64);
        let computed = series.coefficient(e)?;
        let printed = printed_coefficient(&id)?.ch(g)?;
        let discrepancy = first_difference("coefficient", &computed, &printed)?;
        let correction = match &discrepancy {
            None => None,
            Some(_) => {
                let forms = match &cand_forms {
                    Some(f) => f,
                    None => {
                        cand_forms = Some(cands.iter().map(|b| b.ch(g)).collect::<Result<_>>()?);
                        cand_forms.as_ref().expect("set")
                    }
                };
                let diff = computed.try_sub(&printed)?;
                fit_sparse(&diff, forms).map(|x| render_combination(&x, &cands))
            }
        };
        out.push(CoefficientCheck {
            id: id.to_string(),
            exponent: e,
            matches: discrepancy.is_none(),
            discrepancy,
            correction,
        });
        expanded.push(computed);
    }
    Ok((out, expanded))
}

/// Chern characters of the printed coefficients, in `printed_ids` order.
fn printed_forms(
    theorem: TheoremId,
    p: &TheoremParams,
    plan: &Plan,
    g: &Geometry,
) -> Result<Vec<Form>> {
    printed_ids(theorem, p, plan.top_index())
        .iter()
        .map(|(id, _)| printed_coefficient(id)?.ch(g))
        .collect()
}

/// Printed statement as `(lhs, rhs)` forms, with coefficient `k` taken from
/// `coeffs[k]` (indexed like `printed_ids`).
fn printed_statement(
    theorem: TheoremId,
    p: &TheoremParams,
    plan: &Plan,
    g: &Geometry,
    coeffs: &[Form],
) -> Result<(Form, Form)> {
    let dim = g.dim() as i32;
    let ring = g.ring();
    let ch_of = |k: usize| -> Result<Form> { Ok(coeffs[k].clone()) };
    let mu = &plan.printed_multipliers;
    match theorem {
        TheoremId::T31 | TheoremId::T32 => {
            let ahat = g.ahat()?;
            let inv = kernel(g, Kernel::InvTwoSinhHalf, "c", 1)?;
            let cosh = kernel(g, Kernel::CoshHalf, "c", 1)?;
            let pre = ahat.try_mul(&inv)?;
            // W_j = {Ahat / (2 sinh) (ch A_j[C2] - cosh ch A_j[xi])}
            let w = |j: usize| -> Result<Form> {
                let inner = ch_of(2 * j)?.try_sub(&cosh.try_mul(&ch_of(2 * j + 1)?)?)?;
                pre.mul_component(&inner, dim)
            };
            let mut lhs = Form::zero(ring);
            for (j, m) in mu.iter().enumerate() {
                lhs = lhs.try_add(&w(j)?.scale(m))?;
            }
            Ok((lhs, w(mu.len())?))
        }
        TheoremId::T33 | TheoremId::T34 | TheoremId::T35 | TheoremId::T36 | TheoremId::T37 => {
            let m0 = p.m0.unwrap_or(0);
            let pre = g
                .ahat()?
                .try_mul(&kernel(g, Kernel::SinhHalf, "c", 1)?.pow(m0))?;
            let w = |j: usize| -> Result<Form> { pre.mul_component(&ch_of(j)?, dim) };
            match theorem {
                // {pre} = 1/24 {pre ch(A_r)}
                TheoremId::T33 => Ok((w(0)?, w(1)?.scale(&frac(1, 24)))),
                TheoremId::T34 => Ok((w(0)?, w(2)?.scale(&frac(1, 24)))),
                _ => {
                    let mut lhs = Form::zero(ring);
                    for (j, m) in mu.iter().enumerate() {
                        lhs = lhs.try_add(&w(j)?.scale(m))?;
                    }
                    Ok((lhs, w(mu.len())?))
                }
            }
        }
        TheoremId::T41 | TheoremId::T42 | TheoremId::T43 | TheoremId::T44 => {
            let x = g.p1_tangent().try_sub(
                &Form::var(ring, g.var("c")?)
                    .pow(2)
                    .scale_int(e2_line_weight(&plan.pipeline)),
            )?;
            let e = exp_form(&x.scale(&frac(1, 24)))?;
            let pre = cosh_prefactor(&plan.pipeline, g)?.try_mul(&g.ahat()?)?;
            // printed combination: 240 B0 + 8 B1 - B2, or 504 B0 - 32 B1 + B2
            let signs: [i64; 3] = if matches!(theorem, TheoremId::T41 | TheoremId::T43) {
                [240, 8, -1]
            } else {
                [504, -32, 1]
            };
            let mut comb = Form::zero(ring);
            for (k, s) in signs.iter().enumerate() {
                comb = comb.try_add(&ch_of(k)?.scale_int(*s))?;
            }
            let z = pre.try_mul(&comb)?;
            let w0 = pre.try_mul(&ch_of(0)?)?;
            // X {((e+1)/X) Z +- e W0}^{(dim-4)} with X of degree 4 is
            // {(e+1) Z +- X e W0}^{(dim)}
            let one = Form::one(ring);
            let mut lhs = e.try_add(&one)?.mul_component(&z, dim)?;
            let tail = x.try_mul(&e)?.mul_component(&w0, dim)?;
            lhs = if signs[2] < 0 {
                lhs.try_add(&tail)?
            } else {
                lhs.try_sub(&tail)?
            };
            Ok((lhs, z.component(dim)))
        }
        TheoremId::Agw => unreachable!("handled separately"),
    }
}

/// Check a printed cancellation theorem at the given parameters.
pub fn verify_theorem(
    theorem: TheoremId,
    params: &TheoremParams,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    if theorem == TheoremId::Agw {
        return verify_agw_with(params, opts);
    }
    let start = Instant::now();
    let plan = plan(theorem, params)?;
    if opts.order <= plan.relation {
        return Err(Error::RelationOrder { order: opts.order });
    }
    let g = prepared(plan.pipeline.geometry()?, opts)?;
    let series = pipeline_in(&plan.pipeline, &g, opts.order)?;
    let solve = solve_basis(&series, plan.pipeline.weight())?;
    let identity = identity_from_series(&plan.pipeline, &series, plan.relation)?;
    let derived_holds = identity.holds() && solve.residuals_vanish();

    let mut notes = Vec::new();
    if let Some((e, _)) = solve.residuals.iter().find(|(_, f)| !f.is_zero()) {
        notes.push(format!("nonzero basis residual at {}", exponent_label(*e)));
    }
    let (lhs, rhs) = printed_statement(
        theorem,
        params,
        &plan,
        &g,
        &printed_forms(theorem, params, &plan, &g)?,
    )?;
    let multipliers_match = identity.multipliers == plan.printed_multipliers;
    if !multipliers_match {
        notes.push("printed multipliers differ from derived ones".into());
    }
    let discrepancy = first_difference("statement lhs vs rhs", &lhs, &rhs)?;
    let top = plan.top_index();
    let (checks, expanded) = coefficient_checks(
        theorem,
        params,
        &g,
        top,
        opts.order.max(half(top as i64) + 1),
    )?;
    if checks.iter().any(|c| !c.matches) {
        let (l, r) = printed_statement(theorem, params, &plan, &g, &expanded)?;
        notes.push(if l == r {
            "statement holds once the expanded coefficients replace the printed ones".into()
        } else {
            "statement fails even with the expanded coefficients".into()
        });
    }
    if matches!(
        theorem,
        TheoremId::T41 | TheoremId::T42 | TheoremId::T43 | TheoremId::T44
    ) {
        notes.push("braced degree-(dim-4) term times the degree-4 bracket read as one degree-dim component".into());
    }
    Ok(VerificationReport {
        theorem,
        params: params.clone(),
        pipeline: Some(plan.pipeline.to_string()),
        dimension: plan.pipeline.dim(),
        relation: Some(plan.relation),
        residuals_checked: solve.residuals.len(),
        derived_holds,
        derived_multipliers: identity.multipliers,
        printed_multipliers: plan.printed_multipliers,
        printed_matches: multipliers_match && discrepancy.is_none(),
        discrepancy,
        lhs,
        rhs,
        coefficient_checks: checks,
        notes,
        elapsed: start.elapsed(),
    })
}

/// Degree-12 identity between the L-hat form and A-hat twisted by the
/// tangent bundle. Tier 1 solves for the two multipliers; tier 2 compares
/// them with `(1, -32)` under each L-hat normalization.
pub fn verify_agw(params: &TheoremParams) -> Result<VerificationReport> {
    verify_agw_with(params, VerifyOptions::default())
}

fn verify_agw_with(params: &TheoremParams, opts: VerifyOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let g = prepared(Geometry::tangent(12)?, opts)?;
    let ahat = g.ahat()?;
    let ach = ahat.mul_component(&BundleExpr::gen("T").ch(&g)?, 12)?;
    let a12 = ahat.component(12);
    let printed = ints(&[1, -32]);
    let rhs = ach.try_sub(&a12.scale_int(32))?;
    let lhs = LhatNormalization::FullRoot.lhat(&g)?.component(12);
    let mut derived: Option<Vec<Rational>> = None;
    let mut discrepancy = None;
    let mut notes = Vec::new();
    let mut validated = Vec::new();
    for norm in LhatNormalization::ALL {
        let l12 = norm.lhat(&g)?.component(12);
        let fit = fit_combination(&l12, &[ach.clone(), a12.clone()]);
        match &fit {
            Some(x) => notes.push(format!(
                "{}: L-hat^(12) = {} * (Ahat ch T)^(12) + {} * Ahat^(12)",
                norm.describe(),
                x[0],
                x[1]
            )),
            None => notes.push(format!("{}: no combination exists", norm.describe())),
        }
        let diff = first_difference(&format!("statement under {}", norm.describe()), &l12, &rhs)?;
        if diff.is_none() {
            validated.push(norm.describe());
        } else if discrepancy.is_none() {
            discrepancy = diff;
        }
        if derived.is_none() {
            derived = fit;
        }
    }
    notes.push(if validated.is_empty() {
        "printed statement validated under no normalization".to_string()
    } else {
        format!("printed statement validated under {}", validated.join(", "))
    });
    let derived_multipliers = derived.clone().unwrap_or_default();
    Ok(VerificationReport {
        theorem: TheoremId::Agw,
        params: params.clone(),
        pipeline: None,
        dimension: 12,
        relation: None,
        residuals_checked: 0,
        derived_holds: derived.is_some(),
        printed_matches: !validated.is_empty(),
        derived_multipliers,
        printed_multipliers: printed,
        discrepancy: if validated.is_empty() {
            discrepancy
        } else {
            None
        },
        lhs,
        rhs,
        coefficient_checks: Vec::new(),
        notes,
        elapsed: start.elapsed(),
    })
}

/// One grid entry; parameter errors are kept, not thrown.
#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub theorem: TheoremId,
    pub params: TheoremParams,
    pub result: std::result::Result<VerificationReport, Error>,
}

pub type Grid = Vec<(TheoremId, TheoremParams)>;

/// Every theorem over small parameters.
pub fn default_grid() -> Grid {
    let mut g: Grid = vec![
        (TheoremId::T31, TheoremParams::none()),
        (TheoremId::T32, TheoremParams::none()),
    ];
    for t in [TheoremId::T33, TheoremId::T34] {
        g.extend((0..=3).map(|m| (t, TheoremParams::m0(m))));
    }
    for t in [TheoremId::T35, TheoremId::T36, TheoremId::T37] {
        g.extend((0..=2).map(|m| (t, TheoremParams::m0(m))));
    }
    for t in [TheoremId::T41, TheoremId::T42] {
        g.push((t, TheoremParams::ab(&[1], &[2])));
        g.push((t, TheoremParams::ab(&[1, 2], &[1, 1])));
    }
    for t in [TheoremId::T43, TheoremId::T44] {
        g.push((t, TheoremParams::ab(&[1], &[2])));
        g.push((t, TheoremParams::ab(&[2], &[1])));
    }
    g.push((TheoremId::Agw, TheoremParams::none()));
    g
}

/// Run a grid in parallel; results keep the grid order.
pub fn verify_all(grid: &Grid, opts: VerifyOptions) -> Vec<GridOutcome> {
    grid.par_iter()
        .map(|(t, p)| GridOutcome {
            theorem: *t,
            params: p.clone(),
            result: verify_theorem(*t, p, opts),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipliers_from_basis() {
        assert_eq!(
            relation_multipliers(6, whole(1)).unwrap(),
            ints(&[-504, 32])
        );
        assert_eq!(
            relation_multipliers(8, half(3)).unwrap(),
            ints(&[-7680, 140, 16])
        );
        assert_eq!(relation_multipliers(4, whole(1)).unwrap(), ints(&[240, 8]));
        assert_eq!(relation_multipliers(2, half(1)).unwrap(), ints(&[24]));
        assert_eq!(relation_multipliers(2, whole(1)).unwrap(), ints(&[24]));
        assert_eq!(
            relation_multipliers(6, half(1)).unwrap_err(),
            Error::RelationOrder { order: 4 }
        );
    }

    #[test]
    fn solve_zero_series() {
        let g = Geometry::tangent(4).unwrap();
        let s = QSeries::zero(g.ring(), whole(2));
        let r = solve_basis(&s, 6).unwrap();
        assert!(r.coefficients.iter().all(|(_, h)| h.is_zero()));
        assert!(r.residuals_vanish());
        assert_eq!(r.residuals.len(), 2);
    }

    #[test]
    fn tilde_constant_term_is_ahat() {
        // m0 = 0, d = 2: q^0 coefficient is {Ahat}^(4) = -p1/24
        let id = PipelineId::tilde(0, 1);
        let s = pipeline(&id, whole(1) + 1).unwrap();
        let g = id.geometry().unwrap();
        assert_eq!(
            s.coefficient(0).unwrap(),
            g.p1_tangent().scale(&frac(-1, 24))
        );
        let solve = solve_basis(&s, 2).unwrap();
        assert_eq!(solve.coefficients[0].1, g.p1_tangent().scale(&frac(1, 24)));
        assert!(solve.residuals_vanish());
    }

    #[test]
    fn positivity_constraint() {
        let err = PipelineId::P2Tilde { n: 1, d: 2 }.validate().unwrap_err();
        assert!(err.to_string().contains("d - (2n + (1 - (-1)^d)/2) > 0"));
    }

    #[test]
    fn fit_finds_exact_combination() {
        let g = Geometry::with_plane(4, false).unwrap();
        let t = BundleExpr::gen("T").ch(&g).unwrap();
        let x = BundleExpr::gen("xi").ch(&g).unwrap();
        let target = t.scale_int(3).try_sub(&x.scale(&frac(1, 2))).unwrap();
        assert_eq!(
            fit_combination(&target, &[t.clone(), x.clone()]).unwrap(),
            vec![int(3), frac(-1, 2)]
        );
        assert!(fit_combination(&t, &[x]).is_none());
    }

    #[test]
    fn theorem_ids_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("3.9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn sparse_fit_prefers_single_term() {
        let g = Geometry::with_powers(4, &[1, 2]).unwrap();
        let cands: Vec<Form> = ["xi^1", "xi^2"]
            .iter()
            .map(|n| BundleExpr::gen(n).ch(&g).unwrap())
            .chain(std::iter::once(Form::one(g.ring())))
            .collect();
        // c-degree stops at c^2, so xi^2 is also 4*xi^1 - 6
        let target = cands[1].clone();
        let x = fit_sparse(&target, &cands).unwrap();
        assert_eq!(x, vec![int(0), int(1), int(0)]);
    }

    #[test]
    fn lhat_readings() {
        let g = Geometry::tangent(4).unwrap();
        let full = LhatNormalization::FullRoot.lhat(&g).unwrap();
        assert_eq!(full, LhatNormalization::HalfRootScaled.lhat(&g).unwrap());
        let half = LhatNormalization::HalfRoot.lhat(&g).unwrap();
        assert_eq!(full, half.scale_int(4));
        assert_eq!(full.component(0), Form::int(g.ring(), 4));
    }

    #[test]
    fn agw_exact_multipliers() {
        let r = verify_agw(&TheoremParams::none()).unwrap();
        assert!(r.derived_holds);
        assert_eq!(r.derived_multipliers, ints(&[8, -32]));
        assert!(!r.printed_matches);
    }
}
