//! Virtual bundles over explicit Chern roots, their Chern characters, and the
//! generating-function expansion of infinite `Lambda_t` / `S_t` tensor products.
//!
//! Every generator is declared in a [`Geometry`] with a list of roots
//! `multiplier * var`; the Chern character of a generator is `sum exp(root)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops;

use crate::error::{Error, Result};
use crate::formring::{kernel_series_scaled, Form, Kernel, Ring, RingSpec, Variable};
use crate::qseries::{QSeries, EIGHTHS};
use crate::rational::{int, Rational};

/// One Chern root `multiplier * var`. Multiplier zero is the trivial root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub var: usize,
    pub multiplier: i64,
}

/// Manifold dimension, ring and root assignments for every named generator.
#[derive(Clone, Debug)]
pub struct Geometry {
    ring: Ring,
    dim: u32,
    tm_vars: Vec<usize>,
    generators: BTreeMap<String, Vec<Root>>,
}

/// Generator name of `(xi^{a})_R (x) C`.
pub fn xi_power(a: i64) -> String {
    format!("xi^{a}")
}

/// The pair of roots `+-m*var`.
fn pair(var: usize, m: i64) -> [Root; 2] {
    [
        Root { var, multiplier: m },
        Root {
            var,
            multiplier: -m,
        },
    ]
}

impl Geometry {
    pub fn new(
        ring: Ring,
        dim: u32,
        tm_vars: Vec<usize>,
        generators: BTreeMap<String, Vec<Root>>,
    ) -> Result<Self> {
        if dim % 2 != 0 || tm_vars.len() as u32 != dim / 2 {
            return Err(Error::DimensionMismatch(format!(
                "dimension {dim} needs {} tangent roots, got {}",
                dim / 2,
                tm_vars.len()
            )));
        }
        for roots in generators.values() {
            if let Some(r) = roots
                .iter()
                .find(|r| r.var >= ring.num_vars() && r.multiplier != 0)
            {
                return Err(Error::UnknownVariable(format!("index {}", r.var)));
            }
        }
        Ok(Geometry {
            ring,
            dim,
            tm_vars,
            generators,
        })
    }

    fn build(
        dim: u32,
        truncation: i32,
        lines: &[(&str, bool)],
        gens: impl FnOnce(&[usize], &[usize]) -> Vec<(String, Vec<Root>)>,
    ) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "manifold dimension {dim} must be even and positive"
            )));
        }
        let d = (dim / 2) as usize;
        let mut variables: Vec<Variable> = (1..=d)
            .map(|j| Variable::polynomial(format!("x{j}")))
            .collect();
        for (name, laurent) in lines {
            variables.push(if *laurent {
                Variable::laurent(*name)
            } else {
                Variable::polynomial(*name)
            });
        }
        let ring = Ring::new(RingSpec {
            variables,
            truncation,
        })?;
        let tm: Vec<usize> = (0..d).collect();
        let line_vars: Vec<usize> = (d..d + lines.len()).collect();
        let mut generators = BTreeMap::new();
        generators.insert(
            "T".to_string(),
            tm.iter().flat_map(|&v| pair(v, 1)).collect(),
        );
        for (name, roots) in gens(&tm, &line_vars) {
            generators.insert(name, roots);
        }
        Geometry::new(ring, dim, tm, generators)
    }

    /// Tangent bundle only: generator `T` with roots `+-x_j`.
    pub fn tangent(dim: u32) -> Result<Self> {
        Self::build(dim, dim as i32, &[], |_, _| Vec::new())
    }

    /// Tangent bundle plus a rank-two real bundle `xi` with roots `+-c`.
    ///
    /// With `pole` the variable `c` admits negative powers and the ring keeps
    /// two degrees of headroom above `dim`, so that products with `1/c` stay
    /// exact through degree `dim`.
    pub fn with_plane(dim: u32, pole: bool) -> Result<Self> {
        let truncation = dim as i32 + if pole { 2 } else { 0 };
        Self::build(dim, truncation, &[("c", pole)], |_, l| {
            vec![("xi".to_string(), pair(l[0], 1).to_vec())]
        })
    }

    /// Tangent bundle plus `xi^{m}` (roots `+-m c`) for every distinct
    /// multiplier in `multipliers`, and `xi = xi^{1}`.
    pub fn with_powers(dim: u32, multipliers: &[i64]) -> Result<Self> {
        Self::with_powers_and_eta(dim, multipliers, false)
    }

    /// As [`Geometry::with_powers`], adding `eta` with roots `+-cbar`.
    pub fn with_powers_and_eta(dim: u32, multipliers: &[i64], eta: bool) -> Result<Self> {
        let lines: &[(&str, bool)] = if eta {
            &[("c", false), ("cbar", false)]
        } else {
            &[("c", false)]
        };
        let ms: Vec<i64> = multipliers.to_vec();
        Self::build(dim, dim as i32, lines, move |_, l| {
            let mut out = vec![("xi".to_string(), pair(l[0], 1).to_vec())];
            for m in ms {
                out.push((xi_power(m), pair(l[0], m).to_vec()));
            }
            if eta {
                out.push(("eta".to_string(), pair(l[1], 1).to_vec()));
            }
            out
        })
    }

    /// Same geometry in a ring with one more unused polynomial variable.
    pub fn with_spare_variable(&self) -> Result<Self> {
        let mut spec = self.ring.spec().clone();
        spec.variables.push(Variable::polynomial("spare"));
        let ring = Ring::new(spec)?;
        Geometry::new(
            ring,
            self.dim,
            self.tm_vars.clone(),
            self.generators.clone(),
        )
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn tm_vars(&self) -> &[usize] {
        &self.tm_vars
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.ring.var_index(name)
    }

    pub fn generator_names(&self) -> impl Iterator<Item = &str> {
        self.generators.keys().map(String::as_str)
    }

    pub fn roots(&self, name: &str) -> Result<&[Root]> {
        self.generators
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UndeclaredGenerator(name.to_string()))
    }

    pub fn rank(&self, name: &str) -> Result<i64> {
        Ok(self.roots(name)?.len() as i64)
    }

    /// `exp(root)` as a form.
    pub fn exp_root(&self, r: Root) -> Result<Form> {
        kernel_series_scaled(Kernel::Exp, &self.ring, r.var, r.multiplier)
    }

    /// `prod_j (x_j/2)/sinh(x_j/2)` over the tangent roots.
    pub fn ahat(&self) -> Result<Form> {
        let mut acc = Form::one(&self.ring);
        for &v in &self.tm_vars {
            acc = acc.try_mul(&kernel_series_scaled(Kernel::AhatFactor, &self.ring, v, 1)?)?;
        }
        Ok(acc)
    }

    /// `p_1(TM) = sum_j x_j^2`.
    pub fn p1_tangent(&self) -> Form {
        let mut acc = Form::zero(&self.ring);
        for &v in &self.tm_vars {
            let x = Form::var(&self.ring, v);
            acc = &acc + &(&x * &x);
        }
        acc
    }
}

/// A virtual bundle built from declared generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleExpr {
    Gen(String),
    Trivial(i64),
    Sum(Box<BundleExpr>, Box<BundleExpr>),
    Diff(Box<BundleExpr>, Box<BundleExpr>),
    Scale(i64, Box<BundleExpr>),
    Tensor(Box<BundleExpr>, Box<BundleExpr>),
    Lambda(u32, String),
    Sym(u32, String),
    Reduce(Box<BundleExpr>),
}

impl BundleExpr {
    pub fn gen(name: &str) -> Self {
        BundleExpr::Gen(name.to_string())
    }

    pub fn trivial(n: i64) -> Self {
        BundleExpr::Trivial(n)
    }

    /// `Lambda^k` of a generator; composite arguments are rejected.
    pub fn lambda(k: u32, arg: &BundleExpr) -> Result<Self> {
        match arg {
            BundleExpr::Gen(n) => Ok(BundleExpr::Lambda(k, n.clone())),
            other => Err(Error::InvalidParameters(format!(
                "exterior power of composite bundle `{other}`"
            ))),
        }
    }

    /// `S^k` of a generator; composite arguments are rejected.
    pub fn sym(k: u32, arg: &BundleExpr) -> Result<Self> {
        match arg {
            BundleExpr::Gen(n) => Ok(BundleExpr::Sym(k, n.clone())),
            other => Err(Error::InvalidParameters(format!(
                "symmetric power of composite bundle `{other}`"
            ))),
        }
    }

    pub fn scaled(self, n: i64) -> Self {
        BundleExpr::Scale(n, Box::new(self))
    }

    pub fn reduced(self) -> Self {
        BundleExpr::Reduce(Box::new(self))
    }

    /// Sum of a list; the empty sum is the zero bundle.
    pub fn sum(items: impl IntoIterator<Item = BundleExpr>) -> Self {
        items
            .into_iter()
            .reduce(|a, b| a + b)
            .unwrap_or(BundleExpr::Trivial(0))
    }

    pub fn rank(&self, g: &Geometry) -> Result<i64> {
        Ok(match self {
            BundleExpr::Gen(n) => g.rank(n)?,
            BundleExpr::Trivial(n) => *n,
            BundleExpr::Sum(a, b) => a.rank(g)? + b.rank(g)?,
            BundleExpr::Diff(a, b) => a.rank(g)? - b.rank(g)?,
            BundleExpr::Scale(k, a) => k * a.rank(g)?,
            BundleExpr::Tensor(a, b) => a.rank(g)? * b.rank(g)?,
            BundleExpr::Lambda(k, n) => binomial_u(g.rank(n)?, *k as i64),
            BundleExpr::Sym(k, n) => binomial_u(g.rank(n)? + *k as i64 - 1, *k as i64),
            BundleExpr::Reduce(_) => 0,
        })
    }

    /// Chern character in the ring of `g`.
    pub fn ch(&self, g: &Geometry) -> Result<Form> {
        let ring = g.ring();
        Ok(match self {
            BundleExpr::Gen(n) => {
                let mut acc = Form::zero(ring);
                for r in g.roots(n)? {
                    acc = acc.try_add(&g.exp_root(*r)?)?;
                }
                acc
            }
            BundleExpr::Trivial(n) => Form::int(ring, *n),
            BundleExpr::Sum(a, b) => a.ch(g)?.try_add(&b.ch(g)?)?,
            BundleExpr::Diff(a, b) => a.ch(g)?.try_sub(&b.ch(g)?)?,
            BundleExpr::Scale(k, a) => a.ch(g)?.scale_int(*k),
            BundleExpr::Tensor(a, b) => a.ch(g)?.try_mul(&b.ch(g)?)?,
            BundleExpr::Lambda(k, n) => {
                symmetric_functions(g, g.roots(n)?, PowerKind::Exterior, *k)?
                    .swap_remove(*k as usize)
            }
            BundleExpr::Sym(k, n) => symmetric_functions(g, g.roots(n)?, PowerKind::Symmetric, *k)?
                .swap_remove(*k as usize),
            BundleExpr::Reduce(a) => a.ch(g)?.try_sub(&Form::int(ring, a.rank(g)?))?,
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec: 0 = sum context, 1 = product context
        match self {
            BundleExpr::Gen(n) => f.write_str(n),
            BundleExpr::Trivial(n) if prec > 0 && *n < 0 => write!(f, "({n})"),
            BundleExpr::Trivial(n) => write!(f, "{n}"),
            BundleExpr::Sum(a, b) | BundleExpr::Diff(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 0)?;
                f.write_str(if matches!(self, BundleExpr::Sum(..)) {
                    " + "
                } else {
                    " - "
                })?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            BundleExpr::Scale(-1, a) => {
                f.write_str("-")?;
                a.fmt_prec(f, 1)
            }
            BundleExpr::Scale(k, a) => {
                write!(f, "{k}*")?;
                a.fmt_prec(f, 1)
            }
            BundleExpr::Tensor(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" (x) ")?;
                b.fmt_prec(f, 1)
            }
            BundleExpr::Lambda(k, n) => write!(f, "L{k}({n})"),
            BundleExpr::Sym(k, n) => write!(f, "S{k}({n})"),
            BundleExpr::Reduce(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, 1)
            }
        }
    }
}

impl fmt::Display for BundleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl ops::Add for BundleExpr {
    type Output = BundleExpr;
    fn add(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Sum(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for BundleExpr {
    type Output = BundleExpr;
    fn sub(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Diff(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for BundleExpr {
    type Output = BundleExpr;
    fn mul(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Tensor(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for BundleExpr {
    type Output = BundleExpr;
    fn neg(self) -> BundleExpr {
        BundleExpr::Scale(-1, Box::new(self))
    }
}

impl ops::Mul<BundleExpr> for i64 {
    type Output = BundleExpr;
    fn mul(self, rhs: BundleExpr) -> BundleExpr {
        BundleExpr::Scale(self, Box::new(rhs))
    }
}

fn binomial_u(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerKind {
    /// `Lambda_t`: `prod (1 + e^w t)`.
    Exterior,
    /// `S_t`: `prod 1/(1 - e^w t)`.
    Symmetric,
}

/// Truncated polynomial product in `t`, coefficients up to `t^k`.
fn tpoly_mul(a: &[Form], b: &[Form], k: usize) -> Result<Vec<Form>> {
    let ring = a[0].ring().clone();
    let mut out = vec![Form::zero(&ring); k + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(k + 1 - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].try_add(&x.try_mul(y)?)?;
            }
        }
    }
    Ok(out)
}

/// `e_0..=e_k` (exterior) or `h_0..=h_k` (symmetric) of `{exp(root)}` by
/// direct expansion of the generating product. Roots sharing a variable are
/// multiplied together first so that `+-` pairs cancel their odd terms early.
pub fn symmetric_functions(
    g: &Geometry,
    roots: &[Root],
    kind: PowerKind,
    k: u32,
) -> Result<Vec<Form>> {
    let k = k as usize;
    let ring = g.ring();
    let unit = |ring: &Ring| {
        let mut v = vec![Form::zero(ring); k + 1];
        v[0] = Form::one(ring);
        v
    };
    let mut by_var: BTreeMap<usize, Vec<Root>> = BTreeMap::new();
    for r in roots {
        by_var
            .entry(if r.multiplier == 0 { usize::MAX } else { r.var })
            .or_default()
            .push(*r);
    }
    let mut acc = unit(ring);
    for group in by_var.values() {
        let mut local = unit(ring);
        for r in group {
            let e = g.exp_root(*r)?;
            let factor: Vec<Form> = match kind {
                PowerKind::Exterior => {
                    let mut f = unit(ring);
                    if k >= 1 {
                        f[1] = e;
                    }
                    f
                }
                PowerKind::Symmetric => {
                    let mut f = unit(ring);
                    for j in 1..=k {
                        f[j] = f[j - 1].try_mul(&e)?;
                    }
                    f
                }
            };
            local = tpoly_mul(&local, &factor, k)?;
        }
        acc = tpoly_mul(&acc, &local, k)?;
    }
    Ok(acc)
}

/// Power sums `p_j = sum exp(j * root)` for `j` in `1..=k`.
pub fn power_sums(g: &Geometry, roots: &[Root], k: u32) -> Result<Vec<Form>> {
    (1..=k as i64)
        .map(|j| {
            let mut acc = Form::zero(g.ring());
            for r in roots {
                acc = acc.try_add(&g.exp_root(Root {
                    var: r.var,
                    multiplier: j * r.multiplier,
                })?)?;
            }
            Ok(acc)
        })
        .collect()
}

/// `e_0..=e_k` recovered from power sums by Newton's identities
/// `m e_m = sum_{i=1}^m (-1)^{i-1} e_{m-i} p_i`.
pub fn elementary_from_power_sums(g: &Geometry, roots: &[Root], k: u32) -> Result<Vec<Form>> {
    let p = power_sums(g, roots, k)?;
    let mut e = vec![Form::one(g.ring())];
    for m in 1..=k as usize {
        let mut acc = Form::zero(g.ring());
        for i in 1..=m {
            let term = e[m - i].try_mul(&p[i - 1])?;
            acc = if i % 2 == 1 {
                acc.try_add(&term)?
            } else {
                acc.try_sub(&term)?
            };
        }
        e.push(acc.scale(&Rational::new(1.into(), (m as i64).into())));
    }
    Ok(e)
}

/// Roots of a generator or of a trivial bundle `C^n` (`n` zero roots).
fn plain_roots(e: &BundleExpr, g: &Geometry) -> Result<Vec<Root>> {
    match e {
        BundleExpr::Gen(n) => Ok(g.roots(n)?.to_vec()),
        BundleExpr::Trivial(n) if *n >= 0 => Ok(vec![
            Root {
                var: 0,
                multiplier: 0
            };
            *n as usize
        ]),
        other => Err(Error::InvalidParameters(format!(
            "`{other}` has no explicit roots"
        ))),
    }
}

/// Whether `ch(S_t(E)) * ch(Lambda_{-t}(E)) = 1` through `t^k`.
pub fn lambda_st_product_check(e: &BundleExpr, g: &Geometry, k: u32) -> Result<bool> {
    let roots = plain_roots(e, g)?;
    let h = symmetric_functions(g, &roots, PowerKind::Symmetric, k)?;
    let mut lam = symmetric_functions(g, &roots, PowerKind::Exterior, k)?;
    for (j, f) in lam.iter_mut().enumerate() {
        if j % 2 == 1 {
            *f = f.neg();
        }
    }
    let prod = tpoly_mul(&h, &lam, k as usize)?;
    Ok(prod.iter().enumerate().all(|(j, f)| {
        if j == 0 {
            *f == Form::one(g.ring())
        } else {
            f.is_zero()
        }
    }))
}

/// One infinite family `(x)_{n>=1} Op_{sign q^{n - offset}}(W~)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpec {
    pub kind: PowerKind,
    /// `+1` or `-1`, multiplying `t`.
    pub sign: i64,
    /// Offset in eighths: `0` for `q^n`, `4` for `q^{n-1/2}`.
    pub offset: i64,
    /// `W` as integer combination of generators, kept as written.
    pub argument: Vec<(String, i64)>,
}

impl FactorSpec {
    fn new(kind: PowerKind, sign: i64, offset: i64, argument: &[(&str, i64)]) -> Self {
        FactorSpec {
            kind,
            sign,
            offset,
            argument: argument.iter().map(|(n, m)| (n.to_string(), *m)).collect(),
        }
    }

    /// Virtual rank of `W`, the amount removed by the reduction.
    pub fn rank_shift(&self, g: &Geometry) -> Result<i64> {
        self.argument.iter().map(|(n, m)| Ok(m * g.rank(n)?)).sum()
    }

    /// Root multiplicities of `W` with equal roots merged and zeros dropped.
    pub fn root_multiplicities(&self, g: &Geometry) -> Result<BTreeMap<Root, i64>> {
        let mut out: BTreeMap<Root, i64> = BTreeMap::new();
        for (n, m) in &self.argument {
            for r in g.roots(n)? {
                let key = if r.multiplier == 0 {
                    Root {
                        var: 0,
                        multiplier: 0,
                    }
                } else {
                    *r
                };
                *out.entry(key).or_insert(0) += m;
            }
        }
        out.retain(|_, m| *m != 0);
        Ok(out)
    }

    /// Exponents (eighths) `8n - offset` for `n >= 1` below `order`.
    pub fn exponents(&self, order: i64) -> impl Iterator<Item = i64> {
        let off = self.offset;
        (1..)
            .map(move |n| EIGHTHS * n - off)
            .take_while(move |e| *e < order)
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            PowerKind::Exterior => "Lambda",
            PowerKind::Symmetric => "S",
        };
        let sign = if self.sign < 0 { "-" } else { "" };
        let t = if self.offset == 0 {
            "q^n".to_string()
        } else {
            "q^{n-1/2}".to_string()
        };
        let arg: Vec<String> = self
            .argument
            .iter()
            .map(|(n, m)| match m {
                1 => format!("~{n}"),
                -1 => format!("-~{n}"),
                m => format!("{m}~{n}"),
            })
            .collect();
        write!(
            f,
            "{op}_{{{sign}{t}}}({})",
            arg.join(" + ").replace("+ -", "- ")
        )
    }
}

/// Which infinite product is meant; determines the factor list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaLabel {
    /// `S_{q^n}(~T + ~xi) (x) Lambda_{-q^{m-1/2}}(~T + ~xi)`.
    Trivial,
    /// As [`ThetaLabel::Trivial`] with the second argument `~T + ~xi - 2~xi`,
    /// times `Lambda_{q^{r-1/2}}(~xi) (x) Lambda_{q^s}(~xi)`.
    Xi,
    /// `S_{q^n}(~T - m0 ~xi) (x) Lambda_{-q^{m-1/2}}(~T - m0 ~xi)`.
    Twisted { m0: u32 },
    /// `S_{q^n}(~T)` with `Lambda_{q^m}(~xi^{b_t})`, `Lambda_{q^{r-1/2}}(~xi^{b_t})`,
    /// `Lambda_{-q^{s-1/2}}(~xi^{a_t})` for every `t`.
    Powers { a: Vec<i64>, b: Vec<i64> },
    /// `S_{q^n}(~T)`, `Lambda_{q^m}(~xi^b + ~eta)`, `Lambda_{q^{r-1/2}}(~xi^b + ~eta)`,
    /// `Lambda_{-q^{s-1/2}}(~xi^a - 2~eta)`.
    PowersEta { a: i64, b: i64 },
}

impl fmt::Display for ThetaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaLabel::Trivial => f.write_str("trivial"),
            ThetaLabel::Xi => f.write_str("xi"),
            ThetaLabel::Twisted { m0 } => write!(f, "twisted(m0={m0})"),
            ThetaLabel::Powers { a, b } => write!(f, "powers(a={a:?},b={b:?})"),
            ThetaLabel::PowersEta { a, b } => write!(f, "powers-eta(a={a},b={b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaProductSpec {
    pub label: ThetaLabel,
    pub factors: Vec<FactorSpec>,
}

impl ThetaProductSpec {
    pub fn new(label: ThetaLabel) -> Result<Self> {
        use PowerKind::*;
        let factors = match &label {
            ThetaLabel::Trivial => vec![
                FactorSpec::new(Symmetric, 1, 0, &[("T", 1), ("xi", 1)]),
                FactorSpec::new(Exterior, -1, 4, &[("T", 1), ("xi", 1)]),
            ],
            ThetaLabel::Xi => vec![
                FactorSpec::new(Symmetric, 1, 0, &[("T", 1), ("xi", 1)]),
                FactorSpec::new(Exterior, -1, 4, &[("T", 1), ("xi", 1), ("xi", -2)]),
                FactorSpec::new(Exterior, 1, 4, &[("xi", 1)]),
                FactorSpec::new(Exterior, 1, 0, &[("xi", 1)]),
            ],
            ThetaLabel::Twisted { m0 } => {
                let m = -(*m0 as i64);
                vec![
                    FactorSpec::new(Symmetric, 1, 0, &[("T", 1), ("xi", m)]),
                    FactorSpec::new(Exterior, -1, 4, &[("T", 1), ("xi", m)]),
                ]
            }
            ThetaLabel::Powers { a, b } => {
                if a.len() != b.len() || a.is_empty() {
                    return Err(Error::InvalidParameters(format!(
                        "a and b must be nonempty of equal length (got {} and {})",
                        a.len(),
                        b.len()
                    )));
                }
                let mut f = vec![FactorSpec::new(Symmetric, 1, 0, &[("T", 1)])];
                for bt in b {
                    f.push(FactorSpec::new(Exterior, 1, 0, &[(&xi_power(*bt), 1)]));
                }
                for bt in b {
                    f.push(FactorSpec::new(Exterior, 1, 4, &[(&xi_power(*bt), 1)]));
                }
                for at in a {
                    f.push(FactorSpec::new(Exterior, -1, 4, &[(&xi_power(*at), 1)]));
                }
                f
            }
            ThetaLabel::PowersEta { a, b } => vec![
                FactorSpec::new(Symmetric, 1, 0, &[("T", 1)]),
                FactorSpec::new(Exterior, 1, 0, &[(&xi_power(*b), 1), ("eta", 1)]),
                FactorSpec::new(Exterior, 1, 4, &[(&xi_power(*b), 1), ("eta", 1)]),
                FactorSpec::new(Exterior, -1, 4, &[(&xi_power(*a), 1), ("eta", -2)]),
            ],
        };
        Ok(ThetaProductSpec { label, factors })
    }

    /// Same product with the factor families listed in another order.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ThetaProductSpec {
            label: self.label.clone(),
            factors: perm.iter().map(|&i| self.factors[i].clone()).collect(),
        }
    }
}

/// A form-valued q-series kept as `scalar * prod_v S_v`, where each `S_v`
/// involves only variable `v`. Multiplying out is deferred so that callers
/// can fold further per-variable factors in cheaply and extract a single
/// degree at the end.
#[derive(Clone, Debug)]
pub struct FactoredSeries {
    ring: Ring,
    order: i64,
    scalar: QSeries<Rational>,
    factors: BTreeMap<usize, QSeries<Form>>,
}

impl FactoredSeries {
    pub fn one(ring: &Ring, order: i64) -> Self {
        FactoredSeries {
            ring: ring.clone(),
            order,
            scalar: QSeries::one(&(), order),
            factors: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    fn slot(&mut self, var: usize) -> &mut QSeries<Form> {
        let (ring, order) = (self.ring.clone(), self.order);
        self.factors
            .entry(var)
            .or_insert_with(|| QSeries::one(&ring, order))
    }

    pub fn mul_scalar(&mut self, s: &QSeries<Rational>) -> Result<()> {
        self.scalar = self.scalar.mul(s)?;
        Ok(())
    }

    /// Multiply by a series whose coefficients involve only `var`.
    pub fn mul_series(&mut self, var: usize, s: &QSeries<Form>) -> Result<()> {
        let slot = self.slot(var);
        *slot = slot.mul(s)?;
        Ok(())
    }

    /// Multiply by a form that involves only `var`.
    pub fn mul_form(&mut self, var: usize, f: &Form) -> Result<()> {
        let slot = self.slot(var);
        *slot = slot.map(|c| c * f);
        Ok(())
    }

    fn partial_product(&self) -> Result<(QSeries<Form>, Option<&QSeries<Form>>)> {
        let mut acc = self.scalar.to_forms(&self.ring);
        let mut it = self.factors.values().peekable();
        while let Some(s) = it.next() {
            if it.peek().is_none() {
                return Ok((acc, Some(s)));
            }
            acc = acc.mul(s)?;
        }
        Ok((acc, None))
    }

    pub fn expand(&self) -> Result<QSeries<Form>> {
        match self.partial_product()? {
            (acc, Some(last)) => acc.mul(last),
            (acc, None) => Ok(acc),
        }
    }

    /// The degree-`n` part of every coefficient of the full product.
    pub fn component(&self, n: i32) -> Result<QSeries<Form>> {
        match self.partial_product()? {
            (acc, Some(last)) => acc.mul_component(last, n),
            (acc, None) => Ok(acc.component(n)),
        }
    }
}

/// The factored Chern character of an infinite product, exact below `order`.
///
/// For `t = sign q^e` a symmetric family contributes
/// `prod_w (1 - e^w t)^{-mult} (1 - t)^{rank}` and an exterior family
/// `prod_w (1 + e^w t)^{mult} (1 + t)^{-rank}`.
pub fn theta_product_factored(
    spec: &ThetaProductSpec,
    g: &Geometry,
    order: i64,
) -> Result<FactoredSeries> {
    let ring = g.ring();
    let mut out = FactoredSeries::one(ring, order);
    let mut exp_cache: BTreeMap<Root, Form> = BTreeMap::new();
    for factor in &spec.factors {
        let rank = factor.rank_shift(g)?;
        let roots = factor.root_multiplicities(g)?;
        // t-coefficient sign inside (1 +- e^w t)
        let (inner, outer) = match factor.kind {
            PowerKind::Symmetric => (-factor.sign, -1),
            PowerKind::Exterior => (factor.sign, 1),
        };
        for e in factor.exponents(order) {
            let base = QSeries::from_terms(&(), [(0, int(1)), (e, int(inner))], order);
            out.mul_scalar(&base.pow(-outer * rank)?)?;
            for (root, mult) in &roots {
                if root.multiplier == 0 {
                    out.mul_scalar(&base.pow(outer * mult)?)?;
                    continue;
                }
                if !exp_cache.contains_key(root) {
                    exp_cache.insert(*root, g.exp_root(*root)?);
                }
                let ew = exp_cache[root].scale_int(inner);
                let s = QSeries::from_terms(ring, [(0, Form::one(ring)), (e, ew)], order);
                out.mul_series(root.var, &s.pow(outer * mult)?)?;
            }
        }
    }
    Ok(out)
}

/// `ch` of an infinite product as a form-valued q-series below `order`.
pub fn theta_product_expand(
    spec: &ThetaProductSpec,
    g: &Geometry,
    order: i64,
) -> Result<QSeries<Form>> {
    theta_product_factored(spec, g, order)?.expand()
}

/// Printed q-coefficients of the infinite products, as bundle expressions.
pub mod printed {
    use super::*;

    /// Identifier of a printed coefficient.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub enum PrintedId {
        /// Coefficient of `q^{j/2}` of the `xi` product (`with_xi`) or the
        /// trivial one, for a 10-manifold.
        A { j: u32, with_xi: bool },
        /// As `A`, for a 14-manifold.
        APrime { j: u32, with_xi: bool },
        /// Coefficient `j` of the twisted product on a manifold of dimension
        /// `2(2 m1 + m0)`.
        ATilde { j: u32, m0: u32, m1: u32 },
        /// Coefficient `j` of the powers product; `i = 1` for dimension 8,
        /// `i = 2` for dimension 12.
        B {
            i: u32,
            j: u32,
            a: Vec<i64>,
            b: Vec<i64>,
        },
        /// Coefficient `j` of the powers product with `eta`.
        BBar { i: u32, j: u32, a: i64, b: i64 },
    }

    impl fmt::Display for PrintedId {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let side = |x: bool| if x { "xi" } else { "C2" };
            match self {
                PrintedId::A { j, with_xi } => write!(f, "A{j}[{}]", side(*with_xi)),
                PrintedId::APrime { j, with_xi } => write!(f, "A'{j}[{}]", side(*with_xi)),
                PrintedId::ATilde { j, m0, m1 } => write!(f, "A~{j}[m0={m0},m1={m1}]"),
                PrintedId::B { i, j, a, b } => write!(f, "B{j}^{i}[a={a:?},b={b:?}]"),
                PrintedId::BBar { i, j, a, b } => write!(f, "Bbar{j}^{i}[a={a},b={b}]"),
            }
        }
    }

    fn g(n: &str) -> BundleExpr {
        BundleExpr::gen(n)
    }

    fn n(k: i64) -> BundleExpr {
        BundleExpr::trivial(k)
    }

    fn l(k: u32, name: &str) -> BundleExpr {
        BundleExpr::Lambda(k, name.to_string())
    }

    fn s(k: u32, name: &str) -> BundleExpr {
        BundleExpr::Sym(k, name.to_string())
    }

    fn unknown(id: &PrintedId) -> Error {
        Error::UnknownId(id.to_string())
    }

    fn a_family(id: &PrintedId, j: u32, with_xi: bool, dim: i64) -> Result<BundleExpr> {
        let (t, x) = (|| g("T"), || g("xi"));
        let tx = || t() * x();
        Ok(match (j, with_xi, dim) {
            (0, _, _) => n(1),
            (1, false, _) => -t() - x() + n(dim + 2),
            (1, true, _) => -t() + 2 * x() + n(dim - 4),
            (2, false, 10) => l(2, "T") + l(2, "xi") + tx() - 11 * t() - 11 * x() + n(66),
            (2, true, 10) => l(2, "T") - 2 * tx() + 2 * (x() * x()) - 5 * t() + 14 * x() + n(9),
            (2, false, 14) => l(2, "T") + l(2, "xi") + tx() - 15 * t() - 15 * x() + n(120),
            (2, true, 14) => l(2, "T") - 2 * tx() + 2 * (x() * x()) - 9 * t() + 22 * x() + n(39),
            (3, false, 14) => {
                -l(3, "T") - l(3, "xi") - t() * l(2, "xi") - x() * l(2, "T")
                    + 16 * l(2, "T")
                    + 16 * l(2, "xi")
                    - t() * t()
                    + 14 * tx()
                    - x() * x()
                    - 105 * t()
                    - 105 * x()
                    + n(567)
            }
            (3, true, 14) => {
                -l(3, "T") + l(3, "xi") + s(3, "xi")
                    - t() * x() * x()
                    - t() * l(2, "xi")
                    - t() * s(2, "xi")
                    + 2 * (x() * l(2, "T"))
                    + x() * l(2, "xi")
                    + x() * s(2, "xi")
                    + 10 * l(2, "T")
                    - t() * t()
                    - 20 * tx()
                    + 24 * (x() * x())
                    - 30 * t()
                    + 100 * x()
                    + n(70)
            }
            _ => return Err(unknown(id)),
        })
    }

    fn a_tilde(id: &PrintedId, j: u32, m0: u32, m1: u32) -> Result<BundleExpr> {
        let m = m0 as i64;
        let (t, x) = (|| g("T"), || g("xi"));
        let r = 4 * m1 as i64;
        let c2 = m * (m - 1) / 2;
        Ok(match (j, m1) {
            (0, 1..=4) => n(1),
            (1, 1..=4) => -t() + m * x() + n(r),
            (2, 1..=4) => {
                l(2, "T") + m * s(2, "xi") - m * (t() * x()) + c2 * (x() * x()) - (r - 1) * t()
                    + ((r - 1) * m) * x()
                    + n(r * (r - 1) / 2)
            }
            (3, 4) => {
                -l(3, "T") + m * s(3, "xi") - c2 * (t() * x() * x()) - m * (t() * s(2, "xi"))
                    + m * (x() * l(2, "T"))
                    + (m * m - m) * (x() * s(2, "xi"))
                    + 16 * l(2, "T")
                    + (16 * m) * s(2, "xi")
                    - t() * t()
                    - (14 * m) * (t() * x())
                    + (m * m * m + 4 * m * m - 6 * m) * (x() * x())
                    - 105 * t()
                    + (-2 * m * m * m + 6 * m * m + 101 * m) * x()
                    + n(4 * (m * m * m - 3 * m * m + 2 * m + 432) / 3)
            }
            _ => return Err(unknown(id)),
        })
    }

    fn b_family(id: &PrintedId, i: u32, j: u32, a: &[i64], b: &[i64]) -> Result<BundleExpr> {
        if a.len() != b.len() || a.is_empty() || !(1..=2).contains(&i) {
            return Err(unknown(id));
        }
        let k = a.len() as i64;
        let xa = |t: usize| g(&xi_power(a[t]));
        let xb = |t: usize| g(&xi_power(b[t]));
        let sum_a = || BundleExpr::sum((0..a.len()).map(xa));
        let sum_b = || BundleExpr::sum((0..b.len()).map(xb));
        Ok(match j {
            0 => n(1),
            1 => -sum_a() + sum_b(),
            2 => {
                let constant = -4 * (i as i64 + 1) - 4 * k * k + 4 * k;
                let mut e =
                    g("T") + n(constant) + sum_b() + (2 * k - 2) * sum_a() + (2 * k - 2) * sum_b();
                e = e + BundleExpr::sum(a.iter().map(|m| l(2, &xi_power(*m))));
                e = e + BundleExpr::sum(b.iter().map(|m| l(2, &xi_power(*m))));
                // sum_{s<t} (2 - A_s)(2 - A_t), written as prefix sums times the next term
                for t in 1..a.len() {
                    let prefix = n(2 * t as i64) - BundleExpr::sum((0..t).map(xa));
                    e = e + prefix * (n(2) - xa(t));
                }
                for t in 1..b.len() {
                    let prefix = BundleExpr::sum((0..t).map(xb)) - n(2 * t as i64);
                    e = e + prefix * (xb(t) - n(2));
                }
                e
            }
            _ => return Err(unknown(id)),
        })
    }

    fn b_bar(id: &PrintedId, i: u32, j: u32, a: i64, b: i64) -> Result<BundleExpr> {
        let (xa, xb, eta) = (|| g(&xi_power(a)), || g(&xi_power(b)), || g("eta"));
        Ok(match (i, j) {
            (1..=2, 0) => n(1),
            (1..=2, 1) => -xa() + xb() + 3 * eta() - n(6),
            (1..=2, 2) => {
                l(2, &xi_power(a)) + l(2, &xi_power(b)) - xa() * xb() - 3 * (xa() * eta())
                    + 3 * (xb() * eta())
                    + 4 * (eta() * eta())
                    + s(2, "eta")
                    + g("T")
                    + 6 * xa()
                    - 5 * xb()
                    - 17 * eta()
                    + n(if i == 1 { 7 } else { 3 })
            }
            _ => return Err(unknown(id)),
        })
    }

    /// The printed expression for `id`.
    pub fn printed_coefficient(id: &PrintedId) -> Result<BundleExpr> {
        match id {
            PrintedId::A { j, with_xi } => a_family(id, *j, *with_xi, 10),
            PrintedId::APrime { j, with_xi } => a_family(id, *j, *with_xi, 14),
            PrintedId::ATilde { j, m0, m1 } => a_tilde(id, *j, *m0, *m1),
            PrintedId::B { i, j, a, b } => b_family(id, *i, *j, a, b),
            PrintedId::BBar { i, j, a, b } => b_bar(id, *i, *j, *a, *b),
        }
    }
}
