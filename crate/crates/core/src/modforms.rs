//! Theta constants, the weight-2 Eisenstein series and the level-2 forms
//! `delta_i`, `epsilon_i`, all as exact rational q-series.
//!
//! Theta numbering follows the product convention
//!
//! ```text
//! theta_1(0) = 2 q^{1/8} prod (1 - q^j)(1 + q^j)^2
//! theta_2(0) =           prod (1 - q^j)(1 - q^{j-1/2})^2
//! theta_3(0) =           prod (1 - q^j)(1 + q^{j-1/2})^2
//! ```
//!
//! and the ring of modular forms over `Gamma^0(2)` is generated by
//! `8 delta_2 = -1 - 24 q^{1/2} - ...` and `epsilon_2 = q^{1/2} + ...`.

use std::fmt;

use crate::error::{Error, Result};
use crate::qseries::{QSeries, EIGHTHS};
use crate::rational::{self, frac, int, Rational};

pub type RSeries = QSeries<Rational>;

/// `prod_{j >= 1} (1 + sign * q^{j - offset})^power` with exponents in eighths.
fn eta_like(offset_eighths: i64, sign: i64, power: i64, order: i64) -> Result<RSeries> {
    let mut acc = RSeries::one(&(), order);
    let mut j = 1;
    loop {
        let e = EIGHTHS * j - offset_eighths;
        if e >= order {
            break;
        }
        let factor = RSeries::from_terms(&(), [(0, int(1)), (e, int(sign))], order);
        acc = acc.mul(&factor.pow(power)?)?;
        j += 1;
    }
    Ok(acc)
}

/// `theta_j(0, tau)` for `j` in `1..=3`, exact below `order` (eighths).
pub fn theta_const(j: u8, order: i64) -> Result<RSeries> {
    let base = eta_like(0, -1, 1, order)?;
    match j {
        1 => {
            let p = base.mul(&eta_like(0, 1, 2, order)?)?;
            let pre = RSeries::monomial(&(), 1, int(2), order);
            pre.mul(&p)
        }
        2 => base.mul(&eta_like(4, -1, 2, order)?),
        3 => base.mul(&eta_like(4, 1, 2, order)?),
        _ => Err(Error::InvalidParameters(format!(
            "theta index {j} not in 1..=3"
        ))),
    }
}

/// `theta'(0, tau) / pi = 2 q^{1/8} prod (1 - q^j)^3`.
///
/// Differentiating the product for `theta(v, tau)` at `v = 0` only hits the
/// `sin(pi v)` prefactor, since `theta(0, tau) = 0`.
pub fn theta_prime_normalized(order: i64) -> Result<RSeries> {
    let p = eta_like(0, -1, 3, order)?;
    RSeries::monomial(&(), 1, int(2), order).mul(&p)
}

/// Divisor sum `sigma_1(n)`.
pub fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// `E_2(tau) = 1 - 24 sum sigma_1(n) q^n`.
pub fn eisenstein_e2(order: i64) -> RSeries {
    let terms = std::iter::once((0, int(1))).chain(
        (1..)
            .map(|n: i64| (EIGHTHS * n, n))
            .take_while(|(e, _)| *e < order)
            .map(|(e, n)| (e, int(-24 * sigma1(n as u64) as i64))),
    );
    RSeries::from_terms(&(), terms, order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Delta,
    Epsilon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModFormId {
    family: Family,
    index: u8,
}

impl ModFormId {
    pub fn new(family: Family, index: u8) -> Result<Self> {
        if !(1..=3).contains(&index) {
            return Err(Error::InvalidParameters(format!(
                "modular form index {index} not in 1..=3"
            )));
        }
        Ok(ModFormId { family, index })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    /// All six forms in table order.
    pub fn all() -> Vec<ModFormId> {
        (1..=3)
            .flat_map(|i| {
                [Family::Delta, Family::Epsilon].map(|f| ModFormId {
                    family: f,
                    index: i,
                })
            })
            .collect()
    }

    /// Weight of the form: 2 for `delta`, 4 for `epsilon`.
    pub fn weight(&self) -> u32 {
        match self.family {
            Family::Delta => 2,
            Family::Epsilon => 4,
        }
    }
}

impl fmt::Display for ModFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Delta => "delta",
            Family::Epsilon => "epsilon",
        };
        write!(f, "{}{}", name, self.index)
    }
}

impl std::str::FromStr for ModFormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = if let Some(r) = s.strip_prefix("delta") {
            (Family::Delta, r)
        } else if let Some(r) = s.strip_prefix("epsilon") {
            (Family::Epsilon, r)
        } else {
            return Err(Error::UnknownId(s.to_string()));
        };
        let index: u8 = rest.parse().map_err(|_| Error::UnknownId(s.to_string()))?;
        ModFormId::new(family, index)
    }
}

/// q-expansion of `delta_i` or `epsilon_i` from fourth powers of theta constants.
pub fn modform(id: ModFormId, order: i64) -> Result<RSeries> {
    let t4 = |j: u8| theta_const(j, order)?.pow(4);
    match (id.family, id.index) {
        (Family::Delta, 1) => Ok(t4(2)?.add(&t4(3)?)?.scale(&frac(1, 8))),
        (Family::Epsilon, 1) => Ok(t4(2)?.mul(&t4(3)?)?.scale(&frac(1, 16))),
        (Family::Delta, 2) => Ok(t4(1)?.add(&t4(3)?)?.scale(&frac(-1, 8))),
        (Family::Epsilon, 2) => Ok(t4(1)?.mul(&t4(3)?)?.scale(&frac(1, 16))),
        (Family::Delta, 3) => Ok(t4(1)?.sub(&t4(2)?)?.scale(&frac(1, 8))),
        (Family::Epsilon, 3) => Ok(t4(1)?.mul(&t4(2)?)?.scale(&frac(-1, 16))),
        _ => unreachable!("index validated on construction"),
    }
}

/// A monomial `(8 delta_2)^a * epsilon_2^b` of weight `2a + 4b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisMonomial {
    pub delta2_power: u32,
    pub epsilon2_power: u32,
}

impl BasisMonomial {
    pub fn weight(&self) -> u32 {
        2 * self.delta2_power + 4 * self.epsilon2_power
    }

    /// Lowest exponent of the expansion, in eighths: `q^{b/2}`.
    pub fn pivot(&self) -> i64 {
        4 * self.epsilon2_power as i64
    }

    /// Leading coefficient `(-1)^a`.
    pub fn leading_sign(&self) -> i64 {
        if self.delta2_power % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn expansion(&self, order: i64) -> Result<RSeries> {
        let d = modform(ModFormId::new(Family::Delta, 2)?, order)?.scale(&int(8));
        let e = modform(ModFormId::new(Family::Epsilon, 2)?, order)?;
        d.pow(self.delta2_power as i64)?
            .mul(&e.pow(self.epsilon2_power as i64)?)
    }
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.delta2_power {
            0 => {}
            1 => parts.push("(8delta2)".to_string()),
            a => parts.push(format!("(8delta2)^{a}")),
        }
        match self.epsilon2_power {
            0 => {}
            1 => parts.push("epsilon2".to_string()),
            b => parts.push(format!("epsilon2^{b}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Monomial basis of the weight-`weight` forms over `Gamma^0(2)`, ordered by
/// increasing `epsilon_2` power so that monomial `b` is pivoted at `q^{b/2}`.
pub fn gamma0_basis(weight: i64, order: i64) -> Result<Vec<(BasisMonomial, RSeries)>> {
    if weight <= 0 || weight % 2 != 0 {
        return Err(Error::BadWeight(weight));
    }
    (0..=weight / 4)
        .map(|b| {
            let m = BasisMonomial {
                delta2_power: ((weight - 4 * b) / 2) as u32,
                epsilon2_power: b as u32,
            };
            Ok((m, m.expansion(order)?))
        })
        .collect()
}

/// Leading coefficient of a basis expansion, checked against `(-1)^a`.
pub fn leading_coefficient(m: &BasisMonomial, s: &RSeries) -> Option<Rational> {
    let c = s.coefficient(m.pivot()).ok()?;
    let lower_vanish = s.floor() == Some(m.pivot());
    (lower_vanish && c == int(m.leading_sign())).then_some(c)
}

/// Rational value of an exact series coefficient as `p/q` text.
pub fn render_coefficient(s: &RSeries, e: i64) -> Result<String> {
    Ok(rational::render(&s.coefficient(e)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{half, whole};

    /// theta constants as lattice sums, independent of the product route.
    fn theta_sum_oracle(j: u8, order: i64) -> RSeries {
        let mut terms = Vec::new();
        for n in -40i64..=40 {
            match j {
                // sum over half-integers: q^{(n+1/2)^2/2} = q^{(2n+1)^2/8}
                1 => terms.push(((2 * n + 1).pow(2), int(1))),
                2 => terms.push((4 * n * n, int(if n % 2 == 0 { 1 } else { -1 }))),
                3 => terms.push((4 * n * n, int(1))),
                _ => unreachable!(),
            }
        }
        RSeries::from_terms(&(), terms, order)
    }

    #[test]
    fn theta_products_match_lattice_sums() {
        for j in 1..=3 {
            assert_eq!(
                theta_const(j, 160).unwrap(),
                theta_sum_oracle(j, 160),
                "theta_{j}"
            );
        }
        let t3 = theta_const(3, 40).unwrap();
        assert_eq!(t3.coefficient(half(1)).unwrap(), int(2));
        assert_eq!(t3.coefficient(whole(1)).unwrap(), int(0));
        assert_eq!(t3.coefficient(whole(2)).unwrap(), int(2));
        let t2 = theta_const(2, 40).unwrap();
        assert_eq!(t2.coefficient(half(1)).unwrap(), int(-2));
        assert_eq!(t2.coefficient(whole(2)).unwrap(), int(2));
        let t1 = theta_const(1, 40).unwrap();
        assert_eq!(t1.floor(), Some(1));
        assert_eq!(t1.coefficient(1).unwrap(), int(2));
        assert!(theta_const(4, 8).is_err());
    }

    /// Jacobi: prod (1-q^j)^3 = sum_{n>=0} (-1)^n (2n+1) q^{n(n+1)/2}.
    #[test]
    fn theta_prime_oracle() {
        let order = 200;
        let mut terms = Vec::new();
        for n in 0i64..40 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            terms.push((1 + 4 * n * (n + 1), int(2 * sign * (2 * n + 1))));
        }
        let oracle = RSeries::from_terms(&(), terms, order);
        let tp = theta_prime_normalized(order).unwrap();
        assert_eq!(tp, oracle);
        assert_eq!(tp.coefficient(1).unwrap(), int(2));
        assert_eq!(tp.coefficient(9).unwrap(), int(-6));
    }

    #[test]
    fn jacobi_identity() {
        let order = whole(20);
        let lhs = theta_prime_normalized(order).unwrap();
        let rhs = (1..=3)
            .map(|j| theta_const(j, order).unwrap())
            .reduce(|a, b| a.mul(&b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn e2_against_divisor_enumeration() {
        let e2 = eisenstein_e2(whole(30));
        assert_eq!(e2.coefficient(0).unwrap(), int(1));
        assert_eq!(e2.coefficient(whole(1)).unwrap(), int(-24));
        assert_eq!(e2.coefficient(whole(2)).unwrap(), int(-72));
        assert_eq!(e2.coefficient(whole(3)).unwrap(), int(-96));
        for n in 1..30u64 {
            let brute: u64 = (1..=n).filter(|d| n % d == 0).sum();
            assert_eq!(sigma1(n), brute);
            assert_eq!(
                e2.coefficient(whole(n as i64)).unwrap(),
                int(-24 * brute as i64)
            );
        }
        assert!(e2.on_half_lattice());
    }

    #[test]
    fn fourier_tables() {
        let order = whole(5);
        let get = |s: &str, e: i64| {
            modform(s.parse().unwrap(), order)
                .unwrap()
                .coefficient(e)
                .unwrap()
        };
        assert_eq!(get("delta1", 0), frac(1, 4));
        assert_eq!(get("delta1", half(1)), int(0));
        assert_eq!(get("delta1", whole(1)), int(6));
        assert_eq!(get("epsilon1", 0), frac(1, 16));
        assert_eq!(get("epsilon1", whole(1)), int(-1));
        assert_eq!(get("delta2", 0), frac(-1, 8));
        assert_eq!(get("delta2", half(1)), int(-3));
        assert_eq!(get("epsilon2", 0), int(0));
        assert_eq!(get("epsilon2", half(1)), int(1));
        assert_eq!(get("epsilon2", whole(1)), int(8));
        assert_eq!(get("delta3", 0), frac(-1, 8));
        assert_eq!(get("delta3", half(1)), int(3));
        assert_eq!(get("epsilon3", 0), int(0));
        assert_eq!(get("epsilon3", half(1)), int(-1));
        for id in ModFormId::all() {
            assert!(modform(id, order).unwrap().on_half_lattice(), "{id}");
        }
        let d8 = modform("delta2".parse().unwrap(), order)
            .unwrap()
            .scale(&int(8));
        assert_eq!(
            d8.truncate(whole(1) + 1),
            RSeries::from_terms(&(), [(0, int(-1)), (4, int(-24)), (8, int(-24))], 9)
        );
    }

    #[test]
    fn t_shift_laws() {
        let order = whole(10);
        let f = |s: &str| modform(s.parse().unwrap(), order).unwrap();
        assert_eq!(f("delta2").t_shift().unwrap(), f("delta3"));
        assert_eq!(f("epsilon2").t_shift().unwrap(), f("epsilon3"));
        assert_eq!(f("delta3").t_shift().unwrap(), f("delta2"));
        assert_eq!(f("epsilon3").t_shift().unwrap(), f("epsilon2"));
    }

    #[test]
    fn basis_enumeration() {
        let names = |w| {
            gamma0_basis(w, 40)
                .unwrap()
                .iter()
                .map(|(m, _)| m.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(6), ["(8delta2)^3", "(8delta2)*epsilon2"]);
        assert_eq!(
            names(8),
            ["(8delta2)^4", "(8delta2)^2*epsilon2", "epsilon2^2"]
        );
        assert_eq!(names(2), ["(8delta2)"]);
        assert_eq!(gamma0_basis(3, 40).unwrap_err(), Error::BadWeight(3));
        assert_eq!(gamma0_basis(0, 40).unwrap_err(), Error::BadWeight(0));
    }

    #[test]
    fn basis_is_triangular() {
        for w in (2..=16).step_by(2) {
            for (m, s) in gamma0_basis(w, 80).unwrap() {
                assert_eq!(m.weight() as i64, w);
                assert!(leading_coefficient(&m, &s).is_some(), "{m} at weight {w}");
            }
        }
    }

    #[test]
    fn parse_ids() {
        assert!("delta4".parse::<ModFormId>().is_err());
        assert!("gamma1".parse::<ModFormId>().is_err());
        assert_eq!(
            "epsilon3".parse::<ModFormId>().unwrap().to_string(),
            "epsilon3"
        );
    }
}
