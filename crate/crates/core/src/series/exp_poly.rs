//! Finite sums `e^{±Q(tD)/2} · Σ c·e^{λt}` with Gaussian-rational `c` and `λ`.
//!
//! The Gaussian prefactor is kept symbolic: a marker (`+Q/2`, `-Q/2` or none)
//! and the square `D²` it refers to. Products add the prefactor exponents,
//! quotients subtract them.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{parse_rational, Gaussian, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Marker {
    Plus,
    Minus,
    None,
}

impl Marker {
    pub fn as_str(self) -> &'static str {
        match self {
            Marker::Plus => "+Q/2",
            Marker::Minus => "-Q/2",
            Marker::None => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "+Q/2" => Ok(Marker::Plus),
            "-Q/2" => Ok(Marker::Minus),
            "none" => Ok(Marker::None),
            other => Err(Error::Parse(format!("unknown marker {other:?}"))),
        }
    }
}

/// Upper bound on long-division steps before a quotient is declared inexact.
const DIVISION_STEP_LIMIT: usize = 100_000;

#[derive(Clone, Debug)]
pub struct ExpPolynomial {
    marker: Marker,
    square: Rational,
    terms: BTreeMap<Gaussian, Gaussian>,
}

impl PartialEq for ExpPolynomial {
    /// Zero is zero whatever its prefactor; otherwise the net prefactor
    /// exponent and every term must agree.
    fn eq(&self, other: &Self) -> bool {
        if self.terms != other.terms {
            return false;
        }
        self.terms.is_empty() || self.quad() == other.quad()
    }
}

impl Eq for ExpPolynomial {}

impl ExpPolynomial {
    pub fn zero(marker: Marker, square: Rational) -> Self {
        let square = if marker == Marker::None {
            Rational::zero()
        } else {
            square
        };
        Self {
            marker,
            square,
            terms: BTreeMap::new(),
        }
    }

    /// The bare exponential sum with no Gaussian prefactor.
    pub fn plain() -> Self {
        Self::zero(Marker::None, Rational::zero())
    }

    pub fn constant(c: Gaussian) -> Self {
        Self::plain().with_term(Gaussian::zero(), c)
    }

    pub fn monomial(lambda: Gaussian, c: Gaussian) -> Self {
        Self::plain().with_term(lambda, c)
    }

    pub fn from_terms(
        marker: Marker,
        square: Rational,
        terms: impl IntoIterator<Item = (Gaussian, Gaussian)>,
    ) -> Self {
        let mut out = Self::zero(marker, square);
        for (lambda, c) in terms {
            out.add_term(lambda, &c);
        }
        out
    }

    pub fn with_term(mut self, lambda: Gaussian, c: Gaussian) -> Self {
        self.add_term(lambda, &c);
        self
    }

    pub fn add_term(&mut self, lambda: Gaussian, c: &Gaussian) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn marker(&self) -> Marker {
        self.marker
    }

    pub fn square(&self) -> &Rational {
        &self.square
    }

    /// Net coefficient `q` of the prefactor `e^{q t²/2}`.
    pub fn quad(&self) -> Rational {
        match self.marker {
            Marker::Plus => self.square.clone(),
            Marker::Minus => -self.square.clone(),
            Marker::None => Rational::zero(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<Gaussian, Gaussian> {
        &self.terms
    }

    pub fn coeff(&self, lambda: &Gaussian) -> Gaussian {
        self.terms
            .get(lambda)
            .cloned()
            .unwrap_or_else(Gaussian::zero)
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

    pub fn exponents(&self) -> impl Iterator<Item = &Gaussian> {
        self.terms.keys()
    }

    /// Sum of two exponential polynomials with the same prefactor.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.quad() != other.quad() {
            return Err(Error::Marker(format!(
                "cannot add {} ({}) and {} ({})",
                self.marker.as_str(),
                self.square,
                other.marker.as_str(),
                other.square
            )));
        }
        let mut out = self.clone();
        for (lambda, c) in &other.terms {
            out.add_term(lambda.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&Gaussian::from_int(-1)))
    }

    pub fn scale(&self, s: &Gaussian) -> Self {
        let mut out = Self::zero(self.marker, self.square.clone());
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(l, c)| (l.clone(), c * s)).collect();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (marker, square) = combine(self, other, false);
        let mut out = Self::zero(marker, square);
        for (la, ca) in &self.terms {
            for (lb, cb) in &other.terms {
                out.add_term(la + lb, &(ca * cb));
            }
        }
        out
    }

    /// Exact quotient in the ring of exponential polynomials, by long division
    /// on the lexicographic order of exponents. Fails when no exact quotient
    /// exists.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (lead_lambda, lead_c) = divisor
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::InexactDivision("division by zero".into()))?;
        let (marker, square) = combine(self, divisor, true);
        let mut quotient = Self::zero(marker, square);
        let Some(low_num) = self.terms.keys().next() else {
            return Ok(quotient);
        };
        let low_div = divisor.terms.keys().next().expect("non-empty divisor");
        let floor = low_num - low_div;

        let mut rem = self.terms.clone();
        let mut steps = 0usize;
        while let Some((lambda, c)) = rem.iter().next_back().map(|(l, c)| (l.clone(), c.clone())) {
            let q_lambda = &lambda - lead_lambda;
            if q_lambda < floor || steps >= DIVISION_STEP_LIMIT {
                return Err(Error::InexactDivision(format!(
                    "remainder term {c}·e^({lambda} t) is not divisible"
                )));
            }
            let q_c = &c / lead_c;
            for (dl, dc) in &divisor.terms {
                let key = &q_lambda + dl;
                let slot = rem.entry(key.clone()).or_insert_with(Gaussian::zero);
                *slot -= &(&q_c * dc);
                if slot.is_zero() {
                    rem.remove(&key);
                }
            }
            quotient.add_term(q_lambda, &q_c);
            steps += 1;
        }
        Ok(quotient)
    }

    /// Substitutes `t -> s·t`. The prefactor stays rational only when `s²` is
    /// real, so `s` must be real or purely imaginary.
    pub fn scale_argument(&self, s: &Gaussian) -> Result<Self> {
        let s_sq = s * s;
        if !s_sq.is_real() {
            return Err(Error::Marker(format!(
                "t -> ({s})t does not keep the Gaussian prefactor real"
            )));
        }
        let factor = s_sq.re;
        let (marker, square) = if self.marker == Marker::None || factor.is_zero() {
            (Marker::None, Rational::zero())
        } else if factor.is_positive() {
            (self.marker, &self.square * &factor)
        } else {
            let flipped = match self.marker {
                Marker::Plus => Marker::Minus,
                Marker::Minus => Marker::Plus,
                Marker::None => Marker::None,
            };
            (flipped, &self.square * (-factor))
        };
        Ok(Self {
            marker,
            square,
            terms: self.terms.iter().map(|(l, c)| (l * s, c.clone())).collect(),
        })
    }

    /// `c·e^{λt} -> c·e^{-λt}`.
    pub fn reflect(&self) -> Self {
        Self {
            marker: self.marker,
            square: self.square.clone(),
            terms: self.terms.iter().map(|(l, c)| (-l, c.clone())).collect(),
        }
    }

    /// True when `c(-λ) = sign·c(λ)` for every exponent: the function of `t`
    /// is even (`sign = 1`) or odd (`sign = -1`).
    pub fn has_parity(&self, sign: i64) -> bool {
        let s = Gaussian::from_int(sign);
        self.terms.iter().all(|(l, c)| self.coeff(&-l) == &s * c)
    }

    /// Taylor coefficients of `t^0 .. t^order`, prefactor included.
    pub fn expand(&self, order: usize) -> Vec<Gaussian> {
        let mut plain = vec![Gaussian::zero(); order + 1];
        for (lambda, c) in &self.terms {
            let mut term = c.clone();
            for (m, slot) in plain.iter_mut().enumerate() {
                if m > 0 {
                    term = &term * lambda;
                    term = term.scale(&Rational::new(1.into(), (m as i64).into()));
                }
                *slot += &term;
            }
        }
        let half_q = Gaussian::real(self.quad() / Rational::from_integer(2.into()));
        let mut gauss = vec![Gaussian::zero(); order + 1];
        let mut term = Gaussian::one();
        let mut k = 0usize;
        while 2 * k <= order {
            if k > 0 {
                term = &term * &half_q;
                term = term.scale(&Rational::new(1.into(), (k as i64).into()));
            }
            gauss[2 * k] = term.clone();
            k += 1;
        }
        (0..=order)
            .map(|n| (0..=n).map(|j| &gauss[j] * &plain[n - j]).sum())
            .collect()
    }

    /// Value at `t = πi/2` of the bracketed sum (prefactor excluded), for
    /// integer exponents: `e^{λπi/2} = i^λ`.
    pub fn sum_at_quarter_turn(&self) -> Option<Gaussian> {
        let mut acc = Gaussian::zero();
        for (lambda, c) in &self.terms {
            acc += &(c * &Gaussian::i_pow(lambda.as_integer()?));
        }
        Some(acc)
    }

    pub fn to_json(&self) -> ExpPolynomialJson {
        ExpPolynomialJson {
            marker: self.marker.as_str().to_string(),
            square: (self.marker != Marker::None).then(|| self.square.to_string()),
            terms: self
                .terms
                .iter()
                .map(|(l, c)| TermJson {
                    lambda: l.clone(),
                    c: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ExpPolynomialJson) -> Result<Self> {
        let marker = Marker::parse(&j.marker)?;
        let square = match &j.square {
            Some(s) => parse_rational(s)?,
            None => Rational::zero(),
        };
        Ok(Self::from_terms(
            marker,
            square,
            j.terms.iter().map(|t| (t.lambda.clone(), t.c.clone())),
        ))
    }
}

/// Prefactor of a product (`divide = false`) or quotient (`divide = true`).
fn combine(a: &ExpPolynomial, b: &ExpPolynomial, divide: bool) -> (Marker, Rational) {
    let sign = if divide {
        -Rational::one()
    } else {
        Rational::one()
    };
    match (a.marker, b.marker) {
        (_, Marker::None) => (a.marker, a.square.clone()),
        (Marker::None, Marker::Plus) if !divide => (Marker::Plus, b.square.clone()),
        (Marker::None, Marker::Minus) if !divide => (Marker::Minus, b.square.clone()),
        (x, y) if x == y => {
            let square = &a.square + &sign * &b.square;
            if divide && square.is_zero() {
                (Marker::None, Rational::zero())
            } else {
                (x, square)
            }
        }
        _ => {
            let net = a.quad() + sign * b.quad();
            if net.is_positive() {
                (Marker::Plus, net)
            } else if net.is_negative() {
                (Marker::Minus, -net)
            } else {
                (Marker::None, Rational::zero())
            }
        }
    }
}

impl fmt::Display for ExpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.marker != Marker::None {
            write!(
                f,
                "e^({}·{}t²/2)·",
                if self.marker == Marker::Plus {
                    "+"
                } else {
                    "-"
                },
                self.square
            )?;
        }
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, c)| format!("({c})·e^(({l})t)"))
            .collect();
        write!(f, "[{}]", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub lambda: Gaussian,
    pub c: Gaussian,
}

/// `{"marker": "+Q/2"|"-Q/2"|"none", "square": "p/q", "terms": [...]}`;
/// `square` is the `D²` the marker refers to and is omitted for `none`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpPolynomialJson {
    pub marker: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<String>,
    pub terms: Vec<TermJson>,
}
