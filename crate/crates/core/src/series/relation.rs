//! Polynomials in the surface class `Σ` and the point class `x`, acting on a
//! Donaldson series by insertion.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::{binomial, int, rat, Rational};

/// `Σ_{b,a} c_{b,a} Σ^b x^a`, keyed by `(Σ-power, x-power)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RelationPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl RelationPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rational::one())
    }

    pub fn monomial(sigma_pow: u32, x_pow: u32, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(sigma_pow, x_pow, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, Rational)>) -> Self {
        let mut p = Self::zero();
        for (b, a, c) in terms {
            p.add_term(b, a, c);
        }
        p
    }

    /// A polynomial in `Σ` alone, coefficients in ascending degree.
    pub fn in_sigma(coeffs: &[Rational]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(b, c)| (b as u32, 0, c.clone())),
        )
    }

    fn add_term(&mut self, sigma_pow: u32, x_pow: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry((sigma_pow, x_pow))
            .or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(sigma_pow, x_pow));
        }
    }

    /// Terms as `(Σ-power, x-power, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.terms.iter().map(|(&(b, a), c)| (b, a, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sigma_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(b, _)| b).max()
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, a)| a).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, a, c) in other.terms() {
            out.add_term(b, a, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (b1, a1, c1) in self.terms() {
            for (b2, a2, c2) in other.terms() {
                out.add_term(b1 + b2, a1 + a2, c1 * c2);
            }
        }
        out
    }

    /// `(x² - 4)^n`.
    pub fn simple_type_power(n: u32) -> Self {
        Self::from_terms((0..=n).map(|k| {
            let c = Rational::from_integer(binomial(u64::from(n), u64::from(k)))
                * crate::number::pow2(2 * i64::from(n - k))
                * int(crate::number::sign_pow(i64::from(n - k)));
            (0, 2 * k, c)
        }))
    }
}

impl fmt::Display for RelationPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(b, a), c)| format!("({c})·S^{b}·x^{a}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The relation killing the `(w, Σ)` series at classes `D` with `D·Σ = 1` on any
/// simple-type manifold with a genus-g surface:
///
/// * g even: `(1 - x/2)(Σ+1)((Σ+1)² + 4²)((Σ+1)² + 8²) ⋯ ((Σ+1)² + (2g-4)²)`
/// * g odd: `(1 + x/2)(Σ+1)(Σ-3)(Σ+5) ⋯ (Σ - (2g-3))`
///
/// In both cases the `Σ`-degree is `g - 1`.
pub fn relation_poly(g: u32) -> Result<RelationPoly> {
    if g < 2 {
        return Err(Error::Domain(format!(
            "relation polynomial needs g >= 2, got {g}"
        )));
    }
    let sigma_plus_one = [int(1), int(1)];
    let mut p: Vec<Rational> = sigma_plus_one.to_vec();
    let x_half_sign;
    if g.is_multiple_of(2) {
        x_half_sign = -1;
        // (Σ+1)² + (4m)² = Σ² + 2Σ + 1 + 16m²
        for m in 1..=i64::from((g - 2) / 2) {
            p = poly_mul(&p, &[int(1 + 16 * m * m), int(2), int(1)]);
        }
    } else {
        x_half_sign = 1;
        // roots -1, 3, -5, 7, ... up to ±(2g-3)
        for m in 1..=i64::from(g - 2) {
            let root = crate::number::sign_pow(m + 1) * (2 * m + 1);
            p = poly_mul(&p, &[int(-root), int(1)]);
        }
    }
    let x_factor = RelationPoly::from_terms([(0, 0, int(1)), (0, 1, rat(x_half_sign, 2))]);
    Ok(x_factor.mul(&RelationPoly::in_sigma(&p)))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_plus(c: i64) -> RelationPoly {
        RelationPoly::in_sigma(&[int(c), int(1)])
    }

    #[test]
    fn genus_two_is_even_branch() {
        let expected =
            RelationPoly::from_terms([(0, 0, int(1)), (0, 1, rat(-1, 2))]).mul(&sigma_plus(1));
        assert_eq!(relation_poly(2).unwrap(), expected);
    }

    #[test]
    fn genus_three_odd_branch() {
        let expected = RelationPoly::from_terms([(0, 0, int(1)), (0, 1, rat(1, 2))])
            .mul(&sigma_plus(1))
            .mul(&sigma_plus(-3));
        assert_eq!(relation_poly(3).unwrap(), expected);
    }

    #[test]
    fn genus_four_even_branch() {
        let quad = RelationPoly::in_sigma(&[int(17), int(2), int(1)]);
        let expected = RelationPoly::from_terms([(0, 0, int(1)), (0, 1, rat(-1, 2))])
            .mul(&sigma_plus(1))
            .mul(&quad);
        assert_eq!(relation_poly(4).unwrap(), expected);
    }

    #[test]
    fn sigma_degree_is_g_minus_one() {
        for g in 2..10 {
            let z = relation_poly(g).unwrap();
            assert_eq!(z.sigma_degree(), Some(g - 1));
            assert_eq!(z.x_degree(), Some(1));
        }
    }

    #[test]
    fn rejects_small_genus() {
        assert!(relation_poly(1).is_err());
        assert!(relation_poly(0).is_err());
    }

    #[test]
    fn simple_type_power_expands_binomially() {
        let p1 = RelationPoly::simple_type_power(1);
        assert_eq!(
            p1,
            RelationPoly::from_terms([(0, 2, int(1)), (0, 0, int(-4))])
        );
        let p2 = RelationPoly::simple_type_power(2);
        assert_eq!(p2, p1.mul(&p1));
        assert_eq!(RelationPoly::simple_type_power(0), RelationPoly::one());
    }
}
