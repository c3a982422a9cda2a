//! The two-sector `(w, Σ)` form of a simple-type series.
//!
//! Basic classes with `K·Σ ≡ 2 (mod 4)` go to the `+Q/2` sector with
//! coefficient `a_{j,w}`; those with `K·Σ ≡ 0 (mod 4)` go to the `-Q/2` sector
//! with `i^{-d_0} a_{j,w}` and are evaluated through `i·K`.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::exp_poly::{ExpPolynomial, ExpPolynomialJson, Marker};
use super::relation::RelationPoly;
use super::{DonaldsonSeries, SeriesEntry};
use crate::error::{Error, Result};
use crate::lattice::{HClass, Lattice, MarkedSurface};
use crate::number::{Gaussian, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct SplitSeries {
    lattice: Arc<Lattice>,
    w: HClass,
    surface: MarkedSurface,
    d0: i64,
    positive: Vec<(HClass, Gaussian)>,
    negative: Vec<(HClass, Gaussian)>,
    simple_type: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sector {
    Positive,
    Negative,
}

fn sector_of(lattice: &Lattice, k: &HClass, s: &MarkedSurface) -> Result<Sector> {
    let ks = lattice.pairing_int(k, &s.class)?;
    match ks.mod_floor(&4) {
        2 => Ok(Sector::Positive),
        0 => Ok(Sector::Negative),
        _ => Err(Error::Parity(format!(
            "K·{} = {ks} is odd for K = {k}",
            s.label
        ))),
    }
}

fn require_allowable(lattice: &Lattice, w: &HClass, s: &MarkedSurface) -> Result<()> {
    if !lattice.is_allowable(w, s)? {
        return Err(Error::NotAllowable(format!(
            "w = {w}, {} = {}: need w·Σ odd and Σ² = 0",
            s.label, s.class
        )));
    }
    Ok(())
}

impl SplitSeries {
    pub fn new(series: &DonaldsonSeries, w: &HClass, s: &MarkedSurface) -> Result<Self> {
        let lattice = series.lattice().clone();
        require_allowable(&lattice, w, s)?;
        let d0 = lattice.d_zero(w)?;
        let n_factor = Gaussian::i_pow(-d0);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for e in series.twist(w)? {
            let c = Gaussian::real(e.coeff);
            match sector_of(&lattice, &e.class, s)? {
                Sector::Positive => positive.push((e.class, c)),
                Sector::Negative => negative.push((e.class, &n_factor * &c)),
            }
        }
        Ok(Self {
            lattice,
            w: w.clone(),
            surface: s.clone(),
            d0,
            positive,
            negative,
            simple_type: series.simple_type(),
        })
    }

    /// Assembles a split series from sector data, checking that every class
    /// sits in the sector its pairing with `Σ` dictates.
    pub fn from_parts(
        lattice: Arc<Lattice>,
        w: HClass,
        surface: MarkedSurface,
        positive: Vec<(HClass, Gaussian)>,
        negative: Vec<(HClass, Gaussian)>,
    ) -> Result<Self> {
        require_allowable(&lattice, &w, &surface)?;
        let d0 = lattice.d_zero(&w)?;
        for (k, _) in &positive {
            if sector_of(&lattice, k, &surface)? != Sector::Positive {
                return Err(Error::MalformedSplit(format!(
                    "{k} listed in the +Q/2 sector"
                )));
            }
        }
        for (k, _) in &negative {
            if sector_of(&lattice, k, &surface)? != Sector::Negative {
                return Err(Error::MalformedSplit(format!(
                    "{k} listed in the -Q/2 sector"
                )));
            }
        }
        Ok(Self {
            lattice,
            w,
            surface,
            d0,
            positive,
            negative,
            simple_type: true,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn w(&self) -> &HClass {
        &self.w
    }

    pub fn surface(&self) -> &MarkedSurface {
        &self.surface
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    pub fn positive(&self) -> &[(HClass, Gaussian)] {
        &self.positive
    }

    pub fn negative(&self) -> &[(HClass, Gaussian)] {
        &self.negative
    }

    /// The `w`-twisted series `(K_j, a_{j,w})` the sectors were built from.
    pub fn unsplit_twisted(&self) -> Result<DonaldsonSeries> {
        let undo = Gaussian::i_pow(self.d0);
        let mut entries = Vec::new();
        for (k, c) in &self.positive {
            entries.push(SeriesEntry {
                class: k.clone(),
                coeff: real_part(c, k)?,
            });
        }
        for (k, c) in &self.negative {
            entries.push(SeriesEntry {
                class: k.clone(),
                coeff: real_part(&(&undo * c), k)?,
            });
        }
        DonaldsonSeries::new(self.lattice.clone(), entries, self.simple_type)
    }

    /// The untwisted series `(K_j, a_j)`.
    pub fn unsplit(&self) -> Result<DonaldsonSeries> {
        self.unsplit_twisted()?.twisted(&self.w)
    }

    fn term(
        &self,
        sector: Sector,
        k: &HClass,
        c: &Gaussian,
        d: &HClass,
        a: u32,
        b: u32,
    ) -> Result<(Gaussian, Gaussian)> {
        let kd = self.lattice.pairing(k, d)?;
        let ks = self.lattice.pairing(k, &self.surface.class)?;
        let ds = self.lattice.pairing(d, &self.surface.class)?;
        Ok(match sector {
            Sector::Positive => {
                let factor = Gaussian::from_int(2).pow(a) * Gaussian::real(ds + ks).pow(b);
                (Gaussian::real(kd), c * &factor)
            }
            Sector::Negative => {
                let factor = Gaussian::from_int(-2).pow(a) * Gaussian::new(-ds, ks).pow(b);
                (Gaussian::imag(kd), c * &factor)
            }
        })
    }

    fn sector_entries(&self, sector: Sector) -> &[(HClass, Gaussian)] {
        match sector {
            Sector::Positive => &self.positive,
            Sector::Negative => &self.negative,
        }
    }

    fn empty(&self, sector: Sector, d_sq: &Rational) -> ExpPolynomial {
        let marker = match sector {
            Sector::Positive => Marker::Plus,
            Sector::Negative => Marker::Minus,
        };
        ExpPolynomial::zero(marker, d_sq.clone())
    }

    /// `D^{(w,Σ)}(Σ^b x^a e^{tD})`: `x` acts by 2 on the `+Q/2` sector and by
    /// `-2` on the `-Q/2` sector, `Σ` by `(D + K)·Σ` and `(-D + iK)·Σ`.
    pub fn insert(&self, d: &HClass, a: u32, b: u32) -> Result<SectorPair> {
        self.apply(
            d,
            &RelationPoly::monomial(b, a, Rational::from_integer(1.into())),
        )
    }

    pub fn apply(&self, d: &HClass, z: &RelationPoly) -> Result<SectorPair> {
        let d_sq = self.lattice.square(d)?;
        let mut out = [Sector::Positive, Sector::Negative].map(|s| self.empty(s, &d_sq));
        for (idx, sector) in [Sector::Positive, Sector::Negative].into_iter().enumerate() {
            for (k, c) in self.sector_entries(sector) {
                for (b, a, zc) in z.terms() {
                    let (lambda, coeff) = self.term(sector, k, c, d, a, b)?;
                    out[idx].add_term(lambda, &coeff.scale(zc));
                }
            }
        }
        let [positive, negative] = out;
        Ok(SectorPair { positive, negative })
    }

    /// One polynomial per basic class, so that cancellation between distinct
    /// classes sharing an exponent cannot hide a non-vanishing entry.
    pub fn apply_entrywise(&self, d: &HClass, z: &RelationPoly) -> Result<Vec<ExpPolynomial>> {
        let d_sq = self.lattice.square(d)?;
        let mut out = Vec::new();
        for sector in [Sector::Positive, Sector::Negative] {
            for (k, c) in self.sector_entries(sector) {
                let mut p = self.empty(sector, &d_sq);
                for (b, a, zc) in z.terms() {
                    let (lambda, coeff) = self.term(sector, k, c, d, a, b)?;
                    p.add_term(lambda, &coeff.scale(zc));
                }
                out.push(p);
            }
        }
        Ok(out)
    }
}

fn real_part(c: &Gaussian, k: &HClass) -> Result<Rational> {
    if !c.im.is_zero() {
        return Err(Error::MalformedSplit(format!(
            "coefficient {c} of {k} does not come from a rational series"
        )));
    }
    Ok(c.re.clone())
}

/// The `+Q/2`-marked and `-Q/2`-marked parts of an evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorPair {
    pub positive: ExpPolynomial,
    pub negative: ExpPolynomial,
}

impl SectorPair {
    pub fn is_zero(&self) -> bool {
        self.positive.is_zero() && self.negative.is_zero()
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        Self {
            positive: self.positive.scale(c),
            negative: self.negative.scale(c),
        }
    }

    pub fn to_json(&self) -> SectorPairJson {
        SectorPairJson {
            positive: self.positive.to_json(),
            negative: self.negative.to_json(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorPairJson {
    pub positive: ExpPolynomialJson,
    pub negative: ExpPolynomialJson,
}
