//! Gluing two simple-type manifolds along genus-g surfaces of square zero.
//!
//! Glued basic classes are never written down as lattice vectors. A glued
//! series is a list of `(j, k, sector, coefficient)` records pointing back at
//! the parents' basic classes, plus the rule that evaluates them on split
//! classes `D = (D_1, D_2)`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::constructions::CatalogEntry;
use crate::error::{Error, Result};
use crate::lattice::{d_zero, HClass, MarkedSurface};
use crate::number::{
    half_even, int, parse_rational, pow2, rat, sign_pow, to_i64, Gaussian, Rational,
};
use crate::series::{ExpPolynomial, Marker};

/// One side of a gluing: the manifold, its surface and the `w` restricted to it.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingSide {
    pub reference: String,
    pub entry: CatalogEntry,
    pub surface: MarkedSurface,
    pub w: HClass,
}

impl GluingSide {
    /// Defaults to the entry's highest-genus surface and its distinguished `w`.
    pub fn new(
        reference: impl Into<String>,
        entry: CatalogEntry,
        surface: Option<&str>,
        w: Option<HClass>,
    ) -> Result<Self> {
        let surface = match surface {
            Some(label) => entry.surface(label)?.clone(),
            None => entry.main_surface()?.clone(),
        };
        let w = match w {
            Some(w) => w,
            None => entry.w_for(&surface.label)?.clone(),
        };
        if !entry.lattice().is_allowable(&w, &surface)? {
            return Err(Error::NotAllowable(format!(
                "w = {w} with {} on {}",
                surface.label,
                entry.name()
            )));
        }
        Ok(Self {
            reference: reference.into(),
            entry,
            surface,
            w,
        })
    }

    /// The first marked surface of genus `g`, with its distinguished `w`.
    pub fn for_genus(reference: impl Into<String>, entry: CatalogEntry, g: u32) -> Result<Self> {
        let label = entry
            .surfaces
            .iter()
            .find(|s| s.genus == g)
            .map(|s| s.label.clone())
            .ok_or_else(|| {
                Error::InvalidSurface(format!(
                    "{} has no marked surface of genus {g}",
                    entry.name()
                ))
            })?;
        Self::new(reference, entry, Some(&label), None)
    }

    pub fn w_sq(&self) -> Result<i64> {
        to_i64(&self.entry.lattice().square(&self.w)?)
    }

    pub fn d0(&self) -> Result<i64> {
        self.entry.lattice().d_zero(&self.w)
    }

    /// `(K_j·Σ, a_{j,w})` for every basic class, in series order.
    fn twisted_with_pairings(&self) -> Result<Vec<(i64, Rational)>> {
        let lattice = self.entry.lattice();
        self.entry
            .series
            .twist(&self.w)?
            .into_iter()
            .map(|e| Ok((lattice.pairing_int(&e.class, &self.surface.class)?, e.coeff)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingSpec {
    pub left: GluingSide,
    pub right: GluingSide,
    pub g: u32,
    pub w_sq: i64,
}

impl GluingSpec {
    /// `w_sq` defaults to `w_1² + w_2²`; otherwise it must agree with it mod 2.
    pub fn new(left: GluingSide, right: GluingSide, w_sq: Option<i64>) -> Result<Self> {
        if left.surface.genus != right.surface.genus {
            return Err(Error::Gluing(format!(
                "surface genera differ: {} vs {}",
                left.surface.genus, right.surface.genus
            )));
        }
        for side in [&left, &right] {
            let l = side.entry.lattice();
            if l.b_one() != 0 || l.b_plus() <= 1 {
                return Err(Error::Gluing(format!(
                    "{} has b1 = {}, b+ = {}; need b1 = 0 and b+ > 1",
                    side.entry.name(),
                    l.b_one(),
                    l.b_plus()
                )));
            }
        }
        let base = left.w_sq()? + right.w_sq()?;
        let w_sq = w_sq.unwrap_or(base);
        if (w_sq - base) % 2 != 0 {
            return Err(Error::Parity(format!(
                "w² = {w_sq} but w1² + w2² = {base}; they must agree mod 2"
            )));
        }
        let g = left.surface.genus;
        Ok(Self {
            left,
            right,
            g,
            w_sq,
        })
    }

    pub fn w1_sq(&self) -> i64 {
        self.left.w_sq().expect("validated at construction")
    }

    pub fn w2_sq(&self) -> i64 {
        self.right.w_sq().expect("validated at construction")
    }

    /// `(-1)^{(g-1)(w² - w_1² - w_2²)/2}`; 1 whenever `w² ≡ w_1² + w_2² (mod 4)`.
    pub fn epsilon(&self) -> i64 {
        let delta = self.w_sq - self.w1_sq() - self.w2_sq();
        sign_pow((i64::from(self.g) - 1) * (delta / 2))
    }

    pub fn glued_b_plus(&self) -> u32 {
        self.left.entry.lattice().b_plus() + self.right.entry.lattice().b_plus() + 2 * self.g - 1
    }

    /// `d_0(X, w) ≡ d_0(X_1, w_1) + d_0(X_2, w_2) + g - 1 (mod 2)`.
    pub fn d0_congruence_holds(&self) -> Result<bool> {
        let glued = d_zero(self.w_sq, 0, self.glued_b_plus())?;
        let parts = self.left.d0()? + self.right.d0()? + i64::from(self.g) - 1;
        Ok((glued - parts).rem_euclid(2) == 0)
    }

    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
            g: self.g,
            w_sq: self.w_sq,
        }
    }

    fn require_simple_type(&self) -> Result<()> {
        for side in [&self.left, &self.right] {
            if !side.entry.series.simple_type() {
                return Err(Error::Gluing(format!(
                    "{} is not of simple type",
                    side.entry.name()
                )));
            }
        }
        Ok(())
    }
}

/// Which exponent shift a glued entry carries: `+2Σ·D`, `-2Σ·D` or none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GluedSector {
    Plus,
    Minus,
    Zero,
}

impl GluedSector {
    pub fn as_str(self) -> &'static str {
        match self {
            GluedSector::Plus => "+",
            GluedSector::Minus => "-",
            GluedSector::Zero => "0",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "+" => Ok(GluedSector::Plus),
            "-" => Ok(GluedSector::Minus),
            "0" => Ok(GluedSector::Zero),
            other => Err(Error::Parse(format!("unknown sector {other:?}"))),
        }
    }

    fn shift(self) -> i64 {
        match self {
            GluedSector::Plus => 2,
            GluedSector::Minus => -2,
            GluedSector::Zero => 0,
        }
    }
}

impl fmt::Display for GluedSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GluedKind {
    /// Genus `g >= 2`.
    Standard,
    /// Genus 1, three sectors.
    Torus,
    /// Experimental formula on stabilized series; no `2Σ·D` shift.
    Conjectural,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedEntry {
    pub j: usize,
    pub k: usize,
    pub sector: GluedSector,
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluedSeries {
    spec: GluingSpec,
    kind: GluedKind,
    entries: Vec<GluedEntry>,
    /// Simple type of the glued manifold is assumed, never derived.
    simple_type: bool,
}

impl GluedSeries {
    pub fn spec(&self) -> &GluingSpec {
        &self.spec
    }

    pub fn kind(&self) -> GluedKind {
        self.kind
    }

    pub fn entries(&self) -> &[GluedEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn simple_type(&self) -> bool {
        self.simple_type
    }

    pub fn left_class(&self, j: usize) -> &HClass {
        &self.spec.left.entry.series.entries()[j].class
    }

    pub fn right_class(&self, k: usize) -> &HClass {
        &self.spec.right.entry.series.entries()[k].class
    }

    fn from_pairs(spec: GluingSpec, kind: GluedKind, mut entries: Vec<GluedEntry>) -> Self {
        entries.retain(|e| !e.coeff.is_zero());
        entries.sort_by_key(|e| (e.j, e.k, e.sector));
        Self {
            spec,
            kind,
            entries,
            simple_type: true,
        }
    }

    pub fn to_json(&self) -> GluedJson {
        GluedJson {
            left: self.spec.left.reference.clone(),
            right: self.spec.right.reference.clone(),
            g: self.spec.g,
            w1_sq: self.spec.w1_sq(),
            w2_sq: self.spec.w2_sq(),
            w_sq: self.spec.w_sq,
            kind: self.kind,
            pairs: self
                .entries
                .iter()
                .map(|e| (e.j, e.k, e.sector.as_str().to_string(), e.coeff.to_string()))
                .collect(),
        }
    }

    /// Rebuilds a glued series from JSON, resolving `left`/`right` with
    /// `resolve` and checking indices, sectors and the recorded squares.
    pub fn from_json(
        j: &GluedJson,
        resolve: impl Fn(&str) -> Result<CatalogEntry>,
    ) -> Result<Self> {
        let left = GluingSide::for_genus(j.left.clone(), resolve(&j.left)?, j.g)?;
        let right = GluingSide::for_genus(j.right.clone(), resolve(&j.right)?, j.g)?;
        let spec = GluingSpec::new(left, right, Some(j.w_sq))?;
        if spec.g != j.g || spec.w1_sq() != j.w1_sq || spec.w2_sq() != j.w2_sq {
            return Err(Error::Gluing(format!(
                "recorded g = {}, w1² = {}, w2² = {} do not match the resolved entries",
                j.g, j.w1_sq, j.w2_sq
            )));
        }
        let n_left = spec.left.entry.series.entries().len();
        let n_right = spec.right.entry.series.entries().len();
        let mut entries = Vec::new();
        for (jj, kk, sector, coeff) in &j.pairs {
            if *jj >= n_left || *kk >= n_right {
                return Err(Error::Gluing(format!("pair ({jj}, {kk}) out of range")));
            }
            let sector = GluedSector::parse(sector)?;
            let allowed = match j.kind {
                GluedKind::Torus => true,
                _ => sector != GluedSector::Zero,
            };
            if !allowed {
                return Err(Error::Gluing(
                    "sector 0 only occurs in torus gluings".into(),
                ));
            }
            entries.push(GluedEntry {
                j: *jj,
                k: *kk,
                sector,
                coeff: parse_rational(coeff)?,
            });
        }
        Ok(Self::from_pairs(spec, j.kind, entries))
    }
}

/// `{"left", "right", "g", "w1_sq", "w2_sq", "w_sq", "kind", "pairs": [[j, k, sector, "p/q"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluedJson {
    pub left: String,
    pub right: String,
    pub g: u32,
    pub w1_sq: i64,
    pub w2_sq: i64,
    pub w_sq: i64,
    pub kind: GluedKind,
    pub pairs: Vec<(usize, usize, String, String)>,
}

/// Pairs `(K_j, L_k)` with `K_j·Σ = L_k·Σ = ±(2g-2)`: the `+` pairs get
/// `-2^{7g-9} a_{j,w} b_{k,w}`, the `-` pairs `(-1)^g 2^{7g-9} a_{j,w} b_{k,w}`,
/// both times `ε`.
pub fn glue(spec: &GluingSpec) -> Result<GluedSeries> {
    if spec.g == 1 {
        return Err(Error::Gluing("genus 1: use the torus gluing".into()));
    }
    spec.left.surface.require_gluing_genus()?;
    spec.require_simple_type()?;
    let g = i64::from(spec.g);
    let c = pow2(7 * g - 9) * int(spec.epsilon());
    let plus = -c.clone();
    let minus = c * int(sign_pow(g));
    glue_with(spec, GluedKind::Standard, 2 * g - 2, &plus, &minus)
}

/// Experimental: the same shape on stabilized series `X̃_i = X_i #_Σ B_g`,
/// with `-2^{5-3g}` and `(-1)^g 2^{5-3g}` and no exponent shift.
pub fn glue_conjectural(spec: &GluingSpec) -> Result<GluedSeries> {
    if spec.g < 2 {
        return Err(Error::Gluing(format!(
            "conjectural gluing needs g >= 2, got {}",
            spec.g
        )));
    }
    spec.require_simple_type()?;
    let g = i64::from(spec.g);
    let c = pow2(5 - 3 * g) * int(spec.epsilon());
    let plus = -c.clone();
    let minus = c * int(sign_pow(g));
    glue_with(spec, GluedKind::Conjectural, 2 * g - 2, &plus, &minus)
}

fn glue_with(
    spec: &GluingSpec,
    kind: GluedKind,
    top: i64,
    plus: &Rational,
    minus: &Rational,
) -> Result<GluedSeries> {
    let a = spec.left.twisted_with_pairings()?;
    let b = spec.right.twisted_with_pairings()?;
    let mut entries = Vec::new();
    for (j, (kj, aj)) in a.iter().enumerate() {
        for (k, (lk, bk)) in b.iter().enumerate() {
            let (sector, c) = if *kj == top && *lk == top {
                (GluedSector::Plus, plus)
            } else if *kj == -top && *lk == -top {
                (GluedSector::Minus, minus)
            } else {
                continue;
            };
            entries.push(GluedEntry {
                j,
                k,
                sector,
                coeff: c * aj * bk,
            });
        }
    }
    Ok(GluedSeries::from_pairs(spec.clone(), kind, entries))
}

/// Genus 1: every pair contributes `-1/4`, `-1/4`, `-1/2` times
/// `a_{j,w} b_{k,w}` in the `+2Σ·D`, `-2Σ·D` and unshifted sectors.
pub fn glue_torus(spec: &GluingSpec) -> Result<GluedSeries> {
    if spec.g != 1 {
        return Err(Error::Gluing(format!(
            "torus gluing needs g = 1, got {}",
            spec.g
        )));
    }
    spec.require_simple_type()?;
    let a = spec.left.twisted_with_pairings()?;
    let b = spec.right.twisted_with_pairings()?;
    for (side, data) in [(&spec.left, &a), (&spec.right, &b)] {
        if let Some((p, _)) = data.iter().find(|(p, _)| *p != 0) {
            return Err(Error::Gluing(format!(
                "{}: a basic class pairs to {p} with the torus; all must pair to 0",
                side.entry.name()
            )));
        }
    }
    let eps = int(spec.epsilon());
    let mut entries = Vec::new();
    for (j, (_, aj)) in a.iter().enumerate() {
        for (k, (_, bk)) in b.iter().enumerate() {
            let ab = &eps * aj * bk;
            for (sector, c) in [
                (GluedSector::Plus, rat(-1, 4)),
                (GluedSector::Minus, rat(-1, 4)),
                (GluedSector::Zero, rat(-1, 2)),
            ] {
                entries.push(GluedEntry {
                    j,
                    k,
                    sector,
                    coeff: &c * &ab,
                });
            }
        }
    }
    Ok(GluedSeries::from_pairs(
        spec.clone(),
        GluedKind::Torus,
        entries,
    ))
}

/// A class on the glued manifold given by its pieces on either side.
/// Requires `D_1·Σ_1 = D_2·Σ_2`, the common value being `Σ·D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitClass {
    pub d1: HClass,
    pub d2: HClass,
    pub sigma_pairing: Rational,
}

impl SplitClass {
    pub fn new(spec: &GluingSpec, d1: HClass, d2: HClass) -> Result<Self> {
        let s1 = spec
            .left
            .entry
            .lattice()
            .pairing(&d1, &spec.left.surface.class)?;
        let s2 = spec
            .right
            .entry
            .lattice()
            .pairing(&d2, &spec.right.surface.class)?;
        if s1 != s2 {
            return Err(Error::Gluing(format!(
                "D1·Σ1 = {s1} but D2·Σ2 = {s2}; the pieces do not agree on the gluing region"
            )));
        }
        Ok(Self {
            d1,
            d2,
            sigma_pairing: s1,
        })
    }

    /// As [`SplitClass::new`], also checking a stated `Σ·D`.
    pub fn with_pairing(
        spec: &GluingSpec,
        d1: HClass,
        d2: HClass,
        sigma_pairing: Rational,
    ) -> Result<Self> {
        let d = Self::new(spec, d1, d2)?;
        if d.sigma_pairing != sigma_pairing {
            return Err(Error::Gluing(format!(
                "stated Σ·D = {sigma_pairing} but the pieces give {}",
                d.sigma_pairing
            )));
        }
        Ok(d)
    }

    /// `(D_1 + rΣ_1, D_2 - rΣ_2)`: another splitting of the same class.
    pub fn rshift(&self, spec: &GluingSpec, r: &Rational) -> Result<Self> {
        Ok(Self {
            d1: self.d1.try_add(&spec.left.surface.class.scale(r))?,
            d2: self.d2.try_sub(&spec.right.surface.class.scale(r))?,
            sigma_pairing: self.sigma_pairing.clone(),
        })
    }

    /// `D² = D_1² + D_2²`.
    pub fn square(&self, spec: &GluingSpec) -> Result<Rational> {
        Ok(spec.left.entry.lattice().square(&self.d1)?
            + spec.right.entry.lattice().square(&self.d2)?)
    }
}

/// `e^{Q(tD)/2} Σ c·e^{(K_j·D_1 + L_k·D_2 ± 2Σ·D)t}`; the conjectural kind
/// carries no `2Σ·D` term.
pub fn eval_glued(gs: &GluedSeries, d: &SplitClass) -> Result<ExpPolynomial> {
    let spec = gs.spec();
    let left = spec.left.entry.lattice();
    let right = spec.right.entry.lattice();
    let mut out = ExpPolynomial::zero(Marker::Plus, d.square(spec)?);
    for e in gs.entries() {
        let mut lambda =
            left.pairing(gs.left_class(e.j), &d.d1)? + right.pairing(gs.right_class(e.k), &d.d2)?;
        if gs.kind() != GluedKind::Conjectural {
            lambda += int(e.sector.shift()) * &d.sigma_pairing;
        }
        out.add_term(Gaussian::real(lambda), &Gaussian::real(e.coeff.clone()));
    }
    Ok(out)
}

/// Both sides of the coefficient identity for one restriction pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMatch {
    pub sector: Option<GluedSector>,
    /// Sum of the untwisted glued coefficients restricting to `(K, L)`.
    pub lhs: Rational,
    /// `(±1)^{g-1} 2^{7g-9} (Σ a_j)(Σ b_k)` from the parents alone.
    pub rhs: Rational,
}

impl CoefficientMatch {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Groups the glued entries whose parents restrict like `K` and `L` (equal up
/// to multiples of `Σ`), removes `ε` and the glued `w`-twist, and compares
/// with the product of the parents' untwisted coefficient sums. The glued
/// `w` is taken as the split class `(w_1, w_2)`.
pub fn coefficient_match(gs: &GluedSeries, k: &HClass, l: &HClass) -> Result<CoefficientMatch> {
    if gs.kind() != GluedKind::Standard {
        return Err(Error::Gluing(
            "coefficient matching needs a genus >= 2 gluing".into(),
        ));
    }
    let spec = gs.spec();
    let g = i64::from(spec.g);
    let top = int(2 * g - 2);
    let left = spec.left.entry.lattice();
    let right = spec.right.entry.lattice();
    let s1 = &spec.left.surface.class;
    let s2 = &spec.right.surface.class;
    let ks = left.pairing(k, s1)?;
    let ls = right.pairing(l, s2)?;
    let sector = if ks == top && ls == top {
        GluedSector::Plus
    } else if ks == -top.clone() && ls == -top.clone() {
        GluedSector::Minus
    } else {
        return Ok(CoefficientMatch {
            sector: None,
            lhs: Rational::zero(),
            rhs: Rational::zero(),
        });
    };

    let w = SplitClass::new(spec, spec.left.w.clone(), spec.right.w.clone())?;
    let w_sq = spec.w1_sq() + spec.w2_sq();
    let eps = int(spec.epsilon());
    let mut lhs = Rational::zero();
    for e in gs.entries().iter().filter(|e| e.sector == sector) {
        let kj = gs.left_class(e.j);
        let lk = gs.right_class(e.k);
        if !kj.differs_by_multiple_of(k, s1)? || !lk.differs_by_multiple_of(l, s2)? {
            continue;
        }
        let kappa_w = left.pairing(kj, &w.d1)?
            + right.pairing(lk, &w.d2)?
            + int(sector.shift()) * &w.sigma_pairing;
        let half = half_even(to_i64(&kappa_w)? + w_sq)?;
        lhs += &e.coeff / &eps * int(sign_pow(half));
    }

    let sum_over = |entry: &CatalogEntry, target: &HClass, s: &HClass| -> Result<Rational> {
        let mut acc = Rational::zero();
        for e in entry.series.entries() {
            if e.class.differs_by_multiple_of(target, s)? {
                acc += &e.coeff;
            }
        }
        Ok(acc)
    };
    let a = sum_over(&spec.left.entry, k, s1)?;
    let b = sum_over(&spec.right.entry, l, s2)?;
    let sign = match sector {
        GluedSector::Plus => 1,
        _ => sign_pow(g - 1),
    };
    let rhs = int(sign) * pow2(7 * g - 9) * a * b;
    Ok(CoefficientMatch {
        sector: Some(sector),
        lhs,
        rhs,
    })
}
