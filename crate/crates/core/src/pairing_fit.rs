//! Recovering the diagonal of the universal pairing matrix `M_{αα}(t)` from
//! reference manifolds by exact division of exponential polynomials.
//!
//! Coordinates are indexed by `α = 1 .. 2g-1`, standing for
//! `p = g-1, -(g-1), g-2, -(g-2), …, 0`; coordinate `α` collects the basic
//! classes with `K·Σ = 2p`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constructions::{build_bg, build_dia2_example, closed_form_cg, CatalogEntry};
use crate::error::{Error, Result};
use crate::gluing::{
    eval_glued, glue, GluedKind, GluedSector, GluedSeries, GluingSide, GluingSpec, SplitClass,
};
use crate::lattice::{HClass, MarkedSurface};
use crate::number::{int, Gaussian, Rational};
use crate::series::{DonaldsonSeries, ExpPolynomial, ExpPolynomialJson, Marker};

/// `p` for coordinate `α`.
pub fn alpha_to_p(g: u32, alpha: usize) -> Result<i64> {
    let g = i64::from(g);
    if alpha == 0 || alpha as i64 > 2 * g - 1 {
        return Err(Error::Domain(format!(
            "alpha = {alpha} outside 1..={}",
            2 * g - 1
        )));
    }
    let m = (alpha as i64 - 1) / 2;
    Ok(if alpha % 2 == 1 {
        g - 1 - m
    } else {
        -(g - 1 - m)
    })
}

/// `α` for level `p`, `|p| <= g - 1`.
pub fn p_to_alpha(g: u32, p: i64) -> Result<usize> {
    let top = i64::from(g) - 1;
    if p.abs() > top {
        return Err(Error::Adjunction(format!(
            "level p = {p} beyond g - 1 = {top}"
        )));
    }
    let m = top - p.abs();
    Ok(if p >= 0 {
        (2 * m + 1) as usize
    } else {
        (2 * m + 2) as usize
    })
}

/// The `2g - 1` coordinates of a series along a genus-g surface, evaluated at
/// a class `D` with `D·Σ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCoordinates {
    g: u32,
    d0: i64,
    coords: Vec<ExpPolynomial>,
}

impl BasisCoordinates {
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    /// Coordinate `α` (1-based) as defined: odd `p` carries `+Q/2` and real
    /// exponents, even `p` carries `-Q/2`, `i^{-d_0}` and exponents `i·K·D`.
    pub fn coord(&self, alpha: usize) -> &ExpPolynomial {
        &self.coords[alpha - 1]
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Every coordinate brought to `+Q/2` form with real exponents: even-`p`
    /// coordinates are multiplied by `i^{d_0}` and evaluated at `t -> -it`.
    /// The result is `e^{Q(tD)/2} Σ_{K·Σ=2p} a_{j,w} e^{(K·D)t}` for every `α`.
    pub fn normalized(&self, alpha: usize) -> Result<ExpPolynomial> {
        let c = self.coord(alpha);
        let p = alpha_to_p(self.g, alpha)?;
        if p % 2 != 0 {
            return Ok(c.clone());
        }
        c.scale(&Gaussian::i_pow(self.d0))
            .scale_argument(&-Gaussian::i())
    }

    pub fn to_json(&self) -> Result<Vec<CoordinateJson>> {
        (1..=self.len())
            .map(|alpha| {
                Ok(CoordinateJson {
                    alpha,
                    p: alpha_to_p(self.g, alpha)?,
                    c: self.coord(alpha).to_json(),
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateJson {
    pub alpha: usize,
    pub p: i64,
    pub c: ExpPolynomialJson,
}

pub fn basis_coordinates(
    series: &DonaldsonSeries,
    w: &HClass,
    s: &MarkedSurface,
    d: &HClass,
) -> Result<BasisCoordinates> {
    let lattice = series.lattice();
    if !lattice.is_allowable(w, s)? {
        return Err(Error::NotAllowable(format!("w = {w} with {}", s.label)));
    }
    if lattice.pairing(d, &s.class)? != int(1) {
        return Err(Error::Domain(format!(
            "coordinates need D·{} = 1, D = {d}",
            s.label
        )));
    }
    let g = s.genus;
    let d0 = lattice.d_zero(w)?;
    let d_sq = lattice.square(d)?;
    let n = 2 * g as usize - 1;
    let mut coords: Vec<ExpPolynomial> = (1..=n)
        .map(|alpha| {
            let p = alpha_to_p(g, alpha)?;
            let marker = if p % 2 != 0 {
                Marker::Plus
            } else {
                Marker::Minus
            };
            Ok(ExpPolynomial::zero(marker, d_sq.clone()))
        })
        .collect::<Result<_>>()?;
    let n_factor = Gaussian::i_pow(-d0);
    for e in series.twist(w)? {
        let ks = lattice.pairing_int(&e.class, &s.class)?;
        if ks % 2 != 0 {
            return Err(Error::Parity(format!(
                "K·Σ = {ks} is odd for K = {}",
                e.class
            )));
        }
        let p = ks / 2;
        let alpha = p_to_alpha(g, p).map_err(|_| {
            Error::Adjunction(format!(
                "|K·{}| = {} exceeds 2g - 2 = {} for K = {}",
                s.label,
                ks.abs(),
                2 * g - 2,
                e.class
            ))
        })?;
        let kd = lattice.pairing(&e.class, d)?;
        let a = Gaussian::real(e.coeff);
        if p % 2 != 0 {
            coords[alpha - 1].add_term(Gaussian::real(kd), &a);
        } else {
            coords[alpha - 1].add_term(Gaussian::imag(kd), &(&n_factor * &a));
        }
    }
    Ok(BasisCoordinates { g, d0, coords })
}

/// Coordinates of an entry along one of its surfaces, with that surface's
/// distinguished `w`.
pub fn entry_coordinates(
    entry: &CatalogEntry,
    surface: &str,
    d: &HClass,
) -> Result<BasisCoordinates> {
    let s = entry.surface(surface)?;
    basis_coordinates(&entry.series, entry.w_for(surface)?, s, d)
}

/// One reference: both sides' coordinates and, per `α`, the normalized
/// value of the glued manifold at the same class.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub label: String,
    pub left: BasisCoordinates,
    pub right: BasisCoordinates,
    pub glued: Vec<ExpPolynomial>,
}

impl Reference {
    /// The glued side computed by the gluing formula, split by the level
    /// of the parent classes: the `+` sector sits at `p = g-1`, the `-`
    /// sector at `p = -(g-1)`.
    pub fn from_gluing(label: impl Into<String>, gs: &GluedSeries, d: &SplitClass) -> Result<Self> {
        if gs.kind() != GluedKind::Standard {
            return Err(Error::Gluing("references need a genus >= 2 gluing".into()));
        }
        if d.sigma_pairing != int(1) {
            return Err(Error::Domain("references need Σ·D = 1".into()));
        }
        let spec = gs.spec();
        let g = spec.g;
        let left = basis_coordinates(
            &spec.left.entry.series,
            &spec.left.w,
            &spec.left.surface,
            &d.d1,
        )?;
        let right = basis_coordinates(
            &spec.right.entry.series,
            &spec.right.w,
            &spec.right.surface,
            &d.d2,
        )?;
        let d_sq = d.square(spec)?;
        let mut glued = vec![ExpPolynomial::zero(Marker::Plus, d_sq); 2 * g as usize - 1];
        let full = eval_glued(gs, d)?;
        let left_lattice = spec.left.entry.lattice();
        let right_lattice = spec.right.entry.lattice();
        for e in gs.entries() {
            let top = i64::from(g) - 1;
            let alpha = match e.sector {
                GluedSector::Plus => p_to_alpha(g, top)?,
                GluedSector::Minus => p_to_alpha(g, -top)?,
                GluedSector::Zero => unreachable!("standard gluings have no 0 sector"),
            };
            let lambda = left_lattice.pairing(gs.left_class(e.j), &d.d1)?
                + right_lattice.pairing(gs.right_class(e.k), &d.d2)?
                + int(if e.sector == GluedSector::Plus { 2 } else { -2 });
            glued[alpha - 1].add_term(Gaussian::real(lambda), &Gaussian::real(e.coeff.clone()));
        }
        let mut total = ExpPolynomial::zero(Marker::Plus, full.square().clone());
        for part in &glued {
            total = total.try_add(part)?;
        }
        debug_assert_eq!(total, full);
        Ok(Self {
            label: label.into(),
            left,
            right,
            glued,
        })
    }

    /// The glued side taken from a closed-form manifold's own coordinates
    /// along the glued surface.
    pub fn from_closed_form(
        label: impl Into<String>,
        left: BasisCoordinates,
        right: BasisCoordinates,
        glued: &BasisCoordinates,
    ) -> Result<Self> {
        if left.g != right.g || left.g != glued.g {
            return Err(Error::Domain(format!(
                "genus mismatch: {}, {}, {}",
                left.g, right.g, glued.g
            )));
        }
        let glued = (1..=glued.len())
            .map(|a| glued.normalized(a))
            .collect::<Result<_>>()?;
        Ok(Self {
            label: label.into(),
            left,
            right,
            glued,
        })
    }

    pub fn g(&self) -> u32 {
        self.left.g
    }
}

/// `M_{αα}` in normalized form: `c_{X,α} = c_{X_1,α} · M_{αα} · c_{X_2,α}` with
/// all three factors normalized.
pub fn fit_diagonal(
    refs: &[Reference],
    alphas: &[usize],
) -> Result<BTreeMap<usize, ExpPolynomial>> {
    let Some(first) = refs.first() else {
        return Err(Error::InsufficientData(
            alphas.first().copied().unwrap_or(1),
        ));
    };
    let g = first.g();
    if let Some(bad) = refs.iter().find(|r| r.g() != g || r.right.g != g) {
        return Err(Error::Domain(format!(
            "reference {} has a different genus",
            bad.label
        )));
    }
    let all: Vec<usize> = (1..=2 * g as usize - 1).collect();
    let alphas = if alphas.is_empty() { &all[..] } else { alphas };
    let results: Vec<Result<(usize, ExpPolynomial)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = alphas
            .iter()
            .map(|&alpha| scope.spawn(move || fit_one(refs, alpha).map(|m| (alpha, m))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn fit_one(refs: &[Reference], alpha: usize) -> Result<ExpPolynomial> {
    let g = refs[0].g();
    alpha_to_p(g, alpha)?;
    let mut found: Option<ExpPolynomial> = None;
    for r in refs {
        let denom = r.left.normalized(alpha)?.mul(&r.right.normalized(alpha)?);
        if denom.is_zero() {
            continue;
        }
        let m = r.glued[alpha - 1].exact_div(&denom)?;
        debug_assert_eq!(m.mul(&denom), r.glued[alpha - 1]);
        match &found {
            None => found = Some(m),
            Some(prev) if *prev == m => {}
            Some(_) => return Err(Error::InconsistentReferences(alpha)),
        }
    }
    found.ok_or(Error::InsufficientData(alpha))
}

/// `Σ_α c_{X_1,α}(t) · M_{αα}(t·(D·Σ)) · c_{X_2,α}(t)`, normalized; missing
/// entries of `m` count as zero.
pub fn predict_glued(
    left: &BasisCoordinates,
    right: &BasisCoordinates,
    m: &BTreeMap<usize, ExpPolynomial>,
    d_sigma: &Rational,
) -> Result<ExpPolynomial> {
    if left.g != right.g || left.len() != right.len() {
        return Err(Error::Domain(format!(
            "coordinate index sets differ: genus {} vs {}",
            left.g, right.g
        )));
    }
    if let Some(alpha) = m.keys().find(|&&a| a == 0 || a > left.len()) {
        return Err(Error::Domain(format!(
            "M has index {alpha} outside 1..={}",
            left.len()
        )));
    }
    let s = Gaussian::real(d_sigma.clone());
    let mut total = ExpPolynomial::plain();
    for (alpha, m_aa) in m {
        let term = left
            .normalized(*alpha)?
            .mul(&m_aa.scale_argument(&s)?)
            .mul(&right.normalized(*alpha)?);
        total = if total.is_zero() {
            term
        } else {
            total.try_add(&term)?
        };
    }
    if total.is_zero() {
        let sq = left.normalized(1)?.square().clone() + right.normalized(1)?.square().clone();
        return Ok(ExpPolynomial::zero(Marker::Plus, sq));
    }
    Ok(total)
}

/// The standard reference set for genus `g`: `B_g` glued to itself, the
/// pair `(B_g, B_g)` against the closed form `C_g`, and the doubles of the
/// `K3 # (2g'-2)CP̄²` examples for `g' = 1 .. g-1`. All at `D = (T, T)`.
pub fn default_references(g: u32) -> Result<Vec<Reference>> {
    if g < 2 {
        return Err(Error::Domain(format!("references need g >= 2, got {g}")));
    }
    let gi = i64::from(g);
    let mut refs = Vec::new();
    let bg = build_bg(gi)?;
    let double = |reference: String, entry: &CatalogEntry, d: &str| -> Result<Reference> {
        let side = || GluingSide::new(reference.clone(), entry.clone(), None, None);
        let spec = GluingSpec::new(side()?, side()?, None)?;
        let gs = glue(&spec)?;
        let class = entry.lattice().named(d)?.clone();
        let split = SplitClass::new(&spec, class.clone(), class)?;
        Reference::from_gluing(format!("{reference} double"), &gs, &split)
    };
    refs.push(double(format!("bg:{g}"), &bg, "T1")?);
    let f = bg.lattice().named("T1")?.clone();
    let side = entry_coordinates(&bg, "Sigma_g", &f)?;
    let cg = closed_form_cg(gi)?;
    let hat = cg.lattice().named("Sigma_hat_2")?.clone();
    let target = entry_coordinates(&cg, "Sigma_g", &hat)?;
    refs.push(Reference::from_closed_form(
        format!("bg:{g} pair against cg:{g}"),
        side.clone(),
        side,
        &target,
    )?);
    for g_prime in 1..gi {
        let entry = build_dia2_example(g_prime, gi)?;
        refs.push(double(format!("dia2:{g_prime}:{g}"), &entry, "T")?);
    }
    Ok(refs)
}

/// `{"alpha": int, "M": ExpPolynomial}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FittedEntry {
    pub alpha: usize,
    #[serde(rename = "M")]
    pub m: ExpPolynomialJson,
}

pub fn fitted_to_json(m: &BTreeMap<usize, ExpPolynomial>) -> Vec<FittedEntry> {
    m.iter()
        .map(|(alpha, p)| FittedEntry {
            alpha: *alpha,
            m: p.to_json(),
        })
        .collect()
}
