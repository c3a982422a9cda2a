//! Builders for the reference manifolds: minimal elliptic surfaces `S_n`,
//! blow-ups, `B_g`, the `K3 # (2g'-2)CP̄²` family with a genus-g surface, and
//! the closed-form target `C_g`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::{HClass, Lattice, LatticeDescriptor, MarkedSurface, ModelKind};
use crate::number::{binomial, int, pow2, sign_pow, Rational};
use crate::series::{DonaldsonSeries, SeriesDescriptor, SeriesEntry};

/// A manifold together with its series, marked surfaces and, for each
/// surface, a distinguished `w` making the pair allowable.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub recipe: String,
    pub provenance: String,
    pub series: DonaldsonSeries,
    pub surfaces: Vec<MarkedSurface>,
    pub w_choices: BTreeMap<String, HClass>,
}

impl CatalogEntry {
    pub fn lattice(&self) -> &Arc<Lattice> {
        self.series.lattice()
    }

    pub fn name(&self) -> &str {
        self.lattice().name()
    }

    pub fn surface(&self, label: &str) -> Result<&MarkedSurface> {
        self.surfaces
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| {
                Error::InvalidSurface(format!("{} has no marked surface {label:?}", self.name()))
            })
    }

    /// The highest-genus marked surface; ties go to the first listed.
    pub fn main_surface(&self) -> Result<&MarkedSurface> {
        self.surfaces
            .iter()
            .rev()
            .max_by_key(|s| s.genus)
            .ok_or_else(|| Error::InvalidSurface(format!("{} has no marked surface", self.name())))
    }

    pub fn w_for(&self, label: &str) -> Result<&HClass> {
        self.w_choices.get(label).ok_or_else(|| {
            Error::InvalidClass(format!(
                "{} has no distinguished w for {label:?}",
                self.name()
            ))
        })
    }

    /// Adjunction against every surface, the `κ -> -κ` symmetry, and
    /// allowability of every distinguished `w`.
    pub fn validate(&self) -> Result<()> {
        for s in &self.surfaces {
            let report = self.series.check_adjunction(s)?;
            if !report.holds {
                return Err(Error::Adjunction(format!(
                    "{} on {}: {} basic class(es) exceed 2g - 2, first {}",
                    s.label,
                    self.name(),
                    report.violators.len(),
                    report.violators[0].class
                )));
            }
        }
        let bad = self.series.check_involution()?;
        if let Some(e) = bad.first() {
            return Err(Error::InvalidSeries(format!(
                "{}: coefficient of -K does not match (-1)^d0 times that of K = {}",
                self.name(),
                e.class
            )));
        }
        for (label, w) in &self.w_choices {
            let s = self.surface(label)?;
            if !self.lattice().is_allowable(w, s)? {
                return Err(Error::NotAllowable(format!(
                    "w = {w} with {label} on {}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    pub fn descriptor(&self) -> EntryDescriptor {
        EntryDescriptor {
            recipe: self.recipe.clone(),
            provenance: self.provenance.clone(),
            lattice: self.lattice().descriptor(),
            series: self.series.descriptor(),
            surfaces: self
                .surfaces
                .iter()
                .map(|s| SurfaceDescriptor {
                    label: s.label.clone(),
                    class: s.class.coords_json(),
                    genus: s.genus,
                    w: self.w_choices.get(&s.label).map(HClass::coords_json),
                })
                .collect(),
        }
    }

    pub fn from_descriptor(d: &EntryDescriptor) -> Result<Self> {
        let lattice = Arc::new(Lattice::from_descriptor(&d.lattice)?);
        let series = DonaldsonSeries::from_descriptor(lattice.clone(), &d.series)?;
        let mut surfaces = Vec::new();
        let mut w_choices = BTreeMap::new();
        for s in &d.surfaces {
            let class = lattice.class_from_json(&s.class)?;
            surfaces.push(MarkedSurface::new(
                &lattice,
                s.label.clone(),
                class,
                s.genus,
            )?);
            if let Some(w) = &s.w {
                w_choices.insert(s.label.clone(), lattice.class_from_json(w)?);
            }
        }
        let entry = Self {
            recipe: d.recipe.clone(),
            provenance: d.provenance.clone(),
            series,
            surfaces,
            w_choices,
        };
        entry.validate()?;
        Ok(entry)
    }

    /// Pretty JSON with a trailing newline; identical inputs give identical bytes.
    pub fn to_json_string(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&self.descriptor())?;
        text.push('\n');
        Ok(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDescriptor {
    pub recipe: String,
    pub provenance: String,
    pub lattice: LatticeDescriptor,
    pub series: SeriesDescriptor,
    pub surfaces: Vec<SurfaceDescriptor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub label: String,
    pub class: Vec<Value>,
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Value>>,
}

/// Copies `lattice` under a new name with `extra` orthogonal `(-1)` generators
/// appended, carrying the named classes along.
fn extend_lattice(lattice: &Lattice, name: &str, extra: usize) -> Result<Lattice> {
    let rank = lattice.rank();
    let mut gram: Vec<Vec<i64>> = lattice
        .gram()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.resize(rank + extra, 0);
            r
        })
        .collect();
    for i in 0..extra {
        let mut row = vec![0; rank + extra];
        row[rank + i] = -1;
        gram.push(row);
    }
    let mut out = Lattice::new(
        name,
        gram,
        lattice.b_plus(),
        lattice.b_one(),
        lattice.model(),
    )?;
    for (label, class) in lattice.named_classes() {
        out.add_named(label.clone(), class.extended(name, extra))?;
    }
    Ok(out)
}

/// Moves every class of `entry` onto `lattice`, which must extend the old
/// lattice by `extra` generators.
fn transport(
    entry: &CatalogEntry,
    lattice: &Arc<Lattice>,
    extra: usize,
    entries: Vec<SeriesEntry>,
) -> Result<CatalogEntry> {
    let name = lattice.name();
    let series = DonaldsonSeries::new(lattice.clone(), entries, entry.series.simple_type())?;
    let surfaces = entry
        .surfaces
        .iter()
        .map(|s| {
            MarkedSurface::new(
                lattice,
                s.label.clone(),
                s.class.extended(name, extra),
                s.genus,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let w_choices = entry
        .w_choices
        .iter()
        .map(|(k, w)| (k.clone(), w.extended(name, extra)))
        .collect();
    Ok(CatalogEntry {
        recipe: entry.recipe.clone(),
        provenance: entry.provenance.clone(),
        series,
        surfaces,
        w_choices,
    })
}

fn renamed(entry: &CatalogEntry, name: &str) -> Result<CatalogEntry> {
    let lattice = Arc::new(extend_lattice(entry.lattice(), name, 0)?);
    let entries = entry
        .series
        .entries()
        .iter()
        .map(|e| SeriesEntry {
            class: e.class.extended(name, 0),
            coeff: e.coeff.clone(),
        })
        .collect();
    transport(entry, &lattice, 0, entries)
}

/// Minimal elliptic surface `S_n` without multiple fibres, `p_g = n - 1`.
/// Modeled on the span of the fibre `F` and a section `σ` (`σ² = -n`); the
/// series is `e^{Q/2} (sinh F)^{n-2}`.
pub fn elliptic_surface(n: i64) -> Result<CatalogEntry> {
    if n == 1 {
        return Err(Error::Chamber("S_1 has b+ = 1".into()));
    }
    if n < 1 {
        return Err(Error::Domain(format!(
            "elliptic surface needs n >= 2, got {n}"
        )));
    }
    let name = if n == 2 {
        "K3".to_string()
    } else {
        format!("S{n}")
    };
    let b_plus =
        u32::try_from(2 * n - 1).map_err(|_| Error::Domain(format!("n = {n} too large")))?;
    let mut lattice = Lattice::new(
        name.clone(),
        vec![vec![0, 1], vec![1, -n]],
        b_plus,
        0,
        ModelKind::Partial,
    )?;
    let f = lattice.class(&[1, 0])?;
    let sigma = lattice.class(&[0, 1])?;
    lattice.add_named("F", f.clone())?;
    lattice.add_named("sigma", sigma.clone())?;
    lattice.add_named("K", f.scale(&int(n - 2)))?;
    let lattice = Arc::new(lattice);

    let m = (n - 2) as u64;
    let scale = pow2(-(n - 2));
    let entries = (0..=m)
        .map(|j| {
            // e^{kF} with k = m - 2j, from (e^F - e^{-F})^m / 2^m.
            let k = m as i64 - 2 * j as i64;
            let coeff = &scale * Rational::from_integer(binomial(m, j)) * int(sign_pow(j as i64));
            Ok(SeriesEntry {
                class: lattice.class(&[k, 0])?,
                coeff,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let series = DonaldsonSeries::new(lattice.clone(), entries, true)?;
    let fibre = MarkedSurface::new(&lattice, "F", f, 1)?;
    let entry = CatalogEntry {
        recipe: format!("elliptic:{n}"),
        provenance: format!(
            "minimal elliptic surface with p_g = {}, no multiple fibres",
            n - 1
        ),
        series,
        surfaces: vec![fibre],
        w_choices: BTreeMap::from([("F".to_string(), sigma)]),
    };
    entry.validate()?;
    Ok(entry)
}

/// Adds an exceptional class `E` with `E² = -1`: each `(κ, c)` becomes
/// `(κ + E, c/2)` and `(κ - E, c/2)`. The class named `K`, if any, moves to
/// `K + E`.
pub fn blow_up(entry: &CatalogEntry) -> Result<CatalogEntry> {
    let count = entry
        .lattice()
        .named_classes()
        .keys()
        .filter(|k| k.starts_with('E') && k[1..].parse::<u32>().is_ok())
        .count();
    let label = format!("E{}", count + 1);
    let name = format!("{}#{label}", entry.name());
    let mut lattice = extend_lattice(entry.lattice(), &name, 1)?;
    let e = lattice.basis_vector(lattice.rank() - 1);
    lattice.add_named(label.clone(), e.clone())?;
    if let Ok(k) = lattice.named("K") {
        let moved = k.try_add(&e)?;
        lattice.add_named("K", moved)?;
    }
    let lattice = Arc::new(lattice);
    let half = Rational::new(1.into(), 2.into());
    let mut entries = Vec::new();
    for old in entry.series.entries() {
        let k = old.class.extended(&name, 1);
        let c = &old.coeff * &half;
        entries.push(SeriesEntry {
            class: k.try_add(&e)?,
            coeff: c.clone(),
        });
        entries.push(SeriesEntry {
            class: k.try_sub(&e)?,
            coeff: c,
        });
    }
    let mut out = transport(entry, &lattice, 1, entries)?;
    out.provenance = format!("{} blown up once more", entry.provenance);
    Ok(out)
}

fn blow_up_times(entry: &CatalogEntry, times: i64) -> Result<CatalogEntry> {
    let mut out = entry.clone();
    for _ in 0..times {
        out = blow_up(&out)?;
    }
    Ok(out)
}

/// `B_g = S_g # g CP̄²` with the genus-g surface `Σ_g = σ + gF - E_1 - … - E_g`
/// and `w = T_1 = F`.
pub fn build_bg(g: i64) -> Result<CatalogEntry> {
    if g < 2 {
        return Err(Error::Domain(format!("B_g needs g >= 2, got {g}")));
    }
    let blown = blow_up_times(&elliptic_surface(g)?, g)?;
    let mut out = renamed(&blown, &format!("B{g}"))?;
    let lattice = out.lattice().clone();
    let f = lattice.named("F")?.clone();
    let mut sigma_g = lattice.named("sigma")?.try_add(&f.scale(&int(g)))?;
    for i in 1..=g {
        sigma_g = sigma_g.try_sub(lattice.named(&format!("E{i}"))?)?;
    }
    let mut named = (*lattice).clone();
    named.add_named("T1", f.clone())?;
    named.add_named("Sigma_g", sigma_g.clone())?;
    let lattice = Arc::new(named);
    out = transport(
        &out,
        &lattice,
        0,
        out.series
            .entries()
            .iter()
            .map(|e| SeriesEntry {
                class: e.class.extended(lattice.name(), 0),
                coeff: e.coeff.clone(),
            })
            .collect(),
    )?;
    out.surfaces.push(MarkedSurface::new(
        &lattice,
        "Sigma_g",
        sigma_g,
        u32::try_from(g).expect("g >= 2"),
    )?);
    out.w_choices.insert("Sigma_g".into(), f);
    out.recipe = format!("bg:{g}");
    out.provenance = format!(
        "S_{g} blown up {g} times, with the genus-{g} surface sigma + {g}F - E_1 - ... - E_{g}"
    );
    out.validate()?;
    Ok(out)
}

/// `K3 # (2g'-2) CP̄²` carrying a genus-g surface `Σ_1 = S + g'T + E_1 + … + E_{2g'-2}`,
/// so that `max |K·Σ_1| = 2g' - 2 < 2g - 2`.
pub fn build_dia2_example(g_prime: i64, g: i64) -> Result<CatalogEntry> {
    if g_prime < 1 || g <= g_prime {
        return Err(Error::Domain(format!(
            "need 1 <= g' < g, got g' = {g_prime}, g = {g}"
        )));
    }
    let blown = blow_up_times(&elliptic_surface(2)?, 2 * g_prime - 2)?;
    let name = format!("dia2_{g_prime}_{g}");
    let base = renamed(&blown, &name)?;
    let mut lattice = (**base.lattice()).clone();
    let t = lattice.named("F")?.clone();
    let s = lattice.named("sigma")?.clone();
    lattice.add_named("T", t.clone())?;
    lattice.add_named("S", s.clone())?;
    let mut sigma1 = s.try_add(&t.scale(&int(g_prime)))?;
    for i in 1..=(2 * g_prime - 2) {
        sigma1 = sigma1.try_add(lattice.named(&format!("E{i}"))?)?;
    }
    lattice.add_named("Sigma_1", sigma1.clone())?;
    let lattice = Arc::new(lattice);
    let series = DonaldsonSeries::new(lattice.clone(), base.series.entries().to_vec(), true)?;
    let entry = CatalogEntry {
        recipe: format!("dia2:{g_prime}:{g}"),
        provenance: format!(
            "K3 blown up {} times, with a genus-{g} surface in the class S + {g_prime}T + E_1 + ... + E_{}",
            2 * g_prime - 2,
            2 * g_prime - 2
        ),
        series,
        surfaces: vec![MarkedSurface::new(&lattice, "Sigma_1", sigma1, u32::try_from(g).expect("g >= 2"))?],
        w_choices: BTreeMap::from([("Sigma_1".to_string(), t)]),
    };
    entry.validate()?;
    Ok(entry)
}

/// Closed form of `C_g = B_g #_{Σ_g} B_g`, modeled on the hyperbolic plane
/// spanned by `Σ̂_2` and `Σ_g`. The canonical class is
/// `K = (2g-2)Σ̂_2 + 2Σ_g`, so `K·Σ̂_2 = 2` and `K·Σ_g = 2g - 2`. Stored
/// untwisted; twisting by `w = Σ̂_2` gives `-2^{3g-5}` on `K` and
/// `(-1)^g 2^{3g-5}` on `-K`.
pub fn closed_form_cg(g: i64) -> Result<CatalogEntry> {
    if g < 2 {
        return Err(Error::Domain(format!("C_g needs g >= 2, got {g}")));
    }
    let b_plus =
        u32::try_from(6 * g - 3).map_err(|_| Error::Domain(format!("g = {g} too large")))?;
    let mut lattice = Lattice::new(
        format!("C{g}"),
        vec![vec![0, 1], vec![1, 0]],
        b_plus,
        0,
        ModelKind::Partial,
    )?;
    let hat = lattice.class(&[1, 0])?;
    let sigma_g = lattice.class(&[0, 1])?;
    let k = lattice.class(&[2 * g - 2, 2])?;
    lattice.add_named("Sigma_hat_2", hat.clone())?;
    lattice.add_named("Sigma_g", sigma_g.clone())?;
    lattice.add_named("K", k.clone())?;
    let lattice = Arc::new(lattice);
    let c = pow2(3 * g - 5);
    let series = DonaldsonSeries::new(
        lattice.clone(),
        vec![
            SeriesEntry {
                class: k.clone(),
                coeff: c.clone(),
            },
            SeriesEntry {
                class: k.neg(),
                coeff: &c * int(sign_pow(g - 1)),
            },
        ],
        true,
    )?;
    let gu = u32::try_from(g).expect("g >= 2");
    let entry = CatalogEntry {
        recipe: format!("cg:{g}"),
        provenance: format!("closed form of B_{g} glued to itself along Sigma_{g}"),
        series,
        surfaces: vec![
            MarkedSurface::new(&lattice, "Sigma_g", sigma_g.clone(), gu)?,
            MarkedSurface::new(&lattice, "Sigma_hat_2", hat.clone(), 2)?,
        ],
        w_choices: BTreeMap::from([
            ("Sigma_g".to_string(), hat),
            ("Sigma_hat_2".to_string(), sigma_g),
        ]),
    };
    entry.validate()?;
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn coeffs(entry: &CatalogEntry) -> Vec<(Vec<i64>, Rational)> {
        entry
            .series
            .entries()
            .iter()
            .map(|e| {
                (
                    e.class
                        .coords()
                        .iter()
                        .map(|c| crate::number::to_i64(c).unwrap())
                        .collect(),
                    e.coeff.clone(),
                )
            })
            .collect()
    }

    #[test]
    fn elliptic_small_cases() {
        assert_eq!(
            coeffs(&elliptic_surface(2).unwrap()),
            vec![(vec![0, 0], int(1))]
        );
        assert_eq!(
            coeffs(&elliptic_surface(3).unwrap()),
            vec![(vec![-1, 0], rat(-1, 2)), (vec![1, 0], rat(1, 2))]
        );
        assert_eq!(
            coeffs(&elliptic_surface(4).unwrap()),
            vec![
                (vec![-2, 0], rat(1, 4)),
                (vec![0, 0], rat(-1, 2)),
                (vec![2, 0], rat(1, 4))
            ]
        );
    }

    #[test]
    fn elliptic_rejects_small_n() {
        assert!(matches!(elliptic_surface(1), Err(Error::Chamber(_))));
        assert!(matches!(elliptic_surface(0), Err(Error::Domain(_))));
    }

    #[test]
    fn blow_up_of_k3() {
        let once = blow_up(&elliptic_surface(2).unwrap()).unwrap();
        assert_eq!(
            coeffs(&once),
            vec![(vec![0, 0, -1], rat(1, 2)), (vec![0, 0, 1], rat(1, 2))]
        );
        let twice = blow_up(&once).unwrap();
        assert_eq!(twice.series.entries().len(), 4);
        assert!(twice.series.entries().iter().all(|e| e.coeff == rat(1, 4)));
        assert!(twice.series.check_involution().unwrap().is_empty());
    }

    #[test]
    fn bg_surface_and_canonical_class() {
        for g in 2..=6 {
            let b = build_bg(g).unwrap();
            let l = b.lattice();
            let s = b.surface("Sigma_g").unwrap();
            assert_eq!(l.square(&s.class).unwrap(), int(0));
            assert_eq!(l.pairing(l.named("T1").unwrap(), &s.class).unwrap(), int(1));
            let k = l.named("K").unwrap();
            assert_eq!(l.pairing(k, &s.class).unwrap(), int(2 * g - 2));
            let top: Vec<_> = b
                .series
                .entries()
                .iter()
                .filter(|e| l.pairing(&e.class, &s.class).unwrap() == int(2 * g - 2))
                .collect();
            assert_eq!(top.len(), 1);
            assert_eq!(&top[0].class, k);
            assert_eq!(top[0].coeff, pow2(-(2 * g - 2)));
            assert_eq!(b.series.entries().len() as i64, (1 << g) * (g - 1));
        }
    }

    #[test]
    fn dia2_pairings() {
        let d = build_dia2_example(2, 3).unwrap();
        let s = d.surface("Sigma_1").unwrap();
        assert_eq!(d.series.max_abs_pairing(&s.class).unwrap(), int(2));
        assert!(s.class.is_odd());
        let k3 = build_dia2_example(1, 2).unwrap();
        assert_eq!(k3.series.entries().len(), 1);
        assert!(build_dia2_example(2, 2).is_err());
        assert!(build_dia2_example(0, 2).is_err());
    }

    #[test]
    fn cg_twisted_coefficients() {
        for (g, first, second) in [(2, -2, 2), (3, -16, -16)] {
            let c = closed_form_cg(g).unwrap();
            let w = c.w_for("Sigma_g").unwrap();
            let twisted = c.series.twisted(w).unwrap();
            let k = c.lattice().named("K").unwrap();
            assert_eq!(twisted.coeff_of(k), int(first));
            assert_eq!(twisted.coeff_of(&k.neg()), int(second));
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let b = build_bg(3).unwrap();
        let text = b.to_json_string().unwrap();
        let d: EntryDescriptor = serde_json::from_str(&text).unwrap();
        let back = CatalogEntry::from_descriptor(&d).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json_string().unwrap(), text);
    }
}
