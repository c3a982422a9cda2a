//! Integral lattices with a symmetric intersection form, classes on them, and
//! the surface-level predicates (characteristic, allowable, permissible) the
//! gluing calculus is built on.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::number::{int, parse_rational, to_i64, Rational};

/// Whether the gram matrix is the whole second homology or just the span of
/// the classes some construction names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Full,
    Partial,
}

/// A (co)homology class in coordinates of a lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClass {
    lattice: String,
    coords: Vec<Rational>,
}

impl HClass {
    pub fn lattice(&self) -> &str {
        &self.lattice
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Reduction mod 2 is non-zero. Only meaningful for integral classes.
    pub fn is_odd(&self) -> bool {
        self.is_integral() && self.coords.iter().any(|c| c.to_integer().is_odd())
    }

    fn check_same(&self, other: &HClass) -> Result<()> {
        if self.lattice != other.lattice || self.coords.len() != other.coords.len() {
            return Err(Error::LatticeMismatch(format!(
                "{} (rank {}) vs {} (rank {})",
                self.lattice,
                self.coords.len(),
                other.lattice,
                other.coords.len()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &HClass) -> Result<HClass> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &HClass) -> Result<HClass> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &HClass, f: impl Fn(&Rational, &Rational) -> Rational) -> HClass {
        HClass {
            lattice: self.lattice.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> HClass {
        HClass {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    pub fn neg(&self) -> HClass {
        self.scale(&int(-1))
    }

    /// True when `self - other` is a rational multiple of `direction`.
    pub fn differs_by_multiple_of(&self, other: &HClass, direction: &HClass) -> Result<bool> {
        let diff = self.try_sub(other)?;
        diff.check_same(direction)?;
        if diff.is_zero() {
            return Ok(true);
        }
        let Some(pivot) = direction.coords.iter().position(|c| !c.is_zero()) else {
            return Ok(false);
        };
        let ratio = &diff.coords[pivot] / &direction.coords[pivot];
        Ok(diff
            .coords
            .iter()
            .zip(&direction.coords)
            .all(|(d, s)| *d == s * &ratio))
    }

    /// Moves the class onto a lattice with extra basis vectors appended.
    pub(crate) fn extended(&self, lattice: &str, extra: usize) -> HClass {
        let mut coords = self.coords.clone();
        coords.extend(std::iter::repeat_with(Rational::zero).take(extra));
        HClass {
            lattice: lattice.to_string(),
            coords,
        }
    }

    pub(crate) fn coords_json(&self) -> Vec<Value> {
        coords_to_json(&self.coords)
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// An integral lattice: the working model of `H^2(X; Z)` for one manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    name: String,
    gram: Vec<Vec<i64>>,
    b_plus: u32,
    b_one: u32,
    model: ModelKind,
    classes: BTreeMap<String, HClass>,
}

impl Lattice {
    /// Validates symmetry and the declared `b+` against the signature of the
    /// modeled block.
    #[allow(clippy::needless_range_loop)]
    pub fn new(
        name: impl Into<String>,
        gram: Vec<Vec<i64>>,
        b_plus: u32,
        b_one: u32,
        model: ModelKind,
    ) -> Result<Self> {
        let name = name.into();
        let rank = gram.len();
        if gram.iter().any(|row| row.len() != rank) {
            return Err(Error::InvalidLattice(format!(
                "{name}: gram matrix is not square"
            )));
        }
        for i in 0..rank {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidLattice(format!(
                        "{name}: gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let sig = signature(&gram);
        match model {
            ModelKind::Full if sig.positive != b_plus as usize => {
                return Err(Error::InvalidLattice(format!(
                    "{name}: declared b+ = {b_plus} but the form has {} positive directions",
                    sig.positive
                )))
            }
            ModelKind::Partial if sig.positive > b_plus as usize => {
                return Err(Error::InvalidLattice(format!(
                    "{name}: modeled block has {} positive directions, more than b+ = {b_plus}",
                    sig.positive
                )))
            }
            _ => {}
        }
        Ok(Self {
            name,
            gram,
            b_plus,
            b_one,
            model,
            classes: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn b_plus(&self) -> u32 {
        self.b_plus
    }

    pub fn b_one(&self) -> u32 {
        self.b_one
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn signature(&self) -> Signature {
        signature(&self.gram)
    }

    pub fn class(&self, coords: &[i64]) -> Result<HClass> {
        self.rational_class(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn rational_class(&self, coords: Vec<Rational>) -> Result<HClass> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidClass(format!(
                "{} coordinates on rank-{} lattice {}",
                coords.len(),
                self.rank(),
                self.name
            )));
        }
        Ok(HClass {
            lattice: self.name.clone(),
            coords,
        })
    }

    pub fn zero(&self) -> HClass {
        HClass {
            lattice: self.name.clone(),
            coords: vec![Rational::zero(); self.rank()],
        }
    }

    pub fn basis_vector(&self, idx: usize) -> HClass {
        let mut v = self.zero();
        v.coords[idx] = int(1);
        v
    }

    pub fn named_classes(&self) -> &BTreeMap<String, HClass> {
        &self.classes
    }

    pub fn named(&self, label: &str) -> Result<&HClass> {
        self.classes
            .get(label)
            .ok_or_else(|| Error::InvalidClass(format!("no class {label:?} on {}", self.name)))
    }

    pub fn add_named(&mut self, label: impl Into<String>, class: HClass) -> Result<()> {
        if class.lattice != self.name || class.rank() != self.rank() {
            return Err(Error::LatticeMismatch(format!(
                "class for {} added to {}",
                class.lattice, self.name
            )));
        }
        self.classes.insert(label.into(), class);
        Ok(())
    }

    /// Parses a class given either as a label or as comma-separated
    /// coordinates (`"1,0,-1/2"`).
    pub fn parse_class(&self, text: &str) -> Result<HClass> {
        if let Ok(c) = self.named(text.trim()) {
            return Ok(c.clone());
        }
        let coords = text
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        self.rational_class(coords)
    }

    fn check_member(&self, u: &HClass) -> Result<()> {
        if u.lattice != self.name || u.rank() != self.rank() {
            return Err(Error::LatticeMismatch(format!(
                "class on {} (rank {}) used with {} (rank {})",
                u.lattice,
                u.rank(),
                self.name,
                self.rank()
            )));
        }
        Ok(())
    }

    /// `u^T Q v`.
    pub fn pairing(&self, u: &HClass, v: &HClass) -> Result<Rational> {
        self.check_member(u)?;
        self.check_member(v)?;
        let mut acc = Rational::zero();
        for (i, ui) in u.coords.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.coords.iter().enumerate() {
                let q = self.gram[i][j];
                if q != 0 && !vj.is_zero() {
                    acc += ui * vj * int(q);
                }
            }
        }
        Ok(acc)
    }

    /// Pairing of two classes known to pair to an integer.
    pub fn pairing_int(&self, u: &HClass, v: &HClass) -> Result<i64> {
        to_i64(&self.pairing(u, v)?)
    }

    pub fn square(&self, u: &HClass) -> Result<Rational> {
        self.pairing(u, u)
    }

    /// `k·v ≡ v·v (mod 2)` for every basis vector `v` of the modeled lattice.
    pub fn is_characteristic(&self, k: &HClass) -> Result<bool> {
        self.check_member(k)?;
        if !k.is_integral() {
            return Err(Error::InvalidClass(format!("{k} is not integral")));
        }
        for idx in 0..self.rank() {
            let v = self.basis_vector(idx);
            let kv = self.pairing_int(k, &v)?;
            if (kv - self.gram[idx][idx]).is_odd() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `w·Σ` odd and `Σ² = 0`.
    pub fn is_allowable(&self, w: &HClass, s: &MarkedSurface) -> Result<bool> {
        if !w.is_integral() {
            return Ok(false);
        }
        let ws = self.pairing(w, &s.class)?;
        let ss = self.square(&s.class)?;
        Ok(ws.is_integer() && ws.to_integer().is_odd() && ss.is_zero())
    }

    pub fn d_zero(&self, w: &HClass) -> Result<i64> {
        let w_sq = to_i64(&self.square(w)?)?;
        d_zero(w_sq, self.b_one, self.b_plus)
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            name: self.name.clone(),
            rank: self.rank(),
            gram: self.gram.clone(),
            b_plus: self.b_plus,
            b_one: self.b_one,
            classes: self
                .classes
                .iter()
                .map(|(k, v)| (k.clone(), v.coords_json()))
                .collect(),
            model: self.model,
        }
    }

    pub fn from_descriptor(d: &LatticeDescriptor) -> Result<Self> {
        if d.rank != d.gram.len() {
            return Err(Error::InvalidLattice(format!(
                "{}: rank {} but gram has {} rows",
                d.name,
                d.rank,
                d.gram.len()
            )));
        }
        let mut lattice = Lattice::new(d.name.clone(), d.gram.clone(), d.b_plus, d.b_one, d.model)?;
        for (label, coords) in &d.classes {
            let class = lattice.rational_class(coords_from_json(coords)?)?;
            lattice.add_named(label.clone(), class)?;
        }
        Ok(lattice)
    }

    /// Coordinates as stored in JSON, validated against this lattice.
    pub fn class_from_json(&self, coords: &[Value]) -> Result<HClass> {
        self.rational_class(coords_from_json(coords)?)
    }
}

/// `d_0 = -w² - (3/2)(1 - b_1 + b^+)`, an integer exactly when
/// `1 - b_1 + b^+` is even.
pub fn d_zero(w_sq: i64, b_one: u32, b_plus: u32) -> Result<i64> {
    let chi = 1 - i64::from(b_one) + i64::from(b_plus);
    if chi.is_odd() {
        return Err(Error::Parity(format!(
            "1 - b1 + b+ = {chi} is odd, so d0 is not an integer"
        )));
    }
    Ok(-w_sq - 3 * chi / 2)
}

/// An embedded surface: its class and genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSurface {
    pub label: String,
    pub class: HClass,
    pub genus: u32,
}

impl MarkedSurface {
    /// Requires an integral odd class of square zero and genus at least one.
    pub fn new(
        lattice: &Lattice,
        label: impl Into<String>,
        class: HClass,
        genus: u32,
    ) -> Result<Self> {
        let label = label.into();
        if genus < 1 {
            return Err(Error::InvalidSurface(format!(
                "{label}: genus must be at least 1"
            )));
        }
        if !class.is_integral() {
            return Err(Error::InvalidSurface(format!(
                "{label}: class {class} is not integral"
            )));
        }
        if !lattice.square(&class)?.is_zero() {
            return Err(Error::InvalidSurface(format!(
                "{label}: class {class} has non-zero self-intersection"
            )));
        }
        if !class.is_odd() {
            return Err(Error::InvalidSurface(format!(
                "{label}: class {class} is even"
            )));
        }
        Ok(Self {
            label,
            class,
            genus,
        })
    }

    /// Surfaces entering a genus-g ≥ 2 gluing.
    pub fn require_gluing_genus(&self) -> Result<()> {
        if self.genus < 2 {
            return Err(Error::InvalidSurface(format!(
                "{} has genus {}; genus >= 2 is required here (use the torus gluing for genus 1)",
                self.label, self.genus
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

/// Exact congruence diagonalization over `Q`.
#[allow(clippy::needless_range_loop)]
pub fn diagonalize(gram: &[Vec<i64>]) -> Vec<Rational> {
    let n = gram.len();
    let mut a: Vec<Vec<Rational>> = gram
        .iter()
        .map(|row| row.iter().map(|&x| int(x)).collect())
        .collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        // Bring a non-zero diagonal entry to position k.
        if let Some(p) = (k..n).find(|&p| !a[p][p].is_zero()) {
            swap_sym(&mut a, k, p);
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && !a[i][j].is_zero())
        {
            // All remaining diagonal entries vanish: e_i + e_j has square 2 a_ij.
            add_sym(&mut a, i, j);
            swap_sym(&mut a, k, i);
        } else {
            diag.extend(std::iter::repeat_with(Rational::zero).take(n - k));
            break;
        }
        let pivot = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in 0..n {
                let delta = &f * &a[k][j];
                a[i][j] -= delta;
            }
            for r in 0..n {
                let delta = &f * &a[r][k];
                a[r][i] -= delta;
            }
        }
        diag.push(pivot);
    }
    diag
}

fn swap_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Row/column operation `e_i <- e_i + e_j`.
#[allow(clippy::needless_range_loop)]
fn add_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    let n = a.len();
    for c in 0..n {
        let v = a[j][c].clone();
        a[i][c] += v;
    }
    for r in 0..n {
        let v = a[r][j].clone();
        a[r][i] += v;
    }
}

pub fn signature(gram: &[Vec<i64>]) -> Signature {
    let diag = diagonalize(gram);
    Signature {
        positive: diag.iter().filter(|d| d.is_positive()).count(),
        negative: diag.iter().filter(|d| d.is_negative()).count(),
        null: diag.iter().filter(|d| d.is_zero()).count(),
    }
}

/// JSON lattice descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub b_plus: u32,
    pub b_one: u32,
    pub classes: BTreeMap<String, Vec<Value>>,
    pub model: ModelKind,
}

/// Integers stay JSON numbers; everything else becomes a `"p/q"` string.
pub fn coords_to_json(coords: &[Rational]) -> Vec<Value> {
    coords
        .iter()
        .map(|c| match to_i64(c) {
            Ok(n) => Value::from(n),
            Err(_) => Value::from(c.to_string()),
        })
        .collect()
}

pub fn coords_from_json(values: &[Value]) -> Result<Vec<Rational>> {
    values
        .iter()
        .map(|v| match v {
            Value::Number(n) => n
                .as_i64()
                .map(int)
                .ok_or_else(|| Error::Parse(format!("coordinate {n} is not an integer"))),
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("bad coordinate {other}"))),
        })
        .collect()
}
