//! Recipe strings, aliases, and the on-disk catalog of JSON entries.
//!
//! Recipes are `elliptic:n`, `bg:g`, `dia2:g':g` and `cg:g`; the aliases
//! `K3`, `S{n}`, `B{g}` and `C{g}` resolve to them. A stored entry is only
//! accepted if re-deriving its recipe reproduces the file byte for byte.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::constructions::{
    build_bg, build_dia2_example, closed_form_cg, elliptic_surface, CatalogEntry, EntryDescriptor,
};
use crate::error::{Error, Result};

pub const CATALOG_DIR_ENV: &str = "DONALDSON_CATALOG_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Recipe {
    Elliptic(i64),
    Bg(i64),
    Dia2 { g_prime: i64, g: i64 },
    Cg(i64),
}

impl Recipe {
    pub fn build(self) -> Result<CatalogEntry> {
        match self {
            Recipe::Elliptic(n) => elliptic_surface(n),
            Recipe::Bg(g) => build_bg(g),
            Recipe::Dia2 { g_prime, g } => build_dia2_example(g_prime, g),
            Recipe::Cg(g) => closed_form_cg(g),
        }
    }

    /// File name inside a catalog directory.
    pub fn file_name(self) -> String {
        format!("{}.json", self.to_string().replace(':', "_"))
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Elliptic(n) => write!(f, "elliptic:{n}"),
            Recipe::Bg(g) => write!(f, "bg:{g}"),
            Recipe::Dia2 { g_prime, g } => write!(f, "dia2:{g_prime}:{g}"),
            Recipe::Cg(g) => write!(f, "cg:{g}"),
        }
    }
}

fn parse_int(text: &str, whole: &str) -> Result<i64> {
    text.trim()
        .parse()
        .map_err(|_| Error::UnknownEntry(format!("{whole}: {text:?} is not an integer")))
}

impl FromStr for Recipe {
    type Err = Error;

    /// Accepts recipes and the aliases `K3`, `S{n}`, `B{g}`, `C{g}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "K3" {
            return Ok(Recipe::Elliptic(2));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["elliptic", n] => Ok(Recipe::Elliptic(parse_int(n, s)?)),
            ["bg", g] => Ok(Recipe::Bg(parse_int(g, s)?)),
            ["cg", g] => Ok(Recipe::Cg(parse_int(g, s)?)),
            ["dia2", gp, g] => Ok(Recipe::Dia2 {
                g_prime: parse_int(gp, s)?,
                g: parse_int(g, s)?,
            }),
            [alias] => {
                let (head, tail) = alias.split_at(alias.len().min(1));
                match head {
                    "S" => Ok(Recipe::Elliptic(parse_int(tail, s)?)),
                    "B" => Ok(Recipe::Bg(parse_int(tail, s)?)),
                    "C" => Ok(Recipe::Cg(parse_int(tail, s)?)),
                    _ => Err(Error::UnknownEntry(s.to_string())),
                }
            }
            _ => Err(Error::UnknownEntry(s.to_string())),
        }
    }
}

/// Builds an entry from a recipe or alias.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    name.parse::<Recipe>()?.build()
}

/// An entry reference: a path to an entry JSON file if one exists there,
/// otherwise a recipe or alias looked up through the catalog at
/// `$DONALDSON_CATALOG_DIR`.
pub fn resolve(reference: &str) -> Result<CatalogEntry> {
    let path = Path::new(reference);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let d: EntryDescriptor = serde_json::from_str(&text)?;
        return CatalogEntry::from_descriptor(&d);
    }
    Catalog::from_env().load(reference)
}

/// The entries `catalog list` shows and the acceptance suite sweeps.
pub fn standard_recipes() -> Vec<Recipe> {
    let mut out: Vec<Recipe> = (2..=5).map(Recipe::Elliptic).collect();
    out.extend((2..=6).map(Recipe::Bg));
    for g in 2..=5 {
        out.extend((1..g).map(|g_prime| Recipe::Dia2 { g_prime, g }));
    }
    out.extend((2..=6).map(Recipe::Cg));
    out
}

/// A directory of JSON entries, one file per recipe.
#[derive(Clone, Debug)]
pub struct Catalog {
    dir: PathBuf,
}

impl Catalog {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$DONALDSON_CATALOG_DIR`, else `./catalog`.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var_os(CATALOG_DIR_ENV)
                .map_or_else(|| PathBuf::from("catalog"), PathBuf::from),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, recipe: Recipe) -> PathBuf {
        self.dir.join(recipe.file_name())
    }

    pub fn store(&self, entry: &CatalogEntry) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let recipe: Recipe = entry.recipe.parse()?;
        let path = self.path_for(recipe);
        fs::write(&path, entry.to_json_string()?)?;
        Ok(path)
    }

    /// Stored entry if present (after checking it against its recipe),
    /// otherwise a fresh build.
    pub fn load(&self, name: &str) -> Result<CatalogEntry> {
        let recipe: Recipe = name.parse()?;
        let path = self.path_for(recipe);
        let built = recipe.build()?;
        if path.exists() {
            let stored = fs::read_to_string(&path)?;
            if stored != built.to_json_string()? {
                return Err(Error::CatalogMismatch(format!("{}", path.display())));
            }
        }
        Ok(built)
    }

    /// Recipes of the stored files, sorted.
    pub fn stored(&self) -> Result<Vec<Recipe>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for item in fs::read_dir(&self.dir)? {
            let path = item?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if let Ok(r) = stem.replace('_', ":").parse::<Recipe>() {
                out.push(r);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Re-derives every stored entry; returns the recipes whose files differ.
    pub fn verify(&self) -> Result<Vec<Recipe>> {
        let mut bad = Vec::new();
        for r in self.stored()? {
            match self.load(&r.to_string()) {
                Ok(_) => {}
                Err(Error::CatalogMismatch(_)) => bad.push(r),
                Err(e) => return Err(e),
            }
        }
        Ok(bad)
    }
}
