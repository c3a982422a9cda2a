#![allow(dead_code)]

use donaldson::catalog::lookup;
use donaldson::constructions::CatalogEntry;
use donaldson::gluing::{GluingSide, GluingSpec, SplitClass};

/// Catalog entries carrying a genus-g surface: `B_g`, the `K3 # (2g'-2)CP̄²`
/// family and `C_g`.
pub fn genus_entries(g: u32) -> Vec<(String, CatalogEntry)> {
    let mut names = vec![format!("bg:{g}")];
    names.extend((1..g).map(|gp| format!("dia2:{gp}:{g}")));
    names.push(format!("cg:{g}"));
    names
        .into_iter()
        .map(|n| {
            let e = lookup(&n).unwrap();
            (n, e)
        })
        .collect()
}

/// Every ordered pair of genus-g entries, glued along their genus-g surfaces.
pub fn catalog_gluings(genera: impl IntoIterator<Item = u32>) -> Vec<GluingSpec> {
    let mut out = Vec::new();
    for g in genera {
        let entries = genus_entries(g);
        for (ln, le) in &entries {
            for (rn, re) in &entries {
                let l = GluingSide::for_genus(ln.clone(), le.clone(), g).unwrap();
                let r = GluingSide::for_genus(rn.clone(), re.clone(), g).unwrap();
                out.push(GluingSpec::new(l, r, None).unwrap());
            }
        }
    }
    out
}

/// `D = (w_1, w_2)`; every catalog `w` pairs to 1 with its surface.
pub fn w_probe(spec: &GluingSpec) -> SplitClass {
    SplitClass::new(spec, spec.left.w.clone(), spec.right.w.clone()).unwrap()
}
