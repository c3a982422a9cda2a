//! Gluing invariants across the catalog, and agreement between the gluing
//! formula and the pairing-matrix prediction.

mod common;

use std::collections::BTreeMap;

use donaldson::catalog::lookup;
use donaldson::error::Error;
use donaldson::gluing::{
    coefficient_match, eval_glued, glue, glue_conjectural, glue_torus, GluedSeries, GluingSide,
    GluingSpec, SplitClass,
};
use donaldson::number::{int, rat, sign_pow, Gaussian, Rational};
use donaldson::pairing_fit::{
    default_references, entry_coordinates, fit_diagonal, predict_glued, BasisCoordinates, Reference,
};
use donaldson::series::DonaldsonSeries;
use num_traits::Zero;
use proptest::prelude::*;

use common::{catalog_gluings, w_probe};

fn spec_of(left: &str, right: &str, g: u32, w_sq: Option<i64>) -> GluingSpec {
    let side = |r: &str| GluingSide::for_genus(r, lookup(r).unwrap(), g).unwrap();
    GluingSpec::new(side(left), side(right), w_sq).unwrap()
}

#[test]
fn swap_symmetry() {
    for spec in catalog_gluings(2..=4) {
        let a = glue(&spec).unwrap();
        let b = glue(&spec.swapped()).unwrap();
        let mut lhs: Vec<_> = a
            .entries()
            .iter()
            .map(|e| (e.k, e.j, e.sector, e.coeff.clone()))
            .collect();
        let mut rhs: Vec<_> = b
            .entries()
            .iter()
            .map(|e| (e.j, e.k, e.sector, e.coeff.clone()))
            .collect();
        lhs.sort_by(|x, y| (x.0, x.1, x.2.as_str()).cmp(&(y.0, y.1, y.2.as_str())));
        rhs.sort_by(|x, y| (x.0, x.1, x.2.as_str()).cmp(&(y.0, y.1, y.2.as_str())));
        assert_eq!(
            lhs, rhs,
            "{} / {}",
            spec.left.reference, spec.right.reference
        );
    }
}

#[test]
fn glued_classes_pair_with_sigma_extremally() {
    for spec in catalog_gluings(2..=4) {
        let gs = glue(&spec).unwrap();
        let d = SplitClass::new(
            &spec,
            spec.left.surface.class.clone(),
            spec.right.entry.lattice().zero(),
        )
        .unwrap();
        let v = eval_glued(&gs, &d).unwrap();
        let top = Gaussian::from_int(2 * i64::from(spec.g) - 2);
        assert!(v.exponents().all(|l| l == &top || l == &-top.clone()));
    }
}

#[test]
fn empty_gluings() {
    for g in 2..=5u32 {
        for gp in 1..g {
            let r = format!("dia2:{gp}:{g}");
            assert!(glue(&spec_of(&r, &r, g, None)).unwrap().is_empty(), "{r}");
        }
    }
    // K3 carries a genus-g surface through the g' = 1 construction.
    let gs = glue(&spec_of("dia2:1:3", "bg:3", 3, None)).unwrap();
    assert!(gs.is_empty());
    let d = w_probe(gs.spec());
    assert!(eval_glued(&gs, &d).unwrap().is_zero());
}

#[test]
fn epsilon_variant_scales_the_normalized_output() {
    for spec in catalog_gluings(2..=4) {
        let base = glue(&spec).unwrap();
        for delta in [2, -2, 4] {
            let s = GluingSpec::new(
                spec.left.clone(),
                spec.right.clone(),
                Some(spec.w_sq + delta),
            )
            .unwrap();
            let eps = int(sign_pow((i64::from(spec.g) - 1) * delta / 2));
            assert_eq!(s.epsilon(), sign_pow((i64::from(spec.g) - 1) * delta / 2));
            let v = glue(&s).unwrap();
            assert_eq!(v.entries().len(), base.entries().len());
            for (x, y) in v.entries().iter().zip(base.entries()) {
                assert_eq!((x.j, x.k, x.sector), (y.j, y.k, y.sector));
                assert_eq!(x.coeff, &eps * &y.coeff);
            }
        }
    }
}

#[test]
fn odd_w_sq_offset_is_rejected() {
    let spec = spec_of("bg:2", "bg:2", 2, None);
    let err =
        GluingSpec::new(spec.left.clone(), spec.right.clone(), Some(spec.w_sq + 1)).unwrap_err();
    assert!(matches!(err, Error::Parity(_)));
}

#[test]
fn genus_mismatch_is_rejected() {
    let l = GluingSide::for_genus("bg:2", lookup("bg:2").unwrap(), 2).unwrap();
    let r = GluingSide::for_genus("bg:3", lookup("bg:3").unwrap(), 3).unwrap();
    assert!(GluingSpec::new(l, r, None).is_err());
}

/// The coefficient identity through the `t = πi/2` substitution: at
/// `D = w = (w_1, w_2)` every exponent is an integer, and `i^{κ·w}` times
/// `(-1)^{w²/2}` strips the glued twist from each term.
#[test]
fn quarter_turn_device_matches_grouped_sums() {
    for spec in catalog_gluings(2..=4) {
        let gs = glue(&spec).unwrap();
        if gs.is_empty() {
            continue;
        }
        let w = w_probe(&spec);
        let w_sq = spec.w1_sq() + spec.w2_sq();
        let v = eval_glued(&gs, &w).unwrap();
        let device = v
            .sum_at_quarter_turn()
            .unwrap()
            .scale(&int(sign_pow(w_sq / 2) * spec.epsilon()));
        let mut grouped = Rational::zero();
        for kj in spec.left.entry.series.entries() {
            for lk in spec.right.entry.series.entries() {
                let m = coefficient_match(&gs, &kj.class, &lk.class).unwrap();
                if m.sector.is_some() {
                    grouped += m.lhs;
                }
            }
        }
        // Each (K, L) group is counted once per parent pair restricting to it;
        // on the catalog restrictions are injective, so the sums agree.
        assert_eq!(
            device,
            Gaussian::real(grouped),
            "{} / {}",
            spec.left.reference,
            spec.right.reference
        );
    }
}

#[test]
fn non_attaining_pairs_give_zero_sides() {
    let spec = spec_of("bg:3", "bg:3", 3, None);
    let gs = glue(&spec).unwrap();
    let k = spec.left.entry.lattice().zero();
    let m = coefficient_match(&gs, &k, &k).unwrap();
    assert!(m.sector.is_none() && m.lhs.is_zero() && m.rhs.is_zero());
}

#[test]
fn torus_examples() {
    let spec = spec_of("K3", "K3", 1, None);
    assert!(matches!(glue(&spec), Err(Error::Gluing(_))));
    let gs = glue_torus(&spec).unwrap();
    let total: Rational = gs.entries().iter().map(|e| e.coeff.clone()).sum();
    let a = spec.left.entry.series.twist(&spec.left.w).unwrap()[0]
        .coeff
        .clone();
    let b = spec.right.entry.series.twist(&spec.right.w).unwrap()[0]
        .coeff
        .clone();
    assert_eq!(total, -(a * b));

    let mut zero_side = spec.left.clone();
    zero_side.entry.series = DonaldsonSeries::zero(zero_side.entry.lattice().clone()).unwrap();
    let z = GluingSpec::new(zero_side, spec.right.clone(), None).unwrap();
    assert!(glue_torus(&z).unwrap().is_empty());
}

#[test]
fn conjectural_on_empty_input_is_empty() {
    let mut spec = spec_of("cg:3", "cg:3", 3, None);
    spec.left.entry.series = DonaldsonSeries::zero(spec.left.entry.lattice().clone()).unwrap();
    assert!(glue_conjectural(&spec).unwrap().is_empty());
    let g2 = glue_conjectural(&spec_of("cg:2", "cg:2", 2, None)).unwrap();
    assert_eq!(g2.entries().len(), 2);
}

#[test]
fn json_round_trip_over_catalog() {
    for spec in catalog_gluings(2..=3) {
        let gs = glue(&spec).unwrap();
        let j = gs.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = GluedSeries::from_json(&serde_json::from_str(&text).unwrap(), lookup).unwrap();
        assert_eq!(back, gs);
    }
}

fn coordinates_for(spec: &GluingSpec, d: &SplitClass) -> (BasisCoordinates, BasisCoordinates) {
    let l = entry_coordinates(&spec.left.entry, &spec.left.surface.label, &d.d1).unwrap();
    let r = entry_coordinates(&spec.right.entry, &spec.right.surface.label, &d.d2).unwrap();
    (l, r)
}

/// `D = (D_1, D_2)` pairs with `Σ` as 1: the `w` probe and its shift by a
/// multiple of `Σ` on the left.
fn unit_probes(spec: &GluingSpec) -> Vec<SplitClass> {
    let w = w_probe(spec);
    let shifted = w.rshift(spec, &rat(1, 2)).unwrap();
    vec![w, shifted]
}

#[test]
fn prediction_agrees_with_gluing_formula() {
    for g in 2..=4u32 {
        let m = fit_diagonal(
            &default_references(g).unwrap(),
            &(1..=(2 * g as usize - 1)).collect::<Vec<_>>(),
        )
        .unwrap();
        for spec in catalog_gluings([g]) {
            let gs = glue(&spec).unwrap();
            for d in unit_probes(&spec) {
                let (l, r) = coordinates_for(&spec, &d);
                let predicted = predict_glued(&l, &r, &m, &d.sigma_pairing).unwrap();
                let direct = eval_glued(&gs, &d).unwrap();
                if direct.is_zero() {
                    assert!(
                        predicted.is_zero(),
                        "{} / {}",
                        spec.left.reference,
                        spec.right.reference
                    );
                } else {
                    assert_eq!(
                        predicted, direct,
                        "{} / {}",
                        spec.left.reference, spec.right.reference
                    );
                }
            }
        }
    }
}

#[test]
fn fit_is_independent_of_the_reference() {
    for g in 2..=4u32 {
        let spec = spec_of(&format!("bg:{g}"), &format!("bg:{g}"), g, None);
        let gs = glue(&spec).unwrap();
        let probes = unit_probes(&spec);
        let fits: Vec<BTreeMap<usize, _>> = probes
            .iter()
            .map(|d| {
                let r = Reference::from_gluing("bg", &gs, d).unwrap();
                fit_diagonal(&[r], &[1, 2]).unwrap()
            })
            .collect();
        assert_eq!(fits[0], fits[1], "g = {g}");
        let m11 = &fits[0][&1];
        let m22 = &fits[0][&2];
        let c = donaldson::number::pow2(7 * i64::from(g) - 9);
        assert_eq!(
            m11.coeff(&Gaussian::from_int(2)),
            Gaussian::real(-c.clone())
        );
        assert_eq!(
            m22.coeff(&Gaussian::from_int(-2)),
            Gaussian::real(int(sign_pow(i64::from(g))) * c)
        );
    }
}

#[test]
fn all_zero_matrix_predicts_zero() {
    let spec = spec_of("bg:3", "bg:3", 3, None);
    let d = w_probe(&spec);
    let (l, r) = coordinates_for(&spec, &d);
    let m: BTreeMap<usize, _> = (1..=5)
        .map(|a| (a, donaldson::series::ExpPolynomial::plain()))
        .collect();
    assert!(predict_glued(&l, &r, &m, &d.sigma_pairing)
        .unwrap()
        .is_zero());
    assert!(predict_glued(&l, &r, &BTreeMap::new(), &d.sigma_pairing)
        .unwrap()
        .is_zero());
}

#[test]
fn degenerate_reference_is_insufficient() {
    let spec = spec_of("dia2:1:3", "dia2:1:3", 3, None);
    let gs = glue(&spec).unwrap();
    let r = Reference::from_gluing("k3", &gs, &w_probe(&spec)).unwrap();
    assert!(matches!(
        fit_diagonal(&[r], &[1]),
        Err(Error::InsufficientData(1))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rshift_preserves_evaluation(num in -500i64..500, den in 1i64..60, pick in 0usize..64) {
        let specs = catalog_gluings(2..=3);
        let spec = &specs[pick % specs.len()];
        let gs = glue(spec).unwrap();
        let d = w_probe(spec);
        let r = rat(num, den);
        let shifted = d.rshift(spec, &r).unwrap();
        prop_assert_eq!(shifted.square(spec).unwrap(), d.square(spec).unwrap());
        prop_assert_eq!(eval_glued(&gs, &shifted).unwrap(), eval_glued(&gs, &d).unwrap());
    }
}
