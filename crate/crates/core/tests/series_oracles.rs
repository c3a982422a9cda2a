//! Catalog series against independently expanded products, and the series
//! operations on the catalog.

mod common;

use std::collections::BTreeMap;

use donaldson::catalog::{lookup, standard_recipes};
use donaldson::constructions::{blow_up, build_bg, elliptic_surface};
use donaldson::lattice::HClass;
use donaldson::number::{int, pow2, rat, Gaussian, Rational};
use donaldson::series::{
    apply_relation, default_probes, eval_insert, finite_type_order, relation_poly, split_ws,
    RelationPoly,
};
use num_traits::{One, Zero};

/// `(e^F - e^{-F})^{n-2} / 2^{n-2}` multiplied out term by term, as a map
/// from the multiple of `F` to its coefficient.
fn sinh_power(n: i64) -> BTreeMap<i64, Rational> {
    let mut acc = BTreeMap::from([(0i64, Rational::one())]);
    for _ in 0..n - 2 {
        let mut next = BTreeMap::new();
        for (k, c) in &acc {
            *next.entry(k + 1).or_insert_with(Rational::zero) += c / int(2);
            *next.entry(k - 1).or_insert_with(Rational::zero) -= c / int(2);
        }
        acc = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    acc
}

#[test]
fn elliptic_series_is_the_sinh_power() {
    for n in 2..=9 {
        let e = elliptic_surface(n).unwrap();
        let f = e.lattice().named("F").unwrap().clone();
        let expected = sinh_power(n);
        assert_eq!(e.series.entries().len(), expected.len(), "n = {n}");
        for (k, c) in expected {
            assert_eq!(e.series.coeff_of(&f.scale(&int(k))), c, "n = {n}, k = {k}");
        }
    }
}

#[test]
fn elliptic_examples() {
    let s4 = elliptic_surface(4).unwrap();
    let f = s4.lattice().named("F").unwrap().clone();
    assert_eq!(s4.series.coeff_of(&f.scale(&int(2))), rat(1, 4));
    assert_eq!(s4.series.coeff_of(&s4.lattice().zero()), rat(-1, 2));
    assert_eq!(s4.series.coeff_of(&f.scale(&int(-2))), rat(1, 4));
    assert_eq!(s4.lattice().b_plus(), 7);
}

/// Blow-ups multiply the series by `(e^E + e^{-E})/2` and move `K` to `K + E`.
#[test]
fn blow_up_tensors_with_exceptional_block() {
    let k3 = lookup("K3").unwrap();
    let once = blow_up(&k3).unwrap();
    let twice = blow_up(&once).unwrap();
    assert_eq!(twice.series.entries().len(), 4);
    let e1 = twice.lattice().basis_vector(twice.lattice().rank() - 2);
    let e2 = twice.lattice().basis_vector(twice.lattice().rank() - 1);
    for s1 in [-1, 1] {
        for s2 in [-1, 1] {
            let k = e1.scale(&int(s1)).try_add(&e2.scale(&int(s2))).unwrap();
            assert_eq!(twice.series.coeff_of(&k), rat(1, 4), "{k}");
        }
    }
    assert_eq!(twice.lattice().b_plus(), k3.lattice().b_plus());
}

#[test]
fn bg_top_class_is_unique_and_canonical() {
    for g in 2..=6 {
        let bg = build_bg(g).unwrap();
        let s = bg.surface("Sigma_g").unwrap();
        let top: Vec<_> = bg
            .series
            .entries()
            .iter()
            .filter(|e| bg.lattice().pairing(&e.class, &s.class).unwrap() == int(2 * g - 2))
            .collect();
        assert_eq!(top.len(), 1, "g = {g}");
        assert_eq!(&top[0].class, bg.lattice().named("K").unwrap());
        assert_eq!(top[0].coeff, pow2(2 - 2 * g));
        assert_eq!(
            bg.series.entries().len(),
            2usize.pow(g as u32) * (g as usize - 1)
        );
    }
}

#[test]
fn every_catalog_entry_validates_and_round_trips() {
    for r in standard_recipes() {
        let e = r.build().unwrap();
        e.validate().unwrap();
        assert_eq!(e.recipe, r.to_string());
        let text = e.to_json_string().unwrap();
        let back = donaldson::constructions::CatalogEntry::from_descriptor(
            &serde_json::from_str(&text).unwrap(),
        )
        .unwrap();
        assert_eq!(back.to_json_string().unwrap(), text, "{r}");
    }
}

#[test]
fn split_round_trips_on_catalog() {
    for r in standard_recipes() {
        let e = r.build().unwrap();
        for s in &e.surfaces {
            let Some(w) = e.w_choices.get(&s.label) else {
                continue;
            };
            let split = split_ws(&e.series, w, s).unwrap();
            assert_eq!(split.unsplit().unwrap(), e.series, "{r} on {}", s.label);
            assert_eq!(
                split.unsplit_twisted().unwrap(),
                e.series.twisted(w).unwrap()
            );
        }
    }
}

#[test]
fn k3_split_is_all_negative() {
    let k3 = lookup("K3").unwrap();
    let s = k3.main_surface().unwrap();
    let w = k3.w_for(&s.label).unwrap();
    let split = split_ws(&k3.series, w, s).unwrap();
    assert!(split.positive().is_empty());
    assert_eq!(split.negative().len(), 1);
    let a_w = k3.series.twist(w).unwrap()[0].coeff.clone();
    assert_eq!(a_w, int(-1));
    assert_eq!(
        split.negative()[0].1,
        Gaussian::i_pow(-split.d0()).scale(&a_w)
    );
}

#[test]
fn insertion_of_sigma_on_bg_top_term() {
    for g in 2..=5 {
        let bg = build_bg(g).unwrap();
        let s = bg.surface("Sigma_g").unwrap();
        let w = bg.w_for("Sigma_g").unwrap();
        let d = bg.lattice().named("T1").unwrap();
        let k = bg.lattice().named("K").unwrap();
        let v = eval_insert(&bg.series, w, s, d, 0, 1).unwrap();
        let lambda = Gaussian::real(bg.lattice().pairing(k, d).unwrap());
        // Every positive-sector class sharing the exponent K·D, summed by hand.
        let mut from_top = Rational::zero();
        for e in bg.series.twist(w).unwrap() {
            let ks = bg.lattice().pairing(&e.class, &s.class).unwrap();
            if bg.lattice().pairing(&e.class, d).unwrap() == lambda.re
                && ks.clone() % int(4) != Rational::zero()
            {
                from_top += e.coeff * (int(1) + ks);
            }
        }
        assert_eq!(
            v.positive.coeff(&lambda),
            Gaussian::real(from_top),
            "g = {g}"
        );
    }
    // At g = 2 the positive sector is ±K, both with exponent 0.
    let b2 = build_bg(2).unwrap();
    let s = b2.surface("Sigma_g").unwrap();
    let w = b2.w_for("Sigma_g").unwrap();
    let d = b2.lattice().named("T1").unwrap();
    let v = eval_insert(&b2.series, w, s, d, 0, 1).unwrap();
    let plus_sum: Gaussian = v
        .positive
        .terms()
        .values()
        .fold(Gaussian::zero(), |a, c| &a + c);
    // K and -K contribute (1/4)(1 + 2) and (1/4)(1 - 2).
    assert_eq!(plus_sum, Gaussian::real(rat(3, 4) - rat(1, 4)));
}

#[test]
fn x_squared_minus_four_and_unit_relation() {
    let bg = build_bg(3).unwrap();
    let s = bg.surface("Sigma_g").unwrap();
    let w = bg.w_for("Sigma_g").unwrap();
    let d = bg.lattice().named("T1").unwrap();
    let z = RelationPoly::from_terms([(0, 2, int(1)), (0, 0, int(-4))]);
    assert!(apply_relation(&bg.series, w, s, &z, d)
        .unwrap()
        .value
        .is_zero());
    let one = apply_relation(&bg.series, w, s, &RelationPoly::one(), d)
        .unwrap()
        .value;
    assert_eq!(one, eval_insert(&bg.series, w, s, d, 0, 0).unwrap());
}

#[test]
fn relation_withdraws_guarantee_off_unit_pairing() {
    let bg = build_bg(2).unwrap();
    let s = bg.surface("Sigma_g").unwrap();
    let w = bg.w_for("Sigma_g").unwrap();
    let d = bg.lattice().named("T1").unwrap().scale(&int(2));
    let v = apply_relation(&bg.series, w, s, &relation_poly(2).unwrap(), &d).unwrap();
    assert!(!v.vanishing_guaranteed);
}

#[test]
fn relation_vanishes_on_dia2_and_cg() {
    for g in 2..=4u32 {
        for (name, e) in common::genus_entries(g) {
            let s = e.surfaces.iter().find(|s| s.genus == g).unwrap();
            let w = e.w_for(&s.label).unwrap();
            let z = relation_poly(g).unwrap();
            for d in default_probes(e.lattice(), s).unwrap() {
                let v = apply_relation(&e.series, w, s, &z, &d).unwrap();
                assert!(v.value.is_zero(), "{name}, D = {d}");
            }
        }
    }
}

#[test]
fn finite_type_examples() {
    let k3 = lookup("K3").unwrap();
    let s = k3.main_surface().unwrap();
    let probes: Vec<HClass> = default_probes(k3.lattice(), s).unwrap();
    assert_eq!(
        finite_type_order(&k3.series, k3.w_for(&s.label).unwrap(), s, &probes).unwrap(),
        1
    );
    let zero = donaldson::series::DonaldsonSeries::zero(k3.lattice().clone()).unwrap();
    assert_eq!(
        finite_type_order(&zero, k3.w_for(&s.label).unwrap(), s, &probes).unwrap(),
        0
    );
}

#[test]
fn involution_sign_follows_d0() {
    for r in standard_recipes() {
        let e = r.build().unwrap();
        let d0 = e.series.d_zero_untwisted().unwrap();
        for entry in e.series.entries() {
            let mirror = e.series.coeff_of(&entry.class.neg());
            let sign = if d0.rem_euclid(2) == 0 {
                int(1)
            } else {
                int(-1)
            };
            assert_eq!(mirror, sign * &entry.coeff, "{r}: {}", entry.class);
        }
    }
}
