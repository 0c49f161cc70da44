mod common;

use macdonald::hecke::Epsilon;
use macdonald::macpoly::Macdonald;
use macdonald::rootdata::{RootSystem, TypeName};
use macdonald::weights::{order_prec, SeriesFrac, Weights};

#[test]
fn eigenvector_coefficients_match_gram_schmidt() {
    for (ty, lams) in [
        (TypeName::A1, vec![[-1, 0], [2, 0], [-2, 0]]),
        (TypeName::C1, vec![[-1, 0], [2, 0]]),
        (TypeName::A2, vec![[-1, 1], [0, -1], [1, 1]]),
    ] {
        let rs = RootSystem::catalog(ty);
        let m = Macdonald::formal(&rs);
        let w = Weights::formal(&rs);
        let n = 2;
        for lam in lams {
            let e = m.e(&lam).unwrap();
            for (mu, c) in common::gram_schmidt(&rs, &w, &lam, n) {
                let ours = SeriesFrac::from_kscalar(&e.poly.coeff(&mu));
                assert!(ours.agrees_to(&SeriesFrac::from_poly(c), order_prec(&rs, n)), "{ty:?} {lam:?} at {mu:?}");
            }
        }
    }
}

#[test]
fn orbit_relation_across_whole_orbits() {
    let rs = RootSystem::catalog(TypeName::A2);
    let m = Macdonald::formal(&rs);
    for eps in [Epsilon::trivial(&[1, 2]), Epsilon::sign(&[1, 2]), Epsilon::trivial(&[1])] {
        for lam0 in [[1, 0], [1, 1]] {
            if !rs.is_j_dominant(&lam0, &eps.j) {
                continue;
            }
            let f0 = m.f_poly(&eps, &lam0).unwrap();
            for mu in rs.orbit_j(&lam0, &eps.j) {
                let s = m.orbit_relation(&eps, &lam0, &mu).unwrap();
                assert_eq!(m.f_poly(&eps, &mu).unwrap(), f0.scale(&s), "{eps:?} {lam0:?} {mu:?}");
            }
        }
    }
}

#[test]
fn norm_formula_forms() {
    let cases = [
        (TypeName::A1, Epsilon::trivial(&[1]), [1, 0]),
        (TypeName::A1, Epsilon::sign(&[1]), [1, 0]),
        (TypeName::C1, Epsilon::trivial(&[1]), [1, 0]),
        (TypeName::C1, Epsilon::sign(&[1]), [2, 0]),
        (TypeName::A2, Epsilon::trivial(&[2]), [1, 0]),
        (TypeName::A2, Epsilon::trivial(&[1, 2]), [1, 1]),
        (TypeName::A2, Epsilon::sign(&[1, 2]), [1, 1]),
    ];
    for (ty, eps, lam0) in cases {
        let rs = RootSystem::catalog(ty);
        let m = Macdonald::formal(&rs);
        let w = Weights::formal(&rs);
        let r = m.norm_check(&w, &eps, &lam0, 2).unwrap();
        assert!(r.derived_ok, "{ty:?} {eps:?} {lam0:?}");
        // the displayed scalar and the proof's last line disagree with the computed ratio
        assert!(!r.stated_ok && !r.proof_form_ok || lam0 == [1, 0] && eps.j == vec![2]);
    }
}

