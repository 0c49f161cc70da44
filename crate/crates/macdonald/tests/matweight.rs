use macdonald::laurent::LaurentPoly;
use macdonald::matweight::{
    askey_wilson, orbit_support, reducibility_check, similarity, BasisName, MatrixWeights, Operator, PolyMatrix,
};
use macdonald::params::{rat, KScalar};
use macdonald::rootdata::{RootSystem, TypeName};
use macdonald::weights::order_prec;

fn c(x: &KScalar) -> LaurentPoly {
    LaurentPoly::constant(x.clone())
}

fn xs() -> LaurentPoly {
    &LaurentPoly::mono([1, 0]) + &LaurentPoly::mono([-1, 0])
}

fn half(m: PolyMatrix) -> PolyMatrix {
    let h = KScalar::from_rational(rat(1, 2));
    m.into_iter().map(|r| r.into_iter().map(|x| x.scale(&h)).collect()).collect()
}

#[test]
fn c1_steinberg_weight_and_its_diagonalisation() {
    let rs = RootSystem::catalog(TypeName::C1);
    let mw = MatrixWeights::formal(&rs);
    let [a, b, _, _] = askey_wilson(&rs, &mw.h.k);
    let ab = &a * &b;
    let one = KScalar::one();
    let st = mw.basis(&[], BasisName::Steinberg).unwrap();
    let m = mw.weight_matrix(&st).unwrap();
    let expect = half(vec![
        vec![c(&(&one - &ab)), &xs() - &c(&(&a + &b))],
        vec![&xs().scale(&-&ab) + &c(&(&a + &b)), c(&(&one - &ab))],
    ]);
    assert_eq!(m, expect);
    let u = vec![vec![-&a, one.clone()], vec![-&b, one.clone()]];
    let amb = &(&a - &b) * &KScalar::from_rational(rat(1, 2));
    let diag = vec![
        vec![(&xs().scale(&KScalar::from_int(-1)) + &c(&(&a + &a.inv().unwrap()))).scale(&amb), LaurentPoly::zero()],
        vec![LaurentPoly::zero(), (&xs() - &c(&(&b + &b.inv().unwrap()))).scale(&amb)],
    ];
    assert_eq!(similarity(&m, &u).unwrap(), diag);
}

#[test]
fn c1_eigen_basis_weight() {
    let rs = RootSystem::catalog(TypeName::C1);
    let mw = MatrixWeights::formal(&rs);
    let [a, b, _, _] = askey_wilson(&rs, &mw.h.k);
    let one = KScalar::one();
    let eig = mw.basis(&[], BasisName::Eigen).unwrap();
    let m = mw.weight_matrix(&eig).unwrap();
    let hf = KScalar::from_rational(rat(1, 2));
    assert_eq!(m[0][0], c(&(&(&one - &(&a * &b)) * &hf)));
    assert!(m[0][1].is_zero() && m[1][0].is_zero());
    let x = LaurentPoly::mono([1, 0]);
    let xi = LaurentPoly::mono([-1, 0]);
    let lp = LaurentPoly::one();
    let mut f = LaurentPoly::one();
    for s in [&a, &b] {
        f = &(&f * &(&lp - &x.scale(s))) * &(&lp - &xi.scale(s));
    }
    let d2 = &(&one - &(&a * &b).inv().unwrap()) * &hf;
    assert_eq!(m[1][1], f.scale(&d2));
}

#[test]
fn a2_operator_matrix_and_weight() {
    let rs = RootSystem::catalog(TypeName::A2);
    let mw = MatrixWeights::formal(&rs);
    let st = mw.basis(&[2], BasisName::Steinberg).unwrap();
    let t = mw.h.tau(1);
    let t2 = t * t;
    let one = KScalar::one();
    let d = &(&one - &t2) - &t2.inv().unwrap();
    let m1 = LaurentPoly::orbit_sum(&rs, &[1, 2], &[1, 0]).unwrap();
    let m2 = LaurentPoly::orbit_sum(&rs, &[1, 2], &[0, 1]).unwrap();
    let z = LaurentPoly::zero;
    let expect = vec![
        vec![c(&KScalar::from_int(2)), m1.scale(&(&t2 + &one)), m2.scale(&t2)],
        vec![z(), c(&d), z()],
        vec![z(), z(), c(&d)],
    ];
    assert_eq!(mw.matrix_of_operator(Operator::XElement, &st).unwrap(), expect);
    let eig = mw.basis(&[2], BasisName::Eigen).unwrap();
    let xe = mw.matrix_of_operator(Operator::XElement, &eig).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!(xe[i][j].is_zero());
            }
        }
    }
    let w = mw.weight_matrix(&st).unwrap();
    let poin = mw.h.poincare(&(0..6).collect::<Vec<_>>(), &mw.h.tau_sq_gens());
    let sixth = &poin * &KScalar::from_rational(rat(1, 6));
    assert_eq!(w[0][0], c(&sixth));
    let we = mw.weight_matrix(&eig).unwrap();
    assert_eq!(we[0][0], c(&sixth));
    assert_eq!(we[1][1], we[2][2]);
    assert_eq!(we[1][2], we[2][1].star().scale(&t2.pow(3)));
    assert_eq!(orbit_support(&rs, &we[1][1]).into_iter().collect::<Vec<_>>(), vec![[0, 0], [1, 1]]);
    assert_eq!(orbit_support(&rs, &we[1][2]).into_iter().collect::<Vec<_>>(), vec![[0, 1], [2, 0]]);
    let r = reducibility_check(&rs, &we);
    assert_eq!(r.blocks, vec![vec![0], vec![1, 2]]);
    let dt3 = &(&one + &t2.inv().unwrap()) * &sixth;
    let m21 = r.component(&[2, 0]).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let e = if (i, j) == (1, 2) { dt3.clone() } else { KScalar::zero() };
            assert_eq!(m21[i][j], e, "M_2ω₁[{i}][{j}]");
        }
    }
}

#[test]
fn eigenspaces_are_orthogonal() {
    for (ty, j) in [(TypeName::C1, vec![]), (TypeName::A2, vec![2])] {
        let rs = RootSystem::catalog(ty);
        let mw = MatrixWeights::formal(&rs);
        let eig = mw.basis(&j, BasisName::Eigen).unwrap();
        let n = 3;
        let f = &LaurentPoly::one() + &LaurentPoly::orbit_sum(&rs, &(1..=rs.rank).collect::<Vec<_>>(), &[1, 0]).unwrap();
        let s = mw.w.inner_frac(&(&f * &eig.vectors[0].1), &eig.vectors[1].1, n);
        assert!(s.is_zero_to(order_prec(&rs, n)));
    }
}
