//! `A_J` as a free module over the `W₀`-invariants: coordinates in catalog bases,
//! the matrix weight, operator matrices and block structure.

use crate::hecke::Hecke;
use crate::laurent::{LaurentError, LaurentPoly};
use crate::params::{Exp, KScalar, SCALE};
use crate::rootdata::{Lat, Labelling, RootSystem, TypeName};
use crate::weights::{SeriesFrac, WeightError, Weights};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("no catalog basis for {0} with J = {1:?}")]
    NoCatalogBasis(TypeName, Vec<usize>),
    #[error("twist matrix is singular")]
    SingularTwistMatrix,
    #[error("coordinates are not W₀-invariant polynomials")]
    CoordinatesNotPolynomial,
    #[error("f is not W_J-invariant")]
    NotInModule,
    #[error("operator does not preserve A_J")]
    NotModuleEndomorphism,
    #[error("similarity matrix is singular")]
    SingularR,
    #[error("unknown basis {0}")]
    UnknownBasis(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

pub type PolyMatrix = Vec<Vec<LaurentPoly>>;
pub type ConstMatrix = Vec<Vec<KScalar>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisName {
    Steinberg,
    Eigen,
}

impl FromStr for BasisName {
    type Err = MatError;
    fn from_str(s: &str) -> Result<Self, MatError> {
        match s {
            "steinberg" => Ok(BasisName::Steinberg),
            "eigen" => Ok(BasisName::Eigen),
            _ => Err(MatError::UnknownBasis(s.into())),
        }
    }
}

impl fmt::Display for BasisName {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            BasisName::Steinberg => "steinberg",
            BasisName::Eigen => "eigen",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// `T_1` on `A` (only for `J = ∅`).
    T1,
    /// `T₁T₂ + T₂T₁ − (τ − τ⁻¹)(T₁ + T₂)`.
    XElement,
}

/// A basis of `A_J` over `A₀`, indexed by shortest coset representatives.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    pub ty: TypeName,
    pub j: Vec<usize>,
    pub name: BasisName,
    pub vectors: Vec<(usize, LaurentPoly)>,
}

/// The Askey–Wilson parameters `(a, b, c, d)` of a rank-one nonreduced system.
pub fn askey_wilson(rs: &RootSystem, k: &Labelling) -> [KScalar; 4] {
    let (t1, u1) = rs.tau_i(1, k);
    let (t0, u0) = rs.tau_i(0, k);
    let q0 = KScalar::qpow(Exp::from_rationals(rs.w.step, &[], SCALE).expect("step on grid"));
    [
        &t1 * &u1,
        -&(&t1 * &u1.inv().unwrap()),
        &(&q0 * &t0) * &u0,
        -&(&(&q0 * &t0) * &u0.inv().unwrap()),
    ]
}

fn det(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = LaurentPoly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, x)| x.clone()).collect()).collect();
        let t = &m[0][c] * &det(&minor);
        acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

fn const_det(m: &ConstMatrix) -> KScalar {
    let lifted: PolyMatrix = m.iter().map(|r| r.iter().map(|c| LaurentPoly::constant(c.clone())).collect()).collect();
    det(&lifted).coeff(&[0, 0])
}

pub fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m).map(|j| (0..b.len()).fold(LaurentPoly::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect()
        })
        .collect()
}

fn lift(r: &ConstMatrix) -> PolyMatrix {
    r.iter().map(|row| row.iter().map(|c| LaurentPoly::constant(c.clone())).collect()).collect()
}

/// `R M R^{*T}`.
pub fn similarity(m: &PolyMatrix, r: &ConstMatrix) -> Result<PolyMatrix, MatError> {
    if const_det(r).is_zero() {
        return Err(MatError::SingularR);
    }
    let n = r.len();
    let rst: ConstMatrix = (0..n).map(|i| (0..n).map(|j| r[j][i].star()).collect()).collect();
    Ok(mat_mul(&mat_mul(&lift(r), m), &lift(&rst)))
}

/// Block structure shared by all `M_μ` in the current basis.
#[derive(Clone, Debug)]
pub struct ReducibilityReport {
    /// `M = Σ_μ M_μ m_μ` over dominant `μ`.
    pub components: BTreeMap<Lat, ConstMatrix>,
    pub blocks: Vec<Vec<usize>>,
}

impl ReducibilityReport {
    pub fn component(&self, mu: &Lat) -> Option<&ConstMatrix> {
        self.components.get(mu)
    }
}

/// Coefficients of `f ∈ A₀` on the orbit sums `m_μ`, `μ` dominant.
pub fn orbit_expand(rs: &RootSystem, f: &LaurentPoly) -> BTreeMap<Lat, KScalar> {
    let all: Vec<usize> = (1..=rs.rank).collect();
    f.terms().iter().filter(|(l, _)| rs.is_j_dominant(l, &all)).map(|(l, c)| (*l, c.clone())).collect()
}

pub fn reducibility_check(rs: &RootSystem, m: &PolyMatrix) -> ReducibilityReport {
    let n = m.len();
    let mut components: BTreeMap<Lat, ConstMatrix> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            for (mu, c) in orbit_expand(rs, &m[i][j]) {
                components.entry(mu).or_insert_with(|| vec![vec![KScalar::zero(); n]; n])[i][j] = c;
            }
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for c in components.values() {
        for i in 0..n {
            for j in 0..n {
                if !c[i][j].is_zero() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort();
    ReducibilityReport { components, blocks }
}

pub struct MatrixWeights<'a> {
    pub rs: &'a RootSystem,
    pub h: Hecke<'a>,
    pub w: Weights<'a>,
}

impl<'a> MatrixWeights<'a> {
    pub fn new(rs: &'a RootSystem, k: Labelling) -> MatrixWeights<'a> {
        MatrixWeights { rs, h: Hecke::new(rs, k.clone()), w: Weights::new(rs, k) }
    }

    pub fn formal(rs: &'a RootSystem) -> MatrixWeights<'a> {
        MatrixWeights::new(rs, rs.formal_labels())
    }

    fn all(&self) -> Vec<usize> {
        (1..=self.rs.rank).collect()
    }

    pub fn basis(&self, j: &[usize], name: BasisName) -> Result<ModuleBasis, MatError> {
        let rs = self.rs;
        let w0 = rs.w0();
        let reps = w0.min_coset_reps(j);
        let m = LaurentPoly::mono;
        let polys: Vec<LaurentPoly> = match (rs.ty, j, name) {
            (TypeName::C1, [], BasisName::Steinberg) => vec![LaurentPoly::one(), m([-1, 0])],
            (TypeName::C1, [], BasisName::Eigen) => {
                let [a, b, _, _] = askey_wilson(rs, &self.h.k);
                let one = LaurentPoly::one();
                let f = &(&one - &m([1, 0]).scale(&a)) * &(&one - &m([1, 0]).scale(&b));
                vec![one, &m([-1, 0]) * &f]
            }
            (TypeName::A2, [2], BasisName::Steinberg) => {
                vec![LaurentPoly::one(), &m([-1, 1]) + &m([0, -1]), m([-1, 0])]
            }
            (TypeName::A2, [2], BasisName::Eigen) => {
                let t = self.h.tau(1);
                let t2 = t * t;
                let one = KScalar::one();
                let hh = &m([1, 0]).scale(&(&t2 + &one)) - &(&m([-1, 1]) + &m([0, -1])).scale(&t2.inv().unwrap());
                let hs = hh.star();
                vec![LaurentPoly::one(), hh, hs]
            }
            _ => return Err(MatError::NoCatalogBasis(rs.ty, j.to_vec())),
        };
        let basis = ModuleBasis { ty: rs.ty, j: j.to_vec(), name, vectors: reps.into_iter().zip(polys).collect() };
        if det(&self.twist_matrix(&basis)).is_zero() {
            return Err(MatError::SingularTwistMatrix);
        }
        Ok(basis)
    }

    /// `(w·e_v)` for `w` over the coset representatives.
    fn twist_matrix(&self, b: &ModuleBasis) -> PolyMatrix {
        b.vectors.iter().map(|(w, _)| b.vectors.iter().map(|(_, e)| e.finite_act(self.rs, *w)).collect()).collect()
    }

    /// Coordinates `f_v ∈ A₀` with `f = Σ f_v e_v`, by Cramer's rule on the twist system.
    pub fn expand_in_basis(&self, f: &LaurentPoly, b: &ModuleBasis) -> Result<Vec<LaurentPoly>, MatError> {
        if !f.is_invariant(self.rs, &b.j) {
            return Err(MatError::NotInModule);
        }
        let a = self.twist_matrix(b);
        let d = det(&a);
        if d.is_zero() {
            return Err(MatError::SingularTwistMatrix);
        }
        let rhs: Vec<LaurentPoly> = b.vectors.iter().map(|(w, _)| f.finite_act(self.rs, *w)).collect();
        let all = self.all();
        let mut out = Vec::new();
        for c in 0..a.len() {
            let mut ac = a.clone();
            for (r, row) in ac.iter_mut().enumerate() {
                row[c] = rhs[r].clone();
            }
            let x = det(&ac).exact_div(&d).map_err(|_| MatError::CoordinatesNotPolynomial)?;
            if !x.is_invariant(self.rs, &all) {
                return Err(MatError::CoordinatesNotPolynomial);
            }
            out.push(x);
        }
        Ok(out)
    }

    pub fn reconstruct(&self, coords: &[LaurentPoly], b: &ModuleBasis) -> LaurentPoly {
        coords.iter().zip(&b.vectors).fold(LaurentPoly::zero(), |acc, (c, (_, e))| &acc + &(c * e))
    }

    /// `m_{v,v'} = (1/#W₀) Σ_w w(e_v e_{v'}^* / Δ₀)`.
    pub fn weight_matrix(&self, b: &ModuleBasis) -> Result<PolyMatrix, MatError> {
        let inv_order = KScalar::from_rational(crate::params::rat(1, self.rs.w0().order() as i64));
        b.vectors
            .iter()
            .map(|(_, e)| {
                b.vectors
                    .iter()
                    .map(|(_, e2)| Ok(self.w.symmetrise_over_delta0(&(e * &e2.star()))?.scale(&inv_order)))
                    .collect()
            })
            .collect()
    }

    /// `(f, g)` as `ct(f̲ᵀ M g̲* ∇)`, reading `ct(F∇)` for invariant `F` as `(#W₀/W₀(τ²)) ct(FΔ)`.
    pub fn inner_via_matrix(&self, f: &LaurentPoly, g: &LaurentPoly, b: &ModuleBasis, n: u32) -> Result<SeriesFrac, MatError> {
        let m = self.weight_matrix(b)?;
        let fc = self.expand_in_basis(f, b)?;
        let gc: Vec<LaurentPoly> = self.expand_in_basis(g, b)?.iter().map(|x| x.star()).collect();
        let mut big = LaurentPoly::zero();
        for (i, fi) in fc.iter().enumerate() {
            for (j, gj) in gc.iter().enumerate() {
                big = &big + &(&(fi * &m[i][j]) * gj);
            }
        }
        let w0 = self.rs.w0();
        let poin = self.h.poincare(&(0..w0.order()).collect::<Vec<_>>(), &self.h.tau_sq_gens());
        let scale = KScalar::from_int(w0.order() as i64).try_div(&poin).unwrap();
        Ok(SeriesFrac::from_kscalar(&scale).mul(&self.w.inner_frac(&big, &LaurentPoly::one(), n)))
    }

    pub fn apply_operator(&self, op: Operator, f: &LaurentPoly) -> LaurentPoly {
        match op {
            Operator::T1 => self.h.ti(1, f),
            Operator::XElement => {
                let t = self.h.tau(1);
                let d = t - &t.inv().unwrap();
                let t1 = self.h.ti(1, f);
                let t2 = self.h.ti(2, f);
                let a = &self.h.ti(1, &t2) + &self.h.ti(2, &t1);
                &a - &(&t1 + &t2).scale(&d)
            }
        }
    }

    /// Columns are the images of the basis vectors.
    pub fn matrix_of_operator(&self, op: Operator, b: &ModuleBasis) -> Result<PolyMatrix, MatError> {
        if op == Operator::XElement && self.rs.rank != 2 || op == Operator::T1 && !b.j.is_empty() {
            return Err(MatError::NotModuleEndomorphism);
        }
        let n = b.vectors.len();
        let mut out = vec![vec![LaurentPoly::zero(); n]; n];
        for (c, (_, e)) in b.vectors.iter().enumerate() {
            let img = self.apply_operator(op, e);
            let coords = self.expand_in_basis(&img, b).map_err(|e| match e {
                MatError::NotInModule | MatError::CoordinatesNotPolynomial => MatError::NotModuleEndomorphism,
                other => other,
            })?;
            for (r, x) in coords.into_iter().enumerate() {
                out[r][c] = x;
            }
        }
        Ok(out)
    }
}

/// The supports of the entries, as sets of dominant weights.
pub fn orbit_support(rs: &RootSystem, f: &LaurentPoly) -> BTreeSet<Lat> {
    orbit_expand(rs, f).into_keys().collect()
}

fn c(x: &KScalar) -> LaurentPoly {
    LaurentPoly::constant(x.clone())
}

fn halve(m: PolyMatrix) -> PolyMatrix {
    let h = KScalar::from_rational(crate::params::rat(1, 2));
    m.into_iter().map(|r| r.into_iter().map(|x| x.scale(&h)).collect()).collect()
}

/// The worked rank-one example: weight matrices in both bases, the `U`-similarity and `T_1`.
pub fn c1_example_checks(rs: &RootSystem) -> Vec<(&'static str, bool)> {
    let mw = MatrixWeights::formal(rs);
    let [a, b, _, _] = askey_wilson(rs, &mw.h.k);
    let ab = &a * &b;
    let one = KScalar::one();
    let hf = KScalar::from_rational(crate::params::rat(1, 2));
    let x = LaurentPoly::mono([1, 0]);
    let xi = LaurentPoly::mono([-1, 0]);
    let xs = &x + &xi;
    let st = mw.basis(&[], BasisName::Steinberg).unwrap();
    let eig = mw.basis(&[], BasisName::Eigen).unwrap();
    let m = mw.weight_matrix(&st).unwrap();
    let expect = halve(vec![
        vec![c(&(&one - &ab)), &xs - &c(&(&a + &b))],
        vec![&xs.scale(&-&ab) + &c(&(&a + &b)), c(&(&one - &ab))],
    ]);
    let u = vec![vec![-&a, one.clone()], vec![-&b, one.clone()]];
    let amb = &(&a - &b) * &hf;
    let diag = vec![
        vec![(&-&xs + &c(&(&a + &a.inv().unwrap()))).scale(&amb), LaurentPoly::zero()],
        vec![LaurentPoly::zero(), (&xs - &c(&(&b + &b.inv().unwrap()))).scale(&amb)],
    ];
    let me = mw.weight_matrix(&eig).unwrap();
    let lp1 = LaurentPoly::one();
    let mut f = LaurentPoly::one();
    for s in [&a, &b] {
        f = &(&f * &(&lp1 - &x.scale(s))) * &(&lp1 - &xi.scale(s));
    }
    let d1 = c(&(&(&one - &ab) * &hf));
    let d2 = f.scale(&(&(&one - &ab.inv().unwrap()) * &hf));
    let t1 = mw.h.tau(1);
    let tm = mw.matrix_of_operator(Operator::T1, &st).unwrap();
    let off = &xs - &c(&(&a + &b).try_div(&ab).unwrap());
    let t_expect = vec![vec![c(t1), off.scale(t1)], vec![LaurentPoly::zero(), c(&t1.try_div(&ab).unwrap())]];
    let te = mw.matrix_of_operator(Operator::T1, &eig).unwrap();
    vec![
        ("steinberg weight matrix", m == expect),
        ("U-similarity diagonalises the steinberg weight", similarity(&m, &u).ok() == Some(diag)),
        ("eigen weight d1 = (1-ab)/2", me[0][0] == d1),
        ("eigen weight is diagonal", me[0][1].is_zero() && me[1][0].is_zero()),
        ("eigen weight d2", me[1][1] == d2),
        ("T_1 in the steinberg basis", tm == t_expect),
        ("T_1 diagonal in the eigen basis", te[0][1].is_zero() && te[1][0].is_zero() && te[0][0] == t_expect[0][0] && te[1][1] == t_expect[1][1]),
    ]
}

/// The rank-two example with `J = {2}`: the `x`-matrix, `m_{1,1}`, entry relations and the block witness.
pub fn a2_example_checks(rs: &RootSystem) -> Vec<(&'static str, bool)> {
    let mw = MatrixWeights::formal(rs);
    let st = mw.basis(&[2], BasisName::Steinberg).unwrap();
    let eig = mw.basis(&[2], BasisName::Eigen).unwrap();
    let t = mw.h.tau(1);
    let t2 = t * t;
    let one = KScalar::one();
    let d = &(&one - &t2) - &t2.inv().unwrap();
    let m1 = LaurentPoly::orbit_sum(rs, &[1, 2], &[1, 0]).unwrap();
    let m2 = LaurentPoly::orbit_sum(rs, &[1, 2], &[0, 1]).unwrap();
    let z = LaurentPoly::zero;
    let x_expect = vec![
        vec![c(&KScalar::from_int(2)), m1.scale(&(&t2 + &one)), m2.scale(&t2)],
        vec![z(), c(&d), z()],
        vec![z(), z(), c(&d)],
    ];
    let xm = mw.matrix_of_operator(Operator::XElement, &st).unwrap();
    let xe = mw.matrix_of_operator(Operator::XElement, &eig).unwrap();
    let x_diag = (0..3).all(|i| (0..3).all(|j| i == j || xe[i][j].is_zero()))
        && xe[0][0] == x_expect[0][0]
        && xe[1][1] == x_expect[1][1]
        && xe[2][2] == x_expect[2][2];
    let h_co = mw.expand_in_basis(&eig.vectors[1].1, &st).unwrap();
    let h_ok = h_co[0] == m1.scale(&(&t2 + &one)) && h_co[1] == c(&-&(&(&t2 + &one) + &t2.inv().unwrap())) && h_co[2].is_zero();
    let we = mw.weight_matrix(&eig).unwrap();
    let poin = mw.h.poincare(&(0..6).collect::<Vec<_>>(), &mw.h.tau_sq_gens());
    let sixth = &poin * &KScalar::from_rational(crate::params::rat(1, 6));
    let r = reducibility_check(rs, &we);
    let dt3 = &(&one + &t2.inv().unwrap()) * &sixth;
    let witness = r.component(&[2, 0]).is_some_and(|m21| {
        (0..3).all(|i| (0..3).all(|j| m21[i][j] == if (i, j) == (1, 2) { dt3.clone() } else { KScalar::zero() }))
    });
    let supp = |f: &LaurentPoly| orbit_support(rs, f).into_iter().collect::<Vec<_>>();
    vec![
        ("x-element matrix in the steinberg basis", xm == x_expect),
        ("x-element diagonal in the eigen basis", x_diag),
        ("h expands in the steinberg basis", h_ok),
        ("m_{1,1} = W0(tau^2)/6", we[0][0] == c(&sixth)),
        ("m_{s1,s1} = m_{s2s1,s2s1}", we[1][1] == we[2][2]),
        ("m_{s1,s2s1} = tau^6 m_{s2s1,s1}^*", we[1][2] == we[2][1].star().scale(&t2.pow(3))),
        ("supports of m_{s1,s1} and m_{s1,s2s1}", supp(&we[1][1]) == vec![[0, 0], [1, 1]] && supp(&we[1][2]) == vec![[0, 1], [2, 0]]),
        ("1+2 block structure", r.blocks == vec![vec![0], vec![1, 2]]),
        ("M_{2w1} = (1+tau^-2) W0(tau^2)/6 E_23", witness),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::random_poly;
    use crate::weights::order_prec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c1_ab(mw: &MatrixWeights) -> (KScalar, KScalar) {
        let [a, b, _, _] = askey_wilson(mw.rs, &mw.h.k);
        (a, b)
    }

    fn c(x: &KScalar) -> LaurentPoly {
        LaurentPoly::constant(x.clone())
    }

    #[test]
    fn c1_t1_matrix_in_steinberg_basis() {
        let rs = RootSystem::catalog(TypeName::C1);
        let mw = MatrixWeights::formal(&rs);
        let (a, b) = c1_ab(&mw);
        let st = mw.basis(&[], BasisName::Steinberg).unwrap();
        let t = mw.matrix_of_operator(Operator::T1, &st).unwrap();
        let t1 = mw.h.tau(1);
        let ab = &a * &b;
        let xs = &LaurentPoly::mono([1, 0]) + &LaurentPoly::mono([-1, 0]);
        let off = &xs - &c(&(&a + &b).try_div(&ab).unwrap());
        let expect = vec![vec![c(t1), off.scale(t1)], vec![LaurentPoly::zero(), c(&t1.try_div(&ab).unwrap())]];
        assert_eq!(t, expect);
        let eig = mw.basis(&[], BasisName::Eigen).unwrap();
        let te = mw.matrix_of_operator(Operator::T1, &eig).unwrap();
        assert_eq!(te[0][1], LaurentPoly::zero());
        assert_eq!(te[1][0], LaurentPoly::zero());
        assert_eq!(te[1][1], expect[1][1]);
    }

    #[test]
    fn expand_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (ty, j) in [(TypeName::C1, vec![]), (TypeName::A2, vec![2])] {
            let rs = RootSystem::catalog(ty);
            let mw = MatrixWeights::formal(&rs);
            for name in [BasisName::Steinberg, BasisName::Eigen] {
                let b = mw.basis(&j, name).unwrap();
                for _ in 0..3 {
                    let g = random_poly(&mut rng, rs.rank, 3, 2);
                    let f = mw.h.symmetrise(&crate::hecke::Epsilon::trivial(&j), &g);
                    let co = mw.expand_in_basis(&f, &b).unwrap();
                    assert_eq!(mw.reconstruct(&co, &b), f);
                }
                let co = mw.expand_in_basis(&LaurentPoly::one(), &b).unwrap();
                assert_eq!(co[0], LaurentPoly::one());
                assert!(co[1..].iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn a2_eigenvector_expands_as_stated() {
        let rs = RootSystem::catalog(TypeName::A2);
        let mw = MatrixWeights::formal(&rs);
        let st = mw.basis(&[2], BasisName::Steinberg).unwrap();
        let eig = mw.basis(&[2], BasisName::Eigen).unwrap();
        let t = mw.h.tau(1);
        let t2 = t * t;
        let one = KScalar::one();
        let m1 = LaurentPoly::orbit_sum(&rs, &[1, 2], &[1, 0]).unwrap();
        let co = mw.expand_in_basis(&eig.vectors[1].1, &st).unwrap();
        assert_eq!(co[0], m1.scale(&(&t2 + &one)));
        assert_eq!(co[1], c(&-&(&(&t2 + &one) + &t2.inv().unwrap())));
        assert!(co[2].is_zero());
    }

    #[test]
    fn not_invariant_rejected() {
        let rs = RootSystem::catalog(TypeName::A2);
        let mw = MatrixWeights::formal(&rs);
        let st = mw.basis(&[2], BasisName::Steinberg).unwrap();
        assert_eq!(mw.expand_in_basis(&LaurentPoly::mono([0, 1]), &st).unwrap_err(), MatError::NotInModule);
        assert!(mw.basis(&[1], BasisName::Steinberg).is_err());
    }

    #[test]
    fn similarity_by_identity() {
        let rs = RootSystem::catalog(TypeName::C1);
        let mw = MatrixWeights::formal(&rs);
        let m = mw.weight_matrix(&mw.basis(&[], BasisName::Steinberg).unwrap()).unwrap();
        let id = vec![vec![KScalar::one(), KScalar::zero()], vec![KScalar::zero(), KScalar::one()]];
        assert_eq!(similarity(&m, &id).unwrap(), m);
        let sing = vec![vec![KScalar::one(), KScalar::one()], vec![KScalar::one(), KScalar::one()]];
        assert_eq!(similarity(&m, &sing).unwrap_err(), MatError::SingularR);
    }

    #[test]
    fn matrix_inner_product_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (ty, j) in [(TypeName::C1, vec![]), (TypeName::A2, vec![2])] {
            let rs = RootSystem::catalog(ty);
            let mw = MatrixWeights::formal(&rs);
            let b = mw.basis(&j, BasisName::Steinberg).unwrap();
            let n = 2;
            let prec = order_prec(&rs, n);
            let one = LaurentPoly::one();
            let direct = mw.w.inner_frac(&one, &one, n);
            assert!(mw.inner_via_matrix(&one, &one, &b, n).unwrap().agrees_to(&direct, prec));
            let eps = crate::hecke::Epsilon::trivial(&j);
            for _ in 0..2 {
                let f = mw.h.symmetrise(&eps, &random_poly(&mut rng, rs.rank, 2, 1));
                let g = mw.h.symmetrise(&eps, &random_poly(&mut rng, rs.rank, 2, 1));
                let direct = mw.w.inner_frac(&f, &g, n);
                assert!(mw.inner_via_matrix(&f, &g, &b, n).unwrap().agrees_to(&direct, prec), "{ty:?}");
            }
        }
    }
}
