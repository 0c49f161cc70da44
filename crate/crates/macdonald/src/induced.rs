//! The module induced from the trivial character of the parabolic Hecke algebra,
//! free over polynomials on `T(v)` for shortest coset representatives `v`.

use crate::hecke::{Hecke, HeckeError};
use crate::laurent::LaurentPoly;
use crate::params::KScalar;
use crate::rootdata::{Lat, W0Table};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InducedError {
    #[error("f is not W_J-invariant")]
    NotWJInvariant,
    #[error("element is not spherical under T_{0}")]
    NotSpherical(usize),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// `Σ_v f_v(X) T(v)`, keyed by the index of `v` in `W₀`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InducedElement {
    pub coords: BTreeMap<usize, LaurentPoly>,
}

impl InducedElement {
    pub fn zero() -> InducedElement {
        InducedElement::default()
    }

    /// `f·T(v)`.
    pub fn basis(v: usize, f: LaurentPoly) -> InducedElement {
        let mut e = InducedElement::zero();
        e.add(v, f);
        e
    }

    pub fn coord(&self, v: usize) -> LaurentPoly {
        self.coords.get(&v).cloned().unwrap_or_default()
    }

    pub fn add(&mut self, v: usize, f: LaurentPoly) {
        let sum = &self.coord(v) + &f;
        if sum.is_zero() {
            self.coords.remove(&v);
        } else {
            self.coords.insert(v, sum);
        }
    }

    pub fn plus(&self, o: &InducedElement) -> InducedElement {
        let mut out = self.clone();
        for (v, f) in &o.coords {
            out.add(*v, f.clone());
        }
        out
    }

    pub fn scale(&self, c: &KScalar) -> InducedElement {
        let mut out = InducedElement::zero();
        for (v, f) in &self.coords {
            out.add(*v, f.scale(c));
        }
        out
    }

    /// Coordinate-wise product with a polynomial.
    pub fn mul_poly(&self, g: &LaurentPoly) -> InducedElement {
        let mut out = InducedElement::zero();
        for (v, f) in &self.coords {
            out.add(*v, f * g);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Result of recovering `f` from a spherical element.
#[derive(Clone, Debug)]
pub struct SphericalReport {
    pub f: LaurentPoly,
    pub f_invariant: bool,
    pub round_trip: bool,
    /// The `w₀w_J` coordinate is symmetric under `w₀W_Jw₀`.
    pub top_symmetric: bool,
}

impl SphericalReport {
    pub fn ok(&self) -> bool {
        self.f_invariant && self.round_trip && self.top_symmetric
    }
}

pub struct Induced<'h, 'a> {
    pub h: &'h Hecke<'a>,
    pub j: Vec<usize>,
    pub reps: Vec<usize>,
}

impl<'h, 'a> Induced<'h, 'a> {
    pub fn new(h: &'h Hecke<'a>, j: &[usize]) -> Induced<'h, 'a> {
        let reps = h.rs.w0().min_coset_reps(j);
        Induced { h, j: j.to_vec(), reps }
    }

    fn w0(&self) -> &W0Table {
        self.h.rs.w0()
    }

    /// `s_i v = (s_i•v)·m_i(v)`.
    pub fn cocycle(&self, i: usize, v: usize) -> (usize, usize) {
        let w0 = self.w0();
        w0.coset_decompose(w0.mul[w0.s(i)][v], &self.j)
    }

    /// `T_i` on `T(v)` alone.
    fn ti_basis(&self, i: usize, v: usize) -> Vec<(usize, KScalar)> {
        let w0 = self.w0();
        let siv = w0.mul[w0.s(i)][v];
        let t = self.h.tau(i);
        if w0.len[siv] > w0.len[v] {
            let (v2, m) = self.cocycle(i, v);
            vec![(v2, self.h.mult_label(m, &self.h.tau_gens()))]
        } else {
            vec![(siv, KScalar::one()), (v, t - &t.inv().unwrap())]
        }
    }

    pub fn act_ti(&self, i: usize, x: &InducedElement) -> Result<InducedElement, InducedError> {
        let mut out = InducedElement::zero();
        for (v, f) in &x.coords {
            let sf = self.h.s(i, f);
            for (v2, c) in self.ti_basis(i, *v) {
                out.add(v2, sf.scale(&c));
            }
            out.add(*v, self.h.b_apply(i, f)?);
        }
        Ok(out)
    }

    pub fn act_x(&self, mu: &Lat, x: &InducedElement) -> InducedElement {
        x.mul_poly(&LaurentPoly::mono(*mu))
    }

    /// `T(w)` along the reduced word, rightmost letter first.
    pub fn act_tw(&self, w: usize, x: &InducedElement) -> Result<InducedElement, InducedError> {
        let mut out = x.clone();
        for &i in self.w0().word[w].iter().rev() {
            out = self.act_ti(i, &out)?;
        }
        Ok(out)
    }

    /// `Γ(f) = U₀ f(X)T(e)` for `W_J`-invariant `f`.
    pub fn gamma(&self, f: &LaurentPoly) -> Result<InducedElement, InducedError> {
        if !f.is_invariant(self.h.rs, &self.j) {
            return Err(InducedError::NotWJInvariant);
        }
        let w0 = self.w0();
        let gens = self.h.tau_gens();
        let start = InducedElement::basis(0, f.clone());
        let mut total = InducedElement::zero();
        for w in 0..w0.order() {
            total = total.plus(&self.act_tw(w, &start)?.scale(&self.h.mult_label(w, &gens)));
        }
        let all: Vec<usize> = (1..=self.h.rs.rank).collect();
        let lead = self.h.mult_label(w0.longest(&all), &gens);
        Ok(total.scale(&lead.inv().unwrap()))
    }

    pub fn is_spherical(&self, x: &InducedElement) -> Result<Option<usize>, InducedError> {
        for i in 1..=self.h.rs.rank {
            if self.act_ti(i, x)? != x.scale(self.h.tau(i)) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// `w₀w_J`, the longest shortest coset representative.
    pub fn top(&self) -> usize {
        let w0 = self.w0();
        let all: Vec<usize> = (1..=self.h.rs.rank).collect();
        w0.mul[w0.longest(&all)][w0.longest(&self.j)]
    }

    /// `W_J(τ²)/τ_{w_J}`.
    pub fn top_scalar(&self) -> KScalar {
        let w0 = self.w0();
        let wj = self.h.poincare(&w0.subgroup(&self.j), &self.h.tau_sq_gens());
        wj.try_div(&self.h.mult_label(w0.longest(&self.j), &self.h.tau_gens())).unwrap()
    }

    /// Indices `i` with `s_i = w₀ s_j w₀` for `j ∈ J`.
    fn conjugate_j(&self) -> Vec<usize> {
        let w0 = self.w0();
        let all: Vec<usize> = (1..=self.h.rs.rank).collect();
        let l = w0.longest(&all);
        self.j
            .iter()
            .map(|&j| {
                let c = w0.mul[w0.mul[l][w0.s(j)]][l];
                (1..=self.h.rs.rank).find(|&i| w0.s(i) == c).expect("w₀ permutes simple reflections")
            })
            .collect()
    }

    pub fn spherical_project(&self, x: &InducedElement) -> Result<SphericalReport, InducedError> {
        if let Some(i) = self.is_spherical(x)? {
            return Err(InducedError::NotSpherical(i));
        }
        let rs = self.h.rs;
        let all: Vec<usize> = (1..=rs.rank).collect();
        let top = x.coord(self.top());
        let f = top.finite_act(rs, rs.w0().longest(&all)).scale(&self.top_scalar().inv().unwrap());
        let f_invariant = f.is_invariant(rs, &self.j);
        let round_trip = f_invariant && self.gamma(&f)? == *x;
        let top_symmetric = top.is_invariant(rs, &self.conjugate_j());
        Ok(SphericalReport { f, f_invariant, round_trip, top_symmetric })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::random_poly;
    use crate::rootdata::{RootSystem, TypeName};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cases() -> Vec<(RootSystem, Vec<usize>)> {
        vec![
            (RootSystem::catalog(TypeName::A2), vec![2]),
            (RootSystem::catalog(TypeName::A2), vec![]),
            (RootSystem::catalog(TypeName::C1), vec![]),
            (RootSystem::catalog(TypeName::A1), vec![1]),
        ]
    }

    fn random_element(m: &Induced, rng: &mut ChaCha8Rng) -> InducedElement {
        let mut x = InducedElement::zero();
        for &v in &m.reps {
            x.add(v, random_poly(rng, m.h.rs.rank, 2, 1));
        }
        x
    }

    #[test]
    fn cocycle_is_an_action() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let m = Induced::new(&h, &[2]);
        assert_eq!(m.cocycle(2, 0), (0, rs.w0().s(2)));
        assert_eq!(m.cocycle(1, 0), (rs.w0().s(1), 0));
        let s1 = rs.w0().s(1);
        assert_eq!(m.cocycle(2, s1), (rs.w0().mul[rs.w0().s(2)][s1], 0));
        for i in 1..=2 {
            for &v in &m.reps {
                let (v2, _) = m.cocycle(i, v);
                assert!(m.reps.contains(&v2));
                assert_eq!(m.cocycle(i, v2).0, v);
            }
        }
    }

    #[test]
    fn identity_coset_generators() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let m = Induced::new(&h, &[2]);
        let one = InducedElement::basis(0, LaurentPoly::one());
        assert_eq!(m.act_ti(2, &one).unwrap(), one.scale(h.tau(2)));
        assert_eq!(m.act_ti(1, &one).unwrap(), InducedElement::basis(rs.w0().s(1), LaurentPoly::one()));
        assert_eq!(m.act_x(&[0, 0], &one), one);
    }

    #[test]
    fn operator_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (rs, j) in cases() {
            let h = Hecke::formal(&rs);
            let m = Induced::new(&h, &j);
            for _ in 0..3 {
                let x = random_element(&m, &mut rng);
                for i in 1..=rs.rank {
                    let t = h.tau(i);
                    let a = m.act_ti(i, &x).unwrap();
                    let quad = m.act_ti(i, &a).unwrap();
                    let expect = a.scale(&(t - &t.inv().unwrap())).plus(&x);
                    assert_eq!(quad, expect);
                    let f = random_poly(&mut rng, rs.rank, 2, 1);
                    let lhs = m.act_ti(i, &x.mul_poly(&f)).unwrap();
                    let rhs = a.mul_poly(&h.s(i, &f)).plus(&x.mul_poly(&h.b_apply(i, &f).unwrap()));
                    assert_eq!(lhs, rhs);
                }
                if rs.rank == 2 {
                    let b1 = m.act_ti(1, &m.act_ti(2, &m.act_ti(1, &x).unwrap()).unwrap()).unwrap();
                    let b2 = m.act_ti(2, &m.act_ti(1, &m.act_ti(2, &x).unwrap()).unwrap()).unwrap();
                    assert_eq!(b1, b2);
                }
                let mu = [1, -1];
                assert_eq!(m.act_x(&mu, &m.act_x(&[0, 1], &x)), m.act_x(&[1, 0], &x));
            }
        }
    }

    #[test]
    fn gamma_is_spherical_with_expected_top() {
        for (rs, j) in cases() {
            let h = Hecke::formal(&rs);
            let m = Induced::new(&h, &j);
            for lam0 in [[0, 0], [1, 0], [0, 1], [1, 1]] {
                if rs.rank == 1 && lam0[1] != 0 || !rs.is_j_dominant(&lam0, &j) {
                    continue;
                }
                let f = LaurentPoly::orbit_sum(&rs, &j, &lam0).unwrap();
                let g = m.gamma(&f).unwrap();
                assert_eq!(m.is_spherical(&g).unwrap(), None);
                let all: Vec<usize> = (1..=rs.rank).collect();
                let expect = f.finite_act(&rs, rs.w0().longest(&all)).scale(&m.top_scalar());
                assert_eq!(g.coord(m.top()), expect);
                let rep = m.spherical_project(&g).unwrap();
                assert!(rep.ok());
                assert_eq!(rep.f, f);
            }
        }
    }

    #[test]
    fn non_spherical_rejected() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let m = Induced::new(&h, &[2]);
        let one = InducedElement::basis(0, LaurentPoly::one());
        assert!(matches!(m.spherical_project(&one), Err(InducedError::NotSpherical(_))));
        assert_eq!(m.gamma(&LaurentPoly::mono([0, 1])).unwrap_err(), InducedError::NotWJInvariant);
        let r = m.spherical_project(&m.gamma(&LaurentPoly::one()).unwrap()).unwrap();
        assert_eq!(r.f, LaurentPoly::one());
    }
}
