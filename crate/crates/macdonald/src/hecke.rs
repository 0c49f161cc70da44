//! Demazure–Lusztig operators on `K[L]`, Cherednik operators and symmetrisers.

use crate::laurent::{LaurentError, LaurentPoly};
use crate::params::KScalar;
use crate::rootdata::{Elem, Labelling, Lat, RootSystem};
use num_traits::Zero;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("division failure in T_{0}: {1}")]
    DivisionFailure(usize, LaurentError),
    #[error("invalid character: indices {0} and {1} are conjugate but carry different signs")]
    InvalidCharacter(usize, usize),
    #[error("index {0} is not in I₀")]
    BadIndex(usize),
}

/// A linear character of a parabolic `W_J`, given by the indices where it is `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Epsilon {
    pub j: Vec<usize>,
    pub neg: Vec<usize>,
}

impl Epsilon {
    pub fn trivial(j: &[usize]) -> Epsilon {
        Epsilon { j: j.to_vec(), neg: Vec::new() }
    }

    pub fn sign(j: &[usize]) -> Epsilon {
        Epsilon { j: j.to_vec(), neg: j.to_vec() }
    }

    pub fn new(rs: &RootSystem, j: &[usize], neg: &[usize]) -> Result<Epsilon, HeckeError> {
        for &i in j.iter().chain(neg) {
            if i == 0 || i > rs.rank {
                return Err(HeckeError::BadIndex(i));
            }
        }
        let w0 = rs.w0();
        for &a in j {
            for &b in j {
                if a < b {
                    let ab = w0.mul[w0.s(a)][w0.s(b)];
                    let mut x = ab;
                    let mut m = 1;
                    while x != 0 {
                        x = w0.mul[x][ab];
                        m += 1;
                    }
                    if m % 2 == 1 && neg.contains(&a) != neg.contains(&b) {
                        return Err(HeckeError::InvalidCharacter(a, b));
                    }
                }
            }
        }
        Ok(Epsilon { j: j.to_vec(), neg: neg.iter().copied().filter(|x| j.contains(x)).collect() })
    }

    pub fn value(&self, i: usize) -> i64 {
        if self.neg.contains(&i) {
            -1
        } else {
            1
        }
    }

    /// `ε(w)` for a finite Weyl group element of `W_J`.
    pub fn of(&self, rs: &RootSystem, w: usize) -> i64 {
        rs.w0().word[w].iter().map(|&i| self.value(i)).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.neg.is_empty()
    }
}

/// The basic representation for a fixed labelling.
pub struct Hecke<'a> {
    pub rs: &'a RootSystem,
    pub k: Labelling,
    tau: Vec<(KScalar, KScalar)>,
    numer: Vec<LaurentPoly>,
    denom: Vec<LaurentPoly>,
}

impl<'a> Hecke<'a> {
    pub fn new(rs: &'a RootSystem, k: Labelling) -> Hecke<'a> {
        let mut tau = Vec::new();
        let mut numer = Vec::new();
        let mut denom = Vec::new();
        for i in 0..=rs.rank {
            let a = rs.w.simple[i];
            let (t, u) = rs.tau(&a, &k);
            let tt = &t - &t.inv().unwrap();
            let uu = &u - &u.inv().unwrap();
            numer.push(&LaurentPoly::constant(tt) + &LaurentPoly::root_mono(&a).scale(&uu));
            denom.push(&LaurentPoly::one() - &LaurentPoly::root_mono(&a.double()));
            tau.push((t, u));
        }
        Hecke { rs, k, tau, numer, denom }
    }

    pub fn formal(rs: &'a RootSystem) -> Hecke<'a> {
        Hecke::new(rs, rs.formal_labels())
    }

    pub fn tau(&self, i: usize) -> &KScalar {
        &self.tau[i].0
    }

    pub fn tau_tilde(&self, i: usize) -> &KScalar {
        &self.tau[i].1
    }

    pub fn s(&self, i: usize, f: &LaurentPoly) -> LaurentPoly {
        f.weyl_act(&self.rs.w, &self.rs.w.s(i))
    }

    /// `b_{a_i}·(f − s_i f)`, which is always a polynomial.
    pub fn b_apply(&self, i: usize, f: &LaurentPoly) -> Result<LaurentPoly, HeckeError> {
        let d = f - &self.s(i, f);
        if d.is_zero() {
            return Ok(d);
        }
        (&self.numer[i] * &d).exact_div(&self.denom[i]).map_err(|e| HeckeError::DivisionFailure(i, e))
    }

    pub fn try_ti(&self, i: usize, f: &LaurentPoly) -> Result<LaurentPoly, HeckeError> {
        Ok(&self.s(i, f).scale(self.tau(i)) + &self.b_apply(i, f)?)
    }

    pub fn ti(&self, i: usize, f: &LaurentPoly) -> LaurentPoly {
        self.try_ti(i, f).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn ti_inv(&self, i: usize, f: &LaurentPoly) -> LaurentPoly {
        let t = self.tau(i);
        &self.ti(i, f) - &f.scale(&(t - &t.inv().unwrap()))
    }

    pub fn omega(&self, u: usize, f: &LaurentPoly) -> LaurentPoly {
        f.weyl_act(&self.rs.w, &self.rs.w.omega[u].0)
    }

    /// `T(w)` along the canonical reduced word; the rightmost letter acts first.
    pub fn tw(&self, g: &Elem, f: &LaurentPoly) -> LaurentPoly {
        let (u, word) = self.rs.w.reduced_word(g);
        let mut out = f.clone();
        for &i in word.iter().rev() {
            out = self.ti(i, &out);
        }
        self.omega(u, &out)
    }

    pub fn tw_inv(&self, g: &Elem, f: &LaurentPoly) -> LaurentPoly {
        let (u, word) = self.rs.w.reduced_word(g);
        let ui = self.rs.w.inv(&self.rs.w.omega[u].0);
        let mut out = f.weyl_act(&self.rs.w, &ui);
        for &i in &word {
            out = self.ti_inv(i, &out);
        }
        out
    }

    /// `T(w)` for an element of the finite Weyl group.
    pub fn t_finite(&self, w: usize, f: &LaurentPoly) -> LaurentPoly {
        let mut out = f.clone();
        for &i in self.rs.w0().word[w].iter().rev() {
            out = self.ti(i, &out);
        }
        out
    }

    fn is_dominant_lp(&self, l: &Lat) -> bool {
        (1..=self.rs.rank).all(|i| self.rs.w.pair(&self.rs.w.simple[i].grad, l) >= num_rational::Rational64::zero())
    }

    /// `Y^{λ'}`: `T(t(λ'))` on dominant `λ'`, extended multiplicatively.
    pub fn y(&self, lp: &Lat, f: &LaurentPoly) -> LaurentPoly {
        if self.is_dominant_lp(lp) {
            return self.tw(&self.rs.w.translation(*lp), f);
        }
        let c = lp.iter().take(self.rs.rank).map(|x| -x).max().unwrap().max(0);
        let nu: Lat = if self.rs.rank == 2 { [c, c] } else { [c, 0] };
        let mu = crate::rootdata::add(lp, &nu);
        self.y_split(&mu, &nu, f)
    }

    /// `Y^{μ'} (Y^{ν'})⁻¹` for dominant `μ', ν'`.
    pub fn y_split(&self, mu: &Lat, nu: &Lat, f: &LaurentPoly) -> LaurentPoly {
        assert!(self.is_dominant_lp(mu) && self.is_dominant_lp(nu));
        let g = self.tw_inv(&self.rs.w.translation(*nu), f);
        self.tw(&self.rs.w.translation(*mu), &g)
    }

    /// `τ_w` for finite `w` from per-generator values (index by `i-1`).
    pub fn mult_label(&self, w: usize, per_gen: &[KScalar]) -> KScalar {
        self.rs.w0().word[w].iter().fold(KScalar::one(), |acc, &i| &acc * &per_gen[i - 1])
    }

    pub fn tau_gens(&self) -> Vec<KScalar> {
        (1..=self.rs.rank).map(|i| self.tau(i).clone()).collect()
    }

    pub fn tau_sq_gens(&self) -> Vec<KScalar> {
        (1..=self.rs.rank).map(|i| self.tau(i) * self.tau(i)).collect()
    }

    /// `τ^{(ε)}_j`: `τ_j` or `-τ_j⁻¹`.
    pub fn epsilon_gens(&self, eps: &Epsilon) -> Vec<KScalar> {
        (1..=self.rs.rank)
            .map(|i| if eps.value(i) == 1 { self.tau(i).clone() } else { -&self.tau(i).inv().unwrap() })
            .collect()
    }

    pub fn poincare(&self, elems: &[usize], per_gen: &[KScalar]) -> KScalar {
        elems.iter().fold(KScalar::zero(), |acc, &w| &acc + &self.mult_label(w, per_gen))
    }

    /// Shortest representatives of `W_J / W_{J'}` inside `W_J`.
    pub fn relative_reps(&self, j: &[usize], jp: &[usize]) -> Vec<usize> {
        let w0 = self.rs.w0();
        let sub = w0.subgroup(jp);
        w0.subgroup(j).into_iter().filter(|&w| sub.iter().all(|&x| w0.len[w0.mul[w][x]] >= w0.len[w])).collect()
    }

    /// `Σ_{w ∈ elems} c_w T(w) f`, sharing work along reduced words.
    pub fn hecke_sum(&self, elems: &[usize], per_gen: &[KScalar], f: &LaurentPoly) -> LaurentPoly {
        let w0 = self.rs.w0();
        let mut sorted = elems.to_vec();
        sorted.sort_by_key(|&w| w0.len[w]);
        let mut cache: HashMap<usize, LaurentPoly> = HashMap::new();
        cache.insert(0, f.clone());
        let mut total = LaurentPoly::zero();
        for &w in &sorted {
            let v = self.t_finite_cached(w, &mut cache);
            total = &total + &v.scale(&self.mult_label(w, per_gen));
        }
        total
    }

    fn t_finite_cached(&self, w: usize, cache: &mut HashMap<usize, LaurentPoly>) -> LaurentPoly {
        if let Some(v) = cache.get(&w) {
            return v.clone();
        }
        let w0 = self.rs.w0();
        let i = w0.word[w][0];
        let rest = w0.mul[w0.s(i)][w];
        let inner = self.t_finite_cached(rest, cache);
        let v = self.ti(i, &inner);
        cache.insert(w, v.clone());
        v
    }

    /// `U_J^{(ε)} f = (τ^{(ε)}_{w_J})⁻¹ Σ_{w∈W_J} τ^{(ε)}_w T(w) f`.
    pub fn symmetrise(&self, eps: &Epsilon, f: &LaurentPoly) -> LaurentPoly {
        let w0 = self.rs.w0();
        let gens = self.epsilon_gens(eps);
        let wj = w0.subgroup(&eps.j);
        let lead = self.mult_label(w0.longest(&eps.j), &gens);
        self.hecke_sum(&wj, &gens, f).scale(&lead.inv().unwrap())
    }

    /// `W_J(τ^{(ε)2}) / τ^{(ε)}_{w_J}`, the eigenvalue of `U` on its image.
    pub fn symmetriser_scalar(&self, eps: &Epsilon) -> KScalar {
        let w0 = self.rs.w0();
        let gens = self.epsilon_gens(eps);
        let sq: Vec<KScalar> = gens.iter().map(|g| g * g).collect();
        let wj = w0.subgroup(&eps.j);
        self.poincare(&wj, &sq).try_div(&self.mult_label(w0.longest(&eps.j), &gens)).unwrap()
    }

    /// Cleared Y-relation at `i ∈ I₀`, both sides applied to `f`.
    pub fn y_relation_sides(&self, i: usize, lp: &Lat, f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        let rs = self.rs;
        let kp = rs.dual_label(&self.k);
        let ap = rs.wp.simple[i];
        let (t, u) = rs.tau(&ap, &kp);
        let slp = rs.act_lp(rs.w0().s(i), lp);
        let neg_a = [-ap.grad[0], -ap.grad[1]];
        let neg_2a = [-2 * ap.grad[0], -2 * ap.grad[1]];
        let inner = &self.y(lp, &self.ti(i, f)) - &self.ti(i, &self.y(&slp, f));
        let lhs = &inner - &self.y(&neg_2a, &inner);
        let diff = &self.y(lp, f) - &self.y(&slp, f);
        let tt = &t - &t.inv().unwrap();
        let uu = &u - &u.inv().unwrap();
        let rhs = &diff.scale(&tt) + &self.y(&neg_a, &diff).scale(&uu);
        (lhs, rhs)
    }

    /// `T_i(e(μ)g) − e(s_iμ)T_i(g)` against `b_{a_i}·(e(μ) − e(s_iμ))·g`.
    pub fn x_relation_sides(&self, i: usize, mu: &Lat, g: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        let x = LaurentPoly::mono(*mu);
        let sx = self.s(i, &x);
        let lhs = &self.ti(i, &(&x * g)) - &(&sx * &self.ti(i, g));
        let rhs = &self.b_apply(i, &x).unwrap() * g;
        (lhs, rhs)
    }

    /// `(T_i − τ_i)(T_i + τ_i⁻¹) f`.
    pub fn quadratic_residual(&self, i: usize, f: &LaurentPoly) -> LaurentPoly {
        let t = self.tau(i);
        let g = &self.ti(i, f) + &f.scale(&t.inv().unwrap());
        &self.ti(i, &g) - &g.scale(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::random_poly;
    use crate::rootdata::TypeName;
    use rand::SeedableRng;

    fn rng(s: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn ti_on_constants_and_invariants() {
        for ty in [TypeName::A1, TypeName::A2, TypeName::C1] {
            let rs = RootSystem::catalog(ty);
            let h = Hecke::formal(&rs);
            for i in 0..=rs.rank {
                assert_eq!(h.ti(i, &LaurentPoly::one()), LaurentPoly::constant(h.tau(i).clone()));
                assert_eq!(h.ti_inv(i, &LaurentPoly::one()), LaurentPoly::constant(h.tau(i).inv().unwrap()));
            }
        }
    }

    #[test]
    fn quadratic_and_inverse() {
        let mut r = rng(1);
        for ty in [TypeName::A1, TypeName::A2, TypeName::C1] {
            let rs = RootSystem::catalog(ty);
            let h = Hecke::formal(&rs);
            for _ in 0..4 {
                let f = random_poly(&mut r, rs.rank, 3, 2);
                for i in 0..=rs.rank {
                    assert!(h.quadratic_residual(i, &f).is_zero());
                    assert_eq!(h.ti(i, &h.ti_inv(i, &f)), f);
                }
            }
        }
    }

    #[test]
    fn braid_a2() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let mut r = rng(2);
        for _ in 0..3 {
            let f = random_poly(&mut r, 2, 3, 2);
            for (i, j) in [(1, 2), (0, 1), (0, 2)] {
                let a = h.ti(i, &h.ti(j, &h.ti(i, &f)));
                let b = h.ti(j, &h.ti(i, &h.ti(j, &f)));
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn omega_has_finite_order() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let f = random_poly(&mut rng(3), 2, 4, 2);
        let mut g = f.clone();
        for _ in 0..3 {
            g = h.omega(1, &g);
        }
        assert_eq!(g, f);
    }

    #[test]
    fn y_on_one_and_commuting() {
        for ty in [TypeName::A1, TypeName::A2, TypeName::C1] {
            let rs = RootSystem::catalog(ty);
            let h = Hecke::formal(&rs);
            let kp = rs.dual_label(&h.k);
            let rho = rs.rho(&kp);
            let pt = rs.point(rho);
            for lp in [[1, 0], [0, 1], [-1, 1], [1, -2]] {
                if rs.rank == 1 && lp[1] != 0 {
                    continue;
                }
                let y1 = h.y(&lp, &LaurentPoly::one());
                assert_eq!(y1, LaurentPoly::constant(KScalar::qpow(pt.pair(&lp))), "{:?} {:?}", ty, lp);
            }
            let f = random_poly(&mut rng(4), rs.rank, 2, 1);
            let a = [1, 0];
            let b = if rs.rank == 2 { [0, 1] } else { [-1, 0] };
            assert_eq!(h.y(&a, &h.y(&b, &f)), h.y(&b, &h.y(&a, &f)));
        }
    }

    #[test]
    fn bernstein_relations() {
        let mut r = rng(5);
        for ty in [TypeName::A1, TypeName::C1, TypeName::A2] {
            let rs = RootSystem::catalog(ty);
            let h = Hecke::formal(&rs);
            let f = random_poly(&mut r, rs.rank, 2, 1);
            for i in 1..=rs.rank {
                let (l, rr) = h.y_relation_sides(i, &[1, 0], &f);
                assert_eq!(l, rr);
                let (l, rr) = h.x_relation_sides(i, &[1, 0], &f);
                assert_eq!(l, rr);
            }
            let (l, rr) = h.x_relation_sides(0, &[1, 0], &f);
            assert_eq!(l, rr);
        }
    }

    #[test]
    fn poincare_polynomials() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let w0 = rs.w0();
        let sq = h.tau_sq_gens();
        let all: Vec<usize> = (0..w0.order()).collect();
        let t2 = &sq[0];
        let expect = [KScalar::one(), t2.scale_rational(&crate::params::rat(2, 1)), t2.pow(2).scale_rational(&crate::params::rat(2, 1)), t2.pow(3)]
            .iter()
            .fold(KScalar::zero(), |a, b| &a + b);
        assert_eq!(h.poincare(&all, &sq), expect);
        let j = [2];
        let fact = &h.poincare(&w0.min_coset_reps(&j), &sq) * &h.poincare(&w0.subgroup(&j), &sq);
        assert_eq!(fact, expect);
        assert!(h.poincare(&w0.subgroup(&[]), &sq).is_one());
    }

    #[test]
    fn characters() {
        let rs = RootSystem::catalog(TypeName::A2);
        assert!(Epsilon::new(&rs, &[1, 2], &[1]).is_err());
        assert!(Epsilon::new(&rs, &[1, 2], &[1, 2]).is_ok());
        let a1 = RootSystem::catalog(TypeName::A1);
        let h = Hecke::formal(&a1);
        let g = h.epsilon_gens(&Epsilon::sign(&[1]));
        assert_eq!(g[0], -&h.tau(1).inv().unwrap());
        let z = &(&g[0] - h.tau(1)) * &(&g[0] + &h.tau(1).inv().unwrap());
        assert!(z.is_zero());
    }

    #[test]
    fn symmetriser_properties() {
        let mut r = rng(6);
        for (ty, j) in [(TypeName::A1, vec![1]), (TypeName::A2, vec![2]), (TypeName::A2, vec![1, 2]), (TypeName::C1, vec![1])] {
            let rs = RootSystem::catalog(ty);
            let h = Hecke::formal(&rs);
            for eps in [Epsilon::trivial(&j), Epsilon::sign(&j)] {
                let f = random_poly(&mut r, rs.rank, 2, 1);
                let u = h.symmetrise(&eps, &f);
                let gens = h.epsilon_gens(&eps);
                for &jj in &j {
                    assert_eq!(h.ti(jj, &u), u.scale(&gens[jj - 1]));
                    let g = &h.ti(jj, &f) - &f.scale(&gens[jj - 1]);
                    assert!(h.symmetrise(&eps, &g).is_zero());
                }
                assert_eq!(h.symmetrise(&eps, &u), u.scale(&h.symmetriser_scalar(&eps)));
            }
        }
        let rs = RootSystem::catalog(TypeName::A1);
        let h = Hecke::formal(&rs);
        let f = random_poly(&mut r, 1, 3, 2);
        assert_eq!(h.symmetrise(&Epsilon::trivial(&[]), &f), f);
    }

    #[test]
    fn symmetriser_decomposition() {
        let rs = RootSystem::catalog(TypeName::A2);
        let h = Hecke::formal(&rs);
        let f = random_poly(&mut rng(8), 2, 2, 1);
        let w0 = rs.w0();
        for eps in [Epsilon::trivial(&[1, 2]), Epsilon::sign(&[1, 2])] {
            let gens = h.epsilon_gens(&eps);
            let jp = [2];
            let inner = h.symmetrise(&Epsilon { j: jp.to_vec(), neg: eps.neg.iter().copied().filter(|x| *x == 2).collect() }, &f);
            let reps = h.relative_reps(&[1, 2], &jp);
            let wjwjp = w0.mul[w0.longest(&[1, 2])][w0.inv[w0.longest(&jp)]];
            let lhs = h.hecke_sum(&reps, &gens, &inner).scale(&h.mult_label(wjwjp, &gens).inv().unwrap());
            assert_eq!(lhs, h.symmetrise(&eps, &f));
        }
    }
}
