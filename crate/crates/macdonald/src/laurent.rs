//! The group algebra `K[L]` with the affine Weyl group action.

use crate::params::text::{Cursor, ParseError};
use crate::params::{Exp, KScalar, ParamError, SCALE};
use crate::rootdata::{add, lat_str, AffRoot, AffineWeyl, Elem, Lat, RootSystem};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("not divisible")]
    NotDivisible,
    #[error("division by zero polynomial")]
    ZeroDivisor,
    #[error("no unique maximal exponent in the support")]
    NoUniqueMaximum,
    #[error("{0:?} is not J-dominant")]
    NotJDominant(Lat),
    #[error("closed form only available for reduced simply-laced types")]
    UnsupportedType,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Total degree-lex key used for exact division.
fn deglex(l: &Lat) -> (i64, i64, i64) {
    (l[0] + l[1], l[0], l[1])
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    terms: BTreeMap<Lat, KScalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(KScalar::one())
    }

    pub fn constant(c: KScalar) -> Self {
        Self::term([0, 0], c)
    }

    pub fn mono(l: Lat) -> Self {
        Self::term(l, KScalar::one())
    }

    pub fn term(l: Lat, c: KScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(l, c);
        p
    }

    /// `e(a) = q(c)·e(Da)` for an affine root.
    pub fn root_mono(a: &AffRoot) -> Self {
        Self::term(a.grad, KScalar::qpow(Exp::from_rationals(a.c, &[], SCALE).expect("root constant")))
    }

    pub fn from_terms<I: IntoIterator<Item = (Lat, KScalar)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (l, c) in it {
            p.add_term(l, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Lat, KScalar> {
        &self.terms
    }

    pub fn support(&self) -> Vec<Lat> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, l: &Lat) -> KScalar {
        self.terms.get(l).cloned().unwrap_or_else(KScalar::zero)
    }

    pub fn add_term(&mut self, l: Lat, c: KScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&l) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&l);
                }
            }
            None => {
                self.terms.insert(l, c);
            }
        }
    }

    pub fn scale(&self, c: &KScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(l, v)| (*l, v * c)).collect() }
    }

    pub fn shift(&self, s: &Lat) -> Self {
        Self { terms: self.terms.iter().map(|(l, v)| (add(l, s), v.clone())).collect() }
    }

    pub fn map_coeffs<F: Fn(&KScalar) -> Result<KScalar, ParamError>>(&self, f: F) -> Result<Self, ParamError> {
        let mut out = Self::zero();
        for (l, c) in &self.terms {
            out.add_term(*l, f(c)?);
        }
        Ok(out)
    }

    /// `e(μ) ↦ e(-μ)` with starred coefficients.
    pub fn star(&self) -> Self {
        Self { terms: self.terms.iter().map(|(l, c)| ([-l[0], -l[1]], c.star())).collect() }
    }

    /// Action of an element of `W` (on `L`-exponents): `g·e(μ) = q(-⟨wμ, t⟩)e(wμ)`.
    pub fn weyl_act(&self, aw: &AffineWeyl, g: &Elem) -> Self {
        let mut out = Self::zero();
        for (l, c) in &self.terms {
            let wl = aw.act_grad(g.w, l);
            let d = aw.pair(&wl, &g.t);
            if d.is_zero() {
                out.add_term(wl, c.clone());
            } else {
                let e = Exp::from_rationals(-d, &[], SCALE).expect("pairing on grid");
                out.add_term(wl, c * &KScalar::qpow(e));
            }
        }
        out
    }

    /// Linear action of a finite Weyl group element.
    pub fn finite_act(&self, rs: &RootSystem, w: usize) -> Self {
        Self { terms: self.terms.iter().map(|(l, c)| (rs.act_l(w, l), c.clone())).collect() }
    }

    pub fn is_invariant(&self, rs: &RootSystem, j: &[usize]) -> bool {
        j.iter().all(|&i| self.finite_act(rs, rs.w0().s(i)) == *self)
    }

    /// Exact quotient by `g` under the degree-lex monomial order.
    pub fn exact_div(&self, g: &Self) -> Result<Self, LaurentError> {
        if g.is_zero() {
            return Err(LaurentError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let bbox = |p: &Self| {
            let mut lo = [i64::MAX; 2];
            let mut hi = [i64::MIN; 2];
            for l in p.terms.keys() {
                for i in 0..2 {
                    lo[i] = lo[i].min(l[i]);
                    hi[i] = hi[i].max(l[i]);
                }
            }
            (lo, hi)
        };
        let (flo, fhi) = bbox(self);
        let (glo, ghi) = bbox(g);
        let lo = [flo[0] - glo[0], flo[1] - glo[1]];
        let hi = [fhi[0] - ghi[0], fhi[1] - ghi[1]];
        let lead = |p: &Self| p.terms.iter().max_by_key(|(l, _)| deglex(l)).map(|(l, c)| (*l, c.clone())).unwrap();
        let (gl, gc) = lead(g);
        let ginv = gc.inv()?;
        let mut r = self.clone();
        let mut q = Self::zero();
        while !r.is_zero() {
            let (rl, rc) = lead(&r);
            let m = [rl[0] - gl[0], rl[1] - gl[1]];
            if (0..2).any(|i| m[i] < lo[i] || m[i] > hi[i]) {
                return Err(LaurentError::NotDivisible);
            }
            let c = &rc * &ginv;
            for (l, v) in &g.terms {
                r.add_term(add(l, &m), -(v * &c));
            }
            q.add_term(m, c);
        }
        Ok(q)
    }

    /// Coefficients in common: `(d, num)` with `self = num / d` and `num` having polynomial coefficients.
    pub fn clear_denominators(&self) -> (crate::params::KPoly, BTreeMap<Lat, crate::params::KPoly>) {
        let (d, nums) = KScalar::common_denominator(self.terms.values());
        (d, self.terms.keys().copied().zip(nums).collect())
    }

    /// `m_{J,λ₀} = Σ_{μ ∈ W_Jλ₀} e(μ)`.
    pub fn orbit_sum(rs: &RootSystem, j: &[usize], lam0: &Lat) -> Result<Self, LaurentError> {
        if !rs.is_j_dominant(lam0, j) {
            return Err(LaurentError::NotJDominant(*lam0));
        }
        Ok(Self::from_terms(rs.orbit_j(lam0, j).into_iter().map(|m| (m, KScalar::one()))))
    }

    /// `Σ_w (-1)^{ℓ(w)} e(wρ)` for the reduced types.
    pub fn weyl_denominator(rs: &RootSystem) -> Result<Self, LaurentError> {
        Self::alternating(rs, &KScalar::from_int(-1))
    }

    /// `Σ_w (-τ²)^{ℓ(w)} e(wρ)`.
    pub fn f_poly(rs: &RootSystem, tau: &KScalar) -> Result<Self, LaurentError> {
        Self::alternating(rs, &-(tau * tau))
    }

    fn alternating(rs: &RootSystem, base: &KScalar) -> Result<Self, LaurentError> {
        if rs.ty == crate::rootdata::TypeName::C1 {
            return Err(LaurentError::UnsupportedType);
        }
        let rho: Lat = [1, if rs.rank == 2 { 1 } else { 0 }];
        let w0 = rs.w0();
        Ok(Self::from_terms((0..w0.order()).map(|w| (rs.act_l(w, &rho), base.pow(w0.len[w] as i64)))))
    }

    /// The unique maximal exponent of the support under the partial order on `L`.
    pub fn leading_term(&self, rs: &RootSystem) -> Result<(Lat, KScalar), LaurentError> {
        let supp = self.support();
        let maxes: Vec<Lat> =
            supp.iter().filter(|&&m| supp.iter().all(|&x| x == m || !rs.order_leq(&m, &x))).copied().collect();
        if maxes.len() != 1 || !supp.iter().all(|x| rs.order_leq(x, &maxes[0])) {
            return Err(LaurentError::NoUniqueMaximum);
        }
        Ok((maxes[0], self.coeff(&maxes[0])))
    }

    pub fn text(&self, rank: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&Lat> = self.terms.keys().collect();
        keys.sort_by_key(|l| std::cmp::Reverse(deglex(l)));
        keys.iter().map(|l| format!("({})*e[{}]", self.terms[*l], lat_str(rank, l))).collect::<Vec<_>>().join(" + ")
    }

    /// Parses the canonical text form; also accepts `e[..]` without coefficient and `-` separators.
    pub fn parse(rank: usize, s: &str) -> Result<Self, ParseError> {
        if !s.contains("e[") {
            let c = crate::params::text::parse_kscalar(s.trim())?;
            return Ok(Self::constant(c));
        }
        let mut cur = Cursor::new(s);
        let mut out = Self::zero();
        let mut neg = cur.eat(b'-');
        loop {
            let mut c = KScalar::one();
            if cur.peek() == Some(b'(') {
                cur.expect(b'(')?;
                c = cur.kscalar()?;
                cur.expect(b')')?;
                if !cur.eat(b'*') {
                    out.add_term([0, 0], if neg { -c } else { c });
                    match cur.peek() {
                        Some(b'+') => {
                            cur.pos += 1;
                            neg = false;
                            continue;
                        }
                        Some(b'-') => {
                            cur.pos += 1;
                            neg = true;
                            continue;
                        }
                        _ => break,
                    }
                }
            }
            cur.expect(b'e')?;
            cur.expect(b'[')?;
            let mut l = [0i64; 2];
            for (i, slot) in l.iter_mut().enumerate().take(rank) {
                if i > 0 {
                    cur.expect(b',')?;
                }
                *slot = num_traits::ToPrimitive::to_i64(&cur.int()?).unwrap_or(0);
            }
            cur.expect(b']')?;
            out.add_term(l, if neg { -c } else { c });
            match cur.peek() {
                Some(b'+') => {
                    cur.pos += 1;
                    neg = false;
                }
                Some(b'-') => {
                    cur.pos += 1;
                    neg = true;
                }
                _ => break,
            }
        }
        if !cur.done() {
            return cur.err("trailing input");
        }
        Ok(out)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (l, c) in &o.terms {
            r.add_term(*l, c.clone());
        }
        r
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (l, c) in &o.terms {
            r.add_term(*l, -c);
        }
        r
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(l, c)| (*l, -c)).collect() }
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero();
        for (l1, c1) in &self.terms {
            for (l2, c2) in &o.terms {
                r.add_term(add(l1, l2), c1 * c2);
            }
        }
        r
    }
}

macro_rules! owned {
    ($tr:ident, $f:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, o: LaurentPoly) -> LaurentPoly {
                $tr::$f(&self, &o)
            }
        }
    };
}
owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// Deterministic random Laurent polynomials with small integer and label-monomial coefficients.
pub fn random_poly<R: rand::Rng>(rng: &mut R, rank: usize, nterms: usize, radius: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for _ in 0..nterms {
        let l = [rng.gen_range(-radius..=radius), if rank == 2 { rng.gen_range(-radius..=radius) } else { 0 }];
        let mut c = KScalar::from_int(rng.gen_range(-3..=3));
        if rng.gen_bool(0.3) {
            c = &c * &KScalar::qpow(Exp::label(0).times(rng.gen_range(-1..=1)));
        }
        p.add_term(l, c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::TypeName;
    use rand::SeedableRng;

    #[test]
    fn monomials_multiply() {
        let a = LaurentPoly::mono([1, 0]);
        let b = LaurentPoly::mono([-2, 1]);
        assert_eq!(&a * &b, LaurentPoly::mono([-1, 1]));
        assert_eq!(&a * &LaurentPoly::one(), a);
    }

    #[test]
    fn star_is_involutive_homomorphism() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = random_poly(&mut rng, 2, 3, 2);
            let g = random_poly(&mut rng, 2, 3, 2);
            assert_eq!(f.star().star(), f);
            assert_eq!((&f * &g).star(), &f.star() * &g.star());
        }
        let tau = KScalar::qpow(Exp::label(0).half());
        assert_eq!(LaurentPoly::term([1, 0], tau.clone()).star(), LaurentPoly::term([-1, 0], tau.inv().unwrap()));
    }

    #[test]
    fn exact_division() {
        let one = LaurentPoly::one();
        let x = LaurentPoly::mono([1, 0]);
        let f = &one - &(&x * &x);
        assert_eq!(f.exact_div(&(&one - &x)).unwrap(), &one + &x);
        assert_eq!((&one + &(&x * &x)).exact_div(&(&one - &x)), Err(LaurentError::NotDivisible));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let f = random_poly(&mut rng, 2, 3, 2);
            let g = random_poly(&mut rng, 2, 3, 2);
            if g.is_zero() {
                continue;
            }
            assert_eq!((&f * &g).exact_div(&g).unwrap(), f);
        }
    }

    #[test]
    fn geometric_quotient() {
        // A1 with ⟨μ, α∨⟩ = 2: μ = α = 2ω.
        let a1 = RootSystem::catalog(TypeName::A1);
        let mu = [2, 0];
        let s = a1.w0().s(1);
        let f = &LaurentPoly::mono(mu) - &LaurentPoly::mono(a1.act_l(s, &mu));
        let d = &LaurentPoly::one() - &LaurentPoly::mono([-2, 0]);
        let q = f.exact_div(&d).unwrap();
        assert_eq!(q, &LaurentPoly::mono(mu) * &(&LaurentPoly::one() + &LaurentPoly::mono([-2, 0])));
    }

    #[test]
    fn weyl_action_is_a_group_action() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for ty in [TypeName::A1, TypeName::A2, TypeName::C1] {
            let rs = RootSystem::catalog(ty);
            let aw = &rs.w;
            for _ in 0..10 {
                let f = random_poly(&mut rng, rs.rank, 3, 2);
                let word = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let u = rng.gen_range(0..aw.omega.len());
                    let w: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=rs.rank)).collect();
                    aw.from_word(u, &w)
                };
                use rand::Rng;
                let v = word(&mut rng);
                let w = word(&mut rng);
                assert_eq!(f.weyl_act(aw, &w).weyl_act(aw, &v), f.weyl_act(aw, &aw.mul(&v, &w)));
            }
        }
    }

    #[test]
    fn translation_gives_q_factor() {
        let a1 = RootSystem::catalog(TypeName::A1);
        let t = a1.w.translation([1, 0]);
        let f = LaurentPoly::mono([1, 0]).weyl_act(&a1.w, &t);
        assert_eq!(f, LaurentPoly::term([1, 0], KScalar::qpow(Exp::unit_frac(-1, 2))));
    }

    #[test]
    fn orbit_sums() {
        let a1 = RootSystem::catalog(TypeName::A1);
        assert_eq!(LaurentPoly::orbit_sum(&a1, &[1], &[0, 0]).unwrap(), LaurentPoly::one());
        assert_eq!(
            LaurentPoly::orbit_sum(&a1, &[1], &[1, 0]).unwrap(),
            &LaurentPoly::mono([1, 0]) + &LaurentPoly::mono([-1, 0])
        );
        let a2 = RootSystem::catalog(TypeName::A2);
        let m = LaurentPoly::orbit_sum(&a2, &[2], &[1, 0]).unwrap();
        assert_eq!(m, LaurentPoly::mono([1, 0]));
        assert!(m.is_invariant(&a2, &[2]));
        assert!(LaurentPoly::orbit_sum(&a2, &[2], &[1, -1]).is_err());
    }

    #[test]
    fn alternating_sums() {
        let a1 = RootSystem::catalog(TypeName::A1);
        let d = LaurentPoly::weyl_denominator(&a1).unwrap();
        assert_eq!(d, &LaurentPoly::mono([1, 0]) - &LaurentPoly::mono([-1, 0]));
        let a2 = RootSystem::catalog(TypeName::A2);
        assert_eq!(LaurentPoly::weyl_denominator(&a2).unwrap().len(), 6);
        assert_eq!(LaurentPoly::f_poly(&a2, &KScalar::one()).unwrap(), LaurentPoly::weyl_denominator(&a2).unwrap());
        assert!(LaurentPoly::weyl_denominator(&RootSystem::catalog(TypeName::C1)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = random_poly(&mut rng, 2, 4, 3);
            assert_eq!(LaurentPoly::parse(2, &f.text(2)).unwrap(), f);
        }
        assert_eq!(LaurentPoly::parse(1, "e[1] - e[-1]").unwrap(), &LaurentPoly::mono([1, 0]) - &LaurentPoly::mono([-1, 0]));
        assert_eq!(LaurentPoly::parse(1, "0").unwrap(), LaurentPoly::zero());
    }

    #[test]
    fn leading_terms() {
        let a1 = RootSystem::catalog(TypeName::A1);
        let f = &LaurentPoly::mono([-1, 0]) + &LaurentPoly::mono([1, 0]);
        assert_eq!(f.leading_term(&a1).unwrap().0, [-1, 0]);
    }
}
