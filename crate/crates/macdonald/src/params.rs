//! The coefficient field: rational functions in a q-unit and the formal labels.
//!
//! Exponents live in the rational span of the unit and the label symbols. They
//! are stored as integers scaled by [`SCALE`], so `q(1/2)` has unit
//! coordinate `SCALE / 2`. Denominators of a [`KScalar`] are kept as a
//! product of normalized factors; numerators are cancelled against them by
//! trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Common denominator of all stored exponents.
pub const SCALE: i64 = 720_720;
/// Number of label slots (the catalog needs at most four orbits).
pub const NLABELS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("denominator overflow: exponent {0} has denominator beyond the cap {1}")]
    DenominatorOverflow(String, i64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Exponent vector: index 0 is the unit, `1..=NLABELS` the label symbols.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Exp(pub [i64; 1 + NLABELS]);

impl Exp {
    pub const ZERO: Exp = Exp([0; 1 + NLABELS]);

    /// `q(n/d)`.
    pub fn unit_frac(n: i64, d: i64) -> Exp {
        assert!(SCALE % d == 0, "unit denominator {d} not representable");
        let mut e = Exp::ZERO;
        e.0[0] = n * (SCALE / d);
        e
    }

    /// The label symbol `k(o)` with coefficient one.
    pub fn label(o: usize) -> Exp {
        let mut e = Exp::ZERO;
        e.0[1 + o] = SCALE;
        e
    }

    /// Builds an exponent from exact rationals, rejecting denominators not dividing `cap`.
    pub fn from_rationals(unit: Rational64, labels: &[Rational64], cap: i64) -> Result<Exp, ParamError> {
        let mut e = Exp::ZERO;
        let mut put = |slot: usize, r: Rational64| -> Result<(), ParamError> {
            if cap % r.denom() != 0 || SCALE % r.denom() != 0 {
                return Err(ParamError::DenominatorOverflow(r.to_string(), cap));
            }
            e.0[slot] = r.numer() * (SCALE / r.denom());
            Ok(())
        };
        put(0, unit)?;
        for (o, r) in labels.iter().enumerate() {
            put(1 + o, *r)?;
        }
        Ok(e)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn unit(&self) -> i64 {
        self.0[0]
    }

    pub fn coord_rational(&self, slot: usize) -> Rational64 {
        Rational64::new(self.0[slot], SCALE)
    }

    pub fn is_label_only(&self) -> bool {
        self.0[0] == 0
    }

    /// Multiplies every coordinate by a rational; fails if the result leaves the scaled grid.
    pub fn scale(&self, r: Rational64) -> Result<Exp, ParamError> {
        let mut out = Exp::ZERO;
        for i in 0..self.0.len() {
            let v = Rational64::from_integer(self.0[i]) * r;
            if !v.is_integer() {
                return Err(ParamError::DenominatorOverflow(
                    (v / Rational64::from_integer(SCALE)).to_string(),
                    SCALE,
                ));
            }
            out.0[i] = v.to_integer();
        }
        Ok(out)
    }

    pub fn half(&self) -> Exp {
        self.scale(Rational64::new(1, 2)).expect("exponent not halvable")
    }

    pub fn times(&self, n: i64) -> Exp {
        let mut out = *self;
        for x in out.0.iter_mut() {
            *x *= n;
        }
        out
    }

    /// Largest denominator appearing among the coordinates.
    pub fn max_denominator(&self) -> i64 {
        self.0.iter().map(|&x| *Rational64::new(x, SCALE).denom()).max().unwrap_or(1)
    }

    fn cmin(&self, o: &Exp) -> Exp {
        let mut r = *self;
        for i in 0..r.0.len() {
            r.0[i] = r.0[i].min(o.0[i]);
        }
        r
    }

    fn cmax(&self, o: &Exp) -> Exp {
        let mut r = *self;
        for i in 0..r.0.len() {
            r.0[i] = r.0[i].max(o.0[i]);
        }
        r
    }

    fn within(&self, lo: &Exp, hi: &Exp) -> bool {
        (0..self.0.len()).all(|i| lo.0[i] <= self.0[i] && self.0[i] <= hi.0[i])
    }
}

impl Add for Exp {
    type Output = Exp;
    fn add(self, o: Exp) -> Exp {
        let mut r = self;
        for i in 0..r.0.len() {
            r.0[i] += o.0[i];
        }
        r
    }
}

impl Sub for Exp {
    type Output = Exp;
    fn sub(self, o: Exp) -> Exp {
        let mut r = self;
        for i in 0..r.0.len() {
            r.0[i] -= o.0[i];
        }
        r
    }
}

impl Neg for Exp {
    type Output = Exp;
    fn neg(self) -> Exp {
        let mut r = self;
        for x in r.0.iter_mut() {
            *x = -*x;
        }
        r
    }
}

fn fmt_frac(f: &mut fmt::Formatter<'_>, v: i64) -> fmt::Result {
    let r = Rational64::new(v, SCALE);
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Exp {
    /// Monomial part only; the empty monomial renders as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for slot in 0..self.0.len() {
            if self.0[slot] == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if slot == 0 {
                write!(f, "q^{{")?;
            } else {
                write!(f, "k{}^{{", slot)?;
            }
            fmt_frac(f, self.0[slot])?;
            write!(f, "}}")?;
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

fn is_int(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// Product skipping gcd work when both sides are integers.
fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    if is_int(a) && is_int(b) {
        BigRational::new_raw(a.numer() * b.numer(), BigInt::one())
    } else {
        a * b
    }
}

fn radd_assign(a: &mut BigRational, b: &BigRational) {
    if is_int(a) && is_int(b) {
        *a = BigRational::new_raw(a.numer() + b.numer(), BigInt::one());
    } else {
        *a += b;
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Finitely supported map from exponents to rationals: the group algebra of the exponent group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct KPoly {
    terms: BTreeMap<Exp, BigRational>,
}

impl KPoly {
    pub fn zero() -> KPoly {
        KPoly::default()
    }

    pub fn one() -> KPoly {
        KPoly::monomial(Exp::ZERO, BigRational::one())
    }

    pub fn constant(c: BigRational) -> KPoly {
        KPoly::monomial(Exp::ZERO, c)
    }

    pub fn from_int(n: i64) -> KPoly {
        KPoly::constant(BigRational::from_integer(n.into()))
    }

    pub fn monomial(e: Exp, c: BigRational) -> KPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        KPoly { terms }
    }

    pub fn mono(e: Exp) -> KPoly {
        KPoly::monomial(e, BigRational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, BigRational)>>(it: I) -> KPoly {
        let mut p = KPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Exp, BigRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Exp::ZERO).is_some_and(|c| c.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add_term(&mut self, e: Exp, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                radd_assign(o.get_mut(), &c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_term_ref(&mut self, e: Exp, c: &BigRational) {
        match self.terms.get_mut(&e) {
            Some(v) => {
                radd_assign(v, c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(e, c.clone());
                }
            }
        }
    }

    pub fn coeff(&self, e: &Exp) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<(&Exp, &BigRational)> {
        self.terms.last_key_value()
    }

    pub fn scale(&self, c: &BigRational) -> KPoly {
        if c.is_zero() {
            return KPoly::zero();
        }
        KPoly { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn shift(&self, s: &Exp) -> KPoly {
        KPoly { terms: self.terms.iter().map(|(e, v)| (*e + *s, v.clone())).collect() }
    }

    /// `self += c * x^s * g`.
    pub fn add_scaled_shift(&mut self, g: &KPoly, c: &BigRational, s: &Exp) {
        for (e, v) in &g.terms {
            self.add_term(*e + *s, rmul(v, c));
        }
    }

    pub fn min_exps(&self) -> Exp {
        let mut it = self.terms.keys();
        let first = *it.next().expect("min_exps of zero");
        it.fold(first, |a, e| a.cmin(e))
    }

    pub fn max_exps(&self) -> Exp {
        let mut it = self.terms.keys();
        let first = *it.next().expect("max_exps of zero");
        it.fold(first, |a, e| a.cmax(e))
    }

    /// Smallest unit exponent (q-adic valuation); `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.unit()).min()
    }

    /// Splits by unit exponent into label-only pieces.
    pub fn by_unit(&self) -> BTreeMap<i64, KPoly> {
        let mut out: BTreeMap<i64, KPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut l = *e;
            l.0[0] = 0;
            out.entry(e.unit()).or_default().terms.insert(l, c.clone());
        }
        out
    }

    /// Drops every term whose unit exponent is at least `cap`.
    /// Product with every term of unit exponent `>= cap` dropped.
    pub fn mul_trunc(&self, o: &KPoly, cap: i64) -> KPoly {
        let mut acc: HashMap<Exp, BigRational> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                // Terms are ordered by unit exponent first.
                if e1.unit() + e2.unit() >= cap {
                    break;
                }
                let c = rmul(c1, c2);
                match acc.entry(*e1 + *e2) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut v) => radd_assign(v.get_mut(), &c),
                }
            }
        }
        KPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn truncate_unit(&self, cap: i64) -> KPoly {
        KPoly { terms: self.terms.iter().filter(|(e, _)| e.unit() < cap).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn is_label_only(&self) -> bool {
        self.terms.keys().all(|e| e.is_label_only())
    }

    pub fn star(&self) -> KPoly {
        KPoly { terms: self.terms.iter().map(|(e, c)| (-*e, c.clone())).collect() }
    }

    pub fn map_exps<F: Fn(&Exp) -> Result<Exp, ParamError>>(&self, f: F) -> Result<KPoly, ParamError> {
        let mut out = KPoly::zero();
        for (e, c) in &self.terms {
            out.add_term(f(e)?, c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> KPoly {
        let mut r = KPoly::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide.
    pub fn exact_div(&self, g: &KPoly) -> Option<KPoly> {
        assert!(!g.is_zero(), "exact division by zero polynomial");
        if self.is_zero() {
            return Some(KPoly::zero());
        }
        if g.is_monomial() {
            let (ge, gc) = g.leading().unwrap();
            return Some(self.shift(&(-*ge)).scale(&gc.recip()));
        }
        // Newton polytopes add, so every quotient exponent sits in this box.
        let lo = self.min_exps() - g.min_exps();
        let hi = self.max_exps() - g.max_exps();
        if !(0..lo.0.len()).all(|i| lo.0[i] <= hi.0[i]) {
            return None;
        }
        let (gl, gc) = g.leading().map(|(e, c)| (*e, c.clone())).unwrap();
        let ginv = gc.recip();
        let mut r = self.clone();
        let mut q = KPoly::zero();
        while let Some((re, rc)) = r.leading().map(|(e, c)| (*e, c.clone())) {
            let m = re - gl;
            if !m.within(&lo, &hi) {
                return None;
            }
            let c = rc * &ginv;
            r.add_scaled_shift(g, &(-c.clone()), &m);
            q.terms.insert(m, c);
        }
        Some(q)
    }

    /// Writes `self = c * x^s * p` with `p` free of monomial content and monic at its leading term.
    pub fn normalize(&self) -> (BigRational, Exp, KPoly) {
        let s = self.min_exps();
        let p = self.shift(&(-s));
        let c = p.leading().unwrap().1.clone();
        let p = p.scale(&c.recip());
        (c, s, p)
    }
}

impl Add<&KPoly> for &KPoly {
    type Output = KPoly;
    fn add(self, o: &KPoly) -> KPoly {
        let (big, small) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (e, c) in &small.terms {
            r.add_term_ref(*e, c);
        }
        r
    }
}

impl Sub<&KPoly> for &KPoly {
    type Output = KPoly;
    fn sub(self, o: &KPoly) -> KPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c.clone());
        }
        r
    }
}

impl Mul<&KPoly> for &KPoly {
    type Output = KPoly;
    fn mul(self, o: &KPoly) -> KPoly {
        let mut acc: HashMap<Exp, BigRational> = HashMap::with_capacity(self.terms.len() * o.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let c = rmul(c1, c2);
                match acc.entry(*e1 + *e2) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut v) => radd_assign(v.get_mut(), &c),
                }
            }
        }
        KPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        KPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, e: &Exp, c: &BigRational) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if e.is_zero() {
        write!(f, "{}", a)
    } else if a.is_one() {
        write!(f, "{}", e)
    } else {
        write!(f, "{}*{}", a, e)
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending exponent order reads more naturally.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            fmt_coeff_term(f, i == 0, e, c)?;
        }
        Ok(())
    }
}

type Den = BTreeMap<KPoly, u32>;

/// Element of the coefficient field: a polynomial over a product of normalized factors.
#[derive(Clone, Debug, Default)]
pub struct KScalar {
    num: KPoly,
    den: Den,
}

fn cancel(num: &mut KPoly, den: &mut Den) {
    if num.is_zero() {
        den.clear();
        return;
    }
    for (f, m) in den.iter_mut() {
        while *m > 0 {
            match num.exact_div(f) {
                Some(q) => {
                    *num = q;
                    *m -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|_, m| *m > 0);
}

/// Adds a normalized non-unit factor, splitting against factors already present when one divides the other.
fn insert_factor(den: &mut Den, p: KPoly, m: u32) {
    let mut stack = vec![(p, m)];
    while let Some((p, m)) = stack.pop() {
        if p.is_one() || m == 0 {
            continue;
        }
        if let Some(e) = den.get_mut(&p) {
            *e += m;
            continue;
        }
        let keys: Vec<KPoly> = den.keys().cloned().collect();
        let mut handled = false;
        for f in keys {
            if p.len() >= f.len() {
                if let Some(q) = p.exact_div(&f) {
                    *den.get_mut(&f).unwrap() += m;
                    stack.push((q, m));
                    handled = true;
                    break;
                }
            }
            if f.len() >= p.len() {
                if let Some(q) = f.exact_div(&p) {
                    let mf = den.remove(&f).unwrap();
                    stack.push((p.clone(), m + mf));
                    stack.push((q, mf));
                    handled = true;
                    break;
                }
            }
        }
        if !handled {
            den.insert(p, m);
        }
    }
}

fn den_product(den: &Den) -> KPoly {
    let mut r = KPoly::one();
    for (f, m) in den {
        for _ in 0..*m {
            r = &r * f;
        }
    }
    r
}

impl KScalar {
    pub fn zero() -> KScalar {
        KScalar::default()
    }

    pub fn one() -> KScalar {
        KScalar::from_poly(KPoly::one())
    }

    pub fn from_int(n: i64) -> KScalar {
        KScalar::from_poly(KPoly::from_int(n))
    }

    pub fn from_rational(r: BigRational) -> KScalar {
        KScalar::from_poly(KPoly::constant(r))
    }

    pub fn from_poly(p: KPoly) -> KScalar {
        KScalar { num: p, den: Den::new() }
    }

    /// The monomial `q(x)`.
    pub fn qpow(x: Exp) -> KScalar {
        KScalar::from_poly(KPoly::mono(x))
    }

    /// `q(x)` from exact rationals with the per-type denominator cap.
    pub fn qpow_checked(unit: Rational64, labels: &[Rational64], cap: i64) -> Result<KScalar, ParamError> {
        Ok(KScalar::qpow(Exp::from_rationals(unit, labels, cap)?))
    }

    pub fn fraction(num: KPoly, den: &KPoly) -> Result<KScalar, ParamError> {
        if den.is_zero() {
            return Err(ParamError::DivisionByZero);
        }
        Ok(&KScalar::from_poly(num) * &KScalar::from_poly(den.clone()).inv()?)
    }

    pub fn num(&self) -> &KPoly {
        &self.num
    }

    pub fn den_factors(&self) -> impl Iterator<Item = (&KPoly, u32)> {
        self.den.iter().map(|(f, m)| (f, *m))
    }

    pub fn den_poly(&self) -> KPoly {
        den_product(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_label_only(&self) -> bool {
        self.num.is_label_only() && self.den.keys().all(|f| f.is_label_only())
    }

    /// q-adic valuation in scaled units; normalized factors have valuation zero.
    pub fn valuation(&self) -> Option<i64> {
        self.num.valuation()
    }

    pub fn inv(&self) -> Result<KScalar, ParamError> {
        if self.is_zero() {
            return Err(ParamError::DivisionByZero);
        }
        let (c, s, p) = self.num.normalize();
        let mut den = Den::new();
        insert_factor(&mut den, p, 1);
        let num = den_product(&self.den).shift(&(-s)).scale(&c.recip());
        let mut r = KScalar { num, den };
        cancel(&mut r.num, &mut r.den);
        Ok(r)
    }

    pub fn try_div(&self, o: &KScalar) -> Result<KScalar, ParamError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, n: i64) -> KScalar {
        let base = if n < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut r = KScalar::one();
        for _ in 0..n.unsigned_abs() {
            r = &r * &base;
        }
        r
    }

    pub fn scale_rational(&self, c: &BigRational) -> KScalar {
        if c.is_zero() {
            return KScalar::zero();
        }
        KScalar { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &KPoly) -> KScalar {
        self * &KScalar::from_poly(p.clone())
    }

    /// The ring involution sending `q(x)` to `q(-x)`.
    pub fn star(&self) -> KScalar {
        self.map_exps(|e| Ok(-*e)).expect("star cannot fail")
    }

    /// Applies an exponent map to numerator and every factor, rebuilding the fraction.
    pub fn map_exps<F: Fn(&Exp) -> Result<Exp, ParamError>>(&self, f: F) -> Result<KScalar, ParamError> {
        let mut r = KScalar::from_poly(self.num.map_exps(&f)?);
        for (p, m) in &self.den {
            let q = KScalar::from_poly(p.map_exps(&f)?);
            if q.is_zero() {
                return Err(ParamError::DivisionByZero);
            }
            let qi = q.inv()?;
            for _ in 0..*m {
                r = &r * &qi;
            }
        }
        Ok(r)
    }

    /// Replaces each label `k(o)` by `assign[o]` times the unit.
    pub fn specialize(&self, assign: &BTreeMap<usize, Rational64>) -> Result<KScalar, ParamError> {
        self.map_exps(|e| specialize_exp(e, assign))
    }

    /// The lowest q-power of the numerator together with its label-only coefficient.
    pub fn is_monomial(&self) -> bool {
        self.den.is_empty() && self.num.is_monomial()
    }

    /// Common denominator of a family, as a factor map, and the numerators over it.
    pub fn common_denominator<'a, I: IntoIterator<Item = &'a KScalar>>(items: I) -> (KPoly, Vec<KPoly>) {
        let items: Vec<&KScalar> = items.into_iter().collect();
        let mut lcm = Den::new();
        for s in &items {
            for (f, m) in &s.den {
                let e = lcm.entry(f.clone()).or_insert(0);
                *e = (*e).max(*m);
            }
        }
        let nums = items
            .iter()
            .map(|s| {
                let mut rest = lcm.clone();
                for (f, m) in &s.den {
                    *rest.get_mut(f).unwrap() -= m;
                }
                &s.num * &den_product(&rest)
            })
            .collect();
        (den_product(&lcm), nums)
    }
}

pub fn specialize_exp(e: &Exp, assign: &BTreeMap<usize, Rational64>) -> Result<Exp, ParamError> {
    let mut out = *e;
    for (o, a) in assign {
        let v = Rational64::from_integer(e.0[1 + o]) * a;
        if !v.is_integer() {
            return Err(ParamError::DenominatorOverflow(v.to_string(), SCALE));
        }
        out.0[0] += v.to_integer();
        out.0[1 + o] = 0;
    }
    Ok(out)
}

impl PartialEq for KScalar {
    fn eq(&self, o: &KScalar) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        (self - o).is_zero()
    }
}

impl Add<&KScalar> for &KScalar {
    type Output = KScalar;
    fn add(self, o: &KScalar) -> KScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let mut r = KScalar { num: &self.num + &o.num, den: self.den.clone() };
            if !r.den.is_empty() {
                cancel(&mut r.num, &mut r.den);
            }
            return r;
        }
        let mut lcm = self.den.clone();
        for (f, m) in &o.den {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let rest = |d: &Den| {
            let mut r = lcm.clone();
            for (f, m) in d {
                *r.get_mut(f).unwrap() -= m;
            }
            den_product(&r)
        };
        let num = &(&self.num * &rest(&self.den)) + &(&o.num * &rest(&o.den));
        let mut r = KScalar { num, den: lcm };
        r.den.retain(|_, m| *m > 0);
        cancel(&mut r.num, &mut r.den);
        r
    }
}

impl Sub<&KScalar> for &KScalar {
    type Output = KScalar;
    fn sub(self, o: &KScalar) -> KScalar {
        self + &(-o)
    }
}

impl Neg for &KScalar {
    type Output = KScalar;
    fn neg(self) -> KScalar {
        KScalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul<&KScalar> for &KScalar {
    type Output = KScalar;
    fn mul(self, o: &KScalar) -> KScalar {
        if self.is_zero() || o.is_zero() {
            return KScalar::zero();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return KScalar::from_poly(&self.num * &o.num);
        }
        // Normalized factors are never monomials, so a monomial cannot cancel.
        if o.is_monomial() {
            return KScalar { num: &self.num * &o.num, den: self.den.clone() };
        }
        if self.is_monomial() {
            return KScalar { num: &self.num * &o.num, den: o.den.clone() };
        }
        let mut n1 = self.num.clone();
        let mut n2 = o.num.clone();
        let mut d1 = self.den.clone();
        let mut d2 = o.den.clone();
        cancel(&mut n1, &mut d2);
        cancel(&mut n2, &mut d1);
        let mut den = d1;
        for (f, m) in d2 {
            insert_factor(&mut den, f, m);
        }
        KScalar { num: &n1 * &n2, den }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add<$t> for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub<$t> for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul<$t> for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(KPoly);
owned_ops!(KScalar);

impl fmt::Display for KScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (p, m)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "({})", p)?;
            if *m > 1 {
                write!(f, "^{}", m)?;
            }
        }
        write!(f, ")")
    }
}

/// Parser for the canonical text forms of [`KPoly`] and [`KScalar`].
pub mod text {
    use super::*;

    #[derive(Debug, Error, PartialEq, Eq)]
    #[error("parse error at byte {pos}: {msg}")]
    pub struct ParseError {
        pub pos: usize,
        pub msg: String,
    }

    pub struct Cursor<'a> {
        pub s: &'a [u8],
        pub pos: usize,
    }

    impl<'a> Cursor<'a> {
        pub fn new(s: &'a str) -> Self {
            Cursor { s: s.as_bytes(), pos: 0 }
        }

        pub fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
            Err(ParseError { pos: self.pos, msg: msg.to_string() })
        }

        pub fn ws(&mut self) {
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        pub fn peek(&mut self) -> Option<u8> {
            self.ws();
            self.s.get(self.pos).copied()
        }

        pub fn eat(&mut self, c: u8) -> bool {
            if self.peek() == Some(c) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        pub fn expect(&mut self, c: u8) -> Result<(), ParseError> {
            if self.eat(c) {
                Ok(())
            } else {
                self.err(&format!("expected '{}'", c as char))
            }
        }

        pub fn done(&mut self) -> bool {
            self.peek().is_none()
        }

        pub fn int(&mut self) -> Result<BigInt, ParseError> {
            self.ws();
            let start = self.pos;
            if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
                self.pos += 1;
            }
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
            txt.parse::<BigInt>().or_else(|_| {
                self.pos = start;
                self.err("expected integer")
            })
        }

        pub fn rational(&mut self) -> Result<BigRational, ParseError> {
            let n = self.int()?;
            if self.peek() == Some(b'/') && self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
                let d = self.int()?;
                if d.is_zero() {
                    return self.err("zero denominator");
                }
                return Ok(BigRational::new(n, d));
            }
            Ok(BigRational::from_integer(n))
        }

        fn exponent(&mut self) -> Result<i64, ParseError> {
            self.expect(b'^')?;
            self.expect(b'{')?;
            let r = self.rational()?;
            self.expect(b'}')?;
            let v = r * BigRational::from_integer(SCALE.into());
            if !v.is_integer() {
                return self.err("exponent denominator too large");
            }
            v.to_integer().to_i64().map_or_else(|| self.err("exponent overflow"), Ok)
        }

        /// A product of a rational and symbols `q^{..}`, `k<i>^{..}`.
        fn term(&mut self) -> Result<(Exp, BigRational), ParseError> {
            let mut c = BigRational::one();
            let mut e = Exp::ZERO;
            loop {
                match self.peek() {
                    Some(b'q') => {
                        self.pos += 1;
                        e.0[0] += self.exponent()?;
                    }
                    Some(b'k') => {
                        self.pos += 1;
                        let i = self.int()?.to_usize().unwrap_or(0);
                        if i == 0 || i > NLABELS {
                            return self.err("label index out of range");
                        }
                        e.0[i] += self.exponent()?;
                    }
                    Some(ch) if ch.is_ascii_digit() => {
                        c *= self.rational()?;
                    }
                    _ => return self.err("expected term"),
                }
                let before = self.pos;
                if !self.eat(b'*') {
                    break;
                }
                // `*` followed by `(` or `e[` belongs to an enclosing product.
                if self.peek() == Some(b'(') || self.peek() == Some(b'e') {
                    self.pos = before;
                    break;
                }
            }
            Ok((e, c))
        }

        pub fn kpoly(&mut self) -> Result<KPoly, ParseError> {
            let mut p = KPoly::zero();
            let mut neg = self.eat(b'-');
            loop {
                let (e, c) = self.term()?;
                p.add_term(e, if neg { -c } else { c });
                match self.peek() {
                    Some(b'+') => {
                        self.pos += 1;
                        neg = false;
                    }
                    Some(b'-') => {
                        self.pos += 1;
                        neg = true;
                    }
                    _ => break,
                }
            }
            Ok(p)
        }

        pub fn kscalar(&mut self) -> Result<KScalar, ParseError> {
            if self.peek() != Some(b'(') {
                return Ok(KScalar::from_poly(self.kpoly()?));
            }
            self.expect(b'(')?;
            let num = self.kpoly()?;
            self.expect(b')')?;
            if !self.eat(b'/') {
                return Ok(KScalar::from_poly(num));
            }
            self.expect(b'(')?;
            let mut den = KPoly::one();
            loop {
                self.expect(b'(')?;
                let f = self.kpoly()?;
                self.expect(b')')?;
                let mut m = 1u32;
                if self.eat(b'^') {
                    m = self.int()?.to_u32().unwrap_or(1);
                }
                den = &den * &f.pow(m);
                if !self.eat(b'*') {
                    break;
                }
            }
            self.expect(b')')?;
            KScalar::fraction(num, &den).or_else(|_| self.err("zero denominator"))
        }
    }

    pub fn parse_kscalar(s: &str) -> Result<KScalar, ParseError> {
        let mut c = Cursor::new(s);
        let r = c.kscalar()?;
        if !c.done() {
            return c.err("trailing input");
        }
        Ok(r)
    }

    pub fn parse_kpoly(s: &str) -> Result<KPoly, ParseError> {
        let mut c = Cursor::new(s);
        let r = c.kpoly()?;
        if !c.done() {
            return c.err("trailing input");
        }
        Ok(r)
    }
}

/// Numerator gcd helper used when reporting integer content.
pub fn integer_content(p: &KPoly) -> BigInt {
    p.terms().values().fold(BigInt::zero(), |g, c| g.gcd(c.numer()))
}
