//! Root data catalog and extended affine Weyl group combinatorics.
//!
//! Lattice vectors are `[i64; 2]` in fundamental-weight coordinates (the
//! single `b`-coordinate for the non-reduced rank one type); rank one types
//! leave the second slot at zero.

use crate::params::{Exp, KScalar, NLABELS, SCALE};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub type Lat = [i64; 2];
pub type Mat = [[i64; 2]; 2];
pub type RMat = [[Rational64; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("index {0} is not a finite simple index")]
    BadIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeName {
    A1,
    A2,
    #[serde(rename = "C1v-C1")]
    C1,
}

impl FromStr for TypeName {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, RootError> {
        match s {
            "A1" => Ok(TypeName::A1),
            "A2" => Ok(TypeName::A2),
            "C1v-C1" | "C1" | "C1vC1" => Ok(TypeName::C1),
            _ => Err(RootError::UnknownType(s.to_string())),
        }
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeName::A1 => "A1",
            TypeName::A2 => "A2",
            TypeName::C1 => "C1v-C1",
        })
    }
}

pub fn mat_vec(m: &Mat, v: &Lat) -> Lat {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn add(a: &Lat, b: &Lat) -> Lat {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: &Lat, b: &Lat) -> Lat {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn neg(a: &Lat) -> Lat {
    [-a[0], -a[1]]
}

pub fn scale(a: &Lat, k: i64) -> Lat {
    [a[0] * k, a[1] * k]
}

/// The finite Weyl group as an explicit table, acting on both lattices.
#[derive(Clone, Debug)]
pub struct W0Table {
    pub rank: usize,
    /// Matrices on `L` and on `L'`.
    pub on_l: Vec<Mat>,
    pub on_lp: Vec<Mat>,
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    /// `simple[i-1]` is the table index of `s_i`.
    pub simple: Vec<usize>,
    pub len: Vec<usize>,
    /// Reduced word (finite simple indices, leftmost first).
    pub word: Vec<Vec<usize>>,
}

impl W0Table {
    fn build(rank: usize, gens_l: &[Mat], gens_lp: &[Mat], simple_roots: &[Lat], pos_roots: &[Lat]) -> W0Table {
        let id: Mat = [[1, 0], [0, 1]];
        let mut on_l = vec![id];
        let mut on_lp = vec![id];
        let mut index: HashMap<Mat, usize> = HashMap::new();
        index.insert(id, 0);
        let mut k = 0;
        while k < on_l.len() {
            for g in 0..gens_l.len() {
                let m = mat_mul(&on_l[k], &gens_l[g]);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(m) {
                    e.insert(on_l.len());
                    on_l.push(m);
                    on_lp.push(mat_mul(&on_lp[k], &gens_lp[g]));
                }
            }
            k += 1;
        }
        let n = on_l.len();
        let mul: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).map(|b| index[&mat_mul(&on_l[a], &on_l[b])]).collect()).collect();
        let inv: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).unwrap()).collect();
        let simple: Vec<usize> = gens_l.iter().map(|m| index[m]).collect();
        let pos: HashSet<Lat> = pos_roots.iter().copied().collect();
        let len: Vec<usize> = (0..n)
            .map(|w| pos_roots.iter().filter(|r| !pos.contains(&mat_vec(&on_l[w], r))).count())
            .collect();
        let mut word = vec![Vec::new(); n];
        for (w, slot) in word.iter_mut().enumerate() {
            let mut cur = w;
            let mut rev = Vec::new();
            while len[cur] > 0 {
                let i = (0..rank)
                    .find(|&i| !pos.contains(&mat_vec(&on_l[cur], &simple_roots[i])))
                    .expect("nontrivial element has a right descent");
                rev.push(i + 1);
                cur = mul[cur][simple[i]];
            }
            rev.reverse();
            *slot = rev;
        }
        W0Table { rank, on_l, on_lp, mul, inv, simple, len, word }
    }

    pub fn order(&self) -> usize {
        self.on_l.len()
    }

    pub fn s(&self, i: usize) -> usize {
        self.simple[i - 1]
    }

    /// Elements of the parabolic subgroup generated by `J`.
    pub fn subgroup(&self, j: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(0usize);
        let mut stack = vec![0usize];
        while let Some(w) = stack.pop() {
            for &i in j {
                let x = self.mul[w][self.s(i)];
                if seen.insert(x) {
                    stack.push(x);
                }
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort_by_key(|&w| (self.len[w], self.word[w].clone()));
        v
    }

    pub fn longest(&self, j: &[usize]) -> usize {
        *self.subgroup(j).iter().max_by_key(|&&w| self.len[w]).unwrap()
    }

    /// Shortest representatives of `W₀/W_J`, ordered by length then word.
    pub fn min_coset_reps(&self, j: &[usize]) -> Vec<usize> {
        let wj = self.subgroup(j);
        let mut reps: Vec<usize> = (0..self.order())
            .filter(|&w| wj.iter().all(|&x| self.len[self.mul[w][x]] >= self.len[w]))
            .collect();
        reps.sort_by_key(|&w| (self.len[w], self.word[w].clone()));
        reps
    }

    /// `w = v·w'` with `v` shortest in `vW_J` and `w' ∈ W_J`.
    pub fn coset_decompose(&self, w: usize, j: &[usize]) -> (usize, usize) {
        let wj = self.subgroup(j);
        let best = *wj.iter().min_by_key(|&&x| self.len[self.mul[w][self.inv[x]]]).unwrap();
        (self.mul[w][self.inv[best]], best)
    }
}

/// An element `x ↦ w·x + t` of an extended affine Weyl group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub w: usize,
    pub t: Lat,
}

/// An affine root: the affine function `x ↦ ⟨grad, x⟩ + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffRoot {
    pub grad: Lat,
    pub c: Rational64,
}

impl AffRoot {
    pub fn new(grad: Lat, c: Rational64) -> AffRoot {
        AffRoot { grad, c }
    }

    pub fn neg(&self) -> AffRoot {
        AffRoot { grad: neg(&self.grad), c: -self.c }
    }

    pub fn double(&self) -> AffRoot {
        AffRoot { grad: scale(&self.grad, 2), c: self.c * 2 }
    }
}

/// Which of the two affine Weyl groups: `W` acts on `L`-gradients with `L'`-translations, `W'` the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

/// One extended affine Weyl group with its affine root system (indivisible roots).
#[derive(Clone, Debug)]
pub struct AffineWeyl {
    pub side: Side,
    pub rank: usize,
    /// Gradients of indivisible finite roots together with their sign.
    pub roots: Vec<(Lat, bool)>,
    /// Constants of indivisible roots run over `step·ℤ`.
    pub step: Rational64,
    /// `⟨gradient, translation⟩`.
    pub pairing: RMat,
    /// Simple affine roots, index 0 the non-linear one.
    pub simple: Vec<AffRoot>,
    pub simple_elem: Vec<Elem>,
    /// Length zero elements with their permutation of the simple indices.
    pub omega: Vec<(Elem, Vec<usize>)>,
    w0: W0Table,
}

impl AffineWeyl {
    pub fn w0(&self) -> &W0Table {
        &self.w0
    }

    pub fn grad_mat(&self, w: usize) -> &Mat {
        match self.side {
            Side::X => &self.w0.on_l[w],
            Side::Y => &self.w0.on_lp[w],
        }
    }

    pub fn trans_mat(&self, w: usize) -> &Mat {
        match self.side {
            Side::X => &self.w0.on_lp[w],
            Side::Y => &self.w0.on_l[w],
        }
    }

    pub fn pair(&self, grad: &Lat, trans: &Lat) -> Rational64 {
        let mut s = Rational64::zero();
        for i in 0..2 {
            for j in 0..2 {
                s += self.pairing[i][j] * grad[i] * trans[j];
            }
        }
        s
    }

    pub fn identity(&self) -> Elem {
        Elem { w: 0, t: [0, 0] }
    }

    pub fn translation(&self, t: Lat) -> Elem {
        Elem { w: 0, t }
    }

    pub fn finite(&self, w: usize) -> Elem {
        Elem { w, t: [0, 0] }
    }

    pub fn s(&self, i: usize) -> Elem {
        self.simple_elem[i]
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        Elem { w: self.w0.mul[a.w][b.w], t: add(&a.t, &mat_vec(self.trans_mat(a.w), &b.t)) }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        let wi = self.w0.inv[a.w];
        Elem { w: wi, t: neg(&mat_vec(self.trans_mat(wi), &a.t)) }
    }

    pub fn act_grad(&self, w: usize, g: &Lat) -> Lat {
        mat_vec(self.grad_mat(w), g)
    }

    /// Action on points of the translation lattice.
    pub fn act_point(&self, a: &Elem, x: &Lat) -> Lat {
        add(&mat_vec(self.trans_mat(a.w), x), &a.t)
    }

    /// `(g·f)(x) = f(g⁻¹x)`.
    pub fn act_root(&self, a: &Elem, r: &AffRoot) -> AffRoot {
        let g = self.act_grad(a.w, &r.grad);
        AffRoot { grad: g, c: r.c - self.pair(&g, &a.t) }
    }

    pub fn grad_sign(&self, g: &Lat) -> Option<bool> {
        let h = if g[0] % 2 == 0 && g[1] % 2 == 0 && !self.roots.iter().any(|(r, _)| r == g) {
            [g[0] / 2, g[1] / 2]
        } else {
            *g
        };
        self.roots.iter().find(|(r, _)| *r == h).map(|(_, p)| *p)
    }

    pub fn is_positive(&self, r: &AffRoot) -> Result<bool, RootError> {
        if r.c > Rational64::zero() {
            return Ok(true);
        }
        if r.c < Rational64::zero() {
            return Ok(false);
        }
        self.grad_sign(&r.grad).ok_or_else(|| RootError::NotARoot(format!("{:?}", r)))
    }

    fn pos(&self, r: &AffRoot) -> bool {
        self.is_positive(r).expect("image of a root is a root")
    }

    /// Number of positive indivisible roots sent to negative ones.
    pub fn length(&self, a: &Elem) -> usize {
        let mut n = 0i64;
        for (g, p) in &self.roots {
            let wg = self.act_grad(a.w, g);
            let d = self.pair(&wg, &a.t) / self.step;
            assert!(d.is_integer(), "pairing off the constant grid");
            let d = d.to_integer();
            let wpos = self.grad_sign(&wg).unwrap();
            let start = if *p { 0 } else { 1 };
            n += (d - start).max(0);
            if !wpos && d >= start {
                n += 1;
            }
        }
        n as usize
    }

    /// Brute-force inversion set `{a ∈ S⁺ indivisible : g·a ∈ S⁻}`.
    pub fn inversion_set_brute(&self, a: &Elem) -> BTreeSet<AffRoot> {
        let mut out = BTreeSet::new();
        let bound = self.length(a) as i64 + 2;
        for (g, _) in &self.roots {
            for m in 0..=bound * 2 {
                let r = AffRoot { grad: *g, c: self.step * m };
                if self.pos(&r) && !self.pos(&self.act_root(a, &r)) {
                    out.insert(r);
                }
            }
        }
        out
    }

    /// Inversion set read off a reduced word `u s_{i1}⋯s_{ip}`.
    pub fn inversion_set_word(&self, word: &[usize]) -> BTreeSet<AffRoot> {
        let mut out = BTreeSet::new();
        for r in 0..word.len() {
            let mut tail = self.identity();
            for &i in &word[r + 1..] {
                tail = self.mul(&tail, &self.s(i));
            }
            out.insert(self.act_root(&self.inv(&tail), &self.simple[word[r]]));
        }
        out
    }

    pub fn right_descent(&self, a: &Elem, i: usize) -> bool {
        !self.pos(&self.act_root(a, &self.simple[i]))
    }

    pub fn left_descent(&self, a: &Elem, i: usize) -> bool {
        !self.pos(&self.act_root(&self.inv(a), &self.simple[i]))
    }

    /// Canonical reduced expression `a = u·s_{i1}⋯s_{ip}`, peeling the smallest right descent.
    pub fn reduced_word(&self, a: &Elem) -> (usize, Vec<usize>) {
        let mut cur = *a;
        let mut rev = Vec::new();
        while let Some(i) = (0..=self.rank).find(|&i| self.right_descent(&cur, i)) {
            rev.push(i);
            cur = self.mul(&cur, &self.s(i));
        }
        rev.reverse();
        let u = self.omega.iter().position(|(e, _)| *e == cur).expect("length zero element in omega");
        (u, rev)
    }

    pub fn from_word(&self, u: usize, word: &[usize]) -> Elem {
        let mut e = self.omega[u].0;
        for &i in word {
            e = self.mul(&e, &self.s(i));
        }
        e
    }

    pub fn omega_part(&self, a: &Elem) -> usize {
        self.reduced_word(a).0
    }

    /// Extended Bruhat order.
    pub fn bruhat_leq(&self, x: &Elem, y: &Elem) -> bool {
        let (mut x, mut y) = (*x, *y);
        loop {
            if self.length(&x) > self.length(&y) {
                return false;
            }
            match (0..=self.rank).find(|&i| self.right_descent(&y, i)) {
                None => return x == y,
                Some(i) => {
                    if self.right_descent(&x, i) {
                        x = self.mul(&x, &self.s(i));
                    }
                    y = self.mul(&y, &self.s(i));
                }
            }
        }
    }

    /// All `x ≤ y` in the Bruhat order.
    pub fn interval(&self, y: &Elem) -> HashSet<Elem> {
        match (0..=self.rank).find(|&i| self.right_descent(y, i)) {
            None => [*y].into_iter().collect(),
            Some(i) => {
                let s = self.s(i);
                let below = self.interval(&self.mul(y, &s));
                let mut out = below.clone();
                for x in below {
                    out.insert(self.mul(&x, &s));
                }
                out
            }
        }
    }

    /// `a = v·w'` with `w' ∈ W_J`, `v` shortest in its coset and lengths adding.
    pub fn coset_decompose(&self, a: &Elem, j: &[usize]) -> (Elem, Elem) {
        let wj = self.w0.subgroup(j);
        let best = wj
            .iter()
            .map(|&x| self.finite(x))
            .min_by_key(|x| self.length(&self.mul(a, &self.inv(x))))
            .unwrap();
        (self.mul(a, &self.inv(&best)), best)
    }

    pub fn is_finite_coset_minimal(&self, a: &Elem) -> bool {
        (1..=self.rank).all(|i| !self.right_descent(a, i))
    }

    /// `t(λ) = u·v` with `u` shortest in `t(λ)W₀` and `v ∈ W₀`.
    pub fn uv_decompose(&self, lam: &Lat) -> (Elem, usize) {
        let t = self.translation(*lam);
        let w = (0..self.w0.order())
            .min_by_key(|&w| self.length(&self.mul(&t, &self.finite(w))))
            .unwrap();
        (self.mul(&t, &self.finite(w)), self.w0.inv[w])
    }
}

/// Which labels live on an orbit: the indivisible root and, if present, its double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPair {
    pub root: usize,
    pub double: Option<usize>,
}

/// A labelling: one exponent per orbit, so formal labels and specializations share a type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labelling(pub Vec<Exp>);

impl Labelling {
    pub fn formal(n: usize) -> Labelling {
        Labelling((0..n).map(Exp::label).collect())
    }

    pub fn get(&self, o: usize) -> Exp {
        self.0[o]
    }

    /// Negates the orbits flagged in `flip`.
    pub fn flipped(&self, flip: &[bool]) -> Labelling {
        Labelling(self.0.iter().zip(flip).map(|(e, f)| if *f { -*e } else { *e }).collect())
    }

    /// Adds integer multiples of the unit orbit-wise.
    pub fn shifted(&self, by: &[i64]) -> Labelling {
        Labelling(self.0.iter().zip(by).map(|(e, b)| *e + Exp::unit_frac(*b, 1)).collect())
    }
}

/// Catalog entry: duality data and both affine Weyl groups.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub ty: TypeName,
    pub rank: usize,
    /// `W`: acts on `S` and `L'`.
    pub w: AffineWeyl,
    /// `W'`: acts on `S'` and `L`.
    pub wp: AffineWeyl,
    /// `⟨L, L'⟩` in catalog coordinates.
    pub pairing: RMat,
    pub norbits: usize,
    /// `k'(o') = Σ_o dual[o'][o]·k(o)`.
    pub dual: Vec<Vec<Rational64>>,
    pub denom_cap: i64,
    /// Positive finite roots of `R` in `L` with the `S'`-orbit of their coroot.
    pub rho_terms: Vec<(Lat, usize)>,
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn refl_a(alpha: &Lat, i: usize) -> Mat {
    // μ ↦ μ − μ_i α
    let mut m = [[1, 0], [0, 1]];
    for row in 0..2 {
        m[row][i] -= alpha[row];
    }
    m
}

impl RootSystem {
    pub fn catalog(ty: TypeName) -> RootSystem {
        match ty {
            TypeName::A1 => Self::type_a(1),
            TypeName::A2 => Self::type_a(2),
            TypeName::C1 => Self::type_c1(),
        }
    }

    pub fn by_name(name: &str) -> Result<RootSystem, RootError> {
        Ok(Self::catalog(name.parse()?))
    }

    fn type_a(n: usize) -> RootSystem {
        let (simple, pos, theta, pairing): (Vec<Lat>, Vec<Lat>, Lat, RMat) = if n == 1 {
            (vec![[2, 0]], vec![[2, 0]], [2, 0], [[r(1, 2), r(0, 1)], [r(0, 1), r(0, 1)]])
        } else {
            (
                vec![[2, -1], [-1, 2]],
                vec![[2, -1], [-1, 2], [1, 1]],
                [1, 1],
                [[r(2, 3), r(1, 3)], [r(1, 3), r(2, 3)]],
            )
        };
        let gens: Vec<Mat> = (0..n)
            .map(|i| {
                let mut m = refl_a(&simple[i], i);
                if n == 1 {
                    m[1][1] = 1;
                }
                m
            })
            .collect();
        let w0 = W0Table::build(n, &gens, &gens, &simple, &pos);
        let mut roots: Vec<(Lat, bool)> = pos.iter().map(|p| (*p, true)).collect();
        roots.extend(pos.iter().map(|p| (neg(p), false)));
        let stheta = (0..w0.order())
            .find(|&w| mat_vec(&w0.on_l[w], &theta) == neg(&theta) && w0.len[w] == 2 * n - 1)
            .unwrap();
        let build_side = |side: Side| {
            let mut simple_roots = vec![AffRoot::new(neg(&theta), r(1, 1))];
            let mut simple_elem = vec![Elem { w: stheta, t: theta }];
            for i in 0..n {
                simple_roots.push(AffRoot::new(simple[i], r(0, 1)));
                simple_elem.push(Elem { w: w0.simple[i], t: [0, 0] });
            }
            AffineWeyl {
                side,
                rank: n,
                roots: roots.clone(),
                step: r(1, 1),
                pairing,
                simple: simple_roots,
                simple_elem,
                omega: Vec::new(),
                w0: w0.clone(),
            }
        };
        let mut w = build_side(Side::X);
        let mut wp = build_side(Side::Y);
        fill_omega(&mut w);
        fill_omega(&mut wp);
        RootSystem {
            ty: if n == 1 { TypeName::A1 } else { TypeName::A2 },
            rank: n,
            w,
            wp,
            pairing,
            norbits: 1,
            dual: vec![vec![r(1, 1)]],
            denom_cap: if n == 1 { 2 } else { 6 },
            rho_terms: pos.iter().map(|p| (*p, 0)).collect(),
        }
    }

    fn type_c1() -> RootSystem {
        let gens: Vec<Mat> = vec![[[-1, 0], [0, 1]]];
        let w0 = W0Table::build(1, &gens, &gens, &[[1, 0]], &[[1, 0]]);
        let pairing = [[r(1, 1), r(0, 1)], [r(0, 1), r(0, 1)]];
        let build_side = |side: Side| AffineWeyl {
            side,
            rank: 1,
            roots: vec![([1, 0], true), ([-1, 0], false)],
            step: r(1, 2),
            pairing,
            simple: vec![AffRoot::new([-1, 0], r(1, 2)), AffRoot::new([1, 0], r(0, 1))],
            simple_elem: vec![Elem { w: 1, t: [1, 0] }, Elem { w: 1, t: [0, 0] }],
            omega: Vec::new(),
            w0: w0.clone(),
        };
        let mut w = build_side(Side::X);
        let mut wp = build_side(Side::Y);
        fill_omega(&mut w);
        fill_omega(&mut wp);
        let h = |a: i64, b: i64, c: i64, d: i64| vec![r(a, 2), r(b, 2), r(c, 2), r(d, 2)];
        RootSystem {
            ty: TypeName::C1,
            rank: 1,
            w,
            wp,
            pairing,
            norbits: 4,
            dual: vec![h(1, 1, 1, 1), h(1, 1, -1, -1), h(1, -1, 1, -1), h(1, -1, -1, 1)],
            denom_cap: 4,
            rho_terms: vec![([2, 0], 0)],
        }
    }

    /// Orbit labels of an indivisible affine root (same rule on both sides).
    pub fn orbit_of(&self, a: &AffRoot) -> OrbitPair {
        match self.ty {
            TypeName::A1 | TypeName::A2 => OrbitPair { root: 0, double: None },
            TypeName::C1 => {
                if (a.c * 2).to_integer().rem_euclid(2) == 0 {
                    OrbitPair { root: 0, double: Some(1) }
                } else {
                    OrbitPair { root: 2, double: Some(3) }
                }
            }
        }
    }

    pub fn finite_indices(&self) -> Vec<usize> {
        (1..=self.rank).collect()
    }

    pub fn w0(&self) -> &W0Table {
        self.w.w0()
    }

    pub fn formal_labels(&self) -> Labelling {
        Labelling::formal(self.norbits)
    }

    pub fn dual_label(&self, k: &Labelling) -> Labelling {
        Labelling(
            self.dual
                .iter()
                .map(|row| {
                    row.iter().zip(&k.0).fold(Exp::ZERO, |acc, (c, e)| acc + e.scale(*c).expect("dual label off grid"))
                })
                .collect(),
        )
    }

    /// Exponents of `τ_a` and `τ̃_a`.
    pub fn tau_exps(&self, a: &AffRoot, k: &Labelling) -> (Exp, Exp) {
        let o = self.orbit_of(a);
        let ka = k.get(o.root);
        let k2a = o.double.map(|d| k.get(d)).unwrap_or(Exp::ZERO);
        ((ka + k2a).half(), (ka - k2a).half())
    }

    pub fn tau(&self, a: &AffRoot, k: &Labelling) -> (KScalar, KScalar) {
        let (t, u) = self.tau_exps(a, k);
        (KScalar::qpow(t), KScalar::qpow(u))
    }

    /// `τ_i, τ̃_i` for a simple root of `S`.
    pub fn tau_i(&self, i: usize, k: &Labelling) -> (KScalar, KScalar) {
        self.tau(&self.w.simple[i], k)
    }

    /// `ρ_{k'}` as a vector in `L ⊗ ℚ` with exponent-valued coordinates.
    pub fn rho(&self, kp: &Labelling) -> [Exp; 2] {
        let mut out = [Exp::ZERO; 2];
        for (alpha, o) in &self.rho_terms {
            let half = kp.get(*o).half();
            for j in 0..2 {
                out[j] = out[j] + half.times(alpha[j]);
            }
        }
        out
    }

    /// `r_{k'}(λ) = λ − v(λ)⁻¹ρ_{k'}` with `k'` the dual of `k`.
    pub fn spectral_point(&self, lam: &Lat, k: &Labelling) -> SpectralPoint {
        let kp = self.dual_label(k);
        let rho = self.rho(&kp);
        let (_, v) = self.wp.uv_decompose(lam);
        let vi = self.w0().inv[v];
        let m = &self.w0().on_l[vi];
        let mut coords = [Exp::ZERO; 2];
        for i in 0..2 {
            coords[i] = Exp::unit_frac(lam[i], 1) - (rho[0].times(m[i][0]) + rho[1].times(m[i][1]));
        }
        SpectralPoint { coords, pairing: self.pairing }
    }

    /// Sign flips turning `k'` into `εk'`: negate the dual orbits of roots `a'_j` with `ε(s_j) = -1`.
    pub fn epsilon_dual_flip(&self, sign_neg: &[usize]) -> Vec<bool> {
        let mut flip = vec![false; self.norbits];
        for &j in sign_neg {
            let o = self.orbit_of(&self.wp.simple[j]);
            flip[o.root] = true;
            if let Some(d) = o.double {
                flip[d] = true;
            }
        }
        flip
    }

    pub fn point(&self, coords: [Exp; 2]) -> SpectralPoint {
        SpectralPoint { coords, pairing: self.pairing }
    }

    pub fn is_j_dominant(&self, lam: &Lat, j: &[usize]) -> bool {
        j.iter().all(|&i| self.pair_lp(lam, &self.wp.simple[i].grad) >= Rational64::zero())
    }

    /// `⟨λ, μ'⟩` for `λ ∈ L`, `μ' ∈ L'`.
    pub fn pair_lp(&self, lam: &Lat, mu: &Lat) -> Rational64 {
        self.w.pair(lam, mu)
    }

    pub fn act_l(&self, w: usize, lam: &Lat) -> Lat {
        mat_vec(&self.w0().on_l[w], lam)
    }

    pub fn act_lp(&self, w: usize, lam: &Lat) -> Lat {
        mat_vec(&self.w0().on_lp[w], lam)
    }

    /// `(λ₀, v̄_J)`: the `J`-dominant element of `W_Jλ` and the shortest `v̄ ∈ W_J` with `v̄λ₀ = λ`.
    pub fn j_dominant_rep(&self, lam: &Lat, j: &[usize]) -> (Lat, usize) {
        let w0 = self.w0();
        let wj = w0.subgroup(j);
        let lam0 = wj
            .iter()
            .map(|&w| self.act_l(w, lam))
            .find(|m| self.is_j_dominant(m, j))
            .expect("orbit meets the J-dominant chamber");
        let v = *wj.iter().filter(|&&w| self.act_l(w, &lam0) == *lam).min_by_key(|&&w| w0.len[w]).unwrap();
        (lam0, v)
    }

    /// `J' = {j ∈ J : ⟨λ₀, a'_j⟩ = 0}`.
    pub fn stabilizer_j(&self, lam0: &Lat, j: &[usize]) -> Vec<usize> {
        j.iter().copied().filter(|&i| self.pair_lp(lam0, &self.wp.simple[i].grad).is_zero()).collect()
    }

    pub fn orbit_j(&self, lam0: &Lat, j: &[usize]) -> Vec<Lat> {
        let set: BTreeSet<Lat> = self.w0().subgroup(j).iter().map(|&w| self.act_l(w, lam0)).collect();
        set.into_iter().collect()
    }

    pub fn u_prime(&self, lam: &Lat) -> Elem {
        self.wp.uv_decompose(lam).0
    }

    pub fn order_len(&self, lam: &Lat) -> usize {
        self.wp.length(&self.u_prime(lam))
    }

    /// The partial order on `L` via Bruhat comparison of `u'`.
    pub fn order_leq(&self, lam: &Lat, mu: &Lat) -> bool {
        self.wp.bruhat_leq(&self.u_prime(lam), &self.u_prime(mu))
    }

    /// `{μ ≤ λ}`, sorted so that smaller elements come first along a linear extension.
    pub fn down_set(&self, lam: &Lat) -> Vec<Lat> {
        let mut out: Vec<(usize, Lat)> = self
            .wp
            .interval(&self.u_prime(lam))
            .into_iter()
            .filter(|x| self.wp.is_finite_coset_minimal(x))
            .map(|x| (self.wp.length(&x), x.t))
            .collect();
        out.sort();
        out.into_iter().map(|(_, t)| t).collect()
    }

    /// Dominant weights whose `u'` has length at most `max_len`.
    pub fn weights_up_to(&self, max_len: usize) -> Vec<Lat> {
        let b = max_len as i64 + 2;
        let mut out = Vec::new();
        for x in -b..=b {
            let ys = if self.rank == 2 { -b..=b } else { 0..=0 };
            for y in ys {
                let lam = [x, y];
                if self.order_len(&lam) <= max_len {
                    out.push((self.order_len(&lam), lam));
                }
            }
        }
        out.sort();
        out.into_iter().map(|(_, l)| l).collect()
    }

    pub fn catalog_json(&self) -> serde_json::Value {
        let roots = |aw: &AffineWeyl| {
            aw.simple
                .iter()
                .map(|a| serde_json::json!({"gradient": &a.grad[..self.rank], "constant": a.c.to_string()}))
                .collect::<Vec<_>>()
        };
        let omega = self
            .w
            .omega
            .iter()
            .map(|(e, p)| serde_json::json!({"linear": self.w0().word[e.w], "translation": &e.t[..self.rank], "permutation": p}))
            .collect::<Vec<_>>();
        serde_json::json!({
            "type": self.ty.to_string(),
            "rank": self.rank,
            "simple_roots": roots(&self.w),
            "dual_simple_roots": roots(&self.wp),
            "pairing": (0..self.rank).map(|i| (0..self.rank).map(|j| self.pairing[i][j].to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "orbits": self.norbits,
            "dual_matrix": self.dual.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "omega": omega,
            "weyl_order": self.w0().order(),
            "denominator_cap": self.denom_cap,
        })
    }
}

fn fill_omega(aw: &mut AffineWeyl) {
    let mut found = Vec::new();
    let rng: Vec<i64> = vec![-1, 0, 1];
    for w in 0..aw.w0.order() {
        for &x in &rng {
            for &y in &rng {
                if aw.rank == 1 && y != 0 {
                    continue;
                }
                let e = Elem { w, t: [x, y] };
                if aw.length(&e) == 0 {
                    let perm: Vec<usize> = (0..=aw.rank)
                        .map(|i| {
                            let img = aw.act_root(&e, &aw.simple[i]);
                            aw.simple.iter().position(|a| *a == img).expect("length zero permutes simple roots")
                        })
                        .collect();
                    found.push((e, perm));
                }
            }
        }
    }
    found.sort_by_key(|(e, _)| (*e != aw.identity(), *e));
    aw.omega = found;
}

/// The point `r_{k'}(λ)`: coordinates in `L ⊗ ℚ`, each a rational plus label combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralPoint {
    pub coords: [Exp; 2],
    pairing: RMat,
}

impl SpectralPoint {
    /// `⟨r, μ'⟩` for a gradient in `L'`, as an exponent.
    pub fn pair(&self, mu: &Lat) -> Exp {
        let mut acc = Exp::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let c = self.pairing[i][j] * mu[j];
                if !c.is_zero() {
                    acc = acc + self.coords[i].scale(c).expect("spectral pairing off grid");
                }
            }
        }
        acc
    }

    /// `e(a')(r) = q(⟨Da', r⟩ + c)`.
    pub fn eval_root(&self, a: &AffRoot) -> Exp {
        self.pair(&a.grad) + Exp::from_rationals(a.c, &[], SCALE).expect("root constant")
    }

    pub fn vec_part(&self) -> [Rational64; 2] {
        [self.coords[0].coord_rational(0), self.coords[1].coord_rational(0)]
    }

    pub fn label_part(&self, o: usize) -> [Rational64; 2] {
        assert!(o < NLABELS);
        [self.coords[0].coord_rational(1 + o), self.coords[1].coord_rational(1 + o)]
    }
}

/// Helper for rank-aware display of lattice vectors.
pub fn lat_str(rank: usize, l: &Lat) -> String {
    l[..rank].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_lat(rank: usize, s: &str) -> Result<Lat, RootError> {
    let parts: Vec<&str> = s.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()).collect();
    if parts.len() != rank {
        return Err(RootError::LatticeMismatch(format!("expected {} coordinates, got {:?}", rank, s)));
    }
    let mut out = [0i64; 2];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.parse().map_err(|_| RootError::LatticeMismatch(format!("bad coordinate {:?}", p)))?;
    }
    Ok(out)
}

pub fn abs_rat(x: Rational64) -> Rational64 {
    x.abs()
}
