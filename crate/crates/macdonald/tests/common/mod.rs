#![allow(dead_code)]

use macdonald::params::KPoly;
use macdonald::rootdata::{Lat, RootSystem};
use macdonald::weights::{order_prec, Weights};
use std::collections::BTreeMap;

fn height(rs: &RootSystem, l: &Lat) -> num_rational::Rational64 {
    rs.wp.roots.iter().filter(|(_, p)| *p).map(|(g, _)| rs.pair_lp(l, g)).sum()
}

/// Coefficients of `E_λ` below `λ` from orthogonality against the monomials beneath it,
/// solved as power series in `q₀` through order `n` by iterating on the `q⁰` block.
pub fn gram_schmidt(rs: &RootSystem, w: &Weights, lam: &Lat, n: u32) -> BTreeMap<Lat, KPoly> {
    let prec = order_prec(rs, n);
    let mut m: Vec<Lat> = rs.down_set(lam).into_iter().filter(|x| x != lam).collect();
    m.sort_by_key(|x| height(rs, x));
    let d = |k: Lat| w.delta_coeff(n, &k);
    let diff = |a: &Lat, b: &Lat| [a[0] - b[0], a[1] - b[1]];
    let g: Vec<Vec<KPoly>> = m.iter().map(|nu| m.iter().map(|mu| d(diff(nu, mu))).collect()).collect();
    let g0: Vec<Vec<KPoly>> = g.iter().map(|row| row.iter().map(|x| x.truncate_unit(1)).collect()).collect();
    let b: Vec<KPoly> = m.iter().map(|nu| -&d(diff(nu, lam))).collect();
    let mut c = vec![KPoly::zero(); m.len()];
    for _ in 0..=n + 1 {
        let mut rhs: Vec<KPoly> = b.clone();
        for i in 0..m.len() {
            for j in 0..m.len() {
                let hi = &g[i][j] - &g0[i][j];
                if !hi.is_zero() && !c[j].is_zero() {
                    rhs[i] = &rhs[i] - &(&hi * &c[j]).truncate_unit(prec);
                }
            }
        }
        let mut next = vec![KPoly::zero(); m.len()];
        for i in 0..m.len() {
            let mut acc = rhs[i].clone();
            for j in 0..i {
                if !g0[i][j].is_zero() {
                    acc = &acc - &(&g0[i][j] * &next[j]).truncate_unit(prec);
                }
            }
            assert!(g0[i][i].is_one(), "q⁰ block is unitriangular");
            next[i] = acc;
        }
        c = next;
    }
    m.into_iter().zip(c).collect()
}
