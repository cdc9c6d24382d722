use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{big, head, need_nonempty, CheckInput, CheckResult, Relation, Rows};
use crate::eigen::{build_gram, singular_spectrum};
use crate::error::Result;
use crate::extract::nb_cover;
use crate::limits::Limits;
use crate::moments::{energy_k, energy_k_pair, t_k};
use crate::sets::{basis_depth_test, magnification_k, GSet, Sign, TupleSet};
use crate::spectrum::{dft, large_spectrum};

/// `(|A| / N, [kappa_0, ..., kappa_top])` with `kappa_j = E_j / |A|^{j+1}`.
fn kappas(a: &GSet, top: u32) -> Result<(f64, Vec<f64>)> {
    let n = a.group().order().expect("finite group") as f64;
    let m = a.len() as f64;
    let mut ks = vec![1.0 / m];
    for j in 1..=top {
        ks.push(energy_k(a, j)? as f64 / m.powi(j as i32 + 1));
    }
    Ok((m / n, ks))
}

fn without_zero(s: &GSet) -> GSet {
    let z = s.group().zero();
    GSet::new(s.group(), s.iter().filter(|x| **x != z).cloned()).expect("subset of a valid set")
}

pub(crate) fn c8(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let (delta, _) = kappas(a, 0)?;
    let mut rows = Rows::new("C8", &inp.label);
    rows.param("delta", delta);
    for alpha in [0.3, 0.5, 0.7] {
        let spec = head(&without_zero(&large_spectrum(a, alpha)?), 40);
        if spec.is_empty() {
            continue;
        }
        let half = head(&spec, spec.len().div_ceil(2));
        for (name, lam) in [("all", &spec), ("half", &half)] {
            for k in inp.ks(&[1, 2]) {
                let lhs = t_k(lam, k)? as f64;
                let rhs = delta * alpha.powi(2 * k as i32) * (lam.len() as f64).powi(2 * k as i32);
                rows.real(format!("alpha={alpha}, {name}, k={k}"), lhs, Relation::Ge, rhs);
            }
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c9(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let ks = inp.ks(&[1, 2]);
    let (delta, kap) = kappas(a, 2 * ks.iter().max().copied().unwrap_or(1))?;
    let mut rows = Rows::new("C9", &inp.label);
    rows.param("delta", delta);
    for alpha in [0.3, 0.5, 0.7] {
        let size = without_zero(&large_spectrum(a, alpha)?).len() as f64;
        for &k in &ks {
            let inner = (kap[2 * k as usize] - delta.powi(2 * k as i32 - 1)).max(0.0);
            let rhs = alpha.powi(-3) / delta * inner.powf(1.0 / (2 * k) as f64);
            rows.real(format!("alpha={alpha}, k={k}"), size, Relation::Le, rhs);
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c10(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let ks = inp.ks(&[2, 3, 4]);
    let (delta, kap) = kappas(a, ks.iter().max().copied().unwrap_or(2))?;
    let top = dft(a)?.abs().into_iter().skip(1).fold(0.0, f64::max);
    let m = a.len() as f64;
    let mut rows = Rows::new("C10", &inp.label);
    rows.param("delta", delta);
    for k in ks {
        if k < 2 {
            continue;
        }
        let ku = k as usize;
        let inner = (kap[ku] - delta.powi(k as i32 - 1)).max(0.0);
        rows.real(format!("k={k}"), top, Relation::Ge, (inner / k as f64).sqrt() * m);
        let inner2 = (kap[ku] - delta * kap[ku - 1]).max(0.0);
        rows.real(format!("refined, k={k}"), top, Relation::Ge, inner2.sqrt() * m);
        if k >= 3 {
            let mid = kap[ku - 1].powf((k - 1) as f64 / (k - 2) as f64);
            rows.real(format!("moment growth, k={k}"), kap[ku], Relation::Ge, mid);
            rows.real(format!("moment floor, k={k}"), mid, Relation::Ge, delta * kap[ku - 1]);
        }
    }
    Ok(rows.finish())
}

/// Candidate bases: the complement of `A` and `A` itself.
fn basis_candidates(inp: &CheckInput) -> Result<Vec<(&'static str, GSet)>> {
    let c = inp.a.complement()?;
    let mut out = Vec::new();
    if !c.is_empty() {
        out.push(("complement", c));
    }
    out.push(("A", inp.a.clone()));
    Ok(out)
}

/// Largest `k` with `B^k ∓ Δ(B) = G^k`, scanning while `N^k` stays small.
fn depth(b: &GSet, sign: Sign, limits: &Limits) -> Result<usize> {
    let n = b.group().order().expect("finite group") as u128;
    let mut k = 0;
    while n.pow(k as u32 + 1) <= 300_000 {
        match basis_depth_test(b, k + 1, sign, limits) {
            Ok(r) if r.is_basis => k += 1,
            Ok(_) => break,
            Err(e) if super::is_inapplicable(&e) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(k)
}

pub(crate) fn c14(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let n = big(inp.a.group().order().expect("finite group") as u128);
    let pool = inp.pool();
    let mut rows = Rows::new("C14", &inp.label);
    for (name, b) in basis_candidates(inp)? {
        for sign in [Sign::Minus, Sign::Plus] {
            let kk = depth(&b, sign, limits)? as u32;
            if kk == 0 {
                continue;
            }
            for (i, t) in pool.iter().enumerate() {
                let s = big(crate::sets::sumset(&b, t)?.len() as u128);
                let tl = big(t.len() as u128);
                rows.exact(
                    format!("B={name}, {sign}-depth {kk}, T=pool[{i}]"),
                    s.pow(kk + 1),
                    Relation::Ge,
                    &tl * n.pow(kk),
                );
                if sign == Sign::Minus {
                    let bl = big(b.len() as u128);
                    for m in kk..=kk + 2 {
                        rows.exact(
                            format!("B={name}, depth {kk}, m={m}, T=pool[{i}]"),
                            s.pow(m + 1),
                            Relation::Ge,
                            bl.pow(m - kk) * &tl * n.pow(kk),
                        );
                    }
                }
            }
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c18(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = head(&inp.a, 10);
    let b = head(&inp.partner(), 10);
    let g = a.group();
    let mut rng = ChaCha8Rng::seed_from_u64(inp.seed);
    let mut rows = Rows::new("C18", &inp.label);
    for k in inp.ks(&[1, 2]) {
        let gram = build_gram(&a, &b, k, limits)?;
        let spec = singular_spectrum(&gram, limits)?;
        let s2: f64 = spec.lambdas_sq.iter().sum();
        let s4: f64 = spec.lambdas_sq.iter().map(|x| x * x).sum();
        let top = (b.len() as f64).powi(2 * k as i32);
        let e = energy_k_pair(&a, &b, 2 * k + 1)?;
        rows.real(format!("sum lambda^2, k={k}"), s2, Relation::Eq, a.len() as f64 * (b.len() as f64).powi(k as i32));
        rows.real(format!("sum lambda^4, k={k}"), s4, Relation::Eq, e as f64);
        let r = magnification_k(&a, &b, k as usize, limits)?;
        rows.real(format!("R^(k) >= |B|^(2k)/lambda_1^2, k={k}"), r.value(), Relation::Ge, top / spec.lambda1_sq());
        let (p, q) = (*r.ratio.numer() as u128, *r.ratio.denom() as u128);
        rows.exact(
            format!("R^(k) >= |B|^(2k)/E^(1/2), k={k}"),
            big(p).pow(2) * big(e),
            Relation::Ge,
            big(q).pow(2) * big(b.len() as u128).pow(4 * k),
        );
        // Random families B^(y) ⊆ B^k, one per y ∈ A.
        let bk: Vec<_> = TupleSet::product(&vec![&b; k as usize])?.iter().collect();
        let fams: Vec<Vec<_>> =
            a.iter().map(|_| bk.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()).collect();
        let total: u128 = fams.iter().map(|f| f.len() as u128).sum();
        let ek1 = energy_k_pair(&a, &b, k + 1)?;
        for sign in [Sign::Minus, Sign::Plus] {
            let mut all = Vec::new();
            for (y, f) in a.iter().zip(&fams) {
                all.extend(f.iter().map(|t| t.iter().map(|x| sign.apply(g, x, y)).collect::<Vec<_>>()));
            }
            let union = TupleSet::new(g, k as usize, all)?.len();
            rows.exact(
                format!("union of B^(y) {sign} y, k={k}"),
                big(union as u128) * big(ek1),
                Relation::Ge,
                big(total).pow(2),
            );
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c29(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let n = inp.a.group().order().expect("finite group") as u128;
    let mut rows = Rows::new("C29", &inp.label);
    for (name, b) in basis_candidates(inp)? {
        let kk = depth(&b, Sign::Plus, limits)?;
        if kk < 2 {
            continue;
        }
        for m in 1..kk {
            let r = basis_depth_test(&b, m, Sign::Minus, limits)?;
            rows.exact(format!("B={name}, sum depth {kk}, m={m}"), big(r.covered), Relation::Eq, big(n.pow(m as u32)));
        }
    }
    Ok(rows.finish())
}

/// `3 + (2 / log(k+1)) log(log(1/delta) / log((k+1)/2))`, logs base 2, at least 2.
pub fn cover_threshold(k: usize, delta: f64) -> f64 {
    let k1 = (k + 1) as f64;
    let t = 3.0 + 2.0 / k1.log2() * ((1.0 / delta).log2() / (k1 / 2.0).log2()).log2();
    if t.is_nan() {
        2.0
    } else {
        t.max(2.0)
    }
}

pub(crate) fn c30(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let n = inp.a.group().order().expect("finite group") as f64;
    let mut rows = Rows::new("C30", &inp.label);
    for (name, b) in basis_candidates(inp)? {
        let kk = depth(&b, Sign::Minus, limits)?;
        if kk < 2 {
            continue;
        }
        let delta = b.len() as f64 / n;
        let thr = cover_threshold(kk, delta).ceil() as u128;
        rows.param("delta", delta);
        match nb_cover(&b, 64)? {
            Some(c) => {
                rows.exact(format!("B={name}, depth {kk}"), big(c as u128), Relation::Le, big(thr));
            }
            None => {
                rows.flag(format!("B={name}, depth {kk}: nB never covers G"), false);
            }
        }
    }
    Ok(rows.finish())
}
