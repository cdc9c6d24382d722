use num_bigint::BigUint;

use super::{big, bpow, head, need_nonempty, CheckInput, CheckResult, Relation, Rows};
use crate::error::Result;
use crate::extract::{popular_set, slice};
use crate::limits::Limits;
use crate::moments::{autocorrelation, energy_k, sigma_k, t_k};
use crate::sets::{
    delta_sumset, delta_sumset_size, diffset, iterated, magnification, magnification_tuple, sumset, GSet, Sign,
    TupleSet,
};

fn n(a: &GSet) -> BigUint {
    big(a.len() as u128)
}

fn sign_set(a: &GSet, b: &GSet, sign: Sign) -> Result<GSet> {
    match sign {
        Sign::Plus => sumset(a, b),
        Sign::Minus => diffset(a, b),
    }
}

pub(crate) fn c1(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let d = diffset(a, a)?;
    let mut rows = Rows::new("C1", &inp.label);
    for k in inp.ks(&[1, 2, 3]) {
        rows.exact(format!("k={k}"), n(a).pow(2 * k), Relation::Le, big(energy_k(a, k)?) * big(sigma_k(&d, k)?));
    }
    Ok(rows.finish())
}

pub(crate) fn c2(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let s = sumset(a, a)?;
    let mut rows = Rows::new("C2", &inp.label);
    for k in inp.ks(&[1, 2]) {
        rows.exact(format!("k={k}"), n(a).pow(4 * k), Relation::Le, big(energy_k(a, 2 * k)?) * big(t_k(&s, k)?));
    }
    Ok(rows.finish())
}

pub(crate) fn c3(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let mut rows = Rows::new("C3", &inp.label);
    for k in inp.ks(&[1, 2]) {
        for sign in [Sign::Minus, Sign::Plus] {
            let s = sign_set(a, a, sign)?;
            rows.exact(
                format!("k={k}, A{sign}A"),
                n(a).pow(2 * k + 4),
                Relation::Le,
                big(energy_k(a, k + 2)?) * big(energy_k(&s, k)?),
            );
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c6(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let mut rows = Rows::new("C6", &inp.label);
    for k in inp.ks(&[1, 2, 3]) {
        let d = delta_sumset_size(&vec![a; k as usize], a, Sign::Minus, limits)?;
        rows.exact(format!("k={k}"), big(d) * big(energy_k(a, k + 1)?), Relation::Ge, n(a).pow(2 * k + 2));
    }
    Ok(rows.finish())
}

pub(crate) fn c7(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let mut rows = Rows::new("C7", &inp.label);
    for k in inp.ks(&[2, 3, 4]) {
        if k < 2 {
            continue;
        }
        let sets: Vec<&GSet> = (0..k as usize).map(|i| &pool[i % pool.len()]).collect();
        let (first, last) = sets.split_at(sets.len() - 1);
        let lhs = big(delta_sumset_size(first, last[0], Sign::Minus, limits)?);
        let prod: BigUint = sets.iter().map(|s| n(s)).product();
        let mut diffs = BigUint::from(1u32);
        for s in first {
            diffs *= n(&diffset(s, last[0])?);
        }
        rows.exact(format!("k={k}, sizes"), lhs.clone(), Relation::Le, prod);
        rows.exact(format!("k={k}, differences"), lhs, Relation::Le, diffs);
    }
    Ok(rows.finish())
}

pub(crate) fn c11(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let small: Vec<GSet> = pool.iter().map(|s| head(s, 5)).collect();
    let mut rows = Rows::new("C11", &inp.label);
    for k in inp.ks(&[1, 2]) {
        let ku = k as usize;
        // |W x X| |Y - Δ(Z)| <= |Y x W x Z - Δ(X)|.
        let wf: Vec<&GSet> = (0..ku).map(|i| &small[(i + 1) % 4]).collect();
        let yf: Vec<&GSet> = (0..ku).map(|i| &small[i % 4]).collect();
        let w = TupleSet::product(&wf)?;
        let (x, z) = (&small[2], &small[3]);
        for (name, y) in [("product", TupleSet::product(&yf)?), ("difference", delta_sumset(&yf, &small[1], Sign::Minus, limits)?)] {
            let lhs = big(w.len() as u128) * n(x) * big(y.shift_by_diagonal(z, Sign::Minus)?.len() as u128);
            let rhs = TupleSet::concat(&[&y, &w, &TupleSet::from_set(z)])?.shift_by_diagonal(x, Sign::Minus)?.len();
            rows.exact(format!("first, {name} Y, k={k}"), lhs, Relation::Le, big(rhs as u128));
        }
        // |A^k - Δ(A)| |A| <= |A^(k+1) + Δ(A)| and |A^k + Δ(A)| |A| <= |A^k - Δ(A)| |A + A|.
        let a = &pool[0];
        let dk = delta_sumset_size(&vec![a; ku], a, Sign::Minus, limits)?;
        let sk = delta_sumset_size(&vec![a; ku], a, Sign::Plus, limits)?;
        let sk1 = delta_sumset_size(&vec![a; ku + 1], a, Sign::Plus, limits)?;
        rows.exact(format!("D_k |A| <= S_(k+1), k={k}"), big(dk) * n(a), Relation::Le, big(sk1));
        rows.exact(format!("S_k |A| <= D_k |A+A|, k={k}"), big(sk) * n(a), Relation::Le, big(dk) * n(&sumset(a, a)?));
    }
    // |A_1 x .. x A_k - Δ(B)| <= |A_1..A_m - Δ(A_(m+1))| |A_(m+1)..A_k - Δ(B)|.
    for k in [2usize, 3] {
        let sets: Vec<&GSet> = (0..k).map(|i| &pool[i % 4]).collect();
        let b = &pool[(k + 1) % 4];
        let whole = delta_sumset_size(&sets, b, Sign::Minus, limits)?;
        for m in 1..k {
            let left = delta_sumset_size(&sets[..m], sets[m], Sign::Minus, limits)?;
            let right = delta_sumset_size(&sets[m..], b, Sign::Minus, limits)?;
            rows.exact(format!("second, k={k}, m={m}"), big(whole), Relation::Le, big(left) * big(right));
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c13(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let top = inp.k.unwrap_or(3).max(2) as usize;
    let mut d = vec![BigUint::from(0u32)];
    let mut s = vec![BigUint::from(0u32)];
    for j in 1..=top {
        d.push(big(delta_sumset_size(&vec![a; j], a, Sign::Minus, limits)?));
        s.push(big(delta_sumset_size(&vec![a; j], a, Sign::Plus, limits)?));
    }
    let mut rows = Rows::new("C13", &inp.label);
    for nn in 1..top {
        for m in 1..=(top - nn) {
            let am = n(a).pow(m as u32);
            let nm = nn + m;
            rows.exact(format!("D_{nn}|A|^{m} <= D_{nm}"), &d[nn] * &am, Relation::Le, d[nm].clone());
            rows.exact(format!("D_{nm} <= D_{nn} D_{m}"), d[nm].clone(), Relation::Le, &d[nn] * &d[m]);
            rows.exact(format!("S_{nn}|A|^{m} <= S_{nm}"), &s[nn] * &am, Relation::Le, s[nm].clone());
            let mn = s[m].clone().min(d[m].clone());
            rows.exact(format!("S_{nm} <= S_{nn} min(S_{m}, D_{m})"), s[nm].clone(), Relation::Le, &s[nn] * mn);
            if m >= 2 {
                rows.exact(format!("D_{nn}|A|^{m} <= S_{nm}"), &d[nn] * &am, Relation::Le, s[nm].clone());
            }
            if m == 1 && nn >= 2 {
                rows.exact(format!("D_{}|A|^2 <= S_{nm}", nn - 1), &d[nn - 1] * n(a).pow(2), Relation::Le, s[nm].clone());
            }
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c16(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let a = &pool[0];
    let c = &pool[3];
    let small: Vec<GSet> = pool.iter().map(|s| head(s, 8)).collect();
    let mut rows = Rows::new("C16", &inp.label);
    for k in inp.ks(&[1, 2]) {
        let factors: Vec<&GSet> = (0..k as usize).map(|i| &small[1 + i % 2]).collect();
        let b = TupleSet::product(&factors)?;
        let lhs = n(a) * big(b.shift_by_diagonal(c, Sign::Plus)?.len() as u128);
        let rhs = big(b.shift_by_diagonal(a, Sign::Plus)?.len() as u128) * n(&sumset(a, c)?);
        rows.exact(format!("k={k}"), lhs, Relation::Le, rhs);
    }
    Ok(rows.finish())
}

pub(crate) fn c17(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let a = head(&pool[0], 10);
    let b = head(&pool[1], 10);
    let c = &pool[2];
    let mut rows = Rows::new("C17", &inp.label);
    let r = magnification(&a, &a, limits)?;
    let (p, q) = (*r.ratio.numer() as u128, *r.ratio.denom() as u128);
    rows.param("R[A]", r.value());
    for (nn, m) in [(1usize, 0usize), (0, 1), (1, 1), (2, 0), (2, 1), (1, 2), (0, 3)] {
        let e = (nn + m) as u32;
        let lhs = big(iterated(&a, nn, m)?.len() as u128) * bpow(q, e);
        rows.exact(format!("|{nn}A-{m}A| <= R[A]^{e}|A|"), lhs, Relation::Le, bpow(p, e) * n(&a));
    }
    let rb = magnification(&a, &b, limits)?;
    let (p, q) = (*rb.ratio.numer() as u128, *rb.ratio.denom() as u128);
    let x = &rb.witness;
    let cx = sumset(c, x)?;
    let lhs = big(sumset(&b, &cx)?.len() as u128) * big(q);
    rows.exact("|B+C+X| <= R_B[A] |C+X|", lhs, Relation::Le, big(p) * n(&cx))
        .with_witness(serde_json::to_value(x).unwrap_or_default());
    for k in inp.ks(&[2]) {
        let small = head(&pool[1], 5);
        let bt = TupleSet::product(&vec![&small; k as usize])?;
        let rt = magnification_tuple(&a, &bt, limits)?;
        let (p, q) = (*rt.ratio.numer() as u128, *rt.ratio.denom() as u128);
        let cx = sumset(c, &rt.witness)?;
        let lhs = big(bt.shift_by_diagonal(&cx, Sign::Plus)?.len() as u128) * big(q);
        rows.exact(format!("|B+Δ(C+X)| <= R_B[A] |C+X|, k={k}"), lhs, Relation::Le, big(p) * n(&cx))
            .with_witness(serde_json::to_value(&rt.witness).unwrap_or_default());
    }
    Ok(rows.finish())
}

pub(crate) fn c19(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let a = &pool[0];
    let mut rows = Rows::new("C19", &inp.label);
    for k in inp.ks(&[1, 2, 3]) {
        let ek = big(energy_k(a, k)?);
        for (i, b) in pool.iter().enumerate().skip(1) {
            let lhs = n(&sumset(a, b)?).pow(k) * &ek;
            rows.exact(format!("k={k}, B=pool[{i}]"), lhs, Relation::Ge, n(a).pow(2 * k) * n(b));
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c20(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let d = diffset(a, a)?;
    let k = d.len() as f64 / a.len() as f64;
    let popular = popular_set(a, Some(a.len() as f64 / (2.0 * k)))?;
    let aa = autocorrelation(a)?;
    let deep = GSet::new(a.group(), d.iter().filter(|s| aa.get(s) >= 2).cloned())?;
    let e3 = big(energy_k(a, 3)?);
    let mut rows = Rows::new("C20", &inp.label);
    rows.param("K", k);
    for (name, p) in [("popular", popular), ("all", d.clone()), ("repeated", deep)] {
        if p.is_empty() {
            continue;
        }
        let slices: Vec<GSet> = p.iter().map(|s| slice(a, s)).collect();
        let mass: u128 = slices.iter().map(|s| s.len() as u128).sum();
        for sign in [Sign::Minus, Sign::Plus] {
            let mut total = 0u128;
            for s in &slices {
                total += sign_set(a, s, sign)?.len() as u128;
            }
            rows.exact(
                format!("P*={name}, A{sign}A_s"),
                big(total) * &e3,
                Relation::Ge,
                big(mass).pow(2) * n(a).pow(2),
            );
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c21(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let e3 = big(energy_k(a, 3)?);
    let d = n(&diffset(a, a)?);
    let s = n(&sumset(a, a)?);
    let mut rows = Rows::new("C21", &inp.label);
    for l in inp.ls(&[2, 3]) {
        if l < 2 {
            continue;
        }
        let tl = big(t_k(a, l)?);
        rows.exact(
            format!("difference, l={l}"),
            n(a).pow(8 * l),
            Relation::Le,
            bpow(8u32, l) * e3.pow(l) * &tl * d.pow(2 * l + 1),
        );
        rows.exact(format!("sum, l={l}"), n(a).pow(9 * l), Relation::Le, bpow(8u32, l) * e3.pow(l) * &tl * s.pow(3 * l + 1));
        rows.exact(
            format!("sum cubed, l={l}"),
            n(a).pow(20 * l),
            Relation::Le,
            bpow(32u32, l) * e3.pow(3 * l) * &tl * s.pow(6 * l + 1),
        );
    }
    Ok(rows.finish())
}

pub(crate) fn c22(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let aa = autocorrelation(a)?;
    let d = diffset(a, a)?;
    let popular = popular_set(a, None)?;
    let bs = [("A-A", d), ("popular", popular), ("A", a.clone()), ("B", inp.partner())];
    let mut rows = Rows::new("C22", &inp.label);
    for l in inp.ls(&[1, 2, 3]) {
        if l < 1 {
            continue;
        }
        let el2 = big(energy_k(a, l + 2)?);
        for (name, b) in &bs {
            let mass: u128 = b.iter().map(|x| aa.get(x) as u128).sum();
            let rhs = n(a).pow(6 * l - 4) * big(energy_k(b, l)?) * &el2;
            rows.exact(format!("B={name}, l={l}"), big(mass).pow(4 * l), Relation::Le, rhs);
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c28(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let small: Vec<GSet> = inp.pool().iter().map(|s| head(s, 5)).collect();
    let mut rows = Rows::new("C28", &inp.label);
    for (k1, k2) in [(1usize, 1usize), (1, 2), (2, 1)] {
        let xs: Vec<&GSet> = (0..k1).map(|i| &small[i % 4]).collect();
        let zs: Vec<&GSet> = (0..k2).map(|i| &small[(i + 1) % 4]).collect();
        let y = &small[2];
        let w = &small[3];
        let left = delta_sumset_size(&xs, y, Sign::Minus, limits)?;
        let right = delta_sumset_size(&zs, w, Sign::Minus, limits)?;
        let mut factors = Vec::with_capacity(k1 + k2);
        for x in &xs {
            factors.push(diffset(x, w)?);
        }
        for z in &zs {
            factors.push(diffset(y, z)?);
        }
        let refs: Vec<&GSet> = factors.iter().collect();
        let rhs = delta_sumset_size(&refs, &diffset(y, w)?, Sign::Minus, limits)?;
        rows.exact(format!("k1={k1}, k2={k2}"), big(left) * big(right), Relation::Le, big(rhs));
    }
    Ok(rows.finish())
}
