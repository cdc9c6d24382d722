use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use super::{big, head, need_nonempty, CheckInput, CheckResult, Relation, Rows};
use crate::eigen::build_gram;
use crate::error::Result;
use crate::group::Elem;
use crate::limits::Limits;
use crate::moments::{autocorrelation, energy_k, energy_k_pair, energy_k_real};
use crate::sets::{delta_sumset, delta_sumset_size, stabilizer_slice, GSet, Sign, TupleSet};

/// All nonempty slices `A_s`, `s ∈ G^j` (one per `s`, so with multiplicity).
pub(crate) fn slices(a: &GSet, j: usize, limits: &Limits) -> Result<Vec<GSet>> {
    if j == 0 {
        return Ok(vec![a.clone()]);
    }
    let sets = vec![a; j];
    let shifts = delta_sumset(&sets, a, Sign::Minus, limits)?;
    shifts.iter().map(|s| stabilizer_slice(a, &s)).collect()
}

/// `z -> sum_s (A_s∘A_s)(z)` over `s ∈ G^j`, by direct pair enumeration.
fn slice_profile(a: &GSet, j: usize, limits: &Limits) -> Result<FxHashMap<Elem, u128>> {
    let g = a.group();
    let mut f: FxHashMap<Elem, u128> = FxHashMap::default();
    for s in slices(a, j, limits)? {
        for x in s.iter() {
            for y in s.iter() {
                *f.entry(g.op_sub(y, x)).or_insert(0) += 1;
            }
        }
    }
    Ok(f)
}

pub(crate) fn c4(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let mut pairs = Vec::new();
    for k in inp.ks(&[1, 2, 3, 4]) {
        for l in inp.ls(&[1, 2, 3, 4]) {
            if k >= 1 && l >= 1 && (inp.k.is_some() && inp.l.is_some() || k + l <= 5) {
                pairs.push((k, l));
            }
        }
    }
    let mut profiles: FxHashMap<u32, FxHashMap<Elem, u128>> = FxHashMap::default();
    let mut rows = Rows::new("C4", &inp.label);
    for (k, l) in pairs {
        for j in [k - 1, l - 1] {
            if !profiles.contains_key(&j) {
                profiles.insert(j, slice_profile(a, j as usize, limits)?);
            }
        }
        let (fk, fl) = (&profiles[&(k - 1)], &profiles[&(l - 1)]);
        let lhs: u128 = fk.iter().map(|(z, v)| v * fl.get(z).copied().unwrap_or(0)).sum();
        rows.exact(format!("k={k},l={l}"), big(lhs), Relation::Eq, big(energy_k(a, k + l)?));
    }
    Ok(rows.finish())
}

pub(crate) fn c5(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let b = inp.partner();
    let g = a.group();
    let mut rows = Rows::new("C5", &inp.label);
    for k in inp.ks(&[1, 2, 3]) {
        let space = a.len() as u128 * (b.len() as u128).pow(k);
        if space > limits.cap_tuples {
            continue;
        }
        let bk = TupleSet::product(&vec![&b; k as usize])?;
        let mut reps: FxHashMap<Vec<i64>, u128> = FxHashMap::default();
        for t in bk.iter() {
            for x in a.iter() {
                let key: Vec<i64> = t.iter().flat_map(|y| g.op_add(y, x).0.into_iter()).collect();
                *reps.entry(key).or_insert(0) += 1;
            }
        }
        let rhs: u128 = reps.values().map(|r| r * r).sum();
        rows.exact(format!("k={k}"), big(energy_k_pair(a, &b, k + 1)?), Relation::Eq, big(rhs));
    }
    Ok(rows.finish())
}

pub(crate) fn c15(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool = inp.pool();
    let g = inp.a.group();
    let full = GSet::full(g)?;
    let n = g.order().expect("finite group") as u128;
    let mut rows = Rows::new("C15", &inp.label);
    for k in inp.ks(&[2, 3]) {
        if k < 2 {
            continue;
        }
        let sets: Vec<&GSet> = (0..k as usize).map(|i| &pool[i % pool.len()]).collect();
        let lhs = delta_sumset_size(&sets, &full, Sign::Minus, limits)?;
        let inner = delta_sumset_size(&sets[..sets.len() - 1], sets[sets.len() - 1], Sign::Minus, limits)?;
        rows.exact(format!("k={k}"), big(lhs), Relation::Eq, big(n) * big(inner));
    }
    Ok(rows.finish())
}

pub(crate) fn c24(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let aa = autocorrelation(a)?;
    let sl = slices(a, 1, limits)?;
    let tabs: Vec<_> = sl.iter().map(autocorrelation).collect::<Result<_>>()?;
    let mut rows = Rows::new("C24", &inp.label);
    for alpha in [0u32, 1, 2] {
        let mut lhs = BigUint::from(0u32);
        for t in &tabs {
            for (x, v) in t.support() {
                lhs += big(v as u128) * big(aa.get(&x) as u128).pow(alpha);
            }
        }
        rows.exact(format!("alpha={alpha}"), lhs, Relation::Eq, big(energy_k(a, 2 + alpha)?));
    }
    for alpha in [0.5f64, 1.5] {
        let lhs: f64 = tabs
            .iter()
            .flat_map(|t| t.support())
            .map(|(x, v)| v as f64 * (aa.get(&x) as f64).powf(alpha))
            .sum();
        rows.real(format!("alpha={alpha}"), lhs, Relation::Eq, energy_k_real(a, 2.0 + alpha)?);
    }
    Ok(rows.finish())
}

pub(crate) fn ek_slices(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let mut rows = Rows::new("ek-slices", &inp.label);
    for k in inp.ks(&[1, 2, 3, 4]) {
        if k == 0 {
            continue;
        }
        let sl = slices(a, k as usize - 1, limits)?;
        let sq: u128 = sl.iter().map(|s| (s.len() * s.len()) as u128).sum();
        let lin: u128 = sl.iter().map(|s| s.len() as u128).sum();
        rows.exact(format!("sum |A_s|^2, k={k}"), big(sq), Relation::Eq, big(energy_k(a, k)?));
        rows.exact(format!("sum |A_s|, k={k}"), big(lin), Relation::Eq, big(a.len() as u128).pow(k));
    }
    Ok(rows.finish())
}

pub(crate) fn ruzsa_swap(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let pool: Vec<GSet> = inp.pool().iter().map(|s| head(s, 6)).collect();
    let x = head(&inp.pool()[2], 8);
    let z = head(&inp.pool()[3], 8);
    let (xt, zt) = (TupleSet::from_set(&x), TupleSet::from_set(&z));
    let mut rows = Rows::new("ruzsa-swap", &inp.label);
    for k in inp.ks(&[1, 2]) {
        let factors: Vec<&GSet> = (0..k as usize).map(|i| &pool[i % 2]).collect();
        let ys = [
            ("product", TupleSet::product(&factors)?),
            ("difference", delta_sumset(&factors, &pool[2], Sign::Minus, limits)?),
        ];
        for (name, y) in ys {
            let lhs = TupleSet::concat(&[&y, &zt])?.shift_by_diagonal(&x, Sign::Minus)?.len();
            let rhs = TupleSet::concat(&[&y, &xt])?.shift_by_diagonal(&z, Sign::Minus)?.len();
            rows.exact(format!("{name} Y, k={k}"), big(lhs as u128), Relation::Eq, big(rhs as u128));
        }
    }
    Ok(rows.finish())
}

pub(crate) fn gram_trace(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = head(&inp.a, 12);
    let b = head(&inp.partner(), 12);
    let g = a.group();
    let mut rows = Rows::new("gram-trace", &inp.label);
    for k in inp.ks(&[1, 2, 3]) {
        // Entries |(B - y) ∩ (B - y')|^k from explicit intersections.
        let shifted: Vec<GSet> = a.iter().map(|y| b.translate(&g.op_neg(y))).collect();
        let mut trace = 0u128;
        let mut frob = BigUint::from(0u32);
        let mut entries = Vec::with_capacity(a.len() * a.len());
        for (i, s) in shifted.iter().enumerate() {
            for (j, t) in shifted.iter().enumerate() {
                let e = (s.intersection(t).len() as u128).pow(k);
                if i == j {
                    trace += e;
                }
                frob += big(e) * big(e);
                entries.push(e);
            }
        }
        rows.exact(format!("trace, k={k}"), big(trace), Relation::Eq, big(a.len() as u128) * big(b.len() as u128).pow(k));
        rows.exact(format!("frobenius, k={k}"), frob, Relation::Eq, big(energy_k_pair(&a, &b, 2 * k + 1)?));
        let same = match build_gram(&a, &b, k, limits) {
            Ok(gram) => gram.entries == entries,
            Err(_) => false,
        };
        rows.flag(format!("gram entries agree, k={k}"), same);
    }
    Ok(rows.finish())
}
