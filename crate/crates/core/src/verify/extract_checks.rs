use super::{big, need_nonempty, CheckInput, CheckResult, Relation, Rows};
use crate::error::{Error, Result};
use crate::extract::{
    bsg_extract, bsg_extract_v2, cs_period_search, find_configuration, katz_koester, slice, small_t4_extract, CsOptions,
    ExtractionReport, T4Options,
};
use crate::genset::is_convex;
use crate::limits::Limits;
use crate::moments::{additive_energy, autocorrelation, convolve_sets, energy_k, mult_energy_k, quotient_set_size};
use crate::sets::{diffset, iterated, sumset, GSet, Sign};

fn log2_floor1(x: f64) -> f64 {
    x.log2().max(1.0)
}

fn stage_rows(rows: &mut Rows, rep: &ExtractionReport) {
    for (name, r) in &rep.ratios {
        // Only the headline bound is an upper bound; size and mass ratios are lower bounds.
        let rel = if name == "full-bound" { Relation::Le } else { Relation::Ge };
        rows.report_if(format!("{} {name}", rep.pipeline), *r, rel, 1.0, rep.all_checks_pass());
    }
}

pub(crate) fn c31(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let b = inp.b.clone().unwrap_or_else(|| a.clone());
    let rep = cs_period_search(a, &b, CsOptions { k: 4, trials: 200, seed: inp.seed, max_shifts: 64 })?;
    let mut rows = Rows::new("C31", &inp.label);
    for (k, v) in &rep.params {
        rows.param(k, *v);
    }
    let t = rep.output("T").expect("cs output");
    let shift = rep.output("shift").expect("cs output");
    let violators = rep.output("violators").expect("cs output").len();
    rows.exact("shifts violating the almost-period bound", big(violators as u128), Relation::Eq, big(0u32));
    let d = diffset(a, a)?;
    let inside = shift.iter().all(|s| t.translate(s).is_subset(&d));
    rows.flag("T + (a0 - b0) ⊆ A - A", inside);
    rows.report("|T| against K|A|/(16M)", rep.measured, Relation::Ge, rep.claimed);
    Ok(rows.finish())
}

pub(crate) fn c32(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let n = a.len() as f64;
    let mut rows = Rows::new("C32", &inp.label);
    let first = bsg_extract(a, 1.0)?;
    stage_rows(&mut rows, &first);
    let second = bsg_extract_v2(a, 1.0, (1, 1), inp.seed)?;
    stage_rows(&mut rows, &second);
    // |nA' - mA'| << M^(21(n+m)) K |A'| with E_4 = M |A|^5 / K^3.
    let k = n.powi(3) / energy_k(a, 2)? as f64;
    let m4 = energy_k(a, 4)? as f64 * k.powi(3) / n.powi(5);
    rows.param("K", k);
    rows.param("M", m4);
    let ap = second.output("A'").expect("bsg2 output");
    for (nn, mm) in [(1usize, 1usize), (2, 0), (2, 1)] {
        let size = iterated(ap, nn, mm)?.len() as f64;
        let claimed = m4.powi(21 * (nn + mm) as i32) * k * ap.len() as f64;
        rows.report_if(format!("|{nn}A'-{mm}A'| against M^(21(n+m))K|A'|"), size, Relation::Le, claimed, second.all_checks_pass());
    }
    Ok(rows.finish())
}

pub(crate) fn c33(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let rep = small_t4_extract(&inp.a, T4Options::default())?;
    let mut rows = Rows::new("C33", &inp.label);
    for (k, v) in &rep.params {
        rows.param(k, *v);
    }
    let ok = rep.all_checks_pass();
    rows.report_if("R-size", rep.ratios["R-size"], Relation::Le, 1.0, ok);
    rows.report_if("B-size", rep.ratios["B-size"], Relation::Ge, 1.0, ok);
    rows.report_if("B-energy", rep.ratios["B-energy"], Relation::Ge, 1.0, ok);
    rows.report_if("|A ∩ (R+B)| against |A|/M^(3/2)", rep.measured, Relation::Ge, rep.claimed, ok);
    Ok(rows.finish())
}

/// The `k` most popular nonzero differences of `A`, most popular first.
fn popular_shifts(a: &GSet, k: usize) -> Result<Vec<crate::group::Elem>> {
    let zero = a.group().zero();
    let mut sup: Vec<_> = autocorrelation(a)?.support().into_iter().filter(|(x, _)| *x != zero).collect();
    sup.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    Ok(sup.into_iter().take(k).map(|(x, _)| x).collect())
}

pub(crate) fn c34(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let d = diffset(a, a)?;
    let n = a.len() as f64;
    let k = d.len() as f64 / n;
    let lk = log2_floor1(k);
    let mut cands: Vec<(String, GSet)> = vec![("A".into(), a.clone()), ("A-A".into(), d.clone())];
    for s in popular_shifts(a, 8)? {
        cands.push((format!("A_{s}"), slice(a, &s)));
    }
    for s in popular_shifts(&d, 8)? {
        cands.push((format!("D_{s}"), slice(&d, &s)));
    }
    let size_floor = n / (k.powf(25.0 / 22.0) * lk);
    let mut best: Option<(String, f64, f64)> = None;
    for (name, b) in cands.into_iter().filter(|(_, b)| !b.is_empty()) {
        let bl = b.len() as f64;
        let sr = bl / size_floor;
        let er = additive_energy(&b, &b)? as f64 / (bl.powi(3) / (k.powf(21.0 / 22.0) * lk.powf(4.0 / 11.0)));
        if best.as_ref().map_or(true, |x| sr.min(er) > x.1.min(x.2)) {
            best = Some((name, sr, er));
        }
    }
    let mut rows = Rows::new("C34", &inp.label);
    rows.param("K", k);
    let (name, sr, er) = best.expect("A itself is a candidate");
    rows.report("best B: |B| against |A|/(K^(25/22) log K)", sr, Relation::Ge, 1.0)
        .with_witness(serde_json::Value::String(name.clone()));
    rows.report("best B: E(B) against |B|^3/(K^(21/22) log^(4/11) K)", er, Relation::Ge, 1.0)
        .with_witness(serde_json::Value::String(name));
    for sign in [Sign::Minus, Sign::Plus] {
        let shifts = match sign {
            Sign::Minus => d.clone(),
            Sign::Plus => sumset(a, a)?,
        };
        let mut ok = true;
        for s in shifts.iter() {
            ok &= katz_koester(a, s, sign)?.holds;
        }
        rows.flag(format!("A{sign}A_s embeds for every s"), ok);
    }
    Ok(rows.finish())
}

fn products(a: &GSet, b: &GSet) -> Result<GSet> {
    let mut v: Vec<i64> = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            let p = x.coords()[0]
                .checked_mul(y.coords()[0])
                .ok_or(Error::Overflow("product set"))?;
            v.push(p);
        }
    }
    GSet::from_ints(a.group(), &v)
}

pub(crate) fn c35(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let g = inp.a.group();
    if !g.is_lattice() || g.dim() != 1 {
        return Err(Error::Precondition("sum-product quantities need a set of integers".into()));
    }
    let zero = g.zero();
    let a = GSet::new(g, inp.a.iter().filter(|x| **x != zero).cloned())?;
    if a.len() < 2 {
        return Err(Error::Precondition("need at least two nonzero integers".into()));
    }
    let n = a.len() as f64;
    let aa = products(&a, &a)?;
    let m = aa.len() as f64 / n;
    let q = quotient_set_size(&a)? as f64;
    let mut rows = Rows::new("C35", &inp.label);
    rows.param("M", m);
    rows.param("|A/A|", q);

    let tab = autocorrelation(&a)?;
    let mut counts: Vec<i64> = tab.support().into_iter().filter(|(x, _)| *x != zero).map(|(_, c)| c).collect();
    counts.sort_unstable_by(|x, y| y.cmp(x));
    let scale = (m * log2_floor1(m)).powf(2.0 / 3.0) * n;
    let worst = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / (scale / ((i + 1) as f64).powf(1.0 / 3.0)))
        .fold(0.0, f64::max);
    rows.report("max_r (A∘A)(s_r) against (M log M)^(2/3)|A|/r^(1/3)", worst, Relation::Le, 1.0);

    let aa_a = sumset(&aa, &a)?.len() as f64;
    rows.report("|AA+A| against |A||A/A|^(1/2)/M^(1/2)", aa_a, Relation::Ge, n * q.sqrt() / m.sqrt());

    let e3 = mult_energy_k(&a, 3)? as f64;
    let m3 = e3 * q * q / n.powi(6);
    rows.param("M3", m3);
    let aa_aa = sumset(&aa, &aa)?.len() as f64;
    rows.report("|AA+AA| against |A/A|^(3/2)/M", aa_aa, Relation::Ge, q.powf(1.5) / m3);

    let s = sumset(&a, &a)?;
    let a_s = GSet::new(g, s.iter().filter(|x| **x != zero).cloned())?;
    let mixed = products(&a, &a_s)?.len() as f64;
    rows.report("|A(A+A)| against |A|^2/log|A| (no M power)", mixed, Relation::Ge, n * n / log2_floor1(n));

    if is_convex(&a) {
        let d = diffset(&a, &a)?.len() as f64;
        let e = energy_k(&a, 2)? as f64;
        let lhs = d * n.powf(285.0 / 8.0);
        let rhs = e.powi(15) * log2_floor1(n).powf(-7.5);
        rows.report("convex: |A-A||A|^(285/8) against E^15/log^(15/2)|A|", lhs, Relation::Ge, rhs);
    }
    Ok(rows.finish())
}

pub(crate) fn c37(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let g = a.group();
    let nn = g.require_cyclic("configurations")?.iter().product::<u64>() as u128;
    let mut coeffs: Vec<Vec<i64>> = (2..=4).map(|k| (0..k).collect()).collect();
    coeffs.push(vec![1, 2, 3]);
    coeffs.push(vec![1, -1, 2]);
    // A' = A ∩ (s* - A) with |A'| = (A*A)(s*) maximal.
    let conv = convolve_sets(a, a)?;
    let (s_star, best) = conv.support().into_iter().fold((g.zero(), 0i64), |acc, (x, c)| if c > acc.1 { (x, c) } else { acc });
    let mut rows = Rows::new("C37", &inp.label);
    for c in coeffs {
        let k = c.len() as u32;
        for sign in [Sign::Minus, Sign::Plus] {
            let base = match sign {
                Sign::Minus => a.len() as u128,
                Sign::Plus => best as u128,
            };
            let target = match sign {
                Sign::Minus => diffset(a, a)?,
                Sign::Plus => sumset(a, a)?,
            };
            let found = find_configuration(a, &c, sign)?;
            let label = format!("c={c:?}, A{sign}A");
            if let Some((x, d)) = &found {
                let ok = *d != g.zero() && c.iter().all(|&ci| target.contains(&g.op_add(x, &g.op_scale(ci, d))));
                rows.flag(format!("{label}: witness lies in A{sign}A"), ok);
            }
            let hyp = big(base).pow(k) > big(nn).pow(k - 1);
            if hyp {
                rows.flag(format!("{label}: configuration exists (|A'|^k > N^(k-1))"), found.is_some());
            } else {
                rows.report_if(
                    format!("{label}: found={} without the counting hypothesis", found.is_some()),
                    (base as f64).powi(k as i32),
                    Relation::Ge,
                    (nn as f64).powi(k as i32 - 1),
                    true,
                );
            }
            if sign == Sign::Plus {
                rows.param("s*", s_star.coords()[0] as f64);
            }
        }
    }
    Ok(rows.finish())
}
