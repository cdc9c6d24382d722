use super::{big, need_nonempty, CheckInput, CheckResult, Relation, Rows};
use crate::eigen::{autocorrelation_function, is_prime, subgroup_eigencheck};
use crate::error::{Error, Result};
use crate::genset::{gen, is_mult_closed, SetRecipe};
use crate::limits::Limits;
use crate::moments::{correlate_sets, energy_k, energy_k_pair};
use crate::sets::{diffset, iterated_sumset, magnification_k, sumset, GSet, Sign};

/// `p` when `A` is a multiplicative subgroup of `Z/p`, `p` prime.
fn subgroup_prime(a: &GSet) -> Result<u64> {
    let p = match a.group().moduli() {
        Some(&[p]) if is_prime(p) => p,
        _ => return Err(Error::Precondition("needs a subgroup of Z/p with p prime".into())),
    };
    let zero = a.group().zero();
    if a.contains(&zero) || !is_mult_closed(a) {
        return Err(Error::Precondition("set is not a multiplicative subgroup".into()));
    }
    Ok(p)
}

fn ints(a: &GSet) -> Vec<u64> {
    a.iter().map(|x| x.coords()[0] as u64).collect()
}

fn scale(a: &GSet, g: u64, p: u64) -> GSet {
    let xs: Vec<i64> = ints(a).iter().map(|&x| (x * g % p) as i64).collect();
    GSet::from_ints(a.group(), &xs).expect("residues are valid")
}

/// Smallest nonzero residue outside `Γ`, if `Γ ≠ F_p^*`.
fn coset_rep(gamma: &GSet, p: u64) -> Option<u64> {
    (1..p).find(|&x| !gamma.contains(&gamma.group().elem(&[x as i64]).expect("residue")))
}

fn log2_floor1(x: f64) -> f64 {
    x.log2().max(1.0)
}

pub(crate) fn c25(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let gamma = &inp.a;
    let p = subgroup_prime(gamma)?;
    let mut indicator = vec![0.0; p as usize];
    for x in ints(gamma) {
        indicator[x as usize] = 1.0;
    }
    let mut rows = Rows::new("C25", &inp.label);
    rows.param("p", p as f64);
    for (name, phi) in [("phi = Γ∘Γ", autocorrelation_function(gamma)?), ("phi = Γ", indicator)] {
        let r = subgroup_eigencheck(gamma, &phi, 32, inp.seed)?;
        rows.real_tol(format!("{name}: characters are eigenfunctions"), r.max_residual, Relation::Le, 1e-8, 0.0);
        rows.real(format!("{name}: trivial eigenvalue normalization"), r.normalization_ratio, Relation::Eq, 1.0);
        if let Some(top) = r.trivial_is_max {
            rows.flag(format!("{name}: trivial character attains the maximum"), top);
        }
        if let Some(slack) = r.connected_min_slack {
            rows.real_tol(format!("{name}: connectedness over random u"), slack, Relation::Ge, 0.0, 1e-9);
        }
        if let Some(res) = r.connected_equality_residual {
            rows.real_tol(format!("{name}: connectedness equality at u = Γ"), res, Relation::Le, 0.0, 1e-9);
        }
    }
    Ok(rows.finish())
}

/// `Γ`-invariant test sets: `Γ`, a second coset, and their union.
fn invariant_sets(gamma: &GSet, p: u64) -> Vec<(&'static str, GSet)> {
    let mut out = vec![("Γ", gamma.clone())];
    if let Some(g) = coset_rep(gamma, p) {
        let c = scale(gamma, g, p);
        out.push(("gΓ", c.clone()));
        out.push(("Γ∪gΓ", gamma.union(&c)));
    }
    out
}

pub(crate) fn c26(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let gamma = &inp.a;
    let p = subgroup_prime(gamma)?;
    let t = gamma.len() as f64;
    let qs = invariant_sets(gamma, p);
    let mut rows = Rows::new("C26", &inp.label);
    rows.param("|Γ|", t);
    rows.param("p", p as f64);
    let mut triples = vec![(0usize, 0usize, 0usize)];
    if qs.len() > 1 {
        triples.extend([(1, 0, 0), (0, 1, 1), (2, 2, 2)]);
    }
    for (i, j, l) in triples {
        let (q, q1, q2) = (&qs[i].1, &qs[j].1, &qs[l].1);
        let tab = correlate_sets(q1, q2)?;
        let lhs: i64 = q.iter().map(|x| tab.get(x)).sum();
        let rhs = t.powf(-1.0 / 3.0) * ((q.len() * q1.len() * q2.len()) as f64).powf(2.0 / 3.0);
        rows.report(format!("Q={}, Q1={}, Q2={}", qs[i].0, qs[j].0, qs[l].0), lhs as f64, Relation::Le, rhs);
    }
    let e = energy_k(gamma, 2)? as f64;
    for sign in [Sign::Plus, Sign::Minus] {
        let s = match sign {
            Sign::Plus => sumset(gamma, gamma)?,
            Sign::Minus => diffset(gamma, gamma)?,
        };
        let rhs = t.powf(23.0 / 12.0) * (s.len() as f64).powf(1.0 / 3.0) * log2_floor1(t).sqrt();
        rows.report(format!("E(Γ) against |Γ{sign}Γ|"), e, Relation::Le, rhs);
    }
    Ok(rows.finish())
}

pub(crate) fn c27(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let gamma = &inp.a;
    let p = subgroup_prime(gamma)?;
    let t = gamma.len();
    let tf = t as f64;
    let mut rows = Rows::new("C27", &inp.label);
    rows.param("|Γ|", tf);
    rows.param("p", p as f64);
    let half = super::head(gamma, t.div_ceil(2));
    for (name, sub) in [("Γ'=Γ", gamma.clone()), ("Γ'=half", half)] {
        let s = sumset(gamma, &sub)?.len() as f64;
        rows.report(name, s, Relation::Ge, sub.len() as f64 * (tf / log2_floor1(tf)).sqrt());
    }
    if t <= 10 {
        for k in 2..=3u32 {
            let r = magnification_k(gamma, gamma, k as usize, limits)?;
            rows.report(format!("R^(k)_Γ[Γ], k={k}"), r.value(), Relation::Ge, tf.powf(k as f64 - 0.5));
        }
    }
    // Exact forms for a coset Γ_* and Γ-invariant Q.
    let qs = invariant_sets(gamma, p);
    let cosets: Vec<(&str, GSet)> = qs.iter().take(2).map(|(n, s)| (*n, s.clone())).collect();
    for (cn, cs) in &cosets {
        for (qn, q) in &qs {
            let e2 = big(energy_k_pair(cs, q, 2)?);
            let ql = big(q.len() as u128);
            for (sn, sub) in [("all", cs.clone()), ("half", super::head(cs, t.div_ceil(2)))] {
                let lhs = big(sumset(q, &sub)?.len() as u128) * &e2;
                let rhs = big(sub.len() as u128) * big(t as u128) * ql.pow(2);
                rows.exact(format!("|Q+Γ'|, Γ_*={cn}, Q={qn}, Γ'={sn}"), lhs, Relation::Ge, rhs);
            }
            for k in 2..=3u32 {
                if cs.len() > limits.cap_subsets.min(10) || (q.len() as u128).pow(k) > 100_000 {
                    continue;
                }
                let r = magnification_k(cs, q, k as usize, limits)?;
                let (num, den) = (*r.ratio.numer() as u128, *r.ratio.denom() as u128);
                let ek = big(energy_k_pair(cs, q, k + 1)?);
                rows.exact(
                    format!("R^(k)_Q[Γ_*], Γ_*={cn}, Q={qn}, k={k}"),
                    big(num) * ek,
                    Relation::Ge,
                    big(den) * big(t as u128) * ql.pow(2 * k),
                );
            }
        }
    }
    Ok(rows.finish())
}

pub(crate) fn c36(inp: &CheckInput, _: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let gamma = &inp.a;
    let p = subgroup_prime(gamma)?;
    let six = iterated_sumset(gamma, 6)?;
    let zero = gamma.group().zero();
    let hit = six.iter().filter(|x| **x != zero).count();
    let mut rows = Rows::new("C36", &inp.label);
    rows.param("p", p as f64);
    rows.param("kappa", (gamma.len() as f64).ln() / (p as f64).ln());
    rows.param("minus one in Γ", if gamma.contains(&gamma.group().elem(&[p as i64 - 1])?) { 1.0 } else { 0.0 });
    rows.report("|6Γ ∩ F_p^*| against p - 1", hit as f64, Relation::Ge, (p - 1) as f64);
    Ok(rows.finish())
}

/// Largest `k` with `k 2^k < sqrt(p)`.
pub fn predicted_qr_depth(p: u64) -> u32 {
    let r = (p as f64).sqrt();
    (1..64u32).take_while(|&k| (k as f64) * 2f64.powi(k as i32) < r).last().unwrap_or(0)
}

pub(crate) fn c38(inp: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    need_nonempty(inp)?;
    let a = &inp.a;
    let p = subgroup_prime(a)?;
    if p < 5 {
        return Err(Error::Precondition("quadratic residue depth needs p >= 5".into()));
    }
    if gen(&SetRecipe::Qr { p })? != *a {
        return Err(Error::Precondition("set is not the quadratic residues".into()));
    }
    let mut depth = 0usize;
    let mut scan_limited = true;
    while (p as u128).pow(depth as u32 + 1) <= 300_000 {
        if crate::sets::basis_depth_test(a, depth + 1, Sign::Minus, limits)?.is_basis {
            depth += 1;
        } else {
            scan_limited = false;
            break;
        }
    }
    let predicted = predicted_qr_depth(p);
    let mut rows = Rows::new("C38", &inp.label);
    rows.param("p", p as f64);
    rows.param("scan limited", if scan_limited { 1.0 } else { 0.0 });
    rows.report("empirical depth against predicted depth", depth as f64, Relation::Ge, predicted as f64);
    Ok(rows.finish())
}
