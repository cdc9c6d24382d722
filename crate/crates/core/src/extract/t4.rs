use super::{slice, ExtractionReport, Stage};
use crate::error::{Error, Result};
use crate::group::Elem;
use crate::moments::{additive_energy, autocorrelation, correlate_sets, energy_k, t_k};
use crate::sets::{diffset, GSet};

#[derive(Clone, Copy, Debug)]
pub struct T4Options {
    /// Keep adding translates past the coverage target until the gain drops below `min_gain`.
    pub exhaust: bool,
    pub min_gain: usize,
}

impl Default for T4Options {
    fn default() -> Self {
        T4Options { exhaust: false, min_gain: 1 }
    }
}

/// Slice `B = A_s` maximizing `E(A, A_s) / (|A| |A_s|^2)` over `|A_s| > gamma |A| / 2`
/// (`gamma = E_3(A) / |A|^4`), then greedy translates `r + B` covering `A`.
pub fn small_t4_extract(a: &GSet, opts: T4Options) -> Result<ExtractionReport> {
    if a.is_empty() {
        return Err(Error::Empty("extraction from the empty set"));
    }
    let g = a.group();
    let n = a.len() as f64;
    let mut rep = ExtractionReport::new("smallT4", a)?;
    let k = diffset(a, a)?.len() as f64 / n;
    let t3 = t_k(a, 3)? as f64;
    let m = t3 * k * k / n.powi(5);
    let e2 = energy_k(a, 2)?;
    let e3 = energy_k(a, 3)?;
    let gamma = e3 as f64 / n.powi(4);
    rep.params.extend([("K".into(), k), ("M".into(), m), ("gamma".into(), gamma)]);
    rep.stages.push(Stage::info("energies", format!("T_3={t3}, E={e2}, E_3={e3}, K={k}, M={m}, gamma={gamma}")));

    // Compare E(A, A_s) / |A_s|^2 exactly by cross-multiplication.
    let aa = autocorrelation(a)?;
    let floor = gamma * n / 2.0;
    let mut best: Option<(Elem, GSet, u128)> = None;
    for (s, c) in aa.support() {
        if (c as f64) <= floor {
            continue;
        }
        let a_s = slice(a, &s);
        let e = additive_energy(a, &a_s)?;
        let bs = (a_s.len() * a_s.len()) as u128;
        let better = match &best {
            None => true,
            Some((_, b, eb)) => e * (b.len() * b.len()) as u128 > *eb * bs,
        };
        if better {
            best = Some((s, a_s, e));
        }
    }
    let (s, b, e_ab) = match best {
        Some(x) => x,
        None => {
            rep.stages.push(Stage::info("slice", "no slice above the gamma floor; B = A"));
            (g.zero(), a.clone(), additive_energy(a, a)?)
        }
    };
    let beta = e_ab as f64 / (n * (b.len() * b.len()) as f64);
    let beta_floor = e3 as f64 / (2.0 * n * e2 as f64);
    rep.params.insert("beta".into(), beta);
    rep.stages.push(Stage::check(
        "slice",
        beta >= beta_floor * (1.0 - 1e-9),
        format!("s={s}, |B|={}, beta={beta} >= E_3/(2|A|E) = {beta_floor}", b.len()),
    ));

    let target = n / m.powf(1.5);
    let mut rest = a.clone();
    let mut r = Vec::new();
    let mut covered = 0usize;
    loop {
        if rest.is_empty() {
            break;
        }
        // |(x + B) ∩ A'| = (B∘A')(x).
        let tab = correlate_sets(&b, &rest)?;
        let (x, gain) = tab.support().into_iter().fold((g.zero(), 0i64), |acc, (x, c)| if c > acc.1 { (x, c) } else { acc });
        if (gain as usize) < opts.min_gain.max(1) {
            break;
        }
        let hit = rest.intersection(&b.translate(&x));
        rest = rest.difference(&hit);
        covered += hit.len();
        r.push(x);
        if !opts.exhaust && covered as f64 >= target {
            break;
        }
    }
    let rset = GSet::new(g, r)?;
    let mut union = GSet::empty(g);
    for x in rset.iter() {
        union = union.union(&b.translate(x));
    }
    let cover = a.intersection(&union);
    rep.stages.push(Stage::check(
        "coverage",
        cover.len() == covered && cover.is_subset(a) && b.is_subset(a),
        format!("|R|={}, |A ∩ (R+B)|={} (target |A|/M^(3/2) = {target})", rset.len(), cover.len()),
    ));
    rep.set_result(cover.len() as f64, target);
    let bl = b.len() as f64;
    rep.ratios.insert("R-size".into(), rset.len() as f64 / (m.powf(1.5) * n / bl));
    rep.ratios.insert("B-size".into(), bl / (n / (k * m)));
    rep.ratios.insert("B-energy".into(), additive_energy(&b, &b)? as f64 / (bl.powi(3) / m.powf(4.5)));
    rep.outputs.insert("B".into(), b);
    rep.outputs.insert("R".into(), rset);
    rep.outputs.insert("covered".into(), cover);
    Ok(rep)
}
