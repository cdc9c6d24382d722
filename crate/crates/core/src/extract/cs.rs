use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{almost_period_check, ExtractionReport, Stage};
use crate::error::{Error, Result};
use crate::group::Torus;
use crate::moments::{convolve_sets, energy_k};
use crate::sets::{diffset, GSet};

#[derive(Clone, Copy, Debug)]
pub struct CsOptions {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Shifts kept for the pair search (largest `A'_s` first).
    pub max_shifts: usize,
}

impl Default for CsOptions {
    fn default() -> Self {
        CsOptions { k: 4, trials: 200, seed: 0, max_shifts: 64 }
    }
}

struct Approx<'a> {
    t: Torus,
    b: &'a [usize],
    target: Vec<i128>,
    a_len: i128,
    k: i128,
    budget: i128,
}

impl Approx<'_> {
    /// `k^2 ||mu_X * B - A * B||^2` with `mu_X` the multiset `X` weighted by `|A|/k`.
    fn distance(&self, xs: &[usize]) -> i128 {
        let mut h = vec![0i128; self.t.n];
        for &x in xs {
            for &y in self.b {
                h[self.t.add(x, y)] += 1;
            }
        }
        h.iter().zip(&self.target).map(|(&v, &c)| (self.a_len * v - self.k * c).pow(2)).sum()
    }

    fn approximates(&self, xs: &[usize]) -> bool {
        self.distance(xs) <= self.budget
    }
}

/// Sampled almost-period search: `k`-sequences `X` from `A` (with repetition), shifts
/// `s = X - Δ(x_1)` of the approximating ones, `A'_s = {a : s + Δ(a) ⊆ A^k approximates}`,
/// and `T = (A'_{s0} - A'_{t0}) - (a_0 - b_0)` for the best pair, each element checked exactly
/// against `32 |A|^2 |B| / k`.
pub fn cs_period_search(a: &GSet, b: &GSet, opts: CsOptions) -> Result<ExtractionReport> {
    a.check_same(b)?;
    let g = a.group();
    let t = Torus::of(g)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("almost periods of empty sets"));
    }
    if opts.k == 0 || opts.trials == 0 {
        return Err(Error::InvalidArgument("k and trials must be positive".into()));
    }
    let (na, nb, k) = (a.len() as i128, b.len() as i128, opts.k as i128);
    let conv = convolve_sets(a, b)?;
    let approx = Approx {
        t: t.clone(),
        b: b.indices(),
        target: conv.values().iter().map(|&v| v as i128).collect(),
        a_len: na,
        k,
        budget: 2 * na * na * nb * k,
    };
    let mut rep = ExtractionReport::new("cs", a)?;
    rep.seed = Some(opts.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let idx = a.indices();
    let mut hits = 0usize;
    let mut shifts: BTreeSet<Vec<usize>> = BTreeSet::new();
    for _ in 0..opts.trials {
        let xs: Vec<usize> = (0..opts.k).map(|_| idx[rng.gen_range(0..idx.len())]).collect();
        if approx.approximates(&xs) {
            hits += 1;
            shifts.insert(xs.iter().map(|&x| t.sub(x, xs[0])).collect());
        }
    }
    let rate = hits as f64 / opts.trials as f64;
    let sigma = (0.25 / opts.trials as f64).sqrt();
    rep.params.extend([("k".into(), opts.k as f64), ("trials".into(), opts.trials as f64), ("rate".into(), rate)]);
    rep.stages.push(Stage::check(
        "approximation-rate",
        rate >= 0.5 - 3.0 * sigma,
        format!("{hits}/{} samples approximate (rate {rate}, floor 1/2 - 3 sigma = {})", opts.trials, 0.5 - 3.0 * sigma),
    ));
    if hits == 0 {
        return Err(Error::Precondition(format!("no approximating sample in {} trials", opts.trials)));
    }

    let mut slices: Vec<(Vec<usize>, Vec<usize>)> = shifts
        .into_iter()
        .map(|s| {
            let good: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&x| {
                    let xs: Vec<usize> = s.iter().map(|&y| t.add(y, x)).collect();
                    xs.iter().all(|&y| a.contains_index(y)) && approx.approximates(&xs)
                })
                .collect();
            (s, good)
        })
        .collect();
    // Stable: equal sizes keep shift order.
    slices.sort_by(|x, y| y.1.len().cmp(&x.1.len()));
    slices.truncate(opts.max_shifts);
    let sets: Vec<GSet> = slices.iter().map(|(_, v)| GSet::from_indices(g, v.iter().copied())).collect();
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            let d = diffset(&sets[i], &sets[j])?.len();
            if best.map_or(true, |b| d > b.2) {
                best = Some((i, j, d));
            }
        }
    }
    let (i0, j0, _) = best.expect("at least one approximating shift");
    let (s0, t0) = (&sets[i0], &sets[j0]);
    let a0 = s0.elems()[0].clone();
    let b0 = t0.elems()[0].clone();
    let shift = g.op_sub(&a0, &b0);
    let raw = diffset(s0, t0)?.translate(&g.op_neg(&shift));
    let cap = 32 * na * na * nb;
    let mut valid = Vec::new();
    let mut violators = Vec::new();
    for x in raw.iter() {
        let l2 = almost_period_check(a, b, x)? as i128;
        if l2 * k <= cap {
            valid.push(x.clone());
        } else {
            violators.push(x.clone());
        }
    }
    rep.stages.push(Stage::check(
        "period-validation",
        violators.is_empty(),
        format!(
            "{} of {} shifts within 32|A|^2|B|/k = {}; shift a0-b0 = {shift}",
            valid.len(),
            raw.len(),
            cap as f64 / k as f64
        ),
    ));
    let n = na as f64;
    let kk = diffset(a, a)?.len() as f64 / n;
    let e = energy_k(a, 2 * opts.k as u32 + 2)? as f64;
    let m = e * kk.powi(2 * opts.k as i32 + 1) / n.powi(2 * opts.k as i32 + 3);
    rep.params.extend([("K".into(), kk), ("M".into(), m)]);
    let tset = GSet::new(g, valid)?;
    rep.set_result(tset.len() as f64, kk * n / (16.0 * m));
    rep.outputs.insert("shift".into(), GSet::new(g, [shift])?);
    rep.outputs.insert("A's0".into(), s0.clone());
    rep.outputs.insert("A't0".into(), t0.clone());
    rep.outputs.insert("violators".into(), GSet::new(g, violators)?);
    rep.outputs.insert("T".into(), tset);
    Ok(rep)
}
