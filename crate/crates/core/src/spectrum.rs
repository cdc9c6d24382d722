//! Discrete Fourier transform, large spectra and dissociativity.

use num_complex::Complex64;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::fft_nd;
use crate::group::{Elem, GroupSpec, Torus};
use crate::limits::Limits;
use crate::moments::{csv_err, ConvTable};
use crate::sets::GSet;

/// Slack when comparing `|Â(r)|` against `alpha |A|`.
pub const SPECTRUM_SLACK: f64 = 1e-9;

/// `f̂(xi) = sum_x f(x) e(-xi . x)`, indexed by the dual group (identified with `G`).
#[derive(Clone, Debug)]
pub struct SpectrumTable {
    group: GroupSpec,
    values: Vec<Complex64>,
}

impl SpectrumTable {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, xi: &Elem) -> Complex64 {
        self.values[Torus::of(&self.group).expect("cyclic").index(xi)]
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// CSV with header `xi,re,im,abs`.
    pub fn to_csv(&self) -> Result<String> {
        let t = Torus::of(&self.group)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["xi", "re", "im", "abs"]).map_err(csv_err)?;
        for (i, z) in self.values.iter().enumerate() {
            w.write_record([
                t.elem(i).to_string(),
                format!("{:.12}", z.re),
                format!("{:.12}", z.im),
                format!("{:.12}", z.norm()),
            ])
            .map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .map_err(|e| Error::Io(e.to_string()))
    }
}

/// Forward transform of an arbitrary complex function on a cyclic group.
pub fn dft_complex(group: &GroupSpec, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let t = Torus::of(group)?;
    if f.len() != t.n {
        return Err(Error::DimensionMismatch { expected: t.n, got: f.len() });
    }
    let mut v = f.to_vec();
    fft_nd(&t.dims, &mut v, false);
    Ok(v)
}

/// `sum_x f(x) e(+xi . x)`, i.e. the transform of `f^c`.
pub fn dft_conj_complex(group: &GroupSpec, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let t = Torus::of(group)?;
    if f.len() != t.n {
        return Err(Error::DimensionMismatch { expected: t.n, got: f.len() });
    }
    let mut v = f.to_vec();
    fft_nd(&t.dims, &mut v, true);
    Ok(v)
}

pub fn dft_table(f: &ConvTable) -> Result<SpectrumTable> {
    let g = f.group().clone();
    let v: Vec<Complex64> = f.values().iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
    let values = dft_complex(&g, &v)?;
    Ok(SpectrumTable { group: g, values })
}

pub fn dft(a: &GSet) -> Result<SpectrumTable> {
    a.group().require_cyclic("Fourier transform")?;
    dft_table(&ConvTable::indicator(a)?)
}

/// Relative Parseval residual `|sum |f|^2 - (1/N) sum |f̂|^2| / sum |f|^2`.
pub fn parseval_residual(f: &[Complex64], fhat: &[Complex64]) -> f64 {
    let lhs: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    let rhs: f64 = fhat.iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64;
    (lhs - rhs).abs() / lhs.max(1e-300)
}

/// `R_alpha(A) = {r : |Â(r)| >= alpha |A|}`.
pub fn large_spectrum(a: &GSet, alpha: f64) -> Result<GSet> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    let s = dft(a)?;
    let thr = alpha * a.len() as f64 - SPECTRUM_SLACK * a.len().max(1) as f64;
    let idx = s.values.iter().enumerate().filter(|(_, z)| z.norm() >= thr).map(|(i, _)| i);
    Ok(GSet::from_indices(a.group(), idx))
}

/// Subset sums seen so far; a new element keeps the family dissociated iff its shifted
/// copy of the sums is disjoint from them.
struct SubsetSums<'a> {
    g: &'a GroupSpec,
    sums: Vec<Elem>,
    seen: FxHashSet<Elem>,
}

impl<'a> SubsetSums<'a> {
    fn new(g: &'a GroupSpec) -> Self {
        let z = g.zero();
        let mut seen = FxHashSet::default();
        seen.insert(z.clone());
        SubsetSums { g, sums: vec![z], seen }
    }

    fn try_push(&mut self, x: &Elem) -> bool {
        let shifted: Vec<Elem> = self.sums.iter().map(|s| self.g.op_add(s, x)).collect();
        if shifted.iter().any(|s| self.seen.contains(s)) {
            return false;
        }
        for s in &shifted {
            self.seen.insert(s.clone());
        }
        self.sums.extend(shifted);
        true
    }

    fn pop(&mut self) {
        let half = self.sums.len() / 2;
        for s in self.sums.drain(half..) {
            self.seen.remove(&s);
        }
    }
}

/// No nontrivial `sum eps_j lambda_j = 0` with `eps_j ∈ {-1, 0, 1}`.
pub fn dissociated_test(l: &GSet) -> Result<bool> {
    if l.len() > 40 {
        return Err(Error::cap("dissociativity test size", l.len() as u128, 40));
    }
    let mut s = SubsetSums::new(l.group());
    Ok(l.iter().all(|x| s.try_push(x)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Dimension {
    pub dim: usize,
    pub witness: GSet,
}

struct MaxSearch<'a> {
    elems: &'a [Elem],
    sums: SubsetSums<'a>,
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl MaxSearch<'_> {
    fn run(&mut self, i: usize) {
        if self.chosen.len() + (self.elems.len() - i) <= self.best.len() {
            return;
        }
        if i == self.elems.len() {
            return;
        }
        if self.sums.try_push(&self.elems[i]) {
            self.chosen.push(i);
            if self.chosen.len() > self.best.len() {
                self.best = self.chosen.clone();
            }
            self.run(i + 1);
            self.chosen.pop();
            self.sums.pop();
        }
        self.run(i + 1);
    }
}

/// Largest dissociated subset; among maximal ones the lexicographically first.
pub fn dim_exact(q: &GSet, limits: &Limits) -> Result<Dimension> {
    if q.len() > limits.cap_dim {
        return Err(Error::cap("exact dimension |Q|", q.len() as u128, limits.cap_dim as u128));
    }
    let mut s = MaxSearch { elems: q.elems(), sums: SubsetSums::new(q.group()), chosen: Vec::new(), best: Vec::new() };
    s.run(0);
    let witness = GSet::new(q.group(), s.best.iter().map(|&i| q.elems()[i].clone()))?;
    Ok(Dimension { dim: s.best.len(), witness })
}

/// Greedy scan in element order; a lower bound on the dimension.
pub fn dim_greedy(q: &GSet) -> Result<Dimension> {
    let mut s = SubsetSums::new(q.group());
    let kept: Vec<Elem> = q.iter().filter(|x| s.try_push(x)).cloned().collect();
    Ok(Dimension { dim: kept.len(), witness: GSet::new(q.group(), kept)? })
}

/// `T_k(Λ)` for a set of frequencies.
pub fn spectrum_energy_t_k(lambda: &GSet, k: u32) -> Result<u128> {
    crate::moments::t_k(lambda, k)
}
