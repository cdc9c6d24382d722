//! Convolution tables and the moment quantities built from them: `E_k`, `T_k`, `sigma_k`.

use std::collections::HashMap;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{fft_nd, to_complex};
use crate::group::{Elem, GroupSpec, Torus};
use crate::sets::{diffset, sumset, GSet};

/// Largest deviation from an integer tolerated on the FFT path.
pub const FFT_ROUNDING_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConvMode {
    /// FFT when `N >= 1024` and the pair count exceeds the transform cost, else direct.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// An integer-valued function on the group: dense over `G` for cyclic products,
/// dense over a bounding window `[lo, lo + dims)` in lattice mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvTable {
    group: GroupSpec,
    lo: Option<Vec<i64>>,
    dims: Vec<usize>,
    values: Vec<i64>,
    /// Set when the FFT result failed rounding validation and the direct path was used.
    pub fft_fallback: bool,
}

impl ConvTable {
    pub fn indicator(s: &GSet) -> Result<Self> {
        let g = s.group();
        if let Ok(t) = Torus::of(g) {
            let mut values = vec![0i64; t.n];
            for &i in s.indices() {
                values[i] = 1;
            }
            return Ok(ConvTable { group: g.clone(), lo: None, dims: t.dims, values, fft_fallback: false });
        }
        let d = g.dim();
        let Some((lo, hi)) = s.bounding_box() else {
            return Ok(ConvTable {
                group: g.clone(),
                lo: Some(vec![0; d]),
                dims: vec![1; d],
                values: vec![0],
                fft_fallback: false,
            });
        };
        let dims: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let t = window_torus(&dims)?;
        let mut values = vec![0i64; t.n];
        for e in s.iter() {
            values[window_index(&t, &lo, e.coords())] = 1;
        }
        Ok(ConvTable { group: g.clone(), lo: Some(lo), dims, values, fft_fallback: false })
    }

    /// Dense values on a cyclic group, in index order.
    pub fn from_dense(group: &GroupSpec, values: Vec<i64>) -> Result<Self> {
        let t = Torus::of(group)?;
        if values.len() != t.n {
            return Err(Error::DimensionMismatch { expected: t.n, got: values.len() });
        }
        Ok(ConvTable { group: group.clone(), lo: None, dims: t.dims, values, fft_fallback: false })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Raw dense values (cyclic: index order; lattice: window order).
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, x: &Elem) -> i64 {
        match &self.lo {
            None => self.values[Torus::new(&self.dims).index(x)],
            Some(lo) => {
                let mut idx = 0usize;
                let mut stride = 1usize;
                for k in (0..self.dims.len()).rev() {
                    let off = x.coords()[k] - lo[k];
                    if off < 0 || off as usize >= self.dims[k] {
                        return 0;
                    }
                    idx += off as usize * stride;
                    stride *= self.dims[k];
                }
                self.values[idx]
            }
        }
    }

    fn elem_at(&self, i: usize, t: &Torus) -> Elem {
        let c = t.coords(i);
        match &self.lo {
            None => Elem(c),
            Some(lo) => Elem(c.iter().zip(lo).map(|(a, b)| a + b).collect()),
        }
    }

    /// Nonzero entries in element order.
    pub fn support(&self) -> Vec<(Elem, i64)> {
        let t = Torus::new(&self.dims);
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (self.elem_at(i, &t), v))
            .collect()
    }

    pub fn total(&self) -> i64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> i64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// `sum_x f(x)^k` for a nonnegative table, exactly.
    pub fn power_sum(&self, k: u32) -> Result<u128> {
        let mut acc: u128 = 0;
        for &v in &self.values {
            if v < 0 {
                return Err(Error::Precondition("power sum of a signed table".into()));
            }
            if v == 0 {
                continue;
            }
            let p = (v as u128).checked_pow(k).ok_or(Error::Overflow("power sum"))?;
            acc = acc.checked_add(p).ok_or(Error::Overflow("power sum"))?;
        }
        Ok(acc)
    }

    pub fn power_sum_real(&self, k: f64) -> f64 {
        self.values.iter().filter(|&&v| v != 0).map(|&v| (v as f64).powf(k)).sum()
    }

    /// `f^c(x) = f(-x)`.
    pub fn reflect(&self) -> ConvTable {
        let t = Torus::new(&self.dims);
        let mut values = vec![0i64; t.n];
        match &self.lo {
            None => {
                for (i, &v) in self.values.iter().enumerate() {
                    values[t.neg(i)] = v;
                }
                ConvTable { values, ..self.clone() }
            }
            Some(lo) => {
                for (i, &v) in self.values.iter().enumerate() {
                    let c = t.coords(i);
                    let j: usize = c
                        .iter()
                        .zip(&self.dims)
                        .zip(&t.strides)
                        .map(|((&x, &d), &s)| (d - 1 - x as usize) * s)
                        .sum();
                    values[j] = v;
                }
                let lo2 = lo.iter().zip(&self.dims).map(|(&l, &d)| -(l + d as i64 - 1)).collect();
                ConvTable { lo: Some(lo2), values, ..self.clone() }
            }
        }
    }

    /// CSV with header `element,count`, one row per nonzero entry.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["element", "count"]).map_err(csv_err)?;
        for (e, v) in self.support() {
            w.write_record([e.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .map_err(|e| Error::Io(e.to_string()))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn window_torus(dims: &[usize]) -> Result<Torus> {
    let n = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
    match n {
        Some(n) if n <= crate::limits::Limits::default().cap_dense => Ok(Torus::new(dims)),
        _ => Err(Error::cap("lattice window", dims.iter().map(|&d| d as u128).product(), 1 << 26)),
    }
}

fn window_index(t: &Torus, lo: &[i64], x: &[i64]) -> usize {
    x.iter().zip(lo).zip(&t.strides).map(|((&a, &l), &s)| (a - l) as usize * s).sum()
}

fn sparse(values: &[i64]) -> Vec<(usize, i64)> {
    values.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, &v)| (i, v)).collect()
}

fn direct_cyclic(t: &Torus, f: &[i64], g: &[i64]) -> Vec<i64> {
    let (sf, sg) = (sparse(f), sparse(g));
    let mut out = vec![0i64; t.n];
    if t.dims.len() == 1 {
        let n = t.n;
        for &(i, a) in &sf {
            for &(j, b) in &sg {
                let k = if i + j >= n { i + j - n } else { i + j };
                out[k] += a * b;
            }
        }
    } else {
        for &(i, a) in &sf {
            for &(j, b) in &sg {
                out[t.add(i, j)] += a * b;
            }
        }
    }
    out
}

/// Rounded FFT convolution, `None` if any entry is farther than the tolerance from an integer.
fn fft_cyclic(t: &Torus, f: &[i64], g: &[i64]) -> Option<Vec<i64>> {
    let mut a = to_complex(f);
    let mut b = to_complex(g);
    fft_nd(&t.dims, &mut a, false);
    fft_nd(&t.dims, &mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_nd(&t.dims, &mut a, true);
    let scale = 1.0 / t.n as f64;
    let mut out = Vec::with_capacity(t.n);
    for z in &a {
        let v = z.re * scale;
        let r = v.round();
        if (v - r).abs() > FFT_ROUNDING_TOL || (z.im * scale).abs() > FFT_ROUNDING_TOL {
            return None;
        }
        out.push(r as i64);
    }
    Some(out)
}

fn conv_core(t: &Torus, f: &[i64], g: &[i64], mode: ConvMode) -> (Vec<i64>, bool) {
    let use_fft = match mode {
        ConvMode::Direct => false,
        ConvMode::Fft => true,
        ConvMode::Auto => {
            let nf = f.iter().filter(|&&v| v != 0).count() as f64;
            let ng = g.iter().filter(|&&v| v != 0).count() as f64;
            let n = t.n as f64;
            t.n >= 1024 && nf * ng > 4.0 * n * n.log2()
        }
    };
    if use_fft {
        match fft_cyclic(t, f, g) {
            Some(v) => return (v, false),
            None => {
                log::warn!("FFT convolution failed integer rounding check; using direct path");
                return (direct_cyclic(t, f, g), true);
            }
        }
    }
    (direct_cyclic(t, f, g), false)
}

/// `(f * g)(x) = sum_y f(y) g(x - y)`.
pub fn convolve_with(f: &ConvTable, g: &ConvTable, mode: ConvMode) -> Result<ConvTable> {
    if f.group != g.group {
        return Err(Error::GroupMismatch(f.group.to_string(), g.group.to_string()));
    }
    match (&f.lo, &g.lo) {
        (None, None) => {
            let t = Torus::new(&f.dims);
            let (values, fb) = conv_core(&t, &f.values, &g.values, mode);
            Ok(ConvTable {
                group: f.group.clone(),
                lo: None,
                dims: f.dims.clone(),
                values,
                fft_fallback: fb || f.fft_fallback || g.fft_fallback,
            })
        }
        (Some(lf), Some(lg)) => {
            let dims: Vec<usize> = f.dims.iter().zip(&g.dims).map(|(a, b)| a + b - 1).collect();
            let t = window_torus(&dims)?;
            let embed = |tab: &ConvTable| {
                let src = Torus::new(&tab.dims);
                let mut v = vec![0i64; t.n];
                for (i, &x) in tab.values.iter().enumerate() {
                    if x != 0 {
                        let c = src.coords(i);
                        let j: usize = c.iter().zip(&t.strides).map(|(&a, &s)| a as usize * s).sum();
                        v[j] = x;
                    }
                }
                v
            };
            let (values, fb) = conv_core(&t, &embed(f), &embed(g), mode);
            let lo = lf.iter().zip(lg).map(|(a, b)| a + b).collect();
            Ok(ConvTable {
                group: f.group.clone(),
                lo: Some(lo),
                dims,
                values,
                fft_fallback: fb || f.fft_fallback || g.fft_fallback,
            })
        }
        _ => Err(Error::Invariant("mixed table kinds".into())),
    }
}

pub fn convolve(f: &ConvTable, g: &ConvTable) -> Result<ConvTable> {
    convolve_with(f, g, ConvMode::Auto)
}

/// `(f ∘ g)(x) = sum_y f(y) g(y + x)`.
pub fn correlate_with(f: &ConvTable, g: &ConvTable, mode: ConvMode) -> Result<ConvTable> {
    convolve_with(&f.reflect(), g, mode)
}

pub fn correlate(f: &ConvTable, g: &ConvTable) -> Result<ConvTable> {
    correlate_with(f, g, ConvMode::Auto)
}

/// `(A ∘ B)(x) = |A ∩ (B - x)|`.
pub fn correlate_sets(a: &GSet, b: &GSet) -> Result<ConvTable> {
    a.check_same(b)?;
    correlate(&ConvTable::indicator(a)?, &ConvTable::indicator(b)?)
}

pub fn convolve_sets(a: &GSet, b: &GSet) -> Result<ConvTable> {
    a.check_same(b)?;
    convolve(&ConvTable::indicator(a)?, &ConvTable::indicator(b)?)
}

/// `A ∘ A`.
pub fn autocorrelation(a: &GSet) -> Result<ConvTable> {
    correlate_sets(a, a)
}

pub(crate) fn sumset_support(a: &GSet, b: &GSet) -> Result<Vec<usize>> {
    let c = convolve_sets(a, b)?;
    Ok(c.values.iter().enumerate().filter(|(_, &v)| v > 0).map(|(i, _)| i).collect())
}

/// `E_k(A) = sum_x (A∘A)(x)^k`; `E_1 = |A|^2`.
pub fn energy_k(a: &GSet, k: u32) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidArgument("energy order must be >= 1".into()));
    }
    autocorrelation(a)?.power_sum(k)
}

/// `E_k(A)` for real `k >= 1` (floating point).
pub fn energy_k_real(a: &GSet, k: f64) -> Result<f64> {
    if k.fract() == 0.0 && k >= 1.0 && k <= 64.0 {
        return Ok(energy_k(a, k as u32)? as f64);
    }
    if k < 1.0 {
        return Err(Error::InvalidArgument("energy order must be >= 1".into()));
    }
    Ok(autocorrelation(a)?.power_sum_real(k))
}

/// `E(A, B) = sum_x (A∘B)(x)^2`.
pub fn additive_energy(a: &GSet, b: &GSet) -> Result<u128> {
    correlate_sets(a, b)?.power_sum(2)
}

/// `E_k(A, B) = sum_x (A∘A)(x) (B∘B)(x)^(k-1)`.
pub fn energy_k_pair(a: &GSet, b: &GSet, k: u32) -> Result<u128> {
    a.check_same(b)?;
    if k == 0 {
        return Err(Error::InvalidArgument("energy order must be >= 1".into()));
    }
    let aa = autocorrelation(a)?;
    let bb = autocorrelation(b)?;
    let mut acc: u128 = 0;
    for (x, v) in aa.support() {
        let w = bb.get(&x);
        if w == 0 && k > 1 {
            continue;
        }
        let p = (w as u128).checked_pow(k - 1).ok_or(Error::Overflow("pair energy"))?;
        acc = acc.checked_add(v as u128 * p).ok_or(Error::Overflow("pair energy"))?;
    }
    Ok(acc)
}

/// `sum_x (A∘A)(x) (B∘B)(x)^(k-1)` for real `k`.
pub fn energy_pair_real(a: &GSet, b: &GSet, k: f64) -> Result<f64> {
    a.check_same(b)?;
    let aa = autocorrelation(a)?;
    let bb = autocorrelation(b)?;
    Ok(aa.support().iter().map(|(x, v)| *v as f64 * (bb.get(x) as f64).powf(k - 1.0)).sum())
}

/// The `k`-fold convolution `A * ... * A`.
pub fn conv_power(a: &GSet, k: u32) -> Result<ConvTable> {
    if k == 0 {
        return Err(Error::InvalidArgument("convolution power must be >= 1".into()));
    }
    let base = ConvTable::indicator(a)?;
    let mut acc = base.clone();
    for _ in 1..k {
        acc = convolve(&acc, &base)?;
    }
    Ok(acc)
}

/// `T_k(A) = sum_x (A *_k A)(x)^2`, the number of solutions of `a_1+..+a_k = a'_1+..+a'_k`.
pub fn t_k(a: &GSet, k: u32) -> Result<u128> {
    conv_power(a, k)?.power_sum(2)
}

/// `sigma_k(A)`: the number of `k`-tuples of `A` summing to zero.
pub fn sigma_k(a: &GSet, k: u32) -> Result<u128> {
    Ok(conv_power(a, k)?.get(&a.group().zero()) as u128)
}

/// Sorted-descending values of `A∘A` over its support.
pub fn level_sequence(a: &GSet) -> Result<Vec<u64>> {
    let mut v: Vec<u64> = autocorrelation(a)?.support().iter().map(|(_, c)| *c as u64).collect();
    v.sort_unstable_by(|x, y| y.cmp(x));
    Ok(v)
}

fn integers(a: &GSet) -> Result<Vec<i64>> {
    match a.group() {
        GroupSpec::Lattice { dim: 1 } => Ok(a.iter().map(|e| e.coords()[0]).collect()),
        _ => Err(Error::InvalidArgument("multiplicative quantities need a set of integers".into())),
    }
}

fn quotient_counts(a: &GSet) -> Result<HashMap<(i64, i64), u64>> {
    let xs: Vec<i64> = integers(a)?.into_iter().filter(|&x| x != 0).collect();
    let mut m = HashMap::new();
    for &p in &xs {
        for &q in &xs {
            let g = p.gcd(&q);
            let (mut n, mut d) = (p / g, q / g);
            if d < 0 {
                n = -n;
                d = -d;
            }
            *m.entry((n, d)).or_insert(0u64) += 1;
        }
    }
    Ok(m)
}

/// `E^x_k(A) = sum_q r_{A/A}(q)^k` over exact rational quotients of nonzero elements.
pub fn mult_energy_k(a: &GSet, k: u32) -> Result<u128> {
    let mut acc: u128 = 0;
    for &r in quotient_counts(a)?.values() {
        acc = acc
            .checked_add((r as u128).checked_pow(k).ok_or(Error::Overflow("multiplicative energy"))?)
            .ok_or(Error::Overflow("multiplicative energy"))?;
    }
    Ok(acc)
}

/// `|AA|`.
pub fn product_set_size(a: &GSet) -> Result<usize> {
    let xs = integers(a)?;
    let mut v: Vec<i128> = Vec::with_capacity(xs.len() * xs.len());
    for &p in &xs {
        for &q in &xs {
            v.push(p as i128 * q as i128);
        }
    }
    v.sort_unstable();
    v.dedup();
    Ok(v.len())
}

/// `|A/A|` over nonzero elements.
pub fn quotient_set_size(a: &GSet) -> Result<usize> {
    Ok(quotient_counts(a)?.len())
}

/// Normalized energies `kappa_k = E_k / |A|^(k+1)` with density and doubling constants.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyProfile {
    pub size: usize,
    pub kappa: Vec<(u32, f64)>,
    pub density: Option<f64>,
    pub doubling_diff: f64,
    pub doubling_sum: f64,
}

pub fn energy_profile(a: &GSet, kmax: u32) -> Result<EnergyProfile> {
    if a.is_empty() {
        return Err(Error::Empty("energy profile of the empty set"));
    }
    let aa = autocorrelation(a)?;
    let n = a.len() as f64;
    let kappa = (1..=kmax).map(|k| (k, aa.power_sum_real(k as f64) / n.powi(k as i32 + 1))).collect();
    Ok(EnergyProfile {
        size: a.len(),
        kappa,
        density: a.density(),
        doubling_diff: diffset(a, a)?.len() as f64 / n,
        doubling_sum: sumset(a, a)?.len() as f64 / n,
    })
}

impl EnergyProfile {
    fn kappa(&self, k: u32) -> Option<f64> {
        self.kappa.iter().find(|(j, _)| *j == k).map(|(_, v)| *v)
    }

    /// Violated monotonicity relations: `kappa_k >= kappa_{k-1}^((k-1)/(k-2))` and `kappa_k >= delta kappa_{k-1}`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let slack = 1e-9;
        for &(k, v) in &self.kappa {
            if k >= 3 {
                let p = self.kappa(k - 1).unwrap();
                let bound = p.powf((k - 1) as f64 / (k - 2) as f64);
                if v < bound * (1.0 - slack) {
                    out.push(format!("kappa_{k}={v} < kappa_{}^{}={bound}", k - 1, (k - 1) as f64 / (k - 2) as f64));
                }
            }
            if let (Some(d), true) = (self.density, k >= 2) {
                let bound = d * self.kappa(k - 1).unwrap();
                if v < bound * (1.0 - slack) {
                    out.push(format!("kappa_{k}={v} < delta*kappa_{}={bound}", k - 1));
                }
            }
        }
        out
    }
}

/// Rounded FFT power sum `(1/N) sum_xi |Â(xi)|^(2k)`, an independent route to `T_k`.
pub fn t_k_fourier(a: &GSet, k: u32) -> Result<f64> {
    let t = Torus::of(a.group())?;
    let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); t.n];
    for &i in a.indices() {
        v[i] = Complex64::new(1.0, 0.0);
    }
    fft_nd(&t.dims, &mut v, false);
    Ok(v.iter().map(|z| z.norm_sqr().powi(k as i32)).sum::<f64>() / t.n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(xs: &[i64]) -> GSet {
        GSet::from_ints(&GroupSpec::integers(), xs).unwrap()
    }

    #[test]
    fn small_energies() {
        let a = z(&[0, 1, 3]);
        let aa = autocorrelation(&a).unwrap();
        assert_eq!(aa.get(&Elem::new(&[0])), 3);
        for x in [-3, -2, -1, 1, 2, 3] {
            assert_eq!(aa.get(&Elem::new(&[x])), 1);
        }
        assert_eq!(aa.get(&Elem::new(&[4])), 0);
        assert_eq!(energy_k(&a, 1).unwrap(), 9);
        assert_eq!(energy_k(&a, 2).unwrap(), 15);
        assert_eq!(energy_k(&a, 3).unwrap(), 33);
        assert_eq!(energy_k(&a, 4).unwrap(), 87);
        assert_eq!(t_k(&a, 2).unwrap(), 15);
        assert_eq!(level_sequence(&a).unwrap(), vec![3, 1, 1, 1, 1, 1, 1]);
        let d = diffset(&a, &a).unwrap();
        assert_eq!(sigma_k(&d, 2).unwrap(), 7);
        let b = z(&[0, 1]);
        assert_eq!(energy_k_pair(&b, &b, 3).unwrap(), 10);
    }

    #[test]
    fn multiplicative() {
        let a = z(&[1, 2, 4]);
        assert_eq!(mult_energy_k(&a, 2).unwrap(), 19);
        assert_eq!(product_set_size(&a).unwrap(), 5);
        assert!(mult_energy_k(&GSet::from_ints(&GroupSpec::cyclic(7).unwrap(), &[1]).unwrap(), 2).is_err());
    }

    #[test]
    fn cyclic_t_k_closed_form() {
        let g = GroupSpec::cyclic(4).unwrap();
        let a = GSet::from_ints(&g, &[0, 2]).unwrap();
        for k in 1..5u32 {
            assert_eq!(t_k(&a, k).unwrap(), 1u128 << (2 * k - 1));
        }
    }

    #[test]
    fn fft_and_direct_agree() {
        let g = GroupSpec::cyclic(2048).unwrap();
        let a = GSet::from_ints(&g, &(0..700).map(|i| (i * i * 7 + 3 * i) % 2048).collect::<Vec<_>>()).unwrap();
        let fa = ConvTable::indicator(&a).unwrap();
        let x = correlate_with(&fa, &fa, ConvMode::Fft).unwrap();
        let y = correlate_with(&fa, &fa, ConvMode::Direct).unwrap();
        assert_eq!(x.values(), y.values());
        assert!(!x.fft_fallback);
    }

    #[test]
    fn lattice_window_reflect() {
        let a = GSet::from_coords(&GroupSpec::lattice(2).unwrap(), &[vec![0, 0], vec![2, -1], vec![1, 5]]).unwrap();
        let aa = autocorrelation(&a).unwrap();
        assert_eq!(aa.get(&a.group().zero()), 3);
        assert_eq!(aa.get(&Elem::new(&[2, -1])), 1);
        assert_eq!(aa.get(&Elem::new(&[-2, 1])), 1);
        assert_eq!(aa.get(&Elem::new(&[1, -6])), 1);
        assert_eq!(aa.total(), 9);
        let csv = aa.to_csv().unwrap();
        assert!(csv.starts_with("element,count\n\"-2,1\",1\n"));
    }
}
