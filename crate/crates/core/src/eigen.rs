//! Pattern Gram matrices, their spectra, the operator `T^φ_ψ`, and subgroup eigenfunctions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Torus};
use crate::limits::Limits;
use crate::moments::{autocorrelation, energy_k_pair, ConvTable};
use crate::sets::{GSet, Sign, TupleSet};
use crate::spectrum::{dft_complex, dft_conj_complex};

/// Relative tolerance for the spectral invariants.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Absolute slack on the `λ_1^2` lower bound.
pub const LAMBDA_SLACK: f64 = 1e-9;
/// Jacobi stops once the off-diagonal norm is below this fraction of the Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-10;

/// Gram matrix `gram(y, y') = (B∘B)(y - y')^k` over `y, y' ∈ A`.
#[derive(Clone, Debug, Serialize)]
pub struct PatternGram {
    pub a_size: usize,
    pub b_size: usize,
    pub k: u32,
    pub entries: Vec<u128>,
    pub trace: u128,
    pub frobenius_sq: u128,
    /// `E_{2k+1}(A, B)` computed from the moments module.
    pub energy_2k1: u128,
    /// `E_{k+1}(A, B)`.
    pub energy_k1: u128,
}

impl PatternGram {
    pub fn n(&self) -> usize {
        self.a_size
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&x| x as f64).collect()
    }
}

pub fn build_gram(a: &GSet, b: &GSet, k: u32, limits: &Limits) -> Result<PatternGram> {
    a.check_same(b)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("pattern matrix of an empty set"));
    }
    if a.len() > limits.cap_gram {
        return Err(Error::cap("Gram size |A|", a.len() as u128, limits.cap_gram as u128));
    }
    let g = a.group();
    let bb = autocorrelation(b)?;
    let n = a.len();
    let mut entries = vec![0u128; n * n];
    for (i, y) in a.iter().enumerate() {
        for (j, y2) in a.iter().enumerate() {
            let c = bb.get(&g.op_sub(y, y2)) as u128;
            entries[i * n + j] = c.checked_pow(k).ok_or(Error::Overflow("Gram entry"))?;
        }
    }
    let trace: u128 = (0..n).map(|i| entries[i * n + i]).sum();
    let frobenius_sq = entries
        .iter()
        .try_fold(0u128, |acc, &x| x.checked_mul(x).and_then(|s| acc.checked_add(s)))
        .ok_or(Error::Overflow("Gram Frobenius norm"))?;
    let expect_trace = n as u128 * (b.len() as u128).pow(k);
    if trace != expect_trace {
        return Err(Error::Invariant(format!("Gram trace {trace} != |A||B|^k = {expect_trace}")));
    }
    let energy_2k1 = energy_k_pair(a, b, 2 * k + 1)?;
    if frobenius_sq != energy_2k1 {
        return Err(Error::Invariant(format!("Gram Frobenius^2 {frobenius_sq} != E_2k+1 = {energy_2k1}")));
    }
    let energy_k1 = energy_k_pair(a, b, k + 1)?;
    Ok(PatternGram { a_size: n, b_size: b.len(), k, entries, trace, frobenius_sq, energy_2k1, energy_k1 })
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations, sorted descending.
pub fn jacobi_eigenvalues(m: &[f64], n: usize, max_sweeps: usize) -> Result<Vec<f64>> {
    if m.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: m.len() });
    }
    let mut a = m.to_vec();
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[p * n + q] * a[p * n + q];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL * norm {
        if sweeps == max_sweeps {
            return Err(Error::NonConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(ev)
}

/// Spectrum report: the eigenvalues `λ_j^2` of the Gram plus invariant checks.
#[derive(Clone, Debug, Serialize)]
pub struct SingularSpectrum {
    pub a_size: usize,
    pub b_size: usize,
    pub k: u32,
    pub lambdas_sq: Vec<f64>,
    pub trace_check: bool,
    pub frobenius_check: bool,
    pub lambda1_check: bool,
}

impl SingularSpectrum {
    pub fn lambda1_sq(&self) -> f64 {
        self.lambdas_sq[0]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a_size": self.a_size,
            "b_size": self.b_size,
            "k": self.k,
            "lambdas_sq": self.lambdas_sq,
            "trace_check": self.trace_check,
            "frobenius_check": self.frobenius_check,
        })
    }
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

pub fn singular_spectrum(g: &PatternGram, limits: &Limits) -> Result<SingularSpectrum> {
    let lambdas_sq = jacobi_eigenvalues(&g.to_f64(), g.n(), limits.max_sweeps)?;
    let s2: f64 = lambdas_sq.iter().sum();
    let s4: f64 = lambdas_sq.iter().map(|x| x * x).sum();
    let trace_check = rel_close(s2, g.trace as f64, SPECTRAL_TOL);
    let frobenius_check = rel_close(s4, g.frobenius_sq as f64, SPECTRAL_TOL);
    let low = g.energy_k1 as f64 / g.a_size as f64;
    let lambda1_check = lambdas_sq[0] >= low - LAMBDA_SLACK * low.max(1.0);
    Ok(SingularSpectrum { a_size: g.a_size, b_size: g.b_size, k: g.k, lambdas_sq, trace_check, frobenius_check, lambda1_check })
}

#[derive(Clone, Debug, Serialize)]
pub struct MagnificationBounds {
    /// `|B|^{2k} / λ_1^2`.
    pub bound_eig: f64,
    /// `|B|^{2k} / sqrt(E_{2k+1}(A, B))`.
    pub bound_energy: f64,
    pub lambda1_sq: f64,
}

pub fn magnification_lower_bounds(a: &GSet, b: &GSet, k: u32, limits: &Limits) -> Result<MagnificationBounds> {
    let g = build_gram(a, b, k, limits)?;
    let s = singular_spectrum(&g, limits)?;
    let top = (b.len() as f64).powi(2 * k as i32);
    Ok(MagnificationBounds {
        bound_eig: top / s.lambda1_sq(),
        bound_energy: top / (g.energy_2k1 as f64).sqrt(),
        lambda1_sq: s.lambda1_sq(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionBound {
    /// `(sum_y |B^(y)|)^2 / E_{k+1}(A, B)`.
    pub bound: f64,
    /// `|∪_y (B^(y) ∓ Δ(y))|` materialized.
    pub union_size: usize,
}

/// Lower bound for `|∪_{y ∈ A1} (B^(y) ∓ Δ(y))|` with `B^(y) ⊆ B^k`.
pub fn union_family_lower_bound(
    a1: &GSet,
    family: &[TupleSet],
    a: &GSet,
    b: &GSet,
    k: u32,
    sign: Sign,
) -> Result<UnionBound> {
    a.check_same(b)?;
    a1.check_same(a)?;
    if !a1.is_subset(a) {
        return Err(Error::Precondition("A1 is not a subset of A".into()));
    }
    if family.len() != a1.len() {
        return Err(Error::DimensionMismatch { expected: a1.len(), got: family.len() });
    }
    let g = a.group();
    let mut total = 0u128;
    let mut all: Vec<Vec<crate::group::Elem>> = Vec::new();
    for (y, fam) in a1.iter().zip(family) {
        if fam.arity() != k as usize {
            return Err(Error::DimensionMismatch { expected: k as usize, got: fam.arity() });
        }
        for t in fam.iter() {
            if !t.iter().all(|x| b.contains(x)) {
                return Err(Error::Precondition("family member not inside B^k".into()));
            }
            all.push(t.iter().map(|x| sign.apply(g, x, y)).collect());
        }
        total += fam.len() as u128;
    }
    let union_size = TupleSet::new(g, k as usize, all)?.len();
    let e = energy_k_pair(a, b, k + 1)?;
    Ok(UnionBound { bound: (total as f64).powi(2) / e as f64, union_size })
}

fn cyclic_conv(t: &Torus, f: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    let mut a = f.to_vec();
    let mut b = h.to_vec();
    crate::fourier::fft_nd(&t.dims, &mut a, false);
    crate::fourier::fft_nd(&t.dims, &mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    crate::fourier::fft_nd(&t.dims, &mut a, true);
    let s = 1.0 / t.n as f64;
    a.iter().map(|z| z * s).collect()
}

/// `(T^φ_ψ f)(x) = ψ(x) (φ̂^c * f)(x)`.
pub fn operator_apply(group: &GroupSpec, phi: &[Complex64], psi: &[Complex64], f: &[Complex64]) -> Result<Vec<Complex64>> {
    let t = Torus::of(group)?;
    for v in [phi, psi, f] {
        if v.len() != t.n {
            return Err(Error::DimensionMismatch { expected: t.n, got: v.len() });
        }
    }
    let kernel = dft_conj_complex(group, phi)?;
    let c = cyclic_conv(&t, &kernel, f);
    Ok(c.iter().zip(psi).map(|(x, p)| x * p).collect())
}

/// Relative residual of `<T̄^φ_E u, v> = sum_x φ(x) û(x) conj(v̂(x))`; with `support`,
/// `u` and `v` must vanish outside it and `ψ` is its indicator.
pub fn bilinear_residual(
    group: &GroupSpec,
    phi: &[Complex64],
    u: &[Complex64],
    v: &[Complex64],
    support: Option<&GSet>,
) -> Result<f64> {
    let t = Torus::of(group)?;
    let psi: Vec<Complex64> = match support {
        Some(e) => {
            for (i, (x, y)) in u.iter().zip(v).enumerate() {
                if !e.contains_index(i) && (x.norm() > 0.0 || y.norm() > 0.0) {
                    return Err(Error::Precondition("u or v supported outside E".into()));
                }
            }
            (0..t.n).map(|i| Complex64::new(if e.contains_index(i) { 1.0 } else { 0.0 }, 0.0)).collect()
        }
        None => vec![Complex64::new(1.0, 0.0); t.n],
    };
    let tu = operator_apply(group, phi, &psi, u)?;
    let lhs: Complex64 = tu.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    let uh = dft_complex(group, u)?;
    let vh = dft_complex(group, v)?;
    let rhs: Complex64 = phi.iter().zip(&uh).zip(&vh).map(|((p, a), b)| p * a * b.conj()).sum();
    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    Ok((lhs - rhs).norm() / scale)
}

/// Matrix of `T̄^φ_E` on functions supported on `E`: `m[x][y] = φ̂^c(x - y)` for `x, y ∈ E`.
pub fn operator_matrix(phi: &[Complex64], e: &GSet) -> Result<Vec<Complex64>> {
    let t = Torus::of(e.group())?;
    let kernel = dft_conj_complex(e.group(), phi)?;
    let idx = e.indices();
    let mut m = Vec::with_capacity(idx.len() * idx.len());
    for &x in idx {
        for &y in idx {
            m.push(kernel[t.sub(x, y)]);
        }
    }
    Ok(m)
}

/// Largest `|m[x][y] - m[y][x]|` relative to the largest entry.
pub fn asymmetry(m: &[Complex64], n: usize) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[i * n + j] - m[j * n + i]).norm());
        }
    }
    worst / scale
}

/// Smallest primitive root modulo a prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(1);
    }
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .ok_or_else(|| Error::Invariant("no primitive root".into()))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut x = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * x % m128;
        }
        x = x * x % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// The subgroup `{g^{nl}}` listed in exponent order `l = 0..t-1`.
fn subgroup_orbit(gamma: &GSet) -> Result<(u64, Vec<u64>)> {
    let moduli = gamma.group().require_cyclic("multiplicative subgroups")?;
    if moduli.len() != 1 || !is_prime(moduli[0]) {
        return Err(Error::InvalidArgument("subgroups live in Z/p with p prime".into()));
    }
    let p = moduli[0];
    let elems: Vec<u64> = gamma.iter().map(|e| e.coords()[0] as u64).collect();
    let t = elems.len() as u64;
    if t == 0 || (p - 1) % t != 0 || elems.contains(&0) {
        return Err(Error::Precondition("not a multiplicative subgroup".into()));
    }
    for &x in &elems {
        for &y in &elems {
            if !gamma.contains_index((x * y % p) as usize) {
                return Err(Error::Precondition("set is not multiplicatively closed".into()));
            }
        }
    }
    let g = primitive_root(p)?;
    let step = pow_mod(g, (p - 1) / t, p);
    let orbit: Vec<u64> = (0..t).map(|l| pow_mod(step, l, p)).collect();
    Ok((p, orbit))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupEigenReport {
    pub p: u64,
    pub t: usize,
    /// `μ_α` for each character, `α = 0..t-1`.
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_residual: f64,
    pub transform_nonnegative: bool,
    pub trivial_is_max: Option<bool>,
    /// `sum_x (Γ∘Γ)(x) φ̂^c(x) / |Γ|`, the row-sum prediction for the trivial eigenvalue.
    pub row_sum_prediction: f64,
    /// Measured trivial eigenvalue over [`Self::row_sum_prediction`].
    pub normalization_ratio: f64,
    /// Worst relative slack `lhs/rhs - 1` of the connectedness inequality over random `u` (negative = failure).
    pub connected_min_slack: Option<f64>,
    pub connected_equality_residual: Option<f64>,
}

/// Characters of `Γ` as eigenfunctions of `T̄^φ_Γ`, plus the connectedness inequality.
pub fn subgroup_eigencheck(gamma: &GSet, phi: &[f64], trials: usize, seed: u64) -> Result<SubgroupEigenReport> {
    let (p, orbit) = subgroup_orbit(gamma)?;
    let n = p as usize;
    if phi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: phi.len() });
    }
    let scale = phi.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    for x in 0..n {
        for &gm in &orbit {
            let y = (x as u64 * gm % p) as usize;
            if (phi[x] - phi[y]).abs() > 1e-12 * scale {
                return Err(Error::Precondition("phi is not Γ-invariant".into()));
            }
        }
    }
    let group = gamma.group();
    let phic: Vec<Complex64> = phi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let kernel = dft_conj_complex(group, &phic)?;
    let phihat = dft_complex(group, &phic)?;
    let kscale = kernel.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let t = orbit.len();
    let entry = |x: u64, y: u64| kernel[((x + p - y) % p) as usize];
    let mut eigenvalues = Vec::with_capacity(t);
    let mut max_residual: f64 = 0.0;
    for alpha in 0..t {
        let chi: Vec<Complex64> = (0..t)
            .map(|l| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (alpha * l) as f64 / t as f64))
            .collect();
        let w: Vec<Complex64> = orbit
            .iter()
            .map(|&x| orbit.iter().zip(&chi).map(|(&y, c)| entry(x, y) * c).sum())
            .collect();
        let mu = w[0] / chi[0];
        let res = w.iter().zip(&chi).map(|(a, c)| (a - mu * c).norm()).fold(0.0, f64::max);
        max_residual = max_residual.max(res / (kscale * t as f64));
        eigenvalues.push((mu.re, mu.im));
    }
    let hscale = phihat.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let transform_nonnegative = phihat.iter().all(|z| z.re >= -1e-9 * hscale && z.im.abs() <= 1e-9 * hscale);
    let trivial_is_max = transform_nonnegative.then(|| {
        let top = eigenvalues[0].0;
        eigenvalues.iter().all(|&(re, _)| re <= top + 1e-9 * kscale * t as f64)
    });
    let gg = autocorrelation(gamma)?;
    let weighted: f64 = gg.values().iter().zip(&kernel).map(|(&c, z)| c as f64 * z.re).sum();
    let row_sum_prediction = weighted / t as f64;
    let normalization_ratio = eigenvalues[0].0 / row_sum_prediction;

    // The connectedness inequality needs ψ = φ̂^c real, symmetric and with ψ̂ >= 0, i.e. φ >= 0 symmetric.
    let symmetric = (0..n).all(|x| (phi[x] - phi[(n - x) % n]).abs() <= 1e-12 * scale);
    let (connected_min_slack, connected_equality_residual) = if symmetric && phi.iter().all(|&x| x >= -1e-12 * scale) {
        let psi: Vec<f64> = kernel.iter().map(|z| z.re).collect();
        let rhs_base: f64 = weighted;
        let eval = |u: &[f64]| -> (f64, f64) {
            let mut lhs = 0.0;
            for x in 0..n {
                let mut c = 0.0;
                for &y in &orbit {
                    c += u[y as usize] * u[(y as usize + x) % n];
                }
                lhs += psi[x] * c;
            }
            let s: f64 = orbit.iter().map(|&y| u[y as usize]).sum();
            (lhs, s * s * rhs_base / (t * t) as f64)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::INFINITY;
        for _ in 0..trials {
            let mut u = vec![0.0; n];
            for &y in &orbit {
                u[y as usize] = rng.gen_range(-1.0..1.0);
            }
            let (l, r) = eval(&u);
            let sl = (l - r) / r.abs().max(l.abs()).max(1e-300);
            worst = worst.min(sl);
        }
        let mut u = vec![0.0; n];
        for &y in &orbit {
            u[y as usize] = 1.0;
        }
        let (l, r) = eval(&u);
        (Some(worst), Some((l - r).abs() / l.abs().max(r.abs()).max(1e-300)))
    } else {
        (None, None)
    };
    Ok(SubgroupEigenReport {
        p,
        t,
        eigenvalues,
        max_residual,
        transform_nonnegative,
        trivial_is_max,
        row_sum_prediction,
        normalization_ratio,
        connected_min_slack,
        connected_equality_residual,
    })
}

/// `φ = Γ∘Γ` as a real function, the standard invariant test function.
pub fn autocorrelation_function(gamma: &GSet) -> Result<Vec<f64>> {
    let t: ConvTable = autocorrelation(gamma)?;
    Ok(t.values().iter().map(|&x| x as f64).collect())
}

/// A random complex function on `G` supported on `E` (or everywhere).
pub fn random_function(group: &GroupSpec, support: Option<&GSet>, rng: &mut impl Rng) -> Result<Vec<Complex64>> {
    let t = Torus::of(group)?;
    Ok((0..t.n)
        .map(|i| {
            if support.map_or(true, |e| e.contains_index(i)) {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(xs: &[i64]) -> GSet {
        GSet::from_ints(&GroupSpec::integers(), xs).unwrap()
    }

    #[test]
    fn two_point_gram() {
        let l = Limits::default();
        let a = z(&[0, 1]);
        let g = build_gram(&a, &a, 1, &l).unwrap();
        assert_eq!(g.entries, vec![2, 1, 1, 2]);
        let s = singular_spectrum(&g, &l).unwrap();
        assert!((s.lambdas_sq[0] - 3.0).abs() < 1e-12 && (s.lambdas_sq[1] - 1.0).abs() < 1e-12);
        assert!(s.trace_check && s.frobenius_check && s.lambda1_check);
        let b = magnification_lower_bounds(&a, &a, 1, &l).unwrap();
        assert!((b.bound_eig - 4.0 / 3.0).abs() < 1e-12);
        assert!((b.bound_energy - 4.0 / 10f64.sqrt()).abs() < 1e-12);
        let b2 = magnification_lower_bounds(&a, &a, 2, &l).unwrap();
        assert!((b2.bound_energy - 16.0 / 34f64.sqrt()).abs() < 1e-12);
        let one = z(&[5]);
        let s1 = singular_spectrum(&build_gram(&one, &one, 1, &l).unwrap(), &l).unwrap();
        assert_eq!(s1.lambdas_sq, vec![1.0]);
    }

    #[test]
    fn union_bounds() {
        let a = z(&[0, 1, 3]);
        let full1: Vec<TupleSet> = (0..3).map(|_| TupleSet::product(&[&a]).unwrap()).collect();
        let u = union_family_lower_bound(&a, &full1, &a, &a, 1, Sign::Minus).unwrap();
        assert!((u.bound - 81.0 / 15.0).abs() < 1e-12);
        assert_eq!(u.union_size, 7);
        let full2: Vec<TupleSet> = (0..3).map(|_| TupleSet::product(&[&a, &a]).unwrap()).collect();
        let u = union_family_lower_bound(&a, &full2, &a, &a, 2, Sign::Minus).unwrap();
        assert!((u.bound - 729.0 / 33.0).abs() < 1e-12);
        assert_eq!(u.union_size, 25);
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        let m = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let ev = jacobi_eigenvalues(&m, 3, 100).unwrap();
        for (x, y) in ev.iter().zip([3.0 + 3f64.sqrt(), 3.0, 3.0 - 3f64.sqrt()]) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn subgroup_characters() {
        let g = GroupSpec::cyclic(13).unwrap();
        let gamma = GSet::from_ints(&g, &[1, 3, 9]).unwrap();
        let phi = autocorrelation_function(&gamma).unwrap();
        let r = subgroup_eigencheck(&gamma, &phi, 20, 1).unwrap();
        assert!(r.max_residual < 1e-8);
        assert_eq!(r.trivial_is_max, Some(true));
        assert!(r.connected_min_slack.unwrap() >= -1e-9);
        assert!(r.connected_equality_residual.unwrap() < 1e-9);
        assert!((r.eigenvalues[0].0 - r.row_sum_prediction).abs() < 1e-9);
        assert!(subgroup_eigencheck(&GSet::from_ints(&g, &[1, 2]).unwrap(), &phi, 1, 1).is_err());
        assert!(primitive_root(13).unwrap() == 2);
    }

    #[test]
    fn identity_operator() {
        let g = GroupSpec::cyclic(8).unwrap();
        let phi = vec![Complex64::new(1.0 / 8.0, 0.0); 8];
        let psi = vec![Complex64::new(1.0, 0.0); 8];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_function(&g, None, &mut rng).unwrap();
        let out = operator_apply(&g, &phi, &psi, &f).unwrap();
        for (a, b) in out.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
        let phi = random_function(&g, None, &mut rng).unwrap();
        let e = GSet::from_ints(&g, &[0, 3, 5]).unwrap();
        let u = random_function(&g, Some(&e), &mut rng).unwrap();
        let v = random_function(&g, Some(&e), &mut rng).unwrap();
        assert!(bilinear_residual(&g, &phi, &u, &v, Some(&e)).unwrap() < 1e-8);
        let sym: Vec<Complex64> = (0..8).map(|x| Complex64::new([3.0, 1.0, 2.0, 5.0, 4.0, 5.0, 2.0, 1.0][x], 0.0)).collect();
        assert!(asymmetry(&operator_matrix(&sym, &e).unwrap(), 3) < 1e-12);
    }
}
