//! Indexed set families `S_i ⊆ S` and the intersection-lemma selections over them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest family handled (pairwise intersections are tabulated).
pub const MAX_FAMILY: usize = 4096;

/// Relative slack on floating thresholds derived from `delta`.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Family {
    m: usize,
    bits: Vec<Vec<u64>>,
    inter: Vec<u32>,
}

fn bitset(m: usize, members: &[usize]) -> Result<Vec<u64>> {
    let mut b = vec![0u64; m.div_ceil(64)];
    for &x in members {
        if x >= m {
            return Err(Error::InvalidArgument(format!("member {x} outside ground set of size {m}")));
        }
        b[x / 64] |= 1 << (x % 64);
    }
    Ok(b)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

impl Family {
    /// `members[i]` lists the elements of `S_i` as indices into a ground set of size `m`.
    pub fn new(m: usize, members: &[Vec<usize>]) -> Result<Self> {
        let n = members.len();
        if n == 0 || m == 0 {
            return Err(Error::Empty("set family"));
        }
        if n > MAX_FAMILY {
            return Err(Error::cap("family size", n as u128, MAX_FAMILY as u128));
        }
        let bits: Vec<Vec<u64>> = members.iter().map(|s| bitset(m, s)).collect::<Result<_>>()?;
        let mut inter = vec![0u32; n * n];
        for i in 0..n {
            for j in i..n {
                let c = popcount_and(&bits[i], &bits[j]);
                inter[i * n + j] = c;
                inter[j * n + i] = c;
            }
        }
        Ok(Family { m, bits, inter })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self, i: usize) -> u32 {
        self.inter[i * self.n() + i]
    }

    /// `|S_i ∩ S_j|`.
    pub fn inter(&self, i: usize, j: usize) -> u32 {
        self.inter[i * self.n() + j]
    }

    /// `sum_{i,j} |S_i ∩ S_j|`.
    pub fn pair_total(&self) -> u64 {
        self.inter.iter().map(|&x| x as u64).sum()
    }

    /// Largest `delta <= 1` with `sum_{i,j} |S_i ∩ S_j| >= delta^2 m n^2`.
    pub fn admissible_delta(&self) -> f64 {
        let n = self.n() as f64;
        (self.pair_total() as f64 / (self.m as f64 * n * n)).sqrt().min(1.0)
    }

    fn contains(&self, i: usize, alpha: usize) -> bool {
        self.bits[i][alpha / 64] >> (alpha % 64) & 1 == 1
    }

    fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1]")));
        }
        let n = self.n() as f64;
        let need = delta * delta * self.m as f64 * n * n;
        if (self.pair_total() as f64) < need * (1.0 - SLACK) {
            return Err(Error::Precondition(format!(
                "sum of pairwise intersections {} below delta^2 m n^2 = {need}",
                self.pair_total()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Selection {
    /// Chosen indices, ascending.
    pub members: Vec<usize>,
    /// Ground element `alpha` with `J = K_alpha = {i : alpha ∈ S_i}`.
    pub alpha: usize,
    /// Pairs in `J x J` with intersection at least `eta delta^2 m / 2`.
    pub good_pairs: u64,
    pub size_bound: f64,
    pub pair_threshold: f64,
}

/// `J = K_alpha` for the `alpha` maximizing `|K_alpha|^2 - |K_alpha^2 ∩ Y| / eta` among those with
/// `|K_alpha| >= delta n / sqrt 2` and `|K_alpha^2 ∩ Y| < eta |K_alpha|^2`, where `Y` holds the
/// pairs with `|S_i ∩ S_j| < eta delta^2 m / 2`.
pub fn intersection_select(f: &Family, delta: f64, eta: f64) -> Result<Selection> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta {eta} outside (0, 1]")));
    }
    f.check_delta(delta)?;
    let n = f.n();
    let thr = eta * delta * delta * f.m as f64 / 2.0;
    let size_bound = delta * n as f64 / std::f64::consts::SQRT_2;
    let bad = |i: usize, j: usize| (f.inter(i, j) as f64) < thr * (1.0 - SLACK);
    let mut best: Option<(f64, usize, Vec<usize>, u64)> = None;
    for alpha in 0..f.m {
        let k: Vec<usize> = (0..n).filter(|&i| f.contains(i, alpha)).collect();
        let kl = k.len() as f64;
        if k.is_empty() || kl < size_bound * (1.0 - SLACK) {
            continue;
        }
        let y: u64 = k.iter().map(|&i| k.iter().filter(|&&j| bad(i, j)).count() as u64).sum();
        if y as f64 >= eta * kl * kl {
            continue;
        }
        let score = kl * kl - y as f64 / eta;
        if best.as_ref().map_or(true, |b| score > b.0) {
            best = Some((score, alpha, k, y));
        }
    }
    let (_, alpha, members, y) = best.ok_or_else(|| {
        Error::Precondition(format!("no alpha meets both conditions for delta={delta}, eta={eta}"))
    })?;
    let j = members.len() as u64;
    let sel = Selection { members, alpha, good_pairs: j * j - y, size_bound, pair_threshold: thr };
    if (sel.good_pairs as f64) < (1.0 - eta) * (j * j) as f64 * (1.0 - SLACK) {
        return Err(Error::Invariant("selected J fails the pair-density condition".into()));
    }
    Ok(sel)
}

#[derive(Clone, Debug, Serialize)]
pub struct Core {
    pub members: Vec<usize>,
    /// The intermediate `J` (with `eta = 1/8`).
    pub outer: Vec<usize>,
    pub size_bound: f64,
    /// Minimum over `i, j` in the core of the number of common strong neighbours.
    pub min_common: usize,
    pub common_bound: f64,
    pub strong_threshold: f64,
}

/// `J' ⊆ J` whose members pairwise share at least `delta n / 4` neighbours `k` with
/// `|S_i ∩ S_k|, |S_j ∩ S_k| >= delta^2 m / 16`; the property is checked before returning.
pub fn robust_core(f: &Family, delta: f64) -> Result<Core> {
    let eta = 0.125;
    let j = intersection_select(f, delta, eta)?.members;
    let n = f.n();
    let strong_threshold = delta * delta * f.m as f64 / 16.0;
    let strong = |i: usize, k: usize| f.inter(i, k) as f64 >= strong_threshold * (1.0 - SLACK);
    let members: Vec<usize> = j
        .iter()
        .copied()
        .filter(|&i| 4 * j.iter().filter(|&&k| strong(i, k)).count() >= 3 * j.len())
        .collect();
    let size_bound = delta * n as f64 / 32.0;
    if (members.len() as f64) < size_bound * (1.0 - SLACK) || members.is_empty() {
        return Err(Error::Invariant(format!("core of size {} below delta n / 32 = {size_bound}", members.len())));
    }
    let rows: Vec<Vec<u64>> = members
        .iter()
        .map(|&i| {
            let ks: Vec<usize> = (0..n).filter(|&k| strong(i, k)).collect();
            bitset(n, &ks).expect("indices in range")
        })
        .collect();
    let mut min_common = usize::MAX;
    for a in 0..rows.len() {
        for b in a..rows.len() {
            min_common = min_common.min(popcount_and(&rows[a], &rows[b]) as usize);
        }
    }
    let common_bound = delta * n as f64 / 4.0;
    if (min_common as f64) < common_bound * (1.0 - SLACK) {
        return Err(Error::Invariant(format!("core pair has only {min_common} common neighbours < {common_bound}")));
    }
    Ok(Core { members, outer: j, size_bound, min_common, common_bound, strong_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_family() {
        let f = Family::new(5, &vec![vec![0, 1, 2, 3, 4]; 6]).unwrap();
        assert_eq!(f.admissible_delta(), 1.0);
        let s = intersection_select(&f, 1.0, 0.5).unwrap();
        assert_eq!(s.members, (0..6).collect::<Vec<_>>());
        assert_eq!(robust_core(&f, 1.0).unwrap().members, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn disjoint_family_rejects_large_delta() {
        let f = Family::new(4, &[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert!(matches!(intersection_select(&f, 0.9, 0.5), Err(Error::Precondition(_))));
    }
}
