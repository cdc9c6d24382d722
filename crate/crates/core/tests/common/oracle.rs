//! Brute-force reference computations on sets of integers, optionally reduced mod `n`.
//! Nothing here goes through the library's convolution tables or transforms.

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug)]
pub struct Ring(pub Option<i64>);

impl Ring {
    pub fn red(self, x: i64) -> i64 {
        match self.0 {
            Some(n) => x.rem_euclid(n),
            None => x,
        }
    }
}

/// Every length-`k` sequence over `xs`.
pub fn tuples(xs: &[i64], k: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| xs.iter().map(move |&x| [t.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

/// `E_k`: `2k`-tuples with `a_1 - a'_1 = ... = a_k - a'_k`.
pub fn energy(r: Ring, a: &[i64], k: usize) -> u64 {
    tuples(a, 2 * k)
        .iter()
        .filter(|t| {
            let d0 = r.red(t[0] - t[1]);
            (1..k).all(|i| r.red(t[2 * i] - t[2 * i + 1]) == d0)
        })
        .count() as u64
}

/// `E_k(A, B)`: `(a, a', b_1, b'_1, ..., b_{k-1}, b'_{k-1})` with all differences equal.
pub fn energy_pair(r: Ring, a: &[i64], b: &[i64], k: usize) -> u64 {
    let mut n = 0;
    for x in a {
        for y in a {
            let d = r.red(x - y);
            let mut c = 0u64;
            for u in b {
                for v in b {
                    if r.red(u - v) == d {
                        c += 1;
                    }
                }
            }
            n += c.pow(k as u32 - 1);
        }
    }
    n
}

/// `T_k`: `2k`-tuples with equal sums of the two halves.
pub fn t_k(r: Ring, a: &[i64], k: usize) -> u64 {
    tuples(a, 2 * k)
        .iter()
        .filter(|t| r.red(t[..k].iter().sum::<i64>() - t[k..].iter().sum::<i64>()) == 0)
        .count() as u64
}

/// `k`-tuples summing to zero.
pub fn sigma_k(r: Ring, b: &[i64], k: usize) -> u64 {
    tuples(b, k).iter().filter(|t| r.red(t.iter().sum()) == 0).count() as u64
}

pub fn sumset(r: Ring, a: &[i64], b: &[i64], sign: i64) -> Vec<i64> {
    let s: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| r.red(x + sign * y))).collect();
    s.into_iter().collect()
}

/// `|A_1 x ... x A_k ± Δ(B)|`.
pub fn delta_size(r: Ring, sets: &[Vec<i64>], b: &[i64], sign: i64) -> usize {
    let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
    for s in sets {
        acc = acc.into_iter().flat_map(|t| s.iter().map(move |&x| [t.clone(), vec![x]].concat())).collect();
    }
    let out: BTreeSet<Vec<i64>> =
        acc.iter().flat_map(|t| b.iter().map(move |&y| t.iter().map(|&x| r.red(x + sign * y)).collect())).collect();
    out.len()
}

/// `min_Z |B + Z| / |Z|` over nonempty `Z ⊆ A`, as `(num, den)` in lowest terms.
pub fn magnification(r: Ring, a: &[i64], b: &[i64]) -> (u64, u64) {
    let mut best: Option<(u64, u64)> = None;
    for mask in 1u32..(1 << a.len()) {
        let z: Vec<i64> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
        let num = sumset(r, b, &z, 1).len() as u64;
        let den = z.len() as u64;
        if best.map_or(true, |(p, q)| num * q < p * den) {
            best = Some((num, den));
        }
    }
    let (p, q) = best.unwrap();
    let g = gcd(p, q);
    (p / g, q / g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Gram entries `|(B - y) ∩ (B - y')|^k`, `y, y' ∈ A`.
pub fn gram(r: Ring, a: &[i64], b: &[i64], k: u32) -> Vec<Vec<u64>> {
    let shifted: Vec<BTreeSet<i64>> = a.iter().map(|y| b.iter().map(|x| r.red(x - y)).collect()).collect();
    shifted
        .iter()
        .map(|s| shifted.iter().map(|t| (s.intersection(t).count() as u64).pow(k)).collect())
        .collect()
}

/// Eigenvalues of a symmetric 2x2 matrix, largest first.
pub fn eig2(m: &[Vec<u64>]) -> [f64; 2] {
    let (a, b, d) = (m[0][0] as f64, m[0][1] as f64, m[1][1] as f64);
    let mid = (a + d) / 2.0;
    let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    [mid + rad, mid - rad]
}

/// Every length-`k` tuple over `0..n` missing from `B^k ± Δ(B)`, in lexicographic order.
pub fn basis_missing(n: i64, b: &[i64], k: usize, sign: i64) -> Vec<Vec<i64>> {
    let r = Ring(Some(n));
    let hit: BTreeSet<Vec<i64>> = tuples(b, k)
        .iter()
        .flat_map(|t| b.iter().map(move |&y| t.iter().map(|&x| r.red(x + sign * y)).collect()))
        .collect();
    let all: Vec<i64> = (0..n).collect();
    tuples(&all, k).into_iter().filter(|t| !hit.contains(t)).collect()
}

/// `#{(a_1, a_2, a_3, a_4) : a_1 a_4 = a_2 a_3}` over nonzero integers.
pub fn mult_energy(a: &[i64]) -> u64 {
    let a: Vec<i64> = a.iter().copied().filter(|&x| x != 0).collect();
    tuples(&a, 4).iter().filter(|t| t[0] * t[3] == t[1] * t[2]).count() as u64
}

/// Whether no nontrivial `{-1, 0, 1}` combination of `xs` vanishes.
pub fn dissociated(r: Ring, xs: &[i64]) -> bool {
    tuples(&[-1, 0, 1], xs.len())
        .iter()
        .filter(|e| e.iter().any(|&x| x != 0))
        .all(|e| r.red(e.iter().zip(xs).map(|(c, x)| c * x).sum()) != 0)
}

/// Size of the largest dissociated subset.
pub fn dim(r: Ring, xs: &[i64]) -> usize {
    (0u32..1 << xs.len())
        .filter_map(|m| {
            let s: Vec<i64> = (0..xs.len()).filter(|i| m >> i & 1 == 1).map(|i| xs[i]).collect();
            dissociated(r, &s).then_some(s.len())
        })
        .max()
        .unwrap_or(0)
}

/// `sum_x ((A*B)(x) - (A*B)(x+t))^2` on `Z/n`.
pub fn almost_period(n: i64, a: &[i64], b: &[i64], t: i64) -> u64 {
    let r = Ring(Some(n));
    let conv = |x: i64| a.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).filter(|&(u, v)| r.red(u + v) == x).count() as i64;
    (0..n).map(|x| (conv(x) - conv(r.red(x + t))).pow(2) as u64).sum()
}

/// Smallest `m` with `mB = Z/n`.
pub fn cover(n: i64, b: &[i64], cap: usize) -> Option<usize> {
    let r = Ring(Some(n));
    let mut acc = b.to_vec();
    for m in 1..=cap {
        if acc.len() as i64 == n {
            return Some(m);
        }
        acc = sumset(r, &acc, b, 1);
    }
    None
}

/// First `(x, d)`, `d != 0`, with `x + c_i d ∈ A ± A` for all `i`, scanning `x` then `d` over `0..n`.
pub fn configuration(n: i64, a: &[i64], c: &[i64], sign: i64) -> Option<(i64, i64)> {
    let r = Ring(Some(n));
    let s = sumset(r, a, a, sign);
    (0..n).flat_map(|x| (1..n).map(move |d| (x, d))).find(|&(x, d)| c.iter().all(|ci| s.contains(&r.red(x + ci * d))))
}
