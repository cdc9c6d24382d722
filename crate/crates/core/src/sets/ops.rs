use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GSet, TupleSet};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec, Torus};
use crate::limits::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply(self, g: &GroupSpec, x: &Elem, y: &Elem) -> Elem {
        match self {
            Sign::Plus => g.op_add(x, y),
            Sign::Minus => g.op_sub(x, y),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "sum" => Ok(Sign::Plus),
            "-" | "minus" | "diff" => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("bad sign '{s}'"))),
        }
    }
}

/// `A + B` or `A - B`.
fn combine(a: &GSet, b: &GSet, sign: Sign) -> Result<GSet> {
    a.check_same(b)?;
    let g = a.group();
    if a.is_empty() || b.is_empty() {
        return Ok(GSet::empty(g));
    }
    if let Ok(t) = Torus::of(g) {
        let pairs = a.len() as f64 * b.len() as f64;
        let n = t.n as f64;
        if t.n >= 1024 && pairs > 16.0 * n * n.log2() {
            let bb = match sign {
                Sign::Plus => b.clone(),
                Sign::Minus => b.negate(),
            };
            return Ok(GSet::from_indices(g, crate::moments::sumset_support(a, &bb)?));
        }
        let mut hit = vec![false; t.n];
        let bi: Vec<usize> = match sign {
            Sign::Plus => b.indices().to_vec(),
            Sign::Minus => b.indices().iter().map(|&j| t.neg(j)).collect(),
        };
        for &i in a.indices() {
            for &j in &bi {
                hit[t.add(i, j)] = true;
            }
        }
        return Ok(GSet::from_indices(g, (0..t.n).filter(|&i| hit[i])));
    }
    let mut v = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            v.push(sign.apply(g, x, y));
        }
    }
    Ok(GSet::from_reduced(g, v))
}

pub fn sumset(a: &GSet, b: &GSet) -> Result<GSet> {
    combine(a, b, Sign::Plus)
}

pub fn diffset(a: &GSet, b: &GSet) -> Result<GSet> {
    combine(a, b, Sign::Minus)
}

/// `nA` (with `0A = {0}`).
pub fn iterated_sumset(a: &GSet, n: usize) -> Result<GSet> {
    let g = a.group();
    let mut acc = GSet::from_reduced(g, vec![g.zero()]);
    for _ in 0..n {
        acc = sumset(&acc, a)?;
    }
    Ok(acc)
}

/// `nA - mA`.
pub fn iterated(a: &GSet, n: usize, m: usize) -> Result<GSet> {
    if n == 0 && m == 0 {
        return Err(Error::InvalidArgument("iterated sumset needs n + m >= 1".into()));
    }
    let mut acc = iterated_sumset(a, n)?;
    for _ in 0..m {
        acc = diffset(&acc, a)?;
    }
    Ok(acc)
}

/// `A_s = A ∩ (A - s_1) ∩ ... ∩ (A - s_j)`.
pub fn stabilizer_slice(a: &GSet, s: &[Elem]) -> Result<GSet> {
    let g = a.group();
    for x in s {
        if x.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), got: x.dim() });
        }
    }
    let s: Vec<Elem> = s.iter().map(|x| g.reduce(x.coords())).collect();
    let v = a
        .iter()
        .filter(|x| s.iter().all(|t| a.contains(&g.op_add(x, t))))
        .cloned()
        .collect();
    Ok(GSet::from_reduced(g, v))
}

/// `{a ∓ b : (a, b) ∈ edges}`.
pub fn restricted_sum(a: &GSet, b: &GSet, edges: &[(Elem, Elem)], sign: Sign) -> Result<GSet> {
    a.check_same(b)?;
    let g = a.group();
    let mut v = Vec::with_capacity(edges.len());
    for (x, y) in edges {
        let (x, y) = (g.reduce(x.coords()), g.reduce(y.coords()));
        if !a.contains(&x) || !b.contains(&y) {
            return Err(Error::Precondition(format!("edge ({x}, {y}) not in A x B")));
        }
        v.push(sign.apply(g, &x, &y));
    }
    Ok(GSet::from_reduced(g, v))
}

fn candidate_space(sets: &[&GSet], b: &GSet, sign: Sign) -> Result<u128> {
    let mut via_diffs: u128 = 1;
    let mut via_boxes: u128 = b.len() as u128;
    for a in sets {
        let c = combine(a, b, sign)?;
        via_diffs = via_diffs.saturating_mul(c.len() as u128);
        via_boxes = via_boxes.saturating_mul(a.len() as u128);
    }
    Ok(via_diffs.min(via_boxes))
}

struct DeltaWalk<'a> {
    g: &'a GroupSpec,
    sets: &'a [&'a GSet],
    sign: Sign,
    prefix: Vec<i64>,
    out: Option<Vec<i64>>,
    count: u128,
}

impl DeltaWalk<'_> {
    // Tuple x extends the prefix iff the surviving part of B meets A_i ∓ x_i.
    fn walk(&mut self, level: usize, alive: &[Elem]) {
        if level == self.sets.len() {
            self.count += 1;
            if let Some(out) = self.out.as_mut() {
                out.extend_from_slice(&self.prefix);
            }
            return;
        }
        let a = self.sets[level];
        let mut xs = Vec::with_capacity(a.len() * alive.len());
        for y in a.iter() {
            for c in alive {
                xs.push(self.sign.apply(self.g, y, c));
            }
        }
        xs.sort_unstable();
        xs.dedup();
        for x in &xs {
            let mut next = Vec::with_capacity(alive.len());
            for c in alive {
                let hit = match self.sign {
                    Sign::Minus => a.contains(&self.g.op_add(c, x)),
                    Sign::Plus => a.contains(&self.g.op_sub(x, c)),
                };
                if hit {
                    next.push(c.clone());
                }
            }
            let d = x.dim();
            self.prefix.extend_from_slice(x.coords());
            self.walk(level + 1, &next);
            self.prefix.truncate(self.prefix.len() - d);
        }
    }
}

fn delta_walk(sets: &[&GSet], b: &GSet, sign: Sign, limits: &Limits, keep: bool) -> Result<(u128, Vec<i64>)> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("delta sumset needs k >= 1".into()));
    }
    for a in sets {
        a.check_same(b)?;
    }
    let space = candidate_space(sets, b, sign)?;
    if space > limits.cap_tuples {
        return Err(Error::cap("tuple candidate space", space, limits.cap_tuples));
    }
    let mut w = DeltaWalk {
        g: b.group(),
        sets,
        sign,
        prefix: Vec::new(),
        out: keep.then(Vec::new),
        count: 0,
    };
    w.walk(0, b.elems());
    Ok((w.count, w.out.unwrap_or_default()))
}

/// `A_1 x ... x A_k ∓ Δ(B)`, built by walking tuples whose slice `B ∩ (A_1 ∓ x_1) ∩ ...` stays nonempty.
pub fn delta_sumset(sets: &[&GSet], b: &GSet, sign: Sign, limits: &Limits) -> Result<TupleSet> {
    let (_, flat) = delta_walk(sets, b, sign, limits, true)?;
    Ok(TupleSet::from_sorted_flat(b.group(), sets.len(), flat))
}

/// Cardinality of [`delta_sumset`] without materializing it.
pub fn delta_sumset_size(sets: &[&GSet], b: &GSet, sign: Sign, limits: &Limits) -> Result<u128> {
    Ok(delta_walk(sets, b, sign, limits, false)?.0)
}

/// Greedy cover: `X` with `A + X = G`, at most `ceil((N/|A|)(ln N + 1))` translates.
pub fn greedy_completion(a: &GSet) -> Result<GSet> {
    let g = a.group();
    let t = Torus::of(g)?;
    if a.is_empty() {
        return Err(Error::Empty("greedy completion of the empty set"));
    }
    let n = t.n;
    let neg_a: Vec<usize> = a.indices().iter().map(|&i| t.neg(i)).collect();
    let mut gain = vec![a.len(); n];
    let mut covered = vec![false; n];
    let mut left = n;
    let mut xs = Vec::new();
    while left > 0 {
        let mut best = 0;
        for x in 1..n {
            if gain[x] > gain[best] {
                best = x;
            }
        }
        xs.push(best);
        for &i in a.indices() {
            let y = t.add(i, best);
            if !covered[y] {
                covered[y] = true;
                left -= 1;
                for &j in &neg_a {
                    gain[t.add(y, j)] -= 1;
                }
            }
        }
    }
    Ok(GSet::from_indices(g, xs))
}

/// Largest group handled by the bitset basis test (one `N`-bit mask per element).
const BITSET_MAX: usize = 8192;

/// `(x_1, ..., x_k)` is covered iff `B ∩ M_{x_1} ∩ ... ∩ M_{x_k}` is nonempty, where
/// `M_x = {c : c + x ∈ B}` (difference) or `{c : x - c ∈ B}` (sum). Depth-first over tuples in
/// index order, so the first empty leaf is the lexicographically first missing tuple.
fn basis_bitset(b: &GSet, t: &Torus, k: usize, sign: Sign) -> (u128, Option<Vec<usize>>) {
    let n = t.n;
    let words = n.div_ceil(64);
    let mut masks = vec![0u64; n * words];
    for x in 0..n {
        let row = &mut masks[x * words..(x + 1) * words];
        for c in 0..n {
            let y = match sign {
                Sign::Minus => t.add(c, x),
                Sign::Plus => t.sub(x, c),
            };
            if b.contains_index(y) {
                row[c / 64] |= 1 << (c % 64);
            }
        }
    }
    let mut base = vec![0u64; words];
    for &i in b.indices() {
        base[i / 64] |= 1 << (i % 64);
    }
    struct Walk<'a> {
        masks: &'a [u64],
        words: usize,
        n: usize,
        k: usize,
        covered: u128,
        prefix: Vec<usize>,
        missing: Option<Vec<usize>>,
    }
    impl Walk<'_> {
        fn run(&mut self, cur: &[u64]) {
            let level = self.prefix.len();
            let mut next = vec![0u64; self.words];
            for x in 0..self.n {
                let row = &self.masks[x * self.words..(x + 1) * self.words];
                let mut any = false;
                for ((o, a), m) in next.iter_mut().zip(cur).zip(row) {
                    *o = a & m;
                    any |= *o != 0;
                }
                self.prefix.push(x);
                if !any {
                    if self.missing.is_none() {
                        let mut w = self.prefix.clone();
                        w.resize(self.k, 0);
                        self.missing = Some(w);
                    }
                } else if level + 1 == self.k {
                    self.covered += 1;
                } else {
                    self.run(&next);
                }
                self.prefix.pop();
            }
        }
    }
    let mut w = Walk { masks: &masks, words, n, k, covered: 0, prefix: Vec::with_capacity(k), missing: None };
    w.run(&base);
    (w.covered, w.missing)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisReport {
    pub is_basis: bool,
    pub witness: Option<Vec<Elem>>,
    pub covered: u128,
    pub total: u128,
}

/// Whether `B^k ∓ Δ(B) = G^k`; on failure the lexicographically first missing tuple.
pub fn basis_depth_test(b: &GSet, k: usize, sign: Sign, limits: &Limits) -> Result<BasisReport> {
    let g = b.group();
    let t = Torus::of(g)?;
    if k == 0 {
        return Err(Error::InvalidArgument("depth k must be >= 1".into()));
    }
    let total = (t.n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > limits.cap_tuples {
        return Err(Error::cap("G^k tuple space", total, limits.cap_tuples));
    }
    if t.n <= BITSET_MAX {
        let (covered, missing) = basis_bitset(b, &t, k, sign);
        let witness = missing.map(|m| m.into_iter().map(|i| t.elem(i)).collect());
        return Ok(BasisReport { is_basis: covered == total, witness, covered, total });
    }
    let sets: Vec<&GSet> = vec![b; k];
    let got = delta_sumset(&sets, b, sign, limits)?;
    let covered = got.len() as u128;
    if covered == total {
        return Ok(BasisReport { is_basis: true, witness: None, covered, total });
    }
    let d = g.dim();
    let mut rank = 0u128;
    for tup in got.raw_iter() {
        let r = tup
            .chunks_exact(d)
            .fold(0u128, |acc, c| acc * t.n as u128 + t.index_raw(c) as u128);
        if r != rank {
            break;
        }
        rank += 1;
    }
    let mut witness = Vec::with_capacity(k);
    let mut r = rank;
    for _ in 0..k {
        witness.push(t.elem((r % t.n as u128) as usize));
        r /= t.n as u128;
    }
    witness.reverse();
    Ok(BasisReport { is_basis: false, witness: Some(witness), covered, total })
}
