use num_rational::Ratio;
use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;

use super::{GSet, TupleSet};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Exact `min |B + Δ(Z)| / |Z|` over nonempty `Z ⊆ A`, with one minimizer.
#[derive(Clone, Debug, Serialize)]
pub struct Magnification {
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Ratio<u64>,
    pub image_size: u64,
    pub witness: GSet,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl Magnification {
    pub fn value(&self) -> f64 {
        *self.ratio.numer() as f64 / *self.ratio.denom() as f64
    }
}

struct Search<'a> {
    images: &'a [Vec<u32>],
    counts: Vec<u32>,
    union: u64,
    floor: u64,
    best: (u64, u64),
    best_set: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn add(&mut self, i: usize) {
        for &k in &self.images[i] {
            if self.counts[k as usize] == 0 {
                self.union += 1;
            }
            self.counts[k as usize] += 1;
        }
    }

    fn remove(&mut self, i: usize) {
        for &k in &self.images[i] {
            self.counts[k as usize] -= 1;
            if self.counts[k as usize] == 0 {
                self.union -= 1;
            }
        }
    }

    fn run(&mut self, i: usize) {
        let n = self.images.len();
        let size = self.chosen.len() as u64;
        let reach = size + (n - i) as u64;
        if reach == 0 || i == n {
            return;
        }
        // Any nonempty extension has image at least max(union, floor) over at most `reach` points.
        let lb = self.union.max(self.floor);
        if lb * self.best.1 >= self.best.0 * reach {
            return;
        }
        self.add(i);
        self.chosen.push(i);
        let s = self.chosen.len() as u64;
        if self.union * self.best.1 < self.best.0 * s {
            self.best = (self.union, s);
            self.best_set = self.chosen.clone();
        }
        self.run(i + 1);
        self.chosen.pop();
        self.remove(i);
        self.run(i + 1);
    }
}

/// Core search; `bt` is the tuple set `B ⊆ G^k`.
pub fn magnification_tuple(a: &GSet, bt: &TupleSet, limits: &Limits) -> Result<Magnification> {
    if a.is_empty() {
        return Err(Error::Empty("magnification over empty A"));
    }
    if bt.is_empty() {
        return Err(Error::Empty("magnification with empty B"));
    }
    if a.group() != bt.group() {
        return Err(Error::GroupMismatch(a.group().to_string(), bt.group().to_string()));
    }
    if a.len() > limits.cap_subsets {
        return Err(Error::cap("subset search |A|", a.len() as u128, limits.cap_subsets as u128));
    }
    let work = a.len() as u128 * bt.len() as u128;
    if work > limits.cap_tuples {
        return Err(Error::cap("magnification tuples", work, limits.cap_tuples));
    }
    let g = a.group();
    let d = g.dim();
    let mut ids: FxHashMap<SmallVec<[i64; 8]>, u32> = FxHashMap::default();
    let mut images = Vec::with_capacity(a.len());
    for z in a.iter() {
        let mut img = Vec::with_capacity(bt.len());
        for t in bt.raw_iter() {
            let mut key: SmallVec<[i64; 8]> = SmallVec::with_capacity(t.len());
            for c in t.chunks_exact(d) {
                let s = g.op_add(&crate::group::Elem::new(c), z);
                key.extend_from_slice(s.coords());
            }
            let next = ids.len() as u32;
            img.push(*ids.entry(key).or_insert(next));
        }
        images.push(img);
    }
    let full: u64 = ids.len() as u64;
    let mut s = Search {
        images: &images,
        counts: vec![0; ids.len()],
        union: 0,
        floor: bt.len() as u64,
        best: (full, a.len() as u64),
        best_set: (0..a.len()).collect(),
        chosen: Vec::new(),
    };
    s.run(0);
    let (num, den) = s.best;
    let witness = GSet::new(g, s.best_set.iter().map(|&i| a.elems()[i].clone()))?;
    Ok(Magnification { ratio: Ratio::new(num, den), image_size: num, witness })
}

/// `R_B[A] = min |B + Z| / |Z|`.
pub fn magnification(a: &GSet, b: &GSet, limits: &Limits) -> Result<Magnification> {
    a.check_same(b)?;
    magnification_tuple(a, &TupleSet::from_set(b), limits)
}

/// `R^(k)_B[A] = min |B^k + Δ(Z)| / |Z|`.
pub fn magnification_k(a: &GSet, b: &GSet, k: usize, limits: &Limits) -> Result<Magnification> {
    a.check_same(b)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let space = (b.len() as u128).saturating_pow(k as u32);
    if space > limits.cap_tuples {
        return Err(Error::cap("B^k tuple space", space, limits.cap_tuples));
    }
    let sets = vec![b; k];
    magnification_tuple(a, &TupleSet::product(&sets)?, limits)
}
