use rustc_hash::FxHashSet;
use serde::{Serialize, Serializer};
use smallvec::SmallVec;

use super::{GSet, Sign};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};

type Key = SmallVec<[i64; 8]>;

/// A finite subset of `G^k`, stored as lexicographically sorted flattened coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    group: GroupSpec,
    arity: usize,
    flat: Vec<i64>,
}

impl TupleSet {
    pub fn new(group: &GroupSpec, arity: usize, tuples: impl IntoIterator<Item = Vec<Elem>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("tuple arity 0".into()));
        }
        let d = group.dim();
        let mut keys = Vec::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::DimensionMismatch { expected: arity, got: t.len() });
            }
            let mut k = Key::new();
            for e in &t {
                if e.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: e.dim() });
                }
                k.extend_from_slice(group.reduce(e.coords()).coords());
            }
            keys.push(k);
        }
        Ok(Self::from_keys(group, arity, keys))
    }

    fn from_keys(group: &GroupSpec, arity: usize, mut keys: Vec<Key>) -> Self {
        keys.sort_unstable();
        keys.dedup();
        let flat = keys.into_iter().flatten().collect();
        TupleSet { group: group.clone(), arity, flat }
    }

    /// Flattened coordinates already sorted and unique.
    pub(crate) fn from_sorted_flat(group: &GroupSpec, arity: usize, flat: Vec<i64>) -> Self {
        TupleSet { group: group.clone(), arity, flat }
    }

    /// Cartesian product `A_1 x ... x A_k`.
    pub fn product(sets: &[&GSet]) -> Result<Self> {
        let first = sets.first().ok_or(Error::Empty("product of no sets"))?;
        for s in sets {
            first.check_same(s)?;
        }
        let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
        for s in sets {
            let mut next = Vec::with_capacity(acc.len() * s.len());
            for prefix in &acc {
                for e in s.iter() {
                    let mut v = prefix.clone();
                    v.extend_from_slice(e.coords());
                    next.push(v);
                }
            }
            acc = next;
        }
        let flat = acc.into_iter().flatten().collect();
        Ok(TupleSet { group: first.group().clone(), arity: sets.len(), flat })
    }

    /// Concatenation product `T_1 x T_2 x ...` of tuple sets.
    pub fn concat(parts: &[&TupleSet]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("product of no tuple sets"))?;
        let mut acc: Vec<Key> = vec![Key::new()];
        let mut arity = 0;
        for p in parts {
            if p.group != first.group {
                return Err(Error::GroupMismatch(p.group.to_string(), first.group.to_string()));
            }
            arity += p.arity;
            let mut next = Vec::with_capacity(acc.len() * p.len());
            for prefix in &acc {
                for t in p.raw_iter() {
                    let mut v = prefix.clone();
                    v.extend_from_slice(t);
                    next.push(v);
                }
            }
            acc = next;
        }
        Ok(Self::from_keys(&first.group, arity, acc))
    }

    pub fn from_set(s: &GSet) -> Self {
        TupleSet {
            group: s.group().clone(),
            arity: 1,
            flat: s.iter().flat_map(|e| e.coords().to_vec()).collect(),
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn stride(&self) -> usize {
        self.arity * self.group.dim()
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub(crate) fn raw_iter(&self) -> std::slice::ChunksExact<'_, i64> {
        self.flat.chunks_exact(self.stride())
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let d = self.group.dim();
        self.raw_iter().map(move |t| t.chunks_exact(d).map(Elem::new).collect())
    }

    pub fn contains(&self, t: &[Elem]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        let key: Vec<i64> = t.iter().flat_map(|e| e.coords().to_vec()).collect();
        let s = self.stride();
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.flat[mid * s..(mid + 1) * s].cmp(&key[..]) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// `T + Δ(X)` or `T - Δ(X)`, where `Δ(x) = (x, ..., x)`.
    pub fn shift_by_diagonal(&self, x: &GSet, sign: Sign) -> Result<TupleSet> {
        if x.group() != &self.group {
            return Err(Error::GroupMismatch(self.group.to_string(), x.group().to_string()));
        }
        let d = self.group.dim();
        let mut seen: FxHashSet<Key> = FxHashSet::default();
        for t in self.raw_iter() {
            for e in x.iter() {
                let mut k = Key::with_capacity(t.len());
                for comp in t.chunks_exact(d) {
                    let c = Elem::new(comp);
                    let r = match sign {
                        Sign::Plus => self.group.op_add(&c, e),
                        Sign::Minus => self.group.op_sub(&c, e),
                    };
                    k.extend_from_slice(r.coords());
                }
                seen.insert(k);
            }
        }
        Ok(Self::from_keys(&self.group, self.arity, seen.into_iter().collect()))
    }

    pub fn negate(&self) -> TupleSet {
        let d = self.group.dim();
        let keys = self
            .raw_iter()
            .map(|t| {
                t.chunks_exact(d)
                    .flat_map(|c| self.group.op_neg(&Elem::new(c)).0.into_iter())
                    .collect::<Key>()
            })
            .collect();
        Self::from_keys(&self.group, self.arity, keys)
    }
}

impl Serialize for TupleSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            group: &'a GroupSpec,
            arity: usize,
            tuples: Vec<Vec<Vec<i64>>>,
        }
        let d = self.group.dim();
        Repr {
            group: &self.group,
            arity: self.arity,
            tuples: self
                .raw_iter()
                .map(|t| t.chunks_exact(d).map(|c| c.to_vec()).collect())
                .collect(),
        }
        .serialize(s)
    }
}
