//! Finite sets in a group, tuple sets, and the sumset machinery built on them.

mod magnify;
mod ops;
mod tuple;

pub use magnify::{magnification, magnification_k, magnification_tuple, Magnification};
pub use ops::{
    basis_depth_test, delta_sumset, delta_sumset_size, diffset, greedy_completion, iterated,
    iterated_sumset, restricted_sum, stabilizer_slice, sumset, BasisReport, Sign,
};
pub use tuple::TupleSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec, Torus};

const MASK_LIMIT: usize = 1 << 24;

/// A finite subset of a group, kept sorted and deduplicated.
#[derive(Clone, Debug)]
pub struct GSet {
    group: GroupSpec,
    elems: Vec<Elem>,
    idx: Vec<usize>,
    mask: Option<Vec<bool>>,
    torus: Option<Torus>,
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elems == other.elems
    }
}

impl Eq for GSet {}

impl GSet {
    pub fn new(group: &GroupSpec, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let d = group.dim();
        let mut v = Vec::new();
        for e in elems {
            if e.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: e.dim() });
            }
            v.push(group.reduce(e.coords()));
        }
        Ok(Self::from_reduced(group, v))
    }

    /// Elements must already be reduced.
    pub(crate) fn from_reduced(group: &GroupSpec, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        let torus = Torus::of(group).ok();
        let (idx, mask) = match &torus {
            Some(t) => {
                let idx: Vec<usize> = elems.iter().map(|e| t.index(e)).collect();
                let mask = (t.n <= MASK_LIMIT).then(|| {
                    let mut m = vec![false; t.n];
                    for &i in &idx {
                        m[i] = true;
                    }
                    m
                });
                (idx, mask)
            }
            None => (Vec::new(), None),
        };
        GSet { group: group.clone(), elems, idx, mask, torus }
    }

    pub(crate) fn from_indices(group: &GroupSpec, idx: impl IntoIterator<Item = usize>) -> Self {
        let t = Torus::of(group).expect("cyclic group");
        Self::from_reduced(group, idx.into_iter().map(|i| t.elem(i)).collect())
    }

    /// One-dimensional convenience constructor.
    pub fn from_ints(group: &GroupSpec, xs: &[i64]) -> Result<Self> {
        Self::new(group, xs.iter().map(|&x| Elem::new(&[x])))
    }

    pub fn from_coords(group: &GroupSpec, xs: &[Vec<i64>]) -> Result<Self> {
        Self::new(group, xs.iter().map(|x| Elem::new(x)))
    }

    pub fn empty(group: &GroupSpec) -> Self {
        Self::from_reduced(group, Vec::new())
    }

    pub fn full(group: &GroupSpec) -> Result<Self> {
        let t = Torus::of(group)?;
        Ok(Self::from_indices(group, 0..t.n))
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Elem> {
        self.elems.iter()
    }

    /// Dense indices (cyclic groups only; empty in lattice mode).
    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn contains(&self, x: &Elem) -> bool {
        match &self.mask {
            Some(m) => m[self.torus.as_ref().expect("cyclic").index(x)],
            None => self.elems.binary_search(x).is_ok(),
        }
    }

    pub(crate) fn contains_index(&self, i: usize) -> bool {
        match &self.mask {
            Some(m) => m[i],
            None => self.idx.binary_search(&i).is_ok(),
        }
    }

    pub fn density(&self) -> Option<f64> {
        self.group.order().map(|n| self.len() as f64 / n as f64)
    }

    pub fn check_same(&self, other: &GSet) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(self.group.to_string(), other.group.to_string()));
        }
        Ok(())
    }

    pub fn negate(&self) -> GSet {
        Self::from_reduced(&self.group, self.elems.iter().map(|x| self.group.op_neg(x)).collect())
    }

    pub fn translate(&self, t: &Elem) -> GSet {
        Self::from_reduced(&self.group, self.elems.iter().map(|x| self.group.op_add(x, t)).collect())
    }

    pub fn dilate(&self, c: i64) -> GSet {
        Self::from_reduced(&self.group, self.elems.iter().map(|x| self.group.op_scale(c, x)).collect())
    }

    pub fn intersection(&self, other: &GSet) -> GSet {
        let v = self.elems.iter().filter(|x| other.contains(x)).cloned().collect();
        Self::from_reduced(&self.group, v)
    }

    pub fn union(&self, other: &GSet) -> GSet {
        let mut v = self.elems.clone();
        v.extend(other.elems.iter().cloned());
        Self::from_reduced(&self.group, v)
    }

    pub fn difference(&self, other: &GSet) -> GSet {
        let v = self.elems.iter().filter(|x| !other.contains(x)).cloned().collect();
        Self::from_reduced(&self.group, v)
    }

    pub fn complement(&self) -> Result<GSet> {
        Ok(GSet::full(&self.group)?.difference(self))
    }

    pub fn is_subset(&self, other: &GSet) -> bool {
        self.elems.iter().all(|x| other.contains(x))
    }

    /// Per-coordinate `(min, max)` of the elements.
    pub fn bounding_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let first = self.elems.first()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for e in &self.elems {
            for (k, &c) in e.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        Some((lo, hi))
    }

    /// Serialize in the set-file format: a `group:` header, then one element per line.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("group: {}\n", self.group);
        for e in &self.elems {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<GSet> {
        let mut lines = text.lines().enumerate();
        let group = loop {
            let (n, line) = lines.next().ok_or(Error::Parse {
                line: 1,
                col: 1,
                msg: "missing group header".into(),
            })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let lit = t.strip_prefix("group:").ok_or(Error::Parse {
                line: n + 1,
                col: 1,
                msg: "expected 'group: <literal>'".into(),
            })?;
            break lit.trim().parse::<GroupSpec>().map_err(|e| Error::Parse {
                line: n + 1,
                col: line.find(':').unwrap_or(0) + 2,
                msg: e.to_string(),
            })?;
        };
        let mut elems = Vec::new();
        for (n, line) in lines {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut coords = Vec::new();
            let mut col = line.len() - line.trim_start().len() + 1;
            for tok in t.split(',') {
                let v: i64 = tok.trim().parse().map_err(|_| Error::Parse {
                    line: n + 1,
                    col,
                    msg: format!("bad coordinate '{}'", tok.trim()),
                })?;
                coords.push(v);
                col += tok.len() + 1;
            }
            if coords.len() != group.dim() {
                return Err(Error::Parse {
                    line: n + 1,
                    col: 1,
                    msg: format!("expected {} coordinates, got {}", group.dim(), coords.len()),
                });
            }
            elems.push(Elem::new(&coords));
        }
        GSet::new(&group, elems)
    }

    pub fn read_file(path: &std::path::Path) -> Result<GSet> {
        GSet::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GSetRepr {
    group: GroupSpec,
    elements: Vec<Vec<i64>>,
}

impl Serialize for GSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GSetRepr {
            group: self.group.clone(),
            elements: self.elems.iter().map(|e| e.coords().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GSetRepr::deserialize(d)?;
        GSet::from_coords(&r.group, &r.elements).map_err(serde::de::Error::custom)
    }
}
