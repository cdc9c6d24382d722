//! Finite abelian groups `Z/n_1 x ... x Z/n_d` and the lattice `Z^d`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Coords = SmallVec<[i64; 4]>;

/// A group element as a coordinate vector. Cyclic coordinates are always reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Elem(pub Coords);

impl Elem {
    pub fn new(coords: &[i64]) -> Self {
        Elem(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GroupSpec {
    Cyclic { moduli: Vec<u64> },
    Lattice { dim: usize },
}

/// Build `Z/n_1 x ... x Z/n_d`.
pub fn make_group(moduli: &[u64]) -> Result<GroupSpec> {
    if moduli.is_empty() {
        return Err(Error::InvalidGroup("empty moduli list".into()));
    }
    if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
        return Err(Error::InvalidGroup(format!("modulus {m} < 2")));
    }
    let mut n: u128 = 1;
    for &m in moduli {
        n = n.saturating_mul(m as u128);
    }
    if n > (1u128 << 40) {
        return Err(Error::InvalidGroup(format!("group order {n} too large")));
    }
    Ok(GroupSpec::Cyclic { moduli: moduli.to_vec() })
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self> {
        make_group(&[n])
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("lattice dimension 0".into()));
        }
        Ok(GroupSpec::Lattice { dim })
    }

    pub fn integers() -> Self {
        GroupSpec::Lattice { dim: 1 }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::Cyclic { moduli } => moduli.len(),
            GroupSpec::Lattice { dim } => *dim,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, GroupSpec::Lattice { .. })
    }

    pub fn moduli(&self) -> Option<&[u64]> {
        match self {
            GroupSpec::Cyclic { moduli } => Some(moduli),
            GroupSpec::Lattice { .. } => None,
        }
    }

    /// Group order, `None` in lattice mode.
    pub fn order(&self) -> Option<u64> {
        self.moduli().map(|m| m.iter().product())
    }

    pub fn require_cyclic(&self, what: &'static str) -> Result<&[u64]> {
        self.moduli().ok_or(Error::LatticeUnsupported(what))
    }

    pub fn zero(&self) -> Elem {
        Elem(SmallVec::from_elem(0, self.dim()))
    }

    /// Reduce raw coordinates into a canonical element.
    pub fn elem(&self, coords: &[i64]) -> Result<Elem> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: coords.len() });
        }
        Ok(self.reduce(coords))
    }

    pub(crate) fn reduce(&self, coords: &[i64]) -> Elem {
        match self {
            GroupSpec::Cyclic { moduli } => Elem(
                coords.iter().zip(moduli).map(|(&c, &m)| c.rem_euclid(m as i64)).collect(),
            ),
            GroupSpec::Lattice { .. } => Elem::new(coords),
        }
    }

    pub fn op_add(&self, x: &Elem, y: &Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { moduli } => Elem(
                x.0.iter()
                    .zip(&y.0)
                    .zip(moduli)
                    .map(|((&a, &b), &m)| {
                        let s = a + b;
                        if s >= m as i64 {
                            s - m as i64
                        } else {
                            s
                        }
                    })
                    .collect(),
            ),
            GroupSpec::Lattice { .. } => Elem(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect()),
        }
    }

    pub fn op_neg(&self, x: &Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { moduli } => Elem(
                x.0.iter()
                    .zip(moduli)
                    .map(|(&a, &m)| if a == 0 { 0 } else { m as i64 - a })
                    .collect(),
            ),
            GroupSpec::Lattice { .. } => Elem(x.0.iter().map(|a| -a).collect()),
        }
    }

    pub fn op_sub(&self, x: &Elem, y: &Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { moduli } => Elem(
                x.0.iter()
                    .zip(&y.0)
                    .zip(moduli)
                    .map(|((&a, &b), &m)| {
                        let s = a - b;
                        if s < 0 {
                            s + m as i64
                        } else {
                            s
                        }
                    })
                    .collect(),
            ),
            GroupSpec::Lattice { .. } => Elem(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect()),
        }
    }

    /// `c * x` for an integer `c`.
    pub fn op_scale(&self, c: i64, x: &Elem) -> Elem {
        match self {
            GroupSpec::Cyclic { moduli } => Elem(
                x.0.iter()
                    .zip(moduli)
                    .map(|(&a, &m)| ((a as i128 * c as i128).rem_euclid(m as i128)) as i64)
                    .collect(),
            ),
            GroupSpec::Lattice { .. } => Elem(x.0.iter().map(|&a| a * c).collect()),
        }
    }

    /// The character `e(-xi . x)` with `xi . x = sum xi_i x_i / n_i`.
    pub fn character(&self, xi: &Elem, x: &Elem) -> Result<Complex64> {
        let moduli = self.require_cyclic("characters")?;
        let mut phase = 0.0f64;
        for ((&a, &b), &m) in xi.0.iter().zip(&x.0).zip(moduli) {
            let num = (a as i128 * b as i128).rem_euclid(m as i128);
            phase += num as f64 / m as f64;
        }
        let phase = phase.fract();
        let t = -2.0 * std::f64::consts::PI * phase;
        Ok(Complex64::new(t.cos(), t.sin()))
    }

    /// All elements in lexicographic order (first coordinate most significant).
    pub fn enumerate_elements(&self) -> Result<impl Iterator<Item = Elem> + '_> {
        let torus = Torus::of(self)?;
        Ok((0..torus.n).map(move |i| torus.elem(i)))
    }

    pub fn index_of(&self, x: &Elem) -> Result<usize> {
        Ok(Torus::of(self)?.index(x))
    }

    pub fn elem_at(&self, i: usize) -> Result<Elem> {
        Ok(Torus::of(self)?.elem(i))
    }

    pub fn literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Lattice { dim: 1 } => write!(f, "Z"),
            GroupSpec::Lattice { dim } => write!(f, "Z^{dim}"),
            GroupSpec::Cyclic { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|m| format!("Z/{m}")).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::InvalidGroup(format!("{msg} in '{s}'"));
        if s == "Z" {
            return Ok(GroupSpec::Lattice { dim: 1 });
        }
        if let Some(d) = s.strip_prefix("Z^") {
            let dim: usize = d.parse().map_err(|_| bad("bad lattice dimension"))?;
            return GroupSpec::lattice(dim);
        }
        let mut moduli = Vec::new();
        for part in s.split(['x', 'X', '*']) {
            let m = part.strip_prefix("Z/").ok_or_else(|| bad("expected Z/n factor"))?;
            moduli.push(m.parse::<u64>().map_err(|_| bad("bad modulus"))?);
        }
        make_group(&moduli)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mixed-radix index arithmetic on a cyclic product; the last coordinate has stride 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torus {
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
    pub n: usize,
}

impl Torus {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Torus { dims: dims.to_vec(), strides, n: dims.iter().product() }
    }

    pub fn of(g: &GroupSpec) -> Result<Self> {
        let m = g.require_cyclic("dense indexing")?;
        Ok(Torus::new(&m.iter().map(|&x| x as usize).collect::<Vec<_>>()))
    }

    pub fn index(&self, x: &Elem) -> usize {
        x.0.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    pub fn index_raw(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.dims)
            .zip(&self.strides)
            .map(|((&c, &d), &s)| c.rem_euclid(d as i64) as usize * s)
            .sum()
    }

    pub fn coords(&self, mut i: usize) -> Coords {
        let mut out = Coords::from_elem(0, self.dims.len());
        for (k, &s) in self.strides.iter().enumerate() {
            out[k] = (i / s) as i64;
            i %= s;
        }
        out
    }

    pub fn elem(&self, i: usize) -> Elem {
        Elem(self.coords(i))
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        if self.dims.len() == 1 {
            let s = i + j;
            return if s >= self.n { s - self.n } else { s };
        }
        let (mut out, mut a, mut b) = (0, i, j);
        for (&d, &s) in self.dims.iter().zip(&self.strides) {
            let (ca, cb) = (a / s, b / s);
            a %= s;
            b %= s;
            let c = ca + cb;
            out += if c >= d { c - d } else { c } * s;
        }
        out
    }

    pub fn neg(&self, i: usize) -> usize {
        if self.dims.len() == 1 {
            return if i == 0 { 0 } else { self.n - i };
        }
        let (mut out, mut a) = (0, i);
        for (&d, &s) in self.dims.iter().zip(&self.strides) {
            let c = a / s;
            a %= s;
            out += if c == 0 { 0 } else { d - c } * s;
        }
        out
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }
}
