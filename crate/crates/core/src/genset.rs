//! Seeded generators for structured sets.
//!
//! Recipes are written `kind:key=value,...`, e.g. `qr:p=13`, `subgroup:p=13,t=3`,
//! `random:N=256,delta=0.1,seed=7`. The ambient group is `group=<literal>` or `N=<n>`
//! (cyclic); when omitted it is `Z` (or `Z/p` for the prime-field kinds).
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; a recipe with the same seed
//! always yields the same set.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{is_prime, pow_mod, primitive_root};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::sets::GSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetRecipe {
    /// `{start, ..., start + len - 1}`.
    Interval { group: GroupSpec, start: i64, len: u64 },
    /// `{start + sum_i l_i d_i : 0 <= l_i < lens_i}`.
    Gap { group: GroupSpec, start: i64, diffs: Vec<i64>, lens: Vec<u64> },
    /// Each element kept with probability `delta`, or exactly `size` uniform elements.
    /// Lattice groups sample from the box `[0, side)^d`.
    Random { group: GroupSpec, delta: Option<f64>, size: Option<usize>, side: Option<u64>, seed: u64 },
    /// `{g^{nl}}` of order `t` in `Z/p`.
    Subgroup { p: u64, t: u64 },
    /// Nonzero squares mod `p`.
    Qr { p: u64 },
    /// `n` integers with strictly increasing gaps; `1, 2, ...` or random gaps when seeded.
    Convex { n: usize, seed: Option<u64> },
    /// Greedy Sidon set of `n` elements in `group`.
    Sidon { group: GroupSpec, n: usize },
}

fn params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut m = BTreeMap::new();
    for part in body.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("recipe parameter '{part}' is not key=value")))?;
        if m.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate recipe parameter '{k}'")));
        }
    }
    Ok(m)
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidArgument(format!("bad value '{v}' for '{key}'"))),
        }
    }

    fn need<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| Error::InvalidArgument(format!("recipe needs '{key}'")))
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Vec<T>> {
        let v: String = self.need(key)?;
        v.split(';')
            .map(|x| x.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad entry '{x}' in '{key}'"))))
            .collect()
    }

    fn group(&mut self) -> Result<GroupSpec> {
        let g: Option<String> = self.take("group")?;
        let n: Option<u64> = self.take("N")?;
        match (g, n) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either group= or N=, not both".into())),
            (Some(g), None) => g.parse(),
            (None, Some(n)) => GroupSpec::cyclic(n),
            (None, None) => Ok(GroupSpec::integers()),
        }
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => Err(Error::InvalidArgument(format!("unknown recipe parameter '{k}'"))),
            None => Ok(()),
        }
    }
}

impl FromStr for SetRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let mut p = Params(params(body)?);
        let r = match kind.trim() {
            "interval" => SetRecipe::Interval { group: p.group()?, start: p.take("start")?.unwrap_or(0), len: p.need("len")? },
            "gap" => SetRecipe::Gap {
                group: p.group()?,
                start: p.take("start")?.unwrap_or(0),
                diffs: p.list("d")?,
                lens: p.list("L")?,
            },
            "random" => SetRecipe::Random {
                group: p.group()?,
                delta: p.take("delta")?,
                size: p.take("size")?,
                side: p.take("side")?,
                seed: p.take("seed")?.unwrap_or(0),
            },
            "subgroup" => SetRecipe::Subgroup { p: p.need("p")?, t: p.need("t")? },
            "qr" => SetRecipe::Qr { p: p.need("p")? },
            "convex" => SetRecipe::Convex { n: p.need("n")?, seed: p.take("seed")? },
            "sidon" => SetRecipe::Sidon { group: p.group()?, n: p.need("n")? },
            other => return Err(Error::InvalidArgument(format!("unknown recipe kind '{other}'"))),
        };
        p.finish()?;
        Ok(r)
    }
}

fn group_param(g: &GroupSpec) -> String {
    if g == &GroupSpec::integers() {
        String::new()
    } else {
        format!("group={},", g.literal())
    }
}

impl fmt::Display for SetRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[String]| v.join(";");
        let s = match self {
            SetRecipe::Interval { group, start, len } => format!("interval:{}start={start},len={len}", group_param(group)),
            SetRecipe::Gap { group, start, diffs, lens } => format!(
                "gap:{}start={start},d={},L={}",
                group_param(group),
                join(&diffs.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                join(&lens.iter().map(|x| x.to_string()).collect::<Vec<_>>())
            ),
            SetRecipe::Random { group, delta, size, side, seed } => {
                let mut s = format!("random:{}", group_param(group));
                if let Some(d) = delta {
                    s += &format!("delta={d},");
                }
                if let Some(n) = size {
                    s += &format!("size={n},");
                }
                if let Some(b) = side {
                    s += &format!("side={b},");
                }
                s + &format!("seed={seed}")
            }
            SetRecipe::Subgroup { p, t } => format!("subgroup:p={p},t={t}"),
            SetRecipe::Qr { p } => format!("qr:p={p}"),
            SetRecipe::Convex { n, seed: None } => format!("convex:n={n}"),
            SetRecipe::Convex { n, seed: Some(s) } => format!("convex:n={n},seed={s}"),
            SetRecipe::Sidon { group, n } => format!("sidon:{}n={n}", group_param(group)),
        };
        f.write_str(&s)
    }
}

fn one_dim(g: &GroupSpec, what: &str) -> Result<()> {
    if g.dim() != 1 {
        return Err(Error::InvalidArgument(format!("{what} recipes need a one-dimensional group, got {g}")));
    }
    Ok(())
}

fn prime_field(p: u64) -> Result<GroupSpec> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    GroupSpec::cyclic(p)
}

/// Build the set a recipe describes.
pub fn gen(recipe: &SetRecipe) -> Result<GSet> {
    match recipe {
        SetRecipe::Interval { group, start, len } => {
            one_dim(group, "interval")?;
            GSet::from_ints(group, &(0..*len as i64).map(|i| start + i).collect::<Vec<_>>())
        }
        SetRecipe::Gap { group, start, diffs, lens } => {
            one_dim(group, "gap")?;
            if diffs.len() != lens.len() || diffs.is_empty() {
                return Err(Error::InvalidArgument("gap needs matching nonempty d and L lists".into()));
            }
            let mut out = vec![*start];
            for (&d, &l) in diffs.iter().zip(lens) {
                out = out.iter().flat_map(|&x| (0..l as i64).map(move |j| x + j * d)).collect();
            }
            GSet::from_ints(group, &out)
        }
        SetRecipe::Random { group, delta, size, side, seed } => random_set(group, *delta, *size, *side, *seed),
        SetRecipe::Subgroup { p, t } => {
            let g = prime_field(*p)?;
            if *t == 0 || (p - 1) % t != 0 {
                return Err(Error::InvalidArgument(format!("t = {t} does not divide p - 1 = {}", p - 1)));
            }
            let step = pow_mod(primitive_root(*p)?, (p - 1) / t, *p);
            GSet::from_ints(&g, &(0..*t).map(|l| pow_mod(step, l, *p) as i64).collect::<Vec<_>>())
        }
        SetRecipe::Qr { p } => {
            if *p == 2 {
                return Err(Error::InvalidArgument("quadratic residues need an odd prime".into()));
            }
            let g = prime_field(*p)?;
            GSet::from_ints(&g, &(1..*p).map(|x| (x * x % p) as i64).collect::<Vec<_>>())
        }
        SetRecipe::Convex { n, seed } => {
            let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
            let mut x = 0i64;
            let mut gap = 0i64;
            let mut out = Vec::with_capacity(*n);
            for i in 0..*n {
                if i > 0 {
                    gap += match rng.as_mut() {
                        Some(r) => r.gen_range(1..=3),
                        None => 1,
                    };
                    x += gap;
                }
                out.push(x);
            }
            GSet::from_ints(&GroupSpec::integers(), &out)
        }
        SetRecipe::Sidon { group, n } => sidon_greedy(group, *n),
    }
}

fn random_set(group: &GroupSpec, delta: Option<f64>, size: Option<usize>, side: Option<u64>, seed: u64) -> Result<GSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, pick): (usize, Box<dyn Fn(usize) -> Elem>) = if group.is_lattice() {
        let side = side.ok_or_else(|| Error::InvalidArgument("random sets in a lattice need side=".into()))?;
        let d = group.dim();
        let total = (side as u128).checked_pow(d as u32).filter(|&t| t <= 1 << 32);
        let total = total.ok_or(Error::Overflow("random box size"))? as usize;
        (
            total,
            Box::new(move |mut i| {
                let mut c = vec![0i64; d];
                for slot in c.iter_mut().rev() {
                    *slot = (i as u64 % side) as i64;
                    i /= side as usize;
                }
                Elem::new(&c)
            }),
        )
    } else {
        if side.is_some() {
            return Err(Error::InvalidArgument("side= applies to lattice groups only".into()));
        }
        let g = group.clone();
        (group.order().unwrap() as usize, Box::new(move |i| g.elem_at(i).expect("index in range")))
    };
    let chosen: Vec<usize> = match (delta, size) {
        (Some(d), None) => {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::InvalidArgument(format!("delta {d} outside [0, 1]")));
            }
            (0..n).filter(|_| rng.gen_bool(d)).collect()
        }
        (None, Some(s)) => {
            if s > n {
                return Err(Error::InvalidArgument(format!("size {s} exceeds {n} available elements")));
            }
            sample(&mut rng, n, s).into_vec()
        }
        _ => return Err(Error::InvalidArgument("random recipes need exactly one of delta= or size=".into())),
    };
    GSet::new(group, chosen.into_iter().map(pick))
}

/// Smallest-first greedy: keep `x` when all pairwise differences stay distinct.
fn sidon_greedy(group: &GroupSpec, n: usize) -> Result<GSet> {
    one_dim(group, "sidon")?;
    let bound = group.order().map(|o| o as i64);
    let mut kept: Vec<Elem> = Vec::new();
    let mut diffs = rustc_hash::FxHashSet::default();
    let mut x = 0i64;
    while kept.len() < n {
        if bound.is_some_and(|b| x >= b) {
            return Err(Error::Precondition(format!("{group} holds no Sidon set of size {n} by greedy search")));
        }
        let e = group.reduce(&[x]);
        let new: Vec<Elem> = kept
            .iter()
            .flat_map(|y| [group.op_sub(&e, y), group.op_sub(y, &e)])
            .collect();
        let distinct = new.iter().collect::<rustc_hash::FxHashSet<_>>().len() == new.len();
        if distinct && new.iter().all(|d| !diffs.contains(d)) {
            diffs.extend(new);
            kept.push(e);
        }
        x += 1;
    }
    GSet::new(group, kept)
}

/// Strictly increasing consecutive gaps.
pub fn is_convex(a: &GSet) -> bool {
    let v: Vec<i64> = a.iter().map(|e| e.coords()[0]).collect();
    v.windows(3).all(|w| w[1] - w[0] < w[2] - w[1])
}

/// Closed under multiplication mod `p` (the group must be `Z/p`).
pub fn is_mult_closed(a: &GSet) -> bool {
    let Some(&[p]) = a.group().moduli() else { return false };
    a.iter().all(|x| a.iter().all(|y| a.contains(&a.group().reduce(&[(x.coords()[0] as u64 * y.coords()[0] as u64 % p) as i64]))))
}
