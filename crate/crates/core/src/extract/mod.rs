//! Constructive procedures: popular differences, Katz–Koester containments, the
//! intersection-lemma BSG pipelines, small-`T_3` structure, almost periods,
//! configurations and covering numbers.

mod bsg;
mod cs;
pub mod family;
mod t4;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Elem;
use crate::moments::{autocorrelation, convolve_sets, energy_profile, EnergyProfile};
use crate::sets::{diffset, sumset, GSet, Sign};

pub use bsg::{bsg_extract, bsg_extract_v2};
pub use cs::{cs_period_search, CsOptions};
pub use family::{intersection_select, robust_core, Core, Family, Selection};
pub use t4::{small_t4_extract, T4Options};

/// One step of a pipeline; `ok` is `None` for purely informational stages.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub ok: Option<bool>,
    pub detail: String,
}

impl Stage {
    pub fn info(name: &str, detail: impl Into<String>) -> Self {
        Stage { name: name.into(), ok: None, detail: detail.into() }
    }

    pub fn check(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Stage { name: name.into(), ok: Some(ok), detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionReport {
    pub pipeline: String,
    pub seed: Option<u64>,
    pub profile: EnergyProfile,
    /// Normalizations and parameters (`K`, `M`, `eps`, ...).
    pub params: BTreeMap<String, f64>,
    pub outputs: BTreeMap<String, GSet>,
    /// The quantity the bound controls, and the bound without its implied constant.
    pub measured: f64,
    pub claimed: f64,
    /// `measured / claimed`.
    pub ratio: f64,
    /// Further measured-over-claimed ratios for secondary conclusions.
    pub ratios: BTreeMap<String, f64>,
    pub stages: Vec<Stage>,
}

impl ExtractionReport {
    pub(crate) fn new(pipeline: &str, a: &GSet) -> Result<Self> {
        Ok(ExtractionReport {
            pipeline: pipeline.into(),
            seed: None,
            profile: energy_profile(a, 4)?,
            params: BTreeMap::new(),
            outputs: BTreeMap::new(),
            measured: f64::NAN,
            claimed: f64::NAN,
            ratio: f64::NAN,
            ratios: BTreeMap::new(),
            stages: Vec::new(),
        })
    }

    pub(crate) fn set_result(&mut self, measured: f64, claimed: f64) {
        self.measured = measured;
        self.claimed = claimed;
        self.ratio = measured / claimed;
    }

    /// Every checked stage passed.
    pub fn all_checks_pass(&self) -> bool {
        self.stages.iter().all(|s| s.ok != Some(false))
    }

    pub fn output(&self, name: &str) -> Option<&GSet> {
        self.outputs.get(name)
    }
}

/// `|A|^2 / (2 |A - A|)`.
pub fn default_popularity(a: &GSet) -> Result<f64> {
    Ok((a.len() * a.len()) as f64 / (2.0 * diffset(a, a)?.len() as f64))
}

/// `P = {s : (A∘A)(s) >= threshold}`.
pub fn popular_set(a: &GSet, threshold: Option<f64>) -> Result<GSet> {
    if a.is_empty() {
        return Err(Error::Empty("popular differences of the empty set"));
    }
    let thr = match threshold {
        Some(t) => t,
        None => default_popularity(a)?,
    };
    let aa = autocorrelation(a)?;
    GSet::new(a.group(), aa.support().into_iter().filter(|&(_, c)| c as f64 >= thr).map(|(x, _)| x))
}

/// `sum_{s ∈ P} (A∘A)(s)`.
pub fn popular_mass(a: &GSet, p: &GSet) -> Result<u64> {
    let aa = autocorrelation(a)?;
    Ok(p.iter().map(|s| aa.get(s) as u64).sum())
}

/// `A_s = A ∩ (A - s)`.
pub fn slice(a: &GSet, s: &Elem) -> GSet {
    a.intersection(&a.translate(&a.group().op_neg(s)))
}

#[derive(Clone, Debug, Serialize)]
pub struct KatzKoester {
    pub embedded: GSet,
    pub holds: bool,
}

/// `A ∓ A_s` together with the check `A - A_s ⊆ D ∩ (D + s)` (`D = A - A`), resp.
/// `A + A_s ⊆ D ∩ (D - s)` (`D = A + A`). Outside `A - A` the slice is empty.
pub fn katz_koester(a: &GSet, s: &Elem, sign: Sign) -> Result<KatzKoester> {
    let g = a.group();
    let s = g.elem(s.coords())?;
    let d = match sign {
        Sign::Minus => diffset(a, a)?,
        Sign::Plus => sumset(a, a)?,
    };
    let a_s = slice(a, &s);
    if a_s.is_empty() {
        return Ok(KatzKoester { embedded: GSet::empty(g), holds: true });
    }
    let (embedded, shift) = match sign {
        Sign::Minus => (diffset(a, &a_s)?, s.clone()),
        Sign::Plus => (sumset(a, &a_s)?, g.op_neg(&s)),
    };
    let target = d.intersection(&d.translate(&shift));
    Ok(KatzKoester { holds: embedded.is_subset(&target), embedded })
}

/// `||(A*B)(x) - (A*B)(x+t)||_2^2`, exactly.
pub fn almost_period_check(a: &GSet, b: &GSet, t: &Elem) -> Result<u128> {
    a.check_same(b)?;
    let g = a.group();
    let t = g.elem(t.coords())?;
    let c = convolve_sets(a, b)?;
    let mut sq: u128 = 0;
    let mut cross: u128 = 0;
    for (x, v) in c.support() {
        sq += (v * v) as u128;
        cross += (v * c.get(&g.op_add(&x, &t))) as u128;
    }
    Ok(2 * sq - 2 * cross)
}

/// First `(x, d)`, `d != 0`, in element order (`x` outer) with every `x + c_i d ∈ A ± A`.
pub fn find_configuration(a: &GSet, c: &[i64], sign: Sign) -> Result<Option<(Elem, Elem)>> {
    let g = a.group();
    g.require_cyclic("configuration search")?;
    if c.is_empty() || c.iter().all(|&x| x == 0) {
        return Err(Error::InvalidArgument("coefficients must not all vanish".into()));
    }
    let d_set = match sign {
        Sign::Minus => diffset(a, a)?,
        Sign::Plus => sumset(a, a)?,
    };
    let zero = g.zero();
    let elems: Vec<Elem> = g.enumerate_elements()?.collect();
    for x in &elems {
        for d in elems.iter().filter(|d| **d != zero) {
            if c.iter().all(|&ci| d_set.contains(&g.op_add(x, &g.op_scale(ci, d)))) {
                return Ok(Some((x.clone(), d.clone())));
            }
        }
    }
    Ok(None)
}

/// Smallest `n <= cap` with `nB = G`; stops early once `|nB|` stalls below `|G|`.
pub fn nb_cover(b: &GSet, cap: usize) -> Result<Option<usize>> {
    let g = b.group();
    let order = g.require_cyclic("covering number")?.iter().product::<u64>() as usize;
    if b.is_empty() {
        return Ok(None);
    }
    let mut cur = b.clone();
    for n in 1..=cap {
        if cur.len() == order {
            return Ok(Some(n));
        }
        let next = sumset(&cur, b)?;
        if next.len() == cur.len() {
            return Ok(None);
        }
        cur = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn z(xs: &[i64]) -> GSet {
        GSet::from_ints(&GroupSpec::integers(), xs).unwrap()
    }

    #[test]
    fn popular_and_kk() {
        let a = z(&[0, 1, 3]);
        assert_eq!(popular_set(&a, None).unwrap(), diffset(&a, &a).unwrap());
        let kk = katz_koester(&a, &Elem::new(&[1]), Sign::Minus).unwrap();
        assert!(kk.holds);
        assert_eq!(kk.embedded, a);
        assert!(katz_koester(&a, &Elem::new(&[2]), Sign::Plus).unwrap().holds);
    }

    #[test]
    fn periods_configs_covers() {
        let g = GroupSpec::cyclic(7).unwrap();
        let a = GSet::from_ints(&g, &[0, 1, 3]).unwrap();
        assert_eq!(almost_period_check(&a, &a, &Elem::new(&[1])).unwrap(), 8);
        assert_eq!(almost_period_check(&a, &a, &Elem::new(&[0])).unwrap(), 0);
        let a = GSet::from_ints(&g, &[0, 1, 2]).unwrap();
        let (x, d) = find_configuration(&a, &[0, 1, 2], Sign::Minus).unwrap().unwrap();
        assert_eq!((x.coords()[0], d.coords()[0]), (0, 1));
        let g5 = GroupSpec::cyclic(5).unwrap();
        assert!(find_configuration(&GSet::from_ints(&g5, &[0]).unwrap(), &[0, 1], Sign::Minus).unwrap().is_none());
        assert_eq!(nb_cover(&GSet::from_ints(&g5, &[0, 1]).unwrap(), 10).unwrap(), Some(4));
        let g8 = GroupSpec::cyclic(8).unwrap();
        assert_eq!(nb_cover(&GSet::from_ints(&g8, &[0, 2]).unwrap(), 10).unwrap(), None);
        assert_eq!(nb_cover(&GSet::full(&g8).unwrap(), 10).unwrap(), Some(1));
    }
}
