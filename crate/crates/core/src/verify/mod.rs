//! Named checks of identities and inequalities on concrete sets, and a suite runner
//! sweeping recipe families.

mod extract_checks;
mod identities;
mod inequalities;
mod spectral;
mod subgroup;

pub use spectral::cover_threshold;
pub use subgroup::predicted_qr_depth;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genset::{gen, SetRecipe};
use crate::limits::Limits;
use crate::sets::GSet;

/// Relative tolerance for floating comparisons.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor under [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        })
    }
}

/// `Hard` rows are theorems with explicit constants; `Report` rows carry a measured
/// implied constant and pass whenever it is finite (plus any documented side condition).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Hard,
    Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    /// Which inequality of the family, with its parameters.
    pub label: String,
    /// The input set(s) this row was computed on.
    pub instance: String,
    /// Named constants of the instance (`K`, `M`, `kappa_k`, `delta`, ...).
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Exact decimal values for integer rows.
    pub lhs_exact: Option<String>,
    pub rhs_exact: Option<String>,
    pub relation: Relation,
    pub kind: CheckKind,
    pub pass: bool,
    /// `lhs / rhs`.
    pub ratio: f64,
    /// `0` for exact rows.
    pub tolerance: f64,
    pub witness: Option<serde_json::Value>,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

pub(crate) fn big(x: impl Into<BigUint>) -> BigUint {
    x.into()
}

pub(crate) fn bpow(x: impl Into<BigUint>, e: u32) -> BigUint {
    x.into().pow(e)
}

fn bf(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Row builder shared by the check families.
pub(crate) struct Rows {
    id: &'static str,
    instance: String,
    params: BTreeMap<String, f64>,
    out: Vec<CheckResult>,
}

impl Rows {
    pub(crate) fn new(id: &'static str, instance: impl Into<String>) -> Self {
        Rows { id, instance: instance.into(), params: BTreeMap::new(), out: Vec::new() }
    }

    pub(crate) fn param(&mut self, key: &str, v: f64) {
        self.params.insert(key.into(), v);
    }

    fn push(&mut self, label: String, lhs: f64, rhs: f64, relation: Relation, kind: CheckKind, pass: bool, tol: f64) -> &mut CheckResult {
        self.out.push(CheckResult {
            check_id: self.id.to_string(),
            label,
            instance: self.instance.clone(),
            params: self.params.clone(),
            lhs,
            rhs,
            lhs_exact: None,
            rhs_exact: None,
            relation,
            kind,
            pass,
            ratio: ratio_of(lhs, rhs),
            tolerance: tol,
            witness: None,
        });
        self.out.last_mut().expect("just pushed")
    }

    /// Exact integer comparison.
    pub(crate) fn exact(&mut self, label: impl Into<String>, lhs: BigUint, rel: Relation, rhs: BigUint) -> &mut CheckResult {
        let pass = match rel {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        };
        let row = self.push(label.into(), bf(&lhs), bf(&rhs), rel, CheckKind::Hard, pass, 0.0);
        row.lhs_exact = Some(lhs.to_string());
        row.rhs_exact = Some(rhs.to_string());
        row
    }

    /// Floating comparison with the default tolerance.
    pub(crate) fn real(&mut self, label: impl Into<String>, lhs: f64, rel: Relation, rhs: f64) -> &mut CheckResult {
        let tol = (REL_TOL * lhs.abs().max(rhs.abs())).max(ABS_TOL);
        self.real_tol(label, lhs, rel, rhs, tol)
    }

    pub(crate) fn real_tol(&mut self, label: impl Into<String>, lhs: f64, rel: Relation, rhs: f64, tol: f64) -> &mut CheckResult {
        let pass = lhs.is_finite()
            && rhs.is_finite()
            && match rel {
                Relation::Eq => (lhs - rhs).abs() <= tol,
                Relation::Le => lhs <= rhs + tol,
                Relation::Ge => lhs + tol >= rhs,
            };
        self.push(label.into(), lhs, rhs, rel, CheckKind::Hard, pass, tol)
    }

    /// A boolean condition as a hard `1 = 1` row.
    pub(crate) fn flag(&mut self, label: impl Into<String>, ok: bool) -> &mut CheckResult {
        let v = if ok { 1.0 } else { 0.0 };
        self.push(label.into(), v, 1.0, Relation::Eq, CheckKind::Hard, ok, 0.0)
    }

    /// Implied-constant report: `measured rel claimed` up to an unknown constant.
    pub(crate) fn report(&mut self, label: impl Into<String>, measured: f64, rel: Relation, claimed: f64) -> &mut CheckResult {
        let r = ratio_of(measured, claimed);
        let pass = r.is_finite();
        self.push(label.into(), measured, claimed, rel, CheckKind::Report, pass, 0.0)
    }

    pub(crate) fn report_if(&mut self, label: impl Into<String>, measured: f64, rel: Relation, claimed: f64, ok: bool) -> &mut CheckResult {
        let row = self.report(label, measured, rel, claimed);
        row.pass &= ok;
        row
    }

    pub(crate) fn finish(self) -> Vec<CheckResult> {
        self.out
    }
}

impl CheckResult {
    pub(crate) fn with_witness(&mut self, w: serde_json::Value) -> &mut Self {
        self.witness = Some(w);
        self
    }

    pub fn is_hard_failure(&self) -> bool {
        self.kind == CheckKind::Hard && !self.pass
    }
}

/// Input of a single check: the main set, an optional partner, optional order overrides.
#[derive(Clone, Debug)]
pub struct CheckInput {
    pub a: GSet,
    pub b: Option<GSet>,
    /// Overrides the default sweep over `k` (the main order parameter).
    pub k: Option<u32>,
    /// Overrides the default sweep over `l` (second order parameter, where present).
    pub l: Option<u32>,
    pub seed: u64,
    pub label: String,
}

impl CheckInput {
    pub fn new(a: GSet) -> Self {
        let label = format!("{} in {}", set_brief(&a), a.group());
        CheckInput { a, b: None, k: None, l: None, seed: 0, label }
    }

    pub fn with_b(mut self, b: GSet) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_l(mut self, l: u32) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn ks(&self, default: &[u32]) -> Vec<u32> {
        self.k.map_or_else(|| default.to_vec(), |k| vec![k])
    }

    pub(crate) fn ls(&self, default: &[u32]) -> Vec<u32> {
        self.l.map_or_else(|| default.to_vec(), |l| vec![l])
    }

    /// The partner set; `3·A` when none was given.
    pub(crate) fn partner(&self) -> GSet {
        self.b.clone().unwrap_or_else(|| self.a.dilate(3))
    }

    /// `[A, B, -A, -B + 1]`: the sets used where a check takes several arguments.
    pub(crate) fn pool(&self) -> Vec<GSet> {
        let a = &self.a;
        let b = self.partner();
        let g = a.group();
        let one = g.elem(&vec![1; g.dim()]).expect("unit vector is valid");
        vec![a.clone(), b.clone(), a.negate(), b.negate().translate(&one)]
    }
}

fn set_brief(a: &GSet) -> String {
    let shown: Vec<String> = a.iter().take(8).map(|x| x.to_string()).collect();
    let more = if a.len() > 8 { ",..." } else { "" };
    format!("{{{}{more}}} (|A|={})", shown.join(","), a.len())
}

/// First `m` elements (in element order).
pub(crate) fn head(a: &GSet, m: usize) -> GSet {
    if a.len() <= m {
        return a.clone();
    }
    GSet::new(a.group(), a.elems()[..m].iter().cloned()).expect("subset of a valid set")
}

pub(crate) fn need_nonempty(inp: &CheckInput) -> Result<()> {
    if inp.a.is_empty() || inp.b.as_ref().is_some_and(|b| b.is_empty()) {
        return Err(Error::Empty("check input"));
    }
    if let Some(b) = &inp.b {
        inp.a.check_same(b)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub kind: CheckKind,
    /// Runs on lattice (`Z^d`) inputs.
    pub lattice: bool,
    pub summary: &'static str,
}

type CheckFn = fn(&CheckInput, &Limits) -> Result<Vec<CheckResult>>;

macro_rules! registry {
    ($($id:literal, $kind:ident, $lat:literal, $f:path, $sum:literal;)*) => {
        const REGISTRY: &[(CheckInfo, CheckFn)] = &[
            $((CheckInfo { id: $id, kind: CheckKind::$kind, lattice: $lat, summary: $sum }, $f as CheckFn),)*
        ];
    };
}

registry! {
    "C1", Hard, true, inequalities::c1, "|A|^(2k) <= E_k(A) sigma_k(A-A)";
    "C2", Hard, true, inequalities::c2, "|A|^(4k) <= E_2k(A) T_k(A+A)";
    "C3", Hard, true, inequalities::c3, "|A|^(2k+4) <= E_(k+2)(A) E_k(A-+A)";
    "C4", Hard, true, identities::c4, "sum_{s,t} E(A_s, A_t) = E_(k+l)(A)";
    "C5", Hard, true, identities::c5, "E_(k+1)(A,B) = E(Δ(A), B^k)";
    "C6", Hard, true, inequalities::c6, "|A^k - Δ(A)| E_(k+1)(A) >= |A|^(2k+2)";
    "C7", Hard, true, inequalities::c7, "|A_1 x .. x A_(k-1) - Δ(A_k)| <= min(prod |A_i|, prod |A_j - A_k|)";
    "C8", Hard, false, spectral::c8, "T_k(Λ) >= delta alpha^(2k) |Λ|^(2k) for Λ in the large spectrum";
    "C9", Hard, false, spectral::c9, "|R_alpha \\ {0}| <= alpha^-3 delta^-1 (kappa_2k - delta^(2k-1))^(1/2k)";
    "C10", Hard, false, spectral::c10, "large nonzero Fourier coefficient from kappa_k; kappa monotonicity";
    "C11", Hard, true, inequalities::c11, "triangle inequalities for tuple sumsets";
    "C13", Hard, true, inequalities::c13, "D_n / S_n chains";
    "C14", Hard, false, spectral::c14, "|B + A| >= |A|^(1/(k+1)) |G|^(k/(k+1)) for depth-k bases";
    "C15", Hard, false, identities::c15, "|A_1 x .. x A_k - Δ(G)| = |G| |A_1 x .. x A_(k-1) - Δ(A_k)|";
    "C16", Hard, true, inequalities::c16, "|A| |B + Δ(C)| <= |B + Δ(A)| |A + C|";
    "C17", Hard, true, inequalities::c17, "magnification-ratio sumset bounds";
    "C18", Hard, true, spectral::c18, "pattern-matrix singular values and magnification lower bounds";
    "C19", Hard, true, inequalities::c19, "|A + B|^k E_k(A) >= |A|^(2k) |B|";
    "C20", Hard, true, inequalities::c20, "sum_{s in P} |A -+ A_s| >= eta^2 |A|^6 / E_3(A)";
    "C21", Hard, true, inequalities::c21, "T_l(A) against E_3(A) and |A -+ A|";
    "C22", Hard, true, inequalities::c22, "(sum_{x in B} (A∘A)(x))^(4l) <= |A|^(6l-4) E_l(B) E_(l+2)(A)";
    "C24", Hard, true, identities::c24, "sum_s E_(1+alpha)(A_s, A) = E_(2+alpha)(A)";
    "C25", Hard, false, subgroup::c25, "characters of a multiplicative subgroup are eigenfunctions";
    "C26", Report, false, subgroup::c26, "invariant-set correlation sums against |Γ|^(-1/3) (|Q||Q1||Q2|)^(2/3)";
    "C27", Report, false, subgroup::c27, "subgroup sumset and magnification bounds";
    "C28", Hard, true, inequalities::c28, "product inequality for two tuple sumsets";
    "C29", Hard, false, spectral::c29, "sum basis of depth k is a difference basis of every depth m < k";
    "C30", Hard, false, spectral::c30, "nB = G threshold for depth-k bases";
    "C31", Hard, false, extract_checks::c31, "almost-period search output validation";
    "C32", Report, true, extract_checks::c32, "BSG pipeline implied constants";
    "C33", Report, true, extract_checks::c33, "small T_3 covering implied constants";
    "C34", Report, true, extract_checks::c34, "high-energy subset of A or A - A";
    "C35", Report, true, extract_checks::c35, "sum-product quantities for integer sets";
    "C36", Report, false, subgroup::c36, "F_p^* ⊆ 6Γ";
    "C37", Hard, false, extract_checks::c37, "configurations x + c_i d in A -+ A";
    "C38", Report, false, subgroup::c38, "difference-basis depth of the quadratic residues";
    "ek-slices", Hard, true, identities::ek_slices, "sum_s |A_s|^2 = E_k(A), sum_s |A_s| = |A|^k";
    "ruzsa-swap", Hard, true, identities::ruzsa_swap, "|Y x Z - Δ(X)| = |Y x X - Δ(Z)|";
    "gram-trace", Hard, true, identities::gram_trace, "pattern Gram trace and Frobenius norm";
}

pub fn registry() -> Vec<CheckInfo> {
    REGISTRY.iter().map(|(i, _)| *i).collect()
}

pub fn lookup(id: &str) -> Option<CheckInfo> {
    REGISTRY.iter().find(|(i, _)| i.id == id).map(|(i, _)| *i)
}

pub fn run_check(id: &str, input: &CheckInput, limits: &Limits) -> Result<Vec<CheckResult>> {
    let (info, f) = REGISTRY
        .iter()
        .find(|(i, _)| i.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))?;
    if !info.lattice && input.a.group().is_lattice() {
        return Err(Error::LatticeUnsupported(info.id));
    }
    f(input, limits)
}

/// Errors that mean "this check does not apply to this input" rather than a failure.
pub fn is_inapplicable(e: &Error) -> bool {
    matches!(e, Error::LatticeUnsupported(_) | Error::Precondition(_) | Error::CapExceeded { .. } | Error::Empty(_))
}

#[derive(Clone, Debug, Serialize)]
pub struct Skipped {
    pub check_id: String,
    pub instance: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub check_id: String,
    pub instances: usize,
    pub failures: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub results: Vec<CheckResult>,
    pub skipped: Vec<Skipped>,
    pub summary: Vec<SummaryRow>,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> Vec<&CheckResult> {
        self.results.iter().filter(|r| r.is_hard_failure()).collect()
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "instances", "failures", "max_ratio"]).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.summary {
            w.write_record([r.check_id.clone(), r.instances.to_string(), r.failures.to_string(), r.max_ratio.to_string()])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub limits: Limits,
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub seed: u64,
}

fn summarize(results: &[CheckResult], order: &[&str]) -> Vec<SummaryRow> {
    let mut by: BTreeMap<&str, SummaryRow> = BTreeMap::new();
    for r in results {
        let row = by.entry(r.check_id.as_str()).or_insert_with(|| SummaryRow {
            check_id: r.check_id.clone(),
            instances: 0,
            failures: 0,
            max_ratio: f64::NAN,
        });
        row.instances += 1;
        row.failures += usize::from(!r.pass);
        if r.ratio.is_finite() && !(row.max_ratio >= r.ratio) {
            row.max_ratio = r.ratio;
        }
    }
    order.iter().filter_map(|id| by.remove(id)).collect()
}

/// Runs every check on every instance, in parallel over the grid; results keep
/// (instance, check) order regardless of scheduling.
pub fn run_inputs(inputs: &[CheckInput], checks: &[&str], limits: &Limits) -> Result<SuiteReport> {
    for c in checks {
        if lookup(c).is_none() {
            return Err(Error::UnknownCheck(c.to_string()));
        }
    }
    let grid: Vec<(usize, &str)> = (0..inputs.len()).flat_map(|i| checks.iter().map(move |c| (i, *c))).collect();
    let cells: Vec<std::result::Result<Vec<CheckResult>, Skipped>> = grid
        .par_iter()
        .map(|&(i, id)| {
            let inp = &inputs[i];
            match run_check(id, inp, limits) {
                Ok(rows) => Ok(rows),
                Err(e) if is_inapplicable(&e) => {
                    Err(Skipped { check_id: id.to_string(), instance: inp.label.clone(), reason: e.to_string() })
                }
                Err(e) => {
                    let mut rows = Rows::new(lookup(id).expect("checked above").id, inp.label.clone());
                    rows.flag(format!("error: {e}"), false);
                    Ok(rows.finish())
                }
            }
        })
        .collect();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for c in cells {
        match c {
            Ok(rows) => results.extend(rows),
            Err(s) => skipped.push(s),
        }
    }
    let summary = summarize(&results, checks);
    Ok(SuiteReport { results, skipped, summary })
}

/// Generates each recipe and runs [`run_inputs`]; recipes that fail to generate are skipped.
pub fn run_suite(family: &[SetRecipe], checks: &[&str], opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut inputs = Vec::new();
    let mut skipped = Vec::new();
    for (i, r) in family.iter().enumerate() {
        match gen(r) {
            Ok(a) => {
                let mut inp = CheckInput::new(a).with_label(r.to_string()).with_seed(opts.seed.wrapping_add(i as u64));
                inp.k = opts.k;
                inp.l = opts.l;
                inputs.push(inp);
            }
            Err(e) => {
                for c in checks {
                    skipped.push(Skipped { check_id: c.to_string(), instance: r.to_string(), reason: e.to_string() });
                }
            }
        }
    }
    let mut rep = run_inputs(&inputs, checks, &opts.limits)?;
    skipped.extend(rep.skipped);
    rep.skipped = skipped;
    Ok(rep)
}
