use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hienergy::eigen::{build_gram, singular_spectrum};
use hienergy::extract::{
    bsg_extract, bsg_extract_v2, cs_period_search, find_configuration, nb_cover, small_t4_extract, CsOptions,
    ExtractionReport, T4Options,
};
use hienergy::genset::{gen, SetRecipe};
use hienergy::moments::{energy_k, energy_k_pair, level_sequence, mult_energy_k, sigma_k, t_k};
use hienergy::sets::{delta_sumset_size, magnification, magnification_k, Magnification};
use hienergy::spectrum::{dft, dim_exact, large_spectrum};
use hienergy::verify::{registry, run_inputs, run_suite, CheckInput, SuiteOptions, SuiteReport};
use hienergy::{Error, GSet, Limits, Sign};

#[derive(Parser)]
#[command(name = "hienergy", version, about = "Higher energies, tuple sumsets and structure extraction")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Print JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "HIENERGY_THREADS", default_value_t = 0)]
    threads: usize,
    /// Largest tuple space a single operation may materialize or scan.
    #[arg(long, global = true, default_value_t = Limits::default().cap_tuples)]
    cap_tuples: u128,
    /// Largest |A| for exhaustive subset searches.
    #[arg(long, global = true, default_value_t = Limits::default().cap_subsets)]
    cap_subsets: usize,
}

#[derive(Args)]
struct Source {
    /// Set file (`group: ...` header, one element per line).
    #[arg(long)]
    set: Option<PathBuf>,
    /// Set recipe, e.g. `random:N=64,delta=0.25,seed=1`.
    #[arg(long, conflicts_with = "set")]
    recipe: Option<String>,
    /// Second set file.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Second set recipe.
    #[arg(long, conflicts_with = "b")]
    b_recipe: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one quantity of a set.
    Compute {
        quantity: Quantity,
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Threshold for `Ralpha`.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Run an extraction pipeline.
    Extract {
        pipeline: Pipeline,
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// `n,m` for the iterated sumset conclusion.
        #[arg(long, default_value = "1,1")]
        nm: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configuration coefficients, e.g. `0,1,2`.
        #[arg(long, default_value = "0,1,2")]
        c: String,
        /// `+` or `-`.
        #[arg(long, default_value = "-", allow_hyphen_values = true)]
        sign: String,
        /// Keep covering past the target (smallT4).
        #[arg(long)]
        exhaust: bool,
        /// Largest n tried by `cover`.
        #[arg(long, default_value_t = 64)]
        max_n: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named checks on given sets.
    Verify {
        /// Comma-separated check ids, or `all`.
        ids: String,
        /// Set files (repeatable).
        #[arg(long)]
        set: Vec<PathBuf>,
        /// Set recipes (repeatable).
        #[arg(long)]
        recipe: Vec<String>,
        /// Second set file attached to every input.
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Full report (JSON).
        #[arg(long, default_value = "hienergy-report.json")]
        out: PathBuf,
    },
    /// Run checks over a recipe family.
    Suite {
        /// Comma-separated check ids, or `all`.
        ids: String,
        /// Recipes (repeatable).
        #[arg(long)]
        recipe: Vec<String>,
        /// File with one recipe per line.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "hienergy-report.json")]
        out: PathBuf,
    },
    /// Generate a set from a recipe.
    Gen {
        recipe: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    #[value(name = "Ek")]
    Ek,
    #[value(name = "Tk")]
    Tk,
    #[value(name = "sigmak")]
    Sigmak,
    #[value(name = "Dk")]
    Dk,
    #[value(name = "Sk")]
    Sk,
    #[value(name = "spectrum")]
    Spectrum,
    #[value(name = "Ralpha")]
    Ralpha,
    #[value(name = "dim")]
    Dim,
    #[value(name = "mag")]
    Mag,
    #[value(name = "magk")]
    Magk,
    #[value(name = "levels")]
    Levels,
    #[value(name = "multE")]
    MultE,
    #[value(name = "lambdas")]
    Lambdas,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    #[value(name = "bsg1")]
    Bsg1,
    #[value(name = "bsg2")]
    Bsg2,
    #[value(name = "smallT4")]
    SmallT4,
    #[value(name = "cs")]
    Cs,
    #[value(name = "config")]
    Config,
    #[value(name = "cover")]
    Cover,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Text,
    Json,
    Csv,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Hard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Usage(_) => 2,
        Failure::Hard(_) => 1,
        Failure::Lib(e) if e.is_cap() => 3,
        Failure::Lib(Error::Invariant(_) | Error::NonConvergence(_) | Error::Overflow(_)) => 1,
        Failure::Lib(_) => 2,
    }
}

fn load(path: &Option<PathBuf>, recipe: &Option<String>) -> Res<Option<GSet>> {
    match (path, recipe) {
        (Some(p), _) => Ok(Some(read_set(p)?)),
        (None, Some(r)) => Ok(Some(gen(&r.parse::<SetRecipe>()?)?)),
        (None, None) => Ok(None),
    }
}

fn read_set(p: &Path) -> Res<GSet> {
    GSet::read_file(p).map_err(|e| match e {
        Error::Parse { .. } => Failure::Usage(format!("{}: {e}", p.display())),
        other => Failure::Lib(other),
    })
}

impl Source {
    fn a(&self) -> Res<GSet> {
        load(&self.set, &self.recipe)?.ok_or_else(|| Failure::Usage("give --set or --recipe".into()))
    }

    fn b_or(&self, a: &GSet) -> Res<GSet> {
        Ok(load(&self.b, &self.b_recipe)?.unwrap_or_else(|| a.clone()))
    }
}

/// Integers beyond `u64` go out as strings.
fn exact(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn ratio_text(m: &Magnification) -> String {
    if *m.ratio.denom() == 1 {
        m.ratio.numer().to_string()
    } else {
        format!("{}/{}", m.ratio.numer(), m.ratio.denom())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn set_csv(s: &GSet) -> String {
    let mut out = String::from("element\n");
    for x in s.iter() {
        out += &csv_field(&x.to_string());
        out.push('\n');
    }
    out
}

fn scalar(fmt: Format, q: &str, k: Option<u32>, v: Value, text: String) -> String {
    match fmt {
        Format::Text => text + "\n",
        Format::Json => json!({ "quantity": q, "k": k, "value": v }).to_string() + "\n",
        Format::Csv => {
            let ks = k.map(|k| k.to_string()).unwrap_or_default();
            format!("quantity,k,value\n{q},{ks},{}\n", csv_field(&text))
        }
    }
}

fn compute(q: Quantity, src: &Source, k: u32, alpha: f64, limits: &Limits, fmt: Format) -> Res<String> {
    let a = src.a()?;
    let name = q.to_possible_value().expect("no skipped variants").get_name().to_string();
    let n = |x: u128| scalar(fmt, &name, Some(k), exact(x), x.to_string());
    Ok(match q {
        Quantity::Ek => match load(&src.b, &src.b_recipe)? {
            Some(b) => n(energy_k_pair(&a, &b, k)?),
            None => n(energy_k(&a, k)?),
        },
        Quantity::Tk => n(t_k(&a, k)?),
        Quantity::Sigmak => n(sigma_k(&a, k)?),
        Quantity::MultE => n(mult_energy_k(&a, k)?),
        Quantity::Dk | Quantity::Sk => {
            let b = src.b_or(&a)?;
            let sign = if matches!(q, Quantity::Dk) { Sign::Minus } else { Sign::Plus };
            let sets = vec![&a; k as usize];
            n(delta_sumset_size(&sets, &b, sign, limits)?)
        }
        Quantity::Mag | Quantity::Magk => {
            let b = src.b_or(&a)?;
            let (m, kk) = match q {
                Quantity::Mag => (magnification(&a, &b, limits)?, None),
                _ => (magnification_k(&a, &b, k as usize, limits)?, Some(k)),
            };
            let t = ratio_text(&m);
            match fmt {
                Format::Json => {
                    json!({ "quantity": name, "k": kk, "value": t, "image_size": m.image_size, "witness": m.witness })
                        .to_string()
                        + "\n"
                }
                _ => scalar(fmt, &name, kk, Value::Null, t),
            }
        }
        Quantity::Dim => {
            let d = dim_exact(&a, limits)?;
            match fmt {
                Format::Json => json!({ "quantity": name, "value": d.dim, "witness": d.witness }).to_string() + "\n",
                _ => scalar(fmt, &name, None, Value::Null, d.dim.to_string()),
            }
        }
        Quantity::Levels => {
            let v = level_sequence(&a)?;
            match fmt {
                Format::Text => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n",
                Format::Json => json!({ "quantity": name, "value": v }).to_string() + "\n",
                Format::Csv => {
                    let mut s = String::from("rank,value\n");
                    for (i, x) in v.iter().enumerate() {
                        let _ = writeln!(s, "{},{x}", i + 1);
                    }
                    s
                }
            }
        }
        Quantity::Lambdas => {
            let b = src.b_or(&a)?;
            let spec = singular_spectrum(&build_gram(&a, &b, k, limits)?, limits)?;
            match fmt {
                Format::Json => spec.to_json().to_string() + "\n",
                Format::Text => spec.lambdas_sq.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" ") + "\n",
                Format::Csv => {
                    let mut s = String::from("index,lambda_sq\n");
                    for (i, x) in spec.lambdas_sq.iter().enumerate() {
                        let _ = writeln!(s, "{},{x:.12}", i + 1);
                    }
                    s
                }
            }
        }
        Quantity::Spectrum => {
            let t = dft(&a)?;
            match fmt {
                Format::Json => {
                    let v: Vec<[f64; 2]> = t.values().iter().map(|z| [z.re, z.im]).collect();
                    json!({ "quantity": name, "group": a.group(), "values": v }).to_string() + "\n"
                }
                _ => t.to_csv()?,
            }
        }
        Quantity::Ralpha => {
            let r = large_spectrum(&a, alpha)?;
            match fmt {
                Format::Text => r.to_file_string(),
                Format::Json => json!({ "quantity": name, "alpha": alpha, "value": r }).to_string() + "\n",
                Format::Csv => set_csv(&r),
            }
        }
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Res<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Failure::Usage(format!("bad entry '{x}' in --{what}"))))
        .collect()
}

fn report_line(r: &ExtractionReport) -> String {
    let outs: Vec<String> = r.outputs.iter().map(|(k, v)| format!("|{k}|={}", v.len())).collect();
    let ratios: Vec<String> = r.ratios.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
    format!(
        "{}: measured={} claimed={:.6} ratio={:.6} checks={} {} {}",
        r.pipeline,
        r.measured,
        r.claimed,
        r.ratio,
        if r.all_checks_pass() { "ok" } else { "FAILED" },
        outs.join(" "),
        ratios.join(" ")
    )
    .trim_end()
    .to_string()
}

#[allow(clippy::too_many_arguments)]
fn extract(
    p: Pipeline,
    src: &Source,
    eps: f64,
    nm: &str,
    k: usize,
    trials: usize,
    seed: u64,
    c: &str,
    sign: &str,
    exhaust: bool,
    max_n: usize,
    out: &Option<PathBuf>,
    fmt: Format,
) -> Res<String> {
    let a = src.a()?;
    let sign: Sign = sign.parse()?;
    let rep = match p {
        Pipeline::Bsg1 => bsg_extract(&a, eps)?,
        Pipeline::Bsg2 => {
            let v: Vec<usize> = parse_list(nm, "nm")?;
            let [n, m] = v[..] else {
                return Err(Failure::Usage("--nm takes two values n,m".into()));
            };
            bsg_extract_v2(&a, eps, (n, m), seed)?
        }
        Pipeline::SmallT4 => small_t4_extract(&a, T4Options { exhaust, ..T4Options::default() })?,
        Pipeline::Cs => {
            let b = src.b_or(&a)?;
            cs_period_search(&a, &b, CsOptions { k, trials, seed, ..CsOptions::default() })?
        }
        Pipeline::Config => {
            let cs: Vec<i64> = parse_list(c, "c")?;
            let found = find_configuration(&a, &cs, sign)?;
            let v = match &found {
                Some((x, d)) => json!({ "x": x, "d": d }),
                None => Value::Null,
            };
            write_out(out, &json!({ "pipeline": "config", "c": cs, "sign": sign.to_string(), "result": v }))?;
            return Ok(match (fmt, found) {
                (Format::Json, _) => v.to_string() + "\n",
                (Format::Csv, Some((x, d))) => format!("x,d\n{},{}\n", csv_field(&x.to_string()), csv_field(&d.to_string())),
                (Format::Csv, None) => "x,d\n".into(),
                (Format::Text, Some((x, d))) => format!("({x},{d})\n"),
                (Format::Text, None) => "none\n".into(),
            });
        }
        Pipeline::Cover => {
            let found = nb_cover(&a, max_n)?;
            write_out(out, &json!({ "pipeline": "cover", "n": found }))?;
            return Ok(match (fmt, found) {
                (Format::Json, _) => json!({ "n": found }).to_string() + "\n",
                (Format::Csv, _) => format!("n\n{}\n", found.map(|n| n.to_string()).unwrap_or_default()),
                (Format::Text, Some(n)) => format!("{n}\n"),
                (Format::Text, None) => "none\n".into(),
            });
        }
    };
    let body = serde_json::to_value(&rep).map_err(|e| Failure::Lib(Error::Io(e.to_string())))?;
    write_out(out, &body)?;
    let text = match fmt {
        Format::Json if out.is_none() => body.to_string() + "\n",
        Format::Csv => {
            let mut s = String::from("pipeline,measured,claimed,ratio,checks\n");
            let _ = writeln!(s, "{},{},{},{},{}", rep.pipeline, rep.measured, rep.claimed, rep.ratio, rep.all_checks_pass());
            s
        }
        _ => report_line(&rep) + "\n",
    };
    if !rep.all_checks_pass() {
        print!("{text}");
        return Err(Failure::Hard(format!("{} stage checks failed", rep.pipeline)));
    }
    Ok(text)
}

fn write_out(out: &Option<PathBuf>, v: &Value) -> Res<()> {
    if let Some(p) = out {
        let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Lib(Error::Io(e.to_string())))?;
        std::fs::write(p, s + "\n").map_err(|e| Failure::Lib(e.into()))?;
    }
    Ok(())
}

fn check_ids(ids: &str) -> Res<Vec<&'static str>> {
    let reg = registry();
    if ids.trim() == "all" {
        return Ok(reg.iter().map(|c| c.id).collect());
    }
    ids.split(',')
        .map(|s| {
            let s = s.trim();
            reg.iter().find(|c| c.id == s).map(|c| c.id).ok_or_else(|| Failure::Usage(format!("unknown check id '{s}'")))
        })
        .collect()
}

fn finish_report(rep: &SuiteReport, out: &Path, fmt: Format) -> Res<String> {
    let body = serde_json::to_string_pretty(rep).map_err(|e| Failure::Lib(Error::Io(e.to_string())))?;
    std::fs::write(out, body + "\n").map_err(|e| Failure::Lib(e.into()))?;
    let fails = rep.hard_failures();
    let mut s = match fmt {
        Format::Csv => rep.summary_csv()?,
        Format::Json => {
            json!({ "summary": rep.summary, "skipped": rep.skipped.len(), "hard_failures": fails.len(), "report": out })
                .to_string()
                + "\n"
        }
        Format::Text => {
            let mut s = format!("{:<12} {:>9} {:>9} {:>14}\n", "check", "rows", "failures", "max ratio");
            for r in &rep.summary {
                let _ = writeln!(s, "{:<12} {:>9} {:>9} {:>14.6}", r.check_id, r.instances, r.failures, r.max_ratio);
            }
            for sk in &rep.skipped {
                let _ = writeln!(s, "skipped {} on {}: {}", sk.check_id, sk.instance, sk.reason);
            }
            for f in &fails {
                let _ = writeln!(s, "FAIL {} [{}] {}: {} {} {}", f.check_id, f.instance, f.label, f.lhs, f.relation, f.rhs);
            }
            s
        }
    };
    if fmt != Format::Json {
        let _ = writeln!(s, "report: {}", out.display());
    }
    if fails.is_empty() {
        Ok(s)
    } else {
        print!("{s}");
        Err(Failure::Hard(format!("{} hard check failures", fails.len())))
    }
}

fn run(cli: Cli) -> Res<String> {
    let g = &cli.global;
    let fmt = if g.json {
        Format::Json
    } else if g.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let limits = Limits { cap_tuples: g.cap_tuples, cap_subsets: g.cap_subsets, ..Limits::default() };
    match &cli.cmd {
        Cmd::Compute { quantity, src, k, alpha } => compute(*quantity, src, *k, *alpha, &limits, fmt),
        Cmd::Extract { pipeline, src, eps, nm, k, trials, seed, c, sign, exhaust, max_n, out } => {
            extract(*pipeline, src, *eps, nm, *k, *trials, *seed, c, sign, *exhaust, *max_n, out, fmt)
        }
        Cmd::Verify { ids, set, recipe, b, k, l, seed, out } => {
            let ids = check_ids(ids)?;
            let b = b.as_ref().map(|p| read_set(p)).transpose()?;
            let mut sources: Vec<(String, GSet)> = Vec::new();
            for p in set {
                sources.push((p.display().to_string(), read_set(p)?));
            }
            for r in recipe {
                sources.push((r.clone(), gen(&r.parse::<SetRecipe>()?)?));
            }
            if sources.is_empty() {
                return Err(Failure::Usage("give at least one --set or --recipe".into()));
            }
            let inputs: Vec<CheckInput> = sources
                .into_iter()
                .enumerate()
                .map(|(i, (label, a))| {
                    let mut inp = CheckInput::new(a).with_label(label).with_seed(seed.wrapping_add(i as u64));
                    if let Some(b) = &b {
                        inp = inp.with_b(b.clone());
                    }
                    inp.k = *k;
                    inp.l = *l;
                    inp
                })
                .collect();
            let rep = run_inputs(&inputs, &ids, &limits)?;
            finish_report(&rep, out, fmt)
        }
        Cmd::Suite { ids, recipe, family, k, l, seed, out } => {
            let ids = check_ids(ids)?;
            let mut lines = recipe.clone();
            if let Some(f) = family {
                let text = std::fs::read_to_string(f).map_err(|e| Failure::Lib(e.into()))?;
                lines.extend(text.lines().map(str::trim).filter(|s| !s.is_empty() && !s.starts_with('#')).map(String::from));
            }
            if lines.is_empty() {
                return Err(Failure::Usage("give --recipe or --family".into()));
            }
            let fam = lines.iter().map(|r| r.parse::<SetRecipe>()).collect::<hienergy::Result<Vec<_>>>()?;
            let opts = SuiteOptions { limits, k: *k, l: *l, seed: *seed };
            let rep = run_suite(&fam, &ids, &opts)?;
            finish_report(&rep, out, fmt)
        }
        Cmd::Gen { recipe, out } => {
            let a = gen(&recipe.parse::<SetRecipe>()?)?;
            let text = match fmt {
                Format::Json => json!(a).to_string() + "\n",
                Format::Csv => set_csv(&a),
                Format::Text => a.to_file_string(),
            };
            match out {
                Some(p) => {
                    a.write_file(p)?;
                    Ok(format!("wrote {} elements to {}\n", a.len(), p.display()))
                }
                None => Ok(text),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match run(cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Hard(m) => eprintln!("{m}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
