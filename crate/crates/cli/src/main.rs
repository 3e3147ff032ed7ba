//! `hirota`: generators, parameterization, certificates and soliton checks for the
//! Hirota variety of the g-cube.
//!
//! JSON goes to stdout (or `--out`), a one-line summary to stderr.
//! Exit codes: 0 success, 1 verdict false, 2 input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hirota_core::certify::{certify_main_component, certify_point, CertMode};
use hirota_core::ideal::{all_generators, evaluate_generators, GeneratorMode};
use hirota_core::io::{self, ParamsDoc, PointDoc, QStr, SolitonDoc};
use hirota_core::main_component::{
    check_a_relation, enumerate_a_relations, invert_point, phi, MainParams, MAX_RELATION_GENUS,
};
use hirota_core::numeric::{abel_eval, residual_grid, EvalContext, GridRow, Wide, DEFAULT_STEP};
use hirota_core::sampling::{
    random_full_rank_matrix, random_main_params, random_regular_params, random_separated,
    random_totally_positive_matrix, rng_from_seed,
};
use hirota_core::scalar::{parse_rational, rational};
use hirota_core::soliton::{soliton_tau, theta_at, theta_soliton_equivalence, SolitonData};
use hirota_core::{NumericExpSum, Rational};
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hirota", version, about = "Exact computations on the Hirota variety of the g-cube")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "HIROTA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List generators of the Hirota ideal.
    Generators {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value = "reduced")]
        mode: GeneratorMode,
        #[command(flatten)]
        common: Common,
    },
    /// Sample or evaluate the main-component parameterization, or invert a point.
    Param {
        #[arg(long, required_unless_present_any = ["params", "invert"])]
        genus: Option<usize>,
        /// Parameters to map instead of random ones.
        #[arg(long, conflicts_with = "invert")]
        params: Option<PathBuf>,
        /// Recover the parameters of a point in the image.
        #[arg(long)]
        invert: Option<PathBuf>,
        /// Also write the sampled parameters here.
        #[arg(long)]
        params_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate generators at a point.
    Verify {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value = "per-point")]
        mode: GeneratorMode,
        #[command(flatten)]
        common: Common,
    },
    /// Jacobian-rank certificate for the main component.
    Certify {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value = "modular")]
        mode: CertMode,
        /// Certify this point instead of a sampled one.
        #[arg(long)]
        point: Option<PathBuf>,
        /// Include wall-clock timings (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exact Hirota check of a soliton, or theta/soliton identification.
    SolitonCheck {
        #[command(flatten)]
        source: SolitonSource,
        /// Instead: compare theta under phi with the λ-matrix soliton, for these parameters.
        #[arg(long, conflicts_with_all = ["soliton", "k"])]
        params: Option<PathBuf>,
        /// Instead: the same comparison for random parameters of this genus.
        #[arg(long, conflicts_with_all = ["soliton", "k", "params"])]
        genus: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-difference KP residual of p = 2 ∂²ₓ log τ at random points.
    KpCheck {
        #[command(flatten)]
        source: SolitonSource,
        /// Use theta at this point.
        #[arg(long, conflicts_with_all = ["soliton", "k", "genus"])]
        point: Option<PathBuf>,
        /// Use theta at a random regular point of this genus.
        #[arg(long, conflicts_with_all = ["soliton", "k"])]
        genus: Option<usize>,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Dump `x,y,t,p,residual` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate quartic a-relations, optionally checking them at a point.
    Relations {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        check: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the Abel map exactly.
    Abel {
        /// 2g comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        /// g−1 comma-separated rationals (empty for g = 1).
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        ys: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct SolitonSource {
    /// Soliton document (matrix or Plücker coordinates).
    #[arg(long)]
    soliton: Option<PathBuf>,
    /// Random soliton with k rows ...
    #[arg(long, requires = "n")]
    k: Option<usize>,
    /// ... and n columns.
    #[arg(long, requires = "k")]
    n: Option<usize>,
}

struct Outcome {
    json: String,
    summary: String,
    ok: bool,
}

fn emit(common: &Common, outcome: &Outcome) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, &outcome.json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", outcome.json),
    }
    eprintln!("{}", outcome.summary);
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|x| parse_rational(x.trim()).map_err(Into::into)).collect()
}

fn qs(v: &[Rational]) -> Vec<QStr> {
    v.iter().cloned().map(QStr).collect()
}

fn generators(genus: usize, mode: GeneratorMode) -> Result<Outcome> {
    let set = all_generators(genus, mode)?;
    Ok(Outcome {
        json: io::generators_json(&set)?,
        summary: format!("{} {mode} generators for g={genus}", set.len()),
        ok: true,
    })
}

fn param(genus: Option<usize>, params: Option<&Path>, invert: Option<&Path>, params_out: Option<&Path>, seed: u64) -> Result<Outcome> {
    if let Some(path) = invert {
        let point = io::parse_point(&read(path)?)?;
        if genus.is_some_and(|g| g != point.genus()) {
            bail!("point has genus {}, not {}", point.genus(), genus.unwrap_or_default());
        }
        let params = invert_point(&point)?;
        return Ok(Outcome {
            json: io::params_json(&params)?,
            summary: format!("recovered lambda and kappa for g={}", params.genus()),
            ok: true,
        });
    }
    let params = match params {
        Some(path) => io::parse_params(&read(path)?)?,
        None => random_main_params(&mut rng_from_seed(seed), genus.expect("required by clap"))?,
    };
    if genus.is_some_and(|g| g != params.genus()) {
        bail!("parameters have genus {}, not {}", params.genus(), genus.unwrap_or_default());
    }
    if let Some(path) = params_out {
        io::write_file(&ParamsDoc::from(&params), path)?;
    }
    let point = phi(&params);
    Ok(Outcome {
        json: io::to_json(&PointDoc::from(&point))?,
        summary: format!("phi(lambda, kappa) for g={}", params.genus()),
        ok: true,
    })
}

#[derive(Serialize)]
struct Nonvanishing {
    label: String,
    value: QStr,
}

#[derive(Serialize)]
struct VerifyDoc {
    genus: usize,
    mode: String,
    generators: usize,
    vanishing: bool,
    nonvanishing: Vec<Nonvanishing>,
}

fn verify(point: &Path, genus: usize, mode: GeneratorMode) -> Result<Outcome> {
    let p = io::parse_point(&read(point)?)?;
    p.check_genus(genus)?;
    let set = all_generators(genus, mode)?;
    let values = evaluate_generators(&set, &p)?;
    let nonvanishing: Vec<Nonvanishing> = set
        .generators()
        .iter()
        .zip(values)
        .filter(|(_, v)| !v.is_zero())
        .map(|(gen, v)| Nonvanishing { label: gen.label().to_string(), value: QStr(v) })
        .collect();
    let ok = nonvanishing.is_empty();
    let summary = if ok {
        format!("all {} {mode} generators vanish", set.len())
    } else {
        let labels: Vec<&str> = nonvanishing.iter().map(|n| n.label.as_str()).collect();
        format!("{} of {} generators do not vanish: {}", labels.len(), set.len(), labels.join(", "))
    };
    let doc = VerifyDoc { genus, mode: mode.name().into(), generators: set.len(), vanishing: ok, nonvanishing };
    Ok(Outcome { json: io::to_json(&doc)?, summary, ok })
}

fn certify(genus: usize, mode: CertMode, point: Option<&Path>, timings: bool, seed: u64) -> Result<Outcome> {
    let mut report = match point {
        Some(path) => {
            let p = io::parse_point(&read(path)?)?;
            p.check_genus(genus)?;
            certify_point(&p, seed, mode)?
        }
        None => certify_main_component(genus, seed, mode)?,
    };
    if !timings {
        report.timings_ms = None;
    }
    let summary = format!(
        "g={genus} {mode}: rank {} of expected {}, projective dimension {} -> {}",
        report.jacobian_rank,
        report.expected_rank,
        report.main_component_dim_projective,
        if report.verdict { "certified" } else { "NOT certified" }
    );
    Ok(Outcome { json: io::report_json(&report)?, summary, ok: report.verdict })
}

/// A random soliton with totally positive matrix and separated κ in [−3, 3] when
/// `regular`, otherwise a random full-rank matrix with distinct κ.
fn random_soliton<R: Rng>(rng: &mut R, k: usize, n: usize, regular: bool) -> Result<SolitonData> {
    if regular {
        let a = random_totally_positive_matrix(rng, k, n)?;
        let gap = if n <= 12 { rational(1, 2) } else { rational(1, 10) };
        let kappa = random_separated(rng, n, -3, 3, &gap);
        Ok(SolitonData::from_matrix(&a, kappa)?)
    } else {
        let a = random_full_rank_matrix(rng, k, n)?;
        let kappa = hirota_core::sampling::random_distinct_rationals(rng, n);
        Ok(SolitonData::from_matrix(&a, kappa)?)
    }
}

fn load_soliton(src: &SolitonSource, seed: u64, regular: bool) -> Result<Option<SolitonData>> {
    match (&src.soliton, src.k, src.n) {
        (Some(path), None, None) => Ok(Some(io::parse_soliton(&read(path)?)?)),
        (None, Some(k), Some(n)) => {
            if k == 0 || k >= n || n > 16 {
                bail!("need 0 < k < n ≤ 16");
            }
            Ok(Some(random_soliton(&mut rng_from_seed(seed), k, n, regular)?))
        }
        (None, None, None) => Ok(None),
        _ => bail!("give either --soliton or both --k and --n"),
    }
}

#[derive(Serialize)]
struct HirotaCheckDoc {
    check: &'static str,
    soliton: SolitonDoc,
    tau_terms: usize,
    residual_terms: usize,
    vanishes: bool,
}

#[derive(Serialize)]
struct EquivalenceDoc {
    check: &'static str,
    params: ParamsDoc,
    equal: bool,
}

fn soliton_check(src: &SolitonSource, params: Option<&Path>, genus: Option<usize>, seed: u64) -> Result<Outcome> {
    if let Some(d) = load_soliton(src, seed, false)? {
        let tau = soliton_tau(&d);
        let residual = tau.hirota_form_pairwise();
        let ok = residual.is_empty();
        let doc = HirotaCheckDoc {
            check: "hirota",
            soliton: SolitonDoc::from_data(&d),
            tau_terms: tau.len(),
            residual_terms: residual.len(),
            vanishes: ok,
        };
        let summary = format!(
            "({},{})-soliton: {} exponentials, bilinear form {}",
            d.k(),
            d.n(),
            tau.len(),
            if ok { "vanishes exactly".to_string() } else { format!("has {} nonzero terms", residual.len()) }
        );
        return Ok(Outcome { json: io::to_json(&doc)?, summary, ok });
    }
    let params: MainParams<Rational> = match (params, genus) {
        (Some(path), _) => io::parse_params(&read(path)?)?,
        (None, Some(g)) => random_main_params(&mut rng_from_seed(seed), g)?,
        (None, None) => bail!("give --soliton, --k/--n, --params or --genus"),
    };
    let equal = theta_soliton_equivalence(&params)?;
    let summary = format!(
        "g={}: theta under phi {} the normalized (g,2g)-soliton",
        params.genus(),
        if equal { "equals" } else { "differs from" }
    );
    let doc = EquivalenceDoc { check: "theta-equivalence", params: ParamsDoc::from(&params), equal };
    Ok(Outcome { json: io::to_json(&doc)?, summary, ok: equal })
}

#[derive(Serialize)]
struct KpPoint {
    x: f64,
    y: f64,
    t: f64,
    p: f64,
    residual: f64,
    relative: f64,
    residual_coarse: f64,
}

#[derive(Serialize)]
struct KpDoc {
    source: String,
    step: f64,
    tolerance: f64,
    max_relative: f64,
    /// Aggregate residual at 10·step over that at step.
    refinement_ratio: f64,
    within_tolerance: bool,
    points: Vec<KpPoint>,
}

struct KpArgs<'a> {
    src: &'a SolitonSource,
    point: Option<&'a Path>,
    genus: Option<usize>,
    points: usize,
    step: f64,
    tol: f64,
    csv: Option<&'a Path>,
    seed: u64,
}

fn kp_check(a: KpArgs<'_>) -> Result<Outcome> {
    if !(a.step > 0.0) || !(a.tol > 0.0) {
        bail!("--step and --tol must be positive");
    }
    if a.points == 0 {
        bail!("--points must be positive");
    }
    let mut rng = rng_from_seed(a.seed);
    let (source, tau): (String, NumericExpSum) = if let Some(d) = load_soliton(a.src, a.seed, true)? {
        (format!("({},{})-soliton", d.k(), d.n()), soliton_tau(&d))
    } else if let Some(path) = a.point {
        let p = io::parse_point(&read(path)?)?;
        (format!("theta, g={}", p.genus()), theta_at(&p)?)
    } else if let Some(g) = a.genus {
        if g > 6 {
            bail!("kp-check samples genus ≤ 6");
        }
        let p = phi(&random_regular_params(&mut rng, g)?);
        (format!("theta, g={g}"), theta_at(&p)?)
    } else {
        bail!("give --soliton, --k/--n, --point or --genus");
    };
    let fine = EvalContext::<Wide>::new(&tau, a.step)?;
    let coarse = fine.with_step(a.step * 10.0)?;
    let pts: Vec<[f64; 3]> = (0..a.points).map(|_| [(); 3].map(|_| rng.gen_range(-1.0..=1.0))).collect();
    let mut rows = Vec::with_capacity(pts.len());
    let mut grid: Vec<GridRow> = Vec::with_capacity(pts.len());
    let fine_rows = residual_grid(&fine, &pts)?;
    let coarse_rows = residual_grid(&coarse, &pts)?;
    let (mut max_rel, mut sum_fine, mut sum_coarse) = (0.0f64, 0.0, 0.0);
    for (&[x, y, t], (f, c)) in pts.iter().zip(fine_rows.iter().zip(&coarse_rows)) {
        let r = fine.kp_residual(x, y, t)?;
        max_rel = max_rel.max(r.relative());
        sum_fine += f.residual;
        sum_coarse += c.residual;
        rows.push(KpPoint { x, y, t, p: f.p, residual: f.residual, relative: r.relative(), residual_coarse: c.residual });
        grid.push(*f);
    }
    if let Some(path) = a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for row in &grid {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let ratio = if sum_fine > 0.0 { sum_coarse / sum_fine } else { f64::INFINITY };
    let ok = max_rel <= a.tol;
    let summary = format!(
        "{source}: max relative KP residual {max_rel:.2e} (tolerance {:.0e}) at h={}, refinement ratio {ratio:.1}",
        a.tol, a.step
    );
    let doc = KpDoc {
        source,
        step: a.step,
        tolerance: a.tol,
        max_relative: max_rel,
        refinement_ratio: if ratio.is_finite() { ratio } else { f64::MAX },
        within_tolerance: ok,
        points: rows,
    };
    Ok(Outcome { json: io::to_json(&doc)?, summary, ok })
}

#[derive(Serialize)]
struct RelationDoc {
    left: Vec<String>,
    right: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<QStr>,
}

#[derive(Serialize)]
struct RelationsDoc {
    genus: usize,
    count: usize,
    truncated: bool,
    relations: Vec<RelationDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_vanish: Option<bool>,
}

fn relations(genus: usize, budget: usize, check: Option<&Path>) -> Result<Outcome> {
    if genus > MAX_RELATION_GENUS {
        bail!("relation enumeration supports g ≤ {MAX_RELATION_GENUS}");
    }
    let rels = enumerate_a_relations(genus, budget.saturating_add(1))?;
    let truncated = rels.len() > budget;
    let rels = &rels[..rels.len().min(budget)];
    let a = match check {
        Some(path) => {
            let p = io::parse_point(&read(path)?)?;
            p.check_genus(genus)?;
            Some(p.a)
        }
        None => None,
    };
    let mut docs = Vec::with_capacity(rels.len());
    for r in rels {
        let value = match &a {
            Some(a) => Some(QStr(check_a_relation(a, r)?)),
            None => None,
        };
        docs.push(RelationDoc {
            left: r.left.iter().map(ToString::to_string).collect(),
            right: r.right.iter().map(ToString::to_string).collect(),
            value,
        });
    }
    let all_vanish = a.as_ref().map(|_| docs.iter().all(|d| d.value.as_ref().is_some_and(|v| v.0.is_zero())));
    let summary = match all_vanish {
        Some(true) => format!("{} relations for g={genus}, all hold at the point", docs.len()),
        Some(false) => format!("{} relations for g={genus}, some fail at the point", docs.len()),
        None => format!("{} relations for g={genus}{}", docs.len(), if truncated { " (truncated)" } else { "" }),
    };
    let doc = RelationsDoc { genus, count: docs.len(), truncated, relations: docs, all_vanish };
    Ok(Outcome { json: io::to_json(&doc)?, summary, ok: all_vanish.unwrap_or(true) })
}

#[derive(Serialize)]
struct AbelDoc {
    genus: usize,
    kappa: Vec<QStr>,
    ys: Vec<QStr>,
    values: Vec<QStr>,
}

fn abel(kappa: &str, ys: &str) -> Result<Outcome> {
    let kappa = parse_list(kappa)?;
    let ys = parse_list(ys)?;
    let values = abel_eval(&kappa, &ys)?;
    let summary = format!("Abel map: {}", values.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "));
    let doc = AbelDoc { genus: values.len(), kappa: qs(&kappa), ys: qs(&ys), values: qs(&values) };
    Ok(Outcome { json: io::to_json(&doc)?, summary, ok: true })
}

fn run(cli: Cli) -> Result<(Outcome, Common)> {
    let (outcome, common) = match cli.command {
        Command::Generators { genus, mode, common } => (generators(genus, mode)?, common),
        Command::Param { genus, params, invert, params_out, common } => {
            (param(genus, params.as_deref(), invert.as_deref(), params_out.as_deref(), common.seed)?, common)
        }
        Command::Verify { point, genus, mode, common } => (verify(&point, genus, mode)?, common),
        Command::Certify { genus, mode, point, timings, common } => {
            (certify(genus, mode, point.as_deref(), timings, common.seed)?, common)
        }
        Command::SolitonCheck { source, params, genus, common } => {
            (soliton_check(&source, params.as_deref(), genus, common.seed)?, common)
        }
        Command::KpCheck { source, point, genus, points, step, tol, csv, common } => {
            let args = KpArgs {
                src: &source,
                point: point.as_deref(),
                genus,
                points,
                step,
                tol,
                csv: csv.as_deref(),
                seed: common.seed,
            };
            (kp_check(args)?, common)
        }
        Command::Relations { genus, budget, check, common } => (relations(genus, budget, check.as_deref())?, common),
        Command::Abel { kappa, ys, common } => (abel(&kappa, &ys)?, common),
    };
    Ok((outcome, common))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", anyhow!(e));
            return ExitCode::from(2);
        }
    }
    match run(cli).and_then(|(outcome, common)| emit(&common, &outcome).map(|_| outcome.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
