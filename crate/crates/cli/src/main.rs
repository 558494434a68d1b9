//! `zastava`: command-line front end. Every command prints one JSON document
//! (or a text projection of it) and exits 0 iff all of its checks pass.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use zastava_core::quiver::{
    self, ChainsawRep, ChainsawRepJson, SpecialModule, StabilityParam, WallMode,
};
use zastava_core::yangian::{self, YangianMode};
use zastava_core::{character, lie, par, poisson, uea, Error, Report, Q};

#[derive(Parser, Debug)]
#[command(name = "zastava", version, about = "Exact checks for chainsaw quivers, their reductions and Yangian images")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Number of nodes.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Dimension vector, e.g. 0,1,1.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    d: Option<Vec<i64>>,
    /// Deformation parameters, rationals.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<String>>,
    /// Truncation order.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Largest relation index.
    #[arg(long, global = true)]
    max_index: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, env = "ZASTAVA_JOBS")]
    jobs: Option<usize>,
    /// JSON file with defaults for the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Relation suites.
    #[command(subcommand)]
    Verify(Verify),
    /// Molien-Weyl character with its oracles.
    Character {
        /// Also compare with PBW dimensions of the quantized algebra.
        #[arg(long)]
        pbw: bool,
    },
    /// Stability of a representation or of a special module.
    Stability {
        #[command(flatten)]
        src: RepSource,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        zeta: Option<Vec<String>>,
        /// Special module: L_l:<node>, L:<x>:<y> or Y:<start>:<len>.
        #[arg(long)]
        module: Option<String>,
    },
    /// Walls through a stability parameter.
    Walls {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        zeta: Vec<String>,
        #[arg(long, value_enum, default_value = "affine")]
        mode: Mode,
    },
    /// Stratum types of the quotient.
    Strata,
    /// Partition dimension bound over every partition tuple.
    Dimbound {
        /// Check one tuple instead, e.g. "2;1,1".
        #[arg(long)]
        partitions: Option<String>,
    },
    /// Moment map and the cokernel of its differential.
    Moment {
        #[command(flatten)]
        src: RepSource,
    },
    /// Collapse a cyclic representation to one node.
    Collapse {
        #[command(flatten)]
        src: RepSource,
    },
    /// Spectral pair of a generic d x d matrix, symbolically.
    SpectralPair,
}

#[derive(Subcommand, Debug)]
enum Verify {
    Poisson,
    Quantum,
    Yangian {
        #[arg(long, value_enum, default_value = "finite")]
        mode: YMode,
    },
    Jacobi,
    /// The displayed examples of the classical reduction.
    Examples,
    /// Etale coordinates at sampled points.
    Etale {
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// The d = 1 commutator oracle.
    D1,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Finite,
    Affine,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum YMode {
    Finite,
    Affine,
    Classical,
}

#[derive(Args, Debug, Clone)]
struct RepSource {
    /// Representation as JSON.
    #[arg(long)]
    rep: Option<PathBuf>,
    /// The built-in singular point at d = (0,1,1).
    #[arg(long)]
    example: bool,
    /// A random moment-zero point for --n, --d, --seed.
    #[arg(long)]
    sample: bool,
}

/// Fully resolved run parameters; echoed into every output.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trunc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jobs: Option<usize>,
}

impl RunConfig {
    fn merge(flags: &Common) -> Result<RunConfig, String> {
        let base: RunConfig = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))?
            }
            None => RunConfig::default(),
        };
        Ok(RunConfig {
            n: flags.n.or(base.n),
            d: flags.d.clone().or(base.d),
            mu: flags.mu.clone().or(base.mu),
            trunc: flags.trunc.or(base.trunc),
            max_index: flags.max_index.or(base.max_index),
            seed: flags.seed.or(base.seed),
            format: flags.format.or(base.format),
            jobs: flags.jobs.or(base.jobs),
        })
    }

    fn shape(&self) -> Result<(usize, Vec<i64>), String> {
        let d = self.d.clone().ok_or("--d is required")?;
        let n = self.n.unwrap_or(d.len());
        if d.len() != n {
            return Err(format!("--d has {} entries but --n is {n}", d.len()));
        }
        Ok((n, d))
    }

    fn mu(&self, n: usize) -> Result<Vec<Q>, String> {
        match &self.mu {
            None => Ok(vec![Q::zero(); n]),
            Some(v) => {
                let mu = parse_q(v)?;
                if mu.len() != n {
                    return Err(format!("--mu needs {n} entries"));
                }
                Ok(mu)
            }
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

fn parse_q(v: &[String]) -> Result<Vec<Q>, String> {
    v.iter().map(|s| s.trim().parse::<Q>().map_err(|_| format!("not a rational: {s}"))).collect()
}

fn dims(d: &[i64]) -> Result<Vec<usize>, String> {
    d.iter().map(|&x| usize::try_from(x).map_err(|_| format!("negative dimension {x}"))).collect()
}

struct Outcome {
    ok: bool,
    result: Value,
}

fn report(rep: Report) -> Outcome {
    Outcome { ok: rep.all_ok(), result: serde_json::to_value(&rep).expect("report serializes") }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn load_rep(src: &RepSource, cfg: &RunConfig) -> Result<ChainsawRep<Q>, String> {
    if src.example {
        return Ok(ChainsawRep::singular_example());
    }
    if src.sample {
        let (n, d) = cfg.shape()?;
        return quiver::sample_moment_point(n, &dims(&d)?, cfg.seed()).map_err(err);
    }
    let path = src.rep.as_ref().ok_or("give --rep FILE, --example or --sample")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let j: ChainsawRepJson = serde_json::from_str(&text).map_err(|e| format!("bad representation: {e}"))?;
    ChainsawRep::from_json(&j).map_err(err)
}

fn parse_module(s: &str) -> Result<SpecialModule, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.parse::<usize>().map_err(|_| format!("bad index {x}"));
    let rat = |x: &str| x.parse::<Q>().map_err(|_| format!("bad rational {x}"));
    match parts.as_slice() {
        ["L_l", node] => Ok(SpecialModule::Point { node: num(node)?, x: Q::zero() }),
        ["L", x, y] => Ok(SpecialModule::Loop { x: rat(x)?, y: rat(y)? }),
        ["Y", start, len] => Ok(SpecialModule::Interval { start: num(start)?, len: num(len)? }),
        _ => Err(format!("unknown module {s}")),
    }
}

fn run(cmd: &Cmd, cfg: &RunConfig) -> Result<Outcome, String> {
    match cmd {
        Cmd::Verify(v) => run_verify(v, cfg),
        Cmd::Character { pbw } => {
            let (n, d) = cfg.shape()?;
            let trunc = cfg.trunc.unwrap_or(4);
            let mw = character::molien_weyl_character(n, &d, trunc).map_err(err)?;
            let mut ok = mw.constant_term() == 1 && mw.all_nonnegative();
            let oracle = match character::sl2_closed_form_oracle(n, &d, trunc) {
                Ok(o) => {
                    ok &= o == mw;
                    json!(o == mw)
                }
                Err(_) => Value::Null,
            };
            let pbw_rep = if *pbw {
                let r = character::pbw_comparison(n, &d, trunc).map_err(err)?;
                ok &= r.all_ok();
                serde_json::to_value(&r).expect("report")
            } else {
                Value::Null
            };
            Ok(Outcome {
                ok,
                result: json!({
                    "by_degree": mw.by_degree(),
                    "constant_term": mw.constant_term(),
                    "nonnegative": mw.all_nonnegative(),
                    "closed_form_matches": oracle,
                    "pbw": pbw_rep,
                    "terms": mw.to_json(),
                }),
            })
        }
        Cmd::Stability { src, zeta, module } => {
            if let Some(m) = module {
                let z = parse_q(zeta.as_ref().ok_or("--zeta is required with --module")?)?;
                let m = parse_module(m)?;
                let s = quiver::special_module_stability(&StabilityParam::new(z.clone()), &m).map_err(err)?;
                let mut extra = Value::Null;
                if let SpecialModule::Interval { start, len } = m {
                    extra = json!({
                        "brute_force": quiver::interval_stability_brute_force(&z, start, len).map_err(err)?,
                        "criterion_as_printed": quiver::interval_criterion_as_printed(&z, start, len).map_err(err)?,
                    });
                }
                return Ok(Outcome { ok: true, result: json!({ "module": m, "stability": s, "checks": extra }) });
            }
            let rep = load_rep(src, cfg)?;
            let (stable, costable) = rep.stable_costable();
            let zeta_result = match zeta {
                Some(z) => {
                    let z = parse_q(z)?;
                    match rep.zeta_stability(&z) {
                        Ok(s) => json!(s),
                        Err(e) => json!({ "error": e.to_string() }),
                    }
                }
                None => Value::Null,
            };
            Ok(Outcome {
                ok: true,
                result: json!({ "stable": stable, "costable": costable, "zeta_stability": zeta_result }),
            })
        }
        Cmd::Walls { zeta, mode } => {
            let z = StabilityParam::new(parse_q(zeta)?);
            let mode = match mode {
                Mode::Finite => WallMode::Finite,
                Mode::Affine => WallMode::Affine,
            };
            let walls = quiver::wall_membership(&z, mode);
            let verdict = if walls.is_empty() { "off walls" } else { "on walls" };
            Ok(Outcome { ok: true, result: json!({ "verdict": verdict, "walls": walls }) })
        }
        Cmd::Strata => {
            let (n, d) = cfg.shape()?;
            let strata = quiver::strata_enumerate(n, &dims(&d)?).map_err(err)?;
            Ok(Outcome { ok: true, result: json!({ "count": strata.len(), "types": strata }) })
        }
        Cmd::Dimbound { partitions } => {
            let (_, d) = cfg.shape()?;
            let d = dims(&d)?;
            let rows = match partitions {
                Some(s) => {
                    let parts: Vec<Vec<usize>> = s
                        .split(';')
                        .map(|p| {
                            p.split(',')
                                .filter(|x| !x.trim().is_empty())
                                .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad part {x}")))
                                .collect()
                        })
                        .collect::<Result<_, _>>()?;
                    vec![quiver::dimension_bound_check(&d, &parts).map_err(err)?]
                }
                None => quiver::dimension_bound_batch(&d).map_err(err)?,
            };
            Ok(Outcome { ok: rows.iter().all(|r| r.holds), result: json!({ "checks": rows }) })
        }
        Cmd::Moment { src } => {
            let rep = load_rep(src, cfg)?;
            let mm = rep.moment_map();
            let vanishes = rep.moment_vanishes();
            let coker = if vanishes { Some(rep.moment_cokernel().map_err(err)?) } else { None };
            Ok(Outcome {
                ok: vanishes,
                result: json!({
                    "moment": mm,
                    "vanishes": vanishes,
                    "cokernel_dim": coker.as_ref().map(|c| c.len()),
                    "cokernel_basis": coker,
                }),
            })
        }
        Cmd::Collapse { src } => {
            let rep = load_rep(src, cfg)?;
            let c = rep.collapse_to_single_node().map_err(err)?;
            let preserved = !rep.moment_vanishes() || c.moment().iter().all(|r| r.iter().all(|x| x.is_zero()));
            Ok(Outcome { ok: preserved, result: json!({ "single_node": c, "moment_preserved": preserved }) })
        }
        Cmd::SpectralPair => {
            let d = match (&cfg.d, cfg.n) {
                (Some(v), _) if v.len() == 1 => usize::try_from(v[0]).map_err(|_| "negative d")?,
                (None, Some(n)) => n,
                _ => return Err("give the matrix size as --d <k>".into()),
            };
            if d == 0 || d > 4 {
                return Err("spectral pair: matrix size must lie in 1..=4".into());
            }
            let sp = poisson::spectral_pair_generic(d).map_err(err)?;
            let show = |v: &[zastava_core::MultiPoly]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
            Ok(Outcome {
                ok: sp.expansion_matches(),
                result: json!({
                    "d": d,
                    "matches": sp.expansion_matches(),
                    "e": show(&sp.e),
                    "f": show(&sp.f),
                    "b": show(&sp.b),
                }),
            })
        }
    }
}

fn run_verify(v: &Verify, cfg: &RunConfig) -> Result<Outcome, String> {
    match v {
        Verify::Examples => Ok(report(poisson::examples_check())),
        Verify::D1 => Ok(report(uea::d1_oracle().map_err(err)?)),
        _ => {
            let (n, d) = cfg.shape()?;
            let mu = cfg.mu(n)?;
            let max_index = cfg.max_index.unwrap_or(2);
            let rep = match v {
                Verify::Poisson => poisson::verify_poisson_relations(n, &d, &mu, max_index),
                Verify::Quantum => uea::verify_quantum_relations(n, &d, &mu, max_index),
                Verify::Jacobi => lie::ChainsawLie::build(n, &d, lie::BasisMode::Eprime)
                    .map(|a| a.jacobi_check().to_report(&format!("{d:?}"))),
                Verify::Yangian { mode } => {
                    let order = cfg.trunc.unwrap_or(4);
                    match mode {
                        YMode::Finite => yangian::verify_yangian_relations(n, &d, &mu, order, YangianMode::Finite, None),
                        YMode::Affine => yangian::verify_yangian_relations(n, &d, &mu, order, YangianMode::Affine, None),
                        YMode::Classical => yangian::classical_limit_relations(n, &d, order),
                    }
                }
                Verify::Etale { points } => poisson::etale_sampled::<Q>(n, &d, *points, cfg.seed()),
                Verify::Examples | Verify::D1 => unreachable!(),
            };
            Ok(report(rep.map_err(err)?))
        }
    }
}

fn command_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::Verify(v) => format!("verify {}", format!("{v:?}").split_whitespace().next().unwrap_or("").to_lowercase()),
        Cmd::Character { .. } => "character".into(),
        Cmd::Stability { .. } => "stability".into(),
        Cmd::Walls { .. } => "walls".into(),
        Cmd::Strata => "strata".into(),
        Cmd::Dimbound { .. } => "dimbound".into(),
        Cmd::Moment { .. } => "moment".into(),
        Cmd::Collapse { .. } => "collapse".into(),
        Cmd::SpectralPair => "spectral-pair".into(),
    }
}

/// Text projection of the JSON document: one `path: value` line per leaf,
/// except report entries which get one line each.
fn to_text(v: &Value) -> String {
    fn walk(path: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                if let (Some(Value::String(rel)), Some(Value::String(st))) = (m.get("relation"), m.get("status")) {
                    let inst = m.get("instance").and_then(|x| x.as_str()).unwrap_or("");
                    out.push_str(&format!("{:8} {rel} [{inst}]", st.to_uppercase()));
                    if let Some(Value::String(dt)) = m.get("detail") {
                        out.push_str(&format!(" {dt}"));
                    }
                    out.push('\n');
                    return;
                }
                for (k, x) in m {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = a.iter().map(scalar).collect();
                out.push_str(&format!("{path}: [{}]\n", items.join(", ")));
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{path}[{i}]"), x, out);
                }
            }
            _ => out.push_str(&format!("{path}: {}\n", scalar(v))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::merge(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let jobs = cfg.jobs.unwrap_or(0);
    let outcome = par::with_jobs(jobs, || run(&cli.cmd, &cfg));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // jobs and format do not change results; leave them out so output is identical across settings
    let echoed = RunConfig { jobs: None, format: None, ..cfg.clone() };
    let doc = json!({
        "command": command_name(&cli.cmd),
        "config": echoed,
        "ok": outcome.ok,
        "result": outcome.result,
    });
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("json")),
        Format::Text => print!("{}", to_text(&doc)),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
