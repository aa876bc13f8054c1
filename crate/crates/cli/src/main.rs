use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use galefan_core::fans::verify_report;
use galefan_core::galedual::{gale_transform, inverse_gale};
use galefan_core::genpos::{
    build_counterexample, check_sgp, corresponding_primal, is_typical, random_config, verify_no_equidistribution,
    DEFAULT_CLASS_GATE, DEFAULT_SGP_GATE,
};
use galefan_core::kneser::{greedy_certificate, m_eligible, DEFAULT_DISJOINT_GATE};
use galefan_core::pipeline::{self, Hypotheses};
use galefan_core::tverberg::{search_colored_tuple, search_tuple, PairMode, PairOptions, DEFAULT_LP_GATE};
use galefan_core::{
    ColoringCertificate, Error, Fan, FieldKind, PipelineOptions, PointConfig, SearchConstraint, SearchOptions,
    SetFamily, TwoFanMode, VerifyMode,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "galefan", version, about = "Exact fan distributions of point sets via Gale duality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Point configuration JSON.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Re-read the input over this field: rational or cyclotomic:N.
    #[arg(long)]
    field: Option<String>,
    /// Budget of LP calls for searches.
    #[arg(long, default_value_t = DEFAULT_LP_GATE)]
    gate: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock timing in results.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Gale transform of an affinely spanning configuration.
    Gale(Common),
    /// Primal configuration whose Gale dual is the input.
    InverseGale(Common),
    /// Proper Tverberg tuple of the input points.
    Tverberg {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        /// Require every part to be rainbow for the input coloring.
        #[arg(long)]
        rainbow: bool,
    },
    /// Fan equidistributing the input coloring.
    Equidistribute {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Fan whose closed half-flats pierce every member of a family twice.
    Pierce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        /// Set family JSON ({"n", "members"}).
        #[arg(long, conflicts_with = "certificate")]
        family: Option<PathBuf>,
        /// Kneser coloring certificate JSON; its members define the family.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Fan with at most one point of each class per open half-flat.
    Rainbow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Two fans whose cells equidistribute the coloring or pierce a family.
    TwoFans {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = TwoFanKind::Equidistribute)]
        mode: TwoFanKind,
        /// Certificate for KG^{r²} (pierce mode).
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SearchKind::Auto)]
        search: SearchKind,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Exact verification of a given fan on the input points.
    VerifyFan {
        #[command(flatten)]
        common: Common,
        /// Fan JSON.
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, value_enum, default_value_t = FanCheck::Distribute)]
        mode: FanCheck,
        /// Family JSON for pierce mode.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Second fan for two-fan mode.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Strong general position of the input points.
    CheckSgp {
        #[command(flatten)]
        common: Common,
        /// Largest number of parts to test (default: all).
        #[arg(long)]
        max_parts: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Whether the input is typical (its corresponding primal is in SGP).
    Typical {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Colored configuration admitting no equidistributing fan.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
        /// Skip the exhaustive non-existence check.
        #[arg(long)]
        no_verify: bool,
    },
    /// Lower and upper bound runs bracketing the equidistribution threshold.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        /// Comma-separated s:t pairs, e.g. 1:0,2:1.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_SGP_GATE)]
        sgp_gate: usize,
    },
    /// Random affinely spanning configuration.
    GenRandom {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        bits: u32,
        /// Color point i with i mod classes.
        #[arg(long)]
        classes: Option<usize>,
    },
    /// Digit test for the two-fan theorems.
    MEligible {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TwoFanKind {
    Equidistribute,
    Pierce,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Exhaustive,
    Randomized,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FanCheck {
    Distribute,
    Equidistribute,
    Pierce,
    Rainbow,
    TwoFan,
}

enum Failure {
    Core(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn load_config(c: &Common) -> Result<PointConfig, Failure> {
    let path = c.input.as_deref().ok_or_else(|| anyhow::anyhow!("--input is required"))?;
    let x: PointConfig = read_json(path)?;
    match &c.field {
        None => Ok(x),
        Some(f) => {
            let field = FieldKind::parse(f)?;
            let pts = x
                .points
                .iter()
                .map(|p| p.iter().map(|s| field.coerce(s)).collect())
                .collect::<galefan_core::Result<Vec<Vec<_>>>>()?;
            let y = PointConfig::new(field, x.dim, pts)?;
            Ok(match x.coloring {
                Some(col) => y.with_coloring(col)?,
                None => y,
            })
        }
    }
}

fn pipeline_opts(c: &Common, sgp_gate: usize) -> PipelineOptions {
    PipelineOptions {
        gate: c.gate,
        threads: c.threads,
        sgp_gate,
        cert_gate: DEFAULT_DISJOINT_GATE,
        timing: c.timing,
    }
}

fn warn(h: &Hypotheses) {
    for w in &h.warnings {
        eprintln!("warning: {w}");
    }
    if h.guaranteed {
        eprintln!("note: all hypotheses of the {} hold", h.theorem);
    }
}

fn none_found(what: &str) -> Outcome {
    eprintln!("no {what} found");
    Ok(false)
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Gale(c) => {
            let x = load_config(&c)?;
            emit(&gale_transform(&x)?, c.output.as_deref())?;
            Ok(true)
        }
        Command::InverseGale(c) => {
            let x = load_config(&c)?;
            emit(&inverse_gale(&x)?, c.output.as_deref())?;
            Ok(true)
        }
        Command::Tverberg { common: c, r, rainbow } => {
            let x = load_config(&c)?;
            let so = SearchOptions {
                gate: c.gate,
                threads: c.threads,
                ..SearchOptions::default()
            };
            let t = if rainbow {
                let col = x.coloring.clone().ok_or_else(|| anyhow::anyhow!("--rainbow needs a coloring"))?;
                search_colored_tuple(&x, r, &col, &so)?
            } else {
                search_tuple(&x, r, &SearchConstraint::None, &so)?
            };
            match t {
                Some(t) => {
                    emit(&t, c.output.as_deref())?;
                    Ok(true)
                }
                None => none_found("proper Tverberg tuple"),
            }
        }
        Command::Equidistribute { common: c, r, sgp_gate } => {
            let mut x = load_config(&c)?;
            if x.coloring.is_none() {
                x = x.clone().with_coloring(vec![0; x.len()])?;
            }
            warn(&pipeline::equidistribute_hypotheses(&x, r, x.num_classes()));
            finish(pipeline::equidistribute(&x, r, &pipeline_opts(&c, sgp_gate))?, &c, "equidistributing fan")
        }
        Command::Pierce {
            common: c,
            r,
            family,
            certificate,
            sgp_gate,
        } => {
            let x = load_config(&c)?;
            let cert: ColoringCertificate = match (certificate, family) {
                (Some(p), _) => read_json(&p)?,
                (None, Some(p)) => {
                    let fam: SetFamily = read_json(&p)?;
                    greedy_certificate(&fam, r, DEFAULT_DISJOINT_GATE)?
                }
                (None, None) => return Err(anyhow::anyhow!("pass --family or --certificate").into()),
            };
            let family = cert.family();
            warn(&pipeline::pierce_hypotheses(&x, r, cert.num_classes(), true));
            finish(
                pipeline::pierce(&x, &family, &cert, r, &pipeline_opts(&c, sgp_gate))?,
                &c,
                "piercing fan",
            )
        }
        Command::Rainbow { common: c, r, sgp_gate } => {
            let x = load_config(&c)?;
            warn(&pipeline::rainbow_hypotheses(&x, r));
            finish(pipeline::rainbow(&x, r, &pipeline_opts(&c, sgp_gate))?, &c, "rainbow fan")
        }
        Command::TwoFans {
            common: c,
            r,
            mode,
            certificate,
            search,
            timeout,
        } => {
            let x = load_config(&c)?;
            let mode = match mode {
                TwoFanKind::Equidistribute => TwoFanMode::Equidistribute,
                TwoFanKind::Pierce => {
                    let p = certificate.ok_or_else(|| anyhow::anyhow!("pierce mode needs --certificate"))?;
                    TwoFanMode::Pierce {
                        certificate: read_json(&p)?,
                    }
                }
            };
            let po = PairOptions {
                gate: c.gate,
                threads: c.threads,
                seed: c.seed,
                mode: match search {
                    SearchKind::Exhaustive => PairMode::Exhaustive,
                    SearchKind::Randomized => PairMode::Randomized,
                    SearchKind::Auto => PairMode::Auto,
                },
                timeout: timeout.map(Duration::from_secs),
                ..PairOptions::default()
            };
            match pipeline::two_fans(&x, r, &mode, &po, &pipeline_opts(&c, DEFAULT_SGP_GATE))? {
                Some(res) => {
                    warn(&res.hypotheses);
                    emit(&res, c.output.as_deref())?;
                    Ok(true)
                }
                None => none_found("fan pair"),
            }
        }
        Command::VerifyFan {
            common: c,
            fan,
            mode,
            family,
            other,
        } => {
            let x = load_config(&c)?;
            let fan: Fan = read_json(&fan)?;
            let coloring = || {
                x.coloring
                    .clone()
                    .ok_or_else(|| Failure::Other(anyhow::anyhow!("this mode needs a coloring")))
            };
            let mode = match mode {
                FanCheck::Distribute => VerifyMode::Distribute,
                FanCheck::Equidistribute => VerifyMode::Equidistribute { coloring: coloring()? },
                FanCheck::Rainbow => VerifyMode::Rainbow { coloring: coloring()? },
                FanCheck::Pierce => {
                    let p = family.ok_or_else(|| anyhow::anyhow!("pierce mode needs --family"))?;
                    VerifyMode::Pierce { family: read_json(&p)? }
                }
                FanCheck::TwoFan => {
                    let p = other.ok_or_else(|| anyhow::anyhow!("two-fan mode needs --other"))?;
                    VerifyMode::TwoFan {
                        other: read_json(&p)?,
                        coloring: coloring()?,
                    }
                }
            };
            let report = verify_report(&fan, &x, &mode)?;
            emit(&report, c.output.as_deref())?;
            Ok(report.passed)
        }
        Command::CheckSgp {
            common: c,
            max_parts,
            sgp_gate,
        } => {
            let x = load_config(&c)?;
            let report = check_sgp(&x, max_parts.unwrap_or(x.len()), sgp_gate)?;
            emit(&report, c.output.as_deref())?;
            Ok(report.pass)
        }
        Command::Typical { common: c, sgp_gate } => {
            let x = load_config(&c)?;
            let typical = is_typical(&x, sgp_gate)?;
            let primal = corresponding_primal(&x)?;
            emit(&serde_json::json!({ "typical": typical, "primal": primal }), c.output.as_deref())?;
            Ok(typical)
        }
        Command::Counterexample {
            common: c,
            r,
            m,
            d,
            k,
            ell,
            sgp_gate,
            no_verify,
        } => {
            let inst = build_counterexample(r, m, d, k, ell, c.seed, sgp_gate)?;
            let verdict = if no_verify {
                None
            } else {
                let so = SearchOptions {
                    gate: c.gate,
                    threads: c.threads,
                    ..SearchOptions::default()
                };
                Some(verify_no_equidistribution(&inst, DEFAULT_CLASS_GATE, &so)?)
            };
            emit(
                &serde_json::json!({
                    "parameters": { "r": r, "m": m, "d": d, "k": k, "ell": ell, "seed": c.seed },
                    "instance": inst,
                    "no_equidistribution": verdict,
                }),
                c.output.as_deref(),
            )?;
            Ok(verdict != Some(false))
        }
        Command::Bounds {
            common: c,
            r,
            m,
            params,
            seeds,
            sgp_gate,
        } => {
            let params = params
                .iter()
                .map(|p| {
                    let (s, t) = p.split_once(':').ok_or_else(|| anyhow::anyhow!("expected s:t, got {p:?}"))?;
                    Ok((s.trim().parse()?, t.trim().parse()?))
                })
                .collect::<anyhow::Result<Vec<(usize, usize)>>>()?;
            let rows = pipeline::bounds_experiment(r, m, &params, seeds, &pipeline_opts(&c, sgp_gate))?;
            let ok = rows.iter().all(|row| row.upper_certified && row.lower_successes == row.seeds);
            emit(&rows, c.output.as_deref())?;
            Ok(ok)
        }
        Command::GenRandom {
            common: c,
            n,
            dim,
            bits,
            classes,
        } => {
            let field = match &c.field {
                Some(f) => FieldKind::parse(f)?,
                None => FieldKind::Rational,
            };
            let mut x = random_config(n, dim, field, bits, c.seed)?;
            if let Some(m) = classes {
                x = x.with_coloring((0..n).map(|i| i % m.max(1)).collect())?;
            }
            emit(&x, c.output.as_deref())?;
            Ok(true)
        }
        Command::MEligible { m, r, output } => {
            let (eligible, digits) = m_eligible(m, r)?;
            emit(
                &serde_json::json!({ "m": m, "r": r, "eligible": eligible, "digits": digits }),
                output.as_deref(),
            )?;
            Ok(eligible)
        }
    }
}

fn finish(res: Option<pipeline::PipelineResult>, c: &Common, what: &str) -> Outcome {
    match res {
        Some(res) => {
            emit(&res, c.output.as_deref())?;
            Ok(true)
        }
        None => none_found(what),
    }
}
