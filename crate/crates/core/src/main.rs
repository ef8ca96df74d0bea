use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use equitangent::bigon::{bigon_commutators, singular_curve_test, BigonState};
use equitangent::chain::{centers_polygon, chain_to_framed, framed_to_chain, is_generic_chain, random_generic_chain, SampleMargins};
use equitangent::constructions::{equitangent_locus, nesting_margin, smooth_regular_ngon, tangent_segment_lengths, EquitangentLocus};
use equitangent::distribution::bracket_rank;
use equitangent::flow::{integrate_checked, integrate_flow, monodromy_defect, regular_period, InscribedPolygon};
use equitangent::framed::{compute_framing, framing_family_even, is_generic};
use equitangent::io::{from_json, read_bigon_csv, to_json, write_trajectory_csv, ChainFile, PolygonFile};
use equitangent::poncelet::{euler_fuss_residual, poncelet_closure, solve_outer_radius, BicentricConfig};
use equitangent::spectral::{independence_scan, numerical_spectrum, spectrum};
use equitangent::svg::{construction_svg, Svg};
use equitangent::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "equitangent", version, about = "Framed polygons, tangent-circle chains and equitangent flows")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Absolute tolerance for residuals [default: 1e-9, 1e-6 for bigon].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Step size: commutator flow time for rank, time step for flow and
    /// monodromy.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Seed for randomized instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random instances.
    #[arg(long, global = true, default_value_t = 10)]
    count: usize,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Frame a polygon read from JSON.
    Frame {
        input: PathBuf,
        /// Member of the one-parameter family for cyclic polygons with an
        /// even number of vertices.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
    },
    /// Convert between chains (JSON with centers) and framed polygons.
    Chain {
        /// Chain or framed polygon JSON; random chains of `--n` circles if
        /// absent.
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Certify bracket generation on random instances.
    Rank {
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Certify the five-dimensional bigon space instead of chains.
        #[arg(long)]
        bigon: bool,
    },
    /// Singular-curve test of a bigon path read from CSV.
    Bigon { input: PathBuf },
    /// Integrate the equitangent flow; writes a CSV trajectory.
    Flow {
        #[command(flatten)]
        poly: PolygonArgs,
        /// Flow time; the regular period if absent.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Time to the first cyclic shift and its defect.
    Monodromy {
        #[command(flatten)]
        poly: PolygonArgs,
        #[arg(long, default_value_t = 200.0)]
        max_time: f64,
    },
    /// Spectrum of the linearized flow at the regular polygon.
    Spectrum {
        #[arg(long)]
        n: usize,
    },
    /// Search for small integer relations among eigenvalue magnitudes.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
    /// Solve for a closing bicentric configuration and check closure.
    Bicentric {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        d: f64,
        /// Outer radius; solved for if absent.
        #[arg(long = "R")]
        big_r: Option<f64>,
        /// Also write an SVG of the two circles and a closed polygon.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Smooth a regular polygon and build its equitangent locus; writes SVG.
    Construct {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = equitangent::constructions::DEFAULT_CORNER_RADIUS)]
        corner: f64,
        #[arg(long, default_value_t = equitangent::constructions::DEFAULT_SIDE_RADIUS)]
        side: f64,
    },
}

#[derive(Args)]
struct PolygonArgs {
    /// Number of vertices of a random inscribed polygon.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Vertex angles, comma separated; overrides `--n`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    psi: Option<Vec<f64>>,
    /// Vertex jitter relative to the regular spacing.
    #[arg(long, default_value_t = 0.2)]
    jitter: f64,
}

impl PolygonArgs {
    fn polygon(&self, seed: u64) -> Result<InscribedPolygon, CliError> {
        Ok(match &self.psi {
            Some(psi) => InscribedPolygon::new(psi.clone())?,
            None => InscribedPolygon::random(&mut ChaCha8Rng::seed_from_u64(seed), self.n, self.jitter)?,
        })
    }
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Input => 1,
                ErrorKind::Precondition => 2,
                ErrorKind::Numerical => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => f.write_str(e),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

/// Summary lines go to standard output when the payload went to a file, to
/// standard error otherwise.
fn summary(out: &Option<PathBuf>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChainInput {
    Chain(ChainFile),
    Framed(PolygonFile),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let tol = g.tol.unwrap_or(equitangent::geom::DEFAULT_TOL);
    match cli.command {
        Command::Frame { input, shift } => {
            let file: PolygonFile = from_json(&read(&input)?)?;
            let p = file.polygon()?;
            let fp = if p.len() % 2 == 0 && shift != 0.0 {
                framing_family_even(&p, shift, tol)?
            } else {
                compute_framing(&p, tol)?
            };
            let report = json!({
                "polygon": PolygonFile::from(&fp),
                "residuals": fp.residuals(),
                "max_residual": fp.max_residual(),
                "generic": is_generic(&fp),
            });
            write_out(&g.out, &format!("{}\n", to_json(&report)))
        }
        Command::Chain { input, n } => {
            let chains = match input {
                Some(path) => match from_json::<ChainInput>(&read(&path)?)? {
                    ChainInput::Chain(c) => vec![c.chain(tol)?],
                    ChainInput::Framed(f) => {
                        let fp = f
                            .framed(tol)?
                            .ok_or_else(|| Error::InvalidInput("polygon has no framing_directions".into()))?;
                        vec![framed_to_chain(&fp, tol)?]
                    }
                },
                None => {
                    let n = n.ok_or_else(|| Error::InvalidInput("give an input file or --n".into()))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                    (0..g.count)
                        .map(|_| random_generic_chain(&mut rng, n, &SampleMargins::default()))
                        .collect::<Result<_, _>>()?
                }
            };
            let mut reports = Vec::new();
            for c in &chains {
                let fp = chain_to_framed(c)?;
                reports.push(json!({
                    "chain": ChainFile::from(c),
                    "framed": PolygonFile::from(&fp),
                    "signed_perimeter": centers_polygon(c)?.signed_perimeter(),
                    "max_tangency_residual": c.max_tangency_residual(),
                    "generic": is_generic_chain(c),
                }));
            }
            write_out(&g.out, &format!("{}\n", to_json(&reports)))
        }
        Command::Rank { n, bigon } => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            if bigon {
                let h = g.step.unwrap_or(1e-3);
                let mut certs = Vec::new();
                for _ in 0..g.count {
                    let s = BigonState::random(&mut rng);
                    certs.push(json!({ "state": s, "certificate": bigon_commutators(&s, h)? }));
                }
                let ok = certs.iter().filter(|c| c["certificate"]["rank"] == 5).count();
                write_out(&g.out, &format!("{}\n", to_json(&certs)))?;
                summary(&g.out, &format!("5 achieved {ok}/{}", g.count));
                return Ok(());
            }
            if n < 4 {
                return Err(Error::UnsupportedN {
                    n,
                    reason: "for three circles the tangent space is only 3-dimensional and the bracket test \
                             is not informative; rank certification starts at n = 4",
                }
                .into());
            }
            let h = g.step.unwrap_or(equitangent::distribution::DEFAULT_BRACKET_STEP);
            let mut reports = Vec::new();
            for _ in 0..g.count {
                let c = random_generic_chain(&mut rng, n, &SampleMargins::default())?;
                reports.push(bracket_rank(&c, h)?);
            }
            let ok = reports.iter().filter(|r| r.rank == 2 * n).count();
            write_out(&g.out, &format!("{}\n", to_json(&reports)))?;
            summary(&g.out, &format!("2n achieved {ok}/{}", g.count));
            Ok(())
        }
        Command::Bigon { input } => {
            let path = read_bigon_csv(&read(&input)?)?;
            let report = singular_curve_test(&path, g.tol.unwrap_or(1e-6))?;
            write_out(&g.out, &format!("{}\n", to_json(&report)))?;
            summary(&g.out, &report.verdict.to_string());
            Ok(())
        }
        Command::Flow { poly, time } => {
            let a = poly.polygon(g.seed)?;
            let n = a.len();
            let t = time.unwrap_or_else(|| regular_period(n));
            let steps = match g.step {
                Some(dt) => ((t / dt).ceil() as usize).max(1),
                None => 10_000,
            };
            let (_, halving) = integrate_checked(&a, t, steps)?;
            if halving > 1e-7 {
                return Err(Error::Numerical(format!("step halving changed the endpoint by {halving:.3e}")).into());
            }
            let traj = integrate_flow(&a, t, steps)?;
            let mut buf = Vec::new();
            write_trajectory_csv(&traj, &mut buf)?;
            write_out(&g.out, &String::from_utf8(buf).expect("utf-8 CSV"))
        }
        Command::Monodromy { poly, max_time } => {
            let a = poly.polygon(g.seed)?;
            let r = monodromy_defect(&a, max_time, g.step.unwrap_or(1e-2))?;
            write_out(&g.out, &format!("{}\n", to_json(&json!({ "psi": a.psi(), "shift": r }))))
        }
        Command::Spectrum { n } => {
            let exact = spectrum(n)?;
            let numeric = numerical_spectrum(n)?;
            let mut sorted = exact.clone();
            sorted.sort_by(f64::total_cmp);
            let agreement = sorted.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let report = json!({ "n": n, "magnitudes": exact, "eigensolver": numeric, "max_difference": agreement });
            write_out(&g.out, &format!("{}\n", to_json(&report)))?;
            if n == 5 {
                let ratio = exact[0] / exact[1];
                println!("ratio |lambda_1|/|lambda_2| = {ratio:.15} (sqrt(5) - 2 = {:.15})", 5f64.sqrt() - 2.0);
            }
            Ok(())
        }
        Command::Scan { n, bound } => {
            let found = independence_scan(n, bound)?;
            write_out(&g.out, &format!("{}\n", to_json(&found)))?;
            summary(&g.out, &format!("{} relations with coefficients up to {bound}", found.len()));
            Ok(())
        }
        Command::Bicentric { n, r, d, big_r, svg } => {
            let big_r = match big_r {
                Some(x) => x,
                None => solve_outer_radius(n, r, d)?,
            };
            let cfg = BicentricConfig::new(n, big_r, r, d)?;
            let starts: Vec<f64> = (0..10).map(|k| 0.6 * k as f64).collect();
            let mut worst: f64 = 0.0;
            for &s in &starts {
                worst = worst.max(poncelet_closure(&cfg, s)?.closure_defect.abs());
            }
            let relation = euler_fuss_residual(&cfg).ok();
            let report = json!({
                "config": cfg,
                "euler_fuss_residual": relation,
                "max_closure_defect": worst,
                "starts": starts.len(),
            });
            write_out(&g.out, &format!("{}\n", to_json(&report)))?;
            if let Some(path) = svg {
                let closure = poncelet_closure(&cfg, 0.0)?;
                let mut pic = Svg::new();
                pic.circle(equitangent::geom::Circle::new(equitangent::geom::Vec2::ZERO, big_r)?, "black")
                    .circle(equitangent::geom::Circle::new(cfg.inner_center(), r)?, "black")
                    .polyline(
                        closure.polygon.vertices().into_iter().map(|v| v * big_r).collect(),
                        true,
                        "red",
                    );
                fs::write(&path, pic.render()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Construct { n, corner, side } => {
            let curve = smooth_regular_ngon(n, corner, side)?;
            let EquitangentLocus::Polyline(locus) = equitangent_locus(&curve)? else {
                unreachable!("a smoothed polygon is not a circle")
            };
            let mut asym: f64 = 0.0;
            for x in locus.sample(g.count.max(1000)) {
                let t = tangent_segment_lengths(&curve, x)?;
                asym = asym.max((t.l1 - t.l2).abs());
            }
            write_out(&g.out, &construction_svg(&curve, Some(&locus)))?;
            let report = json!({
                "arcs": curve.len(),
                "c1_residual": curve.c1_residual(),
                "locus_segments": locus.segments.len(),
                "max_asymmetry": asym,
                "nesting_margin": nesting_margin(&curve, &locus, 32),
            });
            summary(&g.out, &serde_json::to_string(&report).expect("json"));
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: String,
    kind: &'a str,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e.code() {
                1 => "input",
                2 => "precondition",
                _ => "numerical",
            };
            let report = ErrorReport {
                error: e.to_string(),
                kind,
            };
            let _ = writeln!(std::io::stderr(), "{}", serde_json::to_string(&report).expect("json"));
            ExitCode::from(e.code())
        }
    }
}
