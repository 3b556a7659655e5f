use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use recon_core::complexes::{self, SimplicialComplex2};
use recon_core::curve::{self, CurveError, OrderMode};
use recon_core::graph::{EmbeddedMetricGraph, GraphSpec};
use recon_core::homology::{self, Method};
use recon_core::pipeline::{self, PipelineError};
use recon_core::sampling::{self, CoverMode, Sample};
use recon_core::{fixtures, io, svg};

#[derive(Parser)]
#[command(name = "recon", version, about = "Metric graph and curve reconstruction from point samples")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shortest edge, xi, feature size and the admissible eps of a graph.
    Features {
        graph: PathBuf,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample a graph: cover samples or i.i.d. uniform points.
    Sample {
        graph: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value_t = SampleMode::Uniform)]
        mode: SampleMode,
        /// Number of points for `--mode random`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check that the eps-balls around a sample cover a graph.
    CoverCheck {
        graph: PathBuf,
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Čech nerve of a point sample at scale eps.
    Nerve {
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = NerveFormat::Complex)]
        format: NerveFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Betti numbers of a complex file.
    Betti {
        complex: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Two-scale estimate of b1 from a graph (sampled internally) or raw points.
    ReconstructGraph(ReconstructGraphArgs),
    /// Closed polyline through a planar curve sample.
    ReconstructCurve {
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = CurveOrder::Given)]
        mode: CurveOrder,
        /// Probes per polyline segment for the medial-axis check.
        #[arg(long, default_value_t = 5)]
        probes: usize,
        #[arg(long, default_value_t = 10_000)]
        boundary_points: usize,
        /// Where to write the polyline CSV.
        #[arg(long)]
        polyline: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rips-of-nerve Betti test on a graph, or on the built-in suite.
    ConjectureTest {
        graph: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Success rate of the estimate over a grid of eps values.
    Sweep {
        graph: PathBuf,
        /// Comma-separated eps values.
        #[arg(long)]
        eps_grid: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::ImageRank)]
        method: MethodArg,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SVG of a complex or polyline file.
    Render {
        #[arg(long, conflicts_with = "polyline", required_unless_present = "polyline")]
        complex: Option<PathBuf>,
        #[arg(long)]
        polyline: Option<PathBuf>,
        /// Vertex positions for a complex; extra dots for a polyline.
        #[arg(long)]
        points: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the main modules against brute-force oracles.
    VerifyOracles {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct ReconstructGraphArgs {
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    graph: Option<PathBuf>,
    #[arg(long)]
    points: Option<PathBuf>,
    /// Defaults to 0.8 gfs / xi on a graph.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::ImageRank)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = SampleMode::Uniform)]
    mode: SampleMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also draw the small nerve here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleMode {
    Uniform,
    Jittered,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum NerveFormat {
    Complex,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveOrder {
    Given,
    Nearest,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Literal,
    ImageRank,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Literal => Method::Literal,
            MethodArg::ImageRank => Method::ImageRank,
        }
    }
}

/// Error carrying its process exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

const EXIT_INPUT: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_COVER: u8 = 4;
const EXIT_REJECTED: u8 = 5;

fn fail(code: u8, err: impl Into<anyhow::Error>) -> Failure {
    Failure { code, err: err.into() }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure { code: 1, err }
    }
}

type Res<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(|e| fail(EXIT_INPUT, e))
}

fn emit(out: &OutArgs, text: &str) -> Res {
    match &out.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_graph(path: &Path) -> Res<EmbeddedMetricGraph> {
    let spec: GraphSpec =
        io::parse_graph(&read(path)?).map_err(|e| fail(EXIT_INPUT, anyhow!("{}: {e}", path.display())))?;
    let report = spec.validate();
    if !report.is_valid() {
        return Err(fail(EXIT_INVALID, anyhow!("{}: invalid graph: {report}", path.display())));
    }
    EmbeddedMetricGraph::try_from(spec).map_err(|e| fail(EXIT_INVALID, e))
}

fn load_points(path: &Path) -> Res<Sample> {
    io::parse_points(&read(path)?).map_err(|e| fail(EXIT_INPUT, anyhow!("{}: {e}", path.display())))
}

fn load_complex(path: &Path) -> Res<SimplicialComplex2> {
    io::parse_complex(&read(path)?).map_err(|e| fail(EXIT_INPUT, anyhow!("{}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Res<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(fail(EXIT_INPUT, anyhow!("--{name} must be positive, got {v}")))
    }
}

fn run(cli: Cli) -> Res {
    match cli.cmd {
        Cmd::Features { graph, step, out } => {
            let g = load_graph(&graph)?;
            let step = step.map(|s| positive("step", s)).transpose()?;
            let f = pipeline::features(&g, step).map_err(|e| fail(EXIT_INPUT, e))?;
            emit(&out, &json(&f))
        }
        Cmd::Sample { graph, eps, mode, n, seed, out } => {
            let g = load_graph(&graph)?;
            let s = match mode {
                SampleMode::Random => {
                    let n = n.ok_or_else(|| fail(EXIT_INPUT, anyhow!("--mode random needs --n")))?;
                    sampling::sample_uniform_random(&g, n, seed).map_err(|e| fail(EXIT_INPUT, e))?
                }
                SampleMode::Uniform | SampleMode::Jittered => {
                    let eps = positive("eps", eps.ok_or_else(|| fail(EXIT_INPUT, anyhow!("--eps is required")))?)?;
                    let m = if matches!(mode, SampleMode::Uniform) { CoverMode::Uniform } else { CoverMode::Jittered };
                    sampling::sample_cover(&g, eps, m, seed).map_err(|e| fail(EXIT_INPUT, e))?
                }
            };
            emit(&out, &io::write_points(&s))
        }
        Cmd::CoverCheck { graph, points, eps, out } => {
            let g = load_graph(&graph)?;
            let s = load_points(&points)?;
            let r = sampling::verify_cover(&s, positive("eps", eps)?, &g).map_err(|e| fail(EXIT_INPUT, e))?;
            emit(&out, &json(&r))?;
            if r.covered {
                Ok(())
            } else {
                Err(fail(EXIT_COVER, anyhow!("sample does not cover the graph (largest gap {})", r.max_gap)))
            }
        }
        Cmd::Nerve { points, eps, format, out } => {
            let s = load_points(&points)?;
            let k = complexes::cech_nerve(&s, positive("eps", eps)?).map_err(|e| fail(EXIT_INPUT, e))?;
            let text = match format {
                NerveFormat::Complex => io::write_complex(&k),
                NerveFormat::Svg => svg::render_complex(&k, &s.points).map_err(|e| fail(EXIT_INPUT, anyhow!(e)))?,
            };
            emit(&out, &text)
        }
        Cmd::Betti { complex, out } => {
            let k = load_complex(&complex)?;
            let (b0, b1) = homology::betti_numbers(&k);
            emit(&out, &json(&serde_json::json!({ "b0": b0, "b1": b1 })))
        }
        Cmd::ReconstructGraph(args) => reconstruct_graph(args),
        Cmd::ReconstructCurve { points, eps, mode, probes, boundary_points, polyline, out } => {
            let s = load_points(&points)?;
            let eps = positive("eps", eps)?;
            let mode = match mode {
                CurveOrder::Given => OrderMode::Given,
                CurveOrder::Nearest => OrderMode::NearestNeighbor,
            };
            let rec = match curve::reconstruct_curve(&s, eps, mode) {
                Ok(r) => r,
                Err(CurveError::Rejected(report)) => {
                    emit(&out, &json(&report))?;
                    return Err(fail(EXIT_REJECTED, anyhow!("reconstruction rejected: {}", report.reasons.join("; "))));
                }
                Err(e) => return Err(fail(EXIT_INPUT, e)),
            };
            let mut medial = Vec::new();
            for p in &rec.polylines {
                medial.push(
                    curve::validate_medial_axis(p, &s, eps, probes, boundary_points)
                        .map_err(|e| fail(EXIT_INPUT, e))?,
                );
            }
            if let Some(path) = polyline {
                fs::write(&path, io::write_polylines(&rec.polylines))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            emit(&out, &json(&serde_json::json!({ "report": rec.report, "medial_axis": medial })))
        }
        Cmd::ConjectureTest { graph, eps, seed, format, out } => {
            let cases: Vec<(String, EmbeddedMetricGraph)> = match graph {
                Some(p) => vec![(p.display().to_string(), load_graph(&p)?)],
                None => fixtures::suite().into_iter().map(|f| (f.name.to_string(), f.graph)).collect(),
            };
            let mut rows = Vec::new();
            for (name, g) in cases {
                let (threshold, _, _) = complexes::conjecture_threshold(&g).map_err(|e| fail(EXIT_INPUT, e))?;
                let e = eps.unwrap_or(0.9 * threshold);
                let r = complexes::conjecture_test(&g, e, seed).map_err(|e| fail(EXIT_INPUT, e))?;
                rows.push((name, r));
            }
            let text = match format {
                TableFormat::Json => {
                    json(&rows.iter().map(|(n, r)| serde_json::json!({ "graph": n, "result": r })).collect::<Vec<_>>())
                }
                TableFormat::Csv => {
                    let mut t =
                        String::from("graph,eps,threshold,vr_scale,n_points,b0_vr,b1_vr,b0_graph,b1_graph,holds\n");
                    for (n, r) in &rows {
                        t.push_str(&format!(
                            "{n},{},{},{},{},{},{},{},{},{}\n",
                            r.eps,
                            r.threshold,
                            r.vr_scale,
                            r.n_points,
                            r.betti_vr.0,
                            r.betti_vr.1,
                            r.betti_graph.0,
                            r.betti_graph.1,
                            r.holds
                        ));
                    }
                    t
                }
            };
            emit(&out, &text)
        }
        Cmd::Sweep { graph, eps_grid, trials, seed, method, step, out } => {
            let g = load_graph(&graph)?;
            let grid = eps_grid
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| fail(EXIT_INPUT, anyhow!("bad eps value {t:?}")))
                        .and_then(|v| positive("eps-grid", v))
                })
                .collect::<Res<Vec<f64>>>()?;
            let rows =
                pipeline::sweep(&g, &grid, trials, seed, method.into(), step).map_err(|e| fail(EXIT_INPUT, e))?;
            emit(&out, &pipeline::sweep_csv(&rows))
        }
        Cmd::Render { complex, polyline, points, out } => {
            let pts = points.as_deref().map(load_points).transpose()?.map(|s| s.points).unwrap_or_default();
            let text = match (complex, polyline) {
                (Some(c), _) => {
                    let k = load_complex(&c)?;
                    svg::render_complex(&k, &pts).map_err(|e| fail(EXIT_INPUT, anyhow!(e)))?
                }
                (None, Some(p)) => {
                    let loops = io::parse_polylines(&read(&p)?)
                        .map_err(|e| fail(EXIT_INPUT, anyhow!("{}: {e}", p.display())))?;
                    svg::render_polylines(&loops, &pts)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            emit(&out, &text)
        }
        Cmd::VerifyOracles { seed, trials, out } => {
            let r = pipeline::verify_oracles(seed, trials, trials.div_ceil(2));
            emit(&out, &json(&r))?;
            if r.ok {
                Ok(())
            } else {
                Err(fail(1, anyhow!("oracle mismatch")))
            }
        }
    }
}

fn reconstruct_graph(a: ReconstructGraphArgs) -> Res {
    let method: Method = a.method.into();
    if let Some(path) = &a.points {
        let xi = a.xi.ok_or_else(|| fail(EXIT_INPUT, anyhow!("raw points need --xi and --eps")))?;
        let eps = a.eps.ok_or_else(|| fail(EXIT_INPUT, anyhow!("raw points need --xi and --eps")))?;
        let s = load_points(path)?;
        let (k1, k2) = complexes::nerve_pair(&s, positive("eps", eps)?, xi).map_err(|e| fail(EXIT_INPUT, e))?;
        let r = homology::two_scale_b1(&k1, &k2, eps, xi, method).map_err(|e| fail(EXIT_INPUT, e))?;
        if let Some(p) = &a.svg {
            let drawing = svg::render_complex(&k1, &s.points).map_err(|e| fail(EXIT_INPUT, anyhow!(e)))?;
            fs::write(p, drawing).with_context(|| format!("cannot write {}", p.display()))?;
        }
        return emit(&a.out, &json(&r));
    }
    let g = load_graph(a.graph.as_deref().expect("clap requires one input"))?;
    let f =
        pipeline::features(&g, a.step.map(|s| positive("step", s)).transpose()?).map_err(|e| fail(EXIT_INPUT, e))?;
    let eps = match a.eps {
        Some(e) => positive("eps", e)?,
        None => 0.8 * f.eps_threshold,
    };
    if eps >= f.eps_threshold {
        log::warn!("eps = {eps} is not below gfs / xi = {}; the estimate may be wrong", f.eps_threshold);
    }
    let mode = match a.mode {
        SampleMode::Uniform => CoverMode::Uniform,
        SampleMode::Jittered => CoverMode::Jittered,
        SampleMode::Random => {
            return Err(fail(EXIT_INPUT, anyhow!("reconstruct-graph samples with --mode uniform or jittered")))
        }
    };
    let run = pipeline::reconstruct_graph(&g, eps, a.xi, method, mode, a.seed).map_err(|e| match e {
        PipelineError::CoverFailed { .. } => fail(EXIT_COVER, e),
        e => fail(EXIT_INPUT, e),
    })?;
    if let Some(p) = &a.svg {
        let s = sampling::sample_cover(&g, eps, mode, a.seed).map_err(|e| fail(EXIT_INPUT, e))?;
        let k1 = complexes::cech_nerve(&s, eps).map_err(|e| fail(EXIT_INPUT, e))?;
        let drawing = svg::render_complex(&k1, &s.points).map_err(|e| fail(EXIT_INPUT, anyhow!(e)))?;
        fs::write(p, drawing).with_context(|| format!("cannot write {}", p.display()))?;
    }
    emit(&a.out, &json(&run))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RECON_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
