//! `passfeas` — score passes, build evaluation reports, generate synthetic
//! corpora, combine value maps with orientation, and run the HTTP service.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use passfeas_client::FeasibilityClient;
use passfeas_core::epv::{epv_table, RegionSize, ValueKind, EPV_CSV_HEADER};
use passfeas_core::evaluation::{render_histograms, split_report, Split};
use passfeas_core::feasibility::{evaluate_scenario, FeasibilityBreakdown, ModelParams, Mode, Scenario};
use passfeas_core::geometry::{AttackDirection, FieldSpec};
use passfeas_core::io::{load_scenarios, write_scenarios, LoadOptions, ScenarioRecord, SynthConfig, ValueMap};
use passfeas_core::wire::ScenarioRequest;
use passfeas_service::ServiceConfig;

#[derive(Debug, Parser)]
#[command(name = "passfeas", version, about = "Pass feasibility from tracking snapshots")]
struct Cli {
    #[command(flatten)]
    model: ModelArgs,
    #[command(subcommand)]
    command: Command,
}

/// Model overrides. With `evaluate --server` the service's own settings apply.
#[derive(Debug, Args)]
struct ModelArgs {
    /// Half opening angle of the view triangles, degrees.
    #[arg(long, global = true, env = "PASSFEAS_PSI", default_value_t = 30.0)]
    psi: f64,
    /// Defenders considered around the passer and the receiver.
    #[arg(long, global = true, env = "PASSFEAS_J", default_value_t = 3)]
    j: usize,
    /// Orientation smoothing half-window, frames.
    #[arg(long = "window", global = true, env = "PASSFEAS_WINDOW", default_value_t = 2)]
    window: u32,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(self.psi, ModelParams::default().z(), self.j)?)
    }

    fn load_options(&self) -> LoadOptions {
        LoadOptions { window: self.window }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-receiver score breakdown for every event, as CSV.
    Evaluate {
        input: PathBuf,
        #[arg(long, default_value = "F")]
        mode: Mode,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Score through a running service instead of in process.
        #[arg(long, value_name = "URL")]
        server: Option<String>,
    },
    /// Top-1/Top-3 accuracy table and rank histograms.
    Report {
        input: PathBuf,
        /// Comma-separated modes.
        #[arg(long, value_delimiter = ',', default_value = "F,Fpd")]
        modes: Vec<Mode>,
        #[arg(long, default_value = "none")]
        split: Split,
        /// Write the CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for one SVG histogram per class and mode.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
    },
    /// Synthetic scenario corpus.
    Synth(SynthArgs),
    /// Accuracy of value-map rankings with and without orientation.
    Epv {
        input: PathBuf,
        /// Pass-probability map.
        #[arg(long = "vp", value_name = "MAP", required_unless_present = "epv_map")]
        pass_map: Option<PathBuf>,
        /// EPV map.
        #[arg(long = "ve", value_name = "MAP")]
        epv_map: Option<PathBuf>,
        /// Disc radius as a fraction of the field length [default: 5 / map width].
        #[arg(long)]
        q: Option<f64>,
        /// Tube width as a fraction of the field length [default: 2 / map width].
        #[arg(long)]
        s: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PASSFEAS_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Directory of value maps (`*.txt`, `*.map`), addressed by file stem.
        #[arg(long, env = "PASSFEAS_MAP_DIR")]
        map_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long = "n", default_value_t = 100)]
    n_events: usize,
    /// Probability that a defender marks an attacker closely.
    #[arg(long, default_value_t = 0.3)]
    pressure: f64,
    /// Orientation noise, degrees.
    #[arg(long, default_value_t = 15.0)]
    noise: f64,
    /// Draw the ground truth from a softmax over F instead of taking the argmax.
    #[arg(long)]
    softmax: bool,
    #[arg(long, default_value_t = 0.05)]
    temperature: f64,
    #[arg(long, default_value_t = 105.0)]
    length: f64,
    #[arg(long, default_value_t = 68.0)]
    width: f64,
    /// Attack direction, `+x` or `-x`.
    #[arg(long, default_value = "+x", allow_hyphen_values = true)]
    attack: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                // A closed pipe (`| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn load(path: &Path, options: &LoadOptions) -> Result<Vec<Scenario>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if text.trim().is_empty() {
        bail!("{}: no events", path.display());
    }
    let loaded = load_scenarios(path, options)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.scenarios)
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

const EVALUATE_HEADER: &str = "event,receiver,rank,f_o,f_dp,f_dr,f_d,f_p,f,f_pd,score,is_ground_truth,success";

fn breakdown_row(out: &mut String, event: usize, rank: usize, b: &FeasibilityBreakdown, mode: Mode, s: &Scenario) {
    let truth = s.ground_truth_receiver.as_deref() == Some(b.receiver_id.as_str());
    writeln!(
        out,
        "{event},{},{rank},{},{},{},{},{},{},{},{},{},{}",
        b.receiver_id,
        cell(b.f_o),
        b.f_dp,
        b.f_dr,
        b.f_d,
        b.f_p,
        cell(b.f),
        b.f_pd,
        cell(b.score(mode)),
        u8::from(truth),
        s.success.map(|v| v.to_string()).unwrap_or_default()
    )
    .expect("write to string");
}

async fn evaluate(scenarios: &[Scenario], params: &ModelParams, mode: Mode, server: Option<&str>) -> Result<String> {
    let mut out = String::from(EVALUATE_HEADER);
    out.push('\n');
    let client = server.map(FeasibilityClient::new).transpose()?;
    for (i, s) in scenarios.iter().enumerate() {
        match &client {
            Some(client) => {
                let req = ScenarioRequest {
                    scenario: ScenarioRecord::from_scenario(s, None),
                    mode,
                    map: None,
                };
                let res = client.evaluate(&req).await.with_context(|| format!("event {i}"))?;
                for r in &res.receivers {
                    breakdown_row(&mut out, i, r.rank, &r.breakdown, mode, s);
                }
            }
            None => {
                let eval = evaluate_scenario(s, params, mode).with_context(|| format!("event {i}"))?;
                for r in &eval.receivers {
                    let rank = eval.rank_of(&r.breakdown.receiver_id).expect("ranked");
                    breakdown_row(&mut out, i, rank, &r.breakdown, mode, s);
                }
            }
        }
    }
    Ok(out)
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

fn report(
    scenarios: &[Scenario],
    params: &ModelParams,
    modes: &[Mode],
    split: Split,
    svg_dir: Option<&Path>,
) -> Result<String> {
    let report = split_report(scenarios, params, modes, split)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = svg_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for h in &report.histograms {
            let path = dir.join(format!("hist_{}_{}.svg", file_safe(&h.split_class), h.mode));
            fs::write(&path, render_histograms(h)).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(report.to_csv())
}

fn synth(args: &SynthArgs) -> Result<String> {
    let attack = match args.attack.as_str() {
        "+x" => AttackDirection::PositiveX,
        "-x" => AttackDirection::NegativeX,
        other => bail!("--attack: expected +x or -x, got `{other}`"),
    };
    let config = SynthConfig {
        seed: args.seed,
        n_events: args.n_events,
        pressure: args.pressure,
        orientation_noise: args.noise,
        planted_best: !args.softmax,
        temperature: args.temperature,
        field: FieldSpec::new(args.length, args.width, attack)?,
    };
    let scenarios = passfeas_core::io::generate_synthetic(&config)?;
    let mut buf = Vec::new();
    write_scenarios(&scenarios, &mut buf)?;
    Ok(String::from_utf8(buf).expect("scenario files are UTF-8"))
}

fn epv(
    scenarios: &[Scenario],
    params: &ModelParams,
    maps: &[(ValueKind, &Path)],
    q: Option<f64>,
    s: Option<f64>,
) -> Result<String> {
    let mut out = String::from(EPV_CSV_HEADER);
    out.push('\n');
    for (kind, path) in maps {
        let map = ValueMap::load(path)?;
        let default = RegionSize::for_map(&map);
        let size = RegionSize {
            q: q.unwrap_or(default.q),
            s: s.unwrap_or(default.s),
        };
        for row in epv_table(scenarios, &map, params, *kind, size).with_context(|| path.display().to_string())? {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
    }
    Ok(out)
}

async fn run(cli: Cli) -> Result<()> {
    let options = cli.model.load_options();
    match cli.command {
        Command::Evaluate {
            input,
            mode,
            output,
            server,
        } => {
            let scenarios = load(&input, &options)?;
            let params = cli.model.params()?;
            let csv = evaluate(&scenarios, &params, mode, server.as_deref()).await?;
            emit(output.as_deref(), &csv)
        }
        Command::Report {
            input,
            modes,
            split,
            output,
            svg_dir,
        } => {
            let scenarios = load(&input, &options)?;
            let csv = report(&scenarios, &cli.model.params()?, &modes, split, svg_dir.as_deref())?;
            emit(output.as_deref(), &csv)
        }
        Command::Synth(args) => {
            let text = synth(&args)?;
            emit(args.output.as_deref(), &text)
        }
        Command::Epv {
            input,
            pass_map,
            epv_map,
            q,
            s,
            output,
        } => {
            let scenarios = load(&input, &options)?;
            let maps: Vec<(ValueKind, &Path)> = [
                (ValueKind::PassProbability, pass_map.as_deref()),
                (ValueKind::Epv, epv_map.as_deref()),
            ]
            .into_iter()
            .filter_map(|(k, p)| p.map(|p| (k, p)))
            .collect();
            let csv = epv(&scenarios, &cli.model.params()?, &maps, q, s)?;
            emit(output.as_deref(), &csv)
        }
        Command::Serve { listen, map_dir } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .with_writer(std::io::stderr)
                .init();
            let config = ServiceConfig {
                listen,
                psi: cli.model.psi,
                j: cli.model.j,
                window: cli.model.window,
                map_dir,
            };
            passfeas_service::serve(&config).await?;
            Ok(())
        }
    }
}

/// The error chain on one line. Causes already quoted by their parent's
/// message are skipped.
fn one_line(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string().replace('\n', " ");
        if !msg.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::FAILURE
        }
    }
}
