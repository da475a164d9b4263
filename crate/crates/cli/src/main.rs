use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasekit::fock::{self, Representation};
use phasekit::io::{self, OperatorJson, PhaseOperatorJson, PhaseStateJson, StateJson, VectorPhaseStateJson};
use phasekit::mub::{self, Route};
use phasekit::phase_ops::{self, PhaseFamily};
use phasekit::phase_states::{self, StateFamily};
use phasekit::space::FockSpace;
use phasekit::truncated::{self, Shift, Window};
use phasekit::verify::{self, RunConfig};
use phasekit::{KappaSpec, VerificationReport};

#[derive(Parser, Debug)]
#[command(name = "phasekit", version, about = "Phase operators, phase states and MUBs for the A_kappa(2) algebra")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Finite regime kappa = -1/k
    #[arg(long, global = true, conflicts_with = "kappa")]
    k: Option<usize>,
    /// Deformation parameter; negative values must equal -1/k
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Window size for kappa >= 0
    #[arg(long, global = true, default_value_t = 8)]
    sigma: usize,
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, global = true, env = "PHASEKIT_TOLERANCE", default_value_t = phasekit::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Seed for randomized draws
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON artifact of the command here
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ladder, number and Hamiltonian matrices
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Build and check E1d, E2d, E3d, Ed
    PhaseOps {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
    },
    /// Phase states of one family
    PhaseStates {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Block index for E1d, E2d, E3d
        #[arg(long, default_value_t = 0)]
        l: usize,
        /// Export vector phase states at this label instead
        #[arg(long, allow_hyphen_values = true)]
        vector_m: Option<i64>,
        /// Run the phase-state checks
        #[arg(long)]
        verify: bool,
    },
    /// Apply exp(-iHt) to a phase state or a state file
    Evolve {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = FamilyArg::Ed)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        /// State JSON to evolve instead of a phase state
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Truncated algebra, shift operators and theta states for kappa >= 0
    Truncated {
        /// Quadrature grid size (default 2 sigma + 1)
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Mutually unbiased bases
    Mub {
        #[command(subcommand)]
        action: MubAction,
    },
    /// Every check for the given parameters
    VerifyAll {
        /// Dimensions for the MUB part
        #[arg(long = "mub-n", value_delimiter = ',', default_values_t = [2usize, 3, 5])]
        mub_n: Vec<usize>,
    },
    /// Write all operators and phase states for the given parameters
    Export,
}

#[derive(Subcommand, Debug)]
enum RepAction {
    Build {
        /// Write a1+, a1-, a2+, a2-, N1, N2 as a JSON array
        #[arg(long)]
        export: Option<PathBuf>,
    },
    Check,
}

#[derive(Subcommand, Debug)]
enum MubAction {
    Generate {
        #[arg(long = "N", short = 'N')]
        n: usize,
        #[arg(long, value_enum, default_value_t = RouteArg::E1)]
        route: RouteArg,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    E1d,
    E2d,
    E3d,
    Ed,
}

impl From<FamilyArg> for PhaseFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::E1d => PhaseFamily::E1d,
            FamilyArg::E2d => PhaseFamily::E2d,
            FamilyArg::E3d => PhaseFamily::E3d,
            FamilyArg::Ed => PhaseFamily::Ed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    E1,
    E3,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::E1 => Route::E1,
            RouteArg::E3 => Route::E3,
        }
    }
}

/// Failure kinds mapped to exit codes 2 (usage) and 1 (checks).
enum Failure {
    Usage(String),
    Checks,
}

impl From<phasekit::Error> for Failure {
    fn from(e: phasekit::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

impl Common {
    fn spec(&self) -> Result<KappaSpec, Failure> {
        match (self.k, self.kappa) {
            (Some(k), _) => Ok(KappaSpec::negative(k, self.phi)),
            (None, Some(kappa)) => Ok(KappaSpec::from_kappa(kappa, Some(self.sigma), self.phi)?),
            (None, None) => Err(Failure::Usage("one of --k or --kappa is required".into())),
        }
    }

    fn write_artifact<T: Serialize>(&self, value: &T) -> Outcome {
        if let Some(path) = &self.out {
            write_json(path, value)?;
        }
        Ok(())
    }

    fn emit_report(&self, report: &VerificationReport) -> Outcome {
        match self.format {
            Format::Text => println!("{report}"),
            Format::Json => println!("{}", io::to_pretty(report)?),
        }
        if report.overall {
            Ok(())
        } else {
            Err(Failure::Checks)
        }
    }

    fn emit_data<T: Serialize>(&self, value: &T, summary: &str) -> Outcome {
        self.write_artifact(value)?;
        match self.format {
            Format::Json if self.out.is_none() => println!("{}", io::to_pretty(value)?),
            _ => println!("{summary}"),
        }
        Ok(())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = io::to_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.tolerance.is_nan() || cli.common.tolerance <= 0.0 {
        eprintln!("error: tolerance must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Rep { action } => rep(c, action),
        Command::PhaseOps { family } => phase_ops_cmd(c, *family),
        Command::PhaseStates {
            family,
            l,
            vector_m,
            verify,
        } => phase_states_cmd(c, *family, *l, *vector_m, *verify),
        Command::Evolve {
            t,
            family,
            l,
            m,
            state,
        } => evolve_cmd(c, *t, *family, *l, *m, state.as_deref()),
        Command::Truncated { grid } => truncated_cmd(c, *grid),
        Command::Mub { action } => match action {
            MubAction::Generate { n, route, verify } => mub_cmd(c, *n, (*route).into(), *verify),
        },
        Command::VerifyAll { mub_n } => {
            let mut cfg = RunConfig::new(c.spec()?);
            cfg.tolerance = c.tolerance;
            cfg.seed = c.seed;
            cfg.sigma = c.sigma;
            cfg.mub_dims = mub_n.clone();
            let report = verify::run_all(&cfg)?;
            c.write_artifact(&report)?;
            c.emit_report(&report)
        }
        Command::Export => export_cmd(c),
    }
}

fn rep(c: &Common, action: &RepAction) -> Outcome {
    let spec = c.spec()?;
    match action {
        RepAction::Build { export } => {
            let rep = Representation::build(&spec)?;
            let ops: Vec<OperatorJson> = rep.generators().iter().map(|op| OperatorJson::from_operator(op)).collect();
            if let Some(path) = export {
                write_json(path, &ops)?;
            }
            let summary = format!(
                "built {} operators of dimension {} ({}, regime {})",
                ops.len(),
                rep.space.dim(),
                ops.iter().map(|o| o.label.as_str()).collect::<Vec<_>>().join(", "),
                spec.regime()
            );
            c.emit_data(&ops, &summary)
        }
        RepAction::Check => {
            let report = verify::verify_representation(&spec, c.tolerance)?;
            c.write_artifact(&report)?;
            c.emit_report(&report)
        }
    }
}

fn phase_ops_cmd(c: &Common, family: Option<FamilyArg>) -> Outcome {
    let spec = c.spec()?;
    let space = Arc::new(FockSpace::build(&spec));
    if let Some(f) = family {
        let op = phase_ops::build(f.into(), &spec, &space)?;
        c.write_artifact(&PhaseOperatorJson::from_phase_operator(&op))?;
    } else if c.out.is_some() {
        let ops = [PhaseFamily::E1d, PhaseFamily::E2d, PhaseFamily::E3d, PhaseFamily::Ed]
            .into_iter()
            .map(|f| phase_ops::build(f, &spec, &space).map(|op| PhaseOperatorJson::from_phase_operator(&op)))
            .collect::<phasekit::Result<Vec<_>>>()?;
        c.write_artifact(&ops)?;
    }
    let report = verify::verify_phase_operators(&spec, c.tolerance)?;
    c.emit_report(&report)
}

fn phase_states_cmd(c: &Common, family: FamilyArg, l: usize, vector_m: Option<i64>, check: bool) -> Outcome {
    let spec = c.spec()?;
    let space = Arc::new(FockSpace::build(&spec));
    let fam: PhaseFamily = family.into();
    if let Some(m) = vector_m {
        let states = phase_states::vector_phase_states(&spec, &space, fam, m, c.phi)?;
        let json: Vec<VectorPhaseStateJson> = states.iter().map(VectorPhaseStateJson::from_vector_state).collect();
        c.emit_data(&json, &format!("{} vector phase states at m = {m}", json.len()))?;
    } else {
        let sf = StateFamily::with_block(fam, l);
        let states = phase_states::phase_states(&spec, &space, sf, c.phi)?;
        let json: Vec<PhaseStateJson> = io::phase_state_family_json(&states);
        c.emit_data(&json, &format!("{} phase states for {sf} at phi = {}", json.len(), c.phi))?;
    }
    if check {
        let mut rng = RunConfig { seed: c.seed, ..RunConfig::new(spec) }.rng();
        let report = verify::verify_phase_states(&spec, c.tolerance, &mut rng)?;
        // the data went to stdout or --out; the report always goes to stdout as text
        println!("{report}");
        if !report.overall {
            return Err(Failure::Checks);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EvolveOutput {
    t: f64,
    state: StateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability_residual: Option<f64>,
}

fn evolve_cmd(c: &Common, t: f64, family: FamilyArg, l: usize, m: i64, state: Option<&Path>) -> Outcome {
    let spec = c.spec()?;
    let (space, input, target) = match state {
        Some(path) => {
            let v = io::state_from_json(&fs::read_to_string(path)?)?;
            (Arc::clone(v.space()), v, None)
        }
        None => {
            let space = Arc::new(FockSpace::build(&spec));
            let sf = match family {
                FamilyArg::Ed => StateFamily::Ed,
                f => StateFamily::with_block(f.into(), l),
            };
            let v = phase_states::phase_state(&spec, &space, sf, m, c.phi)?;
            let w = phase_states::phase_state(&spec, &space, sf, m, c.phi + t)?;
            (space, v, Some(w))
        }
    };
    let out = phase_states::evolve(&spec, &space, &input, t)?;
    let residual = target.as_ref().map(|w| out.distance(w));
    let json = EvolveOutput {
        t,
        state: StateJson::from_state(&out),
        stability_residual: residual,
    };
    let summary = match residual {
        Some(r) => format!("evolved by t = {t}; distance to the state at phi + t: {r:.3e}"),
        None => format!("evolved by t = {t}; norm {:.15}", out.norm()),
    };
    c.emit_data(&json, &summary)?;
    match residual {
        Some(r) if r >= c.tolerance => Err(Failure::Checks),
        _ => Ok(()),
    }
}

fn truncated_cmd(c: &Common, grid: Option<usize>) -> Outcome {
    let spec = c.spec()?;
    let window = Window::for_spec(&spec)?;
    let mut report = truncated::check_window(&spec, &window, c.tolerance)?;
    if let Some(g) = grid {
        report.extend_prefixed(
            "quadrature",
            truncated::quadrature_closure(&spec, &window, spec.phi(), g, c.tolerance)?,
        );
    }
    if c.out.is_some() {
        let b = truncated::build_truncated_ladders(&spec, &window)?;
        let mut ops: Vec<OperatorJson> = b.all().iter().map(|op| OperatorJson::from_operator(op)).collect();
        for s in [Shift::E1, Shift::E2, Shift::E3] {
            ops.push(OperatorJson::from_operator(&truncated::build_einf(&spec, &window, s)?));
        }
        c.write_artifact(&serde_json::json!({ "operators": ops, "report": report }))?;
    }
    c.emit_report(&report)
}

fn mub_cmd(c: &Common, n: usize, route: Route, check: bool) -> Outcome {
    let set = mub::build_mub_set(n, route, c.tolerance)?;
    let json = io::MubSetJson::from_set(&set);
    let cert = &set.certificate;
    let summary = format!(
        "N = {n}: {} bases via {route}, max deviation {:.3e}, {} pairs, prime {}",
        set.bases.len(),
        cert.max_deviation,
        cert.pairs_checked,
        cert.prime
    );
    c.emit_data(&json, &summary)?;
    if check {
        let report = verify::verify_mub(n, route, c.tolerance)?;
        println!("{report}");
        let unbiased = cert.prime && cert.complete();
        if !report.overall || !unbiased {
            return Err(Failure::Checks);
        }
    }
    Ok(())
}

fn export_cmd(c: &Common) -> Outcome {
    let spec = c.spec()?;
    let bundle = if spec.is_negative() {
        let rep = Representation::build(&spec)?;
        let space = Arc::clone(&rep.space);
        let mut operators: Vec<OperatorJson> = rep.generators().iter().map(|op| OperatorJson::from_operator(op)).collect();
        operators.push(OperatorJson::from_operator(&rep.h));
        let phase_operators = if spec.k() == Some(0) {
            Vec::new()
        } else {
            [PhaseFamily::E1d, PhaseFamily::E2d, PhaseFamily::E3d, PhaseFamily::Ed]
                .into_iter()
                .map(|f| phase_ops::build(f, &spec, &space).map(|op| PhaseOperatorJson::from_phase_operator(&op)))
                .collect::<phasekit::Result<Vec<_>>>()?
        };
        let ed_states = io::phase_state_family_json(&phase_states::phase_states_ed(&spec, &space, c.phi)?);
        serde_json::json!({
            "spec": spec,
            "operators": operators,
            "phase_operators": phase_operators,
            "phase_states": ed_states,
        })
    } else {
        let window = Window::for_spec(&spec)?;
        let rep = Representation::on_space(&spec, &window.space)?;
        let mut operators: Vec<OperatorJson> = rep.generators().iter().map(|op| OperatorJson::from_operator(op)).collect();
        operators.push(OperatorJson::from_operator(&fock::hamiltonian(&spec, &window.space)));
        let b = truncated::build_truncated_ladders(&spec, &window)?;
        let truncated_ops: Vec<OperatorJson> = b.all().iter().map(|op| OperatorJson::from_operator(op)).collect();
        let shifts = [Shift::E1, Shift::E2, Shift::E3]
            .into_iter()
            .map(|s| truncated::build_einf(&spec, &window, s).map(|op| OperatorJson::from_operator(&op)))
            .collect::<phasekit::Result<Vec<_>>>()?;
        serde_json::json!({
            "spec": spec,
            "operators": operators,
            "truncated": truncated_ops,
            "shifts": shifts,
        })
    };
    let summary = match &c.out {
        Some(p) => format!("wrote {}", p.display()),
        None => "export bundle built; pass --out to write it".to_owned(),
    };
    c.emit_data(&bundle, &summary)
}
