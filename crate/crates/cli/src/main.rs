use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperbolic_vinberg::coxeter::{diagram_automorphism_order, finite_volume_check, CoxeterDiagram};
use hyperbolic_vinberg::covolume::{hyperbolic_volume, orbifold_euler_characteristic, quotient_invariants};
use hyperbolic_vinberg::eisenstein::{anti_involution_classes, fixed_lattice_form};
use hyperbolic_vinberg::forms::{
    conjugate_signature_pair, nonarithmeticity_witness, QuadRingElement, QuadRingForm, QuadraticForm,
};
use hyperbolic_vinberg::roots::{default_controlling_vector, run_vinberg, VinbergLimits};
use hyperbolic_vinberg::table::{analyze_form, report_serialize, table, OutputFormat, RunConfig};
use hyperbolic_vinberg::{BigInt, Error};

const EXIT_LIMIT: u8 = 3;
const EXIT_MATH: u8 = 4;
const EXIT_IO: u8 = 5;

/// Hyperbolic reflection groups and the volume of the moduli space of real
/// cubic surfaces.
#[derive(Parser)]
#[command(name = "realcubic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest root height examined by Vinberg's algorithm.
    #[arg(long, global = true, default_value_t = 100)]
    max_height: u64,

    /// Largest number of accepted roots.
    #[arg(long, global = true, default_value_t = 50)]
    max_roots: usize,

    /// Output format: text or json-like-structured (json); dot or text for
    /// diagram-export.
    #[arg(long, global = true, default_value = "text")]
    format: String,

    /// Significant digits of numeric volumes in structured output.
    #[arg(long, global = true, default_value_t = 16)]
    precision: usize,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct FormSource {
    /// Diagonal form as comma-separated integers, e.g. -1,3,3,1,1.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "form")]
    diag: Option<String>,

    /// Form file (`dim n` followed by `diag ...` or n rows).
    #[arg(long)]
    form: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the volume table for the five components.
    Table,
    /// Run Vinberg's algorithm on a form and list the accepted roots.
    Vinberg {
        #[command(flatten)]
        source: FormSource,
        /// Controlling vector as comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        v0: Option<String>,
    },
    /// Orbifold Euler characteristic and volume of a form or a diagram file.
    Euler {
        #[command(flatten)]
        source: FormSource,
        /// Coxeter diagram file (`node`/`bond` lines).
        #[arg(long, conflicts_with_all = ["diag", "form"])]
        diagram: Option<PathBuf>,
        /// Hyperbolic dimension of a diagram file.
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
    /// Fixed lattices of the five anti-involutions of the Eisenstein lattice.
    FixedLattice {
        /// Only this representative (0..=4).
        #[arg(long)]
        j: Option<usize>,
    },
    /// Signatures of a Z[sqrt 3] form under both real embeddings.
    Galois {
        /// Diagonal entries such as -1,1*r3,1,1,1.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "form")]
        diag: Option<String>,
        /// Form file with entries a+b*r3.
        #[arg(long)]
        form: Option<PathBuf>,
    },
    /// Export the Coxeter diagram of a form or a diagram file.
    DiagramExport {
        #[command(flatten)]
        source: FormSource,
        /// Coxeter diagram file (`node`/`bond` lines).
        #[arg(long, conflicts_with_all = ["diag", "form"])]
        diagram: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Io { path: PathBuf, source: io::Error },
    Criterion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Incomplete { .. }) => EXIT_LIMIT,
            Failure::Core(_) | Failure::Criterion(_) => EXIT_MATH,
            Failure::Io { .. } => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io { path, source } => format!("{}: {source}", path.display()),
            Failure::Criterion(m) => m.clone(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|source| Failure::Io { path: path.to_path_buf(), source })
}

fn parse_ints(csv: &str) -> Outcome<Vec<BigInt>> {
    csv.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Failure::Core(Error::InvalidInput(format!("`{t}` is not an integer"))))
        })
        .collect()
}

fn load_form(source: &FormSource) -> Outcome<Option<QuadraticForm>> {
    match (&source.diag, &source.form) {
        (Some(csv), _) => Ok(Some(QuadraticForm::from_diagonal(parse_ints(csv)?)?)),
        (None, Some(path)) => Ok(Some(QuadraticForm::from_text(&read(path)?)?)),
        (None, None) => Ok(None),
    }
}

fn require_form(source: &FormSource) -> Outcome<QuadraticForm> {
    load_form(source)?.ok_or_else(|| Failure::Core(Error::InvalidInput("give --diag or --form".into())))
}

fn config(cli: &Cli, form: Option<QuadraticForm>) -> Outcome<RunConfig> {
    Ok(RunConfig {
        limits: VinbergLimits { max_height: cli.max_height, max_roots: cli.max_roots },
        format: cli.format.parse()?,
        precision: cli.precision,
        form_override: form,
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Outcome<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn diagram_of(cli: &Cli, source: &FormSource, file: &Option<PathBuf>) -> Outcome<CoxeterDiagram> {
    if let Some(path) = file {
        return Ok(CoxeterDiagram::from_text(&read(path)?)?);
    }
    let form = require_form(source)?;
    let v0 = default_controlling_vector(&form)?;
    let limits = VinbergLimits { max_height: cli.max_height, max_roots: cli.max_roots };
    Ok(run_vinberg(&form, &v0, &limits)?.diagram()?)
}

fn euler_of_diagram(cli: &Cli, path: &Path, dim: usize) -> Outcome<Vec<u8>> {
    let format: OutputFormat = cli.format.parse()?;
    let diagram = CoxeterDiagram::from_text(&read(path)?)?;
    if !finite_volume_check(&diagram, dim) {
        return Err(Failure::Criterion(format!(
            "{}: diagram does not bound a finite-volume polyhedron in dimension {dim}",
            path.display()
        )));
    }
    let chi_w = orbifold_euler_characteristic(&diagram);
    let aut = diagram_automorphism_order(&diagram);
    let chi = quotient_invariants(&chi_w, aut)?;
    let volume = match hyperbolic_volume(&chi, dim) {
        Ok(v) => Some(v),
        Err(Error::UnsupportedDimension(_)) => None,
        Err(e) => return Err(e.into()),
    };
    match format {
        OutputFormat::Text => {
            let mut out = format!("facets {}\nchi_W {chi_w}\nautomorphisms {aut}\nchi {chi}\n", diagram.len());
            if let Some(v) = &volume {
                let unit = if dim == 4 { "pi^2" } else { "pi" };
                out.push_str(&format!(
                    "volume {} {unit} = {}\n",
                    v.volume_coefficient,
                    v.volume_decimal(cli.precision)
                ));
            }
            Ok(out.into_bytes())
        }
        OutputFormat::Json => to_json(&serde_json::json!({
            "facet_count": diagram.len(),
            "chi_w": chi_w.to_string(),
            "automorphism_order": aut,
            "chi_pgamma": chi.to_string(),
            "volume": volume.map(|v| serde_json::json!({
                "dimension": dim,
                "coefficient": format!("{}/{}", v.volume_coefficient.numer(), v.volume_coefficient.denom()),
                "numeric": v.volume_decimal(cli.precision),
            })),
        })),
    }
}

fn fixed_lattices(cli: &Cli, only: Option<usize>) -> Outcome<Vec<u8>> {
    let format: OutputFormat = cli.format.parse()?;
    let classes = anti_involution_classes();
    let selected: Vec<usize> = match only {
        Some(j) if j < classes.len() => vec![j],
        Some(j) => return Err(Error::InvalidInput(format!("j = {j} is out of range 0..=4")).into()),
        None => (0..classes.len()).collect(),
    };
    let mut text = String::new();
    let mut records = Vec::new();
    for j in selected {
        let chi = &classes[j];
        let form = fixed_lattice_form(chi)?;
        text.push_str(&format!("# {chi}\n{}", form.to_text()));
        records.push(serde_json::json!({
            "j": j,
            "epsilons": chi.epsilons(),
            "gram": form.gram().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "signature": [form.signature().positive, form.signature().negative],
        }));
    }
    match format {
        OutputFormat::Text => Ok(text.into_bytes()),
        OutputFormat::Json => to_json(&records),
    }
}

fn galois(cli: &Cli, diag: &Option<String>, file: &Option<PathBuf>) -> Outcome<Vec<u8>> {
    let format: OutputFormat = cli.format.parse()?;
    let form = match (diag, file) {
        (Some(csv), _) => {
            let entries = csv
                .split(',')
                .map(|t| t.parse::<QuadRingElement>().map_err(Error::InvalidInput))
                .collect::<Result<Vec<_>, _>>()?;
            QuadRingForm::diagonal(entries)?
        }
        (None, Some(path)) => QuadRingForm::from_text(&read(path)?)?,
        (None, None) => return Err(Error::InvalidInput("give --diag or --form".into()).into()),
    };
    let (plus, minus) = conjugate_signature_pair(&form);
    let witness = nonarithmeticity_witness(&form)?;
    match format {
        OutputFormat::Text => Ok(format!("signature {plus}\nconjugate {minus}\nnonarithmetic {witness}\n").into_bytes()),
        OutputFormat::Json => to_json(&serde_json::json!({
            "signature": [plus.positive, plus.negative],
            "conjugate_signature": [minus.positive, minus.negative],
            "nonarithmeticity_witness": witness,
        })),
    }
}

fn execute(cli: &Cli) -> Outcome<Vec<u8>> {
    match &cli.command {
        Command::Table => {
            let config = config(cli, None)?;
            let report = table(&config)?;
            Ok(report_serialize(&report, config.format)?)
        }
        Command::Vinberg { source, v0 } => {
            let config = config(cli, Some(require_form(source)?))?;
            let v0 = v0.as_deref().map(parse_ints).transpose()?;
            Ok(analyze_form(&config, v0)?.serialize(config.format)?)
        }
        Command::Euler { source, diagram, dim } => match diagram {
            Some(path) => euler_of_diagram(cli, path, *dim),
            None => {
                let config = config(cli, Some(require_form(source)?))?;
                Ok(analyze_form(&config, None)?.serialize(config.format)?)
            }
        },
        Command::FixedLattice { j } => fixed_lattices(cli, *j),
        Command::Galois { diag, form } => galois(cli, diag, form),
        Command::DiagramExport { source, diagram } => {
            let render: fn(&CoxeterDiagram) -> String = match cli.format.as_str() {
                "dot" => CoxeterDiagram::to_dot,
                "text" => CoxeterDiagram::to_text,
                other => return Err(Error::UnknownFormat(other.to_string()).into()),
            };
            Ok(render(&diagram_of(cli, source, diagram)?).into_bytes())
        }
    }
}

fn emit(bytes: &[u8], out: &Option<PathBuf>) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| Failure::Io { path: path.clone(), source }),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| Failure::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli).and_then(|bytes| emit(&bytes, &cli.out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("realcubic: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
