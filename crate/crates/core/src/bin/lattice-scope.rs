use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lattice_scope::arith::{is_prime_u64, Natural};
use lattice_scope::census::{self, CensusError, IeMode};
use lattice_scope::construct::{self, ConstructError};
use lattice_scope::geometry::{self, GeometryError, Region, DEFAULT_MAX_LAYERS};
use lattice_scope::polyfam::{parse_family_normalized, FamilyError, LatticePoint, PointError};
use lattice_scope::reproduce::{self, TABLE1};
use lattice_scope::visibility;
use lattice_scope::{Limits, PolyFamily};

#[derive(Parser, Debug)]
#[command(name = "lattice-scope", version, about = "Lattice point visibility along polynomial families y = q*P(x)")]
struct Cli {
    /// Worker threads for region and census scans (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide visibility of one point
    Visible {
        /// Descending coefficients a_n,...,a_1 (constant term is zero)
        #[arg(long)]
        poly: String,
        /// Point as "a,b"
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Visible count and density over [1,N]^2
    Density {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: u64,
        /// Write the prefix table N,visible_count,density here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        prime_bound: u64,
    },
    /// Exact count over [1,N]^2
    Count {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = CountMode::Pruned)]
        mode: CountMode,
    },
    /// Moduli, minimal moduli and lcm primes of one column
    Profile {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        a: u64,
    },
    /// Number of roots of P modulo a prime
    Rho {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
    },
    /// Truncated Euler-product constants
    Constant {
        #[arg(long, value_enum)]
        kind: ConstantKind,
        /// Family, for --kind cp
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        prime_bound: u64,
    },
    /// Curve through a point meeting no other lattice point
    Construct {
        #[arg(long)]
        point: String,
        #[arg(long)]
        prime: Option<u64>,
        /// Comma-separated primes for the averaged curve
        #[arg(long)]
        multi: Option<String>,
    },
    /// Curves through a point of higher dimension
    Bundle {
        /// Coordinates "a_1,...,a_n"
        #[arg(long)]
        coords: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Visibility map of a region as CSV
    Classify {
        #[arg(long)]
        poly: String,
        /// "min_x,max_x,min_y,max_y"
        #[arg(long)]
        region: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// First all-hidden square block in [1,X]x[1,Y]
    Blocks {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 2)]
        size: u64,
        /// "X,Y"
        #[arg(long)]
        max: String,
        /// Write every block corner as CSV to --out
        #[arg(long, requires = "out")]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Layers from a point to the nearest visible point
    Nearest {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_MAX_LAYERS)]
        max_layers: u64,
    },
    /// First point of a region with the given radius
    Radius {
        #[arg(long)]
        poly: String,
        /// "min_x,max_x,min_y,max_y"
        #[arg(long)]
        region: String,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_LAYERS)]
        max_layers: u64,
    },
    /// Re-run the fixed regression checks
    Reproduce {
        #[arg(long, value_enum)]
        target: Target,
        /// Restrict table1 to these row numbers
        #[arg(long)]
        rows: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountMode {
    Oracle,
    Subsets,
    Pruned,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstantKind {
    Cp,
    Cpq,
    CpqStar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Illustration,
    Table1,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Cap(String),
    Reproduction(Value),
    Io(std::io::Error),
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        Self::Input(format!("family: {e}"))
    }
}

impl From<PointError> for Failure {
    fn from(e: PointError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::CapExceeded { .. } | CensusError::ModeCapacity(_) => Self::Cap(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::CapExceeded { .. } => Self::Cap(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

#[derive(Serialize)]
struct Envelope {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    payload: Value,
    elapsed_ms: f64,
}

fn family(spec: &str) -> Result<PolyFamily, Failure> {
    Ok(parse_family_normalized(spec)?)
}

fn point(spec: &str) -> Result<LatticePoint, Failure> {
    Ok(spec.parse()?)
}

fn u64_list(spec: &str, what: &str) -> Result<Vec<u64>, Failure> {
    spec.split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("cannot parse {what} {spec:?}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Visible { .. } => "visible",
        Command::Density { .. } => "density",
        Command::Count { .. } => "count",
        Command::Profile { .. } => "profile",
        Command::Rho { .. } => "rho",
        Command::Constant { .. } => "constant",
        Command::Construct { .. } => "construct",
        Command::Bundle { .. } => "bundle",
        Command::Classify { .. } => "classify",
        Command::Blocks { .. } => "blocks",
        Command::Nearest { .. } => "nearest",
        Command::Radius { .. } => "radius",
        Command::Reproduce { .. } => "reproduce",
    }
}

fn run(cmd: &Command, limits: &Limits) -> Result<(Option<String>, Value), Failure> {
    match cmd {
        Command::Visible { poly, point: pt } => {
            let p = family(poly)?;
            let pt = point(pt)?;
            let mut payload = serde_json::to_value(visibility::is_visible(&p, pt)).expect("serializable");
            payload["gcd_p"] = json!(visibility::gcd_p(&p, pt).to_string());
            payload["lcm_criterion"] = json!(visibility::lcm_criterion(&p, pt));
            Ok((Some(p.to_spec()), payload))
        }
        Command::Density {
            poly,
            n,
            out,
            prime_bound,
        } => {
            let p = family(poly)?;
            let density = census::empirical_density(&p, *n, limits)?;
            let coprime = census::coprimality_count(&p, *n, limits)?;
            let constant = census::constant_cp(&p, *prime_bound)?;
            if let Some(path) = out {
                let mut w = create(path)?;
                writeln!(w, "N,visible_count,density")?;
                for row in census::density_prefix(&p, *n, limits)? {
                    writeln!(w, "{},{},{}", row.n, row.visible_count, row.density)?;
                }
                w.flush()?;
            }
            Ok((
                Some(p.to_spec()),
                json!({
                    "n": n,
                    "visible_count": density.visible_count,
                    "density": density.density_estimate,
                    "coprimality_count": coprime,
                    "c_p_constant": constant.value,
                    "prime_bound": constant.prime_bound,
                    "tail_bound": constant.tail_bound,
                }),
            ))
        }
        Command::Count { poly, n, mode } => {
            let p = family(poly)?;
            let count = match mode {
                CountMode::Oracle => census::brute_force_count(&p, *n, limits)?,
                CountMode::Subsets => census::exact_count_ie(&p, *n, IeMode::SubsetEnumeration, limits)?,
                CountMode::Pruned => census::exact_count_ie(&p, *n, IeMode::PrunedLcm, limits)?,
            };
            let mode = format!("{mode:?}").to_lowercase();
            Ok((Some(p.to_spec()), json!({ "n": n, "count": count, "mode": mode })))
        }
        Command::Profile { poly, a } => {
            let p = family(poly)?;
            if *a == 0 {
                return Err(Failure::Input("column must be at least 1".into()));
            }
            let prof = visibility::column_profile(&p, *a);
            let strings = |v: &[Natural]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>();
            Ok((
                Some(p.to_spec()),
                json!({
                    "a": a,
                    "moduli": prof.moduli.iter().map(|(t, m)| json!([t, m.to_string()])).collect::<Vec<_>>(),
                    "minimal_moduli": strings(&prof.minimal_moduli),
                    "lcm_prime_set": strings(&prof.lcm_prime_set),
                }),
            ))
        }
        Command::Rho { poly, p: prime } => {
            let p = family(poly)?;
            if !is_prime_u64(*prime) {
                return Err(Failure::Input(format!("{prime} is not prime")));
            }
            Ok((Some(p.to_spec()), json!({ "p": prime, "rho": census::rho(&p, *prime) })))
        }
        Command::Constant {
            kind,
            poly,
            p,
            q,
            prime_bound,
        } => {
            let need = |x: &Option<u64>, flag: &str| x.ok_or_else(|| Failure::Input(format!("--{flag} is required")));
            let (fam, result) = match kind {
                ConstantKind::Cp => {
                    let spec = poly.as_deref().ok_or_else(|| Failure::Input("--poly is required".into()))?;
                    let fam = family(spec)?;
                    let r = census::constant_cp(&fam, *prime_bound)?;
                    (Some(fam.to_spec()), r)
                }
                ConstantKind::Cpq => (None, census::constant_cpq(need(p, "p")?, need(q, "q")?, *prime_bound)?),
                ConstantKind::CpqStar => (
                    None,
                    census::constant_cpq_star(need(p, "p")?, need(q, "q")?, *prime_bound)?,
                ),
            };
            Ok((fam, serde_json::to_value(result).expect("serializable")))
        }
        Command::Construct { point: pt, prime, multi } => {
            let pt = point(pt)?;
            let payload = match multi {
                Some(list) => {
                    let ells: Vec<Natural> = u64_list(list, "prime list")?.into_iter().map(Natural::from).collect();
                    serde_json::to_value(construct::construct_multi_prime(pt, &ells)?)
                }
                None => {
                    let c = construct::construct_visible(pt, prime.map(Natural::from))?;
                    let mut v = serde_json::to_value(&c).expect("serializable");
                    v["valuation_profile"] = serde_json::to_value(construct::valuation_profile(&c)).expect("serializable");
                    Ok(v)
                }
            }
            .expect("serializable");
            Ok((None, payload))
        }
        Command::Bundle { coords, prime } => {
            let coords = u64_list(coords, "coordinates")?;
            let b = construct::construct_curve_bundle(&coords, prime.map(Natural::from))?;
            Ok((None, serde_json::to_value(b).expect("serializable")))
        }
        Command::Classify { poly, region, out } => {
            let p = family(poly)?;
            let region: Region = region.parse()?;
            let grid = geometry::classify_region(&p, region, limits)?;
            let mut w = create(out)?;
            grid.write_csv(&mut w)?;
            w.flush()?;
            Ok((
                Some(p.to_spec()),
                json!({ "region": region, "visible_count": grid.visible_count(), "out": out }),
            ))
        }
        Command::Blocks {
            poly,
            size,
            max,
            all,
            out,
        } => {
            let p = family(poly)?;
            let [x, y] = u64_list(max, "--max")?[..] else {
                return Err(Failure::Input(format!("--max expects \"X,Y\", got {max:?}")));
            };
            let region = Region::square_from_origin(x, y)?;
            let first = geometry::find_block(&p, *size, region, limits)?;
            let mut payload = json!({ "found": first.is_some(), "scanned_region": region, "size": size });
            if let Some(hit) = first {
                payload["corner"] = json!([hit.corner.a, hit.corner.b]);
                payload["block"] = serde_json::to_value(hit).expect("serializable");
            }
            if *all {
                let hits = geometry::find_all_blocks(&p, *size, region, limits)?;
                let path = out.as_ref().expect("clap enforces --out");
                let mut w = create(path)?;
                writeln!(w, "corner_x,corner_y")?;
                for h in &hits {
                    writeln!(w, "{},{}", h.corner.a, h.corner.b)?;
                }
                w.flush()?;
                payload["block_count"] = json!(hits.len());
            }
            Ok((Some(p.to_spec()), payload))
        }
        Command::Nearest {
            poly,
            point: pt,
            max_layers,
        } => {
            let p = family(poly)?;
            let r = geometry::radius_to_visible(&p, point(pt)?, *max_layers);
            Ok((Some(p.to_spec()), serde_json::to_value(r).expect("serializable")))
        }
        Command::Radius {
            poly,
            region,
            r,
            max_layers,
        } => {
            let p = family(poly)?;
            let region: Region = region.parse()?;
            let hit = geometry::find_point_with_radius(&p, region, *r, *max_layers);
            let mut payload = json!({ "found": hit.is_some(), "r": r });
            if let Some(pt) = hit {
                payload["point"] = json!([pt.a, pt.b]);
            }
            Ok((Some(p.to_spec()), payload))
        }
        Command::Reproduce { target, rows } => {
            let checks = match target {
                Target::Illustration => reproduce::illustration_checks(),
                Target::Table1 => {
                    let wanted = rows.as_deref().map(|r| u64_list(r, "row list")).transpose()?;
                    if let Some(w) = &wanted {
                        if let Some(bad) = w.iter().find(|&&r| r == 0 || r > TABLE1.len() as u64) {
                            return Err(Failure::Input(format!("no table row {bad}")));
                        }
                    }
                    TABLE1
                        .iter()
                        .filter(|row| wanted.as_ref().is_none_or(|w| w.contains(&u64::from(row.row))))
                        .map(|row| reproduce::check_table1_row(row, limits))
                        .collect()
                }
            };
            let passed = checks.iter().filter(|c| c.passed).count();
            let payload = json!({
                "target": format!("{target:?}").to_lowercase(),
                "passed": passed,
                "total": checks.len(),
                "checks": checks,
            });
            if passed == checks.len() {
                Ok((None, payload))
            } else {
                Err(Failure::Reproduction(payload))
            }
        }
    }
}

fn emit(command: &'static str, family: Option<String>, payload: Value, start: Instant) {
    let envelope = Envelope {
        command,
        family,
        payload,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    println!("{}", serde_json::to_string(&envelope).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("lattice-scope: cannot configure threads: {e}");
        }
    }
    let limits = Limits::from_env();
    let start = Instant::now();
    let command = name(&cli.command);
    match run(&cli.command, &limits) {
        Ok((family, payload)) => {
            emit(command, family, payload, start);
            ExitCode::SUCCESS
        }
        Err(Failure::Reproduction(payload)) => {
            emit(command, None, payload, start);
            eprintln!("lattice-scope: reproduction checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("lattice-scope: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("lattice-scope: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("lattice-scope: {e}");
            ExitCode::from(1)
        }
    }
}
