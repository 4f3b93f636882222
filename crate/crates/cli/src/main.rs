use std::f64::consts::TAU;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triplegear::config::to_json;
use triplegear::kinematics::ring_sweep;
use triplegear::paradox::critical_spacing;
use triplegear::*;

#[derive(Parser)]
#[command(
    name = "triplegear",
    version,
    about = "Linked triple gear design and export"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the thickest symmetric ring configuration and write it as JSON.
    Optimize {
        /// Search over φ as well instead of fixing φ = 0.
        #[arg(long)]
        free_phi: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print ring 0's contact points as (alpha, beta) pairs.
    Contacts {
        #[arg(long)]
        config: PathBuf,
    },
    /// Carve a gear, or all three with --assembly, to STL.
    Carve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        teeth: Option<usize>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        assembly: bool,
        /// Shell the ring with an inner wall.
        #[arg(long)]
        hollow: bool,
        #[arg(long)]
        ascii: bool,
        #[arg(long, default_value = "gear.stl")]
        out: PathBuf,
    },
    /// Carve the threaded central axle to STL.
    Axle {
        #[arg(long)]
        config: PathBuf,
        /// Thread pitch; matched to the gear motion when omitted.
        #[arg(long)]
        pitch: Option<f64>,
        #[arg(long, default_value_t = 360)]
        steps: usize,
        #[arg(long, default_value_t = 0.02)]
        slice: f64,
        #[arg(long)]
        ascii: bool,
        #[arg(long, default_value = "axle.stl")]
        out: PathBuf,
    },
    /// Three co-rotating screws plus their contact-normal CSV.
    Paradox {
        /// Files are written as PREFIX-screw{0,1,2}.stl and PREFIX-contacts.csv.
        #[arg(long, default_value = "paradox")]
        out: String,
        #[arg(long, default_value_t = 80.0)]
        pitch: f64,
        #[arg(long, default_value_t = 22.0)]
        height: f64,
        /// Spacing added to the critical touching distance.
        #[arg(long, default_value_t = 2e-4)]
        margin: f64,
        #[arg(long, default_value_t = 24)]
        phases: usize,
        #[arg(long)]
        ascii: bool,
    },
    /// Clearance sweep of the three carved gears over one revolution.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 360)]
        steps: usize,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print a mesh health report for an STL file.
    Validate { file: PathBuf },
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn create(path: &Path) -> std::result::Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn put(mut f: File, path: &Path, bytes: &[u8]) -> Outcome {
    f.write_all(bytes)
        .map_err(|e| Failure::Compute(format!("writing {}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<ConfigDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    read_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn design(doc: &ConfigDocument) -> std::result::Result<DesignConfig, Failure> {
    doc.to_config().map_err(|e| Failure::Usage(e.to_string()))
}

fn format_of(ascii: bool) -> StlFormat {
    if ascii {
        StlFormat::Ascii
    } else {
        StlFormat::Binary
    }
}

fn gear_spec(doc: &ConfigDocument, cfg: &DesignConfig) -> std::result::Result<GearSpec, Failure> {
    Ok(match doc.tooth_profile {
        Some(s) => s,
        None => GearSpec::for_design(cfg)?,
    })
}

fn optimize(free_phi: bool, tol: f64, out: Option<PathBuf>) -> Outcome {
    if !(tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let file = out.as_deref().map(create).transpose()?;
    let cfg = maximize_thickness(SymmetricParams::new(0.5, 0.0, -0.8), !free_phi, tol)?;
    let mut doc = ConfigDocument::from_config(&cfg);
    doc.link_report = Some(link_report(&cfg.circles)?);
    let text = write_config(&doc)?;
    match (file, out) {
        (Some(f), Some(p)) => put(f, &p, text.as_bytes()),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn contacts(config: &Path) -> Outcome {
    let doc = load(config)?;
    let mut cfg = design(&doc)?;
    if cfg.contacts.len() != 4 {
        cfg.contacts = contact_points(&cfg)?;
    }
    println!("alpha,beta");
    for c in &cfg.contacts {
        println!("{:.16e},{:.16e}", c.alpha, c.beta);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn carve(
    config: &Path,
    teeth: Option<usize>,
    gap: Option<f64>,
    assembly: bool,
    hollow: bool,
    ascii: bool,
    out: &Path,
) -> Outcome {
    let doc = load(config)?;
    let cfg = design(&doc)?;
    let mut spec = gear_spec(&doc, &cfg)?;
    if let Some(n) = teeth {
        spec.profile.tooth_count = n;
    }
    if let Some(g) = gap {
        spec.gap = g;
    }
    spec.hollow = hollow;
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let file = create(out)?;
    let mesh = if assembly {
        let [a, b, c] = assemble_triple(&cfg, &spec)?;
        let mut m = a.mesh;
        m.append(&b.mesh);
        m.append(&c.mesh);
        m
    } else {
        assemble_gear(&cfg, &spec)?.mesh
    };
    let rep = validate(&mesh);
    if !rep.watertight {
        return Err(Failure::Compute(format!(
            "assemble_gear: mesh has {} open edges",
            rep.boundary_edges
        )));
    }
    put(file, out, &write_stl(&mesh, format_of(ascii))?)?;
    eprintln!(
        "wrote {} ({} triangles)",
        out.display(),
        mesh.triangles.len()
    );
    Ok(())
}

fn axle(
    config: &Path,
    pitch: Option<f64>,
    steps: usize,
    slice: f64,
    ascii: bool,
    out: &Path,
) -> Outcome {
    if !(slice > 0.0) {
        return Err(Failure::Usage(format!(
            "--slice must be positive, got {slice}"
        )));
    }
    let doc = load(config)?;
    let cfg = design(&doc)?;
    let spec = gear_spec(&doc, &cfg)?;
    let file = create(out)?;
    let gear = assemble_gear(&cfg, &spec)?;
    let mut seed = match &doc.axle {
        Some(a) => a.clone(),
        None => AxleSpec::for_gear(&cfg, &gear)?,
    };
    if let Some(p) = pitch {
        seed.pitch = p;
    }
    let section = carve_axle_section(&cfg, &gear, &seed, 1.0, seed.speed_ratio, steps)?;
    let mesh = axle_mesh(&section, &seed, slice)?;
    put(file, out, &write_stl(&mesh, format_of(ascii))?)?;
    eprintln!(
        "wrote {} ({} starts, pitch {:.6}, speed ratio {})",
        out.display(),
        seed.starts,
        seed.pitch,
        seed.speed_ratio
    );
    Ok(())
}

fn paradox(
    prefix: &str,
    pitch: f64,
    height: f64,
    margin: f64,
    phases: usize,
    ascii: bool,
) -> Outcome {
    if phases == 0 || !(margin > 0.0) {
        return Err(Failure::Usage(
            "--phases and --margin must be positive".into(),
        ));
    }
    let paths: Vec<PathBuf> = (0..3)
        .map(|k| PathBuf::from(format!("{prefix}-screw{k}.stl")))
        .chain([PathBuf::from(format!("{prefix}-contacts.csv"))])
        .collect();
    let files = paths
        .iter()
        .map(|p| create(p))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let profile = involute_profile(1.0, 3, 1.6)?;
    let (touch, _) = critical_spacing(&profile);
    let screws = paradox_screws(&profile, pitch, height, touch + margin)?;
    // the section pattern repeats every third of a turn
    let at: Vec<f64> = (0..phases)
        .map(|k| TAU / 3.0 * k as f64 / phases as f64)
        .collect();
    let report = contact_normal_report(&screws, &at, [1.0; 3], 1e-3)?;
    let mut files = files.into_iter();
    for (k, m) in screws.meshes.iter().enumerate() {
        put(
            files.next().expect("four files"),
            &paths[k],
            &write_stl(m, format_of(ascii))?,
        )?;
    }
    put(
        files.next().expect("four files"),
        &paths[3],
        contact_csv(&report).as_bytes(),
    )?;
    let worst = report.iter().map(|c| c.angle_deg).fold(0.0, f64::max);
    eprintln!(
        "spacing {:.9}, largest contact-normal angle {worst:.3} deg",
        touch + margin
    );
    Ok(())
}

fn simulate(config: &Path, steps: usize, report: &Path) -> Outcome {
    if steps < 36 {
        return Err(Failure::Usage(format!(
            "--steps must be at least 36, got {steps}"
        )));
    }
    let doc = load(config)?;
    let cfg = design(&doc)?;
    let spec = gear_spec(&doc, &cfg)?;
    let file = create(report)?;
    let gears = assemble_triple(&cfg, &spec)?;
    let cols = [
        gears[0].collider()?,
        gears[1].collider()?,
        gears[2].collider()?,
    ];
    let samples = ring_sweep(&cols, &CompoundMovement::uniform(&cfg, 1.0), steps)?;
    put(file, report, clearance_csv(&samples).as_bytes())?;
    let worst = clearance::minimum(&samples).expect("steps > 0");
    println!(
        "min clearance {:.16e} at t = {:.16e} (pair {}-{})",
        worst.approach.clearance, worst.time, worst.pair.0, worst.pair.1
    );
    if worst.approach.clearance < 0.0 {
        return Err(Failure::Compute("ring_sweep: gears interpenetrate".into()));
    }
    Ok(())
}

fn validate_file(path: &Path) -> Outcome {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mesh = read_stl(&bytes)?;
    let rep = validate(&mesh);
    print!("{}", to_json(&rep)?);
    if !(rep.watertight && rep.orientation_consistent) {
        return Err(Failure::Compute(
            "validate: mesh is not a closed oriented surface".into(),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Optimize { free_phi, tol, out } => optimize(free_phi, tol, out),
        Command::Contacts { config } => contacts(&config),
        Command::Carve {
            config,
            teeth,
            gap,
            assembly,
            hollow,
            ascii,
            out,
        } => carve(&config, teeth, gap, assembly, hollow, ascii, &out),
        Command::Axle {
            config,
            pitch,
            steps,
            slice,
            ascii,
            out,
        } => axle(&config, pitch, steps, slice, ascii, &out),
        Command::Paradox {
            out,
            pitch,
            height,
            margin,
            phases,
            ascii,
        } => paradox(&out, pitch, height, margin, phases, ascii),
        Command::Simulate {
            config,
            steps,
            report,
        } => simulate(&config, steps, &report),
        Command::Validate { file } => validate_file(&file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
