//! `cluster-codes`: construct, run and verify multidimensional
//! cluster-error-correcting codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use cluster_codes::bits::BitVec;
use cluster_codes::codec::{
    default_route, fits_shape, info_from_text, info_to_text, route_colorings, AssembleOptions,
    CodeAssembly, CodecError, NdWord, Route,
};
use cluster_codes::coloring::{check_p1, check_p2, check_p3, ColoringSet};
use cluster_codes::component::{
    corrector_from_spec, search_limited_weight, search_optimum_burst_code, ComponentError,
};
use cluster_codes::lee::bounding_box_check;
use cluster_codes::oracle::{
    random_cluster, verify_decoder_equivalence, verify_distinct_syndromes, verify_linearity,
    verify_roundtrip, ClusterEnumeration,
};
use cluster_codes::poly::BinPoly;
use cluster_codes::report::CheckReport;
use cluster_codes::shape::{flat_if_inside, ShapeSpec};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(
    name = "cluster-codes",
    version,
    about = "Multidimensional cluster-error-correcting codes"
)]
struct Cli {
    /// Worker threads for certification and verification.
    #[arg(long, global = true, env = "CLUSTER_CODES_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an optimum burst-correcting cyclic code and write its spec.
    SearchCode(SearchCode),
    /// Assemble a code for an array and an error shape.
    Construct(Construct),
    /// Encode information bits into an array codeword.
    Encode(Encode),
    /// Correct a single cluster in an array.
    Decode(Decode),
    /// Flip the bits of a cluster in an array.
    Inject(Inject),
    /// Run verification suites.
    Verify(Verify),
    /// Print the redundancy report of an assembly.
    Bounds(Bounds),
}

#[derive(Args)]
struct SearchCode {
    #[arg(long)]
    b: usize,
    /// Correct only bursts with at most this many erroneous positions.
    #[arg(long)]
    weight_limit: Option<usize>,
    #[arg(long, default_value_t = 1)]
    m_min: usize,
    #[arg(long, default_value_t = 20)]
    m_max: usize,
    /// Explicit b-polynomial e(x), lowest degree first (e.g. 11 for 1+x).
    #[arg(long)]
    e: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Construct {
    /// Array sides, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// box:3x3, box:3x3:t=2, lee:R, lee:R:t=T or arb:b.
    #[arg(long)]
    shape: String,
    #[arg(long)]
    route: Option<String>,
    #[arg(long, default_value_t = 30)]
    corrector_m_max: usize,
    #[arg(long, default_value_t = 24)]
    locator_m_max: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write the colorings and their certificate.
    #[arg(long)]
    colorings_out: Option<PathBuf>,
}

#[derive(Args)]
struct Encode {
    #[arg(long)]
    assembly: PathBuf,
    /// Information file; random bits from --seed when absent.
    #[arg(long)]
    info: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Decode {
    #[arg(long)]
    assembly: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the recovered information bits.
    #[arg(long)]
    info_out: Option<PathBuf>,
}

#[derive(Args)]
struct Inject {
    #[arg(long)]
    assembly: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Positions to flip, e.g. "4,5;6,7". Random admissible cluster when absent.
    #[arg(long)]
    positions: Option<String>,
    /// Allow clusters outside the shape; without --positions, draws from
    /// the shape enlarged by one in every direction.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct Verify {
    #[arg(long, conflicts_with_all = ["lee_transform", "colorings"])]
    assembly: Option<PathBuf>,
    /// Enumerate every admissible cluster.
    #[arg(long, requires = "assembly")]
    exhaustive: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Dimension and radius.
    #[arg(long, num_args = 2, value_names = ["D", "R"], conflicts_with = "colorings")]
    lee_transform: Option<Vec<usize>>,
    /// Window side for --lee-transform.
    #[arg(long, default_value_t = 20)]
    side: usize,
    #[arg(long)]
    colorings: Option<PathBuf>,
}

#[derive(Args)]
struct Bounds {
    #[arg(long)]
    assembly: PathBuf,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("undecodable: the error is outside the correctable class")]
    Undecodable,
    #[error("verification failed")]
    CheckFailed,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::NotFound(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Undecodable => 4,
            CliError::CheckFailed => 5,
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::ShapeUnsupported(_) | CodecError::TooLarge(_) => {
                CliError::Unsupported(e.to_string())
            }
            CodecError::NoComponentCode(_) | CodecError::RankDeficient { .. } => {
                CliError::NotFound(e.to_string())
            }
            CodecError::Undecodable => CliError::Undecodable,
            CodecError::ColoringCheckFailed(_) => CliError::CheckFailed,
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ComponentError> for CliError {
    fn from(e: ComponentError) -> Self {
        match e {
            ComponentError::NotFoundInRange { .. } | ComponentError::BudgetExceeded { .. } => CliError::NotFound(e.to_string()),
            ComponentError::EvenBurstLength { b } => CliError::Usage(format!(
                "b = {b}: the canonical e(x) = 1 + x + ... + x^{} is not square-free; pass an odd b or an explicit --e",
                b - 1
            )),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_assembly(path: &Path) -> Result<CodeAssembly, CliError> {
    Ok(CodeAssembly::from_text(&read(path)?)?)
}

fn load_word(path: &Path, a: &CodeAssembly) -> Result<NdWord, CliError> {
    let w = NdWord::from_text(&read(path)?)?;
    if w.dims != a.dims() {
        return Err(CliError::Usage(format!(
            "array dims {:?} do not match the assembly's {:?}",
            w.dims,
            a.dims()
        )));
    }
    Ok(w)
}

fn cluster_line(a: &CodeAssembly, flats: &[usize]) -> String {
    let items: Vec<String> = flats
        .iter()
        .map(|&p| format!("({})", join(&a.index(p), ",")))
        .collect();
    format!("cluster: {}", items.join(" "))
}

fn join(v: &[usize], sep: &str) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn print_checks(reports: &[CheckReport]) -> Result<(), CliError> {
    for r in reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn search_code(args: SearchCode) -> Result<(), CliError> {
    if args.m_min > args.m_max {
        return Err(CliError::Usage("--m-min exceeds --m-max".into()));
    }
    let range = args.m_min..=args.m_max;
    let code = match args.weight_limit {
        Some(t) => {
            if args.e.is_some() {
                return Err(CliError::Usage(
                    "--e cannot be combined with --weight-limit".into(),
                ));
            }
            search_limited_weight(args.b, t, None, range)?
        }
        None => {
            let e = match &args.e {
                Some(text) => Some(
                    text.parse::<BinPoly>()
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                ),
                None => None,
            };
            corrector_from_spec(&search_optimum_burst_code(args.b, range, e.as_ref())?)?
        }
    };
    let text = code.spec_text();
    write(&args.out, &text)?;
    print!("{text}");
    Ok(())
}

fn construct(args: Construct) -> Result<(), CliError> {
    let shape = ShapeSpec::parse(&args.shape, Some(args.dims.len()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let route = args.route.as_deref().map(str::parse::<Route>).transpose()?;
    let options = AssembleOptions {
        corrector_m: 1..=args.corrector_m_max,
        locator_m: 1..=args.locator_m_max,
        route,
    };
    // Colorings do not depend on the array, so they are written even when
    // assembly fails.
    if let Some(path) = &args.colorings_out {
        let set = route_colorings(&shape, route.unwrap_or_else(|| default_route(&shape)))?;
        write(path, &set.to_text(Some(&set.default_window())))?;
    }
    let a = CodeAssembly::assemble(&args.dims, &shape, &options)?;
    write(&args.out, &a.to_text())?;
    println!("shape: {}", a.shape());
    println!("route: {} ({})", a.route(), a.colorings().family.name());
    println!("colors: {}", join(a.color_counts(), " "));
    for line in a.bounds_report().lines() {
        println!("{line}");
    }
    Ok(())
}

fn encode(args: Encode) -> Result<(), CliError> {
    let a = load_assembly(&args.assembly)?;
    let info = match &args.info {
        Some(path) => info_from_text(&read(path)?)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            BitVec::from_bools(
                &(0..a.info_len())
                    .map(|_| rng.gen::<bool>())
                    .collect::<Vec<_>>(),
            )
        }
    };
    let word = a.encode(&info)?;
    write(&args.out, &word.to_text())
}

fn decode(args: Decode) -> Result<(), CliError> {
    let a = load_assembly(&args.assembly)?;
    let word = load_word(&args.input, &a)?;
    let out = a.decode(&word)?;
    write(&args.out, &out.word.to_text())?;
    if let Some(path) = &args.info_out {
        write(path, &info_to_text(&a.extract_info(&out.word)))?;
    }
    match out.cluster {
        None => println!("no error"),
        Some(c) => {
            let flats: Vec<usize> = c.positions.iter().map(|p| a.flat(p)).collect();
            println!("{}", cluster_line(&a, &flats));
        }
    }
    Ok(())
}

fn parse_positions(text: &str, dims: &[usize]) -> Result<Vec<usize>, CliError> {
    let mut flats = Vec::new();
    for item in text.split(';').filter(|s| !s.trim().is_empty()) {
        let idx: Vec<i64> = item
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad position {item:?}")))
            })
            .collect::<Result<_, _>>()?;
        if idx.len() != dims.len() {
            return Err(CliError::Usage(format!(
                "position {item:?} needs {} coordinates",
                dims.len()
            )));
        }
        flats.push(
            flat_if_inside(&idx, dims).ok_or_else(|| {
                CliError::Usage(format!("position {item:?} is outside the array"))
            })?,
        );
    }
    flats.sort_unstable();
    flats.dedup();
    if flats.is_empty() {
        return Err(CliError::Usage("no positions given".into()));
    }
    Ok(flats)
}

fn enlarged(shape: &ShapeSpec) -> ShapeSpec {
    match shape.base() {
        ShapeSpec::Box { sides } => ShapeSpec::Box {
            sides: sides.iter().map(|s| s + 1).collect(),
        },
        ShapeSpec::LeeSphere { dim, radius } => ShapeSpec::LeeSphere {
            dim,
            radius: radius + 1,
        },
        other => other,
    }
}

fn inject(args: Inject) -> Result<(), CliError> {
    let a = load_assembly(&args.assembly)?;
    let mut word = load_word(&args.input, &a)?;
    let flats = match &args.positions {
        Some(text) => {
            let flats = parse_positions(text, a.dims())?;
            let idx: Vec<Vec<usize>> = flats.iter().map(|&p| a.index(p)).collect();
            if !args.force && !fits_shape(&idx, a.shape()) {
                return Err(CliError::Usage(format!(
                    "positions do not form a {} cluster (use --force)",
                    a.shape()
                )));
            }
            flats
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let shape = if args.force {
                enlarged(a.shape())
            } else {
                a.shape().clone()
            };
            random_cluster(&shape, a.dims(), &mut rng)
        }
    };
    word.flip_all(&flats);
    write(&args.out, &word.to_text())?;
    println!("{}", cluster_line(&a, &flats));
    Ok(())
}

/// Number of random clusters checked without --exhaustive.
const SAMPLED_CLUSTERS: usize = 1000;

fn verify(args: Verify) -> Result<(), CliError> {
    if let Some(path) = &args.assembly {
        let a = load_assembly(path)?;
        let mut reports = vec![
            CheckReport::new("assembly.reconstruction", true, 1),
            verify_linearity("codec.linearity", &a, 1000, args.seed),
        ];
        if args.exhaustive {
            let e = ClusterEnumeration::new(a.shape(), a.dims())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let columns: Vec<BitVec> = (0..a.len()).map(|p| a.h_column(p)).collect();
            reports.push(verify_distinct_syndromes(
                "oracle.distinct-syndromes",
                &columns,
                &e,
            ));
            reports.push(verify_roundtrip("oracle.roundtrip", &a, &e, args.seed));
            reports.push(verify_decoder_equivalence(
                "oracle.decoder-equivalence",
                &a,
                &e,
            ));
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut failures = 0;
            for _ in 0..SAMPLED_CLUSTERS {
                let flats = random_cluster(a.shape(), a.dims(), &mut rng);
                let mut w = NdWord::zeros(a.dims());
                w.flip_all(&flats);
                let ok = a.decode(&w).is_ok_and(|d| d.word.bits.is_zero());
                failures += usize::from(!ok);
            }
            let mut r = CheckReport::new(
                "codec.sampled-roundtrip",
                failures == 0,
                SAMPLED_CLUSTERS as u64,
            );
            if failures > 0 {
                r = r.with_witness(format!("failures={failures}"));
            }
            reports.push(r);
        }
        let bounds = a.bounds_report();
        reports.push(
            CheckReport::new("bounds.reiger", bounds.reiger_pass(), 1)
                .with_witness(format!("r={},floor={}", bounds.r, bounds.reiger_floor)),
        );
        return print_checks(&reports);
    }
    if let Some(dr) = &args.lee_transform {
        let (d, r) = (dr[0], dr[1]);
        if !(2..=4).contains(&d) {
            return Err(CliError::Usage("--lee-transform needs 2 <= D <= 4".into()));
        }
        return print_checks(&bounding_box_check(d, r, args.side).checks());
    }
    if let Some(path) = &args.colorings {
        let (set, window) =
            ColoringSet::from_text(&read(path)?).map_err(|e| CliError::Usage(e.to_string()))?;
        let window = window.unwrap_or_else(|| set.default_window());
        println!("family: {}", set.family.name());
        println!(
            "moduli: {}",
            join(
                &(0..set.dim).map(|s| set.modulus(s)).collect::<Vec<_>>(),
                " "
            )
        );
        let mut reports = check_p1(&set, &window).checks();
        reports.extend(check_p2(&set, &window).checks());
        let failed = reports.iter().any(|r| !r.pass);
        for r in &reports {
            println!("{r}");
        }
        // Failures of p3 are expected for colorings paired with a corrector.
        let p3 = check_p3(&set, &window);
        let mut p3_failed = false;
        for (r, e) in p3.checks().into_iter().zip(&p3.entries) {
            let tagged = !e.pass && set.needs_corrector[e.s - 1];
            p3_failed |= !e.pass && !tagged;
            println!("{r}{}", if tagged { " (needs corrector)" } else { "" });
        }
        if failed || p3_failed {
            return Err(CliError::CheckFailed);
        }
        return Ok(());
    }
    Err(CliError::Usage(
        "verify needs --assembly, --lee-transform or --colorings".into(),
    ))
}

fn bounds(args: Bounds) -> Result<(), CliError> {
    let a = load_assembly(&args.assembly)?;
    println!("shape: {}", a.shape());
    println!("route: {}", a.route());
    for line in a.bounds_report().lines() {
        println!("{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::SearchCode(a) => search_code(a),
        Command::Construct(a) => construct(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Inject(a) => inject(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
