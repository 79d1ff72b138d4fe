//! Command-line entry point. Exit codes separate mathematical verdicts from
//! plumbing: 0 for success/true verdicts, 1 for false verdicts (not weakly
//! distance-regular, not isomorphic, failed hypothesis, empty search, failing
//! suite, unclassified sweep survivors), 2 for usage and input errors.

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::classifier::{
    check_hypothesis, classify, run_paper_suite, sweep, GridSize, HypothesisReport, SweepOptions,
    SweepStatus,
};
use crate::constructions::{
    cayley_circulant, complete_digraph, empty_digraph, family1, family2, family3,
    generalized_lex_product, lexicographic_product, team_tournament, TeamTournament,
};
use crate::digraph::Digraph;
use crate::iso::are_isomorphic;
use crate::scheme::{
    intersection_numbers, relation_partition, verify_scheme_identities, IdentityReport,
};
use crate::structure::{arc_type_profile, ArcTypeProfile};
use crate::search::{search, SearchSpec, TargetParams};
use crate::{Error, Label};

const EXIT_OK: i32 = 0;
const EXIT_VERDICT: i32 = 1;
const EXIT_USAGE: i32 = 2;

struct Failure {
    code: i32,
    message: String,
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(message: impl Display) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

#[derive(Parser)]
#[command(
    name = "wdrlab",
    version,
    about = "Construct, analyze, search, and classify locally semicomplete \
             commutative weakly distance-regular digraphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a digraph or team tournament and emit it as JSON (or DOT)
    Construct(ConstructArgs),
    /// Compute distances, labels, intersection numbers, and identity checks
    Analyze {
        file: PathBuf,
        /// Write the JSON report here instead of standard output
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify a digraph against the three product families
    Classify {
        file: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide whether two digraphs are isomorphic
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Backtracking search for doubly regular team tournaments
    SearchTt(SearchArgs),
    /// Enumerate all small digraphs and classify every hypothesis survivor
    Sweep(SweepArgs),
    /// Run the bundled statement-verification suite on the construction grid
    VerifyPaper(VerifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    what: ConstructCmd,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit DOT instead of JSON
    #[arg(long, global = true)]
    dot: bool,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Circulant digraph on Z_n with the given connection set
    Circulant {
        #[arg(long)]
        n: usize,
        /// Comma-separated steps, e.g. --conn 1,2
        #[arg(long, value_delimiter = ',', required = true)]
        conn: Vec<usize>,
    },
    /// Complete digraph on m vertices
    Complete {
        #[arg(long)]
        m: usize,
    },
    /// Arcless digraph on m vertices
    Empty {
        #[arg(long)]
        m: usize,
    },
    /// Lexicographic product of two digraph files
    Lex {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        fiber: PathBuf,
    },
    /// Generalized lexicographic product with one fiber file per base vertex
    /// (a single file is reused for every vertex)
    Glex {
        #[arg(long)]
        base: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        fibers: Vec<PathBuf>,
    },
    /// Team-tournament product Λ ∘ K_m from a tournament file
    Family1 {
        /// Team tournament JSON file
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Circulant product on i·l vertices with steps {1, i}, complete fibers K_m
    Family2 {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
    },
    /// Circulant product on i·q vertices with steps {1, i} and the given
    /// fiber files (a single file is reused for every base vertex)
    Family3 {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, num_args = 1.., required = true)]
        fibers: Vec<PathBuf>,
    },
    /// Team tournament from explicit parameters
    Team {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        /// Orientation as a JSON pair list, e.g. '[[0,2],[0,3],[2,1],[3,1]]'
        #[arg(long)]
        orientation: String,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Number of parts
    #[arg(long)]
    r: usize,
    /// Part size
    #[arg(long)]
    m: usize,
    /// Require the balanced type; the only accepted value is "II"
    #[arg(long = "type", value_name = "TYPE")]
    type_: Option<String>,
    /// Target two-step path count onto out-neighbors (needs --beta)
    #[arg(long, requires = "beta")]
    alpha: Option<usize>,
    /// Target two-step path count onto in-neighbors (needs --alpha)
    #[arg(long, requires = "alpha")]
    beta: Option<usize>,
    /// Target two-step path count onto same-part vertices (wildcard if absent)
    #[arg(long, requires = "alpha")]
    gamma: Option<usize>,
    /// Stop after this many results
    #[arg(long, default_value_t = 1)]
    limit: usize,
    /// Node-expansion cap; default 100000000, or WDRLAB_BUDGET when set
    #[arg(long)]
    budget: Option<u64>,
    /// Accepted for interface symmetry; the search runs on one thread
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Largest vertex count to enumerate
    #[arg(long = "max-n")]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Checkpoint file: read on start, rewritten after each completed order
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Cap on enumerated labeled digraphs (default 2^31)
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Grid size: "small" or "default"
    #[arg(long, default_value = "default")]
    grid: String,
    /// Seed for the relabeling checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Parses the process arguments, runs one subcommand, and returns the exit
/// code for `std::process::exit`.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.cmd {
        Cmd::Construct(args) => construct(args),
        Cmd::Analyze { file, report } => analyze(&file, report.as_deref()),
        Cmd::Classify { file, report } => do_classify(&file, report.as_deref()),
        Cmd::Iso { a, b, report } => iso(&a, &b, report.as_deref()),
        Cmd::SearchTt(args) => search_tt(args),
        Cmd::Sweep(args) => do_sweep(args),
        Cmd::VerifyPaper(args) => verify_paper(args),
    }
}

fn load_json<T: DeserializeOwned>(path: &std::path::Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&std::path::Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure { code: EXIT_USAGE, message: e.to_string() })?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_digraph(g: &Digraph, args: &ConstructArgs) -> CliResult<i32> {
    if args.dot {
        let text = g.to_dot();
        match &args.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(EXIT_OK)
    } else {
        emit(g, args.out.as_deref())?;
        Ok(EXIT_OK)
    }
}

fn construct(args: ConstructArgs) -> CliResult<i32> {
    let build = |r: crate::Result<Digraph>| r.map_err(|e| usage(e));
    match &args.what {
        ConstructCmd::Circulant { n, conn } => {
            let g = build(cayley_circulant(*n, conn))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Complete { m } => {
            let g = build(complete_digraph(*m))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Empty { m } => {
            let g = build(empty_digraph(*m))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Lex { base, fiber } => {
            let b: Digraph = load_json(base)?;
            let f: Digraph = load_json(fiber)?;
            let g = build(lexicographic_product(&b, &f))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Glex { base, fibers } => {
            let b: Digraph = load_json(base)?;
            let fs = load_fibers(fibers, b.n())?;
            let g = build(generalized_lex_product(&b, &fs).map(|(g, _)| g))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Family1 { lambda, m } => {
            let tt: TeamTournament = load_json(lambda)?;
            let g = build(family1(&tt, *m))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Family2 { i, l, m } => {
            let g = build(family2(*i, *l, *m))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Family3 { i, q, fibers } => {
            let fs = load_fibers(fibers, i * q)?;
            let g = build(family3(*i, *q, &fs).map(|(g, _)| g))?;
            emit_digraph(&g, &args)
        }
        ConstructCmd::Team { r, m, orientation } => {
            let pairs: Vec<(usize, usize)> = serde_json::from_str(orientation)
                .map_err(|e| usage(format!("--orientation: {e}")))?;
            let tt = team_tournament(*r, *m, &pairs).map_err(usage)?;
            if args.dot {
                emit_digraph(tt.digraph(), &args)
            } else {
                emit(&tt, args.out.as_deref())?;
                Ok(EXIT_OK)
            }
        }
    }
}

fn load_fibers(paths: &[PathBuf], want: usize) -> CliResult<Vec<Digraph>> {
    let loaded: Vec<Digraph> =
        paths.iter().map(|p| load_json::<Digraph>(p)).collect::<CliResult<_>>()?;
    if loaded.len() == 1 && want > 1 {
        return Ok(vec![loaded[0].clone(); want]);
    }
    if loaded.len() != want {
        return Err(usage(format!("need {want} fiber files (or exactly one), got {}", loaded.len())));
    }
    Ok(loaded)
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    arc_count: usize,
    girth: Option<usize>,
    strongly_connected: bool,
    wdr: Option<bool>,
    commutative: Option<bool>,
    labels: Option<Vec<Label>>,
    valencies: Option<Vec<usize>>,
    arc_types: Option<ArcTypeProfile>,
    identities: Option<IdentityReport>,
    hypothesis: HypothesisReport,
}

fn analyze(file: &std::path::Path, report_path: Option<&std::path::Path>) -> CliResult<i32> {
    let g: Digraph = load_json(file)?;
    let hypothesis = check_hypothesis(&g);
    let mut report = AnalyzeReport {
        n: g.n(),
        arc_count: g.arc_count(),
        girth: g.girth().ok(),
        strongly_connected: hypothesis.strongly_connected,
        wdr: None,
        commutative: None,
        labels: None,
        valencies: None,
        arc_types: None,
        identities: None,
        hypothesis,
    };
    if let Ok(rp) = relation_partition(&g) {
        let t = intersection_numbers(&rp);
        report.labels = Some(rp.labels().to_vec());
        report.wdr = Some(t.wdr());
        if t.wdr() {
            report.commutative = Some(t.commutative());
            report.valencies = Some(t.valencies().to_vec());
            report.arc_types = Some(arc_type_profile(&g, &rp));
            report.identities = verify_scheme_identities(&t).ok();
        }
    }
    let code = if report.wdr == Some(true) { EXIT_OK } else { EXIT_VERDICT };
    emit(&report, report_path)?;
    Ok(code)
}

fn do_classify(file: &std::path::Path, report_path: Option<&std::path::Path>) -> CliResult<i32> {
    let g: Digraph = load_json(file)?;
    match classify(&g) {
        Ok(res) => {
            let code = if res.family.is_some() {
                EXIT_OK
            } else {
                eprintln!("no family matched; the instance is a counterexample candidate");
                EXIT_VERDICT
            };
            emit(&res, report_path)?;
            Ok(code)
        }
        Err(Error::Hypothesis(rep)) => {
            #[derive(Serialize)]
            struct HypothesisFailure<'a> {
                hypothesis: &'a HypothesisReport,
                family: Option<u8>,
            }
            eprintln!("hypothesis failed: {rep}");
            emit(&HypothesisFailure { hypothesis: &rep, family: None }, report_path)?;
            Ok(EXIT_VERDICT)
        }
        Err(e) => Err(Failure { code: EXIT_VERDICT, message: e.to_string() }),
    }
}

fn iso(
    a: &std::path::Path,
    b: &std::path::Path,
    report_path: Option<&std::path::Path>,
) -> CliResult<i32> {
    let ga: Digraph = load_json(a)?;
    let gb: Digraph = load_json(b)?;
    #[derive(Serialize)]
    struct IsoReport {
        isomorphic: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        map: Option<Vec<usize>>,
    }
    match are_isomorphic(&ga, &gb) {
        Some(map) => {
            emit(&IsoReport { isomorphic: true, map: Some(map) }, report_path)?;
            Ok(EXIT_OK)
        }
        None => {
            emit(&IsoReport { isomorphic: false, map: None }, report_path)?;
            Ok(EXIT_VERDICT)
        }
    }
}

fn budget_or_env(flag: Option<u64>, fallback: u64) -> CliResult<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("WDRLAB_BUDGET") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| usage(format!("WDRLAB_BUDGET must be an integer: {e}"))),
        Err(_) => Ok(fallback),
    }
}

fn search_tt(args: SearchArgs) -> CliResult<i32> {
    if let Some(t) = &args.type_ {
        if t != "II" {
            return Err(usage(format!("--type accepts only \"II\", got \"{t}\"")));
        }
    }
    if args.jobs < 1 {
        return Err(usage("--jobs must be at least 1"));
    }
    let mut spec = SearchSpec::new(args.r, args.m);
    spec.require_type_ii = args.type_.is_some();
    spec.limit = args.limit;
    spec.budget = budget_or_env(args.budget, spec.budget)?;
    if let (Some(alpha), Some(beta)) = (args.alpha, args.beta) {
        spec.target = Some(TargetParams { alpha, beta, gamma: args.gamma });
    }
    let outcome = search(&spec).map_err(usage)?;
    let code = if outcome.tournaments.is_empty() { EXIT_VERDICT } else { EXIT_OK };
    emit(&outcome, args.report.as_deref())?;
    Ok(code)
}

fn do_sweep(args: SweepArgs) -> CliResult<i32> {
    if args.jobs < 1 {
        return Err(usage("--jobs must be at least 1"));
    }
    let opts = SweepOptions {
        n_max: args.max_n,
        jobs: args.jobs,
        budget: args.budget.unwrap_or(1 << 31),
        checkpoint: args.resume,
    };
    let report = sweep(&opts).map_err(|e| match e {
        Error::Invalid(_) => usage(e),
        other => Failure { code: EXIT_VERDICT, message: other.to_string() },
    })?;
    let code = if report.status == SweepStatus::Complete && report.unclassified == 0 {
        EXIT_OK
    } else {
        EXIT_VERDICT
    };
    emit(&report, args.report.as_deref())?;
    Ok(code)
}

fn verify_paper(args: VerifyArgs) -> CliResult<i32> {
    let size = match args.grid.as_str() {
        "small" => GridSize::Small,
        "default" => GridSize::Default,
        other => return Err(usage(format!("--grid must be \"small\" or \"default\", got \"{other}\""))),
    };
    let report = run_paper_suite(size, args.seed)
        .map_err(|e| Failure { code: EXIT_VERDICT, message: e.to_string() })?;
    let code = if report.all_pass() {
        EXIT_OK
    } else {
        for f in report.failures() {
            eprintln!("FAIL {} / {}: {}", f.statement, f.instance, f.detail);
        }
        EXIT_VERDICT
    };
    emit(&report, args.report.as_deref())?;
    Ok(code)
}
