use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use coverlab::analysis::{
    arc_orbit_count, audit_passed, covering_group, fibre_action, involution_audit, lemma3_audit, quotient_cover,
    subdegree_identity_check,
};
use coverlab::autom::{automorphism_group_bounded, DEFAULT_VERTEX_BOUND};
use coverlab::canonical::{to_canonical_pretty, to_canonical_string};
use coverlab::casecheck::run_case;
use coverlab::constructions::{ConstructionSpec, SeidelSign, DEFAULT_CONSTRUCTION_BOUND};
use coverlab::frames::{character_matrix, cover_characters, extract_lines, Side, DEFAULT_TOLERANCE};
use coverlab::graph::{spectrum_check, verify_cover, CoverGraph};
use coverlab::numtheory::{gcd_qpow_sweep, lifting_identity_sweep};
use coverlab::perm::{enumerate_subgroups, PermGroup, Permutation};
use coverlab::{derive_params, feasible_a, feasible_b, CharacterMatrix64};

/// Largest group whose elements `analyze` enumerates for the involution audit.
const ELEMENT_LIMIT: u64 = 200_000;

#[derive(Parser, Debug)]
#[command(name = "coverlab", version, about = "Antipodal distance-regular covers of complete graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Recorded for reproducibility; every algorithm here is deterministic.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parameter derivation and feasibility tables.
    Params {
        #[command(subcommand)]
        which: ParamsCommand,
    },
    /// Build a named cover and print it as cover JSON.
    Build(BuildArgs),
    /// Check the cover axioms and derive parameters.
    Verify(InputArgs),
    /// Automorphisms, covering group, rank, arc orbits and structural audits.
    Analyze(AnalyzeArgs),
    /// Quotient by a subgroup of the covering group.
    Quotient(QuotientArgs),
    /// Equiangular lines from a character of an abelian cover.
    Etf(EtfArgs),
    /// Number-theoretic identity checks.
    LemmaCheck {
        #[command(subcommand)]
        which: LemmaCommand,
    },
    /// Run a finite case enumeration; `all` runs every case.
    Cases { id: String },
}

#[derive(Subcommand, Debug)]
enum ParamsCommand {
    /// Derive (λ, θ, τ, multiplicities) from (n, r, μ).
    Derive {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        mu: u64,
    },
    /// Even-r table up to t_max.
    FeasibleA {
        #[arg(long, default_value_t = 100)]
        t_max: u64,
    },
    /// Odd-r table up to t_max.
    FeasibleB {
        #[arg(long, default_value_t = 100)]
        t_max: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LemmaCommand {
    /// Lifting and gcd identities; small bounds unless --sweep.
    Nt {
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// hexagon, cube, icosahedron, thas-somma or taylor.
    name: String,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    /// Seidel matrix file (JSON array of ±1/0 rows) for `taylor`.
    #[arg(long)]
    seidel: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SignArg::Direct)]
    sign: SignArg,
    #[arg(long, default_value_t = DEFAULT_CONSTRUCTION_BOUND)]
    bound: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Direct,
    Negated,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Cover JSON file, or `-` for stdin.
    input: String,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    input: String,
    /// Vertex bound for the automorphism search.
    #[arg(long, default_value_t = DEFAULT_VERTEX_BOUND)]
    bound: usize,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    input: String,
    /// `k` (whole covering group), `k:<i>` (i-th subgroup of K by order) or
    /// generator image lists `0,1,2;3,4,5`.
    #[arg(long)]
    subgroup: String,
    /// Print the quotient as bare cover JSON.
    #[arg(long)]
    emit_cover: bool,
}

#[derive(Args, Debug)]
struct EtfArgs {
    input: String,
    /// Character index; 0 is the trivial character.
    #[arg(long = "char", default_value_t = 1)]
    character: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Tau)]
    side: SideArg,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Include the Gram matrix in the output.
    #[arg(long)]
    gram: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Theta,
    Tau,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

fn bad(e: impl std::fmt::Display) -> CliError {
    CliError::BadInput(e.to_string())
}

/// Full record of a run, echoed in every JSON result.
#[derive(Debug, Serialize)]
struct RunConfig {
    subcommand: String,
    input: Option<String>,
    output: Option<String>,
    format: Format,
    tolerance: Option<f64>,
    bounds: BTreeMap<String, u64>,
    arguments: BTreeMap<String, Value>,
    seed: u64,
    threads: Option<usize>,
}

struct Outcome {
    result: Value,
    ok: bool,
    /// Printed as-is instead of the `{config, result}` envelope.
    raw: Option<String>,
}

impl Outcome {
    fn value<T: Serialize>(v: &T, ok: bool) -> Result<Self, CliError> {
        Ok(Outcome {
            result: serde_json::to_value(v).map_err(bad)?,
            ok,
            raw: None,
        })
    }
}

fn read_cover(path: &str) -> Result<CoverGraph, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)?
    };
    CoverGraph::from_json(&text).map_err(bad)
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("COVERLAB_THREADS") {
        Ok(s) => {
            let n: usize = s.trim().parse().map_err(|_| bad(format!("COVERLAB_THREADS must be a positive integer, got {s:?}")))?;
            if n == 0 {
                return Err(bad("COVERLAB_THREADS must be positive"));
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(bad)?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn config_for(cli: &Cli, threads: Option<usize>) -> RunConfig {
    let mut cfg = RunConfig {
        subcommand: String::new(),
        input: None,
        output: cli.out.as_ref().map(|p| p.display().to_string()),
        format: cli.output,
        tolerance: None,
        bounds: BTreeMap::new(),
        arguments: BTreeMap::new(),
        seed: cli.seed,
        threads,
    };
    let args = &mut cfg.arguments;
    match &cli.command {
        Command::Params { which } => match which {
            ParamsCommand::Derive { n, r, mu } => {
                cfg.subcommand = "params derive".into();
                args.extend([("n".into(), json!(n)), ("r".into(), json!(r)), ("mu".into(), json!(mu))]);
            }
            ParamsCommand::FeasibleA { t_max } => {
                cfg.subcommand = "params feasible-a".into();
                args.insert("t_max".into(), json!(t_max));
            }
            ParamsCommand::FeasibleB { t_max } => {
                cfg.subcommand = "params feasible-b".into();
                args.insert("t_max".into(), json!(t_max));
            }
        },
        Command::Build(b) => {
            cfg.subcommand = "build".into();
            cfg.input = b.seidel.as_ref().map(|p| p.display().to_string());
            cfg.bounds.insert("construction".into(), b.bound as u64);
            args.insert("name".into(), json!(b.name));
            args.insert("q".into(), json!(b.q));
            args.insert("m".into(), json!(b.m));
            args.insert("sign".into(), json!(format!("{:?}", b.sign).to_lowercase()));
        }
        Command::Verify(i) => {
            cfg.subcommand = "verify".into();
            cfg.input = Some(i.input.clone());
        }
        Command::Analyze(a) => {
            cfg.subcommand = "analyze".into();
            cfg.input = Some(a.input.clone());
            cfg.bounds.insert("automorphism_vertices".into(), a.bound as u64);
            cfg.bounds.insert("elements".into(), ELEMENT_LIMIT);
        }
        Command::Quotient(q) => {
            cfg.subcommand = "quotient".into();
            cfg.input = Some(q.input.clone());
            args.insert("subgroup".into(), json!(q.subgroup));
            args.insert("emit_cover".into(), json!(q.emit_cover));
        }
        Command::Etf(e) => {
            cfg.subcommand = "etf".into();
            cfg.input = Some(e.input.clone());
            cfg.tolerance = Some(e.tol);
            args.insert("char".into(), json!(e.character));
            args.insert("side".into(), json!(format!("{:?}", e.side).to_lowercase()));
        }
        Command::LemmaCheck { which: LemmaCommand::Nt { sweep } } => {
            cfg.subcommand = "lemma-check nt".into();
            args.insert("sweep".into(), json!(sweep));
        }
        Command::Cases { id } => {
            cfg.subcommand = "cases".into();
            args.insert("id".into(), json!(id));
        }
    }
    cfg
}

fn run_params(which: &ParamsCommand) -> Result<Outcome, CliError> {
    match which {
        ParamsCommand::Derive { n, r, mu } => {
            let p = derive_params(*n, *r, *mu).map_err(bad)?;
            let ok = p.multiplicities_integral();
            Outcome::value(&json!({"params": p, "multiplicities_integral": ok}), ok)
        }
        ParamsCommand::FeasibleA { t_max } => Outcome::value(&feasible_a(*t_max).map_err(bad)?, true),
        ParamsCommand::FeasibleB { t_max } => Outcome::value(&feasible_b(*t_max).map_err(bad)?, true),
    }
}

fn run_build(b: &BuildArgs) -> Result<Outcome, CliError> {
    let spec = match b.name.as_str() {
        "hexagon" => ConstructionSpec::Hexagon,
        "cube" => ConstructionSpec::Cube,
        "icosahedron" => ConstructionSpec::Icosahedron,
        "thas-somma" => {
            let q = b.q.ok_or_else(|| bad("thas-somma needs --q"))?;
            ConstructionSpec::ThasSomma { q, m: b.m.unwrap_or(1) }
        }
        "taylor" => {
            let path = b.seidel.as_ref().ok_or_else(|| bad("taylor needs --seidel <file>"))?;
            let seidel: Vec<Vec<i8>> = serde_json::from_str(&fs::read_to_string(path)?).map_err(bad)?;
            let sign = match b.sign {
                SignArg::Direct => SeidelSign::Direct,
                SignArg::Negated => SeidelSign::Negated,
            };
            ConstructionSpec::Taylor { seidel, sign }
        }
        other => return Err(bad(format!("unknown construction {other:?}"))),
    };
    let cover = match &spec {
        ConstructionSpec::ThasSomma { q, m } => coverlab::constructions::thas_somma_bounded(*q, *m, b.bound),
        _ => spec.build(),
    }
    .map_err(bad)?;
    Ok(Outcome {
        result: Value::Null,
        ok: true,
        raw: Some(cover.to_json()),
    })
}

fn run_verify(input: &str) -> Result<Outcome, CliError> {
    let g = read_cover(input)?;
    let report = verify_cover(&g);
    let params = match (report.is_cover, report.mu) {
        (true, Some(mu)) => derive_params(g.n() as u64, g.r() as u64, mu as u64).ok(),
        _ => None,
    };
    let spectrum = params.as_ref().map(|p| spectrum_check(&g, p));
    let ok = report.is_cover;
    Outcome::value(&json!({"report": report, "params": params, "spectrum": spectrum}), ok)
}

fn run_analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let g = read_cover(&a.input)?;
    let report = verify_cover(&g);
    if !report.is_cover {
        return Outcome::value(&json!({"report": report}), false);
    }
    let aut = automorphism_group_bounded(&g, a.bound).map_err(bad)?;
    let k = covering_group(&g, Some(&aut)).map_err(bad)?;
    let fibres = fibre_action(&g, &aut).map_err(bad)?;
    let arcs = arc_orbit_count(&g, &aut).map_err(bad)?;
    let lemma3 = lemma3_audit(&g, &aut).map_err(bad)?;
    let subdegrees = if fibres.rank == Some(3) {
        Some(subdegree_identity_check(&g, &aut).map_err(bad)?)
    } else {
        None
    };

    let involutions = match aut.elements(ELEMENT_LIMIT) {
        Ok(elements) => {
            let mut checked = 0usize;
            let mut failed: Vec<Value> = Vec::new();
            for x in elements.iter().filter(|x| x.order() == 2) {
                let audit = involution_audit(&g, x).map_err(bad)?;
                checked += 1;
                if !audit_passed(&audit.items) {
                    failed.push(json!({"involution": x.cycles(), "audit": audit}));
                }
            }
            json!({"checked": checked, "failed": failed})
        }
        Err(e) => json!({"skipped": e.to_string()}),
    };

    let mut ok = audit_passed(&lemma3) && arcs.identity_holds != Some(false);
    if let Some(s) = &subdegrees {
        ok &= audit_passed(&s.items);
    }
    ok &= involutions.get("failed").and_then(Value::as_array).is_none_or(|f| f.is_empty());

    let result = json!({
        "report": report,
        "automorphism_group": {
            "order": aut.order().to_string(),
            "generators": aut.generators().len(),
            "rank": aut.is_transitive().then(|| aut.rank()),
            "vertex_transitive": aut.is_transitive(),
        },
        "covering_group": k,
        "fibre_action": fibres,
        "arc_orbits": arcs,
        "stabilizer_structure": lemma3,
        "subdegrees": subdegrees,
        "involutions": involutions,
        "audits_passed": ok,
    });
    Ok(Outcome { result, ok, raw: None })
}

fn parse_subgroup(g: &CoverGraph, spec: &str) -> Result<PermGroup, CliError> {
    let v = g.vertex_count();
    let k = covering_group(g, None).map_err(bad)?;
    if spec == "k" {
        return Ok(k.group);
    }
    if let Some(i) = spec.strip_prefix("k:") {
        let i: usize = i.parse().map_err(|_| bad(format!("bad subgroup index {i:?}")))?;
        let subs = enumerate_subgroups(&k.group, ELEMENT_LIMIT).map_err(bad)?;
        let count = subs.len();
        return subs.into_iter().nth(i).ok_or_else(|| bad(format!("K has {count} subgroups, index {i} out of range")));
    }
    let mut gens = Vec::new();
    for part in spec.split(';').filter(|s| !s.trim().is_empty()) {
        let images: Vec<usize> = part
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad(format!("bad image {s:?} in subgroup spec"))))
            .collect::<Result<_, _>>()?;
        if images.len() != v {
            return Err(bad(format!("generator has {} images, cover has {v} vertices", images.len())));
        }
        gens.push(Permutation::from_usize(&images).map_err(bad)?);
    }
    PermGroup::new(v, gens).map_err(bad)
}

fn run_quotient(q: &QuotientArgs) -> Result<Outcome, CliError> {
    let g = read_cover(&q.input)?;
    let sub = parse_subgroup(&g, &q.subgroup)?;
    let quotient = quotient_cover(&g, &sub).map_err(bad)?;
    let report = verify_cover(&quotient);
    if q.emit_cover {
        return Ok(Outcome {
            result: Value::Null,
            ok: report.is_cover,
            raw: Some(quotient.to_json()),
        });
    }
    let order = sub.order_u64().unwrap_or(0);
    let original = verify_cover(&g);
    let expected = original.mu.map(|mu| json!([g.n(), g.r() as u64 / order.max(1), mu as u64 * order]));
    let observed = json!([report.n, report.r, report.mu]);
    let matches = report.is_cover && expected.as_ref() == Some(&observed);
    let result = json!({
        "subgroup_order": order,
        "subgroup_generators": sub.generators().iter().map(Permutation::cycles).collect::<Vec<_>>(),
        "expected_parameters": expected,
        "report": report,
        "parameters_match": matches,
        "cover": quotient.to_file(),
    });
    Ok(Outcome { result, ok: matches, raw: None })
}

fn run_etf(e: &EtfArgs) -> Result<Outcome, CliError> {
    let g = read_cover(&e.input)?;
    let (_, chars) = cover_characters(&g).map_err(bad)?;
    let s: CharacterMatrix64 = character_matrix(&g, e.character).map_err(bad)?;
    let side = match e.side {
        SideArg::Theta => Side::Theta,
        SideArg::Tau => Side::Tau,
    };
    let lines = extract_lines(&s, side, e.tol).map_err(bad)?;
    let ok = lines.certificates.passed;
    let mut result = json!({
        "character": chars[e.character],
        "character_count": chars.len(),
        "spectrum": s.certificate,
        "d": lines.d,
        "n": lines.n,
        "alpha": lines.alpha,
        "side": lines.side,
        "certificates": lines.certificates,
    });
    if e.gram {
        result["gram"] = serde_json::to_value(&lines.gram).map_err(bad)?;
    }
    Ok(Outcome { result, ok, raw: None })
}

fn run_lemma_nt(sweep: bool) -> Result<Outcome, CliError> {
    let (lift_bounds, gcd_bounds) = if sweep { ((50, 30, 50), (20, 40)) } else { ((12, 8, 13), (8, 12)) };
    let (lift_n, lift_fail) = lifting_identity_sweep(lift_bounds.0, lift_bounds.1, lift_bounds.2);
    let (gcd_n, gcd_fail) = gcd_qpow_sweep(gcd_bounds.0, gcd_bounds.1);
    let ok = lift_fail.is_empty() && gcd_fail.is_empty();
    let result = json!({
        "lifting": {
            "bounds": {"q_max": lift_bounds.0, "m_max": lift_bounds.1, "p_max": lift_bounds.2},
            "instances": lift_n,
            "counterexamples": lift_fail,
        },
        "gcd": {
            "bounds": {"q_max": gcd_bounds.0, "e_max": gcd_bounds.1},
            "instances": gcd_n,
            "counterexamples": gcd_fail,
        },
        "passed": ok,
    });
    Ok(Outcome { result, ok, raw: None })
}

fn run_cases(id: &str) -> Result<Outcome, CliError> {
    let reports = run_case(id).map_err(bad)?;
    let ok = reports.iter().all(|r| r.matches);
    if reports.len() == 1 {
        Outcome::value(&reports[0], ok)
    } else {
        Outcome::value(&reports, ok)
    }
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Params { which } => run_params(which),
        Command::Build(b) => run_build(b),
        Command::Verify(i) => run_verify(&i.input),
        Command::Analyze(a) => run_analyze(a),
        Command::Quotient(q) => run_quotient(q),
        Command::Etf(e) => run_etf(e),
        Command::LemmaCheck { which: LemmaCommand::Nt { sweep } } => run_lemma_nt(*sweep),
        Command::Cases { id } => run_cases(id),
    }
}

/// Flattens a JSON value into `path: value` lines.
fn render_text(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(&p, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                render_text(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push_str(": ");
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let threads = threads_from_env()?;
    let config = config_for(cli, threads);
    let outcome = dispatch(&cli.command)?;
    let text = match (&outcome.raw, cli.output) {
        (Some(raw), _) => raw.clone(),
        (None, Format::Json) => to_canonical_pretty(&json!({"config": config, "result": outcome.result})).map_err(bad)?,
        (None, Format::Text) => {
            let mut s = format!("subcommand: {}\n", config.subcommand);
            let canonical = serde_json::from_str(&to_canonical_string(&outcome.result).map_err(bad)?).map_err(bad)?;
            render_text("", &canonical, &mut s);
            s.push_str(if outcome.ok { "status: ok\n" } else { "status: failed\n" });
            s
        }
    };
    emit(cli, &text)?;
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coverlab::analysis::AuditStatus;

    #[test]
    fn text_rendering_flattens_paths() {
        let mut s = String::new();
        render_text("", &json!({"a": {"b": 1}, "c": [1, 2], "d": [{"e": true}]}), &mut s);
        assert_eq!(s, "a.b: 1\nc: [1,2]\nd[0].e: true\n");
    }

    #[test]
    fn statuses_serialise_kebab_case() {
        assert_eq!(serde_json::to_string(&AuditStatus::NotChecked).unwrap(), "\"not-checked\"");
    }
}
