//! The `cantor` command line.

use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{approx_algebra_iso, caratheodory_tower, evaluate_matched_tower, interval_realize, IntervalSet};
use crate::cert::{certify_homeo, certify_measure_homeo, verify, HomeoCertificate};
use crate::clopen::{BoolOp, ClopenSet};
use crate::error::Error;
use crate::good::{
    clopen_values, default_budget, find_clopen_subset, goodness_scan, group_like_check, half_fold, measure_clopen_iso,
    GoodnessScan, GroupLike, MeasureIso, SubsetSearch,
};
use crate::maps::{
    injectivity_certificate, sup_distance, surjectivity_decide, Distance, Injectivity, Surjectivity, TransducerMap,
    DEFAULT_BUFFER_BOUND,
};
use crate::measure::{check_preserves, delta_for_epsilon, CylinderMeasure, Preservation};
use crate::rational::{self, dyadic, Rational};
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cantor", version, about = "Exact clopen algebra, transducer maps and measures on the Cantor space")]
struct Cli {
    /// Recorded in the output; no command draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Topological,
    Measure,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical antichain of a list of words.
    Canon {
        #[arg(long)]
        words: String,
    },
    /// Boolean operation on clopen sets.
    Boolop {
        #[arg(long, value_parser = parse_op)]
        op: BoolOp,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
    },
    /// Preimage of a clopen set.
    Preimage {
        #[arg(long)]
        map: String,
        #[arg(long)]
        set: String,
    },
    /// Uniform distance between two maps.
    Distance {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Decides whether the map is onto.
    Surjective {
        #[arg(long)]
        map: String,
    },
    /// Injectivity certificate, collision witness, or unknown within the buffer bound.
    Injective {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = DEFAULT_BUFFER_BOUND)]
        buffer_bound: usize,
    },
    /// Homeomorphism within 2^-depth of a surjection.
    ApproxHomeo {
        #[arg(long)]
        map: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        certificate: Option<String>,
    },
    /// Measure of a clopen set, and optionally delta for an epsilon.
    Measure {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Checks mu(f^-1[w]) = nu([w]) for all words up to a depth.
    Preserve {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        depth: usize,
    },
    /// Interval realization tower of a normalized measure.
    Caratheodory {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Matched tower of a measure algebra isomorphism agreeing with f^-1.
    AlgebraIso {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        agree: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        evaluate: Option<String>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Clopen values of unions of depth-d cylinders.
    Values {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        depth: usize,
    },
    /// Closure of a value set under differences.
    GroupLike {
        #[arg(long, conflicts_with = "measure")]
        values: Option<String>,
        #[arg(long)]
        total: Option<String>,
        #[arg(long, requires = "depth")]
        measure: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Clopen subset of B with a prescribed measure.
    Subset {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Runs the subset condition on every value against every cylinder up to a depth.
    GoodScan {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: usize,
    },
    /// Measure-preserving prefix exchange between two clopen sets.
    MeasureIso {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Measure-preserving homeomorphism within 2^-depth of f.
    MeasureHomeo {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        certificate: Option<String>,
    },
    /// 2-to-1 measure-preserving surjection.
    HalfFold {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 16)]
        budget: usize,
    },
    /// Homeomorphic approximants g_1..g_nmax with certificates.
    DemoGeneric {
        #[arg(long)]
        map: String,
        #[arg(long, value_enum, default_value_t = Mode::Topological)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Re-checks a certificate or a demo report.
    Verify {
        #[arg(long)]
        certificate: String,
    },
}

fn parse_op(s: &str) -> Result<BoolOp, String> {
    serde_json::from_value(Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown operation {s:?}; use union, intersection, complement, boolean_sum or difference"))
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) | Error::ResourceLimit(_) => EXIT_BUDGET,
            Error::NotSurjective { .. } | Error::PreservationViolated { .. } => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: EXIT_USAGE, message }
}

type Step = Result<(i32, Value), Failure>;

fn builtin(name: &str) -> Option<TransducerMap> {
    Some(match name {
        "fold" => TransducerMap::fold(),
        "identity" => TransducerMap::identity(),
        "flip-first" => TransducerMap::flip_first(),
        "shift" => TransducerMap::shift(),
        "constant-0" => TransducerMap::constant(false),
        "constant-1" => TransducerMap::constant(true),
        _ => return None,
    })
}

/// Inline JSON when the argument starts with `{` or `[`, a file otherwise.
fn load<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| usage(format!("cannot read {what} from {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("malformed {what}: {e}")))
}

fn load_map(arg: &str) -> Result<TransducerMap, Failure> {
    if !Path::new(arg).exists() {
        if let Some(f) = builtin(arg) {
            return Ok(f);
        }
    }
    load(arg, "map")
}

fn load_rational(arg: &str) -> Result<Rational, Failure> {
    rational::parse(arg).ok_or_else(|| usage(format!("not a rational: {arg:?}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn write_json<T: Serialize>(path: &str, v: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {path}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoRow {
    pub n: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub bound: Rational,
    pub distance: Distance,
    pub certificate: HomeoCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub mode: Mode,
    pub n_max: usize,
    pub rows: Vec<DemoRow>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Checkable {
    Report(DemoReport),
    Single(Box<HomeoCertificate>),
}

fn demo(
    f: &TransducerMap,
    mode: Mode,
    n_max: usize,
    measures: Option<(CylinderMeasure, CylinderMeasure)>,
    budget: Option<usize>,
) -> Result<DemoReport, Failure> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let certificate = match &measures {
            Some((mu, nu)) => certify_measure_homeo(f, mu, nu, n, budget)?,
            None => certify_homeo(f, n)?,
        };
        rows.push(DemoRow { n, bound: dyadic(n), distance: certificate.distance.clone(), certificate });
    }
    Ok(DemoReport { mode, n_max, rows })
}

fn demo_table(r: &DemoReport) -> String {
    let mut out =
        format!("{:>3}  {:>10}  {:>10}  {:>5}  {:>9}  {}\n", "n", "distance", "bound", "rules", "bijective", "measure");
    for row in &r.rows {
        let c = &row.certificate;
        let exact = if row.distance.is_exact() { "=" } else { "<=" };
        let bijective = matches!(c.bijectivity.injective, Injectivity::Injective { .. })
            && c.bijectivity.surjective == Surjectivity::Surjective;
        let measure = match &c.measure {
            Some(m) if matches!(m.exchange_preservation, Preservation::Preserved { .. }) => "preserved",
            Some(_) => "violated",
            None => "-",
        };
        out += &format!(
            "{:>3}  {:>10}  {:>10}  {:>5}  {:>9}  {}\n",
            row.n,
            format!("{exact}{}", row.distance.value()),
            row.bound.to_string(),
            c.exchange.len(),
            bijective,
            measure
        );
    }
    out
}

fn dispatch(command: Command) -> Step {
    match command {
        Command::Canon { words } => {
            let words: Vec<Word> = load(&words, "word list")?;
            Ok((EXIT_OK, to_value(&ClopenSet::canonicalize(words))))
        }
        Command::Boolop { op, a, b } => {
            let a: ClopenSet = load(&a, "set")?;
            let b: Option<ClopenSet> = b.as_deref().map(|b| load(b, "set")).transpose()?;
            match (op, &b) {
                (BoolOp::Complement, Some(_)) => return Err(usage("complement takes one set".into())),
                (BoolOp::Complement, None) | (_, Some(_)) => {}
                (_, None) => return Err(usage("this operation needs --b".into())),
            }
            Ok((EXIT_OK, to_value(&a.boolean_op(op, b.as_ref()))))
        }
        Command::Preimage { map, set } => {
            let f = load_map(&map)?;
            let a: ClopenSet = load(&set, "set")?;
            Ok((EXIT_OK, to_value(&f.preimage(&a))))
        }
        Command::Distance { f, g, depth } => {
            if depth == 0 {
                return Err(usage("--depth must be at least 1".into()));
            }
            let (f, g) = (load_map(&f)?, load_map(&g)?);
            Ok((EXIT_OK, to_value(&sup_distance(&f, &g, depth))))
        }
        Command::Surjective { map } => {
            let r = surjectivity_decide(&load_map(&map)?);
            let code = if r == Surjectivity::Surjective { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, to_value(&r)))
        }
        Command::Injective { map, buffer_bound } => {
            let r = injectivity_certificate(&load_map(&map)?, buffer_bound);
            let code = match r {
                Injectivity::Injective { .. } => EXIT_OK,
                Injectivity::NotInjective { .. } => EXIT_NEGATIVE,
                Injectivity::Unknown { .. } => EXIT_BUDGET,
            };
            Ok((code, to_value(&r)))
        }
        Command::ApproxHomeo { map, depth, out, certificate } => {
            let f = load_map(&map)?;
            let c = certify_homeo(&f, depth)?;
            if let Some(p) = out {
                write_json(&p, &c.exchange)?;
            }
            if let Some(p) = certificate {
                write_json(&p, &c)?;
            }
            Ok((EXIT_OK, json!({ "exchange": c.exchange, "distance": c.distance })))
        }
        Command::Measure { measure, set, epsilon } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            let mut out = serde_json::Map::new();
            out.insert("total".into(), json!(rational::to_string(m.total())));
            if let Some(s) = set {
                let a: ClopenSet = load(&s, "set")?;
                out.insert("measure".into(), json!(rational::to_string(&m.clopen_measure(&a))));
            }
            if let Some(e) = epsilon {
                out.insert("delta".into(), to_value(&delta_for_epsilon(&m, &load_rational(&e)?)?));
            }
            Ok((EXIT_OK, Value::Object(out)))
        }
        Command::Preserve { map, mu, nu, depth } => {
            if depth == 0 {
                return Err(usage("--depth must be at least 1".into()));
            }
            let f = load_map(&map)?;
            let (mu, nu): (CylinderMeasure, CylinderMeasure) = (load(&mu, "measure")?, load(&nu, "measure")?);
            let r = check_preserves(&f, &mu, &nu, depth);
            let code = if matches!(r, Preservation::Preserved { .. }) { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, to_value(&r)))
        }
        Command::Caratheodory { measure, depth, generators, set, out } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            let gens: Vec<ClopenSet> =
                generators.as_deref().map(|g| load(g, "generators")).transpose()?.unwrap_or_default();
            let tower = caratheodory_tower(&m, &gens, depth)?;
            if let Some(p) = out {
                write_json(&p, &tower)?;
            }
            match set {
                Some(s) => {
                    let a: ClopenSet = load(&s, "set")?;
                    let image: IntervalSet = interval_realize(&tower, &a)?;
                    Ok((EXIT_OK, to_value(&image)))
                }
                None => Ok((EXIT_OK, to_value(&tower))),
            }
        }
        Command::AlgebraIso { map, mu, nu, agree, depth, generators, budget, evaluate, level, out } => {
            let f = load_map(&map)?;
            let (mu, nu): (CylinderMeasure, CylinderMeasure) = (load(&mu, "measure")?, load(&nu, "measure")?);
            let gens: Vec<ClopenSet> =
                generators.as_deref().map(|g| load(g, "generators")).transpose()?.unwrap_or_default();
            let tower = approx_algebra_iso(&f, &mu, &nu, &gens, agree, depth, budget)?;
            if let Some(p) = out {
                write_json(&p, &tower)?;
            }
            match evaluate {
                Some(b) => {
                    let b: ClopenSet = load(&b, "set")?;
                    Ok((EXIT_OK, to_value(&evaluate_matched_tower(&tower, &b, level.unwrap_or(depth))?)))
                }
                None => Ok((EXIT_OK, to_value(&tower))),
            }
        }
        Command::Values { measure, depth } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            Ok((EXIT_OK, to_value(&clopen_values(&m, depth)?)))
        }
        Command::GroupLike { values, total, measure, depth } => {
            let (vals, tot) = match (values, measure, depth) {
                (Some(v), None, _) => {
                    let strings: Vec<String> = load(&v, "value list")?;
                    let vals = strings.iter().map(|s| load_rational(s)).collect::<Result<Vec<_>, _>>()?;
                    let tot = match total {
                        Some(t) => load_rational(&t)?,
                        None => vals.iter().max().cloned().ok_or_else(|| usage("empty value list".into()))?,
                    };
                    (vals, tot)
                }
                (None, Some(m), Some(d)) => {
                    let s = clopen_values(&load::<CylinderMeasure>(&m, "measure")?, d)?;
                    (s.values, s.total)
                }
                _ => return Err(usage("give --values, or --measure with --depth".into())),
            };
            let r = group_like_check(&vals, &tot)?;
            let code = if r == GroupLike::GroupLike { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, to_value(&r)))
        }
        Command::Subset { measure, set, target, budget } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            let b: ClopenSet = load(&set, "set")?;
            let budget = budget.unwrap_or_else(|| default_budget(b.max_depth()));
            let r = find_clopen_subset(&m, &b, &load_rational(&target)?, budget)?;
            let code = if matches!(r, SubsetSearch::Found { .. }) { EXIT_OK } else { EXIT_BUDGET };
            Ok((code, to_value(&r)))
        }
        Command::GoodScan { measure, depth, budget } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            let r = goodness_scan(&m, depth, budget)?;
            let code = if matches!(r, GoodnessScan::ConsistentUpTo { .. }) { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, to_value(&r)))
        }
        Command::MeasureIso { mu, nu, a, b, budget } => {
            let (mu, nu): (CylinderMeasure, CylinderMeasure) = (load(&mu, "measure")?, load(&nu, "measure")?);
            let (a, b): (ClopenSet, ClopenSet) = (load(&a, "set")?, load(&b, "set")?);
            let budget = budget.unwrap_or_else(|| default_budget(a.max_depth().max(b.max_depth())));
            match measure_clopen_iso(&mu, &nu, &a, &b, budget)? {
                found @ MeasureIso::Found { .. } => Ok((EXIT_OK, to_value(&found))),
                failed @ MeasureIso::FailedAtBudget { .. } => {
                    let mut v = to_value(&failed);
                    v["hypotheses"] = json!([
                        "the clopen values of mu restricted to A and nu restricted to B differ",
                        "the budget is too small"
                    ]);
                    Ok((EXIT_BUDGET, v))
                }
            }
        }
        Command::MeasureHomeo { map, mu, nu, depth, budget, out, certificate } => {
            let f = load_map(&map)?;
            let (mu, nu): (CylinderMeasure, CylinderMeasure) = (load(&mu, "measure")?, load(&nu, "measure")?);
            let c = certify_measure_homeo(&f, &mu, &nu, depth, budget)?;
            if let Some(p) = out {
                write_json(&p, &c.exchange)?;
            }
            if let Some(p) = certificate {
                write_json(&p, &c)?;
            }
            let rules = c.measure.as_ref().map(|m| to_value(&m.rules)).unwrap_or(Value::Null);
            Ok((EXIT_OK, json!({ "exchange": c.exchange, "distance": c.distance, "rules": rules })))
        }
        Command::HalfFold { measure, budget } => {
            let m: CylinderMeasure = load(&measure, "measure")?;
            Ok((EXIT_OK, to_value(&half_fold(&m, budget)?)))
        }
        Command::DemoGeneric { map, mode, n_max, mu, nu, budget, format, out } => {
            let f = load_map(&map)?;
            let measures = match mode {
                Mode::Topological => None,
                Mode::Measure => {
                    let fair = || CylinderMeasure::bernoulli(rational::ratio(1, 2)).expect("fair coin");
                    let mu = mu.as_deref().map(|m| load(m, "measure")).transpose()?.unwrap_or_else(fair);
                    let nu = nu.as_deref().map(|m| load(m, "measure")).transpose()?.unwrap_or_else(|| mu.clone());
                    Some((mu, nu))
                }
            };
            let report = demo(&f, mode, n_max, measures, budget)?;
            if let Some(p) = out {
                write_json(&p, &report)?;
            }
            match format {
                Format::Json => Ok((EXIT_OK, to_value(&report))),
                Format::Table => Ok((EXIT_OK, Value::String(demo_table(&report)))),
            }
        }
        Command::Verify { certificate } => {
            let checked: Checkable = load(&certificate, "certificate")?;
            let mut discrepancies = Vec::new();
            let mut count = 0;
            match checked {
                Checkable::Report(r) => {
                    for row in &r.rows {
                        count += 1;
                        discrepancies
                            .extend(verify(&row.certificate).into_iter().map(|d| format!("n = {}: {d}", row.n)));
                        if row.distance != row.certificate.distance
                            || row.bound != dyadic(row.n)
                            || row.certificate.depth != row.n
                        {
                            discrepancies.push(format!("n = {}: row summary disagrees with its certificate", row.n));
                        }
                    }
                }
                Checkable::Single(c) => {
                    count += 1;
                    discrepancies.extend(verify(&c));
                }
            }
            let code = if discrepancies.is_empty() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((
                code,
                json!({ "verified": discrepancies.is_empty(), "certificates": count, "discrepancies": discrepancies }),
            ))
        }
    }
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((code, Value::String(text))) => Outcome { code, stdout: text, stderr: String::new() },
        Ok((code, mut value)) => {
            if let (Some(seed), Value::Object(map)) = (cli.seed, &mut value) {
                map.insert("seed".into(), json!(seed));
            }
            Outcome { code, stdout: serde_json::to_string(&value).expect("serializable") + "\n", stderr: String::new() }
        }
        Err(f) => Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}
