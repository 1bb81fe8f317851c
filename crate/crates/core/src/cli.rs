//! Batch command-line front end. Every command prints one report and
//! exits 0 when the property holds, 1 when it fails (with a
//! counterexample), 2 on input or cap errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::acceptance;
use crate::caps::Caps;
use crate::chain::{verify_ladder, verify_smooth_composition, LadderReport};
use crate::embeddings::{explain_lambda_embedding, purity_counterexample};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::functor::{builtin, transport_direct, transport_image};
use crate::span::{check_density, star_compose, DensityVerdict, Direction, SpanFamily};
use crate::structure::{Mode, Structure};
use crate::symbolic::{
    sym_density_check, sym_embedding_witnesses, sym_equivalent, sym_verify_ladder, CardToken, SymChain, SymLadder,
    SymDensityVerdict, SymMap,
};
use crate::workspace::Workspace;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "backforth", version, about = "Back-and-forth equivalence and embedding checks for finite structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// `emb`: embeddings as morphisms; `str`: all homomorphisms (relational only)
    #[arg(long, default_value = "emb")]
    mode: Mode,
    /// Largest carrier size accepted
    #[arg(long)]
    cap: Option<usize>,
    /// Only test objects generated by fewer than this many elements
    /// (exploration; verdicts are then not decisions)
    #[arg(long)]
    budget: Option<usize>,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
}

impl Common {
    fn caps(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(n) = self.cap {
            caps = caps.with_max_carrier(n);
        }
        caps.generation_budget = self.budget;
        caps
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Direct,
    Image,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a workspace; classify a morphism or model-check a structure
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        morphism: Option<String>,
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        theory: Option<String>,
        workspace: PathBuf,
    },
    /// Decide equivalence and print the greatest dense family
    Equiv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        workspace: PathBuf,
    },
    /// Decide whether a morphism is a finitary embedding
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        morphism: String,
        /// Also check purity
        #[arg(long)]
        purity: bool,
        workspace: PathBuf,
    },
    /// Check the back and forth conditions for a family read from a file
    Dense {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        workspace: PathBuf,
    },
    /// Compose the greatest families left→middle and middle→right
    Compose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: String,
        #[arg(long)]
        middle: String,
        #[arg(long)]
        right: String,
        workspace: PathBuf,
    },
    /// Move the greatest family between two structures along a functor
    Transport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        functor: String,
        /// Symbols kept by `reduct`, comma separated
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
        #[arg(long, value_enum)]
        route: Option<Route>,
        /// Theory the functor lands in (image route)
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        workspace: PathBuf,
    },
    /// Colimit of a chain, and whether the first cocone map is an embedding
    Chain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chain: String,
        workspace: PathBuf,
    },
    /// Check that a ladder of embeddings induces an embedding of colimits
    Ladder {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ladder: String,
        workspace: PathBuf,
    },
    /// Calculations with sets given by cardinality (`n` or `INF`)
    Setcalc {
        #[arg(long, global = true)]
        json: bool,
        #[command(subcommand)]
        op: SetOp,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long)]
        json: bool,
        /// Run only these criteria
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

#[derive(Subcommand, Debug)]
enum SetOp {
    /// Whether two sets are equivalent
    Equiv { a: CardToken, b: CardToken },
    /// Density of the family of all partial bijections, with a counterexample
    Dense { a: CardToken, b: CardToken },
    /// Whether an injection `a → b` is a finitary embedding
    Embed {
        a: CardToken,
        b: CardToken,
        #[arg(long)]
        bijective: bool,
    },
    /// Colimit of a chain such as `1,2,3,+`
    #[command(alias = "sym-chain")]
    Colimit { chain: SymChain },
    /// Ladder between two chains; components `bij` or `inj` per stage
    Ladder {
        lower: SymChain,
        upper: SymChain,
        #[arg(long, value_delimiter = ',')]
        components: Vec<String>,
    },
}

/// What a command found.
struct Outcome {
    holds: bool,
    result: Value,
    payload: Value,
    summary: String,
}

impl Outcome {
    fn verdict(holds: bool, payload: Value, summary: String) -> Outcome {
        Outcome {
            holds,
            result: json!(holds),
            payload,
            summary,
        }
    }
}

/// Runs one command line (including the program name) and returns the
/// exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let name = command_name(&cli.command);
    let json_out = wants_json(&cli.command);
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let outcome = execute(cli.command);
    let millis = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(o) => {
            if json_out {
                let report = json!({
                    "command": name,
                    "args": args,
                    "result": o.result,
                    "verdict": if o.holds { "holds" } else { "fails" },
                    "payload": o.payload,
                    "timing_ms": millis,
                    "engine_version": ENGINE_VERSION,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                let _ = writeln!(out, "{}", o.summary);
            }
            if o.holds {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if json_out {
                let report = json!({
                    "command": name,
                    "args": args,
                    "result": Value::Null,
                    "verdict": "error",
                    "error": e.to_string(),
                    "timing_ms": millis,
                    "engine_version": ENGINE_VERSION,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
            }
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Equiv { .. } => "equiv",
        Command::Embed { .. } => "embed",
        Command::Dense { .. } => "dense",
        Command::Compose { .. } => "compose",
        Command::Transport { .. } => "transport",
        Command::Chain { .. } => "chain",
        Command::Ladder { .. } => "ladder",
        Command::Setcalc { .. } => "setcalc",
        Command::Selftest { .. } => "selftest",
    }
}

fn wants_json(c: &Command) -> bool {
    match c {
        Command::Check { common, .. }
        | Command::Equiv { common, .. }
        | Command::Embed { common, .. }
        | Command::Dense { common, .. }
        | Command::Compose { common, .. }
        | Command::Transport { common, .. }
        | Command::Chain { common, .. }
        | Command::Ladder { common, .. } => common.json,
        Command::Setcalc { json, .. } | Command::Selftest { json, .. } => *json,
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Check {
            common,
            morphism,
            structure,
            theory,
            workspace,
        } => check(&common, &Workspace::from_file(workspace)?, morphism, structure, theory),
        Command::Equiv {
            common,
            left,
            right,
            workspace,
        } => {
            let ws = Workspace::from_file(workspace)?;
            let (x, y) = (ws.structure(&left)?, ws.structure(&right)?);
            let engine = Engine::new(common.caps());
            let family = engine.greatest_dense_family(x, y, common.mode)?;
            let holds = !family.is_empty();
            let payload = json!({
                "left": left,
                "right": right,
                "mode": common.mode,
                "size": family.len(),
                "family": family.to_json(),
            });
            let summary = if holds {
                format!("{left} and {right} are equivalent ({} mode): greatest dense family has {} spans", common.mode, family.len())
            } else {
                format!("{left} and {right} are not equivalent ({} mode): no dense family", common.mode)
            };
            Ok(Outcome::verdict(holds, payload, summary))
        }
        Command::Embed {
            common,
            morphism,
            purity,
            workspace,
        } => {
            let ws = Workspace::from_file(workspace)?;
            let f = ws.morphism(&morphism)?;
            let caps = common.caps();
            let verdict = explain_lambda_embedding(f, common.mode, &caps)?;
            let x = f.source();
            let (holds, mut payload) = match &verdict {
                None => (
                    false,
                    json!({
                        "morphism": morphism,
                        "mode": common.mode,
                        "class": f.classify().as_str(),
                        "equivalent_ends": false,
                        "witnesses": [],
                        "failure": Value::Null,
                    }),
                ),
                Some(v) => (
                    v.holds,
                    json!({
                        "morphism": morphism,
                        "mode": common.mode,
                        "class": f.classify().as_str(),
                        "equivalent_ends": true,
                        "witnesses": v.witnesses.iter().map(|w| w.to_json(x)).collect::<Vec<_>>(),
                        "failure": v.failure.as_ref().map(|t| crate::embeddings::test_json(t, x)),
                    }),
                ),
            };
            let mut summary = format!(
                "{morphism} ({}) is {}a finitary embedding ({} mode)",
                f.classify().as_str(),
                if holds { "" } else { "not " },
                common.mode
            );
            if purity {
                let pure = if f.is_mono_in(common.mode) {
                    let square = purity_counterexample(f, common.mode, &caps)?;
                    payload["purity"] = json!({ "pure": square.is_none(), "counterexample": square });
                    square.is_none()
                } else {
                    payload["purity"] = json!({ "pure": Value::Null, "reason": "not a mono" });
                    false
                };
                summary.push_str(&format!("; pure: {pure}"));
            }
            Ok(Outcome::verdict(holds, payload, summary))
        }
        Command::Dense {
            common,
            family,
            left,
            right,
            workspace,
        } => {
            let ws = Workspace::from_file(workspace)?;
            dense(&common, &ws, &family, left, right)
        }
        Command::Compose {
            common,
            left,
            middle,
            right,
            workspace,
        } => {
            let ws = Workspace::from_file(workspace)?;
            let engine = Engine::new(common.caps());
            let (x, y, z) = (ws.structure(&left)?, ws.structure(&middle)?, ws.structure(&right)?);
            let first = engine.greatest_dense_family(x, y, common.mode)?;
            let second = engine.greatest_dense_family(y, z, common.mode)?;
            let composite = star_compose(&first, &second, engine.caps())?;
            let verdict = check_density(&composite, engine.caps())?;
            let payload = json!({
                "left": left,
                "right": right,
                "mode": common.mode,
                "size": composite.len(),
                "family": composite.to_json(),
                "density": verdict.to_json(&composite),
            });
            let summary = format!(
                "composite family {left} -> {right} via {middle}: {} spans, {}",
                composite.len(),
                if verdict.is_dense() { "dense" } else { "not dense" }
            );
            Ok(Outcome::verdict(verdict.is_dense(), payload, summary))
        }
        Command::Transport {
            common,
            functor,
            keep,
            route,
            theory,
            left,
            right,
            workspace,
        } => {
            let ws = Workspace::from_file(workspace)?;
            let engine = Engine::new(common.caps());
            let (x, y) = (ws.structure(&left)?, ws.structure(&right)?);
            let functor = builtin(&functor, &keep)?;
            let family = engine.greatest_dense_family(x, y, common.mode)?;
            let route = route.unwrap_or(if functor.preserves_monos() { Route::Direct } else { Route::Image });
            let theory = theory.map(|t| ws.theory(&t)).transpose()?;
            let (moved, certificates) = match route {
                Route::Direct => (transport_direct(functor.as_ref(), &family)?, Value::Null),
                Route::Image => {
                    let t = transport_image(functor.as_ref(), &family, theory.as_ref())?;
                    (t.family, json!(t.certificates))
                }
            };
            let verdict = check_density(&moved, engine.caps())?;
            let holds = verdict.is_dense();
            let payload = json!({
                "functor": functor.name(),
                "route": if route == Route::Direct { "direct" } else { "image" },
                "mode": moved.mode(),
                "source_size": family.len(),
                "size": moved.len(),
                "left_image": structure_json(moved.left()),
                "right_image": structure_json(moved.right()),
                "family": moved.to_json(),
                "density": verdict.to_json(&moved),
                "certificates": certificates,
            });
            let summary = format!(
                "{} of the {} spans between {left} and {right}: {} spans, {}",
                functor.name(),
                family.len(),
                moved.len(),
                if holds { "dense" } else { "not dense" }
            );
            Ok(Outcome::verdict(holds, payload, summary))
        }
        Command::Chain { common, chain, workspace } => {
            let ws = Workspace::from_file(workspace)?;
            let c = ws.chain(&chain)?;
            let engine = Engine::new(common.caps());
            let colimit = c.colimit(common.mode)?;
            let report = verify_smooth_composition(c, common.mode, &engine)?;
            let payload = json!({
                "chain": chain,
                "stages": c.len(),
                "colimit": structure_json(&colimit.object),
                "cocone": colimit.cocone.iter().map(|m| m.map().to_vec()).collect::<Vec<_>>(),
                "report": report,
            });
            Ok(ladder_outcome(&chain, report, payload))
        }
        Command::Ladder { common, ladder, workspace } => {
            let ws = Workspace::from_file(workspace)?;
            let l = ws.ladder(&ladder)?;
            let engine = Engine::new(common.caps());
            let report = verify_ladder(l, common.mode, &engine)?;
            let payload = json!({
                "ladder": ladder,
                "colimit_map": l.colimit_map().map(),
                "report": report,
            });
            Ok(ladder_outcome(&ladder, report, payload))
        }
        Command::Setcalc { op, .. } => setcalc(op),
        Command::Selftest { criteria, .. } => {
            let results = acceptance::run_selected(&criteria);
            let holds = results.iter().all(|r| r.passed);
            let summary = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            Ok(Outcome::verdict(holds, json!(results), summary))
        }
    }
}

fn check(
    common: &Common,
    ws: &Workspace,
    morphism: Option<String>,
    structure: Option<String>,
    theory: Option<String>,
) -> Result<Outcome> {
    let caps = common.caps();
    for s in ws.structures.values() {
        caps.check_structure(s)?;
    }
    if let Some(name) = morphism {
        let f = ws.morphism(&name)?;
        let class = f.classify();
        let holds = match common.mode {
            Mode::Emb => class.is_embedding(),
            Mode::Str => class.is_hom(),
        };
        let payload = json!({ "morphism": name, "class": class.as_str(), "mode": common.mode });
        let summary = format!("{name}: {}", class.as_str());
        return Ok(Outcome {
            holds,
            result: json!(class.as_str()),
            payload,
            summary,
        });
    }
    if let Some(tname) = theory {
        let t = ws.theory(&tname)?;
        let names: Vec<String> = match structure {
            Some(s) => vec![s],
            None => ws
                .structures
                .iter()
                .filter(|(_, s)| **s.signature() == *t.signature)
                .map(|(n, _)| n.clone())
                .collect(),
        };
        let mut models = Vec::new();
        let mut lines = Vec::new();
        let mut holds = true;
        for n in names {
            let cex = t.satisfies(ws.structure(&n)?)?;
            holds &= cex.is_none();
            lines.push(match &cex {
                None => format!("{n} is a model of {tname}"),
                Some(c) => format!("{n} is not a model of {tname}: {c}"),
            });
            models.push(json!({ "structure": n, "model": cex.is_none(), "counterexample": cex }));
        }
        let payload = json!({ "theory": tname, "structures": models });
        return Ok(Outcome::verdict(holds, payload, lines.join("\n")));
    }
    let payload = json!({
        "signatures": ws.signatures.keys().collect::<Vec<_>>(),
        "structures": ws.structures.iter().map(|(n, s)| json!({ "name": n, "size": s.size() })).collect::<Vec<_>>(),
        "morphisms": ws.morphisms.iter().map(|(n, f)| json!({ "name": n, "class": f.classify().as_str() })).collect::<Vec<_>>(),
        "theories": ws.theories.keys().collect::<Vec<_>>(),
        "chains": ws.chains.keys().collect::<Vec<_>>(),
        "ladders": ws.ladders.keys().collect::<Vec<_>>(),
    });
    let summary = format!(
        "workspace ok: {} signatures, {} structures, {} morphisms, {} theories, {} chains, {} ladders",
        ws.signatures.len(),
        ws.structures.len(),
        ws.morphisms.len(),
        ws.theories.len(),
        ws.chains.len(),
        ws.ladders.len()
    );
    Ok(Outcome::verdict(true, payload, summary))
}

/// Accepts a bare JSON array of spans, or a report whose `payload` (or the
/// object itself) has `family`, `left`, `right` and `mode` fields.
fn dense(common: &Common, ws: &Workspace, file: &Path, left: Option<String>, right: Option<String>) -> Result<Outcome> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", file.display())))?;
    let body = v.get("payload").unwrap_or(&v);
    let (spans, meta) = match body {
        Value::Array(_) => (body, &Value::Null),
        _ => (
            body.get("family")
                .ok_or_else(|| Error::invalid("family file has no `family` field"))?,
            body,
        ),
    };
    let named = |flag: Option<String>, key: &str| -> Result<String> {
        flag.or_else(|| meta.get(key).and_then(Value::as_str).map(str::to_string))
            .ok_or_else(|| Error::invalid(format!("no --{key} given and none recorded in the family file")))
    };
    let (left, right) = (named(left, "left")?, named(right, "right")?);
    let mode = match meta.get("mode").and_then(Value::as_str) {
        Some(m) => m.parse()?,
        None => common.mode,
    };
    let x: Arc<Structure> = ws.structure(&left)?.clone();
    let y: Arc<Structure> = ws.structure(&right)?.clone();
    let family = SpanFamily::from_json(spans, x, y, mode)?;
    let verdict = check_density(&family, &common.caps())?;
    let holds = verdict.is_dense();
    let summary = match &verdict {
        DensityVerdict::Dense => format!("family of {} spans between {left} and {right} is dense", family.len()),
        DensityVerdict::NotDense(f) => format!("family of {} spans is not dense: {f:?}", family.len()),
    };
    let mut payload = verdict.to_json(&family);
    payload["left"] = json!(left);
    payload["right"] = json!(right);
    payload["mode"] = json!(mode);
    payload["size"] = json!(family.len());
    Ok(Outcome::verdict(holds, payload, summary))
}

fn structure_json(s: &Structure) -> Value {
    let sig = s.signature();
    json!({
        "size": s.size(),
        "relations": sig.relations().iter().zip(s.relations()).map(|(r, t)| (r.name.clone(), json!(t))).collect::<serde_json::Map<_, _>>(),
        "functions": sig.functions().iter().enumerate().map(|(i, f)| (f.name.clone(), json!(s.function_table(i)))).collect::<serde_json::Map<_, _>>(),
    })
}

/// Exit 0 unless the conclusion fails under a satisfied hypothesis.
fn ladder_outcome(name: &str, report: LadderReport, payload: Value) -> Outcome {
    let holds = report.conclusion_ok != Some(false);
    let summary = match report.conclusion_ok {
        None => format!("{name}: hypothesis fails at {}", report.failures.join(", ")),
        Some(true) => format!("{name}: hypothesis holds and the colimit map is an embedding"),
        Some(false) => format!("{name}: hypothesis holds but the colimit map is not an embedding"),
    };
    Outcome {
        holds,
        result: json!(report.conclusion_ok),
        payload,
        summary,
    }
}

fn setcalc(op: SetOp) -> Result<Outcome> {
    Ok(match op {
        SetOp::Equiv { a, b } => {
            let holds = sym_equivalent(a, b);
            Outcome::verdict(
                holds,
                json!({ "a": a, "b": b }),
                format!("{a} and {b} are {}equivalent", if holds { "" } else { "not " }),
            )
        }
        SetOp::Dense { a, b } => {
            let verdict = sym_density_check(a, b);
            let summary = match &verdict {
                SymDensityVerdict::Dense => format!("all finite-center spans between {a} and {b} form a dense family"),
                SymDensityVerdict::NotDense { span, direction, test } => format!(
                    "not dense: span with center {} (rests {}, {}) fails {} on a test of size {test}",
                    span.center,
                    span.left_rest,
                    span.right_rest,
                    if *direction == Direction::Back { "back" } else { "forth" },
                ),
            };
            Outcome::verdict(verdict.is_dense(), json!({ "a": a, "b": b, "density": verdict }), summary)
        }
        SetOp::Embed { a, b, bijective } => {
            let f = SymMap::new(a, b, bijective)?;
            let witnesses = sym_embedding_witnesses(f);
            let holds = witnesses.is_some();
            Outcome::verdict(
                holds,
                json!({ "map": f, "witnesses": witnesses }),
                format!(
                    "{} map {a} -> {b} is {}an embedding",
                    if bijective { "bijective" } else { "injective" },
                    if holds { "" } else { "not " }
                ),
            )
        }
        SetOp::Colimit { chain } => {
            let c = chain.colimit();
            Outcome {
                holds: true,
                result: json!(c),
                payload: json!({ "chain": chain }),
                summary: format!("colimit: {c}"),
            }
        }
        SetOp::Ladder {
            lower,
            upper,
            components,
        } => {
            let flags = components
                .iter()
                .map(|c| match c.as_str() {
                    "bij" | "b" => Ok(true),
                    "inj" | "i" => Ok(false),
                    other => Err(Error::invalid(format!("component `{other}` is neither `bij` nor `inj`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let ladder = SymLadder::new(lower, upper, &flags)?;
            let report = sym_verify_ladder(&ladder)?;
            let payload = json!({ "ladder": ladder, "colimit_map": ladder.colimit_map(), "report": report });
            ladder_outcome("ladder", report, payload)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("backforth").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
    }

    #[test]
    fn setcalc_commands() {
        assert_eq!(run_str(&["setcalc", "equiv", "INF", "INF"]).0, 0);
        assert_eq!(run_str(&["setcalc", "equiv", "2", "5"]).0, 1);
        assert_eq!(run_str(&["setcalc", "dense", "2", "3"]).0, 1);
        assert_eq!(run_str(&["setcalc", "embed", "INF", "INF"]).0, 0);
        assert_eq!(run_str(&["setcalc", "embed", "3", "2"]).0, 2);
        let (code, text) = run_str(&["setcalc", "colimit", "1,2,3,+"]);
        assert_eq!((code, text.trim()), (0, "colimit: INF"));
        let (code, _) = run_str(&["setcalc", "ladder", "3,3,=", "3,3,=", "--components", "bij,bij"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn unknown_subcommand_exits_2() {
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&[]).0, 2);
    }
}
