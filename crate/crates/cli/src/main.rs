use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use splicekit::dcurve::{curve_presentation, milnor_data, nu, verify_maj};
use splicekit::equations::{d_action, generate_splice_system};
use splicekit::graph::{parse_any, to_text};
use splicekit::harness::{random_graphs, run_suite, RandomGraphSpec, SuiteReport};
use splicekit::lattice::discriminant_group;
use splicekit::semigroup::{
    congruence_condition, rooted_char_system, semigroup_condition, DeltaOptions, NodeContext,
};
use splicekit::splice::{big_json, linking_matrix, maximal_splice_diagram, splice_diagram};
use splicekit::{Error, Int, ResolutionGraph};

#[derive(Parser)]
#[command(name = "splicekit", version, about = "Splice diagram combinatorics of resolution graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant group, splice diagrams, linking numbers, group action.
    Analyze(Common),
    /// Semigroup and congruence conditions at every node.
    Check(Common),
    /// Splice diagram equations.
    Equations(Common),
    /// Invariants of the curve at a leaf.
    Curve(Common),
    /// Identity suite on a file or on random graphs.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Graph file, text or JSON.
    file: Option<PathBuf>,
    /// Leaf used as root; defaults to the file's `root` line.
    #[arg(long)]
    root: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `COUNT,MAX_VERTICES` random graphs (verify only).
    #[arg(long, value_parser = parse_random)]
    random: Option<(usize, usize)>,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// List the gaps (curve only).
    #[arg(long)]
    gaps: bool,
    /// Where verify writes failing graphs.
    #[arg(long, default_value = "counterexamples")]
    dump_dir: PathBuf,
}

fn parse_random(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected COUNT,MAX_VERTICES")?;
    let n = a.trim().parse().map_err(|e| format!("count: {e}"))?;
    let m = b.trim().parse().map_err(|e| format!("max vertices: {e}"))?;
    Ok((n, m))
}

/// A command's result before rendering.
struct Report {
    command: &'static str,
    input: Value,
    payload: Value,
    text: String,
    /// 0 success, 1 a condition or identity fails.
    status: u8,
}

impl Report {
    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "input": self.input,
            "status": self.status,
            "payload": self.payload,
        })
    }
}

struct Input {
    graph: ResolutionGraph,
    meta: Value,
}

fn read_input(path: &Path) -> Result<Input, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| format!("{}: not UTF-8", path.display()))?;
    let graph = parse_any(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let d = graph.validate();
    if !d.is_valid() {
        let mut msg = format!("{}: invalid graph", path.display());
        for m in &d.messages {
            msg.push_str(&format!("\n  {m}"));
        }
        return Err(msg);
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Input {
        graph,
        meta: json!({"file": name, "sha256": hex::encode(Sha256::digest(&bytes))}),
    })
}

fn err(e: Error) -> String {
    e.to_string()
}

fn analyze(input: Input) -> Result<Report, String> {
    let g = &input.graph;
    let group = discriminant_group::<Int>(g).map_err(err)?;
    let maximal = maximal_splice_diagram::<Int>(g).map_err(err)?;
    let reduced = splice_diagram::<Int>(g).map_err(err)?;
    let lk = linking_matrix::<Int>(g).map_err(err)?;
    let action = d_action(g).map_err(err)?;
    let ids = lk.ids().to_vec();
    let rows: Vec<Value> = ids
        .iter()
        .map(|&v| Value::Array(ids.iter().map(|&w| big_json(&lk.at(v, w))).collect()))
        .collect();

    let mut text = format!(
        "|D| = {} with elementary divisors {:?}{}\n",
        group.order(),
        group.elementary_divisors().iter().map(ToString::to_string).collect::<Vec<_>>(),
        if group.is_cyclic() { " (cyclic)" } else { "" }
    );
    text.push_str("splice diagram weights:\n");
    for v in reduced.nodes() {
        let ws: Vec<String> = reduced.weights_at(v).iter().map(|(u, w)| format!("{w} toward {u}")).collect();
        text.push_str(&format!("  node {v}: {}\n", ws.join(", ")));
    }
    for (w, x) in reduced.leaf_weights() {
        text.push_str(&format!("  leaf {w}: {x}\n"));
    }
    text.push_str("leaf linking numbers times |D|:\n");
    let leaves = g.leaves();
    for &v in &leaves {
        let r: Vec<String> = leaves.iter().map(|&w| lk.at(v, w).to_string()).collect();
        text.push_str(&format!("  {v}: {}\n", r.join(" ")));
    }
    if !action.rows.is_empty() {
        text.push_str("action, z = exp(-2 pi i / |D|):\n");
        for line in action.to_text().lines() {
            text.push_str(&format!("  {line}\n"));
        }
    }
    Ok(Report {
        command: "analyze",
        input: input.meta,
        payload: json!({
            "order": big_json(group.order()),
            "elementary_divisors": group.elementary_divisors().iter().map(big_json).collect::<Vec<_>>(),
            "cyclic": group.is_cyclic(),
            "maximal_splice_diagram": maximal.to_json(),
            "splice_diagram": reduced.to_json(),
            "linking_matrix": {"ids": ids, "rows": rows},
            "action": action.to_json(),
        }),
        text,
        status: 0,
    })
}

fn check_payload(g: &ResolutionGraph) -> Result<(Value, String, bool), String> {
    let ctx = NodeContext::new(g).map_err(err)?;
    let sg = semigroup_condition(g).map_err(err)?;
    let cg = congruence_condition(g).map_err(err)?;
    let mut text = String::new();
    let mut semigroup = Vec::new();
    for (&(v, n), &ok) in &sg {
        let monos = ctx.admissible_monomials((v, n)).map_err(err)?;
        text.push_str(&format!(
            "semigroup {v}-{n}: {} ({} admissible)\n",
            if ok { "holds" } else { "FAILS" },
            monos.len()
        ));
        semigroup.push(json!({"node": v, "neighbor": n, "holds": ok, "admissible": monos}));
    }
    let mut congruence = Vec::new();
    for (&v, w) in &cg {
        text.push_str(&format!("congruence {v}: {}\n", if w.is_some() { "holds" } else { "FAILS" }));
        congruence.push(match w {
            Some(w) => json!({
                "node": v,
                "holds": true,
                "class": w.dclass.coords().iter().map(big_json).collect::<Vec<_>>(),
                "choice": w.choice.iter().map(|((_, n), m)| json!({"neighbor": n, "monomial": m})).collect::<Vec<_>>(),
            }),
            None => json!({"node": v, "holds": false}),
        });
    }
    let holds = sg.values().all(|&b| b) && cg.values().all(Option::is_some);
    text.push_str(if holds { "both conditions hold\n" } else { "conditions fail\n" });
    Ok((json!({"holds": holds, "semigroup": semigroup, "congruence": congruence}), text, holds))
}

fn check(input: Input) -> Result<Report, String> {
    let (payload, text, holds) = check_payload(&input.graph)?;
    Ok(Report {
        command: "check",
        input: input.meta,
        payload,
        text,
        status: u8::from(!holds),
    })
}

fn equations(input: Input, seed: Option<u64>) -> Result<Report, String> {
    let (checks, check_text, holds) = check_payload(&input.graph)?;
    if !holds {
        return Ok(Report {
            command: "equations",
            input: input.meta,
            payload: json!({"system": null, "check": checks}),
            text: check_text,
            status: 1,
        });
    }
    let sys = generate_splice_system(&input.graph, seed).map_err(err)?;
    let text = if sys.equation_count() == 0 {
        "no equations\n".to_string()
    } else {
        sys.to_text()
    };
    Ok(Report {
        command: "equations",
        input: input.meta,
        payload: json!({"system": sys.to_json(), "check": checks}),
        text,
        status: 0,
    })
}

fn curve(input: Input, root: Option<u64>, gaps: bool) -> Result<Report, String> {
    let g = &input.graph;
    let root = root
        .or(g.root())
        .ok_or("curve needs --root or a root line in the file")?;
    let sys = rooted_char_system(g, root).map_err(err)?;
    let rep = sys
        .delta_with(&DeltaOptions {
            collect_gaps: gaps,
            max_levels: None,
        })
        .map_err(err)?;
    let nu = nu(g, root).map_err(err)?.value;
    let maj = verify_maj(g, root).map_err(err)?;
    let md = milnor_data(g, root, sys.order()).map_err(err)?;
    let (pres, pres_note) = match curve_presentation(g, root) {
        Ok(p) => (Some(p), None),
        Err(Error::QhatNotInSemigroup(v)) => (None, Some(format!("no presentation: part rooted at {v}"))),
        Err(e) => return Err(err(e)),
    };

    let mut text = format!(
        "root {root}\ngenerators: {}\ns = {}, r = {}\ndelta = {}, conductor weight {}\nnu = {nu}, 2 delta - r = {}{}\n",
        sys.generators().iter().map(|c| c.weight.to_string()).collect::<Vec<_>>().join(", "),
        sys.s(),
        sys.r(),
        rep.delta,
        rep.conductor_weight,
        maj.two_delta_minus_r,
        if maj.equality { " (equality)" } else { "" },
    );
    if let Some(gs) = &rep.gaps {
        let ws: Vec<String> = gs.iter().map(|c| c.weight.to_string()).collect();
        text.push_str(&format!("gap weights: {}\n", ws.join(" ")));
    }
    match (&pres, &pres_note) {
        (Some(p), _) if p.equations.is_empty() => text.push_str("presentation: no equations\n"),
        (Some(p), _) => {
            text.push_str("presentation:\n");
            for b in &p.equations {
                text.push_str(&format!("  {}\n", b.render(&p.variables)));
            }
        }
        (None, Some(n)) => text.push_str(&format!("{n}\n")),
        (None, None) => {}
    }
    Ok(Report {
        command: "curve",
        input: input.meta,
        payload: json!({
            "root": root,
            "generators": sys.generators().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "qhat": sys.qhat().to_json(),
            "semigroup": rep.to_json(),
            "nu": big_json(&nu),
            "inequality": maj.to_json(),
            "milnor": {
                "euler_fiber": big_json(&md.chi_f),
                "mu": big_json(&md.mu),
            },
            "presentation": pres.as_ref().map(|p| p.to_json()),
        }),
        text,
        status: u8::from(!maj.holds()),
    })
}

fn verify(
    input: Option<Input>,
    random: Option<(usize, usize)>,
    seed: u64,
    dump_dir: &Path,
) -> Result<Report, String> {
    let (graphs, meta) = match (input, random) {
        (Some(i), None) => (vec![i.graph], i.meta),
        (None, Some((count, max))) => (
            random_graphs(&RandomGraphSpec::new(count, max, seed)),
            json!({"random": {"count": count, "max_vertices": max, "seed": seed, "weights": [-5, -1]}}),
        ),
        _ => return Err("verify takes either a file or --random".into()),
    };
    let reports: Vec<SuiteReport> = run_suite(&graphs).into_iter().collect::<Result<_, _>>().map_err(err)?;
    let failed: Vec<(usize, &SuiteReport)> = reports.iter().enumerate().filter(|(_, r)| !r.passed()).collect();
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let mut dumped = Vec::new();
    if !failed.is_empty() {
        std::fs::create_dir_all(dump_dir).map_err(|e| format!("{}: {e}", dump_dir.display()))?;
        for (i, r) in &failed {
            let path = dump_dir.join(format!("counterexample-{i}.graph"));
            std::fs::write(&path, to_text(&r.graph)).map_err(|e| format!("{}: {e}", path.display()))?;
            dumped.push(path.display().to_string());
        }
    }
    let mut text = format!("{} graphs, {checks} checks, {} failing graphs\n", graphs.len(), failed.len());
    for (i, r) in &failed {
        for c in r.failures() {
            text.push_str(&format!("graph {i}: {} at root {:?}: {}\n", c.name, c.root, c.detail));
        }
    }
    for p in &dumped {
        text.push_str(&format!("wrote {p}\n"));
    }
    Ok(Report {
        command: "verify",
        input: meta,
        payload: json!({
            "graphs": graphs.len(),
            "checks": checks,
            "passed": failed.is_empty(),
            "failures": failed.iter().map(|(i, r)| json!({"index": i, "report": r.to_json()})).collect::<Vec<_>>(),
            "dumped": dumped,
        }),
        text,
        status: u8::from(!failed.is_empty()),
    })
}

fn run(cli: Cli) -> Result<(Report, bool), String> {
    let (cmd, args) = match cli.command {
        Command::Analyze(a) => ("analyze", a),
        Command::Check(a) => ("check", a),
        Command::Equations(a) => ("equations", a),
        Command::Curve(a) => ("curve", a),
        Command::Verify(a) => ("verify", a),
    };
    if args.random.is_some() && cmd != "verify" {
        return Err("--random is only accepted by verify".into());
    }
    let input = match &args.file {
        Some(p) => Some(read_input(p)?),
        None => None,
    };
    let need = |i: Option<Input>| i.ok_or_else(|| format!("{cmd} needs a graph file"));
    let report = match cmd {
        "analyze" => analyze(need(input)?)?,
        "check" => check(need(input)?)?,
        "equations" => equations(need(input)?, args.seed)?,
        "curve" => curve(need(input)?, args.root, args.gaps)?,
        _ => verify(input, args.random, args.seed.unwrap_or(1), &args.dump_dir)?,
    };
    Ok((report, args.json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, json)) => {
            let out = if json {
                serde_json::to_string_pretty(&report.to_json()).expect("json") + "\n"
            } else {
                report.text
            };
            // A closed pipe is not an error here.
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(report.status)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
