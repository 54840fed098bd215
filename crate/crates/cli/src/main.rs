//! netcode: command line front end for netcode-core.
//!
//! One command per process. The report goes to stdout, byte-identical
//! across repeated runs on the same inputs; timing and errors go to
//! stderr. Exit codes: 0 success, 1 semantic negative (no solution, not
//! graphic, verdict false, flow deficit), 2 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use netcode_core::code::{parse_code_with_network, serialize_code, verify_multicast, LinearCode};
use netcode_core::field::FieldSpec;
use netcode_core::lift::{
    lift_matrix, lift_solution, verify_tu, BinaryMatrix, FieldMatrix, LiftError, MatrixLift,
    SignedMatrix,
};
use netcode_core::matroid::{enumerate_bases, ids_of, is_base_orderable, Matroid};
use netcode_core::multicast::{build_multicast_matroid, receiver_gammoid};
use netcode_core::network::{parse_network, MulticastNetwork};
use netcode_core::solve::{auto_strategy, find_strategy, strategies};

#[derive(Parser)]
#[command(
    name = "netcode",
    version,
    about = "Multicast network codes: solve, verify, lift"
)]
struct Cli {
    /// Seed echoed into the report; fixed default keeps runs reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit one JSON report object on stdout instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a network document; report per-receiver flows and paths.
    Check {
        #[arg(long)]
        network: PathBuf,
    },
    /// Construct a code over a field and write the code document.
    Solve {
        #[arg(long)]
        network: PathBuf,
        /// Field as "p" or "p^k", e.g. 2, 3, 2^2.
        #[arg(long)]
        field: String,
        /// Force one construction; default picks by applicability.
        #[arg(long)]
        strategy: Option<String>,
        /// Also write the code document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a code document decodes at every eligible node.
    Verify {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    /// Report a receiver matroid, or the multicast matroid of the network.
    #[command(group = ArgGroup::new("which").required(true).args(["receiver", "multicast"]))]
    Matroid {
        #[arg(long)]
        network: PathBuf,
        /// Receiver id whose matroid to report.
        #[arg(long)]
        receiver: Option<String>,
        /// Report the multicast matroid built from all receivers.
        #[arg(long)]
        multicast: bool,
    },
    /// Lift a binary solution (--network + --code) or a raw binary matrix
    /// (--matrix) into the field given by --to.
    #[command(group = ArgGroup::new("source").required(true).args(["network", "matrix"]))]
    Lift {
        #[arg(long, requires = "code")]
        network: Option<PathBuf>,
        /// Binary code document for the network.
        #[arg(long)]
        code: Option<PathBuf>,
        /// Raw binary matrix file, no topology.
        #[arg(long, conflicts_with_all = ["network", "code"])]
        matrix: Option<PathBuf>,
        /// Target field as "p" or "p^k".
        #[arg(long)]
        to: String,
        /// Write the main artifact here: the lifted code document, or in
        /// matrix mode the lifted matrix text.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively check total unimodularity of a signed matrix.
    VerifyTu {
        #[arg(long)]
        matrix: PathBuf,
    },
}

/// Everything a command needs to assemble the report.
struct Ctx {
    json: bool,
    seed: u64,
    inputs: Vec<Value>,
}

impl Ctx {
    fn read(&mut self, role: &str, path: &Path) -> Result<String, String> {
        let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.inputs.push(json!({
            "role": role,
            "path": path.display().to_string(),
            "sha256": digest,
        }));
        String::from_utf8(bytes).map_err(|_| format!("{}: not valid utf-8", path.display()))
    }

    fn network(&mut self, path: &Path) -> Result<MulticastNetwork, String> {
        let text = self.read("network", path)?;
        parse_network(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    fn field(&self, s: &str) -> Result<FieldSpec, String> {
        FieldSpec::from_str(s).map_err(|e| format!("field {s:?}: {e}"))
    }
}

/// What a command produced: overall verdict, JSON payload, text lines.
struct Outcome {
    ok: bool,
    output: Value,
    lines: Vec<String>,
}

/// Prints one stdout line; a reader that hung up is not an error.
fn emit(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("stdout: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Ctx {
        json: cli.json,
        seed: cli.seed,
        inputs: Vec::new(),
    };
    let (name, result) = dispatch(&cli.command, &mut ctx);
    let status = match result {
        Ok(outcome) => {
            if ctx.json {
                let report = json!({
                    "command": name,
                    "seed": ctx.seed,
                    "inputs": ctx.inputs,
                    "ok": outcome.ok,
                    "output": outcome.output,
                });
                emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                for line in &outcome.lines {
                    emit(line);
                }
            }
            u8::from(!outcome.ok)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    eprintln!("elapsed: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    ExitCode::from(status)
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> (&'static str, Result<Outcome, String>) {
    match cmd {
        Command::Check { network } => ("check", cmd_check(ctx, network)),
        Command::Solve {
            network,
            field,
            strategy,
            out,
        } => (
            "solve",
            cmd_solve(ctx, network, field, strategy.as_deref(), out.as_deref()),
        ),
        Command::Verify { network, code } => ("verify", cmd_verify(ctx, network, code)),
        Command::Matroid {
            network,
            receiver,
            multicast,
        } => (
            "matroid",
            cmd_matroid(ctx, network, receiver.as_deref(), *multicast),
        ),
        Command::Lift {
            network,
            code,
            matrix,
            to,
            out,
        } => (
            "lift",
            cmd_lift(
                ctx,
                network.as_deref(),
                code.as_deref(),
                matrix.as_deref(),
                to,
                out.as_deref(),
            ),
        ),
        Command::VerifyTu { matrix } => ("verify-tu", cmd_verify_tu(ctx, matrix)),
    }
}

fn cmd_check(ctx: &mut Ctx, path: &Path) -> Result<Outcome, String> {
    let net = ctx.network(path)?;
    let omega = net.dimension();
    let mut lines = vec![format!(
        "dimension {omega}, {} nodes, {} links",
        net.node_ids().count(),
        net.num_real_links(),
    )];
    let mut receivers = Vec::new();
    let mut ok = true;
    for t in net.receiver_ids() {
        let flow = net.maxflow(t).map_err(|e| e.to_string())?;
        let enough = flow >= omega;
        ok &= enough;
        let mut entry = json!({"receiver": t, "maxflow": flow, "ok": enough});
        if enough {
            let ps = net.edge_disjoint_paths(t).map_err(|e| e.to_string())?;
            lines.push(format!("receiver {t}: maxflow {flow}, ok"));
            for p in &ps.paths {
                lines.push(format!("  path: {}", p.join(" ")));
            }
            entry["paths"] = json!(ps.paths);
        } else {
            lines.push(format!(
                "receiver {t}: maxflow {flow}, DEFICIT (needs {omega})"
            ));
        }
        receivers.push(entry);
    }
    lines.push(if ok {
        format!("network supports dimension {omega} at every receiver")
    } else {
        "network cannot support the requested dimension".to_string()
    });
    Ok(Outcome {
        ok,
        output: json!({
            "dimension": omega,
            "nodes": net.node_ids().count(),
            "links": net.num_real_links(),
            "receivers": receivers,
        }),
        lines,
    })
}

/// Local and global forms of a code, as document JSON values.
fn code_values(code: &LinearCode) -> (Value, Value) {
    let document: Value =
        serde_json::from_str(&serialize_code(code.local())).expect("document is valid JSON");
    let g = code.global();
    let rows: Vec<Vec<u64>> = (0..g.num_rows())
        .map(|i| {
            g.labels()
                .iter()
                .map(|l| g.column(l).expect("label is known")[i].value())
                .collect()
        })
        .collect();
    let global = json!({"labels": g.labels(), "rows": rows});
    (document, global)
}

fn cmd_solve(
    ctx: &mut Ctx,
    path: &Path,
    field: &str,
    strategy: Option<&str>,
    out: Option<&Path>,
) -> Result<Outcome, String> {
    let net = ctx.network(path)?;
    let spec = ctx.field(field)?;
    let strat = match strategy {
        Some(name) => find_strategy(name).ok_or_else(|| {
            let known: Vec<&str> = strategies().iter().map(|s| s.name()).collect();
            format!("unknown strategy {name:?}; known: {}", known.join(", "))
        })?,
        None => auto_strategy(&net, spec),
    };
    let pairs = net.adjacent_pairs().len();
    match strat.construct(&net, spec).map_err(|e| e.to_string())? {
        Some(code) => {
            let (document, global) = code_values(&code);
            let doc_text = serialize_code(code.local());
            if let Some(out) = out {
                fs::write(out, &doc_text).map_err(|e| format!("{}: {e}", out.display()))?;
            }
            let mut lines = vec![format!(
                "strategy {}: solution over GF({})",
                strat.name(),
                spec
            )];
            if let Some(out) = out {
                lines.push(format!("wrote code document to {}", out.display()));
            }
            lines.extend(doc_text.lines().map(String::from));
            Ok(Outcome {
                ok: true,
                output: json!({
                    "strategy": strat.name(),
                    "field": spec.to_string(),
                    "code": document,
                    "global": global,
                }),
                lines,
            })
        }
        None => {
            let assignments = spec.order().pow(pairs as u32);
            Ok(Outcome {
                ok: false,
                output: json!({
                    "strategy": strat.name(),
                    "field": spec.to_string(),
                    "code": Value::Null,
                    "adjacent_pairs": pairs,
                    "assignments_searched": assignments,
                }),
                lines: vec![format!(
                    "strategy {}: no GF({}) solution (exhausted {} assignments over {} adjacent pairs)",
                    strat.name(),
                    spec,
                    assignments,
                    pairs,
                )],
            })
        }
    }
}

fn cmd_verify(ctx: &mut Ctx, network: &Path, code: &Path) -> Result<Outcome, String> {
    let net = ctx.network(network)?;
    let doc = ctx.read("code", code)?;
    let code = parse_code_with_network(&doc, &net).map_err(|e| e.to_string())?;
    let verdict = verify_multicast(&code);
    let mut lines = Vec::new();
    for c in &verdict.checked {
        lines.push(format!(
            "node {}: maxflow {}, decodes dimension {}, {}",
            c.node,
            c.maxflow,
            c.dim,
            if c.ok { "ok" } else { "FAIL" }
        ));
    }
    lines.push(if verdict.ok {
        format!("valid multicast code over GF({})", code.spec())
    } else {
        format!("INVALID: fails at {}", verdict.failing().join(", "))
    });
    Ok(Outcome {
        ok: verdict.ok,
        output: json!({
            "field": code.spec().to_string(),
            "verdict": serde_json::to_value(&verdict).expect("verdict serializes"),
        }),
        lines,
    })
}

fn bases_value(ground: &[String], bases: &[netcode_core::matroid::SubsetMask]) -> Value {
    let ids: Vec<Vec<String>> = bases.iter().map(|&b| ids_of(ground, b)).collect();
    json!(ids)
}

fn cmd_matroid(
    ctx: &mut Ctx,
    network: &Path,
    receiver: Option<&str>,
    multicast: bool,
) -> Result<Outcome, String> {
    let net = ctx.network(network)?;
    if let Some(t) = receiver {
        if !net.receiver_ids().contains(&t) {
            return Err(format!("{t:?} is not a receiver of this network"));
        }
        let ps = net.edge_disjoint_paths(t).map_err(|e| e.to_string())?;
        let gammoid = receiver_gammoid(&net, &ps).map_err(|e| e.to_string())?;
        let bases = enumerate_bases(&gammoid).map_err(|e| e.to_string())?;
        let orderable = is_base_orderable(&gammoid).map_err(|e| e.to_string())?;
        let ground = gammoid.ground().to_vec();
        let mut lines = vec![format!(
            "receiver {t} matroid: ground {{{}}}, rank {}, {} bases, {}",
            ground.join(" "),
            gammoid.rank(),
            bases.len(),
            if orderable.orderable {
                "base orderable"
            } else {
                "NOT base orderable"
            }
        )];
        for &b in &bases {
            lines.push(format!("  {}", ids_of(&ground, b).join(" ")));
        }
        Ok(Outcome {
            ok: true,
            output: json!({
                "receiver": t,
                "ground": ground,
                "rank": gammoid.rank(),
                "bases": bases_value(&ground, &bases),
                "base_orderable": orderable.orderable,
            }),
            lines,
        })
    } else {
        debug_assert!(multicast);
        let m = build_multicast_matroid(&net).map_err(|e| e.to_string())?;
        let ground = m.ground().to_vec();
        let bases = enumerate_bases(m.matroid()).map_err(|e| e.to_string())?;
        let orderable = is_base_orderable(m.matroid()).map_err(|e| e.to_string())?;
        let views: Vec<Value> = m
            .receiver_views()
            .iter()
            .map(|(t, bs)| json!({"receiver": t, "bases": bases_value(&ground, bs)}))
            .collect();
        let mut lines = vec![format!(
            "multicast matroid: ground {{{}}}, rank {}, {} bases, {} exchange swaps, {}",
            ground.join(" "),
            m.rank(),
            m.num_bases(),
            m.swaps(),
            if orderable.orderable {
                "base orderable"
            } else {
                "NOT base orderable"
            }
        )];
        for (t, bs) in m.receiver_views() {
            lines.push(format!("receiver {t} contributes {} bases", bs.len()));
        }
        lines.push(format!(
            "union of receiver bases {}, surplus from exchanges {}",
            m.union_of_receiver_bases().len(),
            m.surplus().len()
        ));
        if !m.loops().is_empty() {
            lines.push(format!("loops: {}", m.loops().join(" ")));
        }
        for &b in &bases {
            lines.push(format!("  {}", ids_of(&ground, b).join(" ")));
        }
        Ok(Outcome {
            ok: true,
            output: json!({
                "ground": ground,
                "rank": m.rank(),
                "bases": bases_value(&ground, &bases),
                "swaps": m.swaps(),
                "loops": m.loops(),
                "receivers": views,
                "union_bases": m.union_of_receiver_bases().len(),
                "surplus": bases_value(&ground, &m.surplus()),
                "base_orderable": orderable.orderable,
            }),
            lines,
        })
    }
}

fn binary_value(m: &BinaryMatrix) -> Value {
    let rows: Vec<Vec<u8>> = (0..m.num_rows())
        .map(|i| (0..m.num_cols()).map(|j| m.entry(i, j)).collect())
        .collect();
    json!({"labels": m.labels(), "rows": rows})
}

fn signed_value(m: &SignedMatrix) -> Value {
    let rows: Vec<Vec<i64>> = (0..m.num_rows())
        .map(|i| (0..m.num_cols()).map(|j| m.entry(i, j)).collect())
        .collect();
    json!({"labels": m.labels(), "rows": rows})
}

fn field_value(m: &FieldMatrix) -> Value {
    let rows: Vec<Vec<u64>> = (0..m.num_rows())
        .map(|i| (0..m.labels().len()).map(|j| m.entry(i, j)).collect())
        .collect();
    json!({"field": m.spec().to_string(), "labels": m.labels(), "rows": rows})
}

fn matrix_lines(lines: &mut Vec<String>, title: &str, text: &str) {
    lines.push(format!("{title}:"));
    lines.extend(text.lines().map(|l| format!("  {l}")));
}

fn lift_payload(lift: &MatrixLift) -> (Value, Vec<String>) {
    let tu = verify_tu(&lift.signed);
    let payload = json!({
        "transform": binary_value(&lift.transform),
        "reduced": binary_value(&lift.reduced),
        "signed": signed_value(&lift.signed),
        "lifted": field_value(&lift.viewed),
        "tu": {"ok": tu.ok, "max_order_checked": tu.max_order_checked},
    });
    let mut lines = Vec::new();
    matrix_lines(&mut lines, "transform", &lift.transform.format());
    matrix_lines(&mut lines, "reduced", &lift.reduced.format());
    matrix_lines(&mut lines, "signed", &lift.signed.format());
    matrix_lines(
        &mut lines,
        &format!("lifted over GF({})", lift.viewed.spec()),
        &lift.viewed.format(),
    );
    lines.push(format!(
        "total unimodularity: {} (minors up to order {})",
        if tu.ok { "ok" } else { "VIOLATED" },
        tu.max_order_checked
    ));
    (payload, lines)
}

/// Semantic negatives keep exit code 1 and a report; everything else is an
/// input error.
fn semantic(e: &LiftError) -> bool {
    matches!(e, LiftError::NotGraphic | LiftError::ColumnTooHeavy(_))
}

fn cmd_lift(
    ctx: &mut Ctx,
    network: Option<&Path>,
    code: Option<&Path>,
    matrix: Option<&Path>,
    to: &str,
    out: Option<&Path>,
) -> Result<Outcome, String> {
    let spec = ctx.field(to)?;
    if let Some(mpath) = matrix {
        let text = ctx.read("matrix", mpath)?;
        let b = BinaryMatrix::parse(&text).map_err(|e| e.to_string())?;
        match lift_matrix(&b, spec) {
            Ok(lift) => {
                if let Some(out) = out {
                    fs::write(out, lift.viewed.format())
                        .map_err(|e| format!("{}: {e}", out.display()))?;
                }
                let (payload, mut lines) = lift_payload(&lift);
                if let Some(out) = out {
                    lines.push(format!("wrote lifted matrix to {}", out.display()));
                }
                Ok(Outcome {
                    ok: true,
                    output: json!({"mode": "matrix", "lift": payload}),
                    lines,
                })
            }
            Err(e) if semantic(&e) => Ok(Outcome {
                ok: false,
                output: json!({"mode": "matrix", "error": e.to_string()}),
                lines: vec![format!("cannot lift: {e}")],
            }),
            Err(e) => Err(e.to_string()),
        }
    } else {
        let net = ctx.network(network.expect("clap requires a source"))?;
        let doc = ctx.read("code", code.expect("clap ties code to network"))?;
        let binary = parse_code_with_network(&doc, &net).map_err(|e| e.to_string())?;
        match lift_solution(&binary, spec) {
            Ok(lifted) => {
                let doc_text = serialize_code(lifted.code.local());
                if let Some(out) = out {
                    fs::write(out, &doc_text).map_err(|e| format!("{}: {e}", out.display()))?;
                }
                let (lift_json, mut lines) = lift_payload(&lifted.matrix);
                let (document, global) = code_values(&lifted.code);
                lines.push(format!(
                    "lifted code over GF({}) decodes at every receiver; matroid preserved",
                    spec
                ));
                if let Some(out) = out {
                    lines.push(format!("wrote code document to {}", out.display()));
                }
                lines.extend(doc_text.lines().map(String::from));
                Ok(Outcome {
                    ok: true,
                    output: json!({
                        "mode": "network",
                        "lift": lift_json,
                        "code": document,
                        "global": global,
                    }),
                    lines,
                })
            }
            Err(e) if semantic(&e) => Ok(Outcome {
                ok: false,
                output: json!({"mode": "network", "error": e.to_string()}),
                lines: vec![format!("cannot lift: {e}")],
            }),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn cmd_verify_tu(ctx: &mut Ctx, matrix: &Path) -> Result<Outcome, String> {
    let text = ctx.read("matrix", matrix)?;
    let m = SignedMatrix::parse(&text).map_err(|e| e.to_string())?;
    let report = verify_tu(&m);
    let (line, failing) = match &report.failing {
        None => (
            format!(
                "all minors up to order {} are in {{-1, 0, 1}}: totally unimodular",
                report.max_order_checked
            ),
            Value::Null,
        ),
        Some(w) => (
            format!(
                "minor rows {:?} cols {:?} has determinant {}: NOT totally unimodular",
                w.rows, w.cols, w.det
            ),
            json!({"rows": w.rows, "cols": w.cols, "det": w.det}),
        ),
    };
    Ok(Outcome {
        ok: report.ok,
        output: json!({
            "ok": report.ok,
            "max_order_checked": report.max_order_checked,
            "failing": failing,
        }),
        lines: vec![line],
    })
}
