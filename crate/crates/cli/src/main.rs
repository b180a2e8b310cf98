use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use fenchel_core::flutes::{classify_completeness_with, classify_end, End, FluteStructure};
use fenchel_core::mcg::{
    chain_membership, count_class, matsuzaki_classify, normal_form, support_class, trichotomy, ChainLevel,
    DrIndex, MappingClass, Membership, SubspaceDesc,
};
use fenchel_core::pantsgraph::{extract_flute, maximal_tree, truncate, DualGraph};
use fenchel_core::paths::{nonconvexity_experiment, segment_eval, zigzag_eval};
use fenchel_core::{fn_distance, orthodistance, orthodistance_bounds, pentagon_split, CoordSeq, PantsGeom};
use serde_json::{json, Value};

const HEXAGON: &str = "cosh d = (cosh c + cosh a cosh b) / (sinh a sinh b), (a, b, c) = (l1, l2, lp) / 2";
const METRIC: &str = "sum_{i<=N} 2^-i (|dl|/(1+|dl|) + |dt|/(1+|dt|)), tail 2^(1-N)";
const SERIES: &str = "d_n by the hexagon rule; tail from the collar sandwich";

/// Computations in Fenchel-Nielsen coordinate spaces of flute surfaces.
///
/// Coordinate structures are read from JSON files given with --config.
/// Exit status: 0 on success, 2 on configuration or domain errors,
/// 3 when a numerical method fails to converge.
#[derive(Debug, Parser)]
#[command(name = "fenchel", version)]
struct Cli {
    /// Truncation index N for series and metrics.
    #[arg(long, global = true, default_value_t = 1000)]
    truncate: u64,

    /// Tolerance for the pentagon/hexagon cross-check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,

    /// Coordinate-structure JSON file (repeat for two-point commands).
    #[arg(long = "config", global = true, value_name = "FILE")]
    configs: Vec<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orthodistance between the two cuffs of a pair of pants.
    Trig {
        #[arg(long)]
        l1: f64,
        #[arg(long)]
        l2: f64,
        /// Third boundary length; 0 is a cusp.
        #[arg(long, default_value_t = 0.0)]
        lp: f64,
    },
    /// Truncated product distance between two --config structures.
    Metric,
    /// Point at time t on the zig-zag path between two --config structures.
    Zigzag {
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Point at parameter s on the straight segment between two structures.
    Segment {
        #[arg(long, default_value_t = 0.5)]
        s: f64,
    },
    /// Completeness of the nonisolated end of a --config flute.
    Complete,
    /// Half-twist flutes whose midpoint is incomplete.
    Nonconvexity,
    /// Support and count class of a mapping class; Matsuzaki test with --config.
    Classify {
        /// Generator string such as `twist-power:0.5,shift:1` or a JSON file.
        #[arg(long)]
        mc: String,
    },
    /// Always/sometimes/never quasiconformal relative to a subspace.
    Trichotomy {
        #[arg(long)]
        mc: String,
        /// full, complete, metric-complete, systole:EPS or dr:R.
        #[arg(long)]
        subspace: String,
        /// Uniform upper bound C on transverse lengths (dr only).
        #[arg(long)]
        transverse_upper: Option<f64>,
        /// Write qc.json and not_qc.json witness structures to DIR.
        #[arg(long, value_name = "DIR")]
        emit_witnesses: Option<PathBuf>,
    },
    /// Membership of a --config structure in D_r and the chain levels.
    Drmember {
        /// 0, a natural number n, or 1/n.
        #[arg(long)]
        r: Option<String>,
    },
    /// Flute inside the maximal tree of a truncated dual graph.
    ExtractFlute {
        /// flute, biinfinite-flute, loch-ness or cantor-tree.
        #[arg(long)]
        family: String,
        /// Truncation depth of the dual graph.
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Seed vertex; defaults to the base pants.
        #[arg(long)]
        seed: Option<u64>,
    },
}

struct Report {
    json: Value,
    csv: String,
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn load_seq(path: &Path) -> anyhow::Result<CoordSeq> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn configs<const K: usize>(cli: &Cli) -> anyhow::Result<[CoordSeq; K]> {
    if cli.configs.len() != K {
        bail!("expected {K} --config file(s), got {}", cli.configs.len());
    }
    let seqs = cli.configs.iter().map(|p| load_seq(p)).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(seqs.try_into().unwrap_or_else(|_| unreachable!()))
}

fn load_mc(spec: &str) -> anyhow::Result<MappingClass> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        return serde_json::from_str(&text).with_context(|| format!("parsing {spec}"));
    }
    Ok(spec.parse()?)
}

fn trig(cli: &Cli, l1: f64, l2: f64, lp: f64) -> anyhow::Result<Report> {
    let p = PantsGeom::new(l1, l2, lp)?;
    let d = orthodistance(&p)?;
    let b = orthodistance_bounds(&p)?;
    let s = pentagon_split(&p)?;
    let residual = (s.total() - d).abs();
    if residual > cli.tol * (1.0 + d) {
        return Err(fenchel_core::Error::Numerical {
            message: format!("pentagon split disagrees with the hexagon rule by {residual:e}"),
            lo: s.total(),
            hi: d,
            f_lo: residual,
            f_hi: cli.tol,
        }
        .into());
    }
    let json = json!({
        "command": "trig",
        "formula": HEXAGON,
        "input": {"l1": l1, "l2": l2, "lp": lp},
        "d": d,
        "bounds": b,
        "split": s,
        "split_residual": residual,
        "tol": cli.tol,
    });
    let mut csv = String::from("l1,l2,lp,d,lower,upper,c1,c2,d1,d2\n");
    let row = [l1, l2, lp, d, b.lower, b.upper, s.c1, s.c2, s.d1, s.d2];
    csv += &row.map(num).join(",");
    csv.push('\n');
    Ok(Report { json, csv })
}

fn metric(cli: &Cli) -> anyhow::Result<Report> {
    let [z, w] = configs::<2>(cli)?;
    let t = fn_distance(&z, &w, cli.truncate)?;
    let json = json!({
        "command": "metric",
        "formula": METRIC,
        "truncation": cli.truncate,
        "value": t.value,
        "tail_bound": t.tail_bound,
    });
    let csv = format!("truncation,value,tail_bound\n{},{},{}\n", cli.truncate, num(t.value), num(t.tail_bound));
    Ok(Report { json, csv })
}

fn path_point(cli: &Cli, kind: &str, param: f64) -> anyhow::Result<Report> {
    let [z, w] = configs::<2>(cli)?;
    let x = match kind {
        "zigzag" => zigzag_eval(&z, &w, param)?,
        _ => segment_eval(&z, &w, param)?,
    };
    let n = cli.truncate;
    let to_start = fn_distance(&z, &x, n)?;
    let to_end = fn_distance(&x, &w, n)?;
    let json = json!({
        "command": kind,
        "parameter": param,
        "formula": METRIC,
        "truncation": n,
        "tail_bound": to_end.tail_bound,
        "distance_from_start": to_start.value,
        "distance_to_end": to_end.value,
        "point": x,
    });
    let mut csv = String::from("m,length,twist,peripheral\n");
    for m in 1..=n {
        let c = x.eval(m)?;
        let _ = writeln!(csv, "{m},{},{},{}", num(c.length), num(c.twist), num(x.peripheral_length(m)?));
    }
    Ok(Report { json, csv })
}

fn complete(cli: &Cli) -> anyhow::Result<Report> {
    let [x] = configs::<1>(cli)?;
    let f = FluteStructure::new(x)?;
    let v = classify_completeness_with(&f, cli.truncate)?;
    let end = classify_end(&f, End::Nonisolated)?;
    let (lo, hi) = v.evidence.limit_bracket();
    let mut csv = String::from("n,d_n,cumulative\n");
    for r in &v.evidence.rows {
        let _ = writeln!(csv, "{},{},{}", r.n, num(r.term), num(r.cumulative));
    }
    let _ = writeln!(csv, "# rule {}", v.rule);
    let _ = writeln!(csv, "# limit in [{}, {}]", num(lo), num(hi));
    let _ = writeln!(csv, "{}", status(&v.status));
    let json = json!({
        "command": "complete",
        "formula": SERIES,
        "truncation": cli.truncate,
        "tail_bound": v.evidence.upper_tail,
        "end_geometry": end,
        "verdict": v,
    });
    Ok(Report { json, csv })
}

fn status<T: serde::Serialize>(s: &T) -> String {
    match serde_json::to_value(s) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn nonconvexity(cli: &Cli) -> anyhow::Result<Report> {
    let r = nonconvexity_experiment(cli.truncate)?;
    let mut csv = String::from("n,d_n,cumulative,asymptote,ratio\n");
    for row in &r.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            row.n,
            num(row.d_n),
            num(row.cumulative),
            num(row.asymptote),
            num(row.ratio)
        );
    }
    let _ = writeln!(
        csv,
        "# endpoints {} {}",
        status(&r.endpoints[0].status),
        status(&r.endpoints[1].status)
    );
    let _ = writeln!(
        csv,
        "# limit in [{}, {}]",
        num(r.partial_sum + r.lower_tail),
        num(r.partial_sum + r.upper_tail)
    );
    let _ = writeln!(csv, "{}", status(&r.midpoint.status));
    let json = json!({
        "command": "nonconvexity",
        "formula": SERIES,
        "truncation": r.truncation,
        "tail_bound": r.upper_tail,
        "shows_nonconvexity": r.shows_nonconvexity(),
        "report": r,
    });
    Ok(Report { json, csv })
}

fn classify(cli: &Cli, mc: &str) -> anyhow::Result<Report> {
    let mc = load_mc(mc)?;
    let nf = normal_form(&mc)?;
    let counts = count_class(&nf.counts);
    let support = support_class(&mc)?;
    let qc = match cli.configs.len() {
        0 => None,
        _ => {
            let [x] = configs::<1>(cli)?;
            Some(matsuzaki_classify(&mc, &x)?)
        }
    };
    let json = json!({
        "command": "classify",
        "formula": "net count terms of the class acting on a reference structure",
        "mapping_class": mc,
        "net_shift": nf.net_shift,
        "has_shift": nf.has_shift,
        "counts": nf.counts,
        "count_class": counts,
        "support": support,
        "matsuzaki": qc,
    });
    let qc_col = qc.as_ref().map(|q| status(&q.verdict)).unwrap_or_default();
    let count_col = serde_json::to_value(&counts)?["class"].as_str().unwrap_or("").to_string();
    let csv = format!(
        "support,count_class,net_shift,matsuzaki\n{},{},{},{}\n",
        status(&support),
        count_col,
        nf.net_shift,
        qc_col
    );
    Ok(Report { json, csv })
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_trichotomy(
    mc: &str,
    subspace: &str,
    transverse_upper: Option<f64>,
    emit: Option<&Path>,
) -> anyhow::Result<Report> {
    let mc = load_mc(mc)?;
    let mut sub: SubspaceDesc = subspace.parse()?;
    if let Some(c) = transverse_upper {
        match &mut sub {
            SubspaceDesc::Dr { transverse_upper, .. } => *transverse_upper = Some(c),
            _ => bail!("--transverse-upper applies only to dr subspaces"),
        }
        sub.validate()?;
    }
    let v = trichotomy(&mc, &sub)?;
    let mut files = Vec::new();
    if let (Some(dir), Some(w)) = (emit, &v.witnesses) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, x) in [("qc.json", &w.qc), ("not_qc.json", &w.not_qc)] {
            let path = dir.join(name);
            write_json(&path, x)?;
            files.push(name);
        }
    }
    let json = json!({
        "command": "trichotomy",
        "formula": "Matsuzaki: sup_m |n_m| ell_m < inf on the normal form",
        "mapping_class": mc,
        "subspace": sub,
        "verdict": v,
        "witness_files": files,
    });
    let csv = format!(
        "type,tag,detail\n{},{},\"{}\"\n",
        status(&v.kind),
        v.tag,
        v.detail.replace('"', "\"\"")
    );
    Ok(Report { json, csv })
}

fn drmember(cli: &Cli, r: Option<&str>) -> anyhow::Result<Report> {
    let [x] = configs::<1>(cli)?;
    let lengths = x.lengths().asymptotic();
    let mut levels = vec![ChainLevel::Complete, ChainLevel::Dr(DrIndex::Zero)];
    levels.extend((2..=4).rev().map(|n| ChainLevel::Dr(DrIndex::Reciprocal(n))));
    levels.extend((1..=4).map(|n| ChainLevel::Dr(DrIndex::Natural(n))));
    let label = |l: &ChainLevel| match l {
        ChainLevel::Complete => "complete".to_string(),
        ChainLevel::Dr(r) => format!("D_{r}"),
    };
    let chain: Vec<(String, Membership)> = levels.iter().map(|l| (label(l), chain_membership(&lengths, *l))).collect();
    let requested = match r {
        Some(r) => {
            let idx: DrIndex = r.parse()?;
            let sub = SubspaceDesc::Dr {
                r: idx,
                transverse_upper: None,
            };
            let m = match sub.contains(&x)? {
                Some(b) => status(&Membership::from(b)),
                None => "UNDECIDED".into(),
            };
            Some((format!("D_{idx}"), m))
        }
        None => None,
    };
    let mut csv = String::from("level,membership\n");
    if let Some((l, m)) = &requested {
        let _ = writeln!(csv, "{l},{m}");
    }
    for (l, m) in &chain {
        let _ = writeln!(csv, "{l},{}", status(m));
    }
    let json = json!({
        "command": "drmember",
        "formula": "c m^(-1/r) <= ell_m <= C on the asymptotic length family",
        "lengths": x.lengths(),
        "requested": requested.map(|(level, membership)| json!({"level": level, "membership": membership})),
        "chain": chain.iter().map(|(l, m)| json!({"level": l, "membership": m})).collect::<Vec<_>>(),
    });
    Ok(Report { json, csv })
}

fn extract(family: &str, depth: u32, seed: Option<u64>) -> anyhow::Result<Report> {
    let g: DualGraph = family.parse()?;
    if depth > 20 {
        bail!("--depth {depth} is too large; at most 20 is supported");
    }
    let graph = truncate(g, depth);
    let tree = maximal_tree(&graph)?;
    let d = extract_flute(&tree, seed.unwrap_or(g.base()))?;
    let mut csv = String::from("kind,a,b\n");
    for (i, v) in d.spine.iter().enumerate() {
        let _ = writeln!(csv, "spine,{i},{v}");
    }
    for (a, b) in &d.rungs {
        let _ = writeln!(csv, "rung,{a},{b}");
    }
    for h in &d.boundary {
        let to = h.to.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(csv, "boundary,{},{to}", h.at);
    }
    let json = json!({
        "command": "extract-flute",
        "formula": "longest path in the BFS maximal tree",
        "family": family,
        "depth": depth,
        "vertices": graph.vertices.len(),
        "tree_edges": tree.edges,
        "spine_length": d.spine_length(),
        "flute": d,
    });
    Ok(Report { json, csv })
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        bail!("--tol must be positive and finite");
    }
    match &cli.command {
        Command::Trig { l1, l2, lp } => trig(cli, *l1, *l2, *lp),
        Command::Metric => metric(cli),
        Command::Zigzag { t } => path_point(cli, "zigzag", *t),
        Command::Segment { s } => path_point(cli, "segment", *s),
        Command::Complete => complete(cli),
        Command::Nonconvexity => nonconvexity(cli),
        Command::Classify { mc } => classify(cli, mc),
        Command::Trichotomy {
            mc,
            subspace,
            transverse_upper,
            emit_witnesses,
        } => run_trichotomy(mc, subspace, *transverse_upper, emit_witnesses.as_deref()),
        Command::Drmember { r } => drmember(cli, r.as_deref()),
        Command::ExtractFlute { family, depth, seed } => extract(family, *depth, *seed),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<fenchel_core::Error>()) {
        Some(fenchel_core::Error::Numerical { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.output {
                Format::Json => match serde_json::to_string_pretty(&report.json) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {:#}", anyhow!(e));
                        return ExitCode::from(2);
                    }
                },
                Format::Csv => print!("{}", report.csv),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
