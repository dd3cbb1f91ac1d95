use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use grapeqi::cube::{self, Guard};
use grapeqi::intersection::build_ri;
use grapeqi::io::{self, AnyInput, GrapeDocument, ParseError};
use grapeqi::qi::{self, RaagWitness, Tree4Class};
use grapeqi::reductions::{self, ReductionTrace, Step};
use grapeqi::{Error, GrapeBunch};

#[derive(Parser)]
#[command(name = "grapeqi", version, about = "Quasi-isometry tools for 2-braid groups of bunches of grapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a DOT rendering to this path.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<String>,
    /// Print the reduction steps.
    #[arg(long, global = true)]
    trace: bool,
    /// Lift size guards. Large inputs may take a very long time.
    #[arg(long, global = true)]
    guard_override: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subdivide {
    Auto,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Normal representative.
    Normalize { input: String },
    /// Minimal rich representative of a normal bunch.
    Enrich { input: String },
    /// Quasi-minimal representative.
    Minimize { input: String },
    /// Decide whether the 2-braid groups are quasi-isometric.
    Qi { left: String, right: String },
    /// Decide whether the 4-braid groups of two trees are quasi-isometric.
    QiTree4 { left: String, right: String },
    /// Labelled reduced intersection complex, as JSON.
    Ri { input: String },
    /// Configuration space summary for a graph or a bunch.
    Ud {
        input: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Subdivide::Auto)]
        subdivide: Subdivide,
        /// Also run the product-structure checks on bunch inputs.
        #[arg(long)]
        verify: bool,
    },
    /// Bunch grown from a tree.
    Grow { input: String },
    /// Quasi-isometry to right-angled Artin groups.
    Raag { input: String },
    /// Canonical form.
    Canon { input: String },
    /// Free rank of a small bunch.
    Rank { input: String },
}

enum Failure {
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Guard(_) => Failure::Guard(e.to_string()),
            _ => Failure::Input(format!("{} [{}]", e, e.code())),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(format!("{e} [{}]", e.code))
    }
}

type Outcome = Result<String, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(text)
}

fn read_document(path: &str) -> Result<GrapeDocument, Failure> {
    let text = read_input(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        io::parse_grape_json(&text)
    } else {
        io::parse_grape_document(&text)
    };
    parsed.map_err(|e| Failure::Input(format!("{path}: {e} [{}]", e.code)))
}

fn read_tree(path: &str) -> Result<grapeqi::Stem, Failure> {
    let text = read_input(path)?;
    io::parse_tree(&text).map_err(|e| Failure::Input(format!("{path}: {e} [{}]", e.code)))
}

fn write_dot(path: &Option<String>, dot: impl FnOnce() -> String) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, dot()).map_err(|e| Failure::Input(format!("{p}: {e}")))?;
    }
    Ok(())
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn step_text(s: &Step) -> String {
    match s {
        Step::PruneEmptyTwig { twig } => format!("prune-empty-twig {twig}"),
        Step::SmoothTwig { twig } => format!("smooth-twig {twig}"),
        Step::PickGrape { vertex } => format!("pick-grape {vertex}"),
        Step::AttachGrape { vertex } => format!("attach-grape {vertex}"),
        Step::PruneSubstem { vertex, attach } => format!("prune-substem {vertex} {attach}"),
    }
}

fn representative(cli: &Cli, path: &str, op: fn(&GrapeBunch) -> grapeqi::Result<(GrapeBunch, ReductionTrace)>) -> Outcome {
    let doc = read_document(path)?;
    let (rep, trace) = op(&doc.bunch)?;
    let out_doc = GrapeDocument { version: doc.version, bunch: rep, meta: doc.meta };
    write_dot(&cli.dot, || io::graph_dot(&cube::realize_grape(&out_doc.bunch)))?;
    if cli.json {
        let mut v = serde_json::json!({ "representative": io::grape_to_json(&out_doc) });
        if cli.trace {
            v["trace"] = serde_json::to_value(&trace).expect("serializable");
        }
        return Ok(json(&v));
    }
    let mut out = io::serialize_document(&out_doc);
    if cli.trace {
        for e in &trace.steps {
            let _ = writeln!(out, "# {}  ({} vertices, {} grapes)", step_text(&e.step), e.after.vertices, e.after.loops);
        }
    }
    Ok(out)
}

fn tree4_text(c: &Tree4Class) -> String {
    match c {
        Tree4Class::Trivial => "trivial".into(),
        Tree4Class::Grown { descriptor } => format!("grown {descriptor}"),
    }
}

fn cmd_ud(cli: &Cli, path: &str, n: usize, subdivide: Subdivide, verify: bool) -> Outcome {
    let text = read_input(path)?;
    let input = io::parse_any(&text).map_err(|e| Failure::Input(format!("{path}: {e} [{}]", e.code)))?;
    let (base, bunch) = match input {
        AnyInput::Graph(g) => (g, None),
        AnyInput::Grape(b) => (cube::realize_grape(&b), Some(b)),
    };
    let base = match subdivide {
        Subdivide::Auto => cube::subdivide_for(&base, n)?,
        Subdivide::Off => base,
    };
    let guard = if cli.guard_override { Guard::Override } else { Guard::Enforce };
    let cc = cube::build_udn_with(&base, n, guard)?;
    write_dot(&cli.dot, || io::complex_dot(&cc))?;
    let mut f = cc.f_vector();
    f.resize(f.len().max(n + 1), 0);
    let (b0, b1) = cc.betti();
    let links = cc.links_ok();
    let hyper = cc.hyperplanes();
    let special = links.ok && hyper.is_clean();
    let mut checks: Vec<(String, Option<bool>)> = Vec::new();
    if verify {
        if let Some(b) = bunch.as_ref().filter(|b| {
            let c = b.classify();
            c.is_large() && c.normal
        }) {
            let twigs = b.twigs();
            let lemma = || -> grapeqi::Result<bool> {
                let mut all = true;
                for i in 0..twigs.len() {
                    for j in i..twigs.len() {
                        let set = if i == j { vec![twigs[i].clone()] } else { vec![twigs[i].clone(), twigs[j].clone()] };
                        all &= cube::intersection_lemma_check(b, &set)?;
                    }
                }
                Ok(all)
            };
            for (name, res) in [("twig correspondence", cube::twig_correspondence_check(b)), ("intersection lemma", lemma())] {
                match res {
                    Ok(v) => checks.push((name.into(), Some(v))),
                    Err(Error::Guard(_)) => checks.push((name.into(), None)),
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    if cli.json {
        let v = serde_json::json!({
            "n": n,
            "base_vertices": base.vertex_count(),
            "f_vector": f,
            "b0": b0,
            "b1": b1,
            "npc": links.ok,
            "special": special,
            "links": links,
            "hyperplanes": hyper,
            "checks": checks.iter().map(|(k, v)| (k.clone(), *v)).collect::<std::collections::BTreeMap<_, _>>(),
        });
        return Ok(json(&v));
    }
    let cells: Vec<String> = f.iter().map(usize::to_string).collect();
    let mut out = format!("cells: {}, b0={b0}, b1={b1}, npc: {}, special: {}\n", cells.join("/"), yes(links.ok), yes(special));
    for p in &links.problems {
        let _ = writeln!(out, "link problem at {}: {}", p.vertex, p.reason);
    }
    for (k, v) in checks {
        let _ = writeln!(out, "{k}: {}", v.map_or("skipped (size guard)", yes));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Normalize { input } => representative(cli, input, reductions::normal_representative),
        Command::Enrich { input } => representative(cli, input, reductions::rich_representative),
        Command::Minimize { input } => representative(cli, input, reductions::quasi_minimal),
        Command::Qi { left, right } => {
            let (a, b) = (read_document(left)?.bunch, read_document(right)?.bunch);
            let d = qi::decide_qi(&a, &b)?;
            if cli.json {
                return Ok(json(&d));
            }
            Ok(format!("QI: {}\nleft: {}\nright: {}\n", yes(d.quasi_isometric), d.left, d.right))
        }
        Command::QiTree4 { left, right } => {
            let (a, b) = (read_tree(left)?, read_tree(right)?);
            let (ca, cb) = (qi::tree4_class(&a)?, qi::tree4_class(&b)?);
            let same = ca == cb;
            if cli.json {
                return Ok(json(&serde_json::json!({ "quasi_isometric": same, "left": ca, "right": cb })));
            }
            Ok(format!("QI: {}\nleft: {}\nright: {}\n", yes(same), tree4_text(&ca), tree4_text(&cb)))
        }
        Command::Ri { input } => {
            let g = read_document(input)?.bunch;
            let ri = build_ri(&g)?;
            write_dot(&cli.dot, || io::ri_dot(&ri))?;
            Ok(json(&ri))
        }
        Command::Ud { input, n, subdivide, verify } => cmd_ud(cli, input, *n, *subdivide, *verify),
        Command::Grow { input } => {
            let g = qi::grow_from_tree(&read_tree(input)?)?;
            let doc = GrapeDocument { version: io::FORMAT_VERSION, bunch: g, meta: Vec::new() };
            if cli.json {
                return Ok(json(&io::grape_to_json(&doc)));
            }
            Ok(io::serialize_document(&doc))
        }
        Command::Raag { input } => {
            let g = read_document(input)?.bunch;
            let v = qi::raag_qi_check(&g)?;
            if cli.json {
                return Ok(json(&v));
            }
            let value = serde_json::to_value(v.value).expect("serializable");
            let mut out = format!("raag: {}\n", value.as_str().unwrap_or_default());
            match &v.witness {
                Some(RaagWitness::PathStem { path }) => {
                    let _ = writeln!(out, "witness: path stem {}", path.join(" "));
                }
                Some(RaagWitness::AffineD { leaves, n }) => {
                    let _ = writeln!(out, "witness: affine D{n} substem with leaves {}", leaves.join(" "));
                }
                None => {}
            }
            Ok(out)
        }
        Command::Canon { input } => {
            let g = read_document(input)?.bunch;
            let form = g.canonical_form();
            if cli.json {
                return Ok(json(&serde_json::json!({ "canonical_form": form })));
            }
            Ok(format!("{form}\n"))
        }
        Command::Rank { input } => {
            let g = read_document(input)?.bunch;
            let rank = if g.classify().is_large() { None } else { Some(qi::small_rank(&g)?) };
            if cli.json {
                return Ok(json(&serde_json::json!({ "rank": rank, "large": rank.is_none() })));
            }
            Ok(match rank {
                Some(r) => format!("{r}\n"),
                None => "large\n".into(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
