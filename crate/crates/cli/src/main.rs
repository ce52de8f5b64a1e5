//! `mgcat`: moment-graph category O from the command line.

mod cache;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use mgcat_core::cat_o::category::CategoryO;
use mgcat_core::cat_o::module::top_dims;
use mgcat_core::cat_o::FinModule;
use mgcat_core::coxeter::{
    builtin, parse_word, word_string, CoxeterSystem, Group, KLTable, RealizationInput,
};
use mgcat_core::momentgraph::MomentGraph;
use mgcat_core::suites::{self, Session};
use mgcat_core::zmod::{bmp_sheaf, ZContext};
use mgcat_core::Error;

use cache::SheafCache;

#[derive(Parser)]
#[command(
    name = "mgcat",
    version,
    about = "Moment-graph category O in exact arithmetic"
)]
struct Cli {
    /// Built-in system: A1, A1xA1, A2, B2, G2 or A3.
    #[arg(long, global = true, default_value = "A2")]
    system: String,
    /// JSON realization file; overrides --system.
    #[arg(long, global = true)]
    realization: Option<PathBuf>,
    /// Extra degrees searched beyond the expected generator degrees.
    #[arg(long, global = true, default_value_t = 4)]
    margin: i32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write JSON here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Sheaf cache directory (default: $MGCAT_CACHE_DIR, or no cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Vertices and edges of the moment graph.
    Graph,
    /// Kazhdan-Lusztig polynomials: one pair, or every nonzero pair.
    Kl {
        #[arg(long, num_args = 2, value_names = ["Y", "X"])]
        pair: Option<Vec<String>>,
    },
    /// Stalk and edge ranks of the Braden-MacPherson sheaf of an element, on its Bruhat interval.
    Bmp {
        #[arg(long)]
        element: String,
    },
    /// Basis, degrees and structure constants of the algebra A.
    Algebra,
    /// dim Hom(M(x), M(y)) for all pairs, with injectivity of the basis map.
    VermaHoms,
    /// θ_s applied to P(x), M(x) or L(x).
    Translate {
        #[arg(long = "s")]
        s: String,
        #[arg(long)]
        module: String,
    },
    /// T_{s_1}⋯T_{s_l} applied to P(x), M(x) or L(x).
    Twist {
        #[arg(long)]
        word: String,
        #[arg(long)]
        module: String,
    },
    /// Run acceptance suites: translation, zuckerman, twisting, verma, sheaves, algebra, properties or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Include wall-clock timings (output is then not byte-stable).
        #[arg(long)]
        timings: bool,
    },
}

enum Failure {
    Config(String),
    Cap(String),
    Runtime(String),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::DegreeCapExhausted(_) => Failure::Cap(e.to_string()),
            Error::Coxeter(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Config(_) => 2,
        Failure::Cap(_) => 3,
        Failure::Runtime(_) | Failure::Verification(_) => 1,
    }
}

type Out = Result<Value, Failure>;

fn system(cli: &Cli) -> Result<CoxeterSystem, Failure> {
    match &cli.realization {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let input: RealizationInput = serde_json::from_str(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            input
                .build(&name)
                .map_err(|e| Failure::Config(e.to_string()))
        }
        None => builtin(&cli.system).map_err(|e| Failure::Config(e.to_string())),
    }
}

struct Ctx {
    session: Session,
    cache: Option<SheafCache>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Ctx, Failure> {
        if cli.margin <= 0 {
            return Err(Failure::Config("--margin must be positive".into()));
        }
        let sys = system(cli)?;
        let cache = SheafCache::open(cli.cache_dir.clone(), &sys);
        let session = Session::new(sys, cli.margin).map_err(|e| Failure::Config(e.to_string()))?;
        Ok(Ctx { session, cache })
    }

    fn group(&self) -> &Arc<Group> {
        &self.session.group
    }

    /// The full context with cached sheaves installed.
    fn z(&self) -> Result<Arc<ZContext>, Failure> {
        let ctx = self.session.ctx()?;
        if let Some(c) = &self.cache {
            for x in 0..ctx.graph.len() {
                if ctx.cached_bmp(x).is_none() {
                    if let Some(s) = c.load("full", &ctx.graph.name(x), ctx.margin) {
                        ctx.insert_bmp(x, s);
                    }
                }
            }
        }
        Ok(ctx)
    }

    fn cat(&self) -> Result<Arc<CategoryO>, Failure> {
        self.z()?;
        Ok(self.session.cat()?)
    }

    /// Writes newly computed sheaves back to the cache.
    fn flush(&self) {
        let (Some(c), Ok(ctx)) = (&self.cache, self.session.ctx()) else {
            return;
        };
        for x in 0..ctx.graph.len() {
            if let Some(s) = ctx.cached_bmp(x) {
                let name = ctx.graph.name(x);
                if c.load("full", &name, ctx.margin).is_none() {
                    if let Err(e) = c.store("full", &name, ctx.margin, &s) {
                        eprintln!("warning: cache write failed: {e}");
                    }
                }
            }
        }
    }

    fn element(&self, word: &str) -> Result<usize, Failure> {
        self.group()
            .parse(word)
            .map_err(|e| Failure::Config(format!("{word}: {e}")))
    }
}

fn word_json(g: &Group, x: usize) -> Value {
    json!(g.elem(x).word)
}

fn cmd_graph(c: &Ctx) -> Out {
    let ctx = c.z()?;
    let graph = &ctx.graph;
    let g = c.group();
    let vertices: Vec<Value> = (0..graph.len())
        .map(|v| json!({ "name": graph.name(v), "word": word_json(g, graph.element(v)), "length": graph.length(v) }))
        .collect();
    let edges: Vec<Value> = graph
        .edges
        .iter()
        .map(|e| {
            json!({
                "head": graph.name(e.head),
                "tail": graph.name(e.tail),
                "reflection": word_json(g, e.reflection),
                "label": e.label.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({ "system": c.session.name, "vertices": vertices, "edges": edges }))
}

fn kl_json(p: &mgcat_core::coxeter::QPoly) -> Value {
    json!({ "P": p.to_string(), "coefficients": p.0 })
}

fn cmd_kl(c: &Ctx, pair: &Option<Vec<String>>) -> Out {
    let g = c.group();
    let kl = KLTable::new(g);
    if let Some(p) = pair {
        let (y, x) = (c.element(&p[0])?, c.element(&p[1])?);
        let mut v = kl_json(&kl.p(y, x));
        v["y"] = json!(g.elem(y).word_string());
        v["x"] = json!(g.elem(x).word_string());
        return Ok(v);
    }
    if !g.complete {
        return Err(Failure::Config(
            "--pair is required for an infinite group".into(),
        ));
    }
    let mut table = Vec::new();
    for x in 0..g.len() {
        for y in 0..g.len() {
            let p = kl.p(y, x);
            if !p.is_zero() {
                let mut v = kl_json(&p);
                v["y"] = json!(g.elem(y).word_string());
                v["x"] = json!(g.elem(x).word_string());
                table.push(v);
            }
        }
    }
    Ok(json!({ "system": c.session.name, "pairs": table }))
}

fn cmd_bmp(c: &Ctx, element: &str) -> Out {
    let g = c.group();
    let x = c.element(element)?;
    let graph = MomentGraph::interval(g.clone(), x)?;
    let top = graph.position(x).unwrap();
    let key = format!("interval:{}", g.elem(x).word_string());
    let sheaf = match c
        .cache
        .as_ref()
        .and_then(|k| k.load(&key, &g.elem(x).word_string(), c.session.margin))
    {
        Some(s) => s,
        None => {
            let s = bmp_sheaf(&graph, top, c.session.margin)?;
            if let Some(k) = &c.cache {
                if let Err(e) = k.store(&key, &g.elem(x).word_string(), c.session.margin, &s) {
                    eprintln!("warning: cache write failed: {e}");
                }
            }
            s
        }
    };
    let stalks: BTreeMap<String, Value> = (0..graph.len())
        .map(|v| (graph.name(v), json!(sheaf.graded_rank(v))))
        .collect();
    let edges: Vec<Value> = graph
        .edges
        .iter()
        .zip(&sheaf.edge_gens)
        .map(|(e, gens)| json!({ "head": graph.name(e.head), "tail": graph.name(e.tail), "rank": gens.len() }))
        .collect();
    Ok(
        json!({ "system": c.session.name, "element": g.elem(x).word_string(), "stalks": stalks, "edges": edges }),
    )
}

fn cmd_algebra(c: &Ctx) -> Out {
    let cat = c.cat()?;
    let alg = cat.alg();
    let label = |a: usize| {
        let b = alg.basis[a];
        format!("{}->{}#{}", alg.names[b.src], alg.names[b.dst], alg.pos[a])
    };
    let basis: Vec<Value> = (0..alg.dim())
        .map(|a| {
            let b = alg.basis[a];
            json!({ "label": label(a), "src": alg.names[b.src], "dst": alg.names[b.dst], "degree": b.degree, "idempotent": alg.is_idempotent(a) })
        })
        .collect();
    let mut products = Vec::new();
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let p = alg.product(a, b);
            if !p.is_empty() && !alg.is_idempotent(a) && !alg.is_idempotent(b) {
                let terms: Vec<Value> = p
                    .iter()
                    .map(|(k, r)| json!([label(*k), r.to_string()]))
                    .collect();
                products.push(json!({ "a": label(a), "b": label(b), "ab": terms }));
            }
        }
    }
    Ok(
        json!({ "system": c.session.name, "dim": alg.dim(), "vertices": alg.names, "basis": basis, "products": products }),
    )
}

fn cmd_verma_homs(c: &Ctx) -> Out {
    let cat = c.cat()?;
    let table = cat.verma_hom_table()?;
    Ok(
        json!({ "system": c.session.name, "nonzero": table.iter().filter(|e| e.dim > 0).count(), "table": table }),
    )
}

fn module(c: &Ctx, cat: &CategoryO, label: &str) -> Result<FinModule, Failure> {
    let bad = || {
        Failure::Config(format!(
            "module label {label:?}: expected P(x), M(x) or L(x)"
        ))
    };
    let t = label.trim();
    let (kind, rest) = t.split_at(t.char_indices().nth(1).map(|(i, _)| i).ok_or_else(bad)?);
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let x = cat.ctx.graph.position(c.element(inner)?).ok_or_else(bad)?;
    match kind {
        "P" => Ok(cat.projective(x)),
        "M" => Ok(cat.verma(x)?),
        "L" => Ok(cat.simple(x)),
        _ => Err(bad()),
    }
}

fn describe(cat: &CategoryO, m: &FinModule) -> Result<Value, Failure> {
    let weights: BTreeMap<String, usize> = (0..cat.nv())
        .filter(|&x| m.wdim(x) > 0)
        .map(|x| (cat.name(x).to_string(), m.wdim(x)))
        .collect();
    let top = top_dims(cat.alg(), m);
    let top: BTreeMap<String, usize> = (0..cat.nv())
        .filter(|&x| top[x] > 0)
        .map(|x| (cat.name(x).to_string(), top[x]))
        .collect();
    let mut standard = Vec::new();
    for x in 0..cat.nv() {
        for (kind, n) in [
            ("P", cat.projective(x)),
            ("M", cat.verma(x)?),
            ("L", cat.simple(x)),
        ] {
            if n.wdims() == m.wdims() && !m.is_zero() && cat.iso(m, &n).is_iso() {
                standard.push(format!("{kind}({})", cat.name(x)));
            }
        }
    }
    let projective = cat.projective_decomposition(m).map(|d| {
        (0..cat.nv())
            .filter(|&x| d[x] > 0)
            .map(|x| (cat.name(x).to_string(), d[x]))
            .collect::<BTreeMap<_, _>>()
    });
    Ok(
        json!({ "dim": m.dim(), "weights": weights, "top": top, "isomorphic_to": standard, "projective_summands": projective }),
    )
}

fn generator(cat: &CategoryO, s: &str) -> Result<usize, Failure> {
    match parse_word(s, cat.rank())
        .map_err(|e| Failure::Config(e.to_string()))?
        .as_slice()
    {
        [i] => Ok(*i),
        _ => Err(Failure::Config(format!("{s:?} is not a simple reflection"))),
    }
}

fn cmd_translate(c: &Ctx, s: &str, label: &str) -> Out {
    let cat = c.cat()?;
    let s = generator(&cat, s)?;
    let m = module(c, &cat, label)?;
    let t = cat.theta(s, &m)?;
    let via_tensor = cat.theta_tensor(s, &m)?.dim();
    Ok(json!({
        "system": c.session.name,
        "s": s + 1,
        "input": label,
        "result": describe(&cat, &t)?,
        "tensor_dim_agrees": via_tensor == t.dim(),
    }))
}

fn cmd_twist(c: &Ctx, word: &str, label: &str) -> Out {
    let cat = c.cat()?;
    let w = parse_word(word, cat.rank()).map_err(|e| Failure::Config(e.to_string()))?;
    let m = module(c, &cat, label)?;
    let t = cat.twist_word(&w, &m).map_err(|e| match e {
        Error::NotReducedWord => Failure::Config(format!("{word} is not reduced")),
        e => e.into(),
    })?;
    Ok(
        json!({ "system": c.session.name, "word": word_string(&w), "input": label, "result": describe(&cat, &t)? }),
    )
}

fn cmd_verify(c: &Ctx, suite: &str, timings: bool) -> Out {
    let ns = suites::suite_criteria(suite)
        .ok_or_else(|| Failure::Config(format!("unknown suite {suite:?}")))?;
    c.z()?;
    let t0 = Instant::now();
    let verdicts: Vec<_> = ns.iter().map(|&n| suites::run(n, &c.session)).collect();
    let mut results = Vec::new();
    for v in &verdicts {
        let mut j = serde_json::to_value(v).expect("verdict serializes");
        if !timings {
            j.as_object_mut().unwrap().remove("seconds");
        }
        results.push(j);
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let mut report = json!({
        "system": c.session.name,
        "suite": suite,
        "passed": passed,
        "failed": verdicts.len() - passed,
        "skipped": [],
        "verdicts": results,
    });
    if timings {
        report["seconds"] = json!(t0.elapsed().as_secs_f64());
    }
    if passed == verdicts.len() {
        Ok(report)
    } else {
        Err(Failure::Verification(report))
    }
}

fn emit(cli: &Cli, v: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(v).expect("json serializes") + "\n";
    match &cli.output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0
            || rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .is_err()
        {
            eprintln!("error: invalid --threads");
            return ExitCode::from(2);
        }
    }
    let result = Ctx::new(&cli).and_then(|c| {
        let out = match &cli.cmd {
            Cmd::Graph => cmd_graph(&c),
            Cmd::Kl { pair } => cmd_kl(&c, pair),
            Cmd::Bmp { element } => cmd_bmp(&c, element),
            Cmd::Algebra => cmd_algebra(&c),
            Cmd::VermaHoms => cmd_verma_homs(&c),
            Cmd::Translate { s, module } => cmd_translate(&c, s, module),
            Cmd::Twist { word, module } => cmd_twist(&c, word, module),
            Cmd::Verify { suite, timings } => cmd_verify(&c, suite, *timings),
        };
        c.flush();
        out
    });
    let code = match &result {
        Ok(_) => 0,
        Err(f) => exit_code(f),
    };
    let value = match result {
        Ok(v) | Err(Failure::Verification(v)) => Some(v),
        Err(Failure::Config(m) | Failure::Cap(m) | Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            None
        }
    };
    if let Some(v) = value {
        if let Err(e) = emit(&cli, &v) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::DegreeCapExhausted("B(x)".into()).into()),
            3
        );
        assert_eq!(exit_code(&Error::NotReducedWord.into()), 1);
        assert_eq!(exit_code(&Failure::Config(String::new())), 2);
        assert_eq!(exit_code(&Failure::Verification(Value::Null)), 1);
    }
}
