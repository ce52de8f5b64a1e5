//! Content-addressed on-disk cache of Braden-MacPherson sheaves.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use mgcat_core::coxeter::CoxeterSystem;
use mgcat_core::momentgraph::GSheaf;
use mgcat_core::polylin::{Mono, Poly};
use mgcat_core::rat::Rat;

pub struct SheafCache {
    dir: PathBuf,
    system: String,
}

/// Polynomials as maps from comma-joined exponent tuples to `p/q` strings.
pub fn poly_json(p: &Poly) -> Value {
    let n = p.nvars();
    let m: Map<String, Value> = p
        .terms()
        .iter()
        .map(|(mono, c)| {
            let key = mono
                .exps(n)
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",");
            (key, Value::String(c.to_string()))
        })
        .collect();
    Value::Object(m)
}

fn poly_from(v: &Value, n: usize) -> Option<Poly> {
    let mut terms = Vec::new();
    for (k, c) in v.as_object()? {
        let exps: Vec<u32> = if k.is_empty() {
            Vec::new()
        } else {
            k.split(',')
                .map(|e| e.parse().ok())
                .collect::<Option<_>>()?
        };
        if exps.len() != n {
            return None;
        }
        terms.push((Mono::from_exps(&exps), c.as_str()?.parse::<Rat>().ok()?));
    }
    Some(Poly::from_terms(n, terms))
}

fn degrees(v: &Value) -> Option<Vec<Vec<i32>>> {
    v.as_array()?
        .iter()
        .map(|r| {
            r.as_array()?
                .iter()
                .map(|d| d.as_i64().map(|d| d as i32))
                .collect()
        })
        .collect()
}

fn maps(v: &Value, n: usize) -> Option<Vec<Vec<Vec<Poly>>>> {
    v.as_array()?
        .iter()
        .map(|e| {
            e.as_array()?
                .iter()
                .map(|r| r.as_array()?.iter().map(|p| poly_from(p, n)).collect())
                .collect()
        })
        .collect()
}

pub fn sheaf_json(s: &GSheaf) -> Value {
    let maps = |m: &Vec<Vec<Vec<Poly>>>| -> Value {
        m.iter()
            .map(|e| {
                e.iter()
                    .map(|r| r.iter().map(poly_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    json!({
        "nvars": s.nvars,
        "stalks": s.stalks,
        "edge_gens": s.edge_gens,
        "rho_head": maps(&s.rho_head),
        "rho_tail": maps(&s.rho_tail),
    })
}

pub fn sheaf_from(v: &Value) -> Option<GSheaf> {
    let n = v.get("nvars")?.as_u64()? as usize;
    Some(GSheaf {
        nvars: n,
        stalks: degrees(v.get("stalks")?)?,
        edge_gens: degrees(v.get("edge_gens")?)?,
        rho_head: maps(v.get("rho_head")?, n)?,
        rho_tail: maps(v.get("rho_tail")?, n)?,
    })
}

impl SheafCache {
    /// The cache in `dir`, or in `MGCAT_CACHE_DIR` when no directory is given.
    pub fn open(dir: Option<PathBuf>, sys: &CoxeterSystem) -> Option<SheafCache> {
        let dir = dir.or_else(|| std::env::var_os("MGCAT_CACHE_DIR").map(PathBuf::from))?;
        let system = serde_json::to_string(&sys.to_input()).ok()?;
        Some(SheafCache { dir, system })
    }

    /// Key from the realization, the vertex set, the element and the degree margin.
    fn path(&self, graph: &str, element: &str, margin: i32) -> PathBuf {
        let mut h = Sha256::new();
        h.update(self.system.as_bytes());
        h.update(format!("|{graph}|{element}|{margin}").as_bytes());
        self.dir.join(format!("{}.json", hex::encode(h.finalize())))
    }

    pub fn load(&self, graph: &str, element: &str, margin: i32) -> Option<GSheaf> {
        let text = std::fs::read_to_string(self.path(graph, element, margin)).ok()?;
        sheaf_from(&serde_json::from_str(&text).ok()?)
    }

    pub fn store(
        &self,
        graph: &str,
        element: &str,
        margin: i32,
        s: &GSheaf,
    ) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path(graph, element, margin);
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, sheaf_json(s).to_string())?;
        std::fs::rename(tmp, path)
    }
}
