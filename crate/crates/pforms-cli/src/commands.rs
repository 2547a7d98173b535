//! One function per subcommand; each returns a JSON report and an exit code.

use pforms::classify::{classify_low_dim, verify_lemma, LemmaReport};
use pforms::extensions::{
    defect_by_derivations, fsp_special_qpn, insep_splitting_pattern, weak_vishik, Budget, InsepExtension,
};
use pforms::invariants::{
    divide_by_similarity, is_minimal, is_quasi_pfister_neighbor, is_similar, norm_field, similarity_group, Subfield,
};
use pforms::{FieldElem, GroundField};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::parse::{parse_elem, split_top_level};
use crate::session::Session;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

fn ok(report: Value) -> Outcome {
    Outcome { report, exit: 0 }
}

fn header(command: &str, field: Option<&GroundField>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Some(f) = field {
        m.insert("field".into(), json!(f.to_string()));
    }
    m
}

fn subfield(s: &Subfield) -> Value {
    let f = s.field();
    json!({
        "generators": s.pbasis().iter().map(|b| f.render(b)).collect::<Vec<_>>(),
        "exponent": s.exponent(),
        "degree": s.degree(),
    })
}

fn render(f: &GroundField, x: &FieldElem) -> Value {
    json!(f.render(x))
}

pub fn invariants(s: &Session, expr: &str) -> Result<Outcome> {
    let f = &s.field;
    let phi = s.form(expr)?;
    let an = phi.anisotropic_part()?;
    let mut m = header("invariants", Some(f));
    m.insert("form".into(), json!(phi.render()));
    m.insert("dim".into(), json!(phi.dim()));
    m.insert("defect".into(), json!(phi.defect()?));
    m.insert("anisotropic_part".into(), json!(an.render()));
    if an.dim() == 0 {
        for k in ["norm_field", "ndeg", "norm_form", "minimal", "qpn_codim", "similarity_group", "similarity_decomposition"] {
            m.insert(k.into(), Value::Null);
        }
        return Ok(ok(Value::Object(m)));
    }
    let n = norm_field(&an)?;
    let g = similarity_group(&an)?;
    let d = divide_by_similarity(&an)?;
    m.insert("norm_field".into(), subfield(&n));
    m.insert("ndeg".into(), json!(n.degree()));
    m.insert("norm_form".into(), json!(n.pfister_form().render()));
    m.insert("minimal".into(), json!(is_minimal(&an)?));
    m.insert("qpn_codim".into(), json!(is_quasi_pfister_neighbor(&an)?));
    m.insert("similarity_group".into(), subfield(&g));
    m.insert(
        "similarity_decomposition".into(),
        json!({
            "simform": d.simform.render(),
            "cofactor": d.cofactor.render(),
            "scalar": f.render(&d.scalar),
        }),
    );
    Ok(ok(Value::Object(m)))
}

pub fn compare(s: &Session, a: &str, b: &str, budget: &Budget) -> Result<Outcome> {
    let f = &s.field;
    let phi = s.form(a)?;
    let psi = s.form(b)?;
    let scalar = is_similar(&phi, &psi)?;
    let v = weak_vishik(&phi, &psi, budget)?;
    let mut m = header("compare", Some(f));
    m.insert("phi".into(), json!(phi.render()));
    m.insert("psi".into(), json!(psi.render()));
    m.insert("isometric".into(), json!(phi.is_isometric(&psi)?));
    m.insert("phi_subform_of_psi".into(), json!(phi.is_subform_of(&psi)?));
    m.insert("psi_subform_of_phi".into(), json!(psi.is_subform_of(&phi)?));
    m.insert("similar".into(), json!(scalar.is_some()));
    m.insert("scalar".into(), scalar.map_or(Value::Null, |c| render(f, &c)));
    m.insert("weak_vishik".into(), serde_json::to_value(v.status).expect("status serializes"));
    m.insert("rule".into(), json!(v.rule));
    m.insert("witness".into(), serde_json::to_value(&v.witness).expect("extension serializes"));
    m.insert("witness_defects".into(), json!(v.witness_defects));
    m.insert("candidates_checked".into(), json!(v.candidates_checked));
    m.insert("seed".into(), json!(budget.seed));
    m.insert("budget".into(), serde_json::to_value(budget).expect("budget serializes"));
    Ok(ok(Value::Object(m)))
}

pub fn classify(s: &Session, expr: &str) -> Result<Outcome> {
    let f = &s.field;
    let phi = s.form(expr)?;
    let label = classify_low_dim(&phi)?;
    let checked = is_similar(&label.form()?, &phi)?.is_some();
    if !checked {
        return Err(pforms::Error::Internal("classification is not similar to the input".into()).into());
    }
    let mut m = header("classify", Some(f));
    m.insert("form".into(), json!(phi.render()));
    m.insert("classification".into(), serde_json::to_value(&label).expect("label serializes"));
    m.insert("similar_to_input".into(), json!(checked));
    Ok(ok(Value::Object(m)))
}

pub fn fsp(s: &Session, expr: &str, budget: &Budget) -> Result<Outcome> {
    let f = &s.field;
    let phi = s.form(expr)?;
    let an = phi.anisotropic_part()?;
    let pattern: Vec<usize> = if an.dim() == 0 {
        vec![0]
    } else {
        insep_splitting_pattern(&an, budget)?.into_iter().collect()
    };
    let special = if f.p() == 2 {
        match fsp_special_qpn(an.dim()) {
            Ok(table) => json!({
                "consistent": pattern.iter().all(|d| table.contains(d)),
                "expected": table,
            }),
            Err(_) => Value::Null,
        }
    } else {
        Value::Null
    };
    let mut m = header("fsp", Some(f));
    m.insert("form".into(), json!(phi.render()));
    m.insert("anisotropic_dim".into(), json!(an.dim()));
    m.insert("fsp".into(), json!(pattern));
    m.insert("special_qpn".into(), special);
    m.insert("seed".into(), json!(budget.seed));
    m.insert("budget".into(), serde_json::to_value(budget).expect("budget serializes"));
    Ok(ok(Value::Object(m)))
}

pub fn defect(s: &Session, expr: &str, ext: &str) -> Result<Outcome> {
    let f = &s.field;
    let phi = s.form(expr)?;
    let gens = if ext.trim().is_empty() {
        Vec::new()
    } else {
        split_top_level(ext).iter().map(|g| parse_elem(g, f)).collect::<Result<Vec<_>>>()?
    };
    let ext = InsepExtension::new(f, gens).map_err(|e| CliError::Usage(format!("--ext: {e}")))?;
    let d = defect_by_derivations(&phi, &ext)?;
    let mut m = header("defect", Some(f));
    m.insert("form".into(), json!(phi.render()));
    m.insert("ext".into(), json!(ext.render()));
    m.insert("ext_degree".into(), json!(ext.pth_power_field()?.degree()));
    m.insert("defect".into(), json!(d));
    m.insert("anisotropic_dim".into(), json!(phi.dim() - d));
    Ok(ok(Value::Object(m)))
}

/// Exit code 1 iff some trial failed.
pub fn verify(lemma: &str, trials: usize, seed: u64) -> Result<Outcome> {
    Ok(verify_outcome(&verify_lemma(lemma, trials, seed)?))
}

pub fn verify_outcome(r: &LemmaReport) -> Outcome {
    let mut m = header("verify", None);
    m.insert("lemma".into(), json!(r.name));
    m.insert("seed".into(), json!(r.seed));
    m.insert("trials".into(), json!(r.trials));
    m.insert("passed".into(), json!(r.passed));
    m.insert("skipped".into(), json!(r.skipped));
    m.insert("failures".into(), json!(r.failures));
    m.insert("ok".into(), json!(r.ok()));
    m.insert("counterexample".into(), serde_json::to_value(&r.counterexample).expect("counterexample serializes"));
    m.insert("computed".into(), json!(r.computed));
    Outcome { exit: if r.ok() { 0 } else { 1 }, report: Value::Object(m) }
}

pub fn lemmas() -> Outcome {
    let mut m = header("lemmas", None);
    m.insert("lemmas".into(), json!(pforms::classify::lemma_names()));
    ok(Value::Object(m))
}

/// Plain `key: value` lines for terminal reading.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = v {
        for (k, x) in m {
            if k == "schema" {
                continue;
            }
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&inline(x));
            out.push('\n');
        }
    }
    out
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => {
            format!("{{{}}}", m.iter().map(|(k, x)| format!("{k}: {}", inline(x))).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}
