//! Randomized identity suites, run by name with a fixed seed.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{spn_decompose_with_pfister, three_dim_rewrite, two_dim_congruent, two_dim_similar};
use crate::extensions::{
    defect_by_derivations, defect_over, fsp_special_qpn, generic_special_qpn, insep_splitting_pattern, pfister_slot_isotropy,
    substitute_roots, weak_vishik, Budget, InsepExtension, VishikStatus,
};
use crate::groundfield::{pth_root, FieldElem, GroundField, Poly};
use crate::invariants::{is_p_independent, is_similar, norm_field, similarity_group, Subfield};
use crate::qform::QuasiForm;
use crate::random::{self, Rng64};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub field: String,
    pub inputs: Vec<String>,
    pub ints: Vec<i64>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failures: usize,
    pub counterexample: Option<Counterexample>,
    /// Splitting pattern computed by the `spn_fsp_dim*` suites.
    pub computed: Option<Vec<usize>>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
struct Instance {
    field: GroundField,
    elems: Vec<FieldElem>,
    ints: Vec<i64>,
}

enum Outcome {
    Pass(Option<Vec<usize>>),
    Fail(String),
}

type Gen = fn(&mut Rng64) -> Result<Instance>;
type Check = fn(&Instance) -> Result<Outcome>;

const SUITES: &[(&str, Gen, Check)] = &[
    ("3dimSim", gen_3dim_sim, check_3dim_sim),
    ("3dimRewr", gen_3dim_rewr, check_3dim_rewr),
    ("2dimCong", gen_2dim_cong, check_2dim_cong),
    ("2dimIsotropy", gen_2dim_isotropy, check_2dim_isotropy),
    ("2dimSimilarity", gen_2dim_similarity, check_2dim_similarity),
    ("quasiPFaddingSlot", gen_adding_slot, check_adding_slot),
    ("PFdivisibility", gen_pf_divisibility, check_pf_divisibility),
    ("IsotropyIndicesSPN", gen_isotropy_indices, check_isotropy_indices),
    ("MultiplesIsometry", gen_multiples, check_multiples),
    ("normDegreeBounds", gen_norm_bounds, check_norm_bounds),
    ("minimalVishik", gen_minimal_vishik, check_minimal_vishik),
    ("spnSimilarity", gen_spn_pair, check_spn_similarity),
    ("spnNormField", gen_spn_pair, check_spn_norm_field),
    ("spn_fsp_dim3", gen_fsp::<3>, check_fsp),
    ("spn_fsp_dim5", gen_fsp::<5>, check_fsp),
    ("spn_fsp_dim6", gen_fsp::<6>, check_fsp),
    ("spn_fsp_dim7", gen_fsp::<7>, check_fsp),
    ("spn_fsp_dim9", gen_fsp::<9>, check_fsp),
    ("spn_fsp_dim10", gen_fsp::<10>, check_fsp),
    ("spn_fsp_dim11", gen_fsp::<11>, check_fsp),
];

pub fn lemma_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `None` means the instance was skipped.
type Evaluation = std::result::Result<Option<Vec<usize>>, String>;

fn evaluate(check: Check, inst: &Instance) -> Option<Evaluation> {
    match check(inst) {
        Ok(Outcome::Pass(c)) => Some(Ok(c)),
        Ok(Outcome::Fail(m)) => Some(Err(m)),
        Err(Error::Internal(m)) => Some(Err(m)),
        Err(_) => None,
    }
}

fn fails(check: Check, inst: &Instance) -> Option<String> {
    match evaluate(check, inst) {
        Some(Err(m)) => Some(m),
        _ => None,
    }
}

/// Simpler variants of one element: 0, 1, and the numerator with one term dropped.
fn simplifications(x: &FieldElem) -> Vec<FieldElem> {
    let p = x.p();
    let mut out = vec![FieldElem::zero(p), FieldElem::one(p)];
    let terms = x.numer().terms();
    if terms.len() > 1 {
        for i in 0..terms.len() {
            let mut t = terms.to_vec();
            t.remove(i);
            let n = Poly::from_terms(p, t);
            if let Ok(y) = FieldElem::new(n, x.denom().clone()) {
                out.push(y);
            }
        }
    }
    if !x.denom().is_one() {
        out.push(FieldElem::from_poly(x.numer().clone()));
    }
    out.retain(|y| y != x);
    out
}

fn minimize(check: Check, mut inst: Instance, mut message: String) -> (Instance, String) {
    for _ in 0..64 {
        let mut changed = false;
        for i in 0..inst.elems.len() {
            for y in simplifications(&inst.elems[i]) {
                let mut cand = inst.clone();
                cand.elems[i] = y;
                if let Some(m) = fails(check, &cand) {
                    inst = cand;
                    message = m;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (inst, message)
}

fn run_suite(name: &str, gen: Gen, check: Check, trials: usize, seed: u64) -> Result<LemmaReport> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(trials.max(1));
    let mut results: Vec<Option<(Instance, Option<Evaluation>)>> = vec![None; trials];
    type Trial = (usize, Result<(Instance, Option<Evaluation>)>);
    let chunks: Vec<Vec<Trial>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..trials)
                        .step_by(threads)
                        .map(|i| {
                            let mut rng = random::rng(trial_seed(seed, i));
                            let r = gen(&mut rng).map(|inst| {
                                let out = evaluate(check, &inst);
                                (inst, out)
                            });
                            (i, r)
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    });
    for chunk in chunks {
        for (i, r) in chunk {
            results[i] = Some(r?);
        }
    }
    let mut report = LemmaReport {
        name: name.to_string(),
        seed,
        trials,
        passed: 0,
        skipped: 0,
        failures: 0,
        counterexample: None,
        computed: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        let (inst, out) = r.expect("every trial ran");
        match out {
            None => report.skipped += 1,
            Some(Ok(c)) => {
                report.passed += 1;
                if report.computed.is_none() {
                    report.computed = c;
                }
            }
            Some(Err(m)) => {
                report.failures += 1;
                if report.counterexample.is_none() {
                    let (inst, message) = minimize(check, inst, m);
                    report.counterexample = Some(Counterexample {
                        trial: i,
                        field: format!("F_{}({})", inst.field.p(), inst.field.var_names().join(",")),
                        inputs: inst.elems.iter().map(|x| inst.field.render(x)).collect(),
                        ints: inst.ints.clone(),
                        message,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Run a registered suite for `trials` instances drawn from `seed`.
pub fn verify_lemma(name: &str, trials: usize, seed: u64) -> Result<LemmaReport> {
    let (_, gen, check) = SUITES
        .iter()
        .find(|s| s.0 == name)
        .ok_or_else(|| Error::UnknownLemma(name.to_string()))?;
    run_suite(name, *gen, *check, trials, seed)
}

fn field(p: u32, n: usize) -> GroundField {
    let names = ["a", "b", "c", "d", "e"];
    GroundField::new(p, &names[..n]).expect("valid field")
}

fn pass() -> Result<Outcome> {
    Ok(Outcome::Pass(None))
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<Outcome> {
    Ok(if cond { Outcome::Pass(None) } else { Outcome::Fail(msg()) })
}

fn is_square(x: &FieldElem) -> bool {
    pth_root(x).is_ok()
}

fn form(f: &GroundField, e: &[FieldElem]) -> Result<QuasiForm> {
    QuasiForm::new(f, e.to_vec())
}

/// Nonzero element with at most two terms of degree `<= 1`.
fn sparse(rng: &mut Rng64, f: &GroundField) -> FieldElem {
    FieldElem::from_poly(random::nonzero_poly(rng, f, 1, 2))
}

/// `k` p-independent elements of degree `<= deg`.
fn independent(rng: &mut Rng64, f: &GroundField, k: usize, deg: u32) -> Result<Vec<FieldElem>> {
    loop {
        let v: Vec<FieldElem> = (0..k).map(|_| random::non_pth_power(rng, f, deg)).collect();
        if is_p_independent(f, &v)? {
            return Ok(v);
        }
    }
}

// <1,a,bx^2+aby^2> ≅ (a+(x/y)^2)<1,a,b>

fn gen_3dim_sim(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 3);
    let a = random::non_pth_power(rng, &f, 2);
    let b = random::elem(rng, &f, 2);
    let x = random::elem(rng, &f, 1);
    let y = random::nonzero_elem(rng, &f, 1);
    Ok(Instance { field: f, elems: vec![a, b, x, y], ints: vec![] })
}

fn check_3dim_sim(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let [a, b, x, y] = &i.elems[..] else { unreachable!() };
    let lhs = form(f, &[f.one(), a.clone(), b.mul(&x.pow(2)).add(&a.mul(b).mul(&y.pow(2)))])?;
    let s = a.add(&x.div(y)?.pow(2));
    let rhs = form(f, &[f.one(), a.clone(), b.clone()])?.scale(&s)?;
    expect(lhs.is_isometric(&rhs)?, || "forms are not isometric".into())
}

// a ∈ D(<1,c,bc>) ⇒ <1,c,bc> ≅ (a+s^2)<1,a,b>

fn gen_3dim_rewr(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 3);
    loop {
        let b = random::non_pth_power(rng, &f, 1);
        let c = random::non_pth_power(rng, &f, 1);
        let (x, y, z) = (random::elem(rng, &f, 1), random::elem(rng, &f, 1), random::elem(rng, &f, 1));
        let a = x.pow(2).add(&c.mul(&y.pow(2))).add(&b.mul(&c).mul(&z.pow(2)));
        if !a.is_zero() && !is_square(&a) {
            return Ok(Instance { field: f, elems: vec![a, b, c], ints: vec![] });
        }
    }
}

fn check_3dim_rewr(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let [a, b, c] = &i.elems[..] else { unreachable!() };
    let s = three_dim_rewrite(f, a, b, c)?;
    let lhs = form(f, &[f.one(), c.clone(), b.mul(c)])?;
    let rhs = form(f, &[f.one(), a.clone(), b.clone()])?.scale(&a.add(&s.pow(2)))?;
    expect(lhs.is_isometric(&rhs)?, || "rewrite is not isometric".into())
}

// c ∈ D(<1,b>) ⟺ b ∈ D(<1,c>) ⟺ <1,b> ≅ <1,c>

fn gen_2dim_cong(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 3);
    let b = random::non_pth_power(rng, &f, 2);
    let congruent = rng.gen_bool(0.5);
    let c = if congruent {
        loop {
            let x = random::elem(rng, &f, 1);
            let y = random::nonzero_elem(rng, &f, 1);
            let c = x.pow(2).add(&b.mul(&y.pow(2)));
            if !is_square(&c) {
                break c;
            }
        }
    } else {
        random::non_pth_power(rng, &f, 2)
    };
    Ok(Instance { field: f, elems: vec![b, c], ints: vec![congruent as i64] })
}

fn check_2dim_cong(i: &Instance) -> Result<Outcome> {
    let r = two_dim_congruent(&i.field, &i.elems[0], &i.elems[1])?;
    if i.ints[0] == 1 {
        let fb = form(&i.field, &[i.field.one(), i.elems[0].clone()])?;
        if fb.represents_value(&i.elems[1])? {
            return expect(r, || "constructed congruent pair reported incongruent".into());
        }
    }
    pass()
}

// <1,a^k> isotropic over E ⟺ <1,a^l> isotropic over E ⟺ a^k ∈ E^p ⟺ a^l ∈ E^p

fn gen_2dim_isotropy(rng: &mut Rng64) -> Result<Instance> {
    let p = *[3u32, 5, 7].choose(rng).expect("nonempty");
    let f = field(p, 2);
    let a = if rng.gen_bool(0.5) { f.var(0) } else { random::non_pth_power(rng, &f, 1) };
    let k = rng.gen_range(1..p) as i64;
    let l = rng.gen_range(1..p) as i64;
    let e = if rng.gen_bool(0.5) {
        let j = rng.gen_range(1..p);
        a.pow(j).mul(&random::nonzero_elem(rng, &f, 1).frobenius())
    } else {
        random::non_pth_power(rng, &f, 2)
    };
    Ok(Instance { field: f, elems: vec![a, e], ints: vec![k, l] })
}

fn check_2dim_isotropy(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let (a, e) = (&i.elems[0], &i.elems[1]);
    if a.is_zero() || is_square(a) || e.is_zero() {
        return Err(Error::Precondition("a must lie outside F^p".into()));
    }
    let ext = InsepExtension::new(f, vec![e.clone()])?;
    let ep = Subfield::generated_by(f, std::slice::from_ref(e))?;
    let mut vals = Vec::new();
    for &k in &i.ints[..2] {
        let ak = a.pow(k as u32);
        vals.push(defect_over(&form(f, &[f.one(), ak.clone()])?, &ext)? > 0);
        vals.push(ep.contains(&ak)?);
    }
    expect(vals.iter().all(|v| *v == vals[0]), || format!("conditions disagree: {vals:?}"))
}

// <1,a^k> ~ <1,a^l> ⟺ k ≡ ±l

fn gen_2dim_similarity(rng: &mut Rng64) -> Result<Instance> {
    let p = *[3u32, 5, 7].choose(rng).expect("nonempty");
    let f = field(p, 1);
    let k = rng.gen_range(1..p) as i64;
    let l = rng.gen_range(1..p) as i64;
    Ok(Instance { elems: vec![f.var(0)], field: f, ints: vec![k, l] })
}

fn check_2dim_similarity(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let a = &i.elems[0];
    let (k, l) = (i.ints[0], i.ints[1]);
    let x = form(f, &[f.one(), a.pow(k as u32)])?;
    let y = form(f, &[f.one(), a.pow(l as u32)])?;
    let sim = is_similar(&x, &y)?.is_some();
    expect(sim == two_dim_similar(k, l, f.p())?, || format!("k={k} l={l}: is_similar gives {sim}"))
}

// φ ⊗ <<x>> isotropic ⟺ x ∈ N(φ) for quasi-Pfister forms and neighbors

fn gen_adding_slot(rng: &mut Rng64) -> Result<Instance> {
    let p = *[2u32, 3].choose(rng).expect("nonempty");
    let f = field(p, 3);
    let r = rng.gen_range(1..=2usize);
    let slots = independent(rng, &f, r, 1)?;
    let basis = Subfield::new(&f, slots.clone())?.monomial_basis().to_vec();
    let lo = p.pow(r as u32 - 1) as usize + 1;
    let k = rng.gen_range(lo..=basis.len());
    let idx = random::subset(rng, basis.len(), k);
    let c = sparse(rng, &f);
    let mut entries: Vec<FieldElem> = idx
        .iter()
        .map(|&j| basis[j].mul(&sparse(rng, &f).frobenius()).mul(&c))
        .collect();
    if entries.len() > 1 {
        let (i, j) = (rng.gen_range(0..entries.len()), rng.gen_range(0..entries.len()));
        if i != j {
            entries[i] = entries[i].add(&entries[j]);
        }
    }
    let in_norm = rng.gen_bool(0.5);
    let x = if in_norm {
        let x = random::in_subfield(rng, &f, &slots, 1);
        if x.is_zero() {
            slots[0].clone()
        } else {
            x
        }
    } else {
        sparse(rng, &f)
    };
    entries.push(x);
    Ok(Instance { field: f, elems: entries, ints: vec![in_norm as i64] })
}

fn check_adding_slot(i: &Instance) -> Result<Outcome> {
    let n = i.elems.len() - 1;
    let phi = form(&i.field, &i.elems[..n])?;
    let x = &i.elems[n];
    let iso = pfister_slot_isotropy(&phi, x)?;
    if i.ints[0] == 1 && norm_field(&phi)?.contains(x)? {
        return expect(iso, || "slot from the norm field left the form anisotropic".into());
    }
    pass()
}

// π1 ⊆ π2 ⟺ N(π1) ⊆ N(π2) ⟺ π2 ≅ π1 ⊗ γ

fn gen_pf_divisibility(rng: &mut Rng64) -> Result<Instance> {
    let p = *[2u32, 3].choose(rng).expect("nonempty");
    let f = field(p, 3);
    let s = rng.gen_range(1..=2usize);
    let b = independent(rng, &f, s, 1)?;
    let a = if rng.gen_bool(0.5) {
        let r = rng.gen_range(1..=s);
        let mut a = Vec::new();
        for _ in 0..20 {
            let x = random::in_subfield(rng, &f, &b, 0);
            if x.is_zero() || is_square(&x) {
                continue;
            }
            let mut cand = a.clone();
            cand.push(x);
            if is_p_independent(&f, &cand)? {
                a = cand;
            }
            if a.len() == r {
                break;
            }
        }
        if a.is_empty() {
            a.push(b[0].clone());
        }
        a
    } else {
        let r = rng.gen_range(1..=2usize);
        independent(rng, &f, r, 1)?
    };
    let na = a.len() as i64;
    let mut elems = a;
    elems.extend(b);
    Ok(Instance { field: f, elems, ints: vec![na] })
}

fn check_pf_divisibility(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let na = i.ints[0] as usize;
    let (a, b) = i.elems.split_at(na);
    if !is_p_independent(f, a)? || !is_p_independent(f, b)? {
        return Err(Error::Precondition("slots must be p-independent".into()));
    }
    let pi1 = QuasiForm::quasi_pfister(f, a)?;
    let pi2 = QuasiForm::quasi_pfister(f, b)?;
    let sub = pi1.is_subform_of(&pi2)?;
    let nf = Subfield::generated_by(f, b)?.contains_field(&Subfield::generated_by(f, a)?)?;
    let mut gamma: Vec<FieldElem> = Vec::new();
    let mut span: Vec<FieldElem> = Vec::new();
    for e in pi2.entries() {
        if !span.is_empty() && f.in_span(e, &span)? {
            continue;
        }
        gamma.push(e.clone());
        span.extend(pi1.entries().iter().map(|m| m.mul(e)));
    }
    let div = pi1.tensor(&form(f, &gamma)?)?.is_isometric(&pi2)?;
    expect(sub == nf && nf == div, || format!("subform {sub}, norm fields {nf}, divisible {div}"))
}

// i(φ_E) for φ = π ⊥ dσ splits by whether d ∈ D_E(π)

fn gen_isotropy_indices(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 4);
    loop {
        let r = rng.gen_range(1..=2usize);
        let slots = independent(rng, &f, r, 1)?;
        let k = rng.gen_range(1..=(1usize << r).min(3));
        let sigma: Vec<FieldElem> = (0..k).map(|_| random::in_subfield(rng, &f, &slots, 0)).collect();
        let d = random::nonzero_elem(rng, &f, 1);
        let pi = QuasiForm::quasi_pfister(&f, &slots)?;
        let s = QuasiForm::new(&f, sigma.clone())?;
        if sigma.iter().any(|x| x.is_zero()) || !s.is_anisotropic()? {
            continue;
        }
        if !pi.orth_sum(&s.scale(&d)?)?.is_anisotropic()? {
            continue;
        }
        let mut mask = 0;
        while mask == 0 {
            mask = rng.gen_range(0..16i64);
        }
        let mut elems = slots;
        elems.extend(sigma);
        elems.push(d);
        return Ok(Instance { field: f, elems, ints: vec![r as i64, k as i64, mask] });
    }
}

fn check_isotropy_indices(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let (r, k, mask) = (i.ints[0] as usize, i.ints[1] as usize, i.ints[2]);
    let slots = &i.elems[..r];
    let sigma = form(f, &i.elems[r..r + k])?;
    let d = &i.elems[r + k];
    if !is_p_independent(f, slots)? {
        return Err(Error::Precondition("slots must be p-independent".into()));
    }
    let pi = QuasiForm::quasi_pfister(f, slots)?;
    if d.is_zero() || !sigma.is_subform_of(&pi)? {
        return Err(Error::Precondition("σ must be a subform of π".into()));
    }
    let phi = pi.orth_sum(&sigma.scale(d)?)?;
    if !phi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    let vars: Vec<usize> = (0..4).filter(|j| mask & (1 << j) != 0).collect();
    let (pe, se, fe) = (substitute_roots(&pi, &vars)?, substitute_roots(&sigma, &vars)?, substitute_roots(&phi, &vars)?);
    let ext = InsepExtension::of_variables(f, &vars);
    let in_d = pi.tensor(&ext.pth_power_field()?.pfister_form())?.represents_value(d)?;
    let (ip, is, iphi) = (pe.defect()?, se.defect()?, fe.defect()?);
    let expected = if in_d { ip + k } else { ip + is };
    if iphi != expected {
        return Ok(Outcome::Fail(format!("defect {iphi}, expected {expected} (d in D_E(π): {in_d})")));
    }
    let de = FieldElem::inflate(d, &(0..4).map(|j| if vars.contains(&j) { 2 } else { 1 }).collect::<Vec<_>>());
    let mut target = pe.anisotropic_part()?;
    if !in_d {
        target = target.orth_sum(&se.anisotropic_part()?.scale(&de)?)?;
    }
    expect(fe.anisotropic_part()?.is_isometric(&target)?, || "anisotropic parts differ".into())
}

// K^p ⊆ G(τ), φ_K ≅ ψ_K anisotropic ⇒ φ ⊗ τ ≅ ψ ⊗ τ

fn gen_multiples(rng: &mut Rng64) -> Result<Instance> {
    let p = *[2u32, 3].choose(rng).expect("nonempty");
    let f = field(p, 4);
    let g: Vec<FieldElem> = if rng.gen_bool(0.3) { vec![f.var(0), f.var(1)] } else { vec![f.var(0)] };
    let ext = InsepExtension::new(&f, g.clone())?;
    let tk = rng.gen_range(1..=2usize);
    let tau: Vec<FieldElem> = loop {
        let t: Vec<FieldElem> = (0..tk).map(|_| sparse(rng, &f)).collect();
        if QuasiForm::quasi_pfister(&f, &g)?.tensor(&form(&f, &t)?)?.is_anisotropic()? {
            break t;
        }
    };
    let m = rng.gen_range(2..=3usize);
    let phi: Vec<FieldElem> = loop {
        let v: Vec<FieldElem> = (0..m).map(|_| sparse(rng, &f)).collect();
        if defect_by_derivations(&form(&f, &v)?, &ext)? == 0 {
            break v;
        }
    };
    let mut psi = phi.clone();
    for _ in 0..3 {
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let mut k = random::in_subfield(rng, &f, &g, 0);
        if k.is_zero() {
            k = f.one();
        }
        match rng.gen_range(0..3) {
            0 => psi.swap(i, j),
            1 => psi[i] = psi[i].mul(&k),
            _ => psi[i] = psi[i].add(&k.mul(&psi[j])),
        }
    }
    let ints = vec![g.len() as i64, tk as i64, m as i64];
    let mut elems = g;
    elems.extend(tau);
    elems.extend(phi);
    elems.extend(psi);
    Ok(Instance { field: f, elems, ints })
}

fn check_multiples(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let (ng, nt, m) = (i.ints[0] as usize, i.ints[1] as usize, i.ints[2] as usize);
    let g = &i.elems[..ng];
    let tau = QuasiForm::quasi_pfister(f, g)?.tensor(&form(f, &i.elems[ng..ng + nt])?)?;
    let phi = form(f, &i.elems[ng + nt..ng + nt + m])?;
    let psi = form(f, &i.elems[ng + nt + m..])?;
    let ext = InsepExtension::new(f, g.to_vec())?;
    let kp = ext.pth_power_field()?;
    if !tau.is_anisotropic()? || !similarity_group(&tau)?.contains_field(&kp)? {
        return Err(Error::Precondition("K^p must lie in G(τ)".into()));
    }
    let pf = kp.pfister_form();
    if defect_over(&phi, &ext)? != 0
        || defect_over(&psi, &ext)? != 0
        || !phi.tensor(&pf)?.is_isometric(&psi.tensor(&pf)?)?
    {
        return Err(Error::Precondition("φ and ψ must be anisotropic and isometric over K".into()));
    }
    expect(phi.tensor(&tau)?.is_isometric(&psi.tensor(&tau)?)?, || "φ⊗τ and ψ⊗τ differ".into())
}

// n + 1 <= dim φ_an <= p^n for ndeg φ = p^n

fn gen_norm_bounds(rng: &mut Rng64) -> Result<Instance> {
    let p = *[2u32, 3, 5].choose(rng).expect("nonempty");
    let f = field(p, if p == 2 { 3 } else { 2 });
    let n = rng.gen_range(1..=5usize);
    let elems = (0..n).map(|_| random::elem(rng, &f, 2)).collect();
    Ok(Instance { field: f, elems, ints: vec![] })
}

fn check_norm_bounds(i: &Instance) -> Result<Outcome> {
    let an = form(&i.field, &i.elems)?.anisotropic_part()?;
    if an.dim() == 0 {
        return pass();
    }
    let n = norm_field(&an)?.exponent();
    let d = an.dim();
    expect(n < d && d as u64 <= (i.field.p() as u64).pow(n as u32), || format!("dim {d}, exponent {n}"))
}

// Minimal forms: similar pairs are never separated, non-similar pairs are never certified.

fn small_budget() -> Budget {
    Budget { samples: 8, degree: 1, ..Budget::default() }
}

fn gen_minimal_vishik(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 4);
    let n = rng.gen_range(2..=3usize);
    let a = independent(rng, &f, n, 1)?;
    let mut phi = vec![f.one()];
    phi.extend(a.iter().cloned());
    let similar = rng.gen_bool(0.5);
    let psi: Vec<FieldElem> = if similar {
        let c = random::nonzero_elem(rng, &f, 1);
        let mut v: Vec<FieldElem> = phi.iter().map(|x| x.mul(&c)).collect();
        let j = rng.gen_range(1..v.len());
        v[0] = v[0].add(&v[j]);
        v
    } else {
        loop {
            let x = random::in_subfield(rng, &f, &a, 0);
            let mut v = phi[..n].to_vec();
            v.push(x);
            if !v.last().expect("nonempty").is_zero() && is_p_independent(&f, &v[1..])? {
                break v;
            }
        }
    };
    let mut elems = phi;
    elems.extend(psi);
    Ok(Instance { field: f, elems, ints: vec![n as i64 + 1] })
}

fn check_minimal_vishik(i: &Instance) -> Result<Outcome> {
    let f = &i.field;
    let d = i.ints[0] as usize;
    let phi = form(f, &i.elems[..d])?;
    let psi = form(f, &i.elems[d..])?;
    if !phi.is_anisotropic()? || !psi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    let sim = is_similar(&phi, &psi)?.is_some();
    let v = weak_vishik(&phi, &psi, &small_budget())?;
    if sim {
        expect(v.status != VishikStatus::Inequivalent, || "similar minimal forms reported inequivalent".into())
    } else {
        expect(v.status != VishikStatus::CertifiedEquivalent, || "non-similar minimal forms certified".into())
    }
}

// φ = π ⊥ bσ, ψ ≅ π ⊥ b(eσ) with e ∈ N(π)

fn gen_spn_pair(rng: &mut Rng64) -> Result<Instance> {
    let f = field(2, 4);
    loop {
        let r = rng.gen_range(1..=2usize);
        let mut vars = [0usize, 1, 2];
        vars.shuffle(rng);
        let slots: Vec<FieldElem> = vars[..r].iter().map(|&j| f.var(j)).collect();
        let b = f.var(3).mul(&random::nonzero_elem(rng, &f, 1).frobenius());
        let k = rng.gen_range(1..=(1usize << r).min(3));
        let sigma: Vec<FieldElem> = (0..k).map(|_| random::in_subfield(rng, &f, &slots, 0)).collect();
        let e = random::in_subfield(rng, &f, &slots, 0);
        if e.is_zero() || sigma.iter().any(|x| x.is_zero()) || !form(&f, &sigma)?.is_anisotropic()? {
            continue;
        }
        let tail: Vec<FieldElem> = sigma
            .iter()
            .map(|s| b.mul(&e).mul(s).add(&random::in_subfield(rng, &f, &slots, 0)))
            .collect();
        let mut elems = slots;
        elems.push(b);
        elems.extend(sigma);
        elems.push(e);
        elems.extend(tail);
        return Ok(Instance { field: f, elems, ints: vec![r as i64, k as i64] });
    }
}

fn spn_parts(i: &Instance) -> Result<(QuasiForm, FieldElem, QuasiForm, QuasiForm, QuasiForm)> {
    let f = &i.field;
    let (r, k) = (i.ints[0] as usize, i.ints[1] as usize);
    let slots = &i.elems[..r];
    let b = i.elems[r].clone();
    let sigma = form(f, &i.elems[r + 1..r + 1 + k])?;
    let tail = form(f, &i.elems[r + 2 + k..])?;
    if !is_p_independent(f, slots)? || b.is_zero() {
        return Err(Error::Precondition("slots must be p-independent".into()));
    }
    let pi = QuasiForm::quasi_pfister(f, slots)?;
    let phi = pi.orth_sum(&sigma.scale(&b)?)?;
    let psi = pi.orth_sum(&tail)?;
    if !phi.is_anisotropic()? || !psi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    Ok((pi, b, sigma, phi, psi))
}

fn check_spn_similarity(i: &Instance) -> Result<Outcome> {
    let (pi, b, sigma, phi, psi) = spn_parts(i)?;
    let rho = spn_decompose_with_pfister(&psi, &pi, &b)?;
    if is_similar(&sigma, &rho)?.is_none() {
        return Ok(Outcome::Fail("σ and the recovered ρ are not similar".into()));
    }
    if is_similar(&phi, &psi)?.is_none() {
        return Ok(Outcome::Fail("φ and ψ are not similar".into()));
    }
    let v = weak_vishik(&phi, &psi, &small_budget())?;
    expect(v.status == VishikStatus::CertifiedEquivalent, || format!("weak Vishik verdict {:?}", v.status))
}

fn check_spn_norm_field(i: &Instance) -> Result<Outcome> {
    let (pi, b, sigma, phi, psi) = spn_parts(i)?;
    let rho = spn_decompose_with_pfister(&psi, &pi, &b)?;
    if weak_vishik(&phi, &psi, &small_budget())?.status == VishikStatus::Inequivalent {
        return Err(Error::Precondition("the pair is not weakly Vishik equivalent".into()));
    }
    expect(norm_field(&sigma)?.same_as(&norm_field(&rho)?)?, || "norm fields of σ and ρ differ".into())
}

// Generic special neighbors, rescaled and rebased, have the tabulated pattern.

fn gen_fsp<const D: usize>(rng: &mut Rng64) -> Result<Instance> {
    let phi = generic_special_qpn(D)?;
    let f = phi.field().clone();
    let mut e = phi.entries().to_vec();
    let c = random::nonzero_elem(rng, &f, 1);
    for x in e.iter_mut() {
        *x = x.mul(&c);
    }
    let i = rng.gen_range(0..e.len());
    let j = (i + rng.gen_range(1..e.len())) % e.len();
    e[i] = e[i].add(&e[j].mul(&random::nonzero_elem(rng, &f, 1).frobenius()));
    Ok(Instance { field: f, elems: e, ints: vec![D as i64] })
}

fn check_fsp(i: &Instance) -> Result<Outcome> {
    let phi = form(&i.field, &i.elems)?;
    if !phi.is_anisotropic()? {
        return Err(Error::Isotropic);
    }
    let got = insep_splitting_pattern(&phi, &Budget::default())?;
    let want = fsp_special_qpn(i.ints[0] as usize)?;
    if got == want {
        Ok(Outcome::Pass(Some(got.into_iter().collect())))
    } else {
        Ok(Outcome::Fail(format!("pattern {got:?}, expected {want:?}")))
    }
}
