//! Command implementations behind the `flowctl` binary.

pub mod doc;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use linflow::algflow::{FiniteSubspace, HalgOptions};
use linflow::duality::{self, BridgeBounds};
use linflow::lattice::{self, ModularLattice};
use linflow::polymat::{torsion_submodule, Poly};
use linflow::report::EntropyReport;
use linflow::topflow::{SearchBounds, Strategy};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::doc::{Flow, FlowDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Parse(String),
    Unsupported(String),
    Internal(String),
}

impl Failure {
    /// A library error raised while reading a document.
    pub fn parse(e: linflow::Error) -> Self {
        match e {
            linflow::Error::Unsupported(m) | linflow::Error::CapExceeded(m) => {
                Failure::Unsupported(m)
            }
            e => Failure::Parse(e.to_string()),
        }
    }

    /// A library error raised during a computation.
    pub fn internal(e: linflow::Error) -> Self {
        match e {
            linflow::Error::Unsupported(m) | linflow::Error::CapExceeded(m) => {
                Failure::Unsupported(m)
            }
            e => Failure::Internal(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Unsupported(_) => EXIT_UNSUPPORTED,
            Failure::Internal(_) => EXIT_INVARIANT,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Parse(_) => "parse",
            Failure::Unsupported(_) => "unsupported",
            Failure::Internal(_) => "internal",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::Unsupported(m) => write!(f, "unsupported: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Entropy,
    Pinsker,
    Bernoulli,
    Bridge,
    Lattice,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::Pinsker => "pinsker",
            Command::Bernoulli => "bernoulli",
            Command::Bridge => "bridge",
            Command::Lattice => "lattice",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub horizon: usize,
    pub max_level: usize,
    pub strategy: Strategy,
    pub max_witnesses: usize,
    pub levels: usize,
    pub exhaustive: bool,
    /// Seed for sampled searches; `None` keeps every search exhaustive in
    /// lexicographic order.
    pub seed: Option<u64>,
}

impl Default for Options {
    fn default() -> Self {
        let b = SearchBounds::default();
        Options {
            horizon: b.horizon,
            max_level: b.max_level,
            strategy: Strategy::Both,
            max_witnesses: b.k_max,
            levels: 8,
            exhaustive: false,
            seed: None,
        }
    }
}

impl Options {
    fn search(&self) -> SearchBounds {
        SearchBounds {
            max_level: self.max_level,
            horizon: self.horizon,
            k_max: self.max_witnesses,
            seed: self.seed,
            ..SearchBounds::default()
        }
    }

    fn to_json(self) -> Value {
        json!({
            "horizon": self.horizon,
            "max_level": self.max_level,
            "strategy": strategy_name(self.strategy),
            "max_witnesses": self.max_witnesses,
            "levels": self.levels,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
        })
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Structural => "structural",
        Strategy::Witness => "witness",
        Strategy::Both => "both",
    }
}

/// Result payload and named verdicts of one command on one flow.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub verdicts: BTreeMap<String, bool>,
}

fn poly_json(p: &Poly) -> Value {
    json!(p.coeffs())
}

fn report_json(r: &EntropyReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

pub fn run(cmd: Command, flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    match cmd {
        Command::Entropy => entropy(flow, opts),
        Command::Pinsker => pinsker(flow, opts),
        Command::Bernoulli => bernoulli(flow, opts),
        Command::Bridge => bridge(flow, opts),
        Command::Lattice => lattice_cmd(flow, opts),
    }
}

fn entropy(flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    let mut result = serde_json::Map::new();
    let mut exact = Vec::new();
    if let Some(alg) = flow.algebraic() {
        let ent = alg.ent_alg();
        let check = alg
            .h_alg(
                &FiniteSubspace::new(alg.generators()),
                HalgOptions::default(),
            )
            .map_err(Failure::internal)?;
        exact.push(ent.value);
        if check.is_exact() {
            exact.push(check.value);
        }
        result.insert("algebraic".into(), report_json(&ent));
        result.insert("trajectory_check".into(), report_json(&check));
    }
    let top = flow.topological()?;
    let star = top
        .ent_star(opts.strategy, &opts.search())
        .map_err(Failure::internal)?;
    for r in [&star.structural, &star.witness].into_iter().flatten() {
        if r.is_exact() {
            exact.push(r.value);
        }
    }
    let value = match flow {
        Flow::Profinite(_) => star
            .structural
            .as_ref()
            .filter(|r| r.is_exact())
            .or(star.witness.as_ref())
            .or(star.structural.as_ref())
            .map(|r| r.value),
        _ => exact.first().copied(),
    };
    result.insert("value".into(), json!(value));
    if let Some(s) = &star.structural {
        result.insert("structural".into(), report_json(s));
    }
    if let Some(w) = &star.witness {
        result.insert("witness".into(), report_json(w));
    }
    let mut verdicts = BTreeMap::new();
    verdicts.insert(
        "pipelines_agree".into(),
        exact.windows(2).all(|w| w[0] == w[1]),
    );
    Ok(Outcome {
        result: Value::Object(result),
        verdicts,
    })
}

fn pinsker(flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    let mut result = serde_json::Map::new();
    let mut verdicts = BTreeMap::new();
    match flow {
        Flow::Module(w) => {
            let alg = flow.algebraic().unwrap();
            let tors = torsion_submodule(w);
            let ent = alg.ent_alg();
            let cpa = alg.cpa_factor().map_err(Failure::internal)?.ent_alg();
            result.insert(
                "algebraic".into(),
                json!({
                    "torsion_factors": tors.factors.iter().map(poly_json).collect::<Vec<_>>(),
                    "torsion_dim": tors.k_dim(),
                    "embedding": tors.embedding.iter()
                        .map(|v| v.iter().map(poly_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "ent": report_json(&ent),
                    "ent_cpa_factor": report_json(&cpa),
                    "is_cpa": alg.is_cpa(),
                    "pinsker_is_whole": ent.value.is_zero(),
                }),
            );
            verdicts.insert("ent_equals_cpa_factor".into(), ent.value == cpa.value);
            let b = duality::theorem_b_check(w, opts.levels).map_err(Failure::internal)?;
            verdicts.insert("theorem_b".into(), b.holds());
        }
        Flow::FinDim(a) => {
            result.insert(
                "algebraic".into(),
                json!({
                    "pinsker_dim": a.rows(),
                    "pinsker_is_whole": true,
                    "ent": report_json(&flow.algebraic().unwrap().ent_alg()),
                }),
            );
        }
        Flow::Profinite(_) => {}
    }
    let top = flow.topological()?;
    let dp = top.d_plus().map_err(Failure::internal)?;
    let pf = top.pinsker_factor().map_err(Failure::internal)?;
    let structural = |f: &linflow::topflow::ProfiniteFlow| -> Result<EntropyReport, Failure> {
        let s = f
            .ent_star(Strategy::Structural, &opts.search())
            .map_err(Failure::internal)?;
        Ok(s.structural.expect("structural pipeline requested"))
    };
    let (whole, part) = (structural(&top)?, structural(&dp.flow)?);
    result.insert(
        "topological".into(),
        json!({
            "level_dims": (0..=opts.levels).map(|k| top.dim(k)).collect::<Vec<_>>(),
            "d_plus_dims": (0..=opts.levels).map(|k| dp.level_subspace(k).dim()).collect::<Vec<_>>(),
            "pinsker_factor_dim": pf.dim(0),
            "ent_star": report_json(&whole),
            "ent_star_d_plus": report_json(&part),
        }),
    );
    verdicts.insert("ent_star_equals_d_plus".into(), whole.value == part.value);
    Ok(Outcome {
        result: Value::Object(result),
        verdicts,
    })
}

fn bernoulli(flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    let top = flow.topological()?;
    let a = top.theorem_a_witnesses(&opts.search());
    let mut witnesses = Vec::new();
    let mut all_verified = true;
    for u in &a.witnesses {
        let conj = top
            .bernoulli_conjugacy(u, opts.horizon)
            .map_err(Failure::internal)?;
        let h = top.h_star(u, opts.horizon);
        all_verified &= conj.verified();
        witnesses.push(json!({
            "open_subspace": u.witness(),
            "h_star": report_json(&h),
            "conjugacy": {
                "level": conj.level,
                "functionals": conj.functionals,
                "e": conj.basis,
                "codim_one": conj.codim_one,
                "theta_isomorphism": conj.theta_isomorphism,
                "shift_commutes": conj.shift_commutes,
                "verified": conj.verified(),
            },
        }));
    }
    let family: Vec<_> = a
        .witnesses
        .iter()
        .map(|u| top.cotrajectory(u, opts.horizon))
        .collect();
    let coind = top.coindependent_check(&family, opts.horizon);
    let mut verdicts = BTreeMap::new();
    verdicts.insert("conjugacy_verified".into(), all_verified);
    verdicts.insert("coindependent".into(), coind.holds);
    Ok(Outcome {
        result: json!({
            "count": report_json(&a.count),
            "remainder": a.remainder.as_ref().map(report_json),
            "witnesses": witnesses,
            "coindependence_checked_up_to": coind.checked_up_to,
        }),
        verdicts,
    })
}

fn bridge(flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    let Flow::Module(w) = flow else {
        return Err(Failure::Unsupported(
            "bridge needs a module document".into(),
        ));
    };
    let bounds = BridgeBounds {
        seed: opts.seed.unwrap_or(0),
        search: opts.search(),
        ..BridgeBounds::default()
    };
    let br = duality::bridge_check(w, &bounds).map_err(Failure::internal)?;
    let tb = duality::theorem_b_check(w, opts.levels).map_err(Failure::internal)?;
    let z = duality::zero_entropy_duality_check(w, &opts.search()).map_err(Failure::internal)?;
    let dual = flow.topological()?;
    let c = lattice::cork(&dual, &opts.search()).map_err(Failure::internal)?;

    let evidence: Vec<Value> = br
        .evidence
        .iter()
        .map(|e| {
            json!({
                "level": e.level,
                "constraints": e.constraints,
                "topological": e.topological,
                "algebraic": e.algebraic,
            })
        })
        .collect();
    let levels: Vec<Value> = tb
        .levels
        .iter()
        .map(|l| json!({"level": l.level, "d_plus_dim": l.d_plus_dim, "annihilator_dim": l.annihilator_dim}))
        .collect();
    let mut verdicts = BTreeMap::new();
    verdicts.insert("bridge_equality".into(), br.values_equal());
    verdicts.insert("per_u_identity".into(), br.evidence_agrees());
    verdicts.insert("theorem_b".into(), tb.holds());
    verdicts.insert(
        "theorem_c".into(),
        c.value == br.structural.value && c.consistent(),
    );
    verdicts.insert("zero_entropy_duality".into(), z.consistent());
    Ok(Outcome {
        result: json!({
            "ent_alg": report_json(&br.ent_alg),
            "ent_star_structural": report_json(&br.structural),
            "ent_star_witness": report_json(&br.witness),
            "cork": {"value": c.value, "status": c.status, "method": c.method},
            "per_u": evidence,
            "d_plus_levels": levels,
            "pinsker_dim": tb.pinsker_dim,
            "torsion_dim": tb.torsion_dim,
        }),
        verdicts,
    })
}

fn lattice_cmd(flow: &Flow, opts: &Options) -> Result<Outcome, Failure> {
    let Flow::FinDim(a) = flow else {
        return Err(Failure::Unsupported(
            "lattice needs a findim document".into(),
        ));
    };
    let l = lattice::invariant_subspaces_of(a).map_err(Failure::internal)?;
    let certificate = lattice::couniform_certificate(&l);
    let mut verdicts = BTreeMap::new();
    let mut result = json!({
        "dim": a.rows(),
        "size": l.size(),
        "elements": l.elements().iter().map(|s| s.basis_vectors()).collect::<Vec<_>>(),
        "couniform": lattice::couniform_elements(&l),
        "certificate": certificate,
    });
    let codi = if opts.exhaustive || certificate.is_none() {
        let d = lattice::dual_goldie_dim(&l);
        let g = lattice::goldie_dim(&l);
        result["goldie_dim"] = json!({"value": g.value, "family": g.family});
        if let Some(c) = &certificate {
            verdicts.insert("certificate_matches_exhaustive".into(), c.len() == d.value);
        }
        json!({"value": d.value, "family": d.family, "method": "exhaustive"})
    } else {
        let c = certificate.clone().unwrap();
        json!({"value": c.len(), "family": c, "method": "couniform_certificate"})
    };
    result["dual_goldie_dim"] = codi;
    let top = flow.topological()?;
    let c = lattice::cork(&top, &opts.search()).map_err(Failure::internal)?;
    result["cork"] = json!({"value": c.value, "status": c.status, "method": c.method});
    verdicts.insert("cork_routes_consistent".into(), c.consistent());
    Ok(Outcome { result, verdicts })
}

/// One `--in` file: path and raw bytes.
pub struct Input {
    pub path: String,
    pub bytes: Vec<u8>,
}

fn process(cmd: Command, input: &Input, opts: &Options) -> (Value, Option<Failure>, bool) {
    let start = Instant::now();
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(&input.bytes)));
    let outcome = std::str::from_utf8(&input.bytes)
        .map_err(|e| Failure::Parse(e.to_string()))
        .and_then(FlowDocument::from_json)
        .and_then(|d| Ok((d.canonical()?, d.parse()?)))
        .and_then(|(doc, flow)| Ok((doc, run(cmd, &flow, opts)?)));
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((doc, out)) => {
            let ok = out.verdicts.values().all(|&v| v);
            let entry = json!({
                "path": input.path,
                "digest": digest,
                "document": doc,
                "result": out.result,
                "verdicts": out.verdicts,
                "timing": {"seconds": seconds},
            });
            (entry, None, ok)
        }
        Err(f) => {
            let entry = json!({
                "path": input.path,
                "digest": digest,
                "error": {"kind": f.kind(), "message": f.to_string()},
                "timing": {"seconds": seconds},
            });
            (entry, Some(f), true)
        }
    }
}

/// Runs `cmd` on every input, `jobs` at a time, and assembles the report.
/// Returns the report and the exit code.
pub fn execute(
    cmd: Command,
    inputs: &[Input],
    opts: &Options,
    jobs: usize,
) -> (Value, i32, Vec<Failure>) {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let entries: Vec<(Value, Option<Failure>, bool)> =
        pool.install(|| inputs.par_iter().map(|i| process(cmd, i, opts)).collect());

    let mut verdicts: BTreeMap<String, bool> = BTreeMap::new();
    for (e, _, _) in &entries {
        if let Some(v) = e.get("verdicts").and_then(Value::as_object) {
            for (k, b) in v {
                let b = b.as_bool().unwrap_or(false);
                verdicts
                    .entry(k.clone())
                    .and_modify(|x| *x &= b)
                    .or_insert(b);
            }
        }
    }
    let failures: Vec<Failure> = entries.iter().filter_map(|(_, f, _)| f.clone()).collect();
    let verdicts_hold = entries.iter().all(|(_, _, ok)| *ok);
    let code = failures
        .iter()
        .map(Failure::exit_code)
        .chain((!verdicts_hold).then_some(EXIT_INVARIANT))
        .max()
        .unwrap_or(EXIT_OK);
    let report = json!({
        "tool": "flowctl",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "bounds": opts.to_json(),
        "inputs": entries.into_iter().map(|(e, _, _)| e).collect::<Vec<_>>(),
        "verdicts": verdicts,
        "timing": {"seconds": start.elapsed().as_secs_f64()},
    });
    (report, code, failures)
}

/// Drops every `timing` field, leaving the deterministic part of a report.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("timing");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
