//! Command-line driver. [`run`] does all the work and returns the text to
//! print together with the process exit status; the binary only parses
//! arguments and writes the result.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arrangement::{
    intersection_lattice, maximal_chains, parse_arrangement, restriction, Arrangement,
};
use crate::error::{Error, Result};
use crate::pluecker::{adjoint_table_json, k_adjoint};
use crate::sampling::{
    parse_subspace, random_samples, structured_samples, subspace_to_text, Sample,
};
use crate::strata::{classify_restrictions, compare_partitions, label_all, CheckTally, Stratifier};

/// Exit status for a passing run.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage and input errors.
pub const EXIT_INPUT: i32 = 1;
/// Exit status when a verification finds a counterexample.
pub const EXIT_COUNTEREXAMPLE: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    Lattice,
    Adjoint {
        k: usize,
    },
    Label {
        k: usize,
        subspace: PathBuf,
    },
    Verify {
        k: usize,
        samples: usize,
        include_flats: bool,
    },
    Restrict {
        subspace: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub arrangement: PathBuf,
    pub seed: u64,
    pub bound: u64,
    pub chain_cap: usize,
    pub lattice_cap: usize,
    /// Worker threads for labeling. Never affects output.
    #[serde(skip)]
    pub jobs: usize,
    /// Where to write the report; `None` returns it as output.
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// JSON instead of text for `lattice`, `adjoint` and `restrict`.
    #[serde(skip)]
    pub json: bool,
}

impl RunConfig {
    pub fn new(command: Command, arrangement: impl Into<PathBuf>) -> Self {
        Self {
            command,
            arrangement: arrangement.into(),
            seed: 0,
            bound: 3,
            chain_cap: crate::arrangement::DEFAULT_CHAIN_CAP,
            lattice_cap: crate::matroid::MAX_LATTICE_SIZE,
            jobs: 1,
            output: None,
            json: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    /// Text for standard output.
    pub output: String,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_k(a: &Arrangement, k: usize) -> Result<()> {
    if k > a.ambient_dim() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds n = {}",
            a.ambient_dim()
        )));
    }
    Ok(())
}

/// SHA-256 of the canonical text form of the arrangement.
pub fn arrangement_digest(a: &Arrangement) -> String {
    hex::encode(Sha256::digest(a.to_text().as_bytes()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    if config.bound == 0 {
        return Err(Error::InvalidArgument("bound must be at least 1".into()));
    }
    let a = parse_arrangement(&read(&config.arrangement)?)?;
    let (status, text) = match &config.command {
        Command::Lattice => (EXIT_OK, lattice_report(config, &a)?),
        Command::Adjoint { k } => (EXIT_OK, adjoint_report(config, &a, *k)?),
        Command::Label { k, subspace } => (EXIT_OK, label_report(config, &a, *k, subspace)?),
        Command::Restrict { subspace } => (EXIT_OK, restrict_report(config, &a, subspace)?),
        Command::Verify {
            k,
            samples,
            include_flats,
        } => {
            let report = verify_report(config, &a, *k, *samples, *include_flats)?;
            let pass = report["pass"].as_bool().expect("pass is a bool");
            let status = if pass { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
            (status, pretty(&report))
        }
    };
    match &config.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(Outcome {
                status,
                output: String::new(),
            })
        }
        None => Ok(Outcome {
            status,
            output: text,
        }),
    }
}

fn lattice_report(config: &RunConfig, a: &Arrangement) -> Result<String> {
    let l = intersection_lattice(a);
    let chains = maximal_chains(&l, config.chain_cap)?;
    if config.json {
        let ranks: Vec<Value> = l
            .by_rank()
            .iter()
            .map(|flats| {
                Value::Array(
                    flats
                        .iter()
                        .map(|&x| {
                            let f = l.flat(x);
                            json!({
                                "generators": f.generators.iter().map(|g| g + 1).collect::<Vec<_>>(),
                                "dim": f.dim(),
                                "basis": f.subspace.integer_rows().iter()
                                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        return Ok(pretty(&json!({
            "n": l.ambient_dim(),
            "rank": l.rank(),
            "flats": ranks,
            "chains": chains.len(),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}, rank = {}, flats = {}",
        l.ambient_dim(),
        l.rank(),
        l.len()
    );
    for (r, flats) in l.by_rank().iter().enumerate() {
        let _ = writeln!(out, "rank {r}:");
        for &x in flats {
            let f = l.flat(x);
            let _ = writeln!(out, "  {} dim {}: {}", f.label(), f.dim(), f.subspace);
        }
    }
    let _ = writeln!(out, "maximal chains: {}", chains.len());
    Ok(out)
}

fn adjoint_report(config: &RunConfig, a: &Arrangement, k: usize) -> Result<String> {
    check_k(a, k)?;
    let l = intersection_lattice(a);
    let hs = k_adjoint(&l, k)?;
    let table = adjoint_table_json(a.ambient_dim(), k, &hs);
    if config.json {
        return Ok(pretty(&table));
    }
    let mut out = String::new();
    let subsets: Vec<String> = table["subsets"]
        .as_array()
        .expect("array")
        .iter()
        .map(|s| {
            let parts: Vec<String> = s
                .as_array()
                .expect("array")
                .iter()
                .map(|x| x.to_string())
                .collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let _ = writeln!(
        out,
        "A^({k}): {} hyperplanes in {} coordinates",
        hs.len(),
        subsets.len()
    );
    let _ = writeln!(out, "coordinates: {}", subsets.join(" "));
    for h in &hs {
        let coeffs: Vec<String> = h.coeffs.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}: {}", h.source_flat.label(), coeffs.join(" "));
    }
    Ok(out)
}

fn label_report(config: &RunConfig, a: &Arrangement, k: usize, path: &PathBuf) -> Result<String> {
    check_k(a, k)?;
    let u = parse_subspace(&read(path)?)?;
    let s = Stratifier::new(a, k, config.chain_cap)?;
    let labels = s.labels(&u)?;
    Ok(pretty(&json!({
        "basis": basis_json(&u),
        "i": labels.adjoint.i,
        "defect": basis_json(&s.defect(&u)?),
        "labels": s.labels_json(&labels),
    })))
}

fn restrict_report(config: &RunConfig, a: &Arrangement, path: &PathBuf) -> Result<String> {
    let u = parse_subspace(&read(path)?)?;
    let r = restriction(a, &u)?;
    if config.json {
        return Ok(pretty(&json!({
            "basis": basis_json(&u),
            "n": r.ambient_dim(),
            "normals": r.normals().iter()
                .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# basis of U");
    for line in subspace_to_text(&u).lines().skip(1) {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str(&r.to_text());
    Ok(out)
}

fn basis_json(u: &crate::exactlin::Subspace) -> Value {
    Value::Array(
        (0..u.dim())
            .map(|r| {
                Value::Array(
                    u.basis()
                        .row(r)
                        .iter()
                        .map(|x| Value::from(x.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// The `verify` report for an already parsed arrangement. `config.command`
/// is echoed but not consulted.
pub fn verify_report(
    config: &RunConfig,
    a: &Arrangement,
    k: usize,
    count: usize,
    include_flats: bool,
) -> Result<Value> {
    check_k(a, k)?;
    let s = Stratifier::new(a, k, config.chain_cap)?.with_lattice_cap(config.lattice_cap);
    let mut samples: Vec<Sample> =
        random_samples(a.ambient_dim(), k, count, config.bound, config.seed)?;
    if include_flats {
        samples.extend(structured_samples(
            s.lattice(),
            k,
            config.bound,
            config.seed,
        )?);
    }
    let subspaces: Vec<_> = samples.iter().map(|x| x.subspace.clone()).collect();
    let labels = label_all(&s, &subspaces, config.jobs)?;
    let equivalence = compare_partitions(&s, &labels);
    let classification = classify_restrictions(&s, &subspaces, &labels)?;

    let mut direct_sum = CheckTally::default();
    let mut basis = CheckTally::default();
    for u in &subspaces {
        direct_sum.merge(s.check_direct_sum_identity(u)?);
        basis.merge(s.check_basis_identity(u)?);
    }
    let checks_pass = direct_sum.all_agree() && basis.all_agree();

    let sample_json: Vec<Value> = samples
        .iter()
        .zip(&labels)
        .enumerate()
        .map(|(index, (sample, l))| {
            json!({
                "index": index,
                "source": sample.source,
                "basis": basis_json(&sample.subspace),
                "labels": s.labels_json(l),
            })
        })
        .collect();
    let p = &equivalence.partitions;
    let pass = equivalence.pass && classification.pass && checks_pass;
    Ok(json!({
        "config": config,
        "arrangement_digest": arrangement_digest(a),
        "lattice": { "flats": s.lattice().len(), "rank": s.lattice().rank(), "chains": s.chains().len() },
        "strata": { "matroid": p.matroid.len(), "adjoint": p.adjoint.len(), "schubert": p.schubert.len() },
        "samples": sample_json,
        "partitions": p,
        "verdicts": {
            "equivalence": equivalence.verdicts,
            "classification": classification,
        },
        "checks": { "direct_sum": direct_sum, "basis": basis },
        "witnesses": equivalence.witnesses,
        "pass": pass,
    }))
}
