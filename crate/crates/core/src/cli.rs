//! The `ccr` command-line front end.
//!
//! Every verb prints one JSON document (or a plain-text rendering of it) on
//! standard output. Failures print `{"code", "message", "witness"}` and exit
//! with status 1.

use std::ffi::OsString;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{
    self, center_basis, commutant_basis, conditional_expectation, hom_phase, induced_hom,
    is_complemented, is_full_matrix, l2_inner, tensor_split, trace, AlgebraElement,
};
use crate::constructions::{
    self, chain_change_of_generators, chain_triple, check_f_conditions, complementation_contrast,
    nonuniqueness_fragment, pairing_triple, phi_matrix, recover_order, substitute_and_verify, Formula,
};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::limits;
use crate::representation::{check_relations, operator_norm, regular_rep, witness_rep, Combine};
use crate::triple::{check_morphism, validate_table, CcrMorphism, CcrTriple, TripleJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "ccr", version, about = "Exact computations in finite twisted group algebras")]
pub struct Cli {
    /// Enumeration cap on group orders.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Use the uncorrected substitution formulas for h and g'.
    #[arg(long, global = true)]
    pub literal_formulas: bool,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RepKind {
    Witness,
    WitnessDirectSum,
    Regular,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the defining conditions of a triple.
    Validate { triple: String },
    /// Dimension of the algebra.
    Dim { triple: String },
    Mul { triple: String, a: String, b: String },
    Adjoint { triple: String, a: String },
    Trace { triple: String, a: String },
    /// ⟨a, b⟩ = τ(b* a).
    L2 { triple: String, a: String, b: String },
    /// Conditional expectation onto the subgroup generated by `--subgroup`.
    Expect {
        triple: String,
        a: String,
        /// Elements separated by ';', exponents by ','.
        #[arg(long, allow_hyphen_values = true)]
        subgroup: String,
    },
    Centralizer {
        triple: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        set: String,
    },
    /// Relative commutant of the listed generator positions.
    Commutant {
        triple: String,
        #[arg(long, default_value = "")]
        generators: String,
    },
    Center { triple: String },
    IsMatrix { triple: String },
    Complemented {
        triple: String,
        #[arg(long, default_value = "")]
        generators: String,
    },
    /// Split off the listed generator positions as a tensor factor.
    Split {
        triple: String,
        #[arg(long)]
        part: String,
    },
    Rep {
        triple: String,
        #[arg(long, value_enum, default_value = "witness")]
        kind: RepKind,
        /// Also emit the generator matrices (dimension ≤ 256).
        #[arg(long)]
        matrices: bool,
    },
    /// Operator norm in the regular representation.
    Norm { triple: String, a: String },
    Build {
        #[command(subcommand)]
        family: Family,
    },
    PhiChain {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u32,
    },
    /// Check a morphism and apply it to an optional element.
    Hom {
        source: String,
        target: String,
        /// Images of the source generators, separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        images: String,
        a: Option<String>,
    },
    /// Validation, dimension, center, matrix test and singleton tensor cuts.
    Report { triple: String },
}

#[derive(Subcommand, Debug)]
pub enum Family {
    Pairing {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u32,
    },
    Chain {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u32,
        /// Cross-trivial minus part, e.g. `3:1,5:2`.
        #[arg(long, default_value = "")]
        minus: String,
    },
    Nonuniq {
        #[arg(long, default_value = "")]
        minus: String,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        pairs: usize,
    },
}

/// Runs the CLI on the given arguments, returning the exit status and the
/// text for standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    if let Some(cap) = cli.cap {
        limits::set_enumeration_cap(cap);
    }
    match dispatch(&cli) {
        Ok(v) => (0, render(&v, cli.format)),
        Err(e) => {
            let v = json!({"code": e.code(), "message": e.to_string(), "witness": e.witness()});
            (1, render(&v, cli.format))
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("json renders"),
        Format::Text => match v {
            Value::Object(m) => m
                .iter()
                .map(|(k, x)| match x {
                    Value::String(s) => format!("{k}: {s}"),
                    _ => format!("{k}: {x}"),
                })
                .collect::<Vec<_>>()
                .join("\n"),
            _ => v.to_string(),
        },
    }
}

fn read_input(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))
}

fn load_triple(arg: &str) -> Result<Arc<CcrTriple>> {
    Ok(Arc::new(CcrTriple::from_json(&read_input(arg)?)?))
}

fn load_element(t: &Arc<CcrTriple>, arg: &str) -> Result<AlgebraElement> {
    let v: Value =
        serde_json::from_str(&read_input(arg)?).map_err(|e| Error::Parse(e.to_string()))?;
    AlgebraElement::from_json(t, &v)
}

/// `"1,0;0,1"` to a list of elements.
pub fn parse_elements(t: &CcrTriple, text: &str) -> Result<Vec<GroupElement>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v: Vec<i64> = s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent '{x}'")))
                })
                .collect::<Result<_>>()?;
            t.spec().element(&v)
        })
        .collect()
}

pub fn parse_positions(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad position '{s}'"))))
        .collect()
}

/// `"3:1,5:2"` to `[(3,1), (5,2)]`.
pub fn parse_minus(text: &str) -> Result<Vec<(u32, u32)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (p, k) = s
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected prime:multiplicity, got '{s}'")))?;
            let p = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime '{p}'")))?;
            let k = k.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity '{k}'")))?;
            Ok((p, k))
        })
        .collect()
}

fn elements_json(v: &[GroupElement]) -> Value {
    serde_json::to_value(v).expect("elements serialize")
}

fn with_provenance(provenance: &str, mut body: Value) -> Value {
    body["provenance"] = json!(provenance);
    body
}

fn formula(cli: &Cli) -> Formula {
    if cli.literal_formulas {
        Formula::Literal
    } else {
        Formula::Corrected
    }
}

fn dispatch(cli: &Cli) -> Result<Value> {
    use Command::*;
    Ok(match &cli.command {
        Validate { triple } => {
            let raw: TripleJson =
                serde_json::from_str(&read_input(triple)?).map_err(|e| Error::Parse(e.to_string()))?;
            let t = CcrTriple::try_from(raw)?;
            let report = validate_table(t.spec(), t.theta_table());
            with_provenance(
                "defining conditions of a CCR triple",
                json!({"result": "ok", "violations": report.violations, "triple": t.to_json()}),
            )
        }
        Dim { triple } => {
            let t = load_triple(triple)?;
            with_provenance(
                "dimension of the twisted group algebra equals |Γ|",
                json!({"dimension": t.spec().order().to_string()}),
            )
        }
        Mul { triple, a, b } => {
            let t = load_triple(triple)?;
            let x = load_element(&t, a)?.multiply(&load_element(&t, b)?)?;
            with_provenance("u_g u_h = c(g,h) u_{g+h}", json!({"element": x.to_json()}))
        }
        Adjoint { triple, a } => {
            let t = load_triple(triple)?;
            with_provenance(
                "(u_g)* = conj c(g,g⁻¹) u_{g⁻¹}",
                json!({"element": load_element(&t, a)?.adjoint().to_json()}),
            )
        }
        Trace { triple, a } => {
            let t = load_triple(triple)?;
            with_provenance(
                "trace reads the coefficient of u_e",
                json!({"trace": trace(&load_element(&t, a)?)}),
            )
        }
        L2 { triple, a, b } => {
            let t = load_triple(triple)?;
            let v = l2_inner(&load_element(&t, a)?, &load_element(&t, b)?)?;
            with_provenance("⟨a,b⟩ = τ(b* a)", json!({"inner": v}))
        }
        Expect { triple, a, subgroup } => {
            let t = load_triple(triple)?;
            let g = t.spec().subgroup_generated(&parse_elements(&t, subgroup)?)?;
            let e = conditional_expectation(&load_element(&t, a)?, &g)?;
            with_provenance(
                "conditional expectation onto C*(u_g : g ∈ G)",
                json!({"subgroup_order": g.order(), "element": e.to_json()}),
            )
        }
        Centralizer { triple, set } => {
            let t = load_triple(triple)?;
            let z = t.centralizer(&parse_elements(&t, set)?)?;
            with_provenance(
                "centralizer subgroup of a set",
                json!({"order": z.order(), "members": elements_json(z.members()), "generators": elements_json(z.generators())}),
            )
        }
        Commutant { triple, generators } => {
            let t = load_triple(triple)?;
            let b = commutant_basis(&t, &parse_positions(generators)?)?;
            with_provenance(
                "relative commutant spanned by the centralizer",
                json!({"dimension": b.len(), "basis": elements_json(&b)}),
            )
        }
        Center { triple } => {
            let t = load_triple(triple)?;
            let b = center_basis(&t)?;
            with_provenance(
                "center spanned by the centralizer of all generators",
                json!({"dimension": b.len(), "basis": elements_json(&b)}),
            )
        }
        IsMatrix { triple } => {
            let t = load_triple(triple)?;
            with_provenance(
                "trivial center gives a full matrix algebra",
                serde_json::to_value(is_full_matrix(&t)?).expect("report serializes"),
            )
        }
        Complemented { triple, generators } => {
            let t = load_triple(triple)?;
            let pos = parse_positions(generators)?;
            let ev = constructions::complement_evidence(&t, &pos)?;
            debug_assert_eq!(ev.complemented, is_complemented(&t, &pos)?);
            with_provenance(
                "complemented iff Γ = ⟨Γ_S ∪ Z(S)⟩",
                serde_json::to_value(ev).expect("report serializes"),
            )
        }
        Split { triple, part } => {
            let t = load_triple(triple)?;
            let (a, b) = tensor_split(&t, &parse_positions(part)?)?;
            with_provenance(
                "cross-trivial partitions split as tensor products",
                json!({
                    "first": a.to_json(),
                    "second": b.to_json(),
                    "dimensions": [a.spec().order().to_string(), b.spec().order().to_string()],
                }),
            )
        }
        Rep {
            triple,
            kind,
            matrices,
        } => {
            let t = load_triple(triple)?;
            let r = match kind {
                RepKind::Witness => witness_rep(t.clone(), Combine::Tensor)?,
                RepKind::WitnessDirectSum => witness_rep(t.clone(), Combine::DirectSum)?,
                RepKind::Regular => regular_rep(t.clone())?,
            };
            let report = check_relations(&r);
            let mut body = json!({
                "passed": report.passed(),
                "relations": serde_json::to_value(&report).expect("report serializes"),
                "blocks": r.factors().iter().map(|f| json!({"label": f.label, "dim": f.dim()})).collect::<Vec<_>>(),
            });
            if *matrices {
                let ms: Vec<Value> = (0..t.rank())
                    .map(|i| Ok(r.generator_matrix(i)?.to_dense()?.to_json()))
                    .collect::<Result<_>>()?;
                body["matrices"] = Value::Array(ms);
            }
            with_provenance("representations of the CCR relations", body)
        }
        Norm { triple, a } => {
            let t = load_triple(triple)?;
            let r = regular_rep(t.clone())?;
            let x = load_element(&t, a)?;
            with_provenance(
                "operator norm in the regular representation",
                json!({"norm": operator_norm(&r, &x)?}),
            )
        }
        Build { family } => build(cli, family)?,
        PhiChain { k, p } => {
            let ct = chain_triple(*k, *p)?;
            let m = phi_matrix(&ct)?;
            with_provenance(
                "phi(a,b,c,d) = ½‖ad − da‖ on the chain pairs",
                json!({
                    "phi": m.iter().map(|r| r.iter().map(|v| v.value).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "phi_squared": m.iter().map(|r| r.iter().map(|v| v.squared.clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "indicator": m.iter().map(|r| r.iter().map(|v| u8::from(v.nonzero)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "recovered_order": recover_order(&ct)?,
                }),
            )
        }
        Hom {
            source,
            target,
            images,
            a,
        } => {
            let s = load_triple(source)?;
            let t = load_triple(target)?;
            let m = CcrMorphism::new(s.clone(), t.clone(), parse_elements(&t, images)?)?;
            let check = check_morphism(&m)?;
            let mut body = json!({
                "check": serde_json::to_value(&check).expect("check serializes"),
                "order_preserving": m.is_order_preserving_on_generators(),
            });
            if check.is_ok() {
                algebra::check_hom_extends(&m)?;
                let sigma: Vec<Value> = s
                    .spec()
                    .elements()?
                    .map(|g| json!({"element": g, "image": m.map(&g), "sigma": hom_phase(&m, &g)}))
                    .collect();
                body["sigma"] = Value::Array(sigma);
                if let Some(a) = a {
                    body["image"] = induced_hom(&m, &load_element(&s, a)?)?.to_json();
                }
            }
            with_provenance("morphisms induce *-homomorphisms", body)
        }
        Report { triple } => {
            let t = load_triple(triple)?;
            let cuts: Vec<Value> = (0..t.rank())
                .map(|i| match tensor_split(&t, &[i]) {
                    Ok(_) => json!({"generator": i, "split": true}),
                    Err(e) => json!({"generator": i, "split": false, "witness": e.witness()}),
                })
                .collect();
            let fm = is_full_matrix(&t)?;
            with_provenance(
                "structural battery",
                json!({
                    "validation": "ok",
                    "dimension": t.spec().order().to_string(),
                    "center": elements_json(&center_basis(&t)?),
                    "is_matrix": serde_json::to_value(fm).expect("report serializes"),
                    "singleton_cuts": cuts,
                }),
            )
        }
    })
}

fn build(cli: &Cli, family: &Family) -> Result<Value> {
    Ok(match family {
        Family::Pairing { k, p } => {
            let pt = pairing_triple(*k, *p)?;
            let fm = is_full_matrix(&pt.triple)?;
            with_provenance(
                "pairing triple is a full matrix algebra of size p^k",
                json!({
                    "triple": pt.triple.to_json(),
                    "analysis": {
                        "validation": "ok",
                        "dimension": pt.triple.spec().order().to_string(),
                        "center": elements_json(&center_basis(&pt.triple)?),
                        "is_matrix": serde_json::to_value(fm).expect("report serializes"),
                    }
                }),
            )
        }
        Family::Chain { k, p, minus } => {
            let base = chain_triple(*k, *p)?;
            let minus = parse_minus(minus)?;
            let ct = if minus.is_empty() { base } else { base.with_minus(&minus)? };
            let m = phi_matrix(&ct)?;
            let sub = chain_change_of_generators(&ct, formula(cli))?;
            with_provenance(
                "chain triple: phi-chain and change of generators",
                json!({
                    "triple": ct.triple.to_json(),
                    "analysis": {
                        "validation": "ok",
                        "dimension": ct.triple.spec().order().to_string(),
                        "center_dimension": center_basis(&ct.triple)?.len(),
                        "phi": m.iter().map(|r| r.iter().map(|v| v.value).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "indicator": m.iter().map(|r| r.iter().map(|v| u8::from(v.nonzero)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "recovered_order": recover_order(&ct)?,
                        "change_of_generators": serde_json::to_value(sub).expect("report serializes"),
                    }
                }),
            )
        }
        Family::Nonuniq { minus, p, pairs } => {
            let frag = nonuniqueness_fragment(&parse_minus(minus)?, *p, *pairs)?;
            let f = frag.canonical_f();
            let cond = check_f_conditions(&frag, &f);
            let sub = substitute_and_verify(&frag, &f, formula(cli))?;
            let contrast = if *pairs > 0 {
                serde_json::to_value(complementation_contrast(&frag, &pairing_triple(*pairs, *p)?)?)
                    .expect("report serializes")
            } else {
                Value::Null
            };
            let labels: Vec<&str> = f.iter().map(|&i| frag.triple.spec().label(i)).collect();
            with_provenance(
                "non-uniqueness fragment: substitution and complementation",
                json!({
                    "triple": frag.triple.to_json(),
                    "analysis": {
                        "validation": "ok",
                        "dimension": frag.triple.spec().order().to_string(),
                        "center_dimension": center_basis(&frag.triple)?.len(),
                        "f": labels,
                        "f_conditions": serde_json::to_value(cond).expect("report serializes"),
                        "substitution": serde_json::to_value(sub).expect("report serializes"),
                        "complementation": contrast,
                    }
                }),
            )
        }
    })
}
