//! JSON encodings. Rationals are reduced `"p/q"` strings (integers print
//! without a denominator); contexts and outcomes are keyed by identifier
//! tuples joined with `":"`. Object keys keep the scenario's canonical
//! order, so encodings are byte-stable.

use serde_json::{json, Map, Value};

use crate::applications::{Inequality, InequalityTag, InseparabilityReport, Witness};
use crate::behaviour::Behaviour;
use crate::classify::{Classification, MsfDescriptor};
use crate::error::{Error, Result};
use crate::exactgeom::{AffineFunctional, HRep, MembershipCertificate};
use crate::fine::JointDistribution;
use crate::num::{fmt_q, parse_q, Q};
use crate::polytopes::{Family, VertexSet};
use crate::scenario::{tuples, Input, InputCollection, Party, Scenario};

fn bad(msg: impl Into<String>) -> Error {
    Error::validation(msg)
}

pub fn q_to_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

/// Accepts rational strings and JSON integers.
pub fn q_from_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
        _ => Err(bad(format!("expected a rational string, got {v}"))),
    }
}

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(format!("{what} must be an object")))
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    arr(v, what)?
        .iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(bad(format!("{what} entries must be identifiers"))),
        })
        .collect()
}

pub fn scenario_to_json(s: &Scenario) -> Value {
    let mut inputs = Map::new();
    let mut outputs = Map::new();
    for p in s.parties() {
        inputs.insert(
            p.name.clone(),
            json!(p.inputs.iter().map(|x| &x.name).collect::<Vec<_>>()),
        );
        let mut per = Map::new();
        for x in &p.inputs {
            per.insert(x.name.clone(), json!(x.outputs));
        }
        outputs.insert(p.name.clone(), Value::Object(per));
    }
    json!({
        "parties": s.parties().iter().map(|p| &p.name).collect::<Vec<_>>(),
        "inputs": inputs,
        "outputs": outputs,
    })
}

pub fn scenario_from_json(v: &Value) -> Result<Scenario> {
    let m = obj(v, "scenario")?;
    let names = strings(field(m, "parties")?, "parties")?;
    let inputs = obj(field(m, "inputs")?, "inputs")?;
    let outputs = obj(field(m, "outputs")?, "outputs")?;
    let mut parties = Vec::with_capacity(names.len());
    for name in names {
        let xs = strings(
            inputs
                .get(&name)
                .ok_or_else(|| bad(format!("no inputs for party {name:?}")))?,
            "inputs",
        )?;
        let outs = obj(
            outputs
                .get(&name)
                .ok_or_else(|| bad(format!("no outputs for party {name:?}")))?,
            "outputs",
        )?;
        let mut ins = Vec::with_capacity(xs.len());
        for x in xs {
            let o = outs
                .get(&x)
                .ok_or_else(|| bad(format!("no outputs for input {x:?} of party {name:?}")))?;
            ins.push(Input {
                name: x,
                outputs: strings(o, "outputs")?,
            });
        }
        parties.push(Party { name, inputs: ins });
    }
    Scenario::new(parties)
}

/// `{"party": [inputs]}` with parties holding no inputs omitted.
pub fn collection_to_json(s: &Scenario, m: &InputCollection) -> Value {
    let mut out = Map::new();
    for (i, p) in s.parties().iter().enumerate() {
        let xs: Vec<&String> = m.inputs_of(i).map(|x| &p.inputs[x].name).collect();
        if !xs.is_empty() {
            out.insert(p.name.clone(), json!(xs));
        }
    }
    Value::Object(out)
}

pub fn collection_from_json(s: &Scenario, v: &Value) -> Result<InputCollection> {
    let m = obj(v, "collection")?;
    let mut sets = vec![Vec::new(); s.num_parties()];
    for (name, xs) in m {
        let i = s
            .party_index(name)
            .ok_or_else(|| bad(format!("unknown party {name:?}")))?;
        for x in strings(xs, "collection inputs")? {
            let j = s
                .party(i)
                .inputs
                .iter()
                .position(|inp| inp.name == x)
                .ok_or_else(|| bad(format!("unknown input {x:?} of party {name:?}")))?;
            sets[i].push(j);
        }
    }
    InputCollection::new(s, &sets)
}

fn table_to_json(s: &Scenario, v: &[Q]) -> Value {
    let mut table = Map::new();
    for (c, ctx) in s.contexts().enumerate() {
        let off = s.context_offset(c);
        let mut row = Map::new();
        for (k, out) in tuples(&s.outcome_radices(&ctx)).enumerate() {
            row.insert(s.outcome_key(&ctx, &out), q_to_json(&v[off + k]));
        }
        table.insert(s.context_key(&ctx), Value::Object(row));
    }
    Value::Object(table)
}

pub fn behaviour_to_json(p: &Behaviour) -> Value {
    json!({
        "scenario": scenario_to_json(p.scenario()),
        "table": table_to_json(p.scenario(), p.as_vector()),
    })
}

/// Reads `{"scenario"?, "table"}`. The embedded scenario is used when no
/// scenario is supplied; if both are present they must agree. Outcomes
/// omitted from a context have probability zero; omitted contexts are an
/// error.
pub fn behaviour_from_json(v: &Value, scenario: Option<&Scenario>) -> Result<Behaviour> {
    let m = obj(v, "behaviour")?;
    let embedded = m.get("scenario").map(scenario_from_json).transpose()?;
    let s = match (scenario, embedded) {
        (Some(s), Some(e)) if *s != e => {
            return Err(bad(
                "behaviour scenario does not match the supplied scenario",
            ))
        }
        (Some(s), _) => s.clone(),
        (None, Some(e)) => e,
        (None, None) => return Err(bad("behaviour needs a scenario")),
    };
    let table = obj(field(m, "table")?, "table")?;
    let mut probs = vec![Q::from_integer(0.into()); s.ambient_dim()];
    for (c, ctx) in s.contexts().enumerate() {
        let key = s.context_key(&ctx);
        let row = obj(
            table
                .get(&key)
                .ok_or_else(|| bad(format!("missing context {key:?}")))?,
            "context row",
        )?;
        let outs: Vec<Vec<usize>> = tuples(&s.outcome_radices(&ctx)).collect();
        let off = s.context_offset(c);
        for (ok, val) in row {
            let k = outs
                .iter()
                .position(|o| s.outcome_key(&ctx, o) == *ok)
                .ok_or_else(|| bad(format!("unknown outcome {ok:?} in context {key:?}")))?;
            probs[off + k] = q_from_json(val)?;
        }
    }
    if table.len() != s.num_contexts() {
        return Err(bad("table has contexts not in the scenario"));
    }
    Behaviour::new(s, probs)
}

pub fn family_to_json(s: &Scenario, f: &Family) -> Value {
    match f {
        Family::PartiallyDeterministic(m) => {
            json!({"kind": "pd", "collection": collection_to_json(s, m)})
        }
        other => json!({"kind": other.to_string()}),
    }
}

fn family_from_json(s: &Scenario, v: &Value) -> Result<Family> {
    let m = obj(v, "family")?;
    let kind = field(m, "kind")?
        .as_str()
        .ok_or_else(|| bad("family kind must be a string"))?;
    Ok(match kind {
        "e" => Family::E,
        "bell" => Family::Bell,
        "ns" => Family::NoSignalling,
        "pd" => Family::PartiallyDeterministic(collection_from_json(s, field(m, "collection")?)?),
        other => Family::Custom(other.to_string()),
    })
}

fn vector_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_to_json).collect())
}

fn vector_from_json(v: &Value, dim: usize) -> Result<Vec<Q>> {
    let a = arr(v, "vector")?;
    if a.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: a.len(),
        });
    }
    a.iter().map(q_from_json).collect()
}

/// Vertices as coordinate vectors in canonical (sorted) order, with the
/// coordinate labels listed once.
pub fn vertex_set_to_json(set: &VertexSet) -> Value {
    let s = set.scenario();
    json!({
        "scenario": scenario_to_json(s),
        "family": family_to_json(s, set.family()),
        "count": set.len(),
        "coordinates": (0..s.ambient_dim()).map(|c| s.coord_name(c)).collect::<Vec<_>>(),
        "vertices": set.vertices().iter().map(|b| vector_to_json(b.as_vector())).collect::<Vec<_>>(),
    })
}

pub fn vertex_set_from_json(v: &Value) -> Result<VertexSet> {
    let m = obj(v, "vertex set")?;
    let s = scenario_from_json(field(m, "scenario")?)?;
    let family = match m.get("family") {
        Some(f) => family_from_json(&s, f)?,
        None => Family::Custom("imported".into()),
    };
    let vertices = arr(field(m, "vertices")?, "vertices")?
        .iter()
        .map(|x| Behaviour::new(s.clone(), vector_from_json(x, s.ambient_dim())?))
        .collect::<Result<Vec<_>>>()?;
    VertexSet::new(s, family, vertices)
}

pub fn functional_to_json(f: &AffineFunctional) -> Value {
    json!({"coeffs": vector_to_json(&f.coeffs), "bound": q_to_json(&f.bound)})
}

pub fn functional_from_json(v: &Value) -> Result<AffineFunctional> {
    let m = obj(v, "functional")?;
    let coeffs = arr(field(m, "coeffs")?, "coeffs")?
        .iter()
        .map(q_from_json)
        .collect::<Result<Vec<_>>>()?;
    Ok(AffineFunctional::new(
        coeffs,
        q_from_json(field(m, "bound")?)?,
    ))
}

/// Each row is `coeffs · p ≤ bound` (or `=` for equalities). Facets are in
/// the canonical form produced by the facet enumerator: integer
/// coefficients, primitive, supported on the hull pivot coordinates.
pub fn hrep_to_json(h: &HRep) -> Value {
    json!({
        "dim": h.dim,
        "equalities": h.equalities.iter().map(functional_to_json).collect::<Vec<_>>(),
        "inequalities": h.inequalities.iter().map(functional_to_json).collect::<Vec<_>>(),
    })
}

pub fn hrep_from_json(v: &Value) -> Result<HRep> {
    let m = obj(v, "hrep")?;
    let rows = |key: &str| -> Result<Vec<AffineFunctional>> {
        arr(field(m, key)?, key)?
            .iter()
            .map(functional_from_json)
            .collect()
    };
    let dim = field(m, "dim")?
        .as_u64()
        .ok_or_else(|| bad("dim must be an integer"))? as usize;
    Ok(HRep {
        dim,
        equalities: rows("equalities")?,
        inequalities: rows("inequalities")?,
    })
}

pub fn certificate_to_json(c: &MembershipCertificate) -> Value {
    match c {
        MembershipCertificate::Inside { weights } => json!({
            "result": "inside",
            "weights": weights
                .iter()
                .map(|(i, w)| json!({"vertex": i, "weight": q_to_json(w)}))
                .collect::<Vec<_>>(),
        }),
        MembershipCertificate::Outside { separator } => json!({
            "result": "outside",
            "separator": functional_to_json(separator),
        }),
    }
}

pub fn certificate_from_json(v: &Value) -> Result<MembershipCertificate> {
    let m = obj(v, "certificate")?;
    match field(m, "result")?.as_str() {
        Some("inside") => {
            let weights = arr(field(m, "weights")?, "weights")?
                .iter()
                .map(|w| {
                    let w = obj(w, "weight")?;
                    let i = field(w, "vertex")?
                        .as_u64()
                        .ok_or_else(|| bad("vertex must be an index"))?;
                    Ok((i as usize, q_from_json(field(w, "weight")?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MembershipCertificate::Inside { weights })
        }
        Some("outside") => Ok(MembershipCertificate::Outside {
            separator: functional_from_json(field(m, "separator")?)?,
        }),
        _ => Err(bad("certificate result must be \"inside\" or \"outside\"")),
    }
}

pub fn msf_to_json(s: &Scenario, d: &MsfDescriptor) -> Value {
    match d {
        MsfDescriptor::Bottom => json!("bottom"),
        MsfDescriptor::Fragment(m) => json!({"fragment": collection_to_json(s, m)}),
    }
}

/// `classes[{msf, size, representative, relations: [{other, rel}]}]` plus
/// the Hasse edges as `[smaller, larger]` class indices.
pub fn classification_to_json(c: &Classification) -> Value {
    let s = &c.scenario;
    let classes: Vec<Value> = c
        .classes
        .iter()
        .map(|k| {
            json!({
                "msf": msf_to_json(s, &k.msf),
                "size": k.size(),
                "representative": collection_to_json(s, &k.representative),
                "is_bell": k.is_bell,
                "is_ns": k.is_ns,
                "relations": k
                    .relations
                    .iter()
                    .map(|(o, r)| json!({"other": o, "rel": r.as_str()}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "scenario": scenario_to_json(s),
        "num_classes": c.num_classes(),
        "classes": classes,
        "hasse": c.hasse.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

/// One entry per context of the β scenario; each maps the α key (slot
/// outcomes joined with ":") to the β outcome row.
pub fn joint_to_json(j: &JointDistribution) -> Value {
    let s = &j.scenario;
    let slot_names: Vec<String> = j
        .slots
        .iter()
        .map(|&(i, x)| format!("{}:{}", s.party(i).name, s.party(i).inputs[x].name))
        .collect();
    let radices: Vec<usize> = j.slots.iter().map(|&(i, x)| s.num_outputs(i, x)).collect();
    let alphas: Vec<Vec<usize>> = tuples(&radices).collect();
    let alpha_key = |a: &[usize]| {
        j.slots
            .iter()
            .zip(a)
            .map(|(&(i, x), &o)| s.party(i).inputs[x].outputs[o].as_str())
            .collect::<Vec<_>>()
            .join(":")
    };
    let mut tables = Vec::with_capacity(j.tables.len());
    for (c, t) in j.tables.iter().enumerate() {
        let (ctx_key, betas): (String, Vec<String>) = match &j.perp {
            Some(r) => {
                let ctx = r.sub.context(c);
                let keys = tuples(&r.sub.outcome_radices(&ctx))
                    .map(|b| r.sub.outcome_key(&ctx, &b))
                    .collect();
                (r.sub.context_key(&ctx), keys)
            }
            None => (String::new(), vec![String::new()]),
        };
        let mut rows = Map::new();
        for (ai, a) in alphas.iter().enumerate() {
            let mut row = Map::new();
            for (bi, bk) in betas.iter().enumerate() {
                row.insert(bk.clone(), q_to_json(&t[ai * betas.len() + bi]));
            }
            rows.insert(alpha_key(a), Value::Object(row));
        }
        tables.push(json!({"context": ctx_key, "table": rows}));
    }
    json!({
        "scenario": scenario_to_json(s),
        "collection": collection_to_json(s, &j.collection),
        "slots": slot_names,
        "perp_parties": j.perp.as_ref().map(|r| r.sub.parties().iter().map(|p| p.name.clone()).collect::<Vec<_>>()),
        "tables": tables,
    })
}

pub fn inequality_to_json(ineq: &Inequality) -> Value {
    json!({
        "tag": ineq.tag.to_string(),
        "coeffs": vector_to_json(&ineq.functional.coeffs),
        "bound": q_to_json(&ineq.functional.bound),
    })
}

/// Reads `{coeffs, bound, tag}` against a scenario. Unknown tags are kept
/// as custom tags.
pub fn inequality_from_json(s: &Scenario, v: &Value) -> Result<Inequality> {
    let m = obj(v, "inequality")?;
    let coeffs = vector_from_json(field(m, "coeffs")?, s.ambient_dim())?;
    let bound = q_from_json(field(m, "bound")?)?;
    let tag = match m.get("tag").and_then(Value::as_str) {
        Some(t) => InequalityTag::parse(t).unwrap_or_else(|_| InequalityTag::Custom(t.to_string())),
        None => InequalityTag::Custom("custom".into()),
    };
    Ok(Inequality {
        scenario: s.clone(),
        functional: AffineFunctional::new(coeffs, bound),
        tag,
        relabeling: None,
    })
}

pub fn inseparability_to_json(s: &Scenario, r: &InseparabilityReport) -> Value {
    let witness = |w: &Witness| match w {
        Witness::Inseparable(ps) => json!({
            "kind": "inseparable",
            "parties": ps.iter().map(|&i| s.party(i).name.clone()).collect::<Vec<_>>(),
        }),
        Witness::WeaklyInseparable => json!({"kind": "weakly-inseparable"}),
        Witness::CollectionInseparable => json!({"kind": "collection-inseparable"}),
        Witness::StronglyInseparable => json!({"kind": "strongly-inseparable"}),
    };
    json!({
        "members": r.members.iter().map(|m| json!({
            "parties": m.parties.iter().map(|&i| s.party(i).name.clone()).collect::<Vec<_>>(),
            "collection": collection_to_json(s, &m.collection),
            "certificate": certificate_to_json(&m.certificate),
        })).collect::<Vec<_>>(),
        "in_intersection": r.in_intersection,
        "in_union": r.in_union,
        "conv_union": certificate_to_json(&r.conv_union),
        "witnesses": r.witnesses.iter().map(witness).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::{build_inequality, pr_box};
    use crate::behaviour::tests::pr_box as chsh_pr;
    use crate::classify::classify_all;
    use crate::exactgeom::Budget;
    use crate::num::q;
    use crate::polytopes::{bell_vertices, ns_vertices};

    #[test]
    fn scenario_roundtrip() {
        let s = Scenario::from_output_counts(&[vec![2, 3], vec![2]]).unwrap();
        let v = scenario_to_json(&s);
        assert_eq!(scenario_from_json(&v).unwrap(), s);
        assert_eq!(v["parties"], json!(["A", "B"]));
        assert_eq!(v["outputs"]["A"]["2"], json!(["1", "2", "3"]));
    }

    #[test]
    fn collection_omits_empty_parties() {
        let s = Scenario::chsh();
        let m = InputCollection::new(&s, &[vec![1], vec![]]).unwrap();
        let v = collection_to_json(&s, &m);
        assert_eq!(v, json!({"A": ["2"]}));
        assert_eq!(collection_from_json(&s, &v).unwrap(), m);
        assert!(collection_from_json(&s, &json!({"Z": ["1"]})).is_err());
    }

    #[test]
    fn behaviour_roundtrip_and_strings() {
        let p = chsh_pr();
        let v = behaviour_to_json(&p);
        assert_eq!(v["table"]["2:2"]["1:2"], json!("1/2"));
        assert_eq!(v["table"]["2:2"]["1:1"], json!("0"));
        assert_eq!(behaviour_from_json(&v, None).unwrap(), p);
        // omitted outcomes are zero
        let mut sparse = v.clone();
        sparse["table"]["1:1"]
            .as_object_mut()
            .unwrap()
            .remove("1:2");
        assert_eq!(behaviour_from_json(&sparse, None).unwrap(), p);
        let mut broken = v.clone();
        broken["table"].as_object_mut().unwrap().remove("1:1");
        assert!(behaviour_from_json(&broken, None).is_err());
    }

    #[test]
    fn vertex_set_roundtrip() {
        let set = ns_vertices(&Scenario::chsh(), &Budget::default()).unwrap();
        let back = vertex_set_from_json(&vertex_set_to_json(&set)).unwrap();
        assert_eq!(back.vertices(), set.vertices());
        assert_eq!(back.family(), set.family());
    }

    #[test]
    fn certificate_and_hrep_roundtrip() {
        let s = Scenario::chsh();
        let bell = bell_vertices(&s, &Budget::default()).unwrap();
        let out = bell
            .membership(&pr_box(&s, None).unwrap(), &Budget::default())
            .unwrap();
        assert_eq!(
            certificate_from_json(&certificate_to_json(&out)).unwrap(),
            out
        );
        let mix = Behaviour::uniform(&s);
        let ins = bell.membership(&mix, &Budget::default()).unwrap();
        assert_eq!(
            certificate_from_json(&certificate_to_json(&ins)).unwrap(),
            ins
        );
        let h = bell.facets(&Budget::default()).unwrap();
        assert_eq!(hrep_from_json(&hrep_to_json(&h)).unwrap(), h);
    }

    #[test]
    fn inequality_and_classification_shape() {
        let s = Scenario::chsh();
        let ineq = build_inequality(&s, InequalityTag::Chsh, None).unwrap();
        let v = inequality_to_json(&ineq);
        assert_eq!(v["tag"], json!("CHSH"));
        let back = inequality_from_json(&s, &v).unwrap();
        assert_eq!(back.functional, ineq.functional);
        let c = classification_to_json(&classify_all(&s));
        assert_eq!(c["num_classes"], json!(2));
        assert_eq!(c["classes"][0]["msf"], json!("bottom"));
        assert_eq!(q_from_json(&json!("-3/6")).unwrap(), q(-1, 2));
    }
}
