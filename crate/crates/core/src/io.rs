//! JSON documents for behaviors, models, joint distributions, constraint
//! systems, and direction sets. Exact probabilities travel as "num/den"
//! strings; float probabilities as JSON numbers. Setting indices use the keys
//! x, y, z and outcome indices the keys a, b, c, by party order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::Zero;
use serde_json::{json, Map, Value as Json};

use crate::decide::lp::Rat;
use crate::decide::mdl::JointDistribution;
use crate::decide::vcs::{ValueConstraintSystem, VcsVariable};
use crate::error::{Error, Result};
use crate::hvmodel::HiddenVariableModel;
use crate::scenario::{Behavior, JointSetting, Party, Scenario, Setting};
use crate::value::{format_rational, parse_rational, Value, ValueMode};

const SETTING_KEYS: [&str; 3] = ["x", "y", "z"];
const OUTCOME_KEYS: [&str; 3] = ["a", "b", "c"];

fn mode_to_str(mode: &ValueMode) -> &'static str {
    if mode.is_exact() {
        "exact"
    } else {
        "float"
    }
}

fn mode_from_json(doc: &Json) -> Result<ValueMode> {
    match doc.get("mode").and_then(Json::as_str) {
        Some("exact") => Ok(ValueMode::Exact),
        Some("float") => Ok(ValueMode::float_default()),
        other => Err(Error::Validation(format!("mode must be \"exact\" or \"float\", got {other:?}"))),
    }
}

fn prob_to_json(v: &Value) -> Json {
    match v {
        Value::Exact(r) => Json::String(format_rational(r)),
        Value::Float(f) => json!(f),
    }
}

fn prob_from_json(mode: &ValueMode, j: &Json) -> Result<Value> {
    match (mode, j) {
        (ValueMode::Exact, Json::String(s)) => Ok(Value::Exact(parse_rational(s)?)),
        (ValueMode::Float { .. }, Json::Number(n)) => n
            .as_f64()
            .map(Value::Float)
            .ok_or_else(|| Error::Validation(format!("bad float {n}"))),
        _ => Err(Error::Validation(format!(
            "probability {j} does not match mode {}",
            mode_to_str(mode)
        ))),
    }
}

fn index_from(entry: &Map<String, Json>, key: &str) -> Result<usize> {
    entry
        .get(key)
        .and_then(Json::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| Error::Validation(format!("missing or invalid index \"{key}\"")))
}

pub fn scenario_to_json(s: &Scenario) -> Json {
    json!({
        "parties": s.parties.iter().map(|p| json!({
            "label": p.label,
            "settings": p.settings.iter().map(|st| json!({
                "label": st.label,
                "outcomes": st.outcomes,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn scenario_from_json(doc: &Json) -> Result<Scenario> {
    let parties = doc
        .get("parties")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("scenario needs a \"parties\" list".into()))?;
    let parties = parties
        .iter()
        .map(|p| {
            let label = p
                .get("label")
                .and_then(Json::as_str)
                .ok_or_else(|| Error::Validation("party needs a label".into()))?
                .to_string();
            let settings = p
                .get("settings")
                .and_then(Json::as_array)
                .ok_or_else(|| Error::Validation("party needs a settings list".into()))?
                .iter()
                .map(|st| {
                    let label = st
                        .get("label")
                        .and_then(Json::as_str)
                        .ok_or_else(|| Error::Validation("setting needs a label".into()))?
                        .to_string();
                    let outcomes = st
                        .get("outcomes")
                        .and_then(Json::as_array)
                        .ok_or_else(|| Error::Validation("setting needs an outcomes list".into()))?
                        .iter()
                        .map(|o| {
                            o.as_str()
                                .map(str::to_string)
                                .ok_or_else(|| Error::Validation("outcome labels are strings".into()))
                        })
                        .collect::<Result<Vec<String>>>()?;
                    Ok(Setting { label, outcomes })
                })
                .collect::<Result<Vec<Setting>>>()?;
            Ok(Party { label, settings })
        })
        .collect::<Result<Vec<Party>>>()?;
    Scenario::new(parties)
}

fn point_entry(s: &JointSetting, o: &[usize]) -> Map<String, Json> {
    let mut entry = Map::new();
    for (i, &si) in s.iter().enumerate() {
        entry.insert(SETTING_KEYS[i].to_string(), json!(si));
    }
    for (i, &oi) in o.iter().enumerate() {
        entry.insert(OUTCOME_KEYS[i].to_string(), json!(oi));
    }
    entry
}

pub fn behavior_to_json(b: &Behavior) -> Json {
    let mut table = Vec::new();
    for ((s, o), p) in b.entries() {
        let mut entry = point_entry(s, o);
        entry.insert("p".into(), prob_to_json(p));
        table.push(Json::Object(entry));
    }
    json!({
        "scenario": scenario_to_json(&b.scenario),
        "mode": mode_to_str(&b.mode),
        "table": table,
    })
}

fn read_point(
    scenario: &Scenario,
    entry: &Map<String, Json>,
) -> Result<(JointSetting, Vec<usize>)> {
    let n = scenario.num_parties();
    let mut s = Vec::with_capacity(n);
    let mut o = Vec::with_capacity(n);
    for i in 0..n {
        s.push(index_from(entry, SETTING_KEYS[i])?);
    }
    for i in 0..n {
        o.push(index_from(entry, OUTCOME_KEYS[i])?);
    }
    Ok((s, o))
}

pub fn behavior_from_json(doc: &Json) -> Result<Behavior> {
    let scenario = scenario_from_json(
        doc.get("scenario")
            .ok_or_else(|| Error::Validation("behavior needs a \"scenario\"".into()))?,
    )?;
    let mode = mode_from_json(doc)?;
    let mut b = Behavior::new(scenario, mode, Default::default());
    let table = doc
        .get("table")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("behavior needs a \"table\" list".into()))?;
    for row in table {
        let entry = row
            .as_object()
            .ok_or_else(|| Error::Validation("table rows are objects".into()))?;
        let (s, o) = read_point(&b.scenario, entry)?;
        let p = prob_from_json(
            &b.mode,
            entry
                .get("p")
                .ok_or_else(|| Error::Validation("table row needs \"p\"".into()))?,
        )?;
        b.set(s, o, p);
    }
    // Every point of the scenario must be present.
    for s in b.scenario.joint_settings() {
        for o in b.scenario.joint_outcomes(&s) {
            b.get(&s, &o)?;
        }
    }
    Ok(b)
}

pub fn model_to_json(m: &HiddenVariableModel) -> Json {
    let mut weights = Vec::new();
    for ((s, l), p) in &m.setting_weights {
        let mut entry = Map::new();
        for (i, &si) in s.iter().enumerate() {
            entry.insert(SETTING_KEYS[i].to_string(), json!(si));
        }
        entry.insert("lambda".into(), json!(l));
        entry.insert("p".into(), prob_to_json(p));
        weights.push(Json::Object(entry));
    }
    let mut response = Vec::new();
    for ((s, l, o), p) in &m.response {
        let mut entry = point_entry(s, o);
        entry.insert("lambda".into(), json!(l));
        entry.insert("p".into(), prob_to_json(p));
        response.push(Json::Object(entry));
    }
    json!({
        "scenario": scenario_to_json(&m.scenario),
        "mode": mode_to_str(&m.mode),
        "lambdas": m.lambdas,
        "prior": m.prior.iter().map(prob_to_json).collect::<Vec<_>>(),
        "setting_weights": weights,
        "response": response,
    })
}

pub fn model_from_json(doc: &Json) -> Result<HiddenVariableModel> {
    let scenario = scenario_from_json(
        doc.get("scenario")
            .ok_or_else(|| Error::Validation("model needs a \"scenario\"".into()))?,
    )?;
    let mode = mode_from_json(doc)?;
    let lambdas: Vec<String> = doc
        .get("lambdas")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("model needs a \"lambdas\" list".into()))?
        .iter()
        .map(|l| {
            l.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Validation("lambda labels are strings".into()))
        })
        .collect::<Result<_>>()?;
    let prior: Vec<Value> = doc
        .get("prior")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("model needs a \"prior\" list".into()))?
        .iter()
        .map(|p| prob_from_json(&mode, p))
        .collect::<Result<_>>()?;
    let mut setting_weights = BTreeMap::new();
    for row in doc
        .get("setting_weights")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("model needs a \"setting_weights\" list".into()))?
    {
        let entry = row
            .as_object()
            .ok_or_else(|| Error::Validation("setting_weights rows are objects".into()))?;
        let mut s = Vec::with_capacity(scenario.num_parties());
        for i in 0..scenario.num_parties() {
            s.push(index_from(entry, SETTING_KEYS[i])?);
        }
        let l = index_from(entry, "lambda")?;
        let p = prob_from_json(
            &mode,
            entry
                .get("p")
                .ok_or_else(|| Error::Validation("weight row needs \"p\"".into()))?,
        )?;
        setting_weights.insert((s, l), p);
    }
    let mut response = BTreeMap::new();
    for row in doc
        .get("response")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("model needs a \"response\" list".into()))?
    {
        let entry = row
            .as_object()
            .ok_or_else(|| Error::Validation("response rows are objects".into()))?;
        let (s, o) = read_point(&scenario, entry)?;
        let l = index_from(entry, "lambda")?;
        let p = prob_from_json(
            &mode,
            entry
                .get("p")
                .ok_or_else(|| Error::Validation("response row needs \"p\"".into()))?,
        )?;
        response.insert((s, l, o), p);
    }
    let model = HiddenVariableModel { scenario, mode, lambdas, prior, setting_weights, response };
    model.validate()?;
    Ok(model)
}

pub fn joint_to_json(j: &JointDistribution) -> Json {
    let mut doc = behavior_to_json(&j.behavior);
    let mut dist = Vec::new();
    for (s, p) in &j.settings_dist {
        let mut entry = Map::new();
        for (i, &si) in s.iter().enumerate() {
            entry.insert(SETTING_KEYS[i].to_string(), json!(si));
        }
        entry.insert("p".into(), Json::String(format_rational(p)));
        dist.push(Json::Object(entry));
    }
    doc.as_object_mut()
        .expect("behavior documents are objects")
        .insert("settings_dist".into(), Json::Array(dist));
    doc
}

pub fn joint_from_json(doc: &Json) -> Result<JointDistribution> {
    let behavior = behavior_from_json(doc)?;
    let mut dist: BTreeMap<JointSetting, Rat> = BTreeMap::new();
    for row in doc
        .get("settings_dist")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("joint needs a \"settings_dist\" list".into()))?
    {
        let entry = row
            .as_object()
            .ok_or_else(|| Error::Validation("settings_dist rows are objects".into()))?;
        let mut s = Vec::with_capacity(behavior.scenario.num_parties());
        for i in 0..behavior.scenario.num_parties() {
            s.push(index_from(entry, SETTING_KEYS[i])?);
        }
        let p = entry
            .get("p")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::Validation("settings_dist probabilities are \"num/den\"".into()))?;
        dist.insert(s, parse_rational(p)?);
    }
    JointDistribution::new(behavior, dist)
}

pub fn vcs_to_json(sys: &ValueConstraintSystem) -> Json {
    json!({
        "variables": sys.variables.iter().map(|v| json!({
            "name": v.name,
            "alphabet": v.alphabet,
        })).collect::<Vec<_>>(),
        "constraints": sys.constraints.iter().map(|c| json!({
            "description": c.description,
            "vars": c.vars,
            "allowed": c.allowed.iter().collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn vcs_from_json(doc: &Json) -> Result<ValueConstraintSystem> {
    let variables: Vec<VcsVariable> = doc
        .get("variables")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("constraint system needs \"variables\"".into()))?
        .iter()
        .map(|v| {
            let name = v
                .get("name")
                .and_then(Json::as_str)
                .ok_or_else(|| Error::Validation("variable needs a name".into()))?
                .to_string();
            let alphabet = v
                .get("alphabet")
                .and_then(Json::as_array)
                .ok_or_else(|| Error::Validation("variable needs an alphabet".into()))?
                .iter()
                .map(|o| {
                    o.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Validation("alphabet entries are strings".into()))
                })
                .collect::<Result<_>>()?;
            Ok(VcsVariable { name, alphabet })
        })
        .collect::<Result<_>>()?;
    let mut sys = ValueConstraintSystem { variables, constraints: Vec::new() };
    for c in doc
        .get("constraints")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Validation("constraint system needs \"constraints\"".into()))?
    {
        let description = c
            .get("description")
            .and_then(Json::as_str)
            .unwrap_or_default()
            .to_string();
        let vars: Vec<usize> = c
            .get("vars")
            .and_then(Json::as_array)
            .ok_or_else(|| Error::Validation("constraint needs \"vars\"".into()))?
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| Error::Validation("vars entries are indices".into()))
            })
            .collect::<Result<_>>()?;
        let allowed: BTreeSet<Vec<usize>> = c
            .get("allowed")
            .and_then(Json::as_array)
            .ok_or_else(|| Error::Validation("constraint needs \"allowed\"".into()))?
            .iter()
            .map(|tuple| {
                tuple
                    .as_array()
                    .ok_or_else(|| Error::Validation("allowed entries are tuples".into()))?
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .map(|n| n as usize)
                            .ok_or_else(|| Error::Validation("tuple entries are indices".into()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
        sys.add_constraint(description, vars, allowed)?;
    }
    Ok(sys)
}

pub fn directions_from_json(doc: &Json) -> Result<Vec<[f64; 3]>> {
    doc.as_array()
        .ok_or_else(|| Error::Validation("directions are a JSON list of 3-vectors".into()))?
        .iter()
        .map(|v| {
            let arr = v
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::Validation("each direction is a 3-vector".into()))?;
            let mut d = [0.0f64; 3];
            for (i, x) in arr.iter().enumerate() {
                d[i] = x
                    .as_f64()
                    .ok_or_else(|| Error::Validation("direction components are numbers".into()))?;
            }
            Ok(d)
        })
        .collect()
}

pub fn directions_to_json(dirs: &[[f64; 3]]) -> Json {
    Json::Array(dirs.iter().map(|d| json!([d[0], d[1], d[2]])).collect())
}

pub fn read_json(path: &Path) -> Result<Json> {
    let raw = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&raw)?)
}

pub fn write_json(path: &Path, doc: &Json) -> Result<()> {
    let mut out = serde_json::to_string_pretty(doc)?;
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}

/// Round a float behavior's probabilities to rationals with the given number
/// of decimal digits and renormalize each context; exact behaviors pass
/// through unchanged.
pub fn to_exact_behavior(b: &Behavior, digits: u32) -> Result<Behavior> {
    if b.mode.is_exact() {
        return Ok(b.clone());
    }
    b.rationalize(digits)
}

/// Sum check used when ingesting joints built by hand.
pub fn settings_dist_total(j: &JointDistribution) -> Rat {
    j.settings_dist.values().fold(Rat::zero(), |acc, p| acc + p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::pr_box_model;
    use crate::scenario::pr_box_behavior;

    #[test]
    fn behavior_round_trip_exact() {
        let b = pr_box_behavior();
        let doc = behavior_to_json(&b);
        let back = behavior_from_json(&doc).unwrap();
        assert_eq!(back.scenario, b.scenario);
        for (k, v) in b.entries() {
            assert_eq!(back.get(&k.0, &k.1).unwrap(), v);
        }
    }

    #[test]
    fn behavior_round_trip_float() {
        let b = crate::quantum::singlet_behavior(
            &[[0.0, 0.0, 1.0]],
            &[[1.0, 0.0, 0.0]],
        )
        .unwrap();
        let doc = behavior_to_json(&b);
        let back = behavior_from_json(&doc).unwrap();
        for (k, v) in b.entries() {
            assert!((back.get(&k.0, &k.1).unwrap().to_f64() - v.to_f64()).abs() < 1e-15);
        }
    }

    #[test]
    fn model_round_trip_exact() {
        let m = pr_box_model(2).unwrap();
        let doc = model_to_json(&m);
        let back = model_from_json(&doc).unwrap();
        assert_eq!(back.lambdas, m.lambdas);
        assert_eq!(back.prior, m.prior);
        assert_eq!(back.setting_weights, m.setting_weights);
        assert_eq!(back.response, m.response);
    }

    #[test]
    fn joint_round_trip() {
        let j = JointDistribution::with_uniform_settings(pr_box_behavior()).unwrap();
        let doc = joint_to_json(&j);
        let back = joint_from_json(&doc).unwrap();
        assert_eq!(back.settings_dist, j.settings_dist);
    }

    #[test]
    fn vcs_round_trip() {
        let sys = crate::quantum::ghz_constraint_system().unwrap();
        let doc = vcs_to_json(&sys);
        let back = vcs_from_json(&doc).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn missing_entries_are_rejected() {
        let b = pr_box_behavior();
        let mut doc = behavior_to_json(&b);
        doc.as_object_mut()
            .unwrap()
            .get_mut("table")
            .unwrap()
            .as_array_mut()
            .unwrap()
            .pop();
        assert!(behavior_from_json(&doc).is_err());
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let b = pr_box_behavior();
        let mut doc = behavior_to_json(&b);
        doc.as_object_mut().unwrap().insert("mode".into(), json!("float"));
        assert!(behavior_from_json(&doc).is_err());
    }

    #[test]
    fn directions_round_trip() {
        let dirs = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let doc = directions_to_json(&dirs);
        assert_eq!(directions_from_json(&doc).unwrap(), dirs);
    }
}
