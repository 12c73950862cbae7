//! JSON model and purpose files.
//!
//! Every file is an object with a `kind` field:
//! `interface-automaton`, `mealy`, `request-response` or `purpose`.
//! Unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{is_reserved, Alphabet, WAIT};
use crate::closure::closure;
use crate::error::{Error, Result};
use crate::interface::{InterfaceAutomaton, Label};
use crate::mealy::MealyMachine;
use crate::purpose::LearningPurpose;
use crate::sul::{AsyncModel, CounterSul, NondetBlock, RefinementSpec, Timing};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MealyTransitionSpec {
    pub from: String,
    pub input: String,
    pub output: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TimingSpec {
    pub t_min: u64,
    pub t_max: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub delays: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ChoiceSpec {
    pub symbol: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct NondetSpec {
    pub from: String,
    pub choices: Vec<ChoiceSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MergeSpec {
    pub into: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RefinementJson {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub split: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merge: Vec<MergeSpec>,
}

impl From<&RefinementJson> for RefinementSpec {
    fn from(r: &RefinementJson) -> Self {
        RefinementSpec {
            split: r.split.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            merge: r.merge.iter().map(|m| (m.into.clone(), m.members.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free-form provenance note.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<TransitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nondet: Vec<NondetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MealySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<MealyTransitionSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CounterSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub request: String,
    pub response: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PurposeSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub inputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
}

/// What a model file describes.
#[derive(Clone, Debug)]
pub enum Target {
    Async(AsyncModel),
    Mealy(MealyMachine),
    Counter(CounterSul),
}

#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub name: String,
    pub target: Target,
    /// Refinement block shipped with the model, applied on request.
    pub refinement: Option<RefinementSpec>,
}

fn kind_of(v: &serde_json::Value) -> Result<&str> {
    v.get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Model("missing string field \"kind\"".into()))
}

pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    match kind_of(&v)? {
        "interface-automaton" => {
            let spec: AutomatonSpec = serde_json::from_value(v)?;
            let model = spec.to_model()?;
            if model.is_deterministic() {
                check_closure(model.automaton())?;
            }
            Ok(LoadedModel {
                name: spec.name.clone().unwrap_or_else(|| "model".into()),
                target: Target::Async(model),
                refinement: spec.refinement.as_ref().map(RefinementSpec::from),
            })
        }
        "mealy" => {
            let spec: MealySpec = serde_json::from_value(v)?;
            Ok(LoadedModel {
                name: spec.name.clone().unwrap_or_else(|| "model".into()),
                target: Target::Mealy(spec.to_machine()?),
                refinement: None,
            })
        }
        "request-response" => {
            let spec: CounterSpec = serde_json::from_value(v)?;
            Ok(LoadedModel {
                name: spec.name.clone().unwrap_or_else(|| "request-response".into()),
                target: Target::Counter(CounterSul::new(&spec.request, &spec.response)?),
                refinement: None,
            })
        }
        other => Err(Error::Model(format!("unsupported model kind {other:?}"))),
    }
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

pub fn parse_purpose(text: &str) -> Result<LearningPurpose> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if kind_of(&v)? != "purpose" {
        return Err(Error::Purpose("expected kind \"purpose\"".into()));
    }
    let spec: PurposeSpec = serde_json::from_value(v)?;
    spec.to_purpose()
}

pub fn load_purpose(path: &Path) -> Result<LearningPurpose> {
    parse_purpose(&std::fs::read_to_string(path)?)
}

/// Load-time sanity check of the closure of a deterministic model.
fn check_closure(a: &InterfaceAutomaton) -> Result<()> {
    let c = closure(a);
    c.machine.check_err_sink()?;
    if c.machine.state_count() > 2 * a.state_count() + 1 {
        return Err(Error::MalformedClosure("closure larger than 2|A|+1".into()));
    }
    Ok(())
}

impl AutomatonSpec {
    pub fn to_model(&self) -> Result<AsyncModel> {
        if self.kind != "interface-automaton" {
            return Err(Error::Model(format!("expected interface-automaton, got {}", self.kind)));
        }
        let triples: Vec<(String, String, String)> = self
            .transitions
            .iter()
            .map(|t| (t.from.clone(), t.symbol.clone(), t.to.clone()))
            .collect();
        let a = InterfaceAutomaton::new(&self.inputs, &self.outputs, &self.states, &self.initial, &triples)?;
        let mut nondet = Vec::new();
        for block in &self.nondet {
            let from = a
                .state_index(&block.from)
                .ok_or_else(|| Error::UnknownState(block.from.clone()))?;
            let mut choices = Vec::new();
            for c in &block.choices {
                let label = if let Some(k) = a.callin_index(&c.symbol) {
                    Label::Callin(k)
                } else if let Some(k) = a.callback_index(&c.symbol) {
                    Label::Callback(k)
                } else {
                    return Err(Error::UnknownSymbol(c.symbol.clone()));
                };
                let to = a.state_index(&c.to).ok_or_else(|| Error::UnknownState(c.to.clone()))?;
                choices.push((label, to));
            }
            nondet.push(NondetBlock { from, choices });
        }
        let timing = match &self.timing {
            Some(t) => Timing {
                t_min: t.t_min,
                t_max: t.t_max,
                delays: t.delays.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            },
            None => Timing::default(),
        };
        let a = if nondet.is_empty() { a.normalized() } else { a };
        AsyncModel::new(a, nondet, timing)
    }

    /// Spec of a plain automaton (no timing, nondet or refinement).
    pub fn from_automaton(a: &InterfaceAutomaton, name: Option<&str>) -> Self {
        AutomatonSpec {
            kind: "interface-automaton".into(),
            name: name.map(String::from),
            source: None,
            inputs: a.callins().to_vec(),
            outputs: a.callbacks().to_vec(),
            states: a.state_names().to_vec(),
            initial: a.state_name(a.initial()).to_string(),
            transitions: a
                .transitions()
                .into_iter()
                .map(|t| TransitionSpec {
                    from: a.state_name(t.from).to_string(),
                    symbol: a.label_name(t.label).to_string(),
                    to: a.state_name(t.to).to_string(),
                })
                .collect(),
            timing: None,
            nondet: Vec::new(),
            refinement: None,
        }
    }
}

impl MealySpec {
    /// Inputs containing `wait` make a closed alphabet: the reserved
    /// symbols are then taken from the fixed layout, not from the file.
    pub fn to_machine(&self) -> Result<MealyMachine> {
        let alphabet = if self.inputs.iter().any(|i| i == WAIT) {
            let callins: Vec<&String> = self.inputs.iter().filter(|i| !is_reserved(i)).collect();
            let callbacks: Vec<&String> = self.outputs.iter().filter(|o| !is_reserved(o)).collect();
            if self.outputs.iter().any(|o| o == "oop") {
                Alphabet::closed_with_oop(callins, callbacks)?
            } else {
                Alphabet::closed(callins, callbacks)?
            }
        } else {
            Alphabet::plain(&self.inputs, &self.outputs)?
        };
        let alphabet = Arc::new(alphabet);
        let state = |n: &str| {
            self.states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| Error::UnknownState(n.to_string()))
        };
        let mut table = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            table.push((
                state(&t.from)?,
                alphabet.input(&t.input)?,
                alphabet.output(&t.output)?,
                state(&t.to)?,
            ));
        }
        MealyMachine::from_transitions(alphabet, self.states.clone(), state(&self.initial)?, &table)
    }

    pub fn from_machine(m: &MealyMachine, name: Option<&str>) -> Self {
        let a = m.alphabet();
        MealySpec {
            kind: "mealy".into(),
            name: name.map(String::from),
            source: None,
            inputs: a.inputs().iter().map(|s| s.name().to_string()).collect(),
            outputs: a.outputs().iter().map(|s| s.name().to_string()).collect(),
            states: m.state_names().to_vec(),
            initial: m.state_name(m.initial()).to_string(),
            transitions: m
                .transitions()
                .map(|(q, i, o, t)| MealyTransitionSpec {
                    from: m.state_name(q).to_string(),
                    input: a.input_name(i).to_string(),
                    output: a.output_name(o).to_string(),
                    to: m.state_name(t).to_string(),
                })
                .collect(),
        }
    }
}

impl PurposeSpec {
    pub fn to_purpose(&self) -> Result<LearningPurpose> {
        let triples: Vec<(&str, &str, &str)> = self
            .transitions
            .iter()
            .map(|t| (t.from.as_str(), t.symbol.as_str(), t.to.as_str()))
            .collect();
        let inputs: Vec<&str> = self.inputs.iter().map(String::as_str).collect();
        let states: Vec<&str> = self.states.iter().map(String::as_str).collect();
        let accepting: Vec<&str> = self.accepting.iter().map(String::as_str).collect();
        LearningPurpose::new(&inputs, &states, &self.initial, &accepting, &triples)
    }
}
