//! Scripted trace generator. The physics is bookkeeping only: a battery
//! counter that drains or charges with the behavior, and a position that
//! integrates a rate input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::logic::evaluate;
use crate::model::{Axis, CatDocument, InputKind, Target, Valuation, Value, Vec3};
use crate::monitor::{TraceRecord, ViolationKind};
use crate::CatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub value: Value,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    Constant { value: Value },
    /// Segments played in order, then repeated.
    Cycle { segments: Vec<Segment> },
    /// Drains by `drain` per step, or charges by `charge` while the active
    /// behavior is `charging_behavior`. Clamped to the input's domain.
    Battery { initial: f64, drain: f64, charge: f64, charging_behavior: String },
    /// Adds `dt` times the previous step's value of number input `rate` to
    /// one axis of a vec3 each step.
    Integrate { rate: String, axis: Axis, start: Vec3, dt: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "edit", rename_all = "kebab-case")]
pub enum FaultEdit {
    /// Removes an output from the logged record.
    DropOutput { output: String },
    /// Adds an output to the logged record.
    AddOutput { output: String },
    /// Overrides inputs before evaluation; outputs follow the table.
    SetInputs { values: BTreeMap<String, Value> },
    /// Switches the robot to a behavior no transition asked for.
    ForceBehavior { behavior: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultInjection {
    pub step: usize,
    pub edit: FaultEdit,
}

impl FaultInjection {
    /// The violation this fault is meant to provoke. Input overrides are
    /// used to push the robot into an undefined response.
    pub fn kind(&self) -> ViolationKind {
        match self.edit {
            FaultEdit::DropOutput { .. } => ViolationKind::MissingOutput,
            FaultEdit::AddOutput { .. } => ViolationKind::UnexpectedOutput,
            FaultEdit::SetInputs { .. } => ViolationKind::UndefinedResponse,
            FaultEdit::ForceBehavior { .. } => ViolationKind::IllegalTransition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScript {
    pub duration: usize,
    #[serde(default)]
    pub initial_behavior: Option<String>,
    pub input_profiles: BTreeMap<String, Profile>,
    #[serde(default)]
    pub fault_injections: Vec<FaultInjection>,
}

fn bad(message: impl Into<String>) -> CatError {
    CatError::BadScript(message.into())
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn check_script(script: &SimScript, doc: &CatDocument) -> Result<(), CatError> {
    if !doc.is_resolved() {
        return Err(bad(format!("`{}` has unresolved inherited inputs", doc.name())));
    }
    for decl in doc.inputs() {
        let profile = script
            .input_profiles
            .get(&decl.name)
            .ok_or_else(|| bad(format!("no profile for input `{}`", decl.name)))?;
        match (profile, &decl.kind) {
            (Profile::Constant { .. }, _) => {}
            (Profile::Cycle { segments }, _) => {
                if segments.is_empty() || segments.iter().any(|s| s.steps == 0) {
                    return Err(bad(format!("cycle for `{}` needs segments of at least one step", decl.name)));
                }
            }
            (Profile::Battery { charging_behavior, .. }, InputKind::Number { domain: Some(_), .. }) => {
                if !doc.has_behavior(charging_behavior) {
                    return Err(bad(format!("unknown charging behavior `{charging_behavior}`")));
                }
            }
            (Profile::Integrate { rate, .. }, InputKind::Vec3 { .. }) => {
                if !matches!(doc.input(rate).map(|d| &d.kind), Some(InputKind::Number { .. })) {
                    return Err(bad(format!("`{}` integrates `{rate}`, which is not a number input", decl.name)));
                }
            }
            _ => return Err(bad(format!("profile does not fit the {} input `{}`", decl.kind.name(), decl.name))),
        }
    }
    if let Some(extra) = script.input_profiles.keys().find(|k| doc.input(k).is_none()) {
        return Err(bad(format!("profile for undeclared input `{extra}`")));
    }
    if let Some(b) = &script.initial_behavior {
        if !doc.has_behavior(b) {
            return Err(bad(format!("unknown initial behavior `{b}`")));
        }
    }
    for fault in &script.fault_injections {
        if fault.step >= script.duration {
            return Err(bad(format!("fault at step {} is past the end ({})", fault.step, script.duration)));
        }
        if let FaultEdit::ForceBehavior { behavior } = &fault.edit {
            if !doc.has_behavior(behavior) {
                return Err(bad(format!("unknown behavior `{behavior}` in fault")));
            }
        }
        if let FaultEdit::SetInputs { values } = &fault.edit {
            if let Some(extra) = values.keys().find(|k| doc.input(k).is_none()) {
                return Err(bad(format!("fault sets undeclared input `{extra}`")));
            }
        }
    }
    Ok(())
}

fn cycle_value(segments: &[Segment], step: usize) -> Value {
    let period: usize = segments.iter().map(|s| s.steps).sum();
    let mut k = step % period;
    for s in segments {
        if k < s.steps {
            return s.value.clone();
        }
        k -= s.steps;
    }
    unreachable!("step reduced modulo the period")
}

/// Runs `script` against `doc`, one record per step with `t = step`.
pub fn simulate(script: &SimScript, doc: &CatDocument) -> Result<Vec<TraceRecord>, CatError> {
    check_script(script, doc)?;
    if script.duration == 0 {
        return Ok(Vec::new());
    }
    let mut behavior = match &script.initial_behavior {
        Some(b) => b.clone(),
        None => doc
            .initial_behavior()
            .ok_or_else(|| bad(format!("`{}` has no behaviors", doc.name())))?
            .to_string(),
    };
    let mut state: BTreeMap<String, Value> = BTreeMap::new();
    for (name, profile) in &script.input_profiles {
        match profile {
            Profile::Battery { initial, .. } => {
                state.insert(name.clone(), Value::Number(*initial));
            }
            Profile::Integrate { start, .. } => {
                state.insert(name.clone(), Value::Vec3(*start));
            }
            _ => {}
        }
    }

    let mut records = Vec::with_capacity(script.duration);
    for step in 0..script.duration {
        let faults: Vec<&FaultEdit> =
            script.fault_injections.iter().filter(|f| f.step == step).map(|f| &f.edit).collect();
        let mut values = BTreeMap::new();
        for decl in doc.inputs() {
            let value = match &script.input_profiles[&decl.name] {
                Profile::Constant { value } => value.clone(),
                Profile::Cycle { segments } => cycle_value(segments, step),
                Profile::Battery { .. } | Profile::Integrate { .. } => state[&decl.name].clone(),
            };
            values.insert(decl.name.clone(), value);
        }
        for edit in &faults {
            match edit {
                FaultEdit::SetInputs { values: overrides } => values.extend(overrides.clone()),
                FaultEdit::ForceBehavior { behavior: forced } => behavior = forced.clone(),
                _ => {}
            }
        }

        let v = Valuation { values, active_behavior: behavior.clone() };
        let outcome = evaluate(doc, &v).map_err(|e| bad(format!("step {step}: {e}")))?;
        let mut outputs = outcome.expected_outputs.clone();
        for edit in &faults {
            match edit {
                FaultEdit::DropOutput { output } => outputs.retain(|o| o != output),
                FaultEdit::AddOutput { output } if !outputs.contains(output) => outputs.push(output.clone()),
                _ => {}
            }
        }

        for decl in doc.inputs() {
            match &script.input_profiles[&decl.name] {
                Profile::Battery { drain, charge, charging_behavior, .. } => {
                    let Some(Value::Number(level)) = state.get(&decl.name).cloned() else { continue };
                    let next = if behavior == *charging_behavior { level + charge } else { level - drain };
                    let (lo, hi) = match &decl.kind {
                        InputKind::Number { domain: Some(d), .. } => (d.lo.to_f64(), d.hi.to_f64()),
                        _ => (f64::NEG_INFINITY, f64::INFINITY),
                    };
                    state.insert(decl.name.clone(), Value::Number(round6(next.clamp(lo, hi))));
                }
                Profile::Integrate { rate, axis, dt, .. } => {
                    let Some(Value::Vec3(mut pos)) = state.get(&decl.name).cloned() else { continue };
                    let Some(Value::Number(r)) = v.get(rate).cloned() else { continue };
                    match axis {
                        Axis::X => pos.x = round6(pos.x + r * dt),
                        Axis::Y => pos.y = round6(pos.y + r * dt),
                        Axis::Z => pos.z = round6(pos.z + r * dt),
                    }
                    state.insert(decl.name.clone(), Value::Vec3(pos));
                }
                _ => {}
            }
        }

        records.push(TraceRecord {
            t: step as f64,
            inputs: v.values,
            observed_outputs: outputs,
            observed_behavior: Some(behavior.clone()),
        });
        if let Some(at) = outcome.firing_transitions.first() {
            match &doc.transition(*at).expect("firing rule exists").target {
                Target::Behavior(b) => behavior = b.clone(),
                Target::Exit => return Err(bad(format!("step {step}: `{}` exits to its parent", doc.name()))),
            }
        }
    }
    Ok(records)
}
