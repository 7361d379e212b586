mod common;

use cat_core::logic::{compile, evaluate, trace_step};
use cat_core::model::{Cell, CatDocument, Clause, CmpOp, Condition, InputKind, Literal, Valuation, Value};
use common::{brute_force, document_and_valuation};
use proptest::prelude::*;

fn lamp() -> CatDocument {
    cat_core::parser::parse(
        "cat \"lamp\"\nlevel 0\ninput power : bool\ninput level : number domain [0, 10]\n\
         row on : Idle\n  power : == true\n  level : > 2\n  -> Busy when level > 8\n\
         row dim : Idle\n  level : <= 2\nrow on : Busy\n  power : == true\n",
    )
    .document
    .unwrap()
}

#[test]
fn evaluation_matches_the_table_by_hand() {
    let doc = lamp();
    let v = Valuation::new("Idle").with("power", Value::Bool(true)).with("level", Value::Number(9.0));
    let out = evaluate(&doc, &v).unwrap();
    assert_eq!(out.expected_outputs, ["on"]);
    assert_eq!(out.next_behavior, "Busy");
    assert!(out.transitioned());
    assert!(!out.undefined_response);

    let v = Valuation::new("Busy").with("power", Value::Bool(false)).with("level", Value::Number(1.0));
    let out = evaluate(&doc, &v).unwrap();
    assert!(out.expected_outputs.is_empty());
    assert!(out.undefined_response);
}

#[test]
fn evaluate_rejects_bad_snapshots() {
    let doc = lamp();
    let missing = Valuation::new("Idle").with("power", Value::Bool(true));
    assert_eq!(evaluate(&doc, &missing).unwrap_err().code(), "missing-value");
    let unknown = Valuation::new("Nope").with("power", Value::Bool(true)).with("level", Value::Number(1.0));
    assert_eq!(evaluate(&doc, &unknown).unwrap_err().code(), "unknown-behavior");
    let outside = Valuation::new("Idle").with("power", Value::Bool(true)).with("level", Value::Number(11.0));
    assert!(evaluate(&doc, &outside).is_err());
}

#[test]
fn compile_yields_one_implication_per_subrow() {
    let doc = lamp();
    let imps = compile(&doc);
    assert_eq!(imps.len(), doc.subrows().count());
    assert_eq!(imps[0].consequent, "on");
    assert_eq!(imps[0].antecedent.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn evaluate_agrees_with_brute_force((doc, v) in document_and_valuation()) {
        let out = evaluate(&doc, &v).unwrap();
        let (expected, next) = brute_force(&doc, &v);
        prop_assert_eq!(&out.expected_outputs, &expected);
        prop_assert_eq!(&out.next_behavior, &next);
        prop_assert_eq!(out.undefined_response, expected.is_empty() && next == v.active_behavior);
    }

    #[test]
    fn implications_fire_exactly_when_outputs_are_expected((doc, v) in document_and_valuation()) {
        let out = evaluate(&doc, &v).unwrap();
        for imp in compile(&doc) {
            if imp.behavior == v.active_behavior && imp.antecedent_holds(&v) {
                prop_assert!(out.expected_outputs.contains(&imp.consequent));
                prop_assert!(out.fired_subrows.contains(&imp.origin));
            } else {
                prop_assert!(!out.fired_subrows.contains(&imp.origin));
            }
        }
    }

    #[test]
    fn blank_cells_do_not_matter((doc, v) in document_and_valuation(), pick in any::<prop::sample::Index>()) {
        let imps = compile(&doc);
        let imp = pick.get(&imps);
        let before = imp.antecedent_holds(&v);
        let mut changed = v.clone();
        for decl in doc.inputs() {
            if imp.antecedent.iter().any(|a| a.input == decl.name) {
                continue;
            }
            let other = match &decl.kind {
                InputKind::Bool => Value::Bool(!matches!(v.values[&decl.name], Value::Bool(true))),
                InputKind::Enum { members } => Value::Enum(members.last().unwrap().clone()),
                _ => continue,
            };
            changed.set(decl.name.clone(), other);
        }
        prop_assert_eq!(imp.antecedent_holds(&changed), before);
    }

    #[test]
    fn adding_a_cell_never_adds_outputs((doc, v) in document_and_valuation(), pick in any::<prop::sample::Index>()) {
        let rows: Vec<_> = doc.subrows().map(|(at, _, s)| (at, s.clone())).collect();
        let (at, sub) = pick.get(&rows);
        let Some(free) = doc.inputs().iter().find(|d| sub.cell(&d.name).is_none() && d.kind == InputKind::Bool) else {
            return Ok(());
        };
        let mut parts = doc.to_parts();
        parts.rows[at.row].subrows[at.sub].cells.push(Cell {
            input: free.name.clone(),
            condition: Condition::new(vec![Clause::Compare { op: CmpOp::Eq, value: Literal::Bool(true) }]),
        });
        let narrower = CatDocument::new(parts).unwrap();
        let wide = evaluate(&doc, &v).unwrap();
        let narrow = evaluate(&narrower, &v).unwrap();
        for o in &narrow.expected_outputs {
            prop_assert!(wide.expected_outputs.contains(o));
        }
        prop_assert_eq!(narrow.next_behavior, wide.next_behavior);
    }

    #[test]
    fn trace_step_stays_put_without_a_firing_rule((doc, v) in document_and_valuation()) {
        let out = evaluate(&doc, &v).unwrap();
        let next = trace_step(&doc, &v).unwrap();
        prop_assert_eq!(&next.values, &v.values);
        if out.firing_transitions.is_empty() {
            prop_assert_eq!(&next, &v);
        } else {
            prop_assert_eq!(&next.active_behavior, &out.next_behavior);
        }
    }
}
