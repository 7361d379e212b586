//! Shared fixtures: a generator of random valid documents and an
//! evaluator that reads cells straight off the table.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cat_core::model::{
    Alias, Axis, CatDocument, Cell, Clause, CmpOp, Condition, Decimal, DocumentParts, Domain, Guard, GuardAtom,
    InputDecl, InputKind, Literal, OutputRow, Refinement, SubRow, Target, TransitionRule, Valuation, Value,
};
use proptest::prelude::*;

fn decimal() -> impl Strategy<Value = Decimal> {
    (-999i64..=999, 0u32..=2).prop_map(|(m, s)| Decimal::new(m, s))
}

fn kind() -> impl Strategy<Value = InputKind> {
    let unit = prop::option::of(prop::sample::select(vec!["m", "pct", "mps", "deg_s"]).prop_map(String::from));
    prop_oneof![
        Just(InputKind::Bool),
        (unit.clone(), prop::option::weighted(0.85, (decimal(), decimal()))).prop_map(|(unit, bounds)| {
            let domain = bounds.map(|(a, b)| {
                if a.cmp_value(b).is_gt() {
                    Domain { lo: b, hi: a }
                } else {
                    Domain { lo: a, hi: b }
                }
            });
            InputKind::Number { unit, domain }
        }),
        (1usize..=4).prop_map(|n| InputKind::Enum { members: (0..n).map(|i| format!("M{i}")).collect() }),
        unit.prop_map(|unit| InputKind::Vec3 { unit }),
    ]
}

fn op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(CmpOp::ALL.to_vec())
}

fn eq_op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne])
}

fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(Axis::ALL.to_vec())
}

fn clause(kind: &InputKind) -> BoxedStrategy<Clause> {
    match kind {
        InputKind::Bool => {
            (eq_op(), any::<bool>()).prop_map(|(op, b)| Clause::Compare { op, value: Literal::Bool(b) }).boxed()
        }
        InputKind::Number { .. } => prop_oneof![
            (op(), decimal()).prop_map(|(op, d)| Clause::Compare { op, value: Literal::Number(d) }),
            (decimal(), decimal()).prop_map(|(a, b)| {
                if a.cmp_value(b).is_gt() {
                    Clause::Range { lo: b, hi: a }
                } else {
                    Clause::Range { lo: a, hi: b }
                }
            }),
        ]
        .boxed(),
        InputKind::Enum { members } => {
            let members = members.clone();
            let n = members.len();
            prop_oneof![
                (eq_op(), prop::sample::select(members.clone()))
                    .prop_map(|(op, m)| Clause::Compare { op, value: Literal::Member(m) }),
                prop::sample::subsequence(members, 1..=n).prop_map(|members| Clause::Member { members }),
            ]
            .boxed()
        }
        InputKind::Vec3 { .. } => {
            (axis(), op(), decimal()).prop_map(|(axis, op, value)| Clause::Axis { axis, op, value }).boxed()
        }
    }
}

fn condition(kind: &InputKind) -> BoxedStrategy<Condition> {
    prop_oneof![
        1 => Just(Condition::any()),
        4 => prop::collection::vec(clause(kind), 1..=2).prop_map(Condition::new),
    ]
    .boxed()
}

fn atom(decl: &InputDecl) -> BoxedStrategy<Guard> {
    let name = decl.name.clone();
    let make = move |axis: Option<Axis>, op: CmpOp, value: Literal| {
        Guard::Atom(GuardAtom { input: name.clone(), axis, op, value })
    };
    match &decl.kind {
        InputKind::Bool => (eq_op(), any::<bool>()).prop_map(move |(op, b)| make(None, op, Literal::Bool(b))).boxed(),
        InputKind::Number { .. } => {
            (op(), decimal()).prop_map(move |(op, d)| make(None, op, Literal::Number(d))).boxed()
        }
        InputKind::Enum { members } => (eq_op(), prop::sample::select(members.clone()))
            .prop_map(move |(op, m)| make(None, op, Literal::Member(m)))
            .boxed(),
        InputKind::Vec3 { .. } => (axis(), op(), decimal())
            .prop_map(move |(a, op, d)| make(Some(a), op, Literal::Number(d)))
            .boxed(),
    }
}

fn guard(inputs: &[InputDecl]) -> BoxedStrategy<Guard> {
    let leaf = prop::sample::select(inputs.to_vec()).prop_flat_map(|d| atom(&d)).boxed();
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Guard::And),
            prop::collection::vec(inner, 2..=3).prop_map(Guard::Or),
        ]
    })
    .boxed()
}

fn note() -> impl Strategy<Value = Option<String>> {
    prop::option::weighted(0.3, "[a-z \"\\\\#\n\t]{0,16}")
}

#[derive(Debug, Clone)]
struct Shape {
    level: u32,
    refining: bool,
    inputs: Vec<InputDecl>,
    behaviors: usize,
    rows: usize,
}

fn shape() -> impl Strategy<Value = Shape> {
    (
        0u32..=2,
        prop::collection::vec(kind(), 1..=5),
        1usize..=3,
        0usize..=4,
    )
        .prop_map(|(level, kinds, behaviors, rows)| Shape {
            level,
            refining: level > 0,
            inputs: kinds.into_iter().enumerate().map(|(i, k)| InputDecl::new(format!("in{i}"), k)).collect(),
            behaviors,
            rows,
        })
}

fn subrow(shape: &Shape) -> BoxedStrategy<SubRow> {
    let inputs = shape.inputs.clone();
    let n = inputs.len();
    let behaviors: Vec<String> = (0..shape.behaviors).map(|i| format!("B{i}")).collect();
    let mut targets: Vec<Target> = behaviors.iter().cloned().map(Target::Behavior).collect();
    if shape.refining {
        targets.push(Target::Exit);
    }
    let refining = shape.refining;
    (
        prop::sample::select(behaviors),
        prop::sample::subsequence(inputs.clone(), 1..=n),
        prop::collection::vec((prop::sample::select(targets), guard(&inputs)), 0..=2),
        note(),
        any::<bool>(),
    )
        .prop_flat_map(move |(behavior, chosen, transitions, note, inherit)| {
            let mut conditions: Vec<BoxedStrategy<Cell>> = chosen
                .iter()
                .map(|d| {
                    let name = d.name.clone();
                    condition(&d.kind).prop_map(move |condition| Cell { input: name.clone(), condition }).boxed()
                })
                .collect();
            if refining && inherit {
                // a parent column this document uses without declaring
                conditions.push(
                    Just(Cell {
                        input: "parentFlag".to_string(),
                        condition: Condition::new(vec![Clause::Compare { op: CmpOp::Eq, value: Literal::Bool(true) }]),
                    })
                    .boxed(),
                );
            }
            let transitions: Vec<TransitionRule> =
                transitions.into_iter().map(|(target, guard)| TransitionRule { target, guard }).collect();
            (Just(behavior), conditions, Just(transitions), Just(note))
        })
        .prop_map(|(behavior, cells, transitions, note)| SubRow { behavior, cells, transitions, note })
        .boxed()
}

/// Random documents that pass validation. Transition targets are drawn
/// from the behavior pool, so documents whose targets are not all used by
/// some sub-row are discarded.
pub fn document() -> impl Strategy<Value = CatDocument> {
    shape()
        .prop_flat_map(|shape| {
            let rows = prop::collection::vec(prop::collection::vec(subrow(&shape), 1..=3), shape.rows);
            let name = "[a-z \"\\\\-]{1,12}";
            (Just(shape), name, rows, 0usize..=2)
        })
        .prop_filter_map("transition targets must be used behaviors", |(shape, name, rows, aliases)| {
            let rows: Vec<OutputRow> = rows
                .into_iter()
                .enumerate()
                .map(|(i, subrows)| OutputRow { output: format!("out{i}"), subrows })
                .collect();
            let refines = shape.refining.then(|| Refinement {
                document: "parent doc".to_string(),
                behavior: "Parent".to_string(),
                aliases: (0..aliases.min(rows.len()))
                    .map(|i| Alias { parent_output: format!("p{i}"), child_outputs: vec![rows[i].output.clone()] })
                    .collect(),
            });
            CatDocument::new(DocumentParts { name, level: shape.level, refines, inputs: shape.inputs, rows }).ok()
        })
}

/// Reads the table directly: an output is expected when every cell of one
/// of its active-behavior sub-rows holds; the first firing rule in row,
/// sub-row, rule order picks the next behavior.
pub fn brute_force(doc: &CatDocument, v: &Valuation) -> (Vec<String>, String) {
    let mut expected: Vec<String> = Vec::new();
    let mut next: Option<String> = None;
    for row in doc.rows() {
        for sub in &row.subrows {
            if sub.behavior != v.active_behavior {
                continue;
            }
            let mut all = true;
            for cell in &sub.cells {
                let value = &v.values[&cell.input];
                for clause in &cell.condition.clauses {
                    if !clause_holds(clause, value) {
                        all = false;
                    }
                }
            }
            if all && !expected.contains(&row.output) {
                expected.push(row.output.clone());
            }
            for rule in &sub.transitions {
                if next.is_none() && guard_holds(&rule.guard, &v.values) {
                    next = Some(rule.target.name().to_string());
                }
            }
        }
    }
    (expected, next.unwrap_or_else(|| v.active_behavior.clone()))
}

fn cmp(op: CmpOp, a: f64, b: f64) -> bool {
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

fn literal_holds(op: CmpOp, value: &Value, literal: &Literal) -> bool {
    let equal = match (value, literal) {
        (Value::Number(n), Literal::Number(d)) => return cmp(op, *n, d.to_f64()),
        (Value::Bool(a), Literal::Bool(b)) => a == b,
        (Value::Enum(a), Literal::Member(b)) => a == b,
        _ => panic!("kind mismatch between {value:?} and {literal:?}"),
    };
    match op {
        CmpOp::Eq => equal,
        CmpOp::Ne => !equal,
        _ => panic!("ordering on a non-number"),
    }
}

fn component(value: &Value, axis: Axis) -> f64 {
    let Value::Vec3(v) = value else { panic!("axis access on {value:?}") };
    match axis {
        Axis::X => v.x,
        Axis::Y => v.y,
        Axis::Z => v.z,
    }
}

fn clause_holds(clause: &Clause, value: &Value) -> bool {
    match clause {
        Clause::Any => true,
        Clause::Compare { op, value: lit } => literal_holds(*op, value, lit),
        Clause::Range { lo, hi } => {
            let Value::Number(n) = value else { panic!("range on {value:?}") };
            lo.to_f64() <= *n && *n <= hi.to_f64()
        }
        Clause::Member { members } => {
            let Value::Enum(m) = value else { panic!("membership on {value:?}") };
            members.contains(m)
        }
        Clause::Axis { axis, op, value: d } => cmp(*op, component(value, *axis), d.to_f64()),
    }
}

fn guard_holds(guard: &Guard, values: &BTreeMap<String, Value>) -> bool {
    match guard {
        Guard::Atom(a) => {
            let value = &values[&a.input];
            match a.axis {
                Some(axis) => {
                    let Literal::Number(d) = &a.value else { panic!("axis compared to non-number") };
                    cmp(a.op, component(value, axis), d.to_f64())
                }
                None => literal_holds(a.op, value, &a.value),
            }
        }
        Guard::And(parts) => parts.iter().all(|g| guard_holds(g, values)),
        Guard::Or(parts) => parts.iter().any(|g| guard_holds(g, values)),
    }
}

/// The parent column that generated refining documents borrow.
pub fn parent_inputs() -> Vec<InputDecl> {
    vec![InputDecl::new("parentFlag", InputKind::Bool)]
}

/// Resolves a generated document against [`parent_inputs`].
pub fn resolved(doc: CatDocument) -> CatDocument {
    if doc.is_resolved() {
        doc
    } else {
        doc.resolve(&parent_inputs()).expect("the borrowed column is declared by the parent")
    }
}

fn value(kind: &InputKind) -> BoxedStrategy<Value> {
    match kind {
        InputKind::Bool => any::<bool>().prop_map(Value::Bool).boxed(),
        InputKind::Number { domain, .. } => {
            let domain = *domain;
            decimal()
                .prop_map(move |d| {
                    let x = d.to_f64();
                    Value::Number(match &domain {
                        Some(dm) => x.clamp(dm.lo.to_f64(), dm.hi.to_f64()),
                        None => x,
                    })
                })
                .boxed()
        }
        InputKind::Enum { members } => prop::sample::select(members.clone()).prop_map(Value::Enum).boxed(),
        InputKind::Vec3 { .. } => (decimal(), decimal(), decimal())
            .prop_map(|(x, y, z)| Value::Vec3(cat_core::model::Vec3 { x: x.to_f64(), y: y.to_f64(), z: z.to_f64() }))
            .boxed(),
    }
}

/// A complete valuation of a resolved document under one of its behaviors.
pub fn valuation(doc: &CatDocument) -> BoxedStrategy<Valuation> {
    let columns: Vec<(String, BoxedStrategy<Value>)> =
        doc.inputs().iter().map(|d| (d.name.clone(), value(&d.kind))).collect();
    let names: Vec<String> = columns.iter().map(|(n, _)| n.clone()).collect();
    let values: Vec<BoxedStrategy<Value>> = columns.into_iter().map(|(_, s)| s).collect();
    let behaviors: Vec<String> = doc.behaviors().iter().map(|b| b.to_string()).collect();
    let behavior = if behaviors.is_empty() { Just("B0".to_string()).boxed() } else { prop::sample::select(behaviors).boxed() };
    (values, behavior)
        .prop_map(move |(values, active_behavior)| Valuation {
            values: names.iter().cloned().zip(values).collect(),
            active_behavior,
        })
        .boxed()
}

/// A resolved random document with at least one row, and a valuation.
pub fn document_and_valuation() -> impl Strategy<Value = (CatDocument, Valuation)> {
    document()
        .prop_filter("needs a behavior", |d| !d.rows().is_empty())
        .prop_map(resolved)
        .prop_flat_map(|d| {
            let v = valuation(&d);
            (Just(d), v)
        })
}
