//! Input kinds, cell conditions and transition guards.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::value::{Axis, CmpOp, Decimal, Value, Vec3};

/// Closed numeric domain `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Decimal,
    pub hi: Decimal,
}

impl Domain {
    pub fn contains(&self, value: f64) -> bool {
        self.lo.to_f64() <= value && value <= self.hi.to_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputKind {
    Bool,
    Number {
        unit: Option<String>,
        domain: Option<Domain>,
    },
    Enum {
        members: Vec<String>,
    },
    Vec3 {
        unit: Option<String>,
    },
}

impl InputKind {
    pub fn name(&self) -> &'static str {
        match self {
            InputKind::Bool => "bool",
            InputKind::Number { .. } => "number",
            InputKind::Enum { .. } => "enum",
            InputKind::Vec3 { .. } => "vec3",
        }
    }

    /// Checks that `value` has this kind and lies in the declared domain or
    /// member set. Returns `Err(false)` on a kind mismatch and `Err(true)`
    /// when the kind matches but the value is out of range.
    pub fn admits(&self, value: &Value) -> Result<(), bool> {
        match (self, value) {
            (InputKind::Bool, Value::Bool(_)) => Ok(()),
            (InputKind::Number { domain, .. }, Value::Number(n)) => {
                if !n.is_finite() || domain.is_some_and(|d| !d.contains(*n)) {
                    Err(true)
                } else {
                    Ok(())
                }
            }
            (InputKind::Enum { members }, Value::Enum(m)) => {
                if members.contains(m) {
                    Ok(())
                } else {
                    Err(true)
                }
            }
            (InputKind::Vec3 { .. }, Value::Vec3(v)) => {
                if [v.x, v.y, v.z].iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(true)
                }
            }
            _ => Err(false),
        }
    }

    /// Reads a command-line value of this kind: `true`/`false`, a number,
    /// an enum member, or `x,y,z` (parentheses optional) for vectors. Domain
    /// and membership are left to [`admits`](Self::admits).
    pub fn parse_value(&self, text: &str) -> Option<Value> {
        let text = text.trim();
        let number = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
        match self {
            InputKind::Bool => match text {
                "true" => Some(Value::Bool(true)),
                "false" => Some(Value::Bool(false)),
                _ => None,
            },
            InputKind::Number { .. } => number(text).map(Value::Number),
            InputKind::Enum { .. } => (!text.is_empty()).then(|| Value::Enum(text.to_string())),
            InputKind::Vec3 { .. } => {
                let inner = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(text);
                let parts: Vec<f64> = inner.split(',').map(number).collect::<Option<_>>()?;
                match parts[..] {
                    [x, y, z] => Some(Value::Vec3(Vec3 { x, y, z })),
                    _ => None,
                }
            }
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputKind::Bool => f.write_str("bool"),
            InputKind::Number { unit, domain } => {
                f.write_str("number")?;
                if let Some(unit) = unit {
                    write!(f, " unit {unit}")?;
                }
                if let Some(d) = domain {
                    write!(f, " domain [{}, {}]", d.lo, d.hi)?;
                }
                Ok(())
            }
            InputKind::Enum { members } => write!(f, "enum {{{}}}", members.join(", ")),
            InputKind::Vec3 { unit } => {
                f.write_str("vec3")?;
                if let Some(unit) = unit {
                    write!(f, " unit {unit}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Bool(bool),
    Number(Decimal),
    Member(String),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Number(d) => write!(f, "{d}"),
            Literal::Member(m) => f.write_str(m),
        }
    }
}

/// One conjunct of a cell condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "lowercase")]
pub enum Clause {
    Any,
    Compare { op: CmpOp, value: Literal },
    /// Inclusive range `in [lo, hi]`.
    Range { lo: Decimal, hi: Decimal },
    /// Enumeration membership `in {A, B}`.
    Member { members: Vec<String> },
    /// Vector component access `z > 0`.
    Axis { axis: Axis, op: CmpOp, value: Decimal },
}

impl Clause {
    pub fn holds(&self, value: &Value) -> bool {
        match (self, value) {
            (Clause::Any, _) => true,
            (Clause::Compare { op, value: lit }, v) => compare(*op, v, lit),
            (Clause::Range { lo, hi }, Value::Number(n)) => lo.to_f64() <= *n && *n <= hi.to_f64(),
            (Clause::Member { members }, Value::Enum(m)) => members.contains(m),
            (Clause::Axis { axis, op, value: lit }, Value::Vec3(v)) => op.test_f64(v.get(*axis), lit.to_f64()),
            _ => false,
        }
    }

    /// Numeric constants the clause mentions, with the axis they apply to.
    fn constants(&self) -> Vec<(Option<Axis>, Decimal)> {
        match self {
            Clause::Compare { value: Literal::Number(d), .. } => vec![(None, *d)],
            Clause::Range { lo, hi } => vec![(None, *lo), (None, *hi)],
            Clause::Axis { axis, value, .. } => vec![(Some(*axis), *value)],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Any => f.write_str("any"),
            Clause::Compare { op, value } => write!(f, "{op} {value}"),
            Clause::Range { lo, hi } => write!(f, "in [{lo}, {hi}]"),
            Clause::Member { members } => write!(f, "in {{{}}}", members.join(", ")),
            Clause::Axis { axis, op, value } => write!(f, "{} {op} {value}", axis.name()),
        }
    }
}

fn compare(op: CmpOp, value: &Value, literal: &Literal) -> bool {
    match (value, literal) {
        (Value::Bool(b), Literal::Bool(l)) => op.test_eq(b == l),
        (Value::Number(n), Literal::Number(d)) => op.test_f64(*n, d.to_f64()),
        (Value::Enum(m), Literal::Member(l)) => op.test_eq(m == l),
        _ => false,
    }
}

/// Why a clause or guard atom does not fit an input's kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindError {
    pub code: &'static str,
    pub message: String,
}

impl KindError {
    fn mismatch(message: String) -> Self {
        Self { code: "kind-mismatch", message }
    }
}

fn check_literal(op: CmpOp, literal: &Literal, kind: &InputKind) -> Result<(), KindError> {
    match (kind, literal) {
        (InputKind::Bool, Literal::Bool(_)) if op.is_equality() => Ok(()),
        (InputKind::Bool, Literal::Bool(_)) => Err(KindError::mismatch(format!(
            "operator `{op}` cannot order a bool input; use `==` or `!=`"
        ))),
        (InputKind::Number { .. }, Literal::Number(_)) => Ok(()),
        (InputKind::Enum { members }, Literal::Member(m)) => {
            if !op.is_equality() {
                Err(KindError::mismatch(format!(
                    "operator `{op}` cannot order an enum input; use `==` or `!=`"
                )))
            } else if !members.contains(m) {
                Err(KindError {
                    code: "unknown-member",
                    message: format!("`{m}` is not a member of {{{}}}", members.join(", ")),
                })
            } else {
                Ok(())
            }
        }
        (InputKind::Vec3 { .. }, _) => Err(KindError::mismatch(
            "a vec3 input is compared per component, e.g. `z > 0`".to_string(),
        )),
        (kind, literal) => Err(KindError::mismatch(format!(
            "literal `{literal}` does not fit a {} input",
            kind.name()
        ))),
    }
}

pub fn check_clause(clause: &Clause, kind: &InputKind) -> Result<(), KindError> {
    match clause {
        Clause::Any => Ok(()),
        Clause::Compare { op, value } => check_literal(*op, value, kind),
        Clause::Range { lo, hi } => {
            if !matches!(kind, InputKind::Number { .. }) {
                return Err(KindError::mismatch(format!(
                    "range `in [..]` needs a number input, found {}",
                    kind.name()
                )));
            }
            if lo.cmp_value(*hi).is_gt() {
                return Err(KindError {
                    code: "bad-range",
                    message: format!("range lower bound {lo} exceeds upper bound {hi}"),
                });
            }
            Ok(())
        }
        Clause::Member { members } => match kind {
            InputKind::Enum { members: declared } => match members.iter().find(|m| !declared.contains(m)) {
                Some(m) => Err(KindError {
                    code: "unknown-member",
                    message: format!("`{m}` is not a member of {{{}}}", declared.join(", ")),
                }),
                None => Ok(()),
            },
            other => Err(KindError::mismatch(format!(
                "membership `in {{..}}` needs an enum input, found {}",
                other.name()
            ))),
        },
        Clause::Axis { .. } => match kind {
            InputKind::Vec3 { .. } => Ok(()),
            other => Err(KindError::mismatch(format!(
                "component access needs a vec3 input, found {}",
                other.name()
            ))),
        },
    }
}

/// A cell entry: a conjunction of clauses over one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub clauses: Vec<Clause>,
}

impl Condition {
    pub fn any() -> Self {
        Self { clauses: vec![Clause::Any] }
    }

    pub fn new(clauses: Vec<Clause>) -> Self {
        Self { clauses }
    }

    pub fn holds(&self, value: &Value) -> bool {
        self.clauses.iter().all(|c| c.holds(value))
    }

    pub fn check_kind(&self, kind: &InputKind) -> Result<(), KindError> {
        if self.clauses.is_empty() {
            return Err(KindError::mismatch("empty condition".to_string()));
        }
        if self.clauses.len() > 1 && self.clauses.contains(&Clause::Any) {
            return Err(KindError::mismatch("`any` cannot be combined with other clauses".to_string()));
        }
        self.clauses.iter().try_for_each(|c| check_clause(c, kind))
    }

    /// Numeric constants mentioned by the condition, keyed by vector axis.
    pub fn constants(&self) -> Vec<(Option<Axis>, Decimal)> {
        self.clauses.iter().flat_map(Clause::constants).collect()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// Finds a value of `kind` satisfying every condition in `conditions`, by
/// exact interval reasoning over numbers and exhaustive search elsewhere.
pub fn joint_witness(kind: &InputKind, conditions: &[&Condition]) -> Option<Value> {
    let clauses: Vec<&Clause> = conditions.iter().flat_map(|c| c.clauses.iter()).collect();
    match kind {
        InputKind::Bool => [false, true]
            .into_iter()
            .map(Value::Bool)
            .find(|v| clauses.iter().all(|c| c.holds(v))),
        InputKind::Enum { members } => members
            .iter()
            .map(|m| Value::Enum(m.clone()))
            .find(|v| clauses.iter().all(|c| c.holds(v))),
        InputKind::Number { domain, .. } => {
            let constants: Vec<f64> = clauses
                .iter()
                .flat_map(|c| c.constants())
                .map(|(_, d)| d.to_f64())
                .collect();
            real_candidates(&constants, domain.map(|d| (d.lo.to_f64(), d.hi.to_f64())))
                .into_iter()
                .map(Value::Number)
                .find(|v| clauses.iter().all(|c| c.holds(v)))
        }
        InputKind::Vec3 { .. } => {
            let mut components = [0.0; 3];
            for axis in Axis::ALL {
                let axis_clauses: Vec<(CmpOp, f64)> = clauses
                    .iter()
                    .filter_map(|c| match c {
                        Clause::Axis { axis: a, op, value } if *a == axis => Some((*op, value.to_f64())),
                        _ => None,
                    })
                    .collect();
                let constants: Vec<f64> = axis_clauses.iter().map(|(_, c)| *c).collect();
                components[axis.index()] = real_candidates(&constants, None)
                    .into_iter()
                    .find(|x| axis_clauses.iter().all(|(op, c)| op.test_f64(*x, *c)))?;
            }
            let v = Value::Vec3(Vec3::new(components[0], components[1], components[2]));
            clauses.iter().all(|c| c.holds(&v)).then_some(v)
        }
    }
}

/// Points that witness every non-empty set of the form "interval minus
/// finitely many points" whose endpoints and holes come from `constants`:
/// the constants, the bounds, and the midpoint of every adjacent pair.
fn real_candidates(constants: &[f64], bounds: Option<(f64, f64)>) -> Vec<f64> {
    let mut points: Vec<f64> = constants.to_vec();
    match bounds {
        Some((lo, hi)) => {
            points.push(lo);
            points.push(hi);
            points.retain(|p| lo <= *p && *p <= hi);
        }
        None => {
            let lo = points.iter().copied().fold(0.0f64, f64::min);
            let hi = points.iter().copied().fold(0.0f64, f64::max);
            points.push(lo - 1.0);
            points.push(hi + 1.0);
            points.push(0.0);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mids: Vec<f64> = points.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
    points.extend(mids);
    points.sort_by(f64::total_cmp);
    points
}

/// A leaf of a transition guard: `input(.axis)? op literal`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardAtom {
    pub input: String,
    pub axis: Option<Axis>,
    pub op: CmpOp,
    pub value: Literal,
}

impl GuardAtom {
    pub fn holds(&self, value: &Value) -> bool {
        match (self.axis, value, &self.value) {
            (Some(axis), Value::Vec3(v), Literal::Number(d)) => self.op.test_f64(v.get(axis), d.to_f64()),
            (Some(_), _, _) => false,
            (None, v, lit) => compare(self.op, v, lit),
        }
    }

    pub fn check_kind(&self, kind: &InputKind) -> Result<(), KindError> {
        match self.axis {
            Some(axis) => match (kind, &self.value) {
                (InputKind::Vec3 { .. }, Literal::Number(_)) => Ok(()),
                (InputKind::Vec3 { .. }, lit) => Err(KindError::mismatch(format!(
                    "component `{}` compares against numbers, found `{lit}`",
                    axis.name()
                ))),
                (other, _) => Err(KindError::mismatch(format!(
                    "component access needs a vec3 input, found {}",
                    other.name()
                ))),
            },
            None => check_literal(self.op, &self.value, kind),
        }
    }
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.input)?;
        if let Some(axis) = self.axis {
            write!(f, ".{}", axis.name())?;
        }
        write!(f, " {} {}", self.op, self.value)
    }
}

/// Boolean combination of guard atoms. `And`/`Or` always hold two or more
/// operands; a single operand is stored unwrapped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "lowercase")]
pub enum Guard {
    Atom(GuardAtom),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> bool {
        match self {
            Guard::Atom(atom) => lookup(&atom.input).is_some_and(|v| atom.holds(&v)),
            Guard::And(parts) => parts.iter().all(|g| g.eval(lookup)),
            Guard::Or(parts) => parts.iter().any(|g| g.eval(lookup)),
        }
    }

    pub fn atoms(&self) -> Vec<&GuardAtom> {
        match self {
            Guard::Atom(atom) => vec![atom],
            Guard::And(parts) | Guard::Or(parts) => parts.iter().flat_map(Guard::atoms).collect(),
        }
    }
}

fn join_guards(f: &mut fmt::Formatter<'_>, parts: &[Guard], sep: &str, in_and: bool) -> fmt::Result {
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        match part {
            Guard::Atom(atom) => write!(f, "{atom}")?,
            // `&` binds tighter than `|`
            Guard::And(inner) if !in_and => join_guards(f, inner, " & ", true)?,
            // nested groups keep their parentheses so the tree shape survives a round trip
            Guard::And(inner) => {
                f.write_str("(")?;
                join_guards(f, inner, " & ", true)?;
                f.write_str(")")?;
            }
            Guard::Or(inner) => {
                f.write_str("(")?;
                join_guards(f, inner, " | ", false)?;
                f.write_str(")")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Atom(atom) => write!(f, "{atom}"),
            Guard::And(parts) => join_guards(f, parts, " & ", true),
            Guard::Or(parts) => join_guards(f, parts, " | ", false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(text: &str) -> Decimal {
        Decimal::parse(text).unwrap()
    }

    #[test]
    fn command_line_values() {
        let v3 = InputKind::Vec3 { unit: None };
        assert_eq!(v3.parse_value("(0, 0,1.5)"), Some(Value::Vec3(Vec3 { x: 0.0, y: 0.0, z: 1.5 })));
        assert_eq!(v3.parse_value("1,2"), None);
        assert_eq!(InputKind::Bool.parse_value("yes"), None);
        let n = InputKind::Number { unit: None, domain: Some(Domain { lo: num("0"), hi: num("1") }) };
        assert_eq!(n.parse_value("7"), Some(Value::Number(7.0)));
        assert_eq!(n.parse_value("inf"), None);
    }

    fn number_kind(lo: &str, hi: &str) -> InputKind {
        InputKind::Number { unit: None, domain: Some(Domain { lo: num(lo), hi: num(hi) }) }
    }

    #[test]
    fn bool_ordering_is_a_kind_mismatch() {
        let cond = Condition::new(vec![Clause::Compare { op: CmpOp::Gt, value: Literal::Number(num("3")) }]);
        let err = cond.check_kind(&InputKind::Bool).unwrap_err();
        assert_eq!(err.code, "kind-mismatch");
    }

    #[test]
    fn any_must_stand_alone() {
        let cond = Condition::new(vec![Clause::Any, Clause::Compare { op: CmpOp::Gt, value: Literal::Number(num("3")) }]);
        assert!(cond.check_kind(&number_kind("0", "10")).is_err());
    }

    #[test]
    fn unknown_enum_member_is_reported() {
        let kind = InputKind::Enum { members: vec!["Spot".into(), "Max".into()] };
        let cond = Condition::new(vec![Clause::Member { members: vec!["Deep".into()] }]);
        assert_eq!(cond.check_kind(&kind).unwrap_err().code, "unknown-member");
    }

    #[test]
    fn witness_respects_domain() {
        let kind = number_kind("0", "100");
        let above = Condition::new(vec![Clause::Compare { op: CmpOp::Gt, value: Literal::Number(num("200")) }]);
        assert_eq!(joint_witness(&kind, &[&above]), None);
        let narrow = Condition::new(vec![
            Clause::Compare { op: CmpOp::Gt, value: Literal::Number(num("5")) },
            Clause::Compare { op: CmpOp::Lt, value: Literal::Number(num("5.1")) },
        ]);
        let w = joint_witness(&kind, &[&narrow]).unwrap();
        assert!(narrow.holds(&w));
    }

    #[test]
    fn witness_handles_punctured_point_interval() {
        let kind = number_kind("0", "10");
        let cond = Condition::new(vec![
            Clause::Range { lo: num("3"), hi: num("3") },
            Clause::Compare { op: CmpOp::Ne, value: Literal::Number(num("3")) },
        ]);
        assert_eq!(joint_witness(&kind, &[&cond]), None);
    }

    #[test]
    fn vec3_witness_per_axis() {
        let kind = InputKind::Vec3 { unit: None };
        let cond = Condition::new(vec![
            Clause::Axis { axis: Axis::Z, op: CmpOp::Gt, value: num("1.0") },
            Clause::Axis { axis: Axis::X, op: CmpOp::Lt, value: num("-2") },
        ]);
        let w = joint_witness(&kind, &[&cond]).unwrap();
        assert!(cond.holds(&w));
    }

    #[test]
    fn guard_display_keeps_grouping() {
        let atom = |name: &str| {
            Guard::Atom(GuardAtom { input: name.into(), axis: None, op: CmpOp::Eq, value: Literal::Bool(true) })
        };
        let g = Guard::And(vec![atom("a"), Guard::Or(vec![atom("b"), atom("c")])]);
        assert_eq!(g.to_string(), "a == true & (b == true | c == true)");
        let g = Guard::Or(vec![Guard::And(vec![atom("a"), atom("b")]), atom("c")]);
        assert_eq!(g.to_string(), "a == true & b == true | c == true");
        let g = Guard::And(vec![atom("a"), Guard::And(vec![atom("b"), atom("c")])]);
        assert_eq!(g.to_string(), "a == true & (b == true & c == true)");
    }
}
