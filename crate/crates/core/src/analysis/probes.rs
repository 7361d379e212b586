//! Boundary-value discretization of a document's input space.

use std::collections::BTreeMap;

use crate::model::{Axis, CatDocument, Decimal, InputKind, Value, Vec3};
use crate::CatError;

/// Probe values for every column of a document, in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub columns: Vec<(String, Vec<Value>)>,
}

/// Numeric constants mentioned for each input (and axis), from cells and
/// guards alike.
fn constants(doc: &CatDocument) -> BTreeMap<(String, Option<Axis>), Vec<Decimal>> {
    let mut out: BTreeMap<(String, Option<Axis>), Vec<Decimal>> = BTreeMap::new();
    for (_, _, sub) in doc.subrows() {
        for cell in &sub.cells {
            for (axis, d) in cell.condition.constants() {
                out.entry((cell.input.clone(), axis)).or_default().push(d);
            }
        }
        for rule in &sub.transitions {
            for atom in rule.guard.atoms() {
                if let crate::model::Literal::Number(d) = &atom.value {
                    out.entry((atom.input.clone(), atom.axis)).or_default().push(*d);
                }
            }
        }
    }
    out
}

/// Each constant with its neighbours one unit in the last written place,
/// plus `bounds`, clipped to `bounds`, sorted and de-duplicated by value.
fn number_probes(constants: &[Decimal], bounds: Option<(Decimal, Decimal)>) -> Vec<f64> {
    let mut points: Vec<Decimal> = constants
        .iter()
        .flat_map(|c| [c.step_down(), *c, c.step_up()])
        .collect();
    if let Some((lo, hi)) = bounds {
        points.push(lo);
        points.push(hi);
        points.retain(|p| p.cmp_value(lo).is_ge() && p.cmp_value(hi).is_le());
    }
    points.sort_by(|a, b| a.cmp_value(*b));
    points.dedup_by(|a, b| a.cmp_value(*b).is_eq());
    points.into_iter().map(Decimal::to_f64).collect()
}

impl ProbeGrid {
    pub fn new(doc: &CatDocument) -> Result<Self, CatError> {
        if !doc.is_resolved() {
            return Err(CatError::UnresolvedInputs {
                document: doc.name().to_string(),
                inputs: doc.inherited().to_vec(),
            });
        }
        let constants = constants(doc);
        let for_input = |name: &str, axis: Option<Axis>| {
            constants.get(&(name.to_string(), axis)).map(Vec::as_slice).unwrap_or(&[])
        };
        let mut columns = Vec::new();
        for decl in doc.inputs() {
            let values = match &decl.kind {
                InputKind::Bool => vec![Value::Bool(false), Value::Bool(true)],
                InputKind::Enum { members } => members.iter().cloned().map(Value::Enum).collect(),
                InputKind::Number { domain, .. } => {
                    let domain = domain.ok_or_else(|| CatError::UnboundedInput(decl.name.clone()))?;
                    number_probes(for_input(&decl.name, None), Some((domain.lo, domain.hi)))
                        .into_iter()
                        .map(Value::Number)
                        .collect()
                }
                InputKind::Vec3 { .. } => {
                    let axes: Vec<Vec<f64>> = Axis::ALL
                        .iter()
                        .map(|axis| {
                            let probes = number_probes(for_input(&decl.name, Some(*axis)), None);
                            if probes.is_empty() {
                                vec![0.0]
                            } else {
                                probes
                            }
                        })
                        .collect();
                    let mut values = Vec::new();
                    for x in &axes[0] {
                        for y in &axes[1] {
                            for z in &axes[2] {
                                values.push(Value::Vec3(Vec3::new(*x, *y, *z)));
                            }
                        }
                    }
                    values
                }
            };
            columns.push((decl.name.clone(), values));
        }
        Ok(Self { columns })
    }

    /// Number of valuations per behavior, saturating.
    pub fn size(&self) -> u64 {
        self.columns
            .iter()
            .fold(1u64, |acc, (_, values)| acc.saturating_mul(values.len() as u64))
    }

    /// The grid in odometer order: the last column turns fastest.
    pub fn iter(&self) -> GridIter<'_> {
        let empty = self.columns.iter().any(|(_, v)| v.is_empty());
        GridIter { grid: self, digits: vec![0; self.columns.len()], done: empty }
    }

    pub fn discretization(&self) -> BTreeMap<String, Vec<Value>> {
        self.columns.iter().cloned().collect()
    }
}

pub struct GridIter<'a> {
    grid: &'a ProbeGrid,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for GridIter<'_> {
    type Item = BTreeMap<String, Value>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self
            .grid
            .columns
            .iter()
            .zip(&self.digits)
            .map(|((name, values), &d)| (name.clone(), values[d].clone()))
            .collect();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.grid.columns[k].1.len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(item)
    }
}
