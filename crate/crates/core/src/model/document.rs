use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::condition::{Condition, Guard, InputKind};
use super::diagnostic::{Diagnostic, Span};
use super::valuation::Valuation;
use crate::error::CatError;

/// Name of the reserved transition target that hands control back to the
/// parent behavior of a refining document.
pub const EXIT_TOKEN: &str = "^exit";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDecl {
    pub name: String,
    pub kind: InputKind,
}

impl InputDecl {
    pub fn new(name: impl Into<String>, kind: InputKind) -> Self {
        Self { name: name.into(), kind }
    }
}

/// A non-blank table cell: the condition one input must meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub input: String,
    pub condition: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Behavior(String),
    Exit,
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Behavior(b) => b,
            Target::Exit => EXIT_TOKEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub target: Target,
    pub guard: Guard,
}

/// One alternative condition set for an output, scoped to a behavior.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubRow {
    pub behavior: String,
    pub cells: Vec<Cell>,
    pub transitions: Vec<TransitionRule>,
    pub note: Option<String>,
}

impl SubRow {
    pub fn cell(&self, input: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.input == input)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRow {
    pub output: String,
    pub subrows: Vec<SubRow>,
}

impl OutputRow {
    /// The row's description, taken from its first annotated sub-row.
    pub fn description(&self) -> Option<&str> {
        self.subrows.iter().find_map(|s| s.note.as_deref())
    }
}

/// Maps a parent output onto the child outputs that realise it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alias {
    pub parent_output: String,
    pub child_outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub document: String,
    pub behavior: String,
    pub aliases: Vec<Alias>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubRowRef {
    pub row: usize,
    pub sub: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionRef {
    pub row: usize,
    pub sub: usize,
    pub rule: usize,
}

impl TransitionRef {
    pub fn subrow(self) -> SubRowRef {
        SubRowRef { row: self.row, sub: self.sub }
    }
}

/// Addressable pieces of a document, used to key source spans.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    Header,
    Level,
    Refines,
    Alias(usize),
    Input(usize),
    SubRow(SubRowRef),
    Cell(SubRowRef, String),
    Transition(TransitionRef),
    Note(SubRowRef),
}

#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    spans: BTreeMap<ElementId, Span>,
}

impl SourceMap {
    pub fn insert(&mut self, id: ElementId, span: Span) {
        self.spans.insert(id, span);
    }

    pub fn get(&self, id: &ElementId) -> Span {
        self.spans.get(id).copied().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

/// The unvalidated contents of a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentParts {
    pub name: String,
    pub level: u32,
    pub refines: Option<Refinement>,
    pub inputs: Vec<InputDecl>,
    pub rows: Vec<OutputRow>,
}

/// A validated capability analysis table.
///
/// Built only through [`CatDocument::new`] (or the parser), which rejects any
/// structural violation with diagnostics. Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct CatDocument {
    name: String,
    level: u32,
    refines: Option<Refinement>,
    inputs: Vec<InputDecl>,
    inherited: Vec<String>,
    rows: Vec<OutputRow>,
    spans: SourceMap,
}

impl PartialEq for CatDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.level == other.level
            && self.refines == other.refines
            && self.inputs == other.inputs
            && self.inherited == other.inherited
            && self.rows == other.rows
    }
}

impl CatDocument {
    pub fn new(parts: DocumentParts) -> Result<Self, Vec<Diagnostic>> {
        Self::with_source_map(parts, SourceMap::default())
    }

    /// Validates `parts` and canonicalises cell order to column order.
    pub fn with_source_map(parts: DocumentParts, spans: SourceMap) -> Result<Self, Vec<Diagnostic>> {
        let mut checker = Checker { spans: &spans, diagnostics: Vec::new() };
        let inherited = checker.check(&parts);
        if !checker.diagnostics.is_empty() {
            return Err(checker.diagnostics);
        }
        let DocumentParts { name, level, refines, inputs, mut rows } = parts;
        let column: BTreeMap<&str, usize> = inputs
            .iter()
            .map(|d| d.name.as_str())
            .chain(inherited.iter().map(String::as_str))
            .enumerate()
            .map(|(i, n)| (n, i))
            .collect();
        for row in &mut rows {
            for sub in &mut row.subrows {
                sub.cells.sort_by_key(|c| column[c.input.as_str()]);
            }
        }
        Ok(Self { name, level, refines, inputs, inherited, rows, spans })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn refines(&self) -> Option<&Refinement> {
        self.refines.as_ref()
    }

    /// Locally declared inputs, in column order.
    pub fn inputs(&self) -> &[InputDecl] {
        &self.inputs
    }

    /// Inputs a refining document uses without declaring, sorted by name.
    /// They take their kinds from the parent once resolved.
    pub fn inherited(&self) -> &[String] {
        &self.inherited
    }

    pub fn is_resolved(&self) -> bool {
        self.inherited.is_empty()
    }

    pub fn rows(&self) -> &[OutputRow] {
        &self.rows
    }

    pub fn spans(&self) -> &SourceMap {
        &self.spans
    }

    pub fn span(&self, id: &ElementId) -> Span {
        self.spans.get(id)
    }

    pub fn input(&self, name: &str) -> Option<&InputDecl> {
        self.inputs.iter().find(|d| d.name == name)
    }

    /// Column headers: declared inputs, then inherited ones.
    pub fn columns(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .map(|d| d.name.as_str())
            .chain(self.inherited.iter().map(String::as_str))
            .collect()
    }

    pub fn subrow(&self, at: SubRowRef) -> Option<&SubRow> {
        self.rows.get(at.row)?.subrows.get(at.sub)
    }

    pub fn transition(&self, at: TransitionRef) -> Option<&TransitionRule> {
        self.subrow(at.subrow())?.transitions.get(at.rule)
    }

    /// Every sub-row in document order with its address and output.
    pub fn subrows(&self) -> impl Iterator<Item = (SubRowRef, &str, &SubRow)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| {
            row.subrows
                .iter()
                .enumerate()
                .map(move |(s, sub)| (SubRowRef { row: r, sub: s }, row.output.as_str(), sub))
        })
    }

    pub fn outputs(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.output.as_str()).collect()
    }

    pub fn has_output(&self, output: &str) -> bool {
        self.rows.iter().any(|r| r.output == output)
    }

    /// Distinct sub-row behaviors in first-appearance order.
    pub fn behaviors(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.subrows()
            .map(|(_, _, sub)| sub.behavior.as_str())
            .filter(|b| seen.insert(*b))
            .collect()
    }

    pub fn has_behavior(&self, behavior: &str) -> bool {
        self.subrows().any(|(_, _, sub)| sub.behavior == behavior)
    }

    /// The behavior of the first row, which tables treat as initial.
    pub fn initial_behavior(&self) -> Option<&str> {
        self.rows.first()?.subrows.first().map(|s| s.behavior.as_str())
    }

    pub fn to_parts(&self) -> DocumentParts {
        DocumentParts {
            name: self.name.clone(),
            level: self.level,
            refines: self.refines.clone(),
            inputs: self.inputs.clone(),
            rows: self.rows.clone(),
        }
    }

    /// Materialises inherited inputs from the parent's declarations. The
    /// result declares them after the local inputs, keeping column order.
    pub fn resolve(&self, parent_inputs: &[InputDecl]) -> Result<CatDocument, Vec<Diagnostic>> {
        if self.inherited.is_empty() {
            return Ok(self.clone());
        }
        let mut parts = self.to_parts();
        let mut missing = Vec::new();
        for name in &self.inherited {
            match parent_inputs.iter().find(|d| &d.name == name) {
                Some(decl) => parts.inputs.push(decl.clone()),
                None => missing.push(Diagnostic::error(
                    "orphan-input",
                    format!("`{name}` is declared neither here nor in the parent document"),
                    self.first_reference(name),
                )),
            }
        }
        if !missing.is_empty() {
            return Err(missing);
        }
        CatDocument::with_source_map(parts, self.spans.clone())
    }

    /// Span of the first cell or guard that mentions `input`.
    pub fn first_reference(&self, input: &str) -> Span {
        for (at, _, sub) in self.subrows() {
            if sub.cell(input).is_some() {
                return self.span(&ElementId::Cell(at, input.to_string()));
            }
            for (k, rule) in sub.transitions.iter().enumerate() {
                if rule.guard.atoms().iter().any(|a| a.input == input) {
                    return self.span(&ElementId::Transition(TransitionRef { row: at.row, sub: at.sub, rule: k }));
                }
            }
        }
        Span::default()
    }

    /// Checks that `valuation` assigns an in-domain value to every column.
    /// Values for inputs this document does not know are ignored.
    pub fn check_valuation(&self, valuation: &Valuation) -> Result<(), CatError> {
        if !self.inherited.is_empty() {
            return Err(CatError::UnresolvedInputs {
                document: self.name.clone(),
                inputs: self.inherited.clone(),
            });
        }
        for decl in &self.inputs {
            let value = valuation
                .values
                .get(&decl.name)
                .ok_or_else(|| CatError::MissingValue(decl.name.clone()))?;
            match decl.kind.admits(value) {
                Ok(()) => {}
                Err(true) => {
                    return Err(CatError::DomainViolation { input: decl.name.clone(), value: value.to_string() })
                }
                Err(false) => {
                    return Err(CatError::ValueKind {
                        input: decl.name.clone(),
                        value: value.to_string(),
                        expected: decl.kind.name().to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    /// Appends a new, everywhere-blank input column.
    pub fn with_input(&self, decl: InputDecl) -> Result<CatDocument, CatError> {
        if self.input(&decl.name).is_some() || self.inherited.contains(&decl.name) {
            return Err(CatError::DuplicateInput(decl.name));
        }
        let mut parts = self.to_parts();
        parts.inputs.push(decl);
        CatDocument::with_source_map(parts, self.spans.clone()).map_err(CatError::InvalidDocument)
    }

    /// Removes one sub-row, and its row if that was the only one. Source
    /// spans are dropped since element addresses shift.
    pub fn without_subrow(&self, at: SubRowRef) -> Result<CatDocument, CatError> {
        if self.subrow(at).is_none() {
            return Err(CatError::NoSuchSubrow { row: at.row, sub: at.sub });
        }
        let mut parts = self.to_parts();
        parts.rows[at.row].subrows.remove(at.sub);
        if parts.rows[at.row].subrows.is_empty() {
            parts.rows.remove(at.row);
        }
        CatDocument::new(parts).map_err(CatError::InvalidDocument)
    }
}

struct Checker<'a> {
    spans: &'a SourceMap,
    diagnostics: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn error(&mut self, code: &str, message: String, at: ElementId) {
        let span = self.spans.get(&at);
        self.diagnostics.push(Diagnostic::error(code, message, span));
    }

    /// Names must survive rendering: identifiers everywhere, and enum
    /// members that cannot be read back as bool literals.
    fn identifiers(&mut self, parts: &DocumentParts) {
        let bad = |this: &mut Self, what: &str, name: &str, at: ElementId| {
            this.error("bad-identifier", format!("{what} `{name}` is not a valid identifier"), at);
        };
        if let Some(r) = &parts.refines {
            if !is_identifier(&r.behavior) {
                bad(self, "behavior", &r.behavior, ElementId::Refines);
            }
            for (i, alias) in r.aliases.iter().enumerate() {
                for name in std::iter::once(&alias.parent_output).chain(&alias.child_outputs) {
                    if !is_identifier(name) {
                        bad(self, "output", name, ElementId::Alias(i));
                    }
                }
            }
        }
        for (i, decl) in parts.inputs.iter().enumerate() {
            if !is_identifier(&decl.name) {
                bad(self, "input", &decl.name, ElementId::Input(i));
            }
            let unit = match &decl.kind {
                InputKind::Number { unit, .. } | InputKind::Vec3 { unit } => unit.as_deref(),
                _ => None,
            };
            if let Some(unit) = unit.filter(|u| !is_identifier(u)) {
                bad(self, "unit", unit, ElementId::Input(i));
            }
            if let InputKind::Enum { members } = &decl.kind {
                for m in members.iter().filter(|m| !is_identifier(m) || *m == "true" || *m == "false") {
                    bad(self, "member", m, ElementId::Input(i));
                }
            }
        }
        for (r, row) in parts.rows.iter().enumerate() {
            if !is_identifier(&row.output) {
                bad(self, "output", &row.output, ElementId::SubRow(SubRowRef { row: r, sub: 0 }));
            }
            for (s, sub) in row.subrows.iter().enumerate() {
                let at = SubRowRef { row: r, sub: s };
                if !is_identifier(&sub.behavior) {
                    bad(self, "behavior", &sub.behavior, ElementId::SubRow(at));
                }
                for cell in sub.cells.iter().filter(|c| !is_identifier(&c.input)) {
                    bad(self, "input", &cell.input, ElementId::Cell(at, cell.input.clone()));
                }
                for (k, rule) in sub.transitions.iter().enumerate() {
                    let rule_at = ElementId::Transition(TransitionRef { row: r, sub: s, rule: k });
                    if let Target::Behavior(b) = &rule.target {
                        if !is_identifier(b) {
                            bad(self, "behavior", b, rule_at.clone());
                        }
                    }
                    for atom in rule.guard.atoms() {
                        if !is_identifier(&atom.input) {
                            bad(self, "input", &atom.input, rule_at.clone());
                        }
                    }
                }
            }
        }
    }

    /// Returns the inherited input names on success.
    fn check(&mut self, parts: &DocumentParts) -> Vec<String> {
        if parts.refines.is_some() && parts.level == 0 {
            self.error(
                "refines-on-root",
                "a level-0 document cannot refine another document".to_string(),
                ElementId::Refines,
            );
        }

        self.identifiers(parts);

        let mut declared: BTreeMap<&str, &InputKind> = BTreeMap::new();
        for (i, decl) in parts.inputs.iter().enumerate() {
            if declared.insert(decl.name.as_str(), &decl.kind).is_some() {
                self.error("duplicate-input", format!("input `{}` is declared twice", decl.name), ElementId::Input(i));
            }
            match &decl.kind {
                InputKind::Number { domain: Some(d), .. } if d.lo.cmp_value(d.hi).is_gt() => self.error(
                    "bad-domain",
                    format!("domain lower bound {} exceeds upper bound {}", d.lo, d.hi),
                    ElementId::Input(i),
                ),
                InputKind::Enum { members } => {
                    if members.is_empty() {
                        self.error("empty-enum", format!("enum `{}` has no members", decl.name), ElementId::Input(i));
                    }
                    let mut seen = HashSet::new();
                    for m in members {
                        if !seen.insert(m) {
                            self.error(
                                "duplicate-member",
                                format!("member `{m}` repeats in enum `{}`", decl.name),
                                ElementId::Input(i),
                            );
                        }
                    }
                }
                _ => {}
            }
        }

        let refining = parts.refines.is_some();
        let behaviors: BTreeSet<&str> = parts
            .rows
            .iter()
            .flat_map(|r| r.subrows.iter().map(|s| s.behavior.as_str()))
            .collect();
        let mut inherited: BTreeSet<String> = BTreeSet::new();
        let mut outputs = HashSet::new();

        for (r, row) in parts.rows.iter().enumerate() {
            let row_at = ElementId::SubRow(SubRowRef { row: r, sub: 0 });
            if !outputs.insert(row.output.as_str()) {
                self.error("duplicate-output", format!("output `{}` heads two rows", row.output), row_at.clone());
            }
            if row.subrows.is_empty() {
                self.error("empty-row", format!("row `{}` has no sub-rows", row.output), row_at);
            }
            for (s, sub) in row.subrows.iter().enumerate() {
                let at = SubRowRef { row: r, sub: s };
                if sub.cells.is_empty() {
                    self.error(
                        "empty-subrow",
                        format!("sub-row {}:{} constrains no input", row.output, sub.behavior),
                        ElementId::SubRow(at),
                    );
                }
                let mut seen = HashSet::new();
                for cell in &sub.cells {
                    let cell_at = ElementId::Cell(at, cell.input.clone());
                    if !seen.insert(cell.input.as_str()) {
                        self.error(
                            "duplicate-cell",
                            format!("input `{}` has two cells in one sub-row", cell.input),
                            cell_at.clone(),
                        );
                    }
                    match declared.get(cell.input.as_str()) {
                        Some(kind) => {
                            if let Err(e) = cell.condition.check_kind(kind) {
                                self.error(e.code, format!("`{}`: {}", cell.input, e.message), cell_at);
                            }
                        }
                        None if refining => {
                            inherited.insert(cell.input.clone());
                        }
                        None => self.error("unknown-input", format!("input `{}` is not declared", cell.input), cell_at),
                    }
                }
                for (k, rule) in sub.transitions.iter().enumerate() {
                    let rule_at = ElementId::Transition(TransitionRef { row: r, sub: s, rule: k });
                    match &rule.target {
                        Target::Behavior(b) if !behaviors.contains(b.as_str()) => self.error(
                            "dangling-transition",
                            format!("transition target `{b}` is not the behavior of any sub-row"),
                            rule_at.clone(),
                        ),
                        Target::Exit if !refining => self.error(
                            "exit-outside-refinement",
                            format!("`{EXIT_TOKEN}` is only meaningful in a refining document"),
                            rule_at.clone(),
                        ),
                        _ => {}
                    }
                    for atom in rule.guard.atoms() {
                        match declared.get(atom.input.as_str()) {
                            Some(kind) => {
                                if let Err(e) = atom.check_kind(kind) {
                                    self.error(e.code, format!("`{}`: {}", atom.input, e.message), rule_at.clone());
                                }
                            }
                            None if refining => {
                                inherited.insert(atom.input.clone());
                            }
                            None => self.error(
                                "unknown-input",
                                format!("input `{}` is not declared", atom.input),
                                rule_at.clone(),
                            ),
                        }
                    }
                }
            }
        }

        if let Some(refines) = &parts.refines {
            let mut seen = HashSet::new();
            for (i, alias) in refines.aliases.iter().enumerate() {
                if !seen.insert(alias.parent_output.as_str()) {
                    self.error(
                        "duplicate-alias",
                        format!("output `{}` is aliased twice", alias.parent_output),
                        ElementId::Alias(i),
                    );
                }
                for child in &alias.child_outputs {
                    if !outputs.contains(child.as_str()) {
                        self.error(
                            "unknown-output",
                            format!("alias target `{child}` is not an output of this document"),
                            ElementId::Alias(i),
                        );
                    }
                }
            }
        }

        inherited.into_iter().collect()
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Distinct behaviors in first-appearance order.
pub fn behavior_set(doc: &CatDocument) -> Vec<String> {
    doc.behaviors().into_iter().map(str::to_string).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableStats {
    pub behaviors: usize,
    pub outputs: usize,
    pub inputs: usize,
    pub pairs: usize,
}

/// Per-document counts summed across `docs`. `pairs` counts non-blank cells.
pub fn table_stats(docs: &[CatDocument]) -> TableStats {
    docs.iter().fold(TableStats::default(), |acc, doc| TableStats {
        behaviors: acc.behaviors + doc.behaviors().len(),
        outputs: acc.outputs + doc.rows().len(),
        inputs: acc.inputs + doc.columns().len(),
        pairs: acc.pairs + doc.subrows().map(|(_, _, s)| s.cells.len()).sum::<usize>(),
    })
}
