use std::fmt::Write;

use crate::model::{CatDocument, Target};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

/// Canonical text: header, inputs, then one block per sub-row with cells in
/// column order, transitions in priority order and the note last. Sub-rows
/// of one output are printed together.
pub fn render(doc: &CatDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cat {}", quote(doc.name()));
    let _ = writeln!(out, "level {}", doc.level());
    if let Some(refines) = doc.refines() {
        let _ = writeln!(out, "refines {} behavior {}", quote(&refines.document), refines.behavior);
        for alias in &refines.aliases {
            let _ = writeln!(out, "alias {} = {}", alias.parent_output, alias.child_outputs.join(", "));
        }
    }
    if !doc.inputs().is_empty() {
        out.push('\n');
        for decl in doc.inputs() {
            let _ = writeln!(out, "input {} : {}", decl.name, decl.kind);
        }
    }
    for row in doc.rows() {
        for sub in &row.subrows {
            out.push('\n');
            let _ = writeln!(out, "row {} : {}", row.output, sub.behavior);
            for cell in &sub.cells {
                let _ = writeln!(out, "  {} : {}", cell.input, cell.condition);
            }
            for rule in &sub.transitions {
                let target = match &rule.target {
                    Target::Behavior(b) => b.as_str(),
                    Target::Exit => crate::model::EXIT_TOKEN,
                };
                let _ = writeln!(out, "  -> {target} when {}", rule.guard);
            }
            if let Some(note) = &sub.note {
                let _ = writeln!(out, "  note {}", quote(note));
            }
        }
    }
    out
}
