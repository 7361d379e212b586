//! The `.cat` text format.
//!
//! ```text
//! cat "roomba-core"
//! level 0
//!
//! input batteryLevel : number unit pct domain [0, 100]
//! input warningLight : bool
//!
//! row wheelsMove : Drive
//!   batteryLevel : > 15
//!   warningLight : == false
//!   -> Charging when batteryLevel <= 15
//!   note "wheels turn while the battery holds"
//! ```
//!
//! Parsing never aborts: malformed input yields diagnostics, and a document is
//! returned exactly when no error was found. [`render`] prints the canonical
//! form, which parses back to an equal document.

mod lexer;
mod render;

use std::collections::HashMap;

use lexer::{Line, Tok, Token};
pub use render::render;

use crate::model::{
    Alias, Axis, CatDocument, Cell, Clause, CmpOp, Condition, Decimal, Diagnostic, DocumentParts, Domain,
    ElementId, Guard, GuardAtom, InputDecl, InputKind, Literal, OutputRow, Refinement, SourceMap, Span, SubRow,
    SubRowRef, Target, TransitionRef, TransitionRule,
};

#[derive(Debug, Clone)]
pub struct ParseResult {
    pub document: Option<CatDocument>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

pub fn parse(source: &str) -> ParseResult {
    let mut parser = Parser::default();
    for line in lexer::lines(source) {
        match line {
            Ok(line) => parser.line(&line),
            Err(diagnostic) => parser.fail(diagnostic),
        }
    }
    parser.finish()
}

/// Parses the text of an input kind, e.g. `number unit m domain [0, 5]`.
pub fn parse_kind(text: &str) -> Result<InputKind, Diagnostic> {
    let mut tokens = Vec::new();
    for line in lexer::lines(text) {
        tokens.extend(line?.tokens);
    }
    let mut cursor = Cursor::new(&tokens, Span::default());
    let kind = cursor.kind()?;
    cursor.end()?;
    Ok(kind)
}

/// Declaration order enforced at top level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Start,
    Name,
    Level,
    Refines,
    Inputs,
    Rows,
}

#[derive(Default)]
struct Parser {
    stage: Option<Stage>,
    name: Option<String>,
    level: Option<u32>,
    refines: Option<Refinement>,
    inputs: Vec<InputDecl>,
    rows: Vec<OutputRow>,
    row_index: HashMap<String, usize>,
    current: Option<SubRowRef>,
    spans: SourceMap,
    diagnostics: Vec<Diagnostic>,
    syntax_failed: bool,
    /// Set after a top-level line fails so its indented block is skipped.
    skip_block: bool,
}

impl Parser {
    fn stage(&self) -> Stage {
        self.stage.unwrap_or(Stage::Start)
    }

    fn fail(&mut self, diagnostic: Diagnostic) {
        if diagnostic.is_error() {
            self.syntax_failed = true;
        }
        self.diagnostics.push(diagnostic);
    }

    /// Moves to `stage`, reporting declarations that arrive out of order.
    fn enter(&mut self, stage: Stage, keyword: &str, span: Span) {
        let current = self.stage();
        if stage < current || (stage == current && matches!(stage, Stage::Name | Stage::Level)) {
            self.fail(Diagnostic::error(
                "misplaced-declaration",
                format!("`{keyword}` cannot appear here; expected order is cat, level, refines, alias, input, row"),
                span,
            ));
        }
        self.stage = Some(current.max(stage));
    }

    fn line(&mut self, line: &Line) {
        if line.indented {
            if let Err(d) = self.row_item(line) {
                self.fail(d);
            }
            return;
        }
        match self.top_level(line) {
            Ok(()) => self.skip_block = false,
            Err(d) => {
                self.current = None;
                self.skip_block = true;
                self.fail(d);
            }
        }
    }

    fn top_level(&mut self, line: &Line) -> Result<(), Diagnostic> {
        let mut c = Cursor::new(&line.tokens, line.span);
        let (keyword, keyword_span) = c.ident()?;
        match keyword.as_str() {
            "cat" => {
                self.enter(Stage::Name, "cat", keyword_span);
                let (name, _) = c.string()?;
                c.end()?;
                self.name = Some(name);
                self.spans.insert(ElementId::Header, line.span);
            }
            "level" => {
                self.enter(Stage::Level, "level", keyword_span);
                let (text, span) = c.number()?;
                c.end()?;
                let level = text
                    .parse::<u32>()
                    .map_err(|_| Diagnostic::error("syntax", "level must be a non-negative integer", span))?;
                self.level = Some(level);
                self.spans.insert(ElementId::Level, line.span);
            }
            "refines" => {
                if self.refines.is_some() {
                    return Err(Diagnostic::error("misplaced-declaration", "second `refines` line", keyword_span));
                }
                self.enter(Stage::Refines, "refines", keyword_span);
                let (document, _) = c.string()?;
                c.keyword("behavior")?;
                let (behavior, _) = c.ident()?;
                c.end()?;
                self.refines = Some(Refinement { document, behavior, aliases: Vec::new() });
                self.spans.insert(ElementId::Refines, line.span);
            }
            "alias" => {
                self.enter(Stage::Refines, "alias", keyword_span);
                let (parent_output, _) = c.ident()?;
                c.expect(&Tok::Assign, "`=`")?;
                let mut child_outputs = vec![c.ident()?.0];
                while c.eat(&Tok::Comma) {
                    child_outputs.push(c.ident()?.0);
                }
                c.end()?;
                let Some(refines) = self.refines.as_mut() else {
                    return Err(Diagnostic::error(
                        "alias-without-refines",
                        "`alias` needs a preceding `refines` line",
                        line.span,
                    ));
                };
                refines.aliases.push(Alias { parent_output, child_outputs });
                let index = refines.aliases.len() - 1;
                self.spans.insert(ElementId::Alias(index), line.span);
            }
            "input" => {
                self.enter(Stage::Inputs, "input", keyword_span);
                let (name, _) = c.ident()?;
                c.expect(&Tok::Colon, "`:`")?;
                let kind = c.kind()?;
                c.end()?;
                self.spans.insert(ElementId::Input(self.inputs.len()), line.span);
                self.inputs.push(InputDecl { name, kind });
            }
            "row" => {
                self.enter(Stage::Rows, "row", keyword_span);
                let (output, _) = c.ident()?;
                c.expect(&Tok::Colon, "`:`")?;
                let (behavior, _) = c.ident()?;
                c.end()?;
                let row = match self.row_index.get(&output) {
                    Some(&row) => row,
                    None => {
                        self.rows.push(OutputRow { output: output.clone(), subrows: Vec::new() });
                        self.row_index.insert(output, self.rows.len() - 1);
                        self.rows.len() - 1
                    }
                };
                self.rows[row].subrows.push(SubRow { behavior, cells: Vec::new(), transitions: Vec::new(), note: None });
                let at = SubRowRef { row, sub: self.rows[row].subrows.len() - 1 };
                self.spans.insert(ElementId::SubRow(at), line.span);
                self.current = Some(at);
            }
            other => {
                self.diagnostics.push(Diagnostic::warning(
                    "unknown-keyword",
                    format!("unknown keyword `{other}`; line ignored"),
                    keyword_span,
                ));
                return Ok(());
            }
        }
        if keyword != "row" {
            self.current = None;
        }
        Ok(())
    }

    fn row_item(&mut self, line: &Line) -> Result<(), Diagnostic> {
        let Some(at) = self.current else {
            if self.skip_block {
                return Ok(());
            }
            return Err(Diagnostic::error("syntax", "indented line outside a `row` block", line.span));
        };
        let mut c = Cursor::new(&line.tokens, line.span);
        if c.eat(&Tok::Arrow) {
            let target = if c.eat(&Tok::Exit) {
                Target::Exit
            } else {
                Target::Behavior(c.ident()?.0)
            };
            c.keyword("when")?;
            let guard = c.guard()?;
            c.end()?;
            let sub = &mut self.rows[at.row].subrows[at.sub];
            sub.transitions.push(TransitionRule { target, guard });
            let rule = TransitionRef { row: at.row, sub: at.sub, rule: sub.transitions.len() - 1 };
            self.spans.insert(ElementId::Transition(rule), line.span);
            return Ok(());
        }
        let (word, word_span) = c.ident()?;
        if c.eat(&Tok::Colon) {
            let condition = c.condition()?;
            c.end()?;
            let sub = &mut self.rows[at.row].subrows[at.sub];
            if sub.cell(&word).is_some() {
                return Err(Diagnostic::error(
                    "duplicate-cell",
                    format!("input `{word}` already has a cell in this sub-row"),
                    line.span,
                ));
            }
            sub.cells.push(Cell { input: word.clone(), condition });
            self.spans.insert(ElementId::Cell(at, word), line.span);
            return Ok(());
        }
        if word == "note" {
            let (text, _) = c.string()?;
            c.end()?;
            let sub = &mut self.rows[at.row].subrows[at.sub];
            if sub.note.is_some() {
                return Err(Diagnostic::error("duplicate-note", "sub-row already has a note", line.span));
            }
            sub.note = Some(text);
            self.spans.insert(ElementId::Note(at), line.span);
            return Ok(());
        }
        self.diagnostics.push(Diagnostic::warning(
            "unknown-keyword",
            format!("unknown keyword `{word}` in row; line ignored"),
            word_span,
        ));
        Ok(())
    }

    fn finish(mut self) -> ParseResult {
        let origin = Span::new(0, 0, 1, 1);
        if self.name.is_none() {
            self.fail(Diagnostic::error("missing-header", "document must start with `cat \"<name>\"`", origin));
        }
        if self.level.is_none() {
            self.fail(Diagnostic::error("missing-level", "document header lacks a `level` line", origin));
        }
        if self.syntax_failed {
            return ParseResult { document: None, diagnostics: self.diagnostics };
        }
        let parts = DocumentParts {
            name: self.name.unwrap_or_default(),
            level: self.level.unwrap_or_default(),
            refines: self.refines,
            inputs: self.inputs,
            rows: self.rows,
        };
        match CatDocument::with_source_map(parts, self.spans) {
            Ok(doc) => ParseResult { document: Some(doc), diagnostics: self.diagnostics },
            Err(mut errors) => {
                self.diagnostics.append(&mut errors);
                self.diagnostics.sort_by_key(|d| (d.span.start, d.span.end));
                ParseResult { document: None, diagnostics: self.diagnostics }
            }
        }
    }
}

/// Recursive-descent reader over one line's tokens.
struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: Span,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], line: Span) -> Self {
        Self { tokens, pos: 0, line }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::error("syntax", format!("expected {wanted}, found {}", t.tok.describe()), t.span),
            None => {
                let end = Span::new(self.line.end, self.line.end, self.line.line, self.line.col);
                Diagnostic::error("syntax", format!("expected {wanted} before end of line"), end)
            }
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), Diagnostic> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), span }) => {
                self.pos += 1;
                Ok((s.clone(), *span))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn peek_ident(&self) -> Option<&'a str> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => Some(s.as_str()),
            _ => None,
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), Diagnostic> {
        if self.peek_ident() == Some(word) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn string(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(Token { tok: Tok::Str(s), span }) => {
                self.pos += 1;
                Ok((s.clone(), *span))
            }
            _ => Err(self.unexpected("a quoted string")),
        }
    }

    fn number(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(Token { tok: Tok::Num(n), span }) => {
                self.pos += 1;
                Ok((n.clone(), *span))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn decimal(&mut self) -> Result<Decimal, Diagnostic> {
        let (text, span) = self.number()?;
        Decimal::parse(&text).ok_or_else(|| {
            Diagnostic::error(
                "syntax",
                format!("malformed number `{text}` (at most {} digits)", crate::model::MAX_DIGITS),
                span,
            )
        })
    }

    fn op(&mut self) -> Result<CmpOp, Diagnostic> {
        match self.peek() {
            Some(Token { tok: Tok::Op(op), .. }) => {
                self.pos += 1;
                Ok(*op)
            }
            _ => Err(self.unexpected("a comparison operator")),
        }
    }

    fn end(&self) -> Result<(), Diagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }

    fn ident_list(&mut self, close: &Tok, wanted: &str) -> Result<Vec<String>, Diagnostic> {
        let mut items = vec![self.ident()?.0];
        while self.eat(&Tok::Comma) {
            items.push(self.ident()?.0);
        }
        self.expect(close, wanted)?;
        Ok(items)
    }

    fn kind(&mut self) -> Result<InputKind, Diagnostic> {
        let (word, span) = self.ident()?;
        match word.as_str() {
            "bool" => Ok(InputKind::Bool),
            "number" => {
                let unit = self.unit()?;
                // an undeclared domain is accepted here and rejected by coverage analysis
                if self.peek_ident() != Some("domain") {
                    return Ok(InputKind::Number { unit, domain: None });
                }
                self.pos += 1;
                self.expect(&Tok::LBracket, "`[`")?;
                let lo = self.decimal()?;
                self.expect(&Tok::Comma, "`,`")?;
                let hi = self.decimal()?;
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(InputKind::Number { unit, domain: Some(Domain { lo, hi }) })
            }
            "enum" => {
                self.expect(&Tok::LBrace, "`{`")?;
                let members = self.ident_list(&Tok::RBrace, "`}`")?;
                Ok(InputKind::Enum { members })
            }
            "vec3" => Ok(InputKind::Vec3 { unit: self.unit()? }),
            other => Err(Diagnostic::error(
                "syntax",
                format!("unknown input kind `{other}`; expected bool, number, enum or vec3"),
                span,
            )),
        }
    }

    fn unit(&mut self) -> Result<Option<String>, Diagnostic> {
        if self.peek_ident() == Some("unit") {
            self.pos += 1;
            Ok(Some(self.ident()?.0))
        } else {
            Ok(None)
        }
    }

    fn literal(&mut self) -> Result<Literal, Diagnostic> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Num(_)) => Ok(Literal::Number(self.decimal()?)),
            Some(Tok::Ident(word)) => {
                let literal = match word.as_str() {
                    "true" => Literal::Bool(true),
                    "false" => Literal::Bool(false),
                    member => Literal::Member(member.to_string()),
                };
                self.pos += 1;
                Ok(literal)
            }
            _ => Err(self.unexpected("a literal")),
        }
    }

    fn condition(&mut self) -> Result<Condition, Diagnostic> {
        if self.peek_ident() == Some("any") {
            self.pos += 1;
            return Ok(Condition::any());
        }
        let mut clauses = vec![self.clause()?];
        while self.eat(&Tok::Amp) {
            clauses.push(self.clause()?);
        }
        Ok(Condition::new(clauses))
    }

    fn clause(&mut self) -> Result<Clause, Diagnostic> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Op(_)) => {
                let op = self.op()?;
                Ok(Clause::Compare { op, value: self.literal()? })
            }
            Some(Tok::Ident(word)) if word == "in" => {
                self.pos += 1;
                if self.eat(&Tok::LBracket) {
                    let lo = self.decimal()?;
                    self.expect(&Tok::Comma, "`,`")?;
                    let hi = self.decimal()?;
                    self.expect(&Tok::RBracket, "`]`")?;
                    Ok(Clause::Range { lo, hi })
                } else if self.eat(&Tok::LBrace) {
                    Ok(Clause::Member { members: self.ident_list(&Tok::RBrace, "`}`")? })
                } else {
                    Err(self.unexpected("`[` or `{`"))
                }
            }
            Some(Tok::Ident(word)) if Axis::from_name(word).is_some() => {
                let axis = Axis::from_name(word).expect("checked");
                self.pos += 1;
                let op = self.op()?;
                Ok(Clause::Axis { axis, op, value: self.decimal()? })
            }
            _ => Err(self.unexpected("a condition (`any`, an operator, `in`, or an axis)")),
        }
    }

    fn guard(&mut self) -> Result<Guard, Diagnostic> {
        let mut terms = vec![self.guard_term()?];
        while self.eat(&Tok::Pipe) {
            terms.push(self.guard_term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Guard::Or(terms) })
    }

    fn guard_term(&mut self) -> Result<Guard, Diagnostic> {
        let mut atoms = vec![self.guard_atom()?];
        while self.eat(&Tok::Amp) {
            atoms.push(self.guard_atom()?);
        }
        Ok(if atoms.len() == 1 { atoms.pop().expect("one atom") } else { Guard::And(atoms) })
    }

    fn guard_atom(&mut self) -> Result<Guard, Diagnostic> {
        if self.eat(&Tok::LParen) {
            let inner = self.guard()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        let (input, _) = self.ident()?;
        let axis = if self.eat(&Tok::Dot) {
            let (name, span) = self.ident()?;
            Some(
                Axis::from_name(&name)
                    .ok_or_else(|| Diagnostic::error("syntax", format!("`{name}` is not an axis (x, y, z)"), span))?,
            )
        } else {
            None
        };
        let op = self.op()?;
        let value = self.literal()?;
        Ok(Guard::Atom(GuardAtom { input, axis, op, value }))
    }
}
