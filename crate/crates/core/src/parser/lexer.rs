//! Line tokenizer for the `.cat` format. Comments (`#` outside a string)
//! run to end of line and never reach the parser.

use crate::model::{CmpOp, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Op(CmpOp),
    Arrow,
    Exit,
    Colon,
    Comma,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Amp,
    Pipe,
    Dot,
    Assign,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Op(op) => format!("`{op}`"),
            Tok::Arrow => "`->`".to_string(),
            Tok::Exit => "`^exit`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Amp => "`&`".to_string(),
            Tok::Pipe => "`|`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::Assign => "`=`".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// One physical line, tokenized.
#[derive(Debug)]
pub(crate) struct Line {
    pub indented: bool,
    pub tokens: Vec<Token>,
    /// Span of the whole line content (excluding indentation and comment).
    pub span: Span,
}

pub(crate) fn lines(source: &str) -> Vec<Result<Line, Diagnostic>> {
    let mut out = Vec::new();
    let mut offset = 0usize;
    for (index, raw) in source.split_inclusive('\n').enumerate() {
        let text = raw.trim_end_matches(['\n', '\r']);
        let line_no = index as u32 + 1;
        match tokenize(text, offset, line_no) {
            Ok(Some(line)) => out.push(Ok(line)),
            Ok(None) => {}
            Err(d) => out.push(Err(d)),
        }
        offset += raw.len();
    }
    out
}

fn col_of(text: &str, at: usize) -> u32 {
    text[..at].chars().count() as u32 + 1
}

fn tokenize(text: &str, base: usize, line: u32) -> Result<Option<Line>, Diagnostic> {
    let bytes = text.as_bytes();
    let indented = matches!(bytes.first(), Some(b' ' | b'\t'));
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let span_at = |start: usize, end: usize| Span::new(base + start, base + end, line, col_of(text, start));

    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'#' => break,
            b'"' => {
                let mut value = String::new();
                i += 1;
                let mut closed = false;
                let mut chars = text[i..].char_indices();
                while let Some((k, ch)) = chars.next() {
                    match ch {
                        '"' => {
                            i += k + 1;
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => value.push('"'),
                            Some((_, '\\')) => value.push('\\'),
                            Some((_, 'n')) => value.push('\n'),
                            Some((_, 't')) => value.push('\t'),
                            Some((k2, other)) => {
                                return Err(Diagnostic::error(
                                    "syntax",
                                    format!("unknown escape `\\{other}` in string"),
                                    span_at(i + k, i + k2 + other.len_utf8()),
                                ))
                            }
                            None => break,
                        },
                        other => value.push(other),
                    }
                }
                if !closed {
                    return Err(Diagnostic::error("syntax", "unterminated string", span_at(start, bytes.len())));
                }
                tokens.push(Token { tok: Tok::Str(value), span: span_at(start, i) });
                continue;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                tokens.push(Token { tok: Tok::Arrow, span: span_at(start, i) });
                continue;
            }
            b'-' | b'0'..=b'9' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lexeme = &text[start..i];
                if lexeme == "-" || i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    return Err(Diagnostic::error(
                        "syntax",
                        format!("malformed number `{}`", &text[start..i]),
                        span_at(start, i),
                    ));
                }
                tokens.push(Token { tok: Tok::Num(lexeme.to_string()), span: span_at(start, i) });
                continue;
            }
            b'^' => {
                let rest = &text[i + 1..];
                let word_len = rest
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                i += 1 + word_len;
                if &rest[..word_len] != "exit" {
                    return Err(Diagnostic::error(
                        "syntax",
                        format!("unknown reserved word `{}`", &text[start..i]),
                        span_at(start, i),
                    ));
                }
                tokens.push(Token { tok: Tok::Exit, span: span_at(start, i) });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { tok: Tok::Ident(text[start..i].to_string()), span: span_at(start, i) });
                continue;
            }
            _ => {}
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let (tok, len) = match two {
            "<=" => (Tok::Op(CmpOp::Le), 2),
            ">=" => (Tok::Op(CmpOp::Ge), 2),
            "==" => (Tok::Op(CmpOp::Eq), 2),
            "!=" => (Tok::Op(CmpOp::Ne), 2),
            _ => match c {
                b'<' => (Tok::Op(CmpOp::Lt), 1),
                b'>' => (Tok::Op(CmpOp::Gt), 1),
                b'=' => (Tok::Assign, 1),
                b':' => (Tok::Colon, 1),
                b',' => (Tok::Comma, 1),
                b'[' => (Tok::LBracket, 1),
                b']' => (Tok::RBracket, 1),
                b'{' => (Tok::LBrace, 1),
                b'}' => (Tok::RBrace, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'&' => (Tok::Amp, 1),
                b'|' => (Tok::Pipe, 1),
                b'.' => (Tok::Dot, 1),
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(Diagnostic::error(
                        "syntax",
                        format!("unexpected character `{ch}`"),
                        span_at(i, i + ch.len_utf8()),
                    ));
                }
            },
        };
        i += len;
        tokens.push(Token { tok, span: span_at(start, i) });
    }

    if tokens.is_empty() {
        return Ok(None);
    }
    let span = tokens[0].span.join(tokens[tokens.len() - 1].span);
    Ok(Some(Line { indented, tokens, span }))
}
