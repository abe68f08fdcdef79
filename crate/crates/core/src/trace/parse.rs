//! Line-oriented trace format:
//!
//! ```text
//! # comment
//! T1: w x 1
//! T2: r x 1
//! ```
//!
//! Threads are numbered in order of first appearance; per-thread order is
//! textual order.

use super::program::{OpKind, Program, ProgramBuilder, TokenOp};
use super::TraceError;

pub fn parse_program(text: &str) -> Result<Program, TraceError> {
    let mut threads: Vec<(String, Vec<TokenOp>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let syntax = |column: usize, message: &str| TraceError::Syntax {
            line: line_no,
            column,
            message: message.to_string(),
        };

        let Some(colon) = raw.find(':') else {
            return Err(syntax(
                column_of(raw, raw.trim_start()),
                "expected `<label>:`",
            ));
        };
        let label = raw[..colon].trim();
        if label.is_empty() || label.contains(char::is_whitespace) {
            return Err(syntax(
                column_of(raw, raw.trim_start()),
                "invalid thread label",
            ));
        }

        let rest = &raw[colon + 1..];
        let fields: Vec<(usize, &str)> = fields_with_offsets(rest)
            .map(|(off, tok)| (colon + 1 + off, tok))
            .collect();
        let end_col = raw.chars().count() + 1;
        let (kind, variable, value) = match fields.as_slice() {
            [] => return Err(syntax(end_col, "missing operation")),
            [(off, k), rest @ ..] => {
                let kind = match *k {
                    "r" => OpKind::Read,
                    "w" => OpKind::Write,
                    _ => return Err(syntax(char_col(raw, *off), "operation must be `r` or `w`")),
                };
                match rest {
                    [] => return Err(syntax(end_col, "missing variable")),
                    [_] => return Err(syntax(end_col, "missing value")),
                    [(_, var), (_, val)] => (kind, *var, *val),
                    [_, _, (off, _), ..] => {
                        return Err(syntax(char_col(raw, *off), "unexpected trailing token"))
                    }
                }
            }
        };
        if variable.contains('#') || value.contains('#') {
            return Err(syntax(end_col, "`#` is not allowed inside tokens"));
        }

        let op = TokenOp {
            kind,
            variable: variable.to_string(),
            value: value.to_string(),
        };
        match threads.iter_mut().find(|(l, _)| l == label) {
            Some((_, ops)) => ops.push(op),
            None => threads.push((label.to_string(), vec![op])),
        }
    }

    if threads.is_empty() {
        return Err(TraceError::EmptyInput);
    }
    let mut builder = ProgramBuilder::default();
    for (label, ops) in threads {
        builder.push_thread(label, ops);
    }
    builder.build()
}

fn fields_with_offsets(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - s.as_ptr() as usize, tok))
}

/// 1-based character column of a byte offset.
fn char_col(line: &str, byte_offset: usize) -> usize {
    line[..byte_offset].chars().count() + 1
}

fn column_of(line: &str, suffix: &str) -> usize {
    char_col(line, line.len() - suffix.len())
}
