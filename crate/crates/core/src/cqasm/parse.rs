use std::fmt;

use thiserror::Error;

use super::{is_identifier, Program, VERSION};
use crate::gates::{GateError, GateInstance, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Lexical(String),
    MissingVersion,
    UnsupportedVersion(String),
    MissingQubits,
    BadQubitCount(String),
    InvalidKernelName(String),
    DuplicateKernel(String),
    UnknownGate(String),
    Arity { gate: String, expected: usize, got: usize },
    QubitOutOfRange { qubit: usize, qubits: usize },
    Gate(GateError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Lexical(s) => write!(f, "lexical error: {s}"),
            ParseErrorKind::MissingVersion => write!(f, "expected `version {VERSION}` header"),
            ParseErrorKind::UnsupportedVersion(v) => write!(f, "unsupported version {v:?}"),
            ParseErrorKind::MissingQubits => write!(f, "expected `qubits N` header"),
            ParseErrorKind::BadQubitCount(s) => write!(f, "invalid qubit count {s:?}"),
            ParseErrorKind::InvalidKernelName(s) => write!(f, "invalid kernel name {s:?}"),
            ParseErrorKind::DuplicateKernel(s) => write!(f, "duplicate kernel {s:?}"),
            ParseErrorKind::UnknownGate(s) => write!(f, "unknown gate {s:?}"),
            ParseErrorKind::Arity { gate, expected, got } => {
                write!(f, "{gate} takes {expected} qubit operand(s), got {got}")
            }
            ParseErrorKind::QubitOutOfRange { qubit, qubits } => {
                write!(f, "qubit q[{qubit}] out of range (program declares {qubits} qubits)")
            }
            ParseErrorKind::Gate(e) => write!(f, "{e}"),
        }
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// `q[<digits>]` → index.
fn qubit_operand(token: &str) -> Option<Result<usize, String>> {
    let inner = token.strip_prefix("q[")?.strip_suffix(']')?.trim();
    Some(inner.parse::<usize>().map_err(|_| format!("bad qubit index {inner:?}")))
}

fn parse_instruction(line: usize, text: &str, num_qubits: usize) -> Result<GateInstance, ParseError> {
    let (mnemonic, rest) = match text.find(char::is_whitespace) {
        Some(pos) => (&text[..pos], text[pos..].trim()),
        None => (text, ""),
    };
    let kind = GateKind::from_mnemonic(mnemonic)
        .ok_or_else(|| err(line, ParseErrorKind::UnknownGate(mnemonic.to_string())))?;

    let mut qubits = Vec::new();
    let mut angle = None;
    if !rest.is_empty() {
        for token in rest.split(',').map(str::trim) {
            if token.is_empty() {
                return Err(err(line, ParseErrorKind::Lexical("empty operand".into())));
            }
            if angle.is_some() {
                return Err(err(line, ParseErrorKind::Lexical(format!("unexpected {token:?} after angle"))));
            }
            match qubit_operand(token) {
                Some(Ok(q)) => qubits.push(q),
                Some(Err(msg)) => return Err(err(line, ParseErrorKind::Lexical(msg))),
                None => {
                    let value = token
                        .parse::<f64>()
                        .map_err(|_| err(line, ParseErrorKind::Lexical(format!("unrecognized operand {token:?}"))))?;
                    angle = Some(value);
                }
            }
        }
    }

    if qubits.len() != kind.arity() {
        return Err(err(
            line,
            ParseErrorKind::Arity {
                gate: kind.mnemonic().to_string(),
                expected: kind.arity(),
                got: qubits.len(),
            },
        ));
    }
    if let Some(&qubit) = qubits.iter().find(|&&q| q >= num_qubits) {
        return Err(err(line, ParseErrorKind::QubitOutOfRange { qubit, qubits: num_qubits }));
    }
    GateInstance::new(kind, qubits, angle).map_err(|e| err(line, ParseErrorKind::Gate(e)))
}

/// Parses cQASM source. LF and CRLF line endings are both accepted.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let mut version_seen = false;
    let mut program: Option<Program> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let code = raw.split('#').next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        if !version_seen {
            let mut words = code.split_whitespace();
            if !words.next().is_some_and(|w| w.eq_ignore_ascii_case("version")) {
                return Err(err(line, ParseErrorKind::MissingVersion));
            }
            let v = words.next().unwrap_or("");
            if v != VERSION || words.next().is_some() {
                return Err(err(line, ParseErrorKind::UnsupportedVersion(code.to_string())));
            }
            version_seen = true;
            continue;
        }
        let Some(program) = program.as_mut() else {
            let mut words = code.split_whitespace();
            if !words.next().is_some_and(|w| w.eq_ignore_ascii_case("qubits")) {
                return Err(err(line, ParseErrorKind::MissingQubits));
            }
            let count = words.next().unwrap_or("");
            let n = count
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1 && words.next().is_none())
                .ok_or_else(|| err(line, ParseErrorKind::BadQubitCount(count.to_string())))?;
            program = Some(Program::new(n));
            continue;
        };
        if let Some(name) = code.strip_prefix('.') {
            if !is_identifier(name) {
                return Err(err(line, ParseErrorKind::InvalidKernelName(name.to_string())));
            }
            if program.kernels().iter().any(|k| k.name == name) {
                return Err(err(line, ParseErrorKind::DuplicateKernel(name.to_string())));
            }
            program.begin_kernel(name);
            continue;
        }
        let gate = parse_instruction(line, code, program.num_qubits())?;
        program.instructions.push(gate);
    }

    if !version_seen {
        return Err(err(last_line.max(1), ParseErrorKind::MissingVersion));
    }
    program.ok_or_else(|| err(last_line.max(1), ParseErrorKind::MissingQubits))
}
