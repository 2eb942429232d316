//! Instance file parsing and serialization.
//!
//! The accepted layout is whitespace-separated numeric text: a header
//! `n m best_known` (0 meaning unknown), then `n` profits, then the m x n
//! weights grouped by constraint row, then `m` capacities. Line breaks are
//! insignificant. Files holding several instances start with an instance
//! count and concatenate the instances; a file is treated as
//! single-instance when the header interpretation consumes its tokens
//! exactly, otherwise the first token is read as a count.
//!
//! Every error carries the 1-based line and column of the offending token.

use std::fmt;
use std::path::Path;

use mkp::instance::{Instance, InstanceError};
use thiserror::Error;

/// Guard against absurd header values before allocating n*m cells.
const MAX_DIMENSION: usize = 1_000_000;
const MAX_CELLS: usize = 50_000_000;

/// Position of a token in the source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{source_name}: unexpected end of input at {pos} while reading {expected}")]
    UnexpectedEof {
        source_name: String,
        pos: Pos,
        expected: &'static str,
    },
    #[error("{source_name}: invalid number {token:?} at {pos}")]
    InvalidToken {
        source_name: String,
        pos: Pos,
        token: String,
    },
    #[error("{source_name}: {message} at {pos}")]
    InvalidValue {
        source_name: String,
        pos: Pos,
        message: String,
    },
    #[error("{source_name}: dimensions {n} x {m} at {pos} exceed the supported size")]
    DimensionOverflow {
        source_name: String,
        pos: Pos,
        n: i64,
        m: i64,
    },
    #[error("{source_name}: unexpected trailing data at {pos}")]
    TrailingData { source_name: String, pos: Pos },
    #[error("{source_name}: {source}")]
    Model {
        source_name: String,
        #[source]
        source: InstanceError,
    },
}

struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let mut col = 1;
        for piece in line.split_whitespace() {
            // byte offset of this piece within the remaining line
            let start = line[col - 1..]
                .find(piece)
                .map(|off| col + off)
                .unwrap_or(col);
            tokens.push(Token {
                text: piece,
                pos: Pos {
                    line: line_idx + 1,
                    col: start,
                },
            });
            col = start + piece.len();
        }
    }
    tokens
}

struct Reader<'a> {
    source_name: &'a str,
    tokens: Vec<Token<'a>>,
    cursor: usize,
    end: Pos,
}

impl<'a> Reader<'a> {
    fn new(source_name: &'a str, text: &'a str) -> Self {
        let tokens = tokenize(text);
        let end = tokens
            .last()
            .map(|t| Pos {
                line: t.pos.line,
                col: t.pos.col + t.text.len(),
            })
            .unwrap_or(Pos { line: 1, col: 1 });
        Self {
            source_name,
            tokens,
            cursor: 0,
            end,
        }
    }

    fn remaining(&self) -> usize {
        self.tokens.len() - self.cursor
    }

    fn next_i64(&mut self, expected: &'static str) -> Result<(i64, Pos), ParseError> {
        let Some(token) = self.tokens.get(self.cursor) else {
            return Err(ParseError::UnexpectedEof {
                source_name: self.source_name.to_string(),
                pos: self.end,
                expected,
            });
        };
        self.cursor += 1;
        let value = token
            .text
            .parse::<i64>()
            .map_err(|_| ParseError::InvalidToken {
                source_name: self.source_name.to_string(),
                pos: token.pos,
                token: token.text.to_string(),
            })?;
        Ok((value, token.pos))
    }

    fn invalid(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError::InvalidValue {
            source_name: self.source_name.to_string(),
            pos,
            message: message.into(),
        }
    }
}

/// Token count a single instance with the given header occupies, header
/// included. None on overflow.
fn single_instance_tokens(n: i64, m: i64) -> Option<usize> {
    if n < 1 || m < 1 || n as usize > MAX_DIMENSION || m as usize > MAX_DIMENSION {
        return None;
    }
    let (n, m) = (n as usize, m as usize);
    let cells = n.checked_mul(m)?;
    if cells > MAX_CELLS {
        return None;
    }
    Some(3 + n + cells + m)
}

fn parse_one(reader: &mut Reader<'_>, name: String) -> Result<Instance, ParseError> {
    let (n, n_pos) = reader.next_i64("item count")?;
    let (m, m_pos) = reader.next_i64("resource count")?;
    if n < 1 {
        return Err(reader.invalid(n_pos, format!("item count must be positive, got {n}")));
    }
    if m < 1 {
        return Err(reader.invalid(m_pos, format!("resource count must be positive, got {m}")));
    }
    if single_instance_tokens(n, m).is_none() {
        return Err(ParseError::DimensionOverflow {
            source_name: reader.source_name.to_string(),
            pos: n_pos,
            n,
            m,
        });
    }
    let (n, m) = (n as usize, m as usize);

    let (best_raw, best_pos) = reader.next_i64("best-known value")?;
    if best_raw < 0 {
        return Err(reader.invalid(
            best_pos,
            format!("best-known value must be non-negative, got {best_raw}"),
        ));
    }
    let best_known = (best_raw > 0).then_some(best_raw);

    let mut profits = Vec::with_capacity(n);
    for j in 0..n {
        let (p, pos) = reader.next_i64("profit")?;
        if p <= 0 {
            return Err(reader.invalid(pos, format!("profit of item {j} must be positive, got {p}")));
        }
        profits.push(p);
    }

    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let (w, pos) = reader.next_i64("weight")?;
            if w < 0 {
                return Err(reader.invalid(
                    pos,
                    format!("weight of item {j} in resource {i} must be non-negative, got {w}"),
                ));
            }
            row.push(w);
        }
        weights.push(row);
    }

    let mut capacities = Vec::with_capacity(m);
    for i in 0..m {
        let (r, pos) = reader.next_i64("capacity")?;
        if r <= 0 {
            return Err(reader.invalid(
                pos,
                format!("capacity of resource {i} must be positive, got {r}"),
            ));
        }
        capacities.push(r);
    }

    Instance::new(name, profits, weights, capacities, best_known).map_err(|source| {
        ParseError::Model {
            source_name: reader.source_name.to_string(),
            source,
        }
    })
}

/// Parses every instance in the text. `source_name` names single instances
/// directly; instances of a multi-instance file are named `m.n-k` after the
/// class convention.
pub fn parse_instances(text: &str, source_name: &str) -> Result<Vec<Instance>, ParseError> {
    let mut reader = Reader::new(source_name, text);

    // Single-instance layout wins when its token count matches exactly.
    if reader.remaining() >= 3 {
        let n = reader.tokens[0].text.parse::<i64>().ok();
        let m = reader.tokens[1].text.parse::<i64>().ok();
        if let (Some(n), Some(m)) = (n, m) {
            if single_instance_tokens(n, m) == Some(reader.remaining()) {
                return Ok(vec![parse_one(&mut reader, source_name.to_string())?]);
            }
        }
    }

    let (count, count_pos) = reader.next_i64("instance count")?;
    if count < 1 {
        return Err(reader.invalid(
            count_pos,
            format!("instance count must be positive, got {count}"),
        ));
    }
    let mut instances = Vec::with_capacity(count as usize);
    for k in 0..count {
        // Peek dimensions for the conventional m.n-k name.
        let name_hint = {
            let n = reader.tokens.get(reader.cursor).and_then(|t| t.text.parse::<i64>().ok());
            let m = reader
                .tokens
                .get(reader.cursor + 1)
                .and_then(|t| t.text.parse::<i64>().ok());
            match (n, m) {
                (Some(n), Some(m)) => format!("{m}.{n}-{k:02}"),
                _ => format!("{source_name}-{k:02}"),
            }
        };
        instances.push(parse_one(&mut reader, name_hint)?);
    }
    if reader.remaining() > 0 {
        let pos = reader.tokens[reader.cursor].pos;
        return Err(ParseError::TrailingData {
            source_name: source_name.to_string(),
            pos,
        });
    }
    Ok(instances)
}

/// Reads and parses an instance file; the file stem names the instance(s).
pub fn load_instances(path: &Path) -> anyhow::Result<Vec<Instance>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(parse_instances(&text, &stem)?)
}

/// Serializes one instance back to the single-instance text layout.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        inst.n(),
        inst.m(),
        inst.best_known().unwrap_or(0)
    ));
    let join = |vals: &[i64]| {
        vals.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&join(inst.profits()));
    out.push('\n');
    for i in 0..inst.m() {
        out.push_str(&join(inst.resource_weights(i)));
        out.push('\n');
    }
    out.push_str(&join(inst.capacities()));
    out.push('\n');
    out
}
