use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Datatype tag of a data property range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Double,
    Integer,
    Boolean,
    Token,
}

impl Datatype {
    pub fn as_str(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Double => "double",
            Datatype::Integer => "integer",
            Datatype::Boolean => "boolean",
            Datatype::Token => "token",
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Datatype {
    type Err = LiteralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "string" => Datatype::String,
            "double" => Datatype::Double,
            "integer" => Datatype::Integer,
            "boolean" => Datatype::Boolean,
            "token" => Datatype::Token,
            other => return Err(LiteralError::UnknownDatatype(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("unknown datatype `{0}`")]
    UnknownDatatype(String),
    #[error("`{lexical}` is not a valid {datatype} literal")]
    BadLexical { datatype: Datatype, lexical: String },
}

/// A typed data value. Doubles are always finite.
#[derive(Debug, Clone)]
pub enum Literal {
    String(String),
    Double(f64),
    Integer(i64),
    Boolean(bool),
    Token(String),
}

impl Literal {
    pub fn double(value: f64) -> Result<Self, LiteralError> {
        if value.is_finite() {
            Ok(Literal::Double(value))
        } else {
            Err(LiteralError::BadLexical {
                datatype: Datatype::Double,
                lexical: format!("{value}"),
            })
        }
    }

    pub fn token(value: impl Into<String>) -> Result<Self, LiteralError> {
        let value = value.into();
        if is_token(&value) {
            Ok(Literal::Token(value))
        } else {
            Err(LiteralError::BadLexical {
                datatype: Datatype::Token,
                lexical: value,
            })
        }
    }

    pub fn datatype(&self) -> Datatype {
        match self {
            Literal::String(_) => Datatype::String,
            Literal::Double(_) => Datatype::Double,
            Literal::Integer(_) => Datatype::Integer,
            Literal::Boolean(_) => Datatype::Boolean,
            Literal::Token(_) => Datatype::Token,
        }
    }

    /// Canonical, locale-independent lexical form.
    pub fn lexical(&self) -> String {
        match self {
            Literal::String(s) | Literal::Token(s) => s.clone(),
            // Debug formatting is the shortest round-tripping form and always
            // carries a `.` or an exponent.
            Literal::Double(v) => format!("{v:?}"),
            Literal::Integer(v) => v.to_string(),
            Literal::Boolean(v) => v.to_string(),
        }
    }

    pub fn parse(datatype: Datatype, lexical: &str) -> Result<Self, LiteralError> {
        let bad = || LiteralError::BadLexical {
            datatype,
            lexical: lexical.to_string(),
        };
        match datatype {
            Datatype::String => Ok(Literal::String(lexical.to_string())),
            Datatype::Token => Literal::token(lexical),
            Datatype::Double => {
                // Rust accepts "inf"/"NaN"; only plain decimal forms are allowed here.
                if !lexical
                    .chars()
                    .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
                {
                    return Err(bad());
                }
                let v: f64 = lexical.parse().map_err(|_| bad())?;
                Literal::double(v).map_err(|_| bad())
            }
            Datatype::Integer => lexical.parse().map(Literal::Integer).map_err(|_| bad()),
            Datatype::Boolean => match lexical {
                "true" => Ok(Literal::Boolean(true)),
                "false" => Ok(Literal::Boolean(false)),
                _ => Err(bad()),
            },
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Double(v) => Some(*v),
            Literal::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Literal::Integer(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Literal::Boolean(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Literal::String(s) | Literal::Token(s) => Some(s),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Literal::String(_) => 0,
            Literal::Double(_) => 1,
            Literal::Integer(_) => 2,
            Literal::Boolean(_) => 3,
            Literal::Token(_) => 4,
        }
    }
}

/// Tokens are non-empty and whitespace/quote free.
pub fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && c != '"' && c != '\\')
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) | (Literal::Token(a), Literal::Token(b)) => a.cmp(b),
            (Literal::Double(a), Literal::Double(b)) => a.total_cmp(b),
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::Boolean(a), Literal::Boolean(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^{}", escape(&self.lexical()), self.datatype())
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Parses `"lexical"^^datatype` (the whole input must be consumed).
pub(crate) fn parse_rendered(s: &str) -> Result<Literal, String> {
    let rest = s.strip_prefix('"').ok_or("literal must start with `\"`")?;
    let mut lexical = String::new();
    let mut chars = rest.char_indices();
    let mut end = None;
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                end = Some(i);
                break;
            }
            '\\' => match chars.next() {
                Some((_, '"')) => lexical.push('"'),
                Some((_, '\\')) => lexical.push('\\'),
                Some((_, 'n')) => lexical.push('\n'),
                Some((_, 'r')) => lexical.push('\r'),
                Some((_, 't')) => lexical.push('\t'),
                _ => return Err("bad escape sequence in literal".into()),
            },
            c => lexical.push(c),
        }
    }
    let end = end.ok_or("unterminated literal")?;
    let tag = rest[end + 1..]
        .strip_prefix("^^")
        .ok_or("literal must be followed by `^^datatype`")?;
    let datatype: Datatype = tag.parse().map_err(|e: LiteralError| e.to_string())?;
    let literal = Literal::parse(datatype, &lexical).map_err(|e| e.to_string())?;
    // Only canonical lexical forms are accepted so that re-rendering is exact.
    if literal.lexical() != lexical {
        return Err(format!(
            "`{lexical}` is not the canonical {datatype} form (expected `{}`)",
            literal.lexical()
        ));
    }
    Ok(literal)
}
