use super::ast::Func;
use super::DslError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    FunctionName,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }
}

pub const KEYWORDS: [&str; 2] = ["let", "return"];

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

/// Classifies an identifier-shaped word.
pub(crate) fn word_kind(word: &str) -> TokenKind {
    if KEYWORDS.contains(&word) {
        TokenKind::Keyword
    } else if Func::from_name(word).is_some() {
        TokenKind::FunctionName
    } else {
        TokenKind::Identifier
    }
}

/// Splits DSL source into classified tokens.
pub fn tokenize(source: &str) -> Result<Vec<Token>, DslError> {
    Ok(lex(source)?.into_iter().map(|s| s.token).collect())
}

pub(crate) fn lex(source: &str) -> Result<Vec<Spanned>, DslError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            None
        } else if c.is_ascii_digit() {
            i = scan_number(&chars, i).map_err(|at| DslError::Lex {
                line,
                column: column + (at - start),
                found: chars.get(at).copied().unwrap_or(' '),
            })?;
            Some(TokenKind::Number)
        } else if "+-*/=;(),".contains(c) {
            i += 1;
            Some(TokenKind::Punct)
        } else {
            return Err(DslError::Lex {
                line,
                column,
                found: c,
            });
        };
        let text: String = chars[start..i].iter().collect();
        let kind = kind.unwrap_or_else(|| word_kind(&text));
        out.push(Spanned {
            token: Token { kind, text },
            line,
            column,
        });
        column += i - start;
    }
    Ok(out)
}

/// `digits ('.' digits)? ([eE] [+-]? digits)?`; returns the end index, or the
/// index of the offending character.
fn scan_number(chars: &[char], mut i: usize) -> Result<usize, usize> {
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > s
    };
    digits(&mut i);
    if i < chars.len() && chars[i] == '.' {
        i += 1;
        if !digits(&mut i) {
            return Err(i);
        }
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        i += 1;
        if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            i += 1;
        }
        if !digits(&mut i) {
            return Err(i);
        }
    }
    if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
        return Err(i);
    }
    Ok(i)
}

/// Tokenizer for arbitrary (non-DSL) source: words, numbers and single
/// punctuation characters; never fails.
pub fn tokenize_fallback(source: &str) -> Vec<Token> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            None
        } else if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.') {
                i += 1;
            }
            Some(TokenKind::Number)
        } else {
            i += 1;
            Some(TokenKind::Punct)
        };
        let text: String = chars[start..i].iter().collect();
        let kind = kind.unwrap_or_else(|| word_kind(&text));
        out.push(Token { kind, text });
    }
    out
}
