//! Tokenizer and token cursor shared by the `.arch`, `.ops`, `.rp` and
//! `.ftpl` readers.

use std::fmt;

use thiserror::Error;

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    /// Unsigned magnitude; a leading `-` is a separate token.
    Int(u128),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Colon,
    Comma,
    Arrow,
    Assign,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Implies,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Int(n) => write!(f, "`{n}`"),
            Token::Str(s) => write!(f, "{s:?}"),
            other => {
                let s = match other {
                    Token::LBrace => "{",
                    Token::RBrace => "}",
                    Token::LParen => "(",
                    Token::RParen => ")",
                    Token::LBracket => "[",
                    Token::RBracket => "]",
                    Token::Dot => ".",
                    Token::Colon => ":",
                    Token::Comma => ",",
                    Token::Arrow => "->",
                    Token::Assign => ":=",
                    Token::Plus => "+",
                    Token::Minus => "-",
                    Token::Star => "*",
                    Token::Lt => "<",
                    Token::Le => "<=",
                    Token::Eq => "=",
                    Token::Ne => "!=",
                    Token::Ge => ">=",
                    Token::Gt => ">",
                    Token::Implies => "=>",
                    Token::Ident(_) | Token::Int(_) | Token::Str(_) => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

/// Which line-comment introducers a format accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comments {
    /// `// ...`
    Slashes,
    /// `# ...`
    Hash,
    /// Both `//` and `#`.
    Both,
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(text: &str, comments: Comments) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            bump!();
            continue;
        }
        let slash_comment = ch == '/'
            && chars.get(i + 1) == Some(&'/')
            && matches!(comments, Comments::Slashes | Comments::Both);
        let hash_comment = ch == '#' && matches!(comments, Comments::Hash | Comments::Both);
        if slash_comment || hash_comment {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }

        let (tl, tc) = (line, col);
        let token = if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            Token::Ident(chars[start..i].iter().collect())
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits
                .parse::<u128>()
                .map_err(|_| ParseError::new(tl, tc, "integer literal out of range"))?;
            Token::Int(value)
        } else if ch == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(ParseError::new(tl, tc, "unterminated string literal"))
                    }
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        let esc = match chars.get(i) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => return Err(ParseError::new(line, col, "invalid escape sequence")),
                        };
                        s.push(esc);
                        bump!();
                    }
                    Some(&c) => {
                        s.push(c);
                        bump!();
                    }
                }
            }
            Token::Str(s)
        } else {
            let next = chars.get(i + 1).copied();
            let (token, width) = match (ch, next) {
                ('-', Some('>')) => (Token::Arrow, 2),
                (':', Some('=')) => (Token::Assign, 2),
                ('<', Some('=')) => (Token::Le, 2),
                ('>', Some('=')) => (Token::Ge, 2),
                ('!', Some('=')) => (Token::Ne, 2),
                ('=', Some('>')) => (Token::Implies, 2),
                ('{', _) => (Token::LBrace, 1),
                ('}', _) => (Token::RBrace, 1),
                ('(', _) => (Token::LParen, 1),
                (')', _) => (Token::RParen, 1),
                ('[', _) => (Token::LBracket, 1),
                (']', _) => (Token::RBracket, 1),
                ('.', _) => (Token::Dot, 1),
                (':', _) => (Token::Colon, 1),
                (',', _) => (Token::Comma, 1),
                ('+', _) => (Token::Plus, 1),
                ('-', _) => (Token::Minus, 1),
                ('*', _) => (Token::Star, 1),
                ('<', _) => (Token::Lt, 1),
                ('>', _) => (Token::Gt, 1),
                ('=', _) => (Token::Eq, 1),
                _ => {
                    return Err(ParseError::new(
                        tl,
                        tc,
                        format!("unexpected character {ch:?}"),
                    ))
                }
            };
            for _ in 0..width {
                bump!();
            }
            token
        };
        out.push(Spanned {
            token,
            line: tl,
            column: tc,
        });
    }
    Ok(out)
}

/// Recursive-descent helper over a token vector.
pub struct Cursor {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_column: usize,
}

impl Cursor {
    pub fn new(text: &str, comments: Comments) -> Result<Self, ParseError> {
        let tokens = tokenize(text, comments)?;
        let end_line = text.lines().count().max(1);
        let end_column = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        Ok(Self {
            tokens,
            pos: 0,
            end_line,
            end_column,
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset).map(|s| &s.token)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(s) => ParseError::new(s.line, s.column, message),
            None => ParseError::new(self.end_line, self.end_column, message),
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        }
    }

    pub fn unexpected(&self, expected: &str) -> ParseError {
        self.error(format!("expected {expected}, found {}", self.found()))
    }

    pub fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &Token) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.unexpected(&token.to_string()))
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// `IDENT "." IDENT`
    pub fn expect_dotted(&mut self, what: &str) -> Result<(String, String), ParseError> {
        let a = self.expect_ident(what)?;
        self.expect(&Token::Dot)?;
        let b = self.expect_ident(what)?;
        Ok((a, b))
    }

    /// A signed 64-bit integer literal, `-`? INT.
    pub fn expect_int(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat(&Token::Minus);
        match self.peek() {
            Some(Token::Int(n)) => {
                let n = *n;
                let value = if negative {
                    if n <= i64::MAX as u128 + 1 {
                        Some((n as i128).wrapping_neg() as i64)
                    } else {
                        None
                    }
                } else {
                    i64::try_from(n).ok()
                };
                let value = value.ok_or_else(|| self.error("integer literal out of range"))?;
                self.pos += 1;
                Ok(value)
            }
            _ => Err(self.unexpected("integer literal")),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
