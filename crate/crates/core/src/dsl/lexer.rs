use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Str(String),
    Number(f64),
    LBrace,
    RBrace,
    Eq,
    Arrow,
    /// A lexical error; the parser reports it when reached.
    Invalid(String),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => alloc::format!("`{s}`"),
            TokenKind::Str(_) => "string".into(),
            TokenKind::Number(_) => "number".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Invalid(_) => "invalid input".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub(crate) fn tokenize(src: &str) -> Vec<Token> {
    let mut cur = Cursor {
        chars: src.char_indices().peekable(),
        src,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        skip_trivia(&mut cur);
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                line,
                column,
            });
            return tokens;
        };
        let kind = match c {
            '{' => {
                cur.bump();
                TokenKind::LBrace
            }
            '}' => {
                cur.bump();
                TokenKind::RBrace
            }
            '=' => {
                cur.bump();
                TokenKind::Eq
            }
            '-' if cur.peek_second() == Some('>') => {
                cur.bump();
                cur.bump();
                TokenKind::Arrow
            }
            '"' => lex_string(&mut cur),
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => lex_number(&mut cur),
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(s)
            }
            other => {
                cur.bump();
                TokenKind::Invalid(alloc::format!("unexpected character `{other}`"))
            }
        };
        tokens.push(Token { kind, line, column });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) {
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
        } else if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
        } else {
            break;
        }
    }
}

fn lex_string(cur: &mut Cursor<'_>) -> TokenKind {
    cur.bump();
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => return TokenKind::Invalid("unterminated string literal".into()),
            Some('"') => return TokenKind::Str(s),
            Some('\\') => match cur.bump() {
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some(other) => {
                    // consume the rest so one bad escape is one error
                    while let Some(c) = cur.bump() {
                        if c == '"' {
                            break;
                        }
                    }
                    return TokenKind::Invalid(alloc::format!("invalid escape `\\{other}`"));
                }
                None => return TokenKind::Invalid("unterminated string literal".into()),
            },
            Some(c) => s.push(c),
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>) -> TokenKind {
    let start = cur.offset();
    if matches!(cur.peek(), Some('-' | '+')) {
        cur.bump();
    }
    let mut digits = 0;
    while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
        cur.bump();
        digits += 1;
    }
    if cur.peek() == Some('.') {
        cur.bump();
        while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
            cur.bump();
            digits += 1;
        }
    }
    if digits > 0 && matches!(cur.peek(), Some('e' | 'E')) {
        cur.bump();
        if matches!(cur.peek(), Some('-' | '+')) {
            cur.bump();
        }
        let mut exp_digits = 0;
        while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
            cur.bump();
            exp_digits += 1;
        }
        if exp_digits == 0 {
            return TokenKind::Invalid("malformed number: missing exponent digits".into());
        }
    }
    let end = cur.offset();
    let text = &cur.src[start..end];
    if digits == 0 {
        return TokenKind::Invalid(alloc::format!("malformed number `{text}`"));
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => TokenKind::Number(v),
        _ => TokenKind::Invalid(alloc::format!("malformed number `{text}`")),
    }
}
