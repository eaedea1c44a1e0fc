use super::ast::Span;
use super::ParseDiagnostic;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    OpenQasm,
    Include,
    Qreg,
    Creg,
    Gate,
    Opaque,
    Measure,
    Reset,
    Barrier,
    If,
    Pi,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Arrow,
    EqEq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Real(r) => format!("number {r}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::OpenQasm => "OPENQASM",
            Tok::Include => "include",
            Tok::Qreg => "qreg",
            Tok::Creg => "creg",
            Tok::Gate => "gate",
            Tok::Opaque => "opaque",
            Tok::Measure => "measure",
            Tok::Reset => "reset",
            Tok::Barrier => "barrier",
            Tok::If => "if",
            Tok::Pi => "pi",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Arrow => "->",
            Tok::EqEq => "==",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }
}

/// Splits `src` into tokens; lexical errors are pushed to `diags` and the offending input skipped.
pub(crate) fn lex(src: &str, diags: &mut Vec<ParseDiagnostic>) -> Vec<Token> {
    let mut cur = Cursor { chars: src.char_indices().peekable(), src, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        // whitespace and comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') if cur.peek2() == Some('/') => {
                    while cur.peek().is_some_and(|c| c != '\n') {
                        cur.bump();
                    }
                }
                Some('/') if cur.peek2() == Some('*') => {
                    let span = Span { line: cur.line, col: cur.col };
                    cur.bump();
                    cur.bump();
                    let mut closed = false;
                    while let Some(c) = cur.bump() {
                        if c == '*' && cur.peek() == Some('/') {
                            cur.bump();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        diags.push(ParseDiagnostic::error(span, "unterminated block comment"));
                    }
                }
                _ => break,
            }
        }
        let span = Span { line: cur.line, col: cur.col };
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span });
            return out;
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &src[start..cur.offset()];
            match word {
                "OPENQASM" => Tok::OpenQasm,
                "include" => Tok::Include,
                "qreg" => Tok::Qreg,
                "creg" => Tok::Creg,
                "gate" => Tok::Gate,
                "opaque" => Tok::Opaque,
                "measure" => Tok::Measure,
                "reset" => Tok::Reset,
                "barrier" => Tok::Barrier,
                "if" => Tok::If,
                "pi" => Tok::Pi,
                _ => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur, span, diags)
        } else if c == '"' {
            cur.bump();
            let start = cur.offset();
            while cur.peek().is_some_and(|c| c != '"' && c != '\n') {
                cur.bump();
            }
            let text = src[start..cur.offset()].to_string();
            if cur.peek() == Some('"') {
                cur.bump();
            } else {
                diags.push(ParseDiagnostic::error(span, "unterminated string literal"));
            }
            Tok::Str(text)
        } else {
            cur.bump();
            match c {
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '+' => Tok::Plus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                '=' if cur.peek() == Some('=') => {
                    cur.bump();
                    Tok::EqEq
                }
                other => {
                    diags.push(ParseDiagnostic::error(span, format!("unexpected character {other:?}")));
                    continue;
                }
            }
        };
        out.push(Token { tok, span });
    }
}

fn lex_number(cur: &mut Cursor<'_>, span: Span, diags: &mut Vec<ParseDiagnostic>) -> Tok {
    let start = cur.offset();
    let mut is_real = false;
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
    }
    if cur.peek() == Some('.') {
        is_real = true;
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let next = cur.peek2();
        let signed = matches!(next, Some('+' | '-'));
        let mut look = cur.chars.clone();
        look.next();
        if signed {
            look.next();
        }
        if look.peek().is_some_and(|&(_, c)| c.is_ascii_digit()) {
            is_real = true;
            cur.bump();
            if signed {
                cur.bump();
            }
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
        }
    }
    let text = &cur.src[start..cur.offset()];
    if is_real {
        match text.parse::<f64>() {
            Ok(v) => Tok::Real(v),
            Err(_) => {
                diags.push(ParseDiagnostic::error(span, format!("malformed number `{text}`")));
                Tok::Real(0.0)
            }
        }
    } else {
        match text.parse::<u64>() {
            Ok(v) => Tok::Int(v),
            Err(_) => {
                diags.push(ParseDiagnostic::error(span, format!("integer literal `{text}` is too large")));
                Tok::Int(u64::MAX)
            }
        }
    }
}
