use super::ast::Span;
use super::LangError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Integer literal without suffix; range-checked by the parser.
    Int(u64),
    Long(u64),
    Double(f64),
    Char(char),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Long(v) => format!("`{v}L`"),
            Tok::Double(v) => format!("`{v:?}`"),
            Tok::Char(c) => format!("`{c:?}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCTS: [&str; 24] = [
    "->", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", ";", ",", ".", ":", "=", "<",
    ">", "+", "-", "*", "/", "%", "!",
];

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, expected: &str, found: &str) -> LangError {
        LangError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LangError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur);
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                span: Span {
                    start,
                    end: start,
                    line,
                    col,
                },
            });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            Tok::Ident(ident)
        } else if c.is_ascii_digit() {
            lex_number(&mut cur)?
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.peek() {
                    None | Some('\n') => return Err(cur.error("closing `\"`", "end of line")),
                    Some('"') => {
                        cur.bump();
                        break;
                    }
                    Some('\\') => {
                        cur.bump();
                        s.push(lex_escape(&mut cur)?);
                    }
                    Some(c) => {
                        cur.bump();
                        s.push(c);
                    }
                }
            }
            Tok::Str(s)
        } else if c == '\'' {
            cur.bump();
            let ch = match cur.bump() {
                Some('\\') => lex_escape(&mut cur)?,
                Some('\'') | None => return Err(cur.error("character", "`'`")),
                Some(c) => c,
            };
            if cur.bump() != Some('\'') {
                return Err(cur.error("closing `'`", "more characters"));
            }
            Tok::Char(ch)
        } else {
            let rest = &src[cur.pos..];
            let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(**p)) else {
                return Err(cur.error("token", &format!("`{c}`")));
            };
            for _ in 0..p.len() {
                cur.bump();
            }
            Tok::Punct(p)
        };
        out.push(Token {
            tok,
            span: Span {
                start,
                end: cur.pos,
                line,
                col,
            },
        });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) {
    loop {
        match cur.peek() {
            Some(c) if c.is_whitespace() => {
                cur.bump();
            }
            Some('/') if cur.peek2() == Some('/') => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            _ => return,
        }
    }
}

fn lex_escape(cur: &mut Cursor<'_>) -> Result<char, LangError> {
    match cur.bump() {
        Some('n') => Ok('\n'),
        Some('t') => Ok('\t'),
        Some('r') => Ok('\r'),
        Some('\\') => Ok('\\'),
        Some('"') => Ok('"'),
        Some('\'') => Ok('\''),
        Some('u') => {
            if cur.bump() != Some('{') {
                return Err(cur.error("`{` after \\u", "other"));
            }
            let mut hex = String::new();
            while let Some(c) = cur.peek() {
                if c == '}' {
                    break;
                }
                hex.push(c);
                cur.bump();
            }
            cur.bump();
            u32::from_str_radix(&hex, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| cur.error("unicode scalar value", &hex))
        }
        other => Err(cur.error(
            "escape sequence",
            &other.map(String::from).unwrap_or_default(),
        )),
    }
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<Tok, LangError> {
    let start = cur.pos;
    let mut is_double = false;
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
    }
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        is_double = true;
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e') | Some('E')) {
        let next = cur.peek2();
        if next.is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+') {
            is_double = true;
            cur.bump();
            if matches!(cur.peek(), Some('-') | Some('+')) {
                cur.bump();
            }
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
        }
    }
    let text = &cur.src[start..cur.pos];
    if is_double {
        return text
            .parse::<f64>()
            .map(Tok::Double)
            .map_err(|_| cur.error("number", text));
    }
    let value = text
        .parse::<u64>()
        .map_err(|_| cur.error("integer literal in range", text))?;
    if cur.peek() == Some('L') {
        cur.bump();
        Ok(Tok::Long(value))
    } else {
        Ok(Tok::Int(value))
    }
}
