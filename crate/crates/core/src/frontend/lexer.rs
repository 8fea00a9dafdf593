//! Tokens of the surface language. Unicode spellings of the symbols are
//! accepted alongside their ASCII forms.

use std::fmt;

pub type Span = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `#check`, `#eval`, ...
    Directive(String),
    Def,
    Fn,
    Rec,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Bar,
    Caret,
    Eq,
    Arrow,
    FatArrow,
    Turnstile,
    TurnstileHash,
    Lambda,
    Pi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "`{x}`"),
            Tok::Directive(x) => return write!(f, "`#{x}`"),
            Tok::Def => "def",
            Tok::Fn => "fn",
            Tok::Rec => "rec",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Caret => "^",
            Tok::Eq => "=",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Turnstile => "|-",
            Tok::TurnstileHash => "|-#",
            Tok::Lambda => "\\",
            Tok::Pi => "Pi",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || ('₀'..='₉').contains(&c)
}

fn subscript_digit(c: char) -> char {
    if ('₀'..='₉').contains(&c) {
        char::from_u32(c as u32 - '₀' as u32 + '0' as u32).unwrap_or(c)
    } else {
        c
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(start, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if src[start..].starts_with("--") {
            while let Some(&(_, c)) = it.peek() {
                if c == '\n' {
                    break;
                }
                it.next();
            }
            continue;
        }
        let sym: Option<(Tok, usize)> = [
            ("|-#", Tok::TurnstileHash),
            ("⊢#", Tok::TurnstileHash),
            ("|-", Tok::Turnstile),
            ("⊢", Tok::Turnstile),
            ("->", Tok::Arrow),
            ("→", Tok::Arrow),
            ("=>", Tok::FatArrow),
            ("⇒", Tok::FatArrow),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("[", Tok::LBrack),
            ("⌜", Tok::LBrack),
            ("]", Tok::RBrack),
            ("⌝", Tok::RBrack),
            (",", Tok::Comma),
            (":", Tok::Colon),
            (".", Tok::Dot),
            ("·", Tok::Dot),
            ("|", Tok::Bar),
            ("^", Tok::Caret),
            ("=", Tok::Eq),
            ("\\", Tok::Lambda),
            ("λ", Tok::Lambda),
            ("Π", Tok::Pi),
        ]
        .into_iter()
        .find(|(s, _)| src[start..].starts_with(s))
        .map(|(s, t)| (t, s.len()));
        if let Some((tok, len)) = sym {
            let end = start + len;
            while it.peek().is_some_and(|&(i, _)| i < end) {
                it.next();
            }
            out.push(Token { tok, span: (start, end) });
            continue;
        }
        let directive = c == '#';
        if directive || is_ident_start(c) {
            it.next();
            let mut text = String::new();
            if !directive {
                text.push(c);
            }
            let mut end = start + c.len_utf8();
            while let Some(&(i, c)) = it.peek() {
                if !is_ident_char(c) {
                    break;
                }
                text.push(subscript_digit(c));
                end = i + c.len_utf8();
                it.next();
            }
            let tok = if directive {
                if text.is_empty() {
                    return Err(LexError { span: (start, end), message: "expected a directive name after `#`".into() });
                }
                Tok::Directive(text)
            } else {
                match text.as_str() {
                    "def" => Tok::Def,
                    "fn" => Tok::Fn,
                    "rec" => Tok::Rec,
                    "Pi" => Tok::Pi,
                    _ => Tok::Ident(text),
                }
            };
            out.push(Token { tok, span: (start, end) });
            continue;
        }
        return Err(LexError { span: (start, start + c.len_utf8()), message: format!("unexpected character {c:?}") });
    }
    out.push(Token { tok: Tok::Eof, span: (src.len(), src.len()) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ascii_and_unicode_agree() {
        assert_eq!(toks("fn x => [psi |- \\y. y]"), toks("fn x ⇒ ⌜psi ⊢ λy. y⌝"));
        assert_eq!(toks("|-# -> Pi"), vec![Tok::TurnstileHash, Tok::Arrow, Tok::Pi, Tok::Eof]);
    }

    #[test]
    fn comments_and_directives() {
        assert_eq!(
            toks("#check U0 -- trailing\n: U1"),
            vec![
                Tok::Directive("check".into()),
                Tok::Ident("U0".into()),
                Tok::Colon,
                Tok::Ident("U1".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn subscripts_and_spans() {
        let t = lex("U₀ f_m'").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("U0".into()));
        assert_eq!(t[1].tok, Tok::Ident("f_m'".into()));
        assert_eq!(t[1].span, (5, 9));
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(lex("fn x => $").is_err());
    }
}
