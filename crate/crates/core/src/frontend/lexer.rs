use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Plus,
    Minus,
    Star,
    Slash,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let peek = |k: usize| chars.get(i + k).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && peek(1) == Some('/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() || (c == '.' && peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i;
            let mut dot = false;
            while j < chars.len() && (chars[j].is_ascii_digit() || (chars[j] == '.' && !dot)) {
                dot |= chars[j] == '.';
                j += 1;
            }
            (Tok::Number(chars[i..j].iter().collect()), j - i)
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
            if three == "<->" {
                (Tok::Iff, 3)
            } else {
                match two.as_str() {
                    "->" => (Tok::Implies, 2),
                    "<=" => (Tok::Le, 2),
                    ">=" => (Tok::Ge, 2),
                    "!=" => (Tok::Ne, 2),
                    "==" => (Tok::Eq, 2),
                    "&&" => (Tok::And, 2),
                    "||" => (Tok::Or, 2),
                    _ => match c {
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        ',' => (Tok::Comma, 1),
                        '!' => (Tok::Not, 1),
                        '&' => (Tok::And, 1),
                        '|' => (Tok::Or, 1),
                        '<' => (Tok::Lt, 1),
                        '>' => (Tok::Gt, 1),
                        '=' => (Tok::Eq, 1),
                        '+' => (Tok::Plus, 1),
                        '-' => (Tok::Minus, 1),
                        '*' => (Tok::Star, 1),
                        '/' => (Tok::Slash, 1),
                        other => {
                            return Err(Error::Parse {
                                line,
                                col,
                                message: format!("unexpected character `{other}`"),
                            })
                        }
                    },
                }
            }
        };
        out.push(Token {
            tok,
            line: start.0,
            col: start.1,
        });
        i += len;
        col += len;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(
            toks("a<->b -> c <= d != e"),
            vec![
                Tok::Ident("a".into()),
                Tok::Iff,
                Tok::Ident("b".into()),
                Tok::Implies,
                Tok::Ident("c".into()),
                Tok::Le,
                Tok::Ident("d".into()),
                Tok::Ne,
                Tok::Ident("e".into()),
            ]
        );
        assert_eq!(
            toks("x<-1"),
            vec![
                Tok::Ident("x".into()),
                Tok::Lt,
                Tok::Minus,
                Tok::Number("1".into())
            ]
        );
    }

    #[test]
    fn positions_and_comments() {
        let t = tokenize("# comment\n  x // tail\n1.5").unwrap();
        assert_eq!((t[0].line, t[0].col), (2, 3));
        assert_eq!(t[1].tok, Tok::Number("1.5".into()));
        assert_eq!((t[1].line, t[1].col), (3, 1));
        let err = tokenize("x @ y").unwrap_err();
        assert!(err.to_string().starts_with("1:3:"));
    }
}
