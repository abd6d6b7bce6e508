//! Tokenizer for the definition language. `#` starts a line comment;
//! identifiers may contain letters, digits, `_ ~ + . ' | / -` (`|` and `/`
//! appear in derived names of threads and sum elements), with `-` excluded
//! when it would begin a `->` arrow.

use crate::diag::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Arrow,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> &'static str {
        match self {
            TokenKind::Ident(_) => "identifier",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Comma => "`,`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::Arrow => "`->`",
            TokenKind::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '~' | '+' | '.' | '\'' | '|' | '/' | '-')
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut u32, col: &mut u32| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    chars.next();
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '{' | '}' | '(' | ')' | ',' | ';' | ':' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semi,
                    _ => TokenKind::Colon,
                };
                out.push(Token {
                    kind,
                    line: tline,
                    col: tcol,
                });
            }
            c if is_ident_char(c) => {
                let mut ident = String::new();
                loop {
                    match chars.peek() {
                        Some(&'-') => {
                            // a `-` beginning `->` ends the identifier
                            let mut ahead = chars.clone();
                            ahead.next();
                            if ahead.peek() == Some(&'>') {
                                if ident.is_empty() {
                                    chars.next();
                                    chars.next();
                                    bump('-', &mut line, &mut col);
                                    bump('>', &mut line, &mut col);
                                    out.push(Token {
                                        kind: TokenKind::Arrow,
                                        line: tline,
                                        col: tcol,
                                    });
                                }
                                break;
                            }
                            ident.push('-');
                            chars.next();
                            bump('-', &mut line, &mut col);
                        }
                        Some(&c) if is_ident_char(c) => {
                            ident.push(c);
                            chars.next();
                            bump(c, &mut line, &mut col);
                        }
                        _ => break,
                    }
                }
                if !ident.is_empty() {
                    out.push(Token {
                        kind: TokenKind::Ident(ident),
                        line: tline,
                        col: tcol,
                    });
                }
            }
            other => {
                return Err(Diagnostic::new(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_and_negative_names() {
        let toks = lex("a -> -3").unwrap();
        let kinds: Vec<&TokenKind> = toks.iter().map(|t| &t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                &TokenKind::Ident("a".into()),
                &TokenKind::Arrow,
                &TokenKind::Ident("-3".into()),
                &TokenKind::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = lex("# nothing\n  x").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("x".into()));
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
    }

    #[test]
    fn tilde_names() {
        let toks = lex("~e1,e1").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("~e1".into()));
        assert_eq!(toks[1].kind, TokenKind::Comma);
    }

    #[test]
    fn stray_bytes_are_diagnostics() {
        assert!(lex("graph G @").is_err());
        assert!(lex("\u{1F980}").is_err());
    }
}
