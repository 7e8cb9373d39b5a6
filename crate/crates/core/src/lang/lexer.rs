use super::diag::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
    /// `//` comment lines seen since the previous token.
    pub comments: Vec<String>,
}

const PUNCTS: &[&str] = &["==", "{", "}", "(", ")", "<", ">", ";", ",", ".", "=", "+"];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut comments = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    while i < bytes.len() {
        let span = Span { line, col: src[line_start..i].chars().count() + 1 };
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            let end = src[i..].find('\n').map_or(src.len(), |n| i + n);
            comments.push(src[i + 2..end].trim_end().to_string());
            i = end;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &src[start..i];
            let v = text
                .parse::<i64>()
                .map_err(|_| Diagnostic::error("", format!("integer literal {text} out of range")).at(span))?;
            Tok::Int(v)
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(Diagnostic::error("", "unterminated string literal").at(span));
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\n' => return Err(Diagnostic::error("", "unterminated string literal").at(span)),
                    '\\' => {
                        let esc = src[i..].chars().next();
                        i += esc.map_or(0, char::len_utf8);
                        match esc {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            _ => return Err(Diagnostic::error("", "invalid escape in string literal").at(span)),
                        }
                    }
                    other => s.push(other),
                }
            }
            Tok::Str(s)
        } else if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            i += p.len();
            Tok::Punct(p)
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(Diagnostic::error("", format!("unexpected character '{ch}'")).at(span));
        };
        out.push(Token { tok, span, comments: std::mem::take(&mut comments) });
    }
    let span = Span { line, col: src[line_start..].chars().count() + 1 };
    out.push(Token { tok: Tok::Eof, span, comments });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_attach_to_next_token() {
        let toks = tokenize("// a\n// b\nclass X {}").unwrap();
        assert_eq!(toks[0].comments, vec![" a".to_string(), " b".to_string()]);
        assert_eq!(toks[0].tok, Tok::Ident("class".into()));
        assert_eq!(toks[2].span, Span { line: 3, col: 9 });
    }

    #[test]
    fn string_escapes() {
        let toks = tokenize(r#""a\"b\n""#).unwrap();
        assert_eq!(toks[0].tok, Tok::Str("a\"b\n".into()));
    }

    #[test]
    fn bad_char_reports_position() {
        let err = tokenize("class A {\n  # }").unwrap_err();
        assert_eq!(err.span, Some(Span { line: 2, col: 3 }));
    }
}
