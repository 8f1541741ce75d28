use crate::diag::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub start: Pos,
    pub end: Pos,
}

#[derive(Debug, Clone)]
pub struct LexError {
    pub message: String,
    pub at: Pos,
}

// Longest match first.
const SYMBOLS: &[&str] = &[
    "|||", "|~|", "->", "..", "[]", "[|", "|]", "{|", "|}", "/\\", ":=", "!=", "<=", "!", "?", ".", ";", "|",
    "\\", "{", "}", "(", ")", ",", ":", "=", "<", ">", "^", "+", "-", "@", "[", "]",
];

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = Pos::new(line, col);
        if c.is_ascii_alphabetic() {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += (i - s) as u32;
            out.push(Token { tok: Tok::Ident(src[s..i].to_string()), start, end: Pos::new(line, col) });
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += (i - s) as u32;
            let n = src[s..i].parse::<u64>().map_err(|_| LexError { message: "numeric literal too large".into(), at: start })?;
            out.push(Token { tok: Tok::Nat(n), start, end: Pos::new(line, col) });
            continue;
        }
        match SYMBOLS.iter().find(|s| bytes[i..].starts_with(s.as_bytes())) {
            Some(sym) => {
                i += sym.len();
                col += sym.len() as u32;
                out.push(Token { tok: Tok::Sym(sym), start, end: Pos::new(line, col) });
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(LexError { message: format!("unexpected character `{ch}`"), at: start });
            }
        }
    }
    let at = Pos::new(line, col);
    out.push(Token { tok: Tok::Eof, start: at, end: at });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_longest_match() {
        assert_eq!(
            toks("a [| {x} | {| c |} | {} |] b"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("[|"),
                Tok::Sym("{"),
                Tok::Ident("x".into()),
                Tok::Sym("}"),
                Tok::Sym("|"),
                Tok::Sym("{|"),
                Tok::Ident("c".into()),
                Tok::Sym("|}"),
                Tok::Sym("|"),
                Tok::Sym("{"),
                Tok::Sym("}"),
                Tok::Sym("|]"),
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
        assert_eq!(toks("wait 0..P")[2], Tok::Sym(".."));
    }

    #[test]
    fn comments_and_positions() {
        let t = lex("-- hi\n  Skip").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("Skip".into()));
        assert_eq!(t[0].start, Pos::new(2, 3));
    }

    #[test]
    fn rejects_unknown_bytes() {
        assert!(lex("a # b").is_err());
        assert!(lex("é").is_err());
    }
}
