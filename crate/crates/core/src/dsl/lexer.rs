// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::fmt;

use super::DslError;

/// 1-based line/column position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Find,
    Given,
    Such,
    That,
    ForAll,
    Exists,
    Int,
    Of,
    AllDiff,
    Abs,
    True,
    False,
    Ident(String),
    Number(i64),
    Colon,
    Comma,
    Dot,
    DotDot,
    Bar,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    And,
    Or,
    Implies,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Find => "find",
            TokenKind::Given => "given",
            TokenKind::Such => "such",
            TokenKind::That => "that",
            TokenKind::ForAll => "forAll",
            TokenKind::Exists => "exists",
            TokenKind::Int => "int",
            TokenKind::Of => "of",
            TokenKind::AllDiff => "allDiff",
            TokenKind::Abs => "abs",
            TokenKind::True => "true",
            TokenKind::False => "false",
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Number(n) => return write!(f, "integer {n}"),
            TokenKind::Colon => ":",
            TokenKind::Comma => ",",
            TokenKind::Dot => ".",
            TokenKind::DotDot => "..",
            TokenKind::Bar => "|",
            TokenKind::LBrack => "[",
            TokenKind::RBrack => "]",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Eq => "=",
            TokenKind::Neq => "!=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Bang => "!",
            TokenKind::And => "/\\",
            TokenKind::Or => "\\/",
            TokenKind::Implies => "->",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "find" => TokenKind::Find,
        "given" => TokenKind::Given,
        "such" => TokenKind::Such,
        "that" => TokenKind::That,
        "forAll" | "forall" => TokenKind::ForAll,
        "exists" => TokenKind::Exists,
        "int" => TokenKind::Int,
        "of" => TokenKind::Of,
        "allDiff" | "alldiff" => TokenKind::AllDiff,
        "abs" => TokenKind::Abs,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        _ => return None,
    })
}

/// Splits model text into tokens. `$` starts a comment running to end of line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
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
        if c == '$' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
            tokens.push(Token { kind, pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let value = text.parse::<i64>().map_err(|_| DslError::IntegerOverflow { pos })?;
            tokens.push(Token {
                kind: TokenKind::Number(value),
                pos,
            });
            continue;
        }

        let next = chars.get(i + 1).copied();
        let (kind, width) = match (c, next) {
            ('.', Some('.')) => (TokenKind::DotDot, 2),
            ('!', Some('=')) => (TokenKind::Neq, 2),
            ('<', Some('=')) => (TokenKind::Le, 2),
            ('>', Some('=')) => (TokenKind::Ge, 2),
            ('-', Some('>')) => (TokenKind::Implies, 2),
            ('/', Some('\\')) => (TokenKind::And, 2),
            ('\\', Some('/')) => (TokenKind::Or, 2),
            ('.', _) => (TokenKind::Dot, 1),
            (':', _) => (TokenKind::Colon, 1),
            (',', _) => (TokenKind::Comma, 1),
            ('|', _) => (TokenKind::Bar, 1),
            ('[', _) => (TokenKind::LBrack, 1),
            (']', _) => (TokenKind::RBrack, 1),
            ('(', _) => (TokenKind::LParen, 1),
            (')', _) => (TokenKind::RParen, 1),
            ('+', _) => (TokenKind::Plus, 1),
            ('-', _) => (TokenKind::Minus, 1),
            ('*', _) => (TokenKind::Star, 1),
            ('=', _) => (TokenKind::Eq, 1),
            ('<', _) => (TokenKind::Lt, 1),
            ('>', _) => (TokenKind::Gt, 1),
            ('!', _) => (TokenKind::Bang, 1),
            _ => return Err(DslError::IllegalCharacter { ch: c, pos }),
        };
        tokens.push(Token { kind, pos });
        i += width;
        col += width;
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn declaration_tokens() {
        use TokenKind::*;
        assert_eq!(
            kinds("find x : [int(0..max)] of int(0..100)"),
            vec![
                Find,
                Ident("x".into()),
                Colon,
                LBrack,
                Int,
                LParen,
                Number(0),
                DotDot,
                Ident("max".into()),
                RParen,
                RBrack,
                Of,
                Int,
                LParen,
                Number(0),
                DotDot,
                Number(100),
                RParen,
            ]
        );
    }

    #[test]
    fn empty_source() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  $ only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn illegal_character_position() {
        match tokenize("x @ y") {
            Err(DslError::IllegalCharacter { ch, pos }) => {
                assert_eq!(ch, '@');
                assert_eq!(pos, Pos { line: 1, col: 3 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multi_char_operators_and_positions() {
        let toks = tokenize("a /\\ b\n  -> !c <= -1").unwrap();
        let k: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(
            k,
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::And,
                TokenKind::Ident("b".into()),
                TokenKind::Implies,
                TokenKind::Bang,
                TokenKind::Ident("c".into()),
                TokenKind::Le,
                TokenKind::Minus,
                TokenKind::Number(1),
            ]
        );
        assert_eq!(toks[3].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(kinds("x $ comment\ny").len(), 2);
    }
}
