use std::fmt;

use super::{Atom, Clause, CmpOp, Literal, Program, Term, MEMBER};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    ArityConflict {
        predicate: String,
        first: usize,
        second: usize,
        line: usize,
        column: usize,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, column, message } => write!(f, "syntax error at {line}:{column}: {message}"),
            ParseError::ArityConflict {
                predicate,
                first,
                second,
                line,
                column,
            } => write!(
                f,
                "arity conflict at {line}:{column}: {predicate} used with arity {first} and {second}"
            ),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Quoted(String),
    Num(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    If,
    Cmp(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "'{s}'"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Cmp(op) => write!(f, "`{op}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        let next = chars.get(i + 1).copied();
        match c {
            '(' => {
                push(Tok::LParen, &mut out);
                advance(1, &mut i, &mut col);
            }
            ')' => {
                push(Tok::RParen, &mut out);
                advance(1, &mut i, &mut col);
            }
            '[' => {
                push(Tok::LBracket, &mut out);
                advance(1, &mut i, &mut col);
            }
            ']' => {
                push(Tok::RBracket, &mut out);
                advance(1, &mut i, &mut col);
            }
            ',' => {
                push(Tok::Comma, &mut out);
                advance(1, &mut i, &mut col);
            }
            '.' => {
                push(Tok::Dot, &mut out);
                advance(1, &mut i, &mut col);
            }
            ':' if next == Some('-') => {
                push(Tok::If, &mut out);
                advance(2, &mut i, &mut col);
            }
            '=' if next == Some('<') => {
                push(Tok::Cmp(CmpOp::Le), &mut out);
                advance(2, &mut i, &mut col);
            }
            '>' if next == Some('=') => {
                push(Tok::Cmp(CmpOp::Ge), &mut out);
                advance(2, &mut i, &mut col);
            }
            '<' => {
                push(Tok::Cmp(CmpOp::Lt), &mut out);
                advance(1, &mut i, &mut col);
            }
            '>' => {
                push(Tok::Cmp(CmpOp::Gt), &mut out);
                advance(1, &mut i, &mut col);
            }
            '\'' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(syntax(start_line, start_col, "unterminated quoted atom")),
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e) if e == '\'' || e == '\\' => s.push(e),
                                _ => return Err(syntax(line, col + (j - i), "invalid escape")),
                            }
                            j += 2;
                        }
                        Some('\'') => {
                            j += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                if s.is_empty() {
                    return Err(syntax(start_line, start_col, "empty constant"));
                }
                push(Tok::Quoted(s), &mut out);
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if matches!(chars.get(j), Some('e') | Some('E')) {
                    let mut k = j + 1;
                    if matches!(chars.get(k), Some('+') | Some('-')) {
                        k += 1;
                    }
                    if chars.get(k).is_some_and(|d| d.is_ascii_digit()) {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let value: f64 = lexeme
                    .parse()
                    .map_err(|_| syntax(start_line, start_col, format!("bad number `{lexeme}`")))?;
                if !value.is_finite() {
                    return Err(syntax(start_line, start_col, "number is not finite"));
                }
                push(Tok::Num(value), &mut out);
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                };
                push(tok, &mut out);
                advance(j - i, &mut i, &mut col);
            }
            other => return Err(syntax(start_line, start_col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    // location of every atom, used to report arity conflicts
    atom_spans: Vec<(String, usize, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        syntax(t.line, t.column, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek().tok)))
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let head = self.atom()?;
        let mut body = Vec::new();
        match self.peek().tok {
            Tok::Dot => {}
            Tok::If => {
                self.bump();
                loop {
                    if let Some(lit) = self.literal()? {
                        body.push(lit);
                    }
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            _ => return Err(self.error(format!("expected `:-` or `.`, found {}", self.peek().tok))),
        }
        self.expect(Tok::Dot)?;
        Ok(Clause::new(head, body))
    }

    /// `None` for the `true` literal.
    fn literal(&mut self) -> Result<Option<Literal>, ParseError> {
        let here = self.peek().clone();
        match &here.tok {
            Tok::Var(v) => {
                let var = v.clone();
                self.bump();
                let op = match self.bump().tok {
                    Tok::Cmp(op) => op,
                    other => {
                        return Err(syntax(
                            here.line,
                            here.column,
                            format!("expected comparison after variable, found {other}"),
                        ))
                    }
                };
                match self.bump().tok {
                    Tok::Num(n) => Ok(Some(Literal::constraint(var, op, n))),
                    other => Err(syntax(here.line, here.column, format!("expected number threshold, found {other}"))),
                }
            }
            Tok::Ident(w) if w == "not" && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Quoted(_)) => {
                self.bump();
                Ok(Some(Literal::Neg(self.atom()?)))
            }
            Tok::Ident(w) if w == "true" && !matches!(self.peek_at(1), Tok::LParen) => {
                self.bump();
                Ok(None)
            }
            Tok::Ident(w) if w == MEMBER && matches!(self.peek_at(1), Tok::LParen) => {
                self.bump();
                self.bump();
                let term = self.term()?;
                self.expect(Tok::Comma)?;
                self.expect(Tok::LBracket)?;
                let mut items = Vec::new();
                if self.peek().tok != Tok::RBracket {
                    loop {
                        items.push(self.term()?);
                        if self.peek().tok == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::RParen)?;
                Ok(Some(Literal::Member { term, items }))
            }
            _ => Ok(Some(Literal::Pos(self.atom()?))),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.bump();
        let name = match start.tok {
            Tok::Ident(name) | Tok::Quoted(name) => name,
            other => return Err(syntax(start.line, start.column, format!("expected predicate name, found {other}"))),
        };
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.atom_spans.push((name.clone(), args.len(), start.line, start.column));
        Ok(Atom::new(name, args))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(c) | Tok::Quoted(c) => {
                if matches!(self.peek().tok, Tok::LParen) {
                    return Err(syntax(t.line, t.column, "function symbols are not supported"));
                }
                Ok(Term::Const(c))
            }
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Num(n) => Ok(Term::num(n)),
            other => Err(syntax(t.line, t.column, format!("expected a term, found {other}"))),
        }
    }
}

/// Parses a whole program. Clauses are returned in source order; strata are
/// left uncomputed.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        atom_spans: Vec::new(),
    };
    let mut clauses = Vec::new();
    while parser.peek().tok != Tok::Eof {
        clauses.push(parser.clause()?);
    }

    let mut arities = std::collections::HashMap::new();
    for (name, arity, line, column) in &parser.atom_spans {
        match arities.get(name) {
            Some(&first) if first != *arity => {
                return Err(ParseError::ArityConflict {
                    predicate: name.clone(),
                    first,
                    second: *arity,
                    line: *line,
                    column: *column,
                })
            }
            Some(_) => {}
            None => {
                arities.insert(name.clone(), *arity);
            }
        }
    }
    Ok(Program::new(clauses))
}

/// Parses a single atom such as `fly(tweety)`; a trailing `.` is optional.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        atom_spans: Vec::new(),
    };
    let atom = parser.atom()?;
    if parser.peek().tok == Tok::Dot {
        parser.bump();
    }
    if parser.peek().tok != Tok::Eof {
        return Err(parser.error(format!("unexpected {} after atom", parser.peek().tok)));
    }
    Ok(atom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::print_program;

    #[test]
    fn rule_and_fact() {
        let p = parse_program("bird(X) :- penguin(X). bird(tweety).").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.clauses[0].body.len(), 1);
        assert!(p.clauses[1].is_fact());
    }

    #[test]
    fn negation() {
        let p = parse_program("fly(X) :- bird(X), not ab0(X).").unwrap();
        assert_eq!(
            p.clauses[0].body,
            vec![
                Literal::Pos(Atom::new("bird", vec![Term::var("X")])),
                Literal::Neg(Atom::new("ab0", vec![Term::var("X")])),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn constraints_and_member() {
        let p = parse_program("play(X) :- temperature(X,A), A =< 75, not ab0(X).\nfly(X) :- member(X,[jet, 'Big Jet']).").unwrap();
        assert_eq!(p.clauses[0].body[1], Literal::constraint("A", CmpOp::Le, 75.0));
        assert_eq!(
            p.clauses[1].body[0],
            Literal::Member {
                term: Term::var("X"),
                items: vec![Term::constant("jet"), Term::constant("Big Jet")]
            }
        );
        assert_eq!(
            print_program(&p),
            "play(X) :- temperature(X,A), A =< 75.0, not ab0(X).\nfly(X) :- member(X,[jet,'Big Jet'])."
        );
    }

    #[test]
    fn all_comparison_operators() {
        let p = parse_program("p(X) :- v(X,A), A < 1, A >= -2.5, A > 1e3, A =< 0.").unwrap();
        let ops: Vec<_> = p.clauses[0].body[1..]
            .iter()
            .map(|l| match l {
                Literal::Constraint { op, .. } => *op,
                _ => panic!(),
            })
            .collect();
        assert_eq!(ops, vec![CmpOp::Lt, CmpOp::Ge, CmpOp::Gt, CmpOp::Le]);
    }

    #[test]
    fn true_body() {
        let p = parse_program("goal(X) :- true.").unwrap();
        assert!(p.clauses[0].body.is_empty());
        assert_eq!(print_program(&p), "goal(X) :- true.");
    }

    #[test]
    fn syntax_error_location() {
        let err = parse_program("p(a).\nq(X) :- r(X)").unwrap_err();
        match err {
            ParseError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_program("p(a) :- q(a) r(a).").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 14, .. }), "{err:?}");
    }

    #[test]
    fn arity_conflict() {
        let err = parse_program("p(a).\np(a,b).").unwrap_err();
        assert!(matches!(
            err,
            ParseError::ArityConflict {
                first: 1,
                second: 2,
                line: 2,
                ..
            }
        ));
    }

    #[test]
    fn rejects_function_symbols() {
        assert!(parse_program("p(f(a)).").is_err());
    }

    #[test]
    fn atom_parsing() {
        assert_eq!(parse_atom("fly(tweety).").unwrap(), Atom::unary("fly", "tweety"));
        assert!(parse_atom("fly(tweety) x").is_err());
    }
}
