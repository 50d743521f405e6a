//! Patterns over digit symbols, compiled to minimal DFAs.
//!
//! Supported syntax: digit literals (`0`..`9`, then `a`..`z` for larger
//! bases), tuple literals `[d,d,...]` for multi-track alphabets, juxtaposition
//! for concatenation, `|`, `*`, `+`, `?` and parentheses. Whitespace is
//! ignored. The empty pattern denotes the empty word.
//!
//! Compilation goes through the position (Glushkov) automaton, which has no
//! epsilon moves, followed by subset construction and minimization.

use super::alphabet::DigitAlphabet;
use super::dfa::Dfa;
use super::minimize::minimize_dfa;
use super::nfa::{determinize, Edge, Nfa, DEFAULT_STATE_CAP};
use super::AutomatonError;

#[derive(Debug, Clone)]
enum Ast {
    Epsilon,
    Symbol(usize),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Star(Box<Ast>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: &'a DigitAlphabet,
}

impl<'a> Parser<'a> {
    fn new(pattern: &str, alphabet: &'a DigitAlphabet) -> Self {
        let chars = pattern.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Self { chars, pos: 0, alphabet }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or_else(|| self.chars.last().map_or(0, |&(i, c)| i + c.len_utf8()), |&(i, _)| i)
    }

    fn error(&self, message: impl Into<String>) -> AutomatonError {
        AutomatonError::Parse { position: self.offset(), message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn parse(mut self) -> Result<Ast, AutomatonError> {
        let ast = self.alternation()?;
        match self.peek() {
            None => Ok(ast),
            Some(')') => Err(self.error("unmatched ')'")),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn alternation(&mut self) -> Result<Ast, AutomatonError> {
        let mut branches = vec![self.concatenation()?];
        while self.peek() == Some('|') {
            self.bump();
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Ast::Alt(branches) })
    }

    fn concatenation(&mut self) -> Result<Ast, AutomatonError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.repetition()?);
        }
        Ok(match parts.len() {
            0 => Ast::Epsilon,
            1 => parts.pop().unwrap(),
            _ => Ast::Concat(parts),
        })
    }

    fn repetition(&mut self) -> Result<Ast, AutomatonError> {
        let mut atom = self.atom()?;
        while let Some(op) = self.peek() {
            atom = match op {
                '*' => Ast::Star(Box::new(atom)),
                '+' => Ast::Concat(vec![atom.clone(), Ast::Star(Box::new(atom))]),
                '?' => Ast::Alt(vec![atom, Ast::Epsilon]),
                _ => break,
            };
            self.bump();
        }
        Ok(atom)
    }

    fn digit(&mut self) -> Result<u32, AutomatonError> {
        match self.peek().and_then(|c| c.to_digit(36)) {
            Some(d) if d < self.alphabet.base() => {
                self.bump();
                Ok(d)
            }
            Some(d) => Err(self.error(format!("digit {d} not below base {}", self.alphabet.base()))),
            None => Err(self.error("expected a digit")),
        }
    }

    fn atom(&mut self) -> Result<Ast, AutomatonError> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.alternation()?;
                if self.bump() != Some(')') {
                    self.pos -= 1;
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some('[') => {
                self.bump();
                let mut digits = vec![self.digit()?];
                while self.peek() == Some(',') {
                    self.bump();
                    digits.push(self.digit()?);
                }
                if self.peek() != Some(']') {
                    return Err(self.error("expected ']'"));
                }
                if digits.len() != self.alphabet.arity() {
                    return Err(self.error(format!(
                        "tuple has {} components, alphabet arity is {}",
                        digits.len(),
                        self.alphabet.arity()
                    )));
                }
                self.bump();
                Ok(Ast::Symbol(self.alphabet.encode(&digits).expect("digits checked")))
            }
            Some(c) if matches!(c, '*' | '+' | '?') => Err(self.error(format!("'{c}' has nothing to repeat"))),
            Some(_) => {
                if self.alphabet.arity() != 1 {
                    return Err(self.error("multi-track alphabets need tuple literals like [0,1]"));
                }
                let d = self.digit()?;
                Ok(Ast::Symbol(d as usize))
            }
            None => Err(self.error("unexpected end of pattern")),
        }
    }
}

#[derive(Default)]
struct Positions {
    symbols: Vec<usize>,
    follow: Vec<Vec<usize>>,
}

struct Summary {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

impl Positions {
    fn visit(&mut self, ast: &Ast) -> Summary {
        match ast {
            Ast::Epsilon => Summary { nullable: true, first: vec![], last: vec![] },
            Ast::Symbol(s) => {
                let p = self.symbols.len();
                self.symbols.push(*s);
                self.follow.push(Vec::new());
                Summary { nullable: false, first: vec![p], last: vec![p] }
            }
            Ast::Concat(parts) => {
                let mut acc = Summary { nullable: true, first: vec![], last: vec![] };
                for part in parts {
                    let next = self.visit(part);
                    for &p in &acc.last {
                        self.follow[p].extend(next.first.iter().copied());
                    }
                    if acc.nullable {
                        acc.first.extend(next.first.iter().copied());
                    }
                    acc.last = if next.nullable { acc.last.into_iter().chain(next.last).collect() } else { next.last };
                    acc.nullable &= next.nullable;
                }
                acc
            }
            Ast::Alt(branches) => {
                let mut acc = Summary { nullable: false, first: vec![], last: vec![] };
                for b in branches {
                    let next = self.visit(b);
                    acc.nullable |= next.nullable;
                    acc.first.extend(next.first);
                    acc.last.extend(next.last);
                }
                acc
            }
            Ast::Star(inner) => {
                let s = self.visit(inner);
                for &p in &s.last {
                    self.follow[p].extend(s.first.iter().copied());
                }
                Summary { nullable: true, ..s }
            }
        }
    }
}

/// Compiles `pattern` to the minimal DFA of its language.
pub fn compile_pattern(pattern: &str, alphabet: DigitAlphabet) -> Result<Dfa, AutomatonError> {
    let ast = Parser::new(pattern, &alphabet).parse()?;
    let mut positions = Positions::default();
    let summary = positions.visit(&ast);
    let n = positions.symbols.len();
    // State 0 is the start; position p is state p + 1.
    let mut edges = vec![Vec::new(); n + 1];
    for &p in &summary.first {
        edges[0].push(Edge { symbol: positions.symbols[p], target: p + 1, multiplicity: 1 });
    }
    for (p, follow) in positions.follow.iter().enumerate() {
        for &q in follow {
            edges[p + 1].push(Edge { symbol: positions.symbols[q], target: q + 1, multiplicity: 1 });
        }
    }
    let mut accepting = vec![false; n + 1];
    accepting[0] = summary.nullable;
    for &p in &summary.last {
        accepting[p + 1] = true;
    }
    let nfa = Nfa::from_parts(alphabet, vec![0], edges, accepting);
    Ok(minimize_dfa(&determinize(&nfa, DEFAULT_STATE_CAP)?))
}
