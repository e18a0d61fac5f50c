//! Hand-written lexer and recursive-descent parser for the KB and query
//! languages.
//!
//! KB statements end with `.`; `#` starts a line comment. Concept names start
//! with an upper-case letter, role names and individuals with a lower-case
//! one. Concept assertions accept any concept, e.g. `not exists (r).B(a).`,
//! so that spoiler axioms can be written back out.

use super::concept::{Concept, RoleConjunction};
use super::kb::{Axiom, KnowledgeBase};
use super::query::{ConceptAtom, ConjunctiveQuery, RoleAtom, Ucq, Var};
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Upper(String),
    Lower(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Amp,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Upper(s) | Tok::Lower(s) => format!("'{s}'"),
            Tok::Var(s) => format!("'?{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const KEYWORDS: &[&str] = &["not", "and", "or", "exists", "forall"];
const RESERVED_NAMES: &[&str] = &["Top", "Bot", "SubClassOf"];

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&ch) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match ch {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '.' => {
                bump(&mut chars);
                Tok::Dot
            }
            '&' => {
                bump(&mut chars);
                Tok::Amp
            }
            '?' => {
                bump(&mut chars);
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(SyntaxError::at(start_line, start_col, "expected variable name after '?'"));
                }
                Tok::Var(name)
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if c.is_ascii_uppercase() {
                    Tok::Upper(name)
                } else {
                    Tok::Lower(name)
                }
            }
            other => {
                return Err(SyntaxError::at(
                    start_line,
                    start_col,
                    format!("unexpected character '{other}'"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let s = &self.toks[self.pos];
        SyntaxError::at(s.line, s.column, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Lower(s) if s == kw)
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    /// A role name or individual: lower-case and not a keyword.
    fn lower_name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Lower(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn concept_name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Upper(s) if !RESERVED_NAMES.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected concept name, found {}", other.describe()))),
        }
    }

    fn variable(&mut self) -> Result<Var, SyntaxError> {
        match self.peek().clone() {
            Tok::Var(s) => {
                self.next();
                Ok(Var::new(s))
            }
            other => Err(self.error(format!("expected variable, found {}", other.describe()))),
        }
    }

    fn role_conjunction(&mut self) -> Result<RoleConjunction, SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut roles = vec![self.lower_name("role name")?];
        while *self.peek() == Tok::Amp {
            self.next();
            roles.push(self.lower_name("role name")?);
        }
        self.expect(Tok::RParen)?;
        Ok(RoleConjunction::new(roles).expect("at least one role parsed"))
    }

    fn concept(&mut self) -> Result<Concept, SyntaxError> {
        match self.peek().clone() {
            Tok::Upper(s) if s == "Bot" => {
                self.next();
                Ok(Concept::Bottom)
            }
            Tok::Upper(s) if s == "Top" => {
                self.next();
                Ok(Concept::top())
            }
            Tok::Upper(_) => Ok(Concept::Atomic(self.concept_name()?)),
            Tok::Lower(s) if s == "not" => {
                self.next();
                Ok(Concept::not(self.concept()?))
            }
            Tok::Lower(s) if s == "exists" || s == "forall" => {
                self.next();
                let roles = self.role_conjunction()?;
                self.expect(Tok::Dot)?;
                let filler = self.concept()?;
                Ok(if s == "exists" {
                    Concept::exists(roles, filler)
                } else {
                    Concept::forall(roles, filler)
                })
            }
            Tok::LParen => {
                self.next();
                let left = self.concept()?;
                let combined = if self.at_keyword("and") {
                    self.next();
                    Concept::and([left, self.concept()?])
                } else if self.at_keyword("or") {
                    self.next();
                    Concept::or(left, self.concept()?)
                } else {
                    return Err(self.error(format!(
                        "expected 'and' or 'or', found {}",
                        self.peek().describe()
                    )));
                };
                self.expect(Tok::RParen)?;
                Ok(combined)
            }
            other => Err(self.error(format!("expected concept, found {}", other.describe()))),
        }
    }

    fn statement(&mut self) -> Result<Axiom, SyntaxError> {
        let lower_role_ahead =
            |t: &Tok| matches!(t, Tok::Lower(s) if !KEYWORDS.contains(&s.as_str()));
        if self.at_keyword("not") && lower_role_ahead(self.peek_at(1)) {
            self.next();
            let (r, a, b) = self.role_assertion_body()?;
            self.expect(Tok::Dot)?;
            return Ok(Axiom::NegRoleAssertion(r, a, b));
        }
        if lower_role_ahead(self.peek()) {
            let (r, a, b) = self.role_assertion_body()?;
            self.expect(Tok::Dot)?;
            return Ok(Axiom::RoleAssertion(r, a, b));
        }
        let lhs = self.concept()?;
        match self.peek().clone() {
            Tok::Upper(s) if s == "SubClassOf" => {
                self.next();
                let rhs = self.concept()?;
                self.expect(Tok::Dot)?;
                Ok(Axiom::Gci(lhs, rhs))
            }
            Tok::LParen => {
                self.next();
                let a = self.lower_name("individual name")?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                Ok(Axiom::ConceptAssertion(lhs, a))
            }
            other => Err(self.error(format!(
                "expected 'SubClassOf' or '(', found {}",
                other.describe()
            ))),
        }
    }

    fn role_assertion_body(&mut self) -> Result<(String, String, String), SyntaxError> {
        let r = self.lower_name("role name")?;
        self.expect(Tok::LParen)?;
        let a = self.lower_name("individual name")?;
        self.expect(Tok::Comma)?;
        let b = self.lower_name("individual name")?;
        self.expect(Tok::RParen)?;
        Ok((r, a, b))
    }

    fn cq(&mut self) -> Result<ConjunctiveQuery, SyntaxError> {
        if self.at_eof() || self.at_keyword("or") || *self.peek() == Tok::Dot {
            return Err(SyntaxError::EmptyQuery);
        }
        let mut concept_atoms = Vec::new();
        let mut role_atoms = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Upper(_) => {
                    let concept = self.concept_name()?;
                    self.expect(Tok::LParen)?;
                    let var = self.variable()?;
                    self.expect(Tok::RParen)?;
                    concept_atoms.push(ConceptAtom { concept, var });
                }
                Tok::Lower(_) => {
                    let role = self.lower_name("role name")?;
                    self.expect(Tok::LParen)?;
                    let from = self.variable()?;
                    self.expect(Tok::Comma)?;
                    let to = self.variable()?;
                    self.expect(Tok::RParen)?;
                    role_atoms.push(RoleAtom { role, from, to });
                }
                other => return Err(self.error(format!("expected atom, found {}", other.describe()))),
            }
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        ConjunctiveQuery::new(concept_atoms, role_atoms)
    }
}

impl SyntaxError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut axioms = Vec::new();
    while !p.at_eof() {
        axioms.push(p.statement()?);
    }
    KnowledgeBase::new(axioms)
}

/// Parses a sequence of axioms without the non-emptiness checks a full KB
/// needs. Used for spoiler fragments.
pub fn parse_axioms(text: &str) -> Result<Vec<Axiom>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut axioms = Vec::new();
    while !p.at_eof() {
        axioms.push(p.statement()?);
    }
    Ok(axioms)
}

pub fn parse_concept(text: &str) -> Result<Concept, SyntaxError> {
    let mut p = Parser::new(text)?;
    let c = p.concept()?;
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(c)
}

/// Parses a UCQ: `cq ("or" cq)*`, optionally ending with `.`.
pub fn parse_ucq(text: &str) -> Result<Ucq, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut disjuncts = vec![p.cq()?];
    while p.at_keyword("or") {
        p.next();
        disjuncts.push(p.cq()?);
    }
    if *p.peek() == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ucq::new(disjuncts)
}

/// Parses a single conjunctive query.
pub fn parse_cq(text: &str) -> Result<ConjunctiveQuery, SyntaxError> {
    let ucq = parse_ucq(text)?;
    match ucq.disjuncts() {
        [q] => Ok(q.clone()),
        _ => Err(SyntaxError::at(1, 1, "expected a single conjunctive query, found a union")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kb_with_assertions_and_gci() {
        let kb = parse_kb("A(a). r(a,b). A SubClassOf exists (r).B.").unwrap();
        assert_eq!(kb.abox().len(), 2);
        assert_eq!(kb.tbox().len(), 1);
        assert_eq!(
            kb.individuals().into_iter().collect::<Vec<_>>(),
            vec!["a".to_string(), "b".to_string()]
        );
    }

    #[test]
    fn negative_role_assertion_and_tbox_normalisation() {
        let kb = parse_kb("not r(a,b).").unwrap();
        assert_eq!(
            kb.abox().iter().collect::<Vec<_>>(),
            vec![&Axiom::NegRoleAssertion("r".into(), "a".into(), "b".into())]
        );
        assert_eq!(
            kb.tbox().iter().collect::<Vec<_>>(),
            vec![&Axiom::Gci(Concept::top(), Concept::top())]
        );
    }

    #[test]
    fn empty_kb_is_rejected() {
        assert_eq!(parse_kb(""), Err(SyntaxError::EmptyABox));
        assert_eq!(parse_kb("# only a comment\nA SubClassOf B."), Err(SyntaxError::EmptyABox));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_kb("A(a).\nA SubClassOf .") {
            Err(SyntaxError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 14)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_kb("A(a)"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_kb("A(a). $"), Err(SyntaxError::Syntax { .. })));
    }

    #[test]
    fn complex_concept_assertions() {
        let kb = parse_kb("not exists (r & s).B(a). not A(a).").unwrap();
        assert_eq!(kb.abox().len(), 2);
        for ax in kb.abox() {
            let printed = format!("{ax}.");
            assert_eq!(parse_axioms(&printed).unwrap(), vec![ax.clone()]);
        }
    }

    #[test]
    fn ucq_examples() {
        let u = parse_ucq("A(?x), r(?x,?y), B(?y)").unwrap();
        assert_eq!(u.disjuncts().len(), 1);
        assert_eq!(u.disjuncts()[0].size(), 3);
        assert_eq!(parse_ucq("A(?x) or B(?x)").unwrap().disjuncts().len(), 2);
        assert_eq!(parse_ucq("A(?x), A(?x)").unwrap().disjuncts()[0].size(), 1);
    }

    #[test]
    fn empty_queries_are_rejected() {
        assert_eq!(parse_ucq(""), Err(SyntaxError::EmptyQuery));
        assert_eq!(parse_ucq("A(?x) or"), Err(SyntaxError::EmptyQuery));
        assert!(matches!(parse_ucq("A(x)"), Err(SyntaxError::Syntax { .. })));
    }

    #[test]
    fn sugar_expands_to_core() {
        let c = parse_concept("forall (r).(A or Top)").unwrap();
        let expected = Concept::forall(
            RoleConjunction::single("r"),
            Concept::or(Concept::atomic("A"), Concept::top()),
        );
        assert_eq!(c, expected);
        assert!(parse_concept("Top").unwrap().is_top());
    }
}
