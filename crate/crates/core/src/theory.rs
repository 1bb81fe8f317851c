//! Basic universal theories: sentences `∀x̄ (φ → ψ)` with φ, ψ positive
//! quantifier-free (atoms, equalities, `and`, `or`, `true`, `false`).
//!
//! Provides model checking by exhaustive assignment and the image
//! factorization `X ↠ U ↣ Y` of a homomorphism between models.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{elements_of, mask_of, tuples, Morphism, Signature, Structure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(usize, Vec<Term>),
    Eq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub variables: Vec<String>,
    pub antecedent: Formula,
    pub consequent: Formula,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub signature: Arc<Signature>,
    pub sentences: Vec<Sentence>,
}

/// Failing sentence and the assignment that falsifies it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub sentence: usize,
    pub text: String,
    pub assignment: Vec<(String, usize)>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` fails at", self.text)?;
        for (v, e) in &self.assignment {
            write!(f, " {v}={e}")?;
        }
        Ok(())
    }
}

impl Term {
    fn eval(&self, m: &Structure, env: &[usize]) -> usize {
        match self {
            Term::Var(i) => env[*i],
            Term::App(f, args) => {
                let vals: Vec<usize> = args.iter().map(|a| a.eval(m, env)).collect();
                m.apply(*f, &vals)
            }
        }
    }
}

impl Formula {
    fn eval(&self, m: &Structure, env: &[usize]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(r, args) => {
                let vals: Vec<usize> = args.iter().map(|a| a.eval(m, env)).collect();
                m.holds(*r, &vals)
            }
            Formula::Eq(a, b) => a.eval(m, env) == b.eval(m, env),
            Formula::And(fs) => fs.iter().all(|f| f.eval(m, env)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(m, env)),
        }
    }
}

impl Sentence {
    /// Whether the matrix holds under one assignment of the variables;
    /// `false` for an assignment of the wrong length or outside the carrier.
    pub fn holds_at(&self, m: &Structure, env: &[usize]) -> bool {
        if env.len() != self.variables.len() || env.iter().any(|&e| e >= m.size()) {
            return false;
        }
        !self.antecedent.eval(m, env) || self.consequent.eval(m, env)
    }

    /// First assignment (lexicographic) falsifying the sentence in `m`.
    pub fn counterexample(&self, m: &Structure) -> Option<Vec<usize>> {
        let carrier: Vec<usize> = (0..m.size()).collect();
        let found = tuples(&carrier, self.variables.len())
            .find(|env| self.antecedent.eval(m, env) && !self.consequent.eval(m, env));
        found
    }
}

impl Theory {
    pub fn empty(signature: Arc<Signature>) -> Self {
        Theory {
            name: "empty".into(),
            signature,
            sentences: Vec::new(),
        }
    }

    /// Parse sentences separated by `;` or newlines.
    pub fn parse(name: &str, signature: Arc<Signature>, text: &str) -> Result<Self> {
        let mut sentences = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let mut col = 0;
            for piece in line.split(';') {
                if !piece.trim().is_empty() {
                    sentences.push(parse_sentence_at(&signature, piece, line_no + 1, col + 1)?);
                }
                col += piece.chars().count() + 1;
            }
        }
        Ok(Theory {
            name: name.to_string(),
            signature,
            sentences,
        })
    }

    /// Group axioms over [`Signature::group`].
    pub fn groups() -> Self {
        Theory::parse(
            "groups",
            Arc::new(Signature::group()),
            "forall x y z. true -> m(m(x,y),z) = m(x,m(y,z))
             forall x. true -> m(e,x) = x and m(x,e) = x
             forall x. true -> m(x,inv(x)) = e and m(inv(x),x) = e",
        )
        .expect("static theory")
    }

    /// Abelian group axioms; universal Horn, hence basic universal.
    pub fn abelian_groups() -> Self {
        let mut t = Theory::groups();
        t.name = "abelian-groups".into();
        t.sentences.extend(
            Theory::parse(
                "",
                t.signature.clone(),
                "forall x y. true -> m(x,y) = m(y,x)",
            )
            .expect("static theory")
            .sentences,
        );
        t
    }

    /// `Ok(None)` when `m ⊨ T`, otherwise the first failing sentence and assignment.
    pub fn satisfies(&self, m: &Structure) -> Result<Option<Counterexample>> {
        if **m.signature() != *self.signature {
            return Err(Error::SignatureMismatch(format!(
                "structure signature differs from theory `{}`",
                self.name
            )));
        }
        for (i, s) in self.sentences.iter().enumerate() {
            if let Some(env) = s.counterexample(m) {
                return Ok(Some(Counterexample {
                    sentence: i,
                    text: s.source.clone(),
                    assignment: s.variables.iter().cloned().zip(env).collect(),
                }));
            }
        }
        Ok(None)
    }

    pub fn is_model(&self, m: &Structure) -> Result<bool> {
        Ok(self.satisfies(m)?.is_none())
    }
}

/// `f = inclusion ∘ surjection` with the image carrying the structure
/// induced from the target.
#[derive(Clone, Debug)]
pub struct ImageFactorization {
    /// Image elements in the target's names, ascending; `image` relabels them `0..k`.
    pub carrier: Vec<usize>,
    pub image: Arc<Structure>,
    pub surjection: Morphism,
    pub inclusion: Morphism,
}

/// Image factorization of a homomorphism between models of `theory`.
pub fn image_factorization(f: &Morphism, theory: &Theory) -> Result<ImageFactorization> {
    if !f.classify().is_hom() {
        return Err(Error::precondition("image factorization needs a homomorphism"));
    }
    for (side, s) in [("source", f.source()), ("target", f.target())] {
        if let Some(c) = theory.satisfies(s)? {
            return Err(Error::precondition(format!("{side} is not a model: {c}")));
        }
    }
    let factorization = image_factorization_unchecked(f)?;
    if let Some(c) = theory.satisfies(&factorization.image)? {
        return Err(Error::TheoremViolation(format!(
            "image of a homomorphism is not a model: {c}"
        )));
    }
    Ok(factorization)
}

/// Image factorization without model checks; `f` must be a homomorphism.
pub(crate) fn image_factorization_unchecked(f: &Morphism) -> Result<ImageFactorization> {
    let target = f.target();
    let mask = mask_of(f.map().iter().copied());
    let (image, carrier) = target.induced(mask)?;
    let image = Arc::new(image);
    let mut position = vec![usize::MAX; target.size()];
    for (i, &e) in carrier.iter().enumerate() {
        position[e] = i;
    }
    let surjection = Morphism::new(
        f.source().clone(),
        image.clone(),
        f.map().iter().map(|&y| position[y]).collect(),
    )?;
    let inclusion = Morphism::new(image.clone(), target.clone(), carrier.clone())?;
    debug_assert_eq!(elements_of(mask), carrier);
    Ok(ImageFactorization {
        carrier,
        image,
        surjection,
        inclusion,
    })
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Arrow,
    And,
    Or,
}

struct Lexed {
    tok: Tok,
    col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| Error::Syntax {
        line,
        column: col0 + col,
        message: msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '=' => Tok::Equals,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '→' | '⇒' => Tok::Arrow,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '⊤' => Tok::Ident("true".into()),
            '⊥' => Tok::Ident("false".into()),
            '∀' => Tok::Ident("forall".into()),
            '!' | '~' | '¬' => return Err(err(i, "negation is not allowed in a basic universal sentence".into())),
            '∃' => return Err(err(i, "quantifiers are not allowed inside the matrix".into())),
            c if c.is_alphanumeric() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_' || chars[i + 1] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..=i].iter().collect();
                match word.as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(err(i, format!("unexpected character `{other}`"))),
        };
        out.push(Lexed { tok, col: start });
        i += 1;
    }
    Ok(out)
}

struct SentenceParser<'a> {
    sig: &'a Signature,
    toks: Vec<Lexed>,
    pos: usize,
    vars: Vec<String>,
    line: usize,
    col0: usize,
    end_col: usize,
}

impl SentenceParser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.col);
        Error::Syntax {
            line: self.line,
            column: self.col0 + col,
            message: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn sentence(&mut self) -> Result<(Formula, Formula)> {
        if self.peek() == Some(&Tok::Ident("forall".into())) {
            self.pos += 1;
            while let Some(Tok::Ident(name)) = self.peek() {
                if is_reserved(name) {
                    return Err(self.err(format!("`{name}` cannot be a variable")));
                }
                if self.vars.contains(name) {
                    return Err(self.err(format!("variable `{name}` bound twice")));
                }
                self.vars.push(name.clone());
                self.pos += 1;
            }
            self.expect(Tok::Dot, "`.` after the quantified variables")?;
        }
        let antecedent = self.formula()?;
        self.expect(Tok::Arrow, "`->` between antecedent and consequent")?;
        let consequent = self.formula()?;
        if self.pos != self.toks.len() {
            if self.peek() == Some(&Tok::Arrow) {
                return Err(self.err("nested implication is not a positive formula"));
            }
            return Err(self.err("trailing input after sentence"));
        }
        Ok((antecedent, consequent))
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.primary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() == Some(&Tok::Arrow) {
                    return Err(self.err("nested implication is not a positive formula"));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Formula::True)
                }
                "false" => {
                    self.pos += 1;
                    Ok(Formula::False)
                }
                "not" => Err(self.err("negation is not allowed in a basic universal sentence")),
                "forall" | "exists" => Err(self.err("quantifiers are not allowed inside the matrix")),
                _ => {
                    if let Some(r) = self.sig.relation_index(&name) {
                        if self.peek_at(1) == Some(&Tok::LParen) {
                            self.pos += 1;
                            let args = self.arguments()?;
                            let arity = self.sig.relations()[r].arity;
                            if args.len() != arity {
                                return Err(self.err(format!(
                                    "relation `{name}` takes {arity} arguments, got {}",
                                    args.len()
                                )));
                            }
                            return Ok(Formula::Atom(r, args));
                        }
                    }
                    let lhs = self.term()?;
                    self.expect(Tok::Equals, "`=` or a relation atom")?;
                    let rhs = self.term()?;
                    Ok(Formula::Eq(lhs, rhs))
                }
            },
            _ => Err(self.err("expected a formula")),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let Some(Tok::Ident(name)) = self.peek().cloned() else {
            return Err(self.err("expected a term"));
        };
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            self.pos += 1;
            return Ok(Term::Var(i));
        }
        let Some(f) = self.sig.function_index(&name) else {
            if self.sig.relation_index(&name).is_some() {
                return Err(self.err(format!("relation `{name}` used as a term")));
            }
            return Err(self.err(format!("unbound variable or unknown symbol `{name}`")));
        };
        self.pos += 1;
        let arity = self.sig.functions()[f].arity;
        let args = if self.peek() == Some(&Tok::LParen) {
            self.arguments()?
        } else {
            Vec::new()
        };
        if args.len() != arity {
            return Err(self.err(format!(
                "function `{name}` takes {arity} arguments, got {}",
                args.len()
            )));
        }
        Ok(Term::App(f, args))
    }
}

fn is_reserved(word: &str) -> bool {
    matches!(word, "forall" | "exists" | "true" | "false" | "not")
}

/// Parse one sentence; `line`/`column` locate `text` for error messages.
pub fn parse_sentence_at(sig: &Signature, text: &str, line: usize, column: usize) -> Result<Sentence> {
    let toks = lex(text, line, column)?;
    let mut p = SentenceParser {
        sig,
        toks,
        pos: 0,
        vars: Vec::new(),
        line,
        col0: column,
        end_col: text.chars().count(),
    };
    let (antecedent, consequent) = p.sentence()?;
    Ok(Sentence {
        variables: p.vars,
        antecedent,
        consequent,
        source: text.trim().to_string(),
    })
}

pub fn parse_sentence(sig: &Signature, text: &str) -> Result<Sentence> {
    parse_sentence_at(sig, text, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph_sig() -> Arc<Signature> {
        Arc::new(Signature::from_symbols(&[("E", 2)], &[]).unwrap())
    }

    #[test]
    fn parses_the_three_shapes() {
        let sig = digraph_sig();
        let sym = parse_sentence(&sig, "forall x y. E(x,y) -> E(y,x)").unwrap();
        assert_eq!(sym.variables, vec!["x", "y"]);
        assert_eq!(sym.antecedent, Formula::Atom(0, vec![Term::Var(0), Term::Var(1)]));
        let taut = parse_sentence(&sig, "forall x. true -> (x=x)").unwrap();
        assert_eq!(taut.consequent, Formula::Eq(Term::Var(0), Term::Var(0)));
        let irr = parse_sentence(&sig, "forall x. (E(x,x)) -> false").unwrap();
        assert_eq!(irr.consequent, Formula::False);
    }

    #[test]
    fn rejects_non_basic_sentences() {
        let sig = digraph_sig();
        for bad in [
            "forall x. not E(x,x) -> false",
            "forall x. E(x,x) -> exists y. E(x,y)",
            "forall x. E(x,y) -> true",
            "forall x. (E(x,x) -> E(x,x)) -> true",
            "forall x. E(x) -> true",
        ] {
            assert!(parse_sentence(&sig, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn syntax_error_reports_column() {
        let sig = digraph_sig();
        let err = parse_sentence(&sig, "forall x. E(x,x) -> E(x,q)").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, 25);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetry_checks() {
        let sig = digraph_sig();
        let t = Theory::parse("sym", sig, "forall x y. E(x,y) -> E(y,x)").unwrap();
        let both = Structure::digraph(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(t.satisfies(&both).unwrap(), None);
        let one = Structure::digraph(2, &[(0, 1)]).unwrap();
        let c = t.satisfies(&one).unwrap().unwrap();
        assert_eq!(c.assignment, vec![("x".to_string(), 0), ("y".to_string(), 1)]);
    }

    #[test]
    fn empty_theory_holds_everywhere() {
        let t = Theory::empty(digraph_sig());
        assert!(t.is_model(&Structure::digraph(3, &[(0, 2)]).unwrap()).unwrap());
    }

    #[test]
    fn group_theories() {
        let z4 = Structure::group(4, |a, b| (a + b) % 4).unwrap();
        assert!(Theory::abelian_groups().is_model(&z4).unwrap());
        let s3 = crate::groups::symmetric3();
        assert!(Theory::groups().is_model(&s3).unwrap());
        assert!(!Theory::abelian_groups().is_model(&s3).unwrap());
    }

    #[test]
    fn factorization_of_identity() {
        let x = Arc::new(Structure::digraph(3, &[(0, 1)]).unwrap());
        let f = Morphism::identity(x.clone());
        let fac = image_factorization(&f, &Theory::empty(x.signature().clone())).unwrap();
        assert_eq!(*fac.image, *x);
        assert_eq!(fac.surjection.map(), &[0, 1, 2]);
        assert_eq!(fac.inclusion.map(), &[0, 1, 2]);
    }

    #[test]
    fn factorization_of_mod_two() {
        let z4 = Arc::new(Structure::group(4, |a, b| (a + b) % 4).unwrap());
        let z2 = Arc::new(Structure::group(2, |a, b| (a + b) % 2).unwrap());
        let f = Morphism::new(z4, z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let fac = image_factorization(&f, &Theory::abelian_groups()).unwrap();
        assert_eq!(*fac.image, *z2);
        assert!(fac.surjection.is_surjective());
        assert_eq!(fac.inclusion.classify(), crate::structure::MorphismClass::Iso);
        assert_eq!(fac.surjection.then(&fac.inclusion).unwrap(), f);
    }

    #[test]
    fn factorization_onto_loop() {
        let path = Arc::new(Structure::digraph(2, &[(0, 1)]).unwrap());
        let lp = Arc::new(Structure::digraph(1, &[(0, 0)]).unwrap());
        let f = Morphism::new(path, lp.clone(), vec![0, 0]).unwrap();
        let fac = image_factorization(&f, &Theory::empty(lp.signature().clone())).unwrap();
        assert_eq!(*fac.image, *lp);
    }

    #[test]
    fn factorization_rejects_non_hom() {
        let e = Arc::new(Structure::digraph(2, &[(0, 1)]).unwrap());
        let d = Arc::new(Structure::digraph(2, &[]).unwrap());
        let f = Morphism::new(e, d.clone(), vec![0, 1]).unwrap();
        assert!(image_factorization(&f, &Theory::empty(d.signature().clone())).is_err());
    }
}
