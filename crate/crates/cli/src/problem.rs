//! Problem files: declarations, rewrite rules, assumptions, a claim and
//! instantiation hints.
//!
//! ```text
//! file     := { stmt ";" }
//! stmt     := "obj" ident { "," ident }
//!           | "const" ident { "," ident } ":" ident "->" ident
//!           | "fun" ident ":" pair { "x" pair } "->" pair
//!           | "rule" term "->" term
//!           | "extend" ident
//!           | "assume" formula
//!           | "claim" formula
//!           | "hint" ident ":=" term { "," ident ":=" term }
//! pair     := "(" ident "," ident ")"
//! formula  := quant | imp
//! quant    := ("forall" | "exists") binder { "," binder } "." formula
//! binder   := ident ":" ident "->" ident
//! imp      := or [ "->" formula ]
//! or       := and [ "|" or ]
//! and      := not [ "&" and ]
//! not      := "!" not | "(" formula ")" | term ("=" | "!=") term
//! term     := unary { ("+" | "-") unary }
//! unary    := "-" unary | product
//! product  := atom { "*" atom }
//! atom     := ident [ "(" term { "," term } ")" ] | "0" [ "[" ident "," ident "]" ] | "(" term ")"
//! ```
//!
//! Comments run from `#` to the end of the line. In rules, identifiers
//! that are not declared constants are pattern variables. Hint terms may
//! mention the quantified variables of the claim and assumptions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use opstat_core::logic::{Formula, FunSym, LogicError, Signature, Sort, Term, Var};
use opstat_core::prover::{Pattern, RewriteRule};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {source}")]
    Logic {
        line: usize,
        col: usize,
        #[source]
        source: LogicError,
    },
    #[error("{line}:{col}: zero of unknown sort; write 0[u,v]")]
    AmbiguousZero { line: usize, col: usize },
    #[error("the problem has no claim")]
    MissingClaim,
    #[error("{line}:{col}: second claim")]
    DuplicateClaim { line: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub signature: Signature,
    pub rules: Vec<RewriteRule>,
    pub extend: Vec<String>,
    pub assumptions: Vec<Formula>,
    pub claim: Formula,
    pub hints: Vec<BTreeMap<String, Term>>,
}

impl ProblemFile {
    /// The statement to prove: the conjunction of the assumptions implies
    /// the claim.
    pub fn sentence(&self) -> Formula {
        match Formula::conjunction(self.assumptions.iter().cloned()) {
            Some(a) => Formula::implies(a, self.claim.clone()),
            None => self.claim.clone(),
        }
    }

    /// Canonical text that parses back to the same problem.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let sig = &self.signature;
        if !sig.objects.is_empty() {
            let objs: Vec<&str> = sig.objects.iter().map(String::as_str).collect();
            let _ = writeln!(out, "obj {};", objs.join(", "));
        }
        for (name, s) in &sig.constants {
            let _ = writeln!(out, "const {name} : {} -> {};", s.source, s.target);
        }
        for (name, sorts) in &sig.functions {
            for fs in sorts {
                let _ = writeln!(out, "fun {name} : {fs};");
            }
        }
        for r in &self.rules {
            let _ = writeln!(out, "rule {r};");
        }
        for e in &self.extend {
            let _ = writeln!(out, "extend {e};");
        }
        for a in &self.assumptions {
            let _ = writeln!(out, "assume {a:#};");
        }
        let _ = writeln!(out, "claim {:#};", self.claim);
        for h in &self.hints {
            let parts: Vec<String> = h.iter().map(|(k, t)| format!("{k} := {t:#}")).collect();
            let _ = writeln!(out, "hint {};", parts.join(", "));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 17] = [
    ":=", "->", "!=", "(", ")", "[", "]", ",", ";", ":", ".", "=", "!", "&", "|", "+", "-",
];

fn lex(text: &str) -> Result<Vec<Token>, ProblemError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: start.0,
                col: start.1,
            });
            continue;
        }
        if c == '0' {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Zero,
                line: start.0,
                col: start.1,
            });
            continue;
        }
        if c == '*' {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Sym("*"),
                line: start.0,
                col: start.1,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
            return Err(ProblemError::Syntax {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        };
        i += sym.len();
        col += sym.len();
        out.push(Token {
            tok: Tok::Sym(sym),
            line: start.0,
            col: start.1,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Terms before sort resolution.
#[derive(Clone, Debug)]
enum Expr {
    Ident(String, Pos),
    Zero(Option<Sort>, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    App(String, Vec<Expr>, Pos),
}

type Pos = (usize, usize);

impl Expr {
    fn pos(&self) -> Pos {
        match self {
            Expr::Ident(_, p) | Expr::Zero(_, p) | Expr::App(_, _, p) => *p,
            Expr::Neg(e) | Expr::Add(e, _) | Expr::Mul(e, _) => e.pos(),
        }
    }
}

#[derive(Clone, Debug)]
enum FExpr {
    Eq(Expr, Expr),
    Neq(Expr, Expr),
    Not(Box<FExpr>),
    And(Box<FExpr>, Box<FExpr>),
    Or(Box<FExpr>, Box<FExpr>),
    Implies(Box<FExpr>, Box<FExpr>),
    Quant(bool, Vec<(String, Sort, Pos)>, Box<FExpr>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ProblemError> {
        let (line, col) = self.here();
        Err(ProblemError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ProblemError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ProblemError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn morphism_sort(&mut self) -> Result<Sort, ProblemError> {
        let u = self.ident()?;
        self.expect("->")?;
        let v = self.ident()?;
        Ok(Sort::new(u, v))
    }

    fn pair(&mut self) -> Result<Sort, ProblemError> {
        self.expect("(")?;
        let u = self.ident()?;
        self.expect(",")?;
        let v = self.ident()?;
        self.expect(")")?;
        Ok(Sort::new(u, v))
    }

    fn term(&mut self) -> Result<Expr, ProblemError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("+") {
                acc = Expr::Add(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat("-") {
                acc = Expr::Add(Box::new(acc), Box::new(Expr::Neg(Box::new(self.unary()?))));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ProblemError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let mut acc = self.atom()?;
        while self.eat("*") {
            acc = Expr::Mul(Box::new(acc), Box::new(self.atom()?));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr, ProblemError> {
        let p = self.here();
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                if self.eat("[") {
                    let u = self.ident()?;
                    self.expect(",")?;
                    let v = self.ident()?;
                    self.expect("]")?;
                    return Ok(Expr::Zero(Some(Sort::new(u, v)), p));
                }
                Ok(Expr::Zero(None, p))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("(") {
                    let mut args = vec![self.term()?];
                    while self.eat(",") {
                        args.push(self.term()?);
                    }
                    self.expect(")")?;
                    return Ok(Expr::App(name, args, p));
                }
                Ok(Expr::Ident(name, p))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.term()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.err("expected a term"),
        }
    }

    fn formula(&mut self) -> Result<FExpr, ProblemError> {
        let forall = self.is_keyword("forall");
        if forall || self.is_keyword("exists") {
            self.bump();
            let mut binders = Vec::new();
            loop {
                let p = self.here();
                let name = self.ident()?;
                self.expect(":")?;
                binders.push((name, self.morphism_sort()?, p));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(".")?;
            return Ok(FExpr::Quant(forall, binders, Box::new(self.formula()?)));
        }
        let lhs = self.or()?;
        if self.eat("->") {
            return Ok(FExpr::Implies(Box::new(lhs), Box::new(self.formula()?)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<FExpr, ProblemError> {
        let lhs = self.and()?;
        if self.eat("|") {
            return Ok(FExpr::Or(Box::new(lhs), Box::new(self.or()?)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<FExpr, ProblemError> {
        let lhs = self.not()?;
        if self.eat("&") {
            return Ok(FExpr::And(Box::new(lhs), Box::new(self.and()?)));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<FExpr, ProblemError> {
        if self.eat("!") {
            return Ok(FExpr::Not(Box::new(self.not()?)));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.formula();
        }
        if self.is_sym("(") {
            // a parenthesised formula or the start of a term
            let save = self.pos;
            self.bump();
            if let Ok(f) = self.formula() {
                if self.eat(")") && !self.starts_term_continuation() {
                    return Ok(f);
                }
            }
            self.pos = save;
        }
        let s = self.term()?;
        if self.eat("=") {
            Ok(FExpr::Eq(s, self.term()?))
        } else if self.eat("!=") {
            Ok(FExpr::Neq(s, self.term()?))
        } else {
            self.err("expected `=` or `!=`")
        }
    }

    fn starts_term_continuation(&self) -> bool {
        ["*", "+", "-", "=", "!="].iter().any(|s| self.is_sym(s))
    }
}

/// Sort resolution context.
struct Elab<'a> {
    sig: &'a Signature,
    vars: Vec<(String, Sort)>,
    /// Unbound identifiers become pattern variables instead of errors.
    patterns: bool,
}

enum ElabErr {
    Zero(Pos),
    Other(ProblemError),
}

impl From<ElabErr> for ProblemError {
    fn from(e: ElabErr) -> Self {
        match e {
            ElabErr::Zero((line, col)) => ProblemError::AmbiguousZero { line, col },
            ElabErr::Other(e) => e,
        }
    }
}

fn logic_err(p: Pos, e: LogicError) -> ElabErr {
    ElabErr::Other(ProblemError::Logic {
        line: p.0,
        col: p.1,
        source: e,
    })
}

impl Elab<'_> {
    fn term(&self, e: &Expr, expected: Option<&Sort>) -> Result<Term, ElabErr> {
        match e {
            Expr::Ident(n, p) => {
                if let Some((_, s)) = self.vars.iter().rev().find(|(v, _)| v == n) {
                    return Ok(Term::var(n.clone(), s.clone()));
                }
                self.sig
                    .constant(n)
                    .map(|c| c.term())
                    .ok_or_else(|| logic_err(*p, LogicError::UnknownSymbol(n.clone())))
            }
            Expr::Zero(Some(s), p) => {
                for o in [&s.source, &s.target] {
                    if !self.sig.objects.contains(o) {
                        return Err(logic_err(*p, LogicError::UnknownSymbol(o.clone())));
                    }
                }
                Ok(Term::zero(s.clone()))
            }
            Expr::Zero(None, p) => expected.map(|s| Term::zero(s.clone())).ok_or(ElabErr::Zero(*p)),
            Expr::Neg(a) => Ok(Term::neg(self.term(a, expected)?)),
            Expr::Add(a, b) => {
                let (s, t) = self.pair_same(a, b, expected)?;
                Ok(Term::add(s, t))
            }
            Expr::Mul(a, b) => match self.term(a, None) {
                Ok(s) => {
                    let right = expected.map(|x| Sort::new(x.source.clone(), s.sort().source));
                    Ok(Term::mul(s, self.term(b, right.as_ref())?))
                }
                Err(ElabErr::Zero(_)) => {
                    let t = self.term(b, None)?;
                    let left = expected.map(|x| Sort::new(t.sort().target, x.target.clone()));
                    Ok(Term::mul(self.term(a, left.as_ref())?, t))
                }
                Err(e) => Err(e),
            },
            Expr::App(n, args, p) => {
                let candidates: Vec<FunSym> = self
                    .sig
                    .overloads(n)
                    .into_iter()
                    .filter(|f| f.arity() == args.len())
                    .collect();
                if candidates.is_empty() {
                    return Err(logic_err(*p, LogicError::UnknownSymbol(n.clone())));
                }
                let built: Vec<Term> = if let [only] = candidates.as_slice() {
                    args.iter()
                        .zip(&only.sort.args)
                        .map(|(a, s)| self.term(a, Some(s)))
                        .collect::<Result<_, _>>()?
                } else {
                    args.iter().map(|a| self.term(a, None)).collect::<Result<_, _>>()?
                };
                let sorts: Vec<Sort> = built.iter().map(Term::sort).collect();
                let mut fits: Vec<&FunSym> = candidates.iter().filter(|f| f.sort.args == sorts).collect();
                if fits.len() > 1 {
                    if let Some(x) = expected {
                        fits.retain(|f| &f.sort.result == x);
                    }
                }
                match fits.as_slice() {
                    [f] => Ok(Term::app((*f).clone(), built)),
                    _ => Err(logic_err(
                        *p,
                        LogicError::SortMismatch {
                            term: format!("{n}(…)"),
                            expected: "one matching declaration".into(),
                            actual: format!("{} matching declarations for argument sorts", fits.len()),
                        },
                    )),
                }
            }
        }
    }

    /// Elaborates two terms that must share a sort.
    fn pair_same(&self, a: &Expr, b: &Expr, expected: Option<&Sort>) -> Result<(Term, Term), ElabErr> {
        match self.term(a, expected) {
            Ok(s) => {
                let sort = s.sort();
                Ok((s, self.term(b, Some(&sort))?))
            }
            Err(ElabErr::Zero(_)) => {
                let t = self.term(b, expected)?;
                let sort = t.sort();
                Ok((self.term(a, Some(&sort))?, t))
            }
            Err(e) => Err(e),
        }
    }

    fn formula(&mut self, f: &FExpr) -> Result<Formula, ElabErr> {
        Ok(match f {
            FExpr::Eq(a, b) | FExpr::Neq(a, b) => {
                let (s, t) = self.pair_same(a, b, None)?;
                let p = a.pos();
                self.sig.check_term(&s).map_err(|e| logic_err(p, e))?;
                let st = self.sig.check_term(&t).map_err(|e| logic_err(b.pos(), e))?;
                if s.sort() != st {
                    return Err(logic_err(
                        p,
                        LogicError::SortMismatch {
                            term: format!("{s} = {t}"),
                            expected: s.sort().to_string(),
                            actual: st.to_string(),
                        },
                    ));
                }
                if matches!(f, FExpr::Eq(..)) {
                    Formula::eq(s, t)
                } else {
                    Formula::neq(s, t)
                }
            }
            FExpr::Not(g) => Formula::not(self.formula(g)?),
            FExpr::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            FExpr::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            FExpr::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            FExpr::Quant(forall, binders, body) => {
                for (n, s, p) in binders {
                    for o in [&s.source, &s.target] {
                        if !self.sig.objects.contains(o) {
                            return Err(logic_err(*p, LogicError::UnknownSymbol(o.clone())));
                        }
                    }
                    if self.sig.is_declared(n) {
                        return Err(logic_err(*p, LogicError::DuplicateSymbol(n.clone())));
                    }
                    self.vars.push((n.clone(), s.clone()));
                }
                let inner = self.formula(body);
                self.vars.truncate(self.vars.len() - binders.len());
                let mut g = inner?;
                for (n, s, _) in binders.iter().rev() {
                    let v = Var::new(n.clone(), s.clone());
                    g = if *forall {
                        Formula::forall(v, g)
                    } else {
                        Formula::exists(v, g)
                    };
                }
                g
            }
        })
    }

    fn pattern(&self, e: &Expr) -> Result<Pattern, ProblemError> {
        Ok(match e {
            Expr::Ident(n, p) => {
                if self.sig.constant(n).is_some() {
                    Pattern::Const(n.clone())
                } else if self.patterns {
                    Pattern::Var(n.clone())
                } else {
                    return Err(ProblemError::Logic {
                        line: p.0,
                        col: p.1,
                        source: LogicError::UnknownSymbol(n.clone()),
                    });
                }
            }
            Expr::Zero(..) => Pattern::Zero,
            Expr::Neg(a) => Pattern::Neg(Box::new(self.pattern(a)?)),
            Expr::Add(a, b) => Pattern::Add(Box::new(self.pattern(a)?), Box::new(self.pattern(b)?)),
            Expr::Mul(a, b) => Pattern::Mul(Box::new(self.pattern(a)?), Box::new(self.pattern(b)?)),
            Expr::App(n, args, p) => {
                if self.sig.overloads(n).is_empty() {
                    return Err(ProblemError::Logic {
                        line: p.0,
                        col: p.1,
                        source: LogicError::UnknownSymbol(n.clone()),
                    });
                }
                Pattern::App(
                    n.clone(),
                    args.iter().map(|a| self.pattern(a)).collect::<Result<_, _>>()?,
                )
            }
        })
    }
}

fn collect_binders(f: &Formula, out: &mut Vec<(String, Sort)>) {
    match f {
        Formula::Eq(..) => {}
        Formula::Not(g) => collect_binders(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_binders(a, out);
            collect_binders(b, out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            if !out.iter().any(|(n, _)| n == &v.name) {
                out.push((v.name.clone(), v.sort.clone()));
            }
            collect_binders(g, out);
        }
    }
}

/// Parses and sort-checks a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut sig = Signature::new();
    let mut rules = Vec::new();
    let mut extend = Vec::new();
    let mut assumptions = Vec::new();
    let mut claim = None;
    let mut raw_hints: Vec<(Vec<(String, Expr)>, Pos)> = Vec::new();
    while *p.peek() != Tok::Eof {
        let at = p.here();
        let lerr = |e: LogicError| ProblemError::Logic {
            line: at.0,
            col: at.1,
            source: e,
        };
        let kw = p.ident()?;
        match kw.as_str() {
            "obj" => loop {
                sig.add_object(&p.ident()?).map_err(lerr)?;
                if !p.eat(",") {
                    break;
                }
            },
            "const" => {
                let mut names = vec![p.ident()?];
                while p.eat(",") {
                    names.push(p.ident()?);
                }
                p.expect(":")?;
                let s = p.morphism_sort()?;
                for n in names {
                    sig.add_constant(&n, s.clone()).map_err(lerr)?;
                }
            }
            "fun" => {
                let name = p.ident()?;
                p.expect(":")?;
                let mut args = vec![p.pair()?];
                while matches!(p.peek(), Tok::Ident(s) if s == "x") {
                    p.bump();
                    args.push(p.pair()?);
                }
                p.expect("->")?;
                let result = p.pair()?;
                sig.add_function(&name, args, result).map_err(lerr)?;
            }
            "rule" => {
                let l = p.term()?;
                p.expect("->")?;
                let r = p.term()?;
                let el = Elab {
                    sig: &sig,
                    vars: Vec::new(),
                    patterns: true,
                };
                rules.push(RewriteRule::new(el.pattern(&l)?, el.pattern(&r)?).map_err(lerr)?);
            }
            "extend" => {
                let name = p.ident()?;
                let ov = sig.overloads(&name);
                if ov.is_empty() {
                    return Err(lerr(LogicError::UnknownSymbol(name)));
                }
                if ov.iter().any(|f| f.arity() != 1) {
                    return Err(lerr(LogicError::SortMismatch {
                        term: name,
                        expected: "a unary symbol".into(),
                        actual: "another arity".into(),
                    }));
                }
                extend.push(name);
            }
            "assume" | "claim" => {
                let fe = p.formula()?;
                let mut el = Elab {
                    sig: &sig,
                    vars: Vec::new(),
                    patterns: false,
                };
                let f = el.formula(&fe)?;
                if kw == "assume" {
                    assumptions.push(f);
                } else if claim.is_some() {
                    return Err(ProblemError::DuplicateClaim { line: at.0, col: at.1 });
                } else {
                    claim = Some(f);
                }
            }
            "hint" => {
                let mut binds = Vec::new();
                loop {
                    let n = p.ident()?;
                    p.expect(":=")?;
                    binds.push((n, p.term()?));
                    if !p.eat(",") {
                        break;
                    }
                }
                raw_hints.push((binds, at));
            }
            other => {
                return Err(ProblemError::Syntax {
                    line: at.0,
                    col: at.1,
                    msg: format!("unknown statement `{other}`"),
                })
            }
        }
        p.expect(";")?;
    }
    let claim = claim.ok_or(ProblemError::MissingClaim)?;

    let mut binders = Vec::new();
    for f in assumptions.iter().chain(std::iter::once(&claim)) {
        collect_binders(f, &mut binders);
    }
    let el = Elab {
        sig: &sig,
        vars: binders.clone(),
        patterns: false,
    };
    let mut hints = Vec::new();
    for (binds, at) in raw_hints {
        let mut h = BTreeMap::new();
        for (n, e) in binds {
            let Some((_, s)) = binders.iter().find(|(b, _)| *b == n) else {
                return Err(ProblemError::Logic {
                    line: at.0,
                    col: at.1,
                    source: LogicError::UnknownSymbol(n),
                });
            };
            let t = el.term(&e, Some(s))?;
            let ts = sig.check_term(&t).map_err(|err| ProblemError::Logic {
                line: at.0,
                col: at.1,
                source: err,
            })?;
            if ts != *s {
                return Err(ProblemError::Logic {
                    line: at.0,
                    col: at.1,
                    source: LogicError::SortMismatch {
                        term: format!("{n} := {t}"),
                        expected: s.to_string(),
                        actual: ts.to_string(),
                    },
                });
            }
            h.insert(n, t);
        }
        hints.push(h);
    }
    Ok(ProblemFile {
        signature: sig,
        rules,
        extend,
        assumptions,
        claim,
        hints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_problem() {
        let p = parse_problem("obj u;\nconst c : u -> u;\nclaim c = c;").unwrap();
        assert_eq!(p.claim.to_string(), "c = c");
        assert_eq!(parse_problem(&p.render()).unwrap(), p);
    }

    #[test]
    fn undeclared_object_is_reported() {
        let e = parse_problem("obj u;\nconst x : u -> w;\nclaim x = x;").unwrap_err();
        assert!(matches!(
            e,
            ProblemError::Logic {
                line: 2,
                source: LogicError::UnknownSymbol(_),
                ..
            }
        ));
    }

    #[test]
    fn zero_sort_is_inferred_or_required() {
        let p = parse_problem("obj u, v;\nconst a : u -> v;\nclaim a + 0 = a;").unwrap();
        assert_eq!(format!("{:#}", p.claim), "a + 0[u,v] = a");
        let e = parse_problem("obj u;\nclaim 0 = 0;").unwrap_err();
        assert!(matches!(e, ProblemError::AmbiguousZero { .. }));
        assert!(parse_problem("obj u;\nclaim 0[u,u] = 0;").is_ok());
    }

    #[test]
    fn precedence_of_connectives() {
        let src = "obj u;\nconst a, b : u -> u;\nclaim a = b & b = a | !a = a -> a*b + -a = b;";
        let p = parse_problem(src).unwrap();
        let Formula::Implies(lhs, _) = &p.claim else { panic!() };
        assert!(matches!(lhs.as_ref(), Formula::Or(..)));
        assert_eq!(parse_problem(&p.render()).unwrap(), p);
    }

    #[test]
    fn overloads_resolve_by_argument_sort() {
        let src = "obj u, v;\nconst x : u -> v;\nfun f : (u,v) -> (v,u);\nfun f : (v,u) -> (u,v);\nclaim f(f(x)) = x;";
        let p = parse_problem(src).unwrap();
        let Formula::Eq(Term::App(outer, args), _) = &p.claim else {
            panic!()
        };
        assert_eq!(outer.sort.args[0], Sort::new("v", "u"));
        assert!(matches!(&args[0], Term::App(inner, _) if inner.sort.args[0] == Sort::new("u", "v")));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_problem("obj u;\nclaim = ;").unwrap_err();
        assert!(matches!(e, ProblemError::Syntax { line: 2, .. }));
        assert_eq!(parse_problem("obj u;"), Err(ProblemError::MissingClaim));
    }
}
