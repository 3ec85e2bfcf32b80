use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::term::{Constant, FunSym, FunctionSort, Sort, Term, Var};
use super::LogicError;

/// Prefix reserved for generated symbols.
pub const FRESH_PREFIX: char = '_';

/// Symbol table of the many-sorted language.
///
/// Zero constants and the arithmetic symbols exist implicitly for every sort
/// over the declared objects; they are represented by dedicated [`Term`]
/// variants and never stored here. User function symbols may be overloaded
/// on their sort; each overload is a distinct symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub objects: BTreeSet<String>,
    pub constants: BTreeMap<String, Sort>,
    pub functions: BTreeMap<String, Vec<FunctionSort>>,
    pub variables: BTreeMap<String, Sort>,
    fresh_counter: u64,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.objects.contains(name)
            || self.constants.contains_key(name)
            || self.functions.contains_key(name)
            || self.variables.contains_key(name)
    }

    fn check_user_name(name: &str) -> Result<(), LogicError> {
        if name.starts_with(FRESH_PREFIX) {
            return Err(LogicError::ReservedName(name.to_string()));
        }
        Ok(())
    }

    fn check_sort(&self, sort: &Sort) -> Result<(), LogicError> {
        for o in [&sort.source, &sort.target] {
            if !self.objects.contains(o) {
                return Err(LogicError::UnknownSymbol(o.clone()));
            }
        }
        Ok(())
    }

    pub fn add_object(&mut self, name: &str) -> Result<(), LogicError> {
        Self::check_user_name(name)?;
        if self.is_declared(name) {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        self.objects.insert(name.to_string());
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, sort: Sort) -> Result<Constant, LogicError> {
        Self::check_user_name(name)?;
        self.insert_constant(name, sort)
    }

    fn insert_constant(&mut self, name: &str, sort: Sort) -> Result<Constant, LogicError> {
        self.check_sort(&sort)?;
        if self.is_declared(name) {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        self.constants.insert(name.to_string(), sort.clone());
        Ok(Constant::new(name, sort))
    }

    /// Declares a function symbol, or a further overload of an existing one.
    pub fn add_function(&mut self, name: &str, args: Vec<Sort>, result: Sort) -> Result<FunSym, LogicError> {
        Self::check_user_name(name)?;
        self.insert_function(name, args, result)
    }

    fn insert_function(&mut self, name: &str, args: Vec<Sort>, result: Sort) -> Result<FunSym, LogicError> {
        assert!(!args.is_empty(), "function symbols take at least one argument");
        for s in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(s)?;
        }
        let fs = FunctionSort { args, result };
        if self.objects.contains(name) || self.constants.contains_key(name) || self.variables.contains_key(name) {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        let overloads = self.functions.entry(name.to_string()).or_default();
        if overloads.contains(&fs) {
            return Err(LogicError::DuplicateSymbol(format!("{name} : {fs}")));
        }
        overloads.push(fs.clone());
        Ok(FunSym {
            name: name.to_string(),
            sort: fs,
        })
    }

    pub fn add_variable(&mut self, name: &str, sort: Sort) -> Result<Var, LogicError> {
        Self::check_user_name(name)?;
        self.check_sort(&sort)?;
        match self.variables.get(name) {
            Some(s) if *s == sort => {}
            Some(_) => return Err(LogicError::DuplicateSymbol(name.to_string())),
            None => {
                if self.is_declared(name) {
                    return Err(LogicError::DuplicateSymbol(name.to_string()));
                }
                self.variables.insert(name.to_string(), sort.clone());
            }
        }
        Ok(Var::new(name, sort))
    }

    pub fn constant(&self, name: &str) -> Option<Constant> {
        self.constants.get(name).map(|s| Constant::new(name, s.clone()))
    }

    pub fn overloads(&self, name: &str) -> Vec<FunSym> {
        self.functions
            .get(name)
            .map(|v| {
                v.iter()
                    .map(|fs| FunSym {
                        name: name.to_string(),
                        sort: fs.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    /// All sorts over the declared objects.
    pub fn sorts(&self) -> Vec<Sort> {
        let mut out = Vec::new();
        for u in &self.objects {
            for v in &self.objects {
                out.push(Sort::new(u.clone(), v.clone()));
            }
        }
        out
    }

    /// A collision-free generated identifier derived from `hint`.
    pub fn fresh_name(&mut self, hint: &str) -> String {
        let base: String = hint
            .trim_start_matches(FRESH_PREFIX)
            .chars()
            .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        let base = if base.is_empty() { "c".to_string() } else { base };
        let plain = format!("{FRESH_PREFIX}{base}");
        if !self.is_declared(&plain) {
            return plain;
        }
        loop {
            self.fresh_counter += 1;
            let cand = format!("{plain}{}", self.fresh_counter);
            if !self.is_declared(&cand) {
                return cand;
            }
        }
    }

    pub fn fresh_constant(&mut self, hint: &str, sort: Sort) -> Constant {
        let name = self.fresh_name(hint);
        self.insert_constant(&name, sort)
            .expect("fresh constant over declared objects")
    }

    pub fn fresh_function(&mut self, hint: &str, args: Vec<Sort>, result: Sort) -> FunSym {
        let name = self.fresh_name(hint);
        self.insert_function(&name, args, result)
            .expect("fresh function over declared objects")
    }

    pub fn check_term(&self, t: &Term) -> Result<Sort, LogicError> {
        let mismatch = |expected: &Sort, actual: &Sort| LogicError::SortMismatch {
            term: t.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        };
        match t {
            Term::Var(v) => {
                self.check_sort(&v.sort)?;
                if let Some(s) = self.variables.get(&v.name) {
                    if *s != v.sort {
                        return Err(mismatch(s, &v.sort));
                    }
                } else if self.constants.contains_key(&v.name) || self.functions.contains_key(&v.name) {
                    return Err(LogicError::DuplicateSymbol(v.name.clone()));
                }
                Ok(v.sort.clone())
            }
            Term::Const(c) => match self.constants.get(&c.name) {
                None => Err(LogicError::UnknownSymbol(c.name.clone())),
                Some(s) if *s != c.sort => Err(mismatch(s, &c.sort)),
                Some(s) => Ok(s.clone()),
            },
            Term::Zero(s) => {
                self.check_sort(s)?;
                Ok(s.clone())
            }
            Term::Neg(a) => self.check_term(a),
            Term::Add(a, b) => {
                let sa = self.check_term(a)?;
                let sb = self.check_term(b)?;
                if sa != sb {
                    return Err(mismatch(&sa, &sb));
                }
                Ok(sa)
            }
            Term::Mul(a, b) => {
                let sa = self.check_term(a)?;
                let sb = self.check_term(b)?;
                if sa.source != sb.target {
                    return Err(LogicError::SortMismatch {
                        term: t.to_string(),
                        expected: format!("right factor with target {}", sa.source),
                        actual: sb.to_string(),
                    });
                }
                Ok(Sort::new(sb.source, sa.target))
            }
            Term::App(f, args) => {
                let known = self
                    .functions
                    .get(&f.name)
                    .ok_or_else(|| LogicError::UnknownSymbol(f.name.clone()))?;
                if !known.contains(&f.sort) {
                    return Err(LogicError::UnknownSymbol(format!("{} : {}", f.name, f.sort)));
                }
                if args.len() != f.sort.args.len() {
                    return Err(LogicError::SortMismatch {
                        term: t.to_string(),
                        expected: format!("{} arguments", f.sort.args.len()),
                        actual: format!("{} arguments", args.len()),
                    });
                }
                for (a, expected) in args.iter().zip(&f.sort.args) {
                    let actual = self.check_term(a)?;
                    if actual != *expected {
                        return Err(LogicError::SortMismatch {
                            term: a.to_string(),
                            expected: expected.to_string(),
                            actual: actual.to_string(),
                        });
                    }
                }
                Ok(f.sort.result.clone())
            }
        }
    }

    /// Accepts iff every application matches its declared sort and both
    /// sides of every equation have the same sort.
    pub fn check_sorts(&self, f: &Formula) -> Result<(), LogicError> {
        match f {
            Formula::Eq(s, t) => {
                let ss = self.check_term(s)?;
                let st = self.check_term(t)?;
                if ss != st {
                    return Err(LogicError::SortMismatch {
                        term: format!("{s} = {t}"),
                        expected: ss.to_string(),
                        actual: st.to_string(),
                    });
                }
                Ok(())
            }
            Formula::Not(g) => self.check_sorts(g),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.check_sorts(a)?;
                self.check_sorts(b)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                self.check_term(&v.term())?;
                self.check_sorts(g)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_object("u").unwrap();
        s.add_object("v").unwrap();
        s
    }

    #[test]
    fn reflexive_equation_is_well_sorted() {
        let s = sig();
        let x = Term::var("x", Sort::new("u", "v"));
        assert!(s.check_sorts(&Formula::eq(x.clone(), x)).is_ok());
    }

    #[test]
    fn unequal_sides_are_rejected() {
        let s = sig();
        let x = Term::var("x", Sort::new("u", "v"));
        let y = Term::var("y", Sort::new("u", "u"));
        assert!(matches!(
            s.check_sorts(&Formula::eq(x, y)),
            Err(LogicError::SortMismatch { .. })
        ));
    }

    #[test]
    fn undeclared_object_is_unknown() {
        let mut s = sig();
        assert_eq!(
            s.add_constant("x", Sort::new("u", "w")),
            Err(LogicError::UnknownSymbol("w".into()))
        );
    }

    #[test]
    fn reserved_and_duplicate_names() {
        let mut s = sig();
        assert!(matches!(
            s.add_constant("_c", Sort::new("u", "u")),
            Err(LogicError::ReservedName(_))
        ));
        s.add_constant("c", Sort::new("u", "u")).unwrap();
        assert!(matches!(
            s.add_function("c", vec![Sort::new("u", "u")], Sort::new("u", "u")),
            Err(LogicError::DuplicateSymbol(_))
        ));
    }

    #[test]
    fn overloads_are_distinct_symbols() {
        let mut s = sig();
        let a = s
            .add_function("star", vec![Sort::new("u", "v")], Sort::new("v", "u"))
            .unwrap();
        let b = s
            .add_function("star", vec![Sort::new("v", "v")], Sort::new("v", "v"))
            .unwrap();
        assert_ne!(a, b);
        assert_eq!(s.overloads("star").len(), 2);
    }

    #[test]
    fn fresh_names_never_collide() {
        let mut s = sig();
        let a = s.fresh_constant("x", Sort::new("u", "u"));
        let b = s.fresh_constant("x", Sort::new("u", "u"));
        assert_eq!(a.name, "_x");
        assert_ne!(a.name, b.name);
        assert!(b.name.starts_with("_x"));
    }

    #[test]
    fn product_sorts_compose() {
        let mut s = sig();
        let x = s.add_constant("x", Sort::new("u", "v")).unwrap().term();
        let a = s.add_constant("a", Sort::new("v", "u")).unwrap().term();
        assert_eq!(
            s.check_term(&Term::mul(x.clone(), a.clone())).unwrap(),
            Sort::new("v", "v")
        );
        assert!(s.check_term(&Term::mul(x.clone(), x)).is_err());
    }
}
