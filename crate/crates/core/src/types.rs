//! Types of the sugared calculus and a simply-typed checker.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{Term, Var};

/// `Unit | Bool | [t] | t -> t`.
///
/// The derived `Ord` (Unit < Bool < List < Arrow, then fields
/// lexicographically) is the tie-break order for frequency rankings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Unit,
    Bool,
    List(Box<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn list(elem: Ty) -> Ty {
        Ty::List(Box::new(elem))
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Ty::Unit | Ty::Bool => 1,
            Ty::List(t) => 1 + t.depth(),
            Ty::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Unit => f.write_str("Unit"),
            Ty::Bool => f.write_str("Bool"),
            Ty::List(t) => write!(f, "[{t}]"),
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid type `{input}` at byte {offset}: {message}")]
pub struct TyParseError {
    pub input: String,
    pub offset: usize,
    pub message: &'static str,
}

impl FromStr for Ty {
    type Err = TyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TyParser { src: s, pos: 0 };
        let ty = p.arrow()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(ty)
    }
}

struct TyParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TyParser<'_> {
    fn error(&self, message: &'static str) -> TyParseError {
        TyParseError {
            input: self.src.to_string(),
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<Ty, TyParseError> {
        let dom = self.atom()?;
        if self.eat("->") {
            Ok(Ty::arrow(dom, self.arrow()?))
        } else {
            Ok(dom)
        }
    }

    fn atom(&mut self) -> Result<Ty, TyParseError> {
        if self.eat("Unit") {
            Ok(Ty::Unit)
        } else if self.eat("Bool") {
            Ok(Ty::Bool)
        } else if self.eat("[") {
            let elem = self.arrow()?;
            if !self.eat("]") {
                return Err(self.error("expected `]`"));
            }
            Ok(Ty::list(elem))
        } else if self.eat("(") {
            let inner = self.arrow()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            Ok(inner)
        } else {
            Err(self.error("expected `Unit`, `Bool`, `[` or `(`"))
        }
    }
}

/// Variable typing context. Looking up an unbound variable is an error.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    vars: BTreeMap<Var, Ty>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: Var, ty: Ty) -> Self {
        self.vars.insert(x, ty);
        self
    }

    pub fn get(&self, x: Var) -> Option<&Ty> {
        self.vars.get(&x)
    }

    fn bind(&mut self, x: Var, ty: Ty) -> Option<Ty> {
        self.vars.insert(x, ty)
    }

    fn restore(&mut self, x: Var, shadowed: Option<Ty>) {
        match shadowed {
            Some(old) => self.vars.insert(x, old),
            None => self.vars.remove(&x),
        };
    }
}

/// Location of a subterm, as the sequence of child edges from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermPath(pub Vec<&'static str>);

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("<root>")
        } else {
            f.write_str(&self.0.join("."))
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("at {path}: expected {expected}, found {actual}")]
    Mismatch {
        path: TermPath,
        expected: Ty,
        actual: Ty,
    },
    #[error("at {path}: expected a function, found {actual}")]
    NotAFunction { path: TermPath, actual: Ty },
    #[error("at {path}: expected a list, found {actual}")]
    NotAList { path: TermPath, actual: Ty },
    #[error("at {path}: unbound variable {var}")]
    Unbound { path: TermPath, var: Var },
    #[error("at {path}: missing type annotation")]
    MissingAnnotation { path: TermPath },
}

/// Computes the type of `t` under `env`.
///
/// Every binder and every `Nil` must carry an annotation.
pub fn check(env: &TypeEnv, t: &Term) -> Result<Ty, TypeError> {
    let mut checker = Checker {
        env: env.clone(),
        path: Vec::new(),
    };
    checker.infer(t)
}

struct Checker {
    env: TypeEnv,
    path: Vec<&'static str>,
}

impl Checker {
    fn here(&self) -> TermPath {
        TermPath(self.path.clone())
    }

    fn child(&mut self, edge: &'static str, t: &Term) -> Result<Ty, TypeError> {
        self.path.push(edge);
        let out = self.infer(t);
        self.path.pop();
        out
    }

    fn expect(&mut self, edge: &'static str, t: &Term, expected: &Ty) -> Result<(), TypeError> {
        let actual = self.child(edge, t)?;
        if &actual == expected {
            Ok(())
        } else {
            self.path.push(edge);
            let err = TypeError::Mismatch {
                path: self.here(),
                expected: expected.clone(),
                actual,
            };
            self.path.pop();
            Err(err)
        }
    }

    fn infer(&mut self, t: &Term) -> Result<Ty, TypeError> {
        match t {
            Term::Var(x) => self.env.get(*x).cloned().ok_or_else(|| TypeError::Unbound {
                path: self.here(),
                var: *x,
            }),
            Term::Lam(x, ann, body) => {
                let dom = ann.clone().ok_or_else(|| TypeError::MissingAnnotation {
                    path: self.here(),
                })?;
                let shadowed = self.env.bind(*x, dom.clone());
                let cod = self.child("body", body);
                self.env.restore(*x, shadowed);
                Ok(Ty::arrow(dom, cod?))
            }
            Term::App(f, a) => match self.child("fun", f)? {
                Ty::Arrow(dom, cod) => {
                    self.expect("arg", a, &dom)?;
                    Ok(*cod)
                }
                actual => Err(TypeError::NotAFunction {
                    path: TermPath([self.path.as_slice(), &["fun"]].concat()),
                    actual,
                }),
            },
            Term::Unit => Ok(Ty::Unit),
            Term::True | Term::False => Ok(Ty::Bool),
            Term::Ite(c, a, b) => {
                self.expect("cond", c, &Ty::Bool)?;
                let ty = self.child("then", a)?;
                self.expect("else", b, &ty)?;
                Ok(ty)
            }
            Term::Nil(ann) => ann.clone().map(Ty::list).ok_or_else(|| {
                TypeError::MissingAnnotation { path: self.here() }
            }),
            Term::Cons(h, tl) => {
                let elem = self.child("head", h)?;
                let list = Ty::list(elem);
                self.expect("tail", tl, &list)?;
                Ok(list)
            }
            Term::Foldr(f, e, l) => {
                let elem = match self.child("list", l)? {
                    Ty::List(elem) => *elem,
                    actual => {
                        return Err(TypeError::NotAList {
                            path: TermPath([self.path.as_slice(), &["list"]].concat()),
                            actual,
                        })
                    }
                };
                let acc = self.child("init", e)?;
                let step = Ty::arrow(elem, Ty::arrow(acc.clone(), acc.clone()));
                self.expect("step", f, &step)?;
                Ok(acc)
            }
        }
    }
}

/// Types ordered by descending frequency; ties follow the `Ord` on [`Ty`].
pub fn type_frequency_order<'a>(types: impl IntoIterator<Item = &'a Ty>) -> Vec<(Ty, usize)> {
    let mut counts: HashMap<&Ty, usize> = HashMap::new();
    for ty in types {
        *counts.entry(ty).or_default() += 1;
    }
    let mut ranked: Vec<(Ty, usize)> = counts.into_iter().map(|(t, c)| (t.clone(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    fn ty(s: &str) -> Ty {
        s.parse().unwrap()
    }

    #[test]
    fn renders_types() {
        assert_eq!(ty("Unit -> Bool").to_string(), "Unit -> Bool");
        assert_eq!(Ty::arrow(Ty::arrow(Ty::Unit, Ty::Bool), Ty::Unit).to_string(), "(Unit -> Bool) -> Unit");
        assert_eq!(Ty::arrow(Ty::Unit, Ty::arrow(Ty::Bool, Ty::Unit)).to_string(), "Unit -> Bool -> Unit");
        assert_eq!(ty("[[Unit -> Bool]]").to_string(), "[[Unit -> Bool]]");
    }

    #[test]
    fn parses_nested_footnote_type() {
        let s = "(Unit -> [[Bool -> [Unit]]]) -> [[[[Unit]]]]";
        assert_eq!(ty(s).to_string(), s);
        assert!("Unit ->".parse::<Ty>().is_err());
        assert!("[Unit".parse::<Ty>().is_err());
    }

    #[test]
    fn checks_literals_and_ite() {
        let env = TypeEnv::new();
        assert_eq!(check(&env, &Term::True), Ok(Ty::Bool));
        let t = ite(
            Term::True,
            Term::Nil(Some(Ty::Unit)),
            cons(Term::Unit, Term::Nil(Some(Ty::Unit))),
        );
        assert_eq!(check(&env, &t), Ok(Ty::list(Ty::Unit)));
    }

    #[test]
    fn checks_foldr_and_lambda() {
        // foldr (\x0:Bool -> \x1:Unit -> x1) () [True]
        let step = lam_t(0, Ty::Bool, lam_t(1, Ty::Unit, var(1)));
        let t = foldr(step, Term::Unit, cons(Term::True, Term::Nil(Some(Ty::Bool))));
        assert_eq!(check(&TypeEnv::new(), &t), Ok(Ty::Unit));
    }

    #[test]
    fn reports_mismatch_with_path() {
        let t = ite(Term::Unit, Term::True, Term::False);
        match check(&TypeEnv::new(), &t) {
            Err(TypeError::Mismatch { path, expected, actual }) => {
                assert_eq!(path.to_string(), "cond");
                assert_eq!(expected, Ty::Bool);
                assert_eq!(actual, Ty::Unit);
            }
            other => panic!("unexpected {other:?}"),
        }
        let t = app(lam_t(0, Ty::Unit, var(0)), Term::True);
        assert!(matches!(check(&TypeEnv::new(), &t), Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn unbound_and_unannotated_are_errors() {
        assert!(matches!(check(&TypeEnv::new(), &var(3)), Err(TypeError::Unbound { .. })));
        assert!(matches!(
            check(&TypeEnv::new(), &lam(0, var(0))),
            Err(TypeError::MissingAnnotation { .. })
        ));
        let env = TypeEnv::new().with(Var(3), Ty::Bool);
        assert_eq!(check(&env, &var(3)), Ok(Ty::Bool));
    }

    #[test]
    fn shadowing_restores_outer_binding() {
        // \x0:Bool -> (\x0:Unit -> x0) () ; then x0 must be Bool again? body returns Unit
        let inner = app(lam_t(0, Ty::Unit, var(0)), Term::Unit);
        let t = lam_t(0, Ty::Bool, ite(var(0), inner.clone(), inner));
        assert_eq!(check(&TypeEnv::new(), &t), Ok(ty("Bool -> Unit")));
    }

    #[test]
    fn frequency_order_examples() {
        let tys = [Ty::Bool, Ty::Bool, Ty::Unit, Ty::Bool];
        assert_eq!(type_frequency_order(&tys), vec![(Ty::Bool, 3), (Ty::Unit, 1)]);
        let tied = [Ty::Bool, Ty::Unit];
        assert_eq!(type_frequency_order(&tied), vec![(Ty::Unit, 1), (Ty::Bool, 1)]);
        let lists = [Ty::list(Ty::Bool), Ty::arrow(Ty::Unit, Ty::Unit)];
        assert_eq!(type_frequency_order(&lists)[0].0, Ty::list(Ty::Bool));
    }
}
