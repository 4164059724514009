//! Abstract syntax shared by both calculi.
//!
//! The untyped calculus is the pure fragment of [`Term`]: only `Var`, `Lam`
//! and `App` nodes, with no binder annotations. The sugared calculus uses the
//! full enum. Binder and `Nil` annotations are internal; the printer never
//! emits them and the parser leaves them as `None`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::types::Ty;

/// A variable name, rendered as `x<index>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Which calculus a term (or a surface string) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lang {
    /// The untyped calculus: variables, lambdas and applications.
    Lc1,
    /// The typed calculus with unit, booleans, `ite`, lists and `foldr`.
    Lc2,
}

impl Lang {
    pub const ALL: [Lang; 2] = [Lang::Lc1, Lang::Lc2];

    pub fn as_str(self) -> &'static str {
        match self {
            Lang::Lc1 => "lc1",
            Lang::Lc2 => "lc2",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lc1" => Ok(Lang::Lc1),
            "lc2" => Ok(Lang::Lc2),
            other => Err(format!("unknown language `{other}` (expected lc1 or lc2)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    /// Binder, optional binder type, body.
    Lam(Var, Option<Ty>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Unit,
    True,
    False,
    Ite(Box<Term>, Box<Term>, Box<Term>),
    /// Empty list, with its element type when known.
    Nil(Option<Ty>),
    Cons(Box<Term>, Box<Term>),
    /// `foldr step init list`.
    Foldr(Box<Term>, Box<Term>, Box<Term>),
}

pub fn var(i: u32) -> Term {
    Term::Var(Var(i))
}

pub fn lam(x: u32, body: Term) -> Term {
    Term::Lam(Var(x), None, Box::new(body))
}

pub fn lam_t(x: u32, ty: Ty, body: Term) -> Term {
    Term::Lam(Var(x), Some(ty), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

/// Left-nested application of `f` to every argument in order.
pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(f, app)
}

pub fn ite(c: Term, t: Term, e: Term) -> Term {
    Term::Ite(Box::new(c), Box::new(t), Box::new(e))
}

pub fn cons(h: Term, t: Term) -> Term {
    Term::Cons(Box::new(h), Box::new(t))
}

pub fn foldr(f: Term, e: Term, l: Term) -> Term {
    Term::Foldr(Box::new(f), Box::new(e), Box::new(l))
}

impl Term {
    /// True when the term only uses the untyped calculus' constructors.
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Lam(_, ty, b) => ty.is_none() && b.is_pure(),
            Term::App(f, a) => f.is_pure() && a.is_pure(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, v: Var) -> bool {
        match self {
            Term::Var(x) => *x == v,
            Term::Lam(x, _, b) => *x != v && b.occurs_free(v),
            Term::App(f, a) | Term::Cons(f, a) => f.occurs_free(v) || a.occurs_free(v),
            Term::Ite(a, b, c) | Term::Foldr(a, b, c) => {
                a.occurs_free(v) || b.occurs_free(v) || c.occurs_free(v)
            }
            Term::Unit | Term::True | Term::False | Term::Nil(_) => false,
        }
    }

    /// Largest variable index occurring anywhere (bound, free or as a binder).
    pub fn max_index(&self) -> Option<u32> {
        match self {
            Term::Var(x) => Some(x.0),
            Term::Lam(x, _, b) => Some(b.max_index().map_or(x.0, |m| m.max(x.0))),
            Term::App(f, a) | Term::Cons(f, a) => f.max_index().max(a.max_index()),
            Term::Ite(a, b, c) | Term::Foldr(a, b, c) => {
                a.max_index().max(b.max_index()).max(c.max_index())
            }
            Term::Unit | Term::True | Term::False | Term::Nil(_) => None,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Unit | Term::True | Term::False | Term::Nil(_) => 1,
            Term::Lam(_, _, b) => 1 + b.size(),
            Term::App(f, a) | Term::Cons(f, a) => 1 + f.size() + a.size(),
            Term::Ite(a, b, c) | Term::Foldr(a, b, c) => 1 + a.size() + b.size() + c.size(),
        }
    }

    /// Depth of the term tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Unit | Term::True | Term::False | Term::Nil(_) => 1,
            Term::Lam(_, _, b) => 1 + b.depth(),
            Term::App(f, a) | Term::Cons(f, a) => 1 + f.depth().max(a.depth()),
            Term::Ite(a, b, c) | Term::Foldr(a, b, c) => {
                1 + a.depth().max(b.depth()).max(c.depth())
            }
        }
    }

    /// Copy of the term with every type annotation removed.
    pub fn erase_types(&self) -> Term {
        self.map_children(Term::erase_types, |_| None)
    }

    /// Rebuilds the node with `f` applied to each immediate subterm and
    /// `ann` applied to each annotation.
    fn map_children(
        &self,
        mut f: impl FnMut(&Term) -> Term,
        ann: impl Fn(&Option<Ty>) -> Option<Ty>,
    ) -> Term {
        match self {
            Term::Var(x) => Term::Var(*x),
            Term::Lam(x, ty, b) => Term::Lam(*x, ann(ty), Box::new(f(b))),
            Term::App(a, b) => app(f(a), f(b)),
            Term::Cons(a, b) => cons(f(a), f(b)),
            Term::Ite(a, b, c) => ite(f(a), f(b), f(c)),
            Term::Foldr(a, b, c) => foldr(f(a), f(b), f(c)),
            Term::Nil(ty) => Term::Nil(ann(ty)),
            Term::Unit => Term::Unit,
            Term::True => Term::True,
            Term::False => Term::False,
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(*x);
            }
        }
        Term::Lam(x, _, b) => {
            bound.push(*x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(a, b) | Term::Cons(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Ite(a, b, c) | Term::Foldr(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
        Term::Unit | Term::True | Term::False | Term::Nil(_) => {}
    }
}

/// Capture-avoiding substitution `t[v := s]`.
///
/// A binder of `t` that would capture a free variable of `s` is renamed to a
/// fresh index strictly greater than every index occurring in `t` or `s`.
pub fn substitute(t: &Term, v: Var, s: &Term) -> Term {
    if !t.occurs_free(v) {
        return t.clone();
    }
    let mut subst = Subst {
        v,
        s,
        fv_s: s.free_vars(),
        next_fresh: None,
        t_max: t,
    };
    subst.go(t)
}

struct Subst<'a> {
    v: Var,
    s: &'a Term,
    fv_s: BTreeSet<Var>,
    next_fresh: Option<u32>,
    t_max: &'a Term,
}

impl Subst<'_> {
    fn fresh(&mut self) -> Var {
        let next = self.next_fresh.get_or_insert_with(|| {
            self.t_max.max_index().max(self.s.max_index()).map_or(0, |m| m + 1)
        });
        let x = Var(*next);
        *next += 1;
        x
    }

    fn go(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) if *x == self.v => self.s.clone(),
            Term::Lam(x, ty, body) => {
                if *x == self.v || !body.occurs_free(self.v) {
                    return t.clone();
                }
                if self.fv_s.contains(x) {
                    let y = self.fresh();
                    let renamed = rename_free(body, *x, y);
                    Term::Lam(y, ty.clone(), Box::new(self.go(&renamed)))
                } else {
                    Term::Lam(*x, ty.clone(), Box::new(self.go(body)))
                }
            }
            _ => t.map_children(|c| self.go(c), Clone::clone),
        }
    }
}

/// Replaces free occurrences of `from` by `to`, where `to` does not occur in `t`.
fn rename_free(t: &Term, from: Var, to: Var) -> Term {
    match t {
        Term::Var(x) if *x == from => Term::Var(to),
        Term::Lam(x, _, _) if *x == from => t.clone(),
        _ => t.map_children(|c| rename_free(c, from, to), Clone::clone),
    }
}

/// Equality up to consistent renaming of bound variables.
///
/// Type annotations are ignored: they never reach the surface syntax.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    let mut left = Vec::new();
    let mut right = Vec::new();
    alpha_go(a, b, &mut left, &mut right)
}

fn alpha_go(a: &Term, b: &Term, left: &mut Vec<Var>, right: &mut Vec<Var>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let lx = left.iter().rposition(|v| v == x);
            let ry = right.iter().rposition(|v| v == y);
            match (lx, ry) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Lam(x, _, bx), Term::Lam(y, _, by)) => {
            left.push(*x);
            right.push(*y);
            let eq = alpha_go(bx, by, left, right);
            left.pop();
            right.pop();
            eq
        }
        (Term::App(f1, a1), Term::App(f2, a2)) | (Term::Cons(f1, a1), Term::Cons(f2, a2)) => {
            alpha_go(f1, f2, left, right) && alpha_go(a1, a2, left, right)
        }
        (Term::Ite(a1, b1, c1), Term::Ite(a2, b2, c2))
        | (Term::Foldr(a1, b1, c1), Term::Foldr(a2, b2, c2)) => {
            alpha_go(a1, a2, left, right)
                && alpha_go(b1, b2, left, right)
                && alpha_go(c1, c2, left, right)
        }
        (Term::Unit, Term::Unit) | (Term::True, Term::True) | (Term::False, Term::False) => true,
        (Term::Nil(_), Term::Nil(_)) => true,
        _ => false,
    }
}

/// Renumbers binders `x0, x1, ...` in preorder of appearance.
///
/// Free variables keep their names; for open terms numbering starts after the
/// largest free index so the result stays alpha-equal to the input.
pub fn rename_vr(t: &Term) -> Term {
    let start = t.free_vars().iter().next_back().map_or(0, |v| v.0 + 1);
    let mut renamer = Renumber {
        next: start,
        scope: HashMap::new(),
    };
    renamer.go(t)
}

struct Renumber {
    next: u32,
    scope: HashMap<Var, Vec<Var>>,
}

impl Renumber {
    fn go(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(
                self.scope
                    .get(x)
                    .and_then(|stack| stack.last().copied())
                    .unwrap_or(*x),
            ),
            Term::Lam(x, ty, body) => {
                let fresh = Var(self.next);
                self.next += 1;
                self.scope.entry(*x).or_default().push(fresh);
                let body = self.go(body);
                self.scope.get_mut(x).map(Vec::pop);
                Term::Lam(fresh, ty.clone(), Box::new(body))
            }
            _ => t.map_children(|c| self.go(c), Clone::clone),
        }
    }
}
