//! Independent reference implementations used only by tests.
//!
//! The LC1 oracle works on de Bruijn indices and performs one
//! leftmost-outermost beta step at a time, so it shares no code with the
//! library reducer. The enumerators produce exhaustive term sets for
//! small sizes.
#![allow(dead_code)]

use std::collections::BTreeSet;

use lambda_corpus::syntax::print;
use lambda_corpus::term::{rename_vr, Term, Var};
use lambda_corpus::types::Ty;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Db {
    Bound(usize),
    Free(u32),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
}

/// Converts a pure term; panics on sugar.
pub fn to_db(t: &Term) -> Db {
    fn go(t: &Term, scope: &mut Vec<Var>) -> Db {
        match t {
            Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
                Some(i) => Db::Bound(i),
                None => Db::Free(x.0),
            },
            Term::Lam(x, _, b) => {
                scope.push(*x);
                let body = go(b, scope);
                scope.pop();
                Db::Lam(Box::new(body))
            }
            Term::App(f, a) => Db::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
            other => panic!("not an LC1 term: {other:?}"),
        }
    }
    go(t, &mut Vec::new())
}

/// Named term with binders `x0, x1, ...` in preorder. Free variables keep
/// their index, so only use this on closed terms.
pub fn from_db(t: &Db) -> Term {
    fn go(t: &Db, scope: &mut Vec<u32>, next: &mut u32) -> Term {
        match t {
            Db::Bound(i) => Term::Var(Var(scope[scope.len() - 1 - i])),
            Db::Free(x) => Term::Var(Var(*x)),
            Db::Lam(b) => {
                let x = *next;
                *next += 1;
                scope.push(x);
                let body = go(b, scope, next);
                scope.pop();
                Term::Lam(Var(x), None, Box::new(body))
            }
            Db::App(f, a) => {
                let f = go(f, scope, next);
                let a = go(a, scope, next);
                Term::App(Box::new(f), Box::new(a))
            }
        }
    }
    go(t, &mut Vec::new(), &mut 0)
}

fn shift(t: &Db, d: isize, cutoff: usize) -> Db {
    match t {
        Db::Bound(i) if *i >= cutoff => Db::Bound((*i as isize + d) as usize),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(shift(b, d, cutoff + 1))),
        Db::App(f, a) => Db::App(Box::new(shift(f, d, cutoff)), Box::new(shift(a, d, cutoff))),
    }
}

fn subst(t: &Db, j: usize, s: &Db) -> Db {
    match t {
        Db::Bound(i) if *i == j => s.clone(),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(subst(b, j + 1, &shift(s, 1, 0)))),
        Db::App(f, a) => Db::App(Box::new(subst(f, j, s)), Box::new(subst(a, j, s))),
    }
}

fn beta(body: &Db, arg: &Db) -> Db {
    shift(&subst(body, 0, &shift(arg, 1, 0)), -1, 0)
}

/// Contracts the leftmost-outermost redex, if any.
pub fn step(t: &Db) -> Option<Db> {
    match t {
        Db::App(f, a) => {
            if let Db::Lam(body) = f.as_ref() {
                return Some(beta(body, a));
            }
            if let Some(f2) = step(f) {
                return Some(Db::App(Box::new(f2), a.clone()));
            }
            step(a).map(|a2| Db::App(f.clone(), Box::new(a2)))
        }
        Db::Lam(b) => step(b).map(|b2| Db::Lam(Box::new(b2))),
        _ => None,
    }
}

/// Contracts head redexes only (weak head reduction).
pub fn head_step(t: &Db) -> Option<Db> {
    match t {
        Db::App(f, a) => {
            if let Db::Lam(body) = f.as_ref() {
                return Some(beta(body, a));
            }
            head_step(f).map(|f2| Db::App(Box::new(f2), a.clone()))
        }
        _ => None,
    }
}

fn iterate(t: &Db, cap: usize, f: fn(&Db) -> Option<Db>) -> Option<(Db, usize)> {
    let mut cur = t.clone();
    for n in 0..=cap {
        match f(&cur) {
            Some(next) => cur = next,
            None => return Some((cur, n)),
        }
    }
    None
}

/// Normal form and number of redexes contracted, or `None` past `cap` steps.
pub fn normalize(t: &Db, cap: usize) -> Option<(Db, usize)> {
    iterate(t, cap, step)
}

pub fn whnf(t: &Db, cap: usize) -> Option<(Db, usize)> {
    iterate(t, cap, head_step)
}

pub fn db_size(t: &Db) -> usize {
    match t {
        Db::Bound(_) | Db::Free(_) => 1,
        Db::Lam(b) => 1 + db_size(b),
        Db::App(f, a) => 1 + db_size(f) + db_size(a),
    }
}

/// All closed LC1 terms with exactly `size` AST nodes.
pub fn closed_terms_of_size(size: usize) -> Vec<Db> {
    fn go(size: usize, depth: usize) -> Vec<Db> {
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..depth).map(Db::Bound));
            return out;
        }
        for b in go(size - 1, depth + 1) {
            out.push(Db::Lam(Box::new(b)));
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let fs = go(left, depth);
            let as_ = go(right, depth);
            for f in &fs {
                for a in &as_ {
                    out.push(Db::App(Box::new(f.clone()), Box::new(a.clone())));
                }
            }
        }
        out
    }
    go(size, 0)
}

pub fn closed_terms_up_to(max_size: usize) -> Vec<Db> {
    (1..=max_size).flat_map(closed_terms_of_size).collect()
}

/// All types of depth at most `depth`.
pub fn types_up_to(depth: usize) -> Vec<Ty> {
    if depth <= 1 {
        return vec![Ty::Unit, Ty::Bool];
    }
    let smaller = types_up_to(depth - 1);
    let mut out = vec![Ty::Unit, Ty::Bool];
    out.extend(smaller.iter().cloned().map(Ty::list));
    for a in &smaller {
        for b in &smaller {
            out.push(Ty::arrow(a.clone(), b.clone()));
        }
    }
    out
}

/// Canonical strings of every closed LC2 term of type `ty` and depth at most
/// `depth` built from the generator's constructor set, with eliminations
/// drawing hidden types from `aux`.
pub fn typed_inhabitants(ty: &Ty, depth: usize, aux: &[Ty]) -> BTreeSet<String> {
    struct Enum<'a> {
        aux: &'a [Ty],
        env: Vec<(Var, Ty)>,
        next: u32,
    }
    impl Enum<'_> {
        fn go(&mut self, ty: &Ty, depth: usize) -> Vec<Term> {
            let mut out = Vec::new();
            if depth == 0 {
                return out;
            }
            for (x, t) in &self.env {
                if t == ty {
                    out.push(Term::Var(*x));
                }
            }
            match ty {
                Ty::Unit => out.push(Term::Unit),
                Ty::Bool => out.extend([Term::True, Term::False]),
                Ty::List(elem) => {
                    out.push(Term::Nil(None));
                    for h in self.go(elem, depth - 1) {
                        for t in self.go(ty, depth - 1) {
                            out.push(Term::Cons(Box::new(h.clone()), Box::new(t)));
                        }
                    }
                }
                Ty::Arrow(dom, cod) => {
                    let x = Var(self.next);
                    self.next += 1;
                    self.env.push((x, (**dom).clone()));
                    for body in self.go(cod, depth - 1) {
                        out.push(Term::Lam(x, None, Box::new(body)));
                    }
                    self.env.pop();
                }
            }
            if depth >= 2 {
                for a_ty in self.aux.to_vec() {
                    let fs = self.go(&Ty::arrow(a_ty.clone(), ty.clone()), depth - 1);
                    let args = self.go(&a_ty, depth - 1);
                    for f in &fs {
                        for a in &args {
                            out.push(Term::App(Box::new(f.clone()), Box::new(a.clone())));
                        }
                    }
                }
                let cs = self.go(&Ty::Bool, depth - 1);
                let bs = self.go(ty, depth - 1);
                for c in &cs {
                    for t in &bs {
                        for e in &bs {
                            out.push(Term::Ite(Box::new(c.clone()), Box::new(t.clone()), Box::new(e.clone())));
                        }
                    }
                }
                for elem in self.aux.to_vec() {
                    let step_ty = Ty::arrow(elem.clone(), Ty::arrow(ty.clone(), ty.clone()));
                    let fs = self.go(&step_ty, depth - 1);
                    let ls = self.go(&Ty::list(elem), depth - 1);
                    for f in &fs {
                        for e in &bs {
                            for l in &ls {
                                out.push(Term::Foldr(
                                    Box::new(f.clone()),
                                    Box::new(e.clone()),
                                    Box::new(l.clone()),
                                ));
                            }
                        }
                    }
                }
            }
            out
        }
    }
    let mut e = Enum {
        aux,
        env: Vec::new(),
        next: 0,
    };
    e.go(ty, depth).iter().map(|t| print(&rename_vr(t))).collect()
}
