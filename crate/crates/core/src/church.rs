//! Translation from the sugared calculus into the untyped one.
//!
//! Data is Church-encoded: booleans select one of two arguments, unit is the
//! identity, and a list is its own right fold. `foldr f e l` becomes `l f e`
//! and `ite c a b` becomes `c a b`. A cons cell is the cons combinator
//! `\h -> \t -> \c -> \n -> c h (t c n)` applied to head and tail, so the
//! encoding of a literal list keeps one redex per element.

use crate::term::{app, apps, lam, rename_vr, var, Term};

/// Church-encodes `t` and renumbers binders in preorder.
///
/// All binders of the result are distinct and numbered `x0, x1, ...` in the
/// order they appear when printed, interleaving source binders with the ones
/// introduced by the encoding.
pub fn church_encode(t: &Term) -> Term {
    let mut enc = Encoder {
        next: t.max_index().map_or(0, |m| m + 1),
    };
    let raw = enc.encode(t);
    rename_vr(&raw)
}

struct Encoder {
    next: u32,
}

impl Encoder {
    fn fresh(&mut self) -> u32 {
        let x = self.next;
        self.next += 1;
        x
    }

    /// `\t -> \f -> t` or `\t -> \f -> f`.
    fn boolean(&mut self, value: bool) -> Term {
        let (t, f) = (self.fresh(), self.fresh());
        lam(t, lam(f, var(if value { t } else { f })))
    }

    fn encode(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(*x),
            Term::Lam(x, _, body) => Term::Lam(*x, None, Box::new(self.encode(body))),
            Term::App(f, a) => app(self.encode(f), self.encode(a)),
            Term::Unit => {
                let x = self.fresh();
                lam(x, var(x))
            }
            Term::True => self.boolean(true),
            Term::False => self.boolean(false),
            Term::Ite(c, a, b) => apps(self.encode(c), [self.encode(a), self.encode(b)]),
            Term::Nil(_) => {
                let (c, n) = (self.fresh(), self.fresh());
                lam(c, lam(n, var(n)))
            }
            Term::Cons(h, tl) => {
                let (hv, tv, c, n) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
                let step = apps(var(c), [var(hv), apps(var(tv), [var(c), var(n)])]);
                let combinator = lam(hv, lam(tv, lam(c, lam(n, step))));
                apps(combinator, [self.encode(h), self.encode(tl)])
            }
            Term::Foldr(f, e, l) => apps(self.encode(l), [self.encode(f), self.encode(e)]),
        }
    }
}
