//! Normal-order reduction to weak head normal form and deep normal form.
//!
//! One step is one beta contraction, one `ite` branch selection, or one
//! `foldr` rule firing. WHNF reduces only the head: the function position of
//! an application, the condition of an `ite` and the list of a `foldr`, in
//! that priority. DNF first reaches WHNF and then normalizes every immediate
//! subterm left to right, which is leftmost-outermost reduction.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{app, rename_vr, substitute, Term};

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Lazy evaluation.
    Whnf,
    /// Eager (deep) evaluation.
    Dnf,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Whnf, Strategy::Dnf];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Whnf => "whnf",
            Strategy::Dnf => "dnf",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whnf" => Ok(Strategy::Whnf),
            "dnf" => Ok(Strategy::Dnf),
            other => Err(format!("unknown strategy `{other}` (expected whnf or dnf)")),
        }
    }
}

/// Output variable naming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Renaming {
    /// Binders renumbered in order of appearance.
    Vr,
    /// Binder names preserved through reduction.
    Nvr,
}

impl Renaming {
    pub const ALL: [Renaming; 2] = [Renaming::Vr, Renaming::Nvr];

    pub fn as_str(self) -> &'static str {
        match self {
            Renaming::Vr => "vr",
            Renaming::Nvr => "nvr",
        }
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Renaming {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vr" => Ok(Renaming::Vr),
            "nvr" => Ok(Renaming::Nvr),
            other => Err(format!("unknown renaming mode `{other}` (expected vr or nvr)")),
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("reduction did not terminate within {fuel} steps")]
pub struct FuelExhausted {
    pub fuel: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub normal_form: Term,
    pub steps: u64,
    pub strategy: Strategy,
    pub renaming: Renaming,
}

/// Reduces `t` under `strategy`, renumbering binders when `renaming` is VR.
pub fn reduce(
    t: &Term,
    strategy: Strategy,
    renaming: Renaming,
    fuel: u64,
) -> Result<ReductionResult, FuelExhausted> {
    let mut m = Machine::new(fuel);
    let nf = match strategy {
        Strategy::Whnf => m.whnf(t.clone())?,
        Strategy::Dnf => m.dnf(t.clone())?,
    };
    let normal_form = match renaming {
        Renaming::Vr => rename_vr(&nf),
        Renaming::Nvr => nf,
    };
    Ok(ReductionResult {
        normal_form,
        steps: m.steps,
        strategy,
        renaming,
    })
}

/// WHNF with names preserved.
pub fn reduce_whnf(t: &Term, fuel: u64) -> Result<ReductionResult, FuelExhausted> {
    reduce(t, Strategy::Whnf, Renaming::Nvr, fuel)
}

/// DNF with names preserved.
pub fn reduce_dnf(t: &Term, fuel: u64) -> Result<ReductionResult, FuelExhausted> {
    reduce(t, Strategy::Dnf, Renaming::Nvr, fuel)
}

/// Both normal forms (names preserved) from a single reduction run.
///
/// The DNF continues from the WHNF, so `steps` of the second result counts
/// the head steps too. `fuel` bounds the combined run.
pub fn reduce_both(
    t: &Term,
    fuel: u64,
) -> Result<(ReductionResult, ReductionResult), FuelExhausted> {
    let mut m = Machine::new(fuel);
    let whnf = m.whnf(t.clone())?;
    let whnf_steps = m.steps;
    let dnf = m.deep(whnf.clone())?;
    Ok((
        ReductionResult {
            normal_form: whnf,
            steps: whnf_steps,
            strategy: Strategy::Whnf,
            renaming: Renaming::Nvr,
        },
        ReductionResult {
            normal_form: dnf,
            steps: m.steps,
            strategy: Strategy::Dnf,
            renaming: Renaming::Nvr,
        },
    ))
}

/// True when `t` has no redex in head position.
pub fn is_whnf(t: &Term) -> bool {
    match t {
        Term::App(f, _) => !matches!(**f, Term::Lam(..)) && is_whnf(f),
        Term::Ite(c, _, _) => !matches!(**c, Term::True | Term::False) && is_whnf(c),
        Term::Foldr(_, _, l) => !matches!(**l, Term::Nil(_) | Term::Cons(..)) && is_whnf(l),
        _ => true,
    }
}

/// True when `t` contains no redex at all.
pub fn is_dnf(t: &Term) -> bool {
    is_whnf(t)
        && match t {
            Term::Var(_) | Term::Unit | Term::True | Term::False | Term::Nil(_) => true,
            Term::Lam(_, _, b) => is_dnf(b),
            Term::App(a, b) | Term::Cons(a, b) => is_dnf(a) && is_dnf(b),
            Term::Ite(a, b, c) | Term::Foldr(a, b, c) => is_dnf(a) && is_dnf(b) && is_dnf(c),
        }
}

struct Machine {
    fuel: u64,
    steps: u64,
}

impl Machine {
    fn new(fuel: u64) -> Self {
        Machine { fuel, steps: 0 }
    }

    fn tick(&mut self) -> Result<(), FuelExhausted> {
        if self.steps >= self.fuel {
            return Err(FuelExhausted { fuel: self.fuel });
        }
        self.steps += 1;
        Ok(())
    }

    fn whnf(&mut self, mut t: Term) -> Result<Term, FuelExhausted> {
        loop {
            t = match t {
                Term::App(f, a) => match self.whnf(*f)? {
                    Term::Lam(x, _, body) => {
                        self.tick()?;
                        substitute(&body, x, &a)
                    }
                    stuck => return Ok(Term::App(Box::new(stuck), a)),
                },
                Term::Ite(c, a, b) => match self.whnf(*c)? {
                    Term::True => {
                        self.tick()?;
                        *a
                    }
                    Term::False => {
                        self.tick()?;
                        *b
                    }
                    stuck => return Ok(Term::Ite(Box::new(stuck), a, b)),
                },
                Term::Foldr(f, e, l) => match self.whnf(*l)? {
                    Term::Nil(_) => {
                        self.tick()?;
                        *e
                    }
                    Term::Cons(h, tl) => {
                        self.tick()?;
                        let rest = Term::Foldr(f.clone(), e, tl);
                        app(app(*f, *h), rest)
                    }
                    stuck => return Ok(Term::Foldr(f, e, Box::new(stuck))),
                },
                whnf => return Ok(whnf),
            };
        }
    }

    fn dnf(&mut self, t: Term) -> Result<Term, FuelExhausted> {
        let w = self.whnf(t)?;
        self.deep(w)
    }

    /// Normalizes the subterms of a term already in WHNF.
    fn deep(&mut self, w: Term) -> Result<Term, FuelExhausted> {
        Ok(match w {
            Term::Lam(x, ty, body) => Term::Lam(x, ty, Box::new(self.dnf(*body)?)),
            Term::App(f, a) => {
                let f = self.deep(*f)?;
                Term::App(Box::new(f), Box::new(self.dnf(*a)?))
            }
            Term::Ite(c, a, b) => {
                let c = self.deep(*c)?;
                let a = self.dnf(*a)?;
                Term::Ite(Box::new(c), Box::new(a), Box::new(self.dnf(*b)?))
            }
            Term::Foldr(f, e, l) => {
                let l = self.deep(*l)?;
                let f = self.dnf(*f)?;
                Term::Foldr(Box::new(f), Box::new(self.dnf(*e)?), Box::new(l))
            }
            Term::Cons(h, tl) => {
                let h = self.dnf(*h)?;
                Term::Cons(Box::new(h), Box::new(self.dnf(*tl)?))
            }
            leaf => leaf,
        })
    }
}
