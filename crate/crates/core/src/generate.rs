//! Type-directed random generation of closed, well-typed terms.
//!
//! A type is drawn first, then a term of that type is grown from the root:
//! each hole picks among the constructors compatible with its type, which
//! are the introduction forms of the type, a variable in scope of that type,
//! and the eliminations `App`, `ite` and `foldr`. Eliminations draw the
//! type they need but cannot see (the argument type of an application, the
//! element type of a folded list) from the type sampler. At the depth limit
//! only leaves are allowed; a hole that cannot be filled makes its parent
//! try another constructor.

use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{Term, Var};
use crate::tokens::TokenMode;
use crate::types::Ty;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypeWeights {
    pub unit: f64,
    pub bool: f64,
    pub list: f64,
    pub arrow: f64,
}

impl Default for TypeWeights {
    fn default() -> Self {
        TypeWeights {
            unit: 1.0,
            // Bool terms collide more often under dedup; this keeps Bool
            // the most frequent accepted type.
            bool: 1.4,
            list: 1.0,
            arrow: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermWeights {
    /// Weight of "use a variable in scope", shared by all matching variables.
    pub var: f64,
    pub unit: f64,
    pub true_: f64,
    pub false_: f64,
    pub nil: f64,
    pub cons: f64,
    pub lam: f64,
    pub app: f64,
    pub ite: f64,
    pub foldr: f64,
}

impl Default for TermWeights {
    fn default() -> Self {
        TermWeights {
            var: 1.0,
            unit: 1.0,
            true_: 1.0,
            false_: 1.0,
            nil: 1.0,
            cons: 1.0,
            lam: 1.0,
            app: 1.0,
            ite: 1.0,
            foldr: 1.0,
        }
    }
}

/// Generation and filtering parameters, loadable from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub max_type_depth: usize,
    pub max_term_depth: usize,
    /// Depth cap for types drawn by eliminations.
    pub aux_type_depth: usize,
    pub type_weights: TypeWeights,
    pub term_weights: TermWeights,
    pub max_input_tokens: usize,
    pub max_output_tokens: usize,
    /// Reduction step ceiling per reduction run.
    pub fuel: u64,
    /// Constructor attempts allowed per term before giving up.
    pub node_budget: usize,
    pub token_counter: TokenMode,
    pub vocab_path: Option<PathBuf>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_type_depth: 4,
            max_term_depth: 5,
            aux_type_depth: 2,
            type_weights: TypeWeights::default(),
            term_weights: TermWeights::default(),
            max_input_tokens: 512,
            max_output_tokens: 256,
            fuel: crate::reduce::DEFAULT_FUEL,
            node_budget: 2_000,
            token_counter: TokenMode::Whitespace,
            vocab_path: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("weight `{0}` must be strictly positive")]
    NonPositiveWeight(&'static str),
    #[error("`{0}` must be at least 1")]
    ZeroLimit(&'static str),
    #[error("token_counter = \"vocab\" requires vocab_path")]
    MissingVocab,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let tw = &self.type_weights;
        let mw = &self.term_weights;
        let weights = [
            ("type_weights.unit", tw.unit),
            ("type_weights.bool", tw.bool),
            ("type_weights.list", tw.list),
            ("type_weights.arrow", tw.arrow),
            ("term_weights.var", mw.var),
            ("term_weights.unit", mw.unit),
            ("term_weights.true_", mw.true_),
            ("term_weights.false_", mw.false_),
            ("term_weights.nil", mw.nil),
            ("term_weights.cons", mw.cons),
            ("term_weights.lam", mw.lam),
            ("term_weights.app", mw.app),
            ("term_weights.ite", mw.ite),
            ("term_weights.foldr", mw.foldr),
        ];
        for (name, w) in weights {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ConfigError::NonPositiveWeight(name));
            }
        }
        let limits = [
            ("max_type_depth", self.max_type_depth),
            ("max_term_depth", self.max_term_depth),
            ("aux_type_depth", self.aux_type_depth),
            ("max_input_tokens", self.max_input_tokens),
            ("max_output_tokens", self.max_output_tokens),
            ("node_budget", self.node_budget),
        ];
        for (name, v) in limits {
            if v == 0 {
                return Err(ConfigError::ZeroLimit(name));
            }
        }
        if self.token_counter == TokenMode::Vocab && self.vocab_path.is_none() {
            return Err(ConfigError::MissingVocab);
        }
        Ok(())
    }

    /// The RNG stream for example `index`; independent of worker scheduling.
    pub fn rng_for(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no term of the requested type fits within the depth and budget limits")]
pub struct GenerationFailure;

/// Draws a type of depth at most `cfg.max_type_depth`.
pub fn generate_type<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Ty {
    sample_type(cfg.max_type_depth, &cfg.type_weights, rng)
}

fn sample_type<R: Rng + ?Sized>(depth: usize, w: &TypeWeights, rng: &mut R) -> Ty {
    if depth <= 1 {
        let p_unit = w.unit / (w.unit + w.bool);
        return if rng.random_bool(p_unit) { Ty::Unit } else { Ty::Bool };
    }
    let dist = WeightedIndex::new([w.unit, w.bool, w.list, w.arrow]).expect("validated weights");
    match dist.sample(rng) {
        0 => Ty::Unit,
        1 => Ty::Bool,
        2 => Ty::list(sample_type(depth - 1, w, rng)),
        _ => Ty::arrow(sample_type(depth - 1, w, rng), sample_type(depth - 1, w, rng)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Choice {
    Var,
    Unit,
    True,
    False,
    Nil,
    Cons,
    Lam,
    App,
    Ite,
    Foldr,
}

/// Generates a closed, fully annotated term of type `ty`.
///
/// Binder indices are unique within the term but not yet in preorder; pass
/// the result through [`crate::term::rename_vr`] for the canonical numbering.
pub fn generate_term<R: Rng + ?Sized>(
    ty: &Ty,
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<Term, GenerationFailure> {
    let mut g = Generator {
        cfg,
        rng,
        env: Vec::new(),
        next_var: 0,
        budget: cfg.node_budget,
    };
    g.term(ty, 1).ok_or(GenerationFailure)
}

struct Generator<'a, R: ?Sized> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
    env: Vec<(Var, Ty)>,
    next_var: u32,
    budget: usize,
}

impl<R: Rng + ?Sized> Generator<'_, R> {
    fn weight(&self, c: Choice) -> f64 {
        let w = &self.cfg.term_weights;
        match c {
            Choice::Var => w.var,
            Choice::Unit => w.unit,
            Choice::True => w.true_,
            Choice::False => w.false_,
            Choice::Nil => w.nil,
            Choice::Cons => w.cons,
            Choice::Lam => w.lam,
            Choice::App => w.app,
            Choice::Ite => w.ite,
            Choice::Foldr => w.foldr,
        }
    }

    fn candidates(&self, ty: &Ty, leaf_only: bool) -> Vec<Choice> {
        let mut out = Vec::new();
        if self.env.iter().any(|(_, t)| t == ty) {
            out.push(Choice::Var);
        }
        match ty {
            Ty::Unit => out.push(Choice::Unit),
            Ty::Bool => out.extend([Choice::True, Choice::False]),
            Ty::List(_) => {
                out.push(Choice::Nil);
                if !leaf_only {
                    out.push(Choice::Cons);
                }
            }
            Ty::Arrow(..) if !leaf_only => out.push(Choice::Lam),
            Ty::Arrow(..) => {}
        }
        if !leaf_only {
            out.extend([Choice::App, Choice::Ite, Choice::Foldr]);
        }
        out
    }

    fn term(&mut self, ty: &Ty, level: usize) -> Option<Term> {
        let leaf_only = level >= self.cfg.max_term_depth;
        let mut choices = self.candidates(ty, leaf_only);
        while !choices.is_empty() {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            let weights: Vec<f64> = choices.iter().map(|c| self.weight(*c)).collect();
            let pick = WeightedIndex::new(&weights)
                .expect("validated weights")
                .sample(self.rng);
            let choice = choices.swap_remove(pick);
            if let Some(t) = self.build(choice, ty, level) {
                return Some(t);
            }
        }
        None
    }

    fn fresh(&mut self) -> Var {
        let x = Var(self.next_var);
        self.next_var += 1;
        x
    }

    fn aux_type(&mut self) -> Ty {
        sample_type(self.cfg.aux_type_depth, &self.cfg.type_weights, self.rng)
    }

    fn build(&mut self, choice: Choice, ty: &Ty, level: usize) -> Option<Term> {
        let next = level + 1;
        let b = Box::new;
        match choice {
            Choice::Var => {
                let matching: Vec<Var> = self
                    .env
                    .iter()
                    .filter(|(_, t)| t == ty)
                    .map(|(x, _)| *x)
                    .collect();
                let x = matching[self.rng.random_range(0..matching.len())];
                Some(Term::Var(x))
            }
            Choice::Unit => Some(Term::Unit),
            Choice::True => Some(Term::True),
            Choice::False => Some(Term::False),
            Choice::Nil => match ty {
                Ty::List(elem) => Some(Term::Nil(Some((**elem).clone()))),
                _ => None,
            },
            Choice::Cons => {
                let Ty::List(elem) = ty else { return None };
                let h = self.term(elem, next)?;
                let t = self.term(ty, next)?;
                Some(Term::Cons(b(h), b(t)))
            }
            Choice::Lam => {
                let Ty::Arrow(dom, cod) = ty else { return None };
                let x = self.fresh();
                self.env.push((x, (**dom).clone()));
                let body = self.term(cod, next);
                self.env.pop();
                Some(Term::Lam(x, Some((**dom).clone()), b(body?)))
            }
            Choice::App => {
                let arg_ty = self.aux_type();
                let f = self.term(&Ty::arrow(arg_ty.clone(), ty.clone()), next)?;
                let a = self.term(&arg_ty, next)?;
                Some(Term::App(b(f), b(a)))
            }
            Choice::Ite => {
                let c = self.term(&Ty::Bool, next)?;
                let t = self.term(ty, next)?;
                let e = self.term(ty, next)?;
                Some(Term::Ite(b(c), b(t), b(e)))
            }
            Choice::Foldr => {
                let elem = self.aux_type();
                let step_ty = Ty::arrow(elem.clone(), Ty::arrow(ty.clone(), ty.clone()));
                let f = self.term(&step_ty, next)?;
                let e = self.term(ty, next)?;
                let l = self.term(&Ty::list(elem), next)?;
                Some(Term::Foldr(b(f), b(e), b(l)))
            }
        }
    }
}
