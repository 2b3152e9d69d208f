//! Seeded generation of random closed order sentences.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Atom, Formula, Term};

/// Shape of the generated sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenceConfig {
    /// Maximum quantifier depth and total number of binders.
    pub max_quantifiers: usize,
    /// Largest `k` in `C[k]`; 0 disables `Atm` and `C[k]`.
    pub max_count: u32,
    /// Allow compound terms and the constants `0` and `1`.
    pub terms: bool,
    /// Allow `I`.
    pub ideal: bool,
}

impl SentenceConfig {
    /// Sentences over the full order-with-ideal signature.
    pub fn order_ideal() -> Self {
        SentenceConfig {
            max_quantifiers: 3,
            max_count: 2,
            terms: true,
            ideal: true,
        }
    }

    /// Order sentences whose atoms apply `sub`, `=`, `Atm` and `C[k]` to
    /// variables only.
    pub fn term_free_order() -> Self {
        SentenceConfig {
            max_quantifiers: 3,
            max_count: 2,
            terms: false,
            ideal: false,
        }
    }

    /// Order sentences built from `sub` and `=` between variables.
    pub fn order_relations() -> Self {
        SentenceConfig {
            max_quantifiers: 3,
            max_count: 0,
            terms: false,
            ideal: false,
        }
    }
}

const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

struct Generator<'a> {
    cfg: SentenceConfig,
    rng: &'a mut ChaCha8Rng,
    binders: usize,
}

impl Generator<'_> {
    fn var(&mut self, scope: &[String]) -> Term {
        Term::var(scope.choose(self.rng).expect("scope is nonempty").clone())
    }

    fn term(&mut self, scope: &[String]) -> Term {
        if !self.cfg.terms {
            return self.var(scope);
        }
        match self.rng.gen_range(0..12) {
            0 => Term::Zero,
            1 => Term::One,
            2 => Term::join(self.var(scope), self.var(scope)),
            3 => Term::meet(self.var(scope), self.var(scope)),
            4 => Term::diff(self.var(scope), self.var(scope)),
            5 => Term::comp(self.var(scope)),
            _ => self.var(scope),
        }
    }

    fn atom(&mut self, scope: &[String]) -> Formula {
        let mut kinds = vec![0, 0, 1];
        if self.cfg.max_count > 0 {
            kinds.extend([2, 3]);
        }
        if self.cfg.ideal {
            kinds.extend([4, 4]);
        }
        let a = match *kinds.choose(self.rng).expect("kinds is nonempty") {
            0 => Atom::Leq(self.term(scope), self.term(scope)),
            1 => Atom::Eq(self.term(scope), self.term(scope)),
            2 => Atom::Atm(self.term(scope)),
            3 => Atom::Count(self.rng.gen_range(1..=self.cfg.max_count), self.term(scope)),
            _ => Atom::Ideal(self.term(scope)),
        };
        Formula::Atom(a)
    }

    fn quantifier(&mut self, depth: usize, scope: &[String]) -> Formula {
        let name = NAMES[self.binders].to_string();
        self.binders += 1;
        let mut inner = scope.to_vec();
        inner.push(name.clone());
        let body = self.formula(depth - 1, &inner);
        if self.rng.gen_bool(0.5) {
            Formula::forall(name, body)
        } else {
            Formula::exists(name, body)
        }
    }

    fn formula(&mut self, depth: usize, scope: &[String]) -> Formula {
        let can_bind = depth > 0 && self.binders < self.cfg.max_quantifiers;
        if scope.is_empty() {
            return self.quantifier(depth, scope);
        }
        let roll = self.rng.gen_range(0..100);
        if can_bind && roll < 40 {
            return self.quantifier(depth, scope);
        }
        match roll {
            40..=54 => Formula::not(self.formula(depth, scope)),
            55..=84 => {
                let a = self.formula(depth, scope);
                let b = self.formula(depth, scope);
                match self.rng.gen_range(0..4) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    2 => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                }
            }
            _ => self.atom(scope),
        }
    }
}

/// One random closed sentence.
pub fn random_sentence(cfg: SentenceConfig, rng: &mut ChaCha8Rng) -> Formula {
    let mut g = Generator { cfg, rng, binders: 0 };
    g.formula(cfg.max_quantifiers.min(NAMES.len()), &[])
}

/// `count` sentences from a fixed seed.
pub fn random_corpus(cfg: SentenceConfig, count: usize, seed: u64) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_sentence(cfg, &mut rng)).collect()
}
