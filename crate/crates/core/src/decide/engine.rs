//! Lazy quantifier elimination.
//!
//! The sentence is miniscoped and compiled into a tree whose quantifier nodes
//! each see only the cells of their own free variables. A quantifier node at
//! quantifier depth `d` receives cell profiles at granularity `T0 * 2^d`,
//! enumerates every realizable split of each cell (from the split table) and
//! evaluates its body on the refined cells at granularity `T0 * 2^(d-1)`.
//! Results are memoized per node on the projected, coarsened state, which
//! makes the evaluation equal to eliminating quantifiers innermost-out while
//! only visiting the profile assignments that the search actually reaches.

use std::collections::HashMap;

use crate::formula::{miniscope, Atom, Formula, Term};

use super::profile::split_table;
use super::DecideError;

/// Most variables a single scope may have (cells are tracked in a `u128`).
pub const MAX_SCOPE: usize = 7;

pub(crate) type Mask = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Lit {
    /// Every cell in the mask is empty.
    Empty(Mask),
    /// The cells in the mask hold at least `k` atoms together.
    Count(u32, Mask),
    /// Every cell in the mask lies in the ideal.
    Ideal(Mask),
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Const(bool),
    Lit { lit: Lit, neg: bool },
    And(Vec<usize>),
    Or(Vec<usize>),
    Quant(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Quant {
    exists: bool,
    /// Granularity of the incoming cells.
    g: u32,
    /// Positions, in the enclosing scope, of this node's free variables.
    proj: Vec<usize>,
    body: usize,
    /// Granularity at which the body is evaluated.
    body_g: u32,
    /// `options[cell][code]`: the (with, without) part codes to try.
    options: Vec<Vec<CellOptions>>,
    depth: u32,
}

/// Splits of one cell, those giving the cell wholly to one side first.
#[derive(Debug, Clone)]
pub(crate) struct CellOptions {
    splits: Vec<(u16, u16)>,
    /// Number of leading splits with an empty side.
    pure: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub(crate) nodes: Vec<Node>,
    quants: Vec<Quant>,
    root: usize,
    root_g: u32,
    pub(crate) ideal: bool,
}

/// Cell masks of each scope variable: bit `c` is set when cell `c` lies
/// inside the variable.
fn var_mask(i: usize, width: usize) -> Mask {
    (0..1usize << width)
        .filter(|c| c >> i & 1 == 1)
        .fold(0, |m, c| m | 1 << c)
}

fn all_mask(width: usize) -> Mask {
    if width == MAX_SCOPE {
        Mask::MAX
    } else {
        (1 << (1usize << width)) - 1
    }
}

pub(crate) fn term_mask(t: &Term, scope: &[String]) -> Result<Mask, DecideError> {
    let w = scope.len();
    Ok(match t {
        Term::Var(v) => {
            let i = scope
                .iter()
                .position(|s| s == v)
                .ok_or_else(|| DecideError::FreeVariable(v.clone()))?;
            var_mask(i, w)
        }
        Term::Zero => 0,
        Term::One => all_mask(w),
        Term::Join(a, b) => term_mask(a, scope)? | term_mask(b, scope)?,
        Term::Meet(a, b) => term_mask(a, scope)? & term_mask(b, scope)?,
        Term::Diff(a, b) => term_mask(a, scope)? & !term_mask(b, scope)?,
        Term::Comp(a) => all_mask(w) & !term_mask(a, scope)?,
    })
}

pub(crate) struct Builder {
    pub(crate) nodes: Vec<Node>,
    quants: Vec<Quant>,
    ideal: bool,
    t0: u32,
    tables: HashMap<u32, Vec<Vec<(u16, u16)>>>,
}

impl Builder {
    pub(crate) fn new(ideal: bool, t0: u32) -> Self {
        Builder {
            nodes: Vec::new(),
            quants: Vec::new(),
            ideal,
            t0,
            tables: HashMap::new(),
        }
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn lit(&mut self, lit: Lit, neg: bool) -> usize {
        let value = match lit {
            Lit::Empty(0) | Lit::Ideal(0) => Some(true),
            Lit::Count(_, 0) => Some(false),
            _ => None,
        };
        match value {
            Some(v) => self.push(Node::Const(v != neg)),
            None => self.push(Node::Lit { lit, neg }),
        }
    }

    fn junction(&mut self, conj: bool, parts: Vec<usize>) -> usize {
        let mut kept = Vec::new();
        for p in parts {
            match &self.nodes[p] {
                Node::Const(v) if *v == conj => {}
                Node::Const(_) => return self.push(Node::Const(!conj)),
                Node::And(ch) if conj => kept.extend(ch.clone()),
                Node::Or(ch) if !conj => kept.extend(ch.clone()),
                _ => kept.push(p),
            }
        }
        match kept.len() {
            0 => self.push(Node::Const(conj)),
            1 => kept[0],
            _ => {
                kept.sort_by_key(|&i| self.cost(i));
                self.push(if conj { Node::And(kept) } else { Node::Or(kept) })
            }
        }
    }

    fn cost(&self, i: usize) -> (u32, u32) {
        match &self.nodes[i] {
            Node::Const(_) => (0, 0),
            Node::Lit { .. } => (1, 0),
            Node::And(_) | Node::Or(_) => (2, 0),
            Node::Quant(q) => (3, self.quants[*q].depth * 16 + self.quants[*q].proj.len() as u32),
        }
    }

    /// Compiles an atom or negated atom of an NNF formula.
    pub(crate) fn atom(&mut self, a: &Atom, neg: bool, scope: &[String]) -> Result<usize, DecideError> {
        Ok(match a {
            Atom::Leq(x, y) => {
                let m = term_mask(x, scope)? & !term_mask(y, scope)?;
                self.lit(Lit::Empty(m), neg)
            }
            Atom::Eq(x, y) => {
                let m = term_mask(x, scope)? ^ term_mask(y, scope)?;
                self.lit(Lit::Empty(m), neg)
            }
            Atom::Count(k, t) => {
                let m = term_mask(t, scope)?;
                self.lit(Lit::Count(*k, m), neg)
            }
            Atom::Atm(t) => {
                let m = term_mask(t, scope)?;
                let one = self.lit(Lit::Count(1, m), neg);
                let two = self.lit(Lit::Count(2, m), !neg);
                self.junction(!neg, vec![one, two])
            }
            Atom::Ideal(t) => {
                if !self.ideal {
                    return Err(DecideError::Signature("I".into()));
                }
                let m = term_mask(t, scope)?;
                self.lit(Lit::Ideal(m), neg)
            }
            Atom::Mem(..) | Atom::Set(_) => return Err(DecideError::Signature(a.symbol().into())),
        })
    }

    /// Compiles an NNF formula in the given scope.
    pub(crate) fn formula(&mut self, f: &Formula, scope: &[String]) -> Result<usize, DecideError> {
        match f {
            Formula::Atom(a) => self.atom(a, false, scope),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => self.atom(a, true, scope),
                _ => Err(DecideError::Internal("formula is not in negation normal form".into())),
            },
            Formula::And(a, b) | Formula::Or(a, b) => {
                let x = self.formula(a, scope)?;
                let y = self.formula(b, scope)?;
                Ok(self.junction(matches!(f, Formula::And(..)), vec![x, y]))
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let free = f.free_variables();
                let proj: Vec<usize> = (0..scope.len()).filter(|&i| free.contains(&scope[i])).collect();
                let mut inner: Vec<String> = proj.iter().map(|&i| scope[i].clone()).collect();
                inner.push(v.clone());
                if inner.len() > MAX_SCOPE {
                    return Err(DecideError::Resource(format!(
                        "more than {MAX_SCOPE} variables in one scope"
                    )));
                }
                let depth = f.quantifier_depth() as u32;
                let body = self.formula(body, &inner)?;
                let exists = matches!(f, Formula::Exists(..));
                if let Node::Const(v) = self.nodes[body] {
                    return Ok(self.push(Node::Const(v)));
                }
                let g = self.t0 << depth;
                let body_g = self.needed(body).max(1);
                let options = self.options(g, body_g, proj.len(), body, exists);
                self.quants.push(Quant {
                    exists,
                    g,
                    proj,
                    body,
                    body_g,
                    options,
                    depth,
                });
                Ok(self.push(Node::Quant(self.quants.len() - 1)))
            }
            Formula::Implies(..) | Formula::Iff(..) => {
                Err(DecideError::Internal("formula is not in negation normal form".into()))
            }
        }
    }

    /// Smallest granularity at which the value of `node` is determined.
    fn needed(&self, node: usize) -> u32 {
        match &self.nodes[node] {
            Node::Const(_) => 1,
            Node::Lit { lit: Lit::Count(k, _), .. } => *k,
            Node::Lit { .. } => 1,
            Node::And(ch) | Node::Or(ch) => ch.iter().map(|&c| self.needed(c)).max().unwrap_or(1),
            Node::Quant(q) => self.quants[*q].g,
        }
    }

    /// Literals that any relevant split must satisfy: positive conjuncts of an
    /// existential body, negated disjuncts of a universal one. Returns per new
    /// cell the largest useful part code and whether the part must lie in the
    /// ideal.
    fn requirements(&self, body: usize, exists: bool, cells: usize, body_g: u32) -> Vec<(u16, bool)> {
        let mut req = vec![(u16::MAX, false); cells];
        let parts: Vec<usize> = match &self.nodes[body] {
            Node::And(ch) if exists => ch.clone(),
            Node::Or(ch) if !exists => ch.clone(),
            _ => vec![body],
        };
        for p in parts {
            let Node::Lit { lit, neg } = self.nodes[p] else {
                continue;
            };
            // The literal's atom must hold when `holds`, and fail otherwise.
            let holds = neg != exists;
            for (c, r) in req.iter_mut().enumerate() {
                match lit {
                    Lit::Empty(m) if holds && m >> c & 1 == 1 => r.0 = 0,
                    Lit::Ideal(m) if holds && m >> c & 1 == 1 => r.1 = true,
                    Lit::Count(k, m) if !holds && m >> c & 1 == 1 => {
                        r.0 = r.0.min((k.min(body_g) - 1) as u16);
                    }
                    _ => {}
                }
            }
        }
        req
    }

    fn options(&mut self, g: u32, body_g: u32, width: usize, body: usize, exists: bool) -> Vec<Vec<CellOptions>> {
        let t = g / 2;
        let ideal = self.ideal;
        let table = self
            .tables
            .entry(t)
            .or_insert_with(|| split_table(t, ideal))
            .clone();
        let cells = 1usize << width;
        let req = self.requirements(body, exists, cells << 1, body_g);
        let reduce = |code: u16| coarsen(code, t, body_g);
        let ok = |code: u16, (max, inside): (u16, bool)| code <= max && (!inside || u32::from(code) <= body_g);
        (0..cells)
            .map(|c| {
                table
                    .iter()
                    .map(|pairs| {
                        let mut splits: Vec<(u16, u16)> = Vec::new();
                        for &(with, without) in pairs {
                            let pair = (reduce(with), reduce(without));
                            if ok(pair.0, req[c | cells]) && ok(pair.1, req[c]) && !splits.contains(&pair) {
                                splits.push(pair);
                            }
                        }
                        splits.sort_by_key(|&(with, without)| with != 0 && without != 0);
                        let pure = splits.iter().take_while(|&&(w, o)| w == 0 || o == 0).count();
                        CellOptions { splits, pure }
                    })
                    .collect()
            })
            .collect()
    }

    pub(crate) fn finish(self, root: usize) -> Program {
        let root_g = self.needed(root).max(1);
        Program {
            nodes: self.nodes,
            quants: self.quants,
            root,
            root_g,
            ideal: self.ideal,
        }
    }
}

/// Re-expresses a code at granularity `from` at the coarser granularity `to`.
pub(crate) fn coarsen(code: u16, from: u32, to: u32) -> u16 {
    let c = u32::from(code);
    if c < from {
        c.min(to) as u16
    } else if c == from {
        to as u16
    } else {
        to as u16 + 1
    }
}

/// Joins two disjoint cells at granularity `g`.
fn merge(a: u16, b: u16, g: u32) -> u16 {
    let g16 = g as u16;
    if a > g16 || b > g16 {
        g16 + 1
    } else {
        (a + b).min(g16)
    }
}

pub(crate) fn eval_lit(lit: Lit, state: &[u16], g: u32) -> bool {
    let g16 = g as u16;
    let cells = |m: Mask| (0..state.len()).filter(move |&c| m >> c & 1 == 1);
    match lit {
        Lit::Empty(m) => cells(m).all(|c| state[c] == 0),
        Lit::Ideal(m) => cells(m).all(|c| state[c] <= g16),
        Lit::Count(k, m) => {
            let mut sum = 0u32;
            for c in cells(m) {
                if state[c] >= g16 {
                    return true;
                }
                sum += u32::from(state[c]);
            }
            sum >= k
        }
    }
}

/// Search counters reported with each verdict.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub visits: u64,
    pub max_granularity: u32,
}

struct Evaluator<'a> {
    p: &'a Program,
    memo: Vec<HashMap<Vec<u16>, bool>>,
    visits: u64,
    cap: u64,
}

impl Evaluator<'_> {
    fn node(&mut self, n: usize, state: &[u16], g: u32) -> Result<bool, DecideError> {
        match &self.p.nodes[n] {
            Node::Const(v) => Ok(*v),
            Node::Lit { lit, neg } => Ok(eval_lit(*lit, state, g) != *neg),
            Node::And(ch) => {
                for &c in ch {
                    if !self.node(c, state, g)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Node::Or(ch) => {
                for &c in ch {
                    if self.node(c, state, g)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Node::Quant(q) => {
                let quant = &self.p.quants[*q];
                let mut sub = vec![0u16; 1 << quant.proj.len()];
                let mut filled = vec![false; sub.len()];
                for (c, &code) in state.iter().enumerate() {
                    let target = quant
                        .proj
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (j, &i)| acc | (c >> i & 1) << j);
                    sub[target] = if filled[target] {
                        merge(sub[target], code, g)
                    } else {
                        code
                    };
                    filled[target] = true;
                }
                for code in sub.iter_mut() {
                    *code = coarsen(*code, g, quant.g);
                }
                self.quant(*q, sub)
            }
        }
    }

    fn quant(&mut self, q: usize, state: Vec<u16>) -> Result<bool, DecideError> {
        if let Some(&v) = self.memo[q].get(&state) {
            return Ok(v);
        }
        let quant = &self.p.quants[q];
        let opts: Vec<&CellOptions> = (0..state.len())
            .map(|c| &quant.options[c][state[c] as usize])
            .collect();
        let mut result = !quant.exists;
        if opts.iter().all(|o| !o.splits.is_empty()) {
            // Splits along existing cells first, then everything else.
            let pure: Vec<usize> = opts.iter().map(|o| o.pure).collect();
            let full: Vec<usize> = opts.iter().map(|o| o.splits.len()).collect();
            if self.search(q, &opts, &pure, None)? || self.search(q, &opts, &full, Some(&pure))? {
                result = quant.exists;
            }
        }
        self.memo[q].insert(state, result);
        Ok(result)
    }

    /// Enumerates split choices below `limits`, skipping those below `skip`;
    /// true when one decides the quantifier.
    fn search(
        &mut self,
        q: usize,
        opts: &[&CellOptions],
        limits: &[usize],
        skip: Option<&[usize]>,
    ) -> Result<bool, DecideError> {
        let quant = &self.p.quants[q];
        let cells = opts.len();
        if limits.contains(&0) {
            return Ok(false);
        }
        let mut idx = vec![0usize; cells];
        let mut refined = vec![0u16; cells * 2];
        for c in 0..cells {
            (refined[c | cells], refined[c]) = opts[c].splits[0];
        }
        'search: loop {
            let seen = skip.is_some_and(|s| idx.iter().zip(s).all(|(i, n)| i < n));
            if !seen {
                self.visits += 1;
                if self.visits > self.cap {
                    return Err(DecideError::Resource(format!("search exceeded {} visits", self.cap)));
                }
                if self.node(quant.body, &refined, quant.body_g)? == quant.exists {
                    return Ok(true);
                }
            }
            for c in 0..cells {
                idx[c] += 1;
                if idx[c] < limits[c] {
                    (refined[c | cells], refined[c]) = opts[c].splits[idx[c]];
                    continue 'search;
                }
                idx[c] = 0;
                (refined[c | cells], refined[c]) = opts[c].splits[0];
            }
            return Ok(false);
        }
    }
}

/// Compiles a closed formula for lazy evaluation.
pub(crate) fn compile(f: &Formula, ideal: bool, t0: u32) -> Result<Program, DecideError> {
    let g = miniscope(f);
    let mut b = Builder::new(ideal, t0);
    let root = b.formula(&g, &[])?;
    Ok(b.finish(root))
}

/// Evaluates a compiled sentence in the unique completion of the theory: the
/// whole algebra is a single cell with unboundedly many atoms, outside the
/// ideal when the ideal is tracked.
pub(crate) fn run(p: &Program, cap: u64) -> Result<(bool, SearchStats), DecideError> {
    let mut ev = Evaluator {
        p,
        memo: vec![HashMap::new(); p.quants.len()],
        visits: 0,
        cap,
    };
    let top = if p.ideal { p.root_g as u16 + 1 } else { p.root_g as u16 };
    let v = ev.node(p.root, &[top], p.root_g)?;
    let max_granularity = p.quants.iter().map(|q| q.g).max().unwrap_or(p.root_g).max(p.root_g);
    Ok((
        v,
        SearchStats {
            visits: ev.visits,
            max_granularity,
        },
    ))
}
