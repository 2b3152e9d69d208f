//! Eager elimination over fully case-split matrices.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::formula::{nnf, to_prenex_nnf, Formula};

use super::engine::{eval_lit, Builder, Node};
use super::profile::{split_realizable_at, CellProfile};
use super::DecideError;

/// Candidate assignments enumerated by [`normalize_matrix`] before it gives up.
const ENUMERATION_LIMIT: u64 = 50_000_000;

/// A disjunction of total profile assignments to the minterms of
/// `variables`. Minterm `c` contains variable `i` iff bit `i` of `c` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedMatrix {
    pub variables: Vec<String>,
    pub granularity: u32,
    pub ideal: bool,
    pub disjuncts: Vec<Vec<CellProfile>>,
}

impl NormalizedMatrix {
    fn codes(&self) -> BTreeSet<Vec<u16>> {
        self.disjuncts
            .iter()
            .map(|d| d.iter().map(|p| p.code(self.granularity)).collect())
            .collect()
    }

    fn from_codes(variables: Vec<String>, g: u32, ideal: bool, codes: BTreeSet<Vec<u16>>) -> Self {
        NormalizedMatrix {
            variables,
            granularity: g,
            ideal,
            disjuncts: codes
                .into_iter()
                .map(|d| d.into_iter().map(|c| CellProfile::from_code(c, g, ideal)).collect())
                .collect(),
        }
    }

    /// Whether the matrix is the full disjunction of realizable assignments.
    pub fn is_true(&self) -> bool {
        self.codes().len() as u64 == realizable(self.variables.len(), self.granularity, self.ideal, u64::MAX).map_or(0, |r| r.len() as u64)
    }
}

/// Largest code at granularity `g`.
fn top(g: u32, ideal: bool) -> u16 {
    if ideal {
        g as u16 + 1
    } else {
        g as u16
    }
}

/// Assignments to the minterms of `n` variables that can occur in the
/// completion: the minterms partition the top element, so one of them is
/// infinite (and outside the ideal when the ideal is tracked).
fn realizable(n: usize, g: u32, ideal: bool, limit: u64) -> Result<Vec<Vec<u16>>, DecideError> {
    let cells = 1usize << n;
    let t = top(g, ideal);
    let space = (u64::from(t) + 1).checked_pow(cells as u32).unwrap_or(u64::MAX);
    if space > limit {
        return Err(DecideError::Resource(format!(
            "{space} candidate assignments over {n} variables"
        )));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u16; cells];
    loop {
        if cur.contains(&t) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == cells {
                return Ok(out);
            }
            if cur[i] < t {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn eval_qf(nodes: &[Node], n: usize, state: &[u16], g: u32) -> bool {
    match &nodes[n] {
        Node::Const(v) => *v,
        Node::Lit { lit, neg } => eval_lit(*lit, state, g) != *neg,
        Node::And(ch) => ch.iter().all(|&c| eval_qf(nodes, c, state, g)),
        Node::Or(ch) => ch.iter().any(|&c| eval_qf(nodes, c, state, g)),
        Node::Quant(_) => unreachable!("matrix is quantifier-free"),
    }
}

/// Normalizes a quantifier-free formula over `vars` at granularity `g`.
pub fn normalize_matrix(
    matrix: &Formula,
    vars: &[String],
    g: u32,
    ideal: bool,
    disjunct_cap: usize,
) -> Result<NormalizedMatrix, DecideError> {
    if matrix.quantifier_count() > 0 {
        return Err(DecideError::Internal("matrix contains a quantifier".into()));
    }
    let max_c = matrix.max_count_constant();
    if g <= max_c {
        return Err(DecideError::Granularity { granularity: g, constant: max_c });
    }
    if vars.len() > super::engine::MAX_SCOPE {
        return Err(DecideError::Resource(format!("more than {} variables", super::engine::MAX_SCOPE)));
    }
    let mut b = Builder::new(ideal, g);
    let root = b.formula(&nnf(matrix), vars)?;
    let mut kept = BTreeSet::new();
    for d in realizable(vars.len(), g, ideal, ENUMERATION_LIMIT)? {
        if eval_qf(&b.nodes, root, &d, g) {
            kept.insert(d);
            if kept.len() > disjunct_cap {
                return Err(DecideError::Resource(format!("more than {disjunct_cap} disjuncts")));
            }
        }
    }
    Ok(NormalizedMatrix::from_codes(vars.to_vec(), g, ideal, kept))
}

/// Eliminates an existential over the last variable, doubling the granularity.
pub fn eliminate_exists(m: &NormalizedMatrix, disjunct_cap: usize) -> Result<NormalizedMatrix, DecideError> {
    let n = m
        .variables
        .len()
        .checked_sub(1)
        .ok_or_else(|| DecideError::Internal("no variable to eliminate".into()))?;
    let t = m.granularity;
    let g = 2 * t;
    let cells = 1usize << n;
    let parents: Vec<u16> = (0..=top(g, m.ideal)).collect();
    let mut out = BTreeSet::new();
    for d in m.codes() {
        let per_cell: Vec<Vec<u16>> = (0..cells)
            .map(|c| {
                let with = CellProfile::from_code(d[c | cells], t, m.ideal);
                let without = CellProfile::from_code(d[c], t, m.ideal);
                parents
                    .iter()
                    .copied()
                    .filter(|&p| split_realizable_at(t, CellProfile::from_code(p, g, m.ideal), with, without))
                    .collect()
            })
            .collect();
        if per_cell.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; cells];
        loop {
            let assignment: Vec<u16> = (0..cells).map(|c| per_cell[c][idx[c]]).collect();
            if assignment.contains(&top(g, m.ideal)) {
                out.insert(assignment);
                if out.len() > disjunct_cap {
                    return Err(DecideError::Resource(format!("more than {disjunct_cap} disjuncts")));
                }
            }
            let mut c = 0;
            while c < cells {
                idx[c] += 1;
                if idx[c] < per_cell[c].len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
            if c == cells {
                break;
            }
        }
    }
    Ok(NormalizedMatrix::from_codes(m.variables[..n].to_vec(), g, m.ideal, out))
}

fn complement(m: &NormalizedMatrix) -> Result<NormalizedMatrix, DecideError> {
    let have = m.codes();
    let rest = realizable(m.variables.len(), m.granularity, m.ideal, ENUMERATION_LIMIT)?
        .into_iter()
        .filter(|d| !have.contains(d))
        .collect();
    Ok(NormalizedMatrix::from_codes(m.variables.clone(), m.granularity, m.ideal, rest))
}

/// Eliminates a universal over the last variable as `not exists not`.
pub fn eliminate_forall(m: &NormalizedMatrix, disjunct_cap: usize) -> Result<NormalizedMatrix, DecideError> {
    complement(&eliminate_exists(&complement(m)?, disjunct_cap)?)
}

/// Decides a closed sentence by prenexing, normalizing the matrix and
/// eliminating the prefix innermost-out. Returns the verdict and the total
/// number of disjuncts produced.
pub(crate) fn decide_eager(f: &Formula, ideal: bool, t0: u32, disjunct_cap: usize) -> Result<(bool, u64, u32), DecideError> {
    let mut body = to_prenex_nnf(f);
    let mut prefix = Vec::new();
    loop {
        match body {
            Formula::Forall(v, b) => {
                prefix.push((false, v));
                body = *b;
            }
            Formula::Exists(v, b) => {
                prefix.push((true, v));
                body = *b;
            }
            other => {
                body = other;
                break;
            }
        }
    }
    let vars: Vec<String> = prefix.iter().map(|(_, v)| v.clone()).collect();
    let mut m = normalize_matrix(&body, &vars, t0, ideal, disjunct_cap)?;
    let mut total = m.disjuncts.len() as u64;
    for (exists, _) in prefix.iter().rev() {
        m = if *exists {
            eliminate_exists(&m, disjunct_cap)?
        } else {
            eliminate_forall(&m, disjunct_cap)?
        };
        total += m.disjuncts.len() as u64;
    }
    let g = m.granularity;
    Ok((m.codes().contains(&vec![top(g, ideal)]), total, g))
}
