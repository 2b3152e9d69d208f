//! Stratification inference by weighted union-find over difference
//! constraints: `x in y` demands `level(y) = level(x) + 1`, `x = y` demands
//! equal levels.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StratificationError {
    #[error("symbol `{0}` cannot occur in a stratified formula (SET or CLASS signature expected)")]
    Signature(String),
    #[error("stratification constraints need variable arguments, found `{0}`")]
    NonVariable(String),
}

/// Levels of every variable, canonically shifted so that each constraint
/// component has minimum level 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelAssignment {
    pub levels: BTreeMap<String, u32>,
    #[serde(rename = "componentCount")]
    pub component_count: usize,
    /// Constraint-connected components, each listed by variable name.
    #[serde(skip)]
    pub components: Vec<Vec<String>>,
}

impl LevelAssignment {
    pub fn level(&self, v: &str) -> Option<u32> {
        self.levels.get(v).copied()
    }

    /// Number of levels used: one more than the largest level.
    pub fn span(&self) -> u32 {
        self.levels.values().max().map_or(1, |m| m + 1)
    }
}

/// A stratification constraint as it occurs in the formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub left: String,
    pub right: String,
    /// `1` for membership, `0` for equality.
    pub offset: i64,
}

impl Constraint {
    pub fn render(&self) -> String {
        if self.offset == 1 {
            format!("{} in {}", self.left, self.right)
        } else {
            format!("{} = {}", self.left, self.right)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StratificationReport {
    Stratified {
        assignment: LevelAssignment,
        min_levels: u32,
    },
    /// A cycle of atoms whose offsets add up to a nonzero total.
    Unstratified { witness: Vec<Constraint> },
}

impl StratificationReport {
    pub fn is_stratified(&self) -> bool {
        matches!(self, StratificationReport::Stratified { .. })
    }

    pub fn min_levels(&self) -> Option<u32> {
        match self {
            StratificationReport::Stratified { min_levels, .. } => Some(*min_levels),
            StratificationReport::Unstratified { .. } => None,
        }
    }

    pub fn assignment(&self) -> Option<&LevelAssignment> {
        match self {
            StratificationReport::Stratified { assignment, .. } => Some(assignment),
            StratificationReport::Unstratified { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            StratificationReport::Stratified {
                assignment,
                min_levels,
            } => serde_json::json!({
                "status": "Stratified",
                "levels": assignment.levels,
                "minLevels": min_levels,
                "witness": serde_json::Value::Null,
            }),
            StratificationReport::Unstratified { witness } => serde_json::json!({
                "status": "Unstratified",
                "levels": serde_json::Value::Null,
                "minLevels": serde_json::Value::Null,
                "witness": witness.iter().map(Constraint::render).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Extracts the `in`/`=` constraints of `f` in textual order.
pub fn constraints(f: &Formula) -> Result<Vec<Constraint>, StratificationError> {
    let mut out = Vec::new();
    let mut err = None;
    f.visit_atoms(&mut |a| {
        if err.is_some() {
            return;
        }
        let pair = match a {
            Atom::Mem(x, y) => Some((x, y, 1)),
            Atom::Eq(x, y) => Some((x, y, 0)),
            Atom::Set(_) => None,
            other => {
                err = Some(StratificationError::Signature(other.symbol().to_string()));
                None
            }
        };
        if let Some((x, y, offset)) = pair {
            match (x.as_var(), y.as_var()) {
                (Some(l), Some(r)) => out.push(Constraint {
                    left: l.to_string(),
                    right: r.to_string(),
                    offset,
                }),
                _ => {
                    let bad = if x.as_var().is_none() { x } else { y };
                    err = Some(StratificationError::NonVariable(bad.to_string()));
                }
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Union-find whose entries record `level(node) - level(parent)`.
struct Weighted {
    parent: Vec<usize>,
    offset: Vec<i64>,
}

impl Weighted {
    fn new(n: usize) -> Self {
        Weighted {
            parent: (0..n).collect(),
            offset: vec![0; n],
        }
    }

    /// Root of `x` and `level(x) - level(root)`.
    fn find(&mut self, x: usize) -> (usize, i64) {
        if self.parent[x] == x {
            return (x, 0);
        }
        let p = self.parent[x];
        let (root, off) = self.find(p);
        self.parent[x] = root;
        self.offset[x] += off;
        (root, self.offset[x])
    }
}

/// Infers the canonical stratification of a SET or CLASS formula.
pub fn infer_stratification(f: &Formula) -> Result<StratificationReport, StratificationError> {
    let cons = constraints(f)?;
    let vars: Vec<String> = f.all_variables().into_iter().collect();
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut uf = Weighted::new(vars.len());
    // Accepted constraints form a spanning forest used to extract cycles.
    let mut tree: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vars.len()];

    for (ci, c) in cons.iter().enumerate() {
        let (a, b) = (index[c.left.as_str()], index[c.right.as_str()]);
        let (ra, oa) = uf.find(a);
        let (rb, ob) = uf.find(b);
        if ra == rb {
            if ob - oa != c.offset {
                return Ok(StratificationReport::Unstratified {
                    witness: cycle(&cons, &tree, ci, a, b),
                });
            }
            continue;
        }
        // level(b) = level(a) + offset
        uf.parent[rb] = ra;
        uf.offset[rb] = oa + c.offset - ob;
        tree[a].push((b, ci));
        tree[b].push((a, ci));
    }

    let mut rel = vec![0i64; vars.len()];
    let mut root_of = vec![0usize; vars.len()];
    for i in 0..vars.len() {
        let (r, o) = uf.find(i);
        root_of[i] = r;
        rel[i] = o;
    }
    let mut min_of: BTreeMap<usize, i64> = BTreeMap::new();
    let mut max_of: BTreeMap<usize, i64> = BTreeMap::new();
    for i in 0..vars.len() {
        let m = min_of.entry(root_of[i]).or_insert(rel[i]);
        *m = (*m).min(rel[i]);
        let m = max_of.entry(root_of[i]).or_insert(rel[i]);
        *m = (*m).max(rel[i]);
    }
    let levels = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), (rel[i] - min_of[&root_of[i]]) as u32))
        .collect();
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        groups.entry(root_of[i]).or_default().push(v.clone());
    }
    let span = min_of
        .keys()
        .map(|r| max_of[r] - min_of[r])
        .max()
        .unwrap_or(0);
    Ok(StratificationReport::Stratified {
        assignment: LevelAssignment {
            levels,
            component_count: min_of.len(),
            components: groups.into_values().collect(),
        },
        min_levels: span as u32 + 1,
    })
}

/// The tree path from `b` back to `a`, closed by the conflicting constraint.
fn cycle(
    cons: &[Constraint],
    tree: &[Vec<(usize, usize)>],
    closing: usize,
    a: usize,
    b: usize,
) -> Vec<Constraint> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; tree.len()];
    let mut seen = vec![false; tree.len()];
    let mut queue = VecDeque::from([a]);
    seen[a] = true;
    while let Some(n) = queue.pop_front() {
        if n == b {
            break;
        }
        for &(m, ci) in &tree[n] {
            if !seen[m] {
                seen[m] = true;
                prev[m] = Some((n, ci));
                queue.push_back(m);
            }
        }
    }
    let mut path = vec![cons[closing].clone()];
    let mut cur = b;
    while let Some((p, ci)) = prev[cur] {
        path.push(cons[ci].clone());
        cur = p;
    }
    path
}

/// True iff `f` has a stratification into at most `n` levels.
pub fn is_n_stratified(f: &Formula, n: u32) -> Result<bool, StratificationError> {
    Ok(infer_stratification(f)?
        .min_levels()
        .is_some_and(|m| m <= n))
}

/// Checks that `levels` satisfies every constraint of `f`.
pub fn satisfies(f: &Formula, levels: &BTreeMap<String, u32>) -> Result<bool, StratificationError> {
    Ok(constraints(f)?.iter().all(|c| {
        match (levels.get(&c.left), levels.get(&c.right)) {
            (Some(&l), Some(&r)) => r as i64 == l as i64 + c.offset,
            _ => false,
        }
    }))
}

/// Net offset of a witness cycle, walked as an undirected closed path.
pub fn cycle_offset(witness: &[Constraint]) -> Option<i64> {
    let first = witness.first()?;
    // Orient each edge along the walk starting from the first constraint.
    let start = first.left.as_str();
    let mut cur = first.right.as_str();
    let mut total = first.offset;
    for c in &witness[1..] {
        if c.left == cur {
            total += c.offset;
            cur = c.right.as_str();
        } else if c.right == cur {
            total -= c.offset;
            cur = c.left.as_str();
        } else {
            return None;
        }
    }
    (cur == start).then_some(total)
}
