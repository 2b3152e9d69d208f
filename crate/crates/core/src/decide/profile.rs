//! Cell profiles: an atom-count class up to a granularity plus an ideal flag.

use std::fmt;

use serde::Serialize;

/// Atom count of a cell, exact below the granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CountClass {
    Exact(u32),
    /// At least `granularity` atoms.
    AtLeast(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IdealFlag {
    In,
    Out,
}

/// Profile of one minterm cell. `ideal` is `None` in runs without the ideal
/// predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CellProfile {
    pub count: CountClass,
    pub ideal: Option<IdealFlag>,
}

impl CellProfile {
    pub fn exact(k: u32) -> Self {
        CellProfile {
            count: CountClass::Exact(k),
            ideal: Some(IdealFlag::In),
        }
    }

    pub fn at_least_in(g: u32) -> Self {
        CellProfile {
            count: CountClass::AtLeast(g),
            ideal: Some(IdealFlag::In),
        }
    }

    pub fn out(g: u32) -> Self {
        CellProfile {
            count: CountClass::AtLeast(g),
            ideal: Some(IdealFlag::Out),
        }
    }

    pub fn is_out(&self) -> bool {
        self.ideal == Some(IdealFlag::Out)
    }

    /// Out implies AtLeast, and Exact counts stay below the granularity.
    pub fn is_consistent(&self, g: u32) -> bool {
        match self.count {
            CountClass::Exact(k) => k < g && self.ideal != Some(IdealFlag::Out),
            CountClass::AtLeast(t) => t == g,
        }
    }

    /// Compact code at granularity `g`: `k` for Exact(k), `g` for AtLeast
    /// inside the ideal (or without ideal), `g + 1` for Out.
    pub fn code(&self, g: u32) -> u16 {
        match (self.count, self.ideal) {
            (CountClass::Exact(k), _) => k as u16,
            (CountClass::AtLeast(_), Some(IdealFlag::Out)) => g as u16 + 1,
            (CountClass::AtLeast(_), _) => g as u16,
        }
    }

    pub fn from_code(code: u16, g: u32, ideal: bool) -> Self {
        let flag = |f| if ideal { Some(f) } else { None };
        let c = code as u32;
        if c < g {
            CellProfile {
                count: CountClass::Exact(c),
                ideal: flag(IdealFlag::In),
            }
        } else if c == g {
            CellProfile {
                count: CountClass::AtLeast(g),
                ideal: flag(IdealFlag::In),
            }
        } else {
            CellProfile::out(g)
        }
    }
}

impl fmt::Display for CellProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.count {
            CountClass::Exact(k) => write!(f, "={k}")?,
            CountClass::AtLeast(g) => write!(f, ">={g}")?,
        }
        match self.ideal {
            Some(IdealFlag::In) => write!(f, " In"),
            Some(IdealFlag::Out) => write!(f, " Out"),
            None => Ok(()),
        }
    }
}

/// All profiles at granularity `g`, in code order.
pub fn all_profiles(g: u32, ideal: bool) -> Vec<CellProfile> {
    let top = if ideal { g + 1 } else { g };
    (0..=top)
        .map(|c| CellProfile::from_code(c as u16, g, ideal))
        .collect()
}

/// Whether every element with profile `parent` (granularity `2t`) splits
/// into two disjoint parts with profiles `part1` and `part2` (granularity
/// `t`), in every model of the theory.
pub fn split_realizable_at(t: u32, parent: CellProfile, part1: CellProfile, part2: CellProfile) -> bool {
    if !parent.is_consistent(2 * t) || !part1.is_consistent(t) || !part2.is_consistent(t) {
        return false;
    }
    let flags = [parent.ideal.is_some(), part1.ideal.is_some(), part2.ideal.is_some()];
    if flags.iter().any(|&f| f != flags[0]) {
        return false;
    }
    use CountClass::*;
    if parent.is_out() {
        // The join of two ideal parts is ideal; every other combination is
        // realized by peeling finitely many atoms or by the Main Axiom.
        return part1.is_out() || part2.is_out();
    }
    if part1.is_out() || part2.is_out() {
        return false;
    }
    match parent.count {
        Exact(kappa) => match (part1.count, part2.count) {
            (Exact(a), Exact(b)) => a + b == kappa,
            (Exact(a), AtLeast(_)) | (AtLeast(_), Exact(a)) => kappa >= a && kappa - a >= t,
            (AtLeast(_), AtLeast(_)) => kappa >= 2 * t,
        },
        AtLeast(_) => !matches!((part1.count, part2.count), (Exact(_), Exact(_))),
    }
}

/// [`split_realizable_at`] with the part granularity read off the parent
/// (`AtLeast(2t)`) or a part (`AtLeast(t)`); two exact parts need no
/// granularity beyond their own values.
pub fn split_realizable(parent: CellProfile, part1: CellProfile, part2: CellProfile) -> bool {
    let t = match (parent.count, part1.count, part2.count) {
        (CountClass::AtLeast(g), _, _) if g % 2 == 0 => g / 2,
        (CountClass::AtLeast(_), _, _) => return false,
        (_, CountClass::AtLeast(t), _) | (_, _, CountClass::AtLeast(t)) => t,
        (CountClass::Exact(k), CountClass::Exact(a), CountClass::Exact(b)) => {
            // Any part granularity above both parts and at least half the parent.
            a.max(b).max(k.div_ceil(2)) + 1
        }
    };
    split_realizable_at(t, parent, part1, part2)
}

/// Split options for each parent code at granularity `2t`, as pairs of part
/// codes at granularity `t`, obtained by filtering all pairs through the
/// table.
pub(crate) fn split_table(t: u32, ideal: bool) -> Vec<Vec<(u16, u16)>> {
    let parts = all_profiles(t, ideal);
    all_profiles(2 * t, ideal)
        .into_iter()
        .map(|p| {
            let mut opts = Vec::new();
            for a in &parts {
                for b in &parts {
                    if split_realizable_at(t, p, *a, *b) {
                        opts.push((a.code(t), b.code(t)));
                    }
                }
            }
            opts
        })
        .collect()
}
