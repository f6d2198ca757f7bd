//! Minimal canonical forms and the decision procedures for single-pass and
//! structural congruence.

use std::fmt;

use serde::Serialize;

use crate::spi::{agreement_bound, CanonSpi};
use crate::syntax::Instruction;
use crate::thread::Observation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Spc,
    Sc,
    Thread,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Spc => "spc",
            Relation::Sc => "sc",
            Relation::Thread => "thread",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// 1-based position where the SPIs differ; `None` means the SPI has ended.
    Position {
        index: usize,
        left: Option<Instruction>,
        right: Option<Instruction>,
    },
    NormalForms {
        left: CanonSpi,
        right: CanonSpi,
    },
    /// Replies leading both threads to states with different observations.
    Replies {
        replies: Vec<bool>,
        left: Observation,
        right: Observation,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |i: &Option<Instruction>| i.as_ref().map_or("<end>".to_string(), |i| i.to_string());
        match self {
            Witness::Position { index, left, right } => {
                write!(f, "position {index}: {} vs {}", show(left), show(right))
            }
            Witness::NormalForms { left, right } => write!(f, "normal forms {left} vs {right}"),
            Witness::Replies { replies, left, right } => {
                let path: Vec<&str> = replies.iter().map(|r| if *r { "true" } else { "false" }).collect();
                write!(f, "replies [{}]: {left} vs {right}", path.join(","))
            }
        }
    }
}

/// Result of an equivalence query. `witness` is present iff `equal` is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub equal: bool,
    pub relation: Relation,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub(crate) fn equal(relation: Relation) -> Verdict {
        Verdict { equal: true, relation, witness: None }
    }

    pub(crate) fn differ(relation: Relation, witness: Witness) -> Verdict {
        Verdict { equal: false, relation, witness: Some(witness) }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "equal ({})", self.relation),
            Some(w) => write!(f, "not equal ({}): {w}", self.relation),
        }
    }
}

/// Length of the shortest word `w` with `word = w^m`.
fn primitive_root_len(word: &[Instruction]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| word[i] == word[i - d]))
        .unwrap_or(n)
}

/// Unique minimal first canonical form: primitive period, and a preperiod
/// whose last instruction differs from the period's last.
pub fn minimize_first(c: &CanonSpi) -> CanonSpi {
    let Some(period) = c.period() else {
        return c.clone();
    };
    let mut period = period[..primitive_root_len(period)].to_vec();
    let mut pre = c.preperiod().to_vec();
    while !pre.is_empty() && pre.last() == period.last() {
        pre.pop();
        period.rotate_right(1);
    }
    CanonSpi::from_parts(pre, Some(period))
}

enum Target {
    Deadlock,
    At(usize),
}

/// Positional view used for jump resolution.
struct Layout<'a> {
    spi: &'a CanonSpi,
    word: Vec<&'a Instruction>,
    k: usize,
    n: usize,
}

impl<'a> Layout<'a> {
    fn new(spi: &'a CanonSpi) -> Self {
        let word: Vec<_> = spi.preperiod().iter().chain(spi.period().unwrap_or(&[])).collect();
        Layout { spi, word, k: spi.preperiod().len(), n: spi.period().map_or(0, <[_]>::len) }
    }

    fn advance(&self, t: usize, c: usize) -> usize {
        self.spi.advance(t, c)
    }

    fn resolve_periodic(&self, from: usize, counter: usize) -> Target {
        let mut visited = vec![false; self.word.len()];
        visited[from] = true;
        let mut t = self.advance(from, counter);
        loop {
            match self.word[t] {
                Instruction::Jump(0) => return Target::Deadlock,
                Instruction::Jump(c) => {
                    if visited[t] {
                        return Target::Deadlock;
                    }
                    visited[t] = true;
                    t = self.advance(t, *c);
                }
                _ => return Target::At(t),
            }
        }
    }

    /// Chain resolution in a finite word. Jumps past the end accumulate and
    /// stay out of range.
    fn resolve_finite(&self, from: usize, counter: usize) -> Instruction {
        let mut t = from.saturating_add(counter);
        while t < self.word.len() {
            match self.word[t] {
                Instruction::Jump(0) => return Instruction::Jump(0),
                Instruction::Jump(c) => t = t.saturating_add(*c),
                _ => break,
            }
        }
        Instruction::Jump(t - from)
    }
}

/// Second canonical form at the same shape: jump chains resolved, and jumps
/// into the period given their least counter.
pub fn second_canonical(c: &CanonSpi) -> CanonSpi {
    let layout = Layout::new(c);
    let rewritten: Vec<Instruction> = layout
        .word
        .iter()
        .enumerate()
        .map(|(i, inst)| match inst {
            Instruction::Jump(m) if *m > 0 => {
                if c.is_finite() {
                    return layout.resolve_finite(i, *m);
                }
                match layout.resolve_periodic(i, *m) {
                    Target::Deadlock => Instruction::Jump(0),
                    // folded targets already lie in the first copy of the period
                    Target::At(t) if i < layout.k => Instruction::Jump(t - i),
                    Target::At(t) => {
                        let n = layout.n as isize;
                        Instruction::Jump((t as isize - i as isize).rem_euclid(n) as usize)
                    }
                }
            }
            inst => (*inst).clone(),
        })
        .collect();
    if c.is_finite() {
        CanonSpi::from_parts(rewritten, None)
    } else {
        let mut pre = rewritten;
        let period = pre.split_off(layout.k);
        CanonSpi::from_parts(pre, Some(period))
    }
}

/// Unique minimal second canonical form.
pub fn minimize_second(c: &CanonSpi) -> CanonSpi {
    let mut current = minimize_first(c);
    loop {
        let next = minimize_first(&second_canonical(&current));
        if next == current {
            return current;
        }
        current = next;
    }
}

fn first_difference(a: &CanonSpi, b: &CanonSpi) -> Option<usize> {
    let finite_len = |c: &CanonSpi| c.is_finite().then(|| c.preperiod().len() + 1);
    let bound = agreement_bound(a, b)
        .max(finite_len(a).unwrap_or(0))
        .max(finite_len(b).unwrap_or(0));
    (0..bound).find(|&i| a.at(i) != b.at(i))
}

pub fn decide_spc(a: &CanonSpi, b: &CanonSpi) -> Verdict {
    if minimize_first(a) == minimize_first(b) {
        return Verdict::equal(Relation::Spc);
    }
    let i = first_difference(a, b).expect("distinct minimal forms denote distinct SPIs");
    Verdict::differ(
        Relation::Spc,
        Witness::Position { index: i + 1, left: a.at(i).cloned(), right: b.at(i).cloned() },
    )
}

pub fn decide_sc(a: &CanonSpi, b: &CanonSpi) -> Verdict {
    let (left, right) = (minimize_second(a), minimize_second(b));
    if left == right {
        Verdict::equal(Relation::Sc)
    } else {
        Verdict::differ(Relation::Sc, Witness::NormalForms { left, right })
    }
}
