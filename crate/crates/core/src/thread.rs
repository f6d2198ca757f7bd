//! Regular threads: extraction from programs, minimization, behavioral
//! equality, and rendering as recursive equations or DOT graphs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::canonical::{Relation, Verdict, Witness};
use crate::spi::{to_canon_l, CanonSpi, NotInK};
use crate::syntax::{Instruction, LSeq, PgaTerm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ThreadState {
    /// Termination.
    Stop,
    /// Inaction.
    Deadlock,
    /// Perform `action`, continue at `on_true` or `on_false` depending on the reply.
    Post { action: String, on_true: usize, on_false: usize },
}

/// What an observer sees at a state before supplying a reply.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Observation {
    Stop,
    Deadlock,
    Action(String),
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Stop => f.write_str("S"),
            Observation::Deadlock => f.write_str("D"),
            Observation::Action(a) => f.write_str(a),
        }
    }
}

impl ThreadState {
    pub fn observation(&self) -> Observation {
        match self {
            ThreadState::Stop => Observation::Stop,
            ThreadState::Deadlock => Observation::Deadlock,
            ThreadState::Post { action, .. } => Observation::Action(action.clone()),
        }
    }

    fn successors(&self) -> Option<(usize, usize)> {
        match self {
            ThreadState::Post { on_true, on_false, .. } => Some((*on_true, *on_false)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreadError {
    #[error("a thread needs at least one state")]
    NoStates,
    #[error("state {state} refers to missing state {target}")]
    DanglingReference { state: usize, target: usize },
    #[error("root {0} is out of range")]
    BadRoot(usize),
}

/// A finite pointed state system over S, D and postconditional composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularThread {
    states: Vec<ThreadState>,
    root: usize,
}

impl RegularThread {
    pub fn new(states: Vec<ThreadState>, root: usize) -> Result<RegularThread, ThreadError> {
        if states.is_empty() {
            return Err(ThreadError::NoStates);
        }
        if root >= states.len() {
            return Err(ThreadError::BadRoot(root));
        }
        for (i, s) in states.iter().enumerate() {
            if let Some((t, f)) = s.successors() {
                for target in [t, f] {
                    if target >= states.len() {
                        return Err(ThreadError::DanglingReference { state: i, target });
                    }
                }
            }
        }
        Ok(RegularThread { states, root })
    }

    pub fn stop() -> RegularThread {
        RegularThread { states: vec![ThreadState::Stop], root: 0 }
    }

    pub fn deadlock() -> RegularThread {
        RegularThread { states: vec![ThreadState::Deadlock], root: 0 }
    }

    pub fn states(&self) -> &[ThreadState] {
        &self.states
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// States reachable from the root in breadth-first order, true branch first.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            if let Some((t, f)) = self.states[s].successors() {
                for n in [t, f] {
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        order
    }
}

/// Interns states by key while a thread is being built.
struct Builder<K> {
    states: Vec<ThreadState>,
    index: HashMap<K, usize>,
    stop: Option<usize>,
    deadlock: Option<usize>,
}

impl<K: std::hash::Hash + Eq + Clone> Builder<K> {
    fn new() -> Self {
        Builder { states: Vec::new(), index: HashMap::new(), stop: None, deadlock: None }
    }

    fn terminal(&mut self, stop: bool) -> usize {
        let slot = if stop { &mut self.stop } else { &mut self.deadlock };
        if let Some(i) = *slot {
            return i;
        }
        let i = self.states.len();
        *slot = Some(i);
        self.states.push(if stop { ThreadState::Stop } else { ThreadState::Deadlock });
        i
    }
}

/// Where execution ends up after silently following jumps.
enum Settled<K> {
    Stop,
    Deadlock,
    Action { action: String, on_true: K, on_false: K },
}

/// Builds a thread by exploring settled keys from `root`.
fn build<K, F>(root: K, mut settle: F) -> RegularThread
where
    K: std::hash::Hash + Eq + Clone,
    F: FnMut(&K) -> Settled<K>,
{
    let mut b: Builder<K> = Builder::new();
    let mut pending: Vec<(usize, K, K)> = Vec::new();

    let mut intern = |b: &mut Builder<K>, key: K, pending: &mut Vec<(usize, K, K)>| -> usize {
        if let Some(&i) = b.index.get(&key) {
            return i;
        }
        let i = match settle(&key) {
            Settled::Stop => b.terminal(true),
            Settled::Deadlock => b.terminal(false),
            Settled::Action { action, on_true, on_false } => {
                let i = b.states.len();
                b.states.push(ThreadState::Post { action, on_true: usize::MAX, on_false: usize::MAX });
                pending.push((i, on_true, on_false));
                i
            }
        };
        b.index.insert(key, i);
        i
    };

    let root = intern(&mut b, root, &mut pending);
    while let Some((i, t, f)) = pending.pop() {
        let t = intern(&mut b, t, &mut pending);
        let f = intern(&mut b, f, &mut pending);
        if let ThreadState::Post { on_true, on_false, .. } = &mut b.states[i] {
            *on_true = t;
            *on_false = f;
        }
    }
    RegularThread { states: b.states, root }
}

/// Position-indexed thread extraction. Finite programs are read as
/// `u1;..;un;(#0)^w`, so running off the end deadlocks.
pub fn extract(c: &CanonSpi) -> RegularThread {
    let padded;
    let spi = if c.is_finite() {
        padded = CanonSpi::from_parts(c.preperiod().to_vec(), Some(vec![Instruction::Jump(0)]));
        &padded
    } else {
        c
    };
    let total = spi.instruction_count();

    build(0usize, |&start| {
        let mut visited = vec![false; total];
        let mut j = start;
        loop {
            if visited[j] {
                return Settled::Deadlock;
            }
            visited[j] = true;
            let next = |d: usize| spi.advance(j, d);
            match spi.at(j).expect("positions are folded") {
                Instruction::Halt => return Settled::Stop,
                Instruction::Jump(0) => return Settled::Deadlock,
                Instruction::Jump(m) => j = next(*m),
                Instruction::Basic(a) => {
                    return Settled::Action { action: a.clone(), on_true: next(1), on_false: next(1) }
                }
                Instruction::PosTest(a) => {
                    return Settled::Action { action: a.clone(), on_true: next(1), on_false: next(2) }
                }
                Instruction::NegTest(a) => {
                    return Settled::Action { action: a.clone(), on_true: next(2), on_false: next(1) }
                }
                Instruction::Repeat(_) => unreachable!("canonical forms hold no repeaters"),
            }
        }
    })
}

/// Thread extraction on a K-program.
pub fn extract_k(seq: &LSeq) -> Result<RegularThread, NotInK> {
    match to_canon_l(seq) {
        crate::spi::LCanon::Kernel(c) => Ok(extract(&c)),
        crate::spi::LCanon::NotInK(n) => Err(n),
    }
}

/// Pointer identity for subterms, so suffixes of a term can be hashed cheaply.
#[derive(Clone, Copy)]
struct Node<'a>(&'a PgaTerm);

impl PartialEq for Node<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for Node<'_> {}
impl std::hash::Hash for Node<'_> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::ptr::hash(self.0, state)
    }
}

/// A program suffix `#skip;X`, with `skip == 0` meaning plain `X`. The stack
/// lists the factors of `X` with the leftmost on top.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Suffix<'a> {
    skip: usize,
    stack: Vec<Node<'a>>,
}

/// Splits off the first instruction, unfolding `X^w` to `X;X^w`.
fn split_first<'a>(mut stack: Vec<Node<'a>>) -> Option<(&'a Instruction, Vec<Node<'a>>)> {
    while let Some(Node(t)) = stack.pop() {
        match t {
            PgaTerm::Prim(i) => return Some((i, stack)),
            PgaTerm::Concat(l, r) => {
                stack.push(Node(r));
                stack.push(Node(l));
            }
            PgaTerm::Omega(body) => {
                stack.push(Node(t));
                stack.push(Node(body));
            }
        }
    }
    None
}

enum Step<'a> {
    Silent(Suffix<'a>),
    Done(Settled<Suffix<'a>>),
}

fn table_step(s: Suffix<'_>) -> Step<'_> {
    let plain = |stack| Suffix { skip: 0, stack };
    let skip = |n, stack| Suffix { skip: n, stack };
    if s.skip == 1 {
        return if s.stack.is_empty() { Step::Done(Settled::Deadlock) } else { Step::Silent(plain(s.stack)) };
    }
    let Some((u, rest)) = split_first(s.stack) else {
        // |#k| = D
        return Step::Done(Settled::Deadlock);
    };
    if s.skip >= 2 {
        // |#k+2;u| = D and |#k+2;u;X| = |#k+1;X|
        return if rest.is_empty() { Step::Done(Settled::Deadlock) } else { Step::Silent(skip(s.skip - 1, rest)) };
    }
    let last = rest.is_empty();
    match u {
        Instruction::Halt => Step::Done(Settled::Stop),
        Instruction::Jump(0) => Step::Done(Settled::Deadlock),
        Instruction::Jump(_) if last => Step::Done(Settled::Deadlock),
        Instruction::Jump(k) => Step::Silent(skip(*k, rest)),
        Instruction::Basic(a) | Instruction::PosTest(a) | Instruction::NegTest(a) if last => {
            // |a| = |+a| = |-a| = a∘D
            let d = skip(1, Vec::new());
            Step::Done(Settled::Action { action: a.clone(), on_true: d.clone(), on_false: d })
        }
        Instruction::Basic(a) => {
            let next = plain(rest);
            Step::Done(Settled::Action { action: a.clone(), on_true: next.clone(), on_false: next })
        }
        Instruction::PosTest(a) => Step::Done(Settled::Action {
            action: a.clone(),
            on_true: plain(rest.clone()),
            on_false: skip(2, rest),
        }),
        Instruction::NegTest(a) => Step::Done(Settled::Action {
            action: a.clone(),
            on_true: skip(2, rest.clone()),
            on_false: plain(rest),
        }),
        Instruction::Repeat(_) => unreachable!("PGA terms hold no repeaters"),
    }
}

/// Thread extraction straight from a PGA term by the thirteen equations,
/// walking program suffixes instead of positions.
pub fn extract_pga(term: &PgaTerm) -> RegularThread {
    let root = Suffix { skip: 0, stack: vec![Node(term)] };
    build(root, |key| {
        let mut seen = HashSet::new();
        let mut cur = key.clone();
        loop {
            if !seen.insert(cur.clone()) {
                return Settled::Deadlock;
            }
            match table_step(cur) {
                Step::Silent(next) => cur = next,
                Step::Done(settled) => return settled,
            }
        }
    })
}

/// Coarsest bisimulation quotient of the reachable part, numbered in
/// breadth-first order from the root. Bisimilar threads minimize to
/// identical values.
pub fn minimize(t: &RegularThread) -> RegularThread {
    let reach = t.reachable();
    let mut local = vec![usize::MAX; t.states.len()];
    for (i, &s) in reach.iter().enumerate() {
        local[s] = i;
    }

    let relabel = |sigs: Vec<(usize, usize, usize)>| -> (Vec<usize>, usize) {
        let mut ids = HashMap::new();
        let classes = sigs
            .into_iter()
            .map(|sig| {
                let next = ids.len();
                *ids.entry(sig).or_insert(next)
            })
            .collect();
        (classes, ids.len())
    };

    let mut names: HashMap<&str, usize> = HashMap::new();
    let initial = reach
        .iter()
        .map(|&s| match &t.states[s] {
            ThreadState::Stop => (0, 0, 0),
            ThreadState::Deadlock => (1, 0, 0),
            ThreadState::Post { action, .. } => {
                let next = names.len();
                (2, *names.entry(action).or_insert(next), 0)
            }
        })
        .collect();
    let (mut class, mut count) = relabel(initial);
    loop {
        let sigs = reach
            .iter()
            .enumerate()
            .map(|(i, &s)| match t.states[s].successors() {
                Some((tt, ff)) => (class[i], class[local[tt]], class[local[ff]]),
                None => (class[i], usize::MAX, usize::MAX),
            })
            .collect();
        let (next, next_count) = relabel(sigs);
        class = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }

    // representative per class, then renumber from the root
    let mut rep = vec![usize::MAX; count];
    for (i, &s) in reach.iter().enumerate() {
        if rep[class[i]] == usize::MAX {
            rep[class[i]] = s;
        }
    }
    let mut order = vec![usize::MAX; count];
    let mut states = Vec::with_capacity(count);
    let mut queue = VecDeque::from([class[local[t.root]]]);
    order[class[local[t.root]]] = 0;
    let mut seq = vec![class[local[t.root]]];
    while let Some(c) = queue.pop_front() {
        if let Some((tt, ff)) = t.states[rep[c]].successors() {
            for n in [class[local[tt]], class[local[ff]]] {
                if order[n] == usize::MAX {
                    order[n] = seq.len();
                    seq.push(n);
                    queue.push_back(n);
                }
            }
        }
    }
    for &c in &seq {
        states.push(match &t.states[rep[c]] {
            ThreadState::Post { action, on_true, on_false } => ThreadState::Post {
                action: action.clone(),
                on_true: order[class[local[*on_true]]],
                on_false: order[class[local[*on_false]]],
            },
            s => s.clone(),
        });
    }
    RegularThread { states, root: 0 }
}

/// Predecessor pair and the reply taken from it.
type Back = Option<((usize, usize), bool)>;

/// Bisimilarity of the roots. On inequality the witness is a shortest reply
/// sequence after which the two threads show different observations.
pub fn thread_equal(a: &RegularThread, b: &RegularThread) -> Verdict {
    let mut parent: HashMap<(usize, usize), Back> = HashMap::new();
    let start = (a.root, b.root);
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        let (ox, oy) = (a.states[x].observation(), b.states[y].observation());
        if ox != oy {
            let mut replies = Vec::new();
            let mut cur = (x, y);
            while let Some(Some((prev, reply))) = parent.get(&cur) {
                replies.push(*reply);
                cur = *prev;
            }
            replies.reverse();
            return Verdict::differ(Relation::Thread, Witness::Replies { replies, left: ox, right: oy });
        }
        if let (Some((xt, xf)), Some((yt, yf))) = (a.states[x].successors(), b.states[y].successors()) {
            for (next, reply) in [((xt, yt), true), ((xf, yf), false)] {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some(((x, y), reply)));
                    queue.push_back(next);
                }
            }
        }
    }
    Verdict::equal(Relation::Thread)
}

/// Right-hand side of a recursive thread equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rhs {
    Stop,
    Deadlock,
    Var(String),
    /// `a∘P`
    Prefix(String, Box<Rhs>),
    /// `P ⊴ a ⊵ Q`
    Post(Box<Rhs>, String, Box<Rhs>),
}

#[derive(Debug, Clone, Copy)]
struct Symbols {
    prefix: &'static str,
    left: &'static str,
    right: &'static str,
}

const UNICODE: Symbols = Symbols { prefix: "∘", left: " ⊴ ", right: " ⊵ " };
const ASCII: Symbols = Symbols { prefix: " o ", left: " <| ", right: " |> " };

impl Rhs {
    fn render(&self, sym: Symbols, out: &mut String) {
        let operand = |r: &Rhs, out: &mut String| {
            if matches!(r, Rhs::Post(..)) {
                out.push('(');
                r.render(sym, out);
                out.push(')');
            } else {
                r.render(sym, out);
            }
        };
        match self {
            Rhs::Stop => out.push('S'),
            Rhs::Deadlock => out.push('D'),
            Rhs::Var(v) => out.push_str(v),
            Rhs::Prefix(a, p) => {
                out.push_str(a);
                out.push_str(sym.prefix);
                operand(p, out);
            }
            Rhs::Post(p, a, q) => {
                operand(p, out);
                out.push_str(sym.left);
                out.push_str(a);
                out.push_str(sym.right);
                operand(q, out);
            }
        }
    }
}

/// A finite system of recursive equations; the first variable is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub equations: Vec<(String, Rhs)>,
}

impl EquationSystem {
    fn render(&self, sym: Symbols) -> String {
        let mut out = String::new();
        for (name, rhs) in &self.equations {
            out.push_str(name);
            out.push_str(" = ");
            rhs.render(sym, &mut out);
            out.push('\n');
        }
        out
    }

    pub fn to_ascii(&self) -> String {
        self.render(ASCII)
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(UNICODE))
    }
}

/// Equations naming the root and every action state referred to from more
/// than one place; other states are written inline. Variables are `X0`,
/// `X1`, ... in breadth-first order from the root.
pub fn to_equations(t: &RegularThread) -> EquationSystem {
    let reach = t.reachable();
    let mut referrers = vec![0usize; t.states.len()];
    for &s in &reach {
        if let Some((tt, ff)) = t.states[s].successors() {
            referrers[tt] += 1;
            if ff != tt {
                referrers[ff] += 1;
            }
        }
    }
    let mut names: HashMap<usize, String> = HashMap::new();
    for &s in &reach {
        let named = s == t.root || referrers[s] >= 2;
        if named && matches!(t.states[s], ThreadState::Post { .. }) {
            names.insert(s, format!("X{}", names.len()));
        }
    }
    if names.is_empty() {
        // root is S or D
        let rhs = if t.states[t.root] == ThreadState::Stop { Rhs::Stop } else { Rhs::Deadlock };
        return EquationSystem { equations: vec![("X0".into(), rhs)] };
    }

    fn body(t: &RegularThread, s: usize, names: &HashMap<usize, String>) -> Rhs {
        match &t.states[s] {
            ThreadState::Stop => Rhs::Stop,
            ThreadState::Deadlock => Rhs::Deadlock,
            ThreadState::Post { action, on_true, on_false } => {
                let refer = |n: usize| match names.get(&n) {
                    Some(v) => Rhs::Var(v.clone()),
                    None => body(t, n, names),
                };
                if on_true == on_false {
                    Rhs::Prefix(action.clone(), Box::new(refer(*on_true)))
                } else {
                    Rhs::Post(Box::new(refer(*on_true)), action.clone(), Box::new(refer(*on_false)))
                }
            }
        }
    }

    let mut equations: Vec<(usize, String, Rhs)> =
        names.iter().map(|(&s, v)| (s, v.clone(), body(t, s, &names))).collect();
    equations.sort_by_key(|(_, v, _)| v[1..].parse::<usize>().unwrap_or(usize::MAX));
    EquationSystem { equations: equations.into_iter().map(|(_, v, r)| (v, r)).collect() }
}

/// Graphviz rendering of the reachable states. Node names are `s<index>`;
/// the root is drawn with a double border.
pub fn to_dot(t: &RegularThread) -> String {
    let mut out = String::from("digraph thread {\n");
    let reach = t.reachable();
    for &s in &reach {
        let (label, shape) = match &t.states[s] {
            ThreadState::Stop => ("S".to_string(), "box"),
            ThreadState::Deadlock => ("D".to_string(), "box"),
            ThreadState::Post { action, .. } => (action.clone(), "circle"),
        };
        let root = if s == t.root { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{s} [label=\"{label}\", shape={shape}{root}];");
    }
    for &s in &reach {
        if let Some((tt, ff)) = t.states[s].successors() {
            if tt == ff {
                let _ = writeln!(out, "  s{s} -> s{tt};");
            } else {
                let _ = writeln!(out, "  s{s} -> s{tt} [label=\"true\"];");
                let _ = writeln!(out, "  s{s} -> s{ff} [label=\"false\", style=dashed];");
            }
        }
    }
    out.push_str("}\n");
    out
}
