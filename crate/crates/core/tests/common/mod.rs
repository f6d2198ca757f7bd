//! Random programs and random axiom instances shared by the integration
//! suites.
#![allow(dead_code)]

use pga_core::{CanonSpi, Instruction, LSeq, PgaTerm};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Which congruence an applied axiom instance preserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strength {
    Spc,
    Sc,
}

pub struct Gen {
    pub rng: StdRng,
    pub alphabet: usize,
    pub max_jump: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), alphabet: 4, max_jump: 8 }
    }

    pub fn inst(&mut self) -> Instruction {
        let name = NAMES[self.rng.gen_range(0..self.alphabet)].to_string();
        match self.rng.gen_range(0..10) {
            0 | 1 => Instruction::Basic(name),
            2 | 3 => Instruction::PosTest(name),
            4 => Instruction::NegTest(name),
            5..=7 => Instruction::Jump(self.rng.gen_range(0..=self.max_jump)),
            _ => Instruction::Halt,
        }
    }

    pub fn word(&mut self, len: usize) -> Vec<Instruction> {
        (0..len).map(|_| self.inst()).collect()
    }

    /// Preperiod of length at most 8, period of length at most 6; one in five
    /// is finite.
    pub fn spi(&mut self) -> CanonSpi {
        if self.rng.gen_ratio(1, 5) {
            let len = self.rng.gen_range(1..=8);
            return CanonSpi::finite(self.word(len)).unwrap();
        }
        let k = self.rng.gen_range(0..=8);
        let n = self.rng.gen_range(1..=6);
        let pre = self.word(k);
        let per = self.word(n);
        CanonSpi::periodic(pre, per).unwrap()
    }

    /// A random PGA term with nested concatenations and repetitions.
    pub fn term(&mut self, depth: usize) -> PgaTerm {
        if depth == 0 || self.rng.gen_ratio(1, 3) {
            return PgaTerm::Prim(self.inst());
        }
        match self.rng.gen_range(0..4) {
            0 => PgaTerm::omega(self.term(depth - 1)),
            _ => PgaTerm::concat(self.term(depth - 1), self.term(depth - 1)),
        }
    }

    /// A random concatenation tree over a nonempty word.
    pub fn tree(&mut self, word: &[Instruction]) -> PgaTerm {
        if word.len() == 1 {
            return PgaTerm::Prim(word[0].clone());
        }
        let split = self.rng.gen_range(1..word.len());
        PgaTerm::concat(self.tree(&word[..split]), self.tree(&word[split..]))
    }

    /// Renders a canonical form as a PGA term using associativity, trailing
    /// junk after a repetition, and `(Z;Z^w)^w = Z^w`, all spc-preserving.
    pub fn render_pga(&mut self, c: &CanonSpi) -> PgaTerm {
        let Some(period) = c.period() else {
            return self.tree(c.preperiod());
        };
        let body = self.tree(period);
        let mut rep = if self.rng.gen_ratio(1, 4) {
            let again = self.tree(period);
            PgaTerm::omega(PgaTerm::concat(body, PgaTerm::omega(again)))
        } else {
            PgaTerm::omega(body)
        };
        if self.rng.gen_ratio(1, 3) {
            let junk = self.term(2);
            rep = PgaTerm::concat(rep, junk);
        }
        if c.preperiod().is_empty() {
            rep
        } else {
            let pre = self.tree(c.preperiod());
            PgaTerm::concat(pre, rep)
        }
    }

    /// Renders as an L-sequence, possibly with junk after the repeater.
    pub fn render_l(&mut self, c: &CanonSpi) -> LSeq {
        let mut items = c.to_kform().into_items();
        if !c.is_finite() && self.rng.gen_ratio(1, 2) {
            let extra = self.rng.gen_range(1..=3);
            for _ in 0..extra {
                if self.rng.gen_ratio(1, 4) {
                    items.push(Instruction::Repeat(self.rng.gen_range(1..=9)));
                } else {
                    items.push(self.inst());
                }
            }
        }
        LSeq::new(items).unwrap()
    }

    /// Applies one random axiom instance that fits, or returns `None` after a
    /// few failed attempts.
    pub fn rewrite_once(&mut self, c: &CanonSpi) -> Option<(CanonSpi, Strength)> {
        for _ in 0..16 {
            let pick = self.rng.gen_range(0..10);
            let out = if pick < 4 { spc_rewrite(self, c).map(|c| (c, Strength::Spc)) } else {
                sc_rewrite(self, c).map(|c| (c, Strength::Sc))
            };
            if out.is_some() {
                return out;
            }
        }
        None
    }

    /// Applies 1..=5 random axiom instances; reports the weakest congruence
    /// they jointly preserve.
    pub fn rewrite(&mut self, c: &CanonSpi) -> (CanonSpi, Strength, usize) {
        let steps = self.rng.gen_range(1..=5);
        let mut cur = c.clone();
        let mut strength = Strength::Spc;
        let mut applied = 0;
        for _ in 0..steps {
            if let Some((next, s)) = self.rewrite_once(&cur) {
                cur = next;
                strength = strength.max(s);
                applied += 1;
            }
        }
        (cur, strength, applied)
    }
}

fn periodic(pre: Vec<Instruction>, per: Vec<Instruction>) -> CanonSpi {
    CanonSpi::periodic(pre, per).unwrap()
}

/// PGA2 and PGA4 (and the unfolding law) in either direction.
fn spc_rewrite(g: &mut Gen, c: &CanonSpi) -> Option<CanonSpi> {
    let period = c.period()?.to_vec();
    let pre = c.preperiod().to_vec();
    match g.rng.gen_range(0..5) {
        // (X^m)^w = X^w, growing
        0 => {
            let m = g.rng.gen_range(2..=3);
            Some(periodic(pre, period.iter().cloned().cycle().take(m * period.len()).collect()))
        }
        // shrinking to a proper root
        1 => {
            let n = period.len();
            let d = (1..n).find(|&d| n % d == 0 && (d..n).all(|i| period[i] == period[i - d]))?;
            Some(periodic(pre, period[..d].to_vec()))
        }
        // (X;Y)^w = X;(Y;X)^w
        2 => {
            let split = g.rng.gen_range(1..=period.len());
            let mut pre = pre;
            pre.extend_from_slice(&period[..split]);
            let mut per = period[split..].to_vec();
            per.extend_from_slice(&period[..split]);
            Some(periodic(pre, per))
        }
        // X;(Y;X)^w = (X;Y)^w
        3 => {
            if pre.last()? != period.last()? {
                return None;
            }
            let mut pre = pre;
            pre.pop();
            let mut per = period;
            per.rotate_right(1);
            Some(periodic(pre, per))
        }
        // X^w = X;X^w
        _ => {
            let mut pre = pre;
            pre.extend_from_slice(&period);
            Some(periodic(pre, period))
        }
    }
}

/// Folded position index, for periodic and finite forms alike.
fn fold(c: &CanonSpi, t: usize) -> Option<usize> {
    let k = c.preperiod().len();
    match c.period() {
        Some(p) if t >= k => Some(k + (t - k) % p.len()),
        Some(_) => Some(t),
        None => (t < k).then_some(t),
    }
}

fn with(c: &CanonSpi, i: usize, inst: Instruction) -> CanonSpi {
    let mut pre = c.preperiod().to_vec();
    match c.period() {
        Some(p) => {
            let mut per = p.to_vec();
            if i < pre.len() {
                pre[i] = inst;
            } else {
                per[i - pre.len()] = inst;
            }
            periodic(pre, per)
        }
        None => {
            pre[i] = inst;
            CanonSpi::finite(pre).unwrap()
        }
    }
}

/// One instance of PGA5..PGA8 at a random jump.
fn sc_rewrite(g: &mut Gen, c: &CanonSpi) -> Option<CanonSpi> {
    let total = c.instruction_count();
    let k = c.preperiod().len();
    let i = g.rng.gen_range(0..total);
    let Instruction::Jump(m) = *c.at(i)? else {
        return None;
    };
    let jump_at = |t: usize| -> Option<(usize, usize)> {
        let f = fold(c, t)?;
        match c.at(f)? {
            Instruction::Jump(j) if f != i => Some((f, *j)),
            _ => None,
        }
    };
    match g.rng.gen_range(0..6) {
        // #n+1;u..;#0 -> #0;u..;#0
        0 if m > 0 => match jump_at(i + m) {
            Some((_, 0)) => Some(with(c, i, Instruction::Jump(0))),
            _ => None,
        },
        // #0;u..;#0 -> #n+1;u..;#0
        1 if m == 0 => {
            let d = g.rng.gen_range(1..=2 * total);
            match jump_at(i + d) {
                Some((_, 0)) => Some(with(c, i, Instruction::Jump(d))),
                _ => None,
            }
        }
        // #n+1;u..;#m -> #n+m+1;u..;#m
        2 if m > 0 => match jump_at(i + m) {
            Some((_, j)) if j > 0 => Some(with(c, i, Instruction::Jump(m + j))),
            _ => None,
        },
        // and back
        3 if m >= 2 => {
            let d = g.rng.gen_range(1..m);
            match jump_at(i + d) {
                Some((_, j)) if j > 0 && d + j == m => Some(with(c, i, Instruction::Jump(d))),
                _ => None,
            }
        }
        // PGA7: period jumps modulo the period length
        4 if i >= k => {
            let n = c.period()?.len();
            if m >= n && g.rng.gen_bool(0.5) {
                Some(with(c, i, Instruction::Jump(m - n)))
            } else {
                Some(with(c, i, Instruction::Jump(m + n)))
            }
        }
        // PGA8: preperiod jumps landing in the period
        5 if i < k && m > 0 && i + m >= k => {
            let n = c.period()?.len();
            if m >= n && i + m - n >= k && g.rng.gen_bool(0.5) {
                Some(with(c, i, Instruction::Jump(m - n)))
            } else {
                Some(with(c, i, Instruction::Jump(m + n)))
            }
        }
        _ => None,
    }
}
