//! Eventually periodic sequences of primitive instructions (SPIs).
//!
//! [`CanonSpi`] is the common semantic target of both notations: a finite
//! preperiod followed by an optional nonempty period repeated forever.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Instruction, LSeq, PgaTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpiError {
    #[error("a program must contain at least one instruction")]
    Empty,
    #[error("a period must contain at least one instruction")]
    EmptyPeriod,
    #[error("repeat instruction {0} cannot occur in a sequence of primitive instructions")]
    Repeater(Instruction),
}

/// First canonical form `Y` or `Y;Z^w` of a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonSpi {
    preperiod: Vec<Instruction>,
    period: Option<Vec<Instruction>>,
}

fn check_primitive(word: &[Instruction]) -> Result<(), SpiError> {
    match word.iter().find(|i| !i.is_primitive()) {
        Some(r) => Err(SpiError::Repeater(r.clone())),
        None => Ok(()),
    }
}

impl CanonSpi {
    pub fn finite(word: Vec<Instruction>) -> Result<CanonSpi, SpiError> {
        if word.is_empty() {
            return Err(SpiError::Empty);
        }
        check_primitive(&word)?;
        Ok(CanonSpi { preperiod: word, period: None })
    }

    pub fn periodic(preperiod: Vec<Instruction>, period: Vec<Instruction>) -> Result<CanonSpi, SpiError> {
        if period.is_empty() {
            return Err(SpiError::EmptyPeriod);
        }
        check_primitive(&preperiod)?;
        check_primitive(&period)?;
        Ok(CanonSpi { preperiod, period: Some(period) })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts(preperiod: Vec<Instruction>, period: Option<Vec<Instruction>>) -> CanonSpi {
        debug_assert!(period.as_ref().map_or(!preperiod.is_empty(), |p| !p.is_empty()));
        CanonSpi { preperiod, period }
    }

    pub fn preperiod(&self) -> &[Instruction] {
        &self.preperiod
    }

    pub fn period(&self) -> Option<&[Instruction]> {
        self.period.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_none()
    }

    /// Number of instructions written down (preperiod plus one period).
    pub fn instruction_count(&self) -> usize {
        self.preperiod.len() + self.period.as_ref().map_or(0, Vec::len)
    }

    /// Instruction at 0-based position `i` of the denoted SPI.
    pub fn at(&self, i: usize) -> Option<&Instruction> {
        let k = self.preperiod.len();
        if i < k {
            return Some(&self.preperiod[i]);
        }
        self.period.as_ref().map(|p| &p[(i - k) % p.len()])
    }

    /// Position reached by jumping `c` ahead of position `t`. In a periodic
    /// SPI the result is folded into `0..k+n`; finite SPIs do not fold.
    pub(crate) fn advance(&self, t: usize, c: usize) -> usize {
        let k = self.preperiod.len();
        let Some(n) = self.period.as_ref().map(Vec::len) else {
            return t.saturating_add(c);
        };
        match t.checked_add(c) {
            Some(s) if s < k + n => s,
            _ => {
                let off = if t >= k { ((t - k) % n + c % n) % n } else { (c - (k - t)) % n };
                k + off
            }
        }
    }

    pub fn to_pga_term(&self) -> PgaTerm {
        let mut parts: Vec<PgaTerm> = self.preperiod.iter().cloned().map(PgaTerm::Prim).collect();
        if let Some(period) = &self.period {
            parts.push(PgaTerm::omega(PgaTerm::word(period).expect("period is nonempty")));
        }
        PgaTerm::concat_all(parts).expect("program is nonempty")
    }

    /// The K-program `u1;..;uk;v1;..;vn;\##n` (or the bare word when finite).
    pub fn to_kform(&self) -> LSeq {
        let mut items = self.preperiod.clone();
        if let Some(period) = &self.period {
            items.extend(period.iter().cloned());
            items.push(Instruction::Repeat(period.len()));
        }
        LSeq::new(items).expect("program is nonempty")
    }
}

impl fmt::Display for CanonSpi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_pga_term())
    }
}

/// First canonical form of a PGA term.
pub fn to_canon_pga(term: &PgaTerm) -> CanonSpi {
    match term {
        PgaTerm::Prim(inst) => CanonSpi::from_parts(vec![inst.clone()], None),
        PgaTerm::Concat(l, r) => {
            let left = to_canon_pga(l);
            if left.period.is_some() {
                // X^w;Y = X^w
                return left;
            }
            let right = to_canon_pga(r);
            let mut pre = left.preperiod;
            pre.extend(right.preperiod);
            CanonSpi::from_parts(pre, right.period)
        }
        PgaTerm::Omega(body) => {
            let inner = to_canon_pga(body);
            match inner.period {
                // (Y;Z^w)^w = Y;Z^w
                Some(period) => CanonSpi::from_parts(inner.preperiod, Some(period)),
                None => CanonSpi::from_parts(Vec::new(), Some(inner.preperiod)),
            }
        }
    }
}

/// An L-sequence whose first canonical form has a repeater preceded by too
/// few primitive instructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotInK {
    pub first_form: LSeq,
    /// Repeat counter minus the number of preceding instructions.
    pub deficit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LCanon {
    Kernel(CanonSpi),
    NotInK(NotInK),
}

impl LCanon {
    pub fn kernel(self) -> Option<CanonSpi> {
        match self {
            LCanon::Kernel(c) => Some(c),
            LCanon::NotInK(_) => None,
        }
    }
}

/// Drops everything after the leftmost repeater.
pub fn first_canonical_l(seq: &LSeq) -> LSeq {
    let items = seq.items();
    let end = items.iter().position(|i| !i.is_primitive()).map_or(items.len(), |p| p + 1);
    LSeq::new(items[..end].to_vec()).expect("prefix of a nonempty sequence")
}

pub fn to_canon_l(seq: &LSeq) -> LCanon {
    let first = first_canonical_l(seq);
    let items = first.items();
    match items.last() {
        Some(Instruction::Repeat(n)) => {
            let k = items.len() - 1;
            let n = *n;
            if n > k {
                return LCanon::NotInK(NotInK { deficit: n - k, first_form: first });
            }
            let pre = items[..k - n].to_vec();
            let period = items[k - n..k].to_vec();
            LCanon::Kernel(CanonSpi::from_parts(pre, Some(period)))
        }
        _ => LCanon::Kernel(CanonSpi::from_parts(items.to_vec(), None)),
    }
}

/// The first `len` instructions of the SPI (fewer if it is finite and shorter).
pub fn unfold(c: &CanonSpi, len: usize) -> Vec<Instruction> {
    let limit = if c.is_finite() { len.min(c.preperiod.len()) } else { len };
    (0..limit).map(|i| c.at(i).expect("in range").clone()).collect()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Length of prefix after which two infinite SPIs agree forever if they agree
/// on it.
pub(crate) fn agreement_bound(a: &CanonSpi, b: &CanonSpi) -> usize {
    let n1 = a.period.as_ref().map_or(1, Vec::len);
    let n2 = b.period.as_ref().map_or(1, Vec::len);
    a.preperiod.len() + b.preperiod.len() + 2 * lcm(n1, n2)
}

/// Positionwise equality of the denoted SPIs, decided by comparing a finite
/// prefix long enough to cover both preperiods and a common period.
pub fn spi_equal_oracle(a: &CanonSpi, b: &CanonSpi) -> bool {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => a.preperiod == b.preperiod,
        (false, false) => {
            let bound = agreement_bound(a, b);
            (0..bound).all(|i| a.at(i) == b.at(i))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_l, parse_pga};
    use proptest::prelude::*;

    fn pga(s: &str) -> CanonSpi {
        to_canon_pga(&parse_pga(s).unwrap())
    }

    fn l(s: &str) -> LCanon {
        to_canon_l(&parse_l(s).unwrap())
    }

    fn word(s: &str) -> Vec<Instruction> {
        parse_l(s).unwrap().into_items()
    }

    #[test]
    fn canon_of_pga_examples() {
        let c = pga("a^w;b");
        assert!(c.preperiod().is_empty());
        assert_eq!(c.period().unwrap(), word("a").as_slice());

        let c = pga("(a;b)^w");
        assert!(c.preperiod().is_empty());
        assert_eq!(c.period().unwrap(), word("a;b").as_slice());

        let c = pga("(a;(b)^w)^w");
        assert_eq!(c.preperiod(), word("a").as_slice());
        assert_eq!(c.period().unwrap(), word("b").as_slice());
        // independent check: unfold the nested term by hand
        let expected: Vec<_> = std::iter::once("a").chain(std::iter::repeat("b")).take(16).collect();
        let got: Vec<_> = unfold(&c, 16).iter().map(|i| i.to_string()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn canon_of_l_examples() {
        let c = l("a;\\##1;b;c").kernel().unwrap();
        assert!(c.preperiod().is_empty());
        assert_eq!(c.period().unwrap(), word("a").as_slice());

        let c = l("+a;-b;#4;\\##2").kernel().unwrap();
        assert_eq!(c.preperiod(), word("+a").as_slice());
        assert_eq!(c.period().unwrap(), word("-b;#4").as_slice());

        match l("a;\\##2") {
            LCanon::NotInK(n) => {
                assert_eq!(n.deficit, 1);
                assert_eq!(n.first_form.to_string(), "a;\\##2");
            }
            other => panic!("expected NotInK, got {other:?}"),
        }

        let c = l("a;b").kernel().unwrap();
        assert!(c.is_finite());
    }

    #[test]
    fn unfold_examples() {
        let c = CanonSpi::periodic(word("a"), word("b;c")).unwrap();
        assert_eq!(unfold(&c, 5), word("a;b;c;b;c"));
        let c = CanonSpi::finite(word("a;b")).unwrap();
        assert_eq!(unfold(&c, 5), word("a;b"));
        let c = l("a;\\##1").kernel().unwrap();
        assert_eq!(unfold(&c, 4), word("a;a;a;a"));
    }

    #[test]
    fn oracle_examples() {
        let a = l("a;\\##1").kernel().unwrap();
        let b = l("a;a;\\##2").kernel().unwrap();
        assert!(spi_equal_oracle(&a, &b));
        assert!(!spi_equal_oracle(&pga("a"), &pga("a;a")));
        assert!(spi_equal_oracle(&pga("(a;b)^w"), &pga("a;(b;a)^w")));
        assert!(!spi_equal_oracle(&pga("a"), &pga("a^w")));
    }

    #[test]
    fn constructors_validate() {
        assert_eq!(CanonSpi::finite(vec![]), Err(SpiError::Empty));
        assert_eq!(CanonSpi::periodic(vec![], vec![]), Err(SpiError::EmptyPeriod));
        assert!(CanonSpi::finite(vec![Instruction::Repeat(1)]).is_err());
    }

    fn arb_inst() -> impl Strategy<Value = Instruction> {
        prop_oneof![
            Just(Instruction::Basic("a".into())),
            Just(Instruction::PosTest("b".into())),
            Just(Instruction::Jump(1)),
            Just(Instruction::Halt),
        ]
    }

    fn arb_spi() -> impl Strategy<Value = CanonSpi> {
        (
            prop::collection::vec(arb_inst(), 0..6),
            prop::option::of(prop::collection::vec(arb_inst(), 1..5)),
        )
            .prop_filter_map("nonempty", |(pre, per)| match per {
                Some(p) => CanonSpi::periodic(pre, p).ok(),
                None => CanonSpi::finite(pre).ok(),
            })
    }

    proptest! {
        #[test]
        fn unfold_prefix_closed(c in arb_spi(), n in 0usize..30, extra in 0usize..30) {
            let short = unfold(&c, n);
            let long = unfold(&c, n + extra);
            prop_assert_eq!(&long[..short.len()], short.as_slice());
        }

        // the oracle's bound agrees with a four times longer comparison
        #[test]
        fn oracle_bound_is_enough(a in arb_spi(), b in arb_spi()) {
            let wide = match (a.is_finite(), b.is_finite()) {
                (false, false) => {
                    let bound = 4 * agreement_bound(&a, &b);
                    unfold(&a, bound) == unfold(&b, bound)
                }
                _ => a == b,
            };
            prop_assert_eq!(spi_equal_oracle(&a, &b), wide);
        }

        #[test]
        fn kform_round_trip(c in arb_spi()) {
            prop_assert_eq!(to_canon_l(&c.to_kform()), LCanon::Kernel(c.clone()));
            prop_assert_eq!(to_canon_pga(&c.to_pga_term()), c);
        }
    }
}
