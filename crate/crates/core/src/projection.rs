//! The pgla2pga projection from arbitrary L-sequences to PGA programs.

use std::fmt;

use serde::Serialize;

use crate::spi::{first_canonical_l, to_canon_l, to_canon_pga, CanonSpi, LCanon};
use crate::syntax::{Instruction, LSeq, PgaTerm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionReport {
    pub input: LSeq,
    pub first_canonical_l: LSeq,
    pub in_kernel: bool,
    /// Number of `#0` instructions inserted before the repeater.
    pub padding_added: usize,
    pub result: PgaTerm,
}

impl ProjectionReport {
    pub fn canon(&self) -> CanonSpi {
        to_canon_pga(&self.result)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            input: String,
            first_canonical_l: String,
            in_kernel: bool,
            padding_added: usize,
            result: String,
        }
        let doc = Doc {
            input: self.input.to_string(),
            first_canonical_l: self.first_canonical_l.to_string(),
            in_kernel: self.in_kernel,
            padding_added: self.padding_added,
            result: self.result.to_string(),
        };
        serde_json::to_string_pretty(&doc).expect("plain strings serialize")
    }
}

impl fmt::Display for ProjectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input: {}", self.input)?;
        writeln!(f, "first_canonical_l: {}", self.first_canonical_l)?;
        writeln!(f, "in_kernel: {}", self.in_kernel)?;
        writeln!(f, "padding_added: {}", self.padding_added)?;
        writeln!(f, "result: {}", self.result)
    }
}

/// Maps any L-sequence to a PGA program. A repeater `\##n` preceded by only
/// `k < n` instructions gets `n - k` copies of `#0` inserted before it.
pub fn pgla2pga(seq: &LSeq) -> ProjectionReport {
    let first = first_canonical_l(seq);
    let mut items = first.items().to_vec();
    let mut padding = 0;
    let in_kernel = matches!(to_canon_l(&first), LCanon::Kernel(_));
    let result = match items.pop() {
        Some(Instruction::Repeat(n)) => {
            if n > items.len() {
                padding = n - items.len();
                items.extend(std::iter::repeat_n(Instruction::Jump(0), padding));
            }
            let period = items.split_off(items.len() - n);
            let mut parts: Vec<PgaTerm> = items.into_iter().map(PgaTerm::Prim).collect();
            parts.push(PgaTerm::omega(PgaTerm::word(&period).expect("n >= 1")));
            PgaTerm::concat_all(parts).expect("nonempty")
        }
        Some(last) => {
            items.push(last);
            PgaTerm::word(&items).expect("nonempty")
        }
        None => unreachable!("L-sequences are nonempty"),
    };
    ProjectionReport {
        input: seq.clone(),
        first_canonical_l: first,
        in_kernel,
        padding_added: padding,
        result,
    }
}

/// Outcome of a kernel membership check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCheck {
    pub member: bool,
    /// Repeat counter minus preceding instructions; zero for members.
    pub deficit: usize,
}

impl fmt::Display for KernelCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.member {
            f.write_str("member")
        } else {
            write!(f, "not a member: repeater lacks {} preceding instruction(s)", self.deficit)
        }
    }
}

pub fn kernel_check(seq: &LSeq) -> KernelCheck {
    match to_canon_l(seq) {
        LCanon::Kernel(_) => KernelCheck { member: true, deficit: 0 },
        LCanon::NotInK(n) => KernelCheck { member: false, deficit: n.deficit },
    }
}
