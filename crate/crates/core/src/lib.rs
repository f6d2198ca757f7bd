//! A workbench for program algebra: PGA terms, PGLA repeater sequences and
//! their kernel K, canonical forms, single-pass and structural congruence,
//! thread extraction, and the pgla2pga projection.

pub mod canonical;
pub mod cli;
pub mod projection;
pub mod spi;
pub mod syntax;
pub mod thread;

pub use canonical::{decide_sc, decide_spc, minimize_first, minimize_second, second_canonical, Relation, Verdict, Witness};
pub use projection::{kernel_check, pgla2pga, KernelCheck, ProjectionReport};
pub use spi::{first_canonical_l, spi_equal_oracle, to_canon_l, to_canon_pga, unfold, CanonSpi, LCanon, NotInK, SpiError};
pub use syntax::{parse_l, parse_pga, Instruction, LSeq, ParseError, PgaTerm};
pub use thread::{
    extract, extract_k, extract_pga, minimize, thread_equal, to_dot, to_equations, EquationSystem, Observation,
    RegularThread, Rhs, ThreadError, ThreadState,
};
