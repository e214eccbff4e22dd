//! Exact enumerative counts of rational cuspidal curves in `P^r`.
//!
//! The layers, bottom up:
//!
//! * [`gw`] — genus-0 Gromov–Witten invariants of `P^r` with linear-space
//!   insertions, by associativity, memoized and persistable.
//! * [`blowup`] — point-only invariants of the plane blown up at a point.
//! * [`nodal`] — nodal and two-component counts, computed where a closed
//!   reduction is known and otherwise read from an [`oracle::OracleTable`].
//! * [`cusp`] — the two cuspidal recursions.
//!
//! All arithmetic is on [`num_bigint::BigInt`]; every division is checked.

pub mod blowup;
pub mod constraint;
pub mod cusp;
pub mod error;
pub mod gw;
pub mod nodal;
pub mod oracle;

pub use blowup::{BlowupEngine, BlowupQuery};
pub use constraint::{Constraint, FamilyId, Joint, Priority, Split};
pub use cusp::{CuspEngine, CuspQuery, FullTerms};
pub use error::{Error, Result};
pub use gw::{CacheStats, GwEngine, GwQuery};
pub use nodal::NodalOracle;
pub use oracle::{Conditions, FamilyQuery, OracleRecord, OracleTable};
