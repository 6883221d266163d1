//! Instance sources: seeded synthetic generation and tabular ingestion.

pub mod synthetic;
pub mod tabular;

pub use synthetic::{generate, AlphaRule, GroupMode, SyntheticSpec};
pub use tabular::{load_tabular, ColumnKind, Comparator, GroupRule, Predicate, Provenance, TabularConfig, TabularData};
