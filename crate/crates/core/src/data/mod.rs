//! Dataset loaders and synthetic generators.

mod citation;
mod idx;
mod synthetic;
mod table;
mod uci;

pub use citation::{load_citation, CitationData};
pub use idx::load_idx;
pub use synthetic::{sample_synthetic, Synthetic, SyntheticSpec};
pub use table::{CategoricalColumn, CategoricalTable, LabeledTable};
pub use uci::{load_mushroom, load_zoo};
