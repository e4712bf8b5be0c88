//! The hemophilia operator, the general cross-table operator, the
//! unnormalized mode and the reduced system on ratios.

pub mod gonosomal;
pub mod hemophilia;
pub mod table;

pub use gonosomal::{GonosomalOperator, OperatorMode};
pub use hemophilia::{apply_f, apply_f_extended, apply_w, reconstruct_next, reduce, w_formula};
pub use table::CrossTable;
