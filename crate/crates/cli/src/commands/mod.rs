//! One module per subcommand.

pub mod compare;
pub mod plot;
pub mod scan;
pub mod semiclassics;
pub mod verify;
