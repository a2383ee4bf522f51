//! Content identity for information objects.
//!
//! The library models the full path from a symbol structure to marks on a
//! physical carrier and back: formats describe which symbol types, fonts
//! and arrangement rules are meaningful; projection writes structures onto
//! carriers and reads impressions off them; interpretation recovers
//! structures from impressions or digital objects; identity compares the
//! recovered structures under a format's rules.

pub mod analog;
pub mod disambig;
pub mod format;
pub mod identity;
pub mod interpret;
pub mod ontology;
pub mod projection;
pub mod raster;
pub mod structure;
