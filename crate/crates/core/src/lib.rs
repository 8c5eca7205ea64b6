//! Globular operads, globular PROs and the weakening of strict PRO
//! theories into weak ω-categorical ones.

pub mod globset;
pub mod pasting;
pub mod grdops;
pub mod pros;
pub mod strict;
pub mod coll;
pub mod globpro;
pub mod weaken;
