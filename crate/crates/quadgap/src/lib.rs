//! File formats, the certificate verifier and the parallel drivers behind the
//! `quadgap` command.

pub mod csvout;
pub mod dto;
pub mod par;
pub mod verify;
