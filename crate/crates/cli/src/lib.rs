//! Command-line front end: Matrix Market I/O and the `trunclsq` commands.

pub mod app;
pub mod mtx;
