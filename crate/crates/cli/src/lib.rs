//! Text game documents, JSON analysis reports, and the `dyngame` command
//! surface. The heavy lifting lives in `dyngame-core`; this crate only
//! moves data between files, the library, and standard output.

pub mod report;
pub mod run;
pub mod shipped;
pub mod textfmt;
