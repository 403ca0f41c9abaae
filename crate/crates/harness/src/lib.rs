//! Command-line harness for the `mudra` library: JSON I/O, exhaustive
//! profile enumeration, reproduction of published examples and the
//! rule-by-property table sweep.

pub mod enumerate;
pub mod error;
pub mod io;
pub mod reproduce;
pub mod report;
pub mod table1;

pub use error::HarnessError;
