//! Betti-number approximation along chains of p-power-index normal
//! subgroups of finitely presented groups.
//!
//! The pipeline runs from text presentations ([`presentation`]) through
//! coset enumeration ([`coset`]), Reidemeister–Schreier rewriting
//! ([`schreier`]) and integral homology ([`homology`]) to derived p-series
//! chains ([`chains`]), approximation reports ([`approx`]), deficiency
//! certificates ([`bounds`]) and the bounded torsion-tower simulator
//! ([`tower`]).

pub mod approx;
pub mod bounds;
pub mod chains;
pub mod cli;
pub mod coset;
pub mod homology;
pub mod presentation;
pub mod rational;
pub mod schreier;
pub mod tower;
pub mod words;

pub use coset::{CosetTable, EnumerationError, EnumerationLimits};
pub use presentation::{parse_presentation, ParseError, Presentation};
pub use words::{Letter, Word};
