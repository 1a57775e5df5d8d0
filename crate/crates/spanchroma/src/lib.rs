//! Span colourings of graphs over finite fields, the representing graphs
//! `A_{k^n}`, and unstable mod-2 Steenrod algebra actions on graded
//! Stanley-Reisner rings with generators in degrees 4 and 6.

pub mod gf;
pub mod graph;
pub mod spancolour;
pub mod sr;
pub mod steenrod;
