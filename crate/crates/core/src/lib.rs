//! Symbolic-numeric verification of contact-to-foliation deformations,
//! braid monodromies of plane-curve singularity links, SL(2,Z) normal forms
//! and Milnor fibre critical-point counts.

pub mod algebra;
pub mod contact;
pub mod forms;
pub mod milnor;
pub mod monodromy;
pub mod report;
pub mod sl2;
pub mod words;
