pub mod builder;
pub mod catalog;
pub mod dsl;
pub mod effects;
pub mod fusion;
pub mod master;
pub mod ontology;
pub mod xosc;
