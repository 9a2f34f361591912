//! Floer packages over Novikov fields and their barcodes.

pub mod barcode;
pub mod complex;
pub mod floer_graph;
pub mod novikov;
pub mod ratfn;
pub mod rational;

pub use barcode::{Barcode, BarcodeError, ComponentBars, SingularDecomposition};
pub use complex::{Chain, ComplexError, FloerPackage, Generator, ValidationReport};
pub use floer_graph::FloerGraph;
pub use novikov::{NovikovError, NovikovScalar, PeriodGroup, PrimeField, Valuation};
pub use rational::Q;
