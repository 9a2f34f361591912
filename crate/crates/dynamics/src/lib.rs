pub mod crofton;
pub mod curves;
pub mod horseshoe;
pub mod orbits;
pub mod packages;
pub mod twist;

pub use horseshoe::{horseshoe_orbit_table, SymbolicHorseshoe};
pub use orbits::{action_gap_scan, find_periodic_orbits, OrbitRecord, OrbitTable, SearchConfig, Stability};
pub use packages::{build_package_from_orbits, CouplingRule, PackageBuild};
pub use twist::{Domain, TwistMapModel};
pub use crofton::{crofton_check, curve_suite, CroftonReport, TomographSpec};
pub use curves::{curve_volume_growth, graph_volume, CurveConfig, CurveGrowth, Polyline};
