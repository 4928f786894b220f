//! Reduction of an instance to points sitting on a polar grid of locations.

mod cap;
mod cycles;
mod grid;
mod snap;

pub use cap::cap_locations;
pub use cycles::{
    eliminate_location_cycles, find_location_cycle, nontrivial_location_potential, LocationCycle,
};
pub use grid::{build_grid, check_epsilon, Location, LocationGrid};
pub use snap::{
    lift_solution, nearest_location, snap, snap_points, strip_close_points, LocatedInstance,
    SnappedInstance, StripOutcome,
};
