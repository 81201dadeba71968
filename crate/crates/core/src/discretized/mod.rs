//! Finite, `delta`-discretized counterparts: Frostman sets, dyadic covers,
//! the integer grid example, broad-narrow descent and slab tallies.

mod broadnarrow;
mod dyadic;
mod grid;
mod pointset;
mod tally;

pub use broadnarrow::{
    broad_narrow, random_cantor_set, top_cells, BroadCells, BroadNarrowParams, BroadNarrowReport, Cell, CellTree,
    LevelTrace, TopCells,
};
pub use dyadic::{verify_dyadic_covering, CoveringReport, DyadicCube};
pub use grid::{
    exceptional_scan, loglog_slope, slope_counts, slope_projection_count, st_grid_example, GridExample, ScanResult,
    SlopeCounter,
};
pub use pointset::{
    check_frostman, dyadic_radii, extract_delta_s_set, projection_covering_number, FrostmanReport, PointSet,
    BALL_SLACK,
};
pub use tally::{multilinear_tally, planar_slab_configuration};
