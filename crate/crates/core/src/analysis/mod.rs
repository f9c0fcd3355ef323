//! Post-training analysis: the per-region test protocol, sign test,
//! trajectory plots, empty-room probes and champion complexity.

pub mod complexity;
pub mod probe;
pub mod protocol;
pub mod sign;
pub mod svg;

pub use complexity::{complexity_report, ComplexityReport};
pub use probe::{composite_plot, default_side_length, run_empty_room_probe, ProbeBundle};
pub use protocol::{
    protocol_start, record_region_paths, region_start, run_test_protocol, EpisodeRecord, Quartiles, RoomTestReport, EPISODES_PER_REGION,
};
pub use sign::{sign_test, sign_test_counts, SignTest};
pub use svg::{time_colour, trajectories_csv, PlotPath, Rgb, TrajectoryPlot};
