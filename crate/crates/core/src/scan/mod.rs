//! Range sweeps and statistics.

pub mod asymptotics;
pub mod census;
pub mod families;
pub mod sector;
pub mod sweep;

pub use asymptotics::{
    count_na, count_r_minus, count_r_plus, exact_counts_vs_asymptotics, na_main_term, AsymptoticsReport, NaRow,
};
pub use census::{
    census, census_chunk, census_with, chunk_bounds, chunk_count, default_sample_points, level_rows, merge_chunks,
    scan_levels, CensusAggregate, CensusOptions, CensusRun, ChunkResult, ChunkSubtotal, LevelKind, LevelRow,
    ScanCheckpoint, SeriesPoint, CHECKPOINT_VERSION, CLASS_MODULI, DEFAULT_CHUNK_WIDTH,
};
pub use families::{
    family_generators, family_members_below, strong_approx_obstruction, Family, FamilyMember, Membership,
    StrongApproxReport,
};
pub use sector::{
    sector_constant, sector_count_at, sector_counts, sector_mean, truncated_densities, variance_experiment,
    variance_with_densities, VarianceConfig, VarianceReport,
};
pub use sweep::{
    for_each_minus, for_each_plus, sweep_class_numbers, sweep_class_numbers_with_budget, sweep_counts_range,
    sweep_reps_range, sweep_reps_range_negative, ClassNumberSweep, SWEEP_LIMIT,
};
