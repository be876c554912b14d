//! Channel simulation, trial grids, runtime scaling and config-driven experiments.

mod channel;
mod experiment;
mod scaling;
mod trials;

pub use channel::{corrupt, ChannelSpec, Strategy};
pub use experiment::{
    build_mother, parse_config, run_config, run_experiment, write_report, AnyMother, CodeConfig, CodeKind,
    ExperimentConfig, ExperimentOutput, ExperimentReport, ExperimentResult, ExperimentSpec, FoldedConfig, GraphConfig,
    MotherConfig, PlanConfig, PluralityOutcome, ScalingMother,
};
pub use scaling::{
    brute_force_family, fit_power_law, flip_family, runtime_scaling, FamilyShape, ScalingCase, ScalingPoint,
    ScalingReport,
};
pub use trials::{
    corrupt_folded, list_budget, trial_folded, trial_list, trial_unique, unique_lattice, wilson_interval, CellReport,
    CodeMeta, ListTrials, TrialReport, UniqueTrials,
};
