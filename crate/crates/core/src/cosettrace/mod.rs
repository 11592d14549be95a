//! A finite model of the trace formula on `Γ\G/K`: double cosets, the
//! translation `[x] -> [xπ]`, its fixed-point trace, the conjugacy-class
//! expansion with exact volumes and orbital integrals, the Δ-sets and the
//! factored form of the trace when `K` is small.

mod group;
mod involution;
mod model;
mod random;
mod spec;
mod trace;

pub use group::{ElemId, FiniteGroup, GroupKind, Subgroup, MAX_GROUP_ORDER};
pub use involution::involution_census;
pub use model::{build_model, DoubleCosetSpace, FiniteGroupModel};
pub use random::{random_model, random_model_in, Family, GroupLibrary};
pub use spec::ModelSpec;
pub use trace::{
    centralizer, delta_sets, factored_trace, gamma_classes, kernel_trace, orbital_trace,
    stabilization_level, volume_identity_check, volume_sides, DeltaSets, FactoredTrace,
    OrbitalTerm, TraceReport, VolumeSides,
};
