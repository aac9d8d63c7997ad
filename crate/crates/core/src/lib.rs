//! Exact computation in the Temperley-Lieb skein algebra and its dotted
//! cobordism categorification.
//!
//! Modules, bottom up:
//!
//! * [`laurent`]: coefficient arithmetic in `q^(1/2)` (Laurent polynomials,
//!   rational functions, truncated power series).
//! * [`tl_diagram`]: planar matchings, composition, turnback words.
//! * [`skein`]: linear combinations of diagrams, the bracket, Jones-Wenzl
//!   projectors and torus braid approximants.
//! * [`cobordism`]: dotted cobordisms between diagrams in disk normal form.
//! * [`complex`]: graded complexes of diagrams, Gaussian reduction, cones,
//!   the one-sided projector towers.
//! * [`homology`]: integral homology of closures via Smith normal form.
//! * [`suites`]: self-check batteries used by the `check` subcommand.

pub mod cobordism;
pub mod complex;
pub mod error;
pub mod homology;
pub mod laurent;
pub mod skein;
pub mod suites;
pub mod tl_diagram;

pub use cobordism::{CobLin, CyclePlan, DeloopIso, Mask};
pub use complex::{
    braid_complex, braid_complex_s, cone, cone_with_maps, crossing_complex, special_complex,
    tower_map, ChainMap, Grading, TLComplex, TLObject,
};
pub use error::Error;
pub use homology::{
    closed_euler, integral_homology, stabilization_report, standard_grading, HomologyRow,
    HomologyTable, StabilizationReport, StabilizationStep, StandardRow,
};
pub use laurent::{HalfExp, LaurentPoly, PowerSeries, QOrder, RationalQ};
pub use skein::{BraidWord, Coefficient, TLElement};
pub use suites::{run_suite, CheckReport, CheckResult, Suite};
pub use tl_diagram::{CapWord, TLDiagram};

pub type Result<T> = std::result::Result<T, Error>;
