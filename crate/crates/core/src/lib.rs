//! Temporal and rhetorical structure of narrative discourse.
//!
//! Each clause arrives as an annotation (tense, aspect, semantic aspect,
//! optional cue word or temporal expression). The builder attaches clauses
//! one at a time: tense and aspect constrain the possible relations, explicit
//! markers narrow them through a relation lattice, and temporal centering
//! picks the thread each clause continues.
//!
//! ```
//! use tempora::{analyze, parse_discourse, Config, Mode};
//!
//! let d = parse_discourse(
//!     "clause id=e1 tense=past aspect=simple sem=event\n\
//!      clause id=e2 tense=past aspect=simple sem=event cue=because\n",
//! )
//! .unwrap();
//! let result = analyze(&d, &Config::default(), Mode::Best).unwrap();
//! assert_eq!(result.top().unwrap().eventuality_order()[0].to_string(), "e2 precede e1");
//! ```

pub mod builder;
pub mod centering;
pub mod closeness;
pub mod conformance;
pub mod constraint;
pub mod data;
pub mod error;
pub mod format;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod render;

pub use builder::{analyze, AnalysisResult, Config, Mode};
pub use centering::PreferenceWeights;
pub use closeness::Lexicon;
pub use constraint::FeasibilityTable;
pub use data::{DataPaths, DataSet};
pub use error::{Error, Result};
pub use format::{parse_discourse, render_discourse};
pub use lattice::{CueLexicon, RelationLattice, RelationNode};
pub use model::{ClauseAnnotation, CoreRelation, Reading, TempRelation};
