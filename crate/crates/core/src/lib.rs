//! Combinatorics of Anosov flows on Dehn fillings of the figure-eight knot.

pub mod branched_surface;
pub mod catalog;
pub mod classifier;
pub mod scalar;
pub mod slopes;
pub mod spine;
pub mod traintrack;

pub use branched_surface::BranchedSurface;
pub use catalog::{Catalog, CatalogEntry, ExclusionClass};
pub use classifier::{ClassificationResult, Classifier, Trace, Verdict};
pub use spine::{Connector, Hexagon, QComplex, Spine, WeightCase};
pub use traintrack::{TrainTrack, WeightVector};

pub type Slope = slopes::Slope<i64>;
pub type AdmissibleSet = slopes::AdmissibleSet<i64>;
