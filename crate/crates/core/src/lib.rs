//! Goal recognition from tabletop demonstrations.
//!
//! A demonstration is a time-stamped log of planar object poses plus pour
//! events. The recognizer segments it into single-object manipulations,
//! decides for each segment whether the predicate it achieved was the point
//! of the motion or a side effect of clearing a path for a later step, and
//! pools the intentional predicates into a goal.
//!
//! The deciding step is inverse planning: RRT* estimates the optimal cost of
//! reaching each hypothesis' goal set from the segment's start and end, and
//! the observed trajectory is scored against those costs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod demogen;
pub mod domain;
pub mod eval;
pub mod geometry;
pub mod intent;
pub mod io;
pub mod planner;
pub mod pooling;
pub mod recognizer;
pub mod render;
pub mod segmentation;

pub use domain::{Goal, ObjectId, Predicate, RegionId, SceneConfig, StateSet};
pub use geometry::{Point2, Polyline, Rect};
pub use recognizer::{recognize, RecognizerParams};
pub use segmentation::{Demonstration, Segment};

/// Version of the config and file-format schema.
pub const SCHEMA_VERSION: &str = "1.0.0";
