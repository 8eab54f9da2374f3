//! Network simulation over tree networks.

pub mod distortion;
pub mod feedback;
mod huffman;
pub mod plan;
pub mod sim;
pub mod tree;

pub use distortion::{distortion_scheme, rate_region_for_fhat, simulate_distortion, DistortionScheme, FhatOutcome};
pub use feedback::{feedback_plan, simulate_feedback, FeedbackPlan};
pub use huffman::{average_length, code_lengths};
pub use plan::{build_plan, build_plan_with, Plan, PlanOptions, Strategy};
pub use sim::{simulate, FeedbackStats, LinkReport, SimMode, SimReport};
pub use tree::{complete_tree, CompletedTree, NodeKind};
