//! SVG plots and plain-text topic reports.

mod plots;
mod report;
mod svg;

pub use plots::{render_distance_plot, render_histograms, render_trajectory_plot};
pub use report::{render_report, ReportRow, TopicReport};
