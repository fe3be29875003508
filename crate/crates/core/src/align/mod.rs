//! Between-level alignment: baseline choice, Procrustes matching, oblique
//! rotation and per-topic trajectories.

mod oblimin;
mod procrustes;
mod trajectory;

pub use oblimin::{oblimin_criterion, oblimin_rotate, ObliminConfig, ObliminResult, RotationMatrix};
pub use procrustes::{
    align_all, center_rows, column_means, mean_origin_distance, orthogonal_procrustes,
    pairwise_distances, procrustes_fit, residual, select_baseline, ProcrustesTransform,
};
pub use trajectory::{
    build_trajectories, read_rotation, rotate_all, write_rotation, Trajectory, TrajectorySet,
};
