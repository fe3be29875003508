//! Align a family of noisy, rigidly moved position matrices to the baseline,
//! rotate them to simple structure and draw the trajectories.
//!
//! ```text
//! cargo run --example procrustes_oblimin -- [out_dir]
//! ```

use std::path::PathBuf;

use nalgebra::{DMatrix, Rotation2};
use rand_distr::{Distribution, Normal};
use topicmap::align::{
    align_all, build_trajectories, oblimin_rotate, select_baseline, ObliminConfig,
};
use topicmap::lsirm::PositionMatrix;
use topicmap::render::{render_distance_plot, render_trajectory_plot};
use topicmap::rng::seeded;

fn main() -> topicmap::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out).map_err(|e| topicmap::Error::Input(e.to_string()))?;
    let mut rng = seeded(9);
    let z = Normal::new(0.0, 1.0).unwrap();
    let base = DMatrix::from_fn(8, 2, |_, _| z.sample(&mut rng));

    let step = Normal::new(0.0, 0.05).unwrap();
    let mut drift = base.clone();
    let matrices: Vec<PositionMatrix> = (40..=60)
        .rev()
        .map(|level| {
            drift.iter_mut().for_each(|v| *v += step.sample(&mut rng));
            let angle = 0.3 * level as f64;
            let r = Rotation2::new(angle).into_inner();
            let mut moved = &drift * DMatrix::from_column_slice(2, 2, r.as_slice());
            if level % 2 == 0 {
                moved.column_mut(0).neg_mut();
            }
            moved.add_scalar_mut(level as f64 * 0.01);
            PositionMatrix::new(level, moved)
        })
        .collect();

    let baseline = select_baseline(&matrices).expect("non-empty family");
    let aligned = align_all(&matrices, baseline)?;
    let base_coords = &aligned.iter().find(|m| m.level == baseline).unwrap().coords;
    let rot = oblimin_rotate(base_coords, &ObliminConfig::default())?;
    println!(
        "baseline {baseline}%; oblimin {} after {} iterations, criterion {:.4} -> {:.4}",
        if rot.converged { "converged" } else { "stopped" },
        rot.iterations,
        rot.criterion_trace.first().unwrap(),
        rot.criterion_trace.last().unwrap()
    );

    let (rotated, trajectories) = build_trajectories(&aligned, &rot.rotation)?;
    println!("{} trajectories over {} levels", trajectories.len(), rotated.len());
    let labels: Vec<String> = (1..=8).map(|t| format!("T{t}")).collect();
    std::fs::write(out.join("distances.svg"), render_distance_plot(&aligned))
        .map_err(|e| topicmap::Error::Input(e.to_string()))?;
    std::fs::write(out.join("trajectories.svg"), render_trajectory_plot(&trajectories, &labels))
        .map_err(|e| topicmap::Error::Input(e.to_string()))?;
    println!("wrote distances.svg and trajectories.svg to {}", out.display());
    Ok(())
}
