use std::path::Path;

use nalgebra::DMatrix;

use super::model::AlignmentReference;
use super::sampler::LsirmChain;
use crate::align::{center_rows, orthogonal_procrustes};
use crate::error::{Error, Result};
use crate::io;

/// Topic coordinates (P x d) at one word-selection level.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionMatrix {
    pub level: u32,
    pub coords: DMatrix<f64>,
}

impl PositionMatrix {
    pub fn new(level: u32, coords: DMatrix<f64>) -> Self {
        Self { level, coords }
    }

    pub fn n_topics(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    /// Euclidean norm of every row.
    pub fn origin_distances(&self) -> Vec<f64> {
        self.coords.row_iter().map(|r| r.norm()).collect()
    }

    /// CSV `topic,x_1..x_d`, topics numbered from 1.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let labels: Vec<String> = (1..=self.n_topics()).map(|t| t.to_string()).collect();
        io::write_labeled_matrix(path, "topic", "x_", &labels, &self.coords)
    }

    pub fn read_csv(path: &Path, level: u32) -> Result<Self> {
        let (_, coords) = io::read_labeled_matrix(path)?;
        Ok(Self { level, coords })
    }
}

/// Index of the alignment target within the retained samples.
pub fn reference_index(chain: &LsirmChain, reference: AlignmentReference) -> Option<usize> {
    if chain.samples.is_empty() {
        return None;
    }
    Some(match reference {
        AlignmentReference::Last => chain.samples.len() - 1,
        AlignmentReference::MaxPosterior => {
            let mut best = 0;
            for (k, s) in chain.samples.iter().enumerate() {
                if s.log_posterior > chain.samples[best].log_posterior {
                    best = k;
                }
            }
            best
        }
    })
}

fn stacked(u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p, d) = (u.nrows(), v.nrows(), u.ncols());
    DMatrix::from_fn(n + p, d, |r, c| if r < n { u[(r, c)] } else { v[(r - n, c)] })
}

/// Posterior-mean topic positions after removing the rotation, reflection
/// and translation freedom of each retained sample.
///
/// Word and topic positions are stacked, centred on their joint centroid and
/// aligned as one configuration to the reference sample; the topic rows of the
/// aligned samples are then averaged.
pub fn extract_positions(
    chain: &LsirmChain,
    level: u32,
    reference: AlignmentReference,
) -> Result<PositionMatrix> {
    let r = reference_index(chain, reference)
        .ok_or_else(|| Error::Input("LSIRM chain has no retained samples".into()))?;
    let n = chain.n_words;
    let p = chain.n_topics;
    let target = center_rows(&stacked(&chain.samples[r].u, &chain.samples[r].v));
    if target.iter().all(|v| v.abs() < 1e-300) {
        return Err(Error::Numerical(format!(
            "reference sample at level {level} has all positions identical"
        )));
    }

    let mut sum = DMatrix::zeros(p, chain.dim);
    for s in &chain.samples {
        let joint = center_rows(&stacked(&s.u, &s.v));
        let q = orthogonal_procrustes(&joint, &target)?;
        sum += joint.rows(n, p) * q;
    }
    Ok(PositionMatrix {
        level,
        coords: sum / chain.samples.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsirm::{AcceptanceSummary, LsirmSample};

    fn chain_from(configs: &[(DMatrix<f64>, DMatrix<f64>, f64)]) -> LsirmChain {
        let samples = configs
            .iter()
            .enumerate()
            .map(|(k, (u, v, lp))| LsirmSample {
                iteration: k + 1,
                beta: vec![0.0; v.nrows()],
                u: u.clone(),
                v: v.clone(),
                sigma2: 1.0,
                sigma2_theta: 1.0,
                log_posterior: *lp,
            })
            .collect();
        LsirmChain {
            samples,
            theta_mean: vec![0.0; configs[0].0.nrows()],
            acceptance: AcceptanceSummary::default(),
            n_words: configs[0].0.nrows(),
            n_topics: configs[0].1.nrows(),
            dim: configs[0].0.ncols(),
        }
    }

    fn base() -> (DMatrix<f64>, DMatrix<f64>) {
        let u = DMatrix::from_row_slice(4, 2, &[0.1, 0.3, -0.7, 0.2, 0.5, -0.4, 1.1, 0.9]);
        let v = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, -0.2, 0.8, 0.4, -1.3]);
        (u, v)
    }

    #[test]
    fn single_sample_gives_centred_topics() {
        let (u, v) = base();
        let chain = chain_from(&[(u.clone(), v.clone(), 0.0)]);
        let pos = extract_positions(&chain, 50, AlignmentReference::MaxPosterior).unwrap();
        let centred = center_rows(&stacked(&u, &v));
        for r in 0..3 {
            for c in 0..2 {
                assert!((pos.coords[(r, c)] - centred[(r + 4, c)]).abs() < 1e-12);
            }
        }
        assert_eq!(pos.level, 50);
    }

    #[test]
    fn rotated_copies_collapse_to_reference() {
        let (u, v) = base();
        let mut configs = vec![(u.clone(), v.clone(), 10.0)];
        for k in 1..12 {
            let a = 0.5 * k as f64;
            let rot = DMatrix::from_row_slice(2, 2, &[a.cos(), a.sin(), -a.sin(), a.cos()]);
            let shift = nalgebra::RowDVector::from_row_slice(&[k as f64, -2.0]);
            let mut ru = &u * &rot;
            let mut rv = &v * &rot;
            for mut row in ru.row_iter_mut() {
                row += &shift;
            }
            for mut row in rv.row_iter_mut() {
                row += &shift;
            }
            configs.push((ru, rv, -(k as f64)));
        }
        let chain = chain_from(&configs);
        let pos = extract_positions(&chain, 47, AlignmentReference::MaxPosterior).unwrap();
        let centred = center_rows(&stacked(&u, &v));
        for r in 0..3 {
            for c in 0..2 {
                assert!((pos.coords[(r, c)] - centred[(r + 4, c)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_reference_is_fatal() {
        let chain = chain_from(&[(DMatrix::from_element(3, 2, 0.5), DMatrix::from_element(2, 2, 0.5), 0.0)]);
        assert!(extract_positions(&chain, 50, AlignmentReference::Last).is_err());
    }

    #[test]
    fn reference_choice() {
        let (u, v) = base();
        let chain = chain_from(&[(u.clone(), v.clone(), 1.0), (u.clone(), v.clone(), 3.0), (u, v, 2.0)]);
        assert_eq!(reference_index(&chain, AlignmentReference::MaxPosterior), Some(1));
        assert_eq!(reference_index(&chain, AlignmentReference::Last), Some(2));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("A_50.csv");
        let m = PositionMatrix::new(50, DMatrix::from_fn(20, 2, |r, c| (r as f64 - 7.3) / (c as f64 + 3.1)));
        m.write_csv(&path).unwrap();
        assert_eq!(PositionMatrix::read_csv(&path, 50).unwrap(), m);
    }
}
