use nalgebra::{DMatrix, RowDVector};

use crate::error::{Error, Result};
use crate::lsirm::PositionMatrix;

/// Rigid map `x -> x·rotation + translation` applied to row vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcrustesTransform {
    /// d x d orthogonal, determinant ±1.
    pub rotation: DMatrix<f64>,
    pub translation: RowDVector<f64>,
}

impl ProcrustesTransform {
    pub fn identity(d: usize) -> Self {
        Self {
            rotation: DMatrix::identity(d, d),
            translation: RowDVector::zeros(d),
        }
    }

    pub fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m * &self.rotation;
        for mut row in out.row_iter_mut() {
            row += &self.translation;
        }
        out
    }
}

pub fn column_means(m: &DMatrix<f64>) -> RowDVector<f64> {
    let n = m.nrows().max(1) as f64;
    RowDVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n))
}

/// Copy of `m` with its column means subtracted.
pub fn center_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mean = column_means(m);
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        row -= &mean;
    }
    out
}

/// Orthogonal Q minimising ‖source·Q - target‖_F. Inputs are used as given
/// (centre them first for a translation-free fit). Reflections are allowed.
pub fn orthogonal_procrustes(source: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if source.shape() != target.shape() {
        return Err(Error::Shape(format!(
            "Procrustes source is {:?}, target is {:?}",
            source.shape(),
            target.shape()
        )));
    }
    let cross = source.transpose() * target;
    let svd = cross.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::Numerical("SVD failed in Procrustes fit".into())),
    }
}

/// Frobenius norm of the difference.
pub fn residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

fn distinct_rows(m: &DMatrix<f64>) -> usize {
    let mut rows: Vec<Vec<u64>> = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.to_bits()).collect())
        .collect();
    rows.sort();
    rows.dedup();
    rows.len()
}

/// Least-squares rigid alignment (translation plus rotation or reflection,
/// no scaling) of `source` onto `target`.
pub fn procrustes_fit(
    source: &DMatrix<f64>,
    target: &DMatrix<f64>,
) -> Result<(ProcrustesTransform, DMatrix<f64>)> {
    if source.shape() != target.shape() {
        return Err(Error::Shape(format!(
            "cannot align a {:?} matrix to a {:?} matrix",
            source.shape(),
            target.shape()
        )));
    }
    if distinct_rows(source) < 2 || distinct_rows(target) < 2 {
        return Err(Error::Input(
            "Procrustes fit needs at least two distinct rows".into(),
        ));
    }
    let mu_s = column_means(source);
    let mu_t = column_means(target);
    let rotation = orthogonal_procrustes(&center_rows(source), &center_rows(target))?;
    let translation = &mu_t - &mu_s * &rotation;
    let transform = ProcrustesTransform {
        rotation,
        translation,
    };
    let aligned = transform.apply(source);
    Ok((transform, aligned))
}

/// Pairwise Euclidean distances between rows.
pub fn pairwise_distances(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |a, b| (m.row(a) - m.row(b)).norm())
}

/// Mean Euclidean norm of the rows.
pub fn mean_origin_distance(m: &PositionMatrix) -> f64 {
    let d = m.origin_distances();
    d.iter().sum::<f64>() / d.len().max(1) as f64
}

/// Level whose matrix has the largest mean distance from the origin; ties go
/// to the lowest level.
pub fn select_baseline(matrices: &[PositionMatrix]) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for m in matrices {
        let score = mean_origin_distance(m);
        best = match best {
            None => Some((m.level, score)),
            Some((level, s)) if score > s || (score == s && m.level < level) => {
                Some((m.level, score))
            }
            keep => keep,
        };
    }
    best.map(|(level, _)| level)
}

/// Align every matrix to the baseline. The baseline itself is returned as is.
pub fn align_all(matrices: &[PositionMatrix], baseline: u32) -> Result<Vec<PositionMatrix>> {
    let target = matrices
        .iter()
        .find(|m| m.level == baseline)
        .ok_or_else(|| Error::Input(format!("baseline level {baseline} not among the matrices")))?;
    matrices
        .iter()
        .map(|m| {
            if m.level == baseline {
                return Ok(m.clone());
            }
            let (_, aligned) = procrustes_fit(&m.coords, &target.coords)?;
            Ok(PositionMatrix::new(m.level, aligned))
        })
        .collect()
}
