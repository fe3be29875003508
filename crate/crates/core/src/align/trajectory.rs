use std::path::Path;

use nalgebra::DMatrix;

use super::oblimin::RotationMatrix;
use crate::error::{Error, Result};
use crate::io;
use crate::lsirm::PositionMatrix;

/// One topic's rotated coordinates, ordered from the highest level down.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Zero-based topic index.
    pub topic: usize,
    pub points: Vec<(u32, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub dim: usize,
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn levels(&self) -> Vec<u32> {
        self.trajectories
            .first()
            .map(|t| t.points.iter().map(|(l, _)| *l).collect())
            .unwrap_or_default()
    }

    fn coord_header(dim: usize) -> Vec<String> {
        if dim == 2 {
            vec!["x".into(), "y".into()]
        } else {
            (1..=dim).map(|c| format!("x_{c}")).collect()
        }
    }

    /// CSV `topic,level,x,y` (topics numbered from 1).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let header: Vec<String> = ["topic".to_string(), "level".to_string()]
            .into_iter()
            .chain(Self::coord_header(self.dim))
            .collect();
        let rows = self.trajectories.iter().flat_map(|t| {
            t.points.iter().map(move |(level, xy)| {
                [(t.topic + 1).to_string(), level.to_string()]
                    .into_iter()
                    .chain(xy.iter().map(|v| io::fmt_f64(*v)))
                    .collect::<Vec<_>>()
            })
        });
        io::write_csv(path, &header, rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (header, rows) = io::read_csv(path)?;
        let dim = header.len().saturating_sub(2);
        let mut trajectories: Vec<Trajectory> = Vec::new();
        for row in &rows {
            if row.len() != dim + 2 {
                return Err(Error::Shape(format!("{}: ragged row", path.display())));
            }
            let topic: usize = row[0]
                .parse::<usize>()
                .ok()
                .and_then(|t| t.checked_sub(1))
                .ok_or_else(|| Error::Input(format!("{}: bad topic `{}`", path.display(), row[0])))?;
            let level: u32 = row[1]
                .parse()
                .map_err(|_| Error::Input(format!("{}: bad level `{}`", path.display(), row[1])))?;
            let xy = row[2..]
                .iter()
                .map(|f| io::parse_f64(f, path))
                .collect::<Result<Vec<_>>>()?;
            match trajectories.last_mut() {
                Some(t) if t.topic == topic => t.points.push((level, xy)),
                _ => trajectories.push(Trajectory {
                    topic,
                    points: vec![(level, xy)],
                }),
            }
        }
        Ok(Self { dim, trajectories })
    }
}

/// Apply one oblique rotation to every aligned matrix: `B = A*·T^{-T}`.
pub fn rotate_all(aligned: &[PositionMatrix], rotation: &RotationMatrix) -> Result<Vec<PositionMatrix>> {
    let map = rotation.coordinate_map()?;
    aligned
        .iter()
        .map(|m| {
            if m.dim() != map.nrows() {
                return Err(Error::Shape(format!(
                    "level {} has dimension {}, rotation is {}x{}",
                    m.level,
                    m.dim(),
                    map.nrows(),
                    map.ncols()
                )));
            }
            Ok(PositionMatrix::new(m.level, &m.coords * &map))
        })
        .collect()
}

/// Rotate every aligned matrix and trace each topic across levels, highest
/// level first.
pub fn build_trajectories(
    aligned: &[PositionMatrix],
    rotation: &RotationMatrix,
) -> Result<(Vec<PositionMatrix>, TrajectorySet)> {
    let first = aligned
        .first()
        .ok_or_else(|| Error::Input("no aligned matrices to trace".into()))?;
    let (p, d) = first.coords.shape();
    if let Some(bad) = aligned.iter().find(|m| m.coords.shape() != (p, d)) {
        return Err(Error::Shape(format!(
            "level {} is {:?}, expected {:?}",
            bad.level,
            bad.coords.shape(),
            (p, d)
        )));
    }
    let mut rotated = rotate_all(aligned, rotation)?;
    rotated.sort_by(|a, b| b.level.cmp(&a.level));
    if rotated.windows(2).any(|w| w[0].level == w[1].level) {
        return Err(Error::Input("duplicate levels among aligned matrices".into()));
    }
    let trajectories = (0..p)
        .map(|topic| Trajectory {
            topic,
            points: rotated
                .iter()
                .map(|m| (m.level, m.coords.row(topic).iter().copied().collect()))
                .collect(),
        })
        .collect();
    Ok((rotated, TrajectorySet { dim: d, trajectories }))
}

pub fn write_rotation(path: &Path, rotation: &RotationMatrix) -> Result<()> {
    let d = rotation.t.nrows();
    let labels: Vec<String> = (1..=d).map(|r| r.to_string()).collect();
    io::write_labeled_matrix(path, "row", "col_", &labels, &rotation.t)
}

pub fn read_rotation(path: &Path) -> Result<RotationMatrix> {
    let (_, t): (_, DMatrix<f64>) = io::read_labeled_matrix(path)?;
    if !t.is_square() {
        return Err(Error::Shape(format!("{}: rotation is not square", path.display())));
    }
    Ok(RotationMatrix { t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels() -> Vec<PositionMatrix> {
        (40..=60u32)
            .map(|l| PositionMatrix::new(l, DMatrix::from_fn(20, 2, |r, c| (r as f64 + 1.0) * (c as f64 - 0.5) + l as f64 / 100.0)))
            .collect()
    }

    #[test]
    fn identity_rotation_keeps_coordinates() {
        let ms = levels();
        let (rotated, set) = build_trajectories(&ms, &RotationMatrix::identity(2)).unwrap();
        assert_eq!(set.len(), 20);
        assert!(set.trajectories.iter().all(|t| t.points.len() == 21));
        assert_eq!(set.levels(), (40..=60).rev().collect::<Vec<u32>>());
        for t in &set.trajectories {
            for (level, xy) in &t.points {
                let m = ms.iter().find(|m| m.level == *level).unwrap();
                assert_eq!(xy[0], m.coords[(t.topic, 0)]);
                assert_eq!(xy[1], m.coords[(t.topic, 1)]);
            }
        }
        assert_eq!(rotated[0].level, 60);
    }

    #[test]
    fn shared_rotation_composes_exactly() {
        let ms = levels();
        let r = RotationMatrix {
            t: DMatrix::from_row_slice(2, 2, &[0.8, 0.6, 0.6, -0.8]),
        };
        let map = r.coordinate_map().unwrap();
        let (rotated, _) = build_trajectories(&ms, &r).unwrap();
        for b in &rotated {
            let a = ms.iter().find(|m| m.level == b.level).unwrap();
            assert_eq!(b.coords, &a.coords * &map);
        }
    }

    #[test]
    fn inconsistent_shapes_rejected() {
        let mut ms = levels();
        ms[3].coords = DMatrix::zeros(19, 2);
        assert!(build_trajectories(&ms, &RotationMatrix::identity(2)).is_err());
        assert!(build_trajectories(&[], &RotationMatrix::identity(2)).is_err());
    }

    #[test]
    fn csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let (_, set) = build_trajectories(&levels(), &RotationMatrix::identity(2)).unwrap();
        let path = dir.path().join("trajectories.csv");
        set.write_csv(&path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("topic,level,x,y\n"));
        assert_eq!(TrajectorySet::read_csv(&path).unwrap(), set);

        let r = RotationMatrix {
            t: DMatrix::from_row_slice(2, 2, &[0.8, 0.6, 0.6, -0.8]),
        };
        let rp = dir.path().join("R.csv");
        write_rotation(&rp, &r).unwrap();
        assert_eq!(read_rotation(&rp).unwrap(), r);
    }
}
