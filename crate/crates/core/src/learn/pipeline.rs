//! Dataset to feature-set conversion for every supported preprocessing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{FeatureSet, LabelMap, Row};
use super::history::TrainHistory;
use super::net::{Model, NetConfig};
use super::train::{train, Labelled};
use crate::error::{Error, Result};
use crate::gcws::{gcws_hash, GcwsConfig};
use crate::libsvm::Dataset;
use crate::nrff::{rff_features, RffConfig};
use crate::preprocess::{logpower_transform, power_transform};
use crate::sketch::{count_sketch, one_hot, CountSketchConfig};
use crate::vector::{sign_split, SparseVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Preproc {
    Raw,
    Power { p: f64 },
    LogPower { p: f64 },
    Gcws { gcws: GcwsConfig },
    GcwsCs { gcws: GcwsConfig, sketch: CountSketchConfig },
    Nrff { rff: RffConfig, normalize: bool },
}

impl Preproc {
    /// Feature width for inputs of dimension `dim`.
    pub fn width(&self, dim: u64) -> usize {
        match self {
            Preproc::Raw => dim as usize,
            Preproc::Power { .. } | Preproc::LogPower { .. } => 2 * dim as usize,
            Preproc::Gcws { gcws } => gcws.block_size() as usize * gcws.k(),
            Preproc::GcwsCs { sketch, .. } => sketch.bins() as usize,
            Preproc::Nrff { rff, .. } => rff.k(),
        }
    }

    pub fn featurize_row(&self, u: &SparseVector) -> Result<Row> {
        let sparse = |v: SparseVector| {
            Row::Sparse(
                v.indices().iter().map(|&i| i as usize).collect(),
                v.values().to_vec(),
            )
        };
        Ok(match self {
            Preproc::Raw => sparse(u.clone()),
            Preproc::Power { p } => {
                if u.is_zero() {
                    Row::Sparse(vec![], vec![])
                } else {
                    sparse(power_transform(&sign_split(u)?, *p)?)
                }
            }
            Preproc::LogPower { p } => {
                if u.is_zero() {
                    Row::Sparse(vec![], vec![])
                } else {
                    sparse(logpower_transform(&sign_split(u)?, *p)?)
                }
            }
            Preproc::Gcws { gcws } => {
                let f = one_hot(&gcws_hash(u, gcws)?, gcws)?;
                Row::Binary(f.positions().iter().map(|&p| p as usize).collect())
            }
            Preproc::GcwsCs { gcws, sketch } => {
                let f = one_hot(&gcws_hash(u, gcws)?, gcws)?;
                let z = count_sketch(&f, sketch);
                let (idx, val) = z
                    .values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| (i, v as f64))
                    .unzip();
                Row::Sparse(idx, val)
            }
            Preproc::Nrff { rff, normalize } => Row::Sparse(
                (0..rff.k()).collect(),
                rff_features(u, rff, *normalize)?.values,
            ),
        })
    }

    /// Converts every row; errors name the offending sample. Rows are
    /// processed in parallel and collected in input order.
    pub fn featurize(&self, rows: &[SparseVector], dim: u64) -> Result<FeatureSet> {
        let rows = rows
            .par_iter()
            .enumerate()
            .map(|(n, u)| self.featurize_row(u).map_err(|e| e.at_sample(n)))
            .collect::<Result<Vec<_>>>()?;
        FeatureSet::new(self.width(dim), rows)
    }
}

/// Featurizes a train/test pair and trains on it. Labels are mapped to
/// class ids over the union of both label sets.
pub fn pipeline(
    train_set: &Dataset,
    test_set: &Dataset,
    preproc: &Preproc,
    net: &NetConfig,
) -> Result<(Model, TrainHistory)> {
    let dim = train_set.dim().max(test_set.dim());
    let labels = LabelMap::fit(train_set.labels.iter().chain(&test_set.labels));
    if labels.classes() == 0 {
        return Err(Error::CorruptInput("no labelled rows".into()));
    }
    let x = preproc.featurize(&train_set.rows, dim)?;
    let tx = preproc.featurize(&test_set.rows, dim)?;
    let y = labels.encode(&train_set.labels)?;
    let ty = labels.encode(&test_set.labels)?;
    train(
        Labelled::new(&x, &y)?,
        labels.classes(),
        net,
        Labelled::new(&tx, &ty)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]], labels: &[f64]) -> Dataset {
        Dataset {
            labels: labels.to_vec(),
            rows: rows.iter().map(|r| SparseVector::from_dense(r).unwrap()).collect(),
        }
    }

    #[test]
    fn gcws_shape() {
        let g = GcwsConfig::new(1.0, 3, 2, 0, 5).unwrap();
        let pre = Preproc::Gcws { gcws: g };
        let d = ds(&[&[1.0, 2.0, 0.0], &[0.0, -3.0, 1.5]], &[0.0, 1.0]);
        let f = pre.featurize(&d.rows, d.dim()).unwrap();
        assert_eq!(f.width(), 12);
        for row in f.rows() {
            match row {
                Row::Binary(p) => {
                    assert_eq!(p.len(), 3);
                    for (j, &pos) in p.iter().enumerate() {
                        assert_eq!(pos / 4, j);
                    }
                }
                _ => panic!("expected binary row"),
            }
        }
    }

    #[test]
    fn sketched_width_is_bins() {
        let g = GcwsConfig::new(1.0, 8, 4, 0, 5).unwrap();
        let cs = CountSketchConfig::new(32, 1).unwrap();
        let pre = Preproc::GcwsCs { gcws: g, sketch: cs };
        let d = ds(&[&[1.0, 2.0, 0.0]], &[0.0]);
        let f = pre.featurize(&d.rows, d.dim()).unwrap();
        assert_eq!(f.width(), 32);
        match &f.rows()[0] {
            Row::Sparse(_, v) => assert_eq!(v.iter().map(|x| x.abs()).sum::<f64>() as usize % 2, 0),
            _ => panic!(),
        }
    }

    #[test]
    fn overflow_names_sample() {
        let d = ds(&[&[1.0, 2.0], &[1.0, 1e6]], &[0.0, 1.0]);
        let err = Preproc::Power { p: 80.0 }.featurize(&d.rows, 2).unwrap_err();
        assert!(matches!(err, Error::Overflow { sample: Some(1), index: 2 }), "{err}");
        assert!(Preproc::LogPower { p: 80.0 }.featurize(&d.rows, 2).is_ok());
    }

    #[test]
    fn empty_row_names_sample() {
        let d = ds(&[&[1.0], &[0.0], &[2.0]], &[0.0, 1.0, 0.0]);
        let g = GcwsConfig::new(1.0, 4, 2, 0, 0).unwrap();
        let err = Preproc::Gcws { gcws: g }.featurize(&d.rows, 1).unwrap_err();
        match err {
            Error::AtSample { sample, source } => {
                assert_eq!(sample, 1);
                assert!(matches!(*source, Error::EmptyVector));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn pipeline_trains_raw() {
        let train_set = ds(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 0.1], &[0.1, 2.0]], &[3.0, 7.0, 3.0, 7.0]);
        let net = NetConfig {
            epochs: 30.0,
            batch_size: 2,
            learning_rate: 0.05,
            ..NetConfig::default()
        };
        let (m, h) = pipeline(&train_set, &train_set, &Preproc::Raw, &net).unwrap();
        assert_eq!(m.classes(), 2);
        assert_eq!(h.final_accuracy(), 1.0);
    }
}
