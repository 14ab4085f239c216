//! GCWS on trained embeddings: hash the last hidden layer and fit a fresh
//! softmax head on the one-hot codes.

use super::features::{FeatureSet, Row};
use super::history::TrainHistory;
use super::net::{Model, NetConfig};
use super::train::{train, Labelled};
use crate::error::{Error, Result};
use crate::gcws::{gcws_hash, GcwsConfig};
use crate::sketch::one_hot;
use crate::vector::SparseVector;

/// One-hot GCWS codes of the last-hidden-layer activations. A sample whose
/// activations are all zero gets an empty row.
pub fn embed_and_hash(model: &Model, data: &FeatureSet, gcws: &GcwsConfig) -> Result<FeatureSet> {
    if model.layers().len() < 2 {
        return Err(Error::InvalidConfig(
            "model has no hidden layer to take embeddings from".into(),
        ));
    }
    let rows = data
        .rows()
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let emb = model.embedding(x).expect("hidden layer present");
            let u = SparseVector::from_dense(&emb).map_err(|e| e.at_sample(n))?;
            if u.is_zero() {
                return Ok(Row::Binary(Vec::new()));
            }
            let f = one_hot(&gcws_hash(&u, gcws)?, gcws).map_err(|e| e.at_sample(n))?;
            Ok(Row::Binary(f.positions().iter().map(|&p| p as usize).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureSet::new(gcws.block_size() as usize * gcws.k(), rows)
}

/// Trains a single-layer head on hashed embeddings of `model`.
pub fn last_layer_gcws(
    model: &Model,
    data: Labelled<'_>,
    eval: Labelled<'_>,
    gcws: &GcwsConfig,
    head: &NetConfig,
) -> Result<(Model, TrainHistory)> {
    if head.layers != 1 {
        return Err(Error::InvalidConfig("the head must be a single layer".into()));
    }
    let x = embed_and_hash(model, data.features, gcws)?;
    let tx = embed_and_hash(model, eval.features, gcws)?;
    train(
        Labelled::new(&x, data.labels)?,
        model.classes(),
        head,
        Labelled::new(&tx, eval.labels)?,
    )
}

/// Base-model and hashed-head accuracy at one checkpoint of base training.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CheckpointAccuracy {
    pub samples_seen: u64,
    pub base_accuracy: f64,
    pub head_accuracy: f64,
}

/// Trains the base network and, at every `every`-th history point, fits a
/// hashed head on its current embeddings.
pub fn last_layer_curve(
    data: Labelled<'_>,
    eval: Labelled<'_>,
    classes: usize,
    base: &NetConfig,
    gcws: &GcwsConfig,
    head: &NetConfig,
    every: usize,
) -> Result<(TrainHistory, Vec<CheckpointAccuracy>)> {
    if base.layers < 2 {
        return Err(Error::InvalidConfig("base model needs a hidden layer".into()));
    }
    let every = every.max(1);
    let mut curve = Vec::new();
    let mut count = 0usize;
    let (_, history) = super::train::train_with_hook(data, classes, base, eval, |model, point| {
        if count.is_multiple_of(every) {
            let (_, h) = last_layer_gcws(model, data, eval, gcws, head)?;
            curve.push(CheckpointAccuracy {
                samples_seen: point.samples_seen,
                base_accuracy: point.test_accuracy,
                head_accuracy: h.final_accuracy(),
            });
        }
        count += 1;
        Ok(())
    })?;
    Ok((history, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::net::Layer;

    fn rows(n: usize, f: impl Fn(usize) -> Vec<f64>) -> FeatureSet {
        FeatureSet::new(f(0).len(), (0..n).map(|i| Row::dense(&f(i))).collect()).unwrap()
    }

    #[test]
    fn single_layer_base_rejected() {
        let m = Model::new(&NetConfig::default(), 3, 2).unwrap();
        let x = rows(2, |_| vec![1.0, 0.0, 0.0]);
        let y = [0, 1];
        let d = Labelled::new(&x, &y).unwrap();
        let g = GcwsConfig::new(1.0, 4, 2, 0, 0).unwrap();
        assert!(matches!(
            last_layer_gcws(&m, d, d, &g, &NetConfig::default()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn identical_embeddings_give_majority_rate() {
        let net = NetConfig {
            layers: 2,
            hidden: 6,
            ..NetConfig::default()
        };
        let m = Model::new(&net, 3, 2).unwrap();
        let x = rows(200, |_| vec![0.5, -1.0, 2.0]);
        let y: Vec<usize> = (0..200).map(|i| usize::from(i % 4 == 0)).collect();
        let d = Labelled::new(&x, &y).unwrap();
        let g = GcwsConfig::new(1.0, 16, 4, 0, 3).unwrap();
        let head = NetConfig {
            epochs: 3.0,
            learning_rate: 0.01,
            ..NetConfig::default()
        };
        let (_, h) = last_layer_gcws(&m, d, d, &g, &head).unwrap();
        assert_eq!(h.final_accuracy(), 0.75);
    }

    #[test]
    fn one_hot_embeddings_preserve_accuracy() {
        // Base model whose hidden layer copies a 4-way one-hot input and
        // whose output layer reads the class straight off it.
        let net = NetConfig {
            layers: 2,
            hidden: 4,
            ..NetConfig::default()
        };
        let mut ident = vec![0.0; 16];
        (0..4).for_each(|i| ident[i * 4 + i] = 1.0);
        let layers = vec![
            Layer { n_in: 4, n_out: 4, w: ident.clone(), b: vec![0.0; 4] },
            Layer { n_in: 4, n_out: 4, w: ident, b: vec![0.0; 4] },
        ];
        let base = Model::from_layers(net, layers);
        let x = rows(400, |i| {
            let mut v = vec![0.0; 4];
            v[i % 4] = 1.0;
            v
        });
        let y: Vec<usize> = (0..400).map(|i| i % 4).collect();
        let d = Labelled::new(&x, &y).unwrap();
        assert_eq!(base.accuracy(x.rows(), &y), 1.0);
        let g = GcwsConfig::new(1.0, 32, 4, 0, 8).unwrap();
        let head = NetConfig {
            epochs: 2.0,
            learning_rate: 0.01,
            ..NetConfig::default()
        };
        let (_, h) = last_layer_gcws(&base, d, d, &g, &head).unwrap();
        assert_eq!(h.final_accuracy(), 1.0);
    }
}
