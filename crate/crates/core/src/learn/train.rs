//! Minibatch training loop.

use rand::seq::SliceRandom;

use super::features::FeatureSet;
use super::history::{HistoryPoint, TrainHistory};
use super::net::{Model, NetConfig};
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, Tag};

/// A labelled feature set.
#[derive(Clone, Copy, Debug)]
pub struct Labelled<'a> {
    pub features: &'a FeatureSet,
    pub labels: &'a [usize],
}

impl<'a> Labelled<'a> {
    pub fn new(features: &'a FeatureSet, labels: &'a [usize]) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::CorruptInput(format!(
                "{} rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        Ok(Self { features, labels })
    }

    fn check(&self, width: usize, classes: usize) -> Result<()> {
        if self.features.width() != width {
            return Err(Error::ConfigMismatch(format!(
                "feature width {} but model expects {width}",
                self.features.width()
            )));
        }
        if let Some((n, y)) = self.labels.iter().enumerate().find(|(_, &y)| y >= classes) {
            return Err(Error::CorruptInput(format!(
                "label {y} of row {n} outside [0, {classes})"
            )));
        }
        Ok(())
    }
}

/// Trains a fresh model. See [`train_with_hook`].
pub fn train(
    data: Labelled<'_>,
    classes: usize,
    net: &NetConfig,
    eval: Labelled<'_>,
) -> Result<(Model, TrainHistory)> {
    train_with_hook(data, classes, net, eval, |_, _| Ok(()))
}

/// Runs `net.epochs` passes of Adam over `data`, reshuffling every epoch.
///
/// The model is evaluated on `eval` before the first step, whenever another
/// `1 / evals_per_epoch` of an epoch has been consumed, and at the end. The
/// hook sees the model at each of those points.
pub fn train_with_hook<F>(
    data: Labelled<'_>,
    classes: usize,
    net: &NetConfig,
    eval: Labelled<'_>,
    mut hook: F,
) -> Result<(Model, TrainHistory)>
where
    F: FnMut(&Model, &HistoryPoint) -> Result<()>,
{
    net.validate()?;
    let width = data.features.width();
    data.check(width, classes)?;
    eval.check(width, classes)?;
    let mut model = Model::new(net, width, classes)?;
    let n = data.features.len();
    let total = if n == 0 {
        0
    } else {
        (net.epochs * n as f64).round() as u64
    };
    let interval = ((n / net.evals_per_epoch).max(1)) as u64;
    let rows = data.features.rows();

    let mut history = TrainHistory::default();
    let mut record = |model: &Model, seen: u64, loss: f64, history: &mut TrainHistory| {
        let point = HistoryPoint {
            samples_seen: seen,
            iteration: model.steps_taken(),
            epoch_fraction: if n == 0 { 0.0 } else { seen as f64 / n as f64 },
            test_accuracy: model.accuracy(eval.features.rows(), eval.labels),
            train_loss: loss,
        };
        history.points.push(point);
        hook(model, &point)
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut seen = 0u64;
    let mut epoch = 0u64;
    let (mut loss_sum, mut loss_batches) = (0.0, 0u64);
    let mut next_eval = interval;

    while seen < total || epoch == 0 {
        order.sort_unstable();
        order.shuffle(&mut seeded_rng(net.seed, Tag::Shuffle, epoch));
        if epoch == 0 {
            let head: Vec<_> = order
                .iter()
                .take(net.batch_size)
                .map(|&i| (&rows[i], data.labels[i]))
                .collect();
            let initial = if head.is_empty() { 0.0 } else { model.loss(&head) };
            record(&model, 0, initial, &mut history)?;
        }
        for chunk in order.chunks(net.batch_size) {
            let left = (total - seen) as usize;
            if left == 0 {
                break;
            }
            let chunk = &chunk[..chunk.len().min(left)];
            let batch: Vec<_> = chunk.iter().map(|&i| (&rows[i], data.labels[i])).collect();
            let loss = model.step(&batch);
            if !loss.is_finite() || !model.all_finite() {
                return Err(Error::Divergence {
                    iteration: model.steps_taken() as usize,
                });
            }
            seen += chunk.len() as u64;
            loss_sum += loss;
            loss_batches += 1;
            if seen >= next_eval && seen < total {
                record(&model, seen, loss_sum / loss_batches as f64, &mut history)?;
                (loss_sum, loss_batches) = (0.0, 0);
                next_eval = (seen / interval + 1) * interval;
            }
        }
        epoch += 1;
        if n == 0 {
            break;
        }
    }
    if seen > 0 {
        let loss = if loss_batches > 0 {
            loss_sum / loss_batches as f64
        } else {
            history.points.last().map_or(0.0, |p| p.train_loss)
        };
        record(&model, seen, loss, &mut history)?;
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::features::Row;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable(n: usize, seed: u64) -> (FeatureSet, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let y = rng.random_range(0..2usize);
            let s = if y == 0 { -1.0 } else { 1.0 };
            let x = [s * rng.random_range(1.0..2.0), rng.random_range(-1.0..1.0)];
            rows.push(Row::dense(&x));
            labels.push(y);
        }
        (FeatureSet::new(2, rows).unwrap(), labels)
    }

    #[test]
    fn separable_toy_in_one_epoch() {
        let (x, y) = separable(2000, 1);
        let (tx, ty) = separable(500, 2);
        let net = NetConfig::default();
        let (_, h) = train(
            Labelled::new(&x, &y).unwrap(),
            2,
            &net,
            Labelled::new(&tx, &ty).unwrap(),
        )
        .unwrap();
        assert_eq!(h.final_accuracy(), 1.0);
        assert_eq!(h.last().unwrap().epoch_fraction, 1.0);
    }

    #[test]
    fn history_cadence_and_fractional_epochs() {
        let (x, y) = separable(1000, 3);
        let data = Labelled::new(&x, &y).unwrap();
        let net = NetConfig {
            epochs: 2.5,
            batch_size: 7,
            ..NetConfig::default()
        };
        let (m, h) = train(data, 2, &net, data).unwrap();
        let seen: Vec<u64> = h.points.iter().map(|p| p.samples_seen).collect();
        assert_eq!(seen[0], 0);
        assert_eq!(*seen.last().unwrap(), 2500);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        // never more than 1/50 epoch (20 samples) plus one batch between points
        assert!(seen.windows(2).all(|w| w[1] - w[0] <= 20 + 7), "{seen:?}");
        assert_eq!(m.steps_taken(), h.last().unwrap().iteration);
        assert!(h.points.iter().all(|p| p.train_loss.is_finite()));
    }

    #[test]
    fn zero_epochs_is_initialization() {
        let (x, y) = separable(100, 4);
        let data = Labelled::new(&x, &y).unwrap();
        let net = NetConfig {
            epochs: 0.0,
            layers: 2,
            hidden: 8,
            seed: 11,
            ..NetConfig::default()
        };
        let (m, h) = train(data, 2, &net, data).unwrap();
        assert_eq!(m, Model::new(&net, 2, 2).unwrap());
        assert_eq!(h.points.len(), 1);
    }

    #[test]
    fn bit_reproducible() {
        let (x, y) = separable(300, 5);
        let data = Labelled::new(&x, &y).unwrap();
        let net = NetConfig {
            layers: 3,
            hidden: 6,
            epochs: 1.5,
            seed: 3,
            ..NetConfig::default()
        };
        let (a, ha) = train(data, 2, &net, data).unwrap();
        let (b, hb) = train(data, 2, &net, data).unwrap();
        let bits = |m: &Model| m.flat_params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(ha, hb);
        let other = NetConfig { seed: 4, ..net };
        let (c, _) = train(data, 2, &other, data).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn divergence_is_reported() {
        // the same point under both labels keeps the gradient nonzero
        let rows = vec![Row::dense(&[1e10, 1e10]); 2];
        let x = FeatureSet::new(2, rows).unwrap();
        let y = vec![0, 1];
        let data = Labelled::new(&x, &y).unwrap();
        let net = NetConfig {
            learning_rate: 1e300,
            batch_size: 1,
            epochs: 5.0,
            ..NetConfig::default()
        };
        let r = train(data, 2, &net, data);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn label_range_checked() {
        let (x, mut y) = separable(10, 6);
        y[3] = 2;
        let data = Labelled::new(&x, &y).unwrap();
        assert!(matches!(
            train(data, 2, &NetConfig::default(), data),
            Err(Error::CorruptInput(_))
        ));
    }
}
