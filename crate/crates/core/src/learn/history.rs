use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub samples_seen: u64,
    #[serde(skip)]
    pub iteration: u64,
    pub epoch_fraction: f64,
    pub test_accuracy: f64,
    /// Mean minibatch loss since the previous point.
    pub train_loss: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    pub points: Vec<HistoryPoint>,
}

impl TrainHistory {
    pub fn last(&self) -> Option<&HistoryPoint> {
        self.points.last()
    }

    pub fn final_accuracy(&self) -> f64 {
        self.last().map_or(0.0, |p| p.test_accuracy)
    }

    /// Columns `samples_seen, epoch_fraction, test_accuracy, train_loss`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let points = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(Self { points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns() {
        let h = TrainHistory {
            points: vec![
                HistoryPoint {
                    samples_seen: 0,
                    iteration: 0,
                    epoch_fraction: 0.0,
                    test_accuracy: 0.5,
                    train_loss: 0.75,
                },
                HistoryPoint {
                    samples_seen: 32,
                    iteration: 1,
                    epoch_fraction: 0.5,
                    test_accuracy: 1.0,
                    train_loss: 0.25,
                },
            ],
        };
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "samples_seen,epoch_fraction,test_accuracy,train_loss\n0,0.0,0.5,0.75\n32,0.5,1.0,0.25\n"
        );
        let back = TrainHistory::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.points[1].samples_seen, 32);
        assert_eq!(back.points[1].iteration, 0);
    }
}
