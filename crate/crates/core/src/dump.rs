//! Text dumps of hashed, sketched and NRFF features.
//!
//! Each file starts with one `# <kind> key=value ...` header line that
//! pins the generating configuration, followed by one row per sample: the
//! label, then the feature values separated by spaces.
//!
//! ```text
//! # gcws p=2 k=3 b=2 tbits=0 seed=5
//! 1 3 0 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::gcws::{GcwsConfig, HashedVector};
use crate::learn::{FeatureSet, Row};
use crate::nrff::{RffConfig, RffFeatures};
use crate::sketch::{CountSketchConfig, SketchedFeatures};

#[derive(Clone, Debug, PartialEq)]
pub struct CodeDump {
    pub config: GcwsConfig,
    pub labels: Vec<f64>,
    pub rows: Vec<HashedVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SketchDump {
    pub gcws: GcwsConfig,
    pub sketch: CountSketchConfig,
    pub labels: Vec<f64>,
    pub rows: Vec<SketchedFeatures>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NrffDump {
    pub config: RffConfig,
    pub normalized: bool,
    pub labels: Vec<f64>,
    pub rows: Vec<RffFeatures>,
}

/// Any of the three dump kinds, as detected from the header.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureDump {
    Codes(CodeDump),
    Sketch(SketchDump),
    Nrff(NrffDump),
}

impl FeatureDump {
    pub fn labels(&self) -> &[f64] {
        match self {
            FeatureDump::Codes(d) => &d.labels,
            FeatureDump::Sketch(d) => &d.labels,
            FeatureDump::Nrff(d) => &d.labels,
        }
    }

    /// Trainer input: one-hot positions for codes, sparse values otherwise.
    pub fn to_feature_set(&self) -> Result<FeatureSet> {
        match self {
            FeatureDump::Codes(d) => {
                let block = d.config.block_size() as usize;
                let rows = d
                    .rows
                    .iter()
                    .map(|h| {
                        Row::Binary(
                            h.codes
                                .iter()
                                .enumerate()
                                .map(|(j, &c)| j * block + c as usize)
                                .collect(),
                        )
                    })
                    .collect();
                FeatureSet::new(block * d.config.k(), rows)
            }
            FeatureDump::Sketch(d) => {
                let rows = d
                    .rows
                    .iter()
                    .map(|z| {
                        let (idx, val) = z
                            .values
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0)
                            .map(|(i, &v)| (i, v as f64))
                            .unzip();
                        Row::Sparse(idx, val)
                    })
                    .collect();
                FeatureSet::new(d.sketch.bins() as usize, rows)
            }
            FeatureDump::Nrff(d) => {
                let k = d.config.k();
                let rows = d
                    .rows
                    .iter()
                    .map(|f| Row::Sparse((0..k).collect(), f.values.clone()))
                    .collect();
                FeatureSet::new(k, rows)
            }
        }
    }
}

fn write_row<W: Write, T: Display>(w: &mut W, label: f64, values: &[T]) -> Result<()> {
    write!(w, "{label}")?;
    for v in values {
        write!(w, " {v}")?;
    }
    writeln!(w)?;
    Ok(())
}

impl CodeDump {
    pub fn header(&self) -> String {
        let c = &self.config;
        format!(
            "# gcws p={} k={} b={} tbits={} seed={}",
            c.p(),
            c.k(),
            c.b(),
            c.tbits(),
            c.seed()
        )
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header())?;
        for (l, h) in self.labels.iter().zip(&self.rows) {
            write_row(&mut w, *l, &h.codes)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl SketchDump {
    pub fn header(&self) -> String {
        let c = &self.gcws;
        format!(
            "# sketch p={} b={} tbits={} k={} B={} gcws_seed={} sketch_seed={}",
            c.p(),
            c.b(),
            c.tbits(),
            c.k(),
            self.sketch.bins(),
            c.seed(),
            self.sketch.seed()
        )
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header())?;
        for (l, z) in self.labels.iter().zip(&self.rows) {
            write_row(&mut w, *l, &z.values)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl NrffDump {
    pub fn header(&self) -> String {
        let c = &self.config;
        format!(
            "# nrff k={} gamma={} seed={} normalized={}",
            c.k(),
            c.gamma(),
            c.seed(),
            self.normalized
        )
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header())?;
        for (l, f) in self.labels.iter().zip(&self.rows) {
            write_row(&mut w, *l, &f.values)?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Header {
    kind: String,
    fields: BTreeMap<String, String>,
}

impl Header {
    fn parse(line: &str) -> Result<Self> {
        let rest = line
            .strip_prefix('#')
            .ok_or_else(|| Error::parse(1, "missing `#` header"))?;
        let mut words = rest.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::parse(1, "empty header"))?
            .to_string();
        let mut fields = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("bad header field `{w}`")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        Ok(Self { kind, fields })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .fields
            .get(key)
            .ok_or_else(|| Error::parse(1, format!("header lacks `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::parse(1, format!("bad value `{raw}` for `{key}`")))
    }
}

/// Parses every data row into a label and `width` values.
fn read_rows<R: BufRead, T: std::str::FromStr>(
    lines: std::io::Lines<R>,
    width: usize,
) -> Result<(Vec<f64>, Vec<Vec<T>>)> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let lineno = n + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = parts
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| Error::parse(lineno, "bad label"))?;
        let values = parts
            .map(|s| s.parse::<T>().map_err(|_| Error::parse(lineno, format!("bad value `{s}`"))))
            .collect::<Result<Vec<T>>>()?;
        if values.len() != width {
            return Err(Error::parse(
                lineno,
                format!("expected {width} values, found {}", values.len()),
            ));
        }
        labels.push(label);
        rows.push(values);
    }
    Ok((labels, rows))
}

fn gcws_from(h: &Header, seed_key: &str) -> Result<GcwsConfig> {
    GcwsConfig::new(h.get("p")?, h.get("k")?, h.get("b")?, h.get("tbits")?, h.get(seed_key)?)
}

/// Reads any dump, choosing the format from the header.
pub fn read<R: BufRead>(r: R) -> Result<FeatureDump> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty file"))?;
    let h = Header::parse(&first)?;
    match h.kind.as_str() {
        "gcws" => {
            let config = gcws_from(&h, "seed")?;
            let (labels, rows) = read_rows::<_, u32>(lines, config.k())?;
            let limit = config.block_size();
            for (n, codes) in rows.iter().enumerate() {
                if let Some(bad) = codes.iter().find(|&&c| c as u64 >= limit) {
                    return Err(Error::parse(n + 2, format!("code {bad} does not fit the header widths")));
                }
            }
            let rows = rows.into_iter().map(|codes| HashedVector { codes }).collect();
            Ok(FeatureDump::Codes(CodeDump { config, labels, rows }))
        }
        "sketch" => {
            let gcws = gcws_from(&h, "gcws_seed")?;
            let sketch = CountSketchConfig::new(h.get("B")?, h.get("sketch_seed")?)?;
            let (labels, rows) = read_rows::<_, i32>(lines, sketch.bins() as usize)?;
            let rows = rows
                .into_iter()
                .map(|v| SketchedFeatures::new(v, &sketch))
                .collect::<Result<_>>()?;
            Ok(FeatureDump::Sketch(SketchDump { gcws, sketch, labels, rows }))
        }
        "nrff" => {
            let config = RffConfig::new(h.get("k")?, h.get("gamma")?, h.get("seed")?)?;
            let normalized = h.get("normalized")?;
            let (labels, rows) = read_rows::<_, f64>(lines, config.k())?;
            let rows = rows.into_iter().map(|values| RffFeatures { values }).collect();
            Ok(FeatureDump::Nrff(NrffDump { config, normalized, labels, rows }))
        }
        other => Err(Error::parse(1, format!("unknown dump kind `{other}`"))),
    }
}

pub fn read_path(path: impl AsRef<std::path::Path>) -> Result<FeatureDump> {
    read(std::io::BufReader::new(std::fs::File::open(path)?))
}
