//! Binary model checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! b"GCWSNET\0"  u32 version  u32 header_len  header (JSON NetConfig)
//! u32 layer_count  { u64 n_in  u64 n_out } per layer
//! f64 parameters: per layer, weights (input-major) then biases
//! ```
//!
//! Optimizer moments are not stored; a loaded model resumes with fresh
//! Adam state.

use std::io::{Read, Write};

use super::net::{Layer, Model, NetConfig};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"GCWSNET\0";
pub const VERSION: u32 = 1;

pub fn save<W: Write>(mut w: W, model: &Model) -> Result<()> {
    let header = serde_json::to_vec(model.config())?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    w.write_all(&(model.layers().len() as u32).to_le_bytes())?;
    for l in model.layers() {
        w.write_all(&(l.n_in as u64).to_le_bytes())?;
        w.write_all(&(l.n_out as u64).to_le_bytes())?;
    }
    for p in model.flat_params() {
        w.write_all(&p.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::CorruptInput("truncated checkpoint".into()),
        _ => e.into(),
    })?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

pub fn load<R: Read>(mut r: R) -> Result<Model> {
    if &read_array::<8, _>(&mut r)? != MAGIC {
        return Err(Error::CorruptInput("not a model checkpoint".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::CorruptInput(format!("unsupported checkpoint version {version}")));
    }
    let len = read_u32(&mut r)? as usize;
    let mut header = vec![0u8; len];
    r.read_exact(&mut header)
        .map_err(|_| Error::CorruptInput("truncated checkpoint header".into()))?;
    let config: NetConfig = serde_json::from_slice(&header)?;
    config.validate()?;
    let count = read_u32(&mut r)? as usize;
    if count != config.layers as usize {
        return Err(Error::CorruptInput(format!(
            "{count} layers stored but config says {}",
            config.layers
        )));
    }
    let mut shapes = Vec::with_capacity(count);
    for _ in 0..count {
        let n_in = read_u64(&mut r)? as usize;
        let n_out = read_u64(&mut r)? as usize;
        if let Some(&(_, prev_out)) = shapes.last() {
            if prev_out != n_in {
                return Err(Error::CorruptInput("layer shapes do not chain".into()));
            }
        }
        shapes.push((n_in, n_out));
    }
    let mut layers = Vec::with_capacity(count);
    for (n_in, n_out) in shapes {
        let mut take = |n: usize| -> Result<Vec<f64>> {
            (0..n).map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?))).collect()
        };
        let w = take(n_in * n_out)?;
        let b = take(n_out)?;
        layers.push(Layer { n_in, n_out, w, b });
    }
    let model = Model::from_layers(config, layers);
    if !model.all_finite() {
        return Err(Error::CorruptInput("non-finite parameter in checkpoint".into()));
    }
    Ok(model)
}

pub fn save_path(path: impl AsRef<std::path::Path>, model: &Model) -> Result<()> {
    save(std::io::BufWriter::new(std::fs::File::create(path)?), model)
}

pub fn load_path(path: impl AsRef<std::path::Path>) -> Result<Model> {
    load(std::io::BufReader::new(std::fs::File::open(path)?))
}
