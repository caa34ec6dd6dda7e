//! Binary checkpoint format.
//!
//! ```text
//! "CREYESQ1"             8 bytes
//! version                u32
//! variant                u8   (0 = linear, 1 = deep)
//! memory depth           u32
//! tensor count           u32
//! per tensor: rank u32, dims u32 × rank
//! per tensor: values f32 × len
//! ```
//!
//! All integers and floats are little-endian. Parameters are computed in f64
//! and rounded to f32 on save.

use std::io::{Read, Write};
use std::path::Path;

use super::network::{NetworkKind, QNetwork, QNetworkSpec, Tensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CREYESQ1";
pub const VERSION: u32 = 1;

fn variant_byte(kind: NetworkKind) -> u8 {
    match kind {
        NetworkKind::Linear => 0,
        NetworkKind::Deep => 1,
    }
}

pub fn encode(net: &QNetwork) -> Vec<u8> {
    let spec = net.spec();
    let mut out = Vec::with_capacity(32 + 4 * net.num_params());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(variant_byte(spec.kind));
    out.extend_from_slice(&(spec.memory_depth as u32).to_le_bytes());
    out.extend_from_slice(&(net.params().len() as u32).to_le_bytes());
    for t in net.params() {
        out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
        for &d in &t.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
    }
    for t in net.params() {
        for &v in &t.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::data(None, format!("checkpoint truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<QNetwork> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(8)? != MAGIC {
        return Err(Error::data(None, "not a checkpoint (bad magic)"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::data(None, format!("unsupported checkpoint version {version}")));
    }
    let kind = match c.take(1)?[0] {
        0 => NetworkKind::Linear,
        1 => NetworkKind::Deep,
        v => return Err(Error::data(None, format!("unknown network variant byte {v}"))),
    };
    let depth = c.u32()? as usize;
    let count = c.u32()? as usize;
    let spec = QNetworkSpec::new(kind, depth);
    if count != spec.param_shapes().len() {
        return Err(Error::data(None, format!("checkpoint holds {count} tensors, the {} network has {}", kind.name(), spec.param_shapes().len())));
    }
    let mut shapes = Vec::with_capacity(count);
    for _ in 0..count {
        let rank = c.u32()? as usize;
        if rank > 8 {
            return Err(Error::data(None, format!("implausible tensor rank {rank}")));
        }
        shapes.push((0..rank).map(|_| c.u32().map(|d| d as usize)).collect::<Result<Vec<_>>>()?);
    }
    let mut params = Vec::with_capacity(count);
    for shape in shapes {
        let len: usize = shape.iter().product();
        let raw = c.take(len.checked_mul(4).ok_or_else(|| Error::data(None, "tensor too large"))?)?;
        let data = raw
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes(b.try_into().expect("4 bytes"))))
            .collect();
        params.push(Tensor { shape, data });
    }
    if c.pos != bytes.len() {
        return Err(Error::data(None, "trailing bytes after checkpoint payload"));
    }
    QNetwork::from_params(spec, params).map_err(|e| Error::data(None, e.to_string()))
}

pub fn write<W: Write>(net: &QNetwork, mut out: W) -> std::io::Result<()> {
    out.write_all(&encode(net))
}

pub fn save(net: &QNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, encode(net)).map_err(|e| Error::io(path, e))
}

pub fn read<R: Read>(mut input: R) -> Result<QNetwork> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<checkpoint>", e))?;
    decode(&bytes)
}

pub fn load(path: &Path) -> Result<QNetwork> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
