//! Binary network checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      4 bytes        file-kind tag, e.g. "MNET" or "DSUR"
//! version    u32            format version, currently 1
//! n_layers   u32
//! dims       (n_layers+1) x u32
//! acts       n_layers x u8  activation tags (see Activation::tag)
//! n_consts   u32
//! consts     n_consts x f64 caller-defined constants (normalization etc.)
//! n_params   u64
//! params     n_params x f64 flat parameter vector
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{Activation, Mlp};
use crate::error::{Error, Result};

/// Magic tag for general network checkpoints.
pub const MAGIC_MNET: &[u8; 4] = b"MNET";

const FORMAT_VERSION: u32 = 1;

/// Writes a network plus caller-defined constants under the given magic.
pub fn save_network(path: &Path, magic: &[u8; 4], net: &Mlp, consts: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);

    w.write_all(magic).map_err(io_err)?;
    w.write_u32::<LittleEndian>(FORMAT_VERSION).map_err(io_err)?;
    let n_layers = net.activations().len() as u32;
    w.write_u32::<LittleEndian>(n_layers).map_err(io_err)?;
    for &d in net.dims() {
        w.write_u32::<LittleEndian>(d as u32).map_err(io_err)?;
    }
    for act in net.activations() {
        w.write_u8(act.tag()).map_err(io_err)?;
    }
    w.write_u32::<LittleEndian>(consts.len() as u32).map_err(io_err)?;
    for &c in consts {
        w.write_f64::<LittleEndian>(c).map_err(io_err)?;
    }
    w.write_u64::<LittleEndian>(net.num_params() as u64).map_err(io_err)?;
    for &p in net.params() {
        w.write_f64::<LittleEndian>(p).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a checkpoint, verifying its magic, and returns the network and the
/// stored constants.
pub fn load_network(path: &Path, magic: &[u8; 4]) -> Result<(Mlp, Vec<f64>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io_err = |e| Error::io(path, e);

    let mut got = [0u8; 4];
    r.read_exact(&mut got).map_err(io_err)?;
    if &got != magic {
        return Err(Error::format(
            path,
            format!(
                "bad magic {:?} (expected {:?})",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io_err)?;
    if version != FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported format version {version}")));
    }
    let n_layers = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    if n_layers == 0 || n_layers > 64 {
        return Err(Error::format(path, format!("implausible layer count {n_layers}")));
    }
    let mut dims = Vec::with_capacity(n_layers + 1);
    for _ in 0..=n_layers {
        let d = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        if d == 0 || d > 1 << 20 {
            return Err(Error::format(path, format!("implausible layer width {d}")));
        }
        dims.push(d);
    }
    let mut acts = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let tag = r.read_u8().map_err(io_err)?;
        let act = Activation::from_tag(tag)
            .ok_or_else(|| Error::format(path, format!("unknown activation tag {tag}")))?;
        acts.push(act);
    }
    let n_consts = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let mut consts = Vec::with_capacity(n_consts);
    for _ in 0..n_consts {
        consts.push(r.read_f64::<LittleEndian>().map_err(io_err)?);
    }
    let mut net = Mlp::zeros(&dims, &acts);
    let n_params = r.read_u64::<LittleEndian>().map_err(io_err)? as usize;
    if n_params != net.num_params() {
        return Err(Error::format(
            path,
            format!(
                "parameter count {} does not match architecture ({} expected)",
                n_params,
                net.num_params()
            ),
        ));
    }
    for p in net.params_mut() {
        *p = r.read_f64::<LittleEndian>().map_err(io_err)?;
    }
    Ok((net, consts))
}
