//! Flat binary model format: magic `PRPN`, version, layer count, per-layer
//! dims/activation tags, then row-major weights and biases as little-endian
//! f64.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use super::{Activation, DenseLayer, Mlp};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"PRPN";
const VERSION: u32 = 1;

fn activation_tag(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Identity => 1,
    }
}

fn activation_from_tag(tag: u8) -> Result<Activation> {
    match tag {
        0 => Ok(Activation::Relu),
        1 => Ok(Activation::Identity),
        other => Err(Error::CorruptModelFile(format!("unknown activation tag {other}"))),
    }
}

impl Mlp {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(self.layers.len() as u32)?;
        for layer in &self.layers {
            w.write_u32::<LittleEndian>(layer.in_dim() as u32)?;
            w.write_u32::<LittleEndian>(layer.out_dim() as u32)?;
            w.write_u8(activation_tag(layer.activation))?;
        }
        for layer in &self.layers {
            for v in layer.weights.iter() {
                w.write_f64::<LittleEndian>(*v)?;
            }
            for v in layer.biases.iter() {
                w.write_f64::<LittleEndian>(*v)?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::CorruptModelFile("bad magic".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != VERSION {
            return Err(Error::CorruptModelFile(format!("unsupported version {version}")));
        }
        let count = r.read_u32::<LittleEndian>()? as usize;
        let mut headers = Vec::with_capacity(count);
        for _ in 0..count {
            let in_dim = r.read_u32::<LittleEndian>()? as usize;
            let out_dim = r.read_u32::<LittleEndian>()? as usize;
            let act = activation_from_tag(r.read_u8()?)?;
            headers.push((in_dim, out_dim, act));
        }
        let mut layers = Vec::with_capacity(count);
        for (in_dim, out_dim, act) in headers {
            let mut weights = Array2::zeros((out_dim, in_dim));
            for v in weights.iter_mut() {
                *v = r.read_f64::<LittleEndian>()?;
            }
            let mut biases = Array1::zeros(out_dim);
            for v in biases.iter_mut() {
                *v = r.read_f64::<LittleEndian>()?;
            }
            layers.push(DenseLayer::new(weights, biases, act)?);
        }
        Mlp::from_layers(layers)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}
