//! Binary checkpoints for model parameters.
//!
//! The format is deliberately dumb: little-endian integers, raw `f64` bits,
//! named sections. Because no floating-point value is ever re-parsed through
//! text, a save/load/save round trip is byte-identical, which the training
//! determinism guarantees rely on.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::mat::Mat;
use crate::mlp::{Mlp, MlpSpec};
use crate::store::ParamStore;

const MAGIC: &[u8; 4] = b"SPNN";
const VERSION: u32 = 1;

const KIND_MLP: u8 = 0;
const KIND_RAW: u8 = 1;

/// One named group of matrices inside a checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub kind: SectionKind,
    pub mats: Vec<Mat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionKind {
    /// A fully connected network; matrices are `w0, b0, w1, b1, ...`.
    Mlp {
        widths: Vec<usize>,
        activation: Activation,
        leak_slope: f64,
        init_seed: u64,
    },
    /// Free-form matrices with no architecture attached.
    Raw,
}

impl Section {
    /// Snapshots an MLP's current parameter values.
    pub fn from_mlp(name: &str, store: &ParamStore, mlp: &Mlp) -> Self {
        let mats = mlp
            .layer_params()
            .iter()
            .flat_map(|&(w, b)| [store.get(w).clone(), store.get(b).clone()])
            .collect();
        Section {
            name: name.to_string(),
            kind: SectionKind::Mlp {
                widths: mlp.spec().widths.clone(),
                activation: mlp.spec().activation,
                leak_slope: mlp.spec().leak_slope,
                init_seed: mlp.init_seed(),
            },
            mats,
        }
    }

    pub fn raw(name: &str, mats: Vec<Mat>) -> Self {
        Section { name: name.to_string(), kind: SectionKind::Raw, mats }
    }

    /// Registers this section's matrices as fresh parameters and rebuilds the
    /// network around them.
    pub fn into_mlp(&self, store: &mut ParamStore) -> Result<Mlp> {
        let SectionKind::Mlp { widths, activation, leak_slope, init_seed } = &self.kind else {
            return Err(NnError::Format(format!("section '{}' does not hold a network", self.name)));
        };
        let spec = MlpSpec::new(widths.clone(), *activation, *leak_slope)?;
        if self.mats.len() != 2 * spec.layer_count() {
            return Err(NnError::Format(format!(
                "section '{}' has {} matrices, expected {}",
                self.name,
                self.mats.len(),
                2 * spec.layer_count()
            )));
        }
        let layers = self
            .mats
            .chunks(2)
            .map(|pair| {
                let w = store.register(pair[0].clone());
                let b = store.register(pair[1].clone());
                (w, b)
            })
            .collect();
        Mlp::from_params(store, spec, layers, *init_seed)
    }
}

/// A set of sections written to or read from disk together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checkpoint {
    pub sections: Vec<Section>,
}

impl Checkpoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| NnError::Format(format!("checkpoint has no section '{name}'")))
    }

    pub fn save(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, VERSION)?;
        write_u32(w, self.sections.len() as u32)?;
        for section in &self.sections {
            write_bytes(w, section.name.as_bytes())?;
            match &section.kind {
                SectionKind::Mlp { widths, activation, leak_slope, init_seed } => {
                    w.write_all(&[KIND_MLP])?;
                    write_u32(w, widths.len() as u32)?;
                    for &width in widths {
                        write_u32(w, width as u32)?;
                    }
                    w.write_all(&[activation.tag()])?;
                    w.write_all(&leak_slope.to_le_bytes())?;
                    w.write_all(&init_seed.to_le_bytes())?;
                }
                SectionKind::Raw => w.write_all(&[KIND_RAW])?,
            }
            write_u32(w, section.mats.len() as u32)?;
            for mat in &section.mats {
                write_u32(w, mat.rows() as u32)?;
                write_u32(w, mat.cols() as u32)?;
                for &v in mat.data() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn load(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(NnError::Format("not a checkpoint file".into()));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(NnError::Format(format!("unsupported checkpoint version {version}")));
        }
        let section_count = read_u32(r)?;
        let mut sections = Vec::with_capacity(section_count as usize);
        for _ in 0..section_count {
            let name = String::from_utf8(read_bytes(r)?)
                .map_err(|_| NnError::Format("section name is not UTF-8".into()))?;
            let kind = match read_u8(r)? {
                KIND_MLP => {
                    let width_count = read_u32(r)? as usize;
                    let mut widths = Vec::with_capacity(width_count);
                    for _ in 0..width_count {
                        widths.push(read_u32(r)? as usize);
                    }
                    let tag = read_u8(r)?;
                    let activation = Activation::from_tag(tag)
                        .ok_or_else(|| NnError::Format(format!("unknown activation tag {tag}")))?;
                    let leak_slope = read_f64(r)?;
                    let init_seed = read_u64(r)?;
                    SectionKind::Mlp { widths, activation, leak_slope, init_seed }
                }
                KIND_RAW => SectionKind::Raw,
                tag => return Err(NnError::Format(format!("unknown section kind {tag}"))),
            };
            let mat_count = read_u32(r)? as usize;
            let mut mats = Vec::with_capacity(mat_count);
            for _ in 0..mat_count {
                let rows = read_u32(r)? as usize;
                let cols = read_u32(r)? as usize;
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows * cols {
                    data.push(read_f64(r)?);
                }
                mats.push(Mat::from_vec(rows, cols, data)?);
            }
            sections.push(Section { name, kind, mats });
        }
        Ok(Checkpoint { sections })
    }

    pub fn save_to_path(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load_from_path(path: &Path) -> Result<Self> {
        Self::load(&mut BufReader::new(File::open(path)?))
    }
}

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_bytes(w: &mut impl Write, bytes: &[u8]) -> Result<()> {
    write_u32(w, bytes.len() as u32)?;
    w.write_all(bytes)?;
    Ok(())
}

fn read_u8(r: &mut impl Read) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn read_bytes(r: &mut impl Read) -> Result<Vec<u8>> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::DEFAULT_LEAK_SLOPE;

    fn sample_checkpoint() -> Checkpoint {
        let mut store = ParamStore::new();
        let spec = MlpSpec::new(vec![3, 8, 2], Activation::LeakyRelu, DEFAULT_LEAK_SLOPE).unwrap();
        let mlp = Mlp::init(&mut store, spec, 17).unwrap();
        let mut ckpt = Checkpoint::new();
        ckpt.push(Section::from_mlp("policy", &store, &mlp));
        ckpt.push(Section::raw("log_std", vec![Mat::from_rows(&[&[-0.5, -0.5]]).unwrap()]));
        ckpt
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let ckpt = sample_checkpoint();
        let mut first = Vec::new();
        ckpt.save(&mut first).unwrap();
        let loaded = Checkpoint::load(&mut first.as_slice()).unwrap();
        let mut second = Vec::new();
        loaded.save(&mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(ckpt, loaded);
    }

    #[test]
    fn network_rebuilds_with_equal_outputs() {
        let mut store = ParamStore::new();
        let spec = MlpSpec::new(vec![4, 6, 3], Activation::Relu, 0.01).unwrap();
        let mlp = Mlp::init(&mut store, spec, 5).unwrap();
        let x = Mat::from_rows(&[&[0.1, -0.2, 0.3, 0.7]]).unwrap();
        let before = mlp.forward(&store, &x).unwrap();

        let mut ckpt = Checkpoint::new();
        ckpt.push(Section::from_mlp("net", &store, &mlp));
        let mut bytes = Vec::new();
        ckpt.save(&mut bytes).unwrap();

        let loaded = Checkpoint::load(&mut bytes.as_slice()).unwrap();
        let mut fresh = ParamStore::new();
        let rebuilt = loaded.section("net").unwrap().into_mlp(&mut fresh).unwrap();
        let after = rebuilt.forward(&fresh, &x).unwrap();
        assert_eq!(before.data(), after.data());
    }

    #[test]
    fn corrupt_magic_is_rejected() {
        let mut bytes = Vec::new();
        sample_checkpoint().save(&mut bytes).unwrap();
        bytes[0] = b'X';
        assert!(matches!(Checkpoint::load(&mut bytes.as_slice()), Err(NnError::Format(_))));
    }

    #[test]
    fn missing_section_is_an_error() {
        let ckpt = sample_checkpoint();
        assert!(ckpt.section("policy").is_ok());
        assert!(ckpt.section("critic").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let ckpt = sample_checkpoint();
        ckpt.save_to_path(&path).unwrap();
        let loaded = Checkpoint::load_from_path(&path).unwrap();
        assert_eq!(ckpt, loaded);
    }
}
