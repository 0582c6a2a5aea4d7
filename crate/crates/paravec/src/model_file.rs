//! Binary model persistence.
//!
//! Layout: magic `PVEC`, format version, model kind, dimensions, training
//! config, vocabulary (words and counts), document titles, Huffman codes
//! and paths, then the three matrices as little-endian f32 in row-major
//! order, and a trailing SHA-256 checksum of everything before it. Writes
//! go to a temporary file in the target directory and are renamed into
//! place.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::hsoftmax::HuffmanTree;
use crate::matrix::Matrix;
use crate::pv::{DmCombine, EmbeddingModel, TrainConfig, TrainMode};

const MAGIC: &[u8; 4] = b"PVEC";
const VERSION: u32 = 1;

fn kind_byte(config: &TrainConfig) -> u8 {
    match (config.mode, config.dm_combine) {
        (TrainMode::Dbow, _) => 0,
        (TrainMode::Dm, DmCombine::Average) => 1,
        (TrainMode::Dm, DmCombine::Concatenate) => 2,
    }
}

fn kind_from_byte(b: u8) -> Result<(TrainMode, DmCombine)> {
    match b {
        0 => Ok((TrainMode::Dbow, DmCombine::Average)),
        1 => Ok((TrainMode::Dm, DmCombine::Average)),
        2 => Ok((TrainMode::Dm, DmCombine::Concatenate)),
        other => Err(Error::ModelFormat(format!("unknown model kind {other}"))),
    }
}

fn push_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

fn push_matrix(buf: &mut Vec<u8>, m: &Matrix<f32>) {
    for &x in m.as_slice() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
}

fn serialize(model: &EmbeddingModel) -> Vec<u8> {
    let config = &model.config;
    let v = model.vocabulary.len();
    let n = model.doc_titles.len();

    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind_byte(config));
    buf.extend_from_slice(&(config.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(v as u64).to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&(model.node_params.cols() as u32).to_le_bytes());

    buf.extend_from_slice(&(config.epochs as u32).to_le_bytes());
    buf.extend_from_slice(&config.initial_lr.to_le_bytes());
    buf.extend_from_slice(&config.min_lr.to_le_bytes());
    buf.extend_from_slice(&(config.window as u32).to_le_bytes());
    buf.push(config.joint_words as u8);
    buf.extend_from_slice(&config.seed.to_le_bytes());
    buf.extend_from_slice(&(config.workers as u32).to_le_bytes());
    buf.extend_from_slice(&config.subsample_t.to_le_bytes());
    buf.extend_from_slice(&(model.vocabulary.min_count() as u32).to_le_bytes());

    for id in 0..v as u32 {
        push_str(&mut buf, model.vocabulary.word(id));
        buf.extend_from_slice(&model.vocabulary.count(id).to_le_bytes());
    }
    for title in &model.doc_titles {
        push_str(&mut buf, title);
    }
    for w in 0..v {
        let code = model.tree.code(w);
        let path = model.tree.path(w);
        buf.extend_from_slice(&(code.len() as u16).to_le_bytes());
        buf.extend_from_slice(code);
        for &p in path {
            buf.extend_from_slice(&p.to_le_bytes());
        }
    }

    push_matrix(&mut buf, &model.word_vectors);
    push_matrix(&mut buf, &model.paragraph_vectors);
    push_matrix(&mut buf, &model.node_params);

    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

/// Save a model, atomically replacing any existing file at `path`.
pub fn save_model(model: &EmbeddingModel, path: &Path) -> Result<()> {
    let bytes = serialize(model);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    std::io::Write::write_all(&mut tmp, &bytes)?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::ModelFormat("unexpected end of file".into()));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::ModelFormat("invalid UTF-8 in string".into()))
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix<f32>> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(self.f32()?);
        }
        Ok(Matrix::from_vec(rows, cols, data))
    }
}

/// Load a model, validating magic, version, checksum, and section sizes.
pub fn load_model(path: &Path) -> Result<EmbeddingModel> {
    let bytes = fs::read(path)?;
    if bytes.len() < MAGIC.len() + 4 + 32 {
        return Err(Error::ModelFormat("file too short".into()));
    }
    let (body, stored) = bytes.split_at(bytes.len() - 32);
    let digest = Sha256::digest(body);
    if digest.as_slice() != stored {
        return Err(Error::ModelFormat("checksum mismatch".into()));
    }

    let mut r = Reader { buf: body, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::ModelFormat("bad magic bytes".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported format version {version}"
        )));
    }
    let (mode, dm_combine) = kind_from_byte(r.u8()?)?;
    let dim = r.u32()? as usize;
    let v = r.u64()? as usize;
    let n = r.u64()? as usize;
    let node_dim = r.u32()? as usize;

    let epochs = r.u32()? as usize;
    let initial_lr = r.f32()?;
    let min_lr = r.f32()?;
    let window = r.u32()? as usize;
    let joint_words = r.u8()? != 0;
    let seed = r.u64()?;
    let workers = r.u32()? as usize;
    let subsample_t = r.f64()?;
    let min_count = r.u32()? as usize;

    let config = TrainConfig {
        dim,
        epochs,
        initial_lr,
        min_lr,
        window,
        joint_words,
        mode,
        dm_combine,
        seed,
        workers,
        subsample_t,
    };
    if config.node_dim() != node_dim {
        return Err(Error::ModelFormat(format!(
            "node dimension {node_dim} does not match config ({})",
            config.node_dim()
        )));
    }
    if v < 2 {
        return Err(Error::ModelFormat("vocabulary too small".into()));
    }

    let mut words = Vec::with_capacity(v);
    let mut counts = Vec::with_capacity(v);
    for _ in 0..v {
        words.push(r.string()?);
        counts.push(r.u64()?);
    }
    let vocabulary = Vocabulary::from_parts(words, counts, min_count);

    let mut doc_titles = Vec::with_capacity(n);
    for _ in 0..n {
        doc_titles.push(r.string()?);
    }

    let mut codes = Vec::with_capacity(v);
    let mut paths = Vec::with_capacity(v);
    for _ in 0..v {
        let len = r.u16()? as usize;
        let code = r.take(len)?.to_vec();
        if code.iter().any(|&b| b > 1) {
            return Err(Error::ModelFormat("code bits must be 0 or 1".into()));
        }
        let mut path = Vec::with_capacity(len);
        for _ in 0..len {
            let node = r.u32()?;
            if node as usize >= v - 1 {
                return Err(Error::ModelFormat(format!("path node {node} out of range")));
            }
            path.push(node);
        }
        codes.push(code);
        paths.push(path);
    }
    let tree = HuffmanTree::from_parts(codes, paths, v - 1);

    let word_vectors = r.matrix(v, dim)?;
    let paragraph_vectors = r.matrix(n, dim)?;
    let node_params = r.matrix(v - 1, node_dim)?;
    if r.pos != body.len() {
        return Err(Error::ModelFormat("trailing bytes after matrices".into()));
    }

    Ok(EmbeddingModel {
        word_vectors,
        paragraph_vectors,
        node_params,
        tree,
        vocabulary,
        doc_titles,
        config,
    })
}
