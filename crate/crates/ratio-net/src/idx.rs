//! MNIST IDX files: big-endian headers, unsigned byte payloads.

use std::fs;
use std::path::Path;

use ratio_core::data::{LabeledImageSet, Samples};

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Raw image file contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn count(&self) -> usize {
        self.pixels.len() / (self.rows * self.cols).max(1)
    }
}

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn parse_images(bytes: &[u8], path: &Path) -> Result<IdxImages> {
    if bytes.len() < 16 {
        return Err(Error::format(path, "truncated image header"));
    }
    let magic = be_u32(bytes, 0);
    if magic != IMAGE_MAGIC {
        return Err(Error::format(path, format!("bad image magic {magic:#010x}")));
    }
    let (count, rows, cols) = (be_u32(bytes, 4) as usize, be_u32(bytes, 8) as usize, be_u32(bytes, 12) as usize);
    let want = count.checked_mul(rows).and_then(|v| v.checked_mul(cols));
    if rows == 0 || cols == 0 || want != Some(bytes.len() - 16) {
        return Err(Error::format(
            path,
            format!("{count}x{rows}x{cols} header does not match {} payload bytes", bytes.len() - 16),
        ));
    }
    Ok(IdxImages { rows, cols, pixels: bytes[16..].to_vec() })
}

pub fn parse_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>> {
    if bytes.len() < 8 {
        return Err(Error::format(path, "truncated label header"));
    }
    let magic = be_u32(bytes, 0);
    if magic != LABEL_MAGIC {
        return Err(Error::format(path, format!("bad label magic {magic:#010x}")));
    }
    let count = be_u32(bytes, 4) as usize;
    if count != bytes.len() - 8 {
        return Err(Error::format(path, format!("header says {count} labels, payload has {}", bytes.len() - 8)));
    }
    Ok(bytes[8..].to_vec())
}

pub fn read_images(path: &Path) -> Result<IdxImages> {
    parse_images(&read(path)?, path)
}

pub fn read_labels(path: &Path) -> Result<Vec<u8>> {
    parse_labels(&read(path)?, path)
}

pub fn encode_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGE_MAGIC, images.count() as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

pub fn write_images(path: &Path, images: &IdxImages) -> Result<()> {
    fs::write(path, encode_images(images)).map_err(|e| Error::io(path, e))
}

pub fn write_labels(path: &Path, labels: &[u8]) -> Result<()> {
    fs::write(path, encode_labels(labels)).map_err(|e| Error::io(path, e))
}

/// Loads the images whose label is in `keep`, in file order, with pixels
/// scaled by 1/255. `per_class` keeps only the first that many of each label.
pub fn load_mnist(
    images_path: &Path,
    labels_path: &Path,
    keep: &[u8],
    per_class: Option<usize>,
) -> Result<LabeledImageSet> {
    let images = read_images(images_path)?;
    let labels = read_labels(labels_path)?;
    if images.count() != labels.len() {
        return Err(Error::CountMismatch { images: images.count(), labels: labels.len() });
    }
    let dim = images.rows * images.cols;
    let mut seen = [0usize; 256];
    let mut data = Vec::new();
    let mut kept = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        if !keep.contains(&label) || per_class.is_some_and(|m| seen[label as usize] >= m) {
            continue;
        }
        seen[label as usize] += 1;
        data.extend(images.pixels[i * dim..(i + 1) * dim].iter().map(|&p| p as f64 / 255.0));
        kept.push(label);
    }
    Ok(LabeledImageSet::new(Samples::new(dim, data)?, kept)?)
}
