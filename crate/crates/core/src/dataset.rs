//! Labeled embedding datasets: load, validate, persist, synthesize.
//!
//! Two on-disk formats are supported.
//!
//! Binary: magic `CSET`, `u32` version (=1), `u32 n`, `u32 d`, `u32 C`, then
//! `n` records of `d` little-endian `f32` coordinates followed by a `u32`
//! class id.
//!
//! CSV: header line `d=<d>,C=<C>`, then one row per item holding `d`
//! comma-separated decimals followed by the class id.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_DATASET};

const MAGIC: &[u8; 4] = b"CSET";
const VERSION: u32 = 1;

/// On-disk dataset encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Binary,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "bin" => Ok(Format::Binary),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!(
                "unknown format {other:?} (expected binary|csv)"
            ))),
        }
    }
}

/// One embedding vector with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbedding {
    pub vector: Vec<f32>,
    pub class_id: u32,
}

/// An ordered, index-addressable collection of labeled embeddings.
///
/// Indices are the dataset's identity keys: the i-th item of a loaded
/// dataset is the i-th record of the file, and selection results refer to
/// items by these indices.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    dim: usize,
    num_classes: usize,
    items: Vec<LabeledEmbedding>,
}

impl EmbeddedDataset {
    /// Validate and assemble a dataset.
    pub fn new(dim: usize, num_classes: usize, items: Vec<LabeledEmbedding>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be >= 1".into()));
        }
        if num_classes == 0 {
            return Err(Error::InvalidParameter("num_classes must be >= 1".into()));
        }
        for (row, item) in items.iter().enumerate() {
            validate_item(item, dim, num_classes, row)?;
        }
        Ok(EmbeddedDataset {
            dim,
            num_classes,
            items,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[LabeledEmbedding] {
        &self.items
    }

    pub fn item(&self, index: usize) -> &LabeledEmbedding {
        &self.items[index]
    }

    /// Dataset indices of every item labeled `class_id`, in dataset order.
    pub fn class_indices(&self, class_id: u32) -> Vec<usize> {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.class_id == class_id)
            .map(|(i, _)| i)
            .collect()
    }

    /// Re-indexed dataset holding the given items (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Result<EmbeddedDataset> {
        let mut items = Vec::with_capacity(indices.len());
        for &i in indices {
            let item = self.items.get(i).ok_or_else(|| {
                Error::InvalidParameter(format!("index {i} out of range ({} items)", self.len()))
            })?;
            items.push(item.clone());
        }
        Ok(EmbeddedDataset {
            dim: self.dim,
            num_classes: self.num_classes,
            items,
        })
    }

    /// Scale every vector to unit L2 norm. Zero vectors are left untouched.
    ///
    /// Off by default everywhere; distances are computed on raw embeddings
    /// unless this is requested explicitly.
    pub fn l2_normalize(&mut self) {
        for item in &mut self.items {
            let norm: f64 = item
                .vector
                .iter()
                .map(|&x| f64::from(x) * f64::from(x))
                .sum::<f64>()
                .sqrt();
            if norm > 0.0 {
                for x in &mut item.vector {
                    *x = (f64::from(*x) / norm) as f32;
                }
            }
        }
    }
}

fn validate_item(item: &LabeledEmbedding, dim: usize, num_classes: usize, row: usize) -> Result<()> {
    if item.vector.len() != dim {
        return Err(Error::BadRow {
            row,
            msg: format!("expected {dim} coordinates, got {}", item.vector.len()),
        });
    }
    if let Some(bad) = item.vector.iter().position(|x| !x.is_finite()) {
        return Err(Error::BadRow {
            row,
            msg: format!("non-finite coordinate at position {bad}"),
        });
    }
    if item.class_id as usize >= num_classes {
        return Err(Error::BadRow {
            row,
            msg: format!(
                "class_id {} out of range (num_classes = {num_classes})",
                item.class_id
            ),
        });
    }
    Ok(())
}

/// Load a dataset from `path`. Item order equals file order.
pub fn load_dataset(path: &Path, format: Format) -> Result<EmbeddedDataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        Format::Binary => load_binary(BufReader::new(file)),
        Format::Csv => load_csv(BufReader::new(file)),
    }
}

/// Write `ds` to `path`. The dataset is re-validated before any byte is
/// written, so a file is never produced for an invalid dataset.
pub fn save_dataset(ds: &EmbeddedDataset, path: &Path, format: Format) -> Result<()> {
    for (row, item) in ds.items.iter().enumerate() {
        validate_item(item, ds.dim, ds.num_classes, row)?;
    }
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let res = match format {
        Format::Binary => save_binary(ds, &mut w),
        Format::Csv => save_csv(ds, &mut w),
    };
    res.and_then(|()| w.flush()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_binary<R: Read>(mut r: R) -> Result<EmbeddedDataset> {
    let bad = |msg: String| Error::MalformedFile {
        format: "binary",
        msg,
    };
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| bad(format!("short header: {e}")))?;
    if &magic != MAGIC {
        return Err(bad(format!("bad magic {magic:?}")));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut R, what: &str| -> Result<u32> {
        r.read_exact(&mut u32buf)
            .map_err(|e| bad(format!("truncated {what}: {e}")))?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let version = read_u32(&mut r, "version")?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = read_u32(&mut r, "count")? as usize;
    let d = read_u32(&mut r, "dimension")? as usize;
    let c = read_u32(&mut r, "class count")? as usize;
    if d == 0 || c == 0 {
        return Err(bad(format!("invalid header: d={d}, C={c}")));
    }

    let mut items = Vec::with_capacity(n);
    let mut rec = vec![0u8; d * 4 + 4];
    for row in 0..n {
        r.read_exact(&mut rec).map_err(|_| Error::BadRow {
            row,
            msg: "truncated record".into(),
        })?;
        let vector: Vec<f32> = rec[..d * 4]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        let class_id = u32::from_le_bytes([rec[d * 4], rec[d * 4 + 1], rec[d * 4 + 2], rec[d * 4 + 3]]);
        let item = LabeledEmbedding { vector, class_id };
        validate_item(&item, d, c, row)?;
        items.push(item);
    }
    // Trailing bytes mean the header undercounted.
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| bad(format!("read: {e}")))? != 0 {
        return Err(bad(format!("trailing bytes after {n} records")));
    }
    EmbeddedDataset::new(d, c, items)
}

fn save_binary<W: Write>(ds: &EmbeddedDataset, w: &mut W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(ds.items.len() as u32).to_le_bytes())?;
    w.write_all(&(ds.dim as u32).to_le_bytes())?;
    w.write_all(&(ds.num_classes as u32).to_le_bytes())?;
    for item in &ds.items {
        for &x in &item.vector {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&item.class_id.to_le_bytes())?;
    }
    Ok(())
}

fn load_csv<R: BufRead>(r: R) -> Result<EmbeddedDataset> {
    let bad = |msg: String| Error::MalformedFile {
        format: "csv",
        msg,
    };
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| bad(format!("read: {e}")))?;
    let (d, c) = parse_csv_header(header.trim()).ok_or_else(|| {
        bad(format!(
            "expected header \"d=<d>,C=<C>\", got {:?}",
            header.trim()
        ))
    })?;
    if d == 0 || c == 0 {
        return Err(bad(format!("invalid header: d={d}, C={c}")));
    }

    let mut items = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(format!("read: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::BadRow {
                row,
                msg: format!("expected {d} coordinates, got {}", fields.len() - 1),
            });
        }
        let mut vector = Vec::with_capacity(d);
        for (col, field) in fields[..d].iter().enumerate() {
            let v: f32 = field.trim().parse().map_err(|_| Error::BadRow {
                row,
                msg: format!("unparsable coordinate {field:?} in column {col}"),
            })?;
            vector.push(v);
        }
        let class_id: u32 = fields[d].trim().parse().map_err(|_| Error::BadRow {
            row,
            msg: format!("unparsable class id {:?}", fields[d]),
        })?;
        let item = LabeledEmbedding { vector, class_id };
        validate_item(&item, d, c, row)?;
        items.push(item);
    }
    EmbeddedDataset::new(d, c, items)
}

fn parse_csv_header(header: &str) -> Option<(usize, usize)> {
    let (d_part, c_part) = header.split_once(',')?;
    let d = d_part.strip_prefix("d=")?.parse().ok()?;
    let c = c_part.strip_prefix("C=")?.parse().ok()?;
    Some((d, c))
}

fn save_csv<W: Write>(ds: &EmbeddedDataset, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "d={},C={}", ds.dim, ds.num_classes)?;
    for item in &ds.items {
        for &x in &item.vector {
            // Shortest round-trip formatting keeps load(save(ds)) exact.
            write!(w, "{x:?},")?;
        }
        writeln!(w, "{}", item.class_id)?;
    }
    Ok(())
}

/// Parameters for [`generate_synthetic`]; mirrors the CLI spec string
/// `"C,per_class,d,spread,outliers"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    pub spread: f64,
    pub outlier_fraction: f64,
}

impl std::str::FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::InvalidParameter(format!(
                "synthetic spec {s:?} must be \"C,per_class,d,spread,outliers\""
            )));
        }
        let parse_usize = |p: &str, what: &str| -> Result<usize> {
            p.parse()
                .map_err(|_| Error::InvalidParameter(format!("bad {what} in synthetic spec: {p:?}")))
        };
        let parse_f64 = |p: &str, what: &str| -> Result<f64> {
            p.parse()
                .map_err(|_| Error::InvalidParameter(format!("bad {what} in synthetic spec: {p:?}")))
        };
        Ok(SyntheticSpec {
            num_classes: parse_usize(parts[0], "class count")?,
            per_class: parse_usize(parts[1], "per-class count")?,
            dim: parse_usize(parts[2], "dimension")?,
            spread: parse_f64(parts[3], "spread")?,
            outlier_fraction: parse_f64(parts[4], "outlier fraction")?,
        })
    }
}

/// Deterministic Gaussian-blob dataset with planted outliers.
///
/// Class means sit 12·spread apart (on a circle in the first two coordinates
/// for `dim >= 2`, on a line for `dim == 1`) and each blob has standard
/// deviation `spread`. A `round(outlier_fraction * per_class)` share of each
/// class is placed exactly 5·spread from its class mean in a random
/// direction, giving low-density satellites that minimax coverage has to
/// reach for.
pub fn generate_synthetic(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    spread: f64,
    outlier_fraction: f64,
    seed: u64,
) -> Result<EmbeddedDataset> {
    if num_classes == 0 {
        return Err(Error::InvalidParameter("num_classes must be >= 1".into()));
    }
    if per_class == 0 {
        return Err(Error::InvalidParameter("per_class must be >= 1".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    if !spread.is_finite() || spread <= 0.0 {
        return Err(Error::InvalidParameter("spread must be positive".into()));
    }
    if !(0.0..1.0).contains(&outlier_fraction) {
        return Err(Error::InvalidParameter(
            "outlier_fraction must be in [0, 1)".into(),
        ));
    }

    let means = class_means(num_classes, dim, spread);
    let num_outliers = (outlier_fraction * per_class as f64).round() as usize;
    let mut rng = stream_rng(seed, STREAM_DATASET);

    let mut items = Vec::with_capacity(num_classes * per_class);
    for (c, mean) in means.iter().enumerate() {
        for p in 0..per_class {
            let vector = if p < num_outliers {
                // Satellite at exactly 5·spread from the class mean.
                let dir = random_unit(&mut rng, dim);
                (0..dim)
                    .map(|k| (mean[k] + 5.0 * spread * dir[k]) as f32)
                    .collect()
            } else {
                (0..dim)
                    .map(|k| {
                        let noise: f64 = rng.sample(StandardNormal);
                        (mean[k] + spread * noise) as f32
                    })
                    .collect()
            };
            items.push(LabeledEmbedding {
                vector,
                class_id: c as u32,
            });
        }
    }
    EmbeddedDataset::new(dim, num_classes, items)
}

/// Generate via a [`SyntheticSpec`].
pub fn generate_from_spec(spec: &SyntheticSpec, seed: u64) -> Result<EmbeddedDataset> {
    generate_synthetic(
        spec.num_classes,
        spec.per_class,
        spec.dim,
        spec.spread,
        spec.outlier_fraction,
        seed,
    )
}

/// Class means spaced 12·spread apart so blobs (and their 5·spread
/// satellites) stay linearly separable for any class count.
fn class_means(num_classes: usize, dim: usize, spread: f64) -> Vec<Vec<f64>> {
    let spacing = 12.0 * spread;
    (0..num_classes)
        .map(|c| {
            let mut mean = vec![0.0; dim];
            if num_classes == 1 {
                return mean;
            }
            if dim == 1 {
                mean[0] = c as f64 * spacing;
            } else {
                let radius = spacing / (2.0 * (std::f64::consts::PI / num_classes as f64).sin());
                let angle = 2.0 * std::f64::consts::PI * c as f64 / num_classes as f64;
                mean[0] = radius * angle.cos();
                mean[1] = radius * angle.sin();
            }
            mean
        })
        .collect()
}

fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
