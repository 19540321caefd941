//! Pair manifests: the CSV that drives batch evaluation.
//!
//! A manifest names the (original, anonymized) image pairs of a run plus
//! optional per-pair sidecars: a mask, landmark files, identity embeddings,
//! externally estimated shading maps, and emotion label tables. Paths are
//! resolved relative to the manifest file, so a fixture tree can move as a
//! unit.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Required manifest columns, in order.
pub const REQUIRED_COLUMNS: [&str; 3] = ["pair_id", "original", "anonymized"];

/// Optional manifest columns; any subset may appear, and cells may be
/// empty per row.
pub const OPTIONAL_COLUMNS: [&str; 9] = [
    "mask",
    "landmarks_o",
    "landmarks_a",
    "emb_o",
    "emb_a",
    "shading_o",
    "shading_a",
    "label_o",
    "label_a",
];

/// One manifest row: a pair and whatever sidecars it brings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairRecord {
    pub pair_id: String,
    pub original: PathBuf,
    pub anonymized: PathBuf,
    pub mask: Option<PathBuf>,
    pub landmarks_o: Option<PathBuf>,
    pub landmarks_a: Option<PathBuf>,
    pub emb_o: Option<PathBuf>,
    pub emb_a: Option<PathBuf>,
    pub shading_o: Option<PathBuf>,
    pub shading_a: Option<PathBuf>,
    pub label_o: Option<PathBuf>,
    pub label_a: Option<PathBuf>,
}

impl PairRecord {
    pub fn new(
        pair_id: impl Into<String>,
        original: impl Into<PathBuf>,
        anonymized: impl Into<PathBuf>,
    ) -> PairRecord {
        PairRecord {
            pair_id: pair_id.into(),
            original: original.into(),
            anonymized: anonymized.into(),
            ..PairRecord::default()
        }
    }

    fn optional_field(&self, column: &str) -> &Option<PathBuf> {
        match column {
            "mask" => &self.mask,
            "landmarks_o" => &self.landmarks_o,
            "landmarks_a" => &self.landmarks_a,
            "emb_o" => &self.emb_o,
            "emb_a" => &self.emb_a,
            "shading_o" => &self.shading_o,
            "shading_a" => &self.shading_a,
            "label_o" => &self.label_o,
            "label_a" => &self.label_a,
            other => unreachable!("unknown optional column {other}"),
        }
    }

    fn optional_field_mut(&mut self, column: &str) -> &mut Option<PathBuf> {
        match column {
            "mask" => &mut self.mask,
            "landmarks_o" => &mut self.landmarks_o,
            "landmarks_a" => &mut self.landmarks_a,
            "emb_o" => &mut self.emb_o,
            "emb_a" => &mut self.emb_a,
            "shading_o" => &mut self.shading_o,
            "shading_a" => &mut self.shading_a,
            "label_o" => &mut self.label_o,
            "label_a" => &mut self.label_a,
            other => unreachable!("unknown optional column {other}"),
        }
    }
}

/// Resolve a manifest cell against the manifest's directory.
fn resolve(base: &Path, cell: &str) -> PathBuf {
    let p = Path::new(cell);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Read and validate a manifest.
///
/// The header must start with `pair_id,original,anonymized`; optional
/// columns may follow in any order, each at most once. Empty cells mean
/// "no sidecar". Relative paths are resolved against the manifest's parent
/// directory. Pair ids must be unique and non-empty.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<PairRecord>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < REQUIRED_COLUMNS.len()
        || headers[..3] != REQUIRED_COLUMNS.map(str::to_string)
    {
        return Err(Error::Parse(format!(
            "{}: header must start with pair_id,original,anonymized",
            path.display()
        )));
    }
    let optional: Vec<String> = headers[3..].to_vec();
    for (i, name) in optional.iter().enumerate() {
        if !OPTIONAL_COLUMNS.contains(&name.as_str()) {
            return Err(Error::Parse(format!(
                "{}: unknown manifest column {name:?}",
                path.display()
            )));
        }
        if optional[..i].contains(name) {
            return Err(Error::Parse(format!(
                "{}: duplicate manifest column {name:?}",
                path.display()
            )));
        }
    }

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let cell = |i: usize| row.get(i).unwrap_or("");
        let pair_id = cell(0);
        if pair_id.is_empty() {
            return Err(Error::Parse(format!("{}: empty pair_id", path.display())));
        }
        if !seen.insert(pair_id.to_string()) {
            return Err(Error::Parse(format!(
                "{}: duplicate pair_id {pair_id:?}",
                path.display()
            )));
        }
        if cell(1).is_empty() || cell(2).is_empty() {
            return Err(Error::Parse(format!(
                "{}: pair {pair_id:?} is missing an image path",
                path.display()
            )));
        }
        let mut record = PairRecord::new(pair_id, resolve(&base, cell(1)), resolve(&base, cell(2)));
        for (i, name) in optional.iter().enumerate() {
            let value = cell(3 + i);
            if !value.is_empty() {
                *record.optional_field_mut(name) = Some(resolve(&base, value));
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// Write a manifest with the full canonical header. Paths are written as
/// stored; callers that want a relocatable manifest should store paths
/// relative to its directory.
pub fn write_manifest(records: &[PairRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    })?;
    let header: Vec<&str> = REQUIRED_COLUMNS
        .iter()
        .chain(OPTIONAL_COLUMNS.iter())
        .copied()
        .collect();
    writer
        .write_record(&header)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    for r in records {
        let mut row = vec![
            r.pair_id.clone(),
            r.original.to_string_lossy().into_owned(),
            r.anonymized.to_string_lossy().into_owned(),
        ];
        for name in OPTIONAL_COLUMNS {
            row.push(
                r.optional_field(name)
                    .as_ref()
                    .map(|p| p.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
