//! Zero-set cache files and table emission.
//!
//! Cache layout (little-endian throughout):
//!
//! ```text
//! magic     b"DPCZ"
//! version   u16
//! q         u64     character modulus
//! index     u64     character index
//! conductor u64
//! parity    u8
//! height    f64
//! mesh      f64
//! tolerance f64
//! branch    u32     Hardy Z rotation branch
//! certified u8
//! stable    u8
//! expected  f64     Riemann–von Mangoldt count at `height`
//! count     u64
//! payload   count × f64 ordinates, ascending
//! checksum  SHA-256 of everything above
//! ```

use sha2::{Digest, Sha256};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::characters::{enumerate_characters, CharacterError, CharacterLabel};
use crate::lfunc::ROTATION_BRANCH_PRINCIPAL_HALF_ANGLE;
use crate::zeros::{Completeness, ScanParams, ZeroError, ZeroLibrary, ZeroRecord, ZeroSet};

pub const MAGIC: &[u8; 4] = b"DPCZ";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 * 3 + 1 + 8 * 3 + 4 + 1 + 1 + 8 + 8;
const CHECKSUM_LEN: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: not a zero cache file")]
    Format(PathBuf),
    #[error("{path}: format version {found}, this reader understands {supported}")]
    Version { path: PathBuf, found: u16, supported: u16 },
    #[error("{0}: checksum mismatch")]
    Checksum(PathBuf),
    #[error("{path}: {source}")]
    Invariant { path: PathBuf, source: ZeroError },
    #[error("{path}: rotation branch {found}, expected {expected}")]
    Branch { path: PathBuf, found: u32, expected: u32 },
    #[error("{0}: refusing to replace a certified cache with an uncertified set")]
    WouldDowngrade(PathBuf),
    #[error("table output: {0}")]
    Table(String),
    #[error(transparent)]
    Scan(#[from] ZeroError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `cache/zeros/q{Q}/chi{INDEX}_T{T}.zc` under `root`.
pub fn cache_path(root: &Path, label: CharacterLabel, height: f64) -> PathBuf {
    root.join("zeros")
        .join(format!("q{}", label.modulus()))
        .join(format!("chi{}_T{}.zc", label.index(), height))
}

pub fn encode_zero_set(set: &ZeroSet) -> Vec<u8> {
    let c = set.completeness();
    let label = set.character();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * set.len() + CHECKSUM_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&label.modulus().to_le_bytes());
    buf.extend_from_slice(&label.index().to_le_bytes());
    buf.extend_from_slice(&set.conductor().to_le_bytes());
    buf.push(set.parity());
    buf.extend_from_slice(&set.height().to_le_bytes());
    buf.extend_from_slice(&set.mesh_step().to_le_bytes());
    buf.extend_from_slice(&set.tolerance().to_le_bytes());
    buf.extend_from_slice(&set.branch_tag().to_le_bytes());
    buf.push(c.certified as u8);
    buf.push(c.stable as u8);
    buf.extend_from_slice(&c.expected_count.to_le_bytes());
    buf.extend_from_slice(&(set.len() as u64).to_le_bytes());
    for r in set.records() {
        buf.extend_from_slice(&r.ordinate.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out: [u8; N] = self.bytes[self.at..self.at + N].try_into().expect("length checked");
        self.at += N;
        out
    }
    fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }
    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }
    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn decode_zero_set(bytes: &[u8], path: &Path) -> Result<ZeroSet, StoreError> {
    if bytes.len() < 6 || &bytes[..4] != MAGIC {
        return Err(StoreError::Format(path.to_path_buf()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(StoreError::Version {
            path: path.to_path_buf(),
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
        return Err(StoreError::Format(path.to_path_buf()));
    }
    let (body, sum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != sum {
        return Err(StoreError::Checksum(path.to_path_buf()));
    }
    let mut cur = Cursor { bytes: body, at: 6 };
    let q = cur.u64();
    let index = cur.u64();
    let conductor = cur.u64();
    let parity = cur.u8();
    let height = cur.f64();
    let mesh_step = cur.f64();
    let tolerance = cur.f64();
    let branch_tag = cur.u32();
    let certified = cur.u8();
    let stable = cur.u8();
    let expected = cur.f64();
    let count = cur.u64();
    let invariant = |source: ZeroError| StoreError::Invariant {
        path: path.to_path_buf(),
        source,
    };
    if body.len() - HEADER_LEN != 8 * count as usize || (body.len() - HEADER_LEN) % 8 != 0 {
        return Err(invariant(ZeroError::Invalid(format!(
            "count {count} disagrees with payload of {} bytes",
            body.len() - HEADER_LEN
        ))));
    }
    if certified > 1 || stable > 1 || parity > 1 {
        return Err(invariant(ZeroError::Invalid("flag byte out of range".into())));
    }
    let label = CharacterLabel::new(q, index).map_err(|e| invariant(e.into()))?;
    let records = (0..count)
        .map(|_| {
            let g = cur.f64();
            ZeroRecord {
                ordinate: g,
                character: label,
                bracket: (g - tolerance / 2.0, g + tolerance / 2.0),
                tolerance,
                refined_residual: None,
            }
        })
        .collect();
    let mut completeness = Completeness::evaluate(expected, count as usize, stable == 1);
    if certified == 0 {
        completeness.certified = false;
    }
    let params = ScanParams {
        height,
        mesh_step,
        tolerance,
        branch_tag,
    };
    ZeroSet::from_parts(label, conductor, parity, params, records, completeness).map_err(invariant)
}

pub fn read_zero_cache(path: &Path) -> Result<ZeroSet, StoreError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_zero_set(&bytes, path)
}

/// Reads a cache for reuse with the current Hardy Z branch; `Ok(None)` if absent.
pub fn load_for_reuse(path: &Path) -> Result<Option<ZeroSet>, StoreError> {
    if !path.exists() {
        return Ok(None);
    }
    let set = read_zero_cache(path)?;
    if set.branch_tag() != ROTATION_BRANCH_PRINCIPAL_HALF_ANGLE {
        return Err(StoreError::Branch {
            path: path.to_path_buf(),
            found: set.branch_tag(),
            expected: ROTATION_BRANCH_PRINCIPAL_HALF_ANGLE,
        });
    }
    Ok(Some(set))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

/// Writes a cache file. An existing certified file is only replaced by an
/// uncertified set when `force` is set; unreadable files are replaced.
pub fn write_zero_cache(set: &ZeroSet, path: &Path, force: bool) -> Result<(), StoreError> {
    if !set.is_certified() && !force && path.exists() {
        if let Ok(old) = read_zero_cache(path) {
            if old.is_certified() {
                return Err(StoreError::WouldDowngrade(path.to_path_buf()));
            }
        }
    }
    write_atomic(path, &encode_zero_set(set))
}

/// Cache traffic of one [`library_for_modulus`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheUse {
    pub loaded: Vec<PathBuf>,
    pub written: Vec<PathBuf>,
}

/// Zero sets for every character mod q at the library's height, served from
/// `root` when a matching certified cache exists and written back otherwise.
pub fn library_for_modulus(
    root: &Path,
    library: &mut ZeroLibrary,
    q: u64,
) -> Result<(BTreeMap<CharacterLabel, Arc<ZeroSet>>, CacheUse), StoreError> {
    let height = library.height();
    let mut inducers: Vec<CharacterLabel> = enumerate_characters(q)?
        .iter()
        .map(|c| c.conductor_and_inducer().1.label())
        .collect();
    inducers.sort();
    inducers.dedup();
    let mut usage = CacheUse::default();
    let mut fresh = Vec::new();
    for label in inducers {
        if library.contains(&label) {
            continue;
        }
        let path = cache_path(root, label, height);
        match load_for_reuse(&path)? {
            Some(set) if set.is_certified() => {
                library.insert(set)?;
                usage.loaded.push(path);
            }
            _ => fresh.push((label, path)),
        }
    }
    let sets = library.for_modulus(q)?;
    for (label, path) in fresh {
        let set = sets
            .values()
            .find(|s| s.character() == label)
            .expect("library covers every inducer");
        write_zero_cache(set, &path, false)?;
        usage.written.push(path);
    }
    Ok((sets, usage))
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, independent of locale; non-finite values become
/// `NaN`/`inf`/`-inf` in CSV and `null` in JSON.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn write_json<W: Write>(&self, out: &mut W) -> io::Result<()> {
        match self {
            Cell::Int(v) => write!(out, "{v}"),
            Cell::Real(v) if v.is_finite() => write!(out, "{}", format_real(*v)),
            Cell::Real(_) => out.write_all(b"null"),
            Cell::Text(s) => serde_json::to_writer(&mut *out, s).map_err(io::Error::from),
            Cell::Bool(b) => write!(out, "{b}"),
        }
    }
}

/// A typed row with a fixed column list.
pub trait TableRow {
    fn columns() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown table format `{other}` (csv or json)")),
        }
    }
}

/// Streams rows to `out`, one row at a time. JSON output is an array of
/// objects keyed by column name.
pub fn write_table<W, I>(columns: &[&str], rows: I, format: TableFormat, out: W) -> Result<(), StoreError>
where
    W: Write,
    I: IntoIterator<Item = Vec<Cell>>,
{
    let table_err = |e: &dyn std::fmt::Display| StoreError::Table(e.to_string());
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(columns).map_err(|e| table_err(&e))?;
            for row in rows {
                if row.len() != columns.len() {
                    return Err(StoreError::Table(format!("row has {} cells, header {}", row.len(), columns.len())));
                }
                w.write_record(row.iter().map(Cell::csv_text)).map_err(|e| table_err(&e))?;
            }
            w.flush().map_err(|e| table_err(&e))
        }
        TableFormat::Json => {
            let mut w = BufWriter::new(out);
            let res: io::Result<()> = (|| {
                w.write_all(b"[")?;
                for (i, row) in rows.into_iter().enumerate() {
                    if row.len() != columns.len() {
                        return Err(io::Error::new(io::ErrorKind::InvalidData, "row length differs from header"));
                    }
                    w.write_all(if i == 0 { b"\n{" } else { b",\n{" })?;
                    for (j, (c, v)) in columns.iter().zip(&row).enumerate() {
                        if j > 0 {
                            w.write_all(b",")?;
                        }
                        serde_json::to_writer(&mut w, c)?;
                        w.write_all(b":")?;
                        v.write_json(&mut w)?;
                    }
                    w.write_all(b"}")?;
                }
                w.write_all(b"\n]\n")?;
                w.flush()
            })();
            res.map_err(|e| table_err(&e))
        }
    }
}

/// Typed convenience over [`write_table`].
pub fn write_rows<'a, R, W>(rows: impl IntoIterator<Item = &'a R>, format: TableFormat, out: W) -> Result<(), StoreError>
where
    R: TableRow + 'a,
    W: Write,
{
    write_table(R::columns(), rows.into_iter().map(TableRow::cells), format, out)
}

/// Writes a table to `path` through a temporary file.
pub fn emit_table<I>(columns: &[&str], rows: I, format: TableFormat, path: &Path) -> Result<(), StoreError>
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    if let Err(e) = write_table(columns, rows, format, file) {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}
