//! Occupancy-grid ingestion and validation.
//!
//! A [`GridMap`] is a square 2^l x 2^l grid of per-cell occupancy
//! probabilities p(y=1|x); a [`CellPrior`] is the agent's location
//! distribution p(x) over unit cells. Together they are the sole
//! probabilistic inputs to the rest of the crate.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Square occupancy grid with side 2^`side_exponent`.
///
/// Cells are indexed row-major: cell (x, y) lives at `occ[y * side + x]`,
/// with x the column and y the row. Grid coordinates put the center of
/// cell (x, y) at (x + 0.5, y + 0.5) and cell width 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    side_exponent: u32,
    occ: Vec<f64>,
}

impl GridMap {
    /// Build a map from row-major occupancy values. The length must be
    /// 4^l for some l >= 1 and every value must lie in [0, 1].
    pub fn new(side_exponent: u32, occ: Vec<f64>) -> Result<Self> {
        if side_exponent == 0 {
            return Err(Error::NonPowerOfTwoSide(1));
        }
        let side = 1usize << side_exponent;
        if occ.len() != side * side {
            return Err(Error::SizeMismatch(format!(
                "expected {} cells for side {}, got {}",
                side * side,
                side,
                occ.len()
            )));
        }
        for (index, &value) in occ.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ValueOutOfRange { index, value });
            }
        }
        Ok(Self { side_exponent, occ })
    }

    /// Map with every cell set to `value` (e.g. 0.0 for an all-free map).
    pub fn uniform(side_exponent: u32, value: f64) -> Result<Self> {
        let side = 1usize << side_exponent;
        Self::new(side_exponent, vec![value; side * side])
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    /// Side length 2^l in unit cells.
    pub fn side(&self) -> usize {
        1 << self.side_exponent
    }

    /// Total number of unit cells, 4^l.
    pub fn cell_count(&self) -> usize {
        self.occ.len()
    }

    /// Occupancy probability of cell (x, y).
    pub fn occupancy(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.side() && y < self.side());
        self.occ[y * self.side() + x]
    }

    /// Occupancy by row-major cell index.
    pub fn occupancy_at(&self, index: usize) -> f64 {
        self.occ[index]
    }

    pub fn cells(&self) -> &[f64] {
        &self.occ
    }

    /// Write as CSV, one grid row per line. Values round-trip bit-exactly
    /// through [`load_map`].
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let side = self.side();
        for y in 0..side {
            for x in 0..side {
                if x > 0 {
                    out.push(',');
                }
                write!(out, "{}", self.occupancy(x, y)).expect("write to string");
            }
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Prior distribution p(x) over unit cells, row-major like [`GridMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellPrior {
    probs: Vec<f64>,
}

impl CellPrior {
    const SUM_TOLERANCE: f64 = 1e-9;

    /// Validate non-negativity and normalization (sum within 1e-9 of 1).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (index, &value) in probs.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::ValueOutOfRange { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "prior sums to {total}, expected 1 within {}",
                Self::SUM_TOLERANCE
            )));
        }
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Uniform prior 1/4^l over the map's unit cells.
pub fn default_prior(map: &GridMap) -> CellPrior {
    let n = map.cell_count();
    CellPrior {
        probs: vec![1.0 / n as f64; n],
    }
}

/// Load a prior from a CSV sidecar laid out exactly like the map CSV.
pub fn load_prior(path: &Path, map: &GridMap) -> Result<CellPrior> {
    let text = std::fs::read_to_string(path)?;
    let values = parse_csv_grid(&text)?;
    let flat: Vec<f64> = values.into_iter().flatten().collect();
    if flat.len() != map.cell_count() {
        return Err(Error::SizeMismatch(format!(
            "prior has {} entries, map has {} cells",
            flat.len(),
            map.cell_count()
        )));
    }
    CellPrior::new(flat)
}

/// Supported on-disk map formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Pgm,
    Csv,
}

impl MapFormat {
    /// Pick a format from the file extension (`.pgm` / anything else = CSV).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pgm") => MapFormat::Pgm,
            _ => MapFormat::Csv,
        }
    }
}

/// Load an occupancy grid from disk.
///
/// PGM (P2 or P5, maxval up to 65535) maps pixel/maxval to occupancy;
/// CSV values are taken verbatim. The side must be a power of two >= 2.
pub fn load_map(path: &Path, format: MapFormat) -> Result<GridMap> {
    let bytes = std::fs::read(path)?;
    match format {
        MapFormat::Pgm => parse_pgm(&bytes),
        MapFormat::Csv => {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::MalformedFile("CSV is not valid UTF-8".into()))?;
            grid_from_rows(parse_csv_grid(&text)?)
        }
    }
}

fn side_exponent_of(side: usize) -> Result<u32> {
    if side >= 2 && side.is_power_of_two() {
        Ok(side.trailing_zeros())
    } else {
        Err(Error::NonPowerOfTwoSide(side))
    }
}

fn grid_from_rows(rows: Vec<Vec<f64>>) -> Result<GridMap> {
    let side = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != side {
            return Err(Error::NonSquare {
                rows: side,
                bad_row: i,
                cols: row.len(),
            });
        }
    }
    let exponent = side_exponent_of(side)?;
    GridMap::new(exponent, rows.into_iter().flatten().collect())
}

fn parse_csv_grid(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split(',') {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| {
                Error::MalformedFile(format!("line {}: bad number {token:?}", lineno + 1))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::MalformedFile("empty CSV".into()));
    }
    Ok(rows)
}

fn parse_pgm(bytes: &[u8]) -> Result<GridMap> {
    let mut cursor = 0usize;
    let magic = pgm_token(bytes, &mut cursor)
        .ok_or_else(|| Error::MalformedFile("missing PGM magic".into()))?;
    let binary = match magic.as_str() {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(Error::MalformedFile(format!(
                "unsupported PGM magic {other:?}"
            )))
        }
    };

    let width = pgm_usize(bytes, &mut cursor, "width")?;
    let height = pgm_usize(bytes, &mut cursor, "height")?;
    let maxval = pgm_usize(bytes, &mut cursor, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedFile(format!("bad maxval {maxval}")));
    }
    if width != height {
        return Err(Error::NonSquare {
            rows: height,
            bad_row: 0,
            cols: width,
        });
    }
    let exponent = side_exponent_of(width)?;
    let count = width * height;

    let mut occ = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from raster data.
        cursor += 1;
        let wide = maxval > 255;
        let sample_len = if wide { 2 } else { 1 };
        if bytes.len() < cursor + count * sample_len {
            return Err(Error::MalformedFile("truncated P5 raster".into()));
        }
        for i in 0..count {
            let raw = if wide {
                let hi = bytes[cursor + 2 * i] as u32;
                let lo = bytes[cursor + 2 * i + 1] as u32;
                (hi << 8) | lo
            } else {
                bytes[cursor + i] as u32
            };
            occ.push(raw as f64 / maxval as f64);
        }
    } else {
        for _ in 0..count {
            let raw = pgm_usize(bytes, &mut cursor, "pixel")?;
            occ.push(raw as f64 / maxval as f64);
        }
    }
    for (index, &value) in occ.iter().enumerate() {
        if value > 1.0 {
            return Err(Error::ValueOutOfRange { index, value });
        }
    }
    GridMap::new(exponent, occ)
}

/// Next whitespace-delimited ASCII token, skipping `#` comments.
fn pgm_token(bytes: &[u8], cursor: &mut usize) -> Option<String> {
    loop {
        while *cursor < bytes.len() && bytes[*cursor].is_ascii_whitespace() {
            *cursor += 1;
        }
        if *cursor < bytes.len() && bytes[*cursor] == b'#' {
            while *cursor < bytes.len() && bytes[*cursor] != b'\n' {
                *cursor += 1;
            }
            continue;
        }
        break;
    }
    let start = *cursor;
    while *cursor < bytes.len() && !bytes[*cursor].is_ascii_whitespace() {
        *cursor += 1;
    }
    if *cursor > start {
        Some(String::from_utf8_lossy(&bytes[start..*cursor]).into_owned())
    } else {
        None
    }
}

fn pgm_usize(bytes: &[u8], cursor: &mut usize, what: &str) -> Result<usize> {
    let token = pgm_token(bytes, cursor)
        .ok_or_else(|| Error::MalformedFile(format!("missing PGM {what}")))?;
    token
        .parse()
        .map_err(|_| Error::MalformedFile(format!("bad PGM {what}: {token:?}")))
}
