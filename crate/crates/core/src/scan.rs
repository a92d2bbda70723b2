//! Raster scan of the `(x, q)` plane.
//!
//! Each grid point is classified as outside `J_q`, certified unique,
//! certified outside the closure of U, certified non-unique, or unknown at
//! the configured depth. Rows are computed in parallel and assembled in order,
//! so the output depends only on the configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::classify::{self, Classification};
use crate::count;
use crate::error::{Error, Result};
use crate::exactnum::{int, rational_from_decimal, to_fixed, Base, PointInJ, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellClass {
    OutsideJ,
    UniqueCertified,
    NonUniqueCertified,
    ClosureViolationCertified,
    Unknown,
}

impl CellClass {
    pub const ALL: [CellClass; 5] = [
        CellClass::OutsideJ,
        CellClass::UniqueCertified,
        CellClass::NonUniqueCertified,
        CellClass::ClosureViolationCertified,
        CellClass::Unknown,
    ];

    pub fn gray(self) -> u8 {
        match self {
            CellClass::OutsideJ => 255,
            CellClass::UniqueCertified => 0,
            CellClass::ClosureViolationCertified => 192,
            CellClass::NonUniqueCertified => 128,
            CellClass::Unknown => 64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellClass::OutsideJ => "OutsideJ",
            CellClass::UniqueCertified => "UniqueCertified",
            CellClass::NonUniqueCertified => "NonUniqueCertified",
            CellClass::ClosureViolationCertified => "ClosureViolationCertified",
            CellClass::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Pgm,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "pgm" => Ok(Format::Pgm),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format '{s}' (pgm or csv)"
            ))),
        }
    }
}

/// How CSV coordinates are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Values {
    Exact,
    Decimal,
}

impl FromStr for Values {
    type Err = Error;

    fn from_str(s: &str) -> Result<Values> {
        match s {
            "exact" => Ok(Values::Exact),
            "decimal" => Ok(Values::Decimal),
            _ => Err(Error::InvalidConfig(format!(
                "unknown value style '{s}' (exact or decimal)"
            ))),
        }
    }
}

/// Where sample points sit inside the range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// `x_i = x_min + i·(x_max − x_min)/(W − 1)`, both ends included.
    Nodes,
    /// `x_i = x_min + (i + 1/2)·(x_max − x_min)/W`.
    Centers,
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sampling> {
        match s {
            "nodes" => Ok(Sampling::Nodes),
            "centers" => Ok(Sampling::Centers),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sampling '{s}' (nodes or centers)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub x_range: (Rational, Rational),
    pub q_range: (Rational, Rational),
    pub resolution: (usize, usize),
    pub depth: usize,
    pub output: PathBuf,
    pub format: Format,
    pub values: Values,
    pub sampling: Sampling,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            x_range: (int(0), int(1)),
            q_range: (
                rational_from_decimal("1.8").expect("literal"),
                rational_from_decimal("1.9").expect("literal"),
            ),
            resolution: (64, 64),
            depth: 20,
            output: PathBuf::from("scan.pgm"),
            format: Format::Pgm,
            values: Values::Decimal,
            sampling: Sampling::Nodes,
        }
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("{key} = '{v}' is not a nonnegative integer")))
}

impl ScanConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "x_min" => self.x_range.0 = rational_from_decimal(v)?,
            "x_max" => self.x_range.1 = rational_from_decimal(v)?,
            "q_min" => self.q_range.0 = rational_from_decimal(v)?,
            "q_max" => self.q_range.1 = rational_from_decimal(v)?,
            "width" => self.resolution.0 = parse_usize("width", v)?,
            "height" => self.resolution.1 = parse_usize("height", v)?,
            "depth" => self.depth = parse_usize("depth", v)?,
            "output" => self.output = PathBuf::from(v),
            "format" => self.format = v.parse()?,
            "values" => self.values = v.parse()?,
            "sampling" => self.sampling = v.parse()?,
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", i + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_range.0 <= int(1) || self.q_range.0 > self.q_range.1 {
            return Err(Error::InvalidConfig(format!(
                "q range [{}, {}] must satisfy 1 < q_min ≤ q_max",
                self.q_range.0, self.q_range.1
            )));
        }
        if self.x_range.0 > self.x_range.1 {
            return Err(Error::InvalidConfig("x_min must not exceed x_max".into()));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 || self.depth == 0 {
            return Err(Error::InvalidConfig(
                "width, height and depth must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn sample(&self, lo: &Rational, hi: &Rational, n: usize, i: usize) -> Rational {
        let span = hi - lo;
        match self.sampling {
            Sampling::Nodes if n == 1 => lo.clone(),
            Sampling::Nodes => lo + span * int(i as i64) / int(n as i64 - 1),
            Sampling::Centers => lo + span * Rational::new((2 * i + 1).into(), (2 * n).into()),
        }
    }

    /// Sample abscissa of column `i`.
    pub fn x_at(&self, i: usize) -> Rational {
        self.sample(&self.x_range.0, &self.x_range.1, self.resolution.0, i)
    }

    /// Sample base of row `j`; row 0 is the largest `q`.
    pub fn q_at(&self, j: usize) -> Rational {
        let h = self.resolution.1;
        self.sample(&self.q_range.0, &self.q_range.1, h, h - 1 - j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub x: Rational,
    pub q: Rational,
    pub class: CellClass,
    /// The classification that decided the class, if any.
    pub evidence: Option<Classification>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanResult {
    pub config: ScanConfig,
    /// Rows in output order (row 0 = largest `q`).
    pub rows: Vec<Vec<Cell>>,
}

impl ScanResult {
    pub fn counts(&self) -> BTreeMap<CellClass, usize> {
        let mut m = BTreeMap::new();
        for c in self.rows.iter().flatten() {
            *m.entry(c.class).or_insert(0) += 1;
        }
        m
    }

    pub fn column(&self, i: usize) -> impl Iterator<Item = &Cell> {
        self.rows.iter().map(move |r| &r[i])
    }

    pub fn write_pgm(&self, out: &mut dyn Write) -> Result<()> {
        let (w, h) = self.config.resolution;
        write!(out, "P5\n{w} {h}\n255\n")?;
        let payload: Vec<u8> = self.rows.iter().flatten().map(|c| c.class.gray()).collect();
        out.write_all(&payload)?;
        Ok(())
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "x,q,class,witness_index,condition")?;
        let fmt = |r: &Rational| match self.config.values {
            Values::Exact => r.to_string(),
            Values::Decimal => to_fixed(r, 12),
        };
        for c in self.rows.iter().flatten() {
            let w = c.evidence.and_then(|e| e.witness);
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt(&c.x),
                fmt(&c.q),
                c.class,
                w.map(|w| w.index.to_string()).unwrap_or_default(),
                w.map(|w| w.condition.as_str()).unwrap_or_default()
            )?;
        }
        Ok(())
    }

    pub fn write(&self, out: &mut dyn Write) -> Result<()> {
        match self.config.format {
            Format::Pgm => self.write_pgm(out),
            Format::Csv => self.write_csv(out),
        }
    }

    pub fn write_file(&self) -> Result<()> {
        let path = &self.config.output;
        let mut f = std::io::BufWriter::new(
            std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        );
        self.write(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// Classifies a single point at the given depth.
pub fn classify_cell(
    x: &Rational,
    base: &Base,
    depth: usize,
    alpha: &classify::Reference,
) -> Result<(CellClass, Option<Classification>)> {
    if *x < int(0) || x > base.j_max() {
        return Ok((CellClass::OutsideJ, None));
    }
    let p = PointInJ::new(x.clone(), base.clone())?;
    let unique = count::is_unique_bruteforce_with(&p, depth, alpha, count::PERIOD_CAP)?;
    if unique.is_yes() {
        return Ok((CellClass::UniqueCertified, Some(unique)));
    }
    let closure = classify::in_closure_u_with(&p, depth, alpha)?;
    if closure.is_no() {
        return Ok((CellClass::ClosureViolationCertified, Some(closure)));
    }
    if unique.is_no() {
        return Ok((CellClass::NonUniqueCertified, Some(unique)));
    }
    Ok((CellClass::Unknown, None))
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let (w, h) = cfg.resolution;
    let rows = (0..h)
        .into_par_iter()
        .map(|j| {
            let q = cfg.q_at(j);
            let base = Base::new(q.clone())?;
            let alpha = classify::alpha_reference(&base, count::ALPHA_LEN)?;
            (0..w)
                .map(|i| {
                    let x = cfg.x_at(i);
                    let (class, evidence) = classify_cell(&x, &base, cfg.depth, &alpha)?;
                    Ok(Cell {
                        x,
                        q: q.clone(),
                        class,
                        evidence,
                    })
                })
                .collect::<Result<Vec<Cell>>>()
        })
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    Ok(ScanResult {
        config: cfg.clone(),
        rows,
    })
}
