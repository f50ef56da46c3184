//! Plain-text snapshot files.
//!
//! ```text
//! HMFP1 <n_theta> <n_v> <v_max> <time>
//! <n_theta * n_v values, theta outer, v inner>
//! ```
//!
//! Values are written with 17 significant digits so a read/write cycle is
//! lossless; one theta row per line.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{HmfError, Result};
use crate::grid::{DistributionField, PhaseGrid};

pub const MAGIC: &str = "HMFP1";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: DistributionField,
    pub time: f64,
}

impl Snapshot {
    pub fn new(field: DistributionField, time: f64) -> Self {
        Self { field, time }
    }

    pub fn to_text(&self) -> String {
        let grid = self.field.grid();
        let mut out = String::with_capacity(grid.len() * 25 + 64);
        writeln!(out, "{MAGIC} {} {} {} {}", grid.n_theta(), grid.n_v(), grid.v_max(), self.time).unwrap();
        for i in 0..grid.n_theta() {
            let row = self.field.row(i);
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{x:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let bad = |msg: &str| HmfError::Snapshot(msg.to_string());
        if tokens.next() != Some(MAGIC) {
            return Err(bad("missing HMFP1 header"));
        }
        let mut header = |name: &str| tokens.next().ok_or_else(|| bad(&format!("header is missing {name}")));
        let n_theta: usize = header("n_theta")?.parse().map_err(|_| bad("bad n_theta"))?;
        let n_v: usize = header("n_v")?.parse().map_err(|_| bad("bad n_v"))?;
        let v_max: f64 = header("v_max")?.parse().map_err(|_| bad("bad v_max"))?;
        let time: f64 = header("time")?.parse().map_err(|_| bad("bad time"))?;
        let grid = PhaseGrid::new(n_theta, n_v, v_max)?;
        let mut values = Vec::with_capacity(grid.len());
        for tok in tokens {
            values.push(tok.parse::<f64>().map_err(|_| bad(&format!("bad value {tok:?}")))?);
        }
        if values.len() != grid.len() {
            return Err(bad(&format!("expected {} values, found {}", grid.len(), values.len())));
        }
        Ok(Self { field: DistributionField::new(grid, values)?, time })
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
