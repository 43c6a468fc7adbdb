use serde::{Deserialize, Serialize};

use crate::density::CircularDensity;
use crate::error::{Error, Result};

pub const TABLE1_KAPPAS: [f64; 4] = [0.1, 0.5, 1.0, 5.0];
pub const TABLE1_MUS: [f64; 3] = [0.1, 0.3, 0.5];
/// Published sigma_1^2 per kappa (identical for every mu).
const REFERENCE: [f64; 4] = [31.78, 1264.83, 13924.35, 13646828.67];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Cell {
    pub kappa: f64,
    pub mu: f64,
    pub sigma1_sq: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub tolerance: f64,
    pub cells: Vec<Table1Cell>,
    /// Largest relative spread of sigma_1^2 across mu within one kappa row.
    pub max_row_spread: f64,
}

impl Table1Report {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| !c.pass).count()
    }

    /// Header `kappa,mu,sigma1_sq,reference,rel_error,pass`, one row per cell.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for cell in &self.cells {
            w.serialize(cell)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Table1Cell>> {
        csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<Vec<Table1Cell>, _>>()
            .map_err(Error::from)
    }
}

/// sigma_1^2 for the von Mises grid `TABLE1_KAPPAS × TABLE1_MUS`, each cell
/// flagged against the published value at relative `tolerance`.
pub fn table1_reproduce(tolerance: f64) -> Result<Table1Report> {
    let mut cells = Vec::with_capacity(12);
    let mut max_row_spread = 0.0f64;
    for (&kappa, &reference) in TABLE1_KAPPAS.iter().zip(&REFERENCE) {
        let mut row = Vec::with_capacity(3);
        for &mu in &TABLE1_MUS {
            let s = CircularDensity::von_mises(kappa, mu)?
                .constants()?
                .sigma1_sq;
            let rel_error = (s - reference).abs() / reference;
            row.push(s);
            cells.push(Table1Cell {
                kappa,
                mu,
                sigma1_sq: s,
                reference,
                rel_error,
                pass: rel_error <= tolerance,
            });
        }
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max_row_spread = max_row_spread.max((hi - lo) / hi);
    }
    Ok(Table1Report {
        tolerance,
        cells,
        max_row_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_published_values() {
        let t = table1_reproduce(0.005).unwrap();
        assert_eq!(t.cells.len(), 12);
        assert!(t.passed(), "{t:?}");
        assert!(t.max_row_spread < 1e-9);
    }

    #[test]
    fn csv_roundtrip() {
        let t = table1_reproduce(0.005).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"kappa,mu,sigma1_sq,reference,rel_error,pass\n"));
        assert_eq!(Table1Report::read_csv(&buf[..]).unwrap(), t.cells);
    }

    #[test]
    fn tight_tolerance_fails() {
        let t = table1_reproduce(1e-6).unwrap();
        assert!(t.failures() > 0);
    }
}
