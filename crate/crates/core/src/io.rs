//! Field serialization: CSV (`x,value` or `x,y,value`) and a flat binary
//! layout (little-endian `n: u64`, `N: u64`, `L: f64`, then the values
//! row-major as `f64`).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField};

pub fn write_csv<W: Write>(f: &SampledField, out: W) -> Result<()> {
    let grid = f.grid();
    let mut w = csv::Writer::from_writer(out);
    match grid.dim() {
        1 => w.write_record(["x", "value"])?,
        _ => w.write_record(["x", "y", "value"])?,
    }
    for (flat, v) in f.values().iter().enumerate() {
        let node = grid.node(flat);
        let mut rec: Vec<String> = node[..grid.dim()].iter().map(|c| c.to_string()).collect();
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field written by [`write_csv`]; the grid is recovered from the
/// first coordinate and the row count.
pub fn read_csv<R: Read>(input: R) -> Result<SampledField> {
    let mut r = csv::Reader::from_reader(input);
    let dim = match r.headers()?.len() {
        2 => 1,
        3 => 2,
        k => return Err(Error::Io(format!("expected 2 or 3 csv columns, found {k}"))),
    };
    let mut first = None;
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Io(format!("bad number {:?}: {e}", &rec[i])))
        };
        if first.is_none() {
            first = Some(parse(0)?);
        }
        values.push(parse(dim)?);
    }
    let x0 = first.ok_or_else(|| Error::Io("empty csv field".into()))?;
    let points = match dim {
        1 => values.len(),
        _ => (values.len() as f64).sqrt().round() as usize,
    };
    let grid = Grid::new(dim, points, -x0)?;
    SampledField::new(grid, values)
}

pub fn write_binary<W: Write>(f: &SampledField, mut out: W) -> Result<()> {
    let grid = f.grid();
    out.write_all(&(grid.dim() as u64).to_le_bytes())?;
    out.write_all(&(grid.points() as u64).to_le_bytes())?;
    out.write_all(&grid.half_extent().to_le_bytes())?;
    for v in f.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<SampledField> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let dim = u64::from_le_bytes(next(&mut input)?) as usize;
    let points = u64::from_le_bytes(next(&mut input)?) as usize;
    let half_extent = f64::from_le_bytes(next(&mut input)?);
    let grid = Grid::new(dim, points, half_extent)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        values.push(f64::from_le_bytes(next(&mut input)?));
    }
    SampledField::new(grid, values)
}

/// Load a field from disk, choosing the format by extension (`.csv`, or
/// binary otherwise).
pub fn load_field(path: &Path) -> Result<SampledField> {
    let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let reader = std::io::BufReader::new(file);
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(reader),
        _ => read_binary(reader),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use proptest::prelude::*;

    #[test]
    fn binary_header_layout() {
        let g = Grid::new(1, 16, 2.5).unwrap();
        let f = sample(|x| x[0], &g).unwrap();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 16 * 8);
        assert_eq!(&buf[..8], &1u64.to_le_bytes());
        assert_eq!(&buf[8..16], &16u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2.5f64.to_le_bytes());
        assert_eq!(&buf[24..32], &(-2.5f64).to_le_bytes());
    }

    #[test]
    fn truncated_binary_is_an_error() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let mut buf = Vec::new();
        write_binary(&SampledField::zeros(g), &mut buf).unwrap();
        buf.truncate(100);
        assert!(read_binary(&buf[..]).is_err());
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(dim in 1usize..=2, half in 0.1f64..100.0, seed in any::<u64>()) {
            let g = Grid::new(dim, 16, half).unwrap();
            let f = sample(|x| ((seed as f64) * 1e-3 + x[0] * 1.7 + x.get(1).copied().unwrap_or(0.0)).sin(), &g).unwrap();
            let mut bin = Vec::new();
            write_binary(&f, &mut bin).unwrap();
            prop_assert_eq!(read_binary(&bin[..]).unwrap(), f.clone());
            let mut text = Vec::new();
            write_csv(&f, &mut text).unwrap();
            let back = read_csv(&text[..]).unwrap();
            prop_assert_eq!(back.values(), f.values());
            prop_assert!((back.grid().half_extent() - half).abs() <= 1e-12 * half);
        }
    }
}
