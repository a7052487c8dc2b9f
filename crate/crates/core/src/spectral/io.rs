//! Flat binary field format, all little-endian:
//! `u32 d`, `u32 n`, `f64 L`, then `n^d` samples as interleaved `f64` real
//! and imaginary parts in row-major order.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use super::{Field, Grid};
use crate::error::{Error, Result};

pub const HEADER_BYTES: usize = 16;

pub fn write_field<W: Write>(mut w: W, f: &Field) -> Result<()> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(HEADER_BYTES + 16 * g.len());
    buf.extend_from_slice(&g.dim().to_le_bytes());
    buf.extend_from_slice(&(g.points_per_axis() as u32).to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    for z in f.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn decode(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < HEADER_BYTES {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let float = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let (d, n, length) = (word(0), word(4) as usize, float(8));
    let grid = Grid::new(d, n, length).map_err(|e| Error::Format(e.to_string()))?;
    let payload = &bytes[HEADER_BYTES..];
    if payload.len() != 16 * grid.len() {
        return Err(Error::Format(format!(
            "payload holds {} bytes, expected {} for {} samples",
            payload.len(),
            16 * grid.len(),
            grid.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| Complex64::new(float_at(c, 0), float_at(c, 8)))
        .collect();
    Field::new(grid, values).map_err(|e| Error::Format(e.to_string()))
}

fn float_at(c: &[u8], i: usize) -> f64 {
    f64::from_le_bytes(c[i..i + 8].try_into().expect("8 bytes"))
}

pub fn save_field(path: impl AsRef<Path>, f: &Field) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), f)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<Field> {
    decode(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let g = Grid::new(2, 8, 3.5).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0].sin(), x[1] * 0.25));
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), HEADER_BYTES + 16 * 64);
        assert_eq!(&buf[0..4], &2u32.to_le_bytes());
        assert_eq!(read_field(&buf[..]).unwrap(), f);
    }

    #[test]
    fn rejects_truncated_payload() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &Field::zeros(g)).unwrap();
        assert!(matches!(decode(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(decode(&buf[..3]), Err(Error::Format(_))));
    }
}
