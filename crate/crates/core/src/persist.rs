//! Binary model files.
//!
//! Layout: magic bytes, `u32` format version, then a sequence of fields.
//! Integers are little-endian `u64`, strings are length-prefixed UTF-8,
//! matrices are `rows`, `cols` followed by row-major little-endian `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::nn::Matrix;

pub struct ModelWriter<W: Write> {
    out: W,
}

impl<W: Write> ModelWriter<W> {
    pub fn new(mut out: W, magic: &str, version: u32) -> Result<Self> {
        out.write_all(magic.as_bytes())?;
        out.write_all(&version.to_le_bytes())?;
        Ok(ModelWriter { out })
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.out.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.out.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn str(&mut self, s: &str) -> Result<()> {
        self.u64(s.len() as u64)?;
        self.out.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn strings(&mut self, items: &[String]) -> Result<()> {
        self.u64(items.len() as u64)?;
        for s in items {
            self.str(s)?;
        }
        Ok(())
    }

    pub fn floats(&mut self, v: &[f64]) -> Result<()> {
        self.u64(v.len() as u64)?;
        for &x in v {
            self.f64(x)?;
        }
        Ok(())
    }

    pub fn matrix(&mut self, m: &Matrix) -> Result<()> {
        self.u64(m.rows as u64)?;
        self.u64(m.cols as u64)?;
        for &x in &m.data {
            self.f64(x)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub struct ModelReader<R: Read> {
    input: R,
}

// Guards against absurd lengths in corrupt files.
const MAX_LEN: u64 = 1 << 34;

impl<R: Read> ModelReader<R> {
    /// Checks magic and version.
    pub fn new(mut input: R, magic: &str, version: u32) -> Result<Self> {
        let mut buf = vec![0u8; magic.len()];
        input
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("file too short for magic".into()))?;
        if buf != magic.as_bytes() {
            return Err(Error::Format(format!("bad magic, expected {}", magic)));
        }
        let mut v = [0u8; 4];
        input.read_exact(&mut v)?;
        let found = u32::from_le_bytes(v);
        if found != version {
            return Err(Error::Format(format!(
                "unsupported format version {} (expected {})",
                found, version
            )));
        }
        Ok(ModelReader { input })
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.input
            .read_exact(&mut b)
            .map_err(|_| Error::Format("unexpected end of file".into()))?;
        Ok(u64::from_le_bytes(b))
    }

    pub fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        if v > MAX_LEN {
            return Err(Error::Format(format!("implausible length {}", v)));
        }
        Ok(v as usize)
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn str(&mut self) -> Result<String> {
        let len = self.usize()?;
        let mut buf = vec![0u8; len];
        self.input
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("unexpected end of file".into()))?;
        String::from_utf8(buf).map_err(|_| Error::Format("string is not UTF-8".into()))
    }

    pub fn strings(&mut self) -> Result<Vec<String>> {
        let n = self.usize()?;
        (0..n).map(|_| self.str()).collect()
    }

    pub fn floats(&mut self) -> Result<Vec<f64>> {
        let n = self.usize()?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn matrix(&mut self) -> Result<Matrix> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let n = rows
            .checked_mul(cols)
            .filter(|&n| n as u64 <= MAX_LEN)
            .ok_or_else(|| Error::Format("matrix too large".into()))?;
        let data = (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_vec(rows, cols, data))
    }

    /// Reads a matrix and checks its shape.
    pub fn matrix_shaped(&mut self, rows: usize, cols: usize, what: &str) -> Result<Matrix> {
        let m = self.matrix()?;
        if m.rows != rows || m.cols != cols {
            return Err(Error::Format(format!(
                "{} has shape {}x{}, expected {}x{}",
                what, m.rows, m.cols, rows, cols
            )));
        }
        Ok(m)
    }

    pub fn floats_len(&mut self, len: usize, what: &str) -> Result<Vec<f64>> {
        let v = self.floats()?;
        if v.len() != len {
            return Err(Error::Format(format!(
                "{} has length {}, expected {}",
                what,
                v.len(),
                len
            )));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_fields() {
        let mut w = ModelWriter::new(Vec::new(), "TEST", 3).unwrap();
        w.str("héllo").unwrap();
        w.strings(&["a".into(), "".into()]).unwrap();
        w.matrix(&Matrix::from_vec(1, 2, vec![0.5, -1e300])).unwrap();
        w.floats(&[f64::MIN_POSITIVE]).unwrap();
        let bytes = w.finish().unwrap();
        assert!(bytes.starts_with(b"TEST\x03\x00\x00\x00"));

        let mut r = ModelReader::new(&bytes[..], "TEST", 3).unwrap();
        assert_eq!(r.str().unwrap(), "héllo");
        assert_eq!(r.strings().unwrap(), vec!["a".to_owned(), "".to_owned()]);
        assert_eq!(r.matrix_shaped(1, 2, "m").unwrap().data, vec![0.5, -1e300]);
        assert_eq!(r.floats().unwrap(), vec![f64::MIN_POSITIVE]);
        assert!(r.u64().is_err());
    }

    #[test]
    fn rejects_wrong_magic_and_version() {
        let bytes = ModelWriter::new(Vec::new(), "TEST", 1).unwrap().finish().unwrap();
        assert!(ModelReader::new(&bytes[..], "TEXT", 1).is_err());
        assert!(ModelReader::new(&bytes[..], "TEST", 2).is_err());
    }
}
