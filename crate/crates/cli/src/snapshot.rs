//! Binary field snapshots.
//!
//! A file is a 64-byte ASCII header `NRQEDF1 nx ny nz L t kind`, space padded
//! and ending in a newline, followed by little-endian f64 values in storage
//! order (x fastest). Complex scalars interleave re/im; vectors store the
//! three components one after the other. `L` and `t` use the shortest
//! representation that parses back to the same f64.

use std::io::{self, Read, Write};

use nrqed_core::grid::{ComplexScalarField, Grid3, RealScalarField, RealVectorField};

pub const MAGIC: &str = "NRQEDF1";
pub const HEADER_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    ComplexScalar,
    RealScalar,
    RealVector,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ComplexScalar => "cscalar",
            Kind::RealScalar => "rscalar",
            Kind::RealVector => "rvector",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Kind::ComplexScalar, Kind::RealScalar, Kind::RealVector].into_iter().find(|k| k.name() == s)
    }

    fn values_per_point(self) -> usize {
        match self {
            Kind::RealScalar => 1,
            Kind::ComplexScalar => 2,
            Kind::RealVector => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub shape: [usize; 3],
    pub box_length: f64,
    pub t: f64,
    pub kind: Kind,
    pub data: Vec<f64>,
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

impl Snapshot {
    pub fn complex(f: &ComplexScalarField, t: f64) -> Self {
        let data = f.values.iter().flat_map(|z| [z.re, z.im]).collect();
        Self::new(f.grid, t, Kind::ComplexScalar, data)
    }

    pub fn real(f: &RealScalarField, t: f64) -> Self {
        Self::new(f.grid, t, Kind::RealScalar, f.values.clone())
    }

    pub fn vector(f: &RealVectorField, t: f64) -> Self {
        Self::new(f.grid, t, Kind::RealVector, f.components.concat())
    }

    fn new(g: Grid3, t: f64, kind: Kind, data: Vec<f64>) -> Self {
        Self { shape: g.shape(), box_length: g.box_length(), t, kind, data }
    }

    pub fn header(&self) -> io::Result<[u8; HEADER_LEN]> {
        let [nx, ny, nz] = self.shape;
        let text = format!("{MAGIC} {nx} {ny} {nz} {:?} {:?} {}", self.box_length, self.t, self.kind.name());
        if text.len() > HEADER_LEN - 1 {
            return Err(invalid(format!("snapshot header longer than {} bytes: {text}", HEADER_LEN - 1)));
        }
        let mut h = [b' '; HEADER_LEN];
        h[..text.len()].copy_from_slice(text.as_bytes());
        h[HEADER_LEN - 1] = b'\n';
        Ok(h)
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&self.header()?)?;
        let mut buf = Vec::with_capacity(8 * self.data.len());
        for x in &self.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read<R: Read>(mut r: R) -> io::Result<Self> {
        let mut h = [0u8; HEADER_LEN];
        r.read_exact(&mut h)?;
        let text = std::str::from_utf8(&h).map_err(|e| invalid(e.to_string()))?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 7 || fields[0] != MAGIC || h[HEADER_LEN - 1] != b'\n' {
            return Err(invalid(format!("not a snapshot header: {text:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| invalid(format!("{s}: {e}")));
        let flt = |s: &str| s.parse::<f64>().map_err(|e| invalid(format!("{s}: {e}")));
        let shape = [num(fields[1])?, num(fields[2])?, num(fields[3])?];
        let box_length = flt(fields[4])?;
        let t = flt(fields[5])?;
        let kind = Kind::parse(fields[6]).ok_or_else(|| invalid(format!("unknown kind {}", fields[6])))?;
        let count = shape.iter().product::<usize>() * kind.values_per_point();
        let mut bytes = vec![0u8; 8 * count];
        r.read_exact(&mut bytes)?;
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok(Self { shape, box_length, t, kind, data })
    }
}
