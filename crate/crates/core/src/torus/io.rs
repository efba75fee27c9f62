//! Flat binary layout for caching fields between runs.
//!
//! Header: three little-endian `u32` values `(n, N, kind)`. Payload: node
//! data in row-major node order as little-endian `f64`. Potentials store one
//! value per node; form fields store `n²` entries per node as `(re, im)` pairs.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use super::{FormField, Normalization, PotentialField, TorusGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum FieldKind {
    PotentialRaw = 0,
    PotentialMeanZero = 1,
    PotentialSupZero = 2,
    Form = 3,
}

impl FieldKind {
    fn from_u32(v: u32) -> Result<Self> {
        Ok(match v {
            0 => FieldKind::PotentialRaw,
            1 => FieldKind::PotentialMeanZero,
            2 => FieldKind::PotentialSupZero,
            3 => FieldKind::Form,
            _ => return Err(Error::Format(format!("unknown field kind {v}"))),
        })
    }
}

fn write_header<W: Write>(w: &mut W, n: usize, res: usize, kind: FieldKind) -> Result<()> {
    for v in [n as u32, res as u32, kind as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_potential<T: Real, W: Write>(w: &mut W, u: &PotentialField<T>) -> Result<()> {
    let kind = match u.normalization() {
        Normalization::Raw => FieldKind::PotentialRaw,
        Normalization::MeanZero => FieldKind::PotentialMeanZero,
        Normalization::SupZero => FieldKind::PotentialSupZero,
    };
    write_header(w, u.grid().complex_dim(), u.grid().resolution(), kind)?;
    for v in u.values() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn write_form<T: Real, W: Write>(w: &mut W, f: &FormField<T>) -> Result<()> {
    write_header(
        w,
        f.grid().complex_dim(),
        f.grid().resolution(),
        FieldKind::Form,
    )?;
    for z in f.entries() {
        w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

/// Reads the header; builds a grid when `grid` is `None`, otherwise checks it matches.
fn read_grid<T: Real, R: Read>(
    r: &mut R,
    grid: Option<Arc<TorusGrid<T>>>,
) -> Result<(Arc<TorusGrid<T>>, FieldKind)> {
    let n = read_u32(r)? as usize;
    let res = read_u32(r)? as usize;
    let kind = FieldKind::from_u32(read_u32(r)?)?;
    let grid = match grid {
        Some(g) if g.complex_dim() == n && g.resolution() == res => g,
        Some(g) => {
            return Err(Error::Format(format!(
                "cached field is (n={n}, N={res}), expected (n={}, N={})",
                g.complex_dim(),
                g.resolution()
            )))
        }
        None => TorusGrid::new(n, res)?,
    };
    Ok((grid, kind))
}

pub fn read_potential<T: Real, R: Read>(
    r: &mut R,
    grid: Option<Arc<TorusGrid<T>>>,
) -> Result<PotentialField<T>> {
    let (grid, kind) = read_grid(r, grid)?;
    let tag = match kind {
        FieldKind::PotentialRaw => Normalization::Raw,
        FieldKind::PotentialMeanZero => Normalization::MeanZero,
        FieldKind::PotentialSupZero => Normalization::SupZero,
        FieldKind::Form => {
            return Err(Error::Format(
                "expected a potential, found a form field".into(),
            ))
        }
    };
    let values = (0..grid.nodes())
        .map(|_| read_f64(r).map(T::lit))
        .collect::<Result<Vec<T>>>()?;
    Ok(PotentialField::new(grid, values)?.with_tag(tag))
}

pub fn read_form<T: Real, R: Read>(
    r: &mut R,
    grid: Option<Arc<TorusGrid<T>>>,
) -> Result<FormField<T>> {
    let (grid, kind) = read_grid(r, grid)?;
    if kind != FieldKind::Form {
        return Err(Error::Format(
            "expected a form field, found a potential".into(),
        ));
    }
    let n = grid.complex_dim();
    let mut entries = Vec::with_capacity(grid.nodes() * n * n);
    for _ in 0..grid.nodes() * n * n {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        entries.push(Complex::new(T::lit(re), T::lit(im)));
    }
    FormField::from_entries(grid, entries)
}
