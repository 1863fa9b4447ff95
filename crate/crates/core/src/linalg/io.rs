//! Plain-text matrix and vector files.
//!
//! `HPD1` matrices: a header line `HPD1 <m>` followed by `m*m` lines of
//! `re im`, row-major. `HPS1` vector sets: a header `HPS1 <m> <count>`
//! followed by `count*m` lines of `re im`, one vector after another.
//! Numbers are written in Rust's shortest round-trip exponent form, so a
//! dump followed by a load reproduces the values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::{CMatrix, ComplexVector, Hermitian, C64};
use crate::error::{Error, Result};

const HERMITIAN_CHECK: f64 = 1e-10;

pub fn format_hpd1(a: &Hermitian) -> String {
    let n = a.dim();
    let mut out = format!("HPD1 {n}\n");
    for i in 0..n {
        for j in 0..n {
            let z = a.get(i, j);
            writeln!(out, "{:e} {:e}", z.re, z.im).unwrap();
        }
    }
    out
}

pub fn parse_hpd1(text: &str) -> Result<Hermitian> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| Error::Parse("empty HPD1 file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 || fields[0] != "HPD1" {
        return Err(Error::Parse(format!("bad HPD1 header: {header:?}")));
    }
    let n: usize = parse_num(fields[1])?;
    if n == 0 {
        return Err(Error::Parse("HPD1 dimension must be positive".into()));
    }
    let entries = parse_pairs(lines, n * n)?;
    let m = CMatrix::from_fn(n, |i, j| entries[i * n + j]);
    let scale = m.frob_norm().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..=i {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > HERMITIAN_CHECK * scale {
                return Err(Error::Parse(format!("HPD1 matrix not Hermitian at ({i},{j})")));
            }
        }
    }
    Ok(Hermitian::from_lower(m))
}

pub fn write_hpd1(path: &Path, a: &Hermitian) -> Result<()> {
    std::fs::write(path, format_hpd1(a))?;
    Ok(())
}

pub fn read_hpd1(path: &Path) -> Result<Hermitian> {
    parse_hpd1(&std::fs::read_to_string(path)?)
}

pub fn format_hps1(vectors: &[ComplexVector]) -> Result<String> {
    let m = vectors.first().map(ComplexVector::dim).unwrap_or(0);
    let mut out = format!("HPS1 {m} {}\n", vectors.len());
    for v in vectors {
        if v.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, got: v.dim() });
        }
        for z in v.as_slice() {
            writeln!(out, "{:e} {:e}", z.re, z.im).unwrap();
        }
    }
    Ok(out)
}

pub fn parse_hps1(text: &str) -> Result<Vec<ComplexVector>> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| Error::Parse("empty HPS1 file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "HPS1" {
        return Err(Error::Parse(format!("bad HPS1 header: {header:?}")));
    }
    let m: usize = parse_num(fields[1])?;
    let count: usize = parse_num(fields[2])?;
    if m == 0 {
        return Err(Error::Parse("HPS1 dimension must be positive".into()));
    }
    let entries = parse_pairs(lines, m * count)?;
    entries
        .chunks(m)
        .map(|c| ComplexVector::new(c.to_vec()))
        .collect()
}

pub fn write_hps1(path: &Path, vectors: &[ComplexVector]) -> Result<()> {
    std::fs::write(path, format_hps1(vectors)?)?;
    Ok(())
}

pub fn read_hps1(path: &Path) -> Result<Vec<ComplexVector>> {
    parse_hps1(&std::fs::read_to_string(path)?)
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("invalid number {s:?}")))
}

fn parse_pairs<'a>(lines: impl Iterator<Item = &'a str>, expected: usize) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(expected);
    for line in lines {
        let mut it = line.split_whitespace();
        let (Some(re), Some(im), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("expected `re im`, got {line:?}")));
        };
        out.push(C64::new(parse_num(re)?, parse_num(im)?));
    }
    if out.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} entries, found {}",
            out.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hpd1_roundtrip_is_exact() {
        let a = Hermitian::from_lower_fn(3, |i, j| {
            C64::new(1.0 / (1.0 + i as f64 + j as f64), if i == j { 0.0 } else { 0.1 * (i as f64) / 3.0 })
        });
        let text = format_hpd1(&a);
        assert!(text.starts_with("HPD1 3\n"));
        assert_eq!(text.lines().count(), 1 + 9);
        assert_eq!(parse_hpd1(&text).unwrap(), a);
    }

    #[test]
    fn hpd1_rejects_malformed() {
        assert!(parse_hpd1("").is_err());
        assert!(parse_hpd1("HPD2 1\n1 0\n").is_err());
        assert!(parse_hpd1("HPD1 2\n1 0\n0 0\n").is_err());
        // not Hermitian
        assert!(parse_hpd1("HPD1 2\n1 0\n2 0\n0 0\n1 0\n").is_err());
    }

    #[test]
    fn hps1_roundtrip() {
        let v = vec![
            ComplexVector::new(vec![C64::new(1e-300, -2.5), C64::new(3.0, 0.0)]).unwrap(),
            ComplexVector::new(vec![C64::new(0.1, 0.2), C64::new(-7.0, 1e20)]).unwrap(),
        ];
        let back = parse_hps1(&format_hps1(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }
}
