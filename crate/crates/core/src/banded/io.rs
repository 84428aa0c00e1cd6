//! `SBM` text format: a header line `SBM <n> <b>` followed by one line per
//! diagonal `d = 0..=b` holding the `n - d` entries `A[i + d][i]`.

use super::BandedSymmetric;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub fn to_sbm_string(a: &BandedSymmetric) -> String {
    let mut out = format!("SBM {} {}\n", a.n(), a.bandwidth());
    for band in a.bands() {
        let mut first = true;
        for v in band {
            if !first {
                out.push(' ');
            }
            first = false;
            // 17 significant digits round-trip every f64
            write!(out, "{v:.16e}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn parse_sbm(text: &str) -> Result<BandedSymmetric> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Parse { line: hline + 1, msg: format!("expected `SBM <n> <b>`, found `{header}`") };
    if fields.len() != 3 || fields[0] != "SBM" {
        return Err(bad_header());
    }
    let n: usize = fields[1].parse().map_err(|_| bad_header())?;
    let b: usize = fields[2].parse().map_err(|_| bad_header())?;
    if b >= n {
        return Err(Error::InvalidInput(format!("bandwidth b = {b} must be smaller than n = {n}")));
    }
    let mut bands = Vec::with_capacity(b + 1);
    for d in 0..=b {
        let (lno, line) = lines.next().ok_or(Error::Parse {
            line: hline + 2 + d,
            msg: format!("missing diagonal {d}"),
        })?;
        let band = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse { line: lno + 1, msg: format!("invalid number `{tok}`") })
            })
            .collect::<Result<Vec<f64>>>()?;
        if band.len() != n - d {
            return Err(Error::Parse {
                line: lno + 1,
                msg: format!("diagonal {d} has {} entries, expected {}", band.len(), n - d),
            });
        }
        bands.push(band);
    }
    if let Some((lno, _)) = lines.next() {
        return Err(Error::Parse { line: lno + 1, msg: "unexpected trailing data".into() });
    }
    BandedSymmetric::new(n, b, bands)
}

pub fn read_sbm(path: impl AsRef<Path>) -> Result<BandedSymmetric> {
    parse_sbm(&std::fs::read_to_string(path)?)
}

pub fn write_sbm(a: &BandedSymmetric, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_sbm_string(a))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{synth_banded, SpectrumSpec};

    #[test]
    fn round_trip_is_exact() {
        let spec = SpectrumSpec::uniform_two_sided(33, 1e-3).unwrap();
        let a = synth_banded(&spec, 3, Some(5)).unwrap();
        let text = to_sbm_string(&a);
        assert!(text.starts_with("SBM 33 3\n"));
        assert_eq!(parse_sbm(&text).unwrap(), a);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_sbm("").is_err());
        assert!(parse_sbm("SBM 2\n1 1\n1\n").is_err());
        assert!(parse_sbm("SBM 2 1\n1 1\n").is_err());
        assert!(parse_sbm("SBM 2 1\n1 1\n1 2\n").is_err());
        assert!(parse_sbm("SBM 2 1\n1 x\n1\n").is_err());
        assert!(parse_sbm("SBM 2 2\n1 1\n1\n0\n").is_err());
        assert!(parse_sbm("SBM 2 1\n1 1\n1\nextra\n").is_err());
        assert!(parse_sbm("SBM 2 1\n2 2\n1\n").is_ok());
    }
}
