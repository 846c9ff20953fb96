//! CSV tables for combs and spectra.
//!
//! Floats are written in the shortest form that parses back to the same
//! bits. Files are UTF-8 with a header row and `\n` line endings.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::analytic::{DistributionFn, Peak};
use crate::comb::{Patch, Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::estimation::DiffractionEstimate;
use crate::goldenring::GoldenInt;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";")
}

/// `position,weight_re,weight_im`, plus `a,b` for positions in ℤ[τ].
/// Positions of dimension `d > 1` are `;`-separated.
pub fn write_comb_csv<W: Write>(w: W, comb: &WeightedComb) -> Result<()> {
    let mut out = writer(w);
    let golden = matches!(comb.positions(), Positions::Golden(_));
    let mut header = vec!["position", "weight_re", "weight_im"];
    if golden {
        header.extend(["a", "b"]);
    }
    out.write_record(&header)?;
    for (i, wgt) in comb.weights().iter().enumerate() {
        let position = match comb.positions() {
            Positions::Integer(v) => v[i].to_string(),
            Positions::Golden(v) => fmt_f64(v[i].embed()),
            Positions::Real { .. } => join(&comb.positions().point(i)),
        };
        let mut row = vec![position, fmt_f64(wgt.re), fmt_f64(wgt.im)];
        if let Positions::Golden(v) = comb.positions() {
            row.push(v[i].a.to_string());
            row.push(v[i].b.to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a comb written by [`write_comb_csv`]; the patch is not part of
/// the table and must be supplied.
pub fn read_comb_csv<R: Read>(r: R, patch: Patch) -> Result<WeightedComb> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let golden = headers.iter().any(|h| h == "a") && headers.iter().any(|h| h == "b");
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name}")))
    };
    let (ip, ire, iim) = (col("position")?, col("weight_re")?, col("weight_im")?);
    let dim = patch.dim();
    let mut weights = Vec::new();
    let mut ints = Vec::new();
    let mut gold = Vec::new();
    let mut reals = Vec::new();
    let mut all_int = true;
    for rec in rdr.records() {
        let rec = rec?;
        weights.push(Complex64::new(parse_f64(&rec[ire])?, parse_f64(&rec[iim])?));
        if golden {
            let a = rec[col("a")?].trim().parse().map_err(|_| Error::Parse("bad a".into()))?;
            let b = rec[col("b")?].trim().parse().map_err(|_| Error::Parse("bad b".into()))?;
            gold.push(GoldenInt::new(a, b));
        } else {
            let p = &rec[ip];
            match p.trim().parse::<i64>() {
                Ok(n) if dim == 1 => ints.push(n),
                _ => all_int = false,
            }
            for part in p.split(';') {
                reals.push(parse_f64(part)?);
            }
        }
    }
    let positions = if golden {
        Positions::Golden(gold)
    } else if all_int && dim == 1 {
        Positions::Integer(ints)
    } else {
        Positions::Real { dim, coords: reals }
    };
    WeightedComb::new(positions, weights, patch)
}

fn write_pairs<W: Write>(w: W, header: [&str; 2], rows: impl Iterator<Item = (String, f64)>) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for (k, v) in rows {
        out.write_record([k, fmt_f64(v)])?;
    }
    out.flush()?;
    Ok(())
}

/// `k,intensity`.
pub fn write_peaks_csv<W: Write>(w: W, peaks: &[Peak]) -> Result<()> {
    write_pairs(w, ["k", "intensity"], peaks.iter().map(|p| (join(&p.k), p.intensity)))
}

/// `k,density`.
pub fn write_density_csv<W: Write>(w: W, k: &[f64], density: &[f64]) -> Result<()> {
    write_pairs(w, ["k", "density"], k.iter().zip(density).map(|(k, d)| (fmt_f64(*k), *d)))
}

/// `k,F`.
pub fn write_distribution_csv<W: Write>(w: W, f: &DistributionFn) -> Result<()> {
    write_pairs(w, ["k", "F"], f.grid.iter().zip(&f.values).map(|(k, v)| (fmt_f64(*k), *v)))
}

/// `k,value` at the grid centres.
pub fn write_estimate_csv<W: Write>(w: W, e: &DiffractionEstimate) -> Result<()> {
    write_pairs(
        w,
        ["k", "value"],
        e.grid.centers().iter().zip(&e.values).map(|(k, v)| (fmt_f64(*k), *v)),
    )
}

/// A two-column numeric table: header names and rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: [String; 2],
    pub rows: Vec<(f64, f64)>,
}

/// Reads any of the two-column spectrum or estimate tables.
pub fn read_table<R: Read>(r: R) -> Result<Table> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 {
        return Err(Error::Parse(format!(
            "expected two columns, found {}",
            headers.len()
        )));
    }
    let columns = [headers[0].to_string(), headers[1].to_string()];
    let rows = rdr
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok((parse_f64(&rec[0])?, parse_f64(&rec[1])?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_fibonacci_model_set, gen_thue_morse, CpsSpec};

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.523_606_797_749_979, 0.0] {
            assert_eq!(parse_f64(&fmt_f64(v)).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn thue_morse_table() {
        let mut buf = Vec::new();
        write_comb_csv(&mut buf, &gen_thue_morse(2).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "position,weight_re,weight_im\n0,1.0,0.0\n1,-1.0,0.0\n2,-1.0,0.0\n3,1.0,0.0\n"
        );
    }

    #[test]
    fn golden_comb_round_trip() {
        let comb = gen_fibonacci_model_set(&CpsSpec::fibonacci(), (0.0, 50.0)).unwrap();
        let mut buf = Vec::new();
        write_comb_csv(&mut buf, &comb).unwrap();
        let back = read_comb_csv(buf.as_slice(), comb.patch().clone()).unwrap();
        assert_eq!(back, comb);
        let tm = gen_thue_morse(5).unwrap();
        let mut buf = Vec::new();
        write_comb_csv(&mut buf, &tm).unwrap();
        assert_eq!(read_comb_csv(buf.as_slice(), tm.patch().clone()).unwrap(), tm);
    }

    #[test]
    fn two_column_tables() {
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &[0.5, 1.0], &[1.0, 2.0]).unwrap();
        let t = read_table(buf.as_slice()).unwrap();
        assert_eq!(t.columns, ["k".to_string(), "density".to_string()]);
        assert_eq!(t.rows, vec![(0.5, 1.0), (1.0, 2.0)]);
        assert!(read_table("a,b,c\n1,2,3\n".as_bytes()).is_err());
        assert!(read_table("k,v\n1,x\n".as_bytes()).is_err());
    }
}
