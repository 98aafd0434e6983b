use super::SweepRow;
use crate::error::{Error, Result};
use std::io::{Read, Write};

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows of already-formatted fields.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::LengthMismatch { left: header.len(), right: r.len() });
        }
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_numeric<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_table(w, header, rows.iter().map(|r| r.iter().map(|&x| format_f64(x)).collect()))
}

/// Header and numeric rows.
pub fn read_numeric<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd.headers()?.iter().map(str::to_string).collect();
    let mut rows = vec![];
    for rec in rd.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Csv(format!("'{f}' is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub const SWEEP_HEADER: [&str; 4] = ["N", "t_opt", "bound_times_T", "boundary_flag"];

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    write_table(
        w,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![r.n.to_string(), format_f64(r.t_opt), format_f64(r.bound_times_t), u8::from(r.boundary).to_string()]
        }),
    )
}

pub fn read_sweep<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::Csv(format!("unexpected sweep header {header:?}")));
    }
    let bad = |f: &str| Error::Csv(format!("bad field '{f}'"));
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let n = rec[0].parse().map_err(|_| bad(&rec[0]))?;
            let t_opt = rec[1].parse().map_err(|_| bad(&rec[1]))?;
            let bound_times_t = rec[2].parse().map_err(|_| bad(&rec[2]))?;
            let boundary = match &rec[3] {
                "0" => false,
                "1" => true,
                f => return Err(bad(f)),
            };
            Ok(SweepRow { n, t_opt, bound_times_t, boundary })
        })
        .collect()
}
