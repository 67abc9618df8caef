//! CSV form of patches: `#` comment lines (metadata and `# region: lo=...; hi=...`),
//! then a header `x_1,…,x_d,re_weight,im_weight` and one row per point.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::RegionBox;

use super::patch::PointMeasurePatch;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ")
}

pub fn write_patch_csv<W: Write>(patch: &PointMeasurePatch, meta: &[String], out: W) -> Result<()> {
    write_patch_csv_with(patch, meta, &[], |_| Vec::new(), out)
}

/// As [`write_patch_csv`] with extra columns computed per point.
pub fn write_patch_csv_with<W: Write, F: Fn(usize) -> Vec<String>>(
    patch: &PointMeasurePatch,
    meta: &[String],
    extra_headers: &[&str],
    extra: F,
    mut out: W,
) -> Result<()> {
    for m in meta {
        writeln!(out, "# {m}")?;
    }
    let r = patch.region();
    writeln!(out, "# region: lo={}; hi={}", fmt_list(&r.lo), fmt_list(&r.hi))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=patch.dim()).map(|i| format!("x_{i}")).collect();
    header.push("re_weight".into());
    header.push("im_weight".into());
    header.extend(extra_headers.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for (i, p) in patch.points().iter().enumerate() {
        let mut row: Vec<String> = p.position.iter().map(|v| fmt_f64(*v)).collect();
        row.push(fmt_f64(p.weight.re));
        row.push(fmt_f64(p.weight.im));
        row.extend(extra(i));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Error::Shape(format!("bad number {t:?} in region line: {e}"))))
        .collect()
}

pub fn read_patch_csv<R: BufRead>(input: R) -> Result<PointMeasurePatch> {
    let mut region = None;
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# region:") {
            let mut lo = None;
            let mut hi = None;
            for part in rest.split(';') {
                let part = part.trim();
                if let Some(v) = part.strip_prefix("lo=") {
                    lo = Some(parse_list(v)?);
                } else if let Some(v) = part.strip_prefix("hi=") {
                    hi = Some(parse_list(v)?);
                }
            }
            match (lo, hi) {
                (Some(lo), Some(hi)) => region = Some(RegionBox::new(lo, hi)?),
                _ => return Err(Error::Shape("region line needs lo= and hi=".into())),
            }
        } else if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let region = region.ok_or_else(|| Error::Shape("patch file has no `# region:` line".into()))?;
    let d = region.dim();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.len() < d + 2 || headers.get(d) != Some("re_weight") || headers.get(d + 1) != Some("im_weight") {
        return Err(Error::Shape(format!("unexpected patch header {headers:?} for dimension {d}")));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let nums: Vec<f64> = (0..d + 2)
            .map(|i| {
                rec.get(i)
                    .unwrap_or("")
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Shape(format!("bad number in patch row {rec:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        points.push((nums[..d].to_vec(), Complex64::new(nums[d], nums[d + 1])));
    }
    PointMeasurePatch::new(region, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let region = RegionBox::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let p = PointMeasurePatch::new(
            region,
            vec![
                (vec![0.1, 0.2], Complex64::new(1.0 / 3.0, -0.5)),
                (vec![-1.0, 2.0], Complex64::new(2.0, 0.0)),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_patch_csv(&p, &["config: test".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# config: test\n# region:"));
        let q = read_patch_csv(&buf[..]).unwrap();
        assert_eq!(p, q);
    }
}
