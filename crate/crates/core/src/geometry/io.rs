//! Points as CSV, range families as JSON.

use std::io::{Read, Write};

use super::ranges::GeometricRange;
use super::PointSet;
use crate::error::{Error, Result};

/// Write one point per row with a `x0,x1,...` header.
pub fn write_points_csv<W: Write>(points: &PointSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Data(format!("writing points: {e}"));
    w.write_record((0..points.dim()).map(|i| format!("x{i}")))
        .map_err(io)?;
    for p in points.iter() {
        w.write_record(p.iter().map(|c| c.to_string())).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Data(format!("writing points: {e}")))
}

/// Read points written by [`write_points_csv`]. A header row is optional;
/// every data row must have the same number of numeric fields.
pub fn read_points_csv<R: Read>(input: R) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut dim = None;
    let mut coords = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("points line {}: {e}", row + 1)))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if row == 0 => continue,
            Err(e) => {
                let field = record
                    .iter()
                    .position(|f| f.parse::<f64>().is_err())
                    .unwrap_or(0);
                return Err(Error::Data(format!(
                    "points line {}, field {}: {e}",
                    row + 1,
                    field + 1
                )));
            }
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: values.len(),
                })
            }
            _ => {}
        }
        coords.extend(values);
    }
    match dim {
        Some(d) => PointSet::new(d, coords),
        None => Err(Error::Data("no points found".into())),
    }
}

pub fn write_ranges_json<W: Write>(ranges: &[GeometricRange], out: W) -> Result<()> {
    serde_json::to_writer(out, ranges).map_err(|e| Error::Data(format!("writing ranges: {e}")))
}

pub fn read_ranges_json<R: Read>(input: R) -> Result<Vec<GeometricRange>> {
    let ranges: Vec<GeometricRange> =
        serde_json::from_reader(input).map_err(|e| Error::Data(format!("ranges: {e}")))?;
    for (i, r) in ranges.iter().enumerate() {
        r.validate()
            .map_err(|e| Error::Data(format!("range {i}: {e}")))?;
    }
    Ok(ranges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, HalfSpace};

    #[test]
    fn points_round_trip() {
        let p = PointSet::from_rows(2, &[vec![0.25, -1.0], vec![3.0, 1e-9]]).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&p, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("x0,x1\n"));
        assert_eq!(read_points_csv(&buf[..]).unwrap(), p);
        assert_eq!(read_points_csv("1,2\n3,4\n".as_bytes()).unwrap().len(), 2);
    }

    #[test]
    fn points_errors_name_the_line() {
        let err = read_points_csv("x,y\n1,2\n3,oops\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3, field 2"), "{err}");
        assert!(matches!(
            read_points_csv("1,2\n3\n".as_bytes()),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn ranges_round_trip() {
        let ranges = vec![
            GeometricRange::HalfSpace(HalfSpace::new(vec![1.0, 1.0], 2.0).unwrap()),
            GeometricRange::Ball(Ball::new(vec![0.0, 1.0], 0.5).unwrap()),
        ];
        let mut buf = Vec::new();
        write_ranges_json(&ranges, &mut buf).unwrap();
        assert_eq!(read_ranges_json(&buf[..]).unwrap(), ranges);
        assert!(read_ranges_json(r#"[{"type":"ball","center":[0],"radius":-1}]"#.as_bytes()).is_err());
    }
}
