//! CSV and JSON file formats.
//!
//! Point clouds: one row per point, `d` columns, no header. Response and
//! truth vectors: one value per row, no header. Fits: `index,f_hat` with a
//! header. Floats are written in shortest round-trip form, so reading a
//! written file gives back the same numbers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::points::PointCloud;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        Error::invalid(format!(
                            "{}: line {}: `{field}` is not a finite number",
                            path.display(),
                            line + 1
                        ))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!("{}: no rows", path.display())));
    }
    Ok(rows)
}

pub fn read_points_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let rows = read_rows(path)?;
    PointCloud::from_rows(&rows).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    read_rows(path)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [v] => Ok(*v),
            _ => Err(Error::invalid(format!(
                "{}: line {}: expected one column, found {}",
                path.display(),
                i + 1,
                row.len()
            ))),
        })
        .collect()
}

fn write_with(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

pub fn format_points_csv(points: &PointCloud) -> String {
    let mut s = String::new();
    for p in points.iter() {
        let line: Vec<String> = p.iter().map(f64::to_string).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn format_vector_csv(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

pub fn write_points_csv(path: impl AsRef<Path>, points: &PointCloud) -> Result<()> {
    write_with(path.as_ref(), |out| {
        out.write_all(format_points_csv(points).as_bytes())
    })
}

pub fn write_vector_csv(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    write_with(path.as_ref(), |out| {
        out.write_all(format_vector_csv(values).as_bytes())
    })
}

/// `index,f_hat` with 0-based indices.
pub fn write_fit_csv(path: impl AsRef<Path>, f_hat: &[f64]) -> Result<()> {
    write_with(path.as_ref(), |out| {
        writeln!(out, "index,f_hat")?;
        f_hat
            .iter()
            .enumerate()
            .try_for_each(|(i, v)| writeln!(out, "{i},{v}"))
    })
}

pub fn read_fit_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut values = Vec::new();
    for record in reader.deserialize::<(usize, f64)>() {
        let (i, v) = record.map_err(csv_err(path))?;
        if i != values.len() {
            return Err(Error::invalid(format!(
                "{}: index {i} out of order",
                path.display()
            )));
        }
        values.push(v);
    }
    Ok(values)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    write_with(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
        writeln!(out)
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_points_and_vectors() {
        let dir = tempfile::tempdir().unwrap();
        let pts = PointCloud::from_rows(&[vec![0.1, 1.0 / 3.0], vec![-2.5, 1e-300]]).unwrap();
        let p = dir.path().join("points.csv");
        write_points_csv(&p, &pts).unwrap();
        assert_eq!(read_points_csv(&p).unwrap(), pts);

        let v = vec![0.1, -7.0, std::f64::consts::PI];
        let q = dir.path().join("y.csv");
        write_vector_csv(&q, &v).unwrap();
        assert_eq!(read_vector_csv(&q).unwrap(), v);

        let f = dir.path().join("fit.csv");
        write_fit_csv(&f, &v).unwrap();
        assert!(std::fs::read_to_string(&f)
            .unwrap()
            .starts_with("index,f_hat\n0,0.1\n"));
        assert_eq!(read_fit_csv(&f).unwrap(), v);
    }

    #[test]
    fn rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "1,2\n3\n").unwrap();
        assert!(read_points_csv(&p).is_err());
        std::fs::write(&p, "1\nnan\n").unwrap();
        assert!(read_vector_csv(&p).is_err());
        std::fs::write(&p, "1,2\n").unwrap();
        assert!(read_vector_csv(&p).is_err());
        std::fs::write(&p, "").unwrap();
        assert!(read_vector_csv(&p).is_err());
        assert!(matches!(
            read_vector_csv(dir.path().join("missing.csv")),
            Err(Error::Csv { .. })
        ));
    }
}
