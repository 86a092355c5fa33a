//! CSV and JSON ingestion and result files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filaments::{connectivity, GalaxyCatalog, MarkedConfiguration, Window};
use crate::heavytail::{CoverageMap, PerturbationSample};
use crate::orbit::Observation;

/// Padding of the catalog bounding box when no window is given.
pub const WINDOW_PAD: f64 = 0.01;

/// Perihelion distance assigned to perturbation cells when none is given, A.U.
pub const DEFAULT_PERIHELION_DISTANCE: f64 = 5.1;

/// Numeric table read from a headed CSV: the requested columns of every
/// row, with 1-based file line numbers.
struct Table {
    rows: Vec<(usize, Vec<f64>)>,
}

fn read_table<R: Read>(reader: R, name: &str, columns: &[&str]) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: name.to_string(),
        line,
        message,
    };
    let headers = rdr.headers()?.clone();
    let index: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers.iter().position(|h| h == *c).ok_or_else(|| {
                parse_err(
                    1,
                    format!(
                        "missing column `{c}` (expected header {})",
                        columns.join(",")
                    ),
                )
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut values = Vec::with_capacity(columns.len());
        for (&k, col) in index.iter().zip(columns) {
            let field = record.get(k).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| {
                parse_err(line, format!("column `{col}`: `{field}` is not a number"))
            })?;
            if !v.is_finite() {
                return Err(parse_err(
                    line,
                    format!("column `{col}`: `{field}` is not finite"),
                ));
            }
            values.push(v);
        }
        rows.push((line, values));
    }
    Ok(Table { rows })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Galaxy catalog from CSV with header `x,y,z`. Without an explicit window
/// the bounding box padded by [`WINDOW_PAD`] of each side is used.
pub fn parse_catalog_from<R: Read>(
    reader: R,
    name: &str,
    window: Option<Window>,
) -> Result<GalaxyCatalog> {
    let table = read_table(reader, name, &["x", "y", "z"])?;
    if table.rows.is_empty() {
        return Err(Error::Parse {
            path: name.to_string(),
            line: 1,
            message: "catalog has no rows".into(),
        });
    }
    let positions: Vec<[f64; 3]> = table.rows.iter().map(|(_, v)| [v[0], v[1], v[2]]).collect();
    let window = match window {
        Some(w) => {
            w.validate()?;
            if let Some((line, _)) = table
                .rows
                .iter()
                .find(|(_, v)| !w.contains([v[0], v[1], v[2]]))
            {
                return Err(Error::Parse {
                    path: name.to_string(),
                    line: *line,
                    message: "point lies outside the window".into(),
                });
            }
            w
        }
        None => Window::bounding(&positions, WINDOW_PAD)?,
    };
    GalaxyCatalog::new(positions, window)
}

pub fn parse_catalog(path: &Path, window: Option<Window>) -> Result<GalaxyCatalog> {
    parse_catalog_from(open(path)?, &path.display().to_string(), window)
}

/// Observations from CSV with header `epoch_rjd,dx_km,dy_km,sigma_km`.
pub fn parse_observations_from<R: Read>(reader: R, name: &str) -> Result<Vec<Observation>> {
    let table = read_table(reader, name, &["epoch_rjd", "dx_km", "dy_km", "sigma_km"])?;
    let mut out: Vec<Observation> = Vec::with_capacity(table.rows.len());
    for (line, v) in &table.rows {
        let err = |message: &str| Error::Parse {
            path: name.to_string(),
            line: *line,
            message: message.into(),
        };
        if !(v[3] > 0.0) {
            return Err(err("sigma_km must be positive"));
        }
        if out.last().is_some_and(|prev| !(v[0] > prev.epoch)) {
            return Err(err("epochs must be strictly increasing"));
        }
        out.push(Observation {
            epoch: v[0],
            delta_x: v[1],
            delta_y: v[2],
            sigma: v[3],
        });
    }
    if out.is_empty() {
        return Err(Error::Parse {
            path: name.to_string(),
            line: 1,
            message: "no observations".into(),
        });
    }
    Ok(out)
}

pub fn parse_observations(path: &Path) -> Result<Vec<Observation>> {
    parse_observations_from(open(path)?, &path.display().to_string())
}

/// Perturbation cells from CSV with header `i_deg,w_deg,value`, one cell per
/// distinct angle pair, sorted by inclination then argument.
pub fn parse_perturbations_from<R: Read>(
    reader: R,
    name: &str,
    perihelion_distance: f64,
) -> Result<Vec<PerturbationSample>> {
    let table = read_table(reader, name, &["i_deg", "w_deg", "value"])?;
    if table.rows.is_empty() {
        return Err(Error::Parse {
            path: name.to_string(),
            line: 1,
            message: "no perturbation rows".into(),
        });
    }
    // keyed by the order-preserving bit pattern of the angles
    let key = |v: f64| {
        let b = v.to_bits() as i64;
        b ^ (((b >> 63) as u64) >> 1) as i64
    };
    let mut cells: BTreeMap<(i64, i64), PerturbationSample> = BTreeMap::new();
    for (_, v) in &table.rows {
        cells
            .entry((key(v[0]), key(v[1])))
            .or_insert_with(|| PerturbationSample {
                inclination: v[0],
                perihelion_argument: v[1],
                values: Vec::new(),
                perihelion_distance,
            })
            .values
            .push(v[2]);
    }
    Ok(cells.into_values().collect())
}

pub fn parse_perturbations(
    path: &Path,
    perihelion_distance: f64,
) -> Result<Vec<PerturbationSample>> {
    parse_perturbations_from(
        open(path)?,
        &path.display().to_string(),
        perihelion_distance,
    )
}

/// The `value` column of a headed CSV.
pub fn parse_values_from<R: Read>(reader: R, name: &str) -> Result<Vec<f64>> {
    let table = read_table(reader, name, &["value"])?;
    Ok(table.rows.into_iter().map(|(_, v)| v[0]).collect())
}

pub fn parse_values(path: &Path) -> Result<Vec<f64>> {
    parse_values_from(open(path)?, &path.display().to_string())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let mut s = String::new();
    open(path)?.read_to_string(&mut s)?;
    serde_json::from_str(&s).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One row per segment: center, unit axis, half-length, radius and number
/// of connected extremities.
pub fn write_segments_csv<W: Write>(
    writer: W,
    config: &MarkedConfiguration,
    connection_distance: f64,
    alignment: f64,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "x",
        "y",
        "z",
        "axis_x",
        "axis_y",
        "axis_z",
        "half_length",
        "radius",
        "connected_ends",
    ])?;
    let counts = connectivity(config, connection_distance, alignment);
    for (s, c) in config.segments.iter().zip(counts) {
        let d = s.direction();
        let mut row: Vec<String> = s.center.iter().chain(&d).map(|v| v.to_string()).collect();
        row.push(s.half_length.to_string());
        row.push(s.radius.to_string());
        row.push(c.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `i_deg,w_deg,coverage,regime`; failed cells have an empty coverage and
/// regime `missing`.
pub fn write_map_csv<W: Write>(writer: W, map: &CoverageMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i_deg", "w_deg", "coverage", "regime"])?;
    for c in &map.cells {
        w.write_record([
            c.inclination.to_string(),
            c.perihelion_argument.to_string(),
            c.coverage.map_or(String::new(), |f| f.to_string()),
            c.regime.map_or("missing", |r| r.as_str()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rows_and_window() {
        let c =
            parse_catalog_from("x,y,z\n0,0,0\n1,2,3\n2,4,6\n".as_bytes(), "t.csv", None).unwrap();
        assert_eq!(c.len(), 3);
        assert!((c.window.min[0] + 0.02).abs() < 1e-12 && (c.window.max[2] - 6.06).abs() < 1e-12);
    }

    #[test]
    fn catalog_errors_name_the_line() {
        let e =
            parse_catalog_from("x,y,z\n0,0,0\n1,NaN,3\n".as_bytes(), "t.csv", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_catalog_from("x,y,z\n0,zero,0\n".as_bytes(), "t.csv", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_catalog_from("x,y,z\n".as_bytes(), "t.csv", None).unwrap_err();
        assert!(e.to_string().contains("no rows"));
        let w = Window::new([0.0; 3], [1.0; 3]).unwrap();
        let e = parse_catalog_from("x,y,z\n0.5,0.5,0.5\n2,0,0\n".as_bytes(), "t.csv", Some(w))
            .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn observation_checks() {
        let head = "epoch_rjd,dx_km,dy_km,sigma_km\n";
        let rows: String = (0..20).map(|k| format!("{},1,2,5\n", 100 + k)).collect();
        assert_eq!(
            parse_observations_from(format!("{head}{rows}").as_bytes(), "o")
                .unwrap()
                .len(),
            20
        );
        let dup = format!("{head}100,1,2,5\n100,1,2,5\n");
        let e = parse_observations_from(dup.as_bytes(), "o").unwrap_err();
        assert!(e.to_string().contains("increasing") && matches!(e, Error::Parse { line: 3, .. }));
        let zero = format!("{head}100,1,2,0\n");
        assert!(parse_observations_from(zero.as_bytes(), "o")
            .unwrap_err()
            .to_string()
            .contains("sigma"));
    }

    #[test]
    fn perturbation_cells_are_grouped() {
        let csv = "i_deg,w_deg,value\n10,20,1\n5,20,2\n10,20,3\n10,0,4\n";
        let cells = parse_perturbations_from(csv.as_bytes(), "p", 5.1).unwrap();
        let keys: Vec<(f64, f64, usize)> = cells
            .iter()
            .map(|c| (c.inclination, c.perihelion_argument, c.values.len()))
            .collect();
        assert_eq!(keys, vec![(5.0, 20.0, 1), (10.0, 0.0, 1), (10.0, 20.0, 2)]);
        assert_eq!(cells[2].values, vec![1.0, 3.0]);
    }

    #[test]
    fn map_csv_layout() {
        let map = CoverageMap {
            cells: vec![crate::heavytail::CoverageCell {
                inclination: 10.0,
                perihelion_argument: 20.0,
                n_values: 0,
                coverage: None,
                regime: None,
                tail_index: None,
                mixture: None,
                error: Some("x".into()),
            }],
        };
        let mut buf = Vec::new();
        write_map_csv(&mut buf, &map).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "i_deg,w_deg,coverage,regime\n10,20,,missing\n"
        );
    }
}
