//! Matrix JSON and CSV encoding.

use std::fs;
use std::path::Path;

use pseudoherm_core::{ComplexMatrix, C64};
use serde_json::{json, Value};

use crate::error::CliError;

/// 17 significant digits, which round-trips every finite double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::InvalidArgument(format!("csv encoding: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.dim())
        .map(|i| Value::Array(m.row(i).iter().map(|&z| complex_json(z)).collect()))
        .collect();
    json!({ "dim": m.dim(), "entries": rows })
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn write_matrix_file(path: &Path, m: &ComplexMatrix) -> Result<(), CliError> {
    fs::write(path, to_json_string(&matrix_json(m))).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_matrix_file(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_str(&text, path)
}

fn field_error(path: &Path, text: &str, field: &str, message: &str) -> CliError {
    // Point at the first line mentioning the field, falling back to line 1.
    let key = field.split('[').next().unwrap_or(field);
    let line = text
        .lines()
        .position(|l| l.contains(&format!("\"{key}\"")))
        .map_or(1, |i| i + 1);
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column: 1,
        message: format!("{field}: {message}"),
    }
}

pub fn parse_matrix_str(text: &str, path: &Path) -> Result<ComplexMatrix, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let dim = match value.get("dim") {
        Some(Value::Number(n)) => n
            .as_u64()
            .filter(|&d| d > 0)
            .ok_or_else(|| field_error(path, text, "dim", "expected a positive integer"))?
            as usize,
        Some(_) => {
            return Err(field_error(
                path,
                text,
                "dim",
                "expected a positive integer",
            ))
        }
        None => return Err(field_error(path, text, "dim", "missing")),
    };
    let rows = match value.get("entries") {
        Some(Value::Array(rows)) => rows,
        Some(_) => {
            return Err(field_error(
                path,
                text,
                "entries",
                "expected an array of rows",
            ))
        }
        None => return Err(field_error(path, text, "entries", "missing")),
    };
    if rows.len() != dim {
        return Err(CliError::Dimension {
            path: path.to_path_buf(),
            message: format!("dim is {dim} but entries has {} rows", rows.len()),
        });
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| {
            field_error(path, text, &format!("entries[{i}]"), "expected an array")
        })?;
        if row.len() != dim {
            return Err(CliError::Dimension {
                path: path.to_path_buf(),
                message: format!("row {i} has {} entries, expected {dim}", row.len()),
            });
        }
        for (j, z) in row.iter().enumerate() {
            let field = format!("entries[{i}][{j}]");
            let pair = z
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| field_error(path, text, &field, "expected [re, im]"))?;
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) if re.is_finite() && im.is_finite() => {
                    data.push(C64::new(re, im))
                }
                _ => {
                    return Err(field_error(
                        path,
                        text,
                        &field,
                        "expected two finite numbers",
                    ))
                }
            }
        }
    }
    ComplexMatrix::new(dim, data).map_err(|e| CliError::Dimension {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parses "re,im" (imaginary part optional).
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::InvalidArgument(format!("bad complex number '{s}'")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(CliError::InvalidArgument(format!(
            "bad complex number '{s}'"
        ))),
    }
}

/// Parses "re,im;re,im;...".
pub fn parse_vector(s: &str) -> Result<Vec<C64>, CliError> {
    s.split(';').map(parse_complex).collect()
}

/// Parses a comma-separated list of ±1.
pub fn parse_signs(s: &str) -> Result<Vec<i8>, CliError> {
    s.split(',')
        .map(|p| match p.trim() {
            "1" | "+1" | "+" => Ok(1),
            "-1" | "-" => Ok(-1),
            other => Err(CliError::InvalidArgument(format!(
                "sign '{other}' is not ±1"
            ))),
        })
        .collect()
}
