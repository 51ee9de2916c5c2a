//! File formats: JSON for structured results, CSV for grids and series.
//!
//! All floats go through the shortest round-trip formatting, so writing and
//! re-reading reproduces values exactly and reruns are byte-identical.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::jacobi::{JacobiMatrix, SpectralData};
use crate::krein::ResponseSamples;

/// `{"a": [..], "b": [..]}` with |a| = |b| − 1 — the canonical matrix input.
pub fn read_matrix_json(path: &Path) -> Result<JacobiMatrix> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_matrix_json(path: &Path, matrix: &JacobiMatrix) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(matrix)?)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectraFile {
    pub lambdas: Vec<f64>,
    pub rhos: Vec<f64>,
}

pub fn write_spectra_json(path: &Path, sd: &SpectralData) -> Result<()> {
    let file = SpectraFile {
        lambdas: sd.lambdas().to_vec(),
        rhos: sd.rhos().to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_spectra_json(path: &Path) -> Result<SpectraFile> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Sampled control as CSV with header `t,re,im`.
pub fn write_control_csv(path: &Path, grid: TimeGrid, values: &[Complex64]) -> Result<()> {
    assert_eq!(values.len(), grid.len());
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "re", "im"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record(&[
            grid.point(i).to_string(),
            v.re.to_string(),
            v.im.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_control_csv(path: &Path) -> Result<(TimeGrid, Vec<Complex64>)> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "re", "im"] {
        return Err(Error::MalformedFile {
            reason: format!("expected header t,re,im in {}", path.display()),
        });
    }
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::MalformedFile {
                    reason: format!("bad numeric field in {}", path.display()),
                })
        };
        ts.push(parse(0)?);
        values.push(Complex64::new(parse(1)?, parse(2)?));
    }
    let grid = validate_uniform_grid(&ts, path)?;
    Ok((grid, values))
}

fn validate_uniform_grid(ts: &[f64], path: &Path) -> Result<TimeGrid> {
    if ts.len() < 2 {
        return Err(Error::GridTooCoarse { m: ts.len() });
    }
    let t_final = *ts.last().unwrap();
    let grid = TimeGrid::new(t_final, ts.len())?;
    for (i, &t) in ts.iter().enumerate() {
        if (t - grid.point(i)).abs() > 1e-9 * t_final.max(1.0) {
            return Err(Error::MalformedFile {
                reason: format!("non-uniform time grid at row {i} of {}", path.display()),
            });
        }
    }
    Ok(grid)
}

/// Response samples as CSV with header `t,r`, covering [0, 2T].
pub fn write_response_samples_csv(path: &Path, samples: &ResponseSamples) -> Result<()> {
    let len = samples.values().len();
    let h = 2.0 * samples.t_final() / (len - 1) as f64;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "r"])?;
    for (i, v) in samples.values().iter().enumerate() {
        w.write_record(&[(i as f64 * h).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_response_samples_csv(path: &Path) -> Result<ResponseSamples> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "r"] {
        return Err(Error::MalformedFile {
            reason: format!("expected header t,r in {}", path.display()),
        });
    }
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::MalformedFile {
                    reason: format!("bad numeric field in {}", path.display()),
                })
        };
        ts.push(parse(0)?);
        values.push(parse(1)?);
    }
    if ts.len() < 9 || ts.len() % 2 == 0 {
        return Err(Error::BadResponseGrid {
            reason: format!("{} samples in {}", ts.len(), path.display()),
        });
    }
    validate_uniform_grid(&ts, path)?;
    let t_final = 0.5 * ts.last().unwrap();
    ResponseSamples::new(t_final, values)
}

/// Trajectory CSV `t,re_u1,im_u1,…,re_uN,im_uN`.
pub fn write_trajectory_csv(path: &Path, grid: TimeGrid, states: &[Vec<Complex64>]) -> Result<()> {
    assert_eq!(states.len(), grid.len());
    let n = states[0].len();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("re_u{k}"));
        header.push(format!("im_u{k}"));
    }
    w.write_record(&header)?;
    for (i, state) in states.iter().enumerate() {
        let mut row = vec![grid.point(i).to_string()];
        for u in state {
            row.push(u.re.to_string());
            row.push(u.im.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// φ_m sampled on a λ grid: `lambda,phi_1..phi_N`.
pub fn write_polynomials_csv(
    path: &Path,
    matrix: &JacobiMatrix,
    lambda_grid: &[f64],
) -> Result<()> {
    let n = matrix.size();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["lambda".to_string()];
    for m in 1..=n {
        header.push(format!("phi_{m}"));
    }
    w.write_record(&header)?;
    for &l in lambda_grid {
        let phi = matrix.eval_polynomials(l);
        let mut row = vec![l.to_string()];
        row.extend(phi[..n].iter().map(|p| p.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Structure-function samples on the real axis: `lambda,re,im,abs2`.
pub fn write_e_samples_csv(
    path: &Path,
    lambda_grid: &[f64],
    values: &[Complex64],
) -> Result<()> {
    assert_eq!(lambda_grid.len(), values.len());
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["lambda", "re", "im", "abs2"])?;
    for (&l, v) in lambda_grid.iter().zip(values) {
        w.write_record(&[
            l.to_string(),
            v.re.to_string(),
            v.im.to_string(),
            v.norm_sqr().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Hermite–Biehler margin grid over the upper half plane: `x,y,margin`.
pub fn write_hb_margin_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "margin"])?;
    for (x, y, margin) in rows {
        w.write_record(&[x.to_string(), y.to_string(), margin.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Gram matrix dump for inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramFile {
    pub t_final: f64,
    pub matrix: Vec<Vec<f64>>,
}

pub fn write_gram_json(path: &Path, gram: &crate::connecting::GramMatrix) -> Result<()> {
    let n = gram.size();
    let file = GramFile {
        t_final: gram.t_final(),
        matrix: (0..n)
            .map(|j| (0..n).map(|k| gram.entry(j, k)).collect())
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use tempfile::tempdir;

    #[test]
    fn matrix_json_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("matrix.json");
        let j = JacobiMatrix::new(vec![1.5, 0.25], vec![0.1, -2.0, 3.75]).unwrap();
        write_matrix_json(&path, &j).unwrap();
        let back = read_matrix_json(&path).unwrap();
        assert_eq!(j, back);
        // Schema is literal: {"a": [...], "b": [...]}.
        let raw: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(raw.get("a").is_some() && raw.get("b").is_some());
    }

    #[test]
    fn matrix_json_rejects_bad_shapes() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, r#"{"a": [1.0], "b": [0.0]}"#).unwrap();
        assert!(read_matrix_json(&path).is_err());
        fs::write(&path, r#"{"a": [-1.0], "b": [0.0, 0.0]}"#).unwrap();
        assert!(read_matrix_json(&path).is_err());
    }

    #[test]
    fn control_csv_roundtrip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("control.csv");
        let grid = TimeGrid::new(1.0, 11).unwrap();
        let values: Vec<Complex64> = (0..11)
            .map(|i| Complex64::new(0.1 * i as f64 - 0.37, (i as f64).sin()))
            .collect();
        write_control_csv(&path, grid, &values).unwrap();
        let (grid2, values2) = read_control_csv(&path).unwrap();
        assert_eq!(grid, grid2);
        for (a, b) in values.iter().zip(&values2) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn response_csv_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let sd = JacobiMatrix::new(vec![1.0], vec![0.0, 0.0])
            .unwrap()
            .spectral_decomposition()
            .unwrap();
        let samples = ResponseSamples::from_spectral_data(&sd, 1.0, 101).unwrap();
        write_response_samples_csv(&path, &samples).unwrap();
        let back = read_response_samples_csv(&path).unwrap();
        assert_abs_diff_eq!(back.t_final(), 1.0, epsilon = 1e-15);
        for (a, b) in samples.values().iter().zip(back.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn response_csv_rejects_even_sample_count() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut text = String::from("t,r\n");
        for i in 0..10 {
            text.push_str(&format!("{},{}\n", i as f64 * 0.1, 0.0));
        }
        fs::write(&path, text).unwrap();
        assert!(read_response_samples_csv(&path).is_err());
    }

    #[test]
    fn rejects_nonuniform_grid() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("control.csv");
        fs::write(&path, "t,re,im\n0.0,1.0,0.0\n0.4,1.0,0.0\n1.0,1.0,0.0\n").unwrap();
        assert!(matches!(
            read_control_csv(&path),
            Err(Error::MalformedFile { .. })
        ));
    }
}
