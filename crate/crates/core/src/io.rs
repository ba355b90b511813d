//! Pencil JSON and trajectory CSV formats.

use crate::numerics::{CMatrix, TolerancePolicy, C64};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Row-major real/imaginary parts of `E` and `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(rename = "E_re")]
    pub e_re: Vec<f64>,
    #[serde(rename = "E_im")]
    pub e_im: Vec<f64>,
    #[serde(rename = "A_re")]
    pub a_re: Vec<f64>,
    #[serde(rename = "A_im")]
    pub a_im: Vec<f64>,
}

fn split(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let mut re = Vec::with_capacity(m.len());
    let mut im = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    (re, im)
}

fn join(rows: usize, cols: usize, re: &[f64], im: &[f64], name: &str) -> Result<CMatrix> {
    if re.len() != rows * cols || im.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{name}: expected {} entries per part, got {} and {}",
            rows * cols,
            re.len(),
            im.len()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(re[i * cols + j], im[i * cols + j])))
}

impl PencilJson {
    pub fn from_matrices(e: &CMatrix, a: &CMatrix) -> Self {
        let (e_re, e_im) = split(e);
        let (a_re, a_im) = split(a);
        Self { rows: e.nrows(), cols: e.ncols(), e_re, e_im, a_re, a_im }
    }

    pub fn from_pencil(p: &MatrixPencil) -> Self {
        Self::from_matrices(&p.e, &p.a)
    }

    pub fn matrices(&self) -> Result<(CMatrix, CMatrix)> {
        let e = join(self.rows, self.cols, &self.e_re, &self.e_im, "E")?;
        let a = join(self.rows, self.cols, &self.a_re, &self.a_im, "A")?;
        Ok((e, a))
    }

    pub fn to_pencil(&self, pol: TolerancePolicy) -> Result<MatrixPencil> {
        let (e, a) = self.matrices()?;
        MatrixPencil::with_policy(e, a, pol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric arrays serialize") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Trajectory CSV: header `t, re_x1, im_x1, …` and one row per grid point.
pub fn trajectory_csv(times: &[f64], states: &CMatrix) -> String {
    let n = states.nrows();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(", re_x{i}, im_x{i}"));
    }
    out.push('\n');
    for (j, t) in times.iter().enumerate() {
        out.push_str(&format!("{t:?}"));
        for i in 0..n {
            let z = states[(i, j)];
            out.push_str(&format!(", {:?}, {:?}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

/// Parses the format written by [`trajectory_csv`].
pub fn parse_trajectory_csv(s: &str) -> Result<(Vec<f64>, CMatrix)> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidInput("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") || cols.len() % 2 != 1 {
        return Err(Error::InvalidInput("CSV header must be 't, re_x1, im_x1, ...'".into()));
    }
    let n = (cols.len() - 1) / 2;
    let mut times = vec![];
    let mut data: Vec<C64> = vec![];
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad CSV number: {e}")))?;
        if vals.len() != cols.len() {
            return Err(Error::InvalidInput("ragged CSV row".into()));
        }
        times.push(vals[0]);
        for i in 0..n {
            data.push(C64::new(vals[1 + 2 * i], vals[2 + 2 * i]));
        }
    }
    let m = times.len();
    Ok((times, CMatrix::from_fn(n, m, |i, j| data[j * n + i])))
}
