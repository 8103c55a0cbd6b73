//! Dense weighted least squares for small design matrices.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Weights below this are treated as exactly zero.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Smallest acceptable reciprocal 1-norm condition number of the triangular
/// factor.
const MIN_RCOND: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("rows have differing lengths"));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(invalid("matrix dimensions do not conform"));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `XᵀD_w X` formed explicitly.
    pub fn weighted_gram(&self, weights: &[T]) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for (i, &w) in weights.iter().enumerate() {
            let row = self.row(i);
            for a in 0..p {
                let wa = w * row[a];
                for b in a..p {
                    g[(a, b)] = g[(a, b)] + wa * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Design matrix and response of a linear regression `y = Xβ + ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<T>,
    column_names: Vec<String>,
    has_intercept: bool,
}

impl<T: Real> Dataset<T> {
    pub fn new(x: Matrix<T>, y: Vec<T>, column_names: Vec<String>, has_intercept: bool) -> Result<Self> {
        let (n, p) = (x.rows(), x.cols());
        if n == 0 || p == 0 {
            return Err(invalid("dataset needs at least one row and one column"));
        }
        if y.len() != n {
            return Err(invalid(format!("response has {} entries but design has {n} rows", y.len())));
        }
        if column_names.len() != p {
            return Err(invalid(format!("{} column names for {p} columns", column_names.len())));
        }
        if let Some(pos) = x.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite covariate in row {}", pos / p)));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite response in row {i}")));
        }
        if has_intercept && (0..n).any(|i| x[(i, 0)] != T::one()) {
            return Err(invalid("intercept model requires an all-ones first column"));
        }
        Ok(Self { x, y, column_names, has_intercept })
    }

    /// Builds a design with a leading intercept column from covariate columns.
    pub fn with_intercept(covariates: &[(&str, Vec<T>)], y: Vec<T>) -> Result<Self> {
        let n = y.len();
        let p = covariates.len() + 1;
        let mut x = Matrix::zeros(n, p);
        for i in 0..n {
            x[(i, 0)] = T::one();
        }
        let mut names = vec!["(intercept)".to_string()];
        for (j, (name, col)) in covariates.iter().enumerate() {
            if col.len() != n {
                return Err(invalid(format!("covariate {name} has {} rows, expected {n}", col.len())));
            }
            for (i, &v) in col.iter().enumerate() {
                x[(i, j + 1)] = v;
            }
            names.push((*name).to_string());
        }
        Self::new(x, y, names, true)
    }

    /// Intercept-only (location-scale) model.
    pub fn location(y: Vec<T>) -> Result<Self> {
        Self::with_intercept(&[], y)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    /// Overwrites row `i` of the design and response.
    pub(crate) fn replace_row(&mut self, i: usize, x_row: &[T], y: T) {
        self.x.row_mut(i).copy_from_slice(x_row);
        self.y[i] = y;
    }

    pub fn fitted(&self, beta: &[T]) -> Vec<T> {
        self.x.mul_vec(beta)
    }

    pub fn residuals(&self, beta: &[T]) -> Vec<T> {
        (0..self.n()).map(|i| self.y[i] - dot(self.x.row(i), beta)).collect()
    }

    /// Maps every response through `y ↦ a·y + x·c`.
    pub fn transform_response(&self, a: T, c: &[T]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n() {
            out.y[i] = a * self.y[i] + dot(self.x.row(i), c);
        }
        out
    }
}

/// Output of a weighted least squares solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WlsOutput<T> {
    pub beta: Vec<T>,
    /// `(XᵀD_w X)⁻¹`
    pub xtwx_inverse: Matrix<T>,
    pub weighted_residual_ss: T,
    pub weight_sum: T,
}

/// `argmin_β Σ wᵢ(yᵢ − xᵢᵀβ)²` by Householder QR of the √w-scaled rows.
pub fn wls_solve<T: Real>(data: &Dataset<T>, weights: &[T]) -> Result<WlsOutput<T>> {
    let (n, p) = (data.n(), data.p());
    if weights.len() != n {
        return Err(invalid(format!("{} weights for {n} observations", weights.len())));
    }
    let floor = T::lit(WEIGHT_FLOOR);
    let mut w = Vec::with_capacity(n);
    for &wi in weights {
        if !(wi >= T::zero()) || !wi.is_finite() {
            return Err(invalid(format!("weights must be finite and nonnegative, got {wi}")));
        }
        w.push(if wi < floor { T::zero() } else { wi });
    }
    let weight_sum = w.iter().fold(T::zero(), |a, &b| a + b);
    if !(weight_sum > T::lit(p as f64)) {
        return Err(Error::InsufficientEffectiveSample { weight_sum: weight_sum.as_f64(), p });
    }

    // Column-major working copy of √w·X, plus √w·y.
    let mut a = vec![T::zero(); n * p];
    let mut b = vec![T::zero(); n];
    for i in 0..n {
        let s = w[i].sqrt();
        let row = data.x.row(i);
        for j in 0..p {
            a[j * n + i] = s * row[j];
        }
        b[i] = s * data.y[i];
    }

    let mut r = Matrix::zeros(p, p);
    for k in 0..p {
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let col = &mut head[k * n..];
        let norm = col[k..].iter().fold(T::zero(), |acc, &v| acc.hypot(v));
        if norm == T::zero() {
            r[(k, k)] = T::zero();
            for j in (k + 1)..p {
                r[(k, j)] = tail[(j - k - 1) * n + k];
            }
            continue;
        }
        let alpha = if col[k] > T::zero() { -norm } else { norm };
        col[k] = col[k] - alpha;
        let vnorm2 = col[k..].iter().fold(T::zero(), |acc, &v| acc + v * v);
        let reflect = |target: &mut [T]| {
            let s = col[k..].iter().zip(&target[k..]).fold(T::zero(), |acc, (&v, &t)| acc + v * t);
            let f = T::lit(2.0) * s / vnorm2;
            for (t, &v) in target[k..].iter_mut().zip(&col[k..]) {
                *t = *t - f * v;
            }
        };
        for j in (k + 1)..p {
            let target = &mut tail[(j - k - 1) * n..(j - k) * n];
            reflect(target);
            r[(k, j)] = target[k];
        }
        reflect(&mut b);
        r[(k, k)] = alpha;
    }

    let r_inv = upper_triangular_inverse(&r);
    let rcond = match &r_inv {
        Some(inv) => T::one() / (norm1(&r) * norm1(inv)),
        None => T::zero(),
    };
    let min_rcond = T::lit(MIN_RCOND).max(T::lit(100.0) * T::epsilon());
    let r_inv = match r_inv {
        Some(inv) if rcond >= min_rcond => inv,
        _ => return Err(Error::RankDeficient { rcond: rcond.as_f64() }),
    };

    let beta: Vec<T> = (0..p)
        .map(|i| (i..p).fold(T::zero(), |acc, k| acc + r_inv[(i, k)] * b[k]))
        .collect();

    let mut xtwx_inverse = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = (j..p).fold(T::zero(), |acc, k| acc + r_inv[(i, k)] * r_inv[(j, k)]);
            xtwx_inverse[(i, j)] = v;
            xtwx_inverse[(j, i)] = v;
        }
    }

    let weighted_residual_ss = (0..n).fold(T::zero(), |acc, i| {
        let e = data.y[i] - dot(data.x.row(i), &beta);
        acc + w[i] * e * e
    });

    Ok(WlsOutput { beta, xtwx_inverse, weighted_residual_ss, weight_sum })
}

fn upper_triangular_inverse<T: Real>(r: &Matrix<T>) -> Option<Matrix<T>> {
    let p = r.rows();
    if (0..p).any(|i| r[(i, i)] == T::zero()) {
        return None;
    }
    let mut inv = Matrix::zeros(p, p);
    for j in 0..p {
        inv[(j, j)] = T::one() / r[(j, j)];
        for i in (0..j).rev() {
            let s = ((i + 1)..=j).fold(T::zero(), |acc, k| acc + r[(i, k)] * inv[(k, j)]);
            inv[(i, j)] = -s / r[(i, i)];
        }
    }
    Some(inv)
}

fn norm1<T: Real>(m: &Matrix<T>) -> T {
    (0..m.cols())
        .map(|j| (0..m.rows()).fold(T::zero(), |acc, i| acc + m[(i, j)].abs()))
        .fold(T::zero(), T::max)
}

/// Classical least squares fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OlsFit<T> {
    pub beta: Vec<T>,
    /// `sqrt(RSS / (n − p))`
    pub sigma: T,
    pub xtx_inverse: Matrix<T>,
}

pub fn ols_fit<T: Real>(data: &Dataset<T>) -> Result<OlsFit<T>> {
    let (n, p) = (data.n(), data.p());
    if n <= p {
        return Err(invalid(format!("OLS needs n > p, got n = {n}, p = {p}")));
    }
    let out = wls_solve(data, &vec![T::one(); n])?;
    let sigma = (out.weighted_residual_ss / T::lit((n - p) as f64)).sqrt();
    Ok(OlsFit { beta: out.beta, sigma, xtx_inverse: out.xtwx_inverse })
}
