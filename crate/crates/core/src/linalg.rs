//! Fixed-capacity dense matrices for the ambient spaces R² .. R⁴.

pub const CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: [[f64; CAP]; CAP],
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= CAP && cols <= CAP, "matrix exceeds {CAP}x{CAP}");
        Self { rows, cols, a: [[0.0; CAP]; CAP] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || r > CAP || c == 0 || c > CAP || rows.iter().any(|row| row.len() != c) {
            return None;
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            m.a[i][..c].copy_from_slice(row);
        }
        Some(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.a[i][..self.cols].to_vec()).collect()
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.a[j][i] = self.a[i][j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.a[i][k] * other.a[k][j];
                }
                out.a[i][j] = acc;
            }
        }
        out
    }

    #[inline]
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate().take(self.rows) {
            let mut acc = 0.0;
            for (k, vk) in v.iter().enumerate() {
                acc += self.a[i][k] * vk;
            }
            *o = acc;
        }
    }

    pub fn column(&self, j: usize) -> [f64; CAP] {
        let mut c = [0.0; CAP];
        for (i, ci) in c.iter_mut().enumerate().take(self.rows) {
            *ci = self.a[i][j];
        }
        c
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, vi) in v.iter().enumerate().take(self.rows) {
            self.a[i][j] = *vi;
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += self.a[i][j] * self.a[i][j];
            }
        }
        s
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.a;
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        det
    }

    /// Largest singular value, by power iteration on `AᵀA`.
    pub fn operator_norm(&self) -> f64 {
        let ata = self.transpose().mul(self);
        let n = ata.rows;
        let mut v = [1.0, 0.7, 0.3, 0.1];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let mut w = [0.0; CAP];
            ata.mul_vec(&v[..n], &mut w[..n]);
            let norm = w[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for i in 0..n {
                v[i] = w[i] / norm;
            }
            if (norm - lambda).abs() <= 1e-15 * norm {
                lambda = norm;
                break;
            }
            lambda = norm;
        }
        lambda.sqrt()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    dot(a, &cross3(b, c))
}
