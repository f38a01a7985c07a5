//! Small dense square matrices, Gaussian elimination, and the matrix
//! exponential via scaling-and-squaring with a degree-13 Padé approximant.

use super::NumericsError;

/// Dense square matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self, NumericsError> {
        if order == 0 {
            return Err(NumericsError::Domain {
                context: "SquareMatrix::new",
                detail: "order must be at least 1".into(),
            });
        }
        if entries.len() != order * order {
            return Err(NumericsError::Domain {
                context: "SquareMatrix::new",
                detail: format!(
                    "expected {} entries for order {order}, got {}",
                    order * order,
                    entries.len()
                ),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(NumericsError::Domain {
                context: "SquareMatrix::new",
                detail: "entries must be finite".into(),
            });
        }
        Ok(Self { order, entries })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.entries[i * order + i] = 1.0;
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.entries[row * self.order + col] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            order: self.order,
            entries,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            order: self.order,
            entries,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.order;
        (0..n)
            .map(|j| (0..n).map(|i| self.entries[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Left action of a row vector: v · A.
    pub fn row_vec_mul(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.order);
        let n = self.order;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for j in 0..n {
                out[j] += vi * self.entries[i * n + j];
            }
        }
        out
    }

    /// Right action on a column vector: A · v.
    pub fn col_vec_mul(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.order);
        let n = self.order;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.order;
        (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].iter().sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        out
    }
}

/// Solves A·x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &SquareMatrix, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let x = solve_columns(a, b, 1)?;
    Ok(x.entries)
}

/// Solves A·X = B column by column; B is given as `cols` stacked columns.
fn solve_columns(
    a: &SquareMatrix,
    b: &[f64],
    cols: usize,
) -> Result<SolveOut, NumericsError> {
    let n = a.order;
    debug_assert_eq!(b.len(), n * cols);
    let mut lu = a.entries.clone();
    // rhs stored column-major for cache-friendly elimination
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[perm[col] * n + col].abs();
        for row in (col + 1)..n {
            let v = lu[perm[row] * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val == 0.0 || !pivot_val.is_finite() {
            return Err(NumericsError::Singular {
                pivot: pivot_val,
                column: col,
            });
        }
        perm.swap(col, pivot_row);
        let p = perm[col];
        let diag = lu[p * n + col];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = lu[r * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            lu[r * n + col] = 0.0;
            for j in (col + 1)..n {
                lu[r * n + j] -= factor * lu[p * n + j];
            }
            for c in 0..cols {
                rhs[r * cols + c] -= factor * rhs[p * cols + c];
            }
        }
    }

    // Back substitution into permuted order, then undo the permutation.
    let mut out = vec![0.0; n * cols];
    for c in 0..cols {
        for row in (0..n).rev() {
            let p = perm[row];
            let mut acc = rhs[p * cols + c];
            for j in (row + 1)..n {
                acc -= lu[p * n + j] * out[j * cols + c];
            }
            out[row * cols + c] = acc / lu[p * n + row];
        }
    }
    Ok(SolveOut { entries: out })
}

struct SolveOut {
    entries: Vec<f64>,
}

/// Solves A·X = B for square B.
pub fn solve_matrix(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, NumericsError> {
    let n = a.order;
    let out = solve_columns(a, &b.entries, n)?;
    SquareMatrix::new(n, out.entries)
}

// Padé-13 coefficients (Higham 2005) and its validity radius in the 1-norm.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential exp(A·s) for s ≥ 0.
pub fn mat_exp(a: &SquareMatrix, s: f64) -> Result<SquareMatrix, NumericsError> {
    if !s.is_finite() || s < 0.0 {
        return Err(NumericsError::Domain {
            context: "mat_exp",
            detail: format!("scale must be finite and nonnegative, got {s}"),
        });
    }
    if a.entries.iter().any(|e| !e.is_finite()) {
        return Err(NumericsError::Domain {
            context: "mat_exp",
            detail: "matrix entries must be finite".into(),
        });
    }
    let n = a.order;
    let scaled = a.scale(s);
    let norm = scaled.one_norm();
    if norm == 0.0 {
        return Ok(SquareMatrix::identity(n));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let m = scaled.scale(0.5f64.powi(squarings as i32));

    let m2 = m.matmul(&m);
    let m4 = m2.matmul(&m2);
    let m6 = m2.matmul(&m4);
    let ident = SquareMatrix::identity(n);

    let b = &PADE13;
    let u_inner = m6
        .matmul(&m6.scale(b[13]).add(&m4.scale(b[11])).add(&m2.scale(b[9])))
        .add(&m6.scale(b[7]))
        .add(&m4.scale(b[5]))
        .add(&m2.scale(b[3]))
        .add(&ident.scale(b[1]));
    let u = m.matmul(&u_inner);
    let v = m6
        .matmul(&m6.scale(b[12]).add(&m4.scale(b[10])).add(&m2.scale(b[8])))
        .add(&m6.scale(b[6]))
        .add(&m4.scale(b[4]))
        .add(&m2.scale(b[2]))
        .add(&ident.scale(b[0]));

    let mut result = solve_matrix(&v.sub(&u), &v.add(&u))?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}
