use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Largest matrix accepted by [`permanent`] and [`determinant`].
pub const DEFAULT_DIMENSION_CAP: usize = 12;

/// `||L^dagger L - I||_F` above which a matrix is flagged as non-unitary.
pub const DEFAULT_UNITARITY_WARNING: f64 = 1e-2;

/// Square complex amplitude matrix of a linear-optical element, row-major.
///
/// Row `i`, column `j` is the amplitude from input mode `i` to output mode
/// `j`. Measured matrices are allowed to be slightly non-unitary; see
/// [`InterferometerMatrix::unitarity_deviation`].
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl InterferometerMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 1 || entries.len() != dim * dim {
            return Err(Error::Shape {
                dim,
                entries: entries.len(),
            });
        }
        Ok(InterferometerMatrix { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        InterferometerMatrix { dim, entries }
    }

    /// `(1/sqrt 2) [[1, 1], [1, -1]]`.
    pub fn balanced_splitter() -> Self {
        let h = 1.0 / sqrt(2.0);
        Self::from_real(2, &[h, h, h, -h]).expect("2x2")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// `|L_ij|^2`.
    pub fn intensity(&self, row: usize, col: usize) -> f64 {
        self.get(row, col).norm_sqr()
    }

    /// Frobenius norm of `L^dagger L - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    s -= 1.0;
                }
                acc += s.norm_sqr();
            }
        }
        sqrt(acc)
    }

    pub fn is_near_unitary(&self, threshold: f64) -> bool {
        self.unitarity_deviation() <= threshold
    }

    /// The matrix built from rows `rows` and columns `cols` (indices may
    /// repeat), as used for multi-photon transition amplitudes.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::Shape {
                dim: rows.len(),
                entries: rows.len() * cols.len(),
            });
        }
        let entries = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Self::new(rows.len(), entries)
    }
}

fn check_cap(m: &InterferometerMatrix, cap: usize) -> Result<()> {
    if m.dim > cap {
        Err(Error::DimensionCap { dim: m.dim, cap })
    } else {
        Ok(())
    }
}

/// Permanent with the default dimension cap.
pub fn permanent(m: &InterferometerMatrix) -> Result<Complex64> {
    permanent_with_cap(m, DEFAULT_DIMENSION_CAP)
}

/// Exact permanent: direct expansion up to 3x3, Ryser above.
pub fn permanent_with_cap(m: &InterferometerMatrix, cap: usize) -> Result<Complex64> {
    check_cap(m, cap)?;
    let a = |i, j| m.get(i, j);
    Ok(match m.dim {
        1 => a(0, 0),
        2 => a(0, 0) * a(1, 1) + a(0, 1) * a(1, 0),
        3 => {
            a(0, 0) * (a(1, 1) * a(2, 2) + a(1, 2) * a(2, 1))
                + a(0, 1) * (a(1, 0) * a(2, 2) + a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) + a(1, 1) * a(2, 0))
        }
        _ => ryser_permanent(m),
    })
}

/// Ryser's inclusion-exclusion formula with Gray-code column updates,
/// `O(2^n n)`.
pub fn ryser_permanent(m: &InterferometerMatrix) -> Complex64 {
    let n = m.dim;
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let next = k ^ (k >> 1);
        let changed = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << changed) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m.get(i, changed);
            } else {
                *s -= m.get(i, changed);
            }
        }
        gray = next;
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Exact determinant: direct expansion up to 3x3, otherwise Laplace
/// expansion over column subsets (`O(2^n n)`, no pivoting).
pub fn determinant(m: &InterferometerMatrix) -> Result<Complex64> {
    check_cap(m, DEFAULT_DIMENSION_CAP)?;
    let a = |i, j| m.get(i, j);
    Ok(match m.dim {
        1 => a(0, 0),
        2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
        3 => {
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        n => {
            // minors[mask]: signed sum over assignments of rows 0..popcount(mask)
            // to the columns in mask.
            let mut minors = vec![Complex64::new(0.0, 0.0); 1 << n];
            minors[0] = Complex64::new(1.0, 0.0);
            for mask in 0usize..(1 << n) {
                let f = minors[mask];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = mask.count_ones() as usize;
                if row == n {
                    continue;
                }
                for col in 0..n {
                    if mask & (1 << col) != 0 {
                        continue;
                    }
                    let inversions = (mask >> (col + 1)).count_ones();
                    let term = f * a(row, col);
                    if inversions % 2 == 0 {
                        minors[mask | (1 << col)] += term;
                    } else {
                        minors[mask | (1 << col)] -= term;
                    }
                }
            }
            minors[(1 << n) - 1]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s5() -> InterferometerMatrix {
        InterferometerMatrix::from_real(2, &[sqrt(0.3310), sqrt(0.6690), sqrt(0.6632), -sqrt(0.3368)]).unwrap()
    }

    #[test]
    fn identity_and_balanced() {
        let id = InterferometerMatrix::identity(2);
        assert_eq!(permanent(&id).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(determinant(&id).unwrap(), Complex64::new(1.0, 0.0));
        let det = determinant(&InterferometerMatrix::balanced_splitter()).unwrap();
        assert!((det - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let per = permanent(&InterferometerMatrix::balanced_splitter()).unwrap();
        assert!(per.norm() < 1e-15);
    }

    #[test]
    fn measured_splitter_permanent_and_determinant() {
        let m = s5();
        let a = sqrt(0.3310);
        let b = sqrt(0.6690);
        let c = sqrt(0.6632);
        let d = sqrt(0.3368);
        let per = permanent(&m).unwrap();
        assert!((per.re - (b * c - a * d)).abs() < 1e-15);
        assert!((per.norm_sqr() - 0.1104).abs() < 5e-4);
        let det = determinant(&m).unwrap();
        assert!((det.norm_sqr() - 0.99996).abs() < 1e-5);
        let (dd, pp) = (det.norm_sqr(), per.norm_sqr());
        assert!(((dd - pp) / (dd + pp) - 0.8012).abs() < 2e-4);
        assert!(m.unitarity_deviation() < DEFAULT_UNITARITY_WARNING);
    }

    #[test]
    fn all_ones_three_by_three() {
        let m = InterferometerMatrix::from_real(3, &[1.0; 9]).unwrap();
        assert_eq!(permanent(&m).unwrap(), Complex64::new(6.0, 0.0));
        assert_eq!(ryser_permanent(&m), Complex64::new(6.0, 0.0));
        assert_eq!(determinant(&m).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ones_matrix_permanent_is_factorial() {
        for n in 1..=8usize {
            let m = InterferometerMatrix::from_real(n, &vec![1.0; n * n]).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((ryser_permanent(&m).re - fact).abs() < 1e-9 * fact);
        }
    }

    #[test]
    fn determinant_of_permutation_matrices() {
        // 4-cycle: odd permutation.
        let mut e = [0.0; 16];
        for (r, c) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            e[r * 4 + c] = 1.0;
        }
        let m = InterferometerMatrix::from_real(4, &e).unwrap();
        assert_eq!(determinant(&m).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(
            determinant(&InterferometerMatrix::identity(6)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn cap_is_enforced() {
        let m = InterferometerMatrix::identity(13);
        assert!(matches!(permanent(&m), Err(Error::DimensionCap { dim: 13, cap: 12 })));
        assert!(determinant(&m).is_err());
        assert!(permanent_with_cap(&m, 13).is_ok());
    }

    #[test]
    fn shape_checked() {
        assert!(InterferometerMatrix::from_real(2, &[1.0, 0.0, 0.0]).is_err());
        assert!(InterferometerMatrix::from_real(0, &[]).is_err());
    }

    #[test]
    fn unitarity_flag() {
        assert!(InterferometerMatrix::balanced_splitter().unitarity_deviation() < 1e-15);
        let lossy = InterferometerMatrix::from_real(2, &[0.5, 0.5, 0.5, -0.5]).unwrap();
        assert!(!lossy.is_near_unitary(DEFAULT_UNITARITY_WARNING));
    }
}
