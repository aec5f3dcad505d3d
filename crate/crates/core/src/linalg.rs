//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::scalar::{cast, Real};

pub type Mat<T> = DMatrix<T>;
pub type Vector<T> = DVector<T>;

/// `(M + Mᵀ) / 2`. Returns a bit-identical copy when `m` is already symmetric.
pub fn symmetrize<T: Real>(m: &Mat<T>) -> Mat<T> {
    let half: T = cast(0.5);
    (m + m.transpose()) * half
}

pub fn frobenius<T: Real>(m: &Mat<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// `‖M − Mᵀ‖_F / ‖M‖_F`, zero for the zero matrix.
pub fn relative_asymmetry<T: Real>(m: &Mat<T>) -> T {
    let norm = frobenius(m);
    if norm == T::zero() {
        return T::zero();
    }
    frobenius(&(m - m.transpose())) / norm
}

/// `‖A − B‖_F / ‖B‖_F`, or the absolute difference when `B = 0`.
pub fn relative_difference<T: Real>(a: &Mat<T>, b: &Mat<T>) -> T {
    let denom = frobenius(b);
    if denom == T::zero() {
        return frobenius(&(a - b));
    }
    frobenius(&(a - b)) / denom
}

pub fn cholesky<T: Real>(m: &Mat<T>) -> Option<Cholesky<T, Dyn>> {
    if m.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Cholesky::new(m.clone())
}

pub fn is_positive_definite<T: Real>(m: &Mat<T>) -> bool {
    cholesky(m).is_some()
}

/// `log det M` for symmetric positive-definite `M`, or `None` otherwise.
pub fn logdet<T: Real>(m: &Mat<T>) -> Option<T> {
    let chol = cholesky(m)?;
    Some(logdet_from_cholesky(&chol))
}

pub(crate) fn logdet_from_cholesky<T: Real>(chol: &Cholesky<T, Dyn>) -> T {
    let two: T = cast(2.0);
    chol.l_dirty()
        .diagonal()
        .iter()
        .fold(T::zero(), |acc, &d| acc + d.ln())
        * two
}

/// Inverse of a symmetric positive-definite matrix, symmetrized.
pub fn spd_inverse<T: Real>(m: &Mat<T>) -> Option<Mat<T>> {
    cholesky(m).map(|c| symmetrize(&c.inverse()))
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigen<T: Real>(m: &Mat<T>) -> (Vec<T>, Mat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue<T: Real>(m: &Mat<T>) -> T {
    sym_eigen(m).0.first().copied().unwrap_or(T::zero())
}

pub fn max_eigenvalue<T: Real>(m: &Mat<T>) -> T {
    sym_eigen(m).0.last().copied().unwrap_or(T::zero())
}

/// Largest singular value of a symmetric matrix.
pub fn sym_spectral_norm<T: Real>(m: &Mat<T>) -> T {
    sym_eigen(m)
        .0
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Moduli of the (possibly complex) eigenvalues of a general square matrix.
pub fn eigenvalue_magnitudes<T: Real>(m: &Mat<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re * z.re + z.im * z.im).sqrt())
        .collect()
}

/// In-place Cholesky factorization of a symmetric matrix whose entries vanish
/// beyond `bandwidth` off the diagonal. Only the lower band is read and the
/// factor overwrites it. Returns `false` if a non-positive pivot appears.
pub(crate) fn banded_cholesky_in_place<T: Real>(h: &mut Mat<T>, bandwidth: usize) -> bool {
    let n = h.nrows();
    for j in 0..n {
        let lo = j.saturating_sub(bandwidth);
        let mut d = h[(j, j)];
        for k in lo..j {
            d -= h[(j, k)] * h[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        h[(j, j)] = d;
        let hi = (j + bandwidth + 1).min(n);
        for i in (j + 1)..hi {
            let lo_i = i.saturating_sub(bandwidth).max(lo);
            let mut s = h[(i, j)];
            for k in lo_i..j {
                s -= h[(i, k)] * h[(j, k)];
            }
            h[(i, j)] = s / d;
        }
    }
    true
}

/// Solves `L Lᵀ x = b` with a banded factor produced by [`banded_cholesky_in_place`].
pub(crate) fn banded_cholesky_solve<T: Real>(l: &Mat<T>, bandwidth: usize, b: &Vector<T>) -> Vector<T> {
    let n = l.nrows();
    let mut y = b.clone();
    for i in 0..n {
        let lo = i.saturating_sub(bandwidth);
        let mut s = y[i];
        for k in lo..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let hi = (i + bandwidth + 1).min(n);
        let mut s = y[i];
        for k in (i + 1)..hi {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}
