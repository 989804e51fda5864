//! Dense operators on the truncated number basis {|0⟩, …, |N⟩}.
//!
//! Builders that compose operators (Hamiltonians, squares) work in a larger
//! internal dimension and cut back to the requested truncation, so the
//! retained block carries the true matrix elements; plain ladder matrices are
//! returned as-is, with the usual truncation artifact in their top row
//! products.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Dense complex operator in the truncated number basis.
#[derive(Debug, Clone)]
pub struct FockOperator {
    matrix: DMatrix<C64>,
}

impl FockOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::Invalid("operator matrix must be square with dim ≥ 2".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|v| C64::new(v, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix + &other.matrix }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix - &other.matrix }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { matrix: self.matrix.map(|v| v * c) }
    }

    /// Keep the leading `dim`×`dim` block.
    pub fn truncated(&self, dim: usize) -> Result<Self> {
        if dim < 2 || dim > self.dim() {
            return Err(Error::Invalid(format!("cannot truncate dim {} to {dim}", self.dim())));
        }
        Self::new(self.matrix.view((0, 0), (dim, dim)).into_owned())
    }

    /// max |M − M†| over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.dim() != self.dim() {
            return Err(Error::Invalid("vector/operator dimension mismatch".into()));
        }
        Ok(FockVector { coeffs: &self.matrix * &v.coeffs })
    }

    /// ⟨v|M|v⟩.
    pub fn quadratic_form(&self, v: &FockVector) -> Result<C64> {
        let mv = self.apply(v)?;
        Ok(v.coeffs.dotc(&mv.coeffs))
    }
}

/// Complex coefficients in the number basis.
#[derive(Debug, Clone)]
pub struct FockVector {
    coeffs: DVector<C64>,
}

impl FockVector {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs: DVector::from_vec(coeffs) }
    }

    pub fn basis_state(dim: usize, n: usize) -> Self {
        let mut coeffs = DVector::from_element(dim, C64::new(0.0, 0.0));
        coeffs[n] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { coeffs: self.coeffs.map(|c| c / n) }
    }
}

/// Canonical ladder matrices (b, b†) with ⟨n−1|b|n⟩ = √n.
///
/// Products of these truncated matrices show the usual artifact in the last
/// row: (bb† − b†b) has diagonal (1, …, 1, −dim+1).
pub fn build_ladder(dim: usize) -> Result<(FockOperator, FockOperator)> {
    if dim < 2 {
        return Err(Error::Invalid("ladder needs dim ≥ 2".into()));
    }
    let mut b = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in 1..dim {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let bdag = b.adjoint();
    Ok((FockOperator::new(b)?, FockOperator::new(bdag)?))
}

/// Ascending eigenvalues and eigenvectors of a Hermitian operator.
///
/// Real-symmetric inputs take the real path; genuinely complex Hermitian
/// matrices are embedded as 2n×2n real symmetric ones (eigenvalues doubled).
pub fn hermitian_eigen(op: &FockOperator) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let scale = op.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if op.hermiticity_residual() > 1e-10 * scale {
        return Err(Error::Invalid("matrix is not Hermitian".into()));
    }
    let n = op.dim();
    let max_im = op.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_im <= 1e-14 * scale {
        let real = op.matrix.map(|z| z.re);
        let sym = nalgebra::linalg::SymmetricEigen::new(real);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| sym.eigenvalues[i].partial_cmp(&sym.eigenvalues[j]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
        let mut vectors = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (col, &i) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, col)] = C64::new(sym.eigenvectors[(row, i)], 0.0);
            }
        }
        return Ok((values, vectors));
    }

    // embed H = A + iB as [[A, -B], [B, A]]; each eigenvalue appears twice
    let mut big = DMatrix::from_element(2 * n, 2 * n, 0.0);
    for i in 0..n {
        for j in 0..n {
            let z = op.matrix[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let sym = nalgebra::linalg::SymmetricEigen::new(big);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| sym.eigenvalues[i].partial_cmp(&sym.eigenvalues[j]).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        let a = sym.eigenvalues[order[2 * k]];
        let b = sym.eigenvalues[order[2 * k + 1]];
        if (a - b).abs() > 1e-6 * scale.max(a.abs()) {
            return Err(Error::Invalid(format!(
                "embedded spectrum did not pair up: {a} vs {b}"
            )));
        }
        values.push(0.5 * (a + b));
        let col = order[2 * k];
        for row in 0..n {
            vectors[(row, k)] =
                C64::new(sym.eigenvectors[(row, col)], sym.eigenvectors[(row + n, col)]);
        }
    }
    Ok((values, vectors))
}

/// First `count` ascending eigenvalues of a Hermitian operator, with a guard
/// band keeping the truncation-corrupted top of the spectrum out of reach.
pub fn spectrum(h: &FockOperator, count: usize) -> Result<Vec<f64>> {
    if count + 10 > h.dim() {
        return Err(Error::Invalid(format!(
            "requested {count} eigenvalues from dim {}; keep count ≤ dim − 10",
            h.dim()
        )));
    }
    let (values, _) = hermitian_eigen(h)?;
    Ok(values.into_iter().take(count).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_action_on_basis_states() {
        let (b, bdag) = build_ladder(6).unwrap();
        let vac = FockVector::basis_state(6, 0);
        assert!(b.apply(&vac).unwrap().norm() < 1e-15);
        let one = FockVector::basis_state(6, 1);
        let raised = bdag.apply(&one).unwrap();
        let expect = 2.0f64.sqrt();
        assert!((raised.coeffs()[2].re - expect).abs() < 1e-15);
        assert!((raised.norm() - expect).abs() < 1e-15);
    }

    #[test]
    fn truncated_commutator_artifact() {
        let dim = 8;
        let (b, bdag) = build_ladder(dim).unwrap();
        let comm = b.mul(&bdag).sub(&bdag.mul(&b));
        for n in 0..dim - 1 {
            assert!((comm.matrix()[(n, n)].re - 1.0).abs() < 1e-14);
        }
        let last = comm.matrix()[(dim - 1, dim - 1)].re;
        assert!((last - (1.0 - dim as f64)).abs() < 1e-12);
    }

    #[test]
    fn real_symmetric_eigenvalues() {
        // number-operator-like diagonal plus weak coupling
        let dim = 12;
        let (b, bdag) = build_ladder(dim).unwrap();
        let n_op = bdag.mul(&b);
        let (vals, vecs) = hermitian_eigen(&n_op).unwrap();
        for (n, v) in vals.iter().enumerate() {
            assert!((v - n as f64).abs() < 1e-12);
        }
        // eigenvector residual check
        let v0 = vecs.column(3).into_owned();
        let mv = n_op.matrix() * &v0;
        let resid = (&mv - v0.map(|z| z * vals[3])).norm();
        assert!(resid < 1e-10);
    }

    #[test]
    fn complex_hermitian_eigenvalues_via_embedding() {
        // p-like operator iK(b† − b): spectrum symmetric about zero
        let dim = 24;
        let (b, bdag) = build_ladder(dim).unwrap();
        let p = bdag.sub(&b).scale(C64::new(0.0, 1.0));
        assert!(p.hermiticity_residual() < 1e-14);
        let (vals, vecs) = hermitian_eigen(&p).unwrap();
        for k in 0..dim {
            assert!((vals[k] + vals[dim - 1 - k]).abs() < 1e-9);
        }
        // residual of one eigenpair
        let v = vecs.column(5).into_owned();
        let mv = p.matrix() * &v;
        let resid = (&mv - v.map(|z| z * vals[5])).norm();
        assert!(resid < 1e-9);
    }

    #[test]
    fn spectrum_guard_band() {
        let (b, bdag) = build_ladder(16).unwrap();
        let n_op = bdag.mul(&b);
        assert!(spectrum(&n_op, 10).is_err());
        let vals = spectrum(&n_op, 6).unwrap();
        assert_eq!(vals.len(), 6);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
