//! Matrix substrate for covariance matrices.
//!
//! Every covariance matrix here is stored in the global ordering
//! `(q_1, …, q_N, p_1, …, p_N)`, so "mode `k`" always means the pair of
//! rows/columns `k` and `N + k`.

use std::ops::Index;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest condition number accepted for the discarded block of a Schur complement.
pub const COND_CAP: f64 = 1e12;

/// Relative cutoff below which eigenvalues count as zero in pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Real symmetric matrix. Symmetry is exact: the constructor replaces the
/// input by `(M + Mᵀ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        SymMatrix(sym)
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SymMatrix(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Number of modes when read as a covariance matrix.
    pub fn n_modes(&self) -> Result<usize> {
        if self.dim() == 0 || !self.dim().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "covariance matrix dimension must be positive and even, got {}",
                self.dim()
            )));
        }
        Ok(self.dim() / 2)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Principal submatrix on the given row/column indices, in that order.
    pub fn principal(&self, idx: &[usize]) -> SymMatrix {
        SymMatrix(select(&self.0, idx, idx))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, ij: (usize, usize)) -> &f64 {
        &self.0[ij]
    }
}

/// The symplectic form `Ω = [[0, I], [-I, 0]]` for `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub n_modes: usize,
    pub matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let n = n_modes;
        let matrix = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j == i + n {
                1.0
            } else if i >= n && j + n == i {
                -1.0
            } else {
                0.0
            }
        });
        SymplecticForm { n_modes, matrix }
    }
}

/// Row/column indices of the listed modes: all their `q`s, then all their `p`s.
pub fn quadrature_indices(n_modes: usize, modes: &[usize]) -> Vec<usize> {
    modes
        .iter()
        .copied()
        .chain(modes.iter().map(|&m| m + n_modes))
        .collect()
}

pub(crate) fn check_modes(n_modes: usize, modes: &[usize]) -> Result<()> {
    for &m in modes {
        if m >= n_modes {
            return Err(Error::IndexOutOfRange { index: m, n_modes });
        }
    }
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != modes.len() {
        return Err(Error::InvalidArgument(format!("repeated mode in {modes:?}")));
    }
    Ok(())
}

pub(crate) fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Eigenvalues and eigenvectors of a symmetric matrix.
pub(crate) fn eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `f(M)` for symmetric `M`, applied through its eigendecomposition.
pub(crate) fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    &scaled * vecs.transpose()
}

/// Places `block` (a CM on `modes.len()` modes) onto `modes` of an
/// `n_total`-mode zero matrix.
pub(crate) fn embed(block: &SymMatrix, modes: &[usize], n_total: usize) -> Result<DMatrix<f64>> {
    let k = block.n_modes()?;
    if k != modes.len() {
        return Err(Error::Dimension(format!(
            "block has {k} modes but {} targets were given",
            modes.len()
        )));
    }
    check_modes(n_total, modes)?;
    let target = quadrature_indices(n_total, modes);
    let mut out = DMatrix::zeros(2 * n_total, 2 * n_total);
    for (a, &ta) in target.iter().enumerate() {
        for (b, &tb) in target.iter().enumerate() {
            out[(ta, tb)] = block[(a, b)];
        }
    }
    Ok(out)
}

/// Direct sum over mode labels. Block `b` contributes the next
/// `n_b` modes, so under q-then-p ordering its q and p sectors land in
/// separate diagonal ranges of the result.
pub fn direct_sum(blocks: &[SymMatrix]) -> Result<SymMatrix> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("direct sum of no blocks".into()));
    }
    let sizes = blocks
        .iter()
        .map(SymMatrix::n_modes)
        .collect::<Result<Vec<_>>>()?;
    let total: usize = sizes.iter().sum();
    let mut out = DMatrix::zeros(2 * total, 2 * total);
    let mut offset = 0;
    for (block, &n) in blocks.iter().zip(&sizes) {
        let modes: Vec<usize> = (offset..offset + n).collect();
        out += embed(block, &modes, total)?;
        offset += n;
    }
    Ok(SymMatrix(out))
}

/// `A − B D⁻¹ Bᵀ` where `A` is the block of the kept modes, `D` the block of
/// the discarded ones and `B` their cross block. Uses [`COND_CAP`].
pub fn schur_complement(m: &SymMatrix, keep: &[usize]) -> Result<SymMatrix> {
    schur_complement_with(m, keep, COND_CAP)
}

pub fn schur_complement_with(m: &SymMatrix, keep: &[usize], cond_cap: f64) -> Result<SymMatrix> {
    let n = m.n_modes()?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("no modes kept".into()));
    }
    check_modes(n, keep)?;
    let discard: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let kq = quadrature_indices(n, keep);
    let dq = quadrature_indices(n, &discard);
    let a = select(m.matrix(), &kq, &kq);
    if discard.is_empty() {
        return Ok(SymMatrix(a));
    }
    let b = select(m.matrix(), &kq, &dq);
    let d = select(m.matrix(), &dq, &dq);
    schur_blocks(a, &b, &d, cond_cap)
}

fn schur_blocks(a: DMatrix<f64>, b: &DMatrix<f64>, d: &DMatrix<f64>, cond_cap: f64) -> Result<SymMatrix> {
    let (vals, vecs) = eigh(d);
    let max = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = vals.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if cond > cond_cap {
        return Err(Error::SingularBlock { cond, cap: cond_cap });
    }
    Ok(subtract_quadratic(a, b * vecs, &vals))
}

/// `A − W diag(1/λ) Wᵀ`.
fn subtract_quadratic(a: DMatrix<f64>, w: DMatrix<f64>, vals: &[f64]) -> SymMatrix {
    let mut scaled = w.clone();
    for (j, &v) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / v);
    }
    SymMatrix::symmetrized(a - scaled * w.transpose())
}

/// `lim_{λ→∞} A − B (D + λP)⁻¹ Bᵀ` for an orthogonal projector `P`.
///
/// The limit equals `A − B Q (Q D Q)⁺ Q Bᵀ` with `Q = I − P`; it is
/// evaluated on an orthonormal basis of `range(Q)`.
pub fn limit_schur_complement(
    a: &SymMatrix,
    b: &DMatrix<f64>,
    d_finite: &SymMatrix,
    p: &DMatrix<f64>,
) -> Result<SymMatrix> {
    let (na, nd) = (a.dim(), d_finite.dim());
    if b.nrows() != na || b.ncols() != nd || p.nrows() != nd || p.ncols() != nd {
        return Err(Error::Dimension(format!(
            "A is {na}x{na}, B is {}x{}, D is {nd}x{nd}, P is {}x{}",
            b.nrows(),
            b.ncols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let scale = p.amax().max(1.0);
    let asym = (p - p.transpose()).amax();
    let idem = (p * p - p).amax();
    if asym > 1e-8 * scale || idem > 1e-8 * scale {
        return Err(Error::InvalidArgument(format!(
            "P is not an orthogonal projector (asymmetry {asym:.1e}, idempotency error {idem:.1e})"
        )));
    }
    let rank = p.trace().round() as usize;
    if rank == 0 {
        return schur_blocks(a.matrix().clone(), b, d_finite.matrix(), COND_CAP);
    }
    if rank >= nd {
        return Ok(a.clone());
    }
    let q = DMatrix::identity(nd, nd) - p;
    let (qvals, qvecs) = eigh(&q);
    let cols: Vec<usize> = (0..nd).filter(|&j| qvals[j] > 0.5).collect();
    let basis = select(&qvecs, &(0..nd).collect::<Vec<_>>(), &cols);
    let compressed = basis.transpose() * d_finite.matrix() * &basis;
    let (vals, vecs) = eigh(&compressed);
    let max = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if max == 0.0 || vals.iter().any(|v| v.abs() < PINV_CUTOFF * max) {
        return Err(Error::DegenerateLimit);
    }
    Ok(subtract_quadratic(a.matrix().clone(), b * basis * vecs, &vals))
}

/// Symplectic spectrum of a positive-definite matrix, ascending, each value
/// reported once.
///
/// With `K = G^{1/2} Ω G^{1/2}` (real antisymmetric), the singular values of
/// `K` are the symplectic eigenvalues, each appearing twice.
pub fn symplectic_eigenvalues(g: &SymMatrix) -> Result<Vec<f64>> {
    let n = g.n_modes()?;
    let (vals, vecs) = eigh(g.matrix());
    let min_eigenvalue = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }
    let mut half = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        half.column_mut(j).scale_mut(v.sqrt());
    }
    let sqrt_g = &half * vecs.transpose();
    let k = &sqrt_g * SymplecticForm::new(n).matrix * &sqrt_g;
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Uncertainty-principle test: every symplectic eigenvalue is at least `1 − tol`.
pub fn is_valid_cm(g: &SymMatrix, tol: f64) -> bool {
    match symplectic_eigenvalues(g) {
        Ok(nu) => nu.iter().all(|&v| v >= 1.0 - tol),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: usize, data: &[f64]) -> SymMatrix {
        SymMatrix::new(DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn construction_symmetrizes_exactly() {
        let m = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.1, 2.0])).unwrap();
        assert_eq!(m[(0, 1)], m[(1, 0)]);
        assert_eq!(m[(0, 1)], 0.2);
        assert!(SymMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn symplectic_form_squares_to_minus_identity() {
        let omega = SymplecticForm::new(3).matrix;
        let n = omega.nrows();
        assert_eq!(&omega * &omega, -DMatrix::<f64>::identity(n, n));
        assert_eq!(omega.transpose(), -&omega);
    }

    #[test]
    fn direct_sum_of_vacua() {
        assert_eq!(direct_sum(&[SymMatrix::identity(2)]).unwrap(), SymMatrix::identity(2));
        let two = direct_sum(&[SymMatrix::identity(2), SymMatrix::identity(2)]).unwrap();
        assert_eq!(two, SymMatrix::identity(4));
        assert!(direct_sum(&[SymMatrix::identity(3)]).is_err());
    }

    #[test]
    fn direct_sum_interleaves_modes() {
        // one-mode blocks diag(a, b) and diag(c, d) -> diag(a, c, b, d)
        let a = SymMatrix::from_diagonal(&[1.0, 2.0]);
        let b = SymMatrix::from_diagonal(&[3.0, 4.0]);
        let sum = direct_sum(&[a, b]).unwrap();
        assert_eq!(sum, SymMatrix::from_diagonal(&[1.0, 3.0, 2.0, 4.0]));
    }

    #[test]
    fn schur_of_uncorrelated_blocks_is_kept_block() {
        let m = SymMatrix::identity(4);
        assert_eq!(schur_complement(&m, &[0]).unwrap(), SymMatrix::identity(2));

        let m = SymMatrix::from_diagonal(&[2.0, 7.0, 3.0, 11.0]);
        let s = schur_complement(&m, &[0]).unwrap();
        assert_eq!(s, SymMatrix::from_diagonal(&[2.0, 3.0]));
    }

    #[test]
    fn schur_matches_two_by_two_inversion() {
        // two modes: rows (q0, q1, p0, p1); keep mode 0
        let m = sym(
            4,
            &[
                3.0, 0.8, 0.2, -0.4, //
                0.8, 2.5, 0.3, 0.1, //
                0.2, 0.3, 1.9, 0.5, //
                -0.4, 0.1, 0.5, 2.2,
            ],
        );
        let s = schur_complement(&m, &[0]).unwrap();
        // A = rows/cols {0,2}, D = {1,3}, B = rows {0,2} x cols {1,3}
        let (a11, a12, a22) = (3.0, 0.2, 1.9);
        let (b11, b12, b21, b22) = (0.8, -0.4, 0.3, 0.5);
        let (d11, d12, d22) = (2.5, 0.1, 2.2);
        let det = d11 * d22 - d12 * d12;
        let (i11, i12, i22) = (d22 / det, -d12 / det, d11 / det);
        // B D^-1 B^T by hand
        let r1 = (b11 * i11 + b12 * i12, b11 * i12 + b12 * i22);
        let r2 = (b21 * i11 + b22 * i12, b21 * i12 + b22 * i22);
        let c11 = r1.0 * b11 + r1.1 * b12;
        let c12 = r1.0 * b21 + r1.1 * b22;
        let c22 = r2.0 * b21 + r2.1 * b22;
        assert!((s[(0, 0)] - (a11 - c11)).abs() < 1e-14);
        assert!((s[(0, 1)] - (a12 - c12)).abs() < 1e-14);
        assert!((s[(1, 1)] - (a22 - c22)).abs() < 1e-14);
    }

    #[test]
    fn schur_rejects_ill_conditioned_block() {
        let m = SymMatrix::from_diagonal(&[1.0, 1e-14, 1.0, 1.0]);
        match schur_complement(&m, &[0]) {
            Err(Error::SingularBlock { cond, .. }) => assert!(cond > COND_CAP),
            other => panic!("expected SingularBlock, got {other:?}"),
        }
        assert!(schur_complement_with(&m, &[0], 1e15).is_ok());
        assert!(matches!(
            schur_complement(&m, &[2]),
            Err(Error::IndexOutOfRange { index: 2, n_modes: 2 })
        ));
    }

    #[test]
    fn limit_schur_edge_projectors() {
        let a = sym(2, &[2.0, 0.5, 0.5, 3.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.3, -0.2, 0.1, 0.4]);
        let d = sym(2, &[1.5, 0.2, 0.2, 1.1]);

        let full = limit_schur_complement(&a, &b, &d, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(full, a);

        let none = limit_schur_complement(&a, &b, &d, &DMatrix::zeros(2, 2)).unwrap();
        let direct = schur_blocks(a.matrix().clone(), &b, d.matrix(), COND_CAP).unwrap();
        assert_eq!(none, direct);
    }

    #[test]
    fn limit_schur_detects_degenerate_compression() {
        let a = SymMatrix::identity(2);
        let b = DMatrix::from_element(2, 2, 0.1);
        // D vanishes on range(Q) = span(e1)
        let d = SymMatrix::from_diagonal(&[1.0, 0.0]);
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(limit_schur_complement(&a, &b, &d, &p), Err(Error::DegenerateLimit));

        let not_projector = DMatrix::from_element(2, 2, 0.7);
        assert!(matches!(
            limit_schur_complement(&a, &b, &SymMatrix::identity(2), &not_projector),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn symplectic_spectrum_of_scaled_identity() {
        let nu = symplectic_eigenvalues(&SymMatrix::identity(6)).unwrap();
        assert_eq!(nu.len(), 3);
        assert!(nu.iter().all(|v| (v - 1.0).abs() < 1e-14));

        let g = SymMatrix::from_diagonal(&[2.5; 4]);
        let nu = symplectic_eigenvalues(&g).unwrap();
        assert!(nu.iter().all(|v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn symplectic_spectrum_of_single_mode_squeezed_thermal() {
        // diag(a e^{2r}, a e^{-2r}) has the single symplectic eigenvalue a
        let (a, r) = (1.7, 0.8_f64);
        let g = SymMatrix::from_diagonal(&[a * (2.0 * r).exp(), a * (-2.0 * r).exp()]);
        let nu = symplectic_eigenvalues(&g).unwrap();
        assert!((nu[0] - a).abs() < 1e-13);
    }

    #[test]
    fn symplectic_spectrum_requires_positive_definite() {
        let g = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            symplectic_eigenvalues(&g),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(symplectic_eigenvalues(&SymMatrix::identity(3)).is_err());
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_cm(&SymMatrix::identity(2), 1e-9));
        assert!(!is_valid_cm(&SymMatrix::from_diagonal(&[0.5, 0.5]), 1e-9));
        assert!(!is_valid_cm(&SymMatrix::from_diagonal(&[-1.0, 1.0]), 1e-9));
    }
}
