//! The Gaussian states used by the ring construction: the bisymmetric
//! three-mode building block, two-mode squeezed bonds, marginals and
//! partial transposition, plus the plain-text matrix format.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symplectic::{check_modes, is_valid_cm, quadrature_indices, symplectic_eigenvalues, SymMatrix};

/// Largest finite squeezing accepted for a bond; `cosh 36 ≈ 2e15`.
pub const R_CAP: f64 = 18.0;

/// Slack allowed on `s ≥ s_min(x)` so that `s_min` computed by the caller
/// in a different order of operations is still accepted.
const BOUND_SLACK: f64 = 1e-12;

/// `(s, x)` of the pure bisymmetric three-mode building block: `s` is the
/// local mixedness (`√det`) of modes 0 and 1, `x` that of mode 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingBlockParams {
    s: f64,
    x: f64,
}

/// Stably evaluated sector data of the block's input port.
///
/// `q_sum = s + t₊`, `q_diff = s − t₊`, `p_sum = s + t₋`, `p_diff = s − t₋`;
/// the differences vanish like `1/s` and are not formed by subtraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PortSectors {
    pub s: f64,
    pub x: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub q_sum: f64,
    pub q_diff: f64,
    pub p_sum: f64,
    pub p_diff: f64,
    pub u_plus_sq: f64,
    pub u_minus_sq: f64,
}

impl BuildingBlockParams {
    pub fn new(s: f64, x: f64) -> Result<Self> {
        if !(s.is_finite() && x.is_finite()) {
            return Err(Error::Unphysical(format!("non-finite parameters s = {s}, x = {x}")));
        }
        if x < 1.0 {
            return Err(Error::Unphysical(format!("x = {x} is below 1")));
        }
        let s_min = Self::s_min(x);
        if s < s_min * (1.0 - BOUND_SLACK) {
            return Err(Error::Unphysical(format!("s below s_min = {s_min} (got s = {s})")));
        }
        Ok(BuildingBlockParams { s: s.max(s_min), x })
    }

    /// The least entangled input port for a given `x`.
    pub fn at_s_min(x: f64) -> Result<Self> {
        Self::new(Self::s_min(x), x)
    }

    /// `(x + 1)/2`, the physicality bound on `s`.
    pub fn s_min(x: f64) -> f64 {
        0.5 * (x + 1.0)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    // 16s⁴ − 8(x² + 1)s² + (x² − 1)² = (2s − x − 1)(2s + x + 1)(4s² − (x − 1)²)
    fn sqrt_radicand(&self) -> f64 {
        let (s, x) = (self.s, self.x);
        let rad = (2.0 * s - x - 1.0) * (2.0 * s + x + 1.0) * (4.0 * s * s - (x - 1.0).powi(2));
        rad.max(0.0).sqrt()
    }

    pub fn t_plus(&self) -> f64 {
        (self.x * self.x - 1.0 + self.sqrt_radicand()) / (4.0 * self.s)
    }

    pub fn t_minus(&self) -> f64 {
        (self.x * self.x - 1.0 - self.sqrt_radicand()) / (4.0 * self.s)
    }

    // (√a, √b) with a = (x − 2s)² − 1, b = (x + 2s)² − 1
    fn u_roots(&self) -> (f64, f64) {
        let (s, x) = (self.s, self.x);
        let a = ((2.0 * s - x - 1.0) * (2.0 * s - x + 1.0)).max(0.0);
        let b = (x + 2.0 * s).powi(2) - 1.0;
        (a.sqrt(), b.sqrt())
    }

    fn u_prefactor(&self) -> f64 {
        0.25 * ((self.x * self.x - 1.0) / (self.s * self.x)).sqrt()
    }

    pub fn u_plus(&self) -> f64 {
        let (ra, rb) = self.u_roots();
        self.u_prefactor() * (ra + rb)
    }

    pub fn u_minus(&self) -> f64 {
        // √a − √b = (a − b)/(√a + √b) with a − b = −8sx
        let (ra, rb) = self.u_roots();
        if ra + rb == 0.0 {
            return 0.0;
        }
        -8.0 * self.s * self.x * self.u_prefactor() / (ra + rb)
    }

    pub(crate) fn port_sectors(&self) -> PortSectors {
        let (s, x) = (self.s, self.x);
        let root = self.sqrt_radicand();
        let t_plus = self.t_plus();
        let t_minus = self.t_minus();
        let (u_plus, u_minus) = (self.u_plus(), self.u_minus());
        PortSectors {
            s,
            x,
            t_plus,
            t_minus,
            q_sum: s + t_plus,
            q_diff: 4.0 * s / (4.0 * s * s - x * x + 1.0 + root),
            p_sum: 4.0 * s * x * x / (4.0 * s * s + x * x - 1.0 + root),
            p_diff: (4.0 * s * s - x * x + 1.0 + root) / (4.0 * s),
            u_plus_sq: u_plus * u_plus,
            u_minus_sq: u_minus * u_minus,
        }
    }
}

/// Squeezing of the ancillary bonds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondSpec {
    /// Two-mode squeezed state with squeezing parameter `r`.
    Finite(f64),
    /// The infinitely squeezed (EPR) limit.
    Infinite,
}

impl BondSpec {
    /// Finite bond; requests above [`R_CAP`] become [`BondSpec::Infinite`].
    pub fn finite(r: f64) -> Result<Self> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Unphysical(format!("bond squeezing r = {r} is negative")));
        }
        if r > R_CAP {
            return Ok(BondSpec::Infinite);
        }
        Ok(BondSpec::Finite(r))
    }
}

impl FromStr for BondSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(BondSpec::Infinite);
        }
        let r: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("bond must be 'inf' or a number, got '{s}'")))?;
        BondSpec::finite(r)
    }
}

impl fmt::Display for BondSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BondSpec::Finite(r) => write!(f, "{r}"),
            BondSpec::Infinite => f.write_str("inf"),
        }
    }
}

/// Zero-mean Gaussian state, described by its covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cm: SymMatrix,
    n_modes: usize,
}

impl GaussianState {
    /// Validates the uncertainty principle to `1e-9`.
    pub fn new(cm: SymMatrix) -> Result<Self> {
        let n_modes = cm.n_modes()?;
        if !is_valid_cm(&cm, 1e-9) {
            return Err(Error::Unphysical(
                "covariance matrix violates the uncertainty principle".into(),
            ));
        }
        Ok(GaussianState { cm, n_modes })
    }

    /// For states that are valid by construction (closed forms, marginals).
    pub(crate) fn trusted(cm: SymMatrix) -> Self {
        let n_modes = cm.dim() / 2;
        debug_assert_eq!(cm.dim(), 2 * n_modes);
        GaussianState { cm, n_modes }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::trusted(SymMatrix::identity(2 * n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cm(&self) -> &SymMatrix {
        &self.cm
    }

    pub fn into_cm(self) -> SymMatrix {
        self.cm
    }

    pub fn determinant(&self) -> f64 {
        self.cm.determinant()
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cm)
    }
}

/// Covariance matrix of the building block; modes 0 and 1 form the input
/// port and mode 2 the output port.
pub fn building_block(p: &BuildingBlockParams) -> GaussianState {
    let (s, x) = (p.s(), p.x());
    let (tp, tm) = (p.t_plus(), p.t_minus());
    let (up, um) = (p.u_plus(), p.u_minus());
    let q = [[s, tp, up], [tp, s, up], [up, up, x]];
    let pp = [[s, tm, um], [tm, s, um], [um, um, x]];
    let cm = DMatrix::from_fn(6, 6, |i, j| match (i < 3, j < 3) {
        (true, true) => q[i][j],
        (false, false) => pp[i - 3][j - 3],
        _ => 0.0,
    });
    GaussianState::trusted(SymMatrix::symmetrized(cm))
}

/// Two-mode squeezed vacuum with squeezing `r`.
pub fn tmss(r: f64) -> Result<GaussianState> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Unphysical(format!("squeezing r = {r} is negative")));
    }
    let (c, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let cm = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, sh, 0.0, 0.0, //
            sh, c, 0.0, 0.0, //
            0.0, 0.0, c, -sh, //
            0.0, 0.0, -sh, c,
        ],
    );
    Ok(GaussianState::trusted(SymMatrix::symmetrized(cm)))
}

/// Marginal state of the listed modes, in the listed order.
pub fn reduce(g: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    if modes.is_empty() {
        return Err(Error::InvalidArgument("cannot reduce to zero modes".into()));
    }
    check_modes(g.n_modes(), modes)?;
    let idx = quadrature_indices(g.n_modes(), modes);
    Ok(GaussianState::trusted(g.cm().principal(&idx)))
}

/// `θ γ θ` where `θ` flips the momentum of every listed mode.
pub fn partial_transpose(g: &GaussianState, modes: &[usize]) -> Result<SymMatrix> {
    let n = g.n_modes();
    check_modes(n, modes)?;
    let mut sign = vec![1.0; 2 * n];
    for &m in modes {
        sign[n + m] = -1.0;
    }
    let m = g.cm().matrix();
    Ok(SymMatrix::symmetrized(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        sign[i] * sign[j] * m[(i, j)]
    })))
}

/// Plain-text matrix format: a line with the dimension, then one line per
/// row of space-separated decimals. Values use the shortest representation
/// that parses back to the same `f64`.
pub fn format_matrix_text(m: &SymMatrix) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Inverse of [`format_matrix_text`]. The matrix must be symmetric to a
/// relative `1e-9` and of even dimension.
pub fn parse_matrix_text(text: &str) -> Result<SymMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
    let dim: usize = header
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension line '{header}'")))?;
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::Parse(format!("dimension {dim} is not a positive even number")));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {dim} rows, found {row}")))?;
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{tok}' in row {row}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != dim {
            return Err(Error::Parse(format!(
                "row {row} has {} entries, expected {dim}",
                values.len()
            )));
        }
        data.extend(values);
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing data after matrix".into()));
    }
    let m = DMatrix::from_row_slice(dim, dim, &data);
    let scale = m.amax().max(1.0);
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-9 * scale {
        return Err(Error::Parse(format!("matrix is not symmetric (deviation {asym:e})")));
    }
    SymMatrix::new(m)
}
