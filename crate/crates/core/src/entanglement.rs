//! Bipartite entanglement of ring states: PPT eigenvalues, entanglement of
//! formation, block entropies, pair tables and entanglement thresholds.

use crate::error::{Error, Result};
use crate::mps::{build_mps, RingSpec};
use crate::states::{partial_transpose, reduce, BondSpec, BuildingBlockParams, GaussianState};
use crate::symplectic::symplectic_eigenvalues;

/// A pair counts as entangled when `η < 1 − DECISION_TOL`.
pub const DECISION_TOL: f64 = 1e-9;

/// Symplectic eigenvalues this close to 1 contribute no entropy.
const ENTROPY_FLOOR: f64 = 1e-9;

/// Relative spectral gap of the partial transpose below which [`ppt_eta`]
/// switches from the invariants to a direct eigensolve.
const NEAR_DEGENERATE: f64 = 1e-3;

/// Pairs of equal ring separation must agree on `η` to this tolerance.
const RING_SYMMETRY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementRecord {
    pub i: usize,
    pub j: usize,
    /// Distance on the ring, `min(|i − j|, N − |i − j|)`.
    pub separation: usize,
    /// Smallest symplectic eigenvalue of the partially transposed pair.
    pub eta: f64,
    /// Entanglement of formation in ebits.
    pub eof: f64,
    pub entangled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub k: usize,
    pub x: f64,
    pub n_sites: usize,
    pub bond: BondSpec,
    pub s_k: f64,
    pub bracket: (f64, f64),
    /// `|η − 1|` at `s_k`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    /// Final bracket width.
    pub width: f64,
    /// Upper limit of the search in `s`.
    pub s_cap: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { width: 1e-8, s_cap: 1e6 }
    }
}

/// Bond squeezing in decibels under two conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingDb {
    /// `10·log₁₀(e^{2r})`, the quadrature-variance ratio.
    pub variance_db: f64,
    /// `10·log₁₀(cosh 2r)`.
    pub cosh_db: f64,
}

pub fn ring_separation(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j) % n;
    d.min(n - d)
}

fn two_mode(g: &GaussianState) -> Result<()> {
    if g.n_modes() != 2 {
        return Err(Error::WrongModeCount { expected: 2, found: g.n_modes() });
    }
    Ok(())
}

/// Smallest PPT symplectic eigenvalue of a two-mode state, from the
/// invariants `Δ̃ = det A + det B − 2 det C` and `det γ`.
pub fn ppt_eta(g: &GaussianState) -> Result<f64> {
    two_mode(g)?;
    let m = g.cm();
    // ordering (q0, q1, p0, p1): A on {0, 2}, B on {1, 3}, C rows {0, 2} x cols {1, 3}
    let det_a = m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)];
    let det_b = m[(1, 1)] * m[(3, 3)] - m[(1, 3)] * m[(3, 1)];
    let det_c = m[(0, 1)] * m[(2, 3)] - m[(0, 3)] * m[(2, 1)];
    let det = g.determinant();
    let delta = det_a + det_b - 2.0 * det_c;
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    // Rounding in Δ̃² − 4 det reaches η through the square root, so a nearly
    // degenerate spectrum (pure states close to η = 1) goes to the eigensolver.
    if disc < NEAR_DEGENERATE * delta {
        return ppt_eta_eigen(g);
    }
    // η² = (Δ̃ − disc)/2 = 2 det / (Δ̃ + disc)
    let denom = delta + disc;
    if !(denom > 0.0) || !(det > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: det.min(denom) });
    }
    Ok((2.0 * det / denom).sqrt())
}

/// [`ppt_eta`] through a full symplectic eigensolve of the partial transpose.
pub fn ppt_eta_eigen(g: &GaussianState) -> Result<f64> {
    two_mode(g)?;
    let pt = partial_transpose(g, &[1])?;
    Ok(symplectic_eigenvalues(&pt)?[0])
}

/// Entanglement of formation of a symmetric two-mode state with PPT
/// eigenvalue `eta`, in ebits.
pub fn eof(eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::NonPositiveEta(eta));
    }
    if eta >= 1.0 {
        return Ok(0.0);
    }
    let xlogx = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };
    let plus = (1.0 + eta).powi(2) / (4.0 * eta);
    let minus = (1.0 - eta).powi(2) / (4.0 * eta);
    Ok((xlogx(plus) - xlogx(minus)).max(0.0))
}

fn entropy_term(nu: f64) -> f64 {
    if nu - 1.0 <= ENTROPY_FLOOR {
        return 0.0;
    }
    let a = 0.5 * (nu + 1.0);
    let b = 0.5 * (nu - 1.0);
    a * a.log2() - b * b.log2()
}

/// Von Neumann entropy (bits) of the marginal on `modes`.
pub fn block_entropy(g: &GaussianState, modes: &[usize]) -> Result<f64> {
    let sub = reduce(g, modes)?;
    Ok(sub.symplectic_eigenvalues()?.into_iter().map(entropy_term).sum())
}

/// `(det γ_mode)^{−1/2}`.
pub fn local_purity(g: &GaussianState, mode: usize) -> Result<f64> {
    let one = reduce(g, &[mode])?;
    Ok(one.determinant().powf(-0.5))
}

pub fn squeezing_db(r: f64) -> Result<SqueezingDb> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Unphysical(format!("squeezing r = {r} is negative")));
    }
    Ok(SqueezingDb {
        variance_db: 20.0 * r / std::f64::consts::LN_10,
        cosh_db: 10.0 * (2.0 * r).cosh().log10(),
    })
}

/// One record per unordered pair of a ring state, sorted by separation and
/// then by `i`.
pub fn distribution(g: &GaussianState) -> Result<Vec<EntanglementRecord>> {
    distribution_with(g, DECISION_TOL)
}

pub fn distribution_with(g: &GaussianState, decision_tol: f64) -> Result<Vec<EntanglementRecord>> {
    let n = g.n_modes();
    let local_det: Vec<f64> = (0..n)
        .map(|m| reduce(g, &[m]).map(|r| r.determinant()))
        .collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            if (local_det[i] - local_det[j]).abs() > 1e-6 * local_det[i].max(1.0) {
                return Err(Error::NotTranslationInvariant(format!(
                    "modes {i} and {j} have different local determinants"
                )));
            }
            let eta = ppt_eta(&reduce(g, &[i, j])?)?;
            let entangled = eta < 1.0 - decision_tol;
            let eof = if entangled { eof(eta)? } else { 0.0 };
            records.push(EntanglementRecord {
                i,
                j,
                separation: ring_separation(i, j, n),
                eta,
                eof,
                entangled,
            });
        }
    }
    records.sort_by_key(|r| (r.separation, r.i, r.j));
    for w in records.windows(2) {
        if w[0].separation == w[1].separation && (w[0].eta - w[1].eta).abs() > RING_SYMMETRY_TOL {
            return Err(Error::NotTranslationInvariant(format!(
                "pairs ({}, {}) and ({}, {}) at separation {} differ in eta by {:e}",
                w[0].i,
                w[0].j,
                w[1].i,
                w[1].j,
                w[0].separation,
                (w[0].eta - w[1].eta).abs()
            )));
        }
    }
    Ok(records)
}

/// First record of each separation class of a sorted distribution.
pub fn by_separation(records: &[EntanglementRecord]) -> Vec<EntanglementRecord> {
    let mut out = records.to_vec();
    out.dedup_by_key(|r| r.separation);
    out
}

/// `η` between mode 0 and mode `k` of the ring built from `spec`.
pub fn pair_eta(spec: &RingSpec, k: usize) -> Result<f64> {
    let ring = build_mps(spec)?;
    ppt_eta(&reduce(&ring, &[0, k])?)
}

pub fn threshold(k: usize, x: f64, n_sites: usize, bond: BondSpec) -> Result<ThresholdResult> {
    threshold_with(k, x, n_sites, bond, ThresholdOptions::default())
}

/// Smallest `s` above which modes at ring separation `k` are entangled,
/// found by bisection on `η(s) = 1 − DECISION_TOL`. `k = 1` returns `s_min`
/// directly.
pub fn threshold_with(
    k: usize,
    x: f64,
    n_sites: usize,
    bond: BondSpec,
    opts: ThresholdOptions,
) -> Result<ThresholdResult> {
    if !(x > 1.0) {
        return Err(Error::Unphysical(format!("thresholds need x > 1, got {x}")));
    }
    if k == 0 || k > n_sites / 2 {
        return Err(Error::InvalidArgument(format!(
            "separation {k} outside 1..={} for {n_sites} sites",
            n_sites / 2
        )));
    }
    let eta_at = |s: f64| -> Result<f64> {
        let spec = RingSpec::new(n_sites, BuildingBlockParams::new(s, x)?, bond)?;
        pair_eta(&spec, k)
    };
    let s_min = BuildingBlockParams::s_min(x);
    let result = |s_k: f64, bracket: (f64, f64), eta: f64| ThresholdResult {
        k,
        x,
        n_sites,
        bond,
        s_k,
        bracket,
        residual: (eta - 1.0).abs(),
    };

    let eta_min = eta_at(s_min)?;
    if k == 1 || eta_min < 1.0 - DECISION_TOL {
        return Ok(result(s_min, (s_min, s_min), eta_min));
    }

    let (mut lo, mut hi) = (s_min, 2.0 * s_min);
    loop {
        if hi > opts.s_cap {
            return Err(Error::NoThreshold { k, x, cap: opts.s_cap });
        }
        if eta_at(hi)? < 1.0 - DECISION_TOL {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > opts.width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eta_at(mid)? < 1.0 - DECISION_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_k = 0.5 * (lo + hi);
    Ok(result(s_k, (lo, hi), eta_at(s_k)?))
}
