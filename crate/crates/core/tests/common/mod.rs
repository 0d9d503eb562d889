#![allow(dead_code)]

use gmps::{GaussianState, SymMatrix};
use nalgebra::DMatrix;
use rand::Rng;

/// Rotation in phase space of one mode (q-then-p ordering).
pub fn phase_rotation(n: usize, mode: usize, phi: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (c, sn) = (phi.cos(), phi.sin());
    let (q, p) = (mode, mode + n);
    s[(q, q)] = c;
    s[(q, p)] = sn;
    s[(p, q)] = -sn;
    s[(p, p)] = c;
    s
}

pub fn beam_splitter(n: usize, a: usize, b: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (c, sn) = (theta.cos(), theta.sin());
    for off in [0, n] {
        let (i, j) = (a + off, b + off);
        s[(i, i)] = c;
        s[(i, j)] = sn;
        s[(j, i)] = -sn;
        s[(j, j)] = c;
    }
    s
}

pub fn squeezer(n: usize, mode: usize, r: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    s[(mode, mode)] = (-r).exp();
    s[(mode + n, mode + n)] = r.exp();
    s
}

/// A product of random passive and squeezing layers.
pub fn random_symplectic<R: Rng>(rng: &mut R, n: usize, max_r: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for _ in 0..3 {
        for m in 0..n {
            s = phase_rotation(n, m, rng.gen_range(0.0..std::f64::consts::TAU)) * s;
            s = squeezer(n, m, rng.gen_range(-max_r..max_r)) * s;
        }
        for a in 0..n {
            for b in (a + 1)..n {
                s = beam_splitter(n, a, b, rng.gen_range(0.0..std::f64::consts::PI)) * s;
            }
        }
    }
    s
}

pub fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, i + n)] = 1.0;
        w[(i + n, i)] = -1.0;
    }
    w
}

/// `S diag(ν, ν) Sᵀ` with ν drawn from `[1, max_nu]`.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, max_r: f64, max_nu: f64) -> GaussianState {
    let s = random_symplectic(rng, n, max_r);
    let nu: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..max_nu)).collect();
    let diag: Vec<f64> = nu.iter().chain(nu.iter()).copied().collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    GaussianState::new(SymMatrix::new(&s * d * s.transpose()).unwrap()).unwrap()
}

/// Random symmetric positive-definite matrix with eigenvalues in `[1, 1 + dim]`.
pub fn random_spd<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    &g * g.transpose() / (dim as f64) + DMatrix::identity(dim, dim)
}

/// Orthogonal projector onto a random `rank`-dimensional subspace.
pub fn random_projector<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DMatrix<f64> {
    if rank == 0 {
        return DMatrix::zeros(dim, dim);
    }
    let g = DMatrix::from_fn(dim, rank, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let p = &q * q.transpose();
    (&p + p.transpose()) * 0.5
}

/// `A − B M⁻¹ Bᵀ` by LU, independent of the library's Schur routines.
pub fn plain_schur(a: &DMatrix<f64>, b: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let x = m.clone().lu().solve(&b.transpose()).unwrap();
    a - b * x
}

/// Mode permutation `k → (k + shift) mod n` applied to an `n`-mode CM.
pub fn cyclic_shift(m: &DMatrix<f64>, n: usize, shift: usize) -> DMatrix<f64> {
    let idx = |i: usize| {
        let (block, k) = (i / n, i % n);
        block * n + (k + shift) % n
    };
    DMatrix::from_fn(2 * n, 2 * n, |i, j| m[(idx(i), idx(j))])
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Degree-8 polynomial whose admissible root is the separation-2 threshold of a six-site ring.
pub fn s2_polynomial(s: f64, x: f64) -> (f64, f64) {
    let (s2, x2) = (s * s, x * x);
    let lead = 72.0 * s2.powi(4);
    let value = lead - 12.0 * (x2 + 1.0) * s2.powi(3)
        + (-34.0 * x2 * x2 + 28.0 * x2 - 34.0) * s2 * s2
        + (x2.powi(3) - 5.0 * x2 * x2 - 5.0 * x2 + 1.0) * s2
        + (x2 - 1.0).powi(2) * (x2 * x2 - 6.0 * x2 + 1.0);
    (value, lead)
}

/// Absolute largest entry of `a − b`.
pub fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
