mod common;

use gmps::{limit_schur_complement, schur_complement, symplectic_eigenvalues, SymMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;

fn pick(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

proptest! {
    #[test]
    fn constructed_matrices_are_exactly_symmetric(seed in any::<u64>(), dim in 1usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(dim, dim, |_, _| rand::Rng::gen_range(&mut rng, -5.0..5.0));
        let m = SymMatrix::new(raw).unwrap();
        prop_assert_eq!((m.matrix() - m.matrix().transpose()).amax(), 0.0);
    }

    #[test]
    fn random_maps_are_symplectic(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = random_symplectic(&mut rng, n, 0.8);
        let w = omega(n);
        prop_assert!(max_diff(&(&s * &w * s.transpose()), &w) < 1e-10);
    }

    #[test]
    fn symplectic_spectrum_is_invariant(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_state(&mut rng, n, 0.7, 4.0);
        let s = random_symplectic(&mut rng, n, 0.5);
        let moved = SymMatrix::new(&s * g.cm().matrix() * s.transpose()).unwrap();
        let before = symplectic_eigenvalues(g.cm()).unwrap();
        let after = symplectic_eigenvalues(&moved).unwrap();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-9, "{before:?} vs {after:?}");
        }
    }

    #[test]
    fn nested_elimination_matches_single_step(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_state(&mut rng, 5, 0.6, 3.0);
        let once = schur_complement(g.cm(), &[0, 2]).unwrap();
        // drop modes 1 and 3, then (relabelled) mode 2 = original 4
        let first = schur_complement(g.cm(), &[0, 2, 4]).unwrap();
        let twice = schur_complement(&first, &[0, 1]).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-10);
    }

    #[test]
    fn limit_with_zero_projector_is_plain_schur(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_state(&mut rng, n, 0.6, 3.0);
        let keep = [0usize];
        let kq = [0, n];
        let dq: Vec<usize> = (1..n).chain(n + 1..2 * n).collect();
        let m = g.cm().matrix();
        let a = SymMatrix::new(pick(m, &kq, &kq)).unwrap();
        let d = SymMatrix::new(pick(m, &dq, &dq)).unwrap();
        let b = pick(m, &kq, &dq);
        let zero = DMatrix::zeros(dq.len(), dq.len());
        let limit = limit_schur_complement(&a, &b, &d, &zero).unwrap();
        let plain = schur_complement(g.cm(), &keep).unwrap();
        prop_assert_eq!(limit.matrix(), plain.matrix());
    }

    #[test]
    fn limit_matches_large_finite_squeezing(seed in any::<u64>(), na in 1usize..5, nd in 2usize..7) {
        let mut rng = StdRng::seed_from_u64(seed);
        let rank = (seed as usize) % nd;
        let m = random_spd(&mut rng, na + nd);
        let a = m.view((0, 0), (na, na)).into_owned();
        let b = m.view((0, na), (na, nd)).into_owned();
        let d = m.view((na, na), (nd, nd)).into_owned();
        let p = random_projector(&mut rng, nd, rank);
        let limit = limit_schur_complement(
            &SymMatrix::new(a.clone()).unwrap(),
            &b,
            &SymMatrix::new(d.clone()).unwrap(),
            &p,
        )
        .unwrap();
        let finite = plain_schur(&a, &b, &(d + &p * 1e8));
        prop_assert!(max_diff(limit.matrix(), &finite) < 1e-6);
    }
}
