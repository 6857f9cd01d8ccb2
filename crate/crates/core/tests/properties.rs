//! Randomized structural properties of the algebraic layer.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use proptest::prelude::*;

use quadspec::quadform::{poisson_bracket, symplectic_form_matrix};
use quadspec::{singular, spectrum, QuadraticForm, Tolerances};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Symmetric complex matrix with entries in [-2, 2]^2, any n in 1..=3.
fn form_strategy() -> impl Strategy<Value = QuadraticForm> {
    (1usize..=3).prop_flat_map(|n| {
        let d = 2 * n;
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d * d).prop_map(move |entries| {
            let mut m = Array2::from_elem((d, d), c(0.0, 0.0));
            for i in 0..d {
                for j in 0..d {
                    m[[i, j]] = c(entries[i * d + j].0, entries[i * d + j].1);
                }
            }
            QuadraticForm::new(n, m).unwrap()
        })
    })
}

fn mat_scale(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polarization_recovers_the_form(q in form_strategy(), seed in 0u64..1000) {
        let d = q.dim();
        let x: Array1<f64> = Array1::from_iter((0..d).map(|i| ((seed + i as u64) % 7) as f64 - 3.0));
        let xc = x.mapv(|v| c(v, 0.0));
        let via_polar = q.polarized(&xc, &xc).unwrap();
        let direct = q.eval(&xc).unwrap();
        prop_assert!((via_polar - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn jf_is_symmetric(q in form_strategy()) {
        let f = q.hamilton_map();
        let jf = symplectic_form_matrix(q.n()).mapv(|v| c(v, 0.0)).dot(f.matrix());
        let asym = (&jf - &jf.t()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(asym <= 1e-12 * mat_scale(&jf));
    }

    #[test]
    fn bracket_is_antisymmetric(q1 in form_strategy(), q2 in form_strategy()) {
        prop_assume!(q1.n() == q2.n());
        let b12 = poisson_bracket(&q1, &q2).unwrap();
        let b21 = poisson_bracket(&q2, &q1).unwrap();
        let sum = b12.matrix() + b21.matrix();
        let err = sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * mat_scale(b12.matrix()));
    }

    #[test]
    fn bracket_hamilton_map_is_commutator(q1 in form_strategy(), q2 in form_strategy()) {
        prop_assume!(q1.n() == q2.n());
        let lhs = poisson_bracket(&q1, &q2).unwrap().hamilton_map();
        let f1 = q1.hamilton_map();
        let f2 = q2.hamilton_map();
        let comm = f1.matrix().dot(f2.matrix()) - f2.matrix().dot(f1.matrix());
        let rhs = comm.mapv(|z| z * (-2.0));
        let err = (lhs.matrix() - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * mat_scale(&rhs));
    }

    #[test]
    fn composition_is_pullback(q in form_strategy(), seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let r = quadspec::construct::random_symplectic(q.n(), &mut rng).unwrap();
        let qr = q.compose(&r).unwrap();
        let d = q.dim();
        let x: Array1<f64> = Array1::from_iter((0..d).map(|i| ((seed + 3 * i as u64) % 5) as f64 - 2.0));
        let lhs = qr.eval_real(&x).unwrap();
        let rhs = q.eval_real(&r.dot(&x)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn zero_real_part_iff_full_singular_space(q in form_strategy(), purely_imaginary in any::<bool>()) {
        let tol = Tolerances::default();
        let q = if purely_imaginary {
            QuadraticForm::from_parts(q.n(), Array2::zeros((q.dim(), q.dim())), q.im()).unwrap()
        } else {
            q
        };
        let s = singular::compute_singular_space(&q.hamilton_map(), &tol).unwrap();
        let re_zero = q.re().iter().map(|v| v.abs()).fold(0.0, f64::max) <= 1e-14;
        prop_assert_eq!(re_zero, s.d == q.dim());
    }
}

#[test]
fn lattice_grows_monotonically_with_the_window() {
    let tol = Tolerances::default();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in 1..=2 {
        for _ in 0..10 {
            let q = quadspec::construct::random_definite_form(n, -1.0, &mut rng).unwrap();
            let (clusters, _) = spectrum::eigen_clusters(&q.hamilton_map(), &tol).unwrap();
            let gens =
                spectrum::select_generators(&clusters, spectrum::SelectionMode::Q1Only, None, None, &tol)
                    .unwrap();
            let small = spectrum::Rect { re_min: -6.0, im_max: 6.0 };
            let large = spectrum::Rect { re_min: -12.0, im_max: 12.0 };
            let ls = spectrum::enumerate_lattice(&gens, small, &tol).unwrap();
            let ll = spectrum::enumerate_lattice(&gens, large, &tol).unwrap();
            assert!(ls.len() <= ll.len());
            for p in &ls {
                assert!(
                    ll.iter().any(|pp| (pp.value - p.value).norm() <= 1e-9 * (1.0 + p.value.norm())),
                    "point {} lost when enlarging the window",
                    p.value
                );
            }
            // the base point realizes the decay rate
            let rate = spectrum::decay_rate(&gens, &tol);
            let top = ls.first().unwrap();
            assert!((top.value.re + rate).abs() <= 1e-9 * (1.0 + rate));
        }
    }
}
