use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use halphen_core::connections::{
    affine_curvature, bergman_a_period, bergman_kernel, e2_affine_check, klein_bidifferential,
    klein_invariant_connection, serre_derivative, wirtinger_connection, MapJet, Sl2z,
};
use halphen_core::dynamics::{
    chazy_rhs, cubic_roots, halphen_rhs, hamiltonian_f, hamiltonian_lift, integrate, lifted_flow,
    lifted_rhs, poisson_bracket, ramanujan_rhs, rescaled_rhs, root_curve, root_curve_with_labels,
    substitution_s5, symmetric_halphen_rhs, IntegratorConfig,
};
use halphen_core::elliptic::{
    elliptic_constants, half_periods, jacobi_theta, log_theta_second, theta_char,
    theta_constant_log_second, wp, wp_prime, ThetaChar, DEFAULT_TOL,
};
use halphen_core::frobenius::{gamma_data, FlatPoint, Frobenius};
use halphen_core::qseries::{eisenstein, rat, sigma, QSeries};
use halphen_core::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ints(v: &[i64]) -> QSeries {
    QSeries::from_integers(v.len() - 1, v)
}

mod qseries {
    use super::*;

    #[test]
    fn divisor_power_sums() {
        assert_eq!(sigma(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(sigma(1, 6).unwrap(), BigInt::from(12));
        assert_eq!(sigma(3, 2).unwrap(), BigInt::from(9));
        assert!(sigma(1, 0).is_err());
    }

    #[test]
    fn eisenstein_heads() {
        assert_eq!(eisenstein(2, 2).unwrap(), ints(&[1, -24, -72]));
        assert_eq!(eisenstein(4, 1).unwrap(), ints(&[1, 240]));
        assert_eq!(eisenstein(6, 0).unwrap(), ints(&[1]));
        assert!(matches!(eisenstein(3, 4), Err(Error::UnsupportedWeight(3))));
    }

    #[test]
    fn ring_operations() {
        assert_eq!(&ints(&[1, 1, 0]) * &ints(&[1, -1, 0]), ints(&[1, 0, -1]));
        let e2 = eisenstein(2, 8).unwrap();
        assert!(e2.scale(&rat(0, 1)).is_zero());
        let e4 = eisenstein(4, 8).unwrap();
        assert!((&e4 + &(-&e4)).is_zero());
    }

    #[test]
    fn derivation() {
        assert_eq!(eisenstein(2, 2).unwrap().derive(), ints(&[0, -24, -144]));
        assert!(QSeries::one(5).derive().is_zero());
        let q = QSeries::monomial(1, 4);
        assert_eq!(q.derive().derive(), q);
    }

    #[test]
    fn evaluation() {
        assert_eq!(QSeries::one(10).eval(c(0.3, 0.7)).unwrap().value, c(1.0, 0.0));
        let tau = c(0.0, 2.0);
        let lo = eisenstein(4, 40).unwrap().eval(tau).unwrap().value;
        let hi = eisenstein(4, 80).unwrap().eval(tau).unwrap().value;
        assert!((lo - hi).norm() < 1e-12);
        assert!(eisenstein(4, 10).unwrap().eval(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn evaluated_e2_obeys_ramanujan() {
        let tau = c(0.0, 1.0);
        let e2 = eisenstein(2, 40).unwrap();
        let e4 = eisenstein(4, 40).unwrap();
        let f = |t: Complex64| e2.eval(t).unwrap().value;
        let central = |h: f64| (f(tau + h) - f(tau - h)) / (2.0 * h);
        let d = (4.0 * central(5e-5) - central(1e-4)) / 3.0;
        let v2 = f(tau);
        let expected = c(0.0, 2.0 * PI) * (v2 * v2 - e4.eval(tau).unwrap().value) / 12.0;
        assert!((d - expected).norm() < 1e-8, "{d} vs {expected}");
    }
}

mod elliptic {
    use super::*;

    #[test]
    fn theta_values() {
        let tau = c(0.0, 2.0);
        let odd = ThetaChar::new(1, 1).unwrap();
        assert!(theta_char(odd, c(0.0, 0.0), tau, DEFAULT_TOL).unwrap().norm() < 1e-15);
        let t00 = theta_char(ThetaChar::new(0, 0).unwrap(), c(0.0, 0.0), tau, DEFAULT_TOL).unwrap();
        assert!((t00 - jacobi_theta(3, c(0.0, 0.0), tau).unwrap()).norm() < 1e-14);
        assert!(jacobi_theta(4, c(0.0, 0.0), tau).unwrap().norm() < 1e-15);
        assert!(jacobi_theta(1, c(0.0, 0.0), c(0.0, 1.0)).unwrap().norm() > 0.1);
        assert!(ThetaChar::new(2, 0).is_err());
    }

    #[test]
    fn wp_near_the_origin() {
        let tau = c(0.1, 1.2);
        let u = c(1e-3, 0.0);
        let p = wp(u, tau, DEFAULT_TOL).unwrap();
        assert!((p - 1.0 / (u * u)).norm() < 1e-2);
        assert!(wp(c(1.0, 0.0), tau, DEFAULT_TOL).is_err());
    }

    #[test]
    fn wp_prime_vanishes_at_half_periods() {
        let tau = c(0.3, 1.1);
        for w in half_periods(tau) {
            assert!(wp_prime(w, tau, DEFAULT_TOL).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn constants() {
        let tau = c(0.2, 1.3);
        let ec = elliptic_constants(tau).unwrap();
        assert!(ec.e_sum().norm() < 1e-10);
        for e in ec.e {
            assert!(ec.cubic(e).norm() < 1e-8);
        }
        let [e1, e2, e3] = ec.e;
        assert!((ec.g2 + 4.0 * (e1 * e2 + e1 * e3 + e2 * e3)).norm() < 1e-8);
        assert!((ec.g3 - 4.0 * e1 * e2 * e3).norm() < 1e-8);
        // omega_1 = 1/2, so eta_1 / omega_1 = 2 eta_1.
        let e2v = eisenstein(2, 64).unwrap().eval(tau).unwrap().value;
        assert!((2.0 * ec.eta1 - PI * PI * e2v / 3.0).norm() < 1e-9);
    }

    #[test]
    fn shifted_wp_from_even_thetas() {
        let tau = c(0.15, 1.05);
        let eta1 = elliptic_constants(tau).unwrap().eta1;
        let pairs = [(ThetaChar::new(1, 0).unwrap(), 0), (ThetaChar::new(0, 1).unwrap(), 1), (ThetaChar::new(0, 0).unwrap(), 2)];
        let u = c(0.11, 0.07);
        for (ch, k) in pairs {
            let lhs = wp(u + half_periods(tau)[k], tau, DEFAULT_TOL).unwrap();
            let rhs = -2.0 * eta1 - log_theta_second(ch, u, tau, DEFAULT_TOL).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{ch}: {lhs} vs {rhs}");
        }
    }
}

mod dynamics {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn fixed_points() {
        let one = [q(1, 1), q(1, 1), q(1, 1)];
        assert_eq!(ramanujan_rhs(&one), [q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(rescaled_rhs(&[q(1, 1), q(12, 1), q(8, 1)]), [q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(chazy_rhs(&[q(0, 1), q(0, 1), q(0, 1)]), [q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(halphen_rhs(&[q(3, 2), q(3, 2), q(3, 2)]), [q(-9, 4), q(-9, 4), q(-9, 4)]);
    }

    #[test]
    fn symmetric_form_under_doubling() {
        let n = [q(2, 3), q(-5, 7), q(11, 2)];
        let x = n.clone().map(|v| v * q(-2, 1));
        let expected = halphen_rhs(&n).map(|v| v * q(-2, 1));
        assert_eq!(symmetric_halphen_rhs(&x), expected);
    }

    #[test]
    fn chazy_third_slot_matches_series() {
        let g = gamma_data(c(0.0, 2.0), 64).unwrap().g;
        let rhs = chazy_rhs(&[g[0], g[1], g[2]]);
        assert!((rhs[2] - g[3]).norm() < 1e-7);
    }

    #[test]
    fn contact_hamiltonian_values() {
        assert_eq!(hamiltonian_f(&[q(0, 1), q(0, 1), q(0, 1), q(5, 3)]), q(0, 1));
        assert_eq!(hamiltonian_f(&[q(1, 1), q(1, 1), q(0, 1), q(1, 1)]), q(23, 48));
        assert_eq!(hamiltonian_f(&[q(1, 1), q(1, 1), q(1, 1), q(1, 1)]), q(167, 48));
    }

    #[test]
    fn lifted_field_on_the_axis() {
        let (y, z, l) = (q(3, 2), q(-1, 3), q(2, 1));
        let l9 = q(512, 1);
        let out = lifted_rhs(&[q(0, 1), y.clone(), z.clone(), l]).unwrap();
        assert_eq!(
            out,
            [-(l9.clone() * y.clone() / q(24, 1)), q(-3, 1) * z, -(l9 * y.clone() * y / q(6, 1)), q(0, 1)]
        );
        assert!(matches!(lifted_rhs(&[q(1, 1), q(1, 1), q(1, 1), q(0, 1)]), Err(Error::ZeroLambda)));
    }

    #[test]
    fn zero_field_is_constant() {
        let y0 = [c(1.0, 2.0), c(-3.0, 0.5)];
        let traj = integrate(|_| Ok(vec![c(0.0, 0.0); 2]), &y0, &[c(0.0, 0.0), c(5.0, 1.0)], &IntegratorConfig::default())
            .unwrap();
        assert_eq!(traj.end_state(), &y0);
        assert_eq!(traj.rejected, 0);
        let single = integrate(|_| Ok(vec![c(0.0, 0.0); 2]), &y0, &[c(1.0, 0.0)], &IntegratorConfig::default()).unwrap();
        assert_eq!(single.samples.len(), 1);
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = cubic_roots(c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0)).unwrap();
        for r in roots {
            assert!((r * r * r - 1.0).norm() < 1e-12);
        }
        assert!((roots[0] - roots[1]).norm() > 1.0);
    }

    #[test]
    fn roots_at_two_i_back_substitute() {
        let g = gamma_data(c(0.0, 2.0), 64).unwrap().g;
        let scale = [1.5 * g[0], 1.5 * g[1], 0.25 * g[2]].iter().map(|z| z.norm()).fold(1.0, f64::max);
        for n in cubic_roots(g[0], g[1], g[2]).unwrap() {
            let v = n * n * n + 1.5 * g[0] * n * n + 1.5 * g[1] * n + 0.25 * g[2];
            assert!(v.norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn root_curves() {
        let tau = c(0.1, 1.5);
        let flat = root_curve(&[tau; 4], 64).unwrap();
        assert!(flat.roots.windows(2).all(|w| w[0] == w[1]));
        let path: Vec<Complex64> = (0..5).map(|k| tau + c(0.01 * k as f64, 0.0)).collect();
        let base = root_curve(&path, 64).unwrap();
        let shuffled = root_curve_with_labels(&path, 64, [2, 0, 1]).unwrap();
        for (a, b) in base.roots.iter().zip(&shuffled.roots) {
            assert_eq!([a[2], a[0], a[1]], *b);
        }
    }

    #[test]
    fn substitution_on_the_diagonal() {
        let v = c(0.7, -0.2);
        let out = substitution_s5(&[v, v, v]);
        assert!((out[0] - v).norm() < 1e-15 && out[1].norm() < 1e-15 && out[2].norm() < 1e-15);
    }

    #[test]
    fn brackets() {
        let p = [c(0.3, 0.1), c(-0.2, 0.4), c(0.5, 0.0), c(0.1, -0.3)];
        let f = |x: &[Complex64]| x[0] * x[1] + x[2] * x[3] * x[3];
        assert!(poisson_bracket(&f, &f, &p).norm() < 1e-9);
        let x1 = |x: &[Complex64]| x[0];
        let y1 = |x: &[Complex64]| x[2];
        assert!((poisson_bracket(&x1, &y1, &p) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn lifts() {
        let zero = hamiltonian_lift(|x: &[Complex64]| vec![c(0.0, 0.0); x.len()]);
        assert_eq!(zero(&[c(1.0, 2.0), c(3.0, 4.0)]), c(0.0, 0.0));
        let identity = hamiltonian_lift(|x: &[Complex64]| x.to_vec());
        let flow = lifted_flow(&identity, &[c(0.4, 0.2), c(1.0, 0.0)]);
        assert!((flow[0] - c(0.4, 0.2)).norm() < 1e-9);
        let halphen = hamiltonian_lift(|x: &[Complex64]| halphen_rhs(&[x[0], x[1], x[2]]).to_vec());
        let n = [c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4)];
        let point = [n[0], n[1], n[2], c(0.2, 0.0), c(-0.1, 0.3), c(0.5, 0.5)];
        let flow = lifted_flow(&halphen, &point);
        let expected = halphen_rhs(&n);
        for k in 0..3 {
            assert!((flow[k] - expected[k]).norm() < 1e-8);
        }
    }
}

mod frobenius {
    use super::*;

    #[test]
    fn gamma_properties() {
        let t = c(0.0, 2.0);
        assert!(gamma_data(t, 64).unwrap().chazy_residual().norm() < 1e-8);
        let shifted = gamma_data(t + 1.0, 64).unwrap().g[0];
        assert!((shifted - gamma_data(t, 64).unwrap().g[0]).norm() < 1e-10);
        let (lo, hi) = (gamma_data(t, 40).unwrap().g, gamma_data(t, 80).unwrap().g);
        for k in 0..4 {
            assert!((lo[k] - hi[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn potential_and_structure_constants() {
        let model = Frobenius::new(64).unwrap();
        let (t1, t3) = (c(0.3, -0.2), c(0.1, 1.4));
        let p0 = FlatPoint::new(t1, c(0.0, 0.0), t3).unwrap();
        assert!((model.potential(&p0).unwrap() - 0.5 * t1 * t1 * t3).norm() < 1e-15);
        let p = FlatPoint::new(t1, c(0.8, 0.3), t3).unwrap();
        let st = model.structure_constants(&p).unwrap();
        let one = c(1.0, 0.0);
        assert_eq!(st.get(1, 1, 2), one);
        assert_eq!(st.get(0, 2, 2), one);
        assert_eq!(st.get(0, 1, 1), one);
        let g1 = model.gamma(t3).unwrap().g[1];
        assert!((st.get(1, 1, 0) + 0.75 * p.t2 * p.t2 * g1).norm() < 1e-15);
        let at_2i = FlatPoint::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!(model.associativity_residual(&at_2i).unwrap() < 1e-8);
        assert!(FlatPoint::new(t1, t1, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn intersection_form_entries() {
        let model = Frobenius::new(64).unwrap();
        let p = FlatPoint::new(c(0.3, 0.4), c(-0.6, 0.2), c(0.0, 1.2)).unwrap();
        let g = model.intersection_form(&p).unwrap();
        assert_eq!(g[(2, 2)], c(0.0, 0.0));
        assert_eq!(g[(0, 2)], p.t1);
        assert_eq!(g[(1, 2)], 0.5 * p.t2);
        assert_eq!(g, g.transpose());
    }

    #[test]
    fn char_poly_without_t2() {
        let model = Frobenius::new(64).unwrap();
        let t1 = c(0.7, -0.1);
        let cp = model.char_poly(&FlatPoint::new(t1, c(0.0, 0.0), c(0.0, 1.0)).unwrap()).unwrap();
        let expected = [-t1 * t1 * t1, 3.0 * t1 * t1, -3.0 * t1, c(1.0, 0.0)];
        for k in 0..4 {
            assert!((cp.coeffs[k] - expected[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_coordinates() {
        let model = Frobenius::new(64).unwrap();
        let (t1, t2, t3) = (c(0.2, 0.1), c(0.9, -0.4), c(0.05, 1.3));
        let p = FlatPoint::new(t1, t2, t3).unwrap();
        let cp = model.canonical_coords(&p).unwrap();
        let g0 = model.gamma(t3).unwrap().g[0];
        let sum: Complex64 = cp.u.iter().sum();
        assert!((sum - (3.0 * t1 - 0.75 * t2 * t2 * g0)).norm() < 1e-10);
        let poly = model.char_poly(&p).unwrap();
        for u in cp.u {
            assert!(poly.eval(u).norm() < 1e-10 * poly.scale_at(u));
        }
        // u_k - t1 = t2^2 N_k / 2 shrinks quadratically as t2 -> 0.
        for small in [1e-2, 1e-3] {
            let near = model.canonical_coords(&FlatPoint::new(t1, c(small, 0.0), t3).unwrap()).unwrap();
            let bound = small * small * near.roots.iter().map(|n| n.norm()).fold(0.0, f64::max);
            assert!(near.u.iter().all(|u| (u - t1).norm() <= bound));
        }
        let collapsed = FlatPoint::new(t1, c(0.0, 0.0), t3).unwrap();
        assert!(matches!(model.canonical_coords(&collapsed), Err(Error::CoalescingCoordinates(_))));
    }

    #[test]
    fn change_of_basis() {
        let model = Frobenius::new(64).unwrap();
        let p = FlatPoint::new(c(0.2, 0.1), c(0.9, -0.4), c(0.05, 1.3)).unwrap();
        let cb = model.change_of_basis(&p).unwrap();
        assert!(cb.oracle_deviation < 1e-6);
        assert!((cb.matrix - cb.jacobian_inverse).norm() < 1e-10 * cb.matrix.norm());
        // d/dt1 = sum_i d/du_i.
        for a in 0..3 {
            let col: Complex64 = (0..3).map(|i| cb.matrix[(i, a)]).sum();
            let expected = if a == 0 { 1.0 } else { 0.0 };
            assert!((col - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn omega_system() {
        let model = Frobenius::new(64).unwrap();
        let r = model.omega_residuals(c(0.1, 1.1)).unwrap();
        assert!(r.identity < 1e-7);
        assert!(r.max_corrected() < 1e-6);
        assert!(r.literal_first > 1e-3);
        let path: Vec<Complex64> = (0..6).map(|k| c(0.1 + 0.02 * k as f64, 1.1)).collect();
        let states = model.omega_path(&path).unwrap();
        assert_eq!(states.states.len(), 6);
    }
}

mod connections {
    use super::*;

    #[test]
    fn brackets_of_special_maps() {
        let t = c(0.2, 0.1);
        let affine = MapJet::from_fn(|z| 3.0 * z - 1.0, t, 0.5);
        assert!(affine.bracket1().unwrap().norm() < 1e-12);
        assert!(affine.schwarzian().unwrap().norm() < 1e-12);
        let mobius = MapJet::from_fn(|z| (2.0 * z + 1.0) / (z + 3.0), t, 0.5);
        assert!(mobius.schwarzian().unwrap().norm() < 1e-7);
        let flat = MapJet::new(t, c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(flat.schwarzian(), Err(Error::VanishingDerivative(_))));
    }

    #[test]
    fn e2_functional_equation() {
        let tau = c(0.0, 2.0);
        assert_eq!(e2_affine_check(Sl2z::IDENTITY, tau).unwrap(), 0.0);
        assert!(e2_affine_check(Sl2z::T, tau).unwrap() < 1e-10);
        assert!(e2_affine_check(Sl2z::S, tau).unwrap() < 1e-8);
        assert!(matches!(Sl2z::new(1, 1, 1, 1), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn curvature_value() {
        let tau = c(0.0, 2.0);
        let value = affine_curvature(tau, 64).unwrap();
        let e4 = eisenstein(4, 64).unwrap().eval(tau).unwrap().value;
        assert!((value - PI * PI / 18.0 * e4).norm() < 1e-9);
    }

    #[test]
    fn serre_derivatives() {
        let e4 = eisenstein(4, 32).unwrap();
        let e6 = eisenstein(6, 32).unwrap();
        assert_eq!(serre_derivative(2, &e4).unwrap(), e6.scale(&rat(-1, 3)));
        assert_eq!(serre_derivative(3, &e6).unwrap(), (&e4 * &e4).scale(&rat(-1, 2)));
        assert!(serre_derivative(0, &QSeries::one(32)).unwrap().is_zero());
    }

    #[test]
    fn bergman_kernel_properties() {
        let tau = c(0.0, 2.0);
        let u = c(0.2, 0.3);
        let near = bergman_kernel(u, u - 1e-3, tau).unwrap().value;
        assert!((near * 1e-6 - 1.0).norm() < 1e-4);
        assert!(bergman_a_period(c(0.1, 0.2), 0.1, tau).unwrap().norm() < 1e-6);
        let (a, b) = (bergman_kernel(u, c(-0.3, 0.7), tau).unwrap(), bergman_kernel(c(-0.3, 0.7), u, tau).unwrap());
        assert!((a.value - b.value).norm() < 1e-10);
        assert!(bergman_kernel(u, u, tau).is_err());
    }

    #[test]
    fn klein_bidifferentials() {
        let tau = c(0.1, 1.3);
        let ch = ThetaChar::new(0, 1).unwrap();
        let eps = c(1e-3, 0.0);
        let h = |u: Complex64| klein_bidifferential(ch, u + eps, u, tau).unwrap().regular;
        assert!((h(c(0.1, 0.2)) - h(c(-0.4, 0.6))).norm() < 1e-8);
        assert!(klein_bidifferential(ThetaChar::new(1, 1).unwrap(), c(0.1, 0.0), c(0.2, 0.0), tau).is_err());
        let (u, v) = (c(0.1, 0.2), c(0.3, -0.1));
        let (a, b) = (klein_bidifferential(ch, u, v, tau).unwrap(), klein_bidifferential(ch, v, u, tau).unwrap());
        assert!((a.value - b.value).norm() < 1e-10);
    }

    #[test]
    fn wirtinger_and_klein_connections() {
        let tau = c(0.0, 2.0);
        let sum: Complex64 =
            ThetaChar::EVEN.iter().map(|&ch| wirtinger_connection(ch, tau).unwrap()).sum();
        assert!(sum.norm() < 3e-8);
        assert!(klein_invariant_connection(tau).unwrap().norm() < 1e-7);
        let shifted = klein_invariant_connection(tau + 1.0).unwrap();
        assert!(shifted.norm() < 1e-8);
        let avg: Complex64 =
            ThetaChar::EVEN.iter().map(|&ch| theta_constant_log_second(ch, tau, DEFAULT_TOL).unwrap()).sum::<Complex64>() / 3.0;
        let eta1 = elliptic_constants(tau).unwrap().eta1;
        assert!((avg + 2.0 * eta1).norm() < 1e-8);
        assert!(wirtinger_connection(ThetaChar::new(1, 1).unwrap(), tau).is_err());
    }
}
