use std::f64::consts::{FRAC_PI_2, PI};

use condcap::capforms::{cap_disk_by_perimeter, cap_hyp_disk, cap_segment, gamma2, tau2};
use condcap::hypgeom::{circle_perimeter_hyp, rho_disk};
use condcap::quadmod::{qm, qm_reciprocal_pair, qm_symmetry_pair};
use condcap::quadrature::adaptive;
use condcap::specfun::{asn, complement, ell_k, hyp2f1, mu, mu_inv, sncndn, theta23, theta4};
use condcap::ComplexPoint;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn disk_point() -> impl Strategy<Value = ComplexPoint> {
    (0.0..0.95f64, 0.0..(2.0 * PI)).prop_map(|(r, a)| ComplexPoint::from_polar(r, a))
}

fn convex(v: &[ComplexPoint]) -> bool {
    let n = v.len();
    (0..n).all(|i| {
        let a = v[(i + 1) % n] - v[i];
        let b = v[(i + 2) % n] - v[(i + 1) % n];
        (a.conj() * b).im > 1e-3 * a.norm() * b.norm()
    })
}

fn quadrilateral() -> impl Strategy<Value = (ComplexPoint, ComplexPoint)> {
    (0.4..2.5f64, 0.2..2.5f64, -1.5..0.6f64, 0.2..2.5f64)
        .prop_map(|(ax, ay, bx, by)| (ComplexPoint::new(ax, ay), ComplexPoint::new(bx, by)))
        .prop_filter("convex", |&(a, b)| {
            convex(&[ComplexPoint::new(0.0, 0.0), ComplexPoint::new(1.0, 0.0), a, b])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mu_complement_product(r in 1e-6..(1.0 - 1e-6f64)) {
        let p = mu(r).unwrap() * mu(complement(r)).unwrap();
        prop_assert!(rel(p, PI * PI / 4.0) < 1e-12);
    }

    #[test]
    fn mu_landen(r in 1e-4..0.999f64) {
        let lhs = mu(2.0 * r.sqrt() / (1.0 + r)).unwrap();
        prop_assert!(rel(lhs, 0.5 * mu(r).unwrap()) < 1e-11);
    }

    #[test]
    fn mu_inverse_round_trip(r in 1e-3..0.999f64) {
        let back = mu_inv(mu(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() < 1e-12);
    }

    #[test]
    fn elliptic_k_agm_matches_quadrature(k in 0.0..0.99f64) {
        let direct = adaptive(|t| 1.0 / (1.0 - (k * t.sin()).powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-13).unwrap();
        prop_assert!(rel(ell_k(k).unwrap(), direct) < 1e-11);
    }

    #[test]
    fn asn_inverts_sn(k in 0.01..0.99f64, frac in 0.01..0.99f64) {
        let u = frac * ell_k(k).unwrap();
        let (sn, _, _) = sncndn(u, k, complement(k));
        prop_assert!((asn(sn, k).unwrap() - u).abs() < 1e-9);
    }

    #[test]
    fn sn_pythagorean(k in 0.01..0.99f64, u in 0.0..3.0f64) {
        let (sn, cn, dn) = sncndn(u, k, complement(k));
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((k * k * sn * sn + dn * dn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_quartic_identity(q in 0.001..0.9f64) {
        let p = theta23(q).unwrap();
        let t4 = theta4(q).unwrap();
        prop_assert!(rel(p.theta3.powi(4), p.theta2.powi(4) + t4.powi(4)) < 1e-12);
    }

    #[test]
    fn rho_invariant_under_disk_automorphisms(x in disk_point(), y in disk_point(), a in disk_point(), alpha in 0.0..(2.0 * PI)) {
        let rot = ComplexPoint::from_polar(1.0, alpha);
        let phi = |z: ComplexPoint| rot * (z - a) / (1.0 - a.conj() * z);
        let d0 = rho_disk(x, y).unwrap();
        let d1 = rho_disk(phi(x), phi(y)).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-8 * (1.0 + d0));
    }

    #[test]
    fn euler_transformation(a in -2.0..2.0f64, b in -2.0..2.0f64, c in 0.6..3.0f64, z in -0.9..0.9f64) {
        let lhs = hyp2f1(a, b, c, z).unwrap();
        let rhs = (1.0 - z).powf(c - a - b) * hyp2f1(c - a, c - b, c, z).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn hyp2f1_continuous_across_half(a in 0.1..1.5f64, b in 0.1..1.5f64, c in 0.6..3.0f64) {
        let lo = hyp2f1(a, b, c, 0.5 - 1e-9).unwrap();
        let hi = hyp2f1(a, b, c, 0.5 + 1e-9).unwrap();
        prop_assert!((lo - hi).abs() < 1e-7 * lo.abs());
    }

    #[test]
    fn disk_capacity_forms_agree(r in 0.05..5.0f64) {
        let by_p = cap_disk_by_perimeter(circle_perimeter_hyp(r)).unwrap();
        prop_assert!(rel(by_p, cap_hyp_disk(r).unwrap()) < 1e-11);
    }

    #[test]
    fn teichmuller_from_grotzsch(s in 0.01..100.0f64) {
        prop_assert!(rel(tau2(s).unwrap(), 0.5 * gamma2((s + 1.0).sqrt()).unwrap()) < 1e-12);
    }

    #[test]
    fn capacities_increase_with_size(r in 0.01..0.9f64, dr in 0.001..0.09f64) {
        prop_assert!(cap_segment(r + dr).unwrap() > cap_segment(r).unwrap());
        prop_assert!(cap_hyp_disk(10.0 * (r + dr)).unwrap() > cap_hyp_disk(10.0 * r).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrilateral_reciprocal_identity((a, b) in quadrilateral()) {
        let (ra, rb) = qm_reciprocal_pair(a, b);
        let p = qm(a, b).unwrap() * qm(ra, rb).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-9, "product {}", p);
    }

    #[test]
    fn quadrilateral_mirror_symmetry((a, b) in quadrilateral()) {
        let (sa, sb) = qm_symmetry_pair(a, b);
        prop_assert!(rel(qm(a, b).unwrap(), qm(sa, sb).unwrap()) < 1e-9);
    }
}
