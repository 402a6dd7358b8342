//! Invariants of the energy law, the field, and the advantage factor,
//! checked over randomized inputs.

use datagravity::advantage::{advantage_lower_bound, AdvantageInputs};
use datagravity::energy::TechProfile;
use datagravity::gravity::{field_at, DataObject, FieldParams};
use datagravity::Vec3;
use proptest::prelude::*;

fn beta_strategy() -> impl Strategy<Value = f64> {
    1.000001..=3.0f64
}

fn positive(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

fn position() -> impl Strategy<Value = Vec3> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn objects(max: usize) -> impl Strategy<Value = Vec<DataObject>> {
    prop::collection::vec(
        (position(), 0.1..100.0f64, 0.1..1e6f64),
        1..=max,
    )
    .prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(i, (pos, entropy, freq))| {
                DataObject::new(format!("o{i}"), pos, entropy, freq).unwrap()
            })
            .collect()
    })
}

// Outside the object cloud, so every distance is well clear of the
// singularity guard.
const FAR_POINT: Vec3 = Vec3 {
    x: 7.0,
    y: 7.5,
    z: 8.0,
};

proptest! {
    #[test]
    fn doubling_bits_doubles_movement_energy(
        e_compute in positive(1e-15, 1e-9),
        alpha in positive(1e-12, 1e-3),
        beta in beta_strategy(),
        bits in positive(1.0, 1e12),
        d in positive(1e-6, 1e3),
    ) {
        let profile = TechProfile::new("p", e_compute, alpha, beta).unwrap();
        let single = profile.movement_energy(bits, d).unwrap();
        let double = profile.movement_energy(2.0 * bits, d).unwrap();
        prop_assert_eq!(double, 2.0 * single);
    }

    #[test]
    fn doubling_distance_scales_by_two_to_beta(
        alpha in positive(1e-12, 1e-3),
        beta in beta_strategy(),
        bits in positive(1.0, 1e12),
        d in positive(1e-6, 1e2),
    ) {
        let profile = TechProfile::new("p", 1e-12, alpha, beta).unwrap();
        let near = profile.movement_energy(bits, d).unwrap();
        let far = profile.movement_energy(bits, 2.0 * d).unwrap();
        let ratio = far / near;
        let expected = 2.0f64.powf(beta);
        prop_assert!(
            (ratio - expected).abs() <= 1e-12 * expected,
            "ratio {} vs 2^beta {}", ratio, expected
        );
    }

    #[test]
    fn balanced_separation_balances_per_access_energies(
        e_compute in positive(1e-15, 1e-9),
        alpha in positive(1e-12, 1e-3),
        beta in beta_strategy(),
    ) {
        let profile = TechProfile::new("p", e_compute, alpha, beta).unwrap();
        let d_star = profile.balanced_separation();
        let movement = profile
            .movement_energy(profile.bits_per_access() as f64, d_star)
            .unwrap();
        prop_assert!(
            (movement - e_compute).abs() <= 1e-9 * e_compute,
            "movement {} vs compute {}", movement, e_compute
        );
    }

    #[test]
    fn field_superposes_over_objects(
        objs in objects(6),
        g_d in positive(1.0, 1e4),
        beta in beta_strategy(),
    ) {
        let params = FieldParams::new(g_d, beta).unwrap();
        let point = FAR_POINT;
        let combined = field_at(&objs, point, &params).unwrap();
        let mut summed = Vec3::ZERO;
        for obj in &objs {
            summed = summed
                + field_at(std::slice::from_ref(obj), point, &params)
                    .unwrap()
                    .field();
        }
        let scale = combined.magnitude().max(summed.norm()).max(1e-300);
        prop_assert!(
            (combined.field() - summed).norm() <= 1e-12 * scale,
            "combined {:?} vs summed {:?}", combined.field(), summed
        );
    }

    #[test]
    fn field_magnitude_follows_the_power_law(
        beta in beta_strategy(),
        mass_entropy in positive(0.1, 100.0),
        d in positive(0.01, 10.0),
    ) {
        let obj = vec![DataObject::new("o", Vec3::ZERO, mass_entropy, 1e3).unwrap()];
        let params = FieldParams::new(100.0, beta).unwrap();
        let near = field_at(&obj, Vec3::new(d, 0.0, 0.0), &params).unwrap();
        let far = field_at(&obj, Vec3::new(2.0 * d, 0.0, 0.0), &params).unwrap();
        let ratio = far.magnitude() / near.magnitude();
        let expected = 2.0f64.powf(-beta);
        prop_assert!(
            (ratio - expected).abs() <= 1e-9 * expected,
            "ratio {} vs 2^-beta {}", ratio, expected
        );
    }

    #[test]
    fn field_rotates_with_the_configuration(
        objs in objects(4),
        g_d in positive(1.0, 1e3),
        beta in beta_strategy(),
    ) {
        // Quarter turn about z: (x, y, z) -> (-y, x, z).
        let rot = |v: Vec3| Vec3::new(-v.y, v.x, v.z);
        let params = FieldParams::new(g_d, beta).unwrap();
        let point = FAR_POINT;
        let plain = field_at(&objs, point, &params).unwrap();
        let rotated_objs: Vec<DataObject> = objs
            .iter()
            .map(|o| {
                DataObject::new(
                    o.id(),
                    rot(o.position()),
                    o.entropy_per_access(),
                    o.access_frequency(),
                )
                .unwrap()
            })
            .collect();
        let rotated = field_at(&rotated_objs, rot(point), &params).unwrap();
        let expected = rot(plain.field());
        let scale = plain.magnitude().max(1e-300);
        prop_assert!(
            (rotated.field() - expected).norm() <= 1e-12 * scale,
            "rotated {:?} vs expected {:?}", rotated.field(), expected
        );
    }

    #[test]
    fn advantage_stays_above_its_bound_inside_the_condition(
        log_gd in 0.0..4.0f64,
        beta in beta_strategy(),
        u in positive(1e-6, 1.0),
    ) {
        let g_d = 10.0f64.powf(log_gd);
        // Map u into (0, 1/g_d) and back off the boundary slightly.
        let r = (u / g_d) * (1.0 - 1e-9);
        let inputs = AdvantageInputs::from_ratio(g_d, beta, r).unwrap();
        prop_assert!(inputs.colocation_condition());
        let gamma = inputs.advantage_factor();
        let bound = advantage_lower_bound(g_d, beta).unwrap();
        prop_assert!(
            gamma >= bound * (1.0 - 1e-12),
            "gamma {} below bound {} at g_d={} beta={} r={}", gamma, bound, g_d, beta, r
        );
    }

    #[test]
    fn advantage_never_exceeds_one_plus_gd(
        log_gd in 0.0..4.0f64,
        beta in beta_strategy(),
        r in positive(1e-9, 1.0),
    ) {
        let g_d = 10.0f64.powf(log_gd);
        let gamma = AdvantageInputs::from_ratio(g_d, beta, r)
            .unwrap()
            .advantage_factor();
        prop_assert!(gamma <= 1.0 + g_d);
        prop_assert!(gamma >= 1.0 - 1e-15);
    }
}
