use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twocopy_core::boxworld::{box_twirl, lhv_membership, noisy_pr_at, pr_weight};
use twocopy_core::nogo::{check_conditions, check_conditions_exact, QFunction};
use twocopy_core::scalar::rational;
use twocopy_core::werner::{
    bbpssw_step, ppt_min_eigenvalue, werner_state_at, werner_threshold_bisect, WernerParam,
};
use twocopy_core::wirings::{extract_quad_coeffs, figure2_wiring, SearchKernel};

#[test]
fn wiring_coefficients_never_meet_all_conditions() {
    let kernel = SearchKernel::new(11);
    let catalog = kernel.catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5000 {
        let a = rng.gen_range(0..catalog.party_count());
        let b = rng.gen_range(0..catalog.party_count());
        let q = kernel.coeffs(a, b);
        let report = check_conditions(&QFunction::new(q, 0.75).unwrap());
        assert!(report.universal, "{q:?}");
        assert!(report.separability_preserving, "{q:?}");
        assert!(!report.is_counterexample(), "{q:?}");
        // Sixteenths are exact in binary, so the rational route must agree.
        let exact = q.as_array().map(|v| rational((v * 16.0) as i64, 16));
        assert_eq!(check_conditions_exact(&exact, &rational(3, 4)).useful, report.useful);
        assert!(kernel.gap(a, b).sup <= 0.0);
    }
}

#[test]
fn representative_wiring_keeps_local_boxes_local() {
    let (alice, bob) = figure2_wiring();
    let q = extract_quad_coeffs(&alice.behavior(), &bob.behavior()).unwrap();
    let report = check_conditions(&QFunction::new(q, 0.75).unwrap());
    assert!(report.universal && report.separability_preserving && !report.useful);
    for k in 0..=30 {
        let p = 0.75 * k as f64 / 30.0;
        let s = noisy_pr_at(p).unwrap();
        let out = twocopy_core::wirings::effective_box(&alice.behavior(), &bob.behavior(), &s, &s).unwrap();
        assert!(lhv_membership(&box_twirl(&out)).feasible, "p={p}");
        assert!((pr_weight(&box_twirl(&out)) - q.eval(p)).abs() < 1e-12);
    }
}

#[test]
fn quantum_recurrence_purifies_what_boxes_cannot() {
    let threshold = werner_threshold_bisect(1e-12);
    assert!((threshold - 0.5).abs() < 1e-8);
    let p = 0.8;
    let out = bbpssw_step(WernerParam::new(p).unwrap());
    assert!(out.out_purity_success.get() > p);
    assert!(ppt_min_eigenvalue(&werner_state_at(out.out_purity_success.get()).unwrap()) < 0.0);
    // The deterministic two-copy map is not a Werner quadratic purifier: its
    // output at the separable boundary stays separable.
    let at = bbpssw_step(WernerParam::new(0.5).unwrap()).out_purity_deterministic.get();
    assert!(at <= 0.5 + 1e-12);
}
