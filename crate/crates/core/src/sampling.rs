//! Seeded samplers for property checks and the CLI audits.

use rand::Rng;

use crate::boxworld::BoxDistribution;
use crate::linalg::{c, ComplexMatrix};
use crate::werner::TwoQubitState;

/// `G G† / tr(G G†)` with `G` having i.i.d. entries uniform on the unit square
/// `[-1, 1] + i[-1, 1]`.
pub fn random_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let g = ComplexMatrix::from_fn(4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    TwoQubitState::new_unchecked(rho.scale(1.0 / tr))
}

/// Independent uniform weights for each input pair, normalized per row.
/// Generally signalling.
pub fn random_box<R: Rng + ?Sized>(rng: &mut R) -> BoxDistribution {
    let mut t = [0.0; 16];
    for row in t.chunks_mut(4) {
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = rng.gen::<f64>() + 1e-9;
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    BoxDistribution::new_unchecked(t)
}

/// Random non-signalling box: a convex mixture of a local deterministic box,
/// a noisy PR-box and a relabeled one.
pub fn random_nonsignalling_box<R: Rng + ?Sized>(rng: &mut R) -> BoxDistribution {
    use crate::boxworld::{box_relabel, deterministic_box, noisy_pr_at};
    let f = rng.gen_range(0..4u8);
    let g = rng.gen_range(0..4u8);
    let local = deterministic_box(|x| (f >> x) & 1, |y| (g >> y) & 1);
    let pr = noisy_pr_at(rng.gen()).expect("p in [0,1)");
    let relabeled = box_relabel(&pr, rng.gen_range(0..8u8));
    let (l1, l2) = (rng.gen::<f64>(), rng.gen::<f64>());
    local.mix(l1, &pr.mix(l2, &relabeled))
}
