//! Two-qubit Werner states and the purification protocols built on them.
//!
//! Qubit order is (Alice, Bob) and the singlet is `|ψ−⟩ = (|01⟩ − |10⟩)/√2`.
//! For two pairs the 16-dimensional ordering is (A1, B1, A2, B2): pair 1 is
//! the source pair that survives the protocol, pair 2 is sacrificed.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, c, gates, hermitian_eig, kron, partial_trace, partial_transpose, ComplexMatrix};

/// Tolerances for validating a [`TwoQubitState`].
pub const EPS_STATE: f64 = 1e-10;
/// Post-selected branches lighter than this are treated as impossible.
pub const EPS_BRANCH: f64 = 1e-14;

/// Singlet weight of a Werner state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::ParamOutOfRange { value: p })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    /// Accepts `rho` if it is 4×4, Hermitian, unit trace and positive
    /// semidefinite, all to [`EPS_STATE`].
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        let deviation = rho.hermitian_deviation();
        if deviation > EPS_STATE {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = rho.trace();
        if libm::fabs(tr.re - 1.0) > EPS_STATE || libm::fabs(tr.im) > EPS_STATE {
            return Err(Error::ParamOutOfRange { value: tr.re });
        }
        let min = hermitian_eig(&rho)?.min();
        if min < -EPS_STATE {
            return Err(Error::ParamOutOfRange { value: min });
        }
        Ok(Self { rho })
    }

    pub(crate) fn new_unchecked(rho: ComplexMatrix) -> Self {
        Self { rho }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, lambda: f64, other: &TwoQubitState) -> TwoQubitState {
        Self::new_unchecked(&self.rho.scale(lambda) + &other.rho.scale(1.0 - lambda))
    }
}

/// `|ψ−⟩` as a 4-vector.
pub fn singlet_vector() -> [linalg::C64; 4] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]
}

/// `|ψ−⟩⟨ψ−|`.
pub fn singlet_projector() -> ComplexMatrix {
    ComplexMatrix::outer(&singlet_vector())
}

/// `(I − |ψ−⟩⟨ψ−|)/3`, the noise component of the family.
pub fn werner_noise() -> ComplexMatrix {
    (&ComplexMatrix::identity(4) - &singlet_projector()).scale(1.0 / 3.0)
}

fn werner_matrix(p: f64) -> ComplexMatrix {
    &singlet_projector().scale(p) + &werner_noise().scale(1.0 - p)
}

/// `p·|ψ−⟩⟨ψ−| + (1−p)·(I − |ψ−⟩⟨ψ−|)/3`.
pub fn werner_state(p: WernerParam) -> TwoQubitState {
    TwoQubitState::new_unchecked(werner_matrix(p.get()))
}

/// Convenience wrapper that validates `p` first.
pub fn werner_state_at(p: f64) -> Result<TwoQubitState> {
    Ok(werner_state(WernerParam::new(p)?))
}

/// `⟨ψ−|ρ|ψ−⟩`.
pub fn singlet_fidelity(rho: &TwoQubitState) -> f64 {
    let v = singlet_vector();
    let m = rho.matrix();
    let mut acc = c(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    acc.re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlMethod {
    /// Projects straight onto the family using the singlet fidelity.
    ClosedForm,
    /// Averages `(U⊗U) ρ (U⊗U)†` over the 24 single-qubit Cliffords.
    TwoDesign,
}

pub fn twirl_quantum(rho: &TwoQubitState, method: TwirlMethod) -> TwoQubitState {
    match method {
        TwirlMethod::ClosedForm => {
            TwoQubitState::new_unchecked(werner_matrix(singlet_fidelity(rho)))
        }
        TwirlMethod::TwoDesign => {
            let group = clifford_group();
            let mut acc = ComplexMatrix::zeros(4);
            for u in &group {
                let uu = kron(u, u);
                acc = &acc + &rho.matrix().conjugate_by(&uu);
            }
            TwoQubitState::new_unchecked(acc.scale(1.0 / group.len() as f64))
        }
    }
}

/// Divides out the global phase so that the first non-negligible entry is
/// real and positive.
fn phase_normalized(u: &ComplexMatrix) -> ComplexMatrix {
    let lead = u
        .entries()
        .iter()
        .copied()
        .find(|z| z.norm() > 1e-9)
        .unwrap_or(c(1.0, 0.0));
    u.scale_complex((lead / lead.norm()).conj())
}

/// The single-qubit Clifford group modulo global phase, generated from H and S.
pub fn clifford_group() -> Vec<ComplexMatrix> {
    let generators = [gates::hadamard(), gates::phase_s()];
    let mut group = alloc::vec![ComplexMatrix::identity(2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in &generators {
                let candidate = phase_normalized(&(h * g));
                if !group.iter().any(|e| e.max_abs_diff(&candidate) < 1e-9) {
                    group.push(candidate.clone());
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    group
}

/// Smallest eigenvalue of the partial transpose on Bob's qubit. Non-negative
/// exactly when a two-qubit state is separable.
pub fn ppt_min_eigenvalue(rho: &TwoQubitState) -> f64 {
    let pt = partial_transpose(rho.matrix(), 1, &[2, 2]).expect("4x4 two-qubit state");
    hermitian_eig(&pt).expect("partial transpose stays Hermitian").min()
}

/// Locates the entanglement threshold of the Werner family by bisection on
/// the sign of [`ppt_min_eigenvalue`].
///
/// The bracket is `[1/4, 1]`: the minimum eigenvalue is `(1+2p)/6` below
/// `p = 1/4` and decreasing above it, so the root is unique there.
pub fn werner_threshold_bisect(tol: f64) -> f64 {
    let f = |p: f64| ppt_min_eigenvalue(&TwoQubitState::new_unchecked(werner_matrix(p)));
    let (mut lo, mut hi) = (0.25, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolOutcome {
    pub success_prob: f64,
    pub out_purity_success: WernerParam,
    /// Output purity when a third copy is released on failure.
    pub out_purity_deterministic: WernerParam,
}

fn on_qubit(gate: &ComplexMatrix, qubit: usize, n_qubits: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    (0..n_qubits).fold(ComplexMatrix::identity(1), |acc, q| {
        kron(&acc, if q == qubit { gate } else { &id })
    })
}

/// Permutation matrix for the bilateral CNOT on (A1, B1, A2, B2): A1 controls
/// A2 and B1 controls B2.
fn bilateral_cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(16);
    for idx in 0..16usize {
        let (a1, b1, a2, b2) = ((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
        let out = (a1 << 3) | (b1 << 2) | ((a2 ^ a1) << 1) | (b2 ^ b1);
        m[(out, idx)] = c(1.0, 0.0);
    }
    m
}

/// Simulates one round of the bilateral-CNOT recurrence protocol on two
/// Werner pairs.
///
/// Alice applies `σ_y` to each of her qubits, turning `|ψ−⟩` into `|Φ+⟩`
/// (up to phase) and keeping the state Bell-diagonal. After the bilateral
/// CNOT both target qubits are measured and the run succeeds when the
/// outcomes agree. The surviving pair is rotated back with `σ_y` on Alice's
/// side and twirled.
pub fn bbpssw_step(p: WernerParam) -> ProtocolOutcome {
    let w = werner_state(p);
    let pair_in = kron(w.matrix(), w.matrix());

    let y = gates::pauli_y();
    let basis_change = &on_qubit(&y, 0, 4) * &on_qubit(&y, 2, 4);
    let rotated = pair_in.conjugate_by(&basis_change);
    let after_cnot = rotated.conjugate_by(&bilateral_cnot());

    let agree = &kron(&gates::projector(0), &gates::projector(0))
        + &kron(&gates::projector(1), &gates::projector(1));
    let keep = kron(&ComplexMatrix::identity(4), &agree);
    let branch = &(&keep * &after_cnot) * &keep;
    let success_prob = branch.trace().re;

    if success_prob < EPS_BRANCH {
        return ProtocolOutcome {
            success_prob: 0.0,
            out_purity_success: p,
            out_purity_deterministic: p,
        };
    }

    let source = partial_trace(&branch, &[0, 1], &[2, 2, 2, 2])
        .expect("16 = 2*2*2*2")
        .scale(1.0 / success_prob);
    let back = source.conjugate_by(&on_qubit(&y, 0, 2));
    let twirled = twirl_quantum(&TwoQubitState::new_unchecked(back), TwirlMethod::ClosedForm);
    let f_success = singlet_fidelity(&twirled).clamp(0.0, 1.0);
    let f_det = (success_prob * f_success + (1.0 - success_prob) * p.get()).clamp(0.0, 1.0);
    ProtocolOutcome {
        success_prob,
        out_purity_success: WernerParam(f_success),
        out_purity_deterministic: WernerParam(f_det),
    }
}

/// Runs [`bbpssw_step`] on two copies and releases a third untouched copy
/// whenever post-selection fails.
pub fn three_copy_protocol(p: WernerParam) -> WernerParam {
    bbpssw_step(p).out_purity_deterministic
}

/// `(−8p³ + 14p² + 2p + 1)/9`.
pub fn three_copy_formula(p: f64) -> f64 {
    (((-8.0 * p + 14.0) * p + 2.0) * p + 1.0) / 9.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn param(p: f64) -> WernerParam {
        WernerParam::new(p).unwrap()
    }

    /// Bell-diagonal recurrence map for inputs with Φ+ weight `f` and the
    /// remaining weight spread evenly: returns (success probability, output
    /// Φ+ weight). Derived by hand from the bilateral-CNOT truth table.
    fn recurrence_oracle(f: f64) -> (f64, f64) {
        let g = (1.0 - f) / 3.0;
        let succ = f * f + 2.0 * f * g + 5.0 * g * g;
        (succ, (f * f + g * g) / succ)
    }

    #[test]
    fn werner_endpoints() {
        let s = werner_state(param(1.0));
        assert!(s.matrix().max_abs_diff(&singlet_projector()) < 1e-15);
        let m = werner_state(param(0.25));
        assert!(m.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
        assert!(ppt_min_eigenvalue(&werner_state(param(0.5))).abs() < 1e-9);
    }

    #[test]
    fn werner_param_rejects_out_of_range() {
        assert!(WernerParam::new(-0.1).is_err());
        assert!(WernerParam::new(1.5).is_err());
        assert!(WernerParam::new(f64::NAN).is_err());
        assert!(werner_state_at(2.0).is_err());
    }

    #[test]
    fn werner_states_are_valid() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            TwoQubitState::new(werner_state(param(p)).matrix().clone()).unwrap();
        }
    }

    #[test]
    fn state_validation_rejects_bad_matrices() {
        assert!(TwoQubitState::new(ComplexMatrix::identity(2).scale(0.5)).is_err());
        assert!(TwoQubitState::new(ComplexMatrix::identity(4)).is_err());
        assert!(TwoQubitState::new(ComplexMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0])).is_err());
    }

    #[test]
    fn fidelity_examples() {
        assert!((singlet_fidelity(&werner_state(param(0.9))) - 0.9).abs() < 1e-12);
        let mixed = TwoQubitState::new(ComplexMatrix::identity(4).scale(0.25)).unwrap();
        assert!((singlet_fidelity(&mixed) - 0.25).abs() < 1e-15);
        let p01 = TwoQubitState::new(ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert!((singlet_fidelity(&p01) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn twirl_examples() {
        for method in [TwirlMethod::ClosedForm, TwirlMethod::TwoDesign] {
            let w = werner_state(param(0.8));
            assert!(twirl_quantum(&w, method).matrix().max_abs_diff(w.matrix()) < 1e-12);
            let p01 = TwoQubitState::new(ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0])).unwrap();
            let t = twirl_quantum(&p01, method);
            assert!(t.matrix().max_abs_diff(werner_state(param(0.5)).matrix()) < 1e-12);
            let mixed = ComplexMatrix::identity(4).scale(0.25);
            let t = twirl_quantum(&TwoQubitState::new(mixed.clone()).unwrap(), method);
            assert!(t.matrix().max_abs_diff(&mixed) < 1e-12);
        }
    }

    #[test]
    fn clifford_group_has_24_unitary_elements() {
        let g = clifford_group();
        assert_eq!(g.len(), 24);
        for u in &g {
            let uu = u * &u.adjoint();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn twirl_properties_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rho = sampling::random_two_qubit_state(&mut rng);
            let sigma = sampling::random_two_qubit_state(&mut rng);
            let closed = twirl_quantum(&rho, TwirlMethod::ClosedForm);
            let design = twirl_quantum(&rho, TwirlMethod::TwoDesign);
            assert!(closed.matrix().max_abs_diff(design.matrix()) < 1e-10);
            let again = twirl_quantum(&closed, TwirlMethod::TwoDesign);
            assert!(again.matrix().max_abs_diff(closed.matrix()) < 1e-10);
            assert!((singlet_fidelity(&closed) - singlet_fidelity(&rho)).abs() < 1e-12);

            let lambda = 0.3;
            let lhs = twirl_quantum(&rho.mix(lambda, &sigma), TwirlMethod::ClosedForm);
            let rhs = closed.mix(lambda, &twirl_quantum(&sigma, TwirlMethod::ClosedForm));
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
        }
    }

    #[test]
    fn ppt_examples() {
        assert!((ppt_min_eigenvalue(&werner_state(param(1.0))) + 0.5).abs() < 1e-12);
        assert!(ppt_min_eigenvalue(&werner_state(param(0.5))).abs() < 1e-9);
        let mixed = TwoQubitState::new(ComplexMatrix::identity(4).scale(0.25)).unwrap();
        assert!((ppt_min_eigenvalue(&mixed) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ppt_matches_hand_formula_on_grid() {
        // min eigenvalue of the partial transpose: (1+2p)/6 for p < 1/4, 1/2 − p above.
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let want = if p < 0.25 { (1.0 + 2.0 * p) / 6.0 } else { 0.5 - p };
            let got = ppt_min_eigenvalue(&werner_state(param(p)));
            assert!((got - want).abs() < 1e-12, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn threshold_bisection() {
        assert!((werner_threshold_bisect(1e-9) - 0.5).abs() < 1e-8);
        assert!((werner_threshold_bisect(1e-6) - 0.5).abs() < 1e-5);
        let grid: Vec<f64> = (0..=100)
            .map(|k| 0.25 + 0.75 * k as f64 / 100.0)
            .map(|p| ppt_min_eigenvalue(&werner_state(param(p))))
            .collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bbpssw_matches_recurrence_oracle() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let out = bbpssw_step(param(p));
            let (succ, f) = recurrence_oracle(p);
            assert!((out.success_prob - succ).abs() < 1e-12, "p={p}");
            assert!((out.out_purity_success.get() - f).abs() < 1e-12, "p={p}");
            let det = out.success_prob * out.out_purity_success.get()
                + (1.0 - out.success_prob) * p;
            assert!((out.out_purity_deterministic.get() - det).abs() < 1e-15);
        }
    }

    #[test]
    fn bbpssw_examples() {
        let pure = bbpssw_step(param(1.0));
        assert!((pure.out_purity_success.get() - 1.0).abs() < 1e-12);
        assert!((pure.success_prob - 1.0).abs() < 1e-12);
        let half = bbpssw_step(param(0.5));
        assert!((half.out_purity_success.get() - 0.5).abs() < 1e-12);
        assert!((half.success_prob - 5.0 / 9.0).abs() < 1e-12);
        let seven = bbpssw_step(param(0.7));
        // 0.5 / 0.68 from the recurrence oracle.
        assert!((seven.out_purity_success.get() - 0.735_294_117_647_058_8).abs() < 1e-12);
        assert!((seven.success_prob - 0.68).abs() < 1e-12);
        for k in 1..100 {
            let p = 0.5 + 0.5 * k as f64 / 100.0;
            assert!(bbpssw_step(param(p)).out_purity_success.get() > p);
        }
    }

    #[test]
    fn three_copy_examples() {
        assert!((three_copy_protocol(param(1.0)).get() - 1.0).abs() < 1e-12);
        assert!((three_copy_protocol(param(0.5)).get() - 0.5).abs() < 1e-12);
        assert!(three_copy_protocol(param(0.75)).get() > 0.75);
        assert_eq!(three_copy_formula(1.0), 1.0);
        assert_eq!(three_copy_formula(0.5), 0.5);
        assert!((three_copy_formula(0.0) - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn three_copy_simulation_matches_cubic() {
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let sim = three_copy_protocol(param(p)).get();
            assert!((sim - three_copy_formula(p)).abs() < 1e-9, "p={p}");
        }
    }
}
