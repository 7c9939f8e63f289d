//! The output-purity map of a twirled two-copy protocol and the conditions
//! any purifying map would have to meet.
//!
//! With `s = q01 + q10`, the map is
//! `Q(p) = p²·q00 + p(1−p)·s + (1−p)²·q11`, i.e. in monomial form
//! `Q(p) = q11 + (s − 2q11)·p + (q00 − s + q11)·p²`.
//! All interval extrema are taken in closed form from the endpoints and the
//! vertex; nothing here samples a grid unless asked to.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{rational, Scalar};
use crate::wirings::QuadCoeffs;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QFunction {
    coeffs: QuadCoeffs,
    p_s: f64,
}

impl QFunction {
    pub fn new(coeffs: QuadCoeffs, p_s: f64) -> Result<Self> {
        if !(p_s > 0.0 && p_s < 1.0) {
            return Err(Error::InvalidThreshold(p_s));
        }
        Ok(Self { coeffs, p_s })
    }

    /// Builds a `QFunction` from monomial coefficients `c[k]·p^k`. Anything of
    /// degree three or more is refused.
    pub fn from_monomials(c: &[f64], p_s: f64) -> Result<Self> {
        if let Some(degree) = c.iter().rposition(|&v| v != 0.0).filter(|&d| d > 2) {
            return Err(Error::NotQuadratic { degree });
        }
        let get = |k: usize| c.get(k).copied().unwrap_or(0.0);
        let (c0, c1, c2) = (get(0), get(1), get(2));
        let s = c1 + 2.0 * c0;
        let coeffs = QuadCoeffs {
            q00: c0 + c1 + c2,
            q01: 0.5 * s,
            q10: 0.5 * s,
            q11: c0,
        };
        Self::new(coeffs, p_s)
    }

    pub fn coeffs(&self) -> &QuadCoeffs {
        &self.coeffs
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }
}

pub fn q_of_p(f: &QFunction, p: f64) -> f64 {
    f.coeffs.eval(p)
}

/// Monomial coefficients `[c0, c1, c2]` of `Q`.
pub fn monomials<T: Scalar>(q: &[T; 4]) -> [T; 3] {
    let [q00, q01, q10, q11] = q.clone();
    let two = T::from_ratio(2, 1);
    let s = q01 + q10;
    [
        q11.clone(),
        s.clone() - two * q11.clone(),
        q00 - s + q11,
    ]
}

#[inline]
pub fn eval_monomials<T: Scalar>(c: &[T; 3], p: &T) -> T {
    (c[2].clone() * p.clone() + c[1].clone()) * p.clone() + c[0].clone()
}

/// Vertex of `c0 + c1 p + c2 p²` when `c2 ≠ 0`.
fn vertex<T: Scalar>(c: &[T; 3]) -> Option<T> {
    if c[2].is_zero() {
        None
    } else {
        Some(-c[1].clone() / (T::from_ratio(2, 1) * c[2].clone()))
    }
}

/// (min, max) of the polynomial over `[lo, hi]`.
pub fn range_on<T: Scalar>(c: &[T; 3], lo: &T, hi: &T) -> (T, T) {
    let mut lo_v = eval_monomials(c, lo);
    let mut hi_v = lo_v.clone();
    let mut consider = |p: &T| {
        let v = eval_monomials(c, p);
        if v < lo_v {
            lo_v = v.clone();
        }
        if v > hi_v {
            hi_v = v;
        }
    };
    consider(hi);
    if let Some(v) = vertex(c).filter(|v| v > lo && v < hi) {
        consider(&v);
    }
    (lo_v, hi_v)
}

/// Supremum of `Q(p) − p` over the half-open interval `(lo, 1]`, ignoring the
/// value at `lo` itself. Candidates are `p = 1`, the vertex when it lies
/// inside, and any caller-supplied points inside the interval. Returns
/// `(value, argmax)`; ties keep the earliest candidate.
pub fn sup_gap_above<T: Scalar>(c: &[T; 3], lo: &T, extra: &[T]) -> (T, T) {
    let g = gap_monomials(c);
    let one = T::one();
    let mut best = (eval_monomials(&g, &one), one.clone());
    let mut consider = |p: T| {
        let v = eval_monomials(&g, &p);
        if v > best.0 {
            best = (v, p);
        }
    };
    if let Some(v) = vertex(&g).filter(|v| v > lo && *v < one) {
        consider(v);
    }
    for p in extra.iter().filter(|p| *p > lo && **p <= one) {
        consider(p.clone());
    }
    best
}

/// Monomials of `Q(p) − p`.
pub fn gap_monomials<T: Scalar>(c: &[T; 3]) -> [T; 3] {
    [c[0].clone(), c[1].clone() - T::one(), c[2].clone()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Relations {
    /// `Q(0)`; must be ≥ 0.
    pub q_at_zero: f64,
    /// `p_s − Q(p_s)`; must be ≥ 0.
    pub separability_slack: f64,
    /// `sup (Q(p) − p)` over `p_s < p ≤ 1`; positive means purification.
    pub sup_gap: f64,
    /// `1 − Q(1)`; must be ≥ 0.
    pub top_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionReport {
    /// Q maps `[0, 1]` into `[0, 1]` and every coefficient lies in `[0, 1]`.
    pub universal: bool,
    /// `Q(p_s) ≤ p_s`.
    pub separability_preserving: bool,
    /// Some `p_e` has `Q(p_e) > p_e > p_s`.
    pub useful: bool,
    pub useful_witness: Option<f64>,
    /// Structural: a `QFunction` is quadratic by construction.
    pub quadratic: bool,
    pub relations: Relations,
}

impl ConditionReport {
    /// Universal, separability-preserving, quadratic and still useful. The
    /// no-go theorem says this never happens.
    pub fn is_counterexample(&self) -> bool {
        self.universal && self.separability_preserving && self.quadratic && self.useful
    }
}

fn analyze<T: Scalar>(q: &[T; 4], p_s: &T) -> ConditionReport {
    let zero = T::zero();
    let one = T::one();
    let c = monomials(q);
    let g = gap_monomials(&c);

    let coeffs_in_range = q.iter().all(|v| *v >= zero && *v <= one);
    let (lo, hi) = range_on(&c, &zero, &one);
    let universal = coeffs_in_range && lo >= zero && hi <= one;

    let at_ps = eval_monomials(&g, p_s);
    // Exact comparison: B carries no tolerance so that C's margin is the only one.
    let separability_preserving = at_ps <= zero;

    let (sup_inside, argmax) = sup_gap_above(&c, p_s, &[]);
    let (sup, witness) = if at_ps > sup_inside {
        // Q − id is positive at p_s and falls off to the right; the positive
        // region still reaches into (p_s, 1].
        (at_ps.clone(), Some(point_right_of(&g, p_s)))
    } else {
        (sup_inside.clone(), Some(argmax))
    };
    let useful = sup.is_positive_tol();

    ConditionReport {
        universal,
        separability_preserving,
        useful,
        useful_witness: if useful { witness.map(|w| w.to_f64()) } else { None },
        quadratic: true,
        relations: Relations {
            q_at_zero: c[0].to_f64(),
            separability_slack: (-at_ps).to_f64(),
            sup_gap: sup.to_f64(),
            top_slack: (one - eval_monomials(&c, &T::one())).to_f64(),
        },
    }
}

/// A point in `(p_s, 1]` where `g > 0`, given `g(p_s) > 0`: midway between
/// `p_s` and the first sign change, found by bisection.
fn point_right_of<T: Scalar>(g: &[T; 3], p_s: &T) -> T {
    let one = T::one();
    if eval_monomials(g, &one) > T::zero() {
        return one;
    }
    let half = T::from_ratio(1, 2);
    let (mut lo, mut hi) = (p_s.clone(), one);
    for _ in 0..60 {
        let mid = (lo.clone() + hi.clone()) * half.clone();
        if eval_monomials(g, &mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (p_s.clone() + lo) * half
}

pub fn check_conditions(f: &QFunction) -> ConditionReport {
    analyze(&f.coeffs.as_array(), &f.p_s)
}

/// Same analysis in exact rational arithmetic; usefulness uses a strict
/// zero-margin comparison.
pub fn check_conditions_exact(q: &[BigRational; 4], p_s: &BigRational) -> ConditionReport {
    analyze(q, p_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanSummary {
    pub samples: u64,
    /// Samples satisfying universality and separability preservation.
    pub admissible: u64,
    pub counterexamples: u64,
}

/// Samples coefficient quadruples uniformly from `[0, 1]⁴` and counts those
/// that satisfy A, B and D yet are useful.
pub fn theorem_scan(p_s: f64, samples: u64, seed: u64) -> Result<ScanSummary> {
    if !(p_s > 0.0 && p_s < 1.0) {
        return Err(Error::InvalidThreshold(p_s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = ScanSummary::default();
    for _ in 0..samples {
        let q: [f64; 4] = core::array::from_fn(|_| rng.gen::<f64>());
        let report = analyze(&q, &p_s);
        summary.samples += 1;
        if report.universal && report.separability_preserving {
            summary.admissible += 1;
            if report.useful {
                summary.counterexamples += 1;
            }
        }
    }
    Ok(summary)
}

/// Exhaustive exact check over all coefficients in `{0, 1/2, 1}⁴`.
pub fn corner_sweep(p_s: &BigRational) -> ScanSummary {
    let values = [rational(0, 1), rational(1, 2), rational(1, 1)];
    let mut summary = ScanSummary::default();
    for code in 0..81usize {
        let q: [BigRational; 4] = core::array::from_fn(|k| {
            let digit = (code / 3usize.pow(k as u32)) % 3;
            values[digit].clone()
        });
        let report = check_conditions_exact(&q, p_s);
        summary.samples += 1;
        if report.universal && report.separability_preserving {
            summary.admissible += 1;
            if report.useful {
                summary.counterexamples += 1;
            }
        }
    }
    summary
}

/// Monomial coefficients of the unique quadratic through three points with
/// distinct abscissae (Lagrange form expanded).
pub fn interpolate_quadratic<T: Scalar>(points: &[(T, T); 3]) -> [T; 3] {
    let mut c = [T::zero(), T::zero(), T::zero()];
    for i in 0..3 {
        let (xi, yi) = points[i].clone();
        let (xj, xk) = (points[(i + 1) % 3].0.clone(), points[(i + 2) % 3].0.clone());
        let denom = (xi.clone() - xj.clone()) * (xi - xk.clone());
        let w = yi / denom;
        // (p − xj)(p − xk) = p² − (xj + xk) p + xj xk
        c[0] = c[0].clone() + w.clone() * xj.clone() * xk.clone();
        c[1] = c[1].clone() - w.clone() * (xj + xk);
        c[2] = c[2].clone() + w;
    }
    c
}

/// Coefficients `(q00, q01 + q10, q11)` of the quadratic through three fixed
/// points of `p ↦ p`.
pub fn fixed_point_coefficients<T: Scalar>(ps: [T; 3]) -> (T, T, T) {
    let pts = ps.map(|p| (p.clone(), p));
    let c = interpolate_quadratic(&pts);
    let q11 = c[0].clone();
    let s = c[1].clone() + T::from_ratio(2, 1) * q11.clone();
    let q00 = c[2].clone() + s.clone() - q11.clone();
    (q00, s, q11)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub region_id: u8,
    pub p: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// The lower bound is strict (`Q(p_e) > p_e`).
    pub lower_strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Curve {
    pub curve_id: u8,
    pub label: &'static str,
    pub monomials: [f64; 3],
    pub report: ConditionReport,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Figure1Data {
    pub p_s: f64,
    pub p_e: f64,
    pub regions: Vec<Region>,
    pub curves: Vec<Curve>,
}

/// The four pass-through regions a purifying map would need to hit, plus
/// sampled quadratics that each miss at least one of them.
pub fn figure1_regions(p_s: f64, p_e: f64, curve_points: usize) -> Result<Figure1Data> {
    if !(p_s > 0.0 && p_s < 1.0) {
        return Err(Error::InvalidThreshold(p_s));
    }
    if !(p_e > p_s && p_e < 1.0) {
        return Err(Error::ParamOutOfRange { value: p_e });
    }
    let regions = vec![
        Region { region_id: 1, p: 0.0, q_min: 0.0, q_max: 1.0, lower_strict: false },
        Region { region_id: 2, p: p_s, q_min: 0.0, q_max: p_s, lower_strict: false },
        Region { region_id: 3, p: p_e, q_min: p_e, q_max: 1.0, lower_strict: true },
        Region { region_id: 4, p: 1.0, q_min: 0.0, q_max: 1.0, lower_strict: false },
    ];

    let through = interpolate_quadratic(&[(p_s, p_s), (p_e, 0.5 * (p_e + 1.0)), (1.0, 1.0)]);
    let attempts: [(&'static str, [f64; 3]); 3] = [
        ("identity", [0.0, 1.0, 0.0]),
        ("through-b-c-top", through),
        ("symmetric-parabola", [1.0, -2.0, 2.0]),
    ];
    let n = curve_points.max(2);
    let curves = attempts
        .iter()
        .enumerate()
        .map(|(i, (label, c))| {
            let f = QFunction::from_monomials(c, p_s)?;
            let points = (0..n)
                .map(|k| {
                    let p = k as f64 / (n - 1) as f64;
                    (p, eval_monomials(c, &p))
                })
                .collect();
            Ok(Curve {
                curve_id: i as u8 + 1,
                label,
                monomials: *c,
                report: check_conditions(&f),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure1Data { p_s, p_e, regions, curves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coeffs(q00: f64, q01: f64, q10: f64, q11: f64) -> QuadCoeffs {
        QuadCoeffs { q00, q01, q10, q11 }
    }

    #[test]
    fn q_of_p_examples() {
        let id = QFunction::new(coeffs(1.0, 0.5, 0.5, 0.0), 0.75).unwrap();
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            assert!((q_of_p(&id, p) - p).abs() < 1e-15);
        }
        let f = QFunction::new(coeffs(0.3, 0.9, 0.1, 0.6), 0.5).unwrap();
        assert_eq!(q_of_p(&f, 0.0), 0.6);
        assert_eq!(q_of_p(&f, 1.0), 0.3);
    }

    #[test]
    fn threshold_validated() {
        assert!(QFunction::new(coeffs(1.0, 0.0, 0.0, 0.0), 0.0).is_err());
        assert!(QFunction::new(coeffs(1.0, 0.0, 0.0, 0.0), 1.0).is_err());
        assert!(theorem_scan(1.5, 10, 0).is_err());
        assert!(figure1_regions(0.75, 0.5, 11).is_err());
    }

    #[test]
    fn identity_is_universal_preserving_but_useless() {
        let r = check_conditions(&QFunction::new(coeffs(1.0, 0.5, 0.5, 0.0), 0.75).unwrap());
        assert!(r.universal);
        assert!(r.separability_preserving);
        assert_eq!(r.relations.separability_slack, 0.0);
        assert!(!r.useful);
        assert!(r.useful_witness.is_none());
        assert!(r.quadratic);
    }

    #[test]
    fn cubic_is_rejected() {
        let cubic = [1.0 / 9.0, 2.0 / 9.0, 14.0 / 9.0, -8.0 / 9.0];
        assert!(matches!(
            QFunction::from_monomials(&cubic, 0.5),
            Err(Error::NotQuadratic { degree: 3 })
        ));
        let quad = QFunction::from_monomials(&[0.0, 1.0, 0.0], 0.5).unwrap();
        assert_eq!(quad.coeffs().as_array(), [1.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn symmetric_parabola_report() {
        // Q(p) = p² + (1−p)²: Q(1/2) = 1/2, Q(p) − p = (1−p)(1−2p) < 0 on (1/2, 1).
        let q = [rational(1, 1), rational(0, 1), rational(0, 1), rational(1, 1)];
        let r = check_conditions_exact(&q, &rational(1, 2));
        assert!(r.universal);
        assert!(r.separability_preserving);
        assert_eq!(r.relations.separability_slack, 0.0);
        assert!(!r.useful);
        assert_eq!(r.relations.sup_gap, 0.0);
        assert_eq!(r.relations.q_at_zero, 1.0);
        assert_eq!(r.relations.top_slack, 0.0);
        let f = check_conditions(&QFunction::new(coeffs(1.0, 0.0, 0.0, 1.0), 0.5).unwrap());
        assert_eq!(f, r);
    }

    #[test]
    fn useful_but_not_preserving() {
        // Q(p) = 1 − (1−p)² = 2p − p²: Q(p) > p on (0, 1).
        let f = QFunction::from_monomials(&[0.0, 2.0, -1.0], 0.5).unwrap();
        let r = check_conditions(&f);
        assert!(!r.separability_preserving);
        assert!(r.useful);
        let w = r.useful_witness.unwrap();
        assert!(w > 0.5 && q_of_p(&f, w) > w);
        assert!(!r.is_counterexample());
    }

    #[test]
    fn witness_right_of_threshold_when_gap_peaks_there() {
        // Q(p) − p = 0.1 − (p − 0.5): positive just right of 0.5, zero at 0.6.
        let f = QFunction::from_monomials(&[0.6, 0.0, 0.0], 0.5).unwrap();
        let r = check_conditions(&f);
        assert!(r.useful);
        let w = r.useful_witness.unwrap();
        assert!(w > 0.5 && w < 0.6, "{w}");
    }

    #[test]
    fn corner_sweep_has_no_counterexamples() {
        for p_s in [rational(1, 2), rational(3, 4)] {
            let s = corner_sweep(&p_s);
            assert_eq!(s.samples, 81);
            assert!(s.admissible > 0);
            assert_eq!(s.counterexamples, 0);
        }
    }

    #[test]
    fn theorem_scan_small() {
        for p_s in [0.5, 0.75] {
            let s = theorem_scan(p_s, 20_000, 7).unwrap();
            assert_eq!(s.samples, 20_000);
            assert!(s.admissible > 0);
            assert_eq!(s.counterexamples, 0);
        }
    }

    #[test]
    fn three_fixed_points_force_identity() {
        let (q00, s, q11) = fixed_point_coefficients([rational(1, 5), rational(3, 4), rational(9, 10)]);
        assert_eq!(q00, rational(1, 1));
        assert_eq!(s, rational(1, 1));
        assert_eq!(q11, rational(0, 1));
    }

    #[test]
    fn figure1_structure() {
        for (p_s, p_e) in [(0.75, 0.875), (0.5, 0.75)] {
            let d = figure1_regions(p_s, p_e, 101).unwrap();
            assert_eq!(d.regions.len(), 4);
            assert_eq!(d.regions[1].q_max, p_s);
            assert_eq!(d.regions[2].q_min, p_e);
            assert!(d.regions[2].lower_strict);
            for c in &d.curves {
                assert_eq!(c.points.len(), 101);
                assert!(!c.report.is_counterexample(), "{}", c.label);
            }
            // The curve threaded through B, C and the top fails universality at 0.
            let through = &d.curves[1];
            assert!(!through.report.universal);
            assert!(through.points[0].1 < 0.0);
        }
    }

    proptest! {
        #[test]
        fn endpoint_identities(q in prop::array::uniform4(0.0f64..=1.0)) {
            let f = QFunction::new(QuadCoeffs::from_array(q), 0.75).unwrap();
            prop_assert_eq!(q_of_p(&f, 0.0), q[3]);
            prop_assert_eq!(q_of_p(&f, 1.0), q[0]);
        }

        #[test]
        fn theorem_holds(q in prop::array::uniform4(0.0f64..=1.0), p_s in 0.05f64..0.95) {
            let r = check_conditions(&QFunction::new(QuadCoeffs::from_array(q), p_s).unwrap());
            prop_assert!(!r.is_counterexample());
        }

        #[test]
        fn exact_and_float_agree_on_dyadics(n in prop::array::uniform4(0u8..=16)) {
            let qf = n.map(|v| v as f64 / 16.0);
            let qe = n.map(|v| rational(v as i64, 16));
            let a = check_conditions(&QFunction::new(QuadCoeffs::from_array(qf), 0.75).unwrap());
            let b = check_conditions_exact(&qe, &rational(3, 4));
            prop_assert_eq!(a.universal, b.universal);
            prop_assert_eq!(a.separability_preserving, b.separability_preserving);
            prop_assert_eq!(a.useful, b.useful);
        }
    }
}
