//! Two-input, two-output bipartite boxes `P(ab|xy)`.
//!
//! Tables are stored flat in `(x, y, a, b)` lexicographic order, i.e. index
//! `8x + 4y + 2a + b`. This is also the JSON encoding: a 16-element array.

use alloc::vec::Vec;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lp;
use crate::scalar::Scalar;

/// Entries may dip this far below zero from rounding.
pub const EPS_NONNEG: f64 = 1e-12;
/// Row sums must equal one to this tolerance.
pub const EPS_NORM: f64 = 1e-10;
/// Marginal equality tolerance for the non-signalling test.
pub const EPS_SIGNAL: f64 = 1e-10;
/// Phase-one optimum accepted as feasible on the double-precision path.
pub const LHV_MARGIN: f64 = 1e-9;

#[inline]
pub const fn index(x: u8, y: u8, a: u8, b: u8) -> usize {
    ((x as usize) << 3) | ((y as usize) << 2) | ((a as usize) << 1) | b as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct BoxDistribution {
    table: [f64; 16],
}

impl BoxDistribution {
    /// Validates nonnegativity and per-input normalization.
    pub fn new(table: [f64; 16]) -> Result<Self> {
        for (i, &v) in table.iter().enumerate() {
            if v.is_nan() || v < -EPS_NONNEG {
                return Err(Error::InvalidDistribution { index: i, value: v });
            }
        }
        let d = Self { table };
        for x in 0..2 {
            for y in 0..2 {
                let total = d.row_sum(x, y);
                if libm::fabs(total - 1.0) > EPS_NORM {
                    return Err(Error::NotNormalized { x, y, total });
                }
            }
        }
        Ok(d)
    }

    pub(crate) const fn new_unchecked(table: [f64; 16]) -> Self {
        Self { table }
    }

    pub fn from_fn(mut f: impl FnMut(u8, u8, u8, u8) -> f64) -> Result<Self> {
        let mut table = [0.0; 16];
        for (i, slot) in table.iter_mut().enumerate() {
            *slot = f((i >> 3) as u8 & 1, (i >> 2) as u8 & 1, (i >> 1) as u8 & 1, i as u8 & 1);
        }
        Self::new(table)
    }

    #[inline]
    pub fn get(&self, x: u8, y: u8, a: u8, b: u8) -> f64 {
        self.table[index(x, y, a, b)]
    }

    pub fn table(&self) -> &[f64; 16] {
        &self.table
    }

    pub fn row_sum(&self, x: u8, y: u8) -> f64 {
        (0..4u8).map(|ab| self.get(x, y, ab >> 1, ab & 1)).sum()
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, lambda: f64, other: &BoxDistribution) -> BoxDistribution {
        let mut table = [0.0; 16];
        for (i, slot) in table.iter_mut().enumerate() {
            *slot = lambda * self.table[i] + (1.0 - lambda) * other.table[i];
        }
        Self { table }
    }

    /// Entrywise max-norm distance.
    pub fn max_abs_diff(&self, other: &BoxDistribution) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }
}

/// PR weight of a noisy box.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct NoisyBoxParam(f64);

impl NoisyBoxParam {
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

fn rule_table(pr: bool) -> [f64; 16] {
    let mut t = [0.0; 16];
    for (i, slot) in t.iter_mut().enumerate() {
        let (x, y, a, b) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        if ((a ^ b) == (x & y)) == pr {
            *slot = 0.5;
        }
    }
    t
}

/// `P(ab|xy) = 1/2` when `a ⊕ b = xy`.
pub fn pr_box() -> BoxDistribution {
    BoxDistribution::new_unchecked(rule_table(true))
}

/// `P(ab|xy) = 1/2` when `a ⊕ b ≠ xy`.
pub fn anti_pr_box() -> BoxDistribution {
    BoxDistribution::new_unchecked(rule_table(false))
}

pub fn noisy_pr(p: NoisyBoxParam) -> BoxDistribution {
    pr_box().mix(p.get(), &anti_pr_box())
}

pub fn noisy_pr_at(p: f64) -> Result<BoxDistribution> {
    Ok(noisy_pr(NoisyBoxParam::new(p)?))
}

/// Exact table of the noisy PR-box with rational weight `p`.
pub fn noisy_pr_exact(p: &BigRational) -> [BigRational; 16] {
    let half = crate::scalar::rational(1, 2);
    let one = crate::scalar::rational(1, 1);
    core::array::from_fn(|i| {
        let (x, y, a, b) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        if (a ^ b) == (x & y) {
            &half * p
        } else {
            &half * (&one - p)
        }
    })
}

/// Deterministic box `P(ab|xy) = [a = f(x)][b = g(y)]`.
pub fn deterministic_box(f: impl Fn(u8) -> u8, g: impl Fn(u8) -> u8) -> BoxDistribution {
    let mut t = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            t[index(x, y, f(x) & 1, g(y) & 1)] = 1.0;
        }
    }
    BoxDistribution::new_unchecked(t)
}

/// Product box `P_A(a|x)·P_B(b|y)` from marginals `alice[x] = P(a=0|x)` etc.
pub fn product_box(alice: [f64; 2], bob: [f64; 2]) -> Result<BoxDistribution> {
    BoxDistribution::from_fn(|x, y, a, b| {
        let pa = if a == 0 { alice[x as usize] } else { 1.0 - alice[x as usize] };
        let pb = if b == 0 { bob[y as usize] } else { 1.0 - bob[y as usize] };
        pa * pb
    })
}

pub fn is_nonsignalling(d: &BoxDistribution) -> bool {
    for x in 0..2u8 {
        for a in 0..2u8 {
            let m0 = d.get(x, 0, a, 0) + d.get(x, 0, a, 1);
            let m1 = d.get(x, 1, a, 0) + d.get(x, 1, a, 1);
            if libm::fabs(m0 - m1) > EPS_SIGNAL {
                return false;
            }
        }
    }
    for y in 0..2u8 {
        for b in 0..2u8 {
            let m0 = d.get(0, y, 0, b) + d.get(0, y, 1, b);
            let m1 = d.get(1, y, 0, b) + d.get(1, y, 1, b);
            if libm::fabs(m0 - m1) > EPS_SIGNAL {
                return false;
            }
        }
    }
    true
}

/// `E_xy = P(a⊕b=0|xy) − P(a⊕b=1|xy)`.
pub fn correlator(d: &BoxDistribution, x: u8, y: u8) -> f64 {
    d.get(x, y, 0, 0) + d.get(x, y, 1, 1) - d.get(x, y, 0, 1) - d.get(x, y, 1, 0)
}

/// `E₀₀ + E₀₁ + E₁₀ − E₁₁`.
pub fn chsh_value(d: &BoxDistribution) -> f64 {
    correlator(d, 0, 0) + correlator(d, 0, 1) + correlator(d, 1, 0) - correlator(d, 1, 1)
}

/// Average probability of satisfying `a ⊕ b = xy`.
pub fn pr_weight(d: &BoxDistribution) -> f64 {
    let mut total = 0.0;
    for x in 0..2u8 {
        for y in 0..2u8 {
            let target = x & y;
            for a in 0..2u8 {
                total += d.get(x, y, a, a ^ target);
            }
        }
    }
    0.25 * total
}

/// One of the eight shared-bit relabelings, `shared = α | β<<1 | γ<<2`:
/// `x → x⊕α`, `y → y⊕β`, `a → a⊕βx⊕αβ⊕γ`, `b → b⊕αy⊕γ`.
///
/// The relabeled entry at `(x, y, a, b)` reads the original at inputs
/// `(x⊕α, y⊕β)` and outputs `(a⊕βx⊕αβ⊕γ, b⊕αy⊕γ)`.
pub fn box_relabel(d: &BoxDistribution, shared: u8) -> BoxDistribution {
    let (alpha, beta, gamma) = (shared & 1, (shared >> 1) & 1, (shared >> 2) & 1);
    let mut out = [0.0; 16];
    for (i, slot) in out.iter_mut().enumerate() {
        let (x, y, a, b) = ((i >> 3) as u8 & 1, (i >> 2) as u8 & 1, (i >> 1) as u8 & 1, i as u8 & 1);
        let src_a = a ^ (beta & x) ^ (alpha & beta) ^ gamma;
        let src_b = b ^ (alpha & y) ^ gamma;
        *slot = d.get(x ^ alpha, y ^ beta, src_a, src_b);
    }
    BoxDistribution::new_unchecked(out)
}

/// Uniform average of [`box_relabel`] over all eight shared-bit values.
/// Signalling input is fine.
pub fn box_twirl(d: &BoxDistribution) -> BoxDistribution {
    let mut out = [0.0; 16];
    for shared in 0..8u8 {
        for (slot, v) in out.iter_mut().zip(box_relabel(d, shared).table()) {
            *slot += v;
        }
    }
    for v in out.iter_mut() {
        *v *= 0.125;
    }
    BoxDistribution::new_unchecked(out)
}

/// Local deterministic strategy `k = 4f + g`; `f` and `g` are truth tables
/// of the response functions (`a = (f >> x) & 1`, `b = (g >> y) & 1`).
#[inline]
pub fn local_vertex_entry(k: usize, x: u8, y: u8, a: u8, b: u8) -> bool {
    let (f, g) = (k >> 2, k & 3);
    ((f >> x) & 1) as u8 == a && ((g >> y) & 1) as u8 == b
}

fn local_polytope_matrix<T: Scalar>() -> Vec<Vec<T>> {
    (0..16)
        .map(|row| {
            let (x, y, a, b) = ((row >> 3) as u8 & 1, (row >> 2) as u8 & 1, (row >> 1) as u8 & 1, row as u8 & 1);
            (0..16)
                .map(|k| if local_vertex_entry(k, x, y, a, b) { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LhvResult<T = f64> {
    pub feasible: bool,
    /// Weights over the 16 local deterministic strategies (see
    /// [`local_vertex_entry`]), present iff feasible.
    pub weights: Option<Vec<T>>,
    /// Phase-one optimum: total artificial mass needed to match the table.
    pub violation_margin: T,
}

fn lhv_generic<T: Scalar>(table: &[T], margin: &T) -> LhvResult<T> {
    let a = local_polytope_matrix::<T>();
    let res = lp::phase_one(&a, table, margin);
    LhvResult {
        feasible: res.feasible,
        weights: res.solution,
        violation_margin: res.infeasibility,
    }
}

/// Membership in the local polytope, in doubles with margin [`LHV_MARGIN`].
pub fn lhv_membership(d: &BoxDistribution) -> LhvResult {
    lhv_generic(d.table(), &LHV_MARGIN)
}

/// Exact membership in the local polytope for a rational table.
pub fn lhv_membership_exact(table: &[BigRational; 16]) -> LhvResult<BigRational> {
    lhv_generic(table, &<BigRational as Scalar>::eps())
}

/// Reconstructs the table from local weights.
pub fn table_from_local_weights(weights: &[f64]) -> [f64; 16] {
    let mut t = [0.0; 16];
    for (row, slot) in t.iter_mut().enumerate() {
        let (x, y, a, b) = ((row >> 3) as u8 & 1, (row >> 2) as u8 & 1, (row >> 1) as u8 & 1, row as u8 & 1);
        *slot = (0..16)
            .filter(|&k| local_vertex_entry(k, x, y, a, b))
            .map(|k| weights[k])
            .sum();
    }
    t
}
