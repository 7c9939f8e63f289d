//! Deterministic local wirings that turn two boxes into one.
//!
//! Each party holds one terminal of box 1 and one of box 2. For each value of
//! its own input bit a party picks which terminal to use first, feeds it a
//! fixed input, feeds the other terminal a function of the first output, and
//! finally outputs a function of both terminal outputs. No communication
//! between the parties is involved.
//!
//! # Encoding
//!
//! One byte per input value (a *slice*):
//!
//! | bits | field |
//! |------|-------|
//! | 0    | order: 0 = box 1 first, 1 = box 2 first |
//! | 1    | input fed to the first terminal |
//! | 2–3  | truth table of the second terminal's input as a function of the first output |
//! | 4–7  | truth table of the final output, indexed by `o1 | o2 << 1` |
//!
//! A [`PartyWiring`] packs the slice for input 0 in bits 0–7 and the slice for
//! input 1 in bits 16–23 of a `u32`; the remaining bits are reserved and zero.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::ops::Range;

use num_rational::BigRational;

use crate::boxworld::{anti_pr_box, box_twirl, index, noisy_pr_at, pr_box, pr_weight, BoxDistribution, EPS_NORM};
use crate::error::{Error, Result};
use crate::nogo;
use crate::scalar::{rational, Scalar};

pub const PARTY_WIRING_COUNT: usize = 1 << 16;
const RESERVED_BITS: u32 = 0xff00_ff00;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WiringSlice {
    pub box2_first: bool,
    pub first_input: u8,
    /// Bit `k` is the second terminal's input when the first output is `k`.
    pub second_input_fn: u8,
    /// Bit `o1 | o2 << 1` is the final output.
    pub output_fn: u8,
}

impl WiringSlice {
    pub const fn encode(self) -> u8 {
        (self.box2_first as u8)
            | (self.first_input & 1) << 1
            | (self.second_input_fn & 3) << 2
            | (self.output_fn & 15) << 4
    }

    pub const fn decode(byte: u8) -> Self {
        Self {
            box2_first: byte & 1 == 1,
            first_input: (byte >> 1) & 1,
            second_input_fn: (byte >> 2) & 3,
            output_fn: byte >> 4,
        }
    }

    /// Terminal inputs `(x1, x2)` and final output given terminal outputs.
    #[inline]
    pub const fn respond(self, o1: u8, o2: u8) -> (u8, u8, u8) {
        let out = (self.output_fn >> (o1 | o2 << 1)) & 1;
        if self.box2_first {
            ((self.second_input_fn >> o2) & 1, self.first_input, out)
        } else {
            (self.first_input, (self.second_input_fn >> o1) & 1, out)
        }
    }

    pub fn behavior(self) -> SliceBehavior {
        let mut bits = 0u16;
        for o in 0..4u8 {
            let (x1, x2, out) = self.respond(o & 1, o >> 1);
            bits |= ((x1 | x2 << 1 | out << 2) as u16) << (3 * o);
        }
        SliceBehavior(bits)
    }
}

/// Response table of one slice: for each terminal-output pair `(o1, o2)`,
/// the terminal inputs and the final output. Three bits per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SliceBehavior(pub u16);

impl SliceBehavior {
    #[inline]
    pub const fn respond(self, o1: u8, o2: u8) -> (u8, u8, u8) {
        let v = (self.0 >> (3 * (o1 | o2 << 1))) as u8;
        (v & 1, (v >> 1) & 1, (v >> 2) & 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartyWiring {
    /// Indexed by the party's own input bit.
    pub slices: [WiringSlice; 2],
}

impl PartyWiring {
    pub const fn encode(self) -> u32 {
        self.slices[0].encode() as u32 | (self.slices[1].encode() as u32) << 16
    }

    pub fn decode(code: u32) -> Result<Self> {
        if code & RESERVED_BITS != 0 {
            return Err(Error::InvalidEncoding(code));
        }
        Ok(Self {
            slices: [
                WiringSlice::decode(code as u8),
                WiringSlice::decode((code >> 16) as u8),
            ],
        })
    }

    pub fn behavior(self) -> WiringBehavior {
        WiringBehavior {
            slices: [self.slices[0].behavior(), self.slices[1].behavior()],
        }
    }

    /// Uses box 1 only and forwards its output.
    pub fn pass_through() -> Self {
        let slice = |input| WiringSlice {
            box2_first: false,
            first_input: input,
            second_input_fn: 0,
            output_fn: 0b1010,
        };
        Self { slices: [slice(0), slice(1)] }
    }

    /// Ignores both boxes and outputs `value`.
    pub fn constant(value: u8) -> Self {
        let slice = WiringSlice {
            box2_first: false,
            first_input: 0,
            second_input_fn: 0,
            output_fn: if value & 1 == 1 { 0b1111 } else { 0 },
        };
        Self { slices: [slice; 2] }
    }
}

/// Behavior table of a whole party. Equal behaviors give identical effective
/// boxes for every pair of input boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WiringBehavior {
    pub slices: [SliceBehavior; 2],
}

impl WiringBehavior {
    #[inline]
    pub fn respond(&self, input: u8, o1: u8, o2: u8) -> (u8, u8, u8) {
        self.slices[input as usize & 1].respond(o1, o2)
    }

    fn key(&self) -> u32 {
        self.slices[0].0 as u32 | (self.slices[1].0 as u32) << 16
    }
}

/// Every party wiring, in increasing order of its 32-bit encoding.
pub fn enumerate_party_wirings() -> Vec<PartyWiring> {
    (0..PARTY_WIRING_COUNT as u32)
        .map(|k| PartyWiring::decode((k & 0xff) | (k >> 8) << 16).expect("reserved bits clear"))
        .collect()
}

/// Distinct behaviors, in order of first appearance.
pub fn dedupe_behaviors(ws: &[PartyWiring]) -> Vec<WiringBehavior> {
    let mut seen = BTreeSet::new();
    ws.iter()
        .map(|w| w.behavior())
        .filter(|b| seen.insert(b.key()))
        .collect()
}

/// Composes two boxes through Alice's and Bob's wirings.
///
/// For every input pair, sums `box1(a1 b1|x1 y1)·box2(a2 b2|x2 y2)` over all
/// terminal outputs, with each party's terminal inputs read from its own
/// behavior table. Well defined for non-signalling boxes; an unnormalized
/// result is reported as an error.
pub fn effective_box(
    wa: &WiringBehavior,
    wb: &WiringBehavior,
    box1: &BoxDistribution,
    box2: &BoxDistribution,
) -> Result<BoxDistribution> {
    let mut out = [0.0; 16];
    for x in 0..2u8 {
        for y in 0..2u8 {
            for o in 0..16u8 {
                let (a1, a2, b1, b2) = (o & 1, (o >> 1) & 1, (o >> 2) & 1, (o >> 3) & 1);
                let (x1, x2, a) = wa.respond(x, a1, a2);
                let (y1, y2, b) = wb.respond(y, b1, b2);
                out[index(x, y, a, b)] += box1.get(x1, y1, a1, b1) * box2.get(x2, y2, a2, b2);
            }
        }
    }
    let d = BoxDistribution::new_unchecked(out);
    for x in 0..2u8 {
        for y in 0..2u8 {
            let total = d.row_sum(x, y);
            if libm::fabs(total - 1.0) > EPS_NORM {
                return Err(Error::IllPosedComposition { x, y, total });
            }
        }
    }
    Ok(d)
}

/// Purities `q_ij` of the twirled images of `s_i ⊗ s_j`, with `s_0` the
/// PR-box and `s_1` the anti-PR-box. Stored in the order `q00, q01, q10, q11`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadCoeffs {
    pub q00: f64,
    pub q01: f64,
    pub q10: f64,
    pub q11: f64,
}

impl QuadCoeffs {
    pub const fn from_array([q00, q01, q10, q11]: [f64; 4]) -> Self {
        Self { q00, q01, q10, q11 }
    }

    pub const fn as_array(&self) -> [f64; 4] {
        [self.q00, self.q01, self.q10, self.q11]
    }

    /// `p²q00 + p(1−p)(q01 + q10) + (1−p)²q11`.
    pub fn eval(&self, p: f64) -> f64 {
        let r = 1.0 - p;
        p * p * self.q00 + p * r * (self.q01 + self.q10) + r * r * self.q11
    }

    /// `λ·self + (1−λ)·other`: the coefficients of the shared-randomness mixture.
    pub fn mix(&self, lambda: f64, other: &QuadCoeffs) -> QuadCoeffs {
        let (a, b) = (self.as_array(), other.as_array());
        Self::from_array(core::array::from_fn(|k| lambda * a[k] + (1.0 - lambda) * b[k]))
    }

    pub fn in_unit_range(&self) -> bool {
        self.as_array().iter().all(|q| (0.0..=1.0).contains(q))
    }
}

pub fn extract_quad_coeffs(wa: &WiringBehavior, wb: &WiringBehavior) -> Result<QuadCoeffs> {
    let family = [pr_box(), anti_pr_box()];
    let mut q = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            let e = effective_box(wa, wb, &family[i], &family[j])?;
            q[2 * i + j] = pr_weight(&box_twirl(&e));
        }
    }
    Ok(QuadCoeffs::from_array(q))
}

/// Largest deviation between the simulated two-copy output purity and the
/// quadratic built from the extracted coefficients.
pub fn q_curve_check(wa: &WiringBehavior, wb: &WiringBehavior, samples: &[f64]) -> Result<f64> {
    let coeffs = extract_quad_coeffs(wa, wb)?;
    let mut worst: f64 = 0.0;
    for &p in samples {
        let s = noisy_pr_at(p)?;
        let out = pr_weight(&box_twirl(&effective_box(wa, wb, &s, &s)?));
        worst = worst.max(libm::fabs(out - coeffs.eval(p)));
    }
    Ok(worst)
}

/// A representative adaptive wiring with a NOT gate.
///
/// Alice feeds her input into box 1, feeds box 1's output into box 2 and
/// outputs the negated parity `¬(a1 ⊕ a2)`. Bob feeds his input into both
/// terminals and outputs `b1 ⊕ b2`.
pub fn figure2_wiring() -> (PartyWiring, PartyWiring) {
    // Output truth tables indexed by o1 | o2 << 1.
    const NOT_XOR: u8 = 0b1001;
    const XOR: u8 = 0b0110;
    const IDENTITY_FN: u8 = 0b10;
    let alice = |x| WiringSlice {
        box2_first: false,
        first_input: x,
        second_input_fn: IDENTITY_FN,
        output_fn: NOT_XOR,
    };
    let bob = |y| WiringSlice {
        box2_first: false,
        first_input: y,
        second_input_fn: if y == 1 { 0b11 } else { 0b00 },
        output_fn: XOR,
    };
    (
        PartyWiring { slices: [alice(0), alice(1)] },
        PartyWiring { slices: [bob(0), bob(1)] },
    )
}

/// Distinct slice behaviors, each represented by its smallest slice byte.
/// Sorted by that byte.
#[derive(Debug, Clone)]
pub struct SliceCatalog {
    codes: Vec<u8>,
    behaviors: Vec<SliceBehavior>,
}

impl Default for SliceCatalog {
    fn default() -> Self {
        Self::new()
    }
}

impl SliceCatalog {
    pub fn new() -> Self {
        let mut seen = BTreeSet::new();
        let mut codes = Vec::new();
        let mut behaviors = Vec::new();
        for byte in 0..=255u8 {
            let b = WiringSlice::decode(byte).behavior();
            if seen.insert(b) {
                codes.push(byte);
                behaviors.push(b);
            }
        }
        Self { codes, behaviors }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Number of distinct party behaviors.
    pub fn party_count(&self) -> usize {
        self.len() * self.len()
    }

    /// Party behavior `idx = hi·n + lo` pairs slice `lo` for input 0 with slice
    /// `hi` for input 1, so index order matches encoding order.
    pub fn party_slices(&self, idx: usize) -> (usize, usize) {
        (idx % self.len(), idx / self.len())
    }

    /// Smallest encoding among the wirings with this behavior.
    pub fn party_encoding(&self, idx: usize) -> u32 {
        let (lo, hi) = self.party_slices(idx);
        self.codes[lo] as u32 | (self.codes[hi] as u32) << 16
    }

    pub fn party_behavior(&self, idx: usize) -> WiringBehavior {
        let (lo, hi) = self.party_slices(idx);
        WiringBehavior {
            slices: [self.behaviors[lo], self.behaviors[hi]],
        }
    }

    pub fn slice_behavior(&self, k: usize) -> SliceBehavior {
        self.behaviors[k]
    }
}

/// Exact coefficient counts for PR/anti-PR inputs.
///
/// For Alice slice `i`, Bob slice `j` and target parity `t`, the packed entry
/// holds four byte counters `n_kl = #{terminal outputs : a1⊕b1⊕x1y1 = k,
/// a2⊕b2⊕x2y2 = l, a⊕b = t}`. Summing the entries for the four input pairs
/// (with `t = xy`) gives `16·q_kl`.
#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    packed: Vec<u32>,
}

impl PairTable {
    pub fn new(catalog: &SliceCatalog) -> Self {
        let n = catalog.len();
        let mut packed = alloc::vec![0u32; n * n * 2];
        for i in 0..n {
            let sa = catalog.slice_behavior(i);
            for j in 0..n {
                let sb = catalog.slice_behavior(j);
                for o in 0..16u8 {
                    let (a1, a2, b1, b2) = (o & 1, (o >> 1) & 1, (o >> 2) & 1, (o >> 3) & 1);
                    let (x1, x2, a) = sa.respond(a1, a2);
                    let (y1, y2, b) = sb.respond(b1, b2);
                    let k = a1 ^ b1 ^ (x1 & y1);
                    let l = a2 ^ b2 ^ (x2 & y2);
                    let t = (a ^ b) as usize;
                    packed[(i * n + j) * 2 + t] += 1 << (8 * (2 * k + l));
                }
            }
        }
        Self { n, packed }
    }

    #[inline]
    pub fn get(&self, alice_slice: usize, bob_slice: usize, parity: usize) -> u32 {
        self.packed[(alice_slice * self.n + bob_slice) * 2 + parity]
    }
}

/// Unpacks `[n00, n01, n10, n11]` from a packed counter word.
#[inline]
pub const fn unpack_counts(c: u32) -> [u8; 4] {
    [c as u8, (c >> 8) as u8, (c >> 16) as u8, (c >> 24) as u8]
}

/// Coefficient sixteenths for a pair of party behaviors.
pub fn pair_counts(catalog: &SliceCatalog, table: &PairTable, alice: usize, bob: usize) -> [u8; 4] {
    let (a0, a1) = catalog.party_slices(alice);
    let (b0, b1) = catalog.party_slices(bob);
    unpack_counts(table.get(a0, b0, 0) + table.get(a0, b1, 0) + table.get(a1, b0, 0) + table.get(a1, b1, 1))
}

pub fn counts_to_coeffs(n: [u8; 4]) -> QuadCoeffs {
    QuadCoeffs::from_array(n.map(|v| v as f64 / 16.0))
}

/// Gap statistics of one coefficient class, computed exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEntry {
    /// `sup (Q(p) − p)` over `(p_s, 1]`: the largest of the values at `p = 1`,
    /// at the vertex when it lies inside, and the limit at `p_s`. Bounds every
    /// grid point.
    pub sup: f64,
    /// `Q(p_s) − p_s`.
    pub boundary: f64,
}

const MAX_Q16: usize = 16;
const S_SPAN: usize = 2 * MAX_Q16 + 1;

/// Precomputed [`GapEntry`] for every `(n00, n01 + n10, n11)` with counts in
/// `0..=16`, in exact arithmetic. The gaps depend on the coefficients only
/// through these three.
#[derive(Debug, Clone)]
pub struct GapTable {
    entries: Vec<GapEntry>,
}

impl GapTable {
    pub fn new(p_s: &BigRational) -> Self {
        let mut entries = Vec::with_capacity((MAX_Q16 + 1) * S_SPAN * (MAX_Q16 + 1));
        for n00 in 0..=MAX_Q16 {
            for s in 0..S_SPAN {
                for n11 in 0..=MAX_Q16 {
                    let q = [
                        rational(n00 as i64, 16),
                        rational(s as i64, 32),
                        rational(s as i64, 32),
                        rational(n11 as i64, 16),
                    ];
                    let c = nogo::monomials(&q);
                    let (attained, _) = nogo::sup_gap_above(&c, p_s, &[]);
                    let boundary = nogo::eval_monomials(&nogo::gap_monomials(&c), p_s);
                    let sup = if boundary > attained { boundary.clone() } else { attained };
                    entries.push(GapEntry {
                        sup: sup.to_f64(),
                        boundary: boundary.to_f64(),
                    });
                }
            }
        }
        Self { entries }
    }

    #[inline]
    pub fn lookup(&self, n: [u8; 4]) -> GapEntry {
        let s = n[1] as usize + n[2] as usize;
        self.entries[(n[0] as usize * S_SPAN + s) * (MAX_Q16 + 1) + n[3] as usize]
    }
}

/// Result of scanning a block of Alice behaviors against every Bob behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockResult {
    pub pairs: u64,
    pub max_gap: f64,
    /// Party behavior indices `(alice, bob)` of the first pair attaining `max_gap`.
    pub witness: (u32, u32),
    pub max_boundary_gap: f64,
    /// Pairs with `Q(p_s) > p_s`.
    pub boundary_violations: u64,
    /// Pairs with a coefficient outside `[0, 1]`.
    pub range_violations: u64,
}

impl BlockResult {
    pub const fn empty() -> Self {
        Self {
            pairs: 0,
            max_gap: f64::NEG_INFINITY,
            witness: (u32::MAX, u32::MAX),
            max_boundary_gap: f64::NEG_INFINITY,
            boundary_violations: 0,
            range_violations: 0,
        }
    }

    /// Associative, commutative merge. The larger gap wins; equal gaps keep
    /// the lexicographically smaller witness.
    pub fn merge(&mut self, other: &BlockResult) {
        self.pairs += other.pairs;
        if other.max_gap > self.max_gap || (other.max_gap == self.max_gap && other.witness < self.witness) {
            self.max_gap = other.max_gap;
            self.witness = other.witness;
        }
        self.max_boundary_gap = self.max_boundary_gap.max(other.max_boundary_gap);
        self.boundary_violations += other.boundary_violations;
        self.range_violations += other.range_violations;
    }
}

/// Everything needed to evaluate the exhaustive search, independent of how
/// the work is scheduled.
#[derive(Debug, Clone)]
pub struct SearchKernel {
    catalog: SliceCatalog,
    table: PairTable,
    gaps: GapTable,
    grid: Vec<f64>,
}

impl SearchKernel {
    /// `p_s = 3/4`, the local threshold of the noisy PR family. The grid of
    /// [`search_grid`] is carried for reporting; the closed-form gaps already
    /// dominate it.
    pub fn new(grid_points: usize) -> Self {
        let catalog = SliceCatalog::new();
        let table = PairTable::new(&catalog);
        let gaps = GapTable::new(&rational(3, 4));
        Self {
            catalog,
            table,
            gaps,
            grid: search_grid(grid_points),
        }
    }

    pub fn gap_table(&self) -> &GapTable {
        &self.gaps
    }

    pub fn catalog(&self) -> &SliceCatalog {
        &self.catalog
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn party_count(&self) -> usize {
        self.catalog.party_count()
    }

    pub fn coeffs(&self, alice: usize, bob: usize) -> QuadCoeffs {
        counts_to_coeffs(pair_counts(&self.catalog, &self.table, alice, bob))
    }

    pub fn gap(&self, alice: usize, bob: usize) -> GapEntry {
        self.gaps.lookup(pair_counts(&self.catalog, &self.table, alice, bob))
    }

    /// Scans Alice behaviors in `alice` against all Bob behaviors, both in
    /// increasing index order.
    pub fn run_block(&self, alice: Range<usize>) -> BlockResult {
        let n = self.catalog.len();
        let mut res = BlockResult::empty();
        let mut u = alloc::vec![0u32; n];
        let mut v = alloc::vec![0u32; n];
        for a in alice {
            let (a0, a1) = self.catalog.party_slices(a);
            // Bob index b = b1·n + b0; counts = u[b0] + v[b1].
            for (b0, slot) in u.iter_mut().enumerate() {
                *slot = self.table.get(a0, b0, 0) + self.table.get(a1, b0, 0);
            }
            for (b1, slot) in v.iter_mut().enumerate() {
                *slot = self.table.get(a0, b1, 0) + self.table.get(a1, b1, 1);
            }
            for (b1, &vb) in v.iter().enumerate() {
                for (b0, &ub) in u.iter().enumerate() {
                    let counts = unpack_counts(ub + vb);
                    let g = self.gaps.lookup(counts);
                    if g.sup > res.max_gap {
                        res.max_gap = g.sup;
                        res.witness = (a as u32, (b1 * n + b0) as u32);
                    }
                    if g.boundary > res.max_boundary_gap {
                        res.max_boundary_gap = g.boundary;
                    }
                    if g.boundary > 0.0 {
                        res.boundary_violations += 1;
                    }
                    if counts.iter().any(|&c| c as usize > MAX_Q16) {
                        res.range_violations += 1;
                    }
                }
            }
            res.pairs += (n * n) as u64;
        }
        res
    }
}

/// `count` points `3/4 + k/(4·count)`, `k = 1..=count`: evenly spaced on
/// `(3/4, 1]` with the right endpoint included.
pub fn search_grid(count: usize) -> Vec<f64> {
    let n = count.max(1);
    (1..=n).map(|k| (3 * n + k) as f64 / (4 * n) as f64).collect()
}
