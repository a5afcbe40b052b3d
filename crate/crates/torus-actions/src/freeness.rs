//! Fixed-point analysis for the lifted torus actions.
//!
//! The symbolic half works on the finite-index subgroup whose elements have
//! closed-form maps (linear part `I`): a fixed point of such a map forces the
//! square of the amplitude sum `S = l₁α₁ + ... + l_pα_p` to be a rational
//! number, and the quadratic form `S²` has the integer coefficient matrix
//! `(l_j·l_k)`, which is nonzero whenever `l ≠ 0`.  Each
//! [`FixedPointReport`] records that obstruction exactly; no floating point
//! is involved.  [`lift_freeness`] then packages the index argument that
//! extends the conclusion from the subgroup to the whole group.
//!
//! The numeric half ([`numeric_fixed_point_scan`], [`orbit_iterate`]) is an
//! explicitly approximate cross-check that evaluates the maps on a grid once
//! the amplitudes are given concrete values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::action::centered_box;
use crate::analytic::{FreeActionFamily, TrigAffineMap};
use crate::error::Error;
use crate::matrix::{json_bigint, IntMatrix};
use crate::snf::{smith_normal_form, solve_integer};

/// A finite-index subgroup of `ℤᵖ`, given by the columns of an integer
/// matrix with nonzero determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    generators: IntMatrix,
}

impl SubgroupSpec {
    pub fn new(generators: IntMatrix) -> Result<Self, Error> {
        if !generators.is_square() {
            return Err(Error::InvalidInput(format!(
                "subgroup generators must form a square matrix, got {} x {}",
                generators.rows(),
                generators.cols()
            )));
        }
        if generators.determinant().is_zero() {
            return Err(Error::NotFiniteIndex);
        }
        Ok(SubgroupSpec { generators })
    }

    /// The subgroup `2ℤ × 2ℤ × ℤ^(p-2)` on which the closed-form maps live.
    pub fn standard(p: usize) -> Self {
        assert!(p >= 2, "the standard subgroup needs at least 2 generators");
        let generators = IntMatrix::from_fn(p, p, |i, j| {
            if i != j {
                BigInt::from(0)
            } else if i < 2 {
                BigInt::from(2)
            } else {
                BigInt::from(1)
            }
        });
        SubgroupSpec { generators }
    }

    pub fn rank(&self) -> usize {
        self.generators.rows()
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// The index in `ℤᵖ`: the absolute determinant of the generator matrix.
    pub fn index(&self) -> BigInt {
        self.generators.determinant().abs()
    }

    /// The exponent of the quotient group — the largest invariant factor of
    /// the generator matrix.  Multiplying any exponent vector by this lands
    /// in the subgroup.
    pub fn quotient_exponent(&self) -> BigInt {
        let snf = smith_normal_form(&self.generators);
        snf.diagonal().last().cloned().unwrap_or_else(|| BigInt::from(1))
    }

    /// Writes `exponents` as an integer combination of the generators, if it
    /// lies in the subgroup.
    pub fn coefficients_of(&self, exponents: &[i64]) -> Option<Vec<BigInt>> {
        if exponents.len() != self.rank() {
            return None;
        }
        let target: Vec<BigInt> = exponents.iter().map(|&e| BigInt::from(e)).collect();
        solve_integer(&self.generators, &target)
    }

    pub fn contains(&self, exponents: &[i64]) -> bool {
        self.coefficients_of(exponents).is_some()
    }
}

/// Outcome of an exact fixed-point elimination for one group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FixedPointVerdict {
    /// The zero element: its map is the identity and fixes everything.
    IdentityMap,
    /// The elimination shows the map cannot fix any point of the torus.
    NoFixedPoint,
    /// A fixed point is known (never produced by the symbolic elimination;
    /// carried so external evidence can be represented and rejected).
    FixedPointFound,
}

/// One monomial `coeff · α_j·α_k` (with `j ≤ k`, 1-based) of the rational
/// obstruction form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadTerm {
    pub j: usize,
    pub k: usize,
    #[serde(with = "json_bigint")]
    pub coeff: BigInt,
}

/// Why the map with amplitude sum `S` has no fixed point: any fixed point
/// would make `S²` rational, but `S²` is the listed quadratic form in the
/// amplitudes with nonzero integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub quadratic: Vec<QuadTerm>,
    pub note: String,
}

/// Exact fixed-point verdict for one subgroup element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Subgroup coefficients `(l_1, ..., l_p)` of the element examined.
    pub coefficients: Vec<i64>,
    pub verdict: FixedPointVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub obstruction: Option<Obstruction>,
    /// A point fixed by the map, for `FixedPointFound` evidence only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<[f64; 3]>,
}

/// Runs the exact elimination for the subgroup element with coefficients
/// `(l_1, ..., l_p)`.
///
/// The closed-form map translates the third coordinate by an integer and
/// moves `(x, y)` by `(S·cos(2πz) - (a/2)·S·sin(2πz) + t₁, S·sin(2πz) + t₂)`
/// with rational `t₁`, `t₂`.  A fixed point on the torus therefore requires
/// integers `n₁`, `n₂` with `S·sin(2πz) = n₂ - t₂` and
/// `S·cos(2πz) = n₁ - t₁ + (a/2)(n₂ - t₂)`; summing squares makes
/// `S² = Σ l_j·l_k·α_j·α_k` rational.  For nonzero `l` the form has the
/// nonzero diagonal coefficients `l_j²`, which is the recorded obstruction:
/// every amplitude tuple keeping the nonzero integer quadratic forms of the
/// `α_j` irrational (logarithms of distinct primes, or any algebraically
/// independent choice) admits no fixed point.
pub fn fixed_point_on_subgroup(
    family: &FreeActionFamily,
    coefficients: &[i64],
) -> Result<FixedPointReport, Error> {
    let p = family.p();
    if coefficients.len() != p {
        return Err(Error::ExponentLength { expected: p, got: coefficients.len() });
    }
    if coefficients.iter().all(|&l| l == 0) {
        return Ok(FixedPointReport {
            coefficients: coefficients.to_vec(),
            verdict: FixedPointVerdict::IdentityMap,
            obstruction: None,
            witness: None,
        });
    }

    let map = family.closed_form_power(coefficients)?;
    if !map.linear().is_identity() || !map.translation()[2].is_integer() {
        return Err(Error::internal(
            "a closed-form subgroup element must translate the third coordinate by an integer",
        ));
    }
    let s = &map.cos_amp()[0];
    if &map.sin_amp()[1] != s || !map.cos_amp()[1].is_zero() {
        return Err(Error::internal(
            "a closed-form subgroup element must oscillate with amplitude sum S in x-cos and y-sin",
        ));
    }

    let mut quadratic = Vec::new();
    for j in 0..p {
        for k in j..p {
            let coeff = if j == k {
                BigInt::from(coefficients[j]) * coefficients[j]
            } else {
                BigInt::from(2) * coefficients[j] * coefficients[k]
            };
            if !coeff.is_zero() {
                quadratic.push(QuadTerm { j: j + 1, k: k + 1, coeff });
            }
        }
    }
    debug_assert!(!quadratic.is_empty());

    Ok(FixedPointReport {
        coefficients: coefficients.to_vec(),
        verdict: FixedPointVerdict::NoFixedPoint,
        obstruction: Some(Obstruction {
            quadratic,
            note: "a fixed point would force S² to be rational, where S is the amplitude sum \
                   of the element; S² is the listed nonzero integer quadratic form in the \
                   amplitudes, which stays irrational for amplitudes that are algebraically \
                   independent (for instance logarithms of distinct primes)"
                .into(),
        }),
        witness: None,
    })
}

/// Convenience wrapper taking raw exponents in the re-based generators:
/// checks membership in the standard subgroup `2ℤ × 2ℤ × ℤ^(p-2)` and then
/// runs [`fixed_point_on_subgroup`] on the coefficients.
pub fn fixed_point_for_exponents(
    family: &FreeActionFamily,
    exponents: &[i64],
) -> Result<FixedPointReport, Error> {
    let p = family.p();
    if exponents.len() != p {
        return Err(Error::ExponentLength { expected: p, got: exponents.len() });
    }
    let subgroup = SubgroupSpec::standard(p);
    let coefficients = subgroup
        .coefficients_of(exponents)
        .ok_or_else(|| Error::NotInSubgroup { exponent: exponents.to_vec() })?;
    let coefficients: Vec<i64> = coefficients
        .iter()
        .map(|c| c.to_i64())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidInput("subgroup coefficients exceed i64".into()))?;
    fixed_point_on_subgroup(family, &coefficients)
}

/// The index argument promoting subgroup freeness to the whole group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    #[serde(with = "json_bigint")]
    pub subgroup_index: BigInt,
    #[serde(with = "json_bigint")]
    pub quotient_exponent: BigInt,
    pub evidence_count: usize,
    pub statement: String,
}

/// Combines per-element evidence on a finite-index subgroup into a freeness
/// statement for the full action.
///
/// If `e` is the exponent of `ℤᵖ` modulo the subgroup, then `e·m` lies in
/// the subgroup for every exponent vector `m`, and `e·m ≠ 0` whenever
/// `m ≠ 0` because `ℤᵖ` is torsion-free.  A point fixed by the map of `m`
/// is also fixed by its `e`-th power, the map of `e·m` — so fixed-point
/// freeness on the subgroup (which the symbolic elimination establishes for
/// every nonzero element at once) forces freeness of the whole action.
/// Evidence reports claiming an actual fixed point are rejected.
pub fn lift_freeness(
    subgroup: &SubgroupSpec,
    evidence: &[FixedPointReport],
) -> Result<FreenessCertificate, Error> {
    for (index, report) in evidence.iter().enumerate() {
        if report.verdict == FixedPointVerdict::FixedPointFound {
            return Err(Error::FixedPointEvidence { index });
        }
    }
    let subgroup_index = subgroup.index();
    let quotient_exponent = subgroup.quotient_exponent();
    let statement = format!(
        "every nonzero element of the index-{subgroup_index} subgroup acts without fixed \
         points; for any nonzero exponent vector m, {quotient_exponent}·m is a nonzero \
         subgroup element and a fixed point of the map of m would also be fixed by the map \
         of {quotient_exponent}·m, so the full action is free"
    );
    Ok(FreenessCertificate {
        subgroup_index,
        quotient_exponent,
        evidence_count: evidence.len(),
        statement,
    })
}

/// Logarithms of the first `p` primes — a concrete amplitude tuple whose
/// integer quadratic forms are irrational, suitable for the numeric helpers.
pub fn default_amplitudes(p: usize) -> Vec<f64> {
    let mut primes: Vec<u64> = Vec::with_capacity(p);
    let mut candidate = 2u64;
    while primes.len() < p {
        if primes.iter().all(|&q| !candidate.is_multiple_of(q)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes.into_iter().map(|q| (q as f64).ln()).collect()
}

/// Reduces a point of `ℝ³` into the fundamental cube `[0, 1)³`.
pub fn reduce_unit(point: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| point[i].rem_euclid(1.0))
}

/// Distance of `delta` from the nearest integer — the displacement of one
/// coordinate on the circle.
fn circle_distance(delta: f64) -> f64 {
    (delta - delta.round()).abs()
}

/// Grid parameters for [`numeric_fixed_point_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Exponent vectors range over `[-exponent_radius, exponent_radius]^p`,
    /// zero excluded.
    pub exponent_radius: i64,
    /// Sample points per coordinate axis.
    pub grid: usize,
    /// Entries with a minimum displacement below this are flagged.
    pub tolerance: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { exponent_radius: 2, grid: 64, tolerance: 1e-3 }
    }
}

/// Displacement minimum of one element's torus map over the sample grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub exponents: Vec<i64>,
    /// Smallest over the grid of the largest coordinate displacement.
    pub min_displacement: f64,
    /// First grid point attaining the minimum.
    pub argmin: [f64; 3],
    /// True when `min_displacement` fell below the tolerance.
    pub flagged: bool,
}

/// Result of a numeric scan, keyed by comma-joined exponent vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub alpha: Vec<f64>,
    pub config: ScanConfig,
    pub entries: BTreeMap<String, ScanEntry>,
}

impl ScanReport {
    /// True when no element came within tolerance of having a fixed point.
    pub fn all_clear(&self) -> bool {
        self.entries.values().all(|e| !e.flagged)
    }

    /// The smallest displacement minimum over all scanned elements.
    pub fn global_minimum(&self) -> Option<f64> {
        self.entries
            .values()
            .map(|e| e.min_displacement)
            .min_by(|a, b| a.partial_cmp(b).expect("displacements are finite"))
    }
}

pub(crate) fn exponent_key(exponents: &[i64]) -> String {
    exponents.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// Measures, for every nonzero exponent vector in a box, how close the
/// element's torus map comes to fixing a grid point.  This is a numeric
/// cross-check of the exact elimination, not a proof: the amplitudes are
/// evaluated in floating point and only grid points are examined.
pub fn numeric_fixed_point_scan(
    family: &FreeActionFamily,
    alpha: &[f64],
    config: &ScanConfig,
) -> Result<ScanReport, Error> {
    let p = family.p();
    if alpha.len() != p {
        return Err(Error::AlphaCount { expected: p, got: alpha.len() });
    }
    if config.grid == 0 {
        return Err(Error::InvalidInput("scan grid must have at least one point".into()));
    }
    if config.exponent_radius < 0 {
        return Err(Error::InvalidInput("exponent radius must be nonnegative".into()));
    }
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(Error::InvalidInput("scan tolerance must be positive and finite".into()));
    }

    let n = config.grid;
    let step = 1.0 / n as f64;
    let mut entries = BTreeMap::new();
    for exponents in centered_box(p, config.exponent_radius) {
        if exponents.iter().all(|&m| m == 0) {
            continue;
        }
        let map = family.element_map(&exponents)?;
        let linear: [[f64; 3]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|k| map.linear().at(i, k).to_f64().expect("entry fits in f64"))
        });
        let translation: [f64; 3] = std::array::from_fn(|i| map.translation()[i].eval(alpha));
        let cos_amp: [f64; 3] = std::array::from_fn(|i| map.cos_amp()[i].eval(alpha));
        let sin_amp: [f64; 3] = std::array::from_fn(|i| map.sin_amp()[i].eval(alpha));

        let mut min_displacement = f64::INFINITY;
        let mut argmin = [0.0; 3];
        for iz in 0..n {
            let z = iz as f64 * step;
            let (sin_z, cos_z) = (std::f64::consts::TAU * z).sin_cos();
            for iy in 0..n {
                let y = iy as f64 * step;
                for ix in 0..n {
                    let x = ix as f64 * step;
                    let point = [x, y, z];
                    let mut displacement: f64 = 0.0;
                    for i in 0..3 {
                        let image = linear[i][0] * x
                            + linear[i][1] * y
                            + linear[i][2] * z
                            + translation[i]
                            + cos_amp[i] * cos_z
                            + sin_amp[i] * sin_z;
                        displacement = displacement.max(circle_distance(image - point[i]));
                    }
                    if displacement < min_displacement {
                        min_displacement = displacement;
                        argmin = point;
                    }
                }
            }
        }
        entries.insert(
            exponent_key(&exponents),
            ScanEntry {
                exponents,
                min_displacement,
                argmin,
                flagged: min_displacement < config.tolerance,
            },
        );
    }
    Ok(ScanReport { alpha: alpha.to_vec(), config: *config, entries })
}

/// Applies generator lifts one at a time, starting from `start`, reducing
/// into `[0, 1)³` after every step.  Each word letter is a signed 1-based
/// generator index (`-i` applies the inverse of generator `i`); the returned
/// trajectory includes the starting point, so it has `word.len() + 1` rows.
pub fn orbit_iterate(
    family: &FreeActionFamily,
    alpha: &[f64],
    start: [f64; 3],
    word: &[i64],
) -> Result<Vec<[f64; 3]>, Error> {
    let p = family.p();
    if alpha.len() != p {
        return Err(Error::AlphaCount { expected: p, got: alpha.len() });
    }
    let mut maps: Vec<Option<TrigAffineMap>> = vec![None; 2 * p];
    let mut trajectory = Vec::with_capacity(word.len() + 1);
    let mut current = reduce_unit(start);
    trajectory.push(current);
    for &letter in word {
        let index = letter.unsigned_abs() as usize;
        if letter == 0 || index > p {
            return Err(Error::IndexOutOfRange { index, p });
        }
        let slot = if letter > 0 { index - 1 } else { p + index - 1 };
        let map = maps[slot].get_or_insert_with(|| {
            let lift = family.lift(index);
            if letter > 0 {
                lift.clone()
            } else {
                lift.inverse()
            }
        });
        current = reduce_unit(map.apply_numeric(current, alpha));
        trajectory.push(current);
    }
    Ok(trajectory)
}

/// Renders a trajectory as CSV with the header `step,x,y,z`.
pub fn trajectory_csv(points: &[[f64; 3]]) -> String {
    let mut out = String::from("step,x,y,z\n");
    for (step, point) in points.iter().enumerate() {
        out.push_str(&format!("{step},{},{},{}\n", point[0], point[1], point[2]));
    }
    out
}
