//! Symbolic torus self-maps of the form
//!
//! ```text
//! w ↦ A·w + t + u·cos(2πz) + v·sin(2πz),      z = third coordinate of w
//! ```
//!
//! where `A` is an integer unimodular matrix whose third row is `(0, 0, ±1)`,
//! the translation `t` has an amplitude-free half-integer third entry, and
//! the trigonometric coefficient vectors `u`, `v` vanish in the third
//! coordinate.  This class of real-analytic maps descends to the 3-torus, is
//! closed under composition and inverse (both implemented exactly on
//! [`SymScalar`] coefficients), and contains commuting lifts for every
//! Klein-four normal form produced by [`crate::normal_form`].
//!
//! The composition law does all the work: writing `ε` for the third-row sign
//! of the linear part and `σ = +1` or `-1` according to whether the third
//! translation entry is an integer or a half-odd-integer,
//!
//! ```text
//! (F ∘ G): linear A_F·A_G,   t = A_F·t_G + t_F,
//!          u = A_F·u_G + σ_G·u_F,   v = A_F·v_G + σ_G·ε_G·v_F,
//! ```
//!
//! because `cos(2π(ε_G z + (t_G)_3)) = σ_G cos(2πz)` and
//! `sin(2π(ε_G z + (t_G)_3)) = σ_G ε_G sin(2πz)`.  Every claimed identity
//! about the constructed maps is checked by composing symbolically and
//! comparing coefficients — never by numeric sampling.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::action::ActionSpec;
use crate::error::Error;
use crate::matrix::{json_bigint_vec, IntMatrix};
use crate::normal_form::{relation_defect, NormalFormResult};
use crate::sym::SymScalar;

fn sym3_zero() -> [SymScalar; 3] {
    std::array::from_fn(|_| SymScalar::zero())
}

fn sym3_add(a: &[SymScalar; 3], b: &[SymScalar; 3]) -> [SymScalar; 3] {
    std::array::from_fn(|i| &a[i] + &b[i])
}

fn sym3_scale(a: &[SymScalar; 3], k: &BigInt) -> [SymScalar; 3] {
    std::array::from_fn(|i| a[i].scale_int(k))
}

/// Applies an integer `3 x 3` matrix to a symbolic vector.
fn mat_apply(m: &IntMatrix, v: &[SymScalar; 3]) -> [SymScalar; 3] {
    std::array::from_fn(|i| {
        let mut acc = SymScalar::zero();
        for (k, entry) in v.iter().enumerate() {
            acc = &acc + &entry.scale_int(m.at(i, k));
        }
        acc
    })
}

/// A map `w ↦ A·w + t + u·cos(2πz) + v·sin(2πz)` in the class described in
/// the module docs.  Instances are immutable and always satisfy the class
/// invariants; compare with `==` for exact semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigAffineMap {
    linear: IntMatrix,
    translation: [SymScalar; 3],
    cos_amp: [SymScalar; 3],
    sin_amp: [SymScalar; 3],
}

impl TrigAffineMap {
    /// Builds a map after checking the class invariants.
    pub fn new(
        linear: IntMatrix,
        translation: [SymScalar; 3],
        cos_amp: [SymScalar; 3],
        sin_amp: [SymScalar; 3],
    ) -> Result<Self, Error> {
        Self::validate(&linear, &translation, &cos_amp, &sin_amp)?;
        Ok(TrigAffineMap { linear, translation, cos_amp, sin_amp })
    }

    fn validate(
        linear: &IntMatrix,
        translation: &[SymScalar; 3],
        cos_amp: &[SymScalar; 3],
        sin_amp: &[SymScalar; 3],
    ) -> Result<(), Error> {
        let shape = |reason: String| Error::UnsupportedMapShape { reason };
        if linear.rows() != 3 || linear.cols() != 3 {
            return Err(shape(format!(
                "linear part must be 3 x 3, got {} x {}",
                linear.rows(),
                linear.cols()
            )));
        }
        if !linear.is_unimodular() {
            return Err(shape("linear part must be unimodular".into()));
        }
        if !linear.at(2, 0).is_zero()
            || !linear.at(2, 1).is_zero()
            || !linear.at(2, 2).abs().is_one()
        {
            return Err(shape(
                "third row of the linear part must be (0, 0, 1) or (0, 0, -1)".into(),
            ));
        }
        if !translation[2].is_half_integer() {
            return Err(shape(
                "third translation entry must be an amplitude-free half-integer".into(),
            ));
        }
        if !cos_amp[2].is_zero() || !sin_amp[2].is_zero() {
            return Err(shape(
                "the third coordinate must carry no trigonometric terms".into(),
            ));
        }
        Ok(())
    }

    /// Internal constructor for values produced by closed operations.
    fn raw(
        linear: IntMatrix,
        translation: [SymScalar; 3],
        cos_amp: [SymScalar; 3],
        sin_amp: [SymScalar; 3],
    ) -> Self {
        debug_assert!(Self::validate(&linear, &translation, &cos_amp, &sin_amp).is_ok());
        TrigAffineMap { linear, translation, cos_amp, sin_amp }
    }

    pub fn identity() -> Self {
        TrigAffineMap {
            linear: IntMatrix::identity(3),
            translation: sym3_zero(),
            cos_amp: sym3_zero(),
            sin_amp: sym3_zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity()
    }

    pub fn linear(&self) -> &IntMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &[SymScalar; 3] {
        &self.translation
    }

    pub fn cos_amp(&self) -> &[SymScalar; 3] {
        &self.cos_amp
    }

    pub fn sin_amp(&self) -> &[SymScalar; 3] {
        &self.sin_amp
    }

    /// Sign `ε = ±1` with which the map scales the third coordinate.
    pub fn epsilon(&self) -> i8 {
        if self.linear.at(2, 2).is_one() {
            1
        } else {
            -1
        }
    }

    /// `+1` when the third translation entry is an integer, `-1` when it is
    /// a half-odd-integer; this is the sign picked up by `cos(2πz)` after
    /// the map.
    pub fn sigma(&self) -> i8 {
        if self.translation[2].is_integer() {
            1
        } else {
            -1
        }
    }

    /// The trigonometric part of coordinate `i` as a `(cos, sin)` pair.
    pub fn coordinate_trig(&self, i: usize) -> TrigPair {
        TrigPair { cos: self.cos_amp[i].clone(), sin: self.sin_amp[i].clone() }
    }

    /// Exact composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &TrigAffineMap) -> TrigAffineMap {
        let sigma = BigInt::from(other.sigma());
        let sigma_eps = &sigma * BigInt::from(other.epsilon());
        let linear = &self.linear * &other.linear;
        let translation = sym3_add(&mat_apply(&self.linear, &other.translation), &self.translation);
        let cos_amp = sym3_add(
            &mat_apply(&self.linear, &other.cos_amp),
            &sym3_scale(&self.cos_amp, &sigma),
        );
        let sin_amp = sym3_add(
            &mat_apply(&self.linear, &other.sin_amp),
            &sym3_scale(&self.sin_amp, &sigma_eps),
        );
        TrigAffineMap::raw(linear, translation, cos_amp, sin_amp)
    }

    /// Exact inverse; `f.inverse().compose(&f)` is the identity map.
    pub fn inverse(&self) -> TrigAffineMap {
        let inv = self
            .linear
            .inverse()
            .expect("the linear part of a map in this class is unimodular");
        let minus_one = BigInt::from(-1);
        let minus_sigma = BigInt::from(-i64::from(self.sigma()));
        let minus_sigma_eps = &minus_sigma * BigInt::from(self.epsilon());
        let translation = sym3_scale(&mat_apply(&inv, &self.translation), &minus_one);
        let cos_amp = sym3_scale(&mat_apply(&inv, &self.cos_amp), &minus_sigma);
        let sin_amp = sym3_scale(&mat_apply(&inv, &self.sin_amp), &minus_sigma_eps);
        TrigAffineMap::raw(inv, translation, cos_amp, sin_amp)
    }

    /// `n`-fold composition power; negative `n` goes through the inverse.
    pub fn power(&self, n: i64) -> TrigAffineMap {
        if n == 0 {
            return TrigAffineMap::identity();
        }
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Evaluates the map at a point of `ℝ³` once the amplitudes are given
    /// numeric values.  The result is not reduced modulo `ℤ³`.
    pub fn apply_numeric(&self, point: [f64; 3], alpha: &[f64]) -> [f64; 3] {
        let angle = std::f64::consts::TAU * point[2];
        let (sin_z, cos_z) = angle.sin_cos();
        std::array::from_fn(|i| {
            let mut acc = 0.0;
            for (k, coordinate) in point.iter().enumerate() {
                acc += self
                    .linear
                    .at(i, k)
                    .to_f64()
                    .expect("matrix entry fits in f64")
                    * coordinate;
            }
            acc + self.translation[i].eval(alpha)
                + self.cos_amp[i].eval(alpha) * cos_z
                + self.sin_amp[i].eval(alpha) * sin_z
        })
    }
}

fn fmt_sym_factor(s: &SymScalar) -> String {
    format!("({s})")
}

impl fmt::Display for TrigAffineMap {
    /// Renders the map coordinate-wise, e.g.
    /// `(x, y, z) ↦ (x + 2*y + (1/2*α1)·cos(2πz), y, -z + (1/2))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const VARS: [&str; 3] = ["x", "y", "z"];
        write!(f, "(x, y, z) ↦ (")?;
        for i in 0..3 {
            if i > 0 {
                write!(f, ", ")?;
            }
            let mut out = String::new();
            for (k, var) in VARS.iter().enumerate() {
                let coeff = self.linear.at(i, k);
                if coeff.is_zero() {
                    continue;
                }
                if out.is_empty() {
                    if *coeff == BigInt::from(-1) {
                        out.push('-');
                    } else if !coeff.is_one() {
                        out.push_str(&format!("{coeff}*"));
                    }
                } else if coeff.is_negative() {
                    out.push_str(" - ");
                    let mag = coeff.abs();
                    if !mag.is_one() {
                        out.push_str(&format!("{mag}*"));
                    }
                } else {
                    out.push_str(" + ");
                    if !coeff.is_one() {
                        out.push_str(&format!("{coeff}*"));
                    }
                }
                out.push_str(var);
            }
            let push_term = |out: &mut String, text: String| {
                if !out.is_empty() {
                    out.push_str(" + ");
                }
                out.push_str(&text);
            };
            if !self.translation[i].is_zero() {
                push_term(&mut out, fmt_sym_factor(&self.translation[i]));
            }
            if !self.cos_amp[i].is_zero() {
                push_term(&mut out, format!("{}·cos(2πz)", fmt_sym_factor(&self.cos_amp[i])));
            }
            if !self.sin_amp[i].is_zero() {
                push_term(&mut out, format!("{}·sin(2πz)", fmt_sym_factor(&self.sin_amp[i])));
            }
            if out.is_empty() {
                out.push('0');
            }
            write!(f, "{out}")?;
        }
        write!(f, ")")
    }
}

// --- serde -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MapWire {
    linear: IntMatrix,
    translation: Vec<SymScalar>,
    cos: Vec<SymScalar>,
    sin: Vec<SymScalar>,
}

impl Serialize for TrigAffineMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MapWire {
            linear: self.linear.clone(),
            translation: self.translation.to_vec(),
            cos: self.cos_amp.to_vec(),
            sin: self.sin_amp.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigAffineMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MapWire::deserialize(deserializer)?;
        let take3 = |v: Vec<SymScalar>, what: &str| -> Result<[SymScalar; 3], D::Error> {
            let len = v.len();
            <[SymScalar; 3]>::try_from(v)
                .map_err(|_| de::Error::custom(format!("{what} must have 3 entries, got {len}")))
        };
        TrigAffineMap::new(
            wire.linear,
            take3(wire.translation, "translation")?,
            take3(wire.cos, "cos")?,
            take3(wire.sin, "sin")?,
        )
        .map_err(de::Error::custom)
    }
}

/// A trigonometric polynomial `C·cos(2πz) + S·sin(2πz)` with symbolic
/// coefficients — one coordinate's oscillating part, used to state and check
/// the equivariance identities of the generator lifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigPair {
    pub cos: SymScalar,
    pub sin: SymScalar,
}

impl TrigPair {
    pub fn zero() -> Self {
        TrigPair { cos: SymScalar::zero(), sin: SymScalar::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_zero() && self.sin.is_zero()
    }

    /// The pair of `z ↦ f(-z)`: `(C, -S)`.
    pub fn negate_z(&self) -> TrigPair {
        TrigPair { cos: self.cos.clone(), sin: -&self.sin }
    }

    /// The pair of `z ↦ f(z + 1/2)`: `(-C, -S)`.
    pub fn shift_half(&self) -> TrigPair {
        TrigPair { cos: -&self.cos, sin: -&self.sin }
    }

    pub fn add(&self, other: &TrigPair) -> TrigPair {
        TrigPair { cos: &self.cos + &other.cos, sin: &self.sin + &other.sin }
    }

    pub fn sub(&self, other: &TrigPair) -> TrigPair {
        TrigPair { cos: &self.cos - &other.cos, sin: &self.sin - &other.sin }
    }

    pub fn neg(&self) -> TrigPair {
        TrigPair { cos: -&self.cos, sin: -&self.sin }
    }

    pub fn scale_int(&self, k: &BigInt) -> TrigPair {
        TrigPair { cos: self.cos.scale_int(k), sin: self.sin.scale_int(k) }
    }
}

/// Result of comparing `g ∘ f` with `f ∘ g` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommutatorDefect {
    /// The composites differ by the constant integer translation `offset`;
    /// the two maps therefore commute on the torus.
    Constant {
        #[serde(with = "json_bigint_vec")]
        offset: Vec<BigInt>,
    },
    /// Any other discrepancy, reported term by term (each field is the
    /// `g ∘ f` value minus the `f ∘ g` value).
    Mismatch {
        linear_difference: IntMatrix,
        translation_difference: Vec<SymScalar>,
        cos_difference: Vec<SymScalar>,
        sin_difference: Vec<SymScalar>,
    },
}

impl CommutatorDefect {
    /// The integer translation when the maps commute on the torus.
    pub fn constant_offset(&self) -> Option<&[BigInt]> {
        match self {
            CommutatorDefect::Constant { offset } => Some(offset),
            CommutatorDefect::Mismatch { .. } => None,
        }
    }

    pub fn is_integer_translation(&self) -> bool {
        matches!(self, CommutatorDefect::Constant { .. })
    }
}

impl fmt::Display for CommutatorDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorDefect::Constant { offset } => {
                write!(f, "integer translation ({}, {}, {})", offset[0], offset[1], offset[2])
            }
            CommutatorDefect::Mismatch {
                linear_difference,
                translation_difference,
                cos_difference,
                sin_difference,
            } => {
                write!(
                    f,
                    "mismatch: Δlinear = {linear_difference}, Δt = ({}, {}, {}), \
                     Δcos = ({}, {}, {}), Δsin = ({}, {}, {})",
                    translation_difference[0],
                    translation_difference[1],
                    translation_difference[2],
                    cos_difference[0],
                    cos_difference[1],
                    cos_difference[2],
                    sin_difference[0],
                    sin_difference[1],
                    sin_difference[2],
                )
            }
        }
    }
}

/// Compares `g ∘ f` with `f ∘ g` coefficient by coefficient.  Two maps in
/// this class commute as torus maps exactly when the defect is a constant
/// integer translation.
pub fn commutator_defect(f: &TrigAffineMap, g: &TrigAffineMap) -> CommutatorDefect {
    let gf = g.compose(f);
    let fg = f.compose(g);
    let linear_difference = gf.linear.sub(&fg.linear);
    let translation_difference: Vec<SymScalar> =
        (0..3).map(|i| &gf.translation[i] - &fg.translation[i]).collect();
    let cos_difference: Vec<SymScalar> =
        (0..3).map(|i| &gf.cos_amp[i] - &fg.cos_amp[i]).collect();
    let sin_difference: Vec<SymScalar> =
        (0..3).map(|i| &gf.sin_amp[i] - &fg.sin_amp[i]).collect();

    let trig_matches = cos_difference.iter().all(SymScalar::is_zero)
        && sin_difference.iter().all(SymScalar::is_zero);
    let offsets: Option<Vec<BigInt>> = translation_difference
        .iter()
        .map(|d| {
            d.as_rational()
                .filter(|r| r.is_integer())
                .map(BigRational::to_integer)
        })
        .collect();
    match offsets {
        Some(offset) if linear_difference == IntMatrix::zeros(3, 3) && trig_matches => {
            CommutatorDefect::Constant { offset }
        }
        _ => CommutatorDefect::Mismatch {
            linear_difference,
            translation_difference,
            cos_difference,
            sin_difference,
        },
    }
}

/// One commutator check inside an [`ActionLawReport`]; `i < j` are 1-based
/// generator indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDefect {
    pub i: usize,
    pub j: usize,
    pub defect: CommutatorDefect,
}

/// One symbolically checked coefficient identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// The full machine verification that a lift family defines a torus action:
/// every pairwise commutator defect, plus the trigonometric equivariance
/// identities satisfied by the generator amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionLawReport {
    pub pair_defects: Vec<PairDefect>,
    pub identities: Vec<IdentityCheck>,
}

impl ActionLawReport {
    /// True when every defect is an integer translation and every identity
    /// holds — exactly the condition for the lifts to induce a torus action
    /// of the free abelian group.
    pub fn all_hold(&self) -> bool {
        self.pair_defects.iter().all(|p| p.defect.is_integer_translation())
            && self.identities.iter().all(|c| c.holds)
    }
}

/// A family of commuting real-analytic torus maps lifting a Klein-four
/// normal form: one [`TrigAffineMap`] per generator of the re-based `ℤᵖ`,
/// with formal translation amplitudes `α_1, ..., α_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeActionFamily {
    normal_form: NormalFormResult,
    lifts: Vec<TrigAffineMap>,
}

impl FreeActionFamily {
    /// Builds the generator lifts for a normal form `(a, b, c, d)` on `p`
    /// generators and machine-verifies the action laws before returning.
    ///
    /// With `r = -b/4` the lifts are
    ///
    /// ```text
    /// lift 1:  w ↦ N·w + (r, 0, 0)           + (α₁/2)(cos 2πz, 0, 0) - (α₁/2)(0, sin 2πz, 0)
    /// lift 2:  w ↦ M·w + (0, 0, 1/2)         - (α₂/2)(cos 2πz, 0, 0) + ((a/4)α₂, -α₂/2, 0)·sin 2πz
    /// lift j:  w ↦ w + α_j·(cos 2πz, 0, 0) + α_j·(-a/2, 1, 0)·sin 2πz        (j ≥ 3)
    /// ```
    ///
    /// Every pair of lifts is then composed both ways: the defect must be
    /// the integer translation `(0, 0, 1)` for the pair `(1, 2)` and zero
    /// for all other pairs, so the induced torus maps commute and the family
    /// defines an action of `ℤᵖ`.
    pub fn build_generators(normal_form: &NormalFormResult) -> Result<Self, Error> {
        let p = normal_form.p();
        if p < 2 {
            return Err(Error::InvalidInput(format!(
                "a lift family needs at least 2 generators, got {p}"
            )));
        }
        let lhs = relation_defect(&normal_form.a, &normal_form.b, &normal_form.c, &normal_form.d);
        if !lhs.is_zero() {
            return Err(Error::RelationViolated { lhs });
        }

        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let r = BigRational::new(-normal_form.b.clone(), BigInt::from(4));
        let a_half = BigRational::new(normal_form.a.clone(), BigInt::from(2));
        let a_quarter = BigRational::new(normal_form.a.clone(), BigInt::from(4));

        let mut lifts = Vec::with_capacity(p);
        lifts.push(
            TrigAffineMap::new(
                normal_form.n_matrix(),
                [SymScalar::from_rational(r), SymScalar::zero(), SymScalar::zero()],
                [SymScalar::alpha_scaled(1, half.clone()), SymScalar::zero(), SymScalar::zero()],
                [SymScalar::zero(), SymScalar::alpha_scaled(1, -half.clone()), SymScalar::zero()],
            )
            .expect("the first generator lift satisfies the map class invariants"),
        );
        lifts.push(
            TrigAffineMap::new(
                normal_form.m_matrix(),
                [SymScalar::zero(), SymScalar::zero(), SymScalar::from_rational(half.clone())],
                [SymScalar::alpha_scaled(2, -half.clone()), SymScalar::zero(), SymScalar::zero()],
                [
                    SymScalar::alpha_scaled(2, a_quarter),
                    SymScalar::alpha_scaled(2, -half),
                    SymScalar::zero(),
                ],
            )
            .expect("the second generator lift satisfies the map class invariants"),
        );
        for j in 3..=p {
            lifts.push(
                TrigAffineMap::new(
                    IntMatrix::identity(3),
                    sym3_zero(),
                    [SymScalar::alpha(j), SymScalar::zero(), SymScalar::zero()],
                    [
                        SymScalar::alpha_scaled(j, -a_half.clone()),
                        SymScalar::alpha(j),
                        SymScalar::zero(),
                    ],
                )
                .expect("a translation-type generator lift satisfies the map class invariants"),
            );
        }

        let family = FreeActionFamily { normal_form: normal_form.clone(), lifts };
        for i in 1..=p {
            for j in (i + 1)..=p {
                let defect = commutator_defect(family.lift(i), family.lift(j));
                let expected: Vec<BigInt> = if (i, j) == (1, 2) {
                    vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)]
                } else {
                    vec![BigInt::from(0); 3]
                };
                if defect.constant_offset() != Some(expected.as_slice()) {
                    return Err(Error::internal(format!(
                        "lifts {i} and {j} fail to commute on the torus: {defect}"
                    )));
                }
            }
        }
        let report = family.action_law_report();
        if !report.all_hold() {
            let failed: Vec<&str> = report
                .identities
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.name.as_str())
                .collect();
            return Err(Error::internal(format!(
                "generator lift identities failed: {}",
                failed.join("; ")
            )));
        }
        Ok(family)
    }

    pub fn p(&self) -> usize {
        self.lifts.len()
    }

    pub fn normal_form(&self) -> &NormalFormResult {
        &self.normal_form
    }

    pub fn lifts(&self) -> &[TrigAffineMap] {
        &self.lifts
    }

    /// The lift of generator `i` (1-based).
    pub fn lift(&self, i: usize) -> &TrigAffineMap {
        &self.lifts[i - 1]
    }

    /// The linear parts as an integer-matrix action (the family's induced
    /// action on first homology).
    pub fn induced_action(&self) -> ActionSpec {
        ActionSpec::new(self.lifts.iter().map(|l| l.linear().clone()).collect())
            .expect("linear parts of a lift family form a commuting unimodular family")
    }

    /// Composes and compares every generator pair and checks the
    /// trigonometric equivariance identities of the amplitudes.
    pub fn action_law_report(&self) -> ActionLawReport {
        let p = self.p();
        let mut pair_defects = Vec::new();
        for i in 1..=p {
            for j in (i + 1)..=p {
                pair_defects.push(PairDefect {
                    i,
                    j,
                    defect: commutator_defect(self.lift(i), self.lift(j)),
                });
            }
        }

        let a = &self.normal_form.a;
        let f = |i: usize| self.lift(i).coordinate_trig(0);
        let g = |i: usize| self.lift(i).coordinate_trig(1);

        let mut identities = Vec::new();
        let mut check = |name: String, lhs: TrigPair, rhs: TrigPair| {
            identities.push(IdentityCheck { name, holds: lhs == rhs });
        };
        check(
            "f2(-z) - f2(z) = a*g2(z) + f1(z) + f1(z + 1/2)".into(),
            f(2).negate_z().sub(&f(2)),
            g(2).scale_int(a).add(&f(1)).add(&f(1).shift_half()),
        );
        check(
            "g2(-z) + g2(z) = g1(z) + g1(z + 1/2)".into(),
            g(2).negate_z().add(&g(2)),
            g(1).add(&g(1).shift_half()),
        );
        for j in 3..=p {
            check(
                format!("f{j}(-z) - f{j}(z) = a*g{j}(z)"),
                f(j).negate_z().sub(&f(j)),
                g(j).scale_int(a),
            );
            check(format!("g{j}(-z) = -g{j}(z)"), g(j).negate_z(), g(j).neg());
            check(format!("f{j}(z + 1/2) = -f{j}(z)"), f(j).shift_half(), f(j).neg());
            check(format!("g{j}(z + 1/2) = -g{j}(z)"), g(j).shift_half(), g(j).neg());
        }
        ActionLawReport { pair_defects, identities }
    }

    /// The closed form of the subgroup element with coefficients
    /// `(l_1, ..., l_p)`, i.e. the composite
    /// `lift1^(2*l_1) ∘ lift2^(2*l_2) ∘ lift3^(l_3) ∘ ... ∘ liftp^(l_p)`:
    ///
    /// ```text
    /// w ↦ w + (2·l₁·r + l₂·c/2, l₂·d/2, l₂)
    ///       + S·(cos 2πz, 0, 0) + S·(-a/2, 1, 0)·sin 2πz,
    ///       S = l₁·α₁ + ... + l_p·α_p,  r = -b/4.
    /// ```
    ///
    /// All these composites share a linear part of `I` and an integer third
    /// translation entry, so they commute exactly and add coefficient-wise;
    /// the closed form is verified against iterated composition in tests.
    pub fn closed_form_power(&self, coefficients: &[i64]) -> Result<TrigAffineMap, Error> {
        let p = self.p();
        if coefficients.len() != p {
            return Err(Error::ExponentLength { expected: p, got: coefficients.len() });
        }
        let nf = &self.normal_form;
        let l1 = BigInt::from(coefficients[0]);
        let l2 = BigInt::from(coefficients[1]);
        let r = BigRational::new(-nf.b.clone(), BigInt::from(4));
        let t1 = BigRational::from_integer(BigInt::from(2) * &l1) * r
            + BigRational::new(&l2 * &nf.c, BigInt::from(2));
        let t2 = BigRational::new(&l2 * &nf.d, BigInt::from(2));
        let t3 = BigRational::from_integer(l2);

        let mut s = SymScalar::zero();
        for (j, &l) in coefficients.iter().enumerate() {
            s = &s + &SymScalar::alpha(j + 1).scale_int(&BigInt::from(l));
        }
        let s_swing = s.scale(&BigRational::new(-nf.a.clone(), BigInt::from(2)));

        TrigAffineMap::new(
            IntMatrix::identity(3),
            [
                SymScalar::from_rational(t1),
                SymScalar::from_rational(t2),
                SymScalar::from_rational(t3),
            ],
            [s.clone(), SymScalar::zero(), SymScalar::zero()],
            [s_swing, s, SymScalar::zero()],
        )
    }

    /// The same subgroup element computed by iterated composition; exact
    /// cross-check counterpart of [`FreeActionFamily::closed_form_power`].
    pub fn composed_subgroup_element(&self, coefficients: &[i64]) -> Result<TrigAffineMap, Error> {
        let p = self.p();
        if coefficients.len() != p {
            return Err(Error::ExponentLength { expected: p, got: coefficients.len() });
        }
        let mut acc = TrigAffineMap::identity();
        for (j, &l) in coefficients.iter().enumerate() {
            let exponent = if j < 2 { 2 * l } else { l };
            acc = acc.compose(&self.lifts[j].power(exponent));
        }
        Ok(acc)
    }

    /// The torus map of an arbitrary exponent vector
    /// `m = (m_1, ..., m_p)` in the re-based generators:
    /// `lift1^(m_1) ∘ ... ∘ liftp^(m_p)`.
    pub fn element_map(&self, exponents: &[i64]) -> Result<TrigAffineMap, Error> {
        let p = self.p();
        if exponents.len() != p {
            return Err(Error::ExponentLength { expected: p, got: exponents.len() });
        }
        let mut acc = TrigAffineMap::identity();
        for (j, &m) in exponents.iter().enumerate() {
            acc = acc.compose(&self.lifts[j].power(m));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::KleinElement;
    use crate::normal_form::{klein_m, klein_n, normalize_action};

    fn rat(num: i64, den: i64) -> SymScalar {
        SymScalar::ratio(num, den)
    }

    fn zero() -> SymScalar {
        SymScalar::zero()
    }

    fn sample_family() -> FreeActionFamily {
        // a = 2, b = 1, c = -3, d = 2 satisfies a*d + 2*(b + c) = 0.
        let action = ActionSpec::new(vec![klein_n(2, 1), klein_m(-3, 2)]).unwrap();
        let nf = normalize_action(&action, 1000, 4).unwrap();
        FreeActionFamily::build_generators(&nf).unwrap()
    }

    fn rank_three_family() -> FreeActionFamily {
        let n = klein_n(2, 1);
        let m = klein_m(-3, 2);
        let action =
            ActionSpec::new(vec![n.clone(), m.clone(), IntMatrix::identity(3)]).unwrap();
        let nf = normalize_action(&action, 1000, 4).unwrap();
        FreeActionFamily::build_generators(&nf).unwrap()
    }

    #[test]
    fn rejects_maps_outside_the_class() {
        let bad_third_row = IntMatrix::from_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 1, 1]]);
        let err = TrigAffineMap::new(bad_third_row, sym3_zero(), sym3_zero(), sym3_zero())
            .unwrap_err();
        assert!(matches!(err, Error::UnsupportedMapShape { .. }));

        let err = TrigAffineMap::new(
            IntMatrix::identity(3),
            [zero(), zero(), rat(1, 3)],
            sym3_zero(),
            sym3_zero(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedMapShape { .. }));

        let err = TrigAffineMap::new(
            IntMatrix::identity(3),
            sym3_zero(),
            [zero(), zero(), SymScalar::alpha(1)],
            sym3_zero(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedMapShape { .. }));

        let err = TrigAffineMap::new(
            IntMatrix::from_rows(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            sym3_zero(),
            sym3_zero(),
            sym3_zero(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotUnimodular { .. }) || matches!(err, Error::UnsupportedMapShape { .. }));
    }

    #[test]
    fn identity_is_neutral_for_composition() {
        let family = sample_family();
        for lift in family.lifts() {
            assert_eq!(&TrigAffineMap::identity().compose(lift), lift);
            assert_eq!(&lift.compose(&TrigAffineMap::identity()), lift);
        }
    }

    #[test]
    fn squares_of_the_first_two_lifts_match_hand_computation() {
        let family = sample_family();
        // lift1² = w + (2r, 0, 0) + α₁(cos 2πz, 0, 0) + α₁(-a/2, 1, 0) sin 2πz
        // with a = 2, r = -1/4.
        let sq1 = family.lift(1).power(2);
        let expected1 = TrigAffineMap::new(
            IntMatrix::identity(3),
            [rat(-1, 2), zero(), zero()],
            [SymScalar::alpha(1), zero(), zero()],
            [-&SymScalar::alpha(1), SymScalar::alpha(1), zero()],
        )
        .unwrap();
        assert_eq!(sq1, expected1);

        // lift2² adds the translation (c/2, d/2, 1) = (-3/2, 1, 1) instead.
        let sq2 = family.lift(2).power(2);
        let expected2 = TrigAffineMap::new(
            IntMatrix::identity(3),
            [rat(-3, 2), rat(1, 1), rat(1, 1)],
            [SymScalar::alpha(2), zero(), zero()],
            [-&SymScalar::alpha(2), SymScalar::alpha(2), zero()],
        )
        .unwrap();
        assert_eq!(sq2, expected2);
    }

    #[test]
    fn inverse_and_power_laws() {
        let family = sample_family();
        let f = family.lift(1).compose(family.lift(2));
        assert!(f.compose(&f.inverse()).is_identity());
        assert!(f.inverse().compose(&f).is_identity());
        assert!(f.power(0).is_identity());
        assert_eq!(f.power(1), f);
        assert_eq!(f.power(3), f.compose(&f).compose(&f));
        assert_eq!(f.power(-2), f.power(2).inverse());
    }

    #[test]
    fn epsilon_and_sigma_read_the_right_entries() {
        let family = sample_family();
        assert_eq!(family.lift(1).epsilon(), -1);
        assert_eq!(family.lift(1).sigma(), 1);
        assert_eq!(family.lift(2).epsilon(), 1);
        assert_eq!(family.lift(2).sigma(), -1);
    }

    #[test]
    fn pair_defect_is_the_unit_vertical_translation() {
        let family = sample_family();
        let defect = commutator_defect(family.lift(1), family.lift(2));
        assert_eq!(
            defect.constant_offset().unwrap(),
            &[BigInt::from(0), BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn action_law_report_holds_for_built_families() {
        for family in [sample_family(), rank_three_family()] {
            let report = family.action_law_report();
            assert!(report.all_hold());
            let expected_identities = 2 + 4 * family.p().saturating_sub(2);
            assert_eq!(report.identities.len(), expected_identities);
            for pd in &report.pair_defects {
                let expected = if (pd.i, pd.j) == (1, 2) { 1 } else { 0 };
                assert_eq!(
                    pd.defect.constant_offset().unwrap(),
                    &[BigInt::from(0), BigInt::from(0), BigInt::from(expected)]
                );
            }
        }
    }

    #[test]
    fn non_integer_defect_is_reported_as_mismatch() {
        let shear = TrigAffineMap::new(
            IntMatrix::from_rows(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
            sym3_zero(),
            sym3_zero(),
            sym3_zero(),
        )
        .unwrap();
        let third_translation = TrigAffineMap::new(
            IntMatrix::identity(3),
            [zero(), rat(1, 3), zero()],
            sym3_zero(),
            sym3_zero(),
        )
        .unwrap();
        match commutator_defect(&shear, &third_translation) {
            CommutatorDefect::Mismatch { translation_difference, .. } => {
                assert_eq!(translation_difference[0], rat(-1, 3));
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }

        let wave_in_y = TrigAffineMap::new(
            IntMatrix::identity(3),
            sym3_zero(),
            [zero(), SymScalar::alpha(1), zero()],
            sym3_zero(),
        )
        .unwrap();
        match commutator_defect(&shear, &wave_in_y) {
            CommutatorDefect::Mismatch { cos_difference, .. } => {
                assert_eq!(cos_difference[0], -&SymScalar::alpha(1));
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_matches_iterated_composition() {
        let family = sample_family();
        for l1 in -2..=2 {
            for l2 in -2..=2 {
                let coeffs = [l1, l2];
                assert_eq!(
                    family.closed_form_power(&coeffs).unwrap(),
                    family.composed_subgroup_element(&coeffs).unwrap(),
                    "coefficients {coeffs:?}"
                );
            }
        }
        let family = rank_three_family();
        for l1 in -1..=1 {
            for l2 in -1..=1 {
                for l3 in -1..=1 {
                    let coeffs = [l1, l2, l3];
                    assert_eq!(
                        family.closed_form_power(&coeffs).unwrap(),
                        family.composed_subgroup_element(&coeffs).unwrap(),
                        "coefficients {coeffs:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_of_unit_coefficients_is_the_corresponding_square() {
        let family = sample_family();
        assert_eq!(family.closed_form_power(&[1, 0]).unwrap(), family.lift(1).power(2));
        assert_eq!(family.closed_form_power(&[0, 1]).unwrap(), family.lift(2).power(2));
        assert!(family.closed_form_power(&[0, 0]).unwrap().is_identity());
    }

    #[test]
    fn element_map_multiplies_out_raw_exponents() {
        let family = sample_family();
        let m = family.element_map(&[1, 2]).unwrap();
        assert_eq!(m, family.lift(1).compose(&family.lift(2).power(2)));
        assert!(matches!(
            family.element_map(&[1, 2, 3]),
            Err(Error::ExponentLength { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn relation_violation_is_rejected() {
        let nf = NormalFormResult {
            a: BigInt::from(1),
            b: BigInt::from(0),
            c: BigInt::from(0),
            d: BigInt::from(1),
            conjugator: IntMatrix::identity(3),
            basis_change: IntMatrix::identity(2),
        };
        let err = FreeActionFamily::build_generators(&nf).unwrap_err();
        assert!(matches!(err, Error::RelationViolated { lhs } if lhs == BigInt::from(1)));
    }

    #[test]
    fn induced_action_round_trips_through_classification() {
        let family = rank_three_family();
        let action = family.induced_action();
        assert_eq!(action.generators()[0], family.normal_form().n_matrix());
        assert_eq!(action.generators()[1], family.normal_form().m_matrix());
        assert!(action.generators()[2].is_identity());
        let nf = normalize_action(&action, 1000, 4).unwrap();
        assert_eq!(nf.a, family.normal_form().a);
        assert_eq!(nf.b, family.normal_form().b);
        assert_eq!(nf.c, family.normal_form().c);
        assert_eq!(nf.d, family.normal_form().d);
    }

    #[test]
    fn numeric_evaluation_respects_composition() {
        let family = sample_family();
        let alpha = [0.7310507, 1.2207440];
        let f = family.lift(1);
        let g = family.lift(2);
        let fg = f.compose(g);
        for point in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.45], [1.7, 0.9, -0.125]] {
            let direct = fg.apply_numeric(point, &alpha);
            let chained = f.apply_numeric(g.apply_numeric(point, &alpha), &alpha);
            for i in 0..3 {
                assert!(
                    (direct[i] - chained[i]).abs() < 1e-12,
                    "coordinate {i} differs at {point:?}: {direct:?} vs {chained:?}"
                );
            }
        }
    }

    #[test]
    fn klein_structure_of_linear_parts() {
        let family = sample_family();
        let n = family.lift(1).linear().clone();
        let m = family.lift(2).linear().clone();
        assert_eq!(KleinElement::NM.matrix(&n, &m), n.mul(&m));
        assert!(n.mul(&n).is_identity());
        assert!(m.mul(&m).is_identity());
    }

    #[test]
    fn display_is_coordinate_wise() {
        let family = sample_family();
        let text = family.lift(2).to_string();
        assert!(text.starts_with("(x, y, z) ↦ ("), "{text}");
        assert!(text.contains("cos(2πz)"), "{text}");
        assert!(text.contains("sin(2πz)"), "{text}");
        assert!(text.ends_with("z + (1/2))"), "{text}");
        assert_eq!(TrigAffineMap::identity().to_string(), "(x, y, z) ↦ (x, y, z)");
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let family = sample_family();
        let f = family.lift(1).compose(family.lift(2));
        let text = serde_json::to_string(&f).unwrap();
        let back: TrigAffineMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);

        // A wire value violating the class invariants must not deserialize.
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["translation"][2] = serde_json::json!({"const": {"num": 1, "den": 3}, "alpha": []});
        let err = serde_json::from_value::<TrigAffineMap>(value).unwrap_err();
        assert!(err.to_string().contains("half-integer"), "{err}");

        let report = family.action_law_report();
        let text = serde_json::to_string(&report).unwrap();
        let back: ActionLawReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn trig_pair_transforms() {
        let pair = TrigPair { cos: SymScalar::alpha(1), sin: rat(1, 2) };
        assert_eq!(pair.negate_z(), TrigPair { cos: SymScalar::alpha(1), sin: rat(-1, 2) });
        assert_eq!(
            pair.shift_half(),
            TrigPair { cos: -&SymScalar::alpha(1), sin: rat(-1, 2) }
        );
        assert!(pair.sub(&pair).is_zero());
    }
}
