//! Ready-made example actions: a Klein-four pair in normal form, a
//! disguised conjugate of it, and a rank-4 action with infinite image that
//! still has eigenvalue 1 in every element.  These back the command-line
//! demo and give tests realistic inputs.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::action::ActionSpec;
use crate::error::Error;
use crate::matrix::IntMatrix;
use crate::normal_form::{klein_m, klein_n, relation_defect};

/// The pair action generated by the normal-form matrices `N(a, b)` and
/// `M(c, d)`.  The parameters must satisfy `a*d + 2*(b + c) = 0`, which is
/// exactly the condition for the two matrices to commute.
pub fn klein_pair(a: i64, b: i64, c: i64, d: i64) -> Result<ActionSpec, Error> {
    let lhs = relation_defect(&BigInt::from(a), &BigInt::from(b), &BigInt::from(c), &BigInt::from(d));
    if !lhs.is_zero() {
        return Err(Error::RelationViolated { lhs });
    }
    ActionSpec::new(vec![klein_n(a, b), klein_m(c, d)])
}

/// The same pair written in a different lattice basis: each generator is
/// replaced by `s·g·s⁻¹`.  The conjugator must be unimodular.
pub fn conjugated_klein_pair(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    conjugator: &IntMatrix,
) -> Result<ActionSpec, Error> {
    let inverse = conjugator.inverse()?;
    let pair = klein_pair(a, b, c, d)?;
    let generators = pair
        .generators()
        .iter()
        .map(|g| conjugator.mul(g).mul(&inverse))
        .collect();
    ActionSpec::new(generators)
}

/// Parameters `(a, b, c, d) = (2, 1, -3, 2)` used by the demo fixtures.
pub fn demo_parameters() -> (i64, i64, i64, i64) {
    (2, 1, -3, 2)
}

/// The demo pair in normal form.
pub fn demo_pair() -> ActionSpec {
    let (a, b, c, d) = demo_parameters();
    klein_pair(a, b, c, d).expect("the demo parameters satisfy the commutation relation")
}

/// The demo pair written in a disguised lattice basis; the classifier has
/// to recover the parameters together with a conjugator witnessing them.
pub fn demo_disguised_pair() -> ActionSpec {
    let (a, b, c, d) = demo_parameters();
    let conjugator = IntMatrix::from_rows(&[&[3, 2, 0], &[1, 4, 3], &[0, 1, 1]]);
    conjugated_klein_pair(a, b, c, d, &conjugator).expect("the demo conjugator is unimodular")
}

/// A rank-4 pair action whose image is infinite while every element still
/// has eigenvalue 1:
///
/// ```text
/// g₁ = [[1, a, 0,  0],          g₂ = diag(-1, -1, 1, 1).
///       [0, -1, 0, 0],
///       [0, 0, 0, -1],
///       [0, 0, 1, -2]]
/// ```
///
/// The lower-right block of `g₁` is `-(I - J)` for a nonzero nilpotent `J`,
/// so its even powers `I - 2kJ` are pairwise distinct unipotent matrices:
/// the closure never terminates, and only the exponent-box tier of the
/// spectral check can certify the action.  The joint fixed lattice is
/// trivial, but the classification of rank-3 lattices does not apply.
pub fn infinite_image_rank_four(a: i64) -> ActionSpec {
    let g1 = IntMatrix::from_rows(&[
        &[1, a, 0, 0],
        &[0, -1, 0, 0],
        &[0, 0, 0, -1],
        &[0, 0, 1, -2],
    ]);
    let g2 = IntMatrix::from_fn(4, 4, |i, j| {
        if i != j {
            BigInt::from(0)
        } else if i < 2 {
            BigInt::from(-1)
        } else {
            BigInt::from(1)
        }
    });
    ActionSpec::new(vec![g1, g2]).expect("the block generators commute and are unimodular")
}

/// The infinite-image fixture with `a = 2`.
pub fn demo_infinite_image() -> ActionSpec {
    infinite_image_rank_four(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::SpectralVerdict;
    use crate::normal_form::{normalize_action, verify_normal_form};

    #[test]
    fn klein_pair_enforces_the_relation() {
        assert!(klein_pair(2, 1, -3, 2).is_ok());
        let err = klein_pair(1, 0, 0, 1).unwrap_err();
        assert!(matches!(err, Error::RelationViolated { lhs } if lhs == BigInt::from(1)));
    }

    #[test]
    fn demo_pair_is_already_in_normal_form() {
        let nf = normalize_action(&demo_pair(), 1000, 4).unwrap();
        let (a, b, c, d) = demo_parameters();
        assert_eq!(nf.a, BigInt::from(a));
        assert_eq!(nf.b, BigInt::from(b));
        assert_eq!(nf.c, BigInt::from(c));
        assert_eq!(nf.d, BigInt::from(d));
        assert!(nf.conjugator.is_identity());
        assert!(nf.basis_change.is_identity());
    }

    #[test]
    fn disguised_pair_is_recognized() {
        let action = demo_disguised_pair();
        let nf = normalize_action(&action, 1000, 4).unwrap();
        // The parameters of a normal form depend on the basis the reduction
        // picks, so disguising the demo pair legitimately lands on another
        // point of the same conjugacy class; what must hold is that the
        // result verifies exactly and deterministically.
        assert!(verify_normal_form(&action, &nf).is_ok());
        assert!(!nf.conjugator.is_identity(), "the disguise needs a nontrivial conjugator");
        assert_eq!(
            (nf.a, nf.b, nf.c, nf.d),
            (BigInt::from(6), BigInt::from(1), BigInt::from(11), BigInt::from(-4))
        );
    }

    #[test]
    fn infinite_image_passes_only_the_box_tier() {
        let action = demo_infinite_image();
        assert!(action.fix_lattice().is_trivial());
        match action.spectral_unitarity(200, 4) {
            SpectralVerdict::VerifiedOnBox { box_radius } => assert_eq!(box_radius, 4),
            other => panic!("expected a box verification, got {other:?}"),
        }
        // The first generator has infinite order: even powers are distinct
        // unipotent matrices.
        let g1 = &action.generators()[0];
        let mut power = IntMatrix::identity(4);
        for _ in 0..20 {
            power = power.mul(g1);
            assert!(!power.is_identity());
        }
        // Rank 4 is outside the normal-form classification.
        let err = normalize_action(&action, 200, 4).unwrap_err();
        assert!(matches!(err, Error::RankNotThree { q: 4 }));
    }
}
