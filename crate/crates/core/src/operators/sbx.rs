//! Simulated binary crossover and its typed projections.

use rand::{Rng, RngCore};

use crate::lang::{Literal, TypeTag};

/// One SBX sample: the uniform variate, the spread factor derived from it,
/// the sign coin and the distribution index used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbxDraw {
    pub u: f64,
    pub beta: f64,
    pub b: bool,
    pub eta_c: f64,
}

impl SbxDraw {
    pub fn new(u: f64, b: bool, eta_c: f64) -> Self {
        SbxDraw {
            u,
            beta: spread_factor(u, eta_c),
            b,
            eta_c,
        }
    }

    pub fn sample(rng: &mut dyn RngCore, eta_c: f64) -> Self {
        let u: f64 = rng.random();
        let b = rng.random_bool(0.5);
        SbxDraw::new(u, b, eta_c)
    }
}

/// Spread factor beta for a uniform variate `u` in `[0, 1)`.
pub fn spread_factor(u: f64, eta_c: f64) -> f64 {
    let e = 1.0 / (eta_c + 1.0);
    if u < 0.5 {
        (2.0 * u).powf(e)
    } else if u == 0.5 {
        1.0
    } else {
        (0.5 / (1.0 - u)).powf(e)
    }
}

/// Mean-centred SBX: children `m -/+ beta * |v1 - v2| / 2`, assigned to the
/// two slots in order, or swapped when `draw.b` is set.
pub fn sbx_pair(v1: f64, v2: f64, draw: &SbxDraw) -> (f64, f64) {
    let m = 0.5 * (v1 + v2);
    let half = 0.5 * draw.beta * (v1 - v2).abs();
    let (a, b) = (m - half, m + half);
    if draw.b {
        (b, a)
    } else {
        (a, b)
    }
}

/// The printed form `(v1 - v2) * 0.5 -/+ beta * 0.5 * |v1 - v2|` (minus when
/// `b` is set), applied to both slots with the operands swapped for the
/// second one. Kept for comparison with the mean-centred default.
pub fn sbx_pair_literal(v1: f64, v2: f64, draw: &SbxDraw) -> (f64, f64) {
    let offset = draw.beta * 0.5 * (v1 - v2).abs();
    let sign = if draw.b { -1.0 } else { 1.0 };
    (
        (v1 - v2) * 0.5 + sign * offset,
        (v2 - v1) * 0.5 + sign * offset,
    )
}

fn embed(lit: &Literal) -> Option<f64> {
    Some(match lit {
        Literal::Int(v) => *v as f64,
        Literal::Long(v) => *v as f64,
        Literal::Double(v) => *v,
        Literal::Bool(v) => {
            if *v {
                1.0
            } else {
                0.0
            }
        }
        Literal::Char(c) => *c as u32 as f64,
        _ => return None,
    })
}

/// Maps a real back into the literal's type. `own` is the parent value the
/// child slot held before crossover (used for boolean ties and non-finite
/// results).
pub(crate) fn project(x: f64, ty: &TypeTag, own: &Literal) -> Literal {
    if !x.is_finite() {
        return own.clone();
    }
    match ty {
        TypeTag::Int => Literal::Int(x.round().clamp(i32::MIN as f64, i32::MAX as f64) as i32),
        // `as` saturates at the i64 bounds.
        TypeTag::Long => Literal::Long(x.round() as i64),
        TypeTag::Double => Literal::Double(x),
        TypeTag::Boolean => {
            if x > 0.5 {
                Literal::Bool(true)
            } else if x < 0.5 {
                Literal::Bool(false)
            } else {
                own.clone()
            }
        }
        TypeTag::Char => {
            let mut cp = x.round().clamp(0.0, 0x10FFFF as f64) as u32;
            if (0xD800..=0xDFFF).contains(&cp) {
                cp = 0xE000;
            }
            Literal::Char(char::from_u32(cp).expect("valid scalar value"))
        }
        _ => own.clone(),
    }
}

/// SBX on two literals of the number family `ty`.
pub fn sbx_typed(
    a: &Literal,
    b: &Literal,
    draw: &SbxDraw,
    ty: &TypeTag,
    literal_mode: bool,
) -> (Literal, Literal) {
    let (Some(x), Some(y)) = (embed(a), embed(b)) else {
        return (a.clone(), b.clone());
    };
    let (c1, c2) = if literal_mode {
        sbx_pair_literal(x, y, draw)
    } else {
        sbx_pair(x, y, draw)
    };
    (project(c1, ty, a), project(c2, ty, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn beta_regimes() {
        assert_eq!(spread_factor(0.5, 2.5), 1.0);
        assert!(spread_factor(0.2, 2.5) < 1.0);
        assert!(spread_factor(0.8, 2.5) > 1.0);
        assert_eq!(spread_factor(0.0, 2.5), 0.0);
    }

    #[test]
    fn worked_values() {
        assert_eq!(sbx_pair(3.0, 3.0, &SbxDraw::new(0.9, true, 2.5)), (3.0, 3.0));
        assert_eq!(sbx_pair(2.0, 1.0, &SbxDraw::new(0.5, false, 2.5)), (1.0, 2.0));
        assert_eq!(sbx_pair(2.0, 1.0, &SbxDraw::new(0.5, true, 2.5)), (2.0, 1.0));
        let (a, b) = sbx_pair(2.0, 1.0, &SbxDraw::new(0.0, false, 2.5));
        assert_eq!((a, b), (1.5, 1.5));
    }

    #[test]
    fn expansion_example() {
        let d = SbxDraw::new(0.9, false, 2.5);
        // (0.5 / 0.1)^(1 / 3.5)
        let beta = 5f64.powf(2.0 / 7.0);
        assert!((d.beta - beta).abs() < 1e-12);
        assert!((d.beta - 1.58381).abs() < 1e-5);
        let (a, b) = sbx_pair(0.0, 10.0, &d);
        assert!((a - (5.0 - 5.0 * beta)).abs() < 1e-12);
        assert!((a + 2.919).abs() < 1e-3 && (b - 12.919).abs() < 1e-3);
        let (ia, ib) = sbx_typed(&Literal::Int(0), &Literal::Int(10), &d, &TypeTag::Int, false);
        assert_eq!((ia, ib), (Literal::Int(-3), Literal::Int(13)));
    }

    #[test]
    fn typed_identities() {
        let d = SbxDraw::new(0.5, false, 2.5);
        assert_eq!(
            sbx_typed(&Literal::Int(2), &Literal::Int(1), &d, &TypeTag::Int, false),
            (Literal::Int(1), Literal::Int(2))
        );
        let t = Literal::Bool(true);
        let f = Literal::Bool(false);
        assert_eq!(sbx_typed(&t, &f, &d, &TypeTag::Boolean, false), (f.clone(), t.clone()));
        let d = SbxDraw::new(0.5, true, 2.5);
        assert_eq!(sbx_typed(&t, &f, &d, &TypeTag::Boolean, false), (t.clone(), f.clone()));
        // Contraction to the midpoint ties at 0.5: each child keeps its own value.
        let d = SbxDraw::new(0.0, false, 2.5);
        assert_eq!(sbx_typed(&t, &f, &d, &TypeTag::Boolean, false), (t, f));
    }

    #[test]
    fn char_projection_skips_surrogates() {
        assert_eq!(project(55300.0, &TypeTag::Char, &Literal::Char('a')), Literal::Char('\u{E000}'));
        assert_eq!(project(-5.0, &TypeTag::Char, &Literal::Char('a')), Literal::Char('\0'));
        assert_eq!(
            project(2e7, &TypeTag::Char, &Literal::Char('a')),
            Literal::Char('\u{10FFFF}')
        );
    }

    #[test]
    fn int_projection_rounds_half_away_and_clamps() {
        assert_eq!(project(2.5, &TypeTag::Int, &Literal::Int(0)), Literal::Int(3));
        assert_eq!(project(-2.5, &TypeTag::Int, &Literal::Int(0)), Literal::Int(-3));
        assert_eq!(project(1e12, &TypeTag::Int, &Literal::Int(0)), Literal::Int(i32::MAX));
        assert_eq!(project(-1e30, &TypeTag::Long, &Literal::Long(0)), Literal::Long(i64::MIN));
    }

    #[test]
    fn literal_mode_matches_printed_formula() {
        let d = SbxDraw::new(0.5, false, 2.5);
        assert_eq!(sbx_pair_literal(2.0, 1.0, &d), (1.0, 0.0));
        assert_eq!(sbx_pair_literal(3.0, 3.0, &d), (0.0, 0.0));
        let d = SbxDraw::new(0.5, true, 2.5);
        assert_eq!(sbx_pair_literal(2.0, 1.0, &d), (0.0, -1.0));
    }

    proptest! {
        #[test]
        fn regimes_and_sum(v1 in -1e6f64..1e6, v2 in -1e6f64..1e6, u in 0.0f64..1.0, b: bool) {
            let d = SbxDraw::new(u, b, 2.5);
            let (c1, c2) = sbx_pair(v1, v2, &d);
            let (lo, hi) = (v1.min(v2), v1.max(v2));
            let tol = 1e-9 * (v1.abs() + v2.abs()).max(1.0);
            prop_assert!(((c1 + c2) - (v1 + v2)).abs() <= tol);
            if u < 0.5 {
                prop_assert!(c1 >= lo - tol && c1 <= hi + tol && c2 >= lo - tol && c2 <= hi + tol);
            } else if u > 0.5 && v1 != v2 {
                prop_assert!(c1.min(c2) < lo && c1.max(c2) > hi);
            }
        }
    }
}
