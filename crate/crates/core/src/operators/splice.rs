//! Single-point string recombination.

use rand::{Rng, RngCore};

/// Cut indices into the two strings, counted in characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpliceDraw {
    pub x_i: usize,
    pub y_i: usize,
}

impl SpliceDraw {
    /// Uniform cut indices; both lengths must be positive.
    pub fn sample(rng: &mut dyn RngCore, x_len: usize, y_len: usize) -> Self {
        SpliceDraw {
            x_i: rng.random_range(0..x_len),
            y_i: rng.random_range(0..y_len),
        }
    }
}

/// `x' = x[..=x_i] ++ y[y_i + 1..]` and `y' = y[..=y_i] ++ x[x_i + 1..]`.
/// Empty inputs and out-of-range indices leave the pair unchanged.
pub fn string_splice(x: &str, y: &str, draw: &SpliceDraw) -> (String, String) {
    let xs: Vec<char> = x.chars().collect();
    let ys: Vec<char> = y.chars().collect();
    if draw.x_i >= xs.len() || draw.y_i >= ys.len() {
        return (x.to_string(), y.to_string());
    }
    let (xh, xt) = xs.split_at(draw.x_i + 1);
    let (yh, yt) = ys.split_at(draw.y_i + 1);
    (
        xh.iter().chain(yt).collect(),
        yh.iter().chain(xt).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lorem_ipsum() {
        let d = SpliceDraw { x_i: 1, y_i: 3 };
        assert_eq!(
            string_splice("lorem", "ipsum", &d),
            ("lom".to_string(), "ipsurem".to_string())
        );
    }

    #[test]
    fn full_prefixes_are_identity() {
        let d = SpliceDraw { x_i: 4, y_i: 2 };
        assert_eq!(string_splice("hello", "abc", &d), ("hello".into(), "abc".into()));
    }

    #[test]
    fn empty_side_unchanged() {
        let d = SpliceDraw { x_i: 0, y_i: 0 };
        assert_eq!(string_splice("", "abc", &d), ("".into(), "abc".into()));
    }

    #[test]
    fn splits_on_chars() {
        let d = SpliceDraw { x_i: 0, y_i: 0 };
        assert_eq!(string_splice("éa", "üb", &d), ("éb".into(), "üa".into()));
    }

    proptest! {
        #[test]
        fn conserves_total_length(x in "\\PC{0,12}", y in "\\PC{0,12}", xi in 0usize..14, yi in 0usize..14) {
            let (a, b) = string_splice(&x, &y, &SpliceDraw { x_i: xi, y_i: yi });
            prop_assert_eq!(
                a.chars().count() + b.chars().count(),
                x.chars().count() + y.chars().count()
            );
        }
    }
}
