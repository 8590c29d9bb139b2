//! The computable weak* metric: φ_k is the indicator of the k-th nonempty
//! word in length-lexicographic order, weighted by 2^-k.

use num_traits::{Signed, Zero};

use super::finite::FiniteMeasure;
use crate::error::{domain, Result};
use crate::num::{neg_pow, Rat};
use crate::symbolic::{Alphabet, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct WeakStar {
    pub value: Rat,
    /// Tail bound: the true distance lies in [value, value + error].
    pub error: Rat,
}

impl WeakStar {
    pub fn upper(&self) -> Rat {
        &self.value + &self.error
    }
}

/// The first K words of the pinned family.
pub fn pinned_words(alphabet: Alphabet, k: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(k);
    let mut len = 1;
    while out.len() < k {
        for w in alphabet.words(len) {
            if out.len() == k {
                break;
            }
            out.push(w);
        }
        len += 1;
    }
    out
}

/// Word length needed to cover the first K family members.
pub fn pinned_depth(alphabet: Alphabet, k: usize) -> usize {
    pinned_words(alphabet, k).last().map_or(0, |w| w.len())
}

pub fn weak_star_distance(mu: &FiniteMeasure, nu: &FiniteMeasure, alphabet: Alphabet, k: usize) -> Result<WeakStar> {
    if k == 0 {
        return domain("truncation depth must be at least 1");
    }
    let words = pinned_words(alphabet, k);
    let (a, b) = (mu.values(&words)?, nu.values(&words)?);
    let mut value = Rat::zero();
    for (j, (x, y)) in a.into_iter().zip(b).enumerate() {
        let diff = x - y;
        if !diff.is_zero() {
            value += diff.abs() * neg_pow(2, j + 1);
        }
    }
    Ok(WeakStar { value, error: neg_pow(2, k) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn per(w: &str) -> FiniteMeasure {
        FiniteMeasure::periodic(Word::from(w)).unwrap()
    }

    #[test]
    fn family_order() {
        let a2 = Alphabet::new(2).unwrap();
        let ws: Vec<String> = pinned_words(a2, 7).iter().map(|w| w.to_string()).collect();
        assert_eq!(ws, vec!["0", "1", "00", "01", "10", "11", "000"]);
        assert_eq!(pinned_depth(a2, 20), 4);
    }

    #[test]
    fn fixed_points_apart() {
        let a2 = Alphabet::new(2).unwrap();
        let d = weak_star_distance(&per("0"), &per("1"), a2, 2).unwrap();
        assert_eq!(d, WeakStar { value: rat(3, 4), error: rat(1, 4) });
        let z = weak_star_distance(&per("01"), &per("10"), a2, 20).unwrap();
        assert_eq!(z.value, rat(0, 1));
    }
}
