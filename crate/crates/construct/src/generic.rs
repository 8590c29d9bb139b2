//! Periodic generic points for finite convex combinations of periodic
//! measures: γ = per(z₁^{r₁} z₂^{r₂} …) with the weights rounded at a block
//! scale that is doubled until γ is within the requested weak* radius.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use shiftlab_core::error::{Error, Result};
use shiftlab_core::measure::{periodic_convergence, weak_star_distance, FiniteMeasure};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{int, Int, Rat};
use shiftlab_core::symbolic::{Alphabet, Word};

use crate::seed::cyclic_admissible;

const WORD_LIMIT: usize = 1 << 22;

/// Σ c_j per(z_j) with primitive roots z_j merged.
pub fn flatten(m: &FiniteMeasure) -> Result<Vec<(Rat, Word)>> {
    let mut acc: BTreeMap<Word, Rat> = BTreeMap::new();
    fn walk(m: &FiniteMeasure, w: Rat, acc: &mut BTreeMap<Word, Rat>) -> Result<()> {
        match m {
            FiniteMeasure::Periodic(z) => {
                let r = Word(z.0[..z.cyclic_period()].to_vec());
                // canonical rotation: the orbit measure does not depend on it
                let canon = (0..r.len()).map(|k| r.rotate(k)).min().unwrap();
                *acc.entry(canon).or_insert_with(Rat::zero) += w;
                Ok(())
            }
            FiniteMeasure::Convex(ts) => {
                for (t, x) in ts {
                    if !t.is_zero() {
                        walk(x, &w * t, acc)?;
                    }
                }
                Ok(())
            }
            FiniteMeasure::Empirical(_) => Err(Error::Domain("empirical measures have no periodic approximation".into())),
        }
    }
    walk(m, Rat::from_integer(int(1)), &mut acc)?;
    Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect())
}

/// A periodic point generic for γ with d(γ, target) ≤ `distance`, and the
/// time from which its empirical measures stay within `eps` of γ.
#[derive(Clone, Debug)]
pub struct GenericPoint {
    pub target: FiniteMeasure,
    pub word: Word,
    pub distance: Rat,
    pub n: Int,
}

fn assemble(model: &ShiftModel, blocks: &[Word]) -> Result<Option<Word>> {
    for gap in [0usize, model.gluing_gap().unwrap_or(1)] {
        let mut out = Word::empty();
        let mut ok = true;
        for (k, b) in blocks.iter().enumerate() {
            out = out.concat(b);
            let next = &blocks[(k + 1) % blocks.len()];
            match model.bridge(b, next, gap)? {
                Some(w) => out = out.concat(&w),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && cyclic_admissible(model, &out)? {
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// A word w with d(per(w), target) < radius (certified upper bound).
pub fn periodic_approximation(model: &ShiftModel, target: &FiniteMeasure, radius: &Rat, weak_k: usize) -> Result<(Word, Rat)> {
    let terms = flatten(target)?;
    let alphabet = Alphabet::new(model.alphabet_size())?;
    for (_, z) in &terms {
        if !cyclic_admissible(model, z)? {
            return Err(Error::Domain(format!("per({z}) is not an orbit of the model")));
        }
    }
    if terms.len() == 1 {
        let w = terms[0].1.clone();
        let d = weak_star_distance(&FiniteMeasure::periodic(w.clone())?, target, alphabet, weak_k)?.upper();
        if &d < radius {
            return Ok((w, d));
        }
    }
    let base: usize = terms.iter().map(|(_, z)| z.len()).sum();
    let mut scale = 16 * base;
    while scale <= WORD_LIMIT {
        let blocks: Vec<Word> = terms
            .iter()
            .filter_map(|(c, z)| {
                let r = (c * Rat::from_integer(int(scale as i64)) / Rat::from_integer(int(z.len() as i64))).round();
                let r = r.to_integer().to_usize().unwrap_or(0);
                (r > 0).then(|| z.repeat(r))
            })
            .collect();
        if !blocks.is_empty() {
            if let Some(w) = assemble(model, &blocks)? {
                let d = weak_star_distance(&FiniteMeasure::periodic(w.clone())?, target, alphabet, weak_k)?.upper();
                if &d < radius {
                    return Ok((w, d));
                }
            }
        }
        scale *= 2;
    }
    Err(Error::Budget(format!("no periodic approximation within {radius} below {WORD_LIMIT} symbols")))
}

impl GenericPoint {
    pub fn new(model: &ShiftModel, target: FiniteMeasure, radius: &Rat, eps: &Rat, weak_k: usize) -> Result<Self> {
        let (word, distance) = periodic_approximation(model, &target, radius, weak_k)?;
        let n = periodic_convergence(&word)?.threshold(eps)?;
        Ok(GenericPoint { target, word, distance, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shiftlab_core::num::rat;

    fn per(w: &str) -> FiniteMeasure {
        FiniteMeasure::periodic(Word::from(w)).unwrap()
    }

    #[test]
    fn flattening_merges_rotations() {
        let m = FiniteMeasure::mix(&rat(1, 2), &per("01"), &FiniteMeasure::mix(&rat(1, 2), &per("10"), &per("0")).unwrap()).unwrap();
        let f = flatten(&m).unwrap();
        assert_eq!(f, vec![(rat(1, 4), Word::from("0")), (rat(3, 4), Word::from("01"))]);
    }

    #[test]
    fn approximations_reach_the_radius() {
        let f2 = ShiftModel::full(2).unwrap();
        let target = FiniteMeasure::mix(&rat(25, 28), &per("00001"), &per("011")).unwrap();
        for r in [rat(1, 16), rat(1, 256), rat(1, 1024)] {
            let (w, d) = periodic_approximation(&f2, &target, &r, 20).unwrap();
            assert!(d < r);
            let a2 = Alphabet::new(2).unwrap();
            assert_eq!(weak_star_distance(&per(&w.to_string()), &target, a2, 20).unwrap().upper(), d);
        }
        let (w, d) = periodic_approximation(&f2, &per("0101"), &rat(1, 8), 20).unwrap();
        assert_eq!(w, Word::from("01"));
        assert!(d < rat(1, 8));
    }

    #[test]
    fn golden_mean_blocks_are_bridged() {
        let g = ShiftModel::Sft(shiftlab_core::models::TransitionSystem::golden_mean());
        let target = FiniteMeasure::mix(&rat(1, 2), &per("01"), &per("0")).unwrap();
        let (w, d) = periodic_approximation(&g, &target, &rat(1, 32), 20).unwrap();
        assert!(cyclic_admissible(&g, &w).unwrap() && d < rat(1, 32));
    }
}
