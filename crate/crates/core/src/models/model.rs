use super::beta::{beta_words, BetaModel};
use super::sft::{Primitivity, TransitionSystem};
use super::sofic::SoficModel;
use crate::error::{Error, Result};
use crate::num::Rat;
use crate::symbolic::{m_epsilon, ShiftMetric, Word};

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftModel {
    Sft(TransitionSystem),
    Sofic(SoficModel),
    Beta(BetaModel),
}

impl ShiftModel {
    pub fn full(n: usize) -> Result<Self> {
        Ok(ShiftModel::Sft(TransitionSystem::full(n)?))
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            ShiftModel::Sft(t) => t.size(),
            ShiftModel::Sofic(s) => s.alphabet().size(),
            ShiftModel::Beta(b) => b.alphabet_size(),
        }
    }

    pub fn metric(&self) -> ShiftMetric {
        ShiftMetric::geometric(self.alphabet_size())
    }

    pub fn admissible(&self, w: &Word) -> Result<bool> {
        match self {
            ShiftModel::Sft(t) => Ok(t.admissible(w)),
            ShiftModel::Sofic(s) => Ok(s.admissible(w)),
            ShiftModel::Beta(b) => b.admissible(w),
        }
    }

    pub fn bridge(&self, u: &Word, v: &Word, len: usize) -> Result<Option<Word>> {
        match self {
            ShiftModel::Sft(t) => Ok(t.bridge(u, v, len)),
            ShiftModel::Sofic(s) => Ok(s.bridge(u, v, len)),
            ShiftModel::Beta(b) => b.bridge(u, v, len),
        }
    }

    /// Gap length after which any two admissible words can be glued.
    pub fn gluing_gap(&self) -> Result<usize> {
        match self {
            ShiftModel::Sft(t) => match t.primitivity() {
                Primitivity::Index(k) => Ok(k),
                Primitivity::NotPrimitive => Err(Error::Capability("the transition system is not mixing".into())),
            },
            ShiftModel::Beta(b) => b
                .zero_gap()
                .ok_or_else(|| Error::Capability("expansion of 1 has unbounded zero runs".into())),
            ShiftModel::Sofic(_) => Err(Error::Capability("no specification constant for sofic presentations".into())),
        }
    }

    /// K_eps = mEpsilon(eps) + gluing gap.
    pub fn specification_constant(&self, eps: &Rat) -> Result<usize> {
        Ok(m_epsilon(self.metric(), eps)? + self.gluing_gap()?)
    }

    pub fn words(&self, len: usize) -> Result<Vec<Word>> {
        match self {
            ShiftModel::Sft(t) => Ok(t.words(len)),
            ShiftModel::Sofic(s) => Ok(s
                .alphabet()
                .words(len)
                .into_iter()
                .filter(|w| s.admissible(w))
                .collect()),
            ShiftModel::Beta(b) => beta_words(b, len),
        }
    }

    /// Lexicographically least admissible continuation of w to length `len`.
    pub fn extend(&self, w: &Word, len: usize) -> Result<Option<Word>> {
        if w.len() >= len {
            return Ok(Some(Word(w.0[..len].to_vec())));
        }
        Ok(self.bridge(w, &Word::empty(), len - w.len())?.map(|t| w.concat(&t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::beta::BetaValue;
    use crate::num::rat;

    #[test]
    fn specification_constants() {
        let f2 = ShiftModel::full(2).unwrap();
        assert_eq!(f2.specification_constant(&rat(1, 8)).unwrap(), 4);
        let g = ShiftModel::Sft(TransitionSystem::golden_mean());
        assert_eq!(g.specification_constant(&rat(1, 4)).unwrap(), 4);
        assert_eq!(g.specification_constant(&rat(2, 1)).unwrap(), 2);
        let two = ShiftModel::Sft(TransitionSystem::new(vec![vec![0, 1], vec![1, 0]]).unwrap());
        assert!(matches!(two.specification_constant(&rat(1, 4)), Err(Error::Capability(_))));
        let gb = ShiftModel::Beta(BetaModel::new(BetaValue::golden(), 64).unwrap());
        // i* = (10)^∞: zero runs of length 1
        assert_eq!(gb.gluing_gap().unwrap(), 2);
    }
}
