//! Distal seeds: periodic measures μ₁, μ₂ with generic pairs (p_i, q_i) whose
//! orbits stay apart, and the two-row periodic words x₁, x₂ built from them.

use num_integer::Integer;
use num_traits::{One, Zero};

use shiftlab_core::error::{Error, Result};
use shiftlab_core::measure::{weak_star_distance, FiniteMeasure};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{ceil_rat, floor_rat, int, neg_pow, rat_int, Int, Rat};
use shiftlab_core::symbolic::{m_epsilon, Word};

/// w^∞ and (σ^r w)^∞ with ζ = min_j d(σ^j p, σ^j q).
#[derive(Clone, Debug, PartialEq)]
pub struct DistalPair {
    pub p: Word,
    pub q: Word,
    pub zeta: Rat,
}

/// Primitive root of a cyclic word.
fn root(w: &Word) -> Word {
    Word(w.0[..w.cyclic_period()].to_vec())
}

/// Cyclic admissibility: every window of w^∞ of length 2|w| is admissible.
pub fn cyclic_admissible(model: &ShiftModel, w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Ok(false);
    }
    model.admissible(&w.repeat(2))
}

/// Largest first-disagreement position (1-indexed) over all shifts of the
/// pair (w^∞, (σ^r w)^∞), or None if the two orbits coincide.
fn worst_agreement(w: &[u8], r: usize) -> Option<usize> {
    let n = w.len();
    let mut worst = 0;
    for j in 0..n {
        let k = (0..n).find(|&k| w[(j + k) % n] != w[(j + r + k) % n])?;
        worst = worst.max(k + 1);
    }
    Some(worst)
}

/// The rotation of w maximizing ζ (smallest rotation on ties).
pub fn distal_pair(model: &ShiftModel, w: &Word) -> Result<DistalPair> {
    if !cyclic_admissible(model, w)? {
        return Err(Error::Domain(format!("{w} is not a periodic orbit of the model")));
    }
    let p = root(w);
    let n = p.len();
    let best = (1..n).filter_map(|r| worst_agreement(p.symbols(), r).map(|k| (k, r))).min();
    match best {
        None => Err(Error::Domain(format!("seed per({p}) is a fixed-point measure: ζ = 0, no distal pair"))),
        Some((k, r)) => {
            let base = model.alphabet_size() as u64;
            Ok(DistalPair { q: p.rotate(r), p, zeta: neg_pow(base, k) })
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistalSeed {
    pub mu1: FiniteMeasure,
    pub mu2: FiniteMeasure,
    pub pair1: DistalPair,
    pub pair2: DistalPair,
    pub theta: Rat,
    zeta: Rat,
}

impl DistalSeed {
    pub fn new(model: &ShiftModel, w1: &Word, w2: &Word, theta: Rat) -> Result<Self> {
        if theta < Rat::zero() || theta > Rat::one() {
            return Err(Error::Domain("θ must lie in [0, 1]".into()));
        }
        let pair1 = distal_pair(model, w1)?;
        let pair2 = distal_pair(model, w2)?;
        let mu1 = FiniteMeasure::periodic(pair1.p.clone())?;
        let mu2 = FiniteMeasure::periodic(pair2.p.clone())?;
        let zeta = pair1.zeta.clone().min(pair2.zeta.clone());
        Ok(DistalSeed { mu1, mu2, pair1, pair2, theta, zeta })
    }

    /// μ₁ = μ₂ = per(w).
    pub fn single(model: &ShiftModel, w: &Word) -> Result<Self> {
        Self::new(model, w, w, Rat::one())
    }

    pub fn zeta(&self) -> &Rat {
        &self.zeta
    }

    /// μ = θμ₁ + (1−θ)μ₂.
    pub fn mu(&self) -> Result<FiniteMeasure> {
        if self.pair1 == self.pair2 {
            return Ok(self.mu1.clone());
        }
        FiniteMeasure::mix(&self.theta, &self.mu1, &self.mu2)
    }

    fn degenerate(&self) -> Option<&DistalPair> {
        if self.pair1 == self.pair2 || self.theta.is_one() {
            Some(&self.pair1)
        } else if self.theta.is_zero() {
            Some(&self.pair2)
        } else {
            None
        }
    }
}

/// x₁ = w1^∞, x₂ = w2^∞ and N: for n > N the empirical measures of both lie
/// within eps + delta of μ and the ζ−eps closeness fraction is below delta.
#[derive(Clone, Debug)]
pub struct DistalBlocks {
    pub w1: Word,
    pub w2: Word,
    pub n: Int,
    /// Certified weak* distance from per(w_i) to μ (max over i).
    pub drift: Rat,
    /// Per-period fraction of shifts closer than ζ − eps.
    pub close_fraction: Rat,
}

const BLOCK_LIMIT: usize = 1 << 22;

fn close_fraction(w1: &Word, w2: &Word, m: usize) -> Rat {
    let (a, b) = (w1.symbols(), w2.symbols());
    let n = a.len();
    let close = (0..n).filter(|&j| (0..m).all(|k| a[(j + k) % n] == b[(j + k) % n])).count();
    Rat::new(int(close as i64), int(n as i64))
}

fn glue(model: &ShiftModel, parts: &[Word], gap: usize) -> Result<Option<Word>> {
    let mut out = Word::empty();
    for (k, w) in parts.iter().enumerate() {
        let next = &parts[(k + 1) % parts.len()];
        out = out.concat(w);
        match model.bridge(w, next, gap)? {
            Some(b) => out = out.concat(&b),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Joins the block words cyclically with bridges of one common length
/// (0 if every junction is admissible as is, else the gluing gap).
fn glue_rows(model: &ShiftModel, rows: &[Vec<Word>]) -> Result<(Word, Word)> {
    for gap in [0usize, model.gluing_gap().unwrap_or(1)] {
        let a = glue(model, &rows[0], gap)?;
        let b = glue(model, &rows[1], gap)?;
        if let (Some(a), Some(b)) = (a, b) {
            if cyclic_admissible(model, &a)? && cyclic_admissible(model, &b)? {
                return Ok((a, b));
            }
        }
    }
    Err(Error::Invariant("distal blocks cannot be glued".into()))
}

pub fn distal_blocks(seed: &DistalSeed, eps: &Rat, delta: &Rat, model: &ShiftModel, weak_k: usize) -> Result<DistalBlocks> {
    let zeta = seed.zeta();
    if eps >= zeta {
        return Err(Error::Domain(format!("separation budget exhausted: eps {eps} ≥ ζ {zeta}")));
    }
    if delta <= &Rat::zero() || eps <= &Rat::zero() {
        return Err(Error::Domain("eps and delta must be positive".into()));
    }
    let m = m_epsilon(model.metric(), &(zeta - eps))?;
    let mu = seed.mu()?;
    let alphabet = shiftlab_core::symbolic::Alphabet::new(model.alphabet_size())?;
    let (r1, r2) = match seed.degenerate() {
        Some(_) => (1usize, 0usize),
        None => {
            // r1·|p1| : r2·|p2| = θ : 1−θ
            let (n1, n2) = (int(seed.pair1.p.len() as i64), int(seed.pair2.p.len() as i64));
            let a = seed.theta.numer() * &n2;
            let b = (seed.theta.denom() - seed.theta.numer()) * &n1;
            let g = a.gcd(&b);
            (shiftlab_core::num::to_usize(&(a / &g))?, shiftlab_core::num::to_usize(&(b / &g))?)
        }
    };
    let single = seed.degenerate().cloned();
    let mut c = 1usize;
    loop {
        let rows: Vec<Vec<Word>> = match &single {
            Some(p) => vec![vec![p.p.repeat(c)], vec![p.q.repeat(c)]],
            None => vec![
                vec![seed.pair1.p.repeat(c * r1), seed.pair2.p.repeat(c * r2)],
                vec![seed.pair1.q.repeat(c * r1), seed.pair2.q.repeat(c * r2)],
            ],
        };
        let (w1, w2) = glue_rows(model, &rows)?;
        let f = close_fraction(&w1, &w2, m);
        let d1 = weak_star_distance(&FiniteMeasure::periodic(w1.clone())?, &mu, alphabet, weak_k)?.upper();
        let d2 = weak_star_distance(&FiniteMeasure::periodic(w2.clone())?, &mu, alphabet, weak_k)?.upper();
        let drift = d1.max(d2);
        let two = rat_int(&int(2));
        if &drift < eps && &f * &two < *delta {
            let p = rat_int(&int(w1.len() as i64));
            // (a): 2P/n + drift ≤ eps + delta; (b): f·n + f·P < delta·n
            let na = ceil_rat(&(&two * &p / (eps + delta - &drift)));
            let nb = floor_rat(&(&f * &p / (delta - &f))) + 1;
            return Ok(DistalBlocks { n: na.max(nb), w1, w2, drift, close_fraction: f });
        }
        c *= 2;
        if c * (r1 * seed.pair1.p.len() + r2 * seed.pair2.p.len()) > BLOCK_LIMIT {
            return Err(Error::Budget(format!("distal blocks for eps {eps}, delta {delta} exceed {BLOCK_LIMIT} symbols")));
        }
    }
}
