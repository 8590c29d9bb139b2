//! Level-set targeting: K = conv{ν₁, ν₂} with ⟨φ, ν₁⟩ = a and ⟨φ, ν₂⟩ = b.

use num_traits::{One, Zero};

use shiftlab_core::analyze::{birkhoff_oscillation, BirkhoffReport};
use shiftlab_core::error::{Error, Result};
use shiftlab_core::measure::{FiniteMeasure, Segment};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{int, rat_int, Int, Rat};
use shiftlab_core::symbolic::{Observable, Word};

use crate::family::{construct_family, Member, ScrambleFamily};
use crate::schedule::{KSet, ScheduleConfig};
use crate::seed::{cyclic_admissible, DistalSeed};

/// Longest word considered for the periodic pool.
pub const POOL_DEPTH: usize = 10;

fn primitive(w: &Word) -> bool {
    w.cyclic_period() == w.len()
}

/// Primitive cyclically admissible words of period ≥ 2, shortest first then
/// lexicographic, with ⟨φ, per(w)⟩.
pub fn periodic_pool(model: &ShiftModel, phi: &Observable, depth: usize) -> Result<Vec<(Word, Rat)>> {
    let mut out = Vec::new();
    for len in 2..=depth {
        for w in model.words(len)? {
            // one representative per rotation class: the least rotation
            if !primitive(&w) || (1..len).any(|k| w.rotate(k) < w) || !cyclic_admissible(model, &w)? {
                continue;
            }
            let v = FiniteMeasure::periodic(w.clone())?.integrate(phi)?;
            out.push((w, v));
        }
    }
    Ok(out)
}

pub struct LevelSetFamily {
    pub family: ScrambleFamily,
    pub phi: Observable,
    pub a: Rat,
    pub b: Rat,
    pub w1: Word,
    pub w2: Word,
    pub nu1: FiniteMeasure,
    pub nu2: FiniteMeasure,
    /// ν_i = θ_i·per(w1) + (1−θ_i)·per(w2).
    pub theta1: Rat,
    pub theta2: Rat,
}

/// Largest ε = 2^-j ≤ cap with 5ε/2 < ζ (so ζ − 5ε₁ > 0).
pub fn fitted_eps(zeta: &Rat, cap: &Rat) -> Rat {
    let mut eps = Rat::one();
    let five_halves = Rat::new(int(5), int(2));
    while &eps > cap || &five_halves * &eps >= *zeta {
        eps /= rat_int(&int(2));
    }
    eps
}

pub fn level_set_family(model: &ShiftModel, phi: &Observable, a: &Rat, b: &Rat, cfg: &ScheduleConfig) -> Result<LevelSetFamily> {
    if a > b {
        return Err(Error::Domain(format!("need a ≤ b, got a = {a}, b = {b}")));
    }
    let pool = periodic_pool(model, phi, POOL_DEPTH)?;
    let low = pool.iter().find(|(_, v)| v < a);
    let high = pool.iter().find(|(_, v)| v > b);
    let (Some((w1, v1)), Some((w2, v2))) = (low, high) else {
        let lo = pool.iter().map(|p| p.1.clone()).min();
        let hi = pool.iter().map(|p| p.1.clone()).max();
        return Err(Error::Domain(format!(
            "[{a}, {b}] is not inside the periodic range ({}, {}) of φ",
            lo.map_or("-".into(), |v| v.to_string()),
            hi.map_or("-".into(), |v| v.to_string())
        )));
    };
    // ⟨φ, θμ₁ + (1−θ)μ₂⟩ = c  ⇔  θ = (v2 − c)/(v2 − v1)
    let span = v2 - v1;
    let theta1 = (v2 - a) / &span;
    let theta2 = (v2 - b) / &span;
    let mu1 = FiniteMeasure::periodic(w1.clone())?;
    let mu2 = FiniteMeasure::periodic(w2.clone())?;
    let nu1 = FiniteMeasure::mix(&theta1, &mu1, &mu2)?;
    let nu2 = FiniteMeasure::mix(&theta2, &mu1, &mu2)?;
    let seed = DistalSeed::new(model, w1, w2, theta1.clone())?;
    let kset = if a == b { KSet::Point(nu1.clone()) } else { KSet::Segment { seg: Segment::new(nu1.clone(), nu2.clone()), mu: Rat::zero() } };
    let mut cfg = cfg.clone();
    cfg.eps = fitted_eps(seed.zeta(), &cfg.eps);
    let family = construct_family(model, &kset, &seed, &cfg)?;
    Ok(LevelSetFamily { family, phi: phi.clone(), a: a.clone(), b: b.clone(), w1: w1.clone(), w2: w2.clone(), nu1, nu2, theta1, theta2 })
}

impl LevelSetFamily {
    /// Times of the empirical checkpoints, increasing.
    pub fn grid(&self) -> Vec<Int> {
        let mut g: Vec<Int> = self.family.schedule.empirical().into_iter().map(|e| e.n).collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn birkhoff(&self, m: &Member, tol: &Rat) -> Result<BirkhoffReport> {
        birkhoff_oscillation(&m.stream, &self.phi, &self.grid(), Some((self.a.clone(), self.b.clone())), tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shiftlab_core::num::rat;

    fn phi() -> Observable {
        Observable::cylinder(Word::from("1"))
    }

    #[test]
    fn pool_order_and_weights() {
        let f2 = ShiftModel::full(2).unwrap();
        let pool = periodic_pool(&f2, &phi(), 4).unwrap();
        let words: Vec<String> = pool.iter().map(|p| p.0.to_string()).collect();
        assert_eq!(words, ["01", "001", "011", "0001", "0011", "0111"]);
        assert_eq!(pool[2].1, rat(2, 3));
    }

    #[test]
    fn quarter_half_targets() {
        let f2 = ShiftModel::full(2).unwrap();
        let ls = level_set_family(&f2, &phi(), &rat(1, 4), &rat(1, 2), &ScheduleConfig::new(1)).unwrap();
        assert_eq!((ls.w1.to_string(), ls.w2.to_string()), ("00001".into(), "011".into()));
        assert_eq!((ls.theta1.clone(), ls.theta2.clone()), (rat(25, 28), rat(5, 14)));
        assert_eq!(ls.nu1.integrate(&phi()).unwrap(), rat(1, 4));
        assert_eq!(ls.nu2.integrate(&phi()).unwrap(), rat(1, 2));
        assert_eq!(ls.family.schedule.eps, rat(1, 32));
    }

    #[test]
    fn unreachable_levels() {
        let f2 = ShiftModel::full(2).unwrap();
        let e = level_set_family(&f2, &phi(), &rat(-1, 1), &rat(1, 2), &ScheduleConfig::new(1));
        assert!(matches!(e, Err(Error::Domain(_))));
    }
}
