//! DC1 / α-DC1 verdicts indexed by a checkpoint schedule and a horizon.

use num_traits::{One, Zero};

use super::alpha::AlphaFunction;
use super::pair::Pair;
use super::sums::CumulativeSums;
use crate::error::{domain, Result};
use crate::num::{rat_int, Int, Rat};

/// A time n with a tolerance. Separation checkpoints require
/// Φ^(n)(t₀) ≤ bound, closeness checkpoints Φ^(n)(t) ≥ 1 − bound for every
/// grid t ≥ t_min (and t_min itself).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: Int,
    pub bound: Rat,
    pub t_min: Option<Rat>,
}

impl Checkpoint {
    pub fn new(n: Int, bound: Rat) -> Self {
        Checkpoint { n, bound, t_min: None }
    }

    pub fn above(n: Int, bound: Rat, t_min: Rat) -> Self {
        Checkpoint { n, bound, t_min: Some(t_min) }
    }

    fn ts(&self, grid: &[Rat]) -> Vec<Rat> {
        let mut out: Vec<Rat> = grid.iter().filter(|t| self.t_min.as_ref().is_none_or(|m| *t >= m)).cloned().collect();
        if let Some(m) = &self.t_min {
            if !out.contains(m) {
                out.push(m.clone());
            }
        }
        out.sort();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Dc1Witnessed,
    AlphaDc1Witnessed,
    RefutedAtHorizon,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Dc1Witnessed => "DC1-witnessed",
            Verdict::AlphaDc1Witnessed => "alpha-DC1-witnessed",
            Verdict::RefutedAtHorizon => "refuted-at-horizon",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub n: Int,
    pub t: Rat,
    /// Certified [lo, hi] of the statistic (equal for plain Φ).
    pub lo: Rat,
    pub hi: Rat,
    pub bound: Rat,
    pub pass: bool,
}

/// Finite α ⇒ plain implication at one checkpoint: plain ≥ α_lo − α(n)/n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationRow {
    pub n: Int,
    pub t: Rat,
    pub alpha_lo: Rat,
    pub plain: Rat,
    pub slack: Rat,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct ChaosReport {
    pub t0: Rat,
    pub t_grid: Vec<Rat>,
    pub horizon: Int,
    pub alpha: Option<String>,
    pub separation: Vec<CheckRow>,
    pub closeness: Vec<CheckRow>,
    pub implication: Vec<ImplicationRow>,
    /// Φ^(n)(t) at each checkpoint time, per grid t.
    pub curves: Vec<(Rat, Vec<(Int, Rat)>)>,
    /// (t, min, max) of the curve values over the checkpoints.
    pub estimates: Vec<(Rat, Rat, Rat)>,
    pub verdict: Verdict,
    pub witness_times: Vec<Int>,
}

impl ChaosReport {
    pub fn implication_holds(&self) -> bool {
        self.implication.iter().all(|r| r.holds)
    }
}

pub struct VerdictQuery {
    pub t0: Rat,
    pub t_grid: Vec<Rat>,
    pub separation: Vec<Checkpoint>,
    pub closeness: Vec<Checkpoint>,
    pub horizon: Int,
    pub alpha: Option<AlphaFunction>,
}

/// {ζ − 5ε₁, diam/2, diam} plus extra values, positive ones only.
pub fn default_t_grid(zeta: &Rat, eps1: &Rat, diameter: &Rat, extra: &[Rat]) -> Vec<Rat> {
    let mut out = vec![zeta - rat_int(&Int::from(5)) * eps1, diameter / rat_int(&Int::from(2)), diameter.clone()];
    out.extend(extra.iter().cloned());
    out.retain(|t| t > &Rat::zero());
    out.sort();
    out.dedup();
    out
}

pub fn dc1_verdict(pair: &Pair, q: &VerdictQuery) -> Result<ChaosReport> {
    for c in q.separation.iter().chain(&q.closeness) {
        if c.n < Int::one() || c.n > q.horizon {
            return domain(format!("checkpoint {} outside [1, {}]", c.n, q.horizon));
        }
    }
    if q.t0 <= Rat::zero() {
        return domain("t0 must be positive");
    }
    let mut separation = Vec::new();
    for c in &q.separation {
        let v = pair.phi_prefix(&q.t0, &c.n)?;
        let pass = v <= c.bound;
        separation.push(CheckRow { n: c.n.clone(), t: q.t0.clone(), lo: v.clone(), hi: v, bound: c.bound.clone(), pass });
    }
    let mut closeness = Vec::new();
    let mut implication = Vec::new();
    let sums = match (&q.alpha, q.closeness.iter().map(|c| &c.n).max()) {
        (Some(_), Some(top)) => Some(CumulativeSums::new(pair, top)?),
        _ => None,
    };
    for c in &q.closeness {
        let need = Rat::one() - &c.bound;
        for t in c.ts(&q.t_grid) {
            let plain = pair.phi_prefix(&t, &c.n)?;
            match (&q.alpha, &sums) {
                (Some(alpha), Some(s)) => {
                    let count = s.alpha_count(alpha, &t, &c.n)?;
                    let (lo, hi) = (count.fraction_lo(), count.fraction_hi());
                    let slack = Rat::new(alpha.eval(&c.n)?, c.n.clone());
                    let holds = plain >= &lo - &slack;
                    implication.push(ImplicationRow { n: c.n.clone(), t: t.clone(), alpha_lo: lo.clone(), plain, slack, holds });
                    let pass = lo >= need;
                    closeness.push(CheckRow { n: c.n.clone(), t, lo, hi, bound: c.bound.clone(), pass });
                }
                _ => {
                    let pass = plain >= need;
                    closeness.push(CheckRow { n: c.n.clone(), t, lo: plain.clone(), hi: plain, bound: c.bound.clone(), pass });
                }
            }
        }
    }
    let mut times: Vec<Int> = q.separation.iter().chain(&q.closeness).map(|c| c.n.clone()).collect();
    times.sort();
    times.dedup();
    let mut curves = Vec::new();
    let mut estimates = Vec::new();
    let mut grid = q.t_grid.clone();
    if !grid.contains(&q.t0) {
        grid.push(q.t0.clone());
        grid.sort();
    }
    for t in &grid {
        let pts: Vec<(Int, Rat)> = times.iter().map(|n| Ok((n.clone(), pair.phi_prefix(t, n)?))).collect::<Result<_>>()?;
        if let (Some(lo), Some(hi)) = (pts.iter().map(|p| p.1.clone()).min(), pts.iter().map(|p| p.1.clone()).max()) {
            estimates.push((t.clone(), lo, hi));
        }
        curves.push((t.clone(), pts));
    }
    let identical = pair.eventually_identical().unwrap_or(false);
    let witnessed = !separation.is_empty()
        && !closeness.is_empty()
        && separation.iter().all(|r| r.pass)
        && closeness.iter().all(|r| r.pass);
    let verdict = if identical {
        Verdict::RefutedAtHorizon
    } else if witnessed {
        if q.alpha.is_some() {
            Verdict::AlphaDc1Witnessed
        } else {
            Verdict::Dc1Witnessed
        }
    } else {
        Verdict::Inconclusive
    };
    let mut witness_times: Vec<Int> = separation.iter().chain(&closeness).filter(|r| r.pass).map(|r| r.n.clone()).collect();
    witness_times.sort();
    witness_times.dedup();
    Ok(ChaosReport {
        t0: q.t0.clone(),
        t_grid: q.t_grid.clone(),
        horizon: q.horizon.clone(),
        alpha: q.alpha.as_ref().map(|a| a.name.clone()),
        separation,
        closeness,
        implication,
        curves,
        estimates,
        verdict,
        witness_times,
    })
}
