//! Birkhoff averages along a checkpoint grid and finite evidence for the
//! recurrence classes of a point: visit sets of its own ε-balls and word-level
//! shadows of C_x and ω(x).

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::density::{densities_stream, DensityProfile};
use super::pair::closeness_window;
use crate::error::{domain, Result};
use crate::num::{int, rat_int, Int, Rat};
use crate::symbolic::{count_occurrences, occurrence_stream, window_counts, Alphabet, Observable, ShiftMetric, SymbolStream, Word};

/// (1/n)·Σ_{s=1}^{n} φ read at start s (the orbit average over n steps).
pub fn birkhoff_average(x: &SymbolStream, phi: &Observable, n: &Int) -> Result<Rat> {
    if n < &Int::one() {
        return domain("n must be at least 1");
    }
    let mut acc = Rat::zero();
    for (c, cyl) in &phi.terms {
        let o = int(cyl.offset as i64);
        acc += c * rat_int(&count_occurrences(x, cyl.word.symbols(), &o, &(&o + n))?);
    }
    Ok(acc / rat_int(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Oscillation {
    Regular,
    /// Estimates within tolerance of the declared (a, b).
    Irregular { a: Rat, b: Rat },
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct BirkhoffReport {
    pub averages: Vec<(Int, Rat)>,
    /// min / max over the tail half of the grid.
    pub liminf: Rat,
    pub limsup: Rat,
    pub verdict: Oscillation,
}

pub fn birkhoff_oscillation(
    x: &SymbolStream,
    phi: &Observable,
    grid: &[Int],
    declared: Option<(Rat, Rat)>,
    tol: &Rat,
) -> Result<BirkhoffReport> {
    if grid.is_empty() {
        return domain("empty checkpoint grid");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("checkpoint grid must increase");
    }
    let averages: Vec<(Int, Rat)> = grid.iter().map(|n| Ok((n.clone(), birkhoff_average(x, phi, n)?))).collect::<Result<_>>()?;
    let tail = &averages[averages.len() / 2..];
    let liminf = tail.iter().map(|a| a.1.clone()).min().unwrap();
    let limsup = tail.iter().map(|a| a.1.clone()).max().unwrap();
    let verdict = match declared {
        Some((a, b)) if a < b && (&liminf - &a).abs() <= *tol && (&limsup - &b).abs() <= *tol => Oscillation::Irregular { a, b },
        _ if &limsup - &liminf <= *tol => Oscillation::Regular,
        _ => Oscillation::Undetermined,
    };
    Ok(BirkhoffReport { averages, liminf, limsup, verdict })
}

/// 0/1 stream of the visit times {i ≥ 1 : d(σ^i x, x) < ε} on [1, N].
pub fn visit_stream(x: &SymbolStream, metric: ShiftMetric, eps: &Rat, horizon: &Int) -> Result<(SymbolStream, usize)> {
    match closeness_window(metric, x.side(), eps)? {
        None => Ok((SymbolStream::periodic(x.side(), &Word(vec![1]))?, 0)),
        Some((a, b)) => {
            let len = (b - a + 1) as usize;
            let u = x.window(&int(a), len)?;
            let a = int(a);
            let occ = occurrence_stream(x, &u, &(&a + 1), &(horizon + &a + 1))?;
            Ok((occ.shift(&a)?, len))
        }
    }
}

#[derive(Clone, Debug)]
pub struct VisitEvidence {
    pub eps: Rat,
    /// Length of the coordinate window that decides ε-closeness.
    pub window: usize,
    pub visits: DensityProfile,
}

#[derive(Clone, Debug)]
pub struct RecurrenceProfile {
    pub horizon: Int,
    pub levels: Vec<VisitEvidence>,
    pub depth: usize,
    /// Words of length `depth` with frequency ≥ threshold at some checkpoint
    /// of the tail half of the grid.
    pub support_shadow: BTreeSet<Word>,
    /// Words of length `depth` read at starts in [⌈N/2⌉, N].
    pub omega_shadow: BTreeSet<Word>,
    /// The prefix word of x recurs in the tail (x ∈ ω(x) at this depth).
    pub returns: bool,
}

impl RecurrenceProfile {
    pub fn support_in_omega(&self) -> bool {
        self.support_shadow.is_subset(&self.omega_shadow)
    }

    /// Evidence for C_x = ω(x).
    pub fn omega_in_support(&self) -> bool {
        self.omega_shadow.is_subset(&self.support_shadow)
    }
}

fn decode(code: u64, len: usize, base: usize) -> Word {
    let mut out = vec![0u8; len];
    let mut c = code;
    for k in (0..len).rev() {
        out[k] = (c % base as u64) as u8;
        c /= base as u64;
    }
    Word(out)
}

pub struct RecurrenceQuery<'a> {
    pub metric: ShiftMetric,
    pub alphabet: Alphabet,
    pub eps_grid: &'a [Rat],
    pub horizon: Int,
    pub checkpoints: &'a [Int],
    pub window_floor: usize,
    pub depth: usize,
    pub threshold: Rat,
}

pub fn recurrence_profile(x: &SymbolStream, q: &RecurrenceQuery<'_>) -> Result<RecurrenceProfile> {
    if q.depth == 0 {
        return domain("depth must be at least 1");
    }
    let n = &q.horizon;
    let mut levels = Vec::new();
    for eps in q.eps_grid {
        let (v, window) = visit_stream(x, q.metric, eps, n)?;
        let visits = densities_stream(&v, n, q.checkpoints, q.window_floor)?;
        levels.push(VisitEvidence { eps: eps.clone(), window, visits });
    }
    let base = q.alphabet.size();
    // starts 1..n on either side, as for empirical measures
    let first = int(1);
    let mut support_shadow = BTreeSet::new();
    let grid: Vec<&Int> = q.checkpoints.iter().filter(|c| *c <= n).collect();
    for c in &grid[grid.len() / 2..] {
        for (code, count) in window_counts(x, q.depth, base, &first, &(*c + 1))? {
            if Rat::new(count, (*c).clone()) >= q.threshold {
                support_shadow.insert(decode(code, q.depth, base));
            }
        }
    }
    let half: Int = (n + 1) / 2;
    let tail = window_counts(x, q.depth, base, &half.max(first.clone()), &(n + 1))?;
    let omega_shadow: BTreeSet<Word> = tail.keys().map(|&c| decode(c, q.depth, base)).collect();
    let prefix = Word(x.window(&first, q.depth)?);
    let returns = omega_shadow.contains(&prefix);
    Ok(RecurrenceProfile { horizon: n.clone(), levels, depth: q.depth, support_shadow, omega_shadow, returns })
}
