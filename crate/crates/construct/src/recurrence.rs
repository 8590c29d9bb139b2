//! Families aimed at separating recurrence classes, with visit-density
//! evidence read off the realized members.

use num_traits::Zero;

use shiftlab_core::analyze::{densities_stream, visit_stream, DensityProfile, DEFAULT_WINDOW_FLOOR};
use shiftlab_core::error::Result;
use shiftlab_core::measure::{FiniteMeasure, Segment};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{rat, Int, Rat};
use shiftlab_core::symbolic::Word;

use crate::family::{construct_family, Member, ScrambleFamily};
use crate::schedule::{KSet, ScheduleConfig};
use crate::seed::DistalSeed;

/// Lexicographically least binary-alphabet de Bruijn word B(k, n)
/// (Fredricksen–Maiorana: concatenated Lyndon words of length dividing n).
pub fn de_bruijn(k: u8, n: usize) -> Word {
    let mut a = vec![0u8; n + 1];
    let mut out = Vec::new();
    fn db(t: usize, p: usize, n: usize, k: u8, a: &mut Vec<u8>, out: &mut Vec<u8>) {
        if t > n {
            if n % p == 0 {
                out.extend_from_slice(&a[1..=p]);
            }
        } else {
            a[t] = a[t - p];
            db(t + 1, p, n, k, a, out);
            for j in a[t - p] + 1..k {
                a[t] = j;
                db(t + 1, t, n, k, a, out);
            }
        }
    }
    db(1, 1, n, k, &mut a, &mut out);
    Word(out)
}

fn config(stages: usize, target: &Word, recurrence: bool) -> ScheduleConfig {
    let mut cfg = ScheduleConfig::new(stages);
    cfg.eps = rat(1, 32);
    cfg.delta1 = rat(1, 16);
    cfg.target = target.clone();
    cfg.recurrence = recurrence;
    cfg
}

/// K = {per(01)} with a recurrence slot tracing target^∞ in every stage:
/// frequent visits in short windows, rare ones along prefixes.
pub fn banach_family(stages: usize, target: &Word) -> Result<ScrambleFamily> {
    let f2 = ShiftModel::full(2)?;
    let w = Word::from("01");
    let seed = DistalSeed::single(&f2, &w)?;
    let k = KSet::Point(FiniteMeasure::periodic(w)?);
    construct_family(&f2, &k, &seed, &config(stages, target, true))
}

/// ν₃ = ¼·per(B(2,5)) + ¾·per(0).
pub fn nu3() -> Result<FiniteMeasure> {
    FiniteMeasure::convex(vec![(rat(1, 4), FiniteMeasure::periodic(de_bruijn(2, 5))?), (rat(3, 4), FiniteMeasure::periodic(Word::from("0"))?)])
}

/// K = conv{per(01), ν₃}: the checkpoint tracking ν₃ = α₃ puts most prefix
/// mass on the 0-block.
pub fn upper_family(stages: usize, target: &Word) -> Result<ScrambleFamily> {
    let f2 = ShiftModel::full(2)?;
    let w = Word::from("01");
    let seed = DistalSeed::single(&f2, &w)?;
    let seg = Segment::new(FiniteMeasure::periodic(w)?, nu3()?);
    let k = KSet::Segment { seg, mu: Rat::zero() };
    construct_family(&f2, &k, &seed, &config(stages, target, false))
}

/// Visit densities of {i : d(σ^i x, x) < eps} over the segment-end grid.
pub fn visit_densities(family: &ScrambleFamily, m: &Member, eps: &Rat) -> Result<DensityProfile> {
    let horizon: Int = family.schedule.end();
    let (v, _) = visit_stream(&m.stream, family.model.metric(), eps, &horizon)?;
    densities_stream(&v, &horizon, &family.schedule.segment_ends(), DEFAULT_WINDOW_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn de_bruijn_covers_every_window_once() {
        let w = de_bruijn(2, 5);
        assert_eq!(w.len(), 32);
        let s = w.symbols();
        let seen: BTreeSet<Vec<u8>> = (0..32).map(|i| (0..5).map(|j| s[(i + j) % 32]).collect()).collect();
        assert_eq!(seen.len(), 32);
        assert_eq!(de_bruijn(2, 3), Word::from("00010111"));
    }
}
