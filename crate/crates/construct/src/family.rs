//! Members x_ξ of a scrambled family, assembled slot by slot from a schedule.

use std::sync::Arc;

use num_traits::ToPrimitive;

use shiftlab_core::analyze::{dc1_verdict, default_t_grid, ChaosReport, Checkpoint, Pair, VerdictQuery};
use shiftlab_core::error::{Error, Result};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{int, Int, Rat};
use shiftlab_core::symbolic::stream::StreamBuilder;
use shiftlab_core::symbolic::{Cycle, Side, SymbolStream, Word};

use crate::schedule::{KSet, ScheduleConfig, Slot, Source, TraceSchedule};
use crate::seed::DistalSeed;
use crate::trace::{admissible_prefix, copies, exponential_bound_holds};

/// Context length handed to bridges on each side of a filler.
const BRIDGE_CONTEXT: usize = 32;

pub struct ScrambleFamily {
    pub model: ShiftModel,
    pub schedule: Arc<TraceSchedule>,
    target: Arc<Cycle>,
    dense: Vec<Vec<Arc<Cycle>>>,
    generic: Vec<Arc<Cycle>>,
    distal: Vec<[Arc<Cycle>; 2]>,
}

#[derive(Clone, Debug)]
pub struct Member {
    /// ξ restricted to the realized stages.
    pub xi: Vec<u8>,
    pub stream: SymbolStream,
}

/// Tracing evidence for one member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub slots: usize,
    pub copies_exact: bool,
    pub exponential: bool,
    pub admissible: bool,
}

impl TraceReport {
    pub fn ok(&self) -> bool {
        self.copies_exact && self.exponential && self.admissible
    }
}

pub fn construct_family(model: &ShiftModel, kset: &KSet, seed: &DistalSeed, cfg: &ScheduleConfig) -> Result<ScrambleFamily> {
    let schedule = crate::schedule::build_schedule(model, kset, seed, cfg)?;
    ScrambleFamily::new(model.clone(), schedule)
}

impl ScrambleFamily {
    pub fn new(model: ShiftModel, schedule: TraceSchedule) -> Result<Self> {
        let target = Cycle::from_word(&schedule.target_source);
        let dense = schedule.stages.iter().map(|s| s.dense_words.iter().map(Cycle::from_word).collect()).collect();
        let generic = schedule.generics.iter().map(|g| Cycle::from_word(&g.word)).collect();
        let distal = schedule.distal.iter().map(|d| [Cycle::from_word(&d.w1), Cycle::from_word(&d.w2)]).collect();
        Ok(ScrambleFamily { model, schedule: Arc::new(schedule), target, dense, generic, distal })
    }

    pub fn stages(&self) -> usize {
        self.schedule.stages.len()
    }

    fn bit(xi: &[u8], i: usize) -> usize {
        xi.get(i - 1).map_or(0, |&b| usize::from(b != 0))
    }

    /// Cycle a slot copies from; its first symbol lands on coordinate a+1.
    fn source(&self, s: &Source, xi: &[u8]) -> Arc<Cycle> {
        match s {
            Source::Target | Source::Recurrence => self.target.clone(),
            Source::Dense { stage, index } => self.dense[stage - 1][*index].clone(),
            Source::Generic(id) => self.generic[*id].clone(),
            Source::Distal { stage, i } => self.distal[stage - 1][Self::bit(xi, *i)].clone(),
        }
    }

    /// The source as a one-sided stream y with y_1 = first symbol.
    pub fn source_stream(&self, s: &Source, xi: &[u8]) -> Result<SymbolStream> {
        SymbolStream::periodic(Side::OneSided, &self.source(s, xi).word())
    }

    fn slots(&self) -> Vec<&Slot> {
        let mut v = vec![&self.schedule.target_slot];
        for st in &self.schedule.stages {
            v.extend(st.slots());
        }
        v
    }

    pub fn member(&self, xi: &[u8]) -> Result<Member> {
        let mut b = StreamBuilder::one_sided();
        let mut tail = Word::empty();
        let mut last: Option<(Arc<Cycle>, Int)> = None;
        for s in self.slots() {
            let cyc = self.source(&s.source, xi);
            let filler: Int = &s.a + 1 - b.cursor();
            let f = filler.to_usize().ok_or_else(|| Error::Invariant(format!("copies overlap before {}", s.a)))?;
            let p = cyc.len();
            let head = Word((0..BRIDGE_CONTEXT.min(s.len.to_usize().unwrap_or(usize::MAX))).map(|r| cyc.at(r % p)).collect());
            if !tail.is_empty() || f > 0 {
                let w = self
                    .model
                    .bridge(&tail, &head, f)?
                    .ok_or_else(|| Error::Invariant(format!("no bridge of length {f} before slot at {}", s.a)))?;
                b.push_word(&w);
            }
            let anchor: Int = &s.a + 1;
            b.push_periodic(cyc.clone(), &s.len, anchor.clone());
            let l = s.len.to_usize().unwrap_or(usize::MAX);
            let k = BRIDGE_CONTEXT.min(l);
            let r0 = ((&s.len - int(k as i64)) % int(p as i64)).to_usize().unwrap();
            tail = Word((0..k).map(|r| cyc.at((r0 + r) % p)).collect());
            last = Some((cyc, anchor));
        }
        let (cyc, anchor) = last.unwrap();
        let stream = b.finish_anchored(cyc, anchor)?;
        let m = self.stages();
        Ok(Member { xi: (1..=m).map(|i| Self::bit(xi, i) as u8).collect(), stream })
    }

    /// End of the copy window of the last slot.
    pub fn horizon(&self) -> Int {
        let st = self.schedule.stages.last().unwrap();
        self.schedule.end() + int(st.copy as i64)
    }

    pub fn verify_member(&self, m: &Member) -> Result<TraceReport> {
        let mut exact = true;
        let slots = self.slots();
        for s in &slots {
            let y = self.source_stream(&s.source, &m.xi)?;
            if !copies(&m.stream, &y, &s.a, &s.len)? {
                exact = false;
                break;
            }
        }
        let base = self.schedule.base;
        let exponential = self.schedule.stages.iter().all(|st| exponential_bound_holds(base, st.copy, &st.eta));
        let admissible = admissible_prefix(&self.model, &m.stream, &(self.horizon() + 1), BRIDGE_CONTEXT)?;
        Ok(TraceReport { slots: slots.len(), copies_exact: exact, exponential, admissible })
    }

    /// DC1 verdict for a pair of members at the schedule's checkpoints.
    pub fn pair_report(&self, x: &Member, y: &Member, extra_t: &[Rat]) -> Result<ChaosReport> {
        let sched = &self.schedule;
        let separation: Vec<Checkpoint> = sched.separation(&x.xi, &y.xi).into_iter().map(|s| Checkpoint::new(s.n, s.bound)).collect();
        let alpha = sched.alpha.clone();
        let closeness = if alpha.is_some() { sched.alpha_checkpoints() } else { sched.closeness() };
        let eps1 = &sched.stages[0].eps;
        let metric = self.model.metric();
        let query = VerdictQuery {
            t0: sched.t0(),
            t_grid: default_t_grid(&sched.zeta, eps1, &metric.diameter(), extra_t),
            separation,
            closeness,
            horizon: self.horizon(),
            alpha,
        };
        dc1_verdict(&Pair::new(&x.stream, &y.stream, metric)?, &query)
    }
}

/// ξ-prefix from its label over {1, 2}; symbol 1 selects x₁, 2 selects x₂.
pub fn parse_xi(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '1' => Ok(0),
            '2' => Ok(1),
            _ => Err(Error::Domain(format!("ξ must be a string over {{1, 2}}, got {s:?}"))),
        })
        .collect()
}

pub fn xi_label(xi: &[u8]) -> String {
    xi.iter().map(|&b| if b == 0 { '1' } else { '2' }).collect()
}
