//! Tracing schedules: every segment length is the least integer meeting the
//! strict ratio inequalities of its stage, so the invariants hold by
//! construction and are re-checked by `verify`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use shiftlab_core::analyze::{AlphaFunction, Checkpoint};
use shiftlab_core::error::{Error, Result};
use shiftlab_core::measure::{chain_on_segment, periodic_convergence, DenseSequence, FiniteMeasure, Segment};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{floor_rat, int, pow_int, rat_int, Int, Rat};
use shiftlab_core::symbolic::{m_epsilon, Alphabet, Word};

use crate::generic::{periodic_approximation, GenericPoint};
use crate::seed::{cyclic_admissible, distal_blocks, DistalBlocks, DistalSeed};

/// The compact connected set K: a point or a segment of measures, with the
/// seed measure μ ∈ K.
#[derive(Clone, Debug)]
pub enum KSet {
    Point(FiniteMeasure),
    /// μ = seg.point(mu).
    Segment { seg: Segment, mu: Rat },
}

impl KSet {
    fn dense(&self, alphabet: Alphabet, k: usize) -> Result<DenseSequence> {
        match self {
            KSet::Point(m) => DenseSequence::new(vec![m.clone()], alphabet, k),
            KSet::Segment { seg, .. } => DenseSequence::segment(seg, alphabet, k),
        }
    }

    pub fn mu(&self) -> Result<FiniteMeasure> {
        match self {
            KSet::Point(m) => Ok(m.clone()),
            KSet::Segment { seg, mu } => seg.point(mu),
        }
    }
}

/// Where a slot copies its symbols from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Target,
    Recurrence,
    Dense { stage: usize, index: usize },
    Generic(usize),
    /// x₁ or x₂ of the stage, chosen by ξ_i.
    Distal { stage: usize, i: usize },
}

/// A traced segment [a, b]: coordinates a+1 … a+len copy the source's 1 … len.
#[derive(Clone, Debug)]
pub struct Slot {
    pub a: Int,
    pub b: Int,
    pub len: Int,
    pub source: Source,
    /// Required segment length: b − a > n.
    pub n: Int,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub i: usize,
    /// α_i, the dense-sequence point the chain visits.
    pub alpha: FiniteMeasure,
    /// γ-slots for s = 1 … 2m−1; slot m−1 (0-based) traces β_m = α_i.
    pub chain: Vec<Slot>,
    pub distal: Slot,
    /// α-stage time d^{1,k} (first block only, α variant).
    pub alpha_d: Option<Int>,
}

impl Block {
    pub fn mid(&self) -> &Slot {
        &self.chain[self.chain.len() / 2]
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub k: usize,
    pub eps: Rat,
    pub delta: Rat,
    pub eta: Rat,
    /// mEpsilon(η_k): symbols copied beyond b.
    pub copy: usize,
    /// K_k.
    pub gap: usize,
    pub dense_words: Vec<Word>,
    pub dense: Vec<Slot>,
    pub recurrence: Option<Slot>,
    pub blocks: Vec<Block>,
    /// a^{1,k}_1 − b_prev.
    pub lead: Int,
}

impl Stage {
    pub fn end(&self) -> &Int {
        &self.blocks.last().unwrap().distal.b
    }

    /// Slot list in time order.
    pub fn slots(&self) -> Vec<&Slot> {
        let mut v: Vec<&Slot> = self.dense.iter().collect();
        v.extend(self.recurrence.iter());
        for b in &self.blocks {
            v.extend(b.chain.iter());
            v.push(&b.distal);
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct ScheduleConfig {
    pub eps: Rat,
    pub delta1: Rat,
    pub stages: usize,
    pub alpha: Option<AlphaFunction>,
    pub target: Word,
    /// Adds a recurrence slot tracing target^∞ for 16·2^k steps per stage.
    pub recurrence: bool,
    /// Weak* truncation used for chains and approximations.
    pub weak_k: usize,
}

impl ScheduleConfig {
    pub fn new(stages: usize) -> Self {
        ScheduleConfig {
            eps: Rat::new(int(1), int(8)),
            delta1: Rat::new(int(1), int(2)),
            stages,
            alpha: None,
            target: Word::empty(),
            recurrence: false,
            weak_k: 20,
        }
    }
}

/// Named checkpoint times.
#[derive(Clone, Debug)]
pub struct Separation {
    pub stage: usize,
    pub i: usize,
    pub n: Int,
    /// ζ − 5ε_k.
    pub t0: Rat,
    /// 2δ_k.
    pub bound: Rat,
}

#[derive(Clone, Debug)]
pub struct EmpiricalCheck {
    pub stage: usize,
    pub i: usize,
    pub n: Int,
    pub measure: FiniteMeasure,
    /// 4ε_k + 2δ_k.
    pub bound: Rat,
}

#[derive(Clone, Debug)]
pub struct TraceSchedule {
    pub eps: Rat,
    pub delta1: Rat,
    pub zeta: Rat,
    pub base: usize,
    pub gluing_gap: usize,
    pub target: Word,
    /// Target source: target^∞ when a recurrence slot is used, else the
    /// least admissible extension of the target word.
    pub target_source: Word,
    pub target_periodic: bool,
    pub target_slot: Slot,
    pub stages: Vec<Stage>,
    pub generics: Vec<GenericPoint>,
    pub distal: Vec<DistalBlocks>,
    pub alpha: Option<AlphaFunction>,
    /// t' = min(4ε_k, ζ − 5ε₁) used for the α requirement, per stage.
    pub alpha_t: Vec<Rat>,
    /// lead and first-slot N of stage m+1, for the end-of-stage inequality.
    pub next_lead: Int,
    pub next_n: Int,
    pub weak_k: usize,
    pub kset: Arc<KSet>,
}

struct Params {
    eps: Rat,
    delta: Rat,
    eta: Rat,
    copy: usize,
    gap: usize,
    dense_words: Vec<Word>,
    ell: Option<Int>,
}

fn params(model: &ShiftModel, cfg: &ScheduleConfig, k: usize) -> Result<Params> {
    let n = model.alphabet_size() as i64;
    let eps = &cfg.eps / rat_int(&pow_int(2, k));
    let delta = &cfg.delta1 / rat_int(&pow_int(2, k - 1));
    let eta = &eps * Rat::new(int(n - 1), int(4 * n));
    let metric = model.metric();
    let copy = m_epsilon(metric, &eta)?;
    let gap = model.specification_constant(&eta)?;
    let mut dense_words = Vec::new();
    for w in model.words(m_epsilon(metric, &eps)?)? {
        match model.extend(&w, copy)? {
            Some(x) => dense_words.push(x),
            None => return Err(Error::Invariant(format!("dense word {w} does not extend"))),
        }
    }
    let ell = cfg.recurrence.then(|| pow_int(2, k + 4));
    Ok(Params { eps, delta, eta, copy, gap, dense_words, ell })
}

fn lead(p: &Params) -> Int {
    let t = int(p.dense_words.len() as i64);
    let k = int(p.gap as i64);
    let mut l = (t + 1) * &k;
    if let Some(ell) = &p.ell {
        l += ell + &k;
    }
    l
}

/// Least b with b − a > n and (a + gap + next_n) < δ(b − a).
fn least_b(a: &Int, n: &Int, gap: &Int, next_n: &Int, delta: &Rat) -> Int {
    let ratio = floor_rat(&(rat_int(&(a + gap + next_n)) / delta)) + 1;
    let len: Int = (n + Int::one()).max(ratio);
    a + len
}

/// Least d with α(d)·t > rhs.
fn alpha_time(alpha: &AlphaFunction, t: &Rat, rhs: &Rat) -> Result<Int> {
    let holds = |d: &Int| -> Result<bool> { Ok(rat_int(&alpha.eval(d)?) * t > *rhs) };
    let mut hi = int(1);
    let mut steps = 0;
    while !holds(&hi)? {
        hi *= 2;
        steps += 1;
        if steps > 8192 {
            return Err(Error::Budget(format!("α-checkpoint requirement unreachable below 2^{steps}")));
        }
    }
    let mut lo: Int = &hi / 2;
    if lo.is_zero() {
        return Ok(hi);
    }
    // holds(hi), !holds(lo)
    while &hi - &lo > Int::one() {
        let mid: Int = (&lo + &hi) / 2;
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// γ-cache keyed by the rounded segment parameter.
struct Generics<'a> {
    model: &'a ShiftModel,
    kset: &'a KSet,
    weak_k: usize,
    cache: HashMap<Rat, (Word, Rat)>,
    seg_len: Rat,
    out: Vec<GenericPoint>,
}

impl Generics<'_> {
    /// Generic point for β = K(u) at stage radius eps.
    fn point(&mut self, u: &Rat, beta: FiniteMeasure, eps: &Rat) -> Result<usize> {
        let half = eps / rat_int(&int(2));
        let (key, slack) = match self.kset {
            KSet::Point(_) => (Rat::zero(), Rat::zero()),
            KSet::Segment { .. } => {
                let mut g = int(1);
                while rat_int(&g) * eps < rat_int(&int(4)) * &self.seg_len {
                    g *= 2;
                }
                let key = Rat::new((u * rat_int(&g)).round().to_integer(), g);
                let slack = (u - &key).abs() * &self.seg_len;
                (key, slack)
            }
        };
        let cached = self.cache.get(&key).filter(|(_, d)| d < &half).cloned();
        let (word, d) = match cached {
            Some(c) => c,
            None => {
                let center = match self.kset {
                    KSet::Point(m) => m.clone(),
                    KSet::Segment { seg, .. } => seg.point(&key)?,
                };
                let c = periodic_approximation(self.model, &center, &half, self.weak_k)?;
                self.cache.insert(key, c.clone());
                c
            }
        };
        let distance = d + slack;
        if &distance >= eps {
            return Err(Error::Invariant(format!("generic point at distance {distance} ≥ {eps}")));
        }
        let n = periodic_convergence(&word)?.threshold(eps)?;
        self.out.push(GenericPoint { target: beta, word, distance, n });
        Ok(self.out.len() - 1)
    }
}

fn chain_points(kset: &KSet, dense: &DenseSequence, i: usize, eps: &Rat, alphabet: Alphabet, weak_k: usize) -> Result<(FiniteMeasure, Vec<(Rat, FiniteMeasure)>)> {
    match kset {
        KSet::Point(m) => Ok((m.clone(), vec![(Rat::zero(), m.clone())])),
        KSet::Segment { seg, mu } => {
            let u = dense.weights(i)?[1].clone();
            let chain = chain_on_segment(seg, mu, &u, eps, alphabet, weak_k)?;
            let n = chain.points.len();
            let pts = chain
                .points
                .into_iter()
                .enumerate()
                .map(|(s, p)| {
                    let frac = if n == 1 { Rat::zero() } else { Rat::new(int(s as i64), int(n as i64 - 1)) };
                    (mu + (&u - mu) * frac, p)
                })
                .collect();
            Ok((dense.point(i)?, pts))
        }
    }
}

pub fn build_schedule(model: &ShiftModel, kset: &KSet, seed: &DistalSeed, cfg: &ScheduleConfig) -> Result<TraceSchedule> {
    if cfg.stages == 0 {
        return Err(Error::Domain("stages must be at least 1".into()));
    }
    if cfg.eps <= Rat::zero() || cfg.delta1 <= Rat::zero() || cfg.delta1 > Rat::one() {
        return Err(Error::Domain("need eps > 0 and 0 < δ₁ ≤ 1".into()));
    }
    if let Some(a) = &cfg.alpha {
        let c = a.certify()?;
        if !(c.nondecreasing && c.unbounded && c.sublinear) {
            return Err(Error::Domain(format!("{} fails the weight-family checks: {c:?}", a.name)));
        }
    }
    let base = model.alphabet_size();
    let alphabet = Alphabet::new(base)?;
    let g = model.gluing_gap()?;
    let zeta = seed.zeta().clone();
    let eps1 = &cfg.eps / rat_int(&int(2));
    let t0 = &zeta - rat_int(&int(5)) * &eps1;
    if t0 <= Rat::zero() {
        return Err(Error::Domain(format!("separation budget exhausted: ζ − 5ε₁ = {t0} ≤ 0")));
    }
    let diam = model.metric().diameter();
    let dense = kset.dense(alphabet, cfg.weak_k)?;
    let seg_len = match kset {
        KSet::Point(_) => Rat::zero(),
        KSet::Segment { seg, .. } => seg.length(alphabet, cfg.weak_k)?.upper(),
    };
    let mut gens = Generics { model, kset, weak_k: cfg.weak_k, cache: HashMap::new(), seg_len, out: Vec::new() };
    let all: Vec<Params> = (1..=cfg.stages + 1).map(|k| params(model, cfg, k)).collect::<Result<_>>()?;

    // the target segment [0, 0]
    let p1 = &all[0];
    let (target_source, target_periodic) = if cfg.recurrence {
        if cfg.target.is_empty() || !cyclic_admissible(model, &cfg.target)? {
            return Err(Error::Domain("a recurrence slot needs a target word w with w^∞ admissible".into()));
        }
        (cfg.target.clone(), true)
    } else {
        let len = p1.copy.max(cfg.target.len());
        match model.extend(&cfg.target, len)? {
            Some(w) => (w, false),
            None => return Err(Error::Domain(format!("target {} does not extend", cfg.target))),
        }
    };
    let l0 = p1.copy.max(cfg.target.len());
    let target_slot = Slot { a: int(0), b: int(0), len: int(l0 as i64), source: Source::Target, n: int(0) };

    // first chain N of every stage (β₁ = μ)
    let mu = kset.mu()?;
    let mut first_n = Vec::new();
    let mut plans = Vec::new();
    for (idx, p) in all.iter().enumerate() {
        let k = idx + 1;
        let mut blocks = Vec::new();
        if k <= cfg.stages {
            for i in 1..=k {
                let (alpha, pts) = chain_points(kset, &dense, i, &p.eps, alphabet, cfg.weak_k)?;
                let mut ids = Vec::new();
                for (u, beta) in &pts {
                    ids.push(gens.point(u, beta.clone(), &p.eps)?);
                }
                blocks.push((alpha, ids));
            }
            first_n.push(gens.out[blocks[0].1[0]].n.clone());
        } else {
            let (_, pts) = chain_points(kset, &dense, 1, &p.eps, alphabet, cfg.weak_k)?;
            let id = gens.point(&pts[0].0, mu.clone(), &p.eps)?;
            first_n.push(gens.out[id].n.clone());
        }
        plans.push(blocks);
    }

    let mut distal = Vec::new();
    let mut stages = Vec::new();
    let mut alpha_t = Vec::new();
    let mut prev_end = int(l0 as i64 - p1.copy as i64);
    for k in 1..=cfg.stages {
        let p = &all[k - 1];
        let gk = int(p.gap as i64);
        let db = distal_blocks(seed, &p.eps, &p.delta, model, cfg.weak_k)?;
        let dn = db.n.clone();
        distal.push(db);
        let mut dense_slots = Vec::new();
        let mut c = prev_end.clone();
        for index in 0..p.dense_words.len() {
            c += &gk;
            dense_slots.push(Slot { a: c.clone(), b: c.clone(), len: int(p.copy as i64), source: Source::Dense { stage: k, index }, n: int(0) });
        }
        let mut a = &c + &gk;
        let recurrence = p.ell.as_ref().map(|ell| {
            let s = Slot { a: a.clone(), b: &a + ell, len: ell + int(p.copy as i64), source: Source::Recurrence, n: int(0) };
            a = &s.b + &gk;
            s
        });
        let lead = &a - &prev_end;
        let t_alpha = (Rat::from_integer(int(4)) * &p.eps).min(t0.clone());
        alpha_t.push(t_alpha.clone());
        let plan = &plans[k - 1];
        let mut blocks = Vec::new();
        for (bi, (alpha, ids)) in plan.iter().enumerate() {
            let i = bi + 1;
            let m = ids.len();
            // γ-slots s = 1 … 2m−1 then the distal slot
            let order: Vec<usize> = (0..2 * m - 1).map(|s| if s < m { ids[s] } else { ids[2 * m - 2 - s] }).collect();
            let mut chain = Vec::new();
            let mut alpha_d = None;
            for (s, &id) in order.iter().enumerate() {
                let n = gens.out[id].n.clone();
                let next_n = if s + 1 < order.len() { gens.out[order[s + 1]].n.clone() } else { dn.clone() };
                let mut b = least_b(&a, &n, &gk, &next_n, &p.delta);
                if i == 1 && s == m - 1 {
                    if let Some(al) = &cfg.alpha {
                        let rhs = rat_int(&a) * &diam + rat_int(&int(2)) * &p.eps;
                        let d = alpha_time(al, &t_alpha, &rhs)?;
                        b = b.max(floor_rat(&(rat_int(&d) / &p.delta)) + 1);
                        alpha_d = Some(d);
                    }
                }
                chain.push(Slot { len: &b - &a + int(p.copy as i64), a: a.clone(), b: b.clone(), source: Source::Generic(id), n });
                a = b + &gk;
            }
            let (next_gap, next_n) = if i < k {
                (gk.clone(), gens.out[plan[bi + 1].1[0]].n.clone())
            } else {
                (lead_of(&all, k), first_n[k].clone())
            };
            let b = least_b(&a, &dn, &next_gap, &next_n, &p.delta);
            let distal_slot = Slot { len: &b - &a + int(p.copy as i64), a: a.clone(), b: b.clone(), source: Source::Distal { stage: k, i }, n: dn.clone() };
            a = b + &gk;
            blocks.push(Block { i, alpha: alpha.clone(), chain, distal: distal_slot, alpha_d });
        }
        let stage = Stage {
            k,
            eps: p.eps.clone(),
            delta: p.delta.clone(),
            eta: p.eta.clone(),
            copy: p.copy,
            gap: p.gap,
            dense_words: p.dense_words.clone(),
            dense: dense_slots,
            recurrence,
            blocks,
            lead,
        };
        prev_end = stage.end().clone();
        stages.push(stage);
    }
    let sched = TraceSchedule {
        eps: cfg.eps.clone(),
        delta1: cfg.delta1.clone(),
        zeta,
        base,
        gluing_gap: g,
        target: cfg.target.clone(),
        target_source,
        target_periodic,
        target_slot,
        stages,
        generics: gens.out,
        distal,
        alpha: cfg.alpha.clone(),
        alpha_t,
        next_lead: lead_of(&all, cfg.stages),
        next_n: first_n[cfg.stages].clone(),
        weak_k: cfg.weak_k,
        kset: Arc::new(kset.clone()),
    };
    sched.verify()?;
    Ok(sched)
}

/// Lead of stage k+1 (0-based index k into the parameter list).
fn lead_of(all: &[Params], k: usize) -> Int {
    lead(&all[k])
}

impl TraceSchedule {
    pub fn t0(&self) -> Rat {
        &self.zeta - rat_int(&int(5)) * &self.stages[0].eps
    }

    /// b of the last distal slot of the last stage.
    pub fn end(&self) -> Int {
        self.stages.last().unwrap().end().clone()
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Re-checks every schedule invariant with exact arithmetic.
    pub fn verify(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Invariant(m));
        let n = self.base as i64;
        let diam = Rat::new(int(1), int(n));
        let mut prev_end = &self.target_slot.len - int(self.stages[0].copy as i64);
        let mut prev_copy_end = self.target_slot.len.clone();
        for (si, st) in self.stages.iter().enumerate() {
            let k = st.k;
            let gk = int(st.gap as i64);
            // η_k·4/(1 − e^{−ln n}) ≤ ε_k
            if &st.eta * rat_int(&int(4 * n)) / rat_int(&int(n - 1)) > st.eps {
                return fail(format!("stage {k}: η budget"));
            }
            if st.gap != st.copy + self.gluing_gap {
                return fail(format!("stage {k}: K_k ≠ mEpsilon(η_k) + gap"));
            }
            let slots = st.slots();
            let mut last_b = prev_end.clone();
            for s in &slots {
                if &s.a - &last_b != gk {
                    return fail(format!("stage {k}: gap {} ≠ K_k before slot at {}", &s.a - &last_b, s.a));
                }
                if s.a < prev_copy_end {
                    return fail(format!("stage {k}: copies overlap at {}", s.a));
                }
                if s.len != &s.b - &s.a + int(st.copy as i64) {
                    return fail(format!("stage {k}: copy length at {}", s.a));
                }
                last_b = s.b.clone();
                prev_copy_end = &s.a + &s.len;
            }
            if stage_lead(st, &prev_end) != st.lead {
                return fail(format!("stage {k}: lead"));
            }
            let segs: Vec<&Slot> = st.blocks.iter().flat_map(|b| b.chain.iter().chain(std::iter::once(&b.distal))).collect();
            for (j, s) in segs.iter().enumerate() {
                let len = &s.b - &s.a;
                if len <= s.n {
                    return fail(format!("stage {k}: b − a ≤ N at {}", s.a));
                }
                let (gap, next_n) = match segs.get(j + 1) {
                    Some(t) => (&t.a - &s.b, t.n.clone()),
                    None => match self.stages.get(si + 1) {
                        Some(nx) => (nx.lead.clone(), nx.blocks[0].chain[0].n.clone()),
                        None => (self.next_lead.clone(), self.next_n.clone()),
                    },
                };
                if rat_int(&(&s.a + gap + next_n)) >= &st.delta * rat_int(&len) {
                    return fail(format!("stage {k}: ratio inequality fails at segment {}", s.a));
                }
            }
            if let (Some(al), Some(d)) = (&self.alpha, st.blocks[0].alpha_d.as_ref()) {
                let mid = st.blocks[0].mid();
                if rat_int(d) >= &st.delta * rat_int(&mid.b) {
                    return fail(format!("stage {k}: d/b ≥ δ_k"));
                }
                let rhs = rat_int(&mid.a) * &diam + rat_int(&int(2)) * &st.eps;
                if rat_int(&al.eval(d)?) * &self.alpha_t[si] <= rhs {
                    return fail(format!("stage {k}: α(d)·t ≤ a·diam + 2ε_k"));
                }
            } else if self.alpha.is_some() {
                return fail(format!("stage {k}: missing α checkpoint"));
            }
            for (bi, b) in st.blocks.iter().enumerate() {
                if b.i != bi + 1 || b.chain.len() % 2 != 1 {
                    return fail(format!("stage {k}: block layout"));
                }
            }
            if st.blocks.len() != k {
                return fail(format!("stage {k}: {} blocks", st.blocks.len()));
            }
            prev_end = st.end().clone();
        }
        Ok(())
    }

    /// Separation checkpoints for members ξ, η: distal slots of blocks i with
    /// ξ_i ≠ η_i, in every stage k ≥ i.
    pub fn separation(&self, xi: &[u8], eta: &[u8]) -> Vec<Separation> {
        let mut out = Vec::new();
        for st in &self.stages {
            for b in &st.blocks {
                if xi.get(b.i - 1) != eta.get(b.i - 1) {
                    out.push(Separation {
                        stage: st.k,
                        i: b.i,
                        n: b.distal.b.clone(),
                        t0: &self.zeta - rat_int(&int(5)) * &st.eps,
                        bound: rat_int(&int(2)) * &st.delta,
                    });
                }
            }
        }
        out
    }

    /// Closeness at b^{1,k}_m: Φ(t) ≥ 1 − δ_k for t ≥ 4ε_k.
    pub fn closeness(&self) -> Vec<Checkpoint> {
        self.stages
            .iter()
            .map(|st| Checkpoint::above(st.blocks[0].mid().b.clone(), st.delta.clone(), rat_int(&int(4)) * &st.eps))
            .collect()
    }

    /// α-checkpoints at b^{1,k}_m with t ≥ t'.
    pub fn alpha_checkpoints(&self) -> Vec<Checkpoint> {
        self.stages
            .iter()
            .zip(&self.alpha_t)
            .map(|(st, t)| Checkpoint::above(st.blocks[0].mid().b.clone(), st.delta.clone(), t.clone()))
            .collect()
    }

    /// E at b^{i,k}_m against α_i.
    pub fn empirical(&self) -> Vec<EmpiricalCheck> {
        let mut out = Vec::new();
        for st in &self.stages {
            for b in &st.blocks {
                out.push(EmpiricalCheck {
                    stage: st.k,
                    i: b.i,
                    n: b.mid().b.clone(),
                    measure: b.alpha.clone(),
                    bound: rat_int(&int(4)) * &st.eps + rat_int(&int(2)) * &st.delta,
                });
            }
        }
        out
    }

    /// Every segment end b, in time order.
    pub fn segment_ends(&self) -> Vec<Int> {
        self.stages.iter().flat_map(|st| st.blocks.iter().flat_map(|b| b.chain.iter().chain(std::iter::once(&b.distal)).map(|s| s.b.clone()))).collect()
    }

    pub fn slot_count(&self) -> usize {
        1 + self.stages.iter().map(|s| s.slots().len()).sum::<usize>()
    }
}

fn stage_lead(st: &Stage, prev_end: &Int) -> Int {
    &st.blocks[0].chain[0].a - prev_end
}
