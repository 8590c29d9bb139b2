//! Cumulative distance sums S(i) = Σ_{j<i} d(σ^j x, σ^j y) over a block
//! disagreement stream, as certified fixed-point intervals, and the count of
//! i ≤ n with S(i) < α(i)·t.
//!
//! The distance at time j only depends on where the nearest disagreements
//! are, so [0, n) splits into periodic regions (inside a run of a periodic
//! mask that contains disagreements) and gaps between consecutive
//! disagreements, where the sum is a geometric or harmonic range.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::alpha::AlphaFunction;
use super::pair::Pair;
use crate::error::{domain, Error, Result};
use crate::num::{int, ln_int, modulo, pow_int, rat_int, Int, Rat};
use crate::symbolic::{Cycle, Piece, ShiftMetric, Side, SymbolStream};

/// Distance contributed by a disagreement at separation d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// One-sided geometric: base^-d where d ≥ 1 is the gap to the next one.
    Forward(u64),
    /// Two-sided geometric: base^-(1+d), d the distance to the nearest one.
    SymGeo(u64),
    /// Polynomial: 1/(1+d).
    SymPoly,
}

impl Kernel {
    pub fn of(metric: ShiftMetric, side: Side) -> Result<Kernel> {
        match (metric, side) {
            (ShiftMetric::Geometric { base }, Side::OneSided) => Ok(Kernel::Forward(base)),
            (ShiftMetric::Geometric { base }, Side::TwoSided) => Ok(Kernel::SymGeo(base)),
            (ShiftMetric::Polynomial, Side::TwoSided) => Ok(Kernel::SymPoly),
            (ShiftMetric::Polynomial, Side::OneSided) => domain("the polynomial metric is two-sided"),
        }
    }

    pub fn exact(&self, d: u64) -> Rat {
        match self {
            Kernel::Forward(b) => Rat::new(Int::one(), pow_int(*b, d as usize)),
            Kernel::SymGeo(b) => Rat::new(Int::one(), pow_int(*b, d as usize + 1)),
            Kernel::SymPoly => Rat::new(Int::one(), int(d as i64 + 1)),
        }
    }

    fn symmetric(&self) -> bool {
        !matches!(self, Kernel::Forward(_))
    }
}

/// Interval [lo, hi]·2^-bits.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Fixed {
    pub lo: Int,
    pub hi: Int,
}

impl Fixed {
    fn add(&mut self, o: &Fixed) {
        self.lo += &o.lo;
        self.hi += &o.hi;
    }

    fn scaled(&self, k: &Int) -> Fixed {
        Fixed { lo: &self.lo * k, hi: &self.hi * k }
    }

    fn minus(&self, o: &Fixed) -> Fixed {
        Fixed { lo: &self.lo - &o.lo, hi: &self.hi - &o.hi }
    }
}

struct Precision {
    bits: usize,
}

impl Precision {
    fn floor(&self, r: &Rat) -> Int {
        (r.numer() << self.bits).div_floor(r.denom())
    }

    fn ceil(&self, r: &Rat) -> Int {
        -((-(r.numer() << self.bits)).div_floor(r.denom()))
    }

    fn both(&self, r: &Rat) -> Fixed {
        Fixed { lo: self.floor(r), hi: self.ceil(r) }
    }

    fn from_f64(&self, v: f64, up: bool) -> Int {
        let r = Rat::from_float(v).unwrap_or_else(Rat::zero);
        if up {
            self.ceil(&r)
        } else {
            self.floor(&r)
        }
    }

    /// Σ_{d=a}^{b} h(d) for the kernel.
    fn hsum(&self, k: Kernel, a: &Int, b: &Int) -> Fixed {
        if a > b {
            return Fixed::default();
        }
        match k {
            Kernel::Forward(base) => self.geo(base, a, b),
            Kernel::SymGeo(base) => self.geo(base, &(a + 1), &(b + 1)),
            Kernel::SymPoly => self.harmonic(&(a + 1), &(b + 1)),
        }
    }

    /// Σ_{k=a}^{b} base^-k.
    fn geo(&self, base: u64, a: &Int, b: &Int) -> Fixed {
        let cut = (self.bits as f64 / (base as f64).log2()).ceil() as u64 + 4;
        let k0 = match a.to_u64() {
            Some(v) if v <= cut => v,
            _ => return Fixed { lo: Int::zero(), hi: Int::one() },
        };
        let (k1, clipped) = match b.to_u64() {
            Some(v) if v <= cut => (v, false),
            _ => (cut, true),
        };
        let num = pow_int(base, (k1 - k0 + 1) as usize) - 1;
        let den = pow_int(base, k1 as usize) * int(base as i64 - 1);
        let mut f = self.both(&Rat::new(num, den));
        if clipped {
            f.hi += 1;
        }
        f
    }

    /// Σ_{m=a}^{b} 1/m for 1 ≤ a ≤ b.
    fn harmonic(&self, a: &Int, b: &Int) -> Fixed {
        const EXPLICIT: u64 = 256;
        let one = Int::one() << self.bits;
        let count: Int = b - a + 1;
        let mut out = Fixed::default();
        if count <= int(EXPLICIT as i64) || a <= &int(EXPLICIT as i64) {
            let stop = if count <= int(EXPLICIT as i64) { b.clone() } else { int(EXPLICIT as i64).min(b.clone()) };
            let mut m = a.clone();
            while m <= stop {
                let (q, r) = one.div_rem(&m);
                out.hi += if r.is_zero() { q.clone() } else { &q + 1 };
                out.lo += q;
                m += 1;
            }
            if &stop < b {
                out.add(&self.harmonic(&(stop + 1), b));
            }
            return out;
        }
        if &count * int(1_000_000) < *a {
            // (b-a+1)/b ≤ Σ ≤ (b-a+1)/a
            return Fixed {
                lo: self.floor(&Rat::new(count.clone(), b.clone())),
                hi: self.ceil(&Rat::new(count, a.clone())),
            };
        }
        // Σ = ψ(b+1) − ψ(a), ψ(x) = ln x − 1/(2x) − 1/(12x²) + r, 0 ≤ r ≤ 1/(120x⁴)
        let lb1 = ln_int(&(b + 1));
        let la = ln_int(a);
        let af = a.to_f64().unwrap_or(f64::INFINITY);
        let bf = (b + 1u32).to_f64().unwrap_or(f64::INFINITY);
        let corr = |x: f64| -1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
        let v = (lb1 - la) + corr(bf) - corr(af);
        let rem = 1.0 / (120.0 * af.powi(4));
        let margin = 1e-13 * (lb1.abs() + la.abs() + 1.0);
        let (lo, hi) = (v - rem, v + rem);
        Fixed { lo: self.from_f64((lo - margin).max(0.0), false), hi: self.from_f64(hi + margin, true) }
    }
}

const STRIDE: usize = 64;

/// Per-residue distances of a mask cycle and sparse prefix sums of h.
struct Table {
    period: usize,
    dist: Vec<u32>,
    vals: HashMap<u32, Fixed>,
    pre: Vec<Fixed>,
    total: Fixed,
}

impl Table {
    fn new(cycle: &Cycle, kernel: Kernel, prec: &Precision) -> Table {
        let p = cycle.len();
        let s = cycle.symbols();
        let ones: Vec<usize> = (0..p).filter(|&r| s[r] == 1).collect();
        debug_assert!(!ones.is_empty());
        // next one strictly after r, cyclically
        let mut next = vec![0u32; p];
        let mut prev = vec![0u32; p];
        let mut last: Option<usize> = None;
        for k in (0..2 * p).rev() {
            let r = k % p;
            if let Some(l) = last {
                if k < p {
                    next[r] = (l - k) as u32;
                }
            }
            if s[r] == 1 {
                last = Some(k);
            }
        }
        let mut last: Option<usize> = None;
        for k in 0..2 * p {
            let r = k % p;
            if s[r] == 1 {
                last = Some(k);
            }
            if k >= p {
                prev[r] = (k - last.unwrap()) as u32;
            }
        }
        let dist: Vec<u32> = if kernel.symmetric() {
            (0..p).map(|r| if s[r] == 1 { 0 } else { next[r].min(prev[r]) }).collect()
        } else {
            next
        };
        let mut vals = HashMap::new();
        for &d in &dist {
            vals.entry(d).or_insert_with(|| prec.hsum(kernel, &int(d as i64), &int(d as i64)));
        }
        let mut pre = Vec::with_capacity(p / STRIDE + 1);
        let mut acc = Fixed::default();
        for (r, d) in dist.iter().enumerate() {
            if r % STRIDE == 0 {
                pre.push(acc.clone());
            }
            acc.add(&vals[d]);
        }
        Table { period: p, dist, vals, pre, total: acc }
    }

    fn prefix(&self, r: usize) -> Fixed {
        if r == self.period {
            return self.total.clone();
        }
        let mut acc = self.pre[r / STRIDE].clone();
        for q in (r / STRIDE) * STRIDE..r {
            acc.add(&self.vals[&self.dist[q]]);
        }
        acc
    }

    /// Sum over the `len` residues starting at r0 (len ≤ period).
    fn range(&self, r0: usize, len: usize) -> Fixed {
        if len == 0 {
            return Fixed::default();
        }
        if r0 + len <= self.period {
            self.prefix(r0 + len).minus(&self.prefix(r0))
        } else {
            let mut a = self.total.minus(&self.prefix(r0));
            a.add(&self.prefix(r0 + len - self.period));
            a
        }
    }
}

#[derive(Clone)]
enum Kind {
    /// g(j) = h(dist[(j - anchor) mod P]).
    Periodic { table: Arc<Table>, anchor: Int },
    /// Between disagreements at `left` and `right` (absent = none).
    Gap { left: Option<Int>, right: Option<Int> },
}

#[derive(Clone)]
struct Region {
    start: Int,
    end: Int,
    kind: Kind,
    cum: Fixed,
}

/// Certified count of {1 ≤ i ≤ n : S(i) < α(i)·t}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaCount {
    pub n: Int,
    pub lo: Int,
    pub hi: Int,
}

impl AlphaCount {
    pub fn fraction_lo(&self) -> Rat {
        Rat::new(self.lo.clone(), self.n.clone())
    }

    pub fn fraction_hi(&self) -> Rat {
        Rat::new(self.hi.clone(), self.n.clone())
    }

    pub fn exact(&self) -> Option<Rat> {
        (self.lo == self.hi).then(|| self.fraction_lo())
    }
}

/// Times up to which undecided comparisons are settled with exact sums.
pub const EXACT_LIMIT: usize = 4096;
/// Bisection work per count.
pub const BISECTION_BUDGET: usize = 400_000;

pub struct CumulativeSums {
    kernel: Kernel,
    prec: Precision,
    horizon: Int,
    regions: Vec<Region>,
    exact: OnceLock<Option<Vec<Rat>>>,
}

fn piece_ones(p: &Piece) -> Option<(Int, Int)> {
    let s = p.start.clone().unwrap();
    let e = p.end.clone().unwrap();
    if p.cycle.symbols().iter().all(|&b| b == 0) {
        return None;
    }
    let reach = (&e - &s).to_usize().unwrap_or(usize::MAX).min(p.cycle.len());
    let mut first = None;
    for k in 0..reach {
        let c = &s + k;
        if p.symbol(&c) == 1 {
            first = Some(c);
            break;
        }
    }
    let first = first?;
    let mut c = &e - 1;
    loop {
        if p.symbol(&c) == 1 {
            return Some((first, c));
        }
        c -= 1;
    }
}

fn first_one_from(delta: &SymbolStream, c: &Int) -> Result<Option<Int>> {
    let (_, tail) = delta.end_pieces().unwrap();
    let hi = delta.bounded_extent().map(|b| b.1).unwrap_or_else(|| c.clone());
    let end = hi.max(c.clone()) + int(tail.cycle.len() as i64 + 1);
    for p in delta.pieces(c, &end)? {
        if let Some((f, _)) = piece_ones(&p) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

fn last_one_below(delta: &SymbolStream, c: &Int) -> Result<Option<Int>> {
    let (head, _) = delta.end_pieces().unwrap();
    let lo = delta.bounded_extent().and_then(|b| b.0).unwrap_or_else(|| c.clone());
    let start = lo.min(c.clone()) - int(head.cycle.len() as i64 + 1);
    for p in delta.pieces(&start, c)?.iter().rev() {
        if let Some((_, l)) = piece_ones(p) {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

impl CumulativeSums {
    /// Sums for times j < horizon.
    pub fn new(pair: &Pair, horizon: &Int) -> Result<Self> {
        if !pair.delta.is_blocks() {
            return Err(Error::Capability("cumulative sums need block-structured streams".into()));
        }
        if horizon < &Int::one() {
            return domain("horizon must be at least 1");
        }
        let kernel = Kernel::of(pair.metric, pair.side())?;
        let prec = Precision { bits: horizon.bits() as usize + 128 };
        let delta = &pair.delta;
        let h = horizon + 1;
        let from = if kernel.symmetric() { int(0) } else { int(1) };
        let mut tables: HashMap<usize, Arc<Table>> = HashMap::new();
        let mut regions: Vec<Region> = Vec::new();
        let push = |regions: &mut Vec<Region>, start: Int, end: Int, kind: Kind| {
            if start < end {
                regions.push(Region { start, end, kind, cum: Fixed::default() });
            }
        };
        let mut cursor = int(0);
        let mut left = if kernel.symmetric() { last_one_below(delta, &int(0))? } else { None };
        for p in delta.pieces(&from, &h)? {
            let Some((f, l)) = piece_ones(&p) else { continue };
            let key = Arc::as_ptr(&p.cycle) as usize;
            let table = tables.entry(key).or_insert_with(|| Arc::new(Table::new(&p.cycle, kernel, &prec))).clone();
            let kind = Kind::Periodic { table, anchor: p.anchor.clone() };
            if kernel.symmetric() {
                push(&mut regions, cursor.clone(), f.clone(), Kind::Gap { left: left.clone(), right: Some(f.clone()) });
                push(&mut regions, f.clone(), &l + 1, kind);
                cursor = &l + 1;
            } else {
                push(&mut regions, cursor.clone(), &f - 1, Kind::Gap { left: None, right: Some(f.clone()) });
                push(&mut regions, &f - 1, l.clone(), kind);
                cursor = l.clone();
            }
            left = Some(l);
        }
        let right = first_one_from(delta, &h)?;
        let end = (&cursor).max(horizon).clone();
        push(&mut regions, cursor, end, Kind::Gap { left, right });
        let mut sums = CumulativeSums { kernel, prec, horizon: horizon.clone(), regions, exact: OnceLock::new() };
        let mut acc = Fixed::default();
        for k in 0..sums.regions.len() {
            sums.regions[k].cum = acc.clone();
            let end = sums.regions[k].end.clone();
            let part = sums.partial(k, &end);
            acc.add(&part);
        }
        Ok(sums)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn precision_bits(&self) -> usize {
        self.prec.bits
    }

    /// Σ g(j) for j in [start_k, i).
    fn partial(&self, k: usize, i: &Int) -> Fixed {
        let r = &self.regions[k];
        let s = &r.start;
        if i <= s {
            return Fixed::default();
        }
        match &r.kind {
            Kind::Periodic { table, anchor } => {
                let len = i - s;
                let (full, rem) = len.div_rem(&int(table.period as i64));
                let mut out = if full.is_zero() { Fixed::default() } else { table.total.scaled(&full) };
                out.add(&table.range(modulo(&(s - anchor), table.period), rem.to_usize().unwrap()));
                out
            }
            Kind::Gap { left, right } => {
                let k = self.kernel;
                let last: Int = i - 1;
                match (k.symmetric(), left, right) {
                    (_, _, Some(f)) if !k.symmetric() => self.prec.hsum(k, &(f - &last), &(f - s)),
                    (false, _, None) => Fixed::default(),
                    (true, None, None) => Fixed::default(),
                    (true, Some(l), None) => self.prec.hsum(k, &(s - l), &(&last - l)),
                    (true, None, Some(f)) => self.prec.hsum(k, &(f - &last), &(f - s)),
                    (true, Some(l), Some(f)) => {
                        let mid: Int = (l + f).div_floor(&int(2));
                        let mut out = Fixed::default();
                        let e1 = (&last).min(&mid).clone();
                        if s <= &e1 {
                            out.add(&self.prec.hsum(k, &(s - l), &(&e1 - l)));
                        }
                        let s2 = s.max(&(&mid + 1)).clone();
                        if s2 <= last {
                            out.add(&self.prec.hsum(k, &(f - &last), &(f - &s2)));
                        }
                        out
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    fn region_of(&self, j: &Int) -> Option<usize> {
        let k = self.regions.partition_point(|r| &r.start <= j);
        if k == 0 {
            return None;
        }
        (j < &self.regions[k - 1].end).then_some(k - 1)
    }

    /// S(i) as a fixed-point interval (scale 2^precision_bits).
    pub fn fixed(&self, i: &Int) -> Result<Fixed> {
        if i.is_negative() || i > &self.horizon {
            return domain(format!("time {i} outside [0, {}]", self.horizon));
        }
        if i.is_zero() {
            return Ok(Fixed::default());
        }
        let Some(k) = self.region_of(&(i - 1)) else {
            return Ok(Fixed::default());
        };
        let mut out = self.regions[k].cum.clone();
        out.add(&self.partial(k, i));
        Ok(out)
    }

    /// S(i) ∈ [lo, hi].
    pub fn bounds(&self, i: &Int) -> Result<(Rat, Rat)> {
        let f = self.fixed(i)?;
        let d = Int::one() << self.prec.bits;
        Ok((Rat::new(f.lo, d.clone()), Rat::new(f.hi, d)))
    }

    /// Separation of time j from the relevant disagreement (None: no
    /// disagreement contributes).
    fn separation(&self, j: &Int) -> Option<Int> {
        let k = self.region_of(j)?;
        match &self.regions[k].kind {
            Kind::Periodic { table, anchor } => Some(int(table.dist[modulo(&(j - anchor), table.period)] as i64)),
            Kind::Gap { left, right } => {
                if self.kernel.symmetric() {
                    let a = left.as_ref().map(|l| j - l);
                    let b = right.as_ref().map(|f| f - j);
                    match (a, b) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    }
                } else {
                    right.as_ref().map(|f| f - j)
                }
            }
        }
    }

    /// Exact g(j) when the separation is small enough to write down.
    pub fn exact_term(&self, j: &Int) -> Option<Rat> {
        match self.separation(j) {
            None => Some(Rat::zero()),
            Some(d) => {
                let d = d.to_u64()?;
                (d <= 4 * EXACT_LIMIT as u64).then(|| self.kernel.exact(d))
            }
        }
    }

    fn exact_prefix(&self) -> &Option<Vec<Rat>> {
        self.exact.get_or_init(|| {
            let n = self.horizon.to_usize().unwrap_or(usize::MAX).min(EXACT_LIMIT);
            let mut out = Vec::with_capacity(n + 1);
            let mut acc = Rat::zero();
            out.push(acc.clone());
            for j in 0..n {
                acc += self.exact_term(&int(j as i64))?;
                out.push(acc.clone());
            }
            Some(out)
        })
    }

    /// Exact S(i) for i ≤ EXACT_LIMIT.
    pub fn exact(&self, i: usize) -> Option<Rat> {
        self.exact_prefix().as_ref().and_then(|v| v.get(i).cloned())
    }

    /// Certified count of {1 ≤ i ≤ n : S(i) < α(i)·t}.
    pub fn alpha_count(&self, alpha: &AlphaFunction, t: &Rat, n: &Int) -> Result<AlphaCount> {
        if n < &Int::one() || n > &self.horizon {
            return domain(format!("n = {n} outside [1, {}]", self.horizon));
        }
        if t <= &Rat::zero() {
            return domain("t must be positive");
        }
        let d = Int::one() << self.prec.bits;
        // thresholds scaled to the fixed-point grid
        let thr = |i: &Int| -> Result<Rat> { Ok(rat_int(&alpha.eval(i)?) * t * rat_int(&d)) };
        let mut lo = Int::zero();
        let mut undecided = Int::zero();
        let mut stack: Vec<(Int, Int)> = vec![(Int::one(), n.clone())];
        let mut work = 0usize;
        while let Some((u, v)) = stack.pop() {
            work += 1;
            if work > BISECTION_BUDGET {
                undecided += &v - &u + 1;
                continue;
            }
            let su = self.fixed(&u)?;
            let sv = if u == v { su.clone() } else { self.fixed(&v)? };
            let tu = thr(&u)?;
            let tv = if u == v { tu.clone() } else { thr(&v)? };
            if rat_int(&sv.hi) < tu {
                lo += &v - &u + 1;
            } else if rat_int(&su.lo) >= tv {
            } else if u == v {
                let settled = u.to_usize().filter(|&i| i <= EXACT_LIMIT).and_then(|i| self.exact(i));
                match settled {
                    Some(s) => {
                        if s * rat_int(&d) < tu {
                            lo += 1;
                        }
                    }
                    None => undecided += 1,
                }
            } else if tu == tv && v > int(EXACT_LIMIT as i64) {
                // constant threshold: S is nondecreasing, so the counted times
                // form a prefix; bracket it with two searches
                let p = self.first_time(&u, &v, |s| rat_int(&s.hi) >= tu)?;
                let q = self.first_time(&p, &v, |s| rat_int(&s.lo) >= tu)?;
                work += 2;
                lo += &p - &u;
                undecided += &q - &p;
            } else {
                let mid: Int = (&u + &v).div_floor(&int(2));
                stack.push((&mid + 1, v));
                stack.push((u, mid));
            }
        }
        let hi = &lo + undecided;
        Ok(AlphaCount { n: n.clone(), lo, hi })
    }
}

impl CumulativeSums {
    /// First i in [u, v] whose bound satisfies `hit`, or v + 1.
    fn first_time(&self, u: &Int, v: &Int, hit: impl Fn(&Fixed) -> bool) -> Result<Int> {
        let (mut lo, mut hi) = (u.clone(), v + 1);
        while lo < hi {
            let mid: Int = (&lo + &hi).div_floor(&int(2));
            if hit(&self.fixed(&mid)?) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }
}

/// Φ^(n)(t, α) as an exact value, or a precision error when the certified
/// bounds do not meet.
pub fn phi_alpha_prefix(pair: &Pair, t: &Rat, alpha: &AlphaFunction, n: &Int) -> Result<Rat> {
    let sums = CumulativeSums::new(pair, n)?;
    let c = sums.alpha_count(alpha, t, n)?;
    c.exact().ok_or_else(|| Error::Precision(format!("α-weighted count at n = {n} only known within [{}, {}]", c.lo, c.hi)))
}
