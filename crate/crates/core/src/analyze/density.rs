//! Prefix and Banach densities of a set of times S ⊆ [1, N].
//!
//! Banach extremes run over windows of length ≥ w₀. A window of length ≥ 2w₀
//! splits into windows with lengths in [w₀, 2w₀), and its density is their
//! weighted mean, so those lengths already realize both extremes.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::num::{int, to_usize, Int, Rat};
use crate::symbolic::{count_occurrences, Cycle, SymbolStream};

pub const DEFAULT_WINDOW_FLOOR: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    pub horizon: Int,
    pub count: Int,
    /// Largest / smallest |S ∩ [1, n]|/n over the sampled prefixes n.
    pub upper: Rat,
    pub lower: Rat,
    pub banach_upper: Rat,
    pub banach_lower: Rat,
    /// Window floor actually used (min(w₀, N)).
    pub window_floor: usize,
}

impl DensityProfile {
    pub fn density(&self) -> Rat {
        Rat::new(self.count.clone(), self.horizon.clone())
    }

    /// B_* ≤ d_ ≤ d̄ ≤ B*.
    pub fn chain_holds(&self) -> bool {
        self.banach_lower <= self.lower && self.lower <= self.upper && self.upper <= self.banach_upper
    }
}

/// Prefix lengths sampled when S is given explicitly: n ∈ [max(⌈N/4⌉, w), N].
fn tail_prefixes(n: usize, w: usize) -> std::ops::RangeInclusive<usize> {
    n.div_ceil(4).max(w).max(1)..=n
}

/// Extremes of window sums over window lengths [w, 2w) ∩ [1, n] given
/// prefix sums c (c[0] = 0, c[i] = |S ∩ [1, i]|).
fn banach_from_prefix(c: &[u64], w: usize) -> (Rat, Rat) {
    let n = c.len() - 1;
    let mut hi = Rat::zero();
    let mut lo = Rat::one();
    for l in w..(2 * w).min(n + 1) {
        let (mut mx, mut mn) = (0u64, u64::MAX);
        for s in 0..=n - l {
            let v = c[s + l] - c[s];
            mx = mx.max(v);
            mn = mn.min(v);
        }
        hi = hi.max(Rat::new(int(mx as i64), int(l as i64)));
        lo = lo.min(Rat::new(int(mn as i64), int(l as i64)));
    }
    (hi, lo)
}

/// Densities of an explicit set of times (any order, duplicates ignored).
pub fn densities(set: &[u64], horizon: u64, w0: usize) -> Result<DensityProfile> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    if w0 == 0 {
        return domain("window floor must be at least 1");
    }
    let n = horizon as usize;
    let mut mark = vec![false; n + 1];
    for &s in set {
        if s == 0 || s > horizon {
            return domain(format!("time {s} outside [1, {horizon}]"));
        }
        mark[s as usize] = true;
    }
    let mut c = vec![0u64; n + 1];
    for i in 1..=n {
        c[i] = c[i - 1] + u64::from(mark[i]);
    }
    let w = w0.min(n);
    let mut upper = Rat::zero();
    let mut lower = Rat::one();
    for k in tail_prefixes(n, w) {
        let d = Rat::new(int(c[k] as i64), int(k as i64));
        upper = upper.max(d.clone());
        lower = lower.min(d);
    }
    let (banach_upper, banach_lower) = banach_from_prefix(&c, w);
    Ok(DensityProfile {
        horizon: int(horizon as i64),
        count: int(c[n] as i64),
        upper,
        lower,
        banach_upper,
        banach_lower,
        window_floor: w,
    })
}

/// Per-cycle cyclic window extremes, indexed by window length.
struct CyclicExtremes {
    cache: HashMap<usize, Arc<Vec<(u64, u64)>>>,
}

impl CyclicExtremes {
    fn get(&mut self, cycle: &Arc<Cycle>, w: usize) -> Arc<Vec<(u64, u64)>> {
        let key = Arc::as_ptr(cycle) as usize;
        self.cache
            .entry(key)
            .or_insert_with(|| {
                let p = cycle.len();
                let s = cycle.symbols();
                let mut c = vec![0u64; 2 * p + 2 * w + 1];
                for i in 0..c.len() - 1 {
                    c[i + 1] = c[i] + u64::from(s[i % p] == 1);
                }
                Arc::new(
                    (w..2 * w)
                        .map(|l| {
                            (0..p).fold((u64::MAX, 0), |(mn, mx), r| {
                                // full periods inside the window contribute exactly
                                let v = c[r + l % p] - c[r] + (l / p) as u64 * c[p];
                                (mn.min(v), mx.max(v))
                            })
                        })
                        .collect(),
                )
            })
            .clone()
    }
}

/// Densities of S = {1 ≤ i ≤ N : v_i = 1} for a 0/1 block stream v, with
/// prefix extremes over `grid` (clipped to [w, N], N always included).
pub fn densities_stream(v: &SymbolStream, horizon: &Int, grid: &[Int], w0: usize) -> Result<DensityProfile> {
    if horizon < &Int::one() {
        return domain("horizon must be at least 1");
    }
    if w0 == 0 {
        return domain("window floor must be at least 1");
    }
    if let Some(h) = horizon.to_u64().filter(|&h| h <= 1 << 16) {
        if grid.is_empty() || !v.is_blocks() {
            let ones: Vec<u64> = (1..=h).filter(|&i| v.at(i as i64).map(|s| s == 1).unwrap_or(false)).collect();
            return densities(&ones, h, w0);
        }
    }
    let w = w0.min(horizon.to_usize().unwrap_or(usize::MAX));
    let count = |n: &Int| count_occurrences(v, &[1], &int(1), &(n + 1));
    let total = count(horizon)?;
    let mut upper = Rat::new(total.clone(), horizon.clone());
    let mut lower = upper.clone();
    for n in grid {
        if n < &int(w as i64) || n > horizon {
            continue;
        }
        let d = Rat::new(count(n)?, n.clone());
        upper = upper.max(d.clone());
        lower = lower.min(d);
    }
    // window sums: counts per length in [w, 2w)
    let lens = (2 * w).min(to_usize(&(horizon + 1)).unwrap_or(usize::MAX)) - w;
    let mut mx = vec![0u64; lens];
    let mut mn = vec![u64::MAX; lens];
    let last_start = |l: usize| horizon - int(l as i64) + 1;
    let scan = |from: &Int, to: &Int, mx: &mut [u64], mn: &mut [u64]| -> Result<()> {
        // starts in [from, to), windows clipped to [1, N]
        if from >= to {
            return Ok(());
        }
        let span = to_usize(&(to - from))?;
        let bits = v.window(from, span + 2 * w)?;
        let mut c = vec![0u64; bits.len() + 1];
        for i in 0..bits.len() {
            c[i + 1] = c[i] + u64::from(bits[i] == 1);
        }
        for (k, l) in (w..w + lens).enumerate() {
            let room: Int = last_start(l) - from + 1;
            let stop = if room <= Int::zero() { 0 } else { room.to_usize().unwrap_or(usize::MAX).min(span) };
            for s in 0..stop {
                let val = c[s + l] - c[s];
                mx[k] = mx[k].max(val);
                mn[k] = mn[k].min(val);
            }
        }
        Ok(())
    };
    let mut ext = CyclicExtremes { cache: HashMap::new() };
    let end = last_start(w) + 1;
    for p in v.pieces(&int(1), &end)? {
        let s = p.start.clone().unwrap();
        let e = p.end.clone().unwrap();
        let period = p.cycle.len();
        // every residue starts a window inside the piece
        if &e - &s >= int((period + 4 * w) as i64) {
            let table = ext.get(&p.cycle, w);
            for k in 0..lens {
                mx[k] = mx[k].max(table[k].1);
                mn[k] = mn[k].min(table[k].0);
            }
            scan(&(&e - int(2 * w as i64)), &e, &mut mx, &mut mn)?;
        } else {
            scan(&s, &e, &mut mx, &mut mn)?;
        }
    }
    let mut banach_upper = Rat::zero();
    let mut banach_lower = Rat::one();
    for k in 0..lens {
        let l = int((w + k) as i64);
        banach_upper = banach_upper.max(Rat::new(int(mx[k] as i64), l.clone()));
        banach_lower = banach_lower.min(Rat::new(int(mn[k] as i64), l));
    }
    // prefix windows of length ≥ w are Banach windows too
    banach_upper = banach_upper.max(upper.clone());
    banach_lower = banach_lower.min(lower.clone());
    Ok(DensityProfile { horizon: horizon.clone(), count: total, upper, lower, banach_upper, banach_lower, window_floor: w })
}

/// Geometric checkpoint grid 2^j ≤ N plus N.
pub fn dyadic_grid(horizon: &Int) -> Vec<Int> {
    let mut out = Vec::new();
    let mut n = Int::one();
    while &n < horizon {
        out.push(n.clone());
        n <<= 1;
    }
    out.push(horizon.clone());
    out
}
