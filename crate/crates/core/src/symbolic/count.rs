//! Window counting on streams. Block streams are handled piece by piece:
//! starts whose window lies inside one piece are counted per period, the at
//! most |u|-1 starts per boundary that straddle two pieces are read directly.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::stream::{Piece, Side, StreamBuilder, SymbolStream};
use super::word::{Cycle, Symbol};
use crate::error::Result;
use crate::num::{int, Int};

/// Starts in `piece` (clipped) whose window of length `len` stays inside it,
/// intersected with [s0, s1): returns (first start, count).
fn interior(piece: &Piece, len: usize, s0: &Int, s1: &Int) -> Option<(Int, Int)> {
    let a = piece.start.clone().unwrap();
    let b = piece.end.clone().unwrap();
    let lo = if &a > s0 { a } else { s0.clone() };
    let last = &b - int(len as i64) + 1;
    let hi = if &last < s1 { last } else { s1.clone() };
    if lo >= hi {
        None
    } else {
        let n = &hi - &lo;
        Some((lo, n))
    }
}

/// Starts straddling the boundary at the end of `piece`, within [s0, s1).
fn straddling(piece: &Piece, len: usize, s0: &Int, s1: &Int) -> (Int, Int) {
    let a = piece.start.clone().unwrap();
    let b = piece.end.clone().unwrap();
    let first = &b - int(len as i64) + 1;
    let lo = [&a, &first, s0].into_iter().max().unwrap().clone();
    let hi = if &b < s1 { b } else { s1.clone() };
    (lo, hi)
}

/// Number of starts i in [s0, s1) at which x reads `u`.
pub fn count_occurrences(x: &SymbolStream, u: &[Symbol], s0: &Int, s1: &Int) -> Result<Int> {
    if s0 >= s1 {
        return Ok(Int::zero());
    }
    if u.is_empty() {
        return Ok(s1 - s0);
    }
    let len = u.len();
    let reach = s1 + int(len as i64 - 1);
    let pieces = x.pieces(s0, &reach)?;
    let mut total = Int::zero();
    for (k, p) in pieces.iter().enumerate() {
        if let Some((lo, n)) = interior(p, len, s0, s1) {
            let period = p.cycle.len();
            let (full, rem) = n.div_rem(&int(period as i64));
            if !full.is_zero() {
                total += &full * int(p.cycle.count_range(u, 0, period) as i64);
            }
            let rem = rem.to_usize().unwrap();
            total += int(p.cycle.count_range(u, p.residue(&lo), rem) as i64);
        }
        if k + 1 < pieces.len() {
            let (lo, hi) = straddling(p, len, s0, s1);
            let mut i = lo;
            while i < hi {
                if x.window(&i, len)? == u {
                    total += 1;
                }
                i += 1;
            }
        }
    }
    Ok(total)
}

/// Counts of every length-m window code (base `base`) over starts [s0, s1).
/// Codes are big-endian: the first symbol is the most significant digit.
pub fn window_counts(x: &SymbolStream, m: usize, base: usize, s0: &Int, s1: &Int) -> Result<HashMap<u64, Int>> {
    let mut out: HashMap<u64, Int> = HashMap::new();
    add_window_counts(&mut out, x, m, base, s0, s1)?;
    Ok(out)
}

fn code_of(w: &[Symbol], base: usize) -> u64 {
    w.iter().fold(0u64, |c, &s| c * base as u64 + s as u64)
}

fn cycle_codes(cycle: &Cycle, m: usize, base: usize, r0: usize, len: usize, acc: &mut HashMap<u64, u64>) {
    let n = cycle.len();
    let s = cycle.symbols();
    if m == 0 {
        *acc.entry(0).or_default() += len as u64;
        return;
    }
    let top = (base as u64).pow(m as u32 - 1);
    let mut code = code_of(&(0..m).map(|k| s[(r0 + k) % n]).collect::<Vec<_>>(), base);
    for k in 0..len {
        *acc.entry(code).or_default() += 1;
        let r = (r0 + k) % n;
        code = (code - s[r] as u64 * top) * base as u64 + s[(r + m) % n] as u64;
    }
}

fn add_window_counts(out: &mut HashMap<u64, Int>, x: &SymbolStream, m: usize, base: usize, s0: &Int, s1: &Int) -> Result<()> {
    if s0 >= s1 {
        return Ok(());
    }
    let reach = s1 + int(m.max(1) as i64 - 1);
    let pieces = x.pieces(s0, &reach)?;
    let mut single: HashMap<u64, u64> = HashMap::new();
    for (k, p) in pieces.iter().enumerate() {
        if let Some((lo, n)) = interior(p, m.max(1), s0, s1) {
            let period = p.cycle.len();
            let (full, rem) = n.div_rem(&int(period as i64));
            if !full.is_zero() {
                let small = (base as f64).powi(m as i32) <= (period.max(4096)) as f64;
                match small.then(|| p.cycle.gram_counts(m, base)).flatten() {
                    Some(t) => {
                        for (c, &v) in t.iter().enumerate() {
                            if v > 0 {
                                *out.entry(c as u64).or_default() += &full * int(v as i64);
                            }
                        }
                    }
                    None => {
                        let mut per: HashMap<u64, u64> = HashMap::new();
                        cycle_codes(&p.cycle, m, base, 0, period, &mut per);
                        for (c, v) in per {
                            *out.entry(c).or_default() += &full * int(v as i64);
                        }
                    }
                }
            }
            let rem = rem.to_usize().unwrap();
            match (rem > 64).then(|| p.cycle.gram_range(m, base, p.residue(&lo), rem)).flatten() {
                Some(v) => {
                    for (c, k) in v {
                        *single.entry(c).or_default() += k;
                    }
                }
                None => cycle_codes(&p.cycle, m, base, p.residue(&lo), rem, &mut single),
            }
        }
        if k + 1 < pieces.len() && m > 1 {
            let (lo, hi) = straddling(p, m, s0, s1);
            let mut i = lo;
            while i < hi {
                *single.entry(code_of(&x.window(&i, m)?, base)).or_default() += 1;
                i += 1;
            }
        }
    }
    for (c, v) in single {
        *out.entry(c).or_default() += int(v as i64);
    }
    Ok(())
}

/// Sequential accumulation of depth-m window counts over starts 1, 2, …,
/// read off at increasing times.
pub struct WindowTracker {
    x: SymbolStream,
    m: usize,
    base: usize,
    next: Int,
    counts: HashMap<u64, Int>,
}

impl WindowTracker {
    pub fn new(x: SymbolStream, m: usize, base: usize) -> Self {
        let next = x.side().first().unwrap_or_else(|| int(1));
        WindowTracker { x, m, base, next, counts: HashMap::new() }
    }

    /// Include every start < end (ends must not decrease).
    pub fn advance_to(&mut self, end: &Int) -> Result<&HashMap<u64, Int>> {
        if end > &self.next {
            let from = self.next.clone();
            add_window_counts(&mut self.counts, &self.x, self.m, self.base, &from, end)?;
            self.next = end.clone();
        }
        Ok(&self.counts)
    }

    pub fn counts(&self) -> &HashMap<u64, Int> {
        &self.counts
    }
}

/// 0/1 stream marking starts i in [lo, hi) where x reads `u`; zero elsewhere.
pub fn occurrence_stream(x: &SymbolStream, u: &[Symbol], lo: &Int, hi: &Int) -> Result<SymbolStream> {
    let zero = Cycle::new(vec![0]);
    let mut b = match x.side() {
        Side::OneSided => {
            let mut b = StreamBuilder::one_sided();
            b.push_periodic(zero.clone(), &(lo - 1), int(1));
            b
        }
        Side::TwoSided => StreamBuilder::two_sided(zero.clone(), int(0), lo.clone()),
    };
    if lo < hi {
        let len = u.len().max(1);
        let reach = hi + int(len as i64 - 1);
        let pieces = x.pieces(lo, &reach)?;
        let mut masks: HashMap<usize, Arc<Cycle>> = HashMap::new();
        for (k, p) in pieces.iter().enumerate() {
            let pstart = p.start.clone().unwrap();
            let seg_end = match interior(p, len, lo, hi) {
                Some((s, n)) => {
                    debug_assert_eq!(s, pstart.max(lo.clone()));
                    let key = Arc::as_ptr(&p.cycle) as usize;
                    let mask = masks
                        .entry(key)
                        .or_insert_with(|| {
                            let period = p.cycle.len();
                            let bits: Vec<Symbol> = (0..period).map(|r| p.cycle.count_range(u, r, 1) as Symbol).collect();
                            Cycle::new(bits)
                        })
                        .clone();
                    let end = &s + &n;
                    b.push_periodic(mask, &n, p.anchor.clone());
                    end
                }
                None => b.cursor().clone(),
            };
            if k + 1 < pieces.len() {
                let (_, shi) = straddling(p, len, lo, hi);
                let mut i = seg_end;
                let mut bits = Vec::new();
                while i < shi {
                    bits.push(u8::from(x.window(&i, u.len())? == u));
                    i += 1;
                }
                b.push_word(&super::word::Word(bits));
            }
        }
        debug_assert_eq!(b.cursor(), hi);
    }
    b.finish(zero)
}
