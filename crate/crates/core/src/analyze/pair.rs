//! The disagreement stream Δ_k = [x_k ≠ y_k] of a pair and the plain
//! closeness statistic Φ^(n)(t) built on it.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::num::{int, lcm_u, modulo, Int, Rat};
use crate::symbolic::metric::poly_radius;
use crate::symbolic::stream::StreamBuilder;
use crate::symbolic::{count_occurrences, m_epsilon, Cycle, Piece, ShiftMetric, Side, Symbol, SymbolStream, Word};

/// Largest period a disagreement mask may have.
pub const MASK_PERIOD_LIMIT: usize = 1 << 22;

type MaskKey = (usize, usize, usize, usize);

struct MaskCache {
    zero: Arc<Cycle>,
    masks: HashMap<MaskKey, Arc<Cycle>>,
}

impl MaskCache {
    /// Pattern of [px ≠ py] as (cycle, anchor).
    fn mask(&mut self, px: &Piece, py: &Piece) -> Result<(Arc<Cycle>, Int)> {
        if px.same_pattern(py) {
            return Ok((self.zero.clone(), int(0)));
        }
        let (nx, ny) = (px.cycle.len(), py.cycle.len());
        let p = lcm_u(nx, ny);
        if p > MASK_PERIOD_LIMIT {
            return Err(Error::Budget(format!("disagreement mask of period {p}")));
        }
        let ax = modulo(&px.anchor, nx);
        let ay = modulo(&py.anchor, ny);
        let key = (Arc::as_ptr(&px.cycle) as usize, Arc::as_ptr(&py.cycle) as usize, ax, ay);
        let c = self
            .masks
            .entry(key)
            .or_insert_with(|| {
                let (sx, sy) = (px.cycle.symbols(), py.cycle.symbols());
                let bits = (0..p).map(|c| u8::from(sx[(c + nx - ax) % nx] != sy[(c + ny - ay) % ny])).collect();
                Cycle::new(bits)
            })
            .clone();
        Ok((c, int(0)))
    }
}

fn explicit_bits(px: &Piece, py: &Piece, s: &Int, len: usize) -> Word {
    let mut c = s.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(u8::from(px.symbol(&c) != py.symbol(&c)));
        c += 1;
    }
    Word(out)
}

/// Δ as a block stream when both inputs are block streams, lazily otherwise.
pub fn disagreement_stream(x: &SymbolStream, y: &SymbolStream) -> Result<SymbolStream> {
    if x.side() != y.side() {
        return domain("pair of streams with different sidedness");
    }
    let (Some((xl, xr)), Some((yl, yr))) = (x.end_pieces(), y.end_pieces()) else {
        return Ok(lazy_disagreement(x, y));
    };
    let side = x.side();
    let mut cache = MaskCache { zero: Cycle::new(vec![0]), masks: HashMap::new() };
    let right = [&xr.start, &yr.start].into_iter().flatten().max().cloned();
    let left = match side {
        Side::OneSided => int(1),
        Side::TwoSided => {
            let l = [&xl.end, &yl.end].into_iter().flatten().min().cloned();
            match (&l, &right) {
                (Some(l), _) => l.clone(),
                (None, Some(r)) => r.clone(),
                (None, None) => int(0),
            }
        }
    };
    let right = match right {
        Some(r) if r > left => r,
        _ => left.clone(),
    };
    let mut b = match side {
        Side::OneSided => StreamBuilder::one_sided(),
        Side::TwoSided => {
            let (c, a) = cache.mask(&xl, &yl)?;
            StreamBuilder::two_sided(c, a, left.clone())
        }
    };
    if left < right {
        let px = x.pieces(&left, &right)?;
        let py = y.pieces(&left, &right)?;
        let (mut i, mut j) = (0, 0);
        let mut cur = left.clone();
        while cur < right {
            let (a, c) = (&px[i], &py[j]);
            let ea = a.end.clone().unwrap();
            let ec = c.end.clone().unwrap();
            let end = if ea < ec { ea.clone() } else { ec.clone() };
            let len = &end - &cur;
            let (mask, anchor) = cache.mask(a, c)?;
            if mask.len() > 1 && len <= int(mask.len() as i64) {
                b.push_word(&explicit_bits(a, c, &cur, len.to_usize().unwrap()));
            } else {
                b.push_periodic(mask, &len, anchor);
            }
            if ea == end {
                i += 1;
            }
            if ec == end {
                j += 1;
            }
            cur = end;
        }
    }
    let (tail, anchor) = cache.mask(&xr, &yr)?;
    b.finish_anchored(tail, anchor)
}

fn lazy_disagreement(x: &SymbolStream, y: &SymbolStream) -> SymbolStream {
    let (x1, y1) = (x.clone(), y.clone());
    let fwd = move |i: i64, _: &[Symbol]| Ok(u8::from(x1.at(i)? != y1.at(i)?));
    match x.side() {
        Side::OneSided => SymbolStream::lazy_one_sided(fwd),
        Side::TwoSided => {
            let (x2, y2) = (x.clone(), y.clone());
            SymbolStream::lazy_two_sided(fwd, move |i| Ok(u8::from(x2.at(i)? != y2.at(i)?)))
        }
    }
}

/// Offsets [A, B] such that d(σ^j x, σ^j y) < t iff Δ vanishes on
/// [j+A, j+B]; None when every pair of points is closer than t.
pub fn closeness_window(metric: ShiftMetric, side: Side, t: &Rat) -> Result<Option<(i64, i64)>> {
    if t <= &Rat::zero() {
        return domain("t must be positive");
    }
    match (metric, side) {
        (ShiftMetric::Geometric { .. }, Side::OneSided) => {
            let m = m_epsilon(metric, t)? as i64;
            Ok((m > 0).then_some((1, m)))
        }
        (ShiftMetric::Geometric { .. }, Side::TwoSided) => {
            let m = m_epsilon(metric, t)? as i64;
            Ok((m > 0).then_some((-(m - 1), m - 1)))
        }
        (ShiftMetric::Polynomial, Side::TwoSided) => {
            let r = poly_radius(t)? as i64;
            Ok((r > 0).then_some((-(r - 1), r - 1)))
        }
        (ShiftMetric::Polynomial, Side::OneSided) => domain("the polynomial metric is two-sided"),
    }
}

/// A pair of streams together with its disagreement stream.
#[derive(Clone, Debug)]
pub struct Pair {
    pub x: SymbolStream,
    pub y: SymbolStream,
    pub delta: SymbolStream,
    pub metric: ShiftMetric,
}

impl Pair {
    pub fn new(x: &SymbolStream, y: &SymbolStream, metric: ShiftMetric) -> Result<Self> {
        if metric == ShiftMetric::Polynomial && x.side() == Side::OneSided {
            return domain("the polynomial metric is two-sided");
        }
        let delta = disagreement_stream(x, y)?;
        Ok(Pair { x: x.clone(), y: y.clone(), delta, metric })
    }

    pub fn side(&self) -> Side {
        self.x.side()
    }

    /// #{0 ≤ j < n : d(σ^j x, σ^j y) < t}.
    pub fn close_count(&self, t: &Rat, n: &Int) -> Result<Int> {
        if n <= &Int::zero() {
            return domain("n must be at least 1");
        }
        match closeness_window(self.metric, self.side(), t)? {
            None => Ok(n.clone()),
            Some((a, b)) => {
                let zeros = vec![0u8; (b - a + 1) as usize];
                count_occurrences(&self.delta, &zeros, &int(a), &(n + a))
            }
        }
    }

    /// Φ^(n)_{xy}(t).
    pub fn phi_prefix(&self, t: &Rat, n: &Int) -> Result<Rat> {
        Ok(Rat::new(self.close_count(t, n)?, n.clone()))
    }

    /// Δ vanishes from some coordinate on: the pair is asymptotic.
    pub fn eventually_identical(&self) -> Option<bool> {
        let (_, r) = self.delta.end_pieces()?;
        Some(r.cycle.symbols().iter().all(|&s| s == 0))
    }
}

pub fn phi_prefix(x: &SymbolStream, y: &SymbolStream, t: &Rat, n: &Int, metric: ShiftMetric) -> Result<Rat> {
    Pair::new(x, y, metric)?.phi_prefix(t, n)
}
