//! Exact checks that a stream copies its sources on the scheduled windows.

use std::collections::HashSet;
use std::sync::Arc;

use num_traits::ToPrimitive;

use shiftlab_core::error::{Error, Result};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{int, lcm_u, neg_pow, Int, Rat};
use shiftlab_core::symbolic::{Cycle, Piece, SymbolStream, Word};

/// Direct symbol comparisons allowed for one pair of pieces.
const COMPARE_LIMIT: usize = 1 << 22;

/// Do two clipped pieces over the same coordinates carry the same symbols?
fn pieces_agree(p: &Piece, q: &Piece) -> Result<bool> {
    if p.same_pattern(q) {
        return Ok(true);
    }
    let start = p.start.clone().unwrap();
    let len = (p.end.clone().unwrap() - &start).to_usize().unwrap_or(usize::MAX);
    let span = len.min(lcm_u(p.cycle.len(), q.cycle.len()));
    if span > COMPARE_LIMIT {
        return Err(Error::Budget(format!("comparing {span} symbols of two periodic pieces")));
    }
    let mut c = start;
    for _ in 0..span {
        if p.symbol(&c) != q.symbol(&c) {
            return Ok(false);
        }
        c += 1;
    }
    Ok(true)
}

/// x_{a+j} = y_j for j = 1 … len.
pub fn copies(x: &SymbolStream, y: &SymbolStream, a: &Int, len: &Int) -> Result<bool> {
    let xs = x.shift(a)?;
    let hi = len + 1;
    let px = xs.pieces(&int(1), &hi)?;
    let py = y.pieces(&int(1), &hi)?;
    let (mut i, mut j) = (0, 0);
    let mut cur = int(1);
    while cur < hi {
        let (p, q) = (&px[i], &py[j]);
        let (ep, eq) = (p.end.clone().unwrap(), q.end.clone().unwrap());
        let end = ep.clone().min(eq.clone());
        let clip = |r: &Piece| Piece { start: Some(cur.clone()), end: Some(end.clone()), cycle: r.cycle.clone(), anchor: r.anchor.clone() };
        if !pieces_agree(&clip(p), &clip(q))? {
            return Ok(false);
        }
        if ep == end {
            i += 1;
        }
        if eq == end {
            j += 1;
        }
        cur = end;
    }
    Ok(true)
}

/// The exponential tracing bound implied by an exact copy of length
/// b − a + m: d(σ^j x, σ^{j−a} y) ≤ base^{−(b−j+m+1)} ≤ η·base^{−(b−j)}
/// for a ≤ j ≤ b, which holds iff base^{−(m+1)} ≤ η.
pub fn exponential_bound_holds(base: usize, m: usize, eta: &Rat) -> bool {
    neg_pow(base as u64, m + 1) <= *eta
}

/// Admissibility of a block stream on [1, hi): every periodic piece long
/// enough to wrap has an admissible cyclic word, shorter ones are checked as
/// words, and a window of `ctx` symbols on each side of every junction is
/// checked. Exact for one-step transition systems.
pub fn admissible_prefix(model: &ShiftModel, x: &SymbolStream, hi: &Int, ctx: usize) -> Result<bool> {
    let first = x.side().first().unwrap_or_else(|| int(0));
    let pieces = x.pieces(&first, hi)?;
    let mut good: HashSet<*const Cycle> = HashSet::new();
    for p in &pieces {
        let start = p.start.clone().unwrap();
        let len = p.end.clone().unwrap() - &start;
        let n = p.cycle.len();
        if len >= int(n as i64) {
            let key = Arc::as_ptr(&p.cycle);
            if !good.contains(&key) {
                let w = p.cycle.word();
                if !model.admissible(&w.concat(&w))? {
                    return Ok(false);
                }
                good.insert(key);
            }
        } else {
            let w = Word(x.window(&start, len.to_usize().unwrap())?);
            if !model.admissible(&w)? {
                return Ok(false);
            }
        }
    }
    for p in pieces.iter().skip(1) {
        let s = p.start.clone().unwrap();
        let lo = (&s - int(ctx as i64)).max(first.clone());
        let top = (&s + int(ctx as i64)).min(hi.clone());
        let w = Word(x.window(&lo, (&top - &lo).to_usize().unwrap())?);
        if !model.admissible(&w)? {
            return Ok(false);
        }
    }
    Ok(true)
}
