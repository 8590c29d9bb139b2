//! Backward tracing: members are extended to two-sided points whose negative
//! coordinates follow z, so their backward orbits shadow z's.

use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use shiftlab_core::analyze::disagreement_stream;
use shiftlab_core::error::{Error, Result};
use shiftlab_core::models::ShiftModel;
use shiftlab_core::num::{int, neg_pow, rat_int, Int, Rat};
use shiftlab_core::symbolic::stream::StreamBuilder;
use shiftlab_core::symbolic::{m_epsilon, Cycle, Side, SymbolStream, Word};

use crate::family::{Member, ScrambleFamily};

const CONTEXT: usize = 32;

/// A two-sided member: y_i = z_i for i < 0, then a bridge of length
/// `offset`, then y_{offset+j−1} = x_j for j ≥ 1.
#[derive(Clone, Debug)]
pub struct BackwardMember {
    pub xi: Vec<u8>,
    pub stream: SymbolStream,
    pub offset: usize,
    pub bridge: Word,
    /// First coordinate ≥ 0 where y and z differ (None: never).
    pub first_difference: Option<Int>,
    /// Σ_{i≥0} d(σ^{−i} y, σ^{−i} z) = base^{−j₀}/(base − 1).
    pub tail_sum: Rat,
}

/// First coordinate c ≥ from with Δ_c = 1, searching pieces up to one period
/// past the start of the unbounded right piece.
fn first_one(delta: &SymbolStream, from: &Int) -> Result<Option<Int>> {
    let (_, right) = delta.end_pieces().ok_or_else(|| Error::Capability("block streams only".into()))?;
    let rs = right.start.clone().unwrap_or_else(|| from.clone());
    let hi = rs.max(from.clone()) + int(right.cycle.len() as i64) + 1;
    for p in delta.pieces(from, &hi)? {
        let s = p.start.clone().unwrap();
        let len = (p.end.clone().unwrap() - &s).to_usize().unwrap_or(usize::MAX).min(p.cycle.len());
        let mut c = s;
        for _ in 0..len {
            if p.symbol(&c) == 1 {
                return Ok(Some(c));
            }
            c += 1;
        }
    }
    Ok(None)
}

fn left_part(z: &SymbolStream) -> Result<StreamBuilder> {
    let (left, _) = z.end_pieces().ok_or_else(|| Error::Capability("z must be a block stream".into()))?;
    let from = left.end.clone().unwrap_or_else(|| int(0)).min(int(0));
    let mut b = StreamBuilder::two_sided(left.cycle.clone(), left.anchor.clone(), from.clone());
    for p in z.pieces(&from, &int(0))? {
        let len = p.end.clone().unwrap() - p.start.clone().unwrap();
        b.push_periodic(p.cycle.clone(), &len, p.anchor.clone());
    }
    Ok(b)
}

pub fn backward_member(model: &ShiftModel, z: &SymbolStream, x: &Member, horizon: &Int, eps: &Rat) -> Result<BackwardMember> {
    if z.side() != Side::TwoSided {
        return Err(Error::Domain("z must be two-sided".into()));
    }
    if eps <= &Rat::zero() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let base = model.alphabet_size();
    let u = Word(z.window(&int(-(CONTEXT as i64)), CONTEXT)?);
    let v = Word(x.stream.window(&int(1), CONTEXT)?);
    let cap = m_epsilon(model.metric(), eps)?.max(model.gluing_gap()?);
    let mut bridge = None;
    for len in 0..=cap {
        if let Some(w) = model.bridge(&u, &v, len)? {
            bridge = Some(w);
            break;
        }
    }
    let bridge = bridge.ok_or_else(|| Error::Domain(format!("no junction from z to the member within {cap} symbols")))?;
    let offset = bridge.len();
    let mut b = left_part(z)?;
    b.push_word(&bridge);
    // x_j lands on coordinate offset + j − 1
    let by = int(offset as i64 - 1);
    let hi = horizon + 1;
    for p in x.stream.pieces(&int(1), &hi)? {
        let len = p.end.clone().unwrap() - p.start.clone().unwrap();
        b.push_periodic(p.cycle.clone(), &len, &p.anchor + &by);
    }
    let (_, tail) = x.stream.end_pieces().unwrap();
    let tail_cycle: Arc<Cycle> = tail.cycle.clone();
    let stream = b.finish_anchored(tail_cycle, &tail.anchor + &by)?;
    let delta = disagreement_stream(&stream, z)?;
    let first_difference = first_one(&delta, &int(0))?;
    let tail_sum = match &first_difference {
        None => Rat::zero(),
        Some(j0) => neg_pow(base as u64, j0.to_usize().unwrap_or(usize::MAX)) / rat_int(&int(base as i64 - 1)),
    };
    if &tail_sum > eps {
        return Err(Error::Domain(format!(
            "backward tail sum {tail_sum} exceeds eps {eps}; the least feasible eps for this member is {tail_sum}"
        )));
    }
    Ok(BackwardMember { xi: x.xi.clone(), stream, offset, bridge, first_difference, tail_sum })
}

/// Backward-traced members of a family over the given ξ-prefixes.
pub fn backward_trace(family: &ScrambleFamily, z: &SymbolStream, prefixes: &[Vec<u8>], eps: &Rat) -> Result<Vec<BackwardMember>> {
    let h = family.horizon();
    prefixes.iter().map(|xi| backward_member(&family.model, z, &family.member(xi)?, &h, eps)).collect()
}
