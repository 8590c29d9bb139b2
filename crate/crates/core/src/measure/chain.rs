//! Measure chains along segments and dense sequences on segments and
//! polygons of convex combinations.

use num_traits::{One, Signed, Zero};

use super::finite::FiniteMeasure;
use super::weak::{weak_star_distance, WeakStar};
use crate::error::{domain, Error, Result};
use crate::num::{floor_rat, int, rat_int, to_usize, Rat};
use crate::symbolic::Alphabet;

/// conv{ρ₁, ρ₂} parameterized by u ↦ (1−u)ρ₁ + uρ₂.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub rho1: FiniteMeasure,
    pub rho2: FiniteMeasure,
}

impl Segment {
    pub fn new(rho1: FiniteMeasure, rho2: FiniteMeasure) -> Self {
        Segment { rho1, rho2 }
    }

    pub fn point(&self, u: &Rat) -> Result<FiniteMeasure> {
        FiniteMeasure::mix(&(Rat::one() - u), &self.rho1, &self.rho2)
    }

    /// Parameter of a measure written as a point of this segment.
    pub fn locate(&self, m: &FiniteMeasure) -> Option<Rat> {
        if m == &self.rho1 {
            return Some(Rat::zero());
        }
        if m == &self.rho2 {
            return Some(Rat::one());
        }
        match m {
            FiniteMeasure::Convex(ts) if ts.len() == 2 && ts[0].1 == self.rho1 && ts[1].1 == self.rho2 => Some(ts[1].0.clone()),
            _ => None,
        }
    }

    pub fn length(&self, alphabet: Alphabet, k: usize) -> Result<WeakStar> {
        weak_star_distance(&self.rho1, &self.rho2, alphabet, k)
    }
}

#[derive(Clone, Debug)]
pub struct MeasureChain {
    pub points: Vec<FiniteMeasure>,
    pub step_bound: Rat,
    /// Certified upper bound on every consecutive distance (< step_bound).
    pub step_upper: Rat,
}

impl MeasureChain {
    /// Verifies value + error < bound for every consecutive pair.
    pub fn new(points: Vec<FiniteMeasure>, step_bound: Rat, alphabet: Alphabet, k: usize) -> Result<Self> {
        if points.is_empty() {
            return domain("a chain needs at least one point");
        }
        let mut worst = Rat::zero();
        for p in points.windows(2) {
            let d = weak_star_distance(&p[0], &p[1], alphabet, k)?.upper();
            if d >= step_bound {
                return Err(Error::Invariant(format!("chain step {d} is not below {step_bound}")));
            }
            worst = worst.max(d);
        }
        Ok(MeasureChain { points, step_bound, step_upper: worst })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Equal steps from parameter u0 to u1 with every step strictly below eps:
/// floor(|u1−u0|·D/eps) + 1 steps, D the certified length of the segment.
pub fn chain_on_segment(seg: &Segment, u0: &Rat, u1: &Rat, eps: &Rat, alphabet: Alphabet, k: usize) -> Result<MeasureChain> {
    if eps <= &Rat::zero() {
        return domain("eps must be positive");
    }
    for u in [u0, u1] {
        if u < &Rat::zero() || u > &Rat::one() {
            return domain("segment parameter outside [0, 1]");
        }
    }
    let len = seg.length(alphabet, k)?;
    let span = (u1 - u0).abs();
    if span.is_zero() {
        return Ok(MeasureChain { points: vec![seg.point(u0)?], step_bound: eps.clone(), step_upper: Rat::zero() });
    }
    let steps = to_usize(&floor_rat(&(&span * len.upper() / eps)))? + 1;
    let mut points = Vec::with_capacity(steps + 1);
    for s in 0..=steps {
        let u = u0 + (u1 - u0) * Rat::new(int(s as i64), int(steps as i64));
        points.push(seg.point(&u)?);
    }
    // linearity: consecutive distance is exactly span/steps times the length
    let step_value = &span / rat_int(&int(steps as i64)) * &len.value;
    for p in points.windows(2) {
        let d = weak_star_distance(&p[0], &p[1], alphabet, k)?;
        if d.value != step_value {
            return Err(Error::Invariant("segment linearity failed".into()));
        }
    }
    let step_upper = &span / rat_int(&int(steps as i64)) * len.upper();
    debug_assert!(&step_upper < eps);
    Ok(MeasureChain { points, step_bound: eps.clone(), step_upper })
}

/// chainBetween for measures declared on `seg`.
pub fn chain_between(mu: &FiniteMeasure, nu: &FiniteMeasure, seg: &Segment, eps: &Rat, alphabet: Alphabet, k: usize) -> Result<MeasureChain> {
    let (Some(u0), Some(u1)) = (seg.locate(mu), seg.locate(nu)) else {
        return domain("measures are not on the declared segment");
    };
    chain_on_segment(seg, &u0, &u1, eps, alphabet, k)
}

/// Compositions of `total` into `parts` parts in reflected order: consecutive
/// entries differ by one unit moved between two parts.
fn compositions(total: usize, parts: usize, reverse: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 1 {
        out.push(vec![total]);
    } else {
        for a in 0..=total {
            for mut rest in compositions(total - a, parts - 1, a % 2 == 1) {
                rest.insert(0, a);
                out.push(rest);
            }
        }
    }
    if reverse {
        out.reverse();
    }
    out
}

/// α_1, α_2, … over conv{vertices}: pass p walks the grid of resolution
/// 2^-p (p ≥ 1) in alternating directions, skipping the point shared with
/// the previous pass.
#[derive(Clone, Debug)]
pub struct DenseSequence {
    pub vertices: Vec<FiniteMeasure>,
    diameter: Rat,
}

impl DenseSequence {
    pub fn new(vertices: Vec<FiniteMeasure>, alphabet: Alphabet, k: usize) -> Result<Self> {
        if vertices.is_empty() {
            return domain("a dense sequence needs at least one vertex");
        }
        let mut diameter = Rat::zero();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                diameter = diameter.max(weak_star_distance(&vertices[i], &vertices[j], alphabet, k)?.upper());
            }
        }
        Ok(DenseSequence { vertices, diameter })
    }

    pub fn segment(seg: &Segment, alphabet: Alphabet, k: usize) -> Result<Self> {
        DenseSequence::new(vec![seg.rho1.clone(), seg.rho2.clone()], alphabet, k)
    }

    fn pass(&self, p: usize) -> Vec<Vec<usize>> {
        let r = self.vertices.len();
        let mut c = compositions(1 << p, r, p % 2 == 0);
        if p >= 2 {
            c.remove(0);
        }
        c
    }

    /// (pass, composition) of the j-th point, j ≥ 1.
    fn locate(&self, j: usize) -> Result<(usize, Vec<usize>)> {
        if j == 0 {
            return domain("dense sequences are indexed from 1");
        }
        if self.vertices.len() == 1 {
            return Ok((1, vec![2]));
        }
        let mut left = j - 1;
        for p in 1..40 {
            let mut pass = self.pass(p);
            if left < pass.len() {
                return Ok((p, pass.swap_remove(left)));
            }
            left -= pass.len();
        }
        Err(Error::Budget(format!("dense sequence index {j}")))
    }

    /// Vertex weights of α_j.
    pub fn weights(&self, j: usize) -> Result<Vec<Rat>> {
        let (p, c) = self.locate(j)?;
        let r = self.vertices.len();
        let den = int(if r == 1 { 2 } else { 1 << p });
        Ok((0..r).map(|i| Rat::new(int(c[r - 1 - i] as i64), den.clone())).collect())
    }

    pub fn point(&self, j: usize) -> Result<FiniteMeasure> {
        let w = self.weights(j)?;
        let terms: Vec<(Rat, FiniteMeasure)> =
            w.into_iter().zip(&self.vertices).filter(|(t, _)| !t.is_zero()).map(|(t, m)| (t, m.clone())).collect();
        if terms.len() == 1 {
            return Ok(terms[0].1.clone());
        }
        FiniteMeasure::convex(terms)
    }

    /// Declared envelope: d(α_j, α_{j+1}) ≤ g(j) = diameter·2^-pass(j).
    pub fn envelope(&self, j: usize) -> Result<Rat> {
        let (p, _) = self.locate(j)?;
        Ok(&self.diameter / rat_int(&int(1 << p)))
    }

    pub fn diameter(&self) -> &Rat {
        &self.diameter
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::symbolic::Word;

    fn per(w: &str) -> FiniteMeasure {
        FiniteMeasure::periodic(Word::from(w)).unwrap()
    }

    fn a2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn chains_on_a_segment() {
        let seg = Segment::new(per("0"), per("1"));
        let d = seg.length(a2(), 20).unwrap();
        let one = chain_between(&per("0"), &per("0"), &seg, &rat(1, 10), a2(), 20).unwrap();
        assert_eq!(one.len(), 1);
        // eps = d/4 exactly: four steps would reach eps, so five are taken
        let c = chain_between(&per("0"), &per("1"), &seg, &(&d.value / rat(4, 1)), a2(), 20).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.step_upper < c.step_bound);
        let two = chain_between(&per("0"), &per("1"), &seg, &rat(2, 1), a2(), 20).unwrap();
        assert_eq!(two.len(), 2);
        assert!(chain_between(&per("01"), &per("1"), &seg, &rat(1, 2), a2(), 20).is_err());
    }

    #[test]
    fn dyadic_passes() {
        let seg = Segment::new(per("0"), per("1"));
        let ds = DenseSequence::segment(&seg, a2(), 20).unwrap();
        let us: Vec<Rat> = (1..=8).map(|j| ds.weights(j).unwrap()[1].clone()).collect();
        let want = [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 4), rat(1, 2), rat(1, 4), rat(0, 1), rat(1, 8)];
        assert_eq!(us, want);
        let d = seg.length(a2(), 20).unwrap();
        let g = weak_star_distance(&ds.point(1).unwrap(), &ds.point(2).unwrap(), a2(), 20).unwrap();
        assert_eq!(g.value, &d.value / rat(2, 1));
        let single = DenseSequence::new(vec![per("01")], a2(), 20).unwrap();
        assert_eq!(single.point(5).unwrap(), per("01"));
    }

    #[test]
    fn reflected_compositions_move_one_unit() {
        for parts in 1..5 {
            for p in 1..4 {
                let total = 1 << p;
                let c = compositions(total, parts, p % 2 == 0);
                for w in c.windows(2) {
                    let moved: usize = w[0].iter().zip(&w[1]).map(|(a, b)| a.abs_diff(*b)).sum();
                    assert_eq!(moved, 2, "{:?} -> {:?}", w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn polygon_gaps_within_envelope() {
        let ds = DenseSequence::new(vec![per("0"), per("1"), per("01")], a2(), 12).unwrap();
        for j in 1..60 {
            let d = weak_star_distance(&ds.point(j).unwrap(), &ds.point(j + 1).unwrap(), a2(), 12).unwrap();
            assert!(d.value <= ds.envelope(j).unwrap(), "gap at {j}");
        }
    }
}
