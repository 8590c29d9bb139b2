use num_traits::{One, Zero};

use super::stream::{Side, SymbolStream};
use crate::error::{domain, Result};
use crate::num::{int, neg_pow, rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftMetric {
    /// d = base^-k at the first disagreement (one-sided coordinate k ≥ 1;
    /// two-sided k = 1 + min |m|).
    Geometric { base: u64 },
    /// Two-sided d₁ = max 1/(|m|+1) over disagreement coordinates m.
    Polynomial,
}

impl ShiftMetric {
    pub fn geometric(base: usize) -> Self {
        ShiftMetric::Geometric { base: base as u64 }
    }

    /// Largest attainable distance.
    pub fn diameter(&self) -> Rat {
        match self {
            ShiftMetric::Geometric { base } => rat(1, *base as i64),
            ShiftMetric::Polynomial => Rat::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distance {
    pub value: Rat,
    /// False when no disagreement was witnessed within the guard and `value`
    /// is only an upper bound.
    pub certain: bool,
}

pub fn distance(x: &SymbolStream, y: &SymbolStream, metric: ShiftMetric, guard: usize) -> Result<Distance> {
    if guard == 0 {
        return domain("guard must be at least 1");
    }
    if x.side() != y.side() {
        return domain("distance between streams of different sidedness");
    }
    match (metric, x.side()) {
        (ShiftMetric::Geometric { base }, Side::OneSided) => {
            let a = x.window(&int(1), guard)?;
            let b = y.window(&int(1), guard)?;
            Ok(match (0..guard).find(|&k| a[k] != b[k]) {
                Some(k) => Distance { value: neg_pow(base, k + 1), certain: true },
                None => Distance { value: neg_pow(base, guard), certain: false },
            })
        }
        (ShiftMetric::Geometric { base }, Side::TwoSided) => match first_two_sided(x, y, guard - 1)? {
            Some(j) => Ok(Distance { value: neg_pow(base, j + 1), certain: true }),
            None => Ok(Distance { value: neg_pow(base, guard), certain: false }),
        },
        (ShiftMetric::Polynomial, Side::TwoSided) => match first_two_sided(x, y, guard)? {
            Some(j) => Ok(Distance { value: rat(1, j as i64 + 1), certain: true }),
            None => Ok(Distance { value: rat(1, guard as i64 + 1), certain: false }),
        },
        (ShiftMetric::Polynomial, Side::OneSided) => domain("the polynomial metric is two-sided"),
    }
}

/// Smallest |m| ≤ radius with x_m ≠ y_m.
fn first_two_sided(x: &SymbolStream, y: &SymbolStream, radius: usize) -> Result<Option<usize>> {
    let r = radius as i64;
    let a = x.window(&int(-r), 2 * radius + 1)?;
    let b = y.window(&int(-r), 2 * radius + 1)?;
    Ok((0..=radius).find(|&j| a[radius + j] != b[radius + j] || a[radius - j] != b[radius - j]))
}

/// Largest m with base^-m ≥ eps: d < eps iff the first m coordinates agree.
pub fn m_epsilon(metric: ShiftMetric, eps: &Rat) -> Result<usize> {
    let base = match metric {
        ShiftMetric::Geometric { base } => base,
        ShiftMetric::Polynomial => return domain("mEpsilon is defined for the geometric metric"),
    };
    if eps <= &Rat::zero() {
        return domain("eps must be positive");
    }
    let mut m = 0usize;
    let mut p = Rat::one();
    loop {
        let next = &p / Rat::from_integer(int(base as i64));
        if next < *eps {
            return Ok(m);
        }
        p = next;
        m += 1;
    }
}

/// Polynomial-metric analogue: d₁ < eps iff no disagreement at |m| < r.
pub fn poly_radius(eps: &Rat) -> Result<usize> {
    if eps <= &Rat::zero() {
        return domain("eps must be positive");
    }
    // 1/(|m|+1) < eps  ⇔  |m| > 1/eps - 1
    let bound = Rat::one() / eps - Rat::one();
    if bound < Rat::zero() {
        return Ok(0);
    }
    Ok(crate::num::to_usize(&crate::num::floor_rat(&bound))? + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::word::Word;

    fn one(w: &str) -> SymbolStream {
        SymbolStream::eventually_periodic(&Word::from(w), &Word::from("0")).unwrap()
    }

    #[test]
    fn m_epsilon_values() {
        let g2 = ShiftMetric::geometric(2);
        assert_eq!(m_epsilon(g2, &rat(1, 8)).unwrap(), 3);
        assert_eq!(m_epsilon(g2, &rat(1, 1)).unwrap(), 0);
        assert_eq!(m_epsilon(g2, &rat(3, 1)).unwrap(), 0);
        assert_eq!(m_epsilon(ShiftMetric::geometric(3), &rat(1, 10)).unwrap(), 2);
    }

    #[test]
    fn distance_examples() {
        let g2 = ShiftMetric::geometric(2);
        let d = distance(&one("0010"), &one("0000"), g2, 10).unwrap();
        assert_eq!(d, Distance { value: rat(1, 8), certain: true });
        let u = distance(&one("0"), &one("0"), g2, 7).unwrap();
        assert_eq!(u, Distance { value: rat(1, 128), certain: false });
        let zero = SymbolStream::periodic(Side::TwoSided, &Word::from("0")).unwrap();
        let mut b = crate::symbolic::stream::StreamBuilder::two_sided(
            crate::symbolic::word::Cycle::new(vec![0]),
            int(0),
            int(4),
        );
        b.push_word(&Word::from("1"));
        let bumped = b.finish(crate::symbolic::word::Cycle::new(vec![0])).unwrap();
        let d1 = distance(&zero, &bumped, ShiftMetric::Polynomial, 10).unwrap();
        assert_eq!(d1, Distance { value: rat(1, 5), certain: true });
        assert!(distance(&zero, &one("0"), g2, 3).is_err());
    }

    #[test]
    fn poly_radius_values() {
        // d₁ < 1/3 iff no disagreement at |m| ≤ 2
        assert_eq!(poly_radius(&rat(1, 3)).unwrap(), 3);
        assert_eq!(poly_radius(&rat(2, 5)).unwrap(), 2);
        assert_eq!(poly_radius(&rat(2, 1)).unwrap(), 0);
    }
}
