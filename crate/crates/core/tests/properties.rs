use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use shiftlab_core::analyze::{densities, phi_alpha_prefix, AlphaFunction, CumulativeSums, Pair};
use shiftlab_core::measure::{weak_star_distance, FiniteMeasure};
use shiftlab_core::models::sft::TransitionSystem;
use shiftlab_core::num::{gcd_u, int, rat, rat_int, Int, Rat};
use shiftlab_core::symbolic::stream::StreamBuilder;
use shiftlab_core::symbolic::{count_occurrences, distance, Alphabet, Cycle, ShiftMetric, Side, SymbolStream, Word};

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..max)
}

fn cyc(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 1..max)
}

fn stream(prefix: &[u8], cycle: &[u8]) -> SymbolStream {
    SymbolStream::eventually_periodic(&Word(prefix.to_vec()), &Word(cycle.to_vec())).unwrap()
}

fn brute_phi(x: &SymbolStream, y: &SymbolStream, t: &Rat, n: i64, metric: ShiftMetric) -> Rat {
    let c = (0..n)
        .filter(|&j| distance(&x.shift_by(j).unwrap(), &y.shift_by(j).unwrap(), metric, 128).unwrap().value < *t)
        .count();
    Rat::new(int(c as i64), int(n))
}

fn ts() -> Vec<Rat> {
    vec![rat(1, 64), rat(1, 16), rat(1, 8), rat(1, 4), rat(1, 2), rat(1, 1), rat(2, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_monotone_in_t(p1 in bits(12), c1 in cyc(6), p2 in bits(12), c2 in cyc(6), n in 1i64..80) {
        let g2 = ShiftMetric::geometric(2);
        let (x, y) = (stream(&p1, &c1), stream(&p2, &c2));
        let pair = Pair::new(&x, &y, g2).unwrap();
        let vals: Vec<Rat> = ts().iter().map(|t| pair.phi_prefix(t, &int(n)).unwrap()).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(vals.last().unwrap().clone(), Rat::one());
        prop_assert_eq!(pair.phi_prefix(&rat(1, 16), &int(n)).unwrap(), brute_phi(&x, &y, &rat(1, 16), n, g2));
    }

    #[test]
    fn alpha_closeness_implies_plain_closeness(p1 in bits(16), c1 in cyc(5), p2 in bits(16), c2 in cyc(5), n in 1i64..300) {
        let g2 = ShiftMetric::geometric(2);
        let pair = Pair::new(&stream(&p1, &c1), &stream(&p2, &c2), g2).unwrap();
        let alpha = AlphaFunction::sqrt();
        let sums = CumulativeSums::new(&pair, &int(n)).unwrap();
        for t in ts() {
            let c = sums.alpha_count(&alpha, &t, &int(n)).unwrap();
            let plain = pair.phi_prefix(&t, &int(n)).unwrap();
            let slack = Rat::new(alpha.eval(&int(n)).unwrap(), int(n));
            prop_assert!(plain >= c.fraction_lo() - slack);
        }
    }

    #[test]
    fn alpha_counts_match_exact_sums(p1 in bits(10), c1 in cyc(4), p2 in bits(10), c2 in cyc(4), n in 1i64..60) {
        let g2 = ShiftMetric::geometric(2);
        let (x, y) = (stream(&p1, &c1), stream(&p2, &c2));
        let pair = Pair::new(&x, &y, g2).unwrap();
        let alpha = AlphaFunction::sqrt();
        let mut acc = Rat::zero();
        let mut sums = vec![acc.clone()];
        for j in 0..n {
            let d = distance(&x.shift_by(j).unwrap(), &y.shift_by(j).unwrap(), g2, 256).unwrap();
            acc += d.value;
            sums.push(acc.clone());
        }
        for t in [rat(1, 3), rat(1, 1)] {
            let want = (1..=n).filter(|&i| sums[i as usize] < rat_int(&alpha.eval(&int(i)).unwrap()) * &t).count();
            prop_assert_eq!(phi_alpha_prefix(&pair, &t, &alpha, &int(n)).unwrap(), Rat::new(int(want as i64), int(n)));
        }
    }

    #[test]
    fn density_chain_and_windows(set in prop::collection::btree_set(1u64..200, 0..120), n in 1u64..200, w in 1usize..20) {
        let s: Vec<u64> = set.into_iter().filter(|&v| v <= n).collect();
        let p = densities(&s, n, w).unwrap();
        prop_assert!(p.chain_holds());
        let w = w.min(n as usize) as u64;
        let mut hi = Rat::zero();
        let mut lo = Rat::one();
        for i in 1..=n {
            for j in i + w - 1..=n {
                let c = s.iter().filter(|&&v| v >= i && v <= j).count();
                let d = Rat::new(int(c as i64), int((j - i + 1) as i64));
                hi = hi.max(d.clone());
                lo = lo.min(d);
            }
        }
        prop_assert_eq!((p.banach_upper, p.banach_lower), (hi, lo));
    }

    #[test]
    fn occurrence_counts_match_scans(p1 in bits(30), c1 in cyc(7), u in cyc(4), s0 in 1i64..40, len in 0i64..200) {
        let x = stream(&p1, &c1);
        let got = count_occurrences(&x, &u, &int(s0), &int(s0 + len)).unwrap();
        let want = (s0..s0 + len).filter(|&s| x.window(&int(s), u.len()).unwrap() == u).count();
        prop_assert_eq!(got, int(want as i64));
    }

    #[test]
    fn weak_star_is_a_metric_on_samples(a in cyc(6), b in cyc(6), c in cyc(6)) {
        let al = Alphabet::new(2).unwrap();
        let m = |w: &[u8]| FiniteMeasure::periodic(Word(w.to_vec())).unwrap();
        let (ma, mb, mc) = (m(&a), m(&b), m(&c));
        let d = |x: &FiniteMeasure, y: &FiniteMeasure| weak_star_distance(x, y, al, 8).unwrap().value;
        prop_assert_eq!(d(&ma, &ma), Rat::zero());
        prop_assert_eq!(d(&ma, &mb), d(&mb, &ma));
        prop_assert!(d(&ma, &mc) <= d(&ma, &mb) + d(&mb, &mc));
    }

    #[test]
    fn cyclic_classes_rotate(n in 2usize..7, edges in prop::collection::vec((0usize..7, 0usize..7), 0..20)) {
        // a Hamiltonian cycle keeps the graph strongly connected
        let mut m = vec![vec![0u8; n]; n];
        for i in 0..n {
            m[i][(i + 1) % n] = 1;
        }
        for (a, b) in edges {
            m[a % n][b % n] = 1;
        }
        let ts = TransitionSystem::new(m.clone()).unwrap();
        let d = ts.cyclic_classes().unwrap();
        let mut seen: Vec<u8> = d.classes.iter().flatten().cloned().collect();
        seen.sort();
        prop_assert_eq!(seen, (0..n as u8).collect::<Vec<_>>());
        for a in 0..n {
            for b in 0..n {
                if m[a][b] == 1 {
                    let (ca, cb) = (d.class_of(a as u8).unwrap(), d.class_of(b as u8).unwrap());
                    prop_assert_eq!(cb, (ca + 1) % d.period);
                }
            }
        }
        // period divides every closed walk length up to 2n
        let mut g = 0;
        let mut p = ts.power(1);
        for k in 1..=2 * n {
            if (0..n).any(|i| p[i][i]) {
                g = gcd_u(g, k);
            }
            p = mul(&p, &ts.power(1));
        }
        prop_assert_eq!(g, d.period);
    }
}

fn mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

#[test]
fn harmonic_calibration() {
    // one disagreement at coordinate 0 under the polynomial metric: S(n) = H_n
    let zero = Cycle::from_word(&Word::from("0"));
    let mut b = StreamBuilder::two_sided(zero.clone(), int(0), int(0));
    b.push_word(&Word::from("1"));
    let x = b.finish(zero).unwrap();
    let y = SymbolStream::periodic(Side::TwoSided, &Word::from("0")).unwrap();
    let pair = Pair::new(&x, &y, ShiftMetric::Polynomial).unwrap();
    let top = int(1_000_000);
    let sums = CumulativeSums::new(&pair, &top).unwrap();
    let mut n: Int = int(1000);
    while n <= top {
        let (lo, hi) = sums.bounds(&n).unwrap();
        let ln = (n.to_f64().unwrap()).ln();
        let (lo, hi) = (lo.to_f64().unwrap() / ln, hi.to_f64().unwrap() / ln);
        assert!(hi - lo < 1e-9, "n={n}: [{lo}, {hi}]");
        assert!((0.95..=1.1).contains(&lo), "n={n}: {lo}");
        n = n * 3 / 2;
    }
}
