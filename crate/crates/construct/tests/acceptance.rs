//! Finite-horizon acceptance suite: one line per criterion, nonzero exit if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftlab_construct::family::{construct_family, Member};
use shiftlab_construct::level_set::level_set_family;
use shiftlab_construct::polynomial::polynomial_construction;
use shiftlab_construct::recurrence::{banach_family, upper_family, visit_densities};
use shiftlab_construct::schedule::{KSet, ScheduleConfig};
use shiftlab_construct::seed::DistalSeed;
use shiftlab_construct::trace::{copies, exponential_bound_holds};
use shiftlab_core::analyze::{
    dc1_verdict, default_t_grid, densities, phi_alpha_prefix, AlphaFunction, Checkpoint, CumulativeSums, Oscillation, Pair,
    Verdict, VerdictQuery,
};
use shiftlab_core::measure::{pinned_depth, weak_star_distance, FiniteMeasure};
use shiftlab_core::models::beta::{beta_words, reconstruction};
use shiftlab_core::models::{beta_expand, nested_beta_family, BetaModel, BetaValue, Primitivity, ShiftModel, TransitionSystem};
use shiftlab_core::num::{gcd_u, int, neg_pow, rat, rat_int, Int, Rat};
use shiftlab_core::symbolic::stream::StreamBuilder;
use shiftlab_core::symbolic::{distance, m_epsilon, Alphabet, Cycle, Observable, ShiftMetric, Side, SymbolStream, Word};
use shiftlab_core::Error;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn f(v: &Rat) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn f2() -> ShiftModel {
    ShiftModel::full(2).unwrap()
}

fn xi(bit: u8, k: usize) -> Vec<u8> {
    vec![bit; k]
}

// 1 ------------------------------------------------------------------------

fn dc1_family(alpha: Option<AlphaFunction>) -> Result<shiftlab_construct::family::ScrambleFamily, String> {
    let m = f2();
    let w = Word::from("01");
    let seed = DistalSeed::single(&m, &w).map_err(e)?;
    let k = KSet::Point(FiniteMeasure::periodic(w).map_err(e)?);
    let mut cfg = ScheduleConfig::new(5);
    cfg.alpha = alpha;
    construct_family(&m, &k, &seed, &cfg).map_err(e)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fam = dc1_family(None)?;
    let sched = &fam.schedule;
    ensure(sched.zeta == rat(1, 2), || format!("ζ = {} ≠ 1/2", sched.zeta))?;
    let (x, y) = (fam.member(&xi(0, 5)).map_err(e)?, fam.member(&xi(1, 5)).map_err(e)?);
    let pair = Pair::new(&x.stream, &y.stream, fam.model.metric()).map_err(e)?;
    let seps = sched.separation(&x.xi, &y.xi);
    ensure(!seps.is_empty(), || "no separation checkpoints".into())?;
    let mut worst_sep = Rat::zero();
    for s in &seps {
        let v = pair.phi_prefix(&s.t0, &s.n).map_err(e)?;
        ensure(v <= s.bound, || format!("stage {} block {}: Φ(ζ−5ε_k) = {} > 2δ_k = {}", s.stage, s.i, f(&v), f(&s.bound)))?;
        worst_sep = worst_sep.max(v / &s.bound);
    }
    let mut worst_close = Rat::one();
    for c in sched.closeness() {
        let t = c.t_min.clone().unwrap();
        let v = pair.phi_prefix(&t, &c.n).map_err(e)?;
        ensure(v >= Rat::one() - &c.bound, || format!("closeness at {}: Φ(4ε_k) = {} < 1 − δ_k", c.n, f(&v)))?;
        worst_close = worst_close.min(v);
    }
    let rep = fam.pair_report(&x, &y, &[]).map_err(e)?;
    ensure(rep.verdict == Verdict::Dc1Witnessed, || format!("verdict {}", rep.verdict.label()))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!(
        "ζ = 1/2; {} separation checkpoints (max Φ/2δ_k = {:.3e}), 5 closeness checkpoints (min Φ = {:.6}); {}; horizon ≈ 10^{}",
        seps.len(),
        f(&worst_sep),
        f(&worst_close),
        rep.verdict.label(),
        fam.horizon().to_string().len() - 1
    ))
}

// 2 ------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fam = dc1_family(Some(AlphaFunction::sqrt()))?;
    let (x, y) = (fam.member(&xi(0, 5)).map_err(e)?, fam.member(&xi(1, 5)).map_err(e)?);
    let rep = fam.pair_report(&x, &y, &[]).map_err(e)?;
    for row in &rep.closeness {
        ensure(row.pass, || format!("α-closeness at n = {} t = {}: lo = {} < 1 − δ_k", row.n, row.t, f(&row.lo)))?;
    }
    ensure(rep.closeness.len() >= 5, || "missing α-checkpoints".into())?;
    ensure(rep.implication_holds(), || "α ⇒ plain implication fails".into())?;
    ensure(rep.verdict == Verdict::AlphaDc1Witnessed, || format!("verdict {}", rep.verdict.label()))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 20.0, || format!("runtime {secs:.2} s"))?;
    let min = rep.closeness.iter().map(|r| r.lo.clone()).min().unwrap();
    Ok(format!(
        "{} (stage, t) rows pass (min certified Φ_α = {:.6}), implication holds on {} rows; {:.2} s",
        rep.closeness.len(),
        f(&min),
        rep.implication.len(),
        secs
    ))
}

// 3 ------------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let m = f2();
    let phi = Observable::cylinder(Word::from("1"));
    let lsf = level_set_family(&m, &phi, &rat(1, 4), &rat(1, 2), &ScheduleConfig::new(5)).map_err(e)?;
    let alphabet = Alphabet::new(2).unwrap();
    let kt = 20;
    let depth = pinned_depth(alphabet, kt);
    let slack = neg_pow(2, kt);
    let mut checks = 0;
    let mut worst = Rat::zero();
    let mut birk = Vec::new();
    for bit in [0u8, 1] {
        let x: Member = lsf.family.member(&xi(bit, 5)).map_err(e)?;
        for c in lsf.family.schedule.empirical() {
            let emp = FiniteMeasure::empirical(&x.stream, &c.n, depth, alphabet).map_err(e)?;
            let d = weak_star_distance(&emp, &c.measure, alphabet, kt).map_err(e)?;
            let limit = &c.bound + &slack;
            ensure(d.upper() <= limit, || format!("stage {} block {}: weak* {} > {}", c.stage, c.i, f(&d.upper()), f(&limit)))?;
            worst = worst.max(d.upper() / limit);
            checks += 1;
        }
        let rep = lsf.birkhoff(&x, &rat(1, 20)).map_err(e)?;
        let last = rep.averages.last().unwrap().0.clone();
        ensure(last > *lsf.family.schedule.stages[3].end(), || "Birkhoff grid does not reach stage 5".into())?;
        ensure(matches!(rep.verdict, Oscillation::Irregular { .. }), || {
            format!("Birkhoff liminf {:.4} limsup {:.4} not within 0.05 of (1/4, 1/2)", f(&rep.liminf), f(&rep.limsup))
        })?;
        birk.push((f(&rep.liminf), f(&rep.limsup)));
    }
    Ok(format!(
        "{checks} empirical checkpoints within 4ε_k + 2δ_k + 2^-20 (max ratio {:.3e}); Birkhoff (liminf, limsup) = ({:.4}, {:.4}) / ({:.4}, {:.4})",
        f(&worst),
        birk[0].0,
        birk[0].1,
        birk[1].0,
        birk[1].1
    ))
}

// 4 ------------------------------------------------------------------------

fn reach(m: &[Vec<u8>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; m.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        for b in 0..m.len() {
            if m[a][b] == 1 && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

fn strongly_connected(m: &[Vec<u8>]) -> bool {
    let t: Vec<Vec<u8>> = (0..m.len()).map(|i| (0..m.len()).map(|j| m[j][i]).collect()).collect();
    reach(m, 0).iter().all(|&v| v) && reach(&t, 0).iter().all(|&v| v)
}

/// gcd of all simple cycle lengths, by exhaustive enumeration.
fn cycle_gcd(m: &[Vec<u8>]) -> usize {
    fn dfs(m: &[Vec<u8>], start: usize, at: usize, len: usize, on: &mut Vec<bool>, g: &mut usize) {
        for b in start..m.len() {
            if m[at][b] == 0 {
                continue;
            }
            if b == start {
                *g = gcd_u(*g, len);
            } else if !on[b] {
                on[b] = true;
                dfs(m, start, b, len + 1, on, g);
                on[b] = false;
            }
        }
    }
    let mut g = 0;
    for s in 0..m.len() {
        let mut on = vec![false; m.len()];
        on[s] = true;
        dfs(m, s, s, 1, &mut on, &mut g);
    }
    g
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

/// Some power up to the Wielandt bound is strictly positive.
fn primitive(m: &[Vec<bool>]) -> bool {
    let n = m.len();
    let mut p = m.to_vec();
    for _ in 0..(n - 1) * (n - 1) + 1 {
        if p.iter().flatten().all(|&v| v) {
            return true;
        }
        p = bool_mul(&p, m);
    }
    false
}

fn random_irreducible(rng: &mut ChaCha8Rng, planted_only: bool) -> Vec<Vec<u8>> {
    loop {
        let n = rng.gen_range(1..=8usize);
        let p = rng.gen_range(1..=n);
        // planted classes: most edges go from class c to c+1
        let class: Vec<usize> = (0..n).map(|i| if i < p { i } else { rng.gen_range(0..p) }).collect();
        let density = rng.gen_range(0.2..0.9);
        let noise = if planted_only { 0.0 } else { 0.08 };
        let m: Vec<Vec<u8>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let planted = class[b] == (class[a] + 1) % p && rng.gen_bool(density);
                        u8::from(planted || rng.gen_bool(noise))
                    })
                    .collect()
            })
            .collect();
        if m.iter().flatten().any(|&v| v == 1) && strongly_connected(&m) {
            return m;
        }
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut periods = Vec::new();
    for case in 0..50 {
        let m = random_irreducible(&mut rng, case % 2 == 0);
        let n = m.len();
        let ts = TransitionSystem::new(m.clone()).map_err(e)?;
        let d = ts.cyclic_classes().map_err(e)?;
        let mut all: Vec<u8> = d.classes.iter().flatten().copied().collect();
        all.sort();
        ensure(all == (0..n as u8).collect::<Vec<_>>(), || format!("case {case}: classes do not partition the symbols"))?;
        ensure(d.classes.iter().all(|c| !c.is_empty()), || format!("case {case}: empty class"))?;
        for a in 0..n {
            for b in 0..n {
                if m[a][b] == 1 {
                    let (ca, cb) = (d.class_of(a as u8).unwrap(), d.class_of(b as u8).unwrap());
                    ensure(cb == (ca + 1) % d.period, || format!("case {case}: edge {a}→{b} breaks the rotation"))?;
                }
            }
        }
        let g = cycle_gcd(&m);
        ensure(d.classes.len() == g && d.period == g, || format!("case {case}: {} classes, cycle gcd {g}", d.classes.len()))?;
        let pw = ts.power(d.period);
        for c in &d.classes {
            let sub: Vec<Vec<bool>> = TransitionSystem::restrict(&pw, c).iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect();
            ensure(primitive(&sub), || format!("case {case}: A^p on class {c:?} is not primitive"))?;
            let lib = TransitionSystem::new(TransitionSystem::restrict(&pw, c)).map_err(e)?;
            ensure(matches!(lib.primitivity(), Primitivity::Index(_)), || format!("case {case}: library primitivity disagrees"))?;
        }
        periods.push(d.period);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("runtime {secs:.2} s"))?;
    let mut hist = [0usize; 9];
    for p in &periods {
        hist[*p] += 1;
    }
    Ok(format!("50 systems, periods 1..8 seen {:?}; {secs:.2} s", &hist[1..]))
}

// 5 ------------------------------------------------------------------------

fn walk(model: &ShiftModel, rng: &mut ChaCha8Rng, from: Option<u8>, len: usize) -> Word {
    let n = model.alphabet_size() as u8;
    let mut w: Vec<u8> = Vec::with_capacity(len);
    let mut last = from;
    while w.len() < len {
        let opts: Vec<u8> = (0..n)
            .filter(|&s| {
                let mut t: Vec<u8> = last.into_iter().collect();
                t.push(s);
                model.admissible(&Word(t)).unwrap()
            })
            .collect();
        let s = opts[rng.gen_range(0..opts.len())];
        w.push(s);
        last = Some(s);
    }
    Word(w)
}

fn first_disagreement(x: &[u8], y: &[u8]) -> Option<usize> {
    x.iter().zip(y).position(|(a, b)| a != b)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let models = vec![
        ShiftModel::full(2).unwrap(),
        ShiftModel::Sft(TransitionSystem::golden_mean()),
        ShiftModel::full(3).unwrap(),
        ShiftModel::Sft(TransitionSystem::new(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap()),
    ];
    let (mut traced, mut violations, mut indices) = (0usize, 0usize, 0usize);
    for case in 0..200 {
        let model = &models[case % models.len()];
        let n = model.alphabet_size();
        let metric = ShiftMetric::geometric(n);
        let eta = neg_pow(n as u64, rng.gen_range(1..7));
        let m = m_epsilon(metric, &eta).map_err(e)?;
        let g = model.gluing_gap().map_err(e)?;
        let (a, seg) = (rng.gen_range(g..g + 60), rng.gen_range(0..80usize));
        // copy length around the tracing requirement seg + m
        let len = (seg + m).saturating_add_signed(rng.gen_range(-2..=1)).max(1);
        let y_word = walk(model, &mut rng, None, seg + m + 200);
        let head = walk(model, &mut rng, None, a - g);
        let copy = Word(y_word.symbols()[..len].to_vec());
        let lead = model.bridge(&head, &copy, g).map_err(e)?.ok_or("no bridge")?;
        let tail = walk(model, &mut rng, Some(*copy.symbols().last().unwrap()), 300);
        let x_word = head.concat(&lead).concat(&copy).concat(&tail);
        ensure(model.admissible(&x_word).map_err(e)?, || format!("case {case}: x is not admissible"))?;
        let last = Word(vec![*x_word.symbols().last().unwrap()]);
        let x = SymbolStream::eventually_periodic(&x_word, &last).map_err(e)?;
        let y = SymbolStream::eventually_periodic(&y_word, &Word(vec![*y_word.symbols().last().unwrap()])).map_err(e)?;
        let (xs, ys) = (x_word.symbols(), y_word.symbols());
        // raw-coordinate oracle: d(σ^{a+j}x, σ^j y) = n^-(k+1) with k the first disagreement offset
        let dist = |j: usize| -> Rat {
            match first_disagreement(&xs[a + j..], &ys[j..]) {
                Some(k) => neg_pow(n as u64, k + 1),
                None => Rat::zero(),
            }
        };
        let plain = (0..=seg).all(|j| dist(j) < eta);
        let window = xs[a..a + seg + m] == ys[..seg + m];
        ensure(plain == window, || format!("case {case}: plain tracing ≠ window agreement"))?;
        ensure(copies(&x, &y, &int(a as i64), &int((seg + m) as i64)).map_err(e)? == window, || format!("case {case}: copies() disagrees"))?;
        for j in [0, seg / 2, seg] {
            let lib = distance(&x.shift_by((a + j) as i64).map_err(e)?, &y.shift_by(j as i64).map_err(e)?, metric, 1024).map_err(e)?;
            ensure(lib.value == dist(j), || format!("case {case}: library distance at {j} disagrees"))?;
        }
        if plain {
            traced += 1;
            ensure(exponential_bound_holds(n, m, &eta), || format!("case {case}: n^-(m+1) > η"))?;
            for j in 0..=seg {
                indices += 1;
                if dist(j) > &eta * neg_pow(n as u64, seg - j) {
                    violations += 1;
                }
            }
        }
    }
    ensure(violations == 0, || format!("{violations} exponential-bound violations"))?;
    ensure(traced >= 50, || format!("only {traced} segments traced"))?;
    Ok(format!("{traced}/200 segments traced at guard depth, {indices} in-segment indices, 0 violations of η·n^-(b−i)"))
}

// 6 ------------------------------------------------------------------------

fn criterion_6() -> Outcome {
    let golden = BetaModel::new(BetaValue::golden(), 64).map_err(e)?;
    let sft = TransitionSystem::golden_mean();
    let mut words = 0;
    for len in 0..=14 {
        for w in Alphabet::new(2).unwrap().words(len) {
            ensure(golden.admissible(&w).map_err(e)? == sft.admissible(&w), || format!("admissibility differs on {w}"))?;
            words += 1;
        }
    }
    let beta = BetaValue::golden();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fld = beta.field;
    for _ in 0..1000 {
        let q: i64 = rng.gen_range(1..1_000_000);
        let p: i64 = rng.gen_range(0..q);
        let x = rat(p, q);
        let digits = beta_expand(&beta, &x, 40).map_err(e)?;
        let (res, bound) = reconstruction(&beta, &x, &digits).map_err(e)?;
        ensure(fld.sign(&res) >= 0 && fld.sign(&fld.sub(&bound, &res)) >= 0, || format!("residual of {x} exceeds β^-40"))?;
        ensure(golden.admissible(&digits).map_err(e)?, || format!("digits of {x} are not admissible"))?;
    }
    let mut nested_checks = 0;
    for beta in ["golden", "3/2", "1+sqrt(2)"] {
        let big = BetaModel::new(BetaValue::parse(beta).map_err(e)?, 64).map_err(e)?;
        let mut fam = Vec::new();
        for c in (1..=4).rev() {
            if let Ok(v) = nested_beta_family(&big, c) {
                fam = v;
                break;
            }
        }
        ensure(!fam.is_empty(), || format!("no nested family below β = {beta}"))?;
        let mut chain: Vec<&BetaModel> = fam.iter().collect();
        chain.push(&big);
        for pair in chain.windows(2) {
            ensure(pair[0].approx < pair[1].approx, || "family is not increasing".into())?;
            for len in 1..=12 {
                for w in beta_words(pair[0], len).map_err(e)? {
                    ensure(pair[1].admissible(&w).map_err(e)?, || format!("{w} escapes the larger β-shift"))?;
                    nested_checks += 1;
                }
            }
        }
    }
    Ok(format!("{words} words agree with the golden-mean SFT; 1000 expansions within β^-40; {nested_checks} nested inclusions to depth 12"))
}

// 7 ------------------------------------------------------------------------

fn two_sided(rng: &mut ChaCha8Rng, left: &Word, mid: &Word, right: &Word, from: i64) -> SymbolStream {
    let mut b = StreamBuilder::two_sided(Cycle::from_word(left), int(rng.gen_range(0..5)), int(from));
    b.push_word(mid);
    b.finish(Cycle::from_word(right)).unwrap()
}

fn rand_word(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Word {
    let len = rng.gen_range(lo..=hi);
    Word((0..len).map(|_| rng.gen_range(0..2u8)).collect())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = AlphaFunction::log_ceil();
    let top = int(100_000);
    let mut grid = vec![int(1000)];
    while grid.last().unwrap() < &top {
        let next: Int = (grid.last().unwrap() * int(101) / int(100)).min(top.clone());
        grid.push(next);
    }
    let mut worst = f64::INFINITY;
    for case in 0..100 {
        let mid = rand_word(&mut rng, 1, 40);
        let from = -rng.gen_range(0..20i64);
        let (left, right) = if case % 2 == 0 { (Word::from("0"), Word::from("0")) } else { (rand_word(&mut rng, 1, 4), rand_word(&mut rng, 1, 4)) };
        let x = two_sided(&mut rng, &left, &mid, &right, from);
        let mut flipped = mid.0.clone();
        for _ in 0..rng.gen_range(1..4) {
            let k = rng.gen_range(0..flipped.len());
            flipped[k] ^= 1;
        }
        if flipped == mid.0 {
            flipped[0] ^= 1;
        }
        let y = two_sided(&mut rng, &left, &Word(flipped), &right, from);
        let pair = Pair::new(&x, &y, ShiftMetric::Polynomial).map_err(e)?;
        let sums = CumulativeSums::new(&pair, &top).map_err(e)?;
        // S and α are nondecreasing, so S(n_j)/α(n_{j+1}) bounds the ratio on [n_j, n_{j+1}]
        for w in grid.windows(2) {
            let lo = sums.bounds(&w[0]).map_err(e)?.0;
            let r = lo / rat_int(&alpha.eval(&w[1]).map_err(e)?);
            worst = worst.min(f(&r));
            ensure(r >= rat(1, 5), || format!("case {case}: S(n)/α(n) = {:.4} < 0.2 near n = {}", f(&r), w[0]))?;
        }
    }
    let sqrt = AlphaFunction::sqrt();
    let poly = polynomial_construction(&sqrt, 5, None).map_err(e)?;
    ensure(poly.verify().map_err(e)?, || "polynomial stage inequalities fail".into())?;
    let (x, y) = (poly.member(&xi(0, 5)).map_err(e)?, poly.member(&xi(1, 5)).map_err(e)?);
    let pair = Pair::new(&x, &y, ShiftMetric::Polynomial).map_err(e)?;
    let mut fractions = Vec::new();
    for c in poly.closeness() {
        let t = c.t_min.clone().unwrap();
        let v = phi_alpha_prefix(&pair, &t, &sqrt, &c.n).map_err(e)?;
        ensure(v >= Rat::one() - &c.bound, || format!("weighted closeness {} < 1 − {} at b_k = {}", f(&v), c.bound, c.n))?;
        fractions.push(format!("{:.4}", f(&v)));
    }
    ensure(fractions.len() == 5, || format!("only {} stages realized", fractions.len()))?;
    // harmonic calibration: a single disagreement at coordinate 0 gives S(n) = H_n
    let zero = Cycle::from_word(&Word::from("0"));
    let mut b = StreamBuilder::two_sided(zero.clone(), int(0), int(0));
    b.push_word(&Word::from("1"));
    let one = b.finish(zero).unwrap();
    let zeros = SymbolStream::periodic(Side::TwoSided, &Word::from("0")).unwrap();
    let hp = Pair::new(&one, &zeros, ShiftMetric::Polynomial).map_err(e)?;
    let htop = int(1_000_000);
    let hs = CumulativeSums::new(&hp, &htop).map_err(e)?;
    let mut n = int(1000);
    let (mut hmin, mut hmax) = (f64::INFINITY, 0f64);
    loop {
        let (lo, hi) = hs.bounds(&n).map_err(e)?;
        let ln = n.to_f64().unwrap().ln();
        let (lo, hi) = (f(&lo) / ln, f(&hi) / ln);
        ensure((0.95..=1.1).contains(&lo) && (0.95..=1.1).contains(&hi), || format!("H_n/ln n = {lo} at n = {n}"))?;
        hmin = hmin.min(lo);
        hmax = hmax.max(hi);
        if n == htop {
            break;
        }
        n = (n * int(3) / int(2)).min(htop.clone());
    }
    Ok(format!(
        "(a) 100 pairs, min S(n)/⌈ln(n+1)⌉ = {worst:.3} on [10^3, 10^5]; (b) weighted closeness at b_1..b_5 = [{}]; H_n/ln n ∈ [{hmin:.4}, {hmax:.4}]; {:.2} s",
        fractions.join(", "),
        start.elapsed().as_secs_f64()
    ))
}

// 8 ------------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g2 = ShiftMetric::geometric(2);
    let grid = default_t_grid(&rat(1, 2), &rat(1, 16), &g2.diameter(), &[]);
    let horizon = int(10_000);
    let mut worst = Rat::one();
    for case in 0..20 {
        let p = rand_word(&mut rng, 1, 40);
        let mut q = rand_word(&mut rng, 0, 40);
        if q == p {
            q = p.concat(&Word::from("1"));
        }
        let zero = Word::from("0");
        let x = SymbolStream::eventually_periodic(&p, &zero).map_err(e)?;
        let y = SymbolStream::eventually_periodic(&q, &zero).map_err(e)?;
        let pair = Pair::new(&x, &y, g2).map_err(e)?;
        for t in &grid {
            let v = pair.phi_prefix(t, &horizon).map_err(e)?;
            ensure(v >= rat(99, 100), || format!("case {case}: Φ({t}) = {} < 0.99", f(&v)))?;
            worst = worst.min(v);
        }
        let q = VerdictQuery {
            t0: rat(3, 16),
            t_grid: grid.clone(),
            separation: vec![Checkpoint::new(horizon.clone(), rat(1, 2))],
            closeness: vec![Checkpoint::new(horizon.clone(), rat(1, 100))],
            horizon: horizon.clone(),
            alpha: None,
        };
        let rep = dc1_verdict(&pair, &q).map_err(e)?;
        ensure(rep.verdict == Verdict::RefutedAtHorizon, || format!("case {case}: verdict {}", rep.verdict.label()))?;
    }
    match DistalSeed::single(&f2(), &Word::from("0")) {
        Err(Error::Domain(m)) if m.contains("ζ = 0") => {}
        Err(other) => return Err(format!("fixed-point seed gives the wrong error: {other}")),
        Ok(_) => return Err("fixed-point seed accepted".into()),
    }
    Ok(format!("20 pairs refuted-at-horizon, min Φ over the default grid = {:.4}; fixed-point seed rejected with ζ = 0", f(&worst)))
}

// 9 ------------------------------------------------------------------------

struct Case {
    x: SymbolStream,
    y: SymbolStream,
    xs: Vec<u8>,
    ys: Vec<u8>,
    n: usize,
    base: usize,
}

fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let base = rng.gen_range(2..=3usize);
    let word = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| -> Word {
        let len = rng.gen_range(lo..=hi);
        Word((0..len).map(|_| rng.gen_range(0..base as u8)).collect())
    };
    let (p1, c1) = (word(rng, 0, 24), word(rng, 1, 6));
    // half of the pairs share most of their symbols
    let (p2, c2) = if rng.gen_bool(0.5) {
        let mut p = p1.clone();
        if !p.is_empty() {
            let k = rng.gen_range(0..p.len());
            p.0[k] = rng.gen_range(0..base as u8);
        }
        (p, if rng.gen_bool(0.5) { c1.clone() } else { word(rng, 1, 6) })
    } else {
        (word(rng, 0, 24), word(rng, 1, 6))
    };
    let n = rng.gen_range(1..=512usize);
    // past both prefixes the pair is periodic with period lcm ≤ 60
    let span = n + 24 + 60 + 2;
    let realize = |p: &Word, c: &Word| -> Vec<u8> { (0..span).map(|i| if i < p.len() { p.0[i] } else { c.0[(i - p.len()) % c.len()] }).collect() };
    Case {
        x: SymbolStream::eventually_periodic(&p1, &c1).unwrap(),
        y: SymbolStream::eventually_periodic(&p2, &c2).unwrap(),
        xs: realize(&p1, &c1),
        ys: realize(&p2, &c2),
        n,
        base,
    }
}

/// Without a disagreement inside the realized span the pair agrees forever.
fn oracle_distances(c: &Case) -> Vec<Option<usize>> {
    (0..c.n).map(|j| first_disagreement(&c.xs[j..], &c.ys[j..])).collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cases = 10_000;
    let ts = [rat(1, 2), rat(1, 3), rat(1, 8), rat(1, 27), rat(1, 64), rat(2, 7), rat(1, 1)];
    let alphas = [AlphaFunction::sqrt(), AlphaFunction::power(1, 3).unwrap()];
    for case in 0..cases {
        let c = random_case(&mut rng);
        let metric = ShiftMetric::geometric(c.base);
        let pair = Pair::new(&c.x, &c.y, metric).map_err(e)?;
        let ks = oracle_distances(&c);
        let d = |k: &Option<usize>| k.map_or(Rat::zero(), |k| neg_pow(c.base as u64, k + 1));
        let t = &ts[case % ts.len()];
        let want = Rat::new(int(ks.iter().filter(|k| d(k) < *t).count() as i64), int(c.n as i64));
        let got = pair.phi_prefix(t, &int(c.n as i64)).map_err(e)?;
        ensure(got == want, || format!("phiPrefix case {case}: {got} ≠ {want}"))?;
        // α-weighted: exact integer sums in units of base^-(K+1)
        let kmax = ks.iter().flatten().max().copied().unwrap_or(0) + 1;
        let unit = |k: &Option<usize>| -> Int { k.map_or(Int::zero(), |k| num_traits::pow(Int::from(c.base), kmax - k - 1)) };
        let scale = rat_int(&num_traits::pow(Int::from(c.base), kmax));
        let alpha = &alphas[case % 2];
        let mut s = Int::zero();
        let mut count = 0i64;
        for (i, k) in ks.iter().enumerate() {
            s += unit(k);
            let lim = rat_int(&alpha.eval(&int(i as i64 + 1)).map_err(e)?) * t * &scale;
            if rat_int(&s) < lim {
                count += 1;
            }
        }
        let want = Rat::new(int(count), int(c.n as i64));
        let got = phi_alpha_prefix(&pair, t, alpha, &int(c.n as i64)).map_err(e)?;
        ensure(got == want, || format!("phiAlphaPrefix case {case}: {got} ≠ {want}"))?;
    }
    // densities against naive window scans
    for case in 0..cases {
        let n = rng.gen_range(1..=512usize);
        let p = rng.gen_range(0.0..1.0);
        let set: Vec<u64> = (1..=n as u64).filter(|_| rng.gen_bool(p)).collect();
        let w0 = rng.gen_range(1..=24usize);
        let got = densities(&set, n as u64, w0).map_err(e)?;
        let mut pre = vec![0i64; n + 1];
        for i in 1..=n {
            pre[i] = pre[i - 1] + i64::from(set.binary_search(&(i as u64)).is_ok());
        }
        let w = w0.min(n);
        // extreme window ratios as exact integer fractions (num, den)
        let (mut bu, mut bl) = ((0i64, 1i64), (1i64, 1i64));
        for i in 1..=n {
            for j in i + w - 1..=n {
                let (c, len) = (pre[j] - pre[i - 1], (j - i + 1) as i64);
                if c * bu.1 > bu.0 * len {
                    bu = (c, len);
                }
                if c * bl.1 < bl.0 * len {
                    bl = (c, len);
                }
            }
        }
        let (bu, bl) = (Rat::new(int(bu.0), int(bu.1)), Rat::new(int(bl.0), int(bl.1)));
        let first = n.div_ceil(4).max(w);
        let (mut u, mut l) = (Rat::zero(), Rat::one());
        for k in first..=n {
            let v = Rat::new(int(pre[k]), int(k as i64));
            u = u.max(v.clone());
            l = l.min(v);
        }
        ensure((got.banach_upper.clone(), got.banach_lower.clone()) == (bu, bl), || format!("Banach densities case {case}"))?;
        ensure((got.upper.clone(), got.lower.clone()) == (u, l), || format!("prefix densities case {case}"))?;
        ensure(got.count == int(set.len() as i64), || format!("count case {case}"))?;
    }
    // bridges: exhaustive over short contexts and gaps ≤ 5
    let models = vec![
        ShiftModel::full(2).unwrap(),
        ShiftModel::Sft(TransitionSystem::golden_mean()),
        ShiftModel::Sft(TransitionSystem::new(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap()),
        ShiftModel::Beta(BetaModel::new(BetaValue::golden(), 64).unwrap()),
    ];
    let mut bridges = 0;
    for model in &models {
        let al = Alphabet::new(model.alphabet_size()).unwrap();
        let ctx: Vec<Word> = (0..=2).flat_map(|l| al.words(l)).filter(|w| model.admissible(w).unwrap()).collect();
        for u in &ctx {
            for v in &ctx {
                for len in 0..=5 {
                    let exists = al.words(len).iter().any(|w| model.admissible(&u.concat(w).concat(v)).unwrap());
                    let got = model.bridge(u, v, len).map_err(e)?;
                    ensure(got.is_some() == exists, || format!("bridge({u}, {v}, {len}) existence differs"))?;
                    if let Some(w) = got {
                        ensure(w.len() == len && model.admissible(&u.concat(&w).concat(v)).unwrap(), || format!("bridge({u}, {v}, {len}) = {w} is invalid"))?;
                    }
                    bridges += 1;
                }
            }
        }
    }
    Ok(format!("{cases} phiPrefix + {cases} phiAlphaPrefix + {cases} densities cases, {bridges} bridge queries: 0 discrepancies"))
}

// 10 -----------------------------------------------------------------------

fn criterion_10() -> Outcome {
    let target = Word::from("00000");
    let eps = rat(1, 32);
    let fam = banach_family(3, &target).map_err(e)?;
    let mut lines = Vec::new();
    for bit in [0u8, 1] {
        let m = fam.member(&xi(bit, 3)).map_err(e)?;
        ensure(fam.verify_member(&m).map_err(e)?.ok(), || "banach family member fails its trace".into())?;
        let d = visit_densities(&fam, &m, &eps).map_err(e)?;
        ensure(d.banach_upper >= rat(1, 2), || format!("Banach upper {} < 0.5", f(&d.banach_upper)))?;
        ensure(d.upper <= rat(1, 10), || format!("prefix upper {} > 0.1", f(&d.upper)))?;
        lines.push(format!("B* = {:.3}, d̄ = {:.4}", f(&d.banach_upper), f(&d.upper)));
    }
    let fam = upper_family(3, &target).map_err(e)?;
    for bit in [0u8, 1] {
        let m = fam.member(&xi(bit, 3)).map_err(e)?;
        ensure(fam.verify_member(&m).map_err(e)?.ok(), || "upper family member fails its trace".into())?;
        let d = visit_densities(&fam, &m, &eps).map_err(e)?;
        ensure(d.upper >= rat(1, 2), || format!("prefix upper {} < 0.5", f(&d.upper)))?;
        lines.push(format!("d̄ = {:.4}", f(&d.upper)));
    }
    Ok(format!("ε = 1/32: banach family [{}; {}], upper family [{}; {}]", lines[0], lines[1], lines[2], lines[3]))
}

fn main() {
    // cargo passes harness flags such as --list; this target has no filters
    if std::env::args().any(|a| a == "--list") {
        for k in 1..=10 {
            println!("criterion_{k}: test");
        }
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("DC1 construction", criterion_1),
        ("alpha-DC1 refinement", criterion_2),
        ("saturated-set tracking", criterion_3),
        ("periodic decomposition", criterion_4),
        ("exponential tracing upgrade", criterion_5),
        ("beta-shift", criterion_6),
        ("polynomial-metric dichotomy", criterion_7),
        ("fixed-point exclusion", criterion_8),
        ("oracle equivalence", criterion_9),
        ("recurrence-class evidence", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

