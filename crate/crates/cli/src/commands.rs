use serde_json::{json, Value};

use shiftlab_core::analyze::{dc1_verdict, dyadic_grid, Checkpoint, Oscillation, Pair, VerdictQuery};
use shiftlab_core::measure::{pinned_depth, weak_star_distance, FiniteMeasure};
use shiftlab_core::models::{beta::reconstruction, beta_expand, Primitivity, ShiftModel};
use shiftlab_core::num::{int, neg_pow, parse_rat, rat, rat_to_f64, Int, Rat};
use shiftlab_core::symbolic::{Alphabet, Observable, ShiftMetric, Word};
use shiftlab_construct::family::{construct_family, parse_xi, Member, ScrambleFamily};
use shiftlab_construct::level_set::level_set_family;
use shiftlab_construct::polynomial::polynomial_construction;
use shiftlab_construct::schedule::{KSet, ScheduleConfig};
use shiftlab_construct::seed::DistalSeed;

use crate::config::{self, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{chaos_report, i, r, stream_rle, Run};

pub const DEFAULT_STAGES: usize = 4;

fn rats(v: &[String]) -> CliResult<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s).map_err(|e| CliError::Config(format!("t grid: {e}")))).collect()
}

/// Builds with the requested stage count, dropping stages until the
/// construction ends inside the horizon (when one is given).
fn fit_stages<F>(
    want: usize,
    horizon: Option<&Int>,
    mut build: impl FnMut(usize) -> CliResult<F>,
    end: impl Fn(&F) -> Int,
) -> CliResult<F> {
    let mut s = want;
    loop {
        let f = build(s)?;
        match horizon {
            Some(h) if end(&f) > *h => {
                if s == 1 {
                    return Err(CliError::Config(format!("horizon {h} ends before the first stage (needs {})", end(&f))));
                }
                s -= 1;
            }
            _ => return Ok(f),
        }
    }
}

fn labels(cfg: &RunConfig, stages: usize) -> CliResult<Vec<(String, Vec<u8>)>> {
    let raw = if cfg.members.is_empty() { vec!["1".repeat(stages), "2".repeat(stages)] } else { cfg.members.clone() };
    let mut out: Vec<(String, Vec<u8>)> = Vec::new();
    for l in raw {
        let xi = parse_xi(&l)?;
        if out.iter().any(|o| o.0 == l) {
            return Err(CliError::Config(format!("member {l} listed twice")));
        }
        out.push((l, xi));
    }
    Ok(out)
}

pub fn check(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    match cfg.model()? {
        ShiftModel::Sft(t) => {
            let transitive = t.is_transitive();
            let index = match t.primitivity() {
                Primitivity::Index(k) => Some(k),
                Primitivity::NotPrimitive => None,
            };
            run.set("alphabetSize", json!(t.size()));
            run.set("transitive", json!(transitive));
            run.set("primitivityIndex", json!(index));
            if transitive {
                let p = t.period()?;
                run.set("period", json!(p));
                run.check("primitive iff period 1", (p == 1) == index.is_some(), format!("period {p}"));
            } else {
                run.set("period", Value::Null);
            }
        }
        ShiftModel::Beta(b) => {
            run.set("alphabetSize", json!(b.alphabet_size()));
            run.set("transitive", json!(true));
            run.set("gluingGap", json!(b.zero_gap()));
            let one = Word(b.one.digits(cfg.precision().min(64))?).render(b.alphabet_size());
            run.set("expansionOfOne", json!(one));
        }
        ShiftModel::Sofic(_) => return Err(shiftlab_core::Error::Capability("check needs a transition matrix or a β".into()).into()),
    }
    Ok(())
}

pub fn decompose(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let t = cfg.transition_system()?;
    let d = t.cyclic_classes()?;
    let mut seen = vec![0usize; t.size()];
    for c in &d.classes {
        for &s in c {
            seen[s as usize] += 1;
        }
    }
    run.check("classes are disjoint", seen.iter().all(|&c| c <= 1), format!("{} classes", d.classes.len()));
    let m = t.matrix_u8();
    let mut rotates = true;
    for a in 0..t.size() {
        for b in 0..t.size() {
            if m[a][b] == 1 {
                if let (Some(ca), Some(cb)) = (d.class_of(a as u8), d.class_of(b as u8)) {
                    rotates &= cb == (ca + 1) % d.period;
                }
            }
        }
    }
    run.check("edges advance one class", rotates, "");
    run.check("one class per residue", d.classes.len() == d.period, format!("period {}", d.period));
    run.set("period", json!(d.period));
    let classes: Vec<Value> = d.classes.iter().map(|c| json!(c)).collect();
    run.set("classes", json!(classes));
    let rows = d
        .classes
        .iter()
        .enumerate()
        .map(|(k, c)| vec![json!(k), json!(c.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))])
        .collect();
    run.table("classes", &["class", "symbols"], rows);
    Ok(())
}

fn schedule_config(cfg: &RunConfig, stages: usize) -> CliResult<ScheduleConfig> {
    let mut sc = ScheduleConfig::new(stages);
    sc.eps = RunConfig::rat("eps", &cfg.eps, sc.eps.clone())?;
    sc.delta1 = RunConfig::rat("delta1", &cfg.delta1, sc.delta1.clone())?;
    sc.alpha = cfg.alpha()?;
    sc.recurrence = cfg.recurrence;
    if let Some(k) = cfg.weak_k {
        sc.weak_k = k;
    }
    if let Some(t) = &cfg.target {
        sc.target = Word::parse(t, cfg.model()?.alphabet_size())?;
    }
    Ok(sc)
}

fn distal_seed(cfg: &RunConfig, model: &ShiftModel) -> CliResult<DistalSeed> {
    let n = model.alphabet_size();
    match &cfg.distal_seed {
        None => Ok(DistalSeed::single(model, &Word::parse("01", n)?)?),
        Some(s) => {
            let w1 = Word::parse(&s.w1, n)?;
            match &s.w2 {
                None => Ok(DistalSeed::single(model, &w1)?),
                Some(w2) => {
                    let theta = RunConfig::rat("theta", &s.theta, Rat::from_integer(int(1)))?;
                    Ok(DistalSeed::new(model, &w1, &Word::parse(w2, n)?, theta)?)
                }
            }
        }
    }
}

fn schedule_summary(fam: &ScrambleFamily) -> Value {
    let s = &fam.schedule;
    let stages: Vec<Value> = s
        .stages
        .iter()
        .map(|st| {
            json!({
                "k": st.k, "eps": r(&st.eps), "delta": r(&st.delta), "eta": r(&st.eta),
                "copy": st.copy, "gap": st.gap, "blocks": st.blocks.len(), "end": i(st.end()),
            })
        })
        .collect();
    json!({ "zeta": r(&s.zeta), "t0": r(&s.t0()), "slots": s.slot_count(), "horizon": i(&fam.horizon()), "stages": stages })
}

/// Emits members and pair reports; shared by the scrambled constructions.
fn emit_family(cfg: &RunConfig, run: &mut Run, fam: &ScrambleFamily) -> CliResult<Vec<(String, Member)>> {
    match fam.schedule.verify() {
        Ok(()) => run.check("schedule verified", true, "exact re-check before emission"),
        Err(shiftlab_core::Error::Invariant(m)) => run.check("schedule verified", false, m),
        Err(e) => return Err(e.into()),
    }
    run.set("stages", json!(fam.stages()));
    run.set("horizon", i(&fam.horizon()));
    run.set("schedule", schedule_summary(fam));
    let n = fam.model.alphabet_size();
    let mut members = Vec::new();
    for (label, xi) in labels(cfg, fam.stages())? {
        let m = fam.member(&xi)?;
        let t = fam.verify_member(&m)?;
        run.check(
            format!("trace {label}"),
            t.ok(),
            format!("{} slots, exact copies {}, exponential {}, admissible {}", t.slots, t.copies_exact, t.exponential, t.admissible),
        );
        run.json(format!("members/{label}.rle.json"), &stream_rle(&m.stream, n)?);
        members.push((label, m));
    }
    let extra = rats(&cfg.t_grid)?;
    let mut pairs = Vec::new();
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            let (la, lb) = (&members[a].0, &members[b].0);
            let rep = fam.pair_report(&members[a].1, &members[b].1, &extra)?;
            if rep.alpha.is_some() {
                run.check(format!("alpha implication {la}-{lb}"), rep.implication_holds(), "");
            }
            let mut v = chaos_report(run, &format!("pairs/{la}-{lb}"), &rep);
            v["x"] = json!(la);
            v["y"] = json!(lb);
            pairs.push(v);
        }
    }
    run.set("pairs", json!(pairs));
    Ok(members)
}

pub fn construct_dc1(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let model = cfg.model()?;
    let seed = distal_seed(cfg, &model)?;
    let k = match &cfg.kset {
        Some(k) => config::kset(k, model.alphabet_size())?,
        None => KSet::Point(seed.mu()?),
    };
    let horizon = cfg.horizon_int()?;
    let fam = fit_stages(
        cfg.stages.unwrap_or(DEFAULT_STAGES),
        horizon.as_ref(),
        |s| Ok(construct_family(&model, &k, &seed, &schedule_config(cfg, s)?)?),
        |f| f.horizon(),
    )?;
    emit_family(cfg, run, &fam)?;
    Ok(())
}

pub fn construct_level_set(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let model = cfg.model()?;
    let n = model.alphabet_size();
    let phi = Observable::cylinder(Word::parse(cfg.phi.as_deref().unwrap_or("1"), n)?);
    let a = RunConfig::rat("a", &cfg.a, rat(1, 4))?;
    let b = RunConfig::rat("b", &cfg.b, rat(1, 2))?;
    let tol = RunConfig::rat("tolerance", &cfg.tolerance, rat(1, 20))?;
    let horizon = cfg.horizon_int()?;
    let lsf = fit_stages(
        cfg.stages.unwrap_or(DEFAULT_STAGES),
        horizon.as_ref(),
        |s| Ok(level_set_family(&model, &phi, &a, &b, &schedule_config(cfg, s)?)?),
        |f| f.family.horizon(),
    )?;
    run.set("w1", json!(lsf.w1.render(n)));
    run.set("w2", json!(lsf.w2.render(n)));
    run.set("theta1", r(&lsf.theta1));
    run.set("theta2", r(&lsf.theta2));
    run.set("eps", r(&lsf.family.schedule.eps));
    let members = emit_family(cfg, run, &lsf.family)?;
    let alphabet = Alphabet::new(n)?;
    let kt = cfg.weak_k.unwrap_or(20);
    let depth = pinned_depth(alphabet, kt);
    let slack = neg_pow(2, kt);
    let mut track = Vec::new();
    let mut averages = Vec::new();
    for (label, m) in &members {
        let mut ok = true;
        for e in lsf.family.schedule.empirical() {
            let emp = FiniteMeasure::empirical(&m.stream, &e.n, depth, alphabet)?;
            let d = weak_star_distance(&emp, &e.measure, alphabet, kt)?;
            let pass = d.upper() <= &e.bound + &slack;
            ok &= pass;
            track.push(vec![json!(label), json!(e.stage), json!(e.i), i(&e.n), r(&d.value), r(&d.upper()), r(&e.bound), json!(pass)]);
        }
        run.check(format!("empirical tracking {label}"), ok, format!("weak* truncation {kt}"));
        let rep = lsf.birkhoff(m, &tol)?;
        for (t, v) in &rep.averages {
            averages.push(vec![json!(label), i(t), r(v), json!(rat_to_f64(v))]);
        }
        let verdict = match rep.verdict {
            Oscillation::Regular => "regular",
            Oscillation::Irregular { .. } => "irregular",
            Oscillation::Undetermined => "undetermined",
        };
        run.set(
            &format!("birkhoff {label}"),
            json!({
                "liminf": r(&rep.liminf), "limsup": r(&rep.limsup),
                "liminfApprox": rat_to_f64(&rep.liminf), "limsupApprox": rat_to_f64(&rep.limsup), "verdict": verdict,
            }),
        );
    }
    run.table("tracking", &["member", "stage", "block", "n", "distance", "distance_upper", "bound", "pass"], track);
    run.table("birkhoff", &["member", "n", "average", "average_approx"], averages);
    Ok(())
}

pub fn construct_polynomial(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let alpha = cfg.alpha()?.unwrap_or_else(shiftlab_core::analyze::AlphaFunction::sqrt);
    let stages = cfg.stages.unwrap_or(DEFAULT_STAGES);
    let horizon = cfg.horizon_int()?;
    let fam = polynomial_construction(&alpha, stages, horizon.as_ref())?;
    run.check("stage inequalities", fam.verify()?, "exact re-check before emission");
    let st: Vec<Value> = fam
        .stages
        .iter()
        .map(|s| json!({ "k": s.k, "a": i(&s.a), "b": i(&s.b), "c": i(&s.c), "d": s.d.iter().map(i).collect::<Vec<_>>() }))
        .collect();
    run.set("alpha", json!(alpha.name));
    run.set("stages", json!(st));
    run.set("end", i(&fam.end()));
    let mut members = Vec::new();
    for (label, xi) in labels(cfg, fam.stages.len())? {
        let x = fam.member(&xi)?;
        run.json(format!("members/{label}.rle.json"), &stream_rle(&x, 2)?);
        members.push((label, xi, x));
    }
    let mut grid = vec![rat(1, 2), rat(1, 1)];
    grid.extend(rats(&cfg.t_grid)?);
    grid.sort();
    grid.dedup();
    let mut pairs = Vec::new();
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            let ((la, xa, x), (lb, xb, y)) = (&members[a], &members[b]);
            let q = VerdictQuery {
                t0: rat(1, 2),
                t_grid: grid.clone(),
                separation: fam.separation(xa, xb),
                closeness: fam.closeness(),
                horizon: fam.end(),
                alpha: Some(alpha.clone()),
            };
            let rep = dc1_verdict(&Pair::new(x, y, ShiftMetric::Polynomial)?, &q)?;
            run.check(format!("weighted closeness {la}-{lb}"), rep.closeness.iter().all(|c| c.pass), "");
            run.check(format!("alpha implication {la}-{lb}"), rep.implication_holds(), "");
            let mut v = chaos_report(run, &format!("pairs/{la}-{lb}"), &rep);
            v["x"] = json!(la);
            v["y"] = json!(lb);
            pairs.push(v);
        }
    }
    run.set("pairs", json!(pairs));
    Ok(())
}

fn check_list(v: &[config::CheckSpec]) -> CliResult<Vec<Checkpoint>> {
    v.iter()
        .map(|c| {
            let n = c.n.trim().parse::<Int>().map_err(|_| CliError::Config(format!("checkpoint {:?} is not an integer", c.n)))?;
            let bound = parse_rat(&c.bound)?;
            Ok(match &c.t_min {
                Some(t) => Checkpoint::above(n, bound, parse_rat(t)?),
                None => Checkpoint::new(n, bound),
            })
        })
        .collect()
}

pub fn analyze_pair(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let spec = cfg.pair.clone().ok_or_else(|| CliError::Config("analyze-pair needs a pair section".into()))?;
    let n = cfg.model()?.alphabet_size();
    let (x, y) = (config::stream(&spec.x, n)?, config::stream(&spec.y, n)?);
    let metric = match spec.metric.as_deref() {
        None | Some("geometric") => ShiftMetric::geometric(n),
        Some("polynomial") => ShiftMetric::Polynomial,
        Some(m) => return Err(CliError::Config(format!("unknown metric {m:?}"))),
    };
    let diam = metric.diameter();
    let separation = check_list(&spec.separation)?;
    let mut closeness = check_list(&spec.closeness)?;
    let top = separation.iter().chain(&closeness).map(|c| c.n.clone()).max();
    let horizon = match (cfg.horizon_int()?, top) {
        (Some(h), _) => h,
        (None, Some(t)) => t,
        (None, None) => int(10_000),
    };
    if separation.is_empty() && closeness.is_empty() {
        let tol = RunConfig::rat("tolerance", &cfg.tolerance, rat(1, 100))?;
        closeness = dyadic_grid(&horizon).into_iter().map(|t| Checkpoint::new(t, tol.clone())).collect();
    }
    let mut grid = if cfg.t_grid.is_empty() { vec![&diam / rat(4, 1), &diam / rat(2, 1), diam.clone()] } else { rats(&cfg.t_grid)? };
    grid.sort();
    grid.dedup();
    let t0 = match &spec.t0 {
        Some(t) => parse_rat(t)?,
        None => &diam / rat(2, 1),
    };
    let pair = Pair::new(&x, &y, metric)?;
    let rep = dc1_verdict(&pair, &VerdictQuery { t0, t_grid: grid, separation, closeness, horizon, alpha: cfg.alpha()? })?;
    if rep.alpha.is_some() {
        run.check("alpha implication", rep.implication_holds(), "");
    }
    let v = chaos_report(run, "pair", &rep);
    run.set("pair", v);
    Ok(())
}

pub fn beta_expand_cmd(cfg: &RunConfig, run: &mut Run) -> CliResult<()> {
    let model = cfg.model()?;
    let ShiftModel::Beta(b) = &model else {
        return Err(CliError::Config("beta-expand needs a beta model".into()));
    };
    let beta = b.beta.clone().ok_or_else(|| CliError::Config("beta-expand needs an exact β".into()))?;
    let x = RunConfig::rat("value", &cfg.value, rat(1, 2))?;
    let depth = cfg.depth.unwrap_or(40);
    let digits = beta_expand(&beta, &x, depth)?;
    let (res, bound) = reconstruction(&beta, &x, &digits)?;
    let f = beta.field;
    let within = f.sign(&res) >= 0 && f.sign(&f.sub(&bound, &res)) > 0;
    run.check("0 <= residual < beta^-depth", within, format!("depth {depth}"));
    run.check("digits admissible", model.admissible(&digits)?, "");
    let n = model.alphabet_size();
    run.set("beta", json!(beta.to_string()));
    run.set("value", r(&x));
    run.set("digits", json!(digits.render(n)));
    // the residual over β^-depth is the remainder orbit point in [0, 1);
    // bisect it exactly, since floats cancel in the quadratic field
    let scaled = f.mul(&res, &f.inv(&bound)?);
    let (mut lo, mut hi) = (Rat::from_integer(int(0)), Rat::from_integer(int(1)));
    for _ in 0..30 {
        let mid = (&lo + &hi) / rat(2, 1);
        if f.sign(&f.sub(&scaled, &f.rational(mid.clone()))) >= 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let bound_f = beta.to_f64().powi(-(depth as i32));
    run.set("remainder", json!({ "lo": r(&lo), "hi": r(&hi) }));
    run.set("residualApprox", json!(rat_to_f64(&lo) * bound_f));
    run.set("boundApprox", json!(bound_f));
    run.set("expansionOfOne", json!(Word(b.one.digits(cfg.precision().min(64))?).render(n)));
    let rows = digits.symbols().iter().enumerate().map(|(k, d)| vec![json!(k + 1), json!(d)]).collect();
    run.table("digits", &["index", "digit"], rows);
    Ok(())
}

/// Re-hashes a finished run directory.
pub fn report(out: &std::path::Path) -> CliResult<Value> {
    let path = out.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let m: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let hash_ok = m["hash"].as_str() == Some(crate::output::manifest_hash(&m).as_str());
    let mut bad = Vec::new();
    for a in m["artifacts"].as_array().cloned().unwrap_or_default() {
        let name = a["path"].as_str().unwrap_or_default();
        let ok = std::fs::read(out.join(name))
            .map(|b| {
                use sha2::Digest;
                Some(crate::output::hex(&sha2::Sha256::digest(&b)).as_str()) == a["sha256"].as_str()
            })
            .unwrap_or(false);
        if !ok {
            bad.push(name.to_string());
        }
    }
    let inv = m["invariants"].as_array().cloned().unwrap_or_default();
    let passed = inv.iter().filter(|c| c["pass"] == true).count();
    let summary = json!({
        "command": m["command"],
        "status": m["status"],
        "hash": m["hash"],
        "hashValid": hash_ok,
        "artifactMismatches": bad,
        "invariantsPassed": passed,
        "invariants": inv.len(),
        "result": m["result"],
    });
    if !hash_ok || !bad.is_empty() || passed != inv.len() {
        let mut why: Vec<String> = bad.iter().map(|b| format!("artifact {b}")).collect();
        if !hash_ok {
            why.push("manifest hash".into());
        }
        if passed != inv.len() {
            why.push(format!("{} recorded invariant failures", inv.len() - passed));
        }
        eprintln!("{}", serde_json::to_string_pretty(&summary).unwrap());
        return Err(CliError::Invariant(why));
    }
    Ok(summary)
}
