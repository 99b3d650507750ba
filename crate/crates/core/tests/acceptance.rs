//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use dreadlock::expfamily::*;
use dreadlock::itinerary::{itinerary_left, itinerary_right};
use dreadlock::partition::{unlinked, OneSide, SectorId, SectorSide};
use dreadlock::portrait::examples::{exponential, exponential_with, periodic_pattern, tract_and_critical};
use dreadlock::*;
use num_complex::Complex64;
use rayon::prelude::*;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn portraits() -> Vec<(&'static str, Portrait)> {
    vec![("exponential", exponential()), ("tract+critical", tract_and_critical()), ("periodic-pattern", periodic_pattern())]
}

/// Whether two partitions of the same index set coincide.
fn same_partition<A: Ord, B: Ord>(xs: &[A], ys: &[B]) -> bool {
    let mut ab: BTreeMap<&A, &B> = BTreeMap::new();
    let mut ba: BTreeMap<&B, &A> = BTreeMap::new();
    xs.iter().zip(ys).all(|(x, y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// Classes of unlink equivalence, built by comparing each address against one
/// representative per class found so far.
fn brute_force_sectors(p: &Portrait, addresses: &[ExtAddress]) -> Vec<usize> {
    let groups: Vec<Vec<ExtAddress>> = p.truncated_groups(-6, 6).into_iter().map(|g| g.1).collect();
    let related = |u: &ExtAddress, v: &ExtAddress| {
        let pair = [u.clone(), v.clone()];
        groups.iter().all(|g| unlinked(g, &pair).expect("interior addresses avoid the groups"))
    };
    let mut reps: Vec<&ExtAddress> = Vec::new();
    addresses
        .iter()
        .map(|a| match reps.par_iter().position_first(|r| related(r, a)) {
            Some(i) => i,
            None => {
                reps.push(a);
                reps.len() - 1
            }
        })
        .collect()
}

fn corpus(p: &Portrait) -> Vec<ExtAddress> {
    enumerate_addresses(&p.alphabet, -3, 3, 2, 3)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (name, p) in portraits() {
        let interior: Vec<ExtAddress> = corpus(&p).into_iter().filter(|a| !p.is_boundary(a)).collect();
        let sectors: Vec<SectorId> =
            interior.par_iter().map(|a| p.sector_of(&AddressPoint::exact(a.clone())).unwrap()).collect();
        let brute = brute_force_sectors(&p, &interior);
        check(same_partition(&sectors, &brute), format!("{name}: sector_of disagrees with the unlink closure"))?;
        let count = sectors.iter().collect::<BTreeSet<_>>().len();
        summary.push(format!("{name}: {} addresses, {count} sectors", interior.len()));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} ({:.1?})", summary.join("; "), start.elapsed()))
}

/// One-period check that the cyclic sequence `ys` is increasing up to rotation.
fn cyclically_sorted(ys: &[ExtAddress]) -> bool {
    let descents = (0..ys.len()).filter(|&i| ys[i] >= ys[(i + 1) % ys.len()]).count();
    ys.len() < 2 || descents == 1
}

fn criterion_2() -> Outcome {
    let mut triples = 0usize;
    for (name, p) in portraits() {
        let all = corpus(&p);
        let mut sectors = BTreeSet::new();
        for a in &all {
            for side in [OneSide::Minus, OneSide::Plus] {
                sectors.insert(p.sector_side_of(a, side));
            }
        }
        for sector in &sectors {
            check(sector.intervals.len() <= p.n(), format!("{name}: sector {sector} has too many intervals"))?;
            for side in [OneSide::Minus, OneSide::Plus] {
                let ss = SectorSide { sector: sector.clone(), side };
                let members: Vec<&ExtAddress> = all.iter().filter(|a| p.in_side(&ss, a)).collect();
                let images: Vec<ExtAddress> = members.iter().map(|a| a.shift()).collect();
                check(images.iter().collect::<BTreeSet<_>>().len() == images.len(), format!("{name}: σ not injective on {sector}"))?;
                check(cyclically_sorted(&images), format!("{name}: σ reverses cyclic order on {sector}"))?;
                // Direct triple checks on a deterministic spread of triples.
                let k = members.len();
                let step = (k / 12).max(1);
                for i in (0..k).step_by(step) {
                    for j in (i + 1..k).step_by(step) {
                        for l in (j + 1..k).step_by(step) {
                            triples += 1;
                            let ok = cyclic_order(&images[i], &images[j], &images[l]).unwrap();
                            check(ok, format!("{name}: triple {} {} {} not preserved", members[i], members[j], members[l]))?;
                        }
                    }
                }
                for (b, img) in members.iter().zip(&images) {
                    let back = p.sector_pullback(sector, img, side);
                    check(&back == *b, format!("{name}: pullback of σ({b}) gave {back}"))?;
                }
            }
        }
    }
    Ok(format!("{triples} triples checked directly"))
}

fn criterion_3() -> Outcome {
    let p = exponential();
    let periodic: Vec<ExtAddress> = enumerate_addresses(&p.alphabet, -2, 2, 0, 3);
    let engine = Landing::new(&p).map_err(|e| e.to_string())?;
    let classes = engine.classes(&periodic);
    let class_of: HashMap<&ExtAddress, usize> =
        classes.iter().enumerate().flat_map(|(i, c)| c.members.iter().map(move |m| (m, i))).collect();
    let by_class: Vec<usize> = periodic.iter().map(|a| class_of[a]).collect();
    let itins: Vec<String> =
        periodic.iter().map(|a| dreadlock::itinerary::render_itinerary(&itinerary_left(a, &p), 1)).collect();
    check(same_partition(&by_class, &itins), "landing classes differ from left-itinerary classes")?;
    Ok(format!("{} periodic addresses, {} classes", periodic.len(), classes.len()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let p = exponential();
    let sectors: Vec<SectorId> =
        (-2..=2).map(|f| p.sector_of(&AddressPoint::above(ExtAddress::ints(&[f], &[0]).unwrap())).unwrap()).collect();
    let mut words: Vec<Vec<usize>> = Vec::new();
    for len in 1..=3u32 {
        for code in 0..5usize.pow(len) {
            words.push((0..len).map(|i| code / 5usize.pow(i) % 5).collect());
        }
    }
    let mut realized = BTreeSet::new();
    for w in &words {
        let u = Itinerary::periodic(w.iter().map(|&i| ItineraryEntry::Sector(sectors[i].clone())).collect()).unwrap();
        let s = realize_itinerary(&u, &p).map_err(|e| format!("{w:?}: {e}"))?;
        check(itinerary_left(&s, &p) == u || itinerary_right(&s, &p) == u, format!("{w:?} realized as {s} off-itinerary"))?;
        realized.insert(s);
    }
    let report = unique_realization_report(&p, -2, 3, 1, 3).map_err(|e| e.to_string())?;
    check(report.violations.is_empty(), format!("{} targets hit several classes", report.violations.len()))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{} words, {} distinct addresses; {} targets over {} classes ({:.1?})",
        words.len(),
        realized.len(),
        report.targets,
        report.classes,
        start.elapsed()
    ))
}

fn lambda_2pi_i() -> ExpParam {
    ExpParam::new(Complex64::new(0.0, 2.0 * PI)).unwrap()
}

/// The portrait of `2πi·e^z`, with the address landing at 0 found by scanning.
fn scanned_portrait(e: &ExpParam, cfg: &TraceConfig) -> std::result::Result<Portrait, String> {
    let mut hits = Vec::new();
    for f in -3..=3 {
        for g in -3..=3 {
            let x = ExtAddress::ints(&[f], &[g]).unwrap();
            if let Verdict::Point(z) = estimate_landing(e, &x, cfg).unwrap() {
                if z.norm() < 1e-6 {
                    hits.push(x);
                }
            }
        }
    }
    match hits.as_slice() {
        [s] => Ok(exponential_with(s.clone(), 1, 1)),
        _ => Err(format!("scan for the ray landing at 0 found {hits:?}")),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let e = lambda_2pi_i();
    let cfg = TraceConfig::default();
    match psf_check(&e, 100, 1e-9) {
        PsfOrbit::Detected { orbit, preperiod: 1, period: 1 }
            if orbit.len() == 2 && orbit[0].norm() < 1e-12 && (orbit[1] - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-9 => {}
        other => return Err(format!("psf_check gave {other:?}")),
    }
    let p = scanned_portrait(&e, &cfg)?;
    let sample: Vec<ExtAddress> =
        enumerate_addresses(&p.alphabet, -2, 2, 2, 2).into_iter().filter(|a| !a.is_periodic()).collect();
    check(sample.len() >= 40, "sample too small")?;
    let report = verify_landing_predictions(&e, &p, &sample, &cfg, 1e-6).map_err(|e| e.to_string())?;
    if let Some(m) = report.mismatches.first() {
        return Err(format!("{} mismatches, first {} / {}: {}", report.mismatches.len(), m.s, m.t, m.detail));
    }
    let rate = report.undecided_rate();
    check(rate <= 0.2, format!("undecided rate {:.1}%", 100.0 * rate))?;
    within(start, Duration::from_secs(120))?;
    let tract = report.estimates.iter().filter(|e| e.1 == Verdict::Tract).count();
    Ok(format!(
        "s¹ = {}, {} addresses ({} tract), {} pairs compared, 0 mismatches, undecided {:.1}% ({:.1?})",
        p.s(1).render(1),
        sample.len(),
        tract,
        report.compared,
        100.0 * rate,
        start.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let e = lambda_2pi_i();
    let cfg = TraceConfig::default();
    let mut points = 0;
    let mut min_multiplier = f64::INFINITY;
    for a in enumerate_addresses(&Alphabet::default(), -2, 2, 0, 3) {
        if let Verdict::Point(z) = estimate_landing(&e, &a, &cfg).unwrap() {
            let kind = classify_periodic_point(&e, z, a.preperiod_period().1, 1e-6).map_err(|err| format!("{a}: {err}"))?;
            let m = kind.multiplier();
            check(matches!(kind, PointKind::Repelling(_)) && m > 1.0 + 1e-6, format!("{a} lands at {z} with multiplier {m}"))?;
            points += 1;
            min_multiplier = min_multiplier.min(m);
        }
    }
    check(points > 0, "no periodic landing points")?;
    Ok(format!("{points} periodic landing points, smallest multiplier {min_multiplier:.4}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0usize;
    for (name, p) in portraits() {
        let engine = Landing::new(&p).map_err(|e| e.to_string())?;
        let addresses = enumerate_addresses(&p.alphabet, -2, 2, 2, 3);
        let classes = engine.classes(&addresses);
        for c in &classes {
            check(
                c.members.iter().all(|m| m.preperiod_period() == (c.preperiod, c.period)),
                format!("{name}: class {} mixes orbit types", c.id),
            )?;
        }
        let class_of: HashMap<&ExtAddress, usize> =
            classes.iter().enumerate().flat_map(|(i, c)| c.members.iter().map(move |m| (m, i))).collect();
        let mut by_type: BTreeMap<(usize, usize), Vec<&ExtAddress>> = BTreeMap::new();
        for a in &addresses {
            by_type.entry(a.preperiod_period()).or_default().push(a);
        }
        for group in by_type.values() {
            let bad = (0..group.len()).into_par_iter().find_map_any(|i| {
                (i + 1..group.len()).find_map(|j| {
                    let (s, t) = (group[i], group[j]);
                    (engine.equivalent(s, t) != (class_of[s] == class_of[t])).then(|| format!("{name}: {s} vs {t}"))
                })
            });
            if let Some(b) = bad {
                return Err(format!("decider and closure disagree on {b}"));
            }
            pairs += group.len() * (group.len() - 1) / 2;
        }
    }
    Ok(format!("{pairs} same-type pairs agree ({:.1?})", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    let mut all = portraits();
    all.push(("2πi", exponential_with(ExtAddress::ints(&[0], &[1]).unwrap(), 1, 1)));
    for (name, p) in all {
        for a in corpus(&p) {
            if !a.is_periodic() {
                checked += 1;
                check(!itinerary_left(&a, &p).is_periodic(), format!("{name}: {a} has a periodic left itinerary"))?;
            }
        }
    }
    Ok(format!("{checked} strictly preperiodic addresses"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("sector oracle equivalence", criterion_1),
        ("sector structure and pullbacks", criterion_2),
        ("periodic landing by itinerary", criterion_3),
        ("itinerary realization", criterion_4),
        ("numerical landing at 2πi", criterion_5),
        ("repelling landing points", criterion_6),
        ("decider matches closure", criterion_7),
        ("no periodic itinerary for preperiodic addresses", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
