use std::cmp::Ordering;
use std::path::Path;

use dreadlock::expfamily::{self, psf_check, trace_ray, traces_svg, PsfOrbit, RayApprox};
use dreadlock::itinerary::{parse_itinerary, render_itinerary};
use dreadlock::{
    cyclic_order, enumerate_addresses, itinerary_full, itinerary_left, itinerary_right, realize_itinerary, AddressPoint,
    ClassLocus, Error, ExpParam, ExtAddress, Landing, Portrait, Side, TraceConfig, Verdict,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::output::{self, float};
use crate::{Command, Format, ItineraryKind, NumericArgs, SideArg, WindowArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::InvalidPortrait(_)
            | Error::ChainOutOfRange { .. }
            | Error::EmptyPeriod
            | Error::NotDistinct
            | Error::BoundaryNeedsSide
            | Error::Overlap => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

type Out = Result<String, Failure>;

fn load(path: &Path) -> Result<Portrait, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let p = Portrait::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let report = p.validate();
    if !report.is_ok() {
        return Err(Failure::input(format!("{}: {}", path.display(), report.violations.join("; "))));
    }
    Ok(p)
}

fn address(s: &str, chains: u32) -> Result<ExtAddress, Failure> {
    let a = ExtAddress::parse(s)?;
    a.check(&dreadlock::Alphabet { chains })?;
    Ok(a)
}

fn window(w: &WindowArgs) -> Result<(i64, i64), Failure> {
    let bad = || Failure::input(format!("window `{}` is not `lo..hi`", w.window));
    let (lo, hi) = w.window.split_once("..").ok_or_else(bad)?;
    let (lo, hi): (i64, i64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn param(n: &NumericArgs) -> Result<ExpParam, Failure> {
    let lambda = match &n.lambda {
        None => Complex64::new(0.0, 2.0 * std::f64::consts::PI),
        Some(s) => {
            let bad = || Failure::input(format!("lambda `{s}` is not `re,im`"));
            let (re, im) = s.split_once(',').ok_or_else(bad)?;
            Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?)
        }
    };
    Ok(ExpParam::new(lambda)?)
}

fn config(n: &NumericArgs) -> TraceConfig {
    TraceConfig { depth: n.depth, start_potential: n.start_potential, tol: n.tol, ..TraceConfig::default() }
}

fn verdict_fields(v: &Verdict) -> (&'static str, String, String) {
    match v {
        Verdict::Point(z) => {
            let (re, im) = output::complex(*z);
            ("point", re, im)
        }
        Verdict::Tract => ("tract", String::new(), String::new()),
        Verdict::Undecided => ("undecided", String::new(), String::new()),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    let (kind, re, im) = verdict_fields(v);
    match v {
        Verdict::Point(_) => json!({ "kind": kind, "re": re, "im": im }),
        _ => json!({ "kind": kind }),
    }
}

fn write_svg(path: &Path, traces: &[(ExtAddress, RayApprox)]) -> Result<(), Failure> {
    std::fs::write(path, traces_svg(traces, (-6.0, 6.0, -20.0, 20.0)))
        .map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })
}

pub fn run(command: Command, format: Format) -> Out {
    match command {
        Command::Order { portrait, a, b, c } => {
            let chains = match portrait {
                Some(path) => load(&path)?.alphabet.chains,
                None => 1,
            };
            let (a, b) = (address(&a, chains)?, address(&b, chains)?);
            match c {
                None => {
                    let rel = match a.cmp(&b) {
                        Ordering::Less => "<",
                        Ordering::Equal => "=",
                        Ordering::Greater => ">",
                    };
                    Ok(match format {
                        Format::Tsv => format!("{rel}\n"),
                        Format::Json => output::json(&json!({ "a": a.render(chains), "b": b.render(chains), "order": rel })),
                    })
                }
                Some(c) => {
                    let c = address(&c, chains)?;
                    let between = cyclic_order(&a, &b, &c)?;
                    Ok(match format {
                        Format::Tsv => format!("{between}\n"),
                        Format::Json => output::json(&json!({
                            "a": a.render(chains), "b": b.render(chains), "c": c.render(chains), "cyclic": between
                        })),
                    })
                }
            }
        }
        Command::Sector { portrait, address: addrs, side } => {
            let p = load(&portrait.portrait)?;
            let chains = p.alphabet.chains;
            let side = match side {
                SideArg::Below => Side::Below,
                SideArg::Exact => Side::Exact,
                SideArg::Above => Side::Above,
            };
            let mut rows = Vec::new();
            for s in &addrs {
                let a = address(s, chains)?;
                let sector = p.sector_of(&AddressPoint { address: a.clone(), side })?;
                let intervals: Vec<String> = sector.intervals.iter().map(|iv| iv.render(chains)).collect();
                rows.push((a.render(chains), format!("S({})", sector.render(chains)), intervals));
            }
            Ok(match format {
                Format::Tsv => output::tsv(
                    &["address", "sector", "intervals"],
                    &rows.into_iter().map(|(a, s, iv)| vec![a, s, iv.join("; ")]).collect::<Vec<_>>(),
                ),
                Format::Json => output::json(&Value::Array(
                    rows.into_iter().map(|(a, s, iv)| json!({ "address": a, "sector": s, "intervals": iv })).collect(),
                )),
            })
        }
        Command::Itinerary { portrait, address: addrs, kind } => {
            let p = load(&portrait.portrait)?;
            let chains = p.alphabet.chains;
            let engine = match kind {
                ItineraryKind::Class => Some(Landing::new(&p)?),
                _ => None,
            };
            let mut rows = Vec::new();
            for s in &addrs {
                let a = address(s, chains)?;
                let it = match (&engine, kind) {
                    (Some(e), _) => e.class_itinerary(&a),
                    (None, ItineraryKind::Right) => itinerary_right(&a, &p),
                    (None, ItineraryKind::Full) => itinerary_full(&a, &p),
                    (None, _) => itinerary_left(&a, &p),
                };
                rows.push((a.render(chains), render_itinerary(&it, chains)));
            }
            Ok(match format {
                Format::Tsv => output::tsv(&["address", "itinerary"], &rows.into_iter().map(|(a, i)| vec![a, i]).collect::<Vec<_>>()),
                Format::Json => output::json(&Value::Array(
                    rows.into_iter().map(|(a, i)| json!({ "address": a, "itinerary": i })).collect(),
                )),
            })
        }
        Command::Equiv { portrait, a, b } => {
            let p = load(&portrait.portrait)?;
            let chains = p.alphabet.chains;
            let (a, b) = (address(&a, chains)?, address(&b, chains)?);
            let eq = Landing::new(&p)?.equivalent(&a, &b);
            Ok(match format {
                Format::Tsv => format!("{eq}\n"),
                Format::Json => output::json(&json!({ "a": a.render(chains), "b": b.render(chains), "equivalent": eq })),
            })
        }
        Command::Classes { portrait, window: w } => {
            let p = load(&portrait.portrait)?;
            let chains = p.alphabet.chains;
            let (lo, hi) = window(&w)?;
            let engine = Landing::new(&p)?;
            let addrs = enumerate_addresses(&p.alphabet, lo, hi, w.max_preperiod, w.max_period);
            let classes = engine.classes(&addrs);
            let locus = |l: ClassLocus| match l {
                ClassLocus::Plane => "plane",
                ClassLocus::Tract => "tract",
            };
            Ok(match format {
                Format::Tsv => output::tsv(
                    &["id", "preperiod", "period", "locus", "size", "members"],
                    &classes
                        .iter()
                        .map(|c| {
                            vec![
                                c.id.render(chains),
                                c.preperiod.to_string(),
                                c.period.to_string(),
                                locus(c.locus).to_string(),
                                c.members.len().to_string(),
                                c.members.iter().map(|m| m.render(chains)).collect::<Vec<_>>().join("; "),
                            ]
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Json => output::json(&Value::Array(
                    classes
                        .iter()
                        .map(|c| {
                            json!({
                                "id": c.id.render(chains),
                                "preperiod": c.preperiod,
                                "period": c.period,
                                "locus": locus(c.locus),
                                "members": c.members.iter().map(|m| m.render(chains)).collect::<Vec<_>>(),
                                "groups": c.groups.iter().map(|g| p.group_label(*g)).collect::<Vec<_>>(),
                            })
                        })
                        .collect(),
                )),
            })
        }
        Command::Realize { portrait, itinerary } => {
            let p = load(&portrait.portrait)?;
            let chains = p.alphabet.chains;
            let it = parse_itinerary(&itinerary, &p)?;
            let a = realize_itinerary(&it, &p)?;
            Ok(match format {
                Format::Tsv => format!("{}\n", a.render(chains)),
                Format::Json => output::json(&json!({ "itinerary": render_itinerary(&it, chains), "address": a.render(chains) })),
            })
        }
        Command::Trace { address: addrs, numeric, points, emit_svg } => {
            let e = param(&numeric)?;
            let cfg = config(&numeric);
            let traces = addrs
                .iter()
                .map(|s| {
                    let a = address(s, 1)?;
                    let r = trace_ray(&e, &a, &cfg)?;
                    Ok((a, r))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            if let Some(path) = &emit_svg {
                write_svg(path, &traces)?;
            }
            if points {
                return Ok(match format {
                    Format::Tsv => expfamily::traces_csv(&traces).replace(',', "\t"),
                    Format::Json => output::json(&Value::Array(
                        traces
                            .iter()
                            .map(|(a, r)| {
                                json!({
                                    "address": a.render(1),
                                    "verdict": verdict_json(&r.verdict),
                                    "points": r.points.iter().map(|z| { let (re, im) = output::complex(*z); json!([re, im]) }).collect::<Vec<_>>(),
                                })
                            })
                            .collect(),
                    )),
                });
            }
            Ok(match format {
                Format::Tsv => output::tsv(
                    &["address", "verdict", "re", "im"],
                    &traces
                        .iter()
                        .map(|(a, r)| {
                            let (k, re, im) = verdict_fields(&r.verdict);
                            vec![a.render(1), k.to_string(), re, im]
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Json => output::json(&Value::Array(
                    traces
                        .iter()
                        .map(|(a, r)| {
                            json!({ "address": a.render(1), "verdict": verdict_json(&r.verdict), "diagnostic": r.diagnostic })
                        })
                        .collect(),
                )),
            })
        }
        Command::Verify { portrait, window: w, numeric, match_tol, all, emit_svg } => {
            let p = load(&portrait.portrait)?;
            let e = param(&numeric)?;
            let cfg = config(&numeric);
            let (lo, hi) = window(&w)?;
            let psf = psf_check(&e, 64, 1e-9);
            let sample: Vec<ExtAddress> = enumerate_addresses(&p.alphabet, lo, hi, w.max_preperiod, w.max_period)
                .into_iter()
                .filter(|a| all || !a.is_periodic())
                .collect();
            let report = expfamily::verify_landing_predictions(&e, &p, &sample, &cfg, match_tol)?;
            if let Some(path) = &emit_svg {
                let traces = sample
                    .iter()
                    .map(|a| Ok((a.clone(), trace_ray(&e, a, &cfg)?)))
                    .collect::<Result<Vec<_>, Failure>>()?;
                write_svg(path, &traces)?;
            }
            let psf_text = match &psf {
                PsfOrbit::Detected { orbit, preperiod, period } => format!(
                    "orbit [{}] preperiod {preperiod} period {period}",
                    orbit.iter().map(|z| { let (re, im) = output::complex(*z); format!("{re}{}{im}i", if z.im < 0.0 { "" } else { "+" }) }).collect::<Vec<_>>().join(", ")
                ),
                PsfOrbit::NotDetected(why) => format!("not detected: {why}"),
            };
            let chains = p.alphabet.chains;
            Ok(match format {
                Format::Tsv => {
                    let mut out = output::tsv(
                        &["key", "value"],
                        &[
                            vec!["psf".into(), psf_text],
                            vec!["sample".into(), sample.len().to_string()],
                            vec!["compared".into(), report.compared.to_string()],
                            vec!["mismatches".into(), report.mismatches.len().to_string()],
                            vec!["undecided".into(), report.undecided.len().to_string()],
                            vec!["undecided_rate".into(), float(report.undecided_rate())],
                        ],
                    );
                    for m in &report.mismatches {
                        out.push_str(&format!("mismatch\t{}\t{}\t{}\t{}\n", m.s.render(chains), m.t.render(chains), m.combinatorial, m.detail));
                    }
                    out
                }
                Format::Json => output::json(&json!({
                    "psf": psf_text,
                    "sample": sample.len(),
                    "compared": report.compared,
                    "mismatches": report.mismatches.iter().map(|m| json!({
                        "s": m.s.render(chains), "t": m.t.render(chains), "combinatorial": m.combinatorial, "detail": m.detail
                    })).collect::<Vec<_>>(),
                    "undecided": report.undecided.iter().map(|a| a.render(chains)).collect::<Vec<_>>(),
                    "undecided_rate": float(report.undecided_rate()),
                })),
            })
        }
        Command::CheckSimple { portrait } => {
            let p = load(&portrait.portrait)?;
            let r = p.check_simple();
            let failures = r.failures();
            Ok(match format {
                Format::Tsv => {
                    let mut out = format!("simple\t{}\n", r.is_simple());
                    for f in &failures {
                        out.push_str(&format!("failure\t{f}\n"));
                    }
                    out
                }
                Format::Json => output::json(&json!({
                    "simple": r.is_simple(),
                    "fixed": r.fixed,
                    "minimal": r.minimal,
                    "forward_invariant": r.forward_invariant,
                    "failures": failures,
                })),
            })
        }
    }
}
