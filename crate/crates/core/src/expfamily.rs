//! Dynamic rays of `E(z) = λ·e^z` traced by pulling back along inverse
//! branches, and numerical checks of the combinatorial landing relation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::address::ExtAddress;
use crate::error::{Error, Result};
use crate::landing::Landing;
use crate::portrait::Portrait;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpParam {
    lambda: Complex64,
}

impl ExpParam {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.is_finite() {
            return Err(Error::Numerical("λ must be finite and nonzero".into()));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.lambda * z.exp()
    }

    /// `L_F(w) = log|w/λ| + i·Arg(w/λ) + 2πiF`, the branch of `E⁻¹` into strip `F`.
    pub fn inverse_branch(&self, w: Complex64, f: i64) -> Complex64 {
        let q = w / self.lambda;
        Complex64::new(q.norm().ln(), q.arg() + 2.0 * PI * f as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub depth: usize,
    pub start_potential: f64,
    pub tol: f64,
    pub tract_threshold: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self { depth: 60, start_potential: 40.0, tol: 1e-9, tract_threshold: -50.0 }
    }
}

impl TraceConfig {
    fn check(&self) -> Result<()> {
        if self.depth == 0 || !(self.tol > 0.0) || !(self.tract_threshold < 0.0) {
            return Err(Error::Numerical("need depth ≥ 1, tol > 0, tract_threshold < 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Point(Complex64),
    Tract,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayApprox {
    /// `points[0]` is the base point far out on the ray of `σ^depth(a)`;
    /// `E(points[k + 1]) = points[k]`, and the last point approximates the
    /// landing point of `a`.
    pub points: Vec<Complex64>,
    pub verdict: Verdict,
    pub diagnostic: Option<String>,
}

fn single_chain(a: &ExtAddress) -> Result<()> {
    if a.symbols().any(|s| s.chain != 0) {
        return Err(Error::Numerical("exponential rays use a single chain".into()));
    }
    Ok(())
}

const FAR_POTENTIAL: f64 = 1e8;
const TAIL_SAMPLES: usize = 24;

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// Lifts the polyline `curve` (ordered from its far end) through `E`,
/// starting in strip `f` and choosing each later branch by continuity.
fn lift_curve(param: &ExpParam, curve: &[Complex64], f: i64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(curve.len());
    let mut prev_w = curve[0] / param.lambda;
    let mut phi = prev_w.arg() + 2.0 * PI * f as f64;
    out.push(Complex64::new(prev_w.norm().ln(), phi));
    for &w in &curve[1..] {
        let q = w / param.lambda;
        let d = wrap(q.arg() - prev_w.arg());
        let steps = (d.abs() / 0.5).ceil().max(1.0) as usize;
        let mut prev_theta = prev_w.arg();
        for i in 1..=steps {
            let qi = if i == steps { q } else { prev_w + (q - prev_w) * (i as f64 / steps as f64) };
            let theta = qi.arg();
            phi += wrap(theta - prev_theta);
            prev_theta = theta;
        }
        prev_w = q;
        out.push(Complex64::new(q.norm().ln(), phi));
    }
    out
}

fn tail(from: f64, to: Complex64, f: i64) -> Vec<Complex64> {
    let lo = to.re.max(1.0);
    let mut pts: Vec<Complex64> = (0..TAIL_SAMPLES)
        .map(|i| {
            let u = from * (lo / from).powf(i as f64 / TAIL_SAMPLES as f64);
            Complex64::new(u, 2.0 * PI * f as f64)
        })
        .collect();
    if to.re < lo {
        pts.push(Complex64::new(lo, 2.0 * PI * f as f64));
    }
    pts
}

/// Orbit of the low end of the ray of `a` truncated at depth `depth`.
/// The whole ray piece is pulled back as a curve from its far-right tail,
/// so the branch at the low end follows the ray rather than the strip the
/// point happens to lie in.
fn pullback_points(param: &ExpParam, a: &ExtAddress, depth: usize, t0: f64) -> Vec<Complex64> {
    let base = Complex64::new(t0, 2.0 * PI * a.at(depth).index as f64);
    let mut curve = tail(FAR_POTENTIAL, base, a.at(depth).index);
    curve.push(base);
    let mut points = Vec::with_capacity(depth + 1);
    points.push(base);
    for k in (0..depth).rev() {
        curve = lift_curve(param, &curve, a.at(k).index);
        let low = curve[curve.len() - 1];
        points.push(low);
        if !low.is_finite() {
            break;
        }
        if k > 0 {
            let mut ext = tail(FAR_POTENTIAL, curve[0], a.at(k).index);
            ext.extend(curve);
            curve = ext;
        }
    }
    points
}

/// A point that reaches the asymptotic value before the last level has a
/// preimage at `−∞`; in double precision that shows up as `|z| ≈ 0`.
const ASYMPTOTIC_EPS: f64 = 1e-12;

fn tract_hit(points: &[Complex64], threshold: f64) -> bool {
    let n = points.len();
    points[1..].iter().any(|z| z.re.is_nan() || z.re < threshold)
        || points[1..n - 1].iter().any(|z| z.norm() < ASYMPTOTIC_EPS)
}

/// Pullback sequence of `a` to depth `cfg.depth`, with a verdict from
/// comparing it against the sequence one period shorter.
pub fn trace_ray(param: &ExpParam, a: &ExtAddress, cfg: &TraceConfig) -> Result<RayApprox> {
    cfg.check()?;
    single_chain(a)?;
    let points = pullback_points(param, a, cfg.depth, cfg.start_potential);
    if tract_hit(&points, cfg.tract_threshold) {
        return Ok(RayApprox { points, verdict: Verdict::Tract, diagnostic: None });
    }
    let last = points[points.len() - 1];
    if !last.is_finite() {
        let diagnostic = Some("pullback left the finite plane".to_string());
        return Ok(RayApprox { points, verdict: Verdict::Undecided, diagnostic });
    }
    let period = a.preperiod_period().1;
    if cfg.depth <= period {
        let diagnostic = Some("depth does not exceed the period".to_string());
        return Ok(RayApprox { points, verdict: Verdict::Undecided, diagnostic });
    }
    let shorter = pullback_points(param, a, cfg.depth - period, cfg.start_potential);
    let gap = (shorter[shorter.len() - 1] - last).norm();
    if gap < cfg.tol {
        Ok(RayApprox { points, verdict: Verdict::Point(last), diagnostic: None })
    } else {
        let diagnostic = Some(format!("estimates one period apart differ by {gap:e}"));
        Ok(RayApprox { points, verdict: Verdict::Undecided, diagnostic })
    }
}

pub fn estimate_landing(param: &ExpParam, a: &ExtAddress, cfg: &TraceConfig) -> Result<Verdict> {
    Ok(trace_ray(param, a, cfg)?.verdict)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointKind {
    Repelling(f64),
    Attracting(f64),
    Indifferent(f64),
}

impl PointKind {
    pub fn multiplier(&self) -> f64 {
        match *self {
            PointKind::Repelling(m) | PointKind::Attracting(m) | PointKind::Indifferent(m) => m,
        }
    }
}

/// Classifies a periodic point of the given period by the modulus of its
/// cycle multiplier `∏ |λ·e^{z_k}|`.
pub fn classify_periodic_point(param: &ExpParam, z: Complex64, period: usize, tol: f64) -> Result<PointKind> {
    let mut w = z;
    let mut multiplier = 1.0;
    for _ in 0..period.max(1) {
        w = param.eval(w);
        multiplier *= w.norm();
    }
    let residual = (w - z).norm();
    if !(residual < tol * z.norm().max(1.0)) {
        return Err(Error::NotFixed(residual));
    }
    Ok(if (multiplier - 1.0).abs() <= 1e-9 {
        PointKind::Indifferent(multiplier)
    } else if multiplier > 1.0 {
        PointKind::Repelling(multiplier)
    } else {
        PointKind::Attracting(multiplier)
    })
}

pub fn classify_fixed_point(param: &ExpParam, z: Complex64, tol: f64) -> Result<PointKind> {
    classify_periodic_point(param, z, 1, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsfOrbit {
    Detected { orbit: Vec<Complex64>, preperiod: usize, period: usize },
    NotDetected(String),
}

/// Iterates the singular value 0 until the orbit closes up within `tol`.
pub fn psf_check(param: &ExpParam, max_iter: usize, tol: f64) -> PsfOrbit {
    let mut orbit = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..max_iter {
        let next = param.eval(orbit[orbit.len() - 1]);
        if !next.is_finite() {
            return PsfOrbit::NotDetected(format!("orbit overflowed after {} steps", orbit.len()));
        }
        if let Some(j) = orbit.iter().position(|z| (z - next).norm() < tol) {
            let period = orbit.len() - j;
            return PsfOrbit::Detected { orbit, preperiod: j, period };
        }
        orbit.push(next);
    }
    PsfOrbit::NotDetected(format!("no cycle within {max_iter} iterations"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairMismatch {
    pub s: ExtAddress,
    pub t: ExtAddress,
    pub combinatorial: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub estimates: Vec<(ExtAddress, Verdict)>,
    /// Pairs where both verdicts were decided and compared.
    pub compared: usize,
    pub mismatches: Vec<PairMismatch>,
    pub undecided: Vec<ExtAddress>,
}

impl VerificationReport {
    pub fn undecided_rate(&self) -> f64 {
        if self.estimates.is_empty() {
            0.0
        } else {
            self.undecided.len() as f64 / self.estimates.len() as f64
        }
    }
}

/// Compares the combinatorial relation with numerical landing estimates on
/// every pair of `sample`.
pub fn verify_landing_predictions(
    param: &ExpParam,
    p: &Portrait,
    sample: &[ExtAddress],
    cfg: &TraceConfig,
    match_tol: f64,
) -> Result<VerificationReport> {
    let engine = Landing::new(p)?;
    let estimates: Vec<(ExtAddress, Verdict)> = sample
        .par_iter()
        .map(|a| Ok((a.clone(), estimate_landing(param, a, cfg)?)))
        .collect::<Result<_>>()?;
    let undecided = estimates.iter().filter(|e| e.1 == Verdict::Undecided).map(|e| e.0.clone()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..estimates.len()).flat_map(|i| (i + 1..estimates.len()).map(move |j| (i, j))).collect();
    let outcomes: Vec<(bool, Option<PairMismatch>)> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let ((s, vs), (t, vt)) = (&estimates[i], &estimates[j]);
            let comb = engine.equivalent(s, t);
            let mismatch = |detail: String| PairMismatch { s: s.clone(), t: t.clone(), combinatorial: comb, detail };
            match (vs, vt) {
                (Verdict::Undecided, _) | (_, Verdict::Undecided) => None,
                (Verdict::Point(zs), Verdict::Point(zt)) => {
                    let d = (zs - zt).norm();
                    let numeric = d < match_tol;
                    Some((true, (numeric != comb).then(|| mismatch(format!("landing points {d:e} apart")))))
                }
                (Verdict::Tract, Verdict::Tract) => Some((true, None)),
                _ => Some((true, comb.then(|| mismatch("one ray lands in the plane, the other at a tract".into())))),
            }
        })
        .collect();
    let compared = outcomes.iter().filter(|o| o.0).count();
    let mismatches = outcomes.into_iter().filter_map(|o| o.1).collect();
    Ok(VerificationReport { estimates, compared, mismatches, undecided })
}

/// `address,k,re,im` rows, one per trace point.
pub fn traces_csv(traces: &[(ExtAddress, RayApprox)]) -> String {
    let mut out = String::from("address,k,re,im\n");
    for (a, r) in traces {
        for (k, z) in r.points.iter().enumerate() {
            let _ = writeln!(out, "{},{},{:.12e},{:.12e}", a.render(1), k, z.re, z.im);
        }
    }
    out
}

/// Polylines of the traced rays, clipped to a viewport, with a dot at every
/// `Point` verdict.
pub fn traces_svg(traces: &[(ExtAddress, RayApprox)], view: (f64, f64, f64, f64)) -> String {
    let (x0, x1, y0, y1) = view;
    let (w, h) = (800.0, 800.0 * (y1 - y0) / (x1 - x0));
    let map = |z: &Complex64| ((z.re - x0) / (x1 - x0) * w, (y1 - z.im) / (y1 - y0) * h);
    let inside = |z: &Complex64| z.is_finite() && z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1;
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\">\n");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (a, r) in traces {
        let pts: Vec<String> = r
            .points
            .iter()
            .filter(|z| inside(z))
            .map(|z| {
                let (x, y) = map(z);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        if pts.len() >= 2 {
            let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"><title>{}</title></polyline>", pts.join(" "), a.render(1));
        }
        if let Verdict::Point(z) = r.verdict {
            if inside(&z) {
                let (x, y) = map(&z);
                let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"red\"/>");
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
