//! The acceptance suite: nine property checks with exact integer targets,
//! run on seeded samples. Output is deterministic for a given seed.

use std::fmt::Write as _;

use serde::Serialize;

use crate::datum::{
    generate_stable, AdhmDatum, DimVector, EnhancedDatum, EnhancedMaps, GaugeElement, GenerationStyle,
};
use crate::deformation::{build_complex, cohomology_dims, stabilizer_dim, Variant};
use crate::error::Result;
use crate::geometry::{ambient_tangent_dim, balance_flow, degeneracy_scan, moment_map, FlowOptions};
use crate::linalg::{self, c, eye, hstack, CMat, C64, DEFAULT_RTOL, MIN_GAP_RATIO};
use crate::moduli_maps::{
    fiber_lift, fiber_lift_report, fingerprint, joint_spectrum, monad_ranks, nested_hilbert_datum,
    nested_hilbert_points, quotient_rep, quotient_support, random_nested, vandermonde_frame, MonadPencil,
};
use crate::rng::{self, derive_seed};
use crate::stability::is_stable;

/// Dimension vectors of the equation, stability and cohomology checks.
pub const SAMPLE_DIMS: [(usize, usize, usize); 6] = [(1, 1, 1), (1, 2, 1), (1, 3, 1), (2, 2, 1), (2, 3, 1), (3, 2, 1)];
pub const SAMPLES_PER_DIMS: usize = 50;
pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_RESAMPLE_RATE: f64 = 0.01;
const FINGERPRINT_TOL: f64 = 1e-8;
const SUPPORT_TOL: f64 = 1e-6;
const POINT_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-6;
const FLOW_SUCCESS_RATE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// One line per criterion.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "criterion {} {} {}: {}",
                o.id,
                if o.passed { "PASS" } else { "FAIL" },
                o.title,
                o.detail
            );
        }
        out
    }
}

fn title(id: u8) -> &'static str {
    match id {
        1 => "equations and stability",
        2 => "reduced cohomology",
        3 => "gauge freeness",
        4 => "quotient and fiber round trip",
        5 => "monad ranks and support",
        6 => "nested Hilbert round trip",
        7 => "moment maps and flow",
        8 => "degeneracy of omega",
        9 => "determinism",
        _ => "unknown",
    }
}

/// Runs all nine criteria.
pub fn run(seed: u64) -> AcceptanceReport {
    run_selected(seed, &CRITERIA)
}

/// Runs the listed criteria in increasing order. Determinism (9) repeats the
/// other selected criteria, or all of them when none is selected, and compares
/// the rendered output byte for byte.
pub fn run_selected(seed: u64, ids: &[u8]) -> AcceptanceReport {
    let mut wanted: Vec<u8> = CRITERIA.iter().copied().filter(|k| ids.contains(k)).collect();
    wanted.dedup();
    let base: Vec<u8> = wanted.iter().copied().filter(|&k| k != 9).collect();
    let mut outcomes: Vec<CriterionOutcome> = evaluate(seed, &base);
    if wanted.contains(&9) {
        let repeat_ids: Vec<u8> = if base.is_empty() { CRITERIA[..8].to_vec() } else { base.clone() };
        let first = if base.is_empty() {
            evaluate(seed, &repeat_ids)
        } else {
            outcomes.clone()
        };
        let second = evaluate(seed, &repeat_ids);
        let render = |o: &[CriterionOutcome]| {
            AcceptanceReport {
                seed,
                outcomes: o.to_vec(),
            }
            .render()
        };
        let (a, b) = (render(&first), render(&second));
        outcomes.push(CriterionOutcome {
            id: 9,
            title: title(9),
            passed: a == b,
            detail: format!(
                "{} criteria repeated, {} of {} bytes identical",
                repeat_ids.len(),
                a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count(),
                a.len().max(b.len())
            ),
        });
    }
    AcceptanceReport { seed, outcomes }
}

fn evaluate(seed: u64, ids: &[u8]) -> Vec<CriterionOutcome> {
    let samples = if ids.iter().any(|k| matches!(k, 1 | 2 | 3 | 7)) {
        Some(stable_samples(seed))
    } else {
        None
    };
    let samples = samples.as_ref();
    ids.iter()
        .map(|&id| {
            let (passed, detail) = match id {
                1 => equations_and_stability(samples.unwrap()),
                2 => reduced_cohomology(seed, samples.unwrap()),
                3 => gauge_freeness(samples.unwrap()),
                4 => quotient_round_trip(seed),
                5 => monad_and_support(seed),
                6 => nested_hilbert(seed),
                7 => moment_maps_and_flow(seed, samples.unwrap()),
                8 => omega_degeneracy(seed),
                _ => (false, "unknown criterion".to_string()),
            };
            CriterionOutcome {
                id,
                title: title(id),
                passed,
                detail,
            }
        })
        .collect()
}

struct Sample {
    dims: DimVector,
    seed: u64,
    style: GenerationStyle,
    datum: Result<EnhancedDatum>,
}

fn sample_style(dims: DimVector, k: usize) -> GenerationStyle {
    if (dims.r, dims.c, dims.cprime) == (1, 2, 1) {
        GenerationStyle::ALL[k % GenerationStyle::ALL.len()]
    } else if k.is_multiple_of(2) {
        GenerationStyle::Lifted
    } else {
        GenerationStyle::Diagonal
    }
}

fn stable_samples(seed: u64) -> Vec<Sample> {
    let mut out = Vec::with_capacity(SAMPLE_DIMS.len() * SAMPLES_PER_DIMS);
    for (di, &(r, cc, cp)) in SAMPLE_DIMS.iter().enumerate() {
        let dims = DimVector { r, c: cc, cprime: cp };
        let base = derive_seed(seed, 100 + di as u64);
        for k in 0..SAMPLES_PER_DIMS {
            let s = derive_seed(base, k as u64);
            let style = sample_style(dims, k);
            out.push(Sample {
                dims,
                seed: s,
                style,
                datum: generate_stable(dims, s, style),
            });
        }
    }
    out
}

fn scale(x: &EnhancedDatum) -> f64 {
    1.0 + x.norm_sqr()
}

fn equations_and_stability(samples: &[Sample]) -> (bool, String) {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for s in samples {
        match &s.datum {
            Err(e) => failures.push(format!("{} seed {}: {e}", s.dims, s.seed)),
            Ok(x) => {
                let rel = x.residuals().max() / scale(x);
                worst = worst.max(rel);
                if rel > RESIDUAL_TOL {
                    failures.push(format!("{} seed {}: residual {rel:.3e}", s.dims, s.seed));
                }
                if !is_stable(x).is_stable() {
                    failures.push(format!("{} seed {}: not stable", s.dims, s.seed));
                }
                if x.g().iter().any(|z| *z != c(0.0, 0.0)) {
                    failures.push(format!("{} seed {}: G is nonzero", s.dims, s.seed));
                }
            }
        }
    }
    summarize(
        failures,
        format!("{} samples, worst relative residual {worst:.3e}, G = 0 exactly", samples.len()),
    )
}

fn reduced_cohomology(seed: u64, samples: &[Sample]) -> (bool, String) {
    let mut failures = Vec::new();
    let mut resamples = 0usize;
    let mut worst_gap = f64::INFINITY;
    for s in samples {
        let d = s.dims;
        let want = [0, 2 * d.r * d.c - d.r + 1, 0, 0];
        let mut current = s.datum.as_ref().ok().cloned();
        let mut attempt = 0u64;
        loop {
            let Some(x) = current.as_ref() else {
                failures.push(format!("{d} seed {}: no datum", s.seed));
                break;
            };
            let rep = match build_complex(x, Variant::ReducedCprime1) {
                Ok(k) => cohomology_dims(&k, DEFAULT_RTOL),
                Err(e) => {
                    failures.push(format!("{d} seed {}: {e}", s.seed));
                    break;
                }
            };
            if rep.min_gap_ratio < MIN_GAP_RATIO && attempt < 3 {
                resamples += 1;
                attempt += 1;
                current = generate_stable(d, derive_seed(s.seed ^ seed, attempt), s.style).ok();
                continue;
            }
            worst_gap = worst_gap.min(rep.min_gap_ratio);
            if rep.h != want || rep.min_gap_ratio < MIN_GAP_RATIO {
                failures.push(format!(
                    "{d} seed {}: h = {:?}, expected {:?}, gap {:.3e}",
                    s.seed, rep.h, want, rep.min_gap_ratio
                ));
            }
            break;
        }
    }
    let rate = resamples as f64 / samples.len() as f64;
    if rate > MAX_RESAMPLE_RATE {
        failures.push(format!("resample rate {rate:.3} above {MAX_RESAMPLE_RATE}"));
    }
    summarize(
        failures,
        format!(
            "{} samples, h1 = 2rc-r+1 in every case, smallest gap ratio {worst_gap:.3e}, {resamples} resamples",
            samples.len()
        ),
    )
}

/// `(1,2,1)` datum with `I = e₁`, `F = e₂`: the line `⟨e₁⟩` is invariant and
/// `(diag(0,1), 1)` fixes it.
pub fn unstable_with_invariant_line() -> EnhancedDatum {
    let (z, one) = (c(0.0, 0.0), c(1.0, 0.0));
    EnhancedDatum::new(
        DimVector { r: 1, c: 2, cprime: 1 },
        EnhancedMaps {
            a: CMat::from_row_slice(2, 2, &[z, z, z, one]),
            b: linalg::zeros(2, 2),
            i: CMat::from_column_slice(2, 1, &[one, z]),
            j: linalg::zeros(1, 2),
            aprime: CMat::from_element(1, 1, one),
            bprime: linalg::zeros(1, 1),
            f: CMat::from_column_slice(2, 1, &[z, one]),
            g: linalg::zeros(1, 2),
        },
    )
    .expect("shapes are consistent")
}

fn gauge_freeness(samples: &[Sample]) -> (bool, String) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for s in samples {
        if let Ok(x) = &s.datum {
            checked += 1;
            let k = stabilizer_dim(x);
            if k != 0 {
                failures.push(format!("{} seed {}: stabilizer dimension {k}", s.dims, s.seed));
            }
        }
    }
    let bad = unstable_with_invariant_line();
    let k_bad = stabilizer_dim(&bad);
    if k_bad < 1 || is_stable(&bad).is_stable() {
        failures.push(format!("unstable datum: stabilizer dimension {k_bad}"));
    }
    summarize(
        failures,
        format!("stabilizer 0 on {checked} stable samples, {k_bad} on the unstable datum"),
    )
}

fn random_quotient(r: usize, c2: usize, seed: u64) -> Result<AdhmDatum> {
    let dims = DimVector { r, c: c2, cprime: 0 };
    Ok(generate_stable(dims, seed, GenerationStyle::Lifted)?.adhm_part())
}

fn quotient_round_trip(seed: u64) -> (bool, String) {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for (qi, &(r, c2)) in [(1usize, 1usize), (1, 2), (2, 2)].iter().enumerate() {
        let base = derive_seed(seed, 200 + qi as u64);
        for k in 0..50u64 {
            total += 1;
            let s = derive_seed(base, k);
            let cp = 1 + (k as usize % 2);
            let outcome = (|| -> Result<(f64, usize, usize)> {
                let x2 = random_quotient(r, c2, s)?;
                let frame = vandermonde_frame(cp, derive_seed(s, 1))?;
                let rep = fiber_lift_report(&x2, &frame.aprime, &frame.bprime, derive_seed(s, 2))?;
                let mut g = rng::seeded(derive_seed(s, 3));
                let h = GaugeElement::random_near_identity(rep.datum.dims(), 0.5, 0.05, &mut g);
                let back = quotient_rep(&rep.datum.act(&h)?)?;
                let dev = fingerprint(&back.a, &back.b).deviation(&fingerprint(&x2.a, &x2.b));
                Ok((dev, rep.kernel_dim, rep.generic_kernel_dim))
            })();
            match outcome {
                Err(e) => failures.push(format!("(r,c'')=({r},{c2}) seed {s}: {e}")),
                Ok((dev, kd, analytic)) => {
                    worst = worst.max(dev);
                    let c_full = c2 + cp;
                    if dev > FINGERPRINT_TOL {
                        failures.push(format!("(r,c'')=({r},{c2}) seed {s}: fingerprint deviation {dev:.3e}"));
                    }
                    if kd != analytic || (cp == 1 && kd < c_full + r - 1) {
                        failures.push(format!(
                            "(r,c'')=({r},{c2}) seed {s}: ker L = {kd}, analytic {analytic}"
                        ));
                    }
                }
            }
        }
    }
    summarize(
        failures,
        format!("{total} gauge-moved lifts, dim ker L = c'(c''+r) in every case, worst fingerprint deviation {worst:.3e}"),
    )
}

/// Smallest singular value of `β_Z(x, y, 1) = [−B′ − y, A′ + x]`, the monad of
/// the kernel representation `(V′, A′, B′)`; it drops rank exactly on the support.
fn support_pencil_sigma(x: &EnhancedDatum, px: C64, py: C64) -> f64 {
    let p = x.dims().cprime;
    let left = -(x.bprime() + eye(p) * py);
    let right = x.aprime() + eye(p) * px;
    linalg::singular_values(&hstack(&[&left, &right]))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Grid search with zoom over `(Re x, Im x, Re y, Im y)` for the point where
/// the support pencil drops rank.
fn grid_support_oracle(x: &EnhancedDatum) -> (C64, C64, f64) {
    const STEPS: i32 = 3;
    let mut center = [0.0f64; 4];
    let mut half = 2.0;
    let mut best = (f64::INFINITY, center);
    while half > 1e-10 {
        let h = half / STEPS as f64;
        for a in -STEPS..=STEPS {
            for b in -STEPS..=STEPS {
                for cc in -STEPS..=STEPS {
                    for d in -STEPS..=STEPS {
                        let p = [
                            center[0] + a as f64 * h,
                            center[1] + b as f64 * h,
                            center[2] + cc as f64 * h,
                            center[3] + d as f64 * h,
                        ];
                        let s = support_pencil_sigma(x, c(p[0], p[1]), c(p[2], p[3]));
                        if s < best.0 {
                            best = (s, p);
                        }
                    }
                }
            }
        }
        center = best.1;
        half = h;
    }
    (c(center[0], center[1]), c(center[2], center[3]), best.0)
}

fn monad_and_support(seed: u64) -> (bool, String) {
    let mut failures = Vec::new();
    let mut rank_checks = 0;
    for (di, &(r, cc, cp)) in SAMPLE_DIMS.iter().enumerate() {
        let dims = DimVector { r, c: cc, cprime: cp };
        for k in 0..5u64 {
            let s = derive_seed(derive_seed(seed, 300 + di as u64), k);
            let x = match generate_stable(dims, s, sample_style(dims, k as usize)) {
                Ok(x) => x,
                Err(e) => {
                    failures.push(format!("{dims} seed {s}: {e}"));
                    continue;
                }
            };
            let pencil = MonadPencil::new(x.adhm_part());
            let mut g = rng::seeded(derive_seed(s, 1));
            let xs: Vec<C64> = (0..10).map(|_| rng::complex_box(&mut g)).collect();
            let ys: Vec<C64> = (0..10).map(|_| rng::complex_box(&mut g)).collect();
            for &px in &xs {
                for &py in &ys {
                    rank_checks += 1;
                    match monad_ranks(&pencil, [px, py, c(1.0, 0.0)], DEFAULT_RTOL) {
                        Ok(m) if m.beta.rank == cc => {}
                        Ok(m) => failures.push(format!("{dims} seed {s}: rank beta {} at ({px}, {py})", m.beta.rank)),
                        Err(e) => failures.push(format!("{dims} seed {s}: {e}")),
                    }
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut supports = 0;
    for (qi, &(r, c2)) in [(1usize, 1usize), (1, 2), (2, 2)].iter().enumerate() {
        for k in 0..5u64 {
            let s = derive_seed(derive_seed(seed, 310 + qi as u64), k);
            let outcome = (|| -> Result<(f64, usize)> {
                let x2 = random_quotient(r, c2, s)?;
                let mut g = rng::seeded(derive_seed(s, 1));
                let (alpha, beta) = (rng::complex_box(&mut g), rng::complex_box(&mut g));
                let ap = CMat::from_element(1, 1, alpha);
                let bp = CMat::from_element(1, 1, beta);
                let x = fiber_lift(&x2, &ap, &bp, derive_seed(s, 2))?;
                let support = quotient_support(&x)?;
                let (ox, oy, _) = grid_support_oracle(&x);
                let expected = (-alpha, -beta);
                let mut dev = (ox - expected.0).norm().max((oy - expected.1).norm());
                if support.points.len() != 1 || support.length() != 1 {
                    return Ok((f64::INFINITY, support.points.len()));
                }
                let p = support.points[0];
                dev = dev.max((p.x - ox).norm().max((p.y - oy).norm()));
                dev = dev.max((p.x - expected.0).norm().max((p.y - expected.1).norm()));
                Ok((dev, 1))
            })();
            supports += 1;
            match outcome {
                Ok((dev, 1)) if dev <= SUPPORT_TOL => worst = worst.max(dev),
                Ok((dev, n)) => failures.push(format!("(r,c'')=({r},{c2}) seed {s}: {n} points, deviation {dev:.3e}")),
                Err(e) => failures.push(format!("(r,c'')=({r},{c2}) seed {s}: {e}")),
            }
        }
    }
    summarize(
        failures,
        format!(
            "rank beta = c at {rank_checks} grid points, {supports} supports match the grid oracle within {worst:.3e}"
        ),
    )
}

fn nested_hilbert(seed: u64) -> (bool, String) {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut g = rng::seeded(derive_seed(seed, 400));
    for k in 0..100usize {
        let n = k % 5;
        let l = if n == 0 { 1 + (k / 5) % 2 } else { (k / 5) % 3 };
        let outcome = (|| -> Result<f64> {
            let (z1, z2) = random_nested(n, l, &mut g)?;
            let x = nested_hilbert_datum(&z1, &z2)?;
            let mut bad = Vec::new();
            if !x.is_valid(RESIDUAL_TOL) {
                bad.push("invalid");
            }
            if !is_stable(&x).is_stable() {
                bad.push("unstable");
            }
            if x.j().iter().any(|z| *z != c(0.0, 0.0)) {
                bad.push("J nonzero");
            }
            let q = quotient_rep(&x)?;
            if !q.is_valid(RESIDUAL_TOL) || q.j.iter().any(|z| z.norm() > RESIDUAL_TOL) {
                bad.push("quotient invalid");
            }
            if !bad.is_empty() {
                return Err(crate::Error::Precondition(bad.join(", ")));
            }
            let (w1, w2) = nested_hilbert_points(&x)?;
            let d1 = w1.sorted().distance(&z1.sorted());
            let d2 = w2.sorted().distance(&z2.sorted());
            match (d1, d2) {
                (Some(a), Some(b)) => Ok(a.max(b)),
                _ => Ok(f64::INFINITY),
            }
        })();
        match outcome {
            Ok(d) if d <= POINT_TOL => worst = worst.max(d),
            Ok(d) => failures.push(format!("config {k} (n={n}, l={l}): deviation {d:.3e}")),
            Err(e) => failures.push(format!("config {k} (n={n}, l={l}): {e}")),
        }
    }
    summarize(failures, format!("100 configurations, worst coordinate deviation {worst:.3e}"))
}

fn moment_maps_and_flow(seed: u64, samples: &[Sample]) -> (bool, String) {
    let mut failures = Vec::new();
    let mut worst_c: f64 = 0.0;
    for s in samples {
        if let Ok(x) = &s.datum {
            let rel = moment_map(x).complex_norm() / scale(x);
            worst_c = worst_c.max(rel);
            if rel > RESIDUAL_TOL {
                failures.push(format!("{} seed {}: complex moment {rel:.3e}", s.dims, s.seed));
            }
        }
    }
    let mut converged = 0usize;
    let mut runs = 0usize;
    let mut worst_spec: f64 = 0.0;
    let mut dim_checks = 0usize;
    for (di, dims) in [DimVector { r: 1, c: 2, cprime: 1 }, DimVector { r: 2, c: 2, cprime: 1 }]
        .into_iter()
        .enumerate()
    {
        for k in 0..20u64 {
            let s = derive_seed(derive_seed(seed, 500 + di as u64), k);
            let style = if k % 2 == 0 { GenerationStyle::Lifted } else { GenerationStyle::Diagonal };
            let x = match generate_stable(dims, s, style) {
                Ok(x) => x,
                Err(e) => {
                    failures.push(format!("{dims} seed {s}: {e}"));
                    continue;
                }
            };
            runs += 1;
            let out = balance_flow(&x, &FlowOptions::new(dims));
            if out.converged {
                converged += 1;
            }
            let spectra = (|| -> Result<f64> {
                let a = joint_spectrum(x.a(), x.b())?.distance(&joint_spectrum(out.datum.a(), out.datum.b())?);
                let b = joint_spectrum(x.aprime(), x.bprime())?
                    .distance(&joint_spectrum(out.datum.aprime(), out.datum.bprime())?);
                Ok(match (a, b) {
                    (Some(a), Some(b)) => a.max(b),
                    _ => f64::INFINITY,
                })
            })();
            match spectra {
                Ok(d) if d <= SPECTRUM_TOL => worst_spec = worst_spec.max(d),
                Ok(d) => failures.push(format!("{dims} seed {s}: spectra moved by {d:.3e}")),
                Err(e) => failures.push(format!("{dims} seed {s}: {e}")),
            }
            if k < 10 {
                dim_checks += 1;
                let amb = ambient_tangent_dim(&x, DEFAULT_RTOL);
                if amb.value != amb.expected || amb.expected != 2 * (dims.c * (dims.r + dims.cprime)) as i64 {
                    failures.push(format!(
                        "{dims} seed {s}: ambient dimension {} expected {}",
                        amb.value, amb.expected
                    ));
                }
            }
        }
    }
    let rate = if runs == 0 { 0.0 } else { converged as f64 / runs as f64 };
    if rate < FLOW_SUCCESS_RATE {
        failures.push(format!("flow converged on {converged}/{runs}"));
    }
    summarize(
        failures,
        format!(
            "complex moment <= {worst_c:.3e}, flow converged {converged}/{runs}, spectra within {worst_spec:.3e}, \
             ambient dimension 2c(r+c') at {dim_checks} points"
        ),
    )
}

fn omega_degeneracy(seed: u64) -> (bool, String) {
    let dims = DimVector { r: 1, c: 2, cprime: 1 };
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (si, style) in [GenerationStyle::Diagonal, GenerationStyle::Jordan, GenerationStyle::JordanMixed]
        .into_iter()
        .enumerate()
    {
        let scan = match degeneracy_scan(dims, style, 20, derive_seed(seed, 600 + si as u64)) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("{style}: {e}"));
                continue;
            }
        };
        for row in &scan.rows {
            let rank_ok = match style {
                GenerationStyle::Diagonal => row.omega_rank == 4,
                _ => row.omega_rank < 4,
            };
            if !rank_ok || row.well_definedness_residual > 1e-8 {
                failures.push(format!(
                    "{style} sample {}: rank {}, well-definedness {:.3e}",
                    row.sample, row.omega_rank, row.well_definedness_residual
                ));
            }
        }
        let hist: Vec<String> = scan.histogram.iter().map(|(r, n)| format!("rank {r} x{n}")).collect();
        parts.push(format!("{style}: {}", hist.join(" ")));
    }
    summarize(failures, parts.join("; "))
}

fn summarize(failures: Vec<String>, ok: String) -> (bool, String) {
    if failures.is_empty() {
        (true, ok)
    } else {
        let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
        (false, format!("{} failures: {}", failures.len(), shown.join("; ")))
    }
}
