//! The ambient space of solutions of `[A,B] + IJ + FG = 0`,
//! `[A',B'] − GF = 0`: moment maps, a balancing flow, the tangent dimension
//! of the ambient quotient, and the 2-form Ω on `H¹`.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::datum::{
    generate_stable, matrix_to_json, DimVector, EnhancedDatum, GaugeElement, GenerationStyle, StabilityParameter,
};
use crate::deformation::{apply_d0, tangent_basis, TangentVector, Variant};
use crate::error::{Error, Result};
use crate::linalg::{self, commutator, eye, fro, fro_sqr, trace, CMat, CVec, RankDecision, C64, DEFAULT_RTOL};
use crate::rng::{self, derive_seed};

/// Frobenius norms of `[A,B] + IJ + FG` and `[A',B'] − GF`.
pub fn ambient_residuals(x: &EnhancedDatum) -> (f64, f64) {
    let (on_v, on_vp) = complex_moment(x);
    (fro(&on_v), fro(&on_vp))
}

fn complex_moment(x: &EnhancedDatum) -> (CMat, CMat) {
    (
        commutator(x.a(), x.b()) + x.i() * x.j() + x.f() * x.g(),
        commutator(x.aprime(), x.bprime()) - x.g() * x.f(),
    )
}

/// Real moment map as a hermitian pair, and the complex moment map.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentValue {
    pub mu_v: CMat,
    pub mu_vprime: CMat,
    pub muc_v: CMat,
    pub muc_vprime: CMat,
}

impl MomentValue {
    pub fn real_norm(&self) -> f64 {
        (fro_sqr(&self.mu_v) + fro_sqr(&self.mu_vprime)).sqrt()
    }

    pub fn complex_norm(&self) -> f64 {
        (fro_sqr(&self.muc_v) + fro_sqr(&self.muc_vprime)).sqrt()
    }

    /// `‖μ₁ − ζ‖_F`.
    pub fn distance_to(&self, level: &MomentLevel) -> f64 {
        let (hv, hvp) = level.shifted(self);
        (fro_sqr(&hv) + fro_sqr(&hvp)).sqrt()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "muV": matrix_to_json(&self.mu_v),
            "muVprime": matrix_to_json(&self.mu_vprime),
            "muC_V": matrix_to_json(&self.muc_v),
            "muC_Vprime": matrix_to_json(&self.muc_vprime),
        })
    }
}

/// `μ₁ = ([A,A†]+[B,B†]+II†−J†J+FF†−G†G, [A',A'†]+[B',B'†]−F†F+GG†)` and
/// `μ_C = −([A,B]+IJ+FG, [A',B']−GF)`, scalar prefactors dropped.
pub fn moment_map(x: &EnhancedDatum) -> MomentValue {
    let adj = |m: &CMat| m.adjoint();
    let (a, b, i, j, f, g) = (x.a(), x.b(), x.i(), x.j(), x.f(), x.g());
    let (ap, bp) = (x.aprime(), x.bprime());
    let mu_v = commutator(a, &adj(a)) + commutator(b, &adj(b)) + i * adj(i) - adj(j) * j + f * adj(f)
        - adj(g) * g;
    let mu_vprime = commutator(ap, &adj(ap)) + commutator(bp, &adj(bp)) - adj(f) * f + g * adj(g);
    let (cv, cvp) = complex_moment(x);
    MomentValue {
        mu_v,
        mu_vprime,
        muc_v: -cv,
        muc_vprime: -cvp,
    }
}

/// Central level `(ζ·1_V, ζ'·1_V')` of the real moment map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentLevel {
    pub zeta_v: f64,
    pub zeta_vprime: f64,
}

impl MomentLevel {
    pub fn zero() -> Self {
        MomentLevel {
            zeta_v: 0.0,
            zeta_vprime: 0.0,
        }
    }

    /// `(−θ, −θ')`: the level whose unitary quotient matches the Θ-stable
    /// quotient.
    pub fn from_stability(theta: &StabilityParameter) -> Self {
        let f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
        MomentLevel {
            zeta_v: -f(theta.theta),
            zeta_vprime: -f(theta.thetaprime),
        }
    }

    pub fn default_for(dims: DimVector) -> Self {
        Self::from_stability(&StabilityParameter::default_for(dims))
    }

    fn shifted(&self, mu: &MomentValue) -> (CMat, CMat) {
        let n = mu.mu_v.nrows();
        let p = mu.mu_vprime.nrows();
        (
            &mu.mu_v - eye(n) * C64::new(self.zeta_v, 0.0),
            &mu.mu_vprime - eye(p) * C64::new(self.zeta_vprime, 0.0),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowOptions {
    pub max_iters: usize,
    /// Stop once `‖μ₁ − ζ‖ ≤ tol · (1 + ‖X‖²)`.
    pub tol: f64,
    pub level: MomentLevel,
}

impl FlowOptions {
    pub fn new(dims: DimVector) -> Self {
        FlowOptions {
            max_iters: 100_000,
            tol: 1e-8,
            level: MomentLevel::default_for(dims),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowOutcome {
    pub datum: EnhancedDatum,
    pub iterations: usize,
    pub converged: bool,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// `‖μ₁ − ζ‖` after every accepted step, starting with the input.
    pub history: Vec<f64>,
    /// Cumulative gauge transformation applied to the input.
    pub gauge: GaugeElement,
}

impl FlowOutcome {
    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn into_result(self) -> Result<FlowOutcome> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Flow {
                iterations: self.iterations,
                norm: self.final_norm,
            })
        }
    }
}

const MAX_HALVINGS: usize = 60;

/// Gradient flow of `‖μ₁ − ζ‖²` along the complexified gauge orbit:
/// `X ← exp(−εH)·X` with `H = μ₁(X) − ζ`, backtracking on `ε` from
/// `1 / (1 + σ_max(H)²)`.
pub fn balance_flow(x: &EnhancedDatum, opts: &FlowOptions) -> FlowOutcome {
    let dims = x.dims();
    let mut cur = x.clone();
    let mut mu = moment_map(&cur);
    let mut norm = mu.distance_to(&opts.level);
    let mut history = vec![norm];
    let mut total = GaugeElement::identity(dims);
    let mut iterations = 0;
    let mut converged = norm <= opts.tol * (1.0 + cur.norm_sqr());
    while !converged && iterations < opts.max_iters {
        let (hv, hvp) = opts.level.shifted(&mu);
        let smax = linalg::hermitian_spectral_norm(&hv).max(linalg::hermitian_spectral_norm(&hvp));
        let mut eps = 1.0 / (1.0 + smax * smax);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let g = GaugeElement::with_inverses(
                linalg::hermitian_exp(&hv, -eps),
                linalg::hermitian_exp(&hv, eps),
                linalg::hermitian_exp(&hvp, -eps),
                linalg::hermitian_exp(&hvp, eps),
            );
            let next = crate::datum::act(&g, &cur).expect("gauge shapes match");
            let next_mu = moment_map(&next);
            let next_norm = next_mu.distance_to(&opts.level);
            if next_norm < norm {
                accepted = Some((g, next, next_mu, next_norm));
                break;
            }
            eps *= 0.5;
        }
        iterations += 1;
        let Some((g, next, next_mu, next_norm)) = accepted else {
            break;
        };
        total = GaugeElement::with_inverses(
            g.h() * total.h(),
            total.h_inv() * g.h_inv(),
            g.hprime() * total.hprime(),
            total.hprime_inv() * g.hprime_inv(),
        );
        cur = next;
        mu = next_mu;
        norm = next_norm;
        history.push(norm);
        converged = norm <= opts.tol * (1.0 + cur.norm_sqr());
    }
    FlowOutcome {
        datum: cur,
        iterations,
        converged,
        initial_norm: history[0],
        final_norm: norm,
        history,
        gauge: total,
    }
}

/// `dim ker(linearized ambient equations) − dim(gauge orbit)` at `x`, with
/// the expected value `2c(r + c')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmbientDimension {
    pub kernel_dim: usize,
    pub orbit_dim: usize,
    pub value: i64,
    pub expected: i64,
    pub kernel_decision: RankDecision,
    pub orbit_decision: RankDecision,
}

pub fn ambient_tangent_dim(x: &EnhancedDatum, rtol: f64) -> AmbientDimension {
    let d = x.dims();
    let (r, c, p) = (d.r, d.c, d.cprime);
    let shapes = [(c, c), (c, c), (c, r), (r, c), (p, p), (p, p), (c, p), (p, c)];
    let unknowns: usize = shapes.iter().map(|s| s.0 * s.1).sum();
    let split = |v: &[C64]| -> Vec<CMat> {
        let mut at = 0;
        shapes
            .iter()
            .map(|&(m, n)| {
                let out = linalg::unvectorize(m, n, &v[at..at + m * n]);
                at += m * n;
                out
            })
            .collect()
    };
    let (a, b, i, j, ap, bp, f, g) = (x.a(), x.b(), x.i(), x.j(), x.aprime(), x.bprime(), x.f(), x.g());
    let lin = linalg::linear_map_matrix(c * c + p * p, unknowns, |e| {
        let t = split(e);
        let e1 = commutator(&t[0], b) + commutator(a, &t[1]) + &t[2] * j + i * &t[3] + &t[6] * g + f * &t[7];
        let e2 = commutator(&t[4], bp) + commutator(ap, &t[5]) - &t[7] * f - g * &t[6];
        let mut v = e1.as_slice().to_vec();
        v.extend_from_slice(e2.as_slice());
        CVec::from_vec(v)
    });
    let orbit = linalg::linear_map_matrix(unknowns, c * c + p * p, |e| {
        let h = linalg::unvectorize(c, c, &e[..c * c]);
        let hp = linalg::unvectorize(p, p, &e[c * c..]);
        let mut v = apply_d0(x, &h, &hp).to_vec().as_slice().to_vec();
        v.extend_from_slice((&hp * g - g * &h).as_slice());
        CVec::from_vec(v)
    });
    let kernel_decision = linalg::rank(&lin, rtol);
    let orbit_decision = linalg::rank(&orbit, rtol);
    let kernel_dim = unknowns - kernel_decision.rank;
    AmbientDimension {
        kernel_dim,
        orbit_dim: orbit_decision.rank,
        value: kernel_dim as i64 - orbit_decision.rank as i64,
        expected: 2 * (c * (r + p)) as i64,
        kernel_decision,
        orbit_decision,
    }
}

/// `Ω(u, v) = tr(−a_v b_u + b_v a_u − i_v j_u + i_u j_v − a'_v b'_u + b'_v a'_u)`.
pub fn omega_pair(u: &TangentVector, v: &TangentVector) -> Result<C64> {
    if u.a.shape() != v.a.shape() || u.i.shape() != v.i.shape() || u.aprime.shape() != v.aprime.shape() {
        return Err(Error::dim("tangent vector pair", u.i.shape(), v.i.shape()));
    }
    let on_v = trace(&(-(&v.a * &u.b) + &v.b * &u.a - &v.i * &u.j + &u.i * &v.j));
    let on_vprime = trace(&(-(&v.aprime * &u.bprime) + &v.bprime * &u.aprime));
    Ok(on_v + on_vprime)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaOptions {
    pub samples: usize,
    pub seed: u64,
    pub rtol: f64,
    /// Bound on `|Ω(d₀ξ, v)| / (‖d₀ξ‖ ‖v‖)`.
    pub well_defined_tol: f64,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions {
            samples: 100,
            seed: 0,
            rtol: DEFAULT_RTOL,
            well_defined_tol: 1e-8,
        }
    }
}

/// Ω restricted to `H¹`, in an orthonormal basis of the complement of the
/// gauge directions inside `ker d₁`.
#[derive(Clone, Debug)]
pub struct OmegaMatrix {
    pub basis: Vec<TangentVector>,
    pub matrix: CMat,
    pub numerical_rank: usize,
    pub decision: RankDecision,
    /// `‖M + Mᵀ‖`.
    pub skew_residual: f64,
    /// Largest relative `|Ω(d₀ξ, v)|` over the sampled pairs.
    pub well_definedness_residual: f64,
    pub well_defined: bool,
    /// The tangent basis had an unreliable rank cut, the rank came out odd,
    /// or the well-definedness check failed.
    pub flagged: bool,
}

impl OmegaMatrix {
    pub fn to_json(&self) -> Value {
        json!({
            "h1": self.basis.len(),
            "numerical_rank": self.numerical_rank,
            "rank_decision": self.decision,
            "skew_residual": self.skew_residual,
            "well_definedness_residual": self.well_definedness_residual,
            "well_defined": self.well_defined,
            "flagged": self.flagged,
            "matrix": matrix_to_json(&self.matrix),
        })
    }
}

pub fn omega_on_h1(x: &EnhancedDatum, opts: &OmegaOptions) -> Result<OmegaMatrix> {
    if x.dims().cprime != 1 {
        return Err(Error::Domain(format!("Ω on H¹ needs c' = 1, got dims {}", x.dims())));
    }
    let tb = tangent_basis(x, Variant::ReducedCprime1, opts.rtol)?;
    let basis = tb.h1_vectors();
    let n = basis.len();
    let mut m = CMat::zeros(n, n);
    for (k, u) in basis.iter().enumerate() {
        for (l, v) in basis.iter().enumerate() {
            m[(k, l)] = omega_pair(u, v)?;
        }
    }
    let skew_residual = fro(&(&m + m.transpose()));
    let decision = linalg::rank(&m, opts.rtol);

    let mut rng = rng::seeded(opts.seed);
    let kernel = tb.kernel_vectors();
    let (c, p) = (x.dims().c, x.dims().cprime);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.samples {
        let h = rng::normal_matrix(&mut rng, c, c);
        let hp = rng::normal_matrix(&mut rng, p, p);
        let gauge_dir = apply_d0(x, &h, &hp);
        let mut v = TangentVector::zero(x.dims());
        for kv in &kernel {
            let s = rng::complex_normal(&mut rng);
            v = add(&v, &kv.scale(s));
        }
        let denom = gauge_dir.to_vec().norm() * v.to_vec().norm();
        if denom > 0.0 {
            worst = worst.max(omega_pair(&gauge_dir, &v)?.norm() / denom);
        }
    }
    let well_defined = worst <= opts.well_defined_tol;
    Ok(OmegaMatrix {
        basis,
        numerical_rank: decision.rank,
        flagged: tb.flagged || decision.rank % 2 == 1 || !well_defined,
        matrix: m,
        decision,
        skew_residual,
        well_definedness_residual: worst,
        well_defined,
    })
}

fn add(u: &TangentVector, v: &TangentVector) -> TangentVector {
    TangentVector {
        a: &u.a + &v.a,
        b: &u.b + &v.b,
        i: &u.i + &v.i,
        j: &u.j + &v.j,
        aprime: &u.aprime + &v.aprime,
        bprime: &u.bprime + &v.bprime,
        f: &u.f + &v.f,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub stratum: GenerationStyle,
    pub sample: usize,
    pub seed: u64,
    pub h1: usize,
    pub omega_rank: usize,
    #[serde(serialize_with = "linalg::serialize_finite")]
    pub gap_ratio: f64,
    pub well_definedness_residual: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyScan {
    pub dims: DimVector,
    pub stratum: GenerationStyle,
    pub rows: Vec<ScanRow>,
    /// `(rank, count)` pairs in increasing rank.
    pub histogram: Vec<(usize, usize)>,
}

impl DegeneracyScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stratum,sample,seed,h1,omega_rank,gap_ratio,well_definedness_residual,flagged\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:e},{:e},{}",
                r.stratum, r.sample, r.seed, r.h1, r.omega_rank, r.gap_ratio, r.well_definedness_residual, r.flagged
            );
        }
        out
    }
}

/// Ω-ranks of `samples` seeded stable data of one stratum.
pub fn degeneracy_scan(
    dims: DimVector,
    stratum: GenerationStyle,
    samples: usize,
    seed: u64,
) -> Result<DegeneracyScan> {
    if dims.cprime != 1 {
        return Err(Error::Domain(format!("degeneracy scans need c' = 1, got dims {dims}")));
    }
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        let s = derive_seed(seed, k as u64);
        let x = generate_stable(dims, s, stratum)?;
        let om = omega_on_h1(
            &x,
            &OmegaOptions {
                seed: s,
                ..OmegaOptions::default()
            },
        )?;
        rows.push(ScanRow {
            stratum,
            sample: k,
            seed: s,
            h1: om.basis.len(),
            omega_rank: om.numerical_rank,
            gap_ratio: om.decision.gap_ratio,
            well_definedness_residual: om.well_definedness_residual,
            flagged: om.flagged,
        });
    }
    let mut histogram: Vec<(usize, usize)> = Vec::new();
    for r in &rows {
        match histogram.iter_mut().find(|(rank, _)| *rank == r.omega_rank) {
            Some(entry) => entry.1 += 1,
            None => histogram.push((r.omega_rank, 1)),
        }
    }
    histogram.sort();
    Ok(DegeneracyScan {
        dims,
        stratum,
        rows,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::EnhancedMaps;
    use crate::linalg::c;

    fn dv(r: usize, c: usize, p: usize) -> DimVector {
        DimVector::new(r, c, p).unwrap()
    }

    /// `[A,B] + FG = 0` with `G ≠ 0`: `A = E12`, `B = diag(b + g, b)`, `F = e1`, `G = (0, g)`.
    fn ambient_point_with_g(g: C64, b: C64) -> EnhancedDatum {
        let d = dv(1, 2, 1);
        let (z, one) = (c(0.0, 0.0), c(1.0, 0.0));
        let maps = EnhancedMaps {
            a: CMat::from_row_slice(2, 2, &[z, one, z, z]),
            b: CMat::from_row_slice(2, 2, &[b + g, z, z, b]),
            i: CMat::from_column_slice(2, 1, &[c(0.3, 0.1), one]),
            j: CMat::zeros(1, 2),
            aprime: CMat::from_element(1, 1, c(0.2, 0.0)),
            bprime: CMat::from_element(1, 1, c(-0.4, 0.5)),
            f: CMat::from_column_slice(2, 1, &[one, z]),
            g: CMat::from_row_slice(1, 2, &[z, g]),
        };
        EnhancedDatum::new(d, maps).unwrap()
    }

    #[test]
    fn ambient_equations_hold_with_nonzero_g() {
        let x = ambient_point_with_g(c(0.7, -0.2), c(0.1, 0.3));
        let (e1, e2) = ambient_residuals(&x);
        assert!(e1 < 1e-15 && e2 < 1e-15);
        assert!(x.residuals().get("FG").unwrap() > 0.5);
    }

    #[test]
    fn moment_map_is_hermitian_and_complex_part_vanishes() {
        let x = generate_stable(dv(2, 3, 1), 4, GenerationStyle::Lifted).unwrap();
        let mu = moment_map(&x);
        assert!(fro(&(&mu.mu_v - mu.mu_v.adjoint())) < 1e-13);
        assert!(fro(&(&mu.mu_vprime - mu.mu_vprime.adjoint())) < 1e-13);
        assert!(mu.complex_norm() < 1e-12);
    }

    #[test]
    fn real_moment_trace_identity() {
        let x = generate_stable(dv(2, 3, 1), 5, GenerationStyle::Lifted).unwrap();
        let mu = moment_map(&x);
        let total = trace(&mu.mu_v) + trace(&mu.mu_vprime);
        let want = fro_sqr(x.i()) - fro_sqr(x.j());
        assert!((total - c(want, 0.0)).norm() < 1e-12);
        // At G = 0 the V' block has trace −‖F‖² < 0, so μ₁ never vanishes.
        assert!((trace(&mu.mu_vprime).re + fro_sqr(x.f())).abs() < 1e-12);
    }

    #[test]
    fn balanced_scalar_example() {
        let d = dv(1, 1, 1);
        let mut maps = EnhancedMaps::zero(d);
        maps.i = CMat::from_element(1, 1, c(3.0, 0.0));
        maps.f = CMat::from_element(1, 1, c(0.5, 0.0));
        let x = EnhancedDatum::new(d, maps).unwrap();
        let level = MomentLevel::from_stability(&StabilityParameter::from_integers(-2, 1, 1));
        let out = balance_flow(
            &x,
            &FlowOptions {
                max_iters: 10_000,
                tol: 1e-12,
                level,
            },
        );
        assert!(out.converged);
        assert!(out.is_monotone());
        assert!((out.datum.f()[(0, 0)].norm() - 1.0).abs() < 1e-9);
        assert!((out.datum.i()[(0, 0)].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn balanced_input_is_fixed() {
        let d = dv(1, 1, 1);
        let mut maps = EnhancedMaps::zero(d);
        maps.i = CMat::from_element(1, 1, c(1.0, 0.0));
        maps.f = CMat::from_element(1, 1, c(1.0, 0.0));
        let x = EnhancedDatum::new(d, maps).unwrap();
        let out = balance_flow(&x, &FlowOptions::new(d));
        assert_eq!(out.iterations, 0);
        assert_eq!(out.datum, x);
    }

    #[test]
    fn ambient_dimension_at_stable_points() {
        for (d, want) in [(dv(1, 2, 1), 8), (dv(2, 2, 1), 12)] {
            let x = generate_stable(d, 8, GenerationStyle::Lifted).unwrap();
            let rep = ambient_tangent_dim(&x, DEFAULT_RTOL);
            assert_eq!(rep.value, want);
            assert_eq!(rep.expected, want);
        }
    }

    #[test]
    fn omega_examples() {
        let x = generate_stable(dv(1, 2, 1), 2, GenerationStyle::Diagonal).unwrap();
        let tb = tangent_basis(&x, Variant::ReducedCprime1, DEFAULT_RTOL).unwrap();
        let ks = tb.kernel_vectors();
        let u = &ks[0];
        assert!(omega_pair(u, u).unwrap().norm() <= 1e-14 * u.to_vec().norm_squared().max(1.0));
        let mut only_f = TangentVector::zero(x.dims());
        only_f.f = CMat::from_element(2, 1, c(1.0, 2.0));
        assert_eq!(omega_pair(&only_f, &ks[1]).unwrap(), c(0.0, 0.0));
        let (a, b) = (omega_pair(&ks[0], &ks[1]).unwrap(), omega_pair(&ks[1], &ks[0]).unwrap());
        assert!((a + b).norm() <= 1e-14 * a.norm().max(1.0));
    }

    #[test]
    fn omega_rank_by_stratum() {
        let diag = generate_stable(dv(1, 2, 1), 1, GenerationStyle::Diagonal).unwrap();
        let om = omega_on_h1(&diag, &OmegaOptions::default()).unwrap();
        assert_eq!(om.numerical_rank, 4);
        assert!(om.well_defined && !om.flagged);
        for style in [GenerationStyle::Jordan, GenerationStyle::JordanMixed] {
            let x = generate_stable(dv(1, 2, 1), 1, style).unwrap();
            let om = omega_on_h1(&x, &OmegaOptions::default()).unwrap();
            assert!(om.numerical_rank < 4, "{style}: rank {}", om.numerical_rank);
            assert_eq!(om.numerical_rank % 2, 0);
            assert!(om.well_defined);
        }
    }

    #[test]
    fn scan_csv_shape() {
        let scan = degeneracy_scan(dv(1, 2, 1), GenerationStyle::Jordan, 3, 0).unwrap();
        let csv = scan.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("stratum,"));
        assert_eq!(scan.histogram.iter().map(|h| h.1).sum::<usize>(), 3);
    }
}
