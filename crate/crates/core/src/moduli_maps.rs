//! Maps between moduli: the quotient `X ↦ X''` on `V/Im F`, fiber lifts
//! through the linear system of the fiber, the monad pencil, supports of
//! quotient sheaves and the nested Hilbert scheme correspondence at `r = 1`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::datum::{AdhmDatum, DimVector, EnhancedDatum, EnhancedMaps};
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, column_complement, commutator, eye, fro, hstack, null_space, unvectorize, vectorize, vstack,
    zeros, CMat, CVec, RankDecision, C64, DEFAULT_RTOL,
};
use crate::rng::{self, SeededRng};
use crate::stability::{invariant_closure_basis, is_stable};

/// The plain datum induced on `V'' = V / Im F`, realized on the orthogonal
/// complement of `Im F`.
pub fn quotient_rep(x: &EnhancedDatum) -> Result<AdhmDatum> {
    let f_rank = linalg::rank(x.f(), DEFAULT_RTOL).rank;
    if f_rank != x.dims().cprime {
        return Err(Error::Precondition(format!(
            "F has numerical rank {f_rank} < c' = {}; the quotient is undefined",
            x.dims().cprime
        )));
    }
    let (q, _) = column_complement(x.f(), DEFAULT_RTOL);
    let qh = q.adjoint();
    Ok(AdhmDatum {
        a: &qh * x.a() * &q,
        b: &qh * x.b() * &q,
        i: &qh * x.i(),
        j: x.j() * &q,
    })
}

/// Unknowns `(Ã, B̃, Ĩ)` of the fiber system over a quotient datum.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftData {
    pub atilde: CMat,
    pub btilde: CMat,
    pub itilde: CMat,
    pub aprime: CMat,
    pub bprime: CMat,
}

impl LiftData {
    fn from_vec(x2: &AdhmDatum, aprime: &CMat, bprime: &CMat, v: &[C64]) -> Self {
        let (p, q, r) = (aprime.nrows(), x2.c(), x2.r());
        LiftData {
            atilde: unvectorize(p, q, &v[..p * q]),
            btilde: unvectorize(p, q, &v[p * q..2 * p * q]),
            itilde: unvectorize(p, r, &v[2 * p * q..]),
            aprime: aprime.clone(),
            bprime: bprime.clone(),
        }
    }

    /// `A'B̃ + ÃB'' − B'Ã − B̃A'' + ĨJ''`.
    pub fn fiber_residual(&self, x2: &AdhmDatum) -> CMat {
        &self.aprime * &self.btilde + &self.atilde * &x2.b - &self.bprime * &self.atilde - &self.btilde * &x2.a
            + &self.itilde * &x2.j
    }
}

/// Matrix of `L(Ã, B̃, Ĩ) = A'B̃ + ÃB'' − B'Ã − B̃A'' + ĨJ''` on
/// `vec(Ã) ⊕ vec(B̃) ⊕ vec(Ĩ)`.
pub fn lift_operator(x2: &AdhmDatum, aprime: &CMat, bprime: &CMat) -> CMat {
    let (p, q, r) = (aprime.nrows(), x2.c(), x2.r());
    linalg::linear_map_matrix(p * q, 2 * p * q + p * r, |e| {
        vectorize(&LiftData::from_vec(x2, aprime, bprime, e).fiber_residual(x2))
    })
}

/// Block datum `A = [[A', Ã], [0, A'']]`, `I = [Ĩ; I'']`, `J = [0, J'']`,
/// `F = [1; 0]`, `G = 0`.
pub fn assemble_lift(x2: &AdhmDatum, lift: &LiftData) -> Result<EnhancedDatum> {
    let (p, q, r) = (lift.aprime.nrows(), x2.c(), x2.r());
    let dims = DimVector::new(r, p + q, p)?;
    let block = |tl: &CMat, tr: &CMat, br: &CMat| {
        vstack(&[&hstack(&[tl, tr]), &hstack(&[&zeros(q, p), br])])
    };
    let maps = EnhancedMaps {
        a: block(&lift.aprime, &lift.atilde, &x2.a),
        b: block(&lift.bprime, &lift.btilde, &x2.b),
        i: vstack(&[&lift.itilde, &x2.i]),
        j: hstack(&[&zeros(r, p), &x2.j]),
        aprime: lift.aprime.clone(),
        bprime: lift.bprime.clone(),
        f: vstack(&[&eye(p), &zeros(q, p)]),
        g: zeros(p, p + q),
    };
    EnhancedDatum::new(dims, maps)
}

/// Condition (i): some lift map is nonzero. Condition (ii): the columns of
/// `Ã, B̃, Ĩ` generate `V'` under `A', B'` (automatic when `c' = 1` and (i) holds).
pub fn lift_conditions(lift: &LiftData) -> (bool, bool) {
    let gens = hstack(&[&lift.atilde, &lift.btilde, &lift.itilde]);
    let scale = 1.0 + fro(&lift.aprime) + fro(&lift.bprime);
    let nonzero = fro(&gens) > 1e-10 * scale;
    let p = lift.aprime.nrows();
    let generates = if p == 1 {
        nonzero
    } else {
        invariant_closure_basis(&lift.aprime, &lift.bprime, &gens, DEFAULT_RTOL).ncols() == p
    };
    (nonzero, generates)
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub datum: EnhancedDatum,
    pub lift: LiftData,
    pub kernel_dim: usize,
    /// `c'(c'' + r)`, the kernel dimension when `L` is surjective.
    pub generic_kernel_dim: usize,
    pub decision: RankDecision,
    pub attempts: usize,
}

const LIFT_ATTEMPTS: usize = 32;

pub fn fiber_lift(x2: &AdhmDatum, aprime: &CMat, bprime: &CMat, seed: u64) -> Result<EnhancedDatum> {
    fiber_lift_report(x2, aprime, bprime, seed).map(|r| r.datum)
}

/// Samples random elements of `ker L` until the assembled datum is valid and
/// stable.
pub fn fiber_lift_report(x2: &AdhmDatum, aprime: &CMat, bprime: &CMat, seed: u64) -> Result<LiftReport> {
    let p = aprime.nrows();
    if p == 0 {
        return Err(Error::Domain("fiber lift needs c' >= 1".into()));
    }
    if aprime.shape() != (p, p) || bprime.shape() != (p, p) {
        return Err(Error::dim("B'", (p, p), bprime.shape()));
    }
    let comm = fro(&commutator(aprime, bprime));
    if comm > 1e-10 * (1.0 + fro(aprime) * fro(bprime)) {
        return Err(Error::Commutation { residual: comm });
    }
    let q = x2.c();
    if invariant_closure_basis(&x2.a, &x2.b, &x2.i, DEFAULT_RTOL).ncols() != q {
        return Err(Error::Precondition("quotient datum is not stable".into()));
    }
    let l = lift_operator(x2, aprime, bprime);
    let (kernel, decision) = null_space(&l, DEFAULT_RTOL);
    let kernel_dim = kernel.ncols();
    if kernel_dim == 0 {
        return Err(Error::Lift("the fiber system has only the zero solution".into()));
    }
    let mut rng = rng::seeded(seed);
    for attempt in 1..=LIFT_ATTEMPTS {
        let coeffs = CVec::from_fn(kernel_dim, |_, _| rng::complex_normal(&mut rng));
        let v = &kernel * coeffs;
        let lift = LiftData::from_vec(x2, aprime, bprime, v.as_slice());
        let (nonzero, generates) = lift_conditions(&lift);
        if !(nonzero && generates) {
            continue;
        }
        let datum = assemble_lift(x2, &lift)?;
        if datum.is_valid(1e-12) && is_stable(&datum).is_stable() {
            return Ok(LiftReport {
                datum,
                lift,
                kernel_dim,
                generic_kernel_dim: p * (q + x2.r()),
                decision,
                attempts: attempt,
            });
        }
    }
    Err(Error::Generation(format!(
        "no stable lift among {LIFT_ATTEMPTS} kernel samples (kernel dimension {kernel_dim})"
    )))
}

/// Diagonal `A', B'` with separated entries and `Ĩ` the all-ones column.
#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeFrame {
    pub aprime: CMat,
    pub bprime: CMat,
    /// `c' × 1`; its image is spanned by the sum of the eigenvectors.
    pub itilde: CMat,
}

pub fn vandermonde_frame(cprime: usize, seed: u64) -> Result<VandermondeFrame> {
    if cprime == 0 {
        return Err(Error::Domain("a frame needs c' >= 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let pts = crate::datum::separated_points(cprime, &mut rng)?;
    let xs: Vec<C64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<C64> = pts.iter().map(|p| p.1).collect();
    from_diagonals(&xs, &ys)
}

/// Frame from prescribed diagonals; rejects data whose Krylov matrix
/// `[v, B'v, …, B'^{c'-1}v]` (with `v` all ones) is rank deficient.
pub fn from_diagonals(alphas: &[C64], betas: &[C64]) -> Result<VandermondeFrame> {
    let p = alphas.len();
    if betas.len() != p || p == 0 {
        return Err(Error::dim("frame diagonals", (p, 1), (betas.len(), 1)));
    }
    let aprime = CMat::from_diagonal(&CVec::from_column_slice(alphas));
    let bprime = CMat::from_diagonal(&CVec::from_column_slice(betas));
    let v = CMat::from_element(p, 1, c(1.0, 0.0));
    let krylov = krylov_matrix(&bprime, &v);
    let d = linalg::rank(&krylov, DEFAULT_RTOL);
    if d.rank < p {
        return Err(Error::Domain(format!(
            "B' has repeated eigenvalues: Krylov rank {} < {p}",
            d.rank
        )));
    }
    Ok(VandermondeFrame {
        aprime,
        bprime,
        itilde: v,
    })
}

pub fn krylov_matrix(m: &CMat, v: &CMat) -> CMat {
    let n = m.nrows();
    let mut cols = Vec::with_capacity(n);
    let mut cur = v.clone();
    for _ in 0..n {
        cols.push(cur.clone());
        cur = m * cur;
    }
    hstack(&cols.iter().collect::<Vec<_>>())
}

/// `α = [zA + x; zB + y; zJ]`, `β = [−zB − y, zA + x, zI]`.
#[derive(Clone, Debug)]
pub struct MonadPencil {
    pub base: AdhmDatum,
}

impl MonadPencil {
    pub fn new(base: AdhmDatum) -> Self {
        MonadPencil { base }
    }

    pub fn alpha(&self, p: [C64; 3]) -> CMat {
        let [x, y, z] = p;
        let n = self.base.c();
        let id = eye(n);
        vstack(&[
            &(&self.base.a * z + &id * x),
            &(&self.base.b * z + &id * y),
            &(&self.base.j * z),
        ])
    }

    pub fn beta(&self, p: [C64; 3]) -> CMat {
        let [x, y, z] = p;
        let n = self.base.c();
        let id = eye(n);
        hstack(&[
            &(-(&self.base.b * z) - &id * y),
            &(&self.base.a * z + &id * x),
            &(&self.base.i * z),
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonadRanks {
    pub alpha: RankDecision,
    pub beta: RankDecision,
}

pub fn monad_ranks(m: &MonadPencil, p: [C64; 3], rtol: f64) -> Result<MonadRanks> {
    if p.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Domain("(0:0:0) is not a point of the projective plane".into()));
    }
    Ok(MonadRanks {
        alpha: linalg::rank(&m.alpha(p), rtol),
        beta: linalg::rank(&m.beta(p), rtol),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: C64,
    pub y: C64,
    pub mult: usize,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    x: [f64; 2],
    y: [f64; 2],
    mult: usize,
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr {
            x: [self.x.re, self.x.im],
            y: [self.y.re, self.y.im],
            mult: self.mult,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PointRepr::deserialize(d)?;
        if r.mult == 0 {
            return Err(serde::de::Error::custom("multiplicity must be positive"));
        }
        Ok(Point {
            x: c(r.x[0], r.x[1]),
            y: c(r.y[0], r.y[1]),
            mult: r.mult,
        })
    }
}

/// A finite multiset of points of `C²`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub points: Vec<Point>,
}

impl PointConfiguration {
    pub fn reduced(coords: &[(C64, C64)]) -> Self {
        PointConfiguration {
            points: coords.iter().map(|&(x, y)| Point { x, y, mult: 1 }).collect(),
        }
    }

    pub fn length(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }

    /// Lexicographic order on `(Re x, Im x, Re y, Im y)`.
    pub fn sorted(&self) -> Self {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            [a.x.re, a.x.im, a.y.re, a.y.im]
                .partial_cmp(&[b.x.re, b.x.im, b.y.re, b.y.im])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        PointConfiguration { points: pts }
    }

    /// Largest coordinate deviation under the best matching of points with
    /// equal multiplicities; `None` when the multisets differ in shape.
    pub fn distance(&self, other: &PointConfiguration) -> Option<f64> {
        if self.points.len() != other.points.len() {
            return None;
        }
        let mut used = vec![false; other.points.len()];
        let mut worst: f64 = 0.0;
        for p in &self.points {
            let best = other
                .points
                .iter()
                .enumerate()
                .filter(|(k, q)| !used[*k] && q.mult == p.mult)
                .map(|(k, q)| (k, (p.x - q.x).norm().max((p.y - q.y).norm())))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            used[best.0] = true;
            worst = worst.max(best.1);
        }
        Some(worst)
    }

    pub fn contains(&self, x: C64, y: C64, tol: f64) -> bool {
        self.points.iter().any(|p| (p.x - x).norm() <= tol && (p.y - y).norm() <= tol)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

const JOINT_TRIANGULAR_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-6;

/// Joint spectrum of a commuting pair: triangularize `A + tB` for a fixed
/// generic `t`, apply the same unitary to both, and pair the diagonals.
pub fn joint_spectrum(a: &CMat, b: &CMat) -> Result<PointConfiguration> {
    let n = a.nrows();
    if b.shape() != (n, n) || !a.is_square() {
        return Err(Error::dim("commuting pair", (n, n), b.shape()));
    }
    if n == 0 {
        return Ok(PointConfiguration::default());
    }
    let t = c(0.618_033_988_749_895, 0.377_964_473_009_227);
    let (q, _) = linalg::schur(&(a + b * t));
    let qh = q.adjoint();
    let ta = &qh * a * &q;
    let tb = &qh * b * &q;
    let mass = linalg::lower_mass(&ta).max(linalg::lower_mass(&tb));
    if mass > JOINT_TRIANGULAR_TOL * (1.0 + fro(a).max(fro(b))) {
        return Err(Error::Commutation { residual: mass });
    }
    let mut points: Vec<(C64, C64, usize)> = Vec::new();
    for k in 0..n {
        let (x, y) = (ta[(k, k)], tb[(k, k)]);
        match points
            .iter_mut()
            .find(|p| (p.0 - x).norm() <= CLUSTER_TOL && (p.1 - y).norm() <= CLUSTER_TOL)
        {
            Some(p) => {
                let m = p.2 as f64;
                p.0 = (p.0 * m + x) / (m + 1.0);
                p.1 = (p.1 * m + y) / (m + 1.0);
                p.2 += 1;
            }
            None => points.push((x, y, 1)),
        }
    }
    Ok(PointConfiguration {
        points: points.into_iter().map(|(x, y, mult)| Point { x, y, mult }).collect(),
    })
}

/// Support of the quotient sheaf: the joint spectrum of `(−A', −B')`.
pub fn quotient_support(x: &EnhancedDatum) -> Result<PointConfiguration> {
    joint_spectrum(&-x.aprime(), &-x.bprime())
}

fn pairwise_distinct(pts: &PointConfiguration, tol: f64) -> bool {
    pts.points.iter().enumerate().all(|(k, p)| {
        pts.points[k + 1..]
            .iter()
            .all(|q| (p.x - q.x).norm() > tol || (p.y - q.y).norm() > tol)
    })
}

const POINT_MATCH_TOL: f64 = 1e-12;

/// `r = 1` datum of the nested pair `Z1 ⊆ Z2`: `A, B` diagonal over `Z2` with
/// the points of `Z2 ∖ Z1` first, `I` all ones, `J = 0`, and `F` the inclusion
/// of the first `|Z2 ∖ Z1|` coordinates.
pub fn nested_hilbert_datum(z1: &PointConfiguration, z2: &PointConfiguration) -> Result<EnhancedDatum> {
    if z1.points.iter().chain(&z2.points).any(|p| p.mult != 1) {
        return Err(Error::Domain("nested Hilbert data need reduced points (multiplicity 1)".into()));
    }
    if !pairwise_distinct(z1, POINT_MATCH_TOL) || !pairwise_distinct(z2, POINT_MATCH_TOL) {
        return Err(Error::Domain("repeated points in configuration".into()));
    }
    if z2.points.is_empty() {
        return Err(Error::Domain("Z2 must be non-empty".into()));
    }
    if let Some(p) = z1.points.iter().find(|p| !z2.contains(p.x, p.y, POINT_MATCH_TOL)) {
        return Err(Error::Domain(format!("Z1 is not contained in Z2: ({}, {}) missing", p.x, p.y)));
    }
    let extra: Vec<&Point> = z2
        .points
        .iter()
        .filter(|p| !z1.contains(p.x, p.y, POINT_MATCH_TOL))
        .collect();
    let ordered: Vec<&Point> = extra.iter().copied().chain(z1.points.iter()).collect();
    let l = extra.len();
    let n = ordered.len();
    let dims = DimVector::new(1, n, l)?;
    let diag = |vals: Vec<C64>| CMat::from_diagonal(&CVec::from_vec(vals));
    let maps = EnhancedMaps {
        a: diag(ordered.iter().map(|p| p.x).collect()),
        b: diag(ordered.iter().map(|p| p.y).collect()),
        i: CMat::from_element(n, 1, c(1.0, 0.0)),
        j: zeros(1, n),
        aprime: diag(extra.iter().map(|p| p.x).collect()),
        bprime: diag(extra.iter().map(|p| p.y).collect()),
        f: CMat::from_fn(n, l, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }),
        g: zeros(l, n),
    };
    EnhancedDatum::new(dims, maps)
}

/// Inverse of [`nested_hilbert_datum`]: `Z2` is the joint spectrum of `(A,B)`
/// and `Z1` that of the quotient `(A'', B'')`.
pub fn nested_hilbert_points(x: &EnhancedDatum) -> Result<(PointConfiguration, PointConfiguration)> {
    if x.dims().r != 1 {
        return Err(Error::Domain(format!("nested Hilbert data have r = 1, got r = {}", x.dims().r)));
    }
    let z2 = joint_spectrum(x.a(), x.b())?;
    let q = quotient_rep(x)?;
    let z1 = joint_spectrum(&q.a, &q.b)?;
    Ok((z1, z2))
}

/// Conjugation invariants of `(A, B)`: characteristic polynomials of `A`,
/// `B`, `A + B`, `AB` and the moments `tr(A^i B^j)`, `1 <= i + j <= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fingerprint {
    pub values: Vec<C64>,
}

pub fn fingerprint(a: &CMat, b: &CMat) -> Fingerprint {
    let mut values = Vec::new();
    for m in [a.clone(), b.clone(), a + b, a * b] {
        values.extend(linalg::char_poly(&m));
    }
    let n = a.nrows();
    let pow = |m: &CMat, k: usize| (0..k).fold(eye(n), |acc, _| acc * m);
    for total in 1..=4 {
        for i in 0..=total {
            values.push(linalg::trace(&(pow(a, i) * pow(b, total - i))));
        }
    }
    Fingerprint { values }
}

impl Fingerprint {
    /// Largest `|u − v| / max(1, |u|, |v|)` over entries; infinite on shape mismatch.
    pub fn deviation(&self, other: &Fingerprint) -> f64 {
        if self.values.len() != other.values.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).norm() / 1f64.max(u.norm()).max(v.norm()))
            .fold(0.0, f64::max)
    }
}

/// Random nested configuration with `|Z1| = n`, `|Z2 ∖ Z1| = l`.
pub fn random_nested(n: usize, l: usize, rng: &mut SeededRng) -> Result<(PointConfiguration, PointConfiguration)> {
    let pts = crate::datum::separated_points(n + l, rng)?;
    let mut z2 = PointConfiguration::reduced(&pts);
    let z1 = PointConfiguration::reduced(&pts[l..]);
    let len = z2.points.len();
    let k = rng.random_range(0..len.max(1));
    z2.points.rotate_left(k.min(len));
    Ok((z1, z2))
}
