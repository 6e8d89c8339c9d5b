//! Stability of enhanced data: the conditions "F injective" and "Im I
//! generates V under A, B", chamber membership of Θ, the character χ_Θ and
//! a heuristic search for destabilizing subrepresentations.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::datum::{matrix_to_json, DimVector, EnhancedDatum, GaugeElement, StabilityParameter};
use crate::error::{Error, Result};
use crate::linalg::{self, c, column_space, eye, fro, hstack, CMat, C64, DEFAULT_RTOL};
use crate::rng::SeededRng;

/// Orthonormal basis of the smallest `A,B`-invariant subspace containing the
/// columns of `gens`.
pub fn invariant_closure_basis(a: &CMat, b: &CMat, gens: &CMat, rtol: f64) -> CMat {
    let n = a.nrows();
    let (mut s, mut d) = column_space(gens, rtol);
    let ref_scale = linalg::singular_values(gens).first().copied().unwrap_or(0.0);
    if d.rank == 0 || ref_scale == 0.0 {
        return linalg::zeros(n, 0);
    }
    for _ in 0..n {
        let (as_, bs) = (a * &s, b * &s);
        let grown = hstack(&[&s, &as_, &bs]);
        let (next, nd) = column_space(&grown, rtol);
        if nd.rank == d.rank {
            break;
        }
        s = next;
        d = nd;
    }
    s
}

/// Dimension of the smallest `A,B`-invariant subspace containing `Im I`.
pub fn invariant_closure(a: &CMat, b: &CMat, i: &CMat) -> usize {
    invariant_closure_basis(a, b, i, DEFAULT_RTOL).ncols()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
    OutsideChamberUnknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub f_injective: bool,
    /// `None` when `c' = 0`.
    pub f_smallest_singular: Option<f64>,
    pub adhm_stable: bool,
    pub closure_dim: usize,
    pub chamber_ok: bool,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::Stable
    }
}

/// Stability with respect to the default chamber parameter.
pub fn is_stable(x: &EnhancedDatum) -> StabilityReport {
    let theta = StabilityParameter::default_for(x.dims());
    is_stable_with(x, &theta, DEFAULT_RTOL).expect("default parameter satisfies the relation")
}

pub fn is_stable_with(x: &EnhancedDatum, theta: &StabilityParameter, rtol: f64) -> Result<StabilityReport> {
    let chamber_ok = chamber_check(x.dims(), theta)?;
    let cp = x.dims().cprime;
    let sv = linalg::singular_values(x.f());
    let f_rank = linalg::decide_rank(&sv, x.f().nrows(), x.f().ncols(), rtol).rank;
    let f_injective = f_rank == cp;
    let f_smallest_singular = if cp == 0 { None } else { sv.last().copied() };
    let closure_dim = invariant_closure_basis(x.a(), x.b(), x.i(), rtol).ncols();
    let adhm_stable = closure_dim == x.dims().c;
    let verdict = if !chamber_ok {
        Verdict::OutsideChamberUnknown
    } else if f_injective && adhm_stable {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        f_injective,
        f_smallest_singular,
        adhm_stable,
        closure_dim,
        chamber_ok,
        verdict,
    })
}

/// `θ' > 0` and `θ + c'θ' < 0`, in exact arithmetic.
pub fn chamber_check(dims: DimVector, theta: &StabilityParameter) -> Result<bool> {
    if !theta.satisfies_relation(dims) {
        return Err(Error::Parameter(format!(
            "{theta} violates c·θ + c'·θ' + r·θ∞ = 0 for dims {dims}"
        )));
    }
    let zero = Ratio::from_integer(0);
    Ok(theta.thetaprime > zero && theta.theta + theta.thetaprime * (dims.cprime as i64) < zero)
}

/// `χ_Θ(h, h') = det(h)^{-θ} det(h')^{-θ'}`.
pub fn chi_character(theta: &StabilityParameter, g: &GaugeElement) -> Result<C64> {
    let exp = |q: Ratio<i64>, what: &str| -> Result<i32> {
        if !q.is_integer() {
            return Err(Error::Parameter(format!("{what} = {q} is not an integer")));
        }
        q.to_integer()
            .checked_neg()
            .and_then(|v| i32::try_from(v).ok())
            .ok_or_else(|| Error::Parameter(format!("{what} = {q} is out of range")))
    };
    let e = exp(theta.theta, "θ")?;
    let ep = exp(theta.thetaprime, "θ'")?;
    Ok(linalg::determinant(g.h()).powi(e) * linalg::determinant(g.hprime()).powi(ep))
}

/// A subrepresentation whose Θ-slope `θ∞ r̃ + θ c̃ + θ' c̃'` is non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub rtilde: usize,
    pub ctilde: usize,
    pub cprimetilde: usize,
    pub slope: Ratio<i64>,
    /// Orthonormal basis of the subspace of `V`.
    pub basis_v: CMat,
    /// Orthonormal basis of the subspace of `V'`.
    pub basis_vprime: CMat,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "rtilde": self.rtilde,
            "ctilde": self.ctilde,
            "cprimetilde": self.cprimetilde,
            "slope": self.slope.to_string(),
            "basis_v": matrix_to_json(&self.basis_v),
            "basis_vprime": matrix_to_json(&self.basis_vprime),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub certificate: Option<Certificate>,
    /// No certificate and the parameter lies in the chamber, where the
    /// candidate families are exhaustive.
    pub conclusive: bool,
    pub candidates_examined: usize,
    pub budget_exhausted: bool,
}

const SUBSPACE_TOL: f64 = 1e-8;

struct Probe<'a> {
    x: &'a EnhancedDatum,
    theta: &'a StabilityParameter,
    rtol: f64,
    scale: f64,
}

impl Probe<'_> {
    /// Largest subspace of `V'` mapped into `span(q)` by `F`.
    fn f_preimage(&self, q: &CMat) -> CMat {
        let proj = eye(self.x.dims().c) - q * q.adjoint();
        linalg::null_space_abs(&(proj * self.x.f()), SUBSPACE_TOL * self.scale)
    }

    fn contains(&self, q: &CMat, vectors: &CMat) -> bool {
        if vectors.ncols() == 0 {
            return true;
        }
        let resid = vectors - q * (q.adjoint() * vectors);
        fro(&resid) <= SUBSPACE_TOL * self.scale.max(fro(vectors))
    }

    fn evaluate(&self, rtilde: usize, q: CMat) -> Option<Certificate> {
        let d = self.x.dims();
        let qp = self.f_preimage(&q);
        if !self.contains(&qp, &(self.x.g() * &q)) {
            return None;
        }
        let (ct, cpt) = (q.ncols(), qp.ncols());
        let is_zero = rtilde == 0 && ct == 0 && cpt == 0;
        let is_all = rtilde == d.r && ct == d.c && cpt == d.cprime;
        if is_zero || is_all {
            return None;
        }
        let slope = self.theta.thetainf * rtilde as i64 + self.theta.theta * ct as i64 + self.theta.thetaprime * cpt as i64;
        (slope >= Ratio::from_integer(0)).then_some(Certificate {
            rtilde,
            ctilde: ct,
            cprimetilde: cpt,
            slope,
            basis_v: q,
            basis_vprime: qp,
        })
    }
}

/// Searches subrepresentations generated by natural seeds (kernel of `F`,
/// `Im I`, `Im F`, joint eigenvectors of `(A,B)` and `(A',B')`, random
/// eigenvector subsets) for one violating Θ-stability. Only framing ranks
/// `r̃ ∈ {0, r}` are considered.
pub fn destabilizer_search(
    x: &EnhancedDatum,
    theta: &StabilityParameter,
    budget: usize,
    rng: &mut SeededRng,
) -> Result<SearchOutcome> {
    let chamber = chamber_check(x.dims(), theta)?;
    let d = x.dims();
    let probe = Probe {
        x,
        theta,
        rtol: DEFAULT_RTOL,
        scale: 1.0 + x.norm(),
    };

    let t = c(0.618_033_988_749_895, 0.377_964_473_009_227);
    let eig_v = eigenvectors(&(x.a() + x.b() * t));
    let eig_vp = eigenvectors(&(x.aprime() + x.bprime() * t));

    let mut seeds: Vec<CMat> = vec![linalg::zeros(d.c, 0), x.i().clone(), x.f().clone()];
    seeds.extend((1..eig_v.ncols()).map(|k| eig_v.columns(0, k).into_owned()));
    seeds.extend(eig_v.column_iter().map(|col| CMat::from_column_slice(col.nrows(), 1, col.as_slice())));
    seeds.extend(eig_vp.column_iter().map(|col| x.f() * CMat::from_column_slice(col.nrows(), 1, col.as_slice())));
    let mut order: Vec<usize> = (0..eig_v.ncols()).collect();
    while seeds.len() < budget && !order.is_empty() {
        order.shuffle(rng);
        let k = rng.random_range(1..=order.len());
        let cols: Vec<CMat> = order[..k].iter().map(|&j| eig_v.columns(j, 1).into_owned()).collect();
        seeds.push(hstack(&cols.iter().collect::<Vec<_>>()));
    }

    let mut examined = 0;
    for seed in seeds.iter().take(budget) {
        examined += 1;
        let s = invariant_closure_basis(x.a(), x.b(), seed, probe.rtol);
        let j_vanishes = fro(&(x.j() * &s)) <= SUBSPACE_TOL * probe.scale;
        if j_vanishes {
            if let Some(cert) = probe.evaluate(0, s.clone()) {
                return Ok(found(cert, examined));
            }
        }
        let with_i = invariant_closure_basis(x.a(), x.b(), &hstack(&[&s, x.i()]), probe.rtol);
        if let Some(cert) = probe.evaluate(d.r, with_i) {
            return Ok(found(cert, examined));
        }
    }
    let budget_exhausted = seeds.len() > budget;
    Ok(SearchOutcome {
        certificate: None,
        conclusive: chamber,
        candidates_examined: examined,
        budget_exhausted,
    })
}

fn found(cert: Certificate, examined: usize) -> SearchOutcome {
    SearchOutcome {
        certificate: Some(cert),
        conclusive: true,
        candidates_examined: examined,
        budget_exhausted: false,
    }
}

/// Columns of the unitary Schur factor; for a generic combination `A + tB`
/// of a commuting pair these span a flag of joint invariant subspaces.
fn eigenvectors(m: &CMat) -> CMat {
    linalg::schur(m).0
}
