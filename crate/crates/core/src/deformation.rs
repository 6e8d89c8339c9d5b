//! The deformation complex `C⁰ → C¹ → C² → C³` of an enhanced datum, as
//! explicit matrices in the column-major vectorized basis, and its
//! cohomology dimensions by numerical rank.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::datum::{DimVector, EnhancedDatum};
use crate::error::{Error, Result};
use crate::linalg::{
    self, column_space, commutator, fro, null_space, unvectorize, vectorize, zeros, CMat, CVec, RankDecision,
    C64, DEFAULT_RTOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    General,
    /// The `c' = 1` complex without the `End(V')` summand in `C²`.
    ReducedCprime1,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::General => "general",
            Variant::ReducedCprime1 => "reduced-cprime1",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Variant::General),
            "reduced" | "reduced-cprime1" => Ok(Variant::ReducedCprime1),
            _ => Err(Error::Format(format!("unknown variant {s:?} (general, reduced)"))),
        }
    }
}

/// `[C⁰, C¹, C², C³]` for the given type and variant.
pub fn term_dims(dims: DimVector, variant: Variant) -> [usize; 4] {
    let DimVector { r, c, cprime: p } = dims;
    let c2_extra = match variant {
        Variant::General => p * p,
        Variant::ReducedCprime1 => 0,
    };
    [
        c * c + p * p,
        2 * c * c + 2 * p * p + 2 * r * c + c * p,
        c * c + 2 * c * p + r * p + c2_extra,
        c * p,
    ]
}

/// A first-order deformation `(a, b, i, j, a', b', f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub a: CMat,
    pub b: CMat,
    pub i: CMat,
    pub j: CMat,
    pub aprime: CMat,
    pub bprime: CMat,
    pub f: CMat,
}

impl TangentVector {
    pub fn zero(dims: DimVector) -> Self {
        let DimVector { r, c, cprime: p } = dims;
        TangentVector {
            a: zeros(c, c),
            b: zeros(c, c),
            i: zeros(c, r),
            j: zeros(r, c),
            aprime: zeros(p, p),
            bprime: zeros(p, p),
            f: zeros(c, p),
        }
    }

    fn blocks(&self) -> [&CMat; 7] {
        [&self.a, &self.b, &self.i, &self.j, &self.aprime, &self.bprime, &self.f]
    }

    pub fn to_vec(&self) -> CVec {
        let data: Vec<C64> = self.blocks().iter().flat_map(|m| m.as_slice().to_vec()).collect();
        CVec::from_vec(data)
    }

    pub fn from_vec(dims: DimVector, v: &[C64]) -> Result<Self> {
        let DimVector { r, c, cprime: p } = dims;
        let shapes = [(c, c), (c, c), (c, r), (r, c), (p, p), (p, p), (c, p)];
        let total: usize = shapes.iter().map(|(m, n)| m * n).sum();
        if v.len() != total {
            return Err(Error::dim("tangent vector", (total, 1), (v.len(), 1)));
        }
        let mut at = 0;
        let mut take = |(m, n): (usize, usize)| {
            let out = unvectorize(m, n, &v[at..at + m * n]);
            at += m * n;
            out
        };
        Ok(TangentVector {
            a: take(shapes[0]),
            b: take(shapes[1]),
            i: take(shapes[2]),
            j: take(shapes[3]),
            aprime: take(shapes[4]),
            bprime: take(shapes[5]),
            f: take(shapes[6]),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        TangentVector {
            a: &self.a * s,
            b: &self.b * s,
            i: &self.i * s,
            j: &self.j * s,
            aprime: &self.aprime * s,
            bprime: &self.bprime * s,
            f: &self.f * s,
        }
    }
}

/// `d₀(h, h') = ([h,A], [h,B], hI, −Jh, [h',A'], [h',B'], hF − Fh')`.
pub fn apply_d0(x: &EnhancedDatum, h: &CMat, hp: &CMat) -> TangentVector {
    TangentVector {
        a: commutator(h, x.a()),
        b: commutator(h, x.b()),
        i: h * x.i(),
        j: -(x.j() * h),
        aprime: commutator(hp, x.aprime()),
        bprime: commutator(hp, x.bprime()),
        f: h * x.f() - x.f() * hp,
    }
}

/// Image of a tangent vector under `d₁`: `(c1, c2, c3, c4, c5)`, with `c5`
/// omitted in the reduced variant.
pub fn apply_d1(x: &EnhancedDatum, t: &TangentVector, variant: Variant) -> Vec<CMat> {
    let (a, b, i, j, ap, bp, f) = (x.a(), x.b(), x.i(), x.j(), x.aprime(), x.bprime(), x.f());
    let mut out = vec![
        commutator(&t.a, b) + commutator(a, &t.b) + i * &t.j + &t.i * j,
        a * &t.f + &t.a * f - f * &t.aprime - &t.f * ap,
        b * &t.f + &t.b * f - f * &t.bprime - &t.f * bp,
        &t.j * f + j * &t.f,
    ];
    if variant == Variant::General {
        out.push(commutator(&t.aprime, bp) + commutator(ap, &t.bprime));
    }
    out
}

/// `d₂(c1..c5) = c1F + Bc2 − c2B' + c3A' − Ac3 − Ic4 − Fc5`.
pub fn apply_d2(x: &EnhancedDatum, parts: &[CMat]) -> CMat {
    let (a, b, i, ap, bp, f) = (x.a(), x.b(), x.i(), x.aprime(), x.bprime(), x.f());
    let mut out = &parts[0] * f + b * &parts[1] - &parts[1] * bp + &parts[2] * ap - a * &parts[2] - i * &parts[3];
    if let Some(c5) = parts.get(4) {
        out -= f * c5;
    }
    out
}

fn c2_shapes(dims: DimVector, variant: Variant) -> Vec<(usize, usize)> {
    let DimVector { r, c, cprime: p } = dims;
    let mut s = vec![(c, c), (c, p), (c, p), (r, p)];
    if variant == Variant::General {
        s.push((p, p));
    }
    s
}

fn stack(parts: &[CMat]) -> CVec {
    let data: Vec<C64> = parts.iter().flat_map(|m| m.as_slice().to_vec()).collect();
    CVec::from_vec(data)
}

fn split(v: &[C64], shapes: &[(usize, usize)]) -> Vec<CMat> {
    let mut at = 0;
    shapes
        .iter()
        .map(|&(m, n)| {
            let out = unvectorize(m, n, &v[at..at + m * n]);
            at += m * n;
            out
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct DeformationComplex {
    pub variant: Variant,
    pub dims: DimVector,
    pub term_dims: [usize; 4],
    pub d0: CMat,
    pub d1: CMat,
    pub d2: CMat,
}

pub fn build_complex(x: &EnhancedDatum, variant: Variant) -> Result<DeformationComplex> {
    let dims = x.dims();
    if variant == Variant::ReducedCprime1 && dims.cprime != 1 {
        return Err(Error::Domain(format!(
            "the reduced complex needs c' = 1, got dims {dims}"
        )));
    }
    let td = term_dims(dims, variant);
    let (c, p) = (dims.c, dims.cprime);
    let d0 = linalg::linear_map_matrix(td[1], td[0], |e| {
        let h = unvectorize(c, c, &e[..c * c]);
        let hp = unvectorize(p, p, &e[c * c..]);
        apply_d0(x, &h, &hp).to_vec()
    });
    let d1 = linalg::linear_map_matrix(td[2], td[1], |e| {
        let t = TangentVector::from_vec(dims, e).expect("basis vector has C1 length");
        stack(&apply_d1(x, &t, variant))
    });
    let shapes = c2_shapes(dims, variant);
    let d2 = linalg::linear_map_matrix(td[3], td[2], |e| vectorize(&apply_d2(x, &split(e, &shapes))));
    Ok(DeformationComplex {
        variant,
        dims,
        term_dims: td,
        d0,
        d1,
        d2,
    })
}

impl DeformationComplex {
    /// `(‖D1·D0‖, ‖D2·D1‖)`.
    pub fn chain_residuals(&self) -> (f64, f64) {
        (fro(&(&self.d1 * &self.d0)), fro(&(&self.d2 * &self.d1)))
    }

    pub fn euler_characteristic(&self) -> i64 {
        let t = self.term_dims.map(|v| v as i64);
        -t[0] + t[1] - t[2] + t[3]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyReport {
    pub variant: Variant,
    pub term_dims: [usize; 4],
    pub h: [usize; 4],
    pub ranks: [usize; 3],
    pub decisions: [RankDecision; 3],
    /// Smallest gap ratio among the three rank cuts.
    #[serde(serialize_with = "linalg::serialize_finite")]
    pub min_gap_ratio: f64,
    /// A rank cut had gap ratio below the acceptance threshold, or the ranks
    /// were inconsistent with a complex.
    pub flagged: bool,
    pub chain_residuals: [f64; 2],
}

pub fn cohomology_dims(k: &DeformationComplex, rtol: f64) -> CohomologyReport {
    let decisions = [
        linalg::rank(&k.d0, rtol),
        linalg::rank(&k.d1, rtol),
        linalg::rank(&k.d2, rtol),
    ];
    let [r0, r1, r2] = decisions.map(|d| d.rank);
    let t = k.term_dims;
    let raw = [
        t[0] as i64 - r0 as i64,
        t[1] as i64 - r1 as i64 - r0 as i64,
        t[2] as i64 - r2 as i64 - r1 as i64,
        t[3] as i64 - r2 as i64,
    ];
    let consistent = raw.iter().all(|&v| v >= 0);
    let min_gap_ratio = decisions.iter().map(|d| d.gap_ratio).fold(f64::INFINITY, f64::min);
    let (c01, c12) = k.chain_residuals();
    CohomologyReport {
        variant: k.variant,
        term_dims: t,
        h: raw.map(|v| v.max(0) as usize),
        ranks: [r0, r1, r2],
        decisions,
        min_gap_ratio,
        flagged: !consistent || decisions.iter().any(|d| !d.is_reliable()),
        chain_residuals: [c01, c12],
    }
}

/// Bases for `ker D1`, its gauge part `im D0`, and `H¹` representatives.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub dims: DimVector,
    /// Orthonormal columns spanning `ker D1`.
    pub kernel: CMat,
    /// Orthonormal columns spanning `im D0`.
    pub gauge: CMat,
    /// `D0 · gauge_preimages = gauge`, columns in `C⁰`.
    pub gauge_preimages: CMat,
    /// Orthonormal complement of `im D0` inside `ker D1`.
    pub h1: CMat,
    pub kernel_decision: RankDecision,
    pub gauge_decision: RankDecision,
    pub flagged: bool,
}

impl TangentBasis {
    pub fn h1_vectors(&self) -> Vec<TangentVector> {
        columns_as_tangents(self.dims, &self.h1)
    }

    pub fn kernel_vectors(&self) -> Vec<TangentVector> {
        columns_as_tangents(self.dims, &self.kernel)
    }

    /// `(h, h')` blocks of the k-th gauge preimage.
    pub fn gauge_generator(&self, k: usize) -> (CMat, CMat) {
        let (c, p) = (self.dims.c, self.dims.cprime);
        let col = self.gauge_preimages.column(k);
        let s = col.as_slice();
        (unvectorize(c, c, &s[..c * c]), unvectorize(p, p, &s[c * c..]))
    }
}

fn columns_as_tangents(dims: DimVector, m: &CMat) -> Vec<TangentVector> {
    m.column_iter()
        .map(|c| TangentVector::from_vec(dims, c.as_slice()).expect("column has C1 length"))
        .collect()
}

pub fn tangent_basis(x: &EnhancedDatum, variant: Variant, rtol: f64) -> Result<TangentBasis> {
    let k = build_complex(x, variant)?;
    let (kernel, kernel_decision) = null_space(&k.d1, rtol);
    let (u, sigma, v) = linalg::svd_sorted(&k.d0);
    let gauge_decision = linalg::decide_rank(&sigma, k.d0.nrows(), k.d0.ncols(), rtol);
    let g = gauge_decision.rank;
    let gauge = u.columns(0, g).into_owned();
    let mut gauge_preimages = v.columns(0, g).into_owned();
    for (j, s) in sigma.iter().take(g).enumerate() {
        gauge_preimages.column_mut(j).scale_mut(1.0 / s);
    }
    let projected = &kernel - &gauge * (gauge.adjoint() * &kernel);
    let (h1_full, _) = column_space(&projected, rtol);
    let h1_dim = kernel.ncols().saturating_sub(g);
    let consistent = h1_full.ncols() == h1_dim;
    let h1 = h1_full.columns(0, h1_dim.min(h1_full.ncols())).into_owned();
    Ok(TangentBasis {
        dims: x.dims(),
        kernel,
        gauge,
        gauge_preimages,
        h1,
        flagged: !consistent || !kernel_decision.is_reliable() || !gauge_decision.is_reliable(),
        kernel_decision,
        gauge_decision,
    })
}

/// `dim ker D0`: the dimension of the infinitesimal stabilizer.
pub fn stabilizer_dim(x: &EnhancedDatum) -> usize {
    let c0 = x.dims().c.pow(2) + x.dims().cprime.pow(2);
    let d0 = linalg::linear_map_matrix(term_dims(x.dims(), Variant::General)[1], c0, |e| {
        let (c, p) = (x.dims().c, x.dims().cprime);
        apply_d0(x, &unvectorize(c, c, &e[..c * c]), &unvectorize(p, p, &e[c * c..])).to_vec()
    });
    c0 - linalg::rank(&d0, DEFAULT_RTOL).rank
}
