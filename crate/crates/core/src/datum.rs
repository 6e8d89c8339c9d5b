//! Enhanced ADHM data, their equation residuals, the gauge action and
//! seeded generation of stable examples.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, c, commutator, eye, fro, fro_sqr, zeros, CMat, C64};
use crate::rng::{self, SeededRng};

/// Default relative residual tolerance: a datum is valid when every residual
/// is at most `tau * (1 + |X|^2)`.
pub const DEFAULT_TAU: f64 = 1e-10;

/// Gauge blocks with reciprocal condition number below this are rejected.
pub const GAUGE_RCOND_MIN: f64 = 1e-12;

/// Minimum coordinate separation between sampled points.
pub const POINT_SEPARATION: f64 = 1e-3;

const MAX_GENERATION_ATTEMPTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimVector {
    pub r: usize,
    pub c: usize,
    pub cprime: usize,
}

impl DimVector {
    pub fn new(r: usize, c: usize, cprime: usize) -> Result<Self> {
        if r == 0 || c == 0 {
            return Err(Error::Domain(format!(
                "dimension vector needs r >= 1 and c >= 1, got ({r},{c},{cprime})"
            )));
        }
        Ok(DimVector { r, c, cprime })
    }

    /// Dimension of `V/Im F` for injective `F`.
    pub fn quotient_c(&self) -> usize {
        self.c.saturating_sub(self.cprime)
    }

    /// Flag semantics require `c' <= c`.
    pub fn check_flag(&self) -> Result<()> {
        if self.cprime > self.c {
            return Err(Error::Domain(format!(
                "c' = {} exceeds c = {}; F cannot be injective",
                self.cprime, self.c
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.r, self.c, self.cprime)
    }
}

impl FromStr for DimVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().trim_matches(|ch| ch == '(' || ch == ')').split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Format(format!("expected dims as r,c,cprime, got {s:?}")));
        }
        let mut v = [0usize; 3];
        for (slot, p) in v.iter_mut().zip(parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("not a non-negative integer: {p:?}")))?;
        }
        DimVector::new(v[0], v[1], v[2])
    }
}

/// The eight maps of an enhanced datum, in the order `A,B,I,J,A',B',F,G`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnhancedMaps {
    pub a: CMat,
    pub b: CMat,
    pub i: CMat,
    pub j: CMat,
    pub aprime: CMat,
    pub bprime: CMat,
    pub f: CMat,
    pub g: CMat,
}

impl EnhancedMaps {
    pub fn zero(dims: DimVector) -> Self {
        let DimVector { r, c, cprime: cp } = dims;
        EnhancedMaps {
            a: zeros(c, c),
            b: zeros(c, c),
            i: zeros(c, r),
            j: zeros(r, c),
            aprime: zeros(cp, cp),
            bprime: zeros(cp, cp),
            f: zeros(c, cp),
            g: zeros(cp, c),
        }
    }
}

pub const MATRIX_KEYS: [&str; 8] = ["A", "B", "I", "J", "Aprime", "Bprime", "F", "G"];

#[derive(Clone, Debug, PartialEq)]
pub struct EnhancedDatum {
    dims: DimVector,
    maps: EnhancedMaps,
}

fn expected_shapes(dims: DimVector) -> [(usize, usize); 8] {
    let DimVector { r, c, cprime: cp } = dims;
    [(c, c), (c, c), (c, r), (r, c), (cp, cp), (cp, cp), (c, cp), (cp, c)]
}

impl EnhancedDatum {
    pub fn new(dims: DimVector, maps: EnhancedMaps) -> Result<Self> {
        let got = [
            maps.a.shape(),
            maps.b.shape(),
            maps.i.shape(),
            maps.j.shape(),
            maps.aprime.shape(),
            maps.bprime.shape(),
            maps.f.shape(),
            maps.g.shape(),
        ];
        for ((key, want), got) in MATRIX_KEYS.iter().zip(expected_shapes(dims)).zip(got) {
            if want != got {
                return Err(Error::dim(*key, want, got));
            }
        }
        Ok(EnhancedDatum { dims, maps })
    }

    /// A plain ADHM datum viewed as an enhanced datum with `c' = 0`.
    pub fn from_adhm(x: &AdhmDatum) -> Result<Self> {
        let dims = DimVector::new(x.r(), x.c(), 0)?;
        let mut maps = EnhancedMaps::zero(dims);
        maps.a = x.a.clone();
        maps.b = x.b.clone();
        maps.i = x.i.clone();
        maps.j = x.j.clone();
        EnhancedDatum::new(dims, maps)
    }

    pub fn dims(&self) -> DimVector {
        self.dims
    }
    pub fn maps(&self) -> &EnhancedMaps {
        &self.maps
    }
    pub fn into_maps(self) -> EnhancedMaps {
        self.maps
    }
    pub fn a(&self) -> &CMat {
        &self.maps.a
    }
    pub fn b(&self) -> &CMat {
        &self.maps.b
    }
    pub fn i(&self) -> &CMat {
        &self.maps.i
    }
    pub fn j(&self) -> &CMat {
        &self.maps.j
    }
    pub fn aprime(&self) -> &CMat {
        &self.maps.aprime
    }
    pub fn bprime(&self) -> &CMat {
        &self.maps.bprime
    }
    pub fn f(&self) -> &CMat {
        &self.maps.f
    }
    pub fn g(&self) -> &CMat {
        &self.maps.g
    }

    fn matrices(&self) -> [&CMat; 8] {
        let m = &self.maps;
        [&m.a, &m.b, &m.i, &m.j, &m.aprime, &m.bprime, &m.f, &m.g]
    }

    /// Squared Frobenius norm of the whole tuple.
    pub fn norm_sqr(&self) -> f64 {
        self.matrices().iter().map(|m| fro_sqr(m)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The plain ADHM part `(A,B,I,J)`.
    pub fn adhm_part(&self) -> AdhmDatum {
        AdhmDatum {
            a: self.maps.a.clone(),
            b: self.maps.b.clone(),
            i: self.maps.i.clone(),
            j: self.maps.j.clone(),
        }
    }

    pub fn residuals(&self) -> Residuals {
        let m = &self.maps;
        let values = [
            fro(&(commutator(&m.a, &m.b) + &m.i * &m.j)),
            fro(&commutator(&m.aprime, &m.bprime)),
            fro(&(&m.a * &m.f - &m.f * &m.aprime)),
            fro(&(&m.b * &m.f - &m.f * &m.bprime)),
            fro(&(&m.j * &m.f)),
            fro(&(&m.g * &m.i)),
            fro(&(&m.f * &m.g)),
            fro(&(&m.g * &m.a - &m.aprime * &m.g)),
            fro(&(&m.g * &m.b - &m.bprime * &m.g)),
        ];
        Residuals { values }
    }

    /// Every residual is at most `tau * (1 + |X|^2)`.
    pub fn is_valid(&self, tau: f64) -> bool {
        self.residuals().max() <= tau * (1.0 + self.norm_sqr())
    }

    pub fn act(&self, g: &GaugeElement) -> Result<EnhancedDatum> {
        act(g, self)
    }

    pub fn to_json(&self) -> Value {
        let mut mats = Map::new();
        for (key, m) in MATRIX_KEYS.iter().zip(self.matrices()) {
            mats.insert((*key).to_string(), matrix_to_json(m));
        }
        json!({
            "dims": {"r": self.dims.r, "c": self.dims.c, "cprime": self.dims.cprime},
            "matrices": Value::Object(mats),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("datum JSON is always serializable")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let dims_v = value
            .get("dims")
            .ok_or_else(|| Error::Format("missing key \"dims\"".into()))?;
        let dims: DimVector = serde_json::from_value(dims_v.clone())?;
        let dims = DimVector::new(dims.r, dims.c, dims.cprime)?;
        let mats = value
            .get("matrices")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Format("missing object \"matrices\"".into()))?;
        let shapes = expected_shapes(dims);
        let mut parsed = Vec::with_capacity(8);
        for (key, shape) in MATRIX_KEYS.iter().zip(shapes) {
            match mats.get(*key) {
                Some(v) => parsed.push(matrix_from_json(key, v, shape)?),
                None if *key == "G" => parsed.push(zeros(shape.0, shape.1)),
                None => return Err(Error::Format(format!("missing matrix \"{key}\""))),
            }
        }
        let mut it = parsed.into_iter();
        let mut next = || it.next().expect("eight matrices parsed");
        let maps = EnhancedMaps {
            a: next(),
            b: next(),
            i: next(),
            j: next(),
            aprime: next(),
            bprime: next(),
            f: next(),
            g: next(),
        };
        EnhancedDatum::new(dims, maps)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(s)?;
        Self::from_json(&value)
    }
}

/// Row-major array of rows, each entry `[re, im]`.
pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(what: &str, v: &Value, shape: (usize, usize)) -> Result<CMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Format(format!("matrix \"{what}\" must be an array of rows")))?;
    // A matrix with zero rows has no way to record its column count.
    if rows.len() != shape.0 {
        let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
        return Err(Error::dim(what, shape, (rows.len(), cols)));
    }
    let mut m = zeros(shape.0, shape.1);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Format(format!("row {i} of \"{what}\" must be an array")))?;
        if row.len() != shape.1 {
            return Err(Error::dim(what, shape, (rows.len(), row.len())));
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(entry).ok_or_else(|| {
                Error::Format(format!("entry ({i},{j}) of \"{what}\" must be [re, im]"))
            })?;
        }
    }
    Ok(m)
}

pub fn parse_complex(v: &Value) -> Option<C64> {
    let pair = v.as_array()?;
    if pair.len() != 2 {
        return None;
    }
    Some(c(pair[0].as_f64()?, pair[1].as_f64()?))
}

pub const RESIDUAL_NAMES: [&str; 9] = [
    "[A,B]+IJ", "[A',B']", "AF-FA'", "BF-FB'", "JF", "GI", "FG", "GA-A'G", "GB-B'G",
];

/// Frobenius norms of the nine enhanced ADHM equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    pub values: [f64; 9],
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        RESIDUAL_NAMES.iter().position(|n| *n == name).map(|k| self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        RESIDUAL_NAMES.iter().copied().zip(self.values.iter().copied())
    }
}

impl Serialize for Residuals {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Named {
            name: &'static str,
            value: f64,
        }
        let list: Vec<Named> = self.iter().map(|(name, value)| Named { name, value }).collect();
        list.serialize(s)
    }
}

/// The plain tuple `(A,B,I,J)`. `c = 0` is allowed so that quotients by a
/// full flag stay representable.
#[derive(Clone, Debug, PartialEq)]
pub struct AdhmDatum {
    pub a: CMat,
    pub b: CMat,
    pub i: CMat,
    pub j: CMat,
}

impl AdhmDatum {
    pub fn new(a: CMat, b: CMat, i: CMat, j: CMat) -> Result<Self> {
        let c = a.nrows();
        let r = i.ncols();
        let checks = [
            ("A", (c, c), a.shape()),
            ("B", (c, c), b.shape()),
            ("I", (c, r), i.shape()),
            ("J", (r, c), j.shape()),
        ];
        for (what, want, got) in checks {
            if want != got {
                return Err(Error::dim(what, want, got));
            }
        }
        if r == 0 {
            return Err(Error::Domain("ADHM datum needs r >= 1".into()));
        }
        Ok(AdhmDatum { a, b, i, j })
    }

    pub fn r(&self) -> usize {
        self.i.ncols()
    }

    pub fn c(&self) -> usize {
        self.a.nrows()
    }

    pub fn residual(&self) -> f64 {
        fro(&(commutator(&self.a, &self.b) + &self.i * &self.j))
    }

    pub fn norm_sqr(&self) -> f64 {
        fro_sqr(&self.a) + fro_sqr(&self.b) + fro_sqr(&self.i) + fro_sqr(&self.j)
    }

    pub fn is_valid(&self, tau: f64) -> bool {
        self.residual() <= tau * (1.0 + self.norm_sqr())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dims": {"r": self.r(), "c": self.c()},
            "matrices": {
                "A": matrix_to_json(&self.a),
                "B": matrix_to_json(&self.b),
                "I": matrix_to_json(&self.i),
                "J": matrix_to_json(&self.j),
            }
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let dims = value
            .get("dims")
            .ok_or_else(|| Error::Format("missing key \"dims\"".into()))?;
        let get = |k: &str| {
            dims.get(k)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .ok_or_else(|| Error::Format(format!("dims.{k} must be a non-negative integer")))
        };
        let (r, cc) = (get("r")?, get("c")?);
        let mats = value
            .get("matrices")
            .ok_or_else(|| Error::Format("missing object \"matrices\"".into()))?;
        let m = |k: &str, shape| {
            mats.get(k)
                .ok_or_else(|| Error::Format(format!("missing matrix \"{k}\"")))
                .and_then(|v| matrix_from_json(k, v, shape))
        };
        AdhmDatum::new(m("A", (cc, cc))?, m("B", (cc, cc))?, m("I", (cc, r))?, m("J", (r, cc))?)
    }
}

/// An element `(h, h')` of `GL(V) x GL(V')`; inverses are cached.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    h: CMat,
    hprime: CMat,
    h_inv: CMat,
    hprime_inv: CMat,
    identity: bool,
}

impl GaugeElement {
    pub fn new(h: CMat, hprime: CMat) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::dim("h", (h.nrows(), h.nrows()), h.shape()));
        }
        if !hprime.is_square() {
            return Err(Error::dim("h'", (hprime.nrows(), hprime.nrows()), hprime.shape()));
        }
        for (block, m) in [("h", &h), ("h'", &hprime)] {
            let rc = linalg::rcond(m);
            if rc < GAUGE_RCOND_MIN {
                return Err(Error::Invertibility { block, rcond: rc });
            }
        }
        let h_inv = linalg::inverse(&h).ok_or(Error::Invertibility { block: "h", rcond: 0.0 })?;
        let hprime_inv = linalg::inverse(&hprime).ok_or(Error::Invertibility { block: "h'", rcond: 0.0 })?;
        let identity = h == eye(h.nrows()) && hprime == eye(hprime.nrows());
        Ok(GaugeElement {
            h,
            hprime,
            h_inv,
            hprime_inv,
            identity,
        })
    }

    pub fn identity(dims: DimVector) -> Self {
        GaugeElement {
            h: eye(dims.c),
            hprime: eye(dims.cprime),
            h_inv: eye(dims.c),
            hprime_inv: eye(dims.cprime),
            identity: true,
        }
    }

    /// Random element `(1 + s N, 1 + s N')` with Gaussian `N, N'`, redrawn until
    /// both blocks have reciprocal condition at least `min_rcond`.
    pub fn random_near_identity(dims: DimVector, spread: f64, min_rcond: f64, rng: &mut SeededRng) -> Self {
        loop {
            let h = eye(dims.c) + rng::normal_matrix(rng, dims.c, dims.c) * c(spread, 0.0);
            let hp = eye(dims.cprime) + rng::normal_matrix(rng, dims.cprime, dims.cprime) * c(spread, 0.0);
            if linalg::rcond(&h) >= min_rcond && linalg::rcond(&hp) >= min_rcond {
                if let Ok(g) = GaugeElement::new(h, hp) {
                    return g;
                }
            }
        }
    }

    /// Haar-ish random unitary pair, from the QR factor of Gaussian matrices.
    pub fn random_unitary(dims: DimVector, rng: &mut SeededRng) -> Self {
        let q = |n: usize, rng: &mut SeededRng| -> CMat {
            if n == 0 {
                return zeros(0, 0);
            }
            rng::normal_matrix(rng, n, n).qr().q()
        };
        let h = q(dims.c, rng);
        let hp = q(dims.cprime, rng);
        GaugeElement {
            h_inv: h.adjoint(),
            hprime_inv: hp.adjoint(),
            h,
            hprime: hp,
            identity: false,
        }
    }

    /// Trusts the caller that `h_inv`, `hprime_inv` are the inverses.
    pub(crate) fn with_inverses(h: CMat, h_inv: CMat, hprime: CMat, hprime_inv: CMat) -> Self {
        GaugeElement {
            h,
            hprime,
            h_inv,
            hprime_inv,
            identity: false,
        }
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }
    pub fn hprime(&self) -> &CMat {
        &self.hprime
    }
    pub fn h_inv(&self) -> &CMat {
        &self.h_inv
    }
    pub fn hprime_inv(&self) -> &CMat {
        &self.hprime_inv
    }
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `self * other`, acting as `other` first.
    pub fn compose(&self, other: &GaugeElement) -> Result<GaugeElement> {
        GaugeElement::new(&self.h * &other.h, &self.hprime * &other.hprime)
    }

    pub fn inverse(&self) -> GaugeElement {
        GaugeElement {
            h: self.h_inv.clone(),
            hprime: self.hprime_inv.clone(),
            h_inv: self.h.clone(),
            hprime_inv: self.hprime.clone(),
            identity: self.identity,
        }
    }

    /// Largest 2-norm condition number of the two blocks.
    pub fn condition_number(&self) -> f64 {
        let k = |m: &CMat| {
            let r = linalg::rcond(m);
            if r > 0.0 {
                1.0 / r
            } else {
                f64::INFINITY
            }
        };
        k(&self.h).max(k(&self.hprime))
    }
}

/// The gauge action `(hAh⁻¹, hBh⁻¹, hI, Jh⁻¹, h'A'h'⁻¹, h'B'h'⁻¹, hFh'⁻¹, h'Gh⁻¹)`.
pub fn act(g: &GaugeElement, x: &EnhancedDatum) -> Result<EnhancedDatum> {
    let d = x.dims;
    if g.h.nrows() != d.c || g.hprime.nrows() != d.cprime {
        return Err(Error::dim("gauge element", (d.c, d.cprime), (g.h.nrows(), g.hprime.nrows())));
    }
    if g.identity {
        return Ok(x.clone());
    }
    let m = &x.maps;
    let (h, hi, hp, hpi) = (&g.h, &g.h_inv, &g.hprime, &g.hprime_inv);
    let maps = EnhancedMaps {
        a: h * &m.a * hi,
        b: h * &m.b * hi,
        i: h * &m.i,
        j: &m.j * hi,
        aprime: hp * &m.aprime * hpi,
        bprime: hp * &m.bprime * hpi,
        f: h * &m.f * hpi,
        g: hp * &m.g * hi,
    };
    EnhancedDatum::new(d, maps)
}

/// `Θ = (θ, θ', θ∞)` with exact rational entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityParameter {
    pub theta: Ratio<i64>,
    pub thetaprime: Ratio<i64>,
    pub thetainf: Ratio<i64>,
}

impl StabilityParameter {
    pub fn new(theta: Ratio<i64>, thetaprime: Ratio<i64>, thetainf: Ratio<i64>) -> Self {
        StabilityParameter {
            theta,
            thetaprime,
            thetainf,
        }
    }

    pub fn from_integers(theta: i64, thetaprime: i64, thetainf: i64) -> Self {
        Self::new(theta.into(), thetaprime.into(), thetainf.into())
    }

    /// Completes `(θ, θ')` with the unique `θ∞` satisfying the relation.
    pub fn completed(dims: DimVector, theta: Ratio<i64>, thetaprime: Ratio<i64>) -> Self {
        let s = theta * dims.c as i64 + thetaprime * dims.cprime as i64;
        Self::new(theta, thetaprime, -s / dims.r as i64)
    }

    /// `(−(c'+1), 1, ·)`, which lies in the chamber `θ' > 0, θ + c'θ' < 0`.
    pub fn default_for(dims: DimVector) -> Self {
        Self::completed(dims, Ratio::from_integer(-(dims.cprime as i64 + 1)), Ratio::from_integer(1))
    }

    /// `c θ + c' θ' + r θ∞ = 0`.
    pub fn satisfies_relation(&self, dims: DimVector) -> bool {
        self.theta * dims.c as i64 + self.thetaprime * dims.cprime as i64 + self.thetainf * dims.r as i64
            == Ratio::from_integer(0)
    }
}

impl fmt::Display for StabilityParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.theta, self.thetaprime, self.thetainf)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerationStyle {
    /// Diagonal `A, B` over distinct points, `F` a coordinate embedding.
    Diagonal,
    /// `(1,2,1)` only: `A = [[a,1],[0,a]]`, `B = [[b,β],[0,b]]`.
    Jordan,
    /// `(1,2,1)` only: `A = a·1`, `B = [[b,1],[0,b]]`.
    JordanMixed,
    /// A random stable quotient lifted through the fiber system, then gauge scrambled.
    Lifted,
}

impl GenerationStyle {
    pub const ALL: [GenerationStyle; 4] = [
        GenerationStyle::Diagonal,
        GenerationStyle::Jordan,
        GenerationStyle::JordanMixed,
        GenerationStyle::Lifted,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GenerationStyle::Diagonal => "diagonal",
            GenerationStyle::Jordan => "jordan",
            GenerationStyle::JordanMixed => "jordan-mixed",
            GenerationStyle::Lifted => "lifted",
        }
    }
}

impl fmt::Display for GenerationStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenerationStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GenerationStyle::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown style {s:?} (diagonal, jordan, jordan-mixed, lifted)")))
    }
}

/// `n` points of `C^2` whose x-coordinates are pairwise separated and whose
/// y-coordinates are pairwise separated by at least [`POINT_SEPARATION`].
pub(crate) fn separated_points(n: usize, rng: &mut SeededRng) -> Result<Vec<(C64, C64)>> {
    let mut pts: Vec<(C64, C64)> = Vec::with_capacity(n);
    let mut tries = 0;
    while pts.len() < n {
        tries += 1;
        if tries > 10_000 {
            return Err(Error::Generation(format!(
                "could not sample {n} separated points after {tries} draws"
            )));
        }
        let p = (rng::complex_box(rng), rng::complex_box(rng));
        let ok = pts
            .iter()
            .all(|q| (q.0 - p.0).norm() >= POINT_SEPARATION && (q.1 - p.1).norm() >= POINT_SEPARATION);
        if ok {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Stable diagonal ADHM datum of type `(r, c)`: coordinate `k` belongs to
/// block `k mod r`, and `I` sends the `b`-th frame vector into block `b`.
pub(crate) fn diagonal_adhm(r: usize, cc: usize, pts: &[(C64, C64)], rng: &mut SeededRng) -> AdhmDatum {
    let a = CMat::from_fn(cc, cc, |i, j| if i == j { pts[i].0 } else { c(0.0, 0.0) });
    let b = CMat::from_fn(cc, cc, |i, j| if i == j { pts[i].1 } else { c(0.0, 0.0) });
    let mut i_mat = zeros(cc, r);
    for k in 0..cc {
        i_mat[(k, k % r)] = rng::complex_away_from_zero(rng, 0.3);
    }
    AdhmDatum {
        a,
        b,
        i: i_mat,
        j: zeros(r, cc),
    }
}

/// Seeded stable datum of the requested type and style; `J = 0` and `G = 0`.
pub fn generate_stable(dims: DimVector, seed: u64, style: GenerationStyle) -> Result<EnhancedDatum> {
    dims.check_flag()?;
    let mut last_err = None;
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = rng::stream(seed, attempt as u64);
        let candidate = match style {
            GenerationStyle::Diagonal => generate_diagonal(dims, &mut rng),
            GenerationStyle::Jordan | GenerationStyle::JordanMixed => generate_jordan(dims, style, &mut rng),
            GenerationStyle::Lifted => generate_lifted(dims, &mut rng),
        };
        match candidate {
            Ok(x) => {
                let tight = x.residuals().max() <= 1e-12 * (1.0 + x.norm_sqr());
                if tight && crate::stability::is_stable(&x).is_stable() {
                    return Ok(x);
                }
                last_err = Some(format!("attempt {attempt}: candidate failed residual or stability check"));
            }
            Err(e @ Error::Domain(_)) => return Err(e),
            Err(e) => last_err = Some(format!("attempt {attempt}: {e}")),
        }
    }
    Err(Error::Generation(format!(
        "no stable {style} datum of type {dims} after {MAX_GENERATION_ATTEMPTS} attempts; last: {}",
        last_err.unwrap_or_default()
    )))
}

fn generate_diagonal(dims: DimVector, rng: &mut SeededRng) -> Result<EnhancedDatum> {
    let pts = separated_points(dims.c, rng)?;
    let x = diagonal_adhm(dims.r, dims.c, &pts, rng);
    let cp = dims.cprime;
    let mut maps = EnhancedMaps::zero(dims);
    maps.aprime = x.a.view((0, 0), (cp, cp)).into_owned();
    maps.bprime = x.b.view((0, 0), (cp, cp)).into_owned();
    maps.f = CMat::from_fn(dims.c, cp, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    maps.a = x.a;
    maps.b = x.b;
    maps.i = x.i;
    EnhancedDatum::new(dims, maps)
}

fn generate_jordan(dims: DimVector, style: GenerationStyle, rng: &mut SeededRng) -> Result<EnhancedDatum> {
    if dims != (DimVector { r: 1, c: 2, cprime: 1 }) {
        return Err(Error::Domain(format!("{style} style is only defined for dims (1,2,1), got {dims}")));
    }
    let ap = rng::complex_box(rng);
    let bp = rng::complex_box(rng);
    let mu = rng::complex_box(rng);
    let (one, zero) = (c(1.0, 0.0), c(0.0, 0.0));
    let (a, b) = match style {
        GenerationStyle::Jordan => {
            let b12 = rng::complex_box(rng);
            (
                CMat::from_row_slice(2, 2, &[ap, one, zero, ap]),
                CMat::from_row_slice(2, 2, &[bp, b12, zero, bp]),
            )
        }
        _ => (
            CMat::from_row_slice(2, 2, &[ap, zero, zero, ap]),
            CMat::from_row_slice(2, 2, &[bp, one, zero, bp]),
        ),
    };
    let maps = EnhancedMaps {
        a,
        b,
        i: CMat::from_column_slice(2, 1, &[mu, one]),
        j: zeros(1, 2),
        aprime: CMat::from_element(1, 1, ap),
        bprime: CMat::from_element(1, 1, bp),
        f: CMat::from_column_slice(2, 1, &[one, zero]),
        g: zeros(1, 2),
    };
    EnhancedDatum::new(dims, maps)
}

fn generate_lifted(dims: DimVector, rng: &mut SeededRng) -> Result<EnhancedDatum> {
    let cq = dims.quotient_c();
    let pts = separated_points(cq, rng)?;
    let x2 = diagonal_adhm(dims.r, cq, &pts, rng);
    let lifted = if dims.cprime == 0 {
        EnhancedDatum::from_adhm(&x2)?
    } else {
        let frame = crate::moduli_maps::vandermonde_frame(dims.cprime, rng.random())?;
        crate::moduli_maps::fiber_lift(&x2, &frame.aprime, &frame.bprime, rng.random())?
    };
    let g = GaugeElement::random_near_identity(dims, 0.25, 0.1, rng);
    act(&g, &lifted)
}
