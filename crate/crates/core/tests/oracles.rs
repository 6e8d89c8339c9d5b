//! Library results checked against independent computations done here:
//! Gaussian elimination instead of SVD, brute-force Krylov words instead of
//! closure iteration, grid scans instead of Schur forms, and entrywise sums
//! instead of traces.

use adhm_core::datum::{DimVector, EnhancedMaps, GaugeElement, GenerationStyle, StabilityParameter};
use adhm_core::deformation::{build_complex, cohomology_dims, term_dims, tangent_basis, Variant};
use adhm_core::geometry::{balance_flow, moment_map, omega_pair, FlowOptions};
use adhm_core::linalg::{c, char_poly, determinant, eye, hstack, singular_values, zeros, DEFAULT_RTOL};
use adhm_core::moduli_maps::{
    fiber_lift, from_diagonals, monad_ranks, nested_hilbert_datum, nested_hilbert_points, quotient_rep,
    quotient_support, MonadPencil, PointConfiguration,
};
use adhm_core::stability::{chamber_check, chi_character, invariant_closure};
use adhm_core::{generate_stable, rng, CMat, EnhancedDatum, C64};

fn dv(r: usize, c: usize, p: usize) -> DimVector {
    DimVector::new(r, c, p).unwrap()
}

/// Rank by Gaussian elimination with complete pivoting, pivots below
/// `tol · max|entry|` counting as zero.
fn elimination_rank(m: &CMat, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        let mut best = (0.0, k, k);
        for i in k..rows {
            for j in k..cols {
                let v = a[(i, j)].norm();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        a.swap_rows(k, best.1);
        a.swap_columns(k, best.2);
        let pivot = a[(k, k)];
        for i in k + 1..rows {
            let f = a[(i, k)] / pivot;
            for j in k..cols {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn cohomology_ranks_agree_with_elimination() {
    for (d, h1) in [(dv(1, 2, 1), 4), (dv(2, 3, 1), 11), (dv(3, 2, 1), 10), (dv(1, 3, 1), 6)] {
        for style in [GenerationStyle::Diagonal, GenerationStyle::Lifted] {
            let x = generate_stable(d, 21, style).unwrap();
            let k = build_complex(&x, Variant::ReducedCprime1).unwrap();
            let rep = cohomology_dims(&k, DEFAULT_RTOL);
            let ranks = [&k.d0, &k.d1, &k.d2].map(|m| elimination_rank(m, 1e-10));
            assert_eq!(rep.ranks, ranks, "{d} {style}");
            let t = k.term_dims;
            let h = [
                t[0] - ranks[0],
                t[1] - ranks[1] - ranks[0],
                t[2] - ranks[2] - ranks[1],
                t[3] - ranks[2],
            ];
            assert_eq!(h, [0, h1, 0, 0]);
            assert_eq!(rep.h, h);
        }
    }
}

#[test]
fn general_variant_at_121_has_h2_one() {
    let x = generate_stable(dv(1, 2, 1), 4, GenerationStyle::Lifted).unwrap();
    let k = build_complex(&x, Variant::General).unwrap();
    let ranks = [&k.d0, &k.d1, &k.d2].map(|m| elimination_rank(m, 1e-10));
    assert_eq!(k.term_dims, [5, 16, 10, 2]);
    assert_eq!(ranks, [5, 7, 2]);
    let rep = cohomology_dims(&k, DEFAULT_RTOL);
    assert_eq!(rep.h, [0, 4, 1, 0]);
}

#[test]
fn term_dimensions_from_block_sizes() {
    // C0 = End V + End V', C1 = 2 End V + Hom(W,V) + Hom(V,W) + 2 End V' + Hom(V',V).
    for (r, cc, p) in [(1, 2, 1), (2, 3, 1), (3, 2, 1), (2, 3, 2)] {
        let c0 = cc * cc + p * p;
        let c1 = 2 * cc * cc + 2 * r * cc + 2 * p * p + cc * p;
        let c2_general = cc * cc + 2 * cc * p + r * p + p * p;
        let c3 = cc * p;
        assert_eq!(term_dims(dv(r, cc, p), Variant::General), [c0, c1, c2_general, c3]);
        if p == 1 {
            assert_eq!(term_dims(dv(r, cc, p), Variant::ReducedCprime1), [c0, c1, c2_general - 1, c3]);
        }
    }
    let euler = |t: [usize; 4]| -(t[0] as i64) + t[1] as i64 - t[2] as i64 + t[3] as i64;
    assert_eq!(euler(term_dims(dv(2, 3, 1), Variant::General)), 10);
}

/// Dimension of the span of all words of length `< c` in `A, B` applied to `I`.
fn krylov_words_dim(a: &CMat, b: &CMat, i: &CMat) -> usize {
    let n = a.nrows();
    let mut layer = vec![i.clone()];
    let mut all = vec![i.clone()];
    for _ in 1..n.max(1) {
        let mut next = Vec::new();
        for w in &layer {
            next.push(a * w);
            next.push(b * w);
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    elimination_rank(&hstack(&all.iter().collect::<Vec<_>>()), 1e-10)
}

#[test]
fn invariant_closure_matches_word_span() {
    let (z, one) = (c(0.0, 0.0), c(1.0, 0.0));
    let a = CMat::from_row_slice(2, 2, &[z, z, z, one]);
    let b = CMat::from_row_slice(2, 2, &[z, z, z, c(2.0, 0.0)]);
    let stable_i = CMat::from_column_slice(2, 1, &[one, one]);
    let line_i = CMat::from_column_slice(2, 1, &[one, z]);
    assert_eq!(invariant_closure(&a, &b, &stable_i), 2);
    assert_eq!(invariant_closure(&a, &b, &line_i), 1);
    let mut g = rng::seeded(5);
    for n in 1..=4 {
        for k in 0..6 {
            let a = rng::normal_matrix(&mut g, n, n);
            // Block upper triangular B keeps the first k coordinates invariant.
            let mut b = rng::normal_matrix(&mut g, n, n);
            let mut a = a;
            let split = k % n;
            if split > 0 {
                for i in split..n {
                    for j in 0..split {
                        a[(i, j)] = z;
                        b[(i, j)] = z;
                    }
                }
            }
            let mut i = rng::normal_matrix(&mut g, n, 1);
            if split > 0 {
                for row in split..n {
                    i[(row, 0)] = z;
                }
            }
            let want = krylov_words_dim(&a, &b, &i);
            assert_eq!(invariant_closure(&a, &b, &i), want, "n={n} split={split}");
        }
    }
}

#[test]
fn chamber_and_character_arithmetic() {
    let theta = StabilityParameter::from_integers(-2, 1, 3);
    // 2·(−2) + 1·1 + 1·3 = 0, θ' > 0, θ + c'θ' = −1 < 0.
    assert!(theta.satisfies_relation(dv(1, 2, 1)));
    assert!(chamber_check(dv(1, 2, 1), &theta).unwrap());
    let g = GaugeElement::new(eye(2) * c(2.0, 0.0), eye(1)).unwrap();
    let chi = chi_character(&theta, &g).unwrap();
    let det = determinant(&(eye(2) * c(2.0, 0.0)));
    assert_eq!(det, c(4.0, 0.0));
    assert!((chi - det * det).norm() < 1e-12);
    assert!((chi - c(16.0, 0.0)).norm() < 1e-12);
}

#[test]
fn quotient_of_diagonal_hand_datum() {
    let (z, one) = (c(0.0, 0.0), c(1.0, 0.0));
    let x = EnhancedDatum::new(
        dv(1, 2, 1),
        EnhancedMaps {
            a: CMat::from_row_slice(2, 2, &[z, z, z, one]),
            b: CMat::from_row_slice(2, 2, &[z, z, z, c(2.0, 0.0)]),
            i: CMat::from_column_slice(2, 1, &[one, one]),
            j: zeros(1, 2),
            aprime: zeros(1, 1),
            bprime: zeros(1, 1),
            f: CMat::from_column_slice(2, 1, &[one, z]),
            g: zeros(1, 2),
        },
    )
    .unwrap();
    assert_eq!(x.residuals().max(), 0.0);
    let q = quotient_rep(&x).unwrap();
    // V'' = span{e2} up to a phase: A'' = 1, B'' = 2, |I''| = 1, J'' = 0.
    assert!((q.a[(0, 0)] - one).norm() < 1e-14);
    assert!((q.b[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
    assert!((q.i[(0, 0)].norm() - 1.0).abs() < 1e-14);
    assert_eq!(q.j[(0, 0)], z);
}

/// Smallest singular value of `[−B′ − y, A′ + x]`.
fn kernel_pencil_sigma(ap: &CMat, bp: &CMat, x: C64, y: C64) -> f64 {
    let p = ap.nrows();
    let m = hstack(&[&(-(bp + eye(p) * y)), &(ap + eye(p) * x)]);
    *singular_values(&m).last().unwrap()
}

/// Points of a coarse grid over `[−1.5, 1.5]²` (real parts) where the pencil
/// nearly drops rank, refined by local zoom.
fn grid_oracle_real(ap: &CMat, bp: &CMat) -> Vec<(f64, f64)> {
    let steps = 60;
    let h = 3.0 / steps as f64;
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let (x, y) = (-1.5 + i as f64 * h, -1.5 + j as f64 * h);
            if kernel_pencil_sigma(ap, bp, c(x, 0.0), c(y, 0.0)) > h {
                continue;
            }
            let (mut cx, mut cy, mut half) = (x, y, h);
            while half > 1e-11 {
                let mut best = (f64::INFINITY, cx, cy);
                for a in -4..=4 {
                    for b in -4..=4 {
                        let (px, py) = (cx + a as f64 * half / 4.0, cy + b as f64 * half / 4.0);
                        let s = kernel_pencil_sigma(ap, bp, c(px, 0.0), c(py, 0.0));
                        if s < best.0 {
                            best = (s, px, py);
                        }
                    }
                }
                cx = best.1;
                cy = best.2;
                half /= 4.0;
            }
            if kernel_pencil_sigma(ap, bp, c(cx, 0.0), c(cy, 0.0)) < 1e-9
                && !found.iter().any(|p| (p.0 - cx).abs() < 1e-6 && (p.1 - cy).abs() < 1e-6)
            {
                found.push((cx, cy));
            }
        }
    }
    found
}

#[test]
fn supports_match_grid_rank_oracle() {
    let x2 = generate_stable(dv(1, 2, 0), 9, GenerationStyle::Lifted).unwrap().adhm_part();
    let (alpha, beta) = (0.3, -0.7);
    let ap = CMat::from_element(1, 1, c(alpha, 0.0));
    let bp = CMat::from_element(1, 1, c(beta, 0.0));
    let x = fiber_lift(&x2, &ap, &bp, 1).unwrap();
    let supp = quotient_support(&x).unwrap();
    let oracle = grid_oracle_real(x.aprime(), x.bprime());
    assert_eq!(oracle.len(), 1);
    assert_eq!(supp.length(), 1);
    let p = supp.points[0];
    assert!((p.x - c(oracle[0].0, 0.0)).norm() < 1e-6 && (p.y - c(oracle[0].1, 0.0)).norm() < 1e-6);
    assert!((p.x - c(-alpha, 0.0)).norm() < 1e-12 && (p.y - c(-beta, 0.0)).norm() < 1e-12);

    let frame = from_diagonals(&[c(0.2, 0.0), c(-0.9, 0.0)], &[c(0.5, 0.0), c(1.1, 0.0)]).unwrap();
    let x2 = generate_stable(dv(1, 1, 0), 2, GenerationStyle::Lifted).unwrap().adhm_part();
    let x = fiber_lift(&x2, &frame.aprime, &frame.bprime, 3).unwrap();
    let supp = quotient_support(&x).unwrap();
    let mut oracle = grid_oracle_real(x.aprime(), x.bprime());
    oracle.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(oracle.len(), 2);
    let want = PointConfiguration::reduced(&oracle.iter().map(|p| (c(p.0, 0.0), c(p.1, 0.0))).collect::<Vec<_>>());
    assert!(supp.distance(&want).unwrap() < 1e-6);
    assert!((oracle[0].0 + 0.2).abs() < 1e-6 && (oracle[1].0 - 0.9).abs() < 1e-6);
}

#[test]
fn monad_fiber_dimension_is_r() {
    let mut g = rng::seeded(77);
    for d in [dv(1, 2, 1), dv(2, 3, 1), dv(3, 2, 1)] {
        let x = generate_stable(d, 6, GenerationStyle::Lifted).unwrap();
        let pencil = MonadPencil::new(x.adhm_part());
        for _ in 0..5 {
            let p = [rng::complex_box(&mut g), rng::complex_box(&mut g), c(1.0, 0.0)];
            let beta = pencil.beta(p);
            let ranks = monad_ranks(&pencil, p, DEFAULT_RTOL).unwrap();
            let rank_beta = elimination_rank(&beta, 1e-10);
            let rank_alpha = elimination_rank(&pencil.alpha(p), 1e-10);
            assert_eq!(ranks.beta.rank, rank_beta);
            assert_eq!(rank_beta, d.c);
            assert_eq!(rank_alpha, d.c);
            let ker_beta = beta.ncols() - rank_beta;
            assert_eq!(ker_beta - rank_alpha, d.r);
            assert!((beta * pencil.alpha(p)).norm() < 1e-12);
        }
    }
}

#[test]
fn nested_hilbert_hand_example() {
    let z1 = PointConfiguration::reduced(&[(c(0.0, 0.0), c(0.0, 0.0))]);
    let z2 = PointConfiguration::reduced(&[(c(0.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(2.0, 0.0))]);
    let x = nested_hilbert_datum(&z1, &z2).unwrap();
    assert_eq!(x.dims(), dv(1, 2, 1));
    assert_eq!(x.a()[(0, 0)], c(1.0, 0.0));
    assert_eq!(x.a()[(1, 1)], c(0.0, 0.0));
    assert_eq!(x.f()[(0, 0)], c(1.0, 0.0));
    assert_eq!(x.residuals().max(), 0.0);
    let (w1, w2) = nested_hilbert_points(&x).unwrap();
    assert!(w1.sorted().distance(&z1.sorted()).unwrap() < 1e-8);
    assert!(w2.sorted().distance(&z2.sorted()).unwrap() < 1e-8);
    assert_eq!(w2.length(), w1.length() + x.dims().cprime);
}

/// `Ω` for `r = 1`, `c' = 1`, written out entrywise.
fn omega_entrywise(u: &adhm_core::TangentVector, v: &adhm_core::TangentVector) -> C64 {
    let n = u.a.nrows();
    let mut s = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += -v.a[(i, k)] * u.b[(k, i)] + v.b[(i, k)] * u.a[(k, i)];
        }
        s += -v.i[(i, 0)] * u.j[(0, i)] + u.i[(i, 0)] * v.j[(0, i)];
    }
    s += -v.aprime[(0, 0)] * u.bprime[(0, 0)] + v.bprime[(0, 0)] * u.aprime[(0, 0)];
    s
}

#[test]
fn omega_matches_entrywise_expansion() {
    let x = generate_stable(dv(1, 2, 1), 12, GenerationStyle::Lifted).unwrap();
    let tb = tangent_basis(&x, Variant::ReducedCprime1, DEFAULT_RTOL).unwrap();
    let ks = tb.kernel_vectors();
    for u in &ks {
        for v in &ks {
            let got = omega_pair(u, v).unwrap();
            assert!((got - omega_entrywise(u, v)).norm() < 1e-13);
        }
    }
}

#[test]
fn flow_preserves_characteristic_polynomials() {
    for seed in 0..4 {
        let x = generate_stable(dv(2, 2, 1), seed, GenerationStyle::Lifted).unwrap();
        let out = balance_flow(&x, &FlowOptions::new(x.dims()));
        assert!(out.converged && out.is_monotone());
        for (before, after) in [(x.a(), out.datum.a()), (x.b(), out.datum.b()), (x.aprime(), out.datum.aprime())] {
            for (p, q) in char_poly(before).iter().zip(char_poly(after)) {
                assert!((p - q).norm() <= 1e-6 * p.norm().max(1.0));
            }
        }
    }
}

#[test]
fn scalar_balanced_point() {
    // (1,1,1) with A = B = A' = B' = 0, J = G = 0: μ_V = |I|² + |F|², μ_V' = −|F|².
    // The level (−θ, −θ') = (2, −1) is met by |F| = 1, |I| = 1.
    let one = CMat::from_element(1, 1, c(1.0, 0.0));
    let x = EnhancedDatum::new(
        dv(1, 1, 1),
        EnhancedMaps {
            a: zeros(1, 1),
            b: zeros(1, 1),
            i: one.clone(),
            j: zeros(1, 1),
            aprime: zeros(1, 1),
            bprime: zeros(1, 1),
            f: one,
            g: zeros(1, 1),
        },
    )
    .unwrap();
    let mu = moment_map(&x);
    assert_eq!(mu.mu_v[(0, 0)], c(2.0, 0.0));
    assert_eq!(mu.mu_vprime[(0, 0)], c(-1.0, 0.0));
    let theta = StabilityParameter::default_for(x.dims());
    assert_eq!(adhm_core::MomentLevel::from_stability(&theta).zeta_v, 2.0);
    assert_eq!(mu.distance_to(&adhm_core::MomentLevel::default_for(x.dims())), 0.0);
}
