//! Norm and trace properties of the t-product algebra, each checked over a
//! caller-chosen number of random instances. Every function panics with the
//! offending case on violation; inequalities get a 1e-9 float-noise slack
//! scaled to the quantities involved.

use super::{random_dims, random_tensor, rng, trace};
use trpca::{conj_transpose, fourier_singular_values, tprod, NormKind, Tensor3f64};

const SLACK: f64 = 1e-9;

pub fn sigma_min(a: &Tensor3f64) -> f64 {
    fourier_singular_values(a)
        .unwrap()
        .iter()
        .map(|d| d.last().copied().unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min)
}

pub fn sigma_max(a: &Tensor3f64) -> f64 {
    a.norm(NormKind::Spectral)
}

fn le(lhs: f64, rhs: f64, label: &str, case: usize) {
    let tol = SLACK * (1.0 + lhs.abs().max(rhs.abs()));
    assert!(
        lhs <= rhs + tol,
        "{label} violated on case {case}: {lhs:.12e} > {rhs:.12e}"
    );
}

pub fn product_frobenius_lower_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (k, k, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            a.norm(NormKind::Fro) * sigma_min(&b),
            ab.norm(NormKind::Fro),
            "|A*B|_F >= |A|_F sigma_min(B)",
            case,
        );
    }
}

pub fn product_l2inf_lower_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (k, k, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            a.norm(NormKind::L2Inf) * sigma_min(&b),
            ab.norm(NormKind::L2Inf),
            "|A*B|_2inf >= |A|_2inf sigma_min(B)",
            case,
        );
    }
}

pub fn spectral_bounded_by_scaled_frobenius(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let dims = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, dims);
        le(
            a.norm(NormKind::Spectral),
            (dims.2 as f64).sqrt() * a.norm(NormKind::Fro),
            "|A|_2 <= sqrt(I3) |A|_F",
            case,
        );
    }
}

pub fn extreme_singular_values_are_lipschitz(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let dims = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, dims);
        let b = random_tensor(&mut r, dims);
        let gap = a.sub(&b).norm(NormKind::Spectral);
        le(
            (sigma_min(&a) - sigma_min(&b)).abs(),
            gap,
            "|sigma_min(A) - sigma_min(B)| <= |A-B|_2",
            case,
        );
        le(
            (sigma_max(&a) - sigma_max(&b)).abs(),
            gap,
            "|sigma_max(A) - sigma_max(B)| <= |A-B|_2",
            case,
        );
    }
}

pub fn product_spectral_lower_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (k, i2, i3) = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, (k, k, i3));
        let b = random_tensor(&mut r, (k, i2, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            sigma_min(&a) * sigma_max(&b),
            sigma_max(&ab),
            "sigma_min(A) sigma_1(B) <= sigma_1(A*B)",
            case,
        );
    }
}

pub fn spectral_triangle_inequality(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let dims = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, dims);
        let b = random_tensor(&mut r, dims);
        le(
            a.add(&b).norm(NormKind::Spectral),
            a.norm(NormKind::Spectral) + b.norm(NormKind::Spectral),
            "|A+B|_2 <= |A|_2 + |B|_2",
            case,
        );
    }
}

pub fn product_spectral_submultiplicative(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let i2 = 2 + (case % 5);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (k, i2, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            ab.norm(NormKind::Spectral),
            a.norm(NormKind::Spectral) * b.norm(NormKind::Spectral),
            "|A*B|_2 <= |A|_2 |B|_2",
            case,
        );
    }
}

pub fn product_frobenius_upper_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let i2 = 2 + (case % 5);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (k, i2, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            ab.norm(NormKind::Fro),
            a.norm(NormKind::Spectral) * b.norm(NormKind::Fro),
            "|A*B|_F <= |A|_2 |B|_F",
            case,
        );
    }
}

pub fn outer_product_infinity_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let i2 = 2 + (case % 5);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (i2, k, i3));
        let abt = tprod(&a, &conj_transpose(&b)).unwrap();
        le(
            abt.norm(NormKind::Inf),
            a.norm(NormKind::L2Inf) * b.norm(NormKind::L2Inf),
            "|A*Bt|_inf <= |A|_2inf |B|_2inf",
            case,
        );
    }
}

pub fn product_l2inf_upper_bound(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, k, i3) = random_dims(&mut r, 2, 6);
        let i2 = 2 + (case % 5);
        let a = random_tensor(&mut r, (i1, k, i3));
        let b = random_tensor(&mut r, (k, i2, i3));
        let ab = tprod(&a, &b).unwrap();
        le(
            ab.norm(NormKind::L2Inf),
            a.norm(NormKind::L1Inf) * b.norm(NormKind::L2Inf),
            "|A*B|_2inf <= |A|_1inf |B|_2inf",
            case,
        );
    }
}

pub fn trace_is_cyclic(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (i1, i2, i3) = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, (i1, i2, i3));
        let b = random_tensor(&mut r, (i2, i1, i3));
        let tab = trace(&tprod(&a, &b).unwrap());
        let tba = trace(&tprod(&b, &a).unwrap());
        let tol = SLACK * (1.0 + tab.abs().max(tba.abs()));
        assert!(
            (tab - tba).abs() <= tol,
            "tr(A*B) != tr(B*A) on case {case}: {tab:.12e} vs {tba:.12e}"
        );
    }
}

pub fn trace_bounded_by_spectral_times_nuclear(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let (n, _, i3) = random_dims(&mut r, 2, 6);
        let a = random_tensor(&mut r, (n, n, i3));
        let b = random_tensor(&mut r, (n, n, i3));
        le(
            trace(&tprod(&a, &b).unwrap()).abs(),
            a.norm(NormKind::Spectral) * b.norm(NormKind::Nuclear),
            "|tr(A*B)| <= |A|_2 |B|_*",
            case,
        );
    }
}

pub fn nuclear_and_frobenius_rank_bounds(instances: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..instances {
        let i3 = 2 + (case % 5);
        let rank = 1 + (case % 3);
        let l = random_tensor(&mut r, (6, rank, i3));
        let rt = random_tensor(&mut r, (rank, 5, i3));
        let a = tprod(&l, &rt).unwrap();
        let rf = rank as f64;
        le(
            a.norm(NormKind::Nuclear),
            rf.sqrt() * a.norm(NormKind::Fro),
            "|A|_* <= sqrt(R) |A|_F",
            case,
        );
        le(
            a.norm(NormKind::Fro).powi(2),
            rf * a.norm(NormKind::Spectral).powi(2),
            "|A|_F^2 <= R |A|_2^2",
            case,
        );
    }
}

/// All thirteen checks with per-family seeds derived from `seed`.
pub const ALL: [(&str, fn(usize, u64)); 13] = [
    ("|A*B|_F >= |A|_F sigma_min(B)", product_frobenius_lower_bound),
    ("|A*B|_2inf >= |A|_2inf sigma_min(B)", product_l2inf_lower_bound),
    ("|A|_2 <= sqrt(I3)|A|_F", spectral_bounded_by_scaled_frobenius),
    ("extreme sigma Lipschitz", extreme_singular_values_are_lipschitz),
    ("sigma_min(A) sigma_1(B) <= sigma_1(A*B)", product_spectral_lower_bound),
    ("spectral triangle", spectral_triangle_inequality),
    ("|A*B|_2 <= |A|_2 |B|_2", product_spectral_submultiplicative),
    ("|A*B|_F <= |A|_2 |B|_F", product_frobenius_upper_bound),
    ("|A*Bt|_inf <= |A|_2inf |B|_2inf", outer_product_infinity_bound),
    ("|A*B|_2inf <= |A|_1inf |B|_2inf", product_l2inf_upper_bound),
    ("tr(A*B) = tr(B*A)", trace_is_cyclic),
    ("|tr(A*B)| <= |A|_2 |B|_*", trace_bounded_by_spectral_times_nuclear),
    ("rank norm bounds", nuclear_and_frobenius_rank_bounds),
];
