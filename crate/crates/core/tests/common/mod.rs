//! Brute-force reference constructions shared by the integration tests.
#![allow(dead_code)]

use discord_qkd::{SymplecticSpectrum, TwoModeCovariance};
use rand::Rng;

pub type M8 = [[f64; 8]; 8];
pub type M4 = [[f64; 4]; 4];

/// Full covariance of (A, B_out, E', E'') built from the source, Eve's EPR
/// pair of variance `w`, and a beam splitter of transmission `t` acting on
/// B and one arm of the EPR pair:
/// `b_out = sqrt(t) b + sqrt(1-t) e0`, `e' = sqrt(t) e0 - sqrt(1-t) b`.
pub fn brute_force_cloner(source: &TwoModeCovariance, t: f64, w: f64) -> M8 {
    let s = source.to_matrix();
    let mut input = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            input[i][j] = s[i][j];
        }
    }
    let c = (w * w - 1.0).sqrt();
    for q in 0..2 {
        input[4 + q][4 + q] = w;
        input[6 + q][6 + q] = w;
        let sign = if q == 0 { 1.0 } else { -1.0 };
        input[4 + q][6 + q] = sign * c;
        input[6 + q][4 + q] = sign * c;
    }
    let mut sym = [[0.0; 8]; 8];
    for (i, row) in sym.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    for q in 0..2 {
        let (b, e) = (2 + q, 4 + q);
        sym[b][b] = st;
        sym[b][e] = sr;
        sym[e][b] = -sr;
        sym[e][e] = st;
    }
    let mut tmp = [[0.0; 8]; 8];
    let mut out = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            tmp[i][j] = (0..8).map(|k| sym[i][k] * input[k][j]).sum();
        }
    }
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = (0..8).map(|k| tmp[i][k] * sym[j][k]).sum();
        }
    }
    out
}

/// 4x4 covariance of two of the four modes.
pub fn modes(m: &M8, first: usize, second: usize) -> M4 {
    let idx = [2 * first, 2 * first + 1, 2 * second, 2 * second + 1];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[idx[i]][idx[j]];
        }
    }
    out
}

/// Eve's modes conditioned on an x-quadrature homodyne measurement of `mode`.
pub fn schur_homodyne(m: &M8, mode: usize) -> M4 {
    let eve = modes(m, 2, 3);
    let x = 2 * mode;
    let v = m[x][x];
    let mut out = eve;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] -= m[4 + i][x] * m[4 + j][x] / v;
        }
    }
    out
}

/// Eve's modes conditioned on a heterodyne measurement of `mode`:
/// `sigma_E - C (sigma_M + I)^-1 C^T`.
pub fn schur_heterodyne(m: &M8, mode: usize) -> M4 {
    let eve = modes(m, 2, 3);
    let k = 2 * mode;
    let (a, b, c, d) = (m[k][k] + 1.0, m[k][k + 1], m[k + 1][k], m[k + 1][k + 1] + 1.0);
    let det = a * d - b * c;
    let inv = [[d / det, -b / det], [-c / det, a / det]];
    let mut out = eve;
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    acc += m[4 + i][k + p] * inv[p][q] * m[4 + j][k + q];
                }
            }
            out[i][j] -= acc;
        }
    }
    out
}

pub fn covariance(m: &M4) -> TwoModeCovariance {
    // symmetrise away rounding before the constructor checks symmetry
    let mut s = *m;
    for i in 0..4 {
        for j in 0..i {
            let avg = 0.5 * (s[i][j] + s[j][i]);
            s[i][j] = avg;
            s[j][i] = avg;
        }
    }
    TwoModeCovariance::from_matrix(s).expect("finite symmetric blocks")
}

pub fn spectra_close(x: &SymplecticSpectrum, y: &SymplecticSpectrum, rel: f64) -> bool {
    let scale = x.nu_plus.abs().max(1.0);
    (x.nu_plus - y.nu_plus).abs() <= rel * scale && (x.nu_minus - y.nu_minus).abs() <= rel * scale
}

/// Largest coupling that keeps `(alpha I, beta I, gamma Z)` physical.
pub fn max_coupling(alpha: f64, beta: f64) -> f64 {
    let r = (alpha + beta).powi(2) - (2.0 + (alpha - beta).abs()).powi(2);
    0.5 * r.max(0.0).sqrt()
}

/// Random physical standard-form source with variances up to `10^3`.
pub fn random_source<R: Rng>(rng: &mut R) -> TwoModeCovariance {
    let alpha = 10f64.powf(rng.random_range(0.0..3.0));
    let beta = 10f64.powf(rng.random_range(0.0..3.0));
    let gamma = rng.random_range(-1.0..1.0) * max_coupling(alpha, beta);
    TwoModeCovariance::block_form(alpha, beta, gamma)
}

pub fn random_channel<R: Rng>(rng: &mut R) -> (f64, f64) {
    let t = rng.random_range(0.0..=1.0);
    let w = 1.0 + 10f64.powf(rng.random_range(-3.0..2.0)) * rng.random_range(0.0..1.0);
    (t, w)
}
