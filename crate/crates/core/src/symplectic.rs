//! Two-mode covariance-matrix algebra.
//!
//! Matrices are in shot-noise units (vacuum quadrature variance = 1) with the
//! quadrature ordering `(X1, Y1, X2, Y2)`. A two-mode covariance is stored as
//! its three 2x2 blocks `[[A, C], [C^T, B]]`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below `1 - NON_PHYSICAL_TOL` a symplectic eigenvalue is reported as non-physical.
pub const NON_PHYSICAL_TOL: f64 = 1e-6;
/// Symplectic eigenvalues within this distance below 1 are treated as exactly 1.
pub const CLAMP_TOL: f64 = 1e-9;

/// `a*b - c*d` with a single rounding error (Kahan's FMA trick).
#[inline]
pub(crate) fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let err = (-c).mul_add(d, w);
    a.mul_add(b, -w) + err
}

/// Logarithm base used by the entropy functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    /// log2, information in bits.
    #[default]
    Bits,
    /// Natural log, information in nats.
    Nats,
}

impl LogBase {
    fn scale(self) -> f64 {
        match self {
            LogBase::Bits => std::f64::consts::LOG2_E,
            LogBase::Nats => 1.0,
        }
    }
}

/// Real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl Mat2 {
    pub const fn new(xx: f64, xy: f64, yx: f64, yy: f64) -> Self {
        Mat2 { xx, xy, yx, yy }
    }

    pub const fn zero() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Pauli Z, `diag(1, -1)`.
    pub const fn pauli_z() -> Self {
        Mat2::new(1.0, 0.0, 0.0, -1.0)
    }

    /// One block of the symplectic form, `[[0, 1], [-1, 0]]`.
    pub const fn omega() -> Self {
        Mat2::new(0.0, 1.0, -1.0, 0.0)
    }

    /// Projector onto the measured quadrature, `diag(1, 0)`.
    pub const fn x_projector() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn diag(x: f64, y: f64) -> Self {
        Mat2::new(x, 0.0, 0.0, y)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Mat2::diag(s, s)
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn to_rows(self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.yx, self.yy]]
    }

    pub fn det(self) -> f64 {
        diff_of_products(self.xx, self.yy, self.xy, self.yx)
    }

    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }

    pub fn transpose(self) -> Self {
        Mat2::new(self.xx, self.yx, self.xy, self.yy)
    }

    pub fn scale(self, s: f64) -> Self {
        Mat2::new(self.xx * s, self.xy * s, self.yx * s, self.yy * s)
    }

    pub fn is_finite(self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yx.is_finite() && self.yy.is_finite()
    }

    pub fn is_symmetric(self) -> bool {
        self.xy == self.yx
    }

    pub fn is_diagonal(self) -> bool {
        self.xy == 0.0 && self.yx == 0.0
    }

    pub fn max_abs(self) -> f64 {
        self.xx
            .abs()
            .max(self.xy.abs())
            .max(self.yx.abs())
            .max(self.yy.abs())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.xx + o.xx, self.xy + o.xy, self.yx + o.yx, self.yy + o.yy)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.xx - o.xx, self.xy - o.xy, self.yx - o.yx, self.yy - o.yy)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.xx * o.xx + self.xy * o.yx,
            self.xx * o.xy + self.xy * o.yy,
            self.yx * o.xx + self.yy * o.yx,
            self.yx * o.xy + self.yy * o.yy,
        )
    }
}

/// Symmetric 4x4 covariance `[[A, C], [C^T, B]]` of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCovariance {
    a: Mat2,
    b: Mat2,
    c: Mat2,
}

impl TwoModeCovariance {
    /// Builds a covariance from its blocks. `A` and `B` must be symmetric and
    /// every entry finite.
    pub fn new(a: Mat2, b: Mat2, c: Mat2) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::DegenerateMatrix("non-finite entry".into()));
        }
        if !a.is_symmetric() || !b.is_symmetric() {
            return Err(Error::DegenerateMatrix(
                "diagonal blocks must be symmetric".into(),
            ));
        }
        Ok(TwoModeCovariance { a, b, c })
    }

    /// The standard form `(alpha I, beta I, gamma Z)` shared by every source state.
    pub fn block_form(alpha: f64, beta: f64, gamma: f64) -> Self {
        TwoModeCovariance {
            a: Mat2::scaled_identity(alpha),
            b: Mat2::scaled_identity(beta),
            c: Mat2::pauli_z().scale(gamma),
        }
    }

    pub fn vacuum() -> Self {
        TwoModeCovariance::block_form(1.0, 1.0, 0.0)
    }

    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self> {
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != m[j][i] {
                    return Err(Error::DegenerateMatrix("matrix is not symmetric".into()));
                }
            }
        }
        TwoModeCovariance::new(
            Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1]),
            Mat2::new(m[2][2], m[2][3], m[3][2], m[3][3]),
            Mat2::new(m[0][2], m[0][3], m[1][2], m[1][3]),
        )
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            [a.xx, a.xy, c.xx, c.xy],
            [a.yx, a.yy, c.yx, c.yy],
            [c.xx, c.yx, b.xx, b.xy],
            [c.xy, c.yy, b.yx, b.yy],
        ]
    }

    pub fn a(&self) -> Mat2 {
        self.a
    }

    pub fn b(&self) -> Mat2 {
        self.b
    }

    pub fn c(&self) -> Mat2 {
        self.c
    }

    /// True when no X quadrature is correlated with any Y quadrature.
    pub fn is_xy_decoupled(&self) -> bool {
        self.a.is_diagonal() && self.b.is_diagonal() && self.c.is_diagonal()
    }

    /// Determinant of the assembled 4x4 matrix.
    pub fn det(&self) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        if self.is_xy_decoupled() {
            // det sigma = det P * det Q for the X block P and the Y block Q.
            let p = diff_of_products(a.xx, b.xx, c.xx, c.xx);
            let q = diff_of_products(a.yy, b.yy, c.yy, c.yy);
            return p * q;
        }
        let det_a = a.det();
        if det_a.abs() > 1e-12 * a.max_abs().powi(2).max(f64::MIN_POSITIVE) {
            // Schur complement: det A * det(B - C^T A^-1 C).
            let a_inv = Mat2::new(a.yy, -a.xy, -a.yx, a.xx).scale(1.0 / det_a);
            let schur = b - c.transpose() * a_inv * c;
            return det_a * schur.det();
        }
        det4(&self.to_matrix())
    }

    pub fn invariants(&self) -> SymplecticInvariants {
        let i1 = self.a.det();
        let i2 = self.b.det();
        let i3 = self.c.det();
        SymplecticInvariants {
            i1,
            i2,
            i3,
            i4: self.det(),
            delta: i1 + i2 + 2.0 * i3,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.a.is_symmetric() && self.b.is_symmetric()
    }

    pub fn max_abs_diff(&self, other: &TwoModeCovariance) -> f64 {
        (self.a - other.a)
            .max_abs()
            .max((self.b - other.b).max_abs())
            .max((self.c - other.c).max_abs())
    }
}

/// Laplace expansion of a 4x4 determinant along the first row.
pub(crate) fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let r = |i: usize, k: usize| m[i][cols[k]];
        r(1, 0) * (r(2, 1) * r(3, 2) - r(2, 2) * r(3, 1))
            - r(1, 1) * (r(2, 0) * r(3, 2) - r(2, 2) * r(3, 0))
            + r(1, 2) * (r(2, 0) * r(3, 1) - r(2, 1) * r(3, 0))
    };
    (0..4)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * minor(j)
        })
        .sum()
}

/// The determinants `I1 = det A`, `I2 = det B`, `I3 = det C`, `I4 = det sigma`
/// and `delta = I1 + I2 + 2 I3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub delta: f64,
}

impl SymplecticInvariants {
    /// `delta` of the partially transposed state, `I1 + I2 - 2 I3`.
    pub fn delta_tilde(&self) -> f64 {
        self.i1 + self.i2 - 2.0 * self.i3
    }
}

/// Ordered symplectic eigenvalues of a two-mode covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub nu_plus: f64,
    pub nu_minus: f64,
}

impl SymplecticSpectrum {
    pub fn new(a: f64, b: f64) -> Self {
        SymplecticSpectrum {
            nu_plus: a.max(b),
            nu_minus: a.min(b),
        }
    }
}

/// `delta^2 - 4 det sigma`, evaluated without cancellation when the matrix is
/// XY-decoupled.
fn discriminant(sigma: &TwoModeCovariance, inv: &SymplecticInvariants) -> f64 {
    if sigma.is_xy_decoupled() {
        let (a, b, c) = (sigma.a, sigma.b, sigma.c);
        let diag = diff_of_products(a.xx, a.yy, b.xx, b.yy);
        let m12 = a.xx * c.yy + b.yy * c.xx;
        let m21 = a.yy * c.xx + b.xx * c.yy;
        diag * diag + 4.0 * m12 * m21
    } else {
        inv.delta * inv.delta - 4.0 * inv.i4
    }
}

/// Spectrum from the invariant formula, without the physicality check.
pub(crate) fn spectrum_unchecked(sigma: &TwoModeCovariance) -> Result<SymplecticSpectrum> {
    let inv = sigma.invariants();
    let scale = inv.delta.abs().max(1.0);
    if inv.i4 < -CLAMP_TOL * scale * scale {
        return Err(Error::DegenerateMatrix(format!(
            "negative determinant {}",
            inv.i4
        )));
    }
    let det = inv.i4.max(0.0);
    let mut disc = discriminant(sigma, &inv);
    if disc < 0.0 {
        if disc < -CLAMP_TOL * scale * scale {
            return Err(Error::DegenerateMatrix(format!(
                "negative discriminant {disc}"
            )));
        }
        disc = 0.0;
    }
    let nu_plus_sq = (inv.delta + disc.sqrt()) / 2.0;
    if nu_plus_sq <= 0.0 {
        return Err(Error::DegenerateMatrix(format!(
            "non-positive delta {}",
            inv.delta
        )));
    }
    let nu_minus_sq = det / nu_plus_sq;
    Ok(SymplecticSpectrum::new(nu_plus_sq.sqrt(), nu_minus_sq.sqrt()))
}

/// Symplectic eigenvalues `nu_+- = sqrt((delta +- sqrt(delta^2 - 4 det sigma)) / 2)`.
///
/// Fails with [`Error::NonPhysicalState`] when `nu_- < 1 - 1e-6` or a variance
/// on the diagonal is not positive.
pub fn symplectic_spectrum(sigma: &TwoModeCovariance) -> Result<SymplecticSpectrum> {
    let spectrum = spectrum_unchecked(sigma)?;
    let (a, b) = (sigma.a, sigma.b);
    let positive_diagonal = a.xx > 0.0 && a.yy > 0.0 && b.xx > 0.0 && b.yy > 0.0;
    if !positive_diagonal || spectrum.nu_minus < 1.0 - NON_PHYSICAL_TOL {
        return Err(Error::NonPhysicalState {
            nu_minus: spectrum.nu_minus,
        });
    }
    Ok(spectrum)
}

/// Flips the sign of mode 2's Y quadrature: `B -> Z B Z`, `C -> C Z`.
pub fn partial_transpose(sigma: &TwoModeCovariance) -> TwoModeCovariance {
    let z = Mat2::pauli_z();
    TwoModeCovariance {
        a: sigma.a,
        b: z * sigma.b * z,
        c: sigma.c * z,
    }
}

/// Smallest symplectic eigenvalue of the partially transposed state. Values
/// below 1 mean the state is entangled.
pub fn ppt_min_eigenvalue(sigma: &TwoModeCovariance) -> Result<f64> {
    symplectic_spectrum(sigma)?;
    Ok(spectrum_unchecked(&partial_transpose(sigma))?.nu_minus)
}

/// Entropy of a single thermal mode with symplectic eigenvalue `nu`, in bits.
pub fn entropy_g(nu: f64) -> Result<f64> {
    entropy_g_in(nu, LogBase::Bits)
}

/// `g(nu) = ((nu+1)/2) log((nu+1)/2) - ((nu-1)/2) log((nu-1)/2)` in the given base.
pub fn entropy_g_in(nu: f64, base: LogBase) -> Result<f64> {
    if !(nu >= 1.0 - NON_PHYSICAL_TOL) || !nu.is_finite() {
        return Err(Error::DomainError {
            function: "entropy_g",
            value: nu,
        });
    }
    if nu <= 1.0 {
        return Ok(0.0);
    }
    let x = (nu + 1.0) / 2.0;
    let y = (nu - 1.0) / 2.0;
    // x ln x - y ln y == ln x + y ln(1 + 1/y)
    Ok((x.ln() + y * (1.0 / y).ln_1p()) * base.scale())
}

/// Von Neumann entropy `g(nu_+) + g(nu_-)` in bits.
pub fn von_neumann_entropy(spectrum: &SymplecticSpectrum) -> Result<f64> {
    von_neumann_entropy_in(spectrum, LogBase::Bits)
}

pub fn von_neumann_entropy_in(spectrum: &SymplecticSpectrum, base: LogBase) -> Result<f64> {
    Ok(entropy_g_in(spectrum.nu_plus, base)? + entropy_g_in(spectrum.nu_minus, base)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_spectrum_is_unit() {
        let s = symplectic_spectrum(&TwoModeCovariance::vacuum()).unwrap();
        assert_eq!(s.nu_plus, 1.0);
        assert_eq!(s.nu_minus, 1.0);
    }

    #[test]
    fn epr_spectrum_is_unit_for_any_squeezing() {
        for r in [0.0, 0.1, 0.5, 1.0, 2.0, 3.0] {
            let v = (2.0_f64 * r).cosh();
            let sigma = TwoModeCovariance::block_form(v, v, (v * v - 1.0).sqrt());
            let s = symplectic_spectrum(&sigma).unwrap();
            assert!((s.nu_plus - 1.0).abs() < 1e-9, "r={r} {s:?}");
            assert!((s.nu_minus - 1.0).abs() < 1e-9, "r={r} {s:?}");
        }
    }

    #[test]
    fn discord_v1_invariants_and_spectrum() {
        let sigma = TwoModeCovariance::block_form(2.0, 2.0, 1.0);
        let inv = sigma.invariants();
        assert_eq!((inv.i1, inv.i2, inv.i3, inv.i4, inv.delta), (4.0, 4.0, -1.0, 9.0, 6.0));
        assert_relative_eq!(det4(&sigma.to_matrix()), 9.0, max_relative = 1e-12);
        let s = symplectic_spectrum(&sigma).unwrap();
        assert_relative_eq!(s.nu_plus, 3.0_f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.nu_minus, 3.0_f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn general_blocks_use_generic_path() {
        // A local phase rotation on mode 1 leaves the spectrum unchanged but
        // introduces X-Y correlations.
        let base = TwoModeCovariance::new(
            Mat2::diag(3.0, 2.2),
            Mat2::diag(2.5, 2.5),
            Mat2::diag(1.2, -1.0),
        )
        .unwrap();
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let rot = Mat2::new(c, -s, s, c);
        let a = rot * base.a() * rot.transpose();
        let a = Mat2::new(a.xx, a.xy, a.xy, a.yy);
        let sigma = TwoModeCovariance::new(a, base.b(), rot * base.c()).unwrap();
        assert!(!sigma.is_xy_decoupled());
        let rotated = symplectic_spectrum(&sigma).unwrap();
        let plain = symplectic_spectrum(&base).unwrap();
        assert_relative_eq!(rotated.nu_plus, plain.nu_plus, max_relative = 1e-12);
        assert_relative_eq!(rotated.nu_minus, plain.nu_minus, max_relative = 1e-12);
        assert_relative_eq!(sigma.det(), det4(&sigma.to_matrix()), max_relative = 1e-12);
    }

    #[test]
    fn non_physical_state_is_rejected() {
        let sigma = TwoModeCovariance::block_form(0.5, 0.5, 0.0);
        assert!(matches!(
            symplectic_spectrum(&sigma),
            Err(Error::NonPhysicalState { .. })
        ));
    }

    #[test]
    fn negative_determinant_is_degenerate() {
        let sigma = TwoModeCovariance::block_form(1.0, 1.0, 2.0);
        assert!(matches!(
            symplectic_spectrum(&sigma),
            Err(Error::DegenerateMatrix(_))
        ));
    }

    #[test]
    fn asymmetric_blocks_are_rejected() {
        let a = Mat2::new(2.0, 0.1, 0.0, 2.0);
        assert!(TwoModeCovariance::new(a, Mat2::identity(), Mat2::zero()).is_err());
        let mut m = TwoModeCovariance::vacuum().to_matrix();
        m[0][3] = 0.2;
        assert!(TwoModeCovariance::from_matrix(m).is_err());
    }

    #[test]
    fn partial_transpose_examples() {
        let vac = TwoModeCovariance::vacuum();
        assert_eq!(partial_transpose(&vac), vac);
        let sigma = TwoModeCovariance::block_form(3.0, 2.0, 1.5);
        let pt = partial_transpose(&sigma);
        assert_eq!(pt.a(), Mat2::scaled_identity(3.0));
        assert_eq!(pt.b(), Mat2::scaled_identity(2.0));
        assert_eq!(pt.c(), Mat2::scaled_identity(1.5));
        assert_eq!(partial_transpose(&pt), sigma);
    }

    #[test]
    fn ppt_examples() {
        assert_eq!(ppt_min_eigenvalue(&TwoModeCovariance::vacuum()).unwrap(), 1.0);
        let v: f64 = 40.0;
        let epr = TwoModeCovariance::block_form(v, v, (v * v - 1.0).sqrt());
        let nu = ppt_min_eigenvalue(&epr).unwrap();
        assert_relative_eq!(nu, v - (v * v - 1.0).sqrt(), max_relative = 1e-9);
        assert!(nu < 1.0);
    }

    #[test]
    fn entropy_g_values() {
        assert_eq!(entropy_g(1.0).unwrap(), 0.0);
        assert_relative_eq!(entropy_g(3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(entropy_g(1.0 - 5e-10).unwrap(), 0.0);
        assert_eq!(entropy_g(1.0 - 5e-7).unwrap(), 0.0);
        assert!(matches!(
            entropy_g(1.0 - 2e-6),
            Err(Error::DomainError { .. })
        ));
        assert!(entropy_g(f64::NAN).is_err());
        // 50-digit reference, see tests/oracle/golden.py
        assert_relative_eq!(
            entropy_g(3.0_f64.sqrt()).unwrap(),
            1.1454210973347301,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            entropy_g_in(3.0, LogBase::Nats).unwrap(),
            2.0 * std::f64::consts::LN_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn von_neumann_entropy_examples() {
        assert_eq!(
            von_neumann_entropy(&SymplecticSpectrum::new(1.0, 1.0)).unwrap(),
            0.0
        );
        assert_relative_eq!(
            von_neumann_entropy(&SymplecticSpectrum::new(3.0, 1.0)).unwrap(),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn kahan_difference_is_exact_for_epr_like_inputs() {
        let v: f64 = 1000.0;
        let g = (v * v - 1.0).sqrt();
        let d = diff_of_products(v, v, g, g);
        // the true value for the stored g, computed in double-double
        let exact = twofloat::TwoFloat::new_mul(v, v) - twofloat::TwoFloat::new_mul(g, g);
        assert!((d - f64::from(exact)).abs() <= f64::EPSILON * 2.0);
    }
}
