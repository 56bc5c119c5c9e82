//! Independent route to the symplectic spectrum: moduli of the eigenvalues of
//! `Omega sigma`, found by root-finding on its characteristic polynomial.
//!
//! Everything runs in double-double arithmetic so that the polynomial
//! coefficients keep ~30 digits even when the state is nearly pure and the
//! two symplectic eigenvalues are close together.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::symplectic::{SymplecticSpectrum, TwoModeCovariance};

type Dd = TwoFloat;
type Mat4 = [[Dd; 4]; 4];

const MAX_NEWTON_STEPS: usize = 400;
const RESIDUAL_TOL: f64 = 1e-12;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

fn zero() -> Mat4 {
    [[dd(0.0); 4]; 4]
}

fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zero();
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = dd(0.0);
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn trace(a: &Mat4) -> Dd {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

fn add_diag(a: &Mat4, s: Dd) -> Mat4 {
    let mut out = *a;
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += s;
    }
    out
}

/// `Omega sigma` with `Omega = diag([[0,1],[-1,0]], [[0,1],[-1,0]])`.
fn omega_sigma(sigma: &TwoModeCovariance) -> Mat4 {
    let m = sigma.to_matrix();
    let mut out = zero();
    for pair in [0, 2] {
        for j in 0..4 {
            out[pair][j] = dd(m[pair + 1][j]);
            out[pair + 1][j] = -dd(m[pair][j]);
        }
    }
    out
}

/// Coefficients `[c0, c1, c2, c3]` of `det(xI - M) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0`
/// via the Faddeev-LeVerrier recursion.
fn characteristic_polynomial(m: &Mat4) -> [Dd; 4] {
    let c3 = -trace(m);
    let m2 = mul(m, &add_diag(m, c3));
    let c2 = -trace(&m2) / 2.0;
    let m3 = mul(m, &add_diag(&m2, c2));
    let c1 = -trace(&m3) / 3.0;
    let m4 = mul(m, &add_diag(&m3, c1));
    let c0 = -trace(&m4) / 4.0;
    [c0, c1, c2, c3]
}

/// Newton iteration from the right of the largest real root; for a polynomial
/// whose roots are all real the iterates decrease monotonically.
fn newton_from_right(
    f: impl Fn(Dd) -> (Dd, Dd),
    start: Dd,
) -> Result<Dd> {
    let mut y = start;
    for _ in 0..MAX_NEWTON_STEPS {
        let (value, slope) = f(y);
        if value == dd(0.0) {
            return Ok(y);
        }
        if slope <= dd(0.0) {
            // Landed on (or numerically past) a multiple root.
            return Ok(y);
        }
        let next = y - value / slope;
        if next >= y {
            return Ok(y);
        }
        y = next;
    }
    Err(Error::ConvergenceFailure(format!(
        "Newton iteration did not settle after {MAX_NEWTON_STEPS} steps"
    )))
}

/// Symplectic eigenvalues as eigenvalue moduli of `Omega sigma`, independent of
/// the invariant formula. No physicality check is applied.
pub fn symplectic_spectrum_oracle(sigma: &TwoModeCovariance) -> Result<SymplecticSpectrum> {
    let [c0, c1, c2, c3] = characteristic_polynomial(&omega_sigma(sigma));

    // Roots are +-i nu, so p(i y) = (y^4 - c2 y^2 + c0) + i (c1 y - c3 y^3).
    // The imaginary part vanishes identically for a symmetric sigma.
    let scale = f64::from(c2.abs()).max(f64::from(c0.abs()).sqrt()).max(1.0);
    if f64::from(c3.abs()) > 1e-20 * scale || f64::from(c1.abs()) > 1e-20 * scale * scale {
        return Err(Error::ConvergenceFailure(
            "odd characteristic coefficients do not vanish; sigma is not symmetric".into(),
        ));
    }
    if c2 < dd(0.0) || c0 < dd(0.0) {
        return Err(Error::ConvergenceFailure(
            "characteristic polynomial has no purely imaginary roots".into(),
        ));
    }
    let real_part = |y: Dd| {
        let y2 = y * y;
        let value = (y2 - c2) * y2 + c0;
        let slope = (dd(4.0) * y2 - dd(2.0) * c2) * y;
        (value, slope)
    };

    // Both z = y^2 roots are nonnegative and sum to c2, so sqrt(c2) + 1 bounds them.
    let nu_plus = newton_from_right(real_part, c2.sqrt() + dd(1.0))?;

    // Deflate by (y^2 - nu_plus^2): the remaining factor is y^2 - (c2 - nu_plus^2).
    let rest = c2 - nu_plus * nu_plus;
    let mut nu_minus = if rest > dd(0.0) { rest.sqrt() } else { dd(0.0) };
    if nu_minus > dd(0.0) && nu_minus < nu_plus {
        // Polish against the undeflated polynomial.
        for _ in 0..8 {
            let (value, slope) = real_part(nu_minus);
            if slope == dd(0.0) {
                break;
            }
            let next = nu_minus - value / slope;
            if (next - nu_minus).abs() <= dd(1e-30) * nu_minus {
                nu_minus = next;
                break;
            }
            nu_minus = next;
        }
    }

    for nu in [nu_plus, nu_minus] {
        let (value, _) = real_part(nu);
        // residual measured relative to the size of the individual terms
        let terms = nu * nu * (nu * nu + c2.abs()) + c0.abs();
        if f64::from(value.abs()) > RESIDUAL_TOL * f64::from(terms).max(1.0) {
            return Err(Error::ConvergenceFailure(format!(
                "root {} has residual {}",
                f64::from(nu),
                f64::from(value)
            )));
        }
    }
    Ok(SymplecticSpectrum::new(f64::from(nu_plus), f64::from(nu_minus)))
}
