//! Lossy channel with an entangling-cloner eavesdropper.
//!
//! Eve holds one arm `E''` of an EPR pair of variance `W` and mixes the other
//! arm `E` with Bob's mode on a beam splitter of transmission `T`; the
//! reflected output is `E'`. Eve's two-mode covariance is ordered `(E', E'')`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{symplectic_spectrum, Mat2, TwoModeCovariance};

/// Relative tolerance used when recognising the `(alpha I, beta I, gamma Z)` form.
const BLOCK_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    transmission: f64,
    cloner_variance: f64,
}

impl ChannelParams {
    pub fn new(transmission: f64, cloner_variance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::invalid("T", transmission, "transmission must lie in [0, 1]"));
        }
        if !(cloner_variance >= 1.0) || !cloner_variance.is_finite() {
            return Err(Error::invalid("W", cloner_variance, "cloner variance must be >= 1"));
        }
        Ok(ChannelParams {
            transmission,
            cloner_variance,
        })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn cloner_variance(&self) -> f64 {
        self.cloner_variance
    }
}

/// Cross-covariance between Eve's modes `(E', E'')` and one measured mode,
/// stacked as a 4x2 matrix `[upper; lower]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub upper: Mat2,
    pub lower: Mat2,
}

impl CorrelationMatrix {
    /// `[zeta I; eta Z]`
    pub fn new(zeta: f64, eta: f64) -> Self {
        CorrelationMatrix {
            upper: Mat2::scaled_identity(zeta),
            lower: Mat2::pauli_z().scale(eta),
        }
    }

    pub fn zero() -> Self {
        CorrelationMatrix::new(0.0, 0.0)
    }

    /// `D K D^T` as a two-mode block matrix.
    fn sandwich(&self, k: Mat2) -> (Mat2, Mat2, Mat2) {
        let (u, l) = (self.upper, self.lower);
        (u * k * u.transpose(), l * k * l.transpose(), u * k * l.transpose())
    }
}

/// Everything the key-rate computation needs after the entangling cloner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutput {
    pub sigma_ab: TwoModeCovariance,
    pub sigma_e: TwoModeCovariance,
    /// Eve-Alice correlations, used for direct reconciliation.
    pub d_dr: CorrelationMatrix,
    /// Eve-Bob correlations, used for reverse reconciliation.
    pub d_rr: CorrelationMatrix,
    pub v_a: f64,
    pub v_b: f64,
    pub gamma_prime: f64,
    pub e_v: f64,
    pub phi: f64,
    pub zeta: f64,
    pub eta: f64,
    pub zeta_prime: f64,
    pub eta_prime: f64,
}

/// Reads `(alpha, beta, gamma)` from a covariance in `(alpha I, beta I, gamma Z)` form.
pub fn standard_form_parameters(sigma: &TwoModeCovariance) -> Result<(f64, f64, f64)> {
    let (a, b, c) = (sigma.a(), sigma.b(), sigma.c());
    let scale = a.max_abs().max(b.max_abs()).max(c.max_abs()).max(1.0);
    let close = |x: f64, y: f64| (x - y).abs() <= BLOCK_FORM_TOL * scale;
    let ok = close(a.xy, 0.0)
        && close(a.xx, a.yy)
        && close(b.xy, 0.0)
        && close(b.xx, b.yy)
        && close(c.xy, 0.0)
        && close(c.yx, 0.0)
        && close(c.xx, -c.yy);
    if !ok {
        return Err(Error::UnsupportedState(
            "source must have blocks (alpha I, beta I, gamma Z)".into(),
        ));
    }
    Ok((a.xx, b.xx, c.xx))
}

/// Sends mode B of `source` through the cloner channel.
pub fn apply_entangling_cloner(
    source: &TwoModeCovariance,
    params: ChannelParams,
) -> Result<ChannelOutput> {
    let (alpha, beta, gamma) = standard_form_parameters(source)?;
    let t = params.transmission;
    let w = params.cloner_variance;
    let loss = 1.0 - t;
    // sqrt(W^2 - 1) without cancellation near W = 1
    let eve_corr = ((w - 1.0) * (w + 1.0)).sqrt();

    let v_a = alpha;
    let v_b = t * beta + loss * w;
    let gamma_prime = t.sqrt() * gamma;
    let e_v = loss * beta + t * w;
    let phi = t.sqrt() * eve_corr;
    let zeta = loss.sqrt() * gamma;
    let eta = 0.0;
    let zeta_prime = (t * loss).sqrt() * (w - beta);
    let eta_prime = loss.sqrt() * eve_corr;

    Ok(ChannelOutput {
        sigma_ab: TwoModeCovariance::block_form(v_a, v_b, gamma_prime),
        sigma_e: TwoModeCovariance::block_form(e_v, w, phi),
        d_dr: CorrelationMatrix::new(zeta, eta),
        d_rr: CorrelationMatrix::new(zeta_prime, eta_prime),
        v_a,
        v_b,
        gamma_prime,
        e_v,
        phi,
        zeta,
        eta,
        zeta_prime,
        eta_prime,
    })
}

/// Excess noise `delta = W - 1`.
pub fn excess_noise_delta(params: ChannelParams) -> f64 {
    params.cloner_variance - 1.0
}

/// Excess noise referred to the channel input, `epsilon = (W - 1)(1 - T)/T`.
pub fn excess_noise_epsilon(params: ChannelParams) -> Result<f64> {
    if params.transmission == 0.0 {
        return Err(Error::DivisionByZero("excess_noise_epsilon"));
    }
    Ok((params.cloner_variance - 1.0) * (1.0 - params.transmission) / params.transmission)
}

fn subtract_update(
    sigma_e: &TwoModeCovariance,
    (upper, lower, cross): (Mat2, Mat2, Mat2),
    factor: f64,
) -> Result<TwoModeCovariance> {
    let a = sigma_e.a() - upper.scale(factor);
    let b = sigma_e.b() - lower.scale(factor);
    let c = sigma_e.c() - cross.scale(factor);
    // keep the diagonal blocks exactly symmetric
    let sym = |m: Mat2| {
        let off = 0.5 * (m.xy + m.yx);
        Mat2::new(m.xx, off, off, m.yy)
    };
    let conditioned = TwoModeCovariance::new(sym(a), sym(b), c)?;
    symplectic_spectrum(&conditioned)?;
    Ok(conditioned)
}

/// Eve's state after the correlated party measured one quadrature by homodyne
/// detection: `sigma_E - D Pi D^T / v_meas`.
pub fn condition_on_homodyne(
    sigma_e: &TwoModeCovariance,
    d: &CorrelationMatrix,
    v_meas: f64,
) -> Result<TwoModeCovariance> {
    if !(v_meas > 0.0) {
        return Err(Error::invalid("v_meas", v_meas, "measured variance must be > 0"));
    }
    subtract_update(sigma_e, d.sandwich(Mat2::x_projector()), 1.0 / v_meas)
}

/// Eve's state after the correlated party measured both quadratures by
/// heterodyne detection: `sigma_E - D (Omega s Omega^T + I) D^T / Lambda` with
/// `Lambda = det s + tr s + 1`.
pub fn condition_on_heterodyne(
    sigma_e: &TwoModeCovariance,
    d: &CorrelationMatrix,
    sigma_meas: Mat2,
) -> Result<TwoModeCovariance> {
    let lambda = sigma_meas.det() + sigma_meas.trace() + 1.0;
    if !(lambda > 0.0) {
        return Err(Error::DegenerateMatrix(format!(
            "heterodyne normalisation {lambda} is not positive"
        )));
    }
    let omega = Mat2::omega();
    let kernel = omega * sigma_meas * omega.transpose() + Mat2::identity();
    subtract_update(sigma_e, d.sandwich(kernel), 1.0 / lambda)
}

/// Variance seen behind the 50:50 splitter of a heterodyne detector, `(v + 1)/2`.
pub fn heterodyne_measured_variance(v: f64) -> f64 {
    (v + 1.0) / 2.0
}
