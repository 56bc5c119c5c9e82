//! Source states and their Gaussian quantum discord.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{
    entropy_g_in, symplectic_spectrum, LogBase, SymplecticInvariants, TwoModeCovariance,
};

/// Below this `|I3|` a state is treated as a product state with zero discord.
pub const PRODUCT_STATE_TOL: f64 = 1e-12;
/// Relative width of the band around the branch boundary of `E_min` in which
/// both branches are evaluated and compared.
const BRANCH_BOUNDARY_TOL: f64 = 1e-12;

/// Gaussian discord state: two coherent states displaced with correlated
/// (amplitude) and anti-correlated (phase) noise of variance `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordStateParams {
    noise: f64,
}

impl DiscordStateParams {
    /// From the discording noise `V >= 0`.
    pub fn new(noise: f64) -> Result<Self> {
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(Error::invalid("V", noise, "discording noise must be >= 0"));
        }
        Ok(DiscordStateParams { noise })
    }

    /// From the input variance `V_D = V + 1 >= 1`.
    pub fn from_input_variance(v_d: f64) -> Result<Self> {
        if !(v_d >= 1.0) || !v_d.is_finite() {
            return Err(Error::invalid("V_D", v_d, "input variance must be >= 1"));
        }
        Ok(DiscordStateParams { noise: v_d - 1.0 })
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn input_variance(&self) -> f64 {
        self.noise + 1.0
    }
}

/// EPR (two-mode squeezed vacuum) state with quadrature variance `V_E = cosh 2r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprStateParams {
    variance: f64,
}

impl EprStateParams {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 1.0) || !variance.is_finite() {
            return Err(Error::invalid("V_E", variance, "EPR variance must be >= 1"));
        }
        Ok(EprStateParams { variance })
    }

    pub fn from_squeezing(r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::invalid("r", r, "squeezing must be >= 0"));
        }
        EprStateParams::new((2.0 * r).cosh())
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn squeezing(&self) -> f64 {
        self.variance.acosh() / 2.0
    }

    /// `sqrt(V_E^2 - 1)`, computed as `sqrt((V_E - 1)(V_E + 1))`.
    pub fn correlation(&self) -> f64 {
        ((self.variance - 1.0) * (self.variance + 1.0)).sqrt()
    }
}

/// `A = B = (V + 1) I`, `C = V Z`.
pub fn make_discord_state(params: DiscordStateParams) -> TwoModeCovariance {
    let v = params.noise();
    TwoModeCovariance::block_form(v + 1.0, v + 1.0, v)
}

/// `A = B = V_E I`, `C = sqrt(V_E^2 - 1) Z`.
pub fn make_epr_state(params: EprStateParams) -> TwoModeCovariance {
    let v = params.variance();
    TwoModeCovariance::block_form(v, v, params.correlation())
}

pub fn symplectic_invariants(sigma: &TwoModeCovariance) -> SymplecticInvariants {
    sigma.invariants()
}

/// Clamps a radicand that is negative only through rounding. Values within
/// rounding noise of zero become exactly zero, since the square root would
/// otherwise amplify `eps` to `sqrt(eps)`.
fn checked_radicand(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value.abs() <= 16.0 * f64::EPSILON * scale {
        Ok(0.0)
    } else if value >= 0.0 {
        Ok(value)
    } else if value >= -1e-9 * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::DegenerateInput(format!("negative radicand {value} in {what}")))
    }
}

fn e_min_branch_a(inv: &SymplecticInvariants) -> Result<f64> {
    let SymplecticInvariants { i1, i2, i3, i4, .. } = *inv;
    let denom = (i2 - 1.0) * (i2 - 1.0);
    if denom <= f64::EPSILON * i2 * i2 {
        return Err(Error::DegenerateInput(
            "E_min branch a) with det B = 1 has a zero denominator".into(),
        ));
    }
    let mixed = (i2 - 1.0) * (i4 - i1);
    let rad = checked_radicand(i3 * i3 + mixed, i3 * i3 + mixed.abs(), "E_min branch a)")?;
    Ok((2.0 * i3 * i3 + mixed + 2.0 * i3.abs() * rad.sqrt()) / denom)
}

fn e_min_branch_b(inv: &SymplecticInvariants) -> Result<f64> {
    let SymplecticInvariants { i1, i2, i3, i4, .. } = *inv;
    let i3_sq = i3 * i3;
    let gap = i4 - i1 * i2;
    let rad = i3_sq * i3_sq + gap * gap - 2.0 * i3_sq * (i4 + i1 * i2);
    let scale = i3_sq * i3_sq + gap * gap + 2.0 * i3_sq * (i4 + i1 * i2).abs();
    let rad = checked_radicand(rad, scale, "E_min branch b)")?;
    Ok((i1 * i2 - i3_sq + i4 - rad.sqrt()) / (2.0 * i2))
}

/// Minimised conditional determinant entering the discord, with the branch
/// chosen by `(I4 - I1 I2)^2 <= I3^2 (I2 + 1)(I1 + I4)`.
pub fn e_min(inv: &SymplecticInvariants) -> Result<f64> {
    let SymplecticInvariants { i1, i2, i3, i4, .. } = *inv;
    let lhs = (i4 - i1 * i2).powi(2);
    let rhs = i3 * i3 * (i2 + 1.0) * (i1 + i4);
    let on_boundary = (lhs - rhs).abs() <= BRANCH_BOUNDARY_TOL * lhs.abs().max(rhs.abs());

    // The branches coincide on the boundary (pure states sit exactly on it).
    // Branch b) cancels catastrophically there, so a) is used whenever defined.
    if on_boundary {
        return e_min_branch_a(inv).or_else(|_| e_min_branch_b(inv));
    }
    if lhs <= rhs {
        e_min_branch_a(inv)
    } else {
        e_min_branch_b(inv)
    }
}

/// Gaussian quantum discord in bits.
pub fn gaussian_discord(sigma: &TwoModeCovariance) -> Result<f64> {
    gaussian_discord_in(sigma, LogBase::Bits)
}

/// `D = f(sqrt I2) - f(nu_-) - f(nu_+) + f(sqrt E_min)` with `f` the thermal
/// entropy function in the given log base.
pub fn gaussian_discord_in(sigma: &TwoModeCovariance, base: LogBase) -> Result<f64> {
    let inv = sigma.invariants();
    let spectrum = symplectic_spectrum(sigma)?;
    if inv.i3.abs() < PRODUCT_STATE_TOL {
        return Ok(0.0);
    }
    let e = e_min(&inv)?;
    let f = |x: f64| entropy_g_in(x, base);
    Ok(f(inv.i2.sqrt())? - f(spectrum.nu_minus)? - f(spectrum.nu_plus)? + f(e.sqrt())?)
}
