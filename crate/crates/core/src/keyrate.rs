//! Mutual information, Eve's Holevo-type information and secret key rates for
//! homodyne/heterodyne detection with direct/reverse reconciliation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_entangling_cloner, condition_on_heterodyne, condition_on_homodyne,
    heterodyne_measured_variance, ChannelOutput, ChannelParams,
};
use crate::error::{Error, Result};
use crate::states::{
    gaussian_discord, make_discord_state, make_epr_state, DiscordStateParams, EprStateParams,
};
use crate::symplectic::{
    ppt_min_eigenvalue, symplectic_spectrum, von_neumann_entropy, Mat2, TwoModeCovariance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detection {
    #[serde(rename = "hom")]
    Homodyne,
    #[serde(rename = "het")]
    Heterodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reconciliation {
    #[serde(rename = "dr")]
    Direct,
    #[serde(rename = "rr")]
    Reverse,
}

impl Detection {
    pub const ALL: [Detection; 2] = [Detection::Homodyne, Detection::Heterodyne];

    pub fn as_str(self) -> &'static str {
        match self {
            Detection::Homodyne => "hom",
            Detection::Heterodyne => "het",
        }
    }
}

impl Reconciliation {
    pub const ALL: [Reconciliation; 2] = [Reconciliation::Direct, Reconciliation::Reverse];

    pub fn as_str(self) -> &'static str {
        match self {
            Reconciliation::Direct => "dr",
            Reconciliation::Reverse => "rr",
        }
    }
}

impl fmt::Display for Detection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Reconciliation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Detection {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hom" | "homodyne" => Ok(Detection::Homodyne),
            "het" | "heterodyne" => Ok(Detection::Heterodyne),
            other => Err(format!("unknown detection `{other}` (expected hom or het)")),
        }
    }
}

impl FromStr for Reconciliation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dr" | "direct" => Ok(Reconciliation::Direct),
            "rr" | "reverse" => Ok(Reconciliation::Reverse),
            other => Err(format!("unknown reconciliation `{other}` (expected dr or rr)")),
        }
    }
}

/// The four protocol variants, in a fixed order.
pub fn all_protocols() -> Vec<(Detection, Reconciliation)> {
    Detection::ALL
        .iter()
        .flat_map(|&d| Reconciliation::ALL.iter().map(move |&r| (d, r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SourceState {
    Discord(DiscordStateParams),
    Epr(EprStateParams),
}

impl SourceState {
    pub fn discord(v_d: f64) -> Result<Self> {
        Ok(SourceState::Discord(DiscordStateParams::from_input_variance(v_d)?))
    }

    pub fn epr(v_e: f64) -> Result<Self> {
        Ok(SourceState::Epr(EprStateParams::new(v_e)?))
    }

    pub fn covariance(&self) -> TwoModeCovariance {
        match self {
            SourceState::Discord(p) => make_discord_state(*p),
            SourceState::Epr(p) => make_epr_state(*p),
        }
    }

    /// `V_D` for the discord state, `V_E` for the EPR state.
    pub fn variance(&self) -> f64 {
        match self {
            SourceState::Discord(p) => p.input_variance(),
            SourceState::Epr(p) => p.variance(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SourceState::Discord(_) => "discord",
            SourceState::Epr(_) => "epr",
        }
    }

    /// Same kind of state with a different variance.
    pub fn with_variance(&self, variance: f64) -> Result<Self> {
        match self {
            SourceState::Discord(_) => SourceState::discord(variance),
            SourceState::Epr(_) => SourceState::epr(variance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub detection: Detection,
    pub reconciliation: Reconciliation,
    pub source: SourceState,
    pub channel: ChannelParams,
}

impl ProtocolConfig {
    pub fn new(
        detection: Detection,
        reconciliation: Reconciliation,
        source: SourceState,
        channel: ChannelParams,
    ) -> Self {
        ProtocolConfig {
            detection,
            reconciliation,
            source,
            channel,
        }
    }

    pub fn with_transmission(&self, t: f64) -> Result<Self> {
        Ok(ProtocolConfig {
            channel: ChannelParams::new(t, self.channel.cloner_variance())?,
            ..*self
        })
    }

    pub fn with_cloner_variance(&self, w: f64) -> Result<Self> {
        Ok(ProtocolConfig {
            channel: ChannelParams::new(self.channel.transmission(), w)?,
            ..*self
        })
    }

    pub fn with_source_variance(&self, v: f64) -> Result<Self> {
        Ok(ProtocolConfig {
            source: self.source.with_variance(v)?,
            ..*self
        })
    }

    pub fn with_protocol(&self, detection: Detection, reconciliation: Reconciliation) -> Self {
        ProtocolConfig {
            detection,
            reconciliation,
            ..*self
        }
    }
}

/// Key rate and the intermediate quantities it was built from. All
/// information quantities are in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub i_ab: f64,
    pub i_eve: f64,
    /// `i_ab - i_eve`; negative when no key can be distilled.
    pub key_rate: f64,
    /// Bob's conditional variance: `V_B|A` (homodyne) or `V_B|A^M` (heterodyne).
    pub v_b_given_a: f64,
    pub s_e: f64,
    pub s_e_conditioned: f64,
}

/// `V(X) - <XY>^2 / V(Y)`.
pub fn conditional_variance(v_x: f64, cov_xy: f64, v_y: f64) -> Result<f64> {
    if v_y == 0.0 {
        return Err(Error::DivisionByZero("conditional_variance"));
    }
    Ok(v_x - cov_xy * cov_xy / v_y)
}

fn homodyne_conditional_variance(out: &ChannelOutput) -> Result<f64> {
    conditional_variance(out.v_b, out.gamma_prime, out.v_a)
}

/// `V_B|A^M = V_B - (gamma'^2 / 2) / V_A^M`.
fn heterodyne_conditional_variance(out: &ChannelOutput) -> Result<f64> {
    conditional_variance(
        out.v_b,
        out.gamma_prime / std::f64::consts::SQRT_2,
        heterodyne_measured_variance(out.v_a),
    )
}

/// `1/2 log2(V_B / V_B|A)`; the same for both reconciliation directions.
pub fn mutual_info_homodyne(out: &ChannelOutput) -> Result<f64> {
    let conditional = homodyne_conditional_variance(out)?;
    Ok(0.5 * (out.v_b / conditional).log2())
}

/// `log2(V_B^M / V_B^M|A^M)` with both variances seen behind Bob's heterodyne splitter.
pub fn mutual_info_heterodyne(out: &ChannelOutput) -> Result<f64> {
    let conditional = heterodyne_conditional_variance(out)?;
    let v_bm = heterodyne_measured_variance(out.v_b);
    let v_bm_given_am = heterodyne_measured_variance(conditional);
    Ok((v_bm / v_bm_given_am).log2())
}

/// Eve's covariance conditioned on the reference party's measurement.
pub fn conditioned_eve_covariance(
    config: &ProtocolConfig,
    out: &ChannelOutput,
) -> Result<TwoModeCovariance> {
    let (d, v) = match config.reconciliation {
        Reconciliation::Direct => (&out.d_dr, out.v_a),
        Reconciliation::Reverse => (&out.d_rr, out.v_b),
    };
    match config.detection {
        Detection::Homodyne => condition_on_homodyne(&out.sigma_e, d, v),
        Detection::Heterodyne => condition_on_heterodyne(&out.sigma_e, d, Mat2::scaled_identity(v)),
    }
}

fn eve_entropies(config: &ProtocolConfig, out: &ChannelOutput) -> Result<(f64, f64)> {
    let s_e = von_neumann_entropy(&symplectic_spectrum(&out.sigma_e)?)?;
    let conditioned = conditioned_eve_covariance(config, out)?;
    let s_cond = von_neumann_entropy(&symplectic_spectrum(&conditioned)?)?;
    Ok((s_e, s_cond))
}

/// Holevo-type information `S(E) - S(E|X)` about the reference party's data.
pub fn eve_information(config: &ProtocolConfig, out: &ChannelOutput) -> Result<f64> {
    let (s_e, s_cond) = eve_entropies(config, out)?;
    Ok(s_e - s_cond)
}

pub fn secret_key_rate(config: &ProtocolConfig) -> Result<KeyRateReport> {
    let out = apply_entangling_cloner(&config.source.covariance(), config.channel)?;
    symplectic_spectrum(&out.sigma_ab)?;
    let (i_ab, v_b_given_a) = match config.detection {
        Detection::Homodyne => (mutual_info_homodyne(&out)?, homodyne_conditional_variance(&out)?),
        Detection::Heterodyne => (
            mutual_info_heterodyne(&out)?,
            heterodyne_conditional_variance(&out)?,
        ),
    };
    let (s_e, s_e_conditioned) = eve_entropies(config, &out)?;
    let i_eve = s_e - s_e_conditioned;
    Ok(KeyRateReport {
        i_ab,
        i_eve,
        key_rate: i_ab - i_eve,
        v_b_given_a,
        s_e,
        s_e_conditioned,
    })
}

/// Discord (bits) and PPT eigenvalue of the source state.
pub fn source_correlations(source: &SourceState) -> Result<(f64, f64)> {
    let sigma = source.covariance();
    Ok((gaussian_discord(&sigma)?, ppt_min_eigenvalue(&sigma)?))
}
