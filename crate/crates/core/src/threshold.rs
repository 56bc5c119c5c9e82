//! Sign-change location by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, ProtocolConfig, SourceState};
use crate::states::gaussian_discord;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_T_BRACKET: (f64, f64) = (0.01, 0.99);
pub const DEFAULT_VD_BRACKET: (f64, f64) = (1.01, 1000.0);

const MAX_STEPS: usize = 200;

/// Bisects `f` on `[lo, hi]` until the bracket is narrower than `tol` and
/// returns its midpoint. An exact zero at an endpoint is returned as is.
pub fn bisect_sign_change<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("bracket", hi - lo, "need finite lo < hi"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", tol, "must be positive"));
    }
    let (mut a, mut b) = (lo, hi);
    let f_lo = f(a)?;
    let f_hi = f(b)?;
    if f_lo == 0.0 {
        return Ok(a);
    }
    if f_hi == 0.0 {
        return Ok(b);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let mut fa = f_lo;
    for _ in 0..MAX_STEPS {
        if b - a < tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Transmission at which the key rate of `config` changes sign.
pub fn transmission_threshold(config: &ProtocolConfig, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect_sign_change(
        |t| Ok(secret_key_rate(&config.with_transmission(t)?)?.key_rate),
        lo,
        hi,
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordThreshold {
    pub input_variance: f64,
    pub discord: f64,
}

/// Sign change of the key rate as the discord-state input variance `V_D`
/// varies on `[lo, hi]`; bisection continues until the discord values at the
/// bracket ends differ by less than `tol`.
pub fn discord_threshold(
    config: &ProtocolConfig,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<DiscordThreshold> {
    if !matches!(config.source, SourceState::Discord(_)) {
        return Err(Error::UnsupportedState(
            "discord threshold needs a discord-state source".into(),
        ));
    }
    let rate = |v_d: f64| -> Result<f64> {
        Ok(secret_key_rate(&config.with_source_variance(v_d)?)?.key_rate)
    };
    let discord_at = |v_d: f64| -> Result<f64> {
        gaussian_discord(&config.source.with_variance(v_d)?.covariance())
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("bracket", hi - lo, "need finite lo < hi"));
    }
    let (mut a, mut b) = (lo, hi);
    let (f_lo, f_hi) = (rate(a)?, rate(b)?);
    let same_sign = f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0;
    if same_sign || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let mut fa = f_lo;
    for _ in 0..MAX_STEPS {
        if (discord_at(b)? - discord_at(a)?).abs() < tol || fa == 0.0 {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = rate(mid)?;
        if fm.signum() == fa.signum() && fm != 0.0 {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let input_variance = if fa == 0.0 { a } else { 0.5 * (a + b) };
    Ok(DiscordThreshold {
        input_variance,
        discord: discord_at(input_variance)?,
    })
}

/// Transmission at which the key rate of `first` overtakes (or falls below)
/// that of `second`.
pub fn crossing_transmission(
    first: &ProtocolConfig,
    second: &ProtocolConfig,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    bisect_sign_change(
        |t| {
            let k1 = secret_key_rate(&first.with_transmission(t)?)?.key_rate;
            let k2 = secret_key_rate(&second.with_transmission(t)?)?.key_rate;
            Ok(k1 - k2)
        },
        lo,
        hi,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::keyrate::{Detection, Reconciliation};

    fn config(src: SourceState, t: f64, d: Detection, r: Reconciliation) -> ProtocolConfig {
        ProtocolConfig::new(d, r, src, ChannelParams::new(t, 1.0).unwrap())
    }

    #[test]
    fn bisects_a_line() {
        let x = bisect_sign_change(|x| Ok(x - 0.3), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-10);
        let x = bisect_sign_change(|x| Ok(0.3 - x), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-10);
    }

    #[test]
    fn endpoint_root_and_errors() {
        assert_eq!(bisect_sign_change(|x| Ok(x), 0.0, 1.0, 1e-6).unwrap(), 0.0);
        match bisect_sign_change(|x| Ok(x + 1.0), 0.0, 1.0, 1e-6) {
            Err(Error::NoSignChange { f_lo, f_hi, .. }) => {
                assert_eq!((f_lo, f_hi), (1.0, 2.0));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            bisect_sign_change(|x| Ok(x), 1.0, 0.0, 1e-6),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn heterodyne_reverse_cutoff() {
        let c = config(
            SourceState::discord(40.0).unwrap(),
            0.5,
            Detection::Heterodyne,
            Reconciliation::Reverse,
        );
        let t = transmission_threshold(&c, 0.01, 0.99, DEFAULT_TOL).unwrap();
        assert!((t - 0.55).abs() <= 0.02, "{t}");
    }

    #[test]
    fn transparent_window_has_no_sign_change() {
        let c = config(
            SourceState::discord(40.0).unwrap(),
            1.0,
            Detection::Homodyne,
            Reconciliation::Reverse,
        );
        assert!(matches!(
            transmission_threshold(&c, 0.9, 1.0, DEFAULT_TOL),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn discord_threshold_heterodyne_direct() {
        let c = config(
            SourceState::discord(40.0).unwrap(),
            0.75,
            Detection::Heterodyne,
            Reconciliation::Direct,
        );
        let th = discord_threshold(&c, 1.01, 1000.0, DEFAULT_TOL).unwrap();
        assert!((th.discord - 0.22).abs() <= 0.02, "{th:?}");
        let before = secret_key_rate(&c.with_source_variance(th.input_variance * 0.99).unwrap())
            .unwrap()
            .key_rate;
        let after = secret_key_rate(&c.with_source_variance(th.input_variance * 1.01).unwrap())
            .unwrap()
            .key_rate;
        assert!(before < 0.0 && after > 0.0);
    }

    #[test]
    fn discord_threshold_rejects_epr_source() {
        let c = config(
            SourceState::epr(40.0).unwrap(),
            0.75,
            Detection::Heterodyne,
            Reconciliation::Direct,
        );
        assert!(matches!(
            discord_threshold(&c, 1.01, 1000.0, DEFAULT_TOL),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn heterodyne_direct_crossing() {
        let (d, r) = (Detection::Heterodyne, Reconciliation::Direct);
        let epr = config(SourceState::epr(40.0).unwrap(), 0.5, d, r);
        let disc = config(SourceState::discord(40.0).unwrap(), 0.5, d, r);
        let t = crossing_transmission(&epr, &disc, 0.6, 0.99, DEFAULT_TOL).unwrap();
        assert!((t - 0.78).abs() <= 0.02, "{t}");
    }
}
