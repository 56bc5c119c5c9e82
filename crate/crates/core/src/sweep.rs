//! Parameter sweeps and the flat row format shared by the CLI and the
//! figure presets.

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyrate::{
    secret_key_rate, source_correlations, Detection, ProtocolConfig, Reconciliation, SourceState,
};

pub const CSV_HEADER: [&str; 13] = [
    "state",
    "V",
    "variance",
    "T",
    "W",
    "detection",
    "reconciliation",
    "discord",
    "ppt_nu",
    "i_ab",
    "i_eve",
    "key_rate",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "V_D")]
    InputVariance,
    #[serde(rename = "V_E")]
    EprVariance,
    #[serde(rename = "T")]
    Transmission,
    #[serde(rename = "W")]
    ClonerVariance,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::InputVariance => "V_D",
            SweepParam::EprVariance => "V_E",
            SweepParam::Transmission => "T",
            SweepParam::ClonerVariance => "W",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "v_d" | "vd" => Ok(SweepParam::InputVariance),
            "v_e" | "ve" => Ok(SweepParam::EprVariance),
            "t" => Ok(SweepParam::Transmission),
            "w" => Ok(SweepParam::ClonerVariance),
            other => Err(format!("unknown sweep parameter `{other}` (expected vd, ve, t or w)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(format!("unknown spacing `{other}` (expected linear or log)")),
        }
    }
}

/// `steps` points from `lo` to `hi` inclusive. Linear points are computed as
/// `lo + (hi - lo) * k / (steps - 1)` so that round grids come out exact.
pub fn grid(lo: f64, hi: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid("steps", steps as f64, "need at least 2 grid points"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::invalid("range", hi - lo, "need finite lo <= hi"));
    }
    let last = (steps - 1) as f64;
    let points = match spacing {
        Spacing::Linear => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / last)
            .collect(),
        Spacing::Log => {
            if lo <= 0.0 {
                return Err(Error::invalid("range", lo, "log spacing needs lo > 0"));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..steps)
                .map(|k| match k {
                    0 => lo,
                    k if k == steps - 1 => hi,
                    k => (a + (b - a) * k as f64 / last).exp(),
                })
                .collect()
        }
    };
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub spacing: Spacing,
    /// Values of every parameter that is not swept. The swept one is overwritten.
    pub base: ProtocolConfig,
    pub protocols: Vec<(Detection, Reconciliation)>,
}

impl SweepSpec {
    pub fn new(
        param: SweepParam,
        (lo, hi): (f64, f64),
        steps: usize,
        base: ProtocolConfig,
        protocols: Vec<(Detection, Reconciliation)>,
    ) -> Result<Self> {
        let spec = SweepSpec {
            param,
            lo,
            hi,
            steps,
            spacing: Spacing::Linear,
            base,
            protocols,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Result<Self> {
        self.spacing = spacing;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            return Err(Error::invalid("protocols", 0.0, "select at least one protocol"));
        }
        match (self.param, self.base.source) {
            (SweepParam::InputVariance, SourceState::Epr(_)) => {
                return Err(Error::UnsupportedState("V_D sweep needs the discord state".into()))
            }
            (SweepParam::EprVariance, SourceState::Discord(_)) => {
                return Err(Error::UnsupportedState("V_E sweep needs the EPR state".into()))
            }
            _ => {}
        }
        let points = grid(self.lo, self.hi, self.steps, self.spacing)?;
        // endpoints must be admissible values of the swept parameter
        for v in [points[0], points[points.len() - 1]] {
            self.point(v)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        grid(self.lo, self.hi, self.steps, self.spacing)
    }

    /// Fixed configuration with the swept parameter set to `value`.
    pub fn point(&self, value: f64) -> Result<ProtocolConfig> {
        match self.param {
            SweepParam::InputVariance | SweepParam::EprVariance => {
                self.base.with_source_variance(value)
            }
            SweepParam::Transmission => self.base.with_transmission(value),
            SweepParam::ClonerVariance => self.base.with_cloner_variance(value),
        }
    }
}

/// One grid point of one protocol. Numeric fields are `None` when the point
/// could not be evaluated; `error` then names the failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub state: String,
    #[serde(rename = "V")]
    pub v: f64,
    pub variance: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub detection: Detection,
    pub reconciliation: Reconciliation,
    pub discord: Option<f64>,
    pub ppt_nu: Option<f64>,
    pub i_ab: Option<f64>,
    pub i_eve: Option<f64>,
    pub key_rate: Option<f64>,
    pub error: Option<String>,
}

fn modulation_variance(source: &SourceState) -> f64 {
    match source {
        SourceState::Discord(p) => p.noise(),
        SourceState::Epr(p) => p.variance() - 1.0,
    }
}

impl ResultRow {
    fn skeleton(config: &ProtocolConfig) -> Self {
        ResultRow {
            state: config.source.kind().to_string(),
            v: modulation_variance(&config.source),
            variance: config.source.variance(),
            t: config.channel.transmission(),
            w: config.channel.cloner_variance(),
            detection: config.detection,
            reconciliation: config.reconciliation,
            discord: None,
            ppt_nu: None,
            i_ab: None,
            i_eve: None,
            key_rate: None,
            error: None,
        }
    }

    /// Evaluates every column, failing on the first error.
    pub fn evaluate(config: &ProtocolConfig) -> Result<Self> {
        let (discord, ppt) = source_correlations(&config.source)?;
        let report = secret_key_rate(config)?;
        Ok(ResultRow {
            discord: Some(discord),
            ppt_nu: Some(ppt),
            i_ab: Some(report.i_ab),
            i_eve: Some(report.i_eve),
            key_rate: Some(report.key_rate),
            ..Self::skeleton(config)
        })
    }

    /// Like [`ResultRow::evaluate`] but records a failure in the `error` column.
    pub fn evaluate_or_mark(config: &ProtocolConfig) -> Self {
        Self::evaluate(config).unwrap_or_else(|e| ResultRow {
            error: Some(format!("{}: {e}", e.kind())),
            ..Self::skeleton(config)
        })
    }

    pub fn clamp_negative(mut self) -> Self {
        if let Some(k) = self.key_rate.as_mut() {
            *k = k.max(0.0);
        }
        self
    }

    pub fn csv_record(&self) -> [String; 13] {
        let opt = |x: Option<f64>| x.map(format_number).unwrap_or_default();
        [
            self.state.clone(),
            format_number(self.v),
            format_number(self.variance),
            format_number(self.t),
            format_number(self.w),
            self.detection.to_string(),
            self.reconciliation.to_string(),
            opt(self.discord),
            opt(self.ppt_nu),
            opt(self.i_ab),
            opt(self.i_eve),
            opt(self.key_rate),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".to_string();
    }
    let plain = rounded.to_string();
    let exp = format!("{rounded:e}");
    if plain.len() > exp.len() + 4 {
        exp
    } else {
        plain
    }
}

/// Rows in ascending grid order, protocols in the order given. Points are
/// evaluated in parallel.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    let points = spec.grid()?;
    let configs = points
        .iter()
        .flat_map(|&v| spec.protocols.iter().map(move |&p| (v, p)))
        .map(|(v, (d, r))| Ok(spec.point(v)?.with_protocol(d, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(configs.par_iter().map(ResultRow::evaluate_or_mark).collect())
}

pub fn write_csv<W: io::Write>(rows: &[ResultRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()
}

pub fn write_json<W: io::Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}
