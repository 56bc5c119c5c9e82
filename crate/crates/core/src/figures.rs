//! Preset sweeps behind the discord, PPT and key-rate plots.

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, Detection, ProtocolConfig, Reconciliation, SourceState};
use crate::states::gaussian_discord;
use crate::sweep::{format_number, grid, Spacing};
use crate::symplectic::ppt_min_eigenvalue;

pub const FIGURE_POINTS: usize = 201;
pub const FIGURE_VD_RANGE: (f64, f64) = (1.0, 1000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig5d,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig2,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig5c,
        Figure::Fig5d,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig5c => "fig5c",
            Figure::Fig5d => "fig5d",
        }
    }

    /// Protocol of the key-rate panels; `None` for the discord/PPT plot.
    pub fn protocol(self) -> Option<(Detection, Reconciliation)> {
        use Detection::*;
        use Reconciliation::*;
        match self {
            Figure::Fig2 => None,
            Figure::Fig3a | Figure::Fig5a => Some((Homodyne, Direct)),
            Figure::Fig3b | Figure::Fig5b => Some((Homodyne, Reverse)),
            Figure::Fig4a | Figure::Fig5c => Some((Heterodyne, Direct)),
            Figure::Fig4b | Figure::Fig5d => Some((Heterodyne, Reverse)),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub cloner_variance: f64,
    pub points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            cloner_variance: 1.0,
            points: FIGURE_POINTS,
        }
    }
}

/// Column-labelled table; `None` cells are points that failed to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl FigureTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(format_number).unwrap_or_default()))?;
        }
        w.flush()
    }
}

const GROUP: [&str; 3] = ["i_ab", "i_eve", "key_rate"];

fn group_columns(labels: &[String]) -> impl Iterator<Item = String> + '_ {
    labels
        .iter()
        .flat_map(|l| GROUP.iter().map(move |k| format!("{l}.{k}")))
}

fn curve_cells(config: &ProtocolConfig) -> [Option<f64>; 3] {
    match secret_key_rate(config) {
        Ok(r) => [Some(r.i_ab), Some(r.i_eve), Some(r.key_rate)],
        Err(_) => [None; 3],
    }
}

pub fn generate(figure: Figure, options: &FigureOptions) -> Result<FigureTable> {
    ChannelParams::new(1.0, options.cloner_variance)?;
    let Some((d, r)) = figure.protocol() else {
        return discord_figure(options);
    };
    match figure {
        Figure::Fig3a | Figure::Fig3b | Figure::Fig4a | Figure::Fig4b => {
            let sources = [
                ("discord_vd40", SourceState::discord(40.0)?),
                ("discord_vd1000", SourceState::discord(1000.0)?),
                ("epr_ve40", SourceState::epr(40.0)?),
            ];
            transmission_figure(d, r, &sources, options)
        }
        _ => {
            let mut ts = vec![0.75, 0.8, 0.9];
            if figure == Figure::Fig5b {
                ts.push(0.3);
            }
            discord_axis_figure(d, r, &ts, options)
        }
    }
}

fn discord_figure(options: &FigureOptions) -> Result<FigureTable> {
    let (lo, hi) = FIGURE_VD_RANGE;
    let rows = grid(lo, hi, options.points, Spacing::Log)?
        .into_par_iter()
        .map(|v_d| {
            let sigma = SourceState::discord(v_d)?.covariance();
            Ok(vec![
                Some(v_d),
                gaussian_discord(&sigma).ok(),
                ppt_min_eigenvalue(&sigma).ok(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable {
        columns: vec!["V_D".into(), "D_AB".into(), "ppt".into()],
        rows,
    })
}

/// Key rate against `T` for each labelled source.
fn transmission_figure(
    d: Detection,
    r: Reconciliation,
    sources: &[(&str, SourceState)],
    options: &FigureOptions,
) -> Result<FigureTable> {
    let rows = grid(0.0, 1.0, options.points, Spacing::Linear)?
        .into_par_iter()
        .map(|t| {
            let channel = ChannelParams::new(t, options.cloner_variance)?;
            let mut row = vec![Some(t)];
            for (_, source) in sources {
                row.extend(curve_cells(&ProtocolConfig::new(d, r, *source, channel)));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = sources.iter().map(|(l, _)| l.to_string()).collect();
    let mut columns = vec!["T".to_string()];
    columns.extend(group_columns(&labels));
    Ok(FigureTable { columns, rows })
}

/// Key rate of the discord state against its own discord, one curve per
/// transmission.
fn discord_axis_figure(
    d: Detection,
    r: Reconciliation,
    transmissions: &[f64],
    options: &FigureOptions,
) -> Result<FigureTable> {
    let (lo, hi) = FIGURE_VD_RANGE;
    let rows = grid(lo, hi, options.points, Spacing::Log)?
        .into_par_iter()
        .map(|v_d| {
            let source = SourceState::discord(v_d)?;
            let mut row = vec![Some(v_d), gaussian_discord(&source.covariance()).ok()];
            for &t in transmissions {
                let channel = ChannelParams::new(t, options.cloner_variance)?;
                row.extend(curve_cells(&ProtocolConfig::new(d, r, source, channel)));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = transmissions.iter().map(|t| format!("t{t}")).collect();
    let mut columns = vec!["V_D".to_string(), "D_AB".to_string()];
    columns.extend(group_columns(&labels));
    Ok(FigureTable { columns, rows })
}
