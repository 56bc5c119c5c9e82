//! Gaussian two-mode states in shot-noise units: symplectic spectra, quantum
//! discord, PPT separability, and continuous-variable QKD key rates through a
//! lossy entangling-cloner channel.

pub mod channel;
pub mod error;
pub mod figures;
pub mod keyrate;
pub mod oracle;
pub mod states;
pub mod sweep;
pub mod symplectic;
pub mod threshold;

pub use channel::{
    apply_entangling_cloner, condition_on_heterodyne, condition_on_homodyne,
    excess_noise_delta, excess_noise_epsilon, ChannelOutput, ChannelParams, CorrelationMatrix,
};
pub use error::{Error, Result};
pub use keyrate::{
    all_protocols, secret_key_rate, Detection, KeyRateReport, ProtocolConfig, Reconciliation,
    SourceState,
};
pub use oracle::symplectic_spectrum_oracle;
pub use states::{
    e_min, gaussian_discord, gaussian_discord_in, make_discord_state, make_epr_state,
    DiscordStateParams, EprStateParams,
};
pub use symplectic::{
    entropy_g, partial_transpose, ppt_min_eigenvalue, symplectic_spectrum, von_neumann_entropy,
    LogBase, Mat2, SymplecticInvariants, SymplecticSpectrum, TwoModeCovariance,
};
pub use threshold::{
    bisect_sign_change, crossing_transmission, discord_threshold, transmission_threshold,
    DiscordThreshold,
};
pub use figures::{generate as generate_figure, Figure, FigureOptions, FigureTable};
pub use sweep::{run_sweep, ResultRow, Spacing, SweepParam, SweepSpec};
