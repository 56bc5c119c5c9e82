use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use discord_qkd::keyrate::all_protocols;
use discord_qkd::threshold;
use discord_qkd::{
    self as core, ChannelParams, Detection, Figure, FigureOptions, LogBase, ProtocolConfig,
    Reconciliation, SourceState, Spacing, SweepParam, SweepSpec, TwoModeCovariance,
};

create_exception!(discord_qkd, DiscordQkdError, PyValueError);
create_exception!(discord_qkd, NonPhysicalStateError, DiscordQkdError);
create_exception!(discord_qkd, NoSignChangeError, DiscordQkdError);

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::NonPhysicalState { .. } => NonPhysicalStateError::new_err(e.to_string()),
        core::Error::NoSignChange { .. } => NoSignChangeError::new_err(e.to_string()),
        _ => DiscordQkdError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

/// `None` for "all".
fn parse_or_all<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<Option<T>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(None)
    } else {
        parse(s).map(Some)
    }
}

fn base(nats: bool) -> LogBase {
    if nats {
        LogBase::Nats
    } else {
        LogBase::Bits
    }
}

fn source(state: &str, variance: f64) -> PyResult<SourceState> {
    match state.to_ascii_lowercase().as_str() {
        "discord" => SourceState::discord(variance).map_err(to_py),
        "epr" => SourceState::epr(variance).map_err(to_py),
        other => Err(PyValueError::new_err(format!(
            "unknown state `{other}` (expected discord or epr)"
        ))),
    }
}

fn config(state: &str, variance: f64, t: f64, w: f64, det: &str, rec: &str) -> PyResult<ProtocolConfig> {
    Ok(ProtocolConfig::new(
        parse(det)?,
        parse(rec)?,
        source(state, variance)?,
        ChannelParams::new(t, w).map_err(to_py)?,
    ))
}

/// Two-mode covariance matrix in shot-noise units, ordered (x_A, p_A, x_B, p_B).
#[pyclass(frozen, name = "Covariance")]
struct Covariance(TwoModeCovariance);

#[pymethods]
impl Covariance {
    #[new]
    fn new(matrix: [[f64; 4]; 4]) -> PyResult<Self> {
        TwoModeCovariance::from_matrix(matrix).map(Covariance).map_err(to_py)
    }

    /// `(alpha I, beta I, gamma Z)` blocks.
    #[staticmethod]
    fn block_form(alpha: f64, beta: f64, gamma: f64) -> Self {
        Covariance(TwoModeCovariance::block_form(alpha, beta, gamma))
    }

    fn matrix(&self) -> [[f64; 4]; 4] {
        self.0.to_matrix()
    }

    /// `(nu_plus, nu_minus)`
    fn spectrum(&self) -> PyResult<(f64, f64)> {
        let s = core::symplectic_spectrum(&self.0).map_err(to_py)?;
        Ok((s.nu_plus, s.nu_minus))
    }

    /// Same as `spectrum` via characteristic-polynomial roots; no physicality check.
    fn spectrum_oracle(&self) -> PyResult<(f64, f64)> {
        let s = core::symplectic_spectrum_oracle(&self.0).map_err(to_py)?;
        Ok((s.nu_plus, s.nu_minus))
    }

    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let inv = self.0.invariants();
        let d = PyDict::new(py);
        d.set_item("i1", inv.i1)?;
        d.set_item("i2", inv.i2)?;
        d.set_item("i3", inv.i3)?;
        d.set_item("i4", inv.i4)?;
        d.set_item("delta", inv.delta)?;
        Ok(d)
    }

    fn partial_transpose(&self) -> Self {
        Covariance(core::partial_transpose(&self.0))
    }

    fn ppt(&self) -> PyResult<f64> {
        core::ppt_min_eigenvalue(&self.0).map_err(to_py)
    }

    #[pyo3(signature = (nats = false))]
    fn discord(&self, nats: bool) -> PyResult<f64> {
        core::gaussian_discord_in(&self.0, base(nats)).map_err(to_py)
    }

    #[pyo3(signature = (nats = false))]
    fn entropy(&self, nats: bool) -> PyResult<f64> {
        let s = core::symplectic_spectrum(&self.0).map_err(to_py)?;
        core::symplectic::von_neumann_entropy_in(&s, base(nats)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Covariance({:?})", self.0.to_matrix())
    }
}

#[pyclass(frozen, name = "KeyRate")]
struct KeyRate(core::KeyRateReport);

#[pymethods]
impl KeyRate {
    #[getter]
    fn i_ab(&self) -> f64 {
        self.0.i_ab
    }
    #[getter]
    fn i_eve(&self) -> f64 {
        self.0.i_eve
    }
    #[getter]
    fn key_rate(&self) -> f64 {
        self.0.key_rate
    }
    #[getter]
    fn v_b_given_a(&self) -> f64 {
        self.0.v_b_given_a
    }
    #[getter]
    fn s_e(&self) -> f64 {
        self.0.s_e
    }
    #[getter]
    fn s_e_conditioned(&self) -> f64 {
        self.0.s_e_conditioned
    }

    fn __repr__(&self) -> String {
        format!(
            "KeyRate(i_ab={}, i_eve={}, key_rate={})",
            self.0.i_ab, self.0.i_eve, self.0.key_rate
        )
    }
}

#[pyfunction]
fn discord_state(vd: f64) -> PyResult<Covariance> {
    Ok(Covariance(source("discord", vd)?.covariance()))
}

#[pyfunction]
fn epr_state(ve: f64) -> PyResult<Covariance> {
    Ok(Covariance(source("epr", ve)?.covariance()))
}

#[pyfunction]
#[pyo3(signature = (nu, nats = false))]
fn entropy_g(nu: f64, nats: bool) -> PyResult<f64> {
    core::symplectic::entropy_g_in(nu, base(nats)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (state, variance, t, w = 1.0, det = "hom", rec = "rr"))]
fn key_rate(state: &str, variance: f64, t: f64, w: f64, det: &str, rec: &str) -> PyResult<KeyRate> {
    let cfg = config(state, variance, t, w, det, rec)?;
    core::secret_key_rate(&cfg).map(KeyRate).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (state, variance, det, rec, w = 1.0, lo = 0.01, hi = 0.99, tol = 1e-4))]
#[allow(clippy::too_many_arguments)]
fn transmission_threshold(
    state: &str,
    variance: f64,
    det: &str,
    rec: &str,
    w: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> PyResult<f64> {
    let cfg = config(state, variance, hi, w, det, rec)?;
    threshold::transmission_threshold(&cfg, lo, hi, tol).map_err(to_py)
}

/// `(V_D, discord)` at the key-rate sign change of the discord state.
#[pyfunction]
#[pyo3(signature = (t, det, rec, w = 1.0, lo = 1.01, hi = 1000.0, tol = 1e-4))]
fn discord_threshold(
    t: f64,
    det: &str,
    rec: &str,
    w: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> PyResult<(f64, f64)> {
    let cfg = config("discord", hi, t, w, det, rec)?;
    let th = threshold::discord_threshold(&cfg, lo, hi, tol).map_err(to_py)?;
    Ok((th.input_variance, th.discord))
}

/// Rows of a one-parameter sweep as dicts keyed like the CSV header.
#[pyfunction]
#[pyo3(signature = (
    param, lo, hi, steps, state = "discord", variance = 40.0, t = 1.0, w = 1.0,
    det = "all", rec = "all", spacing = "linear"
))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    param: &str,
    lo: f64,
    hi: f64,
    steps: usize,
    state: &str,
    variance: f64,
    t: f64,
    w: f64,
    det: &str,
    rec: &str,
    spacing: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let param: SweepParam = parse(param)?;
    let det: Option<Detection> = parse_or_all(det)?;
    let rec: Option<Reconciliation> = parse_or_all(rec)?;
    let protocols: Vec<_> = all_protocols()
        .into_iter()
        .filter(|(d, r)| det.is_none_or(|x| x == *d) && rec.is_none_or(|x| x == *r))
        .collect();
    let t_base = if param == SweepParam::Transmission { lo } else { t };
    let base = config(state, variance, t_base, w, "hom", "rr")?;
    let spacing: Spacing = parse(spacing)?;
    let spec = SweepSpec::new(param, (lo, hi), steps, base, protocols)
        .and_then(|s| s.with_spacing(spacing))
        .map_err(to_py)?;
    let rows = py.detach(|| core::run_sweep(&spec)).map_err(to_py)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("state", r.state)?;
            d.set_item("V", r.v)?;
            d.set_item("variance", r.variance)?;
            d.set_item("T", r.t)?;
            d.set_item("W", r.w)?;
            d.set_item("detection", r.detection.as_str())?;
            d.set_item("reconciliation", r.reconciliation.as_str())?;
            d.set_item("discord", r.discord)?;
            d.set_item("ppt_nu", r.ppt_nu)?;
            d.set_item("i_ab", r.i_ab)?;
            d.set_item("i_eve", r.i_eve)?;
            d.set_item("key_rate", r.key_rate)?;
            d.set_item("error", r.error)?;
            Ok(d)
        })
        .collect()
}

type Row = Vec<Option<f64>>;

/// `(columns, rows)` of a preset figure; failed cells are `None`.
#[pyfunction]
#[pyo3(signature = (figure_id, w = 1.0, points = 201))]
fn figure(
    py: Python<'_>,
    figure_id: &str,
    w: f64,
    points: usize,
) -> PyResult<(Vec<String>, Vec<Row>)> {
    let fig: Figure = figure_id.parse().map_err(to_py)?;
    let options = FigureOptions {
        cloner_variance: w,
        points,
    };
    let table = py
        .detach(|| core::generate_figure(fig, &options))
        .map_err(to_py)?;
    Ok((table.columns, table.rows))
}

#[pymodule]
#[pyo3(name = "discord_qkd")]
fn discord_qkd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DiscordQkdError", py.get_type::<DiscordQkdError>())?;
    m.add("NonPhysicalStateError", py.get_type::<NonPhysicalStateError>())?;
    m.add("NoSignChangeError", py.get_type::<NoSignChangeError>())?;
    m.add_class::<Covariance>()?;
    m.add_class::<KeyRate>()?;
    m.add_function(wrap_pyfunction!(discord_state, m)?)?;
    m.add_function(wrap_pyfunction!(epr_state, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_g, m)?)?;
    m.add_function(wrap_pyfunction!(key_rate, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(discord_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    Ok(())
}
