//! Numerical parallel transport of `dφ = Ωφ` away from the singular
//! divisors.
//!
//! `Ω` is evaluated from exact entries compiled to Horner form. Paths are
//! integrated segment by segment with an adaptive Dormand-Prince stepper.

mod path;
mod stepper;

use std::collections::HashMap;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{default_var_names, CompiledPoly, RatFunc};
use crate::operator::ThetaOperator;
use crate::algebra::MultiPoly;
use crate::pfaffian::PfaffianSystem;
use crate::series::{evaluate_series, period_series, SeriesError};

pub use path::{JsonPoint, Path, Point, Segment, CLEARANCE_DIVISORS};
pub use stepper::{integrate, StepStats, StepperConfig};

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_CLEARANCE: f64 = 1e-3;
pub const DEFAULT_POLE_FLOOR: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("segment {segment} does not start where the previous one ends")]
    Discontinuous { segment: usize },
    #[error("path comes within {value:e} of divisor {divisor} (required {required:e})")]
    Clearance { divisor: String, value: f64, required: f64 },
    #[error("connection is numerically singular at {point:?}")]
    NearSingular { point: [Complex64; 3] },
    #[error("step size collapsed to {h:e} at s = {s}")]
    StepCollapse { s: f64, h: f64 },
    #[error("loop is not closed")]
    NotClosed,
    #[error("initial state: {0}")]
    Series(#[from] SeriesError),
    #[error("state has {got} rows, system rank is {expected}")]
    Dimension { expected: usize, got: usize },
}

/// Connection matrices compiled for floating-point evaluation.
pub struct CompiledOmega {
    rank: usize,
    dens: Vec<CompiledPoly>,
    /// Per coordinate: `(row, col, numerator, denominator index)`.
    entries: [Vec<(usize, usize, CompiledPoly, usize)>; 3],
    /// Per coordinate: numerator and denominator of `tr M_x`.
    traces: [(CompiledPoly, CompiledPoly); 3],
    floor: f64,
}

impl CompiledOmega {
    pub fn new(sys: &PfaffianSystem) -> Self {
        let names = default_var_names::<3>();
        let mut den_index: HashMap<String, usize> = HashMap::new();
        let mut dens = Vec::new();
        let entries = [0, 1, 2].map(|x| {
            let mut out = Vec::new();
            for (i, row) in sys.m[x].iter().enumerate() {
                for (j, f) in row.iter().enumerate().filter(|(_, f)| !f.is_zero()) {
                    let key = f.denom().to_canonical_string(&names);
                    let d = *den_index.entry(key).or_insert_with(|| {
                        dens.push(CompiledPoly::compile(f.denom()));
                        dens.len() - 1
                    });
                    out.push((i, j, CompiledPoly::compile(f.numer()), d));
                }
            }
            out
        });
        let traces = [0, 1, 2].map(|x| {
            let t = sys.m[x].iter().enumerate().fold(RatFunc::zero(), |acc, (i, row)| &acc + &row[i]);
            (CompiledPoly::compile(t.numer()), CompiledPoly::compile(t.denom()))
        });
        Self {
            rank: sys.rank(),
            dens,
            entries,
            traces,
            floor: DEFAULT_POLE_FLOOR,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Σ_x M_x(z) v_x`.
    pub fn contract(&self, z: &Point, v: &Point) -> Result<CMatrix, TransportError> {
        let mut den_vals: Vec<Option<Complex64>> = vec![None; self.dens.len()];
        let mut out = CMatrix::zeros(self.rank, self.rank);
        for x in 0..3 {
            if v[x] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (i, j, num, d) in &self.entries[x] {
                let dv = match den_vals[*d] {
                    Some(dv) => dv,
                    None => {
                        let (dv, mag) = self.dens[*d].eval_with_magnitude(z);
                        if dv.norm() <= self.floor * mag {
                            return Err(TransportError::NearSingular { point: *z });
                        }
                        den_vals[*d] = Some(dv);
                        dv
                    }
                };
                out[(*i, *j)] += num.eval(z) / dv * v[x];
            }
        }
        Ok(out)
    }

    /// `Σ_x tr M_x(z) v_x`, from the separately compiled traces.
    pub fn trace(&self, z: &Point, v: &Point) -> Complex64 {
        (0..3)
            .filter(|&x| v[x] != Complex64::new(0.0, 0.0))
            .map(|x| self.traces[x].0.eval(z) / self.traces[x].1.eval(z) * v[x])
            .sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportResult {
    #[serde(serialize_with = "ser_matrix")]
    pub state: CMatrix,
    pub stats: StepStats,
    /// Present for square states.
    #[serde(serialize_with = "ser_opt_c")]
    pub det: Option<Complex64>,
    pub condition_number: Option<f64>,
}

fn c_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn ser_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| c_pair(&m[(i, j)])).collect()).collect();
    rows.serialize(s)
}

fn ser_opt_c<S: serde::Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    z.as_ref().map(c_pair).serialize(s)
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    c_pair(z).serialize(s)
}

fn ser_vec_c<S: serde::Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|v| v.iter().map(c_pair).collect::<Vec<_>>()).serialize(s)
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct TransportConfig {
    pub tol: f64,
    pub clearance: f64,
}

impl TransportConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            clearance: DEFAULT_CLEARANCE,
        }
    }
}

/// Transports `y0` (a state vector or a fundamental matrix, one column per
/// solution) along `path`.
pub fn transport(omega: &CompiledOmega, path: &Path, y0: CMatrix, cfg: &TransportConfig) -> Result<TransportResult, TransportError> {
    if y0.nrows() != omega.rank() {
        return Err(TransportError::Dimension {
            expected: omega.rank(),
            got: y0.nrows(),
        });
    }
    path.validate()?;
    path.check_clearance(cfg.clearance)?;
    let step_cfg = StepperConfig::with_tol(cfg.tol);
    let mut y = y0;
    let mut stats = StepStats::default();
    for seg in &path.segments {
        let f = |s: f64, y: &CMatrix| -> Result<CMatrix, TransportError> {
            Ok(omega.contract(&seg.point(s), &seg.velocity(s))? * y)
        };
        let (y1, st) = integrate(f, y, &step_cfg)?;
        y = y1;
        stats.accepted += st.accepted;
        stats.rejected += st.rejected;
        stats.max_error_ratio = stats.max_error_ratio.max(st.max_error_ratio);
    }
    let (det, condition_number) = if y.is_square() {
        let det = y.determinant();
        let cond = y.clone().try_inverse().map(|inv| one_norm(&y) * one_norm(&inv));
        (Some(det), cond)
    } else {
        (None, None)
    };
    Ok(TransportResult {
        state: y,
        stats,
        det,
        condition_number,
    })
}

/// `∫ tr Ω` along the path by adaptive Gauss-Legendre quadrature.
pub fn trace_integral(omega: &CompiledOmega, path: &Path) -> Complex64 {
    let rule = GaussLegendre::new(16.try_into().expect("nonzero"));
    let panel = |seg: &Segment, a: f64, b: f64| -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        rule.as_node_weight_pairs()
            .iter()
            .map(|(x, w)| {
                let s = mid + half * x;
                omega.trace(&seg.point(s), &seg.velocity(s)) * *w
            })
            .sum::<Complex64>()
            * half
    };
    fn adapt(
        panel: &dyn Fn(f64, f64) -> Complex64,
        a: f64,
        b: f64,
        whole: Complex64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (l, r) = (panel(a, m), panel(m, b));
        let refined = l + r;
        if depth == 0 || (refined - whole).norm() <= 1e-14 * refined.norm().max(1.0) {
            refined
        } else {
            adapt(panel, a, m, l, depth - 1) + adapt(panel, m, b, r, depth - 1)
        }
    }
    path.segments
        .iter()
        .map(|seg| {
            let p = |a: f64, b: f64| panel(seg, a, b);
            adapt(&p, 0.0, 1.0, p(0.0, 1.0), 24)
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyResult {
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: CMatrix,
    #[serde(serialize_with = "ser_vec_c")]
    pub eigenvalues: Option<Vec<Complex64>>,
    #[serde(serialize_with = "ser_c")]
    pub det: Complex64,
    pub abs_det: f64,
    /// `exp(∮ tr Ω)`.
    #[serde(serialize_with = "ser_c")]
    pub liouville_det: Complex64,
    pub liouville_relative_error: f64,
    /// `max |M − I|`.
    pub identity_defect: f64,
    pub condition_number: Option<f64>,
    pub stats: StepStats,
}

/// `None` when the Schur iteration does not converge within its budget.
/// Shifted by the mean eigenvalue and rescaled before the iteration.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let mu = m.trace() / n as f64;
    let b = m - CMatrix::identity(n, n) * mu;
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Some(vec![mu; n]);
    }
    let v = Schur::try_new(b / Complex64::from(scale), f64::EPSILON, 10_000)?.eigenvalues()?;
    Some(v.iter().map(|z| z * scale + mu).collect())
}

/// Fundamental matrix after one circuit of a closed path, starting from
/// the identity.
pub fn monodromy(omega: &CompiledOmega, path: &Path, cfg: &TransportConfig) -> Result<MonodromyResult, TransportError> {
    if !path.is_closed() {
        return Err(TransportError::NotClosed);
    }
    let n = omega.rank();
    let res = transport(omega, path, CMatrix::identity(n, n), cfg)?;
    let m = res.state;
    let det = res.det.expect("square");
    let liouville_det = trace_integral(omega, path).exp();
    Ok(MonodromyResult {
        eigenvalues: eigenvalues(&m),
        det,
        abs_det: det.norm(),
        liouville_det,
        liouville_relative_error: (det - liouville_det).norm() / liouville_det.norm(),
        identity_defect: max_abs_diff(&m, &CMatrix::identity(n, n)),
        condition_number: res.condition_number,
        stats: res.stats,
        matrix: m,
    })
}

/// `(θ^{w} u)(z)` for every basis monomial `w`, from the period series.
pub fn initial_state(sys: &PfaffianSystem, point: &Point, cap: u32, tol: f64) -> Result<CMatrix, TransportError> {
    let u = period_series(cap);
    let values = sys
        .basis
        .iter()
        .map(|w| {
            let img = ThetaOperator::monomial(*w, MultiPoly::one()).apply(&u);
            evaluate_series(&img, point, tol).map(|(v, _)| v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CMatrix::from_column_slice(values.len(), 1, &values))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTransportComparison {
    pub discrepancy: f64,
    pub stats: StepStats,
}

/// Transports the series state at `a` straight to `b` and compares with the
/// series state at `b` in the max norm.
pub fn series_vs_transport(
    sys: &PfaffianSystem,
    omega: &CompiledOmega,
    a: &Point,
    b: &Point,
    cap: u32,
    cfg: &TransportConfig,
) -> Result<SeriesTransportComparison, TransportError> {
    let series_tol = 1e-3 * cfg.tol;
    let ya = initial_state(sys, a, cap, series_tol)?;
    let yb = initial_state(sys, b, cap, series_tol)?;
    if a == b {
        return Ok(SeriesTransportComparison {
            discrepancy: max_abs_diff(&ya, &yb),
            stats: StepStats::default(),
        });
    }
    let path = Path::new(vec![Segment::line(*a, *b)]);
    let res = transport(omega, &path, ya, cfg)?;
    Ok(SeriesTransportComparison {
        discrepancy: max_abs_diff(&res.state, &yb),
        stats: res.stats,
    })
}
