//! Dormand-Prince 5(4) with a PI step-size controller for `y' = f(s, y)`
//! on complex matrices over `s ∈ [0, 1]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::TransportError;

type M = DMatrix<Complex64>;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct StepperConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl StepperConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_init: 1e-3,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest normalized error estimate of an accepted step (≤ 1).
    pub max_error_ratio: f64,
}

fn error_norm(err: &M, y0: &M, y1: &M, cfg: &StepperConfig) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = cfg.atol + cfg.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrates from `s = 0` to `s = 1`.
pub fn integrate<F>(f: F, y0: M, cfg: &StepperConfig) -> Result<(M, StepStats), TransportError>
where
    F: Fn(f64, &M) -> Result<M, TransportError>,
{
    const SAFETY: f64 = 0.9;
    const BETA: f64 = 0.04;
    const ALPHA: f64 = 0.2 - 0.75 * BETA;
    const FAC_MIN: f64 = 0.2;
    const FAC_MAX: f64 = 10.0;

    let mut stats = StepStats::default();
    let mut s = 0.0;
    let mut y = y0;
    let mut h = cfg.h_init.min(1.0);
    let mut err_old: f64 = 1e-4;
    let mut k1 = f(s, &y)?;
    let mut last_rejected = false;
    while s < 1.0 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(TransportError::StepCollapse { s, h });
        }
        if s + h > 1.0 {
            h = 1.0 - s;
        }
        let mut k: Vec<M> = Vec::with_capacity(7);
        k.push(k1.clone());
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[i][j] != 0.0 {
                    yi += kj * Complex64::new(h * A[i][j], 0.0);
                }
            }
            if i == 6 {
                // FSAL: stage 7 is evaluated at the proposed solution.
                let ki = f(s + h, &yi)?;
                k.push(ki);
                let mut err = M::zeros(y.nrows(), y.ncols());
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        err += kj * Complex64::new(h * E[j], 0.0);
                    }
                }
                let en = error_norm(&err, &y, &yi, cfg);
                if en <= 1.0 || h <= cfg.h_min {
                    s += h;
                    y = yi;
                    k1 = k.pop().expect("seven stages");
                    stats.accepted += 1;
                    stats.max_error_ratio = stats.max_error_ratio.max(en);
                    let en = en.max(1e-10);
                    let mut fac = SAFETY * en.powf(-ALPHA) * err_old.powf(BETA);
                    fac = fac.clamp(FAC_MIN, FAC_MAX);
                    if last_rejected {
                        fac = fac.min(1.0);
                    }
                    err_old = en;
                    last_rejected = false;
                    h *= fac;
                } else {
                    stats.rejected += 1;
                    last_rejected = true;
                    h *= (SAFETY * en.powf(-ALPHA)).max(FAC_MIN);
                    if h < cfg.h_min {
                        return Err(TransportError::StepCollapse { s, h });
                    }
                }
            } else {
                k.push(f(s + C[i] * h, &yi)?);
            }
        }
    }
    Ok((y, stats))
}
