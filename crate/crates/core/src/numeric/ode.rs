//! Embedded Dormand–Prince 5(4) integrator for scalar autonomous ODEs with
//! PI step-size control and cubic Hermite dense output.

// Dormand–Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order minus 4th-order weights, used for the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeOutcome {
    /// Reached `t_end`.
    Complete,
    /// Solution exceeded the configured magnitude cap.
    MagnitudeCap,
    /// Step size underflowed; remaining range could not be resolved.
    StepUnderflow,
}

/// Accepted-step skeleton of a solution: nodes, values and derivatives, which
/// together support C¹ cubic Hermite evaluation anywhere inside the range.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<f64>,
    pub dys: Vec<f64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub max_local_error: f64,
    pub outcome: OdeOutcome,
}

impl OdeSolution {
    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("solution has at least one node")
    }

    /// Cubic Hermite interpolation between accepted steps.
    pub fn value_at(&self, t: f64) -> f64 {
        let ts = &self.ts;
        let n = ts.len();
        if t <= ts[0] {
            return self.ys[0];
        }
        if t >= ts[n - 1] {
            return self.ys[n - 1];
        }
        let i = match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = ts[i + 1] - ts[i];
        let s = (t - ts[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.dys[i] * h, self.dys[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}

pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the step size; bounds the dense-output interpolation error.
    pub max_step: f64,
    /// Abort with `MagnitudeCap` when |y| exceeds this.
    pub magnitude_cap: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.02,
            magnitude_cap: 1e12,
        }
    }
}

/// Integrate the scalar autonomous ODE `y' = f(y)` from `y0` over `[0, t_end]`.
pub fn solve_autonomous(
    mut f: impl FnMut(f64) -> f64,
    y0: f64,
    t_end: f64,
    opts: &OdeOptions,
) -> OdeSolution {
    assert!(t_end > 0.0, "t_end must be positive");
    let mut t = 0.0_f64;
    let mut y = y0;
    let mut dy = f(y);
    let mut ts = vec![0.0];
    let mut ys = vec![y0];
    let mut dys = vec![dy];
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut max_err = 0.0_f64;

    let scale0 = opts.abs_tol + opts.rel_tol * y0.abs();
    let mut h = (0.01 * scale0 / (dy.abs() + 1e-30)).min(opts.max_step).max(1e-10);
    let mut err_prev = 1.0_f64;
    let mut outcome = OdeOutcome::Complete;

    while t < t_end {
        h = h.min(t_end - t).min(opts.max_step);
        if h < 1e-14 * t_end.max(1.0) {
            outcome = OdeOutcome::StepUnderflow;
            break;
        }
        let mut k = [0.0_f64; 7];
        k[0] = dy;
        for i in 0..6 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                acc += A[i][j] * kj;
            }
            k[i + 1] = f(y + h * acc);
        }
        // FSAL: stage 7 is the derivative at the proposed endpoint.
        let y_new = y + h
            * (35.0 / 384.0 * k[0] + 500.0 / 1113.0 * k[2] + 125.0 / 192.0 * k[3]
                - 2187.0 / 6784.0 * k[4]
                + 11.0 / 84.0 * k[5]);
        let err_raw: f64 = E.iter().zip(k.iter()).map(|(e, ki)| e * ki).sum::<f64>() * h;
        let scale = opts.abs_tol + opts.rel_tol * y.abs().max(y_new.abs());
        let err = (err_raw / scale).abs().max(1e-30);

        if err <= 1.0 {
            t += h;
            y = y_new;
            dy = k[6];
            ts.push(t);
            ys.push(y);
            dys.push(dy);
            accepted += 1;
            max_err = max_err.max(err_raw.abs());
            if y.abs() > opts.magnitude_cap {
                outcome = OdeOutcome::MagnitudeCap;
                break;
            }
            // PI controller.
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    OdeSolution {
        ts,
        ys,
        dys,
        steps_accepted: accepted,
        steps_rejected: rejected,
        max_local_error: max_err,
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = solve_autonomous(|y| -y, 1.0, 2.0, &OdeOptions::default());
        assert_eq!(sol.outcome, OdeOutcome::Complete);
        assert!((sol.value_at(2.0) - (-2.0_f64).exp()).abs() < 1e-10);
        // Dense output accuracy at off-node points.
        for i in 0..40 {
            let t = 0.05 * i as f64;
            assert!((sol.value_at(t) - (-t).exp()).abs() < 2e-9, "t={t}");
        }
    }

    #[test]
    fn riccati_closed_form() {
        // y' = -y², y(0)=1 → y(t) = 1/(1+t).
        let sol = solve_autonomous(|y| -y * y, 1.0, 4.0, &OdeOptions::default());
        assert_eq!(sol.outcome, OdeOutcome::Complete);
        for i in 1..=16 {
            let t = 0.25 * i as f64;
            assert!((sol.value_at(t) - 1.0 / (1.0 + t)).abs() < 2e-9);
        }
    }

    #[test]
    fn magnitude_cap_detected() {
        // y' = y² blows up at t=1 from y(0)=1.
        let sol = solve_autonomous(|y| y * y, 1.0, 2.0, &OdeOptions::default());
        assert_eq!(sol.outcome, OdeOutcome::MagnitudeCap);
        assert!(sol.t_end() < 1.01);
    }
}
