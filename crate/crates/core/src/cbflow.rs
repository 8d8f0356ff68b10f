//! The branching flow `v_t(λ)`: unique strictly positive solution of
//! `∂_t v_t(λ) = −Ψ(v_t(λ))`, `v_0(λ) = λ`, plus the Laplace transform
//! `E_x e^{−λ Y_t} = e^{−x v_t(λ)}` of the pure branching process, extinction
//! boundaries `v̄_t = lim_{λ→∞} v_t(λ)` and extinction probabilities.

use std::fmt::Write as _;

use crate::mechanism::{grey_satisfied, BranchingMechanism, PsiEvaluator};
use crate::numeric::ode::{self, OdeOptions, OdeOutcome, OdeSolution};
use crate::numeric::quad;
use crate::{Error, Result};

/// Relative magnitude swing (in decades) beyond which the flow ODE is
/// re-integrated in logarithmic coordinates.
const LOG_SWITCH_DECADES: f64 = 3.0;

/// Dense-output solution of the flow ODE for one initial `λ`.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub lambda: f64,
    pub t_max: f64,
    sol: OdeSolution,
    log_coords: bool,
    pub blow_up: bool,
    pub steps: usize,
    pub max_local_error: f64,
}

impl FlowSolution {
    /// `v_t(λ)` by cubic Hermite interpolation on the accepted-step skeleton.
    pub fn value_at(&self, t: f64) -> f64 {
        let v = self.sol.value_at(t.min(self.sol.t_end()));
        if self.log_coords {
            v.exp()
        } else {
            v
        }
    }

    /// Time range actually covered (shorter than `t_max` after a blow-up).
    pub fn t_covered(&self) -> f64 {
        self.sol.t_end()
    }

    /// Solver grid in `(t, v)` form.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.sol
            .ts
            .iter()
            .zip(&self.sol.ys)
            .map(|(&t, &y)| (t, if self.log_coords { y.exp() } else { y }))
            .collect()
    }

    /// Sign of dv/dt at each grid node, for the contraction property.
    pub fn grid_derivatives(&self) -> Vec<(f64, f64)> {
        self.sol
            .ts
            .iter()
            .zip(self.sol.ys.iter().zip(&self.sol.dys))
            .map(|(&t, (&y, &dy))| {
                let slope = if self.log_coords { dy * y.exp() } else { dy };
                (t, slope)
            })
            .collect()
    }

    /// CSV export with header `t,v`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,v\n");
        for (t, v) in self.grid() {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }
}

/// Integrate the flow ODE from `λ` up to `t_max`.
///
/// Integration restarts in log coordinates as soon as the solution leaves a
/// three-decade band around `λ`, which keeps relative accuracy when the flow
/// collapses toward zero or climbs steeply.
pub fn solve_v(mech: &BranchingMechanism, lambda: f64, t_max: f64) -> Result<FlowSolution> {
    solve_v_with_tol(mech, lambda, t_max, 1e-9)
}

pub fn solve_v_with_tol(
    mech: &BranchingMechanism,
    lambda: f64,
    t_max: f64,
    rel_tol: f64,
) -> Result<FlowSolution> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("flow requires λ > 0, got {lambda}")));
    }
    if !(t_max > 0.0) {
        return Err(Error::Domain(format!("flow requires t_max > 0, got {t_max}")));
    }
    let psi = PsiEvaluator::new(mech);
    let opts = OdeOptions {
        rel_tol,
        abs_tol: 1e-14 * lambda.max(1.0),
        max_step: (0.02 * t_max.max(1.0)).min(0.05),
        magnitude_cap: 1e9 * lambda.max(1.0),
    };

    // First pass in natural coordinates, watching the decade span.
    let hi_cap = lambda * 10f64.powf(LOG_SWITCH_DECADES);
    let lo_cap = lambda * 10f64.powf(-LOG_SWITCH_DECADES);
    let linear = ode::solve_autonomous(
        |v| -psi.eval(v),
        lambda,
        t_max,
        &OdeOptions {
            magnitude_cap: hi_cap,
            ..opts
        },
    );
    let left_band = linear.ys.iter().any(|&v| v <= lo_cap);
    let needs_log = left_band || linear.outcome == OdeOutcome::MagnitudeCap;

    let (sol, log_coords) = if needs_log {
        let log_sol = ode::solve_autonomous(
            |w| {
                let v = w.exp();
                -psi.eval(v) / v
            },
            lambda.ln(),
            t_max,
            &OdeOptions {
                magnitude_cap: 700.0,
                ..opts
            },
        );
        (log_sol, true)
    } else {
        (linear, false)
    };

    if psi.poisoned() {
        return Err(Error::Solver(
            "Ψ quadrature failed to converge inside the flow integration".into(),
        ));
    }
    let blow_up = sol.outcome != OdeOutcome::Complete;
    let steps = sol.steps_accepted;
    let max_local_error = sol.max_local_error;
    Ok(FlowSolution {
        lambda,
        t_max,
        sol,
        log_coords,
        blow_up,
        steps,
        max_local_error,
    })
}

/// `E_x e^{−λ Y_t} = e^{−x v_t(λ)}` for the pure branching process.
pub fn laplace_transform(
    mech: &BranchingMechanism,
    x: f64,
    lambda: f64,
    t: f64,
) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("state must satisfy x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        return Ok((-x * lambda).exp());
    }
    let flow = solve_v(mech, lambda, t)?;
    if flow.blow_up && flow.t_covered() < t {
        return Err(Error::Solver(
            "flow blew up before the requested time".into(),
        ));
    }
    Ok((-x * flow.value_at(t)).exp())
}

/// One entry of the extinction boundary: `v̄_t` or the infinite flag.
#[derive(Debug, Clone, Copy)]
pub struct VbarEntry {
    pub t: f64,
    /// `None` when Grey's condition fails and `v̄_t = ∞`.
    pub value: Option<f64>,
}

/// Extinction boundary over a time grid, exportable as `t,vbar,finite`.
#[derive(Debug, Clone)]
pub struct ExtinctionProfile {
    pub entries: Vec<VbarEntry>,
}

impl ExtinctionProfile {
    pub fn compute(mech: &BranchingMechanism, ts: &[f64]) -> Result<Self> {
        let entries = ts
            .iter()
            .map(|&t| vbar(mech, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtinctionProfile { entries })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,vbar,finite\n");
        for e in &self.entries {
            match e.value {
                Some(v) => {
                    let _ = writeln!(out, "{},{},true", e.t, v);
                }
                None => {
                    let _ = writeln!(out, "{},inf,false", e.t);
                }
            }
        }
        out
    }
}

/// Extinction boundary `v̄_t`, the root of `G(v) := ∫_v^∞ du/Ψ(u) = t`.
///
/// `G` is computed with adaptive quadrature up to a cutoff and an analytic
/// tail from the locally fitted growth exponent of `Ψ`; the root is bracketed
/// and bisected in `log v`.
pub fn vbar(mech: &BranchingMechanism, t: f64) -> Result<VbarEntry> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("v̄ requires t > 0, got {t}")));
    }
    if !grey_satisfied(mech) {
        return Ok(VbarEntry { t, value: None });
    }
    let psi = PsiEvaluator::new(mech);
    let theta = crate::mechanism::find_positivity_threshold(mech).ok_or_else(|| {
        Error::Solver("no positivity threshold found despite Grey's condition".into())
    })?;

    let g_of = |v: f64| -> f64 { g_tail_integral(&psi, v) };

    // Bracket: G is strictly decreasing in v on (θ*, ∞).
    let mut lo = theta;
    let mut glo = g_of(lo);
    let mut expansions = 0;
    while glo < t {
        lo *= 0.5;
        let candidate = psi.eval(lo);
        if candidate <= 0.0 {
            // Cannot descend below the positivity region: v̄_t sits at its
            // edge; return the smallest admissible value.
            return Ok(VbarEntry { t, value: Some(lo * 2.0) });
        }
        glo = g_of(lo);
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Solver("v̄ lower bracket expansion failed".into()));
        }
    }
    let mut hi = lo.max(1.0);
    let mut ghi = g_of(hi);
    while ghi > t {
        hi *= 2.0;
        ghi = g_of(hi);
        if hi > 1e300 {
            return Err(Error::Solver("v̄ upper bracket expansion failed".into()));
        }
    }

    // Bisection on log v to relative tolerance 1e−8.
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..80 {
        let mid = 0.5 * (llo + lhi);
        if g_of(mid.exp()) > t {
            llo = mid;
        } else {
            lhi = mid;
        }
        if (lhi - llo) < 1e-9 {
            break;
        }
    }
    if psi.poisoned() {
        return Err(Error::Solver("Ψ quadrature failed inside v̄".into()));
    }
    Ok(VbarEntry {
        t,
        value: Some((0.5 * (llo + lhi)).exp()),
    })
}

/// `G(v) = ∫_v^∞ du/Ψ(u)`: adaptive body plus an analytic power-law tail.
fn g_tail_integral(psi: &PsiEvaluator<'_>, v: f64) -> f64 {
    let cutoff = (100.0 * v).max(1e4);
    let body = quad::integrate(|u| 1.0 / psi.eval(u), v, cutoff, 1e-9, 1e-14).value;
    // Fit the dominant exponent of Ψ on [cutoff/2, cutoff].
    let p_hi = psi.eval(cutoff);
    let p_lo = psi.eval(0.5 * cutoff);
    let p = (p_hi / p_lo).ln() / 2f64.ln();
    // ∫_Λ^∞ du / (Ψ(Λ) (u/Λ)^p) = Λ / (Ψ(Λ) (p − 1)).
    let tail = if p > 1.0 {
        cutoff / (p_hi * (p - 1.0))
    } else {
        f64::INFINITY
    };
    body + tail
}

/// Probability that the pure branching process started from `x` is extinct
/// by time `t`: `e^{−x v̄_t}`.
pub fn extinction_prob(mech: &BranchingMechanism, x: f64, t: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("state must satisfy x ≥ 0, got {x}")));
    }
    let entry = vbar(mech, t)?;
    match entry.value {
        Some(v) => Ok((-x * v).exp()),
        None => Err(Error::Precondition(
            "extinction probability requires Grey's condition".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::BranchingMechanism;

    #[test]
    fn feller_flow_closed_form() {
        // Ψ(v) = v²: v_t(λ) = λ/(1 + λt).
        let mech = BranchingMechanism::feller(1.0, 0.0);
        let flow = solve_v(&mech, 1.0, 2.0).unwrap();
        assert!((flow.value_at(1.0) - 0.5).abs() <= 1e-8);
        assert_eq!(flow.value_at(0.0), 1.0);
        for i in 1..=20 {
            let t = 0.1 * i as f64;
            let exact = 1.0 / (1.0 + t);
            assert!(
                (flow.value_at(t) - exact).abs() <= 1e-8 * exact,
                "t={t}: {} vs {exact}",
                flow.value_at(t)
            );
        }
    }

    #[test]
    fn stable_flow_closed_form() {
        // Ψ(v) = v^β: v_t(λ) = (λ^{1−β} + (β−1)t)^{−1/(β−1)}.
        let mech = BranchingMechanism::pure_stable(1.5);
        let flow = solve_v(&mech, 1.0, 2.5).unwrap();
        let v = flow.value_at(2.0);
        assert!((v - 0.25).abs() <= 1e-7, "v={v}");
    }

    #[test]
    fn neveu_flow_closed_form() {
        // Ψ(v) = v ln v: v_t(λ) = λ^{e^{−t}}.
        let mech = BranchingMechanism::neveu(1.0, 1.0 - crate::mechanism::EULER_GAMMA);
        let flow = solve_v(&mech, 3.0, 1.5).unwrap();
        for i in 0..=6 {
            let t = 0.25 * i as f64;
            let exact = 3.0_f64.powf((-t).exp());
            assert!(
                (flow.value_at(t) - exact).abs() <= 1e-7 * exact,
                "t={t}: {} vs {exact}",
                flow.value_at(t)
            );
        }
    }

    #[test]
    fn laplace_examples() {
        let mech = BranchingMechanism::feller(1.0, 0.0);
        let lt = laplace_transform(&mech, 1.0, 1.0, 1.0).unwrap();
        assert!((lt - (-0.5_f64).exp()).abs() < 1e-8);
        assert_eq!(laplace_transform(&mech, 0.0, 3.0, 2.0).unwrap(), 1.0);
        let lt0 = laplace_transform(&mech, 2.0, 3.0, 0.0).unwrap();
        assert!((lt0 - (-6.0_f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn vbar_closed_forms() {
        let mech = BranchingMechanism::feller(1.0, 0.0);
        // G(v) = 1/v so v̄_t = 1/t.
        let v1 = vbar(&mech, 1.0).unwrap().value.unwrap();
        assert!((v1 - 1.0).abs() <= 1e-7, "v1={v1}");
        let v2 = vbar(&mech, 2.0).unwrap().value.unwrap();
        assert!((v2 - 0.5).abs() <= 1e-7, "v2={v2}");

        // Ψ(v)=v^1.5: v̄_t = ((β−1)t)^{−1/(β−1)} = (0.5 t)^{−2}.
        let stable = BranchingMechanism::pure_stable(1.5);
        let v = vbar(&stable, 1.0).unwrap().value.unwrap();
        assert!((v - 4.0).abs() <= 4.0 * 1e-6, "v={v}");
    }

    #[test]
    fn vbar_infinite_without_grey() {
        let nev = BranchingMechanism::neveu(1.0, 1.0);
        assert!(vbar(&nev, 1.0).unwrap().value.is_none());
        assert!(extinction_prob(&nev, 1.0, 1.0).is_err());
    }

    #[test]
    fn extinction_probability_examples() {
        let mech = BranchingMechanism::feller(1.0, 0.0);
        let p = extinction_prob(&mech, 1.0, 1.0).unwrap();
        assert!((p - (-1.0_f64).exp()).abs() < 1e-6);
        assert_eq!(extinction_prob(&mech, 0.0, 1.0).unwrap(), 1.0);
        let p22 = extinction_prob(&mech, 2.0, 2.0).unwrap();
        assert!((p22 - (-1.0_f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn semigroup_property_across_mechanisms() {
        for mech in crate::test_mechanisms() {
            let grid = [0.12, 0.35, 0.6, 1.1, 1.7];
            for &lambda in &[0.4, 0.9, 1.5, 2.5, 4.0] {
                let big = solve_v(&mech, lambda, 3.5).unwrap();
                for &s in &grid {
                    let vs = big.value_at(s);
                    let inner = solve_v(&mech, vs, 1.8).unwrap();
                    for &t in &grid {
                        let lhs = big.value_at(t + s);
                        let rhs = inner.value_at(t);
                        assert!(
                            (lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs()),
                            "semigroup failed: {mech:?} λ={lambda} s={s} t={t}: {lhs} vs {rhs}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn contraction_sign_matches_psi() {
        for mech in crate::test_mechanisms() {
            let flow = solve_v(&mech, 2.0, 1.5).unwrap();
            for (t, slope) in flow.grid_derivatives() {
                let v = flow.value_at(t);
                let psi = mech.psi(v).unwrap();
                if psi.abs() > 1e-9 {
                    assert!(
                        (slope < 0.0) == (psi > 0.0) || slope.abs() < 1e-12,
                        "sign mismatch at t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn laplace_bounds_and_monotonicity() {
        let mech = BranchingMechanism::pure_stable(1.5);
        let mut prev_x = 1.0;
        for &x in &[0.5, 1.0, 2.0, 4.0] {
            let v = laplace_transform(&mech, x, 1.0, 0.7).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev_x + 1e-12);
            prev_x = v;
        }
        let mut prev_l = 1.0;
        for &l in &[0.5, 1.0, 2.0, 4.0] {
            let v = laplace_transform(&mech, 1.0, l, 0.7).unwrap();
            assert!(v <= prev_l + 1e-12);
            prev_l = v;
        }
    }

    #[test]
    fn vbar_is_large_lambda_limit() {
        let mech = BranchingMechanism::feller(1.0, 0.5);
        let t = 0.8;
        let vb = vbar(&mech, t).unwrap().value.unwrap();
        let mut prev_gap = f64::INFINITY;
        for &lambda in &[1e3, 1e4, 1e5] {
            let flow = solve_v(&mech, lambda, t).unwrap();
            let gap = (vb - flow.value_at(t)).abs();
            assert!(gap <= prev_gap + 1e-9, "λ={lambda}: gap={gap}");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3 * vb);
    }
}
