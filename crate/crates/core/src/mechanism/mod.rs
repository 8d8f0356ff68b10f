//! Branching mechanisms `Ψ(λ) = bλ + cλ² + ∫ (e^{−λz} − 1 + λz·1_{z≤1}) μ(dz)`,
//! competition functions, and numeric checkers for the conditions that control
//! extinction and quasi-stationary behaviour.

mod competition;
mod conditions;
mod measure;

pub use competition::CompetitionFunction;
pub use conditions::{
    classify_criticality, find_positivity_threshold, fluctuation_check, fluctuation_parameters,
    grey_check, grey_satisfied, nontriviality_check, qsd_hypotheses_check, ConditionReport,
    Criticality, Evidence, GrowthFn, Verdict, DIVERGENCE_RATIO_THRESHOLD,
};
pub use measure::{LevyMeasure, EULER_GAMMA};

use std::cell::Cell;

use crate::numeric::quad::QuadResult;
use crate::{Error, Result};

/// Default relative tolerance used by quadrature-backed evaluations.
pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-8;
/// Default tolerance on sign decisions (criticality, positivity searches).
pub const DEFAULT_SIGN_TOL: f64 = 1e-10;

/// The triple `(b, c, μ)`. Immutable after construction; construction
/// validates `c ≥ 0`, the measure's structural invariants, finiteness of
/// `∫ (1 ∧ z²) μ(dz)`, and spot-checks convexity of `Ψ`.
#[derive(Debug, Clone)]
pub struct BranchingMechanism {
    b: f64,
    c: f64,
    mu: LevyMeasure,
}

impl BranchingMechanism {
    pub fn new(b: f64, c: f64, mu: LevyMeasure) -> Result<Self> {
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidSpec("b and c must be finite".into()));
        }
        if c < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "diffusion coefficient must satisfy c ≥ 0, got {c}"
            )));
        }
        mu.validate()?;
        let total = mu.one_and_z2();
        if !total.is_finite() {
            return Err(Error::InvalidSpec(
                "∫ (1 ∧ z²) μ(dz) must be finite".into(),
            ));
        }
        let mech = BranchingMechanism { b, c, mu };
        mech.spot_check_convexity()?;
        Ok(mech)
    }

    /// Pure diffusion branching: `Ψ(λ) = bλ + cλ²`.
    pub fn feller(c: f64, b: f64) -> Self {
        BranchingMechanism::new(b, c, LevyMeasure::Zero).expect("valid diffusion mechanism")
    }

    /// Mechanism with `Ψ(λ) = λ^β` exactly, for `β ∈ (1, 2)`: an untruncated
    /// stable measure with the drift tuned to cancel its linear part.
    pub fn pure_stable(beta: f64) -> Self {
        assert!(beta > 1.0 && beta < 2.0);
        let j = libm::tgamma(2.0 - beta) / (beta * (beta - 1.0));
        let c_amp = 1.0 / j;
        let b = c_amp / (beta - 1.0);
        BranchingMechanism::new(b, 0.0, LevyMeasure::Stable { c: c_amp, beta })
            .expect("valid stable mechanism")
    }

    /// Neveu-type mechanism: measure `C z^{−2} dz` with user-supplied drift.
    pub fn neveu(c_amp: f64, b: f64) -> Self {
        BranchingMechanism::new(b, 0.0, LevyMeasure::Neveu { c: c_amp })
            .expect("valid Neveu mechanism")
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> &LevyMeasure {
        &self.mu
    }

    /// Evaluate `Ψ(λ)` with the family's closed form when available, falling
    /// back to adaptive quadrature at relative tolerance `1e−8`.
    pub fn psi(&self, lambda: f64) -> Result<f64> {
        self.psi_with_tol(lambda, DEFAULT_QUAD_REL_TOL)
    }

    pub fn psi_with_tol(&self, lambda: f64, rel_tol: f64) -> Result<f64> {
        if lambda < 0.0 {
            return Err(Error::Domain(format!("Ψ requires λ ≥ 0, got {lambda}")));
        }
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let jump = match self.mu.psi_jump_closed(lambda) {
            Some(v) => v,
            None => self.mu.psi_jump_quadrature(lambda, rel_tol).into_result()?,
        };
        Ok(self.b * lambda + self.c * lambda * lambda + jump)
    }

    /// Force the quadrature path regardless of closed forms; used by the
    /// closed-form/quadrature agreement checks.
    pub fn psi_quadrature(&self, lambda: f64, rel_tol: f64) -> QuadResult {
        let jump = self.mu.psi_jump_quadrature(lambda, rel_tol);
        QuadResult {
            value: self.b * lambda + self.c * lambda * lambda + jump.value,
            ..jump
        }
    }

    /// `Ψ′(0+) = b − ∫_{z>1} z μ(dz)`; `None` when the tail mean is infinite.
    pub fn psi_prime_at_zero(&self) -> Option<f64> {
        self.mu.first_moment_tail().map(|m| self.b - m)
    }

    fn spot_check_convexity(&self) -> Result<()> {
        let mut lambdas = Vec::new();
        let mut l = 1e-2;
        while l <= 1e3 {
            lambdas.push(l);
            l *= 4.0;
        }
        let psis: Vec<f64> = lambdas
            .iter()
            .map(|&l| self.psi_with_tol(l, 1e-8).unwrap_or(f64::NAN))
            .collect();
        if psis.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec(
                "Ψ could not be evaluated on the convexity grid".into(),
            ));
        }
        let scale = psis.iter().fold(1.0_f64, |m, p| m.max(p.abs()));
        for w in psis.windows(3).zip(lambdas.windows(3)) {
            let ((p0, p1, p2), (l0, l1, l2)) =
                ((w.0[0], w.0[1], w.0[2]), (w.1[0], w.1[1], w.1[2]));
            let chord = p0 + (p2 - p0) * (l1 - l0) / (l2 - l0);
            if p1 > chord + 1e-7 * scale {
                return Err(Error::InvalidSpec(format!(
                    "Ψ fails the convexity spot check near λ = {l1}"
                )));
            }
        }
        Ok(())
    }
}

/// Infallible-looking `Ψ` evaluator for use inside ODE right-hand sides and
/// root finders. Quadrature failures are latched rather than propagated, so
/// the solver can finish and the caller can inspect `poisoned()`.
pub struct PsiEvaluator<'a> {
    mech: &'a BranchingMechanism,
    rel_tol: f64,
    poisoned: Cell<bool>,
}

impl<'a> PsiEvaluator<'a> {
    pub fn new(mech: &'a BranchingMechanism) -> Self {
        PsiEvaluator {
            mech,
            rel_tol: DEFAULT_QUAD_REL_TOL,
            poisoned: Cell::new(false),
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        match self.mech.mu().psi_jump_closed(lambda) {
            Some(jump) => {
                self.mech.b() * lambda + self.mech.c() * lambda * lambda + jump
            }
            None => {
                let q = self.mech.mu().psi_jump_quadrature(lambda, self.rel_tol);
                if !q.converged {
                    self.poisoned.set(true);
                }
                self.mech.b() * lambda + self.mech.c() * lambda * lambda + q.value
            }
        }
    }

    pub fn poisoned(&self) -> bool {
        self.poisoned.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_polynomial_case() {
        // Ψ(λ) = λ² at λ = 2.
        let mech = BranchingMechanism::feller(1.0, 0.0);
        assert_eq!(mech.psi(2.0).unwrap(), 4.0);
    }

    #[test]
    fn psi_vanishes_at_zero_for_all_families() {
        for mech in crate::test_mechanisms() {
            assert_eq!(mech.psi(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn truncated_stable_matches_composite_oracle() {
        // Independent oracle: fixed-order composite Simpson rule in log
        // coordinates for ∫_0^1 (e^{−λz} − 1 + λz) z^{−2.5} dz at λ = 3.
        let lambda = 3.0;
        let beta: f64 = 1.5;
        let (u_min, u_max) = (1e-12_f64.ln(), 0.0);
        let n = 200_000;
        let h = (u_max - u_min) / n as f64;
        let f = |u: f64| {
            let z: f64 = u.exp();
            ((-lambda * z).exp_m1() + lambda * z) * z.powf(-(1.0 + beta)) * z
        };
        let mut acc = f(u_min) + f(u_max);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(u_min + i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        // Frozen from the oracle above.
        assert!(
            (oracle - 6.936_869_006_780_744).abs() < 1e-9,
            "oracle={oracle:.15}"
        );

        let mech = BranchingMechanism::new(
            0.0,
            0.0,
            LevyMeasure::TruncatedStable { c: 1.0, beta },
        )
        .unwrap();
        let psi = mech.psi(lambda).unwrap();
        assert!(
            (psi - oracle).abs() <= 1e-8 * oracle.abs(),
            "psi={psi:.12}, oracle={oracle:.12}"
        );
    }

    #[test]
    fn pure_stable_is_exact_power() {
        let mech = BranchingMechanism::pure_stable(1.5);
        for lambda in [0.3, 1.0, 2.0, 9.0] {
            let psi = mech.psi(lambda).unwrap();
            assert!(
                (psi - lambda.powf(1.5)).abs() <= 1e-10 * (1.0 + psi.abs()),
                "λ={lambda}: {psi}"
            );
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        for mech in [
            BranchingMechanism::neveu(1.0, 0.5),
            BranchingMechanism::pure_stable(1.5),
            BranchingMechanism::new(0.2, 0.0, LevyMeasure::Stable { c: 0.4, beta: 0.7 }).unwrap(),
        ] {
            for lambda in [0.25, 1.0, 4.0, 16.0] {
                let closed = mech.psi(lambda).unwrap();
                let quad = mech.psi_quadrature(lambda, 1e-9);
                assert!(quad.converged);
                assert!(
                    (closed - quad.value).abs() <= 1e-7 * (1.0 + closed.abs()),
                    "λ={lambda}: closed={closed}, quad={}",
                    quad.value
                );
            }
        }
    }

    #[test]
    fn rejects_negative_diffusion() {
        assert!(BranchingMechanism::new(0.0, -1.0, LevyMeasure::Zero).is_err());
    }
}
