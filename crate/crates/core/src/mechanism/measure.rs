//! Jump-measure families: densities, partial moments, tail masses and jump
//! sampling. Every family keeps enough declared structure (small-z singularity
//! exponent, tail exponent) for divergence decisions that raw quadrature
//! cannot make.

use rand::Rng;

use crate::numeric::quad::{self, QuadResult};
use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A Lévy measure `μ` on `(0, ∞)` with `∫ (1 ∧ z²) μ(dz) < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasure {
    /// No jumps.
    Zero,
    /// Density `c·z^{−(1+β)}` on `(0, 1]`.
    TruncatedStable { c: f64, beta: f64 },
    /// Density `c·z^{−(1+β)}` on `(0, ∞)`.
    Stable { c: f64, beta: f64 },
    /// Density `c·z^{−2}` on `(0, ∞)`.
    Neveu { c: f64 },
    /// Density `c·z^{−(1+β)}·e^{−λ₀ z}` on `(0, ∞)`.
    TemperedStable { c: f64, beta: f64, tempering: f64 },
    /// Atoms `(z_i, w_i)`, all strictly positive.
    FiniteAtoms(Vec<(f64, f64)>),
    /// Piecewise-linear density on a strictly increasing grid, continued
    /// beyond the last node as `m_n (z/z_n)^{−tail_exponent}`.
    Tabulated {
        zs: Vec<f64>,
        ms: Vec<f64>,
        tail_exponent: f64,
    },
}

impl LevyMeasure {
    pub fn finite_atoms(atoms: &[(f64, f64)]) -> Self {
        LevyMeasure::FiniteAtoms(atoms.to_vec())
    }

    /// Structural validation plus the integrability requirement on (1 ∧ z²).
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::Zero => Ok(()),
            LevyMeasure::TruncatedStable { c, beta }
            | LevyMeasure::Stable { c, beta } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidSpec("stable amplitude must be > 0".into()));
                }
                if !(*beta > 0.0 && *beta < 2.0) {
                    return Err(Error::InvalidSpec(format!(
                        "stable index must lie in (0,2), got {beta}"
                    )));
                }
                Ok(())
            }
            LevyMeasure::Neveu { c } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidSpec("Neveu amplitude must be > 0".into()));
                }
                Ok(())
            }
            LevyMeasure::TemperedStable { c, beta, tempering } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidSpec("tempered amplitude must be > 0".into()));
                }
                if !(*beta > 0.0 && *beta < 2.0) {
                    return Err(Error::InvalidSpec(format!(
                        "tempered index must lie in (0,2), got {beta}"
                    )));
                }
                if !(*tempering > 0.0) {
                    return Err(Error::InvalidSpec("tempering rate must be > 0".into()));
                }
                Ok(())
            }
            LevyMeasure::FiniteAtoms(atoms) => {
                for &(z, w) in atoms {
                    if !(z > 0.0 && w > 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "atoms must have positive location and weight, got ({z}, {w})"
                        )));
                    }
                }
                Ok(())
            }
            LevyMeasure::Tabulated {
                zs,
                ms,
                tail_exponent,
            } => {
                if zs.len() < 2 || zs.len() != ms.len() {
                    return Err(Error::InvalidSpec(
                        "tabulated density needs matching grids of length ≥ 2".into(),
                    ));
                }
                if !zs.windows(2).all(|w| w[1] > w[0]) || zs[0] <= 0.0 {
                    return Err(Error::InvalidSpec(
                        "tabulated grid must be strictly increasing and positive".into(),
                    ));
                }
                if !ms.iter().all(|&m| m > 0.0) {
                    return Err(Error::InvalidSpec(
                        "tabulated density values must be strictly positive".into(),
                    ));
                }
                if !(*tail_exponent > 1.0) {
                    return Err(Error::InvalidSpec(
                        "tabulated tail exponent must exceed 1 for a finite tail mass".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LevyMeasure::Zero => true,
            LevyMeasure::FiniteAtoms(a) => a.is_empty(),
            _ => false,
        }
    }

    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        match self {
            LevyMeasure::FiniteAtoms(a) => Some(a),
            _ => None,
        }
    }

    /// Density with respect to Lebesgue measure; zero off the support.
    /// Atomic measures have no density and answer zero everywhere.
    pub fn density(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match self {
            LevyMeasure::Zero | LevyMeasure::FiniteAtoms(_) => 0.0,
            LevyMeasure::TruncatedStable { c, beta } => {
                if z <= 1.0 {
                    c * z.powf(-(1.0 + beta))
                } else {
                    0.0
                }
            }
            LevyMeasure::Stable { c, beta } => c * z.powf(-(1.0 + beta)),
            LevyMeasure::Neveu { c } => c / (z * z),
            LevyMeasure::TemperedStable { c, beta, tempering } => {
                c * z.powf(-(1.0 + beta)) * (-tempering * z).exp()
            }
            LevyMeasure::Tabulated {
                zs,
                ms,
                tail_exponent,
            } => {
                if z < zs[0] {
                    0.0
                } else if z >= *zs.last().unwrap() {
                    let zn = *zs.last().unwrap();
                    ms.last().unwrap() * (z / zn).powf(-tail_exponent)
                } else {
                    let i = zs.partition_point(|&x| x <= z).min(zs.len() - 1) - 1;
                    let t = (z - zs[i]) / (zs[i + 1] - zs[i]);
                    ms[i] + t * (ms[i + 1] - ms[i])
                }
            }
        }
    }

    /// Declared order of the density singularity at the origin: density
    /// behaves like `z^{−p}` with `p = small_z_exponent()`.
    pub fn small_z_exponent(&self) -> Option<f64> {
        match self {
            LevyMeasure::TruncatedStable { beta, .. }
            | LevyMeasure::Stable { beta, .. }
            | LevyMeasure::TemperedStable { beta, .. } => Some(1.0 + beta),
            LevyMeasure::Neveu { .. } => Some(2.0),
            _ => None,
        }
    }

    /// Upper edge of the support, `None` when unbounded.
    pub fn support_upper(&self) -> Option<f64> {
        match self {
            LevyMeasure::Zero => Some(0.0),
            LevyMeasure::TruncatedStable { .. } => Some(1.0),
            LevyMeasure::FiniteAtoms(a) => {
                Some(a.iter().map(|&(z, _)| z).fold(0.0, f64::max))
            }
            _ => None,
        }
    }

    /// Lower edge of the support (0 except for tabulated densities).
    pub fn support_lower(&self) -> f64 {
        match self {
            LevyMeasure::Tabulated { zs, .. } => zs[0],
            LevyMeasure::FiniteAtoms(a) => {
                a.iter().map(|&(z, _)| z).fold(f64::INFINITY, f64::min)
            }
            _ => 0.0,
        }
    }

    /// `μ((a, ∞))`; infinite only at `a = 0` for infinite-activity families.
    pub fn mass_above(&self, a: f64) -> f64 {
        let a = a.max(0.0);
        match self {
            LevyMeasure::Zero => 0.0,
            LevyMeasure::TruncatedStable { c, beta } => {
                if a >= 1.0 {
                    0.0
                } else if a == 0.0 {
                    f64::INFINITY
                } else {
                    c * (a.powf(-beta) - 1.0) / beta
                }
            }
            LevyMeasure::Stable { c, beta } => {
                if a == 0.0 {
                    f64::INFINITY
                } else {
                    c * a.powf(-beta) / beta
                }
            }
            LevyMeasure::Neveu { c } => {
                if a == 0.0 {
                    f64::INFINITY
                } else {
                    c / a
                }
            }
            LevyMeasure::TemperedStable { .. } => {
                if a == 0.0 {
                    f64::INFINITY
                } else {
                    // Exponential tempering makes the tail integrable.
                    quad::integrate_semi_infinite(|z| self.density(z), a, 1e-10, 1e-14).value
                }
            }
            LevyMeasure::FiniteAtoms(atoms) => {
                atoms.iter().filter(|&&(z, _)| z > a).map(|&(_, w)| w).sum()
            }
            LevyMeasure::Tabulated {
                zs,
                ms,
                tail_exponent,
            } => {
                let zn = *zs.last().unwrap();
                let mn = *ms.last().unwrap();
                if a >= zn {
                    mn * (a / zn).powf(-tail_exponent) * a / (tail_exponent - 1.0)
                } else {
                    let body =
                        quad::integrate(|z| self.density(z), a.max(zs[0]), zn, 1e-10, 1e-14)
                            .value;
                    body + mn * zn / (tail_exponent - 1.0)
                }
            }
        }
    }

    /// `∫_a^b z μ(dz)` for `0 < a ≤ b` (b may be infinite).
    pub fn mean_between(&self, a: f64, b: f64) -> f64 {
        assert!(a > 0.0 && b >= a);
        match self {
            LevyMeasure::Zero => 0.0,
            LevyMeasure::TruncatedStable { c, beta } => {
                let hi = b.min(1.0);
                if hi <= a {
                    0.0
                } else {
                    power_mean_integral(*c, *beta, a, hi)
                }
            }
            LevyMeasure::Stable { c, beta } => {
                if b.is_infinite() && *beta <= 1.0 {
                    return f64::INFINITY;
                }
                let hi = if b.is_infinite() {
                    return c * a.powf(1.0 - beta) / (beta - 1.0);
                } else {
                    b
                };
                power_mean_integral(*c, *beta, a, hi)
            }
            LevyMeasure::Neveu { c } => {
                if b.is_infinite() {
                    f64::INFINITY
                } else {
                    c * (b / a).ln()
                }
            }
            LevyMeasure::TemperedStable { .. } => {
                if b.is_infinite() {
                    quad::integrate_semi_infinite(|z| z * self.density(z), a, 1e-10, 1e-14)
                        .value
                } else {
                    quad::integrate(|z| z * self.density(z), a, b, 1e-10, 1e-14).value
                }
            }
            LevyMeasure::FiniteAtoms(atoms) => atoms
                .iter()
                .filter(|&&(z, _)| z > a && z <= b)
                .map(|&(z, w)| z * w)
                .sum(),
            LevyMeasure::Tabulated {
                zs,
                ms,
                tail_exponent,
            } => {
                let zn = *zs.last().unwrap();
                let mn = *ms.last().unwrap();
                let te = *tail_exponent;
                let mut total = 0.0;
                let body_lo = a.max(zs[0]);
                let body_hi = b.min(zn);
                if body_hi > body_lo {
                    total +=
                        quad::integrate(|z| z * self.density(z), body_lo, body_hi, 1e-10, 1e-14)
                            .value;
                }
                if b > zn {
                    let lo = a.max(zn);
                    if te <= 2.0 && b.is_infinite() {
                        return f64::INFINITY;
                    }
                    total += if (te - 2.0).abs() < 1e-12 {
                        mn * zn.powf(te) * (b / lo).ln()
                    } else {
                        let tail = |z: f64| mn * zn.powf(te) * z.powf(2.0 - te) / (2.0 - te);
                        if b.is_infinite() {
                            -tail(lo)
                        } else {
                            tail(b) - tail(lo)
                        }
                    };
                }
                total
            }
        }
    }

    /// `∫_0^ε z² μ(dz)`.
    pub fn second_moment_below(&self, eps: f64) -> f64 {
        assert!(eps >= 0.0);
        if eps == 0.0 {
            return 0.0;
        }
        match self {
            LevyMeasure::Zero => 0.0,
            LevyMeasure::TruncatedStable { c, beta } => {
                let hi = eps.min(1.0);
                c * hi.powf(2.0 - beta) / (2.0 - beta)
            }
            LevyMeasure::Stable { c, beta } => c * eps.powf(2.0 - beta) / (2.0 - beta),
            LevyMeasure::Neveu { c } => c * eps,
            LevyMeasure::TemperedStable { beta, .. } => quad::integrate_singular_origin(
                |z| z * z * self.density(z),
                eps,
                1.0 - beta,
                1e-10,
                1e-14,
            )
            .value,
            LevyMeasure::FiniteAtoms(atoms) => atoms
                .iter()
                .filter(|&&(z, _)| z <= eps)
                .map(|&(z, w)| z * z * w)
                .sum(),
            LevyMeasure::Tabulated { zs, .. } => {
                if eps <= zs[0] {
                    0.0
                } else {
                    quad::integrate(
                        |z| z * z * self.density(z),
                        zs[0],
                        eps.min(*zs.last().unwrap()),
                        1e-10,
                        1e-14,
                    )
                    .value
                        + if eps > *zs.last().unwrap() {
                            quad::integrate(
                                |z| z * z * self.density(z),
                                *zs.last().unwrap(),
                                eps,
                                1e-10,
                                1e-14,
                            )
                            .value
                        } else {
                            0.0
                        }
                }
            }
        }
    }

    /// `∫_{z>1} z μ(dz)`; `None` when infinite.
    pub fn first_moment_tail(&self) -> Option<f64> {
        match self {
            LevyMeasure::Zero | LevyMeasure::TruncatedStable { .. } => Some(0.0),
            LevyMeasure::Stable { c, beta } => {
                if *beta > 1.0 {
                    Some(c / (beta - 1.0))
                } else {
                    None
                }
            }
            LevyMeasure::Neveu { .. } => None,
            LevyMeasure::TemperedStable { .. } => Some(self.mean_between(1.0, f64::INFINITY)),
            LevyMeasure::FiniteAtoms(atoms) => Some(
                atoms
                    .iter()
                    .filter(|&&(z, _)| z > 1.0)
                    .map(|&(z, w)| z * w)
                    .sum(),
            ),
            LevyMeasure::Tabulated { tail_exponent, .. } => {
                if *tail_exponent > 2.0 {
                    Some(self.mean_between(1.0, f64::INFINITY))
                } else {
                    None
                }
            }
        }
    }

    /// `∫_0^1 z μ(dz)`; `None` when infinite.
    pub fn small_mean(&self) -> Option<f64> {
        match self {
            LevyMeasure::Zero => Some(0.0),
            LevyMeasure::TruncatedStable { c, beta } | LevyMeasure::Stable { c, beta } => {
                if *beta < 1.0 {
                    Some(c / (1.0 - beta))
                } else {
                    None
                }
            }
            LevyMeasure::Neveu { .. } => None,
            LevyMeasure::TemperedStable { beta, .. } => {
                if *beta < 1.0 {
                    Some(
                        quad::integrate_singular_origin(
                            |z| z * self.density(z),
                            1.0,
                            -beta,
                            1e-10,
                            1e-14,
                        )
                        .value,
                    )
                } else {
                    None
                }
            }
            LevyMeasure::FiniteAtoms(atoms) => Some(
                atoms
                    .iter()
                    .filter(|&&(z, _)| z <= 1.0)
                    .map(|&(z, w)| z * w)
                    .sum(),
            ),
            LevyMeasure::Tabulated { .. } => Some(self.mean_between_from_support(1.0)),
        }
    }

    fn mean_between_from_support(&self, hi: f64) -> f64 {
        let lo = self.support_lower();
        if lo >= hi {
            0.0
        } else {
            self.mean_between(lo, hi)
        }
    }

    /// `∫ (1 ∧ z²) μ(dz)`, the structural finiteness requirement.
    pub fn one_and_z2(&self) -> f64 {
        self.second_moment_below(1.0) + self.mass_above(1.0)
    }

    /// Draw one jump from the normalised restriction of `μ` to `(ε, ∞)`.
    /// Caller guarantees `mass_above(eps) > 0`.
    pub fn sample_restricted(&self, eps: f64, rng: &mut impl Rng) -> f64 {
        debug_assert!(eps > 0.0 || self.mass_above(0.0).is_finite());
        match self {
            LevyMeasure::Zero => unreachable!("zero measure has no jumps"),
            LevyMeasure::TruncatedStable { beta, .. } => {
                let u: f64 = rng.random();
                let a = eps.min(1.0).powf(-beta);
                (a - u * (a - 1.0)).powf(-1.0 / beta)
            }
            LevyMeasure::Stable { beta, .. } => {
                let u: f64 = rng.random();
                eps * (1.0 - u).powf(-1.0 / beta)
            }
            LevyMeasure::Neveu { .. } => {
                let u: f64 = rng.random();
                eps / (1.0 - u)
            }
            LevyMeasure::TemperedStable { beta, tempering, .. } => loop {
                let u: f64 = rng.random();
                let z = eps * (1.0 - u).powf(-1.0 / beta);
                let acc: f64 = rng.random();
                if acc <= (-tempering * (z - eps)).exp() {
                    return z;
                }
            },
            LevyMeasure::FiniteAtoms(atoms) => {
                let total: f64 = atoms.iter().filter(|&&(z, _)| z > eps).map(|&(_, w)| w).sum();
                let mut u = rng.random::<f64>() * total;
                for &(z, w) in atoms.iter().filter(|&&(z, _)| z > eps) {
                    if u <= w {
                        return z;
                    }
                    u -= w;
                }
                atoms.last().expect("nonempty atoms").0
            }
            LevyMeasure::Tabulated { .. } => {
                // Inverse CDF by bisection on the cumulative mass; the family
                // is diagnostic, not a hot path.
                let total = self.mass_above(eps);
                let target = rng.random::<f64>() * total;
                let (mut lo, mut hi) = (eps, eps.max(self.support_lower()).max(1.0));
                while self.mass_above(eps) - self.mass_above(hi) < target {
                    hi *= 2.0;
                    if hi > 1e12 {
                        break;
                    }
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.mass_above(eps) - self.mass_above(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Closed form of `∫ (e^{−λz} − 1 + λz·1_{z≤1}) μ(dz)` when the family
    /// admits one.
    pub fn psi_jump_closed(&self, lambda: f64) -> Option<f64> {
        if lambda == 0.0 {
            return Some(0.0);
        }
        match self {
            LevyMeasure::Zero => Some(0.0),
            LevyMeasure::FiniteAtoms(atoms) => Some(
                atoms
                    .iter()
                    .map(|&(z, w)| {
                        let comp = if z <= 1.0 { lambda * z } else { 0.0 };
                        w * ((-lambda * z).exp_m1() + comp)
                    })
                    .sum(),
            ),
            LevyMeasure::Stable { c, beta } => Some(c * stable_psi_jump(*beta, lambda)),
            LevyMeasure::Neveu { c } => {
                Some(c * (lambda * lambda.ln() + (EULER_GAMMA - 1.0) * lambda))
            }
            _ => None,
        }
    }

    /// Quadrature evaluation of the same integral; available for every
    /// absolutely continuous family, and used to cross-check closed forms.
    pub fn psi_jump_quadrature(&self, lambda: f64, rel_tol: f64) -> QuadResult {
        if lambda == 0.0 || self.is_zero() {
            return QuadResult {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
                converged: true,
            };
        }
        if let Some(atoms) = self.atoms() {
            let _ = atoms;
            // Atomic sums are exact; report them through the same interface.
            return QuadResult {
                value: self.psi_jump_closed(lambda).unwrap(),
                abs_error: 0.0,
                evaluations: 0,
                converged: true,
            };
        }
        let phi = |z: f64| (-lambda * z).exp_m1() + lambda * z;
        let lo = self.support_lower();
        let hi_small = self.support_upper().unwrap_or(f64::INFINITY).min(1.0);

        // (0, 1]: compensated integrand, z² order at the origin.
        let small = if lo > 0.0 {
            quad::integrate(|z| phi(z) * self.density(z), lo.min(hi_small), hi_small, rel_tol, 1e-300)
        } else {
            let origin_power = 2.0 - self.small_z_exponent().unwrap_or(0.0);
            quad::integrate_singular_origin(
                |z| phi(z) * self.density(z),
                hi_small,
                origin_power,
                rel_tol,
                1e-300,
            )
        };

        // (1, ∞): raw integrand e^{−λz} − 1.
        let large = match self.support_upper() {
            Some(u) if u <= 1.0 => QuadResult {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
                converged: true,
            },
            _ => quad::integrate_semi_infinite(
                |z| (-lambda * z).exp_m1() * self.density(z),
                1.0,
                rel_tol,
                1e-300,
            ),
        };

        QuadResult {
            value: small.value + large.value,
            abs_error: small.abs_error + large.abs_error,
            evaluations: small.evaluations + large.evaluations,
            converged: small.converged && large.converged,
        }
    }
}

fn power_mean_integral(c: f64, beta: f64, a: f64, b: f64) -> f64 {
    // ∫_a^b z · c z^{−(1+β)} dz
    if (beta - 1.0).abs() < 1e-12 {
        c * (b / a).ln()
    } else {
        c * (b.powf(1.0 - beta) - a.powf(1.0 - beta)) / (1.0 - beta)
    }
}

/// `∫_0^∞ (e^{−λz} − 1 + λz·1_{z≤1}) z^{−(1+β)} dz` for unit amplitude.
fn stable_psi_jump(beta: f64, lambda: f64) -> f64 {
    if (beta - 1.0).abs() < 1e-9 {
        return lambda * lambda.ln() + (EULER_GAMMA - 1.0) * lambda;
    }
    if beta > 1.0 {
        // Fully compensated integral minus the over-compensation beyond z = 1.
        let j = libm::tgamma(2.0 - beta) / (beta * (beta - 1.0));
        j * lambda.powf(beta) - lambda / (beta - 1.0)
    } else {
        // Uncompensated integral plus the compensator on (0, 1].
        lambda / (1.0 - beta) - libm::tgamma(1.0 - beta) / beta * lambda.powf(beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_stable_masses() {
        let mu = LevyMeasure::TruncatedStable { c: 1.0, beta: 1.5 };
        // μ((a,1]) = (a^{−β} − 1)/β
        assert!((mu.mass_above(0.25) - (0.25_f64.powf(-1.5) - 1.0) / 1.5).abs() < 1e-12);
        assert_eq!(mu.mass_above(1.0), 0.0);
        assert!(mu.mass_above(0.0).is_infinite());
        // σ²_ε = ε^{2−β}/(2−β)
        assert!((mu.second_moment_below(0.01) - 0.01_f64.powf(0.5) / 0.5).abs() < 1e-12);
        // m_ε = (ε^{1−β} − 1)/(β−1)
        let m = mu.mean_between(0.01, 1.0);
        assert!((m - (0.01_f64.powf(-0.5) - 1.0) / 0.5).abs() < 1e-10);
    }

    #[test]
    fn neveu_closed_form_matches_quadrature() {
        let mu = LevyMeasure::Neveu { c: 1.0 };
        for lambda in [0.5, 1.0, 3.0, 10.0] {
            let closed = mu.psi_jump_closed(lambda).unwrap();
            let quad = mu.psi_jump_quadrature(lambda, 1e-10);
            assert!(quad.converged);
            assert!(
                (closed - quad.value).abs() <= 1e-7 * (1.0 + closed.abs()),
                "λ={lambda}: closed={closed}, quad={}",
                quad.value
            );
        }
    }

    #[test]
    fn stable_closed_form_matches_quadrature() {
        for beta in [0.5, 1.3, 1.5, 1.8] {
            let mu = LevyMeasure::Stable { c: 0.7, beta };
            for lambda in [0.5, 2.0, 7.0] {
                let closed = mu.psi_jump_closed(lambda).unwrap();
                let quad = mu.psi_jump_quadrature(lambda, 1e-10);
                assert!(quad.converged, "β={beta} λ={lambda}");
                assert!(
                    (closed - quad.value).abs() <= 1e-7 * (1.0 + closed.abs()),
                    "β={beta} λ={lambda}: closed={closed} quad={}",
                    quad.value
                );
            }
        }
    }

    #[test]
    fn restricted_sampling_matches_tail_mass() {
        use crate::numeric::rng::stream_rng;
        let mu = LevyMeasure::TruncatedStable { c: 1.0, beta: 1.5 };
        let mut rng = stream_rng(11, 0);
        let eps = 0.1;
        let n = 40_000;
        // P(Z > 0.5 | Z > ε) should match the mass ratio.
        let hits = (0..n)
            .filter(|_| mu.sample_restricted(eps, &mut rng) > 0.5)
            .count();
        let expect = mu.mass_above(0.5) / mu.mass_above(eps);
        let p = hits as f64 / n as f64;
        assert!(
            (p - expect).abs() < 4.0 * (expect * (1.0 - expect) / n as f64).sqrt(),
            "p={p}, expect={expect}"
        );
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(LevyMeasure::TruncatedStable { c: -1.0, beta: 1.5 }.validate().is_err());
        assert!(LevyMeasure::Stable { c: 1.0, beta: 2.0 }.validate().is_err());
        assert!(LevyMeasure::finite_atoms(&[(0.0, 1.0)]).validate().is_err());
        assert!(LevyMeasure::Tabulated {
            zs: vec![1.0, 0.5],
            ms: vec![1.0, 1.0],
            tail_exponent: 2.5
        }
        .validate()
        .is_err());
    }
}
