//! Asplund (sup-convolution) products: the closed-form self-product
//! `f⋆f_ε(z) = e^{-(1+ε)u(z/(1+ε))}` and two derivative limits checked by
//! finite-difference ladders with one Richardson extrapolation step,
//!
//! - `(∫f⋆f_ε − ∫f)/ε → n∫f + ∫f log f`,
//! - `(sup_{y∈B₂ⁿ} f(z−εy)a^ε − f(z))/ε → |∇f(z)| + f(z) log a`.

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::logconcave::{Exponent, LogConcaveFn};

/// Default ε ladder; geometric-ish decay balancing truncation against
/// cancellation in the quotients.
pub const DEFAULT_LADDER: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

/// Difference-quotient ladder with its Richardson limit.
#[derive(Debug, Clone)]
pub struct EpsilonLadder {
    pub eps_values: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolated: f64,
    /// Whether the gaps to the extrapolated limit shrink down the ladder.
    pub converged: bool,
}

impl EpsilonLadder {
    fn from_quotients(eps_values: Vec<f64>, quotients: Vec<f64>) -> Self {
        let k = quotients.len();
        assert!(k >= 2);
        let (e1, e2) = (eps_values[k - 2], eps_values[k - 1]);
        let (q1, q2) = (quotients[k - 2], quotients[k - 1]);
        // linear model q(ε) = L + Cε through the last two rungs
        let extrapolated = (e1 * q2 - e2 * q1) / (e1 - e2);
        let scale = extrapolated
            .abs()
            .max(quotients.iter().fold(0.0f64, |a, q| a.max(q.abs())))
            .max(1e-12);
        let gap_first = (quotients[0] - extrapolated).abs();
        let gap_last = (q2 - extrapolated).abs();
        let converged = gap_last <= gap_first + 1e-12 * scale && gap_last <= 0.05 * scale + 1e-9;
        Self {
            eps_values,
            quotients,
            extrapolated,
            converged,
        }
    }
}

/// A derivative check: the ladder plus the analytic target it should hit.
#[derive(Debug, Clone)]
pub struct DerivativeCheck {
    pub ladder: EpsilonLadder,
    pub target: f64,
}

impl DerivativeCheck {
    pub fn relative_error(&self) -> f64 {
        (self.ladder.extrapolated - self.target).abs() / self.target.abs().max(1e-9)
    }

    pub fn absolute_error(&self) -> f64 {
        (self.ladder.extrapolated - self.target).abs()
    }
}

/// Closed-form self-product `f⋆f_ε` with `f_ε(x) = f(x/ε)^ε`: writing
/// `f = e^{-u}`, the product is `e^{-(1+ε)u(z/(1+ε))}`, which stays in the
/// exponent family (bodies and domains dilate by `1+ε`, heights go to
/// `h^{1+ε}`). No optimization is performed.
pub fn self_product(f: &LogConcaveFn, eps: f64) -> Result<LogConcaveFn> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be > 0")));
    }
    let lam = 1.0 + eps;
    let height = f.height().powf(lam);
    match f.exponent() {
        Exponent::Indicator { body } => LogConcaveFn::indicator(height, body.scale(lam)),
        Exponent::GaugePower { body, alpha, shift } => LogConcaveFn::gauge_power(
            height,
            body.scale(lam.powf((alpha - 1.0) / alpha)),
            *alpha,
            shift * lam,
        ),
        Exponent::TruncatedGauge {
            body,
            plateau,
            shift,
        } => LogConcaveFn::truncated_gauge_raw(height, body.clone(), lam * plateau, shift * lam),
        Exponent::PiecewiseLinear { pieces, domain } => LogConcaveFn::piecewise_linear(
            height,
            pieces.iter().map(|(a, b)| (a.clone(), lam * b)).collect(),
            domain.scale(lam),
        ),
    }
}

/// Ladder check of `(∫f⋆f_ε − ∫f)/ε → n∫f + ∫f log f`.
pub fn self_product_derivative_check(f: &LogConcaveFn, ladder: &[f64]) -> Result<DerivativeCheck> {
    validate_ladder(ladder)?;
    let integral = f.integral()?;
    let target = f.dim() as f64 * integral + f.f_log_f_integral()?;
    let mut quotients = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let product_integral = self_product(f, eps)?.integral()?;
        quotients.push((product_integral - integral) / eps);
    }
    Ok(DerivativeCheck {
        ladder: EpsilonLadder::from_quotients(ladder.to_vec(), quotients),
        target,
    })
}

/// Ladder check of the pointwise limit with the ball function `g = (B₂ⁿ)^a`:
/// `(f⋆g_ε(z) − f(z))/ε → |∇f(z)| + f(z) log a`.
///
/// `f⋆g_ε(z) = sup_{y∈B₂ⁿ} f(z−εy)·a^ε`; the sup is evaluated by descending
/// the locally active affine piece of the exponent, so `z` must be a smooth
/// point ([`Error::KinkPoint`] otherwise).
pub fn ball_product_derivative(
    f: &LogConcaveFn,
    z: &Vector,
    a: f64,
    ladder: &[f64],
) -> Result<DerivativeCheck> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!("a = {a} must be > 0")));
    }
    validate_ladder(ladder)?;
    let fz = f.evaluate(z);
    let grad_norm = f.exponent_gradient_norm(z)?;
    let target = fz * grad_norm + fz * a.ln();
    let mut quotients = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let v_min = f.exponent_ball_min(z, eps)?;
        let sup = f.height() * (-v_min).exp() * a.powf(eps);
        quotients.push((sup - fz) / eps);
    }
    Ok(DerivativeCheck {
        ladder: EpsilonLadder::from_quotients(ladder.to_vec(), quotients),
        target,
    })
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(Error::InvalidArgument(
            "ladder needs at least two steps".into(),
        ));
    }
    for w in ladder.windows(2) {
        if !(w[0] > w[1] && w[1] > 0.0) {
            return Err(Error::InvalidArgument(
                "ladder must be strictly decreasing and positive".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
