//! Small special-function helpers: Γ, unit-ball volumes, binomials.

/// Euler gamma function Γ(x).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Volume of the Euclidean unit ball in `R^n`, computed as π^{n/2} / Γ(n/2 + 1).
///
/// The degenerate case n = 0 returns 1 (the 0-dimensional "volume" of a point),
/// which is the convention used by the projection routines.
pub fn unit_ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

/// Binomial coefficient as f64; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// k! as f64.
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Closed form of ∫₀^∞ (β + s)^k e^{-s} ds = Σ_j C(k,j) j! β^{k-j}, for β ≥ 0.
pub fn poly_exp_moment(beta: f64, k: usize) -> f64 {
    (0..=k)
        .map(|j| binomial(k, j) * factorial(j) * beta.powi((k - j) as i32))
        .sum()
}

/// Closed form of ∫₀^∞ s (β + s)^k e^{-s} ds = Σ_j C(k,j) (j+1)! β^{k-j}.
pub fn poly_exp_moment1(beta: f64, k: usize) -> f64 {
    (0..=k)
        .map(|j| binomial(k, j) * factorial(j + 1) * beta.powi((k - j) as i32))
        .sum()
}
