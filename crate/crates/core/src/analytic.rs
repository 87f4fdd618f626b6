//! Weak-coupling closed forms for the chooser model.
//!
//! These are the reference curves the exact propagation is compared
//! against. Every function takes Γ explicitly, so both the self-consistent
//! parameterisation (Δ = πΓ, hence Γ = U) and free choices can be checked.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Resonance width Γ = πU²/Δ of the flat-band self-energy.
pub fn gamma_from(u: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::param("delta", format!("must be positive, got {delta}")));
    }
    Ok(PI * u * u / delta)
}

/// Band width satisfying Δ = πΓ together with Γ = πU²/Δ, i.e. Δ = πU.
pub fn self_consistent_delta(u: f64) -> f64 {
    PI * u.abs()
}

/// Green function of the projected state, 1/(ε − α + iΓ).
pub fn green(eps: f64, alpha: f64, gamma: f64) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    Ok(Complex64::new(eps - alpha, gamma).inv())
}

/// Eigenvalues of the three-state chooser matrix: `(0, +√(V²+W²), −√(V²+W²))`.
pub fn chooser_eigenvalues(v: f64, w: f64) -> (f64, f64, f64) {
    let r = v.hypot(w);
    (0.0, r, -r)
}

/// Tabulated coefficients `(C_Q0, C_R0, C_K)` of the zero-energy state.
///
/// With both chooser couplings positive the actual null vector carries the
/// opposite sign on `C_K`; see [`null_state`].
pub fn zero_state_coeffs(v: f64, w: f64) -> Result<(f64, f64, f64)> {
    let r = v.hypot(w);
    if r == 0.0 {
        return Err(Error::Degenerate(
            "V = W = 0: the zero-energy eigenvector is not unique".into(),
        ));
    }
    Ok((w / r, 0.0, v / r))
}

/// Null vector `(W, 0, −V)/√(V²+W²)` of the three-state chooser matrix as
/// built, i.e. the zero state with the sign fixed by the couplings.
pub fn null_state(v: f64, w: f64) -> Result<(f64, f64, f64)> {
    let (q, r, k) = zero_state_coeffs(v, w)?;
    Ok((q, r, -k))
}

/// `⟨Kκ_proj|Ψ(t)⟩ ≈ iπ(U/Δ)e^{−Γt}`.
pub fn kproj_amplitude(t: f64, u: f64, delta: f64, gamma: f64) -> Complex64 {
    Complex64::new(0.0, PI * u / delta * (-gamma * t).exp())
}

/// `⟨R0|Ψ(t)⟩ ≈ πUW/(Δ(Γ − iα))`, independent of time.
pub fn r0_amplitude(u: f64, w: f64, delta: f64, gamma: f64, alpha: f64) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    Ok(Complex64::new(PI * u * w / delta, 0.0) / Complex64::new(gamma, -alpha))
}

/// Summed weight of the dressed band states, `1 − e^{−2Γt} − W²/U²`.
///
/// This is the self-consistent weak-coupling form and is negative near
/// `t = 0` (it starts at `−W²/U²`); it is meaningful for `t ≳ 1/Γ`.
pub fn band_weight(t: f64, u: f64, w: f64, gamma: f64) -> Result<f64> {
    if u == 0.0 {
        return Err(Error::param("u", "band coupling must be non-zero"));
    }
    Ok(1.0 - (-2.0 * gamma * t).exp() - (w * w) / (u * u))
}

/// Unitarity bookkeeping before the self-consistent simplification:
/// `1 − π²[(U/Δ)²e^{−2Γt} + (UW/(ΔΓ))²]`.
pub fn band_weight_unsimplified(t: f64, u: f64, w: f64, delta: f64, gamma: f64) -> f64 {
    let k = PI * u / delta;
    let r = PI * u * w / (delta * gamma);
    1.0 - k * k * (-2.0 * gamma * t).exp() - r * r
}
