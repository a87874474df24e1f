//! Rough-surface interaction: the Rayleigh smooth/rough criterion, the
//! reflected/scattered power split, and the directive-scattering (DS) lobe
//! model with its numerically integrated normalization.
//!
//! Angle convention follows the usual incidence diagram: `theta_i` is the
//! incidence angle, the specular direction `theta_r` equals `theta_i` by the
//! reflection law, `theta_s` is the observation direction, and the lobe
//! argument is `psi = theta_s - theta_r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantity::{Frequency, PowerRatio};

/// Statistical and electromagnetic description of one scattering surface.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfaceSpec {
    /// Smooth-surface reflection coefficient `Gamma_s` in `[0, 1]`
    /// (also absorbs penetration loss).
    pub gamma_s: f64,
    /// Min-to-max surface protuberance `h0` in meters.
    pub protuberance_m: f64,
    /// RMS surface height in meters.
    pub rms_height_m: f64,
    /// Scattering-lobe width exponent `alpha_R` (larger = narrower lobe).
    pub lobe_exponent: f64,
    /// Effective aperture of the scattering surface in m^2.
    pub area_m2: f64,
}

impl SurfaceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma_s) {
            return Err(Error::Config(format!(
                "gamma_s must lie in [0, 1], got {}",
                self.gamma_s
            )));
        }
        if self.protuberance_m < 0.0 || self.rms_height_m < 0.0 {
            return Err(Error::Config(
                "surface heights must be nonnegative".into(),
            ));
        }
        if !(self.lobe_exponent > 0.0) {
            return Err(Error::Config(format!(
                "lobe_exponent must be positive, got {}",
                self.lobe_exponent
            )));
        }
        if !(self.area_m2 > 0.0) {
            return Err(Error::Config(format!(
                "area_m2 must be positive, got {}",
                self.area_m2
            )));
        }
        Ok(())
    }
}

/// Geometry of one transmitter-surface-receiver bounce.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScatterGeometry {
    /// Incidence angle from the surface normal, `[0, pi/2)`.
    pub theta_i_rad: f64,
    /// Observation direction of the receiver.
    pub theta_s_rad: f64,
    /// Transmitter-to-surface distance (m).
    pub r_i_m: f64,
    /// Surface-to-receiver distance (m).
    pub r_s_m: f64,
}

impl ScatterGeometry {
    /// Specular direction; equals the incidence angle by the reflection law.
    pub fn theta_r_rad(&self) -> f64 {
        self.theta_i_rad
    }

    /// Angle between the scattered and specular directions.
    pub fn psi_rad(&self) -> f64 {
        self.theta_s_rad - self.theta_r_rad()
    }

    pub fn validate(&self) -> Result<()> {
        check_incidence(self.theta_i_rad)?;
        if !(self.r_i_m > 0.0) || !(self.r_s_m > 0.0) {
            return Err(Error::Domain(format!(
                "surface distances must be positive, got r_i = {} m, r_s = {} m",
                self.r_i_m, self.r_s_m
            )));
        }
        Ok(())
    }
}

fn check_incidence(theta_i: f64) -> Result<()> {
    if !theta_i.is_finite() || !(0.0..PI / 2.0).contains(&theta_i) {
        return Err(Error::Domain(format!(
            "incidence angle must lie in [0, pi/2), got {theta_i} rad"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    Smooth,
    Rough,
}

/// Rayleigh critical height `h_c = lambda / (8 cos theta_i)`.
///
/// Surfaces with protuberance below `h_c` act smooth at this frequency and
/// incidence; the grazing limit `theta_i -> pi/2` is a domain error.
pub fn critical_height(f: Frequency, theta_i_rad: f64) -> Result<f64> {
    check_incidence(theta_i_rad)?;
    Ok(f.wavelength_m() / (8.0 * theta_i_rad.cos()))
}

/// Rayleigh classification: smooth iff `h0 < h_c`.
pub fn classify(surface: &SurfaceSpec, f: Frequency, theta_i_rad: f64) -> Result<Smoothness> {
    surface.validate()?;
    let hc = critical_height(f, theta_i_rad)?;
    Ok(if surface.protuberance_m < hc {
        Smoothness::Smooth
    } else {
        Smoothness::Rough
    })
}

/// Scattering loss factor
/// `rho ~= exp[-8 (pi h_rms cos theta_i / lambda)^2]`, in `(0, 1]`.
///
/// The effective rough-surface reflection coefficient is `rho * Gamma_s`.
pub fn rough_loss_factor(surface: &SurfaceSpec, f: Frequency, theta_i_rad: f64) -> Result<f64> {
    surface.validate()?;
    check_incidence(theta_i_rad)?;
    let x = PI * surface.rms_height_m * theta_i_rad.cos() / f.wavelength_m();
    Ok((-8.0 * x * x).exp())
}

/// Effective reflection coefficient of the rough surface, `rho * Gamma_s`.
pub fn effective_reflection_coeff(
    surface: &SurfaceSpec,
    f: Frequency,
    theta_i_rad: f64,
) -> Result<f64> {
    Ok(rough_loss_factor(surface, f, theta_i_rad)? * surface.gamma_s)
}

/// How incident power divides between the specular reflection and the
/// diffuse lobe.
#[derive(Debug, Clone, Copy)]
pub struct PowerSplit {
    /// Specularly reflected power `P rho^2 Gamma_s^2`.
    pub reflected: PowerRatio,
    /// Scattered power `P (1 - rho^2) Gamma_s^2`.
    pub scattered: PowerRatio,
    /// Scattering coefficient `S^2 = (1 - rho^2) Gamma_s^2`.
    pub s2: f64,
}

/// Split incident power into reflected and scattered components.
///
/// Identity: `reflected + scattered = P * Gamma_s^2`.
pub fn power_split(
    surface: &SurfaceSpec,
    f: Frequency,
    theta_i_rad: f64,
    p_incident: PowerRatio,
) -> Result<PowerSplit> {
    let rho = rough_loss_factor(surface, f, theta_i_rad)?;
    let rho2 = rho * rho;
    let g2 = surface.gamma_s * surface.gamma_s;
    let p = p_incident.linear();
    Ok(PowerSplit {
        reflected: PowerRatio::from_linear(p * rho2 * g2)?,
        scattered: PowerRatio::from_linear(p * (1.0 - rho2) * g2)?,
        s2: (1.0 - rho2) * g2,
    })
}

/// Integration domain for the DS normalization integral.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LobeDomain {
    /// Planar angles `theta_s in [theta_r - pi/2, theta_r + pi/2]`,
    /// `phi_s in [-pi/2, pi/2]`, integrated as written (`d theta d phi`,
    /// no solid-angle Jacobian).
    #[default]
    PlanarAngles,
    /// Hemisphere centered on the specular direction, integrated with the
    /// solid-angle element `sin psi d psi d phi`.
    HemisphereSolidAngle,
}

/// Placeholder for the backscattered lobe extension. Constructing one and
/// passing it to the DS routines is an `Unsupported` error; the published
/// model gives no backscatter form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BackscatterLobe {
    pub exponent: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DsConfig {
    pub domain: LobeDomain,
    pub backscatter: Option<BackscatterLobe>,
}

/// DS lobe shape `((1 + cos psi) / 2)^alpha`.
fn lobe(psi: f64, alpha: f64) -> f64 {
    ((1.0 + psi.cos()) / 2.0).powf(alpha)
}

/// DS normalization `F_alpha = integral of the lobe over the scattering
/// domain`, to absolute tolerance 1e-8.
///
/// On the default planar domain the `phi_s` integral is a constant factor
/// `pi`; on the hemisphere it is `2 pi` with a `sin psi` Jacobian.
pub fn ds_normalization(alpha_r: f64, cfg: &DsConfig) -> Result<f64> {
    if !(alpha_r > 0.0) || !alpha_r.is_finite() {
        return Err(Error::Config(format!(
            "alpha_R must be positive, got {alpha_r}"
        )));
    }
    if cfg.backscatter.is_some() {
        return Err(Error::Unsupported(
            "backscattered lobe is a reserved hook; no published form to integrate".into(),
        ));
    }
    match cfg.domain {
        LobeDomain::PlanarAngles => {
            let inner = adaptive_simpson(
                &|u| lobe(u, alpha_r),
                -PI / 2.0,
                PI / 2.0,
                1e-8 / PI / 2.0,
            )?;
            Ok(PI * inner)
        }
        LobeDomain::HemisphereSolidAngle => {
            let inner = adaptive_simpson(
                &|psi| lobe(psi, alpha_r) * psi.sin(),
                0.0,
                PI / 2.0,
                1e-8 / (2.0 * PI) / 2.0,
            )?;
            Ok(2.0 * PI * inner)
        }
    }
}

/// Received power on the scattered path:
/// `S^2 A_s (P_t G_t / 4 pi r_i^2) (1 / r_s^2 F_alpha) (lambda^2 / 4 pi)
///  G_r ((1 + cos(theta_s - theta_r)) / 2)^alpha_R`.
///
/// Maximal over the observation direction at the specular angle.
pub fn received_scattered_power(
    surface: &SurfaceSpec,
    geom: &ScatterGeometry,
    f: Frequency,
    p_t: PowerRatio,
    g_t: f64,
    g_r: f64,
    cfg: &DsConfig,
) -> Result<PowerRatio> {
    geom.validate()?;
    if !(g_t > 0.0) || !(g_r > 0.0) {
        return Err(Error::Domain(format!(
            "antenna gains must be positive, got g_t = {g_t}, g_r = {g_r}"
        )));
    }
    let split = power_split(surface, f, geom.theta_i_rad, p_t)?;
    let f_alpha = ds_normalization(surface.lobe_exponent, cfg)?;
    let lambda = f.wavelength_m();
    let p = split.s2
        * surface.area_m2
        * (p_t.linear() * g_t / (4.0 * PI * geom.r_i_m * geom.r_i_m))
        * (1.0 / (geom.r_s_m * geom.r_s_m * f_alpha))
        * (lambda * lambda / (4.0 * PI))
        * g_r
        * lobe(geom.psi_rad(), surface.lobe_exponent);
    PowerRatio::from_linear(p)
}

/// Adaptive Simpson integration with an absolute-error budget.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 60;
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!(
                "quadrature failed to converge on [{a:.6}, {b:.6}]: \
                 residual {err:.3e} exceeds budget {tol:.3e} at maximum depth {MAX_DEPTH}"
            )));
        }
        let lv = recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
        let rv = recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
        Ok(lv + rv)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}
