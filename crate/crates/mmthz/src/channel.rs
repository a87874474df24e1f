//! Narrowband link equations for mmWave and THz links.
//!
//! The mmWave received power is the product
//! `P_t * l_s(r) * g_t * g_r * H` with a power-law path loss per link state
//! and unit-mean Nakagami power fading. The THz equations add the molecular
//! absorption transmittance, and the bounce paths compose the surface
//! module's reflection/scattering coefficients. Everything is computed in
//! linear units.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::atmosphere::{transmittance, AbsorptionSpectrum};
use crate::error::{Error, Result};
use crate::quantity::{Frequency, PowerRatio, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkState {
    Los,
    Nlos,
}

/// Power-law path loss `l(r) = c r^{-alpha}` with near-field gain `c` and
/// exponent `alpha`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PathLossLaw {
    pub near_field_gain: f64,
    pub exponent: f64,
}

impl PathLossLaw {
    pub fn validate(&self) -> Result<()> {
        if !(self.near_field_gain > 0.0) || !(self.exponent > 0.0) {
            return Err(Error::Config(format!(
                "path-loss law needs positive near-field gain and exponent, got c = {}, alpha = {}",
                self.near_field_gain, self.exponent
            )));
        }
        Ok(())
    }

    /// Friis free-space law at frequency `f`: `c = (lambda / 4 pi)^2`,
    /// `alpha = 2`.
    pub fn friis(f: Frequency) -> Self {
        let lambda = f.wavelength_m();
        PathLossLaw {
            near_field_gain: (lambda / (4.0 * std::f64::consts::PI)).powi(2),
            exponent: 2.0,
        }
    }

    pub fn eval(&self, r_m: f64) -> Result<f64> {
        if !(r_m > 0.0) {
            return Err(Error::Domain(format!(
                "link distance must be positive, got {r_m} m"
            )));
        }
        Ok(self.near_field_gain * r_m.powf(-self.exponent))
    }
}

/// Path-loss laws per link state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StatePathLoss {
    pub los: PathLossLaw,
    pub nlos: PathLossLaw,
}

impl StatePathLoss {
    pub fn for_state(&self, state: LinkState) -> &PathLossLaw {
        match state {
            LinkState::Los => &self.los,
            LinkState::Nlos => &self.nlos,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.los.validate()?;
        self.nlos.validate()
    }
}

/// Nakagami shape parameters per link state. Fading power is normalized to
/// unit mean, so the link equations read as average power times a fade.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FadingSpec {
    pub mu_los: f64,
    pub mu_nlos: f64,
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_los > 0.0) || !(self.mu_nlos > 0.0) {
            return Err(Error::Config(format!(
                "Nakagami shapes must be positive, got mu_los = {}, mu_nlos = {}",
                self.mu_los, self.mu_nlos
            )));
        }
        Ok(())
    }

    pub fn mu(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.mu_los,
            LinkState::Nlos => self.mu_nlos,
        }
    }
}

/// Unit-mean Nakagami power fading: `H ~ Gamma(shape = mu, scale = 1/mu)`.
#[derive(Debug, Clone)]
pub struct NakagamiFading {
    gamma: Gamma<f64>,
}

impl NakagamiFading {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!(
                "Nakagami shape must be positive, got {mu}"
            )));
        }
        let gamma = Gamma::new(mu, 1.0 / mu)
            .map_err(|e| Error::Domain(format!("invalid Nakagami shape {mu}: {e}")))?;
        Ok(NakagamiFading { gamma })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

/// One unit-mean Nakagami power draw from a fresh seeded stream.
pub fn sample_nakagami_power(mu: f64, seed: u64) -> Result<f64> {
    use rand::SeedableRng;
    let fading = NakagamiFading::new(mu)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok(fading.sample(&mut rng))
}

/// Fade depth quantile: the value `h` with `P[H <= h] = q` for the
/// unit-mean Nakagami power distribution.
pub fn fade_percentile(mu: f64, q: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!(
            "Nakagami shape must be positive, got {mu}"
        )));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "quantile must lie in [0, 1), got {q}"
        )));
    }
    let gamma = statrs::distribution::Gamma::new(mu, mu)
        .map_err(|e| Error::Domain(format!("invalid Nakagami shape {mu}: {e}")))?;
    Ok(gamma.inverse_cdf(q))
}

/// mmWave received power `P_t l_s(r) g_t g_r H`. Molecular absorption is
/// deliberately absent: the mmWave bands of interest avoid the absorption
/// peaks.
pub fn mmwave_rx_power(
    p_t: PowerRatio,
    pathloss: &StatePathLoss,
    state: LinkState,
    r_m: f64,
    g_t: f64,
    g_r: f64,
    fade: f64,
) -> Result<PowerRatio> {
    pathloss.validate()?;
    if g_t < 0.0 || g_r < 0.0 || fade < 0.0 {
        return Err(Error::Domain(format!(
            "gains and fade must be nonnegative, got g_t = {g_t}, g_r = {g_r}, H = {fade}"
        )));
    }
    let l = pathloss.for_state(state).eval(r_m)?;
    PowerRatio::from_linear(p_t.linear() * l * g_t * g_r * fade)
}

/// Free-space path loss `(lambda / 4 pi r)^2` as a linear gain.
pub fn fspl(f: Frequency, r_m: f64) -> Result<PowerRatio> {
    if !(r_m > 0.0) {
        return Err(Error::Domain(format!(
            "link distance must be positive, got {r_m} m"
        )));
    }
    let lambda = f.wavelength_m();
    PowerRatio::from_linear((lambda / (4.0 * std::f64::consts::PI * r_m)).powi(2))
}

/// THz LOS received power `P_t l(r) g_t g_r tau(r)` with free-space path
/// loss and molecular-absorption transmittance.
pub fn thz_rx_power_los(
    p_t: PowerRatio,
    f: Frequency,
    r_m: f64,
    g_t: f64,
    g_r: f64,
    spectrum: &AbsorptionSpectrum,
) -> Result<PowerRatio> {
    let l = fspl(f, r_m)?.linear();
    let tau = transmittance(r_m, f, spectrum)?.linear();
    PowerRatio::from_linear(p_t.linear() * l * g_t * g_r * tau)
}

/// Geometry and surface coefficients of one THz bounce path.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThzPathGeometry {
    /// Transmitter-to-surface distance (m).
    pub r1_m: f64,
    /// Surface-to-receiver distance (m).
    pub r2_m: f64,
    /// Coefficient applied on the scattered path.
    pub gamma_r: f64,
    /// Coefficient applied on the reflected path (with the squared
    /// reflection coefficient).
    pub gamma_s: f64,
}

impl ThzPathGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.r1_m > 0.0) || !(self.r2_m > 0.0) {
            return Err(Error::Domain(format!(
                "bounce distances must be positive, got r1 = {} m, r2 = {} m",
                self.r1_m, self.r2_m
            )));
        }
        if self.gamma_r < 0.0 || self.gamma_s < 0.0 {
            return Err(Error::Domain(
                "bounce coefficients must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Scattered bounce power
/// `P_t g_r g_t l(r1) l(r2) tau(r1) tau(r2) Gamma_R`.
pub fn thz_scattered_path(
    p_t: PowerRatio,
    f: Frequency,
    geom: &ThzPathGeometry,
    g_t: f64,
    g_r: f64,
    spectrum: &AbsorptionSpectrum,
) -> Result<PowerRatio> {
    geom.validate()?;
    let l1 = fspl(f, geom.r1_m)?.linear();
    let l2 = fspl(f, geom.r2_m)?.linear();
    let t1 = transmittance(geom.r1_m, f, spectrum)?.linear();
    let t2 = transmittance(geom.r2_m, f, spectrum)?.linear();
    PowerRatio::from_linear(p_t.linear() * g_t * g_r * l1 * l2 * t1 * t2 * geom.gamma_r)
}

/// Reflected bounce power
/// `P_t g_r g_t l(r1 + r2) Gamma^2 tau(r1 + r2) Gamma_S`, where `Gamma` may
/// come directly or as `rho * Gamma_s` from the surface module.
pub fn thz_reflected_path(
    p_t: PowerRatio,
    f: Frequency,
    geom: &ThzPathGeometry,
    g_t: f64,
    g_r: f64,
    gamma: f64,
    spectrum: &AbsorptionSpectrum,
) -> Result<PowerRatio> {
    geom.validate()?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "reflection coefficient must lie in [0, 1], got {gamma}"
        )));
    }
    let r = geom.r1_m + geom.r2_m;
    let l = fspl(f, r)?.linear();
    let tau = transmittance(r, f, spectrum)?.linear();
    PowerRatio::from_linear(p_t.linear() * g_t * g_r * l * gamma * gamma * tau * geom.gamma_s)
}

/// Doppler spread `f v / c` in Hz.
pub fn doppler_spread(f: Frequency, speed_m_s: f64) -> Result<f64> {
    if !speed_m_s.is_finite() || speed_m_s < 0.0 {
        return Err(Error::Domain(format!(
            "speed must be nonnegative, got {speed_m_s} m/s"
        )));
    }
    Ok(speed_m_s / SPEED_OF_LIGHT * f.hz())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Mmwave,
    Thz,
}

/// A single point-to-point link for budget reports.
#[derive(Debug, Clone)]
pub struct LinkScenario {
    pub band: BandKind,
    pub frequency: Frequency,
    pub distance_m: f64,
    pub state: LinkState,
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Path-loss laws; mmWave budgets use the state's law, THz budgets use
    /// free space.
    pub pathloss: StatePathLoss,
    pub fading: FadingSpec,
    /// Required for THz budgets (absorption term).
    pub spectrum: Option<AbsorptionSpectrum>,
}

/// Per-factor breakdown of one link budget, in dB where meaningful.
#[derive(Debug, Clone, Serialize)]
pub struct LinkBudget {
    pub band: BandKind,
    pub freq_ghz: f64,
    pub distance_m: f64,
    pub state: LinkState,
    pub tx_power_dbm: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    /// Spreading (path) loss, positive dB.
    pub spreading_loss_db: f64,
    /// Molecular absorption loss, positive dB (zero for mmWave).
    pub absorption_loss_db: f64,
    /// Mean received power (unit-mean fading).
    pub rx_power_dbm: f64,
    /// Fade depth at the 5th/50th/95th percentile of the Nakagami power
    /// distribution, in dB relative to the mean.
    pub fade_percentiles_db: [(f64, f64); 3],
    /// Advisory notes (e.g. an mmWave carrier sitting on an absorption peak).
    pub warnings: Vec<String>,
}

/// Absorption-peak advisory threshold for mmWave carriers, in dB/km.
const MMWAVE_PEAK_WARN_DB_PER_KM: f64 = 1.0;

/// Assemble a per-factor link budget for one link.
pub fn link_budget(scenario: &LinkScenario) -> Result<LinkBudget> {
    scenario.pathloss.validate()?;
    scenario.fading.validate()?;
    if !(scenario.tx_power_w > 0.0) {
        return Err(Error::Config(format!(
            "transmit power must be positive, got {} W",
            scenario.tx_power_w
        )));
    }
    if !(scenario.tx_gain > 0.0) || !(scenario.rx_gain > 0.0) {
        return Err(Error::Config("antenna gains must be positive".into()));
    }
    let mut warnings = Vec::new();
    let (spreading, absorption) = match scenario.band {
        BandKind::Mmwave => {
            let l = scenario
                .pathloss
                .for_state(scenario.state)
                .eval(scenario.distance_m)?;
            if let Some(spectrum) = &scenario.spectrum {
                if let Ok(att) = spectrum.specific_attenuation_db_per_km(scenario.frequency) {
                    if att >= MMWAVE_PEAK_WARN_DB_PER_KM {
                        warnings.push(format!(
                            "carrier {:.2} GHz sits on an absorption feature ({att:.2} dB/km); \
                             the mmWave budget ignores molecular absorption",
                            scenario.frequency.ghz()
                        ));
                    }
                }
            }
            (l, 1.0)
        }
        BandKind::Thz => {
            let spectrum = scenario.spectrum.as_ref().ok_or_else(|| {
                Error::Config("THz link budget requires an absorption spectrum".into())
            })?;
            let l = fspl(scenario.frequency, scenario.distance_m)?.linear();
            let tau = transmittance(scenario.distance_m, scenario.frequency, spectrum)?.linear();
            (l, tau)
        }
    };
    let mean_rx_w =
        scenario.tx_power_w * spreading * absorption * scenario.tx_gain * scenario.rx_gain;
    let mu = scenario.fading.mu(scenario.state);
    let fade_percentiles_db = [
        (5.0, 10.0 * fade_percentile(mu, 0.05)?.log10()),
        (50.0, 10.0 * fade_percentile(mu, 0.50)?.log10()),
        (95.0, 10.0 * fade_percentile(mu, 0.95)?.log10()),
    ];
    Ok(LinkBudget {
        band: scenario.band,
        freq_ghz: scenario.frequency.ghz(),
        distance_m: scenario.distance_m,
        state: scenario.state,
        tx_power_dbm: crate::quantity::watt_to_dbm(scenario.tx_power_w),
        tx_gain_db: 10.0 * scenario.tx_gain.log10(),
        rx_gain_db: 10.0 * scenario.rx_gain.log10(),
        spreading_loss_db: -10.0 * spreading.log10(),
        absorption_loss_db: -10.0 * absorption.log10(),
        rx_power_dbm: crate::quantity::watt_to_dbm(mean_rx_w),
        fade_percentiles_db,
        warnings,
    })
}
