//! Monte-Carlo stochastic-geometry system simulator.
//!
//! Each trial drops a Poisson field of base stations on a disc around a
//! user at the origin, assigns every link a LOS/NLOS state from the
//! configured blockage model, associates the user with the strongest base
//! station on average received power (no fading), draws beam gains and
//! fading, and records the resulting SINR. Coverage is the empirical
//! survival function `P[SINR > T]`.
//!
//! Trials run in fixed chunks with per-chunk random streams, so a result is
//! bit-identical for a given `(scenario, trials, seed)` at any parallelism
//! level.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::antenna::AntennaPattern;
use crate::atmosphere::{transmittance, AbsorptionSpectrum};
use crate::blockage::{p_los, LosModel};
use crate::channel::{BandKind, FadingSpec, LinkState, NakagamiFading, StatePathLoss};
use crate::error::{Error, Result};
use crate::mc;
use crate::quantity::{normalize_angle, Frequency};

/// Interferer beam-pointing policy. The user's receive beam always points
/// at the serving base station and sees interferers at their geometric
/// angular offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alignment {
    /// Worst case: every interferer's transmit beam also points at the
    /// user.
    PerfectToServing,
    /// Each interferer's transmit beam points in a uniformly random
    /// direction.
    RandomInterfererAngles,
}

/// Full description of one downlink deployment.
#[derive(Debug, Clone)]
pub struct NetworkScenario {
    pub bs_density_per_m2: f64,
    pub window_radius_m: f64,
    pub band: BandKind,
    /// Carrier frequency; used for the THz absorption term.
    pub carrier: Frequency,
    pub los_model: LosModel,
    pub pathloss: StatePathLoss,
    /// `None` disables small-scale fading (H = 1).
    pub fading: Option<FadingSpec>,
    pub tx_pattern: AntennaPattern,
    pub rx_pattern: AntennaPattern,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub bandwidth_hz: f64,
    pub alignment: Alignment,
    /// Applied multiplicatively on THz links; ignored for mmWave, whose
    /// bands of interest avoid the absorption peaks.
    pub absorption: Option<AbsorptionSpectrum>,
    /// Self-blockage cone angle; base stations inside a uniformly oriented
    /// cone of this angle are removed before association.
    pub self_block_cone_rad: Option<f64>,
    /// Interference on/off; `None` takes the band default (mmWave on,
    /// THz off: published THz system analyses are noise-limited).
    pub interference: Option<bool>,
    /// Pin the deployment to fixed positions instead of a Poisson draw.
    pub fixed_bs: Option<Vec<[f64; 2]>>,
}

impl NetworkScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.bs_density_per_m2 > 0.0) {
            return Err(Error::Config("bs_density_per_m2 must be positive".into()));
        }
        if !(self.window_radius_m > 0.0) {
            return Err(Error::Config("window_radius_m must be positive".into()));
        }
        if !(self.tx_power_w > 0.0) {
            return Err(Error::Config("tx_power_w must be positive".into()));
        }
        if !(self.noise_power_w >= 0.0) {
            return Err(Error::Config("noise_power_w must be nonnegative".into()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth_hz must be positive".into()));
        }
        if let Some(delta) = self.self_block_cone_rad {
            if !(0.0..2.0 * PI).contains(&delta) {
                return Err(Error::Config(
                    "self_block_cone_rad must lie in [0, 2 pi)".into(),
                ));
            }
        }
        self.los_model.validate()?;
        self.pathloss.validate()?;
        if let Some(fading) = &self.fading {
            fading.validate()?;
        }
        self.tx_pattern.validate()?;
        self.rx_pattern.validate()?;
        Ok(())
    }

    fn interference_enabled(&self) -> bool {
        self.interference.unwrap_or(match self.band {
            BandKind::Mmwave => true,
            BandKind::Thz => false,
        })
    }

    /// Deterministic environment attenuation at distance `r`: the
    /// absorption transmittance on THz links, unity otherwise.
    fn env_attenuation(&self, r_m: f64) -> Result<f64> {
        match (self.band, &self.absorption) {
            (BandKind::Thz, Some(spectrum)) => {
                Ok(transmittance(r_m, self.carrier, spectrum)?.linear())
            }
            _ => Ok(1.0),
        }
    }
}

/// Default SINR threshold grid (dB) for the shipped coverage output.
pub fn default_thresholds_db() -> Vec<f64> {
    (-10..=30).step_by(5).map(|t| t as f64).collect()
}

/// Outcome of a simulation run. SINR samples are linear; an empty
/// realization (no reachable base station) is recorded as SINR 0.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub sinr_samples: Vec<f64>,
    pub coverage: Vec<(f64, f64)>,
    pub mean_rate_bps: f64,
    pub trials: u64,
    pub seed: u64,
    pub outages: u64,
}

/// Empirical coverage `P[SINR > T]` for each threshold in dB.
/// Non-increasing in the threshold by construction.
pub fn coverage_curve(sinr_samples: &[f64], thresholds_db: &[f64]) -> Vec<(f64, f64)> {
    let n = sinr_samples.len().max(1) as f64;
    thresholds_db
        .iter()
        .map(|&t_db| {
            let t = 10f64.powf(t_db / 10.0);
            let hits = sinr_samples.iter().filter(|&&s| s > t).count();
            (t_db, hits as f64 / n)
        })
        .collect()
}

/// Run `trials` independent network realizations.
pub fn simulate(scenario: &NetworkScenario, trials: u64, seed: u64) -> Result<SimResult> {
    scenario.validate()?;
    if trials < 1 {
        return Err(Error::Config("simulation needs at least one trial".into()));
    }
    // Pre-flight the attenuation so table errors surface before the run.
    scenario.env_attenuation(scenario.window_radius_m)?;

    let area = PI * scenario.window_radius_m * scenario.window_radius_m;
    let mean_count = scenario.bs_density_per_m2 * area;
    let poisson = Poisson::new(mean_count)
        .map_err(|e| Error::Config(format!("invalid base-station intensity: {e}")))?;

    let chunks: Vec<Vec<f64>> = mc::run_chunked(trials, seed, |rng, n| {
        (0..n)
            .map(|_| one_trial(scenario, &poisson, rng).expect("scenario pre-validated"))
            .collect()
    });
    let sinr_samples: Vec<f64> = chunks.into_iter().flatten().collect();
    let outages = sinr_samples.iter().filter(|&&s| s == 0.0).count() as u64;
    let mean_rate_bps = scenario.bandwidth_hz
        * sinr_samples
            .iter()
            .map(|&s| (1.0 + s).log2())
            .sum::<f64>()
        / trials as f64;
    let coverage = coverage_curve(&sinr_samples, &default_thresholds_db());
    Ok(SimResult {
        sinr_samples,
        coverage,
        mean_rate_bps,
        trials,
        seed,
        outages,
    })
}

/// Bernoulli LOS draw consistent with the closed-form probability.
pub fn draw_link_state<R: Rng + ?Sized>(
    model: &LosModel,
    distance_m: f64,
    rng: &mut R,
) -> Result<LinkState> {
    let p = p_los(model, distance_m)?.value();
    Ok(if rng.random::<f64>() < p {
        LinkState::Los
    } else {
        LinkState::Nlos
    })
}

struct BsDraw {
    angle: f64,
    state: LinkState,
    avg_power: f64,
}

fn one_trial<R: Rng + ?Sized>(
    scenario: &NetworkScenario,
    poisson: &Poisson<f64>,
    rng: &mut R,
) -> Result<f64> {
    // Deployment.
    let positions: Vec<(f64, f64)> = match &scenario.fixed_bs {
        Some(list) => list
            .iter()
            .map(|p| (p[1].atan2(p[0]), p[0].hypot(p[1])))
            .collect(),
        None => {
            let n = poisson.sample(rng) as usize;
            (0..n)
                .map(|_| {
                    let angle = rng.random_range(0.0..2.0 * PI);
                    let distance = scenario.window_radius_m * rng.random::<f64>().sqrt();
                    (angle, distance)
                })
                .collect()
        }
    };

    // Self-blockage: remove everything inside a uniformly oriented cone.
    let cone = scenario
        .self_block_cone_rad
        .map(|delta| (rng.random_range(0.0..2.0 * PI), delta));

    let mut stations = Vec::with_capacity(positions.len());
    for (angle, distance) in positions {
        if let Some((cone_center, delta)) = cone {
            if normalize_angle(angle - cone_center).abs() <= delta / 2.0 {
                continue;
            }
        }
        if distance == 0.0 {
            // Degenerate co-located station; power law is undefined at 0.
            continue;
        }
        let state = draw_link_state(&scenario.los_model, distance, rng)?;
        let avg_power = scenario.tx_power_w
            * scenario.pathloss.for_state(state).eval(distance)?
            * scenario.env_attenuation(distance)?;
        stations.push(BsDraw {
            angle,
            state,
            avg_power,
        });
    }

    // Association on average power.
    let Some(serving_idx) = stations
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.avg_power.partial_cmp(&b.1.avg_power).unwrap())
        .map(|(i, _)| i)
    else {
        return Ok(0.0); // outage: empty realization
    };

    let fading = match &scenario.fading {
        Some(spec) => Some((
            NakagamiFading::new(spec.mu_los)?,
            NakagamiFading::new(spec.mu_nlos)?,
        )),
        None => None,
    };
    let draw_fade = |state: LinkState, rng: &mut R| -> f64 {
        match &fading {
            Some((los, nlos)) => match state {
                LinkState::Los => los.sample(rng),
                LinkState::Nlos => nlos.sample(rng),
            },
            None => 1.0,
        }
    };

    let peak_tx = scenario.tx_pattern.gain(0.0);
    let peak_rx = scenario.rx_pattern.gain(0.0);
    let serving = &stations[serving_idx];
    let fade_s = draw_fade(serving.state, rng);
    let signal = serving.avg_power * peak_tx * peak_rx * fade_s;

    let mut interference = 0.0;
    if scenario.interference_enabled() {
        for (i, bs) in stations.iter().enumerate() {
            if i == serving_idx {
                continue;
            }
            let tx_offset = match scenario.alignment {
                Alignment::PerfectToServing => 0.0,
                Alignment::RandomInterfererAngles => rng.random_range(-PI..PI),
            };
            let rx_offset = normalize_angle(bs.angle - serving.angle);
            let fade = draw_fade(bs.state, rng);
            interference += bs.avg_power
                * scenario.tx_pattern.gain(tx_offset)
                * scenario.rx_pattern.gain(rx_offset)
                * fade;
        }
    }

    Ok(signal / (interference + scenario.noise_power_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mmwave_rx_power, PathLossLaw};
    use crate::quantity::PowerRatio;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_pattern() -> AntennaPattern {
        AntennaPattern::FlatTop {
            main_gain: 1.0,
            side_gain: 1.0,
            theta_3db_rad: 0.1,
        }
    }

    fn base_scenario() -> NetworkScenario {
        NetworkScenario {
            bs_density_per_m2: 1e-4,
            window_radius_m: 500.0,
            band: BandKind::Mmwave,
            carrier: Frequency::from_ghz(28.0).unwrap(),
            los_model: LosModel::UmaUmi { d1_m: 18.0, d2_m: 63.0 },
            pathloss: StatePathLoss {
                los: PathLossLaw { near_field_gain: 1e-4, exponent: 2.0 },
                nlos: PathLossLaw { near_field_gain: 1e-4, exponent: 4.0 },
            },
            fading: Some(FadingSpec { mu_los: 3.0, mu_nlos: 2.0 }),
            tx_pattern: AntennaPattern::FlatTop {
                main_gain: 10.0,
                side_gain: 0.1,
                theta_3db_rad: 0.2,
            },
            rx_pattern: AntennaPattern::FlatTop {
                main_gain: 10.0,
                side_gain: 0.1,
                theta_3db_rad: 0.2,
            },
            tx_power_w: 1.0,
            noise_power_w: 1e-10,
            bandwidth_hz: 1e8,
            alignment: Alignment::RandomInterfererAngles,
            absorption: None,
            self_block_cone_rad: None,
            interference: None,
            fixed_bs: None,
        }
    }

    #[test]
    fn single_pinned_bs_matches_direct_link_equation() {
        let r = 150.0;
        let scenario = NetworkScenario {
            fixed_bs: Some(vec![[r, 0.0]]),
            fading: None,
            los_model: LosModel::LosBall { radius_m: 1e12 },
            tx_pattern: unit_pattern(),
            rx_pattern: unit_pattern(),
            interference: Some(false),
            ..base_scenario()
        };
        let result = simulate(&scenario, 16, 3).unwrap();
        let direct = mmwave_rx_power(
            PowerRatio::from_linear(scenario.tx_power_w).unwrap(),
            &scenario.pathloss,
            LinkState::Los,
            r,
            1.0,
            1.0,
            1.0,
        )
        .unwrap()
        .linear()
            / scenario.noise_power_w;
        for s in &result.sinr_samples {
            assert_relative_eq!(*s, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_noise_single_bs_is_always_covered() {
        let scenario = NetworkScenario {
            fixed_bs: Some(vec![[100.0, 0.0]]),
            fading: None,
            los_model: LosModel::LosBall { radius_m: 1e12 },
            tx_pattern: unit_pattern(),
            rx_pattern: unit_pattern(),
            interference: Some(false),
            noise_power_w: 0.0,
            ..base_scenario()
        };
        let result = simulate(&scenario, 8, 1).unwrap();
        for &(_, p) in &result.coverage {
            assert_eq!(p, 1.0);
        }
        assert_eq!(result.outages, 0);
    }

    #[test]
    fn vanishing_density_gives_zero_coverage() {
        let scenario = NetworkScenario {
            bs_density_per_m2: 1e-12,
            ..base_scenario()
        };
        let result = simulate(&scenario, 200, 5).unwrap();
        assert_eq!(result.outages, result.trials);
        for &(_, p) in &result.coverage {
            assert_eq!(p, 0.0);
        }
        assert_eq!(result.mean_rate_bps, 0.0);
    }

    #[test]
    fn coverage_curve_is_a_survival_function() {
        let result = simulate(&base_scenario(), 400, 11).unwrap();
        let grid: Vec<f64> = (-30..=50).map(|t| t as f64).collect();
        let curve = coverage_curve(&result.sinr_samples, &grid);
        for w in curve.windows(2) {
            assert!(w[1].1 <= w[0].1, "coverage must be non-increasing");
        }
        for &(_, p) in &curve {
            assert!((0.0..=1.0).contains(&p));
        }
        // Extreme thresholds.
        let lo = coverage_curve(&result.sinr_samples, &[-300.0])[0].1;
        assert_relative_eq!(
            lo,
            1.0 - result.outages as f64 / result.trials as f64,
            epsilon = 1e-12
        );
        let hi = coverage_curve(&result.sinr_samples, &[3000.0])[0].1;
        assert_eq!(hi, 0.0);
    }

    #[test]
    fn deterministic_across_thread_counts_and_reruns() {
        let scenario = base_scenario();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate(&scenario, 500, 77).unwrap())
        };
        let a = run(1);
        let b = run(4);
        let c = run(4);
        assert_eq!(a.sinr_samples, b.sinr_samples);
        assert_eq!(b.sinr_samples, c.sinr_samples);
        assert_eq!(a.mean_rate_bps, b.mean_rate_bps);
    }

    #[test]
    fn los_draw_matches_closed_form_probability() {
        let model = LosModel::UmaUmi { d1_m: 18.0, d2_m: 63.0 };
        let d = 120.0;
        let p = p_los(&model, d).unwrap().value();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                matches!(
                    draw_link_state(&model, d, &mut rng).unwrap(),
                    LinkState::Los
                )
            })
            .count();
        let estimate = hits as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (estimate - p).abs() <= 3.0 * stderr,
            "LOS fraction {estimate} vs p_los {p} (3 sigma = {})",
            3.0 * stderr
        );
    }

    #[test]
    fn self_blockage_thins_coverage() {
        let open = NetworkScenario {
            interference: Some(false),
            ..base_scenario()
        };
        let blocked = NetworkScenario {
            self_block_cone_rad: Some(PI), // half the plane blocked
            ..open.clone()
        };
        let a = simulate(&open, 2000, 13).unwrap();
        let b = simulate(&blocked, 2000, 13).unwrap();
        // Removing half the stations can only increase outages on average.
        assert!(b.outages >= a.outages);
    }

    #[test]
    fn thz_band_defaults_to_noise_limited() {
        // Fixed deployment, no fading, worst-case alignment: both runs
        // consume identical random streams, so samples are comparable.
        let scenario = NetworkScenario {
            band: BandKind::Thz,
            carrier: Frequency::from_ghz(300.0).unwrap(),
            absorption: Some(AbsorptionSpectrum::builtin()),
            window_radius_m: 100.0,
            fixed_bs: Some(vec![[50.0, 0.0], [30.0, 40.0]]),
            fading: None,
            alignment: Alignment::PerfectToServing,
            ..base_scenario()
        };
        assert!(!scenario.interference_enabled());
        let with_interference = NetworkScenario {
            interference: Some(true),
            ..scenario.clone()
        };
        let a = simulate(&scenario, 100, 2).unwrap();
        let b = simulate(&with_interference, 100, 2).unwrap();
        for (x, y) in a.sinr_samples.iter().zip(&b.sinr_samples) {
            assert!(y < x, "interference must strictly lower SINR: {y} vs {x}");
        }
    }

    #[test]
    fn rejects_invalid_scenarios() {
        let mut s = base_scenario();
        s.bs_density_per_m2 = 0.0;
        assert!(simulate(&s, 10, 0).is_err());
        let mut s = base_scenario();
        s.self_block_cone_rad = Some(7.0);
        assert!(simulate(&s, 10, 0).is_err());
        assert!(simulate(&base_scenario(), 0, 0).is_err());
    }
}
