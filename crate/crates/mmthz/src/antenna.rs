//! Analog beam-pattern models and the multi-lobe piecewise-constant fit.
//!
//! Array-factor models (`UlaExact`, `SincApprox`) take the dimensionless
//! cosine direction `phi = (d / lambda) cos theta_AoD` as their argument;
//! the sectorized models take a planar angle in radians, folded into
//! `(-pi, pi]`. All array factors are unit-peak: absolute element gain is a
//! separate multiplicative scalar applied in the link equations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantity::normalize_angle;

/// Default element spacing in wavelengths; half-wavelength spacing avoids
/// grating lobes.
pub const DEFAULT_SPACING_OVER_LAMBDA: f64 = 0.5;

/// One constant-gain lobe of a piecewise-constant pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub width_rad: f64,
    pub gain: f64,
}

/// Tagged union over the supported gain-pattern models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum AntennaPattern {
    /// Exact uniform-linear-array factor
    /// `sin^2(pi N phi) / (N^2 sin^2(pi phi))`.
    UlaExact {
        elements: u32,
        spacing_over_lambda: f64,
    },
    /// Squared-sinc approximation `sin^2(pi N phi) / (pi N phi)^2`,
    /// a tight lower bound on the exact array factor.
    SincApprox { elements: u32 },
    /// Sectorized (flat-top) pattern: main-lobe gain inside
    /// `[-theta_3db, theta_3db]`, side-lobe gain everywhere else.
    FlatTop {
        main_gain: f64,
        side_gain: f64,
        theta_3db_rad: f64,
    },
    /// Piecewise-constant pattern with `K` lobes from boresight outward;
    /// the last gain extends to pi.
    MultiLobe { lobes: Vec<Lobe> },
    /// `(g_m - g_s) e^{-eta theta^2} + g_s`.
    Gaussian {
        main_gain: f64,
        side_gain: f64,
        eta: f64,
    },
    /// `cos^2(pi N theta / 2)` for `|theta| <= 1/N`, zero outside.
    Cosine { elements: u32 },
}

impl AntennaPattern {
    pub fn ula(elements: u32) -> Self {
        AntennaPattern::UlaExact {
            elements,
            spacing_over_lambda: DEFAULT_SPACING_OVER_LAMBDA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AntennaPattern::UlaExact {
                elements,
                spacing_over_lambda,
            } => {
                if *elements < 1 {
                    return Err(Error::Config("element count must be >= 1".into()));
                }
                if !(*spacing_over_lambda > 0.0) {
                    return Err(Error::Config("spacing_over_lambda must be positive".into()));
                }
                Ok(())
            }
            AntennaPattern::SincApprox { elements } | AntennaPattern::Cosine { elements } => {
                if *elements < 1 {
                    return Err(Error::Config("element count must be >= 1".into()));
                }
                Ok(())
            }
            AntennaPattern::FlatTop {
                main_gain,
                side_gain,
                theta_3db_rad,
            } => {
                validate_gain_pair(*main_gain, *side_gain)?;
                if !(*theta_3db_rad > 0.0) {
                    return Err(Error::Config("theta_3db_rad must be positive".into()));
                }
                Ok(())
            }
            AntennaPattern::Gaussian {
                main_gain,
                side_gain,
                eta,
            } => {
                validate_gain_pair(*main_gain, *side_gain)?;
                if !(*eta > 0.0) {
                    return Err(Error::Config("eta must be positive".into()));
                }
                Ok(())
            }
            AntennaPattern::MultiLobe { lobes } => {
                if lobes.is_empty() {
                    return Err(Error::Config("multi-lobe pattern needs K >= 1 lobes".into()));
                }
                for lobe in lobes {
                    if !(lobe.width_rad > 0.0) || lobe.gain < 0.0 {
                        return Err(Error::Config(format!(
                            "invalid lobe (width {}, gain {})",
                            lobe.width_rad, lobe.gain
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Cosine direction for an array factor: `(d / lambda) cos theta_AoD`.
    pub fn cosine_direction(&self, theta_aod_rad: f64) -> f64 {
        let spacing = match self {
            AntennaPattern::UlaExact {
                spacing_over_lambda, ..
            } => *spacing_over_lambda,
            _ => DEFAULT_SPACING_OVER_LAMBDA,
        };
        spacing * theta_aod_rad.cos()
    }

    /// Pattern gain at `direction`: the cosine direction `phi` for
    /// `UlaExact`/`SincApprox`, a planar angle in radians otherwise.
    /// Removable singularities take their limit values.
    pub fn gain(&self, direction: f64) -> f64 {
        match self {
            AntennaPattern::UlaExact { elements, .. } => {
                let n = *elements as f64;
                // Fold to the nearest grating lobe: both sines only depend
                // on the offset, and the limit at every integer phi is 1.
                let delta = direction - direction.round();
                if delta == 0.0 {
                    return 1.0;
                }
                let num = (PI * n * delta).sin();
                let den = n * (PI * delta).sin();
                (num / den).powi(2)
            }
            AntennaPattern::SincApprox { elements } => {
                let t = PI * *elements as f64 * direction;
                if t == 0.0 {
                    return 1.0;
                }
                (t.sin() / t).powi(2)
            }
            AntennaPattern::FlatTop {
                main_gain,
                side_gain,
                theta_3db_rad,
            } => {
                if normalize_angle(direction).abs() <= *theta_3db_rad {
                    *main_gain
                } else {
                    *side_gain
                }
            }
            AntennaPattern::MultiLobe { lobes } => {
                let a = normalize_angle(direction).abs();
                let mut edge = 0.0;
                for lobe in lobes {
                    edge += lobe.width_rad;
                    if a <= edge {
                        return lobe.gain;
                    }
                }
                lobes[lobes.len() - 1].gain
            }
            AntennaPattern::Gaussian {
                main_gain,
                side_gain,
                eta,
            } => {
                let a = normalize_angle(direction);
                (main_gain - side_gain) * (-eta * a * a).exp() + side_gain
            }
            AntennaPattern::Cosine { elements } => {
                let n = *elements as f64;
                let a = normalize_angle(direction).abs();
                if a <= 1.0 / n {
                    (PI * n * a / 2.0).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }
}

fn validate_gain_pair(main_gain: f64, side_gain: f64) -> Result<()> {
    if !(main_gain >= side_gain && side_gain >= 0.0) {
        return Err(Error::Config(format!(
            "gains must satisfy main >= side >= 0, got main {main_gain}, side {side_gain}"
        )));
    }
    Ok(())
}

/// Result of [`fit_multi_lobe`]: the fitted pattern and its mean squared
/// error against the samples.
#[derive(Debug, Clone)]
pub struct MultiLobeFit {
    pub pattern: AntennaPattern,
    pub mse: f64,
}

/// Fit a `k`-lobe piecewise-constant pattern to `(angle, gain)` samples by
/// minimizing mean squared error.
///
/// The optimum is found exactly by dynamic programming over contiguous
/// groupings of the distinct sample angles (the objective only changes when
/// a breakpoint crosses a sample). Ties between equal-cost splits resolve
/// toward the narrower inner lobes, so the fit is deterministic.
pub fn fit_multi_lobe(samples: &[(f64, f64)], k: usize) -> Result<MultiLobeFit> {
    if k < 1 {
        return Err(Error::Config("lobe count must be >= 1".into()));
    }
    if samples.len() < 2 * k {
        return Err(Error::Config(format!(
            "need at least 2K = {} samples, got {}",
            2 * k,
            samples.len()
        )));
    }
    for &(angle, gain) in samples {
        if !angle.is_finite() || !gain.is_finite() || gain < 0.0 {
            return Err(Error::Config(format!(
                "invalid sample ({angle}, {gain}): gains must be finite and nonnegative"
            )));
        }
    }

    // Group samples by distinct |angle| (patterns are symmetric).
    let mut folded: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(a, g)| (normalize_angle(a).abs(), g))
        .collect();
    folded.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    // (angle, count, sum, sumsq) per distinct |angle|.
    type Unit = (f64, f64, f64, f64);
    let mut units: Vec<Unit> = Vec::new();
    for (a, g) in folded {
        match units.last_mut() {
            Some(u) if u.0 == a => {
                u.1 += 1.0;
                u.2 += g;
                u.3 += g * g;
            }
            _ => units.push((a, 1.0, g, g * g)),
        }
    }
    let n = units.len();
    if k > n {
        return Err(Error::Config(format!(
            "K = {k} lobes exceed the {n} distinct sample angles; not representable"
        )));
    }

    // Prefix sums for O(1) within-group squared error.
    let mut pc = vec![0.0; n + 1];
    let mut ps = vec![0.0; n + 1];
    let mut pq = vec![0.0; n + 1];
    for (i, u) in units.iter().enumerate() {
        pc[i + 1] = pc[i] + u.1;
        ps[i + 1] = ps[i] + u.2;
        pq[i + 1] = pq[i] + u.3;
    }
    let cost = |i: usize, j: usize| -> f64 {
        // SSE of units i..=j around their mean.
        let c = pc[j + 1] - pc[i];
        let s = ps[j + 1] - ps[i];
        let q = pq[j + 1] - pq[i];
        (q - s * s / c).max(0.0)
    };

    let inf = f64::INFINITY;
    let mut dp = vec![vec![inf; n]; k + 1];
    let mut from = vec![vec![usize::MAX; n]; k + 1];
    for (j, slot) in dp[1].iter_mut().enumerate() {
        *slot = cost(0, j);
    }
    for m in 2..=k {
        for j in (m - 1)..n {
            for split in (m - 2)..j {
                let candidate = dp[m - 1][split] + cost(split + 1, j);
                if candidate < dp[m][j] {
                    dp[m][j] = candidate;
                    from[m][j] = split;
                }
            }
        }
    }

    // Reconstruct group end indices.
    let mut ends = vec![0usize; k];
    let mut j = n - 1;
    for m in (1..=k).rev() {
        ends[m - 1] = j;
        if m > 1 {
            j = from[m][j];
        }
    }

    let mut lobes = Vec::with_capacity(k);
    let mut start = 0usize;
    let mut prev_edge = 0.0;
    for (m, &end) in ends.iter().enumerate() {
        let mut edge = units[end].0;
        if edge <= prev_edge {
            // Degenerate first group at boresight only: place the edge
            // halfway to the next distinct angle.
            edge = if end + 1 < n {
                (units[end].0 + units[end + 1].0) / 2.0
            } else {
                prev_edge + 1e-9
            };
        }
        let c = pc[end + 1] - pc[start];
        let s = ps[end + 1] - ps[start];
        lobes.push(Lobe {
            width_rad: edge - prev_edge,
            gain: s / c,
        });
        prev_edge = edge;
        start = end + 1;
        let _ = m;
    }

    let pattern = AntennaPattern::MultiLobe { lobes };
    pattern.validate()?;
    Ok(MultiLobeFit {
        pattern,
        mse: dp[k][n - 1] / samples.len() as f64,
    })
}

/// Half-power beamwidth: the smallest positive direction where the gain
/// falls to half its boresight value, located by scan plus bisection to
/// 1e-9. In cosine-direction units for the array-factor models, radians
/// otherwise.
pub fn hpbw(pattern: &AntennaPattern) -> Result<f64> {
    pattern.validate()?;
    let half = pattern.gain(0.0) / 2.0;
    if !(half > 0.0) {
        return Err(Error::Numerical(
            "pattern peak is zero; HPBW undefined".into(),
        ));
    }
    let (step, end) = scan_plan(pattern);
    let mut lo = 0.0f64;
    let mut hi = None;
    let mut x = step;
    while x <= end {
        if pattern.gain(x) < half {
            hi = Some(x);
            break;
        }
        lo = x;
        x += step;
    }
    let Some(mut hi) = hi else {
        return Err(Error::Numerical(
            "pattern never drops below half its peak gain; HPBW undefined".into(),
        ));
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if pattern.gain(mid) < half {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan resolution and horizon for the first half-power crossing.
fn scan_plan(pattern: &AntennaPattern) -> (f64, f64) {
    match pattern {
        AntennaPattern::UlaExact { elements, .. } => {
            let n = *elements as f64;
            (1.0 / (64.0 * n), 0.5)
        }
        AntennaPattern::SincApprox { elements } => {
            let n = *elements as f64;
            (1.0 / (64.0 * n), 1.0)
        }
        AntennaPattern::Cosine { elements } => {
            let n = *elements as f64;
            (1.0 / (64.0 * n), 1.0 / n + 1.0 / (64.0 * n))
        }
        AntennaPattern::FlatTop { theta_3db_rad, .. } => (theta_3db_rad / 16.0, PI),
        AntennaPattern::Gaussian { eta, .. } => (((1.0 / eta).sqrt() / 16.0).min(PI / 64.0), PI),
        AntennaPattern::MultiLobe { lobes } => (lobes[0].width_rad / 16.0, PI),
    }
}
