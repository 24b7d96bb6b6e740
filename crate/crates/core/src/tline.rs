//! Coplanar-waveguide (CPW) channel on a silicon interposer.
//!
//! Quasi-static impedance from the conformal-mapping closed form, a
//! conductor + dielectric attenuation model, and the magnitude-only voltage
//! transfer function used by the electrical energy model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{C0, DB_PER_NEPER, MU0};

/// CPW cross-section. Lateral dimensions and thickness in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpwGeometry {
    pub line_width_um: f64,
    pub gap_to_ground_um: f64,
    pub metal_thickness_um: f64,
    pub metal_conductivity_s_per_m: f64,
    pub dielectric_eps_r: f64,
    pub dielectric_loss_tangent: f64,
}

impl Default for CpwGeometry {
    fn default() -> Self {
        Self {
            line_width_um: 2.0,
            gap_to_ground_um: 2.0,
            metal_thickness_um: 2.0,
            metal_conductivity_s_per_m: 5.8e7,
            dielectric_eps_r: 3.9,
            dielectric_loss_tangent: 0.004,
        }
    }
}

impl CpwGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("line_width_um", self.line_width_um),
            ("gap_to_ground_um", self.gap_to_ground_um),
            ("metal_thickness_um", self.metal_thickness_um),
            ("metal_conductivity_s_per_m", self.metal_conductivity_s_per_m),
        ];
        for (name, v) in positive {
            // NaN fails this comparison too.
            if !(v > 0.0) {
                return Err(Error::InvalidGeometry(format!("{name} must be > 0 (got {v})")));
            }
        }
        if !(self.dielectric_eps_r >= 1.0) || !self.dielectric_eps_r.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "dielectric_eps_r must be >= 1 (got {})",
                self.dielectric_eps_r
            )));
        }
        if !(0.0..1.0).contains(&self.dielectric_loss_tangent) {
            return Err(Error::InvalidGeometry(format!(
                "dielectric_loss_tangent must be in [0, 1) (got {})",
                self.dielectric_loss_tangent
            )));
        }
        Ok(())
    }

    /// Aspect ratio k = w / (w + 2s).
    pub fn aspect_ratio(&self) -> f64 {
        self.line_width_um / (self.line_width_um + 2.0 * self.gap_to_ground_um)
    }

    /// Infinite-substrate effective permittivity, (1 + eps_r) / 2.
    pub fn effective_permittivity(&self) -> f64 {
        0.5 * (1.0 + self.dielectric_eps_r)
    }

    /// Copy with every lateral dimension multiplied by `c`.
    pub fn scaled_laterally(&self, c: f64) -> Self {
        Self {
            line_width_um: self.line_width_um * c,
            gap_to_ground_um: self.gap_to_ground_um * c,
            ..*self
        }
    }
}

/// Ratio K(k) / K(k') of complete elliptic integrals of the first kind,
/// k' = sqrt(1 - k^2), using Hilberg's closed-form approximation.
///
/// Valid for 0 < k < 1; relative error below 1e-5 across the range.
pub fn elliptic_ratio(k: f64) -> f64 {
    let kp = (1.0 - k * k).sqrt();
    if k <= std::f64::consts::FRAC_1_SQRT_2 {
        let s = kp.sqrt();
        std::f64::consts::PI / (2.0 * (1.0 + s) / (1.0 - s)).ln()
    } else {
        let s = k.sqrt();
        (2.0 * (1.0 + s) / (1.0 - s)).ln() / std::f64::consts::PI
    }
}

/// Quasi-static characteristic impedance in ohms.
pub fn cpw_char_impedance(geom: &CpwGeometry) -> Result<f64> {
    geom.validate()?;
    let k = geom.aspect_ratio();
    let z0 = 30.0 * std::f64::consts::PI / geom.effective_permittivity().sqrt() / elliptic_ratio(k);
    Ok(z0)
}

/// Per-unit-length capacitance (F/m) from Z0 and the phase velocity.
pub fn line_capacitance_per_m(geom: &CpwGeometry) -> Result<f64> {
    let z0 = cpw_char_impedance(geom)?;
    Ok(geom.effective_permittivity().sqrt() / (C0 * z0))
}

/// Surface resistance sqrt(pi f mu0 / sigma), ohms per square.
fn surface_resistance(geom: &CpwGeometry, freq_hz: f64) -> f64 {
    (std::f64::consts::PI * freq_hz * MU0 / geom.metal_conductivity_s_per_m).sqrt()
}

/// Series resistance per metre of the signal strip plus ground return.
///
/// The strip combines its DC resistance with the skin resistance over its
/// perimeter in quadrature. Each ground plane returns current in an edge
/// band one gap wide (top and bottom surfaces); the two planes are in
/// parallel and have no DC contribution.
pub fn series_resistance_per_m(geom: &CpwGeometry, freq_hz: f64) -> f64 {
    let w = geom.line_width_um * 1e-6;
    let t = geom.metal_thickness_um * 1e-6;
    let s = geom.gap_to_ground_um * 1e-6;
    let r_dc = 1.0 / (geom.metal_conductivity_s_per_m * w * t);
    let rs = surface_resistance(geom, freq_hz);
    let r_strip = r_dc.hypot(rs / (2.0 * (w + t)));
    let r_ground = rs / (4.0 * s);
    r_strip + r_ground
}

/// Attenuation split into its two mechanisms, dB/cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attenuation {
    pub conductor_db_per_cm: f64,
    pub dielectric_db_per_cm: f64,
}

impl Attenuation {
    pub fn total_db_per_cm(&self) -> f64 {
        self.conductor_db_per_cm + self.dielectric_db_per_cm
    }
}

pub fn attenuation_components(geom: &CpwGeometry, freq_hz: f64) -> Result<Attenuation> {
    geom.validate()?;
    if !(freq_hz >= 0.0) {
        return Err(Error::param("freq_hz", format!("must be >= 0 (got {freq_hz})")));
    }
    let z0 = cpw_char_impedance(geom)?;
    let alpha_c = series_resistance_per_m(geom, freq_hz) / (2.0 * z0);
    // Half the field lives in the dielectric for the infinite-substrate
    // model, so the filling factor collapses to 1/2.
    let k0 = 2.0 * std::f64::consts::PI * freq_hz / C0;
    let alpha_d = k0 * geom.dielectric_eps_r * geom.dielectric_loss_tangent
        / (4.0 * geom.effective_permittivity().sqrt());
    // Np/m -> dB/cm
    Ok(Attenuation {
        conductor_db_per_cm: alpha_c * DB_PER_NEPER / 100.0,
        dielectric_db_per_cm: alpha_d * DB_PER_NEPER / 100.0,
    })
}

/// Total attenuation in dB/cm at `freq_hz`.
pub fn cpw_attenuation(geom: &CpwGeometry, freq_hz: f64) -> Result<f64> {
    Ok(attenuation_components(geom, freq_hz)?.total_db_per_cm())
}

/// |H| for a line with attenuation `alpha_db_per_cm` and length in mm.
pub fn vtf_from_attenuation(alpha_db_per_cm: f64, length_mm: f64) -> f64 {
    10f64.powf(-alpha_db_per_cm * (length_mm / 10.0) / 20.0)
}

/// Voltage transfer magnitude |H(f)| of a matched line of `length_mm`.
pub fn vtf(geom: &CpwGeometry, length_mm: f64, freq_hz: f64) -> Result<f64> {
    if !(length_mm >= 0.0) {
        return Err(Error::param("length_mm", format!("must be >= 0 (got {length_mm})")));
    }
    Ok(vtf_from_attenuation(cpw_attenuation(geom, freq_hz)?, length_mm))
}

/// `n` logarithmically spaced points from `start_hz` to `stop_hz` inclusive.
pub fn log_frequency_grid(start_hz: f64, stop_hz: f64, n: usize) -> Result<Vec<f64>> {
    if !(start_hz > 0.0 && stop_hz > start_hz) || n < 2 {
        return Err(Error::param(
            "frequency_grid",
            format!("need 0 < start < stop and n >= 2 (got {start_hz}, {stop_hz}, {n})"),
        ));
    }
    let (a, b) = (start_hz.ln(), stop_hz.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    grid[0] = start_hz;
    grid[n - 1] = stop_hz;
    Ok(grid)
}

/// Default channel grid: 64 log points from 10 MHz to twice Nyquist.
pub fn default_frequency_grid(bit_rate_gbps: f64) -> Result<Vec<f64>> {
    log_frequency_grid(10e6, bit_rate_gbps * 1e9, 64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResponse {
    pub frequency_hz: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub alpha_db_per_cm: Vec<f64>,
}

pub fn channel_response(geom: &CpwGeometry, length_mm: f64, grid: &[f64]) -> Result<ChannelResponse> {
    let mut magnitude = Vec::with_capacity(grid.len());
    let mut alpha_db_per_cm = Vec::with_capacity(grid.len());
    for &f in grid {
        let a = cpw_attenuation(geom, f)?;
        alpha_db_per_cm.push(a);
        magnitude.push(vtf(geom, length_mm, f)?);
    }
    Ok(ChannelResponse {
        frequency_hz: grid.to_vec(),
        magnitude,
        alpha_db_per_cm,
    })
}
