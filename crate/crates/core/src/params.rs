//! Scalar system configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise power of -92 dBm expressed in watts.
pub const DEFAULT_NOISE_POWER_W: f64 = 6.309_573_444_801_929e-13;

/// Large-scale shadowing statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShadowingModel {
    /// i.i.d. log-normal shadowing per AP-user link.
    Independent,
    /// Two-component model `F_mk = sqrt(delta) a_m + sqrt(1 - delta) b_k`
    /// where the AP terms `a_m` and the user terms `b_k` are each Gaussian
    /// fields with covariance `2^(-d / decorrelation_m)`.
    Correlated { delta: f64, decorrelation_m: f64 },
}

impl Default for ShadowingModel {
    fn default() -> Self {
        ShadowingModel::Independent
    }
}

impl ShadowingModel {
    pub fn correlated_default() -> Self {
        ShadowingModel::Correlated {
            delta: 0.5,
            decorrelation_m: 9.0,
        }
    }
}

/// All scalar constants of one network configuration.
///
/// Powers are in watts, lengths in meters. The configuration keys follow
/// the usual symbols (`M`, `N`, `K_d`, `L`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Number of APs.
    #[serde(rename = "M")]
    pub m: usize,
    /// Antennas per AP.
    #[serde(rename = "N")]
    pub n: usize,
    /// Number of information users.
    #[serde(rename = "K_d")]
    pub k_d: usize,
    /// Number of energy users.
    #[serde(rename = "L")]
    pub l: usize,
    /// Coherence block length in symbols.
    pub tau_c: usize,
    /// Pilot length in symbols.
    pub tau: usize,
    /// Maximum AP transmit power.
    pub p_ap: f64,
    /// Pilot transmit power.
    pub p_pilot: f64,
    pub noise_power: f64,
    pub area_side: f64,
    /// Energy-harvesting steepness.
    pub xi: f64,
    /// Energy-harvesting threshold.
    pub chi: f64,
    /// Energy-harvesting saturation power.
    pub phi: f64,
    /// Minimum per-IU spectral efficiency in bit/s/Hz.
    pub se_target: f64,
    /// Minimum harvested power per EU.
    pub he_targets: Vec<f64>,
    /// Relative objective change that stops the SCA loop.
    pub sca_tol: f64,
    pub shadow_sigma_db: f64,
    #[serde(default)]
    pub shadowing: ShadowingModel,
}

impl SystemParams {
    /// Constants of the reference numerical setup (0.5 km square, 1 W APs,
    /// 0.2 W pilots, -92 dBm noise, `tau = K_d + L`, 100 uW EH targets).
    pub fn reference(m: usize, n: usize, k_d: usize, l: usize) -> Self {
        SystemParams {
            m,
            n,
            k_d,
            l,
            tau_c: 200,
            tau: (k_d + l).max(1),
            p_ap: 1.0,
            p_pilot: 0.2,
            noise_power: DEFAULT_NOISE_POWER_W,
            area_side: 500.0,
            xi: 150.0,
            chi: 0.014,
            phi: 0.024,
            se_target: 1.0,
            he_targets: vec![100e-6; l],
            sca_tol: 1e-5,
            shadow_sigma_db: 4.0,
            shadowing: ShadowingModel::Independent,
        }
    }

    /// Same parameters with a different AP/antenna layout. Keeps `tau` and
    /// the EH targets consistent with the user counts.
    pub fn with_layout(&self, m: usize, n: usize) -> Self {
        SystemParams {
            m,
            n,
            ..self.clone()
        }
    }

    pub fn with_he_target(mut self, target: f64) -> Self {
        self.he_targets = vec![target; self.l];
        self
    }

    pub fn with_se_target(mut self, target: f64) -> Self {
        self.se_target = target;
        self
    }

    /// Normalized downlink SNR `rho`.
    pub fn rho(&self) -> f64 {
        self.p_ap / self.noise_power
    }

    /// Normalized pilot SNR `rho_t`.
    pub fn rho_t(&self) -> f64 {
        self.p_pilot / self.noise_power
    }

    /// Pre-log factor `1 - tau / tau_c`.
    pub fn prelog(&self) -> f64 {
        1.0 - self.tau as f64 / self.tau_c as f64
    }

    /// Downlink duration times noise power: the scale that turns normalized
    /// received energy into watt-symbols.
    pub fn energy_scale(&self) -> f64 {
        (self.tau_c - self.tau) as f64 * self.noise_power
    }

    pub fn n_users(&self) -> usize {
        self.k_d + self.l
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.m == 0 {
            return bad("M must be positive".into());
        }
        if self.n == 0 {
            return bad("N must be positive".into());
        }
        if self.tau < self.k_d + self.l {
            return bad(format!(
                "pilot length tau={} is shorter than K_d + L = {}",
                self.tau,
                self.k_d + self.l
            ));
        }
        if self.tau >= self.tau_c {
            return bad(format!("tau={} must be below tau_c={}", self.tau, self.tau_c));
        }
        if self.n <= self.k_d {
            return bad(format!("N={} must exceed K_d={}", self.n, self.k_d));
        }
        for (name, v) in [
            ("p_ap", self.p_ap),
            ("p_pilot", self.p_pilot),
            ("noise_power", self.noise_power),
            ("area_side", self.area_side),
            ("xi", self.xi),
            ("chi", self.chi),
            ("phi", self.phi),
            ("sca_tol", self.sca_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and positive, got {v}"));
            }
        }
        if !(self.rho().is_finite() && self.rho_t().is_finite()) {
            return bad("normalized SNRs overflow".into());
        }
        if !(self.se_target.is_finite() && self.se_target >= 0.0) {
            return bad("se_target must be finite and nonnegative".into());
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return bad("shadow_sigma_db must be finite and nonnegative".into());
        }
        if self.he_targets.len() != self.l {
            return bad(format!(
                "he_targets has {} entries, expected L={}",
                self.he_targets.len(),
                self.l
            ));
        }
        if let Some(t) = self
            .he_targets
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0 && **t < self.phi))
        {
            return bad(format!("HE target {t} W outside [0, phi)"));
        }
        if let ShadowingModel::Correlated {
            delta,
            decorrelation_m,
        } = self.shadowing
        {
            if !(0.0..=1.0).contains(&delta) || !(decorrelation_m > 0.0) {
                return bad("correlated shadowing needs delta in [0,1] and a positive decorrelation distance".into());
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let params: SystemParams = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("SystemParams serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid() {
        let p = SystemParams::reference(20, 10, 3, 5);
        p.validate().unwrap();
        assert_eq!(p.tau, 8);
        assert!((10.0 * (p.noise_power * 1e3).log10() + 92.0).abs() < 1e-9);
        assert!((p.rho() - 1.0 / p.noise_power).abs() / p.rho() < 1e-15);
    }

    #[test]
    fn rejects_short_pilots() {
        let mut p = SystemParams::reference(4, 10, 3, 5);
        p.tau = 7;
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn rejects_tau_equal_to_coherence() {
        let mut p = SystemParams::reference(4, 10, 3, 5);
        p.tau = p.tau_c;
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_too_few_antennas() {
        let p = SystemParams::reference(4, 3, 3, 5);
        assert!(p.validate().is_err());
    }

    #[test]
    fn toml_roundtrip_uses_symbol_keys() {
        let p = SystemParams::reference(6, 10, 3, 5);
        let text = p.to_toml_string();
        assert!(text.contains("K_d = 3"));
        let back = SystemParams::from_toml_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn correlated_shadowing_parses() {
        let mut p = SystemParams::reference(6, 10, 3, 5);
        p.shadowing = ShadowingModel::correlated_default();
        let back = SystemParams::from_toml_str(&p.to_toml_string()).unwrap();
        assert_eq!(back.shadowing, p.shadowing);
    }
}
