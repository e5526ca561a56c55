use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Couplings and detunings of the ring, in units of `g`.
///
/// `delta` is the site-qubit detuning from the resonator and `delta_c` the
/// junction-qubit detuning. Junction `i` joins site `i` to site `i + 1`
/// (mod `n_sites`). The optional lists override the global value per site or
/// per junction and must have exactly `n_sites` entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub n_sites: usize,
    pub g: f64,
    pub g_c: f64,
    pub delta: f64,
    pub delta_c: f64,
    pub per_site_delta: Option<Vec<f64>>,
    pub per_site_g: Option<Vec<f64>>,
    pub per_junction_gc: Option<Vec<f64>>,
    pub per_junction_delta_c: Option<Vec<f64>>,
}

impl ModelParams {
    /// Uniform ring with `g = g_c = 1`.
    pub fn uniform(n_sites: usize, delta: f64, delta_c: f64) -> Self {
        Self {
            n_sites,
            g: 1.0,
            g_c: 1.0,
            delta,
            delta_c,
            per_site_delta: None,
            per_site_g: None,
            per_junction_gc: None,
            per_junction_delta_c: None,
        }
    }

    pub fn with_detunings(&self, delta: f64, delta_c: f64) -> Self {
        Self {
            delta,
            delta_c,
            ..self.clone()
        }
    }

    pub fn with_sites(&self, n_sites: usize) -> Self {
        Self {
            n_sites,
            ..self.clone()
        }
    }

    /// Checks the invariants shared by both Hamiltonians.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(invalid("n_sites", "must be at least 1"));
        }
        check_finite("g", self.g)?;
        check_finite("g_c", self.g_c)?;
        check_finite("delta", self.delta)?;
        check_finite("delta_c", self.delta_c)?;
        if self.g <= 0.0 {
            return Err(invalid("g", "must be positive"));
        }
        for (name, list) in [
            ("per_site_delta", &self.per_site_delta),
            ("per_site_g", &self.per_site_g),
            ("per_junction_gc", &self.per_junction_gc),
            ("per_junction_delta_c", &self.per_junction_delta_c),
        ] {
            if let Some(values) = list {
                if values.len() != self.n_sites {
                    return Err(Error::OverrideLength {
                        name,
                        expected: self.n_sites,
                        found: values.len(),
                    });
                }
                for &v in values {
                    check_finite(name, v)?;
                }
            }
        }
        if let Some(gs) = &self.per_site_g {
            if gs.iter().any(|&g| g <= 0.0) {
                return Err(invalid("per_site_g", "entries must be positive"));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the dispersive bound
    /// `delta_c >= 10 g_c` on every junction.
    pub fn validate_effective(&self) -> Result<()> {
        self.validate()?;
        for j in 0..self.n_sites {
            let gc = crate::math::abs(self.junction_gc(j));
            let dc = self.junction_delta_c(j);
            if dc <= 0.0 {
                return Err(Error::NonPositiveDetuning(dc));
            }
            if dc < 10.0 * gc {
                return Err(Error::DispersiveBound {
                    junction: j,
                    delta_c: dc,
                    bound: 10.0 * gc,
                });
            }
        }
        Ok(())
    }

    pub fn has_site_delta_overrides(&self) -> bool {
        self.per_site_delta.is_some() || self.per_junction_delta_c.is_some()
    }

    pub fn site_delta(&self, site: usize) -> f64 {
        pick(&self.per_site_delta, site, self.delta)
    }

    pub fn site_g(&self, site: usize) -> f64 {
        pick(&self.per_site_g, site, self.g)
    }

    pub fn junction_gc(&self, junction: usize) -> f64 {
        pick(&self.per_junction_gc, junction, self.g_c)
    }

    pub fn junction_delta_c(&self, junction: usize) -> f64 {
        pick(&self.per_junction_delta_c, junction, self.delta_c)
    }

    /// Hopping rate `g_c^2 / delta_c` across one junction.
    pub fn junction_kappa(&self, junction: usize) -> f64 {
        let gc = self.junction_gc(junction);
        gc * gc / self.junction_delta_c(junction)
    }

    /// Hopping rate of the global parameters.
    pub fn kappa(&self) -> f64 {
        self.g_c * self.g_c / self.delta_c
    }

    /// Uniform frame shift is `2 * frame_kappa` per excitation. Equal to
    /// [`kappa`](Self::kappa) unless junction overrides are present, in which
    /// case it is the junction average.
    pub(crate) fn frame_kappa(&self) -> f64 {
        if self.per_junction_gc.is_none() && self.per_junction_delta_c.is_none() {
            self.kappa()
        } else {
            let sum: f64 = (0..self.n_sites).map(|j| self.junction_kappa(j)).sum();
            sum / self.n_sites as f64
        }
    }

    /// Shifted detuning `delta' = delta + 2 g_c^2 / delta_c` seen by site `site`.
    pub fn delta_prime(&self, site: usize) -> f64 {
        self.site_delta(site) + 2.0 * self.frame_kappa()
    }

    /// Residual photon energy on `site` left after the uniform frame shift.
    /// Zero for a uniform ring.
    pub(crate) fn photon_offset(&self, site: usize) -> f64 {
        let n = self.n_sites;
        let left = self.junction_kappa((site + n - 1) % n);
        let right = self.junction_kappa(site);
        2.0 * self.frame_kappa() - left - right
    }
}

fn pick(list: &Option<Vec<f64>>, i: usize, default: f64) -> f64 {
    list.as_ref().map_or(default, |v| v[i])
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("{v} is not finite"),
        })
    }
}
