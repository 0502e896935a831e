use crate::math;
use crate::trust::TrustError;
use crate::Tick;

/// Lowest value either pseudo-count may decay to.
pub const COUNTER_FLOOR: f64 = 1e-6;

/// Decayed success/failure pseudo-counts backing a Beta posterior.
///
/// `alpha` counts packets the neighbour forwarded, `beta` the ones it
/// dropped. Fresh counters hold the uniform prior Beta(1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteractionCounters {
    alpha: f64,
    beta: f64,
    last_update: Tick,
}

impl InteractionCounters {
    /// Uniform prior, stamped at `at`.
    pub fn new(at: Tick) -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            last_update: at,
        }
    }

    pub fn from_parts(alpha: f64, beta: f64, last_update: Tick) -> Result<Self, TrustError> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
            return Err(TrustError::InvalidCounters { alpha, beta });
        }
        if alpha + beta <= 0.0 {
            return Err(TrustError::InvalidCounters { alpha, beta });
        }
        Ok(Self {
            alpha,
            beta,
            last_update,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn last_update(&self) -> Tick {
        self.last_update
    }

    /// Posterior mean `alpha / (alpha + beta)`.
    pub fn direct_trust(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Twelve times the Beta variance, capped at 1.
    ///
    /// The uncapped value reaches 1 at the uniform prior and exceeds it only
    /// once both counts have decayed well below one observation.
    pub fn confidence(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let s = a + b;
        let rho = 12.0 * a * b / (s * s * (s + 1.0));
        rho.clamp(0.0, 1.0)
    }

    /// Fades both counts by `c^(now - last_update)`, never below
    /// [`COUNTER_FLOOR`].
    pub fn decay(&self, now: Tick, c: f64) -> Result<Self, TrustError> {
        if !(c > 0.0 && c < 1.0) {
            return Err(TrustError::InvalidDiminishingFactor(c));
        }
        if now < self.last_update {
            return Err(TrustError::TimeReversal {
                now,
                last_update: self.last_update,
            });
        }
        let factor = math::powi(c, now - self.last_update);
        Ok(Self {
            alpha: (self.alpha * factor).max(COUNTER_FLOOR),
            beta: (self.beta * factor).max(COUNTER_FLOOR),
            last_update: now,
        })
    }

    /// Beta-Binomial conjugate update.
    pub fn record(&self, forwarded: u32, dropped: u32) -> Self {
        Self {
            alpha: self.alpha + f64::from(forwarded),
            beta: self.beta + f64::from(dropped),
            last_update: self.last_update,
        }
    }
}
