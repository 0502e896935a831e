//! Evidence algebra over the frame {normal, malicious}.
//!
//! A recommendation is a basic probability assignment on three focal sets:
//! `H` (the subject is normal), `H'` (it is malicious) and `U` (the whole
//! frame, i.e. "either"). Recommendations are combined pairwise and the
//! belief in `H` of the combined mass becomes the indirect trust.

use crate::math;
use crate::trust::TrustError;

const SUM_TOLERANCE: f64 = 1e-9;
/// Below this normalisation constant two masses are treated as total
/// contradiction.
pub const DEGENERATE_CONFLICT: f64 = 1e-12;

/// Focal sets of the frame of discernment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `H`: the subject behaves normally.
    Normal,
    /// `H'`: the subject is malicious.
    Malicious,
    /// `U`: the whole frame.
    Unknown,
}

/// What a recommender says about a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Claim {
    Normal,
    Malicious,
}

/// How two masses are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FusionRule {
    /// Conflict is discarded and the rest renormalised.
    #[default]
    Normalized,
    /// Conflict is moved onto `U`; no renormalisation.
    Yager,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassAssignment {
    normal: f64,
    malicious: f64,
    unknown: f64,
}

impl MassAssignment {
    /// Total ignorance: everything on `U`.
    pub const VACUOUS: MassAssignment = MassAssignment {
        normal: 0.0,
        malicious: 0.0,
        unknown: 1.0,
    };

    pub fn new(normal: f64, malicious: f64, unknown: f64) -> Result<Self, TrustError> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(in_unit(normal) && in_unit(malicious) && in_unit(unknown))
            || math::abs(normal + malicious + unknown - 1.0) > SUM_TOLERANCE
        {
            return Err(TrustError::InvalidMass {
                normal,
                malicious,
                unknown,
            });
        }
        Ok(Self {
            normal,
            malicious,
            unknown,
        })
    }

    /// Mass of a claim weighted by how far the querier trusts the claimant.
    pub fn from_claim(recommender_trust: f64, claim: Claim) -> Self {
        let t = recommender_trust.clamp(0.0, 1.0);
        match claim {
            Claim::Normal => Self {
                normal: t,
                malicious: 0.0,
                unknown: 1.0 - t,
            },
            Claim::Malicious => Self {
                normal: 0.0,
                malicious: t,
                unknown: 1.0 - t,
            },
        }
    }

    pub fn normal(&self) -> f64 {
        self.normal
    }

    pub fn malicious(&self) -> f64 {
        self.malicious
    }

    pub fn unknown(&self) -> f64 {
        self.unknown
    }

    pub fn belief(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::Normal => self.normal,
            Hypothesis::Malicious => self.malicious,
            Hypothesis::Unknown => self.normal + self.malicious + self.unknown,
        }
    }

    pub fn plausibility(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::Normal => self.normal + self.unknown,
            Hypothesis::Malicious => self.malicious + self.unknown,
            Hypothesis::Unknown => self.normal + self.malicious + self.unknown,
        }
    }

    /// Product mass landing on the empty set: `H` against `H'`.
    pub fn conflict(&self, other: &Self) -> f64 {
        self.normal * other.malicious + self.malicious * other.normal
    }

    /// Normalised combination of two masses.
    pub fn fuse(&self, other: &Self) -> Result<Self, TrustError> {
        if *other == Self::VACUOUS {
            return Ok(*self);
        }
        if *self == Self::VACUOUS {
            return Ok(*other);
        }
        let (h, hp, u) = self.agreeing_products(other);
        let m = h + hp + u;
        if m < DEGENERATE_CONFLICT {
            return Err(TrustError::TotalConflict);
        }
        Ok(Self {
            normal: h / m,
            malicious: hp / m,
            unknown: u / m,
        })
    }

    /// Combination that moves the conflict onto `U` instead of renormalising.
    pub fn fuse_yager(&self, other: &Self) -> Self {
        if *other == Self::VACUOUS {
            return *self;
        }
        if *self == Self::VACUOUS {
            return *other;
        }
        let (h, hp, u) = self.agreeing_products(other);
        Self {
            normal: h,
            malicious: hp,
            unknown: u + self.conflict(other),
        }
    }

    pub fn fuse_with(&self, other: &Self, rule: FusionRule) -> Result<Self, TrustError> {
        match rule {
            FusionRule::Normalized => self.fuse(other),
            FusionRule::Yager => Ok(self.fuse_yager(other)),
        }
    }

    // Cross terms are summed as a pair first so that swapping the operands
    // gives bit-identical results.
    fn agreeing_products(&self, o: &Self) -> (f64, f64, f64) {
        let h = self.normal * o.normal + (self.normal * o.unknown + self.unknown * o.normal);
        let hp = self.malicious * o.malicious
            + (self.malicious * o.unknown + self.unknown * o.malicious);
        let u = self.unknown * o.unknown;
        (h, hp, u)
    }
}

/// Outcome of folding a list of recommendations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedEvidence {
    pub mass: MassAssignment,
    /// Number of pairwise steps that hit total contradiction and were
    /// replaced by ignorance.
    pub degenerate_steps: usize,
    /// Largest single-step conflict seen during the fold.
    pub max_conflict: f64,
}

/// Left fold of the recommendations starting from the vacuous mass.
pub fn fuse_all<'a, I>(recommendations: I, rule: FusionRule) -> FusedEvidence
where
    I: IntoIterator<Item = &'a MassAssignment>,
{
    let mut acc = MassAssignment::VACUOUS;
    let mut degenerate_steps = 0;
    let mut max_conflict: f64 = 0.0;
    for m in recommendations {
        max_conflict = max_conflict.max(acc.conflict(m));
        acc = match acc.fuse_with(m, rule) {
            Ok(fused) => fused,
            Err(_) => {
                degenerate_steps += 1;
                MassAssignment::VACUOUS
            }
        };
    }
    FusedEvidence {
        mass: acc,
        degenerate_steps,
        max_conflict,
    }
}

/// Belief in `H` after fusing every recommendation; 0.5 without any.
pub fn indirect_trust(recommendations: &[MassAssignment], rule: FusionRule) -> f64 {
    if recommendations.is_empty() {
        return 0.5;
    }
    fuse_all(recommendations, rule)
        .mass
        .belief(Hypothesis::Normal)
}
