//! Integrator identifiers and their static properties.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rbf::RbfKind;

/// Broad family of a step rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RungeKutta,
    AdamsBashforth,
    AdamsMoulton,
}

/// The fifteen integrators known to the crate.
///
/// RK4 is used only to generate startup values but can also be run on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum MethodId {
    RK2,
    RK3,
    RK4,
    AB2,
    AB3,
    AM2,
    AM3,
    IMQ_AB2,
    IQ_AB2,
    IMQ_AB3,
    IQ_AB3,
    IMQ_AM2,
    IQ_AM2,
    IMQ_AM3,
    IQ_AM3,
}

impl MethodId {
    pub const ALL: [MethodId; 15] = [
        MethodId::RK2,
        MethodId::RK3,
        MethodId::RK4,
        MethodId::AB2,
        MethodId::AB3,
        MethodId::AM2,
        MethodId::AM3,
        MethodId::IMQ_AB2,
        MethodId::IQ_AB2,
        MethodId::IMQ_AB3,
        MethodId::IQ_AB3,
        MethodId::IMQ_AM2,
        MethodId::IQ_AM2,
        MethodId::IMQ_AM3,
        MethodId::IQ_AM3,
    ];

    pub const RBF: [MethodId; 8] = [
        MethodId::IMQ_AB2,
        MethodId::IQ_AB2,
        MethodId::IMQ_AB3,
        MethodId::IQ_AB3,
        MethodId::IMQ_AM2,
        MethodId::IQ_AM2,
        MethodId::IMQ_AM3,
        MethodId::IQ_AM3,
    ];

    /// Canonical upper-case name, e.g. `IMQ_AB2`.
    pub fn name(self) -> &'static str {
        match self {
            MethodId::RK2 => "RK2",
            MethodId::RK3 => "RK3",
            MethodId::RK4 => "RK4",
            MethodId::AB2 => "AB2",
            MethodId::AB3 => "AB3",
            MethodId::AM2 => "AM2",
            MethodId::AM3 => "AM3",
            MethodId::IMQ_AB2 => "IMQ_AB2",
            MethodId::IQ_AB2 => "IQ_AB2",
            MethodId::IMQ_AB3 => "IMQ_AB3",
            MethodId::IQ_AB3 => "IQ_AB3",
            MethodId::IMQ_AM2 => "IMQ_AM2",
            MethodId::IQ_AM2 => "IQ_AM2",
            MethodId::IMQ_AM3 => "IMQ_AM3",
            MethodId::IQ_AM3 => "IQ_AM3",
        }
    }

    /// Lower-case, hyphenated id used on the command line, e.g. `imq-ab2`.
    pub fn cli_id(self) -> String {
        self.name().to_ascii_lowercase().replace('_', "-")
    }

    pub fn family(self) -> Family {
        use MethodId::*;
        match self {
            RK2 | RK3 | RK4 => Family::RungeKutta,
            AB2 | AB3 | IMQ_AB2 | IQ_AB2 | IMQ_AB3 | IQ_AB3 => Family::AdamsBashforth,
            AM2 | AM3 | IMQ_AM2 | IQ_AM2 | IMQ_AM3 | IQ_AM3 => Family::AdamsMoulton,
        }
    }

    pub fn rbf_kind(self) -> Option<RbfKind> {
        use MethodId::*;
        match self {
            IMQ_AB2 | IMQ_AB3 | IMQ_AM2 | IMQ_AM3 => Some(RbfKind::Imq),
            IQ_AB2 | IQ_AB3 | IQ_AM2 | IQ_AM3 => Some(RbfKind::Iq),
            _ => None,
        }
    }

    pub fn is_rbf(self) -> bool {
        self.rbf_kind().is_some()
    }

    /// The polynomial-interpolation method an RBF variant reduces to at ε² = 0.
    pub fn classical_counterpart(self) -> MethodId {
        use MethodId::*;
        match self {
            IMQ_AB2 | IQ_AB2 => AB2,
            IMQ_AB3 | IQ_AB3 => AB3,
            IMQ_AM2 | IQ_AM2 => AM2,
            IMQ_AM3 | IQ_AM3 => AM3,
            other => other,
        }
    }

    /// Explicit method whose step serves as the corrector's predictor.
    pub fn predictor(self) -> Option<MethodId> {
        use MethodId::*;
        match self {
            AM2 => Some(AB2),
            AM3 => Some(AB3),
            IMQ_AM2 => Some(IMQ_AB2),
            IQ_AM2 => Some(IQ_AB2),
            IMQ_AM3 => Some(IMQ_AB3),
            IQ_AM3 => Some(IQ_AB3),
            _ => None,
        }
    }

    /// True when the shape parameter comes from the four-value stencil.
    pub fn uses_three_lag_shape(self) -> bool {
        use MethodId::*;
        matches!(self, IMQ_AB3 | IQ_AB3 | IMQ_AM3 | IQ_AM3)
    }

    /// Number of grid values (v_0, v_1, ...) that must be supplied before
    /// the step rule can run.
    pub fn startup_nodes(self) -> usize {
        use MethodId::*;
        match self {
            RK2 | RK3 | RK4 => 1,
            AB2 | AM2 => 2,
            AB3 | AM3 => 3,
            IMQ_AB2 | IQ_AB2 | IMQ_AM2 | IQ_AM2 => 3,
            IMQ_AB3 | IQ_AB3 | IMQ_AM3 | IQ_AM3 => 4,
        }
    }

    /// Nominal global order of convergence.
    pub fn order(self) -> u32 {
        use MethodId::*;
        match self {
            RK2 | AB2 | AM2 => 2,
            RK3 | AB3 | AM3 => 3,
            RK4 => 4,
            IMQ_AB2 | IQ_AB2 | IMQ_AM2 | IQ_AM2 => 3,
            IMQ_AB3 | IQ_AB3 | IMQ_AM3 | IQ_AM3 => 4,
        }
    }

    /// Right-hand-side values read per step in the reference method catalogue
    /// method catalogue (stencil width, not fresh evaluations).
    pub fn stencil_fe(self) -> u64 {
        use MethodId::*;
        match self {
            AB2 | AM2 | RK2 => 2,
            AB3 | AM3 | RK3 => 3,
            RK4 => 4,
            IMQ_AB2 | IQ_AB2 => 3,
            IMQ_AB3 | IQ_AB3 => 4,
            IMQ_AM2 | IQ_AM2 => 4,
            IMQ_AM3 | IQ_AM3 => 5,
        }
    }

    /// Fresh right-hand-side evaluations per step when the corrector is run
    /// in predict-evaluate-correct-evaluate form. Iterated correctors use a
    /// data-dependent number of evaluations.
    pub fn fe_per_step_pece(self) -> u64 {
        match self.family() {
            Family::RungeKutta => match self {
                MethodId::RK2 => 2,
                MethodId::RK3 => 3,
                _ => 4,
            },
            Family::AdamsBashforth => 1,
            Family::AdamsMoulton => 2,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = String;

    /// Accepts `IMQ_AB2`, `imq-ab2`, `imq_ab2`, and the `rbf-` prefixed
    /// forms such as `rbf-imq-ab2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let norm = norm.strip_prefix("RBF_").unwrap_or(&norm);
        MethodId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == norm)
            .ok_or_else(|| {
                let valid: Vec<String> = MethodId::ALL.iter().map(|m| m.cli_id()).collect();
                format!("unknown method `{s}`; valid ids: {}", valid.join(", "))
            })
    }
}
