//! Enumeration of local deterministic strategies — the vertex set of the
//! local polytope.

use crate::error::{Error, Result};
use crate::scenario::{cartesian, Behavior, JointOutcome, JointSetting, Scenario};
use crate::value::{Value, ValueMode};

/// Default cap on the number of strategies enumerated.
pub const DEFAULT_STRATEGY_CAP: usize = 1 << 20;

/// One deterministic outcome function per party: setting index → outcome index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub choices: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    /// The joint outcome this strategy produces at a joint setting.
    pub fn outcome(&self, settings: &JointSetting) -> JointOutcome {
        settings
            .iter()
            .enumerate()
            .map(|(party, &s)| self.choices[party][s])
            .collect()
    }

    /// True if the strategy produces exactly `outcomes` at `settings`.
    pub fn consistent(&self, settings: &JointSetting, outcomes: &JointOutcome) -> bool {
        &self.outcome(settings) == outcomes
    }

    /// The 0/1 behavior induced by the strategy (exact mode).
    pub fn behavior(&self, scenario: &Scenario) -> Behavior {
        let me = self.clone();
        Behavior::from_fn(scenario.clone(), ValueMode::Exact, move |s, o| {
            if me.consistent(s, o) {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        })
    }
}

/// All deterministic strategies of the scenario, canonically ordered
/// (lexicographic over the flattened per-setting outcome choices).
pub fn enumerate_deterministic_strategies(
    scenario: &Scenario,
    cap: usize,
) -> Result<Vec<DeterministicStrategy>> {
    let mut cell_dims = Vec::new();
    let mut layout = Vec::new(); // (party, number of settings)
    for party in &scenario.parties {
        layout.push(party.settings.len());
        for setting in &party.settings {
            cell_dims.push(setting.outcomes.len());
        }
    }
    let count: usize = cell_dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d).filter(|&c| c <= cap)
    }).ok_or_else(|| {
        Error::Resource(format!("strategy count exceeds cap {cap}"))
    })?;
    let _ = count;
    let mut out = Vec::new();
    for flat in cartesian(&cell_dims) {
        let mut choices = Vec::with_capacity(layout.len());
        let mut offset = 0;
        for &n in &layout {
            choices.push(flat[offset..offset + n].to_vec());
            offset += n;
        }
        out.push(DeterministicStrategy { choices });
    }
    Ok(out)
}
