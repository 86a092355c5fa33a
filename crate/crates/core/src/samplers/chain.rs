use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{MoveKind, MoveMix};
use crate::error::Result;
use crate::gibbs::{AnnealingSchedule, ParameterVector};

/// Sampled states in chain order, with per-state bookkeeping.
///
/// All per-state vectors have the same length. `n_proposed`/`n_accepted`
/// count every step, including those dropped by thinning.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRecord<S> {
    pub seed: u64,
    pub steps: Vec<usize>,
    pub states: Vec<S>,
    pub log_targets: Vec<f64>,
    pub accepted: Vec<bool>,
    pub moves: Vec<MoveKind>,
    pub temperatures: Vec<f64>,
    pub n_proposed: usize,
    pub n_accepted: usize,
}

impl<S> ChainRecord<S> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            steps: Vec::new(),
            states: Vec::new(),
            log_targets: Vec::new(),
            accepted: Vec::new(),
            moves: Vec::new(),
            temperatures: Vec::new(),
            n_proposed: 0,
            n_accepted: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub(crate) fn count(&mut self, accepted: bool) {
        self.n_proposed += 1;
        self.n_accepted += usize::from(accepted);
    }

    pub fn push(
        &mut self,
        step: usize,
        state: S,
        log_target: f64,
        accepted: bool,
        kind: MoveKind,
        temperature: f64,
    ) {
        self.steps.push(step);
        self.states.push(state);
        self.log_targets.push(log_target);
        self.accepted.push(accepted);
        self.moves.push(kind);
        self.temperatures.push(temperature);
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.n_proposed == 0 {
            0.0
        } else {
            self.n_accepted as f64 / self.n_proposed as f64
        }
    }

    pub fn sidecar(
        &self,
        record_every: usize,
        schedule: Option<&AnnealingSchedule>,
        move_mix: Option<&MoveMix>,
    ) -> ChainSidecar {
        ChainSidecar {
            seed: self.seed,
            n_recorded: self.len(),
            n_proposed: self.n_proposed,
            n_accepted: self.n_accepted,
            record_every,
            schedule: schedule.cloned(),
            move_mix: move_mix.copied(),
        }
    }
}

impl<S: FlatState> ChainRecord<S> {
    /// One CSV row per recorded step:
    /// `step,move,accepted,temperature,log_target,<state columns>`.
    ///
    /// Fixed-dimension states get one named column per coordinate; other
    /// states are written into a single `state` column as `;`-separated
    /// numbers.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["step", "move", "accepted", "temperature", "log_target"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let named = self.states.first().and_then(|s| s.column_names());
        match &named {
            Some(cols) => header.extend(cols.iter().cloned()),
            None => header.push("state".into()),
        }
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![
                self.steps[i].to_string(),
                self.moves[i].as_str().to_string(),
                u8::from(self.accepted[i]).to_string(),
                self.temperatures[i].to_string(),
                self.log_targets[i].to_string(),
            ];
            let flat = self.states[i].flatten();
            if named.is_some() {
                row.extend(flat.iter().map(|v| v.to_string()));
            } else {
                row.push(
                    flat.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                );
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Run metadata written next to a chain CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSidecar {
    pub seed: u64,
    pub n_recorded: usize,
    pub n_proposed: usize,
    pub n_accepted: usize,
    pub record_every: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<AnnealingSchedule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub move_mix: Option<MoveMix>,
}

/// Flattening of a chain state into numbers for persistence.
pub trait FlatState {
    fn flatten(&self) -> Vec<f64>;

    /// Column names for fixed-dimension states.
    fn column_names(&self) -> Option<Vec<String>> {
        None
    }
}

impl FlatState for ParameterVector {
    fn flatten(&self) -> Vec<f64> {
        self.values().to_vec()
    }

    fn column_names(&self) -> Option<Vec<String>> {
        Some(self.names().map(str::to_string).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::ParamSpec;

    #[test]
    fn csv_layout() {
        let p = ParameterVector::new(
            vec![ParamSpec::new("a", 0.0, 1.0), ParamSpec::new("b", 0.0, 1.0)],
            vec![0.25, 0.5],
        )
        .unwrap();
        let mut rec = ChainRecord::new(3);
        rec.push(1, p.clone(), -1.5, true, MoveKind::Walk, 1.0);
        rec.push(2, p, -1.5, false, MoveKind::Walk, 1.0);
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "step,move,accepted,temperature,log_target,a,b\n\
             1,walk,1,1,-1.5,0.25,0.5\n\
             2,walk,0,1,-1.5,0.25,0.5\n"
        );
        let side = rec.sidecar(1, None, Some(&MoveMix::default()));
        let json = serde_json::to_string(&side).unwrap();
        assert!(json.contains("\"seed\":3"));
        assert!(!json.contains("schedule"));
    }
}
