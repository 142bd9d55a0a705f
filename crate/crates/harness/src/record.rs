use chrono::{DateTime, Utc};
use qaccel_core::gates::Histogram;
use qaccel_core::mapper::{MappingReport, PlacementStrategy};
use qaccel_core::metrics::MetricSet;
use qaccel_core::statecore::Amplitude;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uuid::Uuid;

/// Default number of final basis states kept per record.
pub const DEFAULT_TOP_K: usize = 16;

/// Default shot count.
pub const DEFAULT_SHOTS: u64 = 1000;

/// Everything that, together with the circuit, determines a run's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shots: u64,
    pub seed: u64,
    pub noise_p: Option<f64>,
    /// Topology spec such as `grid:2x3`; `None` runs unmapped.
    pub topology: Option<String>,
    pub placement: PlacementStrategy,
    pub top_k: usize,
    /// Bitstrings counted as correct; `None` means the ideal support.
    pub success_set: Option<Vec<String>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise_p: None,
            topology: None,
            placement: PlacementStrategy::Identity,
            top_k: DEFAULT_TOP_K,
            success_set: None,
        }
    }
}

/// One basis state of the final register. The amplitude is absent when the
/// run averaged over trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub bitstring: String,
    pub amplitude: Option<Amplitude>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: Uuid,
    pub timestamp: DateTime<Utc>,
    /// SHA-256 of the canonical cQASM text, hex encoded.
    pub circuit_hash: String,
    pub num_qubits: usize,
    /// Register actually simulated; the device size when mapped.
    pub simulated_qubits: usize,
    pub config: RunConfig,
    pub metrics: MetricSet,
    pub mapping: Option<MappingReport>,
    /// Most probable states, descending; ties by bitstring.
    pub final_states: Vec<FinalState>,
    pub counts: Histogram,
    pub wall_time_ns: u64,
    pub peak_state_bytes: u64,
}

impl RunRecord {
    /// True when both records describe the same outcome, ignoring identity
    /// and timing fields.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.circuit_hash == other.circuit_hash
            && self.num_qubits == other.num_qubits
            && self.simulated_qubits == other.simulated_qubits
            && self.config == other.config
            && self.metrics == other.metrics
            && self.mapping == other.mapping
            && self.final_states == other.final_states
            && self.counts == other.counts
            && self.peak_state_bytes == other.peak_state_bytes
    }
}

pub fn circuit_hash(canonical_text: &str) -> String {
    hex::encode(Sha256::digest(canonical_text.as_bytes()))
}

/// Top `k` entries of a probability vector, descending, ties by index.
pub fn top_states(probabilities: &[f64], amplitudes: Option<&[Amplitude]>, qubits: usize, k: usize) -> Vec<FinalState> {
    let mut order: Vec<usize> = (0..probabilities.len()).filter(|&i| probabilities[i] > 0.0).collect();
    order.sort_by(|&a, &b| probabilities[b].total_cmp(&probabilities[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(k)
        .map(|i| FinalState {
            bitstring: qaccel_core::gates::bitstring(i, qubits),
            amplitude: amplitudes.map(|a| a[i]),
            probability: probabilities[i].min(1.0),
        })
        .collect()
}
