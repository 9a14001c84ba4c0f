use serde::{Deserialize, Serialize};

/// Weights of the two overall metric scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmsWeights {
    pub syn_ss: f64,
    pub sem_ss: f64,
    pub syn_ssl: f64,
    pub sem_ssl: f64,
    pub llm_ssl: f64,
}

impl Default for OmsWeights {
    fn default() -> Self {
        OmsWeights {
            syn_ss: 0.46,
            sem_ss: 0.54,
            syn_ssl: 0.30,
            sem_ssl: 0.35,
            llm_ssl: 0.35,
        }
    }
}

impl OmsWeights {
    /// Overall score without LLM judges.
    pub fn oms_ss(&self, syn_avg: f64, sem_avg: f64) -> f64 {
        self.syn_ss * syn_avg + self.sem_ss * sem_avg
    }

    /// Overall score including LLM judges.
    pub fn oms_ssl(&self, syn_avg: f64, sem_avg: f64, llm_avg: f64) -> f64 {
        self.syn_ssl * syn_avg + self.sem_ssl * sem_avg + self.llm_ssl * llm_avg
    }
}

/// [`OmsWeights::oms_ss`] with the default weights.
pub fn oms_ss(syn_avg: f64, sem_avg: f64) -> f64 {
    OmsWeights::default().oms_ss(syn_avg, sem_avg)
}

/// [`OmsWeights::oms_ssl`] with the default weights.
pub fn oms_ssl(syn_avg: f64, sem_avg: f64, llm_avg: f64) -> f64 {
    OmsWeights::default().oms_ssl(syn_avg, sem_avg, llm_avg)
}
