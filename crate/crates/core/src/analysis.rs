//! Full bound-versus-oracle report for one network.

use serde::{Deserialize, Serialize};

use crate::cactus::{omega_h_lower_bound, temporal_cactus_lower_bound, TemporalCactus};
use crate::cdg::cdg_upper_bound;
use crate::error::Result;
use crate::graphkit::Linking;
use crate::mdg::{full_dim_necessary_check, mdg_upper_bound};
use crate::model::TemporalNetwork;
use crate::oracle::{ezzine_haddad_report, oracle_gdim_omegabar, OracleParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_subsystems: usize,
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: usize,
    pub upper: usize,
    pub oracle: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub necessary_check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EzzineHaddadSection {
    pub rank_c: usize,
    pub rank_c_low: usize,
    pub differing_trials: Vec<usize>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witnesses {
    pub cdg_linking: Linking,
    pub mdg_linking: Linking,
    pub temporal_cactus: TemporalCactus,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub network: NetworkSummary,
    pub omega_h: Bracket,
    pub omega_bar: Bracket,
    pub ezzine_haddad: EzzineHaddadSection,
    pub settings: Settings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Witnesses>,
}

impl AnalysisReport {
    /// Brackets where `lower ≤ oracle ≤ upper` fails.
    pub fn sandwich_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, b) in [("omega_h", &self.omega_h), ("omega_bar", &self.omega_bar)] {
            if b.lower > b.oracle {
                out.push(format!(
                    "{name}: lower bound {} exceeds oracle {}",
                    b.lower, b.oracle
                ));
            }
            if b.oracle > b.upper {
                out.push(format!(
                    "{name}: oracle {} exceeds upper bound {}",
                    b.oracle, b.upper
                ));
            }
        }
        out
    }
}

pub fn analyze(
    net: &TemporalNetwork,
    params: &OracleParams,
    restarts: usize,
    witnesses: bool,
) -> Result<AnalysisReport> {
    let cdg = cdg_upper_bound(net);
    let mdg = mdg_upper_bound(net);
    let cactus = temporal_cactus_lower_bound(net, restarts, params.seed)?;
    let eh = ezzine_haddad_report(net, params)?;
    Ok(AnalysisReport {
        network: NetworkSummary {
            n: net.n(),
            n_subsystems: net.len(),
            m: net.input_counts(),
        },
        omega_h: Bracket {
            lower: omega_h_lower_bound(net),
            upper: cdg.bound_n2_refined.unwrap_or(cdg.bound),
            oracle: eh.rank_c.value,
            necessary_check: None,
        },
        omega_bar: Bracket {
            lower: cactus.bound,
            upper: mdg.bound,
            oracle: oracle_gdim_omegabar(net, params)?.value,
            necessary_check: Some(full_dim_necessary_check(net).passes),
        },
        ezzine_haddad: EzzineHaddadSection {
            rank_c: eh.rank_c.value,
            rank_c_low: eh.rank_c_low.value,
            differing_trials: eh.differing_trials,
            verdict: eh.verdict,
        },
        settings: Settings {
            trials: params.trials,
            seed: params.seed,
            tol: params.tol,
            restarts,
        },
        witnesses: witnesses.then_some(Witnesses {
            cdg_linking: cdg.witness,
            mdg_linking: mdg.witness,
            temporal_cactus: cactus.witness,
        }),
    })
}
