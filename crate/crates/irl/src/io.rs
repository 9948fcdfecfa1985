//! JSON and CSV file formats.
//!
//! Every structured document is JSON; tabular data (datasets, curves) is
//! CSV. Readers validate through the core constructors, so a file that
//! parses is also a well-formed model.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use irl_core::estimation::{EstimateReport, Transition};
use irl_core::solvers::{Method, SolverReport};
use irl_core::{Mdp, RewardVector, TransitionModel};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};

/// `{"n", "k", "gamma", "optimal_action", "transitions": [action][from][to]}`.
///
/// Unknown fields are ignored so an estimate report can be read back as an
/// MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpFile {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub optimal_action: usize,
    pub transitions: Vec<Vec<Vec<f64>>>,
}

impl MdpFile {
    pub fn from_mdp(mdp: &Mdp) -> Self {
        MdpFile {
            n: mdp.n(),
            k: mdp.k(),
            gamma: mdp.gamma(),
            optimal_action: mdp.optimal_action(),
            transitions: mdp.transitions().to_raw(),
        }
    }

    pub fn to_mdp(&self) -> Result<Mdp> {
        let p = TransitionModel::new(&self.transitions)?;
        if p.n() != self.n || p.k() != self.k {
            return Err(IrlError::Format(format!(
                "declared n={} k={} but transitions are {}x{}x{}",
                self.n,
                self.k,
                p.k(),
                p.n(),
                p.n()
            )));
        }
        Ok(Mdp::new(p, self.gamma, self.optimal_action)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardFile {
    pub r: Vec<f64>,
}

impl RewardFile {
    pub fn to_reward(&self) -> Result<RewardVector> {
        Ok(RewardVector::new(self.r.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReportFile {
    pub method: String,
    pub reward: Vec<f64>,
    pub objective: f64,
    pub l1_norm: f64,
    pub lambda: Option<f64>,
    pub r_max: Option<f64>,
    pub feasible: bool,
}

impl From<&SolverReport> for SolverReportFile {
    fn from(rep: &SolverReport) -> Self {
        SolverReportFile {
            method: rep.method.name().to_string(),
            reward: rep.reward.as_slice().to_vec(),
            objective: rep.objective_value,
            l1_norm: rep.l1_norm,
            lambda: rep.lambda,
            r_max: rep.r_max,
            feasible: rep.feasible,
        }
    }
}

impl SolverReportFile {
    pub fn method(&self) -> Result<Method> {
        parse_method(&self.method)
    }
}

pub fn parse_method(name: &str) -> Result<Method> {
    match name {
        "l1svm" => Ok(Method::L1Svm),
        "ngrussell" => Ok(Method::NgRussellLp),
        other => Err(IrlError::Format(format!("unknown method {other:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRef {
    pub action: usize,
    pub state: usize,
}

/// An MDP document with estimated transitions plus sampling diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReportFile {
    #[serde(flatten)]
    pub mdp: MdpFile,
    pub unvisited_pairs: Vec<PairRef>,
    /// `samples_per_pair[a][i]`.
    pub samples_per_pair: Vec<Vec<u64>>,
}

impl EstimateReportFile {
    /// Pairs the estimate with the discount and `a1` of the sampled MDP.
    pub fn new(report: &EstimateReport, source: &Mdp) -> Self {
        EstimateReportFile {
            mdp: MdpFile {
                n: report.p_hat.n(),
                k: report.p_hat.k(),
                gamma: source.gamma(),
                optimal_action: source.optimal_action(),
                transitions: report.p_hat.to_raw(),
            },
            unvisited_pairs: report
                .unvisited_pairs
                .iter()
                .map(|&(action, state)| PairRef { action, state })
                .collect(),
            samples_per_pair: report.samples_per_pair.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct DatasetRow {
    state: usize,
    action: usize,
    next_state: usize,
}

pub fn write_dataset_csv<W: Write>(triples: &[Transition], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in triples {
        w.serialize(DatasetRow { state: t.state, action: t.action, next_state: t.next_state })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(input: R) -> Result<Vec<Transition>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<DatasetRow>()
        .map(|row| {
            let row = row?;
            Ok(Transition { state: row.state, action: row.action, next_state: row.next_state })
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| IrlError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| IrlError::Json { path: path.to_path_buf(), source: e })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)).map_err(|e| IrlError::Io { path: path.to_path_buf(), source: e })
}

pub fn read_mdp(path: &Path) -> Result<Mdp> {
    read_json::<MdpFile>(path)?.to_mdp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use irl_core::estimation::{mle_transition, simulate_dataset, SamplingScheme};
    use irl_core::generate::gen_mdp_uniform;

    #[test]
    fn mdp_round_trip() {
        let mdp = gen_mdp_uniform(3, 2, 0.4, 1).unwrap();
        let text = to_json_string(&MdpFile::from_mdp(&mdp));
        let back: MdpFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_mdp().unwrap(), mdp);
    }

    #[test]
    fn declared_sizes_must_match() {
        let mut file = MdpFile::from_mdp(&gen_mdp_uniform(3, 2, 0.4, 1).unwrap());
        file.n = 4;
        assert!(matches!(file.to_mdp(), Err(IrlError::Format(_))));
    }

    #[test]
    fn estimate_report_reads_as_mdp() {
        let mdp = gen_mdp_uniform(3, 2, 0.4, 1).unwrap();
        let ds = simulate_dataset(&mdp, 1, SamplingScheme::AlphaReachable { episode_len: 1 }, 3).unwrap();
        let rep = mle_transition(&ds).unwrap();
        let file = EstimateReportFile::new(&rep, &mdp);
        let text = to_json_string(&file);
        assert!(text.contains("\"unvisited_pairs\""));
        let as_mdp: MdpFile = serde_json::from_str(&text).unwrap();
        assert_eq!(as_mdp.to_mdp().unwrap().transitions(), &rep.p_hat);
        let back: EstimateReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let triples = vec![
            Transition { state: 0, action: 1, next_state: 2 },
            Transition { state: 2, action: 0, next_state: 0 },
        ];
        let mut buf = Vec::new();
        write_dataset_csv(&triples, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "state,action,next_state\n0,1,2\n2,0,0\n");
        assert_eq!(read_dataset_csv(&buf[..]).unwrap(), triples);
    }

    #[test]
    fn reward_file_rejects_extra_fields() {
        assert!(serde_json::from_str::<RewardFile>(r#"{"r": [1.0], "x": 2}"#).is_err());
        let r: RewardFile = serde_json::from_str(r#"{"r": [1.0, -0.5]}"#).unwrap();
        assert_eq!(r.to_reward().unwrap().l1_norm(), 1.5);
    }
}
