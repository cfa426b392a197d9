//! Request and response bodies.

use learnspace::assessment::{AssessmentConfig, AssessmentLoop, ResponseModel, TranscriptEvent};
use learnspace::{Domain, LearningSpace, State};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSpace {
    /// `hasse`, `seqs` or `states`.
    pub format: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpaceView {
    pub schema_version: u32,
    pub space_id: String,
    pub format: String,
    pub n: usize,
    pub concepts: Vec<String>,
    /// `None` when the space has more states than the service enumerates.
    pub state_count: Option<u64>,
    pub dim_b: usize,
    pub dim_c: usize,
    /// The minimal learning sequences used for assessment.
    pub sequences: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct StatesView {
    pub schema_version: u32,
    pub space_id: String,
    pub states: Vec<Vec<String>>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigBody {
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub theta_lo: Option<f64>,
    pub theta_hi: Option<f64>,
    pub collection_size: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigBody {
    pub fn to_config(&self) -> Result<AssessmentConfig, ApiError> {
        let d = AssessmentConfig::default();
        let cfg = AssessmentConfig {
            model: ResponseModel::new(self.beta.unwrap_or(d.model.beta), self.eta.unwrap_or(d.model.eta))?,
            prior: d.prior,
            theta_lo: self.theta_lo.unwrap_or(d.theta_lo),
            theta_hi: self.theta_hi.unwrap_or(d.theta_hi),
            collection_size: self.collection_size.unwrap_or(d.collection_size),
            seed: self.seed.unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub space_id: String,
    #[serde(default)]
    pub config: ConfigBody,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerBody {
    /// Concept label.
    pub concept: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigView {
    pub beta: f64,
    pub eta: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub collection_size: usize,
    pub seed: u64,
}

impl From<&AssessmentConfig> for ConfigView {
    fn from(c: &AssessmentConfig) -> Self {
        Self {
            beta: c.model.beta,
            eta: c.model.eta,
            theta_lo: c.theta_lo,
            theta_hi: c.theta_hi,
            collection_size: c.collection_size,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalView {
    pub concept: String,
    pub p: f64,
    /// `p` is at or beyond one of the thresholds.
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalView {
    pub state: Vec<String>,
    /// Outer fringe of the final state.
    pub ready_to_learn: Vec<String>,
    /// Inner fringe of the final state.
    pub recently_learned: Vec<String>,
    /// The loop ran out of questions with some concept unsettled.
    pub forced_stop: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventView {
    Ask { concept: String },
    Answer { concept: String, correct: bool },
    Marginal { concept: String, p: f64 },
    Final { state: Vec<String> },
}

impl EventView {
    pub fn new(e: &TranscriptEvent, d: &Domain) -> Self {
        match e {
            TranscriptEvent::Ask(c) => EventView::Ask { concept: d.label(*c).to_string() },
            TranscriptEvent::Answer(c, a) => EventView::Answer { concept: d.label(*c).to_string(), correct: *a },
            TranscriptEvent::Marginal(c, p) => EventView::Marginal { concept: d.label(*c).to_string(), p: *p },
            TranscriptEvent::Final(s) => EventView::Final { state: labels(d, s) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub schema_version: u32,
    pub session_id: String,
    pub space_id: String,
    pub status: Status,
    pub concepts: Vec<String>,
    pub config: ConfigView,
    pub question: Option<String>,
    pub questions_asked: usize,
    pub marginals: Vec<MarginalView>,
    #[serde(rename = "final")]
    pub final_state: Option<FinalView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<EventView>>,
}

impl SessionView {
    pub fn new(session_id: &str, space_id: &str, lp: &AssessmentLoop, with_transcript: bool) -> Result<Self, ApiError> {
        let d = lp.domain();
        let cfg = lp.config();
        let final_state = match lp.final_state() {
            Some(s) => {
                let fr = lp.space().state_fringes(s)?;
                Some(FinalView {
                    state: labels(d, s),
                    ready_to_learn: labels(d, &fr.outer),
                    recently_learned: labels(d, &fr.inner),
                    forced_stop: lp.forced_stop(),
                })
            }
            None => None,
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            session_id: session_id.to_string(),
            space_id: space_id.to_string(),
            status: if lp.is_done() { Status::Done } else { Status::Active },
            concepts: d.labels().to_vec(),
            config: cfg.into(),
            question: lp.current_question().map(|q| d.label(q).to_string()),
            questions_asked: lp.log().len(),
            marginals: lp
                .marginals()
                .iter()
                .enumerate()
                .map(|(x, &p)| MarginalView { concept: d.label(x).to_string(), p, settled: cfg.is_settled(p) })
                .collect(),
            final_state,
            transcript: with_transcript.then(|| lp.transcript().events.iter().map(|e| EventView::new(e, d)).collect()),
        })
    }
}

pub fn labels(d: &Domain, s: &State) -> Vec<String> {
    s.iter().map(|x| d.label(x).to_string()).collect()
}
