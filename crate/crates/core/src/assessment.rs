//! Bayesian assessment over the states of a learning space.
//!
//! Likelihoods are kept as a count of zero factors plus a finite log sum so
//! that long response logs neither underflow nor lose exact zeros.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::restriction_map;
use crate::parallel;
use crate::sequence_space::SequenceSpace;
use crate::space::{LearningSpace, Traversal};
use crate::state::{SharedDomain, State};

/// Careless-mistake and lucky-guess rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModel {
    pub beta: f64,
    pub eta: f64,
}

impl Default for ResponseModel {
    fn default() -> Self {
        Self { beta: 0.1, eta: 0.01 }
    }
}

impl ResponseModel {
    pub fn new(beta: f64, eta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&beta) || !(0.0..0.5).contains(&eta) {
            return Err(Error::Validation(format!("error rates must lie in [0, 0.5); got beta={beta}, eta={eta}")));
        }
        Ok(Self { beta, eta })
    }
}

/// Probability of the observed answer given the state.
pub fn answer_term(model: &ResponseModel, s: &State, concept: usize, correct: bool) -> f64 {
    match (s.contains(concept), correct) {
        (true, true) => 1.0 - model.beta,
        (true, false) => model.beta,
        (false, true) => model.eta,
        (false, false) => 1.0 - model.eta,
    }
}

/// Answers received so far, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResponseLog {
    entries: Vec<(usize, bool)>,
}

impl ResponseLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(usize, bool)>) -> Self {
        Self { entries }
    }

    pub fn push(&mut self, concept: usize, correct: bool) {
        self.entries.push((concept, correct));
    }

    pub fn entries(&self) -> &[(usize, bool)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The set of concepts asked about.
    pub fn asked(&self, n: usize) -> State {
        State::from_indices(n, self.entries.iter().map(|&(c, _)| c))
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self.entries.iter().find(|&&(c, _)| c >= n) {
            Some(&(c, _)) => Err(Error::Validation(format!("answer for concept {c} outside domain of size {n}"))),
            None => Ok(()),
        }
    }

    /// Entries on concepts of `keep`, re-indexed into the sub-domain.
    fn restrict(&self, n: usize, keep: &State) -> ResponseLog {
        let map = restriction_map(n, keep);
        Self { entries: self.entries.iter().filter_map(|&(c, a)| map[c].map(|j| (j, a))).collect() }
    }
}

/// Prior weight of each state.
#[derive(Clone, Default)]
pub enum Prior {
    #[default]
    Uniform,
    /// Unnormalised nonnegative weight per state.
    Weights(Arc<dyn Fn(&State) -> f64 + Send + Sync>),
}

impl fmt::Debug for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prior::Uniform => f.write_str("Uniform"),
            Prior::Weights(_) => f.write_str("Weights(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssessmentConfig {
    pub model: ResponseModel,
    pub prior: Prior,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub collection_size: usize,
    pub seed: u64,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        Self { model: ResponseModel::default(), prior: Prior::Uniform, theta_lo: 0.2, theta_hi: 0.8, collection_size: 8, seed: 0 }
    }
}

impl AssessmentConfig {
    pub fn validate(&self) -> Result<()> {
        ResponseModel::new(self.model.beta, self.model.eta)?;
        if !(0.0 < self.theta_lo && self.theta_lo < 0.5 && 0.5 < self.theta_hi && self.theta_hi < 1.0) {
            return Err(Error::Validation(format!(
                "thresholds must satisfy 0 < theta_lo < 0.5 < theta_hi < 1; got {} and {}",
                self.theta_lo, self.theta_hi
            )));
        }
        if self.collection_size == 0 {
            return Err(Error::Validation("collection size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_settled(&self, p: f64) -> bool {
        p <= self.theta_lo || p >= self.theta_hi
    }
}

/// Per-concept probabilities of being known.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub p: Vec<f64>,
    /// Natural log of the total likelihood.
    pub log_normalizer: f64,
}

impl Marginals {
    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }
}

/// A likelihood `0^zeros · e^log`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogLik {
    zeros: u32,
    log: f64,
}

impl LogLik {
    const ONE: LogLik = LogLik { zeros: 0, log: 0.0 };

    fn of(p: f64) -> Self {
        if p == 0.0 {
            LogLik { zeros: 1, log: 0.0 }
        } else {
            LogLik { zeros: 0, log: p.ln() }
        }
    }

    fn times(self, o: LogLik) -> Self {
        LogLik { zeros: self.zeros + o.zeros, log: self.log + o.log }
    }

    fn over(self, o: LogLik) -> Self {
        LogLik { zeros: self.zeros - o.zeros, log: self.log - o.log }
    }

    fn ln(self) -> f64 {
        if self.zeros > 0 {
            f64::NEG_INFINITY
        } else {
            self.log
        }
    }
}

#[inline]
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

struct Accumulator<'a> {
    prior: &'a Prior,
    in_factor: Vec<LogLik>,
    out_factor: Vec<LogLik>,
    /// Answer likelihood of the current state, without the prior.
    lik: LogLik,
    /// Log subtree totals along the current root path.
    stack: Vec<f64>,
    numer: Vec<f64>,
    total: f64,
}

impl Traversal for Accumulator<'_> {
    type Break = ();

    fn enter(&mut self, state: &State, added: Option<usize>) -> ControlFlow<()> {
        if let Some(x) = added {
            self.lik = self.lik.over(self.out_factor[x]).times(self.in_factor[x]);
        }
        let prior = match self.prior {
            Prior::Uniform => 0.0,
            Prior::Weights(w) => w(state).max(0.0).ln(),
        };
        self.stack.push(self.lik.ln() + prior);
        ControlFlow::Continue(())
    }

    fn leave(&mut self, _state: &State, added: Option<usize>) {
        let sub = self.stack.pop().expect("balanced traversal");
        match added {
            Some(x) => {
                self.numer[x] = log_add(self.numer[x], sub);
                let parent = self.stack.last_mut().expect("child has a parent");
                *parent = log_add(*parent, sub);
                self.lik = self.lik.over(self.in_factor[x]).times(self.out_factor[x]);
            }
            None => self.total = sub,
        }
    }
}

/// Marginal probability of each concept, from one traversal that adds each
/// subtree's total likelihood to the concept added at its root.
pub fn assess<S: LearningSpace + ?Sized>(space: &S, log: &ResponseLog, cfg: &AssessmentConfig) -> Result<Marginals> {
    let n = space.domain().len();
    log.validate(n)?;
    let mut in_factor = vec![LogLik::ONE; n];
    let mut out_factor = vec![LogLik::ONE; n];
    let mut lik = LogLik::ONE;
    for &(c, correct) in log.entries() {
        let model = &cfg.model;
        let t_in = LogLik::of(if correct { 1.0 - model.beta } else { model.beta });
        let t_out = LogLik::of(if correct { model.eta } else { 1.0 - model.eta });
        in_factor[c] = in_factor[c].times(t_in);
        out_factor[c] = out_factor[c].times(t_out);
        lik = lik.times(t_out);
    }
    let mut acc = Accumulator {
        prior: &cfg.prior,
        in_factor,
        out_factor,
        lik,
        stack: Vec::with_capacity(n + 1),
        numer: vec![f64::NEG_INFINITY; n],
        total: f64::NEG_INFINITY,
    };
    let _ = space.traverse(&mut acc);
    if acc.total == f64::NEG_INFINITY || acc.total.is_nan() {
        return Err(Error::Numerical("every state has zero likelihood".into()));
    }
    let p = acc.numer.iter().map(|&l| (l - acc.total).exp().clamp(0.0, 1.0)).collect();
    Ok(Marginals { p, log_normalizer: acc.total })
}

/// The unasked concept with probability closest to 1/2, lowest index on
/// ties; `None` once every concept is settled or every concept was asked.
pub fn select_question(m: &Marginals, asked: &State, cfg: &AssessmentConfig) -> Option<usize> {
    if m.p.iter().all(|&p| cfg.is_settled(p)) {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for (x, &p) in m.p.iter().enumerate() {
        if asked.contains(x) {
            continue;
        }
        let d = (p - 0.5).abs();
        if best.is_none_or(|(_, bd)| d < bd - 1e-12) {
            best = Some((x, d));
        }
    }
    best.map(|(x, _)| x)
}

/// One line of an assessment transcript.
#[derive(Debug, Clone, PartialEq)]
pub enum TranscriptEvent {
    Ask(usize),
    Answer(usize, bool),
    Marginal(usize, f64),
    Final(State),
}

/// Everything that happened during an assessment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub events: Vec<TranscriptEvent>,
}

impl Transcript {
    /// Line-per-event text form.
    pub fn to_lines(&self, domain: &crate::state::Domain) -> Vec<String> {
        self.events
            .iter()
            .map(|e| match e {
                TranscriptEvent::Ask(c) => format!("ask {}", domain.label(*c)),
                TranscriptEvent::Answer(c, a) => format!("answer {} {}", domain.label(*c), u8::from(*a)),
                TranscriptEvent::Marginal(c, p) => format!("marginal {} {p}", domain.label(*c)),
                TranscriptEvent::Final(s) => format!("final {}", domain.format_state(s)),
            })
            .collect()
    }
}

/// State of an interactive projection-based assessment.
#[derive(Debug, Clone)]
pub struct AssessmentLoop {
    space: Arc<SequenceSpace>,
    cfg: AssessmentConfig,
    rng: ChaCha8Rng,
    log: ResponseLog,
    marginals: Vec<f64>,
    current: Option<usize>,
    transcript: Transcript,
    final_state: Option<State>,
    forced_stop: bool,
}

impl AssessmentLoop {
    /// Runs the first round and picks the first question.
    pub fn new(space: Arc<SequenceSpace>, cfg: AssessmentConfig) -> Result<Self> {
        cfg.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = space.n();
        let mut lp = Self {
            space,
            cfg,
            rng,
            log: ResponseLog::new(),
            marginals: vec![0.0; n],
            current: None,
            transcript: Transcript::default(),
            final_state: None,
            forced_stop: false,
        };
        lp.round()?;
        Ok(lp)
    }

    pub fn domain(&self) -> &SharedDomain {
        self.space.domain()
    }

    pub fn space(&self) -> &Arc<SequenceSpace> {
        &self.space
    }

    pub fn config(&self) -> &AssessmentConfig {
        &self.cfg
    }

    pub fn current_question(&self) -> Option<usize> {
        self.current
    }

    pub fn is_done(&self) -> bool {
        self.final_state.is_some()
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn log(&self) -> &ResponseLog {
        &self.log
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn final_state(&self) -> Option<&State> {
        self.final_state.as_ref()
    }

    /// True when the loop stopped because every concept had been asked
    /// while some were still unsettled.
    pub fn forced_stop(&self) -> bool {
        self.forced_stop
    }

    /// Records the answer to the current question and runs the next round.
    pub fn answer(&mut self, concept: usize, correct: bool) -> Result<()> {
        match self.current {
            None => Err(Error::OutOfTurn("the assessment is finished".into())),
            Some(c) if c != concept => Err(Error::OutOfTurn(format!(
                "expected an answer for {}, got {}",
                self.domain().label(c),
                self.domain().label(concept.min(self.space.n().saturating_sub(1)))
            ))),
            Some(c) => {
                self.log.push(c, correct);
                self.transcript.events.push(TranscriptEvent::Answer(c, correct));
                self.current = None;
                self.round()
            }
        }
    }

    /// Partition the unasked concepts, assess each collection in its
    /// projection together with the asked ones, then ask or stop.
    fn round(&mut self) -> Result<()> {
        let n = self.space.n();
        let asked = self.log.asked(n);
        let mut unasked: Vec<usize> = (0..n).filter(|&x| !asked.contains(x)).collect();
        unasked.shuffle(&mut self.rng);
        let mut collections: Vec<Vec<usize>> =
            unasked.chunks(self.cfg.collection_size).map(<[usize]>::to_vec).collect();
        if collections.is_empty() {
            collections.push(Vec::new());
        }
        let space = &self.space;
        let log = &self.log;
        let cfg = AssessmentConfig { prior: Prior::Uniform, ..self.cfg.clone() };
        let results = parallel::map_collect(&collections, |c| {
            let mut keep = asked.clone();
            for &x in c {
                keep.insert(x);
            }
            if keep.is_empty() {
                return Ok((keep, Vec::new()));
            }
            let proj = space.project(&keep)?;
            let m = assess(&proj, &log.restrict(n, &keep), &cfg)?;
            Ok((keep, m.p))
        });
        let mut p = vec![0.0; n];
        let mut have_asked = false;
        for (c, r) in collections.iter().zip(results) {
            let (keep, sub) = r?;
            let map = restriction_map(n, &keep);
            for &x in c {
                p[x] = sub[map[x].expect("collection concept kept")];
            }
            if !have_asked {
                for x in asked.iter() {
                    p[x] = sub[map[x].expect("asked concept kept")];
                }
                have_asked = true;
            }
        }
        self.marginals = p;
        for (x, &px) in self.marginals.iter().enumerate() {
            self.transcript.events.push(TranscriptEvent::Marginal(x, px));
        }
        let m = Marginals { p: self.marginals.clone(), log_normalizer: 0.0 };
        match select_question(&m, &asked, &self.cfg) {
            Some(x) => {
                self.current = Some(x);
                self.transcript.events.push(TranscriptEvent::Ask(x));
            }
            None => {
                self.forced_stop = !m.p.iter().all(|&p| self.cfg.is_settled(p));
                let known = State::from_indices(n, (0..n).filter(|&x| self.marginals[x] >= self.cfg.theta_hi));
                let fin = self.space.interior(&known);
                self.transcript.events.push(TranscriptEvent::Final(fin.clone()));
                self.final_state = Some(fin);
            }
        }
        Ok(())
    }
}

/// Outcome of a complete assessment.
#[derive(Debug, Clone)]
pub struct AssessmentOutcome {
    pub final_state: State,
    pub questions: usize,
    pub transcript: Transcript,
    pub forced_stop: bool,
}

/// Runs the projection-based loop to completion against `student`.
pub fn run_projection_assessment<F>(space: Arc<SequenceSpace>, mut student: F, cfg: &AssessmentConfig) -> Result<AssessmentOutcome>
where
    F: FnMut(usize) -> bool,
{
    let mut lp = AssessmentLoop::new(space, cfg.clone())?;
    while let Some(q) = lp.current_question() {
        let a = student(q);
        lp.answer(q, a)?;
    }
    Ok(AssessmentOutcome {
        final_state: lp.final_state.clone().expect("loop finished"),
        questions: lp.log.len(),
        transcript: lp.transcript.clone(),
        forced_stop: lp.forced_stop,
    })
}

/// Projection onto the asked concepts, the target and a seeded uniform
/// sample of `sample_size` further concepts.
pub fn augment_with_random_sample(
    space: &SequenceSpace,
    asked: &State,
    target: usize,
    sample_size: usize,
    seed: u64,
) -> Result<SequenceSpace> {
    let n = space.n();
    if target >= n {
        return Err(Error::Validation(format!("target concept {target} outside domain")));
    }
    let mut keep = asked.with(target);
    let rest: Vec<usize> = (0..n).filter(|&x| !keep.contains(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &x in rest.choose_multiple(&mut rng, sample_size.min(rest.len())) {
        keep.insert(x);
    }
    space.project(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn decision_table() {
        let m = ResponseModel::new(0.0, 0.0).unwrap();
        let s = State::from_indices(2, [0]);
        assert_eq!(answer_term(&m, &s, 0, true), 1.0);
        let m = ResponseModel::default();
        assert_eq!(answer_term(&m, &s, 0, false), 0.1);
        assert_eq!(answer_term(&m, &s, 1, true), 0.01);
        assert_eq!(answer_term(&m, &s, 1, false), 0.99);
        assert!(ResponseModel::new(0.5, 0.0).is_err());
    }

    #[test]
    fn uniform_marginals() {
        let f = fixtures::three_concept_family();
        let m = assess(&f, &ResponseLog::new(), &AssessmentConfig::default()).unwrap();
        assert!(close(m.p[0], 4.0 / 7.0) && close(m.p[1], 3.0 / 7.0) && close(m.p[2], 4.0 / 7.0));
        assert!(close(m.normalizer(), 7.0));
        let sp = fixtures::three_concept_space();
        let m2 = assess(&sp, &ResponseLog::new(), &AssessmentConfig::default()).unwrap();
        for x in 0..3 {
            assert!(close(m.p[x], m2.p[x]));
        }
    }

    #[test]
    fn noiseless_conditioning() {
        let f = fixtures::three_concept_family();
        let cfg = AssessmentConfig { model: ResponseModel::new(0.0, 0.0).unwrap(), ..Default::default() };
        let m = assess(&f, &ResponseLog::from_entries(vec![(0, true)]), &cfg).unwrap();
        assert_eq!(m.p[0], 1.0);
        assert!(close(m.p[1], 2.0 / 4.0));
        let bad = ResponseLog::from_entries(vec![(0, true), (0, false)]);
        assert!(matches!(assess(&f, &bad, &cfg), Err(Error::Numerical(_))));
    }

    #[test]
    fn weighted_prior() {
        let f = fixtures::three_concept_family();
        let cfg = AssessmentConfig {
            prior: Prior::Weights(Arc::new(|s: &State| if s.len() == 3 { 1.0 } else { 0.0 })),
            ..Default::default()
        };
        let m = assess(&f, &ResponseLog::new(), &cfg).unwrap();
        assert!(m.p.iter().all(|&p| close(p, 1.0)));
    }

    #[test]
    fn question_selection() {
        let cfg = AssessmentConfig::default();
        let asked = State::empty(3);
        let m = Marginals { p: vec![0.9, 0.5, 0.1], log_normalizer: 0.0 };
        assert_eq!(select_question(&m, &asked, &cfg), Some(1));
        let m = Marginals { p: vec![0.05, 0.95, 0.05], log_normalizer: 0.0 };
        assert_eq!(select_question(&m, &asked, &cfg), None);
        let m = Marginals { p: vec![0.4, 0.6], log_normalizer: 0.0 };
        assert_eq!(select_question(&m, &State::empty(2), &cfg), Some(0));
    }

    #[test]
    fn noiseless_loop_recovers_every_state() {
        let sp = Arc::new(fixtures::three_concept_space());
        let cfg = AssessmentConfig {
            model: ResponseModel::new(0.0, 0.0).unwrap(),
            theta_lo: 1e-6,
            theta_hi: 1.0 - 1e-6,
            ..Default::default()
        };
        let fam = crate::space::collect_family(sp.as_ref()).unwrap();
        for truth in fam.iter() {
            let out = run_projection_assessment(sp.clone(), |c| truth.contains(c), &cfg).unwrap();
            assert_eq!(out.final_state, *truth);
            assert!(out.questions <= 3);
            assert!(!out.forced_stop);
        }
    }

    #[test]
    fn out_of_turn_answers_are_rejected() {
        let sp = Arc::new(fixtures::three_concept_space());
        let mut lp = AssessmentLoop::new(sp, AssessmentConfig::default()).unwrap();
        let q = lp.current_question().unwrap();
        assert_eq!(q, 0);
        assert!(matches!(lp.answer((q + 1) % 3, true), Err(Error::OutOfTurn(_))));
        lp.answer(q, true).unwrap();
    }

    #[test]
    fn random_sample_projection() {
        let sp = fixtures::six_concept_space();
        let q = State::from_indices(6, [0]);
        let p = augment_with_random_sample(&sp, &q, 2, 0, 1).unwrap();
        assert_eq!(p.n(), 2);
        let full = augment_with_random_sample(&sp, &State::empty(6), 0, 5, 1).unwrap();
        assert_eq!(full, sp);
        assert_eq!(
            augment_with_random_sample(&sp, &q, 2, 2, 9).unwrap(),
            augment_with_random_sample(&sp, &q, 2, 2, 9).unwrap()
        );
    }
}
