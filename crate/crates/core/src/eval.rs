//! Goal-recognition metrics and the split/grid-search experiment protocol.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demogen::TaskSpec;
use crate::domain::{Goal, ObjectId};
use crate::recognizer::{DemoAnalysis, Method, RecognizeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("dataset has {0} tasks, need at least 2")]
    TooFewTasks(usize),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

impl Counts {
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p > 0.0 && r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }
}

pub fn score_goal(pred: &Goal, truth: &Goal) -> Counts {
    let tp = pred.iter().filter(|p| truth.contains(p)).count();
    Counts {
        tp,
        fp: pred.len() - tp,
        fn_: truth.len() - tp,
    }
}

/// Counts restricted to predicates whose first argument is `blocker`.
pub fn blocker_counts(pred: &Goal, truth: &Goal, blocker: &ObjectId) -> Counts {
    let only = |g: &Goal| Goal::new(g.iter().filter(|p| p.subject() == blocker).cloned()).expect("subset of a goal");
    score_goal(&only(pred), &only(truth))
}

/// Per-demo blocker F1; a demo with no blocker predicates on either side is
/// scored 1.
pub fn f1_blk(pred: &Goal, truth: &Goal, blocker: &ObjectId) -> f64 {
    blocker_counts(pred, truth, blocker).f1()
}

pub fn success(pred: &Goal, truth: &Goal) -> bool {
    pred == truth
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub n_splits: usize,
    pub train_tasks: usize,
    pub split_seed: u64,
    pub tau_grid: Vec<f64>,
    pub prior_grid: Vec<f64>,
    pub delta_plan_grid: Vec<f64>,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            n_splits: 10,
            train_tasks: 12,
            split_seed: 7,
            tau_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2],
            prior_grid: vec![0.3, 0.5, 0.7],
            delta_plan_grid: vec![0.02, 0.05, 0.1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    FinalState,
    TaskPred,
    NoMotion,
    Ours,
}

impl MethodName {
    pub const ALL: [MethodName; 4] = [MethodName::FinalState, MethodName::TaskPred, MethodName::NoMotion, MethodName::Ours];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::FinalState => "final_state",
            MethodName::TaskPred => "task_pred",
            MethodName::NoMotion => "no_motion",
            MethodName::Ours => "ours",
        }
    }

    pub fn parse(s: &str) -> Result<Self, EvalError> {
        MethodName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| EvalError::UnknownMethod(s.to_string()))
    }
}

/// One demonstration ready for scoring.
#[derive(Debug, Clone)]
pub struct EvalItem {
    pub task_index: usize,
    pub spec: TaskSpec,
    pub truth: Goal,
    pub analysis: DemoAnalysis,
}

/// Hyperparameters a method was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub tau: f64,
    pub prior_task: f64,
    pub delta_plan: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: String,
    /// Split index, or `None` for the mean over splits.
    pub split: Option<usize>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_blk: f64,
    pub success_rate: f64,
    pub hyper: Option<Hyper>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub averaging: String,
    pub n_splits: usize,
    pub rows: Vec<MetricsRow>,
    pub means: Vec<MetricsRow>,
}

fn candidates(method: MethodName, p: &EvalParams, defaults: Hyper) -> Vec<Hyper> {
    match method {
        MethodName::FinalState | MethodName::TaskPred => vec![defaults],
        MethodName::Ours => p
            .prior_grid
            .iter()
            .map(|&prior_task| Hyper { prior_task, ..defaults })
            .collect(),
        MethodName::NoMotion => p
            .tau_grid
            .iter()
            .flat_map(|&tau| {
                p.delta_plan_grid
                    .iter()
                    .map(move |&delta_plan| Hyper { tau, delta_plan, ..defaults })
            })
            .collect(),
    }
}

fn predict(item: &EvalItem, method: MethodName, h: Hyper) -> Result<Goal, RecognizeError> {
    let m = match method {
        MethodName::FinalState => Method::FinalState,
        MethodName::TaskPred => Method::TaskPredicates,
        MethodName::NoMotion => Method::NoMotion { tau: h.tau },
        MethodName::Ours => Method::Ours,
    };
    item.analysis.goal(m, h.prior_task, h.delta_plan)
}

/// Aggregates micro-averaged metrics over `(prediction, item)` pairs.
pub fn metrics(pairs: &[(&Goal, &EvalItem)]) -> (Counts, Counts, f64) {
    let mut all = Counts::default();
    let mut blk = Counts::default();
    let mut ok = 0usize;
    for (pred, item) in pairs {
        all += score_goal(pred, &item.truth);
        blk += blocker_counts(pred, &item.truth, &item.spec.blocker.id());
        ok += success(pred, &item.truth) as usize;
    }
    let rate = if pairs.is_empty() { 0.0 } else { ok as f64 / pairs.len() as f64 };
    (all, blk, rate)
}

fn row(method: MethodName, split: Option<usize>, pairs: &[(&Goal, &EvalItem)], hyper: Option<Hyper>) -> MetricsRow {
    let (all, blk, success_rate) = metrics(pairs);
    MetricsRow {
        method: method.as_str().to_string(),
        split,
        precision: all.precision(),
        recall: all.recall(),
        f1: all.f1(),
        f1_blk: blk.f1(),
        success_rate,
        hyper,
    }
}

/// Task-level train/test partition of split `k`.
pub fn split_tasks(task_indices: &[usize], train: usize, seed: u64, k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut tasks = task_indices.to_vec();
    tasks.sort_unstable();
    tasks.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    tasks.shuffle(&mut rng);
    let train = train.min(tasks.len().saturating_sub(1));
    let test = tasks.split_off(train);
    tasks.sort_unstable();
    let mut test = test;
    test.sort_unstable();
    (tasks, test)
}

/// Runs the split protocol: per split, pick each method's hyperparameters
/// by train success (first best in grid order wins) and score the test tasks.
pub fn run_experiment(
    items: &[EvalItem],
    methods: &[MethodName],
    params: &EvalParams,
    defaults: Hyper,
) -> Result<ExperimentReport, EvalError> {
    let task_indices: Vec<usize> = items.iter().map(|i| i.task_index).collect();
    let n_tasks = {
        let mut t = task_indices.clone();
        t.sort_unstable();
        t.dedup();
        t.len()
    };
    if n_tasks < 2 {
        return Err(EvalError::TooFewTasks(n_tasks));
    }

    // every candidate's prediction for every demo, computed once
    let mut preds: BTreeMap<(MethodName, usize), Vec<Goal>> = BTreeMap::new();
    for &m in methods {
        for (ci, h) in candidates(m, params, defaults).into_iter().enumerate() {
            let goals = items.iter().map(|it| predict(it, m, h)).collect::<Result<Vec<_>, _>>()?;
            preds.insert((m, ci), goals);
        }
    }

    let mut rows = Vec::new();
    for k in 0..params.n_splits {
        let (train, test) = split_tasks(&task_indices, params.train_tasks, params.split_seed, k);
        let in_set = |set: &[usize]| -> Vec<usize> {
            (0..items.len())
                .filter(|&i| set.binary_search(&items[i].task_index).is_ok())
                .collect()
        };
        let (train_ix, test_ix) = (in_set(&train), in_set(&test));
        for &m in methods {
            let cands = candidates(m, params, defaults);
            let mut best = (0usize, -1.0f64);
            for ci in 0..cands.len() {
                let goals = &preds[&(m, ci)];
                let pairs: Vec<_> = train_ix.iter().map(|&i| (&goals[i], &items[i])).collect();
                let (_, _, rate) = metrics(&pairs);
                if rate > best.1 {
                    best = (ci, rate);
                }
            }
            let goals = &preds[&(m, best.0)];
            let pairs: Vec<_> = test_ix.iter().map(|&i| (&goals[i], &items[i])).collect();
            rows.push(row(m, Some(k), &pairs, Some(cands[best.0])));
        }
    }

    let means = methods
        .iter()
        .map(|&m| {
            let mine: Vec<&MetricsRow> = rows.iter().filter(|r| r.method == m.as_str()).collect();
            let n = mine.len().max(1) as f64;
            let mean = |f: fn(&MetricsRow) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / n;
            MetricsRow {
                method: m.as_str().to_string(),
                split: None,
                precision: mean(|r| r.precision),
                recall: mean(|r| r.recall),
                f1: mean(|r| r.f1),
                f1_blk: mean(|r| r.f1_blk),
                success_rate: mean(|r| r.success_rate),
                hyper: None,
            }
        })
        .collect();
    Ok(ExperimentReport {
        averaging: "micro-averaged over demos within a split; mean over splits".into(),
        n_splits: params.n_splits,
        rows,
        means,
    })
}

impl ExperimentReport {
    pub fn mean(&self, method: MethodName) -> Option<&MetricsRow> {
        self.means.iter().find(|r| r.method == method.as_str())
    }

    /// Aligned table of the per-method means.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# {} splits; precision/recall/F1 {}",
            self.n_splits, self.averaging
        );
        let _ = writeln!(
            s,
            "{:<12} {:>7} {:>7} {:>7} {:>7} {:>7}",
            "method", "prec", "recall", "f1", "f1_blk", "succ"
        );
        for r in &self.means {
            let _ = writeln!(
                s,
                "{:<12} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
                r.method, r.precision, r.recall, r.f1, r.f1_blk, r.success_rate
            );
        }
        s
    }
}
