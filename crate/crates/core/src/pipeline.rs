//! The complete merge-driven clustering procedure and the static
//! FCM + Xie-Beni baseline.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{gfc_fit, EngineConfig, MembershipMatrix};
use crate::error::{Error, Result};
use crate::linalg::DataMatrix;
use crate::merging::{
    cluster_dispersions, fuzzy_db_index, merge_pass, similarity_matrix, ClusterModel, MergeEvent,
    MergePolicy, SimilarityMatrix,
};
use crate::validity::xie_beni;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfcSdConfig {
    /// Initial, deliberately overspecified cluster count.
    pub c_max: usize,
    pub engine: EngineConfig,
    pub policy: MergePolicy,
}

impl Default for GfcSdConfig {
    fn default() -> Self {
        Self {
            c_max: 20,
            engine: EngineConfig::default(),
            policy: MergePolicy::default(),
        }
    }
}

impl GfcSdConfig {
    pub fn validate(&self, points: usize) -> Result<()> {
        if self.c_max < 2 || self.c_max >= points {
            return Err(Error::param(format!(
                "c_max must satisfy 2 <= c_max < N = {points}, got {}",
                self.c_max
            )));
        }
        self.engine.validate()?;
        self.policy.validate()
    }
}

/// Diagnostics of one fit-then-merge epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Cluster count that was fitted in this epoch.
    pub c: usize,
    /// Fuzzy DB index of the fitted partition; absent for a single cluster.
    #[serde(with = "crate::report::opt_float_ext")]
    pub db_fr: Option<f64>,
    pub objective: f64,
    pub ranks: Vec<usize>,
    pub fit_iterations: usize,
    pub fit_converged: bool,
    /// Effective merge threshold of the pass that ended the epoch.
    pub threshold: Option<f64>,
    pub events: Vec<MergeEvent>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeTrace {
    pub iterations: Vec<TraceEntry>,
}

impl MergeTrace {
    pub fn c_sequence(&self) -> Vec<usize> {
        self.iterations.iter().map(|e| e.c).collect()
    }

    /// Cluster count with the smallest fuzzy DB index over the trace.
    pub fn db_fr_minimizing_c(&self) -> Option<usize> {
        self.iterations
            .iter()
            .filter_map(|e| e.db_fr.map(|d| (e.c, d)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(c, _)| c)
    }

    pub fn total_events(&self) -> usize {
        self.iterations.iter().map(|e| e.events.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfcSdResult {
    pub model: ClusterModel,
    pub memberships: MembershipMatrix,
    pub trace: MergeTrace,
    /// Similarity table of the final partition (absent when c = 1).
    pub similarity: Option<SimilarityMatrix>,
    /// Annealing step reached when merging stopped.
    pub anneal_step: usize,
}

impl GfcSdResult {
    pub fn clusters(&self) -> usize {
        self.model.clusters()
    }
}

/// Fits with `c_max` clusters from a seeded random partition, then
/// alternates merging and warm-started refitting until a merging pass
/// changes nothing.
///
/// The annealing step `t` advances once per epoch. When no pair clears the
/// current threshold but some similarity still exceeds `tau1`, `t` keeps
/// advancing without refitting until a pair qualifies; merging stops only
/// once every similarity is at or below `tau1`, or a single cluster is
/// left.
pub fn gfc_sd(x: &DataMatrix, config: &GfcSdConfig, seed: u64) -> Result<GfcSdResult> {
    config.validate(x.rows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = MembershipMatrix::random(config.c_max, x.rows(), &mut rng)?;
    gfc_sd_from(x, u0, config)
}

/// As [`gfc_sd`], starting from a given partition.
pub fn gfc_sd_from(
    x: &DataMatrix,
    u0: MembershipMatrix,
    config: &GfcSdConfig,
) -> Result<GfcSdResult> {
    config.engine.validate()?;
    config.policy.validate()?;
    let m = config.engine.m;
    let policy = &config.policy;
    let mut u = u0;
    let mut trace = MergeTrace::default();
    let mut t = 0usize;

    for epoch in 0..policy.max_outer_iters {
        let started = Instant::now();
        let tag = |e: Error| Error::Epoch {
            epoch,
            source: Box::new(e),
        };
        let fit = gfc_fit(x, &u, &config.engine).map_err(tag)?;
        let dispersions =
            cluster_dispersions(x, &fit.memberships, &fit.prototypes, m, policy.dispersion)
                .map_err(tag)?;
        let model = ClusterModel {
            prototypes: fit.prototypes.clone(),
            axes: fit.axes.clone(),
            dispersions,
        };
        let mut entry = TraceEntry {
            iteration: epoch,
            c: model.clusters(),
            db_fr: None,
            objective: fit.objective.last().copied().unwrap_or(0.0),
            ranks: fit.ranks(),
            fit_iterations: fit.iterations,
            fit_converged: fit.converged,
            threshold: None,
            events: Vec::new(),
            elapsed_ms: 0.0,
        };

        if model.clusters() < 2 {
            entry.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            trace.iterations.push(entry);
            return Ok(GfcSdResult {
                model,
                memberships: fit.memberships,
                trace,
                similarity: None,
                anneal_step: t,
            });
        }

        let fr =
            similarity_matrix(&model, x, &fit.memberships, m, policy.dispersion).map_err(tag)?;
        entry.db_fr = Some(fuzzy_db_index(&fr).map_err(tag)?);
        let mergeable = fr.max_off_diagonal() > policy.tau1;
        let outcome = loop {
            let outcome =
                merge_pass(x, &model, &fit.memberships, &fr, policy, m, t).map_err(tag)?;
            if !outcome.events.is_empty() || !mergeable || policy.threshold(t) <= policy.tau1 {
                break outcome;
            }
            t += 1;
        };
        entry.threshold = Some(policy.threshold(t));
        entry.events = outcome
            .events
            .into_iter()
            .map(|e| MergeEvent {
                iteration: epoch,
                ..e
            })
            .collect();
        entry.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        let done = entry.events.is_empty();
        trace.iterations.push(entry);

        if done {
            return Ok(GfcSdResult {
                model,
                memberships: fit.memberships,
                trace,
                similarity: Some(fr),
                anneal_step: t,
            });
        }
        u = outcome.memberships;
        t += 1;
    }
    Err(Error::OuterIterationLimit(Box::new(trace)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: usize,
    #[serde(with = "crate::report::float_ext")]
    pub xie_beni: f64,
    pub fit_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best_c: usize,
    pub curve: Vec<SweepPoint>,
}

/// Static validation: plain fuzzy c-means (g = 0, no merging) for every
/// `c` in `[c_min, c_max]`, scored by the Xie-Beni index. With
/// `restarts > 1` the best of several random starts is kept per `c`.
///
/// All starts draw from one generator seeded with `seed`, in increasing
/// order of `c`.
pub fn fcm_xie_sweep(
    x: &DataMatrix,
    c_min: usize,
    c_max: usize,
    engine: &EngineConfig,
    seed: u64,
    restarts: usize,
) -> Result<SweepResult> {
    if c_min < 2 || c_min > c_max || c_max >= x.rows() {
        return Err(Error::param(format!(
            "sweep range must satisfy 2 <= c_min <= c_max < N = {}, got [{c_min}, {c_max}]",
            x.rows()
        )));
    }
    if restarts == 0 {
        return Err(Error::param("restarts must be positive"));
    }
    let fcm = EngineConfig {
        g: 0.0,
        ..engine.clone()
    };
    fcm.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = Vec::with_capacity(c_max - c_min + 1);
    for c in c_min..=c_max {
        let tag = |e: Error| Error::Sweep {
            c,
            source: Box::new(e),
        };
        let mut best: Option<SweepPoint> = None;
        for _ in 0..restarts {
            let u0 = MembershipMatrix::random(c, x.rows(), &mut rng).map_err(tag)?;
            let fit = gfc_fit(x, &u0, &fcm).map_err(tag)?;
            let s = xie_beni(x, &fit.memberships, &fit.prototypes).map_err(tag)?;
            if best.as_ref().is_none_or(|b| s < b.xie_beni) {
                best = Some(SweepPoint {
                    c,
                    xie_beni: s,
                    fit_iterations: fit.iterations,
                });
            }
        }
        curve.extend(best);
    }
    let best_c = curve
        .iter()
        .min_by(|a, b| a.xie_beni.total_cmp(&b.xie_beni).then(a.c.cmp(&b.c)))
        .map(|p| p.c)
        .expect("non-empty sweep range");
    Ok(SweepResult { best_c, curve })
}
