//! Deterministic churn engine: per-step failure injection, healing, joins
//! and metric collection.
//!
//! Every run derives four independent ChaCha sub-streams from
//! `(base_seed, run_index)` — topology, churn (victim and joiner picks),
//! healing, and join wiring — so changing the protocol never perturbs the
//! victim sequence of a random-failure scenario.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::analysis::{self, MetricsRow};
use crate::graph::{GraphError, NodeId, OverlayGraph};
use crate::protocol::{self, FailureSnapshot, HealReport, NodeTargets, ProtocolConfig};
use crate::topology::{self, TopologyError, TopologyMeta, TopologySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioMode {
    /// Random failures balanced by joins.
    Evolution,
    /// Highest-degree victim each step (inter-cluster degree on clustered
    /// topologies), balanced by joins.
    TargetedDegree,
    /// Highest-betweenness victim each step, balanced by joins.
    TargetedBetweenness,
    /// Random failures with no joins, until the overlay empties.
    FailuresOnly,
}

impl fmt::Display for ScenarioMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioMode::Evolution => "evolution",
            ScenarioMode::TargetedDegree => "targeted-degree",
            ScenarioMode::TargetedBetweenness => "targeted-betweenness",
            ScenarioMode::FailuresOnly => "failures-only",
        };
        f.write_str(s)
    }
}

impl FromStr for ScenarioMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "evolution" => Ok(ScenarioMode::Evolution),
            "targeted-degree" => Ok(ScenarioMode::TargetedDegree),
            "targeted-betweenness" => Ok(ScenarioMode::TargetedBetweenness),
            "failures-only" => Ok(ScenarioMode::FailuresOnly),
            other => Err(format!(
                "unknown mode `{other}` (expected evolution, targeted-degree, \
                 targeted-betweenness or failures-only)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub mode: ScenarioMode,
    pub steps: u32,
    pub fails_per_step: u32,
    pub joins_per_step: u32,
    pub runs: u32,
    pub base_seed: u64,
}

impl ScenarioSpec {
    /// Builds a spec with the join rate implied by the mode: joins match
    /// fails except under `FailuresOnly`, where nothing joins.
    pub fn new(mode: ScenarioMode, steps: u32, fails_per_step: u32, runs: u32, base_seed: u64) -> Self {
        let joins_per_step = match mode {
            ScenarioMode::FailuresOnly => 0,
            _ => fails_per_step,
        };
        ScenarioSpec {
            mode,
            steps,
            fails_per_step,
            joins_per_step,
            runs,
            base_seed,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.fails_per_step == 0 {
            return Err(EngineError::InvalidScenario(
                "fails_per_step must be at least 1".into(),
            ));
        }
        if self.runs == 0 {
            return Err(EngineError::InvalidScenario("runs must be at least 1".into()));
        }
        match self.mode {
            ScenarioMode::FailuresOnly => {
                if self.joins_per_step != 0 {
                    return Err(EngineError::InvalidScenario(
                        "failures-only scenarios cannot have joins".into(),
                    ));
                }
            }
            _ => {
                if self.joins_per_step != self.fails_per_step {
                    return Err(EngineError::InvalidScenario(
                        "joins_per_step must equal fails_per_step".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("no active nodes remain")]
    NoActiveNodes,
}

/// Aggregated healing counters for one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HealTotals {
    pub links_created: usize,
    pub refused: usize,
    pub skipped: usize,
    pub gate_draws: usize,
    pub gate_passes: usize,
}

impl HealTotals {
    fn absorb(&mut self, report: &HealReport) {
        self.links_created += report.links_created;
        self.refused += report.refused;
        self.skipped += report.skipped;
        self.gate_draws += report.gate_results.len();
        self.gate_passes += report.gate_results.iter().filter(|(_, p)| *p).count();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run_index: u32,
    /// Baseline row (step 0) followed by one row per executed step.
    pub rows: Vec<MetricsRow>,
    pub victims: Vec<NodeId>,
    pub heal_totals: HealTotals,
    pub final_graph: OverlayGraph,
}

pub enum StepOutcome {
    Row(MetricsRow),
    Finished,
}

const STREAM_TOPOLOGY: u64 = 0;
const STREAM_CHURN: u64 = 1;
const STREAM_HEAL: u64 = 2;
const STREAM_JOIN: u64 = 3;
const STREAMS_PER_RUN: u64 = 4;

fn substream(base_seed: u64, run_index: u32, purpose: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
    rng.set_stream(run_index as u64 * STREAMS_PER_RUN + purpose);
    rng
}

/// Picks the next victim under `mode`; `None` when nothing is active.
/// Targeted modes break ties toward the smallest node id and consume no
/// randomness.
pub fn select_victim<R: Rng>(
    g: &OverlayGraph,
    meta: &TopologyMeta,
    mode: ScenarioMode,
    rng: &mut R,
) -> Option<NodeId> {
    if g.active_count() == 0 {
        return None;
    }
    match mode {
        ScenarioMode::Evolution | ScenarioMode::FailuresOnly => {
            let pool: Vec<NodeId> = g.active_nodes().collect();
            Some(pool[rng.random_range(0..pool.len())])
        }
        ScenarioMode::TargetedDegree => {
            let mut best: Option<(usize, NodeId)> = None;
            for n in g.active_nodes() {
                let score = match &meta.cluster_of {
                    Some(cluster_of) => analysis::inter_cluster_degree(g, cluster_of, n),
                    None => g.degree(n),
                };
                if best.map(|(s, _)| score > s).unwrap_or(true) {
                    best = Some((score, n));
                }
            }
            best.map(|(_, n)| n)
        }
        ScenarioMode::TargetedBetweenness => {
            let scores = analysis::betweenness(g);
            let mut best: Option<(f64, NodeId)> = None;
            for (n, score) in scores {
                if best.map(|(s, _)| score > s).unwrap_or(true) {
                    best = Some((score, n));
                }
            }
            best.map(|(_, n)| n)
        }
    }
}

/// One simulated overlay under churn.
pub struct Simulation {
    graph: OverlayGraph,
    meta: TopologyMeta,
    spec: TopologySpec,
    protocol: ProtocolConfig,
    scenario: ScenarioSpec,
    churn_rng: ChaCha12Rng,
    heal_rng: ChaCha12Rng,
    join_rng: ChaCha12Rng,
    initial_degrees: BTreeMap<NodeId, usize>,
    targets: BTreeMap<NodeId, NodeTargets>,
    step_index: u32,
    victims: Vec<NodeId>,
    heal_totals: HealTotals,
}

impl Simulation {
    pub fn new(
        spec: TopologySpec,
        protocol: ProtocolConfig,
        scenario: ScenarioSpec,
        run_index: u32,
    ) -> Result<Self, EngineError> {
        scenario.validate()?;
        let mut topo_rng = substream(scenario.base_seed, run_index, STREAM_TOPOLOGY);
        let (graph, meta) = topology::generate(&spec, &mut topo_rng)?;
        let initial_degrees = graph.active_nodes().map(|n| (n, graph.degree(n))).collect();
        Ok(Simulation {
            graph,
            meta,
            spec,
            protocol,
            churn_rng: substream(scenario.base_seed, run_index, STREAM_CHURN),
            heal_rng: substream(scenario.base_seed, run_index, STREAM_HEAL),
            join_rng: substream(scenario.base_seed, run_index, STREAM_JOIN),
            scenario,
            initial_degrees,
            targets: BTreeMap::new(),
            step_index: 0,
            victims: Vec::new(),
            heal_totals: HealTotals::default(),
        })
    }

    pub fn graph(&self) -> &OverlayGraph {
        &self.graph
    }

    pub fn victims(&self) -> &[NodeId] {
        &self.victims
    }

    pub fn heal_totals(&self) -> &HealTotals {
        &self.heal_totals
    }

    /// Metrics of the untouched topology (step 0).
    pub fn baseline_row(&self) -> MetricsRow {
        analysis::collect_metrics(&self.graph, &self.initial_degrees, 0)
    }

    /// Executes one step: failures (each healed before the next victim is
    /// drawn), then joins, then the periodic link-reduction pass.
    pub fn step(&mut self) -> Result<StepOutcome, EngineError> {
        if self.graph.active_count() == 0 {
            return match self.scenario.mode {
                ScenarioMode::FailuresOnly => Ok(StepOutcome::Finished),
                _ => Err(EngineError::NoActiveNodes),
            };
        }
        self.step_index += 1;

        for _ in 0..self.scenario.fails_per_step {
            let Some(victim) =
                select_victim(&self.graph, &self.meta, self.scenario.mode, &mut self.churn_rng)
            else {
                if self.scenario.mode == ScenarioMode::FailuresOnly {
                    break;
                }
                return Err(EngineError::NoActiveNodes);
            };
            let snapshot = FailureSnapshot::capture(&self.graph, victim)?;
            self.graph.fail_node(victim)?;
            self.victims.push(victim);
            self.initial_degrees.remove(&victim);
            self.targets.remove(&victim);
            let report =
                protocol::heal_failure(&mut self.graph, &snapshot, &self.protocol, &mut self.heal_rng)?;
            self.heal_totals.absorb(&report);
        }

        for _ in 0..self.scenario.joins_per_step {
            let pool: Vec<NodeId> = self.graph.inactive_nodes().collect();
            if pool.is_empty() {
                break;
            }
            let joiner = pool[self.churn_rng.random_range(0..pool.len())];
            self.graph.activate_node(joiner)?;
            topology::join(
                &mut self.graph,
                &mut self.meta,
                &self.spec,
                joiner,
                &mut self.join_rng,
            )?;
            self.initial_degrees
                .insert(joiner, self.graph.degree(joiner));
        }

        if self.protocol.link_reduction && self.step_index % self.protocol.check_period == 0 {
            let nodes: Vec<NodeId> = self.graph.active_nodes().collect();
            for n in nodes {
                let entry = self
                    .targets
                    .entry(n)
                    .or_insert_with(|| NodeTargets::new(self.protocol.target_window));
                protocol::update_targets(&self.graph, n, entry);
                protocol::periodic_link_reduction(
                    &mut self.graph,
                    n,
                    &self.targets[&n],
                    &self.protocol,
                )?;
            }
        }

        Ok(StepOutcome::Row(analysis::collect_metrics(
            &self.graph,
            &self.initial_degrees,
            self.step_index,
        )))
    }
}

/// Runs one complete simulation for `run_index` of the batch.
pub fn run_single(
    spec: &TopologySpec,
    protocol: &ProtocolConfig,
    scenario: &ScenarioSpec,
    run_index: u32,
) -> Result<RunResult, EngineError> {
    let mut sim = Simulation::new(spec.clone(), protocol.clone(), scenario.clone(), run_index)?;
    let mut rows = Vec::with_capacity(scenario.steps as usize + 1);
    rows.push(sim.baseline_row());
    for _ in 1..=scenario.steps {
        match sim.step()? {
            StepOutcome::Row(row) => rows.push(row),
            StepOutcome::Finished => break,
        }
    }
    Ok(RunResult {
        run_index,
        rows,
        victims: sim.victims,
        heal_totals: sim.heal_totals,
        final_graph: sim.graph,
    })
}
