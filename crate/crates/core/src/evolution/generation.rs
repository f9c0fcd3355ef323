//! Fitness evaluation and one breeder-model generation.

use log::{debug, warn};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::env::episode::random_heading;
use crate::env::{episode_units, mean_return, run_episode, spawn, AgentPose, EnvConfig, LabyrinthMap};
use crate::rng::{stream, TAG_EVAL, TAG_VARIATION};
use crate::tpg::{Ensemble, EnsembleId, GraphPolicy, LearnerId, ProgramGraph};
use crate::{Error, Result, Scalar};

use super::params::{EvolutionParams, Phase};
use super::population::Populations;
use super::variation::{clone_with_new_context, crossover_ensembles, mutate_learner};

/// Retries of the full variation pipeline before falling back to a
/// minimally varied clone of the parent.
pub const VARIATION_RETRIES: usize = 16;

/// Everything a generation needs besides the populations.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub map: LabyrinthMap,
    pub env: EnvConfig,
    pub params: EvolutionParams,
    pub seed: u64,
}

impl Experiment {
    pub fn new(map: LabyrinthMap, env: EnvConfig, params: EvolutionParams, seed: u64) -> Result<Self> {
        params.validate()?;
        map.validate()?;
        if env.camera.width == 0 || env.camera.height == 0 {
            return Err(Error::Config("resolution must be positive".into()));
        }
        if env.episode_cap == 0 {
            return Err(Error::Config("episode_cap must be at least 1".into()));
        }
        Ok(Experiment { map, env, params, seed })
    }
}

/// Mean return of `root` over one episode per start pose.
pub fn evaluate_agent<T: Scalar>(
    graph: &ProgramGraph,
    root: EnsembleId,
    map: &LabyrinthMap,
    env: &EnvConfig,
    starts: &[AgentPose],
) -> Result<f64> {
    let mut policy = GraphPolicy::new(graph, root)?;
    let mut units = Vec::with_capacity(starts.len());
    for &start in starts {
        let out = run_episode::<T, _>(map, env, start, &mut policy, false)?;
        units.push(episode_units(out.reached_goal, out.steps));
    }
    Ok(mean_return(&units))
}

/// Training spawns for one agent in one generation. Each episode has its own
/// stream so results do not depend on evaluation order or thread count.
pub fn training_starts(
    map: &LabyrinthMap,
    seed: u64,
    generation: u32,
    root: EnsembleId,
    evaluations: u32,
) -> Result<Vec<AgentPose>> {
    (0..evaluations)
        .map(|k| spawn(map, &mut stream(seed, &[TAG_EVAL, generation as u64, root.0, k as u64])))
        .collect()
}

/// Start poses at every spawn-region centre with `orientations` headings each.
pub fn region_starts<R: Rng + ?Sized>(map: &LabyrinthMap, orientations: u32, rng: &mut R) -> Vec<AgentPose> {
    let mut out = Vec::new();
    for region in map.spawn_regions() {
        for _ in 0..orientations {
            out.push(AgentPose::new(region.centre.0, region.centre.1, random_heading(rng)));
        }
    }
    out
}

/// Evaluates each root on its own starts, in parallel.
pub fn evaluate_roots<T: Scalar>(
    graph: &ProgramGraph,
    roots: &[EnsembleId],
    exp: &Experiment,
    starts_for: impl Fn(EnsembleId) -> Result<Vec<AgentPose>> + Sync,
) -> Result<Vec<(EnsembleId, f64)>> {
    roots
        .par_iter()
        .map(|&r| {
            let starts = starts_for(r)?;
            Ok((r, evaluate_agent::<T>(graph, r, &exp.map, &exp.env, &starts)?))
        })
        .collect()
}

/// Summary of one generation, as written to the run log.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: u32,
    pub best: f64,
    pub mean: f64,
    pub median: f64,
    pub roots: usize,
    pub mean_graph_size: f64,
    pub fallbacks: usize,
}

impl GenerationStats {
    pub const CSV_HEADER: &'static str = "generation,best,mean,median,roots,mean_graph_size";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{},{:.4}",
            self.generation, self.best, self.mean, self.median, self.roots, self.mean_graph_size
        )
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Roots ordered best first; ties keep the lower id ahead.
pub fn rank(scores: &[(EnsembleId, f64)]) -> Vec<EnsembleId> {
    let mut s = scores.to_vec();
    s.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    s.into_iter().map(|(e, _)| e).collect()
}

/// Evaluates, ranks and deletes the worst roots, then breeds offspring from
/// uniformly chosen survivors until the root count is back to `pop_size`.
pub fn run_generation<T: Scalar>(pops: &mut Populations, exp: &Experiment) -> Result<GenerationStats> {
    let params = &exp.params;
    let generation = pops.generation + 1;
    let phase = params.phase(generation);

    let roots = pops.roots();
    let scores = evaluate_roots::<T>(&pops.graph, &roots, exp, |r| {
        training_starts(&exp.map, exp.seed, generation, r, params.evaluations)
    })?;
    let values: Vec<f64> = scores.iter().map(|s| s.1).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let med = median(&values);
    pops.fitness = scores.iter().copied().collect();

    let ranked = rank(&scores);
    let cut = (roots.len() as f64 * params.gap).round() as usize;
    let doomed = &ranked[ranked.len() - cut..];
    pops.delete_roots(doomed);

    let mut rng = stream(exp.seed, &[TAG_VARIATION, generation as u64]);
    let parents = pops.roots();
    let targets: Vec<EnsembleId> = pops.graph.ensembles().map(|e| e.id).collect();
    if parents.is_empty() {
        return Err(Error::Illegal("no surviving roots to breed from".into()));
    }

    let mut fallbacks = 0;
    let mut attempts = 0;
    let limit = 100 * params.pop_size;
    while pops.roots().len() < params.pop_size {
        attempts += 2;
        if attempts > limit {
            return Err(Error::Illegal(format!(
                "root count stuck at {} after {limit} offspring",
                pops.roots().len()
            )));
        }
        let pa = *parents.choose(&mut rng).expect("non-empty");
        let pb = *parents.choose(&mut rng).expect("non-empty");
        let a = pops.graph.ensemble(pa)?.learners().to_vec();
        let b = pops.graph.ensemble(pb)?.learners().to_vec();
        let (ca, cb) = if params.crossover {
            crossover_ensembles(&a, &b, &pops.graph, params, &mut rng).unwrap_or((a.clone(), b.clone()))
        } else {
            (a.clone(), b.clone())
        };
        for (start, parent) in [(ca, &a), (cb, &b)] {
            if pops.roots().len() >= params.pop_size {
                break;
            }
            if !breed_one(pops, start, parent, &targets, params, phase, &mut rng)? {
                fallbacks += 1;
            }
        }
    }
    pops.graph.collect_garbage();
    pops.generation = generation;

    Ok(GenerationStats {
        generation,
        best,
        mean,
        median: med,
        roots: pops.roots().len(),
        mean_graph_size: pops.mean_graph_size()?,
        fallbacks,
    })
}

/// Inserts one offspring grown from `start`. Returns false when every retry
/// was illegal and the parent was re-cloned with only a context change.
fn breed_one<R: Rng + ?Sized>(
    pops: &mut Populations,
    start: Vec<LearnerId>,
    parent: &[LearnerId],
    targets: &[EnsembleId],
    params: &EvolutionParams,
    phase: Phase,
    rng: &mut R,
) -> Result<bool> {
    let pool: Vec<LearnerId> = pops.graph.learners().map(|l| l.id).collect();
    for _ in 0..VARIATION_RETRIES {
        let mut members = start.clone();
        if rng.gen_bool(params.p_delete_learner) && members.len() > params.min_team {
            let i = rng.gen_range(0..members.len());
            members.remove(i);
        }
        if rng.gen_bool(params.p_add_learner) && members.len() < params.max_team {
            let spare: Vec<LearnerId> = pool.iter().copied().filter(|l| !members.contains(l)).collect();
            if let Some(&l) = spare.choose(rng) {
                members.push(l);
            }
        }
        let i = rng.gen_range(0..members.len());
        let (child, _) = mutate_learner(pops, members[i], targets, params, phase, rng)?;
        members[i] = child;
        if try_insert(pops, members)? {
            return Ok(true);
        }
    }
    warn!("offspring of {parent:?} illegal after {VARIATION_RETRIES} tries; re-cloning parent");
    let mut members = parent.to_vec();
    let i = rng.gen_range(0..members.len());
    members[i] = clone_with_new_context(pops, members[i], params, rng)?;
    if try_insert(pops, members)? {
        Ok(false)
    } else {
        Err(Error::Illegal("re-cloned parent is not a legal ensemble".into()))
    }
}

fn try_insert(pops: &mut Populations, members: Vec<LearnerId>) -> Result<bool> {
    let candidate = Ensemble::new(EnsembleId(0), members);
    if pops.graph.check_ensemble(&candidate).is_err() || pops.graph.has_complement(candidate.learners(), None) {
        debug!("rejected offspring {:?}", candidate.learners());
        return Ok(false);
    }
    let e = Ensemble::new(pops.fresh_ensemble_id(), candidate.learners().to_vec());
    pops.graph.insert_ensemble(e);
    Ok(true)
}
