use std::collections::BTreeMap;

use crate::env::AgentPose;
use crate::rng::{stream, TAG_VALIDATION};
use crate::tpg::{Champion, EnsembleId};
use crate::{Error, Result, Scalar};

use super::generation::{evaluate_roots, rank, region_starts, Experiment};
use super::population::Populations;

/// Fixed start poses shared by every root during champion selection.
pub fn validation_starts(exp: &Experiment) -> Vec<AgentPose> {
    region_starts(
        &exp.map,
        exp.params.validation_orientations,
        &mut stream(exp.seed, &[TAG_VALIDATION]),
    )
}

/// Best-scoring root, the lowest id winning ties.
pub fn pick_best(scores: &[(EnsembleId, f64)]) -> Option<(EnsembleId, f64)> {
    let best = *rank(scores).first()?;
    scores.iter().copied().find(|s| s.0 == best)
}

/// Evaluates every root on the validation set and packages the winner's
/// subgraph with its provenance.
pub fn select_champion<T: Scalar>(pops: &Populations, exp: &Experiment) -> Result<(Champion, f64)> {
    let roots = pops.roots();
    let starts = validation_starts(exp);
    let scores = evaluate_roots::<T>(&pops.graph, &roots, exp, |_| Ok(starts.clone()))?;
    let (root, score) = pick_best(&scores).ok_or_else(|| Error::Illegal("population has no root".into()))?;

    let mut meta = BTreeMap::new();
    meta.insert("seed".to_string(), exp.seed.to_string());
    meta.insert("generation".to_string(), pops.generation.to_string());
    meta.insert("validation_fitness".to_string(), format!("{score:?}"));
    meta.insert("validation_episodes".to_string(), starts.len().to_string());
    meta.insert("resolution".to_string(), format!("{}x{}", exp.env.camera.width, exp.env.camera.height));
    meta.insert("episode_cap".to_string(), exp.env.episode_cap.to_string());
    for (k, v) in exp.params.to_pairs() {
        meta.insert(format!("param.{k}"), v);
    }
    Ok((Champion::from_population(&pops.graph, root, meta)?, score))
}
