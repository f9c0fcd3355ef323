//! The per-region test protocol: 100 centre spawns with random headings in
//! each of the 17 spawn regions.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::env::episode::random_heading;
use crate::env::{
    episode_units, mean_return, run_episode, AgentPose, EnvConfig, EpisodeOutcome, LabyrinthMap, Policy, RegionLabel,
};
use crate::rng::{derive_seed, stream, TAG_PATHS, TAG_TEST};
use crate::{Result, Scalar};

pub const EPISODES_PER_REGION: u32 = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub region: RegionLabel,
    pub episode: u32,
    /// Seed of the stream that drew the start heading.
    pub seed: u64,
    pub heading: f64,
    pub episode_return: f64,
    pub steps: u32,
    pub reached_goal: bool,
}

impl EpisodeRecord {
    fn units(&self) -> i64 {
        episode_units(self.reached_goal, self.steps)
    }
}

/// Five-number summary, interpolating between order statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Quartiles {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Linear interpolation between closest ranks of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoomTestReport {
    /// Records grouped by region in map order, episodes in order within each.
    pub records: Vec<EpisodeRecord>,
}

impl RoomTestReport {
    pub fn regions(&self) -> Vec<RegionLabel> {
        let mut out: Vec<RegionLabel> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.region) {
                out.push(r.region);
            }
        }
        out
    }

    pub fn returns(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.episode_return).collect()
    }

    pub fn region_returns(&self, region: RegionLabel) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.region == region)
            .map(|r| r.episode_return)
            .collect()
    }

    pub fn average(&self) -> f64 {
        let units: Vec<i64> = self.records.iter().map(EpisodeRecord::units).collect();
        mean_return(&units)
    }

    pub fn median(&self) -> f64 {
        Quartiles::of(&self.returns()).map_or(f64::NAN, |q| q.median)
    }

    pub fn best(&self) -> f64 {
        self.returns().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn worst(&self) -> f64 {
        self.returns().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn quartiles(&self, region: RegionLabel) -> Option<Quartiles> {
        Quartiles::of(&self.region_returns(region))
    }

    pub fn success_count(&self, region: RegionLabel) -> usize {
        self.records.iter().filter(|r| r.region == region && r.reached_goal).count()
    }

    pub const CSV_HEADER: &'static str = "region_id,episode,seed,return,steps,reached_goal";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{},{}",
                r.region, r.episode, r.seed, r.episode_return, r.steps, r.reached_goal
            );
        }
        out
    }

    pub fn quartiles_csv(&self) -> String {
        let mut out = String::from("region_id,min,q1,median,q3,max,mean,successes\n");
        for region in self.regions() {
            let q = self.quartiles(region).expect("region has records");
            let units: Vec<i64> = self
                .records
                .iter()
                .filter(|r| r.region == region)
                .map(EpisodeRecord::units)
                .collect();
            let _ = writeln!(
                out,
                "{region},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
                q.min,
                q.q1,
                q.median,
                q.q3,
                q.max,
                mean_return(&units),
                self.success_count(region)
            );
        }
        out
    }

    /// Average, median, best and worst over every episode.
    pub fn summary_table(&self) -> String {
        format!(
            "{:<8} {:>8} {:>8} {:>8} {:>8}\n{:<8} {:>8.3} {:>8.3} {:>8.3} {:>8.3}\n",
            "agent",
            "average",
            "median",
            "best",
            "worst",
            "TPG",
            self.average(),
            self.median(),
            self.best(),
            self.worst()
        )
    }
}

/// Start pose and heading seed of one protocol episode.
pub fn protocol_start(map: &LabyrinthMap, master: u64, region: RegionLabel, episode: u32) -> Result<(AgentPose, u64)> {
    region_start(map, master, TAG_TEST, region, episode)
}

/// Centre of `region` facing a heading drawn from the `(tag, region, episode)` stream.
pub fn region_start(map: &LabyrinthMap, master: u64, tag: u64, region: RegionLabel, episode: u32) -> Result<(AgentPose, u64)> {
    let tags = [tag, region as u64, episode as u64];
    let r = map.spawn_region(region)?;
    let heading = random_heading(&mut stream(master, &tags));
    Ok((AgentPose::new(r.centre.0, r.centre.1, heading), derive_seed(master, &tags)))
}

/// Runs `episodes` episodes from the centre of every spawn region. Policies
/// come from `make_policy` so each worker owns one.
pub fn run_test_protocol<T, P, F>(
    map: &LabyrinthMap,
    env: &EnvConfig,
    master: u64,
    episodes: u32,
    make_policy: F,
) -> Result<RoomTestReport>
where
    T: Scalar,
    P: Policy<T>,
    F: Fn() -> Result<P> + Sync,
{
    let jobs: Vec<(RegionLabel, u32)> = map
        .spawn_labels()
        .into_iter()
        .flat_map(|r| (0..episodes).map(move |e| (r, e)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(region, episode)| {
            let (start, seed) = protocol_start(map, master, region, episode)?;
            let mut policy = make_policy()?;
            let out = run_episode::<T, _>(map, env, start, &mut policy, false)?;
            Ok(EpisodeRecord {
                region,
                episode,
                seed,
                heading: start.heading,
                episode_return: out.episode_return,
                steps: out.steps,
                reached_goal: out.reached_goal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RoomTestReport { records })
}

/// Recorded episodes from the centre of one region, for path plots.
pub fn record_region_paths<T, P, F>(
    map: &LabyrinthMap,
    env: &EnvConfig,
    master: u64,
    region: RegionLabel,
    episodes: u32,
    make_policy: F,
) -> Result<Vec<EpisodeOutcome>>
where
    T: Scalar,
    P: Policy<T>,
    F: Fn() -> Result<P> + Sync,
{
    (0..episodes)
        .into_par_iter()
        .map(|e| {
            let (start, _) = region_start(map, master, TAG_PATHS, region, e)?;
            let mut policy = make_policy()?;
            run_episode::<T, _>(map, env, start, &mut policy, true)
        })
        .collect()
}
