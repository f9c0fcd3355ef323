//! Two-phase training with a run log, periodic checkpoints and resume.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use log::info;

use crate::rng::{stream, TAG_INIT};
use crate::tpg::Champion;
use crate::{Error, Result, Scalar};

use super::champion::select_champion;
use super::generation::{run_generation, Experiment, GenerationStats};
use super::population::Populations;

pub const RUN_LOG: &str = "run_log.csv";
pub const CHAMPION_FILE: &str = "champion.tpg";
pub const CHECKPOINT_FILE: &str = "checkpoint.tpg";

pub struct Trainer {
    pub experiment: Experiment,
    pub populations: Populations,
}

impl Trainer {
    pub fn new(experiment: Experiment) -> Result<Self> {
        let populations = Populations::init(
            &experiment.params,
            experiment.env.state_dim(),
            &mut stream(experiment.seed, &[TAG_INIT]),
        )?;
        Ok(Trainer { experiment, populations })
    }

    /// Continues from a checkpoint written by the same seed and resolution.
    pub fn resume(experiment: Experiment, checkpoint: &str) -> Result<Self> {
        let (seed, populations) = Populations::from_checkpoint(checkpoint)?;
        if seed != experiment.seed {
            return Err(Error::Config(format!(
                "checkpoint was written with seed {seed}, config has {}",
                experiment.seed
            )));
        }
        if populations.graph.config.state_dim != experiment.env.state_dim() {
            return Err(Error::StateDimMismatch {
                expected: experiment.env.state_dim(),
                found: populations.graph.config.state_dim,
            });
        }
        Ok(Trainer { experiment, populations })
    }

    pub fn is_finished(&self) -> bool {
        self.populations.generation >= self.experiment.params.total_generations()
    }

    pub fn step<T: Scalar>(&mut self) -> Result<GenerationStats> {
        let stats = run_generation::<T>(&mut self.populations, &self.experiment)?;
        info!(
            "generation {} best {:.4} mean {:.4} median {:.4} graph {:.2}",
            stats.generation, stats.best, stats.mean, stats.median, stats.mean_graph_size
        );
        Ok(stats)
    }

    pub fn champion<T: Scalar>(&self) -> Result<(Champion, f64)> {
        select_champion::<T>(&self.populations, &self.experiment)
    }

    /// Runs the remaining generations, appending to `out/run_log.csv` and
    /// rewriting `out/checkpoint.tpg` every `checkpoint_every` generations
    /// (never when zero), then writes `out/champion.tpg`.
    pub fn run_to_dir<T: Scalar>(&mut self, out: &Path, checkpoint_every: u32) -> Result<(Champion, f64)> {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let log_path = out.join(RUN_LOG);
        let mut log = open_log(&log_path, self.populations.generation)?;
        while !self.is_finished() {
            let stats = self.step::<T>()?;
            writeln!(log, "{}", stats.csv_row()).map_err(|e| Error::io(&log_path, e))?;
            if checkpoint_every > 0 && stats.generation % checkpoint_every == 0 {
                log.flush().map_err(|e| Error::io(&log_path, e))?;
                write_atomic(&out.join(CHECKPOINT_FILE), &self.populations.to_checkpoint(self.experiment.seed))?;
            }
        }
        log.flush().map_err(|e| Error::io(&log_path, e))?;
        let (champion, score) = self.champion::<T>()?;
        write_atomic(&out.join(CHAMPION_FILE), &champion.to_text())?;
        Ok((champion, score))
    }
}

/// Opens the run log for appending. A fresh run truncates it; a resumed run
/// drops rows beyond the checkpoint generation so the log stays consistent.
fn open_log(path: &Path, generation: u32) -> Result<fs::File> {
    let mut keep = vec![GenerationStats::CSV_HEADER.to_string()];
    if generation > 0 {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (i, line) in text.lines().enumerate().skip(1) {
            let g: u32 = line
                .split(',')
                .next()
                .and_then(|g| g.parse().ok())
                .ok_or_else(|| Error::parse(i + 1, format!("bad run log row '{line}'")))?;
            if g <= generation {
                keep.push(line.to_string());
            }
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for line in keep {
        writeln!(f, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(f)
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
