use std::path::{Path, PathBuf};

use serde::Deserialize;
use tpg_nav::env::{Camera, EnvConfig, Kinematics, EPISODE_CAP};
use tpg_nav::evolution::EvolutionParams;
use tpg_nav::{Error, Result};

/// Every tunable of a run, as a flat TOML table. Missing keys take their
/// defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub checkpoint_every: u32,

    pub width: usize,
    pub height: usize,
    pub fov: f64,
    pub turn_delta: f64,
    pub move_step: f64,
    pub radius: f64,
    pub episode_cap: u32,

    pub generations_p1: u32,
    pub generations_p2: u32,
    pub pop_size: usize,
    pub gap: f64,
    pub mutate_count: u32,
    pub evaluations: u32,
    pub p_delete_learner: f64,
    pub p_add_learner: f64,
    pub max_instructions: usize,
    pub max_registers: usize,
    pub min_team: usize,
    pub max_team: usize,
    pub p_instr_add: f64,
    pub p_instr_delete: f64,
    pub p_instr_swap: f64,
    pub p_instr_point: f64,
    pub p_mn: f64,
    pub p_action_p2: f64,
    pub crossover: bool,
    pub validation_orientations: u32,

    pub test_episodes: u32,
    pub path_episodes: u32,
    pub probe_episodes: u32,
    /// Probe room side in world units; zero means the labyrinth's long side.
    pub probe_side: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = EvolutionParams::default();
        let cam = Camera::default();
        let kin = Kinematics::default();
        RunConfig {
            seed: 1,
            out_dir: PathBuf::from("out"),
            checkpoint_every: 25,
            width: cam.width,
            height: cam.height,
            fov: cam.fov,
            turn_delta: kin.turn_delta,
            move_step: kin.move_step,
            radius: kin.radius,
            episode_cap: EPISODE_CAP,
            generations_p1: p.generations_p1,
            generations_p2: p.generations_p2,
            pop_size: p.pop_size,
            gap: p.gap,
            mutate_count: p.mutate_count,
            evaluations: p.evaluations,
            p_delete_learner: p.p_delete_learner,
            p_add_learner: p.p_add_learner,
            max_instructions: p.max_instructions,
            max_registers: p.max_registers,
            min_team: p.min_team,
            max_team: p.max_team,
            p_instr_add: p.p_instr_add,
            p_instr_delete: p.p_instr_delete,
            p_instr_swap: p.p_instr_swap,
            p_instr_point: p.p_instr_point,
            p_mn: p.p_mn,
            p_action_p2: p.p_action_p2,
            crossover: p.crossover,
            validation_orientations: p.validation_orientations,
            test_episodes: 100,
            path_episodes: 100,
            probe_episodes: 20,
            probe_side: 0.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Error::parse(line, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("resolution must be positive".into()));
        }
        if self.episode_cap == 0 {
            return Err(Error::Config("episode_cap must be at least 1".into()));
        }
        if !(self.fov > 0.0 && self.fov < 180.0) {
            return Err(Error::Config("fov must be in (0, 180) degrees".into()));
        }
        if !(self.move_step > 0.0 && self.turn_delta > 0.0 && self.radius > 0.0) {
            return Err(Error::Config("move_step, turn_delta and radius must be positive".into()));
        }
        if self.test_episodes == 0 || self.path_episodes == 0 || self.probe_episodes == 0 {
            return Err(Error::Config("episode counts must be at least 1".into()));
        }
        self.params().validate()
    }

    pub fn params(&self) -> EvolutionParams {
        EvolutionParams {
            generations_p1: self.generations_p1,
            generations_p2: self.generations_p2,
            pop_size: self.pop_size,
            gap: self.gap,
            mutate_count: self.mutate_count,
            evaluations: self.evaluations,
            p_delete_learner: self.p_delete_learner,
            p_add_learner: self.p_add_learner,
            max_instructions: self.max_instructions,
            max_registers: self.max_registers,
            min_team: self.min_team,
            max_team: self.max_team,
            p_instr_add: self.p_instr_add,
            p_instr_delete: self.p_instr_delete,
            p_instr_swap: self.p_instr_swap,
            p_instr_point: self.p_instr_point,
            p_mn: self.p_mn,
            p_action_p2: self.p_action_p2,
            crossover: self.crossover,
            validation_orientations: self.validation_orientations,
        }
    }

    pub fn env(&self) -> EnvConfig {
        EnvConfig {
            camera: Camera {
                width: self.width,
                height: self.height,
                fov: self.fov,
            },
            kinematics: Kinematics {
                turn_delta: self.turn_delta,
                move_step: self.move_step,
                radius: self.radius,
            },
            episode_cap: self.episode_cap,
        }
    }
}
