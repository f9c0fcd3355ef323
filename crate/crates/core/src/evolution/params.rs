use crate::{Error, Result};

/// Breeder parameters. Defaults reproduce the two-phase schedule of 500 + 500
/// generations with 120 root teams and half of them replaced per generation.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionParams {
    pub generations_p1: u32,
    pub generations_p2: u32,
    pub pop_size: usize,
    pub gap: f64,
    /// Repetitions of the instruction mutation loop per program mutation.
    pub mutate_count: u32,
    /// Episodes averaged per fitness evaluation.
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
    /// Probability of changing one field of one instruction per repetition;
    /// zero disables point mutation.
    pub p_instr_point: f64,
    /// Gate for action mutation.
    pub p_mn: f64,
    /// Probability that an action mutation becomes an ensemble pointer in P2.
    pub p_action_p2: f64,
    pub crossover: bool,
    /// Random orientations per spawn region in the champion validation set.
    pub validation_orientations: u32,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            generations_p1: 500,
            generations_p2: 500,
            pop_size: 120,
            gap: 0.5,
            mutate_count: 5,
            evaluations: 5,
            p_delete_learner: 0.7,
            p_add_learner: 0.7,
            max_instructions: 128,
            max_registers: 8,
            min_team: 2,
            max_team: 4,
            p_instr_add: 0.5,
            p_instr_delete: 0.5,
            p_instr_swap: 1.0,
            p_instr_point: 1.0,
            p_mn: 0.5,
            p_action_p2: 0.5,
            crossover: true,
            validation_orientations: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Action mutation can only rewrite action programs; graphs stay single nodes.
    P1,
    /// Action mutation may replace an action with an ensemble pointer.
    P2,
}

impl EvolutionParams {
    pub fn total_generations(&self) -> u32 {
        self.generations_p1 + self.generations_p2
    }

    /// Phase of 1-based generation `g`.
    pub fn phase(&self, g: u32) -> Phase {
        if g <= self.generations_p1 {
            Phase::P1
        } else {
            Phase::P2
        }
    }

    pub fn p_action(&self, phase: Phase) -> f64 {
        match phase {
            Phase::P1 => 0.0,
            Phase::P2 => self.p_action_p2,
        }
    }

    /// Number of roots replaced per generation.
    pub fn replacement_count(&self) -> usize {
        (self.pop_size as f64 * self.gap).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("gap", self.gap),
            ("p_delete_learner", self.p_delete_learner),
            ("p_add_learner", self.p_add_learner),
            ("p_instr_add", self.p_instr_add),
            ("p_instr_delete", self.p_instr_delete),
            ("p_instr_swap", self.p_instr_swap),
            ("p_instr_point", self.p_instr_point),
            ("p_mn", self.p_mn),
            ("p_action_p2", self.p_action_p2),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        let replaced = self.pop_size as f64 * self.gap;
        if replaced.fract() != 0.0 {
            return Err(Error::Config(format!(
                "pop_size * gap = {replaced} must be a whole number"
            )));
        }
        if self.pop_size < 2 || self.replacement_count() == 0 || self.replacement_count() >= self.pop_size {
            return Err(Error::Config(format!(
                "pop_size {} with gap {} leaves no parents or replaces nothing",
                self.pop_size, self.gap
            )));
        }
        if self.min_team < 2 || self.min_team > self.max_team || self.max_team > crate::tpg::MAX_ENSEMBLE {
            return Err(Error::Config(format!(
                "team size range {}..={} must lie within 2..={}",
                self.min_team,
                self.max_team,
                crate::tpg::MAX_ENSEMBLE
            )));
        }
        if self.max_instructions == 0 || self.max_instructions > crate::tpg::MAX_INSTRUCTIONS {
            return Err(Error::Config(format!(
                "max_instructions must be in 1..={}",
                crate::tpg::MAX_INSTRUCTIONS
            )));
        }
        if self.max_registers < crate::env::Action::COUNT || self.max_registers > crate::tpg::MAX_REGISTERS {
            return Err(Error::Config(format!(
                "max_registers must be in {}..={}",
                crate::env::Action::COUNT,
                crate::tpg::MAX_REGISTERS
            )));
        }
        if self.evaluations == 0 {
            return Err(Error::Config("evaluations must be at least 1".into()));
        }
        if self.validation_orientations == 0 {
            return Err(Error::Config("validation_orientations must be at least 1".into()));
        }
        Ok(())
    }

    /// Key/value pairs recorded as champion provenance.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("generations_p1", self.generations_p1.to_string()),
            ("generations_p2", self.generations_p2.to_string()),
            ("pop_size", self.pop_size.to_string()),
            ("gap", format!("{:?}", self.gap)),
            ("mutate_count", self.mutate_count.to_string()),
            ("evaluations", self.evaluations.to_string()),
            ("p_delete_learner", format!("{:?}", self.p_delete_learner)),
            ("p_add_learner", format!("{:?}", self.p_add_learner)),
            ("max_instructions", self.max_instructions.to_string()),
            ("max_registers", self.max_registers.to_string()),
            ("min_team", self.min_team.to_string()),
            ("max_team", self.max_team.to_string()),
            ("p_instr_add", format!("{:?}", self.p_instr_add)),
            ("p_instr_delete", format!("{:?}", self.p_instr_delete)),
            ("p_instr_swap", format!("{:?}", self.p_instr_swap)),
            ("p_instr_point", format!("{:?}", self.p_instr_point)),
            ("p_mn", format!("{:?}", self.p_mn)),
            ("p_action_p2", format!("{:?}", self.p_action_p2)),
            ("crossover", self.crossover.to_string()),
            ("validation_orientations", self.validation_orientations.to_string()),
        ]
    }
}
