//! Linear register-machine programs.
//!
//! An instruction reads `R[target] <op> (R[source] | state[input])` and
//! writes the result back to `R[target]`. Registers start at zero on every
//! execution; nothing persists between decisions.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result, Scalar};

use super::ids::ProgramId;

/// Hard upper bound on registers per program.
pub const MAX_REGISTERS: usize = 16;
pub const DEFAULT_REGISTERS: usize = 8;
pub const MAX_INSTRUCTIONS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Op> {
        match s {
            "+" => Some(Op::Add),
            "-" => Some(Op::Sub),
            "*" => Some(Op::Mul),
            "/" => Some(Op::Div),
            _ => None,
        }
    }
}

/// Which operand an instruction reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Register,
    Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub mode: Mode,
    pub target: u8,
    pub op: Op,
    pub source: u8,
    pub input: u32,
}

impl Instruction {
    pub fn register(target: u8, op: Op, source: u8) -> Self {
        Instruction {
            mode: Mode::Register,
            target,
            op,
            source,
            input: 0,
        }
    }

    pub fn input(target: u8, op: Op, input: u32) -> Self {
        Instruction {
            mode: Mode::Input,
            target,
            op,
            source: 0,
            input,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Register => write!(f, "R[{}] <- R[{}] {} R[{}]", self.target, self.target, self.op.symbol(), self.source),
            Mode::Input => write!(f, "R[{}] <- R[{}] {} s[{}]", self.target, self.target, self.op.symbol(), self.input),
        }
    }
}

/// Register file after an execution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Registers<T> {
    values: [T; MAX_REGISTERS],
    len: usize,
}

impl<T: Scalar> Registers<T> {
    fn zeroed(len: usize) -> Self {
        Registers {
            values: [T::zero(); MAX_REGISTERS],
            len,
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Context programs bid with `R[0]`.
    pub fn bid(&self) -> T {
        self.values[0]
    }

    /// Index of the largest of the first `n` registers, lowest index on ties.
    pub fn argmax(&self, n: usize) -> usize {
        let mut best = 0;
        for i in 1..n.min(self.len) {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub id: ProgramId,
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(id: ProgramId, instructions: Vec<Instruction>) -> Self {
        Program { id, instructions }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Runs the program on `state`. Division by a value smaller than 1e-10
    /// in magnitude is skipped and any non-finite result is written as 0,
    /// so every register stays finite for a finite state.
    #[inline]
    pub fn execute<T: Scalar>(&self, state: &[T], num_registers: usize) -> Registers<T> {
        let mut regs = Registers::zeroed(num_registers);
        let r = &mut regs.values;
        let eps = T::protected_divisor_epsilon();
        for ins in &self.instructions {
            let v = match ins.mode {
                Mode::Register => r[ins.source as usize],
                Mode::Input => state[ins.input as usize],
            };
            let t = r[ins.target as usize];
            let out = match ins.op {
                Op::Add => t + v,
                Op::Sub => t - v,
                Op::Mul => t * v,
                Op::Div => {
                    if v.abs() < eps {
                        t
                    } else {
                        t / v
                    }
                }
            };
            r[ins.target as usize] = if out.is_finite() { out } else { T::zero() };
        }
        regs
    }

    /// Distinct state attributes read by input-mode instructions. This is a
    /// static scan; instructions whose result never reaches R[0] still count.
    pub fn indexed_attributes(&self) -> BTreeSet<u32> {
        self.instructions
            .iter()
            .filter(|i| i.mode == Mode::Input)
            .map(|i| i.input)
            .collect()
    }

    pub fn validate(&self, num_registers: usize, state_dim: usize) -> Result<()> {
        if self.instructions.is_empty() || self.instructions.len() > MAX_INSTRUCTIONS {
            return Err(Error::Illegal(format!(
                "program {} has {} instructions, expected 1..={MAX_INSTRUCTIONS}",
                self.id,
                self.instructions.len()
            )));
        }
        for (k, ins) in self.instructions.iter().enumerate() {
            let bad_register = ins.target as usize >= num_registers
                || (ins.mode == Mode::Register && ins.source as usize >= num_registers);
            let bad_input = ins.mode == Mode::Input && ins.input as usize >= state_dim;
            if bad_register || bad_input {
                return Err(Error::Illegal(format!(
                    "program {} instruction {k} ({ins}) is out of bounds",
                    self.id
                )));
            }
        }
        Ok(())
    }
}
