//! Line-oriented text format for graphs, champions and population checkpoints.
//!
//! ```text
//! tpg-champion v1
//! root 17
//! meta seed 42
//! graph
//! state_dim 19200
//! registers 8
//! actions MoveForward TurnLeft TurnRight
//! program 5 2
//! I 0 + 0 4411
//! R 3 * 1 0
//! learner 3 5 6 -
//! ensemble 17 3 4 9
//! end
//! ```
//!
//! Instruction lines are `mode target op source input`. Output is
//! deterministic (everything is written in id order) and floats use Rust's
//! shortest round-trip formatting, so `parse(write(x)) == x` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::env::Action;
use crate::{Error, Result};

use super::graph::{Ensemble, GraphConfig, Learner, ProgramGraph};
use super::ids::{EnsembleId, LearnerId, ProgramId};
use super::program::{Instruction, Mode, Op, Program};

pub const CHAMPION_HEADER: &str = "tpg-champion v1";

/// A champion: the closed subgraph under its root plus provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Champion {
    pub root: EnsembleId,
    pub graph: ProgramGraph,
    pub meta: BTreeMap<String, String>,
}

impl Champion {
    pub fn from_population(graph: &ProgramGraph, root: EnsembleId, meta: BTreeMap<String, String>) -> Result<Self> {
        Ok(Champion {
            root,
            graph: graph.subgraph(root)?,
            meta,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(CHAMPION_HEADER);
        out.push('\n');
        let _ = writeln!(out, "root {}", self.root.0);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        write_graph(&self.graph, &mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (n, header) = lines.next_required("header")?;
        if header.join(" ") != CHAMPION_HEADER {
            return Err(Error::parse(n, format!("expected '{CHAMPION_HEADER}'")));
        }
        let (n, root_line) = lines.next_required("root")?;
        let root = match root_line.as_slice() {
            ["root", id] => EnsembleId(parse_num(n, id)?),
            _ => return Err(Error::parse(n, "expected 'root <id>'")),
        };
        let mut meta = BTreeMap::new();
        while let Some((n, toks)) = lines.peek() {
            if toks.first() != Some(&"meta") {
                break;
            }
            if toks.len() < 2 {
                return Err(Error::parse(n, "expected 'meta <key> <value>'"));
            }
            meta.insert(toks[1].to_string(), toks[2..].join(" "));
            lines.advance();
        }
        let graph = read_graph(&mut lines)?;
        lines.expect_end()?;
        let root_line = n;
        graph
            .ensemble(root)
            .map_err(|_| Error::parse(root_line, format!("root {root} is not in the graph")))?;
        Ok(Champion { root, graph, meta })
    }
}

pub(crate) fn write_graph(g: &ProgramGraph, out: &mut String) {
    out.push_str("graph\n");
    let _ = writeln!(out, "state_dim {}", g.config.state_dim);
    let _ = writeln!(out, "registers {}", g.config.num_registers);
    out.push_str("actions");
    for a in Action::ALL.iter().take(g.config.num_actions) {
        out.push(' ');
        out.push_str(a.name());
    }
    out.push('\n');
    for p in g.programs() {
        let _ = writeln!(out, "program {} {}", p.id.0, p.len());
        for i in &p.instructions {
            let mode = match i.mode {
                Mode::Register => 'R',
                Mode::Input => 'I',
            };
            let _ = writeln!(out, "{mode} {} {} {} {}", i.target, i.op.symbol(), i.source, i.input);
        }
    }
    for l in g.learners() {
        let ptr = l.pointer.map_or_else(|| "-".to_string(), |e| e.0.to_string());
        let _ = writeln!(out, "learner {} {} {} {ptr}", l.id.0, l.context.0, l.action.0);
    }
    for e in g.ensembles() {
        let _ = write!(out, "ensemble {}", e.id.0);
        for l in e.learners() {
            let _ = write!(out, " {}", l.0);
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

pub(crate) fn read_graph(lines: &mut Lines<'_>) -> Result<ProgramGraph> {
    let (n, toks) = lines.next_required("graph")?;
    if toks != ["graph"] {
        return Err(Error::parse(n, "expected 'graph'"));
    }
    let state_dim = lines.keyed_usize("state_dim")?;
    let num_registers = lines.keyed_usize("registers")?;
    let (n, toks) = lines.next_required("actions")?;
    if toks.first() != Some(&"actions") {
        return Err(Error::parse(n, "expected 'actions ...'"));
    }
    let names: Vec<&str> = Action::ALL.iter().map(|a| a.name()).collect();
    if toks[1..] != names[..] {
        return Err(Error::parse(n, format!("unsupported action order {:?}", &toks[1..])));
    }
    let config = GraphConfig {
        state_dim,
        num_registers,
        num_actions: toks.len() - 1,
    };
    config.validate().map_err(|e| Error::parse(n, e.to_string()))?;
    let mut g = ProgramGraph::new(config);

    loop {
        let (n, toks) = lines.next_required("end")?;
        match toks.as_slice() {
            ["end"] => break,
            ["program", id, len] => {
                let id = ProgramId(parse_num(n, id)?);
                let len: usize = parse_num(n, len)?;
                let mut instructions = Vec::with_capacity(len);
                for _ in 0..len {
                    let (n, toks) = lines.next_required("instruction")?;
                    instructions.push(parse_instruction(n, &toks)?);
                }
                let p = Program::new(id, instructions);
                p.validate(num_registers, state_dim).map_err(|e| Error::parse(n, e.to_string()))?;
                if g.program(id).is_ok() {
                    return Err(Error::parse(n, format!("duplicate program {id}")));
                }
                g.insert_program(p);
            }
            ["learner", id, ctx, act, ptr] => {
                let l = Learner {
                    id: LearnerId(parse_num(n, id)?),
                    context: ProgramId(parse_num(n, ctx)?),
                    action: ProgramId(parse_num(n, act)?),
                    pointer: match *ptr {
                        "-" => None,
                        s => Some(EnsembleId(parse_num(n, s)?)),
                    },
                };
                for p in [l.context, l.action] {
                    g.program(p).map_err(|e| Error::parse(n, e.to_string()))?;
                }
                g.insert_learner(l);
            }
            ["ensemble", id, members @ ..] => {
                let id = EnsembleId(parse_num(n, id)?);
                let members = members
                    .iter()
                    .map(|m| parse_num(n, m).map(LearnerId))
                    .collect::<Result<Vec<_>>>()?;
                for &m in &members {
                    g.learner(m).map_err(|e| Error::parse(n, e.to_string()))?;
                }
                g.insert_ensemble(Ensemble::new(id, members));
            }
            _ => return Err(Error::parse(n, format!("unexpected '{}'", toks.join(" ")))),
        }
    }
    // pointers may name ensembles defined later in the file
    for l in g.learners() {
        if let Some(t) = l.pointer {
            if !g.contains_ensemble(t) {
                return Err(Error::parse(lines.line_no(), format!("learner {} points at missing ensemble {t}", l.id)));
            }
        }
    }
    Ok(g)
}

fn parse_instruction(n: usize, toks: &[&str]) -> Result<Instruction> {
    let [mode, target, op, source, input] = toks else {
        return Err(Error::parse(n, "expected 'mode target op source input'"));
    };
    let mode = match *mode {
        "R" => Mode::Register,
        "I" => Mode::Input,
        m => return Err(Error::parse(n, format!("bad mode '{m}'"))),
    };
    let op = Op::from_symbol(op).ok_or_else(|| Error::parse(n, format!("bad op '{op}'")))?;
    Ok(Instruction {
        mode,
        target: parse_num(n, target)?,
        op,
        source: parse_num(n, source)?,
        input: parse_num(n, input)?,
    })
}

pub(crate) fn parse_num<T: std::str::FromStr>(n: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(n, format!("'{s}' is not a valid number")))
}

/// Tokenised, 1-based numbered lines; blank lines and `#` comments are skipped.
pub(crate) struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
            .collect();
        Lines { lines, pos: 0 }
    }

    pub fn peek(&self) -> Option<(usize, &[&'a str])> {
        self.lines.get(self.pos).map(|(n, t)| (*n, t.as_slice()))
    }

    pub fn advance(&mut self) {
        self.pos += 1;
    }

    pub fn line_no(&self) -> usize {
        self.lines
            .get(self.pos.saturating_sub(1))
            .map_or(1, |(n, _)| *n)
    }

    pub fn next_required(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let item = self.lines.get(self.pos).cloned();
        match item {
            Some(x) => {
                self.pos += 1;
                Ok(x)
            }
            None => Err(Error::parse(self.line_no() + 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    pub fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let (n, toks) = self.next_required(key)?;
        match toks.as_slice() {
            [k, v] if *k == key => parse_num(n, v),
            _ => Err(Error::parse(n, format!("expected '{key} <n>'"))),
        }
    }

    pub fn keyed_u64(&mut self, key: &str) -> Result<u64> {
        let (n, toks) = self.next_required(key)?;
        match toks.as_slice() {
            [k, v] if *k == key => parse_num(n, v),
            _ => Err(Error::parse(n, format!("expected '{key} <n>'"))),
        }
    }

    pub fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some((n, t)) => Err(Error::parse(n, format!("trailing content '{}'", t.join(" ")))),
        }
    }
}
