//! Grid-world fixtures: an agent moves between adjacent cells.
//!
//! A grid description is a small text file:
//!
//! ```text
//! room k 2 2      # cells k1 k2 / k3 k4, row-major, 4-neighbourhood
//! cell door       # a single cell
//! edge k2 door    # extra adjacency, both directions
//! init k2
//! goal door
//! ```
//!
//! The generated problem has one goal hypothesis per `goal` line, named
//! after the cell. The reference landmarks of a goal are the cells every
//! path from the initial cell must pass, i.e. the initial and goal cells
//! plus every cell whose removal disconnects the two.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridSpec {
    cells: Vec<String>,
    adjacency: BTreeMap<String, BTreeSet<String>>,
    init: Option<String>,
    goals: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

impl GridSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cell(&mut self, name: &str) -> Result<&mut Self> {
        if !valid_name(name) {
            return Err(Error::InvalidArgument(format!("bad cell name `{name}`")));
        }
        if self.adjacency.contains_key(name) {
            return Err(Error::InvalidArgument(format!("duplicate cell `{name}`")));
        }
        self.cells.push(name.to_string());
        self.adjacency.insert(name.to_string(), BTreeSet::new());
        Ok(self)
    }

    /// A `width` × `height` block of cells `<prefix>1 ..`, row-major, each
    /// adjacent to its horizontal and vertical neighbours.
    pub fn room(&mut self, prefix: &str, width: usize, height: usize) -> Result<&mut Self> {
        let name = |r: usize, c: usize| format!("{prefix}{}", r * width + c + 1);
        for r in 0..height {
            for c in 0..width {
                self.cell(&name(r, c))?;
            }
        }
        for r in 0..height {
            for c in 0..width {
                if c + 1 < width {
                    self.edge(&name(r, c), &name(r, c + 1))?;
                }
                if r + 1 < height {
                    self.edge(&name(r, c), &name(r + 1, c))?;
                }
            }
        }
        Ok(self)
    }

    pub fn edge(&mut self, a: &str, b: &str) -> Result<&mut Self> {
        for x in [a, b] {
            if !self.adjacency.contains_key(x) {
                return Err(Error::InvalidArgument(format!("edge names unknown cell `{x}`")));
            }
        }
        if a != b {
            self.adjacency.get_mut(a).unwrap().insert(b.to_string());
            self.adjacency.get_mut(b).unwrap().insert(a.to_string());
        }
        Ok(self)
    }

    pub fn init(&mut self, cell: &str) -> Result<&mut Self> {
        self.require(cell)?;
        self.init = Some(cell.to_string());
        Ok(self)
    }

    pub fn goal(&mut self, cell: &str) -> Result<&mut Self> {
        self.require(cell)?;
        if !self.goals.iter().any(|g| g == cell) {
            self.goals.push(cell.to_string());
        }
        Ok(self)
    }

    fn require(&self, cell: &str) -> Result<()> {
        if self.adjacency.contains_key(cell) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("unknown cell `{cell}`")))
        }
    }

    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn neighbours(&self, cell: &str) -> impl Iterator<Item = &str> {
        self.adjacency.get(cell).into_iter().flatten().map(String::as_str)
    }

    pub fn initial(&self) -> Option<&str> {
        self.init.as_deref()
    }

    pub fn goals(&self) -> &[String] {
        &self.goals
    }

    /// A small flat: kitchen k, hallway h, bathroom ba and living room lr,
    /// starting in k2.
    pub fn example_flat() -> Self {
        let mut g = GridSpec::new();
        (|| -> Result<()> {
            g.room("k", 2, 2)?.room("h", 3, 2)?.room("ba", 2, 2)?.room("lr", 2, 2)?;
            g.edge("k2", "h1")?.edge("k4", "h4")?.edge("h3", "ba1")?.edge("h6", "lr1")?;
            g.init("k2")?.goal("ba3")?.goal("lr4")?.goal("k3")?;
            Ok(())
        })()
        .expect("fixed layout is valid");
        g
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut g = GridSpec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at_line = |e: Error| Error::AtLine { line: i + 1, inner: Box::new(e) };
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| at_line(Error::InvalidArgument(format!("bad size `{s}`"))))
            };
            match words[..] {
                ["room", prefix, w, h] => {
                    let (w, h) = (num(w)?, num(h)?);
                    g.room(prefix, w, h).map_err(at_line)?;
                }
                ["cell", name] => {
                    g.cell(name).map_err(at_line)?;
                }
                ["edge", a, b] => {
                    g.edge(a, b).map_err(at_line)?;
                }
                ["init", c] => {
                    g.init(c).map_err(at_line)?;
                }
                ["goal", c] => {
                    g.goal(c).map_err(at_line)?;
                }
                _ => return Err(Error::Syntax(ParseError::new(i + 1, 1, format!("unrecognized line `{line}`")))),
            }
        }
        Ok(g)
    }

    /// Explicit form: every cell and edge listed individually.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            writeln!(out, "cell {c}").unwrap();
        }
        for (a, ns) in &self.adjacency {
            for b in ns.iter().filter(|b| a < *b) {
                writeln!(out, "edge {a} {b}").unwrap();
            }
        }
        if let Some(i) = &self.init {
            writeln!(out, "init {i}").unwrap();
        }
        for g in &self.goals {
            writeln!(out, "goal {g}").unwrap();
        }
        out
    }

    fn reachable_from(&self, start: &str, blocked: Option<&str>) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([start.to_string()]);
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(c) = queue.pop_front() {
            for n in self.neighbours(&c) {
                if Some(n) != blocked && seen.insert(n.to_string()) {
                    queue.push_back(n.to_string());
                }
            }
        }
        seen
    }

    fn initial_cell(&self) -> Result<&str> {
        self.init.as_deref().ok_or_else(|| Error::InvalidArgument("grid has no initial cell".into()))
    }

    /// Fails if some cell cannot be reached from the initial cell.
    pub fn check_connected(&self) -> Result<()> {
        let init = self.initial_cell()?;
        let seen = self.reachable_from(init, None);
        match self.cells.iter().find(|c| !seen.contains(*c)) {
            Some(c) => Err(Error::DisconnectedGrid(c.clone(), init.to_string())),
            None => Ok(()),
        }
    }

    /// Cells on every path from the initial cell to `goal`.
    pub fn oracle_landmarks(&self, goal: &str) -> Result<BTreeSet<String>> {
        let init = self.initial_cell()?;
        self.require(goal)?;
        if !self.reachable_from(init, None).contains(goal) {
            return Err(Error::DisconnectedGrid(goal.to_string(), init.to_string()));
        }
        let mut out = BTreeSet::from([init.to_string(), goal.to_string()]);
        for c in &self.cells {
            if c != init && c != goal && !self.reachable_from(init, Some(c)).contains(goal) {
                out.insert(c.clone());
            }
        }
        Ok(out)
    }

    /// A shortest path of cells from `from` to `to`, both included; ties are
    /// broken towards lexicographically smaller cells.
    pub fn shortest_path(&self, from: &str, to: &str) -> Option<Vec<String>> {
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        let mut queue = VecDeque::from([from.to_string()]);
        let mut seen = BTreeSet::from([from.to_string()]);
        while let Some(c) = queue.pop_front() {
            if c == to {
                let mut path = vec![c.clone()];
                let mut cur = c;
                while let Some(p) = parent.get(&cur) {
                    path.push(p.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            for n in self.neighbours(&c) {
                if seen.insert(n.to_string()) {
                    parent.insert(n.to_string(), c.clone());
                    queue.push_back(n.to_string());
                }
            }
        }
        None
    }

    pub fn domain_pddl(&self) -> String {
        "(define (domain gridworld)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (is-at ?c - cell) (adjacent ?from ?to - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (is-at ?from) (adjacent ?from ?to))
    :effect (and (is-at ?to) (not (is-at ?from)))))
"
        .to_string()
    }

    pub fn problem_pddl(&self, name: &str) -> Result<String> {
        let init = self.initial_cell()?;
        let first_goal = self.goals.first().ok_or(Error::EmptyGoals)?;
        let mut out = String::new();
        writeln!(out, "(define (problem {name})\n  (:domain gridworld)").unwrap();
        writeln!(out, "  (:objects {} - cell)", self.cells.join(" ")).unwrap();
        writeln!(out, "  (:init\n    (is-at {init})").unwrap();
        for (a, ns) in &self.adjacency {
            for b in ns {
                writeln!(out, "    (adjacent {a} {b})").unwrap();
            }
        }
        writeln!(out, "  )\n  (:goal (is-at {first_goal}))\n  (:goal-hypotheses").unwrap();
        for g in &self.goals {
            writeln!(out, "    ({g} (is-at {g}))").unwrap();
        }
        writeln!(out, "  ))").unwrap();
        Ok(out)
    }
}

/// Generated PDDL plus the reference landmark cells of each goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorld {
    pub domain: String,
    pub problem: String,
    pub init: String,
    /// `(goal cell, cells on every path)`, in goal order.
    pub oracle: Vec<(String, BTreeSet<String>)>,
}

impl GridWorld {
    /// Reference landmarks as `(is-at c)` facts.
    pub fn oracle_facts(&self, goal: &str) -> Option<BTreeSet<String>> {
        self.oracle
            .iter()
            .find(|(g, _)| g == goal)
            .map(|(_, cells)| cells.iter().map(|c| format!("(is-at {c})")).collect())
    }

    /// `<goal> <TRIVIAL_INIT|TRIVIAL_GOAL|NONTRIVIAL> <fact>` lines, sorted.
    pub fn oracle_dump(&self) -> String {
        let mut lines = Vec::new();
        for (g, cells) in &self.oracle {
            for c in cells {
                let kinds: Vec<&str> = match (c == &self.init, c == g) {
                    (true, true) => vec!["TRIVIAL_INIT", "TRIVIAL_GOAL"],
                    (true, false) => vec!["TRIVIAL_INIT"],
                    (false, true) => vec!["TRIVIAL_GOAL"],
                    (false, false) => vec!["NONTRIVIAL"],
                };
                for k in kinds {
                    lines.push(format!("{g} {k} (is-at {c})"));
                }
            }
        }
        lines.sort();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

pub fn generate_gridworld(spec: &GridSpec, name: &str) -> Result<GridWorld> {
    spec.check_connected()?;
    let oracle = spec.goals.iter().map(|g| Ok((g.clone(), spec.oracle_landmarks(g)?))).collect::<Result<_>>()?;
    Ok(GridWorld {
        domain: spec.domain_pddl(),
        problem: spec.problem_pddl(name)?,
        init: spec.initial_cell()?.to_string(),
        oracle,
    })
}
