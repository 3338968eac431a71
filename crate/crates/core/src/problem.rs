//! The 24-problem catalogue: landscape family, change mode and dimension.

use std::fmt;
use std::str::FromStr;

use crate::error::{DmmopError, Result};

/// Landscape family. `F1`..`F4` are cone-peak landscapes, `F5`..`F8` are
/// composition landscapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::F1,
        Family::F2,
        Family::F3,
        Family::F4,
        Family::F5,
        Family::F6,
        Family::F7,
        Family::F8,
    ];

    pub fn is_peak_family(self) -> bool {
        matches!(self, Family::F1 | Family::F2 | Family::F3 | Family::F4)
    }

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

/// Environmental change mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChangeMode {
    /// Small step.
    C1,
    /// Large step.
    C2,
    /// Gaussian random walk.
    C3,
    /// Chaotic (logistic) map.
    C4,
    /// Recurrent sinusoid.
    C5,
    /// Recurrent sinusoid with Gaussian noise.
    C6,
    /// Number of global optima follows a triangle wave; other parameters as C1.
    C7,
    /// Number of global optima redrawn uniformly; other parameters as C1.
    C8,
}

impl ChangeMode {
    pub fn number(self) -> usize {
        self as usize + 1
    }

    /// The scalar rule applied to heights, widths and rotation angles.
    pub fn scalar_mode(self) -> ChangeMode {
        match self {
            ChangeMode::C7 | ChangeMode::C8 => ChangeMode::C1,
            m => m,
        }
    }

    pub fn is_recurrent(self) -> bool {
        matches!(self, ChangeMode::C5 | ChangeMode::C6)
    }

    pub fn varies_optima_count(self) -> bool {
        matches!(self, ChangeMode::C7 | ChangeMode::C8)
    }
}

impl fmt::Display for ChangeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    G1,
    G2,
    G3,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Group::G1 => 1,
            Group::G2 => 2,
            Group::G3 => 3,
        };
        write!(f, "G{n}")
    }
}

/// One row of the problem catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub index: usize,
    pub family: Family,
    pub mode: ChangeMode,
    pub dim: usize,
}

use ChangeMode::*;
use Family::*;

const TABLE: [(Family, ChangeMode, usize); 24] = [
    (F1, C1, 5),
    (F2, C1, 5),
    (F3, C1, 5),
    (F4, C1, 5),
    (F5, C1, 5),
    (F6, C1, 5),
    (F7, C1, 5),
    (F8, C1, 5),
    (F8, C1, 5),
    (F8, C2, 5),
    (F8, C3, 5),
    (F8, C4, 5),
    (F8, C5, 5),
    (F8, C6, 5),
    (F8, C7, 5),
    (F8, C8, 5),
    (F1, C1, 10),
    (F2, C1, 10),
    (F3, C1, 10),
    (F4, C1, 10),
    (F5, C1, 10),
    (F6, C1, 10),
    (F7, C1, 10),
    (F8, C1, 10),
];

pub const PROBLEM_COUNT: usize = TABLE.len();

impl ProblemSpec {
    /// Looks up problem `P{index}` (1-based).
    pub fn get(index: usize) -> Result<Self> {
        if !(1..=PROBLEM_COUNT).contains(&index) {
            return Err(DmmopError::UnknownProblem(format!("P{index}")));
        }
        let (family, mode, dim) = TABLE[index - 1];
        Ok(ProblemSpec {
            index,
            family,
            mode,
            dim,
        })
    }

    pub fn all() -> impl Iterator<Item = ProblemSpec> {
        (1..=PROBLEM_COUNT).map(|i| ProblemSpec::get(i).expect("index in table"))
    }

    pub fn group(&self) -> Group {
        match self.index {
            1..=8 => Group::G1,
            9..=16 => Group::G2,
            _ => Group::G3,
        }
    }

    pub fn label(&self) -> String {
        format!("P{}", self.index)
    }
}

impl FromStr for ProblemSpec {
    type Err = DmmopError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t.strip_prefix(['P', 'p']).unwrap_or(t);
        let index: usize = digits
            .parse()
            .map_err(|_| DmmopError::UnknownProblem(t.to_string()))?;
        ProblemSpec::get(index)
    }
}

/// Parses a problem selection such as `P1..P24`, `1-8`, `P2,P5,P13`.
pub fn parse_problem_list(s: &str) -> Result<Vec<ProblemSpec>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range = part.split_once("..").or_else(|| part.split_once('-'));
        match range {
            Some((a, b)) => {
                let lo: ProblemSpec = a.parse()?;
                let hi: ProblemSpec = b.trim_start_matches('=').parse()?;
                if lo.index > hi.index {
                    return Err(DmmopError::UnknownProblem(part.to_string()));
                }
                out.extend((lo.index..=hi.index).map(|i| ProblemSpec::get(i).unwrap()));
            }
            None => out.push(part.parse()?),
        }
    }
    if out.is_empty() {
        return Err(DmmopError::UnknownProblem(s.to_string()));
    }
    Ok(out)
}
