//! Line-oriented environment parameter dumps.
//!
//! Two `#` header lines are followed by one line per environment. Each
//! environment line is a space-separated list of `key=value` tokens; vector
//! and matrix values are comma-separated (matrices row-major). Every real is
//! printed with 17 significant digits so dumps round-trip bit-exactly.
//!
//! ```text
//! # dmmop environment dump v1
//! # problem=P2 family=F2 mode=C1 dim=5 seed=1 rng=xoshiro256pp/1
//! env=1 active=4 p0.kind=global p0.active=1 p0.height=7.5000000000000000e1 ...
//! ```
//!
//! Peak fields: `kind active height width theta position`. Component fields:
//! `kind active lambda sigma f_max theta_shift theta_rotation shift rotation`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::RunConfig;
use crate::controller::EnvironmentSequence;
use crate::dynamics::ChangeState;
use crate::error::{DmmopError, Result};
use crate::landscape::Landscape;
use crate::df::PeakKind;
use crate::problem::ProblemSpec;
use crate::rng::RNG_FORMAT_VERSION;

pub const DUMP_HEADER: &str = "# dmmop environment dump v1";

/// Field names holding scalar dynamic parameters.
pub const SCALAR_FIELDS: [&str; 5] = ["height", "width", "theta", "theta_shift", "theta_rotation"];

fn real(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a String");
}

fn reals(out: &mut String, vs: impl IntoIterator<Item = f64>) {
    for (k, v) in vs.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        real(out, v);
    }
}

/// Formats one environment as a single dump line (without newline).
pub fn environment_line(env: usize, landscape: &Landscape, state: &ChangeState) -> String {
    let mut out = String::new();
    write!(out, "env={env} active={}", state.active).unwrap();
    match landscape {
        Landscape::Peaks(l) => {
            for (i, (p, tr)) in l.peaks.iter().zip(&state.tracks).enumerate() {
                let kind = match p.kind {
                    PeakKind::Global => "global",
                    PeakKind::Local => "local",
                };
                write!(out, " p{i}.kind={kind} p{i}.active={}", p.active as u8).unwrap();
                write!(out, " p{i}.height=").unwrap();
                real(&mut out, p.height);
                write!(out, " p{i}.width=").unwrap();
                real(&mut out, p.width);
                write!(out, " p{i}.theta=").unwrap();
                real(&mut out, tr.angles[0].theta);
                write!(out, " p{i}.position=").unwrap();
                reals(&mut out, p.position.iter().copied());
            }
        }
        Landscape::Composition(l) => {
            for (i, (c, tr)) in l.components.iter().zip(&state.tracks).enumerate() {
                write!(out, " c{i}.kind={} c{i}.active={}", c.kind.name(), c.active as u8).unwrap();
                write!(out, " c{i}.lambda=").unwrap();
                real(&mut out, c.lambda);
                write!(out, " c{i}.sigma=").unwrap();
                real(&mut out, c.sigma);
                write!(out, " c{i}.f_max=").unwrap();
                real(&mut out, c.f_max);
                write!(out, " c{i}.theta_shift=").unwrap();
                real(&mut out, tr.angles[0].theta);
                write!(out, " c{i}.theta_rotation=").unwrap();
                real(&mut out, tr.angles[1].theta);
                write!(out, " c{i}.shift=").unwrap();
                reals(&mut out, c.shift.iter().copied());
                write!(out, " c{i}.rotation=").unwrap();
                let n = c.rotation.nrows();
                reals(&mut out, (0..n * n).map(|k| c.rotation[(k / n, k % n)]));
            }
        }
    }
    out
}

/// Dump of every environment of run `seed` of `spec`. Consumes no budget.
pub fn dump_environments(spec: ProblemSpec, seed: u64, config: &RunConfig) -> Result<String> {
    let mut seq = EnvironmentSequence::new(spec, seed, config)?;
    let mut out = String::new();
    writeln!(out, "{DUMP_HEADER}").unwrap();
    writeln!(
        out,
        "# problem={} family={} mode={} dim={} seed={seed} rng=xoshiro256pp/{RNG_FORMAT_VERSION}",
        spec.label(),
        spec.family,
        spec.mode,
        spec.dim
    )
    .unwrap();
    for env in 1..=config.environments {
        if env > 1 {
            seq.advance()?;
        }
        out.push_str(&environment_line(env, seq.landscape(), seq.state()));
        out.push('\n');
    }
    Ok(out)
}

/// One parsed environment line.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpRecord {
    pub env: usize,
    pub active: usize,
    pub fields: BTreeMap<String, String>,
}

impl DumpRecord {
    pub fn text(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    pub fn values(&self, key: &str) -> Option<Vec<f64>> {
        let raw = self.fields.get(key)?;
        raw.split(',').map(|v| v.parse().ok()).collect()
    }

    /// `(key, value)` for every scalar dynamic parameter on the line.
    pub fn scalars(&self) -> Vec<(String, f64)> {
        self.fields
            .iter()
            .filter(|(k, _)| {
                k.rsplit_once('.')
                    .is_some_and(|(_, f)| SCALAR_FIELDS.contains(&f))
            })
            .filter_map(|(k, v)| v.parse().ok().map(|x| (k.clone(), x)))
            .collect()
    }
}

pub fn parse_dump(text: &str) -> Result<Vec<DumpRecord>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| DmmopError::Parse {
            what: "environment dump",
            line: line_no,
            message,
        };
        if line.starts_with('#') || line.trim().is_empty() {
            if n == 0 && line != DUMP_HEADER {
                return Err(err(format!("expected header `{DUMP_HEADER}`")));
            }
            continue;
        }
        let mut fields = BTreeMap::new();
        for token in line.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| err(format!("token `{token}` is not key=value")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let take = |fields: &mut BTreeMap<String, String>, key: &str| -> Result<usize> {
            fields
                .remove(key)
                .ok_or_else(|| err(format!("missing `{key}`")))?
                .parse()
                .map_err(|_| err(format!("`{key}` is not an integer")))
        };
        let env = take(&mut fields, "env")?;
        let active = take(&mut fields, "active")?;
        out.push(DumpRecord { env, active, fields });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        RunConfig {
            environments: 5,
            ..RunConfig::default()
        }
    }

    #[test]
    fn dump_is_deterministic_and_parses() {
        let spec = ProblemSpec::get(2).unwrap();
        let a = dump_environments(spec, 1, &small_config()).unwrap();
        let b = dump_environments(spec, 1, &small_config()).unwrap();
        assert_eq!(a, b);
        let recs = parse_dump(&a).unwrap();
        assert_eq!(recs.len(), 5);
        assert_eq!(recs[0].env, 1);
        assert_eq!(recs[0].active, 4);
        assert_eq!(recs[0].values("p0.position").unwrap(), vec![-3.0; 5]);
        assert_eq!(recs[0].text("p0.kind"), Some("global"));
        // 4 peaks x (height, width, theta)
        assert_eq!(recs[0].scalars().len(), 12);
    }

    #[test]
    fn seventeen_significant_digits_round_trip() {
        let spec = ProblemSpec::get(8).unwrap();
        let text = dump_environments(spec, 3, &small_config()).unwrap();
        let recs = parse_dump(&text).unwrap();
        let mut seq = EnvironmentSequence::new(spec, 3, &small_config()).unwrap();
        seq.advance_to(3).unwrap();
        let Landscape::Composition(l) = seq.landscape() else { unreachable!() };
        assert_eq!(recs[2].values("c4.shift").unwrap(), l.components[4].shift.to_vec());
        assert_eq!(recs[2].values("c4.rotation").unwrap().len(), 25);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(parse_dump("not a header\n").is_err());
        assert!(parse_dump(&format!("{DUMP_HEADER}\nenv=1 bogus\n")).is_err());
        assert!(parse_dump(&format!("{DUMP_HEADER}\nactive=2\n")).is_err());
    }
}
