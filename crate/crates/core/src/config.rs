//! Flat key-value experiment configuration files.
//!
//! One `key = value` pair per line, `#` comments, unknown keys rejected.
//! See the README for the key list.

use crate::channel::SnrConvention;
use crate::sdd::{PruneMode, SddParams};
use crate::sim::{CodeSource, DecoderSpec, ExperimentConfig, SimError, StopRule};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Parses an experiment configuration from flat key-value text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, SimError> {
    let mut values: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(SimError::ConfigLine {
                line: lno + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(SimError::ConfigLine {
                line: lno + 1,
                msg: format!("unknown key '{key}'"),
            });
        }
        if values.insert(key, (lno + 1, value)).is_some() {
            return Err(SimError::ConfigLine {
                line: lno + 1,
                msg: format!("duplicate key '{key}'"),
            });
        }
    }
    build(&values)
}

const KNOWN_KEYS: &[&str] = &[
    "code",
    "n",
    "k",
    "gen",
    "decoder",
    "order",
    "q",
    "lambda",
    "tau",
    "prune",
    "snr_db",
    "snr_convention",
    "min_frames",
    "min_frame_errors",
    "max_frames",
    "seed",
    "workers",
];

fn build(values: &BTreeMap<&str, (usize, &str)>) -> Result<ExperimentConfig, SimError> {
    let get = |key: &str| values.get(key).map(|&(line, v)| (line, v));
    let require = |key: &str| {
        get(key).ok_or_else(|| SimError::Config(format!("missing required key '{key}'")))
    };
    fn parse_at<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, SimError> {
        v.parse().map_err(|_| SimError::ConfigLine {
            line,
            msg: format!("cannot parse '{v}' for key '{key}'"),
        })
    }

    let code = {
        let (line, kind) = require("code")?;
        match kind {
            "ebch" => {
                let (ln, n) = require("n")?;
                let (lk, k) = require("k")?;
                CodeSource::Ebch {
                    n: parse_at(ln, "n", n)?,
                    k: parse_at(lk, "k", k)?,
                }
            }
            "file" => {
                let (_, path) = require("gen")?;
                CodeSource::File(PathBuf::from(path))
            }
            other => {
                return Err(SimError::ConfigLine {
                    line,
                    msg: format!("unknown code family '{other}' (expected ebch or file)"),
                })
            }
        }
    };

    let decoder = {
        let (line, kind) = require("decoder")?;
        let (lo, order) = require("order")?;
        let order: usize = parse_at(lo, "order", order)?;
        match kind {
            "osd" => DecoderSpec::Osd { order },
            "sdd" => {
                let (lq, q) = require("q")?;
                let (ll, lambda) = require("lambda")?;
                let (lt, tau) = require("tau")?;
                let mut params = SddParams::new(
                    order,
                    parse_at(lq, "q", q)?,
                    parse_at(ll, "lambda", lambda)?,
                    parse_at(lt, "tau", tau)?,
                );
                if let Some((lp, p)) = get("prune") {
                    params.prune = p.parse::<PruneMode>().map_err(|msg| SimError::ConfigLine {
                        line: lp,
                        msg,
                    })?;
                }
                DecoderSpec::Sdd(params)
            }
            other => {
                return Err(SimError::ConfigLine {
                    line,
                    msg: format!("unknown decoder '{other}' (expected osd or sdd)"),
                })
            }
        }
    };

    let snr_points = {
        let (line, list) = require("snr_db")?;
        let mut points = Vec::new();
        for tok in list.split(',') {
            points.push(parse_at::<f64>(line, "snr_db", tok.trim())?);
        }
        points
    };

    let snr_convention = match get("snr_convention") {
        Some((line, v)) => v
            .parse::<SnrConvention>()
            .map_err(|msg| SimError::ConfigLine { line, msg })?,
        None => SnrConvention::EbN0,
    };

    let mut stop = StopRule::default();
    if let Some((l, v)) = get("min_frames") {
        stop.min_frames = parse_at(l, "min_frames", v)?;
    }
    if let Some((l, v)) = get("min_frame_errors") {
        stop.min_frame_errors = parse_at(l, "min_frame_errors", v)?;
    }
    if let Some((l, v)) = get("max_frames") {
        stop.max_frames = parse_at(l, "max_frames", v)?;
    }

    let seed = match get("seed") {
        Some((l, v)) => parse_at(l, "seed", v)?,
        None => 1,
    };
    let workers = match get("workers") {
        Some((l, v)) => parse_at(l, "workers", v)?,
        None => 1,
    };

    let config = ExperimentConfig {
        code,
        decoder,
        snr_points,
        snr_convention,
        stop,
        seed,
        workers,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# demo experiment
code = ebch
n = 64
k = 16
decoder = sdd
order = 2
q = 16
lambda = 13
tau = 5.5
snr_db = -2, -1, 0, 1
snr_convention = ebn0
min_frame_errors = 100
max_frames = 100000
seed = 42
";

    #[test]
    fn parses_full_config() {
        let cfg = parse_config(GOOD).unwrap();
        assert_eq!(cfg.snr_points, vec![-2.0, -1.0, 0.0, 1.0]);
        assert_eq!(cfg.seed, 42);
        match cfg.decoder {
            DecoderSpec::Sdd(p) => {
                assert_eq!(p.order, 2);
                assert_eq!(p.segments, 16);
                assert_eq!(p.lambda, 13.0);
                assert_eq!(p.tau, 5.5);
            }
            _ => panic!("expected sdd decoder"),
        }
    }

    #[test]
    fn unknown_key_is_an_error_with_line() {
        let text = format!("{GOOD}\nbogus = 1\n");
        match parse_config(&text).unwrap_err() {
            SimError::ConfigLine { line, msg } => {
                assert!(msg.contains("bogus"));
                assert!(line > 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_required_key_is_an_error() {
        let text = "code = ebch\nn = 8\nk = 4\ndecoder = sdd\norder = 1\nsnr_db = 0\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains('q'), "{err}");
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = "code = ebch\ncode = file\n";
        assert!(matches!(
            parse_config(text),
            Err(SimError::ConfigLine { line: 2, .. })
        ));
    }

    #[test]
    fn defaults_applied() {
        let text = "code = ebch\nn = 8\nk = 4\ndecoder = osd\norder = 1\nsnr_db = 0\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.stop.min_frame_errors, 100);
        assert_eq!(cfg.stop.max_frames, 1_000_000);
        assert_eq!(cfg.snr_convention, SnrConvention::EbN0);
    }
}
