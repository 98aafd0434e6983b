use super::{geometric_n_grid, Engine};
use crate::dynamics::{NoiseModel, RateKind, RateTable};
use crate::error::{Error, Result};
use std::path::Path;

/// Settings read from a `key = value` config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: NoiseModel,
    pub omega0: f64,
    pub n_grid: Option<Vec<u64>>,
    pub t_window: (f64, f64),
    pub engine: Engine,
    pub total_time: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: NoiseModel::default(),
            omega0: 1.0,
            n_grid: None,
            t_window: (1e-3, 30.0),
            engine: Engine::ChannelExtension,
            total_time: 1.0,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn number(line: usize, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| err(line, format!("'{s}' is not a number")))
}

/// Reals, optionally written as multiples of pi: `0.3`, `pi`, `pi/4`, `3pi/4`, `3*pi/4`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    let Some(pos) = s.find("pi") else {
        return s.parse().ok();
    };
    let coef = s[..pos].trim().trim_end_matches('*').trim();
    let coef: f64 = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse().ok()?,
    };
    let rest = s[pos + 2..].trim();
    let div: f64 = if rest.is_empty() { 1.0 } else { rest.strip_prefix('/')?.trim().parse().ok()? };
    Some(coef * std::f64::consts::PI / div)
}

fn parse_bool(line: usize, s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, format!("'{s}' is not a boolean"))),
    }
}

fn parse_rate_kind(line: usize, s: &str) -> Result<RateKind> {
    let mut parts = s.split_whitespace();
    match parts.next() {
        Some("tcl-ohmic") => Ok(RateKind::TclOhmic),
        Some("semigroup") => Ok(RateKind::Semigroup),
        Some("custom") => {
            let (mut ts, mut rs) = (vec![], vec![]);
            for p in parts {
                let (t, r) = p.split_once(':').ok_or_else(|| err(line, format!("expected t:rate, got '{p}'")))?;
                ts.push(number(line, t)?);
                rs.push(number(line, r)?);
            }
            RateTable::new(ts, rs).map(RateKind::Custom).map_err(|e| err(line, e.to_string()))
        }
        _ => Err(err(line, format!("unknown rate_kind '{s}'"))),
    }
}

/// `1, 2, 4, 8` or `geom <lo> <hi> <count>`.
pub fn parse_n_grid(s: &str) -> Option<Vec<u64>> {
    let words: Vec<&str> = s.split_whitespace().collect();
    if words.first() == Some(&"geom") {
        if words.len() != 4 {
            return None;
        }
        let lo: f64 = words[1].parse().ok()?;
        let hi: f64 = words[2].parse().ok()?;
        let k: usize = words[3].parse().ok()?;
        if !(lo >= 1.0 && hi > lo && k >= 2) {
            return None;
        }
        return Some(geometric_n_grid(lo as u64, hi as u64, k));
    }
    s.split([',', ' ']).filter(|w| !w.is_empty()).map(|w| w.parse::<f64>().ok().map(|x| x as u64)).collect()
}

fn parse_window(line: usize, s: &str) -> Result<(f64, f64)> {
    let v: Vec<&str> = s.split([',', ' ']).filter(|w| !w.is_empty()).collect();
    if v.len() != 2 {
        return Err(err(line, "t_window needs two numbers"));
    }
    Ok((number(line, v[0])?, number(line, v[1])?))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(line, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "theta" => cfg.model.theta = parse_angle(value).ok_or_else(|| err(line, format!("bad angle '{value}'")))?,
            "lambda" => cfg.model.lambda = number(line, value)?,
            "beta" => cfg.model.beta = number(line, value)?,
            "omega_c" => cfg.model.omega_c = number(line, value)?,
            "rate_kind" => cfg.model.rate_kind = parse_rate_kind(line, value)?,
            "secular" => cfg.model.secular = parse_bool(line, value)?,
            "omega0" => cfg.omega0 = number(line, value)?,
            "n_grid" => cfg.n_grid = Some(parse_n_grid(value).ok_or_else(|| err(line, format!("bad N grid '{value}'")))?),
            "t_window" => cfg.t_window = parse_window(line, value)?,
            "engine" => cfg.engine = value.parse().map_err(|e: Error| err(line, e.to_string()))?,
            "total_time" => cfg.total_time = number(line, value)?,
            _ => return Err(err(line, format!("unknown key '{key}'"))),
        }
    }
    cfg.model.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
