//! Experiment configuration: flag/file merging, sweep grids, validation.
//!
//! Every knob can come from the command line or from a `key = value`
//! config file (keys spelled like the long flags); a flag always wins
//! over the file.  Validation failures carry messages specific enough to
//! act on, and each failure class keeps a distinct message so scripted
//! callers can tell them apart.

use std::collections::BTreeMap;
use std::path::PathBuf;

use covert_irs::channel::ChannelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    ProbN2,
    ProbMc,
    BoundsStats,
    Sweep,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    ClosedFormN2,
    Gd,
    Constructive,
}

pub fn parse_solver(s: &str) -> Result<SolverKind, String> {
    match s {
        "closed-form-n2" => Ok(SolverKind::ClosedFormN2),
        "gd" => Ok(SolverKind::Gd),
        "constructive" => Ok(SolverKind::Constructive),
        other => Err(format!(
            "unknown solver {other:?}; expected closed-form-n2, gd, or constructive"
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    ProbN2,
    ProbMc,
    BoundsStats,
}

pub fn parse_metric(s: &str) -> Result<MetricKind, String> {
    match s {
        "prob-n2" => Ok(MetricKind::ProbN2),
        "prob-mc" => Ok(MetricKind::ProbMc),
        "bounds-stats" => Ok(MetricKind::BoundsStats),
        other => Err(format!(
            "unknown metric {other:?}; expected prob-n2, prob-mc, or bounds-stats"
        )),
    }
}

/// Parameters a sweep may scan.  `n-elements` grids are rounded to
/// integers after generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NElements,
    SigmaAs,
    SigmaSw,
    SigmaSb,
    SigmaAw,
    SigmaAb,
    NoiseVarW,
    NoiseVarB,
    TxPower,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NElements => "n-elements",
            SweepParam::SigmaAs => "sigma-as",
            SweepParam::SigmaSw => "sigma-sw",
            SweepParam::SigmaSb => "sigma-sb",
            SweepParam::SigmaAw => "sigma-aw",
            SweepParam::SigmaAb => "sigma-ab",
            SweepParam::NoiseVarW => "noise-var-w",
            SweepParam::NoiseVarB => "noise-var-b",
            SweepParam::TxPower => "tx-power",
        }
    }

    fn from_name(s: &str) -> Result<Self, String> {
        Ok(match s {
            "n-elements" => SweepParam::NElements,
            "sigma-as" => SweepParam::SigmaAs,
            "sigma-sw" => SweepParam::SigmaSw,
            "sigma-sb" => SweepParam::SigmaSb,
            "sigma-aw" => SweepParam::SigmaAw,
            "sigma-ab" => SweepParam::SigmaAb,
            "noise-var-w" => SweepParam::NoiseVarW,
            "noise-var-b" => SweepParam::NoiseVarB,
            "tx-power" => SweepParam::TxPower,
            other => return Err(format!("invalid sweep grid: unknown parameter {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
}

/// Parse `<param>:<start>:<stop>:<points>[:log]`.
pub fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 && parts.len() != 5 {
        return Err(format!(
            "invalid sweep grid {s:?}: expected <param>:<start>:<stop>:<points>[:log]"
        ));
    }
    let param = SweepParam::from_name(parts[0])?;
    let bad = |what: &str| format!("invalid sweep grid {s:?}: bad {what}");
    let start: f64 = parts[1].parse().map_err(|_| bad("start"))?;
    let stop: f64 = parts[2].parse().map_err(|_| bad("stop"))?;
    let points: usize = parts[3].parse().map_err(|_| bad("point count"))?;
    let log = match parts.get(4) {
        None => false,
        Some(&"log") => true,
        Some(other) => return Err(format!("invalid sweep grid {s:?}: unknown suffix {other:?}")),
    };
    if !(start.is_finite() && stop.is_finite()) {
        return Err(bad("endpoints"));
    }
    if points == 0 {
        return Err(format!("invalid sweep grid {s:?}: needs at least one point"));
    }
    if points > 1 && start >= stop {
        return Err(format!("invalid sweep grid {s:?}: start must be below stop"));
    }
    if log && start <= 0.0 {
        return Err(format!("invalid sweep grid {s:?}: log spacing needs positive start"));
    }

    let mut grid = Vec::with_capacity(points);
    if points == 1 {
        grid.push(start);
    } else {
        for i in 0..points {
            let t = i as f64 / (points - 1) as f64;
            let v = if log {
                (start.ln() + t * (stop.ln() - start.ln())).exp()
            } else {
                start + t * (stop - start)
            };
            grid.push(v);
        }
    }
    if param == SweepParam::NElements {
        for v in &mut grid {
            *v = v.round();
            if *v < 1.0 {
                return Err(format!("invalid sweep grid {s:?}: n-elements must be at least 1"));
            }
        }
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(format!(
            "invalid sweep grid {s:?}: grid must be strictly increasing after rounding"
        ));
    }
    Ok(SweepSpec { param, grid })
}

/// The fully merged, validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub params: ChannelParams,
    pub solver: SolverKind,
    pub n_trials: u64,
    pub sweep: Option<SweepSpec>,
    pub metric: Option<MetricKind>,
    pub out: Option<PathBuf>,
}

/// Raw option values from one source (flags or file), all optional.
#[derive(Debug, Clone, Default)]
pub struct RawOptions {
    pub n_elements: Option<usize>,
    pub sigma_as: Option<f64>,
    pub sigma_sw: Option<f64>,
    pub sigma_sb: Option<f64>,
    pub sigma_aw: Option<f64>,
    pub sigma_ab: Option<f64>,
    pub noise_var_w: Option<f64>,
    pub noise_var_b: Option<f64>,
    pub tx_power: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub solver: Option<SolverKind>,
    pub sweep: Option<SweepSpec>,
    pub metric: Option<MetricKind>,
    pub out: Option<PathBuf>,
}

impl RawOptions {
    /// Flags-over-file merge.
    fn or(self, fallback: RawOptions) -> RawOptions {
        RawOptions {
            n_elements: self.n_elements.or(fallback.n_elements),
            sigma_as: self.sigma_as.or(fallback.sigma_as),
            sigma_sw: self.sigma_sw.or(fallback.sigma_sw),
            sigma_sb: self.sigma_sb.or(fallback.sigma_sb),
            sigma_aw: self.sigma_aw.or(fallback.sigma_aw),
            sigma_ab: self.sigma_ab.or(fallback.sigma_ab),
            noise_var_w: self.noise_var_w.or(fallback.noise_var_w),
            noise_var_b: self.noise_var_b.or(fallback.noise_var_b),
            tx_power: self.tx_power.or(fallback.tx_power),
            seed: self.seed.or(fallback.seed),
            trials: self.trials.or(fallback.trials),
            solver: self.solver.or(fallback.solver),
            sweep: self.sweep.or(fallback.sweep),
            metric: self.metric.or(fallback.metric),
            out: self.out.or(fallback.out),
        }
    }
}

/// Parse a config file: `key = value` per line, `#` comments, keys
/// spelled like the long flags.
pub fn parse_config_file(text: &str) -> Result<RawOptions, String> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(format!("config line {}: duplicate key {key:?}", lineno + 1));
        }
    }

    let mut opts = RawOptions::default();
    for (key, value) in map {
        let num = |what: &str| -> Result<f64, String> {
            value.parse().map_err(|_| format!("config key {what}: invalid number {value:?}"))
        };
        match key.as_str() {
            "n-elements" => {
                opts.n_elements = Some(
                    value
                        .parse()
                        .map_err(|_| format!("config key n-elements: invalid count {value:?}"))?,
                )
            }
            "sigma-as" => opts.sigma_as = Some(num("sigma-as")?),
            "sigma-sw" => opts.sigma_sw = Some(num("sigma-sw")?),
            "sigma-sb" => opts.sigma_sb = Some(num("sigma-sb")?),
            "sigma-aw" => opts.sigma_aw = Some(num("sigma-aw")?),
            "sigma-ab" => opts.sigma_ab = Some(num("sigma-ab")?),
            "noise-var-w" => opts.noise_var_w = Some(num("noise-var-w")?),
            "noise-var-b" => opts.noise_var_b = Some(num("noise-var-b")?),
            "tx-power" => opts.tx_power = Some(num("tx-power")?),
            "seed" => {
                opts.seed = Some(
                    value.parse().map_err(|_| format!("config key seed: invalid seed {value:?}"))?,
                )
            }
            "trials" => {
                opts.trials = Some(
                    value
                        .parse()
                        .map_err(|_| format!("config key trials: invalid count {value:?}"))?,
                )
            }
            "solver" => opts.solver = Some(parse_solver(&value)?),
            "sweep" => opts.sweep = Some(parse_sweep(&value)?),
            "metric" => opts.metric = Some(parse_metric(&value)?),
            "out" => opts.out = Some(PathBuf::from(value)),
            other => return Err(format!("unknown config key {other:?}")),
        }
    }
    Ok(opts)
}

/// Merge flag options over file options and validate into a runnable
/// configuration.
pub fn build(
    command: CommandKind,
    flags: RawOptions,
    file: RawOptions,
) -> Result<ExperimentConfig, String> {
    let o = flags.or(file);
    let n = o.n_elements.unwrap_or(2);
    let mut builder = ChannelParams::builder(n).seed(o.seed.unwrap_or(0));
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = o.$field { builder = builder.$field(v); })*
        };
    }
    apply!(sigma_as, sigma_sw, sigma_sb, sigma_aw, sigma_ab, noise_var_w, noise_var_b, tx_power);
    let params = builder.build().map_err(|e| e.to_string())?;

    let solver = o.solver.unwrap_or(SolverKind::Gd);
    if solver == SolverKind::ClosedFormN2 && params.n_elements() != 2 {
        return Err(format!(
            "solver closed-form-n2 requires exactly 2 elements, got {}",
            params.n_elements()
        ));
    }
    if command == CommandKind::ProbN2 && params.n_elements() != 2 {
        return Err(format!(
            "prob-n2 evaluates the two-element closed form; got {} elements",
            params.n_elements()
        ));
    }
    if command == CommandKind::Sweep {
        if o.sweep.is_none() {
            return Err("sweep requires --sweep <param>:<start>:<stop>:<points>[:log]".into());
        }
        let metric = o
            .metric
            .ok_or("sweep requires --metric prob-n2|prob-mc|bounds-stats")?;
        let param = o.sweep.as_ref().expect("checked above").param;
        if metric == MetricKind::ProbN2 && param == SweepParam::NElements {
            return Err("metric prob-n2 is two-element only; sweep a sigma instead".into());
        }
        if metric == MetricKind::ProbN2 && params.n_elements() != 2 {
            return Err(format!(
                "metric prob-n2 evaluates the two-element closed form; got {} elements",
                params.n_elements()
            ));
        }
    }
    let n_trials = o.trials.unwrap_or(100_000);
    if n_trials == 0 {
        return Err("trials must be at least 1".into());
    }

    Ok(ExperimentConfig {
        command,
        params,
        solver,
        n_trials,
        sweep: o.sweep,
        metric: o.metric,
        out: o.out,
    })
}

/// Rebuild channel parameters with one swept field replaced.
pub fn params_at(
    base: &ChannelParams,
    param: SweepParam,
    value: f64,
) -> Result<ChannelParams, String> {
    let n = if param == SweepParam::NElements { value as usize } else { base.n_elements() };
    let mut b = ChannelParams::builder(n)
        .seed(base.seed())
        .sigma_as(base.sigma_as())
        .sigma_sw(base.sigma_sw())
        .sigma_sb(base.sigma_sb())
        .sigma_aw(base.sigma_aw())
        .sigma_ab(base.sigma_ab())
        .noise_var_w(base.noise_var_w())
        .noise_var_b(base.noise_var_b())
        .tx_power(base.tx_power());
    b = match param {
        SweepParam::NElements => b,
        SweepParam::SigmaAs => b.sigma_as(value),
        SweepParam::SigmaSw => b.sigma_sw(value),
        SweepParam::SigmaSb => b.sigma_sb(value),
        SweepParam::SigmaAw => b.sigma_aw(value),
        SweepParam::SigmaAb => b.sigma_ab(value),
        SweepParam::NoiseVarW => b.noise_var_w(value),
        SweepParam::NoiseVarB => b.noise_var_b(value),
        SweepParam::TxPower => b.tx_power(value),
    };
    b.build().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid_linear_and_log() {
        let lin = parse_sweep("sigma-aw:1:3:3").unwrap();
        assert_eq!(lin.param, SweepParam::SigmaAw);
        assert_eq!(lin.grid, vec![1.0, 2.0, 3.0]);

        let log = parse_sweep("n-elements:2:64:6:log").unwrap();
        assert_eq!(log.grid, vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
    }

    #[test]
    fn sweep_grid_rejections() {
        assert!(parse_sweep("sigma-aw:3:1:5").unwrap_err().contains("start must be below"));
        assert!(parse_sweep("sigma-aw:1:3:0").unwrap_err().contains("at least one point"));
        assert!(parse_sweep("bogus:1:3:5").unwrap_err().contains("unknown parameter"));
        assert!(parse_sweep("sigma-aw:1:3").unwrap_err().contains("expected"));
        assert!(parse_sweep("sigma-aw:-1:3:5:log").unwrap_err().contains("positive start"));
        // 2..3 over 4 log points rounds onto repeated integers.
        assert!(parse_sweep("n-elements:2:3:4:log")
            .unwrap_err()
            .contains("strictly increasing"));
    }

    #[test]
    fn config_file_parses_and_flags_override() {
        let file = parse_config_file(
            "# experiment defaults\nn-elements = 8\nsigma-aw = 0.5\ntrials = 123\n",
        )
        .unwrap();
        let flags = RawOptions { sigma_aw: Some(2.0), ..RawOptions::default() };
        let cfg = build(CommandKind::Solve, flags, file).unwrap();
        assert_eq!(cfg.params.n_elements(), 8);
        assert_eq!(cfg.params.sigma_aw(), 2.0);
        assert_eq!(cfg.n_trials, 123);
    }

    #[test]
    fn config_file_rejects_unknown_and_malformed() {
        assert!(parse_config_file("bogus = 1").unwrap_err().contains("unknown config key"));
        assert!(parse_config_file("n-elements 8").unwrap_err().contains("key = value"));
        assert!(parse_config_file("seed = 1\nseed = 2").unwrap_err().contains("duplicate"));
    }

    #[test]
    fn solver_n_mismatch_is_rejected() {
        let flags = RawOptions {
            n_elements: Some(4),
            solver: Some(SolverKind::ClosedFormN2),
            ..RawOptions::default()
        };
        let err = build(CommandKind::Solve, flags, RawOptions::default()).unwrap_err();
        assert!(err.contains("closed-form-n2 requires exactly 2"));
    }

    #[test]
    fn sweep_needs_spec_and_metric() {
        let err =
            build(CommandKind::Sweep, RawOptions::default(), RawOptions::default()).unwrap_err();
        assert!(err.contains("--sweep"));

        let flags = RawOptions {
            sweep: Some(parse_sweep("sigma-aw:0.1:10:5:log").unwrap()),
            ..RawOptions::default()
        };
        let err = build(CommandKind::Sweep, flags, RawOptions::default()).unwrap_err();
        assert!(err.contains("--metric"));
    }

    #[test]
    fn params_at_substitutes_one_field() {
        let base = ChannelParams::builder(2).seed(9).build().unwrap();
        let p = params_at(&base, SweepParam::SigmaAw, 0.25).unwrap();
        assert_eq!(p.sigma_aw(), 0.25);
        assert_eq!(p.seed(), 9);
        let p = params_at(&base, SweepParam::NElements, 16.0).unwrap();
        assert_eq!(p.n_elements(), 16);
    }
}
