//! Run configuration: flags override an optional JSON file, which overrides defaults.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Numeric parameters as given on the command line or in a config file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamArgs {
    /// Spectral parameter(s) s, comma separated [ascend: 100; measure-transport: 100,200,400]
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Magnetic field strength B [0.5]
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<f64>,
    /// Packet centre frequency eta0 = m/s (also the frequency ascended by `ascend`) [0.2]
    #[arg(long)]
    pub eta0: Option<f64>,
    /// Observable width [0.4]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Closed-geodesic length of the cylinder, fixing the frequency lattice 2 pi Z / l [2 pi]
    #[arg(long)]
    pub l: Option<f64>,
    /// Largest Whittaker degree [2]
    #[arg(long)]
    pub tau_max: Option<u32>,
    /// Whittaker spectral parameter s1 [50]
    #[arg(long)]
    pub s1: Option<f64>,
    /// Whittaker frequency a [25]
    #[arg(long)]
    pub a: Option<f64>,
    /// Orbit lengths in flow time, comma separated [100,1000,10000]
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
    /// Surface: octagon or cylinder:<l> [octagon]
    #[arg(long)]
    pub surface: Option<String>,
    /// Flow: geodesic, horocyclic, hypercyclic or hypercyclic:<B> [horocyclic]
    #[arg(long)]
    pub flow: Option<String>,
    /// Seed of the initial vector [1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of packet frequencies K [20]
    #[arg(long)]
    pub packet_size: Option<usize>,
    /// Flow time for `flows` [5]
    #[arg(long)]
    pub t: Option<f64>,
    /// Time samples for `flows` [101]
    #[arg(long)]
    pub points: Option<usize>,
    /// Peak abscissa tolerance for `whittaker --assert` [0.002]
    #[arg(long)]
    pub abscissa_tol: Option<f64>,
    /// Relative peak ordinate tolerance for `whittaker --assert` [0.01]
    #[arg(long)]
    pub ordinate_tol: Option<f64>,
    /// Relative transport tolerance at the largest s [0.1]
    #[arg(long)]
    pub transport_tol: Option<f64>,
    /// Discrepancy tolerance at the longest length [0.05]
    #[arg(long)]
    pub discrepancy_tol: Option<f64>,
}

impl ParamArgs {
    /// Fields set here win over those of `base`.
    pub fn over(self, base: ParamArgs) -> ParamArgs {
        ParamArgs {
            s: self.s.or(base.s),
            b: self.b.or(base.b),
            eta0: self.eta0.or(base.eta0),
            eps: self.eps.or(base.eps),
            l: self.l.or(base.l),
            tau_max: self.tau_max.or(base.tau_max),
            s1: self.s1.or(base.s1),
            a: self.a.or(base.a),
            lengths: self.lengths.or(base.lengths),
            surface: self.surface.or(base.surface),
            flow: self.flow.or(base.flow),
            seed: self.seed.or(base.seed),
            packet_size: self.packet_size.or(base.packet_size),
            t: self.t.or(base.t),
            points: self.points.or(base.points),
            abscissa_tol: self.abscissa_tol.or(base.abscissa_tol),
            ordinate_tol: self.ordinate_tol.or(base.ordinate_tol),
            transport_tol: self.transport_tol.or(base.transport_tol),
            discrepancy_tol: self.discrepancy_tol.or(base.discrepancy_tol),
        }
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub out: PathBuf,
    pub s: Vec<f64>,
    #[serde(rename = "B")]
    pub b: f64,
    pub eta0: f64,
    pub eps: f64,
    pub l: f64,
    pub tau_max: u32,
    pub s1: f64,
    pub a: f64,
    pub lengths: Vec<f64>,
    pub surface: String,
    pub flow: String,
    pub seed: u64,
    pub packet_size: usize,
    pub t: f64,
    pub points: usize,
    pub abscissa_tol: f64,
    pub ordinate_tol: f64,
    pub transport_tol: f64,
    pub discrepancy_tol: f64,
}

impl RunConfig {
    pub fn resolve(command: &str, out: PathBuf, p: ParamArgs) -> anyhow::Result<Self> {
        let default_s = if command == "measure-transport" { vec![100.0, 200.0, 400.0] } else { vec![100.0] };
        let cfg = RunConfig {
            command: command.to_string(),
            out,
            s: p.s.unwrap_or(default_s),
            b: p.b.unwrap_or(0.5),
            eta0: p.eta0.unwrap_or(0.2),
            eps: p.eps.unwrap_or(0.4),
            l: p.l.unwrap_or(TAU),
            tau_max: p.tau_max.unwrap_or(2),
            s1: p.s1.unwrap_or(50.0),
            a: p.a.unwrap_or(25.0),
            lengths: p.lengths.unwrap_or_else(|| vec![1e2, 1e3, 1e4]),
            surface: p.surface.unwrap_or_else(|| "octagon".into()),
            flow: p.flow.unwrap_or_else(|| "horocyclic".into()),
            seed: p.seed.unwrap_or(1),
            packet_size: p.packet_size.unwrap_or(20),
            t: p.t.unwrap_or(5.0),
            points: p.points.unwrap_or(101),
            abscissa_tol: p.abscissa_tol.unwrap_or(0.002),
            ordinate_tol: p.ordinate_tol.unwrap_or(0.01),
            transport_tol: p.transport_tol.unwrap_or(0.1),
            discrepancy_tol: p.discrepancy_tol.unwrap_or(0.05),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.s.is_empty() || self.s.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            bail!("--s must list positive values");
        }
        if !(self.b >= 0.0) || !self.b.is_finite() {
            bail!("--B must be finite and >= 0");
        }
        if !(self.eta0.abs() < 0.5) {
            bail!("--eta0 must lie in (-1/2, 1/2)");
        }
        for (name, v) in [("--eps", self.eps), ("--l", self.l), ("--s1", self.s1), ("--a", self.a)] {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{name} must be positive");
            }
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            bail!("--t must be finite and >= 0");
        }
        if self.points == 0 || self.packet_size == 0 {
            bail!("--points and --packet-size must be positive");
        }
        if self.lengths.is_empty() || self.lengths.windows(2).any(|w| !(w[1] > w[0])) || !(self.lengths[0] > 0.0) {
            bail!("--lengths must be positive and increasing");
        }
        Ok(())
    }
}
