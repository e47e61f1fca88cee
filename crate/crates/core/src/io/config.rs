//! Run configuration files.
//!
//! A TOML document with `[tile]` and `[hardware]` sections keyed by the
//! notation symbols (`K`, `L`, `P`, `N`, `T`, `sigma`, `B`, `M`, `Mprime`,
//! `Bstar`, `Ma`, `Mc`, `gamma`, `Ps`), plus optional `[energy]`, `[sweep]`
//! and `[output]` sections. Unknown keys are rejected.
//!
//! Precedence: `--set` overrides, then the file, then built-in defaults.
//! Tile fields left unset follow `K`: `P = 10*K` and `L = round(0.1*K)`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{EnergyWeights, HardwareConfig, Link, Param, SweepSpec, SweepValues};
use crate::breakdown::Accelerator;
use crate::error::{ModelError, Result};
use crate::model::{CommonHwParams, Decimal, EngnConfig, HygcnConfig, TileParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ModelError::invalid(
                "format",
                format!("`{s}` is not one of table, csv, json"),
            )),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTile {
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    l: Option<u64>,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    t: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHardware {
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<u64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    b: Option<u64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    #[serde(rename = "Mprime", skip_serializing_if = "Option::is_none")]
    mprime: Option<u64>,
    #[serde(rename = "Bstar", skip_serializing_if = "Option::is_none")]
    bstar: Option<u64>,
    #[serde(rename = "Ma", skip_serializing_if = "Option::is_none")]
    ma: Option<u64>,
    #[serde(rename = "Mc", skip_serializing_if = "Option::is_none")]
    mc: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(rename = "Ps", skip_serializing_if = "Option::is_none")]
    ps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simd_width: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_cap_in_elements: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnergy {
    #[serde(skip_serializing_if = "Option::is_none")]
    w_l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_cache: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawValues {
    Text(String),
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: String,
    values: RawValues,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    links: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    accelerator: Option<String>,
    #[serde(default)]
    tile: RawTile,
    #[serde(default)]
    hardware: RawHardware,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    energy: Option<RawEnergy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub accelerator: Option<Accelerator>,
    pub tile: TileParams,
    /// Tile fields that were not given and follow `K`.
    pub tile_links: Vec<Link>,
    pub engn: EngnConfig,
    pub hygcn: HygcnConfig,
    pub energy: EnergyWeights,
    pub sweep: Option<SweepSpec>,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        resolve(RawConfig::default()).expect("built-in defaults are valid")
    }
}

impl RunConfig {
    /// Hardware block for `accelerator`.
    pub fn hardware(&self, accelerator: Accelerator) -> HardwareConfig {
        match accelerator {
            Accelerator::Engn => HardwareConfig::Engn(self.engn),
            Accelerator::Hygcn => HardwareConfig::Hygcn(self.hygcn),
        }
    }

    /// The configured accelerator, or an error asking for one.
    pub fn require_accelerator(&self) -> Result<Accelerator> {
        self.accelerator
            .ok_or_else(|| ModelError::Config("no accelerator selected (use --accel engn|hygcn)".into()))
    }

    /// Serializes the configuration so that [`load_config_str`] reproduces
    /// it. Tile fields that follow `K` are written as comments.
    pub fn to_toml(&self) -> String {
        let raw = self.to_raw();
        let mut out = toml::to_string(&raw).expect("config serializes");
        if !self.tile_links.is_empty() {
            let mut note = String::from("\n# Derived from K:\n");
            for link in &self.tile_links {
                let _ = writeln!(note, "#   {link}");
            }
            out.push_str(&note);
        }
        out
    }

    fn to_raw(&self) -> RawConfig {
        let derived = |p: Param| self.tile_links.iter().any(|l| l.target == p);
        let keep = |p: Param, v: u64| (!derived(p)).then_some(v);
        RawConfig {
            accelerator: self.accelerator.map(|a| a.name().to_string()),
            tile: RawTile {
                k: Some(self.tile.vertices),
                l: keep(Param::L, self.tile.high_degree_vertices),
                p: keep(Param::P, self.tile.edges),
                n: Some(self.tile.in_features),
                t: Some(self.tile.out_features),
            },
            hardware: RawHardware {
                // Both accelerators share sigma and B.
                sigma: Some(self.engn.common.precision_bits),
                b: Some(self.engn.common.bandwidth),
                m: Some(self.engn.pe_rows),
                mprime: Some(self.engn.pe_cols),
                bstar: self.engn.cache_bandwidth,
                ma: Some(self.hygcn.aggregation_pes),
                mc: Some(self.hygcn.combination_pes),
                gamma: Some(self.hygcn.systolic_reuse.to_f64()),
                ps: self.hygcn.sliding_edges,
                simd_width: Some(self.hygcn.simd_width),
                mc_cap_in_elements: Some(self.hygcn.mc_cap_in_elements),
            },
            energy: Some(RawEnergy {
                w_l1: Some(self.energy.w_l1),
                w_l2: Some(self.energy.w_l2),
                w_cache: Some(self.energy.w_cache),
            }),
            sweep: self.sweep.as_ref().map(|s| RawSweep {
                parameter: s.parameter.symbol().to_string(),
                values: RawValues::Text(s.values.to_string()),
                links: s.links.iter().map(|l| l.to_string()).collect(),
            }),
            output: (self.output.format.is_some() || self.output.path.is_some()).then(|| RawOutput {
                format: self.output.format.map(|f| f.name().to_string()),
                path: self.output.path.clone(),
            }),
        }
    }
}

/// One `key=value` override. Keys are the notation symbols, the extra
/// hardware and energy keys, or `accelerator`; an optional section prefix
/// (`tile.K`) is accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub key: String,
    pub value: String,
}

impl FromStr for Override {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| ModelError::Config(format!("override `{s}` is not KEY=VALUE")))?;
        Ok(Override {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        })
    }
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| ModelError::invalid(key, format!("cannot parse `{value}`")))
}

impl RawConfig {
    fn apply(&mut self, o: &Override) -> Result<()> {
        let key = o.key.rsplit('.').next().unwrap_or(&o.key);
        let v = o.value.as_str();
        let int = |k: &str| parse_field::<u64>(k, v).map(Some);
        let float = |k: &str| parse_field::<f64>(k, v).map(Some);
        match key {
            "accelerator" => self.accelerator = Some(v.to_string()),
            "K" => self.tile.k = int(key)?,
            "L" => self.tile.l = int(key)?,
            "P" => self.tile.p = int(key)?,
            "N" => self.tile.n = int(key)?,
            "T" => self.tile.t = int(key)?,
            "sigma" => self.hardware.sigma = int(key)?,
            "B" => self.hardware.b = int(key)?,
            "M" => self.hardware.m = int(key)?,
            "Mprime" => self.hardware.mprime = int(key)?,
            "Bstar" => self.hardware.bstar = int(key)?,
            "Ma" => self.hardware.ma = int(key)?,
            "Mc" => self.hardware.mc = int(key)?,
            "gamma" => self.hardware.gamma = float(key)?,
            "Ps" => self.hardware.ps = int(key)?,
            "simd_width" => self.hardware.simd_width = int(key)?,
            "mc_cap_in_elements" => self.hardware.mc_cap_in_elements = Some(parse_field(key, v)?),
            "w_l1" => self.energy.get_or_insert_with(RawEnergy::default).w_l1 = float(key)?,
            "w_l2" => self.energy.get_or_insert_with(RawEnergy::default).w_l2 = float(key)?,
            "w_cache" => self.energy.get_or_insert_with(RawEnergy::default).w_cache = float(key)?,
            _ => return Err(ModelError::Config(format!("unknown key `{}`", o.key))),
        }
        Ok(())
    }
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let accelerator = raw.accelerator.as_deref().map(str::parse).transpose()?;

    let vertices = raw.tile.k.unwrap_or(TileParams::DEFAULT_VERTICES);
    let mut tile = TileParams {
        vertices,
        high_degree_vertices: raw.tile.l.unwrap_or(0),
        edges: raw.tile.p.unwrap_or(0),
        in_features: raw.tile.n.unwrap_or(TileParams::DEFAULT_IN_FEATURES),
        out_features: raw.tile.t.unwrap_or(TileParams::DEFAULT_OUT_FEATURES),
    };
    let tile_links: Vec<Link> = Link::default_tile_links()
        .into_iter()
        .filter(|l| match l.target {
            Param::P => raw.tile.p.is_none(),
            Param::L => raw.tile.l.is_none(),
            _ => true,
        })
        .collect();

    let defaults_common = CommonHwParams::default();
    let common = CommonHwParams {
        precision_bits: raw.hardware.sigma.unwrap_or(defaults_common.precision_bits),
        bandwidth: raw.hardware.b.unwrap_or(defaults_common.bandwidth),
    };
    let de = EngnConfig::default();
    let mut engn = EngnConfig {
        common,
        pe_rows: raw.hardware.m.unwrap_or(de.pe_rows),
        pe_cols: raw.hardware.mprime.unwrap_or(de.pe_cols),
        cache_bandwidth: raw.hardware.bstar,
    };
    let dh = HygcnConfig::default();
    let gamma = match raw.hardware.gamma {
        Some(g) => Decimal::from_f64(g)
            .map_err(|_| ModelError::invalid("gamma", format!("{g} is outside the range [0, 1]")))?,
        None => dh.systolic_reuse,
    };
    let hygcn = HygcnConfig {
        common,
        aggregation_pes: raw.hardware.ma.unwrap_or(dh.aggregation_pes),
        combination_pes: raw.hardware.mc.unwrap_or(dh.combination_pes),
        systolic_reuse: gamma,
        sliding_edges: raw.hardware.ps,
        simd_width: raw.hardware.simd_width.unwrap_or(dh.simd_width),
        mc_cap_in_elements: raw.hardware.mc_cap_in_elements.unwrap_or(dh.mc_cap_in_elements),
    };

    {
        // Derived tile fields go through the same link code as sweeps.
        let mut hw = HardwareConfig::Engn(engn);
        for link in &tile_links {
            link.apply(&mut tile, &mut hw)?;
        }
        if let HardwareConfig::Engn(c) = hw {
            engn = c;
        }
    }
    tile.validate()?;
    engn.validate()?;
    hygcn.validate()?;

    let de = EnergyWeights::default();
    let energy = match raw.energy {
        Some(e) => EnergyWeights {
            w_l1: e.w_l1.unwrap_or(de.w_l1),
            w_l2: e.w_l2.unwrap_or(de.w_l2),
            w_cache: e.w_cache.unwrap_or(de.w_cache),
        },
        None => de,
    };
    energy.validate()?;

    let sweep = raw.sweep.map(resolve_sweep).transpose()?;
    let output = match raw.output {
        Some(o) => OutputSpec {
            format: o.format.as_deref().map(str::parse).transpose()?,
            path: o.path,
        },
        None => OutputSpec {
            format: None,
            path: None,
        },
    };

    Ok(RunConfig {
        accelerator,
        tile,
        tile_links,
        engn,
        hygcn,
        energy,
        sweep,
        output,
    })
}

fn resolve_sweep(raw: RawSweep) -> Result<SweepSpec> {
    let values = match raw.values {
        RawValues::Text(s) => s.parse()?,
        RawValues::List(v) => SweepValues::List(v.into_iter().map(Decimal::from_f64).collect::<Result<_>>()?),
    };
    Ok(SweepSpec {
        parameter: raw.parameter.parse()?,
        values,
        links: raw.links.iter().map(|l| l.parse()).collect::<Result<_>>()?,
    })
}

fn flatten(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses and resolves a config document with overrides applied on top.
pub fn load_config_str(text: &str, overrides: &[Override]) -> Result<RunConfig> {
    let mut raw: RawConfig = toml::from_str(text).map_err(|e| ModelError::Config(flatten(&e.to_string())))?;
    for o in overrides {
        raw.apply(o)?;
    }
    resolve(raw)
}

/// Loads `path` (or only defaults when `None`) and applies `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &[Override]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| ModelError::Io(format!("cannot read {}: {e}", p.display())))?
        }
        None => String::new(),
    };
    load_config_str(&text, overrides).map_err(|e| match (e, path) {
        (ModelError::Config(m), Some(p)) => ModelError::Config(format!("{}: {m}", p.display())),
        (e, _) => e,
    })
}
