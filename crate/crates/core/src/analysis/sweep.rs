use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::breakdown::{Accelerator, MovementBreakdown};
use crate::error::{ModelError, Result};
use crate::model::{Decimal, EngnConfig, HygcnConfig, TileParams};
use crate::{engn, hygcn};

/// Hardware configuration of either accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardwareConfig {
    Engn(EngnConfig),
    Hygcn(HygcnConfig),
}

impl HardwareConfig {
    pub fn accelerator(&self) -> Accelerator {
        match self {
            HardwareConfig::Engn(_) => Accelerator::Engn,
            HardwareConfig::Hygcn(_) => Accelerator::Hygcn,
        }
    }

    pub fn evaluate(&self, tile: &TileParams) -> Result<MovementBreakdown> {
        match self {
            HardwareConfig::Engn(cfg) => engn::evaluate(tile, cfg),
            HardwareConfig::Hygcn(cfg) => hygcn::evaluate(tile, cfg),
        }
    }
}

/// A sweepable model parameter, named by its notation symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    K,
    L,
    P,
    N,
    T,
    Sigma,
    B,
    M,
    Mprime,
    Bstar,
    Ma,
    Mc,
    Gamma,
    Ps,
    FittingFactor,
}

impl Param {
    pub const ALL: [Param; 15] = [
        Param::K,
        Param::L,
        Param::P,
        Param::N,
        Param::T,
        Param::Sigma,
        Param::B,
        Param::M,
        Param::Mprime,
        Param::Bstar,
        Param::Ma,
        Param::Mc,
        Param::Gamma,
        Param::Ps,
        Param::FittingFactor,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Param::K => "K",
            Param::L => "L",
            Param::P => "P",
            Param::N => "N",
            Param::T => "T",
            Param::Sigma => "sigma",
            Param::B => "B",
            Param::M => "M",
            Param::Mprime => "Mprime",
            Param::Bstar => "Bstar",
            Param::Ma => "Ma",
            Param::Mc => "Mc",
            Param::Gamma => "gamma",
            Param::Ps => "Ps",
            Param::FittingFactor => "fitting_factor",
        }
    }

    pub fn applies_to(self, accelerator: Accelerator) -> bool {
        use Param::*;
        match self {
            K | L | P | N | T | Sigma | B => true,
            M | Mprime | Bstar | FittingFactor => accelerator == Accelerator::Engn,
            Ma | Mc | Gamma | Ps => accelerator == Accelerator::Hygcn,
        }
    }

    /// Whether the parameter takes fractional values.
    pub fn is_fractional(self) -> bool {
        matches!(self, Param::Gamma | Param::FittingFactor)
    }

    fn check_applies(self, accelerator: Accelerator) -> Result<()> {
        if self.applies_to(accelerator) {
            Ok(())
        } else {
            Err(ModelError::NotApplicable {
                param: self.symbol().to_string(),
                accelerator: accelerator.to_string(),
            })
        }
    }

    /// Current value of the parameter; unset defaults (`Bstar`, `Ps`) read
    /// as the value they follow.
    pub fn get(self, tile: &TileParams, hw: &HardwareConfig) -> Result<Decimal> {
        self.check_applies(hw.accelerator())?;
        let int = |v: u64| Ok(Decimal::from_integer(v));
        match (self, hw) {
            (Param::K, _) => int(tile.vertices),
            (Param::L, _) => int(tile.high_degree_vertices),
            (Param::P, _) => int(tile.edges),
            (Param::N, _) => int(tile.in_features),
            (Param::T, _) => int(tile.out_features),
            (Param::Sigma, HardwareConfig::Engn(c)) => int(c.common.precision_bits),
            (Param::Sigma, HardwareConfig::Hygcn(c)) => int(c.common.precision_bits),
            (Param::B, HardwareConfig::Engn(c)) => int(c.common.bandwidth),
            (Param::B, HardwareConfig::Hygcn(c)) => int(c.common.bandwidth),
            (Param::M, HardwareConfig::Engn(c)) => int(c.pe_rows),
            (Param::Mprime, HardwareConfig::Engn(c)) => int(c.pe_cols),
            (Param::Bstar, HardwareConfig::Engn(c)) => int(c.effective_cache_bandwidth()),
            (Param::FittingFactor, HardwareConfig::Engn(c)) => {
                let array = c.pe_rows as u128 * c.pe_cols as u128;
                let work = tile.vertices as u128 * tile.in_features as u128;
                if array == 0 {
                    return Err(ModelError::DivisionByZero);
                }
                // Exact decimals only; report to 1e-6.
                Decimal::from_f64((work as f64 / array as f64 * 1e6).round() / 1e6)
            }
            (Param::Ma, HardwareConfig::Hygcn(c)) => int(c.aggregation_pes),
            (Param::Mc, HardwareConfig::Hygcn(c)) => int(c.combination_pes),
            (Param::Gamma, HardwareConfig::Hygcn(c)) => Ok(c.systolic_reuse),
            (Param::Ps, HardwareConfig::Hygcn(c)) => int(c.effective_sliding_edges(tile)),
            _ => unreachable!("applicability checked above"),
        }
    }

    /// Sets the parameter. `fitting_factor` resizes the EnGN array to
    /// `M = M' = round(sqrt(K*N/f))`.
    pub fn set(self, value: Decimal, tile: &mut TileParams, hw: &mut HardwareConfig) -> Result<()> {
        self.check_applies(hw.accelerator())?;
        if self == Param::Gamma {
            if let HardwareConfig::Hygcn(c) = hw {
                c.systolic_reuse = value;
            }
            return Ok(());
        }
        if self == Param::FittingFactor {
            if let HardwareConfig::Engn(c) = hw {
                let rows = rows_for_fitting_factor(tile.vertices, tile.in_features, value)?;
                c.pe_rows = rows;
                c.pe_cols = rows;
            }
            return Ok(());
        }
        let v = value
            .as_integer()
            .ok_or_else(|| ModelError::invalid(self.symbol(), format!("{value} is not a whole number")))?;
        match (self, hw) {
            (Param::K, _) => tile.vertices = v,
            (Param::L, _) => tile.high_degree_vertices = v,
            (Param::P, _) => tile.edges = v,
            (Param::N, _) => tile.in_features = v,
            (Param::T, _) => tile.out_features = v,
            (Param::Sigma, HardwareConfig::Engn(c)) => c.common.precision_bits = v,
            (Param::Sigma, HardwareConfig::Hygcn(c)) => c.common.precision_bits = v,
            (Param::B, HardwareConfig::Engn(c)) => c.common.bandwidth = v,
            (Param::B, HardwareConfig::Hygcn(c)) => c.common.bandwidth = v,
            (Param::M, HardwareConfig::Engn(c)) => c.pe_rows = v,
            (Param::Mprime, HardwareConfig::Engn(c)) => c.pe_cols = v,
            (Param::Bstar, HardwareConfig::Engn(c)) => c.cache_bandwidth = Some(v),
            (Param::Ma, HardwareConfig::Hygcn(c)) => c.aggregation_pes = v,
            (Param::Mc, HardwareConfig::Hygcn(c)) => c.combination_pes = v,
            (Param::Ps, HardwareConfig::Hygcn(c)) => c.sliding_edges = Some(v),
            _ => unreachable!("applicability checked above"),
        }
        Ok(())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Param {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Param::ALL
            .into_iter()
            .find(|p| p.symbol() == s)
            .ok_or_else(|| ModelError::UnknownParameter(s.to_string()))
    }
}

impl Serialize for Param {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `round(sqrt(K*N/f))` with ties rounded up, in exact arithmetic.
pub fn rows_for_fitting_factor(vertices: u64, in_features: u64, factor: Decimal) -> Result<u64> {
    let (num, den) = factor.ratio();
    if num == 0 {
        return Err(ModelError::invalid("fitting_factor", "must be > 0"));
    }
    // round(sqrt(x)) is the largest m with (2m - 1)^2 <= 4x, x = K*N*den/num.
    let bound = 4 * vertices as u128 * in_features as u128 * den;
    let fits = |m: u128| {
        let odd = 2 * m - 1;
        odd.checked_mul(odd)
            .and_then(|sq| sq.checked_mul(num))
            .is_some_and(|lhs| lhs <= bound)
    };
    let guess = ((vertices as f64 * in_features as f64) / factor.to_f64())
        .sqrt()
        .round();
    let mut m = (guess as u128).max(1);
    while m > 1 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    if !fits(m) {
        return Err(ModelError::invalid(
            "fitting_factor",
            format!("factor {factor} gives an array smaller than 1x1 for K={vertices}, N={in_features}"),
        ));
    }
    u64::try_from(m).map_err(|_| ModelError::Overflow("fitting_factor".into()))
}

/// `target = round(coefficient * source)`, applied after the swept value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub target: Param,
    pub coefficient: Decimal,
    pub source: Param,
}

impl Link {
    pub fn new(target: Param, coefficient: Decimal, source: Param) -> Self {
        Link {
            target,
            coefficient,
            source,
        }
    }

    /// The default tile linkage: `P = 10*K` and `L = 0.1*K`.
    pub fn default_tile_links() -> Vec<Link> {
        vec![
            Link::new(Param::P, Decimal::from_integer(TileParams::EDGES_PER_VERTEX), Param::K),
            Link::new(Param::L, "0.1".parse().expect("valid decimal"), Param::K),
        ]
    }

    fn validate(&self) -> Result<()> {
        for p in [self.target, self.source] {
            if p.is_fractional() {
                return Err(ModelError::invalid(
                    "link",
                    format!("`{self}` links fractional parameter {p}"),
                ));
            }
        }
        if self.target == self.source {
            return Err(ModelError::invalid(
                "link",
                format!("`{self}` links a parameter to itself"),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, tile: &mut TileParams, hw: &mut HardwareConfig) -> Result<()> {
        let source = self.source.get(tile, hw)?;
        let source = source.as_integer().expect("integer parameter") as u128;
        let value = self.coefficient.scale_round(source)?;
        let value = u64::try_from(value).map_err(|_| ModelError::Overflow(self.to_string()))?;
        self.target.set(Decimal::from_integer(value), tile, hw)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}*{}", self.target, self.coefficient, self.source)
    }
}

impl FromStr for Link {
    type Err = ModelError;

    /// `P=10*K`, `L=0.1*K` or `Ps=P`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || ModelError::invalid("link", format!("`{s}` is not of the form TARGET=COEF*SOURCE"));
        let (target, rhs) = s.split_once('=').ok_or_else(bad)?;
        let (coefficient, source) = match rhs.split_once('*') {
            Some((c, src)) => (c.trim().parse::<Decimal>().map_err(|_| bad())?, src),
            None => (Decimal::ONE, rhs),
        };
        let link = Link::new(target.parse()?, coefficient, source.parse()?);
        link.validate()?;
        Ok(link)
    }
}

impl Serialize for Link {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Link {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Step between consecutive range values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Add(Decimal),
    Multiply(Decimal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepValues {
    List(Vec<Decimal>),
    Range { from: Decimal, to: Decimal, step: Step },
}

const MAX_SWEEP_POINTS: usize = 100_000;

impl SweepValues {
    pub fn expand(&self) -> Result<Vec<Decimal>> {
        let values = match self {
            SweepValues::List(v) => v.clone(),
            SweepValues::Range { from, to, step } => {
                let next = |v: Decimal| match step {
                    Step::Add(d) => v.checked_add(*d),
                    Step::Multiply(f) => v.checked_mul(*f),
                };
                match step {
                    Step::Add(d) if d.is_zero() => return Err(ModelError::invalid("range", "step must be > 0")),
                    Step::Multiply(f) if *f <= Decimal::ONE => {
                        return Err(ModelError::invalid("range", "factor must be > 1"))
                    }
                    Step::Multiply(_) if from.is_zero() => {
                        return Err(ModelError::invalid("range", "a geometric range cannot start at 0"))
                    }
                    _ => {}
                }
                let mut out = Vec::new();
                let mut v = *from;
                while v <= *to {
                    out.push(v);
                    if out.len() > MAX_SWEEP_POINTS {
                        return Err(ModelError::invalid(
                            "range",
                            format!("more than {MAX_SWEEP_POINTS} points"),
                        ));
                    }
                    match next(v) {
                        Some(n) => v = n,
                        None => break,
                    }
                }
                out
            }
        };
        if values.is_empty() {
            return Err(ModelError::invalid("values", "sweep has no values"));
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(ModelError::invalid("values", "sweep values must be strictly monotone"));
        }
        Ok(values)
    }
}

impl fmt::Display for SweepValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValues::List(v) => {
                let parts: Vec<String> = v.iter().map(|d| d.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            SweepValues::Range {
                from,
                to,
                step: Step::Add(d),
            } => write!(f, "{from}:{to}:{d}"),
            SweepValues::Range {
                from,
                to,
                step: Step::Multiply(m),
            } => write!(f, "{from}:{to}:x{m}"),
        }
    }
}

impl FromStr for SweepValues {
    type Err = ModelError;

    /// `1,2,4` is a list; `FROM:TO:STEP` an arithmetic range and
    /// `FROM:TO:xFACTOR` a geometric one.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [from, to, step] = parts[..] else {
                return Err(ModelError::invalid("range", format!("`{s}` is not FROM:TO:STEP")));
            };
            let step = step.trim();
            let step = match step.strip_prefix(['x', '*']) {
                Some(f) => Step::Multiply(f.parse()?),
                None => Step::Add(step.parse()?),
            };
            return Ok(SweepValues::Range {
                from: from.parse()?,
                to: to.parse()?,
                step,
            });
        }
        s.split(',')
            .map(|v| v.parse())
            .collect::<Result<Vec<_>>>()
            .map(SweepValues::List)
    }
}

impl Serialize for SweepValues {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SweepValues {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: Param,
    pub values: SweepValues,
    #[serde(default)]
    pub links: Vec<Link>,
}

impl SweepSpec {
    pub fn new(parameter: Param, values: Vec<Decimal>) -> Self {
        SweepSpec {
            parameter,
            values: SweepValues::List(values),
            links: Vec::new(),
        }
    }

    pub fn integers(parameter: Param, values: &[u64]) -> Self {
        Self::new(parameter, values.iter().map(|&v| Decimal::from_integer(v)).collect())
    }

    pub fn with_links(mut self, links: Vec<Link>) -> Self {
        self.links = links;
        self
    }

    fn validate(&self, accelerator: Accelerator) -> Result<Vec<Decimal>> {
        self.parameter.check_applies(accelerator)?;
        for link in &self.links {
            link.validate()?;
            link.target.check_applies(accelerator)?;
            link.source.check_applies(accelerator)?;
        }
        let values = self.values.expand()?;
        if !self.parameter.is_fractional() {
            if let Some(v) = values.iter().find(|v| !v.is_integer()) {
                return Err(ModelError::invalid(
                    self.parameter.symbol(),
                    format!("{v} is not a whole number"),
                ));
            }
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: Decimal,
    pub tile: TileParams,
    pub breakdown: MovementBreakdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub spec: SweepSpec,
    pub accelerator: Accelerator,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn totals(&self) -> impl Iterator<Item = (Decimal, u128, u128)> + '_ {
        self.points
            .iter()
            .map(|p| (p.value, p.breakdown.total_dm_bits, p.breakdown.total_iterations))
    }
}

/// Applies the swept value and the links to a copy of `tile` and `hw`.
pub fn configure_point(
    spec: &SweepSpec,
    value: Decimal,
    tile: &TileParams,
    hw: &HardwareConfig,
) -> Result<(TileParams, HardwareConfig)> {
    let (mut tile, mut hw) = (*tile, *hw);
    if spec.parameter != Param::FittingFactor {
        spec.parameter.set(value, &mut tile, &mut hw)?;
    }
    for link in &spec.links {
        link.apply(&mut tile, &mut hw)?;
    }
    // The array size depends on K and N, so it is resolved after the links.
    if spec.parameter == Param::FittingFactor {
        spec.parameter.set(value, &mut tile, &mut hw)?;
    }
    Ok((tile, hw))
}

/// Evaluates the model at every swept value. Points are independent and
/// evaluated in parallel; the result keeps the sweep order.
pub fn run_sweep(spec: &SweepSpec, tile: &TileParams, hw: &HardwareConfig) -> Result<SweepSeries> {
    let values = spec.validate(hw.accelerator())?;
    let points = values
        .par_iter()
        .map(|&value| {
            let (tile, hw) = configure_point(spec, value, tile, hw)?;
            Ok(SweepPoint {
                value,
                tile,
                breakdown: hw.evaluate(&tile)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSeries {
        spec: spec.clone(),
        accelerator: hw.accelerator(),
        points,
    })
}

/// Sweeps the array fitting factor `K*N/M^2` with a square array.
pub fn fitting_factor_sweep(tile: &TileParams, cfg: &EngnConfig, factors: &[Decimal]) -> Result<SweepSeries> {
    let spec = SweepSpec::new(Param::FittingFactor, factors.to_vec());
    run_sweep(&spec, tile, &HardwareConfig::Engn(*cfg))
}

/// Smallest swept bandwidth whose total iteration count already equals the
/// count at the largest swept bandwidth.
pub fn saturation_point(series: &SweepSeries) -> Result<Decimal> {
    if series.spec.parameter != Param::B {
        return Err(ModelError::invalid(
            "series",
            format!("saturation needs a sweep over B, not {}", series.spec.parameter),
        ));
    }
    let mut points: Vec<(Decimal, u128)> = series
        .points
        .iter()
        .map(|p| (p.value, p.breakdown.total_iterations))
        .collect();
    points.sort_by_key(|p| p.0);
    if let Some(w) = points.windows(2).find(|w| w[1].1 > w[0].1) {
        return Err(ModelError::ModelViolation(format!(
            "total iterations rise from {} at B={} to {} at B={}",
            w[0].1, w[0].0, w[1].1, w[1].0
        )));
    }
    let last = points
        .last()
        .ok_or_else(|| ModelError::invalid("series", "no points"))?
        .1;
    Ok(points.iter().find(|p| p.1 == last).expect("last point matches").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_params_and_links() {
        assert_eq!("Mprime".parse::<Param>().unwrap(), Param::Mprime);
        assert!(matches!("Q".parse::<Param>(), Err(ModelError::UnknownParameter(_))));
        let l: Link = "P=10*K".parse().unwrap();
        assert_eq!(l, Link::new(Param::P, Decimal::from_integer(10), Param::K));
        let l: Link = "Ps=P".parse().unwrap();
        assert_eq!(l.coefficient, Decimal::ONE);
        assert!("gamma=2*K".parse::<Link>().is_err());
        assert!("P10K".parse::<Link>().is_err());
    }

    #[test]
    fn expands_ranges() {
        let v: SweepValues = "500:4000:x2".parse().unwrap();
        assert_eq!(v.expand().unwrap(), [500, 1000, 2000, 4000].map(Decimal::from_integer));
        let v: SweepValues = "0:1:0.25".parse().unwrap();
        assert_eq!(v.expand().unwrap(), ["0", "0.25", "0.5", "0.75", "1"].map(d));
        let v: SweepValues = "3,2,1".parse().unwrap();
        assert_eq!(v.expand().unwrap().len(), 3);
        assert!("1,3,2".parse::<SweepValues>().unwrap().expand().is_err());
        assert!("5:1:1".parse::<SweepValues>().unwrap().expand().is_err());
        assert!("1:5:0".parse::<SweepValues>().unwrap().expand().is_err());
        assert!("1:5:x1".parse::<SweepValues>().unwrap().expand().is_err());
        assert_eq!(v.to_string(), "3,2,1");
    }

    #[test]
    fn k_sweep_with_links_grows() {
        let spec = SweepSpec::integers(Param::K, &[500, 1000, 2000, 4000]).with_links(Link::default_tile_links());
        let s = run_sweep(
            &spec,
            &TileParams::default(),
            &HardwareConfig::Engn(EngnConfig::default()),
        )
        .unwrap();
        assert_eq!(s.points[2].tile.edges, 20_000);
        assert_eq!(s.points[2].tile.high_degree_vertices, 200);
        let totals: Vec<u128> = s.totals().map(|t| t.1).collect();
        assert!(totals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_point_sweep_matches_evaluate() {
        let tile = TileParams::default();
        let cfg = EngnConfig::default();
        let s = run_sweep(
            &SweepSpec::integers(Param::B, &[1000]),
            &tile,
            &HardwareConfig::Engn(cfg),
        )
        .unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].breakdown, engn::evaluate(&tile, &cfg).unwrap());
    }

    #[test]
    fn gamma_sweep_scales_loadweights() {
        let spec = SweepSpec::new(Param::Gamma, ["0", "0.25", "0.5", "0.75", "1"].map(d).to_vec());
        let s = run_sweep(
            &spec,
            &TileParams::default(),
            &HardwareConfig::Hygcn(HygcnConfig::default()),
        )
        .unwrap();
        let dm: Vec<u128> = s
            .points
            .iter()
            .map(|p| p.breakdown.level(hygcn::LOADWEIGHTS).unwrap().data_movement_bits)
            .collect();
        assert_eq!(dm, [600, 450, 300, 150, 0]);
    }

    #[test]
    fn rejects_inapplicable_and_fractional() {
        let engn = HardwareConfig::Engn(EngnConfig::default());
        let err = run_sweep(
            &SweepSpec::new(Param::Gamma, vec![d("0.5")]),
            &TileParams::default(),
            &engn,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NotApplicable { .. }));
        let err = run_sweep(
            &SweepSpec::new(Param::K, vec![d("10.5")]),
            &TileParams::default(),
            &engn,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidParameter { .. }));
        let hy = HardwareConfig::Hygcn(HygcnConfig::default());
        assert!(run_sweep(&SweepSpec::integers(Param::M, &[8]), &TileParams::default(), &hy).is_err());
    }

    #[test]
    fn fitting_factor_rows() {
        // K*N = 3600 is a perfect square.
        assert_eq!(rows_for_fitting_factor(120, 30, Decimal::ONE).unwrap(), 60);
        assert_eq!(rows_for_fitting_factor(100, 30, Decimal::ONE).unwrap(), 55);
        assert_eq!(rows_for_fitting_factor(100, 30, d("0.25")).unwrap(), 110);
        assert_eq!(rows_for_fitting_factor(100, 30, d("8")).unwrap(), 19);
        // sqrt(6.25) = 2.5 rounds half-up.
        assert_eq!(rows_for_fitting_factor(25, 1, d("4")).unwrap(), 3);
        assert!(rows_for_fitting_factor(0, 30, Decimal::ONE).is_err());
        assert!(rows_for_fitting_factor(10, 30, Decimal::ZERO).is_err());
    }

    #[test]
    fn saturation_on_small_tile() {
        let b: Vec<u64> = (1..=12).map(|e| 1u64 << e).collect();
        let spec = SweepSpec::integers(Param::B, &b);
        let tile = TileParams::with_vertices(100);
        let s = run_sweep(&spec, &tile, &HardwareConfig::Engn(EngnConfig::with_array(16, 16))).unwrap();
        // loadedges moves P*sigma = 4000 bits and only saturates once B >= 4000.
        assert_eq!(saturation_point(&s).unwrap(), Decimal::from_integer(4096));
    }

    #[test]
    fn saturation_single_point_and_errors() {
        let tile = TileParams::default();
        let hw = HardwareConfig::Engn(EngnConfig::default());
        let s = run_sweep(&SweepSpec::integers(Param::B, &[64]), &tile, &hw).unwrap();
        assert_eq!(saturation_point(&s).unwrap(), Decimal::from_integer(64));
        let s = run_sweep(&SweepSpec::integers(Param::K, &[1000]), &tile, &hw).unwrap();
        assert!(saturation_point(&s).is_err());
        let mut s = run_sweep(&SweepSpec::integers(Param::B, &[64, 128]), &tile, &hw).unwrap();
        s.points[1].breakdown.total_iterations = s.points[0].breakdown.total_iterations + 1;
        assert!(matches!(saturation_point(&s), Err(ModelError::ModelViolation(_))));
    }
}
