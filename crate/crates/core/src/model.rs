//! Parameter types shared by every accelerator model and the bounded-transfer
//! primitive that each movement-level formula instantiates.
//!
//! All bit and iteration arithmetic is exact integer arithmetic. The only
//! fractional inputs (systolic reuse and sweep coefficients) are carried as
//! [`Decimal`] values and rounded explicitly where they meet bit counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ModelError, Result};

/// Exact ceiling of `a / b` in integer arithmetic.
pub fn ceil_div(a: u128, b: u128) -> Result<u128> {
    if b == 0 {
        return Err(ModelError::DivisionByZero);
    }
    Ok(a.div_ceil(b))
}

pub(crate) fn mul(a: u128, b: u128, what: &str) -> Result<u128> {
    a.checked_mul(b).ok_or_else(|| ModelError::Overflow(what.to_string()))
}

pub(crate) fn add(a: u128, b: u128, what: &str) -> Result<u128> {
    a.checked_add(b).ok_or_else(|| ModelError::Overflow(what.to_string()))
}

/// A non-negative decimal number held exactly as `units / 10^scale`.
///
/// Floats coming from config files are converted through their shortest
/// round-trip representation, so `0.1` is the decimal one tenth rather than
/// the nearest binary fraction.
#[derive(Debug, Clone, Copy)]
pub struct Decimal {
    units: u64,
    scale: u32,
}

const MAX_SCALE: u32 = 18;

impl Decimal {
    pub const ZERO: Decimal = Decimal { units: 0, scale: 0 };
    pub const ONE: Decimal = Decimal { units: 1, scale: 0 };

    pub fn from_integer(v: u64) -> Self {
        Decimal { units: v, scale: 0 }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(ModelError::invalid(
                "decimal",
                format!("{v} is not a finite non-negative number"),
            ));
        }
        format!("{v}").parse()
    }

    pub fn to_f64(self) -> f64 {
        // Parsing the decimal text is correctly rounded, which keeps
        // from_f64/to_f64 an exact round trip.
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Numerator and denominator of the exact value.
    pub fn ratio(self) -> (u128, u128) {
        (self.units as u128, 10u128.pow(self.scale))
    }

    pub fn is_integer(self) -> bool {
        let (n, d) = self.ratio();
        n % d == 0
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(self) -> Option<u64> {
        let (n, d) = self.ratio();
        (n % d == 0).then(|| (n / d) as u64)
    }

    pub fn is_zero(self) -> bool {
        self.units == 0
    }

    fn rescaled(self, scale: u32) -> Option<u64> {
        self.units.checked_mul(10u64.checked_pow(scale - self.scale)?)
    }

    fn normalized(mut self) -> Self {
        while self.scale > 0 && self.units.is_multiple_of(10) {
            self.units /= 10;
            self.scale -= 1;
        }
        self
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        let scale = self.scale.max(other.scale);
        let units = self.rescaled(scale)?.checked_add(other.rescaled(scale)?)?;
        Some(Decimal { units, scale }.normalized())
    }

    pub fn checked_mul(self, other: Decimal) -> Option<Decimal> {
        let units = self.units.checked_mul(other.units)?;
        let d = Decimal {
            units,
            scale: self.scale + other.scale,
        }
        .normalized();
        (d.scale <= MAX_SCALE).then_some(d)
    }

    /// `value * self`, rounded half-up to an integer.
    pub fn scale_round(self, value: u128) -> Result<u128> {
        let (n, d) = self.ratio();
        let x = mul(value, n, "decimal scaling")?;
        let q = x / d;
        let r = x % d;
        Ok(if 2 * r >= d { q + 1 } else { q })
    }

    /// `value * (1 - self)` rounded half-up; requires `self <= 1`.
    pub fn complement_scale_round(self, value: u128) -> Result<u128> {
        let (n, d) = self.ratio();
        if n > d {
            return Err(ModelError::invalid("gamma", "must lie in [0, 1]"));
        }
        let x = mul(value, d - n, "reuse complement")?;
        let q = x / d;
        let r = x % d;
        Ok(if 2 * r >= d { q + 1 } else { q })
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Decimal {}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = self.ratio();
        let (c, d) = other.ratio();
        // units < 2^64 and denominators <= 10^18, so the products fit.
        (a * d).cmp(&(c * b))
    }
}

impl FromStr for Decimal {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ModelError::invalid("decimal", format!("cannot parse `{s}`"));
        let s = s.trim();
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() as u32 > MAX_SCALE {
            return Err(ModelError::invalid(
                "decimal",
                format!("`{s}` has more than {MAX_SCALE} fractional digits"),
            ));
        }
        let digits = format!("{int}{frac}");
        let units = if digits.is_empty() {
            0
        } else {
            digits.parse::<u64>().map_err(|_| bad())?
        };
        Ok(Decimal {
            units,
            scale: frac.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let d = 10u64.pow(self.scale);
        write!(
            f,
            "{}.{:0width$}",
            self.units / d,
            self.units % d,
            width = self.scale as usize
        )
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Decimal::from_f64(v).map_err(serde::de::Error::custom)
    }
}

/// One graph tile as seen by the accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileParams {
    #[serde(rename = "K")]
    pub vertices: u64,
    #[serde(rename = "L")]
    pub high_degree_vertices: u64,
    #[serde(rename = "P")]
    pub edges: u64,
    #[serde(rename = "N")]
    pub in_features: u64,
    #[serde(rename = "T")]
    pub out_features: u64,
}

impl TileParams {
    pub const DEFAULT_VERTICES: u64 = 1000;
    pub const DEFAULT_IN_FEATURES: u64 = 30;
    pub const DEFAULT_OUT_FEATURES: u64 = 5;
    /// Edges per vertex used when a tile's edge count is not given.
    pub const EDGES_PER_VERTEX: u64 = 10;

    /// Tile with `K` vertices and the default linkage: `P = 10K`,
    /// `L = round(0.1K)`, `N = 30`, `T = 5`.
    pub fn with_vertices(vertices: u64) -> Self {
        TileParams {
            vertices,
            high_degree_vertices: default_high_degree(vertices),
            edges: vertices * Self::EDGES_PER_VERTEX,
            in_features: Self::DEFAULT_IN_FEATURES,
            out_features: Self::DEFAULT_OUT_FEATURES,
        }
    }

    /// Every dimension zero, including the feature lengths.
    pub fn empty() -> Self {
        TileParams {
            vertices: 0,
            high_degree_vertices: 0,
            edges: 0,
            in_features: 0,
            out_features: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.high_degree_vertices > self.vertices {
            return Err(ModelError::invalid(
                "L",
                format!(
                    "high-degree vertices ({}) exceed tile vertices K ({})",
                    self.high_degree_vertices, self.vertices
                ),
            ));
        }
        Ok(())
    }

    /// Vertices that are served from L2 rather than the vertex cache.
    pub fn low_degree_vertices(&self) -> u64 {
        self.vertices - self.high_degree_vertices
    }
}

impl Default for TileParams {
    fn default() -> Self {
        TileParams::with_vertices(Self::DEFAULT_VERTICES)
    }
}

/// `round(0.1 * K)`, half-up.
pub fn default_high_degree(vertices: u64) -> u64 {
    (vertices + 5) / 10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonHwParams {
    /// Bits per element (sigma).
    #[serde(rename = "sigma")]
    pub precision_bits: u64,
    /// L2 bandwidth in bits per iteration (B).
    #[serde(rename = "B")]
    pub bandwidth: u64,
}

impl CommonHwParams {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 1 {
            return Err(ModelError::invalid("sigma", "must be >= 1"));
        }
        if self.bandwidth < 1 {
            return Err(ModelError::invalid("B", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for CommonHwParams {
    fn default() -> Self {
        CommonHwParams {
            precision_bits: 4,
            bandwidth: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngnConfig {
    #[serde(flatten)]
    pub common: CommonHwParams,
    /// PE array rows (M).
    #[serde(rename = "M")]
    pub pe_rows: u64,
    /// PE array columns (M'). Only the fitting-factor study reads it.
    #[serde(rename = "Mprime")]
    pub pe_cols: u64,
    /// Vertex-cache bandwidth (B*); follows `B` when unset.
    #[serde(rename = "Bstar", default, skip_serializing_if = "Option::is_none")]
    pub cache_bandwidth: Option<u64>,
}

impl EngnConfig {
    pub fn with_array(pe_rows: u64, pe_cols: u64) -> Self {
        EngnConfig {
            pe_rows,
            pe_cols,
            ..Default::default()
        }
    }

    pub fn effective_cache_bandwidth(&self) -> u64 {
        self.cache_bandwidth.unwrap_or(self.common.bandwidth)
    }

    pub fn validate(&self) -> Result<()> {
        self.common.validate()?;
        if self.pe_rows < 1 {
            return Err(ModelError::invalid("M", "must be >= 1"));
        }
        if self.pe_cols < 1 {
            return Err(ModelError::invalid("Mprime", "must be >= 1"));
        }
        if self.cache_bandwidth == Some(0) {
            return Err(ModelError::invalid("Bstar", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for EngnConfig {
    /// A single 128x16 PE array.
    fn default() -> Self {
        EngnConfig {
            common: CommonHwParams::default(),
            pe_rows: 128,
            pe_cols: 16,
            cache_bandwidth: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HygcnConfig {
    #[serde(flatten)]
    pub common: CommonHwParams,
    /// SIMD cores in the aggregation engine (Ma).
    #[serde(rename = "Ma")]
    pub aggregation_pes: u64,
    /// PEs in the combination systolic array (Mc).
    #[serde(rename = "Mc")]
    pub combination_pes: u64,
    /// Fraction of weight traffic avoided by systolic reuse, in [0, 1].
    #[serde(rename = "gamma")]
    pub systolic_reuse: Decimal,
    /// Edges left after window sliding (Ps); follows the tile's `P` when unset.
    #[serde(rename = "Ps", default, skip_serializing_if = "Option::is_none")]
    pub sliding_edges: Option<u64>,
    /// Feature components each aggregation core handles per iteration.
    pub simd_width: u64,
    /// Read the inter-phase cap as `Mc * sigma` bits instead of `Mc` bits.
    pub mc_cap_in_elements: bool,
}

impl HygcnConfig {
    pub const DEFAULT_SIMD_WIDTH: u64 = 8;

    pub fn effective_sliding_edges(&self, tile: &TileParams) -> u64 {
        self.sliding_edges.unwrap_or(tile.edges)
    }

    pub fn validate(&self) -> Result<()> {
        self.common.validate()?;
        if self.aggregation_pes < 1 {
            return Err(ModelError::invalid("Ma", "must be >= 1"));
        }
        if self.combination_pes < 1 {
            return Err(ModelError::invalid("Mc", "must be >= 1"));
        }
        if self.systolic_reuse > Decimal::ONE {
            return Err(ModelError::invalid(
                "gamma",
                format!("{} is outside the range [0, 1]", self.systolic_reuse),
            ));
        }
        if self.simd_width < 1 {
            return Err(ModelError::invalid("simd_width", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for HygcnConfig {
    /// 32 SIMD aggregation cores and an 8x4x128 systolic array.
    fn default() -> Self {
        HygcnConfig {
            common: CommonHwParams::default(),
            aggregation_pes: 32,
            combination_pes: 8 * 4 * 128,
            systolic_reuse: Decimal::ZERO,
            sliding_edges: None,
            simd_width: Self::DEFAULT_SIMD_WIDTH,
            mc_cap_in_elements: false,
        }
    }
}

/// Source and destination of a movement level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HierarchyTag {
    L1toL1,
    L2toL1,
    L1toL2,
    CacheToL1,
    L1toCache,
}

impl HierarchyTag {
    pub fn notation(self) -> &'static str {
        match self {
            HierarchyTag::L1toL1 => "L1--L1",
            HierarchyTag::L2toL1 => "L2--L1",
            HierarchyTag::L1toL2 => "L1--L2",
            HierarchyTag::CacheToL1 => "L2*--L1",
            HierarchyTag::L1toCache => "L1--L2*",
        }
    }
}

impl fmt::Display for HierarchyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.notation())
    }
}

/// Result of moving `total_bits` through the narrowest of `caps`, repeated
/// `multiplier` times per iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTransfer {
    pub total_bits: u128,
    pub caps: Vec<u128>,
    pub multiplier: u64,
    pub chunk_bits: u128,
    pub iterations: u128,
    pub data_movement_bits: u128,
    pub payload_bits: u128,
}

/// `chunk = min(total, min(caps))`, `iterations = ceil(total / min(caps))`,
/// `data movement = chunk * multiplier * iterations`,
/// `payload = total * multiplier`.
pub fn bounded_transfer(total_bits: u128, caps: &[u128], multiplier: u64) -> Result<BoundedTransfer> {
    let narrowest = *caps.iter().min().ok_or(ModelError::EmptyCaps)?;
    if narrowest < 1 {
        return Err(ModelError::CapBelowOne(narrowest));
    }
    let chunk_bits = total_bits.min(narrowest);
    let iterations = ceil_div(total_bits, narrowest)?;
    let per_iteration = mul(chunk_bits, multiplier as u128, "transfer chunk")?;
    Ok(BoundedTransfer {
        total_bits,
        caps: caps.to_vec(),
        multiplier,
        chunk_bits,
        iterations,
        data_movement_bits: mul(per_iteration, iterations, "transfer data movement")?,
        payload_bits: mul(total_bits, multiplier as u128, "transfer payload")?,
    })
}

/// The inputs a bounded-transfer level was evaluated with, kept so the level
/// can be replayed by the step oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferInput {
    pub total_bits: u128,
    pub caps: Vec<u128>,
}

/// Cost of one movement level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferMetrics {
    pub label: String,
    pub hierarchy: HierarchyTag,
    /// Hierarchy label shown in reports; differs from `hierarchy`
    /// only for EnGN's writecache.
    pub table_hierarchy: String,
    pub chunk_bits: u128,
    pub multiplier: u64,
    pub iterations: u128,
    pub data_movement_bits: u128,
    pub payload_bits: u128,
    /// `None` for levels defined by a closed form rather than a transfer loop.
    pub transfer: Option<TransferInput>,
}

impl TransferMetrics {
    pub fn from_transfer(label: &str, hierarchy: HierarchyTag, t: BoundedTransfer) -> Self {
        TransferMetrics {
            label: label.to_string(),
            hierarchy,
            table_hierarchy: hierarchy.notation().to_string(),
            chunk_bits: t.chunk_bits,
            multiplier: t.multiplier,
            iterations: t.iterations,
            data_movement_bits: t.data_movement_bits,
            payload_bits: t.payload_bits,
            transfer: Some(TransferInput {
                total_bits: t.total_bits,
                caps: t.caps,
            }),
        }
    }

    /// A level whose every iteration moves `chunk_bits` with no partial final
    /// chunk, so payload equals data movement.
    pub fn closed_form(label: &str, hierarchy: HierarchyTag, chunk_bits: u128, iterations: u128) -> Result<Self> {
        let dm = mul(chunk_bits, iterations, label)?;
        Ok(TransferMetrics {
            label: label.to_string(),
            hierarchy,
            table_hierarchy: hierarchy.notation().to_string(),
            chunk_bits,
            multiplier: 1,
            iterations,
            data_movement_bits: dm,
            payload_bits: dm,
            transfer: None,
        })
    }

    pub fn with_table_hierarchy(mut self, notation: &str) -> Self {
        self.table_hierarchy = notation.to_string();
        self
    }

    /// `data_movement_bits == chunk_bits * multiplier * iterations`.
    pub fn identity_holds(&self) -> bool {
        self.chunk_bits
            .checked_mul(self.multiplier as u128)
            .and_then(|x| x.checked_mul(self.iterations))
            == Some(self.data_movement_bits)
    }
}
