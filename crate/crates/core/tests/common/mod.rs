//! Shared test support: a second, independent evaluation of every movement
//! level written straight from the printed cost expressions, plus golden
//! file and CLI helpers.
//!
//! Nothing here calls the library's arithmetic. Ceilings use the
//! `(a + b - 1) / b` form, the EnGN ring term uses signed math with an
//! explicit clamp, and the weight-reuse factor is carried in thousandths.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use gnnflow::{engn, hygcn, Accelerator, Decimal, EngnConfig, HygcnConfig, TileParams, TransferMetrics};
use rand::Rng;

/// One random parameter point, in plain integers.
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub k: u64,
    pub l: u64,
    pub p: u64,
    pub n: u64,
    pub t: u64,
    pub sigma: u64,
    pub b: u64,
    pub bstar: u64,
    pub m: u64,
    pub ma: u64,
    pub mc: u64,
    /// Weight reuse in thousandths, 0..=1000.
    pub gamma_milli: u64,
    pub ps: u64,
    pub simd: u64,
}

impl Draw {
    pub fn random<R: Rng>(rng: &mut R) -> Draw {
        let k = rng.gen_range(0..=5000);
        let p = rng.gen_range(0..=50_000);
        Draw {
            k,
            l: rng.gen_range(0..=k),
            p,
            n: rng.gen_range(0..=256),
            t: rng.gen_range(0..=128),
            sigma: [1, 2, 4, 8, 16, 32][rng.gen_range(0..6)],
            b: rng.gen_range(1..=50_000),
            bstar: rng.gen_range(1..=50_000),
            m: rng.gen_range(1..=512),
            ma: rng.gen_range(1..=256),
            mc: rng.gen_range(1..=16_384),
            gamma_milli: rng.gen_range(0..=1000),
            ps: rng.gen_range(0..=p),
            simd: [4, 8, 16][rng.gen_range(0..3)],
        }
    }

    pub fn tile(&self) -> TileParams {
        TileParams {
            vertices: self.k,
            high_degree_vertices: self.l,
            edges: self.p,
            in_features: self.n,
            out_features: self.t,
        }
    }

    pub fn engn(&self) -> EngnConfig {
        let mut c = EngnConfig::with_array(self.m, self.m);
        c.common.precision_bits = self.sigma;
        c.common.bandwidth = self.b;
        c.cache_bandwidth = Some(self.bstar);
        c
    }

    pub fn hygcn(&self) -> HygcnConfig {
        let mut c = HygcnConfig::default();
        c.common.precision_bits = self.sigma;
        c.common.bandwidth = self.b;
        c.aggregation_pes = self.ma;
        c.combination_pes = self.mc;
        c.systolic_reuse = format!("{}.{:03}", self.gamma_milli / 1000, self.gamma_milli % 1000)
            .parse::<Decimal>()
            .unwrap();
        c.sliding_edges = Some(self.ps);
        c.simd_width = self.simd;
        c
    }
}

/// Chunk, iteration count and data movement of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub chunk: u128,
    pub iterations: u128,
    pub dm: u128,
}

// Kept in the textbook form on purpose, independent of the library.
#[allow(clippy::manual_div_ceil)]
fn ceil(a: u128, b: u128) -> u128 {
    (a + b - 1) / b
}

fn min_of(xs: &[u128]) -> u128 {
    xs.iter().copied().fold(u128::MAX, u128::min)
}

/// `min(total, caps...) * mult * ceil(total / min(caps...))`, as printed.
fn row(total: u128, caps: &[u128], mult: u128) -> Expected {
    let mut all = caps.to_vec();
    all.push(total);
    let chunk = min_of(&all);
    let iterations = ceil(total, min_of(caps));
    Expected {
        chunk,
        iterations,
        dm: chunk * mult * iterations,
    }
}

/// Signed ceiling for the ring term, which goes negative when N < M.
fn ceil_signed(a: i128, b: i128) -> i128 {
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

pub const LEVELS: [(Accelerator, &str); 15] = [
    (Accelerator::Engn, "loadvertcache"),
    (Accelerator::Engn, "loadvertL2"),
    (Accelerator::Engn, "loadedges"),
    (Accelerator::Engn, "loadweights"),
    (Accelerator::Engn, "aggregate"),
    (Accelerator::Engn, "writecache"),
    (Accelerator::Engn, "writeL2"),
    (Accelerator::Hygcn, "loadvertL2"),
    (Accelerator::Hygcn, "loadedges"),
    (Accelerator::Hygcn, "loadweights"),
    (Accelerator::Hygcn, "aggregate"),
    (Accelerator::Hygcn, "writeinterphase"),
    (Accelerator::Hygcn, "combine"),
    (Accelerator::Hygcn, "readinterphase"),
    (Accelerator::Hygcn, "writeL2"),
];

/// The level as evaluated from its printed expression.
pub fn expected(acc: Accelerator, level: &str, d: &Draw) -> Expected {
    let [k, l, p, n, t, s, b, bs, m, ma, mc, ps, simd] = [
        d.k, d.l, d.p, d.n, d.t, d.sigma, d.b, d.bstar, d.m, d.ma, d.mc, d.ps, d.simd,
    ]
    .map(u128::from);
    match (acc, level) {
        (Accelerator::Engn, "loadvertcache") => row(l * s, &[bs, m * s], n),
        (Accelerator::Engn, "loadvertL2") => row((k - l) * s, &[b, m * s], n),
        (Accelerator::Engn, "loadedges") => row(p * s, &[b], 1),
        (Accelerator::Engn, "loadweights") => row(t * s, &[b, m * s], n),
        (Accelerator::Engn, "aggregate") => {
            let (ki, ni, mi) = (k as i128, n as i128, m as i128);
            let ring = ceil_signed(ki * (ni - mi), mi).max(0);
            let iterations = (ceil_signed(ki, mi) + ring) as u128;
            let chunk = m * (m - 1) * t * s;
            Expected {
                chunk,
                iterations,
                dm: chunk * iterations,
            }
        }
        (Accelerator::Engn, "writecache") => row(l * s, &[m * s, bs], t),
        (Accelerator::Engn, "writeL2") => row((k - l) * s, &[m * s, b], t),
        (Accelerator::Hygcn, "loadvertL2") => row(k * s, &[b, ma * s], n),
        (Accelerator::Hygcn, "loadedges") => row(ps * s, &[b], 1),
        (Accelerator::Hygcn, "loadweights") => {
            // N*T*sigma*(1 - g/1000), rounded half up.
            let keep = 1000 - u128::from(d.gamma_milli);
            let total = (2 * n * t * s * keep + 1000) / 2000;
            row(total, &[b, mc * s], 1)
        }
        (Accelerator::Hygcn, "aggregate") => row(n * ps * s, &[ma * simd], 1),
        (Accelerator::Hygcn, "writeinterphase") => row(k * n * s, &[b], 1),
        (Accelerator::Hygcn, "combine") => {
            let dm = k * n * s + n * t * s;
            let iterations = u128::from(dm > 0);
            Expected {
                chunk: dm,
                iterations,
                dm,
            }
        }
        (Accelerator::Hygcn, "readinterphase") => row(ps * n * s, &[b, mc], 1),
        (Accelerator::Hygcn, "writeL2") => row(k * t * s, &[b], 1),
        _ => panic!("no such level {acc}/{level}"),
    }
}

/// The same level from the library.
pub fn actual(acc: Accelerator, level: &str, d: &Draw) -> TransferMetrics {
    let tile = d.tile();
    let r = match acc {
        Accelerator::Engn => {
            let c = d.engn();
            match level {
                "loadvertcache" => engn::loadvertcache(&tile, &c),
                "loadvertL2" => engn::loadvert_l2(&tile, &c),
                "loadedges" => engn::loadedges(&tile, &c),
                "loadweights" => engn::loadweights(&tile, &c),
                "aggregate" => engn::aggregate(&tile, &c),
                "writecache" => engn::writecache(&tile, &c),
                "writeL2" => engn::write_l2(&tile, &c),
                _ => panic!("no such level {level}"),
            }
        }
        Accelerator::Hygcn => {
            let c = d.hygcn();
            match level {
                "loadvertL2" => hygcn::loadvert_l2(&tile, &c),
                "loadedges" => hygcn::loadedges(&tile, &c),
                "loadweights" => hygcn::loadweights(&tile, &c),
                "aggregate" => hygcn::aggregate(&tile, &c),
                "writeinterphase" => hygcn::writeinterphase(&tile, &c),
                "combine" => hygcn::combine(&tile, &c),
                "readinterphase" => hygcn::readinterphase(&tile, &c),
                "writeL2" => hygcn::write_l2(&tile, &c),
                _ => panic!("no such level {level}"),
            }
        }
    };
    r.unwrap_or_else(|e| panic!("{acc}/{level} failed on {d:?}: {e}"))
}

/// Compares one level on `draws`; returns the first mismatch.
pub fn check_level(acc: Accelerator, level: &str, draws: &[Draw]) -> Result<(), String> {
    for d in draws {
        let want = expected(acc, level, d);
        let got = actual(acc, level, d);
        let got = Expected {
            chunk: got.chunk_bits,
            iterations: got.iterations,
            dm: got.data_movement_bits,
        };
        if got != want {
            return Err(format!("{acc}/{level}: expected {want:?}, got {got:?} for {d:?}"));
        }
    }
    Ok(())
}

pub fn draws(seed: u64, count: usize) -> Vec<Draw> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Draw::random(&mut rng)).collect()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares `content` with the committed golden file, or rewrites the file
/// when `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, content: &str) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, content).map_err(|e| format!("writing {}: {e}", path.display()))?;
        return Ok(());
    }
    let committed = std::fs::read_to_string(&path)
        .map_err(|e| format!("reading {}: {e} (run with UPDATE_GOLDEN=1)", path.display()))?;
    if committed == content {
        Ok(())
    } else {
        Err(format!("{} differs from the committed golden file", path.display()))
    }
}

pub fn gnnflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnnflow"))
        .args(args)
        .env_remove("GNNFLOW_CONFIG")
        .output()
        .expect("gnnflow runs")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = gnnflow(args);
    assert!(
        out.status.success(),
        "gnnflow {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}
