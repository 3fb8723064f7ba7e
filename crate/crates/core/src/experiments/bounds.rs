use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::banding::{banded_dome, BandError, BandParams};
use crate::mesh::MeshLevel;

/// Hexagon-overlap patterns per unit.
const PATTERNS: u32 = 36;
/// Internal dual edges of a 16-unit cluster.
const CLUSTER_DUAL_EDGES: u32 = 228;
const UNITS_PER_CLUSTER: u64 = 16;

/// Lower bound on the probability that a cluster's central unit is in an
/// overlap pattern: `36 / 2^228`.
pub fn rho_lower() -> BigRational {
    BigRational::new(BigInt::from(PATTERNS), BigInt::one() << CLUSTER_DUAL_EDGES)
}

/// `(1 - rho)^k` exactly, for `k = floor(H / 16)` disjoint clusters.
pub fn global_bound_exact(level: u32) -> BigRational {
    let k = hexagons(level) / UNITS_PER_CLUSTER;
    num_traits::pow(BigRational::one() - rho_lower(), k as usize)
}

fn hexagons(level: u32) -> u64 {
    20 * 4u64.pow(level)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub level: u32,
    pub hexagons: u64,
    pub clusters: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub rho_lower: BigRational,
    pub rho_lower_f64: f64,
    /// `log10((1 - rho)^clusters)`, evaluated as `clusters * ln_1p(-rho) / ln 10`.
    pub global_bound_log10: f64,
    /// `1 - (1 - rho)^clusters`, the guaranteed overlap deficit; it stays
    /// representable where the bound itself rounds to 1.
    pub global_bound_deficit: f64,
    pub p_unit: f64,
    pub p_loc: f64,
    /// `1 - (1 - p_unit * p_loc)^H`.
    pub heuristic_overlap: f64,
    #[serde(serialize_with = "ratio_as_string")]
    pub fixed_fraction: BigRational,
    pub fixed_fraction_f64: f64,
}

fn ratio_as_string<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// All bound quantities for level `L`; `p_unit` and `p_loc` are clamped to `[0, 1]`.
pub fn compute_bounds(level: u32, p_unit: f64, p_loc: f64) -> BoundsReport {
    let p_unit = p_unit.clamp(0.0, 1.0);
    let p_loc = p_loc.clamp(0.0, 1.0);
    let h = hexagons(level);
    let clusters = h / UNITS_PER_CLUSTER;
    let rho = rho_lower();
    let rho_f64 = rho.to_f64().expect("rho is a normal double");
    let ln_bound = clusters as f64 * (-rho_f64).ln_1p();
    let p = p_unit * p_loc;
    BoundsReport {
        level,
        hexagons: h,
        clusters,
        rho_lower: rho,
        rho_lower_f64: rho_f64,
        global_bound_log10: ln_bound / std::f64::consts::LN_10,
        global_bound_deficit: -ln_bound.exp_m1(),
        p_unit,
        p_loc,
        heuristic_overlap: heuristic_overlap(p, h),
        fixed_fraction: BigRational::new(BigInt::from(3), BigInt::one() << 17u32),
        fixed_fraction_f64: 3.0 / 131072.0,
    }
}

fn heuristic_overlap(p: f64, h: u64) -> f64 {
    if p >= 1.0 {
        return if h > 0 { 1.0 } else { 0.0 };
    }
    -(h as f64 * (-p).ln_1p()).exp_m1()
}

/// Decimal scientific notation with `digits` significant digits, rounded half up.
pub fn format_sci(r: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ten = BigInt::from(10);
    let estimate = ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let scaled = |e: i64| -> BigInt {
        let shift = digits as i64 - 1 - e;
        let (n, d) = if shift >= 0 {
            (&num * num_traits::pow(ten.clone(), shift as usize), den.clone())
        } else {
            (num.clone(), &den * num_traits::pow(ten.clone(), (-shift) as usize))
        };
        (n * 2 + &d) / (d * 2)
    };
    let lo = num_traits::pow(ten.clone(), digits - 1);
    let hi = &lo * &ten;
    let mut e = estimate;
    let mut m = scaled(e);
    while m >= hi {
        e += 1;
        m = scaled(e);
    }
    while m < lo {
        e -= 1;
        m = scaled(e);
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Measured and expected element counts of `P_L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountsReport {
    pub level: u32,
    /// `(F, E, V, H)` as built.
    pub built: (usize, usize, usize, usize),
    /// `(140, 300, 160, 20) * 4^L`, with `+ 2` on `V`.
    pub expected: (usize, usize, usize, usize),
    /// `160 * 4^L`, the vertex formula without the `+ 2` from Euler's relation.
    pub vertex_formula_without_two: usize,
}

impl CountsReport {
    pub fn ok(&self) -> bool {
        self.built == self.expected
    }
}

pub fn verify_counts(level: u32, params: BandParams) -> Result<CountsReport, BandError> {
    let (mesh, labeling) = banded_dome(MeshLevel(level), params)?;
    let s = 4usize.pow(level);
    Ok(CountsReport {
        level,
        built: (mesh.num_faces(), mesh.num_edges(), mesh.num_vertices(), labeling.num_units()),
        expected: (140 * s, 300 * s, 160 * s + 2, 20 * s),
        vertex_formula_without_two: 160 * s,
    })
}
