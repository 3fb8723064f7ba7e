//! Exact rational clipping and a generator of small random layouts.

use std::collections::BTreeSet;

use bandfold::geom::Vec2;
use bandfold::unfold::PlanarLayout;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: i64 = 1_000_000_000_000;

pub type Q = BigRational;

/// A point on the 1e-12 grid, kept as integer numerators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P(pub i64, pub i64);

impl P {
    pub fn snap(x: f64, y: f64) -> P {
        P((x * GRID as f64).round() as i64, (y * GRID as f64).round() as i64)
    }

    pub fn float(self) -> Vec2 {
        Vec2::new(self.0 as f64 / GRID as f64, self.1 as f64 / GRID as f64)
    }

    pub fn exact(self) -> (Q, Q) {
        let g = BigInt::from(GRID);
        (Q::new(self.0.into(), g.clone()), Q::new(self.1.into(), g))
    }
}

fn cross(a: &(Q, Q), b: &(Q, Q), p: &(Q, Q)) -> Q {
    (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0)
}

pub fn exact_intersection_area(subject: &[P], clip: &[P]) -> Q {
    let mut current: Vec<(Q, Q)> = subject.iter().map(|p| p.exact()).collect();
    let clip: Vec<(Q, Q)> = clip.iter().map(|p| p.exact()).collect();
    for k in 0..clip.len() {
        if current.is_empty() {
            break;
        }
        let (a, b) = (&clip[k], &clip[(k + 1) % clip.len()]);
        let mut next = Vec::new();
        for i in 0..current.len() {
            let (p, q) = (&current[i], &current[(i + 1) % current.len()]);
            let (sp, sq) = (cross(a, b, p), cross(a, b, q));
            let (inp, inq) = (!sp.is_negative(), !sq.is_negative());
            if inp {
                next.push(p.clone());
            }
            if inp != inq {
                let t = &sp / (&sp - &sq);
                next.push((&p.0 + (&q.0 - &p.0) * &t, &p.1 + (&q.1 - &p.1) * &t));
            }
        }
        current = next;
    }
    let n = current.len();
    let twice: Q = (0..n)
        .map(|i| {
            let (p, q) = (&current[i], &current[(i + 1) % n]);
            &p.0 * &q.1 - &q.0 * &p.1
        })
        .fold(Q::zero(), |acc, x| acc + x);
    twice / BigInt::from(2)
}

/// Convex CCW polygon with 3..=6 corners around `(cx, cy)`.
pub fn random_convex(rng: &mut ChaCha8Rng, cx: f64, cy: f64, radius: f64) -> Vec<P> {
    let n = rng.random_range(3..=6);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let poly: Vec<P> = angles.iter().map(|a| P::snap(cx + radius * a.cos(), cy + radius * a.sin())).collect();
    if exact_area(&poly) <= Q::zero() {
        return vec![P::snap(cx, cy), P::snap(cx + radius, cy), P::snap(cx, cy + radius)];
    }
    poly
}

pub fn exact_area(poly: &[P]) -> Q {
    let n = poly.len();
    let mut sum = Q::zero();
    for i in 0..n {
        let (p, q) = (poly[i].exact(), poly[(i + 1) % n].exact());
        sum += &p.0 * &q.1 - &q.0 * &p.1;
    }
    sum / BigInt::from(2)
}

/// The reflection of `poly` across its edge `k`, with the shared corners
/// copied exactly, as an unfolding places a neighbour.
pub fn reflect_across(poly: &[P], k: usize) -> Vec<P> {
    let n = poly.len();
    let (a, b) = (poly[k], poly[(k + 1) % n]);
    let (fa, fb) = (a.float(), b.float());
    let d = (fb - fa).normalize();
    let mut out: Vec<P> = poly
        .iter()
        .map(|&p| {
            if p == a || p == b {
                return p;
            }
            let v = p.float() - fa;
            let r = fa + d * (2.0 * v.dot(&d)) - v;
            P::snap(r.x, r.y)
        })
        .collect();
    out.reverse();
    out
}

pub fn random_layout(seed: u64) -> Vec<Vec<P>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let faces = rng.random_range(2..=12);
    let mut polys: Vec<Vec<P>> = Vec::new();
    while polys.len() < faces {
        let kind = rng.random_range(0..4);
        if kind == 0 && !polys.is_empty() {
            // Edge-adjacent neighbour: touches along a shared edge only.
            let base = polys[rng.random_range(0..polys.len())].clone();
            let k = rng.random_range(0..base.len());
            let r = reflect_across(&base, k);
            if exact_area(&r) > Q::zero() {
                polys.push(r);
            }
        } else if kind == 1 && !polys.is_empty() {
            // Nested copy, shrunk about a corner-weighted centre.
            let base = &polys[rng.random_range(0..polys.len())];
            let c = base.iter().fold(Vec2::zeros(), |s, p| s + p.float()) / base.len() as f64;
            let shrunk: Vec<P> = base
                .iter()
                .map(|p| {
                    let q = c + (p.float() - c) * 0.3;
                    P::snap(q.x, q.y)
                })
                .collect();
            if exact_area(&shrunk) > Q::zero() {
                polys.push(shrunk);
            }
        } else if kind == 2 && !polys.is_empty() {
            // Shares only a corner with an existing face.
            let base = &polys[rng.random_range(0..polys.len())];
            let v = base[rng.random_range(0..base.len())].float();
            let c = base.iter().fold(Vec2::zeros(), |s, p| s + p.float()) / base.len() as f64;
            let out = (v - c).normalize();
            let side = Vec2::new(-out.y, out.x) * 0.05;
            let (l, r) = (v + out * 0.1 - side, v + out * 0.1 + side);
            let tri = vec![P::snap(v.x, v.y), P::snap(l.x, l.y), P::snap(r.x, r.y)];
            if exact_area(&tri) > Q::zero() {
                polys.push(tri);
            }
        } else {
            let (cx, cy) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let radius = rng.random_range(0.02..0.3);
            polys.push(random_convex(&mut rng, cx, cy, radius));
        }
    }
    polys
}

pub fn to_layout(polys: &[Vec<P>]) -> PlanarLayout {
    PlanarLayout {
        polygons: polys.iter().map(|p| Some(p.iter().map(|q| q.float()).collect())).collect(),
        root: 0,
        arcs: Vec::new(),
        scale: 1.0,
    }
}

/// Pairs whose exact intersection area exceeds `1e-10` (the layouts have unit scale).
pub fn oracle_pairs(polys: &[Vec<P>]) -> BTreeSet<(usize, usize)> {
    let threshold = Q::new(BigInt::from(1), BigInt::from(10_000_000_000i64));
    let mut out = BTreeSet::new();
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if exact_intersection_area(&polys[i], &polys[j]) > threshold {
                out.insert((i, j));
            }
        }
    }
    out
}
