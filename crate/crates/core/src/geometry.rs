//! Lattice point sets, Minkowski sumsets, hyperplane mass coverage, the
//! non-degeneracy condition used by the main verifier, and the tightness
//! family `(f, g, h)` built from an atom plus a diffuse box.
//!
//! Hyperplane families are fibers of a primitive integer linear functional.
//! A finite support sees only finitely many distinct fiber partitions, and
//! we enumerate primitive normals up to a caller-chosen coefficient bound;
//! the bound is surfaced in reports rather than silently claimed complete.

use crate::functions::{FunctionError, Point, SparseFunction};
use crate::rational::{from_f64, rat_int, to_f64, Rational};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
    #[error("normal has {got} coordinates, expected {expected}")]
    NormalDimension { expected: usize, got: usize },
    #[error("{name} out of range: {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// A finite set of lattice points of a fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: BTreeSet<Point>,
}

impl PointSet {
    pub fn new(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ParameterOutOfRange {
                name: "dimension",
                value: 0.0,
            });
        }
        Ok(PointSet {
            dim,
            points: BTreeSet::new(),
        })
    }

    pub fn from_points<I>(dim: usize, points: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = Point>,
    {
        let mut set = PointSet::new(dim)?;
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// `{lo, …, hi}` as a one-dimensional set.
    pub fn interval(lo: i64, hi: i64) -> Self {
        PointSet::from_points(1, (lo..=hi).map(|x| vec![x])).unwrap()
    }

    /// The box `{0, …, n-1}^d`.
    pub fn cube_box(dim: usize, n: u32) -> Result<Self, GeometryError> {
        let mut set = PointSet::new(dim)?;
        let mut point = vec![0i64; dim];
        loop {
            set.insert(point.clone())?;
            // odometer increment
            let mut k = 0;
            loop {
                if k == dim {
                    return Ok(set);
                }
                point[k] += 1;
                if point[k] < n as i64 {
                    break;
                }
                point[k] = 0;
                k += 1;
            }
        }
    }

    pub fn insert(&mut self, point: Point) -> Result<bool, GeometryError> {
        if point.len() != self.dim {
            return Err(GeometryError::DimensionMismatch(self.dim, point.len()));
        }
        Ok(self.points.insert(point))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        self.points.contains(point)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }
}

/// The Minkowski sum `{a + b : a ∈ A, b ∈ B}`.
pub fn sumset(a: &PointSet, b: &PointSet) -> Result<PointSet, GeometryError> {
    if a.dim() != b.dim() {
        return Err(GeometryError::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut out = PointSet::new(a.dim())?;
    for x in a.iter() {
        for y in b.iter() {
            let z: Point = x.iter().zip(y).map(|(u, v)| u + v).collect();
            out.insert(z)?;
        }
    }
    Ok(out)
}

/// `|A+B|^{1/d} - |A|^{1/d} - |B|^{1/d}`: the zero-tolerance deficit of the
/// set-level inequality. Callers study its sign and magnitude.
pub fn bm_deficit(a: &PointSet, b: &PointSet) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let s = sumset(a, b)?;
    let d = a.dim() as f64;
    let root = |n: usize| (n as f64).powf(1.0 / d);
    Ok(root(s.len()) - root(a.len()) - root(b.len()))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All primitive integer directions `u` with `|u_i| ≤ bound`, gcd one, and
/// positive first nonzero entry (one canonical representative per line).
pub fn primitive_directions(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    assert!(dim >= 1 && bound >= 1);
    let mut out = Vec::new();
    let width = 2 * bound + 1;
    let total = (width as u128).pow(dim as u32);
    'outer: for idx in 0..total {
        let mut rem = idx;
        let mut u = vec![0i64; dim];
        for c in u.iter_mut() {
            *c = (rem % width as u128) as i64 - bound;
            rem /= width as u128;
        }
        let mut g = 0;
        for &c in &u {
            g = gcd(g, c);
        }
        if g != 1 {
            continue;
        }
        for &c in &u {
            if c != 0 {
                if c < 0 {
                    continue 'outer;
                }
                break;
            }
        }
        out.push(u);
    }
    out.sort();
    out
}

/// The partition of a function's support into fibers of `u·x`, with
/// per-level masses sorted heaviest first (ties broken by level value
/// ascending, for deterministic reports).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneFamily {
    normal: Vec<i64>,
    levels: Vec<(i64, Rational)>,
    total: Rational,
}

impl HyperplaneFamily {
    pub fn for_function(f: &SparseFunction, normal: &[i64]) -> Result<Self, GeometryError> {
        if normal.len() != f.dim() {
            return Err(GeometryError::NormalDimension {
                expected: f.dim(),
                got: normal.len(),
            });
        }
        if normal.iter().all(|&c| c == 0) {
            return Err(GeometryError::ZeroNormal);
        }
        let mut masses: BTreeMap<i64, Rational> = BTreeMap::new();
        for (x, v) in f.iter() {
            let level: i64 = x.iter().zip(normal).map(|(a, u)| a * u).sum();
            *masses.entry(level).or_insert_with(Rational::zero) += v;
        }
        let mut levels: Vec<(i64, Rational)> = masses.into_iter().collect();
        levels.sort_by(|(la, ma), (lb, mb)| mb.cmp(ma).then(la.cmp(lb)));
        Ok(HyperplaneFamily {
            normal: normal.to_vec(),
            levels,
            total: f.mass(),
        })
    }

    pub fn normal(&self) -> &[i64] {
        &self.normal
    }

    /// `(level, mass)` pairs, heaviest first.
    pub fn levels(&self) -> &[(i64, Rational)] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Mass of the `n` heaviest fibers as an exact fraction of the total.
    pub fn top_n_mass_fraction(&self, n: usize) -> Rational {
        let top: Rational = self.levels.iter().take(n).map(|(_, m)| m).sum();
        top / &self.total
    }
}

/// Exact fraction of `f`'s mass carried by the `n` heaviest parallel
/// hyperplanes orthogonal to `normal`.
pub fn top_n_hyperplane_mass(
    f: &SparseFunction,
    normal: &[i64],
    n: usize,
) -> Result<Rational, GeometryError> {
    if f.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    Ok(HyperplaneFamily::for_function(f, normal)?.top_n_mass_fraction(n))
}

/// Outcome of the hyperplane non-degeneracy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonDegeneracy {
    pub ok: bool,
    /// `1 - 2^(d - 1/p)`, the allowed top-`n` mass fraction.
    pub threshold: f64,
    pub n: usize,
    pub direction_bound: i64,
    /// Direction attaining the largest top-`n` fraction.
    pub worst_direction: Vec<i64>,
    /// That largest fraction, as `f64` (the exact value is rational).
    pub worst_fraction: f64,
}

/// Checks that no `n` parallel hyperplanes with primitive normal coefficients
/// bounded by `direction_bound` capture more than a `1 - 2^(d-1/p)` fraction
/// of `f`'s mass. Requires `0 < p < 1/d`.
pub fn non_degenerate(
    f: &SparseFunction,
    p: f64,
    n: usize,
    direction_bound: i64,
) -> Result<NonDegeneracy, GeometryError> {
    let d = f.dim();
    if !(p > 0.0 && p < 1.0 / d as f64) {
        return Err(GeometryError::ParameterOutOfRange { name: "p", value: p });
    }
    if f.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    if n == 0 {
        return Err(GeometryError::ParameterOutOfRange { name: "n", value: 0.0 });
    }
    let threshold = 1.0 - 2f64.powf(d as f64 - 1.0 / p);
    let mut worst_direction = Vec::new();
    let mut worst_fraction = Rational::zero();
    for u in primitive_directions(d, direction_bound) {
        let fraction = top_n_hyperplane_mass(f, &u, n)?;
        if fraction > worst_fraction {
            worst_fraction = fraction;
            worst_direction = u;
        }
    }
    let threshold_exact = from_f64(threshold);
    Ok(NonDegeneracy {
        ok: worst_fraction <= threshold_exact,
        threshold,
        n,
        direction_bound,
        worst_direction,
        worst_fraction: to_f64(&worst_fraction),
    })
}

/// The largest level `t` (a value of `f`) whose superlevel set cannot be
/// covered by `m` parallel hyperplanes in any scanned direction; zero when
/// even the full support is coverable. Diagnostic only.
pub fn hyperplane_cover_threshold(
    f: &SparseFunction,
    m: usize,
    direction_bound: i64,
) -> Result<Rational, GeometryError> {
    if f.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let directions = primitive_directions(f.dim(), direction_bound);
    let decomp = f.layer_cake()?;
    // Scan thresholds ascending; G_t for t in [t_{i-1}, t_i) keeps points
    // with value ≥ t_i. Work with the sub-threshold sets directly.
    let mut best = Rational::zero();
    let mut lower = Rational::zero();
    for t in decomp.thresholds() {
        // points with value > lower (equivalently ≥ t)
        let points: Vec<&Point> = f
            .iter()
            .filter(|(_, v)| **v > lower)
            .map(|(x, _)| x)
            .collect();
        let coverable = directions.iter().any(|u| {
            let mut levels = BTreeSet::new();
            for x in &points {
                levels.insert(x.iter().zip(u).map(|(a, c)| a * c).sum::<i64>());
                if levels.len() > m {
                    break;
                }
            }
            levels.len() <= m
        });
        if !coverable {
            // not coverable anywhere on [lower, t)
            best = t.clone();
        }
        lower = t.clone();
    }
    Ok(best)
}

/// The atom-plus-diffuse-box triple showing how hyperplane concentration
/// defeats the `2^d - ε` lower bound.
#[derive(Debug, Clone)]
pub struct ExtremalTriple {
    pub f: SparseFunction,
    pub g: SparseFunction,
    pub h: SparseFunction,
}

/// Builds `g = 1_o`, `f = (1-γ)·1_o + (γ/N^d)·1_{[N]^d}`, and
/// `h = 1_o + 2^(1/p)·(γ/N^d)·1_{[N]^d}` on `Z^d`, where `[N]^d =
/// {0,…,N-1}^d`. Masses: `f` and `g` have mass one exactly; `h` has mass
/// `1 + 2^(1/p)γ` up to the 1e-12 floating contract on its irrational
/// values (stored as exact dyadics of the `f64` evaluation).
pub fn extremal_instance(
    gamma: &Rational,
    n_side: u32,
    p: f64,
    d: usize,
) -> Result<ExtremalTriple, GeometryError> {
    if !(gamma > &Rational::zero() && gamma < &Rational::one()) {
        return Err(GeometryError::ParameterOutOfRange {
            name: "gamma",
            value: to_f64(gamma),
        });
    }
    if n_side == 0 {
        return Err(GeometryError::ParameterOutOfRange { name: "N", value: 0.0 });
    }
    if p <= 0.0 {
        return Err(GeometryError::ParameterOutOfRange { name: "p", value: p });
    }
    if d == 0 || d > 3 {
        return Err(GeometryError::ParameterOutOfRange { name: "d", value: d as f64 });
    }
    let origin = vec![0i64; d];
    let box_set = PointSet::cube_box(d, n_side)?;
    let n_pow_d = rat_int(n_side as i64).pow(d as i32);
    let diffuse = gamma / &n_pow_d;

    let mut f = SparseFunction::new(d)?;
    for x in box_set.iter() {
        let value = if *x == origin {
            (Rational::one() - gamma) + &diffuse
        } else {
            diffuse.clone()
        };
        f.insert(x.clone(), value)?;
    }
    debug_assert_eq!(f.mass(), Rational::one());

    let g = SparseFunction::atom(origin.clone(), Rational::one())?;

    let h_diffuse = from_f64(2f64.powf(1.0 / p) * to_f64(&diffuse));
    let mut h = SparseFunction::new(d)?;
    for x in box_set.iter() {
        let value = if *x == origin {
            Rational::one() + &h_diffuse
        } else {
            h_diffuse.clone()
        };
        h.insert(x.clone(), value)?;
    }
    Ok(ExtremalTriple { f, g, h })
}
