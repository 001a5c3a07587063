//! Deterministic random instance generators for campaigns and property
//! suites. All generators draw only from the supplied RNG, so a seeded
//! ChaCha stream reproduces instances exactly.

use crate::functions::SparseFunction;
use crate::geometry::PointSet;
use crate::rational::{rat, Rational};
use rand::Rng;

/// A sparse function on `Z^d` with up to `max_support` points in
/// `[-coord_bound, coord_bound]^d` and values `num/den`, `num ≤ max_num`,
/// `den ≤ max_den`.
pub fn sparse_function<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_support: usize,
    coord_bound: i64,
    max_num: i64,
    max_den: i64,
) -> SparseFunction {
    let target = rng.random_range(1..=max_support);
    let mut f = SparseFunction::new(dim).expect("dim ≥ 1");
    let mut placed = 0;
    while placed < target {
        let point: Vec<i64> = (0..dim)
            .map(|_| rng.random_range(-coord_bound..=coord_bound))
            .collect();
        if f.value(&point).is_some() {
            continue;
        }
        let value = rat(rng.random_range(1..=max_num), rng.random_range(1..=max_den));
        f.insert(point, value).expect("fresh point with positive value");
        placed += 1;
    }
    f
}

/// Two independent sparse functions with the same shape parameters.
pub fn sparse_pair<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_support: usize,
    coord_bound: i64,
    max_num: i64,
    max_den: i64,
) -> (SparseFunction, SparseFunction) {
    let f = sparse_function(rng, dim, max_support, coord_bound, max_num, max_den);
    let g = sparse_function(rng, dim, max_support, coord_bound, max_num, max_den);
    (f, g)
}

/// A pair with exactly equal masses: the second function is rescaled by the
/// exact rational ratio of the masses. Values within one function share a
/// single denominator so masses, the rescaling ratio, and everything exact
/// downstream (harmonic means, transport breakpoints) stay small.
pub fn equal_mass_pair<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_support: usize,
    coord_bound: i64,
    max_num: i64,
    max_den: i64,
) -> (SparseFunction, SparseFunction) {
    let gen = |rng: &mut R| {
        let den = rng.random_range(1..=max_den);
        let target = rng.random_range(1..=max_support);
        let mut f = SparseFunction::new(dim).expect("dim ≥ 1");
        let mut placed = 0;
        while placed < target {
            let point: Vec<i64> = (0..dim)
                .map(|_| rng.random_range(-coord_bound..=coord_bound))
                .collect();
            if f.value(&point).is_some() {
                continue;
            }
            f.insert(point, rat(rng.random_range(1..=max_num), den))
                .expect("fresh point with positive value");
            placed += 1;
        }
        f
    };
    let f = gen(rng);
    let g = gen(rng);
    let ratio = f.mass() / g.mass();
    let g = g.scale(&ratio).expect("positive ratio");
    (f, g)
}

/// A one-dimensional function spread nearly uniformly over at least
/// `min_support` distinct points, paired with an equal-mass partner of the
/// same shape. Values stay within [4/5, 6/5], so no few hyperplanes can
/// concentrate the mass.
pub fn spread_pair<R: Rng>(
    rng: &mut R,
    min_support: usize,
    max_support: usize,
) -> (SparseFunction, SparseFunction) {
    let gen = |rng: &mut R| {
        let size = rng.random_range(min_support..=max_support);
        let span = 3 * size as i64;
        let mut f = SparseFunction::new(1).expect("dim 1");
        let mut placed = 0;
        while placed < size {
            let x = rng.random_range(0..span);
            if f.value(&[x]).is_some() {
                continue;
            }
            f.insert(vec![x], rat(rng.random_range(80..=120), 100))
                .expect("fresh point");
            placed += 1;
        }
        f
    };
    let f = gen(rng);
    let g = gen(rng);
    let ratio = f.mass() / g.mass();
    (f, g.scale(&ratio).expect("positive ratio"))
}

/// A random point set.
pub fn point_set<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_points: usize,
    coord_bound: i64,
) -> PointSet {
    let target = rng.random_range(1..=max_points);
    let mut set = PointSet::new(dim).expect("dim ≥ 1");
    let mut placed = 0;
    while placed < target {
        let point: Vec<i64> = (0..dim)
            .map(|_| rng.random_range(-coord_bound..=coord_bound))
            .collect();
        if set.insert(point).expect("dimension matches") {
            placed += 1;
        }
    }
    set
}

/// An admissible convexity-lemma instance: a nonincreasing rational sequence
/// summing to one exactly, a positive `c`, an index `n` below the sequence
/// length, a rational `alpha` with the head mass at most `1 - alpha`, and a
/// positive exponent.
pub fn beta_instance<R: Rng>(
    rng: &mut R,
    max_len: usize,
) -> (Vec<Rational>, f64, usize, Rational, f64) {
    let len = rng.random_range(2..=max_len.max(2));
    let raw: Vec<Rational> = (0..len)
        .map(|_| rat(rng.random_range(1..=100), rng.random_range(1..=100)))
        .collect();
    let total: Rational = raw.iter().sum();
    let mut betas: Vec<Rational> = raw.into_iter().map(|b| b / &total).collect();
    betas.sort_by(|a, b| b.cmp(a));
    let n = rng.random_range(1..len);
    let head: Rational = betas.iter().take(n).sum();
    let slack = rat(1, 1) - head; // > 0 since n < len and betas positive
    let alpha = slack * rat(rng.random_range(1..=64), 64);
    let c = 10f64.powf(rng.random_range(-2.0..2.0));
    let p = [0.25, 0.5, 1.0, 2.0][rng.random_range(0..4)];
    (betas, c, n, alpha, p)
}
