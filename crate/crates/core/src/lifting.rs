//! Lifting set-level midpoint inequalities to functional ones.
//!
//! A `LiftingDomain` packages a binary operation `S` on lattice points
//! (possibly set-valued, to cover midpoint operations), the exponent and
//! weight of the set-level inequality it claims, and a constant multiplier
//! so the claim is stated against the correct bound. The functional engine
//! computes the minimal `h` with `h(z) ≥ M_{-p,λ}(f(x), g(y))` for every
//! `z ∈ S(x, y)` — geometric mean when the domain claims `p = 0` — and
//! compares `Σh` with `Σf`.

use crate::functions::{FunctionError, Point, SparseFunction};
use crate::geometry::{GeometryError, PointSet};
use crate::means::{p_mean, p_mean_rational, MeanSpec};
use crate::rational::{to_f64, Rational};
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LiftingError {
    #[error("point {0:?} lies outside the {1} universe")]
    UniverseViolation(Point, String),
    #[error("operation requires nonempty sets")]
    EmptySet,
    #[error("masses must match exactly (got {f} and {g})")]
    MassMismatch { f: String, g: String },
    #[error("dimension {dim} unsupported for domain {name} (max {max})")]
    DimensionOutOfRange { name: String, dim: usize, max: usize },
    #[error("unknown domain name: {0}")]
    UnknownDomain(String),
    #[error("{name} out of range: {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The binary operation backing a domain.
#[derive(Debug, Clone, PartialEq)]
enum DomainOp {
    /// `S(x, y) = x + y`, single-valued.
    LatticeAdd,
    /// Hamming midpoints on `{0,1}^d`, set-valued.
    CubeMidpoint,
    /// `S(x, y) = round(λx + (1-λ)y)` coordinatewise, nearest with ties
    /// toward even; single-valued. The rounding convention is a choice of
    /// this library, not canonical, and shifts constants.
    ScaledAdd { lambda: Rational },
}

/// A pluggable binary operation with its claimed set-level inequality
/// `|S(A,B)| ≥ multiplier · M_{p,λ}(|A|, |B|)` (`p = 0` reads as the
/// weighted geometric mean).
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingDomain {
    name: String,
    dim: usize,
    op: DomainOp,
    p: f64,
    lambda: f64,
    multiplier: f64,
}

impl LiftingDomain {
    /// `Z^d` addition (`d ≤ 3`) claiming `|A+B| ≥ M_{p,1/2}(|A|, |B|)`.
    /// The classical continuous statement carries a `2^d` factor; the
    /// discrete sumset only supports the multiplier-one form without
    /// hyperplane hypotheses, which is what this domain declares.
    pub fn lattice_add(dim: usize, p: f64, lambda: f64) -> Result<Self, LiftingError> {
        if dim == 0 || dim > 3 {
            return Err(LiftingError::DimensionOutOfRange {
                name: "zd-add".into(),
                dim,
                max: 3,
            });
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(LiftingError::ParameterOutOfRange { name: "p", value: p });
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(LiftingError::ParameterOutOfRange { name: "lambda", value: lambda });
        }
        Ok(LiftingDomain {
            name: "zd-add".into(),
            dim,
            op: DomainOp::LatticeAdd,
            p,
            lambda,
            multiplier: 1.0,
        })
    }

    /// Hamming midpoints on `{0,1}^d` (`d ≤ 4`) claiming
    /// `|S(A,B)| ≥ sqrt(|A||B|)` (the `p = 0`, `λ = 1/2` case).
    pub fn cube_midpoint(dim: usize) -> Result<Self, LiftingError> {
        if dim == 0 || dim > 4 {
            return Err(LiftingError::DimensionOutOfRange {
                name: "cube-midpoint".into(),
                dim,
                max: 4,
            });
        }
        Ok(LiftingDomain {
            name: "cube-midpoint".into(),
            dim,
            op: DomainOp::CubeMidpoint,
            p: 0.0,
            lambda: 0.5,
            multiplier: 1.0,
        })
    }

    /// Rounded convex combination on `Z^d` (`d ≤ 3`) claiming
    /// `|S(A,B)| ≥ M_{1/d,λ}(|A|, |B|)`. A desk-scale stand-in for the
    /// continuous scaled sum; rounding collisions can defeat the claim on
    /// adjacent points, so margins are reported rather than presumed.
    pub fn scaled_add(dim: usize, lambda: Rational) -> Result<Self, LiftingError> {
        if dim == 0 || dim > 3 {
            return Err(LiftingError::DimensionOutOfRange {
                name: "scaled-add".into(),
                dim,
                max: 3,
            });
        }
        if !(lambda > Rational::zero() && lambda < Rational::one()) {
            return Err(LiftingError::ParameterOutOfRange {
                name: "lambda",
                value: to_f64(&lambda),
            });
        }
        let lambda_f = to_f64(&lambda);
        Ok(LiftingDomain {
            name: "scaled-add".into(),
            dim,
            op: DomainOp::ScaledAdd { lambda },
            p: 1.0 / dim as f64,
            lambda: lambda_f,
            multiplier: 1.0,
        })
    }

    /// Looks a registered domain up by name: `zd-add`, `cube-midpoint`, or
    /// `scaled-add`. `p` is used by `zd-add`; `lambda` by `zd-add` and
    /// `scaled-add`.
    pub fn by_name(
        name: &str,
        dim: usize,
        p: f64,
        lambda: &Rational,
    ) -> Result<Self, LiftingError> {
        match name {
            "zd-add" => LiftingDomain::lattice_add(dim, p, to_f64(lambda)),
            "cube-midpoint" => LiftingDomain::cube_midpoint(dim),
            "scaled-add" => LiftingDomain::scaled_add(dim, lambda.clone()),
            other => Err(LiftingError::UnknownDomain(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exponent of the claimed set-level inequality; zero means geometric.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    /// The mean applied to function values in the lifted constraint:
    /// `M_{-p,λ}`, or the geometric mean when the claim has `p = 0`.
    fn lift_mean(&self) -> MeanSpec {
        let p = if self.p == 0.0 { 0.0 } else { -self.p };
        MeanSpec::new(p, self.lambda).expect("validated at construction")
    }

    fn check_in_universe(&self, point: &[i64]) -> Result<(), LiftingError> {
        if point.len() != self.dim {
            return Err(LiftingError::UniverseViolation(
                point.to_vec(),
                self.name.clone(),
            ));
        }
        if matches!(self.op, DomainOp::CubeMidpoint)
            && point.iter().any(|&c| c != 0 && c != 1)
        {
            return Err(LiftingError::UniverseViolation(
                point.to_vec(),
                self.name.clone(),
            ));
        }
        Ok(())
    }

    fn check_set(&self, set: &PointSet) -> Result<(), LiftingError> {
        for point in set.iter() {
            self.check_in_universe(point)?;
        }
        Ok(())
    }

    fn check_support(&self, f: &SparseFunction) -> Result<(), LiftingError> {
        for (point, _) in f.iter() {
            self.check_in_universe(point)?;
        }
        Ok(())
    }

    /// `S(x, y)` as a finite nonempty point list.
    pub fn op_image(&self, x: &[i64], y: &[i64]) -> Result<Vec<Point>, LiftingError> {
        self.check_in_universe(x)?;
        self.check_in_universe(y)?;
        Ok(match &self.op {
            DomainOp::LatticeAdd => {
                vec![x.iter().zip(y).map(|(a, b)| a + b).collect()]
            }
            DomainOp::CubeMidpoint => {
                let xm = point_to_mask(x).expect("universe checked");
                let ym = point_to_mask(y).expect("universe checked");
                cube_midpoints_mask(xm, ym)
                    .into_iter()
                    .map(|m| mask_to_point(m, self.dim))
                    .collect()
            }
            DomainOp::ScaledAdd { lambda } => {
                let co = Rational::one() - lambda;
                let point = x
                    .iter()
                    .zip(y)
                    .map(|(&a, &b)| {
                        round_ties_even(&(lambda * Rational::from_integer(a.into())
                            + &co * Rational::from_integer(b.into())))
                    })
                    .collect();
                vec![point]
            }
        })
    }
}

/// Nearest integer, ties toward the even neighbour.
fn round_ties_even(q: &Rational) -> i64 {
    let floor = q.floor();
    let frac = q - &floor;
    let floor_int: i64 = floor
        .to_integer()
        .try_into()
        .expect("rounded coordinate fits i64");
    let half = crate::rational::rat(1, 2);
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor_int,
        std::cmp::Ordering::Greater => floor_int + 1,
        std::cmp::Ordering::Equal => {
            if floor_int % 2 == 0 {
                floor_int
            } else {
                floor_int + 1
            }
        }
    }
}

/// Cube vertex as a bitmask (coordinate `i` in bit `i`).
pub fn point_to_mask(point: &[i64]) -> Option<u32> {
    let mut mask = 0u32;
    for (i, &c) in point.iter().enumerate() {
        match c {
            0 => {}
            1 => mask |= 1 << i,
            _ => return None,
        }
    }
    Some(mask)
}

/// Bitmask back to a cube vertex of dimension `dim`.
pub fn mask_to_point(mask: u32, dim: usize) -> Point {
    (0..dim).map(|i| ((mask >> i) & 1) as i64).collect()
}

/// All Hamming midpoints of two cube vertices: `m` agreeing with `x` and
/// `y` where they agree, switching to `y`'s bit on `j` of the `k` differing
/// coordinates with `j ∈ {⌊k/2⌋, ⌈k/2⌉}` (equivalently `d(x,m) + d(m,y) =
/// d(x,y)` and `|d(x,m) - d(x,y)/2| ≤ 1/2`).
pub fn cube_midpoints_mask(x: u32, y: u32) -> Vec<u32> {
    let diff = x ^ y;
    let k = diff.count_ones();
    let lo = k / 2;
    let hi = k - lo; // = ⌈k/2⌉
    let mut out = Vec::new();
    // walk all submasks of diff, keeping popcounts lo and hi
    let mut s = diff;
    loop {
        let c = s.count_ones();
        if c == lo || c == hi {
            out.push(x ^ s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & diff;
    }
    out.sort_unstable();
    out
}

/// `S(A, B)`: the union of `S(a, b)` over all pairs.
pub fn set_image(
    domain: &LiftingDomain,
    a: &PointSet,
    b: &PointSet,
) -> Result<PointSet, LiftingError> {
    domain.check_set(a)?;
    domain.check_set(b)?;
    let mut out = PointSet::new(domain.dim())?;
    for x in a.iter() {
        for y in b.iter() {
            for z in domain.op_image(x, y)? {
                out.insert(z)?;
            }
        }
    }
    Ok(out)
}

/// The set-level claim of the domain: returns
/// `(|S(A,B)|, multiplier · M_{p,λ}(|A|, |B|))`. Callers assert `lhs ≥ rhs`
/// for domains whose claim is a theorem; for heuristic domains the pair is
/// diagnostic.
pub fn check_set_bm(
    domain: &LiftingDomain,
    a: &PointSet,
    b: &PointSet,
) -> Result<(f64, f64), LiftingError> {
    if a.is_empty() || b.is_empty() {
        return Err(LiftingError::EmptySet);
    }
    let image = set_image(domain, a, b)?;
    let lhs = image.len() as f64;
    let spec = MeanSpec::new(if domain.p == 0.0 { 0.0 } else { domain.p }, domain.lambda)
        .expect("validated at construction");
    let rhs = domain.multiplier * p_mean(&spec, a.len() as f64, b.len() as f64);
    Ok((lhs, rhs))
}

/// The minimal `h` admissible for the domain's set-valued operation:
/// `h(z) = max { M_{-p,λ}(f(x), g(y)) : z ∈ S(x, y) }`.
pub fn lift_min_admissible_h(
    domain: &LiftingDomain,
    f: &SparseFunction,
    g: &SparseFunction,
) -> Result<SparseFunction, LiftingError> {
    domain.check_support(f)?;
    domain.check_support(g)?;
    if f.is_empty() || g.is_empty() {
        return Err(LiftingError::EmptySet);
    }
    let mean = domain.lift_mean();
    let mut h = SparseFunction::new(domain.dim())?;
    for (x, fx) in f.iter() {
        for (y, gy) in g.iter() {
            let m = p_mean_rational(&mean, fx, gy);
            if !m.is_positive() {
                continue;
            }
            for z in domain.op_image(x, y)? {
                h.raise_to(z, m.clone());
            }
        }
    }
    Ok(h)
}

/// The lifted inequality on equal-mass inputs: returns `(Σh*, Σf)`.
/// Callers assert `lhs ≥ rhs` wherever the domain's set-level claim holds.
pub fn lift_check(
    domain: &LiftingDomain,
    f: &SparseFunction,
    g: &SparseFunction,
) -> Result<(f64, f64), LiftingError> {
    let mass_f = f.mass();
    let mass_g = g.mass();
    if mass_f != mass_g {
        return Err(LiftingError::MassMismatch {
            f: mass_f.to_string(),
            g: mass_g.to_string(),
        });
    }
    let h = lift_min_admissible_h(domain, f, g)?;
    Ok((to_f64(&h.mass()), to_f64(&mass_f)))
}

/// Recovers the set-level inequality from the functional one: lifts
/// `f = 1_A/|A|`, `g = 1_B/|B|` and returns `Σh*`, which equals
/// `|S(A,B)| · M_{-p,λ}(1/|A|, 1/|B|) = |S(A,B)| / M_{p,λ}(|A|, |B|)`.
/// A ratio of at least one reproduces the domain's claim.
pub fn recover_bm(
    domain: &LiftingDomain,
    a: &PointSet,
    b: &PointSet,
) -> Result<f64, LiftingError> {
    if a.is_empty() || b.is_empty() {
        return Err(LiftingError::EmptySet);
    }
    let f = SparseFunction::constant_on(a, crate::rational::rat(1, a.len() as i64))?;
    let g = SparseFunction::constant_on(b, crate::rational::rat(1, b.len() as i64))?;
    let h = lift_min_admissible_h(domain, &f, &g)?;
    Ok(to_f64(&h.mass()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cube(dim: usize) -> LiftingDomain {
        LiftingDomain::cube_midpoint(dim).unwrap()
    }

    fn all_vertices(dim: usize) -> PointSet {
        PointSet::from_points(dim, (0u32..1 << dim).map(|m| mask_to_point(m, dim))).unwrap()
    }

    #[test]
    fn addition_set_image_is_sumset() {
        let dom = LiftingDomain::lattice_add(2, 0.25, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = sampling::point_set(&mut rng, 2, 8, 6);
            let b = sampling::point_set(&mut rng, 2, 8, 6);
            assert_eq!(
                set_image(&dom, &a, &b).unwrap(),
                crate::geometry::sumset(&a, &b).unwrap()
            );
        }
    }

    #[test]
    fn midpoint_of_equal_points_is_the_point() {
        let dom = cube(3);
        let a = PointSet::from_points(3, [vec![1, 0, 1]]).unwrap();
        let s = set_image(&dom, &a, &a).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&[1, 0, 1]));
    }

    #[test]
    fn midpoints_of_antipodal_vertices() {
        // distance 3: midpoints at Hamming distance 1 or 2 from each end
        let mids = cube_midpoints_mask(0b000, 0b111);
        assert_eq!(mids.len(), 6);
        for m in mids {
            let dx = m.count_ones();
            assert!(dx == 1 || dx == 2);
        }
        let dom = cube(3);
        let a = PointSet::from_points(3, [vec![0, 0, 0]]).unwrap();
        let b = PointSet::from_points(3, [vec![1, 1, 1]]).unwrap();
        assert_eq!(set_image(&dom, &a, &b).unwrap().len(), 6);
    }

    /// Independent oracle: filter every vertex by the defining predicate
    /// d(x,m) + d(m,y) = d(x,y) and |d(x,m) - d(x,y)/2| ≤ 1/2.
    #[test]
    fn midpoints_match_distance_predicate_oracle() {
        for d in 1usize..=4 {
            let vertices = 1u32 << d;
            for x in 0..vertices {
                for y in 0..vertices {
                    let expected: Vec<u32> = (0..vertices)
                        .filter(|&m| {
                            let dxm = (x ^ m).count_ones() as i32;
                            let dmy = (m ^ y).count_ones() as i32;
                            let dxy = (x ^ y).count_ones() as i32;
                            dxm + dmy == dxy && (2 * dxm - dxy).abs() <= 1
                        })
                        .collect();
                    assert_eq!(cube_midpoints_mask(x, y), expected, "x={x:b} y={y:b}");
                }
            }
        }
    }

    #[test]
    fn midpoint_symmetry() {
        use rand::Rng;
        let dom = cube(4);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pick = |rng: &mut ChaCha8Rng| {
            let n = rng.random_range(1usize..=5);
            let mut masks = std::collections::BTreeSet::new();
            while masks.len() < n {
                masks.insert(rng.random_range(0u32..16));
            }
            PointSet::from_points(4, masks.into_iter().map(|m| mask_to_point(m, 4))).unwrap()
        };
        for _ in 0..30 {
            let a = pick(&mut rng);
            let b = pick(&mut rng);
            assert_eq!(
                set_image(&dom, &a, &b).unwrap(),
                set_image(&dom, &b, &a).unwrap()
            );
        }
    }

    #[test]
    fn universe_violations_are_rejected() {
        let dom = cube(2);
        let bad = PointSet::from_points(2, [vec![0, 2]]).unwrap();
        let good = PointSet::from_points(2, [vec![0, 0]]).unwrap();
        assert!(matches!(
            set_image(&dom, &bad, &good),
            Err(LiftingError::UniverseViolation(..))
        ));
        assert!(LiftingDomain::cube_midpoint(5).is_err());
        assert!(LiftingDomain::lattice_add(4, 0.25, 0.5).is_err());
        assert!(LiftingDomain::by_name("nope", 2, 0.25, &rat(1, 2)).is_err());
    }

    #[test]
    fn cube_set_bound_exhaustive_d3() {
        // |S(A,B)|² ≥ |A||B| over every nonempty pair, exactly
        let dom = cube(3);
        let mut table = vec![vec![0u16; 8]; 8];
        for x in 0u32..8 {
            for y in 0u32..8 {
                let mut bits = 0u16;
                for m in cube_midpoints_mask(x, y) {
                    bits |= 1 << m;
                }
                table[x as usize][y as usize] = bits;
            }
        }
        for a in 1u16..256 {
            for b in 1u16..256 {
                let mut image = 0u16;
                for (x, row) in table.iter().enumerate() {
                    if a >> x & 1 == 0 {
                        continue;
                    }
                    for (y, &bits) in row.iter().enumerate() {
                        if b >> y & 1 == 1 {
                            image |= bits;
                        }
                    }
                }
                let lhs = image.count_ones() as u64;
                let rhs = a.count_ones() as u64 * b.count_ones() as u64;
                assert!(lhs * lhs >= rhs, "A={a:b} B={b:b}: {lhs}² < {rhs}");
            }
        }
        // spot-check the f64 surface agrees
        let a = PointSet::from_points(3, [vec![0, 0, 0]]).unwrap();
        let (lhs, rhs) = check_set_bm(&dom, &a, &all_vertices(3)).unwrap();
        assert!(lhs >= rhs - 1e-12);
    }

    #[test]
    fn singleton_against_set_bound() {
        let dom = cube(4);
        let a = PointSet::from_points(4, [vec![0, 0, 0, 0]]).unwrap();
        let b = all_vertices(4);
        let (lhs, rhs) = check_set_bm(&dom, &a, &b).unwrap();
        assert!(lhs >= rhs - 1e-12, "{lhs} < {rhs}");
        assert!((rhs - 4.0).abs() < 1e-12); // sqrt(1·16)
    }

    #[test]
    fn lattice_lift_matches_supconv_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..30 {
            let (f, g) = sampling::equal_mass_pair(&mut rng, 2, 12, 6, 50, 50);
            let p = 0.25;
            let dom = LiftingDomain::lattice_add(2, p, 0.5).unwrap();
            let via_lift = lift_min_admissible_h(&dom, &f, &g).unwrap();
            let spec = MeanSpec::symmetric(p).unwrap();
            let via_supconv = crate::supconv::min_admissible_h(&f, &g, &spec).unwrap();
            assert_eq!(via_lift, via_supconv);
        }
    }

    #[test]
    fn lift_check_uniform_atoms() {
        let dom = LiftingDomain::lattice_add(1, 0.5, 0.5).unwrap();
        let f = SparseFunction::atom(vec![0], rat(3, 4)).unwrap();
        let g = SparseFunction::atom(vec![5], rat(3, 4)).unwrap();
        let (lhs, rhs) = lift_check(&dom, &f, &g).unwrap();
        assert!((lhs - 0.75).abs() < 1e-12);
        assert!((rhs - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lift_check_cube_uniform() {
        let dom = cube(3);
        let f = SparseFunction::constant_on(&all_vertices(3), rat(1, 8)).unwrap();
        let (lhs, rhs) = lift_check(&dom, &f, &f).unwrap();
        assert_eq!(lhs, rhs); // equality case, exact through the a == b path
    }

    #[test]
    fn lift_check_requires_equal_mass() {
        let dom = cube(2);
        let f = SparseFunction::atom(vec![0, 0], rat(1, 1)).unwrap();
        let g = SparseFunction::atom(vec![1, 1], rat(1, 2)).unwrap();
        assert!(matches!(
            lift_check(&dom, &f, &g),
            Err(LiftingError::MassMismatch { .. })
        ));
    }

    #[test]
    fn lift_check_random_cube_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        use rand::Rng;
        for _ in 0..200 {
            let d = rng.random_range(1usize..=3);
            let dom = cube(d);
            let pick = |rng: &mut ChaCha8Rng| {
                let masks: Vec<u32> = (0u32..1 << d)
                    .filter(|_| rng.random_range(0..3) > 0)
                    .collect();
                masks
            };
            let fa = pick(&mut rng);
            let ga = pick(&mut rng);
            if fa.is_empty() || ga.is_empty() {
                continue;
            }
            let mut f = SparseFunction::new(d).unwrap();
            for &m in &fa {
                f.insert(mask_to_point(m, d), rat(rng.random_range(1..40), rng.random_range(1..40)))
                    .unwrap();
            }
            let mut g = SparseFunction::new(d).unwrap();
            for &m in &ga {
                g.insert(mask_to_point(m, d), rat(rng.random_range(1..40), rng.random_range(1..40)))
                    .unwrap();
            }
            let g = g.scale(&(f.mass() / g.mass())).unwrap();
            let (lhs, rhs) = lift_check(&dom, &f, &g).unwrap();
            assert!(lhs >= rhs - 1e-9, "d={d}: {lhs} < {rhs}");
        }
    }

    #[test]
    fn interval_set_bound_with_unit_multiplier() {
        // the domain claims the multiplier-one bound: 19 ≥ M_{1,1/2}(10,10)
        let dom = LiftingDomain::lattice_add(1, 1.0, 0.5).unwrap();
        let a = PointSet::interval(0, 9);
        let (lhs, rhs) = check_set_bm(&dom, &a, &a).unwrap();
        assert_eq!(lhs, 19.0);
        assert_eq!(rhs, 10.0);
        assert_eq!(dom.multiplier(), 1.0);
    }

    #[test]
    fn recover_interval_ratio() {
        let dom = LiftingDomain::lattice_add(1, 1.0, 0.5).unwrap();
        let a = PointSet::interval(0, 9);
        let ratio = recover_bm(&dom, &a, &a).unwrap();
        assert!((ratio - 1.9).abs() < 1e-12);
    }

    #[test]
    fn recover_singletons_exactly_one() {
        for dom in [
            LiftingDomain::lattice_add(1, 0.5, 0.5).unwrap(),
            cube(1),
            LiftingDomain::scaled_add(1, rat(1, 2)).unwrap(),
        ] {
            let a = PointSet::from_points(1, [vec![0]]).unwrap();
            assert_eq!(recover_bm(&dom, &a, &a).unwrap(), 1.0);
        }
    }

    #[test]
    fn recover_cube_subcube() {
        let dom = cube(3);
        // a 2-dimensional face of the cube
        let face = PointSet::from_points(
            3,
            [vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]],
        )
        .unwrap();
        let ratio = recover_bm(&dom, &face, &face).unwrap();
        assert!(ratio >= 1.0 - 1e-12, "{ratio}");
    }

    #[test]
    fn recover_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for p in [0.25, 0.5, 1.0] {
            let dom = LiftingDomain::lattice_add(2, p, 0.5).unwrap();
            let a = sampling::point_set(&mut rng, 2, 9, 5);
            let b = sampling::point_set(&mut rng, 2, 9, 5);
            let ratio = recover_bm(&dom, &a, &b).unwrap();
            let image = set_image(&dom, &a, &b).unwrap();
            let spec = MeanSpec::symmetric(p).unwrap();
            let closed =
                image.len() as f64 / p_mean(&spec, a.len() as f64, b.len() as f64);
            assert!((ratio - closed).abs() <= 1e-12 * closed, "{ratio} vs {closed}");
        }
    }

    #[test]
    fn scaled_add_rounding_convention() {
        // ties go to the even integer: 1/2 ↦ 0, 3/2 ↦ 2, -1/2 ↦ 0
        assert_eq!(round_ties_even(&rat(1, 2)), 0);
        assert_eq!(round_ties_even(&rat(3, 2)), 2);
        assert_eq!(round_ties_even(&rat(-1, 2)), 0);
        assert_eq!(round_ties_even(&rat(-3, 2)), -2);
        assert_eq!(round_ties_even(&rat(7, 10)), 1);
        assert_eq!(round_ties_even(&rat(-7, 10)), -1);

        let dom = LiftingDomain::scaled_add(1, rat(1, 2)).unwrap();
        let img = dom.op_image(&[1], &[0]).unwrap();
        assert_eq!(img, vec![vec![0]]);
        let img = dom.op_image(&[1], &[2]).unwrap();
        assert_eq!(img, vec![vec![2]]);
    }

    #[test]
    fn scaled_add_on_boxes_holds_claim() {
        let dom = LiftingDomain::scaled_add(1, rat(1, 2)).unwrap();
        let a = PointSet::interval(0, 9);
        let (lhs, rhs) = check_set_bm(&dom, &a, &a).unwrap();
        assert!(lhs >= rhs - 1e-12); // S(A,A) ⊇ A here
        let (hl, hr) = lift_check(
            &dom,
            &SparseFunction::indicator(&a).unwrap(),
            &SparseFunction::indicator(&a).unwrap(),
        )
        .unwrap();
        assert!(hl >= hr - 1e-9);
    }
}
