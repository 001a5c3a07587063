//! Finitely supported nonnegative functions on the integer lattice, their
//! layer-cake decompositions, and the monotone transport map between two
//! level scales.
//!
//! Everything here is exact: level thresholds and masses are rationals, the
//! superlevel cardinality curve is a step function over rational breakpoints,
//! and the transport map is piecewise linear with rational breakpoints, so
//! the layer-cake identity and the transport mass balance hold with no
//! quadrature error.

use crate::geometry::PointSet;
use crate::rational::{rat_int, Rational};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// A lattice point. Coordinate count equals the ambient dimension.
pub type Point = Vec<i64>;

#[derive(Debug, Error, PartialEq)]
pub enum FunctionError {
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("function values must be strictly positive")]
    NonpositiveValue,
    #[error("duplicate point in function construction")]
    DuplicatePoint,
    #[error("empty function has no decomposition")]
    EmptyFunction,
    #[error("transport requires equal masses (got {f} and {g})")]
    MassMismatch { f: String, g: String },
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

/// A finitely supported map `Z^d -> Q_{>0}`; absent points carry value zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseFunction {
    dim: usize,
    entries: BTreeMap<Point, Rational>,
}

impl SparseFunction {
    /// The empty function on `Z^d`.
    pub fn new(dim: usize) -> Result<Self, FunctionError> {
        if dim == 0 {
            return Err(FunctionError::ZeroDimension);
        }
        Ok(SparseFunction {
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// Builds from `(point, value)` pairs. Values must be positive and points
    /// distinct.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self, FunctionError>
    where
        I: IntoIterator<Item = (Point, Rational)>,
    {
        let mut f = SparseFunction::new(dim)?;
        for (point, value) in entries {
            f.insert(point, value)?;
        }
        Ok(f)
    }

    /// The indicator of a point set.
    pub fn indicator(set: &PointSet) -> Result<Self, FunctionError> {
        Self::constant_on(set, Rational::one())
    }

    /// `value · 1_set`.
    pub fn constant_on(set: &PointSet, value: Rational) -> Result<Self, FunctionError> {
        let mut f = SparseFunction::new(set.dim())?;
        for p in set.iter() {
            f.insert(p.clone(), value.clone())?;
        }
        Ok(f)
    }

    /// A single atom.
    pub fn atom(point: Point, value: Rational) -> Result<Self, FunctionError> {
        let mut f = SparseFunction::new(point.len())?;
        f.insert(point, value)?;
        Ok(f)
    }

    /// Sets `f(point) = value`. Rejects nonpositive values, wrong dimensions,
    /// and points already present.
    pub fn insert(&mut self, point: Point, value: Rational) -> Result<(), FunctionError> {
        if point.len() != self.dim {
            return Err(FunctionError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        if !value.is_positive() {
            return Err(FunctionError::NonpositiveValue);
        }
        if self.entries.insert(point, value).is_some() {
            return Err(FunctionError::DuplicatePoint);
        }
        Ok(())
    }

    /// Raises `f(point)` to `max(f(point), value)`, inserting when absent.
    /// Used by sup-convolution aggregation.
    pub(crate) fn raise_to(&mut self, point: Point, value: Rational) {
        debug_assert_eq!(point.len(), self.dim);
        debug_assert!(value.is_positive());
        self.entries
            .entry(point)
            .and_modify(|v| {
                if *v < value {
                    *v = value.clone();
                }
            })
            .or_insert(value);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, point: &[i64]) -> Option<&Rational> {
        self.entries.get(point)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.entries.iter()
    }

    /// The support as a point set.
    pub fn support(&self) -> PointSet {
        PointSet::from_points(self.dim, self.entries.keys().cloned())
            .expect("support points share the function dimension")
    }

    /// `Σ_x f(x)`, exactly; zero for the empty function.
    pub fn mass(&self) -> Rational {
        self.entries.values().sum()
    }

    /// The maximum value, when nonempty.
    pub fn max_value(&self) -> Option<&Rational> {
        self.entries.values().max()
    }

    /// `x ↦ f(x - shift)`.
    pub fn shift(&self, shift: &[i64]) -> Result<Self, FunctionError> {
        if shift.len() != self.dim {
            return Err(FunctionError::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let entries = self.entries.iter().map(|(p, v)| {
            let moved: Point = p.iter().zip(shift).map(|(a, s)| a + s).collect();
            (moved, v.clone())
        });
        SparseFunction::from_entries(self.dim, entries)
    }

    /// `x ↦ c·f(x)` for positive `c`.
    pub fn scale(&self, c: &Rational) -> Result<Self, FunctionError> {
        if !c.is_positive() {
            return Err(FunctionError::NonpositiveValue);
        }
        let entries = self
            .entries
            .iter()
            .map(|(p, v)| (p.clone(), v * c));
        SparseFunction::from_entries(self.dim, entries)
    }

    /// The layer-cake decomposition of a nonempty function.
    pub fn layer_cake(&self) -> Result<LevelDecomposition, FunctionError> {
        if self.is_empty() {
            return Err(FunctionError::EmptyFunction);
        }
        // Distinct values ascending with multiplicities.
        let mut multiplicity: BTreeMap<&Rational, u64> = BTreeMap::new();
        for v in self.entries.values() {
            *multiplicity.entry(v).or_insert(0) += 1;
        }
        let mut thresholds = Vec::with_capacity(multiplicity.len());
        let mut counts = Vec::with_capacity(multiplicity.len());
        let mut remaining = self.entries.len() as u64;
        for (value, mult) in multiplicity {
            thresholds.push(value.clone());
            counts.push(remaining);
            remaining -= mult;
        }
        debug_assert_eq!(remaining, 0);
        Ok(LevelDecomposition { thresholds, counts })
    }
}

/// The step function `t ↦ |F_t|` of superlevel-set cardinalities
/// `F_t = {x : f(x) > t}` on `[0, s_f)`.
///
/// `thresholds` are the distinct values of `f` ascending; `counts[i]` is
/// `|F_t|` on the interval `[thresholds[i-1], thresholds[i])` (with the
/// convention `thresholds[-1] = 0`), so `counts[0]` is the support size and
/// the last threshold is the maximum `s_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDecomposition {
    thresholds: Vec<Rational>,
    counts: Vec<u64>,
}

impl LevelDecomposition {
    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `s_f`, the maximum value.
    pub fn max_value(&self) -> &Rational {
        self.thresholds.last().expect("decomposition is nonempty")
    }

    /// `|F_t|` for a given `t ≥ 0`; zero at and above the maximum.
    pub fn count_above(&self, t: &Rational) -> u64 {
        match self.thresholds.iter().position(|thr| t < thr) {
            Some(i) => self.counts[i],
            None => 0,
        }
    }

    /// The pieces `(lo, hi, |F_t| on [lo, hi))` in order.
    pub fn pieces(&self) -> impl Iterator<Item = (Rational, Rational, u64)> + '_ {
        let lows = std::iter::once(Rational::zero()).chain(self.thresholds.iter().cloned());
        lows.zip(self.thresholds.iter().cloned())
            .zip(self.counts.iter().copied())
            .map(|((lo, hi), c)| (lo, hi, c))
    }

    /// `∫_0^{s_f} |F_t| dt`, exactly. Equals the mass of the decomposed
    /// function.
    pub fn integral(&self) -> Rational {
        let mut total = Rational::zero();
        for (lo, hi, c) in self.pieces() {
            total += (hi - lo) * rat_int(c as i64);
        }
        total
    }

    /// `∫_0^{t} |F_s| ds`, exactly, clamped to `[0, s_f]`.
    pub fn cumulative(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (lo, hi, c) in self.pieces() {
            if *t <= lo {
                break;
            }
            let upper = if *t < hi { t.clone() } else { hi.clone() };
            acc += (upper - lo) * rat_int(c as i64);
        }
        acc
    }
}

/// A piecewise-linear nondecreasing bijection `T: [0, s_g] -> [0, s_f]`
/// equalizing cumulative layer-cake mass, stored by its breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportMap {
    breakpoints: Vec<(Rational, Rational)>,
}

impl TransportMap {
    /// Breakpoints `(t, T(t))`, starting at `(0, 0)` and ending at
    /// `(s_g, s_f)`.
    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    /// `T(t)` by exact linear interpolation; clamps outside `[0, s_g]`.
    pub fn eval(&self, t: &Rational) -> Rational {
        let first = &self.breakpoints[0];
        if *t <= first.0 {
            return first.1.clone();
        }
        for pair in self.breakpoints.windows(2) {
            let (ref t0, ref y0) = pair[0];
            let (ref t1, ref y1) = pair[1];
            if t <= t1 {
                return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
            }
        }
        self.breakpoints.last().unwrap().1.clone()
    }

    /// Slopes of the linear pieces, in order.
    pub fn slopes(&self) -> Vec<Rational> {
        self.breakpoints
            .windows(2)
            .map(|pair| (&pair[1].1 - &pair[0].1) / (&pair[1].0 - &pair[0].0))
            .collect()
    }
}

/// The transport map pushing the level scale of `g` onto the level scale of
/// `f`: `T: [0, s_g] -> [0, s_f]` with `∫_0^{t'} |G_t| dt = ∫_0^{T(t')}
/// |F_t| dt` at every point and slope `|G_t| / |F_{T(t)}|` on each piece.
///
/// Orientation note: the map runs from `g`'s scale to `f`'s scale. The
/// reverse orientation is `transport_map(decomp_f, decomp_g)`; composing the
/// two gives the identity.
pub fn transport_map(
    decomp_g: &LevelDecomposition,
    decomp_f: &LevelDecomposition,
) -> Result<TransportMap, FunctionError> {
    let mass_g = decomp_g.integral();
    let mass_f = decomp_f.integral();
    if mass_g != mass_f {
        return Err(FunctionError::MassMismatch {
            f: mass_f.to_string(),
            g: mass_g.to_string(),
        });
    }
    let g_pieces: Vec<_> = decomp_g.pieces().collect();
    let f_pieces: Vec<_> = decomp_f.pieces().collect();

    let mut breakpoints = vec![(Rational::zero(), Rational::zero())];
    let mut t = Rational::zero(); // position on g's scale
    let mut s = Rational::zero(); // position on f's scale
    let mut i = 0; // active g piece
    let mut j = 0; // active f piece

    while i < g_pieces.len() && j < f_pieces.len() {
        let (_, ref g_hi, g_count) = g_pieces[i];
        let (_, ref f_hi, f_count) = f_pieces[j];
        let g_rate = rat_int(g_count as i64);
        let f_rate = rat_int(f_count as i64);
        // Mass remaining before the next breakpoint of either side.
        let mass_to_g_break = (g_hi - &t) * &g_rate;
        let mass_to_f_break = (f_hi - &s) * &f_rate;
        match mass_to_g_break.cmp(&mass_to_f_break) {
            std::cmp::Ordering::Less => {
                t = g_hi.clone();
                s += mass_to_g_break / &f_rate;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                t += mass_to_f_break / &g_rate;
                s = f_hi.clone();
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                t = g_hi.clone();
                s = f_hi.clone();
                i += 1;
                j += 1;
            }
        }
        if breakpoints.last() != Some(&(t.clone(), s.clone())) {
            breakpoints.push((t.clone(), s.clone()));
        }
    }
    debug_assert_eq!(i, g_pieces.len());
    debug_assert_eq!(j, f_pieces.len());
    debug_assert_eq!(&t, decomp_g.max_value());
    debug_assert_eq!(&s, decomp_f.max_value());
    Ok(TransportMap { breakpoints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};
    use proptest::prelude::*;

    fn f1(entries: &[(i64, (i64, i64))]) -> SparseFunction {
        SparseFunction::from_entries(
            1,
            entries.iter().map(|&(x, (n, d))| (vec![x], rat(n, d))),
        )
        .unwrap()
    }

    #[test]
    fn construction_guards() {
        let mut f = SparseFunction::new(2).unwrap();
        assert_eq!(
            f.insert(vec![0], rat(1, 1)),
            Err(FunctionError::DimensionMismatch { expected: 2, got: 1 })
        );
        assert_eq!(
            f.insert(vec![0, 0], rat(0, 1)),
            Err(FunctionError::NonpositiveValue)
        );
        f.insert(vec![0, 0], rat(1, 2)).unwrap();
        assert_eq!(
            f.insert(vec![0, 0], rat(1, 3)),
            Err(FunctionError::DuplicatePoint)
        );
        assert!(SparseFunction::new(0).is_err());
    }

    #[test]
    fn mass_examples() {
        assert_eq!(SparseFunction::new(1).unwrap().mass(), rat(0, 1));
        let f = f1(&[(0, (1, 3)), (5, (2, 3))]);
        assert_eq!(f.mass(), rat(1, 1));
    }

    #[test]
    fn layer_cake_of_indicator() {
        let f = f1(&[(0, (1, 1)), (1, (1, 1)), (2, (1, 1))]);
        let d = f.layer_cake().unwrap();
        assert_eq!(d.thresholds(), &[rat(1, 1)]);
        assert_eq!(d.counts(), &[3]);
        assert_eq!(d.integral(), rat(3, 1));
    }

    #[test]
    fn layer_cake_two_levels() {
        // f = {0 ↦ 3, 1 ↦ 1}: |F_t| = 2 on [0,1), 1 on [1,3); integral 4.
        let f = f1(&[(0, (3, 1)), (1, (1, 1))]);
        let d = f.layer_cake().unwrap();
        assert_eq!(d.thresholds(), &[rat(1, 1), rat(3, 1)]);
        assert_eq!(d.counts(), &[2, 1]);
        assert_eq!(d.integral(), rat(4, 1));
        assert_eq!(d.integral(), f.mass());
        assert_eq!(d.count_above(&rat(1, 2)), 2);
        assert_eq!(d.count_above(&rat(2, 1)), 1);
        assert_eq!(d.count_above(&rat(3, 1)), 0);
    }

    #[test]
    fn layer_cake_single_atom() {
        let f = f1(&[(0, (1, 2))]);
        let d = f.layer_cake().unwrap();
        assert_eq!(d.thresholds(), &[rat(1, 2)]);
        assert_eq!(d.integral(), rat(1, 2));
    }

    #[test]
    fn layer_cake_rejects_empty() {
        let f = SparseFunction::new(1).unwrap();
        assert_eq!(f.layer_cake().unwrap_err(), FunctionError::EmptyFunction);
    }

    #[test]
    fn transport_identity_on_equal_inputs() {
        let f = f1(&[(0, (2, 1)), (1, (1, 1))]);
        let d = f.layer_cake().unwrap();
        let t = transport_map(&d, &d).unwrap();
        for (a, b) in t.breakpoints() {
            assert_eq!(a, b);
        }
        assert_eq!(t.eval(&rat(3, 2)), rat(3, 2));
    }

    #[test]
    fn transport_uniform_rescaling() {
        // g = 1 on 4 points (s_g = 1), f = 2 on 2 points (s_f = 2): T(t) = 2t.
        let g = f1(&[(0, (1, 1)), (1, (1, 1)), (2, (1, 1)), (3, (1, 1))]);
        let f = f1(&[(0, (2, 1)), (1, (2, 1))]);
        let t = transport_map(&g.layer_cake().unwrap(), &f.layer_cake().unwrap()).unwrap();
        assert_eq!(t.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(t.eval(&rat(1, 1)), rat(2, 1));
        assert_eq!(t.breakpoints().last().unwrap(), &(rat(1, 1), rat(2, 1)));
    }

    #[test]
    fn transport_breakpoint_at_level_change() {
        // g = {0↦2, 1↦1}, f = uniform 1 on three points.
        let g = f1(&[(0, (2, 1)), (1, (1, 1))]);
        let f = f1(&[(0, (1, 1)), (1, (1, 1)), (2, (1, 1))]);
        let t = transport_map(&g.layer_cake().unwrap(), &f.layer_cake().unwrap()).unwrap();
        // |G_t| drops from 2 to 1 at t = 1; mass balance forces T(1) = 2/3.
        assert_eq!(t.eval(&rat(1, 1)), rat(2, 3));
        assert!(t.breakpoints().contains(&(rat(1, 1), rat(2, 3))));
        assert_eq!(t.eval(&rat(2, 1)), rat(1, 1));
        // Slopes are |G_t| / |F_{T(t)}|: 2/3 then 1/3.
        assert_eq!(t.slopes(), vec![rat(2, 3), rat(1, 3)]);
    }

    /// Numeric oracle: integrate both step functions on a fine grid and
    /// invert; breakpoints of the exact map must match to 1e-4.
    #[test]
    fn transport_matches_grid_inversion_oracle() {
        let g = f1(&[(0, (2, 1)), (1, (1, 1))]);
        let f = f1(&[(0, (1, 1)), (1, (1, 1)), (2, (1, 1))]);
        let dg = g.layer_cake().unwrap();
        let df = f.layer_cake().unwrap();
        let t = transport_map(&dg, &df).unwrap();

        let count_f = |x: f64| -> f64 {
            let q = crate::rational::from_f64(x);
            df.count_above(&q) as f64
        };
        let count_g = |x: f64| -> f64 {
            let q = crate::rational::from_f64(x);
            dg.count_above(&q) as f64
        };
        let step = 1e-5;
        for (bt, bs) in t.breakpoints() {
            let target = {
                // ∫_0^{bt} |G| dt by midpoint quadrature
                let upper = to_f64(bt);
                let n = (upper / step).round() as usize;
                (0..n).map(|k| count_g((k as f64 + 0.5) * step) * step).sum::<f64>()
            };
            // invert cumulative F numerically
            let mut acc = 0.0;
            let mut x = 0.0;
            while acc < target && x < 10.0 {
                acc += count_f(x + 0.5 * step) * step;
                x += step;
            }
            assert!(
                (x - to_f64(bs)).abs() <= 1e-4,
                "breakpoint ({bt}, {bs}): oracle {x}"
            );
        }
    }

    #[test]
    fn transport_rejects_unequal_masses() {
        let g = f1(&[(0, (1, 1))]);
        let f = f1(&[(0, (2, 1))]);
        let err = transport_map(&g.layer_cake().unwrap(), &f.layer_cake().unwrap()).unwrap_err();
        assert!(matches!(err, FunctionError::MassMismatch { .. }));
    }

    #[test]
    fn shift_and_scale() {
        let f = f1(&[(0, (1, 2)), (3, (1, 2))]);
        let shifted = f.shift(&[2]).unwrap();
        assert_eq!(shifted.value(&[2]), Some(&rat(1, 2)));
        assert_eq!(shifted.value(&[5]), Some(&rat(1, 2)));
        let scaled = f.scale(&rat(3, 1)).unwrap();
        assert_eq!(scaled.mass(), rat(3, 1));
    }

    fn arb_sparse(max_dim: usize, max_support: usize) -> impl Strategy<Value = SparseFunction> {
        (1..=max_dim).prop_flat_map(move |d| {
            proptest::collection::btree_map(
                proptest::collection::vec(-30i64..30, d..=d),
                (1i64..=100, 1i64..=100),
                1..=max_support,
            )
            .prop_map(move |m| {
                SparseFunction::from_entries(
                    d,
                    m.into_iter().map(|(p, (n, den))| (p, rat(n, den))),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Layer-cake identity: the decomposition integral reproduces the
        /// mass exactly.
        #[test]
        fn layer_cake_mass_round_trip(f in arb_sparse(3, 50)) {
            let d = f.layer_cake().unwrap();
            prop_assert_eq!(d.integral(), f.mass());
            // counts are strictly decreasing across thresholds
            prop_assert!(d.counts().windows(2).all(|w| w[0] > w[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        /// transport_map(a,b) composed with transport_map(b,a) is the
        /// identity at every breakpoint, exactly.
        #[test]
        fn transport_round_trip(f in arb_sparse(2, 20), g in arb_sparse(2, 20)) {
            // rescale g to share f's mass exactly
            let g = g.scale(&(f.mass() / g.mass())).unwrap();
            let df = f.layer_cake().unwrap();
            let dg = g.layer_cake().unwrap();
            let fwd = transport_map(&dg, &df).unwrap();
            let back = transport_map(&df, &dg).unwrap();
            for (t, s) in fwd.breakpoints() {
                prop_assert_eq!(&back.eval(s), t);
                // mass balance at the breakpoint, exact
                prop_assert_eq!(dg.cumulative(t), df.cumulative(s));
            }
            // monotone with positive slopes
            prop_assert!(fwd.slopes().iter().all(|s| s.is_positive()));
        }
    }
}
