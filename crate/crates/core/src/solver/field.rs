use ndarray::{Array2, Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graphex::{DegreeLaw, Graphex};
use crate::Scalar;

/// Equal-width partition of the core latent interval `[0, α*]` into `M`
/// classes, each represented by its center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreGrid<T> {
    alpha_star: T,
    centers: Vec<T>,
    /// Kernel factor `(1 + α_i)^(-1/σ)` at each center.
    weights: Vec<T>,
}

impl<T: Scalar> CoreGrid<T> {
    pub fn new(graphex: &Graphex<T>, classes: usize, alpha_star: T) -> Result<Self> {
        if classes == 0 {
            return Err(domain("need at least one core class"));
        }
        if !(alpha_star > T::zero() && alpha_star.is_finite()) {
            return Err(domain(format!("alpha_star must be positive, got {alpha_star}")));
        }
        let width = alpha_star / T::from_count(classes);
        let centers: Vec<T> = (0..classes).map(|i| (T::from_count(i) + T::lit(0.5)) * width).collect();
        let weights = centers.iter().map(|&a| graphex.latent_weight(a)).collect();
        Ok(Self {
            alpha_star,
            centers,
            weights,
        })
    }

    /// Grid with explicit neighborhood weights, mainly for tests.
    pub fn with_weights(alpha_star: T, weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| w.is_nan() || *w < T::zero()) {
            return Err(domain("weights must be nonempty and nonnegative"));
        }
        let width = alpha_star / T::from_count(weights.len());
        let centers = (0..weights.len())
            .map(|i| (T::from_count(i) + T::lit(0.5)) * width)
            .collect();
        Ok(Self {
            alpha_star,
            centers,
            weights,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.centers.len()
    }

    pub fn alpha_star(&self) -> T {
        self.alpha_star
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Class whose interval `((i-1)h, ih]` contains `alpha`; values above `α*`
    /// map to the last class, zero to the first.
    pub fn class_of(&self, alpha: T) -> usize {
        let m = self.num_classes();
        let scaled = (alpha / self.alpha_star * T::from_count(m)).ceil();
        let idx = scaled.to_usize().unwrap_or(usize::MAX).saturating_sub(1);
        idx.min(m - 1)
    }
}

/// Core mean field `μ^∞_{i,t}(x)`, indexed `[class][t][x]`, for `t < T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreField<T> {
    values: Array3<T>,
    grid: CoreGrid<T>,
}

impl<T: Scalar> CoreField<T> {
    pub fn new(values: Array3<T>, grid: CoreGrid<T>) -> Result<Self> {
        if values.len_of(Axis(0)) != grid.num_classes() {
            return Err(Error::Shape(format!(
                "{} class rows for {} classes",
                values.len_of(Axis(0)),
                grid.num_classes()
            )));
        }
        Ok(Self { values, grid })
    }

    pub fn values(&self) -> &Array3<T> {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut Array3<T> {
        &mut self.values
    }

    pub fn grid(&self) -> &CoreGrid<T> {
        &self.grid
    }

    pub fn num_classes(&self) -> usize {
        self.values.len_of(Axis(0))
    }

    pub fn horizon(&self) -> usize {
        self.values.len_of(Axis(1))
    }

    pub fn num_states(&self) -> usize {
        self.values.len_of(Axis(2))
    }

    /// Limiting core neighborhood at time `t`: the kernel-weighted average of
    /// the class distributions. Under the separable kernel this is the same
    /// for every core latent.
    pub fn neighborhood(&self, t: usize) -> Vec<T> {
        weighted_average(self.values.index_axis(Axis(1), t), self.grid.weights())
    }

    /// [`Self::neighborhood`] for all `t`, as `[t][x]`.
    pub fn neighborhoods(&self) -> Array2<T> {
        stack_rows(self.horizon(), self.num_states(), |t| self.neighborhood(t))
    }

    /// Equal-weight average over classes at time `t`.
    pub fn class_average(&self, t: usize) -> Vec<T> {
        let ones = vec![T::one(); self.num_classes()];
        weighted_average(self.values.index_axis(Axis(1), t), &ones)
    }

    pub fn class_averages(&self) -> Array2<T> {
        stack_rows(self.horizon(), self.num_states(), |t| self.class_average(t))
    }
}

fn weighted_average<T: Scalar>(rows: ArrayView2<T>, weights: &[T]) -> Vec<T> {
    let total: T = weights.iter().copied().sum();
    let mut out = vec![T::zero(); rows.ncols()];
    for (row, &w) in rows.outer_iter().zip(weights) {
        for (o, &v) in out.iter_mut().zip(row.iter()) {
            *o += w * v;
        }
    }
    out.iter_mut().for_each(|o| *o /= total);
    out
}

fn stack_rows<T: Scalar>(rows: usize, cols: usize, f: impl Fn(usize) -> Vec<T>) -> Array2<T> {
    let mut out = Array2::zeros((rows, cols));
    for t in 0..rows {
        for (x, v) in f(t).into_iter().enumerate() {
            out[[t, x]] = v;
        }
    }
    out
}

/// Periphery mean fields `μ^k_t(x)` for `k = 1..=k_max`, indexed `[k-1][t][x]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeripheryField<T> {
    values: Array3<T>,
}

impl<T: Scalar> PeripheryField<T> {
    pub fn new(values: Array3<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &Array3<T> {
        &self.values
    }

    pub fn k_max(&self) -> usize {
        self.values.len_of(Axis(0))
    }

    pub fn horizon(&self) -> usize {
        self.values.len_of(Axis(1))
    }

    /// `[t][x]` field of degree `k` (1-based).
    pub fn degree(&self, k: usize) -> ArrayView2<'_, T> {
        self.values.index_axis(Axis(0), k - 1)
    }
}

/// Predicted overall mean field `Σ_k p_k μ^k_t + (1 - Σ_k p_k) μ^∞_t`, with the
/// core term the equal-weight class average.
pub fn mix_overall<T: Scalar>(
    core: &CoreField<T>,
    periphery: &PeripheryField<T>,
    law: &DegreeLaw<T>,
    t: usize,
) -> Result<Vec<T>> {
    if law.k_max() != periphery.k_max() {
        return Err(Error::Shape(format!(
            "degree law covers k <= {} but periphery covers k <= {}",
            law.k_max(),
            periphery.k_max()
        )));
    }
    if t >= core.horizon() || t >= periphery.horizon() {
        return Err(Error::Shape(format!("time {t} outside the fields")));
    }
    let core_mass = law.core_mass();
    let mut out: Vec<T> = core.class_average(t).into_iter().map(|v| v * core_mass).collect();
    for k in 1..=law.k_max() {
        let row = periphery.degree(k);
        for (x, o) in out.iter_mut().enumerate() {
            *o += law.p(k) * row[[t, x]];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphex::degree_law;
    use ndarray::array;

    #[test]
    fn weighted_neighborhood() {
        let grid = CoreGrid::with_weights(1.0, vec![0.75, 0.25]).unwrap();
        let values = array![[[1.0, 0.0]], [[0.0, 1.0]]];
        let field = CoreField::new(values, grid).unwrap();
        assert_eq!(field.neighborhood(0), vec![0.75, 0.25]);
        assert_eq!(field.class_average(0), vec![0.5, 0.5]);
    }

    #[test]
    fn identical_classes_give_same_neighborhood() {
        let gx = Graphex::<f64>::new(0.5).unwrap();
        let grid = CoreGrid::new(&gx, 3, 5.0).unwrap();
        let values = Array3::from_shape_fn((3, 2, 3), |(_, t, x)| [[0.2, 0.3, 0.5], [0.1, 0.1, 0.8]][t][x]);
        let field = CoreField::new(values, grid).unwrap();
        for (a, b) in field.neighborhood(1).iter().zip([0.1, 0.1, 0.8]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn class_lookup() {
        let gx = Graphex::<f64>::new(0.5).unwrap();
        let grid = CoreGrid::new(&gx, 50, 5.0).unwrap();
        assert_eq!(grid.class_of(0.0), 0);
        assert_eq!(grid.class_of(0.1), 0);
        assert_eq!(grid.class_of(0.1000001), 1);
        assert_eq!(grid.class_of(0.35), 3);
        assert_eq!(grid.class_of(4.99), 49);
        assert_eq!(grid.class_of(100.0), 49);
        assert!((grid.centers()[0] - 0.05).abs() < 1e-15);
        assert!(CoreGrid::new(&gx, 0, 5.0).is_err());
        assert!(CoreGrid::new(&gx, 2, 0.0).is_err());
    }

    #[test]
    fn mixture_weights() {
        let grid = CoreGrid::with_weights(1.0, vec![1.0]).unwrap();
        let core = CoreField::new(array![[[0.0, 0.0, 1.0]]], grid).unwrap();
        let periphery = PeripheryField::new(array![[[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]]]);
        let law = degree_law(0.5, 2).unwrap();
        let mixed = mix_overall(&core, &periphery, &law, 0).unwrap();
        assert_eq!(mixed, vec![0.5, 0.125, 0.375]);
        assert!(mix_overall(&core, &periphery, &degree_law(0.5, 3).unwrap(), 0).is_err());
        assert!(mix_overall(&core, &periphery, &law, 1).is_err());
    }

    #[test]
    fn degenerate_mixture_returns_core() {
        let grid = CoreGrid::with_weights(1.0, vec![1.0, 1.0]).unwrap();
        let core = CoreField::new(array![[[0.2, 0.8]], [[0.4, 0.6]]], grid).unwrap();
        let periphery = PeripheryField::new(array![[[1.0, 0.0]]]);
        let law = degree_law(1e-12f64, 1).unwrap();
        let mixed = mix_overall(&core, &periphery, &law, 0).unwrap();
        assert!((mixed[0] - 0.3).abs() < 1e-11 && (mixed[1] - 0.7).abs() < 1e-11);
    }
}
