use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use super::SimulationRun;
use crate::error::{Error, Result};
use crate::Scalar;

/// Per-time state histograms over three node partitions.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalFields<T> {
    /// `μ̂^k_t` for each degree `k <= k_max` that has at least one node.
    pub by_degree: BTreeMap<usize, Array2<T>>,
    pub degree_counts: BTreeMap<usize, usize>,
    /// `μ̂^∞_t` over nodes with degree above `k_max`, if there are any.
    pub core: Option<Array2<T>>,
    pub core_count: usize,
    /// `μ̂_t` over all nodes.
    pub overall: Array2<T>,
}

pub fn empirical_fields<T: Scalar>(run: &SimulationRun<'_, T>, num_states: usize, k_max: usize) -> EmpiricalFields<T> {
    let graph = run.graph();
    let steps = run.states().len();
    let mut degree_counts = BTreeMap::new();
    let mut core_count = 0;
    for d in graph.degrees() {
        match d {
            1.. if d <= k_max => *degree_counts.entry(d).or_insert(0) += 1,
            0 => {}
            _ => core_count += 1,
        }
    }
    let mut by_degree: BTreeMap<usize, Array2<T>> = degree_counts
        .keys()
        .map(|&k| (k, Array2::zeros((steps, num_states))))
        .collect();
    let mut core = Array2::<T>::zeros((steps, num_states));
    let mut overall = Array2::<T>::zeros((steps, num_states));
    for (t, states) in run.states().iter().enumerate() {
        for (node, &x) in states.iter().enumerate() {
            overall[[t, x]] += T::one();
            let d = graph.degree(node);
            if d > k_max {
                core[[t, x]] += T::one();
            } else if let Some(field) = by_degree.get_mut(&d) {
                field[[t, x]] += T::one();
            }
        }
    }
    for (k, field) in by_degree.iter_mut() {
        let n = T::from_count(degree_counts[k]);
        field.mapv_inplace(|v| v / n);
    }
    if graph.num_nodes() > 0 {
        let n = T::from_count(graph.num_nodes());
        overall.mapv_inplace(|v| v / n);
    }
    let core = (core_count > 0).then(|| {
        let n = T::from_count(core_count);
        core.mapv(|v| v / n)
    });
    EmpiricalFields {
        by_degree,
        degree_counts,
        core,
        core_count,
        overall,
    }
}

/// Time-averaged total variation `(1 / 2T) Σ_t Σ_x |μ̂_t(x) - μ_t(x)|`.
pub fn delta_mu<T: Scalar>(empirical: ArrayView2<T>, predicted: ArrayView2<T>) -> Result<T> {
    if empirical.dim() != predicted.dim() {
        return Err(Error::Shape(format!(
            "empirical {:?} vs predicted {:?}",
            empirical.dim(),
            predicted.dim()
        )));
    }
    let steps = empirical.nrows();
    if steps == 0 {
        return Err(Error::Shape("no time steps".into()));
    }
    let total: T = empirical
        .iter()
        .zip(predicted.iter())
        .map(|(&a, &b)| (a - b).abs())
        .sum();
    Ok(total / (T::lit(2.0) * T::from_count(steps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn delta_mu_cases() {
        let a: Array2<f64> = array![[0.6, 0.4], [0.6, 0.4], [0.6, 0.4]];
        let b = array![[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]];
        assert!((delta_mu(a.view(), b.view()).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(delta_mu(a.view(), a.view()).unwrap(), 0.0);
        let c = array![[1.0, 0.0], [0.0, 1.0]];
        let d = array![[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(delta_mu(c.view(), d.view()).unwrap(), 1.0);
        assert!(delta_mu(a.view(), c.view()).is_err());
    }

    fn dist_rows(raw: &[f64], rows: usize, cols: usize) -> Array2<f64> {
        let mut m = Array2::from_shape_fn((rows, cols), |(r, c)| raw[r * cols + c] + 1e-9);
        for mut row in m.rows_mut() {
            let s = row.sum();
            row.mapv_inplace(|v| v / s);
        }
        m
    }

    proptest! {
        #[test]
        fn delta_mu_bounds_and_symmetry(
            a in proptest::collection::vec(0.0f64..1.0, 12),
            b in proptest::collection::vec(0.0f64..1.0, 12),
        ) {
            let (x, y) = (dist_rows(&a, 4, 3), dist_rows(&b, 4, 3));
            let d = delta_mu(x.view(), y.view()).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
            prop_assert!((d - delta_mu(y.view(), x.view()).unwrap()).abs() < 1e-15);
            prop_assert_eq!(delta_mu(x.view(), x.view()).unwrap(), 0.0);
        }
    }
}
