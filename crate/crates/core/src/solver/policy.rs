use ndarray::{s, Array3, Array4, ArrayView3, ArrayViewMut1, Axis};
use serde::{Deserialize, Serialize};

use super::mdp::QTable;
use crate::error::{Error, Result};
use crate::Scalar;

/// Learned policies: stochastic per core class, deterministic per periphery degree.
///
/// `core` and `accumulator` are indexed `[class][t][x][u]`; `periphery`
/// holds actions indexed `[k-1][t][x]` once the periphery has been solved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyBundle<T> {
    core: Array4<T>,
    accumulator: Array4<T>,
    periphery: Option<Array3<usize>>,
}

impl<T: Scalar> PolicyBundle<T> {
    /// Uniform core policies with a zero accumulator.
    pub fn uniform(classes: usize, horizon: usize, states: usize, actions: usize) -> Self {
        let shape = (classes, horizon, states, actions);
        Self {
            core: Array4::from_elem(shape, T::one() / T::from_count(actions)),
            accumulator: Array4::zeros(shape),
            periphery: None,
        }
    }

    /// Wraps explicit core policies; the accumulator starts at zero.
    pub fn from_core(core: Array4<T>) -> Self {
        let accumulator = Array4::zeros(core.raw_dim());
        Self {
            core,
            accumulator,
            periphery: None,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.core.len_of(Axis(0))
    }

    pub fn horizon(&self) -> usize {
        self.core.len_of(Axis(1))
    }

    pub fn core(&self) -> &Array4<T> {
        &self.core
    }

    /// Policy of one core class, `[t][x][u]`.
    pub fn core_class(&self, class: usize) -> ArrayView3<'_, T> {
        self.core.index_axis(Axis(0), class)
    }

    pub fn accumulator(&self) -> &Array4<T> {
        &self.accumulator
    }

    pub fn periphery(&self) -> Option<&Array3<usize>> {
        self.periphery.as_ref()
    }

    pub fn periphery_k_max(&self) -> usize {
        self.periphery.as_ref().map_or(0, |p| p.len_of(Axis(0)))
    }

    pub fn set_periphery(&mut self, actions: Array3<usize>) {
        self.periphery = Some(actions);
    }

    /// Mirror-descent update: `y += γ Q` and `π = softmax(y)` row-wise, for
    /// every class, time and state. `q[i]` is the Q-table of class `i`.
    pub fn omd_step(&mut self, q: &[&QTable<T>], gamma: T) -> Result<()> {
        let (classes, steps, states, actions) = self.core.dim();
        if q.len() != classes {
            return Err(Error::Shape(format!("{} Q-tables for {classes} classes", q.len())));
        }
        for (i, qi) in q.iter().enumerate() {
            let qv = qi.values();
            if qv.dim() != (steps + 1, states, actions) {
                return Err(Error::Shape(format!(
                    "Q-table {:?} for policy of horizon {steps}",
                    qv.dim()
                )));
            }
            for t in 0..steps {
                for x in 0..states {
                    let mut y = self.accumulator.slice_mut(s![i, t, x, ..]);
                    y.zip_mut_with(&qv.slice(s![t, x, ..]), |a, &b| *a += gamma * b);
                    let mut row = self.core.slice_mut(s![i, t, x, ..]);
                    row.assign(&y);
                    softmax_in_place(row);
                }
            }
        }
        Ok(())
    }
}

/// Softmax with the row maximum subtracted first.
pub fn softmax_in_place<T: Scalar>(mut row: ArrayViewMut1<T>) {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    row.mapv_inplace(|v| (v - max).exp());
    let total: T = row.iter().copied().sum();
    row.mapv_inplace(|v| v / total);
}
