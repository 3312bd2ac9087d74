use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelKind, State};

/// Uniform time grid `t_start = t_0 < t_1 < ... < t_{n-1} = t_end`.
///
/// Time zero is where the initial conditions hold, so grids may not start
/// before it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        let g = Self {
            t_start,
            t_end,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_start.is_finite() || self.t_start < 0.0 {
            return Err(Error::validation("t_start", "must be finite and >= 0"));
        }
        if !self.t_end.is_finite() || self.t_end <= self.t_start {
            return Err(Error::validation("t_end", "must be finite and > t_start"));
        }
        if self.n_points < 2 {
            return Err(Error::validation("n_points", "must be >= 2"));
        }
        let last_gap = self.point(self.n_points - 1) - self.point(self.n_points - 2);
        if !(last_gap > 0.0) {
            return Err(Error::validation(
                "n_points",
                "too many points for the interval; grid is not strictly increasing",
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    /// The `index`-th grid time. Endpoints are returned exactly.
    pub fn point(&self, index: usize) -> f64 {
        let last = self.n_points - 1;
        if index == 0 {
            self.t_start
        } else if index >= last {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (index as f64 / last as f64)
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|k| self.point(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Reference,
}

/// States sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<State>,
    pub provenance: Provenance,
    pub model: ModelKind,
    /// First index holding a non-finite state, if any.
    pub diverged: Option<usize>,
}

impl Trajectory {
    pub fn new(
        grid: TimeGrid,
        states: Vec<State>,
        provenance: Provenance,
        model: ModelKind,
    ) -> Self {
        assert_eq!(grid.len(), states.len(), "one state per grid point");
        let diverged = states.iter().position(|x| !x.is_finite());
        Self {
            grid,
            states,
            provenance,
            model,
            diverged,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.grid.points()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, State)> + '_ {
        self.grid.points().zip(self.states.iter().copied())
    }

    pub fn last(&self) -> State {
        *self.states.last().expect("grid has at least two points")
    }
}
