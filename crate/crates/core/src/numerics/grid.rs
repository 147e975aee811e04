use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Uniform grid on `[a, b]`; open ends are offset inward by `margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    open_left: bool,
    open_right: bool,
    margin: f64,
    step: f64,
    points: Vec<f64>,
}

/// Serializable description of a grid. `margin: None` means `1e-6 * (b - a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n_points: usize,
    #[serde(default)]
    pub open_left: bool,
    #[serde(default)]
    pub open_right: bool,
    #[serde(default)]
    pub margin: Option<f64>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid>> {
        let margin = self.margin.unwrap_or(1e-6 * (self.b - self.a));
        build_grid(
            self.a,
            self.b,
            self.n_points,
            self.open_left,
            self.open_right,
            margin,
        )
    }
}

pub fn build_grid(
    a: f64,
    b: f64,
    n_points: usize,
    open_left: bool,
    open_right: bool,
    margin: f64,
) -> Result<Arc<Grid>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    if n_points < MIN_POINTS {
        return Err(Error::TooFewPoints {
            min: MIN_POINTS,
            got: n_points,
        });
    }
    let limit = 0.5 * (b - a);
    if (open_left || open_right) && !(margin > 0.0 && margin < limit) {
        return Err(Error::InvalidMargin { margin, limit });
    }
    let first = if open_left { a + margin } else { a };
    let last = if open_right { b - margin } else { b };
    let step = (last - first) / (n_points - 1) as f64;
    let mut points: Vec<f64> = (0..n_points).map(|i| first + step * i as f64).collect();
    points[n_points - 1] = last;
    Ok(Arc::new(Grid {
        a,
        b,
        open_left,
        open_right,
        margin,
        step,
        points,
    }))
}

impl Grid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn open_left(&self) -> bool {
        self.open_left
    }

    pub fn open_right(&self) -> bool {
        self.open_right
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn x(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn midpoint_index(&self) -> usize {
        self.len() / 2
    }

    /// Index of the grid point closest to `x`.
    pub fn index_of(&self, x: f64) -> usize {
        let t = ((x - self.points[0]) / self.step).round();
        t.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Distance from `x` to the nearer true endpoint (`a` or `b`).
    pub fn distance_to_end(&self, x: f64, left: bool) -> f64 {
        if left {
            x - self.a
        } else {
            self.b - x
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            a: self.a,
            b: self.b,
            n_points: self.len(),
            open_left: self.open_left,
            open_right: self.open_right,
            margin: Some(self.margin),
        }
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }
}

/// Reference point of an indefinite integral. `Left` and `Right` denote the
/// true endpoints `a`, `b`, which lie outside an open grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Left,
    Right,
    #[default]
    Midpoint,
    Index(usize),
}

impl Anchor {
    pub fn index(self, grid: &Grid) -> Result<usize> {
        let i = match self {
            Anchor::Left => 0,
            Anchor::Right => grid.len() - 1,
            Anchor::Midpoint => grid.midpoint_index(),
            Anchor::Index(i) => i,
        };
        grid.check_index(i)?;
        Ok(i)
    }
}

pub fn same_grid(g: &Arc<Grid>, h: &Arc<Grid>) -> bool {
    Arc::ptr_eq(g, h) || **g == **h
}
