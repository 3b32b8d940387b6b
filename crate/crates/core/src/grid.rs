//! Uniform Cartesian sample grids and the finite-difference helpers shared by
//! the Laplace–Beltrami, eikonal and sine-Gordon residual operators.
//!
//! Samples are stored row-major: index `j * nx + i` holds the value at
//! `(x0 + i h, y0 + j h)`. Stencil operators return `Grid<Option<T>>`; a
//! `None` entry marks a node whose stencil would leave the grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<T>,
}

impl<T> Grid<T> {
    /// Samples `f` on the grid. Rows are filled in parallel; the result does
    /// not depend on the number of worker threads.
    pub fn from_fn<F>(x0: f64, y0: f64, h: f64, nx: usize, ny: usize, f: F) -> Result<Self>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync,
    {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("grid must have at least one node per axis".into()));
        }
        let data = (0..ny)
            .into_par_iter()
            .flat_map_iter(|j| {
                let y = y0 + j as f64 * h;
                let f = &f;
                (0..nx).map(move |i| f(x0 + i as f64 * h, y))
            })
            .collect();
        Ok(Self { x0, y0, h, nx, ny, data })
    }

    /// Grid covering `[xmin, xmax] x [ymin, ymax]` with step `h`; the upper
    /// bounds are included when they fall on a node (up to rounding).
    pub fn over_box<F>(xmin: f64, xmax: f64, ymin: f64, ymax: f64, h: f64, f: F) -> Result<Self>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync,
    {
        if !(xmax >= xmin && ymax >= ymin) {
            return Err(Error::InvalidArgument("empty grid box".into()));
        }
        let nx = ((xmax - xmin) / h + 1e-9).floor() as usize + 1;
        let ny = ((ymax - ymin) / h + 1e-9).floor() as usize + 1;
        Self::from_fn(xmin, ymin, h, nx, ny, f)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[j * self.nx + i]
    }

    /// Iterates `(x, y, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &T)> {
        self.data.iter().enumerate().map(move |(k, v)| (self.x(k % self.nx), self.y(k / self.nx), v))
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Grid<U> {
        Grid { x0: self.x0, y0: self.y0, h: self.h, nx: self.nx, ny: self.ny, data: self.data.iter().map(f).collect() }
    }

    /// Fails if any node lies outside `inside`.
    pub fn check_nodes(&self, inside: impl Fn(f64, f64) -> bool) -> Result<()> {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = (self.x(i), self.y(j));
                if !inside(x, y) {
                    return Err(Error::StencilOutOfDomain { x, y });
                }
            }
        }
        Ok(())
    }

    /// Applies a stencil at every node with a full one-cell neighbourhood;
    /// edge nodes are masked. The closure receives `(x, y, n)` where
    /// `n(di, dj)` reads the neighbour at integer offset `(di, dj)`.
    pub fn stencil<U, F>(&self, f: F) -> Grid<Option<U>>
    where
        T: Sync,
        U: Send,
        F: for<'a> Fn(f64, f64, &'a dyn Fn(isize, isize) -> &'a T) -> U + Sync,
    {
        let nx = self.nx;
        let ny = self.ny;
        let data = (0..ny)
            .into_par_iter()
            .flat_map_iter(|j| {
                let f = &f;
                (0..nx).map(move |i| {
                    if i == 0 || j == 0 || i + 1 >= nx || j + 1 >= ny {
                        return None;
                    }
                    let read = |di: isize, dj: isize| {
                        let ii = (i as isize + di) as usize;
                        let jj = (j as isize + dj) as usize;
                        &self.data[jj * nx + ii]
                    };
                    Some(f(self.x(i), self.y(j), &read))
                })
            })
            .collect();
        Grid { x0: self.x0, y0: self.y0, h: self.h, nx, ny, data }
    }
}

impl<T> Grid<Option<T>> {
    /// Maximum of `f` over unmasked nodes; `0.0` if every node is masked.
    pub fn max_by(&self, f: impl Fn(&T) -> f64) -> f64 {
        self.data.iter().flatten().map(f).fold(0.0, f64::max)
    }

    pub fn unmasked(&self) -> usize {
        self.data.iter().filter(|v| v.is_some()).count()
    }
}

/// Observed convergence orders from errors measured at steps that shrink by
/// `ratio` each level: `log(e_k / e_{k+1}) / log(ratio)`.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).ln() / ratio.ln()).collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_order(steps: &[f64], errors: &[f64]) -> f64 {
    let n = steps.len().min(errors.len()) as f64;
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_masks_edges() {
        let g = Grid::from_fn(0.0, 0.0, 0.5, 4, 3, |x, y| x + y).unwrap();
        let s = g.stencil(|_, _, n| *n(1, 0) - *n(-1, 0));
        assert_eq!(s.unmasked(), 2);
        assert_eq!(s.at(1, 1), &Some(1.0));
        assert_eq!(s.at(0, 1), &None);
    }

    #[test]
    fn box_includes_upper_bound() {
        let g = Grid::over_box(-0.5, 0.5, 0.1, 0.3, 0.1, |_, _| 0.0).unwrap();
        assert_eq!((g.nx, g.ny), (11, 3));
        assert!((g.x(g.nx - 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orders_of_exact_power_law() {
        let e = [1.0, 0.25, 0.0625];
        for o in observed_orders(&e, 2.0) {
            assert!((o - 2.0).abs() < 1e-12);
        }
        assert!((fitted_order(&[0.1, 0.05, 0.025], &[0.01, 0.0025, 0.000625]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_step() {
        assert!(Grid::from_fn(0.0, 0.0, 0.0, 2, 2, |_, _| 0.0).is_err());
    }
}
