//! Dense W×H matrices indexed by placement anchor `(x, y)`.
//!
//! Storage is row-major over the x axis: row `x` holds the `H` values
//! `(x, 0) .. (x, H-1)`, matching a `(W, H)` tensor with `ij` indexing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: u32, height: u32, value: T) -> Self {
        Grid {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }
}

impl<T> Grid<T> {
    /// Builds a grid by evaluating `f(x, y)` at every cell. With `parallel` the
    /// rows are evaluated on the rayon pool; the result is identical either way.
    pub fn from_fn<F>(width: u32, height: u32, parallel: bool, f: F) -> Self
    where
        T: Send,
        F: Fn(u32, u32) -> T + Sync,
    {
        let h = height as usize;
        let data = if parallel && width > 1 {
            (0..width)
                .into_par_iter()
                .flat_map_iter(|x| (0..height).map(move |y| (x, y)))
                .map(|(x, y)| f(x, y))
                .collect()
        } else {
            let mut data = Vec::with_capacity(width as usize * h);
            for x in 0..width {
                for y in 0..height {
                    data.push(f(x, y));
                }
            }
            data
        };
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        x as usize * self.height as usize + y as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> &T {
        &self.data[self.index(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: T) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Cells in storage order, `(x, y, &value)`.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, &T)> + '_ {
        let h = self.height;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| ((i as u32) / h, (i as u32) % h, v))
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_with<U, V, F: Fn(&T, &U) -> V>(&self, other: &Grid<U>, f: F) -> Grid<V> {
        assert!(self.same_dims(other), "grid dimension mismatch");
        Grid {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl Grid<bool> {
    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn any(&self) -> bool {
        self.data.iter().any(|&v| v)
    }

    pub fn and(&self, other: &Grid<bool>) -> Grid<bool> {
        self.zip_with(other, |a, b| *a && *b)
    }
}

impl Grid<f64> {
    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Summed-area table over a boolean occupancy grid, used for O(1) rectangle
/// emptiness queries.
pub(crate) struct PrefixSum {
    height: usize,
    sums: Vec<u32>,
}

impl PrefixSum {
    pub(crate) fn new(grid: &Grid<bool>) -> Self {
        let (w, h) = (grid.width() as usize, grid.height() as usize);
        let stride = h + 1;
        let mut sums = vec![0u32; (w + 1) * stride];
        for x in 0..w {
            for y in 0..h {
                let v = u32::from(*grid.get(x as u32, y as u32));
                sums[(x + 1) * stride + y + 1] =
                    v + sums[x * stride + y + 1] + sums[(x + 1) * stride + y]
                        - sums[x * stride + y];
            }
        }
        PrefixSum { height: h, sums }
    }

    /// Number of set cells in `[x0, x1) × [y0, y1)`.
    pub(crate) fn rect(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u32 {
        let s = self.height + 1;
        self.sums[x1 * s + y1] + self.sums[x0 * s + y0]
            - self.sums[x0 * s + y1]
            - self.sums[x1 * s + y0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_parallel_matches_sequential() {
        let f = |x: u32, y: u32| (x * 31 + y * 7) as f64 / 3.0;
        let a = Grid::from_fn(13, 9, false, f);
        let b = Grid::from_fn(13, 9, true, f);
        assert_eq!(a, b);
        assert_eq!(*a.get(12, 8), (12.0 * 31.0 + 56.0) / 3.0);
    }

    #[test]
    fn prefix_sum_counts_rectangles() {
        let mut g = Grid::filled(5, 4, false);
        g.set(1, 1, true);
        g.set(3, 2, true);
        let p = PrefixSum::new(&g);
        assert_eq!(p.rect(0, 0, 5, 4), 2);
        assert_eq!(p.rect(1, 1, 2, 2), 1);
        assert_eq!(p.rect(2, 0, 3, 4), 0);
        assert_eq!(p.rect(1, 1, 4, 3), 2);
    }
}
