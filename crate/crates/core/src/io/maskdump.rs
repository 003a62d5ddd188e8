use std::fmt::Write as _;

use crate::grid::Grid;

/// One line per grid row `y = 0, 1, …`, cells `x = 0, 1, …` separated by
/// commas, six decimals.
pub fn mask_csv(grid: &Grid<f64>) -> String {
    let mut out = String::new();
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            if x > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.6}", grid.get(x, y));
        }
        out.push('\n');
    }
    out
}

/// Binary 8-bit PGM (`P5`), min-max scaled to `0..=255`, rows in the same
/// order as [`mask_csv`]. A constant grid maps to zero. Infinite values
/// clamp to the ends of the finite range.
pub fn mask_pgm(grid: &Grid<f64>) -> Vec<u8> {
    let finite = grid.as_slice().iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let mut out = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            let v = *grid.get(x, y);
            let px = if hi > lo {
                ((v.clamp(lo, hi) - lo) / (hi - lo) * 255.0).round() as u8
            } else {
                0
            };
            out.push(px);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_are_y() {
        let g = Grid::from_fn(3, 2, false, |x, y| f64::from(x + 10 * y));
        assert_eq!(
            mask_csv(&g),
            "0.000000,1.000000,2.000000\n10.000000,11.000000,12.000000\n"
        );
    }

    #[test]
    fn pgm_scales_min_max() {
        let g = Grid::from_fn(2, 1, false, |x, _| f64::from(x) * 3.0 + 1.0);
        let p = mask_pgm(&g);
        assert!(p.starts_with(b"P5\n2 1\n255\n"));
        assert_eq!(&p[p.len() - 2..], &[0, 255]);
        let flat = mask_pgm(&Grid::filled(2, 2, 5.0));
        assert_eq!(&flat[flat.len() - 4..], &[0; 4]);
    }
}
