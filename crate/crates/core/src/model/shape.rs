/// Integer shape for a soft block of `area` cells at aspect ratio `ar`
/// (width / height), after clipping `ar` into `[ar_min, ar_max]`.
///
/// `w = round(sqrt(area * ar))`, `h = ceil(area / w)`, both at least 1, so the
/// realized area never falls short and exceeds `area` by less than one column.
pub fn shape_from_ar(area: u64, ar: f64, ar_min: f64, ar_max: f64) -> (u32, u32) {
    debug_assert!(area >= 1 && ar_min > 0.0 && ar_min <= ar_max);
    let ar = clip_ar(ar, ar_min, ar_max);
    let w = ((area as f64 * ar).sqrt().round() as u64).max(1);
    let h = area.div_ceil(w).max(1);
    (w as u32, h as u32)
}

/// Clips `ar` into the allowed range. NaN maps to the lower bound.
pub fn clip_ar(ar: f64, ar_min: f64, ar_max: f64) -> f64 {
    if ar.is_nan() {
        ar_min
    } else {
        ar.clamp(ar_min, ar_max)
    }
}

/// Maps a squashed policy output `z ∈ [-1, 1]` affinely onto the ratio range
/// and clips the result.
pub fn ar_from_unit(z: f64, ar_min: f64, ar_max: f64) -> f64 {
    clip_ar((z + 1.0) / 2.0 * (ar_max - ar_min) + ar_min, ar_min, ar_max)
}

/// `k` ratios spaced evenly in log space over `[ar_min, ar_max]`. A degenerate
/// range yields a single ratio.
pub fn ar_candidates(ar_min: f64, ar_max: f64, k: usize) -> Vec<f64> {
    if k <= 1 || ar_min == ar_max {
        return vec![(ar_min * ar_max).sqrt()];
    }
    let (lo, hi) = (ar_min.ln(), ar_max.ln());
    (0..k)
        .map(|i| {
            let t = i as f64 / (k - 1) as f64;
            (lo + t * (hi - lo)).exp().clamp(ar_min, ar_max)
        })
        .collect()
}

/// Shape for a hard block scaled onto the grid: floors both sides so the cell
/// area never exceeds the scaled target.
pub(crate) fn hard_shape(area: u64, ar: f64) -> (u32, u32) {
    let w = ((area as f64 * ar).sqrt().floor() as u64).clamp(1, area.max(1));
    let h = (area / w).max(1);
    (w as u32, h as u32)
}
