use std::fmt::Write as _;

use crate::metrics::projected_intersection;
use crate::model::FloorplanState;

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    /// Pixels per grid cell.
    pub scale: f64,
    /// Pixels between layer panels.
    pub gap: f64,
    pub terminals: bool,
    pub labels: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            scale: 4.0,
            gap: 16.0,
            terminals: true,
            labels: true,
        }
    }
}

/// Alignment class of a block: `Some(true)` when it and its partner are
/// placed and share more than half the smaller area, `Some(false)` when the
/// pair misses that, `None` for blocks without a partner.
fn alignment_class(state: &FloorplanState, block: usize) -> Option<bool> {
    let partner = state.circuit().alignment_partner(block)?;
    let (Some(a), Some(b)) = (state.placement(block), state.placement(partner)) else {
        return Some(false);
    };
    let min = state
        .circuit()
        .block(block)
        .area
        .min(state.circuit().block(partner).area);
    Some(2 * projected_intersection(&a, &b) > min)
}

/// One panel per layer, left to right. Block rectangles carry the class
/// `block` plus `aln-satisfied` or `aln-violated` for aligned pairs. The y
/// axis points up, as on the grid.
pub fn render_svg(state: &FloorplanState, opts: &SvgOptions) -> String {
    let dims = state.dims();
    let s = opts.scale;
    let (pw, ph) = (f64::from(dims.width) * s, f64::from(dims.height) * s);
    let total_w = pw * f64::from(dims.layers) + opts.gap * f64::from(dims.layers.saturating_sub(1));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{ph}" viewBox="0 0 {total_w} {ph}">"#
    );
    out.push_str(concat!(
        "<style>.die{fill:#fafafa;stroke:#333}.block{fill:#9ec5e8;stroke:#1f4e79}",
        ".aln-satisfied{fill:#a8d5a2}.aln-violated{fill:#f2a7a0}",
        ".terminal{fill:#c0392b}text{font:10px sans-serif}</style>\n"
    ));
    for z in 0..dims.layers {
        let ox = f64::from(z) * (pw + opts.gap);
        let _ = writeln!(
            out,
            r#"<g class="layer" data-layer="{z}" transform="translate({ox} 0)">"#
        );
        let _ = writeln!(
            out,
            r#"<rect class="die" x="0" y="0" width="{pw}" height="{ph}"/>"#
        );
        for (id, p) in state.placed().filter(|(_, p)| p.z == z) {
            let class = match alignment_class(state, id) {
                Some(true) => "block aln-satisfied",
                Some(false) => "block aln-violated",
                None => "block",
            };
            let (x, y) = (
                f64::from(p.x) * s,
                (f64::from(dims.height) - f64::from(p.y_end())) * s,
            );
            let (w, h) = (f64::from(p.w) * s, f64::from(p.h) * s);
            let _ = writeln!(
                out,
                r#"<rect class="{class}" data-block="{id}" x="{x}" y="{y}" width="{w}" height="{h}"/>"#
            );
            if opts.labels {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" text-anchor="middle">{id}</text>"#,
                    x + w / 2.0,
                    y + h / 2.0
                );
            }
        }
        if opts.terminals {
            for t in state.circuit().terminals() {
                let cx = (f64::from(t.x) + 0.5) * s;
                let cy = (f64::from(dims.height) - f64::from(t.y) - 0.5) * s;
                let _ = writeln!(
                    out,
                    r#"<circle class="terminal" cx="{cx}" cy="{cy}" r="{}"/>"#,
                    s.max(2.0) / 2.0
                );
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
