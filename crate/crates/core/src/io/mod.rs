//! File formats: bookshelf circuits, constraint and placement documents,
//! reports, SVG layouts and mask dumps; plus the seeded constraint and
//! circuit generators.

pub mod bookshelf;
mod constraints;
mod maskdump;
mod placement;
mod report;
mod svg;
pub mod synth;

use std::path::Path;

pub use bookshelf::{load_dir, parse_circuit, write_bookshelf};
pub use constraints::{
    gen_constraints, AlignmentEntry, BoundaryEntry, ConstraintCounts, ConstraintFile,
    PreplacedEntry,
};
pub use maskdump::{mask_csv, mask_pgm};
pub use placement::{PlacedBlock, PlacementFile, PlacementHeader};
pub use report::{Report, ReportRow};
pub use svg::{render_svg, SvgOptions};
pub use synth::{synth_instance, synthesize, SynthSpec};

use crate::error::{Error, Result};
use crate::model::{Circuit, GridDims};

/// Loads a circuit from a bookshelf directory or a JSON circuit document.
/// `dims` and `utilization` only apply to bookshelf input.
pub fn load_circuit(path: &Path, dims: GridDims, utilization: Option<f64>) -> Result<Circuit> {
    if path.is_dir() {
        load_dir(path, dims, utilization)
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes the circuit as a JSON document.
pub fn save_circuit(circuit: &Circuit, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(circuit)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
