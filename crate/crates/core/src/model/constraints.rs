use serde::{Deserialize, Serialize};

/// Two blocks on different layers that must share projected area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPair {
    pub a: usize,
    pub b: usize,
    /// Required alignment area in cells²; the score saturates at 1 here.
    pub min_area: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BindMode {
    /// The block must touch every listed terminal.
    All,
    /// Touching any one of them suffices.
    Any,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryBinding {
    pub block: usize,
    pub terminals: Vec<usize>,
    pub mode: BindMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preplacement {
    pub block: usize,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub w: u32,
    pub h: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    #[serde(default)]
    pub alignment_pairs: Vec<AlignmentPair>,
    /// Voltage islands: blocks on one layer that must abut.
    #[serde(default)]
    pub groups: Vec<Vec<usize>>,
    #[serde(default)]
    pub boundary: Vec<BoundaryBinding>,
    #[serde(default)]
    pub preplaced: Vec<Preplacement>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.alignment_pairs.is_empty()
            && self.groups.is_empty()
            && self.boundary.is_empty()
            && self.preplaced.is_empty()
    }
}
