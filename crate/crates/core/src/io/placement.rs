use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Circuit, FloorplanState, TaskProfile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementHeader {
    pub circuit: String,
    pub task: u8,
    pub solver: String,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub layers: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedBlock {
    pub id: usize,
    pub name: String,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub w: u32,
    pub h: u32,
}

/// A finished layout. Unplaced blocks are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementFile {
    pub header: PlacementHeader,
    pub blocks: Vec<PlacedBlock>,
}

impl PlacementFile {
    pub fn from_state(state: &FloorplanState, task: u8, solver: &str, seed: u64) -> Self {
        let dims = state.dims();
        PlacementFile {
            header: PlacementHeader {
                circuit: state.circuit().name().to_string(),
                task,
                solver: solver.to_string(),
                seed,
                width: dims.width,
                height: dims.height,
                layers: dims.layers,
            },
            blocks: state
                .placed()
                .map(|(id, p)| PlacedBlock {
                    id,
                    name: state.circuit().block(id).name.clone(),
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    w: p.w,
                    h: p.h,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    /// Rebuilds the layout on `circuit`. Block names, layers and shapes are
    /// checked against the circuit; positions are taken as given, so overlap
    /// and bounds can be measured independently afterwards.
    pub fn restore(&self, circuit: Arc<Circuit>, task: &TaskProfile) -> Result<FloorplanState> {
        let dims = circuit.dims();
        let h = &self.header;
        if (h.width, h.height, h.layers) != (dims.width, dims.height, dims.layers) {
            return Err(Error::Invalid(format!(
                "placement is for a {}x{}x{} grid, circuit uses {dims}",
                h.width, h.height, h.layers
            )));
        }
        let mut state = FloorplanState::new(circuit.clone(), task, None)?;
        for b in &self.blocks {
            let block = circuit
                .blocks()
                .get(b.id)
                .filter(|blk| blk.name == b.name)
                .ok_or_else(|| Error::UnknownSymbol(b.name.clone()))?;
            if b.z != block.layer {
                return Err(Error::Invalid(format!(
                    "block `{}` is on layer {}, not {}",
                    b.name, block.layer, b.z
                )));
            }
            let fits = if block.soft {
                u64::from(b.w) * u64::from(b.h) >= block.area
            } else {
                (b.w, b.h) == (block.width, block.height)
            };
            if b.w == 0 || b.h == 0 || !fits {
                return Err(Error::Invalid(format!(
                    "block `{}` has an invalid shape {}x{}",
                    b.name, b.w, b.h
                )));
            }
            state.force_shape(b.id, b.w, b.h);
            state.force_place(b.id, b.x, b.y);
        }
        state.mark_done();
        Ok(state)
    }
}
