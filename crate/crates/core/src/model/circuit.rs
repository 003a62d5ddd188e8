use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::constraints::ConstraintSet;
use crate::error::{Error, Result};

/// Default fraction of the stacked die area the blocks may occupy.
pub const DEFAULT_UTILIZATION: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    pub width: u32,
    pub height: u32,
    pub layers: u32,
}

impl GridDims {
    pub const fn new(width: u32, height: u32, layers: u32) -> Self {
        GridDims {
            width,
            height,
            layers,
        }
    }

    pub fn cells_per_layer(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.layers == 0 {
            return Err(Error::Invalid(format!("degenerate grid {self}")));
        }
        Ok(())
    }
}

impl Default for GridDims {
    fn default() -> Self {
        GridDims::new(128, 128, 2)
    }
}

impl std::fmt::Display for GridDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.width, self.height, self.layers)
    }
}

impl std::str::FromStr for GridDims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        let bad = || Error::Invalid(format!("expected WxHxL, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n = |p: &str| p.trim().parse::<u32>().map_err(|_| bad());
        let dims = GridDims::new(n(parts[0])?, n(parts[1])?, n(parts[2])?);
        dims.validate()?;
        Ok(dims)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: usize,
    pub name: String,
    /// Required area in grid cells.
    pub area: u64,
    /// Initial (hard: fixed) width and height in cells.
    pub width: u32,
    pub height: u32,
    pub ar_min: f64,
    pub ar_max: f64,
    pub soft: bool,
    pub layer: u32,
}

impl Block {
    pub fn hard(id: usize, name: impl Into<String>, width: u32, height: u32, layer: u32) -> Self {
        let ar = f64::from(width) / f64::from(height.max(1));
        Block {
            id,
            name: name.into(),
            area: u64::from(width) * u64::from(height),
            width,
            height,
            ar_min: ar,
            ar_max: ar,
            soft: false,
            layer,
        }
    }

    /// Soft block whose initial shape is the clipped square.
    pub fn soft(
        id: usize,
        name: impl Into<String>,
        area: u64,
        ar_min: f64,
        ar_max: f64,
        layer: u32,
    ) -> Self {
        let (width, height) = super::shape_from_ar(area.max(1), 1.0, ar_min, ar_max);
        Block {
            id,
            name: name.into(),
            area,
            width,
            height,
            ar_min,
            ar_max,
            soft: true,
            layer,
        }
    }

    /// Shape at ratio `ar`; hard blocks ignore the request.
    pub fn shape_at(&self, ar: f64) -> (u32, u32) {
        if self.soft {
            super::shape_from_ar(self.area, ar, self.ar_min, self.ar_max)
        } else {
            (self.width, self.height)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub id: usize,
    pub name: String,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pin {
    Block(usize),
    Terminal(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub members: Vec<Pin>,
}

/// Serialized form of a circuit; validated into [`Circuit`] on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub name: String,
    pub dims: GridDims,
    #[serde(default = "default_utilization")]
    pub utilization: f64,
    pub blocks: Vec<Block>,
    pub terminals: Vec<Terminal>,
    pub nets: Vec<Net>,
    #[serde(default)]
    pub constraints: ConstraintSet,
}

fn default_utilization() -> f64 {
    DEFAULT_UTILIZATION
}

/// Immutable problem instance. Construct through [`Circuit::new`], which
/// validates every structural invariant and builds the lookup tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitSpec", into = "CircuitSpec")]
pub struct Circuit {
    spec: CircuitSpec,
    nets_of_block: Vec<Vec<usize>>,
    partner: Vec<Option<usize>>,
    groups_of: Vec<Vec<usize>>,
    binding_of: Vec<Option<usize>>,
    preplacement_of: Vec<Option<usize>>,
    block_names: HashMap<String, usize>,
    terminal_names: HashMap<String, usize>,
}

impl TryFrom<CircuitSpec> for Circuit {
    type Error = Error;

    fn try_from(spec: CircuitSpec) -> Result<Self> {
        Circuit::new(spec)
    }
}

impl From<Circuit> for CircuitSpec {
    fn from(c: Circuit) -> Self {
        c.spec
    }
}

impl Circuit {
    pub fn new(spec: CircuitSpec) -> Result<Self> {
        let dims = spec.dims;
        dims.validate()?;
        let n = spec.blocks.len();
        if !(spec.utilization > 0.0 && spec.utilization <= 1.0) {
            return Err(Error::Invalid(format!(
                "utilization {} outside (0, 1]",
                spec.utilization
            )));
        }

        let mut block_names = HashMap::new();
        let mut total_area = 0u64;
        for (i, b) in spec.blocks.iter().enumerate() {
            if b.id != i {
                return Err(Error::Invalid(format!(
                    "block `{}` has id {} at index {i}",
                    b.name, b.id
                )));
            }
            if b.area == 0 || b.width == 0 || b.height == 0 {
                return Err(Error::Invalid(format!("block `{}` is degenerate", b.name)));
            }
            if !(b.ar_min > 0.0 && b.ar_min <= b.ar_max) {
                return Err(Error::Invalid(format!(
                    "block `{}` has bad ratio range",
                    b.name
                )));
            }
            if b.layer >= dims.layers {
                return Err(Error::Invalid(format!(
                    "block `{}` on missing layer {}",
                    b.name, b.layer
                )));
            }
            if block_names.insert(b.name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate block name `{}`", b.name)));
            }
            total_area += b.area;
        }
        for z in 0..dims.layers {
            let used: u64 = spec
                .blocks
                .iter()
                .filter(|b| b.layer == z)
                .map(|b| b.area)
                .sum();
            if used > dims.cells_per_layer() {
                return Err(Error::Invalid(format!(
                    "blocks on layer {z} need {used} cells, the layer has {}",
                    dims.cells_per_layer()
                )));
            }
        }
        let capacity = spec.utilization * dims.cells_per_layer() as f64 * f64::from(dims.layers);
        if total_area as f64 > capacity + 1e-9 {
            return Err(Error::Invalid(format!(
                "total block area {total_area} exceeds {:.0} cells at utilization {}",
                capacity, spec.utilization
            )));
        }

        let mut terminal_names = HashMap::new();
        for (i, t) in spec.terminals.iter().enumerate() {
            if t.id != i {
                return Err(Error::Invalid(format!(
                    "terminal `{}` has id {} at index {i}",
                    t.name, t.id
                )));
            }
            if t.x >= dims.width || t.y >= dims.height || t.z >= dims.layers {
                return Err(Error::Invalid(format!(
                    "terminal `{}` outside the grid",
                    t.name
                )));
            }
            if terminal_names.insert(t.name.clone(), i).is_some() {
                return Err(Error::Invalid(format!(
                    "duplicate terminal name `{}`",
                    t.name
                )));
            }
        }

        let mut nets_of_block = vec![Vec::new(); n];
        for (k, net) in spec.nets.iter().enumerate() {
            if net.members.is_empty() {
                return Err(Error::Invalid(format!("net {k} is empty")));
            }
            let mut seen = HashSet::new();
            for &m in &net.members {
                if !seen.insert(m) {
                    return Err(Error::Invalid(format!("net {k} lists {m:?} twice")));
                }
                match m {
                    Pin::Block(b) if b < n => nets_of_block[b].push(k),
                    Pin::Terminal(t) if t < spec.terminals.len() => {}
                    _ => return Err(Error::Invalid(format!("net {k} references missing {m:?}"))),
                }
            }
        }

        let cs = &spec.constraints;
        let check_block = |b: usize, what: &str| {
            if b < n {
                Ok(())
            } else {
                Err(Error::Invalid(format!(
                    "{what} references missing block {b}"
                )))
            }
        };

        let mut partner = vec![None; n];
        for p in &cs.alignment_pairs {
            check_block(p.a, "alignment pair")?;
            check_block(p.b, "alignment pair")?;
            if p.a == p.b || spec.blocks[p.a].layer == spec.blocks[p.b].layer {
                return Err(Error::Invalid(format!(
                    "alignment pair ({}, {}) must span two layers",
                    p.a, p.b
                )));
            }
            if !(p.min_area > 0.0) {
                return Err(Error::Invalid(format!(
                    "alignment pair ({}, {}) needs min_area > 0",
                    p.a, p.b
                )));
            }
            for (x, y) in [(p.a, p.b), (p.b, p.a)] {
                if partner[x].replace(y).is_some() {
                    return Err(Error::Invalid(format!(
                        "block {x} has more than one alignment partner"
                    )));
                }
            }
        }

        let mut groups_of = vec![Vec::new(); n];
        for (g, members) in cs.groups.iter().enumerate() {
            if members.len() < 2 {
                return Err(Error::Invalid(format!(
                    "group {g} needs at least two blocks"
                )));
            }
            for &b in members {
                check_block(b, "group")?;
                if spec.blocks[b].layer != spec.blocks[members[0]].layer {
                    return Err(Error::Invalid(format!("group {g} spans several layers")));
                }
                if groups_of[b].last() == Some(&g) {
                    return Err(Error::Invalid(format!("group {g} lists block {b} twice")));
                }
                groups_of[b].push(g);
            }
        }

        let mut binding_of = vec![None; n];
        for (k, bind) in cs.boundary.iter().enumerate() {
            check_block(bind.block, "boundary binding")?;
            if bind.terminals.is_empty() {
                return Err(Error::Invalid(format!(
                    "boundary binding of block {} has no terminals",
                    bind.block
                )));
            }
            if let Some(&t) = bind.terminals.iter().find(|&&t| t >= spec.terminals.len()) {
                return Err(Error::Invalid(format!(
                    "boundary binding references missing terminal {t}"
                )));
            }
            if binding_of[bind.block].replace(k).is_some() {
                return Err(Error::Invalid(format!(
                    "block {} has two boundary bindings",
                    bind.block
                )));
            }
        }

        let mut preplacement_of = vec![None; n];
        for (k, p) in cs.preplaced.iter().enumerate() {
            check_block(p.block, "pre-placement")?;
            if p.w == 0 || p.h == 0 || p.x + p.w > dims.width || p.y + p.h > dims.height {
                return Err(Error::Invalid(format!(
                    "pre-placement of block {} is out of bounds",
                    p.block
                )));
            }
            if p.z != spec.blocks[p.block].layer {
                return Err(Error::Invalid(format!(
                    "pre-placement of block {} on layer {} but block is assigned layer {}",
                    p.block, p.z, spec.blocks[p.block].layer
                )));
            }
            if preplacement_of[p.block].replace(k).is_some() {
                return Err(Error::Invalid(format!(
                    "block {} pre-placed twice",
                    p.block
                )));
            }
        }
        for (i, p) in cs.preplaced.iter().enumerate() {
            for q in &cs.preplaced[i + 1..] {
                let ox = (p.x + p.w).min(q.x + q.w).saturating_sub(p.x.max(q.x));
                let oy = (p.y + p.h).min(q.y + q.h).saturating_sub(p.y.max(q.y));
                if p.z == q.z && ox > 0 && oy > 0 {
                    return Err(Error::Invalid(format!(
                        "pre-placed blocks {} and {} overlap",
                        p.block, q.block
                    )));
                }
            }
        }

        Ok(Circuit {
            spec,
            nets_of_block,
            partner,
            groups_of,
            binding_of,
            preplacement_of,
            block_names,
            terminal_names,
        })
    }

    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn dims(&self) -> GridDims {
        self.spec.dims
    }

    pub fn utilization(&self) -> f64 {
        self.spec.utilization
    }

    pub fn blocks(&self) -> &[Block] {
        &self.spec.blocks
    }

    pub fn block(&self, id: usize) -> &Block {
        &self.spec.blocks[id]
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.spec.terminals
    }

    pub fn terminal(&self, id: usize) -> &Terminal {
        &self.spec.terminals[id]
    }

    pub fn nets(&self) -> &[Net] {
        &self.spec.nets
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.spec.constraints
    }

    pub fn nets_of(&self, block: usize) -> &[usize] {
        &self.nets_of_block[block]
    }

    pub fn alignment_partner(&self, block: usize) -> Option<usize> {
        self.partner[block]
    }

    /// Index into `constraints().alignment_pairs` for the pair containing `block`.
    pub fn alignment_pair_of(&self, block: usize) -> Option<&super::AlignmentPair> {
        let other = self.partner[block]?;
        self.spec
            .constraints
            .alignment_pairs
            .iter()
            .find(|p| (p.a == block && p.b == other) || (p.b == block && p.a == other))
    }

    /// Indices of the groups listing `block`. A block may sit in several
    /// groups.
    pub fn groups_of(&self, block: usize) -> &[usize] {
        &self.groups_of[block]
    }

    /// Blocks sharing at least one group with `block`, ascending.
    pub fn group_mates(&self, block: usize) -> Vec<usize> {
        let mut mates: Vec<usize> = self.groups_of[block]
            .iter()
            .flat_map(|&g| self.spec.constraints.groups[g].iter().copied())
            .filter(|&m| m != block)
            .collect();
        mates.sort_unstable();
        mates.dedup();
        mates
    }

    pub fn binding_of(&self, block: usize) -> Option<&super::BoundaryBinding> {
        self.binding_of[block].map(|k| &self.spec.constraints.boundary[k])
    }

    pub fn preplacement_of(&self, block: usize) -> Option<&super::Preplacement> {
        self.preplacement_of[block].map(|k| &self.spec.constraints.preplaced[k])
    }

    pub fn block_id(&self, name: &str) -> Option<usize> {
        self.block_names.get(name).copied()
    }

    pub fn terminal_id(&self, name: &str) -> Option<usize> {
        self.terminal_names.get(name).copied()
    }

    pub fn total_block_area(&self) -> u64 {
        self.spec.blocks.iter().map(|b| b.area).sum()
    }

    /// Returns a copy with a different constraint set, re-validated.
    pub fn with_constraints(&self, constraints: ConstraintSet) -> Result<Circuit> {
        let mut spec = self.spec.clone();
        spec.constraints = constraints;
        Circuit::new(spec)
    }

    /// Returns a copy with blocks moved to the given layers, re-validated.
    pub fn with_layers(&self, layers: &[(usize, u32)]) -> Result<Circuit> {
        let mut spec = self.spec.clone();
        for &(b, z) in layers {
            let block = spec
                .blocks
                .get_mut(b)
                .ok_or_else(|| Error::Invalid(format!("layer assignment for missing block {b}")))?;
            block.layer = z;
        }
        Circuit::new(spec)
    }
}
