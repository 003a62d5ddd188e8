use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AlignmentPair, BindMode, BoundaryBinding, Circuit, ConstraintSet, GridDims, Preplacement,
    Terminal,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentEntry {
    pub a: String,
    pub b: String,
    /// Required alignment area as a fraction of the smaller block's area.
    #[serde(default = "one")]
    pub min_area_frac: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEntry {
    pub block: String,
    pub terminals: Vec<String>,
    #[serde(default = "all")]
    pub mode: BindMode,
}

fn all() -> BindMode {
    BindMode::All
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreplacedEntry {
    pub block: String,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub w: u32,
    pub h: u32,
}

/// Constraint document keyed by block and terminal names.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintFile {
    #[serde(default)]
    pub alignment_pairs: Vec<AlignmentEntry>,
    #[serde(default)]
    pub groups: Vec<Vec<String>>,
    #[serde(default)]
    pub boundary: Vec<BoundaryEntry>,
    #[serde(default)]
    pub preplaced: Vec<PreplacedEntry>,
    /// Layer per block name; unlisted blocks keep their layer.
    #[serde(default)]
    pub layers: BTreeMap<String, u32>,
}

impl ConstraintFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn is_empty(&self) -> bool {
        self.alignment_pairs.is_empty()
            && self.groups.is_empty()
            && self.boundary.is_empty()
            && self.preplaced.is_empty()
    }

    /// Document describing `circuit`'s constraints and every block's layer.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let bname = |b: usize| circuit.block(b).name.clone();
        let cs = circuit.constraints();
        ConstraintFile {
            alignment_pairs: cs
                .alignment_pairs
                .iter()
                .map(|p| AlignmentEntry {
                    a: bname(p.a),
                    b: bname(p.b),
                    min_area_frac: p.min_area / min_area(circuit, p.a, p.b),
                })
                .collect(),
            groups: cs
                .groups
                .iter()
                .map(|g| g.iter().map(|&b| bname(b)).collect())
                .collect(),
            boundary: cs
                .boundary
                .iter()
                .map(|b| BoundaryEntry {
                    block: bname(b.block),
                    terminals: b
                        .terminals
                        .iter()
                        .map(|&t| circuit.terminal(t).name.clone())
                        .collect(),
                    mode: b.mode,
                })
                .collect(),
            preplaced: cs
                .preplaced
                .iter()
                .map(|p| PreplacedEntry {
                    block: bname(p.block),
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    w: p.w,
                    h: p.h,
                })
                .collect(),
            layers: circuit
                .blocks()
                .iter()
                .map(|b| (b.name.clone(), b.layer))
                .collect(),
        }
    }

    /// Returns `circuit` with this file's layers and constraints, replacing
    /// any constraints it had. The result is fully re-validated.
    pub fn apply(&self, circuit: &Circuit) -> Result<Circuit> {
        let block = |name: &str| {
            circuit
                .block_id(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
        };
        let terminal = |name: &str| {
            circuit
                .terminal_id(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
        };

        let mut spec = circuit.spec().clone();
        for (name, &z) in &self.layers {
            spec.blocks[block(name)?].layer = z;
        }
        let mut cs = ConstraintSet::default();
        for p in &self.alignment_pairs {
            let (a, b) = (block(&p.a)?, block(&p.b)?);
            if !(p.min_area_frac > 0.0) {
                return Err(Error::Invalid(format!(
                    "alignment pair ({}, {}) needs min_area_frac > 0",
                    p.a, p.b
                )));
            }
            cs.alignment_pairs.push(AlignmentPair {
                a,
                b,
                min_area: p.min_area_frac * min_area(circuit, a, b),
            });
        }
        for g in &self.groups {
            cs.groups
                .push(g.iter().map(|n| block(n)).collect::<Result<_>>()?);
        }
        for b in &self.boundary {
            cs.boundary.push(BoundaryBinding {
                block: block(&b.block)?,
                terminals: b
                    .terminals
                    .iter()
                    .map(|t| terminal(t))
                    .collect::<Result<_>>()?,
                mode: b.mode,
            });
        }
        for p in &self.preplaced {
            cs.preplaced.push(Preplacement {
                block: block(&p.block)?,
                x: p.x,
                y: p.y,
                z: p.z,
                w: p.w,
                h: p.h,
            });
        }
        spec.constraints = cs;
        Circuit::new(spec)
    }
}

fn min_area(circuit: &Circuit, a: usize, b: usize) -> f64 {
    circuit.block(a).area.min(circuit.block(b).area) as f64
}

/// Number of constrained blocks per rule, as listed per circuit in the
/// benchmark constraint tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCounts {
    /// Blocks in alignment pairs; must be even.
    pub alignment: usize,
    /// Blocks bound to a boundary terminal.
    pub boundary: usize,
    /// Blocks in two-block groups; must be even.
    pub grouping: usize,
}

impl ConstraintCounts {
    pub const fn new(alignment: usize, boundary: usize, grouping: usize) -> Self {
        ConstraintCounts {
            alignment,
            boundary,
            grouping,
        }
    }
}

/// Seeded constraint sampler.
///
/// - alignment: blocks are visited in seeded order and paired with the
///   unpaired block on another layer closest in area;
/// - boundary: the larger member of each alignment pair is bound first, then
///   the remaining blocks by descending area; each gets one distinct outline
///   terminal, the terminals spaced evenly along the outline from a seeded
///   start;
/// - grouping: seeded same-layer pairs.
///
/// Grouping pairs are drawn as a seeded perfect matching per layer first; a
/// layer with an odd block count adds one pair joining its leftover block to
/// a random other block, so a block can end up in two groups. Layers are
/// taken from the circuit and written to the file.
pub fn gen_constraints(
    circuit: &Circuit,
    counts: ConstraintCounts,
    seed: u64,
) -> Result<ConstraintFile> {
    let n = circuit.blocks().len();
    let infeasible = |m: String| Err(Error::Invalid(format!("cannot generate constraints: {m}")));
    if !counts.alignment.is_multiple_of(2) || !counts.grouping.is_multiple_of(2) {
        return infeasible("alignment and grouping counts must be even".into());
    }
    if counts.alignment > n || counts.grouping > n || counts.boundary > n {
        return infeasible(format!("counts {counts:?} exceed {n} blocks"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area = |b: usize| circuit.block(b).area;
    let dims = circuit.dims();
    let layers: Vec<u32> = circuit.blocks().iter().map(|b| b.layer).collect();
    let layer = |b: usize| layers[b];

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut paired = vec![false; n];
    let mut visit: Vec<usize> = (0..n).collect();
    visit.shuffle(&mut rng);
    for &i in &visit {
        if pairs.len() * 2 == counts.alignment {
            break;
        }
        if paired[i] {
            continue;
        }
        let best = (0..n)
            .filter(|&j| !paired[j] && j != i && layer(j) != layer(i))
            .min_by_key(|&j| (area(i).abs_diff(area(j)), j));
        if let Some(j) = best {
            paired[i] = true;
            paired[j] = true;
            pairs.push((i, j));
        }
    }
    if pairs.len() * 2 != counts.alignment {
        return infeasible(format!("only {} cross-layer pairs available", pairs.len()));
    }

    let mut bound: Vec<usize> = pairs
        .iter()
        .map(|&(a, b)| if (area(a), b) >= (area(b), a) { a } else { b })
        .collect();
    let mut rest: Vec<usize> = (0..n).filter(|b| !bound.contains(b)).collect();
    rest.sort_by(|&a, &b| area(b).cmp(&area(a)).then(a.cmp(&b)));
    bound.extend(rest);
    bound.truncate(counts.boundary);
    let on_outline =
        |t: &&Terminal| t.x == 0 || t.y == 0 || t.x + 1 == dims.width || t.y + 1 == dims.height;
    let mut pool: Vec<&Terminal> = circuit.terminals().iter().filter(on_outline).collect();
    if pool.len() < bound.len() {
        pool = circuit.terminals().iter().collect();
    }
    if pool.len() < bound.len() {
        return infeasible(format!(
            "{} terminals for {} bindings",
            pool.len(),
            bound.len()
        ));
    }
    pool.sort_by_key(|t| (outline_position(t, dims), t.id));
    let mut terminals: Vec<usize> = Vec::with_capacity(bound.len());
    if !bound.is_empty() {
        let offset = rng.gen_range(0..pool.len());
        for k in 0..bound.len() {
            terminals.push(pool[(offset + k * pool.len() / bound.len()) % pool.len()].id);
        }
    }
    terminals.shuffle(&mut rng);

    let mut disjoint: Vec<(usize, usize)> = Vec::new();
    let mut extra: Vec<(usize, usize)> = Vec::new();
    for z in 0..dims.layers {
        let mut members: Vec<usize> = (0..n).filter(|&b| layer(b) == z).collect();
        members.shuffle(&mut rng);
        for c in members.chunks_exact(2) {
            disjoint.push((c[0], c[1]));
        }
        if members.len() % 2 == 1 && members.len() > 1 {
            let last = members[members.len() - 1];
            extra.push((members[rng.gen_range(0..members.len() - 1)], last));
        }
    }
    disjoint.shuffle(&mut rng);
    extra.shuffle(&mut rng);
    let mut groups = disjoint;
    groups.extend(extra);
    if groups.len() * 2 < counts.grouping {
        return infeasible(format!("only {} same-layer pairs available", groups.len()));
    }
    groups.truncate(counts.grouping / 2);

    let name = |b: usize| circuit.block(b).name.clone();
    let file = ConstraintFile {
        alignment_pairs: pairs
            .iter()
            .map(|&(a, b)| AlignmentEntry {
                a: name(a),
                b: name(b),
                min_area_frac: 1.0,
            })
            .collect(),
        groups: groups
            .iter()
            .map(|&(a, b)| vec![name(a), name(b)])
            .collect(),
        boundary: bound
            .iter()
            .zip(&terminals)
            .map(|(&b, &t)| BoundaryEntry {
                block: name(b),
                terminals: vec![circuit.terminal(t).name.clone()],
                mode: BindMode::All,
            })
            .collect(),
        preplaced: Vec::new(),
        layers: (0..n).map(|b| (name(b), layers[b])).collect(),
    };
    file.apply(circuit)?;
    Ok(file)
}

/// Position along the outline walked counter-clockwise from the origin;
/// interior terminals sort last.
fn outline_position(t: &Terminal, dims: GridDims) -> u64 {
    let (w, h) = (u64::from(dims.width - 1), u64::from(dims.height - 1));
    let (x, y) = (u64::from(t.x), u64::from(t.y));
    if y == 0 {
        x
    } else if x == w {
        w + y
    } else if y == h {
        w + h + (w - x)
    } else if x == 0 {
        2 * w + h + (h - y)
    } else {
        u64::MAX
    }
}
