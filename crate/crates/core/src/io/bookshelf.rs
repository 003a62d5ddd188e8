//! GSRC/MCNC bookshelf-style circuits (`.blocks`, `.nets`, `.pl`).
//!
//! Benchmark coordinates are scaled onto the grid: block areas
//! proportionally so they sum to `utilization · W · H · L` cells (floored,
//! with largest-remainder correction), hard blocks keep their aspect ratio,
//! and terminal coordinates are stretched onto `[0, W−1] × [0, H−1]`.
//! A blocks file whose first line is [`GRID_UNITS_HEADER`] is already in grid
//! units and is read without scaling; [`write_bookshelf`] emits that form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    hard_shape, Block, Circuit, CircuitSpec, GridDims, Net, Pin, Terminal, DEFAULT_UTILIZATION,
};

pub const GRID_UNITS_HEADER: &str = "# grid-units v1";

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Soft { area: f64, ar_min: f64, ar_max: f64 },
    Hard { w: f64, h: f64 },
}

#[derive(Clone, Debug)]
struct RawBlock {
    name: String,
    shape: Shape,
}

struct Lines<'a> {
    file: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(file: &'a str, text: &'a str) -> Self {
        Lines {
            file,
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file.to_string(),
            line,
            message: message.into(),
        }
    }
}

impl<'a> Iterator for Lines<'a> {
    /// 1-based line number and the line without comments, trimmed.
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with("UCSC") || line.starts_with("UCLA") {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }
}

fn is_count_line(line: &str) -> bool {
    line.starts_with("Num") && line.contains(':')
}

fn number(lines: &Lines<'_>, line: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| lines.err(line, format!("expected a number, got `{s}`")))
}

fn parse_points(lines: &Lines<'_>, line: usize, s: &str) -> Result<Vec<(f64, f64)>> {
    let mut pts = Vec::new();
    let mut rest = s;
    while let Some(open) = rest.find('(') {
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| lines.err(line, "unclosed point"))?
            + open;
        let (x, y) = rest[open + 1..close]
            .split_once(',')
            .ok_or_else(|| lines.err(line, "point needs two coordinates"))?;
        pts.push((number(lines, line, x)?, number(lines, line, y)?));
        rest = &rest[close + 1..];
    }
    Ok(pts)
}

fn parse_blocks(text: &str) -> Result<(Vec<RawBlock>, Vec<String>)> {
    let lines = Lines::new("blocks", text);
    let mut blocks = Vec::new();
    let mut terminals = Vec::new();
    for (ln, line) in Lines::new("blocks", text) {
        if is_count_line(line) {
            continue;
        }
        let mut tok = line.split_whitespace();
        let name = tok.next().unwrap_or_default().to_string();
        let kind = tok
            .next()
            .ok_or_else(|| lines.err(ln, "missing block type"))?;
        match kind {
            "terminal" => terminals.push(name),
            "softrectangular" => {
                let vals: Vec<&str> = tok.collect();
                if vals.len() != 3 {
                    return Err(lines.err(ln, "softrectangular needs area, ar_min and ar_max"));
                }
                let area = number(&lines, ln, vals[0])?;
                let (ar_min, ar_max) = (number(&lines, ln, vals[1])?, number(&lines, ln, vals[2])?);
                if !(area > 0.0 && ar_min > 0.0 && ar_min <= ar_max) {
                    return Err(lines.err(ln, format!("bad soft block `{name}`")));
                }
                blocks.push(RawBlock {
                    name,
                    shape: Shape::Soft {
                        area,
                        ar_min,
                        ar_max,
                    },
                });
            }
            "hardrectilinear" => {
                let rest: Vec<&str> = tok.collect();
                let count = rest
                    .first()
                    .ok_or_else(|| lines.err(ln, "missing point count"))?;
                let pts = parse_points(&lines, ln, &rest[1..].join(" "))?;
                if count.parse::<usize>().ok() != Some(4) || pts.len() != 4 {
                    return Err(lines.err(ln, "hardrectilinear blocks need exactly 4 points"));
                }
                let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                let w = xs.iter().cloned().fold(f64::MIN, f64::max)
                    - xs.iter().cloned().fold(f64::MAX, f64::min);
                let h = ys.iter().cloned().fold(f64::MIN, f64::max)
                    - ys.iter().cloned().fold(f64::MAX, f64::min);
                if !(w > 0.0 && h > 0.0) {
                    return Err(lines.err(ln, format!("degenerate hard block `{name}`")));
                }
                blocks.push(RawBlock {
                    name,
                    shape: Shape::Hard { w, h },
                });
            }
            other => return Err(lines.err(ln, format!("unknown block type `{other}`"))),
        }
    }
    Ok((blocks, terminals))
}

fn parse_nets(text: &str, resolve: &dyn Fn(&str) -> Option<Pin>) -> Result<Vec<Net>> {
    let lines = Lines::new("nets", text);
    let mut nets = Vec::new();
    let mut pending: Option<(usize, usize, Vec<Pin>)> = None;
    let close = |p: Option<(usize, usize, Vec<Pin>)>, nets: &mut Vec<Net>| -> Result<()> {
        if let Some((ln, degree, members)) = p {
            if members.len() != degree {
                return Err(lines.err(
                    ln,
                    format!("net declares {degree} pins but lists {}", members.len()),
                ));
            }
            let mut members = members;
            let mut seen = std::collections::HashSet::new();
            members.retain(|m| seen.insert(*m));
            nets.push(Net { members });
        }
        Ok(())
    };
    for (ln, line) in Lines::new("nets", text) {
        if let Some(rest) = line.strip_prefix("NetDegree") {
            close(pending.take(), &mut nets)?;
            let d = rest
                .trim_start_matches([' ', '\t', ':'])
                .split_whitespace()
                .next()
                .unwrap_or("");
            let degree = d
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| lines.err(ln, format!("bad net degree `{d}`")))?;
            pending = Some((ln, degree, Vec::with_capacity(degree)));
        } else if is_count_line(line) {
            continue;
        } else {
            let name = line.split_whitespace().next().unwrap_or_default();
            let Some((_, _, members)) = pending.as_mut() else {
                return Err(lines.err(ln, "pin outside a net"));
            };
            members.push(resolve(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?);
        }
    }
    close(pending, &mut nets)?;
    Ok(nets)
}

fn parse_pl(text: &str) -> Result<HashMap<String, (f64, f64)>> {
    let lines = Lines::new("pl", text);
    let mut out = HashMap::new();
    for (ln, line) in Lines::new("pl", text) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 3 {
            return Err(lines.err(ln, "expected `name x y`"));
        }
        out.insert(
            tok[0].to_string(),
            (number(&lines, ln, tok[1])?, number(&lines, ln, tok[2])?),
        );
    }
    Ok(out)
}

/// Proportional integer apportionment of `total` cells: floors plus one
/// extra cell to the largest remainders (ties by index). Each share is at
/// least one cell.
pub(crate) fn apportion(weights: &[f64], total: u64) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || !(sum > 0.0) {
        return vec![1; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| w * total as f64 / sum).collect();
    let mut out: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = out.iter().sum();
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in idx.iter().take(total.saturating_sub(assigned) as usize) {
        out[i] += 1;
    }
    for v in &mut out {
        *v = (*v).max(1);
    }
    out
}

/// Layer per block, filling the least-loaded layer with the largest blocks
/// first.
pub fn balance_layers(areas: &[u64], layers: u32) -> Vec<u32> {
    let mut order: Vec<usize> = (0..areas.len()).collect();
    order.sort_by(|&a, &b| areas[b].cmp(&areas[a]).then(a.cmp(&b)));
    let mut load = vec![0u64; layers as usize];
    let mut out = vec![0; areas.len()];
    for i in order {
        let z = (0..load.len()).min_by_key(|&z| (load[z], z)).unwrap_or(0);
        load[z] += areas[i];
        out[i] = z as u32;
    }
    out
}

/// Builds a circuit from the three bookshelf texts.
pub fn parse_circuit(
    name: &str,
    blocks_text: &str,
    nets_text: &str,
    pl_text: &str,
    dims: GridDims,
    utilization: f64,
) -> Result<Circuit> {
    let grid_units = blocks_text.lines().next().map(str::trim) == Some(GRID_UNITS_HEADER);
    let (raw, terminal_names) = parse_blocks(blocks_text)?;
    let pl = parse_pl(pl_text)?;

    let raw_areas: Vec<f64> = raw
        .iter()
        .map(|b| match b.shape {
            Shape::Soft { area, .. } => area,
            Shape::Hard { w, h } => w * h,
        })
        .collect();
    let areas: Vec<u64> = if grid_units {
        raw_areas
            .iter()
            .map(|a| a.round().max(1.0) as u64)
            .collect()
    } else {
        let target =
            (utilization * dims.cells_per_layer() as f64 * f64::from(dims.layers)).floor() as u64;
        apportion(&raw_areas, target)
    };
    let layers = balance_layers(&areas, dims.layers);

    let mut blocks = Vec::with_capacity(raw.len());
    for (i, b) in raw.iter().enumerate() {
        let block = match b.shape {
            Shape::Soft { ar_min, ar_max, .. } => {
                Block::soft(i, &b.name, areas[i], ar_min, ar_max, layers[i])
            }
            Shape::Hard { w, h } => {
                let (w, h) = if grid_units {
                    (w.round() as u32, h.round() as u32)
                } else {
                    hard_shape(areas[i], w / h)
                };
                if w > dims.width || h > dims.height {
                    return Err(Error::Invalid(format!(
                        "hard block `{}` ({w}x{h}) does not fit the die",
                        b.name
                    )));
                }
                Block::hard(i, &b.name, w, h, layers[i])
            }
        };
        blocks.push(block);
    }

    let mut coords = Vec::with_capacity(terminal_names.len());
    for t in &terminal_names {
        coords.push(
            *pl.get(t)
                .ok_or_else(|| Error::Invalid(format!("terminal `{t}` has no position")))?,
        );
    }
    let scale = |v: f64, max: f64, cells: u32| -> u32 {
        let top = f64::from(cells - 1);
        if grid_units {
            v.round().clamp(0.0, top) as u32
        } else if max > 0.0 {
            (v / max * top).round().clamp(0.0, top) as u32
        } else {
            0
        }
    };
    let max_x = coords.iter().map(|c| c.0).fold(0.0, f64::max);
    let max_y = coords.iter().map(|c| c.1).fold(0.0, f64::max);
    let terminals: Vec<Terminal> = terminal_names
        .iter()
        .zip(&coords)
        .enumerate()
        .map(|(i, (name, &(x, y)))| Terminal {
            id: i,
            name: name.clone(),
            x: scale(x, max_x, dims.width),
            y: scale(y, max_y, dims.height),
            z: 0,
        })
        .collect();

    let block_ids: HashMap<&str, usize> = raw
        .iter()
        .enumerate()
        .map(|(i, b)| (b.name.as_str(), i))
        .collect();
    let term_ids: HashMap<&str, usize> = terminal_names
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let resolve = |name: &str| {
        block_ids
            .get(name)
            .map(|&b| Pin::Block(b))
            .or_else(|| term_ids.get(name).map(|&t| Pin::Terminal(t)))
    };
    let nets = parse_nets(nets_text, &resolve)?;

    let total: u64 = areas.iter().sum();
    let capacity = dims.cells_per_layer() as f64 * f64::from(dims.layers);
    let utilization = if grid_units {
        (total as f64 / capacity).max(utilization.min(1.0)).min(1.0)
    } else {
        utilization
    };
    Circuit::new(CircuitSpec {
        name: name.to_string(),
        dims,
        utilization,
        blocks,
        terminals,
        nets,
        constraints: Default::default(),
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn find_ext(dir: &Path, ext: &str) -> Result<std::path::PathBuf> {
    let mut hits: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    hits.sort();
    match hits.len() {
        1 => Ok(hits.remove(0)),
        0 => Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, format!("no .{ext} file")),
        )),
        _ => Err(Error::Invalid(format!(
            "{} holds several .{ext} files",
            dir.display()
        ))),
    }
}

/// Loads a circuit from a directory holding one `.blocks`, `.nets` and `.pl`
/// file each. The circuit is named after the `.blocks` file stem.
pub fn load_dir(dir: &Path, dims: GridDims, utilization: Option<f64>) -> Result<Circuit> {
    let blocks = find_ext(dir, "blocks")?;
    let name = blocks
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("circuit")
        .to_string();
    parse_circuit(
        &name,
        &read(&blocks)?,
        &read(&find_ext(dir, "nets")?)?,
        &read(&find_ext(dir, "pl")?)?,
        dims,
        utilization.unwrap_or(DEFAULT_UTILIZATION),
    )
}

/// Bookshelf texts `(blocks, nets, pl)` in grid units. Reading them back with
/// the same dims reproduces the circuit's blocks, terminals and nets; layers
/// are reassigned by area unless the circuit's layers already balance that
/// way.
pub fn write_bookshelf(circuit: &Circuit) -> (String, String, String) {
    let mut blocks = format!("{GRID_UNITS_HEADER}\nUCSC blocks 1.0\n\n");
    let soft = circuit.blocks().iter().filter(|b| b.soft).count();
    let _ = writeln!(blocks, "NumSoftRectangularBlocks : {soft}");
    let _ = writeln!(
        blocks,
        "NumHardRectilinearBlocks : {}",
        circuit.blocks().len() - soft
    );
    let _ = writeln!(blocks, "NumTerminals : {}\n", circuit.terminals().len());
    for b in circuit.blocks() {
        if b.soft {
            let _ = writeln!(
                blocks,
                "{} softrectangular {} {} {}",
                b.name, b.area, b.ar_min, b.ar_max
            );
        } else {
            let _ = writeln!(
                blocks,
                "{} hardrectilinear 4 (0, 0) (0, {h}) ({w}, {h}) ({w}, 0)",
                b.name,
                w = b.width,
                h = b.height
            );
        }
    }
    for t in circuit.terminals() {
        let _ = writeln!(blocks, "{} terminal", t.name);
    }

    let mut nets = String::from("UCLA nets 1.0\n\n");
    let pins: usize = circuit.nets().iter().map(|n| n.members.len()).sum();
    let _ = writeln!(nets, "NumNets : {}", circuit.nets().len());
    let _ = writeln!(nets, "NumPins : {pins}\n");
    for n in circuit.nets() {
        let _ = writeln!(nets, "NetDegree : {}", n.members.len());
        for m in &n.members {
            let name = match *m {
                Pin::Block(b) => &circuit.block(b).name,
                Pin::Terminal(t) => &circuit.terminal(t).name,
            };
            let _ = writeln!(nets, "{name} B");
        }
    }

    let mut pl = String::from("UCSC pl 1.0\n\n");
    for t in circuit.terminals() {
        let _ = writeln!(pl, "{} {} {}", t.name, t.x, t.y);
    }
    (blocks, nets, pl)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BLOCKS: &str = "UCSC blocks 1.0
# two blocks
NumSoftRectangularBlocks : 1
NumHardRectilinearBlocks : 1
NumTerminals : 1

a softrectangular 300 0.5 2.0
b hardrectilinear 4 (0, 0) (0, 10) (10, 10) (10, 0)
p1 terminal
";
    const NETS: &str = "UCLA nets 1.0
NumNets : 1
NumPins : 3
NetDegree : 3
a B
b B
p1 B
";
    const PL: &str = "UCSC pl 1.0\np1 50 0\n";

    #[test]
    fn two_block_fixture() {
        let c = parse_circuit("t", BLOCKS, NETS, PL, GridDims::new(20, 20, 2), 0.5).unwrap();
        assert_eq!(c.blocks().len(), 2);
        assert_eq!(c.nets().len(), 1);
        assert_eq!(c.total_block_area(), 400);
        // 300 : 100 split of 400 cells
        assert_eq!(c.block(0).area, 300);
        assert_eq!((c.block(1).width, c.block(1).height), (10, 10));
        assert_eq!((c.terminal(0).x, c.terminal(0).y), (19, 0));
        assert_ne!(c.block(0).layer, c.block(1).layer);
    }

    #[test]
    fn empty_nets() {
        let c = parse_circuit(
            "t",
            BLOCKS,
            "UCLA nets 1.0\n",
            PL,
            GridDims::new(20, 20, 2),
            0.5,
        )
        .unwrap();
        assert!(c.nets().is_empty());
    }

    #[test]
    fn unknown_member_is_named() {
        let nets = "NetDegree : 2\na B\nzz B\n";
        let err = parse_circuit("t", BLOCKS, nets, PL, GridDims::new(20, 20, 2), 0.5).unwrap_err();
        assert!(
            matches!(err, Error::UnknownSymbol(ref s) if s == "zz"),
            "{err}"
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let blocks = "a softrectangular 10 0.5\n";
        match parse_circuit("t", blocks, "", "", GridDims::new(8, 8, 1), 0.8).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            e => panic!("{e}"),
        }
        let nets = "NetDegree : 3\na B\n";
        assert!(matches!(
            parse_circuit("t", BLOCKS, nets, PL, GridDims::new(20, 20, 2), 0.5),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn apportion_hits_total() {
        let a = apportion(&[1.0, 1.0, 1.0], 10);
        assert_eq!(a.iter().sum::<u64>(), 10);
        assert_eq!(a, vec![4, 3, 3]);
        assert_eq!(apportion(&[3.0, 1.0], 400), vec![300, 100]);
    }

    #[test]
    fn grid_units_round_trip() {
        let c = parse_circuit("t", BLOCKS, NETS, PL, GridDims::new(20, 20, 2), 0.5).unwrap();
        let (b, n, p) = write_bookshelf(&c);
        let again = parse_circuit("t", &b, &n, &p, c.dims(), c.utilization()).unwrap();
        assert_eq!(again, c);
    }
}
