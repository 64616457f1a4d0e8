// SPDX-License-Identifier: Apache-2.0

//! Bump lattice, potential-short graph, codeword coloring and block partition.
//!
//! A [`BumpMap`] is built in three steps: [`build_bump_map`] realizes the
//! geometry, [`assign_codewords`] colors it against an [`AdjacencyGraph`]
//! produced by [`potential_short_graph`], and [`partition_blocks`] splits it
//! into column bands that are tested one at a time.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default short radius in units of the pitch.
///
/// On a close-packed lattice the neighbor rings sit at `pitch`, `√3·pitch`
/// and `2·pitch`. Any radius in `[√3, 2)·pitch` yields the 12-bump
/// neighborhood; `2·pitch` and beyond adds a third ring of six.
pub const DEFAULT_SHORT_RADIUS_FACTOR: f64 = 1.9;

/// Relative slack on distance comparisons so a radius placed exactly on a
/// ring is not defeated by rounding in the position arithmetic.
const DISTANCE_REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Hexagonal,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub rows: usize,
    pub cols: usize,
    pub pitch_um: f64,
}

impl Lattice {
    pub fn new(kind: LatticeKind, rows: usize, cols: usize, pitch_um: f64) -> Result<Self> {
        let lattice = Lattice {
            kind,
            rows,
            cols,
            pitch_um,
        };
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::param(format!(
                "lattice dimensions must be positive, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !(self.pitch_um.is_finite() && self.pitch_um > 0.0) {
            return Err(Error::param(format!(
                "pitch must be a positive length, got {}",
                self.pitch_um
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Vertical distance between adjacent rows.
    fn row_step(&self) -> f64 {
        match self.kind {
            LatticeKind::Hexagonal => self.pitch_um * 3f64.sqrt() / 2.0,
            LatticeKind::Rectangular => self.pitch_um,
        }
    }

    fn position(&self, row: usize, col: usize) -> (f64, f64) {
        let offset = match self.kind {
            LatticeKind::Hexagonal if row % 2 == 1 => self.pitch_um / 2.0,
            _ => 0.0,
        };
        (col as f64 * self.pitch_um + offset, row as f64 * self.row_step())
    }
}

/// Row-major index of a bump, dense over `0..rows*cols`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct BumpId(pub usize);

impl fmt::Display for BumpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Codeword class of a bump. Green/Black and Blue/Red carry complementary
/// drive patterns.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Blue,
    Red,
    Black,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Green, Color::Blue, Color::Red, Color::Black];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Color> {
        Color::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Red => "red",
            Color::Black => "black",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Undirected potential-short graph. Edges are stored once as `(low, high)`
/// in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyGraph {
    short_radius_um: f64,
    edges: Vec<(BumpId, BumpId)>,
    neighbors: Vec<Vec<BumpId>>,
}

impl AdjacencyGraph {
    /// Builds a graph over `n` bumps from an explicit edge list. Self-loops are
    /// rejected and duplicate edges collapse.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (BumpId, BumpId)>,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::param(format!("self-loop on bump {a}")));
            }
            if a.0 >= n || b.0 >= n {
                return Err(Error::param(format!("edge ({a}, {b}) outside {n} bumps")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &list {
            neighbors[a.0].push(b);
            neighbors[b.0].push(a);
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
        }
        Ok(AdjacencyGraph {
            short_radius_um: f64::NAN,
            edges: list,
            neighbors,
        })
    }

    pub fn short_radius_um(&self) -> f64 {
        self.short_radius_um
    }

    pub fn edges(&self) -> &[(BumpId, BumpId)] {
        &self.edges
    }

    pub fn neighbors(&self, id: BumpId) -> &[BumpId] {
        &self.neighbors[id.0]
    }

    pub fn degree(&self, id: BumpId) -> usize {
        self.neighbors[id.0].len()
    }

    pub fn contains(&self, a: BumpId, b: BumpId) -> bool {
        self.neighbors
            .get(a.0)
            .is_some_and(|adj| adj.binary_search(&b).is_ok())
    }

    pub fn bump_count(&self) -> usize {
        self.neighbors.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BumpMap {
    lattice: Lattice,
    positions: Vec<(f64, f64)>,
    coloring: Option<Vec<Color>>,
    blocks: Option<Vec<usize>>,
    block_count: usize,
}

impl BumpMap {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = BumpId> {
        (0..self.len()).map(BumpId)
    }

    pub fn contains(&self, id: BumpId) -> bool {
        id.0 < self.len()
    }

    pub fn position(&self, id: BumpId) -> (f64, f64) {
        self.positions[id.0]
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn row_col(&self, id: BumpId) -> (usize, usize) {
        (id.0 / self.lattice.cols, id.0 % self.lattice.cols)
    }

    pub fn is_colored(&self) -> bool {
        self.coloring.is_some()
    }

    pub fn is_blocked(&self) -> bool {
        self.blocks.is_some()
    }

    pub fn color(&self, id: BumpId) -> Option<Color> {
        self.coloring.as_ref().map(|c| c[id.0])
    }

    pub fn block(&self, id: BumpId) -> Option<usize> {
        self.blocks.as_ref().map(|b| b[id.0])
    }

    /// Number of blocks; 1 until [`partition_blocks`] has run.
    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// Bumps in `block`, ascending. Empty for an unblocked map.
    pub fn block_members(&self, block: usize) -> Vec<BumpId> {
        match &self.blocks {
            Some(blocks) => blocks
                .iter()
                .enumerate()
                .filter(|&(_, &b)| b == block)
                .map(|(i, _)| BumpId(i))
                .collect(),
            None => Vec::new(),
        }
    }

    pub(crate) fn colors(&self) -> Result<&[Color]> {
        self.coloring
            .as_deref()
            .ok_or_else(|| Error::param("bump map has not been colored"))
    }

    pub(crate) fn blocks(&self) -> Result<&[usize]> {
        self.blocks
            .as_deref()
            .ok_or_else(|| Error::param("bump map has not been partitioned into blocks"))
    }

    /// Assembles a fully colored and blocked map from explicit assignments.
    ///
    /// Used when reloading a map; the coloring is not checked against any
    /// graph here.
    pub fn from_parts(
        lattice: Lattice,
        coloring: Vec<Color>,
        blocks: Vec<usize>,
    ) -> Result<BumpMap> {
        let map = build_bump_map(lattice)?;
        if coloring.len() != map.len() || blocks.len() != map.len() {
            return Err(Error::param("coloring and block vectors must cover every bump"));
        }
        let block_count = blocks.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; block_count];
        for &b in &blocks {
            seen[b] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::param("every block must be non-empty"));
        }
        Ok(BumpMap {
            coloring: Some(coloring),
            blocks: Some(blocks),
            block_count,
            ..map
        })
    }
}

/// Realizes the bump positions of a lattice. The result is uncolored and
/// unblocked.
pub fn build_bump_map(lattice: Lattice) -> Result<BumpMap> {
    lattice.validate()?;
    let positions = (0..lattice.rows)
        .flat_map(|r| (0..lattice.cols).map(move |c| (r, c)))
        .map(|(r, c)| lattice.position(r, c))
        .collect();
    Ok(BumpMap {
        lattice,
        positions,
        coloring: None,
        blocks: None,
        block_count: 1,
    })
}

fn within(a: (f64, f64), b: (f64, f64), radius: f64) -> bool {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt() <= radius * (1.0 + DISTANCE_REL_EPS)
}

/// Connects every pair of bumps whose centers are at most `short_radius_um`
/// apart.
pub fn potential_short_graph(map: &BumpMap, short_radius_um: f64) -> Result<AdjacencyGraph> {
    if !(short_radius_um.is_finite() && short_radius_um > 0.0) {
        return Err(Error::param(format!(
            "short radius must be positive, got {short_radius_um}"
        )));
    }
    let lat = map.lattice;
    // Window wide enough that no in-radius partner is skipped.
    let dr = (short_radius_um / lat.row_step()).ceil() as usize + 1;
    let dc = (short_radius_um / lat.pitch_um).ceil() as usize + 1;

    let mut edges = Vec::new();
    for r in 0..lat.rows {
        for c in 0..lat.cols {
            let a = BumpId(r * lat.cols + c);
            for r2 in r..(r + dr + 1).min(lat.rows) {
                let c_lo = c.saturating_sub(dc);
                let c_hi = (c + dc + 1).min(lat.cols);
                for c2 in c_lo..c_hi {
                    let b = BumpId(r2 * lat.cols + c2);
                    if b <= a {
                        continue;
                    }
                    if within(map.position(a), map.position(b), short_radius_um) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    let mut graph = AdjacencyGraph::from_edges(map.len(), edges)?;
    graph.short_radius_um = short_radius_um;
    Ok(graph)
}

/// Periodic four-color tiling by lattice-coordinate parity.
///
/// For the close-packed lattice the column is sheared back by `floor(row/2)`
/// so that the tiling repeats along both lattice axes; two bumps share a
/// color only when they differ by an even multiple of both basis vectors,
/// which puts them at least `2·pitch` apart.
fn periodic_color(lattice: &Lattice, row: usize, col: usize) -> Color {
    let col_parity = match lattice.kind {
        LatticeKind::Hexagonal => (col as i64 - (row / 2) as i64).rem_euclid(2) as usize,
        LatticeKind::Rectangular => col % 2,
    };
    Color::ALL[2 * (row % 2) + col_parity]
}

fn is_proper(graph: &AdjacencyGraph, colors: &[Color]) -> bool {
    graph.edges().iter().all(|&(a, b)| colors[a.0] != colors[b.0])
}

fn greedy_coloring(graph: &AdjacencyGraph) -> Result<Vec<Color>> {
    let n = graph.bump_count();
    let mut colors: Vec<Option<Color>> = vec![None; n];
    for i in 0..n {
        let mut used = [false; 4];
        for nb in graph.neighbors(BumpId(i)) {
            if let Some(c) = colors[nb.0] {
                used[c.index()] = true;
            }
        }
        let pick = used
            .iter()
            .position(|u| !u)
            .ok_or(Error::ColoringFailed { bump: BumpId(i) })?;
        colors[i] = Color::from_index(pick);
    }
    Ok(colors.into_iter().map(|c| c.expect("all assigned")).collect())
}

/// Colors the map with at most four codewords so that no potential short
/// joins two bumps of the same color.
///
/// Hexagonal maps with a non-empty graph try the periodic tiling first;
/// everything else (and a tiling that turns out improper for the given
/// radius) falls back to greedy smallest-available coloring in ascending
/// bump order.
pub fn assign_codewords(map: &BumpMap, graph: &AdjacencyGraph) -> Result<BumpMap> {
    if graph.bump_count() != map.len() {
        return Err(Error::param(format!(
            "graph has {} bumps but the map has {}",
            graph.bump_count(),
            map.len()
        )));
    }
    let mut coloring = None;
    if map.lattice.kind == LatticeKind::Hexagonal && !graph.edges().is_empty() {
        let tiled: Vec<Color> = map
            .ids()
            .map(|id| {
                let (r, c) = map.row_col(id);
                periodic_color(&map.lattice, r, c)
            })
            .collect();
        if is_proper(graph, &tiled) {
            coloring = Some(tiled);
        }
    }
    let coloring = match coloring {
        Some(c) => c,
        None => greedy_coloring(graph)?,
    };
    debug_assert!(is_proper(graph, &coloring));
    Ok(BumpMap {
        coloring: Some(coloring),
        ..map.clone()
    })
}

/// Splits the map into `block_count` contiguous column bands. Band widths
/// differ by at most one column; wider bands come first.
pub fn partition_blocks(map: &BumpMap, block_count: usize) -> Result<BumpMap> {
    let cols = map.lattice.cols;
    if block_count == 0 || block_count > map.len() {
        return Err(Error::param(format!(
            "block count must be in 1..={}, got {block_count}",
            map.len()
        )));
    }
    if block_count > cols {
        return Err(Error::param(format!(
            "column bands need block count <= {cols} columns, got {block_count}"
        )));
    }
    let base = cols / block_count;
    let extra = cols % block_count;
    let mut col_block = Vec::with_capacity(cols);
    for b in 0..block_count {
        let width = base + usize::from(b < extra);
        col_block.extend(std::iter::repeat_n(b, width));
    }
    let blocks = map.ids().map(|id| col_block[map.row_col(id).1]).collect();
    Ok(BumpMap {
        blocks: Some(blocks),
        block_count,
        ..map.clone()
    })
}

/// Convenience pipeline: geometry, graph, coloring and blocks in one call.
pub fn build_test_map(
    lattice: Lattice,
    short_radius_um: f64,
    block_count: usize,
) -> Result<(BumpMap, AdjacencyGraph)> {
    let map = build_bump_map(lattice)?;
    let graph = potential_short_graph(&map, short_radius_um)?;
    let map = assign_codewords(&map, &graph)?;
    let map = partition_blocks(&map, block_count)?;
    Ok((map, graph))
}
