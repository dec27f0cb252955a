//! Problem registry, domain geometry and the move plans derived from it.
//!
//! Hexagonal domains are brick walls: a brick at `(x0, y0)` holds the
//! vertices `x0..=x0+2` of rows `y0` and `y0 + 1`, with rungs at `x0` and
//! `x0 + 2`; bricks of neighbouring rows are offset by one. Boundary edge `y` of a hexagonal sweep is the
//! horizontal edge of row `y`. The square lattice uses one extra boundary
//! edge for the vertical edge at the kink.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::signature::{LOWER, MAX_WIDTH, UPPER};

pub type Point = (i32, i32);

pub const LAMBDA_SQUARE: f64 = 1.7445498;
pub const LAMBDA_HEX: f64 = 1.38724951;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    Square,
    Hexagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainShape {
    Square,
    Rhombus,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    SawCrossing,
    SawSpanning,
    Sap,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("unknown problem id {0:?}")]
    Unknown(String),
    #[error("size {0} out of range 1..={1}")]
    SizeOutOfRange(usize, usize),
}

/// One of the registered enumeration problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub lattice: Lattice,
    pub domain: DomainShape,
    pub path: PathKind,
    /// Triangle variants whose paths must visit the top vertex.
    pub through_top: bool,
}

const REGISTRY: [(&str, ProblemSpec); 11] = [
    ("sq-saw-crossing", ProblemSpec::new(Lattice::Square, DomainShape::Square, PathKind::SawCrossing, false)),
    ("sq-saw-spanning", ProblemSpec::new(Lattice::Square, DomainShape::Square, PathKind::SawSpanning, false)),
    ("sq-sap-crossing", ProblemSpec::new(Lattice::Square, DomainShape::Square, PathKind::Sap, false)),
    ("hex-rhombus-saw", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Rhombus, PathKind::SawCrossing, false)),
    ("hex-rhombus-span", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Rhombus, PathKind::SawSpanning, false)),
    ("hex-rhombus-sap", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Rhombus, PathKind::Sap, false)),
    ("hex-triangle-saw", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Triangle, PathKind::SawCrossing, false)),
    ("hex-triangle-saw-top", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Triangle, PathKind::SawCrossing, true)),
    ("hex-triangle-sap", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Triangle, PathKind::Sap, false)),
    ("hex-triangle-sap-top", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Triangle, PathKind::Sap, true)),
    ("hex-square-saw", ProblemSpec::new(Lattice::Hexagonal, DomainShape::Square, PathKind::SawCrossing, false)),
];

impl ProblemSpec {
    pub const fn new(lattice: Lattice, domain: DomainShape, path: PathKind, through_top: bool) -> Self {
        ProblemSpec { lattice, domain, path, through_top }
    }

    pub fn all() -> impl Iterator<Item = ProblemSpec> {
        REGISTRY.iter().map(|(_, p)| *p)
    }

    pub fn ids() -> impl Iterator<Item = &'static str> {
        REGISTRY.iter().map(|(id, _)| *id)
    }

    pub fn id(&self) -> &'static str {
        REGISTRY.iter().find(|(_, p)| p == self).map(|(id, _)| *id).expect("registered")
    }

    pub fn is_polygon(&self) -> bool {
        self.path == PathKind::Sap
    }

    /// 1 for walks (free end as excess upper arc end), 0 for polygons.
    pub fn start_height(&self) -> usize {
        if self.is_polygon() {
            0
        } else {
            1
        }
    }

    /// Boundary width of the sweep for size `l`.
    pub fn width(&self, l: usize) -> usize {
        match self.lattice {
            Lattice::Hexagonal => l + 1,
            Lattice::Square => l + 2,
        }
    }

    pub fn max_size(&self) -> usize {
        MAX_WIDTH - (self.width(0) - 1)
    }

    pub fn check_size(&self, l: usize) -> Result<(), ProblemError> {
        if l == 0 || l > self.max_size() {
            return Err(ProblemError::SizeOutOfRange(l, self.max_size()));
        }
        Ok(())
    }

    /// Power of the lattice growth constant per `L²` in the count: the
    /// dominant growth is `λ^{vertex_factor · L²}`.
    pub fn vertex_factor(&self) -> u32 {
        match (self.lattice, self.domain) {
            (Lattice::Hexagonal, DomainShape::Rhombus | DomainShape::Square) => 2,
            _ => 1,
        }
    }

    /// Best known value of the lattice growth constant `λ`.
    pub fn lambda_reference(&self) -> f64 {
        match self.lattice {
            Lattice::Square => LAMBDA_SQUARE,
            Lattice::Hexagonal => LAMBDA_HEX,
        }
    }

    /// `κ = λ^{vertex_factor}`, the limit of `C_L^{1/L²}`.
    pub fn growth_reference(&self) -> f64 {
        self.lambda_reference().powi(self.vertex_factor() as i32)
    }

    /// Number of vertices of the size-`l` domain as built here.
    pub fn vertex_count(&self, l: usize) -> usize {
        let l = l as i64;
        let n = match (self.lattice, self.domain) {
            (Lattice::Square, _) => (l + 1) * (l + 1),
            (Lattice::Hexagonal, DomainShape::Triangle) => l * l + 4 * l + 1,
            (Lattice::Hexagonal, _) => 2 * l * l + 4 * l,
        };
        n as usize
    }

    /// Explicit graph and endpoint designations for size `l`.
    pub fn layout(&self, l: usize) -> Layout {
        let li = l as i32;
        match self.lattice {
            Lattice::Square => square_layout(self, li),
            Lattice::Hexagonal => hex_layout(self, li),
        }
    }

    /// Move plan driving the transfer-matrix sweep for size `l`.
    pub fn plan(&self, l: usize) -> Result<Plan, ProblemError> {
        self.check_size(l)?;
        let layout = self.layout(l);
        Ok(match self.lattice {
            Lattice::Square => square_plan(self, l, &layout),
            Lattice::Hexagonal => hex_plan(self, l, &layout),
        })
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ProblemSpec {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        REGISTRY
            .iter()
            .find(|(id, _)| *id == s)
            .map(|(_, p)| *p)
            .ok_or_else(|| ProblemError::Unknown(s.to_string()))
    }
}

/// A finite domain with its designated vertices.
#[derive(Debug, Clone)]
pub struct Layout {
    pub vertices: Vec<Point>,
    pub edges: Vec<(Point, Point)>,
    /// Walk start vertices (empty for polygons).
    pub sources: Vec<Point>,
    /// Walk end vertices (empty for polygons).
    pub targets: Vec<Point>,
    /// Vertices every path must visit.
    pub mandatory: Vec<Point>,
    pub polygon: bool,
}

fn brick_layout(bricks: &[Point]) -> (Vec<Point>, Vec<(Point, Point)>) {
    let mut vertices = HashSet::new();
    let mut edges = HashSet::new();
    for &(x0, y0) in bricks {
        for y in [y0, y0 + 1] {
            for x in x0..=x0 + 2 {
                vertices.insert((x, y));
            }
            edges.insert(((x0, y), (x0 + 1, y)));
            edges.insert(((x0 + 1, y), (x0 + 2, y)));
        }
        edges.insert(((x0, y0), (x0, y0 + 1)));
        edges.insert(((x0 + 2, y0), (x0 + 2, y0 + 1)));
    }
    let mut vertices: Vec<Point> = vertices.into_iter().collect();
    vertices.sort_by_key(|&(x, y)| (y, x));
    let mut edges: Vec<(Point, Point)> = edges.into_iter().collect();
    edges.sort();
    (vertices, edges)
}

fn row_extent(vertices: &[Point], y: i32) -> (i32, i32) {
    let xs = vertices.iter().filter(|v| v.1 == y).map(|v| v.0);
    let lo = xs.clone().min().expect("nonempty row");
    let hi = xs.max().unwrap();
    (lo, hi)
}

fn hex_layout(spec: &ProblemSpec, l: i32) -> Layout {
    let mut bricks = Vec::new();
    for r in 0..l {
        for c in 0..l {
            match spec.domain {
                DomainShape::Rhombus => bricks.push((2 * c + r, r)),
                DomainShape::Triangle => {
                    if c < l - r {
                        bricks.push((2 * c + r, r))
                    }
                }
                DomainShape::Square => {
                    let phase = 0;
                    bricks.push((2 * c + (r + phase) % 2, r));
                }
            }
        }
    }
    let (vertices, edges) = brick_layout(&bricks);
    let first = |y: i32| (row_extent(&vertices, y).0, y);
    let last = |y: i32| (row_extent(&vertices, y).1, y);
    let mut layout = Layout { vertices: Vec::new(), edges, sources: vec![], targets: vec![], mandatory: vec![], polygon: spec.is_polygon() };
    match (spec.domain, spec.path) {
        (DomainShape::Rhombus, PathKind::SawCrossing) | (DomainShape::Square, PathKind::SawCrossing) => {
            layout.sources = vec![first(0)];
            layout.targets = vec![last(l)];
        }
        (DomainShape::Rhombus, PathKind::SawSpanning) => {
            layout.sources = (1..=l).map(first).collect();
            layout.targets = (0..l).map(last).collect();
        }
        (DomainShape::Rhombus, PathKind::Sap) => {
            layout.mandatory = vec![first(0), last(l)];
        }
        (DomainShape::Triangle, PathKind::SawCrossing) => {
            layout.sources = vec![first(0)];
            layout.targets = vec![last(0)];
            if spec.through_top {
                layout.mandatory = vec![(l, l)];
            }
        }
        (DomainShape::Triangle, PathKind::Sap) => {
            layout.mandatory = vec![first(0), last(0)];
            if spec.through_top {
                layout.mandatory.push((l, l));
            }
        }
        other => unreachable!("unregistered combination {other:?}"),
    }
    layout.vertices = vertices;
    layout
}

fn square_layout(spec: &ProblemSpec, l: i32) -> Layout {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for y in 0..=l {
        for x in 0..=l {
            vertices.push((x, y));
            if x < l {
                edges.push(((x, y), (x + 1, y)));
            }
            if y < l {
                edges.push(((x, y), (x, y + 1)));
            }
        }
    }
    let mut layout = Layout { vertices, edges, sources: vec![], targets: vec![], mandatory: vec![], polygon: spec.is_polygon() };
    match spec.path {
        PathKind::SawCrossing => {
            layout.sources = vec![(0, 0)];
            layout.targets = vec![(l, l)];
        }
        PathKind::SawSpanning => {
            layout.sources = (0..=l).map(|y| (0, y)).collect();
            layout.targets = (0..=l).map(|y| (l, y)).collect();
        }
        PathKind::Sap => layout.mandatory = vec![(0, 0), (l, l)],
    }
    layout
}

/// How the two vertices behind a kink are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    /// Two new degree-3 vertices joined by a rung.
    Hex,
    /// One new degree-4 vertex.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Replace boundary edges `low` and `low + 1`.
    Cell { low: usize, kind: CellKind },
    /// Keep only signatures whose edge `edge` has the given occupancy.
    Require { edge: usize, occupied: bool },
}

/// Everything the engine needs for one sweep.
#[derive(Debug, Clone)]
pub struct Plan {
    pub width: usize,
    pub start_height: usize,
    pub initial: Vec<u64>,
    pub accepting: Vec<u64>,
    pub moves: Vec<Move>,
}

impl Plan {
    pub fn cells(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m, Move::Cell { .. })).count()
    }
}

fn free_end(edge: usize) -> u64 {
    UPPER << (2 * edge)
}

fn arc(low: usize) -> u64 {
    (LOWER << (2 * low)) | (UPPER << (2 * (low + 1)))
}

fn hex_plan(spec: &ProblemSpec, l: usize, layout: &Layout) -> Plan {
    let width = l + 1;
    let mut rows: Vec<Vec<i32>> = vec![Vec::new(); width];
    for &(x, y) in &layout.vertices {
        rows[y as usize].push(x);
    }
    for row in rows.iter_mut() {
        row.sort_unstable();
        debug_assert!(row.windows(2).all(|w| w[1] == w[0] + 1), "rows are contiguous");
    }
    let mut rung: HashMap<Point, Point> = HashMap::new();
    for &(a, b) in &layout.edges {
        if a.0 == b.0 {
            rung.insert(a, b);
            rung.insert(b, a);
        }
    }
    let is_first = |p: Point| rows[p.1 as usize].first() == Some(&p.0);
    let is_last = |p: Point| rows[p.1 as usize].last() == Some(&p.0);

    let (initial, accepting, open_rows, arc_corners) = endpoint_states(layout, &is_first, &is_last, |p| p.1 as usize);

    let required: HashSet<Point> = layout.mandatory.iter().copied().filter(|p| !arc_corners.contains(p)).collect();
    let mut next = vec![0usize; width];
    let mut moves = Vec::new();
    let total: usize = rows.iter().map(Vec::len).sum();
    let mut done = 0;
    while done < total {
        let mut progressed = false;
        for y in 0..width {
            let Some(&x) = rows[y].get(next[y]) else { continue };
            let here = (x, y as i32);
            let advanced = match rung.get(&here) {
                None => {
                    if required.contains(&here) {
                        moves.push(Move::Require { edge: y, occupied: true });
                    }
                    vec![y]
                }
                Some(&(_, y2)) => {
                    let y2 = y2 as usize;
                    if rows[y2].get(next[y2]) != Some(&x) {
                        continue;
                    }
                    assert!(!required.contains(&here), "mandatory vertices must have degree two");
                    moves.push(Move::Cell { low: y.min(y2), kind: CellKind::Hex });
                    vec![y, y2]
                }
            };
            for r in advanced {
                next[r] += 1;
                done += 1;
                if next[r] == rows[r].len() && !open_rows.contains(&r) {
                    moves.push(Move::Require { edge: r, occupied: false });
                }
            }
            progressed = true;
            break;
        }
        assert!(progressed, "sweep order stalled");
    }
    let accepting = hex_accepting(spec, accepting);
    Plan { width, start_height: spec.start_height(), initial, accepting, moves }
}

/// Initial and accepting signatures plus the rows whose last edge may stay occupied.
fn endpoint_states(
    layout: &Layout,
    is_first: &dyn Fn(Point) -> bool,
    is_last: &dyn Fn(Point) -> bool,
    edge_of_row_start: impl Fn(Point) -> usize,
) -> (Vec<u64>, Vec<u64>, HashSet<usize>, HashSet<Point>) {
    let mut open = HashSet::new();
    let mut corners = HashSet::new();
    if !layout.polygon {
        let initial = layout
            .sources
            .iter()
            .map(|&p| {
                assert!(is_first(p), "walks start at the first vertex of a row");
                free_end(edge_of_row_start(p))
            })
            .collect();
        let mut targets = Vec::new();
        for &p in &layout.targets {
            assert!(is_last(p), "walks end at the last vertex of a row");
            open.insert(p.1 as usize);
            targets.push(p.1 as usize);
        }
        // accepting states are in row numbering; callers map rows to edges
        let accepting = targets.into_iter().map(|row| row as u64).collect();
        return (initial, accepting, open, corners);
    }
    // polygons: a degree-two corner at the start of row y and its rung
    // partner at the start of row y + 1 become the virtual arc "()"
    let start = layout
        .mandatory
        .iter()
        .copied()
        .find(|&p| is_first(p) && is_first((p.0, p.1 + 1)))
        .expect("polygon start corner");
    let end = layout
        .mandatory
        .iter()
        .copied()
        .find(|&p| is_last(p) && p.1 >= 1 && is_last((p.0, p.1 - 1)))
        .map(|p| (p.0, p.1 - 1))
        .or_else(|| layout.mandatory.iter().copied().find(|&p| p != start && is_last(p) && is_last((p.0, p.1 + 1))))
        .expect("polygon end corner");
    corners.insert(start);
    corners.insert(end);
    corners.extend(layout.mandatory.iter().copied().filter(|&p| p == (end.0, end.1 + 1)));
    open.insert(end.1 as usize);
    open.insert(end.1 as usize + 1);
    let initial = vec![arc(edge_of_row_start(start))];
    let accepting = vec![end.1 as u64];
    (initial, accepting, open, corners)
}

fn hex_accepting(spec: &ProblemSpec, rows: Vec<u64>) -> Vec<u64> {
    rows.into_iter()
        .map(|r| if spec.is_polygon() { arc(r as usize) } else { free_end(r as usize) })
        .collect()
}

fn square_plan(spec: &ProblemSpec, l: usize, layout: &Layout) -> Plan {
    let width = l + 2;
    let is_first = |p: Point| p.0 == 0;
    let is_last = |p: Point| p.0 == l as i32;
    // before the first column, row r sits on edge r + 1 and edge 0 is the
    // vertical edge entering from below
    let (initial, accept_rows, _, _) = endpoint_states(layout, &is_first, &is_last, |p| p.1 as usize + 1);
    let mut moves = Vec::new();
    for x in 0..=l {
        if x % 2 == 0 {
            for y in 0..=l {
                moves.push(Move::Cell { low: y, kind: CellKind::Square });
            }
            moves.push(Move::Require { edge: l + 1, occupied: false });
        } else {
            for y in (0..=l).rev() {
                moves.push(Move::Cell { low: y, kind: CellKind::Square });
            }
            moves.push(Move::Require { edge: 0, occupied: false });
        }
    }
    // after an even-indexed last column rows sit on edges 0..=l, else 1..=l+1
    let shift = if l % 2 == 0 { 0 } else { 1 };
    let accepting = accept_rows
        .into_iter()
        .map(|r| {
            let e = r as usize + shift;
            if spec.is_polygon() {
                arc(e)
            } else {
                free_end(e)
            }
        })
        .collect();
    Plan { width, start_height: spec.start_height(), initial, accepting, moves }
}

/// Rows in drawing order, used by debug output.
pub fn rows_of(layout: &Layout) -> BTreeMap<i32, Vec<i32>> {
    let mut rows: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for &(x, y) in &layout.vertices {
        rows.entry(y).or_default().push(x);
    }
    for v in rows.values_mut() {
        v.sort_unstable();
    }
    rows
}
