//! Problem data: CVRPLIB parsing, rounded Euclidean weights, granular
//! neighbor lists and best-known-solution registries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, ParseError};

/// Vertex index. The depot is always `0`, customers are `1..=n`.
pub type Vertex = usize;

pub const DEPOT: Vertex = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightKind {
    /// `EUC_2D`: Euclidean distance rounded half-up to the nearest integer.
    Euclidean2DRounded,
}

/// Largest instance (depot included) whose edge weights are tabulated.
/// Bigger ones compute weights from coordinates on demand.
pub const MATRIX_LIMIT: usize = 2001;

/// Immutable CVRP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    coords: Vec<(f64, f64)>,
    demand: Vec<i64>,
    capacity: i64,
    edge_weight_kind: EdgeWeightKind,
    matrix: Option<Vec<i32>>,
}

impl Instance {
    /// Builds an instance from already remapped data (`coords[0]` is the
    /// depot). Fails when the demand invariants do not hold.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<(f64, f64)>,
        demand: Vec<i64>,
        capacity: i64,
    ) -> Result<Self, ParseError> {
        if coords.len() < 2 {
            return Err(ParseError::new(0, "instance needs a depot and at least one customer"));
        }
        if coords.len() != demand.len() {
            return Err(ParseError::new(
                0,
                format!("{} coordinates but {} demands", coords.len(), demand.len()),
            ));
        }
        if capacity <= 0 {
            return Err(ParseError::new(0, format!("capacity must be positive, got {capacity}")));
        }
        if demand[DEPOT] != 0 {
            return Err(ParseError::new(0, "depot demand must be zero"));
        }
        for (i, &q) in demand.iter().enumerate().skip(1) {
            if q < 0 {
                return Err(ParseError::new(0, format!("negative demand for customer {i}")));
            }
            if q > capacity {
                return Err(ParseError::new(0, format!("customer {i}: demand exceeds capacity")));
            }
        }
        let matrix = (coords.len() <= MATRIX_LIMIT).then(|| {
            let nv = coords.len();
            let mut m = vec![0i32; nv * nv];
            for i in 0..nv {
                for j in 0..nv {
                    m[i * nv + j] = rounded_euclidean(coords[i], coords[j]) as i32;
                }
            }
            m
        });
        Ok(Self {
            name: name.into(),
            coords,
            demand,
            capacity,
            edge_weight_kind: EdgeWeightKind::Euclidean2DRounded,
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of customers `n` (the depot is not counted).
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn demand(&self, v: Vertex) -> i64 {
        self.demand[v]
    }

    pub fn demands(&self) -> &[i64] {
        &self.demand
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn edge_weight_kind(&self) -> EdgeWeightKind {
        self.edge_weight_kind
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.n()
    }

    pub fn total_demand(&self) -> i64 {
        self.demand.iter().sum()
    }

    /// Rounded Euclidean weight of edge `{i, j}`.
    #[inline]
    pub fn dist(&self, i: Vertex, j: Vertex) -> i64 {
        match &self.matrix {
            Some(m) => i64::from(m[i * self.coords.len() + j]),
            None => rounded_euclidean(self.coords[i], self.coords[j]),
        }
    }

    /// Emits the instance in canonical CVRPLIB form: depot first with id 1,
    /// customers following in index order.
    pub fn to_cvrplib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {}", self.name);
        let _ = writeln!(out, "TYPE : CVRP");
        let _ = writeln!(out, "DIMENSION : {}", self.coords.len());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "CAPACITY : {}", self.capacity);
        out.push_str("NODE_COORD_SECTION\n");
        for (i, (x, y)) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}", i + 1, x, y);
        }
        out.push_str("DEMAND_SECTION\n");
        for (i, q) in self.demand.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", i + 1, q);
        }
        out.push_str("DEPOT_SECTION\n\t1\n\t-1\nEOF\n");
        out
    }
}

#[inline]
fn rounded_euclidean((xi, yi): (f64, f64), (xj, yj): (f64, f64)) -> i64 {
    let (dx, dy) = (xi - xj, yi - yj);
    // non-negative, so truncation is floor
    ((dx * dx + dy * dy).sqrt() + 0.5) as i64
}

/// Rounded Euclidean edge weight between two vertices of `inst`.
pub fn edge_weight(inst: &Instance, i: Vertex, j: Vertex) -> i64 {
    inst.dist(i, j)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut inst = parse_instance(&text)?;
    if inst.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            inst.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(inst)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Coords,
    Demands,
    Depots,
}

/// Parses a CVRPLIB `EUC_2D` instance. The depot is remapped to index 0 and
/// the remaining nodes keep their file order.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut name = String::new();
    let mut dimension: Option<(usize, usize)> = None;
    let mut capacity: Option<i64> = None;
    let mut weight_type_seen = false;
    let mut coords: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut demands: BTreeMap<usize, (i64, usize)> = BTreeMap::new();
    let mut depots: Vec<usize> = Vec::new();
    let mut seen = (false, false, false);
    let mut section = Section::Header;
    let mut depot_closed = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if upper == "EOF" {
            break;
        }
        let starts_alpha = line.starts_with(|c: char| c.is_ascii_alphabetic());
        if starts_alpha {
            match upper.as_str() {
                "NODE_COORD_SECTION" => {
                    section = Section::Coords;
                    seen.0 = true;
                    continue;
                }
                "DEMAND_SECTION" => {
                    section = Section::Demands;
                    seen.1 = true;
                    continue;
                }
                "DEPOT_SECTION" => {
                    section = Section::Depots;
                    seen.2 = true;
                    continue;
                }
                _ => {}
            }
            section = Section::Header;
            let Some((key, value)) = line.split_once(':') else {
                return Err(ParseError::new(line_no, format!("malformed record `{line}`")));
            };
            let key = key.trim().to_ascii_uppercase();
            let value = value.trim();
            match key.as_str() {
                "NAME" => name = value.to_string(),
                "DIMENSION" => {
                    let d = value.parse::<usize>().map_err(|_| {
                        ParseError::new(line_no, format!("malformed DIMENSION `{value}`"))
                    })?;
                    if d < 2 {
                        return Err(ParseError::new(line_no, "DIMENSION must be at least 2"));
                    }
                    dimension = Some((d, line_no));
                }
                "CAPACITY" => {
                    let c = value.parse::<i64>().map_err(|_| {
                        ParseError::new(line_no, format!("malformed CAPACITY `{value}`"))
                    })?;
                    if c <= 0 {
                        return Err(ParseError::new(line_no, "CAPACITY must be positive"));
                    }
                    capacity = Some(c);
                }
                "EDGE_WEIGHT_TYPE" => {
                    if !value.eq_ignore_ascii_case("EUC_2D") {
                        return Err(ParseError::new(
                            line_no,
                            format!("unsupported EDGE_WEIGHT_TYPE `{value}` (only EUC_2D)"),
                        ));
                    }
                    weight_type_seen = true;
                }
                "TYPE" => {
                    let t = value.to_ascii_uppercase();
                    if t != "CVRP" {
                        return Err(ParseError::new(line_no, format!("unsupported TYPE `{value}`")));
                    }
                }
                _ => {}
            }
            continue;
        }

        let mut fields = line.split_whitespace();
        match section {
            Section::Header => {
                return Err(ParseError::new(line_no, format!("unexpected data `{line}`")));
            }
            Section::Coords => {
                let id = parse_field::<usize>(fields.next(), line_no, "node id")?;
                let x = parse_field::<f64>(fields.next(), line_no, "x coordinate")?;
                let y = parse_field::<f64>(fields.next(), line_no, "y coordinate")?;
                if fields.next().is_some() {
                    return Err(ParseError::new(line_no, "trailing fields in coordinate record"));
                }
                if coords.insert(id, (x, y)).is_some() {
                    return Err(ParseError::new(line_no, format!("duplicate coordinates for node {id}")));
                }
            }
            Section::Demands => {
                let id = parse_field::<usize>(fields.next(), line_no, "node id")?;
                let q = parse_field::<i64>(fields.next(), line_no, "demand")?;
                if fields.next().is_some() {
                    return Err(ParseError::new(line_no, "trailing fields in demand record"));
                }
                if q < 0 {
                    return Err(ParseError::new(line_no, format!("negative demand for node {id}")));
                }
                if demands.insert(id, (q, line_no)).is_some() {
                    return Err(ParseError::new(line_no, format!("duplicate demand for node {id}")));
                }
            }
            Section::Depots => {
                for tok in line.split_whitespace() {
                    let id = tok.parse::<i64>().map_err(|_| {
                        ParseError::new(line_no, format!("malformed depot id `{tok}`"))
                    })?;
                    if id == -1 {
                        depot_closed = true;
                    } else if depot_closed {
                        return Err(ParseError::new(line_no, "depot id after terminating -1"));
                    } else if id <= 0 {
                        return Err(ParseError::new(line_no, format!("invalid depot id {id}")));
                    } else {
                        depots.push(id as usize);
                    }
                }
            }
        }
    }

    let Some((dimension, dim_line)) = dimension else {
        return Err(ParseError::new(0, "missing DIMENSION record"));
    };
    let capacity = capacity.ok_or_else(|| ParseError::new(0, "missing CAPACITY record"))?;
    if !weight_type_seen {
        return Err(ParseError::new(0, "missing EDGE_WEIGHT_TYPE record"));
    }
    if !seen.0 {
        return Err(ParseError::new(0, "missing NODE_COORD_SECTION"));
    }
    if !seen.1 {
        return Err(ParseError::new(0, "missing DEMAND_SECTION"));
    }
    if !seen.2 {
        return Err(ParseError::new(0, "missing DEPOT_SECTION"));
    }
    let depot = match depots.as_slice() {
        [d] => *d,
        [] => return Err(ParseError::new(0, "DEPOT_SECTION lists no depot")),
        _ => return Err(ParseError::new(0, "multiple depots are not supported")),
    };

    if coords.len() != dimension {
        return Err(ParseError::new(
            dim_line,
            format!("DIMENSION is {dimension} but {} coordinates were given", coords.len()),
        ));
    }
    for &id in coords.keys() {
        if id == 0 || id > dimension {
            return Err(ParseError::new(0, format!("node id {id} outside 1..={dimension}")));
        }
    }
    if depot > dimension {
        return Err(ParseError::new(0, format!("depot id {depot} outside 1..={dimension}")));
    }
    for (&id, &(_, line)) in demands.iter() {
        if id == 0 || id > dimension {
            return Err(ParseError::new(line, format!("node id {id} outside 1..={dimension}")));
        }
    }

    // Depot first, then the remaining file ids in ascending order.
    let order: Vec<usize> = std::iter::once(depot)
        .chain((1..=dimension).filter(|&id| id != depot))
        .collect();
    let mut xy = Vec::with_capacity(dimension);
    let mut q = Vec::with_capacity(dimension);
    for &id in &order {
        xy.push(coords[&id]);
        match demands.get(&id) {
            Some(&(d, line)) => {
                if id == depot && d != 0 {
                    return Err(ParseError::new(line, "depot demand must be zero"));
                }
                if d > capacity {
                    return Err(ParseError::new(
                        line,
                        format!("node {id}: demand exceeds capacity ({d} > {capacity})"),
                    ));
                }
                q.push(d);
            }
            None if id == depot => q.push(0),
            None => return Err(ParseError::new(0, format!("missing demand for node {id}"))),
        }
    }
    Instance::new(name, xy, q, capacity)
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, format!("missing {what}")))?;
    tok.parse::<T>()
        .map_err(|_| ParseError::new(line, format!("malformed {what} `{tok}`")))
}

/// For every vertex, the `phi` customers closest to it (ties broken by the
/// lower index). The depot never appears in a list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborLists {
    phi: usize,
    lists: Vec<Vec<Vertex>>,
}

impl NeighborLists {
    pub fn build(inst: &Instance, phi: usize) -> Self {
        assert!(phi >= 1, "phi must be at least 1");
        let n = inst.n();
        let lists = (0..=n)
            .into_par_iter()
            .map(|v| {
                let mut row: Vec<(i64, Vertex)> = inst
                    .customers()
                    .filter(|&c| c != v)
                    .map(|c| (inst.dist(v, c), c))
                    .collect();
                let k = phi.min(row.len());
                if k < row.len() {
                    row.select_nth_unstable(k);
                    row.truncate(k);
                }
                row.sort_unstable();
                row.into_iter().map(|(_, c)| c).collect()
            })
            .collect();
        Self { phi, lists }
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    #[inline]
    pub fn of(&self, v: Vertex) -> &[Vertex] {
        &self.lists[v]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

pub fn build_neighbor_lists(inst: &Instance, phi: usize) -> NeighborLists {
    NeighborLists::build(inst, phi)
}

/// Best known objective values keyed by instance name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BksRegistry {
    values: BTreeMap<String, i64>,
}

impl BksRegistry {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.values.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Registry shipped with the crate: every benchmark instance reported
    /// in the comparison tables.
    pub fn builtin() -> Self {
        load_bks(include_str!("../data/bks.csv")).expect("bundled registry is well formed")
    }
}

/// Parses `name,value` lines. Blank lines and `#` comments are skipped; a
/// first line whose value column is not numeric is treated as a header.
pub fn load_bks(text: &str) -> Result<BksRegistry, ParseError> {
    let mut values = BTreeMap::new();
    let mut first_record = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((name, value)) = line.split_once(',') else {
            return Err(ParseError::new(line_no, format!("expected `name,value`, got `{line}`")));
        };
        let (name, value) = (name.trim(), value.trim());
        let parsed = value.parse::<i64>();
        if first_record && parsed.is_err() && value.parse::<f64>().is_err() {
            first_record = false;
            continue;
        }
        first_record = false;
        let value = parsed.map_err(|_| ParseError::new(line_no, format!("malformed value `{value}`")))?;
        if value <= 0 {
            return Err(ParseError::new(line_no, format!("non-positive value for `{name}`")));
        }
        if name.is_empty() {
            return Err(ParseError::new(line_no, "empty instance name"));
        }
        if values.insert(name.to_string(), value).is_some() {
            return Err(ParseError::new(line_no, format!("duplicate name `{name}`")));
        }
    }
    Ok(BksRegistry { values })
}
