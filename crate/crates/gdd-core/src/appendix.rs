//! The built-in catalogue of base-block designs and their orbit expansion.
//!
//! Each catalogue entry stores a design compressed as a few *base blocks*
//! plus a point mapping that is iterated to sweep out block orbits.  The
//! mapping acts segment-wise on the point range: a cyclic segment shifts
//! points by a fixed step modulo the segment length, and a product segment
//! acts through the group `Z_M x Z_3` with element `(a, b)` encoded as
//! `3a + b`.  Fixed points are cyclic segments whose step is a multiple of
//! the segment length; the engine needs no special case for them.
//!
//! Every entry also carries a machine-readable *coded string* — a second,
//! independent transcription of the same generator data.  The two are parsed
//! separately and must agree, which catches data-entry slips in either copy.

use std::collections::HashSet;
use std::sync::LazyLock;

use crate::design::{
    cross_pair_count, Block, DesignKind, GroupedDesign, Provenance, TypeSignature,
};
use crate::{Error, Result};

/// How a segment of the point range moves under the mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentAction {
    /// `x -> offset + ((x - offset + step*j) mod length)`.
    Cyclic,
    /// The segment encodes `Z_M x Z_3` (length `3M`); `x - offset = 3a + b`
    /// and step `s` acts as the group element `(s/3, s mod 3)` added
    /// componentwise `j` times.
    Product { m: u32 },
}

/// One contiguous segment `[offset, offset + length)` of the point range and
/// its action under the mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentMap {
    pub offset: u32,
    pub length: u32,
    pub step: u32,
    pub action: SegmentAction,
}

/// A set of base blocks together with the mapping that expands them:
/// `j_max` applications of the segment maps.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub j_max: u32,
    pub segments: Vec<SegmentMap>,
    pub base_blocks: Vec<Vec<u32>>,
}

/// One catalogue entry: a named design given by generators over `v` points,
/// with an ordered type declaration that drives group derivation.
#[derive(Clone, Debug)]
pub struct AppendixEntry {
    pub name: String,
    pub v: u32,
    /// Ordered `(size, count)` parts; order matters for deriving groups.
    pub declared_parts: Vec<(u32, u32)>,
    /// The verbatim coded transcription of the generator data.
    pub coded: String,
    pub generators: Vec<GeneratorSpec>,
    /// Data file the entry was read from (diagnostics only).
    pub source: String,
}

impl AppendixEntry {
    pub fn signature(&self) -> TypeSignature {
        TypeSignature::new(self.declared_parts.iter().copied())
    }
}

/// Applies the segment mapping to one point: locate the segment containing
/// `x` and advance it `j` steps.
pub fn apply_mapping(x: u32, j: u32, segments: &[SegmentMap]) -> Result<u32> {
    let seg = segments
        .iter()
        .find(|s| x >= s.offset && x < s.offset + s.length)
        .ok_or_else(|| Error::Invalid(format!("point {x} outside all segments")))?;
    let e = (x - seg.offset) as u64;
    let shift = seg.step as u64 * j as u64;
    let mapped = match seg.action {
        SegmentAction::Cyclic => (e + shift) % seg.length as u64,
        SegmentAction::Product { m } => {
            let m = m as u64;
            let (a, b) = (e / 3, e % 3);
            let a2 = (a + shift / 3) % m;
            let b2 = (b + shift % 3) % 3;
            3 * a2 + b2
        }
    };
    Ok(seg.offset + mapped as u32)
}

/// Derives the group partition from ordered type parts, consuming points
/// left to right: a part `(s, c)` with `c > 1` takes the next `s*c` points
/// and splits them into `c` residue classes modulo `c`; a part `(s, 1)`
/// takes the next `s` points as one group.
pub fn derive_groups(v: u32, parts: &[(u32, u32)]) -> Result<Vec<Vec<u32>>> {
    let mut groups = Vec::new();
    let mut start = 0u32;
    for &(size, count) in parts {
        if count > 1 {
            for r in 0..count {
                groups.push((0..size).map(|t| start + r + count * t).collect());
            }
        } else {
            groups.push((start..start + size).collect());
        }
        start += size * count;
    }
    if start != v {
        return Err(Error::Invalid(format!(
            "type parts consume {start} points, v = {v}"
        )));
    }
    Ok(groups)
}

/// Expands an entry into a full design: every base block mapped by every
/// `j`, with groups derived from the declared parts.  Fails on any repeated
/// point within a mapped block, any duplicate block anywhere in the
/// expansion, or a total block count differing from the count the type
/// signature demands.
pub fn expand_entry(entry: &AppendixEntry) -> Result<GroupedDesign> {
    expand_with(entry, &entry.generators)
}

impl AppendixEntry {
    /// Convenience form of [`expand_entry`].
    pub fn expand(&self) -> Result<GroupedDesign> {
        expand_entry(self)
    }
}

/// Expansion driven by an explicit generator list (used to check that the
/// coded transcription induces the same design as the explicit fields).
pub fn expand_with(entry: &AppendixEntry, generators: &[GeneratorSpec]) -> Result<GroupedDesign> {
    let signature = entry.signature();
    let expected = cross_pair_count(&signature) / 6;
    let mut blocks = Vec::with_capacity(expected as usize);
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(expected as usize);
    for (gi, generator) in generators.iter().enumerate() {
        for (bi, base) in generator.base_blocks.iter().enumerate() {
            for j in 0..generator.j_max {
                let mut mapped = Vec::with_capacity(base.len());
                for &x in base {
                    mapped.push(apply_mapping(x, j, &generator.segments).map_err(|e| {
                        Error::Invalid(format!(
                            "{}: generator {gi}, base block {bi}, j = {j}: {e}",
                            entry.name
                        ))
                    })?);
                }
                let block = Block::new(mapped).map_err(|_| {
                    Error::Invalid(format!(
                        "{}: generator {gi}, base block {bi}, j = {j}: repeated point",
                        entry.name
                    ))
                })?;
                if !seen.insert(block.points().to_vec()) {
                    return Err(Error::Invalid(format!(
                        "{}: generator {gi}, base block {bi}, j = {j}: duplicate block {block}",
                        entry.name
                    )));
                }
                blocks.push(block);
            }
        }
    }
    if blocks.len() as u64 != expected {
        return Err(Error::Invalid(format!(
            "{}: expansion produced {} blocks, type {signature} requires {expected}",
            entry.name,
            blocks.len()
        )));
    }
    let groups = derive_groups(entry.v, &entry.declared_parts)?;
    GroupedDesign::new(
        entry.v,
        DesignKind::Gdd,
        4,
        groups,
        None,
        None,
        blocks,
        Provenance::Appendix {
            name: entry.name.clone(),
        },
    )
}

/// The generator shells described by a coded string: `(block count,
/// iteration count, segments)` per generator, with offsets accumulated in
/// listing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedSpec {
    pub v: u32,
    /// Per generator: number of base blocks, iteration count, segment list.
    pub generators: Vec<(u32, u32, Vec<SegmentMap>)>,
    pub parts: Vec<(u32, u32)>,
}

/// Minimal nested-integer-tuple syntax the coded strings are written in.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Int(u64),
    List(Vec<Node>),
}

fn parse_node(text: &str) -> Result<(Node, &str)> {
    let text = text.trim_start();
    if let Some(rest) = text.strip_prefix('(') {
        let mut items = Vec::new();
        let mut rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix(')') {
            return Ok((Node::List(items), after));
        }
        loop {
            let (item, after) = parse_node(rest)?;
            items.push(item);
            rest = after.trim_start();
            if let Some(after) = rest.strip_prefix(',') {
                rest = after;
            } else if let Some(after) = rest.strip_prefix(')') {
                return Ok((Node::List(items), after));
            } else {
                return Err(Error::Parse(format!(
                    "expected ',' or ')' at {rest:?}"
                )));
            }
        }
    }
    let end = text
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(text.len());
    if end == 0 {
        return Err(Error::Parse(format!("expected integer at {text:?}")));
    }
    let value: u64 = text[..end]
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer at {text:?}")))?;
    Ok((Node::Int(value), &text[end..]))
}

fn as_int(node: &Node) -> Option<u64> {
    match node {
        Node::Int(n) => Some(*n),
        Node::List(_) => None,
    }
}

/// A segment node: `(len, step)` or `(len, step, (M, 3))`.
fn parse_segment_node(node: &Node) -> Option<(u32, u32, SegmentAction)> {
    let Node::List(items) = node else { return None };
    match items.as_slice() {
        [Node::Int(len), Node::Int(step)] => {
            Some((*len as u32, *step as u32, SegmentAction::Cyclic))
        }
        [Node::Int(len), Node::Int(step), Node::List(prod)] => match prod.as_slice() {
            [Node::Int(m), Node::Int(3)] if *len == 3 * m => Some((
                *len as u32,
                *step as u32,
                SegmentAction::Product { m: *m as u32 },
            )),
            _ => None,
        },
        _ => None,
    }
}

/// A list that is either a single item or a tuple of items; `parse_one`
/// recognizes an item.  Handles the coded strings' habit of dropping the
/// wrapping parentheses around singleton lists.
fn parse_one_or_many<T>(node: &Node, parse_one: impl Fn(&Node) -> Option<T>) -> Option<Vec<T>> {
    if let Some(single) = parse_one(node) {
        return Some(vec![single]);
    }
    let Node::List(items) = node else { return None };
    items.iter().map(&parse_one).collect()
}

fn parse_generator_node(node: &Node) -> Option<(u32, u32, Vec<SegmentMap>)> {
    let Node::List(items) = node else { return None };
    let [count, iters, segs] = items.as_slice() else {
        return None;
    };
    let (count, iters) = (as_int(count)?, as_int(iters)?);
    let shells = parse_one_or_many(segs, parse_segment_node)?;
    let mut segments = Vec::new();
    let mut offset = 0u32;
    for (length, step, action) in shells {
        segments.push(SegmentMap { offset, length, step, action });
        offset += length;
    }
    Some((count as u32, iters as u32, segments))
}

/// Parses a coded string `(v, ((n, r, (segments…)), …), ((size, count), …))`.
pub fn parse_coded_string(text: &str) -> Result<CodedSpec> {
    let (node, rest) = parse_node(text)?;
    if !rest.trim().is_empty() {
        return Err(Error::Parse(format!(
            "trailing text after coded string: {rest:?}"
        )));
    }
    let Node::List(items) = &node else {
        return Err(Error::Parse("coded string is not a tuple".into()));
    };
    let [v_node, gens_node, parts_node] = items.as_slice() else {
        return Err(Error::Parse(format!(
            "coded string has {} top-level fields, expected 3",
            items.len()
        )));
    };
    let v = as_int(v_node).ok_or_else(|| Error::Parse("coded v is not an integer".into()))?;
    let generators = parse_one_or_many(gens_node, parse_generator_node)
        .ok_or_else(|| Error::Parse("unrecognized generator list in coded string".into()))?;
    let parts = parse_one_or_many(parts_node, |n| {
        let Node::List(items) = n else { return None };
        match items.as_slice() {
            [Node::Int(s), Node::Int(c)] => Some((*s as u32, *c as u32)),
            _ => None,
        }
    })
    .ok_or_else(|| Error::Parse("unrecognized type parts in coded string".into()))?;
    for (_, _, segments) in &generators {
        let end = segments.last().map_or(0, |s| s.offset + s.length);
        if end != v as u32 {
            return Err(Error::Parse(format!(
                "coded segments cover [0, {end}), v = {v}"
            )));
        }
    }
    Ok(CodedSpec {
        v: v as u32,
        generators,
        parts,
    })
}

/// Steps are equivalent when they induce the same mapping on the segment.
fn same_segment(a: &SegmentMap, b: &SegmentMap) -> bool {
    let period = match a.action {
        // A cyclic step matters modulo the length; a product step acts
        // through Z_M x Z_3, which 3a+b-encoding makes periodic in 3M.
        SegmentAction::Cyclic => a.length,
        SegmentAction::Product { m } => 3 * m,
    };
    a.offset == b.offset
        && a.length == b.length
        && a.action == b.action
        && a.step % period == b.step % period
}

/// Structural consistency of one entry: declared parts sum to `v`, segments
/// tile `[0, v)`, the coded string reproduces the explicit generator shells,
/// and the orbit count equals the block count the type demands.
fn validate_entry(entry: &AppendixEntry) -> Result<()> {
    let who = &entry.name;
    let declared_v: u32 = entry.declared_parts.iter().map(|&(s, c)| s * c).sum();
    if declared_v != entry.v {
        return Err(Error::Invalid(format!(
            "{who}: type parts sum to {declared_v}, v = {}",
            entry.v
        )));
    }
    for (gi, generator) in entry.generators.iter().enumerate() {
        let mut offset = 0u32;
        for seg in &generator.segments {
            if seg.offset != offset {
                return Err(Error::Invalid(format!(
                    "{who}: generator {gi}: segment at {} does not continue tiling from {offset}",
                    seg.offset
                )));
            }
            if let SegmentAction::Product { m } = seg.action {
                if seg.length != 3 * m {
                    return Err(Error::Invalid(format!(
                        "{who}: generator {gi}: product segment length {} != 3*{m}",
                        seg.length
                    )));
                }
            }
            offset += seg.length;
        }
        if offset != entry.v {
            return Err(Error::Invalid(format!(
                "{who}: generator {gi}: segments cover [0, {offset}), v = {}",
                entry.v
            )));
        }
        if generator.base_blocks.is_empty() || generator.j_max == 0 {
            return Err(Error::Invalid(format!(
                "{who}: generator {gi}: empty generator"
            )));
        }
    }
    let coded = parse_coded_string(&entry.coded)
        .map_err(|e| Error::Parse(format!("{who}: coded string: {e}")))?;
    if coded.v != entry.v || coded.parts != entry.declared_parts {
        return Err(Error::Invalid(format!(
            "{who}: coded string v/type disagrees with the explicit fields"
        )));
    }
    if coded.generators.len() != entry.generators.len() {
        return Err(Error::Invalid(format!(
            "{who}: coded string lists {} generators, explicit fields {}",
            coded.generators.len(),
            entry.generators.len()
        )));
    }
    for (gi, ((n, r, coded_segs), explicit)) in coded
        .generators
        .iter()
        .zip(&entry.generators)
        .enumerate()
    {
        if *n as usize != explicit.base_blocks.len() || *r != explicit.j_max {
            return Err(Error::Invalid(format!(
                "{who}: generator {gi}: coded ({n} blocks, {r} iterations) vs explicit ({}, {})",
                explicit.base_blocks.len(),
                explicit.j_max
            )));
        }
        if coded_segs.len() != explicit.segments.len()
            || !coded_segs
                .iter()
                .zip(&explicit.segments)
                .all(|(a, b)| same_segment(a, b))
        {
            return Err(Error::Invalid(format!(
                "{who}: generator {gi}: coded segments disagree with explicit segments"
            )));
        }
    }
    let orbit_total: u64 = entry
        .generators
        .iter()
        .map(|g| g.base_blocks.len() as u64 * g.j_max as u64)
        .sum();
    let expected = cross_pair_count(&entry.signature()) / 6;
    if orbit_total != expected {
        return Err(Error::Invalid(format!(
            "{who}: orbits generate {orbit_total} blocks, type requires {expected}"
        )));
    }
    Ok(())
}

/// Parses one `.entries` data file, which may hold several entries.
///
/// Grammar per entry: `name=`, `v=`, `type=(s,c);(s,c);…`, `coded=<verbatim>`,
/// then one or more `generator { jmax=…  segments=(off,len,step[,M]);…
/// blocks: <one per line> }` sections.
pub fn parse_entries_text(source: &str, text: &str) -> Result<Vec<AppendixEntry>> {
    #[derive(Default)]
    struct Partial {
        name: Option<String>,
        v: Option<u32>,
        parts: Option<Vec<(u32, u32)>>,
        coded: Option<String>,
        generators: Vec<GeneratorSpec>,
    }
    fn finish(source: &str, p: Partial) -> Result<AppendixEntry> {
        let name = p.name.ok_or_else(|| Error::Parse("entry missing name=".into()))?;
        let entry = AppendixEntry {
            v: p.v.ok_or_else(|| Error::Parse(format!("{name}: missing v=")))?,
            declared_parts: p
                .parts
                .ok_or_else(|| Error::Parse(format!("{name}: missing type=")))?,
            coded: p
                .coded
                .ok_or_else(|| Error::Parse(format!("{name}: missing coded=")))?,
            generators: p.generators,
            source: source.to_string(),
            name,
        };
        validate_entry(&entry)?;
        Ok(entry)
    }

    let mut entries = Vec::new();
    let mut current: Option<Partial> = None;
    let mut generator: Option<GeneratorSpec> = None;
    let mut in_blocks = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let at = |msg: &str| Error::Parse(format!("{source}:{}: {msg}", lineno + 1));
        if line.is_empty() {
            continue;
        }
        if let Some(gen) = &mut generator {
            if line == "}" {
                let gen = generator.take().unwrap();
                current
                    .as_mut()
                    .ok_or_else(|| at("generator outside entry"))?
                    .generators
                    .push(gen);
                in_blocks = false;
            } else if let Some(value) = line.strip_prefix("jmax=") {
                gen.j_max = value.parse().map_err(|_| at("bad jmax"))?;
            } else if let Some(value) = line.strip_prefix("segments=") {
                gen.segments = parse_segment_fields(value).map_err(|e| at(&e.to_string()))?;
            } else if line == "blocks:" {
                in_blocks = true;
            } else if in_blocks {
                let block: Vec<u32> = line
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| at("bad block point")))
                    .collect::<Result<_>>()?;
                gen.base_blocks.push(block);
            } else {
                return Err(at(&format!("unexpected line in generator: {line:?}")));
            }
            continue;
        }
        if let Some(name) = line.strip_prefix("name=") {
            if let Some(done) = current.take() {
                entries.push(finish(source, done)?);
            }
            current = Some(Partial {
                name: Some(name.to_string()),
                ..Partial::default()
            });
        } else {
            let entry = current.as_mut().ok_or_else(|| at("field before name="))?;
            if let Some(value) = line.strip_prefix("v=") {
                entry.v = Some(value.parse().map_err(|_| at("bad v"))?);
            } else if let Some(value) = line.strip_prefix("type=") {
                entry.parts = Some(parse_part_fields(value).map_err(|e| at(&e.to_string()))?);
            } else if let Some(value) = line.strip_prefix("coded=") {
                entry.coded = Some(value.to_string());
            } else if line == "generator {" {
                generator = Some(GeneratorSpec {
                    j_max: 0,
                    segments: Vec::new(),
                    base_blocks: Vec::new(),
                });
                in_blocks = false;
            } else {
                return Err(at(&format!("unexpected line: {line:?}")));
            }
        }
    }
    if generator.is_some() {
        return Err(Error::Parse(format!("{source}: unterminated generator")));
    }
    if let Some(done) = current.take() {
        entries.push(finish(source, done)?);
    }
    Ok(entries)
}

/// `(off,len,step)` or `(off,len,step,M)`, semicolon-separated.
fn parse_segment_fields(text: &str) -> Result<Vec<SegmentMap>> {
    text.split(';')
        .map(|item| {
            let inner = item
                .trim()
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad segment {item:?}")))?;
            let nums: Vec<u32> = inner
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad segment number in {item:?}")))
                })
                .collect::<Result<_>>()?;
            match nums.as_slice() {
                [offset, length, step] => Ok(SegmentMap {
                    offset: *offset,
                    length: *length,
                    step: *step,
                    action: SegmentAction::Cyclic,
                }),
                [offset, length, step, m] => Ok(SegmentMap {
                    offset: *offset,
                    length: *length,
                    step: *step,
                    action: SegmentAction::Product { m: *m },
                }),
                _ => Err(Error::Parse(format!("bad segment arity {item:?}"))),
            }
        })
        .collect()
}

/// `(size,count)` parts, semicolon-separated, order preserved.
fn parse_part_fields(text: &str) -> Result<Vec<(u32, u32)>> {
    text.split(';')
        .map(|item| {
            let inner = item
                .trim()
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad type part {item:?}")))?;
            let (s, c) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad type part {item:?}")))?;
            Ok((
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad size in {item:?}")))?,
                c.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad count in {item:?}")))?,
            ))
        })
        .collect()
}

/// The full built-in catalogue, parsed once on first use.
pub struct Catalogue {
    entries: Vec<AppendixEntry>,
}

/// Data files compiled into the library.
const DATA_FILES: &[(&str, &str)] = &[
    ("a_aubc", include_str!("../data/appendix/a_aubc.entries")),
    ("b_39e8", include_str!("../data/appendix/b_39e8.entries")),
    ("c_51e8", include_str!("../data/appendix/c_51e8.entries")),
    ("d_57e8", include_str!("../data/appendix/d_57e8.entries")),
    ("e_69e8", include_str!("../data/appendix/e_69e8.entries")),
    ("f_87e8", include_str!("../data/appendix/f_87e8.entries")),
    ("g_93e8", include_str!("../data/appendix/g_93e8.entries")),
    ("h_13eu", include_str!("../data/appendix/h_13eu.entries")),
    ("i_17eu", include_str!("../data/appendix/i_17eu.entries")),
    ("j_19eu", include_str!("../data/appendix/j_19eu.entries")),
    ("k_23eu", include_str!("../data/appendix/k_23eu.entries")),
    ("l_25eu", include_str!("../data/appendix/l_25eu.entries")),
    ("m_29eu", include_str!("../data/appendix/m_29eu.entries")),
    ("n_31eu", include_str!("../data/appendix/n_31eu.entries")),
    ("o_35eu", include_str!("../data/appendix/o_35eu.entries")),
];

static CATALOGUE: LazyLock<Catalogue> = LazyLock::new(|| {
    let mut entries = Vec::new();
    for (source, text) in DATA_FILES {
        entries.extend(
            parse_entries_text(source, text)
                .unwrap_or_else(|e| panic!("built-in catalogue data invalid: {e}")),
        );
    }
    Catalogue { entries }
});

impl Catalogue {
    /// The built-in catalogue (parsed and structurally validated once).
    pub fn builtin() -> &'static Catalogue {
        &CATALOGUE
    }

    pub fn entries(&self) -> &[AppendixEntry] {
        &self.entries
    }

    pub fn find_by_name(&self, name: &str) -> Option<&AppendixEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Finds an entry whose canonical type signature matches, regardless of
    /// how the name orders the parts.
    pub fn find_by_signature(&self, signature: &TypeSignature) -> Option<&AppendixEntry> {
        self.entries.iter().find(|e| &e.signature() == signature)
    }

    /// Finds by name first, then by signature when `query` parses as a type.
    pub fn find(&self, query: &str) -> Option<&AppendixEntry> {
        self.find_by_name(query).or_else(|| {
            TypeSignature::parse(query)
                .ok()
                .and_then(|sig| self.find_by_signature(&sig))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify;

    fn seg(offset: u32, length: u32, step: u32) -> SegmentMap {
        SegmentMap { offset, length, step, action: SegmentAction::Cyclic }
    }

    #[test]
    fn mapping_oracles() {
        // Componentwise product action: 5 = (1,2), step 3*j=6 = (2,0),
        // sum (3,2) -> 11.
        let prod = [SegmentMap {
            offset: 0,
            length: 207,
            step: 3,
            action: SegmentAction::Product { m: 69 },
        }];
        assert_eq!(apply_mapping(5, 2, &prod).unwrap(), 11);
        // Cyclic: 156 + ((4 + 2*3) mod 6) = 160.
        let segs = [seg(156, 6, 2)];
        assert_eq!(apply_mapping(160, 3, &segs).unwrap(), 160);
        // j = 0 is the identity everywhere.
        assert_eq!(apply_mapping(160, 0, &segs).unwrap(), 160);
        assert_eq!(apply_mapping(5, 0, &prod).unwrap(), 5);
        // Fixed points: step = 0 mod length.
        assert_eq!(apply_mapping(3, 7, &[seg(0, 4, 0)]).unwrap(), 3);
        assert_eq!(apply_mapping(3, 7, &[seg(0, 4, 4)]).unwrap(), 3);
        // Outside all segments.
        assert!(apply_mapping(10, 0, &[seg(0, 4, 1)]).is_err());
    }

    #[test]
    fn mapping_is_a_group_action() {
        // apply(x, j1 + j2) = apply(apply(x, j1), j2) for cyclic segments
        // and for product segments whose step is divisible by 3.
        let cases = [
            seg(0, 36, 4),
            seg(0, 15, 5),
            SegmentMap { offset: 0, length: 207, step: 3, action: SegmentAction::Product { m: 69 } },
            SegmentMap { offset: 0, length: 261, step: 6, action: SegmentAction::Product { m: 87 } },
        ];
        for segment in cases {
            let segs = [segment];
            for x in segment.offset..segment.offset + segment.length {
                for j1 in 0..12 {
                    for j2 in 0..12 {
                        let direct = apply_mapping(x, j1 + j2, &segs).unwrap();
                        let stepped =
                            apply_mapping(apply_mapping(x, j1, &segs).unwrap(), j2, &segs)
                                .unwrap();
                        assert_eq!(direct, stepped, "segment {segment:?}, x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_step_one_enumerates_whole_group() {
        // Step 1 walks all 3M group elements as j -> (j / 3, j mod 3).
        let segs = [SegmentMap {
            offset: 0,
            length: 21,
            step: 1,
            action: SegmentAction::Product { m: 7 },
        }];
        let orbit: std::collections::HashSet<u32> =
            (0..21).map(|j| apply_mapping(0, j, &segs).unwrap()).collect();
        assert_eq!(orbit.len(), 21);
    }

    #[test]
    fn derive_groups_examples() {
        // (13,12),(7,1) over 163 points: residue classes mod 12, then a
        // 7-point group.
        let groups = derive_groups(163, &[(13, 12), (7, 1)]).unwrap();
        assert_eq!(groups.len(), 13);
        assert_eq!(groups[0][..3], [0, 12, 24]);
        assert_eq!(groups[11][..2], [11, 23]);
        assert_eq!(groups[12], (156..163).collect::<Vec<_>>());

        let groups = derive_groups(12, &[(3, 4)]).unwrap();
        assert_eq!(groups, vec![vec![0, 4, 8], vec![1, 5, 9], vec![2, 6, 10], vec![3, 7, 11]]);

        assert!(derive_groups(100, &[(3, 4)]).is_err());
    }

    #[test]
    fn coded_string_examples() {
        let spec = parse_coded_string(
            "(69, ((36, 9, ((36, 4), (18, 2), (15, 5)))), ((9, 4), (18, 1), (15, 1)))",
        )
        .unwrap();
        assert_eq!(spec.v, 69);
        assert_eq!(spec.parts, vec![(9, 4), (18, 1), (15, 1)]);
        assert_eq!(spec.generators.len(), 1);
        let (n, r, segs) = &spec.generators[0];
        assert_eq!((*n, *r), (36, 9));
        assert_eq!(
            segs.as_slice(),
            &[seg(0, 36, 4), seg(36, 18, 2), seg(54, 15, 5)]
        );

        let spec = parse_coded_string(
            "(221, ((2, 69, ((207, 3, (69, 3)), (12, 4), (2, 2))), \
             (17, 207, ((207, 1, (69, 3)), (12, 4), (2, 2)))), ((23, 9), (14, 1)))",
        )
        .unwrap();
        assert_eq!(spec.v, 221);
        assert_eq!(spec.generators.len(), 2);
        assert_eq!(
            spec.generators[0].2[0],
            SegmentMap { offset: 0, length: 207, step: 3, action: SegmentAction::Product { m: 69 } }
        );
        assert_eq!(spec.generators[1].2[0].step, 1);

        assert!(parse_coded_string("(10, ((1, 1, (10, 1))), ((5, 2)) extra").is_err());
        assert!(parse_coded_string("(10, ((1, 1, (9, 1))), ((5, 2)))").is_err());
    }

    #[test]
    fn builtin_catalogue_loads_and_finds() {
        let cat = Catalogue::builtin();
        assert_eq!(cat.entries().len(), 178);
        assert!(cat.find_by_name("39^8 120^1").is_some());
        // Signature lookup is order-insensitive.
        let sig = TypeSignature::parse("15^1 27^1 9^6").unwrap();
        let entry = cat.find_by_signature(&sig).unwrap();
        assert_eq!(entry.name, "9^6 27^1 15^1");
        assert!(cat.find("9^6 15^1 27^1").is_some());
        assert!(cat.find("నమూనా").is_none());
    }

    #[test]
    fn small_entry_expands_and_verifies() {
        let cat = Catalogue::builtin();
        let entry = cat.find_by_name("9^4 18^1 15^1").unwrap();
        let design = expand_entry(entry).unwrap();
        assert_eq!(design.blocks().len(), 324);
        assert_eq!(design.v(), 69);
        let report = verify(&design);
        assert!(report.passed, "{}", report.summary());
        assert_eq!(report.pairs_required, 1944);
    }

    #[test]
    fn product_action_entry_expands_and_verifies() {
        let cat = Catalogue::builtin();
        let entry = cat.find_by_name("23^9 14^1").unwrap();
        assert!(entry
            .generators
            .iter()
            .any(|g| g.segments.iter().any(|s| matches!(s.action, SegmentAction::Product { .. }))));
        let design = expand_entry(entry).unwrap();
        let report = verify(&design);
        assert!(report.passed, "{}", report.summary());
    }

    #[test]
    fn coded_and_explicit_fields_expand_identically() {
        // The validation pass already forces shell agreement; this checks the
        // stronger property that expansion driven by the coded segments
        // produces the identical design for a sample of entries.
        let cat = Catalogue::builtin();
        let sample = [
            "9^4 18^1 15^1",
            "12^4 24^1 21^1",
            "39^8 120^1",
            "23^9 14^1",
            "13^12 7^1",
            "17^9 8^1",
            "19^9 10^1",
            "25^12 7^1",
            "29^12 14^1",
            "35^12 29^1",
        ];
        for name in sample {
            let entry = cat.find_by_name(name).unwrap_or_else(|| panic!("no {name}"));
            let coded = parse_coded_string(&entry.coded).unwrap();
            let shells: Vec<GeneratorSpec> = coded
                .generators
                .iter()
                .zip(&entry.generators)
                .map(|((_, r, segs), explicit)| GeneratorSpec {
                    j_max: *r,
                    segments: segs.clone(),
                    base_blocks: explicit.base_blocks.clone(),
                })
                .collect();
            let a = expand_entry(entry).unwrap();
            let b = expand_with(entry, &shells).unwrap();
            assert!(a.canonical_eq(&b), "{name}: coded expansion differs");
        }
    }
}
