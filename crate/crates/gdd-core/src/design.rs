//! The universal design data model: blocks, type signatures, grouped designs,
//! provenance records, and the canonical text file format.
//!
//! Points of a design on `v` elements are always the dense integers
//! `0, 1, ..., v-1`; external formats map their labels into this range at
//! ingestion.  This makes flat triangular pair arrays possible in the
//! verifier and keeps every construction deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// A point label, `0 <= value < v` within its design.
pub type PointId = u32;

/// A block: a strictly increasing tuple of points.
///
/// The block size `k` is 4 for all target designs but ranges over `{4,...,8}`
/// for transversal-design ingredients, so it is a property of the containing
/// [`GroupedDesign`], not of the block itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    points: Vec<PointId>,
}

impl Block {
    /// Builds a block from points in arbitrary order; sorts them and rejects
    /// repeats.
    pub fn new(mut points: Vec<PointId>) -> Result<Self> {
        points.sort_unstable();
        Self::from_sorted(points)
    }

    /// Builds a block from already strictly increasing points.
    pub fn from_sorted(points: Vec<PointId>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("empty block".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "block points not strictly increasing: {points:?}"
            )));
        }
        Ok(Block { points })
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All unordered point pairs `(p, q)` with `p < q` inside this block.
    pub fn pairs(&self) -> impl Iterator<Item = (PointId, PointId)> + '_ {
        let pts = &self.points;
        (0..pts.len())
            .flat_map(move |i| (i + 1..pts.len()).map(move |j| (pts[i], pts[j])))
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// The role of a design value: plain GDD, double GDD (with holes),
/// transversal design, or resolvable GDD (with parallel classes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DesignKind {
    Gdd,
    Dgdd,
    Td,
    Rgdd,
}

impl DesignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignKind::Gdd => "GDD",
            DesignKind::Dgdd => "DGDD",
            DesignKind::Td => "TD",
            DesignKind::Rgdd => "RGDD",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "GDD" => Ok(DesignKind::Gdd),
            "DGDD" => Ok(DesignKind::Dgdd),
            "TD" => Ok(DesignKind::Td),
            "RGDD" => Ok(DesignKind::Rgdd),
            other => Err(Error::Parse(format!("unknown design kind {other:?}"))),
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A multiset of `(group size, count)` pairs identifying a design type, e.g.
/// `39^8 120^1`.
///
/// The canonical form merges parts of equal size and sorts descending by
/// size, so `{(39,7),(39,1)}` and `{(39,8)}` are the same signature.  Ordered
/// part lists that must retain a source segmentation (appendix group
/// descriptors) are kept as plain `(size, count)` slices elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeSignature {
    parts: Vec<(u32, u32)>,
}

impl TypeSignature {
    /// Canonicalizes an arbitrary part list: drops zero-size and zero-count
    /// parts, merges equal sizes, sorts descending by size.
    pub fn new(parts: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut merged: BTreeMap<u32, u32> = BTreeMap::new();
        for (size, count) in parts {
            if size > 0 && count > 0 {
                *merged.entry(size).or_insert(0) += count;
            }
        }
        let parts = merged.into_iter().rev().collect();
        TypeSignature { parts }
    }

    /// Canonical parts, sorted descending by size.
    pub fn parts(&self) -> &[(u32, u32)] {
        &self.parts
    }

    /// Total number of points.
    pub fn v(&self) -> u32 {
        self.parts.iter().map(|&(s, c)| s * c).sum()
    }

    /// Total number of groups.
    pub fn group_count(&self) -> u32 {
        self.parts.iter().map(|&(_, c)| c).sum()
    }

    /// Parses `"39^8 120^1"`-style text; a bare `s` token abbreviates `s^1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for token in text.split_whitespace() {
            let (size, count) = match token.split_once('^') {
                Some((s, c)) => (
                    s.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad group size in {token:?}")))?,
                    c.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?,
                ),
                None => (
                    token
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad type token {token:?}")))?,
                    1,
                ),
            };
            parts.push((size, count));
        }
        if parts.is_empty() {
            return Err(Error::Parse("empty type signature".into()));
        }
        Ok(TypeSignature::new(parts))
    }
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (size, count)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{size}^{count}")?;
        }
        Ok(())
    }
}

/// Number of unordered point pairs that lie in distinct groups of the given
/// signature: `(v^2 - sum size_i^2 over groups) / 2`.
///
/// For a valid 4-GDD this equals 6 times the block count, which is how the
/// test suite cross-checks block counts independently of any formula for a
/// specific type shape.
pub fn cross_pair_count(signature: &TypeSignature) -> u64 {
    let v = signature.v() as u64;
    let same: u64 = signature
        .parts()
        .iter()
        .map(|&(s, c)| (s as u64) * (s as u64) * (c as u64))
        .sum();
    (v * v - same) / 2
}

/// The number of blocks in a 4-GDD of type `g^u m^1`:
/// `g^2 u (u-1) / 12 + g u m / 6`.
///
/// The two terms need not be separately integral; the sum is computed as
/// `(g^2 u (u-1) + 2 g u m) / 12` and an error is returned when that is not
/// an integer (which signals an inadmissible parameter triple).
pub fn expected_block_count(g: u64, u: u64, m: u64) -> Result<u64> {
    let numerator = g * g * u * (u - 1) + 2 * g * u * m;
    if numerator % 12 != 0 {
        return Err(Error::Precondition(format!(
            "block count for ({g}, {u}, {m}) is not an integer"
        )));
    }
    Ok(numerator / 12)
}

/// The canonical signature of a design: its group sizes with multiplicities.
pub fn signature_of(design: &GroupedDesign) -> TypeSignature {
    TypeSignature::new(design.groups().iter().map(|grp| (grp.len() as u32, 1)))
}

/// A grouped design: points `0..v`, a group partition, an optional hole
/// partition (DGDDs), an optional resolution into parallel classes (RGDDs),
/// and a block list.
///
/// All fields are immutable after construction; the constructor validates
/// structural invariants (partitions, block shapes, resolution indices) but
/// deliberately does *not* check pair coverage -- that is the verifier's job,
/// and the verifier never trusts how a design was built.
///
/// Blocks are kept in generation order, which every construction in this
/// crate defines deterministically; [`GroupedDesign::canonical_blocks`]
/// provides the order-insensitive view used for equality of content.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedDesign {
    v: u32,
    kind: DesignKind,
    block_size: u32,
    groups: Vec<Vec<PointId>>,
    holes: Option<Vec<Vec<PointId>>>,
    resolution: Option<Vec<Vec<u32>>>,
    blocks: Vec<Block>,
    provenance: Provenance,
}

impl GroupedDesign {
    /// Validates and builds a design.
    ///
    /// Checks performed: groups (and holes, when present) partition `0..v`
    /// with classes stored sorted; every block has exactly `block_size`
    /// strictly increasing points below `v`; a resolution, when present,
    /// partitions the block index set `0..blocks.len()`.  A DGDD must carry
    /// holes, an RGDD must carry a resolution; other kinds must not.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v: u32,
        kind: DesignKind,
        block_size: u32,
        groups: Vec<Vec<PointId>>,
        holes: Option<Vec<Vec<PointId>>>,
        resolution: Option<Vec<Vec<u32>>>,
        blocks: Vec<Block>,
        provenance: Provenance,
    ) -> Result<Self> {
        let groups = validate_partition(v, groups, "groups")?;
        let holes = match holes {
            Some(h) => Some(validate_partition(v, h, "holes")?),
            None => None,
        };
        match kind {
            DesignKind::Dgdd if holes.is_none() => {
                return Err(Error::Invalid("DGDD requires a hole partition".into()));
            }
            DesignKind::Rgdd if resolution.is_none() => {
                return Err(Error::Invalid("RGDD requires a resolution".into()));
            }
            DesignKind::Gdd | DesignKind::Td if holes.is_some() => {
                return Err(Error::Invalid(format!("{kind} must not carry holes")));
            }
            _ => {}
        }
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != block_size as usize {
                return Err(Error::Invalid(format!(
                    "block {i} has {} points, expected {block_size}",
                    block.len()
                )));
            }
            if let Some(&last) = block.points().last() {
                if last >= v {
                    return Err(Error::Invalid(format!(
                        "block {i} references point {last} >= v = {v}"
                    )));
                }
            }
        }
        if let Some(res) = &resolution {
            let mut seen = vec![false; blocks.len()];
            for (c, class) in res.iter().enumerate() {
                for &b in class {
                    let idx = b as usize;
                    if idx >= blocks.len() {
                        return Err(Error::Invalid(format!(
                            "resolution class {c} references block {b} out of range"
                        )));
                    }
                    if seen[idx] {
                        return Err(Error::Invalid(format!(
                            "block {b} appears in two resolution classes"
                        )));
                    }
                    seen[idx] = true;
                }
            }
            if let Some(missing) = seen.iter().position(|&s| !s) {
                return Err(Error::Invalid(format!(
                    "block {missing} missing from the resolution"
                )));
            }
        }
        Ok(GroupedDesign {
            v,
            kind,
            block_size,
            groups,
            holes,
            resolution,
            blocks,
            provenance,
        })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn block_size(&self) -> u32 {
        self.block_size
    }

    pub fn groups(&self) -> &[Vec<PointId>] {
        &self.groups
    }

    pub fn holes(&self) -> Option<&[Vec<PointId>]> {
        self.holes.as_deref()
    }

    pub fn resolution(&self) -> Option<&[Vec<u32>]> {
        self.resolution.as_deref()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Replaces the provenance record, leaving the design itself untouched.
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn signature(&self) -> TypeSignature {
        signature_of(self)
    }

    /// Hole sizes as a signature, when holes are present (used to match DGDD
    /// requests that share a group signature but differ in hole profile).
    pub fn hole_signature(&self) -> Option<TypeSignature> {
        self.holes
            .as_ref()
            .map(|hs| TypeSignature::new(hs.iter().map(|h| (h.len() as u32, 1))))
    }

    /// For each point, the index of its group.
    pub fn group_index_of_points(&self) -> Vec<u32> {
        index_of_points(self.v, &self.groups)
    }

    /// For each point, the index of its hole (DGDD only).
    pub fn hole_index_of_points(&self) -> Option<Vec<u32>> {
        self.holes.as_ref().map(|h| index_of_points(self.v, h))
    }

    /// Lexicographically sorted copy of the block list: the canonical view
    /// for equality of design content regardless of generation order.
    pub fn canonical_blocks(&self) -> Vec<Block> {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable();
        blocks
    }

    /// Content equality: same points, kind, block size, group and hole
    /// partitions (as sets of classes), and the same block multiset.
    /// Provenance and generation order are ignored.
    pub fn canonical_eq(&self, other: &GroupedDesign) -> bool {
        fn sorted_classes(classes: &[Vec<PointId>]) -> Vec<Vec<PointId>> {
            let mut cs = classes.to_vec();
            cs.sort_unstable();
            cs
        }
        self.v == other.v
            && self.kind == other.kind
            && self.block_size == other.block_size
            && sorted_classes(&self.groups) == sorted_classes(&other.groups)
            && self.holes.as_deref().map(sorted_classes)
                == other.holes.as_deref().map(sorted_classes)
            && self.canonical_blocks() == other.canonical_blocks()
    }

    /// Serializes to the canonical text format.
    ///
    /// Header lines `v=`, `kind=`, `k=`, `groups=`, optional `holes=`,
    /// optional `resolution=`, `provenance=`; then one block per line as
    /// comma-separated point ids.  Partition classes are semicolon-separated
    /// comma-lists.  The encoding is bit-exact under a parse/serialize
    /// round-trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("v={}\n", self.v));
        out.push_str(&format!("kind={}\n", self.kind));
        out.push_str(&format!("k={}\n", self.block_size));
        out.push_str(&format!("groups={}\n", classes_to_text(&self.groups)));
        if let Some(holes) = &self.holes {
            out.push_str(&format!("holes={}\n", classes_to_text(holes)));
        }
        if let Some(res) = &self.resolution {
            out.push_str(&format!("resolution={}\n", classes_to_text(res)));
        }
        out.push_str(&format!("provenance={}\n", self.provenance));
        for block in &self.blocks {
            out.push_str(&format!("{block}\n"));
        }
        out
    }

    /// Parses the canonical text format.  Classes within `groups=` / `holes=`
    /// may be listed in any order (they are normalized to sorted point
    /// lists), but block lines must already be strictly increasing.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut v: Option<u32> = None;
        let mut kind: Option<DesignKind> = None;
        let mut k: Option<u32> = None;
        let mut groups: Option<Vec<Vec<u32>>> = None;
        let mut holes: Option<Vec<Vec<u32>>> = None;
        let mut resolution: Option<Vec<Vec<u32>>> = None;
        let mut provenance: Option<Provenance> = None;
        let mut blocks = Vec::new();
        let mut in_header = true;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let header_field = in_header
                .then(|| line.split_once('='))
                .flatten()
                .filter(|(key, _)| {
                    matches!(
                        *key,
                        "v" | "kind" | "k" | "groups" | "holes" | "resolution" | "provenance"
                    )
                });
            match header_field {
                Some((key, value)) => match key {
                    "v" => {
                        v = Some(value.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad v", lineno + 1))
                        })?)
                    }
                    "kind" => kind = Some(DesignKind::parse(value)?),
                    "k" => {
                        k = Some(value.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad k", lineno + 1))
                        })?)
                    }
                    "groups" => groups = Some(classes_from_text(value)?),
                    "holes" => holes = Some(classes_from_text(value)?),
                    "resolution" => resolution = Some(classes_from_text(value)?),
                    "provenance" => provenance = Some(Provenance::parse(value)?),
                    _ => unreachable!(),
                },
                None => {
                    in_header = false;
                    let points: Vec<u32> = line
                        .split(',')
                        .map(|t| {
                            t.parse().map_err(|_| {
                                Error::Parse(format!("line {}: bad block point {t:?}", lineno + 1))
                            })
                        })
                        .collect::<Result<_>>()?;
                    blocks.push(Block::from_sorted(points).map_err(|e| {
                        Error::Parse(format!("line {}: {e}", lineno + 1))
                    })?);
                }
            }
        }
        let v = v.ok_or_else(|| Error::Parse("missing v= header".into()))?;
        let kind = kind.ok_or_else(|| Error::Parse("missing kind= header".into()))?;
        let k = k.ok_or_else(|| Error::Parse("missing k= header".into()))?;
        let groups = groups.ok_or_else(|| Error::Parse("missing groups= header".into()))?;
        let provenance =
            provenance.ok_or_else(|| Error::Parse("missing provenance= header".into()))?;
        GroupedDesign::new(v, kind, k, groups, holes, resolution, blocks, provenance)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn classes_to_text<T: fmt::Display>(classes: &[Vec<T>]) -> String {
    classes
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn classes_from_text(text: &str) -> Result<Vec<Vec<u32>>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|class| {
            class
                .split(',')
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad point id {t:?}")))
                })
                .collect()
        })
        .collect()
}

/// Checks that `classes` partition `0..v`; returns the classes with each
/// class sorted (class order preserved).
fn validate_partition(v: u32, mut classes: Vec<Vec<PointId>>, what: &str) -> Result<Vec<Vec<PointId>>> {
    let mut seen = vec![false; v as usize];
    for class in &mut classes {
        if class.is_empty() {
            return Err(Error::Invalid(format!("{what}: empty class")));
        }
        class.sort_unstable();
        for &p in class.iter() {
            if p >= v {
                return Err(Error::Invalid(format!("{what}: point {p} >= v = {v}")));
            }
            if seen[p as usize] {
                return Err(Error::Invalid(format!(
                    "{what}: point {p} appears in two classes"
                )));
            }
            seen[p as usize] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Invalid(format!(
            "{what}: point {missing} not covered"
        )));
    }
    Ok(classes)
}

fn index_of_points(v: u32, classes: &[Vec<PointId>]) -> Vec<u32> {
    let mut idx = vec![0u32; v as usize];
    for (i, class) in classes.iter().enumerate() {
        for &p in class {
            idx[p as usize] = i as u32;
        }
    }
    idx
}

/// How a design came to be: the finite, acyclic record attached to every
/// design value and serialized on its `provenance=` line.
///
/// The textual form is a single-line expression:
///
/// ```text
/// appendix(39^8 120^1)
/// field-construction(td k=4 q=13)
/// exact-cover(seed=7)
/// theorem(fill-groups g=13 [appendix(39^8 120^1); field-construction(td k=4 q=13)])
/// imported(/path/to/file)
/// ```
///
/// Appendix entry names and imported paths may contain any characters except
/// parentheses and square brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Expanded from a named catalogue entry.
    Appendix { name: String },
    /// Built by a deterministic algebraic operation (finite field based or
    /// derived from one) fully described by its parameters.
    FieldConstruction { op: String, params: Vec<(String, u64)> },
    /// Found by the exact-cover solver with the given seed.
    ExactCover { seed: u64 },
    /// Produced by a named construction from ingredient designs.
    Theorem {
        name: String,
        params: Vec<(String, u64)>,
        ingredients: Vec<Provenance>,
    },
    /// Loaded from an externally supplied file.
    Imported { path: String },
}

impl Provenance {
    pub fn field(op: &str, params: &[(&str, u64)]) -> Self {
        Provenance::FieldConstruction {
            op: op.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn theorem(name: &str, params: &[(&str, u64)], ingredients: Vec<Provenance>) -> Self {
        Provenance::Theorem {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            ingredients,
        }
    }

    /// The coarse source class, used by the registry's preference order.
    pub fn source_class(&self) -> SourceClass {
        match self {
            Provenance::Appendix { .. } => SourceClass::Appendix,
            Provenance::FieldConstruction { .. } => SourceClass::Algebra,
            Provenance::Theorem { .. } => SourceClass::Theorem,
            Provenance::ExactCover { .. } => SourceClass::Search,
            Provenance::Imported { .. } => SourceClass::Import,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (node, rest) = parse_provenance(text.trim())?;
        if !rest.is_empty() {
            return Err(Error::Parse(format!(
                "trailing text after provenance expression: {rest:?}"
            )));
        }
        Ok(node)
    }
}

/// Source classes in registry preference order (most preferred first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceClass {
    Appendix,
    Algebra,
    Theorem,
    Search,
    Import,
}

impl SourceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceClass::Appendix => "appendix",
            SourceClass::Algebra => "algebra",
            SourceClass::Theorem => "theorem",
            SourceClass::Search => "search",
            SourceClass::Import => "import",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "appendix" => Ok(SourceClass::Appendix),
            "algebra" => Ok(SourceClass::Algebra),
            "theorem" => Ok(SourceClass::Theorem),
            "search" => Ok(SourceClass::Search),
            "import" => Ok(SourceClass::Import),
            other => Err(Error::Parse(format!("unknown source class {other:?}"))),
        }
    }
}

impl fmt::Display for SourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn params(f: &mut fmt::Formatter<'_>, params: &[(String, u64)]) -> fmt::Result {
            for (k, v) in params {
                write!(f, " {k}={v}")?;
            }
            Ok(())
        }
        match self {
            Provenance::Appendix { name } => write!(f, "appendix({name})"),
            Provenance::FieldConstruction { op, params: ps } => {
                write!(f, "field-construction({op}")?;
                params(f, ps)?;
                write!(f, ")")
            }
            Provenance::ExactCover { seed } => write!(f, "exact-cover(seed={seed})"),
            Provenance::Theorem {
                name,
                params: ps,
                ingredients,
            } => {
                write!(f, "theorem({name}")?;
                params(f, ps)?;
                if !ingredients.is_empty() {
                    write!(f, " [")?;
                    for (i, ing) in ingredients.iter().enumerate() {
                        if i > 0 {
                            write!(f, "; ")?;
                        }
                        write!(f, "{ing}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, ")")
            }
            Provenance::Imported { path } => write!(f, "imported({path})"),
        }
    }
}

/// Recursive-descent parser for provenance expressions.  Returns the parsed
/// node and the unconsumed remainder.
fn parse_provenance(text: &str) -> Result<(Provenance, &str)> {
    let open = text
        .find('(')
        .ok_or_else(|| Error::Parse(format!("provenance missing '(': {text:?}")))?;
    let head = &text[..open];
    let body_start = open + 1;
    // Find the matching close parenthesis, counting both bracket kinds.
    let mut depth = 1usize;
    let mut close = None;
    for (i, ch) in text[body_start..].char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    if ch != ')' {
                        return Err(Error::Parse(format!("mismatched ']' in {text:?}")));
                    }
                    close = Some(body_start + i);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close.ok_or_else(|| Error::Parse(format!("provenance missing ')': {text:?}")))?;
    let body = &text[body_start..close];
    let rest = &text[close + 1..];
    let node = match head {
        "appendix" => Provenance::Appendix {
            name: body.to_string(),
        },
        "imported" => Provenance::Imported {
            path: body.to_string(),
        },
        "exact-cover" => {
            let seed = body
                .strip_prefix("seed=")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad exact-cover body {body:?}")))?;
            Provenance::ExactCover { seed }
        }
        "field-construction" | "theorem" => {
            // body = name, then key=value params, then for theorem an
            // optional bracketed child list.
            let (flat, children_text) = match body.find('[') {
                Some(b) => {
                    if !body.ends_with(']') {
                        return Err(Error::Parse(format!("unterminated '[' in {body:?}")));
                    }
                    (&body[..b], Some(&body[b + 1..body.len() - 1]))
                }
                None => (body, None),
            };
            let mut tokens = flat.split_whitespace();
            let name = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing operation name in {body:?}")))?
                .to_string();
            let mut params = Vec::new();
            for token in tokens {
                let (k, v) = token
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad parameter {token:?}")))?;
                let v: u64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad parameter value {token:?}")))?;
                params.push((k.to_string(), v));
            }
            if head == "field-construction" {
                if children_text.is_some() {
                    return Err(Error::Parse(
                        "field-construction does not take an ingredient list".into(),
                    ));
                }
                Provenance::FieldConstruction { op: name, params }
            } else {
                let mut ingredients = Vec::new();
                if let Some(mut rest) = children_text {
                    loop {
                        rest = rest.trim_start();
                        if rest.is_empty() {
                            break;
                        }
                        let (child, after) = parse_provenance(rest)?;
                        ingredients.push(child);
                        let after = after.trim_start();
                        rest = match after.strip_prefix(';') {
                            Some(r) => r,
                            None if after.is_empty() => after,
                            None => {
                                return Err(Error::Parse(format!(
                                    "expected ';' between ingredients, found {after:?}"
                                )))
                            }
                        };
                    }
                }
                Provenance::Theorem {
                    name,
                    params,
                    ingredients,
                }
            }
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown provenance head {other:?}"
            )))
        }
    };
    Ok((node, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    #[test]
    fn block_sorts_and_rejects_repeats() {
        let b = Block::new(vec![3, 1, 2, 0]).unwrap();
        assert_eq!(b.points(), &[0, 1, 2, 3]);
        assert!(Block::new(vec![1, 1, 2, 3]).is_err());
        assert!(Block::from_sorted(vec![0, 2, 1, 3]).is_err());
        assert_eq!(b.pairs().count(), 6);
    }

    #[test]
    fn signature_canonicalizes() {
        // Equal sizes merge: 39^7 39^1 is the same multiset as 39^8.
        assert_eq!(sig("39^7 39^1"), sig("39^8"));
        // Descending by size.
        assert_eq!(
            sig("9^4 18^1 15^1").parts(),
            &[(18, 1), (15, 1), (9, 4)]
        );
        assert_eq!(sig("9^4 18^1 15^1").to_string(), "18^1 15^1 9^4");
        assert_eq!(sig("3^4").v(), 12);
        // Bare token means exponent 1.
        assert_eq!(sig("15 4^2"), sig("15^1 4^2"));
    }

    #[test]
    fn cross_pair_count_oracles() {
        // (69^2 - 4*81 - 324 - 225) / 2 = 1944.
        assert_eq!(cross_pair_count(&sig("9^4 18^1 15^1")), 1944);
        // (144 - 36) / 2 = 54.
        assert_eq!(cross_pair_count(&sig("3^4")), 54);
        // (64 - 16) / 2 = 24: a 4-GDD of type 2^4 would need 4 blocks.
        assert_eq!(cross_pair_count(&sig("2^4")), 24);
    }

    #[test]
    fn expected_block_count_oracles() {
        assert_eq!(expected_block_count(39, 8, 120).unwrap(), 13338);
        assert_eq!(expected_block_count(13, 12, 7).unwrap(), 2041);
        for g in [1u64, 3, 5, 7, 12] {
            assert_eq!(expected_block_count(g, 4, 0).unwrap(), g * g);
        }
        assert!(expected_block_count(2, 5, 0).is_err());
    }

    #[test]
    fn block_count_matches_cross_pairs() {
        // 6 * block count = cross pairs whenever both formulas apply.
        let cases = [(39u32, 8u32, 120u32), (13, 12, 7), (13, 24, 133), (15, 9, 0)];
        for (g, u, m) in cases {
            let sig = TypeSignature::new([(g, u), (m, 1)]);
            assert_eq!(
                cross_pair_count(&sig),
                6 * expected_block_count(g as u64, u as u64, m as u64).unwrap()
            );
        }
    }

    fn tiny_design() -> GroupedDesign {
        // The unique block on 4 points: type 1^4.
        GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            vec![vec![0], vec![1], vec![2], vec![3]],
            None,
            None,
            vec![Block::from_sorted(vec![0, 1, 2, 3]).unwrap()],
            Provenance::ExactCover { seed: 0 },
        )
        .unwrap()
    }

    #[test]
    fn partition_validation() {
        let bad_overlap = GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            vec![vec![0, 1], vec![1, 2, 3]],
            None,
            None,
            vec![],
            Provenance::ExactCover { seed: 0 },
        );
        assert!(bad_overlap.is_err());
        let bad_missing = GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            vec![vec![0, 1], vec![2]],
            None,
            None,
            vec![],
            Provenance::ExactCover { seed: 0 },
        );
        assert!(bad_missing.is_err());
    }

    #[test]
    fn signature_of_design() {
        assert_eq!(tiny_design().signature(), sig("1^4"));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let d = tiny_design();
        let text = d.to_text();
        let parsed = GroupedDesign::from_text(&text).unwrap();
        assert_eq!(parsed, d);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn provenance_round_trip() {
        let cases = [
            "appendix(39^8 120^1)",
            "field-construction(td k=4 q=13)",
            "exact-cover(seed=7)",
            "imported(/tmp/some file.design)",
            "theorem(transpose [field-construction(dgdd-rtd n=9)])",
            "theorem(fill-groups g=13 [appendix(39^8 120^1); field-construction(td k=4 q=13)])",
            "theorem(fundamental a=3 b=3 c=0 d=0 t=0 [field-construction(rtd k=5 q=9); exact-cover(seed=1); exact-cover(seed=2); exact-cover(seed=2)])",
            "theorem(inflate w=3 [theorem(macneish [field-construction(td k=4 q=3); field-construction(td k=4 q=4)]); appendix(13^9 10^1)])",
        ];
        for text in cases {
            let p = Provenance::parse(text).unwrap();
            assert_eq!(p.to_string(), text, "display differs for {text}");
            assert_eq!(Provenance::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn provenance_rejects_malformed() {
        for text in [
            "appendix(unclosed",
            "mystery(1)",
            "theorem(x [appendix(a) appendix(b)])",
            "exact-cover(seed=x)",
            "field-construction(td k=4 [appendix(a)])",
            "appendix(a) trailing",
        ] {
            assert!(Provenance::parse(text).is_err(), "accepted {text:?}");
        }
    }
}
