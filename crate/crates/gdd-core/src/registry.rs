//! Persistent, content-addressed storage of verified designs.
//!
//! Layout under the registry root:
//!
//! ```text
//! designs/<signature-slug>/<hash12>.design   one file per stored design
//! index.tsv                                  signature/kind/holes/source/path
//! ```
//!
//! Every design is exhaustively verified on `put`, and again on every load
//! (the latter can be disabled only through [`Registry::open_unverified`]).
//! Files are written to a temporary name and renamed into place, so readers
//! never observe partial writes.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::design::{DesignKind, GroupedDesign, Provenance, SourceClass, TypeSignature};
use crate::verify::verify;
use crate::{Error, Result};

/// Environment variable consulted by the CLI for a default registry path.
pub const REGISTRY_ENV: &str = "GDD_REGISTRY";

const INDEX_FILE: &str = "index.tsv";
const DESIGN_DIR: &str = "designs";

/// One line of the registry index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexEntry {
    pub signature: String,
    pub kind: DesignKind,
    pub holes: Option<String>,
    pub source: SourceClass,
    pub path: String,
}

pub struct Registry {
    root: PathBuf,
    verify_on_load: bool,
}

impl Registry {
    /// Opens (creating if needed) a registry rooted at `root`, with
    /// mandatory load-time verification.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        Self::open_inner(root.into(), true)
    }

    /// Opens a registry that skips re-verification when loading stored
    /// designs.  Only appropriate when the store is trusted byte-for-byte;
    /// anything `put` is still verified.
    pub fn open_unverified(root: impl Into<PathBuf>) -> Result<Self> {
        Self::open_inner(root.into(), false)
    }

    fn open_inner(root: PathBuf, verify_on_load: bool) -> Result<Self> {
        fs::create_dir_all(root.join(DESIGN_DIR))?;
        Ok(Registry { root, verify_on_load })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Stores a design, verifying it first.   Returns the storage path.
    /// Idempotent: identical canonical bytes land on the same file.
    pub fn put(&self, design: &GroupedDesign) -> Result<PathBuf> {
        let report = verify(design);
        if !report.passed {
            return Err(Error::FailedVerification(Box::new(report)));
        }
        let text = design.to_text();
        let hash12 = {
            let digest = Sha256::digest(text.as_bytes());
            let mut hex = String::with_capacity(12);
            for byte in &digest[..6] {
                hex.push_str(&format!("{byte:02x}"));
            }
            hex
        };
        let slug = slug_of(&design.signature().to_string());
        let rel = format!("{DESIGN_DIR}/{slug}/{hash12}.design");
        let path = self.root.join(&rel);
        fs::create_dir_all(path.parent().expect("design path has a parent"))?;
        if !path.exists() {
            write_atomic(&path, text.as_bytes())?;
        }
        let entry = IndexEntry {
            signature: design.signature().to_string(),
            kind: design.kind(),
            holes: design.hole_signature().map(|h| h.to_string()),
            source: design.provenance().source_class(),
            path: rel,
        };
        self.add_to_index(entry)?;
        Ok(path)
    }

    /// Looks up a design by signature, kind, and (for double GDDs) hole
    /// signature.  Among matches, sources are preferred in the order
    /// appendix, algebra, theorem, search, import; remaining ties go to the
    /// lexicographically smallest storage path.
    pub fn get(
        &self,
        signature: &TypeSignature,
        kind: DesignKind,
        holes: Option<&TypeSignature>,
    ) -> Result<Option<GroupedDesign>> {
        let sig_text = signature.to_string();
        let holes_text = holes.map(|h| h.to_string());
        let mut matches: Vec<IndexEntry> = self
            .list()?
            .into_iter()
            .filter(|e| e.signature == sig_text && e.kind == kind && e.holes == holes_text)
            .collect();
        matches.sort_by(|x, y| (x.source, &x.path).cmp(&(y.source, &y.path)));
        let Some(entry) = matches.into_iter().next() else {
            return Ok(None);
        };
        self.load(&entry).map(Some)
    }

    /// Loads the design behind an index entry, re-verifying unless the
    /// registry was opened unverified.
    pub fn load(&self, entry: &IndexEntry) -> Result<GroupedDesign> {
        let design = GroupedDesign::read_from(&self.root.join(&entry.path))?;
        if self.verify_on_load {
            let report = verify(&design);
            if !report.passed {
                return Err(Error::FailedVerification(Box::new(report)));
            }
        }
        Ok(design)
    }

    /// Parses, verifies, and stores an externally produced design file.
    /// The stored copy carries an imported-from provenance regardless of
    /// what the file claims.
    pub fn import(&self, path: &Path) -> Result<GroupedDesign> {
        let design = GroupedDesign::read_from(path)?.with_provenance(Provenance::Imported {
            path: path.display().to_string(),
        });
        self.put(&design)?;
        Ok(design)
    }

    /// Copies the stored bytes for the best match to `dest`.
    pub fn export(
        &self,
        signature: &TypeSignature,
        kind: DesignKind,
        holes: Option<&TypeSignature>,
        dest: &Path,
    ) -> Result<()> {
        let design = self.get(signature, kind, holes)?.ok_or_else(|| {
            Error::UnknownEntry(format!("no stored design of type {signature}"))
        })?;
        design.write_to(dest)
    }

    /// All index entries, in index-file order.
    pub fn list(&self) -> Result<Vec<IndexEntry>> {
        let path = self.root.join(INDEX_FILE);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(parse_index_line)
            .collect()
    }

    fn add_to_index(&self, entry: IndexEntry) -> Result<()> {
        let mut entries = self.list()?;
        if entries.iter().any(|e| e.path == entry.path) {
            return Ok(());
        }
        entries.push(entry);
        let mut text = String::new();
        for e in &entries {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.signature,
                e.kind.as_str(),
                e.holes.as_deref().unwrap_or("-"),
                e.source.as_str(),
                e.path
            ));
        }
        write_atomic(&self.root.join(INDEX_FILE), text.as_bytes())
    }
}

fn parse_index_line(line: &str) -> Result<IndexEntry> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [signature, kind, holes, source, path] = fields.as_slice() else {
        return Err(Error::Parse(format!("malformed index line: {line:?}")));
    };
    Ok(IndexEntry {
        signature: signature.to_string(),
        kind: DesignKind::parse(kind)?,
        holes: (*holes != "-").then(|| holes.to_string()),
        source: SourceClass::parse(source)?,
        path: path.to_string(),
    })
}

/// File-system slug for a signature: spaces become underscores.
fn slug_of(signature_text: &str) -> String {
    signature_text.replace(' ', "_")
}

/// Writes to a sibling temporary file, then renames into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().expect("target path has a parent");
    let tmp = dir.join(format!(
        ".tmp.{}.{}",
        std::process::id(),
        path.file_name().and_then(|n| n.to_str()).unwrap_or("file")
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::td;
    use crate::appendix::Catalogue;
    use crate::cover::{solve_signature, SolveOptions, SolveOutcome};
    use crate::design::Block;

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    #[test]
    fn put_get_roundtrip_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let design = Catalogue::builtin()
            .find_by_name("39^8 120^1")
            .unwrap()
            .expand()
            .unwrap();
        let path = registry.put(&design).unwrap();
        assert!(path.exists());
        let got = registry
            .get(&sig("39^8 120^1"), DesignKind::Gdd, None)
            .unwrap()
            .expect("stored design should be found");
        assert_eq!(got.to_text(), design.to_text());
        // Stored bytes match the canonical serialization.
        assert_eq!(fs::read_to_string(&path).unwrap(), design.to_text());
        // Fresh signature: miss.
        assert!(registry
            .get(&sig("9^8 30^1"), DesignKind::Gdd, None)
            .unwrap()
            .is_none());
    }

    #[test]
    fn put_rejects_non_verifying() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let good = td(4, 3).unwrap();
        let mut blocks: Vec<Block> = good.blocks().to_vec();
        blocks.pop();
        let bad = GroupedDesign::new(
            good.v(),
            good.kind(),
            4,
            good.groups().to_vec(),
            None,
            None,
            blocks,
            good.provenance().clone(),
        )
        .unwrap();
        assert!(matches!(
            registry.put(&bad),
            Err(Error::FailedVerification(_))
        ));
        assert!(registry.list().unwrap().is_empty());
    }

    #[test]
    fn preference_order_prefers_algebra_over_search() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let solved = match solve_signature(&sig("3^4"), None, &SolveOptions::default()).unwrap() {
            SolveOutcome::Solved(d) => d,
            other => panic!("expected a design, got {other:?}"),
        };
        registry.put(&solved).unwrap();
        registry.put(&td(4, 3).unwrap()).unwrap();
        // Both entries are type 3^4, but only one is kind TD.
        let got = registry.get(&sig("3^4"), DesignKind::Td, None).unwrap().unwrap();
        assert_eq!(got.provenance().source_class(), SourceClass::Algebra);
        let got = registry.get(&sig("3^4"), DesignKind::Gdd, None).unwrap().unwrap();
        assert_eq!(got.provenance().source_class(), SourceClass::Search);
        assert_eq!(registry.list().unwrap().len(), 2);
    }

    #[test]
    fn load_time_verification_catches_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let design = td(4, 3).unwrap();
        let path = registry.put(&design).unwrap();
        // Corrupt one block line: swap a block for a duplicate of another.
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let block_line = *lines.last().unwrap();
        let corrupted = text.replacen(block_line, lines[lines.len() - 2], 1);
        fs::write(&path, corrupted).unwrap();
        assert!(matches!(
            registry.get(&sig("3^4"), DesignKind::Td, None),
            Err(Error::FailedVerification(_))
        ));
        // The unsafe switch skips re-verification and surfaces the bytes.
        let unsafe_registry = Registry::open_unverified(dir.path()).unwrap();
        assert!(unsafe_registry
            .get(&sig("3^4"), DesignKind::Td, None)
            .unwrap()
            .is_some());
    }

    #[test]
    fn import_rewrites_provenance_and_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let design = td(4, 5).unwrap();
        let external = dir.path().join("external.design");
        design.write_to(&external).unwrap();
        let imported = registry.import(&external).unwrap();
        assert!(matches!(
            imported.provenance(),
            Provenance::Imported { .. }
        ));
        let got = registry.get(&sig("5^4"), DesignKind::Td, None).unwrap().unwrap();
        assert_eq!(got.provenance().source_class(), SourceClass::Import);

        // A design file whose blocks do not cover all pairs is rejected.
        let mut blocks: Vec<Block> = design.blocks().to_vec();
        blocks.swap_remove(0);
        let bad = GroupedDesign::new(
            design.v(),
            design.kind(),
            4,
            design.groups().to_vec(),
            None,
            None,
            blocks,
            design.provenance().clone(),
        )
        .unwrap();
        let bad_path = dir.path().join("bad.design");
        bad.write_to(&bad_path).unwrap();
        assert!(matches!(
            registry.import(&bad_path),
            Err(Error::FailedVerification(_))
        ));
    }

    #[test]
    fn export_copies_canonical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let design = td(4, 4).unwrap();
        registry.put(&design).unwrap();
        let dest = dir.path().join("out.design");
        registry
            .export(&sig("4^4"), DesignKind::Td, None, &dest)
            .unwrap();
        assert_eq!(fs::read_to_string(&dest).unwrap(), design.to_text());
        assert!(registry
            .export(&sig("7^4"), DesignKind::Td, None, &dest)
            .is_err());
    }

    #[test]
    fn hole_signature_disambiguates() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let dgdd = crate::derived::rtd_to_dgdd(9).unwrap();
        registry.put(&dgdd).unwrap();
        let hit = registry
            .get(&sig("9^4"), DesignKind::Dgdd, Some(&sig("4^9")))
            .unwrap();
        assert!(hit.is_some());
        let miss = registry
            .get(&sig("9^4"), DesignKind::Dgdd, Some(&sig("9^4")))
            .unwrap();
        assert!(miss.is_none());
        // A plain-GDD request does not surface the double GDD.
        assert!(registry.get(&sig("9^4"), DesignKind::Gdd, None).unwrap().is_none());
    }
}
