//! Exhaustive certification of design axioms by pair accounting.
//!
//! This module is the trust anchor of the crate: nothing downstream believes
//! a design is correct because of how it was built.  Every design is checked
//! against the defining conditions directly — each pair of points from
//! distinct groups (and, for designs with holes, distinct holes) must occur
//! in exactly one block, and no forbidden pair may occur at all.

use crate::design::{DesignKind, GroupedDesign};

/// A single broken axiom, with enough context to locate it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A required pair appears in two (or more) blocks; one extra report per
    /// excess coverage.
    PairCoveredTwice { p: u32, q: u32, first_block: u32, second_block: u32 },
    /// A required pair appears in no block.
    PairUncovered { p: u32, q: u32 },
    /// A block contains two points of the same group.
    SameGroupPair { p: u32, q: u32, block: u32 },
    /// A block contains two points of the same hole.
    SameHolePair { p: u32, q: u32, block: u32 },
    /// A block or the design's group profile has the wrong shape for its
    /// declared kind.
    BadBlockShape { detail: String },
    /// A parallel class does not contain each point exactly once.
    BadResolution { class: u32, point: u32, occurrences: u32 },
    /// A group/hole intersection differs from the declared profile.
    HoleProfile { group: u32, hole: u32, expected: u32, got: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PairCoveredTwice { p, q, first_block, second_block } => write!(
                f,
                "pair ({p},{q}) covered by blocks {first_block} and {second_block}"
            ),
            Violation::PairUncovered { p, q } => write!(f, "pair ({p},{q}) uncovered"),
            Violation::SameGroupPair { p, q, block } => {
                write!(f, "same-group pair ({p},{q}) in block {block}")
            }
            Violation::SameHolePair { p, q, block } => {
                write!(f, "same-hole pair ({p},{q}) in block {block}")
            }
            Violation::BadBlockShape { detail } => write!(f, "bad shape: {detail}"),
            Violation::BadResolution { class, point, occurrences } => write!(
                f,
                "resolution class {class} contains point {point} {occurrences} times"
            ),
            Violation::HoleProfile { group, hole, expected, got } => write!(
                f,
                "group {group} meets hole {hole} in {got} points, expected {expected}"
            ),
        }
    }
}

/// Outcome of a verification run.  At most [`MAX_RECORDED_VIOLATIONS`]
/// violations are materialized; the total count is always exact.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    /// True when more violations occurred than were recorded.
    pub truncated: bool,
    /// Exact number of violations, recorded or not.
    pub total_violations: u64,
    pub blocks_checked: u64,
    pub pairs_required: u64,
}

pub const MAX_RECORDED_VIOLATIONS: usize = 1000;

impl VerificationReport {
    pub fn summary(&self) -> String {
        if self.passed {
            format!(
                "passed: {} blocks, {} required pairs each covered exactly once",
                self.blocks_checked, self.pairs_required
            )
        } else {
            let first = self
                .violations
                .first()
                .map(|v| v.to_string())
                .unwrap_or_default();
            format!(
                "FAILED: {} violations ({} blocks, {} required pairs); first: {}",
                self.total_violations, self.blocks_checked, self.pairs_required, first
            )
        }
    }
}

struct Recorder {
    violations: Vec<Violation>,
    total: u64,
}

impl Recorder {
    fn new() -> Self {
        Recorder { violations: Vec::new(), total: 0 }
    }

    fn push(&mut self, v: Violation) {
        self.total += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    fn into_report(self, blocks_checked: u64, pairs_required: u64) -> VerificationReport {
        VerificationReport {
            passed: self.total == 0,
            truncated: self.total > self.violations.len() as u64,
            total_violations: self.total,
            violations: self.violations,
            blocks_checked,
            pairs_required,
        }
    }
}

#[inline]
fn pair_index(p: u32, q: u32) -> usize {
    // p < q; dense triangular index.
    (q as usize * (q as usize - 1)) / 2 + p as usize
}

/// Certifies a design against the axioms of its kind.
///
/// For every unordered pair of points: pairs within a group (or within a
/// hole, for hole-carrying designs) must appear in no block; all other pairs
/// in exactly one block.  A TD must additionally have exactly `block_size`
/// groups of equal size, and a resolvable design's parallel classes must
/// each contain every point exactly once.
pub fn verify(design: &GroupedDesign) -> VerificationReport {
    let v = design.v();
    let mut rec = Recorder::new();

    if design.kind() == DesignKind::Td {
        let sizes: Vec<usize> = design.groups().iter().map(|g| g.len()).collect();
        let uniform = sizes.windows(2).all(|w| w[0] == w[1]);
        if !uniform || sizes.len() != design.block_size() as usize {
            rec.push(Violation::BadBlockShape {
                detail: format!(
                    "TD must have block_size = {} equal groups, found sizes {sizes:?}",
                    design.block_size()
                ),
            });
        }
    }

    let group_of = design.group_index_of_points();
    let hole_of = design.hole_index_of_points();

    let pair_slots = (v as usize * (v as usize).saturating_sub(1)) / 2;
    // Saturating 8-bit coverage counters; any value >= 2 is already a
    // violation, so saturation loses nothing.
    let mut count = vec![0u8; pair_slots];
    let mut first_cover = vec![u32::MAX; pair_slots];

    for (bi, block) in design.blocks().iter().enumerate() {
        let bi32 = bi as u32;
        if block.len() != design.block_size() as usize {
            rec.push(Violation::BadBlockShape {
                detail: format!("block {bi} has {} points", block.len()),
            });
            continue;
        }
        for (p, q) in block.pairs() {
            if group_of[p as usize] == group_of[q as usize] {
                rec.push(Violation::SameGroupPair { p, q, block: bi32 });
                continue;
            }
            if let Some(hole_of) = &hole_of {
                if hole_of[p as usize] == hole_of[q as usize] {
                    rec.push(Violation::SameHolePair { p, q, block: bi32 });
                    continue;
                }
            }
            let idx = pair_index(p, q);
            match count[idx] {
                0 => {
                    count[idx] = 1;
                    first_cover[idx] = bi32;
                }
                c => {
                    count[idx] = c.saturating_add(1);
                    rec.push(Violation::PairCoveredTwice {
                        p,
                        q,
                        first_block: first_cover[idx],
                        second_block: bi32,
                    });
                }
            }
        }
    }

    let mut pairs_required: u64 = 0;
    for q in 1..v {
        for p in 0..q {
            let required = group_of[p as usize] != group_of[q as usize]
                && hole_of
                    .as_ref()
                    .map_or(true, |h| h[p as usize] != h[q as usize]);
            if required {
                pairs_required += 1;
                if count[pair_index(p, q)] == 0 {
                    rec.push(Violation::PairUncovered { p, q });
                }
            }
        }
    }

    if let Some(classes) = design.resolution() {
        let mut seen = vec![0u32; v as usize];
        for (ci, class) in classes.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = 0);
            for &b in class {
                if let Some(block) = design.blocks().get(b as usize) {
                    for &p in block.points() {
                        seen[p as usize] += 1;
                    }
                }
            }
            for (p, &occ) in seen.iter().enumerate() {
                if occ != 1 {
                    rec.push(Violation::BadResolution {
                        class: ci as u32,
                        point: p as u32,
                        occurrences: occ,
                    });
                }
            }
        }
    }

    rec.into_report(design.blocks().len() as u64, pairs_required)
}

/// Certifies a hole-carrying design whose groups must each meet every hole in
/// a prescribed number of points (`h_per_group[i]` points of group `i` in
/// each hole), then runs the full pair verification.
pub fn verify_dgdd_profile(design: &GroupedDesign, h_per_group: &[u32]) -> VerificationReport {
    let mut rec = Recorder::new();
    match design.holes() {
        None => {
            rec.push(Violation::BadBlockShape {
                detail: "design has no holes to profile".to_string(),
            });
            return rec.into_report(design.blocks().len() as u64, 0);
        }
        Some(holes) => {
            if h_per_group.len() != design.groups().len() {
                rec.push(Violation::BadBlockShape {
                    detail: format!(
                        "profile lists {} groups, design has {}",
                        h_per_group.len(),
                        design.groups().len()
                    ),
                });
            } else {
                let hole_of = design.hole_index_of_points().unwrap();
                for (gi, group) in design.groups().iter().enumerate() {
                    let mut meet = vec![0u32; holes.len()];
                    for &p in group {
                        meet[hole_of[p as usize] as usize] += 1;
                    }
                    for (hi, &got) in meet.iter().enumerate() {
                        if got != h_per_group[gi] {
                            rec.push(Violation::HoleProfile {
                                group: gi as u32,
                                hole: hi as u32,
                                expected: h_per_group[gi],
                                got,
                            });
                        }
                    }
                }
            }
        }
    }
    let mut report = verify(design);
    if rec.total > 0 {
        let mut all = rec.violations;
        all.extend(report.violations);
        all.truncate(MAX_RECORDED_VIOLATIONS);
        report.total_violations += rec.total;
        report.truncated = report.total_violations > all.len() as u64;
        report.violations = all;
        report.passed = false;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Block, DesignKind, GroupedDesign, Provenance};

    fn prov() -> Provenance {
        Provenance::ExactCover { seed: 0 }
    }

    fn one_block_design() -> GroupedDesign {
        GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            vec![vec![0], vec![1], vec![2], vec![3]],
            None,
            None,
            vec![Block::from_sorted(vec![0, 1, 2, 3]).unwrap()],
            prov(),
        )
        .unwrap()
    }

    #[test]
    fn minimal_design_passes() {
        let report = verify(&one_block_design());
        assert!(report.passed, "{}", report.summary());
        assert_eq!(report.pairs_required, 6);
    }

    #[test]
    fn duplicated_block_gives_six_double_covers() {
        let d = one_block_design();
        let doubled = GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            d.groups().to_vec(),
            None,
            None,
            vec![d.blocks()[0].clone(), d.blocks()[0].clone()],
            prov(),
        )
        .unwrap();
        let report = verify(&doubled);
        assert!(!report.passed);
        assert_eq!(report.total_violations, 6);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::PairCoveredTwice { .. })));
    }

    #[test]
    fn missing_blocks_give_uncovered_pairs() {
        let empty = GroupedDesign::new(
            4,
            DesignKind::Gdd,
            4,
            vec![vec![0], vec![1], vec![2], vec![3]],
            None,
            None,
            vec![],
            prov(),
        )
        .unwrap();
        let report = verify(&empty);
        assert_eq!(report.total_violations, 6);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::PairUncovered { .. })));
    }

    #[test]
    fn same_group_pair_detected() {
        let d = GroupedDesign::new(
            5,
            DesignKind::Gdd,
            4,
            vec![vec![0, 4], vec![1], vec![2], vec![3]],
            None,
            None,
            vec![
                Block::from_sorted(vec![0, 1, 2, 3]).unwrap(),
                Block::from_sorted(vec![1, 2, 3, 4]).unwrap(),
            ],
            prov(),
        )
        .unwrap();
        let report = verify(&d);
        assert!(!report.passed);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PairCoveredTwice { .. })));
    }

    #[test]
    fn dgdd_rules_enforced() {
        // 6 points in a 3x2 grid: 3 groups (columns), 2 holes (rows);
        // required pairs differ in both coordinates. Block size 2.
        let groups = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        let holes = vec![vec![0, 2, 4], vec![1, 3, 5]];
        let blocks: Vec<Block> = [[0u32, 3], [0, 5], [1, 2], [1, 4], [2, 5], [3, 4]]
            .iter()
            .map(|p| Block::from_sorted(p.to_vec()).unwrap())
            .collect();
        let d = GroupedDesign::new(
            6,
            DesignKind::Dgdd,
            2,
            groups.clone(),
            Some(holes.clone()),
            None,
            blocks,
            prov(),
        )
        .unwrap();
        let report = verify(&d);
        assert!(report.passed, "{}", report.summary());
        assert_eq!(report.pairs_required, 6);

        let profile = verify_dgdd_profile(&d, &[1, 1, 1]);
        assert!(profile.passed);
        let bad_profile = verify_dgdd_profile(&d, &[2, 1, 1]);
        assert!(!bad_profile.passed);

        // A same-hole pair is forbidden even across groups.
        let with_bad = GroupedDesign::new(
            6,
            DesignKind::Dgdd,
            2,
            groups,
            Some(holes),
            None,
            vec![Block::from_sorted(vec![0, 2]).unwrap()],
            prov(),
        )
        .unwrap();
        let report = verify(&with_bad);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SameHolePair { .. })));
    }

    #[test]
    fn resolution_checked() {
        // TD(2,2) with its 1-factorization.
        let blocks: Vec<Block> = [[0u32, 2], [1, 3], [0, 3], [1, 2]]
            .iter()
            .map(|p| Block::from_sorted(p.to_vec()).unwrap())
            .collect();
        let good = GroupedDesign::new(
            4,
            DesignKind::Rgdd,
            2,
            vec![vec![0, 1], vec![2, 3]],
            None,
            Some(vec![vec![0, 1], vec![2, 3]]),
            blocks.clone(),
            prov(),
        )
        .unwrap();
        assert!(verify(&good).passed);

        // Swapping one block between classes breaks both classes.
        let bad = GroupedDesign::new(
            4,
            DesignKind::Rgdd,
            2,
            vec![vec![0, 1], vec![2, 3]],
            None,
            Some(vec![vec![0, 2], vec![1, 3]]),
            blocks,
            prov(),
        )
        .unwrap();
        let report = verify(&bad);
        assert!(!report.passed);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BadResolution { .. })));
    }

    #[test]
    fn td_group_profile_checked() {
        let d = GroupedDesign::new(
            4,
            DesignKind::Td,
            2,
            vec![vec![0], vec![1], vec![2, 3]],
            None,
            None,
            vec![],
            prov(),
        )
        .unwrap();
        let report = verify(&d);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BadBlockShape { .. })));
    }
}
