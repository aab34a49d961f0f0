//! Ingredient designs derived from the algebraic ones: grid-profile DGDDs
//! obtained from resolvable transversal designs, partition transposition,
//! and pointwise weighting (inflation).

use crate::algebra::{rtd, td};
use crate::design::{Block, DesignKind, GroupedDesign, Provenance};
use crate::{Error, Result};

/// Builds the hole-carrying design of type `(n, 1^n)^4`: an RTD(4, n) with
/// one parallel class removed, the removed blocks becoming the holes.
///
/// Points are relabeled so that the holes form the canonical grid — hole `h`
/// is `{h, n+h, 2n+h, 3n+h}` — which downstream overlay constructions rely
/// on.  `n = 6` is rejected: no such design exists even though the type
/// arithmetic works out.
pub fn rtd_to_dgdd(n: u32) -> Result<GroupedDesign> {
    if n == 6 {
        return Err(Error::Precondition(
            "no design of type (6, 1^6)^4 exists".into(),
        ));
    }
    let resolvable = rtd(4, n)?;
    let classes = resolvable.resolution().expect("rtd always resolves");

    // Removed class: index 0.  Its block containing group-0 point `h`
    // becomes hole `h`; relabel every point to (its group) * n + (its hole).
    let mut relabel = vec![u32::MAX; (4 * n) as usize];
    for &bi in &classes[0] {
        let block = &resolvable.blocks()[bi as usize];
        let h = block.points()[0]; // sorted, so the group-0 point is first
        for (i, &p) in block.points().iter().enumerate() {
            relabel[p as usize] = i as u32 * n + h;
        }
    }

    let keep: Vec<bool> = {
        let mut keep = vec![true; resolvable.blocks().len()];
        for &bi in &classes[0] {
            keep[bi as usize] = false;
        }
        keep
    };
    let blocks: Vec<Block> = resolvable
        .blocks()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(block, _)| {
            Block::new(block.points().iter().map(|&p| relabel[p as usize]).collect())
        })
        .collect::<Result<_>>()?;

    let groups: Vec<Vec<u32>> = (0..4).map(|i| (i * n..(i + 1) * n).collect()).collect();
    let holes: Vec<Vec<u32>> = (0..n).map(|h| (0..4).map(|i| i * n + h).collect()).collect();
    GroupedDesign::new(
        4 * n,
        DesignKind::Dgdd,
        4,
        groups,
        Some(holes),
        None,
        blocks,
        Provenance::field("dgdd-rtd", &[("n", n as u64)]),
    )
}

/// Swaps the group and hole partitions of a grid-profile hole-carrying
/// design: type `(g, 1^g)^u` becomes `(u, 1^u)^g`.  The block set is
/// untouched — the defining conditions are symmetric in the two partitions
/// when every group meets every hole in exactly one point.
pub fn dgdd_transpose(design: &GroupedDesign) -> Result<GroupedDesign> {
    let holes = design
        .holes()
        .ok_or_else(|| Error::Precondition("transpose requires a design with holes".into()))?;
    let hole_of = design.hole_index_of_points().unwrap();
    for (gi, group) in design.groups().iter().enumerate() {
        let mut met = vec![0u32; holes.len()];
        for &p in group {
            met[hole_of[p as usize] as usize] += 1;
        }
        if met.iter().any(|&c| c != 1) {
            return Err(Error::Precondition(format!(
                "group {gi} does not meet every hole exactly once; not a grid profile"
            )));
        }
    }
    GroupedDesign::new(
        design.v(),
        DesignKind::Dgdd,
        design.block_size(),
        holes.to_vec(),
        Some(design.groups().to_vec()),
        None,
        design.blocks().to_vec(),
        Provenance::theorem("transpose", &[], vec![design.provenance().clone()]),
    )
}

/// Inflates every point of a design by `w`, overlaying each inflated block
/// with a TD whose block size matches: type `g^u m^1` becomes
/// `(wg)^u (wm)^1`, and a hole-carrying `(n, 1^n)^t` becomes
/// `(wn, w^n)^t`.  Point `p` becomes the `w` points `p*w .. (p+1)*w`, and
/// the overlay's group `i` is applied to the block's `i`-th point.
///
/// `w = 1` returns the design unchanged.  The overlay must be a TD with
/// `block_size` groups laid out contiguously (as [`crate::algebra::td`]
/// builds them).
pub fn weight_design(
    design: &GroupedDesign,
    w: u32,
    overlay: &GroupedDesign,
) -> Result<GroupedDesign> {
    if w == 1 {
        return Ok(design.clone());
    }
    if design.resolution().is_some() {
        return Err(Error::Precondition(
            "weighting does not preserve a resolution".into(),
        ));
    }
    let k = design.block_size();
    if overlay.kind() != DesignKind::Td
        || overlay.block_size() != k
        || overlay.groups().len() != k as usize
    {
        return Err(Error::Precondition(format!(
            "overlay must be a TD with block size and group count {k}"
        )));
    }
    for (i, group) in overlay.groups().iter().enumerate() {
        let expected: Vec<u32> = (i as u32 * w..(i as u32 + 1) * w).collect();
        if group != &expected {
            return Err(Error::Precondition(
                "overlay groups must be the contiguous ranges [i*w, (i+1)*w)".into(),
            ));
        }
    }

    let inflate_classes = |classes: &[Vec<u32>]| -> Vec<Vec<u32>> {
        classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .flat_map(|&p| p * w..(p + 1) * w)
                    .collect()
            })
            .collect()
    };

    let mut blocks = Vec::with_capacity(design.blocks().len() * overlay.blocks().len());
    for block in design.blocks() {
        for tdblock in overlay.blocks() {
            let points: Vec<u32> = block
                .points()
                .iter()
                .zip(tdblock.points())
                .enumerate()
                .map(|(i, (&p, &o))| p * w + (o - i as u32 * w))
                .collect();
            blocks.push(Block::new(points)?);
        }
    }

    GroupedDesign::new(
        design.v() * w,
        design.kind(),
        k,
        inflate_classes(design.groups()),
        design.holes().map(inflate_classes),
        None,
        blocks,
        Provenance::theorem(
            "inflate",
            &[("w", w as u64)],
            vec![overlay.provenance().clone(), design.provenance().clone()],
        ),
    )
}

/// Convenience wrapper: inflate by `w` using the standard field-built
/// overlay TD.  Fails when no TD(k, w) is constructible from a single field
/// (composite `w` callers should build the overlay via the product
/// construction and call [`weight_design`]).
pub fn weight_by(design: &GroupedDesign, w: u32) -> Result<GroupedDesign> {
    if w == 1 {
        return Ok(design.clone());
    }
    let overlay = td(design.block_size(), w)?;
    weight_design(design, w, &overlay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appendix::{expand_entry, Catalogue};
    use crate::design::TypeSignature;
    use crate::verify::{verify, verify_dgdd_profile};

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    #[test]
    fn grid_dgdd_from_rtd() {
        let d = rtd_to_dgdd(9).unwrap();
        assert_eq!(d.blocks().len(), 72);
        assert_eq!(d.signature(), sig("9^4"));
        assert_eq!(d.hole_signature().unwrap(), sig("4^9"));
        // Holes form the canonical grid.
        assert_eq!(d.holes().unwrap()[3], vec![3, 12, 21, 30]);
        let report = verify_dgdd_profile(&d, &[1, 1, 1, 1]);
        assert!(report.passed, "{}", report.summary());

        let d = rtd_to_dgdd(13).unwrap();
        assert_eq!(d.blocks().len(), 156);
        assert!(verify_dgdd_profile(&d, &[1, 1, 1, 1]).passed);

        let d = rtd_to_dgdd(4).unwrap();
        assert_eq!(d.blocks().len(), 12);
        assert!(verify(&d).passed);

        assert!(rtd_to_dgdd(6).is_err());
        assert!(rtd_to_dgdd(10).is_err());
    }

    #[test]
    fn transpose_swaps_partitions() {
        let d = rtd_to_dgdd(9).unwrap();
        let t = dgdd_transpose(&d).unwrap();
        assert_eq!(t.signature(), sig("4^9"));
        assert_eq!(t.hole_signature().unwrap(), sig("9^4"));
        let report = verify_dgdd_profile(&t, &[1; 9]);
        assert!(report.passed, "{}", report.summary());

        let back = dgdd_transpose(&t).unwrap();
        assert!(back.canonical_eq(&d));

        let plain = crate::algebra::td(4, 3).unwrap();
        assert!(dgdd_transpose(&plain).is_err());
    }

    #[test]
    fn weighting_multiplies_blocks_by_w_squared() {
        let entry = Catalogue::builtin().find_by_name("13^9 10^1").unwrap();
        let base = expand_entry(entry).unwrap();
        assert_eq!(base.blocks().len(), 1209);
        let inflated = weight_by(&base, 3).unwrap();
        assert_eq!(inflated.signature(), sig("39^9 30^1"));
        assert_eq!(inflated.blocks().len(), 1209 * 9);
        assert_eq!(
            inflated.blocks().len() as u64,
            crate::design::expected_block_count(39, 9, 30).unwrap()
        );
        let report = verify(&inflated);
        assert!(report.passed, "{}", report.summary());
    }

    #[test]
    fn weighting_a_grid_dgdd() {
        // The smallest usable weight is 3: a TD(4, 2) does not exist, so
        // weighting by 2 has no overlay to draw on.
        let d = rtd_to_dgdd(9).unwrap();
        let w = weight_by(&d, 3).unwrap();
        assert_eq!(w.signature(), sig("27^4"));
        assert_eq!(w.hole_signature().unwrap(), sig("12^9"));
        let report = verify_dgdd_profile(&w, &[3, 3, 3, 3]);
        assert!(report.passed, "{}", report.summary());
    }

    #[test]
    fn weight_one_is_identity() {
        let d = crate::algebra::td(4, 3).unwrap();
        let same = weight_by(&d, 1).unwrap();
        assert_eq!(same, d);
    }

    #[test]
    fn weight_rejects_bad_overlay() {
        let d = crate::algebra::td(4, 3).unwrap();
        let overlay5 = crate::algebra::td(5, 7).unwrap();
        assert!(weight_design(&d, 7, &overlay5).is_err());
        assert!(weight_by(&d, 6).is_err());
    }
}
