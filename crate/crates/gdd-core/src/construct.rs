//! Recursive constructions: each operation performs combinatorial surgery on
//! ingredient designs and returns a design of the promised type.
//!
//! All alignment choices are deterministic: classes, groups, holes and filler
//! groups are always consumed in index order, and a group being split is cut
//! into equal parts by ascending point order.  Outputs are re-verified by the
//! callers' tests; the constructors themselves only enforce shape.

use crate::design::{
    Block, DesignKind, GroupedDesign, PointId, Provenance, TypeSignature,
};
use crate::{Error, Result};

/// The numeric parameters of the fundamental construction
/// ([`thm_fundamental`]).
#[derive(Clone, Copy, Debug)]
pub struct FundamentalParams {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub t: u32,
}

/// Filler designs for [`thm_fundamental`], by role.  Unused roles may be
/// `None`; when two roles call for the same type, the same design may be
/// supplied to both.
#[derive(Clone, Copy, Default)]
pub struct FundamentalFillers<'a> {
    /// Type `a^v b^1 c^1`: overlays blocks of the `t` classes that receive
    /// `c` extra points each.
    pub class_with_points: Option<&'a GroupedDesign>,
    /// Type `a^v b^1`: overlays blocks of the remaining classes.
    pub class_plain: Option<&'a GroupedDesign>,
    /// Type `a^u d^1`: overlays each inflated group except the first.
    pub group_a: Option<&'a GroupedDesign>,
    /// Type `b^u d^1`: overlays the first (b-inflated) group.
    pub group_b: Option<&'a GroupedDesign>,
}

/// Maps a filler design onto target point ranges, one filler group per role,
/// matched by exact size in listed order.  Returns the relabelled blocks.
fn overlay_blocks(
    filler: &GroupedDesign,
    roles: &[Vec<PointId>],
    what: &str,
) -> Result<Vec<Block>> {
    let groups = filler.groups();
    if groups.len() != roles.len() {
        return Err(Error::Ingredient(format!(
            "{what}: filler has {} groups but the overlay needs {}",
            groups.len(),
            roles.len()
        )));
    }
    let mut used = vec![false; groups.len()];
    let mut map = vec![0u32; filler.v() as usize];
    for role in roles {
        let gi = groups
            .iter()
            .enumerate()
            .position(|(i, g)| !used[i] && g.len() == role.len())
            .ok_or_else(|| {
                Error::Ingredient(format!(
                    "{what}: no unused filler group of size {}",
                    role.len()
                ))
            })?;
        used[gi] = true;
        for (&fp, &tp) in groups[gi].iter().zip(role.iter()) {
            map[fp as usize] = tp;
        }
    }
    filler
        .blocks()
        .iter()
        .map(|b| Block::new(b.points().iter().map(|&p| map[p as usize]).collect()))
        .collect()
}

fn expect_filler(
    filler: Option<&GroupedDesign>,
    expected: &TypeSignature,
    role: &str,
) -> Result<()> {
    let Some(f) = filler else {
        return Err(Error::Ingredient(format!(
            "missing filler for role {role} (type {expected})"
        )));
    };
    if f.block_size() != 4 {
        return Err(Error::Ingredient(format!(
            "filler for role {role} has block size {}, expected 4",
            f.block_size()
        )));
    }
    if f.signature() != *expected {
        return Err(Error::Ingredient(format!(
            "filler for role {role} has type {}, expected {expected}",
            f.signature()
        )));
    }
    Ok(())
}

/// The fundamental construction: from a `(v+1)`-RGDD of type `u^{v+1}` with
/// `u` parallel classes, build a 4-GDD of type `(va+b)^u (tc+d)^1`.
///
/// The first parallel class is removed and its blocks, once inflated, become
/// the groups of the result.  The first group's points are inflated by `b`,
/// all others by `a`.  Each of the next `t` classes receives `c` fresh
/// points; its blocks are overlaid (chunks plus the class's `c` points) with
/// the `a^v b^1 c^1` filler.  Blocks of the remaining classes are overlaid
/// with `a^v b^1`.  Finally each original group plus `d` shared fresh points
/// is overlaid with `a^u d^1` (or `b^u d^1` for the first group).
pub fn thm_fundamental(
    params: FundamentalParams,
    u: u32,
    v: u32,
    rgdd: &GroupedDesign,
    fillers: &FundamentalFillers,
) -> Result<GroupedDesign> {
    let FundamentalParams { a, b, c, d, t } = params;
    if a == 0 || b == 0 {
        return Err(Error::Precondition(
            "inflation factors a and b must be positive".into(),
        ));
    }
    if !(2 <= v && v + 1 <= u) {
        return Err(Error::Precondition(format!(
            "need 2 <= v <= u-1, got v={v}, u={u}"
        )));
    }
    if t + 1 > u {
        return Err(Error::Precondition(format!(
            "need 0 <= t <= u-1, got t={t}, u={u}"
        )));
    }
    if rgdd.kind() != DesignKind::Rgdd {
        return Err(Error::Ingredient(format!(
            "expected an RGDD, got a {}",
            rgdd.kind()
        )));
    }
    let expected_sig = TypeSignature::new([(u, v + 1)]);
    if rgdd.signature() != expected_sig || rgdd.block_size() != v + 1 {
        return Err(Error::Ingredient(format!(
            "expected a {}-RGDD of type {expected_sig}, got block size {} and type {}",
            v + 1,
            rgdd.block_size(),
            rgdd.signature()
        )));
    }
    let classes = rgdd.resolution().expect("RGDD carries a resolution");
    if classes.len() != u as usize {
        return Err(Error::Ingredient(format!(
            "expected {u} parallel classes, got {}",
            classes.len()
        )));
    }

    // A class with no points attached behaves like a plain remaining class.
    let t_eff = if c == 0 { 0 } else { t };
    let n_plain = u - 1 - t_eff;
    if t_eff > 0 {
        expect_filler(
            fillers.class_with_points,
            &TypeSignature::new([(a, v), (b, 1), (c, 1)]),
            "class overlay with points",
        )?;
    }
    if n_plain > 0 {
        expect_filler(
            fillers.class_plain,
            &TypeSignature::new([(a, v), (b, 1)]),
            "class overlay",
        )?;
    }
    expect_filler(
        fillers.group_a,
        &TypeSignature::new([(a, u), (d, 1)]),
        "group overlay",
    )?;
    expect_filler(
        fillers.group_b,
        &TypeSignature::new([(b, u), (d, 1)]),
        "first-group overlay",
    )?;

    // Inflate: first group by b, the rest by a.
    let group_of = rgdd.group_index_of_points();
    let weight = |p: PointId| if group_of[p as usize] == 0 { b } else { a };
    let mut offset = vec![0u32; rgdd.v() as usize + 1];
    for p in 0..rgdd.v() {
        offset[p as usize + 1] = offset[p as usize] + weight(p);
    }
    let base = offset[rgdd.v() as usize];
    let chunk =
        |p: PointId| -> Vec<PointId> { (offset[p as usize]..offset[p as usize + 1]).collect() };

    let m_size = t_eff * c + d;
    let v_final = base + m_size;
    let c_range = |slot: u32| -> Vec<PointId> {
        (base + slot * c..base + (slot + 1) * c).collect()
    };
    let d_range: Vec<PointId> = (base + t_eff * c..base + m_size).collect();

    let mut blocks: Vec<Block> = Vec::new();
    // Block overlays, class by class (class 0 is the removed one).
    for (ci, class) in classes.iter().enumerate().skip(1) {
        let with_points = (ci as u32) <= t_eff;
        for &bi in class {
            let master = &rgdd.blocks()[bi as usize];
            let mut roles: Vec<Vec<PointId>> =
                master.points().iter().map(|&p| chunk(p)).collect();
            if with_points {
                roles.push(c_range(ci as u32 - 1));
                blocks.extend(overlay_blocks(
                    fillers.class_with_points.unwrap(),
                    &roles,
                    "class overlay with points",
                )?);
            } else {
                blocks.extend(overlay_blocks(
                    fillers.class_plain.unwrap(),
                    &roles,
                    "class overlay",
                )?);
            }
        }
    }
    // Group overlays: each original group plus the d points.
    for (j, group) in rgdd.groups().iter().enumerate() {
        let mut roles: Vec<Vec<PointId>> = group.iter().map(|&p| chunk(p)).collect();
        if d > 0 {
            roles.push(d_range.clone());
        }
        let filler = if j == 0 {
            fillers.group_b.unwrap()
        } else {
            fillers.group_a.unwrap()
        };
        let role_name = if j == 0 { "first-group overlay" } else { "group overlay" };
        blocks.extend(overlay_blocks(filler, &roles, role_name)?);
    }
    blocks.sort_unstable();

    // Final groups: the inflated blocks of the removed class, then the new
    // points as the m-group.
    let mut groups: Vec<Vec<PointId>> = classes[0]
        .iter()
        .map(|&bi| {
            let mut pts: Vec<PointId> = rgdd.blocks()[bi as usize]
                .points()
                .iter()
                .flat_map(|&p| chunk(p))
                .collect();
            pts.sort_unstable();
            pts
        })
        .collect();
    if m_size > 0 {
        groups.push((base..v_final).collect());
    }

    let mut ingredients = vec![rgdd.provenance().clone()];
    for f in [
        fillers.class_with_points.filter(|_| t_eff > 0),
        fillers.class_plain.filter(|_| n_plain > 0),
        fillers.group_a,
        fillers.group_b,
    ]
    .into_iter()
    .flatten()
    {
        ingredients.push(f.provenance().clone());
    }
    let provenance = Provenance::theorem(
        "fundamental",
        &[
            ("a", a as u64),
            ("b", b as u64),
            ("c", c as u64),
            ("d", d as u64),
            ("t", t_eff as u64),
            ("u", u as u64),
            ("v", v as u64),
        ],
        ingredients,
    );
    GroupedDesign::new(v_final, DesignKind::Gdd, 4, groups, None, None, blocks, provenance)
}

/// Group-filling construction: from a 4-GDD of type `(3g)^n (m-g)^1`, adjoin
/// `g` points and overlay each `3g`-group plus the new points with a 4-GDD
/// of type `g^4`, producing type `g^{3n} m^1`.
///
/// Each `3g`-group is cut into three `g`-parts by ascending point order; the
/// overlay's fourth group lands on the new points.  The old `(m-g)`-group
/// (when present) plus the new points form the m-group of the result.
pub fn thm_fill_groups(
    big: &GroupedDesign,
    g: u32,
    td4g: &GroupedDesign,
) -> Result<GroupedDesign> {
    if g == 2 || g == 6 {
        return Err(Error::Precondition(format!(
            "no 4-GDD of type {g}^4 exists to overlay with (g = 2 and 6 are excluded)"
        )));
    }
    if big.kind() != DesignKind::Gdd && big.kind() != DesignKind::Td {
        return Err(Error::Ingredient(format!(
            "expected a GDD to fill, got a {}",
            big.kind()
        )));
    }
    expect_filler(Some(td4g), &TypeSignature::new([(g, 4)]), "group overlay g^4")?;

    // Identify the 3g-groups and the optional remainder group.
    let three_g = 3 * g;
    let mut rest_group: Option<usize> = None;
    for (i, grp) in big.groups().iter().enumerate() {
        if grp.len() == three_g as usize {
            continue;
        }
        if rest_group.is_some() {
            return Err(Error::Ingredient(format!(
                "signature {} is not of the form {three_g}^n m^1",
                big.signature()
            )));
        }
        rest_group = Some(i);
    }
    let n = big.groups().len() - rest_group.iter().len();
    if n == 0 {
        return Err(Error::Ingredient(format!(
            "signature {} has no {three_g}-groups",
            big.signature()
        )));
    }

    let new_points: Vec<PointId> = (big.v()..big.v() + g).collect();
    let mut blocks: Vec<Block> = big.blocks().to_vec();
    let mut groups: Vec<Vec<PointId>> = Vec::new();
    for (i, grp) in big.groups().iter().enumerate() {
        if Some(i) == rest_group {
            continue;
        }
        let parts: Vec<Vec<PointId>> = (0..3)
            .map(|k| grp[k * g as usize..(k + 1) * g as usize].to_vec())
            .collect();
        let mut roles = parts.clone();
        roles.push(new_points.clone());
        blocks.extend(overlay_blocks(td4g, &roles, "group overlay g^4")?);
        groups.extend(parts);
    }
    let mut m_group: Vec<PointId> = match rest_group {
        Some(i) => big.groups()[i].clone(),
        None => Vec::new(),
    };
    m_group.extend(&new_points);
    groups.push(m_group);
    blocks.sort_unstable();

    let provenance = Provenance::theorem(
        "fill-groups",
        &[("g", g as u64)],
        vec![big.provenance().clone(), td4g.provenance().clone()],
    );
    GroupedDesign::new(
        big.v() + g,
        DesignKind::Gdd,
        4,
        groups,
        None,
        None,
        blocks,
        provenance,
    )
}

/// Weighting construction: inflates every point of `small` by `u` using a
/// double GDD of type `(u,1^u)^4` to blow up the blocks, then overlays each
/// original group (now `u` aligned traces) plus `m` fresh shared points with
/// a filler of type `g_i^u m^1`, producing `(Σ g_i t_i)^u m^1`.
///
/// Point `p` of `small` becomes the `u` points `p*u .. p*u+u-1`; trace `j`
/// of the result collects the points `p*u + j`.  For each block, the double
/// GDD's group `i` is identified with the block's `i`-th smallest point and
/// its hole `j` with trace `j`.  One filler per distinct group size of
/// `small` must be supplied.
pub fn thm_wilson_inflate(
    small: &GroupedDesign,
    u: u32,
    dgdd_u: &GroupedDesign,
    fillers: &[&GroupedDesign],
    m: u32,
) -> Result<GroupedDesign> {
    if u < 4 || u == 6 {
        return Err(Error::Precondition(format!(
            "weight u must be at least 4 and not 6, got {u}"
        )));
    }
    if small.kind() != DesignKind::Gdd && small.kind() != DesignKind::Td {
        return Err(Error::Ingredient(format!(
            "expected a GDD to inflate, got a {}",
            small.kind()
        )));
    }
    if small.block_size() != 4 {
        return Err(Error::Ingredient(format!(
            "expected block size 4, got {}",
            small.block_size()
        )));
    }
    check_grid_dgdd(dgdd_u, 4, u)?;

    let dg_group = dgdd_u.group_index_of_points();
    let dg_hole = dgdd_u
        .hole_index_of_points()
        .expect("DGDD carries holes");

    let base = small.v() * u;
    let new_points: Vec<PointId> = (base..base + m).collect();

    // Blow up each block through the double GDD.
    let mut blocks: Vec<Block> = Vec::new();
    for master in small.blocks() {
        let pts = master.points();
        for d_block in dgdd_u.blocks() {
            let mapped: Vec<PointId> = d_block
                .points()
                .iter()
                .map(|&x| pts[dg_group[x as usize] as usize] * u + dg_hole[x as usize])
                .collect();
            blocks.push(Block::new(mapped)?);
        }
    }

    // Fill each original group's traces plus the shared new points.
    let mut used_filler: Vec<&GroupedDesign> = Vec::new();
    for grp in small.groups() {
        let g_i = grp.len() as u32;
        let expected = TypeSignature::new([(g_i, u), (m, 1)]);
        let filler = fillers
            .iter()
            .find(|f| f.signature() == expected && f.block_size() == 4)
            .copied()
            .ok_or_else(|| {
                Error::Ingredient(format!("missing filler of type {expected}"))
            })?;
        if !used_filler.iter().any(|f| std::ptr::eq(*f, filler)) {
            used_filler.push(filler);
        }
        let mut roles: Vec<Vec<PointId>> = (0..u)
            .map(|j| grp.iter().map(|&p| p * u + j).collect())
            .collect();
        if m > 0 {
            roles.push(new_points.clone());
        }
        blocks.extend(overlay_blocks(filler, &roles, "group filler")?);
    }
    blocks.sort_unstable();

    // Final groups: the u traces, then the new points.
    let mut groups: Vec<Vec<PointId>> = (0..u)
        .map(|j| (0..small.v()).map(|p| p * u + j).collect())
        .collect();
    if m > 0 {
        groups.push(new_points);
    }

    let mut ingredients = vec![small.provenance().clone(), dgdd_u.provenance().clone()];
    ingredients.extend(used_filler.iter().map(|f| f.provenance().clone()));
    let provenance = Provenance::theorem(
        "wilson-inflate",
        &[("u", u as u64), ("m", m as u64)],
        ingredients,
    );
    GroupedDesign::new(
        base + m,
        DesignKind::Gdd,
        4,
        groups,
        None,
        None,
        blocks,
        provenance,
    )
}

/// Hole-filling construction: from a double GDD of type `(g,1^g)^u` (u
/// groups of size g, g holes meeting every group once), adjoin `m` points
/// and overlay each hole plus the new points with a filler of type
/// `1^u m^1`, producing `g^u m^1`.
///
/// Rejects `m > (u-1)/2` (no filler of type `1^u m^1` can exist beyond that
/// bound).  Parameter combinations outside the residue conditions that
/// guarantee filler existence are reported as warnings, not errors: the
/// overlay itself is sound for any verified filler.
pub fn thm_hole_fill(
    dgdd: &GroupedDesign,
    filler: &GroupedDesign,
    m: u32,
) -> Result<(GroupedDesign, Vec<String>)> {
    let (u, g) = grid_dims(dgdd)?;
    if m > (u - 1) / 2 {
        return Err(Error::Precondition(format!(
            "m = {m} exceeds (u-1)/2 = {}; no filler of type 1^{u} {m}^1 exists",
            (u - 1) / 2
        )));
    }
    expect_filler(
        Some(filler),
        &TypeSignature::new([(1, u), (m, 1)]),
        "hole filler",
    )?;

    let mut warnings = Vec::new();
    if g < 4 || u < 4 {
        warnings.push(format!(
            "outside guaranteed range: need g, u >= 4, got g={g}, u={u}"
        ));
    }
    if g % 3 != 1 {
        warnings.push(format!("outside guaranteed range: g = {g} is not 1 mod 3"));
    }
    let residues_ok = match u % 12 {
        0 => m % 3 == 1,
        3 => m % 6 == 1,
        9 => m % 6 == 4,
        _ => false,
    };
    if !residues_ok {
        warnings.push(format!(
            "outside guaranteed range: u mod 12 = {} with m mod 6 = {} is not a guaranteed combination",
            u % 12,
            m % 6
        ));
    }

    let group_of = dgdd.group_index_of_points();
    let new_points: Vec<PointId> = (dgdd.v()..dgdd.v() + m).collect();
    let mut blocks: Vec<Block> = dgdd.blocks().to_vec();
    for hole in dgdd.holes().expect("DGDD carries holes") {
        // Singleton role i is the hole's point in group i.
        let mut roles: Vec<Vec<PointId>> = (0..u)
            .map(|i| {
                let p = hole
                    .iter()
                    .copied()
                    .find(|&p| group_of[p as usize] == i)
                    .expect("grid hole meets every group");
                vec![p]
            })
            .collect();
        if m > 0 {
            roles.push(new_points.clone());
        }
        blocks.extend(overlay_blocks(filler, &roles, "hole filler")?);
    }
    blocks.sort_unstable();

    let mut groups: Vec<Vec<PointId>> = dgdd.groups().to_vec();
    if m > 0 {
        groups.push(new_points);
    }
    let provenance = Provenance::theorem(
        "hole-fill",
        &[("m", m as u64)],
        vec![dgdd.provenance().clone(), filler.provenance().clone()],
    );
    let design = GroupedDesign::new(
        dgdd.v() + m,
        DesignKind::Gdd,
        4,
        groups,
        None,
        None,
        blocks,
        provenance,
    )?;
    Ok((design, warnings))
}

/// Scalar inflation: multiplies all part sizes of a design by `r` by
/// weighting every point with a transversal design on 4 groups of size `r`.
/// Takes `g^u m^1` to `(rg)^u (rm)^1`.
pub fn thm_scalar_inflate(
    design: &GroupedDesign,
    r: u32,
    td4r: &GroupedDesign,
) -> Result<GroupedDesign> {
    if r < 3 || r == 6 {
        return Err(Error::Precondition(format!(
            "inflation factor must be at least 3 and not 6, got {r}"
        )));
    }
    if td4r.kind() != DesignKind::Td || td4r.signature() != TypeSignature::new([(r, 4)]) {
        return Err(Error::Ingredient(format!(
            "expected a transversal design of type {r}^4, got {} of type {}",
            td4r.kind(),
            td4r.signature()
        )));
    }
    let provenance = Provenance::theorem(
        "scalar-inflate",
        &[("r", r as u64)],
        vec![design.provenance().clone(), td4r.provenance().clone()],
    );
    Ok(crate::derived::weight_design(design, r, td4r)?.with_provenance(provenance))
}

/// Checks that `dgdd` is a double GDD with `n_groups` groups of size `s`,
/// `s` holes of size `n_groups`, and every hole meeting every group exactly
/// once.
fn check_grid_dgdd(dgdd: &GroupedDesign, n_groups: u32, s: u32) -> Result<()> {
    let (u, g) = grid_dims(dgdd)?;
    if u != n_groups || g != s {
        return Err(Error::Ingredient(format!(
            "expected a double GDD of type ({s}, 1^{s})^{n_groups}, got ({g}, 1^{g})^{u}"
        )));
    }
    Ok(())
}

/// Validates the grid structure of a double GDD of type `(g,1^g)^u` and
/// returns `(u, g)` = (number of groups, group size).
fn grid_dims(dgdd: &GroupedDesign) -> Result<(u32, u32)> {
    if dgdd.kind() != DesignKind::Dgdd {
        return Err(Error::Ingredient(format!(
            "expected a double GDD, got a {}",
            dgdd.kind()
        )));
    }
    let holes = dgdd.holes().expect("DGDD carries holes");
    let u = dgdd.groups().len() as u32;
    let g = holes.len() as u32;
    if dgdd.groups().iter().any(|grp| grp.len() != g as usize)
        || holes.iter().any(|h| h.len() != u as usize)
    {
        return Err(Error::Ingredient(format!(
            "expected uniform type (g, 1^g)^u, got groups {} and holes {:?}",
            dgdd.signature(),
            dgdd.hole_signature().map(|s| s.to_string())
        )));
    }
    let group_of = dgdd.group_index_of_points();
    for hole in holes {
        let mut seen = vec![false; u as usize];
        for &p in hole {
            let gi = group_of[p as usize] as usize;
            if seen[gi] {
                return Err(Error::Ingredient(
                    "hole meets a group more than once; need a grid profile".into(),
                ));
            }
            seen[gi] = true;
        }
    }
    Ok((u, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rtd, td};
    use crate::appendix::Catalogue;
    use crate::cover::{solve_signature, SolveOptions, SolveOutcome};
    use crate::derived::{dgdd_transpose, rtd_to_dgdd};
    use crate::design::signature_of;
    use crate::verify::verify;
    use std::sync::LazyLock;

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    fn solved(type_text: &str, seed: u64) -> GroupedDesign {
        let opts = SolveOptions { seed, ..Default::default() };
        match solve_signature(&sig(type_text), None, &opts).unwrap() {
            SolveOutcome::Solved(d) => d,
            other => panic!("no design for {type_text}: {other:?}"),
        }
    }

    static FILLER_3_9: LazyLock<GroupedDesign> = LazyLock::new(|| solved("3^9", 0));

    fn assert_verified(design: &GroupedDesign) {
        let report = verify(design);
        assert!(report.passed, "{}", report.summary());
    }

    #[test]
    fn fundamental_builds_15_9() {
        let rgdd = rtd(5, 9).unwrap();
        let class_filler = solved("3^5", 0);
        let group_filler = &*FILLER_3_9;
        let params = FundamentalParams { a: 3, b: 3, c: 0, d: 0, t: 0 };
        let fillers = FundamentalFillers {
            class_with_points: None,
            class_plain: Some(&class_filler),
            group_a: Some(group_filler),
            group_b: Some(group_filler),
        };
        let design = thm_fundamental(params, 9, 4, &rgdd, &fillers).unwrap();
        assert_eq!(design.signature(), sig("15^9"));
        assert_eq!(design.blocks().len(), 72 * 15 + 5 * 54);
        assert_verified(&design);
    }

    #[test]
    fn fundamental_rejects_bad_parameters() {
        let rgdd = rtd(5, 9).unwrap();
        let f = solved("3^5", 0);
        let fillers = FundamentalFillers {
            class_plain: Some(&f),
            group_a: Some(&*FILLER_3_9),
            group_b: Some(&*FILLER_3_9),
            ..Default::default()
        };
        let params = FundamentalParams { a: 3, b: 3, c: 0, d: 0, t: 9 };
        // t > u-1.
        assert!(thm_fundamental(params, 9, 4, &rgdd, &fillers).is_err());
        // Wrong v for this RGDD.
        let params = FundamentalParams { a: 3, b: 3, c: 0, d: 0, t: 0 };
        assert!(thm_fundamental(params, 9, 3, &rgdd, &fillers).is_err());
        // Plain TD is not an RGDD.
        let plain = td(5, 9).unwrap();
        assert!(thm_fundamental(params, 9, 4, &plain, &fillers).is_err());
        // Missing group filler.
        let missing = FundamentalFillers { class_plain: Some(&f), ..Default::default() };
        assert!(thm_fundamental(params, 9, 4, &rgdd, &missing).is_err());
    }

    #[test]
    fn fill_groups_builds_13_24_133() {
        let catalogue = Catalogue::builtin();
        let entry = catalogue.find_by_name("39^8 120^1").unwrap();
        let big = entry.expand().unwrap();
        let overlay = td(4, 13).unwrap();
        let design = thm_fill_groups(&big, 13, &overlay).unwrap();
        assert_eq!(design.signature(), sig("13^24 133^1"));
        assert_eq!(design.blocks().len(), 14690);
        assert_verified(&design);
    }

    #[test]
    fn fill_groups_uniform_input() {
        // A TD(4,9) is a 4-GDD of type 9^4 = (3*3)^4; filling with 3^4 gives
        // 3^12 3^1 = 3^13.
        let big = td(4, 9).unwrap();
        let overlay = td(4, 3).unwrap();
        let design = thm_fill_groups(&big, 3, &overlay).unwrap();
        assert_eq!(design.signature(), sig("3^13"));
        assert_eq!(design.blocks().len(), 81 + 4 * 9);
        assert_verified(&design);
    }

    #[test]
    fn fill_groups_rejects_g_2_and_6() {
        let big = td(4, 9).unwrap();
        let overlay = td(4, 3).unwrap();
        assert!(matches!(
            thm_fill_groups(&big, 2, &overlay),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            thm_fill_groups(&big, 6, &overlay),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn wilson_inflate_builds_12_9() {
        let small = td(4, 3).unwrap();
        let dgdd = rtd_to_dgdd(9).unwrap();
        let design = thm_wilson_inflate(&small, 9, &dgdd, &[&*FILLER_3_9], 0).unwrap();
        assert_eq!(design.signature(), sig("12^9"));
        assert_eq!(design.blocks().len(), 9 * 72 + 4 * 54);
        assert_verified(&design);
    }

    #[test]
    fn wilson_inflate_rejects_u_6_and_missing_filler() {
        let small = td(4, 3).unwrap();
        let dgdd = rtd_to_dgdd(9).unwrap();
        assert!(matches!(
            thm_wilson_inflate(&small, 6, &dgdd, &[&*FILLER_3_9], 0),
            Err(Error::Precondition(_))
        ));
        // No filler of type 3^9 supplied.
        let wrong = solved("3^5", 0);
        assert!(matches!(
            thm_wilson_inflate(&small, 9, &dgdd, &[&wrong], 0),
            Err(Error::Ingredient(_))
        ));
    }

    #[test]
    fn hole_fill_builds_4_10() {
        let dgdd = dgdd_transpose(&rtd_to_dgdd(9).unwrap()).unwrap();
        let filler = solved("1^9 4^1", 0);
        let (design, warnings) = thm_hole_fill(&dgdd, &filler, 4).unwrap();
        assert_eq!(design.signature(), sig("4^10"));
        assert_eq!(design.blocks().len(), 72 + 4 * 12);
        assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
        assert_verified(&design);
    }

    #[test]
    fn hole_fill_warns_outside_guaranteed_range() {
        // (4, 1^4)^13 has u = 13, outside the residue classes with a
        // guaranteed filler; the overlay still works with a found filler.
        let dgdd = dgdd_transpose(&rtd_to_dgdd(13).unwrap()).unwrap();
        let filler = solved("1^13", 0);
        let (design, warnings) = thm_hole_fill(&dgdd, &filler, 0).unwrap();
        assert_eq!(design.signature(), sig("4^13"));
        assert!(!warnings.is_empty());
        assert_verified(&design);
    }

    #[test]
    fn hole_fill_rejects_oversized_m() {
        let dgdd = dgdd_transpose(&rtd_to_dgdd(9).unwrap()).unwrap();
        let filler = solved("1^9 4^1", 0);
        assert!(matches!(
            thm_hole_fill(&dgdd, &filler, 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hole_fill_rejects_missing_holes() {
        let not_a_dgdd = td(4, 9).unwrap();
        let filler = solved("1^9 4^1", 0);
        assert!(thm_hole_fill(&not_a_dgdd, &filler, 4).is_err());
    }

    #[test]
    fn scalar_inflate_triples_13_9_10() {
        let catalogue = Catalogue::builtin();
        let base = catalogue.find_by_name("13^9 10^1").unwrap().expand().unwrap();
        let overlay = td(4, 3).unwrap();
        let design = thm_scalar_inflate(&base, 3, &overlay).unwrap();
        assert_eq!(design.signature(), sig("39^9 30^1"));
        assert_eq!(design.blocks().len(), 10881);
        assert_eq!(
            signature_of(&design),
            TypeSignature::new([(39, 9), (30, 1)])
        );
        assert_verified(&design);
    }

    #[test]
    fn scalar_inflate_rejects_bad_factor() {
        let base = td(4, 5).unwrap();
        let overlay = td(4, 3).unwrap();
        assert!(matches!(
            thm_scalar_inflate(&base, 6, &overlay),
            Err(Error::Precondition(_))
        ));
        // Overlay size must match the factor.
        assert!(matches!(
            thm_scalar_inflate(&base, 5, &overlay),
            Err(Error::Ingredient(_))
        ));
    }
}
