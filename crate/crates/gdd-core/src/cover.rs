//! A dancing-links exact-cover solver over pair-coverage instances.
//!
//! The required columns are exactly the point pairs a design of the given
//! type must cover; the candidate rows are all 4-point subsets none of whose
//! internal pairs is forbidden.  A solution is therefore a design by
//! construction, and an exhausted search is a proof that none exists.
//! Nonexistence is only ever reported after exhaustion — a timeout is a
//! distinct outcome.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::design::{Block, DesignKind, GroupedDesign, Provenance, TypeSignature};
use crate::{Error, Result};

/// Search controls.  `max_pairs` bounds the instance size accepted at all;
/// the budget bounds wall-clock time for one `solve_signature` call.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub budget: Duration,
    pub max_pairs: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            budget: Duration::from_secs(30),
            max_pairs: 2000,
        }
    }
}

#[derive(Debug)]
pub enum SolveOutcome {
    Solved(GroupedDesign),
    /// The search tree was exhausted: no design of this type exists.
    Unsat,
    /// The time budget ran out before the tree was exhausted.
    Timeout,
}

/// Lays out the groups of a signature as contiguous point ranges, largest
/// size first (canonical part order).
fn layout_groups(signature: &TypeSignature) -> Vec<Vec<u32>> {
    let mut groups = Vec::new();
    let mut next = 0u32;
    for &(size, count) in signature.parts() {
        for _ in 0..count {
            groups.push((next..next + size).collect());
            next += size;
        }
    }
    groups
}

/// Lays out a grid-compatible hole partition: requires a uniform group
/// signature `s^t` and uniform holes `z^n` with `h = s/n` points of every
/// group in every hole (`z = h*t`).  Hole `j` takes positions
/// `[j*h, (j+1)*h)` of every group.
fn layout_holes(
    signature: &TypeSignature,
    holes: &TypeSignature,
) -> Result<Vec<Vec<u32>>> {
    let &[(s, t)] = signature.parts() else {
        return Err(Error::Precondition(format!(
            "hole search needs a uniform group type, got {signature}"
        )));
    };
    let &[(z, n)] = holes.parts() else {
        return Err(Error::Precondition(format!(
            "hole search needs a uniform hole profile, got {holes}"
        )));
    };
    if n == 0 || s % n != 0 || z != (s / n) * t {
        return Err(Error::Precondition(format!(
            "hole profile {holes} incompatible with group type {signature}"
        )));
    }
    let h = s / n;
    Ok((0..n)
        .map(|j| {
            (0..t)
                .flat_map(|i| i * s + j * h..i * s + (j + 1) * h)
                .collect()
        })
        .collect())
}

struct Dlx {
    // Node 0..n_cols are column headers; node n_cols is the root; data
    // nodes follow.  All links are indices into these arrays.
    left: Vec<u32>,
    right: Vec<u32>,
    up: Vec<u32>,
    down: Vec<u32>,
    col: Vec<u32>,
    row: Vec<u32>,
    size: Vec<u32>,
    root: u32,
    // Pair endpoints per column plus per-point bookkeeping for the
    // stranded-point cut: `deg[p]` counts p's uncovered pairs and
    // `cnt[p * n_groups + h]` those with their far end in group `h`.  Any
    // completion covers p's pairs three at a time, one group each, so a
    // group holding more than a third of them proves the branch dead.
    pair_p: Vec<u32>,
    pair_q: Vec<u32>,
    group_of: Vec<u32>,
    n_groups: u32,
    deg: Vec<u32>,
    cnt: Vec<u32>,
    // Aggregates for the starvation cut: `deg_group[g]` sums `deg` over the
    // points of group `g`, `uncov_gg[g * n_groups + h]` (g < h) counts the
    // uncovered pairs between groups `g` and `h`, and `uncovered_cols` the
    // columns still to cover.  Every block covers exactly six columns, meets
    // four distinct groups, and covers at most one pair between any two.
    deg_group: Vec<u32>,
    uncov_gg: Vec<u32>,
    uncovered_cols: u32,
}

impl Dlx {
    fn new(n_cols: usize, pairs: Vec<(u32, u32)>, group_of: Vec<u32>, n_groups: u32) -> Self {
        let root = n_cols as u32;
        let n = n_cols + 1;
        let v = group_of.len();
        let mut deg = vec![0u32; v];
        let mut cnt = vec![0u32; v * n_groups as usize];
        let mut deg_group = vec![0u32; n_groups as usize];
        let mut uncov_gg = vec![0u32; n_groups as usize * n_groups as usize];
        for &(p, q) in &pairs {
            deg[p as usize] += 1;
            deg[q as usize] += 1;
            let (gp, gq) = (group_of[p as usize], group_of[q as usize]);
            cnt[p as usize * n_groups as usize + gq as usize] += 1;
            cnt[q as usize * n_groups as usize + gp as usize] += 1;
            deg_group[gp as usize] += 1;
            deg_group[gq as usize] += 1;
            uncov_gg[gp.min(gq) as usize * n_groups as usize + gp.max(gq) as usize] += 1;
        }
        // One circular header ring: 0, 1, ..., n_cols-1, root.
        Dlx {
            left: (0..n).map(|i| if i == 0 { root } else { i as u32 - 1 }).collect(),
            right: (0..n).map(|i| ((i + 1) % n) as u32).collect(),
            up: (0..n as u32).collect(),
            down: (0..n as u32).collect(),
            col: (0..n as u32).collect(),
            row: vec![u32::MAX; n],
            size: vec![0; n],
            root,
            pair_p: pairs.iter().map(|&(p, _)| p).collect(),
            pair_q: pairs.iter().map(|&(_, q)| q).collect(),
            group_of,
            n_groups,
            deg,
            cnt,
            deg_group,
            uncov_gg,
            uncovered_cols: n_cols as u32,
        }
    }

    fn add_row(&mut self, row_id: u32, cols: &[u32]) {
        let first = self.left.len() as u32;
        let last = first + cols.len() as u32 - 1;
        for (i, &c) in cols.iter().enumerate() {
            let node = first + i as u32;
            let last_in_col = self.up[c as usize];
            self.up.push(last_in_col);
            self.down.push(c);
            self.down[last_in_col as usize] = node;
            self.up[c as usize] = node;
            self.col.push(c);
            self.row.push(row_id);
            self.size[c as usize] += 1;
            // Horizontal ring within the row.
            self.left.push(if node == first { last } else { node - 1 });
            self.right.push(if node == last { first } else { node + 1 });
        }
    }

    fn cover(&mut self, c: u32) {
        let (p, q) = (self.pair_p[c as usize], self.pair_q[c as usize]);
        self.deg[p as usize] -= 1;
        self.deg[q as usize] -= 1;
        let (gp, gq) = (self.group_of[p as usize], self.group_of[q as usize]);
        self.cnt[p as usize * self.n_groups as usize + gq as usize] -= 1;
        self.cnt[q as usize * self.n_groups as usize + gp as usize] -= 1;
        self.deg_group[gp as usize] -= 1;
        self.deg_group[gq as usize] -= 1;
        self.uncov_gg[gp.min(gq) as usize * self.n_groups as usize + gp.max(gq) as usize] -= 1;
        self.uncovered_cols -= 1;
        let (l, r) = (self.left[c as usize], self.right[c as usize]);
        self.right[l as usize] = r;
        self.left[r as usize] = l;
        let mut i = self.down[c as usize];
        while i != c {
            let mut j = self.right[i as usize];
            while j != i {
                let (u, d) = (self.up[j as usize], self.down[j as usize]);
                self.down[u as usize] = d;
                self.up[d as usize] = u;
                self.size[self.col[j as usize] as usize] -= 1;
                j = self.right[j as usize];
            }
            i = self.down[i as usize];
        }
    }

    fn uncover(&mut self, c: u32) {
        let mut i = self.up[c as usize];
        while i != c {
            let mut j = self.left[i as usize];
            while j != i {
                let (u, d) = (self.up[j as usize], self.down[j as usize]);
                self.size[self.col[j as usize] as usize] += 1;
                self.down[u as usize] = j;
                self.up[d as usize] = j;
                j = self.left[j as usize];
            }
            i = self.up[i as usize];
        }
        let (l, r) = (self.left[c as usize], self.right[c as usize]);
        self.right[l as usize] = c;
        self.left[r as usize] = c;
        let (p, q) = (self.pair_p[c as usize], self.pair_q[c as usize]);
        self.deg[p as usize] += 1;
        self.deg[q as usize] += 1;
        let (gp, gq) = (self.group_of[p as usize], self.group_of[q as usize]);
        self.cnt[p as usize * self.n_groups as usize + gq as usize] += 1;
        self.cnt[q as usize * self.n_groups as usize + gp as usize] += 1;
        self.deg_group[gp as usize] += 1;
        self.deg_group[gq as usize] += 1;
        self.uncov_gg[gp.min(gq) as usize * self.n_groups as usize + gp.max(gq) as usize] += 1;
        self.uncovered_cols += 1;
    }

    fn min_endpoint_deg(&self, c: u32) -> u32 {
        self.deg[self.pair_p[c as usize] as usize]
            .min(self.deg[self.pair_q[c as usize] as usize])
    }

    /// True when some point of the just-placed block now has more remaining
    /// partners in a single group than its remaining blocks can absorb.
    fn stranded(&self, node: u32) -> bool {
        let mut j = node;
        loop {
            let c = self.col[j as usize] as usize;
            for p in [self.pair_p[c], self.pair_q[c]] {
                let deg = self.deg[p as usize];
                let base = p as usize * self.n_groups as usize;
                for h in 0..self.n_groups as usize {
                    if 3 * self.cnt[base + h] > deg {
                        return true;
                    }
                }
            }
            j = self.right[j as usize];
            if j == node {
                return false;
            }
        }
    }

    /// True when the remaining blocks cannot supply some group's demand.
    /// A group `g` still needs exactly `deg_group[g] / 3` future blocks, all
    /// distinct (a block meets a group at most once and covers three pairs at
    /// that point), so the demand may not exceed the blocks left.  Likewise
    /// each uncovered pair between groups `g` and `h` needs its own block
    /// meeting both, and only `min(deg_group) / 3` such blocks can exist.
    fn starved(&self) -> bool {
        let b_rem = self.uncovered_cols / 6;
        let n = self.n_groups as usize;
        for g in 0..n {
            if self.deg_group[g] > 3 * b_rem {
                return true;
            }
        }
        for g in 0..n {
            let dg = self.deg_group[g] / 3;
            for h in g + 1..n {
                if self.uncov_gg[g * n + h] > dg.min(self.deg_group[h] / 3) {
                    return true;
                }
            }
        }
        false
    }

    /// Depth-first exact-cover search.  Returns `Some(rows)` on success,
    /// `None` when the subtree is exhausted; sets `timed_out` when the
    /// deadline interrupts (the return value is then meaningless as a proof).
    fn search(
        &mut self,
        chosen: &mut Vec<u32>,
        deadline: Instant,
        stats: &mut SearchStats,
        timed_out: &mut bool,
    ) -> bool {
        if self.right[self.root as usize] == self.root {
            return true;
        }
        stats.nodes += 1;
        let depth = chosen.len();
        stats.max_depth = stats.max_depth.max(depth as u32);
        if depth >= stats.by_depth.len() {
            stats.by_depth.resize(depth + 1, 0);
        }
        stats.by_depth[depth] += 1;
        if stats.nodes % 4096 == 0 && Instant::now() >= deadline {
            *timed_out = true;
            return false;
        }
        // Minimum-remaining-candidates column.  Ties go to the column whose
        // endpoint has the fewest uncovered pairs left (then to the lowest
        // column id, i.e. point-major pair order): finishing nearly-complete
        // points first keeps the constraint front local and surfaces dead
        // ends earlier than a scattered frontier would.
        let mut best = u32::MAX;
        let mut best_size = u32::MAX;
        let mut best_deg = u32::MAX;
        let mut c = self.right[self.root as usize];
        while c != self.root {
            let size = self.size[c as usize];
            if size < best_size {
                best_size = size;
                best = c;
                best_deg = self.min_endpoint_deg(c);
                // A singleton column is forced and an empty one is a dead
                // end either way; no later column can improve on the choice.
                if best_size <= 1 {
                    break;
                }
            } else if size == best_size {
                let deg = self.min_endpoint_deg(c);
                if deg < best_deg {
                    best = c;
                    best_deg = deg;
                }
            }
            c = self.right[c as usize];
        }
        if best_size == 0 {
            return false;
        }
        let c = best;
        self.cover(c);
        let mut node = self.down[c as usize];
        while node != c {
            chosen.push(self.row[node as usize]);
            let mut j = self.right[node as usize];
            while j != node {
                self.cover(self.col[j as usize]);
                j = self.right[j as usize];
            }
            if !self.stranded(node)
                && !self.starved()
                && self.search(chosen, deadline, stats, timed_out)
            {
                return true;
            }
            let mut j = self.left[node as usize];
            while j != node {
                self.uncover(self.col[j as usize]);
                j = self.left[j as usize];
            }
            chosen.pop();
            if *timed_out {
                break;
            }
            node = self.down[node as usize];
        }
        self.uncover(c);
        false
    }
}

/// Searches for a design of block size 4 with the given type, and optionally
/// a grid-compatible hole profile (see [`layout_holes`]).  Outcomes:
/// a verified-by-construction design, a proof of nonexistence, or a timeout.
pub fn solve_signature(
    signature: &TypeSignature,
    holes: Option<&TypeSignature>,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    solve_signature_counted(signature, holes, opts, &mut SearchStats::default())
}

/// Search-effort counters, reported by the internal entry point so tests
/// and probes can see how hard an instance was.
#[derive(Clone, Debug, Default)]
pub(crate) struct SearchStats {
    pub nodes: u64,
    pub max_depth: u32,
    pub by_depth: Vec<u64>,
}

pub(crate) fn solve_signature_counted(
    signature: &TypeSignature,
    holes: Option<&TypeSignature>,
    opts: &SolveOptions,
    stats_out: &mut SearchStats,
) -> Result<SolveOutcome> {
    let v = signature.v();
    let groups = layout_groups(signature);
    let holes_partition = holes
        .map(|h| layout_holes(signature, h))
        .transpose()?;

    let group_of = index_of(v, &groups);
    let hole_of = holes_partition.as_ref().map(|h| index_of(v, h));
    let required = |p: u32, q: u32| {
        group_of[p as usize] != group_of[q as usize]
            && hole_of
                .as_ref()
                .map_or(true, |h| h[p as usize] != h[q as usize])
    };

    // Column ids for required pairs, in point-major order: all pairs through
    // point 0 first, then the remaining pairs through point 1, and so on.
    // Together with the first-minimum tie-break below this makes the search
    // finish one point's blocks before starting the next point's, which
    // keeps the constraint front local.
    let tri = |p: u32, q: u32| (q as usize * (q as usize - 1)) / 2 + p as usize;
    let mut col_of_pair = vec![u32::MAX; (v as usize * (v as usize).saturating_sub(1)) / 2];
    let mut n_cols = 0u64;
    for p in 0..v {
        for q in p + 1..v {
            if required(p, q) {
                if n_cols >= opts.max_pairs {
                    return Err(Error::Precondition(format!(
                        "instance has more than {} required pairs",
                        opts.max_pairs
                    )));
                }
                col_of_pair[tri(p, q)] = n_cols as u32;
                n_cols += 1;
            }
        }
    }
    // Each block covers 6 pairs, so a non-multiple of 6 is an exact
    // arithmetic proof of nonexistence.
    if n_cols % 6 != 0 {
        return Ok(SolveOutcome::Unsat);
    }
    if n_cols == 0 {
        // The empty design (no cross pairs at all, e.g. a single group).
        let design = GroupedDesign::new(
            v,
            if holes_partition.is_some() { DesignKind::Dgdd } else { DesignKind::Gdd },
            4,
            groups,
            holes_partition,
            None,
            vec![],
            Provenance::ExactCover { seed: opts.seed },
        )?;
        return Ok(SolveOutcome::Solved(design));
    }

    // First-block canonicalization (hole-less instances only).  The block
    // covering the pair (first point of group 0, first point of group 1) has
    // its two remaining points in two other groups; permuting equal-sized
    // groups and relabelling within groups maps any such block to the
    // representative determined by the multiset of those two group sizes.
    // Any solution can therefore be assumed to contain a representative, so
    // dropping the non-canonical blocks through that pair preserves both
    // satisfiability and unsatisfiability.
    let canon: Option<(u32, Vec<[u32; 4]>)> = if holes_partition.is_none() && groups.len() >= 4 {
        let q_star = groups[1][0];
        let rest: Vec<(u32, u32)> = groups[2..]
            .iter()
            .map(|grp| (grp.len() as u32, grp[0]))
            .collect();
        let mut reps: Vec<[u32; 4]> = Vec::new();
        let mut seen_multisets: Vec<(u32, u32)> = Vec::new();
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                let (sa, sb) = (rest[i].0.max(rest[j].0), rest[i].0.min(rest[j].0));
                if seen_multisets.contains(&(sa, sb)) {
                    continue;
                }
                seen_multisets.push((sa, sb));
                // First two groups beyond index 1 realizing this multiset.
                let ga = rest.iter().position(|&(s, _)| s == rest[i].0).unwrap();
                let gb = rest
                    .iter()
                    .enumerate()
                    .position(|(k, &(s, _))| k != ga && s == rest[j].0)
                    .unwrap();
                let mut rep = [0, q_star, rest[ga].1, rest[gb].1];
                rep.sort_unstable();
                reps.push(rep);
            }
        }
        Some((q_star, reps))
    } else {
        None
    };

    // Candidate rows: 4-subsets all of whose pairs are required.
    let neighbors: Vec<Vec<u32>> = (0..v)
        .map(|p| (p + 1..v).filter(|&q| required(p, q)).collect())
        .collect();
    let mut rows: Vec<[u32; 4]> = Vec::new();
    for p0 in 0..v {
        for &p1 in &neighbors[p0 as usize] {
            for &p2 in &neighbors[p1 as usize] {
                if !required(p0, p2) {
                    continue;
                }
                for &p3 in &neighbors[p2 as usize] {
                    if required(p0, p3) && required(p1, p3) {
                        let row = [p0, p1, p2, p3];
                        if let Some((q_star, reps)) = &canon {
                            if p0 == 0 && row.contains(q_star) && !reps.contains(&row) {
                                continue;
                            }
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }

    let mut order: Vec<u32> = (0..rows.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    order.shuffle(&mut rng);

    let mut pairs = vec![(0u32, 0u32); n_cols as usize];
    for q in 1..v {
        for p in 0..q {
            let id = col_of_pair[tri(p, q)];
            if id != u32::MAX {
                pairs[id as usize] = (p, q);
            }
        }
    }
    let mut dlx = Dlx::new(n_cols as usize, pairs, group_of.clone(), groups.len() as u32);
    for &ri in &order {
        let pts = rows[ri as usize];
        let cols: Vec<u32> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .map(|(a, b)| col_of_pair[tri(pts[a], pts[b])])
            .collect();
        dlx.add_row(ri, &cols);
    }

    let mut chosen = Vec::new();
    let mut stats = SearchStats::default();
    let mut timed_out = false;
    let deadline = Instant::now() + opts.budget;
    let found = dlx.search(&mut chosen, deadline, &mut stats, &mut timed_out);
    *stats_out = stats;
    if found {
        let mut blocks: Vec<Block> = chosen
            .iter()
            .map(|&ri| Block::from_sorted(rows[ri as usize].to_vec()))
            .collect::<Result<_>>()?;
        blocks.sort_unstable();
        let design = GroupedDesign::new(
            v,
            if holes_partition.is_some() { DesignKind::Dgdd } else { DesignKind::Gdd },
            4,
            groups,
            holes_partition,
            None,
            blocks,
            Provenance::ExactCover { seed: opts.seed },
        )?;
        Ok(SolveOutcome::Solved(design))
    } else if timed_out {
        Ok(SolveOutcome::Timeout)
    } else {
        Ok(SolveOutcome::Unsat)
    }
}

/// Runs seed-varied searches under one overall budget, returning the first
/// success.  Exhaustion is seed-independent, so the first unsat is final;
/// only timeouts trigger another attempt with the next seed.
pub fn solve_with_restarts(
    signature: &TypeSignature,
    holes: Option<&TypeSignature>,
    opts: &SolveOptions,
    attempts: u32,
) -> Result<SolveOutcome> {
    let attempts = attempts.max(1);
    let per_attempt = opts.budget / attempts;
    for i in 0..attempts {
        let attempt_opts = SolveOptions {
            seed: opts.seed + i as u64,
            budget: per_attempt,
            max_pairs: opts.max_pairs,
        };
        match solve_signature(signature, holes, &attempt_opts)? {
            SolveOutcome::Timeout => continue,
            other => return Ok(other),
        }
    }
    Ok(SolveOutcome::Timeout)
}

fn index_of(v: u32, classes: &[Vec<u32>]) -> Vec<u32> {
    let mut idx = vec![0u32; v as usize];
    for (i, class) in classes.iter().enumerate() {
        for &p in class {
            idx[p as usize] = i as u32;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify, verify_dgdd_profile};

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    fn solve(text: &str) -> SolveOutcome {
        solve_signature(&sig(text), None, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn finds_small_designs() {
        for (type_text, blocks) in [("3^4", 9), ("1^9 4^1", 12), ("3^5", 15), ("1^13", 13)] {
            match solve(type_text) {
                SolveOutcome::Solved(d) => {
                    assert_eq!(d.blocks().len(), blocks, "{type_text}");
                    let report = verify(&d);
                    assert!(report.passed, "{type_text}: {}", report.summary());
                }
                other => panic!("{type_text}: expected a design, got {other:?}"),
            }
        }
    }

    #[test]
    fn finds_3_9() {
        match solve("3^9") {
            SolveOutcome::Solved(d) => {
                assert_eq!(d.blocks().len(), 54);
                assert!(verify(&d).passed);
            }
            other => panic!("expected a design, got {other:?}"),
        }
    }

    #[test]
    fn type_2_4_is_unsat() {
        let start = std::time::Instant::now();
        assert!(matches!(solve("2^4"), SolveOutcome::Unsat));
        assert!(start.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn non_multiple_of_six_is_unsat_immediately() {
        // 2^4 1^1 has 32 required pairs; no union of 6-pair blocks covers it.
        assert!(matches!(solve("2^4 1^1"), SolveOutcome::Unsat));
    }

    #[test]
    fn grid_hole_search() {
        let outcome = solve_signature(
            &sig("4^5"),
            Some(&sig("5^4")),
            &SolveOptions::default(),
        )
        .unwrap();
        match outcome {
            SolveOutcome::Solved(d) => {
                // Type (4, 1^4)^5: 20 points, every group meets every hole
                // once, 190 - 30 same-group - 40 same-hole = 120 pairs.
                let report = verify_dgdd_profile(&d, &[1, 1, 1, 1, 1]);
                assert!(report.passed, "{}", report.summary());
                assert_eq!(d.blocks().len(), 20);
            }
            other => panic!("expected a design, got {other:?}"),
        }
        // Incompatible profile is a precondition error, not unsat.
        assert!(solve_signature(&sig("4^5"), Some(&sig("3^4")), &SolveOptions::default()).is_err());
    }

    #[test]
    fn determinism_per_seed() {
        let opts = SolveOptions::default();
        let a = solve_signature(&sig("3^5"), None, &opts).unwrap();
        let b = solve_signature(&sig("3^5"), None, &opts).unwrap();
        match (a, b) {
            (SolveOutcome::Solved(x), SolveOutcome::Solved(y)) => {
                assert_eq!(x.to_text(), y.to_text());
            }
            _ => panic!("expected two solutions"),
        }
    }

    #[test]
    fn oversized_instance_rejected() {
        let opts = SolveOptions { max_pairs: 100, ..Default::default() };
        assert!(solve_signature(&sig("3^9"), None, &opts).is_err());
    }
}

#[cfg(test)]
mod probe {
    use super::*;

    #[test]
    #[ignore]
    fn probe_seed_sweep() {
        let var = |k: &str, d: u64| {
            std::env::var(k).ok().and_then(|s| s.parse().ok()).unwrap_or(d)
        };
        let type_text = std::env::var("PROBE_TYPE").unwrap_or_else(|_| "3^9".into());
        let signature = TypeSignature::parse(&type_text).unwrap();
        let start = var("PROBE_SEED_START", 0);
        let count = var("PROBE_SEED_COUNT", 8);
        let budget = Duration::from_millis(var("PROBE_BUDGET_MS", 10_000));
        let stop_after = var("PROBE_STOP_AFTER", u64::MAX);
        let mut solved = 0u64;
        for seed in start..start + count {
            let opts = SolveOptions { seed, budget, max_pairs: 4000 };
            let t = Instant::now();
            let mut stats = SearchStats::default();
            let out = solve_signature_counted(&signature, None, &opts, &mut stats).unwrap();
            let label = match out {
                SolveOutcome::Solved(_) => {
                    solved += 1;
                    "SOLVED"
                }
                SolveOutcome::Unsat => "unsat",
                SolveOutcome::Timeout => "timeout",
            };
            println!(
                "{type_text} seed {seed}: {label} in {:.2?} after {} nodes ({:.0}k/s, depth {})",
                t.elapsed(),
                stats.nodes,
                stats.nodes as f64 / t.elapsed().as_secs_f64().max(1e-9) / 1e3,
                stats.max_depth,
            );
            if std::env::var("PROBE_PROFILE").is_ok() {
                let total: u64 = stats.by_depth.iter().sum::<u64>().max(1);
                let mut acc = 0u64;
                let mut marks = vec![];
                for (d, &n) in stats.by_depth.iter().enumerate() {
                    let before = acc;
                    acc += n;
                    for pct in [50u64, 90, 99] {
                        if before * 100 < pct * total && acc * 100 >= pct * total {
                            marks.push(format!("p{pct}=d{d}"));
                        }
                    }
                }
                println!("  profile: {} | {:?}", marks.join(" "), stats.by_depth);
            }
            if solved >= stop_after {
                break;
            }
        }
        println!("sweep done: {solved}/{count} solved");
    }
}
