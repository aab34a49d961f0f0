//! Construction planning: given a target type `g^u m^1`, produce a tree of
//! construction steps that bottoms out in appendix entries, algebraic
//! objects, solver searches, or explicit external imports — then optionally
//! execute that tree against a design registry.
//!
//! Plans are pure functions of `(g, u, m)` and the built-in schedule tables;
//! no registry state influences planning.  Every node cites the schedule rule
//! that justifies it (see [`RULES`]), and a plan never invents an ingredient:
//! anything the crate cannot supply itself becomes an [`Method::Import`] leaf
//! that execution reports as missing rather than fabricates.

use std::fmt;
use std::time::Duration;

use crate::admissibility::{check_gum, check_uniform, Existence};
use crate::algebra;
use crate::appendix::Catalogue;
use crate::construct::{
    thm_fill_groups, thm_fundamental, thm_hole_fill, thm_scalar_inflate, thm_wilson_inflate,
    FundamentalFillers, FundamentalParams,
};
use crate::cover::{solve_with_restarts, SolveOptions, SolveOutcome};
use crate::design::{cross_pair_count, DesignKind, GroupedDesign, TypeSignature};
use crate::error::{Error, Result};
use crate::registry::Registry;

/// What a plan node promises to produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub signature: TypeSignature,
    pub kind: DesignKind,
    /// Hole-class signature for double GDD goals.
    pub holes: Option<TypeSignature>,
}

impl Goal {
    fn gdd(signature: TypeSignature) -> Self {
        Goal { signature, kind: DesignKind::Gdd, holes: None }
    }

    fn td(signature: TypeSignature) -> Self {
        Goal { signature, kind: DesignKind::Td, holes: None }
    }

    fn rgdd(signature: TypeSignature) -> Self {
        Goal { signature, kind: DesignKind::Rgdd, holes: None }
    }

    fn dgdd(signature: TypeSignature, holes: TypeSignature) -> Self {
        Goal { signature, kind: DesignKind::Dgdd, holes: Some(holes) }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}", self.signature, self.kind)?;
        if let Some(h) = &self.holes {
            write!(f, ", holes {h}")?;
        }
        write!(f, "]")
    }
}

/// How a plan node's goal is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Expand the named base-block catalogue entry.
    Appendix { name: String },
    /// Build an algebraic object (`td`, `rtd`, `macneish`).
    Algebra { op: String, params: Vec<(String, u64)> },
    /// Derive from an algebraic object (`dgdd-rtd`, `dgdd-rtd-transpose`).
    Derived { op: String, params: Vec<(String, u64)> },
    /// Apply a named composition with the children as ingredients.
    Theorem { name: String, params: Vec<(String, u64)>, children: Vec<PlanNode> },
    /// The goal must be imported from outside; execution reports it missing.
    Import,
    /// Run the exact-cover solver on the goal type.
    Search,
}

/// One step of a construction plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanNode {
    pub goal: Goal,
    pub method: Method,
    /// Identifier of the schedule rule that justifies this step; always one
    /// of the ids in [`RULES`].
    pub rule: String,
}

impl PlanNode {
    fn leaf(goal: Goal, method: Method, rule: &str) -> Self {
        PlanNode { goal, method, rule: rule.to_string() }
    }

    /// True when no node in the tree requires an external import.
    pub fn is_self_contained(&self) -> bool {
        match &self.method {
            Method::Import => false,
            Method::Theorem { children, .. } => children.iter().all(|c| c.is_self_contained()),
            _ => true,
        }
    }

    /// All import leaves in the tree, in depth-first order.
    pub fn imports(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        self.collect_imports(&mut out);
        out
    }

    fn collect_imports<'a>(&'a self, out: &mut Vec<&'a PlanNode>) {
        match &self.method {
            Method::Import => out.push(self),
            Method::Theorem { children, .. } => {
                for c in children {
                    c.collect_imports(out);
                }
            }
            _ => {}
        }
    }

    /// Total number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        match &self.method {
            Method::Theorem { children, .. } => {
                1 + children.iter().map(|c| c.node_count()).sum::<usize>()
            }
            _ => 1,
        }
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        let method = match &self.method {
            Method::Appendix { name } => format!("appendix \"{name}\""),
            Method::Algebra { op, params } => format!("algebra {op}{}", render_params(params)),
            Method::Derived { op, params } => format!("derived {op}{}", render_params(params)),
            Method::Theorem { name, params, .. } => {
                format!("compose {name}{}", render_params(params))
            }
            Method::Import => "import (external)".to_string(),
            Method::Search => "search".to_string(),
        };
        out.push_str(&format!("{} <- {method}  [rule {}]\n", self.goal, self.rule));
        if let Method::Theorem { children, .. } = &self.method {
            for c in children {
                c.render_into(indent + 1, out);
            }
        }
    }

    /// Indented textual rendering of the whole tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }
}

impl fmt::Display for PlanNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn render_params(params: &[(String, u64)]) -> String {
    if params.is_empty() {
        return String::new();
    }
    let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("({})", inner.join(", "))
}

/// One row of the rule catalogue: a stable identifier plus what it stands
/// for.  Every plan node's `rule` field is an id from this list.
pub struct Rule {
    pub id: &'static str,
    pub text: &'static str,
}

/// The schedule-rule catalogue.
pub const RULES: &[Rule] = &[
    Rule { id: "appendix-direct", text: "the target type is a base-block catalogue entry" },
    Rule {
        id: "fill-groups-reduction",
        text: "g^u m^1 with 3|u from (3g)^(u/3) (m-g)^1 by splitting groups and overlaying g^4",
    },
    Rule {
        id: "scalar-factorization",
        text: "g^u m^1 from (g/r)^u (m/r)^1 inflated by a factor r weight (r >= 3, r != 6)",
    },
    Rule {
        id: "hole-fill-generic",
        text: "g^u m^1 from the (g,1^g)-grid double GDD on u groups plus a 1^u m^1 filler",
    },
    Rule { id: "g13-hole-fill", text: "schedule row: g=13, small m via grid hole filling" },
    Rule { id: "g19-hole-fill", text: "schedule row: g=19, small m via grid hole filling" },
    Rule { id: "g25-hole-fill", text: "schedule row: g=25, small m via grid hole filling" },
    Rule {
        id: "g23-small-overlay",
        text: "schedule row: g=23 by weighting 2^9 5^1 with u and filling groups",
    },
    Rule {
        id: "g29-small-overlay",
        text: "schedule row: g=29 by weighting 2^12 5^1 with u and filling groups",
    },
    Rule {
        id: "g31-small-overlay",
        text: "schedule row: g=31 by weighting 4^6 7^1 with u and filling groups",
    },
    Rule { id: "g17-external", text: "schedule row: g=17 cases settled by external constructions" },
    Rule { id: "g25-external", text: "schedule row: g=25, u=24 small m settled externally" },
    Rule { id: "g35-external", text: "schedule row: g=35 cases settled by external constructions" },
    Rule {
        id: "group-overlay-external",
        text: "u in {33, 39, 51} with 0 < m < g settled by an external group-overlay route",
    },
    Rule {
        id: "scheme-6k3-named",
        text: "schedule row: g = 3 (mod 6), u in {7, 11}, tabulated (a, v, b) class scheme",
    },
    Rule {
        id: "scheme-6k3-formula",
        text: "g = 3 (mod 6), g >= 111, u in {7, 11}: a = 6*floor((g+18)/36), b = g - 5a",
    },
    Rule {
        id: "scheme-u8-general",
        text: "g = 3 (mod 30), g >= 93, u = 8: class scheme with a = 6h, b = 6h+3, c = 12h",
    },
    Rule { id: "scheme-u8-g51", text: "schedule row: 51^8 156^1 via a 9/15/18 class scheme" },
    Rule { id: "scheme-u8-g69", text: "schedule row: 69^8 m^1, m in 210..219, via a 9/15/27 class scheme" },
    Rule { id: "scheme-u8-g87", text: "schedule row: 87^8 m^1, m in 264..294, via a 12/15/36 class scheme" },
    Rule { id: "uniform-td", text: "uniform g^4 is a transversal design TD(4, g)" },
    Rule {
        id: "uniform-quarter",
        text: "uniform g^u with 4|g by weighting TD(4, g/4) with u and filling groups",
    },
    Rule { id: "uniform-external", text: "uniform type settled outside this crate's constructions" },
    Rule { id: "td-field", text: "TD(k, q) from the finite field of prime-power order q" },
    Rule { id: "td-macneish", text: "TD(4, r) as a product of prime-power-order TDs, all factors >= 3" },
    Rule { id: "td-external", text: "TD(4, r) exists but has no in-crate construction" },
    Rule { id: "rtd-direct", text: "resolvable TD(k, q) from the finite field of order q" },
    Rule { id: "dgdd-rtd-direct", text: "(u,1^u)-grid double GDD on 4 groups from a resolvable TD" },
    Rule {
        id: "dgdd-transpose",
        text: "(4,1^4)-grid double GDD on u groups by transposing the resolvable-TD grid",
    },
    Rule { id: "dgdd-search", text: "grid double GDD small enough for the exact-cover solver" },
    Rule { id: "dgdd-external", text: "grid double GDD with no in-crate construction" },
    Rule { id: "search-small", text: "within the exact-cover solver's pair budget" },
    Rule {
        id: "filler-family-import",
        text: "filler of shape x^4 (2x)^1 y^1 with x <= y <= 2x: known family, external",
    },
    Rule { id: "filler-external", text: "filler type with no in-crate construction" },
    Rule { id: "beyond-schedule", text: "no schedule row covers this type; external supply required" },
    Rule { id: "depth-limit", text: "recursive planning depth limit reached" },
];

/// Looks up the descriptive text behind a rule id.
pub fn rule_text(id: &str) -> Option<&'static str> {
    RULES.iter().find(|r| r.id == id).map(|r| r.text)
}

/// Membership test for a set of m values in a schedule row.
enum MSpec {
    List(&'static [u32]),
    Step { lo: u32, hi: u32, step: u32 },
}

impl MSpec {
    fn contains(&self, m: u32) -> bool {
        match *self {
            MSpec::List(values) => values.contains(&m),
            MSpec::Step { lo, hi, step } => m >= lo && m <= hi && (m - lo) % step == 0,
        }
    }
}

/// How a schedule row says a `(g, u, m)` case is built.
enum Route {
    /// Grid double GDD on `u` groups plus a `1^u m^1` filler.
    HoleFill,
    /// Weight the named small design by `u`, then fill groups with
    /// `s^u m^1` fillers (one per distinct group size `s` of the small type).
    SmallOverlay(&'static str),
    /// Settled by constructions outside this crate; import leaf.
    External,
}

struct RecipeRow {
    g: u32,
    u: u32,
    ms: MSpec,
    route: Route,
    rule: &'static str,
}

/// Per-g schedule rows for the small settled group sizes.  Rows are consulted
/// after the appendix and the generic reductions, so cases those handle never
/// reach this table.
const RECIPE_ROWS: &[RecipeRow] = &[
    // g = 13: small m via grid hole filling.
    RecipeRow { g: 13, u: 9, ms: MSpec::List(&[4]), route: Route::HoleFill, rule: "g13-hole-fill" },
    RecipeRow { g: 13, u: 12, ms: MSpec::List(&[1, 4]), route: Route::HoleFill, rule: "g13-hole-fill" },
    RecipeRow { g: 13, u: 15, ms: MSpec::List(&[1, 7]), route: Route::HoleFill, rule: "g13-hole-fill" },
    RecipeRow { g: 13, u: 21, ms: MSpec::List(&[4, 10]), route: Route::HoleFill, rule: "g13-hole-fill" },
    RecipeRow { g: 13, u: 24, ms: MSpec::List(&[1, 4, 7, 10]), route: Route::HoleFill, rule: "g13-hole-fill" },
    RecipeRow { g: 13, u: 27, ms: MSpec::List(&[1, 7]), route: Route::HoleFill, rule: "g13-hole-fill" },
    // g = 17: external settlements.
    RecipeRow { g: 17, u: 9, ms: MSpec::List(&[2]), route: Route::External, rule: "g17-external" },
    RecipeRow { g: 17, u: 15, ms: MSpec::List(&[5]), route: Route::External, rule: "g17-external" },
    RecipeRow { g: 17, u: 21, ms: MSpec::List(&[2, 8, 14]), route: Route::External, rule: "g17-external" },
    RecipeRow { g: 17, u: 24, ms: MSpec::List(&[2, 5, 8, 11, 14]), route: Route::External, rule: "g17-external" },
    RecipeRow { g: 17, u: 27, ms: MSpec::List(&[5, 11]), route: Route::External, rule: "g17-external" },
    // g = 19: same shape as g = 13.
    RecipeRow { g: 19, u: 9, ms: MSpec::List(&[4]), route: Route::HoleFill, rule: "g19-hole-fill" },
    RecipeRow { g: 19, u: 12, ms: MSpec::List(&[1, 4]), route: Route::HoleFill, rule: "g19-hole-fill" },
    RecipeRow { g: 19, u: 15, ms: MSpec::List(&[1, 7]), route: Route::HoleFill, rule: "g19-hole-fill" },
    RecipeRow { g: 19, u: 21, ms: MSpec::List(&[4, 10]), route: Route::HoleFill, rule: "g19-hole-fill" },
    RecipeRow { g: 19, u: 24, ms: MSpec::List(&[1, 4, 7, 10]), route: Route::HoleFill, rule: "g19-hole-fill" },
    RecipeRow { g: 19, u: 27, ms: MSpec::List(&[1, 7, 13]), route: Route::HoleFill, rule: "g19-hole-fill" },
    // g = 23: weight 2^9 5^1 by u.
    RecipeRow { g: 23, u: 9, ms: MSpec::List(&[2, 8]), route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    RecipeRow { g: 23, u: 12, ms: MSpec::List(&[2, 5, 8, 11]), route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    RecipeRow { g: 23, u: 15, ms: MSpec::List(&[5, 11]), route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    RecipeRow { g: 23, u: 21, ms: MSpec::List(&[2, 8, 14, 20]), route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    RecipeRow { g: 23, u: 24, ms: MSpec::Step { lo: 2, hi: 20, step: 3 }, route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    RecipeRow { g: 23, u: 27, ms: MSpec::List(&[5, 11, 17]), route: Route::SmallOverlay("2^9 5^1"), rule: "g23-small-overlay" },
    // g = 25: hole filling for most small m; u = 24 small m is external.
    RecipeRow { g: 25, u: 9, ms: MSpec::List(&[4]), route: Route::HoleFill, rule: "g25-hole-fill" },
    RecipeRow { g: 25, u: 12, ms: MSpec::List(&[1, 4]), route: Route::HoleFill, rule: "g25-hole-fill" },
    RecipeRow { g: 25, u: 15, ms: MSpec::List(&[1, 7]), route: Route::HoleFill, rule: "g25-hole-fill" },
    RecipeRow { g: 25, u: 21, ms: MSpec::List(&[4, 10]), route: Route::HoleFill, rule: "g25-hole-fill" },
    RecipeRow { g: 25, u: 27, ms: MSpec::List(&[1, 7, 13]), route: Route::HoleFill, rule: "g25-hole-fill" },
    RecipeRow { g: 25, u: 24, ms: MSpec::Step { lo: 1, hi: 250, step: 3 }, route: Route::External, rule: "g25-external" },
    // g = 29: weight 2^12 5^1 by u.
    RecipeRow { g: 29, u: 9, ms: MSpec::List(&[2, 8]), route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    RecipeRow { g: 29, u: 12, ms: MSpec::List(&[2, 5, 8, 11, 14]), route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    RecipeRow { g: 29, u: 15, ms: MSpec::List(&[5, 11]), route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    RecipeRow { g: 29, u: 21, ms: MSpec::List(&[2, 8, 14, 20, 26]), route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    RecipeRow { g: 29, u: 24, ms: MSpec::Step { lo: 2, hi: 26, step: 3 }, route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    RecipeRow { g: 29, u: 27, ms: MSpec::List(&[5, 11, 17, 23]), route: Route::SmallOverlay("2^12 5^1"), rule: "g29-small-overlay" },
    // g = 31: weight 4^6 7^1 by u.
    RecipeRow { g: 31, u: 9, ms: MSpec::List(&[4, 10]), route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    RecipeRow { g: 31, u: 12, ms: MSpec::List(&[1, 4, 7, 10, 13]), route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    RecipeRow { g: 31, u: 15, ms: MSpec::List(&[1, 7, 13]), route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    RecipeRow { g: 31, u: 21, ms: MSpec::List(&[4, 10, 16, 22, 28]), route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    RecipeRow { g: 31, u: 24, ms: MSpec::Step { lo: 1, hi: 29, step: 3 }, route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    RecipeRow { g: 31, u: 27, ms: MSpec::List(&[1, 7, 13, 19, 25]), route: Route::SmallOverlay("4^6 7^1"), rule: "g31-small-overlay" },
    // g = 35: external settlements.
    RecipeRow { g: 35, u: 9, ms: MSpec::List(&[2, 8, 14, 20]), route: Route::External, rule: "g35-external" },
    RecipeRow { g: 35, u: 12, ms: MSpec::Step { lo: 2, hi: 26, step: 3 }, route: Route::External, rule: "g35-external" },
    RecipeRow { g: 35, u: 15, ms: MSpec::Step { lo: 5, hi: 29, step: 6 }, route: Route::External, rule: "g35-external" },
    RecipeRow { g: 35, u: 21, ms: MSpec::Step { lo: 2, hi: 32, step: 6 }, route: Route::External, rule: "g35-external" },
    RecipeRow { g: 35, u: 24, ms: MSpec::Step { lo: 2, hi: 32, step: 3 }, route: Route::External, rule: "g35-external" },
    RecipeRow { g: 35, u: 27, ms: MSpec::Step { lo: 5, hi: 29, step: 6 }, route: Route::External, rule: "g35-external" },
];

/// Named `(a, v, b)` class-scheme rows for `g = 3 (mod 6)`, `u` in `{7, 11}`.
const SCHEME_6K3_ROWS: &[(u32, (u32, u32, u32))] = &[
    (39, (6, 5, 9)),
    (51, (12, 4, 3)),
    (57, (12, 4, 9)),
    (69, (12, 5, 9)),
    (87, (18, 4, 15)),
    (93, (18, 4, 21)),
];

/// Specific `u = 8` class-scheme rows: `(g, m range, a, v, b, c)`, all with
/// `t = 7` and `d = m - 7c`.
const SCHEME_U8_ROWS: &[(u32, MSpec, u32, u32, u32, u32)] = &[
    (51, MSpec::List(&[156]), 9, 4, 15, 18),
    (69, MSpec::Step { lo: 210, hi: 219, step: 3 }, 9, 6, 15, 27),
    (87, MSpec::Step { lo: 264, hi: 294, step: 3 }, 12, 6, 15, 36),
];

const MAX_DEPTH: u32 = 8;

fn sig_gum(g: u32, u: u32, m: u32) -> TypeSignature {
    TypeSignature::new([(g, u), (m, 1)])
}

fn search_budget_pairs() -> u64 {
    SolveOptions::default().max_pairs
}

/// Plans a 4-GDD of type `g^u m^1`.
///
/// Fails when the type is inadmissible or known not to exist; otherwise
/// always returns a plan, with import leaves standing in for anything this
/// crate cannot supply on its own.
pub fn plan_gum(g: u32, u: u32, m: u32) -> Result<PlanNode> {
    let verdict = if m == 0 {
        check_uniform(g, u)
    } else if m == g {
        check_uniform(g, u + 1)
    } else {
        check_gum(g, u, m)
    };
    if !verdict.admissible {
        return Err(Error::Precondition(format!(
            "type {} is inadmissible: {}",
            sig_gum(g, u, m),
            verdict.failed_conditions.join("; ")
        )));
    }
    if let Existence::KnownNonexistent { rule } = &verdict.existence {
        return Err(Error::Precondition(format!(
            "type {} is known not to exist ({rule})",
            sig_gum(g, u, m)
        )));
    }
    Ok(plan_gum_inner(g, u, m, 0))
}

/// Recursive sub-planner: `None` when the subsidiary type is inadmissible or
/// known nonexistent, which kills the candidate route that asked for it.
fn plan_sub(g: u32, u: u32, m: u32, depth: u32) -> Option<PlanNode> {
    let verdict = if m == 0 {
        check_uniform(g, u)
    } else if m == g {
        check_uniform(g, u + 1)
    } else {
        check_gum(g, u, m)
    };
    if !verdict.admissible || matches!(verdict.existence, Existence::KnownNonexistent { .. }) {
        return None;
    }
    Some(plan_gum_inner(g, u, m, depth))
}

fn plan_gum_inner(g: u32, u: u32, m: u32, depth: u32) -> PlanNode {
    if m == 0 {
        return plan_uniform(g, u, depth);
    }
    if m == g {
        return plan_uniform(g, u + 1, depth);
    }
    let sig = sig_gum(g, u, m);
    let goal = Goal::gdd(sig.clone());
    if depth > MAX_DEPTH {
        return PlanNode::leaf(goal, Method::Import, "depth-limit");
    }

    // 1. Direct catalogue hit.
    if let Some(entry) = Catalogue::builtin().find_by_signature(&sig) {
        return PlanNode::leaf(
            goal,
            Method::Appendix { name: entry.name.clone() },
            "appendix-direct",
        );
    }

    let mut candidates: Vec<PlanNode> = Vec::new();

    // 2. Group-splitting reduction: g^u m^1 from (3g)^(u/3) (m-g)^1.
    if u % 3 == 0 && u / 3 >= 4 && g != 2 && g != 6 && m > g {
        if let (Some(big), Some(td)) = (plan_sub(3 * g, u / 3, m - g, depth + 1), plan_td4(g)) {
            candidates.push(PlanNode {
                goal: goal.clone(),
                method: Method::Theorem {
                    name: "fill-groups".to_string(),
                    params: vec![("g".to_string(), g as u64)],
                    children: vec![big, td],
                },
                rule: "fill-groups-reduction".to_string(),
            });
        }
    }

    // 3. Scalar factorization: g^u m^1 from (g/r)^u (m/r)^1 by weight r.
    for r in 3..=g {
        if r == 6 || r == g || g % r != 0 || m % r != 0 {
            continue;
        }
        if let (Some(base), Some(td)) = (plan_sub(g / r, u, m / r, depth + 1), plan_td4(r)) {
            candidates.push(PlanNode {
                goal: goal.clone(),
                method: Method::Theorem {
                    name: "scalar-inflate".to_string(),
                    params: vec![("r".to_string(), r as u64)],
                    children: vec![base, td],
                },
                rule: "scalar-factorization".to_string(),
            });
        }
    }

    // 4. Per-g schedule rows.
    for row in RECIPE_ROWS {
        if row.g != g || row.u != u || !row.ms.contains(m) {
            continue;
        }
        let candidate = match &row.route {
            Route::HoleFill => make_hole_fill(g, u, m, depth, row.rule),
            Route::SmallOverlay(small) => make_small_overlay(g, u, m, small, depth, row.rule),
            Route::External => Some(PlanNode::leaf(goal.clone(), Method::Import, row.rule)),
        };
        candidates.extend(candidate);
    }

    // 4b. Generic hole filling where the residues line up.
    if g % 3 == 1 && g >= 4 && hole_fill_residues_ok(u, m) {
        candidates.extend(make_hole_fill(g, u, m, depth, "hole-fill-generic"));
    }

    // 4c. External group-overlay route for the tall narrow cases.
    if matches!(u, 33 | 39 | 51) && (g % 6 == 1 || g % 6 == 5) && m < g {
        candidates.push(PlanNode::leaf(goal.clone(), Method::Import, "group-overlay-external"));
    }

    // 5. Class schemes for g = 3 (mod 6), u in {7, 8, 11}.
    candidates.extend(plan_scheme(g, u, m, depth));

    // 6. Last resort: search when small enough.
    if cross_pair_count(&sig) <= search_budget_pairs() {
        candidates.push(PlanNode::leaf(goal.clone(), Method::Search, "search-small"));
    }

    choose(candidates, goal)
}

/// Prefers the first candidate the crate can supply entirely on its own,
/// then the first candidate of any shape, then an explicit import leaf.
fn choose(candidates: Vec<PlanNode>, goal: Goal) -> PlanNode {
    if let Some(i) = candidates.iter().position(|c| c.is_self_contained()) {
        return candidates.into_iter().nth(i).unwrap();
    }
    candidates
        .into_iter()
        .next()
        .unwrap_or_else(|| PlanNode::leaf(goal, Method::Import, "beyond-schedule"))
}

/// The `m` residues under which the generic grid hole filling applies.
fn hole_fill_residues_ok(u: u32, m: u32) -> bool {
    if u < 4 || m > (u - 1) / 2 || m == 0 {
        return false;
    }
    match u % 12 {
        0 => m % 3 == 1,
        3 => m % 6 == 1,
        9 => m % 6 == 4,
        _ => false,
    }
}

fn make_hole_fill(g: u32, u: u32, m: u32, depth: u32, rule: &str) -> Option<PlanNode> {
    if u < 4 || m > (u - 1) / 2 {
        return None;
    }
    let dgdd = plan_grid_dgdd(g, u);
    let filler = plan_sub(1, u, m, depth + 1)?;
    Some(PlanNode {
        goal: Goal::gdd(sig_gum(g, u, m)),
        method: Method::Theorem {
            name: "hole-fill".to_string(),
            params: vec![("m".to_string(), m as u64)],
            children: vec![dgdd, filler],
        },
        rule: rule.to_string(),
    })
}

fn make_small_overlay(
    g: u32,
    u: u32,
    m: u32,
    small_text: &str,
    depth: u32,
    rule: &str,
) -> Option<PlanNode> {
    if u < 4 || u == 6 {
        return None;
    }
    let small_sig = TypeSignature::parse(small_text).ok()?;
    debug_assert_eq!(small_sig.v(), g, "schedule row small design must have v = g");
    let small = plan_shape(&small_sig, depth + 1)?;
    let dgdd = plan_point_dgdd(u);
    let mut children = vec![small, dgdd];
    for &(size, _) in small_sig.parts() {
        children.push(plan_sub(size, u, m, depth + 1)?);
    }
    Some(PlanNode {
        goal: Goal::gdd(sig_gum(g, u, m)),
        method: Method::Theorem {
            name: "wilson-inflate".to_string(),
            params: vec![("u".to_string(), u as u64), ("m".to_string(), m as u64)],
            children,
        },
        rule: rule.to_string(),
    })
}

/// Plans a design for an arbitrary signature that is either uniform or of
/// shape `g^u m^1`; used for the small designs named in schedule rows.  The
/// canonical part order sorts by size, so the `m` part may come first.
fn plan_shape(sig: &TypeSignature, depth: u32) -> Option<PlanNode> {
    match *sig.parts() {
        [(g, u)] => plan_sub(g, u, 0, depth),
        [(g, u), (m, 1)] => plan_sub(g, u, m, depth),
        [(m, 1), (g, u)] => plan_sub(g, u, m, depth),
        _ => None,
    }
}

fn plan_uniform(g: u32, n: u32, depth: u32) -> PlanNode {
    let sig = TypeSignature::new([(g, n)]);
    let goal = Goal::gdd(sig.clone());
    if depth > MAX_DEPTH {
        return PlanNode::leaf(goal, Method::Import, "depth-limit");
    }

    if let Some(entry) = Catalogue::builtin().find_by_signature(&sig) {
        return PlanNode::leaf(
            goal,
            Method::Appendix { name: entry.name.clone() },
            "appendix-direct",
        );
    }

    let mut candidates: Vec<PlanNode> = Vec::new();

    // A uniform type on four groups is exactly a transversal design.
    if n == 4 {
        candidates.extend(plan_td4(g));
    }

    // Group splitting with the extra group absorbed: g^n = g^(n-1) g^1.
    if n >= 13 && (n - 1) % 3 == 0 && g != 2 && g != 6 {
        if let (Some(big), Some(td)) = (plan_sub(3 * g, (n - 1) / 3, 0, depth + 1), plan_td4(g)) {
            candidates.push(PlanNode {
                goal: goal.clone(),
                method: Method::Theorem {
                    name: "fill-groups".to_string(),
                    params: vec![("g".to_string(), g as u64)],
                    children: vec![big, td],
                },
                rule: "fill-groups-reduction".to_string(),
            });
        }
    }

    // Scalar factorization.
    for r in 3..=g {
        if r == 6 || r == g || g % r != 0 {
            continue;
        }
        if let (Some(base), Some(td)) = (plan_sub(g / r, n, 0, depth + 1), plan_td4(r)) {
            candidates.push(PlanNode {
                goal: goal.clone(),
                method: Method::Theorem {
                    name: "scalar-inflate".to_string(),
                    params: vec![("r".to_string(), r as u64)],
                    children: vec![base, td],
                },
                rule: "scalar-factorization".to_string(),
            });
        }
    }

    // Quarter split: g^n by weighting TD(4, g/4) with n.
    if g % 4 == 0 && g > 4 && n >= 4 && n != 6 {
        if let (Some(small), Some(filler)) = (plan_td4(g / 4), plan_sub(g / 4, n, 0, depth + 1)) {
            candidates.push(PlanNode {
                goal: goal.clone(),
                method: Method::Theorem {
                    name: "wilson-inflate".to_string(),
                    params: vec![("u".to_string(), n as u64), ("m".to_string(), 0)],
                    children: vec![small, plan_point_dgdd(n), filler],
                },
                rule: "uniform-quarter".to_string(),
            });
        }
    }

    if cross_pair_count(&sig) <= search_budget_pairs() {
        candidates.push(PlanNode::leaf(goal.clone(), Method::Search, "search-small"));
    }

    if let Some(i) = candidates.iter().position(|c| c.is_self_contained()) {
        return candidates.into_iter().nth(i).unwrap();
    }
    candidates
        .into_iter()
        .next()
        .unwrap_or_else(|| PlanNode::leaf(goal, Method::Import, "uniform-external"))
}

/// Plans `TD(4, r)`.  `None` when no TD(4, r) exists (r in {2, 6}) or the
/// trivial r = 1 (never useful as an inflation ingredient).
fn plan_td4(r: u32) -> Option<PlanNode> {
    if r < 3 || r == 6 {
        return None;
    }
    let goal = Goal::td(TypeSignature::new([(r, 4)]));
    if algebra::prime_power(r).is_some() {
        return Some(PlanNode::leaf(
            goal,
            Method::Algebra {
                op: "td".to_string(),
                params: vec![("k".to_string(), 4), ("q".to_string(), r as u64)],
            },
            "td-field",
        ));
    }
    let factors = prime_power_factors(r);
    if factors.iter().all(|&f| f >= 3) {
        let mut params = vec![("k".to_string(), 4u64)];
        params.extend(factors.iter().map(|&f| ("q".to_string(), f as u64)));
        return Some(PlanNode::leaf(
            goal,
            Method::Algebra { op: "macneish".to_string(), params },
            "td-macneish",
        ));
    }
    Some(PlanNode::leaf(goal, Method::Import, "td-external"))
}

/// `r` as a product of maximal prime-power factors.
fn prime_power_factors(r: u32) -> Vec<u32> {
    let mut rest = r;
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            let mut f = 1;
            while rest % p == 0 {
                f *= p;
                rest /= p;
            }
            factors.push(f);
        }
        p += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    factors
}

/// Plans the `(u, 1^u)`-grid double GDD on 4 groups used when weighting a
/// block-size-4 design by `u`.
fn plan_point_dgdd(u: u32) -> PlanNode {
    let sig = TypeSignature::new([(u, 4)]);
    let holes = TypeSignature::new([(4, u)]);
    let goal = Goal::dgdd(sig.clone(), holes.clone());
    if u >= 4 && u != 6 && algebra::prime_power(u).is_some() {
        return PlanNode::leaf(
            goal,
            Method::Derived {
                op: "dgdd-rtd".to_string(),
                params: vec![("n".to_string(), u as u64)],
            },
            "dgdd-rtd-direct",
        );
    }
    if cross_pair_count(&sig) <= search_budget_pairs() {
        return PlanNode::leaf(goal, Method::Search, "dgdd-search");
    }
    PlanNode::leaf(goal, Method::Import, "dgdd-external")
}

/// Plans the `(g, 1^g)`-grid double GDD on `u` groups used for hole filling.
fn plan_grid_dgdd(g: u32, u: u32) -> PlanNode {
    let sig = TypeSignature::new([(g, u)]);
    let holes = TypeSignature::new([(u, g)]);
    let goal = Goal::dgdd(sig.clone(), holes.clone());
    if g == 4 && u >= 4 && u != 6 && algebra::prime_power(u).is_some() {
        return PlanNode::leaf(
            goal,
            Method::Derived {
                op: "dgdd-rtd-transpose".to_string(),
                params: vec![("n".to_string(), u as u64)],
            },
            "dgdd-transpose",
        );
    }
    if cross_pair_count(&sig) <= search_budget_pairs() {
        return PlanNode::leaf(goal, Method::Search, "dgdd-search");
    }
    PlanNode::leaf(goal, Method::Import, "dgdd-external")
}

/// Class-scheme planning for `g = 3 (mod 6)`, `u` in `{7, 8, 11}`.  Returns
/// `None` outside the scheme's reach (including the group sizes delegated to
/// divisibility-based settlements).
fn plan_scheme(g: u32, u: u32, m: u32, depth: u32) -> Option<PlanNode> {
    if g % 6 != 3 || !matches!(u, 7 | 8 | 11) {
        return None;
    }
    if [15u32, 21, 27, 33].iter().any(|&d| g % d == 0) {
        return None;
    }

    let (params, v, rule) = if u == 8 {
        scheme_u8(g, m)?
    } else {
        scheme_7_11(g, u, m)?
    };

    let FundamentalParams { a, b, c, d, t } = params;
    let rgdd = PlanNode::leaf(
        Goal::rgdd(TypeSignature::new([(u, v + 1)])),
        Method::Algebra {
            op: "rtd".to_string(),
            params: vec![("k".to_string(), (v + 1) as u64), ("q".to_string(), u as u64)],
        },
        "rtd-direct",
    );

    let mut children = vec![rgdd];
    if t > 0 {
        children.push(plan_three_part(a, v, b, c, depth + 1)?);
    }
    if t < u - 1 {
        children.push(plan_sub(a, v, b, depth + 1)?);
    }
    children.push(plan_sub(a, u, d, depth + 1)?);
    children.push(plan_sub(b, u, d, depth + 1)?);

    Some(PlanNode {
        goal: Goal::gdd(sig_gum(g, u, m)),
        method: Method::Theorem {
            name: "fundamental".to_string(),
            params: vec![
                ("a".to_string(), a as u64),
                ("b".to_string(), b as u64),
                ("c".to_string(), c as u64),
                ("d".to_string(), d as u64),
                ("t".to_string(), t as u64),
                ("u".to_string(), u as u64),
                ("v".to_string(), v as u64),
            ],
            children,
        },
        rule: rule.to_string(),
    })
}

/// Scheme parameters for `u` in `{7, 11}`: tabulated or formula `(a, v, b)`,
/// then `c = a` and `m = t a + d` with `d = 3 (mod 6)`, `3 <= d <= a - 3`.
fn scheme_7_11(g: u32, u: u32, m: u32) -> Option<(FundamentalParams, u32, &'static str)> {
    let (row, rule) = match SCHEME_6K3_ROWS.iter().find(|(rg, _)| *rg == g) {
        Some((_, row)) => (*row, "scheme-6k3-named"),
        None if g >= 111 => {
            let a = 6 * ((g + 18) / 36);
            let b = g.checked_sub(5 * a)?;
            if b % 6 != 3 || b == 0 || 2 * b > a * 4 {
                return None;
            }
            ((a, 5, b), "scheme-6k3-formula")
        }
        None => return None,
    };
    let (a, v, b) = row;
    if m % 6 != 3 {
        return None;
    }
    let t = if m + 3 <= a { 0 } else { (m - (a - 3)).div_ceil(a) };
    if t > u - 1 {
        return None;
    }
    let d = m.checked_sub(t * a)?;
    if d % 6 != 3 || d + 3 > a {
        return None;
    }
    Some((FundamentalParams { a, b, c: a, d, t }, v, rule))
}

/// Scheme parameters for `u = 8`: the general `g = 3 (mod 30)` family plus
/// a few tabulated specific rows.
fn scheme_u8(g: u32, m: u32) -> Option<(FundamentalParams, u32, &'static str)> {
    if m % 3 != 0 {
        return None;
    }
    for (rg, ms, a, v, b, c) in SCHEME_U8_ROWS {
        if *rg == g && ms.contains(m) {
            let d = m.checked_sub(7 * c)?;
            return Some((
                FundamentalParams { a: *a, b: *b, c: *c, d, t: 7 },
                *v,
                match g {
                    51 => "scheme-u8-g51",
                    69 => "scheme-u8-g69",
                    _ => "scheme-u8-g87",
                },
            ));
        }
    }
    if g % 30 != 3 {
        return None;
    }
    let h = (g - 3) / 30;
    if h < 3 {
        return None;
    }
    let (a, b, c) = (6 * h, 6 * h + 3, 12 * h);
    let t = (m / c).min(7);
    let d = m - t * c;
    if d > 3 * b {
        return None;
    }
    Some((FundamentalParams { a, b, c, d, t }, 4, "scheme-u8-general"))
}

/// Plans a three-group-size filler `a^v b^1 c^1`.  With `c = a` the type
/// collapses to `a^(v+1) b^1` and is planned as such; otherwise the appendix,
/// the solver, and explicit import are the only sources.
fn plan_three_part(a: u32, v: u32, b: u32, c: u32, depth: u32) -> Option<PlanNode> {
    if c == a {
        return plan_sub(a, v + 1, b, depth);
    }
    let sig = TypeSignature::new([(a, v), (b, 1), (c, 1)]);
    let goal = Goal::gdd(sig.clone());
    if let Some(entry) = Catalogue::builtin().find_by_signature(&sig) {
        return Some(PlanNode::leaf(
            goal,
            Method::Appendix { name: entry.name.clone() },
            "appendix-direct",
        ));
    }
    if cross_pair_count(&sig) <= search_budget_pairs() {
        return Some(PlanNode::leaf(goal, Method::Search, "search-small"));
    }
    // The x^4 (2x)^1 y^1 family with x <= y <= 2x is known to exist.
    let rule = if v == 4 && c == 2 * a && a <= b && b <= 2 * a {
        "filler-family-import"
    } else {
        "filler-external"
    };
    Some(PlanNode::leaf(goal, Method::Import, rule))
}

/// An ingredient a plan execution could not supply.
#[derive(Clone, Debug)]
pub struct MissingIngredient {
    pub signature: TypeSignature,
    pub kind: DesignKind,
    pub holes: Option<TypeSignature>,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for MissingIngredient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}", self.signature, self.kind)?;
        if let Some(h) = &self.holes {
            write!(f, ", holes {h}")?;
        }
        write!(f, "]: {}", self.reason)
    }
}

/// The result of executing a plan: either the finished design or the list of
/// ingredients that could not be supplied.
#[derive(Debug)]
pub struct ExecutionOutcome {
    pub design: Option<GroupedDesign>,
    pub missing: Vec<MissingIngredient>,
    pub notes: Vec<String>,
}

/// Knobs for plan execution; only search leaves consume them.
#[derive(Clone, Copy, Debug)]
pub struct ExecOptions {
    pub seed: u64,
    pub budget: Duration,
    pub attempts: u32,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { seed: 0, budget: Duration::from_secs(30), attempts: 4 }
    }
}

/// Executes a plan bottom-up against a registry.
///
/// Every node first consults the registry, so re-executing a plan is a pure
/// cache hit; every design built along the way is stored back.  Import
/// leaves and failed searches do not abort execution: they are collected in
/// [`ExecutionOutcome::missing`] so one run reports everything that is
/// lacking.
pub fn execute_plan(
    plan: &PlanNode,
    registry: &Registry,
    opts: &ExecOptions,
) -> Result<ExecutionOutcome> {
    let mut missing = Vec::new();
    let mut notes = Vec::new();
    let design = exec_node(plan, registry, opts, &mut missing, &mut notes)?;
    Ok(ExecutionOutcome { design, missing, notes })
}

fn exec_node(
    node: &PlanNode,
    registry: &Registry,
    opts: &ExecOptions,
    missing: &mut Vec<MissingIngredient>,
    notes: &mut Vec<String>,
) -> Result<Option<GroupedDesign>> {
    if let Some(found) =
        registry.get(&node.goal.signature, node.goal.kind, node.goal.holes.as_ref())?
    {
        return Ok(Some(found));
    }
    let built = match &node.method {
        Method::Appendix { name } => {
            let entry = Catalogue::builtin()
                .find_by_name(name)
                .ok_or_else(|| Error::UnknownEntry(name.clone()))?;
            Some(entry.expand()?)
        }
        Method::Algebra { op, params } => Some(run_algebra(op, params)?),
        Method::Derived { op, params } => Some(run_derived(op, params)?),
        Method::Search => {
            let solve_opts = SolveOptions {
                seed: opts.seed,
                budget: opts.budget,
                max_pairs: search_budget_pairs(),
            };
            match solve_with_restarts(
                &node.goal.signature,
                node.goal.holes.as_ref(),
                &solve_opts,
                opts.attempts,
            )? {
                SolveOutcome::Solved(d) => Some(d),
                SolveOutcome::Unsat => {
                    record_missing(node, "search exhausted: no such design", missing);
                    None
                }
                SolveOutcome::Timeout => {
                    record_missing(node, "search timed out within budget", missing);
                    None
                }
            }
        }
        Method::Import => {
            record_missing(node, "external import required", missing);
            None
        }
        Method::Theorem { name, params, children } => {
            let mut built_children = Vec::with_capacity(children.len());
            let mut all_present = true;
            for child in children {
                match exec_node(child, registry, opts, missing, notes)? {
                    Some(d) => built_children.push(Some(d)),
                    None => {
                        built_children.push(None);
                        all_present = false;
                    }
                }
            }
            if all_present {
                let designs: Vec<GroupedDesign> =
                    built_children.into_iter().map(|d| d.unwrap()).collect();
                Some(run_theorem(name, params, children, &designs, notes)?)
            } else {
                None
            }
        }
    };
    match built {
        Some(d) => {
            registry.put(&d)?;
            Ok(Some(d))
        }
        None => Ok(None),
    }
}

fn record_missing(node: &PlanNode, reason: &str, missing: &mut Vec<MissingIngredient>) {
    missing.push(MissingIngredient {
        signature: node.goal.signature.clone(),
        kind: node.goal.kind,
        holes: node.goal.holes.clone(),
        rule: node.rule.clone(),
        reason: reason.to_string(),
    });
}

fn param(params: &[(String, u64)], key: &str) -> Result<u64> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::Invalid(format!("plan node is missing parameter {key:?}")))
}

fn run_algebra(op: &str, params: &[(String, u64)]) -> Result<GroupedDesign> {
    match op {
        "td" => algebra::td(param(params, "k")? as u32, param(params, "q")? as u32),
        "rtd" => algebra::rtd(param(params, "k")? as u32, param(params, "q")? as u32),
        "macneish" => {
            let k = param(params, "k")? as u32;
            let factors: Vec<u32> = params
                .iter()
                .filter(|(key, _)| key == "q")
                .map(|&(_, v)| v as u32)
                .collect();
            if factors.len() < 2 {
                return Err(Error::Invalid(
                    "product construction needs at least two factors".into(),
                ));
            }
            let mut acc = algebra::td(k, factors[0])?;
            for &f in &factors[1..] {
                acc = algebra::macneish(&acc, &algebra::td(k, f)?)?;
            }
            Ok(acc)
        }
        other => Err(Error::Invalid(format!("unknown algebra op {other:?}"))),
    }
}

fn run_derived(op: &str, params: &[(String, u64)]) -> Result<GroupedDesign> {
    match op {
        "dgdd-rtd" => crate::derived::rtd_to_dgdd(param(params, "n")? as u32),
        "dgdd-rtd-transpose" => {
            crate::derived::dgdd_transpose(&crate::derived::rtd_to_dgdd(param(params, "n")? as u32)?)
        }
        other => Err(Error::Invalid(format!("unknown derived op {other:?}"))),
    }
}

/// Applies a named composition.  Ingredients are matched to roles by their
/// planned goal, so child order never has to be guessed.
fn run_theorem(
    name: &str,
    params: &[(String, u64)],
    children: &[PlanNode],
    designs: &[GroupedDesign],
    notes: &mut Vec<String>,
) -> Result<GroupedDesign> {
    let by_sig = |sig: &TypeSignature, kind: Option<DesignKind>| -> Result<&GroupedDesign> {
        children
            .iter()
            .position(|c| {
                c.goal.signature == *sig && kind.map_or(true, |k| c.goal.kind == k)
            })
            .map(|i| &designs[i])
            .ok_or_else(|| {
                Error::Invalid(format!("plan node has no child with signature {sig}"))
            })
    };
    match name {
        "fill-groups" => {
            let g = param(params, "g")? as u32;
            let td_sig = TypeSignature::new([(g, 4)]);
            let td = by_sig(&td_sig, Some(DesignKind::Td))?;
            let big = children
                .iter()
                .position(|c| c.goal.kind != DesignKind::Td)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no design to fill groups of".into()))?;
            thm_fill_groups(big, g, td)
        }
        "scalar-inflate" => {
            let r = param(params, "r")? as u32;
            let td_sig = TypeSignature::new([(r, 4)]);
            let td = by_sig(&td_sig, Some(DesignKind::Td))?;
            let base = children
                .iter()
                .position(|c| c.goal.kind != DesignKind::Td || c.goal.signature != td_sig)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no design to inflate".into()))?;
            thm_scalar_inflate(base, r, td)
        }
        "wilson-inflate" => {
            let u = param(params, "u")? as u32;
            let m = param(params, "m")? as u32;
            let dgdd = children
                .iter()
                .position(|c| c.goal.kind == DesignKind::Dgdd)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no grid double GDD among children".into()))?;
            let small = &designs[0];
            let fillers: Vec<&GroupedDesign> = designs[1..]
                .iter()
                .zip(&children[1..])
                .filter(|(_, c)| c.goal.kind != DesignKind::Dgdd)
                .map(|(d, _)| d)
                .collect();
            thm_wilson_inflate(small, u, dgdd, &fillers, m)
        }
        "hole-fill" => {
            let m = param(params, "m")? as u32;
            let dgdd = children
                .iter()
                .position(|c| c.goal.kind == DesignKind::Dgdd)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no grid double GDD among children".into()))?;
            let filler = children
                .iter()
                .position(|c| c.goal.kind != DesignKind::Dgdd)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no hole filler among children".into()))?;
            let (design, warnings) = thm_hole_fill(dgdd, filler, m)?;
            notes.extend(warnings);
            Ok(design)
        }
        "fundamental" => {
            let get = |k: &str| -> Result<u32> { Ok(param(params, k)? as u32) };
            let fp = FundamentalParams {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
                d: get("d")?,
                t: get("t")?,
            };
            let (u, v) = (get("u")?, get("v")?);
            let rgdd = children
                .iter()
                .position(|c| c.goal.kind == DesignKind::Rgdd)
                .map(|i| &designs[i])
                .ok_or_else(|| Error::Invalid("no resolvable design among children".into()))?;
            let find = |sig: TypeSignature| -> Option<&GroupedDesign> {
                children
                    .iter()
                    .position(|c| c.goal.kind != DesignKind::Rgdd && c.goal.signature == sig)
                    .map(|i| &designs[i])
            };
            let fillers = FundamentalFillers {
                class_with_points: find(TypeSignature::new([(fp.a, v), (fp.b, 1), (fp.c, 1)])),
                class_plain: find(TypeSignature::new([(fp.a, v), (fp.b, 1)])),
                group_a: find(TypeSignature::new([(fp.a, u), (fp.d, 1)])),
                group_b: find(TypeSignature::new([(fp.b, u), (fp.d, 1)])),
            };
            thm_fundamental(fp, u, v, rgdd, &fillers)
        }
        other => Err(Error::Invalid(format!("unknown composition {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify;

    fn sig(text: &str) -> TypeSignature {
        TypeSignature::parse(text).unwrap()
    }

    fn assert_rule_known(node: &PlanNode) {
        assert!(
            rule_text(&node.rule).is_some(),
            "unknown rule id {:?} on node for {}",
            node.rule,
            node.goal
        );
        if let Method::Theorem { children, .. } = &node.method {
            for c in children {
                assert_rule_known(c);
            }
        }
    }

    #[test]
    fn plan_13_24_133_splits_off_the_appendix_big_design() {
        let plan = plan_gum(13, 24, 133).unwrap();
        assert_rule_known(&plan);
        assert_eq!(plan.rule, "fill-groups-reduction");
        assert!(plan.is_self_contained());
        let Method::Theorem { name, children, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "fill-groups");
        assert_eq!(children.len(), 2);
        assert_eq!(children[0].goal.signature, sig("39^8 120^1"));
        assert!(matches!(children[0].method, Method::Appendix { .. }));
        assert_eq!(children[1].goal.signature, sig("13^4"));
        assert!(matches!(children[1].method, Method::Algebra { .. }));
    }

    #[test]
    fn plan_39_9_30_factors_out_three() {
        let plan = plan_gum(39, 9, 30).unwrap();
        assert_rule_known(&plan);
        assert_eq!(plan.rule, "scalar-factorization");
        assert!(plan.is_self_contained());
        let Method::Theorem { name, children, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "scalar-inflate");
        assert_eq!(children[0].goal.signature, sig("13^9 10^1"));
        assert!(matches!(children[0].method, Method::Appendix { .. }));
        assert_eq!(children[1].goal.signature, sig("3^4"));
    }

    #[test]
    fn plan_25_9_40_factors_out_five_with_searchable_base() {
        let plan = plan_gum(25, 9, 40).unwrap();
        assert_rule_known(&plan);
        let Method::Theorem { name, children, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "scalar-inflate");
        assert_eq!(children[0].goal.signature, sig("5^9 8^1"));
        assert!(
            matches!(children[0].method, Method::Search | Method::Appendix { .. } | Method::Import),
            "base design must be searched, catalogued, or explicitly imported"
        );
        assert_eq!(children[1].goal.signature, sig("5^4"));
    }

    #[test]
    fn catalogued_two_part_types_plan_as_appendix_leaves() {
        let mut checked = 0;
        for entry in Catalogue::builtin().entries() {
            let s = entry.signature();
            if s.parts().len() > 2 {
                continue;
            }
            let node = plan_shape(&s, 0)
                .unwrap_or_else(|| panic!("catalogue type {s} failed to plan"));
            assert!(
                matches!(node.method, Method::Appendix { .. }),
                "{s} should plan as a catalogue leaf, got {node}"
            );
            assert_eq!(node.rule, "appendix-direct");
            checked += 1;
        }
        assert!(checked > 100, "only {checked} catalogue types checked");
    }

    #[test]
    fn scheme_row_39_7_structure() {
        let plan = plan_gum(39, 7, 33).unwrap();
        assert_rule_known(&plan);
        assert_eq!(plan.rule, "scheme-6k3-named");
        let Method::Theorem { name, params, children } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "fundamental");
        let get = |k: &str| params.iter().find(|(key, _)| key == k).unwrap().1;
        assert_eq!((get("a"), get("b"), get("c")), (6, 9, 6));
        assert_eq!(get("t"), 5);
        assert_eq!(get("d"), 3);
        // Resolvable ingredient plus class and group fillers.
        assert_eq!(children[0].goal.kind, DesignKind::Rgdd);
        assert_eq!(children[0].goal.signature, sig("7^6"));
        let sigs: Vec<&TypeSignature> =
            children[1..].iter().map(|c| &c.goal.signature).collect();
        assert!(sigs.contains(&&sig("6^6 9^1")), "class filler with points: {sigs:?}");
        assert!(sigs.contains(&&sig("6^5 9^1")), "plain class filler: {sigs:?}");
        assert!(sigs.contains(&&sig("6^7 3^1")), "group filler: {sigs:?}");
        assert!(sigs.contains(&&sig("9^7 3^1")), "first-group filler: {sigs:?}");
    }

    #[test]
    fn scheme_formula_kicks_in_at_111() {
        let plan = plan_gum(111, 7, 33).unwrap();
        assert_eq!(plan.rule, "scheme-6k3-formula");
        let Method::Theorem { params, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        let get = |k: &str| params.iter().find(|(key, _)| key == k).unwrap().1;
        assert_eq!(get("a"), 18);
        assert_eq!(get("b"), 21);
    }

    #[test]
    fn scheme_u8_general_uses_catalogued_three_part_filler() {
        let plan = plan_gum(93, 8, 300).unwrap();
        assert_eq!(plan.rule, "scheme-u8-general");
        let Method::Theorem { children, params, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        let get = |k: &str| params.iter().find(|(key, _)| key == k).unwrap().1;
        assert_eq!((get("a"), get("b"), get("c")), (18, 21, 36));
        assert_eq!(get("t"), 7);
        assert_eq!(get("d"), 48);
        let three_part = children
            .iter()
            .find(|c| c.goal.signature == sig("18^4 21^1 36^1"))
            .expect("three-size class filler present");
        assert!(
            matches!(three_part.method, Method::Appendix { .. }),
            "expected a catalogue leaf, got {three_part}"
        );
    }

    #[test]
    fn delegated_sizes_fall_through_to_import() {
        // 33 is divisible by 33: the class scheme defers, no other route
        // applies, and the plan says so instead of guessing.
        let plan = plan_gum(33, 7, 3).unwrap();
        assert!(matches!(plan.method, Method::Import));
        assert_eq!(plan.rule, "beyond-schedule");
    }

    #[test]
    fn hole_fill_row_cites_its_table() {
        let plan = plan_gum(13, 12, 1).unwrap();
        assert_eq!(plan.rule, "g13-hole-fill");
        let Method::Theorem { name, children, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "hole-fill");
        assert_eq!(children[0].goal.kind, DesignKind::Dgdd);
        assert_eq!(children[0].goal.signature, sig("13^12"));
        assert_eq!(children[0].goal.holes, Some(sig("12^13")));
        assert!(matches!(children[0].method, Method::Import));
        // The filler 1^12 1^1 collapses to the uniform 1^13 point design.
        assert_eq!(children[1].goal.signature, sig("1^13"));
        assert!(children[1].is_self_contained());
    }

    #[test]
    fn small_overlay_row_builds_both_fillers() {
        let plan = plan_gum(23, 12, 5).unwrap();
        assert_eq!(plan.rule, "g23-small-overlay");
        let Method::Theorem { name, children, .. } = &plan.method else {
            panic!("expected a composition, got {plan}");
        };
        assert_eq!(name, "wilson-inflate");
        assert_eq!(children[0].goal.signature, sig("2^9 5^1"));
        let sigs: Vec<&TypeSignature> = children.iter().map(|c| &c.goal.signature).collect();
        assert!(sigs.contains(&&sig("2^12 5^1")), "{sigs:?}");
        // The 5^12 5^1 filler collapses to uniform 5^13.
        assert!(sigs.contains(&&sig("5^13")), "{sigs:?}");
    }

    #[test]
    fn tall_narrow_cases_cite_the_group_overlay_route() {
        let plan = plan_gum(43, 33, 22).unwrap();
        assert!(matches!(plan.method, Method::Import));
        assert_eq!(plan.rule, "group-overlay-external");
    }

    #[test]
    fn plans_are_pure_functions() {
        assert_eq!(plan_gum(23, 12, 5).unwrap(), plan_gum(23, 12, 5).unwrap());
        assert_eq!(plan_gum(13, 24, 133).unwrap(), plan_gum(13, 24, 133).unwrap());
    }

    #[test]
    fn inadmissible_and_nonexistent_types_are_refused() {
        assert!(plan_gum(3, 5, 3).is_err());
        assert!(plan_gum(2, 6, 5).is_err());
        assert!(plan_gum(2, 4, 0).is_err());
        assert!(plan_gum(6, 4, 0).is_err());
    }

    #[test]
    fn execute_plan_builds_and_then_caches() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let plan = plan_gum(13, 24, 133).unwrap();
        let opts = ExecOptions::default();

        let out = execute_plan(&plan, &registry, &opts).unwrap();
        assert!(out.missing.is_empty(), "missing: {:?}", out.missing);
        let design = out.design.expect("plan should build");
        assert_eq!(design.signature(), sig("13^24 133^1"));
        assert_eq!(design.blocks().len(), 14690);
        assert!(verify(&design).passed);

        // Second run is a pure registry hit with identical content.
        let again = execute_plan(&plan, &registry, &opts).unwrap();
        assert_eq!(again.design.unwrap().to_text(), design.to_text());
    }

    #[test]
    fn execute_reports_missing_ingredients_by_type() {
        let dir = tempfile::tempdir().unwrap();
        let registry = Registry::open(dir.path()).unwrap();
        let plan = plan_gum(51, 8, 156).unwrap();
        assert_eq!(plan.rule, "scheme-u8-g51");
        assert!(!plan.is_self_contained());

        // A short search budget: this test is about the missing-ingredient
        // report, not about what the solver could find with more time.
        let opts =
            ExecOptions { seed: 0, budget: Duration::from_millis(500), attempts: 1 };
        let out = execute_plan(&plan, &registry, &opts).unwrap();
        assert!(out.design.is_none());
        let missing: Vec<&TypeSignature> = out.missing.iter().map(|m| &m.signature).collect();
        assert!(missing.contains(&&sig("9^8 30^1")), "missing list: {missing:?}");
        let import = out
            .missing
            .iter()
            .find(|m| m.signature == sig("9^8 30^1"))
            .unwrap();
        assert_eq!(import.reason, "external import required");
    }

    #[test]
    fn renderings_name_every_rule() {
        let plan = plan_gum(23, 12, 5).unwrap();
        let text = plan.render();
        assert!(text.contains("g23-small-overlay"), "{text}");
        assert!(text.contains("wilson-inflate"), "{text}");
        for line in text.lines() {
            assert!(line.contains("[rule "), "unannotated line: {line}");
        }
    }
}
