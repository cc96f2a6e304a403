//! One seeded corruption of the golden model per validation rule.

use gqms::diagnostic::codes;
use gqms::model::{detect_conflicts, validate};
use gqms::syntax::parse_model;

use super::{abc_edit, ABC};

pub struct Mutation {
    pub name: &'static str,
    pub code: &'static str,
    pub strict: bool,
    pub source: String,
}

fn append(extra: &str) -> String {
    format!("{ABC}\n{extra}\n")
}

const EXTRA_PLAN: &str = r#"gqm for G1 via S2 {
  mgoal { object "o" purpose "p" focus "f" viewpoint "v" context "c" }
  metric P
  interpretation { satisfied when P[t] > 0 }
}"#;

pub fn cases() -> Vec<Mutation> {
    let m = |name, code, strict, source| Mutation {
        name,
        code,
        strict,
        source,
    };
    let g1_plan_start = ABC.find("gqm for G1 via S1").unwrap();
    let g1_plan_len = ABC[g1_plan_start..].find("\n}\n").unwrap() + 2;
    let g1_plan = &ABC[g1_plan_start..g1_plan_start + g1_plan_len];
    let declarations_only: String = ABC
        .lines()
        .filter(|l| l.starts_with("context ") || l.starts_with("assumption ") || l.starts_with("metric "))
        .map(|l| format!("{l}\n"))
        .collect();
    vec![
        m(
            "magnitude deleted from G2",
            codes::MISSING_FIELD,
            false,
            abc_edit("  magnitude \"5% more than the prior release\"\n", ""),
        ),
        m(
            "type deleted from G1",
            codes::MISSING_TYPE,
            false,
            abc_edit("  type success\n", ""),
        ),
        m(
            "context C1 declared twice",
            codes::DUPLICATE_ID,
            false,
            append("context C1 \"again\""),
        ),
        m(
            "metric P redeclared as boolean",
            codes::METRIC_CONFLICT,
            false,
            append("metric P: boolean"),
        ),
        m(
            "metric P redeclared identically",
            codes::DUPLICATE_METRIC,
            false,
            append("metric P: number unit \"currency\" period \"year\""),
        ),
        m(
            "strategy S1 names an undeclared context",
            codes::DANGLING_REF,
            false,
            abc_edit("  context [C2]\n", "  context [C9]\n"),
        ),
        m(
            "G1 derived from its own descendant",
            codes::CYCLE,
            false,
            abc_edit("  type success\n", "  type success\n  derived_from S3\n"),
        ),
        m(
            "G3 placed at level 4",
            codes::LEVEL,
            false,
            abc_edit("  level 3\n", "  level 4\n"),
        ),
        m(
            "second plan for G1 via S1",
            codes::DUPLICATE_PLAN,
            false,
            append(g1_plan),
        ),
        m(
            "plan for G1 names strategy S2",
            codes::PLAN_MISMATCH,
            false,
            append(EXTRA_PLAN),
        ),
        m(
            "number used as a condition",
            codes::TYPE,
            false,
            abc_edit("and training_cost < 20000", "and training_cost"),
        ),
        m(
            "G2 reads the status of its parent",
            codes::STATUS_SCOPE,
            false,
            abc_edit(
                "satisfied when pct_change(new_M_reqs) > 0.05",
                "satisfied when pct_change(new_M_reqs) > 0.05 and status(G1) = satisfied",
            ),
        ),
        m(
            "plan for G3 deleted",
            codes::NO_PLAN,
            false,
            ABC.split("gqm for G3 via S3").next().unwrap().to_string(),
        ),
        m("every goal deleted (strict)", codes::EMPTY, true, declarations_only),
        m(
            "G1 declared competing with G3",
            codes::CONFLICT,
            false,
            abc_edit(
                "relations [complementary \"Maintain product quality\"]",
                "relations [complementary \"Maintain product quality\", competing G3]",
            ),
        ),
    ]
}

/// Every diagnostic code the validator and conflict detector report for `m`.
pub fn codes_for(m: &Mutation) -> Vec<&'static str> {
    let model = parse_model(&m.source, "abc.gqms").unwrap_or_else(|e| panic!("{}: {e:?}", m.name));
    validate(&model, m.strict)
        .iter()
        .chain(detect_conflicts(&model).iter())
        .map(|d| d.code)
        .collect()
}

/// All codes a rule can emit.
pub const ALL_CODES: [&str; 15] = [
    codes::MISSING_FIELD,
    codes::MISSING_TYPE,
    codes::DUPLICATE_ID,
    codes::METRIC_CONFLICT,
    codes::DUPLICATE_METRIC,
    codes::DANGLING_REF,
    codes::CYCLE,
    codes::LEVEL,
    codes::DUPLICATE_PLAN,
    codes::PLAN_MISMATCH,
    codes::TYPE,
    codes::STATUS_SCOPE,
    codes::NO_PLAN,
    codes::EMPTY,
    codes::CONFLICT,
];
