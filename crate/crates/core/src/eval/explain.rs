use std::fmt;

use serde::Serialize;

use crate::eval::{EvalError, EvaluationReport, InputUse, PlanTrace};
use crate::expr::GoalStatus;

/// Everything needed to audit one goal's verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub goal: String,
    pub period: u32,
    pub status: GoalStatus,
    pub plans: Vec<PlanTrace>,
    pub inputs: Vec<InputUse>,
    pub findings: Vec<String>,
}

pub fn explain(report: &EvaluationReport, goal: &str) -> Result<Explanation, EvalError> {
    let outcome = report
        .outcome(goal)
        .ok_or_else(|| EvalError::UnknownGoal(goal.to_string()))?;
    Ok(Explanation {
        goal: goal.to_string(),
        period: report.period,
        status: outcome.status,
        plans: outcome.plans.clone(),
        inputs: outcome.inputs.clone(),
        findings: report.findings_for(goal).map(|f| f.message.clone()).collect(),
    })
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at t={}: {}", self.goal, self.period, self.status)?;
        if self.plans.is_empty() {
            writeln!(f, "  no plan defined (see W_NO_PLAN)")?;
        }
        for plan in &self.plans {
            writeln!(f, "  {}: {}", plan.plan, plan.annotated)?;
        }
        for finding in &self.findings {
            writeln!(f, "  finding: {finding}")?;
        }
        Ok(())
    }
}
