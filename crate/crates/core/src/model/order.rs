use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::model::{Goal, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("derivation cycle through goals {}", .goals.join(", "))]
pub struct CycleError {
    /// Goals not reachable from any root, in declaration order.
    pub goals: Vec<String>,
}

/// The goal a goal is derived from, through its deriving strategy.
pub(crate) fn parent_goal<'m>(model: &'m Model, goal: &Goal) -> Option<&'m Goal> {
    let strategy = model.strategy(goal.derived_from.as_ref()?.as_str())?;
    model.goal(strategy.parent_goal.as_str())
}

/// Goals directly derived from `goal`: per strategy in declaration order, then
/// per derived goal in declaration order.
pub(crate) fn children<'m>(model: &'m Model, goal: &str) -> Vec<&'m Goal> {
    let mut out = Vec::new();
    for s in model.strategies().filter(|s| s.parent_goal.as_str() == goal) {
        out.extend(model.goals_derived_from(s.id.as_str()));
    }
    out
}

/// Every goal below `goal` in the derivation forest (excluding `goal`).
pub fn descendants(model: &Model, goal: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![goal.to_string()];
    while let Some(g) = stack.pop() {
        for child in children(model, &g) {
            let name = child.id.name.clone();
            if name != goal && seen.insert(name.clone()) {
                out.push(name.clone());
                stack.push(name);
            }
        }
    }
    out
}

/// Goals ordered children-before-parents: a post-order walk of the
/// derivation forest, roots and siblings in declaration order.
///
/// Goals whose deriving strategy does not resolve are treated as roots.
pub fn derivation_order(model: &Model) -> Result<Vec<String>, CycleError> {
    let goals: Vec<&Goal> = model.goals().collect();
    let mut order = Vec::with_capacity(goals.len());
    let mut visited: HashSet<&str> = HashSet::new();

    fn visit<'m>(model: &'m Model, goal: &'m Goal, visited: &mut HashSet<&'m str>, order: &mut Vec<String>) {
        if !visited.insert(goal.id.as_str()) {
            return;
        }
        for child in children(model, goal.id.as_str()) {
            visit(model, child, visited, order);
        }
        order.push(goal.id.name.clone());
    }

    for goal in &goals {
        if parent_goal(model, goal).is_none() {
            visit(model, goal, &mut visited, &mut order);
        }
    }
    if visited.len() < goals.len() {
        let mut stuck = Vec::new();
        for g in &goals {
            if !visited.contains(g.id.as_str()) && !stuck.contains(&g.id.name) {
                stuck.push(g.id.name.clone());
            }
        }
        return Err(CycleError { goals: stuck });
    }
    Ok(order)
}

/// Derivation cycles, each listed from its first-declared goal onwards.
pub(crate) fn find_cycles(model: &Model) -> Vec<Vec<String>> {
    let index: HashMap<&str, usize> = model.goals().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect();
    let goals: Vec<&Goal> = model.goals().collect();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; goals.len()];
    let mut cycles = Vec::new();
    for start in 0..goals.len() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                0 => {
                    state[i] = 1;
                    path.push(i);
                    cur = parent_goal(model, goals[i]).and_then(|p| index.get(p.id.as_str()).copied());
                }
                1 => {
                    let at = path.iter().position(|&p| p == i).unwrap();
                    let mut members: Vec<usize> = path[at..].to_vec();
                    // Report in derivation direction (parent first), starting
                    // from the earliest declared member.
                    members.reverse();
                    let first = members
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, &m)| m)
                        .map(|(k, _)| k)
                        .unwrap();
                    members.rotate_left(first);
                    cycles.push(members.into_iter().map(|m| goals[m].id.name.clone()).collect());
                    break;
                }
                _ => break,
            }
        }
        for i in path {
            state[i] = 2;
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_model;

    fn model(text: &str) -> Model {
        parse_model(text, "t.gqms").unwrap()
    }

    const TWO_ROOTS: &str = "
        goal A { level 1 }
        strategy SA for A { decision \"d\" }
        goal B { level 1 }
        goal A1 { level 2 derived_from SA }
    ";

    #[test]
    fn post_order_with_declaration_tiebreak() {
        assert_eq!(derivation_order(&model(TWO_ROOTS)).unwrap(), vec!["A1", "A", "B"]);
    }

    #[test]
    fn singleton() {
        assert_eq!(derivation_order(&model("goal G1 { level 1 }")).unwrap(), vec!["G1"]);
    }

    #[test]
    fn empty_model() {
        assert!(derivation_order(&Model::default()).unwrap().is_empty());
    }

    #[test]
    fn descendants_are_transitive() {
        let m = model(
            "goal G1 { } strategy S1 for G1 { } goal G2 { derived_from S1 }
             strategy S2 for G2 { } goal G3 { derived_from S2 } goal X { }",
        );
        assert_eq!(descendants(&m, "G1"), vec!["G2", "G3"]);
        assert!(descendants(&m, "G3").is_empty());
        assert!(descendants(&m, "X").is_empty());
    }

    #[test]
    fn cycles_are_rejected() {
        let m = model(
            "goal G1 { derived_from S2 } strategy S1 for G1 { }
             goal G2 { derived_from S1 } strategy S2 for G2 { } goal R { }",
        );
        let err = derivation_order(&m).unwrap_err();
        assert_eq!(err.goals, vec!["G1", "G2"]);
        assert_eq!(find_cycles(&m), vec![vec!["G1".to_string(), "G2".to_string()]]);
    }

    #[test]
    fn self_derivation_is_a_cycle() {
        let m = model("goal G { derived_from S } strategy S for G { }");
        assert_eq!(find_cycles(&m), vec![vec!["G".to_string()]]);
    }
}
