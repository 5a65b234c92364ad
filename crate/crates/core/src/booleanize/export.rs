use serde::{Deserialize, Serialize};

use super::{BooleanSpec, Partition};
use crate::theory::{Cube, Sort};

fn cube_text(index: u32, width: usize) -> String {
    let cube = Cube::new(index, width).expect("reaction cubes fit the literal count");
    if width == 1 {
        cube.to_string()
    } else {
        format!("({cube})")
    }
}

fn disjunction(parts: Vec<String>) -> String {
    if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        format!("({})", parts.join(" | "))
    }
}

fn conjunction(parts: Vec<String>) -> String {
    if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        format!("({})", parts.join(" & "))
    }
}

/// `exactly one of e0..e{K-1}`.
fn legal(k: usize) -> String {
    if k == 1 {
        return "e0".into();
    }
    let rows = (0..k)
        .map(|i| {
            let lits: Vec<String> = (0..k)
                .map(|j| {
                    if i == j {
                        format!("e{j}")
                    } else {
                        format!("!e{j}")
                    }
                })
                .collect();
            format!("({})", lits.join(" & "))
        })
        .collect();
    disjunction(rows)
}

/// Cubes with `s0` set come first, then `s1`, and so on.
fn ordered_cubes(p: &Partition, width: usize) -> Vec<u32> {
    let mut cubes: Vec<u32> = p.reaction.iter().collect();
    let key = |c: &u32| -> Vec<bool> { (0..width).map(|i| c >> i & 1 == 0).collect() };
    cubes.sort_by_key(key);
    cubes
}

/// Infix Boolean LTL over `e0..e{K-1}` and `s0..s{L-1}`:
/// `G(matrix) & G(legal -> extra)`.
pub fn export_ltl_text(b: &BooleanSpec) -> String {
    let width = b.num_literals();
    let matrix = conjunction(b.matrix.conjuncts.iter().map(ToString::to_string).collect());
    let rows = b
        .partitions
        .iter()
        .map(|p| {
            let cubes = ordered_cubes(p, width)
                .into_iter()
                .map(|c| cube_text(c, width))
                .collect();
            format!("(e{} -> {})", p.id, disjunction(cubes))
        })
        .collect();
    format!(
        "G({}) & G({} -> {})",
        strip_outer(&matrix),
        legal(b.num_partitions()),
        conjunction(rows)
    )
}

fn strip_outer(text: &str) -> &str {
    if text.starts_with('(') && text.ends_with(')') && balanced(&text[1..text.len() - 1]) {
        &text[1..text.len() - 1]
    } else {
        text
    }
}

fn balanced(text: &str) -> bool {
    let mut depth = 0i64;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Output document of the `booleanize` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanizeReport {
    pub sort: Sort,
    pub env_vars: Vec<String>,
    pub sys_vars: Vec<String>,
    pub literals: Vec<String>,
    pub matrix: Vec<String>,
    pub partitions: Vec<Partition>,
    pub ltl: String,
}

impl BooleanizeReport {
    pub fn new(b: &BooleanSpec) -> Self {
        BooleanizeReport {
            sort: b.signature.sort,
            env_vars: b.signature.env_vars.clone(),
            sys_vars: b.signature.sys_vars.clone(),
            literals: b.literals.iter().map(ToString::to_string).collect(),
            matrix: b.matrix.conjuncts.iter().map(ToString::to_string).collect(),
            partitions: b.partitions.clone(),
            ltl: export_ltl_text(b),
        }
    }
}
