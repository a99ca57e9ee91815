use serde::Serialize;

use crate::error::{Error, Result};

/// Order patterns on a permutation `β1..β5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    /// `β1 > β2 > β3 > β4` and `β4 < β5`.
    P1,
    /// `β1 > β2`, `β2 < β3`, `β4 < β5`.
    P2,
    /// `β1 > β2 > β3 > β4` and `β4 > β5`.
    DescendingTail,
    /// `β1 > β2 > β3 > β4`, `β5` free.
    DescendingChain,
    /// No constraint.
    Any,
}

impl Pattern {
    pub fn matches<T: PartialOrd>(self, b: &[&T]) -> bool {
        let chain = b[0] > b[1] && b[1] > b[2] && b[2] > b[3];
        match self {
            Pattern::P1 => chain && b[3] < b[4],
            Pattern::P2 => b[0] > b[1] && b[1] < b[2] && b[3] < b[4],
            Pattern::DescendingTail => chain && b[3] > b[4],
            Pattern::DescendingChain => chain,
            Pattern::Any => true,
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exhaustive count over all 120 orderings of five pairwise-distinct values.
pub fn count_pattern_permutations<T: PartialOrd>(values: &[T], pattern: Pattern) -> Result<usize> {
    if values.len() != 5 {
        return Err(Error::Input(format!("need 5 values, got {}", values.len())));
    }
    for i in 0..5 {
        for j in i + 1..5 {
            if values[i].partial_cmp(&values[j]) != Some(std::cmp::Ordering::Less)
                && values[i].partial_cmp(&values[j]) != Some(std::cmp::Ordering::Greater)
            {
                return Err(Error::Input("values must be pairwise distinct".into()));
            }
        }
    }
    Ok(permutations(5)
        .iter()
        .filter(|p| {
            let b: Vec<&T> = p.iter().map(|&i| &values[i]).collect();
            pattern.matches(&b)
        })
        .count())
}
