//! Embedding types by height.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{precondition, Result};

/// `e_n` from `e_0 = e_1 = 1`, `e_{n+1} = 2·e_n·Σ_{i<n} e_i + e_n²`.
pub fn embedding_types_of_height(n: usize) -> BigUint {
    let mut e: Vec<BigUint> = vec![BigUint::one(), BigUint::one()];
    while e.len() <= n {
        let k = e.len() - 1;
        let below: BigUint = e[..k].iter().fold(BigUint::zero(), |a, b| a + b);
        let next = BigUint::from(2u8) * &e[k] * below + &e[k] * &e[k];
        e.push(next);
    }
    e.swap_remove(n)
}

/// Signatures of all fully closed tree shapes with exactly `h` levels (`h = 0` is the empty tree).
pub fn embedding_shapes_of_height(h: usize) -> Result<Vec<String>> {
    if h > 5 {
        return precondition("shape enumeration is limited to height 5");
    }
    if h == 0 {
        return Ok(vec!["-".into()]);
    }
    let mut at_most: Vec<Vec<String>> = vec![vec![]];
    for k in 1..=h {
        let mut slot = vec!["-".to_string()];
        slot.extend(at_most[k - 1].iter().cloned());
        let mut v = Vec::with_capacity(slot.len() * slot.len());
        for a in &slot {
            for b in &slot {
                v.push(format!("({a},{b})"));
            }
        }
        at_most.push(v);
    }
    let lower: std::collections::HashSet<&String> = at_most[h - 1].iter().collect();
    Ok(at_most[h].iter().filter(|s| !lower.contains(s)).cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_values() {
        let v: Vec<u64> = (0..=4).map(|n| embedding_types_of_height(n).try_into().unwrap()).collect();
        assert_eq!(v, vec![1, 1, 3, 21, 651]);
    }

    #[test]
    fn shapes_agree_with_recurrence() {
        for h in 0..=4 {
            assert_eq!(BigUint::from(embedding_shapes_of_height(h).unwrap().len()), embedding_types_of_height(h));
        }
        assert!(embedding_shapes_of_height(6).is_err());
    }
}
